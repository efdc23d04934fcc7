use std::fmt;
use std::fs;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use edgelayout::baseline::{brute_force_optimal, greedy_layout, random_layout};
use edgelayout::cost::decompose;
use edgelayout::dynamic::{evolve_instance, run_timeline, write_timeline_csv, Policy, SlotAction};
use edgelayout::flow::min_st_cut;
use edgelayout::io::{instance_from_json, instance_to_json, layout_for, layout_to_json, trace_from_json, trace_to_json, Provenance};
use edgelayout::optimize::{build_auxiliary_graph, init_layout};
use edgelayout::scenario::{generate_trace, synthesize_instance, ChurnConfig, SynthesisConfig};
use edgelayout::{optimize as glad_s, total_cost, GraphLayout, InitStrategy, Instance, OptimizerConfig, ScenarioError, TieBreak};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::report::{sha256_hex, write_manifest, write_rows, CostRow, Manifest};
use crate::{Algo, EvolveArgs, Init, OptimizeArgs, PairOrder, PolicyArg, SolverArgs, SweepArgs, SweepParam, SynthArgs, ValidateArgs};

/// Bad flag values or flag combinations.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    let (inst, _) = instance_from_json(&read(path)?).with_context(|| format!("loading instance {}", path.display()))?;
    Ok(inst)
}

fn resolve_rounds(value: &str, n_servers: usize) -> Result<usize> {
    if value.eq_ignore_ascii_case("exhaustive") {
        return Ok(OptimizerConfig::exhaustive_rounds(n_servers));
    }
    match value.parse::<usize>() {
        Ok(r) if r >= 1 => Ok(r),
        _ => Err(usage(format!("R must be a positive integer or `exhaustive`, got `{value}`"))),
    }
}

fn solver_config(args: &SolverArgs, inst: &Instance) -> Result<OptimizerConfig> {
    let init = match (&args.warm_start, args.init) {
        (Some(p), _) => InitStrategy::WarmStart(layout_for(&read(p)?, inst).context("warm-start layout")?),
        (None, Init::Random) => InitStrategy::Random(args.seed),
        (None, Init::UploadFirst) => InitStrategy::UploadFirst,
    };
    Ok(OptimizerConfig {
        rounds: resolve_rounds(&args.rounds, inst.n_servers())?,
        init,
        tie_break: match args.pair_order {
            PairOrder::Lowest => TieBreak::LowestIndex,
            PairOrder::Seeded => TieBreak::SeededRandom(args.seed),
        },
        max_iterations: args.max_iterations,
    })
}

fn solver_echo(args: &SolverArgs) -> serde_json::Value {
    json!({
        "R": args.rounds,
        "seed": args.seed,
        "init": args.init.to_possible_value().expect("named").get_name(),
        "warm_start": args.warm_start,
        "pair_order": args.pair_order.to_possible_value().expect("named").get_name(),
        "max_iterations": args.max_iterations,
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SynthFile {
    /// Splits into the instance and churn seeds when present.
    #[serde(default)]
    seed: Option<u64>,
    instance: SynthesisConfig,
    #[serde(default)]
    churn: Option<ChurnConfig>,
}

fn prefixed(prefix: &str, err: ScenarioError) -> ScenarioError {
    match err {
        ScenarioError::Config { path, message } => ScenarioError::Config {
            path: format!("{prefix}.{path}"),
            message,
        },
        other => other,
    }
}

fn churn_seed(seed: u64) -> u64 {
    seed.wrapping_add(0x9e37_79b9_7f4a_7c15)
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let text = read(&args.config)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let mut file: SynthFile = serde_path_to_error::deserialize(de).map_err(|e| ScenarioError::Config {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    if let Some(seed) = args.seed.or(file.seed) {
        file.seed = Some(seed);
        file.instance.seed = seed;
        if let Some(c) = file.churn.as_mut() {
            c.seed = churn_seed(seed);
        }
    }
    file.instance.validate().map_err(|e| prefixed("instance", e))?;
    if let Some(c) = &file.churn {
        c.validate().map_err(|e| prefixed("churn", e))?;
    }
    if args.trace_out.is_some() && file.churn.is_none() {
        return Err(usage("--trace-out needs a `churn` section in the config"));
    }

    let config_hash = sha256_hex(&serde_json::to_vec(&file)?);
    let inst = synthesize_instance(&file.instance)?;
    let provenance = Provenance {
        seed: file.instance.seed,
        config_hash: config_hash.clone(),
    };
    write(&args.out, &instance_to_json(&inst, Some(provenance)))?;
    let mut outputs = vec![args.out.display().to_string()];
    if let (Some(path), Some(churn)) = (&args.trace_out, &file.churn) {
        let trace = generate_trace(&inst, churn)?;
        write(path, &trace_to_json(&trace))?;
        outputs.push(path.display().to_string());
    }

    let mut m = Manifest::new("synth", file.instance.seed, serde_json::to_value(&file)?);
    m.config_hash = Some(config_hash);
    m.outputs = outputs;
    m.summary = json!({
        "vertices": inst.graph.vertex_count(),
        "links": inst.graph.link_count(),
        "servers": inst.n_servers(),
    });
    write_manifest(&args.out, &m)
}

pub fn optimize(args: OptimizeArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let config = solver_config(&args.solver, &inst)?;
    let started = Instant::now();
    let mut iterations = None;
    let layout: GraphLayout = match args.algo {
        Algo::GladS => {
            let (layout, log) = glad_s(&inst, &config)?;
            iterations = Some(log.iterations());
            if let Some(path) = &args.log {
                let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
                log.write_csv(BufWriter::new(f))?;
            }
            if let (Some(path), Some(first)) = (&args.dimacs, log.records.first()) {
                let start = init_layout(&inst, &config.init)?;
                let aux = build_auxiliary_graph(first.pair.0, first.pair.1, &start, &inst, &decompose(&inst))?;
                let cut = min_st_cut(&aux.network);
                let text = format!(
                    "c auxiliary network for servers {} and {}; min cut {}\n{}",
                    first.pair.0,
                    first.pair.1,
                    cut.flow_value,
                    aux.network.to_dimacs()
                );
                write(path, &text)?;
            }
            layout
        }
        Algo::Greedy => greedy_layout(&inst),
        Algo::Random => random_layout(&inst, args.solver.seed),
        Algo::Oracle => brute_force_optimal(&inst, args.max_states)?.optimal_layout,
    };
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let breakdown = total_cost(&layout, &inst)?;

    let text = layout_to_json(&layout);
    write(&args.out, &text)?;
    // the row is only reported once the written file checks out
    layout_for(&read(&args.out)?, &inst).context("re-reading the written layout")?;

    let algo = args.algo.to_possible_value().expect("named").get_name().to_string();
    let mut row = CostRow {
        instance: args.instance.display().to_string(),
        layout: args.out.display().to_string(),
        algo: algo.clone(),
        seed: args.solver.seed,
        rounds: (args.algo == Algo::GladS).then_some(config.rounds),
        iterations,
        c_u: 0.0,
        c_p: 0.0,
        c_t: 0.0,
        c_m: 0.0,
        total: 0.0,
        wall_ms,
    };
    row.set_cost(&breakdown);
    let mut outputs = vec![args.out.display().to_string()];
    for p in [&args.report, &args.log, &args.dimacs].into_iter().flatten() {
        outputs.push(p.display().to_string());
    }
    if let Some(path) = &args.report {
        write_rows(path, std::slice::from_ref(&row))?;
    }
    println!("{algo}: total {:.6} (c_u {:.6}, c_p {:.6}, c_t {:.6}, c_m {:.6})", breakdown.total, breakdown.c_u, breakdown.c_p, breakdown.c_t, breakdown.c_m);

    let mut m = Manifest::new(
        "optimize",
        args.solver.seed,
        json!({
            "instance": args.instance,
            "algo": algo,
            "solver": solver_echo(&args.solver),
            "resolved_R": config.rounds,
        }),
    );
    m.outputs = outputs;
    m.summary = serde_json::to_value(&row)?;
    write_manifest(&args.out, &m)
}

fn policy_for(arg: PolicyArg, theta: Option<f64>) -> Result<Policy> {
    Ok(match arg {
        PolicyArg::NoAdjustment => Policy::NoAdjustment,
        PolicyArg::Greedy => Policy::GreedyOnline,
        PolicyArg::Incremental => Policy::IncrementalOnly,
        PolicyArg::Global => Policy::GlobalOnly,
        PolicyArg::Adaptive => {
            let theta = theta.ok_or_else(|| usage("--policy adaptive needs --theta"))?;
            if theta.is_nan() || theta < 0.0 {
                return Err(usage("--theta must be >= 0"));
            }
            Policy::Adaptive { theta }
        }
    })
}

fn initial_layout(path: Option<&Path>, inst: &Instance, config: &OptimizerConfig) -> Result<GraphLayout> {
    match path {
        Some(p) => Ok(layout_for(&read(p)?, inst).context("initial layout")?),
        None => Ok(glad_s(inst, config)?.0),
    }
}

pub fn evolve(args: EvolveArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    let trace = trace_from_json(&read(&args.trace)?).with_context(|| format!("loading trace {}", args.trace.display()))?;
    let policy = policy_for(args.policy, args.theta)?;
    let config = solver_config(&args.solver, &inst)?;
    let initial = initial_layout(args.initial.as_deref(), &inst, &config)?;
    let records = run_timeline(&inst, &initial, &trace, policy, &config)?;

    let f = fs::File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_timeline_csv(&records, BufWriter::new(f))?;

    let last = records.last().expect("baseline record");
    let globals = records.iter().filter(|r| r.decision == SlotAction::Global).count();
    println!("{}: {} slots, final total {:.6}, {globals} global runs", policy.name(), records.len() - 1, last.cost.total);
    let mut m = Manifest::new(
        "evolve",
        args.solver.seed,
        json!({
            "instance": args.instance,
            "trace": args.trace,
            "policy": policy.name(),
            "theta": args.theta,
            "initial": args.initial,
            "solver": solver_echo(&args.solver),
        }),
    );
    m.outputs = vec![args.out.display().to_string()];
    m.summary = json!({
        "slots": records.len() - 1,
        "final_total": last.cost.total,
        "global_runs": globals,
        "mean_total": records.iter().map(|r| r.cost.total).sum::<f64>() / records.len() as f64,
    });
    write_manifest(&args.out, &m)
}

#[derive(Debug, Serialize)]
struct RRow {
    value: String,
    resolved_r: usize,
    final_cost: f64,
    iterations: usize,
    wall_ms: f64,
}

#[derive(Debug, Serialize)]
struct ThetaRow {
    theta: f64,
    global_runs: usize,
    mean_total: f64,
    final_total: f64,
    wall_ms: f64,
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let values: Vec<&str> = args.values.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
    if values.is_empty() {
        return Err(usage("--values needs at least one value"));
    }
    let inst = load_instance(&args.instance)?;
    let config = solver_config(&args.solver, &inst)?;
    let summary = match args.param {
        SweepParam::R => {
            let mut rows = Vec::new();
            for v in &values {
                let rounds = resolve_rounds(v, inst.n_servers())?;
                let started = Instant::now();
                let (layout, log) = glad_s(&inst, &config.clone().with_rounds(rounds))?;
                rows.push(RRow {
                    value: v.to_string(),
                    resolved_r: rounds,
                    final_cost: total_cost(&layout, &inst)?.total,
                    iterations: log.iterations(),
                    wall_ms: started.elapsed().as_secs_f64() * 1e3,
                });
            }
            rows.sort_by_key(|r| r.resolved_r);
            write_rows(&args.out, &rows)?;
            serde_json::to_value(&rows)?
        }
        SweepParam::Theta => {
            let trace_path = args.trace.as_ref().ok_or_else(|| usage("a theta sweep needs --trace"))?;
            let trace = trace_from_json(&read(trace_path)?)?;
            let mut thetas = Vec::new();
            for v in &values {
                let t: f64 = v.parse().map_err(|_| usage(format!("invalid theta `{v}`")))?;
                if t.is_nan() || t < 0.0 {
                    return Err(usage(format!("theta must be >= 0, got `{v}`")));
                }
                thetas.push(t);
            }
            thetas.sort_by(f64::total_cmp);
            let initial = glad_s(&inst, &config)?.0;
            let mut rows = Vec::new();
            for theta in thetas {
                let started = Instant::now();
                let records = run_timeline(&inst, &initial, &trace, Policy::Adaptive { theta }, &config)?;
                rows.push(ThetaRow {
                    theta,
                    global_runs: records.iter().filter(|r| r.decision == SlotAction::Global).count(),
                    mean_total: records.iter().map(|r| r.cost.total).sum::<f64>() / records.len() as f64,
                    final_total: records.last().expect("baseline record").cost.total,
                    wall_ms: started.elapsed().as_secs_f64() * 1e3,
                });
            }
            write_rows(&args.out, &rows)?;
            serde_json::to_value(&rows)?
        }
    };
    let mut m = Manifest::new(
        "sweep",
        args.solver.seed,
        json!({
            "instance": args.instance,
            "param": args.param.to_possible_value().expect("named").get_name(),
            "values": values,
            "trace": args.trace,
            "solver": solver_echo(&args.solver),
        }),
    );
    m.outputs = vec![args.out.display().to_string()];
    m.summary = summary;
    write_manifest(&args.out, &m)
}

pub fn validate(args: ValidateArgs) -> Result<()> {
    let inst = load_instance(&args.instance)?;
    println!(
        "instance ok: {} vertices, {} links, {} servers",
        inst.graph.vertex_count(),
        inst.graph.link_count(),
        inst.n_servers()
    );
    if let Some(p) = &args.layout {
        let layout = layout_for(&read(p)?, &inst).with_context(|| format!("layout {}", p.display()))?;
        let b = total_cost(&layout, &inst)?;
        println!("layout ok: total {:.6}", b.total);
    }
    if let Some(p) = &args.trace {
        let trace = trace_from_json(&read(p)?)?;
        let mut current = inst;
        for slot in &trace {
            current = evolve_instance(&current, &slot.events).with_context(|| format!("trace slot {}", slot.slot))?;
        }
        println!("trace ok: {} slots", trace.len());
    }
    Ok(())
}
