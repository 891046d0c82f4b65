//! Subcommand bodies. Each returns `Ok(pass)` or an error for exit code 2.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use ising_wrc::analysis::matrix::{ef_sg_matrix, ef_wrc_matrix, phi_matrix, sb_matrix, HalfSteps};
use ising_wrc::analysis::verify::{verify_chain_identities, verify_gap_inequalities, verify_perturbation_bounds};
use ising_wrc::analysis::{empirical_mixing_time, ChainMatrix};
use ising_wrc::cftp::{check_monotone, cftp_sample, perfect_ising_sample, CftpOptions};
use ising_wrc::dynamics::{run_chain_with, TraceFormat, TraceWriter};
use ising_wrc::exact::holant::{
    ising_edge_signatures, ising_vertex_signatures, verify_hol_transform, verify_ising_sg_transform, HolTransform,
    Incidence,
};
use ising_wrc::exact::{verify_coupling, verify_counting_identity, verify_equivalence};
use ising_wrc::generators::{self, random_instance, InstanceShape};
use ising_wrc::paths::congestion as congestion_report;
use ising_wrc::report::Check;
use ising_wrc::{
    params_from_ising, ChainKind, ChainState, Dynamics, EdgeSubset, Error, Result, RngStream, SpinConfig,
    WeightedGraph,
};

use crate::record::{emit_summary, Record};
use crate::{BenchArgs, Caps, Family, GenArgs, Method, MixingArgs, SampleArgs, Suite, TraceFormatArg, VerifyArgs};

const DEFAULT_RANDOM_INSTANCES: usize = 10;
const DEFAULT_MONOTONE_TRIALS: u64 = 100_000;
const DEFAULT_HOLANT_TRANSFORMS: u64 = 20;

fn load(path: &Path) -> Result<WeightedGraph> {
    WeightedGraph::from_path(path)
}

fn stdout() -> BufWriter<io::StdoutLock<'static>> {
    BufWriter::new(io::stdout().lock())
}

fn graph_summary(g: &WeightedGraph) -> Value {
    json!({ "n": g.n(), "m": g.m() })
}

fn chain_kind(method: Method) -> Option<ChainKind> {
    match method {
        Method::Cftp => None,
        Method::Sw => Some(ChainKind::SwIsing),
        Method::SwWrc => Some(ChainKind::SwWrc),
        Method::EfWrc => Some(ChainKind::EfWrc),
        Method::EfSg => Some(ChainKind::EfSg),
        Method::Sb => Some(ChainKind::SingleBond),
    }
}

fn method_name(method: Method) -> &'static str {
    chain_kind(method).map_or("cftp", ChainKind::name)
}

fn start_state(kind: ChainKind, g: &WeightedGraph) -> ChainState {
    match kind {
        ChainKind::SwIsing => ChainState::Spins(SpinConfig::empty(g.n())),
        _ => ChainState::Edges(EdgeSubset::empty(g.m())),
    }
}

/// Sample `i` of a batch uses seed `seed + i`.
fn batch_seed(seed: u64, i: u64) -> u64 {
    seed.wrapping_add(i)
}

pub fn sample(a: &SampleArgs) -> Result<bool> {
    let g = load(&a.graph)?;
    let mut out = stdout();
    let base = || {
        Record::new("sample")
            .input("method", method_name(a.method))
            .input("graph", a.graph.display().to_string())
            .input("instance", graph_summary(&g))
    };
    match chain_kind(a.method) {
        None => {
            let opts = CftpOptions { max_steps: a.max_steps, ..CftpOptions::default() };
            let results: Vec<_> = (0..a.count)
                .into_par_iter()
                .map(|i| {
                    let seed = batch_seed(a.seed, i);
                    let start = Instant::now();
                    let r = perfect_ising_sample(&g, seed, &opts);
                    (i, seed, r, start.elapsed().as_secs_f64())
                })
                .collect();
            for (i, seed, r, secs) in results {
                let (sigma, outcome) = r?;
                let mut rec = base().input("index", i).input("seed", seed);
                rec.output("sample", sigma.to_hex())
                    .output("wrc_sample", outcome.sample.to_hex())
                    .output("coalescence_time", outcome.coalescence_time)
                    .output("rounds", outcome.rounds)
                    .output("total_steps", outcome.total_steps)
                    .timing_value("wall_seconds", secs);
                rec.emit(&mut out)?;
            }
        }
        Some(kind) => {
            let run = |i: u64, trace: Option<&mut TraceWriter<BufWriter<File>>>| -> Result<(ChainState, f64)> {
                let mut dynamics = Dynamics::from_ising(&g)?;
                let mut rng = RngStream::new(batch_seed(a.seed, i));
                let start = Instant::now();
                let state = match trace {
                    Some(w) => run_chain_with(&mut dynamics, kind, start_state(kind, &g), a.steps, &mut rng, a.stride, |t, s| w.record(t, s))?,
                    None => run_chain_with(&mut dynamics, kind, start_state(kind, &g), a.steps, &mut rng, 0, |_, _| Ok(()))?,
                };
                Ok((state, start.elapsed().as_secs_f64()))
            };
            let mut results = Vec::with_capacity(a.count as usize);
            if let Some(path) = &a.trace {
                let format = match a.trace_format {
                    TraceFormatArg::Csv => TraceFormat::Csv,
                    TraceFormatArg::Bin => TraceFormat::Binary,
                };
                let width = start_state(kind, &g).width();
                let mut writer = TraceWriter::new(BufWriter::new(File::create(path)?), format, kind, width, a.stride)?;
                if a.count > 0 {
                    results.push(run(0, Some(&mut writer)));
                }
                writer.finish()?.flush()?;
            }
            let first = results.len() as u64;
            results.extend((first..a.count).into_par_iter().map(|i| run(i, None)).collect::<Vec<_>>());
            for (i, r) in results.into_iter().enumerate() {
                let (state, secs) = r?;
                let mut rec = base()
                    .input("index", i)
                    .input("seed", batch_seed(a.seed, i as u64))
                    .input("steps", a.steps);
                rec.output("final_state", state.to_hex()).timing_value("wall_seconds", secs);
                if i == 0 {
                    if let Some(path) = &a.trace {
                        rec.output("trace", path.display().to_string());
                    }
                }
                rec.emit(&mut out)?;
            }
        }
    }
    out.flush()?;
    Ok(true)
}

fn instances(a: &VerifyArgs) -> Result<Vec<(Value, WeightedGraph)>> {
    if let Some(path) = &a.graph {
        return Ok(vec![(json!(path.display().to_string()), load(path)?)]);
    }
    let count = a.random.unwrap_or(DEFAULT_RANDOM_INSTANCES);
    if a.n == 0 {
        return Err(Error::InvalidParameter("--n must be at least 1".into()));
    }
    let shape = InstanceShape {
        max_vertices: a.n,
        max_edges: a.m,
        // Canonical paths need every η_v > 0.
        unit_lambda_prob: if a.suite == Suite::Paths { 0.0 } else { InstanceShape::default().unit_lambda_prob },
        ..InstanceShape::default()
    };
    let mut rng = RngStream::new(a.seed);
    Ok((0..count).map(|i| (json!(format!("random:{i}")), random_instance(&shape, &mut rng))).collect())
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Equivalence => "equivalence",
        Suite::Coupling => "coupling",
        Suite::Holant => "holant",
        Suite::Balance => "balance",
        Suite::Gaps => "gaps",
        Suite::Perturb => "perturb",
        Suite::Monotone => "monotone",
        Suite::Paths => "paths",
    }
}

type SuiteOutput = (Map<String, Value>, Vec<Check>);

fn run_suite(a: &VerifyArgs, caps: &Caps, index: usize, g: &WeightedGraph) -> Result<SuiteOutput> {
    let mut outputs = Map::new();
    let mut rng = RngStream::with_stream(a.seed, index as u64 + 1);
    let checks = match a.suite {
        Suite::Equivalence => {
            let r = verify_equivalence(g, caps.enumeration)?;
            outputs.insert("ln_z_ising".into(), json!(r.ln_z_ising));
            outputs.insert("ln_z_wrc".into(), json!(r.ln_z_wrc));
            outputs.insert("ln_z_sg".into(), json!(r.ln_z_sg));
            r.checks
        }
        Suite::Coupling => {
            let mp = params_from_ising(g)?;
            vec![verify_coupling(g, &mp.sg, caps.enumeration)?]
        }
        Suite::Holant => {
            let mut checks = verify_ising_sg_transform(g, caps.enumeration)?;
            checks.push(verify_counting_identity(g, g.lambda(), caps.enumeration)?);
            let h = Incidence::of(g);
            let (f, e) = (ising_vertex_signatures(g), ising_edge_signatures(g));
            for _ in 0..a.trials.unwrap_or(DEFAULT_HOLANT_TRANSFORMS) {
                checks.push(verify_hol_transform(&h, &f, &e, &HolTransform::random(&mut rng), caps.enumeration)?);
            }
            checks
        }
        Suite::Balance => verify_chain_identities(g, caps.matrix)?,
        Suite::Gaps => {
            let r = verify_gap_inequalities(g, caps.matrix)?;
            outputs.insert("gap_sw_ising".into(), json!(r.gap_sw_ising));
            outputs.insert("gap_sw_wrc".into(), json!(r.gap_sw_wrc));
            outputs.insert("gap_ef".into(), json!(r.gap_ef));
            outputs.insert("gap_sb".into(), json!(r.gap_sb));
            r.checks
        }
        Suite::Perturb => {
            let mp = params_from_ising(g)?;
            let r = verify_perturbation_bounds(g, &mp.sg, caps.matrix)?;
            outputs.insert("dist_ratio_min".into(), json!(r.dist_ratio_min));
            outputs.insert("dist_ratio_max".into(), json!(r.dist_ratio_max));
            outputs.insert("transition_ratio_min".into(), json!(r.transition_ratio_min));
            outputs.insert("transition_ratio_max".into(), json!(r.transition_ratio_max));
            outputs.insert("gap".into(), json!(r.gap));
            outputs.insert("gap_perturbed".into(), json!(r.gap_perturbed));
            r.checks
        }
        Suite::Monotone => {
            let mp = params_from_ising(g)?;
            let trials = a.trials.unwrap_or(DEFAULT_MONOTONE_TRIALS);
            let violations = check_monotone(g, &mp.wrc, trials, &mut rng)?;
            vec![Check::count("monotone.phi_order_preserved", violations, trials)]
        }
        Suite::Paths => {
            let mp = params_from_ising(g)?;
            let r = congestion_report(g, &mp.sg, ising_wrc::paths::DEFAULT_CONGESTION_MAX_EDGES)?;
            outputs.insert("rho".into(), json!(r.rho));
            outputs.insert("max_load_transition".into(), json!(r.max_load_transition));
            outputs.insert("gap".into(), json!(r.gap));
            outputs.insert("max_path_length".into(), json!(r.max_path_length));
            outputs.insert("bound_ok".into(), json!(r.bound_ok));
            r.checks
        }
    };
    Ok((outputs, checks))
}

pub fn verify(a: &VerifyArgs, caps: &Caps) -> Result<bool> {
    let list = instances(a)?;
    let name = suite_name(a.suite);
    let results: Vec<_> = list
        .par_iter()
        .enumerate()
        .map(|(i, (_, g))| {
            let start = Instant::now();
            (run_suite(a, caps, i, g), start.elapsed().as_secs_f64())
        })
        .collect();
    let mut out = stdout();
    let mut failed = 0;
    for (i, ((label, g), (r, secs))) in list.iter().zip(results).enumerate() {
        let mut rec = Record::new("verify")
            .input("suite", name)
            .input("index", i)
            .input("instance", label.clone())
            .input("graph", graph_summary(g))
            .input("seed", a.seed);
        match r {
            Ok((outputs, checks)) => {
                for (k, v) in outputs {
                    rec.output(&k, v);
                }
                rec.checks(checks);
            }
            // Per-instance failures (caps, invalid parameters) become failed checks.
            Err(e) => {
                rec.output("error", e.to_string());
                rec.checks([Check { check: format!("{name}.error"), lhs: f64::NAN, rhs: f64::NAN, residual: f64::NAN, pass: false }]);
            }
        }
        rec.timing_value("wall_seconds", secs);
        if !rec.pass() {
            failed += 1;
        }
        rec.emit(&mut out)?;
    }
    emit_summary(&mut out, "verify", list.len(), failed)?;
    out.flush()?;
    Ok(failed == 0)
}

fn chain_matrix(g: &WeightedGraph, chain: &str, cap: u128) -> Result<ChainMatrix> {
    let mp = params_from_ising(g)?;
    match chain {
        "phi" => phi_matrix(g, &mp.wrc, cap),
        _ => match chain.parse::<ChainKind>()? {
            ChainKind::EfWrc => ef_wrc_matrix(g, &mp.wrc, cap),
            ChainKind::EfSg => ef_sg_matrix(g, &mp.sg, cap),
            ChainKind::SingleBond => sb_matrix(g, &mp.wrc, cap),
            ChainKind::SwIsing => Ok(HalfSteps::build(g, &mp.wrc, cap)?.sw_ising()),
            ChainKind::SwWrc => Ok(HalfSteps::build(g, &mp.wrc, cap)?.sw_wrc()),
        },
    }
}

pub fn mixing(a: &MixingArgs, caps: &Caps) -> Result<bool> {
    let g = load(&a.graph)?;
    let start = Instant::now();
    let cm = chain_matrix(&g, &a.chain, caps.matrix)?;
    let r = empirical_mixing_time(&cm, a.eps, a.max_steps)?;
    let mut rec = Record::new("mixing")
        .input("graph", a.graph.display().to_string())
        .input("instance", graph_summary(&g))
        .input("chain", a.chain.clone())
        .input("eps", a.eps);
    rec.output("t_mix", r.t_mix)
        .output("worst_start", r.worst_start)
        .output("gap", r.gap)
        .output("pi_min", r.pi_min)
        .output("spectral_bound", r.spectral_bound)
        .checks([Check::at_most("mixing.t_mix_le_spectral_bound", r.t_mix as f64, r.spectral_bound.ceil(), 0.0)])
        .timing("wall_seconds", start);
    let mut out = stdout();
    rec.emit(&mut out)?;
    out.flush()?;
    Ok(rec.pass())
}

pub fn congestion(path: &Path, max_edges: usize) -> Result<bool> {
    let g = load(path)?;
    let mp = params_from_ising(&g)?;
    let start = Instant::now();
    let r = congestion_report(&g, &mp.sg, max_edges)?;
    let mut rec = Record::new("paths congestion")
        .input("graph", path.display().to_string())
        .input("instance", graph_summary(&g))
        .input("max_edges", max_edges);
    rec.output("rho", r.rho)
        .output("max_load_transition", json!(r.max_load_transition))
        .output("gap", r.gap)
        .output("max_path_length", r.max_path_length)
        .output("bound_ok", r.bound_ok)
        .checks(r.checks)
        .timing("wall_seconds", start);
    let mut out = stdout();
    rec.emit(&mut out)?;
    out.flush()?;
    Ok(rec.pass())
}

fn quantile(sorted: &[u64], q: f64) -> u64 {
    // Nearest-rank.
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

pub fn bench(a: &BenchArgs) -> Result<bool> {
    let g = match &a.graph {
        Some(p) => load(p)?,
        None => generators::grid(10, 10, a.beta, a.lambda)?,
    };
    let mut out = stdout();
    for kind in ChainKind::ALL {
        let mut dynamics = Dynamics::from_ising(&g)?;
        let mut rng = RngStream::new(a.seed);
        let start = Instant::now();
        let state = run_chain_with(&mut dynamics, kind, start_state(kind, &g), a.steps, &mut rng, 0, |_, _| Ok(()))?;
        let secs = start.elapsed().as_secs_f64();
        let mut rec = Record::new("bench")
            .input("chain", kind.name())
            .input("instance", graph_summary(&g))
            .input("steps", a.steps)
            .input("seed", a.seed);
        rec.output("final_state", state.to_hex())
            .timing_value("wall_seconds", secs)
            .timing_value("steps_per_second", a.steps as f64 / secs.max(f64::MIN_POSITIVE));
        rec.emit(&mut out)?;
    }
    if a.seeds > 0 {
        let cg = match &a.cftp_graph {
            Some(p) => load(p)?,
            None => generators::grid(3, 3, a.beta, a.lambda)?,
        };
        let w = params_from_ising(&cg)?.wrc;
        let opts = CftpOptions { check_sandwich: false, ..CftpOptions::default() };
        let start = Instant::now();
        let outcomes = (0..a.seeds)
            .into_par_iter()
            .map(|i| cftp_sample(&cg, &w, batch_seed(a.seed, i), &opts))
            .collect::<Result<Vec<_>>>()?;
        let mut times: Vec<u64> = outcomes.iter().map(|o| o.coalescence_time).collect();
        times.sort_unstable();
        let mean = times.iter().map(|&t| t as f64).sum::<f64>() / times.len() as f64;
        let mut rec = Record::new("bench")
            .input("chain", "cftp")
            .input("instance", graph_summary(&cg))
            .input("seeds", a.seeds)
            .input("seed", a.seed);
        rec.output("coalescence_median", quantile(&times, 0.5))
            .output("coalescence_p99", quantile(&times, 0.99))
            .output("coalescence_max", *times.last().unwrap())
            .output("coalescence_mean", mean)
            .timing("wall_seconds", start);
        rec.emit(&mut out)?;
    }
    out.flush()?;
    Ok(true)
}

pub fn generate(a: &GenArgs) -> Result<bool> {
    let g = match a.family {
        Family::Path => generators::path(a.n, a.beta, a.lambda)?,
        Family::Cycle => generators::cycle(a.n, a.beta, a.lambda)?,
        Family::Grid => generators::grid(a.n, a.height.unwrap_or(a.n), a.beta, a.lambda)?,
        Family::Complete => generators::complete(a.n, a.beta, a.lambda)?,
        Family::Er => generators::erdos_renyi(a.n, a.q, a.beta, a.lambda, &mut RngStream::new(a.seed))?,
    };
    let text = g.to_text();
    match &a.out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = stdout();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(true)
}
