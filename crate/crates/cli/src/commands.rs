use std::fs;
use std::path::Path;

use serde::Serialize;

use convexity::{
    check_blakley_dixon, check_near_logconvexity, continuous_probe, counterexample_search,
    default_delta, BdOutcome, CheckReport, SearchConfig,
};
use gadget::main_dichotomy;
use hamming_lb::{
    corruption_certificate, coset_walk_identity, pdt_size_bound, HyperplaneKind, SearchMode,
};
use heat_core::{
    moment_sequence, parse_kernel_json, parse_vector_json, random_instance_stream,
    spectral_moments, NonnegVector, SymmetricKernel,
};
use walks::{bd_proof_chain, verify_lemma_3_3, verify_lemma_3_5, verify_lemma_3_6};

use crate::fixtures::fixture;
use crate::output::{csv_line, fmt_f64, to_json, Format};

pub struct CommandOutput {
    pub body: String,
    pub all_pass: bool,
}

pub type CmdResult = Result<CommandOutput, String>;

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

pub fn load_instance(
    kernel: &Path,
    u: &Path,
    v: &Path,
) -> Result<(SymmetricKernel, NonnegVector, NonnegVector), String> {
    let s = parse_kernel_json(&read_file(kernel)?).map_err(|e| e.to_string())?;
    let u = parse_vector_json(&read_file(u)?, s.space()).map_err(|e| e.to_string())?;
    let v = parse_vector_json(&read_file(v)?, s.space()).map_err(|e| e.to_string())?;
    Ok((s, u, v))
}

/// `3..10` (inclusive) or `3,5,7`.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>, String> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|e| format!("sizes: {e}"))?;
        let hi: usize = hi.trim().parse().map_err(|e| format!("sizes: {e}"))?;
        if lo == 0 || hi < lo {
            return Err(format!("bad size range {spec:?}"));
        }
        Ok((lo..=hi).collect())
    } else {
        spec.split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("sizes: {e}"))
            })
            .collect()
    }
}

// ---------- moments ----------

#[derive(Serialize)]
struct MomentsReport {
    command: &'static str,
    t_max: usize,
    values: Vec<f64>,
    log2_values: Vec<f64>,
    spectral_max_residual: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_moments(
    kernel: &Path,
    u_path: &Path,
    v_path: &Path,
    t_max: usize,
    spectral: bool,
    format: Format,
) -> CmdResult {
    let (s, u, v) = load_instance(kernel, u_path, v_path)?;
    let m = moment_sequence(&s, &u, &v, t_max).map_err(|e| e.to_string())?;
    let spectral_res = if spectral {
        let cross = spectral_moments(&s, &u, &v, t_max).map_err(|e| e.to_string())?;
        Some(
            m.values()
                .iter()
                .zip(cross.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max),
        )
    } else {
        None
    };
    let body = match format {
        Format::Json => to_json(&MomentsReport {
            command: "moments",
            t_max,
            values: m.values().to_vec(),
            log2_values: m.log_values().to_vec(),
            spectral_max_residual: spectral_res,
        }),
        Format::Csv => {
            let mut lines = vec![csv_line(&[
                "t".into(),
                "m_t".into(),
                "log2_m_t".into(),
            ])];
            for t in 0..=t_max {
                lines.push(csv_line(&[
                    t.to_string(),
                    fmt_f64(m.value(t)),
                    fmt_f64(m.log_value(t)),
                ]));
            }
            lines.join("\r\n") + "\r\n"
        }
    };
    let all_pass = spectral_res.is_none_or(|r| r <= 1e-9);
    Ok(CommandOutput { body, all_pass })
}

// ---------- check ----------

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckKind {
    Bd,
    Nlc,
    Walks,
    Gadget,
}

#[derive(Clone)]
pub struct CheckArgs {
    pub kind: CheckKind,
    pub random: bool,
    pub trials: u64,
    pub sizes: Vec<usize>,
    pub t: Option<usize>,
    pub t_max: usize,
    pub lemma: Option<String>,
    pub fixture: Option<String>,
    pub epsilon: f64,
    pub delta: Option<f64>,
    pub density: f64,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Serialize)]
struct WalkSweepReport {
    command: &'static str,
    lemma: String,
    trials: u64,
    worst_slack: f64,
    failures: u64,
    reports: Vec<serde_json::Value>,
}

fn instances(
    args: &CheckArgs,
) -> Result<Vec<(SymmetricKernel, NonnegVector, NonnegVector, usize)>, String> {
    if let Some(name) = &args.fixture {
        let fx = fixture(name).ok_or_else(|| {
            format!(
                "unknown fixture {name:?}; available: {}",
                crate::fixtures::FIXTURE_NAMES.join(", ")
            )
        })?;
        let t = args.t.unwrap_or(fx.t);
        return Ok(vec![(fx.kernel, fx.u, fx.v, t)]);
    }
    if !args.random {
        return Err("pass --random with --trials, or --fixture NAME".into());
    }
    let mut out = Vec::with_capacity(args.trials as usize);
    for trial in 0..args.trials {
        let size = args.sizes[(trial % args.sizes.len() as u64) as usize];
        let (s, u, v) = random_instance_stream(size, args.density, args.seed, trial)
            .map_err(|e| e.to_string())?;
        let t = args
            .t
            .unwrap_or_else(|| 2 + (trial % (args.t_max.saturating_sub(1).max(1)) as u64) as usize);
        out.push((s, u, v, t));
    }
    Ok(out)
}

pub fn cmd_check(args: &CheckArgs) -> CmdResult {
    match args.kind {
        CheckKind::Bd | CheckKind::Nlc => {
            if args.fixture.is_some() {
                return check_fixture_moments(args);
            }
            let config = SearchConfig {
                sizes: args.sizes.clone(),
                t_max: args.t_max,
                epsilon: args.epsilon,
                delta: args.delta,
                trials: args.trials,
                seed: args.seed,
                density: args.density,
            };
            let summary = counterexample_search(&config);
            let min_slack = if args.kind == CheckKind::Bd {
                summary.bd_min_slack
            } else {
                summary.nlc_min_slack
            };
            let all_pass = min_slack >= -args.tol;
            Ok(CommandOutput {
                body: to_json(&summary),
                all_pass,
            })
        }
        CheckKind::Walks => {
            let lemma = args.lemma.clone().unwrap_or_else(|| "3.3".into());
            let mut reports = Vec::new();
            let mut worst = f64::INFINITY;
            let mut failures = 0u64;
            for (s, u, v, t) in instances(args)? {
                let mu = u.normalized_l1().map_err(|e| e.to_string())?;
                let nu = v.normalized_l1().map_err(|e| e.to_string())?;
                let (s_norm, _) =
                    heat_core::normalize_substochastic(&s).map_err(|e| e.to_string())?;
                macro_rules! push {
                    ($r:expr) => {{
                        let r = $r;
                        worst = worst.min(r.slack);
                        if !r.verdict {
                            failures += 1;
                        }
                        reports.push(serde_json::to_value(&r).expect("report"));
                    }};
                }
                match lemma.as_str() {
                    "3.3" => {
                        for r in verify_lemma_3_3(&s_norm, &mu, &nu, t, args.tol)
                            .map_err(|e| e.to_string())?
                        {
                            push!(r);
                        }
                    }
                    "3.5" => {
                        push!(verify_lemma_3_5(&s_norm, &mu, &nu, t, args.tol)
                            .map_err(|e| e.to_string())?)
                    }
                    "3.6" => {
                        for r in verify_lemma_3_6(&s_norm, &mu, &nu, t, args.tol)
                            .map_err(|e| e.to_string())?
                        {
                            push!(r);
                        }
                    }
                    "chain" => {
                        let report =
                            bd_proof_chain(&s, &u, &v, t, args.tol).map_err(|e| e.to_string())?;
                        if !report.vacuous && !report.all_pass {
                            failures += 1;
                        }
                        for line in &report.lines {
                            worst = worst.min(line.slack);
                        }
                        reports.push(serde_json::to_value(&report).expect("report"));
                    }
                    other => return Err(format!("unknown lemma {other:?}; use 3.3, 3.5, 3.6 or chain")),
                }
            }
            let all_pass = failures == 0;
            Ok(CommandOutput {
                body: to_json(&WalkSweepReport {
                    command: "check walks",
                    lemma,
                    trials: reports.len() as u64,
                    worst_slack: worst,
                    failures,
                    reports,
                }),
                all_pass,
            })
        }
        CheckKind::Gadget => {
            let mut verdicts = Vec::new();
            let mut failures = 0u64;
            for (s, u, v, t) in instances(args)? {
                let verdict = main_dichotomy(&s, &u, &v, t.max(2), args.epsilon, args.tol)
                    .map_err(|e| e.to_string())?;
                if !verdict.vacuous && !verdict.holds {
                    failures += 1;
                }
                verdicts.push(verdict);
            }
            #[derive(Serialize)]
            struct GadgetSweep {
                command: &'static str,
                epsilon: f64,
                failures: u64,
                verdicts: Vec<gadget::DichotomyVerdict>,
            }
            let all_pass = failures == 0;
            Ok(CommandOutput {
                body: to_json(&GadgetSweep {
                    command: "check gadget",
                    epsilon: args.epsilon,
                    failures,
                    verdicts,
                }),
                all_pass,
            })
        }
    }
}

fn check_fixture_moments(args: &CheckArgs) -> CmdResult {
    let list = instances(args)?;
    let (s, u, v, _) = &list[0];
    let m = moment_sequence(s, u, v, args.t_max + 2).map_err(|e| e.to_string())?;
    let report = if args.kind == CheckKind::Bd {
        let mut entries = Vec::new();
        for t in 1..args.t_max {
            for k in ((t + 2)..=args.t_max).step_by(2) {
                if let BdOutcome::Checked(entry) = check_blakley_dixon(&m, k, t, args.tol) {
                    entries.push(entry);
                }
            }
        }
        CheckReport::from_bd(args.fixture.as_deref().unwrap_or("file"), &entries)
    } else {
        let delta = args.delta.unwrap_or_else(|| default_delta(args.epsilon));
        let mut entries = Vec::new();
        for t in 2..=args.t_max.saturating_sub(2) {
            entries.push(check_near_logconvexity(&m, t, args.epsilon, delta, args.tol));
        }
        CheckReport::from_nlc(args.fixture.as_deref().unwrap_or("file"), &entries)
    };
    let all_pass = report.all_pass;
    Ok(CommandOutput {
        body: to_json(&report),
        all_pass,
    })
}

// ---------- search ----------

#[allow(clippy::too_many_arguments)]
pub fn cmd_search(
    sizes: Vec<usize>,
    t_max: usize,
    trials: u64,
    epsilon: f64,
    delta: Option<f64>,
    density: f64,
    seed: u64,
    tol: f64,
) -> CmdResult {
    let config = SearchConfig {
        sizes,
        t_max,
        epsilon,
        delta,
        trials,
        seed,
        density,
    };
    let summary = counterexample_search(&config);
    let all_pass = summary.bd_min_slack >= -tol && summary.nlc_min_slack >= -tol;
    Ok(CommandOutput {
        body: to_json(&summary),
        all_pass,
    })
}

// ---------- hamming ----------

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum HammingSub {
    Corruption,
    Pdt,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KindArg {
    Klogdelta,
    Klogk,
}

#[derive(Clone)]
pub struct HammingArgs {
    pub sub: HammingSub,
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub kind: KindArg,
    pub exhaustive: bool,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Serialize)]
struct IdentityReport {
    command: &'static str,
    n: usize,
    trials: u64,
    max_residual: f64,
    hyperplane_worst: Option<f64>,
    all_ok: bool,
}

#[derive(Serialize)]
struct PdtReport {
    command: &'static str,
    bound: hamming_lb::PdtBound,
    audited_vertices: u64,
    worst_vertex_value: f64,
    vertex_bound: f64,
    all_ok: bool,
}

pub fn cmd_hamming(args: &HammingArgs) -> CmdResult {
    match args.sub {
        HammingSub::Corruption => {
            let kind = match args.kind {
                KindArg::Klogdelta => HyperplaneKind::KLogDelta,
                KindArg::Klogk => HyperplaneKind::KLogK,
            };
            let mode = if args.exhaustive {
                SearchMode::Exhaustive
            } else {
                SearchMode::Random {
                    trials: args.trials,
                    seed: args.seed,
                }
            };
            let cert = corruption_certificate(
                kind,
                args.n,
                args.k,
                args.delta,
                args.alpha1,
                args.alpha2,
                mode,
            )
            .map_err(|e| e.to_string())?;
            let all_pass =
                cert.max_vertex_value <= cert.bound + args.tol && cert.dichotomy_violations == 0;
            Ok(CommandOutput {
                body: to_json(&cert),
                all_pass,
            })
        }
        HammingSub::Pdt => {
            let bound = pdt_size_bound(args.n, args.k, args.delta, args.alpha1);
            let vertex_bound =
                (6.0 * args.delta / (args.k as f64).powf(args.alpha1)).powf(args.k as f64 / 2.0);
            let mut worst = f64::NEG_INFINITY;
            let mut all_ok = true;
            for trial in 0..args.trials {
                let mut rng = heat_core::trial_rng(args.seed, trial);
                use rand::Rng;
                let mask = (1u64 << args.n) - 1;
                let columns: Vec<u32> =
                    (0..args.n).map(|_| (rng.gen::<u64>() & mask) as u32).collect();
                let c = (rng.gen::<u64>() & mask) as u32;
                let report =
                    coset_walk_identity(&columns, c, args.k, Some((args.delta, args.alpha1)))
                        .map_err(|e| e.to_string())?;
                let value = report.hyperplane_value.expect("hyperplane requested");
                worst = worst.max(value);
                all_ok &= report.hyperplane_ok == Some(true);
            }
            Ok(CommandOutput {
                body: to_json(&PdtReport {
                    command: "hamming pdt",
                    bound,
                    audited_vertices: args.trials,
                    worst_vertex_value: worst,
                    vertex_bound,
                    all_ok,
                }),
                all_pass: all_ok,
            })
        }
        HammingSub::Identity => {
            let mut max_residual = 0.0f64;
            let mut hyperplane_worst: Option<f64> = None;
            let mut all_ok = true;
            for trial in 0..args.trials {
                let mut rng = heat_core::trial_rng(args.seed, trial);
                use rand::Rng;
                let mask = if args.n == 64 {
                    u64::MAX
                } else {
                    (1u64 << args.n) - 1
                };
                let columns: Vec<u32> =
                    (0..args.n).map(|_| (rng.gen::<u64>() & mask) as u32).collect();
                let c = (rng.gen::<u64>() & mask) as u32;
                let k = 1 + (trial % args.k.max(1) as u64) as usize;
                let report =
                    coset_walk_identity(&columns, c, k, None).map_err(|e| e.to_string())?;
                if let Some(residual) = report.residual {
                    max_residual = max_residual.max(residual);
                    all_ok &= residual < 1e-12;
                }
                if let Some(v) = report.hyperplane_value {
                    hyperplane_worst =
                        Some(hyperplane_worst.map_or(v, |w: f64| w.max(v)));
                }
            }
            Ok(CommandOutput {
                body: to_json(&IdentityReport {
                    command: "hamming identity",
                    n: args.n,
                    trials: args.trials,
                    max_residual,
                    hyperplane_worst,
                    all_ok,
                }),
                all_pass: all_ok,
            })
        }
    }
}

// ---------- continuous ----------

#[allow(clippy::too_many_arguments)]
pub fn cmd_continuous(
    kernel: &Path,
    u_path: &Path,
    v_path: &Path,
    grid_start: f64,
    grid_stop: f64,
    grid_count: usize,
    h: Option<f64>,
    format: Format,
) -> CmdResult {
    let (s, u, v) = load_instance(kernel, u_path, v_path)?;
    if grid_count < 2 || !(grid_stop > grid_start) || !(grid_start > 0.0) {
        return Err("grid needs 0 < start < stop and at least two points".into());
    }
    let spacing = (grid_stop - grid_start) / (grid_count - 1) as f64;
    let h = h.unwrap_or(1e-3 * spacing);
    let grid: Vec<f64> = (0..grid_count)
        .map(|i| grid_start + spacing * i as f64)
        .collect();
    let profile = continuous_probe(&s, &u, &v, &grid, h)?;
    let worst = profile
        .residual
        .iter()
        .flatten()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let all_pass = worst >= -1e-6;
    let body = match format {
        Format::Csv => {
            let mut lines = vec![csv_line(&[
                "t".into(),
                "f".into(),
                "logf".into(),
                "residual".into(),
            ])];
            for i in 0..profile.grid.len() {
                lines.push(csv_line(&[
                    fmt_f64(profile.grid[i]),
                    fmt_f64(profile.f[i]),
                    fmt_f64(profile.log2_f[i]),
                    profile.residual[i].map(fmt_f64).unwrap_or_default(),
                ]));
            }
            lines.join("\r\n") + "\r\n"
        }
        Format::Json => to_json(&profile),
    };
    Ok(CommandOutput { body, all_pass })
}

// ---------- gadget (single-instance budget) ----------

pub struct GadgetArgs {
    pub fixture: Option<String>,
    pub size: usize,
    pub t: usize,
    pub epsilon: f64,
    pub density: f64,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Serialize)]
struct GadgetRunReport {
    command: &'static str,
    fixture: Option<String>,
    seed: u64,
    size: usize,
    density: f64,
    /// Full instance for replay, in the interchange format.
    kernel: heat_core::KernelJson,
    u: Vec<String>,
    v: Vec<String>,
    verdict: gadget::DichotomyVerdict,
}

pub fn cmd_gadget(args: &GadgetArgs) -> CmdResult {
    let (s, u, v, t) = match &args.fixture {
        Some(name) => {
            let fx = fixture(name)
                .ok_or_else(|| format!("unknown fixture {name:?}"))?;
            (fx.kernel, fx.u, fx.v, args.t.max(fx.t))
        }
        None => {
            let (s, u, v) = random_instance_stream(args.size, args.density, args.seed, 0)
                .map_err(|e| e.to_string())?;
            (s, u, v, args.t)
        }
    };
    let verdict =
        main_dichotomy(&s, &u, &v, t, args.epsilon, args.tol).map_err(|e| e.to_string())?;
    let all_pass = verdict.vacuous || verdict.holds;
    let fmt = |x: &f64| serde_json::to_string(x).expect("f64");
    let report = GadgetRunReport {
        command: "gadget",
        fixture: args.fixture.clone(),
        seed: args.seed,
        size: s.size(),
        density: args.density,
        kernel: heat_core::KernelJson::from_kernel(&s),
        u: u.values().iter().map(fmt).collect(),
        v: v.values().iter().map(fmt).collect(),
        verdict,
    };
    Ok(CommandOutput {
        body: to_json(&report),
        all_pass,
    })
}
