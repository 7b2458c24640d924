//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured margins. Tolerances are pinned in code.

use convexity::{
    check_blakley_dixon, continuous_probe, counterexample_search, equality_conditions,
    BdOutcome, SearchConfig,
};
use gadget::{delta_from_epsilon, gamma, main_dichotomy};
use hamming_lb::{
    corruption_certificate, coset_walk_identity, flip_distribution, FlipVariant, HyperplaneKind,
    SearchMode,
};
use heat_core::{
    moment_sequence, normalize_substochastic, random_instance_stream, NonnegVector, StateSpace,
    SymmetricKernel,
};
use heat_exact::{
    backward_walk_exact, conditioned_walk_exact, forward_walk_exact, kl_factorized_logsum,
    moments_exact, path_chain_exact, rat, rat_int, trajectory_kl_logsum, LogSum, Rat, RatKernel,
};
use num_traits::{One, Zero};
use rand::Rng;
use walks::{
    backward_walk, forward_walk, kl_factorized, verify_lemma_3_3, verify_lemma_3_5,
    verify_lemma_3_6, ConditionedWalk,
};

fn point_rat(n: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n];
    v[i] = rat_int(1);
    v
}

/// Deterministic exact-rational instance: substochastic kernel with
/// harmonic-style entries, exactly normalized mass vectors.
fn rational_instance(size: usize) -> (RatKernel, Vec<Rat>, Vec<Rat>) {
    let mut triplets = Vec::new();
    for i in 0..size {
        for j in i..size {
            triplets.push((i, j, rat(1, 2 * (i + j + 2) as i64)));
        }
    }
    let raw = RatKernel::from_triplets(size, &triplets);
    let scale = raw.max_row_sum();
    let s = raw.scale(&(Rat::one() / scale));
    let total = rat_int((size * (size + 1) / 2) as i64);
    let mu: Vec<Rat> = (0..size).map(|i| rat_int(i as i64 + 1) / &total).collect();
    let nu: Vec<Rat> = (0..size)
        .map(|i| rat_int((size - i) as i64) / &total)
        .collect();
    (s, mu, nu)
}

fn sweep_instance(seed: u64, trial: u64, sizes: &[usize]) -> (SymmetricKernel, NonnegVector, NonnegVector) {
    let size = sizes[(trial % sizes.len() as u64) as usize];
    random_instance_stream(size, 0.7, seed, trial).expect("instance")
}

// ---------------------------------------------------------------- 1

#[test]
fn ac01_path_closed_form_exact() {
    let start = std::time::Instant::now();
    for t in 2..=12usize {
        for eps in [rat_int(1), rat(1, 2)] {
            let s = path_chain_exact(t, eps.clone());
            let u = point_rat(t + 1, 0);
            let v = point_rat(t + 1, t);
            let m = moments_exact(&s, &u, &v, t + 2);
            assert!(m[t - 2].is_zero(), "m_(t-2) must vanish, t={t}");
            assert_eq!(m[t], num_traits::pow::pow(eps.clone(), t), "m_t, t={t}");
            assert_eq!(
                m[t + 2],
                num_traits::pow::pow(eps.clone(), t + 2) * rat_int(t as i64),
                "m_(t+2), t={t}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?} >= 1s");
    println!("ACCEPTANCE 01 PASS: path closed form exact for 2 <= t <= 12, eps in {{1, 1/2}} ({elapsed:?})");
}

// ---------------------------------------------------------------- 2

#[test]
fn ac02_lemma_3_3_identity() {
    let start = std::time::Instant::now();
    // float sweep: 200 instances, sizes 3..10, t <= 10
    let sizes: Vec<usize> = (3..=10).collect();
    let mut worst = 0.0f64;
    for trial in 0..200u64 {
        let (s, u, v) = sweep_instance(2101, trial, &sizes);
        let mu = u.normalized_l1().unwrap();
        let nu = v.normalized_l1().unwrap();
        let t = 1 + (trial % 10) as usize;
        for report in verify_lemma_3_3(&s, &mu, &nu, t, 1e-9).unwrap() {
            assert!(report.verdict, "trial {trial}: {report:?}");
            worst = worst.max(report.slack.abs());
        }
    }
    assert!(worst < 1e-9);

    // exact: sizes <= 5, t <= 6, identically zero residual
    for size in 3..=5usize {
        let (s, mu, nu) = rational_instance(size);
        for t in [2usize, 4, 6] {
            let x = conditioned_walk_exact(&s, &mu, &nu, t);
            let f = forward_walk_exact(&s, &mu, &nu, t);
            let b = backward_walk_exact(&s, &mu, &nu, t);
            let mut lhs_f = kl_factorized_logsum(&x.forward, &f).unwrap();
            lhs_f.sub(&LogSum::neg_log2(x.heat.clone()));
            assert!(lhs_f.is_zero(), "size {size} t {t} forward");
            let mut lhs_b = kl_factorized_logsum(&x.backward, &b).unwrap();
            lhs_b.sub(&LogSum::neg_log2(x.heat.clone()));
            assert!(lhs_b.is_zero(), "size {size} t {t} backward");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "runtime {elapsed:?} >= 30s");
    println!(
        "ACCEPTANCE 02 PASS: walk-divergence identity, float residual < 1e-9 (worst {worst:.2e}) over 200 instances; exact zero in rational mode ({elapsed:?})"
    );
}

// ---------------------------------------------------------------- 3

#[test]
fn ac03_lemma_3_5_and_3_6() {
    let start = std::time::Instant::now();
    let sizes: Vec<usize> = (3..=10).collect();
    let mut worst_identity = 0.0f64;
    let mut worst_slack = f64::INFINITY;
    for trial in 0..200u64 {
        let (s, u, v) = sweep_instance(2103, trial, &sizes);
        let mu = u.normalized_l1().unwrap();
        let nu = v.normalized_l1().unwrap();
        let t = 1 + (trial % 10) as usize;
        let decomposition = verify_lemma_3_5(&s, &mu, &nu, t, 1e-9).unwrap();
        assert!(decomposition.verdict, "trial {trial}: {decomposition:?}");
        worst_identity = worst_identity.max(decomposition.slack.abs());
        for bound in verify_lemma_3_6(&s, &mu, &nu, t, 1e-9).unwrap() {
            assert!(bound.verdict, "trial {trial}: {bound:?}");
            worst_slack = worst_slack.min(bound.slack);
        }
    }
    assert!(worst_identity < 1e-9);
    assert!(worst_slack >= -1e-9);
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 03 PASS: mixture decomposition residual < 1e-9 (worst {worst_identity:.2e}); entropy bound slack >= -1e-9 (min {worst_slack:.3}) ({elapsed:?})"
    );
}

// ---------------------------------------------------------------- 4

#[test]
fn ac04_power_inequality_sweep() {
    let start = std::time::Instant::now();
    let sizes: Vec<usize> = (3..=10).collect();
    let mut min_slack = f64::INFINITY;
    let mut checked = 0u64;
    for trial in 0..10_000u64 {
        let (s, u, v) = sweep_instance(2104, trial, &sizes);
        let m = moment_sequence(&s, &u, &v, 20).unwrap();
        for t in 1..20usize {
            for k in ((t + 2)..=20).step_by(2) {
                if let BdOutcome::Checked(entry) = check_blakley_dixon(&m, k, t, 1e-9) {
                    assert!(entry.verdict, "trial {trial} ({k},{t}): {entry:?}");
                    if entry.slack_log.is_finite() {
                        min_slack = min_slack.min(entry.slack_log);
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(min_slack >= -1e-9);

    // equality fixtures: Su = lambda v, Sv = lambda u (odd t)
    let swap = SymmetricKernel::from_triplets(StateSpace::new(2).unwrap(), &[(0, 1, 1.0)])
        .unwrap();
    let e0 = NonnegVector::point_mass(swap.space().clone(), 0).unwrap();
    let e1 = NonnegVector::point_mass(swap.space().clone(), 1).unwrap();
    let m = moment_sequence(&swap, &e0, &e1, 20).unwrap();
    let entry = match check_blakley_dixon(&m, 7, 3, 1e-9) {
        BdOutcome::Checked(e) => e,
        _ => panic!("parity"),
    };
    assert!(entry.slack_log.abs() < 1e-9, "{entry:?}");
    let diag = equality_conditions(&swap, &e0, &e1, 3, 1e-9);
    assert!(diag.condition_holds && diag.observed_equality);

    // u = v eigenvector (even t)
    let complete = {
        let mut triplets = Vec::new();
        for i in 0..4 {
            for j in i..4 {
                triplets.push((i, j, 0.25));
            }
        }
        SymmetricKernel::from_triplets(StateSpace::new(4).unwrap(), &triplets).unwrap()
    };
    let uniform = NonnegVector::uniform_unit(complete.space().clone()).unwrap();
    let m = moment_sequence(&complete, &uniform, &uniform, 20).unwrap();
    let entry = match check_blakley_dixon(&m, 8, 4, 1e-9) {
        BdOutcome::Checked(e) => e,
        _ => panic!("parity"),
    };
    assert!(entry.slack_log.abs() < 1e-9, "{entry:?}");
    let diag = equality_conditions(&complete, &uniform, &uniform, 4, 1e-9);
    assert!(diag.condition_holds && diag.observed_equality);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "runtime {elapsed:?} >= 5 min");
    println!(
        "ACCEPTANCE 04 PASS: same-parity power inequality over 10^4 instances, {checked} pairs, min slack {min_slack:.3e}; equality fixtures diagnosed ({elapsed:?})"
    );
}

// ---------------------------------------------------------------- 5

#[test]
fn ac05_dichotomy_and_budget() {
    let start = std::time::Instant::now();
    let epsilon = 0.95;
    let delta = delta_from_epsilon(epsilon);
    assert!((delta - 0.0075).abs() < 1e-15);
    assert!((gamma(epsilon) - 0.6).abs() < 1e-15);
    let cap = (48.0f64 / (0.6 * 0.6)).log2();

    let sizes: Vec<usize> = (3..=12).collect();
    let mut vacuous = 0u64;
    let mut budgets_certified = 0u64;
    let mut budgets_flagged = 0u64;
    let mut branch1_only = 0u64;
    for trial in 0..1000u64 {
        let (s, u, v) = sweep_instance(2105, trial, &sizes);
        let t = 2 + (trial % 9) as usize; // t in 2..=10
        let verdict = main_dichotomy(&s, &u, &v, t, epsilon, 1e-9).unwrap();
        if verdict.vacuous {
            vacuous += 1;
            continue;
        }
        assert!(
            verdict.holds,
            "trial {trial} t {t}: neither branch holds: {verdict:?}"
        );
        if verdict.holds_branch1 && !verdict.holds_branch2 {
            branch1_only += 1;
        }
        if let Some(gadget) = &verdict.gadget {
            if let Some(budget) = &gadget.budget {
                if budget.mass_ok && budget.domination_ok {
                    assert!(
                        budget.chained_total <= cap + 1e-9,
                        "trial {trial}: budget {:.4} > cap {cap:.4}",
                        budget.chained_total
                    );
                    assert!(budget.certificate_ok, "trial {trial}");
                    budgets_certified += 1;
                } else {
                    budgets_flagged += 1;
                }
            }
        }
    }
    assert!(
        budgets_certified >= 100,
        "budget chain exercised only {budgets_certified} times"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "runtime {elapsed:?} >= 10 min");
    println!(
        "ACCEPTANCE 05 PASS: dichotomy holds on 1000 instances ({vacuous} vacuous, {branch1_only} branch-1-only); budget chain certified {budgets_certified} branch-2 instances within log2(48/gamma^2), {budgets_flagged} flagged ({elapsed:?})"
    );
}

// ---------------------------------------------------------------- 6

#[test]
fn ac06_oracle_equivalence() {
    let start = std::time::Instant::now();
    // float: factorized divergences and conditioned laws vs enumeration
    let mut worst = 0.0f64;
    for trial in 0..30u64 {
        let size = 2 + (trial % 3) as usize; // 2..4
        let (s, u, v) = random_instance_stream(size, 0.8, 2106, trial).unwrap();
        let mu = u.normalized_l1().unwrap();
        let nu = v.normalized_l1().unwrap();
        let t = 2 + (trial % 5) as usize; // 2..6
        let Ok(x) = ConditionedWalk::build(&s, &mu, &nu, t) else {
            continue;
        };
        let f = forward_walk(&s, &mu, &nu, t).unwrap();
        let b = backward_walk(&s, &mu, &nu, t).unwrap();
        let r = (size + 2 - 2) as u16;
        let brute = f.trajectories().unwrap().condition_on_endpoint(r);
        let direct = x.forward_view().trajectories().unwrap();
        let law_diff = direct.max_abs_diff(&brute);
        assert!(law_diff <= 1e-10, "trial {trial}: law diff {law_diff}");
        worst = worst.max(law_diff);

        let fact = kl_factorized(x.forward_view(), &f).finite().unwrap();
        let traj = direct.kl_vs(&f.trajectories().unwrap()).finite().unwrap();
        assert!((fact - traj).abs() <= 1e-10, "trial {trial}");
        worst = worst.max((fact - traj).abs());

        let fact_b = kl_factorized(x.backward_view(), &b).finite().unwrap();
        let traj_b = x
            .backward_view()
            .trajectories()
            .unwrap()
            .kl_vs(&b.trajectories().unwrap())
            .finite()
            .unwrap();
        assert!((fact_b - traj_b).abs() <= 1e-10, "trial {trial}");
        worst = worst.max((fact_b - traj_b).abs());
    }

    // exact: conditioned law equals brute-force conditioning, factorized
    // divergence equals the trajectory divergence, with zero tolerance
    for size in 3..=4usize {
        let (s, mu, nu) = rational_instance(size);
        for t in 2..=6usize {
            let x = conditioned_walk_exact(&s, &mu, &nu, t);
            let f = forward_walk_exact(&s, &mu, &nu, t);
            let brute = f.trajectories().condition_on_endpoint(size);
            assert_eq!(x.forward.trajectories(), brute, "size {size} t {t}");
            let mut diff = kl_factorized_logsum(&x.forward, &f).unwrap();
            diff.sub(&trajectory_kl_logsum(&x.forward.trajectories(), &f.trajectories()).unwrap());
            assert!(diff.is_zero(), "size {size} t {t}");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?} >= 1 min");
    println!(
        "ACCEPTANCE 06 PASS: factorized divergences and conditioned laws match enumeration (float worst {worst:.2e}, rational exact) ({elapsed:?})"
    );
}

// ---------------------------------------------------------------- 7

#[test]
fn ac07_exhaustive_corruption_certificates() {
    let start = std::time::Instant::now();
    for delta in [0.02, 0.05] {
        let cert = corruption_certificate(
            HyperplaneKind::KLogDelta,
            3,
            2,
            delta,
            0.05,
            0.0075,
            SearchMode::Exhaustive,
        )
        .unwrap();
        assert_eq!(cert.vertices_checked, 65536, "all 2^16 vertex pairs");
        assert_eq!(cert.dichotomy_violations, 0, "delta {delta}");
        let bound = (3.0 * delta).powf(1.0);
        assert!((cert.bound - bound).abs() < 1e-12);
        assert!(
            cert.max_vertex_value <= cert.bound + 1e-12,
            "delta {delta}: {} > {}",
            cert.max_vertex_value,
            cert.bound
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?} >= 1 min");
    println!(
        "ACCEPTANCE 07 PASS: exhaustive vertex dichotomy at n=3, k=2, delta in {{0.02, 0.05}}, zero violations ({elapsed:?})"
    );
}

// ---------------------------------------------------------------- 8

#[test]
fn ac08_coset_identity() {
    let start = std::time::Instant::now();
    // float: 10^3 random (B, c) at n = 6, k <= 6
    let mut worst = 0.0f64;
    for trial in 0..1000u64 {
        let mut rng = heat_core::trial_rng(2108, trial);
        let columns: Vec<u32> = (0..6).map(|_| rng.gen::<u32>() & 0x3f).collect();
        let c = rng.gen::<u32>() & 0x3f;
        let k = 1 + (trial % 6) as usize;
        let report = coset_walk_identity(&columns, c, k, None).unwrap();
        let residual = report.residual.unwrap();
        assert!(residual < 1e-12, "trial {trial}: residual {residual}");
        worst = worst.max(residual);
    }

    // exact at n <= 3: all matrices at n = 2, sampled matrices at n = 3
    let exact_check = |columns: &[u32], c: u32, k: usize| {
        let n = columns.len();
        let points = 1usize << n;
        // exact flip law
        let mut mu = vec![Rat::zero(); points];
        mu[0] = rat_int(1);
        for _ in 0..k {
            let mut next = vec![Rat::zero(); points];
            for (x, p) in mu.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                for bit in 0..n {
                    next[x ^ (1 << bit)] += p.clone() / rat_int(n as i64);
                }
            }
            mu = next;
        }
        let mut direct = Rat::zero();
        for x in 0..points {
            let mut bx = 0u32;
            for (i, &col) in columns.iter().enumerate() {
                if (x >> i) & 1 == 1 {
                    bx ^= col;
                }
            }
            if bx == c {
                direct += mu[x].clone();
            }
        }
        let mut mass = vec![Rat::zero(); points];
        mass[0] = rat_int(1);
        for _ in 0..k {
            let mut next = vec![Rat::zero(); points];
            for (x, p) in mass.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                for &col in columns {
                    next[x ^ col as usize] += p.clone() / rat_int(n as i64);
                }
            }
            mass = next;
        }
        assert_eq!(mass[c as usize], direct, "B={columns:?} c={c} k={k}");
    };
    for b0 in 0..4u32 {
        for b1 in 0..4u32 {
            exact_check(&[b0, b1], (b0 ^ b1) & 3, 2);
        }
    }
    for trial in 0..25u64 {
        let mut rng = heat_core::trial_rng(2109, trial);
        let columns: Vec<u32> = (0..3).map(|_| rng.gen::<u32>() & 0x7).collect();
        exact_check(&columns, rng.gen::<u32>() & 0x7, 1 + (trial % 4) as usize);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?} >= 1 min");
    println!(
        "ACCEPTANCE 08 PASS: coset-walk identity, float residual < 1e-12 (worst {worst:.2e}) over 1000 draws at n=6; exact at n <= 3 ({elapsed:?})"
    );
}

// ---------------------------------------------------------------- 9

#[test]
fn ac09_flip_distribution_facts() {
    let d = flip_distribution(2, 2, FlipVariant::Weight).unwrap();
    assert_eq!(d.mass, vec![0.5, 0.0, 0.0, 0.5], "mu_2 on two coordinates");
    let d = flip_distribution(16, 3, FlipVariant::Weight).unwrap();
    let mass = d.weight_class_mass(3);
    let bound = 1.0 - 3.0 / 16.0;
    assert!(mass >= bound, "weight-3 mass {mass} < {bound}");
    println!(
        "ACCEPTANCE 09 PASS: mu_2(n=2) = {{00: 1/2, 11: 1/2}} exactly; weight-3 mass {mass:.6} >= {bound} at (16, 3)"
    );
}

// ---------------------------------------------------------------- 10

#[test]
fn ac10_continuous_probe() {
    let start = std::time::Instant::now();
    // two-state closed form f(x) = (1 + e^{-2x})/2 to 1e-9
    let swap = SymmetricKernel::from_triplets(StateSpace::new(2).unwrap(), &[(0, 1, 1.0)])
        .unwrap();
    let e0 = NonnegVector::point_mass(swap.space().clone(), 0).unwrap();
    let grid: Vec<f64> = (1..=40).map(|i| 0.2 * i as f64).collect();
    let profile = continuous_probe(&swap, &e0, &e0, &grid, 1e-4).unwrap();
    let mut worst_f = 0.0f64;
    for (i, &x) in grid.iter().enumerate() {
        let expect = (1.0 + (-2.0 * x).exp()) / 2.0;
        worst_f = worst_f.max((profile.f[i] - expect).abs());
        assert!(profile.residual[i].unwrap() >= -1e-6);
    }
    assert!(worst_f < 1e-9, "closed-form deviation {worst_f}");

    // 50-instance sweep: residual >= -1e-6 everywhere
    let mut worst_residual = f64::INFINITY;
    for trial in 0..50u64 {
        let size = 3 + (trial % 5) as usize;
        let (raw, u, v) = random_instance_stream(size, 0.6, 2110, trial).unwrap();
        let (s, _) = normalize_substochastic(&raw).unwrap();
        let profile = continuous_probe(&s, &u, &v, &grid, 1e-4).unwrap();
        for residual in profile.residual.iter().flatten() {
            worst_residual = worst_residual.min(*residual);
            assert!(*residual >= -1e-6, "trial {trial}: residual {residual}");
        }
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 10 PASS: two-state closed form within {worst_f:.2e}; sweep residual floor {worst_residual:.3} >= -1e-6 ({elapsed:?})"
    );
}

// ---------------------------------------------------------------- 11

#[test]
fn ac11_determinism() {
    let start = std::time::Instant::now();
    let config = SearchConfig {
        sizes: vec![3, 4, 5, 6],
        t_max: 10,
        epsilon: 0.95,
        delta: None,
        trials: 200,
        seed: 2111,
        density: 0.6,
    };
    let render = || -> String {
        let mut out = String::new();
        out += &serde_json::to_string_pretty(&counterexample_search(&config)).unwrap();
        let cert = corruption_certificate(
            HyperplaneKind::KLogDelta,
            3,
            2,
            0.05,
            0.05,
            0.0075,
            SearchMode::Random {
                trials: 500,
                seed: 2111,
            },
        )
        .unwrap();
        out += &serde_json::to_string_pretty(&cert).unwrap();
        let (s, u, v) = random_instance_stream(4, 0.8, 2111, 7).unwrap();
        let verdict = main_dichotomy(&s, &u, &v, 8, 0.95, 1e-9).unwrap();
        out += &serde_json::to_string_pretty(&verdict).unwrap();
        let mu = u.normalized_l1().unwrap();
        let nu = v.normalized_l1().unwrap();
        for report in verify_lemma_3_3(&s, &mu, &nu, 5, 1e-9).unwrap() {
            out += &serde_json::to_string_pretty(&report).unwrap();
        }
        out
    };
    let first = render();
    let second = render();
    assert_eq!(first, second, "reports must be byte-identical");
    assert!(!first.is_empty());
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 11 PASS: {} report bytes byte-identical across two seeded runs ({elapsed:?})",
        first.len()
    );
}
