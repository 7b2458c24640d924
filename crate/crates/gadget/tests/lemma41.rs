//! Lemma 4.1-style combined walk bounds: float sweeps, oracle-scale
//! enumeration of the mixture identities, and an exact-rational instance
//! where the slack is a whole number of bits.

use divergence::kl_slices;
use gadget::{
    bridges, build_gadget_walks, divergence_budget, good_steps, reversal_detectability,
    verify_lemma_4_1, GoodStepsOutcome,
};
use heat_core::{random_instance, Distribution, StateSpace, SymmetricKernel, DEFAULT_ZERO_TOL};
use walks::ConditionedWalk;

fn complete_uniform(n: usize) -> (SymmetricKernel, Distribution) {
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in i..n {
            triplets.push((i, j, 1.0 / n as f64));
        }
    }
    let s = SymmetricKernel::from_triplets(StateSpace::new(n).unwrap(), &triplets).unwrap();
    (s, Distribution::uniform(n).unwrap())
}

fn branch2(
    s: &SymmetricKernel,
    mu: &Distribution,
    nu: &Distribution,
    t: usize,
    epsilon: f64,
) -> Option<(ConditionedWalk, gadget::GoodSteps, gadget::BridgeFamily, gadget::GadgetWalks)> {
    let x = ConditionedWalk::build(s, mu, nu, t).ok()?;
    let profile = reversal_detectability(&x).ok()?;
    match good_steps(&x, epsilon, &profile).ok()? {
        GoodStepsOutcome::SecondBranch(good) => {
            let family = bridges(&x, &good).ok()?;
            let gw = build_gadget_walks(&x, &good, &family).ok()?;
            Some((x, good, family, gw))
        }
        GoodStepsOutcome::FirstBranch { .. } => None,
    }
}

#[test]
fn lemma_4_1_random_sweep() {
    let mut checked = 0;
    for seed in 0..25u64 {
        let size = 3 + (seed as usize % 3);
        let (s, u, v) = random_instance(size, 0.8, 7000 + seed).unwrap();
        let mu = u.normalized_l1().unwrap();
        let nu = v.normalized_l1().unwrap();
        let t = 8 + (seed as usize % 3);
        let Some((x, good, family, gw)) = branch2(&s, &mu, &nu, t, 0.95) else {
            continue;
        };
        if !family.all_mass_ok() {
            continue;
        }
        for idx in 0..good.set.len() {
            let report =
                verify_lemma_4_1(&s, &mu, &nu, &x, &good, &family, &gw, idx, 1e-9).unwrap();
            assert!(report.verdict, "seed {seed} k {}: {report:?}", report.k);
            checked += 1;
        }
    }
    assert!(checked > 20, "sweep too thin: {checked} checks");
}

#[test]
fn symmetric_instance_has_equal_expectation_terms() {
    // mu = nu on a symmetric stationary instance: D(pi||mu_k^x) and
    // D(pi||nu_k^x) agree for every good step
    let (s, uniform) = complete_uniform(4);
    let t = 8;
    let (x, good, family, _gw) = branch2(&s, &uniform, &uniform, t, 0.95).unwrap();
    for (idx, &k) in good.set.iter().enumerate() {
        let law = &good.conditioned[idx];
        let mut e_mu = 0.0;
        let mut e_nu = 0.0;
        for state in 0..x.base_size() {
            if law[state] <= DEFAULT_ZERO_TOL {
                continue;
            }
            let entry = family.get(k, state).unwrap();
            let mu_row = x.mu_row(k, state).unwrap();
            let nu_row = x.nu_row(k, state).unwrap();
            e_mu += law[state]
                * kl_slices(&entry.pi, &mu_row, DEFAULT_ZERO_TOL)
                    .finite()
                    .unwrap();
            e_nu += law[state]
                * kl_slices(&entry.pi, &nu_row, DEFAULT_ZERO_TOL)
                    .finite()
                    .unwrap();
        }
        assert!((e_mu - e_nu).abs() < 1e-12, "k={k}: {e_mu} vs {e_nu}");
    }
}

#[test]
fn oracle_scale_budget_enumerates_mixture_identities() {
    // 3 base states at t = 4 stays inside the trajectory guard, so the
    // budget report carries the enumerated I(K;W), the mixture identity,
    // and both endpoint certificates
    let (s, uniform) = complete_uniform(3);
    let t = 4;
    let (x, good, family, gw) = branch2(&s, &uniform, &uniform, t, 0.95).unwrap();
    let budget = divergence_budget(&s, &uniform, &uniform, &x, &good, &family, &gw, 1e-9).unwrap();
    assert!(budget.oracle_scale);
    let labels: Vec<&str> = budget.lines.iter().map(|l| l.label.as_str()).collect();
    for needed in [
        "oracle_i_kw",
        "oracle_mixture_identity",
        "oracle_true_total",
        "oracle_endpoint_w",
        "oracle_endpoint_y",
    ] {
        assert!(labels.contains(&needed), "missing line {needed}");
    }
    for line in &budget.lines {
        assert!(line.verdict, "failed: {line:?}");
    }
    assert!(budget.end_to_end_ok);
    assert!(budget.certificate_ok);
}

#[test]
fn exact_rational_uniform_instance() {
    // On the all-1/3 kernel with uniform mu = nu, every gadget segment is
    // the uniform walk, so D(W|K=k || F^{t+2}) = D(Y|K=k || F^{t-2})
    // = log2 3 exactly (only the deterministic exit diverges from F), the
    // bridge expectation terms vanish, and the lemma's slack is exactly
    // the +2 from the two conditioning costs. Verified in exact rational
    // arithmetic via formal log-sums.
    use heat_exact::{rat, LogSum, Rat, RatKernel, RatWalk};
    use num_traits::{One, Zero};

    let n = 3usize;
    let t = 4usize;
    let states = n + 2;
    let third = rat(1, 3);
    let s = RatKernel::from_triplets(
        n,
        &[
            (0, 0, third.clone()),
            (0, 1, third.clone()),
            (0, 2, third.clone()),
            (1, 1, third.clone()),
            (1, 2, third.clone()),
            (2, 2, third.clone()),
        ],
    );
    let uniform: Vec<Rat> = vec![third.clone(); n];
    let heat: Rat = heat_exact::moments_exact(&s, &uniform, &uniform, t)[t].clone();
    assert_eq!(heat, third); // S^t(mu, nu) = <mu, nu> = 1/3

    let delta_r = |states: usize| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); states];
        v[n] = Rat::one();
        v
    };
    let absorbing = |x: usize| -> Vec<Rat> {
        let mut row = vec![Rat::zero(); states];
        row[x] = Rat::one();
        row
    };
    // uniform interior step over the base states
    let interior: Vec<Vec<Rat>> = (0..states)
        .map(|x| {
            if x < n {
                let mut row = vec![Rat::zero(); states];
                for y in 0..n {
                    row[y] = third.clone();
                }
                row
            } else {
                absorbing(x)
            }
        })
        .collect();
    let entry_uniform: Vec<Vec<Rat>> = (0..states)
        .map(|x| {
            if x == n {
                let mut row = vec![Rat::zero(); states];
                for y in 0..n {
                    row[y] = third.clone();
                }
                row
            } else {
                absorbing(x)
            }
        })
        .collect();
    let exit_nu: Vec<Vec<Rat>> = (0..states)
        .map(|x| {
            if x < n {
                let mut row = vec![Rat::zero(); states];
                row[n] = third.clone();
                row[n + 1] = rat(2, 3);
                row
            } else {
                absorbing(x)
            }
        })
        .collect();
    let exit_sure: Vec<Vec<Rat>> = (0..states)
        .map(|x| {
            if x < n {
                let mut row = vec![Rat::zero(); states];
                row[n] = Rat::one();
                row
            } else {
                absorbing(x)
            }
        })
        .collect();

    let reference = |len: usize| -> RatWalk {
        let mut kernels = vec![entry_uniform.clone()];
        for _ in 0..len {
            kernels.push(interior.clone());
        }
        kernels.push(exit_nu.clone());
        RatWalk::new(-1, true, delta_r(states), kernels)
    };
    // W | K=k: every segment is the uniform walk; the bridge steps x->p
    // and p->x' are uniform too, so the whole walk is uniform with a
    // deterministic exit
    let gadget_walk = |len: usize| -> RatWalk {
        let mut kernels = vec![entry_uniform.clone()];
        for _ in 0..len {
            kernels.push(interior.clone());
        }
        kernels.push(exit_sure.clone());
        RatWalk::new(-1, true, delta_r(states), kernels)
    };

    let w_k = gadget_walk(t + 2);
    let f_long = reference(t + 2);
    let y_k = gadget_walk(t - 2);
    let f_short = reference(t - 2);

    let d_w = heat_exact::kl_factorized_logsum(&w_k, &f_long).unwrap();
    let d_y = heat_exact::kl_factorized_logsum(&y_k, &f_short).unwrap();

    // each equals log2 3 exactly
    let mut check_w = d_w.clone();
    check_w.sub(&LogSum::log2(rat(3, 1)));
    assert!(check_w.is_zero(), "D(W|K=k || F) = log2 3");

    // slack = rhs - lhs = (-2 log2 heat + 2) - (d_w + d_y) = 2 exactly
    let mut slack = LogSum::zero();
    slack.add(&LogSum::neg_log2(heat.clone()));
    slack.add(&LogSum::neg_log2(heat));
    slack.add_term(Rat::one(), rat(4, 1)); // the +2 bits
    slack.sub(&d_w);
    slack.sub(&d_y);
    // slack - 2 = 0
    slack.add_term(-Rat::one(), rat(4, 1));
    assert!(slack.is_zero(), "exact slack must be exactly 2 bits");
}
