use crate::conditioned::ConditionedWalk;
use crate::markov::{absorbing_row, Kernel, MarkovWalk, WalkMixture};

/// The reversal mixture `Z`: a uniform label `J` over `1..=t`; component
/// `Z | J = j` runs the conditioned walk forward to time `j`, takes one
/// backward-kernel step, then resumes the forward kernels shifted by two
/// time steps. Components live on time steps `-1 .. t+3` and always end at
/// `r`.
pub fn reversal_mixture(x: &ConditionedWalk) -> WalkMixture {
    let t = x.t();
    let states = x.states();
    let n = x.base_size();
    let weight = 1.0 / t as f64;
    let fwd = x.forward_view();

    let mut components = Vec::with_capacity(t);
    for j in 1..=t {
        let mut kernels: Vec<Kernel> = Vec::with_capacity(t + 4);
        // times -1 .. j: X's own forward kernels (index i+1 maps time i -> i+1)
        for step in 0..=j {
            kernels.push(fwd.kernel(step).clone());
        }
        // time j -> j+1: the backward kernel dist(X_{j-1} | X_j)
        let mut back: Kernel = Vec::with_capacity(states);
        for state in 0..n {
            match x.mu_row(j, state) {
                Some(row) => back.push(row),
                None => back.push(absorbing_row(states, state)),
            }
        }
        back.push(absorbing_row(states, n));
        back.push(absorbing_row(states, n + 1));
        kernels.push(back);
        // times j+1 .. t+3: forward kernels shifted down by two,
        // dist(X_{i-1} | X_{i-2}) at time i-1 -> i
        for i in j + 1..=t + 2 {
            kernels.push(fwd.kernel((i - 1) as usize).clone());
        }
        let mut initial = vec![0.0; states];
        initial[n] = 1.0;
        components.push((weight, MarkovWalk::new(-1, true, initial, kernels)));
    }
    WalkMixture::new("J", components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use heat_core::{path_chain, random_instance, Distribution};

    #[test]
    fn component_shape_and_endpoint() {
        let s = path_chain(2, 0.5).unwrap();
        let mu = Distribution::point_mass(3, 0).unwrap();
        let nu = Distribution::point_mass(3, 2).unwrap();
        let x = ConditionedWalk::build(&s, &mu, &nu, 2).unwrap();
        let z = reversal_mixture(&x);
        assert_eq!(z.n_components(), 2);
        for (_, comp) in &z.components {
            assert_eq!(comp.time_lo(), -1);
            assert_eq!(comp.time_hi(), 5); // t + 3
            comp.validate_stochastic(1e-9).unwrap();
            // Z ends at r almost surely
            let end = comp.marginal_at(5);
            assert!((end[3] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lemma_marginal_law() {
        // dist(Z_i | J=j) = dist(X_i) for i <= j and dist(X_{i-2}) for i > j
        let (s, u, v) = random_instance(5, 0.7, 11).unwrap();
        let mu = u.normalized_l1().unwrap();
        let nu = v.normalized_l1().unwrap();
        let t = 4;
        let x = ConditionedWalk::build(&s, &mu, &nu, t).unwrap();
        let z = reversal_mixture(&x);
        for (j, (_, comp)) in z.components.iter().enumerate() {
            let j = (j + 1) as i64;
            for i in -1..=(t as i64 + 3) {
                let expect = if i <= j {
                    x.marginal(i)
                } else {
                    x.marginal(i - 2)
                };
                let got = comp.marginal_at(i);
                for state in 0..x.states() {
                    assert!(
                        (got[state] - expect[state]).abs() < 1e-10,
                        "j={j} i={i} state={state}: {} vs {}",
                        got[state],
                        expect[state]
                    );
                }
            }
        }
    }

    #[test]
    fn degenerate_single_component() {
        let s = path_chain(1, 0.5).unwrap();
        let mu = Distribution::point_mass(2, 0).unwrap();
        let nu = Distribution::point_mass(2, 1).unwrap();
        let x = ConditionedWalk::build(&s, &mu, &nu, 1).unwrap();
        let z = reversal_mixture(&x);
        assert_eq!(z.n_components(), 1);
        z.components[0].1.validate_stochastic(1e-9).unwrap();
    }
}
