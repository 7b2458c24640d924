use heat_core::{
    hypercube_kernel, path_chain, NonnegVector, StateSpace, SymmetricKernel,
};

/// A named instance: kernel, unit vectors, and a default time step.
pub struct Fixture {
    pub kernel: SymmetricKernel,
    pub u: NonnegVector,
    pub v: NonnegVector,
    pub t: usize,
}

pub fn complete_uniform_kernel(n: usize) -> SymmetricKernel {
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in i..n {
            triplets.push((i, j, 1.0 / n as f64));
        }
    }
    SymmetricKernel::from_triplets(StateSpace::new(n).expect("size"), &triplets).expect("kernel")
}

/// Looks up a named fixture. `path2` and `path4` are the endpoint path
/// instances; `cube3` is the 3-cube with a corner mass; `complete4` is the
/// stationary uniform instance that lands in the second branch.
pub fn fixture(name: &str) -> Option<Fixture> {
    match name {
        "path2" => {
            let kernel = path_chain(2, 0.5).ok()?;
            let u = NonnegVector::point_mass(kernel.space().clone(), 0).ok()?;
            let v = NonnegVector::point_mass(kernel.space().clone(), 2).ok()?;
            Some(Fixture {
                kernel,
                u,
                v,
                t: 2,
            })
        }
        "path4" => {
            let kernel = path_chain(4, 1.0).ok()?;
            let u = NonnegVector::point_mass(kernel.space().clone(), 0).ok()?;
            let v = NonnegVector::point_mass(kernel.space().clone(), 4).ok()?;
            Some(Fixture {
                kernel,
                u,
                v,
                t: 4,
            })
        }
        "cube3" => {
            let kernel = hypercube_kernel(3).ok()?;
            let u = NonnegVector::point_mass(kernel.space().clone(), 0).ok()?;
            let v = u.clone();
            Some(Fixture {
                kernel,
                u,
                v,
                t: 4,
            })
        }
        "complete4" => {
            let kernel = complete_uniform_kernel(4);
            let u = NonnegVector::uniform_unit(kernel.space().clone()).ok()?;
            let v = u.clone();
            Some(Fixture {
                kernel,
                u,
                v,
                t: 8,
            })
        }
        _ => None,
    }
}

pub const FIXTURE_NAMES: &[&str] = &["path2", "path4", "cube3", "complete4"];
