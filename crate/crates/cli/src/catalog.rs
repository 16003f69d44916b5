//! Solved states of one chain at one twist, with their oracle eigenvectors.

use std::collections::BTreeMap;

use gl3ff::oracle::{SpinChainSpec, StateVectors};
use gl3ff::solver::distinct_states;
use gl3ff::{BetheState, Complex64, FFKind, ModelFunctions, RootConfig, Twist};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Solved {
    pub state: BetheState,
    pub vecs: StateVectors,
}

impl Solved {
    pub fn roots(&self) -> &RootConfig {
        &self.state.roots
    }
}

pub struct Catalog {
    pub label: &'static str,
    pub spec: SpinChainSpec,
    pub twist: Twist,
    /// `r_k -> r_k κ_k/κ_2`: the model in which the twisted states are on shell.
    pub model: ModelFunctions,
    pub sectors: BTreeMap<(usize, usize), Vec<Solved>>,
    /// States the solver found but whose eigenvectors could not be isolated.
    pub skipped: usize,
}

impl Catalog {
    pub fn build(
        label: &'static str,
        spec: &SpinChainSpec,
        twist: Twist,
        sectors: &[(usize, usize)],
        per_sector: usize,
        n_seeds: usize,
        rng_seed: u64,
    ) -> Self {
        let base = spec.model();
        let mut map = BTreeMap::new();
        let mut skipped = 0;
        for (idx, &(a, b)) in sectors.iter().enumerate() {
            let mut found = Vec::new();
            for st in distinct_states(&base, a, b, &twist, n_seeds, rng_seed.wrapping_add(100 + idx as u64)) {
                if found.len() == per_sector {
                    break;
                }
                match StateVectors::extract(&st, spec, rng_seed.wrapping_add(7 + idx as u64)) {
                    Ok(vecs) => found.push(Solved { state: st, vecs }),
                    Err(_) => skipped += 1,
                }
            }
            if !found.is_empty() {
                map.insert((a, b), found);
            }
        }
        Catalog { label, spec: spec.clone(), twist, model: base.twisted(&twist), sectors: map, skipped }
    }

    /// `κ_i/κ_2`, the factor between oracle elements of `T_ij` and the
    /// determinant values in the twisted model.
    pub fn scale(&self, i: usize) -> Complex64 {
        let k = self.twist.as_array();
        k[i - 1] / k[1]
    }

    /// Pairs of different states whose sectors fit `kind`. Pairs with a root
    /// in common are left out: the determinant formulas are `0/0` there.
    pub fn pairs(&self, kind: FFKind) -> Vec<(&Solved, &Solved)> {
        let mut out = Vec::new();
        for (&(a, b), rights) in &self.sectors {
            let Some(ls) = kind.left_sector(a, b) else { continue };
            let Some(lefts) = self.sectors.get(&ls) else { continue };
            for r in rights {
                for l in lefts {
                    if l.roots().multiset_distance(r.roots()) > 1e-6 && !shares_root(l.roots(), r.roots()) {
                        out.push((l, r));
                    }
                }
            }
        }
        out
    }

    pub fn states(&self) -> impl Iterator<Item = &Solved> {
        self.sectors.values().flatten()
    }
}

pub fn shares_root(x: &RootConfig, y: &RootConfig) -> bool {
    let near = |p: &[Complex64], q: &[Complex64]| p.iter().any(|a| q.iter().any(|b| (a - b).norm() < 1e-6));
    near(&x.u, &y.u) || near(&x.v, &y.v)
}

/// Probe points in the disk of radius 1.5, at distance above 0.2 from every
/// site and every root and from their shifts by `±c`.
pub fn z_points(rng: &mut ChaCha8Rng, n: usize, spec: &SpinChainSpec, states: &[&RootConfig]) -> Vec<Complex64> {
    let c = spec.c();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let keep = spec
            .xi()
            .iter()
            .chain(states.iter().flat_map(|s| s.u.iter().chain(&s.v)))
            .all(|&p| (z - p).norm() > 0.2 && (z - p - c).norm() > 0.2 && (z - p + c).norm() > 0.2);
        if keep {
            out.push(z);
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The diagonal twist used when a sector has no untwisted solutions.
pub fn generic_twist() -> Twist {
    Twist::new(Complex64::new(1.3, 0.2), Complex64::new(1.0, 0.0), Complex64::new(0.7, -0.1)).expect("nonzero twist")
}
