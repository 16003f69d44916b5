//! Fixtures shared by the integration tests: seeded chains, catalogs of
//! solved states with their oracle eigenvectors, probe points, and an
//! independent evaluation of the rank-one (b = 0) determinant formulas.

#![allow(dead_code)]

use std::collections::BTreeMap;

use gl3ff::formfactor::FFKind;
use gl3ff::linalg::DenseComplexMatrix;
use gl3ff::oracle::{SpinChainSpec, StateVectors};
use gl3ff::solver::distinct_states;
use gl3ff::{BetheState, Complex64, ModelFunctions, RootConfig, Twist};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// The generic diagonal twist used wherever untwisted sectors are empty.
pub fn generic_twist() -> Twist {
    Twist::new(c(1.3, 0.2), c(1.0, 0.0), c(0.7, -0.1)).unwrap()
}

/// A solved state together with its left and right oracle eigenvectors.
#[derive(Debug, Clone)]
pub struct Solved {
    pub state: BetheState,
    pub vecs: StateVectors,
}

impl Solved {
    pub fn roots(&self) -> &RootConfig {
        &self.state.roots
    }
}

/// Solved states of one chain at one twist, grouped by sector.
pub struct Catalog {
    pub spec: SpinChainSpec,
    pub twist: Twist,
    /// The model whose on-shell states these are: `r_k -> r_k κ_k/κ_2`.
    pub model: ModelFunctions,
    pub sectors: BTreeMap<(usize, usize), Vec<Solved>>,
}

impl Catalog {
    pub fn build(spec: &SpinChainSpec, twist: Twist, sectors: &[(usize, usize)], per_sector: usize) -> Self {
        let base = spec.model();
        let mut map = BTreeMap::new();
        for (idx, &(a, b)) in sectors.iter().enumerate() {
            let found: Vec<Solved> = distinct_states(&base, a, b, &twist, 20, 100 + idx as u64)
                .into_iter()
                .filter_map(|st| {
                    let vecs = StateVectors::extract(&st, spec, 7 + idx as u64).ok()?;
                    Some(Solved { state: st, vecs })
                })
                .take(per_sector)
                .collect();
            if !found.is_empty() {
                map.insert((a, b), found);
            }
        }
        Catalog { spec: spec.clone(), twist, model: base.twisted(&twist), sectors: map }
    }

    /// `κ_i/κ_2`: oracle elements of `T_ij` times this equal the values of the
    /// determinant formulas in the twisted model.
    pub fn scale(&self, i: usize) -> Complex64 {
        let k = self.twist.as_array();
        k[i - 1] / k[1]
    }

    /// All `(left, right)` pairs whose sectors fit `kind`, excluding a state
    /// paired with itself.
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

/// Two different states with a common root make the determinant formulas
/// an indeterminate `0/0`; such pairs are left out.
pub fn shares_root(x: &RootConfig, y: &RootConfig) -> bool {
    let near = |p: &[Complex64], q: &[Complex64]| p.iter().any(|a| q.iter().any(|b| (a - b).norm() < 1e-6));
    near(&x.u, &y.u) || near(&x.v, &y.v)
}

/// Sectors `(a, b)` with `b <= a <= min(l, a_max)`.
pub fn sectors_up_to(l: usize, a_max: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..=l.min(a_max) {
        for b in 0..=a {
            out.push((a, b));
        }
    }
    out
}

/// Points in the disk of radius 1.5 at distance at least 0.2 from every
/// site and every root of the given states.
pub fn z_points(rng: &mut ChaCha8Rng, n: usize, spec: &SpinChainSpec, states: &[&RootConfig]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let keep = spec
            .xi()
            .iter()
            .chain(states.iter().flat_map(|s| s.u.iter().chain(&s.v)))
            .all(|&p| (z - p).norm() > 0.2 && (z - p - spec.c()).norm() > 0.2 && (z - p + spec.c()).norm() > 0.2);
        if keep {
            out.push(z);
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rank-one formulas written out from scratch: the eigenvalue
/// `τ2(w|ū) = r1(w) ∏f(u,w) + ∏f(w,u)` and its root derivatives, with the
/// determinant representations of the rank-one form factors.
pub mod gl2 {
    use super::*;

    fn f(c: Complex64, x: Complex64, y: Complex64) -> Complex64 {
        (x - y + c) / (x - y)
    }

    fn g(c: Complex64, x: Complex64, y: Complex64) -> Complex64 {
        c / (x - y)
    }

    fn h(c: Complex64, x: Complex64, y: Complex64) -> Complex64 {
        (x - y + c) / c
    }

    fn delta_prime(cc: Complex64, xs: &[Complex64]) -> Complex64 {
        let mut acc = super::c(1.0, 0.0);
        for j in 0..xs.len() {
            for k in j + 1..xs.len() {
                acc *= g(cc, xs[j], xs[k]);
            }
        }
        acc
    }

    fn delta(cc: Complex64, xs: &[Complex64]) -> Complex64 {
        let mut acc = super::c(1.0, 0.0);
        for j in 0..xs.len() {
            for k in 0..j {
                acc *= g(cc, xs[j], xs[k]);
            }
        }
        acc
    }

    /// `∂τ2(w|ū)/∂u_j`.
    pub fn dtau2(model: &ModelFunctions, w: Complex64, u: &[Complex64], j: usize) -> Complex64 {
        let cc = model.c();
        let mut left = model.r1(w).unwrap();
        let mut right = super::c(1.0, 0.0);
        for (l, &ul) in u.iter().enumerate() {
            if l != j {
                left *= f(cc, ul, w);
                right *= f(cc, w, ul);
            }
        }
        let d = u[j] - w;
        -left * cc / (d * d) + right * cc / (d * d)
    }

    fn n_entry(model: &ModelFunctions, x: Complex64, u: &[Complex64], j: usize) -> Complex64 {
        let cc = model.c();
        let mut inv_g = super::c(1.0, 0.0);
        for &ul in u {
            inv_g *= (x - ul) / cc;
        }
        cc * inv_g * dtau2(model, x, u, j)
    }

    /// `Δ'(ūC) Δ(x̄) det n` with `x̄ = {ūB, z}`, the form factor of `T12`.
    pub fn ff12(model: &ModelFunctions, uc: &[Complex64], ub: &[Complex64], z: Complex64) -> Complex64 {
        let cc = model.c();
        let mut x = ub.to_vec();
        x.push(z);
        let m = DenseComplexMatrix::from_fn(uc.len(), |j, k| n_entry(model, x[k], uc, j));
        delta_prime(cc, uc) * delta(cc, &x) * m.det()
    }

    /// The same with the two states exchanged: the form factor of `T21`.
    pub fn ff21(model: &ModelFunctions, uc: &[Complex64], ub: &[Complex64], z: Complex64) -> Complex64 {
        ff12(model, ub, uc, z)
    }

    /// `Δ'(ūC) Δ(x̄) det n^{(s)}` for distinct states, `s = 1, 2`.
    pub fn ffss(model: &ModelFunctions, s: usize, uc: &[Complex64], ub: &[Complex64], z: Complex64) -> Complex64 {
        let cc = model.c();
        let a = uc.len();
        let mut x = ub.to_vec();
        x.push(z);
        let m = DenseComplexMatrix::from_fn(a + 1, |j, k| {
            if j < a {
                return n_entry(model, x[k], uc, j);
            }
            let mut acc = super::c(1.0, 0.0);
            for &ul in ub {
                acc *= if s == 1 { h(cc, ul, x[k]) } else { h(cc, x[k], ul) };
            }
            if s == 1 {
                let sign = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * model.r1(x[k]).unwrap() * acc
            } else {
                acc
            }
        });
        delta_prime(cc, uc) * delta(cc, &x) * m.det()
    }
}
