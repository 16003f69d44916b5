//! The vector `Ω` that annihilates the first `a+b` columns of `N` on shell,
//! the combination `S(x) = Σ_j Ω_j N_j(x)`, and the summation identities
//! used to evaluate it.

use num_complex::Complex64;
use serde::Serialize;

use super::matrix::{n_entry, Assembly};
use crate::error::{Error, Result};
use crate::kernel::Func;
use crate::linalg::DenseComplexMatrix;
use crate::model::ModelFunctions;

/// `Ω_j = g(u^C_j, ūC_j)/g(u^C_j, ūB)` followed by
/// `Ω_{a+j} = g(v^B_j, v̄B_j)/g(v^B_j, v̄C)`, row-aligned with `N`.
pub fn omega_vector(model: &ModelFunctions, asm: &Assembly) -> Result<Vec<Complex64>> {
    let k = model.kernel();
    let mut out = Vec::with_capacity(asm.uc.len() + asm.vb.len());
    for (j, &u) in asm.uc.iter().enumerate() {
        out.push(k.prod_excluding(Func::G, u, &asm.uc, j)? * k.prod_inv(Func::G, &[u], &asm.ub)?);
    }
    for (j, &v) in asm.vb.iter().enumerate() {
        out.push(k.prod_excluding(Func::G, v, &asm.vb, j)? * k.prod_inv(Func::G, &[v], &asm.vc)?);
    }
    Ok(out)
}

/// `S(x) = Σ_j Ω_j N_{j}(x)`.
pub fn s_function(model: &ModelFunctions, x: Complex64, omega: &[Complex64], asm: &Assembly) -> Result<Complex64> {
    let rows = asm.rows();
    if rows.len() != omega.len() {
        return Err(Error::Invalid(format!("omega has {} entries for {} rows", omega.len(), rows.len())));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (row, w) in rows.into_iter().zip(omega) {
        acc += w * n_entry(model, row, x, asm)?;
    }
    Ok(acc)
}

/// `(τ(x|ūC,v̄C) - τ(x|ūB,v̄B)) / (f(v̄C,x) f(x,ūB))`.
pub fn s_closed_form(model: &ModelFunctions, x: Complex64, asm: &Assembly) -> Result<Complex64> {
    let k = model.kernel();
    let diff = model.tau(x, &asm.left())? - model.tau(x, &asm.right())?;
    Ok(diff * k.prod_inv(Func::F, &asm.vc, &[x])? * k.prod_inv(Func::F, &[x], &asm.ub)?)
}

/// Both sides of the row-reduction formula for a square matrix whose last
/// column is labelled by `z`: `det M` against
/// `Ω_p^{-1} S(z) · cofactor(p, last)` with `p` the largest `|Ω_p|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CofactorCheck {
    pub det: Complex64,
    pub reduced: Complex64,
    pub pivot: usize,
}

impl CofactorCheck {
    pub fn relative_error(&self) -> f64 {
        (self.det - self.reduced).norm() / self.det.norm().max(self.reduced.norm()).max(f64::MIN_POSITIVE)
    }
}

pub fn cofactor_identity(model: &ModelFunctions, matrix: &DenseComplexMatrix, asm: &Assembly) -> Result<CofactorCheck> {
    let omega = omega_vector(model, asm)?;
    let n = matrix.dim();
    if omega.len() + 1 != n {
        return Err(Error::Invalid(format!("matrix of size {n} for {} N-rows", omega.len())));
    }
    let (pivot, wp) = omega
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, w)| (i, *w))
        .ok_or_else(|| Error::Invalid("empty omega vector".into()))?;
    if wp.norm() == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let s = s_closed_form(model, asm.z, asm)?;
    Ok(CofactorCheck { det: matrix.det(), reduced: s / wp * matrix.cofactor(pivot, n - 1), pivot })
}

/// One side-by-side evaluation of a summation identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `|lhs - rhs|` over the largest of `Σ|terms|` and `|rhs|`.
    pub residual: f64,
}

fn residual(terms: &[Complex64], rhs: Complex64) -> IdentityResidual {
    let lhs: Complex64 = terms.iter().sum();
    let scale = terms.iter().map(|t| t.norm()).sum::<f64>().max(rhs.norm()).max(f64::MIN_POSITIVE);
    IdentityResidual { lhs, rhs, residual: (lhs - rhs).norm() / scale }
}

/// The four sums of `t(·,z) Ω` and `t(z,·) Ω` over u- and v-rows against
/// their closed forms. Needs `#ūC = #ūB` and `#v̄C = #v̄B`.
pub fn appendix_identities(model: &ModelFunctions, asm: &Assembly) -> Result<[IdentityResidual; 4]> {
    if asm.uc.len() != asm.ub.len() || asm.vc.len() != asm.vb.len() {
        return Err(Error::SectorMismatch("summation identities need equal sectors".into()));
    }
    let k = model.kernel();
    let z = asm.z;
    let omega = omega_vector(model, asm)?;
    let a = asm.uc.len();
    let (wu, wv) = omega.split_at(a);
    let one = Complex64::new(1.0, 0.0);

    let t1: Vec<_> = asm.uc.iter().zip(wu).map(|(&u, w)| Ok(k.t(u, z)? * w)).collect::<Result<_>>()?;
    let r1 = k.prod(Func::H, &asm.ub, &[z])?
        * k.prod_inv(Func::H, &asm.uc, &[z])?
        * (one - k.prod(Func::F, &asm.uc, &[z])? * k.prod_inv(Func::F, &asm.ub, &[z])?);

    let t2: Vec<_> = asm.uc.iter().zip(wu).map(|(&u, w)| Ok(k.t(z, u)? * w)).collect::<Result<_>>()?;
    let r2 = k.prod(Func::H, &[z], &asm.ub)?
        * k.prod_inv(Func::H, &[z], &asm.uc)?
        * (k.prod(Func::F, &[z], &asm.uc)? * k.prod_inv(Func::F, &[z], &asm.ub)? - one);

    let t3: Vec<_> = asm.vb.iter().zip(wv).map(|(&v, w)| Ok(k.t(v, z)? * w)).collect::<Result<_>>()?;
    let r3 = k.prod(Func::H, &asm.vc, &[z])?
        * k.prod_inv(Func::H, &asm.vb, &[z])?
        * (one - k.prod(Func::F, &asm.vb, &[z])? * k.prod_inv(Func::F, &asm.vc, &[z])?);

    let t4: Vec<_> = asm.vb.iter().zip(wv).map(|(&v, w)| Ok(k.t(z, v)? * w)).collect::<Result<_>>()?;
    let r4 = k.prod(Func::H, &[z], &asm.vc)?
        * k.prod_inv(Func::H, &[z], &asm.vb)?
        * (k.prod(Func::F, &[z], &asm.vb)? * k.prod_inv(Func::F, &[z], &asm.vc)? - one);

    Ok([residual(&t1, r1), residual(&t2, r2), residual(&t3, r3), residual(&t4, r4)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn draw(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect()
    }

    fn model() -> ModelFunctions {
        ModelFunctions::xxx_chain(&[c(0.1, 0.05), c(-0.15, 0.2), c(0.3, 0.0)], c(1.0, 0.0)).unwrap()
    }

    #[test]
    fn identities_hold_off_shell() {
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for a in 1..=3 {
            for b in 0..=2 {
                let asm = Assembly { uc: draw(&mut rng, a), vc: draw(&mut rng, b), ub: draw(&mut rng, a), vb: draw(&mut rng, b), z: draw(&mut rng, 1)[0] };
                for r in appendix_identities(&m, &asm).unwrap() {
                    assert!(r.residual < 1e-12, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn single_root_case() {
        let m = model();
        let asm = Assembly { uc: vec![c(0.2, 0.3)], vc: vec![], ub: vec![c(-0.4, 0.1)], vb: vec![], z: c(0.7, -0.2) };
        let k = m.kernel();
        let lhs = k.t(asm.uc[0], asm.z).unwrap() / k.g(asm.uc[0], asm.ub[0]).unwrap();
        let r = appendix_identities(&m, &asm).unwrap();
        assert!((r[0].lhs - lhs).norm() < 1e-15);
        assert!(r[0].residual < 1e-14);
    }

    #[test]
    fn coinciding_sets_give_zero() {
        let m = model();
        let u = vec![c(0.2, 0.3), c(-0.5, 0.6)];
        let v = vec![c(0.1, -0.7)];
        let asm = Assembly { uc: u.clone(), vc: v.clone(), ub: u, vb: v, z: c(0.7, -0.2) };
        // Ω is singular here, so only the right-hand sides are meaningful
        let k = m.kernel();
        let one = Complex64::new(1.0, 0.0);
        let br = one - k.prod(Func::F, &asm.uc, &[asm.z]).unwrap() * k.prod_inv(Func::F, &asm.ub, &[asm.z]).unwrap();
        assert!(br.norm() < 1e-15);
    }

    #[test]
    fn s_sum_matches_eigenvalue_difference_off_shell() {
        // the identity only uses the summation formulas, not the Bethe equations
        let m = model();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (a, b) in [(1, 0), (2, 1), (2, 2), (3, 1)] {
            let asm = Assembly { uc: draw(&mut rng, a), vc: draw(&mut rng, b), ub: draw(&mut rng, a), vb: draw(&mut rng, b), z: c(0.0, 0.0) };
            let om = omega_vector(&m, &asm).unwrap();
            for x in draw(&mut rng, 5) {
                let s = s_function(&m, x, &om, &asm).unwrap();
                let t = s_closed_form(&m, x, &asm).unwrap();
                assert!((s - t).norm() <= 1e-10 * t.norm().max(1.0), "{a} {b}: {s} vs {t}");
            }
        }
    }
}
