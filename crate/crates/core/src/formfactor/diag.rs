//! Extra rows appended to `N` for the diagonal entries and for `T13`, and the
//! same-state matrix whose upper block degenerates into the Gaudin matrix.

use num_complex::Complex64;

use super::matrix::{n_entry, n_rows, Assembly, Row};
use crate::error::{Error, Result};
use crate::kernel::Func;
use crate::linalg::DenseComplexMatrix;
use crate::model::{ModelFunctions, RootConfig};

fn delta(p: usize, q: usize) -> f64 {
    if p == q {
        1.0
    } else {
        0.0
    }
}

fn check_s(s: usize) -> Result<()> {
    if (1..=3).contains(&s) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("diagonal index {s} outside 1..=3")))
    }
}

/// Corner element of the diagonal row, built from the left roots:
/// `r1 f(ū,z)/(f(v̄,z) f(z,ū))`, `1`, `r3 f(z,v̄)/(f(v̄,z) f(z,ū))`.
pub fn y_corner(model: &ModelFunctions, s: usize, z: Complex64, roots: &RootConfig) -> Result<Complex64> {
    check_s(s)?;
    let k = model.kernel();
    let (u, v) = (&roots.u[..], &roots.v[..]);
    match s {
        2 => Ok(Complex64::new(1.0, 0.0)),
        1 => Ok(model.r1(z)? * k.prod(Func::F, u, &[z])? * k.prod_inv(Func::F, v, &[z])? * k.prod_inv(Func::F, &[z], u)?),
        _ => Ok(model.r3(z)? * k.prod(Func::F, &[z], v)? * k.prod_inv(Func::F, v, &[z])? * k.prod_inv(Func::F, &[z], u)?),
    }
}

/// The row `Y^{(s)}` of length `a+b+1` for an assembly with equal sectors.
pub fn y_row_diag(model: &ModelFunctions, s: usize, asm: &Assembly) -> Result<Vec<Complex64>> {
    check_s(s)?;
    if asm.uc.len() != asm.ub.len() || asm.vc.len() != asm.vb.len() {
        return Err(Error::SectorMismatch("diagonal row needs equal sectors".into()));
    }
    let k = model.kernel();
    let c = model.c();
    let base_u = delta(s, 2) - delta(s, 1);
    let base_v = delta(s, 2) - delta(s, 3);
    let weight = delta(s, 1) - delta(s, 3);
    let mut row = Vec::with_capacity(asm.ub.len() + asm.vc.len() + 1);
    for &u in &asm.ub {
        let ratio = k.prod(Func::F, &asm.vb, &[u])? * k.prod_inv(Func::F, &asm.vc, &[u])?;
        row.push(base_u + u / c * weight * (ratio - 1.0));
    }
    for &v in &asm.vc {
        let ratio = k.prod(Func::F, &[v], &asm.uc)? * k.prod_inv(Func::F, &[v], &asm.ub)?;
        row.push(base_v + (v + c) / c * weight * (ratio - 1.0));
    }
    row.push(y_corner(model, s, asm.z, &asm.left())?);
    Ok(row)
}

/// The row `Y^{(1,3)}` over the columns `(ūB, v̄C, z)`.
pub fn y_row_13(model: &ModelFunctions, asm: &Assembly) -> Result<Vec<Complex64>> {
    let k = model.kernel();
    let sign = if asm.vc.len().is_multiple_of(2) { 1.0 } else { -1.0 };
    asm.columns()
        .into_iter()
        .map(|x| {
            let inv_h = k.prod_inv(Func::H, &asm.vc, &[x])?;
            let first = sign * model.r3(x)? * k.prod(Func::H, &[x], &asm.vb)? * k.prod_inv(Func::F, &[x], &asm.ub)? * inv_h;
            let second = k.prod(Func::H, &asm.vb, &[x])? * inv_h;
            Ok(first + second)
        })
        .collect()
}

/// `N^{(s)}` for two different states: the rows of `N` and then `Y^{(s)}`.
pub fn diag_matrix_distinct(model: &ModelFunctions, s: usize, asm: &Assembly) -> Result<DenseComplexMatrix> {
    let mut rows = n_rows(model, asm, &asm.columns())?;
    rows.push(y_row_diag(model, s, asm)?);
    Ok(DenseComplexMatrix::from_rows(&rows))
}

/// `N^{(s)}` in the coinciding-state limit: the Gaudin matrix in the first
/// `a+b` columns, the `N` entries at `z` in the last column, and the bottom
/// row `(δ.., Y_corner)`.
pub fn diag_matrix_same(model: &ModelFunctions, s: usize, roots: &RootConfig, z: Complex64) -> Result<DenseComplexMatrix> {
    check_s(s)?;
    let gaudin = model.gaudin_matrix(roots)?;
    let n = gaudin.dim();
    let asm = Assembly::new(roots, roots, z);
    let rows = asm.rows();
    let a = roots.a();
    let base_u = Complex64::new(delta(s, 2) - delta(s, 1), 0.0);
    let base_v = Complex64::new(delta(s, 2) - delta(s, 3), 0.0);
    let mut m = DenseComplexMatrix::zeros(n + 1);
    for (j, &row) in rows.iter().enumerate() {
        for l in 0..n {
            m[(j, l)] = gaudin[(j, l)];
        }
        m[(j, n)] = n_entry(model, row, z, &asm)?;
    }
    for l in 0..n {
        m[(n, l)] = if l < a { base_u } else { base_v };
    }
    m[(n, n)] = y_corner(model, s, z, roots)?;
    debug_assert!(rows.iter().all(|r| matches!(r, Row::U(_) | Row::V(_))));
    Ok(m)
}
