//! The prefactor `𝓗` and the entries of the matrix `N` shared by all
//! determinant representations.
//!
//! An [`Assembly`] holds the four root sets in fixed roles: `uc`, `vb` label
//! the rows, and the columns are `x̄ = (ub..., vc..., z)` in that order.
//! Off-diagonal kinds that swap the roles of the two states do so by building
//! the assembly with the states exchanged.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{Func, Kernel};
use crate::model::{ModelFunctions, RootConfig, Twist};

#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    pub uc: Vec<Complex64>,
    pub vc: Vec<Complex64>,
    pub ub: Vec<Complex64>,
    pub vb: Vec<Complex64>,
    pub z: Complex64,
}

/// Row label: the j-th u-row (labelled by `uc[j]`) or v-row (by `vb[j]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Row {
    U(usize),
    V(usize),
}

impl Assembly {
    pub fn new(left: &RootConfig, right: &RootConfig, z: Complex64) -> Self {
        Assembly { uc: left.u.clone(), vc: left.v.clone(), ub: right.u.clone(), vb: right.v.clone(), z }
    }

    /// Column labels `(ūB, v̄C, z)`.
    pub fn columns(&self) -> Vec<Complex64> {
        let mut x = Vec::with_capacity(self.ub.len() + self.vc.len() + 1);
        x.extend_from_slice(&self.ub);
        x.extend_from_slice(&self.vc);
        x.push(self.z);
        x
    }

    pub fn rows(&self) -> Vec<Row> {
        (0..self.uc.len()).map(Row::U).chain((0..self.vb.len()).map(Row::V)).collect()
    }

    /// Exchanges the roles of the two states.
    pub fn swapped(&self) -> Self {
        Assembly { uc: self.ub.clone(), vc: self.vb.clone(), ub: self.uc.clone(), vb: self.vc.clone(), z: self.z }
    }

    pub fn left(&self) -> RootConfig {
        RootConfig::new(self.uc.clone(), self.vc.clone())
    }

    pub fn right(&self) -> RootConfig {
        RootConfig::new(self.ub.clone(), self.vb.clone())
    }
}

/// `h(x̄,ūB) h(v̄C,x̄) / h(v̄C,ūB) · Δ'(ūC) Δ'(v̄B) Δ(x̄)`.
pub fn prefactor_h(kernel: &Kernel, asm: &Assembly) -> Result<Complex64> {
    prefactor_with_columns(kernel, asm, &asm.columns())
}

pub(crate) fn prefactor_with_columns(kernel: &Kernel, asm: &Assembly, x: &[Complex64]) -> Result<Complex64> {
    let den = h_denominator(kernel, &asm.vc, &asm.ub)?;
    let num = kernel.prod(Func::H, x, &asm.ub)? * kernel.prod(Func::H, &asm.vc, x)?;
    let deltas = kernel.delta_prime(&asm.uc)? * kernel.delta_prime(&asm.vb)? * kernel.delta(x)?;
    Ok(num / den * deltas)
}

/// `h(v̄, ū)`, refusing a vanishing factor.
pub(crate) fn h_denominator(kernel: &Kernel, v: &[Complex64], u: &[Complex64]) -> Result<Complex64> {
    for &vi in v {
        for &uj in u {
            if (vi - uj + kernel.c()).norm() <= kernel.t_coll() {
                return Err(Error::Pole { what: "1/h(v,u)", lhs: vi, rhs: uj });
            }
        }
    }
    kernel.prod(Func::H, v, u)
}

/// Entry of `N` in the closed t/h form. The factors `t·h` are merged into
/// `g·h` over the remaining roots so that `x = u_j + c` is not a spurious pole.
pub fn n_entry(model: &ModelFunctions, row: Row, x: Complex64, asm: &Assembly) -> Result<Complex64> {
    let k = model.kernel();
    match row {
        Row::U(j) => {
            let uj = asm.uc[j];
            let sign = if asm.uc.len() % 2 == 1 { 1.0 } else { -1.0 };
            let inv_h_xub = k.prod_inv(Func::H, &[x], &asm.ub)?;
            let first = sign
                * k.g(uj, x)?
                * k.prod_excluding_rev(Func::H, &asm.uc, j, x)?
                * model.r1(x)?
                * k.prod_inv(Func::F, &asm.vc, &[x])?
                * inv_h_xub;
            let second = k.g(x, uj)? * k.prod_excluding(Func::H, x, &asm.uc, j)? * inv_h_xub;
            Ok(first + second)
        }
        Row::V(j) => {
            let vj = asm.vb[j];
            let sign = if asm.vb.len() % 2 == 1 { 1.0 } else { -1.0 };
            let inv_h_vcx = k.prod_inv(Func::H, &asm.vc, &[x])?;
            let first = sign
                * k.g(x, vj)?
                * k.prod_excluding(Func::H, x, &asm.vb, j)?
                * model.r3(x)?
                * k.prod_inv(Func::F, &[x], &asm.ub)?
                * inv_h_vcx;
            let second = k.g(vj, x)? * k.prod_excluding_rev(Func::H, &asm.vb, j, x)? * inv_h_vcx;
            Ok(first + second)
        }
    }
}

/// All rows of `N` evaluated on the given columns.
pub fn n_rows(model: &ModelFunctions, asm: &Assembly, columns: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
    asm.rows()
        .into_iter()
        .map(|row| columns.iter().map(|&x| n_entry(model, row, x, asm)).collect())
        .collect()
}

/// The same entry through the eigenvalue derivative:
/// `c/(f(x,ūB) f(v̄C,x)) · g(x,ūB)/g(x,ūC) · ∂τ(x|ūC,v̄C)/∂u^C_j` for u-rows and
/// `-c/(f(x,ūB) f(v̄C,x)) · g(v̄C,x)/g(v̄B,x) · ∂τ(x|ūB,v̄B)/∂v^B_j` for v-rows.
/// Undefined at columns labelled by roots; see [`n_entry_dtau_regular`].
pub fn n_entry_dtau(model: &ModelFunctions, row: Row, x: Complex64, asm: &Assembly) -> Result<Complex64> {
    let k = model.kernel();
    let c = model.c();
    let common = c / (k.prod(Func::F, &[x], &asm.ub)? * k.prod(Func::F, &asm.vc, &[x])?);
    let id = Twist::identity();
    match row {
        Row::U(j) => {
            let ratio = k.prod(Func::G, &[x], &asm.ub)? * k.prod_inv(Func::G, &[x], &asm.uc)?;
            let grad = model.tau_root_gradient(x, &asm.left(), &id)?;
            Ok(common * ratio * grad[j])
        }
        Row::V(j) => {
            let ratio = k.prod(Func::G, &asm.vc, &[x])? * k.prod_inv(Func::G, &asm.vb, &[x])?;
            let grad = model.tau_root_gradient(x, &asm.right(), &id)?;
            Ok(-common * ratio * grad[asm.ub.len() + j])
        }
    }
}

/// Points at which the ∂τ form or the model functions may be singular.
fn special_points(model: &ModelFunctions, asm: &Assembly) -> Vec<Complex64> {
    let c = model.c();
    let mut pts = Vec::new();
    for set in [&asm.uc, &asm.vc, &asm.ub, &asm.vb] {
        for &p in set.iter() {
            pts.extend([p, p + c, p - c]);
        }
    }
    if let Some(xs) = model.sites() {
        for &p in xs {
            pts.extend([p, p - c]);
        }
    }
    pts
}

/// Number of circle nodes used at removable singularities.
pub const CIRCLE_NODES: usize = 32;

/// [`n_entry_dtau`] continued analytically into columns labelled by `ūB` or
/// `v̄C`. There the entry is a removable `0·∞`; its value is taken as the mean
/// over a small circle, which is exact for analytic functions up to a
/// geometrically small aliasing term.
pub fn n_entry_dtau_regular(model: &ModelFunctions, row: Row, x: Complex64, asm: &Assembly) -> Result<Complex64> {
    let scale = model.c().norm().max(1.0);
    let hit = asm.ub.iter().chain(&asm.vc).any(|&p| (p - x).norm() <= 1e-9 * scale);
    if !hit {
        return n_entry_dtau(model, row, x, asm);
    }
    let nearest = special_points(model, asm)
        .into_iter()
        .map(|p| (p - x).norm())
        .filter(|&d| d > 1e-9 * scale)
        .fold(f64::INFINITY, f64::min);
    let rho = (0.2 * nearest).min(0.05 * scale);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..CIRCLE_NODES {
        let th = std::f64::consts::TAU * n as f64 / CIRCLE_NODES as f64;
        acc += n_entry_dtau(model, row, x + Complex64::from_polar(rho, th), asm)?;
    }
    Ok(acc / CIRCLE_NODES as f64)
}
