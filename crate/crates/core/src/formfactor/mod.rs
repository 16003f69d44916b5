//! Determinant representations of the form factors
//! `F^{(i,j)}(z) = <C| T_ij(z) |B>` between on-shell Bethe states.
//!
//! All nine entries reduce to one of three shapes:
//!
//! - `𝓗 · det N` for `T12`, `T32` (and, with the states exchanged, `T23`,
//!   `T21`);
//! - `(-1)^b 𝓗 · det N^{(s)}` for `T_ss`, where `N^{(s)}` is `N` with one
//!   extra row;
//! - `(-1)^{b'} 𝓗 · det N^{(1,3)}` for `T13` (and `T31` with the states
//!   exchanged).
//!
//! Bethe vectors are normalized so that the norm is `H_{a,b} det G` with `G`
//! the Gaudin matrix; see [`norm_squared`].

pub mod diag;
pub mod identities;
pub mod matrix;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseComplexMatrix;
use crate::model::{ModelFunctions, RootConfig};
use matrix::{n_rows, prefactor_h, prefactor_with_columns, Assembly};

/// Below this multiset distance two states are treated as the same state.
pub const SAME_STATE_TOL: f64 = 1e-9;
/// Between [`SAME_STATE_TOL`] and this distance neither branch is reliable.
pub const NEAR_DEGENERATE_TOL: f64 = 1e-5;

/// The monodromy entry `T_ij`, with `i, j` in `1..=3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct FFKind {
    i: usize,
    j: usize,
}

impl FFKind {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if (1..=3).contains(&i) && (1..=3).contains(&j) {
            Ok(FFKind { i, j })
        } else {
            Err(Error::Invalid(format!("T{i}{j} is not an entry of a 3x3 monodromy matrix")))
        }
    }

    pub fn all() -> impl Iterator<Item = FFKind> {
        (1..=3).flat_map(|i| (1..=3).map(move |j| FFKind { i, j }))
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn is_diagonal(&self) -> bool {
        self.i == self.j
    }

    /// Sector `(a', b')` of the left state when the right state has `(a, b)`.
    pub fn left_sector(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        let d = |p: usize, q: usize| usize::from(p == q);
        let a2 = (a + d(self.i, 1)).checked_sub(d(self.j, 1))?;
        let b2 = (b + d(self.j, 3)).checked_sub(d(self.i, 3))?;
        Some((a2, b2))
    }

    /// `T_ij -> T_ji`, the image under transposition.
    pub fn transposed(&self) -> Self {
        FFKind { i: self.j, j: self.i }
    }

    /// `T_ij -> T_{4-j,4-i}`, the image under the reflection of indices.
    pub fn reflected(&self) -> Self {
        FFKind { i: 4 - self.j, j: 4 - self.i }
    }

    pub fn check_sectors(&self, left: &RootConfig, right: &RootConfig) -> Result<()> {
        match self.left_sector(right.a(), right.b()) {
            Some((a, b)) if a == left.a() && b == left.b() => Ok(()),
            _ => Err(Error::SectorMismatch(format!(
                "{self} needs the left sector shifted from ({},{}); got ({},{})",
                right.a(),
                right.b(),
                left.a(),
                left.b()
            ))),
        }
    }
}

impl fmt::Display for FFKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}{}", self.i, self.j)
    }
}

impl TryFrom<[usize; 2]> for FFKind {
    type Error = Error;
    fn try_from(v: [usize; 2]) -> Result<Self> {
        FFKind::new(v[0], v[1])
    }
}

impl From<FFKind> for [usize; 2] {
    fn from(k: FFKind) -> Self {
        [k.i, k.j]
    }
}

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    OffDiagonal,
    DistinctStates,
    SameState,
    Corner,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FFEvaluation {
    pub kind: FFKind,
    pub value: Complex64,
    pub branch: Branch,
    pub prefactor: Complex64,
    pub det: Complex64,
    /// 1-norm condition number of the determinant's matrix.
    pub condition: f64,
}

/// `F^{(i,j)}(z | left; right)`.
pub fn form_factor(model: &ModelFunctions, kind: FFKind, left: &RootConfig, right: &RootConfig, z: Complex64) -> Result<Complex64> {
    Ok(form_factor_detailed(model, kind, left, right, z)?.value)
}

pub fn form_factor_detailed(
    model: &ModelFunctions,
    kind: FFKind,
    left: &RootConfig,
    right: &RootConfig,
    z: Complex64,
) -> Result<FFEvaluation> {
    kind.check_sectors(left, right)?;
    match kind.pair() {
        (1, 2) | (3, 2) => offdiag(model, kind, &Assembly::new(left, right, z)),
        (2, 1) | (2, 3) => offdiag(model, kind, &Assembly::new(right, left, z)),
        (1, 3) => corner(model, kind, &Assembly::new(left, right, z)),
        (3, 1) => corner(model, kind, &Assembly::new(right, left, z)),
        (s, _) => diagonal(model, s, left, right, z),
    }
}

fn finish(kind: FFKind, branch: Branch, prefactor: Complex64, m: &DenseComplexMatrix, sign: f64) -> FFEvaluation {
    let det = m.det();
    FFEvaluation { kind, value: sign * prefactor * det, branch, prefactor, det, condition: m.condition_1() }
}

fn offdiag(model: &ModelFunctions, kind: FFKind, asm: &Assembly) -> Result<FFEvaluation> {
    let pre = prefactor_h(model.kernel(), asm)?;
    let m = DenseComplexMatrix::from_rows(&n_rows(model, asm, &asm.columns())?);
    Ok(finish(kind, Branch::OffDiagonal, pre, &m, 1.0))
}

fn corner(model: &ModelFunctions, kind: FFKind, asm: &Assembly) -> Result<FFEvaluation> {
    let pre = prefactor_h(model.kernel(), asm)?;
    let mut rows = n_rows(model, asm, &asm.columns())?;
    rows.push(diag::y_row_13(model, asm)?);
    let m = DenseComplexMatrix::from_rows(&rows);
    let sign = if asm.vc.len().is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(finish(kind, Branch::Corner, pre, &m, sign))
}

fn diagonal(model: &ModelFunctions, s: usize, left: &RootConfig, right: &RootConfig, z: Complex64) -> Result<FFEvaluation> {
    let kind = FFKind::new(s, s)?;
    let sign = if right.b().is_multiple_of(2) { 1.0 } else { -1.0 };
    let distance = left.multiset_distance(right);
    if distance < SAME_STATE_TOL {
        let asm = Assembly::new(left, left, z);
        let pre = prefactor_h(model.kernel(), &asm)?;
        let m = diag::diag_matrix_same(model, s, left, z)?;
        Ok(finish(kind, Branch::SameState, pre, &m, sign))
    } else if distance <= NEAR_DEGENERATE_TOL {
        Err(Error::NearDegenerate { distance })
    } else {
        let asm = Assembly::new(left, right, z);
        let pre = prefactor_h(model.kernel(), &asm)?;
        let m = diag::diag_matrix_distinct(model, s, &asm)?;
        Ok(finish(kind, Branch::DistinctStates, pre, &m, sign))
    }
}

/// `T12` or `T32` between `left` and `right`; `T21`, `T23` through the
/// exchanged assembly.
pub fn ff_offdiag(model: &ModelFunctions, kind: FFKind, left: &RootConfig, right: &RootConfig, z: Complex64) -> Result<Complex64> {
    if kind.is_diagonal() || matches!(kind.pair(), (1, 3) | (3, 1)) {
        return Err(Error::Invalid(format!("{kind} is not handled by the off-diagonal representation")));
    }
    form_factor(model, kind, left, right, z)
}

/// `T_ss` between states of equal sectors.
pub fn ff_diag(model: &ModelFunctions, s: usize, left: &RootConfig, right: &RootConfig, z: Complex64) -> Result<Complex64> {
    form_factor(model, FFKind::new(s, s)?, left, right, z)
}

pub fn ff_13(model: &ModelFunctions, left: &RootConfig, right: &RootConfig, z: Complex64) -> Result<Complex64> {
    form_factor(model, FFKind { i: 1, j: 3 }, left, right, z)
}

pub fn ff_31(model: &ModelFunctions, left: &RootConfig, right: &RootConfig, z: Complex64) -> Result<Complex64> {
    form_factor(model, FFKind { i: 3, j: 1 }, left, right, z)
}

/// `H_{a,b} = h(w̄,ū) h(v̄,w̄)/h(v̄,ū) Δ'(ū) Δ'(v̄) Δ(w̄)` with `w̄ = {ū, v̄}`.
pub fn norm_prefactor(model: &ModelFunctions, roots: &RootConfig) -> Result<Complex64> {
    let asm = Assembly::new(roots, roots, Complex64::new(0.0, 0.0));
    prefactor_with_columns(model.kernel(), &asm, &roots.flat())
}

/// Squared norm `<B|B> = H_{a,b} det G` of an on-shell state.
pub fn norm_squared(model: &ModelFunctions, roots: &RootConfig) -> Result<Complex64> {
    Ok(norm_prefactor(model, roots)? * model.gaudin_matrix(roots)?.det())
}
