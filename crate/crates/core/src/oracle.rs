//! Brute-force reference for the inhomogeneous SU(3) XXX chain.
//!
//! The Hilbert space is `(C^3)^{⊗L}` with basis index `Σ_k col_k 3^k`
//! (site 1 is the least significant digit, colors 0,1,2 stand for 1,2,3).
//! The monodromy matrix is `T(w) = R_{0L}(w,ξ_L) ··· R_{01}(w,ξ_1)` with
//! `R = I + g P`, so the site-k factor has auxiliary entries
//! `(L_k)_{ab} = δ_ab + g(w,ξ_k) E_k^{ba}`. The vacuum `|1...1>` has
//! `λ1 = ∏ f(w,ξ_k)`, `λ2 = λ3 = 1`.
//!
//! Operators are applied matrix-free; dense matrices are only materialized
//! for weight-sector blocks of the transfer matrix and for the small
//! structural checks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg::DenseComplexMatrix;
use crate::model::{BetheState, ModelFunctions, RootConfig, Twist};

pub const MAX_SITES: usize = 6;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Chain length, inhomogeneities and coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinChainSpec {
    xi: Vec<Complex64>,
    c: Complex64,
}

impl SpinChainSpec {
    pub fn new(xi: Vec<Complex64>, c: Complex64) -> Result<Self> {
        let l = xi.len();
        if l == 0 || l > MAX_SITES {
            return Err(Error::Invalid(format!("chain length {l} outside 1..={MAX_SITES}")));
        }
        let kernel = Kernel::new(c)?;
        let homogeneous = xi.iter().all(|&x| (x - xi[0]).norm() == 0.0);
        if !homogeneous {
            // mixed configurations with nearly coinciding sites are rejected
            for j in 0..l {
                for k in j + 1..l {
                    if (xi[j] - xi[k]).norm() < 1e-6 * kernel.c().norm().max(1.0) {
                        return Err(Error::Invalid(format!(
                            "inhomogeneities {} and {} nearly coincide",
                            xi[j], xi[k]
                        )));
                    }
                }
            }
        }
        Ok(SpinChainSpec { xi, c })
    }

    pub fn homogeneous(l: usize, c: Complex64) -> Result<Self> {
        Self::new(vec![zero(); l], c)
    }

    /// Inhomogeneities drawn uniformly from the disk of radius 0.3.
    pub fn seeded(l: usize, c: Complex64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xi = (0..l)
            .map(|_| {
                let r = 0.3 * rng.gen::<f64>().sqrt();
                let th = rng.gen_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(r, th)
            })
            .collect();
        Self::new(xi, c)
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn xi(&self) -> &[Complex64] {
        &self.xi
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        3usize.pow(self.xi.len() as u32)
    }

    pub fn model(&self) -> ModelFunctions {
        ModelFunctions::xxx_chain(&self.xi, self.c).expect("validated spec")
    }

    fn site_couplings(&self, w: Complex64) -> Result<Vec<Complex64>> {
        let k = Kernel::new(self.c)?;
        self.xi.iter().map(|&x| k.g(w, x)).collect()
    }
}

/// Occupation numbers `(n1, n2, n3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeightSector {
    pub n: [usize; 3],
}

impl WeightSector {
    /// Sector of a state with `a` first-level and `b` second-level roots:
    /// `(L-a, a-b, b)`.
    pub fn of_state(l: usize, a: usize, b: usize) -> Result<Self> {
        if b > a || a > l {
            return Err(Error::SectorMismatch(format!("(a,b)=({a},{b}) is not realizable on {l} sites")));
        }
        Ok(WeightSector { n: [l - a, a - b, b] })
    }

    pub fn contains(&self, l: usize, idx: usize) -> bool {
        colors(l, idx) == self.n
    }

    /// Full-space indices of the basis states in this sector, ascending.
    pub fn basis(&self, l: usize) -> Vec<usize> {
        (0..3usize.pow(l as u32)).filter(|&i| self.contains(l, i)).collect()
    }
}

fn colors(l: usize, mut idx: usize) -> [usize; 3] {
    let mut n = [0; 3];
    for _ in 0..l {
        n[idx % 3] += 1;
        idx /= 3;
    }
    n
}

/// 9x9 matrix `I + g(x,y) P` on `C^3 ⊗ C^3`, basis index `3a + b`.
pub fn r_matrix(x: Complex64, y: Complex64, c: Complex64) -> Result<DenseComplexMatrix> {
    let g = Kernel::new(c)?.g(x, y)?;
    let mut r = DenseComplexMatrix::identity(9);
    for a in 0..3 {
        for b in 0..3 {
            r[(3 * b + a, 3 * a + b)] += g;
        }
    }
    Ok(r)
}

/// `T_{ij}(w) x` for all i at once (0-based `j`): returns `[T_0j x, T_1j x, T_2j x]`.
pub fn apply_column(spec: &SpinChainSpec, j: usize, w: Complex64, x: &[Complex64]) -> Result<[Vec<Complex64>; 3]> {
    let d = spec.dim();
    assert_eq!(x.len(), d);
    let gs = spec.site_couplings(w)?;
    let mut y: [Vec<Complex64>; 3] = [vec![zero(); d], vec![zero(); d], vec![zero(); d]];
    y[j] = x.to_vec();
    let mut stride = 1usize;
    for &g in &gs {
        // Y'_i[r] = Y_i[r] + g Y_{col_k(r)}[r with col_k := i]
        let mut next = y.clone();
        for r in 0..d {
            let ck = (r / stride) % 3;
            let base = r - ck * stride;
            for (i, ni) in next.iter_mut().enumerate() {
                ni[r] += g * y[ck][base + i * stride];
            }
        }
        y = next;
        stride *= 3;
    }
    Ok(y)
}

/// `x^T T_{ij}(w)` for all j at once (0-based `i`).
pub fn apply_row(spec: &SpinChainSpec, i: usize, w: Complex64, x: &[Complex64]) -> Result<[Vec<Complex64>; 3]> {
    let d = spec.dim();
    assert_eq!(x.len(), d);
    let gs = spec.site_couplings(w)?;
    let mut z: [Vec<Complex64>; 3] = [vec![zero(); d], vec![zero(); d], vec![zero(); d]];
    z[i] = x.to_vec();
    let l = gs.len();
    for k in (0..l).rev() {
        let stride = 3usize.pow(k as u32);
        let g = gs[k];
        let mut next = z.clone();
        for r in 0..d {
            let ck = (r / stride) % 3;
            let base = r - ck * stride;
            for (n, zn) in next.iter_mut().enumerate() {
                zn[r] += g * z[ck][base + n * stride];
            }
        }
        z = next;
    }
    Ok(z)
}

/// `T_{ij}(w) x` for 1-based `(i, j)`.
pub fn apply_entry(spec: &SpinChainSpec, i: usize, j: usize, w: Complex64, x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_index(i, j)?;
    let mut col = apply_column(spec, j - 1, w, x)?;
    Ok(std::mem::take(&mut col[i - 1]))
}

fn check_index(i: usize, j: usize) -> Result<()> {
    if !(1..=3).contains(&i) || !(1..=3).contains(&j) {
        return Err(Error::Invalid(format!("monodromy index ({i},{j}) outside 1..=3")));
    }
    Ok(())
}

/// `Σ_i κ_i T_ii(w) x`.
pub fn apply_transfer(spec: &SpinChainSpec, w: Complex64, twist: &Twist, x: &[Complex64]) -> Result<Vec<Complex64>> {
    let k = twist.as_array();
    let mut out = vec![zero(); x.len()];
    for (s, &ks) in k.iter().enumerate() {
        let col = apply_column(spec, s, w, x)?;
        for (o, y) in out.iter_mut().zip(&col[s]) {
            *o += ks * y;
        }
    }
    Ok(out)
}

fn dense_from_action(d: usize, mut act: impl FnMut(&[Complex64]) -> Result<Vec<Complex64>>) -> Result<DenseComplexMatrix> {
    let mut m = DenseComplexMatrix::zeros(d);
    let mut e = vec![zero(); d];
    for col in 0..d {
        e[col] = Complex64::new(1.0, 0.0);
        let y = act(&e)?;
        e[col] = zero();
        for (row, val) in y.into_iter().enumerate() {
            m[(row, col)] = val;
        }
    }
    Ok(m)
}

/// Dense `T_{ij}(w)` on the full space (1-based indices).
pub fn monodromy_entry(i: usize, j: usize, w: Complex64, spec: &SpinChainSpec) -> Result<DenseComplexMatrix> {
    check_index(i, j)?;
    dense_from_action(spec.dim(), |x| apply_entry(spec, i, j, w, x))
}

/// Dense twisted transfer matrix `Σ_i κ_i T_ii(w)` on the full space.
pub fn transfer_matrix(w: Complex64, twist: &Twist, spec: &SpinChainSpec) -> Result<DenseComplexMatrix> {
    dense_from_action(spec.dim(), |x| apply_transfer(spec, w, twist, x))
}

/// Block of the twisted transfer matrix on one weight sector, in the order of
/// [`WeightSector::basis`].
pub fn transfer_block(w: Complex64, twist: &Twist, spec: &SpinChainSpec, basis: &[usize]) -> Result<DenseComplexMatrix> {
    let d = spec.dim();
    let n = basis.len();
    let mut m = DenseComplexMatrix::zeros(n);
    let mut e = vec![zero(); d];
    for (col, &bc) in basis.iter().enumerate() {
        e[bc] = Complex64::new(1.0, 0.0);
        let y = apply_transfer(spec, w, twist, &e)?;
        e[bc] = zero();
        for (row, &br) in basis.iter().enumerate() {
            m[(row, col)] = y[br];
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(x: &mut [Complex64]) {
    let n = norm(x);
    x.iter_mut().for_each(|z| *z /= n);
}

/// Probe point in the disk of radius 2 that keeps a distance from every
/// inhomogeneity and every root.
fn probe_point(rng: &mut ChaCha8Rng, spec: &SpinChainSpec, roots: &RootConfig) -> Complex64 {
    let scale = spec.c.norm().max(1.0);
    loop {
        let w = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)) * scale;
        let far = spec.xi.iter().chain(&roots.u).chain(&roots.v).all(|&p| (w - p).norm() > 0.15 * scale);
        if far {
            return w;
        }
    }
}

/// Tolerance on the relative eigen-residual of extracted vectors.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// Left or right eigenvector of the (twisted) transfer matrix for an on-shell
/// state, embedded in the full space with unit length. Scale and phase are
/// arbitrary.
pub fn eigenvector_for_state(state: &BetheState, side: Side, spec: &SpinChainSpec, seed: u64) -> Result<Vec<Complex64>> {
    let model = spec.model();
    let sector = WeightSector::of_state(spec.len(), state.roots.a(), state.roots.b())?;
    let basis = sector.basis(spec.len());
    let n = basis.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = |w| model.tau_twisted(w, &state.roots, &state.twist);

    for _attempt in 0..5 {
        let w0 = probe_point(&mut rng, spec, &state.roots);
        let mut block = transfer_block(w0, &state.twist, spec, &basis)?;
        if side == Side::Left {
            block = block.transpose();
        }
        let t0 = tau(w0)?;
        let mut x: Vec<Complex64> = if n == 1 {
            vec![Complex64::new(1.0, 0.0)]
        } else {
            let shift = t0 + Complex64::new(0.0, 1e-12 * block.norm_fro().max(1.0));
            let mut shifted = block.clone();
            for i in 0..n {
                shifted[(i, i)] -= shift;
            }
            let lu = shifted.lu();
            let mut x: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            normalize(&mut x);
            for _ in 0..3 {
                match lu.solve(&x) {
                    Some(y) => x = y,
                    None => break,
                }
                normalize(&mut x);
            }
            x
        };
        normalize(&mut x);

        let mut full = vec![zero(); spec.dim()];
        for (&b, &xi) in basis.iter().zip(&x) {
            full[b] = xi;
        }
        let ok = (0..3).all(|_| {
            let w = probe_point(&mut rng, spec, &state.roots);
            match eigen_residual(spec, state, side, w, &full) {
                Ok(r) => r < EIGEN_RESIDUAL_TOL,
                Err(_) => false,
            }
        });
        if ok {
            return Ok(full);
        }
    }
    Err(Error::DegenerateEigenvalue)
}

/// `‖M(w) x - τ(w) x‖ / (|τ(w)| ‖x‖)` for the state's twisted transfer
/// matrix, acting on the right or on the left.
pub fn eigen_residual(spec: &SpinChainSpec, state: &BetheState, side: Side, w: Complex64, x: &[Complex64]) -> Result<f64> {
    let model = spec.model();
    let t = model.tau_twisted(w, &state.roots, &state.twist)?;
    let mx = match side {
        Side::Right => apply_transfer(spec, w, &state.twist, x)?,
        Side::Left => {
            let k = state.twist.as_array();
            let mut out = vec![zero(); x.len()];
            for (s, &ks) in k.iter().enumerate() {
                let row = apply_row(spec, s, w, x)?;
                for (o, y) in out.iter_mut().zip(&row[s]) {
                    *o += ks * y;
                }
            }
            out
        }
    };
    let r: Vec<Complex64> = mx.iter().zip(x).map(|(m, xi)| m - t * xi).collect();
    Ok(norm(&r) / (t.norm().max(f64::MIN_POSITIVE) * norm(x)))
}

/// Rayleigh quotient `x^H M(w) x / x^H x` of the twisted transfer matrix.
pub fn rayleigh(spec: &SpinChainSpec, twist: &Twist, w: Complex64, x: &[Complex64]) -> Result<Complex64> {
    let mx = apply_transfer(spec, w, twist, x)?;
    let num: Complex64 = x.iter().zip(&mx).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = x.iter().map(|a| a.norm_sqr()).sum();
    Ok(num / den)
}

/// Left and right eigenvectors of one on-shell state.
#[derive(Debug, Clone)]
pub struct StateVectors {
    pub state: BetheState,
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
}

impl StateVectors {
    pub fn extract(state: &BetheState, spec: &SpinChainSpec, seed: u64) -> Result<Self> {
        let right = eigenvector_for_state(state, Side::Right, spec, seed)?;
        let left = eigenvector_for_state(state, Side::Left, spec, seed.wrapping_add(0x9e37_79b9))?;
        Ok(StateVectors { state: state.clone(), left, right })
    }

    /// Bilinear pairing `<left|right>`.
    pub fn overlap(&self) -> Complex64 {
        dot(&self.left, &self.right)
    }
}

/// `<L| T_{ij}(z) |R>` for 1-based `(i, j)`, bilinear.
pub fn matrix_element(spec: &SpinChainSpec, kind: (usize, usize), z: Complex64, left: &[Complex64], right: &[Complex64]) -> Result<Complex64> {
    let y = apply_entry(spec, kind.0, kind.1, z, right)?;
    Ok(dot(left, &y))
}

/// Sector sizes `(a', b')` of the left state for a form factor of `T_ij`
/// whose right state has sizes `(a, b)`. `None` when negative.
pub fn shifted_sector(kind: (usize, usize), a: usize, b: usize) -> Option<(usize, usize)> {
    let (i, j) = kind;
    let d = |p: usize, q: usize| usize::from(p == q);
    let a2 = (a + d(i, 1)).checked_sub(d(j, 1))?;
    let b2 = (b + d(j, 3)).checked_sub(d(i, 3))?;
    Some((a2, b2))
}

fn check_kind_sectors(kind: (usize, usize), left: &RootConfig, right: &RootConfig) -> Result<()> {
    check_index(kind.0, kind.1)?;
    match shifted_sector(kind, right.a(), right.b()) {
        Some((a, b)) if a == left.a() && b == left.b() => Ok(()),
        _ => Err(Error::SectorMismatch(format!(
            "T{}{} between left ({},{}) and right ({},{})",
            kind.0,
            kind.1,
            left.a(),
            left.b(),
            right.a(),
            right.b()
        ))),
    }
}

/// `<C|T_{k1}(z1)|B> / <C|T_{k2}(z2)|B>`, invariant under rescaling either
/// vector.
pub fn invariant_ratio_mixed(
    spec: &SpinChainSpec,
    num: ((usize, usize), Complex64),
    den: ((usize, usize), Complex64),
    left: &StateVectors,
    right: &StateVectors,
) -> Result<Complex64> {
    check_kind_sectors(num.0, &left.state.roots, &right.state.roots)?;
    check_kind_sectors(den.0, &left.state.roots, &right.state.roots)?;
    let n = matrix_element(spec, num.0, num.1, &left.left, &right.right)?;
    let d = matrix_element(spec, den.0, den.1, &left.left, &right.right)?;
    if d.norm() <= 1e-13 * n.norm().max(1e-300) || d.norm() == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(n / d)
}

/// `<C|T_ij(z1)|B> / <C|T_ij(z2)|B>`.
pub fn invariant_ratio(
    spec: &SpinChainSpec,
    kind: (usize, usize),
    z1: Complex64,
    z2: Complex64,
    left: &StateVectors,
    right: &StateVectors,
) -> Result<Complex64> {
    invariant_ratio_mixed(spec, (kind, z1), (kind, z2), left, right)
}

/// `<C|T_ij(z1)|B> <B|T_ji(z2)|C> / (<B|B> <C|C>)` with bras taken as left
/// eigenvectors. Invariant under independent rescaling of all four vectors.
pub fn invariant_product(
    spec: &SpinChainSpec,
    kind: (usize, usize),
    z1: Complex64,
    z2: Complex64,
    c_state: &StateVectors,
    b_state: &StateVectors,
) -> Result<Complex64> {
    let rev = (kind.1, kind.0);
    check_kind_sectors(kind, &c_state.state.roots, &b_state.state.roots)?;
    check_kind_sectors(rev, &b_state.state.roots, &c_state.state.roots)?;
    let f1 = matrix_element(spec, kind, z1, &c_state.left, &b_state.right)?;
    let f2 = matrix_element(spec, rev, z2, &b_state.left, &c_state.right)?;
    let den = b_state.overlap() * c_state.overlap();
    if den.norm() < 1e-14 {
        return Err(Error::ZeroDenominator);
    }
    Ok(f1 * f2 / den)
}

/// `<B|T_ss(z)|B> / <B|B>`.
pub fn normalized_expectation(spec: &SpinChainSpec, s: usize, z: Complex64, state: &StateVectors) -> Result<Complex64> {
    let den = state.overlap();
    if den.norm() < 1e-14 {
        return Err(Error::ZeroDenominator);
    }
    Ok(matrix_element(spec, (s, s), z, &state.left, &state.right)? / den)
}

/// `R_ab` acting on factors `a < b` of a three-fold product of `C^3`.
fn embed_pair(r: &DenseComplexMatrix, a: usize, b: usize) -> DenseComplexMatrix {
    let digits = |n: usize| [n / 9, (n / 3) % 3, n % 3];
    let other = 3 - a - b;
    DenseComplexMatrix::from_fn(27, |row, col| {
        let (i, j) = (digits(row), digits(col));
        if i[other] != j[other] {
            zero()
        } else {
            r[(3 * i[a] + i[b], 3 * j[a] + j[b])]
        }
    })
}

/// `max|R12 R13 R23 - R23 R13 R12| / max|R12 R13 R23|` at `(x, y, w)`.
pub fn yang_baxter_residual(x: Complex64, y: Complex64, w: Complex64, c: Complex64) -> Result<f64> {
    let r12 = embed_pair(&r_matrix(x, y, c)?, 0, 1);
    let r13 = embed_pair(&r_matrix(x, w, c)?, 0, 2);
    let r23 = embed_pair(&r_matrix(y, w, c)?, 1, 2);
    let lhs = r12.matmul(&r13).matmul(&r23);
    let rhs = r23.matmul(&r13).matmul(&r12);
    Ok(lhs.sub(&rhs).max_abs() / lhs.max_abs())
}

/// Relative residual of `R12(w1,w2) T1(w1) T2(w2) = T2(w2) T1(w1) R12(w1,w2)`
/// on `C^3 ⊗ C^3 ⊗ H`. Dense, so meant for chains of one or two sites.
pub fn rtt_residual(spec: &SpinChainSpec, w1: Complex64, w2: Complex64) -> Result<f64> {
    let d = spec.dim();
    let entries = |w| -> Result<Vec<DenseComplexMatrix>> {
        let mut out = Vec::with_capacity(9);
        for i in 1..=3 {
            for j in 1..=3 {
                out.push(monodromy_entry(i, j, w, spec)?);
            }
        }
        Ok(out)
    };
    let (ta, tb) = (entries(w1)?, entries(w2)?);
    let rm = r_matrix(w1, w2, spec.c())?;
    let n = 9 * d;
    let idx = |p: usize| (p / (3 * d), (p / d) % 3, p % d);
    let t1 = DenseComplexMatrix::from_fn(n, |p, q| {
        let ((a1, a2, x), (b1, b2, y)) = (idx(p), idx(q));
        if a2 == b2 { ta[3 * a1 + b1][(x, y)] } else { zero() }
    });
    let t2 = DenseComplexMatrix::from_fn(n, |p, q| {
        let ((a1, a2, x), (b1, b2, y)) = (idx(p), idx(q));
        if a1 == b1 { tb[3 * a2 + b2][(x, y)] } else { zero() }
    });
    let r12 = DenseComplexMatrix::from_fn(n, |p, q| {
        let ((a1, a2, x), (b1, b2, y)) = (idx(p), idx(q));
        if x == y { rm[(3 * a1 + a2, 3 * b1 + b2)] } else { zero() }
    });
    let lhs = r12.matmul(&t1).matmul(&t2);
    let rhs = t2.matmul(&t1).matmul(&r12);
    Ok(lhs.sub(&rhs).max_abs() / lhs.max_abs())
}

/// Largest deviation of `T_ij(w)|0>` from `δ_ij λ_i(w)|0>` over `i >= j`,
/// relative to `max(|λ1|, 1)`.
pub fn vacuum_residual(spec: &SpinChainSpec, w: Complex64) -> Result<f64> {
    let mut vac = vec![zero(); spec.dim()];
    vac[0] = Complex64::new(1.0, 0.0);
    let lambda1 = spec.model().r1(w)?;
    let scale = lambda1.norm().max(1.0);
    let mut worst: f64 = 0.0;
    for i in 1..=3 {
        for j in 1..=i {
            let y = apply_entry(spec, i, j, w, &vac)?;
            let expect = match (i, j) {
                (1, 1) => lambda1,
                (2, 2) | (3, 3) => Complex64::new(1.0, 0.0),
                _ => zero(),
            };
            for (n, v) in y.iter().enumerate() {
                let e = if n == 0 { expect } else { zero() };
                worst = worst.max((v - e).norm() / scale);
            }
        }
    }
    Ok(worst)
}
