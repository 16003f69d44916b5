//! The generalized GL(3) model: vacuum-eigenvalue ratios `r1`, `r3`, transfer
//! matrix eigenvalues, Bethe equations and the Gaudin matrix.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{finite, Func, Kernel};
use crate::linalg::DenseComplexMatrix;

pub type ScalarFn = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

/// Free functional parameters of the model together with the coupling.
///
/// The logarithmic derivatives are supplied analytically; the Gaudin
/// diagonal depends on them directly.
#[derive(Clone)]
pub struct ModelFunctions {
    kernel: Kernel,
    r1: ScalarFn,
    r3: ScalarFn,
    dlog_r1: ScalarFn,
    dlog_r3: ScalarFn,
    sites: Option<Arc<[Complex64]>>,
    description: String,
}

impl fmt::Debug for ModelFunctions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelFunctions")
            .field("c", &self.kernel.c())
            .field("description", &self.description)
            .finish()
    }
}

impl ModelFunctions {
    pub fn new(
        c: Complex64,
        r1: ScalarFn,
        r3: ScalarFn,
        dlog_r1: ScalarFn,
        dlog_r3: ScalarFn,
        description: impl Into<String>,
    ) -> Result<Self> {
        Ok(ModelFunctions { kernel: Kernel::new(c)?, r1, r3, dlog_r1, dlog_r3, sites: None, description: description.into() })
    }

    /// Inhomogeneous SU(3) XXX chain with vacuum `|1...1>`:
    /// `r1(w) = ∏_k f(w, ξ_k)`, `r3 = 1`.
    pub fn xxx_chain(xi: &[Complex64], c: Complex64) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::Invalid("chain needs at least one site".into()));
        }
        let kernel = Kernel::new(c)?;
        for &x in xi {
            finite(x)?;
        }
        let xs: Arc<[Complex64]> = xi.into();
        let r1 = {
            let xs = xs.clone();
            Arc::new(move |w: Complex64| kernel.prod(Func::F, &[w], &xs)) as ScalarFn
        };
        let dlog_r1 = {
            let xs = xs.clone();
            Arc::new(move |w: Complex64| {
                let tol = kernel.t_coll();
                let mut acc = Complex64::new(0.0, 0.0);
                for &x in xs.iter() {
                    let d = w - x;
                    if d.norm() <= tol || (d + c).norm() <= tol {
                        return Err(Error::Pole { what: "(log r1)'", lhs: w, rhs: x });
                    }
                    acc += 1.0 / (d + c) - 1.0 / d;
                }
                Ok(acc)
            }) as ScalarFn
        };
        let one = Arc::new(|_: Complex64| Ok(Complex64::new(1.0, 0.0))) as ScalarFn;
        let zero = Arc::new(|_: Complex64| Ok(Complex64::new(0.0, 0.0))) as ScalarFn;
        Ok(ModelFunctions {
            kernel,
            r1,
            r3: one,
            dlog_r1,
            dlog_r3: zero,
            sites: Some(xs),
            description: format!("xxx chain, L={}, c={}", xi.len(), c),
        })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn c(&self) -> Complex64 {
        self.kernel.c()
    }

    /// Site parameters when the model is a chain; only used to place
    /// solver seeds.
    pub fn sites(&self) -> Option<&[Complex64]> {
        self.sites.as_deref()
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn r1(&self, w: Complex64) -> Result<Complex64> {
        finite((self.r1)(w)?)
    }

    pub fn r3(&self, w: Complex64) -> Result<Complex64> {
        finite((self.r3)(w)?)
    }

    pub fn dlog_r1(&self, w: Complex64) -> Result<Complex64> {
        finite((self.dlog_r1)(w)?)
    }

    pub fn dlog_r3(&self, w: Complex64) -> Result<Complex64> {
        finite((self.dlog_r3)(w)?)
    }

    /// The model seen by twisted on-shell vectors: `r_k -> r_k κ_k/κ_2`.
    pub fn twisted(&self, twist: &Twist) -> Self {
        if twist.is_identity() {
            return self.clone();
        }
        let s1 = twist.k1 / twist.k2;
        let s3 = twist.k3 / twist.k2;
        let r1 = self.r1.clone();
        let r3 = self.r3.clone();
        ModelFunctions {
            kernel: self.kernel,
            r1: Arc::new(move |w| Ok(r1(w)? * s1)),
            r3: Arc::new(move |w| Ok(r3(w)? * s3)),
            dlog_r1: self.dlog_r1.clone(),
            dlog_r3: self.dlog_r3.clone(),
            sites: self.sites.clone(),
            description: format!("{} twisted by {:?}", self.description, twist),
        }
    }

    /// Image under `T_ij(u) -> T_{4-j,4-i}(-u)`: `r1'(w) = r3(-w)`,
    /// `r3'(w) = r1(-w)`.
    pub fn reflected(&self) -> Self {
        let (r1, r3) = (self.r1.clone(), self.r3.clone());
        let (d1, d3) = (self.dlog_r1.clone(), self.dlog_r3.clone());
        ModelFunctions {
            kernel: self.kernel,
            r1: Arc::new(move |w| r3(-w)),
            r3: Arc::new(move |w| r1(-w)),
            dlog_r1: Arc::new(move |w| Ok(-d3(-w)?)),
            dlog_r3: Arc::new(move |w| Ok(-d1(-w)?)),
            sites: self.sites.as_ref().map(|xs| xs.iter().map(|x| -x).collect()),
            description: format!("{} reflected", self.description),
        }
    }

    /// `τ(w|ū,v̄) = r1(w) f(ū,w) + f(w,ū) f(v̄,w) + r3(w) f(w,v̄)`.
    pub fn tau(&self, w: Complex64, roots: &RootConfig) -> Result<Complex64> {
        let [a, b, c] = self.tau_terms(w, roots)?;
        Ok(a + b + c)
    }

    /// `τ_κ(w) = κ1 r1 f(ū,w) + κ2 f(w,ū) f(v̄,w) + κ3 r3 f(w,v̄)`.
    pub fn tau_twisted(&self, w: Complex64, roots: &RootConfig, twist: &Twist) -> Result<Complex64> {
        let [a, b, c] = self.tau_terms(w, roots)?;
        Ok(twist.k1 * a + twist.k2 * b + twist.k3 * c)
    }

    /// `∂τ_κ/∂κ_s` at `κ = 1`: the s-th summand of τ.
    pub fn dtau_dkappa(&self, s: usize, w: Complex64, roots: &RootConfig) -> Result<Complex64> {
        if !(1..=3).contains(&s) {
            return Err(Error::Invalid(format!("kappa index {s} outside 1..=3")));
        }
        Ok(self.tau_terms(w, roots)?[s - 1])
    }

    /// Gradient of `τ_κ(w|ū,v̄)` with respect to the roots `(ū, v̄)` at fixed
    /// `w` and `κ`, from `∂_u f(u,w) = -c/(u-w)^2` and `∂_u f(w,u) = c/(w-u)^2`.
    pub fn tau_root_gradient(&self, w: Complex64, roots: &RootConfig, twist: &Twist) -> Result<Vec<Complex64>> {
        let k = &self.kernel;
        let c = self.c();
        let (u, v) = (&roots.u[..], &roots.v[..]);
        // c/(x-w)^2 = g(x,w)^2/c
        let r1 = self.r1(w)? * twist.k1;
        let r3 = self.r3(w)? * twist.k3;
        let fvw = k.prod(Func::F, v, &[w])?;
        let fwu = k.prod(Func::F, &[w], u)?;
        let mut out = Vec::with_capacity(u.len() + v.len());
        for j in 0..u.len() {
            let d2 = k.g(u[j], w)?.powi(2) / c;
            let first = -r1 * k.prod_excluding_rev(Func::F, u, j, w)? * d2;
            let second = twist.k2 * k.prod_excluding(Func::F, w, u, j)? * fvw * d2;
            out.push(first + second);
        }
        for j in 0..v.len() {
            let d2 = k.g(v[j], w)?.powi(2) / c;
            let first = -twist.k2 * fwu * k.prod_excluding_rev(Func::F, v, j, w)? * d2;
            let second = r3 * k.prod_excluding(Func::F, w, v, j)? * d2;
            out.push(first + second);
        }
        Ok(out)
    }

    /// Derivative of the twisted eigenvalue along the family of on-shell
    /// states, `dτ_κ/dκ_s`, with the roots following the twist. The root
    /// velocities solve `J dx = ∂(base)/∂κ_s` with `J` the Jacobian of Φ.
    pub fn dtau_dkappa_on_shell(&self, s: usize, w: Complex64, roots: &RootConfig, twist: &Twist) -> Result<Complex64> {
        if !(1..=3).contains(&s) {
            return Err(Error::Invalid(format!("kappa index {s} outside 1..=3")));
        }
        let [t1, t2, t3] = self.tau_terms(w, roots)?;
        let explicit = [t1, t2, t3][s - 1];
        if roots.a() + roots.b() == 0 {
            return Ok(explicit);
        }
        let k = twist.as_array();
        let du = if s == 2 { 1.0 / k[1] } else if s == 1 { -1.0 / k[0] } else { Complex64::new(0.0, 0.0) };
        let dv = if s == 2 { 1.0 / k[1] } else if s == 3 { -1.0 / k[2] } else { Complex64::new(0.0, 0.0) };
        let rhs: Vec<Complex64> = std::iter::repeat_n(du, roots.a()).chain(std::iter::repeat_n(dv, roots.b())).collect();
        let g = self.gaudin_matrix(roots)?;
        let a = roots.a();
        let c = self.c();
        let jac = DenseComplexMatrix::from_fn(g.dim(), |j, l| if l < a { -g[(j, l)] / c } else { g[(j, l)] / c });
        let dx = jac.solve(&rhs).ok_or(Error::JacobianSingular)?;
        let grad = self.tau_root_gradient(w, roots, twist)?;
        Ok(explicit + grad.iter().zip(&dx).map(|(g, d)| g * d).sum::<Complex64>())
    }

    fn tau_terms(&self, w: Complex64, roots: &RootConfig) -> Result<[Complex64; 3]> {
        let k = &self.kernel;
        let (u, v) = (&roots.u[..], &roots.v[..]);
        let t1 = self.r1(w)? * k.prod(Func::F, u, &[w])?;
        let t2 = k.prod(Func::F, &[w], u)? * k.prod(Func::F, v, &[w])?;
        let t3 = self.r3(w)? * k.prod(Func::F, &[w], v)?;
        Ok([t1, t2, t3])
    }

    /// τ at a point that may sit on a root of an on-shell state, taken as the
    /// symmetric two-point limit with step `1e-5 max(1,|c|)`.
    pub fn tau_limit(&self, w: Complex64, roots: &RootConfig) -> Result<Complex64> {
        match self.tau(w, roots) {
            Err(Error::Pole { .. }) => {
                let eps = 1e-5 * self.c().norm().max(1.0);
                let p = self.tau(w + eps, roots)?;
                let m = self.tau(w - eps, roots)?;
                Ok((p + m) * 0.5)
            }
            other => other,
        }
    }

    /// Multiplicative defect of the (twisted) Bethe equations, length a+b.
    /// Zero on shell.
    pub fn bethe_defect(&self, roots: &RootConfig, twist: &Twist) -> Result<Vec<Complex64>> {
        let k = &self.kernel;
        let (u, v) = (&roots.u[..], &roots.v[..]);
        let s1 = twist.k1 / twist.k2;
        let s3 = twist.k3 / twist.k2;
        let mut out = Vec::with_capacity(u.len() + v.len());
        for (j, &uj) in u.iter().enumerate() {
            let num = s1 * self.r1(uj)? * k.prod_excluding_rev(Func::F, u, j, uj)?;
            let den = k.prod_excluding(Func::F, uj, u, j)? * k.prod(Func::F, v, &[uj])?;
            out.push(num / den - 1.0);
        }
        for (j, &vj) in v.iter().enumerate() {
            let num = s3 * self.r3(vj)? * k.prod_excluding(Func::F, vj, v, j)?;
            let den = k.prod_excluding_rev(Func::F, v, j, vj)? * k.prod(Func::F, &[vj], u)?;
            out.push(num / den - 1.0);
        }
        Ok(out)
    }

    /// Logarithmic Bethe functions Φ_j on the principal branch, length a+b.
    pub fn phi_log(&self, roots: &RootConfig) -> Result<Vec<Complex64>> {
        let k = &self.kernel;
        let (u, v) = (&roots.u[..], &roots.v[..]);
        let tol = k.t_coll();
        let log = |z: Complex64| -> Result<Complex64> {
            if z.norm() <= tol {
                Err(Error::ZeroArg(z))
            } else {
                Ok(z.ln())
            }
        };
        let mut out = Vec::with_capacity(u.len() + v.len());
        for (j, &uj) in u.iter().enumerate() {
            let ratio = k.prod_excluding(Func::F, uj, u, j)? / k.prod_excluding_rev(Func::F, u, j, uj)?;
            out.push(log(self.r1(uj)?)? - log(ratio)? - log(k.prod(Func::F, v, &[uj])?)?);
        }
        for (j, &vj) in v.iter().enumerate() {
            let ratio = k.prod_excluding_rev(Func::F, v, j, vj)? / k.prod_excluding(Func::F, vj, v, j)?;
            out.push(log(self.r3(vj)?)? - log(ratio)? - log(k.prod(Func::F, &[vj], u)?)?);
        }
        Ok(out)
    }

    /// Right-hand sides `log κ2 - log κ1` (u-equations) and
    /// `log κ2 - log κ3` (v-equations) without the 2πi mode shifts.
    pub fn phi_base(roots: &RootConfig, twist: &Twist) -> Vec<Complex64> {
        let bu = twist.k2.ln() - twist.k1.ln();
        let bv = twist.k2.ln() - twist.k3.ln();
        std::iter::repeat_n(bu, roots.u.len())
            .chain(std::iter::repeat_n(bv, roots.v.len()))
            .collect()
    }

    /// Residuals `Φ_j - base_j` folded into the strip `Im ∈ (-π, π]`, plus the
    /// mode numbers absorbed by the folding.
    pub fn phi_residual(&self, roots: &RootConfig, twist: &Twist) -> Result<(Vec<Complex64>, Vec<i64>)> {
        let phi = self.phi_log(roots)?;
        let base = Self::phi_base(roots, twist);
        let mut res = Vec::with_capacity(phi.len());
        let mut modes = Vec::with_capacity(phi.len());
        for (p, b) in phi.iter().zip(&base) {
            let d = p - b;
            let m = (d.im / (2.0 * PI)).round();
            res.push(Complex64::new(d.re, d.im - 2.0 * PI * m));
            modes.push(m as i64);
        }
        Ok((res, modes))
    }

    /// The Gaudin matrix (Jacobian of Φ scaled by `-c` on u-columns and `+c`
    /// on v-columns). Valid off shell as well.
    pub fn gaudin_matrix(&self, roots: &RootConfig) -> Result<DenseComplexMatrix> {
        let k = &self.kernel;
        let c = self.c();
        let (u, v) = (&roots.u[..], &roots.v[..]);
        let (a, b) = (u.len(), v.len());
        k.check_distinct(u)?;
        k.check_distinct(v)?;
        let tol = k.t_coll();
        let pair = |x: Complex64, y: Complex64| -> Result<Complex64> {
            let d = x - y;
            let den = d * d - c * c;
            if den.norm() <= tol * c.norm().max(1.0) {
                return Err(Error::Pole { what: "2c^2/(x^2-c^2)", lhs: x, rhs: y });
            }
            Ok(2.0 * c * c / den)
        };
        let mut m = DenseComplexMatrix::zeros(a + b);
        for j in 0..a {
            let mut diag = -c * self.dlog_r1(u[j])?;
            for l in 0..a {
                if l != j {
                    diag -= pair(u[j], u[l])?;
                }
            }
            for &vm in v {
                diag += k.t(vm, u[j])?;
            }
            m[(j, j)] = diag;
            for l in 0..a {
                if l != j {
                    m[(j, l)] = pair(u[j], u[l])?;
                }
            }
            for (l, &vl) in v.iter().enumerate() {
                let t = k.t(vl, u[j])?;
                m[(j, a + l)] = t;
                m[(a + l, j)] = t;
            }
        }
        for j in 0..b {
            let mut diag = c * self.dlog_r3(v[j])?;
            for m_ in 0..b {
                if m_ != j {
                    diag -= pair(v[j], v[m_])?;
                }
            }
            for &ul in u {
                diag += k.t(v[j], ul)?;
            }
            m[(a + j, a + j)] = diag;
            for l in 0..b {
                if l != j {
                    m[(a + j, a + l)] = pair(v[j], v[l])?;
                }
            }
        }
        Ok(m)
    }
}

/// Diagonal twist `diag(κ1, κ2, κ3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Twist {
    pub k1: Complex64,
    pub k2: Complex64,
    pub k3: Complex64,
}

impl Twist {
    pub fn new(k1: Complex64, k2: Complex64, k3: Complex64) -> Result<Self> {
        for k in [k1, k2, k3] {
            finite(k)?;
            if k.norm() == 0.0 {
                return Err(Error::Invalid("twist entries must be nonzero".into()));
            }
        }
        Ok(Twist { k1, k2, k3 })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Twist { k1: one, k2: one, k3: one }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn as_array(&self) -> [Complex64; 3] {
        [self.k1, self.k2, self.k3]
    }

    /// Point `(1-s) self + s other` on the straight segment between twists.
    pub fn lerp(&self, other: &Twist, s: f64) -> Twist {
        Twist {
            k1: self.k1 * (1.0 - s) + other.k1 * s,
            k2: self.k2 * (1.0 - s) + other.k2 * s,
            k3: self.k3 * (1.0 - s) + other.k3 * s,
        }
    }
}

impl Default for Twist {
    fn default() -> Self {
        Self::identity()
    }
}

/// Bethe roots: `u` of size a and `v` of size b.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RootConfig {
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

impl RootConfig {
    pub fn new(u: Vec<Complex64>, v: Vec<Complex64>) -> Self {
        RootConfig { u, v }
    }

    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn a(&self) -> usize {
        self.u.len()
    }

    pub fn b(&self) -> usize {
        self.v.len()
    }

    pub fn flat(&self) -> Vec<Complex64> {
        self.u.iter().chain(&self.v).copied().collect()
    }

    pub fn from_flat(a: usize, xs: &[Complex64]) -> Self {
        RootConfig { u: xs[..a].to_vec(), v: xs[a..].to_vec() }
    }

    /// Image under the reflection `(ū, v̄) -> (-v̄, -ū)`.
    pub fn reflected(&self) -> Self {
        RootConfig { u: self.v.iter().map(|x| -x).collect(), v: self.u.iter().map(|x| -x).collect() }
    }

    /// Distance between the root sets taken as unordered multisets: the
    /// smallest over matchings of the largest pairwise gap. Infinite when the
    /// sector sizes differ.
    pub fn multiset_distance(&self, other: &RootConfig) -> f64 {
        if self.a() != other.a() || self.b() != other.b() {
            return f64::INFINITY;
        }
        set_distance(&self.u, &other.u).max(set_distance(&self.v, &other.v))
    }
}

fn set_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    fn go(x: &[Complex64], y: &mut Vec<Complex64>, best: &mut f64, cur: f64) {
        if cur >= *best {
            return;
        }
        match x.split_first() {
            None => *best = cur,
            Some((&head, rest)) => {
                for i in 0..y.len() {
                    let cand = y.swap_remove(i);
                    go(rest, y, best, cur.max((head - cand).norm()));
                    y.push(cand);
                    let last = y.len() - 1;
                    y.swap(i, last);
                }
            }
        }
    }
    let mut best = f64::INFINITY;
    go(x, &mut y.to_vec(), &mut best, 0.0);
    best
}

/// An on-shell (possibly twisted) state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheState {
    pub roots: RootConfig,
    #[serde(default)]
    pub twist: Twist,
    #[serde(default)]
    pub mode_numbers: Vec<i64>,
    #[serde(default)]
    pub residual: f64,
}

impl BetheState {
    pub fn vacuum() -> Self {
        BetheState { roots: RootConfig::vacuum(), twist: Twist::identity(), mode_numbers: vec![], residual: 0.0 }
    }

    /// Wraps roots that are already known to be on shell, filling in the
    /// residual and mode numbers.
    pub fn from_roots(model: &ModelFunctions, roots: RootConfig, twist: Twist) -> Result<Self> {
        let (res, modes) = model.phi_residual(&roots, &twist)?;
        let residual = res.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(BetheState { roots, twist, mode_numbers: modes, residual })
    }
}
