//! Damped Newton iteration for the logarithmic (twisted) Bethe equations.
//!
//! The unknowns are the flat root vector `(ū, v̄)`. The Jacobian of `Φ` is the
//! Gaudin matrix with its u-columns divided by `-c` and its v-columns by `c`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::DenseComplexMatrix;
use crate::model::{BetheState, ModelFunctions, RootConfig, Twist};

pub const DEFAULT_TOL: f64 = 1e-12;
const REFINE_STEPS: usize = 2;
pub const DEFAULT_MAX_ITER: usize = 100;
const MAX_HALVINGS: usize = 30;
/// Relative gap below which two roots (or a root and a shifted root) count
/// as collided in an accepted solution.
const COLLISION_GUARD: f64 = 1e-8;

/// How the iteration is started.
#[derive(Debug, Clone, PartialEq)]
pub enum Seed {
    /// Start from explicit roots; the branch is whatever Newton lands on.
    Roots(RootConfig),
    /// Require these mode numbers (length a+b); starting points come from the
    /// seed generator driven by `rng_seed`.
    Modes { modes: Vec<i64>, rng_seed: u64, attempts: usize },
}

#[derive(Debug, Clone)]
pub struct SolveRequest {
    pub model: ModelFunctions,
    pub a: usize,
    pub b: usize,
    pub twist: Twist,
    pub seed: Seed,
    pub max_iter: usize,
    pub tol: f64,
}

impl SolveRequest {
    pub fn from_roots(model: ModelFunctions, roots: RootConfig, twist: Twist) -> Self {
        SolveRequest {
            model,
            a: roots.a(),
            b: roots.b(),
            twist,
            seed: Seed::Roots(roots),
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.a + self.b == 0 {
            return Err(Error::Invalid("a + b must be at least 1".into()));
        }
        if self.b > self.a {
            return Err(Error::SectorMismatch(format!("b = {} exceeds a = {}", self.b, self.a)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Invalid("tolerance must be positive".into()));
        }
        match &self.seed {
            Seed::Roots(r) if r.a() != self.a || r.b() != self.b => {
                Err(Error::Invalid(format!("seed roots have sizes ({},{}), expected ({},{})", r.a(), r.b(), self.a, self.b)))
            }
            Seed::Modes { modes, .. } if modes.len() != self.a + self.b => {
                Err(Error::Invalid(format!("{} mode numbers given, expected {}", modes.len(), self.a + self.b)))
            }
            _ => Ok(()),
        }
    }
}

/// Solves one request. With explicit roots a single Newton run is made; with
/// mode numbers the generated seeds are tried in order until one converges
/// onto the requested branch.
pub fn solve_bethe(req: &SolveRequest) -> Result<BetheState> {
    req.validate()?;
    match &req.seed {
        Seed::Roots(r) => newton(&req.model, req.a, &req.twist, r.flat(), None, req.max_iter, req.tol),
        Seed::Modes { modes, rng_seed, attempts } => {
            let seeds = seed_roots(&req.model, req.a, req.b, *attempts.max(&1), *rng_seed);
            let mut last = Error::NoConvergence { iterations: 0, residual: f64::INFINITY };
            for x0 in seeds {
                match newton(&req.model, req.a, &req.twist, x0, Some(modes), req.max_iter, req.tol) {
                    Ok(s) if s.mode_numbers == *modes => return Ok(s),
                    Ok(_) => {}
                    Err(e) => last = e,
                }
            }
            Err(last)
        }
    }
}

/// Newton Jacobian `∂Φ/∂(ū,v̄)` recovered from the Gaudin matrix.
pub fn phi_jacobian(model: &ModelFunctions, roots: &RootConfig) -> Result<DenseComplexMatrix> {
    let g = model.gaudin_matrix(roots)?;
    let a = roots.a();
    let c = model.c();
    Ok(DenseComplexMatrix::from_fn(g.dim(), |j, k| if k < a { -g[(j, k)] / c } else { g[(j, k)] / c }))
}

fn residual(model: &ModelFunctions, a: usize, twist: &Twist, x: &[Complex64], modes: Option<&[i64]>) -> Result<Vec<Complex64>> {
    let roots = RootConfig::from_flat(a, x);
    match modes {
        None => Ok(model.phi_residual(&roots, twist)?.0),
        Some(m) => {
            let phi = model.phi_log(&roots)?;
            let base = ModelFunctions::phi_base(&roots, twist);
            Ok(phi
                .iter()
                .zip(&base)
                .zip(m)
                .map(|((p, b), &k)| p - b - Complex64::new(0.0, 2.0 * PI * k as f64))
                .collect())
        }
    }
}

fn norm2(r: &[Complex64]) -> f64 {
    r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn max_abs(r: &[Complex64]) -> f64 {
    r.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn is_collision(e: &Error) -> bool {
    matches!(e, Error::Pole { .. } | Error::ZeroArg(_))
}

/// Rejects solutions with coinciding roots, roots at distance `c` within a
/// level, or a v-root on top of (or `c` below) a u-root.
fn check_admissible(roots: &RootConfig, c: Complex64) -> Result<()> {
    let guard = COLLISION_GUARD * c.norm().max(1.0);
    let close = |x: Complex64, y: Complex64| (x - y).norm() <= guard;
    for set in [&roots.u, &roots.v] {
        for j in 0..set.len() {
            for k in j + 1..set.len() {
                let (x, y) = (set[j], set[k]);
                if close(x, y) || close(x, y + c) || close(x, y - c) {
                    return Err(Error::Collision(format!("{x} and {y}")));
                }
            }
        }
    }
    for &v in &roots.v {
        for &u in &roots.u {
            if close(v, u) || close(v, u - c) {
                return Err(Error::Collision(format!("v = {v} against u = {u}")));
            }
        }
    }
    Ok(())
}

fn newton(
    model: &ModelFunctions,
    a: usize,
    twist: &Twist,
    mut x: Vec<Complex64>,
    modes: Option<&[i64]>,
    max_iter: usize,
    tol: f64,
) -> Result<BetheState> {
    let blowup = 1e6 * model.c().norm().max(1.0);
    let mut r = residual(model, a, twist, &x, modes).map_err(|e| {
        if is_collision(&e) {
            Error::Collision(e.to_string())
        } else {
            e
        }
    })?;
    for _ in 0..max_iter {
        if max_abs(&r) <= tol {
            refine(model, a, twist, &mut x, &mut r, modes);
            let roots = RootConfig::from_flat(a, &x);
            check_admissible(&roots, model.c())?;
            let mut state = BetheState::from_roots(model, roots, *twist)?;
            state.residual = max_abs(&r);
            return Ok(state);
        }
        let jac = phi_jacobian(model, &RootConfig::from_flat(a, &x)).map_err(|e| Error::Collision(e.to_string()))?;
        let rhs: Vec<Complex64> = r.iter().map(|z| -z).collect();
        let step = jac.solve(&rhs).ok_or(Error::JacobianSingular)?;
        if step.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::JacobianSingular);
        }
        let r0 = norm2(&r);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<Complex64> = x.iter().zip(&step).map(|(xi, si)| xi + si * lambda).collect();
            if let Ok(rt) = residual(model, a, twist, &trial, modes) {
                if norm2(&rt) < r0 {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((xn, rn)) => {
                x = xn;
                r = rn;
            }
            None => break,
        }
        if x.iter().any(|z| z.norm() > blowup) {
            break;
        }
    }
    if max_abs(&r) <= tol {
        let roots = RootConfig::from_flat(a, &x);
        check_admissible(&roots, model.c())?;
        let mut state = BetheState::from_roots(model, roots, *twist)?;
        state.residual = max_abs(&r);
        return Ok(state);
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: max_abs(&r) })
}

/// Extra full Newton steps past the tolerance, kept while they lower the
/// residual. Quadratic convergence takes a 1e-12 residual to rounding level.
fn refine(model: &ModelFunctions, a: usize, twist: &Twist, x: &mut Vec<Complex64>, r: &mut Vec<Complex64>, modes: Option<&[i64]>) {
    for _ in 0..REFINE_STEPS {
        let Ok(jac) = phi_jacobian(model, &RootConfig::from_flat(a, x)) else { return };
        let rhs: Vec<Complex64> = r.iter().map(|z| -z).collect();
        let Some(step) = jac.solve(&rhs) else { return };
        let trial: Vec<Complex64> = x.iter().zip(&step).map(|(xi, si)| xi + si).collect();
        match residual(model, a, twist, &trial, modes) {
            Ok(rt) if norm2(&rt) < norm2(r) => {
                *x = trial;
                *r = rt;
            }
            _ => return,
        }
    }
}

/// Polishes an already converged state at a new tolerance.
pub fn polish(model: &ModelFunctions, state: &BetheState, tol: f64) -> Result<BetheState> {
    newton(model, state.roots.a(), &state.twist, state.roots.flat(), None, DEFAULT_MAX_ITER, tol)
}

/// Moves an on-shell state along the straight segment from its own twist to
/// `target` in `steps` equal steps, re-solving at every intermediate twist.
/// Failed steps are subdivided up to four times.
pub fn continue_in_twist(model: &ModelFunctions, state: &BetheState, target: &Twist, steps: usize) -> Result<BetheState> {
    if state.twist == *target {
        return Ok(state.clone());
    }
    let steps = steps.max(1);
    let a = state.roots.a();
    let source = state.twist;
    let mut x = state.roots.flat();
    let mut cur = state.clone();
    for step in 1..=steps {
        let s0 = (step - 1) as f64 / steps as f64;
        let s1 = step as f64 / steps as f64;
        cur = advance(model, a, &source, target, &x, s0, s1, 0).map_err(|e| match e {
            Error::Collision(_) | Error::Pole { .. } | Error::ZeroArg(_) => Error::PathCollision { step },
            other => other,
        })?;
        x = cur.roots.flat();
    }
    Ok(cur)
}

#[allow(clippy::too_many_arguments)]
fn advance(
    model: &ModelFunctions,
    a: usize,
    source: &Twist,
    target: &Twist,
    x: &[Complex64],
    s0: f64,
    s1: f64,
    depth: usize,
) -> Result<BetheState> {
    let tw = source.lerp(target, s1);
    match newton(model, a, &tw, x.to_vec(), None, DEFAULT_MAX_ITER, DEFAULT_TOL) {
        Ok(s) => Ok(s),
        Err(Error::NoConvergence { .. } | Error::JacobianSingular) if depth < 4 => {
            let mid = 0.5 * (s0 + s1);
            let half = advance(model, a, source, target, x, s0, mid, depth + 1)?;
            advance(model, a, source, target, &half.roots.flat(), mid, s1, depth + 1)
        }
        Err(e) => Err(e),
    }
}

/// Starting points for `(a, b)`: products of single-magnon positions, string
/// patterns around the centroid, then uniform draws in a disk. The first two
/// families are deterministic; the draws come from `rng_seed`.
pub fn seed_roots(model: &ModelFunctions, a: usize, b: usize, n_random: usize, rng_seed: u64) -> Vec<Vec<Complex64>> {
    let c = model.c();
    let i = Complex64::new(0.0, 1.0);
    let (center, spread) = model_geometry(model);
    let mut out = Vec::new();

    let v_pattern = |u: &[Complex64]| -> Vec<Complex64> {
        let mean = if u.is_empty() { center } else { u.iter().sum::<Complex64>() / u.len() as f64 };
        (0..b).map(|k| mean - c * 0.5 + c * i * 0.6 * (k as f64 - (b as f64 - 1.0) / 2.0)).collect()
    };

    // single-magnon positions c/(ω-1) for the n-th roots of unity ω ≠ 1
    let n = spread.max(2);
    let magnons: Vec<Complex64> = (1..n)
        .map(|l| {
            let w = Complex64::from_polar(1.0, 2.0 * PI * l as f64 / n as f64);
            center + c / (w - 1.0)
        })
        .collect();
    for combo in combinations(magnons.len(), a).into_iter().take(40) {
        let u: Vec<Complex64> = combo.iter().map(|&j| magnons[j]).collect();
        let mut x = u.clone();
        x.extend(v_pattern(&u));
        out.push(x);
    }

    let string = |m: usize, shift: Complex64| -> Vec<Complex64> {
        (0..m).map(|k| center + shift + c * i * (k as f64 - (m as f64 - 1.0) / 2.0)).collect()
    };
    for shift in [-0.5, -0.25, 0.0] {
        let u = string(a, c * shift);
        let mut x = u.clone();
        x.extend(v_pattern(&u));
        out.push(x);
    }

    let radius = 3.0 * c.norm().max(1.0) * (1.0 + model_radius(model));
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..n_random {
        let x = (0..a + b)
            .map(|_| {
                let r = radius * rng.gen::<f64>().sqrt();
                let th = rng.gen_range(0.0..2.0 * PI);
                center + Complex64::from_polar(r, th)
            })
            .collect();
        out.push(x);
    }
    out
}

/// Site centroid and count; models without sites are centered at the origin
/// with six notional sites.
fn model_geometry(model: &ModelFunctions) -> (Complex64, usize) {
    match model.sites() {
        Some(xs) if !xs.is_empty() => (xs.iter().sum::<Complex64>() / xs.len() as f64, xs.len()),
        _ => (Complex64::new(0.0, 0.0), 6),
    }
}

fn model_radius(model: &ModelFunctions) -> f64 {
    model.sites().map_or(0.0, |xs| xs.iter().map(|x| x.norm()).fold(0.0, f64::max))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            go(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Runs Newton from every generated seed and keeps the distinct converged
/// states (as unordered multisets, tolerance `1e-6`), in discovery order.
pub fn distinct_states(model: &ModelFunctions, a: usize, b: usize, twist: &Twist, n_seeds: usize, rng_seed: u64) -> Vec<BetheState> {
    if a + b == 0 {
        return vec![BetheState { twist: *twist, ..BetheState::vacuum() }];
    }
    if b > a {
        return vec![];
    }
    let mut found: Vec<BetheState> = Vec::new();
    for x0 in seed_roots(model, a, b, n_seeds.max(1), rng_seed) {
        if let Ok(s) = newton(model, a, twist, x0, None, DEFAULT_MAX_ITER, DEFAULT_TOL) {
            if found.iter().all(|f| f.roots.multiset_distance(&s.roots) > 1e-6) {
                found.push(s);
            }
        }
    }
    found
}
