//! Checks that need no oracle: the summation identities on random sets, the
//! on-shell zeros of the Ω-combination, the two forms of the N entries, the
//! transposition and reflection maps, root-order invariance, and the
//! reduction to rank-one formulas when there are no v-roots.

use gl3ff::formfactor::identities::{appendix_identities, omega_vector, s_function};
use gl3ff::formfactor::matrix::{n_entry, n_entry_dtau_regular, Assembly};
use gl3ff::formfactor::{form_factor, norm_squared};
use gl3ff::{Complex64, DenseComplexMatrix, FFKind, ModelFunctions, RootConfig, Twist};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::{generic_twist, rng, z_points, Catalog};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{digest, rel, Report, Worst};

const STRUCTURAL_ZERO: f64 = 1e-9;

pub fn run(cfg: &RunConfig, report: &mut Report) -> CliResult<()> {
    let spec = cfg.spec()?;
    let model = spec.model();
    let mut r = rng(cfg.rng_seed);
    summation(cfg, &model, &mut r, report)?;

    let config_twist = cfg.twist()?;
    let second = if config_twist.is_identity() { generic_twist() } else { config_twist };
    let sectors = cfg.sectors();
    let cats = [
        Catalog::build("plain", &spec, Twist::identity(), &sectors, cfg.sector.max_states, cfg.sector.seeds, cfg.rng_seed),
        Catalog::build("twisted", &spec, second, &sectors, cfg.sector.max_states, cfg.sector.seeds, cfg.rng_seed),
    ];
    for cat in &cats {
        let tag = format!("[{}]", cat.label);
        s_zeros(cfg, cat, &tag, &mut r, report)?;
        n_forms(cfg, cat, &tag, &mut r, report)?;
        morphisms(cfg, cat, &tag, &mut r, report)?;
        rank_one(cfg, cat, &tag, &mut r, report)?;
    }
    Ok(())
}

fn separated(all: &[Complex64], c: Complex64) -> bool {
    all.iter().enumerate().all(|(i, x)| {
        all[i + 1..].iter().all(|y| (x - y).norm() > 0.05 && (x - y - c).norm() > 0.05 && (x - y + c).norm() > 0.05)
    })
}

fn random_assembly(r: &mut ChaCha8Rng, a: usize, b: usize, c: Complex64) -> Assembly {
    let mut draw = |n: usize| -> Vec<Complex64> { (0..n).map(|_| Complex64::new(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0))).collect() };
    loop {
        let asm = Assembly { uc: draw(a), vc: draw(b), ub: draw(a), vb: draw(b), z: draw(1)[0] };
        let mut all = asm.columns();
        all.extend(&asm.uc);
        all.extend(&asm.vb);
        if separated(&all, c) {
            return asm;
        }
    }
}

fn summation(cfg: &RunConfig, model: &ModelFunctions, r: &mut ChaCha8Rng, report: &mut Report) -> CliResult<()> {
    let mut worst = [Worst::default(), Worst::default(), Worst::default(), Worst::default()];
    let mut inputs = Vec::new();
    for i in 0..cfg.task.draws {
        let asm = random_assembly(r, 1 + i % 3, i % 3, model.c());
        for (w, res) in worst.iter_mut().zip(appendix_identities(model, &asm)?) {
            w.add(res.residual, &[res.lhs, res.rhs]);
        }
        inputs.push(asm);
    }
    let d = digest(&inputs.iter().map(|a| (&a.uc, &a.vc, &a.ub, &a.vb, a.z)).collect::<Vec<_>>());
    let names = ["t(u,z) over u-rows", "t(z,u) over u-rows", "t(v,z) over v-rows", "t(z,v) over v-rows"];
    for (w, name) in worst.into_iter().zip(names) {
        report.push(w.record(format!("summation {name}"), d.clone(), cfg.tol(1e-12)));
    }
    Ok(())
}

fn s_zeros(cfg: &RunConfig, cat: &Catalog, tag: &str, r: &mut ChaCha8Rng, report: &mut Report) -> CliResult<()> {
    let m = &cat.model;
    let mut worst = Worst::default();
    let mut inputs = Vec::new();
    for (left, right) in cat.pairs(FFKind::new(1, 1)?) {
        let z = z_points(r, 1, &cat.spec, &[left.roots(), right.roots()])[0];
        let asm = Assembly::new(left.roots(), right.roots(), z);
        let om = omega_vector(m, &asm)?;
        // a one-row S is a single entry that vanishes by itself, so the yardstick is S at a generic point
        let mut size = 0.0;
        for (&row, w) in asm.rows().iter().zip(&om) {
            size += (w * n_entry(m, row, z, &asm)?).norm();
        }
        for &x in right.roots().u.iter().chain(&left.roots().v) {
            let s = s_function(m, x, &om, &asm)?;
            worst.add(s.norm() / size, &[s]);
        }
        inputs.push((left.roots().clone(), right.roots().clone(), z));
    }
    if worst.cases > 0 {
        report.push(worst.record(format!("{tag} S zeros at B- and C-labelled columns"), digest(&inputs), cfg.tol(1e-10)));
    }
    Ok(())
}

/// The assembly a kind is evaluated on: the right state plays the role of
/// `C` for the kinds obtained by transposition.
fn assembly_for(kind: FFKind, left: &RootConfig, right: &RootConfig, z: Complex64) -> Assembly {
    match kind.pair() {
        (2, 1) | (2, 3) | (3, 1) => Assembly::new(right, left, z),
        _ => Assembly::new(left, right, z),
    }
}

fn n_forms(cfg: &RunConfig, cat: &Catalog, tag: &str, r: &mut ChaCha8Rng, report: &mut Report) -> CliResult<()> {
    let m = &cat.model;
    let mut worst = Worst::default();
    let mut inputs = Vec::new();
    for kind in FFKind::all() {
        for (left, right) in cat.pairs(kind) {
            let z = z_points(r, 1, &cat.spec, &[left.roots(), right.roots()])[0];
            let asm = assembly_for(kind, left.roots(), right.roots(), z);
            let cols = asm.columns();
            for row in asm.rows() {
                let vals = cols.iter().map(|&x| n_entry(m, row, x, &asm)).collect::<gl3ff::Result<Vec<_>>>()?;
                let size = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
                for (&x, v) in cols.iter().zip(&vals) {
                    let d = n_entry_dtau_regular(m, row, x, &asm)?;
                    worst.add((v - d).norm() / size, &[*v, d]);
                }
            }
            inputs.push((kind, left.roots().clone(), right.roots().clone(), z));
        }
    }
    if worst.cases > 0 {
        report.push(worst.record(format!("{tag} explicit N vs eigenvalue-derivative N"), digest(&inputs), cfg.tol(1e-10)));
    }
    Ok(())
}

fn permuted(xs: &[Complex64]) -> Vec<Complex64> {
    let mut out = xs.to_vec();
    out.reverse();
    if out.len() > 2 {
        out.swap(0, 1);
    }
    out
}

fn morphisms(cfg: &RunConfig, cat: &Catalog, tag: &str, r: &mut ChaCha8Rng, report: &mut Report) -> CliResult<()> {
    let m = &cat.model;
    // reflection swaps r1 and r3 along with the indices
    let mr = m.reflected();
    let (mut psi, mut phi, mut perm) = (Worst::default(), Worst::default(), Worst::default());
    let mut inputs = Vec::new();
    for kind in FFKind::all() {
        for (left, right) in cat.pairs(kind) {
            let z = z_points(r, 1, &cat.spec, &[left.roots(), right.roots()])[0];
            let f = form_factor(m, kind, left.roots(), right.roots(), z)?;
            let size = (norm_squared(m, left.roots())? * norm_squared(m, right.roots())?).sqrt().norm();
            if f.norm() < STRUCTURAL_ZERO * size {
                continue;
            }
            let t = form_factor(m, kind.transposed(), right.roots(), left.roots(), z)?;
            psi.add(rel(f, t), &[f, t]);
            let g = form_factor(&mr, kind.reflected(), &left.roots().reflected(), &right.roots().reflected(), -z)?;
            phi.add(rel(f, g), &[f, g]);
            let lp = RootConfig::new(permuted(&left.roots().u), permuted(&left.roots().v));
            let rp = RootConfig::new(permuted(&right.roots().u), permuted(&right.roots().v));
            let p = form_factor(m, kind, &lp, &rp, z)?;
            perm.add(rel(f, p), &[f, p]);
            inputs.push((kind, left.roots().clone(), right.roots().clone(), z));
        }
    }
    if psi.cases > 0 {
        let d = digest(&inputs);
        report.push(psi.record(format!("{tag} psi transposition"), d.clone(), cfg.tol(1e-10)));
        report.push(phi.record(format!("{tag} phi reflection"), d.clone(), cfg.tol(1e-10)));
        report.push(perm.record(format!("{tag} permutation invariance"), d, cfg.tol(1e-10)));
    }
    Ok(())
}

fn rank_one(cfg: &RunConfig, cat: &Catalog, tag: &str, r: &mut ChaCha8Rng, report: &mut Report) -> CliResult<()> {
    let m = &cat.model;
    let mut worst = Worst::default();
    let mut inputs = Vec::new();
    for (i, j) in [(1, 2), (2, 1), (1, 1), (2, 2)] {
        let kind = FFKind::new(i, j)?;
        for (left, right) in cat.pairs(kind) {
            if left.roots().b() + right.roots().b() > 0 {
                continue;
            }
            let z = z_points(r, 1, &cat.spec, &[left.roots(), right.roots()])[0];
            let f = form_factor(m, kind, left.roots(), right.roots(), z)?;
            let (uc, ub) = (&left.roots().u, &right.roots().u);
            let g = match (i, j) {
                (1, 2) => rank_one_raising(m, uc, ub, z),
                (2, 1) => rank_one_raising(m, ub, uc, z),
                (s, _) => rank_one_diagonal(m, s, uc, ub, z),
            };
            worst.add(rel(f, g), &[f, g]);
            inputs.push((kind, uc.clone(), ub.clone(), z));
        }
    }
    if worst.cases > 0 {
        report.push(worst.record(format!("{tag} rank-one reduction"), digest(&inputs), cfg.tol(1e-12)));
    }
    Ok(())
}

fn g(c: Complex64, x: Complex64, y: Complex64) -> Complex64 {
    c / (x - y)
}

fn f(c: Complex64, x: Complex64, y: Complex64) -> Complex64 {
    (x - y + c) / (x - y)
}

fn h(c: Complex64, x: Complex64, y: Complex64) -> Complex64 {
    (x - y + c) / c
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `∏_{j<k} g(x_j, x_k)`.
fn delta_prime(c: Complex64, xs: &[Complex64]) -> Complex64 {
    let mut acc = one();
    for j in 0..xs.len() {
        for k in j + 1..xs.len() {
            acc *= g(c, xs[j], xs[k]);
        }
    }
    acc
}

/// `∏_{j>k} g(x_j, x_k)`.
fn delta(c: Complex64, xs: &[Complex64]) -> Complex64 {
    let mut acc = one();
    for j in 0..xs.len() {
        for k in 0..j {
            acc *= g(c, xs[j], xs[k]);
        }
    }
    acc
}

/// `∂/∂u_j` of `r1(w) ∏f(u,w) + ∏f(w,u)`.
fn dtau2(m: &ModelFunctions, w: Complex64, u: &[Complex64], j: usize) -> Complex64 {
    let c = m.c();
    let mut left = m.r1(w).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let mut right = one();
    for (l, &ul) in u.iter().enumerate() {
        if l != j {
            left *= f(c, ul, w);
            right *= f(c, w, ul);
        }
    }
    let d = u[j] - w;
    (right - left) * c / (d * d)
}

fn rank_one_entry(m: &ModelFunctions, x: Complex64, u: &[Complex64], j: usize) -> Complex64 {
    let c = m.c();
    let inv_g: Complex64 = u.iter().map(|&ul| (x - ul) / c).product();
    c * inv_g * dtau2(m, x, u, j)
}

/// Rank-one form factor of `T12`: `Δ'(ūC) Δ(x̄) det n` with `x̄ = {ūB, z}`.
fn rank_one_raising(m: &ModelFunctions, uc: &[Complex64], ub: &[Complex64], z: Complex64) -> Complex64 {
    let c = m.c();
    let mut x = ub.to_vec();
    x.push(z);
    let n = DenseComplexMatrix::from_fn(uc.len(), |j, k| rank_one_entry(m, x[k], uc, j));
    delta_prime(c, uc) * delta(c, &x) * n.det()
}

/// Rank-one diagonal form factor for two different states, `s = 1, 2`.
fn rank_one_diagonal(m: &ModelFunctions, s: usize, uc: &[Complex64], ub: &[Complex64], z: Complex64) -> Complex64 {
    let c = m.c();
    let a = uc.len();
    let mut x = ub.to_vec();
    x.push(z);
    let n = DenseComplexMatrix::from_fn(a + 1, |j, k| {
        if j < a {
            return rank_one_entry(m, x[k], uc, j);
        }
        if s == 1 {
            let prod: Complex64 = ub.iter().map(|&ul| h(c, ul, x[k])).product();
            let sign = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * m.r1(x[k]).unwrap_or(Complex64::new(f64::NAN, f64::NAN)) * prod
        } else {
            ub.iter().map(|&ul| h(c, x[k], ul)).product()
        }
    });
    delta_prime(c, uc) * delta(c, &x) * n.det()
}
