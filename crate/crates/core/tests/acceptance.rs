//! Acceptance run: one line per criterion with the worst observed error next
//! to its pinned tolerance. Exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{c, generic_twist, gl2, rel, rng, sectors_up_to, z_points, Catalog};
use gl3ff::formfactor::identities::{appendix_identities, cofactor_identity, omega_vector, s_function};
use gl3ff::formfactor::matrix::{n_entry, n_entry_dtau_regular, Assembly};
use gl3ff::formfactor::{diag, form_factor, form_factor_detailed, norm_squared, FFKind};
use gl3ff::linalg::DenseComplexMatrix;
use gl3ff::oracle::{
    apply_entry, eigenvector_for_state, invariant_product, invariant_ratio, matrix_element, monodromy_entry,
    normalized_expectation, r_matrix, rayleigh, Side, SpinChainSpec,
};
use gl3ff::solver::{continue_in_twist, distinct_states};
use gl3ff::{Complex64, Kernel, ModelFunctions, RootConfig, Twist};
use rand::Rng;

struct Outcome {
    id: &'static str,
    name: &'static str,
    checks: Vec<(String, f64, f64)>,
    notes: Vec<String>,
    seconds: f64,
}

impl Outcome {
    fn new(id: &'static str, name: &'static str) -> Self {
        Outcome { id, name, checks: Vec::new(), notes: Vec::new(), seconds: 0.0 }
    }

    /// Records the worst value of a sub-check against its tolerance.
    fn check(&mut self, what: &str, worst: f64, tol: f64) {
        self.checks.push((what.to_string(), worst, tol));
    }

    /// A sub-check that must have run on at least `min` cases.
    fn count(&mut self, what: &str, n: usize, min: usize) {
        if n < min {
            self.checks.push((format!("{what}: {n} cases, need {min}"), 1.0, 0.0));
        } else {
            self.notes.push(format!("{what}: {n} cases"));
        }
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(_, w, t)| w.is_finite() && w <= t)
    }

    fn print(&self) {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let parts: Vec<String> = self.checks.iter().map(|(n, w, t)| format!("{n} {w:.1e}/{t:.0e}")).collect();
        println!("criterion {} [{status}] {} ({:.2}s): {}", self.id, self.name, self.seconds, parts.join("; "));
        for n in &self.notes {
            println!("    {n}");
        }
    }
}

fn max(acc: &mut f64, v: f64) {
    if !v.is_finite() || v > *acc {
        *acc = if v.is_finite() { v } else { f64::INFINITY };
    }
}

fn chain3() -> SpinChainSpec {
    SpinChainSpec::seeded(3, c(1.0, 0.0), 5).unwrap()
}

fn catalogs() -> (Catalog, Catalog) {
    let spec = chain3();
    let sectors = sectors_up_to(3, 2);
    (Catalog::build(&spec, Twist::identity(), &sectors, 3), Catalog::build(&spec, generic_twist(), &sectors, 3))
}

// ---------------------------------------------------------------- criterion 1

/// `R_ab` acting on factors `a < b` of a three-fold tensor product.
fn embed(r: &DenseComplexMatrix, a: usize, b: usize) -> DenseComplexMatrix {
    let digits = |n: usize| [n / 9, (n / 3) % 3, n % 3];
    let other = 3 - a - b;
    DenseComplexMatrix::from_fn(27, |row, col| {
        let (i, j) = (digits(row), digits(col));
        if i[other] != j[other] {
            c(0.0, 0.0)
        } else {
            r[(3 * i[a] + i[b], 3 * j[a] + j[b])]
        }
    })
}

fn structural() -> Outcome {
    let mut out = Outcome::new("1", "structural residuals");
    let t0 = Instant::now();
    let cc = c(1.0, 0.0);
    let mut r = rng(1);
    let mut yb = 0.0;
    for _ in 0..5 {
        let p: Vec<Complex64> = (0..3).map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
        let r12 = embed(&r_matrix(p[0], p[1], cc).unwrap(), 0, 1);
        let r13 = embed(&r_matrix(p[0], p[2], cc).unwrap(), 0, 2);
        let r23 = embed(&r_matrix(p[1], p[2], cc).unwrap(), 1, 2);
        let lhs = &(&r12 * &r13) * &r23;
        let rhs = &(&r23 * &r13) * &r12;
        max(&mut yb, lhs.sub(&rhs).max_abs() / lhs.max_abs());
    }
    out.check("Yang-Baxter", yb, 1e-12);

    let spec = SpinChainSpec::seeded(2, cc, 11).unwrap();
    let mut rtt = 0.0;
    for _ in 0..3 {
        let (w1, w2) = (c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)), c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
        let t = |w| -> Vec<Vec<DenseComplexMatrix>> {
            (1..=3).map(|i| (1..=3).map(|j| monodromy_entry(i, j, w, &spec).unwrap()).collect()).collect()
        };
        let (ta, tb) = (t(w1), t(w2));
        let rm = r_matrix(w1, w2, cc).unwrap();
        let idx = |n: usize| (n / 27, (n / 9) % 3, n % 9);
        let t1 = DenseComplexMatrix::from_fn(81, |p, q| {
            let ((a1, a2, x), (b1, b2, y)) = (idx(p), idx(q));
            if a2 == b2 { ta[a1][b1][(x, y)] } else { c(0.0, 0.0) }
        });
        let t2 = DenseComplexMatrix::from_fn(81, |p, q| {
            let ((a1, a2, x), (b1, b2, y)) = (idx(p), idx(q));
            if a1 == b1 { tb[a2][b2][(x, y)] } else { c(0.0, 0.0) }
        });
        let r12 = DenseComplexMatrix::from_fn(81, |p, q| {
            let ((a1, a2, x), (b1, b2, y)) = (idx(p), idx(q));
            if x == y { rm[(3 * a1 + a2, 3 * b1 + b2)] } else { c(0.0, 0.0) }
        });
        let lhs = &(&r12 * &t1) * &t2;
        let rhs = &(&t2 * &t1) * &r12;
        max(&mut rtt, lhs.sub(&rhs).max_abs() / lhs.max_abs());
    }
    out.check("RTT", rtt, 1e-10);

    let spec = chain3();
    let k = Kernel::new(cc).unwrap();
    let mut vac = vec![c(0.0, 0.0); spec.dim()];
    vac[0] = c(1.0, 0.0);
    let mut err = 0.0;
    for _ in 0..3 {
        let w = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let lambda1 = k.prod(gl3ff::Func::F, &[w], spec.xi()).unwrap();
        for i in 1..=3 {
            for j in 1..=i {
                let y = apply_entry(&spec, i, j, w, &vac).unwrap();
                let expect = match (i, j) {
                    (1, 1) => lambda1,
                    (2, 2) | (3, 3) => c(1.0, 0.0),
                    _ => c(0.0, 0.0),
                };
                for (n, v) in y.iter().enumerate() {
                    let e = if n == 0 { expect } else { c(0.0, 0.0) };
                    max(&mut err, (v - e).norm() / lambda1.norm().max(1.0));
                }
            }
        }
    }
    out.check("vacuum eigenvalues", err, 1e-12);
    out.seconds = t0.elapsed().as_secs_f64();
    out.check("runtime s", out.seconds, 1.0);
    out
}

// ---------------------------------------------------------------- criterion 2

fn probe_eigenvalue(spec: &SpinChainSpec, st: &gl3ff::BetheState, seed: u64) -> f64 {
    let model = spec.model();
    let Ok(v) = eigenvector_for_state(st, Side::Right, spec, seed) else { return f64::INFINITY };
    let mut r = rng(seed ^ 0x55);
    let roots = [&st.roots];
    let mut worst = 0.0;
    for w in z_points(&mut r, 5, spec, &roots) {
        let t = model.tau_twisted(w, &st.roots, &st.twist).unwrap();
        max(&mut worst, rel(rayleigh(spec, &st.twist, w, &v).unwrap(), t));
    }
    worst
}

fn on_shell() -> Outcome {
    let mut out = Outcome::new("2", "on-shell pipeline");
    let t0 = Instant::now();
    let (mut res, mut eig, mut n) = (0.0, 0.0, 0);
    for (l, seed) in [(2usize, 11u64), (3, 5)] {
        let spec = SpinChainSpec::seeded(l, c(1.0, 0.0), seed).unwrap();
        for (a, b) in [(1usize, 0usize), (1, 1), (2, 1)] {
            if a > l {
                continue;
            }
            for tw in [Twist::identity(), generic_twist()] {
                let states = distinct_states(&spec.model(), a, b, &tw, 20, 3);
                if !tw.is_identity() && states.is_empty() {
                    out.check(&format!("L={l} ({a},{b}) twisted states found"), 1.0, 0.0);
                }
                for st in states.iter().take(3) {
                    n += 1;
                    max(&mut res, st.residual);
                    max(&mut eig, probe_eigenvalue(&spec, st, 40 + n as u64));
                }
            }
        }
    }
    out.check("Phi residual", res, 1e-12);
    out.check("tau vs oracle eigenvalue", eig, 1e-8);
    out.count("states", n, 8);
    out.seconds = t0.elapsed().as_secs_f64();
    out.check("runtime s", out.seconds, 10.0);
    out
}

// ---------------------------------------------------------------- criterion 3

/// Oracle element magnitude below which a matrix element is treated as a
/// structural zero and left out of ratio comparisons.
const STRUCTURAL_ZERO: f64 = 1e-9;

fn off_diagonal(cats: &[&Catalog]) -> Outcome {
    let mut out = Outcome::new("3", "off-diagonal ratios vs oracle");
    let t0 = Instant::now();
    let (mut worst, mut n) = (0.0, 0);
    let mut r = rng(3);
    for cat in cats {
        for (i, j) in [(1, 2), (2, 1), (2, 3), (3, 2)] {
            let kind = FFKind::new(i, j).unwrap();
            for (left, right) in cat.pairs(kind) {
                let zs = z_points(&mut r, 10, &cat.spec, &[left.roots(), right.roots()]);
                for p in zs.chunks(2) {
                    let (z1, z2) = (p[0], p[1]);
                    let e2 = matrix_element(&cat.spec, kind.pair(), z2, &left.vecs.left, &right.vecs.right).unwrap();
                    let e1 = matrix_element(&cat.spec, kind.pair(), z1, &left.vecs.left, &right.vecs.right).unwrap();
                    if e1.norm() < STRUCTURAL_ZERO || e2.norm() < STRUCTURAL_ZERO {
                        continue;
                    }
                    let o = invariant_ratio(&cat.spec, kind.pair(), z1, z2, &left.vecs, &right.vecs).unwrap();
                    let f = form_factor(&cat.model, kind, left.roots(), right.roots(), z1).unwrap()
                        / form_factor(&cat.model, kind, left.roots(), right.roots(), z2).unwrap();
                    max(&mut worst, rel(f, o));
                    n += 1;
                }
            }
        }
    }
    out.check("ratio", worst, 1e-8);
    out.count("z-pairs", n, 40);
    out.seconds = t0.elapsed().as_secs_f64();
    out
}

// ---------------------------------------------------------------- criterion 4

fn products(cats: &[&Catalog]) -> Outcome {
    let mut out = Outcome::new("4", "normalized products vs oracle");
    let t0 = Instant::now();
    let mut r = rng(4);
    for (i, j) in [(1, 2), (2, 3), (1, 3)] {
        let kind = FFKind::new(i, j).unwrap();
        let (mut worst, mut n) = (0.0, 0);
        for cat in cats {
            for (left, right) in cat.pairs(kind) {
                let zs = z_points(&mut r, 2, &cat.spec, &[left.roots(), right.roots()]);
                let e1 = matrix_element(&cat.spec, (i, j), zs[0], &left.vecs.left, &right.vecs.right).unwrap();
                let e2 = matrix_element(&cat.spec, (j, i), zs[1], &right.vecs.left, &left.vecs.right).unwrap();
                if e1.norm() < STRUCTURAL_ZERO || e2.norm() < STRUCTURAL_ZERO {
                    continue;
                }
                let o = invariant_product(&cat.spec, (i, j), zs[0], zs[1], &left.vecs, &right.vecs).unwrap()
                    * cat.scale(i)
                    * cat.scale(j);
                let m = &cat.model;
                let f = form_factor(m, kind, left.roots(), right.roots(), zs[0]).unwrap()
                    * form_factor(m, kind.transposed(), right.roots(), left.roots(), zs[1]).unwrap()
                    / (norm_squared(m, left.roots()).unwrap() * norm_squared(m, right.roots()).unwrap());
                max(&mut worst, rel(f, o));
                n += 1;
            }
        }
        out.check(&format!("T{i}{j}xT{j}{i}"), worst, 1e-8);
        out.count(&format!("T{i}{j} pairs"), n, 3);
    }
    out.seconds = t0.elapsed().as_secs_f64();
    out
}

// ---------------------------------------------------------------- criterion 5

struct DiagonalFindings {
    outcome: Outcome,
    literal_summand: f64,
}

fn diagonal(cats: &[&Catalog]) -> DiagonalFindings {
    let mut out = Outcome::new("5", "diagonal form factors");
    let t0 = Instant::now();
    let mut r = rng(5);
    let (mut sum_rule, mut cof, mut n_distinct) = (0.0, 0.0, 0);
    let (mut deriv, mut oracle, mut literal, mut n_same) = (0.0, 0.0, 0.0, 0);
    for cat in cats {
        let m = &cat.model;
        for (left, right) in cat.pairs(FFKind::new(1, 1).unwrap()) {
            let z = z_points(&mut r, 1, &cat.spec, &[left.roots(), right.roots()])[0];
            let vals: Vec<Complex64> = (1..=3).map(|s| form_factor(m, FFKind::new(s, s).unwrap(), left.roots(), right.roots(), z).unwrap()).collect();
            let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
            max(&mut sum_rule, vals.iter().sum::<Complex64>().norm() / scale);
            let asm = Assembly::new(left.roots(), right.roots(), z);
            // several F^{(s,s)} vanish identically, so errors are measured on the scale of the triple
            for s in 1..=3 {
                let mat = diag::diag_matrix_distinct(m, s, &asm).unwrap();
                let chk = cofactor_identity(m, &mat, &asm).unwrap();
                let ev = form_factor_detailed(m, FFKind::new(s, s).unwrap(), left.roots(), right.roots(), z).unwrap();
                max(&mut cof, (chk.det - chk.reduced).norm() * ev.prefactor.norm() / scale);
            }
            n_distinct += 1;
        }
        for st in cat.states() {
            let z = z_points(&mut r, 1, &cat.spec, &[st.roots()])[0];
            let nb = norm_squared(m, st.roots()).unwrap();
            for s in 1..=3 {
                let f = form_factor(m, FFKind::new(s, s).unwrap(), st.roots(), st.roots(), z).unwrap() / nb;
                let total = m.dtau_dkappa_on_shell(s, z, st.roots(), &Twist::identity()).unwrap();
                let o = normalized_expectation(&cat.spec, s, z, &st.vecs).unwrap() * cat.scale(s);
                max(&mut deriv, rel(f, total));
                max(&mut oracle, rel(f, o));
                max(&mut literal, rel(f, m.dtau_dkappa(s, z, st.roots()).unwrap()));
            }
            n_same += 1;
        }
    }
    out.check("distinct sum rule", sum_rule, 1e-10);
    out.check("cofactor identity", cof, 1e-10);
    out.check("same state vs on-shell dtau/dkappa", deriv, 1e-10);
    out.check("same state vs oracle", oracle, 1e-8);
    out.count("distinct pairs", n_distinct, 4);
    out.count("states", n_same, 6);
    out.seconds = t0.elapsed().as_secs_f64();
    DiagonalFindings { outcome: out, literal_summand: literal }
}

// ---------------------------------------------------------------- criterion 6

fn shuffled(roots: &RootConfig) -> RootConfig {
    let mut u = roots.u.clone();
    let mut v = roots.v.clone();
    u.reverse();
    if !v.is_empty() {
        v.rotate_left(1);
    }
    RootConfig::new(u, v)
}

fn morphisms(cats: &[&Catalog]) -> Outcome {
    let mut out = Outcome::new("6", "morphisms and reductions");
    let t0 = Instant::now();
    let mut r = rng(6);
    let (mut psi, mut phi, mut perm) = (0.0, 0.0, 0.0);
    for cat in cats {
        let m = &cat.model;
        let mr = m.reflected();
        for kind in FFKind::all() {
            for (left, right) in cat.pairs(kind) {
                let z = z_points(&mut r, 1, &cat.spec, &[left.roots(), right.roots()])[0];
                let f = form_factor(m, kind, left.roots(), right.roots(), z).unwrap();
                let size = (norm_squared(m, left.roots()).unwrap() * norm_squared(m, right.roots()).unwrap()).sqrt().norm();
                if f.norm() < STRUCTURAL_ZERO * size {
                    continue;
                }
                // transposition exchanges the roles of the two states
                let t = form_factor(m, kind.transposed(), right.roots(), left.roots(), z).unwrap();
                max(&mut psi, rel(f, t));
                let g = form_factor(&mr, kind.reflected(), &left.roots().reflected(), &right.roots().reflected(), -z).unwrap();
                max(&mut phi, rel(f, g));
                let p = form_factor(m, kind, &shuffled(left.roots()), &shuffled(right.roots()), z).unwrap();
                max(&mut perm, rel(f, p));
            }
        }
    }
    out.check("psi", psi, 1e-10);
    out.check("phi", phi, 1e-10);
    out.check("permutations", perm, 1e-10);

    let (mut red, mut n) = (0.0, 0);
    for cat in cats {
        let m = &cat.model;
        for kind in [(1, 2), (2, 1), (1, 1), (2, 2)] {
            let kind = FFKind::new(kind.0, kind.1).unwrap();
            for (left, right) in cat.pairs(kind) {
                if left.roots().b() + right.roots().b() > 0 {
                    continue;
                }
                let z = z_points(&mut r, 1, &cat.spec, &[left.roots(), right.roots()])[0];
                let f = form_factor(m, kind, left.roots(), right.roots(), z).unwrap();
                let (uc, ub) = (&left.roots().u, &right.roots().u);
                let g = match kind.pair() {
                    (1, 2) => gl2::ff12(m, uc, ub, z),
                    (2, 1) => gl2::ff21(m, uc, ub, z),
                    (s, _) => gl2::ffss(m, s, uc, ub, z),
                };
                max(&mut red, rel(f, g));
                n += 1;
            }
        }
    }
    out.check("rank-one reduction", red, 1e-12);
    out.count("rank-one cases", n, 4);
    out.seconds = t0.elapsed().as_secs_f64();
    out
}

// ---------------------------------------------------------------- criterion 7

fn identities(cats: &[&Catalog]) -> Outcome {
    let mut out = Outcome::new("7", "identities");
    let t0 = Instant::now();
    let m = chain3().model();
    let mut r = rng(7);
    let draw = |n: usize, r: &mut rand_chacha::ChaCha8Rng| -> Vec<Complex64> {
        (0..n).map(|_| c(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0))).collect()
    };
    let mut app = 0.0;
    for i in 0..50 {
        let (a, b) = (1 + i % 3, i % 3);
        let asm = Assembly { uc: draw(a, &mut r), vc: draw(b, &mut r), ub: draw(a, &mut r), vb: draw(b, &mut r), z: draw(1, &mut r)[0] };
        for res in appendix_identities(&m, &asm).unwrap() {
            max(&mut app, res.residual);
        }
    }
    out.check("summation identities (50 draws)", app, 1e-12);

    let (mut szero, mut nform) = (0.0, 0.0);
    for cat in cats {
        let m = &cat.model;
        for (left, right) in cat.pairs(FFKind::new(1, 1).unwrap()) {
            let z = z_points(&mut r, 1, &cat.spec, &[left.roots(), right.roots()])[0];
            let asm = Assembly::new(left.roots(), right.roots(), z);
            let om = omega_vector(m, &asm).unwrap();
            // a one-row S is a single entry that vanishes by itself, so the yardstick is S at a generic point
            let size: f64 = asm.rows().iter().zip(&om).map(|(&row, w)| (w * n_entry(m, row, z, &asm).unwrap()).norm()).sum();
            for x in right.roots().u.iter().chain(&left.roots().v) {
                let s = s_function(m, *x, &om, &asm).unwrap();
                max(&mut szero, s.norm() / size);
            }
        }
        for kind in FFKind::all() {
            for (left, right) in cat.pairs(kind) {
                let z = z_points(&mut r, 1, &cat.spec, &[left.roots(), right.roots()])[0];
                let asm = match kind.pair() {
                    (2, 1) | (2, 3) | (3, 1) => Assembly::new(right.roots(), left.roots(), z),
                    _ => Assembly::new(left.roots(), right.roots(), z),
                };
                for row in asm.rows() {
                    let cols = asm.columns();
                    let vals: Vec<Complex64> = cols.iter().map(|&x| n_entry(m, row, x, &asm).unwrap()).collect();
                    let size = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
                    for (&x, v) in cols.iter().zip(&vals) {
                        let d = n_entry_dtau_regular(m, row, x, &asm).unwrap();
                        max(&mut nform, (v - d).norm() / size);
                    }
                }
            }
        }
    }
    out.check("S vanishes at B- and C-labelled columns", szero, 1e-10);
    out.check("explicit N vs eigenvalue-derivative N", nform, 1e-10);
    out.seconds = t0.elapsed().as_secs_f64();
    out
}

// ---------------------------------------------------------------- criterion 8

fn gaudin(cats: &[&Catalog]) -> Outcome {
    let mut out = Outcome::new("8", "Gaudin matrix");
    let t0 = Instant::now();
    let (mut sym, mut fd) = (0.0, 0.0);
    let check = |m: &ModelFunctions, roots: &RootConfig, sym: &mut f64, fd: &mut f64| {
        let g = m.gaudin_matrix(roots).unwrap();
        if g.dim() == 0 {
            return;
        }
        max(sym, g.sub(&g.transpose()).max_abs() / g.max_abs());
        let a = roots.a();
        let flat = roots.flat();
        let h = 1e-6;
        let cc = m.c();
        for k in 0..flat.len() {
            let (mut p, mut q) = (flat.clone(), flat.clone());
            p[k] += h;
            q[k] -= h;
            let fp = m.phi_log(&RootConfig::from_flat(a, &p)).unwrap();
            let fq = m.phi_log(&RootConfig::from_flat(a, &q)).unwrap();
            let factor = if k < a { -cc } else { cc };
            for j in 0..flat.len() {
                let est = factor * (fp[j] - fq[j]) / (2.0 * h);
                max(fd, (est - g[(j, k)]).norm() / g.max_abs());
            }
        }
    };
    for cat in cats {
        for st in cat.states() {
            check(&cat.model, st.roots(), &mut sym, &mut fd);
        }
    }
    let m = ModelFunctions::xxx_chain(&[c(0.1, 0.0), c(-0.2, 0.1), c(0.05, -0.1)], c(0.9, 0.2)).unwrap();
    check(&m, &RootConfig::new(vec![c(0.3, 0.7), c(-0.4, 0.2)], vec![c(0.1, 0.3)]), &mut sym, &mut fd);
    out.check("symmetry", sym, 1e-14);
    out.check("finite-difference Jacobian", fd, 1e-6);
    out.seconds = t0.elapsed().as_secs_f64();
    out
}

// ---------------------------------------------------------------- criterion 9

fn twist(cat: &Catalog) -> Outcome {
    let mut out = Outcome::new("9", "twist machinery");
    let t0 = Instant::now();
    let mut eig = 0.0;
    for (n, st) in cat.states().enumerate() {
        max(&mut eig, probe_eigenvalue(&cat.spec, &st.state, 900 + n as u64));
    }
    out.check("twisted eigenvalue", eig, 1e-8);
    let base = cat.spec.model();
    let (mut trip, mut n) = (0.0, 0);
    for (a, b) in [(1, 0), (2, 1)] {
        for st in distinct_states(&base, a, b, &Twist::identity(), 20, 9) {
            let there = continue_in_twist(&base, &st, &generic_twist(), 10).unwrap();
            let back = continue_in_twist(&base, &there, &Twist::identity(), 10).unwrap();
            max(&mut trip, back.roots.multiset_distance(&st.roots));
            n += 1;
        }
    }
    out.check("continuation round trip", trip, 1e-8);
    out.count("round trips", n, 2);
    out.seconds = t0.elapsed().as_secs_f64();
    out
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut all = vec![structural(), on_shell()];
    let (plain, twisted) = catalogs();
    let cats = [&plain, &twisted];
    all.push(off_diagonal(&cats));
    all.push(products(&cats));
    let d = diagonal(&cats);
    all.push(d.outcome);
    all.push(morphisms(&cats));
    all.push(identities(&cats));
    all.push(gaudin(&cats));
    all.push(twist(&twisted));
    for o in &all {
        o.print();
    }
    // the same-state identity read with the fixed-root summand of τ_κ; this
    // reading is not what the determinant computes, so it is reported only
    let lit = if d.literal_summand <= 1e-10 { "PASS" } else { "FAIL" };
    println!(
        "criterion 5-literal [{lit}, informational] same state vs fixed-root summand of tau: worst {:.1e}/1e-10",
        d.literal_summand
    );
    let total = start.elapsed().as_secs_f64();
    let ok = all.iter().all(Outcome::passed) && total < 120.0;
    println!("acceptance: {} in {total:.1}s", if ok { "all criteria pass" } else { "FAILURES" });
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
