//! Oracle-backed checks: structure of the chain, the on-shell pipeline, and
//! every form-factor kind against explicit matrix elements.

use gl3ff::formfactor::identities::cofactor_identity;
use gl3ff::formfactor::matrix::Assembly;
use gl3ff::formfactor::{diag, form_factor, form_factor_detailed, norm_squared};
use gl3ff::oracle::{
    eigenvector_for_state, invariant_product, invariant_ratio, matrix_element, normalized_expectation, rayleigh,
    rtt_residual, vacuum_residual, yang_baxter_residual, Side, SpinChainSpec,
};
use gl3ff::solver::continue_in_twist;
use gl3ff::{Complex64, FFKind, RootConfig, Twist};
use rand::Rng;
use serde::Serialize;

use crate::catalog::{generic_twist, rng, z_points, Catalog};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::{digest, rel, Report, Worst};

/// Oracle elements below this size (unit eigenvectors) vanish identically
/// and carry no ratio information.
const STRUCTURAL_ZERO: f64 = 1e-9;

/// Inputs of one comparison, collected for the record digest.
#[derive(Serialize, Default)]
struct Inputs {
    roots: Vec<RootConfig>,
    z: Vec<Complex64>,
}

impl Inputs {
    fn add(&mut self, roots: &[&RootConfig], z: &[Complex64]) {
        self.roots.extend(roots.iter().map(|r| (*r).clone()));
        self.z.extend_from_slice(z);
    }
}

pub fn run(cfg: &RunConfig, prefix: &str, report: &mut Report) -> CliResult<()> {
    let spec = cfg.spec()?;
    let mut r = rng(cfg.rng_seed);
    structural(cfg, &spec, prefix, &mut r, report)?;

    let config_twist = cfg.twist()?;
    let second = if config_twist.is_identity() { generic_twist() } else { config_twist };
    let sectors = cfg.sectors();
    let cats = [
        Catalog::build("plain", &spec, Twist::identity(), &sectors, cfg.sector.max_states, cfg.sector.seeds, cfg.rng_seed),
        Catalog::build("twisted", &spec, second, &sectors, cfg.sector.max_states, cfg.sector.seeds, cfg.rng_seed),
    ];
    for cat in &cats {
        let tag = format!("{prefix}[{}]", cat.label);
        if cat.skipped > 0 {
            report.note(format!("{tag}: {} solved states skipped (degenerate eigenvalue)", cat.skipped));
        }
        on_shell(cfg, cat, &tag, &mut r, report)?;
        for kind in cfg.kinds() {
            ratios(cfg, cat, kind, &tag, &mut r, report)?;
        }
        products(cfg, cat, &tag, &mut r, report)?;
        diagonal(cfg, cat, &tag, &mut r, report)?;
        orthogonality(cfg, cat, &tag, report);
        gaudin(cfg, cat, &tag, report)?;
    }
    round_trip(cfg, &cats[0], &cats[1].twist, prefix, report)?;
    Ok(())
}

fn point(r: &mut impl Rng) -> Complex64 {
    Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

fn structural(cfg: &RunConfig, spec: &SpinChainSpec, prefix: &str, r: &mut impl Rng, report: &mut Report) -> CliResult<()> {
    let c = spec.c();
    let mut yb = Worst::default();
    let mut pts = Vec::new();
    for _ in 0..5 {
        let p = [point(r), point(r), point(r)];
        yb.add(yang_baxter_residual(p[0], p[1], p[2], c)?, &[]);
        pts.extend(p);
    }
    report.push(yb.record(format!("{prefix} yang_baxter"), digest(&(c, &pts)), cfg.tol(1e-12)));

    // the dense RTT check is run on the first two sites
    let short = SpinChainSpec::new(spec.xi()[..spec.len().min(2)].to_vec(), c)?;
    let mut rtt = Worst::default();
    let mut pts = Vec::new();
    for _ in 0..3 {
        let (w1, w2) = (point(r), point(r));
        rtt.add(rtt_residual(&short, w1, w2)?, &[]);
        pts.extend([w1, w2]);
    }
    report.push(rtt.record(format!("{prefix} rtt"), digest(&(short.xi(), &pts)), cfg.tol(1e-10)));

    let mut vac = Worst::default();
    let mut pts = Vec::new();
    for _ in 0..3 {
        let w = point(r);
        vac.add(vacuum_residual(spec, w)?, &[]);
        pts.push(w);
    }
    report.push(vac.record(format!("{prefix} vacuum_eigenvalues"), digest(&(spec.xi(), &pts)), cfg.tol(1e-12)));
    Ok(())
}

fn on_shell(cfg: &RunConfig, cat: &Catalog, tag: &str, r: &mut rand_chacha::ChaCha8Rng, report: &mut Report) -> CliResult<()> {
    let base = cat.spec.model();
    let (mut res, mut eig) = (Worst::default(), Worst::default());
    let mut inputs = Inputs::default();
    for (n, st) in cat.states().enumerate() {
        res.add(st.state.residual, &[]);
        let v = eigenvector_for_state(&st.state, Side::Right, &cat.spec, cfg.rng_seed.wrapping_add(40 + n as u64))?;
        let zs = z_points(r, 5, &cat.spec, &[st.roots()]);
        for &w in &zs {
            let t = base.tau_twisted(w, st.roots(), &st.state.twist)?;
            let o = rayleigh(&cat.spec, &st.state.twist, w, &v)?;
            eig.add(rel(t, o), &[t, o]);
        }
        inputs.add(&[st.roots()], &zs);
    }
    let d = digest(&inputs);
    report.push(res.record(format!("{tag} phi_residual"), d.clone(), cfg.tol(1e-12)));
    report.push(eig.record(format!("{tag} tau_vs_oracle"), d, cfg.tol(1e-8)));
    Ok(())
}

fn ratios(cfg: &RunConfig, cat: &Catalog, kind: FFKind, tag: &str, r: &mut rand_chacha::ChaCha8Rng, report: &mut Report) -> CliResult<()> {
    let mut worst = Worst::default();
    let mut inputs = Inputs::default();
    for (left, right) in cat.pairs(kind) {
        let zs = z_points(r, 10, &cat.spec, &[left.roots(), right.roots()]);
        for p in zs.chunks(2) {
            let e1 = matrix_element(&cat.spec, kind.pair(), p[0], &left.vecs.left, &right.vecs.right)?;
            let e2 = matrix_element(&cat.spec, kind.pair(), p[1], &left.vecs.left, &right.vecs.right)?;
            if e1.norm() < STRUCTURAL_ZERO || e2.norm() < STRUCTURAL_ZERO {
                continue;
            }
            let o = invariant_ratio(&cat.spec, kind.pair(), p[0], p[1], &left.vecs, &right.vecs)?;
            let f = form_factor(&cat.model, kind, left.roots(), right.roots(), p[0])?
                / form_factor(&cat.model, kind, left.roots(), right.roots(), p[1])?;
            worst.add(rel(f, o), &[f, o]);
            inputs.add(&[left.roots(), right.roots()], p);
        }
    }
    if worst.cases == 0 {
        report.note(format!("{tag} ratio {kind}: no state pairs with nonzero elements"));
        return Ok(());
    }
    report.push(worst.record(format!("{tag} ratio {kind}"), digest(&(kind, &inputs)), cfg.tol(1e-8)));
    Ok(())
}

fn products(cfg: &RunConfig, cat: &Catalog, tag: &str, r: &mut rand_chacha::ChaCha8Rng, report: &mut Report) -> CliResult<()> {
    let m = &cat.model;
    for kind in cfg.kinds().into_iter().filter(|k| k.i() < k.j()) {
        let (i, j) = kind.pair();
        let mut worst = Worst::default();
        let mut inputs = Inputs::default();
        for (left, right) in cat.pairs(kind) {
            let zs = z_points(r, 2, &cat.spec, &[left.roots(), right.roots()]);
            let e1 = matrix_element(&cat.spec, (i, j), zs[0], &left.vecs.left, &right.vecs.right)?;
            let e2 = matrix_element(&cat.spec, (j, i), zs[1], &right.vecs.left, &left.vecs.right)?;
            if e1.norm() < STRUCTURAL_ZERO || e2.norm() < STRUCTURAL_ZERO {
                continue;
            }
            let o = invariant_product(&cat.spec, (i, j), zs[0], zs[1], &left.vecs, &right.vecs)? * cat.scale(i) * cat.scale(j);
            let f = form_factor(m, kind, left.roots(), right.roots(), zs[0])?
                * form_factor(m, kind.transposed(), right.roots(), left.roots(), zs[1])?
                / (norm_squared(m, left.roots())? * norm_squared(m, right.roots())?);
            worst.add(rel(f, o), &[f, o]);
            inputs.add(&[left.roots(), right.roots()], &zs);
        }
        if worst.cases == 0 {
            report.note(format!("{tag} product T{i}{j}xT{j}{i}: no state pairs"));
            continue;
        }
        report.push(worst.record(format!("{tag} product T{i}{j}xT{j}{i}"), digest(&inputs), cfg.tol(1e-8)));
    }
    Ok(())
}

fn diagonal(cfg: &RunConfig, cat: &Catalog, tag: &str, r: &mut rand_chacha::ChaCha8Rng, report: &mut Report) -> CliResult<()> {
    let m = &cat.model;
    let (mut sum_rule, mut cof) = (Worst::default(), Worst::default());
    let mut inputs = Inputs::default();
    for (left, right) in cat.pairs(FFKind::new(1, 1)?) {
        let z = z_points(r, 1, &cat.spec, &[left.roots(), right.roots()])[0];
        let evs = (1..=3)
            .map(|s| form_factor_detailed(m, FFKind::new(s, s)?, left.roots(), right.roots(), z))
            .collect::<gl3ff::Result<Vec<_>>>()?;
        let scale = evs.iter().map(|e| e.value.norm()).fold(0.0, f64::max);
        let total: Complex64 = evs.iter().map(|e| e.value).sum();
        sum_rule.add(total.norm() / scale, &[total]);
        let asm = Assembly::new(left.roots(), right.roots(), z);
        for (s, ev) in (1..=3).zip(&evs) {
            let chk = cofactor_identity(m, &diag::diag_matrix_distinct(m, s, &asm)?, &asm)?;
            // several of the three values vanish identically, so the scale is the triple's
            cof.add((chk.det - chk.reduced).norm() * ev.prefactor.norm() / scale, &[chk.det, chk.reduced]);
        }
        inputs.add(&[left.roots(), right.roots()], &[z]);
    }
    if sum_rule.cases > 0 {
        let d = digest(&inputs);
        report.push(sum_rule.record(format!("{tag} sum_rule"), d.clone(), cfg.tol(1e-10)));
        report.push(cof.record(format!("{tag} cofactor"), d, cfg.tol(1e-10)));
    } else {
        report.note(format!("{tag} sum_rule: no pairs of different states in one sector"));
    }

    let (mut deriv, mut oracle) = (Worst::default(), Worst::default());
    let mut inputs = Inputs::default();
    for st in cat.states() {
        let z = z_points(r, 1, &cat.spec, &[st.roots()])[0];
        let nb = norm_squared(m, st.roots())?;
        for s in 1..=3 {
            let f = form_factor(m, FFKind::new(s, s)?, st.roots(), st.roots(), z)? / nb;
            let d = m.dtau_dkappa_on_shell(s, z, st.roots(), &Twist::identity())?;
            let o = normalized_expectation(&cat.spec, s, z, &st.vecs)? * cat.scale(s);
            deriv.add(rel(f, d), &[f, d]);
            oracle.add(rel(f, o), &[f, o]);
        }
        inputs.add(&[st.roots()], &[z]);
    }
    let d = digest(&inputs);
    report.push(deriv.record(format!("{tag} same_state_derivative"), d.clone(), cfg.tol(1e-10)));
    report.push(oracle.record(format!("{tag} same_state_oracle"), d, cfg.tol(1e-8)));
    Ok(())
}

fn orthogonality(cfg: &RunConfig, cat: &Catalog, tag: &str, report: &mut Report) {
    let states: Vec<_> = cat.states().collect();
    let mut worst = Worst::default();
    let mut inputs = Inputs::default();
    for (p, x) in states.iter().enumerate() {
        for y in &states[p + 1..] {
            if x.roots().multiset_distance(y.roots()) < 1e-6 {
                continue;
            }
            let dot: Complex64 = x.vecs.left.iter().zip(&y.vecs.right).map(|(a, b)| a * b).sum();
            worst.add(dot.norm(), &[dot]);
            inputs.add(&[x.roots(), y.roots()], &[]);
        }
    }
    if worst.cases > 0 {
        report.push(worst.record(format!("{tag} orthogonality"), digest(&inputs), cfg.tol(1e-9)));
    }
}

/// Symmetry of the Gaudin matrix and its agreement with a central-difference
/// Jacobian of the logarithmic Bethe equations (`-c` on u-columns, `+c` on
/// v-columns).
fn gaudin(cfg: &RunConfig, cat: &Catalog, tag: &str, report: &mut Report) -> CliResult<()> {
    let m = &cat.model;
    let c = m.c();
    let h = 1e-6;
    let (mut sym, mut fd) = (Worst::default(), Worst::default());
    let mut inputs = Inputs::default();
    for st in cat.states() {
        let roots = st.roots();
        let g = m.gaudin_matrix(roots)?;
        if g.dim() == 0 {
            continue;
        }
        let size = g.max_abs();
        sym.add(g.sub(&g.transpose()).max_abs() / size, &[]);
        let a = roots.a();
        let flat = roots.flat();
        for k in 0..flat.len() {
            let (mut p, mut q) = (flat.clone(), flat.clone());
            p[k] += h;
            q[k] -= h;
            let fp = m.phi_log(&RootConfig::from_flat(a, &p))?;
            let fq = m.phi_log(&RootConfig::from_flat(a, &q))?;
            let factor = if k < a { -c } else { c };
            for j in 0..flat.len() {
                let est = factor * (fp[j] - fq[j]) / (2.0 * h);
                fd.add((est - g[(j, k)]).norm() / size, &[est, g[(j, k)]]);
            }
        }
        inputs.add(&[roots], &[]);
    }
    if sym.cases > 0 {
        let d = digest(&inputs);
        report.push(sym.record(format!("{tag} gaudin_symmetry"), d.clone(), cfg.tol(1e-14)));
        report.push(fd.record(format!("{tag} gaudin_jacobian"), d, cfg.tol(1e-6)));
    }
    Ok(())
}

fn round_trip(cfg: &RunConfig, plain: &Catalog, target: &Twist, prefix: &str, report: &mut Report) -> CliResult<()> {
    let base = plain.spec.model();
    let mut worst = Worst::default();
    let mut inputs = Inputs::default();
    for st in plain.states() {
        let there = continue_in_twist(&base, &st.state, target, 10)?;
        let back = continue_in_twist(&base, &there, &Twist::identity(), 10)?;
        worst.add(back.roots.multiset_distance(st.roots()), &[]);
        inputs.add(&[st.roots()], &target.as_array());
    }
    if worst.cases > 0 {
        report.push(worst.record(format!("{prefix} twist_round_trip"), digest(&inputs), cfg.tol(1e-8)));
    }
    Ok(())
}
