//! The computational subcommands. Each returns its tables and reports; sweeps
//! run in parallel but rows are emitted in sweep order.

use nalgebra::Vector3;
use num_complex::Complex64;
use polariton_core::dispersion::{longitudinal_roots, transverse_roots, Family, PolaritonRoot};
use polariton_core::evolution::energy::energy_report;
use polariton_core::evolution::{assemble_system, integrate, MediumLayout, RealModeBasis, State};
use polariton_core::greens::dyadic::s_dyadic_homogeneous;
use polariton_core::greens::{
    g_dyadic_homogeneous, lippmann_schwinger_solve, BoxModeBasis, Dyad, GreenBackground, ScattererGrid, Site,
};
use polariton_core::hopfield::{
    hamiltonian_diagonal, hopfield_frequencies, hopfield_inverse, hopfield_transform, HopfieldMedium,
    LongitudinalFields, ModeFields,
};
use polariton_core::propagators::{h_bromwich, sum_rule_im, sum_rule_re, BromwichConfig, ResidueExpansion};
use polariton_core::quasimode::{longitudinal_quasimodes, transverse_quasimodes, QuasimodeRow};
use polariton_core::tolerances::{HOPFIELD_DIAGONAL, PROPAGATOR_ORACLE, SUM_RULE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::scenario::{parse_json, read_file, BasisSpec, GreenKind, Scenario, Sweep};
use crate::table::{Output, Table};

/// Transverse roots at one photon frequency, as stored in a root file.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootSet {
    pub omega_alpha: f64,
    pub roots: Vec<PolaritonRoot>,
}

/// Runs `f` over the sweep in parallel, keeping sweep order.
fn sweep<T: Send, F: Fn(f64) -> CliResult<T> + Sync>(values: &[f64], f: F) -> CliResult<Vec<T>> {
    values.par_iter().map(|&v| f(v)).collect()
}

fn positive(values: Vec<f64>, field: &str) -> CliResult<Vec<f64>> {
    match values.iter().find(|&&v| v <= 0.0) {
        Some(v) => Err(CliError::validation(field, format!("values must be > 0, got {v}"))),
        None => Ok(values),
    }
}

pub fn dispersion(s: &Scenario) -> CliResult<Output> {
    let m = s.medium()?;
    let ks = positive(s.dispersion.k.values("dispersion.k")?, "dispersion.k")?;
    let sets = sweep(&ks, |k| Ok(transverse_roots(&m, k, None)?))?;
    let mut t = Table::new("dispersion", &["k", "Re_Omega", "Im_Omega", "Re_D", "Im_D", "family", "m"]);
    let mut push = |k: f64, r: &PolaritonRoot| {
        t.push(vec![
            k.into(),
            r.omega.re.into(),
            r.omega.im.into(),
            r.d.re.into(),
            r.d.im.into(),
            r.family.as_str().into(),
            r.branch.into(),
        ])
    };
    for (&k, roots) in ks.iter().zip(&sets) {
        for r in roots {
            push(k, r);
        }
    }
    if s.dispersion.longitudinal {
        for r in longitudinal_roots(&m, None)? {
            push(0.0, &r);
        }
    }
    let files: Vec<RootSet> = ks.iter().zip(sets).map(|(&k, roots)| RootSet { omega_alpha: k, roots }).collect();
    let roots = serde_json::to_value(files).expect("roots serialize");
    Ok(Output::table(t).with_report("roots", roots))
}

pub fn propagator(s: &Scenario) -> CliResult<Output> {
    let m = s.medium()?;
    let p = &s.propagator;
    let was = positive(p.omega_alpha.values("propagator.omega_alpha")?, "propagator.omega_alpha")?;
    if !(p.periods > 0.0 && p.periods.is_finite()) {
        return Err(CliError::validation("propagator.periods", "must be finite and > 0"));
    }
    if p.samples == 0 {
        return Err(CliError::validation("propagator.samples", "must be ≥ 1"));
    }
    let mut cfg = BromwichConfig::default();
    if let Some(n) = p.n_fft {
        cfg.n_fft = n;
    }
    let blocks = sweep(&was, |wa| {
        let e = ResidueExpansion::new(&transverse_roots(&m, wa, None)?, wa)?;
        let h = h_bromwich(&m, wa, &cfg).map_err(|e| CliError::from(e).within("propagator"))?;
        (0..=p.samples)
            .map(|k| {
                let tau = k as f64 * p.periods / (wa * p.samples as f64);
                let (hr, hn) = (e.h(tau), h.at(tau)?);
                Ok([wa, tau, hr, hn, e.u(tau), (hr - hn).abs()])
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let mut t = Table::new("propagator", &["omega_alpha", "tau", "H_residue", "H_numeric", "U_residue", "abs_err"]);
    let mut worst: f64 = 0.0;
    for row in blocks.into_iter().flatten() {
        worst = worst.max(row[5]);
        t.push(row.iter().map(|&v| v.into()).collect());
    }
    let failure = (worst > PROPAGATOR_ORACLE).then(|| {
        CliError::numerical(
            "propagator oracle",
            format!("residue and Bromwich propagators differ by {worst:e}"),
            json!({ "max_abs_err": worst, "tolerance": PROPAGATOR_ORACLE }),
        )
    });
    Ok(Output::table(t).failing(failure))
}

pub fn sumrules(s: &Scenario) -> CliResult<Output> {
    let sets = match &s.sumrules.roots_file {
        Some(path) => {
            let sets: Vec<RootSet> = parse_json(&read_file(&s.resolve(path))?).map_err(|e| e.within("roots_file"))?;
            if let Some(bad) = sets.iter().find(|r| !(r.omega_alpha > 0.0 && r.omega_alpha.is_finite())) {
                return Err(CliError::validation(
                    "roots_file.omega_alpha",
                    format!("must be > 0, got {}", bad.omega_alpha),
                ));
            }
            sets
        }
        None => {
            let m = s.medium()?;
            let sw = s.sumrules.omega_alpha.clone().unwrap_or(Sweep::List(vec![0.5, 1.0, 2.0]));
            let was = positive(sw.values("sumrules.omega_alpha")?, "sumrules.omega_alpha")?;
            let roots = sweep(&was, |wa| Ok(transverse_roots(&m, wa, None)?))?;
            was.into_iter().zip(roots).map(|(omega_alpha, roots)| RootSet { omega_alpha, roots }).collect()
        }
    };
    let mut entries = Vec::new();
    let mut failing = Vec::new();
    for set in &sets {
        let im_sum = sum_rule_im(&set.roots, set.omega_alpha);
        let re_sum = sum_rule_re(&set.roots, set.omega_alpha);
        let n_roots = set.roots.iter().filter(|r| r.family == Family::Transverse).count();
        let entry = json!({ "omega_alpha": set.omega_alpha, "im_sum": im_sum, "re_sum": re_sum, "n_roots": n_roots });
        if !(im_sum.abs() <= SUM_RULE && (re_sum - 1.0).abs() <= SUM_RULE) {
            failing.push(entry.clone());
        }
        entries.push(entry);
    }
    let failure = (!failing.is_empty()).then(|| {
        CliError::numerical(
            "sum rules",
            format!("{} root set(s) violate the sum rules; the root set is incomplete", failing.len()),
            json!({ "tolerance": SUM_RULE, "failing": failing }),
        )
    });
    Ok(Output::report("sumrules", serde_json::Value::Array(entries)).failing(failure))
}

fn component_index(c: &str) -> Option<(usize, usize)> {
    let axis = |ch: u8| match ch {
        b'x' => Some(0),
        b'y' => Some(1),
        b'z' => Some(2),
        _ => None,
    };
    match c.as_bytes() {
        [a, b] => Some((axis(*a)?, axis(*b)?)),
        _ => None,
    }
}

pub fn green(s: &Scenario) -> CliResult<Output> {
    let g = &s.green;
    let comps = g
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            component_index(c).ok_or_else(|| {
                CliError::validation(format!("green.components[{i}]"), format!("`{c}` is not one of xx, xy, …, zz"))
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    if comps.is_empty() {
        return Err(CliError::validation("green.components", "request at least one component"));
    }
    let dir = Vector3::from(g.direction);
    if !(dir.norm() > 0.0 && dir.norm().is_finite()) {
        return Err(CliError::validation("green.direction", "must be a nonzero finite vector"));
    }
    let dir = dir.normalize();
    let src = Vector3::from(g.source);
    let omegas = positive(g.omega.values("green.omega")?, "green.omega")?;
    let seps = positive(g.separation.values("green.separation")?, "green.separation")?;
    let map = s.map()?;
    if map.is_some() && g.kind == GreenKind::S {
        return Err(CliError::validation("green.kind", "`S` is only available for a homogeneous medium"));
    }
    let medium = if map.is_none() { Some(s.medium()?) } else { None };
    let label = match g.kind {
        GreenKind::G => "G",
        GreenKind::S => "S",
    };
    let blocks = sweep(&omegas, |w| {
        let omega = Complex64::new(w, 0.0);
        let eval: Box<dyn Fn(&Vector3<f64>) -> CliResult<Dyad>> = match (&map, &medium) {
            (Some(map), _) => {
                let grid = ScattererGrid::from_map(map, omega)?;
                let solved = lippmann_schwinger_solve(&grid, map.background())?;
                Box::new(move |x| Ok(solved.green(&Site::Point(*x), &Site::Point(src))?))
            }
            (None, Some(m)) => {
                let m = m.clone();
                let kind = g.kind;
                Box::new(move |x| {
                    Ok(match kind {
                        GreenKind::G => g_dyadic_homogeneous(&m, x, &src, omega)?.tensor,
                        GreenKind::S => s_dyadic_homogeneous(&m, x, &src, omega)?.tensor,
                    })
                })
            }
            (None, None) => unreachable!("a medium is always resolved without a map"),
        };
        seps.iter()
            .map(|&r| {
                let d = eval(&(src + dir * r))?;
                let mut row = vec![w.into(), r.into()];
                for &(a, b) in &comps {
                    row.push(d[(a, b)].re.into());
                    row.push(d[(a, b)].im.into());
                }
                Ok(row)
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let mut header = vec!["omega".to_string(), "separation".to_string()];
    for c in &g.components {
        header.push(format!("Re_{label}_{c}"));
        header.push(format!("Im_{label}_{c}"));
    }
    let mut t = Table::with_header("green", header);
    for row in blocks.into_iter().flatten() {
        t.push(row);
    }
    Ok(Output::table(t))
}

pub fn hopfield(s: &Scenario) -> CliResult<Output> {
    let p = &s.hopfield;
    let m = HopfieldMedium::new(p.omega0, p.omegap).map_err(|e| CliError::from(e).within("hopfield"))?;
    let was = positive(p.omega_alpha.values("hopfield.omega_alpha")?, "hopfield.omega_alpha")?;
    let mut t = Table::new("hopfield", &["omega_alpha", "Omega_plus", "Omega_minus"]);
    for &wa in &was {
        let (plus, minus, _) = hopfield_frequencies(wa, &m)?;
        t.push(vec![wa.into(), plus.into(), minus.into()]);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut states = Vec::with_capacity(p.random_states);
    let (mut max_dev, mut max_trip): (f64, f64) = (0.0, 0.0);
    for _ in 0..p.random_states {
        let mut v = || rng.gen_range(-1.0..1.0);
        let tf: Vec<ModeFields> = was.iter().map(|_| ModeFields { e: v(), b: v(), p: v(), p_dot: v() }).collect();
        let lf = vec![LongitudinalFields { p: v(), p_dot: v() }];
        let amps = hopfield_transform(&m, &was, &tf, &lf)?;
        let (raw, diag, dev) = hamiltonian_diagonal(&m, &was, &amps, &tf, &lf)?;
        let (tb, lb) = hopfield_inverse(&m, &was, &amps)?;
        for (a, b) in tf.iter().zip(&tb) {
            for d in [a.e - b.e, a.b - b.b, a.p - b.p, a.p_dot - b.p_dot] {
                max_trip = max_trip.max(d.abs());
            }
        }
        for (a, b) in lf.iter().zip(&lb) {
            max_trip = max_trip.max((a.p - b.p).abs()).max((a.p_dot - b.p_dot).abs());
        }
        max_dev = max_dev.max(dev);
        states.push(json!({ "H_raw": raw, "H_diag": diag, "rel_dev": dev }));
    }
    let report = json!({
        "omega0": m.omega0,
        "omegap": m.omegap,
        "omega_L": m.omega_l(),
        "seed": s.seed,
        "n_states": p.random_states,
        "max_rel_dev": max_dev,
        "max_round_trip": max_trip,
        "tolerance": HOPFIELD_DIAGONAL,
        "states": states,
    });
    let failure = (max_dev > HOPFIELD_DIAGONAL).then(|| {
        CliError::numerical(
            "Hopfield diagonalization",
            format!("raw and diagonal energies differ by {max_dev:e}"),
            json!({ "max_rel_dev": max_dev, "tolerance": HOPFIELD_DIAGONAL }),
        )
    });
    Ok(Output::table(t).with_report("hopfield_energy", report).failing(failure))
}

pub fn quasimode(s: &Scenario) -> CliResult<Output> {
    let m = s.medium()?;
    let p = &s.quasimode;
    if !(p.width_factor > 0.0 && p.width_factor.is_finite()) {
        return Err(CliError::validation("quasimode.width_factor", "must be finite and > 0"));
    }
    let was = positive(p.omega_alpha.values("quasimode.omega_alpha")?, "quasimode.omega_alpha")?;
    // A window wider than the mode's own frequency means the mode is too
    // damped to be isolated; say so instead of naming the internal window.
    let too_damped = |e: polariton_core::Error| match CliError::from(e) {
        CliError::Validation { field, message } if field == "half_width" => CliError::validation(
            "quasimode",
            format!("medium too strongly damped for a quasi-mode window ({message}); reduce gamma or width_factor"),
        ),
        other => other,
    };
    let mut rows: Vec<QuasimodeRow> =
        sweep(&was, |wa| transverse_quasimodes(&m, wa, p.width_factor).map_err(too_damped))?
            .into_iter()
            .flatten()
            .collect();
    if p.longitudinal {
        rows.extend(longitudinal_quasimodes(&m, p.width_factor).map_err(too_damped)?);
    }
    let mut t = Table::new("quasimode", &["omega_alpha", "branch", "Omega", "integral", "target", "rel_err"]);
    for r in rows {
        t.push(vec![
            r.omega_alpha.into(),
            r.branch.into(),
            r.omega.re.into(),
            r.integral.into(),
            r.target.into(),
            r.rel_err.into(),
        ]);
    }
    Ok(Output::table(t))
}

fn padded(v: &[f64], n: usize, field: &str) -> CliResult<Vec<f64>> {
    if v.len() > n {
        return Err(CliError::validation(field, format!("{} values given for {n} modes", v.len())));
    }
    let mut out = v.to_vec();
    out.resize(n, 0.0);
    Ok(out)
}

pub fn evolve(s: &Scenario) -> CliResult<Output> {
    let p = &s.evolve;
    let basis = match &p.basis {
        BasisSpec::Frequencies { omegas } => RealModeBasis::from_frequencies(omegas),
        BasisSpec::Line { length, modes } => RealModeBasis::line(*length, *modes),
        BasisSpec::Box { side, k_max, polarization } => {
            BoxModeBasis::cubic(*side, *k_max).and_then(|b| RealModeBasis::from_box(&b, *polarization))
        }
    }
    .map_err(|e| CliError::from(e).within("evolve.basis"))?;
    let map = s.map()?;
    let medium = s.medium()?;
    let layout = match &map {
        Some(map) => MediumLayout::Map(map),
        None => MediumLayout::Homogeneous(&medium),
    };
    let sys = assemble_system(layout, &basis, &p.bath).map_err(|e| CliError::from(e).within("evolve"))?;
    let n = sys.n_modes();
    if let Some(bad) = p.probes.iter().find(|&&i| i >= n) {
        return Err(CliError::validation("evolve.probes", format!("mode {bad} does not exist ({n} modes)")));
    }
    let d = padded(&p.initial.mode_d, n, "evolve.initial.mode_d")?;
    let b = padded(&p.initial.mode_b, n, "evolve.initial.mode_b")?;
    let mut z0: State = sys.field_state(&d, &b)?;
    let amp = p.initial.bath_amplitude;
    if !(amp >= 0.0 && amp.is_finite()) {
        return Err(CliError::validation("evolve.initial.bath_amplitude", "must be finite and ≥ 0"));
    }
    if amp > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        for k in n..sys.dim() {
            z0.x[k] = rng.gen_range(-amp..amp);
            z0.p[k] = rng.gen_range(-amp..amp);
        }
    }
    let mut cfg = p.integrator;
    cfg.full_state = false;
    let tr = integrate(&sys, &z0, &cfg).map_err(|e| CliError::from(e).within("evolve.integrator"))?;

    let mut header = vec!["t".to_string(), "energy".to_string()];
    for &i in &p.probes {
        header.push(format!("D_{i}"));
        header.push(format!("B_{i}"));
    }
    let mut t = Table::with_header("trajectory", header);
    for (k, &time) in tr.times.iter().enumerate() {
        let mut row = vec![time.into(), tr.energy[k].into()];
        for &i in &p.probes {
            row.push(tr.mode_d[k][i].into());
            row.push(tr.mode_b[k][i].into());
        }
        t.push(row);
    }
    let t_end = *tr.times.last().unwrap_or(&0.0);
    let ledger = energy_report(&sys, &tr.final_state, t_end, &z0);
    let report = json!({
        "ledger": ledger,
        "energy_drift": tr.energy_drift(),
        "truncation_loss": sys.truncation_loss(),
        "n_modes": n,
        "n_bath": sys.n_bath(),
        "dt": cfg.dt,
        "steps": cfg.steps(),
        "scheme": cfg.scheme,
        "seed": s.seed,
    });
    Ok(Output::table(t).with_report("energy", report))
}
