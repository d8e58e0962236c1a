//! The invariant suite behind `polariton verify`.
//!
//! Every check reports a measured value and the bound it must respect. The
//! `--quick` mode skips the two long bath simulations.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use polariton_core::dispersion::{longitudinal_roots, transverse_roots, upper_half_zero_count};
use polariton_core::evolution::experiment::{
    emergence_experiment, homogeneous_truncation, langevin_truncation_experiment, EmergenceConfig, TruncationConfig,
};
use polariton_core::evolution::reversal::time_reversal_check;
use polariton_core::evolution::{
    assemble_system, integrate, BathConfig, IntegratorConfig, MediumLayout, RealModeBasis, State,
};
use polariton_core::greens::dyadic::{green_closed_form, s_identity_defect};
use polariton_core::greens::{
    depolarization_dyad, lippmann_schwinger_solve, max_abs, BoxModeBasis, ExclusionShape, GreenBackground,
    HomogeneousBackground, ScatterCell, ScattererGrid, Site, SolvedGreen,
};
use polariton_core::hopfield::{
    hamiltonian_diagonal, hopfield_frequencies, hopfield_transform, longitudinal_oscillation, HopfieldMedium,
    LongitudinalFields, ModeFields,
};
use polariton_core::propagators::{
    h_anticausal_bromwich, h_bromwich, sum_rule_im, sum_rule_re, u_bromwich, BromwichConfig, ResidueExpansion,
};
use polariton_core::quasimode::{
    longitudinal_commutator_integral, longitudinal_target, transverse_commutator_integral, transverse_target,
    FrequencyWindow,
};
use polariton_core::{LorentzResonance, Medium};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::table::{Output, Table};

/// How a measured value is compared with its bound.
#[derive(Clone, Copy)]
enum Bound {
    Below(f64),
    AtLeast(f64),
}

struct Check {
    criterion: usize,
    name: &'static str,
    value: f64,
    bound: Bound,
}

impl Check {
    fn below(criterion: usize, name: &'static str, value: f64, tol: f64) -> Self {
        Check { criterion, name, value, bound: Bound::Below(tol) }
    }

    fn at_least(criterion: usize, name: &'static str, value: f64, min: f64) -> Self {
        Check { criterion, name, value, bound: Bound::AtLeast(min) }
    }

    fn pass(&self) -> bool {
        match self.bound {
            Bound::Below(t) => self.value < t,
            Bound::AtLeast(m) => self.value >= m,
        }
    }

    fn relation(&self) -> (&'static str, f64) {
        match self.bound {
            Bound::Below(t) => ("<", t),
            Bound::AtLeast(m) => (">=", m),
        }
    }
}

type Checks = polariton_core::Result<Vec<Check>>;

fn reference() -> Medium {
    Medium::single(1.0, 1.0, 0.1).expect("reference medium is valid")
}

fn sum_rules() -> Checks {
    let m = reference();
    let (mut im, mut re): (f64, f64) = (0.0, 0.0);
    for wa in [0.5, 1.0, 2.0] {
        let roots = transverse_roots(&m, wa, None)?;
        im = im.max(sum_rule_im(&roots, wa).abs());
        re = re.max((sum_rule_re(&roots, wa) - 1.0).abs());
    }
    Ok(vec![Check::below(1, "imaginary sum rule", im, 1e-8), Check::below(1, "real sum rule", re, 1e-8)])
}

fn propagators() -> Checks {
    let m = reference();
    let cfg = BromwichConfig::default();
    let (mut worst, mut boundary): (f64, f64) = (0.0, 0.0);
    for wa in [0.5, 1.0, 2.0] {
        let e = ResidueExpansion::new(&transverse_roots(&m, wa, None)?, wa)?;
        let h = h_bromwich(&m, wa, &cfg)?;
        let u = u_bromwich(&m, wa, &cfg)?;
        for k in 1..=2000 {
            let t = k as f64 * 0.01 / wa;
            worst = worst.max((e.h(t) - h.at(t)?).abs()).max((e.u(t) - u.at(t)?).abs());
        }
        boundary = boundary.max(e.h(0.0).abs()).max(e.u(0.0).abs()).max((e.du(0.0) - 1.0).abs());
    }
    Ok(vec![
        Check::below(2, "residue vs Bromwich propagators", worst, 1e-6),
        Check::below(2, "propagator boundary values", boundary, 1e-8),
    ])
}

fn upper_half_plane() -> Checks {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0i64;
    for k in 0..10 {
        let n = rng.gen_range(1..=3);
        let res = (0..n)
            .map(|_| LorentzResonance::new(rng.gen_range(0.1..3.0), rng.gen_range(0.2..3.0), rng.gen_range(0.01..0.5)))
            .collect();
        let m = Medium::new(format!("random-{k}"), res)?;
        let wa = rng.gen_range(0.2..3.0);
        worst = worst.max(upper_half_zero_count(&m, wa, 40.0 * m.max_omega().max(wa))?.abs());
    }
    let planted = Medium::unchecked_for_tests("planted", vec![LorentzResonance::new(1.0, 1.0, -0.1)]);
    let count = upper_half_zero_count(&planted, 1.0, 100.0)?;
    Ok(vec![
        Check::below(3, "upper-half-plane zeros of passive media", worst as f64, 0.5),
        Check::at_least(3, "upper-half-plane zeros of planted violation", count as f64, 1.0),
    ])
}

fn hopfield() -> Checks {
    let hm = HopfieldMedium::new(1.0, 1.0)?;
    let (plus, minus, _) = hopfield_frequencies(1.0, &hm)?;
    let closed = [(3.0 - 5f64.sqrt()) / 2.0, (3.0 + 5f64.sqrt()) / 2.0];
    let lossless = Medium::lossless("hopfield", vec![LorentzResonance::new(1.0, 1.0, 0.0)])?;
    let mut numeric: Vec<f64> =
        transverse_roots(&lossless, 1.0, None)?.iter().map(|r| r.omega.re * r.omega.re).collect();
    numeric.sort_by(f64::total_cmp);
    let mut roots = (minus * minus - closed[0]).abs().max((plus * plus - closed[1]).abs());
    if numeric.len() == 2 {
        roots = roots.max((numeric[0] - closed[0]).abs()).max((numeric[1] - closed[1]).abs());
    } else {
        roots = f64::INFINITY;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut dev: f64 = 0.0;
    for _ in 0..100 {
        let m = HopfieldMedium::new(rng.gen_range(0.3..3.0), rng.gen_range(0.3..3.0))?;
        let n = rng.gen_range(1..6);
        let was: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..4.0)).collect();
        let mut v = || rng.gen_range(-1.0..1.0);
        let t: Vec<ModeFields> = (0..n).map(|_| ModeFields { e: v(), b: v(), p: v(), p_dot: v() }).collect();
        let l = vec![LongitudinalFields { p: v(), p_dot: v() }];
        let amps = hopfield_transform(&m, &was, &t, &l)?;
        dev = dev.max(hamiltonian_diagonal(&m, &was, &amps, &t, &l)?.2);
    }

    let mut sys = assemble_system(
        MediumLayout::Homogeneous(&Medium::vacuum()),
        &RealModeBasis::from_frequencies(&[1.0])?,
        &BathConfig::default(),
    )?;
    sys.add_longitudinal(&hm.to_medium(), &BathConfig::default(), 1)?;
    let mut z = State::zeros(sys.dim());
    z.x[1] = 1.0;
    let tr = integrate(&sys, &z, &IntegratorConfig::new(0.005, 20.0).stride(200).full_state(true))?;
    let mut ode: f64 = 0.0;
    for (s, &t) in tr.states.iter().zip(&tr.times) {
        ode = ode.max((sys.polarizations(&s.x)[0] - longitudinal_oscillation(1.0, 0.0, &hm, t, 0.0)).abs());
    }
    Ok(vec![
        Check::below(4, "Hopfield branches vs quartic roots", roots, 1e-12),
        Check::below(4, "raw vs diagonal Hopfield energy", dev, 1e-10),
        Check::below(4, "longitudinal oscillation vs integrator", ode, 1e-9),
    ])
}

fn quasimodes() -> Checks {
    let m = Medium::single(1.0, 1.0, 1e-4)?;
    let (mut err, mut spread): (f64, f64) = (0.0, 0.0);
    let mut record = |vals: &[f64], target: f64| {
        let (lo, hi) = vals.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        err = err.max((vals[0] - target).abs() / target);
        spread = spread.max((hi - lo) / lo);
    };
    for root in transverse_roots(&m, 1.0, None)? {
        let base = FrequencyWindow::around(&root)?;
        let vals = [1.0, 2.0, 4.0]
            .iter()
            .map(|&s| Ok(transverse_commutator_integral(&m, 1.0, &base.scaled(s)?)?.value))
            .collect::<polariton_core::Result<Vec<_>>>()?;
        record(&vals, transverse_target(&m, root.omega.re)?);
    }
    for root in longitudinal_roots(&m, None)? {
        let base = FrequencyWindow::around(&root)?;
        let vals = [1.0, 2.0, 4.0]
            .iter()
            .map(|&s| Ok(longitudinal_commutator_integral(&m, &base.scaled(s)?)?.value))
            .collect::<polariton_core::Result<Vec<_>>>()?;
        record(&vals, longitudinal_target(&m, root.omega.re)?);
    }
    Ok(vec![
        Check::below(5, "quasi-mode commutator vs group-velocity factor", err, 0.01),
        Check::below(5, "quasi-mode window-width sweep", spread, 0.005),
    ])
}

fn cube_cells(n: i64, dx: f64) -> Vec<ScatterCell> {
    let mut cells = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                cells.push(ScatterCell {
                    index: [i, j, k],
                    center: Vector3::new((i as f64 + 0.5) * dx, (j as f64 + 0.5) * dx, (k as f64 + 0.5) * dx),
                    volume: dx.powi(3),
                });
            }
        }
    }
    cells
}

fn greens() -> Checks {
    let depol = (depolarization_dyad(&ExclusionShape::Sphere)? - Matrix3::identity() / 3.0).abs().max();
    let basis = BoxModeBasis::cubic(6.0, 4.0)?;
    let s_defect = s_identity_defect(
        &basis,
        &reference(),
        &Vector3::new(0.3, -0.1, 0.8),
        &Vector3::new(0.1, 0.0, 0.0),
        Complex64::new(1.3, 0.0),
    )?;

    let w = Complex64::new(2.0, 0.0);
    let cells = cube_cells(1, 0.2);
    let chi = Complex64::new(1.5, 0.4);
    let grid = ScattererGrid { cells: cells.clone(), contrast: vec![chi], omega: w };
    let solved = lippmann_schwinger_solve(&grid, &Medium::vacuum())?;
    let (c, vol) = (cells[0].center, cells[0].volume);
    let t = w * w * vol * chi / (1.0 + chi / 3.0);
    let (x, y) = (Vector3::new(1.0, 0.4, -0.3), Vector3::new(-0.6, 0.9, 0.5));
    let gb = |a: &Vector3<f64>, b: &Vector3<f64>| green_closed_form(w, &(a - b));
    let expect = gb(&x, &y) + gb(&x, &c) * gb(&c, &y) * t;
    let single = max_abs(&(solved.green(&Site::Point(x), &Site::Point(y))? - expect)) / max_abs(&expect);

    let cells = cube_cells(5, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = cells.len();
    let chi1: Vec<Complex64> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Complex64::new(rng.gen_range(0.0..2.0), rng.gen_range(0.0..0.5))
            } else {
                0.0.into()
            }
        })
        .collect();
    let chi2: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..0.3))).collect();
    let total: Vec<Complex64> = chi1.iter().zip(&chi2).map(|(a, b)| a + b).collect();
    let vac = || HomogeneousBackground::new(&Medium::vacuum(), w, cells.clone());
    let two_step = SolvedGreen::solve(SolvedGreen::solve(vac()?, &chi1)?, &chi2)?;
    let direct = SolvedGreen::solve(vac()?, &total)?;
    let sites = [Site::Point(Vector3::new(1.0, 0.2, 0.3)), Site::Cell(0), Site::Cell(62), Site::Cell(124)];
    let mut grid_err: f64 = 0.0;
    for a in &sites {
        for b in &sites {
            if a == b && matches!(a, Site::Point(_)) {
                continue;
            }
            let gd = direct.green(a, b)?;
            grid_err = grid_err.max(max_abs(&(two_step.green(a, b)? - gd)) / max_abs(&gd));
        }
    }
    Ok(vec![
        Check::below(6, "sphere depolarization dyad", depol, 1e-10),
        Check::below(6, "S = curl curl G per mode", s_defect, 1e-12),
        Check::below(6, "single-cell scatterer vs closed form", single, 1e-12),
        Check::below(6, "two-step vs direct scattering solution", grid_err, 1e-8),
    ])
}

fn emergence() -> Checks {
    let r = emergence_experiment(&EmergenceConfig::new(reference(), 1.0))?;
    Ok(vec![
        Check::below(7, "emergent decay rate", r.im_rel_err, 0.05),
        Check::below(7, "emergent oscillation frequency", r.re_rel_err, 0.01),
        Check::below(7, "energy drift over 100 periods", r.energy_drift, 1e-8),
        Check::below(7, "symplectic deviation of the full flow", r.symplectic.deviation, 1e-8),
    ])
}

fn truncation() -> Checks {
    let cfg = TruncationConfig::default();
    let r = langevin_truncation_experiment(&cfg)?;
    let h = homogeneous_truncation(&cfg, 20.0)?;
    Ok(vec![
        Check::at_least(8, "localized absorber: scattered-only error plateau", r.plateau_value, f64::MIN_POSITIVE),
        Check::below(8, "localized absorber: plateau spread", r.plateau_spread, 0.01),
        Check::below(8, "homogeneous absorber: scattered-only error", h.scattered_only_error, 1e-6),
        Check::at_least(8, "symplectic deviation of the truncated flow", r.symplectic_truncated.deviation, 0.1),
        Check::below(8, "symplectic deviation of the full flow", r.symplectic_full.deviation, 1e-8),
    ])
}

fn time_reversal() -> Checks {
    let m = reference();
    let sys = assemble_system(
        MediumLayout::Homogeneous(&m),
        &RealModeBasis::from_frequencies(&[1.0])?,
        &BathConfig { lines: 80, cutoff: None },
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut z0 = State::zeros(sys.dim());
    for v in z0.x.iter_mut().chain(z0.p.iter_mut()) {
        *v = rng.gen_range(-1.0..1.0);
    }
    let dt = 0.05 / sys.max_frequency();
    let tr = integrate(&sys, &z0, &IntegratorConfig::new(dt, 20.0).full_state(true))?;
    let residual = time_reversal_check(&sys, &tr)?;
    let cfg = BromwichConfig::default();
    let h = h_bromwich(&m, 1.0, &cfg)?;
    let a = h_anticausal_bromwich(&m, 1.0, &cfg)?;
    let mirror = (-20_000i64..20_000).map(|j| (a.sample(j) - h.sample(-j)).abs()).fold(0.0, f64::max);
    Ok(vec![
        Check::below(9, "reversed trajectory residual", residual, 1e-7),
        Check::below(9, "anticausal kernel vs mirrored causal kernel", mirror, 1e-12),
    ])
}

pub fn verify(quick: bool) -> CliResult<Output> {
    type Suite = fn() -> Checks;
    let mut suites: Vec<(usize, Suite)> =
        vec![(1, sum_rules), (2, propagators), (3, upper_half_plane), (4, hopfield), (5, quasimodes), (6, greens)];
    if !quick {
        suites.push((7, emergence));
        suites.push((8, truncation));
    }
    suites.push((9, time_reversal));

    let mut t = Table::new("verify", &["criterion", "check", "value", "relation", "bound", "pass"]);
    let mut failing = Vec::new();
    for (criterion, suite) in suites {
        log::info!("verifying criterion {criterion}");
        match suite() {
            Ok(checks) => {
                for c in checks {
                    let (rel, bound) = c.relation();
                    let pass = c.pass();
                    if !pass {
                        failing.push(json!({ "criterion": c.criterion, "check": c.name, "value": c.value, "relation": rel, "bound": bound }));
                    }
                    t.push(vec![
                        c.criterion.into(),
                        c.name.into(),
                        c.value.into(),
                        rel.into(),
                        bound.into(),
                        pass.into(),
                    ]);
                }
            }
            Err(e) => {
                failing.push(json!({ "criterion": criterion, "error": e.to_string() }));
                t.push(vec![
                    criterion.into(),
                    "error".into(),
                    f64::NAN.into(),
                    "".into(),
                    f64::NAN.into(),
                    false.into(),
                ]);
            }
        }
    }
    let failure = (!failing.is_empty()).then(|| {
        CliError::numerical("verify", format!("{} check(s) failed", failing.len()), json!({ "failing": failing }))
    });
    Ok(Output::table(t).failing(failure))
}
