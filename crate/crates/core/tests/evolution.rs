use polariton_core::evolution::energy::energy_report;
use polariton_core::evolution::longitudinal::{longitudinal_evolution, volterra_solve};
use polariton_core::evolution::reversal::time_reversal_check;
use polariton_core::evolution::symplectic::{symplectic_form_check, FlowVariant, Sampling};
use polariton_core::evolution::*;
use polariton_core::hopfield::{HopfieldMedium, HopfieldMode, ModeFields};
use polariton_core::medium::{LorentzResonance, MediumCell};
use polariton_core::{Medium, SpatialMediumMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference() -> Medium {
    Medium::single(1.0, 1.0, 0.1).unwrap()
}

fn single_mode(medium: &Medium, omega: f64, lines: usize) -> LinearSystem {
    let basis = RealModeBasis::from_frequencies(&[omega]).unwrap();
    assemble_system(MediumLayout::Homogeneous(medium), &basis, &BathConfig { lines, cutoff: None }).unwrap()
}

fn random_state(sys: &LinearSystem, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = State::zeros(sys.dim());
    for v in st.x.iter_mut().chain(st.p.iter_mut()) {
        *v = rng.gen_range(-1.0..1.0);
    }
    st
}

#[test]
fn vacuum_mode_is_harmonic() {
    let w = 1.3;
    let sys = single_mode(&Medium::vacuum(), w, 10);
    assert_eq!(sys.n_bath(), 0);
    let z0 = sys.field_state(&[w], &[0.0]).unwrap(); // x = 1
    let t_end = 100.0 / w;
    let dt = t_end / 20000.0;
    let tr = integrate(&sys, &z0, &IntegratorConfig::new(dt, t_end).stride(20000)).unwrap();
    let x_end = tr.final_state.x[0];
    assert!((x_end - (w * t_end).cos()).abs() < 1e-9, "{}", x_end - (w * t_end).cos());
}

#[test]
fn two_dof_normal_modes() {
    let (w, nu, g) = (1.0, 1.4, 0.5);
    let m = Medium::lossless("line", vec![LorentzResonance::new(g * g, nu, 0.0)]).unwrap();
    let sys = single_mode(&m, w, 0);
    let prop = DiscreteModePropagators::for_mode(&sys, 0).unwrap();
    // K = [[w², −wg], [−wg, g² + ν²]]
    let (a, b, c) = (w * w, -w * g, g * g + nu * nu);
    let mean = 0.5 * (a + c);
    let rad = (0.25 * (a - c).powi(2) + b * b).sqrt();
    let expect = [(mean - rad).sqrt(), (mean + rad).sqrt()];
    for (f, e) in prop.frequencies().iter().zip(expect) {
        assert!((f - e).abs() < 1e-12, "{f} vs {e}");
    }
    assert!(sys.hamiltonian_defect() == 0.0);
}

#[test]
fn energy_drift_and_order() {
    let sys = single_mode(&reference(), 1.0, 60);
    let z0 = random_state(&sys, 3);
    let t_end = 100.0;
    let wmax = sys.max_frequency();
    let drift = |dt: f64| integrate(&sys, &z0, &IntegratorConfig::new(dt, t_end).stride(10)).unwrap().energy_drift();
    let dt = 0.09 / wmax;
    let d8 = drift(dt);
    assert!(d8 < 1e-8, "{d8}");
    // halving the step gains 2^order (Yoshida-8 is already at round-off here)
    for scheme in [Scheme::Leapfrog, Scheme::Yoshida4, Scheme::Yoshida6] {
        let run = |dt: f64| {
            let mut cfg = IntegratorConfig::new(dt, t_end).stride(10).scheme(scheme);
            cfg.drift_abort = 1.0;
            integrate(&sys, &z0, &cfg).unwrap().energy_drift()
        };
        let r = run(dt) / run(dt / 2.0);
        let expect = 2f64.powi(scheme.order() as i32);
        assert!(r > 0.6 * expect && r < 1.6 * expect, "{scheme:?}: {r}");
    }
}

#[test]
fn bath_kernel_reconstruction() {
    let m = reference();
    let b = BathDiscretization::for_medium(&m, &BathConfig::default()).unwrap();
    let rec = b.recurrence_time(&m, 1e-3, 2000.0).unwrap();
    let err = b.kernel_error(&m, 0.5 * rec, 4000);
    let early = b.kernel_error(&m, 10.0, 400);
    // the cutoff floor sits at small τ
    assert!((early - err).abs() < 0.1 * err);
    assert!(err < polariton_core::evolution::bath::KERNEL_BOUND, "{err} up to {}", 0.5 * rec);
    let wider = BathDiscretization::for_medium(&m, &BathConfig { lines: 800, cutoff: Some(20.0) }).unwrap();
    assert!(wider.kernel_error(&m, 10.0, 400) < 0.5 * early);
    assert!(rec > 150.0, "{rec}");
}

#[test]
fn hopfield_amplitudes_rotate() {
    let hm = HopfieldMedium::new(1.0, 1.0).unwrap();
    let sys = single_mode(&hm.to_medium(), 1.0, 0);
    let mode = HopfieldMode::new(hm, 1.0).unwrap();
    let fields_of = |st: &State| {
        let pol = sys.polarizations(&st.x)[0];
        let g = sys.sites()[0].g[0];
        ModeFields { e: sys.mode_fields(&st.x)[0], b: st.p[0], p: pol, p_dot: g * st.p[1] }
    };
    // random lossless data
    let z0 = random_state(&sys, 11);
    let phi0 = mode.amplitudes(&fields_of(&z0)).unwrap();
    let t = 7.3;
    let tr = integrate(&sys, &z0, &IntegratorConfig::new(0.002, t).stride(100000)).unwrap();
    let phi = mode.amplitudes(&fields_of(&tr.final_state)).unwrap();
    let rot = |p: num_complex::Complex64, w: f64| p * num_complex::Complex64::from_polar(1.0, -w * t);
    assert!((phi.0 - rot(phi0.0, mode.plus)).norm() < 1e-10);
    assert!((phi.1 - rot(phi0.1, mode.minus)).norm() < 1e-10);
    // energy identity along the trajectory
    let raw = sys.energy(&tr.final_state);
    let raw_h = polariton_core::hopfield::mode_energy(&hm, &fields_of(&tr.final_state));
    assert!((raw - raw_h).abs() < 1e-12 * raw);
}

#[test]
fn split_recombines() {
    let m = reference();
    let sys = single_mode(&m, 1.0, 120);
    let dt = 0.05 / sys.max_frequency();
    let t_end = 40.0;
    let stride = (0.5 / dt).round() as usize;
    let dt = 0.5 / stride as f64;
    let cfg = IntegratorConfig::new(dt, t_end).stride(stride);
    let generic = random_state(&sys, 5);
    let tr = integrate(&sys, &generic, &cfg).unwrap();
    let s = split_free_scattered(&sys, &generic, &tr, 0, PropagatorSource::Discrete, 0.01).unwrap();
    assert!(s.residual < 1e-5, "{}", s.residual);

    let field_only = sys.field_part(&generic);
    let tr = integrate(&sys, &field_only, &cfg).unwrap();
    let s = split_free_scattered(&sys, &field_only, &tr, 0, PropagatorSource::Discrete, 0.01).unwrap();
    assert!(s.scattered.iter().all(|v| *v == 0.0));
    assert!(s.residual < 1e-6, "{}", s.residual);

    let bath_only = sys.bath_part(&generic);
    let tr = integrate(&sys, &bath_only, &cfg).unwrap();
    let s = split_free_scattered(&sys, &bath_only, &tr, 0, PropagatorSource::Discrete, 0.01).unwrap();
    assert!(s.free.iter().all(|v| *v == 0.0));
    assert!(s.residual < 1e-5, "{}", s.residual);
}

#[test]
fn energy_ledger() {
    let m = reference();
    let sys = single_mode(&m, 1.0, 200);
    let z0 = sys.field_state(&[1.0], &[0.0]).unwrap();
    let dt = 0.05 / sys.max_frequency();
    let tr = integrate(&sys, &z0, &IntegratorConfig::new(dt, 100.0).stride(200).full_state(true)).unwrap();
    let first = energy_report(&sys, &tr.states[0], 0.0, &z0);
    let last = energy_report(&sys, tr.states.last().unwrap(), *tr.times.last().unwrap(), &z0);
    assert!(tr.energy_drift() < 1e-8);
    assert!(last.electromagnetic < 0.2 * first.electromagnetic, "{last:?}");
    assert!(last.ledger_defect < 1e-8 && last.split_defect < 1e-14);
    assert_eq!(first.h_m0, 0.0);

    let vac = single_mode(&Medium::vacuum(), 1.0, 10);
    let z = vac.field_state(&[0.3], &[0.4]).unwrap();
    let tr = integrate(&vac, &z, &IntegratorConfig::new(0.005, 20.0).stride(100).full_state(true)).unwrap();
    for (s, &t) in tr.states.iter().zip(&tr.times) {
        let r = energy_report(&vac, s, t, &z);
        assert_eq!(r.material, 0.0);
        assert!((r.electromagnetic - 0.125).abs() < 1e-12);
    }
}

#[test]
fn symplectic_structure() {
    let vac = single_mode(&Medium::vacuum(), 1.0, 0);
    let r = symplectic_form_check(
        &vac,
        20.0 * std::f64::consts::PI,
        0.01,
        Scheme::Yoshida8,
        Sampling::Dense,
        FlowVariant::Full,
    )
    .unwrap();
    assert!(r.deviation < 1e-10, "{r:?}");

    let sys = single_mode(&reference(), 1.0, 40);
    let dt = 0.05 / sys.max_frequency();
    let full = symplectic_form_check(&sys, 50.0, dt, Scheme::Yoshida8, Sampling::Dense, FlowVariant::Full).unwrap();
    assert!(full.deviation < 1e-8 && !full.flagged, "{full:?}");
    let sampled = symplectic_form_check(
        &sys,
        50.0,
        dt,
        Scheme::Yoshida8,
        Sampling::Sampled { modes: 1, bath: 10 },
        FlowVariant::Full,
    )
    .unwrap();
    assert!(sampled.deviation < 1e-8, "{sampled:?}");
    let trunc =
        symplectic_form_check(&sys, 50.0, dt, Scheme::Yoshida8, Sampling::Dense, FlowVariant::LangevinOnly).unwrap();
    assert!(trunc.flagged && trunc.deviation > 0.5, "{trunc:?}");
}

#[test]
fn time_reversal() {
    let vac = single_mode(&Medium::vacuum(), 1.0, 0);
    let z = vac.field_state(&[0.3], &[0.4]).unwrap();
    let tr = integrate(&vac, &z, &IntegratorConfig::new(0.01, 20.0).full_state(true)).unwrap();
    let r = time_reversal_check(&vac, &tr).unwrap();
    assert!(r < 1e-9, "{r}");

    let sys = single_mode(&reference(), 1.0, 80);
    let z0 = random_state(&sys, 9);
    let dt = 0.05 / sys.max_frequency();
    let tr = integrate(&sys, &z0, &IntegratorConfig::new(dt, 20.0).full_state(true)).unwrap();
    let r = time_reversal_check(&sys, &tr).unwrap();
    assert!(r < 1e-7, "{r}");
}

#[test]
fn longitudinal_hopfield_limit() {
    let hm = HopfieldMedium::new(1.0, 1.0).unwrap();
    let sol = longitudinal_evolution(&hm.to_medium(), 1.0, 0.0, 20.0, 2000).unwrap();
    for (t, p) in sol.times.iter().zip(&sol.residue) {
        assert!((p - (2f64.sqrt() * t).cos()).abs() < 1e-12, "{t} {p}");
    }
    assert!(sol.sup_diff < 1e-6, "{}", sol.sup_diff);

    // symplectic ODE for a longitudinal site
    let mut sys = single_mode(&Medium::vacuum(), 1.0, 0);
    sys.add_longitudinal(&hm.to_medium(), &BathConfig::default(), 1).unwrap();
    let mut z = State::zeros(sys.dim());
    z.x[1] = 1.0; // P = g·X with g = ω_p = 1
    let tr = integrate(&sys, &z, &IntegratorConfig::new(0.005, 20.0).stride(400).full_state(true)).unwrap();
    for (s, &t) in tr.states.iter().zip(&tr.times) {
        let p = sys.polarizations(&s.x)[0];
        assert!((p - (2f64.sqrt() * t).cos()).abs() < 1e-9, "{t}");
    }
}

#[test]
fn longitudinal_lossy_methods_agree() {
    let m =
        Medium::new("two", vec![LorentzResonance::new(1.0, 1.0, 0.1), LorentzResonance::new(0.4, 2.5, 0.05)]).unwrap();
    let sol = longitudinal_evolution(&m, 0.7, -0.3, 30.0, 3000).unwrap();
    assert!(sol.sup_diff < 1e-6, "{}", sol.sup_diff);
    let free = vec![0.5; 10];
    assert_eq!(volterra_solve(&[0.0; 10], &free, 0.1).unwrap(), free);
}

#[test]
fn map_assembly_is_hamiltonian() {
    let slab = Medium::single(1.0, 1.0, 0.2).unwrap();
    let cells = (0..4).map(|i| MediumCell { index: [i, 0, 0], medium: slab.clone() }).collect::<Vec<_>>();
    let map = SpatialMediumMap::new(0.5, [3.0, 0.0, 0.0], Medium::vacuum(), cells).unwrap();
    let basis = RealModeBasis::line(10.0, 30).unwrap();
    let sys = assemble_system(MediumLayout::Map(&map), &basis, &BathConfig { lines: 12, cutoff: None }).unwrap();
    assert_eq!(sys.n_bath(), 48);
    assert!(sys.hamiltonian_defect() < 1e-15);
    assert!(sys.truncation_loss() > 0.0 && sys.truncation_loss() < 1.0);
}
