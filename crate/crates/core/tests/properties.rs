//! Randomized invariants over passive media, root sets and mode transforms.

use num_complex::Complex64;
use polariton_core::dispersion::{
    longitudinal_roots, root_symmetry_check, transverse_roots, upper_half_zero_count, Family,
};
use polariton_core::hopfield::{
    hamiltonian_diagonal, hopfield_inverse, hopfield_transform, HopfieldMedium, LongitudinalFields, ModeFields,
};
use polariton_core::propagators::{sum_rule_im, sum_rule_re};
use polariton_core::{LorentzResonance, Medium};
use proptest::prelude::*;

fn resonance() -> impl Strategy<Value = LorentzResonance> {
    (0.1..3.0f64, 0.2..3.0f64, 0.01..0.5f64).prop_map(|(f, w, g)| LorentzResonance::new(f, w, g))
}

fn passive_medium() -> impl Strategy<Value = Medium> {
    prop::collection::vec(resonance(), 1..=3).prop_map(|r| Medium::new("random", r).unwrap())
}

fn fields() -> impl Strategy<Value = ModeFields> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(e, b, p, p_dot)| ModeFields { e, b, p, p_dot })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn schwarz_symmetry(m in passive_medium(), re in -20.0..20.0f64, im in -0.9..5.0f64) {
        let w = Complex64::new(re, im);
        let a = m.epsilon(-w.conj()).unwrap();
        let b = m.epsilon(w).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-14 * b.norm());
    }

    #[test]
    fn absorption_is_positive_in_upper_right_quadrant(m in passive_medium(), re in 1e-3..20.0f64, im in 0.0..10.0f64) {
        prop_assert!(m.epsilon(Complex64::new(re, im)).unwrap().im > 0.0);
    }

    #[test]
    fn conductivity_is_nonnegative(m in passive_medium(), w in 1e-3..50.0f64) {
        prop_assert!(m.sigma_of_omega(w).unwrap() >= 0.0);
    }

    #[test]
    fn chi_starts_at_zero(m in passive_medium()) {
        prop_assert_eq!(m.chi_time(0.0), 0.0);
    }

    #[test]
    fn hopfield_round_trip_and_diagonal_energy(
        w0 in 0.3..3.0f64,
        wp in 0.3..3.0f64,
        modes in prop::collection::vec((0.1..4.0f64, fields()), 1..6),
        long in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 0..3),
    ) {
        let m = HopfieldMedium::new(w0, wp).unwrap();
        let was: Vec<f64> = modes.iter().map(|(w, _)| *w).collect();
        let t: Vec<ModeFields> = modes.iter().map(|(_, f)| *f).collect();
        let l: Vec<LongitudinalFields> = long.iter().map(|&(p, p_dot)| LongitudinalFields { p, p_dot }).collect();
        let amps = hopfield_transform(&m, &was, &t, &l).unwrap();
        let (t2, l2) = hopfield_inverse(&m, &was, &amps).unwrap();
        for (a, b) in t.iter().zip(&t2) {
            for (x, y) in [(a.e, b.e), (a.b, b.b), (a.p, b.p), (a.p_dot, b.p_dot)] {
                prop_assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
            }
        }
        for (a, b) in l.iter().zip(&l2) {
            prop_assert!((a.p - b.p).abs() < 1e-12 && (a.p_dot - b.p_dot).abs() < 1e-12);
        }
        let (_, _, dev) = hamiltonian_diagonal(&m, &was, &amps, &t, &l).unwrap();
        prop_assert!(dev < 1e-10, "{dev:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn root_sets_are_complete_and_symmetric(m in passive_medium(), wa in 0.2..3.0f64) {
        let roots = transverse_roots(&m, wa, None).unwrap();
        prop_assert_eq!(roots.len(), m.resonances().len() + 1);
        prop_assert!(roots.iter().all(|r| r.omega.im < 0.0 && r.omega.re > 0.0));
        prop_assert!(root_symmetry_check(&roots, &m) < 1e-10);
        prop_assert!(sum_rule_im(&roots, wa).abs() < 1e-8);
        prop_assert!((sum_rule_re(&roots, wa) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn stored_derivative_matches_contour_derivative(m in passive_medium(), wa in 0.2..3.0f64) {
        // D = d(ω√ε)/dω from the Cauchy integral (1/2πi)∮ ω√ε/(ω − Ω)² dω on
        // a circle inside the analytic disc around Ω. The disc radius is the
        // distance to the nearest pole or zero of ε (the branch points of √ε),
        // and √ε is continued along the circle, which is legitimate because
        // no branch point lies inside.
        let mut singular: Vec<Complex64> = longitudinal_roots(&m, None).unwrap().iter().map(|r| r.omega).collect();
        singular.extend(m.resonances().iter().map(|r| Complex64::new(r.omega, -r.gamma)));
        for r in transverse_roots(&m, wa, None).unwrap() {
            prop_assert_eq!(r.family, Family::Transverse);
            let reach = singular.iter().map(|s| (r.omega - s).norm()).fold(r.omega.norm(), f64::min);
            let rho = 0.5 * reach;
            let n = 256;
            let mut prev: Option<Complex64> = None;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let u = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64);
                let z = r.omega + rho * u;
                let mut root = m.epsilon(z).unwrap().sqrt();
                if let Some(p) = prev {
                    if (root - p).norm() > (root + p).norm() {
                        root = -root;
                    }
                }
                prev = Some(root);
                // dω = iρu dθ, so the integral is the mean of ω√ε/(ρu).
                acc += z * root / (rho * u);
            }
            let d = acc / n as f64;
            // The continued branch may differ from the stored one by an overall sign.
            let d = if (d - r.d).norm() < (d + r.d).norm() { d } else { -d };
            prop_assert!((d - r.d).norm() < 1e-8 * r.d.norm(), "{} vs {}", d, r.d);
        }
    }

    #[test]
    fn passive_media_have_no_upper_half_zeros(m in passive_medium(), wa in 0.2..3.0f64) {
        let radius = 40.0 * m.max_omega().max(wa);
        prop_assert_eq!(upper_half_zero_count(&m, wa, radius).unwrap(), 0);
    }
}
