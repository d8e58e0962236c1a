use num_complex::Complex64;
use polariton_core::numerics::quad::integrate;
use polariton_core::{Error, LorentzResonance, Medium};

fn reference() -> Medium {
    Medium::single(1.0, 1.0, 0.1).unwrap()
}

fn two_resonance() -> Medium {
    Medium::new("two", vec![LorentzResonance::new(1.0, 1.0, 0.3), LorentzResonance::new(0.5, 3.0, 0.05)]).unwrap()
}

/// `χ(τ)` from a damped inverse Fourier sum of `ε − 1` along `Im ω = η`.
///
/// The `1/ω²` tail `−F/(ω + i)²` (time function `Fτe^{−τ}`) is subtracted
/// before summing and added back in closed form, so the truncated sum only
/// sees an `O(ω⁻³)` remainder.
fn chi_inverse_transform(m: &Medium, tau: f64) -> f64 {
    let f_total: f64 = m.resonances().iter().map(|r| r.f).sum();
    let (eta, dw, w_max) = (0.1, 0.02, 4000.0);
    let n = (w_max / dw) as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -n..=n {
        let z = Complex64::new(k as f64 * dw, eta);
        let zi = z + Complex64::new(0.0, 1.0);
        let r = m.epsilon(z).unwrap() - 1.0 + f_total / (zi * zi);
        acc += r * Complex64::new(0.0, -(k as f64) * dw * tau).exp();
    }
    (eta * tau).exp() * dw / std::f64::consts::TAU * acc.re + f_total * tau * (-tau).exp()
}

#[test]
fn chi_time_matches_inverse_transform() {
    for m in [reference(), two_resonance()] {
        for tau in [0.3, std::f64::consts::FRAC_PI_2, 4.0, 11.0] {
            let oracle = chi_inverse_transform(&m, tau);
            let direct = m.chi_time(tau);
            assert!((oracle - direct).abs() < 1e-8, "{} τ={tau}: {oracle} vs {direct}", m.label());
        }
    }
}

#[test]
fn sigma_matches_sine_transform_of_chi() {
    for m in [reference(), two_resonance()] {
        let g_min = m.min_gamma().unwrap();
        let t_end = 45.0 / g_min;
        for w in [0.4, 1.0, 2.7] {
            let points: Vec<f64> = (0..=200).map(|k| k as f64 * t_end / 200.0).collect();
            let q = integrate(|t: f64| m.chi_time(t) * (w * t).sin(), &points, 1e-13, 1e-12, 20_000).unwrap();
            let sigma = m.sigma_of_omega(w).unwrap();
            assert!((q.value * w - sigma).abs() < 1e-9, "{} ω={w}: {} vs {sigma}", m.label(), q.value * w);
        }
    }
}

#[test]
fn sigma_examples() {
    assert_eq!(Medium::vacuum().sigma_of_omega(1.3).unwrap(), 0.0);
    assert!(matches!(reference().sigma_of_omega(0.0), Err(Error::InvalidParameter { .. })));
}

#[test]
fn kramers_kronig_reference_example() {
    let m = Medium::single(1.0, 1.0, 0.2).unwrap();
    let r = m.kramers_kronig_residual(50.0, 1 << 14).unwrap();
    assert!(r < 1e-3, "{r:e}");
}

#[test]
fn kramers_kronig_converges_monotonically() {
    for m in [Medium::single(1.0, 1.0, 0.2).unwrap(), two_resonance()] {
        let residuals: Vec<f64> =
            [256, 512, 1024, 2048, 4096].iter().map(|&n| m.kramers_kronig_residual(50.0, n).unwrap()).collect();
        for w in residuals.windows(2) {
            assert!(w[1] < w[0], "{}: {residuals:?}", m.label());
        }
    }
}

#[test]
fn kramers_kronig_rejects_lossless_and_vacuum() {
    assert!(Medium::vacuum().kramers_kronig_residual(50.0, 1024).is_err());
    let lossless = Medium::lossless("l", vec![LorentzResonance::new(1.0, 1.0, 0.0)]).unwrap();
    assert!(lossless.kramers_kronig_residual(50.0, 1024).is_err());
    assert!(reference().kramers_kronig_residual(50.0, 100).is_err());
}
