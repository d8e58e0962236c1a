//! Matrix-pencil extraction of damped oscillations from a sampled signal.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// One fitted component `a·e^{−iΩt}`, reported with `Re Ω ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FittedPole {
    pub omega: Complex64,
    /// Magnitude of the (conjugate-pair summed) amplitude.
    pub amplitude: f64,
}

/// Fits `order` complex exponentials to uniformly spaced real samples and
/// returns one pole per conjugate pair, sorted by decreasing amplitude.
pub fn matrix_pencil(samples: &[f64], spacing: f64, order: usize) -> Result<Vec<FittedPole>> {
    let n = samples.len();
    if order == 0 || n < 3 * order {
        return Err(Error::invalid("samples", "need at least three samples per fitted exponential"));
    }
    let l = n / 2;
    let rows = n - l;
    let y = DMatrix::from_fn(rows, l + 1, |i, j| samples[i + j]);
    let svd = y.svd(false, true);
    let vt = svd.v_t.ok_or(Error::SingularTransform)?;
    let m = order.min(vt.nrows());
    // right singular vectors as columns: V (l+1 × m)
    let v = vt.rows(0, m).transpose();
    let v1 = v.rows(0, l).into_owned();
    let v2 = v.rows(1, l).into_owned();
    let pinv = v1.pseudo_inverse(1e-14).map_err(|_| Error::SingularTransform)?;
    let a = pinv * v2;
    let z: Vec<Complex64> = a.complex_eigenvalues().iter().copied().collect();
    // amplitudes by least squares on the Vandermonde system
    let vm = DMatrix::from_fn(n, z.len(), |i, k| z[k].powu(i as u32));
    let b = DMatrix::from_fn(n, 1, |i, _| Complex64::new(samples[i], 0.0));
    let amps = vm.clone().svd(true, true).solve(&b, 1e-14).map_err(|_| Error::SingularTransform)?;
    let mut poles: Vec<FittedPole> = Vec::new();
    for (k, zk) in z.iter().enumerate() {
        // e^{−iΩΔ} = z ⇒ Ω = i ln z / Δ
        let omega = Complex64::i() * zk.ln() / spacing;
        if omega.re < -1e-12 {
            continue;
        }
        let factor = if omega.re.abs() <= 1e-12 { 1.0 } else { 2.0 };
        poles.push(FittedPole { omega, amplitude: factor * amps[(k, 0)].norm() });
    }
    poles.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
    Ok(poles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_two_damped_cosines() {
        let dt = 0.2;
        let s: Vec<f64> = (0..300)
            .map(|k| {
                let t = k as f64 * dt;
                (-0.02 * t).exp() * (0.6 * t).cos() + 0.4 * (-0.07 * t).exp() * (1.6 * t + 0.3).cos()
            })
            .collect();
        let p = matrix_pencil(&s, dt, 4).unwrap();
        assert!((p[0].omega - Complex64::new(0.6, -0.02)).norm() < 1e-8, "{p:?}");
        assert!((p[1].omega - Complex64::new(1.6, -0.07)).norm() < 1e-8, "{p:?}");
        assert!((p[0].amplitude - 1.0).abs() < 1e-6);
    }
}
