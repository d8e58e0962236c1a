//! Longitudinal polarization dynamics `P_∥ = P_∥⁽⁰⁾ − χ ∗ P_∥`.
//!
//! `P_∥⁽⁰⁾` is the free motion of the medium's Lorentz oscillators,
//! `P̈_n + 2γ_nṖ_n + (ω_n² + γ_n²)P_n = 0`, with the initial data shared
//! among the resonances in proportion to their strengths `f_n`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dispersion::longitudinal_roots;
use crate::error::{Error, Result};
use crate::medium::Medium;

/// Free oscillator polarization with matched initial data.
pub fn free_polarization(medium: &Medium, p0: f64, p_dot0: f64, t: f64) -> f64 {
    let total = medium.total_strength();
    if total == 0.0 {
        return 0.0;
    }
    medium
        .resonances()
        .iter()
        .map(|r| {
            let share = r.f / total;
            let (a, b) = (share * p0, share * p_dot0);
            (-r.gamma * t).exp() * (a * (r.omega * t).cos() + (b + r.gamma * a) * (r.omega * t).sin() / r.omega)
        })
        .sum()
}

/// Laplace transform of [`free_polarization`] at complex `s`.
fn free_polarization_laplace(medium: &Medium, p0: f64, p_dot0: f64, s: Complex64) -> Complex64 {
    let total = medium.total_strength();
    medium
        .resonances()
        .iter()
        .map(|r| {
            let share = r.f / total;
            let den = s * s + 2.0 * r.gamma * s + r.omega * r.omega + r.gamma * r.gamma;
            ((s + 2.0 * r.gamma) * share * p0 + share * p_dot0) / den
        })
        .sum()
}

/// Solves `P_k = F_k − ∫₀^{t_k} χ(t_k − t′)P(t′)dt′` with the trapezoid rule
/// (explicit because `χ(0) = 0`) on a uniform grid of step `h`.
pub fn volterra_solve(chi: &[f64], free: &[f64], h: f64) -> Result<Vec<f64>> {
    if chi.len() != free.len() {
        return Err(Error::invalid("grid", "kernel and source need the same number of samples"));
    }
    let n = free.len();
    let mut p = vec![0.0; n];
    for k in 0..n {
        let mut conv = 0.0;
        if k > 0 {
            conv += 0.5 * chi[k] * p[0];
            for j in 1..k {
                conv += chi[k - j] * p[j];
            }
            conv += 0.5 * chi[0] * p[k];
        }
        p[k] = free[k] - h * conv;
    }
    Ok(p)
}

/// Result of [`longitudinal_evolution`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LongitudinalSolution {
    pub times: Vec<f64>,
    /// Richardson-extrapolated time stepping.
    pub volterra: Vec<f64>,
    /// Residue sum over the zeros of `ε`.
    pub residue: Vec<f64>,
    pub sup_diff: f64,
}

/// Residue-sum solution `P(t) = Σ 2Re[e^{s t} P̂⁽⁰⁾(s)/ε_s(s)]`, `s = −iΩ`,
/// over the longitudinal roots.
pub fn longitudinal_residue_solution(medium: &Medium, p0: f64, p_dot0: f64, times: &[f64]) -> Result<Vec<f64>> {
    if medium.is_vacuum() {
        return Ok(vec![0.0; times.len()]);
    }
    let roots = longitudinal_roots(medium, None)?;
    let terms: Vec<(Complex64, Complex64)> = roots
        .iter()
        .map(|r| {
            let s = -Complex64::i() * r.omega;
            // dε/ds = i dε/dω
            (s, free_polarization_laplace(medium, p0, p_dot0, s) / (Complex64::i() * r.d))
        })
        .collect();
    Ok(times.iter().map(|&t| terms.iter().map(|(s, c)| 2.0 * (c * (s * t).exp()).re).sum()).collect())
}

/// Longitudinal polarization on `t_k = k·t_end/n`, by Volterra time stepping
/// (trapezoid at `h` and `h/2`, Richardson-combined) and by the residue sum.
pub fn longitudinal_evolution(
    medium: &Medium,
    p0: f64,
    p_dot0: f64,
    t_end: f64,
    n: usize,
) -> Result<LongitudinalSolution> {
    if !(t_end > 0.0 && t_end.is_finite()) || n == 0 {
        return Err(Error::invalid("times", "need t_end > 0 and at least one step"));
    }
    let h = t_end / n as f64;
    let run = |m: usize| -> Result<Vec<f64>> {
        let hh = t_end / m as f64;
        let chi: Vec<f64> = (0..=m).map(|k| medium.chi_time(k as f64 * hh)).collect();
        let free: Vec<f64> = (0..=m).map(|k| free_polarization(medium, p0, p_dot0, k as f64 * hh)).collect();
        volterra_solve(&chi, &free, hh)
    };
    let coarse = run(n)?;
    let fine = run(2 * n)?;
    let volterra: Vec<f64> = (0..=n).map(|k| (4.0 * fine[2 * k] - coarse[k]) / 3.0).collect();
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
    let residue = longitudinal_residue_solution(medium, p0, p_dot0, &times)?;
    let sup_diff = volterra.iter().zip(&residue).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(LongitudinalSolution { times, volterra, residue, sup_diff })
}
