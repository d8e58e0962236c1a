//! Free / scattered decomposition of a mode trajectory.
//!
//! For a homogeneous medium each mode obeys, with `q = D`,
//!
//! ```text
//! q(t) = U(t)q̇(0) + U̇(t)q(0) + ∫₀ᵗ H(τ) S⁽⁰⁾(t − τ) dτ,   S⁽⁰⁾ = ω_α² P⁽⁰⁾
//! ```
//!
//! where `P⁽⁰⁾` is the polarization of the freely evolving bath. `U` and `H`
//! are either the exact propagators of the discretized system (from its
//! real normal modes) or the continuum residue sums.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::integrator::Trajectory;
use crate::evolution::system::{LinearSystem, State};
use crate::propagators::ResidueExpansion;

/// Exact propagators of one mode of a discretized homogeneous system:
/// `U(τ) = Σ u_k sin(ν_k τ)/ν_k`, `H(τ) = Σ h_k sin(ν_k τ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteModePropagators {
    pub omega_alpha: f64,
    pub nu: Vec<f64>,
    u_coef: Vec<f64>,
    h_coef: Vec<f64>,
}

impl DiscreteModePropagators {
    /// Diagonalizes the block of mode `mode` and its own bath.
    pub fn for_mode(sys: &LinearSystem, mode: usize) -> Result<Self> {
        if mode >= sys.n_modes() {
            return Err(Error::invalid("mode", "index out of range"));
        }
        let touching: Vec<_> = sys.sites().iter().filter(|s| s.coupling.iter().any(|&(m, _)| m == mode)).collect();
        let w = sys.mode_omegas()[mode];
        let (c, g, nodes) = match touching.as_slice() {
            [] => (0.0, vec![], vec![]),
            [s] if s.coupling.len() == 1 && s.self_term == 0.0 => (s.coupling[0].1, s.g.clone(), s.omegas.clone()),
            _ => {
                return Err(Error::invalid(
                    "mode",
                    "mode-resolved propagators need a mode with its own bath (homogeneous system)",
                ))
            }
        };
        let n = g.len() + 1;
        // K = [[ω², −ω c gᵀ], [−ω c g, c² g gᵀ + diag(ω_i²)]]
        let mut k = DMatrix::zeros(n, n);
        k[(0, 0)] = w * w;
        for i in 0..g.len() {
            k[(0, i + 1)] = -w * c * g[i];
            k[(i + 1, 0)] = -w * c * g[i];
            for j in 0..g.len() {
                k[(i + 1, j + 1)] = c * c * g[i] * g[j];
            }
            k[(i + 1, i + 1)] += nodes[i] * nodes[i];
        }
        let eig = k.symmetric_eigen();
        let mut nu = Vec::with_capacity(n);
        let mut u_coef = Vec::with_capacity(n);
        let mut h_coef = Vec::with_capacity(n);
        for kk in 0..n {
            let lam = eig.eigenvalues[kk];
            if lam <= 0.0 {
                return Err(Error::SingularSystem { condition: lam });
            }
            let v = eig.eigenvectors.column(kk);
            let nu_k = lam.sqrt();
            let pg: f64 = (0..g.len()).map(|i| c * g[i] * v[i + 1]).sum();
            nu.push(nu_k);
            u_coef.push(v[0] * v[0]);
            h_coef.push(v[0] * (w * v[0] - pg) / (nu_k * w));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| nu[a].total_cmp(&nu[b]));
        Ok(DiscreteModePropagators {
            omega_alpha: w,
            nu: order.iter().map(|&k| nu[k]).collect(),
            u_coef: order.iter().map(|&k| u_coef[k]).collect(),
            h_coef: order.iter().map(|&k| h_coef[k]).collect(),
        })
    }

    pub fn u(&self, tau: f64) -> f64 {
        self.nu.iter().zip(&self.u_coef).map(|(n, c)| c * (n * tau).sin() / n).sum()
    }

    pub fn du(&self, tau: f64) -> f64 {
        self.nu.iter().zip(&self.u_coef).map(|(n, c)| c * (n * tau).cos()).sum()
    }

    pub fn h(&self, tau: f64) -> f64 {
        self.nu.iter().zip(&self.h_coef).map(|(n, c)| c * (n * tau).sin()).sum()
    }

    /// Normal-mode frequencies of the block (the "roots" of the discrete
    /// secular equation), ascending.
    pub fn frequencies(&self) -> &[f64] {
        &self.nu
    }
}

/// Where the split takes its propagators from.
#[derive(Clone, Copy, Debug)]
pub enum PropagatorSource<'a> {
    Discrete,
    Continuum(&'a ResidueExpansion),
}

/// Outcome of [`split_free_scattered`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitResult {
    pub times: Vec<f64>,
    pub total: Vec<f64>,
    pub free: Vec<f64>,
    pub scattered: Vec<f64>,
    /// `sup|q − q⁽⁰⁾ − q⁽ˢ⁾| / sup|q|`.
    pub residual: f64,
}

/// Free polarization `P⁽⁰⁾(t) = Σ g_i X_i⁽⁰⁾(t)` of the bath attached to `mode`.
pub fn free_polarization(sys: &LinearSystem, z0: &State, mode: usize, t: f64) -> f64 {
    let nm = sys.n_modes();
    let mut acc = 0.0;
    for s in sys.sites().iter().filter(|s| s.coupling.iter().any(|&(m, _)| m == mode)) {
        let c = s.coupling.iter().find(|&&(m, _)| m == mode).map_or(0.0, |&(_, c)| c);
        for (i, (&w, &g)) in s.omegas.iter().zip(&s.g).enumerate() {
            let k = nm + s.offset + i;
            acc += c * g * (z0.x[k] * (w * t).cos() + z0.p[k] * (w * t).sin() / w);
        }
    }
    acc
}

/// Composite Simpson rule on uniform samples (3/8 rule on the last three
/// intervals when their count is odd).
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = n - 1;
            let (even_end, tail) = if intervals % 2 == 0 { (n - 1, None) } else { (n - 4, Some(n - 4)) };
            let mut s = 0.0;
            let mut j = 0;
            while j + 2 <= even_end {
                s += h / 3.0 * (values[j] + 4.0 * values[j + 1] + values[j + 2]);
                j += 2;
            }
            if let Some(t) = tail {
                s += 3.0 * h / 8.0 * (values[t] + 3.0 * values[t + 1] + 3.0 * values[t + 2] + values[t + 3]);
            }
            s
        }
    }
}

/// Splits the recorded `D` of `mode` into free and scattered parts.
///
/// The convolution is evaluated with Simpson's rule on a grid of step
/// `quad_step`, refined so that every record time is a grid point.
pub fn split_free_scattered(
    sys: &LinearSystem,
    z0: &State,
    traj: &Trajectory,
    mode: usize,
    source: PropagatorSource<'_>,
    quad_step: f64,
) -> Result<SplitResult> {
    if traj.times.len() < 2 {
        return Err(Error::invalid("trajectory", "need at least two records"));
    }
    let spacing = traj.times[1] - traj.times[0];
    let sub = (spacing / quad_step).ceil().max(1.0) as usize;
    let h = spacing / sub as f64;
    let t_end = *traj.times.last().expect("non-empty");
    let n_grid = (t_end / h).round() as usize + 1;
    let w = sys.mode_omegas()[mode];
    let discrete;
    let (u, du, hk): (Box<dyn Fn(f64) -> f64 + '_>, Box<dyn Fn(f64) -> f64 + '_>, Box<dyn Fn(f64) -> f64 + '_>) =
        match source {
            PropagatorSource::Discrete => {
                discrete = DiscreteModePropagators::for_mode(sys, mode)?;
                let d = &discrete;
                (Box::new(move |t| d.u(t)), Box::new(move |t| d.du(t)), Box::new(move |t| d.h(t)))
            }
            PropagatorSource::Continuum(exp) => {
                if (exp.omega_alpha() - w).abs() > 1e-12 * w {
                    return Err(Error::invalid("roots", "root set belongs to a different photon frequency"));
                }
                (Box::new(move |t| exp.u(t)), Box::new(move |t| exp.du(t)), Box::new(move |t| exp.h(t)))
            }
        };
    let h_grid: Vec<f64> = (0..n_grid).map(|j| hk(j as f64 * h)).collect();
    let s_grid: Vec<f64> = (0..n_grid).map(|j| w * w * free_polarization(sys, z0, mode, j as f64 * h)).collect();
    let q0 = w * z0.x[mode];
    let qdot0 = w * z0.p[mode];
    let mut out = SplitResult { times: vec![], total: vec![], free: vec![], scattered: vec![], residual: 0.0 };
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut integrand = Vec::with_capacity(n_grid);
    for (r, &t) in traj.times.iter().enumerate() {
        let m = (t / h).round() as usize;
        integrand.clear();
        integrand.extend((0..=m).map(|j| h_grid[j] * s_grid[m - j]));
        let scattered = simpson(&integrand, h);
        let free = u(t) * qdot0 + du(t) * q0;
        let total = traj.mode_d[r][mode];
        worst = worst.max((total - free - scattered).abs());
        scale = scale.max(total.abs());
        out.times.push(t);
        out.total.push(total);
        out.free.push(free);
        out.scattered.push(scattered);
    }
    out.residual = if scale > 0.0 { worst / scale } else { worst };
    Ok(out)
}
