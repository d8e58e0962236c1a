//! The discretized field–bath Hamiltonian and its assembly.
//!
//! Positions are `x = (D_n/ω_n ; X_si)`, momenta `p = (B_n ; Π_si)`:
//!
//! ```text
//! H = ½|p|² + ½Σ_n E_n² + ½Σ_s λ_s P_s² + ½Σ_si ω_si² X_si²
//! E_n = ω_n x_n − Σ_s c_ns P_s,      P_s = Σ_i g_si X_si
//! ```
//!
//! `c_ns` projects the polarization of site `s` onto field mode `n`; `λ_s = 1`
//! marks a longitudinal site, whose field is `E_∥ = −P_s`. The flow is
//! `ẋ = p`, `ṗ = −Kx` with `K` symmetric, so `JA` is symmetric and the
//! system is exactly Hamiltonian.

use nalgebra::{DMatrix, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::basis::RealModeBasis;
use crate::evolution::bath::{BathConfig, BathDiscretization};
use crate::medium::{Medium, SpatialMediumMap};
use crate::tolerances::TRUNCATION_WARNING;

/// A polarization degree of freedom with its own bath.
#[derive(Clone, Debug, PartialEq)]
pub struct Site {
    /// Sparse `c_ns` as `(mode, value)`.
    pub coupling: Vec<(usize, f64)>,
    /// `1` for a longitudinal site, `0` otherwise.
    pub self_term: f64,
    /// Offset of this site's lines in the bath block.
    pub offset: usize,
    pub omegas: Vec<f64>,
    pub g: Vec<f64>,
    pub label: String,
}

/// Medium description accepted by [`assemble_system`].
#[derive(Clone, Copy, Debug)]
pub enum MediumLayout<'a> {
    /// Every field mode couples to its own copy of the bath.
    Homogeneous(&'a Medium),
    /// Localized scatterers in vacuum.
    Map(&'a SpatialMediumMap),
}

/// Canonical phase-space point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct State {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl State {
    pub fn zeros(n: usize) -> Self {
        State { x: vec![0.0; n], p: vec![0.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn flat(&self) -> Vec<f64> {
        self.x.iter().chain(&self.p).copied().collect()
    }

    pub fn from_flat(z: &[f64]) -> Self {
        let n = z.len() / 2;
        State { x: z[..n].to_vec(), p: z[n..].to_vec() }
    }
}

/// Linear Hamiltonian system of field modes coupled to bath lines.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    omegas: Vec<f64>,
    sites: Vec<Site>,
    n_bath: usize,
    truncation_loss: f64,
}

impl LinearSystem {
    pub fn new(omegas: Vec<f64>, sites: Vec<Site>) -> Result<Self> {
        if !omegas.iter().all(|w| w.is_finite() && *w > 0.0) {
            return Err(Error::invalid("modes", "mode frequencies must be finite and > 0"));
        }
        let mut n_bath = 0;
        let mut sites = sites;
        for s in sites.iter_mut() {
            if s.omegas.len() != s.g.len() {
                return Err(Error::invalid("sites", "one coupling per bath line"));
            }
            if s.coupling.iter().any(|&(m, _)| m >= omegas.len()) {
                return Err(Error::invalid("sites", "coupling refers to a missing mode"));
            }
            s.offset = n_bath;
            n_bath += s.omegas.len();
        }
        Ok(LinearSystem { omegas, sites, n_bath, truncation_loss: 0.0 })
    }

    pub fn n_modes(&self) -> usize {
        self.omegas.len()
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    /// Number of positions (half the phase-space dimension).
    pub fn dim(&self) -> usize {
        self.omegas.len() + self.n_bath
    }

    pub fn mode_omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    /// Fraction of the coupling matrix' squared Frobenius norm lost to the
    /// mode cutoff (zero for homogeneous systems).
    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    /// Adds `count` longitudinal sites filled with `medium`.
    pub fn add_longitudinal(&mut self, medium: &Medium, bath: &BathConfig, count: usize) -> Result<()> {
        let b = BathDiscretization::for_medium(medium, bath)?;
        for j in 0..count {
            self.sites.push(Site {
                coupling: vec![],
                self_term: 1.0,
                offset: self.n_bath,
                omegas: b.nodes.clone(),
                g: b.couplings.clone(),
                label: format!("longitudinal {j}"),
            });
            self.n_bath += b.len();
        }
        Ok(())
    }

    /// Site polarizations `P_s`.
    pub fn polarizations(&self, x: &[f64]) -> Vec<f64> {
        let nm = self.n_modes();
        self.sites.iter().map(|s| s.g.iter().enumerate().map(|(i, g)| g * x[nm + s.offset + i]).sum()).collect()
    }

    /// Mode electric fields `E_n` (transverse).
    pub fn mode_fields(&self, x: &[f64]) -> Vec<f64> {
        self.mode_fields_with(x, &self.polarizations(x))
    }

    fn mode_fields_with(&self, x: &[f64], pol: &[f64]) -> Vec<f64> {
        let mut e: Vec<f64> = self.omegas.iter().zip(x).map(|(w, x)| w * x).collect();
        for (s, &ps) in self.sites.iter().zip(pol) {
            for &(m, c) in &s.coupling {
                e[m] -= c * ps;
            }
        }
        e
    }

    /// Force `−Kx` written into `out`.
    pub fn force(&self, x: &[f64], out: &mut [f64]) {
        let nm = self.n_modes();
        let pol = self.polarizations(x);
        let e = self.mode_fields_with(x, &pol);
        for n in 0..nm {
            out[n] = -self.omegas[n] * e[n];
        }
        for (s, &ps) in self.sites.iter().zip(&pol) {
            let drive: f64 = s.coupling.iter().map(|&(m, c)| c * e[m]).sum::<f64>() - s.self_term * ps;
            for (i, (&w, &g)) in s.omegas.iter().zip(&s.g).enumerate() {
                let k = nm + s.offset + i;
                out[k] = -w * w * x[k] + g * drive;
            }
        }
    }

    /// Total energy.
    pub fn energy(&self, st: &State) -> f64 {
        let parts = self.energy_parts(st);
        parts.0 + parts.1
    }

    /// `(electromagnetic, material)` energy. The electromagnetic part
    /// includes the longitudinal `½E_∥²`.
    pub fn energy_parts(&self, st: &State) -> (f64, f64) {
        let nm = self.n_modes();
        let pol = self.polarizations(&st.x);
        let e = self.mode_fields_with(&st.x, &pol);
        let mut em: f64 =
            0.5 * e.iter().map(|v| v * v).sum::<f64>() + 0.5 * st.p[..nm].iter().map(|v| v * v).sum::<f64>();
        em += 0.5 * self.sites.iter().zip(&pol).map(|(s, p)| s.self_term * p * p).sum::<f64>();
        let mut mat = 0.0;
        for s in &self.sites {
            for (i, &w) in s.omegas.iter().enumerate() {
                let k = nm + s.offset + i;
                mat += 0.5 * (st.p[k] * st.p[k] + w * w * st.x[k] * st.x[k]);
            }
        }
        (em, mat)
    }

    /// Energy of the free bath, `½Σ(Π² + ω²X²)`.
    pub fn free_bath_energy(&self, st: &State) -> f64 {
        self.energy_parts(st).1
    }

    /// Dense stiffness matrix `K` (columns are `−force(e_j)`).
    pub fn stiffness(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut k = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut f = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.force(&e, &mut f);
            for i in 0..n {
                k[(i, j)] = -f[i];
            }
            e[j] = 0.0;
        }
        k
    }

    /// `‖JA − (JA)ᵀ‖_max` for the flow matrix `A = [[0, I], [−K, 0]]`;
    /// zero for an exactly Hamiltonian system.
    pub fn hamiltonian_defect(&self) -> f64 {
        let k = self.stiffness();
        (&k - k.transpose()).amax()
    }

    /// Largest normal-mode frequency, by power iteration on `K`, with a 10%
    /// safety margin.
    pub fn max_frequency(&self) -> f64 {
        let n = self.dim();
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.618).fract()).collect();
        let mut f = vec![0.0; n];
        let mut lambda = 0.0;
        for _ in 0..200 {
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            self.force(&v, &mut f);
            let next = -v.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>();
            for (a, b) in v.iter_mut().zip(&f) {
                *a = -b;
            }
            if (next - lambda).abs() < 1e-10 * next.abs() {
                lambda = next;
                break;
            }
            lambda = next;
        }
        1.1 * lambda.max(0.0).sqrt()
    }

    /// Phase-space state with the given mode `D_n`, `B_n` and zero bath.
    pub fn field_state(&self, d: &[f64], b: &[f64]) -> Result<State> {
        if d.len() != self.n_modes() || b.len() != self.n_modes() {
            return Err(Error::invalid("initial", "one D and one B value per mode"));
        }
        let mut st = State::zeros(self.dim());
        for n in 0..self.n_modes() {
            st.x[n] = d[n] / self.omegas[n];
            st.p[n] = b[n];
        }
        Ok(st)
    }

    /// `D_n = ω_n x_n`.
    pub fn mode_d(&self, st: &State) -> Vec<f64> {
        self.omegas.iter().zip(&st.x).map(|(w, x)| w * x).collect()
    }

    /// Copy of `st` with the field (mode) coordinates zeroed.
    pub fn bath_part(&self, st: &State) -> State {
        let mut out = st.clone();
        let nm = self.n_modes();
        out.x[..nm].iter_mut().for_each(|v| *v = 0.0);
        out.p[..nm].iter_mut().for_each(|v| *v = 0.0);
        out
    }

    /// Copy of `st` with the bath coordinates zeroed.
    pub fn field_part(&self, st: &State) -> State {
        let mut out = st.clone();
        let nm = self.n_modes();
        out.x[nm..].iter_mut().for_each(|v| *v = 0.0);
        out.p[nm..].iter_mut().for_each(|v| *v = 0.0);
        out
    }
}

/// Builds the field–bath system.
///
/// * Homogeneous: site `n` couples to mode `n` only (`c_nn = 1`).
/// * Map: one site per cell and polarization component, with
///   `c_ns = ê_n·ŝ ∫_cell v_n / √V_cell`. The background must be vacuum.
///   A warning is logged when `Σ c² < (1 − 1%)·n_sites`.
pub fn assemble_system(layout: MediumLayout<'_>, basis: &RealModeBasis, bath: &BathConfig) -> Result<LinearSystem> {
    let omegas: Vec<f64> = basis.modes().iter().map(|m| m.omega).collect();
    match layout {
        MediumLayout::Homogeneous(medium) => {
            let b = BathDiscretization::for_medium(medium, bath)?;
            let count = if b.is_empty() { 0 } else { basis.len() };
            let sites = (0..count)
                .map(|n| Site {
                    coupling: vec![(n, 1.0)],
                    self_term: 0.0,
                    offset: 0,
                    omegas: b.nodes.clone(),
                    g: b.couplings.clone(),
                    label: format!("mode {n}"),
                })
                .collect();
            LinearSystem::new(omegas, sites)
        }
        MediumLayout::Map(map) => {
            if !map.background().is_vacuum() {
                return Err(Error::invalid("background", "only a vacuum background is supported for time-domain maps"));
            }
            if basis.is_abstract() {
                return Err(Error::invalid("basis", "a spatial map needs a spatial mode basis"));
            }
            let line = basis.is_line();
            let dx = map.dx();
            let mut sites = Vec::new();
            let mut kept = 0.0;
            for cell in map.cells() {
                let b = BathDiscretization::for_medium(&cell.medium, bath)?;
                let lo = Vector3::from(map.cell_corner(cell.index));
                let hi = lo + Vector3::repeat(dx);
                let vol = if line { dx } else { dx.powi(3) };
                let components: &[usize] = if line { &[1] } else { &[0, 1, 2] };
                for &comp in components {
                    let mut coupling = Vec::new();
                    for (n, mode) in basis.modes().iter().enumerate() {
                        let proj = mode.polarization[comp];
                        if proj.abs() < 1e-15 {
                            continue;
                        }
                        let c = proj * basis.cell_integral(n, &lo, &hi) / vol.sqrt();
                        if c != 0.0 {
                            kept += c * c;
                            coupling.push((n, c));
                        }
                    }
                    sites.push(Site {
                        coupling,
                        self_term: 0.0,
                        offset: 0,
                        omegas: b.nodes.clone(),
                        g: b.couplings.clone(),
                        label: format!("cell {:?} component {comp}", cell.index),
                    });
                }
            }
            let n_sites = sites.len() as f64;
            let mut sys = LinearSystem::new(omegas, sites)?;
            if n_sites > 0.0 {
                // Transverse modes can carry at most 2/3 of a 3-D cell's
                // polarization; a line cell is fully transverse.
                let full = if line { n_sites } else { n_sites * 2.0 / 3.0 };
                sys.truncation_loss = (1.0 - kept / full).max(0.0);
                if sys.truncation_loss > TRUNCATION_WARNING {
                    log::warn!(
                        "mode cutoff keeps {:.1}% of the coupling matrix' Frobenius norm",
                        100.0 * (1.0 - sys.truncation_loss)
                    );
                }
            }
            Ok(sys)
        }
    }
}
