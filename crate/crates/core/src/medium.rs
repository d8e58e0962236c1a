//! Causal Lorentz permittivity models.
//!
//! A medium is a sum of Lorentz resonances
//!
//! ```text
//! ε(ω) = 1 + Σ_n f_n / (ω_n² − (ω + iγ_n)²)
//! χ(τ) = Σ_n f_n e^{−γ_n τ} sin(ω_n τ) / ω_n      (τ ≥ 0)
//! ```
//!
//! which is analytic in the upper half plane and obeys `ε(−ω*) = ε(ω)*`.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::POLE_PROXIMITY;

/// One Lorentz oscillator: strength `f` (squared frequency), center `omega`,
/// damping `gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LorentzResonance {
    pub f: f64,
    pub omega: f64,
    pub gamma: f64,
}

impl LorentzResonance {
    pub fn new(f: f64, omega: f64, gamma: f64) -> Self {
        LorentzResonance { f, omega, gamma }
    }

    #[inline]
    fn denominator(&self, w: Complex64) -> Complex64 {
        let s = w + Complex64::new(0.0, self.gamma);
        self.omega * self.omega - s * s
    }
}

/// On-disk form of a medium; also the serialized form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MediumFile {
    label: String,
    resonances: Vec<LorentzResonance>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    lossless: bool,
}

/// A dielectric described by a list of Lorentz resonances.
///
/// Construction validates passivity (`f > 0`, `ω_n > 0`, `γ > 0`).
/// Undamped resonances are accepted only through [`Medium::lossless`],
/// which is how the Hopfield limit is requested.
#[derive(Clone, Debug, PartialEq)]
pub struct Medium {
    label: String,
    resonances: Vec<LorentzResonance>,
    lossless: bool,
}

impl Serialize for Medium {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MediumFile { label: self.label.clone(), resonances: self.resonances.clone(), lossless: self.lossless }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Medium {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MediumFile::deserialize(d)?;
        Medium::from_parts(raw.label, raw.resonances, raw.lossless).map_err(serde::de::Error::custom)
    }
}

impl Medium {
    /// The empty medium, `ε ≡ 1`.
    pub fn vacuum() -> Self {
        Medium { label: "vacuum".into(), resonances: Vec::new(), lossless: false }
    }

    /// A passive absorbing medium; every resonance must have `γ > 0`.
    pub fn new(label: impl Into<String>, resonances: Vec<LorentzResonance>) -> Result<Self> {
        Self::from_parts(label.into(), resonances, false)
    }

    /// Medium in which undamped resonances (`γ = 0`) are explicitly allowed.
    pub fn lossless(label: impl Into<String>, resonances: Vec<LorentzResonance>) -> Result<Self> {
        Self::from_parts(label.into(), resonances, true)
    }

    /// Single-resonance convenience constructor (`γ > 0`).
    pub fn single(f: f64, omega: f64, gamma: f64) -> Result<Self> {
        Self::new(format!("lorentz(f={f},ω={omega},γ={gamma})"), vec![LorentzResonance::new(f, omega, gamma)])
    }

    /// Bypasses every passivity check. Only meant for tests that plant a
    /// deliberate violation (e.g. `γ < 0`, a non-causal medium).
    #[doc(hidden)]
    pub fn unchecked_for_tests(label: impl Into<String>, resonances: Vec<LorentzResonance>) -> Self {
        Medium { label: label.into(), resonances, lossless: true }
    }

    fn from_parts(label: String, resonances: Vec<LorentzResonance>, lossless: bool) -> Result<Self> {
        for (n, r) in resonances.iter().enumerate() {
            if !(r.f.is_finite() && r.f > 0.0) {
                return Err(Error::invalid(format!("resonances[{n}].f"), "strength must be finite and > 0"));
            }
            if !(r.omega.is_finite() && r.omega > 0.0) {
                return Err(Error::invalid(format!("resonances[{n}].omega"), "center must be finite and > 0"));
            }
            if !r.gamma.is_finite() || r.gamma < 0.0 {
                return Err(Error::invalid(format!("resonances[{n}].gamma"), "damping must be finite and ≥ 0"));
            }
            if r.gamma == 0.0 && !lossless {
                return Err(Error::invalid(
                    format!("resonances[{n}].gamma"),
                    "γ = 0 requires the explicit lossless (Hopfield) limit",
                ));
            }
        }
        Ok(Medium { label, resonances, lossless })
    }

    /// Parses the JSON medium format, naming the offending field on failure.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: MediumFile = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Parse { field: e.path().to_string(), reason: e.inner().to_string() })?;
        Medium::from_parts(raw.label, raw.resonances, raw.lossless)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("medium serializes")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn resonances(&self) -> &[LorentzResonance] {
        &self.resonances
    }

    pub fn is_vacuum(&self) -> bool {
        self.resonances.is_empty()
    }

    /// `true` when every resonance is damped.
    pub fn is_passive_lossy(&self) -> bool {
        !self.resonances.is_empty() && self.resonances.iter().all(|r| r.gamma > 0.0)
    }

    pub fn max_omega(&self) -> f64 {
        self.resonances.iter().map(|r| r.omega).fold(0.0, f64::max)
    }

    pub fn max_gamma(&self) -> f64 {
        self.resonances.iter().map(|r| r.gamma.abs()).fold(0.0, f64::max)
    }

    /// Smallest damping, `None` for vacuum.
    pub fn min_gamma(&self) -> Option<f64> {
        self.resonances.iter().map(|r| r.gamma).reduce(f64::min)
    }

    /// `Σ f_n = χ̇(0⁺)`, the high-frequency plasma weight.
    pub fn total_strength(&self) -> f64 {
        self.resonances.iter().map(|r| r.f).sum()
    }

    fn checked_denominator(&self, n: usize, r: &LorentzResonance, w: Complex64) -> Result<Complex64> {
        let d = r.denominator(w);
        if d.norm() < POLE_PROXIMITY * r.omega * r.omega {
            return Err(Error::PoleHit { omega: w, resonance: n });
        }
        Ok(d)
    }

    /// Permittivity at complex frequency `ω`.
    pub fn epsilon(&self, w: Complex64) -> Result<Complex64> {
        let mut eps = Complex64::new(1.0, 0.0);
        for (n, r) in self.resonances.iter().enumerate() {
            eps += r.f / self.checked_denominator(n, r, w)?;
        }
        Ok(eps)
    }

    /// `dε/dω` at complex frequency `ω`.
    pub fn d_epsilon(&self, w: Complex64) -> Result<Complex64> {
        let mut de = Complex64::new(0.0, 0.0);
        for (n, r) in self.resonances.iter().enumerate() {
            let d = self.checked_denominator(n, r, w)?;
            de += 2.0 * r.f * (w + Complex64::new(0.0, r.gamma)) / (d * d);
        }
        Ok(de)
    }

    /// `d²ε/dω²` at complex frequency `ω`.
    pub fn d2_epsilon(&self, w: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, r) in self.resonances.iter().enumerate() {
            let d = self.checked_denominator(n, r, w)?;
            let s = w + Complex64::new(0.0, r.gamma);
            acc += r.f * (2.0 / (d * d) + 8.0 * s * s / (d * d * d));
        }
        Ok(acc)
    }

    /// Causal susceptibility kernel `χ(τ)`; zero for `τ ≤ 0`.
    pub fn chi_time(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        self.resonances.iter().map(|r| r.f * (-r.gamma * tau).exp() * (r.omega * tau).sin() / r.omega).sum()
    }

    /// `dχ/dτ` for `τ > 0` (its limit `Σ f_n` at `τ = 0⁺`); zero for `τ < 0`.
    pub fn chi_time_derivative(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        self.resonances
            .iter()
            .map(|r| {
                let e = (-r.gamma * tau).exp();
                r.f * e * ((r.omega * tau).cos() - r.gamma * (r.omega * tau).sin() / r.omega)
            })
            .sum()
    }

    /// Anticausal kernel associated with `ε*`: supported on `τ ≤ 0`,
    /// `χ_T(τ) = −Σ f_n e^{γ_n τ} sin(ω_n τ)/ω_n`.
    pub fn chi_anticausal(&self, tau: f64) -> f64 {
        if tau >= 0.0 {
            return 0.0;
        }
        -self.resonances.iter().map(|r| r.f * (r.gamma * tau).exp() * (r.omega * tau).sin() / r.omega).sum::<f64>()
    }

    /// Effective conductivity `σ(ω) = ω·Im ε(ω)` for real `ω > 0`.
    pub fn sigma_of_omega(&self, w: f64) -> Result<f64> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::invalid("omega", "σ(ω) is defined for real ω > 0"));
        }
        Ok(w * self.epsilon(Complex64::new(w, 0.0))?.im)
    }

    /// Maximum deviation between `ε′(ω) − 1` and the principal-value
    /// Hilbert transform of `ε″`, on the grid `ω_j = j·ω_max/(n−1)` for
    /// `ω_j ≤ ω_max/2`.
    ///
    /// The principal value uses Maclaurin's odd/even rule on the symmetric
    /// grid (exploiting that `ε″` is odd); the tail beyond `ω_max` is added
    /// from the leading `ε″ ≈ 2Σfγ/ω³` asymptote.
    pub fn kramers_kronig_residual(&self, w_max: f64, n_points: usize) -> Result<f64> {
        if !self.is_passive_lossy() {
            return Err(Error::LosslessUnsupported("the Kramers–Kronig residual"));
        }
        if n_points < 256 {
            return Err(Error::invalid("n_points", "need at least 256 grid points"));
        }
        if !(w_max > 0.0 && w_max.is_finite()) {
            return Err(Error::invalid("omega_max", "must be finite and > 0"));
        }
        let h = w_max / (n_points - 1) as f64;
        let grid: Vec<f64> = (0..n_points).map(|j| j as f64 * h).collect();
        let eps2: Vec<f64> =
            grid.iter().map(|&w| self.epsilon(Complex64::new(w, 0.0)).map(|e| e.im)).collect::<Result<_>>()?;
        let tail_a: f64 = 2.0 * self.resonances.iter().map(|r| r.f * r.gamma).sum::<f64>();
        let mut worst: f64 = 0.0;
        for i in 0..n_points {
            let wi = grid[i];
            if wi > 0.5 * w_max {
                break;
            }
            let mut acc = 0.0;
            let mut j = if i % 2 == 0 { 1 } else { 2 };
            while j < n_points {
                let wj = grid[j];
                acc += eps2[j] * 2.0 * wj / (wj * wj - wi * wi);
                j += 2;
            }
            let pv = 2.0 * h * acc / std::f64::consts::PI;
            let tail = kk_tail(tail_a, w_max, wi);
            let direct = self.epsilon(Complex64::new(wi, 0.0))?.re - 1.0;
            worst = worst.max((pv + tail - direct).abs());
        }
        Ok(worst)
    }
}

/// `(2/π)∫_W^∞ 2ω′ (A/ω′³) / (ω′² − ω²) dω′ / 2` — the contribution of the
/// asymptotic `ε″ = A/ω³` tail beyond `W` to `ε′(ω) − 1`.
fn kk_tail(a: f64, w_big: f64, w: f64) -> f64 {
    let x = w / w_big;
    // (2A/π) ∫_W^∞ dω'/(ω'²(ω'² − ω²)) = (2A/π W³) Σ_k x^{2k}/(2k+3)
    let series = if x < 0.5 {
        let mut s = 0.0;
        let mut p = 1.0;
        for k in 0..60 {
            s += p / (2 * k + 3) as f64;
            p *= x * x;
        }
        s
    } else {
        ((1.0 / (2.0 * x)) * ((1.0 + x) / (1.0 - x)).ln() - 1.0) / (x * x)
    };
    2.0 * a / (std::f64::consts::PI * w_big.powi(3)) * series
}

/// Reference to a medium inside a map file: a label resolved against the
/// file's `media` list, or an inline definition.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MediumRef {
    Label(String),
    Inline(Medium),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellFile {
    i: i64,
    j: i64,
    k: i64,
    medium: MediumRef,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    dx: f64,
    #[serde(default)]
    origin: [f64; 3],
    background: MediumRef,
    #[serde(default)]
    media: Vec<Medium>,
    cells: Vec<CellFile>,
}

/// One listed cell of a [`SpatialMediumMap`].
#[derive(Clone, Debug, PartialEq)]
pub struct MediumCell {
    pub index: [i64; 3],
    pub medium: Medium,
}

/// Piecewise-constant medium on a cubic lattice of spacing `dx`.
/// Cells that are not listed carry the background medium.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialMediumMap {
    dx: f64,
    origin: [f64; 3],
    background: Medium,
    cells: Vec<MediumCell>,
}

impl SpatialMediumMap {
    pub fn new(dx: f64, origin: [f64; 3], background: Medium, cells: Vec<MediumCell>) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::invalid("dx", "cell spacing must be finite and > 0"));
        }
        let mut seen = HashMap::new();
        for (n, c) in cells.iter().enumerate() {
            if let Some(prev) = seen.insert(c.index, n) {
                return Err(Error::invalid(format!("cells[{n}]"), format!("duplicates cells[{prev}]")));
            }
        }
        Ok(SpatialMediumMap { dx, origin, background, cells })
    }

    /// Parses the JSON map format `{dx, origin?, background, media?, cells}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: MapFile = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Parse { field: e.path().to_string(), reason: e.inner().to_string() })?;
        let resolve = |r: &MediumRef, field: String| -> Result<Medium> {
            match r {
                MediumRef::Inline(m) => Ok(m.clone()),
                MediumRef::Label(l) if l == "vacuum" => Ok(Medium::vacuum()),
                MediumRef::Label(l) => raw
                    .media
                    .iter()
                    .find(|m| m.label() == l)
                    .cloned()
                    .ok_or_else(|| Error::invalid(field, format!("unknown medium label `{l}`"))),
            }
        };
        let background = resolve(&raw.background, "background".into())?;
        let cells = raw
            .cells
            .iter()
            .enumerate()
            .map(|(n, c)| {
                Ok(MediumCell { index: [c.i, c.j, c.k], medium: resolve(&c.medium, format!("cells[{n}].medium"))? })
            })
            .collect::<Result<Vec<_>>>()?;
        SpatialMediumMap::new(raw.dx, raw.origin, background, cells)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(3)
    }

    pub fn background(&self) -> &Medium {
        &self.background
    }

    pub fn cells(&self) -> &[MediumCell] {
        &self.cells
    }

    /// Center of the cell with integer index `idx`.
    pub fn cell_center(&self, idx: [i64; 3]) -> [f64; 3] {
        [
            self.origin[0] + (idx[0] as f64 + 0.5) * self.dx,
            self.origin[1] + (idx[1] as f64 + 0.5) * self.dx,
            self.origin[2] + (idx[2] as f64 + 0.5) * self.dx,
        ]
    }

    /// Lower corner of the cell with integer index `idx`.
    pub fn cell_corner(&self, idx: [i64; 3]) -> [f64; 3] {
        [
            self.origin[0] + idx[0] as f64 * self.dx,
            self.origin[1] + idx[1] as f64 * self.dx,
            self.origin[2] + idx[2] as f64 * self.dx,
        ]
    }

    /// Medium at the cell `idx` (background if not listed).
    pub fn medium_at(&self, idx: [i64; 3]) -> &Medium {
        self.cells.iter().find(|c| c.index == idx).map(|c| &c.medium).unwrap_or(&self.background)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> Medium {
        Medium::single(1.0, 1.0, 0.1).unwrap()
    }

    #[test]
    fn vacuum_is_unity() {
        let e = Medium::vacuum().epsilon(Complex64::new(0.3, -0.2)).unwrap();
        assert_eq!(e, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn static_value() {
        let e = reference().epsilon(Complex64::new(0.0, 0.0)).unwrap();
        assert!((e.re - (1.0 + 1.0 / 1.01)).abs() < 1e-15);
        assert!(e.im.abs() < 1e-16);
    }

    #[test]
    fn rejects_unrequested_lossless() {
        let err = Medium::new("x", vec![LorentzResonance::new(1.0, 1.0, 0.0)]).unwrap_err();
        assert_eq!(err.field(), Some("resonances[0].gamma"));
        assert!(Medium::lossless("x", vec![LorentzResonance::new(1.0, 1.0, 0.0)]).is_ok());
    }

    #[test]
    fn pole_hit_in_lossless_limit() {
        let m = Medium::lossless("h", vec![LorentzResonance::new(1.0, 1.0, 0.0)]).unwrap();
        assert!(matches!(m.epsilon(Complex64::new(1.0, 0.0)), Err(Error::PoleHit { .. })));
        assert!(matches!(m.epsilon(Complex64::new(-1.0, 0.0)), Err(Error::PoleHit { .. })));
    }

    #[test]
    fn chi_starts_at_zero_with_unit_slope_weight() {
        let m = reference();
        assert_eq!(m.chi_time(0.0), 0.0);
        assert!((m.chi_time_derivative(0.0) - 1.0).abs() < 1e-15);
        assert_eq!(Medium::vacuum().chi_time(1.0), 0.0);
    }

    #[test]
    fn anticausal_kernel_mirrors_causal() {
        let m = reference();
        for k in 1..50 {
            let t = 0.37 * k as f64;
            assert!((m.chi_anticausal(-t) - m.chi_time(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn kk_tail_series_matches_closed_form() {
        for &x in &[0.49, 0.5, 0.51] {
            let w = 10.0 * x;
            let a = kk_tail(1.0, 10.0, w);
            let b = kk_tail(1.0, 10.0, w * (1.0 + 1e-9));
            assert!((a - b).abs() < 1e-7 * a.abs());
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let m = Medium::new(
            "two",
            vec![
                LorentzResonance::new(0.1 + 0.2, 1.0 / 3.0, 1e-7 * std::f64::consts::PI),
                LorentzResonance::new(7.5, 3.0, 0.05),
            ],
        )
        .unwrap();
        let back = Medium::from_json_str(&m.to_json_string()).unwrap();
        assert_eq!(m, back);
        for (a, b) in m.resonances().iter().zip(back.resonances()) {
            assert_eq!(a.f.to_bits(), b.f.to_bits());
            assert_eq!(a.omega.to_bits(), b.omega.to_bits());
            assert_eq!(a.gamma.to_bits(), b.gamma.to_bits());
        }
    }

    #[test]
    fn json_errors_name_the_field() {
        let err = Medium::from_json_str(r#"{"label":"x","resonances":[{"f":1,"omega":1,"gama":0.1}]}"#).unwrap_err();
        assert!(err.is_validation());
        assert_eq!(err.field(), Some("resonances[0].gama"));
        let err = Medium::from_json_str(r#"{"label":"x","resonances":[{"f":-1,"omega":1,"gamma":0.1}]}"#).unwrap_err();
        assert_eq!(err.field(), Some("resonances[0].f"));
    }

    #[test]
    fn map_resolves_labels_and_background() {
        let text = r#"{"dx":0.5,"background":"vacuum","media":[{"label":"a","resonances":[{"f":1,"omega":2,"gamma":0.1}]}],
                      "cells":[{"i":0,"j":0,"k":0,"medium":"a"}]}"#;
        let map = SpatialMediumMap::from_json_str(text).unwrap();
        assert_eq!(map.medium_at([0, 0, 0]).label(), "a");
        assert!(map.medium_at([1, 0, 0]).is_vacuum());
        assert_eq!(map.cell_center([1, 0, 0]), [0.75, 0.25, 0.25]);
        let bad = r#"{"dx":0.5,"background":"vacuum","cells":[{"i":0,"j":0,"k":0,"medium":"zzz"}]}"#;
        assert_eq!(SpatialMediumMap::from_json_str(bad).unwrap_err().field(), Some("cells[0].medium"));
    }
}
