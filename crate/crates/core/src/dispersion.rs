//! Complex polariton eigenfrequencies.
//!
//! Transverse roots solve `ω_α² = ε(Ω)Ω²`, longitudinal roots `ε(Ω) = 0`.
//! Roots are isolated by a quadtree of argument-principle counts and then
//! polished by Newton's method, so every returned set is certified complete
//! for its search rectangle.

use std::cell::Cell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::Medium;
use crate::numerics::contour::{winding_number, Rect};
use crate::numerics::quad::integrate;
use crate::tolerances::{QUADRATURE_REL, ROOT_RESIDUAL, WINDING_INTEGER_SLACK};

/// Which secular equation a root solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Transverse,
    Longitudinal,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Transverse => "transverse",
            Family::Longitudinal => "longitudinal",
        }
    }
}

/// One representative (`Re Ω > 0`) root. Its mirror `−Ω*` is implied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolaritonRoot {
    pub omega: Complex64,
    /// Branch index, ordered by increasing `Re Ω`.
    pub branch: usize,
    /// `d(ω√ε)/dω` at `Ω` for transverse roots, `dε/dω` for longitudinal ones.
    pub d: Complex64,
    pub family: Family,
    /// Photon frequency the root belongs to; `0` for longitudinal roots.
    pub omega_alpha: f64,
}

/// The default transverse search rectangle.
///
/// `Re Ω ∈ (0, 3(max ω_n + ω_α + √Σf_n)]`, `Im Ω ∈ [−10 max γ_n − ω_α,
/// ε_top]`, where the small positive `ε_top` keeps real (lossless) roots
/// strictly inside the contour. The strength term covers the upper
/// polariton of strong oscillators, which sits near `√(ω_n² + Σf_n)`.
pub fn default_transverse_rect(medium: &Medium, omega_alpha: f64) -> Rect {
    let scale = medium.max_omega() + omega_alpha + medium.total_strength().sqrt();
    Rect { re_min: 0.0, re_max: 3.0 * scale, im_min: -10.0 * medium.max_gamma() - omega_alpha, im_max: 1e-3 * scale }
}

/// The default longitudinal search rectangle.
pub fn default_longitudinal_rect(medium: &Medium) -> Rect {
    let scale = medium.max_omega() + medium.total_strength().sqrt();
    Rect {
        re_min: 0.0,
        re_max: 3.0 * scale,
        im_min: -10.0 * medium.max_gamma() - medium.max_omega(),
        im_max: 1e-3 * scale,
    }
}

/// Secular function together with its pole set, as used by the finder.
struct Secular<'a> {
    medium: &'a Medium,
    family: Family,
    omega_alpha: f64,
}

impl Secular<'_> {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        let eps = self.medium.epsilon(z)?;
        Ok(match self.family {
            Family::Transverse => self.omega_alpha * self.omega_alpha - eps * z * z,
            Family::Longitudinal => eps,
        })
    }

    fn value_and_slope(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let eps = self.medium.epsilon(z)?;
        let de = self.medium.d_epsilon(z)?;
        Ok(match self.family {
            Family::Transverse => (self.omega_alpha * self.omega_alpha - eps * z * z, -(de * z * z + 2.0 * eps * z)),
            Family::Longitudinal => (eps, de),
        })
    }

    /// Residual accepted at `z`: relative to the magnitude of the terms that
    /// cancel in the secular function. Next to a permittivity pole the
    /// resonance terms are large and the root is ill-conditioned, so an
    /// absolute target would sit below the rounding level of `f(z)`. Away
    /// from poles this reduces to `ROOT_RESIDUAL·ω_α²` (transverse) or
    /// `ROOT_RESIDUAL` (longitudinal) up to an O(1) factor.
    fn tolerance(&self, z: Complex64) -> f64 {
        let terms: f64 = 1.0
            + self
                .medium
                .resonances()
                .iter()
                .map(|r| {
                    let s = z + Complex64::new(0.0, r.gamma);
                    r.f / (r.omega * r.omega - s * s).norm()
                })
                .sum::<f64>();
        match self.family {
            Family::Transverse => ROOT_RESIDUAL * (self.omega_alpha * self.omega_alpha + z.norm_sqr() * terms),
            Family::Longitudinal => ROOT_RESIDUAL * terms,
        }
    }

    /// Number of permittivity poles `±ω_n − iγ_n` strictly inside `rect`.
    fn poles_inside(&self, rect: &Rect) -> i64 {
        self.medium
            .resonances()
            .iter()
            .flat_map(|r| [Complex64::new(r.omega, -r.gamma), Complex64::new(-r.omega, -r.gamma)])
            .filter(|p| rect.contains(*p))
            .count() as i64
    }

    fn zeros_inside(&self, rect: &Rect) -> Result<i64> {
        let w = winding_number(&|z| self.value(z).ok(), rect)?;
        Ok(w + self.poles_inside(rect))
    }

    fn newton(&self, start: Complex64, rect: &Rect) -> Option<Complex64> {
        let mut z = start;
        let mut converged_steps = 0;
        for _ in 0..100 {
            let (f, df) = self.value_and_slope(z).ok()?;
            if f.norm() < self.tolerance(z) {
                converged_steps += 1;
                if converged_steps > 2 {
                    break;
                }
            }
            if df.norm() == 0.0 || !df.is_finite() {
                return None;
            }
            let mut step = f / df;
            // Damp steps that would leave the neighbourhood of the rectangle.
            let limit = rect.diagonal();
            if step.norm() > limit {
                step *= limit / step.norm();
            }
            z -= step;
            if !z.is_finite() {
                return None;
            }
        }
        let f = self.value(z).ok()?;
        (f.norm() < self.tolerance(z)).then_some(z)
    }

    fn derivative_d(&self, z: Complex64) -> Result<Complex64> {
        let de = self.medium.d_epsilon(z)?;
        Ok(match self.family {
            Family::Transverse => self.omega_alpha / z + z * z * de / (2.0 * self.omega_alpha),
            Family::Longitudinal => de,
        })
    }
}

const SPLIT_RATIOS: [f64; 5] = [0.5, 0.471_7, 0.528_3, 0.4, 0.6];
const MAX_DEPTH: usize = 60;

fn isolate(sec: &Secular, rect: &Rect, count: i64, depth: usize, out: &mut Vec<Complex64>) -> Result<()> {
    if count <= 0 {
        return Ok(());
    }
    if count == 1 {
        if let Some(z) = sec.newton(rect.center(), rect) {
            if rect.contains_with_margin(z, 1e-9 * rect.diagonal()) {
                out.push(z);
                return Ok(());
            }
        }
    }
    if depth >= MAX_DEPTH || rect.diagonal() < 1e-13 * (1.0 + rect.center().norm()) {
        // A multiple root (or a cluster below resolution): accept whatever
        // Newton finds, the final count check will report the defect.
        if let Some(z) = sec.newton(rect.center(), rect) {
            out.push(z);
        }
        return Ok(());
    }
    let mut last_err = None;
    for &sx in &SPLIT_RATIOS {
        let sy = 1.0 - sx;
        let children = rect.split(sx, sy);
        let counts: Result<Vec<i64>> = children.iter().map(|c| sec.zeros_inside(c)).collect();
        match counts {
            Ok(counts) if counts.iter().sum::<i64>() == count && counts.iter().all(|&c| c >= 0) => {
                for (child, c) in children.iter().zip(counts) {
                    isolate(sec, child, c, depth + 1, out)?;
                }
                return Ok(());
            }
            Ok(counts) => {
                last_err = Some(Error::RootCountMismatch {
                    expected: count as usize,
                    found: counts.iter().sum::<i64>().max(0) as usize,
                })
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one split attempted"))
}

fn find_roots(sec: &Secular, search: &Rect) -> Result<Vec<PolaritonRoot>> {
    let count = sec.zeros_inside(search)?;
    if count < 0 {
        return Err(Error::RootCountMismatch { expected: 0, found: 0 });
    }
    let mut zs = Vec::new();
    isolate(sec, search, count, 0, &mut zs)?;
    zs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    // Distinct roots only: Newton from two cells may land on one root.
    let scale = search.diagonal();
    zs.dedup_by(|a, b| (*a - *b).norm() < 1e-10 * scale);
    if zs.len() as i64 != count {
        return Err(Error::RootCountMismatch { expected: count as usize, found: zs.len() });
    }
    zs.iter()
        .enumerate()
        .map(|(m, &z)| {
            Ok(PolaritonRoot {
                omega: z,
                branch: m,
                d: sec.derivative_d(z)?,
                family: sec.family,
                omega_alpha: sec.omega_alpha,
            })
        })
        .collect()
}

fn check_search(search: &Rect, medium: &Medium) -> Result<()> {
    if search.re_min < 0.0 {
        return Err(Error::invalid("search.re_min", "representative roots have Re Ω > 0"));
    }
    if search.im_max > 0.0 && medium.is_passive_lossy() && search.im_max > 0.01 * search.diagonal() {
        return Err(Error::invalid("search.im_max", "search rectangle must lie in the lower half plane"));
    }
    Ok(())
}

/// All roots of `ω_α² − ε(Ω)Ω²` inside `search` (default rectangle if
/// `None`), each polished to `|f| < 1e−12·ω_α²`.
pub fn transverse_roots(medium: &Medium, omega_alpha: f64, search: Option<&Rect>) -> Result<Vec<PolaritonRoot>> {
    if !(omega_alpha > 0.0 && omega_alpha.is_finite()) {
        return Err(Error::invalid("omega_alpha", "must be finite and > 0"));
    }
    let rect = search.copied().unwrap_or_else(|| default_transverse_rect(medium, omega_alpha));
    check_search(&rect, medium)?;
    find_roots(&Secular { medium, family: Family::Transverse, omega_alpha }, &rect)
}

/// All zeros of `ε(Ω)` inside `search` (default rectangle if `None`).
pub fn longitudinal_roots(medium: &Medium, search: Option<&Rect>) -> Result<Vec<PolaritonRoot>> {
    if medium.is_vacuum() {
        return Ok(Vec::new());
    }
    let rect = search.copied().unwrap_or_else(|| default_longitudinal_rect(medium));
    check_search(&rect, medium)?;
    find_roots(&Secular { medium, family: Family::Longitudinal, omega_alpha: 0.0 }, &rect)
}

/// Worst secular residual at the mirror roots `−Ω*`, relative to the
/// magnitude of the terms of the secular function there (`ω_α²` or 1 away
/// from permittivity poles).
pub fn root_symmetry_check(roots: &[PolaritonRoot], medium: &Medium) -> f64 {
    roots
        .iter()
        .map(|r| {
            let sec = Secular { medium, family: r.family, omega_alpha: r.omega_alpha };
            let mirror = -r.omega.conj();
            match sec.value(mirror) {
                Ok(v) => v.norm() * ROOT_RESIDUAL / sec.tolerance(mirror),
                Err(_) => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max)
}

/// Zeros of `Z(ω) − ω_α²`, `Z = ε(ω)ω²`, in the upper half plane, from the
/// argument principle on the real segment `[−R, R]` closed by the upper
/// semicircle of radius `R`.
///
/// The contour integral of `Z′/(Z − ω_α²)` counts zeros minus poles; the
/// permittivity poles lying in the upper half plane (only present for
/// non-causal media) are added back, so the result is the zero count.
pub fn upper_half_zero_count(medium: &Medium, omega_alpha: f64, radius: f64) -> Result<i64> {
    if !(omega_alpha > 0.0 && omega_alpha.is_finite()) {
        return Err(Error::invalid("omega_alpha", "must be finite and > 0"));
    }
    let reach = medium.max_omega().max(omega_alpha).max(medium.max_gamma());
    if !(radius.is_finite() && radius > 4.0 * reach) {
        return Err(Error::invalid("radius", "R must be much larger than every resonance and ω_α"));
    }
    if medium.resonances().iter().any(|r| r.gamma == 0.0) {
        return Err(Error::LosslessUnsupported("the upper-half-plane zero count"));
    }
    let a = omega_alpha * omega_alpha;
    let failure = Cell::new(None::<Error>);
    let log_deriv = |w: Complex64| -> Complex64 {
        let r = (|| -> Result<Complex64> {
            let eps = medium.epsilon(w)?;
            let de = medium.d_epsilon(w)?;
            let z = eps * w * w;
            let dz = de * w * w + 2.0 * eps * w;
            let den = z - a;
            if den.norm() < 1e-12 * a {
                return Err(Error::ContourTooClose { near: w });
            }
            Ok(dz / den)
        })();
        r.unwrap_or_else(|e| {
            failure.set(Some(e));
            Complex64::new(0.0, 0.0)
        })
    };

    // Real segment: breakpoints at the resonances to help the adaptive rule.
    let mut points = vec![-radius, radius, 0.0];
    for r in medium.resonances() {
        for s in [-1.0, 1.0] {
            for k in [-2.0, -1.0, 0.0, 1.0, 2.0] {
                let p = s * r.omega + k * r.gamma.abs();
                if p.abs() < radius {
                    points.push(p);
                }
            }
        }
    }
    for s in [-1.0, 1.0] {
        points.push(s * omega_alpha);
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let line = integrate(|x| log_deriv(Complex64::new(x, 0.0)), &points, 1e-9, QUADRATURE_REL, 20_000)
        .map_err(|e| quad_error(e, &failure))?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let arc = integrate(
        |t: f64| {
            let w = Complex64::from_polar(radius, t);
            log_deriv(w) * Complex64::new(0.0, 1.0) * w
        },
        &[
            0.0,
            0.25 * std::f64::consts::PI,
            0.5 * std::f64::consts::PI,
            0.75 * std::f64::consts::PI,
            std::f64::consts::PI,
        ],
        1e-9,
        QUADRATURE_REL,
        20_000,
    )
    .map_err(|e| quad_error(e, &failure))?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let turns = (line.value + arc.value) / Complex64::new(0.0, std::f64::consts::TAU);
    let rounded = turns.re.round();
    if (turns.re - rounded).abs() > WINDING_INTEGER_SLACK || turns.im.abs() > WINDING_INTEGER_SLACK {
        return Err(Error::QuadratureNonConvergence(format!("winding integral {turns} is not an integer")));
    }
    let poles_up =
        medium.resonances().iter().filter(|r| r.gamma < 0.0).map(|r| if r.omega > 0.0 { 2 } else { 1 }).sum::<i64>();
    Ok(rounded as i64 + poles_up)
}

fn quad_error(e: Error, failure: &Cell<Option<Error>>) -> Error {
    failure.take().unwrap_or(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::LorentzResonance;

    #[test]
    fn vacuum_has_single_photon_root() {
        let roots = transverse_roots(&Medium::vacuum(), 1.0, None).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].omega - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((roots[0].d - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn lossless_roots_match_hopfield_pair() {
        let m = Medium::lossless("h", vec![LorentzResonance::new(1.0, 1.0, 0.0)]).unwrap();
        let roots = transverse_roots(&m, 1.0, None).unwrap();
        assert_eq!(roots.len(), 2);
        let lo = ((3.0 - 5f64.sqrt()) / 2.0).sqrt();
        let hi = ((3.0 + 5f64.sqrt()) / 2.0).sqrt();
        assert!((roots[0].omega.re - lo).abs() < 1e-12 && roots[0].omega.im.abs() < 1e-12);
        assert!((roots[1].omega.re - hi).abs() < 1e-12 && roots[1].omega.im.abs() < 1e-12);
    }

    #[test]
    fn lossy_roots_are_damped() {
        let m = Medium::single(1.0, 1.0, 0.1).unwrap();
        let roots = transverse_roots(&m, 1.0, None).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.omega.im < 0.0 && r.omega.re > 0.0));
        assert!(root_symmetry_check(&roots, &m) < 1e-10);
    }

    #[test]
    fn longitudinal_plasmon() {
        let m = Medium::lossless("h", vec![LorentzResonance::new(1.0, 1.0, 0.0)]).unwrap();
        let roots = longitudinal_roots(&m, None).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].omega - Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!(longitudinal_roots(&Medium::vacuum(), None).unwrap().is_empty());
    }

    #[test]
    fn rejects_nonpositive_photon_frequency() {
        assert!(transverse_roots(&Medium::vacuum(), 0.0, None).unwrap_err().is_validation());
    }

    #[test]
    fn causal_medium_has_no_upper_half_zeros() {
        let m = Medium::single(1.0, 1.0, 0.1).unwrap();
        assert_eq!(upper_half_zero_count(&m, 1.0, 100.0).unwrap(), 0);
    }

    #[test]
    fn planted_violation_is_detected() {
        let m = Medium::unchecked_for_tests("anti", vec![LorentzResonance::new(1.0, 1.0, -0.1)]);
        assert!(upper_half_zero_count(&m, 1.0, 100.0).unwrap() >= 1);
    }
}
