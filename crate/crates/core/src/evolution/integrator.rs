//! Fixed-step symplectic integration of `ẋ = p`, `ṗ = −Kx`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::system::{LinearSystem, State};
use crate::tolerances::{ENERGY_DRIFT_ABORT, STABILITY_MARGIN};

/// Composition scheme built on the kick–drift–kick leapfrog step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Leapfrog,
    Yoshida4,
    Yoshida6,
    /// Eighth order, fifteen stages.
    #[default]
    Yoshida8,
}

impl Scheme {
    pub fn order(&self) -> u32 {
        match self {
            Scheme::Leapfrog => 2,
            Scheme::Yoshida4 => 4,
            Scheme::Yoshida6 => 6,
            Scheme::Yoshida8 => 8,
        }
    }

    /// Symmetric stage weights, outermost first.
    pub fn weights(&self) -> Vec<f64> {
        let palindrome = |outer: &[f64]| {
            let w0 = 1.0 - 2.0 * outer.iter().sum::<f64>();
            let mut v: Vec<f64> = outer.to_vec();
            v.push(w0);
            v.extend(outer.iter().rev().copied());
            v
        };
        match self {
            Scheme::Leapfrog => vec![1.0],
            Scheme::Yoshida4 => {
                let c = 2f64.powf(1.0 / 3.0);
                let w1 = 1.0 / (2.0 - c);
                vec![w1, -c * w1, w1]
            }
            Scheme::Yoshida6 => palindrome(&[0.784513610477560, 0.235573213359357, -1.17767998417887]),
            Scheme::Yoshida8 => palindrome(&[
                0.914844246229740,
                0.253693336566229,
                -1.44485223686048,
                -0.158240635368243,
                1.93813913762276,
                -1.96061023297549,
                0.102799849391985,
            ]),
        }
    }
}

/// Integration settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Record every `stride` steps.
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default)]
    pub scheme: Scheme,
    /// Keep the full state at each record (otherwise only the modes).
    #[serde(default)]
    pub full_state: bool,
    /// Abort when the relative energy drift exceeds this.
    #[serde(default = "drift_abort")]
    pub drift_abort: f64,
}

fn one() -> usize {
    1
}

fn drift_abort() -> f64 {
    ENERGY_DRIFT_ABORT
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        IntegratorConfig {
            dt,
            t_end,
            stride: 1,
            scheme: Scheme::default(),
            full_state: false,
            drift_abort: ENERGY_DRIFT_ABORT,
        }
    }

    pub fn stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn full_state(mut self, on: bool) -> Self {
        self.full_state = on;
        self
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Sampled trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `D_n` per record.
    pub mode_d: Vec<Vec<f64>>,
    /// `B_n` per record.
    pub mode_b: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
    /// Full states, when requested.
    pub states: Vec<State>,
    pub final_state: State,
}

impl Trajectory {
    /// `max |H(t) − H(0)|/H(0)`.
    pub fn energy_drift(&self) -> f64 {
        let h0 = self.energy[0];
        self.energy.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max) / h0.abs().max(f64::MIN_POSITIVE)
    }

    /// Series of one mode's `D`.
    pub fn d_series(&self, mode: usize) -> Vec<f64> {
        self.mode_d.iter().map(|d| d[mode]).collect()
    }
}

/// Advances `st` by one composed step of size `dt`. `buf` is scratch of
/// length `dim`.
pub fn step(sys: &LinearSystem, st: &mut State, dt: f64, weights: &[f64], buf: &mut [f64]) {
    for &w in weights {
        let h = w * dt;
        sys.force(&st.x, buf);
        for (p, f) in st.p.iter_mut().zip(buf.iter()) {
            *p += 0.5 * h * f;
        }
        for (x, p) in st.x.iter_mut().zip(&st.p) {
            *x += h * p;
        }
        sys.force(&st.x, buf);
        for (p, f) in st.p.iter_mut().zip(buf.iter()) {
            *p += 0.5 * h * f;
        }
    }
}

/// Checks the step against the stability margin `Δt < 0.1/ω_max`.
pub fn check_step(sys: &LinearSystem, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", "must be finite and > 0"));
    }
    let wmax = sys.max_frequency();
    if dt * wmax >= STABILITY_MARGIN {
        return Err(Error::invalid(
            "dt",
            format!("Δt·ω_max = {:.3} exceeds the stability margin {STABILITY_MARGIN}", dt * wmax),
        ));
    }
    Ok(())
}

/// Integrates from `z0` at `t = 0` to `t_end`.
pub fn integrate(sys: &LinearSystem, z0: &State, cfg: &IntegratorConfig) -> Result<Trajectory> {
    if z0.dim() != sys.dim() {
        return Err(Error::invalid("initial", format!("state has {} positions, system {}", z0.dim(), sys.dim())));
    }
    if cfg.stride == 0 {
        return Err(Error::invalid("stride", "must be ≥ 1"));
    }
    if !(cfg.t_end >= 0.0 && cfg.t_end.is_finite()) {
        return Err(Error::invalid("t_end", "must be finite and ≥ 0"));
    }
    check_step(sys, cfg.dt)?;
    let weights = cfg.scheme.weights();
    let nm = sys.n_modes();
    let mut st = z0.clone();
    let mut buf = vec![0.0; sys.dim()];
    let h0 = sys.energy(&st);
    let mut tr = Trajectory {
        times: vec![],
        mode_d: vec![],
        mode_b: vec![],
        energy: vec![],
        states: vec![],
        final_state: st.clone(),
    };
    let record = |tr: &mut Trajectory, st: &State, t: f64| -> Result<()> {
        let h = sys.energy(st);
        let drift = (h - h0).abs() / h0.abs().max(f64::MIN_POSITIVE);
        if h0 != 0.0 && drift > cfg.drift_abort {
            return Err(Error::Stability { drift, bound: cfg.drift_abort, time: t });
        }
        tr.times.push(t);
        tr.mode_d.push(sys.mode_d(st));
        tr.mode_b.push(st.p[..nm].to_vec());
        tr.energy.push(h);
        if cfg.full_state {
            tr.states.push(st.clone());
        }
        Ok(())
    };
    record(&mut tr, &st, 0.0)?;
    let steps = cfg.steps();
    for k in 1..=steps {
        step(sys, &mut st, cfg.dt, &weights, &mut buf);
        if k % cfg.stride == 0 {
            record(&mut tr, &st, k as f64 * cfg.dt)?;
        }
    }
    tr.final_state = st;
    Ok(tr)
}
