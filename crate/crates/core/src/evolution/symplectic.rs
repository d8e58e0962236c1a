//! Symplectic-form audit of the discrete flow map.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::integrator::{check_step, step, Scheme};
use crate::evolution::system::{LinearSystem, State};

/// Deviations above this are reported as a broken symplectic structure.
pub const FLAG_THRESHOLD: f64 = 1e-2;

/// Which flow to audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowVariant {
    /// The complete field–bath flow `M(T)`.
    Full,
    /// Langevin-only surrogate `M(T)·Π_bath`: the field is reconstructed
    /// from the bath data alone, the field initial data being discarded.
    LangevinOnly,
}

/// How the fundamental matrix is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Every column, from repeated squaring of the one-step matrix.
    Dense,
    /// Position and momentum columns of `modes` evenly spaced field modes
    /// and `bath` evenly spaced bath lines, each integrated directly.
    Sampled { modes: usize, bath: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymplecticReport {
    /// `‖Mᵀ J M − J‖_max` over the audited columns.
    pub deviation: f64,
    pub columns: usize,
    pub variant: FlowVariant,
    pub flagged: bool,
}

/// Phase-space coordinate index: positions `0..n`, momenta `n..2n`.
fn unit(n: usize, idx: usize) -> State {
    let mut st = State::zeros(n);
    if idx < n {
        st.x[idx] = 1.0;
    } else {
        st.p[idx - n] = 1.0;
    }
    st
}

fn one_step_matrix(sys: &LinearSystem, dt: f64, weights: &[f64]) -> DMatrix<f64> {
    let n = sys.dim();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    let mut buf = vec![0.0; n];
    for j in 0..2 * n {
        let mut st = unit(n, j);
        step(sys, &mut st, dt, weights, &mut buf);
        for i in 0..n {
            m[(i, j)] = st.x[i];
            m[(n + i, j)] = st.p[i];
        }
    }
    m
}

fn matrix_power(s: &DMatrix<f64>, mut k: usize) -> DMatrix<f64> {
    let mut result = DMatrix::identity(s.nrows(), s.ncols());
    let mut base = s.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Evolves the fundamental solution over `t_end` and returns
/// `‖Mᵀ J M − J‖_max` on the audited columns.
pub fn symplectic_form_check(
    sys: &LinearSystem,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
    sampling: Sampling,
    variant: FlowVariant,
) -> Result<SymplecticReport> {
    check_step(sys, dt)?;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::invalid("t_end", "must be finite and ≥ 0"));
    }
    let weights = scheme.weights();
    let n = sys.dim();
    let nm = sys.n_modes();
    let steps = (t_end / dt).round() as usize;
    let is_field = |idx: usize| (idx % n) < nm;
    let columns: Vec<usize> = match sampling {
        Sampling::Dense => (0..2 * n).collect(),
        Sampling::Sampled { modes, bath } => {
            let pick = |count: usize, len: usize| -> Vec<usize> {
                let take = count.min(len);
                (0..take).map(|j| j * len / take).collect()
            };
            let mut c = Vec::new();
            for m in pick(modes, nm) {
                c.extend([m, n + m]);
            }
            for b in pick(bath, n - nm) {
                c.extend([nm + b, n + nm + b]);
            }
            c.sort_unstable();
            c.dedup();
            c
        }
    };
    // evolved columns as (x, p)
    let evolved: Vec<State> = match sampling {
        Sampling::Dense => {
            let m = matrix_power(&one_step_matrix(sys, dt, &weights), steps);
            columns
                .iter()
                .map(|&j| State {
                    x: m.column(j).rows(0, n).iter().copied().collect(),
                    p: m.column(j).rows(n, n).iter().copied().collect(),
                })
                .collect()
        }
        Sampling::Sampled { .. } => {
            let mut buf = vec![0.0; n];
            columns
                .iter()
                .map(|&j| {
                    let mut st = unit(n, j);
                    for _ in 0..steps {
                        step(sys, &mut st, dt, &weights, &mut buf);
                    }
                    st
                })
                .collect()
        }
    };
    let evolved: Vec<State> = evolved
        .into_iter()
        .zip(&columns)
        .map(|(st, &j)| if variant == FlowVariant::LangevinOnly && is_field(j) { State::zeros(n) } else { st })
        .collect();
    let omega = |a: &State, b: &State| -> f64 {
        a.x.iter().zip(&b.p).map(|(x, p)| x * p).sum::<f64>() - a.p.iter().zip(&b.x).map(|(p, x)| p * x).sum::<f64>()
    };
    let j_entry = |a: usize, b: usize| -> f64 {
        if a < n && b == a + n {
            1.0
        } else if a >= n && a == b + n {
            -1.0
        } else {
            0.0
        }
    };
    let mut deviation: f64 = 0.0;
    for (ia, &a) in columns.iter().enumerate() {
        for (ib, &b) in columns.iter().enumerate().skip(ia + 1) {
            deviation = deviation.max((omega(&evolved[ia], &evolved[ib]) - j_entry(a, b)).abs());
        }
    }
    Ok(SymplecticReport { deviation, columns: columns.len(), variant, flagged: deviation > FLAG_THRESHOLD })
}
