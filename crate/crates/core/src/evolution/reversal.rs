//! Microscopic time-reversal audit.

use crate::error::{Error, Result};
use crate::evolution::integrator::Trajectory;
use crate::evolution::system::{LinearSystem, State};

/// Eighth-order central first-derivative stencil, offsets −4..=4.
const STENCIL: [f64; 9] =
    [1.0 / 280.0, -4.0 / 105.0, 1.0 / 5.0, -4.0 / 5.0, 0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// Time-reversed samples `(x(−t), −p(−t))` on the grid `t = −T..0`.
pub fn reversed_states(states: &[State]) -> Vec<State> {
    states.iter().rev().map(|s| State { x: s.x.clone(), p: s.p.iter().map(|v| -v).collect() }).collect()
}

/// Applies the equations of motion `ẋ = p`, `ṗ = −Kx` to the reversed
/// trajectory with an eighth-order finite-difference derivative; returns
/// the largest residual relative to the largest right-hand side.
pub fn time_reversal_check(sys: &LinearSystem, traj: &Trajectory) -> Result<f64> {
    let states = &traj.states;
    if states.len() < STENCIL.len() {
        return Err(Error::invalid("trajectory", "needs full states at ≥ 9 uniformly spaced records"));
    }
    let h = traj.times[1] - traj.times[0];
    let rev = reversed_states(states);
    let n = sys.dim();
    let mut force = vec![0.0; n];
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for c in 4..rev.len() - 4 {
        sys.force(&rev[c].x, &mut force);
        for i in 0..n {
            let dx: f64 = STENCIL.iter().enumerate().map(|(k, w)| w * rev[c + k - 4].x[i]).sum::<f64>() / h;
            let dp: f64 = STENCIL.iter().enumerate().map(|(k, w)| w * rev[c + k - 4].p[i]).sum::<f64>() / h;
            worst = worst.max((dx - rev[c].p[i]).abs()).max((dp - force[i]).abs());
            scale = scale.max(rev[c].p[i].abs()).max(force[i].abs());
        }
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}
