//! Energy bookkeeping along a trajectory.

use serde::Serialize;

use crate::evolution::system::{LinearSystem, State};

/// Energy ledger at one time.
///
/// `h_m0` is the energy of the bath's free evolution started from the
/// reference state (constant in time); `h_rem` is the electromagnetic energy
/// of the reference state, so that `total = h_rem + h_m0` by conservation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub time: f64,
    pub total: f64,
    pub electromagnetic: f64,
    pub material: f64,
    pub h_m0: f64,
    pub h_rem: f64,
    /// `|total − (h_rem + h_m0)| / total`.
    pub ledger_defect: f64,
    /// `|total − (electromagnetic + material)| / total`.
    pub split_defect: f64,
}

/// Energy of the reference bath state after free evolution over `t`.
pub fn free_bath_energy_at(sys: &LinearSystem, reference: &State, t: f64) -> f64 {
    let nm = sys.n_modes();
    let mut e = 0.0;
    for s in sys.sites() {
        for (i, &w) in s.omegas.iter().enumerate() {
            let k = nm + s.offset + i;
            let (c, sn) = ((w * t).cos(), (w * t).sin());
            let x = reference.x[k] * c + reference.p[k] * sn / w;
            let p = -reference.x[k] * w * sn + reference.p[k] * c;
            e += 0.5 * (p * p + w * w * x * x);
        }
    }
    e
}

/// Ledger of `state` at `time`, relative to the reference state at `t₀ = 0`.
pub fn energy_report(sys: &LinearSystem, state: &State, time: f64, reference: &State) -> EnergyReport {
    let (em, mat) = sys.energy_parts(state);
    let total = sys.energy(state);
    let h_m0 = free_bath_energy_at(sys, reference, time);
    let h_rem = sys.energy_parts(reference).0;
    let scale = total.abs().max(f64::MIN_POSITIVE);
    EnergyReport {
        time,
        total,
        electromagnetic: em,
        material: mat,
        h_m0,
        h_rem,
        ledger_defect: (total - h_rem - h_m0).abs() / scale,
        split_defect: (total - em - mat).abs() / scale,
    }
}
