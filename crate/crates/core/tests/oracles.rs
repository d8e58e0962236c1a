//! Frozen reference values computed once at 40-digit precision
//! (`tools/freeze_oracles.py`) and never regenerated from this code.

use num_complex::Complex64;
use polariton_core::dispersion::{longitudinal_roots, transverse_roots};
use polariton_core::propagators::{h_bromwich, sum_rule_im, sum_rule_re, BromwichConfig, ResidueExpansion};
use polariton_core::{LorentzResonance, Medium};

fn reference() -> Medium {
    Medium::single(1.0, 1.0, 0.1).unwrap()
}

fn two_resonance() -> Medium {
    Medium::new("two", vec![LorentzResonance::new(1.0, 1.0, 0.3), LorentzResonance::new(0.5, 3.0, 0.05)]).unwrap()
}

/// (ω_α, [(Re Ω, Im Ω, Re D, Im D)])
const REFERENCE_ROOTS: [(f64, [(f64, f64, f64, f64); 2]); 3] = [
    (
        0.5,
        [
            (0.34347230621013571, -0.0065289324776615731, 1.5533472144883519, 0.065912198459364862),
            (1.4597281398567865, -0.093471067522338427, 5.1647923523984595, -0.74239489623409283),
        ],
    ),
    (
        1.0,
        [
            (0.62075689544513564, -0.027531436705741389, 2.1923135703634157, 0.26231435544933369),
            (1.6157569586513725, -0.072468563294258611, 2.2165598383124119, -0.26823534358775149),
        ],
    ),
    (
        2.0,
        [
            (0.875957687418469, -0.072414483310399691, 8.0002198747759497, 1.803433318271945),
            (2.2866357269964607, -0.027585516689600309, 1.2041344774365905, -0.038920035260475524),
        ],
    ),
];

const TWO_RESONANCE_ROOTS: [(f64, f64, f64, f64); 3] = [
    (0.89069134645739743, -0.21700641553355134, 5.8983762443204322, 4.6111507681439489),
    (2.1576776154907689, -0.081071611349181776, 1.3785442023331849, -0.15513495035279839),
    (3.1646416092186239, -0.051921973117266887, 8.5078560235758783, -0.11950953361624456),
];

/// H at ω_α = 1 for the reference medium, by direct oscillatory quadrature.
const REFERENCE_H: [(f64, f64); 3] =
    [(0.5, 0.46010338297425232), (1.0, 0.71243348751130590), (2.0, 0.43102812215925489)];

fn assert_roots(found: &[polariton_core::dispersion::PolaritonRoot], expect: &[(f64, f64, f64, f64)]) {
    assert_eq!(found.len(), expect.len());
    for (r, &(wr, wi, dr, di)) in found.iter().zip(expect) {
        assert!((r.omega - Complex64::new(wr, wi)).norm() < 1e-12, "{:?} vs {wr} {wi}", r.omega);
        assert!((r.d - Complex64::new(dr, di)).norm() < 1e-10 * (dr.hypot(di)), "{:?} vs {dr} {di}", r.d);
    }
}

#[test]
fn reference_medium_roots_match_frozen_values() {
    let m = reference();
    for (wa, expect) in REFERENCE_ROOTS {
        let roots = transverse_roots(&m, wa, None).unwrap();
        assert_roots(&roots, &expect);
    }
}

#[test]
fn two_resonance_roots_match_frozen_values() {
    let roots = transverse_roots(&two_resonance(), 2.0, None).unwrap();
    assert_roots(&roots, &TWO_RESONANCE_ROOTS);
    assert!(sum_rule_im(&roots, 2.0).abs() < 1e-12);
    assert!((sum_rule_re(&roots, 2.0) - 1.0).abs() < 1e-12);
}

#[test]
fn longitudinal_root_is_exact() {
    let m = Medium::single(1.0, 1.0, 0.05).unwrap();
    let roots = longitudinal_roots(&m, None).unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0].omega - Complex64::new(2f64.sqrt(), -0.05)).norm() < 1e-13);
}

#[test]
fn residue_propagator_matches_frozen_quadrature() {
    let roots = transverse_roots(&reference(), 1.0, None).unwrap();
    let e = ResidueExpansion::new(&roots, 1.0).unwrap();
    for (tau, h) in REFERENCE_H {
        assert!((e.h(tau) - h).abs() < 1e-13, "τ={tau}: {} vs {h}", e.h(tau));
    }
}

#[test]
fn bromwich_propagator_matches_frozen_quadrature() {
    let w = h_bromwich(&reference(), 1.0, &BromwichConfig::default()).unwrap();
    for (tau, h) in REFERENCE_H {
        assert!((w.at(tau).unwrap() - h).abs() < 1e-7, "τ={tau}: {} vs {h}", w.at(tau).unwrap());
    }
}
