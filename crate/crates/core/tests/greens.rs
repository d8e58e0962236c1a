use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use polariton_core::greens::dyadic::{closure, green_closed_form, mode_terms, s_dyadic_homogeneous, s_identity_defect};
use polariton_core::greens::{
    complexify, depolarization_dyad, g_dyadic_homogeneous, lippmann_schwinger_solve, max_abs, vacuum_time_propagators,
    BoxModeBasis, Dyad, ExclusionShape, GreenBackground, HomogeneousBackground, Polarization, ScatterCell,
    ScattererGrid, Site, SolvedGreen,
};
use polariton_core::propagators::scalar_green;
use polariton_core::Medium;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn lossy() -> Medium {
    Medium::single(1.0, 1.0, 0.1).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> Vector3<f64> {
    Vector3::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

#[test]
fn vacuum_far_field_matches_asymptotic_expansion() {
    let w = 2.0;
    let r_dir = Vector3::new(1.0, 2.0, -0.5).normalize();
    let r = r_dir * (50.0 / w);
    let g = g_dyadic_homogeneous(&Medium::vacuum(), &r, &Vector3::zeros(), Complex64::new(w, 0.0)).unwrap().tensor;
    let kr = Complex64::new(50.0, 0.0);
    let scalar = (I * kr).exp() / (4.0 * std::f64::consts::PI * r.norm());
    let rr = complexify(&(r_dir * r_dir.transpose()));
    let id = Dyad::identity();
    let asym = ((id - rr) + (id - rr * Complex64::from(3.0)) * (I / kr)) * scalar;
    let rel = (g - asym).norm() / g.norm();
    assert!(rel < 0.01, "{rel:e}");
}

#[test]
fn reciprocity_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = lossy();
    for _ in 0..20 {
        let (x, y) = (random_point(&mut rng, 2.0), random_point(&mut rng, 2.0));
        let w = Complex64::new(rng.gen_range(0.2..3.0), 0.0);
        let a = g_dyadic_homogeneous(&m, &x, &y, w).unwrap().tensor;
        let b = g_dyadic_homogeneous(&m, &y, &x, w).unwrap().tensor;
        assert!(max_abs(&(a - b.transpose())) <= 1e-12 * max_abs(&a));
    }
}

fn fd_second(f: &dyn Fn(Vector3<f64>) -> Dyad, x: Vector3<f64>, a: usize, b: usize, h: f64) -> Dyad {
    let e = |i: usize| {
        let mut v = Vector3::zeros();
        v[i] = h;
        v
    };
    if a == b {
        (f(x + e(a)) - f(x) * Complex64::from(2.0) + f(x - e(a))) / Complex64::from(h * h)
    } else {
        (f(x + e(a) + e(b)) - f(x + e(a) - e(b)) - f(x - e(a) + e(b)) + f(x - e(a) - e(b)))
            / Complex64::from(4.0 * h * h)
    }
}

#[test]
fn dyadic_solves_vector_helmholtz_away_from_source() {
    let m = lossy();
    let w = Complex64::new(0.8, 0.0);
    let k2 = m.epsilon(w).unwrap() * w * w;
    let g = |x: Vector3<f64>| g_dyadic_homogeneous(&m, &x, &Vector3::zeros(), w).unwrap().tensor;
    let x0 = Vector3::new(0.9, -0.6, 1.3);
    let h = 1e-3;
    // (∇×∇×G)_{ac} = Σ_b ∂_a∂_b G_{bc} − Σ_b ∂_b∂_b G_{ac}
    let mut second = vec![vec![Dyad::zeros(); 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            second[a][b] = fd_second(&g, x0, a, b, h);
        }
    }
    let mut cc = Dyad::zeros();
    for a in 0..3 {
        for c in 0..3 {
            let mut v = Complex64::new(0.0, 0.0);
            for b in 0..3 {
                v += second[a][b][(b, c)] - second[b][b][(a, c)];
            }
            cc[(a, c)] = v;
        }
    }
    let res = max_abs(&(cc - g(x0) * k2)) / max_abs(&(g(x0) * k2));
    assert!(res < 1e-5, "{res:e}");
}

#[test]
fn trace_of_s_matches_curl_curl_of_scalar_green() {
    let m = lossy();
    let w = Complex64::new(1.4, 0.0);
    let x0 = Vector3::new(0.4, 0.7, -0.2);
    let s = s_dyadic_homogeneous(&m, &x0, &Vector3::zeros(), w).unwrap().tensor;
    let g = |x: Vector3<f64>| scalar_green(&m, x.norm(), w).unwrap();
    let h = 1e-3;
    let mut lap = -6.0 * g(x0);
    for a in 0..3 {
        for sgn in [-1.0, 1.0] {
            let mut x = x0;
            x[a] += sgn * h;
            lap += g(x);
        }
    }
    lap /= h * h;
    // tr ∇×∇×(g I) = tr(∇∇g) − 3∇²g = −2∇²g
    let cc_trace = -2.0 * lap;
    let rel = (s.trace() - cc_trace).norm() / s.trace().norm();
    assert!(rel < 1e-5, "{rel:e}");
}

#[test]
fn s_identity_is_exact_per_mode() {
    let b = BoxModeBasis::cubic(6.0, 6.0).unwrap();
    for w in [0.5, 1.0, 1.7] {
        let d = s_identity_defect(&b, &lossy(), &Vector3::new(0.3, -0.1, 0.8), &Vector3::new(0.1, 0.0, 0.0), w.into())
            .unwrap();
        assert!(d < 1e-13, "{d:e}");
    }
}

#[test]
fn longitudinal_part_times_minus_eps_w2_is_the_longitudinal_delta() {
    let b = BoxModeBasis::cubic(5.0, 5.0).unwrap();
    let m = lossy();
    let w = Complex64::new(1.2, 0.0);
    let eps_w2 = m.epsilon(w).unwrap() * w * w;
    let (x, y) = (Vector3::new(0.2, 0.3, -0.4), Vector3::zeros());
    for t in mode_terms(&b, &m, &x, &y, w).unwrap() {
        if t.mode.polarization == Polarization::Longitudinal {
            let kh = t.mode.k.normalize();
            let delta = complexify(&(kh * kh.transpose())) * t.phase;
            assert!(max_abs(&(t.g * (-eps_w2) - delta)) < 1e-15);
        }
    }
    // Per-mode closure: the three projectors add up to the identity.
    let c = closure(&b, &x, &y);
    let scalar: Complex64 = b.wavevectors().iter().map(|k| b.phi_phi(k, &x, &y)).sum();
    assert!(max_abs(&(c - Dyad::identity() * scalar)) < 1e-13);
}

#[test]
fn planewave_sum_converges_to_closed_form() {
    // Complex frequency so that the periodic images are exponentially small;
    // Gaussian-regularized sums because the sharply truncated one does not
    // converge pointwise.
    use polariton_core::greens::dyadic::{g_dyadic_smoothed, planewave_split_smoothed};
    let w = Complex64::new(1.0, 1.5);
    let a = 0.2;
    let x = Vector3::new(0.8, 0.3, 0.1);
    let y = Vector3::zeros();
    let exact = g_dyadic_smoothed(&Medium::vacuum(), &(x - y), w, a).unwrap();
    let mut errors = Vec::new();
    for k_max in [7.5, 15.0, 30.0] {
        let b = BoxModeBasis::cubic(10.0, k_max).unwrap();
        let (p, l) = planewave_split_smoothed(&b, &Medium::vacuum(), &x, &y, w, a).unwrap();
        // The basis omits k = 0, whose periodic-box share is the uniform −I/(εω²V).
        let k0 = Dyad::identity() * (-1.0 / (w * w * b.volume()));
        errors.push(max_abs(&(p.tensor + l.tensor + k0 - exact)) / max_abs(&exact));
    }
    println!("regularized plane-wave truncation errors: {errors:?}");
    assert!(errors[0] > errors[1] && errors[1] > errors[2]);
    assert!(errors[2] < 1e-5);
    // The regularization itself vanishes as a → 0.
    let fine = g_dyadic_smoothed(&Medium::vacuum(), &(x - y), w, 0.02).unwrap();
    let point = g_dyadic_homogeneous(&Medium::vacuum(), &x, &y, w).unwrap().tensor;
    assert!(max_abs(&(fine - point)) / max_abs(&point) < 1e-3);
}

#[test]
fn depolarization_dyads() {
    let sphere = depolarization_dyad(&ExclusionShape::Sphere).unwrap();
    assert!((sphere - Matrix3::identity() / 3.0).abs().max() < 1e-10);
    let cube = depolarization_dyad(&ExclusionShape::cube()).unwrap();
    assert!((cube.trace() - 1.0).abs() < 1e-8);
    let slab = depolarization_dyad(&ExclusionShape::slab(1e-4, 1.0)).unwrap();
    let nn = Vector3::z() * Vector3::z().transpose();
    assert!((slab - nn).abs().max() < 1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let half = [rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)];
        let offset = [
            rng.gen_range(-0.9..0.9) * half[0],
            rng.gen_range(-0.9..0.9) * half[1],
            rng.gen_range(-0.9..0.9) * half[2],
        ];
        let l = depolarization_dyad(&ExclusionShape::Box { half, offset }).unwrap();
        assert!((l.trace() - 1.0).abs() < 1e-8, "trace {}", l.trace());
    }
}

#[test]
fn vacuum_time_kernels() {
    let b = BoxModeBasis::cubic(4.0, 5.0).unwrap();
    let (x, y) = (Vector3::new(0.3, 0.1, 0.0), Vector3::zeros());
    let k0 = vacuum_time_propagators(&b, &x, &y, 0.0).unwrap();
    assert_eq!(max_abs(&k0.q) + max_abs(&k0.u_perp) + max_abs(&k0.u_par), 0.0);
    assert!(max_abs(&(k0.du - closure(&b, &x, &y))) < 1e-13);
    // Q = −∂²U per mode and Q = ∇×∇×U per mode.
    use polariton_core::greens::dyadic::{curl_curl_plane_wave, vacuum_mode_kernel_derivatives, vacuum_mode_kernels};
    for mode in b.modes() {
        for &t in &[0.3, 1.7] {
            let (q, u) = vacuum_mode_kernels(&mode, t);
            let (_, ddu) = vacuum_mode_kernel_derivatives(&mode, t);
            assert!((q + ddu).abs() < 1e-12);
            let e = mode.unit_vector();
            let p = complexify(&(e * e.transpose()));
            let cc = curl_curl_plane_wave(&mode.k, &(p * Complex64::from(u)));
            assert!(max_abs(&(cc - p * Complex64::from(q))) < 1e-12 * (1.0 + q.abs()));
        }
    }
}

fn cube_cells(n: i64, dx: f64) -> Vec<ScatterCell> {
    let mut cells = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                cells.push(ScatterCell {
                    index: [i, j, k],
                    center: Vector3::new((i as f64 + 0.5) * dx, (j as f64 + 0.5) * dx, (k as f64 + 0.5) * dx),
                    volume: dx.powi(3),
                });
            }
        }
    }
    cells
}

#[test]
fn single_cell_matches_closed_form_scatterer() {
    let w = Complex64::new(2.0, 0.0);
    let cells = cube_cells(1, 0.2);
    let chi = Complex64::new(1.5, 0.4);
    let grid = ScattererGrid { cells: cells.clone(), contrast: vec![chi], omega: w };
    let solved = lippmann_schwinger_solve(&grid, &Medium::vacuum()).unwrap();
    let c = cells[0].center;
    let v = cells[0].volume;
    // t = ω²Vχ / (1 + ω²χ/(3k²)) with k = ω in vacuum.
    let t = w * w * v * chi / (1.0 + w * w * chi / (3.0 * w * w));
    let (x, y) = (Vector3::new(1.0, 0.4, -0.3), Vector3::new(-0.6, 0.9, 0.5));
    let gb = |a: &Vector3<f64>, b: &Vector3<f64>| green_closed_form(w, &(a - b));
    let expect = gb(&x, &y) + gb(&x, &c) * gb(&c, &y) * t;
    let got = solved.green(&Site::Point(x), &Site::Point(y)).unwrap();
    assert!(max_abs(&(got - expect)) < 1e-13 * max_abs(&expect));
}

#[test]
fn two_step_solution_equals_direct_solution() {
    let w = Complex64::new(2.0, 0.0);
    let cells = cube_cells(5, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = cells.len();
    let chi1: Vec<Complex64> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Complex64::new(rng.gen_range(0.0..2.0), rng.gen_range(0.0..0.5))
            } else {
                0.0.into()
            }
        })
        .collect();
    let chi2: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..0.3))).collect();
    let total: Vec<Complex64> = chi1.iter().zip(&chi2).map(|(a, b)| a + b).collect();

    let vac = || HomogeneousBackground::new(&Medium::vacuum(), w, cells.clone()).unwrap();
    let step1 = SolvedGreen::solve(vac(), &chi1).unwrap();
    let step2 = SolvedGreen::solve(step1, &chi2).unwrap();
    let direct = SolvedGreen::solve(vac(), &total).unwrap();

    let sites = [
        Site::Point(Vector3::new(1.0, 0.2, 0.3)),
        Site::Point(Vector3::new(-0.4, 0.6, 0.1)),
        Site::Cell(0),
        Site::Cell(62),
        Site::Cell(124),
    ];
    let mut worst: f64 = 0.0;
    for a in &sites {
        for b in &sites {
            if a == b && matches!(a, Site::Point(_)) {
                continue;
            }
            let g2 = step2.green(a, b).unwrap();
            let gd = direct.green(a, b).unwrap();
            worst = worst.max(max_abs(&(g2 - gd)) / max_abs(&gd));
            // Reciprocity of the solved operator.
            let gt = direct.green(b, a).unwrap();
            assert!(max_abs(&(gd - gt.transpose())) < 1e-10 * max_abs(&gd));
        }
    }
    println!("two-step vs direct: {worst:e} (cond {:e})", direct.condition());
    assert!(worst < 1e-8);
}
