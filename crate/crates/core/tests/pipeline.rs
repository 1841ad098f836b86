//! Cross-module pipelines exercised through the public API only: parsed
//! maps feed the potential machinery, saddles feed manifolds, families feed
//! scans, and every claim is re-verified by an independent route inside the
//! test rather than by trusting the module that produced it.

use henon_core::currents::{slice, ComplexLine, PotentialField};
use henon_core::family::{family_green, param_scan, Family};
use henon_core::green::{classify, green_plus, green_plus_budget, Box4};
use henon_core::grid::Window;
use henon_core::henon::HenonType;
use henon_core::nevanlinna::{stable_manifold, suggested_depth, Saddle};
use henon_core::periodic::{fixed_points_exact, periodic_points, StabilityKind};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn parsed_map_agrees_with_the_built_one_through_the_whole_potential_stack() {
    let text = "# horseshoe\nfactor a=0.4,0 p=-1.1,0,0,0,1,0\n";
    let parsed = HenonType::parse(text).unwrap();
    let built = HenonType::quadratic(c(-1.1, 0.0), c(0.4, 0.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let mut coord = || rng.gen_range(-2.5..2.5);
        let z = [c(coord(), coord()), c(coord(), coord())];
        let a = green_plus(&parsed, z, 1e-8).unwrap();
        let b = green_plus(&built, z, 1e-8).unwrap();
        // same factor data must give bit-identical orbits, not merely close
        assert_eq!(a.value, b.value);
        assert_eq!(a.escaped_at, b.escaped_at);
        let ca = classify(&parsed, z, 256).unwrap();
        let cb = classify(&built, z, 256).unwrap();
        assert_eq!(ca.forward.is_escaping(), cb.forward.is_escaping());
    }
}

#[test]
fn classification_and_potential_tell_one_story() {
    let f = HenonType::quadratic(c(0.0, 0.0), c(0.3, 0.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut escaping = 0;
    let mut bounded = 0;
    for _ in 0..2_000 {
        let mut coord = || rng.gen_range(-2.0..2.0);
        let z = [c(coord(), coord()), c(coord(), coord())];
        let tag = classify(&f, z, 512).unwrap().forward;
        let g = green_plus_budget(&f, z, 1e-8, 512).unwrap();
        if tag.is_escaping() {
            escaping += 1;
            assert!(g.value > 0.0);
            assert!(g.escaped_at.is_some());
        } else {
            bounded += 1;
            assert_eq!(g.value, 0.0);
            assert_eq!(g.escaped_at, None);
        }
    }
    // the attracting basin and the escape locus both have volume here
    assert!(escaping > 100, "escaping side vacuous: {escaping}");
    assert!(bounded > 100, "bounded side vacuous: {bounded}");
}

#[test]
fn the_potential_nearly_vanishes_along_a_computed_stable_manifold() {
    let f = HenonType::quadratic(c(-1.1, 0.0), c(0.4, 0.0)).unwrap();
    let saddle_pt = fixed_points_exact(&f)
        .unwrap()
        .into_iter()
        .find(|p| p.kind == StabilityKind::Saddle)
        .unwrap();
    let s = Saddle::from_periodic(&f, &saddle_pt).unwrap();
    let depth = suggested_depth(&f, &s, 1.0).unwrap();
    let curve = stable_manifold(&f, &s, depth, 1.0).unwrap();
    let anchor = curve.value(c(0.0, 0.0));
    assert!((anchor[0] - s.point[0]).norm() < 1e-12);
    assert!((anchor[1] - s.point[1]).norm() < 1e-12);
    // exact vanishing is unreachable here: forward shadowing breaks after
    // ~log_mu(1/eps) steps, after which certified escape fires on rounding
    // noise, leaving a d^{-n}-sized residue instead of zero
    for k in 0..24 {
        let xi = Complex64::from_polar(0.8, std::f64::consts::TAU * k as f64 / 24.0);
        let g = green_plus(&f, curve.value(xi), 1e-8).unwrap();
        assert!(g.value <= 1e-8, "G = {} off the manifold at angle {k}", g.value);
    }
}

#[test]
fn period_two_census_survives_independent_reverification() {
    let f = HenonType::quadratic(c(-1.1, 0.0), c(0.4, 0.0)).unwrap();
    let census = periodic_points(&f, 2, &Box4::symmetric(2.5).unwrap(), 6).unwrap();
    assert!(census.complete);
    assert_eq!(census.points.len(), 4);
    let det2 = f.jacobian_det() * f.jacobian_det();
    for p in &census.points {
        let back = f.apply_c(f.apply_c(p.point));
        let drift = (back[0] - p.point[0]).norm() + (back[1] - p.point[1]).norm();
        assert!(drift <= 1e-10, "two-step return drift {drift}");
        let prod = p.multipliers[0] * p.multipliers[1];
        assert!((prod - det2).norm() <= 1e-8);
    }
}

#[test]
fn slice_mass_is_stable_under_resolution_doubling() {
    let f = HenonType::quadratic(c(-1.1, 0.0), c(0.4, 0.0)).unwrap();
    let s = PotentialField::green_plus(&f, 1e-8, 512);
    let line = ComplexLine::z2_const(c(0.0, 0.0));
    let w = Window::square(3.0).unwrap();
    let coarse = slice(&s, &line, &w, 96).unwrap();
    let fine = slice(&s, &line, &w, 192).unwrap();
    assert!((coarse.total_mass - 1.0).abs() < 0.05, "coarse {}", coarse.total_mass);
    assert!((fine.total_mass - 1.0).abs() < 0.05, "fine {}", fine.total_mass);
    assert!(
        (fine.total_mass - 1.0).abs() <= (coarse.total_mass - 1.0).abs() + 1e-6,
        "refinement moved mass away from 1: {} -> {}",
        coarse.total_mass,
        fine.total_mass
    );
}

#[test]
fn family_fibers_match_directly_built_maps_and_scans_match_fibers() {
    let fam = Family::quadratic_default();
    let params = [c(-1.1, 0.0), c(0.4, 0.0)];
    let direct = HenonType::quadratic(params[0], params[1]).unwrap();
    let z = [c(0.7, 0.2), c(-0.4, 0.5)];
    let via_family = family_green(&fam, params, z, 1e-8).unwrap();
    let via_direct = green_plus(&direct, z, 1e-8).unwrap();
    assert_eq!(via_family.value, via_direct.value);

    let w = Window::new(-1.35, -0.85, -0.25, 0.25).unwrap();
    let scan = param_scan(&fam, [c(0.0, 0.0), c(0.0, 0.0)], &w, params[1], 9, 7, 1e-8, 256)
        .unwrap();
    for (col, row) in [(0usize, 0usize), (4, 3), (8, 6)] {
        let c1 = c(w.x_coord(col, 9), w.y_coord(row, 7));
        let fiber = fam.build([c1, params[1]]).unwrap();
        let g = green_plus_budget(&fiber, [c(0.0, 0.0), c(0.0, 0.0)], 1e-8, 256).unwrap();
        assert_eq!(scan.green.get(col, row).value, g.value);
    }
}
