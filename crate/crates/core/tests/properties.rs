//! Property tests for invariants that span modules.

use std::f64::consts::PI;

use prescribed_curvature::background::BackgroundGeometry;
use prescribed_curvature::mesh::{generators, BoundaryTag, Mesh, ScalarField, Support};
use prescribed_curvature::obstructions::{
    integral_conditions, kazdan_warner_escobar, sign_class_condition, sign_condition, trichotomy_dispatch,
    DispatchOptions, KillingField, Problem, Verdict,
};
use prescribed_curvature::prescribe::{minimize_constrained, Side, SolverConfig};
use prescribed_curvature::spectral::SignClass;
use proptest::prelude::*;

fn wave(mesh: &Mesh, support: Support, c: &[f64; 5]) -> ScalarField {
    ScalarField::from_fn(mesh, support, |_, p| {
        let t = p[1].atan2(p[0]);
        c[0] * t.sin() + c[1] * t.cos() + c[2] * (2.0 * t).sin() + c[3] * p[2] + c[4]
    })
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = [f64; 5]> {
    prop::array::uniform5(-1.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauss_bonnet_survives_rescaling(c in coeffs(), amp in 0.0f64..0.5) {
        for m in [generators::disk(5), generators::annulus(1.0, 2.0, 24, 4), generators::hemisphere(4)] {
            let u = wave(&m, Support::All, &c);
            let s = u.values().iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-12);
            let u = u.map(|x| amp * x / s);
            let r = m.conformal_rescale_lengths(&u).unwrap();
            prop_assert!(r.gauss_bonnet_residual().unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn conformal_field_integral_is_bilinear(c in coeffs(), d in coeffs(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let m = generators::ball(3);
        let h1 = wave(&m, Support::Boundary, &c);
        let h2 = wave(&m, Support::Boundary, &d);
        let mix = ScalarField::new(&m, Support::Boundary,
            h1.values().iter().zip(h2.values()).map(|(x, y)| a * x + b * y).collect()).unwrap();
        let x = KillingField::conformal_translation(&m, [0.3, -0.4, 1.0]).unwrap();
        let lhs = kazdan_warner_escobar(&m, &mix, &x).unwrap();
        let rhs = a * kazdan_warner_escobar(&m, &h1, &x).unwrap() + b * kazdan_warner_escobar(&m, &h2, &x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs() + rhs.abs()));

        let (p, q) = ([d[0], d[1], d[2]], [c[2], c[3], c[4]]);
        let sum = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
        let rot = |axis| kazdan_warner_escobar(&m, &h1, &KillingField::rotation(&m, axis).unwrap()).unwrap();
        prop_assert!((rot(sum) - rot(p) - rot(q)).abs() < 1e-12);
    }

    #[test]
    fn sign_predicates_are_scale_invariant(c in coeffs(), s in 1e-3f64..1e3) {
        let m = generators::disk(4);
        let t = wave(&m, Support::Boundary, &c);
        let scaled = t.map(|x| s * x);
        for chi in [-1, 0, 1] {
            prop_assert_eq!(sign_condition(chi, &t), sign_condition(chi, &scaled));
        }
    }

    #[test]
    fn class_predicates_are_monotone(c in coeffs(), d in coeffs()) {
        let m = generators::cube(2);
        let h = wave(&m, Support::Boundary, &c);
        let g = wave(&m, Support::Boundary, &d);
        let lo: Vec<f64> = h.values().iter().zip(g.values()).map(|(a, b)| a.min(*b)).collect();
        let hi: Vec<f64> = h.values().iter().zip(g.values()).map(|(a, b)| a.max(*b)).collect();
        if sign_class_condition(SignClass::Neg, h.values()) {
            prop_assert!(sign_class_condition(SignClass::Neg, &lo));
        }
        if sign_class_condition(SignClass::Pos, h.values()) {
            prop_assert!(sign_class_condition(SignClass::Pos, &hi));
        }
    }

    #[test]
    fn integral_witnesses_scale_linearly(c in coeffs(), s in 0.1f64..10.0) {
        let m = generators::annulus(1.0, 2.0, 24, 4);
        let bg = BackgroundGeometry::intrinsic(&m).unwrap();
        let t = wave(&m, Support::Boundary, &c);
        let a = integral_conditions(&m, &bg, &t, Side::Boundary).unwrap();
        let b = integral_conditions(&m, &bg, &t.map(|x| s * x), Side::Boundary).unwrap();
        for (k, v) in &a {
            prop_assert!((s * v.value - b[k].value).abs() <= 1e-10 * (1.0 + s * v.value.abs()));
            prop_assert_eq!(v.pass, b[k].pass);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The dispatch never rules out a target that the constrained solver
    /// solves, and never attaches a non-converged report to `Exists`.
    #[test]
    fn annulus_verdicts_agree_with_the_solver(c in coeffs()) {
        let m = generators::annulus(1.0, 2.0, 24, 4);
        let bg = BackgroundGeometry::intrinsic(&m).unwrap();
        let t = wave(&m, Support::Boundary, &c);
        let cfg = SolverConfig::default();
        let v = trichotomy_dispatch(&m, &bg, &t, Problem::PC0, &DispatchOptions::default()).unwrap();
        let r = minimize_constrained(&m, &bg, &t, Side::Boundary, &cfg).unwrap();
        if r.converged() {
            prop_assert!(r.max_residual() < cfg.tol);
            prop_assert_ne!(v.verdict, Verdict::NotExists);
        }
        if v.verdict == Verdict::Exists {
            if let Some(rep) = &v.report {
                prop_assert!(rep.converged());
            }
        }
    }
}

#[test]
fn flat_annulus_boundary_total_vanishes() {
    let m = generators::annulus(1.0, 2.0, 64, 4);
    let bg = BackgroundGeometry::intrinsic(&m).unwrap();
    let ell = m.boundary_measures(BoundaryTag::D0);
    let total: f64 = bg.boundary().iter().map(|(i, k)| ell[i] * k).sum();
    assert!(total.abs() < 1e-10);
    let outer: f64 = (0..m.num_vertices()).filter(|&i| m.vertex(i)[0].hypot(m.vertex(i)[1]) > 1.5).map(|i| ell[i]).sum();
    assert!((outer - 4.0 * PI).abs() < 0.01 * 4.0 * PI);
}
