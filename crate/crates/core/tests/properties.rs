use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;
use ratsurf::dynamics::{self, FixedPointType};
use ratsurf::family::{eval_f, eval_f_inverse};
use ratsurf::lattice;
use ratsurf::report::{self, SuiteConfig};
use ratsurf::{AffinePoint, CSpec, MapParams};

fn member(k: u32, coeffs: &[f64]) -> MapParams {
    let mut a = BTreeMap::new();
    for (i, v) in coeffs.iter().enumerate() {
        let l = 2 * (i as u32 + 1);
        if l + 2 <= k {
            a.insert(l, Complex64::new(*v, 0.0));
        }
    }
    MapParams::new(2, k, CSpec::Root { j: 1, sign: 1 }, a).unwrap()
}

fn trace_inverse(p: &MapParams, pt: AffinePoint) -> Complex64 {
    // Df^-1 by central differences of the inverse map
    let h = 1e-6;
    let d = |dx: f64, dy: f64| {
        let q = AffinePoint::new(pt.x + dx, pt.y + dy);
        eval_f_inverse(p, q).unwrap()
    };
    let dxx = (d(h, 0.0).x - d(-h, 0.0).x) / (2.0 * h);
    let dyy = (d(0.0, h).y - d(0.0, -h).y) / (2.0 * h);
    dxx + dyy
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_undoes_map(x in -2.0f64..2.0, y in 0.3f64..2.0, a in -3.0f64..3.0) {
        let p = member(4, &[a]);
        let pt = AffinePoint::real(x, y);
        let back = eval_f_inverse(&p, eval_f(&p, pt).unwrap()).unwrap();
        prop_assert!(back.dist(&pt) < 1e-9 * (1.0 + x.abs() + y.abs()));
    }

    #[test]
    fn fixed_point_invariants(a2 in -3.0f64..3.0, a4 in -3.0f64..3.0) {
        let p = member(6, &[a2, a4]);
        let fps = dynamics::fixed_points(&p).unwrap();
        prop_assert_eq!(fps.len(), 7);
        for r in &fps {
            prop_assert!(r.residual <= 1e-10);
            let jac = dynamics::jacobian(&p, r.point()).unwrap();
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            prop_assert!((det - 1.0).norm() <= 1e-9);
            // the reversor gives Df^-1 the same trace at a fixed point
            let ti = trace_inverse(&p, r.point());
            prop_assert!((ti - r.trace).norm() < 1e-4 * (1.0 + r.trace.norm()), "{} vs {}", ti, r.trace);
        }
        // real parameters: non-real roots come in conjugate pairs
        let nonreal = fps.iter().filter(|r| r.kind == FixedPointType::Complex).count();
        prop_assert_eq!(nonreal % 2, 0);
    }

    #[test]
    fn real_seeds_stay_real(x in -1.0f64..1.0, y in 0.5f64..1.5, a in -3.0f64..3.0) {
        let p = member(4, &[a]);
        let o = dynamics::iterate_orbit(&p, AffinePoint::real(x, y), 200);
        prop_assert!(o.points.iter().all(|q| q.x.im == 0.0 && q.y.im == 0.0));
    }
}

#[test]
fn pushforward_ignores_coefficients() {
    // f_* depends only on (n, k)
    let a = lattice::pushforward_matrix(&member(6, &[0.5, -1.0]));
    let b = lattice::pushforward_nk(2, 6);
    assert_eq!(a.matrix, b.matrix);
}

#[test]
fn perturbation_separates_trace_sets() {
    let p0 = member(6, &[0.0, 0.0]);
    let p1 = member(6, &[0.0, 0.05]);
    let p2 = member(6, &[0.05, 0.0]);
    assert!(dynamics::trace_set_separation(&p0, &p1).unwrap().separated);
    assert!(dynamics::trace_set_separation(&p1, &p2).unwrap().separated);
    assert!(!dynamics::trace_set_separation(&p2, &p2).unwrap().separated);
}

#[test]
fn tampered_center_table_fails_verify() {
    let p = MapParams::figure1();
    let mut ct = report::centers_for(&p).unwrap();
    ct.set(0, 4, Complex64::new(3.0, 0.0));
    let v = report::verify_with(&p, &SuiteConfig::default(), Some(&ct));
    assert!(!v.passed());
    let charts = v.suites.iter().find(|s| s.suite == "charts").unwrap();
    assert!(!charts.passed());
    assert!(v.suites.iter().filter(|s| s.suite != "charts").all(|s| s.passed()));
}

#[test]
fn param_file_round_trip() {
    let p = MapParams::figure1();
    let text = serde_json::to_string(&p.to_file_format()).unwrap();
    let q = MapParams::from_json_str(&text).unwrap();
    assert_eq!(p.a, q.a);
    assert_eq!((p.n, p.k, p.c_value()), (q.n, q.k, q.c_value()));
}

#[test]
fn manifolds_mirror_for_all_saddles() {
    let p = MapParams::figure1();
    let cfg = dynamics::ManifoldConfig { arclength: 2.0, ..Default::default() };
    for fp in dynamics::fixed_points(&p).unwrap().iter().filter(|r| r.kind == FixedPointType::Saddle) {
        let u = dynamics::unstable_manifold(&p, fp, &cfg).unwrap();
        let s = dynamics::stable_manifold(&p, fp, &cfg).unwrap();
        for (lu, ls) in u.iter().zip(&s) {
            assert_eq!(lu.points.len(), ls.points.len());
        }
        // f maps the stable manifold into itself
        let defect = dynamics::invariance_defect(&p, &s, cfg.window);
        assert!(defect < 1e-4, "{defect}");
    }
}
