mod common;

use std::f64::consts::PI;

use archimedean::base::BaseDomain;
use archimedean::special::unit_ball_volume;
use proptest::prelude::*;

use common::central_derivative;

fn irregular() -> BaseDomain {
    BaseDomain::polygon(vec![[0.0, -1.0], [1.5, -0.4], [1.2, 0.9], [-0.3, 1.1], [-1.1, 0.2]]).unwrap()
}

fn shapes() -> Vec<BaseDomain> {
    vec![
        BaseDomain::centered_ball(3, 0.8).unwrap(),
        BaseDomain::ball(vec![0.3, -0.2], 0.5).unwrap(),
        BaseDomain::ellipse([0.1, 0.2], [0.9, 0.4]).unwrap(),
        BaseDomain::regular_polygon(6, 0.5).unwrap(),
        irregular(),
    ]
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    ((p[0] - a[0] - t * dx).powi(2) + (p[1] - a[1] - t * dy).powi(2)).sqrt()
}

/// Distance to a dense sampling of the ellipse, refined by golden-section
/// search around the nearest sample.
fn ellipse_distance(p: [f64; 2], c: [f64; 2], ab: [f64; 2]) -> f64 {
    let d = |t: f64| ((c[0] + ab[0] * t.cos() - p[0]).powi(2) + (c[1] + ab[1] * t.sin() - p[1]).powi(2)).sqrt();
    let n = 20_000;
    let step = 2.0 * PI / n as f64;
    let best = (0..n).map(|i| i as f64 * step).min_by(|a, b| d(*a).total_cmp(&d(*b))).unwrap();
    let (mut lo, mut hi) = (best - step, best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
        if d(m1) < d(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    d(0.5 * (lo + hi))
}

#[test]
fn volumes() {
    assert!(
        (BaseDomain::centered_ball(4, 0.7).unwrap().volume() - unit_ball_volume(4) * 0.7f64.powi(4)).abs() <= 1e-15
    );
    assert!((BaseDomain::ellipse([1.0, 2.0], [0.9, 0.4]).unwrap().volume() - PI * 0.36).abs() <= 1e-14);
    // shoelace by hand for the irregular pentagon
    let v = [[0.0, -1.0], [1.5, -0.4], [1.2, 0.9], [-0.3, 1.1], [-1.1, 0.2]];
    let area: f64 = (0..5).map(|i| v[i][0] * v[(i + 1) % 5][1] - v[(i + 1) % 5][0] * v[i][1]).sum::<f64>() / 2.0;
    assert!((irregular().volume() - area).abs() <= 1e-14);
    let hex = BaseDomain::regular_polygon(6, 0.5).unwrap();
    assert!((hex.volume() - 6.0 * 0.25 * (PI / 6.0).tan()).abs() <= 1e-14);
    assert!((hex.inradius() - 0.5).abs() <= 1e-15);
}

#[test]
fn distances_match_brute_force() {
    let poly = irregular();
    let v = [[0.0, -1.0], [1.5, -0.4], [1.2, 0.9], [-0.3, 1.1], [-1.1, 0.2]];
    let e = BaseDomain::ellipse([0.1, 0.2], [0.9, 0.4]).unwrap();
    for i in 0..40 {
        for j in 0..40 {
            let p = [-1.2 + 2.8 * i as f64 / 39.0, -1.1 + 2.3 * j as f64 / 39.0];
            if poly.contains(&p) {
                let brute = (0..5).map(|q| segment_distance(p, v[q], v[(q + 1) % 5])).fold(f64::INFINITY, f64::min);
                assert!((poly.distance_to_boundary(&p).unwrap() - brute).abs() <= 1e-13, "{p:?}");
            }
            if e.contains(&p) {
                let brute = ellipse_distance(p, [0.1, 0.2], [0.9, 0.4]);
                assert!((e.distance_to_boundary(&p).unwrap() - brute).abs() <= 1e-10, "{p:?}");
            }
        }
    }
}

#[test]
fn outside_points_are_rejected() {
    for d in shapes() {
        let (_, hi) = d.bounding_box();
        let far: Vec<f64> = hi.iter().map(|h| h + 1.0).collect();
        assert!(!d.contains(&far));
        assert!(d.distance_to_boundary(&far).is_err());
        assert!(d.signed_distance(&far).unwrap() < 0.0);
    }
}

fn point_in(d: &BaseDomain, u: &[f64]) -> Vec<f64> {
    let (lo, hi) = d.bounding_box();
    (0..d.dim()).map(|i| lo[i] + (hi[i] - lo[i]) * u[i]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// `|∇ω| = 1` off the singular set, with `∇ω` from central differences.
    #[test]
    fn eikonal(which in 0usize..5, u in prop::collection::vec(0.0f64..1.0, 3)) {
        let d = &shapes()[which];
        let x = point_in(d, &u);
        let w = d.signed_distance(&x).unwrap();
        let s = d.singular_set_distance(&x).unwrap();
        prop_assume!(w > 1e-3 && s > 1e-3);
        let h = 0.25 * w.min(s);
        let grad: Vec<f64> = (0..d.dim())
            .map(|i| {
                central_derivative(
                    |t| {
                        let mut y = x.clone();
                        y[i] = t;
                        d.distance_to_boundary(&y).unwrap()
                    },
                    x[i],
                    h,
                )
            })
            .collect();
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() <= 1e-7, "{norm}");
        let exact = d.omega_gradient(&x).unwrap();
        for (a, b) in exact.iter().zip(&grad) {
            prop_assert!((a - b).abs() <= 1e-7);
        }
    }

    #[test]
    fn one_lipschitz(which in 0usize..5, u in prop::collection::vec(0.0f64..1.0, 3), v in prop::collection::vec(0.0f64..1.0, 3)) {
        let d = &shapes()[which];
        let (x, y) = (point_in(d, &u), point_in(d, &v));
        prop_assume!(d.contains(&x) && d.contains(&y));
        let gap = (d.distance_to_boundary(&x).unwrap() - d.distance_to_boundary(&y).unwrap()).abs();
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(gap <= dist + 1e-15);
        prop_assert!(d.distance_to_boundary(&x).unwrap() <= d.inradius() + 1e-15);
    }
}
