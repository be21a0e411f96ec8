mod common;

use common::{klein_distance_boundary, reference_radii, rel_err};
use curvtri::geometry::{
    circumradius_functional, euclidean_shadow, inradius_functional, j_invariants, klein_distance, Vertices,
};
use curvtri::inequality::{generalize, Link, Registry, HOLDS_FLOOR};
use curvtri::oracle::{
    circumcenter_oracle, incenter_oracle, projection_scale_factors, tangent_projection, MIN_RELATIVE_SLACK,
};
use curvtri::sampling::{sample_centered_klein, sample_triangle, SamplerConfig};
use curvtri::{Geometry, Triangle};
use nalgebra::Vector2;
use proptest::prelude::*;

fn kind_strategy() -> impl Strategy<Value = Geometry> {
    prop_oneof![Just(Geometry::Euclidean), Just(Geometry::Spherical), Just(Geometry::Hyperbolic)]
}

/// Sides `a, b` and `c` interpolated strictly between `|a - b|` and `a + b`.
fn triangle_in(kind: Geometry) -> impl Strategy<Value = Triangle> {
    let max = match kind {
        Geometry::Euclidean => 10.0_f64,
        Geometry::Spherical => 2.0,
        Geometry::Hyperbolic => 3.0,
    };
    (0.01..max, 0.01..max, 0.001..0.999f64).prop_filter_map("outside the geometry's domain", move |(a, b, t)| {
        let lo = (a - b).abs();
        let c = lo + t * (a + b - lo);
        Triangle::new(kind, a, b, c).ok()
    })
}

fn any_triangle() -> impl Strategy<Value = Triangle> {
    kind_strategy().prop_flat_map(triangle_in)
}

fn sampled(kind: Geometry) -> impl Strategy<Value = Triangle> {
    (0u64..1_000_000).prop_map(move |i| {
        let cfg = SamplerConfig::for_geometry(kind, 2024, 1);
        sample_triangle(kind, &cfg, i).unwrap().sides
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn shadow_is_a_euclidean_triangle(t in any_triangle()) {
        let shadow = euclidean_shadow(&t).unwrap();
        prop_assert_eq!(shadow.kind(), Geometry::Euclidean);
    }

    #[test]
    fn j_form_rewrites_agree(t in any_triangle()) {
        let j = j_invariants(&t);
        let sp = t.s_perimeter();
        let circum = 2.0 * t.s_product() / (j.j * sp.sqrt());
        let inner = j.j / sp.sqrt();
        prop_assert!(rel_err(circum, circumradius_functional(&t).value) <= 1e-12);
        prop_assert!(rel_err(inner, inradius_functional(&t).value) <= 1e-12);
    }

    #[test]
    fn closed_forms_match_reference_layout(t in any_triangle()) {
        let [a, b, c] = t.sides();
        let (big, small) = reference_radii(t.kind(), a, b, c).expect("valid triangles have a circumcircle");
        prop_assert!(rel_err(big, circumradius_functional(&t).value) <= 1e-8, "{:?}", t);
        prop_assert!(rel_err(small, inradius_functional(&t).value) <= 1e-8, "{:?}", t);
    }

    #[test]
    fn j_orderings(t in any_triangle()) {
        let j = j_invariants(&t);
        let cap = t.s_product().sqrt();
        let noise = 1e-12 * cap;
        match t.kind() {
            Geometry::Spherical => prop_assert!(j.j <= j.jbar + noise && j.jbar <= cap + noise),
            Geometry::Hyperbolic => prop_assert!(j.jbar <= j.j + noise && j.j <= cap + noise),
            Geometry::Euclidean => prop_assert!(rel_err(j.j, j.jbar) <= 1e-12),
        }
    }

    #[test]
    fn klein_distance_is_additive(
        theta in 0.0..std::f64::consts::TAU,
        ox in -0.6..0.6f64, oy in -0.6..0.6f64,
        mut f in proptest::array::uniform3(0.001..0.999f64),
    ) {
        f.sort_by(f64::total_cmp);
        prop_assume!(f[1] - f[0] > 1e-6 && f[2] - f[1] > 1e-6);
        let dir = Vector2::new(theta.cos(), theta.sin());
        let origin = Vector2::new(ox, oy);
        // The chord through `origin` along `dir` spans t in (lo, hi).
        let od = origin.dot(&dir);
        let disc = (od * od - origin.norm_squared() + 1.0).sqrt();
        let (lo, hi) = (-od - disc, -od + disc);
        let [p, q, w] = f.map(|x| origin + dir * (lo + x * (hi - lo)));
        let pq = klein_distance(&p, &q).unwrap();
        let qw = klein_distance(&q, &w).unwrap();
        let pw = klein_distance(&p, &w).unwrap();
        prop_assert!((pq + qw - pw).abs() <= 1e-10 * pw.max(1.0), "{pq} + {qw} vs {pw}");
    }

    #[test]
    fn klein_distance_matches_boundary_points(
        px in -0.7..0.7f64, py in -0.7..0.7f64, qx in -0.7..0.7f64, qy in -0.7..0.7f64,
    ) {
        let (p, q) = (Vector2::new(px, py), Vector2::new(qx, qy));
        prop_assume!((p - q).norm() > 1e-6);
        let d = klein_distance(&p, &q).unwrap();
        let reference = klein_distance_boundary([px, py], [qx, qy]);
        prop_assert!((d - reference).abs() <= 1e-9 * d.max(1.0), "{d} vs {reference}");
    }

    #[test]
    fn generalized_euler(t in any_triangle()) {
        let big = circumradius_functional(&t).value;
        let small = inradius_functional(&t).value;
        prop_assert!(big - 2.0 * small >= -HOLDS_FLOOR * big.max(1.0));
    }

    #[test]
    fn small_triangles_degenerate_to_euclidean(t in triangle_in(Geometry::Euclidean), curved in prop_oneof![Just(Geometry::Spherical), Just(Geometry::Hyperbolic)]) {
        let lambda = 1e-4;
        let [a, b, c] = t.sides();
        let small = Triangle::new(curved, lambda * a, lambda * b, lambda * c).unwrap();
        let flat = Triangle::new(Geometry::Euclidean, lambda * a, lambda * b, lambda * c).unwrap();
        let ratio = circumradius_functional(&small).value / circumradius_functional(&flat).value;
        prop_assume!(ratio.is_finite());
        prop_assert!((ratio - 1.0).abs() <= 1e-6, "{ratio}");
    }

    #[test]
    fn holds_flags_invariant_under_permutation(t in any_triangle()) {
        for ineq in Registry::builtin().iter().filter(|e| e.holds_in(t.kind())) {
            let base: Vec<bool> = ineq.evaluate(&t).iter().map(|e| e.holds).collect();
            for p in t.permutations() {
                let flags: Vec<bool> = ineq.evaluate(&p).iter().map(|e| e.holds).collect();
                prop_assert_eq!(&flags, &base, "{} on {:?}", ineq.name, p);
            }
        }
    }

    #[test]
    fn degree_zero_entries_are_scale_invariant(t in triangle_in(Geometry::Euclidean), lambda in 0.1..10.0f64) {
        let scaled = t.scaled(lambda).unwrap();
        for ineq in Registry::builtin().iter() {
            for (link, (e0, e1)) in ineq.links.iter().zip(ineq.evaluate(&t).iter().zip(ineq.evaluate(&scaled))) {
                let degree_zero = match link {
                    Link::Pair(p) => p.degree == 0,
                    _ => matches!(ineq.name.as_str(), "eq4-spherical-chain" | "eq5-lower" | "eq5-upper" | "eq6-right"),
                };
                if degree_zero {
                    prop_assert!(rel_err(e0.lhs, e1.lhs) <= 1e-12 && rel_err(e0.rhs, e1.rhs) <= 1e-12,
                        "{} {}: {:?} vs {:?}", ineq.name, link.label(), e0, e1);
                }
            }
        }
    }

    #[test]
    fn degree_zero_transport_has_no_correction(t in triangle_in(Geometry::Spherical)) {
        let [x, y, z] = t.shadow_sides();
        for ineq in Registry::builtin().iter() {
            for link in &ineq.links {
                let Link::Pair(p) = link else { continue };
                if p.degree != 0 || !p.classify().unwrap().admits(Geometry::Spherical) {
                    continue;
                }
                let e = generalize(p, Geometry::Spherical).unwrap().evaluate(&t).unwrap();
                prop_assert!(rel_err(e.rhs, p.g(x, y, z)) <= 1e-12);
                let ratio = circumradius_functional(&t).value / inradius_functional(&t).value;
                prop_assert!(rel_err(e.lhs, p.f(ratio, 1.0)) <= 1e-12);
            }
        }
    }

    #[test]
    fn chain_terms_are_non_increasing(t in prop_oneof![sampled(Geometry::Euclidean), sampled(Geometry::Spherical)]) {
        let chain = Registry::builtin().lookup("eq4-spherical-chain").unwrap();
        let evals = chain.evaluate(&t);
        for e in &evals {
            prop_assert!(e.holds, "{:?} on {:?}", e, t);
        }
        for w in evals.windows(2) {
            prop_assert!(rel_err(w[0].rhs, w[1].lhs) <= 1e-12);
        }
    }

    #[test]
    fn oracles_match_closed_forms(kind in kind_strategy(), i in 0u64..1_000_000) {
        let cfg = SamplerConfig::for_geometry(kind, 99, 1);
        let e = sample_triangle(kind, &cfg, i).unwrap();
        let (Ok(big), Ok(small)) = (circumcenter_oracle(&e), incenter_oracle(&e)) else {
            let [a, b, c] = e.sides.sides();
            let slack = (a + b - c).min(a + c - b).min(b + c - a) / (a + b + c);
            prop_assert!(slack < MIN_RELATIVE_SLACK, "refused a conditioned triangle {:?}", e);
            return Ok(());
        };
        let (big, small) = (big.rho, small.rho);
        prop_assert!(rel_err(big, circumradius_functional(&e.sides).value) <= 1e-8);
        prop_assert!(rel_err(small, inradius_functional(&e.sides).value) <= 1e-8);
    }

    #[test]
    fn tangent_projection_scales_by_two_over_cos_r(i in 0u64..1_000_000) {
        let cfg = SamplerConfig::for_geometry(Geometry::Spherical, 5, 1);
        let e = sample_triangle(Geometry::Spherical, &cfg, i).unwrap();
        let p = tangent_projection(&e).unwrap();
        let k = projection_scale_factors(&e.sides, &p.sides);
        let cos_big = 1.0 / (1.0 + circumradius_functional(&e.sides).value.powi(2)).sqrt();
        for f in k {
            prop_assert!(rel_err(f, 2.0 / cos_big) <= 1e-10, "{k:?}");
        }
    }

    #[test]
    fn centered_klein_shadow_is_proportional(i in 0u64..1_000_000) {
        let cfg = SamplerConfig::for_geometry(Geometry::Hyperbolic, 8, 1);
        let e = sample_centered_klein(&cfg, i).unwrap();
        let Vertices::Klein(p) = e.vertices else { unreachable!() };
        let flat = [(p[1] - p[2]).norm(), (p[2] - p[0]).norm(), (p[0] - p[1]).norm()];
        let s = e.sides.shadow_sides();
        let k: Vec<f64> = (0..3).map(|j| flat[j] / s[j]).collect();
        prop_assert!(rel_err(k[0], k[1]) <= 1e-8 && rel_err(k[0], k[2]) <= 1e-8, "{k:?}");
    }

    #[test]
    fn sampler_is_deterministic(kind in kind_strategy(), seed in any::<u64>(), i in any::<u64>()) {
        let cfg = SamplerConfig::for_geometry(kind, seed, 1);
        let a = sample_triangle(kind, &cfg, i).unwrap();
        let b = sample_triangle(kind, &cfg, i).unwrap();
        prop_assert_eq!(a.sides.sides().map(f64::to_bits), b.sides.sides().map(f64::to_bits));
    }
}

#[test]
fn shadow_valid_on_many_samples() {
    for kind in Geometry::ALL {
        let cfg = SamplerConfig::for_geometry(kind, 11, 100_000);
        for i in 0..cfg.count as u64 {
            let t = sample_triangle(kind, &cfg, i).unwrap().sides;
            assert!(euclidean_shadow(&t).is_ok(), "{t:?}");
        }
    }
}
