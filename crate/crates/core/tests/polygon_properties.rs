use nalgebra::DMatrix;
use proptest::prelude::*;

use polysoliton::matfun::{SquareMatrix, Vector};
use polysoliton::polygon::{
    center_of_mass, f2_energy, grad_f2, length, midpoint_map, sample_polygon, shorten, shorten_t,
    soliton_recursion, Polygon, Topology,
};
use polysoliton::soliton::{affine_family, AffineMap, SolitonCurve};
use polysoliton::zoo::{preset, to_spec, PresetId};

fn closed_polygon(max_n: usize, dim: usize) -> impl Strategy<Value = Polygon> {
    prop::collection::vec(prop::collection::vec(-1.0..1.0f64, dim), 3..=max_n)
        .prop_map(|vs| Polygon::closed(vs.into_iter().map(Vector::from_vec).collect()).unwrap())
}

fn open_polygon(max_n: usize, dim: usize) -> impl Strategy<Value = Polygon> {
    (
        -50i64..50,
        prop::collection::vec(prop::collection::vec(-1.0..1.0f64, dim), 3..=max_n),
    )
        .prop_map(|(j_min, vs)| {
            Polygon::open(j_min, vs.into_iter().map(Vector::from_vec).collect()).unwrap()
        })
}

fn affine_map(dim: usize) -> impl Strategy<Value = AffineMap> {
    (
        prop::collection::vec(-2.0..2.0f64, dim * dim),
        prop::collection::vec(-2.0..2.0f64, dim),
    )
        .prop_map(move |(a, b)| {
            AffineMap::new(
                SquareMatrix::from_row_slice(dim, &a).unwrap(),
                Vector::from_vec(b),
            )
            .unwrap()
        })
}

fn max_diff(a: &Polygon, b: &Polygon) -> f64 {
    a.vertices()
        .iter()
        .zip(b.vertices())
        .map(|(x, y)| (x - y).amax())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn t_is_shifted_midpoint_square(x in closed_polygon(32, 3)) {
        let t = shorten(&x).unwrap();
        let mm = midpoint_map(&midpoint_map(&x).unwrap()).unwrap();
        let scale = x.vertices().iter().map(|v| v.amax()).fold(0.0, f64::max);
        for j in 0..x.len() as i64 {
            let d = (t.vertex(j).unwrap() - mm.vertex(j - 1).unwrap()).amax();
            prop_assert!(d <= 8.0 * f64::EPSILON * scale);
        }
    }

    #[test]
    fn t_is_affinely_equivariant(x in closed_polygon(24, 2), map in affine_map(2)) {
        let lhs = shorten(&x.map_affine(&map)).unwrap();
        let rhs = shorten(&x).unwrap().map_affine(&map);
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn open_windows_shrink(x in open_polygon(20, 2), alpha in -1.0..1.0f64) {
        prop_assume!(alpha != 0.0);
        let (j_min, j_max) = match x.topology() {
            Topology::OpenWindow { j_min, j_max } => (j_min, j_max),
            Topology::Closed { .. } => unreachable!(),
        };
        let y = shorten_t(&x, alpha).unwrap();
        prop_assert_eq!(y.topology(), Topology::OpenWindow { j_min: j_min + 1, j_max: j_max - 1 });
        let m = midpoint_map(&x).unwrap();
        prop_assert_eq!(m.topology(), Topology::OpenWindow { j_min, j_max: j_max - 1 });
        // interior vertices agree with the closed-polygon formula
        for (j, v) in y.indexed() {
            let expected = (x.vertex(j - 1).unwrap() + x.vertex(j + 1).unwrap()) * alpha
                + x.vertex(j).unwrap() * (1.0 - 2.0 * alpha);
            prop_assert!((v - expected).amax() == 0.0);
        }
    }

    #[test]
    fn length_decreases(x in closed_polygon(32, 2)) {
        let l = length(&x).unwrap();
        prop_assert!(length(&midpoint_map(&x).unwrap()).unwrap() <= l);
        prop_assert!(length(&shorten(&x).unwrap()).unwrap() <= l);
    }

    #[test]
    fn centre_of_mass_preserved(x in closed_polygon(32, 3)) {
        let c = center_of_mass(&x).unwrap();
        prop_assert!((center_of_mass(&shorten(&x).unwrap()).unwrap() - &c).amax() <= 1e-12);
        prop_assert!((center_of_mass(&midpoint_map(&x).unwrap()).unwrap() - &c).amax() <= 1e-12);
    }

    #[test]
    fn gradient_is_equivariant(x in closed_polygon(16, 2), map in affine_map(2)) {
        let moved = grad_f2(&x.map_affine(&map)).unwrap();
        let linear = AffineMap::new(map.a.clone(), Vector::zeros(2)).unwrap();
        let expected = grad_f2(&x).unwrap().map_affine(&linear);
        prop_assert!(max_diff(&moved, &expected) <= 1e-12);
    }

    #[test]
    fn gradient_matches_energy_derivative(x in closed_polygon(12, 2), j in 0usize..12, c in 0usize..2) {
        prop_assume!(j < x.len());
        let h = 1e-6;
        let bump = |sign: f64| {
            let mut vs = x.vertices().to_vec();
            vs[j][c] += sign * h;
            f2_energy(&Polygon::closed(vs).unwrap()).unwrap()
        };
        let fd = (bump(1.0) - bump(-1.0)) / (2.0 * h);
        let g = grad_f2(&x).unwrap();
        prop_assert!((fd - g.vertices()[j][c]).abs() <= 1e-6);
    }

    #[test]
    fn recursion_round_trip(
        a in prop::collection::vec(-0.5..1.5f64, 4),
        b in prop::collection::vec(-1.0..1.0f64, 2),
        u in prop::collection::vec(-1.0..1.0f64, 2),
        v in prop::collection::vec(-1.0..1.0f64, 2),
    ) {
        let map = AffineMap::new(SquareMatrix::from_row_slice(2, &a).unwrap(), Vector::from_vec(b)).unwrap();
        let (u, v) = (Vector::from_vec(u), Vector::from_vec(v));
        let up = soliton_recursion(&map, &u, &v, 0, 0, 6).unwrap();
        // restart from the top two vertices and run back down
        let top = |j: i64| up.vertex(j).unwrap().clone();
        let down = soliton_recursion(&map, &top(5), &top(6), 5, 0, 6).unwrap();
        let scale = up.vertices().iter().map(|x| x.amax()).fold(1.0, f64::max);
        prop_assert!((down.vertex(0).unwrap() - &u).amax() <= 1e-12 * scale);
        prop_assert!((down.vertex(1).unwrap() - &v).amax() <= 1e-12 * scale);
    }

    #[test]
    fn recursion_solves_soliton_equation(
        a in prop::collection::vec(-0.5..1.5f64, 4),
        b in prop::collection::vec(-1.0..1.0f64, 2),
        u in prop::collection::vec(-1.0..1.0f64, 2),
        v in prop::collection::vec(-1.0..1.0f64, 2),
    ) {
        let map = AffineMap::new(SquareMatrix::from_row_slice(2, &a).unwrap(), Vector::from_vec(b)).unwrap();
        let x = soliton_recursion(&map, &Vector::from_vec(u), &Vector::from_vec(v), 0, -4, 4).unwrap();
        let t = shorten(&x).unwrap();
        for (j, tj) in t.indexed() {
            let xj = x.vertex(j).unwrap();
            let expected = map.apply(xj);
            prop_assert!((tj - &expected).norm() <= 1e-9 * (1.0 + expected.norm()));
        }
    }
}

#[test]
fn sampled_polygon_follows_curve() {
    let spec = to_spec(&preset(PresetId::Intro)).unwrap();
    let x = sample_polygon(&spec, 0.0, 0.4, -8, 8).unwrap();
    for (j, v) in x.indexed() {
        let t = 0.4 * j as f64;
        let expected = Vector::from_column_slice(&[(2.0 * t).cos(), (3.0 * t).cos()]);
        assert!((v - expected).amax() < 1e-14, "j = {j}");
    }
}

#[test]
fn shortened_samples_lie_on_shortened_curve() {
    for id in [
        PresetId::Intro,
        PresetId::Case2a,
        PresetId::Case4,
        PresetId::Case6,
    ] {
        let p = preset(id);
        let spec = to_spec(&p).unwrap();
        let (a, s) = (p.t_range.0, (p.t_range.1 - p.t_range.0) / 64.0);
        let x = sample_polygon(&spec, a, s, 0, 19).unwrap();
        let curve = SolitonCurve::new(spec.clone());
        let t = shorten(&x).unwrap();
        let scale = x.vertices().iter().map(|v| v.amax()).fold(1.0, f64::max);
        for (j, v) in t.indexed() {
            let on_curve = curve.shortened(s, a + s * j as f64).unwrap();
            assert!((v - on_curve).amax() <= 1e-12 * scale, "{id} j = {j}");
        }
    }
}

#[test]
fn intro_recursion_matches_samples() {
    let spec = to_spec(&preset(PresetId::Intro)).unwrap();
    let map = affine_family(&spec, 0.4).unwrap();
    let expected_a = DMatrix::from_row_slice(
        2,
        2,
        &[
            0.5 * (1.0 + 0.8f64.cos()),
            0.0,
            0.0,
            0.5 * (1.0 + 1.2f64.cos()),
        ],
    );
    assert!((&*map.a - expected_a).amax() < 1e-14);
    let curve = SolitonCurve::new(spec.clone());
    let rec = soliton_recursion(
        &map,
        &curve.position(0.0).unwrap(),
        &curve.position(0.4).unwrap(),
        0,
        -20,
        20,
    )
    .unwrap();
    let sampled = sample_polygon(&spec, 0.0, 0.4, -20, 20).unwrap();
    assert!(max_diff(&rec, &sampled) <= 1e-6);
}
