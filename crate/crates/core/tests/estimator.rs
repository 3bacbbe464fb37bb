mod common;

use common::{compare_small_cases, exact_probs, one_flower_classes, params};
use std::cell::RefCell;

use flowerperc::connectivity::{separation_field, RegionGraph, SeparationPair, SeparationScratch, TriangleArcs, VertexTable};
use flowerperc::engine::{derive_seed, Engine};
use flowerperc::estimator::{
    crossing_parity, estimate_cardy_field, estimate_event, estimate_events, rectangle_sides, rsw_study, Contour, EventSpec,
};
use flowerperc::geometry::{build_parallelogram_domain, build_triangle_domain};
use flowerperc::{ArcName, Color, FloralArrangement, HexCoord};

#[test]
fn small_domain_events_match_enumeration() {
    let p = params("1/10");
    for c in compare_small_cases(&p, 20_000, 41) {
        assert!(c.z() <= 3.5, "{}: {} vs exact {} (z = {:.2})", c.label, c.estimate.mean, c.exact, c.z());
    }
}

#[test]
fn one_flower_frequencies_match_weights() {
    let c = one_flower_classes(&params("1/10"), 100_000, 5);
    assert_eq!(c.classes, 12 * 2 + 52 * 5);
    assert_eq!(c.outside_support, 0);
    assert!(c.worst_z < 4.5, "{}", c.worst_z);
}

#[test]
fn shared_field_equals_per_vertex_estimates() {
    let p = params("1/10");
    let d = build_triangle_domain(6).unwrap();
    let arr = FloralArrangement::periodic_with_origin(&d, 3, HexCoord::new(1, 1)).unwrap();
    let verts = vec![HexCoord::new(2, 2).corner(0), HexCoord::new(1, 3).corner(4), HexCoord::new(4, 1).corner(2)];
    let out = estimate_cardy_field(&d, &arr, &p, &verts, &[], 3_000, 17, &Engine::new(0)).unwrap();
    for (i, &v) in verts.iter().enumerate() {
        for pair in SeparationPair::ALL {
            for color in [Color::Blue, Color::Yellow] {
                let single =
                    estimate_event(&d, &arr, &p, &EventSpec::Separation { vertex: v, pair, color }, 3_000, 17, &Engine::new(1))
                        .unwrap();
                assert_eq!(out.field.estimate(i, pair, color), single);
            }
        }
    }
}

#[test]
fn neutral_field_matches_enumeration_on_a_small_triangle() {
    let p = params("1/10");
    let d = build_triangle_domain(4).unwrap();
    let arr = FloralArrangement::periodic_with_origin(&d, 3, HexCoord::new(1, 1)).unwrap();
    let verts: Vec<_> = d.vertices();
    let out = estimate_cardy_field(&d, &arr, &p, &verts, &[], 40_000, 8, &Engine::new(0)).unwrap();
    let arcs = TriangleArcs::new(&d).unwrap();
    let table = VertexTable::new(&d, &verts).unwrap();
    let scratch = RefCell::new(SeparationScratch::default());
    let exact = exact_probs(&d, &arr, &p, verts.len() * 6, |c| {
        let g = RegionGraph::build(&d, c).unwrap();
        let mut per = vec![vec![false; verts.len()]; 6];
        for (k, pair) in SeparationPair::ALL.into_iter().enumerate() {
            for (j, color) in [Color::Blue, Color::Yellow].into_iter().enumerate() {
                separation_field(&g, &arcs, &table, pair, color, &mut scratch.borrow_mut(), &mut per[2 * k + j]);
            }
        }
        (0..verts.len()).flat_map(|i| (0..6).map(move |k| (i, k))).map(|(i, k)| per[k][i]).collect()
    });
    let mut worst: f64 = 0.0;
    for i in 0..verts.len() {
        for (k, pair) in SeparationPair::ALL.into_iter().enumerate() {
            let want = (exact[6 * i + 2 * k] + exact[6 * i + 2 * k + 1]) / 2.0;
            let e = out.field.neutral(i, pair);
            if e.stderr > 0.0 {
                worst = worst.max((e.mean - want).abs() / e.stderr);
            } else {
                assert!((e.mean - want).abs() < 1e-12, "{:?} {pair:?}", verts[i]);
            }
        }
    }
    // Several hundred correlated comparisons; 4.5 standard errors is loose enough for all of them.
    assert!(worst < 4.5, "{worst}");
}

#[test]
fn studies_do_not_depend_on_worker_count() {
    let p = params("1/10");
    let d = build_parallelogram_domain(8, 8).unwrap();
    let arr = FloralArrangement::periodic(&d, 3).unwrap();
    let events = [
        EventSpec::Crossing { from: ArcName::A, to: ArcName::B, color: Color::Blue },
        EventSpec::Crossing { from: ArcName::C, to: ArcName::D, color: Color::Yellow },
    ];
    let seq = estimate_events(&d, &arr, &p, &events, 2_000, 3, &Engine::sequential()).unwrap();
    let par = estimate_events(&d, &arr, &p, &events, 2_000, 3, &Engine::new(4)).unwrap();
    assert_eq!(seq, par);

    let t = build_triangle_domain(9).unwrap();
    let tarr = FloralArrangement::periodic_with_origin(&t, 3, HexCoord::new(1, 1)).unwrap();
    let c = Contour::centered_triangle(&t).unwrap();
    let v = t.vertices();
    let a = estimate_cardy_field(&t, &tarr, &p, &v, std::slice::from_ref(&c), 500, 4, &Engine::sequential()).unwrap();
    let b = estimate_cardy_field(&t, &tarr, &p, &v, std::slice::from_ref(&c), 500, 4, &Engine::new(3)).unwrap();
    assert_eq!(a.field, b.field);
    assert_eq!(a.integrals, b.integrals);
}

#[test]
fn parity_on_a_rhombus_and_duality_of_crossings() {
    let p = params("1/10");
    let d = build_parallelogram_domain(10, 10).unwrap();
    let arr = FloralArrangement::periodic(&d, 3).unwrap();
    let [b, y] = crossing_parity(&d, &arr, &p, ArcName::A, ArcName::B, 5_000, 12, &Engine::new(0)).unwrap();
    assert!(b.agrees_with(&y, 3.0), "{b:?} {y:?}");
    // Between full sides of a rhombus exactly one colour crosses, sample by sample.
    let [bottom, top, left, right] = rectangle_sides(&d);
    let events = [
        EventSpec::HexCrossing { name: "lr".into(), from: left, to: right, color: Color::Blue },
        EventSpec::HexCrossing { name: "bt".into(), from: bottom, to: top, color: Color::Yellow },
    ];
    let e = estimate_events(&d, &arr, &p, &events, 3_000, derive_seed(12, 9), &Engine::new(0)).unwrap();
    assert_eq!(e[0].successes + e[1].successes, 3_000);
}

#[test]
fn rectangle_crossings_are_complementary_across_colours() {
    let p = params("1/10");
    let blue = rsw_study(&[3f64.sqrt() / 2.0], &[12], &p, 3, Color::Blue, 2_000, 6, &Engine::new(0)).unwrap();
    let yellow = rsw_study(&[3f64.sqrt() / 2.0], &[12], &p, 3, Color::Yellow, 2_000, 6, &Engine::new(0)).unwrap();
    // Same seed, so the same samples: blue crosses the easy way exactly when yellow fails the hard way.
    assert_eq!(blue[0].easy.successes + yellow[0].hard.successes, 2_000);
    assert!((0.25..0.95).contains(&blue[0].easy.mean));
}
