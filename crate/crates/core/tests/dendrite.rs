use std::sync::Arc;

use shadowlab::dendrite::*;
use shadowlab::{MetricSpace, SpaceKind};

fn loc(e: usize, t: f64) -> Location {
    Location::new(EdgeId(e), t)
}

fn star3() -> DendriteComplex {
    DendriteComplex::star(&[1.0, 1.0, 1.0]).unwrap()
}

fn interval() -> Arc<DendriteSpace> {
    Arc::new(DendriteSpace::unit_interval())
}

#[test]
fn geodesic_distance_examples() {
    let p = DendriteComplex::path_graph(&[1.0, 1.0]).unwrap();
    assert_eq!(p.geodesic_distance(&loc(0, 0.3), &loc(0, 0.3)), 0.0);
    assert_eq!(p.geodesic_distance(&loc(0, 0.0), &loc(1, 1.0)), 2.0);
    let s = star3();
    assert!((s.geodesic_distance(&loc(0, 0.5), &loc(1, 0.5)) - 1.0).abs() < 1e-15);
}

#[test]
fn bad_edge_is_a_domain_error() {
    let s = star3();
    assert!(s.checked_geodesic_distance(&loc(7, 0.5), &loc(0, 0.1)).is_err());
    assert!(s.validate(&loc(0, 1.5)).is_err());
}

#[test]
fn rejects_cycles_and_bad_lengths() {
    let e = |a, b, l| Edge { a: VertexId(a), b: VertexId(b), length: l };
    assert!(DendriteComplex::new(3, vec![e(0, 1, 1.0), e(1, 2, 1.0), e(2, 0, 1.0)]).is_err());
    assert!(DendriteComplex::new(2, vec![e(0, 1, 0.0)]).is_err());
    assert!(DendriteComplex::new(4, vec![e(0, 1, 1.0), e(0, 1, 1.0), e(2, 3, 1.0)]).is_err());
}

#[test]
fn point_orders() {
    let s = DendriteComplex::star(&[1.0; 5]).unwrap();
    assert_eq!(s.point_order(&loc(2, 0.4)).unwrap(), 2);
    assert_eq!(s.point_order(&loc(0, 0.0)).unwrap(), 5);
    assert_eq!(s.point_order(&loc(3, 1.0)).unwrap(), 1);
}

#[test]
fn intersection_examples() {
    let i = DendriteComplex::path_graph(&[1.0]).unwrap();
    let a = Subtree::from_pieces(&i, vec![Piece::new(EdgeId(0), 0.0, 0.6)]).unwrap();
    let b = Subtree::from_pieces(&i, vec![Piece::new(EdgeId(0), 0.4, 1.0)]).unwrap();
    assert_eq!(subtree_intersection(&i, &a, &a).unwrap().unwrap(), a);
    let c = subtree_intersection(&i, &a, &b).unwrap().unwrap();
    assert_eq!(c.pieces(), &[Piece::new(EdgeId(0), 0.4, 0.6)]);

    let s = star3();
    let arms = |xs: &[usize]| Subtree::from_pieces(&s, xs.iter().map(|&e| Piece::new(EdgeId(e), 0.0, 1.0)).collect()).unwrap();
    let got = subtree_intersection(&s, &arms(&[0, 1]), &arms(&[1, 2])).unwrap().unwrap();
    assert_eq!(got, arms(&[1]));
    assert!(got.contains(&s, &loc(0, 0.0)));
    // brute-force membership on a grid
    let a12 = arms(&[0, 1]);
    let a23 = arms(&[1, 2]);
    for p in s.grid(0.01) {
        assert_eq!(got.contains(&s, &p), a12.contains(&s, &p) && a23.contains(&s, &p));
    }
}

#[test]
fn disjoint_intersection_is_empty() {
    let s = star3();
    let a = Subtree::from_pieces(&s, vec![Piece::new(EdgeId(0), 0.5, 1.0)]).unwrap();
    let b = Subtree::from_pieces(&s, vec![Piece::new(EdgeId(1), 0.5, 1.0)]).unwrap();
    assert!(subtree_intersection(&s, &a, &b).unwrap().is_none());
}

#[test]
fn span_examples() {
    let s = star3();
    assert!(connected_span(&s, &[]).is_err());
    let one = connected_span(&s, &[loc(1, 0.3)]).unwrap();
    assert!(one.is_point());
    let two = connected_span(&s, &[loc(0, 1.0), loc(1, 1.0)]).unwrap();
    assert_eq!(two.pieces(), &[Piece::new(EdgeId(0), 0.0, 1.0), Piece::new(EdgeId(1), 0.0, 1.0)]);
    let all = connected_span(&s, &[loc(0, 1.0), loc(1, 1.0), loc(2, 1.0)]).unwrap();
    assert_eq!(all, Subtree::whole(&s));
}

#[test]
fn square_map_images_and_preimages() {
    let x = interval();
    let f = EdgewiseMap::uniform(x.clone(), EdgeProfile::Square).unwrap();
    let a = Subtree::from_pieces(&x.complex, vec![Piece::new(EdgeId(0), 0.5, 0.7)]).unwrap();
    let img = image_subtree(&f, &a).unwrap();
    let p = img.pieces()[0];
    assert!((p.t0 - 0.25).abs() < 1e-15 && (p.t1 - 0.49).abs() < 1e-15);
    let back = preimage_subtree(&f, &img).unwrap().unwrap();
    assert!(back.approx_eq(&a, 1e-12));
    let id = EdgewiseMap::identity(x.clone());
    assert_eq!(image_subtree(&id, &a).unwrap(), a);
    assert_eq!(preimage_subtree(&id, &a).unwrap().unwrap(), a);
}

#[test]
fn tent_is_not_monotone() {
    let x = interval();
    let tent = EdgewiseMap::uniform(x.clone(), EdgeProfile::Tent).unwrap();
    assert!(!verify_monotone(&tent, 50, 1).pass);
    let a = Subtree::whole(&x.complex);
    assert!(preimage_subtree(&tent, &a).is_err());
    assert!(verify_monotone(&EdgewiseMap::identity(x.clone()), 50, 1).pass);
    let sq = EdgewiseMap::uniform(x, EdgeProfile::Square).unwrap();
    assert!(verify_monotone(&sq, 50, 1).pass);
}

#[test]
fn star_space_metric_matches_geodesic() {
    let sp = DendriteSpace::geodesic(SpaceKind::StarUnion, star3());
    assert!((sp.dist(&loc(0, 0.25), &loc(2, 0.5)) - 0.75).abs() < 1e-15);
    assert!((sp.space_diameter() - 2.0).abs() < 1e-15);
}

#[test]
fn exact_subtree_hausdorff() {
    let sp = DendriteSpace::geodesic(SpaceKind::StarUnion, star3());
    let c = &sp.complex;
    let a = Subtree::from_pieces(c, vec![Piece::new(EdgeId(0), 0.0, 1.0)]).unwrap();
    let b = Subtree::from_pieces(c, vec![Piece::new(EdgeId(1), 0.0, 0.5)]).unwrap();
    // farthest: tip of arm 0 is 1 from arm 1's piece; arm1 piece end is 0.5 from arm 0
    assert!((sp.subtree_hausdorff(&a, &b, 0.01) - 1.0).abs() < 1e-12);
    assert_eq!(sp.subtree_hausdorff(&a, &a, 0.01), 0.0);
}

#[test]
fn file_round_trip() {
    let mut s = DendriteComplex::star(&[1.0, 0.1, 1.0 / 3.0]).unwrap();
    s.labels.insert("p".into(), loc(0, 0.0));
    s.labels.insert("d0".into(), loc(2, 0.123456789012345));
    let map = vec!["edgewise square".to_string()];
    let text = format::to_text(&s, &map);
    let back = format::from_text(&text).unwrap();
    assert_eq!(back.complex, s);
    assert_eq!(back.map, map);
    assert_eq!(format::to_text(&back.complex, &back.map), text);
}

#[test]
fn file_errors_carry_line_numbers() {
    let bad = "shadowlab-dendrite 1\nvertices 2\nedge 0 1 abc\n";
    match format::from_text(bad) {
        Err(shadowlab::Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}
