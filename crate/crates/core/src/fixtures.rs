//! Worked examples used by the tests and reachable from the command line as `fixture:NAME`.
//!
//! - `hexagon-swap`: two hexagons over an edge whose horizontal edges do not induce a
//!   graph isomorphism of the fibers.
//! - `triple-edge`: every fiber transport is a graph isomorphism but no lattice map carries
//!   the labels of a triple edge to the labels of its image.
//! - `cube-swap`: an `A1³` bundle over a triangle whose twist is a non-trivial permutation
//!   of the factors.
//! - `su3:B:N:L`: the realizable `A2` bundle built from the SU(3)-block tuple.

use crate::admissible_tuples::{build_realizable_bundle, su3_example, TupleError};
use crate::exact_lattice::{IntMatrix, IntVector, LatticeAuto};
use crate::fibrations_bundles::{BundleError, Fiber, Fibration, GraphMorphism, PolygonBundle};
use crate::gkm_graph::{find_compatible_connections, Connection, EdgeSpec, GkmGraph};

#[derive(Clone, Debug)]
pub enum FixtureData {
    Fibration(Box<Fibration>),
    Bundle(Box<PolygonBundle>),
}

pub const FIXTURE_NAMES: &[&str] = &["hexagon-swap", "triple-edge", "cube-swap", "su3:B:N:L"];

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("unknown fixture {0:?}; known: {names}", names = FIXTURE_NAMES.join(", "))]
    Unknown(String),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Tuple(#[from] TupleError),
}

pub fn load(name: &str) -> Result<FixtureData, FixtureError> {
    let name = name.strip_prefix("fixture:").unwrap_or(name);
    match name {
        "hexagon-swap" => Ok(FixtureData::Fibration(Box::new(hexagon_swap()))),
        "triple-edge" => Ok(FixtureData::Fibration(Box::new(triple_edge()))),
        "cube-swap" => Ok(FixtureData::Bundle(Box::new(cube_swap()))),
        _ => {
            let parts: Vec<&str> = name.split(':').collect();
            match parts.as_slice() {
                ["su3", b, n, l] => {
                    let bad = || FixtureError::Unknown(name.to_string());
                    let b: i64 = b.parse().map_err(|_| bad())?;
                    let n: usize = n.parse().map_err(|_| bad())?;
                    let l: usize = l.parse().map_err(|_| bad())?;
                    Ok(FixtureData::Bundle(Box::new(su3_bundle(b, n, l, 0)?)))
                }
                _ => Err(FixtureError::Unknown(name.to_string())),
            }
        }
    }
}

fn v(xs: &[i64]) -> IntVector {
    IntVector::from_i64s(xs)
}

fn edge(id: impl Into<String>, source: usize, target: usize, weight: IntVector) -> EdgeSpec {
    EdgeSpec { id: id.into(), source, target, weight }
}

/// One edge between `N` and `S`, with the only possible connection.
fn segment(label: IntVector) -> (GkmGraph, Connection) {
    let m = label.len();
    let g = GkmGraph::from_edges(m, vec!["N".into(), "S".into()], &[edge("e", 0, 1, label)]).expect("segment");
    let mut c = Connection::empty(2);
    c.set(0, 0, 1);
    c.set(1, 1, 0);
    (g, c)
}

/// Hexagons `a0..a5` over `N` and `b0..b5` over `S` with edge labels
/// `y, x-y, x, y, x-y, x`, and horizontal edges `a_i - b_τ(i)` labelled `x+y` for the
/// transposition `τ = (0 3)`.
pub fn hexagon_swap() -> Fibration {
    let hex = [v(&[0, 1]), v(&[1, -1]), v(&[1, 0]), v(&[0, 1]), v(&[1, -1]), v(&[1, 0])];
    let tau = |i: usize| match i {
        0 => 3,
        3 => 0,
        i => i,
    };
    let mut names: Vec<String> = (0..6).map(|i| format!("a{i}")).collect();
    names.extend((0..6).map(|i| format!("b{i}")));
    let mut edges = Vec::new();
    for (side, off) in [("a", 0), ("b", 6)] {
        for (i, l) in hex.iter().enumerate() {
            edges.push(edge(format!("{side}{i}{side}{}", (i + 1) % 6), off + i, off + (i + 1) % 6, l.clone()));
        }
    }
    for i in 0..6 {
        edges.push(edge(format!("h{i}"), i, 6 + tau(i), v(&[1, 1])));
    }
    let total = GkmGraph::from_edges(2, names, &edges).expect("hexagon graph");
    let side = |x: usize| x / 6;
    let mut conn = Connection::empty(total.dart_count());
    for e in 0..total.dart_count() {
        let (s, t) = (total.source(e), total.target(e));
        let horizontal_e = side(s) != side(t);
        for &f in total.star(s) {
            let image = if f == e {
                total.partner(e)
            } else if horizontal_e {
                // vertical darts go to the vertical dart with the same label
                *total
                    .star(t)
                    .iter()
                    .find(|&&d| side(total.target(d)) == side(t) && total.label(d) == total.label(f))
                    .expect("matching label")
            } else if side(total.target(f)) != side(s) {
                *total.star(t).iter().find(|&&d| side(total.target(d)) != side(t)).expect("horizontal dart")
            } else {
                *total.star(t).iter().find(|&&d| d != total.partner(e) && side(total.target(d)) == side(t)).expect("other vertical dart")
            };
            conn.set(e, f, image);
        }
    }
    let (base, base_conn) = segment(v(&[1, 1]));
    let proj = GraphMorphism::from_vertex_map(&total, &base, (0..12).map(side).collect()).expect("projection");
    Fibration { total, total_conn: conn, total_signed: None, base, base_conn, proj }
}

/// Over `N`: `a, b` joined by a triple edge `y+z, x-z, x+2y` and `c, d` by `x, y, x+2y`,
/// with `a - c` and `b - d` labelled `x-y-z`; the same over `S`. Horizontal `z` edges join
/// `a, b, c, d` to `c1, d1, a1, b1`.
pub fn triple_edge() -> Fibration {
    let names: Vec<String> = ["a", "b", "c", "d", "a1", "b1", "c1", "d1"].iter().map(|s| s.to_string()).collect();
    let upper = [v(&[0, 1, 1]), v(&[1, 0, -1]), v(&[1, 2, 0])];
    let lower = [v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[1, 2, 0])];
    let mut edges = Vec::new();
    for (off, tag) in [(0, ""), (4, "1")] {
        for (k, l) in upper.iter().enumerate() {
            edges.push(edge(format!("ab{tag}.{k}"), off, off + 1, l.clone()));
        }
        for (k, l) in lower.iter().enumerate() {
            edges.push(edge(format!("cd{tag}.{k}"), off + 2, off + 3, l.clone()));
        }
        edges.push(edge(format!("ac{tag}"), off, off + 2, v(&[1, -1, -1])));
        edges.push(edge(format!("bd{tag}"), off + 1, off + 3, v(&[1, -1, -1])));
    }
    for (s, t) in [(0, 6), (1, 7), (2, 4), (3, 5)] {
        edges.push(edge(format!("h{}{}", names[s], names[t]), s, t, v(&[0, 0, 1])));
    }
    let total = GkmGraph::from_edges(3, names, &edges).expect("triple-edge graph");
    // unique along horizontal edges; along the lower y-edges `x` may go to `x` or `x+2y`,
    // and the sphere fibers carry the label-preserving choice
    let preserved = |c: &Connection| {
        (0..total.dart_count())
            .map(|e| total.star(total.source(e)).iter().filter(|&&f| c.get(e, f).is_some_and(|i| total.label(i) == total.label(f))).count())
            .sum::<usize>()
    };
    let total_conn = find_compatible_connections(&total, 64).into_iter().max_by_key(preserved).expect("a compatible connection exists");
    let (base, base_conn) = segment(v(&[0, 0, 1]));
    let proj = GraphMorphism::from_vertex_map(&total, &base, vec![0, 0, 0, 0, 1, 1, 1, 1]).expect("projection");
    Fibration { total, total_conn, total_signed: None, base, base_conn, proj }
}

fn m3(rows: [[i64; 3]; 3]) -> LatticeAuto {
    LatticeAuto::new(IntMatrix::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())).expect("unimodular")
}

/// `A1³` over the triangle `x, x-y, y` with root labels `x+z, z, y+z`.
pub fn cube_swap() -> PolygonBundle {
    let isos = vec![m3([[1, 1, 0], [0, 1, 0], [0, 0, 1]]), m3([[0, 1, 0], [1, 0, 0], [0, 0, 1]]), m3([[1, 0, 0], [-1, 1, 0], [0, 0, 1]])];
    PolygonBundle::from_roots(
        vec![v(&[1, 0, 0]), v(&[1, -1, 0]), v(&[0, 1, 0])],
        Fiber::flag("A1xA1xA1").expect("A1 cubed"),
        vec![v(&[1, 0, 1]), v(&[0, 0, 1]), v(&[0, 1, 1])],
        isos,
        None,
    )
    .expect("cube bundle")
}

pub fn su3_bundle(b: i64, n: usize, l: usize, label_seed: u64) -> Result<PolygonBundle, TupleError> {
    let ex = su3_example(b, n, l)?;
    build_realizable_bundle(&ex.tuple()?, &ex.base_weights, "A2", label_seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibrations_bundles::{check_gkm_fiber_bundle, check_gkm_fibration, decide, fibration_predicates, BundleVerdict, Decision};
    use crate::gkm_graph::{check_connection_compatibility, count_compatible_connections, validate_graph};

    #[test]
    fn hexagon_swap_is_a_fibration_without_graph_isomorphism() {
        let f = hexagon_swap();
        assert!(validate_graph(&f.total).is_valid());
        assert!(check_connection_compatibility(&f.total, &f.total_conn, None).unwrap().violations.is_empty());
        assert!(check_gkm_fibration(&f).passes());
        assert!(matches!(check_gkm_fiber_bundle(&f), BundleVerdict::NotGraphIso { .. }));
        assert!(!fibration_predicates(&f).p2_everywhere());
    }

    #[test]
    fn triple_edge_has_no_lattice_map() {
        let f = triple_edge();
        assert!(validate_graph(&f.total).is_valid());
        assert_eq!(count_compatible_connections(&f.total), 4);
        assert!(check_gkm_fibration(&f).passes());
        let p = fibration_predicates(&f);
        assert!(p.p2_everywhere());
        for name in ["c", "d"] {
            let at = p.at(f.total.vertex_index(name).unwrap()).unwrap();
            assert!(!at.p3a && !at.p3b, "{name}");
        }
        match check_gkm_fiber_bundle(&f) {
            BundleVerdict::NoLatticeAuto { source_rank, target_rank, .. } => {
                let mut r = [source_rank, target_rank];
                r.sort();
                assert_eq!(r, [2, 3]);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn json_round_trips() {
        for name in ["hexagon-swap", "triple-edge"] {
            let FixtureData::Fibration(f) = load(name).unwrap() else { panic!() };
            let j = crate::fibrations_bundles::FibrationJson::from_fibration(&f);
            let text = serde_json::to_string(&j).unwrap();
            let back: crate::fibrations_bundles::FibrationJson = serde_json::from_str(&text).unwrap();
            let g = back.to_fibration().unwrap();
            assert_eq!(g.total, f.total);
            assert_eq!(g.total_conn, f.total_conn);
            assert_eq!(check_gkm_fiber_bundle(&g), check_gkm_fiber_bundle(&f));
        }
        let pb = cube_swap();
        let j = crate::fibrations_bundles::BundleJson::from_bundle(&pb);
        let back: crate::fibrations_bundles::BundleJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        let pb2 = back.to_bundle().unwrap();
        assert_eq!(pb2.edge_isos, pb.edge_isos);
        assert_eq!(decide(&pb2, false).unwrap(), decide(&pb, false).unwrap());
    }

    #[test]
    fn loader() {
        assert!(matches!(load("fixture:cube-swap").unwrap(), FixtureData::Bundle(_)));
        assert!(matches!(decide(&cube_swap(), false).unwrap(), Decision::NotRealizable { .. }));
        assert!(load("fixture:nope").is_err());
        assert!(matches!(load("su3:1:4:2").unwrap(), FixtureData::Bundle(_)));
    }
}
