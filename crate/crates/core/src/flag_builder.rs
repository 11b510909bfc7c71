//! The GKM graph of a full flag manifold `G/T`: vertices are Weyl elements, the edge
//! along a positive root `α` joins `[w]` and `[wσ_α]` and carries the signed label
//! `w·α`, and the canonical connection transports the edge along `β` at `[w]` to the
//! edge along `β` at `[wσ_α]`.

use crate::automorphisms::GkmAutomorphism;
use crate::exact_lattice::{IntVector, LatticeAuto};
use crate::gkm_graph::{Connection, EdgeSpec, GkmGraph, GraphData, SignedAxial};
use crate::root_weyl::{enumerate_weyl, reflection, DynkinAuto, RootError, RootSystemDesc, WeylElement, WeylGroup};

#[derive(Clone, Debug)]
pub struct FlagGraph {
    pub rs: RootSystemDesc,
    /// Vertex `i` is `weyl.get(i)`; vertex 0 is the identity coset.
    pub weyl: WeylGroup,
    pub graph: GkmGraph,
    pub signed: SignedAxial,
    pub canonical: Connection,
    dart_at: Vec<Vec<usize>>,
    edge_root: Vec<usize>,
}

impl FlagGraph {
    /// The dart at vertex `v` along the `k`-th positive root.
    pub fn dart_at(&self, v: usize, k: usize) -> usize {
        self.dart_at[v][k]
    }

    /// Index into `Δ_+` of the root an edge is keyed by.
    pub fn edge_root(&self, d: usize) -> usize {
        self.edge_root[d]
    }

    pub fn identity_vertex(&self) -> usize {
        0
    }

    pub fn vertex_of(&self, w: &WeylElement) -> Option<usize> {
        self.weyl.find(w.matrix.matrix())
    }

    pub fn data(&self) -> GraphData {
        GraphData { graph: self.graph.clone(), signed: Some(self.signed.clone()), connection: Some(self.canonical.clone()) }
    }
}

pub fn build_flag_graph(rs: &RootSystemDesc) -> Result<FlagGraph, RootError> {
    let weyl = enumerate_weyl(rs)?;
    let pos = rs.positive_roots();
    let reflections: Vec<LatticeAuto> = pos.iter().map(|a| reflection(rs, a).expect("positive roots are roots").matrix).collect();
    let n = weyl.len();
    let names: Vec<String> = weyl.elements().iter().map(WeylElement::word_string).collect();
    // neighbor[i][k] = index of w_i σ_k
    let neighbor: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            reflections.iter().map(|s| weyl.find(&weyl.get(i).matrix.matrix().mul(s.matrix())).expect("closed under products")).collect()
        })
        .collect();
    let mut specs = Vec::new();
    let mut lifts = Vec::new();
    let mut keys = Vec::new();
    for i in 0..n {
        for (k, alpha) in pos.iter().enumerate() {
            let j = neighbor[i][k];
            if i < j {
                let label = weyl.get(i).apply(alpha);
                specs.push(EdgeSpec { id: format!("{}:{}", names[i], names[j]), source: i, target: j, weight: label.clone() });
                lifts.push(label.clone());
                lifts.push(label.neg());
                keys.push((i, k));
                keys.push((j, k));
            }
        }
    }
    let graph = GkmGraph::from_edges(rs.rank(), names, &specs).expect("flag graph data is well formed");
    let mut dart_at = vec![vec![usize::MAX; pos.len()]; n];
    let mut edge_root = vec![0; graph.dart_count()];
    for (d, &(v, k)) in keys.iter().enumerate() {
        dart_at[v][k] = d;
        edge_root[d] = k;
    }
    let mut canonical = Connection::empty(graph.dart_count());
    for i in 0..n {
        for k in 0..pos.len() {
            let e = dart_at[i][k];
            let j = neighbor[i][k];
            for l in 0..pos.len() {
                canonical.set(e, dart_at[i][l], dart_at[j][l]);
            }
        }
    }
    Ok(FlagGraph { rs: rs.clone(), weyl, graph, signed: SignedAxial { lift: lifts }, canonical, dart_at, edge_root })
}

/// `L_{w0}`: `[w] ↦ [w0 w]`, keeping the root an edge is keyed by; `Ψ = w0`.
pub fn left_mult_automorphism(fg: &FlagGraph, w0: &WeylElement) -> GkmAutomorphism {
    let a = fg.vertex_of(w0).expect("w0 belongs to the enumerated Weyl group");
    let n = fg.weyl.len();
    let vertex_map: Vec<usize> = (0..n).map(|i| fg.weyl.product(a, i)).collect();
    let mut dart_map = vec![0; fg.graph.dart_count()];
    for d in 0..fg.graph.dart_count() {
        dart_map[d] = fg.dart_at(vertex_map[fg.graph.source(d)], fg.edge_root(d));
    }
    GkmAutomorphism { vertex_map, dart_map, psi: w0.matrix.clone() }
}

/// The automorphism induced by a diagram automorphism `ψ`: `[w] ↦ [ψ w ψ^{-1}]`, edge
/// along `α` to the edge along `ψ(α)`; it fixes `[e]`.
pub fn type2_automorphism(fg: &FlagGraph, d: &DynkinAuto) -> GkmAutomorphism {
    let p = d.matrix.matrix();
    let pinv = d.matrix.inverse();
    let n = fg.weyl.len();
    let vertex_map: Vec<usize> =
        (0..n).map(|i| fg.weyl.find(&p.mul(fg.weyl.get(i).matrix.matrix()).mul(pinv.matrix())).expect("conjugation preserves W")).collect();
    let pos = fg.rs.positive_roots();
    let root_image: Vec<usize> =
        pos.iter().map(|a| fg.rs.positive_index(&d.matrix.apply(a)).expect("diagram automorphisms permute positive roots")).collect();
    let mut dart_map = vec![0; fg.graph.dart_count()];
    for e in 0..fg.graph.dart_count() {
        dart_map[e] = fg.dart_at(vertex_map[fg.graph.source(e)], root_image[fg.edge_root(e)]);
    }
    GkmAutomorphism { vertex_map, dart_map, psi: d.matrix.clone() }
}

/// Signed label of the dart at `v` along the `k`-th positive root.
pub fn flag_label(fg: &FlagGraph, v: usize, k: usize) -> IntVector {
    fg.weyl.get(v).apply(&fg.rs.positive_roots()[k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gkm_graph::{check_connection_compatibility, check_signed, validate_graph};
    use crate::root_weyl::root_system;

    #[test]
    fn small_flag_graphs() {
        let a1 = build_flag_graph(&root_system("A1").unwrap()).unwrap();
        assert_eq!(a1.graph.vertex_count(), 2);
        assert_eq!(a1.graph.edge_count(), 1);
        let cube = build_flag_graph(&root_system("A1xA1xA1").unwrap()).unwrap();
        assert_eq!(cube.graph.vertex_count(), 8);
        assert_eq!(cube.graph.valence(), 3);
        let a2 = build_flag_graph(&root_system("A2").unwrap()).unwrap();
        assert_eq!(a2.graph.vertex_count(), 6);
        assert_eq!(a2.graph.valence(), 3);
        for fg in [&a1, &cube, &a2] {
            assert!(validate_graph(&fg.graph).is_valid());
            assert!(check_signed(&fg.graph, &fg.signed, &fg.canonical).unwrap());
            assert!(check_connection_compatibility(&fg.graph, &fg.canonical, None).unwrap().is_compatible());
        }
    }
}
