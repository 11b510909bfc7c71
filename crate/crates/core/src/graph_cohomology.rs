//! Degree-2 graph cohomology over `Z`.
//!
//! A degree-2 class assigns a weight `f_v` to every vertex with `f_{i(e)} - f_{t(e)} = k_e α(e)`
//! for integers `k_e`. Fixing a spanning forest, a class is determined by its values at the
//! forest roots and the vector `k ∈ Z^E`; the non-forest edges cut out the admissible `k` as
//! the integer kernel of a linear system (solved through the Smith form). The ordinary group
//! is the quotient by the constant classes.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::automorphisms::GkmAutomorphism;
use crate::exact_lattice::{kernel_basis, smith_normal_form, solve_integer, IntMatrix, IntVector, LatticeAuto};
use crate::gkm_graph::GkmGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("map does not pull classes back to classes (edge {edge})")]
    InvalidMorphism { edge: String },
    #[error("vertex map has length {found}, expected {expected}")]
    WrongSize { expected: usize, found: usize },
}

/// A weight per vertex satisfying every edge congruence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H2Class {
    pub values: Vec<IntVector>,
}

#[derive(Clone, Debug)]
pub struct H2Module {
    /// Z-basis of the equivariant group: constants per component first, then one lift
    /// per ordinary generator.
    pub equivariant_basis: Vec<H2Class>,
    pub constants_rank: usize,
    pub ordinary_rank: usize,
    /// Elementary divisors `> 1` of the quotient by constants.
    pub ordinary_torsion: Vec<BigInt>,
    /// Lifts of the ordinary generators, in the order used by every matrix below.
    pub ordinary_basis: Vec<H2Class>,
    forest: Forest,
    /// Columns span the admissible `k` vectors.
    k_basis: IntMatrix,
}

#[derive(Clone, Debug)]
struct Forest {
    /// Edge representatives `d < partner(d)`, indexing the `k` coordinates.
    edges: Vec<usize>,
    edge_of_dart: Vec<usize>,
    roots: Vec<usize>,
    component: Vec<usize>,
    /// Vertices in discovery order with the forest dart reaching them (none for roots).
    order: Vec<(usize, Option<usize>)>,
    tree_edge: Vec<bool>,
}

fn build_forest(g: &GkmGraph) -> Forest {
    let edges: Vec<usize> = g.edge_darts().collect();
    let mut edge_of_dart = vec![0; g.dart_count()];
    for (k, &d) in edges.iter().enumerate() {
        edge_of_dart[d] = k;
        edge_of_dart[g.partner(d)] = k;
    }
    let n = g.vertex_count();
    let mut component = vec![usize::MAX; n];
    let mut roots = Vec::new();
    let mut order = Vec::new();
    let mut tree_edge = vec![false; edges.len()];
    for r in 0..n {
        if component[r] != usize::MAX {
            continue;
        }
        let c = roots.len();
        roots.push(r);
        component[r] = c;
        order.push((r, None));
        let mut queue = VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            for &d in g.star(v) {
                let u = g.target(d);
                if component[u] == usize::MAX {
                    component[u] = c;
                    tree_edge[edge_of_dart[d]] = true;
                    order.push((u, Some(d)));
                    queue.push_back(u);
                }
            }
        }
    }
    Forest { edges, edge_of_dart, roots, component, order, tree_edge }
}

/// `f_{t(d)} - f_{s(d)}` in terms of `k`, for a dart `d`: `-k_e α(e)` on the representative.
fn step(g: &GkmGraph, fo: &Forest, d: usize) -> (usize, IntVector) {
    let e = fo.edge_of_dart[d];
    let rep = fo.edges[e];
    let a = g.label(rep).clone();
    (e, if d == rep { a.neg() } else { a })
}

/// Values of the class with the given `k` vector and zero at every root.
fn lift_k(g: &GkmGraph, fo: &Forest, k: &IntVector) -> Vec<IntVector> {
    let mut f = vec![IntVector::zeros(g.rank()); g.vertex_count()];
    for &(v, via) in &fo.order {
        if let Some(d) = via {
            let (e, a) = step(g, fo, d);
            f[v] = f[g.source(d)].add(&a.scale(&k.0[e]));
        }
    }
    f
}

/// The `k` vector of a vertex weight assignment, if it is a class.
fn k_of(g: &GkmGraph, fo: &Forest, f: &[IntVector]) -> Result<IntVector, CohomologyError> {
    let mut k = IntVector::zeros(fo.edges.len());
    for (e, &d) in fo.edges.iter().enumerate() {
        let diff = f[g.source(d)].sub(&f[g.target(d)]);
        k.0[e] = diff.integer_multiple_of(g.label(d)).ok_or_else(|| CohomologyError::InvalidMorphism { edge: g.dart(d).id.clone() })?;
    }
    Ok(k)
}

pub fn compute_h2(g: &GkmGraph) -> H2Module {
    let m = g.rank();
    let fo = build_forest(g);
    let ne = fo.edges.len();
    // symbolic values: f_v - f_root = P_v k
    let mut sym: Vec<IntMatrix> = vec![IntMatrix::zeros(m, ne); g.vertex_count()];
    for &(v, via) in &fo.order {
        if let Some(d) = via {
            let (e, a) = step(g, &fo, d);
            let mut p = sym[g.source(d)].clone();
            for i in 0..m {
                let x = p.get(i, e) + &a.0[i];
                p.set(i, e, x);
            }
            sym[v] = p;
        }
    }
    let mut rows: Vec<IntVector> = Vec::new();
    for (e, &d) in fo.edges.iter().enumerate() {
        if fo.tree_edge[e] {
            continue;
        }
        let mut block = sym[g.source(d)].sub(&sym[g.target(d)]);
        let a = g.label(d);
        for i in 0..m {
            let x = block.get(i, e) - &a.0[i];
            block.set(i, e, x);
        }
        rows.extend(block.row_vectors().into_iter().filter(|r| !r.is_zero()));
    }
    let kernel =
        if rows.is_empty() { (0..ne).map(|e| IntVector::unit(ne, e)).collect() } else { kernel_basis(&IntMatrix::from_rows(&rows, ne)) };
    let k_basis = IntMatrix::from_columns(&kernel, ne);
    let comps = fo.roots.len();
    let mut equivariant_basis = Vec::new();
    for c in 0..comps {
        for i in 0..m {
            let values =
                (0..g.vertex_count()).map(|v| if fo.component[v] == c { IntVector::unit(m, i) } else { IntVector::zeros(m) }).collect();
            equivariant_basis.push(H2Class { values });
        }
    }
    let mut ordinary_basis: Vec<H2Class> = Vec::new();
    for c in 1..comps {
        for i in 0..m {
            let values =
                (0..g.vertex_count()).map(|v| if fo.component[v] == c { IntVector::unit(m, i) } else { IntVector::zeros(m) }).collect();
            ordinary_basis.push(H2Class { values });
        }
    }
    for k in &kernel {
        let class = H2Class { values: lift_k(g, &fo, k) };
        equivariant_basis.push(class.clone());
        ordinary_basis.push(class);
    }
    // Constants in the coordinates of the equivariant basis: per-component blocks,
    // summed; the quotient's torsion is read off their Smith form.
    let r = equivariant_basis.len();
    let mut consts = IntMatrix::zeros(r, m);
    for c in 0..comps {
        for i in 0..m {
            consts.set(c * m + i, i, BigInt::one());
        }
    }
    let snf = smith_normal_form(&consts);
    let ordinary_torsion = snf.divisors().into_iter().filter(|d| !d.is_one()).collect();
    H2Module { equivariant_basis, constants_rank: m, ordinary_rank: r - snf.rank, ordinary_torsion, ordinary_basis, forest: fo, k_basis }
}

impl H2Module {
    /// Coordinates of a class in the ordinary basis.
    pub fn ordinary_coordinates(&self, g: &GkmGraph, f: &[IntVector]) -> Result<IntVector, CohomologyError> {
        let fo = &self.forest;
        let k = k_of(g, fo, f)?;
        let kc = if self.k_basis.cols() == 0 {
            IntVector::zeros(0)
        } else {
            solve_integer(&self.k_basis, &k).expect("k vectors of classes lie in the kernel lattice")
        };
        // what is left after removing the k part is constant on each component
        let lifted = lift_k(g, fo, &k);
        let base = f[fo.roots[0]].sub(&lifted[fo.roots[0]]);
        let mut out = Vec::new();
        for c in 1..fo.roots.len() {
            let r = fo.roots[c];
            out.extend(f[r].sub(&lifted[r]).sub(&base).0);
        }
        out.extend(kc.0);
        Ok(IntVector(out))
    }

    /// Exact congruence check of a candidate class.
    pub fn is_class(g: &GkmGraph, f: &[IntVector]) -> bool {
        g.edge_darts().all(|d| f[g.source(d)].sub(&f[g.target(d)]).integer_multiple_of(g.label(d)).is_some())
    }

    /// Per-edge multiples `k_e` of a class, indexed by edge representative order.
    pub fn edge_multiples(&self, g: &GkmGraph, f: &[IntVector]) -> Result<IntVector, CohomologyError> {
        k_of(g, &self.forest, f)
    }
}

/// Matrix of `Φ^*` on ordinary `H^2`, for `Φ: g2 → g` given by a vertex map and lattice
/// map: `(Φ^* f)_v = Ψ^{-1} f_{Φ(v)}`. Column `j` is the pullback of generator `j` of `h`.
pub fn induced_map_h2(
    h: &H2Module,
    g2: &GkmGraph,
    h2: &H2Module,
    vertex_map: &[usize],
    psi: &LatticeAuto,
) -> Result<IntMatrix, CohomologyError> {
    if vertex_map.len() != g2.vertex_count() {
        return Err(CohomologyError::WrongSize { expected: g2.vertex_count(), found: vertex_map.len() });
    }
    let inv = psi.inverse();
    let mut cols = Vec::new();
    for class in &h.ordinary_basis {
        let pulled: Vec<IntVector> = vertex_map.iter().map(|&w| inv.apply(&class.values[w])).collect();
        cols.push(h2.ordinary_coordinates(g2, &pulled)?);
    }
    Ok(IntMatrix::from_columns(&cols, h2.ordinary_rank))
}

pub fn induced_map_auto(g: &GkmGraph, h: &H2Module, phi: &GkmAutomorphism) -> Result<IntMatrix, CohomologyError> {
    induced_map_h2(h, g, h, &phi.vertex_map, &phi.psi)
}

/// Whether ordinary `H^2` injects into the sum over edges of the ordinary `H^2` of the
/// two-vertex edge graphs; the restriction to edge `e` reads off `k_e`.
pub fn edge_restriction_injectivity(g: &GkmGraph) -> bool {
    let h = compute_h2(g);
    if !h.ordinary_torsion.is_empty() {
        return false;
    }
    let cols: Vec<IntVector> = match h.ordinary_basis.iter().map(|c| h.edge_multiples(g, &c.values)).collect() {
        Ok(c) => c,
        Err(_) => return false,
    };
    let restriction = IntMatrix::from_columns(&cols, h.forest.edges.len());
    smith_normal_form(&restriction).rank == h.ordinary_rank
}

/// Whether restriction along a vertex embedding `sub → total` is onto on ordinary `H^2`.
/// The labels of `sub` must agree with those of the corresponding edges of `total`.
pub fn restriction_surjective(total: &GkmGraph, sub: &GkmGraph, embed: &[usize]) -> Result<bool, CohomologyError> {
    let ht = compute_h2(total);
    let hs = compute_h2(sub);
    restriction_surjective_with(&ht, sub, &hs, embed)
}

pub fn restriction_surjective_with(ht: &H2Module, sub: &GkmGraph, hs: &H2Module, embed: &[usize]) -> Result<bool, CohomologyError> {
    if embed.len() != sub.vertex_count() {
        return Err(CohomologyError::WrongSize { expected: sub.vertex_count(), found: embed.len() });
    }
    if hs.ordinary_rank == 0 {
        return Ok(true);
    }
    let mut cols = Vec::new();
    for class in &ht.ordinary_basis {
        let restricted: Vec<IntVector> = embed.iter().map(|&v| class.values[v].clone()).collect();
        cols.push(hs.ordinary_coordinates(sub, &restricted)?);
    }
    if cols.is_empty() {
        return Ok(false);
    }
    let snf = smith_normal_form(&IntMatrix::from_columns(&cols, hs.ordinary_rank));
    Ok(snf.rank == hs.ordinary_rank && snf.divisors().iter().all(|d| d.is_one() || d.is_zero()))
}
