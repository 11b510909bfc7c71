//! Graph fibrations, GKM fibrations and fiber bundles over arbitrary bases, and the
//! polygon-base bundles assembled from a fiber and per-edge lattice maps together with
//! their twist automorphism and realizability decision.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automorphisms::{label_seed, preserves_signed_structure, propagate, validate_automorphism, GkmAutomorphism};
use crate::exact_lattice::{
    self, extend_to_basis, hermite_rows, is_primitive_sublattice, rank_over_rationals, solve_rational, IntMatrix, IntVector, LatticeAuto,
    LatticeError,
};
use crate::flag_builder::{build_flag_graph, left_mult_automorphism, type2_automorphism, FlagGraph};
use crate::gkm_graph::{validate_graph, Connection, EdgeSpec, GkmGraph, GraphData, GraphError, GraphJson, GraphViolation, SignedAxial};
use crate::graph_cohomology::{restriction_surjective, CohomologyError};
use crate::root_weyl::{dynkin_automorphisms, root_system, DynkinAuto, RootError, WeylElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("malformed bundle data: {0}")]
    BadInput(String),
    #[error("assembled graph violates the GKM condition at vertex {vertex}")]
    GkmViolation { vertex: String },
    #[error("no fiber automorphism closes the polygon with the given lattice maps")]
    NoGluing,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

/// A graph map; darts whose endpoints are identified are collapsed (`None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMorphism {
    pub vertex_map: Vec<usize>,
    pub dart_map: Vec<Option<usize>>,
}

impl GraphMorphism {
    /// Derives the dart map from a vertex map: a non-collapsed dart goes to the base dart
    /// between the image vertices, matched by label when there are several.
    pub fn from_vertex_map(total: &GkmGraph, base: &GkmGraph, vertex_map: Vec<usize>) -> Result<Self, BundleError> {
        if vertex_map.len() != total.vertex_count() || vertex_map.iter().any(|&b| b >= base.vertex_count()) {
            return Err(BundleError::BadInput("projection vertex map".into()));
        }
        let mut dart_map = Vec::with_capacity(total.dart_count());
        for d in 0..total.dart_count() {
            let (s, t) = (vertex_map[total.source(d)], vertex_map[total.target(d)]);
            if s == t {
                dart_map.push(None);
                continue;
            }
            let cands = base.darts_between(s, t);
            let pick = cands.iter().copied().find(|&e| base.axial(e) == total.axial(d)).or_else(|| cands.first().copied());
            match pick {
                Some(e) => dart_map.push(Some(e)),
                None => return Err(BundleError::BadInput(format!("dart {} has no image", total.dart(d).id))),
            }
        }
        Ok(GraphMorphism { vertex_map, dart_map })
    }

    pub fn is_horizontal(&self, d: usize) -> bool {
        self.dart_map[d].is_some()
    }
}

/// A total graph over a base with connections on both.
#[derive(Clone, Debug)]
pub struct Fibration {
    pub total: GkmGraph,
    pub total_conn: Connection,
    pub total_signed: Option<SignedAxial>,
    pub base: GkmGraph,
    pub base_conn: Connection,
    pub proj: GraphMorphism,
}

impl Fibration {
    pub fn fiber_vertices(&self, b: usize) -> Vec<usize> {
        (0..self.total.vertex_count()).filter(|&v| self.proj.vertex_map[v] == b).collect()
    }

    pub fn vertical_darts_at(&self, v: usize) -> Vec<usize> {
        self.total.star(v).iter().copied().filter(|&d| !self.proj.is_horizontal(d)).collect()
    }

    pub fn horizontal_darts_at(&self, v: usize) -> Vec<usize> {
        self.total.star(v).iter().copied().filter(|&d| self.proj.is_horizontal(d)).collect()
    }

    fn lift(&self, d: usize) -> IntVector {
        match &self.total_signed {
            Some(s) => s.get(d).clone(),
            None => self.total.label(d).clone(),
        }
    }
}

pub fn check_graph_fibration(proj: &GraphMorphism, total: &GkmGraph, base: &GkmGraph) -> bool {
    if proj.vertex_map.len() != total.vertex_count() || proj.dart_map.len() != total.dart_count() {
        return false;
    }
    for d in 0..total.dart_count() {
        let (s, t) = (proj.vertex_map[total.source(d)], proj.vertex_map[total.target(d)]);
        match proj.dart_map[d] {
            None if s != t => return false,
            None => {}
            Some(e) => {
                if base.source(e) != s || base.target(e) != t || proj.dart_map[total.partner(d)] != Some(base.partner(e)) {
                    return false;
                }
            }
        }
    }
    (0..total.vertex_count()).all(|v| {
        let mut images: Vec<usize> = total.star(v).iter().filter_map(|&d| proj.dart_map[d]).collect();
        let n = images.len();
        images.sort_unstable();
        images.dedup();
        let mut star: Vec<usize> = base.star(proj.vertex_map[v]).to_vec();
        star.sort_unstable();
        images.len() == n && images == star
    })
}

/// Violations per condition of a GKM fibration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FibrationReport {
    pub graph_fibration: bool,
    /// Horizontal darts whose label differs from the base label.
    pub label_mismatches: Vec<usize>,
    /// Pairs `(e, f)` with `∇_e f` of the other kind than `f` (or missing).
    pub kind_changes: Vec<(usize, usize)>,
    /// Horizontal pairs with `π(∇_e f) ≠ ∇^B_{π e} π f`.
    pub base_mismatches: Vec<(usize, usize)>,
}

impl FibrationReport {
    pub fn passes(&self) -> bool {
        self.graph_fibration && self.label_mismatches.is_empty() && self.kind_changes.is_empty() && self.base_mismatches.is_empty()
    }
}

pub fn check_gkm_fibration(fib: &Fibration) -> FibrationReport {
    let mut r = FibrationReport { graph_fibration: check_graph_fibration(&fib.proj, &fib.total, &fib.base), ..Default::default() };
    if !r.graph_fibration {
        return r;
    }
    let g = &fib.total;
    for d in 0..g.dart_count() {
        if let Some(e) = fib.proj.dart_map[d] {
            if g.axial(d) != fib.base.axial(e) {
                r.label_mismatches.push(d);
            }
        }
    }
    for e in 0..g.dart_count() {
        for &f in g.star(g.source(e)) {
            let Some(t) = fib.total_conn.get(e, f) else {
                r.kind_changes.push((e, f));
                continue;
            };
            if fib.proj.is_horizontal(t) != fib.proj.is_horizontal(f) {
                r.kind_changes.push((e, f));
                continue;
            }
            if let (Some(pe), Some(pf), Some(pt)) = (fib.proj.dart_map[e], fib.proj.dart_map[f], fib.proj.dart_map[t]) {
                if fib.base_conn.get(pe, pf) != Some(pt) {
                    r.base_mismatches.push((e, f));
                }
            }
        }
    }
    r
}

/// Transport of the fiber over `source(base_dart)` to the fiber over its target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberTransport {
    pub base_dart: usize,
    pub vertex_map: BTreeMap<usize, usize>,
    pub dart_map: BTreeMap<usize, usize>,
    pub psi: LatticeAuto,
    /// Vertex pairs joined by several vertical edges, where other transports of the same
    /// edges would also be graph isomorphisms.
    pub alternates: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleVerdict {
    Bundle(Vec<FiberTransport>),
    NotGraphIso {
        base_dart: String,
        dart: String,
    },
    /// No lattice map matches the transported labels; the ranks of the label span of
    /// `subset` and of its image differ (or agree, when only the sign search failed).
    NoLatticeAuto {
        base_dart: String,
        subset: String,
        source_rank: usize,
        target_rank: usize,
    },
}

impl fmt::Display for BundleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleVerdict::Bundle(ts) => write!(f, "Bundle ({} transports)", ts.len()),
            BundleVerdict::NotGraphIso { base_dart, dart } => write!(f, "NotGraphIso: transport along {base_dart} breaks dart {dart}"),
            BundleVerdict::NoLatticeAuto { base_dart, subset, source_rank, target_rank } => {
                write!(f, "NoLatticeAuto: along {base_dart}, {subset} has span rank {source_rank} but its image has rank {target_rank}")
            }
        }
    }
}

fn rank_of(vs: &[IntVector]) -> usize {
    if vs.is_empty() {
        0
    } else {
        rank_over_rationals(vs).unwrap_or(0)
    }
}

/// Rational combination `Σ c_k v_k`, if integral.
fn combine(coeffs: &[BigRational], vs: &[IntVector], m: usize) -> Option<IntVector> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut acc = BigRational::zero();
        for (c, v) in coeffs.iter().zip(vs) {
            acc += c * BigRational::from_integer(v.0[i].clone());
        }
        if !acc.is_integer() {
            return None;
        }
        out.push(acc.to_integer());
    }
    Some(IntVector(out))
}

/// Basis of `span_Q(vs) ∩ Z^m` for any `vs`.
pub fn saturation_basis(vs: &[IntVector], m: usize) -> Vec<IntVector> {
    let independent = hermite_rows(vs, m);
    exact_lattice::saturation_basis(&independent, m)
}

/// A lattice automorphism with `Ψ(src_k) = ±tgt_k` for every pair, if one exists.
/// Sign patterns on a maximal independent subset are tried with all-plus first.
pub fn find_lattice_map(src: &[IntVector], tgt: &[IntVector], m: usize) -> Option<LatticeAuto> {
    let mut basis_idx: Vec<usize> = Vec::new();
    let mut basis: Vec<IntVector> = Vec::new();
    for (i, v) in src.iter().enumerate() {
        let mut trial = basis.clone();
        trial.push(v.clone());
        if rank_of(&trial) > basis.len() {
            basis = trial;
            basis_idx.push(i);
        }
    }
    let r = basis.len();
    let bmat = IntMatrix::from_columns(&basis, m);
    let coeffs: Vec<Vec<BigRational>> = src.iter().map(|v| solve_rational(&bmat, v).expect("in the span")).collect();
    let sat = saturation_basis(src, m);
    let sat_coeffs: Vec<Vec<BigRational>> = sat.iter().map(|v| solve_rational(&bmat, v).expect("in the span")).collect();
    for pattern in 0u64..(1u64 << r) {
        let images: Vec<IntVector> =
            basis_idx.iter().enumerate().map(|(k, &i)| if pattern >> k & 1 == 1 { tgt[i].neg() } else { tgt[i].clone() }).collect();
        let consistent = coeffs.iter().zip(tgt).all(|(c, t)| match combine(c, &images, m) {
            Some(img) => img == *t || img == t.neg(),
            None => false,
        });
        if !consistent {
            continue;
        }
        let Some(sat_images) = sat_coeffs.iter().map(|c| combine(c, &images, m)).collect::<Option<Vec<IntVector>>>() else {
            continue;
        };
        if sat_images.is_empty() {
            return Some(LatticeAuto::identity(m));
        }
        if !is_primitive_sublattice(&sat_images).unwrap_or(false) {
            continue;
        }
        let (Ok(s_full), Ok(t_full)) = (extend_to_basis(&sat, m), extend_to_basis(&sat_images, m)) else {
            continue;
        };
        let s = IntMatrix::from_columns(&s_full, m);
        let t = IntMatrix::from_columns(&t_full, m);
        let sinv = s.inverse_unimodular().expect("extended basis is unimodular");
        return LatticeAuto::new(t.mul(&sinv)).ok();
    }
    None
}

pub fn check_gkm_fiber_bundle(fib: &Fibration) -> BundleVerdict {
    let g = &fib.total;
    let m = g.rank();
    let mut transports = Vec::new();
    for e in 0..fib.base.dart_count() {
        let (b, b2) = (fib.base.source(e), fib.base.target(e));
        let fiber = fib.fiber_vertices(b);
        let target_fiber: BTreeSet<usize> = fib.fiber_vertices(b2).into_iter().collect();
        let base_id = fib.base.dart(e).id.clone();
        let mut vmap = BTreeMap::new();
        let mut lifts = BTreeMap::new();
        for &x in &fiber {
            let h = g.star(x).iter().copied().find(|&d| fib.proj.dart_map[d] == Some(e)).expect("graph fibration");
            vmap.insert(x, g.target(h));
            lifts.insert(x, h);
        }
        let images: BTreeSet<usize> = vmap.values().copied().collect();
        let mut dmap = BTreeMap::new();
        let mut broken: Option<usize> = None;
        if images != target_fiber {
            broken = fiber.first().and_then(|&x| fib.vertical_darts_at(x).first().copied());
        }
        for &x in &fiber {
            for f in fib.vertical_darts_at(x) {
                match fib.total_conn.get(lifts[&x], f) {
                    Some(t) if !fib.proj.is_horizontal(t) => {
                        dmap.insert(f, t);
                    }
                    _ => broken = broken.or(Some(f)),
                }
            }
        }
        if broken.is_none() {
            let targets: BTreeSet<usize> = dmap.values().copied().collect();
            if targets.len() != dmap.len() {
                broken = dmap.keys().next().copied();
            }
        }
        if broken.is_none() {
            broken = dmap.iter().map(|(&f, &t)| (f, t)).find_map(|(f, t)| {
                let ok = g.source(t) == vmap[&g.source(f)]
                    && g.target(t) == vmap[&g.target(f)]
                    && dmap.get(&g.partner(f)) == Some(&g.partner(t));
                (!ok).then_some(f)
            });
        }
        if let Some(f) = broken {
            return BundleVerdict::NotGraphIso { base_dart: base_id, dart: g.dart(f).id.clone() };
        }
        // rank witnesses: whole fiber, vertex stars, then multi-edge classes
        let src_of = |ds: &[usize]| ds.iter().map(|&d| fib.lift(d)).collect::<Vec<_>>();
        let tgt_of = |ds: &[usize]| ds.iter().map(|&d| fib.lift(dmap[&d])).collect::<Vec<_>>();
        let all: Vec<usize> = dmap.keys().copied().collect();
        let mut subsets: Vec<(String, Vec<usize>)> = vec![("the fiber".to_string(), all.clone())];
        for &x in &fiber {
            subsets.push((format!("the star of {}", g.vertices()[x]), fib.vertical_darts_at(x)));
        }
        let mut alternates = Vec::new();
        for &x in &fiber {
            for &y in &fiber {
                if x < y {
                    let between: Vec<usize> = g.darts_between(x, y).into_iter().filter(|&d| !fib.proj.is_horizontal(d)).collect();
                    if between.len() >= 2 {
                        subsets.push((format!("the edges between {} and {}", g.vertices()[x], g.vertices()[y]), between));
                        alternates.push((x, y));
                    }
                }
            }
        }
        for (name, ds) in &subsets {
            let (rs, rt) = (rank_of(&src_of(ds)), rank_of(&tgt_of(ds)));
            if rs != rt {
                return BundleVerdict::NoLatticeAuto { base_dart: base_id, subset: name.clone(), source_rank: rs, target_rank: rt };
            }
        }
        let Some(psi) = find_lattice_map(&src_of(&all), &tgt_of(&all), m) else {
            let r = rank_of(&src_of(&all));
            return BundleVerdict::NoLatticeAuto { base_dart: base_id, subset: "the fiber".into(), source_rank: r, target_rank: r };
        };
        transports.push(FiberTransport { base_dart: e, vertex_map: vmap, dart_map: dmap, psi, alternates });
    }
    BundleVerdict::Bundle(transports)
}

/// Independence and primitivity conditions at one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexPredicates {
    pub vertex: usize,
    /// One horizontal and any two vertical labels are independent.
    pub p2: bool,
    /// One horizontal and any three vertical labels are independent.
    pub p3a: bool,
    /// Every independent set of vertical labels spans a primitive sublattice.
    pub p3b: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateReport {
    pub per_vertex: Vec<VertexPredicates>,
}

impl PredicateReport {
    pub fn p2_everywhere(&self) -> bool {
        self.per_vertex.iter().all(|p| p.p2)
    }

    pub fn p3a_everywhere(&self) -> bool {
        self.per_vertex.iter().all(|p| p.p3a)
    }

    pub fn p3b_everywhere(&self) -> bool {
        self.per_vertex.iter().all(|p| p.p3b)
    }

    pub fn at(&self, v: usize) -> Option<&VertexPredicates> {
        self.per_vertex.iter().find(|p| p.vertex == v)
    }
}

pub fn fibration_predicates(fib: &Fibration) -> PredicateReport {
    let g = &fib.total;
    let per_vertex = (0..g.vertex_count())
        .map(|v| {
            let hs: Vec<IntVector> = fib.horizontal_darts_at(v).iter().map(|&d| g.label(d).clone()).collect();
            let vs: Vec<IntVector> = fib.vertical_darts_at(v).iter().map(|&d| g.label(d).clone()).collect();
            let with_h = |k: usize| {
                hs.iter().all(|h| {
                    crate::exact_lattice::combinations(vs.len(), k).iter().all(|c| {
                        let mut set = vec![h.clone()];
                        set.extend(c.iter().map(|&i| vs[i].clone()));
                        rank_of(&set) == k + 1
                    })
                })
            };
            let p3b = (1..=vs.len()).all(|k| {
                crate::exact_lattice::combinations(vs.len(), k).iter().all(|c| {
                    let set: Vec<IntVector> = c.iter().map(|&i| vs[i].clone()).collect();
                    rank_of(&set) < k || is_primitive_sublattice(&set).unwrap_or(false)
                })
            });
            VertexPredicates { vertex: v, p2: with_h(2), p3a: with_h(3), p3b }
        })
        .collect();
    PredicateReport { per_vertex }
}

/// The fiber of a polygon bundle: a flag graph or an inline graph with its connection.
#[derive(Clone, Debug)]
pub struct Fiber {
    pub graph: GkmGraph,
    pub connection: Connection,
    pub flag: Option<FlagGraph>,
    pub source: FiberSource,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiberSource {
    Flag(String),
    Inline(GraphJson),
}

impl Fiber {
    pub fn flag(desc: &str) -> Result<Self, BundleError> {
        let fg = build_flag_graph(&root_system(desc)?)?;
        Ok(Fiber { graph: fg.graph.clone(), connection: fg.canonical.clone(), flag: Some(fg), source: FiberSource::Flag(desc.to_string()) })
    }

    pub fn inline(j: &GraphJson) -> Result<Self, BundleError> {
        let data = GraphData::from_json(j)?;
        let connection = data.connection.ok_or_else(|| BundleError::BadInput("inline fiber needs a connection".into()))?;
        Ok(Fiber { graph: data.graph, connection, flag: None, source: FiberSource::Inline(j.clone()) })
    }

    /// Signed labels of every dart given images of the positive roots (flag fibers only).
    pub fn labels_from_roots(&self, root_images: &[IntVector]) -> Result<SignedAxial, BundleError> {
        let fg = self.flag.as_ref().ok_or_else(|| BundleError::BadInput("root labels need a flag fiber".into()))?;
        let pos = fg.rs.positive_roots();
        if root_images.len() != pos.len() {
            return Err(BundleError::BadInput(format!("expected {} root labels, found {}", pos.len(), root_images.len())));
        }
        let mut lift = Vec::with_capacity(fg.graph.dart_count());
        for d in 0..fg.graph.dart_count() {
            let v = fg.graph.source(d);
            let label = fg.weyl.get(v).apply(&pos[fg.edge_root(d)]);
            let lifted = match fg.rs.positive_index(&label) {
                Some(j) => root_images[j].clone(),
                None => root_images[fg.rs.positive_index(&label.neg()).expect("roots are ± positive roots")].neg(),
            };
            lift.push(lifted);
        }
        Ok(SignedAxial { lift })
    }
}

/// A bundle over an `n`-gon with edge `i` from `v_i` to `v_{i+1}` labeled `α_i`; the fiber
/// over `v_{i+1}` carries `Ψ_i` of the labels over `v_i`, and the closing edge glues the
/// fiber over `v_n` back to the one over `v_1`.
#[derive(Clone, Debug)]
pub struct PolygonBundle {
    pub base_weights: Vec<IntVector>,
    pub fiber: Fiber,
    pub initial_labels: SignedAxial,
    /// Per positive root, when the labels came from root images.
    pub root_labels: Option<Vec<IntVector>>,
    pub edge_isos: Vec<LatticeAuto>,
    /// Vertex map `fiber over v_n → fiber over v_1`; found from the labels when absent.
    pub gluing: Option<Vec<usize>>,
}

impl PolygonBundle {
    pub fn new(
        base_weights: Vec<IntVector>,
        fiber: Fiber,
        initial_labels: SignedAxial,
        edge_isos: Vec<LatticeAuto>,
        gluing: Option<Vec<usize>>,
    ) -> Result<Self, BundleError> {
        let n = base_weights.len();
        if n < 3 {
            return Err(BundleError::BadInput("the base polygon needs at least 3 edges".into()));
        }
        let m = base_weights[0].len();
        if base_weights.iter().any(|a| a.len() != m || a.is_zero()) {
            return Err(BundleError::BadInput("base weights must be nonzero of equal length".into()));
        }
        if edge_isos.len() != n || edge_isos.iter().any(|p| p.rank() != m) {
            return Err(BundleError::BadInput(format!("expected {n} lattice maps of rank {m}")));
        }
        if initial_labels.lift.len() != fiber.graph.dart_count() || initial_labels.lift.iter().any(|l| l.len() != m) {
            return Err(BundleError::BadInput("initial labels do not match the fiber".into()));
        }
        if let Some(gl) = &gluing {
            if gl.len() != fiber.graph.vertex_count() {
                return Err(BundleError::BadInput("gluing must map every fiber vertex".into()));
            }
        }
        Ok(PolygonBundle { base_weights, fiber, initial_labels, root_labels: None, edge_isos, gluing })
    }

    pub fn from_roots(
        base_weights: Vec<IntVector>,
        fiber: Fiber,
        root_labels: Vec<IntVector>,
        edge_isos: Vec<LatticeAuto>,
        gluing: Option<Vec<usize>>,
    ) -> Result<Self, BundleError> {
        let labels = fiber.labels_from_roots(&root_labels)?;
        let mut pb = PolygonBundle::new(base_weights, fiber, labels, edge_isos, gluing)?;
        pb.root_labels = Some(root_labels);
        Ok(pb)
    }

    pub fn n(&self) -> usize {
        self.base_weights.len()
    }

    pub fn rank(&self) -> usize {
        self.base_weights[0].len()
    }

    /// Signed labels over `v_1, …, v_n`.
    pub fn fiber_labels(&self) -> Vec<SignedAxial> {
        let mut out = vec![self.initial_labels.clone()];
        for i in 0..self.n() - 1 {
            let next = out[i].lift.iter().map(|l| self.edge_isos[i].apply(l)).collect();
            out.push(SignedAxial { lift: next });
        }
        out
    }

    /// `Ψ_n ∘ ⋯ ∘ Ψ_1`
    pub fn total_psi(&self) -> LatticeAuto {
        self.edge_isos.iter().fold(LatticeAuto::identity(self.rank()), |acc, p| p.compose(&acc))
    }

    /// The fiber over `v_1` with its own labels.
    pub fn first_fiber(&self) -> GkmGraph {
        relabel(&self.fiber.graph, &self.initial_labels)
    }
}

/// Same darts, new labels (dart `2k` carries edge `k` in both graphs).
pub fn relabel(g: &GkmGraph, lifts: &SignedAxial) -> GkmGraph {
    let specs: Vec<EdgeSpec> = (0..g.dart_count())
        .step_by(2)
        .map(|d| EdgeSpec { id: g.dart(d).id.clone(), source: g.source(d), target: g.target(d), weight: lifts.get(d).clone() })
        .collect();
    GkmGraph::from_edges(lifts.get(0).len(), g.vertices().to_vec(), &specs).expect("relabeling keeps the graph well formed")
}

/// The composite automorphism of the fiber over `v_1`, with `psi = Ψ_n ⋯ Ψ_1`.
///
/// The graph map is the unique connection-preserving automorphism carrying the labels
/// along `psi`; a sign-exact one is preferred over one matching labels only up to sign.
pub fn twist(pb: &PolygonBundle) -> Result<GkmAutomorphism, BundleError> {
    let g = pb.first_fiber();
    let psi = pb.total_psi();
    let conn = &pb.fiber.connection;
    let s = &pb.initial_labels;
    let attempt = |u: usize, signed: Option<&SignedAxial>| -> Option<GkmAutomorphism> {
        let seed = label_seed(&g, signed, 0, u, &psi)?;
        propagate(&g, conn, 0, u, &seed, &psi).ok().flatten()
    };
    if let Some(gl) = &pb.gluing {
        let found = attempt(gl[0], Some(s)).or_else(|| attempt(gl[0], None));
        return match found {
            Some(phi) if phi.vertex_map == *gl => Ok(phi),
            _ => Err(BundleError::NoGluing),
        };
    }
    for signed in [Some(s), None] {
        for u in 0..g.vertex_count() {
            if let Some(phi) = attempt(u, signed) {
                return Ok(phi);
            }
        }
    }
    Err(BundleError::NoGluing)
}

/// The assembled total graph with its projection to the base polygon.
#[derive(Clone, Debug)]
pub struct TotalGraph {
    pub fibration: Fibration,
    pub signed: SignedAxial,
    pub twist: GkmAutomorphism,
    /// Vertex `(i, x)` of the total graph is `i * fiber_size + x`.
    pub fiber_size: usize,
}

impl TotalGraph {
    pub fn graph(&self) -> &GkmGraph {
        &self.fibration.total
    }

    pub fn data(&self) -> GraphData {
        GraphData {
            graph: self.fibration.total.clone(),
            signed: Some(self.signed.clone()),
            connection: Some(self.fibration.total_conn.clone()),
        }
    }

    /// Vertices over `v_{i+1}` in fiber order.
    pub fn fiber_embedding(&self, i: usize) -> Vec<usize> {
        (0..self.fiber_size).map(|x| i * self.fiber_size + x).collect()
    }
}

/// The polygon as a graph, edge `i` being `v_{i+1} → v_{i+2}`, with its unique connection.
pub fn polygon_base(weights: &[IntVector]) -> Result<(GkmGraph, Connection), BundleError> {
    let n = weights.len();
    let names = (1..=n).map(|i| format!("v{i}")).collect();
    let specs: Vec<EdgeSpec> =
        (0..n).map(|i| EdgeSpec { id: format!("e{}", i + 1), source: i, target: (i + 1) % n, weight: weights[i].clone() }).collect();
    let g = GkmGraph::from_edges(weights[0].len(), names, &specs)?;
    let mut c = Connection::empty(g.dart_count());
    for i in 0..n {
        let (fwd, rev) = (2 * i, 2 * i + 1);
        let prev_rev = 2 * ((i + n - 1) % n) + 1;
        let next_fwd = 2 * ((i + 1) % n);
        c.set(fwd, fwd, rev);
        c.set(fwd, prev_rev, next_fwd);
        c.set(rev, rev, fwd);
        c.set(rev, next_fwd, prev_rev);
    }
    Ok((g, c))
}

pub fn assemble_total_graph(pb: &PolygonBundle) -> Result<TotalGraph, BundleError> {
    let tw = twist(pb)?;
    let n = pb.n();
    let m = pb.rank();
    let f = &pb.fiber.graph;
    let fv = f.vertex_count();
    let fe = f.dart_count() / 2;
    let labels = pb.fiber_labels();
    let ginv = tw.inverse();
    let vid = |i: usize, x: usize| i * fv + x;
    let mut names = Vec::with_capacity(n * fv);
    for i in 0..n {
        for x in f.vertices() {
            names.push(format!("{x}@v{}", i + 1));
        }
    }
    let mut specs = Vec::new();
    for (i, lab) in labels.iter().enumerate() {
        for k in 0..fe {
            let d = 2 * k;
            specs.push(EdgeSpec {
                id: format!("{}@v{}", f.dart(d).id, i + 1),
                source: vid(i, f.source(d)),
                target: vid(i, f.target(d)),
                weight: lab.get(d).clone(),
            });
        }
    }
    // horizontal edge (i, x): from (i, x) to (i+1, x), or to (0, g(x)) when closing
    let next = |i: usize, x: usize| {
        if i + 1 < n {
            vid(i + 1, x)
        } else {
            vid(0, tw.vertex_map[x])
        }
    };
    for i in 0..n {
        for x in 0..fv {
            specs.push(EdgeSpec {
                id: format!("h{}:{}", i + 1, f.vertices()[x]),
                source: vid(i, x),
                target: next(i, x),
                weight: pb.base_weights[i].clone(),
            });
        }
    }
    let g = GkmGraph::from_edges(m, names, &specs)?;
    let report = validate_graph(&g);
    if let Some(GraphViolation::DependentAdjacentLabels { vertex, .. }) =
        report.violations.iter().find(|v| matches!(v, GraphViolation::DependentAdjacentLabels { .. }))
    {
        return Err(BundleError::GkmViolation { vertex: g.vertices()[*vertex].clone() });
    }
    let vdart = |i: usize, d: usize| i * 2 * fe + d;
    let hbase = 2 * n * fe;
    let hf = |i: usize, x: usize| hbase + 2 * (i * fv + x);
    // the backward horizontal dart at (i, x)
    let hb = |i: usize, x: usize| {
        if i > 0 {
            hf(i - 1, x) + 1
        } else {
            hf(n - 1, ginv.vertex_map[x]) + 1
        }
    };
    let mut c = Connection::empty(g.dart_count());
    let fc = &pb.fiber.connection;
    for i in 0..n {
        for d in 0..f.dart_count() {
            let e = vdart(i, d);
            let (x, y) = (f.source(d), f.target(d));
            for &ff in f.star(x) {
                let t = fc.get(d, ff).ok_or_else(|| BundleError::BadInput("fiber connection is incomplete".into()))?;
                c.set(e, vdart(i, ff), vdart(i, t));
            }
            c.set(e, hf(i, x), hf(i, y));
            c.set(e, hb(i, x), hb(i, y));
        }
        for x in 0..fv {
            let (j, z) = if i + 1 < n { (i + 1, x) } else { (0, tw.vertex_map[x]) };
            let fwd = hf(i, x);
            let back = fwd + 1;
            for &ff in f.star(x) {
                let image = if i + 1 < n { ff } else { tw.dart_map[ff] };
                c.set(fwd, vdart(i, ff), vdart(j, image));
                c.set(back, vdart(j, image), vdart(i, ff));
            }
            c.set(fwd, fwd, back);
            c.set(fwd, hb(i, x), hf(j, z));
            c.set(back, back, fwd);
            c.set(back, hf(j, z), hb(i, x));
        }
    }
    let mut lift = Vec::with_capacity(g.dart_count());
    for lab in &labels {
        lift.extend(lab.lift.iter().cloned());
    }
    for i in 0..n {
        for _ in 0..fv {
            lift.push(pb.base_weights[i].clone());
            lift.push(pb.base_weights[i].neg());
        }
    }
    let (base, base_conn) = polygon_base(&pb.base_weights)?;
    let vertex_map: Vec<usize> = (0..n * fv).map(|v| v / fv).collect();
    let dart_map: Vec<Option<usize>> =
        (0..g.dart_count()).map(|d| if d < hbase { None } else { Some(2 * ((d - hbase) / (2 * fv)) + (d - hbase) % 2) }).collect();
    let fibration = Fibration {
        total: g,
        total_conn: c,
        total_signed: Some(SignedAxial { lift: lift.clone() }),
        base,
        base_conn,
        proj: GraphMorphism { vertex_map, dart_map },
    };
    Ok(TotalGraph { fibration, signed: SignedAxial { lift }, twist: tw, fiber_size: fv })
}

/// Whether some vertical label over some base vertex lies in the rational span of the
/// base weights.
pub fn labels_meet_base_plane(pb: &PolygonBundle) -> bool {
    let base_rank = rank_of(&pb.base_weights);
    pb.fiber_labels().iter().any(|lab| {
        lab.lift.iter().any(|l| {
            let mut set = pb.base_weights.clone();
            set.push(l.clone());
            rank_of(&set) == base_rank
        })
    })
}

/// Carries the signed labels around the polygon through the `Ψ_i`, requiring each step to
/// be sign-exact modulo the base weight, and tests that the result closes up on the fiber
/// over `v_1` through the gluing.
pub fn check_fiberwise_signed(pb: &PolygonBundle) -> Result<bool, BundleError> {
    let tw = twist(pb)?;
    let n = pb.n();
    let mut s = pb.initial_labels.lift.clone();
    for i in 0..n {
        let next: Vec<IntVector> = s.iter().map(|l| pb.edge_isos[i].apply(l)).collect();
        for (a, b) in s.iter().zip(&next) {
            if b.sub(a).integer_multiple_of(&pb.base_weights[i]).is_none() {
                return Ok(false);
            }
        }
        s = next;
    }
    // s now holds the labels carried once around, indexed by darts over v_n
    Ok((0..s.len()).all(|d| pb.initial_labels.get(tw.dart_map[d]) == &s[d]))
}

/// The twist composed down to the standard flag graph: `L_w ∘ Φ_2` by graph maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistDecomposition {
    pub w: WeylElement,
    pub outer: DynkinAuto,
}

pub fn decompose_graph_map(fg: &FlagGraph, phi: &GkmAutomorphism) -> Option<TwistDecomposition> {
    let w = fg.weyl.get(phi.vertex_map[fg.identity_vertex()]).clone();
    let lw = left_mult_automorphism(fg, &w);
    dynkin_automorphisms(&fg.rs).into_iter().find_map(|d| {
        let cand = lw.compose(&type2_automorphism(fg, &d));
        cand.same_graph_map(phi).then(|| TwistDecomposition { w: w.clone(), outer: d })
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Realizable { w: String },
    NotRealizable { residual: String, h2_surjective: Option<bool> },
    Inapplicable { reason: String },
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Realizable { .. } => write!(f, "Realizable"),
            Decision::NotRealizable { residual, .. } => {
                write!(f, "NotRealizable: Type-2 residual = {residual}")
            }
            Decision::Inapplicable { reason } => write!(f, "Inapplicable: {reason}"),
        }
    }
}

pub fn fiber_inclusion_h2_surjective(pb: &PolygonBundle) -> Result<bool, BundleError> {
    let tg = assemble_total_graph(pb)?;
    Ok(restriction_surjective(tg.graph(), &pb.first_fiber(), &tg.fiber_embedding(0))?)
}

pub fn decide_realizability(pb: &PolygonBundle) -> Result<Decision, BundleError> {
    decide(pb, true)
}

/// As [`decide_realizability`], optionally skipping the cohomology certificate.
pub fn decide(pb: &PolygonBundle, with_certificate: bool) -> Result<Decision, BundleError> {
    let n = pb.n();
    for i in 0..n {
        let pair = [pb.base_weights[(i + n - 1) % n].clone(), pb.base_weights[i].clone()];
        if !is_primitive_sublattice(&pair).unwrap_or(false) {
            return Ok(Decision::Inapplicable { reason: format!("base weights at v{} do not span a primitive rank-2 sublattice", i + 1) });
        }
    }
    let tw = twist(pb)?;
    let g = pb.first_fiber();
    if !validate_automorphism(&g, &tw, &pb.fiber.connection, None).is_valid() {
        return Ok(Decision::Inapplicable { reason: "twist does not preserve the connection".into() });
    }
    if !preserves_signed_structure(&pb.initial_labels, &tw) {
        return Ok(Decision::Inapplicable { reason: "twist does not preserve the signed structure".into() });
    }
    let Some(fg) = &pb.fiber.flag else {
        return Ok(Decision::Inapplicable { reason: "fiber is not a flag graph".into() });
    };
    let Some(dec) = decompose_graph_map(fg, &tw) else {
        return Ok(Decision::Inapplicable { reason: "twist is not a product of a Weyl and a diagram automorphism".into() });
    };
    if dec.outer.is_identity() {
        return Ok(Decision::Realizable { w: dec.w.word_string() });
    }
    let h2_surjective = if with_certificate { Some(fiber_inclusion_h2_surjective(pb)?) } else { None };
    Ok(Decision::NotRealizable { residual: dec.outer.describe(&fg.rs), h2_surjective })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FiberJson {
    Desc(String),
    Inline(GraphJson),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeIsoJson {
    pub psi: Vec<IntVector>,
}

/// On-disk bundle. Flag fibers take one initial label per positive root; inline fibers
/// take one per edge or default to their own signed labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleJson {
    pub base_weights: Vec<IntVector>,
    pub fiber: FiberJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_labels: Option<Vec<IntVector>>,
    pub edge_isos: Vec<EdgeIsoJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gluing: Option<BTreeMap<String, String>>,
}

pub fn matrix_from_rows(rows: &[IntVector], m: usize) -> Result<LatticeAuto, BundleError> {
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(BundleError::BadInput(format!("lattice map must be {m}x{m}")));
    }
    Ok(LatticeAuto::new(IntMatrix::from_rows(rows, m))?)
}

impl BundleJson {
    pub fn to_bundle(&self) -> Result<PolygonBundle, BundleError> {
        let m = self.base_weights.first().map(IntVector::len).ok_or_else(|| BundleError::BadInput("no base weights".into()))?;
        let fiber = match &self.fiber {
            FiberJson::Desc(d) => Fiber::flag(d)?,
            FiberJson::Inline(j) => Fiber::inline(j)?,
        };
        let isos = self.edge_isos.iter().map(|e| matrix_from_rows(&e.psi, m)).collect::<Result<Vec<_>, _>>()?;
        let gluing = match &self.gluing {
            None => None,
            Some(map) => {
                let mut out = vec![usize::MAX; fiber.graph.vertex_count()];
                for (k, v) in map {
                    let a = fiber.graph.vertex_index(k).ok_or_else(|| BundleError::BadInput(format!("unknown vertex {k}")))?;
                    let b = fiber.graph.vertex_index(v).ok_or_else(|| BundleError::BadInput(format!("unknown vertex {v}")))?;
                    out[a] = b;
                }
                if out.contains(&usize::MAX) {
                    return Err(BundleError::BadInput("gluing is not total".into()));
                }
                Some(out)
            }
        };
        match (&fiber.flag, &self.initial_labels) {
            (Some(_), Some(roots)) => PolygonBundle::from_roots(self.base_weights.clone(), fiber, roots.clone(), isos, gluing),
            (Some(_), None) => Err(BundleError::BadInput("flag fibers need initial labels".into())),
            (None, labels) => {
                let lift = match labels {
                    Some(per_edge) => {
                        if per_edge.len() * 2 != fiber.graph.dart_count() {
                            return Err(BundleError::BadInput("one initial label per fiber edge".into()));
                        }
                        per_edge.iter().flat_map(|l| [l.clone(), l.neg()]).collect()
                    }
                    None => match &fiber.source {
                        FiberSource::Inline(j) => {
                            GraphData::from_json(j)?
                                .signed
                                .ok_or_else(|| BundleError::BadInput("inline fiber needs sign lifts".into()))?
                                .lift
                        }
                        FiberSource::Flag(_) => unreachable!("flag fibers are handled above"),
                    },
                };
                PolygonBundle::new(self.base_weights.clone(), fiber, SignedAxial { lift }, isos, gluing)
            }
        }
    }

    pub fn from_bundle(pb: &PolygonBundle) -> BundleJson {
        let fiber = match &pb.fiber.source {
            FiberSource::Flag(d) => FiberJson::Desc(d.clone()),
            FiberSource::Inline(j) => FiberJson::Inline(j.clone()),
        };
        let initial_labels = match &pb.root_labels {
            Some(r) => Some(r.clone()),
            None => Some(pb.initial_labels.lift.iter().step_by(2).cloned().collect()),
        };
        let g = &pb.fiber.graph;
        let gluing =
            pb.gluing.as_ref().map(|gl| gl.iter().enumerate().map(|(a, &b)| (g.vertices()[a].clone(), g.vertices()[b].clone())).collect());
        BundleJson {
            base_weights: pb.base_weights.clone(),
            fiber,
            initial_labels,
            edge_isos: pb.edge_isos.iter().map(|p| EdgeIsoJson { psi: p.matrix().row_vectors() }).collect(),
            gluing,
        }
    }
}

/// On-disk fibration over an arbitrary base: both graphs with connections and the
/// projection by vertex names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationJson {
    pub total: GraphJson,
    pub base: GraphJson,
    pub projection: BTreeMap<String, String>,
}

impl FibrationJson {
    pub fn to_fibration(&self) -> Result<Fibration, BundleError> {
        let t = GraphData::from_json(&self.total)?;
        let b = GraphData::from_json(&self.base)?;
        let total_conn = t.connection.ok_or_else(|| BundleError::BadInput("total graph needs a connection".into()))?;
        let base_conn = b.connection.ok_or_else(|| BundleError::BadInput("base graph needs a connection".into()))?;
        let mut vmap = vec![usize::MAX; t.graph.vertex_count()];
        for (k, v) in &self.projection {
            let a = t.graph.vertex_index(k).ok_or_else(|| BundleError::BadInput(format!("unknown vertex {k}")))?;
            vmap[a] = b.graph.vertex_index(v).ok_or_else(|| BundleError::BadInput(format!("unknown base vertex {v}")))?;
        }
        if vmap.contains(&usize::MAX) {
            return Err(BundleError::BadInput("projection is not total".into()));
        }
        let proj = GraphMorphism::from_vertex_map(&t.graph, &b.graph, vmap)?;
        Ok(Fibration { total: t.graph, total_conn, total_signed: t.signed, base: b.graph, base_conn, proj })
    }

    pub fn from_fibration(f: &Fibration) -> FibrationJson {
        let total = GraphData { graph: f.total.clone(), signed: f.total_signed.clone(), connection: Some(f.total_conn.clone()) }.to_json();
        let base = GraphData { graph: f.base.clone(), signed: None, connection: Some(f.base_conn.clone()) }.to_json();
        let projection =
            (0..f.total.vertex_count()).map(|v| (f.total.vertices()[v].clone(), f.base.vertices()[f.proj.vertex_map[v]].clone())).collect();
        FibrationJson { total, base, projection }
    }
}

/// `Ψ` with `Ψ(β) − β ∈ Zα` for every `β`, i.e. fixing `ker α` in the dual picture.
pub fn fixes_kernel(psi: &LatticeAuto, alpha: &IntVector) -> bool {
    let m = psi.rank();
    (0..m).all(|j| {
        let e = IntVector::unit(m, j);
        let diff = psi.apply(&e).sub(&e);
        diff.is_zero() || diff.integer_multiple_of(alpha).is_some()
    })
}

/// Product bundle: every `Ψ_i` is the identity.
pub fn product_bundle(desc: &str, base_weights: Vec<IntVector>, root_labels: Vec<IntVector>) -> Result<PolygonBundle, BundleError> {
    let m = base_weights.first().map(IntVector::len).unwrap_or(0);
    let n = base_weights.len();
    PolygonBundle::from_roots(base_weights, Fiber::flag(desc)?, root_labels, vec![LatticeAuto::identity(m); n], None)
}
