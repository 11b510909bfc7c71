//! Connection-preserving automorphisms of GKM graphs: validation, reconstruction from
//! the data at one vertex, enumeration on flag graphs, and the splitting of a signed
//! automorphism into a left multiplication and a diagram automorphism.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_lattice::{canonicalize, IntMatrix, IntVector, LatticeAuto};
use crate::flag_builder::{left_mult_automorphism, type2_automorphism, FlagGraph};
use crate::gkm_graph::{Connection, GkmGraph, GraphError, SignedAxial};
use crate::root_weyl::{dynkin_automorphisms, max_weyl_bound, DynkinAuto, WeylElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutoError {
    #[error("seed star map is not label-equivariant under psi")]
    IncompatibleSeed,
    #[error("residual lattice map is not a diagram automorphism")]
    NotTypeTwoResidual,
    #[error("search space of size {size} exceeds the bound {bound}")]
    BoundExceeded { size: u128, bound: usize },
    #[error("no automorphism with the given data")]
    NoCompletion,
    #[error("malformed automorphism data: {0}")]
    BadInput(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A graph automorphism together with its lattice map: `α(Φ(e)) = ±Ψ(α(e))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkmAutomorphism {
    pub vertex_map: Vec<usize>,
    pub dart_map: Vec<usize>,
    pub psi: LatticeAuto,
}

impl GkmAutomorphism {
    pub fn identity(g: &GkmGraph) -> Self {
        GkmAutomorphism {
            vertex_map: (0..g.vertex_count()).collect(),
            dart_map: (0..g.dart_count()).collect(),
            psi: LatticeAuto::identity(g.rank()),
        }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &GkmAutomorphism) -> GkmAutomorphism {
        GkmAutomorphism {
            vertex_map: other.vertex_map.iter().map(|&v| self.vertex_map[v]).collect(),
            dart_map: other.dart_map.iter().map(|&d| self.dart_map[d]).collect(),
            psi: self.psi.compose(&other.psi),
        }
    }

    pub fn inverse(&self) -> GkmAutomorphism {
        let mut vertex_map = vec![0; self.vertex_map.len()];
        for (v, &w) in self.vertex_map.iter().enumerate() {
            vertex_map[w] = v;
        }
        let mut dart_map = vec![0; self.dart_map.len()];
        for (d, &e) in self.dart_map.iter().enumerate() {
            dart_map[e] = d;
        }
        GkmAutomorphism { vertex_map, dart_map, psi: self.psi.inverse() }
    }

    /// Same underlying graph map, ignoring the lattice map.
    pub fn same_graph_map(&self, other: &GkmAutomorphism) -> bool {
        self.vertex_map == other.vertex_map && self.dart_map == other.dart_map
    }

    pub fn is_identity_map(&self) -> bool {
        self.vertex_map.iter().enumerate().all(|(i, &v)| i == v) && self.dart_map.iter().enumerate().all(|(i, &d)| i == d)
    }

    fn fingerprint(&self) -> (&[usize], &[usize]) {
        (&self.vertex_map, &self.dart_map)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutoViolation {
    WrongSize,
    NotBijective,
    IncidenceBroken { dart: usize },
    PartnerBroken { dart: usize },
    LabelMismatch { dart: usize },
    ConnectionNotPreserved { e: usize, f: usize },
    SignMismatch { dart: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AutoReport {
    pub violations: Vec<AutoViolation>,
}

impl AutoReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn is_permutation(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    for &x in map {
        if x >= map.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

pub fn validate_automorphism(g: &GkmGraph, phi: &GkmAutomorphism, conn: &Connection, signed: Option<&SignedAxial>) -> AutoReport {
    let mut violations = Vec::new();
    if phi.vertex_map.len() != g.vertex_count() || phi.dart_map.len() != g.dart_count() || phi.psi.rank() != g.rank() {
        return AutoReport { violations: vec![AutoViolation::WrongSize] };
    }
    if !is_permutation(&phi.vertex_map) || !is_permutation(&phi.dart_map) {
        return AutoReport { violations: vec![AutoViolation::NotBijective] };
    }
    for d in 0..g.dart_count() {
        let image = phi.dart_map[d];
        if g.source(image) != phi.vertex_map[g.source(d)] || g.target(image) != phi.vertex_map[g.target(d)] {
            violations.push(AutoViolation::IncidenceBroken { dart: d });
        }
        if phi.dart_map[g.partner(d)] != g.partner(image) {
            violations.push(AutoViolation::PartnerBroken { dart: d });
        }
        let moved = phi.psi.apply(g.label(d));
        if canonicalize(&moved).ok().as_ref() != Some(g.axial(image)) {
            violations.push(AutoViolation::LabelMismatch { dart: d });
        }
        if let Some(s) = signed {
            if phi.psi.apply(s.get(d)) != *s.get(image) {
                violations.push(AutoViolation::SignMismatch { dart: d });
            }
        }
    }
    for e in 0..g.dart_count() {
        for &f in g.star(g.source(e)) {
            let lhs = conn.get(e, f).map(|x| phi.dart_map[x]);
            let rhs = conn.get(phi.dart_map[e], phi.dart_map[f]);
            if lhs.is_none() || lhs != rhs {
                violations.push(AutoViolation::ConnectionNotPreserved { e, f });
            }
        }
    }
    AutoReport { violations }
}

/// Extends the data at one vertex along the connection: `Φ(∇_e f) = ∇_{Φ(e)} Φ(f)`.
///
/// Returns `None` when the extension runs into a conflict or the result is not a valid
/// automorphism; by rigidity a valid completion is unique.
pub fn propagate(
    g: &GkmGraph,
    conn: &Connection,
    seed_vertex: usize,
    seed_image: usize,
    seed_star: &BTreeMap<usize, usize>,
    psi: &LatticeAuto,
) -> Result<Option<GkmAutomorphism>, AutoError> {
    let star = g.star(seed_vertex);
    if seed_star.len() != star.len() || star.iter().any(|d| !seed_star.contains_key(d)) {
        return Err(AutoError::IncompatibleSeed);
    }
    let mut targets: Vec<usize> = seed_star.values().copied().collect();
    targets.sort_unstable();
    targets.dedup();
    if targets.len() != star.len() {
        return Err(AutoError::IncompatibleSeed);
    }
    for (&f, &t) in seed_star {
        if g.source(t) != seed_image {
            return Err(AutoError::IncompatibleSeed);
        }
        if canonicalize(&psi.apply(g.label(f))).ok().as_ref() != Some(g.axial(t)) {
            return Err(AutoError::IncompatibleSeed);
        }
    }
    let n = g.vertex_count();
    let mut vmap: Vec<Option<usize>> = vec![None; n];
    let mut stars: Vec<Option<BTreeMap<usize, usize>>> = vec![None; n];
    vmap[seed_vertex] = Some(seed_image);
    stars[seed_vertex] = Some(seed_star.clone());
    let mut queue = VecDeque::from([seed_vertex]);
    while let Some(v) = queue.pop_front() {
        let sv = stars[v].clone().expect("queued vertices carry a star map");
        for &e in g.star(v) {
            let fe = sv[&e];
            let u = g.target(e);
            let fu = g.target(fe);
            let mut su = BTreeMap::new();
            for &f in g.star(v) {
                let Some(src) = conn.get(e, f) else {
                    return Ok(None);
                };
                let Some(dst) = conn.get(fe, sv[&f]) else {
                    return Ok(None);
                };
                su.insert(src, dst);
            }
            match (&vmap[u], &stars[u]) {
                (Some(x), Some(existing)) => {
                    if *x != fu || *existing != su {
                        return Ok(None);
                    }
                }
                _ => {
                    vmap[u] = Some(fu);
                    stars[u] = Some(su);
                    queue.push_back(u);
                }
            }
        }
    }
    let Some(vertex_map) = vmap.into_iter().collect::<Option<Vec<usize>>>() else {
        return Ok(None);
    };
    let mut dart_map = vec![usize::MAX; g.dart_count()];
    for s in stars.into_iter().flatten() {
        for (d, t) in s {
            dart_map[d] = t;
        }
    }
    if dart_map.contains(&usize::MAX) {
        return Ok(None);
    }
    let phi = GkmAutomorphism { vertex_map, dart_map, psi: psi.clone() };
    Ok(validate_automorphism(g, &phi, conn, None).is_valid().then_some(phi))
}

/// Star map at `v` sending each dart to the dart at `image` whose label is `psi` of its
/// label; sign-exact matches win when a signed structure is supplied.
pub fn label_seed(g: &GkmGraph, signed: Option<&SignedAxial>, v: usize, image: usize, psi: &LatticeAuto) -> Option<BTreeMap<usize, usize>> {
    let mut seed = BTreeMap::new();
    for &f in g.star(v) {
        let candidates: Vec<usize> = match signed {
            Some(s) => {
                let want = psi.apply(s.get(f));
                g.star(image).iter().copied().filter(|&t| *s.get(t) == want).collect()
            }
            None => {
                let want = canonicalize(&psi.apply(g.label(f))).ok()?;
                g.star(image).iter().copied().filter(|&t| *g.axial(t) == want).collect()
            }
        };
        if candidates.len() != 1 {
            return None;
        }
        seed.insert(f, candidates[0]);
    }
    Some(seed)
}

pub fn preserves_signed_structure(s: &SignedAxial, phi: &GkmAutomorphism) -> bool {
    (0..s.lift.len()).all(|d| phi.psi.apply(s.get(d)) == *s.get(phi.dart_map[d]))
}

pub fn preserves_signed(fg: &FlagGraph, phi: &GkmAutomorphism) -> bool {
    preserves_signed_structure(&fg.signed, phi)
}

/// Lattice maps `w·d` for Weyl elements `w` and diagram automorphisms `d`.
pub fn candidate_psis(fg: &FlagGraph) -> Vec<LatticeAuto> {
    let mut out: Vec<LatticeAuto> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for d in dynkin_automorphisms(&fg.rs) {
        for w in fg.weyl.elements() {
            let m = w.matrix.compose(&d.matrix);
            if seen.insert(m.matrix().clone()) {
                out.push(m);
            }
        }
    }
    out
}

/// All connection-preserving automorphisms (optionally only the sign-preserving ones),
/// sorted by their vertex and dart maps.
pub fn enumerate_autos(fg: &FlagGraph, signed_only: bool) -> Result<Vec<GkmAutomorphism>, AutoError> {
    let psis = candidate_psis(fg);
    let size = fg.graph.vertex_count() as u128 * psis.len() as u128;
    let bound = max_weyl_bound();
    if size > bound as u128 {
        return Err(AutoError::BoundExceeded { size, bound });
    }
    let g = &fg.graph;
    let e = fg.identity_vertex();
    let mut found: Vec<GkmAutomorphism> = Vec::new();
    for u in 0..g.vertex_count() {
        for psi in &psis {
            let signed = signed_only.then_some(&fg.signed);
            let Some(seed) = label_seed(g, signed, e, u, psi) else {
                continue;
            };
            let Some(phi) = propagate(g, &fg.canonical, e, u, &seed, psi)? else {
                continue;
            };
            if signed_only && !preserves_signed(fg, &phi) {
                continue;
            }
            if !found.iter().any(|x| x.same_graph_map(&phi)) {
                found.push(phi);
            }
        }
    }
    found.sort_by(|a, b| a.fingerprint().cmp(&b.fingerprint()));
    Ok(found)
}

/// `Φ = L_w ∘ Φ_2` with `Φ_2` induced by a diagram automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDecomposition {
    /// Vertex index of `w`, i.e. `Φ([e])`.
    pub w: usize,
    pub w_element: WeylElement,
    pub outer: DynkinAuto,
}

pub fn decompose(fg: &FlagGraph, phi: &GkmAutomorphism) -> Result<TypeDecomposition, AutoError> {
    let w = phi.vertex_map[fg.identity_vertex()];
    let w_inv = fg.weyl.get(fg.weyl.inverse(w)).clone();
    let residual = left_mult_automorphism(fg, &w_inv).compose(phi);
    let outer = dynkin_automorphisms(&fg.rs).into_iter().find(|d| d.matrix == residual.psi).ok_or(AutoError::NotTypeTwoResidual)?;
    if type2_automorphism(fg, &outer) != residual {
        return Err(AutoError::NotTypeTwoResidual);
    }
    Ok(TypeDecomposition { w, w_element: fg.weyl.get(w).clone(), outer })
}

pub fn reassemble(fg: &FlagGraph, dec: &TypeDecomposition) -> GkmAutomorphism {
    left_mult_automorphism(fg, &dec.w_element).compose(&type2_automorphism(fg, &dec.outer))
}

/// On-disk automorphism: vertex map by name and the lattice map by rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutoJson {
    pub vertex_map: BTreeMap<String, String>,
    pub psi: Vec<IntVector>,
}

impl AutoJson {
    pub fn from_auto(g: &GkmGraph, phi: &GkmAutomorphism) -> Self {
        AutoJson {
            vertex_map: (0..g.vertex_count()).map(|v| (g.vertices()[v].clone(), g.vertices()[phi.vertex_map[v]].clone())).collect(),
            psi: phi.psi.matrix().row_vectors(),
        }
    }

    /// Rebuilds the dart map by propagation from the first vertex and checks the result
    /// against the stated vertex map.
    pub fn to_auto(&self, g: &GkmGraph, conn: &Connection, signed: Option<&SignedAxial>) -> Result<GkmAutomorphism, AutoError> {
        let m = g.rank();
        if self.psi.len() != m || self.psi.iter().any(|r| r.len() != m) {
            return Err(AutoError::BadInput(format!("psi must be {m}x{m}")));
        }
        let psi = LatticeAuto::new(IntMatrix::from_rows(&self.psi, m)).map_err(|e| AutoError::BadInput(e.to_string()))?;
        let mut vertex_map = vec![usize::MAX; g.vertex_count()];
        for (k, v) in &self.vertex_map {
            let a = g.vertex_index(k).ok_or_else(|| AutoError::BadInput(format!("unknown vertex {k}")))?;
            let b = g.vertex_index(v).ok_or_else(|| AutoError::BadInput(format!("unknown vertex {v}")))?;
            vertex_map[a] = b;
        }
        if vertex_map.contains(&usize::MAX) {
            return Err(AutoError::BadInput("vertex map is not total".into()));
        }
        let seed = label_seed(g, signed, 0, vertex_map[0], &psi)
            .or_else(|| label_seed(g, None, 0, vertex_map[0], &psi))
            .ok_or(AutoError::IncompatibleSeed)?;
        let phi = propagate(g, conn, 0, vertex_map[0], &seed, &psi)?.ok_or(AutoError::NoCompletion)?;
        if phi.vertex_map != vertex_map {
            return Err(AutoError::NoCompletion);
        }
        Ok(phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag_builder::build_flag_graph;
    use crate::root_weyl::root_system;

    fn flag(d: &str) -> FlagGraph {
        build_flag_graph(&root_system(d).unwrap()).unwrap()
    }

    #[test]
    fn signed_group_orders() {
        assert_eq!(enumerate_autos(&flag("A2"), true).unwrap().len(), 12);
        assert_eq!(enumerate_autos(&flag("A1xA1xA1"), true).unwrap().len(), 48);
        assert_eq!(enumerate_autos(&flag("A1"), true).unwrap().len(), 2);
        assert_eq!(enumerate_autos(&flag("A1"), false).unwrap().len(), 2);
    }

    #[test]
    fn identity_and_propagation() {
        let fg = flag("A2");
        let id = GkmAutomorphism::identity(&fg.graph);
        assert!(validate_automorphism(&fg.graph, &id, &fg.canonical, Some(&fg.signed)).is_valid());
        let flip = dynkin_automorphisms(&fg.rs).pop().unwrap();
        let t2 = type2_automorphism(&fg, &flip);
        let seed: BTreeMap<usize, usize> = fg.graph.star(0).iter().map(|&d| (d, t2.dart_map[d])).collect();
        let rebuilt = propagate(&fg.graph, &fg.canonical, 0, 0, &seed, &flip.matrix).unwrap().unwrap();
        assert_eq!(rebuilt, t2);
    }

    #[test]
    fn inconsistent_seed_is_rejected() {
        let fg = flag("A2");
        let star = fg.graph.star(0).to_vec();
        // swap two darts whose labels differ under the identity
        let seed: BTreeMap<usize, usize> = [(star[0], star[1]), (star[1], star[0]), (star[2], star[2])].into_iter().collect();
        assert_eq!(propagate(&fg.graph, &fg.canonical, 0, 0, &seed, &LatticeAuto::identity(2)), Err(AutoError::IncompatibleSeed));
    }
}
