//! Dart-based labeled multigraphs with axial functions, connections and signed
//! structures, plus the validity checks and the JSON / DOT formats.
//!
//! Every undirected edge is stored as two darts that are each other's partner. Darts
//! built from an edge record `id` are named `id` and `id~rev`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_lattice::{canonicalize, combinations, rank_over_rationals, IntVector, ProjectiveWeight};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown dart {0}")]
    UnknownDart(String),
    #[error("duplicate identifier {0}")]
    DuplicateId(String),
    #[error("edge {0} has the zero weight")]
    ZeroWeight(String),
    #[error("weight of {id} has length {found}, expected {expected}")]
    DimensionMismatch { id: String, expected: usize, found: usize },
    #[error("sign lift of {0} does not match its weight")]
    LiftMismatch(String),
    #[error("connection has no entry for ∇ along {along} applied to {dart}")]
    MissingConnectionEntry { along: String, dart: String },
    #[error("k = {k} exceeds the valence {valence}")]
    KTooLarge { k: usize, valence: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dart {
    pub id: String,
    pub source: usize,
    pub target: usize,
    pub partner: usize,
}

/// Input record for one undirected edge; `weight` is the label of the dart
/// `source → target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpec {
    pub id: String,
    pub source: usize,
    pub target: usize,
    pub weight: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkmGraph {
    rank: usize,
    vertices: Vec<String>,
    darts: Vec<Dart>,
    axial: Vec<ProjectiveWeight>,
    valence: usize,
    stars: Vec<Vec<usize>>,
}

pub fn reverse_id(id: &str) -> String {
    format!("{id}~rev")
}

impl GkmGraph {
    /// Builds the graph, dart `2k` being edge `k` as given and `2k+1` its reverse.
    pub fn from_edges(rank: usize, vertices: Vec<String>, edges: &[EdgeSpec]) -> Result<Self, GraphError> {
        let mut seen = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if seen.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateId(v.clone()));
            }
        }
        let mut darts = Vec::with_capacity(2 * edges.len());
        let mut axial = Vec::with_capacity(2 * edges.len());
        let mut ids = std::collections::HashSet::new();
        for e in edges {
            if e.source >= vertices.len() {
                return Err(GraphError::UnknownVertex(e.source.to_string()));
            }
            if e.target >= vertices.len() {
                return Err(GraphError::UnknownVertex(e.target.to_string()));
            }
            if e.weight.len() != rank {
                return Err(GraphError::DimensionMismatch { id: e.id.clone(), expected: rank, found: e.weight.len() });
            }
            let w = canonicalize(&e.weight).map_err(|_| GraphError::ZeroWeight(e.id.clone()))?;
            let rev = reverse_id(&e.id);
            for id in [&e.id, &rev] {
                if !ids.insert(id.clone()) {
                    return Err(GraphError::DuplicateId(id.clone()));
                }
            }
            let k = darts.len();
            darts.push(Dart { id: e.id.clone(), source: e.source, target: e.target, partner: k + 1 });
            darts.push(Dart { id: rev, source: e.target, target: e.source, partner: k });
            axial.push(w.clone());
            axial.push(w);
        }
        let mut g = GkmGraph { rank, vertices, darts, axial, valence: 0, stars: Vec::new() };
        g.rebuild_stars();
        g.valence = g.stars.first().map_or(0, Vec::len);
        Ok(g)
    }

    /// Unchecked assembly from raw parts; [`validate_graph`] reports whatever is wrong.
    pub fn from_parts(rank: usize, vertices: Vec<String>, darts: Vec<Dart>, axial: Vec<ProjectiveWeight>, valence: usize) -> Self {
        assert_eq!(darts.len(), axial.len(), "one label per dart");
        let mut g = GkmGraph { rank, vertices, darts, axial, valence, stars: Vec::new() };
        g.rebuild_stars();
        g
    }

    fn rebuild_stars(&mut self) {
        let mut stars = vec![Vec::new(); self.vertices.len()];
        for (i, d) in self.darts.iter().enumerate() {
            if d.source < stars.len() {
                stars[d.source].push(i);
            }
        }
        self.stars = stars;
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn dart_count(&self) -> usize {
        self.darts.len()
    }

    pub fn dart(&self, d: usize) -> &Dart {
        &self.darts[d]
    }

    pub fn dart_index(&self, id: &str) -> Option<usize> {
        self.darts.iter().position(|d| d.id == id)
    }

    pub fn source(&self, d: usize) -> usize {
        self.darts[d].source
    }

    pub fn target(&self, d: usize) -> usize {
        self.darts[d].target
    }

    pub fn partner(&self, d: usize) -> usize {
        self.darts[d].partner
    }

    pub fn axial(&self, d: usize) -> &ProjectiveWeight {
        &self.axial[d]
    }

    /// Canonical representative of the label of `d`.
    pub fn label(&self, d: usize) -> &IntVector {
        self.axial[d].rep()
    }

    pub fn star(&self, v: usize) -> &[usize] {
        &self.stars[v]
    }

    pub fn valence(&self) -> usize {
        self.valence
    }

    /// One dart per undirected edge (the one with the smaller index).
    pub fn edge_darts(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.darts.len()).filter(move |&d| d < self.darts[d].partner)
    }

    pub fn edge_count(&self) -> usize {
        self.edge_darts().count()
    }

    /// Darts from `u` to `v`.
    pub fn darts_between(&self, u: usize, v: usize) -> Vec<usize> {
        self.stars[u].iter().copied().filter(|&d| self.darts[d].target == v).collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &d in &self.stars[v] {
                let t = self.darts[d].target;
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Sign lift of the axial function, indexed by dart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedAxial {
    pub lift: Vec<IntVector>,
}

impl SignedAxial {
    pub fn get(&self, d: usize) -> &IntVector {
        &self.lift[d]
    }

    /// Drops the signs.
    pub fn forget(&self) -> Vec<ProjectiveWeight> {
        self.lift.iter().map(|v| canonicalize(v).expect("signed labels are nonzero")).collect()
    }
}

/// For each dart `e`, a bijection from the star at `source(e)` to the star at `target(e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    along: Vec<BTreeMap<usize, usize>>,
}

impl Connection {
    pub fn empty(dart_count: usize) -> Self {
        Connection { along: vec![BTreeMap::new(); dart_count] }
    }

    pub fn set(&mut self, e: usize, f: usize, image: usize) {
        self.along[e].insert(f, image);
    }

    /// `∇_e f`
    pub fn get(&self, e: usize, f: usize) -> Option<usize> {
        self.along.get(e)?.get(&f).copied()
    }

    pub fn map_along(&self, e: usize) -> &BTreeMap<usize, usize> {
        &self.along[e]
    }

    pub fn dart_count(&self) -> usize {
        self.along.len()
    }

    /// Entry lookup that names the missing pair on failure.
    pub fn require(&self, g: &GkmGraph, e: usize, f: usize) -> Result<usize, GraphError> {
        self.get(e, f).ok_or_else(|| GraphError::MissingConnectionEntry { along: g.dart(e).id.clone(), dart: g.dart(f).id.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphViolation {
    Loop { dart: usize },
    ValenceMismatch { vertex: usize, degree: usize },
    BrokenInvolution { dart: usize },
    DependentAdjacentLabels { vertex: usize, darts: (usize, usize) },
    AsymmetricLabels { dart: usize },
    WrongLabelLength { dart: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphReport {
    pub violations: Vec<GraphViolation>,
}

impl GraphReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_graph(g: &GkmGraph) -> GraphReport {
    let mut violations = Vec::new();
    let n = g.darts.len();
    for (i, d) in g.darts.iter().enumerate() {
        if d.source == d.target {
            violations.push(GraphViolation::Loop { dart: i });
        }
        let p = d.partner;
        let ok = p < n && p != i && g.darts[p].partner == i && g.darts[p].source == d.target && g.darts[p].target == d.source;
        if !ok {
            violations.push(GraphViolation::BrokenInvolution { dart: i });
        } else if g.axial[p] != g.axial[i] {
            violations.push(GraphViolation::AsymmetricLabels { dart: i });
        }
        if g.axial[i].rep().len() != g.rank {
            violations.push(GraphViolation::WrongLabelLength { dart: i });
        }
    }
    for v in 0..g.vertices.len() {
        let star = &g.stars[v];
        if star.len() != g.valence {
            violations.push(GraphViolation::ValenceMismatch { vertex: v, degree: star.len() });
        }
        for (ai, &a) in star.iter().enumerate() {
            for &b in &star[ai + 1..] {
                let la = g.label(a);
                let lb = g.label(b);
                if la.len() == lb.len() && rank_over_rationals(&[la.clone(), lb.clone()]).unwrap_or(0) < 2 {
                    violations.push(GraphViolation::DependentAdjacentLabels { vertex: v, darts: (a, b) });
                }
            }
        }
    }
    GraphReport { violations }
}

/// Solves `t = ε b + c a` exactly, using an invertible 2×2 minor of `(b, a)`.
pub fn solve_eps_c(a: &IntVector, b: &IntVector, t: &IntVector) -> Option<(BigRational, BigRational)> {
    let m = a.len();
    for i in 0..m {
        for j in i + 1..m {
            let det = &b.0[i] * &a.0[j] - &b.0[j] * &a.0[i];
            if det.is_zero() {
                continue;
            }
            let eps = BigRational::new(&t.0[i] * &a.0[j] - &t.0[j] * &a.0[i], det.clone());
            let c = BigRational::new(&b.0[i] * &t.0[j] - &b.0[j] * &t.0[i], det);
            let consistent = (0..m).all(|k| {
                &eps * BigRational::from_integer(b.0[k].clone()) + &c * BigRational::from_integer(a.0[k].clone())
                    == BigRational::from_integer(t.0[k].clone())
            });
            return consistent.then_some((eps, c));
        }
    }
    None
}

fn coefficients_ok(sol: &Option<(BigRational, BigRational)>, signed: bool) -> bool {
    match sol {
        None => false,
        Some((eps, c)) => {
            let eps_ok = if signed { eps.is_one() } else { eps.abs().is_one() };
            eps_ok && c.is_integer()
        }
    }
}

/// One evaluated connection triple `α(∇_e f) = ε α(f) + c α(e)` at `vertex`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionTriple {
    pub vertex: usize,
    pub e: usize,
    pub f: usize,
    pub image: usize,
    /// `(ε, c)`, absent when the system has no solution.
    pub solution: Option<(BigRational, BigRational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConnectionViolation {
    /// `∇_e e` is not the partner of `e`.
    NotReversing {
        e: usize,
    },
    /// `∇_e f` does not start at the target of `e`.
    WrongEndpoint {
        e: usize,
        f: usize,
    },
    NotBijective {
        e: usize,
    },
    /// `∇_{ē}` is not the inverse of `∇_e`.
    NotInverse {
        e: usize,
        f: usize,
    },
    BadCoefficients(ConnectionTriple),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompatibilityReport {
    pub triples: Vec<ConnectionTriple>,
    pub violations: Vec<ConnectionViolation>,
}

impl CompatibilityReport {
    pub fn is_compatible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn triple(&self, e: usize, f: usize) -> Option<&ConnectionTriple> {
        self.triples.iter().find(|t| t.e == e && t.f == f)
    }
}

fn label_for<'a>(g: &'a GkmGraph, signed: Option<&'a SignedAxial>, d: usize) -> &'a IntVector {
    match signed {
        Some(s) => s.get(d),
        None => g.label(d),
    }
}

pub fn check_connection_compatibility(
    g: &GkmGraph,
    c: &Connection,
    signed: Option<&SignedAxial>,
) -> Result<CompatibilityReport, GraphError> {
    let mut report = CompatibilityReport::default();
    for e in 0..g.dart_count() {
        let (v, w) = (g.source(e), g.target(e));
        let mut images = Vec::new();
        for &f in g.star(v) {
            let image = c.require(g, e, f)?;
            images.push(image);
            if g.source(image) != w {
                report.violations.push(ConnectionViolation::WrongEndpoint { e, f });
                continue;
            }
            if c.get(g.partner(e), image) != Some(f) {
                report.violations.push(ConnectionViolation::NotInverse { e, f });
            }
            if f == e {
                if image != g.partner(e) {
                    report.violations.push(ConnectionViolation::NotReversing { e });
                }
                continue;
            }
            let triple = ConnectionTriple {
                vertex: v,
                e,
                f,
                image,
                solution: solve_eps_c(label_for(g, signed, e), label_for(g, signed, f), label_for(g, signed, image)),
            };
            if !coefficients_ok(&triple.solution, signed.is_some()) {
                report.violations.push(ConnectionViolation::BadCoefficients(triple.clone()));
            }
            report.triples.push(triple);
        }
        let mut sorted = images.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != images.len() {
            report.violations.push(ConnectionViolation::NotBijective { e });
        }
    }
    Ok(report)
}

/// All compatible star bijections along the representative dart `e` (with `e ↦ ē`).
fn edge_options(g: &GkmGraph, e: usize) -> Vec<Vec<(usize, usize)>> {
    let (v, w) = (g.source(e), g.target(e));
    let ebar = g.partner(e);
    let sources: Vec<usize> = g.star(v).iter().copied().filter(|&f| f != e).collect();
    let targets: Vec<usize> = g.star(w).iter().copied().filter(|&t| t != ebar).collect();
    let allowed: Vec<Vec<usize>> = sources
        .iter()
        .map(|&f| targets.iter().copied().filter(|&t| coefficients_ok(&solve_eps_c(g.label(e), g.label(f), g.label(t)), false)).collect())
        .collect();
    let mut out = Vec::new();
    let mut used = vec![false; targets.len()];
    let mut cur = Vec::new();
    fn rec(
        k: usize,
        sources: &[usize],
        targets: &[usize],
        allowed: &[Vec<usize>],
        used: &mut [bool],
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if k == sources.len() {
            out.push(cur.clone());
            return;
        }
        for &t in &allowed[k] {
            let ti = targets.iter().position(|&x| x == t).unwrap();
            if used[ti] {
                continue;
            }
            used[ti] = true;
            cur.push((sources[k], t));
            rec(k + 1, sources, targets, allowed, used, cur, out);
            cur.pop();
            used[ti] = false;
        }
    }
    if sources.len() == targets.len() {
        rec(0, &sources, &targets, &allowed, &mut used, &mut cur, &mut out);
    }
    for opt in &mut out {
        opt.push((e, ebar));
    }
    out
}

/// Exhaustive search for compatible connections, returning at most `limit`.
///
/// Compatibility along `e` only involves `∇_e`, and `∇_{ē}` is its inverse, so the
/// solutions are a product over edges of per-edge choices.
pub fn find_compatible_connections(g: &GkmGraph, limit: usize) -> Vec<Connection> {
    let edges: Vec<usize> = g.edge_darts().collect();
    let options: Vec<Vec<Vec<(usize, usize)>>> = edges.iter().map(|&e| edge_options(g, e)).collect();
    if limit == 0 || options.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; edges.len()];
    loop {
        let mut c = Connection::empty(g.dart_count());
        for (k, &e) in edges.iter().enumerate() {
            let ebar = g.partner(e);
            for &(f, t) in &options[k][idx[k]] {
                c.set(e, f, t);
                c.set(ebar, t, f);
            }
        }
        out.push(c);
        if out.len() >= limit {
            break;
        }
        // odometer step
        let mut k = 0;
        loop {
            if k == edges.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
    out
}

/// Number of compatible connections (saturating), without materializing them.
pub fn count_compatible_connections(g: &GkmGraph) -> u128 {
    g.edge_darts().map(|e| edge_options(g, e).len() as u128).fold(1u128, |a, b| a.saturating_mul(b))
}

pub fn is_gkm_k(g: &GkmGraph, k: usize) -> Result<bool, GraphError> {
    if k > g.valence() {
        return Err(GraphError::KTooLarge { k, valence: g.valence() });
    }
    for v in 0..g.vertex_count() {
        let star = g.star(v);
        for subset in combinations(star.len(), k) {
            let labels: Vec<IntVector> = subset.iter().map(|&i| g.label(star[i]).clone()).collect();
            if rank_over_rationals(&labels).unwrap_or(0) < k {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn check_signed(g: &GkmGraph, s: &SignedAxial, c: &Connection) -> Result<bool, GraphError> {
    if s.lift.len() != g.dart_count() {
        return Ok(false);
    }
    for d in 0..g.dart_count() {
        if s.get(g.partner(d)) != &s.get(d).neg() {
            return Ok(false);
        }
        match canonicalize(s.get(d)) {
            Ok(w) if &w == g.axial(d) => {}
            _ => return Ok(false),
        }
    }
    Ok(check_connection_compatibility(g, c, Some(s))?.is_compatible())
}

/// Renders a weight with the variables `x, y, z, w_4, w_5, …`.
pub fn weight_string(v: &IntVector) -> String {
    let var = |i: usize| match i {
        0 => "x".to_string(),
        1 => "y".to_string(),
        2 => "z".to_string(),
        _ => format!("w_{}", i + 1),
    };
    let mut out = String::new();
    for (i, a) in v.0.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let mag = a.abs();
        if a.is_negative() {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        if mag != BigInt::one() {
            out.push_str(&mag.to_string());
        }
        out.push_str(&var(i));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: String,
    pub source: String,
    pub target: String,
    pub weight: IntVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_lift: Option<IntVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionEntryJson {
    pub along_dart: String,
    pub maps: Vec<[String; 2]>,
}

/// On-disk graph format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub rank: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<Vec<ConnectionEntryJson>>,
}

/// A graph with its optional signed structure and connection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphData {
    pub graph: GkmGraph,
    pub signed: Option<SignedAxial>,
    pub connection: Option<Connection>,
}

impl GraphData {
    pub fn to_json(&self) -> GraphJson {
        let g = &self.graph;
        let edges = g
            .edge_darts()
            .map(|d| EdgeJson {
                id: g.dart(d).id.clone(),
                source: g.vertices()[g.source(d)].clone(),
                target: g.vertices()[g.target(d)].clone(),
                weight: g.label(d).clone(),
                sign_lift: self.signed.as_ref().map(|s| s.get(d).clone()),
            })
            .collect();
        let connection = self.connection.as_ref().map(|c| {
            (0..g.dart_count())
                .map(|e| ConnectionEntryJson {
                    along_dart: g.dart(e).id.clone(),
                    maps: c.map_along(e).iter().map(|(&f, &t)| [g.dart(f).id.clone(), g.dart(t).id.clone()]).collect(),
                })
                .collect()
        });
        GraphJson { rank: g.rank(), vertices: g.vertices().to_vec(), edges, connection }
    }

    pub fn from_json(j: &GraphJson) -> Result<Self, GraphError> {
        let vidx = |name: &str| j.vertices.iter().position(|v| v == name).ok_or_else(|| GraphError::UnknownVertex(name.to_string()));
        let mut specs = Vec::new();
        for e in &j.edges {
            specs.push(EdgeSpec { id: e.id.clone(), source: vidx(&e.source)?, target: vidx(&e.target)?, weight: e.weight.clone() });
        }
        let graph = GkmGraph::from_edges(j.rank, j.vertices.clone(), &specs)?;
        let signed = if !j.edges.is_empty() && j.edges.iter().all(|e| e.sign_lift.is_some()) {
            let mut lift = vec![IntVector::zeros(j.rank); graph.dart_count()];
            for (k, e) in j.edges.iter().enumerate() {
                let l = e.sign_lift.clone().unwrap();
                if canonicalize(&l).ok().as_ref() != Some(graph.axial(2 * k)) {
                    return Err(GraphError::LiftMismatch(e.id.clone()));
                }
                lift[2 * k + 1] = l.neg();
                lift[2 * k] = l;
            }
            Some(SignedAxial { lift })
        } else {
            None
        };
        let connection = match &j.connection {
            None => None,
            Some(entries) => {
                let didx = |id: &str| graph.dart_index(id).ok_or_else(|| GraphError::UnknownDart(id.to_string()));
                let mut c = Connection::empty(graph.dart_count());
                for entry in entries {
                    let e = didx(&entry.along_dart)?;
                    for [f, t] in &entry.maps {
                        c.set(e, didx(f)?, didx(t)?);
                    }
                }
                Some(c)
            }
        };
        Ok(GraphData { graph, signed, connection })
    }
}

/// Graphviz text with one undirected edge per dart pair.
pub fn to_dot(g: &GkmGraph, signed: Option<&SignedAxial>, name: &str) -> String {
    let mut out = format!("graph \"{name}\" {{\n");
    for v in g.vertices() {
        out.push_str(&format!("  \"{v}\";\n"));
    }
    for d in g.edge_darts() {
        out.push_str(&format!(
            "  \"{}\" -- \"{}\" [label=\"{}\"];\n",
            g.vertices()[g.source(d)],
            g.vertices()[g.target(d)],
            weight_string(label_for(g, signed, d))
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> IntVector {
        IntVector::from_i64s(xs)
    }

    fn single_edge() -> GkmGraph {
        GkmGraph::from_edges(1, vec!["p".into(), "q".into()], &[EdgeSpec { id: "e".into(), source: 0, target: 1, weight: v(&[1]) }])
            .unwrap()
    }

    #[test]
    fn single_edge_is_valid_with_one_connection() {
        let g = single_edge();
        assert!(validate_graph(&g).is_valid());
        assert_eq!(g.dart(1).id, "e~rev");
        assert_eq!(find_compatible_connections(&g, 10).len(), 1);
    }

    #[test]
    fn colinear_labels_are_reported() {
        let g = GkmGraph::from_edges(
            2,
            vec!["a".into(), "b".into(), "c".into()],
            &[
                EdgeSpec { id: "e".into(), source: 0, target: 1, weight: v(&[1, 0]) },
                EdgeSpec { id: "f".into(), source: 0, target: 2, weight: v(&[2, 0]) },
            ],
        )
        .unwrap();
        let r = validate_graph(&g);
        assert!(r.violations.iter().any(|x| matches!(x, GraphViolation::DependentAdjacentLabels { vertex: 0, .. })));
    }

    #[test]
    fn broken_parts_are_reported() {
        let w = canonicalize(&v(&[1])).unwrap();
        let darts =
            vec![Dart { id: "a".into(), source: 0, target: 0, partner: 1 }, Dart { id: "b".into(), source: 0, target: 1, partner: 1 }];
        let g = GkmGraph::from_parts(1, vec!["p".into(), "q".into()], darts, vec![w.clone(), w], 1);
        let r = validate_graph(&g);
        assert!(r.violations.contains(&GraphViolation::Loop { dart: 0 }));
        assert!(r.violations.contains(&GraphViolation::BrokenInvolution { dart: 1 }));
        assert!(r.violations.iter().any(|x| matches!(x, GraphViolation::ValenceMismatch { .. })));
    }

    #[test]
    fn eps_c_solve() {
        let (eps, c) = solve_eps_c(&v(&[1, 0]), &v(&[0, 1]), &v(&[1, 1])).unwrap();
        assert!(eps.is_one());
        assert!(c.is_one());
        assert!(solve_eps_c(&v(&[1, 0, 0]), &v(&[0, 1, 0]), &v(&[0, 0, 1])).is_none());
    }

    #[test]
    fn weight_strings() {
        assert_eq!(weight_string(&v(&[1, 2, 0])), "x+2y");
        assert_eq!(weight_string(&v(&[-1, 0, 1])), "-x+z");
        assert_eq!(weight_string(&v(&[0, 0, 0, 3])), "3w_4");
        assert_eq!(weight_string(&v(&[0, 0])), "0");
    }

    #[test]
    fn gkm_k_too_large() {
        assert_eq!(is_gkm_k(&single_edge(), 2), Err(GraphError::KTooLarge { k: 2, valence: 1 }));
        assert!(is_gkm_k(&single_edge(), 1).unwrap());
    }
}
