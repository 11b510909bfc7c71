//! Root systems of products of simple types in simple-root coordinates, their Weyl
//! groups as integer matrices, and Dynkin diagram automorphisms.
//!
//! Roots are column vectors over the simple roots, so every Weyl element is an integral
//! unimodular matrix acting on `Z^m`, `m` the total rank.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact_lattice::{IntMatrix, IntVector, LatticeAuto};

/// Default ceiling on `|W|`; `GKMKIT_MAX_WEYL` overrides it.
pub const DEFAULT_MAX_WEYL: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootError {
    #[error("bad root system descriptor: {0}")]
    BadType(String),
    #[error("unsupported simple type: {0}")]
    UnsupportedType(String),
    #[error("vector is not a root")]
    NotARoot,
    #[error("Weyl group of order {order} exceeds the bound {bound}")]
    BoundExceeded { order: u128, bound: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl SimpleType {
    fn letter(self) -> char {
        match self {
            SimpleType::A => 'A',
            SimpleType::B => 'B',
            SimpleType::C => 'C',
            SimpleType::D => 'D',
            SimpleType::E => 'E',
            SimpleType::F => 'F',
            SimpleType::G => 'G',
        }
    }
}

pub fn max_weyl_bound() -> usize {
    std::env::var("GKMKIT_MAX_WEYL").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_MAX_WEYL)
}

/// Cartan matrix `a_ij = <α_i^∨, α_j>` and half squared lengths `d_i`, so that the
/// symmetrized form is `d_i a_ij`.
fn simple_cartan(t: SimpleType, n: usize) -> Result<(Vec<Vec<i64>>, Vec<i64>), RootError> {
    let name = format!("{}{}", t.letter(), n);
    let ok = match t {
        SimpleType::A => n >= 1,
        SimpleType::B => n >= 2,
        SimpleType::C => n >= 3,
        SimpleType::D => n >= 4,
        SimpleType::G => n == 2,
        SimpleType::E => (6..=8).contains(&n),
        SimpleType::F => n == 4,
    };
    if !ok {
        return Err(RootError::BadType(name));
    }
    if matches!(t, SimpleType::E | SimpleType::F) {
        return Err(RootError::UnsupportedType(name));
    }
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut d = vec![1i64; n];
    let chain = |a: &mut Vec<Vec<i64>>, upto: usize| {
        for i in 0..upto.saturating_sub(1) {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    };
    match t {
        SimpleType::A => chain(&mut a, n),
        SimpleType::B => {
            // α_n short
            chain(&mut a, n);
            a[n - 2][n - 1] = -1;
            a[n - 1][n - 2] = -2;
            d = vec![2; n];
            d[n - 1] = 1;
        }
        SimpleType::C => {
            // α_n long
            chain(&mut a, n);
            a[n - 2][n - 1] = -2;
            a[n - 1][n - 2] = -1;
            d[n - 1] = 2;
        }
        SimpleType::D => {
            chain(&mut a, n - 1);
            a[n - 3][n - 1] = -1;
            a[n - 1][n - 3] = -1;
        }
        SimpleType::G => {
            // α_1 short, α_2 long
            a[0][1] = -3;
            a[1][0] = -1;
            d = vec![1, 3];
        }
        SimpleType::E | SimpleType::F => unreachable!(),
    }
    Ok((a, d))
}

fn factorial(n: u128) -> u128 {
    (1..=n).product()
}

fn classical_order(t: SimpleType, n: usize) -> u128 {
    let n = n as u128;
    match t {
        SimpleType::A => factorial(n + 1),
        SimpleType::B | SimpleType::C => (1u128 << n) * factorial(n),
        SimpleType::D => (1u128 << (n - 1)) * factorial(n),
        SimpleType::G => 12,
        SimpleType::F => 1152,
        SimpleType::E => match n {
            6 => 51_840,
            7 => 2_903_040,
            _ => 696_729_600,
        },
    }
}

/// A root system of a product of simple types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystemDesc {
    factors: Vec<(SimpleType, usize)>,
    rank: usize,
    cartan: IntMatrix,
    pairing: IntMatrix,
    positive: Vec<IntVector>,
    roots: Vec<IntVector>,
}

impl RootSystemDesc {
    pub fn factors(&self) -> &[(SimpleType, usize)] {
        &self.factors
    }

    /// Ambient rank `m`, the sum of factor ranks.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &IntMatrix {
        &self.cartan
    }

    /// Gram matrix of the invariant form on simple roots.
    pub fn pairing_matrix(&self) -> &IntMatrix {
        &self.pairing
    }

    /// Positive roots ordered by height, simple roots first in index order.
    pub fn positive_roots(&self) -> &[IntVector] {
        &self.positive
    }

    /// `Δ_+` followed by `−Δ_+` in the same order.
    pub fn roots(&self) -> &[IntVector] {
        &self.roots
    }

    pub fn simple_root(&self, i: usize) -> IntVector {
        IntVector::unit(self.rank, i)
    }

    pub fn pairing(&self, a: &IntVector, b: &IntVector) -> BigInt {
        a.dot(&self.pairing.apply(b))
    }

    pub fn is_root(&self, v: &IntVector) -> bool {
        self.roots.contains(v)
    }

    pub fn positive_index(&self, v: &IntVector) -> Option<usize> {
        self.positive.iter().position(|p| p == v)
    }

    /// `2<α,β>/|α|^2`, exact for roots.
    pub fn coroot_pairing(&self, beta: &IntVector, alpha: &IntVector) -> BigInt {
        let num: BigInt = self.pairing(alpha, beta) * 2;
        let den = self.pairing(alpha, alpha);
        let (q, r) = num.div_rem(&den);
        debug_assert!(r.is_zero(), "non-crystallographic pairing");
        q
    }

    /// Index ranges of the factors inside `0..m`.
    pub fn factor_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut off = 0;
        for &(_, n) in &self.factors {
            out.push(off..off + n);
            off += n;
        }
        out
    }

    pub fn weyl_order(&self) -> u128 {
        self.factors.iter().map(|&(t, n)| classical_order(t, n)).product()
    }

    pub fn descriptor(&self) -> String {
        self.factors.iter().map(|&(t, n)| format!("{}{}", t.letter(), n)).collect::<Vec<_>>().join("x")
    }

    fn simple_reflection_matrix(&self, i: usize) -> IntMatrix {
        let m = self.rank;
        let mut s = IntMatrix::identity(m);
        for j in 0..m {
            // σ_i(α_j) = α_j − a_ij α_i
            let v = s.get(i, j) - self.cartan.get(i, j);
            s.set(i, j, v);
        }
        s
    }
}

impl fmt::Display for RootSystemDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// Parses descriptors like `A2`, `a1xA1xA1`, `B2xA1`.
pub fn parse_descriptor(s: &str) -> Result<Vec<(SimpleType, usize)>, RootError> {
    let bad = || RootError::BadType(s.to_string());
    let mut out = Vec::new();
    for part in s.trim().split(['x', 'X']) {
        let mut chars = part.chars();
        let t = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => SimpleType::A,
            Some('B') => SimpleType::B,
            Some('C') => SimpleType::C,
            Some('D') => SimpleType::D,
            Some('E') => SimpleType::E,
            Some('F') => SimpleType::F,
            Some('G') => SimpleType::G,
            _ => return Err(bad()),
        };
        let n: usize = chars.as_str().parse().map_err(|_| bad())?;
        out.push((t, n));
    }
    Ok(out)
}

pub fn build_root_system(factors: &[(SimpleType, usize)]) -> Result<RootSystemDesc, RootError> {
    if factors.is_empty() {
        return Err(RootError::BadType(String::new()));
    }
    let mut blocks = Vec::new();
    for &(t, n) in factors {
        blocks.push(simple_cartan(t, n)?);
    }
    let m: usize = factors.iter().map(|f| f.1).sum();
    let mut cartan = IntMatrix::zeros(m, m);
    let mut pairing = IntMatrix::zeros(m, m);
    let mut off = 0;
    for (a, d) in &blocks {
        let n = a.len();
        for i in 0..n {
            for j in 0..n {
                cartan.set(off + i, off + j, BigInt::from(a[i][j]));
                pairing.set(off + i, off + j, BigInt::from(d[i] * a[i][j]));
            }
        }
        off += n;
    }
    let mut rs = RootSystemDesc { factors: factors.to_vec(), rank: m, cartan, pairing, positive: Vec::new(), roots: Vec::new() };
    let reflections: Vec<IntMatrix> = (0..m).map(|i| rs.simple_reflection_matrix(i)).collect();
    let mut positive: Vec<IntVector> = (0..m).map(|i| IntVector::unit(m, i)).collect();
    let mut k = 0;
    while k < positive.len() {
        let beta = positive[k].clone();
        for s in &reflections {
            let image = s.apply(&beta);
            if image.0.iter().all(|c| !c.is_negative()) && !image.is_zero() && !positive.contains(&image) {
                positive.push(image);
            }
        }
        k += 1;
    }
    positive.sort_by(|a, b| {
        let ha: BigInt = a.0.iter().sum();
        let hb: BigInt = b.0.iter().sum();
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    let mut roots = positive.clone();
    roots.extend(positive.iter().map(IntVector::neg));
    rs.positive = positive;
    rs.roots = roots;
    Ok(rs)
}

pub fn root_system(descriptor: &str) -> Result<RootSystemDesc, RootError> {
    build_root_system(&parse_descriptor(descriptor)?)
}

/// A Weyl group element acting on simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElement {
    pub matrix: LatticeAuto,
    /// Reduced word in simple reflections (0-based), when known.
    pub word: Option<Vec<usize>>,
}

impl WeylElement {
    /// `s1s2…` with 1-based indices, `e` for the identity.
    pub fn word_string(&self) -> String {
        match &self.word {
            Some(w) if w.is_empty() => "e".to_string(),
            Some(w) => w.iter().map(|i| format!("s{}", i + 1)).collect(),
            None => format!("{:?}", self.matrix.matrix()),
        }
    }

    pub fn apply(&self, v: &IntVector) -> IntVector {
        self.matrix.apply(v)
    }
}

pub fn reflection(rs: &RootSystemDesc, alpha: &IntVector) -> Result<WeylElement, RootError> {
    if !rs.is_root(alpha) {
        return Err(RootError::NotARoot);
    }
    let m = rs.rank();
    let cols: Vec<IntVector> = (0..m)
        .map(|j| {
            let e = IntVector::unit(m, j);
            e.sub(&alpha.scale(&rs.coroot_pairing(&e, alpha)))
        })
        .collect();
    let matrix = LatticeAuto::new(IntMatrix::from_columns(&cols, m)).expect("reflections are involutions");
    let word = (0..m).find(|&i| *alpha == IntVector::unit(m, i) || *alpha == IntVector::unit(m, i).neg()).map(|i| vec![i]);
    Ok(WeylElement { matrix, word })
}

/// The enumerated Weyl group with a matrix lookup.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    elements: Vec<WeylElement>,
    index: HashMap<IntMatrix, usize>,
}

impl WeylGroup {
    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn find(&self, m: &IntMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn get(&self, i: usize) -> &WeylElement {
        &self.elements[i]
    }

    /// Index of the product `elements[a] · elements[b]`.
    pub fn product(&self, a: usize, b: usize) -> usize {
        let m = self.elements[a].matrix.matrix().mul(self.elements[b].matrix.matrix());
        self.find(&m).expect("closed under products")
    }

    pub fn inverse(&self, a: usize) -> usize {
        let inv = self.elements[a].matrix.inverse();
        self.find(inv.matrix()).expect("closed under inverses")
    }
}

pub fn enumerate_weyl(rs: &RootSystemDesc) -> Result<WeylGroup, RootError> {
    enumerate_weyl_bounded(rs, max_weyl_bound())
}

/// Breadth-first closure under right multiplication by simple reflections; the first
/// word reaching an element is reduced.
pub fn enumerate_weyl_bounded(rs: &RootSystemDesc, bound: usize) -> Result<WeylGroup, RootError> {
    let order = rs.weyl_order();
    if order > bound as u128 {
        return Err(RootError::BoundExceeded { order, bound });
    }
    let m = rs.rank();
    let gens: Vec<IntMatrix> = (0..m).map(|i| rs.simple_reflection_matrix(i)).collect();
    let mut elements = vec![WeylElement { matrix: LatticeAuto::identity(m), word: Some(Vec::new()) }];
    let mut index = HashMap::new();
    index.insert(IntMatrix::identity(m), 0usize);
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for (i, s) in gens.iter().enumerate() {
            let prod = elements[k].matrix.matrix().mul(s);
            if index.contains_key(&prod) {
                continue;
            }
            if elements.len() >= bound {
                return Err(RootError::BoundExceeded { order, bound });
            }
            let mut word = elements[k].word.clone().unwrap_or_default();
            word.push(i);
            index.insert(prod.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(WeylElement { matrix: LatticeAuto::new(prod).expect("product of reflections"), word: Some(word) });
        }
    }
    Ok(WeylGroup { elements, index })
}

/// A permutation of Dynkin nodes preserving the Cartan matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynkinAuto {
    /// Node `i` goes to node `perm[i]`.
    pub perm: Vec<usize>,
    /// Induced map on `Z^m`: `α_i ↦ α_{perm[i]}`.
    pub matrix: LatticeAuto,
}

impl DynkinAuto {
    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Human-readable form, e.g. `factor swap (1 3)` or `diagram symmetry of factor 1 (1 2)`.
    pub fn describe(&self, rs: &RootSystemDesc) -> String {
        if self.is_identity() {
            return "identity".to_string();
        }
        let ranges = rs.factor_ranges();
        let factor_of = |node: usize| ranges.iter().position(|r| r.contains(&node)).unwrap();
        let factor_perm: Vec<usize> = ranges.iter().map(|r| factor_of(self.perm[r.start])).collect();
        let mut parts = Vec::new();
        let cycles = cycle_notation(&factor_perm);
        if !cycles.is_empty() {
            let moved: usize = factor_perm.iter().enumerate().filter(|(i, p)| i != *p).count();
            let kind = if moved == 2 { "factor swap" } else { "factor permutation" };
            parts.push(format!("{kind} {cycles}"));
        }
        for (f, r) in ranges.iter().enumerate() {
            let target = &ranges[factor_perm[f]];
            let local: Vec<usize> = r.clone().map(|i| self.perm[i] - target.start).collect();
            let c = cycle_notation(&local);
            if !c.is_empty() {
                parts.push(format!("diagram symmetry of factor {} {c}", f + 1));
            }
        }
        parts.join(", ")
    }
}

/// 1-based cycle notation without fixed points; empty for the identity.
pub fn cycle_notation(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cyc = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cyc.push((i + 1).to_string());
            i = perm[i];
        }
        out.push_str(&format!("({})", cyc.join(" ")));
    }
    out
}

/// All node permutations preserving the Cartan matrix, identity first, then
/// lexicographic. Factor permutations and triality arise here uniformly.
pub fn dynkin_automorphisms(rs: &RootSystemDesc) -> Vec<DynkinAuto> {
    let m = rs.rank();
    let a = rs.cartan();
    let mut out = Vec::new();
    let mut perm = Vec::with_capacity(m);
    let mut used = vec![false; m];
    fn rec(i: usize, m: usize, a: &IntMatrix, perm: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if i == m {
            out.push(perm.clone());
            return;
        }
        for cand in 0..m {
            if used[cand] {
                continue;
            }
            let ok = (0..i).all(|j| a.get(i, j) == a.get(cand, perm[j]) && a.get(j, i) == a.get(perm[j], cand))
                && a.get(i, i) == a.get(cand, cand);
            if ok {
                used[cand] = true;
                perm.push(cand);
                rec(i + 1, m, a, perm, used, out);
                perm.pop();
                used[cand] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(0, m, a, &mut perm, &mut used, &mut perms);
    for p in perms {
        let cols: Vec<IntVector> = p.iter().map(|&j| IntVector::unit(m, j)).collect();
        let matrix = LatticeAuto::new(IntMatrix::from_columns(&cols, m)).expect("permutation matrix");
        debug_assert!(rs.positive_roots().iter().all(|r| rs.positive_index(&matrix.apply(r)).is_some()));
        out.push(DynkinAuto { perm: p, matrix });
    }
    out
}

pub fn is_weyl_element(rs: &RootSystemDesc, psi: &LatticeAuto) -> Result<Option<WeylElement>, RootError> {
    let w = enumerate_weyl(rs)?;
    Ok(w.find(psi.matrix()).map(|i| w.get(i).clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RootSystemDesc {
        root_system(s).unwrap()
    }

    #[test]
    fn positive_root_counts() {
        for (d, n) in [("A1", 1), ("A2", 3), ("A3", 6), ("B2", 4), ("B3", 9), ("C3", 9), ("D4", 12), ("G2", 6), ("A1xA1xA1", 3)] {
            assert_eq!(rs(d).positive_roots().len(), n, "{d}");
        }
    }

    #[test]
    fn weyl_orders() {
        for d in ["A1", "A2", "A3", "B2", "B3", "C3", "D4", "G2", "A1xA1xA1", "B2xA1"] {
            let r = rs(d);
            assert_eq!(enumerate_weyl(&r).unwrap().len() as u128, r.weyl_order(), "{d}");
        }
        assert_eq!(enumerate_weyl(&rs("A2")).unwrap().len(), 6);
    }

    #[test]
    fn bad_and_unsupported_types() {
        assert!(matches!(root_system("E6"), Err(RootError::UnsupportedType(_))));
        assert!(matches!(root_system("F4"), Err(RootError::UnsupportedType(_))));
        assert!(matches!(root_system("Q3"), Err(RootError::BadType(_))));
        assert!(matches!(root_system("D3"), Err(RootError::BadType(_))));
        assert!(matches!(root_system("A0"), Err(RootError::BadType(_))));
    }

    #[test]
    fn reflections() {
        let a1 = rs("A1");
        let s = reflection(&a1, &IntVector::from_i64s(&[1])).unwrap();
        assert_eq!(s.matrix.matrix(), &IntMatrix::from_i64_rows(&[vec![-1]]));
        let a2 = rs("A2");
        let s1 = reflection(&a2, &IntVector::from_i64s(&[1, 0])).unwrap();
        assert_eq!(s1.apply(&IntVector::from_i64s(&[0, 1])), IntVector::from_i64s(&[1, 1]));
        for r in a2.roots() {
            let s = reflection(&a2, r).unwrap();
            assert!(s.matrix.compose(&s.matrix).is_identity());
        }
        assert_eq!(reflection(&a2, &IntVector::from_i64s(&[2, 0])), Err(RootError::NotARoot));
    }

    #[test]
    fn dynkin_counts() {
        assert_eq!(dynkin_automorphisms(&rs("A2")).len(), 2);
        assert_eq!(dynkin_automorphisms(&rs("A1xA1xA1")).len(), 6);
        assert_eq!(dynkin_automorphisms(&rs("A1")).len(), 1);
        assert_eq!(dynkin_automorphisms(&rs("D4")).len(), 6);
        assert_eq!(dynkin_automorphisms(&rs("B2")).len(), 1);
    }

    #[test]
    fn weyl_membership() {
        let a2 = rs("A2");
        assert!(is_weyl_element(&a2, &LatticeAuto::identity(2)).unwrap().is_some());
        let flip = &dynkin_automorphisms(&a2)[1];
        assert!(is_weyl_element(&a2, &flip.matrix).unwrap().is_none());
        let s = reflection(&a2, &IntVector::from_i64s(&[1, 1])).unwrap();
        assert!(is_weyl_element(&a2, &s.matrix).unwrap().is_some());
    }

    #[test]
    fn describe_factor_swap() {
        let r = rs("A1xA1xA1");
        let d = dynkin_automorphisms(&r).into_iter().find(|d| d.perm == vec![2, 1, 0]).unwrap();
        assert_eq!(d.describe(&r), "factor swap (1 3)");
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(enumerate_weyl_bounded(&rs("A3"), 10), Err(RootError::BoundExceeded { order: 24, bound: 10 })));
    }
}
