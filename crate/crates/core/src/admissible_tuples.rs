//! Block-unimodular lattice maps adapted to a codimension-2 subtorus, their completion to
//! tuples composing to a prescribed map, bounded factorization search, the SU(3)-block
//! family, and the bundles built from such tuples.
//!
//! Tuple maps `ψ_i` act on the torus lattice in the adapted basis `w_1..w_m`; weights are
//! written in the dual coordinates `β(w_j)`. A map on the torus lattice acts on weights by
//! `ψ^{-T}`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_lattice::{kernel_basis, matrix_rank, smith_normal_form, solve_integer, IntMatrix, IntVector, LatticeAuto, LatticeError};
use crate::fibrations_bundles::{
    assemble_total_graph, decide, fixes_kernel, labels_meet_base_plane, BundleError, Decision, Fiber, PolygonBundle,
};
use crate::gkm_graph::validate_graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TupleError {
    #[error("the two weights do not span a primitive sublattice")]
    NotPrimitive,
    #[error("the two weights are linearly dependent")]
    WeightsDependent,
    #[error("block data does not match the target: {0}")]
    BlockMismatch(String),
    #[error("{0}")]
    FormViolation(String),
    #[error("positions need 2 <= l <= n-2, got l = {l}, n = {n}")]
    BadPositions { l: usize, n: usize },
    #[error("search over {size} candidates exceeds the bound {bound}")]
    BoundExceeded { size: u128, bound: u128 },
    #[error("map {index} does not fix the kernel of its base weight")]
    NotCompatible { index: usize },
    #[error("no admissible initial labeling found within {budget} candidates")]
    NoLabelChoice { budget: usize },
    #[error("malformed tuple data: {0}")]
    BadInput(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
}

/// `[[1, B], [0, A]]` with `B` of size `(m-2)×2` and `A` unimodular `2×2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockAuto {
    pub b: IntMatrix,
    pub a: IntMatrix,
}

impl BlockAuto {
    pub fn new(b: IntMatrix, a: IntMatrix) -> Result<Self, TupleError> {
        if a.rows() != 2 || a.cols() != 2 || b.cols() != 2 {
            return Err(TupleError::BadInput("blocks must be (m-2)x2 and 2x2".into()));
        }
        if a.determinant().abs() != BigInt::one() {
            return Err(TupleError::Lattice(LatticeError::NotUnimodular));
        }
        Ok(BlockAuto { b, a })
    }

    pub fn identity(m: usize) -> Self {
        BlockAuto { b: IntMatrix::zeros(m - 2, 2), a: IntMatrix::identity(2) }
    }

    pub fn m(&self) -> usize {
        self.b.rows() + 2
    }

    pub fn full(&self) -> LatticeAuto {
        let m = self.m();
        let mut f = IntMatrix::identity(m);
        for i in 0..m - 2 {
            for j in 0..2 {
                f.set(i, m - 2 + j, self.b.get(i, j).clone());
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                f.set(m - 2 + i, m - 2 + j, self.a.get(i, j).clone());
            }
        }
        LatticeAuto::new(f).expect("block-triangular with unimodular corner")
    }

    /// Reads the blocks back, if the matrix has the block shape.
    pub fn from_full(psi: &LatticeAuto) -> Option<Self> {
        let m = psi.rank();
        if m < 2 {
            return None;
        }
        let f = psi.matrix();
        let top_left = f.submatrix(0, m - 2, 0, m - 2);
        let bottom_left = f.submatrix(m - 2, m, 0, m - 2);
        if !top_left.is_identity() || !bottom_left.is_zero() {
            return None;
        }
        Some(BlockAuto { b: f.submatrix(0, m - 2, m - 2, m), a: f.submatrix(m - 2, m, m - 2, m) })
    }
}

/// `A v = v` and `B v = 0`.
pub fn is_ti_compatible(psi: &BlockAuto, v: &IntVector) -> bool {
    psi.a.apply(v) == *v && psi.b.apply(v).is_zero()
}

/// Basis `w_1..w_m` of the torus lattice with `w_1..w_{m-2}` spanning `T'`,
/// `α_n(w_{m-1}) = 0` and `α_{n-1}(w_m) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedBasis {
    pub basis: Vec<IntVector>,
}

impl AdaptedBasis {
    /// Basis vectors as columns.
    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(&self.basis, self.basis.len())
    }
}

pub fn adapted_basis(t_prime: &[IntVector], a_nm1: &IntVector, a_n: &IntVector) -> Result<AdaptedBasis, TupleError> {
    let m = a_n.len();
    if a_nm1.len() != m || t_prime.len() + 2 != m || t_prime.iter().any(|t| t.len() != m) {
        return Err(TupleError::BadInput(format!("expected {} vectors of T' in Z^{m}", m.saturating_sub(2))));
    }
    let pair = IntMatrix::from_rows(&[a_nm1.clone(), a_n.clone()], m);
    let snf = smith_normal_form(&pair);
    if snf.rank < 2 {
        return Err(TupleError::WeightsDependent);
    }
    if snf.divisors().iter().any(|d| !d.is_one()) {
        return Err(TupleError::NotPrimitive);
    }
    if t_prime.iter().any(|t| !pair.apply(t).is_zero()) {
        return Err(TupleError::BadInput("the weights must vanish on T'".into()));
    }
    let w_m1 = solve_integer(&pair, &IntVector::from_i64s(&[1, 0])).ok_or(TupleError::NotPrimitive)?;
    let w_m = solve_integer(&pair, &IntVector::from_i64s(&[0, 1])).ok_or(TupleError::NotPrimitive)?;
    let mut basis = t_prime.to_vec();
    basis.push(w_m1);
    basis.push(w_m);
    if IntMatrix::from_columns(&basis, m).determinant().abs() != BigInt::one() {
        return Err(TupleError::BadInput("T' together with the markers is not a lattice basis".into()));
    }
    Ok(AdaptedBasis { basis })
}

/// Coordinates `(a, b)` of the generator `a w_{m-1} + b w_m` completing `w_1..w_{m-2}` to
/// a basis of `ker α`, for a weight in dual coordinates vanishing on `w_1..w_{m-2}`.
pub fn kernel_vector(alpha: &IntVector) -> Result<IntVector, TupleError> {
    let m = alpha.len();
    if m < 2 || alpha.0[..m - 2].iter().any(|x| !x.is_zero()) {
        return Err(TupleError::BadInput("base weight must vanish on w_1..w_{m-2}".into()));
    }
    let (p, q) = (&alpha.0[m - 2], &alpha.0[m - 1]);
    if p.is_zero() && q.is_zero() {
        return Err(TupleError::BadInput("zero base weight".into()));
    }
    let g = p.gcd(q);
    let mut v = IntVector(vec![q / &g, -(p / &g)]);
    if v.0[0].is_negative() || (v.0[0].is_zero() && v.0[1].is_negative()) {
        v = v.neg();
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleTuple {
    pub psis: Vec<BlockAuto>,
    pub target: LatticeAuto,
}

impl AdmissibleTuple {
    /// `ψ_n ⋯ ψ_1`
    pub fn product(&self) -> LatticeAuto {
        self.psis.iter().fold(LatticeAuto::identity(self.target.rank()), |acc, p| p.full().compose(&acc))
    }

    pub fn is_admissible(&self, kernel_vectors: &[IntVector]) -> bool {
        kernel_vectors.len() == self.psis.len()
            && self.product() == self.target
            && self.psis.iter().zip(kernel_vectors).all(|(p, v)| is_ti_compatible(p, v))
    }
}

fn lower_unitriangular_k(a: &IntMatrix) -> Option<BigInt> {
    (a.get(0, 0).abs().is_one() && a.get(0, 1).is_zero() && a.get(1, 1).is_one()).then(|| a.get(1, 0).clone())
}

fn upper_unitriangular(a: &IntMatrix) -> bool {
    a.get(0, 0).is_one() && a.get(1, 0).is_zero() && a.get(1, 1).abs().is_one()
}

/// Completes `A_1..A_n` and `B_1..B_{n-2}` with the unique `B_{n-1}`, `B_n` making the
/// product equal to `ad_w`.
pub fn complete_tuple(a_list: &[IntMatrix], b_list: &[IntMatrix], ad_w: &LatticeAuto) -> Result<AdmissibleTuple, TupleError> {
    let n = a_list.len();
    let m = ad_w.rank();
    if n < 2 || b_list.len() + 2 != n {
        return Err(TupleError::BadInput(format!("expected n >= 2 corner blocks and n-2 upper blocks, got {n} and {}", b_list.len())));
    }
    let target = BlockAuto::from_full(ad_w).ok_or_else(|| TupleError::BlockMismatch("target is not block upper-triangular".into()))?;
    let a_prod = a_list.iter().fold(IntMatrix::identity(2), |acc, a| a.mul(&acc));
    if a_prod != target.a {
        return Err(TupleError::BlockMismatch("A_n ... A_1 differs from the corner of the target".into()));
    }
    let k_nm1 =
        lower_unitriangular_k(&a_list[n - 2]).ok_or_else(|| TupleError::FormViolation("A_{n-1} must be [[±1, 0], [k, 1]]".into()))?;
    if !upper_unitriangular(&a_list[n - 1]) {
        return Err(TupleError::FormViolation("A_n must be [[1, k], [0, ±1]]".into()));
    }
    let mut psis = Vec::with_capacity(n);
    for (a, b) in a_list.iter().zip(b_list) {
        if b.rows() != m - 2 {
            return Err(TupleError::BadInput(format!("upper blocks must have {} rows", m - 2)));
        }
        psis.push(BlockAuto::new(b.clone(), a.clone())?);
    }
    // ψ = Ad_w ψ_1^{-1} ⋯ ψ_{n-2}^{-1} has upper block (u, v)
    let psi = psis.iter().fold(ad_w.clone(), |acc, p| acc.compose(&p.full().inverse()));
    let rest = BlockAuto::from_full(&psi).expect("block shape is closed under products");
    let (u, v) = (rest.b.col(0), rest.b.col(1));
    let zero = IntVector::zeros(m - 2);
    let b_nm1 = IntMatrix::from_columns(&[u.sub(&v.scale(&k_nm1)), zero.clone()], m - 2);
    let b_n = IntMatrix::from_columns(&[zero, v], m - 2);
    psis.push(BlockAuto::new(b_nm1, a_list[n - 2].clone())?);
    psis.push(BlockAuto::new(b_n, a_list[n - 1].clone())?);
    Ok(AdmissibleTuple { psis, target: ad_w.clone() })
}

/// The family of tuples inside an `su(3)` block, with the two repeated-weight edges at
/// positions `l` and `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Su3Example {
    pub b: i64,
    pub n: usize,
    pub l: usize,
    pub ad_w: IntMatrix,
    pub a_list: Vec<IntMatrix>,
    pub base_weights: Vec<IntVector>,
    pub kernel_vectors: Vec<IntVector>,
}

pub fn su3_ad_w(b: i64) -> IntMatrix {
    IntMatrix::from_i64_rows(&[vec![-3 * b + 1, 3 * b * b - 3 * b + 1], vec![-3, 3 * b - 2]])
}

/// Base weights in dual coordinates: `α_l = α_n = (0,1)`, `α_{n-1} = (1,0)`, the others
/// chosen so that consecutive weights form a lattice basis.
pub fn su3_base_weights(n: usize, l: usize) -> Option<Vec<IntVector>> {
    let fixed: HashMap<usize, IntVector> =
        [(l, IntVector::from_i64s(&[0, 1])), (n - 1, IntVector::from_i64s(&[1, 0])), (n, IntVector::from_i64s(&[0, 1]))]
            .into_iter()
            .collect();
    let cands: Vec<IntVector> =
        [[1, 1], [1, -1], [1, 2], [1, -2], [1, 0], [0, 1], [2, 1], [2, -1]].iter().map(|c| IntVector::from_i64s(c)).collect();
    let unimodular = |a: &IntVector, b: &IntVector| (&a.0[0] * &b.0[1] - &a.0[1] * &b.0[0]).abs().is_one();
    fn rec(
        i: usize,
        n: usize,
        out: &mut Vec<IntVector>,
        fixed: &HashMap<usize, IntVector>,
        cands: &[IntVector],
        ok: &dyn Fn(&IntVector, &IntVector) -> bool,
    ) -> bool {
        if i > n {
            return ok(&out[n - 1], &out[0]);
        }
        let options: Vec<IntVector> = match fixed.get(&i) {
            Some(v) => vec![v.clone()],
            None => cands.to_vec(),
        };
        for c in options {
            if i > 1 && !ok(&out[i - 2], &c) {
                continue;
            }
            out.push(c);
            if rec(i + 1, n, out, fixed, cands, ok) {
                return true;
            }
            out.pop();
        }
        false
    }
    let mut out = Vec::new();
    rec(1, n, &mut out, &fixed, &cands, &unimodular).then_some(out)
}

pub fn su3_example(b: i64, n: usize, l: usize) -> Result<Su3Example, TupleError> {
    if n < 4 || l < 2 || l + 2 > n {
        return Err(TupleError::BadPositions { l, n });
    }
    let mut a_list = vec![IntMatrix::identity(2); n];
    a_list[n - 1] = IntMatrix::from_i64_rows(&[vec![1, b], vec![0, 1]]);
    a_list[n - 2] = IntMatrix::from_i64_rows(&[vec![1, 0], vec![-3, 1]]);
    a_list[l - 1] = IntMatrix::from_i64_rows(&[vec![1, -b + 1], vec![0, 1]]);
    let base_weights = su3_base_weights(n, l).ok_or(TupleError::BadPositions { l, n })?;
    let kernel_vectors = base_weights.iter().map(kernel_vector).collect::<Result<Vec<_>, _>>()?;
    Ok(Su3Example { b, n, l, ad_w: su3_ad_w(b), a_list, base_weights, kernel_vectors })
}

impl Su3Example {
    pub fn tuple(&self) -> Result<AdmissibleTuple, TupleError> {
        let ad_w = LatticeAuto::new(self.ad_w.clone())?;
        complete_tuple(&self.a_list, &vec![IntMatrix::zeros(0, 2); self.n - 2], &ad_w)
    }
}

pub const MAX_FACTOR_BOUND: i64 = 16;
const MAX_FACTOR_SEARCH: u128 = 50_000_000;

/// Unimodular `2×2` matrices with entries in `[-bound, bound]` fixing `v`.
pub fn compatible_corners(v: &IntVector, bound: i64) -> Vec<IntMatrix> {
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                for d in -bound..=bound {
                    if (a * d - b * c).abs() != 1 {
                        continue;
                    }
                    let m = IntMatrix::from_i64_rows(&[vec![a, b], vec![c, d]]);
                    if m.apply(v) == *v {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Every factorization `A = A_n ⋯ A_1` with `A_i v_i = v_i` and entries in `[-bound, bound]`.
pub fn enumerate_factorizations(a: &IntMatrix, vs: &[IntVector], bound: i64) -> Result<Vec<Vec<IntMatrix>>, TupleError> {
    if bound > MAX_FACTOR_BOUND || bound < 0 {
        return Err(TupleError::BoundExceeded { size: bound.unsigned_abs() as u128, bound: MAX_FACTOR_BOUND as u128 });
    }
    let n = vs.len();
    if n == 0 {
        return Ok(if a.is_identity() { vec![Vec::new()] } else { Vec::new() });
    }
    let mut cache: HashMap<IntVector, Vec<IntMatrix>> = HashMap::new();
    let cands: Vec<Vec<IntMatrix>> =
        vs.iter().map(|v| cache.entry(v.clone()).or_insert_with(|| compatible_corners(v, bound)).clone()).collect();
    let size = cands[..n - 1].iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    if size > MAX_FACTOR_SEARCH {
        return Err(TupleError::BoundExceeded { size, bound: MAX_FACTOR_SEARCH });
    }
    let mut out = Vec::new();
    let mut chosen: Vec<IntMatrix> = Vec::new();
    fn rec(
        i: usize,
        prod: &IntMatrix,
        a: &IntMatrix,
        cands: &[Vec<IntMatrix>],
        chosen: &mut Vec<IntMatrix>,
        out: &mut Vec<Vec<IntMatrix>>,
    ) {
        let n = cands.len();
        if i == n - 1 {
            // the last factor is forced
            let inv = prod.inverse_unimodular().expect("product of unimodular matrices");
            let last = a.mul(&inv);
            if cands[n - 1].contains(&last) {
                let mut full = chosen.clone();
                full.push(last);
                out.push(full);
            }
            return;
        }
        for c in &cands[i] {
            chosen.push(c.clone());
            rec(i + 1, &c.mul(prod), a, cands, chosen, out);
            chosen.pop();
        }
    }
    rec(0, &IntMatrix::identity(2), a, &cands, &mut chosen, &mut out);
    Ok(out)
}

/// `ψ^{-T}`: the action on weights of a map on the torus lattice.
pub fn dual_map(psi: &LatticeAuto) -> LatticeAuto {
    psi.inverse().transpose()
}

pub const LABEL_BUDGET: usize = 2000;

/// Bundle over the polygon with the given base weights whose edge maps are the duals of
/// the tuple and whose twist is a left multiplication.
///
/// Initial labels are `φ` of the standard labels, with `φ` drawn from the integer
/// solutions of `Ψ φ = φ W` for Weyl elements `W` (so the twist is `L_W`), and accepted
/// once the total graph is GKM. Candidates that also keep every label off the plane of
/// the base weights (and map roots onto a primitive sublattice) are preferred; when the
/// base weights span everything no candidate can, and the first GKM one is returned.
pub fn build_realizable_bundle(
    tuple: &AdmissibleTuple,
    base_weights: &[IntVector],
    fiber_desc: &str,
    label_seed: u64,
) -> Result<PolygonBundle, TupleError> {
    let m = tuple.target.rank();
    if base_weights.len() != tuple.psis.len() || base_weights.iter().any(|a| a.len() != m) {
        return Err(TupleError::BadInput("one base weight of the tuple's rank per map".into()));
    }
    let fiber = Fiber::flag(fiber_desc)?;
    let fg = fiber.flag.clone().expect("flag fiber");
    let r = fg.rs.rank();
    if r > m {
        return Err(TupleError::BadInput(format!("fiber rank {r} exceeds torus rank {m}")));
    }
    let isos: Vec<LatticeAuto> = tuple.psis.iter().map(|p| dual_map(&p.full())).collect();
    for (i, (p, a)) in isos.iter().zip(base_weights).enumerate() {
        if !fixes_kernel(p, a) {
            return Err(TupleError::NotCompatible { index: i + 1 });
        }
    }
    let big_psi = dual_map(&tuple.target);
    let kernels: Vec<Vec<IntVector>> = fg.weyl.elements().iter().map(|w| intertwiners(&big_psi, w.matrix.matrix(), m, r)).collect();
    let usable: Vec<usize> = (0..kernels.len()).filter(|&i| !kernels[i].is_empty()).collect();
    if usable.is_empty() {
        return Err(TupleError::NoLabelChoice { budget: 0 });
    }
    // when the base weights span everything every label meets their plane
    let plane_reachable = matrix_rank(&IntMatrix::from_rows(base_weights, m)) < m;
    let mut rng = ChaCha8Rng::seed_from_u64(label_seed);
    let mut primitive_fallback: Option<PolygonBundle> = None;
    let mut fallback: Option<PolygonBundle> = None;
    for attempt in 0..LABEL_BUDGET {
        let ker = &kernels[usable[attempt % usable.len()]];
        let round = attempt / usable.len();
        let mut flat = IntVector::zeros(m * r);
        for (j, k) in ker.iter().enumerate() {
            // the basis vectors themselves come first
            let c: i64 = if round < ker.len() { i64::from(j == round) } else { rng.gen_range(-2..=2) };
            flat = flat.add(&k.scale(&BigInt::from(c)));
        }
        let phi = IntMatrix::from_rows(&(0..m).map(|i| IntVector(flat.0[i * r..(i + 1) * r].to_vec())).collect::<Vec<_>>(), r);
        if matrix_rank(&phi) < r {
            continue;
        }
        let primitive = smith_normal_form(&phi).divisors().iter().all(|d| d.is_one());
        if !primitive && fallback.is_some() {
            continue;
        }
        let roots: Vec<IntVector> = fg.rs.positive_roots().iter().map(|a| phi.apply(a)).collect();
        let Ok(pb) = PolygonBundle::from_roots(base_weights.to_vec(), fiber.clone(), roots, isos.clone(), None) else {
            continue;
        };
        let Ok(tg) = assemble_total_graph(&pb) else {
            continue;
        };
        if !validate_graph(tg.graph()).is_valid() {
            continue;
        }
        if !matches!(decide(&pb, false), Ok(Decision::Realizable { .. })) {
            continue;
        }
        if primitive && (!plane_reachable || !labels_meet_base_plane(&pb)) {
            return Ok(pb);
        }
        if primitive && primitive_fallback.is_none() {
            primitive_fallback = Some(pb);
        } else if fallback.is_none() {
            fallback = Some(pb);
        }
    }
    primitive_fallback.or(fallback).ok_or(TupleError::NoLabelChoice { budget: LABEL_BUDGET })
}

/// Integer basis of `{φ ∈ Z^{m×r} : Ψ φ = φ W}`, each `φ` flattened row by row.
pub fn intertwiners(psi: &LatticeAuto, w: &IntMatrix, m: usize, r: usize) -> Vec<IntVector> {
    let p = psi.matrix();
    let mut rows = Vec::with_capacity(m * r);
    for i in 0..m {
        for j in 0..r {
            let mut row = IntVector::zeros(m * r);
            for k in 0..m {
                row.0[k * r + j] += p.get(i, k);
            }
            for k in 0..r {
                row.0[i * r + k] -= w.get(k, j);
            }
            rows.push(row);
        }
    }
    kernel_basis(&IntMatrix::from_rows(&rows, m * r))
}

/// On-disk tuple together with what is needed to build its bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleJson {
    pub fiber: String,
    pub base_weights: Vec<IntVector>,
    pub ad_w: Vec<IntVector>,
    /// Full `m×m` matrices `ψ_1..ψ_n` by rows.
    pub psis: Vec<Vec<IntVector>>,
    #[serde(default)]
    pub label_seed: u64,
}

impl TupleJson {
    pub fn from_tuple(t: &AdmissibleTuple, fiber: &str, base_weights: &[IntVector], label_seed: u64) -> Self {
        TupleJson {
            fiber: fiber.to_string(),
            base_weights: base_weights.to_vec(),
            ad_w: t.target.matrix().row_vectors(),
            psis: t.psis.iter().map(|p| p.full().matrix().row_vectors()).collect(),
            label_seed,
        }
    }

    pub fn to_tuple(&self) -> Result<AdmissibleTuple, TupleError> {
        let m = self.ad_w.len();
        let square = |rows: &[IntVector]| -> Result<LatticeAuto, TupleError> {
            if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                return Err(TupleError::BadInput(format!("matrices must be {m}x{m}")));
            }
            Ok(LatticeAuto::new(IntMatrix::from_rows(rows, m))?)
        };
        let target = square(&self.ad_w)?;
        let psis = self
            .psis
            .iter()
            .map(|p| BlockAuto::from_full(&square(p)?).ok_or_else(|| TupleError::BadInput("map is not block upper-triangular".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AdmissibleTuple { psis, target })
    }
}

/// Input of `tuple complete`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionJson {
    pub a_list: Vec<Vec<IntVector>>,
    #[serde(default)]
    pub b_list: Vec<Vec<IntVector>>,
    pub ad_w: Vec<IntVector>,
}

/// Input of `tuple enumerate`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationJson {
    pub a: Vec<IntVector>,
    pub kernel_vectors: Vec<IntVector>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> IntVector {
        IntVector::from_i64s(xs)
    }

    #[test]
    fn adapted_bases() {
        let b = adapted_basis(&[], &v(&[1, 0]), &v(&[0, 1])).unwrap();
        assert_eq!(b.basis, vec![v(&[1, 0]), v(&[0, 1])]);
        let b = adapted_basis(&[v(&[0, 0, 1])], &v(&[1, 0, 0]), &v(&[0, 1, 0])).unwrap();
        assert_eq!(b.basis, vec![v(&[0, 0, 1]), v(&[1, 0, 0]), v(&[0, 1, 0])]);
        assert_eq!(adapted_basis(&[], &v(&[2, 0]), &v(&[0, 1])), Err(TupleError::NotPrimitive));
        assert_eq!(adapted_basis(&[], &v(&[1, 1]), &v(&[2, 2])), Err(TupleError::WeightsDependent));
    }

    #[test]
    fn compatibility() {
        let id = BlockAuto::identity(2);
        assert!(is_ti_compatible(&id, &v(&[3, 5])));
        let lower = BlockAuto::new(IntMatrix::zeros(0, 2), IntMatrix::from_i64_rows(&[vec![1, 0], vec![-3, 1]])).unwrap();
        assert!(is_ti_compatible(&lower, &v(&[0, 1])));
        let bad = BlockAuto::new(IntMatrix::from_i64_rows(&[vec![1, 0]]), IntMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]])).unwrap();
        assert!(!is_ti_compatible(&bad, &v(&[1, 0])));
    }

    #[test]
    fn su3_family() {
        for b in -10..=10 {
            let ex = su3_example(b, 4, 2).unwrap();
            let prod = ex.a_list[3].mul(&ex.a_list[2]).mul(&ex.a_list[1]);
            assert_eq!(prod, ex.ad_w);
            let t = ex.tuple().unwrap();
            assert!(t.is_admissible(&ex.kernel_vectors), "b = {b}");
        }
        assert_eq!(su3_ad_w(0), IntMatrix::from_i64_rows(&[vec![1, 1], vec![-3, -2]]));
        assert!(su3_example(1, 5, 3).unwrap().a_list[2].is_identity());
        assert_eq!(su3_example(0, 4, 3), Err(TupleError::BadPositions { l: 3, n: 4 }));
    }

    #[test]
    fn completion_of_a_residual() {
        // m = 3, n = 3: ψ_1 fixed, ψ_2 and ψ_3 completed
        let a1 = IntMatrix::identity(2);
        let a2 = IntMatrix::from_i64_rows(&[vec![1, 0], vec![2, 1]]);
        let a3 = IntMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]);
        let b1 = IntMatrix::from_i64_rows(&[vec![1, -1]]);
        let corner = a3.mul(&a2).mul(&a1);
        let target = BlockAuto::new(IntMatrix::from_i64_rows(&[vec![4, 5]]), corner).unwrap().full();
        let t = complete_tuple(&[a1, a2, a3], &[b1], &target).unwrap();
        assert_eq!(t.product(), target);
        assert!(t.psis[1].b.col(1).is_zero());
        assert!(t.psis[2].b.col(0).is_zero());
    }

    #[test]
    fn factorizations() {
        let ex = su3_example(2, 4, 2).unwrap();
        let found = enumerate_factorizations(&ex.ad_w, &ex.kernel_vectors, 3).unwrap();
        assert!(found.contains(&ex.a_list));
        let id = enumerate_factorizations(&IntMatrix::identity(2), &vec![v(&[1, 0]); 3], 1).unwrap();
        assert!(id.contains(&vec![IntMatrix::identity(2); 3]));
    }
}

#[cfg(test)]
mod bundle_tests {
    use super::*;

    #[test]
    fn su3_bundle_is_realizable_with_primitive_labels() {
        let ex = su3_example(0, 4, 2).unwrap();
        let pb = build_realizable_bundle(&ex.tuple().unwrap(), &ex.base_weights, "A2", 7).unwrap();
        assert!(matches!(decide(&pb, false).unwrap(), Decision::Realizable { .. }));
        for (psi, a) in pb.edge_isos.iter().zip(&pb.base_weights) {
            assert!(fixes_kernel(psi, a));
        }
    }
}
