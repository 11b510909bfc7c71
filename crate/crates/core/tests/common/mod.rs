//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use gkmkit::admissible_tuples::{build_realizable_bundle, complete_tuple, AdmissibleTuple, BlockAuto};
use gkmkit::exact_lattice::{IntMatrix, IntVector, LatticeAuto};
use gkmkit::fibrations_bundles::PolygonBundle;
use gkmkit::fixtures::su3_bundle;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

pub fn v(xs: &[i64]) -> IntVector {
    IntVector::from_i64s(xs)
}

pub fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

/// Flag types small enough for exhaustive checks, with the classical Weyl group orders.
pub const FLAG_TYPES: &[(&str, usize)] =
    &[("A1", 2), ("A2", 6), ("A3", 24), ("A1xA1", 4), ("A1xA1xA1", 8), ("B2", 8), ("G2", 12), ("A1xA2", 12), ("B3", 48), ("C3", 48)];

/// Rank by Gaussian elimination over `Q`.
pub fn naive_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in 0..a.len() {
            if i != rank && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[rank][c];
                for j in 0..cols {
                    let t = &f * &a[rank][j];
                    a[i][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Random primitive vector in `Z^2` with entries in `[-bound, bound]`.
pub fn primitive2(rng: &mut impl Rng, bound: i64) -> IntVector {
    loop {
        let (a, b) = (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        if num_integer::gcd(a, b) == 1 {
            return v(&[a, b]);
        }
    }
}

fn perp(x: &IntVector) -> IntVector {
    IntVector(vec![-x.0[1].clone(), x.0[0].clone()])
}

/// `I + t v v⊥ᵀ`: fixes `v`.
pub fn shear_fixing(x: &IntVector, t: i64) -> IntMatrix {
    let p = perp(x);
    let mut a = IntMatrix::identity(2);
    for i in 0..2 {
        for j in 0..2 {
            let e = a.get(i, j) + BigInt::from(t) * &x.0[i] * &p.0[j];
            a.set(i, j, e);
        }
    }
    a
}

/// `r v⊥ᵀ`: kills `v`.
pub fn upper_killing(x: &IntVector, r: &IntVector) -> IntMatrix {
    let p = perp(x);
    let mut b = IntMatrix::zeros(r.len(), 2);
    for i in 0..r.len() {
        for j in 0..2 {
            b.set(i, j, &r.0[i] * &p.0[j]);
        }
    }
    b
}

pub fn small_vec(rng: &mut impl Rng, len: usize, bound: i64) -> IntVector {
    IntVector((0..len).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
}

pub fn nonzero_vec(rng: &mut impl Rng, len: usize, bound: i64) -> IntVector {
    loop {
        let x = small_vec(rng, len, bound);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Compatible blocks drawn independently of the completion routine, with the target
/// taken as their product; kernel vectors end with the markers `(0,1)` and `(1,0)`.
pub struct TupleInstance {
    pub m: usize,
    pub kernel_vectors: Vec<IntVector>,
    pub blocks: Vec<BlockAuto>,
    pub target: LatticeAuto,
}

impl TupleInstance {
    pub fn a_list(&self) -> Vec<IntMatrix> {
        self.blocks.iter().map(|b| b.a.clone()).collect()
    }

    pub fn leading_b(&self) -> Vec<IntMatrix> {
        self.blocks[..self.blocks.len() - 2].iter().map(|b| b.b.clone()).collect()
    }

    pub fn complete(&self) -> AdmissibleTuple {
        complete_tuple(&self.a_list(), &self.leading_b(), &self.target).expect("instance is completable")
    }
}

pub fn random_tuple_instance(rng: &mut impl Rng, m: usize, n: usize, bound: i64) -> TupleInstance {
    let mut kernel_vectors = Vec::new();
    let mut blocks = Vec::new();
    for _ in 0..n - 2 {
        let x = primitive2(rng, bound);
        let a = shear_fixing(&x, rng.gen_range(-bound..=bound));
        let b = upper_killing(&x, &small_vec(rng, m - 2, bound));
        kernel_vectors.push(x);
        blocks.push(BlockAuto::new(b, a).unwrap());
    }
    let sign = |rng: &mut dyn rand::RngCore| if rng.gen_bool(0.5) { 1 } else { -1 };
    let a_nm1 = m_(&[[sign(rng), 0], [rng.gen_range(-bound..=bound), 1]]);
    let a_n = m_(&[[1, rng.gen_range(-bound..=bound)], [0, sign(rng)]]);
    let zero = IntVector::zeros(m - 2);
    let b_nm1 = IntMatrix::from_columns(&[small_vec(rng, m - 2, bound), zero.clone()], m - 2);
    let b_n = IntMatrix::from_columns(&[zero, small_vec(rng, m - 2, bound)], m - 2);
    kernel_vectors.push(v(&[0, 1]));
    kernel_vectors.push(v(&[1, 0]));
    blocks.push(BlockAuto::new(b_nm1, a_nm1).unwrap());
    blocks.push(BlockAuto::new(b_n, a_n).unwrap());
    let target = blocks.iter().fold(LatticeAuto::identity(m), |acc, b| b.full().compose(&acc));
    TupleInstance { m, kernel_vectors, blocks, target }
}

fn m_(rows: &[[i64; 2]; 2]) -> IntMatrix {
    IntMatrix::from_i64_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

/// A random member of the SU(3)-block family.
pub fn random_su3_bundle(rng: &mut impl Rng) -> (String, PolygonBundle) {
    let b = rng.gen_range(-3..=3);
    let n = rng.gen_range(4..=6);
    let l = rng.gen_range(2..=n - 2);
    let seed = rng.gen_range(0..1000u64);
    (format!("su3 b={b} n={n} l={l} seed={seed}"), su3_bundle(b, n, l, seed).expect("su3 bundles build"))
}

/// `A2` bundles over a square in rank 3 whose tuple consists of shears into the `T'`
/// direction and composes to the identity. The base weights span a plane, so vertical
/// labels can avoid it.
pub fn shear_bundle(r1: i64, r2: i64, seed: u64) -> PolygonBundle {
    let base = vec![v(&[0, 1, 1]), v(&[0, 0, 1]), v(&[0, 1, 0]), v(&[0, 0, 1])];
    let kernel: Vec<IntVector> = vec![v(&[1, -1]), v(&[1, 0])];
    let a = vec![IntMatrix::identity(2); 4];
    let b = vec![upper_killing(&kernel[0], &v(&[r1])), upper_killing(&kernel[1], &v(&[r2]))];
    let t = complete_tuple(&a, &b, &LatticeAuto::identity(3)).expect("identity target");
    build_realizable_bundle(&t, &base, "A2", seed).expect("shear bundles build")
}

pub fn random_shear_bundle(rng: &mut impl Rng) -> (String, PolygonBundle) {
    let (r1, r2, seed) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(0..1000u64));
    (format!("shear r1={r1} r2={r2} seed={seed}"), shear_bundle(r1, r2, seed))
}

/// Alternates between the two bundle families.
pub fn random_bundle(rng: &mut impl Rng, i: usize) -> (String, PolygonBundle) {
    if i % 2 == 0 {
        random_su3_bundle(rng)
    } else {
        random_shear_bundle(rng)
    }
}

pub fn is_unit(x: &BigInt) -> bool {
    x.is_one() || (-x).is_one()
}
