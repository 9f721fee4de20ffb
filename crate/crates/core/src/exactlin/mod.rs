//! Exact integer/rational sparse linear algebra.
//!
//! Every rank, kernel, membership and quotient computation in the crate goes
//! through this module. All operations are pure functions of immutable
//! inputs and produce bit-identical results independent of thread count.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub(crate) mod dense;

/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational in canonical reduced form (gcd(num,den)=1,
/// den>0); this is the scalar type of every exact computation in the crate.
pub type ExactScalar = num_rational::BigRational;
/// Short alias used throughout the crate internals.
pub(crate) type Rat = ExactScalar;

/// Rational from a machine integer.
pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

/// A sparse matrix over ℚ with fixed dimensions; zero entries are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rat>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rat) {
        assert!(row < self.rows && col < self.cols, "entry out of bounds");
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: &Rat) {
        assert!(row < self.rows && col < self.cols, "entry out of bounds");
        let e = self.entries.entry((row, col)).or_insert_with(Rat::zero);
        *e += value;
        if e.is_zero() {
            self.entries.remove(&(row, col));
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Rat {
        self.entries.get(&(row, col)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Rat)> {
        self.entries.iter()
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMatrix::new(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = SparseMatrix::new(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut m = SparseMatrix::new(self.cols, self.rows);
        for (&(i, j), v) in &self.entries {
            m.set(j, i, v.clone());
        }
        m
    }

    /// Dense integer rows with per-row denominators cleared (row scaling does
    /// not change rank or kernel).
    pub(crate) fn integer_rows(&self) -> Vec<Vec<Int>> {
        let mut dense: Vec<Vec<Rat>> = vec![vec![Rat::zero(); self.cols]; self.rows];
        for (&(i, j), v) in &self.entries {
            dense[i][j] = v.clone();
        }
        dense
            .into_iter()
            .map(|row| {
                let mut lcm = Int::one();
                for x in &row {
                    if !x.is_zero() {
                        lcm = lcm.lcm(x.denom());
                    }
                }
                row.into_iter().map(|x| (x * Rat::from_integer(lcm.clone())).to_integer()).collect()
            })
            .collect()
    }

    pub(crate) fn rational_rows(&self) -> Vec<Vec<Rat>> {
        let mut dense: Vec<Vec<Rat>> = vec![vec![Rat::zero(); self.cols]; self.rows];
        for (&(i, j), v) in &self.entries {
            dense[i][j] = v.clone();
        }
        dense
    }

    pub fn is_integral(&self) -> bool {
        self.entries.values().all(|v| v.is_integer())
    }
}

/// Rank over ℚ by fraction-free elimination; deterministic.
pub fn rank(m: &SparseMatrix) -> usize {
    dense::bareiss_rank(m.integer_rows())
}

/// A basis of the right null space of `m`. The basis vectors are scaled to
/// primitive integer vectors whose first nonzero entry is positive; their
/// count is always `cols − rank`.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<Vec<Rat>> {
    let mut a = m.rational_rows();
    let pivots = dense::rref(&mut a);
    dense::kernel_basis_from_rref(&a, &pivots, m.cols())
}

/// Nonzero invariant factors d₁ | d₂ | … of an integer matrix.
pub fn smith_normal_form(m: &SparseMatrix) -> Result<Vec<Int>> {
    if !m.is_integral() {
        return Err(Error::NotInteger("smith_normal_form requires integer entries".into()));
    }
    Ok(dense::snf_invariant_factors(m.integer_rows()))
}

/// A finitely generated subgroup of ℤ^ambient_dim given by integer generator
/// vectors (stored sparsely).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    ambient_dim: usize,
    generators: Vec<Vec<(u32, Int)>>,
}

impl Lattice {
    pub fn new(ambient_dim: usize) -> Self {
        Lattice { ambient_dim, generators: Vec::new() }
    }

    pub fn from_dense(ambient_dim: usize, gens: Vec<Vec<Int>>) -> Self {
        let mut l = Lattice::new(ambient_dim);
        for g in gens {
            l.push_dense(g);
        }
        l
    }

    pub fn push_dense(&mut self, g: Vec<Int>) {
        assert_eq!(g.len(), self.ambient_dim, "generator length mismatch");
        let sparse: Vec<(u32, Int)> = g
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i as u32, v))
            .collect();
        self.generators.push(sparse);
    }

    pub fn push_sparse(&mut self, g: Vec<(u32, Int)>) {
        debug_assert!(g.iter().all(|&(i, _)| (i as usize) < self.ambient_dim));
        debug_assert!(g.windows(2).all(|w| w[0].0 < w[1].0));
        self.generators.push(g);
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generator_dense(&self, i: usize) -> Vec<Int> {
        let mut v = vec![Int::zero(); self.ambient_dim];
        for &(j, ref x) in &self.generators[i] {
            v[j as usize] = x.clone();
        }
        v
    }

    pub fn generators_sparse(&self) -> &[Vec<(u32, Int)>] {
        &self.generators
    }

    pub fn dense_rows(&self) -> Vec<Vec<Int>> {
        (0..self.generators.len()).map(|i| self.generator_dense(i)).collect()
    }

    /// Rank of the lattice (= dimension of its ℚ-span).
    pub fn rank(&self) -> usize {
        dense::bareiss_rank(self.dense_rows())
    }

    /// Canonical Hermite basis of the lattice: same ℤ-span, deterministic.
    pub fn hermite_basis(&self) -> Vec<Vec<Int>> {
        dense::hnf(self.dense_rows()).0
    }
}

/// Free rank plus torsion invariant factors of a lattice quotient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientPresentation {
    pub free_rank: usize,
    /// Invariant factors d₁ | d₂ | …, each > 1.
    pub torsion: Vec<Int>,
}

impl QuotientPresentation {
    pub fn free(rank: usize) -> Self {
        QuotientPresentation { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

impl std::fmt::Display for QuotientPresentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for d in &self.torsion {
            parts.push(format!("Z/{}", d));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Presentation from a matrix of sub-generator coordinates in an ambient
/// basis of rank `ambient_rank`.
pub fn presentation_from_coords(ambient_rank: usize, coords: Vec<Vec<Int>>) -> QuotientPresentation {
    // Rank-reduce before running the Smith normal form on the dense core.
    let (reduced, _) = dense::hnf(coords);
    let factors = dense::snf_invariant_factors(reduced);
    let free_rank = ambient_rank - factors.len();
    let torsion = factors.into_iter().filter(|d| !d.is_one()).collect();
    QuotientPresentation { free_rank, torsion }
}

/// Presentation of `ambient/⟨sub⟩`.
///
/// `ambient.generators` must be ℤ-linearly independent (a lattice basis) and
/// every `sub` generator must have integral coordinates in that basis;
/// non-integral coordinates signal that `sub` is not inside the ambient
/// lattice and are rejected.
pub fn quotient_presentation(ambient: &Lattice, sub: &Lattice) -> Result<QuotientPresentation> {
    if ambient.ambient_dim() != sub.ambient_dim() {
        return Err(Error::Dimension(format!(
            "ambient dim {} vs sub dim {}",
            ambient.ambient_dim(),
            sub.ambient_dim()
        )));
    }
    let r = ambient.num_generators();
    if ambient.rank() != r {
        return Err(Error::InvalidArgument("ambient generators are not Z-linearly independent".into()));
    }
    let coords = coords_in_basis(ambient, sub)?;
    Ok(presentation_from_coords(r, coords))
}

/// Integral coordinates of every generator of `sub` in the basis given by
/// `ambient`'s generators. Rejects generators outside the ambient lattice.
pub fn coords_in_basis(ambient: &Lattice, sub: &Lattice) -> Result<Vec<Vec<Int>>> {
    let rows = ambient.dense_rows();
    let ((h, pivots), t) = dense::hnf_with_transform(rows);
    let mut out = Vec::with_capacity(sub.num_generators());
    for gi in 0..sub.num_generators() {
        let g = sub.generator_dense(gi);
        let Some(c) = dense::solve_in_hnf(&h, &pivots, &g) else {
            return Err(Error::NotInAmbient(format!("sub generator {} is not in the ambient lattice", gi)));
        };
        // c expresses g in the Hermite basis h = t·ambient; push through t.
        let r = ambient.num_generators();
        let mut coords = vec![Int::zero(); r];
        for (ci, trow) in c.iter().zip(&t) {
            if ci.is_zero() {
                continue;
            }
            for j in 0..r {
                coords[j] += ci * &trow[j];
            }
        }
        out.push(coords);
    }
    Ok(out)
}

/// Membership mode for [`membership`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipMode {
    OverQ,
    OverZ,
}

/// Decision plus coordinate certificate for membership queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Member { coords: Vec<Rat> },
    NonMember,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

/// Decide whether `v` lies in the span of `span.generators`, over ℚ or ℤ.
/// Coordinates (in terms of the given generators) are returned as a
/// certificate when it does.
pub fn membership(v: &[Rat], span: &Lattice, mode: MembershipMode) -> Result<Membership> {
    if v.len() != span.ambient_dim() {
        return Err(Error::Dimension(format!(
            "vector length {} vs ambient dim {}",
            v.len(),
            span.ambient_dim()
        )));
    }
    match mode {
        MembershipMode::OverQ => {
            // Row-reduce the generators with an identity tracker, then reduce v.
            let n = span.ambient_dim();
            let r = span.num_generators();
            let mut aug: Vec<Vec<Rat>> = Vec::with_capacity(r);
            for i in 0..r {
                let mut row: Vec<Rat> = span.generator_dense(i).into_iter().map(Rat::from_integer).collect();
                let mut tracker = vec![Rat::zero(); r];
                tracker[i] = Rat::one();
                row.extend(tracker);
                aug.push(row);
            }
            let mut work = aug;
            // Manual RREF restricted to the first n columns.
            let mut pivots: Vec<usize> = Vec::new();
            let mut row = 0;
            for col in 0..n {
                if row >= work.len() {
                    break;
                }
                let Some(p) = (row..work.len()).find(|&i| !work[i][col].is_zero()) else {
                    continue;
                };
                work.swap(row, p);
                let inv = work[row][col].clone();
                for j in 0..n + r {
                    let t = &work[row][j] / &inv;
                    work[row][j] = t;
                }
                for i in 0..work.len() {
                    if i != row && !work[i][col].is_zero() {
                        let f = work[i][col].clone();
                        for j in 0..n + r {
                            let t = &work[i][j] - &f * &work[row][j];
                            work[i][j] = t;
                        }
                    }
                }
                pivots.push(col);
                row += 1;
            }
            let mut rem: Vec<Rat> = v.to_vec();
            let mut coords = vec![Rat::zero(); r];
            for (ri, &pc) in pivots.iter().enumerate() {
                if rem[pc].is_zero() {
                    continue;
                }
                let f = rem[pc].clone();
                for j in 0..n {
                    let t = &rem[j] - &f * &work[ri][j];
                    rem[j] = t;
                }
                for j in 0..r {
                    let t = &coords[j] + &f * &work[ri][n + j];
                    coords[j] = t;
                }
            }
            if rem.iter().all(|x| x.is_zero()) {
                Ok(Membership::Member { coords })
            } else {
                Ok(Membership::NonMember)
            }
        }
        MembershipMode::OverZ => {
            if v.iter().any(|x| !x.is_integer()) {
                return Ok(Membership::NonMember);
            }
            let vint: Vec<Int> = v.iter().map(|x| x.to_integer()).collect();
            let ((h, pivots), t) = dense::hnf_with_transform(span.dense_rows());
            match dense::solve_in_hnf(&h, &pivots, &vint) {
                None => Ok(Membership::NonMember),
                Some(c) => {
                    let r = span.num_generators();
                    let mut coords = vec![Int::zero(); r];
                    for (ci, trow) in c.iter().zip(&t) {
                        if ci.is_zero() {
                            continue;
                        }
                        for j in 0..r {
                            coords[j] += ci * &trow[j];
                        }
                    }
                    Ok(Membership::Member { coords: coords.into_iter().map(Rat::from_integer).collect() })
                }
            }
        }
    }
}

/// Saturated integer kernel `{x : m·x = 0}` of an integer matrix, as a
/// lattice in ℤ^cols with a canonical Hermite basis.
pub fn kernel_lattice(m: &SparseMatrix) -> Result<Lattice> {
    if !m.is_integral() {
        return Err(Error::NotInteger("kernel_lattice requires integer entries".into()));
    }
    let rows = m.integer_rows();
    let basis = dense::kernel_lattice(&rows, m.cols());
    Ok(Lattice::from_dense(m.cols(), basis))
}
