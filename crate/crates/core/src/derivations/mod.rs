//! Derivations of the free Lie algebra: the degree-k piece is
//! `H* ⊗ ℒₙ(k+1)`, with the bracket given by mutual substitution of values.
//!
//! The tangential subalgebra 𝔭ₙ(k) is generated by `x_i* ⊗ [m, x_i]`; for
//! `k ≥ 2` the pairs `(i, m)` over basis monomials `m` of degree `k` form a
//! basis (the "chart"), and for `k = 1` the chart consists of the pairs
//! `(i, x_j)` with `j ≠ i`. The special subalgebra 𝔟ₙ(k) is the kernel of
//! the chart map `(i, m) ↦ [m, x_i] ∈ ℒₙ(k+1)`, stored as a saturated
//! integer lattice. The chart map preserves letter content, so the kernel
//! splits into independent blocks indexed by compositions of `k+1`; each
//! block is computed once and cached.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::exactlin::{self, Int, Lattice, Rat};
use crate::freelie::{
    lyndon_basis, normalize_tree, BracketTree, GeneratorIndex, LieElement,
};
use crate::{Error, Result};

pub mod named;

pub use named::named_element;

// ---------------------------------------------------------------------------
// DerElement
// ---------------------------------------------------------------------------

/// An element of `Der(ℒₙ)(k) = H* ⊗ ℒₙ(k+1)` in canonical coordinates:
/// term `(i, m) ↦ c` stands for `c · x_i* ⊗ b_m` with `b_m` the degree-(k+1)
/// basis monomial with id `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerElement {
    n: u8,
    degree: usize,
    terms: BTreeMap<(GeneratorIndex, u32), Rat>,
}

impl DerElement {
    pub fn zero(n: u8, degree: usize) -> Self {
        assert!(degree >= 1, "derivation degree starts at 1");
        DerElement { n, degree, terms: BTreeMap::new() }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (GeneratorIndex, u32, &Rat)> {
        self.terms.iter().map(|(&(i, m), c)| (i, m, c))
    }

    pub fn add_term(&mut self, dual: GeneratorIndex, mono: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((dual, mono)).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(dual, mono));
        }
    }

    pub fn add_assign(&mut self, other: &DerElement) {
        assert_eq!((self.n, self.degree), (other.n, other.degree), "grade mismatch");
        for (&(i, m), c) in &other.terms {
            self.add_term(i, m, c.clone());
        }
    }

    pub fn scaled(&self, c: &Rat) -> DerElement {
        let mut out = DerElement::zero(self.n, self.degree);
        for (&(i, m), v) in &self.terms {
            out.add_term(i, m, v * c);
        }
        out
    }

    pub fn sub(&self, other: &DerElement) -> DerElement {
        let mut out = self.clone();
        out.add_assign(&other.scaled(&-Rat::one()));
        out
    }

    /// Build from `x_i* ⊗ v` pairs, normalizing each value.
    pub fn from_values(n: u8, degree: usize, values: &[(GeneratorIndex, BracketTree, Rat)]) -> Result<Self> {
        let mut out = DerElement::zero(n, degree);
        for (dual, tree, c) in values {
            if *dual < 1 || *dual > n {
                return Err(Error::InvalidIndices(format!("dual index {} out of range", dual)));
            }
            if tree.degree() != degree + 1 {
                return Err(Error::Dimension(format!(
                    "value of a degree-{} derivation must have weight {}",
                    degree,
                    degree + 1
                )));
            }
            if tree.max_letter() > n {
                return Err(Error::InvalidIndices(format!("leaf exceeds n={}", n)));
            }
            for (id, ic) in normalize_tree(n, tree) {
                out.add_term(*dual, id, c * Rat::from_integer(ic));
            }
        }
        Ok(out)
    }

    /// The value on `x_i`, as an element of ℒₙ(k+1).
    pub fn component(&self, i: GeneratorIndex) -> LieElement {
        let mut out = LieElement::zero(self.n, self.degree + 1);
        for (&(d, m), c) in &self.terms {
            if d == i {
                out.add_term(m, c.clone());
            }
        }
        out
    }

    /// Sum of all values Σᵢ f(xᵢ); a tangential derivation is special
    /// exactly when this vanishes.
    pub fn component_sum(&self) -> LieElement {
        let mut out = LieElement::zero(self.n, self.degree + 1);
        for (&(_, m), c) in &self.terms {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn is_special_condition(&self) -> bool {
        self.component_sum().is_zero()
    }

    /// Dense coordinates in `H* ⊗ ℒₙ(k+1)`: index `(i-1)·r + m`.
    pub fn dense_der_coords(&self) -> Vec<Rat> {
        let r = lyndon_basis(self.n, self.degree + 1).len();
        let mut v = vec![Rat::zero(); self.n as usize * r];
        for (&(i, m), c) in &self.terms {
            v[(i as usize - 1) * r + m as usize] = c.clone();
        }
        v
    }

    /// Serialize per the wire format:
    /// `{"n", "k", "terms": [{"dual", "word", "coeff"}]}` where `word` is the
    /// nested-array form of the basis monomial.
    pub fn to_json(&self) -> serde_json::Value {
        let basis = lyndon_basis(self.n, self.degree + 1);
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(&(i, m), c)| {
                serde_json::json!({
                    "dual": i,
                    "word": basis.tree(m).to_json(),
                    "coeff": c.to_string(),
                })
            })
            .collect();
        serde_json::json!({ "n": self.n, "k": self.degree, "terms": terms })
    }
}

/// The derivation bracket. With `f = x_i* ⊗ A` and `g = x_j* ⊗ B`,
/// `[f,g] = x_i* ⊗ (Σ_{x_j in A} A|_{x_j→B}) − x_j* ⊗ (Σ_{x_i in B} B|_{x_i→A})`,
/// extended bilinearly; the result is normalized.
pub fn der_bracket(f: &DerElement, g: &DerElement) -> DerElement {
    assert_eq!(f.n, g.n, "mismatched generator count");
    let n = f.n;
    let basis_f = lyndon_basis(n, f.degree + 1);
    let basis_g = lyndon_basis(n, g.degree + 1);
    let mut out = DerElement::zero(n, f.degree + g.degree);
    for (i, ma, ca) in f.terms() {
        let ta = basis_f.tree(ma);
        for (j, mb, cb) in g.terms() {
            let tb = basis_g.tree(mb);
            let c = ca * cb;
            for t in ta.substitute_each(j, tb) {
                for (id, ic) in normalize_tree(n, &t) {
                    out.add_term(i, id, &c * Rat::from_integer(ic));
                }
            }
            for t in tb.substitute_each(i, ta) {
                for (id, ic) in normalize_tree(n, &t) {
                    out.add_term(j, id, -(&c * Rat::from_integer(ic)));
                }
            }
        }
    }
    out
}

/// Apply a derivation to a Lie element (Leibniz extension of its values).
pub fn apply_to_lie(f: &DerElement, a: &LieElement) -> LieElement {
    assert_eq!(f.n, a.n(), "mismatched generator count");
    let n = f.n;
    let basis_f = lyndon_basis(n, f.degree + 1);
    let basis_a = lyndon_basis(n, a.degree());
    let mut out = LieElement::zero(n, a.degree() + f.degree);
    for (i, m, c) in f.terms() {
        let val = basis_f.tree(m);
        for (ida, ca) in a.terms() {
            let prod = c * ca;
            for t in basis_a.tree(ida).substitute_each(i, val) {
                for (id, ic) in normalize_tree(n, &t) {
                    out.add_term(id, &prod * Rat::from_integer(ic));
                }
            }
        }
    }
    out
}

/// Permutation action of 𝔖ₙ: permute the dual index and all leaf labels,
/// then renormalize. `perm[i-1]` is the image of letter `i`.
pub fn sym_action(perm: &[GeneratorIndex], f: &DerElement) -> DerElement {
    assert_eq!(perm.len(), f.n as usize, "permutation size mismatch");
    {
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            assert!(p >= 1 && (p as usize) <= perm.len() && !seen[p as usize - 1], "not a permutation");
            seen[p as usize - 1] = true;
        }
    }
    let basis = lyndon_basis(f.n, f.degree + 1);
    let mut out = DerElement::zero(f.n, f.degree);
    for (i, m, c) in f.terms() {
        let tree = basis.tree(m).relabel(perm);
        for (id, ic) in normalize_tree(f.n, &tree) {
            out.add_term(perm[i as usize - 1], id, c * Rat::from_integer(ic));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Compositions
// ---------------------------------------------------------------------------

/// A composition of `k+1`: nonnegative parts `α₁,…,αₙ` summing to `k+1`
/// (trailing zeros permitted on input and trimmed on display).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Composition(Vec<u8>);

impl Composition {
    /// Validate parts against `n` and the target sum `k+1`.
    pub fn new(n: u8, target_sum: usize, parts: &[u8]) -> Result<Self> {
        if parts.len() > n as usize {
            return Err(Error::InvalidComposition(format!(
                "{} parts but only {} generators",
                parts.len(),
                n
            )));
        }
        let sum: usize = parts.iter().map(|&p| p as usize).sum();
        if sum != target_sum {
            return Err(Error::InvalidComposition(format!(
                "parts sum to {} but must sum to {}",
                sum, target_sum
            )));
        }
        let mut v = parts.to_vec();
        v.resize(n as usize, 0);
        Ok(Composition(v))
    }

    pub(crate) fn from_padded(parts: Vec<u8>) -> Self {
        Composition(parts)
    }

    pub fn parts(&self) -> &[u8] {
        &self.0
    }

    pub fn sum(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    /// Representative with parts sorted descending (the orbit label).
    pub fn partition_key(&self) -> Composition {
        let mut v = self.0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        Composition(v)
    }

    /// Number of distinct rearrangements as an n-tuple (the orbit size).
    pub fn orbit_size(&self) -> u64 {
        let n = self.0.len() as u64;
        let mut numerator: u128 = 1;
        for i in 1..=n {
            numerator *= i as u128;
        }
        let mut counts: BTreeMap<u8, u64> = BTreeMap::new();
        for &p in &self.0 {
            *counts.entry(p).or_insert(0) += 1;
        }
        let mut denom: u128 = 1;
        for (_, c) in counts {
            for i in 1..=c {
                denom *= i as u128;
            }
        }
        (numerator / denom) as u64
    }

    /// All compositions of `sum` into exactly `n` (ordered) nonnegative
    /// parts, lexicographically.
    pub fn enumerate(n: u8, sum: usize) -> Vec<Composition> {
        let mut out = Vec::new();
        let mut parts = vec![0u8; n as usize];
        fn rec(parts: &mut Vec<u8>, idx: usize, remaining: usize, out: &mut Vec<Composition>) {
            if idx + 1 == parts.len() {
                parts[idx] = remaining as u8;
                out.push(Composition(parts.clone()));
                return;
            }
            for v in 0..=remaining {
                parts[idx] = v as u8;
                rec(parts, idx + 1, remaining - v, out);
            }
            parts[idx] = 0;
        }
        rec(&mut parts, 0, sum, &mut out);
        out
    }
}

impl std::fmt::Display for Composition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let trimmed: Vec<String> = self
            .0
            .iter()
            .rev()
            .skip_while(|&&p| p == 0)
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect();
        write!(f, "({})", trimmed.join(","))
    }
}

// ---------------------------------------------------------------------------
// The tangential chart
// ---------------------------------------------------------------------------

/// Coordinate chart for 𝔭ₙ(k): columns `(i, m)` with `m` a degree-k basis
/// monomial (for `k = 1`, the diagonal pairs `(i, x_i)` are excluded).
pub struct PChart {
    pub n: u8,
    pub k: usize,
    pub cols: Vec<(GeneratorIndex, u32)>,
    col_index: HashMap<(GeneratorIndex, u32), u32>,
    /// Composition (value content = content of `m` plus `e_i`) → column ids,
    /// ascending.
    pub blocks: BTreeMap<Composition, Vec<u32>>,
    /// Composition of every column (same data as `blocks`, column-indexed).
    col_comp: Vec<Composition>,
}

impl PChart {
    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn col_of(&self, dual: GeneratorIndex, mono: u32) -> Option<u32> {
        self.col_index.get(&(dual, mono)).copied()
    }

    pub fn composition_of_col(&self, col: u32) -> &Composition {
        &self.col_comp[col as usize]
    }

    /// The tangential generator of a column, as `(dual, prefix tree)`.
    pub fn tangential_form(&self, col: u32) -> (GeneratorIndex, BracketTree) {
        let (i, m) = self.cols[col as usize];
        (i, lyndon_basis(self.n, self.k).tree(m).clone())
    }
}

fn chart_registry() -> &'static RwLock<HashMap<(u8, usize), Arc<PChart>>> {
    static REG: OnceLock<RwLock<HashMap<(u8, usize), Arc<PChart>>>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

pub fn p_chart(n: u8, k: usize) -> Arc<PChart> {
    assert!(n >= 2, "need at least two generators");
    assert!(k >= 1);
    if let Some(c) = chart_registry().read().unwrap().get(&(n, k)) {
        return c.clone();
    }
    let basis = lyndon_basis(n, k);
    let mut cols = Vec::new();
    for i in 1..=n {
        for m in 0..basis.len() as u32 {
            if k == 1 && basis.word(m) == [i] {
                continue;
            }
            cols.push((i, m));
        }
    }
    let col_index: HashMap<(u8, u32), u32> =
        cols.iter().enumerate().map(|(c, &key)| (key, c as u32)).collect();
    let mut blocks: BTreeMap<Composition, Vec<u32>> = BTreeMap::new();
    let mut col_comp = Vec::with_capacity(cols.len());
    for (c, &(i, m)) in cols.iter().enumerate() {
        let mut content = basis.tree(m).content(n);
        content[i as usize - 1] += 1;
        let comp = Composition::from_padded(content);
        blocks.entry(comp.clone()).or_default().push(c as u32);
        col_comp.push(comp);
    }
    let chart = Arc::new(PChart { n, k, cols, col_index, blocks, col_comp });
    let mut reg = chart_registry().write().unwrap();
    reg.entry((n, k)).or_insert(chart).clone()
}

/// A sparse integer vector in chart coordinates.
pub type ChartVec = Vec<(u32, Int)>;

// ---------------------------------------------------------------------------
// Blocks of the special kernel
// ---------------------------------------------------------------------------

/// One composition block: the chart map restricted to columns of content α,
/// its matrix, and the Hermite basis of its saturated kernel lattice.
pub struct KernelBlock {
    /// Chart column ids of this block, ascending.
    pub cols: Vec<u32>,
    /// For each column, coordinates of `[m, x_i]` in the degree-(k+1) basis.
    pub mu: Vec<Vec<(u32, Int)>>,
    /// Hermite basis rows of the kernel, over local column positions.
    pub basis: Vec<Vec<Int>>,
    /// Pivot positions of the Hermite rows.
    pub pivots: Vec<usize>,
}

impl KernelBlock {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Express a local dense integer vector in the kernel basis over ℤ.
    pub fn express(&self, local: &[Int]) -> Option<Vec<Int>> {
        exactlin::dense::solve_in_hnf(&self.basis, &self.pivots, local)
    }
}

fn block_registry() -> &'static RwLock<HashMap<(u8, usize, Composition), Arc<KernelBlock>>> {
    static REG: OnceLock<RwLock<HashMap<(u8, usize, Composition), Arc<KernelBlock>>>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The kernel block of 𝔟ₙ(k) for one composition α of k+1, cached.
pub fn kernel_block(n: u8, k: usize, alpha: &Composition) -> Arc<KernelBlock> {
    let key = (n, k, alpha.clone());
    if let Some(b) = block_registry().read().unwrap().get(&key) {
        return b.clone();
    }
    let block = Arc::new(compute_kernel_block(n, k, alpha));
    let mut reg = block_registry().write().unwrap();
    reg.entry(key).or_insert(block).clone()
}

fn compute_kernel_block(n: u8, k: usize, alpha: &Composition) -> KernelBlock {
    let chart = p_chart(n, k);
    let cols = chart.blocks.get(alpha).cloned().unwrap_or_default();
    let basis_k = lyndon_basis(n, k);
    // Columns of the chart map: coordinates of [m, x_i] in degree k+1.
    let mu: Vec<Vec<(u32, Int)>> = cols
        .iter()
        .map(|&c| {
            let (i, m) = chart.cols[c as usize];
            let tree = BracketTree::node(basis_k.tree(m).clone(), BracketTree::leaf(i));
            normalize_tree(n, &tree)
        })
        .collect();
    // Local row indexing over the target monomials that actually appear.
    let mut row_ids: Vec<u32> = mu.iter().flat_map(|col| col.iter().map(|&(r, _)| r)).collect();
    row_ids.sort_unstable();
    row_ids.dedup();
    let row_pos: HashMap<u32, usize> = row_ids.iter().enumerate().map(|(p, &r)| (r, p)).collect();
    let mut rows = vec![vec![Int::zero(); cols.len()]; row_ids.len()];
    for (cpos, col) in mu.iter().enumerate() {
        for &(r, ref v) in col {
            rows[row_pos[&r]][cpos] = v.clone();
        }
    }
    let basis = exactlin::dense::kernel_lattice(&rows, cols.len());
    let pivots = basis
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).expect("zero kernel basis row"))
        .collect();
    KernelBlock { cols, mu, basis, pivots }
}

// ---------------------------------------------------------------------------
// DerSubspace
// ---------------------------------------------------------------------------

/// A sublattice of 𝔭ₙ(k) in chart coordinates, graded by composition.
/// Each block holds a canonical Hermite basis over its chart columns.
pub struct DerSubspace {
    pub n: u8,
    pub k: usize,
    pub chart: Arc<PChart>,
    pub blocks: BTreeMap<Composition, SubspaceBlock>,
}

pub struct SubspaceBlock {
    pub cols: Vec<u32>,
    pub basis: Vec<Vec<Int>>,
    pub pivots: Vec<usize>,
}

impl SubspaceBlock {
    pub fn express(&self, local: &[Int]) -> Option<Vec<Int>> {
        exactlin::dense::solve_in_hnf(&self.basis, &self.pivots, local)
    }
}

impl DerSubspace {
    pub fn rank(&self) -> usize {
        self.blocks.values().map(|b| b.basis.len()).sum()
    }

    /// Basis vectors as global sparse chart vectors, block by block.
    pub fn chart_vectors(&self) -> Vec<ChartVec> {
        let mut out = Vec::with_capacity(self.rank());
        for block in self.blocks.values() {
            for row in &block.basis {
                let v: ChartVec = row
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(p, x)| (block.cols[p], x.clone()))
                    .collect();
                out.push(v);
            }
        }
        out
    }

    /// The underlying lattice in chart coordinates.
    pub fn lattice(&self) -> Lattice {
        let mut l = Lattice::new(self.chart.dim());
        for v in self.chart_vectors() {
            l.push_sparse(v);
        }
        l
    }

    /// Basis vectors as derivation elements.
    pub fn basis_elements(&self) -> Vec<DerElement> {
        self.chart_vectors().iter().map(|v| chart_vec_to_der(&self.chart, v)).collect()
    }

    /// Integral coordinates of a chart vector in this subspace's basis, or
    /// `None` if it is not in the lattice. Coordinate order matches
    /// `chart_vectors`.
    pub fn express_chart_vec(&self, v: &ChartVec) -> Option<Vec<Int>> {
        // Split the vector over blocks; every touched block must exist.
        let mut per_block: BTreeMap<&Composition, Vec<(u32, Int)>> = BTreeMap::new();
        for &(c, ref x) in v {
            per_block
                .entry(self.chart.composition_of_col(c))
                .or_default()
                .push((c, x.clone()));
        }
        let mut coords = Vec::with_capacity(self.rank());
        for (alpha, block) in &self.blocks {
            let piece = per_block.remove(alpha);
            let mut local = vec![Int::zero(); block.cols.len()];
            if let Some(piece) = piece {
                for (c, x) in piece {
                    let p = block.cols.binary_search(&c).ok()?;
                    local[p] = x;
                }
            }
            coords.extend(block.express(&local)?);
        }
        // Any leftover block piece is outside the subspace's support.
        if per_block.values().any(|p| !p.is_empty()) {
            return None;
        }
        Some(coords)
    }

    /// Per-composition ranks.
    pub fn block_ranks(&self) -> BTreeMap<Composition, usize> {
        self.blocks.iter().map(|(a, b)| (a.clone(), b.basis.len())).collect()
    }
}

/// Convert a sparse chart vector to a derivation element.
pub fn chart_vec_to_der(chart: &PChart, v: &ChartVec) -> DerElement {
    let mut out = DerElement::zero(chart.n, chart.k);
    for &(c, ref x) in v {
        let (i, _) = chart.cols[c as usize];
        let block = kernel_block(chart.n, chart.k, chart.composition_of_col(c));
        let p = block.cols.binary_search(&c).expect("column missing from its block");
        for &(r, ref e) in &block.mu[p] {
            out.add_term(i, r, Rat::from_integer(x * e));
        }
    }
    out
}

/// 𝔟ₙ(k): the special derivations, as a saturated kernel lattice in the
/// tangential chart. Rank is binom(n,2) for k = 1 and
/// `n·rₙ(k) − rₙ(k+1)` for k ≥ 2.
pub fn special_kernel(n: u8, k: usize) -> Arc<DerSubspace> {
    static REG: OnceLock<RwLock<HashMap<(u8, usize), Arc<DerSubspace>>>> = OnceLock::new();
    let reg = REG.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(s) = reg.read().unwrap().get(&(n, k)) {
        return s.clone();
    }
    let chart = p_chart(n, k);
    let alphas: Vec<Composition> = chart.blocks.keys().cloned().collect();
    let computed: Vec<(Composition, Arc<KernelBlock>)> = alphas
        .into_par_iter()
        .map(|a| {
            let b = kernel_block(n, k, &a);
            (a, b)
        })
        .collect();
    let mut blocks = BTreeMap::new();
    for (a, b) in computed {
        if b.rank() > 0 {
            blocks.insert(
                a,
                SubspaceBlock { cols: b.cols.clone(), basis: b.basis.clone(), pivots: b.pivots.clone() },
            );
        }
    }
    let sub = Arc::new(DerSubspace { n, k, chart, blocks });
    let mut w = reg.write().unwrap();
    w.entry((n, k)).or_insert(sub).clone()
}

/// 𝔭ₙ(k) as a subspace in its own chart (the full lattice), with the chart
/// generators verified to be ℤ-independent by a rank computation per dual
/// index.
pub fn tangential_basis(n: u8, k: usize) -> DerSubspace {
    let chart = p_chart(n, k);
    // Verification: for each dual index, the values [m, x_i] are independent.
    for i in 1..=n {
        let cols: Vec<u32> = (0..chart.cols.len() as u32)
            .filter(|&c| chart.cols[c as usize].0 == i)
            .collect();
        let mut rows_map: BTreeMap<u32, usize> = BTreeMap::new();
        let mut triplets = Vec::new();
        for (p, &c) in cols.iter().enumerate() {
            let (_, m) = chart.cols[c as usize];
            let tree = BracketTree::node(lyndon_basis(n, k).tree(m).clone(), BracketTree::leaf(i));
            for (r, v) in normalize_tree(n, &tree) {
                let next = rows_map.len();
                let row = *rows_map.entry(r).or_insert(next);
                triplets.push((row, p, v));
            }
        }
        let mut rows = vec![vec![Int::zero(); cols.len()]; rows_map.len()];
        for (r, p, v) in triplets {
            rows[r][p] = v;
        }
        let rank = exactlin::dense::bareiss_rank(rows);
        assert_eq!(rank, cols.len(), "tangential generators dependent for dual {}", i);
    }
    let mut blocks = BTreeMap::new();
    for (alpha, cols) in &chart.blocks {
        let m = cols.len();
        blocks.insert(
            alpha.clone(),
            SubspaceBlock {
                cols: cols.clone(),
                basis: exactlin::dense::identity_rows(m),
                pivots: (0..m).collect(),
            },
        );
    }
    DerSubspace { n, k, chart, blocks }
}

/// 𝔟ₙ(k, α) = 𝔭ₙ(k, α) ∩ 𝔟ₙ(k): the block of the kernel lattice over the
/// columns whose letter content is α.
pub fn component_basis(n: u8, k: usize, alpha: &Composition) -> Result<DerSubspace> {
    if alpha.sum() != k + 1 {
        return Err(Error::InvalidComposition(format!(
            "composition sums to {} but must sum to {}",
            alpha.sum(),
            k + 1
        )));
    }
    let chart = p_chart(n, k);
    let b = kernel_block(n, k, alpha);
    let mut blocks = BTreeMap::new();
    if b.rank() > 0 {
        blocks.insert(
            alpha.clone(),
            SubspaceBlock { cols: b.cols.clone(), basis: b.basis.clone(), pivots: b.pivots.clone() },
        );
    }
    Ok(DerSubspace { n, k, chart, blocks })
}

/// Ranks of 𝔟ₙ(k, α) per orbit: partition representative → (component rank,
/// orbit size). The sum of `rank × size` over the map is rank 𝔟ₙ(k).
pub fn orbit_decomposition(n: u8, k: usize) -> BTreeMap<Composition, (usize, u64)> {
    let mut out = BTreeMap::new();
    for alpha in Composition::enumerate(n, k + 1) {
        let key = alpha.partition_key();
        if out.contains_key(&key) {
            continue;
        }
        let rank = kernel_block(n, k, &key).rank();
        let size = key.orbit_size();
        out.insert(key, (rank, size));
    }
    out
}

/// Rank of 𝔟ₙ(k) predicted by the closed formula.
pub fn special_rank_formula(n: u64, k: u64) -> u64 {
    if k == 1 {
        crate::util::binomial(n, 2)
    } else {
        n * crate::freelie::witt_rank(n, k) - crate::freelie::witt_rank(n, k + 1)
    }
}

// ---------------------------------------------------------------------------
// Tangential sums
// ---------------------------------------------------------------------------

/// A formal sum Σ c · x_d* ⊗ [prefix, x_d]; closed under the derivation
/// bracket, which is what makes lattice generation by brackets cheap (no
/// linear solves to come back to the chart).
#[derive(Debug, Clone)]
pub struct Tangential {
    pub n: u8,
    /// Derivation degree (= prefix weight).
    pub k: usize,
    pub terms: Vec<(GeneratorIndex, BracketTree, Rat)>,
}

impl Tangential {
    pub fn new(n: u8, k: usize) -> Self {
        Tangential { n, k, terms: Vec::new() }
    }

    pub fn push(&mut self, dual: GeneratorIndex, prefix: BracketTree, c: Rat) {
        debug_assert_eq!(prefix.degree(), self.k);
        debug_assert!(dual >= 1 && dual <= self.n);
        self.terms.push((dual, prefix, c));
    }

    /// Chart coordinates (normalizing every prefix). Degenerate k = 1 terms
    /// `x_i* ⊗ [x_i, x_i]` vanish and are dropped.
    pub fn chart_vec(&self, chart: &PChart) -> ChartVec {
        assert_eq!((chart.n, chart.k), (self.n, self.k));
        let mut acc: BTreeMap<u32, Rat> = BTreeMap::new();
        for (dual, prefix, c) in &self.terms {
            for (m, ic) in normalize_tree(self.n, prefix) {
                if let Some(col) = chart.col_of(*dual, m) {
                    let e = acc.entry(col).or_insert_with(Rat::zero);
                    *e += c * Rat::from_integer(ic);
                } else {
                    debug_assert!(chart.k == 1, "missing chart column");
                }
            }
        }
        acc.into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(col, c)| {
                assert!(c.is_integer(), "chart vector must be integral here");
                (col, c.to_integer())
            })
            .collect()
    }

    pub fn to_der(&self) -> Result<DerElement> {
        let values: Vec<(GeneratorIndex, BracketTree, Rat)> = self
            .terms
            .iter()
            .map(|(d, p, c)| {
                (*d, BracketTree::node(p.clone(), BracketTree::leaf(*d)), c.clone())
            })
            .collect();
        DerElement::from_values(self.n, self.k, &values)
    }
}

/// Expand `[v, u]` into tangential terms by peeling `u` down to leaves:
/// `[v, x_m] = x_m* value`, `[v, [u₁,u₂]] = [[v,u₁],u₂] − [[v,u₂],u₁]`.
pub fn tangentialize(v: &BracketTree, u: &BracketTree, coeff: Rat, out: &mut Tangential) {
    match u {
        BracketTree::Leaf(m) => out.push(*m, v.clone(), coeff),
        BracketTree::Node(u1, u2) => {
            tangentialize(&BracketTree::node(v.clone(), (**u1).clone()), u2, coeff.clone(), out);
            tangentialize(&BracketTree::node(v.clone(), (**u2).clone()), u1, -coeff, out);
        }
    }
}

/// Derivation bracket of tangential sums, staying tangential.
pub fn tang_bracket(f: &Tangential, g: &Tangential) -> Tangential {
    assert_eq!(f.n, g.n);
    let n = f.n;
    let mut out = Tangential::new(n, f.k + g.k);
    for (a, s, ca) in &f.terms {
        for (b, t, cb) in &g.terms {
            let c = ca * cb;
            if c.is_zero() {
                continue;
            }
            let val_g = BracketTree::node(t.clone(), BracketTree::leaf(*b));
            let val_f = BracketTree::node(s.clone(), BracketTree::leaf(*a));
            // x_a* ⊗ [D_g S, x_a] − x_b* ⊗ [D_f T, x_b]
            for s2 in s.substitute_each(*b, &val_g) {
                out.push(*a, s2, c.clone());
            }
            for t2 in t.substitute_each(*a, &val_f) {
                out.push(*b, t2, -c.clone());
            }
            if a == b {
                // x_a* ⊗ ([S,[T,x_a]] − [T,[S,x_a]]) = x_a* ⊗ [[S,T],x_a].
                out.push(*a, BracketTree::node(s.clone(), t.clone()), c.clone());
            }
        }
    }
    out
}

/// Tangential form of a chart vector (each chart column is tangential).
pub fn tang_from_chart_vec(chart: &PChart, v: &ChartVec) -> Tangential {
    let mut out = Tangential::new(chart.n, chart.k);
    for &(c, ref x) in v {
        let (dual, prefix) = chart.tangential_form(c);
        out.push(dual, prefix, Rat::from_integer(x.clone()));
    }
    out
}

/// Decompose a derivation element in the tangential chart over ℚ, solving
/// per dual index and content class. Errors when the element is not
/// tangential.
pub fn tangential_chart_coords(elem: &DerElement) -> Result<Vec<(u32, Rat)>> {
    let n = elem.n();
    let k = elem.degree();
    let chart = p_chart(n, k);
    let basis_hi = lyndon_basis(n, k + 1);
    // Group the element's terms by (dual, target content).
    let mut groups: BTreeMap<(u8, Composition), Vec<(u32, Rat)>> = BTreeMap::new();
    for (i, m, c) in elem.terms() {
        let gamma = Composition::from_padded(basis_hi.tree(m).content(n));
        groups.entry((i, gamma)).or_default().push((m, c.clone()));
    }
    let mut out: Vec<(u32, Rat)> = Vec::new();
    for ((i, gamma), targets) in groups {
        if gamma.parts()[i as usize - 1] == 0 {
            return Err(Error::InvalidArgument(
                "element is not tangential: value lacks the dual letter".into(),
            ));
        }
        let block = kernel_block(n, k, &gamma);
        // Columns of this block with dual index i.
        let local: Vec<usize> = (0..block.cols.len())
            .filter(|&p| chart.cols[block.cols[p] as usize].0 == i)
            .collect();
        // Solve Σ c_p mu[p] = targets over Q.
        let mut row_ids: Vec<u32> = local
            .iter()
            .flat_map(|&p| block.mu[p].iter().map(|&(r, _)| r))
            .chain(targets.iter().map(|&(r, _)| r))
            .collect();
        row_ids.sort_unstable();
        row_ids.dedup();
        let rpos: HashMap<u32, usize> = row_ids.iter().enumerate().map(|(p, &r)| (r, p)).collect();
        let mut rows: Vec<Vec<Rat>> = local
            .iter()
            .map(|&p| {
                let mut row = vec![Rat::zero(); row_ids.len() + local.len()];
                for &(r, ref v) in &block.mu[p] {
                    row[rpos[&r]] = Rat::from_integer(v.clone());
                }
                row
            })
            .collect();
        for (idx, row) in rows.iter_mut().enumerate() {
            row[row_ids.len() + idx] = Rat::one();
        }
        let mut rhs = vec![Rat::zero(); row_ids.len()];
        for &(r, ref c) in &targets {
            rhs[rpos[&r]] = c.clone();
        }
        // Row-reduce the generator rows (augmented with trackers), then
        // reduce the rhs through the echelon.
        let ncols = row_ids.len();
        let mut pivots: Vec<usize> = Vec::new();
        let mut rix = 0;
        for col in 0..ncols {
            if rix >= rows.len() {
                break;
            }
            let Some(p) = (rix..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(rix, p);
            let inv = rows[rix][col].clone();
            for j in 0..rows[rix].len() {
                let t = &rows[rix][j] / &inv;
                rows[rix][j] = t;
            }
            for r in 0..rows.len() {
                if r != rix && !rows[r][col].is_zero() {
                    let f = rows[r][col].clone();
                    for j in 0..rows[r].len() {
                        let t = &rows[r][j] - &f * &rows[rix][j];
                        rows[r][j] = t;
                    }
                }
            }
            pivots.push(col);
            rix += 1;
        }
        let mut coeffs = vec![Rat::zero(); local.len()];
        for (r, &pc) in pivots.iter().enumerate() {
            if rhs[pc].is_zero() {
                continue;
            }
            let f = rhs[pc].clone();
            for j in 0..ncols {
                let t = &rhs[j] - &f * &rows[r][j];
                rhs[j] = t;
            }
            for j in 0..local.len() {
                let t = &coeffs[j] + &f * &rows[r][ncols + j];
                coeffs[j] = t;
            }
        }
        if rhs.iter().any(|x| !x.is_zero()) {
            return Err(Error::InvalidArgument("element is not tangential".into()));
        }
        for (idx, &p) in local.iter().enumerate() {
            if !coeffs[idx].is_zero() {
                out.push((block.cols[p], coeffs[idx].clone()));
            }
        }
    }
    out.sort_by_key(|&(c, _)| c);
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests;
