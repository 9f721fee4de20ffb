//! The free Lie algebra on generators x₁,…,xₙ, graded by bracket weight.
//!
//! Basis monomials are the Lyndon words of each degree with their standard
//! factorization bracketing, ordered lexicographically. Normalization of an
//! arbitrary bracket expression goes through the tensor embedding: the
//! embedding of the Lyndon monomial for a word `w` is `w` plus
//! lexicographically larger words, so a single forward pass of leading-word
//! elimination produces canonical coordinates and simultaneously certifies
//! that the input was a Lie element (the residual must vanish).

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};

use crate::exactlin::{Int, Rat};
use crate::util::{divisors, moebius};
use crate::{Error, Result};

/// Maximum number of generators supported by the packed word encoding.
pub const MAX_N: u8 = 12;
/// Maximum degree supported by the packed word encoding.
pub const MAX_DEGREE: usize = 16;

/// A generator index, 1-based: `1 ≤ i ≤ n`.
pub type GeneratorIndex = u8;

/// A formal bracket expression: either a generator or an ordered pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BracketTree {
    Leaf(GeneratorIndex),
    Node(Box<BracketTree>, Box<BracketTree>),
}

impl BracketTree {
    pub fn leaf(i: GeneratorIndex) -> Self {
        BracketTree::Leaf(i)
    }

    pub fn node(left: BracketTree, right: BracketTree) -> Self {
        BracketTree::Node(Box::new(left), Box::new(right))
    }

    /// Left-normed commutator `[x_{w₁}, x_{w₂}, …, x_{w_m}]`.
    pub fn left_normed(word: &[GeneratorIndex]) -> Self {
        assert!(!word.is_empty(), "empty commutator");
        let mut t = BracketTree::leaf(word[0]);
        for &g in &word[1..] {
            t = BracketTree::node(t, BracketTree::leaf(g));
        }
        t
    }

    /// Number of leaves.
    pub fn degree(&self) -> usize {
        match self {
            BracketTree::Leaf(_) => 1,
            BracketTree::Node(l, r) => l.degree() + r.degree(),
        }
    }

    pub fn max_letter(&self) -> GeneratorIndex {
        match self {
            BracketTree::Leaf(i) => *i,
            BracketTree::Node(l, r) => l.max_letter().max(r.max_letter()),
        }
    }

    /// Letter multiplicities as a length-`n` vector.
    pub fn content(&self, n: u8) -> Vec<u8> {
        let mut c = vec![0u8; n as usize];
        self.fill_content(&mut c);
        c
    }

    fn fill_content(&self, c: &mut [u8]) {
        match self {
            BracketTree::Leaf(i) => c[*i as usize - 1] += 1,
            BracketTree::Node(l, r) => {
                l.fill_content(c);
                r.fill_content(c);
            }
        }
    }

    /// Relabel leaves through `perm` (`perm[i-1]` is the image of letter `i`).
    pub fn relabel(&self, perm: &[GeneratorIndex]) -> BracketTree {
        match self {
            BracketTree::Leaf(i) => BracketTree::Leaf(perm[*i as usize - 1]),
            BracketTree::Node(l, r) => BracketTree::node(l.relabel(perm), r.relabel(perm)),
        }
    }

    /// All trees obtained by replacing one occurrence of the letter `g` by
    /// `replacement` (one tree per occurrence).
    pub fn substitute_each(&self, g: GeneratorIndex, replacement: &BracketTree) -> Vec<BracketTree> {
        match self {
            BracketTree::Leaf(i) => {
                if *i == g {
                    vec![replacement.clone()]
                } else {
                    Vec::new()
                }
            }
            BracketTree::Node(l, r) => {
                let mut out = Vec::new();
                for lt in l.substitute_each(g, replacement) {
                    out.push(BracketTree::node(lt, (**r).clone()));
                }
                for rt in r.substitute_each(g, replacement) {
                    out.push(BracketTree::node((**l).clone(), rt));
                }
                out
            }
        }
    }

    /// Serialize as nested arrays of 1-based integers, e.g. `[[3,1],2]`.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            BracketTree::Leaf(i) => serde_json::Value::from(*i),
            BracketTree::Node(l, r) => serde_json::Value::Array(vec![l.to_json(), r.to_json()]),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<BracketTree> {
        match v {
            serde_json::Value::Number(x) => {
                let i = x
                    .as_u64()
                    .filter(|&i| i >= 1 && i <= MAX_N as u64)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad generator index {}", x)))?;
                Ok(BracketTree::Leaf(i as u8))
            }
            serde_json::Value::Array(items) if items.len() == 2 => Ok(BracketTree::node(
                BracketTree::from_json(&items[0])?,
                BracketTree::from_json(&items[1])?,
            )),
            other => Err(Error::InvalidArgument(format!("bad bracket tree: {}", other))),
        }
    }
}

impl std::fmt::Display for BracketTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BracketTree::Leaf(i) => write!(f, "{}", i),
            BracketTree::Node(l, r) => write!(f, "[{},{}]", l, r),
        }
    }
}

// ---------------------------------------------------------------------------
// Words
// ---------------------------------------------------------------------------

/// Pack a word into a `u64`, 4 bits per letter, first letter in the high
/// bits so that packed comparison of same-length words is lexicographic.
fn pack(word: &[u8]) -> u64 {
    debug_assert!(word.len() <= MAX_DEGREE);
    let mut v = 0u64;
    for &g in word {
        debug_assert!(g >= 1 && g <= MAX_N);
        v = (v << 4) | g as u64;
    }
    v
}

fn unpack(mut v: u64, len: usize) -> Vec<u8> {
    let mut w = vec![0u8; len];
    for i in (0..len).rev() {
        w[i] = (v & 0xf) as u8;
        v >>= 4;
    }
    w
}

fn is_lyndon(w: &[u8]) -> bool {
    let m = w.len();
    if m == 1 {
        return true;
    }
    let mut rot = Vec::with_capacity(m);
    for s in 1..m {
        rot.clear();
        rot.extend_from_slice(&w[s..]);
        rot.extend_from_slice(&w[..s]);
        if rot.as_slice() <= w {
            return false;
        }
    }
    true
}

/// Standard factorization bracketing of a Lyndon word: split at the
/// lexicographically smallest proper suffix.
fn lyndon_tree(w: &[u8]) -> BracketTree {
    if w.len() == 1 {
        return BracketTree::leaf(w[0]);
    }
    let mut split = 1;
    for s in 1..w.len() {
        if w[s..] < w[split..] {
            split = s;
        }
    }
    BracketTree::node(lyndon_tree(&w[..split]), lyndon_tree(&w[split..]))
}

// ---------------------------------------------------------------------------
// Basis registry
// ---------------------------------------------------------------------------

/// The Lyndon basis of ℒₙ(k): words in lexicographic order with their
/// standard bracketings.
pub struct LyndonBasis {
    n: u8,
    degree: usize,
    words: Vec<Vec<u8>>,
    trees: Vec<BracketTree>,
    id_by_packed: HashMap<u64, u32>,
}

impl LyndonBasis {
    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, id: u32) -> &[u8] {
        &self.words[id as usize]
    }

    pub fn tree(&self, id: u32) -> &BracketTree {
        &self.trees[id as usize]
    }

    pub fn monomials(&self) -> &[BracketTree] {
        &self.trees
    }

    pub fn id_of_word(&self, w: &[u8]) -> Option<u32> {
        self.id_by_packed.get(&pack(w)).copied()
    }
}

fn basis_registry() -> &'static RwLock<HashMap<(u8, usize), Arc<LyndonBasis>>> {
    static REG: OnceLock<RwLock<HashMap<(u8, usize), Arc<LyndonBasis>>>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The Lyndon basis of ℒₙ(k), cached per `(n, k)`.
pub fn lyndon_basis(n: u8, degree: usize) -> Arc<LyndonBasis> {
    assert!(n >= 1 && n <= MAX_N, "n out of range");
    assert!(degree >= 1 && degree <= MAX_DEGREE, "degree out of range");
    if let Some(b) = basis_registry().read().unwrap().get(&(n, degree)) {
        return b.clone();
    }
    let words = duval_lyndon_words(n, degree);
    let trees: Vec<BracketTree> = words.iter().map(|w| lyndon_tree(w)).collect();
    let id_by_packed = words
        .iter()
        .enumerate()
        .map(|(i, w)| (pack(w), i as u32))
        .collect();
    let basis = Arc::new(LyndonBasis { n, degree, words, trees, id_by_packed });
    let mut reg = basis_registry().write().unwrap();
    reg.entry((n, degree)).or_insert(basis).clone()
}

/// All Lyndon words of length exactly `k` over `1..=n`, in lexicographic
/// order (Duval's algorithm).
fn duval_lyndon_words(n: u8, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut w = vec![1u8];
    loop {
        if w.len() == k {
            out.push(w.clone());
        }
        let len = w.len();
        while w.len() < k {
            let c = w[w.len() - len];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == n {
                w.pop();
            } else {
                break;
            }
        }
        if w.is_empty() {
            break;
        }
        *w.last_mut().unwrap() += 1;
    }
    out
}

/// Rank of ℒₙ(k): `(1/k) Σ_{d|k} μ(d) n^{k/d}`.
pub fn witt_rank(n: u64, k: u64) -> u64 {
    assert!(n >= 1 && k >= 1);
    let mut sum: i128 = 0;
    for d in divisors(k) {
        let mu = moebius(d) as i128;
        if mu == 0 {
            continue;
        }
        sum += mu * (n as i128).pow((k / d) as u32);
    }
    debug_assert!(sum >= 0 && sum % k as i128 == 0);
    (sum / k as i128) as u64
}

/// Ordered basis monomials of ℒₙ(k).
pub fn basis_monomials(n: u8, k: usize) -> Vec<BracketTree> {
    lyndon_basis(n, k).monomials().to_vec()
}

// ---------------------------------------------------------------------------
// Content classes and normalization
// ---------------------------------------------------------------------------

/// All words with letter multiplicities `content`, in lexicographic order,
/// together with the Lyndon members and their embeddings into the class.
pub(crate) struct WordClass {
    pub words: Vec<u64>,
    /// Map class position → (global monomial id, embedding as sorted
    /// (position, coefficient) pairs). Only Lyndon positions appear; the
    /// embedding's first entry is always `(position, 1)`.
    pub lyndon_at: HashMap<u32, (u32, Vec<(u32, i64)>)>,
}

impl WordClass {
    pub fn position(&self, packed: u64) -> Option<u32> {
        self.words.binary_search(&packed).ok().map(|p| p as u32)
    }
}

fn class_registry() -> &'static RwLock<HashMap<(u8, Vec<u8>), Arc<WordClass>>> {
    static REG: OnceLock<RwLock<HashMap<(u8, Vec<u8>), Arc<WordClass>>>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

pub(crate) fn word_class(n: u8, content: &[u8]) -> Arc<WordClass> {
    if let Some(c) = class_registry().read().unwrap().get(&(n, content.to_vec())) {
        return c.clone();
    }
    let degree: usize = content.iter().map(|&c| c as usize).sum();
    let basis = lyndon_basis(n, degree);
    let mut words = Vec::new();
    let mut counts = content.to_vec();
    let mut current = Vec::with_capacity(degree);
    enumerate_class(&mut counts, &mut current, &mut words);
    words.sort_unstable();
    let mut lyndon_at = HashMap::new();
    for (pos, &packed) in words.iter().enumerate() {
        let w = unpack(packed, degree);
        if is_lyndon(&w) {
            let id = basis.id_of_word(&w).expect("Lyndon word missing from basis");
            let emb = embed_tree_positions(basis.tree(id), &words);
            debug_assert_eq!(emb.first(), Some(&(pos as u32, 1i64)), "embedding not unitriangular");
            lyndon_at.insert(pos as u32, (id, emb));
        }
    }
    let class = Arc::new(WordClass { words, lyndon_at });
    let mut reg = class_registry().write().unwrap();
    reg.entry((n, content.to_vec())).or_insert(class).clone()
}

fn enumerate_class(counts: &mut Vec<u8>, current: &mut Vec<u8>, out: &mut Vec<u64>) {
    if counts.iter().all(|&c| c == 0) {
        out.push(pack(current));
        return;
    }
    for i in 0..counts.len() {
        if counts[i] > 0 {
            counts[i] -= 1;
            current.push(i as u8 + 1);
            enumerate_class(counts, current, out);
            current.pop();
            counts[i] += 1;
        }
    }
}

/// Expand a bracket tree in the tensor algebra: packed word → coefficient.
fn expand_tree(tree: &BracketTree) -> HashMap<u64, i128> {
    match tree {
        BracketTree::Leaf(i) => {
            let mut m = HashMap::new();
            m.insert(*i as u64, 1i128);
            m
        }
        BracketTree::Node(l, r) => {
            let el = expand_tree(l);
            let er = expand_tree(r);
            let rl = r.degree();
            let ll = l.degree();
            let mut m = HashMap::new();
            for (&wl, &cl) in &el {
                for (&wr, &cr) in &er {
                    let c = cl.checked_mul(cr).expect("tensor coefficient overflow");
                    let fwd = (wl << (4 * rl)) | wr;
                    let bwd = (wr << (4 * ll)) | wl;
                    *m.entry(fwd).or_insert(0) += c;
                    *m.entry(bwd).or_insert(0) -= c;
                }
            }
            m.retain(|_, c| *c != 0);
            m
        }
    }
}

fn embed_tree_positions(tree: &BracketTree, class_words: &[u64]) -> Vec<(u32, i64)> {
    let exp = expand_tree(tree);
    let mut out: Vec<(u32, i64)> = exp
        .into_iter()
        .map(|(w, c)| {
            let pos = class_words.binary_search(&w).expect("word outside its content class");
            (pos as u32, i64::try_from(c).expect("embedding coefficient overflow"))
        })
        .collect();
    out.sort_unstable_by_key(|&(p, _)| p);
    out
}

/// Canonical coordinates of a single tree, with integer coefficients.
pub(crate) fn normalize_tree(n: u8, tree: &BracketTree) -> Vec<(u32, Int)> {
    assert!(tree.max_letter() <= n, "leaf out of range for n={}", n);
    let content = tree.content(n);
    let class = word_class(n, &content);
    let mut dense = vec![0i128; class.words.len()];
    for (w, c) in expand_tree(tree) {
        let pos = class.position(w).expect("word outside class") as usize;
        dense[pos] = c;
    }
    eliminate_in_class(&class, &mut dense)
}

/// Forward leading-word elimination of a class-dense vector; returns Lyndon
/// coordinates and checks the residual vanishes.
fn eliminate_in_class(class: &WordClass, dense: &mut [i128]) -> Vec<(u32, Int)> {
    let mut coords = Vec::new();
    for pos in 0..dense.len() {
        let c = dense[pos];
        if c == 0 {
            continue;
        }
        let (id, emb) = class
            .lyndon_at
            .get(&(pos as u32))
            .expect("leading word of a Lie element must be Lyndon");
        for &(p, e) in emb {
            let delta = c.checked_mul(e as i128).expect("elimination overflow");
            dense[p as usize] = dense[p as usize].checked_sub(delta).expect("elimination overflow");
        }
        coords.push((*id, Int::from(c)));
    }
    debug_assert!(dense.iter().all(|&x| x == 0));
    coords
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// An exact-rational linear combination of basis monomials of fixed degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    n: u8,
    degree: usize,
    terms: BTreeMap<u32, Rat>,
}

impl LieElement {
    pub fn zero(n: u8, degree: usize) -> Self {
        assert!(degree >= 1, "gradings start at 1");
        LieElement { n, degree, terms: BTreeMap::new() }
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

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rat)> {
        self.terms.iter().map(|(&id, c)| (id, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, id: u32) -> Rat {
        self.terms.get(&id).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn monomial(n: u8, degree: usize, id: u32) -> Self {
        let mut e = LieElement::zero(n, degree);
        e.add_term(id, Rat::one());
        e
    }

    pub fn add_term(&mut self, id: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(id).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&id);
        }
    }

    pub fn add_assign(&mut self, other: &LieElement) {
        assert_eq!((self.n, self.degree), (other.n, other.degree), "grade mismatch");
        for (&id, c) in &other.terms {
            self.add_term(id, c.clone());
        }
    }

    pub fn scaled(&self, c: &Rat) -> LieElement {
        let mut out = LieElement::zero(self.n, self.degree);
        for (&id, v) in &self.terms {
            out.add_term(id, v * c);
        }
        out
    }

    pub fn sub(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        out.add_assign(&other.scaled(&-Rat::one()));
        out
    }

    /// Dense coordinate vector in the Lyndon basis of ℒₙ(degree).
    pub fn dense_coords(&self) -> Vec<Rat> {
        let len = lyndon_basis(self.n, self.degree).len();
        let mut v = vec![Rat::zero(); len];
        for (&id, c) in &self.terms {
            v[id as usize] = c.clone();
        }
        v
    }
}

/// Canonical coordinates of a formal ℚ-combination of bracket trees.
pub fn normalize(n: u8, items: &[(BracketTree, Rat)]) -> Result<LieElement> {
    let Some(degree) = items.first().map(|(t, _)| t.degree()) else {
        return Err(Error::InvalidArgument("empty combination has no degree".into()));
    };
    let mut out = LieElement::zero(n, degree);
    for (tree, c) in items {
        if tree.degree() != degree {
            return Err(Error::Dimension(format!(
                "inhomogeneous combination: degree {} vs {}",
                tree.degree(),
                degree
            )));
        }
        if tree.max_letter() > n {
            return Err(Error::InvalidIndices(format!("leaf exceeds n={}", n)));
        }
        if c.is_zero() {
            continue;
        }
        for (id, ic) in normalize_tree(n, tree) {
            out.add_term(id, c * Rat::from_integer(ic));
        }
    }
    Ok(out)
}

/// Canonical coordinates of a single tree.
pub fn normalize_one(n: u8, tree: &BracketTree) -> Result<LieElement> {
    normalize(n, &[(tree.clone(), Rat::one())])
}

/// The Lie bracket of two normalized elements; the result is normalized.
pub fn lie_bracket(a: &LieElement, b: &LieElement) -> LieElement {
    assert_eq!(a.n, b.n, "mismatched generator count");
    let n = a.n;
    let basis_a = lyndon_basis(n, a.degree);
    let basis_b = lyndon_basis(n, b.degree);
    let mut out = LieElement::zero(n, a.degree + b.degree);
    for (ida, ca) in a.terms() {
        for (idb, cb) in b.terms() {
            let tree = BracketTree::node(basis_a.tree(ida).clone(), basis_b.tree(idb).clone());
            let c = ca * cb;
            for (id, ic) in normalize_tree(n, &tree) {
                out.add_term(id, &c * Rat::from_integer(ic));
            }
        }
    }
    out
}

/// An element of H^{⊗k} with exact-rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorElement {
    n: u8,
    degree: usize,
    terms: BTreeMap<Vec<u8>, Rat>,
}

impl TensorElement {
    pub fn zero(n: u8, degree: usize) -> Self {
        TensorElement { n, degree, terms: BTreeMap::new() }
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

    pub fn add_term(&mut self, word: Vec<u8>, c: Rat) {
        assert_eq!(word.len(), self.degree, "word length mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, word: &[u8]) -> Rat {
        self.terms.get(word).cloned().unwrap_or_else(Rat::zero)
    }

    /// Concatenation product in the tensor algebra.
    pub fn concat(&self, other: &TensorElement) -> TensorElement {
        assert_eq!(self.n, other.n);
        let mut out = TensorElement::zero(self.n, self.degree + other.degree);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_term(w, ca * cb);
            }
        }
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }
}

/// The embedding ℒₙ(k) → H^{⊗k}, `[u,v] ↦ uv − vu` recursively.
pub fn tensor_embedding(a: &LieElement) -> TensorElement {
    let basis = lyndon_basis(a.n, a.degree);
    let mut out = TensorElement::zero(a.n, a.degree);
    for (id, c) in a.terms() {
        for (w, ic) in expand_tree(basis.tree(id)) {
            out.add_term(unpack(w, a.degree), c * Rat::from_integer(Int::from(ic)));
        }
    }
    out
}

/// Tensor expansion of a raw tree (used by the contraction maps).
pub(crate) fn expand_tree_words(tree: &BracketTree) -> Vec<(Vec<u8>, i128)> {
    let d = tree.degree();
    let mut out: Vec<(Vec<u8>, i128)> = expand_tree(tree)
        .into_iter()
        .map(|(w, c)| (unpack(w, d), c))
        .collect();
    out.sort_unstable();
    out
}
