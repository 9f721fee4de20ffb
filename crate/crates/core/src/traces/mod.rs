//! Contraction and trace maps on derivations.
//!
//! `Φ` contracts the dual leg against the first tensor slot of the embedded
//! value, `Ψ` against the second. Composing with the projections of
//! `H^{⊗k}` onto cyclic words, the symmetric power, or `H ⊗ Λ^{k-1}H`
//! yields the trace maps whose images and kernels carve up the special
//! derivation algebra.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::Zero;

use crate::derivations::{chart_vec_to_der, DerElement, DerSubspace};
use crate::exactlin::{presentation_from_coords, Int, Lattice, QuotientPresentation, Rat};
use crate::freelie::{expand_tree_words, lyndon_basis, TensorElement};
use crate::util::{binomial, divisors, euler_phi};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Contractions
// ---------------------------------------------------------------------------

/// `Φ^k`: contract the dual index against the first slot of the embedded
/// value, landing in `H^{⊗k}`.
pub fn contract_phi(d: &DerElement) -> TensorElement {
    contract_slot(d, 0)
}

/// `Ψ^k`: contract the dual index against the second slot of the embedded
/// value (the first and third tensor components counting the dual leg).
pub fn contract_psi(d: &DerElement) -> TensorElement {
    contract_slot(d, 1)
}

fn contract_slot(d: &DerElement, slot: usize) -> TensorElement {
    let n = d.n();
    let k = d.degree();
    let basis = lyndon_basis(n, k + 1);
    let mut out = TensorElement::zero(n, k);
    for (i, m, c) in d.terms() {
        for (w, e) in expand_tree_words(basis.tree(m)) {
            if w[slot] == i {
                let mut rest = Vec::with_capacity(k);
                rest.extend_from_slice(&w[..slot]);
                rest.extend_from_slice(&w[slot + 1..]);
                out.add_term(rest, c * Rat::from_integer(Int::from(e)));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Targets
// ---------------------------------------------------------------------------

/// A word in canonical necklace form (lexicographically minimal rotation).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicWord(Vec<u8>);

impl CyclicWord {
    pub fn canonical(word: &[u8]) -> Self {
        let m = word.len();
        let mut best = word.to_vec();
        let mut rot = Vec::with_capacity(m);
        for s in 1..m {
            rot.clear();
            rot.extend_from_slice(&word[s..]);
            rot.extend_from_slice(&word[..s]);
            if rot < best {
                best.clone_from(&rot);
            }
        }
        CyclicWord(best)
    }

    pub fn word(&self) -> &[u8] {
        &self.0
    }
}

/// A monomial of `S^k H`: the sorted letter multiset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymMonomial(Vec<u8>);

impl SymMonomial {
    pub fn from_word(word: &[u8]) -> Self {
        let mut w = word.to_vec();
        w.sort_unstable();
        SymMonomial(w)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }
}

/// The four trace targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TraceKind {
    /// 𝒞ₙ(k): cyclic words (necklaces).
    Cyclic,
    /// 𝒞ₙ(k) modulo the constant necklaces x_i^k.
    ReducedCyclic,
    /// S^k H.
    Symmetric,
    /// H ⊗ Λ^{k-1} H.
    Wedge,
}

/// An element of a trace target; keys are canonical basis labels:
/// necklace words, sorted monomial words, or `[head, tail…]` with strictly
/// increasing tail for the wedge target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceElement {
    pub kind: TraceKind,
    pub n: u8,
    pub k: usize,
    pub terms: BTreeMap<Vec<u8>, Rat>,
}

impl TraceElement {
    pub fn zero(kind: TraceKind, n: u8, k: usize) -> Self {
        TraceElement { kind, n, k, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, key: Vec<u8>, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &[u8]) -> Rat {
        self.terms.get(key).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn scaled(&self, c: &Rat) -> TraceElement {
        let mut out = TraceElement::zero(self.kind, self.n, self.k);
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    pub fn add_assign(&mut self, other: &TraceElement) {
        assert_eq!((self.kind, self.n, self.k), (other.kind, other.n, other.k));
        for (w, v) in &other.terms {
            self.add_term(w.clone(), v.clone());
        }
    }

    /// Coordinates in the canonical target basis.
    pub fn dense_coords(&self) -> Vec<Rat> {
        let basis = target_basis(self.kind, self.n, self.k);
        let mut v = vec![Rat::zero(); basis.labels.len()];
        for (w, c) in &self.terms {
            let idx = basis.index(w).expect("term outside target basis");
            v[idx] = c.clone();
        }
        v
    }
}

/// Canonical ordered basis of a trace target.
pub struct TraceTarget {
    pub kind: TraceKind,
    pub n: u8,
    pub k: usize,
    pub labels: Vec<Vec<u8>>,
    index: std::collections::HashMap<Vec<u8>, usize>,
}

impl TraceTarget {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index(&self, label: &[u8]) -> Option<usize> {
        self.index.get(label).copied()
    }
}

fn target_registry() -> &'static RwLock<std::collections::HashMap<(TraceKind, u8, usize), Arc<TraceTarget>>> {
    static REG: OnceLock<RwLock<std::collections::HashMap<(TraceKind, u8, usize), Arc<TraceTarget>>>> =
        OnceLock::new();
    REG.get_or_init(|| RwLock::new(std::collections::HashMap::new()))
}

pub fn target_basis(kind: TraceKind, n: u8, k: usize) -> Arc<TraceTarget> {
    if let Some(t) = target_registry().read().unwrap().get(&(kind, n, k)) {
        return t.clone();
    }
    let labels = match kind {
        TraceKind::Cyclic => necklaces(n, k),
        TraceKind::ReducedCyclic => necklaces(n, k)
            .into_iter()
            .filter(|w| !(k >= 1 && w.iter().all(|&g| g == w[0])))
            .collect(),
        TraceKind::Symmetric => sorted_words(n, k),
        TraceKind::Wedge => {
            assert!(k >= 2, "wedge target needs k >= 2");
            let mut out = Vec::new();
            let tails = strictly_increasing(n, k - 1);
            for head in 1..=n {
                for t in &tails {
                    let mut label = vec![head];
                    label.extend_from_slice(t);
                    out.push(label);
                }
            }
            out
        }
    };
    let index = labels.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let t = Arc::new(TraceTarget { kind, n, k, labels, index });
    let mut reg = target_registry().write().unwrap();
    reg.entry((kind, n, k)).or_insert(t).clone()
}

fn necklaces(n: u8, k: usize) -> Vec<Vec<u8>> {
    assert!((n as u64).checked_pow(k as u32).map_or(false, |v| v <= 10_000_000), "necklace enumeration too large");
    let mut out = Vec::new();
    let mut w = vec![1u8; k];
    loop {
        if CyclicWord::canonical(&w).word() == w.as_slice() {
            out.push(w.clone());
        }
        let mut pos = k;
        while pos > 0 && w[pos - 1] == n {
            w[pos - 1] = 1;
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        w[pos - 1] += 1;
    }
    out
}

fn sorted_words(n: u8, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut w = Vec::with_capacity(k);
    fn rec(n: u8, k: usize, lo: u8, w: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if w.len() == k {
            out.push(w.clone());
            return;
        }
        for g in lo..=n {
            w.push(g);
            rec(n, k, g, w, out);
            w.pop();
        }
    }
    rec(n, k, 1, &mut w, &mut out);
    out
}

fn strictly_increasing(n: u8, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut w = Vec::with_capacity(k);
    fn rec(n: u8, k: usize, lo: u8, w: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if w.len() == k {
            out.push(w.clone());
            return;
        }
        for g in lo..=n {
            w.push(g);
            rec(n, k, g + 1, w, out);
            w.pop();
        }
    }
    rec(n, k, 1, &mut w, &mut out);
    out
}

/// rank 𝒞ₙ(k) = (1/k) Σ_{d|k} φ(d) n^{k/d}.
pub fn cyclic_rank(n: u64, k: u64) -> u64 {
    assert!(n >= 1 && k >= 1);
    let mut sum: u128 = 0;
    for d in divisors(k) {
        sum += euler_phi(d) as u128 * (n as u128).pow((k / d) as u32);
    }
    (sum / k as u128) as u64
}

/// dim S^k H.
pub fn symmetric_rank(n: u64, k: u64) -> u64 {
    binomial(n + k - 1, k)
}

/// dim H ⊗ Λ^{k−1} H.
pub fn wedge_rank(n: u64, k: u64) -> u64 {
    n * binomial(n, k - 1)
}

// ---------------------------------------------------------------------------
// Trace maps
// ---------------------------------------------------------------------------

/// `Tr_k`: Φ followed by the projection to cyclic words.
pub fn cyclic_trace(d: &DerElement) -> TraceElement {
    let phi = contract_phi(d);
    let mut out = TraceElement::zero(TraceKind::Cyclic, d.n(), d.degree());
    for (w, c) in phi.terms() {
        out.add_term(CyclicWord::canonical(w).word().to_vec(), c.clone());
    }
    out
}

/// `Tr̄_k`: the cyclic trace with the constant necklaces x_i^k projected away.
pub fn reduced_cyclic_trace(d: &DerElement) -> TraceElement {
    let t = cyclic_trace(d);
    let mut out = TraceElement::zero(TraceKind::ReducedCyclic, d.n(), d.degree());
    for (w, c) in &t.terms {
        if !w.iter().all(|&g| g == w[0]) {
            out.add_term(w.clone(), c.clone());
        }
    }
    out
}

/// `MT_k`: Φ followed by the projection to `S^k H`.
pub fn morita_trace(d: &DerElement) -> TraceElement {
    let phi = contract_phi(d);
    let mut out = TraceElement::zero(TraceKind::Symmetric, d.n(), d.degree());
    for (w, c) in phi.terms() {
        out.add_term(SymMonomial::from_word(w).letters().to_vec(), c.clone());
    }
    out
}

/// `Tr_{[2,1^{k−2}]}`: Ψ followed by antisymmetrization of the last k−1
/// slots, landing in `H ⊗ Λ^{k-1} H`.
pub fn wedge_trace(d: &DerElement) -> Result<TraceElement> {
    let k = d.degree();
    if k < 3 {
        return Err(Error::InvalidArgument(format!("wedge trace needs degree >= 3, got {}", k)));
    }
    let psi = contract_psi(d);
    let mut out = TraceElement::zero(TraceKind::Wedge, d.n(), k);
    'words: for (w, c) in psi.terms() {
        let head = w[0];
        let mut tail: Vec<(u8, usize)> = w[1..].iter().copied().zip(0..).collect();
        tail.sort_by_key(|&(g, _)| g);
        for pair in tail.windows(2) {
            if pair[0].0 == pair[1].0 {
                continue 'words;
            }
        }
        // Sign of the sorting permutation.
        let perm: Vec<usize> = tail.iter().map(|&(_, p)| p).collect();
        let mut sign = 1i64;
        let mut seen = vec![false; perm.len()];
        for s in 0..perm.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut cur = s;
            while !seen[cur] {
                seen[cur] = true;
                cur = perm[cur];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        let mut label = vec![head];
        label.extend(tail.iter().map(|&(g, _)| g));
        out.add_term(label, c * crate::exactlin::rat_int(sign));
    }
    Ok(out)
}

/// Apply a trace map by kind.
pub fn trace_by_kind(kind: TraceKind, d: &DerElement) -> Result<TraceElement> {
    match kind {
        TraceKind::Cyclic => Ok(cyclic_trace(d)),
        TraceKind::ReducedCyclic => Ok(reduced_cyclic_trace(d)),
        TraceKind::Symmetric => Ok(morita_trace(d)),
        TraceKind::Wedge => wedge_trace(d),
    }
}

/// Permutation action on a trace target (for equivariance checks).
pub fn target_action(kind: TraceKind, perm: &[u8], e: &TraceElement) -> TraceElement {
    let mut out = TraceElement::zero(kind, e.n, e.k);
    for (w, c) in &e.terms {
        let img: Vec<u8> = w.iter().map(|&g| perm[g as usize - 1]).collect();
        match kind {
            TraceKind::Cyclic | TraceKind::ReducedCyclic => {
                out.add_term(CyclicWord::canonical(&img).word().to_vec(), c.clone());
            }
            TraceKind::Symmetric => {
                out.add_term(SymMonomial::from_word(&img).letters().to_vec(), c.clone());
            }
            TraceKind::Wedge => {
                let head = img[0];
                let mut tail: Vec<u8> = img[1..].to_vec();
                let mut sign = 1i64;
                // Bubble sort tracking the sign; tails are short.
                for a in 0..tail.len() {
                    for b in (a + 1..tail.len()).rev() {
                        if tail[b - 1] > tail[b] {
                            tail.swap(b - 1, b);
                            sign = -sign;
                        }
                    }
                }
                let mut label = vec![head];
                label.extend_from_slice(&tail);
                out.add_term(label, c * crate::exactlin::rat_int(sign));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Image lattices
// ---------------------------------------------------------------------------

/// Integer coordinate rows of a trace map on a subspace's basis.
pub fn trace_matrix(kind: TraceKind, domain: &DerSubspace) -> Result<Vec<Vec<Int>>> {
    let target = target_basis(kind, domain.n, domain.k);
    let mut rows = Vec::with_capacity(domain.rank());
    for v in domain.chart_vectors() {
        let d = chart_vec_to_der(&domain.chart, &v);
        let t = trace_by_kind(kind, &d)?;
        let mut row = vec![Int::zero(); target.dim()];
        for (w, c) in &t.terms {
            assert!(c.is_integer(), "trace of an integer element must be integral");
            row[target.index(w).expect("trace term outside target")] = c.to_integer();
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Exact image lattice of a trace map restricted to `domain`, together with
/// the presentation of `target/image`.
pub fn image_lattice(kind: TraceKind, domain: &DerSubspace) -> Result<(Lattice, QuotientPresentation)> {
    let target = target_basis(kind, domain.n, domain.k);
    let rows = trace_matrix(kind, domain)?;
    let lattice = Lattice::from_dense(target.dim(), rows.clone());
    let pres = presentation_from_coords(target.dim(), rows);
    Ok((lattice, pres))
}

#[cfg(test)]
pub(crate) mod tests;
