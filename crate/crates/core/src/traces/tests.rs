use super::*;
use crate::derivations::named::*;
use crate::derivations::{der_bracket, named_element, special_kernel, sym_action, DerElement};
use crate::exactlin::{membership, rat_int, Membership, MembershipMode};
use crate::freelie::BracketTree;
use rand::Rng;
use rand::SeedableRng;

fn ln(w: &[u8]) -> BracketTree {
    BracketTree::left_normed(w)
}

fn der_term(n: u8, deg: usize, dual: u8, tree: BracketTree) -> DerElement {
    DerElement::from_values(n, deg, &[(dual, tree, Rat::one())]).unwrap()
}

#[test]
fn phi_vanishes_without_dual_letter() {
    // Φ(x1*⊗[x2,x3,x2,x3]) = 0: no slot ever carries letter 1.
    let d = der_term(3, 3, 1, ln(&[2, 3, 2, 3]));
    assert!(contract_phi(&d).is_zero());
}

#[test]
fn phi_leading_term_case() {
    // Φ(x_i*⊗[x_i, w…]) = w when i appears nowhere else.
    let d = der_term(4, 3, 1, ln(&[1, 2, 3, 4]));
    let phi = contract_phi(&d);
    assert_eq!(phi.num_terms(), 1);
    assert_eq!(phi.coeff(&[2, 3, 4]), Rat::one());
}

#[test]
fn phi_degree_one_example() {
    // Φ(x1*⊗[x2,x1]) = −(2).
    let d = der_term(2, 1, 1, ln(&[2, 1]));
    let phi = contract_phi(&d);
    assert_eq!(phi.num_terms(), 1);
    assert_eq!(phi.coeff(&[2]), rat_int(-1));
}

/// Closed form of Φ on a left-normed word (independent oracle).
fn phi_formula(n: u8, dual: u8, word: &[u8]) -> crate::freelie::TensorElement {
    let k = word.len() - 1;
    let mut out = crate::freelie::TensorElement::zero(n, k);
    if dual == word[0] {
        out.add_term(word[1..].to_vec(), Rat::one());
    }
    for l in 1..word.len() {
        if dual == word[l] {
            // −ι([w₁..w_l]) ⊗ w_{l+2}…  (prefix of length l, then the tail).
            for (pw, c) in crate::freelie::expand_tree_words(&ln(&word[..l])) {
                let mut w = pw.clone();
                w.extend_from_slice(&word[l + 1..]);
                out.add_term(w, rat_int(-i64::try_from(c).unwrap()));
            }
        }
    }
    out
}

/// Closed form of Ψ on a left-normed word (independent oracle).
fn psi_formula(n: u8, dual: u8, word: &[u8]) -> crate::freelie::TensorElement {
    let k = word.len() - 1;
    let mut out = crate::freelie::TensorElement::zero(n, k);
    if word.len() >= 2 && dual == word[1] {
        let mut w = vec![word[0]];
        w.extend_from_slice(&word[2..]);
        out.add_term(w, Rat::one());
    }
    // − Σ_{l≥2} x_{w_l} ⊗ Φ-formula of the word with slot l removed,
    // evaluated on the prefix [w₁..w_{l−1}] followed by the tail.
    for l in 1..word.len() {
        let mut rest = word[..l].to_vec();
        rest.extend_from_slice(&word[l + 1..]);
        if dual == rest[0] {
            let mut w = vec![word[l]];
            w.extend_from_slice(&rest[1..]);
            out.add_term(w, rat_int(-1));
        }
        for m in 1..l {
            if dual == rest[m] {
                for (pw, c) in crate::freelie::expand_tree_words(&ln(&rest[..m])) {
                    let mut w = vec![word[l]];
                    w.extend_from_slice(&pw);
                    w.extend_from_slice(&rest[m + 1..]);
                    out.add_term(w, rat_int(i64::try_from(c).unwrap()));
                }
            }
        }
    }
    out
}

#[test]
fn phi_matches_formula_on_left_normed_words() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
    for _ in 0..40 {
        let n = rng.gen_range(2..=4u8);
        let len = rng.gen_range(2..=5usize);
        let mut word: Vec<u8> = (0..len).map(|_| rng.gen_range(1..=n)).collect();
        if word[0] == word[1] {
            word[1] = word[1] % n + 1;
        }
        let dual = rng.gen_range(1..=n);
        let d = der_term(n, len - 1, dual, ln(&word));
        assert_eq!(contract_phi(&d), phi_formula(n, dual, &word), "word {:?} dual {}", word, dual);
    }
}

#[test]
fn psi_zero_case_and_leading_term() {
    // No occurrence of the dual letter anywhere: Ψ = 0.
    let d = der_term(4, 3, 1, ln(&[2, 3, 4, 2]));
    assert!(contract_psi(&d).is_zero());
    // x_i only in slot 2 isolates x_{w₁} ⊗ rest.
    let d = der_term(4, 3, 2, ln(&[1, 2, 3, 4]));
    let psi = contract_psi(&d);
    assert_eq!(psi.coeff(&[1, 3, 4]), Rat::one());
}

#[test]
fn psi_matches_formula_on_left_normed_words() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(103);
    for _ in 0..20 {
        let n = rng.gen_range(2..=4u8);
        let len = rng.gen_range(2..=5usize);
        let mut word: Vec<u8> = (0..len).map(|_| rng.gen_range(1..=n)).collect();
        if word[0] == word[1] {
            word[1] = word[1] % n + 1;
        }
        let dual = rng.gen_range(1..=n);
        let d = der_term(n, len - 1, dual, ln(&word));
        assert_eq!(contract_psi(&d), psi_formula(n, dual, &word), "word {:?} dual {}", word, dual);
    }
}

#[test]
fn cyclic_rank_values() {
    for n in 1..=4u64 {
        assert_eq!(cyclic_rank(n, 1), n);
    }
    assert_eq!(cyclic_rank(2, 2), 3);
    // Brute-force necklace enumeration agrees with the totient formula.
    for n in 1..=4u64 {
        for k in 1..=6u64 {
            assert_eq!(
                necklaces(n as u8, k as usize).len() as u64,
                cyclic_rank(n, k),
                "(n,k)=({},{})",
                n,
                k
            );
        }
    }
}

#[test]
fn cyclic_trace_vanishes_on_brackets_of_degree_one_images() {
    // Tr kills brackets of elements of the degree-1-generated subalgebra.
    let n = 3u8;
    let t12 = named_element(n, "t", &[1, 2]).unwrap();
    let t13 = named_element(n, "t", &[1, 3]).unwrap();
    let t23 = named_element(n, "t", &[2, 3]).unwrap();
    let gens = [t12, t13, t23];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(107);
    for _ in 0..20 {
        let mut f = gens[rng.gen_range(0..3)].clone();
        let depth = rng.gen_range(0..=2);
        for _ in 0..depth {
            f = der_bracket(&f, &gens[rng.gen_range(0..3)]);
        }
        let g = gens[rng.gen_range(0..3)].clone();
        let b = der_bracket(&f, &g);
        if b.degree() <= 5 {
            assert!(cyclic_trace(&b).is_zero());
        }
    }
}

#[test]
fn morita_leading_monomial() {
    // MT(x_i*⊗[x_i, w…]) = e_w.
    let d = der_term(4, 3, 1, ln(&[1, 2, 3, 4]));
    let mt = morita_trace(&d);
    assert_eq!(mt.coeff(&[2, 3, 4]), Rat::one());
    assert_eq!(mt.terms.len(), 1);
}

#[test]
fn morita_kills_distinct_b4_orbit() {
    // MT₃ vanishes on the orbit of the four-distinct-letter component.
    let n = 4u8;
    let perms = [[1u8, 2, 3, 4], [2, 1, 3, 4], [3, 2, 1, 4], [4, 2, 3, 1], [2, 3, 4, 1]];
    for idx in [[1u8, 2, 3, 4], [1, 2, 4, 3]] {
        let e = named_element(n, "b4", &idx).unwrap();
        for p in &perms {
            let img = sym_action(p, &e);
            assert!(morita_trace(&img).is_zero());
        }
    }
}

/// Closed form of MT₅ on b6 (checked term by term):
/// 2(δ_{ir} e_{i,j,l,p,q} − δ_{iq} e_{j,l,p,q,r} − δ_{jr} e_{i,j,l,p,q} + δ_{jq} e_{i,l,p,q,r}).
fn mt5_b6_formula(kind_n: u8, idx: &[u8; 6]) -> TraceElement {
    let &[i, j, l, p, q, r] = idx;
    let mut out = TraceElement::zero(TraceKind::Symmetric, kind_n, 5);
    let mut add = |cond: bool, word: [u8; 5], sign: i64| {
        if cond {
            out.add_term(SymMonomial::from_word(&word).letters().to_vec(), rat_int(2 * sign));
        }
    };
    add(i == r, [i, j, l, p, q], 1);
    add(i == q, [j, l, p, q, r], -1);
    add(j == r, [i, j, l, p, q], -1);
    add(j == q, [i, l, p, q, r], 1);
    out
}

#[test]
fn morita_five_closed_form_on_b6() {
    let n = 5u8;
    let cases: [[u8; 6]; 5] = [
        [1, 2, 3, 4, 5, 1],
        [1, 2, 3, 4, 2, 5],
        [1, 2, 3, 4, 1, 5],
        [1, 2, 3, 4, 5, 2],
        [3, 1, 2, 2, 1, 3],
    ];
    for idx in cases {
        let e = named_element(n, "b6", &idx).unwrap();
        assert_eq!(morita_trace(&e), mt5_b6_formula(n, &idx), "idx {:?}", idx);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(109);
    for _ in 0..10 {
        let idx: [u8; 6] = std::array::from_fn(|_| rng.gen_range(1..=n));
        let e = named_element(n, "b6", &idx).unwrap();
        assert_eq!(morita_trace(&e), mt5_b6_formula(n, &idx), "idx {:?}", idx);
    }
}

#[test]
fn morita_kills_n_elements() {
    let e3 = named_element(3, "n3", &[1, 2, 3]).unwrap();
    assert!(morita_trace(&e3).is_zero());
    let e4 = named_element(4, "n4", &[1, 2, 3, 4]).unwrap();
    assert!(morita_trace(&e4).is_zero());
}

#[test]
fn wedge_trace_of_b5_21113() {
    // The wedge trace of b(2,1,1,1,3) is a multiple of x₁ ⊗ x₂∧x₃∧x₁;
    // the multiple is 8 (hand-checked by direct slot-2 contraction and by
    // the closed contraction formula on each of the five terms).
    let e = named_element(3, "b5", &[2, 1, 1, 1, 3]).unwrap();
    let w = wedge_trace(&e).unwrap();
    // x₂∧x₃∧x₁ = +x₁∧x₂∧x₃ (cyclic permutation is even).
    assert_eq!(w.coeff(&[1, 1, 2, 3]), rat_int(8));
    assert_eq!(w.terms.len(), 1);
}

#[test]
fn wedge_trace_repeated_tail_vanishes() {
    let d = der_term(2, 3, 1, ln(&[2, 1, 2, 2]));
    // After contracting the dual, only the repeated tail (2,2) remains.
    assert!(wedge_trace(&d).unwrap().is_zero());
    assert!(wedge_trace(&der_term(2, 2, 1, ln(&[1, 2, 1]))).is_err());
}

#[test]
fn wedge_pair_preimage_value() {
    // Degree 4: the sum-zero element hits 2^{k/2}·w(i,j;i₁,i₂) = 4·w.
    let n = 4u8;
    let (_, e) = wedge_pair_preimage(n, 1, 2, &[3, 4]).unwrap();
    let got = wedge_trace(&e).unwrap();
    // w(1,2;3,4) = x₁⊗x₃∧x₄∧x₂ + x₂⊗x₃∧x₄∧x₁.
    let mut expect = TraceElement::zero(TraceKind::Wedge, n, 4);
    // x₃∧x₄∧x₂ = +x₂∧x₃∧x₄; x₃∧x₄∧x₁ = +x₁∧x₃∧x₄ (cyclic, even).
    expect.add_term(vec![1, 2, 3, 4], rat_int(4));
    expect.add_term(vec![2, 1, 3, 4], rat_int(4));
    assert_eq!(got, expect);
}

#[test]
fn doubled_wedge_generators_in_image_over_z() {
    // 4·w(1,2;3,4) lies in the integral image on the special algebra while
    // 2·w does not; the even sublattice is exactly what the special
    // restriction reaches (the trace is uniformly even there).
    let b = special_kernel(4, 4);
    let (lat, _) = image_lattice(TraceKind::Wedge, &b).unwrap();
    let t = target_basis(TraceKind::Wedge, 4, 4);
    let mut w = vec![Rat::zero(); t.dim()];
    w[t.index(&[1, 2, 3, 4]).unwrap()] = Rat::one();
    w[t.index(&[2, 1, 3, 4]).unwrap()] = Rat::one();
    let twice: Vec<Rat> = w.iter().map(|x| x * rat_int(2)).collect();
    let four: Vec<Rat> = w.iter().map(|x| x * rat_int(4)).collect();
    assert_eq!(membership(&twice, &lat, MembershipMode::OverZ).unwrap(), Membership::NonMember);
    assert!(membership(&four, &lat, MembershipMode::OverZ).unwrap().is_member());
}

#[test]
fn image_rank_morita_deg3() {
    let b = special_kernel(3, 3);
    let (lat, pres) = image_lattice(TraceKind::Symmetric, &b).unwrap();
    assert_eq!(lat.rank(), 4); // C(5,3) − 6
    assert_eq!(pres.free_rank, symmetric_rank(3, 3) as usize - 4);
}

#[test]
fn image_rank_morita_deg5_n3() {
    let b = special_kernel(3, 5);
    let (lat, _) = image_lattice(TraceKind::Symmetric, &b).unwrap();
    assert_eq!(lat.rank(), 15); // C(7,5) − 6
}

#[test]
fn image_rank_wedge_deg4_n4() {
    let b = special_kernel(4, 4);
    let (lat, _) = image_lattice(TraceKind::Wedge, &b).unwrap();
    assert_eq!(lat.rank(), 15); // 3·C(5,4)
}

#[test]
fn traces_are_equivariant() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(113);
    for _ in 0..15 {
        let n = 3u8;
        let deg = rng.gen_range(3..=4usize);
        let d = crate::derivations::tests::random_der(&mut rng, n, deg);
        let perm = crate::derivations::tests::random_perm(&mut rng, n);
        for kind in [TraceKind::Cyclic, TraceKind::ReducedCyclic, TraceKind::Symmetric, TraceKind::Wedge] {
            let lhs = trace_by_kind(kind, &sym_action(&perm, &d)).unwrap();
            let rhs = target_action(kind, &perm, &trace_by_kind(kind, &d).unwrap());
            assert_eq!(lhs, rhs, "kind {:?}", kind);
        }
    }
}

#[test]
fn doubled_monomials_in_morita_image_over_z() {
    // 2·e_m for every monomial m with ≥ 3 distinct letters has an explicit
    // preimage in the special algebra, k ∈ {3,5}, n ∈ {3,4}.
    for (n, k) in [(3u8, 3usize), (4, 3), (3, 5), (4, 5)] {
        let target = target_basis(TraceKind::Symmetric, n, k);
        for mono in &target.labels {
            let mut distinct = mono.clone();
            distinct.dedup();
            if distinct.len() < 3 {
                continue;
            }
            // Order the multiset as (j, i₁, …, i_{k−1}) with j, i₁, i₂
            // pairwise distinct.
            let j = distinct[0];
            let i1 = distinct[1];
            let i2 = distinct[2];
            let mut rest: Vec<u8> = Vec::new();
            let mut used = vec![j, i1, i2];
            for &g in mono {
                if let Some(pos) = used.iter().position(|&u| u == g) {
                    used.remove(pos);
                } else {
                    rest.push(g);
                }
            }
            assert!(used.is_empty());
            let mut is = vec![i1, i2];
            is.extend(rest);
            let (_, e) = doubled_monomial_preimage(n, j, &is).unwrap();
            let mt = morita_trace(&e);
            let mut expect = TraceElement::zero(TraceKind::Symmetric, n, k);
            expect.add_term(mono.clone(), rat_int(2));
            assert_eq!(mt, expect, "monomial {:?}", mono);
        }
    }
}

#[test]
fn mixed_pair_sums_in_morita_image() {
    // e_{i,i,j,r…} + e_{j,j,i,r…}: the two-term Jacobi element realizes it
    // exactly for k = 3; the full expansion doubles it for larger k.
    for (n, rest, scale) in [
        (3u8, vec![], -1i64),
        (4, vec![3u8, 4], -2),
        (3, vec![3, 3], -2),
        (3, vec![2, 3], -2),
    ] {
        let k = rest.len() + 3;
        let (_, e) = mixed_pair_preimage(n, 1, 2, &rest).unwrap();
        let mt = morita_trace(&e);
        let mut expect = TraceElement::zero(TraceKind::Symmetric, n, k);
        let mut w1 = vec![1, 1, 2];
        w1.extend_from_slice(&rest);
        let mut w2 = vec![2, 2, 1];
        w2.extend_from_slice(&rest);
        expect.add_term(SymMonomial::from_word(&w1).letters().to_vec(), rat_int(scale));
        expect.add_term(SymMonomial::from_word(&w2).letters().to_vec(), rat_int(scale));
        assert_eq!(mt, expect, "rest {:?}", rest);
    }
    // Pair sums in the integral image: true for k = 3 and for some k = 5
    // instances, but false in general over Z (always true over Q); the
    // non-members below are certified counterexamples.
    for (n, k, m1, m2, over_z) in [
        (3u8, 3usize, vec![1u8, 1, 2], vec![2u8, 2, 1], true),
        (3, 5, vec![1, 1, 2, 3, 3], vec![2, 2, 1, 3, 3], true),
        (3, 5, vec![1, 1, 3, 2, 2], vec![3, 3, 1, 2, 2], true),
        (3, 5, vec![1, 1, 2, 2, 3], vec![2, 2, 1, 2, 3], false),
        (4, 5, vec![1, 1, 2, 3, 4], vec![2, 2, 1, 3, 4], false),
    ] {
        let b = special_kernel(n, k);
        let (lat, _) = image_lattice(TraceKind::Symmetric, &b).unwrap();
        let target = target_basis(TraceKind::Symmetric, n, k);
        let mut v = vec![Rat::zero(); target.dim()];
        let s1 = SymMonomial::from_word(&m1).letters().to_vec();
        let s2 = SymMonomial::from_word(&m2).letters().to_vec();
        v[target.index(&s1).unwrap()] = Rat::one();
        let e = &mut v[target.index(&s2).unwrap()];
        *e += Rat::one();
        assert_eq!(
            membership(&v, &lat, MembershipMode::OverZ).unwrap().is_member(),
            over_z,
            "(n,k)=({},{}) {:?}",
            n,
            k,
            m1
        );
        assert!(
            membership(&v, &lat, MembershipMode::OverQ).unwrap().is_member(),
            "Q-membership (n,k)=({},{})",
            n,
            k
        );
    }
}

#[test]
fn pure_pair_monomials_never_in_image() {
    // a·e_{i,j^{k−1}} is not in Im(MT_k^B) for any a ≠ 0: the unit vector is
    // not even in the Q-span of the image.
    for (n, k) in [(3u8, 3usize), (3, 5)] {
        let b = special_kernel(n, k);
        let (lat, _) = image_lattice(TraceKind::Symmetric, &b).unwrap();
        let target = target_basis(TraceKind::Symmetric, n, k);
        for i in 1..=n {
            for j in (i + 1)..=n {
                let mut mono = vec![i];
                mono.extend(std::iter::repeat(j).take(k - 1));
                mono.sort_unstable();
                let idx = target.index(&mono).unwrap();
                let mut v = vec![Rat::zero(); target.dim()];
                v[idx] = Rat::one();
                assert_eq!(
                    membership(&v, &lat, MembershipMode::OverQ).unwrap(),
                    Membership::NonMember,
                    "e_({},{}^{})",
                    i,
                    j,
                    k - 1
                );
            }
        }
    }
}

#[test]
fn constant_necklaces_meet_tangential_trace_image_trivially() {
    // ⟨x_1^k,…,x_n^k⟩ ∩ Im(Tr_k|𝔭ₙ(k)) = 0 for k ∈ {2,3,4}, n = 3.
    use crate::derivations::tangential_basis;
    use crate::exactlin::rank as mat_rank;
    use crate::exactlin::SparseMatrix;
    for k in [2usize, 3, 4] {
        let n = 3u8;
        let p = tangential_basis(n, k);
        let rows = trace_matrix(TraceKind::Cyclic, &p).unwrap();
        let target = target_basis(TraceKind::Cyclic, n, k);
        let base_rank = {
            let m = SparseMatrix::from_rows(
                rows.iter()
                    .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
                    .collect(),
            );
            mat_rank(&m)
        };
        // Adjoin the n constant-necklace unit vectors; the rank must grow by n.
        let mut aug = rows.clone();
        for i in 1..=n {
            let w = vec![i; k];
            let mut v = vec![Int::zero(); target.dim()];
            v[target.index(&w).unwrap()] = Int::one();
            aug.push(v);
        }
        let aug_rank = {
            let m = SparseMatrix::from_rows(
                aug.iter()
                    .map(|r| r.iter().map(|x| Rat::from_integer(x.clone())).collect())
                    .collect(),
            );
            mat_rank(&m)
        };
        assert_eq!(aug_rank, base_rank + n as usize, "k={}", k);
    }
}

#[test]
fn cyclic_lattice_full_rank() {
    // Images of all of Der(ℒₙ)(k) under Tr span 𝒞ₙ(k) at full rank for the
    // tangential chart in low degrees (sanity for the target enumeration).
    for (n, k) in [(2u8, 4usize), (3, 3)] {
        assert_eq!(target_basis(TraceKind::Cyclic, n, k).dim() as u64, cyclic_rank(n as u64, k as u64));
        assert_eq!(target_basis(TraceKind::Symmetric, n, k).dim() as u64, symmetric_rank(n as u64, k as u64));
        assert_eq!(target_basis(TraceKind::Wedge, n, k).dim() as u64, wedge_rank(n as u64, k as u64));
        assert_eq!(
            target_basis(TraceKind::ReducedCyclic, n, k).dim() as u64,
            cyclic_rank(n as u64, k as u64) - n as u64
        );
    }
}
