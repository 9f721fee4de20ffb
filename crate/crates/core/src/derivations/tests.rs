use super::named::*;
use super::*;
use crate::exactlin::rat_int;
use rand::Rng;
use rand::SeedableRng;

fn lf(i: u8) -> BracketTree {
    BracketTree::leaf(i)
}

fn ln(w: &[u8]) -> BracketTree {
    BracketTree::left_normed(w)
}

/// Left-normed chain of arbitrary subtrees.
fn chain(items: &[BracketTree]) -> BracketTree {
    let mut t = items[0].clone();
    for it in &items[1..] {
        t = BracketTree::node(t, it.clone());
    }
    t
}

fn one() -> Rat {
    Rat::one()
}

#[test]
fn der_bracket_substitution_example() {
    // [x1*⊗[x1,x2,x3,x2], x2*⊗[x3,x1]]
    //   = x1*⊗[x1,[x3,x1],x3,x2] + x1*⊗[x1,x2,x3,[x3,x1]] − x2*⊗[x3,[x1,x2,x3,x2]]
    let f = DerElement::from_values(3, 3, &[(1, ln(&[1, 2, 3, 2]), one())]).unwrap();
    let g = DerElement::from_values(3, 1, &[(2, ln(&[3, 1]), one())]).unwrap();
    let got = der_bracket(&f, &g);
    let expect = DerElement::from_values(
        3,
        4,
        &[
            (1, chain(&[lf(1), ln(&[3, 1]), lf(3), lf(2)]), one()),
            (1, chain(&[lf(1), lf(2), lf(3), ln(&[3, 1])]), one()),
            (2, BracketTree::node(lf(3), ln(&[1, 2, 3, 2])), -one()),
        ],
    )
    .unwrap();
    assert_eq!(got, expect);
}

#[test]
fn der_bracket_antisymmetry() {
    let f = DerElement::from_values(
        3,
        2,
        &[(1, ln(&[2, 3, 1]), one()), (3, ln(&[1, 2, 3]), rat_int(2))],
    )
    .unwrap();
    assert!(der_bracket(&f, &f).is_zero());
}

#[test]
fn der_bracket_t_generators() {
    // [t12, t13] = x1*⊗[x2,x3,x1] + x2*⊗[x3,x1,x2] + x3*⊗[x1,x2,x3]
    let t12 = named_element(3, "t", &[1, 2]).unwrap();
    let t13 = named_element(3, "t", &[1, 3]).unwrap();
    let got = der_bracket(&t12, &t13);
    let expect = named_element(3, "tau2", &[1, 2, 3]).unwrap();
    assert_eq!(got, expect);
}

#[test]
fn der_bracket_jacobi_random() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    for _ in 0..20 {
        let n = rng.gen_range(2..=3u8);
        let mut mk = |deg: usize| {
            let dual = rng.gen_range(1..=n);
            let tree = crate::freelie::tests::random_tree(&mut rng, n, deg + 1);
            DerElement::from_values(n, deg, &[(dual, tree, one())]).unwrap()
        };
        let f = mk(1);
        let g = mk(2);
        let h = mk(1);
        let mut jac = der_bracket(&der_bracket(&f, &g), &h);
        jac.add_assign(&der_bracket(&der_bracket(&g, &h), &f));
        jac.add_assign(&der_bracket(&der_bracket(&h, &f), &g));
        assert!(jac.is_zero(), "derivation Jacobi identity");
    }
}

#[test]
fn tangential_ranks() {
    assert_eq!(tangential_basis(2, 1).rank(), 2);
    assert_eq!(tangential_basis(3, 1).rank(), 6);
    assert_eq!(tangential_basis(3, 2).rank(), 9);
}

#[test]
fn special_kernel_n2_k1() {
    let b = special_kernel(2, 1);
    assert_eq!(b.rank(), 1);
    // Spanned by x1*⊗[x2,x1] + x2*⊗[x1,x2] = t12.
    let (t12, _) = t_pair(2, 1, 2).unwrap();
    let v = t12.chart_vec(&b.chart);
    let coords = b.express_chart_vec(&v).unwrap();
    assert_eq!(coords.iter().map(|c| c.magnitude().clone()).max().unwrap(), 1u32.into());
}

#[test]
fn special_kernel_n3_k2_generator() {
    let b = special_kernel(3, 2);
    assert_eq!(b.rank(), 1);
    // x1*⊗[x3,x2,x1] − x2*⊗[x3,x1,x2] + x3*⊗[x2,x1,x3] spans it over Z.
    let mut gen = Tangential::new(3, 2);
    gen.push(1, ln(&[3, 2]), one());
    gen.push(2, ln(&[3, 1]), -one());
    gen.push(3, ln(&[2, 1]), one());
    let v = gen.chart_vec(&b.chart);
    let coords = b.express_chart_vec(&v).unwrap();
    assert_eq!(coords.len(), 1);
    assert_eq!(coords[0].magnitude().clone(), 1u32.into());
}

#[test]
fn special_kernel_ranks_match_formula() {
    for n in 2..=4u64 {
        for k in 1..=4usize {
            assert_eq!(
                special_kernel(n as u8, k).rank() as u64,
                special_rank_formula(n, k as u64),
                "(n,k)=({},{})",
                n,
                k
            );
        }
    }
}

#[test]
fn kernel_basis_dimension_via_full_matrix() {
    // Cross-check the blocked kernel against a whole-matrix computation.
    use crate::exactlin::{kernel_basis, SparseMatrix};
    for (n, k) in [(3u8, 2usize), (3, 3), (2, 4)] {
        let chart = p_chart(n, k);
        let target = lyndon_basis(n, k + 1);
        let mut m = SparseMatrix::new(target.len(), chart.dim());
        for c in 0..chart.dim() {
            let (i, mono) = chart.cols[c];
            let tree = BracketTree::node(lyndon_basis(n, k).tree(mono).clone(), lf(i));
            for (r, v) in crate::freelie::normalize_tree(n, &tree) {
                m.set(r as usize, c, Rat::from_integer(v));
            }
        }
        assert_eq!(kernel_basis(&m).len(), special_kernel(n, k).rank());
    }
}

#[test]
fn component_table_degree_three() {
    // (2,2) → 1 at n = 2 and 3; (2,1,1) → 1; (1,1,1,1) → 2.
    for n in [2u8, 3] {
        let a = Composition::new(n, 4, &[2, 2]).unwrap();
        assert_eq!(component_basis(n, 3, &a).unwrap().rank(), 1, "n={}", n);
    }
    for n in [3u8, 4] {
        let a = Composition::new(n, 4, &[2, 1, 1]).unwrap();
        assert_eq!(component_basis(n, 3, &a).unwrap().rank(), 1, "n={}", n);
    }
    for n in [4u8, 5] {
        let a = Composition::new(n, 4, &[1, 1, 1, 1]).unwrap();
        assert_eq!(component_basis(n, 3, &a).unwrap().rank(), 2, "n={}", n);
    }
    let a = Composition::new(2, 4, &[3, 1]).unwrap();
    assert_eq!(component_basis(2, 3, &a).unwrap().rank(), 0);
}

#[test]
fn component_table_degree_four() {
    let table: &[(&[u8], usize)] = &[
        (&[4, 1], 0),
        (&[3, 2], 0),
        (&[3, 1, 1], 1),
        (&[2, 2, 1], 1),
        (&[2, 1, 1, 1], 3),
        (&[1, 1, 1, 1, 1], 6),
    ];
    for &(parts, want) in table {
        let min_n = parts.len() as u8;
        for n in [min_n, min_n + 1] {
            let a = Composition::new(n, 5, parts).unwrap();
            assert_eq!(
                component_basis(n, 4, &a).unwrap().rank(),
                want,
                "alpha={:?} n={}",
                parts,
                n
            );
        }
    }
}

#[test]
fn component_degree_four_explicit_generators() {
    // (2,2) in degree 3 is spanned by the two-letter element.
    let b = component_basis(2, 3, &Composition::new(2, 4, &[2, 2]).unwrap()).unwrap();
    let (sq, _) = pair_cubed(2, 1, 2).unwrap();
    assert!(b.express_chart_vec(&sq.chart_vec(&b.chart)).is_some());

    // (1,1,1,1) is spanned by b(1,2,3,4) and b(1,2,4,3).
    let comp = component_basis(4, 3, &Composition::new(4, 4, &[1, 1, 1, 1]).unwrap()).unwrap();
    let (g1, _) = b4(4, 1, 2, 3, 4).unwrap();
    let (g2, _) = b4(4, 1, 2, 4, 3).unwrap();
    let l = crate::exactlin::Lattice::from_dense(
        comp.chart.dim(),
        vec![
            sparse_to_dense(comp.chart.dim(), &g1.chart_vec(&comp.chart)),
            sparse_to_dense(comp.chart.dim(), &g2.chart_vec(&comp.chart)),
        ],
    );
    let comp_l = comp.lattice();
    assert_eq!(l.hermite_basis(), comp_l.hermite_basis());
}

fn sparse_to_dense(dim: usize, v: &ChartVec) -> Vec<Int> {
    let mut out = vec![Int::zero(); dim];
    for &(c, ref x) in v {
        out[c as usize] = x.clone();
    }
    out
}

#[test]
fn orbit_sum_matches_total_rank() {
    for (n, k) in [(3u8, 3usize), (4, 3), (4, 4), (3, 4)] {
        let dec = orbit_decomposition(n, k);
        let total: u64 = dec.values().map(|&(r, s)| r as u64 * s).sum();
        assert_eq!(total, special_kernel(n, k).rank() as u64, "(n,k)=({},{})", n, k);
    }
}

#[test]
fn named_t_value() {
    let t = named_element(2, "t", &[1, 2]).unwrap();
    let expect = DerElement::from_values(
        2,
        1,
        &[(1, ln(&[2, 1]), one()), (2, ln(&[1, 2]), one())],
    )
    .unwrap();
    assert_eq!(t, expect);
}

#[test]
fn named_b5_relations() {
    // b(i,j,l,p,q) = −b(j,i,l,p,q) = −b(i,j,l,q,p) and b(i,j,l,p,q) = b(p,q,l,j,i).
    let n = 5;
    let a = named_element(n, "b5", &[1, 2, 3, 4, 5]).unwrap();
    let s1 = named_element(n, "b5", &[2, 1, 3, 4, 5]).unwrap();
    let s2 = named_element(n, "b5", &[1, 2, 3, 5, 4]).unwrap();
    let s3 = named_element(n, "b5", &[4, 5, 3, 2, 1]).unwrap();
    assert_eq!(a, s1.scaled(&rat_int(-1)));
    assert_eq!(a, s2.scaled(&rat_int(-1)));
    assert_eq!(a, s3);
}

#[test]
fn named_b5_linear_relation() {
    // b(1,4,1,2,3) = b(1,2,1,3,4) − b(1,3,1,2,4) − 2 b(3,1,4,2,1)
    let n = 4;
    let lhs = named_element(n, "b5", &[1, 4, 1, 2, 3]).unwrap();
    let mut rhs = named_element(n, "b5", &[1, 2, 1, 3, 4]).unwrap();
    rhs.add_assign(&named_element(n, "b5", &[1, 3, 1, 2, 4]).unwrap().scaled(&rat_int(-1)));
    rhs.add_assign(&named_element(n, "b5", &[3, 1, 4, 2, 1]).unwrap().scaled(&rat_int(-2)));
    assert_eq!(lhs, rhs);
}

#[test]
fn named_b_sign_conventions() {
    // b(3,1,1,1,2) = −b(2,1,1,1,3) and b(1,2,2,1,3) = −b(2,1,1,2,3).
    let n = 3;
    let a = named_element(n, "b5", &[3, 1, 1, 1, 2]).unwrap();
    let b = named_element(n, "b5", &[2, 1, 1, 1, 3]).unwrap();
    assert_eq!(a, b.scaled(&rat_int(-1)));
    let c = named_element(n, "b5", &[1, 2, 2, 1, 3]).unwrap();
    let d = named_element(n, "b5", &[2, 1, 1, 2, 3]).unwrap();
    assert_eq!(c, d.scaled(&rat_int(-1)));
}

#[test]
fn named_n_elements_nonzero_and_special() {
    let n3e = named_element(3, "n3", &[1, 2, 3]).unwrap();
    assert!(!n3e.is_zero());
    assert!(n3e.is_special_condition());
    let n4e = named_element(4, "n4", &[1, 2, 3, 4]).unwrap();
    assert!(!n4e.is_zero());
    assert!(n4e.is_special_condition());
}

#[test]
fn named_rejects_bad_indices() {
    assert!(named_element(3, "t", &[1, 1]).is_err());
    assert!(named_element(3, "t", &[1, 4]).is_err());
    assert!(named_element(3, "n3", &[1, 2, 2]).is_err());
    assert!(named_element(3, "nope", &[1]).is_err());
}

#[test]
fn sym_action_basics() {
    let t12 = named_element(3, "t", &[1, 2]).unwrap();
    let id: Vec<u8> = vec![1, 2, 3];
    assert_eq!(sym_action(&id, &t12), t12);
    let swap: Vec<u8> = vec![2, 1, 3];
    assert_eq!(sym_action(&swap, &t12), t12);
    let rot: Vec<u8> = vec![2, 3, 1];
    let t23 = named_element(3, "t", &[2, 3]).unwrap();
    assert_eq!(sym_action(&rot, &t12), t23);
}

#[test]
fn sym_action_is_bracket_automorphism() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
    for _ in 0..15 {
        let n = 3u8;
        let perm = random_perm(&mut rng, n);
        let f = random_der(&mut rng, n, 1);
        let g = random_der(&mut rng, n, 2);
        let lhs = sym_action(&perm, &der_bracket(&f, &g));
        let rhs = der_bracket(&sym_action(&perm, &f), &sym_action(&perm, &g));
        assert_eq!(lhs, rhs);
    }
}

pub(crate) fn random_perm(rng: &mut impl Rng, n: u8) -> Vec<u8> {
    let mut p: Vec<u8> = (1..=n).collect();
    for i in (1..p.len()).rev() {
        let j = rng.gen_range(0..=i);
        p.swap(i, j);
    }
    p
}

pub(crate) fn random_der(rng: &mut impl Rng, n: u8, degree: usize) -> DerElement {
    let mut out = DerElement::zero(n, degree);
    for _ in 0..rng.gen_range(1..=2) {
        let dual = rng.gen_range(1..=n);
        let tree = crate::freelie::tests::random_tree(rng, n, degree + 1);
        let c = rat_int(rng.gen_range(-2..=2i64));
        let term = DerElement::from_values(n, degree, &[(dual, tree, c)]).unwrap();
        out.add_assign(&term);
    }
    out
}

/// Random element of 𝔟ₙ(k) as a small Z-combination of kernel basis vectors.
pub(crate) fn random_special(rng: &mut impl Rng, n: u8, k: usize) -> Tangential {
    let b = special_kernel(n, k);
    let vecs = b.chart_vectors();
    let mut t = Tangential::new(n, k);
    for v in vecs.iter() {
        if rng.gen_bool(0.4) {
            let s = rat_int(rng.gen_range(-2..=2i64));
            for (d, p, c) in tang_from_chart_vec(&b.chart, v).terms {
                t.push(d, p, c * &s);
            }
        }
    }
    t
}

#[test]
fn derivation_leibniz_property() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    for _ in 0..20 {
        let n = 3u8;
        let dfdeg = rng.gen_range(1..=2usize);
        let f = random_der(&mut rng, n, dfdeg);
        let da = rng.gen_range(1..=2usize);
        let db = rng.gen_range(1..=2usize);
        let a = crate::freelie::normalize_one(n, &crate::freelie::tests::random_tree(&mut rng, n, da)).unwrap();
        let b = crate::freelie::normalize_one(n, &crate::freelie::tests::random_tree(&mut rng, n, db)).unwrap();
        let lhs = apply_to_lie(&f, &crate::freelie::lie_bracket(&a, &b));
        let mut rhs = crate::freelie::lie_bracket(&apply_to_lie(&f, &a), &b);
        rhs.add_assign(&crate::freelie::lie_bracket(&a, &apply_to_lie(&f, &b)));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn tangential_bracket_matches_der_bracket() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
    for _ in 0..12 {
        let n = 3u8;
        let df = rng.gen_range(1..=2usize);
        let f = random_special(&mut rng, n, df);
        let g = random_special(&mut rng, n, 1);
        let tb = tang_bracket(&f, &g).to_der().unwrap();
        let db = der_bracket(&f.to_der().unwrap(), &g.to_der().unwrap());
        assert_eq!(tb, db);
    }
}

#[test]
fn special_condition_closed_under_bracket() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
    for _ in 0..10 {
        let n = 3u8;
        let df = rng.gen_range(1..=2usize);
        let dg = rng.gen_range(1..=2usize);
        let f = random_special(&mut rng, n, df);
        let g = random_special(&mut rng, n, dg);
        let b = tang_bracket(&f, &g).to_der().unwrap();
        assert!(b.is_special_condition());
    }
}

#[test]
fn bracket_identity_b4_with_t() {
    // [t23, b(1,2,3,4)] = b(3,2,3,4,1) − b(2,3,2,4,1)
    let n = 4;
    let lhs = der_bracket(
        &named_element(n, "t", &[2, 3]).unwrap(),
        &named_element(n, "b4", &[1, 2, 3, 4]).unwrap(),
    );
    let mut rhs = named_element(n, "b5", &[3, 2, 3, 4, 1]).unwrap();
    rhs.add_assign(&named_element(n, "b5", &[2, 3, 2, 4, 1]).unwrap().scaled(&rat_int(-1)));
    assert_eq!(lhs, rhs);
}

#[test]
fn bracket_identity_triple_t() {
    // [[t12,[t12,t13]], t14] = b(2,3,2,1,4) + b(3,1,2,4,1) + b(2,1,3,4,1)
    let n = 4;
    let t12 = named_element(n, "t", &[1, 2]).unwrap();
    let t13 = named_element(n, "t", &[1, 3]).unwrap();
    let t14 = named_element(n, "t", &[1, 4]).unwrap();
    let inner = der_bracket(&t12, &der_bracket(&t12, &t13));
    let lhs = der_bracket(&inner, &t14);
    let mut rhs = named_element(n, "b5", &[2, 3, 2, 1, 4]).unwrap();
    rhs.add_assign(&named_element(n, "b5", &[3, 1, 2, 4, 1]).unwrap());
    rhs.add_assign(&named_element(n, "b5", &[2, 1, 3, 4, 1]).unwrap());
    assert_eq!(lhs, rhs);
}

#[test]
fn tangential_chart_coords_roundtrip() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
    for _ in 0..8 {
        let n = 3u8;
        let k = rng.gen_range(1..=3usize);
        let t = random_special(&mut rng, n, k);
        let chart = p_chart(n, k);
        let expect = t.chart_vec(&chart);
        let d = t.to_der().unwrap();
        let got = tangential_chart_coords(&d).unwrap();
        let got_int: ChartVec = got
            .into_iter()
            .map(|(c, r)| {
                assert!(r.is_integer());
                (c, r.to_integer())
            })
            .collect();
        assert_eq!(got_int, expect);
    }
}

#[test]
fn tangential_chart_coords_rejects_nontangential() {
    // x1*⊗[x2,x3] has no occurrence of x1 in its value.
    let d = DerElement::from_values(3, 1, &[(1, ln(&[2, 3]), one())]).unwrap();
    assert!(tangential_chart_coords(&d).is_err());
}

#[test]
fn composition_validation() {
    assert!(Composition::new(3, 4, &[2, 2]).is_ok());
    assert!(Composition::new(3, 4, &[2, 1]).is_err());
    assert!(Composition::new(2, 4, &[1, 1, 1, 1]).is_err());
    assert!(component_basis(3, 3, &Composition::new(3, 4, &[2, 2]).unwrap()).is_ok());
    let bad = Composition::new(3, 5, &[3, 2]).unwrap();
    assert!(component_basis(3, 3, &bad).is_err());
}

#[test]
fn serialization_shape() {
    let t = named_element(2, "t", &[1, 2]).unwrap();
    let j = t.to_json();
    assert_eq!(j["n"], 2);
    assert_eq!(j["k"], 1);
    let terms = j["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0]["dual"], 1);
    assert_eq!(terms[0]["coeff"], "-1");
    assert_eq!(terms[0]["word"].to_string(), "[1,2]");
}
