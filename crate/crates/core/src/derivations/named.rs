//! Named special derivations.
//!
//! Every constructor returns a tangential sum whose value components cancel,
//! which is asserted at build time; the public [`named_element`] front end
//! resolves a tag plus index list the way the command line does.

use num_traits::One;

use super::{tangentialize, DerElement, Tangential};
use crate::exactlin::{rat_int, Rat};
use crate::freelie::BracketTree;
use crate::{Error, Result};

fn lf(i: u8) -> BracketTree {
    BracketTree::leaf(i)
}

fn ln(word: &[u8]) -> BracketTree {
    BracketTree::left_normed(word)
}

fn check_range(n: u8, indices: &[u8]) -> Result<()> {
    for &i in indices {
        if i < 1 || i > n {
            return Err(Error::InvalidIndices(format!("index {} out of range 1..={}", i, n)));
        }
    }
    Ok(())
}

fn check_distinct(indices: &[u8], what: &str) -> Result<()> {
    let mut v = indices.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.len() != indices.len() {
        return Err(Error::InvalidIndices(format!("{} requires pairwise distinct indices", what)));
    }
    Ok(())
}

/// Finish a constructor: verify the sum-zero condition and hand out both the
/// tangential form and the normalized element.
fn finish(t: Tangential) -> Result<(Tangential, DerElement)> {
    let d = t.to_der()?;
    assert!(
        d.is_special_condition(),
        "named element violates the sum-zero condition; construction is wrong"
    );
    Ok((t, d))
}

/// t_{ij} = x_i* ⊗ [x_j, x_i] + x_j* ⊗ [x_i, x_j], the degree-1 generators.
pub fn t_pair(n: u8, i: u8, j: u8) -> Result<(Tangential, DerElement)> {
    check_range(n, &[i, j])?;
    check_distinct(&[i, j], "t")?;
    let mut t = Tangential::new(n, 1);
    t.push(i, lf(j), Rat::one());
    t.push(j, lf(i), Rat::one());
    finish(t)
}

/// The degree-2 image x_i*⊗[x_j,x_l,x_i] + x_j*⊗[x_l,x_i,x_j] + x_l*⊗[x_i,x_j,x_l].
pub fn tau2_image(n: u8, i: u8, j: u8, l: u8) -> Result<(Tangential, DerElement)> {
    check_range(n, &[i, j, l])?;
    check_distinct(&[i, j, l], "tau2")?;
    let mut t = Tangential::new(n, 2);
    t.push(i, ln(&[j, l]), Rat::one());
    t.push(j, ln(&[l, i]), Rat::one());
    t.push(l, ln(&[i, j]), Rat::one());
    finish(t)
}

/// The two-letter degree-3 element x_i*⊗[x_j,x_i,x_j,x_i] + x_j*⊗[x_i,x_j,x_i,x_j].
pub fn pair_cubed(n: u8, i: u8, j: u8) -> Result<(Tangential, DerElement)> {
    check_range(n, &[i, j])?;
    check_distinct(&[i, j], "pair element")?;
    let mut t = Tangential::new(n, 3);
    t.push(i, ln(&[j, i, j]), Rat::one());
    t.push(j, ln(&[i, j, i]), Rat::one());
    finish(t)
}

/// b(i,j,l,p) in degree 3.
pub fn b4(n: u8, i: u8, j: u8, l: u8, p: u8) -> Result<(Tangential, DerElement)> {
    check_range(n, &[i, j, l, p])?;
    let mut t = Tangential::new(n, 3);
    t.push(i, ln(&[l, j, p]), Rat::one());
    t.push(j, ln(&[p, i, l]), Rat::one());
    t.push(l, ln(&[p, i, j]), -Rat::one());
    t.push(p, ln(&[j, l, i]), Rat::one());
    finish(t)
}

/// b(i,j,l,p,q) in degree 4.
pub fn b5(n: u8, i: u8, j: u8, l: u8, p: u8, q: u8) -> Result<(Tangential, DerElement)> {
    check_range(n, &[i, j, l, p, q])?;
    let mut t = Tangential::new(n, 4);
    t.push(q, ln(&[i, j, l, p]), Rat::one());
    t.push(p, ln(&[i, j, l, q]), -Rat::one());
    t.push(j, ln(&[p, q, l, i]), -Rat::one());
    t.push(i, ln(&[p, q, l, j]), Rat::one());
    t.push(l, BracketTree::node(BracketTree::node(lf(i), lf(j)), BracketTree::node(lf(p), lf(q))), -Rat::one());
    finish(t)
}

/// b(i,j,l,p,q,r) in degree 5.
pub fn b6(n: u8, i: u8, j: u8, l: u8, p: u8, q: u8, r: u8) -> Result<(Tangential, DerElement)> {
    check_range(n, &[i, j, l, p, q, r])?;
    let mut t = Tangential::new(n, 5);
    t.push(i, ln(&[r, q, p, l, j]), Rat::one());
    t.push(j, ln(&[r, q, p, l, i]), -Rat::one());
    t.push(l, BracketTree::node(ln(&[r, q, p]), BracketTree::node(lf(j), lf(i))), -Rat::one());
    t.push(p, BracketTree::node(ln(&[i, j, l]), BracketTree::node(lf(q), lf(r))), -Rat::one());
    t.push(q, ln(&[i, j, l, p, r]), -Rat::one());
    t.push(r, ln(&[i, j, l, p, q]), Rat::one());
    finish(t)
}

/// n(i,j,l) = b(l,j,i,l,j,i) − b(l,j,l,i,j,i), degree 5, content (2,2,2).
pub fn n3(n: u8, i: u8, j: u8, l: u8) -> Result<(Tangential, DerElement)> {
    check_distinct(&[i, j, l], "n3")?;
    let (a, _) = b6(n, l, j, i, l, j, i)?;
    let (b, _) = b6(n, l, j, l, i, j, i)?;
    let mut t = a;
    for (d, p, c) in b.terms {
        t.push(d, p, -c);
    }
    finish(t)
}

/// n(i,j,l,p) = b(p,j,j,i,l,i), degree 5, content (2,2,1,1).
pub fn n4(n: u8, i: u8, j: u8, l: u8, p: u8) -> Result<(Tangential, DerElement)> {
    check_distinct(&[i, j, l, p], "n4")?;
    b6(n, p, j, j, i, l, i)
}

/// The sum-zero expansion of `[u,v] + [v,u] = 0` with
/// `u = [x_{i₁},…,x_{i_{k−1}}]` and `v = [x_j, x_{i₁}]`; for odd `k` its
/// symmetric trace is `2·e_{j,i₁,…,i_{k−1}}`.
pub fn doubled_monomial_preimage(n: u8, j: u8, is: &[u8]) -> Result<(Tangential, DerElement)> {
    if is.len() < 2 {
        return Err(Error::InvalidIndices("need at least two trailing indices".into()));
    }
    check_range(n, is)?;
    check_range(n, &[j])?;
    check_distinct(&[j, is[0], is[1]], "the leading three indices")?;
    let u = ln(is);
    let v = BracketTree::node(lf(j), lf(is[0]));
    let mut t = Tangential::new(n, is.len() + 1);
    tangentialize(&u, &v, Rat::one(), &mut t);
    tangentialize(&v, &u, Rat::one(), &mut t);
    finish(t)
}

/// The sum-zero expansion of the Jacobi identity
/// `[[w,x_i],x_j] + [[x_i,x_j],w] + [[x_j,w],x_i] = 0` with
/// `w = [x_i, x_j, x_{r₁}, …]`. For empty `rest` the middle term vanishes
/// and the symmetric trace is `−(e_{i,i,j} + e_{j,j,i})`; otherwise the full
/// expansion doubles it: `−2(e_{i,i,j,r…} + e_{j,j,i,r…})`.
pub fn mixed_pair_preimage(n: u8, i: u8, j: u8, rest: &[u8]) -> Result<(Tangential, DerElement)> {
    check_range(n, rest)?;
    check_range(n, &[i, j])?;
    check_distinct(&[i, j], "the leading two indices")?;
    let mut word = vec![i, j];
    word.extend_from_slice(rest);
    let w = ln(&word);
    let mut t = Tangential::new(n, word.len() + 1);
    tangentialize(&BracketTree::node(w.clone(), lf(i)), &lf(j), Rat::one(), &mut t);
    if !rest.is_empty() {
        tangentialize(&BracketTree::node(lf(i), lf(j)), &w, Rat::one(), &mut t);
    }
    tangentialize(&BracketTree::node(lf(j), w.clone()), &lf(i), Rat::one(), &mut t);
    finish(t)
}

/// The sum-zero expansion of `[A,v] + [v,A] = 0` with
/// `A = [x_{i₁},x_{i₂},x_i,[x_{i₃},x_{i₄}],…]` and `v = [x_j,x_i]`; for
/// `k ≡ 0 (mod 4)` its wedge trace is `2^{(k−2)/2}·w(i,j;i₁,…,i_{k−2})`.
pub fn wedge_pair_preimage(n: u8, i: u8, j: u8, is: &[u8]) -> Result<(Tangential, DerElement)> {
    let k = is.len() + 2;
    if k % 4 != 0 {
        return Err(Error::InvalidIndices(format!("degree {} must be divisible by 4", k)));
    }
    check_range(n, is)?;
    check_range(n, &[i, j])?;
    let mut all = vec![i, j];
    all.extend_from_slice(is);
    check_distinct(&all, "wedge preimage")?;
    let mut a = ln(&[is[0], is[1], i]);
    let mut rest = &is[2..];
    while !rest.is_empty() {
        a = BracketTree::node(a, BracketTree::node(lf(rest[0]), lf(rest[1])));
        rest = &rest[2..];
    }
    let v = BracketTree::node(lf(j), lf(i));
    let mut t = Tangential::new(n, k);
    tangentialize(&a, &v, Rat::one(), &mut t);
    tangentialize(&v, &a, Rat::one(), &mut t);
    finish(t)
}

/// Resolve a named element from a tag and index list (the CLI surface):
/// `t i j`, `tau2 i j l`, `b4 i j l p`, `b5 i j l p q`, `b6 i j l p q r`,
/// `n3 i j l`, `n4 i j l p`.
pub fn named_element(n: u8, tag: &str, indices: &[u8]) -> Result<DerElement> {
    Ok(named_tangential(n, tag, indices)?.1)
}

/// Same resolution, returning the tangential form as well.
pub fn named_tangential(n: u8, tag: &str, indices: &[u8]) -> Result<(Tangential, DerElement)> {
    let want = |count: usize| -> Result<()> {
        if indices.len() != count {
            Err(Error::InvalidIndices(format!(
                "{} takes {} indices, got {}",
                tag,
                count,
                indices.len()
            )))
        } else {
            Ok(())
        }
    };
    match tag {
        "t" => {
            want(2)?;
            t_pair(n, indices[0], indices[1])
        }
        "tau2" => {
            want(3)?;
            tau2_image(n, indices[0], indices[1], indices[2])
        }
        "b4" => {
            want(4)?;
            b4(n, indices[0], indices[1], indices[2], indices[3])
        }
        "b5" => {
            want(5)?;
            b5(n, indices[0], indices[1], indices[2], indices[3], indices[4])
        }
        "b6" => {
            want(6)?;
            b6(n, indices[0], indices[1], indices[2], indices[3], indices[4], indices[5])
        }
        "n3" => {
            want(3)?;
            n3(n, indices[0], indices[1], indices[2])
        }
        "n4" => {
            want(4)?;
            n4(n, indices[0], indices[1], indices[2], indices[3])
        }
        other => Err(Error::InvalidArgument(format!("unknown element name '{}'", other))),
    }
}

/// Scaled sum of named tangential elements (test helper).
pub fn combine(n: u8, k: usize, parts: &[(&Tangential, i64)]) -> Tangential {
    let mut out = Tangential::new(n, k);
    for (t, s) in parts {
        for (d, p, c) in &t.terms {
            out.push(*d, p.clone(), c * rat_int(*s));
        }
    }
    out
}
