//! Dense elimination workers over exact integers and rationals.
//!
//! Everything here is deterministic: pivot choices depend only on the matrix
//! entries and fixed tie-breaking by position, never on hash order or thread
//! scheduling.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Int, Rat};

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
///
/// Pivots are chosen inside the remaining submatrix by minimal absolute
/// value, breaking ties by position; this keeps the exact-division entries
/// small on the sparse matrices produced by the Lie-algebra charts.
pub fn bareiss_rank(mut a: Vec<Vec<Int>>) -> usize {
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut prev = Int::one();
    let mut rank = 0;
    let mut row = 0;
    let mut col = 0;
    while row < m && col < n {
        let mut best: Option<(usize, usize)> = None;
        for i in row..m {
            for j in col..n {
                if !a[i][j].is_zero() {
                    let better = match &best {
                        None => true,
                        Some((bi, bj)) => a[i][j].magnitude() < a[*bi][*bj].magnitude(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(row, pi);
        for r in &mut a {
            r.swap(col, pj);
        }
        for i in row + 1..m {
            for j in col + 1..n {
                let t = &a[i][j] * &a[row][col] - &a[i][col] * &a[row][j];
                a[i][j] = t / &prev;
            }
            a[i][col] = Int::zero();
        }
        prev = a[row][col].clone();
        rank += 1;
        row += 1;
        col += 1;
    }
    rank
}

/// Reduced row echelon form over ℚ, in place. Returns pivot columns.
pub fn rref(a: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let m = a.len();
    if m == 0 {
        return Vec::new();
    }
    let n = a[0].len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row >= m {
            break;
        }
        let Some(p) = (row..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].clone();
        for j in col..n {
            let v = &a[row][j] / &inv;
            a[row][j] = v;
        }
        for i in 0..m {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..n {
                    let v = &a[i][j] - &f * &a[row][j];
                    a[i][j] = v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    a.truncate(row);
    pivots
}

/// Basis of the right null space over ℚ from an RREF, one vector per free
/// column, each scaled to a primitive integer vector whose first nonzero
/// entry is positive.
pub fn kernel_basis_from_rref(a: &[Vec<Rat>], pivots: &[usize], n: usize) -> Vec<Vec<Rat>> {
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); n];
        v[free] = Rat::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[r][free].clone();
        }
        basis.push(primitive_scaled(v));
    }
    basis
}

/// Scale a rational vector to a primitive integer vector (gcd 1) whose first
/// nonzero entry is positive. Returned entries still have type `Rat` but are
/// integral.
pub fn primitive_scaled(v: Vec<Rat>) -> Vec<Rat> {
    let mut lcm = Int::one();
    for x in &v {
        if !x.is_zero() {
            lcm = lcm.lcm(x.denom());
        }
    }
    let mut ints: Vec<Int> = v.iter().map(|x| (x * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let mut g = Int::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if !g.is_zero() && !g.is_one() {
        for x in &mut ints {
            *x = &*x / &g;
        }
    }
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut ints {
                *x = -x.clone();
            }
        }
    }
    ints.into_iter().map(Rat::from_integer).collect()
}

/// Saturated integer kernel of `rows` (an m×n integer matrix), returned as a
/// canonical (Hermite-reduced) lattice basis of `{x ∈ ℤⁿ : A·x = 0}`.
pub fn kernel_lattice(rows: &[Vec<Int>], n: usize) -> Vec<Vec<Int>> {
    // Column reduction with a unimodular transform: after processing every
    // row, the transform columns whose image column became zero form a basis
    // of the saturated kernel.
    let m = rows.len();
    let mut a: Vec<Vec<Int>> = rows.to_vec();
    let mut u: Vec<Vec<Int>> = (0..n)
        .map(|j| {
            let mut e = vec![Int::zero(); n];
            e[j] = Int::one();
            e
        })
        .collect();
    // u is stored column-major: u[j] is the j-th column of the transform.
    let mut active: Vec<usize> = (0..n).collect();
    for r in 0..m {
        loop {
            let mut nz: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&j| !a[r][j].is_zero())
                .collect();
            if nz.len() <= 1 {
                if let Some(&j) = nz.first() {
                    active.retain(|&c| c != j);
                }
                break;
            }
            nz.sort_by(|&x, &y| a[r][x].magnitude().cmp(a[r][y].magnitude()).then(x.cmp(&y)));
            let jmin = nz[0];
            for &j in &nz[1..] {
                let q = a[r][j].div_floor(&a[r][jmin]);
                if !q.is_zero() {
                    for i in r..m {
                        let t = &a[i][j] - &q * &a[i][jmin];
                        a[i][j] = t;
                    }
                    for i in 0..n {
                        let t = &u[j][i] - &q * &u[jmin][i];
                        u[j][i] = t;
                    }
                }
            }
        }
    }
    let kernel: Vec<Vec<Int>> = active.into_iter().map(|j| u[j].clone()).collect();
    let (h, _) = hnf(kernel);
    h
}

/// Row-style Hermite normal form. Returns the reduced nonzero rows (pivots
/// positive, entries above each pivot reduced into `[0, pivot)`) together
/// with the pivot column of each row.
pub fn hnf(rows: Vec<Vec<Int>>) -> (Vec<Vec<Int>>, Vec<usize>) {
    hnf_with_transform(rows).0
}

/// Hermite normal form tracking a transform: returns `((h, pivots), t)` with
/// `h = t · rows` (`t` has one row per row of `h`, expressed in the original
/// generators).
pub fn hnf_with_transform(rows: Vec<Vec<Int>>) -> ((Vec<Vec<Int>>, Vec<usize>), Vec<Vec<Int>>) {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    let mut a = rows;
    let mut t: Vec<Vec<Int>> = (0..m)
        .map(|i| {
            let mut e = vec![Int::zero(); m];
            e[i] = Int::one();
            e
        })
        .collect();
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        loop {
            let mut nz: Vec<usize> = (r..m).filter(|&i| !a[i][col].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            if nz.len() == 1 {
                let i = nz[0];
                a.swap(r, i);
                t.swap(r, i);
                break;
            }
            nz.sort_by(|&x, &y| a[x][col].magnitude().cmp(a[y][col].magnitude()).then(x.cmp(&y)));
            let imin = nz[0];
            for &i in &nz[1..] {
                let q = a[i][col].div_floor(&a[imin][col]);
                if !q.is_zero() {
                    for j in 0..n {
                        let v = &a[i][j] - &q * &a[imin][j];
                        a[i][j] = v;
                    }
                    for j in 0..m {
                        let v = &t[i][j] - &q * &t[imin][j];
                        t[i][j] = v;
                    }
                }
            }
        }
        if r < m && !a[r][col].is_zero() {
            if a[r][col].is_negative() {
                for j in 0..n {
                    a[r][j] = -a[r][j].clone();
                }
                for j in 0..m {
                    t[r][j] = -t[r][j].clone();
                }
            }
            for i in 0..r {
                let q = a[i][col].div_floor(&a[r][col]);
                if !q.is_zero() {
                    for j in 0..n {
                        let v = &a[i][j] - &q * &a[r][j];
                        a[i][j] = v;
                    }
                    for j in 0..m {
                        let v = &t[i][j] - &q * &t[r][j];
                        t[i][j] = v;
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
    }
    a.truncate(r);
    t.truncate(r);
    ((a, pivots), t)
}

/// Express `v` in a Hermite row basis by back-substitution over ℤ.
/// Returns the coefficient vector, or `None` when `v` is not in the ℤ-span.
pub fn solve_in_hnf(h: &[Vec<Int>], pivots: &[usize], v: &[Int]) -> Option<Vec<Int>> {
    let mut rem = v.to_vec();
    let mut coords = vec![Int::zero(); h.len()];
    for (r, &pc) in pivots.iter().enumerate() {
        if rem[pc].is_zero() {
            continue;
        }
        let (q, s) = rem[pc].div_rem(&h[r][pc]);
        if !s.is_zero() {
            return None;
        }
        for j in 0..rem.len() {
            let t = &rem[j] - &q * &h[r][j];
            rem[j] = t;
        }
        coords[r] = q;
    }
    if rem.iter().all(|x| x.is_zero()) {
        Some(coords)
    } else {
        None
    }
}

/// Invariant factors d₁ | d₂ | … of an integer matrix (nonzero ones only,
/// positive, divisibility chain enforced).
pub fn snf_invariant_factors(mut a: Vec<Vec<Int>>) -> Vec<Int> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut factors = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // Locate the minimal-absolute-value nonzero entry in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero() {
                    let better = match &best {
                        None => true,
                        Some((bi, bj)) => a[i][j].magnitude() < a[*bi][*bj].magnitude(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in &mut a {
            row.swap(t, bj);
        }
        // Clear row and column t, re-pivoting whenever a remainder is smaller.
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    for j in t..n {
                        let v = &a[i][j] - &q * &a[t][j];
                        a[i][j] = v;
                    }
                    if !a[i][t].is_zero() {
                        a.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for i in t..m {
                        let v = &a[i][j] - &q * &a[i][t];
                        a[i][j] = v;
                    }
                    if !a[t][j].is_zero() {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        // Fold in any entry the pivot does not divide yet.
        let mut folded = false;
        'scan: for i in t + 1..m {
            for j in t + 1..n {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    for col in t..n {
                        let v = &a[t][col] + &a[i][col];
                        a[t][col] = v;
                    }
                    folded = true;
                    break 'scan;
                }
            }
        }
        if folded {
            continue;
        }
        if a[t][t].is_negative() {
            a[t][t] = -a[t][t].clone();
        }
        factors.push(a[t][t].clone());
        t += 1;
    }
    factors
}

/// Dense copy helpers.
pub fn identity_rows(n: usize) -> Vec<Vec<Int>> {
    (0..n)
        .map(|i| {
            let mut e = vec![Int::zero(); n];
            e[i] = Int::one();
            e
        })
        .collect()
}
