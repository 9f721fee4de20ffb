//! The graded image of the braid group inside the special derivation
//! algebra, computed intrinsically: the lower-central-series algebra of the
//! pure braid group is generated in degree 1 and its degree-1 image is
//! spanned by the pair elements t_{ij}, so each graded piece is the ℤ-span
//! of iterated brackets of the previous piece with the t's.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Zero};

use crate::derivations::{
    named, p_chart, special_kernel, tang_bracket, tang_from_chart_vec, ChartVec, DerSubspace,
    Tangential,
};
use crate::exactlin::{self, presentation_from_coords, Int, QuotientPresentation};
use crate::traces::{trace_matrix, TraceKind};
use crate::util::{divisors, moebius};
use crate::{Error, Result};

/// Rank of the degree-k graded piece of the pure-braid lower central
/// series: `(1/k) Σ_{d|k} μ(d) Σ_{j=1}^{n−1} j^{k/d}`.
pub fn braid_lcs_rank(n: u64, k: u64) -> u64 {
    assert!(n >= 2 && k >= 1);
    let mut sum: i128 = 0;
    for d in divisors(k) {
        let mu = moebius(d) as i128;
        if mu == 0 {
            continue;
        }
        let mut inner: i128 = 0;
        for j in 1..n {
            inner += (j as i128).pow((k / d) as u32);
        }
        sum += mu * inner;
    }
    debug_assert!(sum >= 0 && sum % k as i128 == 0);
    (sum / k as i128) as u64
}

/// A sublattice of 𝔟ₙ(k), held as Hermite-canonical coordinate rows in the
/// basis of the special kernel lattice.
pub struct SpecialSublattice {
    pub n: u8,
    pub k: usize,
    pub ambient: Arc<DerSubspace>,
    /// Hermite basis rows, coordinates in the ambient 𝔟ₙ(k) basis.
    pub coords: Vec<Vec<Int>>,
    pub pivots: Vec<usize>,
    /// Invariant factors of the generator-coordinate matrix: the sublattice
    /// is saturated in 𝔟ₙ(k) exactly when all factors are 1.
    pub saturation_factors: Vec<Int>,
}

impl SpecialSublattice {
    /// Build from chart vectors that must lie in 𝔟ₙ(k) (ℤ-exactly).
    pub fn from_chart_gens(n: u8, k: usize, gens: &[ChartVec]) -> Result<SpecialSublattice> {
        let ambient = special_kernel(n, k);
        let mut rows = Vec::with_capacity(gens.len());
        for (gi, g) in gens.iter().enumerate() {
            let Some(c) = ambient.express_chart_vec(g) else {
                return Err(Error::NotInAmbient(format!(
                    "generator {} is not in the special kernel lattice",
                    gi
                )));
            };
            rows.push(c);
        }
        Ok(Self::from_coord_rows(n, k, ambient, rows))
    }

    pub fn from_coord_rows(n: u8, k: usize, ambient: Arc<DerSubspace>, rows: Vec<Vec<Int>>) -> SpecialSublattice {
        let saturation_factors = exactlin::dense::snf_invariant_factors(rows.clone());
        let (coords, pivots) = exactlin::dense::hnf(rows);
        SpecialSublattice { n, k, ambient, coords, pivots, saturation_factors }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation_factors.iter().all(|d| d.is_one())
    }

    /// Integral membership of a coordinate vector (in the ambient basis).
    pub fn contains_coords(&self, v: &[Int]) -> bool {
        exactlin::dense::solve_in_hnf(&self.coords, &self.pivots, v).is_some()
    }

    /// Presentation of 𝔟ₙ(k) / (this sublattice).
    pub fn cokernel_in_special(&self) -> QuotientPresentation {
        presentation_from_coords(self.ambient.rank(), self.coords.clone())
    }

    /// Basis vectors as chart vectors of the ambient chart.
    pub fn chart_vectors(&self) -> Vec<ChartVec> {
        let basis = self.ambient.chart_vectors();
        self.coords
            .iter()
            .map(|row| {
                let mut acc: std::collections::BTreeMap<u32, Int> = std::collections::BTreeMap::new();
                for (c, bv) in row.iter().zip(&basis) {
                    if c.is_zero() {
                        continue;
                    }
                    for &(col, ref x) in bv {
                        let e = acc.entry(col).or_insert_with(Int::zero);
                        *e += c * x;
                    }
                }
                acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
            })
            .collect()
    }
}

/// The graded subalgebra generated in degree 1 by the t_{ij}, degree by
/// degree.
pub struct GradedSubalgebra {
    pub n: u8,
    /// Pieces V₁, V₂, …; `pieces[k-1]` is the degree-k piece.
    pub pieces: Vec<Arc<SpecialSublattice>>,
}

impl GradedSubalgebra {
    pub fn piece(&self, k: usize) -> &SpecialSublattice {
        &self.pieces[k - 1]
    }
}

fn piece_registry() -> &'static RwLock<HashMap<(u8, usize), Arc<SpecialSublattice>>> {
    static REG: OnceLock<RwLock<HashMap<(u8, usize), Arc<SpecialSublattice>>>> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

fn degree_one_tangentials(n: u8) -> Vec<Tangential> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            out.push(named::t_pair(n, i, j).expect("t generator").0);
        }
    }
    out
}

/// The degree-k piece of the braid image, cached per (n, k).
pub fn johnson_piece(n: u8, k: usize) -> Arc<SpecialSublattice> {
    if let Some(p) = piece_registry().read().unwrap().get(&(n, k)) {
        return p.clone();
    }
    let piece = Arc::new(compute_piece(n, k));
    let mut reg = piece_registry().write().unwrap();
    reg.entry((n, k)).or_insert(piece).clone()
}

fn compute_piece(n: u8, k: usize) -> SpecialSublattice {
    let gens: Vec<ChartVec> = if k == 1 {
        let chart = p_chart(n, 1);
        degree_one_tangentials(n).iter().map(|t| t.chart_vec(&chart)).collect()
    } else {
        let prev = johnson_piece(n, k - 1);
        let chart_prev = p_chart(n, k - 1);
        let chart = p_chart(n, k);
        let ts = degree_one_tangentials(n);
        let mut out = Vec::new();
        for v in prev.chart_vectors() {
            let tv = tang_from_chart_vec(&chart_prev, &v);
            for t in &ts {
                out.push(tang_bracket(&tv, t).chart_vec(&chart));
            }
        }
        out
    };
    SpecialSublattice::from_chart_gens(n, k, &gens)
        .expect("brackets of special elements stay special")
}

/// The braid image up to degree `max_k`.
pub fn johnson_image(n: u8, max_k: usize) -> GradedSubalgebra {
    assert!(n >= 2 && max_k >= 1);
    let pieces = (1..=max_k).map(|k| johnson_piece(n, k)).collect();
    GradedSubalgebra { n, pieces }
}

/// Presentation of 𝔟ₙ(k) / (degree-k braid image).
pub fn johnson_cokernel(n: u8, k: usize) -> QuotientPresentation {
    johnson_piece(n, k).cokernel_in_special()
}

/// The kernel of a trace map restricted to 𝔟ₙ(k), as a saturated sublattice
/// in the 𝔟-basis (`None` means the zero map, whose kernel is everything).
pub fn trace_kernel_sublattice(n: u8, k: usize, kind: Option<TraceKind>) -> Result<SpecialSublattice> {
    let ambient = special_kernel(n, k);
    let r = ambient.rank();
    let rows = match kind {
        None => exactlin::dense::identity_rows(r),
        Some(kind) => {
            let t = trace_matrix(kind, &ambient)?;
            // Kernel of c ↦ Σ c_a t[a]: transpose and take the saturated kernel.
            let dim = t.first().map_or(0, |row| row.len());
            let mut transposed = vec![vec![Int::zero(); r]; dim];
            for (a, row) in t.iter().enumerate() {
                for (b, x) in row.iter().enumerate() {
                    if !x.is_zero() {
                        transposed[b][a] = x.clone();
                    }
                }
            }
            exactlin::dense::kernel_lattice(&transposed, r)
        }
    };
    Ok(SpecialSublattice::from_coord_rows(n, k, ambient, rows))
}

/// Does the degree-k braid image equal the kernel of the given trace map as
/// a ℤ-lattice?
pub fn kernel_equality_check(n: u8, k: usize, kind: Option<TraceKind>) -> Result<bool> {
    let v = johnson_piece(n, k);
    let ker = trace_kernel_sublattice(n, k, kind)?;
    Ok(v.coords == ker.coords)
}
