//! First-order sensitivity of the largest singular value to single-cell
//! perturbations, used to rank the cells of a dynamics matrix.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::IntervalMatrix;
use crate::linalg::{self, Matrix, Vector};

/// Relative gap `σ₁ − σ₂ ≥ tol·σ₁` below which the top singular value is
/// treated as repeated.
pub const DEFAULT_GAP_TOL: f64 = 1e-10;

struct TopSingular {
    u: Vector,
    v: Vector,
}

fn top_singular(a: &Matrix, gap_tol: f64) -> Result<TopSingular> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let (s1, s2, u, v) = linalg::dominant_singular_triplet(a);
    let gap = s1 - s2;
    if s1.is_nan() || s1 <= 0.0 || gap < gap_tol * s1 {
        return Err(Error::DegenerateSv { gap });
    }
    Ok(TopSingular { u, v })
}

/// `|u₁ᵀ B v₁|`: magnitude of `dσ_max(A + εB)/dε` at `ε = 0`.
pub fn sv_change(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::mismatch(
            "sv_change",
            format!("{:?}", a.shape()),
            format!("{:?}", b.shape()),
        ));
    }
    let top = top_singular(a, DEFAULT_GAP_TOL)?;
    Ok(top.u.dot(&(b * &top.v)).abs())
}

/// Per-cell sensitivity scores and the cells sorted by decreasing score.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrdMatrix {
    #[serde(serialize_with = "serialize_rows")]
    pub scores: Matrix,
    /// Row-major index breaks ties.
    pub ranking: Vec<(usize, usize)>,
}

fn serialize_rows<S: serde::Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

impl OrdMatrix {
    pub fn score(&self, i: usize, j: usize) -> f64 {
        self.scores[(i, j)]
    }

    pub fn top(&self, k: usize) -> &[(usize, usize)] {
        &self.ranking[..k.min(self.ranking.len())]
    }

    pub fn bottom(&self, k: usize) -> &[(usize, usize)] {
        &self.ranking[self.ranking.len().saturating_sub(k)..]
    }

    /// Position of a cell in the ranking (0 = most sensitive).
    pub fn rank_of(&self, cell: (usize, usize)) -> Option<usize> {
        self.ranking.iter().position(|&c| c == cell)
    }
}

/// Rank every cell by `|A[i,j] u₁[i] v₁[j]|`, the first-order change of
/// `σ_max` under the relative perturbation `B = A[i,j] e_i e_jᵀ`.
pub fn order_cells(a: &Matrix) -> Result<OrdMatrix> {
    let top = top_singular(a, DEFAULT_GAP_TOL)?;
    let scores = Matrix::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] * top.u[i] * top.v[j]).abs());
    let mut ranking: Vec<(usize, usize)> = (0..a.nrows())
        .flat_map(|i| (0..a.ncols()).map(move |j| (i, j)))
        .collect();
    // stable sort keeps row-major order among equal scores
    ranking.sort_by(|&p, &q| scores[q].total_cmp(&scores[p]));
    Ok(OrdMatrix { scores, ranking })
}

/// Order the cells of `A` by their effect on the one-step map `e^{Ah}`.
///
/// The score of `(i,j)` is the first-order change of `σ_max(e^{(A+εB)h})`
/// with `B = A[i,j] e_i e_jᵀ`, evaluated through the Fréchet derivative of
/// the exponential (block-triangular exponential trick).
pub fn order_cells_discrete(a: &Matrix, h: f64) -> Result<OrdMatrix> {
    if !a.is_square() {
        return Err(Error::mismatch("order_cells_discrete", "square matrix", format!("{:?}", a.shape())));
    }
    let n = a.nrows();
    let flow = linalg::expm(a, h);
    let top = top_singular(&flow, DEFAULT_GAP_TOL)?;
    let mut scores = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if a[(i, j)] == 0.0 {
                continue;
            }
            // exp([[A, B], [0, A]] h) has the Fréchet derivative in its top-right block
            let mut big = Matrix::zeros(2 * n, 2 * n);
            big.view_mut((0, 0), (n, n)).copy_from(a);
            big.view_mut((n, n), (n, n)).copy_from(a);
            big[(i, n + j)] = a[(i, j)];
            let e = linalg::expm(&big, h);
            let deriv = e.view((0, n), (n, n)).into_owned();
            scores[(i, j)] = top.u.dot(&(deriv * &top.v)).abs();
        }
    }
    let mut ranking: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    ranking.sort_by(|&p, &q| scores[q].total_cmp(&scores[p]));
    Ok(OrdMatrix { scores, ranking })
}

/// `σ_max` of the Max SV candidate: bounds `||Ax||₂` for every `A ∈ L`, `||x||₂ = 1`.
pub fn max_sv_radius(l: &IntervalMatrix) -> Result<f64> {
    l.two_norm_sup()
}
