//! Dense real linear algebra on top of `nalgebra`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

type CMatrix = DMatrix<Complex<f64>>;
type CVector = DVector<Complex<f64>>;

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Singular values sorted in decreasing order.
pub fn singular_values_desc(m: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// The dominant singular triplet `(σ₁, σ₂, u₁, v₁)`; `σ₂` is 0 for 1×1 inputs.
pub fn dominant_singular_triplet(m: &Matrix) -> (f64, f64, Vector, Vector) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    let s = &svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let top = order[0];
    let second = order.get(1).map_or(0.0, |&k| s[k]);
    (s[top], second, u.column(top).into_owned(), v_t.row(top).transpose())
}

/// Point matrix exponential `e^{A t}` (Padé scaling and squaring).
pub fn expm(a: &Matrix, t: f64) -> Matrix {
    (a * t).exp()
}

pub fn eigenvalues(a: &Matrix) -> Vec<Complex<f64>> {
    if a.is_empty() {
        return Vec::new();
    }
    a.complex_eigenvalues().iter().copied().collect()
}

/// Largest real part among the eigenvalues.
pub fn spectral_abscissa(a: &Matrix) -> f64 {
    eigenvalues(a).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Quantities of `A` consumed by the closed-form bloating bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    pub two_norm_a: f64,
    /// Spectral abscissa α(A).
    pub alpha_a: f64,
    /// Condition number of the (unit-column) eigenvector matrix; `None` when
    /// no well-conditioned eigenbasis was found.
    pub cond_s: Option<f64>,
    /// Spectral radius, the bound on `||D⁻¹ J D||₂` with `D = I`.
    pub eps_jordan: f64,
}

impl SpectralData {
    pub fn new(a: &Matrix) -> Self {
        let lambdas = eigenvalues(a);
        SpectralData {
            two_norm_a: spectral_norm(a),
            alpha_a: lambdas.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max),
            cond_s: eigenvector_condition(a, &lambdas),
            eps_jordan: lambdas.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    /// `cond(S)` when it is at most `cond_max`, else [`Error::Defective`].
    pub fn diagonalizable_cond(&self, cond_max: f64) -> Result<f64> {
        match self.cond_s {
            Some(k) if k <= cond_max => Ok(k),
            Some(k) => Err(Error::Defective { cond: k }),
            None => Err(Error::Defective { cond: f64::INFINITY }),
        }
    }
}

/// Eigenvector matrix of a square matrix by shifted inverse iteration.
///
/// Eigenvalues closer than a relative cluster tolerance are iterated as one
/// block and orthonormalised inside the block; if the block does not span an
/// invariant subspace of eigenvectors (a nontrivial Jordan block), `None`.
pub fn eigenvectors(a: &Matrix, lambdas: &[Complex<f64>]) -> Option<CMatrix> {
    let n = a.nrows();
    if n == 0 {
        return Some(CMatrix::zeros(0, 0));
    }
    let scale = spectral_norm(a).max(1.0);
    let cluster_tol = 1e-8 * scale;
    let shift = 1e-10 * scale;
    let ac: CMatrix = a.map(|x| Complex::new(x, 0.0));

    let mut vectors: Vec<CVector> = Vec::with_capacity(n);
    let mut cluster_of: Vec<usize> = Vec::with_capacity(n);
    for (k, &lambda) in lambdas.iter().enumerate() {
        let cluster = (0..k)
            .find(|&p| (lambdas[p] - lambda).norm() <= cluster_tol)
            .map_or(k, |p| cluster_of[p]);
        cluster_of.push(cluster);
        let peers: Vec<usize> = (0..k).filter(|&p| cluster_of[p] == cluster).collect();

        let mu = lambda + Complex::new(shift, shift);
        let mut shifted = ac.clone();
        for i in 0..n {
            shifted[(i, i)] -= mu;
        }
        let lu = shifted.lu();

        // Deterministic start vector, distinct per eigenvalue index.
        let mut v = CVector::from_fn(n, |i, _| {
            let x = ((i + 1) * (k + 3)) as f64;
            Complex::new((0.7 * x).sin() + 1.1, (1.3 * x).cos())
        });
        for _ in 0..6 {
            v = lu.solve(&v)?;
            for &p in &peers {
                let proj = vectors[p].dotc(&v);
                v -= &vectors[p] * proj;
            }
            let norm = v.norm();
            if !(norm.is_finite() && norm > 0.0) {
                return None;
            }
            v /= Complex::new(norm, 0.0);
        }
        let residual = (&ac * &v - &v * lambda).norm();
        if residual.is_nan() || residual > 1e-6 * scale {
            return None;
        }
        vectors.push(v);
    }
    Some(CMatrix::from_columns(&vectors))
}

fn eigenvector_condition(a: &Matrix, lambdas: &[Complex<f64>]) -> Option<f64> {
    let s = eigenvectors(a, lambdas)?;
    if s.is_empty() {
        return Some(1.0);
    }
    let sv = s.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 {
        Some((max / min).max(1.0))
    } else {
        None
    }
}
