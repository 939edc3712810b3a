//! Random generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uncertain_reach::interval::{Interval, IntervalMatrix};
use uncertain_reach::linalg::{Matrix, Vector};
use uncertain_reach::star::{Hyperbox, Star};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, scale: f64) -> Matrix {
    Matrix::from_fn(n, n, |_, _| rng.random_range(-scale..=scale))
}

/// Random centers in `[-c, c]`, radii in `[0, r]`; about a third of the
/// entries are exact points.
pub fn random_interval_matrix(rng: &mut impl Rng, n: usize, c: f64, r: f64) -> IntervalMatrix {
    IntervalMatrix::from_fn(n, n, |_, _| {
        let mid = rng.random_range(-c..=c);
        let rad = if rng.random_bool(0.33) { 0.0 } else { rng.random_range(0.0..=r) };
        Interval::centered(mid, rad).unwrap()
    })
}

/// A deviation interval matrix centred at zero.
pub fn random_deviation(rng: &mut impl Rng, n: usize, r: f64) -> IntervalMatrix {
    IntervalMatrix::from_fn(n, n, |_, _| {
        let rad = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..=r) };
        Interval::centered(0.0, rad).unwrap()
    })
}

pub fn random_box(rng: &mut impl Rng, n: usize) -> Hyperbox {
    let bounds: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let lo = rng.random_range(-1.0..=1.0);
            [lo, lo + rng.random_range(0.0..=0.5)]
        })
        .collect();
    Hyperbox::from_bounds(&bounds).unwrap()
}

pub fn random_star(rng: &mut impl Rng, n: usize, m: usize) -> Star {
    let anchor = Vector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
    let gens = Matrix::from_fn(n, m, |_, _| rng.random_range(-1.0..=1.0));
    let bounds = (0..m)
        .map(|_| {
            let lo = rng.random_range(-1.0..=0.5);
            Interval::new(lo, lo + rng.random_range(0.0..=1.0)).unwrap()
        })
        .collect();
    Star::new(anchor, gens, bounds).unwrap()
}

pub fn sample_point(rng: &mut impl Rng, b: &Hyperbox) -> Vector {
    Vector::from_iterator(b.dim(), b.intervals().iter().map(|iv| iv.sample(rng)))
}

pub fn sample_star_point(rng: &mut impl Rng, s: &Star) -> Vector {
    let alpha: Vec<f64> = s.coeff_bounds().iter().map(|iv| iv.sample(rng)).collect();
    s.point_at(&alpha)
}

/// Vertex samples (entries at an endpoint) are mixed in so that the extremes
/// of an interval matrix are exercised, not only its interior.
pub fn sample_matrix(rng: &mut impl Rng, l: &IntervalMatrix) -> Matrix {
    let vertex = rng.random_bool(0.5);
    Matrix::from_fn(l.rows(), l.cols(), |i, j| {
        let iv = l.get(i, j);
        if vertex {
            if rng.random_bool(0.5) { iv.lo() } else { iv.hi() }
        } else {
            iv.sample(rng)
        }
    })
}

pub fn random_unit(rng: &mut impl Rng, n: usize) -> Vector {
    loop {
        let v = Vector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
        let norm = v.norm();
        if norm > 1e-3 && norm <= 1.0 {
            return v / norm;
        }
    }
}

/// `e^{M}` by Taylor series on `M / 2^s` followed by `s` squarings.
/// Independent of the Padé routine used by the library.
pub fn taylor_expm(m: &Matrix) -> Matrix {
    let n = m.nrows();
    let norm = m.abs().row_sum().max();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = m / 2f64.powi(s);
    let mut term = Matrix::identity(n, n);
    let mut sum = Matrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Largest singular value via power iteration on `MᵀM` (independent of the SVD).
pub fn power_sigma(m: &Matrix) -> f64 {
    let mtm = m.transpose() * m;
    let mut v = Vector::from_fn(m.ncols(), |i, _| 1.0 + 0.1 * i as f64);
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let w = &mtm * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = v.dot(&w) / v.dot(&v);
        v = w / norm;
    }
    lambda.max(0.0).sqrt()
}

/// Cells ranked by the central finite difference of `σ_max` under the
/// relative perturbation `A[i,j] ← A[i,j](1 ± ε)`.
pub fn finite_difference_ranking(a: &Matrix, eps: f64) -> Vec<((usize, usize), f64)> {
    let sigma = |m: &Matrix| m.singular_values().max();
    let n = a.nrows();
    let mut scored = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut plus = a.clone();
            plus[(i, j)] += eps * a[(i, j)];
            let mut minus = a.clone();
            minus[(i, j)] -= eps * a[(i, j)];
            let d = ((sigma(&plus) - sigma(&minus)) / (2.0 * eps)).abs();
            scored.push(((i, j), d));
        }
    }
    scored.sort_by(|p, q| q.1.total_cmp(&p.1));
    scored
}

/// Relative gap between the two largest singular values.
pub fn sv_gap(a: &Matrix) -> f64 {
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    if s.len() < 2 { f64::INFINITY } else { s[0] - s[1] }
}
