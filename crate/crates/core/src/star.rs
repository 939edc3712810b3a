//! Generalized stars with box predicates.
//!
//! A [`Star`] `⟨a, G, P⟩` denotes `{ a + Σ α_j g_j : α_j ∈ [c_low^j, c_high^j] }`.
//! With per-coefficient box predicates every star is a zonotope, so support
//! functions and bounding boxes are closed-form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalMatrix};
use crate::linalg::{Matrix, Vector};

/// Axis-aligned hyperbox, one closed interval per dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperbox {
    intervals: Vec<Interval>,
}

impl Hyperbox {
    pub fn new(intervals: Vec<Interval>) -> Self {
        Hyperbox { intervals }
    }

    pub fn from_bounds(bounds: &[[f64; 2]]) -> Result<Self> {
        bounds
            .iter()
            .map(|&[lo, hi]| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()
            .map(Hyperbox::new)
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn lower(&self) -> Vector {
        Vector::from_iterator(self.dim(), self.intervals.iter().map(Interval::lo))
    }

    pub fn upper(&self) -> Vector {
        Vector::from_iterator(self.dim(), self.intervals.iter().map(Interval::hi))
    }

    pub fn center(&self) -> Vector {
        Vector::from_iterator(self.dim(), self.intervals.iter().map(Interval::mid))
    }

    pub fn volume(&self) -> f64 {
        self.intervals.iter().map(Interval::width).product()
    }

    /// `max_{x ∈ box} ||x||₂`.
    pub fn max_norm(&self) -> f64 {
        self.intervals
            .iter()
            .map(|iv| iv.mag() * iv.mag())
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        x.len() == self.dim()
            && self
                .intervals
                .iter()
                .zip(x.iter())
                .all(|(iv, &v)| iv.contains_with_tol(v, tol))
    }

    pub fn encloses(&self, other: &Hyperbox, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(a, b)| a.lo() - tol <= b.lo() && b.hi() <= a.hi() + tol)
    }

    pub fn inflate(&self, r: f64) -> Hyperbox {
        Hyperbox::new(self.intervals.iter().map(|iv| iv.inflate(r)).collect())
    }

    pub fn to_star(&self) -> Star {
        Star::from_box(self)
    }
}

/// `⟨anchor, generators, coefficient box⟩`; generators are the columns of an `n × m` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Star {
    anchor: Vector,
    generators: Matrix,
    coeff_bounds: Vec<Interval>,
}

impl Star {
    pub fn new(anchor: Vector, generators: Matrix, coeff_bounds: Vec<Interval>) -> Result<Self> {
        if generators.nrows() != anchor.len() {
            return Err(Error::mismatch("Star::new", anchor.len(), generators.nrows()));
        }
        if generators.ncols() != coeff_bounds.len() {
            return Err(Error::mismatch("Star::new", generators.ncols(), coeff_bounds.len()));
        }
        Ok(Star { anchor, generators, coeff_bounds })
    }

    /// Singleton set `{anchor}`.
    pub fn point(anchor: Vector) -> Self {
        let n = anchor.len();
        Star {
            anchor,
            generators: Matrix::zeros(n, 0),
            coeff_bounds: Vec::new(),
        }
    }

    /// `⟨0, I_n, box⟩`.
    pub fn from_box(b: &Hyperbox) -> Self {
        let n = b.dim();
        Star {
            anchor: Vector::zeros(n),
            generators: Matrix::identity(n, n),
            coeff_bounds: b.intervals().to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn num_generators(&self) -> usize {
        self.coeff_bounds.len()
    }

    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    pub fn generators(&self) -> &Matrix {
        &self.generators
    }

    pub fn coeff_bounds(&self) -> &[Interval] {
        &self.coeff_bounds
    }

    /// The point `a + Σ α_j g_j`; `alpha` is not checked against the predicate.
    pub fn point_at(&self, alpha: &[f64]) -> Vector {
        &self.anchor + &self.generators * Vector::from_column_slice(alpha)
    }

    /// `A·⟨a, G, P⟩ = ⟨A a, A G, P⟩`.
    pub fn linear_map(&self, a: &Matrix) -> Result<Star> {
        if a.ncols() != self.dim() {
            return Err(Error::mismatch("Star::linear_map", self.dim(), a.ncols()));
        }
        Ok(Star {
            anchor: a * &self.anchor,
            generators: a * &self.generators,
            coeff_bounds: self.coeff_bounds.clone(),
        })
    }

    /// `⟨a₁ + a₂, G₁ ∪ G₂, P₁ ∧ P₂⟩` with disjoint coefficient variables.
    pub fn minkowski_sum(&self, other: &Star) -> Result<Star> {
        if other.dim() != self.dim() {
            return Err(Error::mismatch("Star::minkowski_sum", self.dim(), other.dim()));
        }
        let n = self.dim();
        let (m1, m2) = (self.num_generators(), other.num_generators());
        let mut generators = Matrix::zeros(n, m1 + m2);
        generators.columns_mut(0, m1).copy_from(&self.generators);
        generators.columns_mut(m1, m2).copy_from(&other.generators);
        let mut coeff_bounds = Vec::with_capacity(m1 + m2);
        coeff_bounds.extend_from_slice(&self.coeff_bounds);
        coeff_bounds.extend_from_slice(&other.coeff_bounds);
        Ok(Star {
            anchor: &self.anchor + &other.anchor,
            generators,
            coeff_bounds,
        })
    }

    /// Support function `max_{x ∈ S} ℓ·x`.
    pub fn support(&self, dir: &Vector) -> Result<f64> {
        if dir.len() != self.dim() {
            return Err(Error::mismatch("Star::support", self.dim(), dir.len()));
        }
        let projected = self.generators.tr_mul(dir);
        let spread: f64 = projected
            .iter()
            .zip(&self.coeff_bounds)
            .map(|(&p, c)| (c.lo() * p).max(c.hi() * p))
            .sum();
        Ok(dir.dot(&self.anchor) + spread)
    }

    /// Per-axis interval sums `a[i] + Σ_j [c_low^j, c_high^j] g_j[i]`.
    fn axis_enclosure(&self) -> Vec<Interval> {
        (0..self.dim())
            .map(|i| {
                let row = self.generators.row(i);
                row.iter()
                    .zip(&self.coeff_bounds)
                    .fold(Interval::point(self.anchor[i]), |acc, (&g, c)| acc + c.scale(g))
            })
            .collect()
    }

    /// Axis-aligned bounding box; coincides with the box of [`Star::interval_reduce`].
    pub fn bounding_box(&self) -> Hyperbox {
        Hyperbox::new(self.axis_enclosure())
    }

    /// Replaces all generators by the `n` axis-aligned generators of the bounding box.
    pub fn interval_reduce(&self) -> Star {
        Star::from_box(&self.bounding_box())
    }

    /// Order reduction to at most `target` generators.
    ///
    /// The `target - n` generators with the largest extent `||g_j|| · rad(c_j)`
    /// are kept (ties keep the lower index); the rest are replaced by the
    /// axis-aligned box hull of their interval sum, as `n` axis generators.
    pub fn zonotope_reduce(&self, target: usize) -> Result<Star> {
        let n = self.dim();
        if target < n {
            return Err(Error::InvalidArgument(format!(
                "reduction target {target} is below the dimension {n}"
            )));
        }
        let m = self.num_generators();
        if m <= target {
            return Ok(self.clone());
        }
        let keep = target - n;
        let extent: Vec<f64> = (0..m)
            .map(|j| self.generators.column(j).norm() * self.coeff_bounds[j].rad())
            .collect();
        let mut order: Vec<usize> = (0..m).collect();
        // stable: equal extents keep their original relative order
        order.sort_by(|&a, &b| extent[b].total_cmp(&extent[a]));
        let mut kept: Vec<usize> = order[..keep].to_vec();
        kept.sort_unstable();
        let mut merged = vec![Interval::ZERO; n];
        for &j in &order[keep..] {
            let c = self.coeff_bounds[j];
            for (i, acc) in merged.iter_mut().enumerate() {
                *acc = *acc + c.scale(self.generators[(i, j)]);
            }
        }

        let mut generators = Matrix::zeros(n, keep + n);
        let mut coeff_bounds = Vec::with_capacity(keep + n);
        for (col, &j) in kept.iter().enumerate() {
            generators.set_column(col, &self.generators.column(j));
            coeff_bounds.push(self.coeff_bounds[j]);
        }
        for (i, iv) in merged.into_iter().enumerate() {
            generators[(i, keep + i)] = 1.0;
            coeff_bounds.push(iv);
        }
        Ok(Star {
            anchor: self.anchor.clone(),
            generators,
            coeff_bounds,
        })
    }

    /// Box star containing `Λ·S`, from the split `Λ = C ± R`: the exact box
    /// hull of `C·S` widened by `R·|x|` over the bounding box of `S`.
    ///
    /// Unlike [`Star::interval_image_box`] this is monotone in `S`: the
    /// result for `S ⊆ S'` lies inside the result for `S'`.
    pub fn interval_image_hull(&self, lambda: &IntervalMatrix) -> Result<Star> {
        let n = self.dim();
        if lambda.shape() != (n, n) {
            return Err(Error::mismatch(
                "Star::interval_image_hull",
                format!("({n}, {n})"),
                format!("{:?}", lambda.shape()),
            ));
        }
        let hull = self.linear_map(&lambda.center())?.bounding_box();
        let mag = Vector::from_iterator(n, self.bounding_box().intervals().iter().map(Interval::mag));
        let spread = lambda.radius() * mag;
        let d = hull
            .intervals()
            .iter()
            .zip(spread.iter())
            .map(|(iv, &s)| iv.inflate(s))
            .collect();
        Ok(Star::from_box(&Hyperbox::new(d)))
    }

    /// Box star `u = ⟨0, I_n, d⟩` with `Λ·S ⊆ u`, where `d_i` is the interval
    /// evaluation of `(Λ a)[i] + Σ_j [c_low^j, c_high^j] (Λ g_j)[i]`.
    pub fn interval_image_box(&self, lambda: &IntervalMatrix) -> Result<Star> {
        let n = self.dim();
        if lambda.shape() != (n, n) {
            return Err(Error::mismatch(
                "Star::interval_image_box",
                format!("({n}, {n})"),
                format!("{:?}", lambda.shape()),
            ));
        }
        // Λ v for a point v is exactly [C v - R |v|, C v + R |v|].
        let c = lambda.center();
        let r = lambda.radius();
        let ca = &c * &self.anchor;
        let ra = &r * self.anchor.abs();
        let cg = &c * &self.generators;
        let rg = &r * self.generators.abs();
        let d = (0..n)
            .map(|i| {
                let base = Interval::centered(ca[i], ra[i]).unwrap_or(Interval::ZERO);
                self.coeff_bounds
                    .iter()
                    .enumerate()
                    .fold(base, |acc, (j, coeff)| {
                        let column = Interval::centered(cg[(i, j)], rg[(i, j)])
                            .unwrap_or(Interval::ZERO);
                        acc + *coeff * column
                    })
            })
            .collect();
        Ok(Star::from_box(&Hyperbox::new(d)))
    }

    /// Necessary membership test: `ℓ·x ≤ ρ_S(ℓ) + tol` on the `2n` axis
    /// directions and every direction in `extra`.
    pub fn passes_support_membership(&self, x: &Vector, extra: &[Vector], tol: f64) -> Result<bool> {
        if !self.bounding_box().contains(x, tol) {
            return Ok(false);
        }
        for dir in extra {
            if dir.dot(x) > self.support(dir)? + tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `count` unit directions in `R^n` from a fixed-seed generator.
pub fn sample_directions(n: usize, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| unit_vector(&mut rng, n)).collect()
}

/// Uniform direction on the unit sphere (normalised Gaussian vector).
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    loop {
        let v = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}
