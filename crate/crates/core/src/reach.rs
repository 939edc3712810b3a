//! Numeric reachability for `x⁺ = (Ā + Λ̄) x` with star sets.
//!
//! The over-approximate reach set follows
//! `ORS_0 = Θ`, `ORS_k = Ā·ORS_{k−1} ⊕ u_k` with `Λ̄·ORS_{k−1} ⊆ u_k`,
//! optionally reducing the generator count every `period` steps.
//!
//! `u_k` defaults to [`Star::interval_image_hull`]. The per-generator
//! interval evaluation [`Star::interval_image_box`] is also sound, but it is
//! not monotone in the set it encloses, so a reduced flowpipe computed with
//! it can poke outside the unreduced one in later steps.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalMatrix, DEFAULT_EXP_ORDER};
use crate::linalg::{self, Matrix, Vector};
use crate::star::{Hyperbox, Star};

pub const DEFAULT_REDUCTION_PERIOD: usize = 500;
pub const DEFAULT_STEP: f64 = 0.01;

/// How a perturbed cell's entry is widened.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CellUncertainty {
    /// `A[i,j] ± r·|A[i,j]|`.
    Relative(f64),
    /// The entry ranges over this interval.
    Interval(Interval),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UncertainCell {
    pub row: usize,
    pub col: usize,
    pub spec: CellUncertainty,
}

/// Unsafe region `{ x : normal·x ≥ offset }`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    pub normal: Vector,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        if normal.iter().all(|&x| x == 0.0) {
            return Err(Error::InvalidArgument("half-space normal must be nonzero".into()));
        }
        Ok(HalfSpace { normal, offset })
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.normal.dot(x) >= self.offset
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionMethod {
    None,
    Interval,
    Zonotope,
}

impl FromStr for ReductionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ReductionMethod::None),
            "interval" => Ok(ReductionMethod::Interval),
            "zonotope" => Ok(ReductionMethod::Zonotope),
            other => Err(Error::InvalidArgument(format!("unknown reduction method `{other}`"))),
        }
    }
}

impl fmt::Display for ReductionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionMethod::None => "none",
            ReductionMethod::Interval => "interval",
            ReductionMethod::Zonotope => "zonotope",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionPolicy {
    pub method: ReductionMethod,
    pub period: usize,
    /// Generator budget for zonotope reduction; `None` means `2n`.
    pub target: Option<usize>,
}

impl ReductionPolicy {
    pub const NONE: ReductionPolicy = ReductionPolicy {
        method: ReductionMethod::None,
        period: DEFAULT_REDUCTION_PERIOD,
        target: None,
    };

    pub fn every(method: ReductionMethod, period: usize) -> Self {
        ReductionPolicy { method, period, target: None }
    }

    fn apply(&self, step: usize, star: Star) -> Result<Star> {
        if self.method == ReductionMethod::None || self.period == 0 || !step.is_multiple_of(self.period) {
            return Ok(star);
        }
        match self.method {
            ReductionMethod::None => Ok(star),
            ReductionMethod::Interval => Ok(star.interval_reduce()),
            ReductionMethod::Zonotope => {
                let target = self.target.unwrap_or(2 * star.dim());
                star.zonotope_reduce(target)
            }
        }
    }
}

impl Default for ReductionPolicy {
    fn default() -> Self {
        ReductionPolicy::NONE
    }
}

/// A linear system with interval uncertainty on selected cells.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub a: Matrix,
    pub uncertainty: Vec<UncertainCell>,
    pub continuous: bool,
    /// Discretization step, used when `continuous`.
    pub step: f64,
    pub horizon: usize,
    pub initial: Hyperbox,
    pub unsafe_set: Vec<HalfSpace>,
    pub reduction: ReductionPolicy,
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if n == 0 || !self.a.is_square() {
            return bad(format!("dynamics must be a nonempty square matrix, got {:?}", self.a.shape()));
        }
        if self.a.iter().any(|x| !x.is_finite()) {
            return bad("dynamics contain non-finite entries".into());
        }
        if self.continuous && !(self.step > 0.0 && self.step.is_finite()) {
            return bad(format!("step must be positive, got {}", self.step));
        }
        if self.horizon < 1 {
            return bad("horizon must be at least 1".into());
        }
        if self.initial.dim() != n {
            return bad(format!("initial box has dimension {}, expected {n}", self.initial.dim()));
        }
        if self
            .initial
            .intervals()
            .iter()
            .any(|iv| !iv.lo().is_finite() || !iv.hi().is_finite())
        {
            return bad("initial box must be bounded".into());
        }
        for (k, h) in self.unsafe_set.iter().enumerate() {
            if h.normal.len() != n {
                return bad(format!("unsafe half-space {k} has dimension {}, expected {n}", h.normal.len()));
            }
            if h.normal.iter().chain([&h.offset]).any(|x| !x.is_finite()) {
                return bad(format!("unsafe half-space {k} has non-finite values"));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.uncertainty {
            if c.row >= n || c.col >= n {
                return Err(Error::CellOutOfRange { row: c.row, col: c.col, n });
            }
            if !seen.insert((c.row, c.col)) {
                return bad(format!("cell ({}, {}) listed twice", c.row, c.col));
            }
            match c.spec {
                CellUncertainty::Relative(r) if !(r >= 0.0 && r.is_finite()) => {
                    return bad(format!("relative uncertainty must be >= 0, got {r}"));
                }
                CellUncertainty::Interval(iv) if !iv.lo().is_finite() || !iv.hi().is_finite() => {
                    return bad("uncertainty interval must be finite".into());
                }
                _ => {}
            }
        }
        if self.reduction.method != ReductionMethod::None && self.reduction.period == 0 {
            return bad("reduction period must be positive".into());
        }
        if let Some(t) = self.reduction.target {
            if t < n {
                return bad(format!("reduction target {t} is below the dimension {n}"));
            }
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<(usize, usize)> {
        self.uncertainty.iter().map(|c| (c.row, c.col)).collect()
    }

    /// Deviation `Λ` such that the uncertain dynamics are `A + Λ`.
    pub fn uncertainty_matrix(&self) -> Result<IntervalMatrix> {
        let n = self.dim();
        let mut lambda = IntervalMatrix::zeros(n, n);
        for c in &self.uncertainty {
            if c.row >= n || c.col >= n {
                return Err(Error::CellOutOfRange { row: c.row, col: c.col, n });
            }
            let a = self.a[(c.row, c.col)];
            let dev = match c.spec {
                CellUncertainty::Relative(r) => Interval::centered(0.0, r * a.abs())?,
                CellUncertainty::Interval(iv) => iv - Interval::point(a),
            };
            lambda.set(c.row, c.col, dev);
        }
        Ok(lambda)
    }

    /// `(Ā, Λ̄)` for the given deviation, discretizing when the model is continuous.
    pub fn discrete_system_with(&self, lambda: &IntervalMatrix) -> Result<DiscreteSystem> {
        if self.continuous {
            discretize(&self.a, lambda, self.step)
        } else {
            DiscreteSystem::new(self.a.clone(), lambda.clone())
        }
    }

    pub fn discrete_system(&self) -> Result<DiscreteSystem> {
        self.discrete_system_with(&self.uncertainty_matrix()?)
    }

    pub fn numeric_reach_with(&self, lambda: &IntervalMatrix) -> Result<ReachResult> {
        let sys = self.discrete_system_with(lambda)?;
        ors_reach(&sys, &self.initial, self.horizon, &self.reduction)
    }

    /// Discretize (if needed) and run the `ORS` recurrence over the horizon.
    pub fn numeric_reach(&self) -> Result<ReachResult> {
        self.numeric_reach_with(&self.uncertainty_matrix()?)
    }

    /// Time stamps `k·h`, `k = 0..=horizon`, of the discrete steps.
    pub fn time_grid(&self) -> Vec<f64> {
        let h = if self.continuous { self.step } else { 1.0 };
        (0..=self.horizon).map(|k| k as f64 * h).collect()
    }
}

/// `x⁺ = (Ā + E) x` for `E ∈ Λ̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSystem {
    pub a: Matrix,
    pub lambda: IntervalMatrix,
}

impl DiscreteSystem {
    pub fn new(a: Matrix, lambda: IntervalMatrix) -> Result<Self> {
        if !a.is_square() || lambda.shape() != a.shape() {
            return Err(Error::mismatch(
                "DiscreteSystem::new",
                format!("{:?}", a.shape()),
                format!("{:?}", lambda.shape()),
            ));
        }
        Ok(DiscreteSystem { a, lambda })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscretizeOptions {
    pub order: usize,
    /// Added to every endpoint of `Λ̄`.
    pub round_slack: f64,
}

impl Default for DiscretizeOptions {
    fn default() -> Self {
        DiscretizeOptions {
            order: DEFAULT_EXP_ORDER,
            round_slack: 0.0,
        }
    }
}

pub fn discretize(a: &Matrix, lambda: &IntervalMatrix, h: f64) -> Result<DiscreteSystem> {
    discretize_with(a, lambda, h, &DiscretizeOptions::default())
}

/// `Ā = e^{Ah}` and `Λ̄ = M ⊖ Ā` with `M ⊇ { e^{(A+E)h} : E ∈ Λ }`.
///
/// The nominal part stays a point matrix; all conservatism of the interval
/// exponential ends up in `Λ̄`. A zero `Λ` maps to a zero `Λ̄`.
pub fn discretize_with(
    a: &Matrix,
    lambda: &IntervalMatrix,
    h: f64,
    opts: &DiscretizeOptions,
) -> Result<DiscreteSystem> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    if !a.is_square() || lambda.shape() != a.shape() {
        return Err(Error::mismatch(
            "discretize",
            format!("{:?}", a.shape()),
            format!("{:?}", lambda.shape()),
        ));
    }
    let a_bar = linalg::expm(a, h);
    let n = a.nrows();
    let mut lambda_bar = if lambda.is_zero() {
        IntervalMatrix::zeros(n, n)
    } else {
        let full = lambda.add_point(a)?.exp(h, opts.order)?;
        full.sub_point(&a_bar)?
    };
    if opts.round_slack > 0.0 {
        lambda_bar = lambda_bar.inflate(opts.round_slack);
    }
    DiscreteSystem::new(a_bar, lambda_bar)
}

/// How `u_k ⊇ Λ̄·ORS_{k−1}` is enclosed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageEnclosure {
    /// [`Star::interval_image_hull`]; monotone, so a reduced flowpipe
    /// always contains the unreduced one.
    #[default]
    Hull,
    /// [`Star::interval_image_box`], interval arithmetic per generator.
    PerGenerator,
}

/// Per-step reach sets of one pipeline run.
#[derive(Clone, Debug)]
pub struct ReachResult {
    pub method: String,
    pub stars: Vec<Star>,
    pub elapsed: Duration,
}

impl ReachResult {
    pub fn len(&self) -> usize {
        self.stars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stars.is_empty()
    }

    pub fn boxes(&self) -> Vec<Hyperbox> {
        self.stars.iter().map(Star::bounding_box).collect()
    }

    pub fn generator_counts(&self) -> Vec<usize> {
        self.stars.iter().map(Star::num_generators).collect()
    }
}

pub fn ors_reach(
    sys: &DiscreteSystem,
    initial: &Hyperbox,
    horizon: usize,
    policy: &ReductionPolicy,
) -> Result<ReachResult> {
    ors_reach_with(sys, initial, horizon, policy, ImageEnclosure::default())
}

pub fn ors_reach_with(
    sys: &DiscreteSystem,
    initial: &Hyperbox,
    horizon: usize,
    policy: &ReductionPolicy,
    enclosure: ImageEnclosure,
) -> Result<ReachResult> {
    let n = sys.a.nrows();
    if initial.dim() != n {
        return Err(Error::mismatch("ors_reach", n, initial.dim()));
    }
    let start = Instant::now();
    let uncertain = !sys.lambda.is_zero();
    let mut stars = Vec::with_capacity(horizon + 1);
    let mut current = initial.to_star();
    stars.push(current.clone());
    for k in 1..=horizon {
        let mut next = current.linear_map(&sys.a)?;
        if uncertain {
            let u = match enclosure {
                ImageEnclosure::Hull => current.interval_image_hull(&sys.lambda)?,
                ImageEnclosure::PerGenerator => current.interval_image_box(&sys.lambda)?,
            };
            next = next.minkowski_sum(&u)?;
        }
        current = policy.apply(k, next)?;
        stars.push(current.clone());
    }
    Ok(ReachResult {
        method: format!("numeric/{}", policy.method),
        stars,
        elapsed: start.elapsed(),
    })
}

/// `Ā^k Θ` for `k = 0..=horizon`.
pub fn nominal_reach(a: &Matrix, theta: &Hyperbox, horizon: usize) -> Result<ReachResult> {
    let sys = DiscreteSystem::new(a.clone(), IntervalMatrix::zeros(a.nrows(), a.ncols()))?;
    let mut r = ors_reach(&sys, theta, horizon, &ReductionPolicy::NONE)?;
    r.method = "nominal".into();
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum SafetyVerdict {
    Safe,
    Unsafe { step: usize, half_space: usize },
}

impl SafetyVerdict {
    pub fn is_safe(&self) -> bool {
        matches!(self, SafetyVerdict::Safe)
    }
}

impl fmt::Display for SafetyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SafetyVerdict::Safe => write!(f, "safe"),
            SafetyVerdict::Unsafe { step, half_space } => {
                write!(f, "unsafe at step {step} (half-space {half_space})")
            }
        }
    }
}

/// First step whose reach set touches an unsafe half-space (`ρ(ℓ) ≥ b`).
pub fn first_violation<F>(steps: usize, unsafe_set: &[HalfSpace], mut support: F) -> Result<SafetyVerdict>
where
    F: FnMut(usize, &Vector) -> Result<f64>,
{
    for k in 0..steps {
        for (idx, h) in unsafe_set.iter().enumerate() {
            if support(k, &h.normal)? >= h.offset {
                return Ok(SafetyVerdict::Unsafe { step: k, half_space: idx });
            }
        }
    }
    Ok(SafetyVerdict::Safe)
}

pub fn safety_check(result: &ReachResult, unsafe_set: &[HalfSpace]) -> Result<SafetyVerdict> {
    first_violation(result.stars.len(), unsafe_set, |k, dir| result.stars[k].support(dir))
}
