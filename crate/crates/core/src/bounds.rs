//! Closed-form bloating factors for linear systems with interval uncertainty.
//!
//! Each bound over-approximates
//! `φ_(A,Λ)(t) = sup_{E∈Λ} ||e^{(A+E)t} − e^{At}|| / ||e^{At}||`
//! from `||A||₂`, spectral data of `A`, and one interval norm of `Λ`:
//!
//! * [`BoundMethod::Kagstrom1`]: `p(||A||t) (exp(p(||A||t) ||Λ|| t) − 1)`, with
//!   `p` the first `n` terms of the exponential series,
//! * [`BoundMethod::Kagstrom2`]: `K(S) e^{εt} (e^{K(S) ||Λ|| t} − 1)` for
//!   diagonalizable `A = S J S⁻¹`, `ε` the spectral radius,
//! * [`BoundMethod::Loan`]: `t ||Λ|| e^{(||A||₂ − α(A) + ||Λ||) t}`.
//!
//! `||Λ||` is either the interval 2-norm or the (cheaper, larger) interval
//! Frobenius norm; see [`NormKind`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::IntervalMatrix;
use crate::linalg::{self, Matrix, SpectralData};
use crate::star::{Hyperbox, Star};

/// Default ceiling on the eigenvector condition number accepted by Kagstrom2.
pub const DEFAULT_COND_MAX: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMethod {
    Kagstrom1,
    Kagstrom2,
    Loan,
}

impl BoundMethod {
    pub const ALL: [BoundMethod; 3] = [BoundMethod::Kagstrom1, BoundMethod::Kagstrom2, BoundMethod::Loan];

    pub fn name(&self) -> &'static str {
        match self {
            BoundMethod::Kagstrom1 => "kagstrom1",
            BoundMethod::Kagstrom2 => "kagstrom2",
            BoundMethod::Loan => "loan",
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kagstrom1" => Ok(BoundMethod::Kagstrom1),
            "kagstrom2" => Ok(BoundMethod::Kagstrom2),
            "loan" => Ok(BoundMethod::Loan),
            other => Err(Error::InvalidArgument(format!("unknown bound method `{other}`"))),
        }
    }
}

/// Which interval-matrix norm feeds the bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Two,
    Frobenius,
}

impl NormKind {
    pub fn of(&self, lambda: &IntervalMatrix) -> Result<f64> {
        match self {
            NormKind::Two => lambda.two_norm_sup(),
            NormKind::Frobenius => Ok(lambda.frobenius_sup()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NormKind::Two => "two",
            NormKind::Frobenius => "frobenius",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "two" | "2" => Ok(NormKind::Two),
            "frobenius" | "f" => Ok(NormKind::Frobenius),
            other => Err(Error::InvalidArgument(format!("unknown norm `{other}`"))),
        }
    }
}

/// `Σ_{k=0}^{terms-1} x^k / k!`.
pub fn partial_exp_sum(terms: usize, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 0..terms {
        if k > 0 {
            term *= x / k as f64;
        }
        sum += term;
    }
    sum
}

fn kagstrom1_from(n: usize, two_norm_a: f64, lambda_norm: f64, t: f64) -> f64 {
    let p = partial_exp_sum(n.max(1), two_norm_a * t);
    p * (p * lambda_norm * t).exp_m1()
}

fn kagstrom2_from(cond: f64, eps: f64, lambda_norm: f64, t: f64) -> f64 {
    cond * (eps * t).exp() * (cond * lambda_norm * t).exp_m1()
}

fn loan_from(two_norm_a: f64, alpha_a: f64, lambda_norm: f64, t: f64) -> f64 {
    if lambda_norm == 0.0 || t == 0.0 {
        return 0.0;
    }
    t * lambda_norm * ((two_norm_a - alpha_a + lambda_norm) * t).exp()
}

pub fn kagstrom1(a: &Matrix, lambda_norm: f64, t: f64) -> f64 {
    kagstrom1_from(a.nrows(), linalg::spectral_norm(a), lambda_norm, t)
}

pub fn kagstrom2(a: &Matrix, lambda_norm: f64, t: f64) -> Result<f64> {
    BloatBound::new(a, BoundMethod::Kagstrom2).eval(lambda_norm, t)
}

pub fn loan(a: &Matrix, lambda_norm: f64, t: f64) -> f64 {
    loan_from(linalg::spectral_norm(a), linalg::spectral_abscissa(a), lambda_norm, t)
}

/// A bound with the spectral quantities of `A` computed once.
#[derive(Clone, Debug)]
pub struct BloatBound {
    method: BoundMethod,
    n: usize,
    spectral: SpectralData,
    cond_max: f64,
}

impl BloatBound {
    pub fn new(a: &Matrix, method: BoundMethod) -> Self {
        BloatBound {
            method,
            n: a.nrows(),
            spectral: SpectralData::new(a),
            cond_max: DEFAULT_COND_MAX,
        }
    }

    pub fn with_cond_max(mut self, cond_max: f64) -> Self {
        self.cond_max = cond_max;
        self
    }

    pub fn method(&self) -> BoundMethod {
        self.method
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    /// Checks that the bound is defined for this `A` (only Kagstrom2 can fail).
    pub fn check(&self) -> Result<()> {
        if self.method == BoundMethod::Kagstrom2 {
            self.spectral.diagonalizable_cond(self.cond_max)?;
        }
        Ok(())
    }

    pub fn eval(&self, lambda_norm: f64, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 || lambda_norm.is_nan() || lambda_norm < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "bounds need t >= 0 and ||Λ|| >= 0 (got t = {t}, ||Λ|| = {lambda_norm})"
            )));
        }
        let sd = &self.spectral;
        Ok(match self.method {
            BoundMethod::Kagstrom1 => kagstrom1_from(self.n, sd.two_norm_a, lambda_norm, t),
            BoundMethod::Kagstrom2 => {
                let cond = sd.diagonalizable_cond(self.cond_max)?;
                kagstrom2_from(cond, sd.eps_jordan, lambda_norm, t)
            }
            BoundMethod::Loan => loan_from(sd.two_norm_a, sd.alpha_a, lambda_norm, t),
        })
    }
}

/// Bloating factor `φ(t)` sampled on a time grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BloatSeries {
    pub method: BoundMethod,
    pub norm_kind: NormKind,
    pub lambda_norm: f64,
    pub times: Vec<f64>,
    pub phi: Vec<f64>,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidArgument("times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be ascending".into()));
    }
    Ok(())
}

fn check_uncertainty_shape(a: &Matrix, lambda: &IntervalMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::mismatch("bounds", "square A", format!("{:?}", a.shape())));
    }
    if lambda.shape() != a.shape() {
        return Err(Error::mismatch(
            "bounds",
            format!("{:?}", a.shape()),
            format!("{:?}", lambda.shape()),
        ));
    }
    Ok(())
}

pub fn bloat_series(
    a: &Matrix,
    lambda: &IntervalMatrix,
    times: &[f64],
    method: BoundMethod,
    norm_kind: NormKind,
) -> Result<BloatSeries> {
    check_uncertainty_shape(a, lambda)?;
    check_times(times)?;
    let lambda_norm = norm_kind.of(lambda)?;
    let bound = BloatBound::new(a, method);
    bound.check()?;
    let phi = times
        .iter()
        .map(|&t| bound.eval(lambda_norm, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(BloatSeries {
        method,
        norm_kind,
        lambda_norm,
        times: times.to_vec(),
        phi,
    })
}

/// Nominal reach set at time `t` and the radius of the ball it must be bloated by.
#[derive(Clone, Debug)]
pub struct SymbolicStep {
    pub t: f64,
    pub phi: f64,
    /// `e^{At} Θ`.
    pub nominal: Star,
    /// `φ(t) ||e^{At}||₂ max_{x∈Θ} ||x||₂`.
    pub radius: f64,
}

impl SymbolicStep {
    /// Bounding box of the nominal set inflated by `radius` on every axis.
    pub fn bloated_box(&self) -> Hyperbox {
        self.nominal.bounding_box().inflate(self.radius)
    }

    /// Support of `nominal ⊕ B_radius(0)` in direction `dir`.
    pub fn support(&self, dir: &linalg::Vector) -> Result<f64> {
        Ok(self.nominal.support(dir)? + self.radius * dir.norm())
    }
}

/// Nominal flowpipe `e^{At} Θ` bloated by the absolute radius derived from `φ(t)`.
pub fn symbolic_reach(
    a: &Matrix,
    lambda: &IntervalMatrix,
    theta: &Hyperbox,
    times: &[f64],
    method: BoundMethod,
    norm_kind: NormKind,
) -> Result<Vec<SymbolicStep>> {
    if theta.dim() != a.nrows() {
        return Err(Error::mismatch("symbolic_reach", a.nrows(), theta.dim()));
    }
    let series = bloat_series(a, lambda, times, method, norm_kind)?;
    let theta_star = theta.to_star();
    let theta_norm = theta.max_norm();
    series
        .times
        .iter()
        .zip(&series.phi)
        .map(|(&t, &phi)| {
            let flow = linalg::expm(a, t);
            let radius = if phi == 0.0 {
                0.0
            } else {
                phi * linalg::spectral_norm(&flow) * theta_norm
            };
            Ok(SymbolicStep {
                t,
                phi,
                nominal: theta_star.linear_map(&flow)?,
                radius,
            })
        })
        .collect()
}
