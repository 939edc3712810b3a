//! Distribution of a perturbation budget over chosen cells and the search for
//! the largest budget under which the model stays safe.
//!
//! Budgets are relative: under [`BudgetScheme::Equal`] a budget `p` widens
//! every listed cell to `A[i,j] ± p·|A[i,j]|`. The other schemes move budget
//! between cells according to their sensitivity scores while keeping the
//! total `p·|cells|` fixed.
//!
//! # Proportional weighting
//!
//! The stated intent is that more sensitive cells receive a smaller share.
//! [`BudgetScheme::Proportional`] therefore weights a cell by
//! `1 + #{cells ranked strictly above it}` (inverse rank).
//! A literal reading of "proportional to the scores below it" gives the
//! opposite, `1 + #{cells ranked strictly below it}`; it is kept as
//! [`BudgetScheme::ProportionalLiteral`] for comparison.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bounds::{self, BoundMethod, NormKind};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalMatrix};
use crate::linalg::Matrix;
use crate::reach::{self, ModelSpec, SafetyVerdict};
use crate::sensitivity::{self, OrdMatrix};

pub const DEFAULT_CAP: usize = 200;
/// Score floor for the harmonic scheme, so zero-score cells get a finite weight.
pub const HARMONIC_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BudgetScheme {
    Proportional,
    ProportionalLiteral,
    Harmonic,
    Equal,
}

impl BudgetScheme {
    pub const ALL: [BudgetScheme; 4] = [
        BudgetScheme::Proportional,
        BudgetScheme::ProportionalLiteral,
        BudgetScheme::Harmonic,
        BudgetScheme::Equal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BudgetScheme::Proportional => "proportional",
            BudgetScheme::ProportionalLiteral => "proportional-literal",
            BudgetScheme::Harmonic => "harmonic",
            BudgetScheme::Equal => "equal",
        }
    }

    pub fn needs_ordering(&self) -> bool {
        !matches!(self, BudgetScheme::Equal)
    }
}

impl FromStr for BudgetScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BudgetScheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown budget scheme `{s}`")))
    }
}

impl fmt::Display for BudgetScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_cells(n: usize, cells: &[(usize, usize)]) -> Result<()> {
    if cells.is_empty() {
        return Err(Error::EmptyCells);
    }
    for &(row, col) in cells {
        if row >= n || col >= n {
            return Err(Error::CellOutOfRange { row, col, n });
        }
    }
    Ok(())
}

/// Normalized weights of `cells`; they sum to one.
pub fn weights(cells: &[(usize, usize)], ord: Option<&OrdMatrix>, scheme: BudgetScheme) -> Result<Vec<f64>> {
    if cells.is_empty() {
        return Err(Error::EmptyCells);
    }
    if scheme == BudgetScheme::Equal {
        return Ok(vec![1.0 / cells.len() as f64; cells.len()]);
    }
    let ord = ord.ok_or_else(|| Error::InvalidArgument(format!("scheme `{scheme}` needs a cell ordering")))?;
    let n = ord.scores.nrows();
    check_cells(n, cells)?;
    let scores: Vec<f64> = cells.iter().map(|&(i, j)| ord.score(i, j)).collect();
    let raw: Vec<f64> = match scheme {
        BudgetScheme::Harmonic => scores.iter().map(|s| 1.0 / s.max(HARMONIC_FLOOR)).collect(),
        BudgetScheme::Proportional => scores
            .iter()
            .map(|s| 1.0 + scores.iter().filter(|o| *o > s).count() as f64)
            .collect(),
        BudgetScheme::ProportionalLiteral => scores
            .iter()
            .map(|s| 1.0 + scores.iter().filter(|o| *o < s).count() as f64)
            .collect(),
        BudgetScheme::Equal => unreachable!(),
    };
    let total: f64 = raw.iter().sum();
    Ok(raw.iter().map(|w| w / total).collect())
}

/// Deviation `Λ` for budget `p`: cell `(i,j)` gets `±p·|cells|·w·|A[i,j]|`,
/// every other entry is zero. The perturbed dynamics are `A + Λ`.
pub fn distribute(
    a: &Matrix,
    cells: &[(usize, usize)],
    ord: Option<&OrdMatrix>,
    p: f64,
    scheme: BudgetScheme,
) -> Result<IntervalMatrix> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::InvalidArgument(format!("budget must be finite and >= 0, got {p}")));
    }
    check_cells(a.nrows(), cells)?;
    let w = weights(cells, ord, scheme)?;
    let scale = p * cells.len() as f64;
    let mut lambda = IntervalMatrix::zeros(a.nrows(), a.ncols());
    for (&(i, j), wk) in cells.iter().zip(w) {
        let r = scale * wk * a[(i, j)].abs();
        lambda.set(i, j, Interval::centered(0.0, r)?);
    }
    Ok(lambda)
}

/// Which pipeline decides safety for a candidate budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "engine", rename_all = "lowercase")]
pub enum SafetyEngine {
    /// Star-set recurrence on the discretized system.
    Numeric,
    /// Nominal flowpipe bloated by a closed-form bound (continuous models
    /// only). More conservative, so the threshold can only come out smaller.
    Symbolic { method: BoundMethod, norm: NormKind },
}

/// Safety of `model` with its uncertainty replaced by `lambda`.
pub fn check_safety(model: &ModelSpec, lambda: &IntervalMatrix, engine: SafetyEngine) -> Result<SafetyVerdict> {
    match engine {
        SafetyEngine::Numeric => {
            let r = model.numeric_reach_with(lambda)?;
            reach::safety_check(&r, &model.unsafe_set)
        }
        SafetyEngine::Symbolic { method, norm } => {
            if !model.continuous {
                return Err(Error::InvalidArgument(
                    "symbolic safety needs a continuous-time model".into(),
                ));
            }
            let steps = bounds::symbolic_reach(&model.a, lambda, &model.initial, &model.time_grid(), method, norm)?;
            reach::first_violation(steps.len(), &model.unsafe_set, |k, dir| steps[k].support(dir))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdConfig {
    pub scheme: BudgetScheme,
    /// Additive budget increment.
    pub step: f64,
    /// Maximum number of budgets tried, `p = 0` included.
    pub cap: usize,
    pub engine: SafetyEngine,
    /// Rank cells on `e^{Ah}` instead of `A` (continuous models).
    pub order_discrete: bool,
}

impl ThresholdConfig {
    pub fn new(scheme: BudgetScheme, step: f64) -> Self {
        ThresholdConfig {
            scheme,
            step,
            cap: DEFAULT_CAP,
            engine: SafetyEngine::Numeric,
            order_discrete: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdStatus {
    /// An unsafe budget was reached; the report holds the last safe one.
    Found,
    /// Unsafe without any perturbation.
    AlreadyUnsafe,
    /// Every budget up to the cap was safe.
    CapReached,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub budget: f64,
    pub norm: f64,
    pub safe: bool,
    pub verdict: SafetyVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub scheme: BudgetScheme,
    pub cells: Vec<(usize, usize)>,
    pub status: ThresholdStatus,
    pub final_budget: f64,
    /// Largest deviation found safe (`Λ_old`).
    pub safe_uncertainty: IntervalMatrix,
    /// Frobenius sup of `safe_uncertainty`.
    pub norm: f64,
    pub iterations: usize,
    pub trace: Vec<TraceEntry>,
}

fn ordering_for(model: &ModelSpec, config: &ThresholdConfig) -> Result<Option<OrdMatrix>> {
    if !config.scheme.needs_ordering() {
        return Ok(None);
    }
    let ord = if config.order_discrete && model.continuous {
        sensitivity::order_cells_discrete(&model.a, model.step)?
    } else {
        sensitivity::order_cells(&model.a)?
    };
    Ok(Some(ord))
}

/// Try budgets `0, step, 2·step, …` until the model becomes unsafe or `cap`
/// budgets have been tried.
pub fn robustness_threshold(
    model: &ModelSpec,
    cells: &[(usize, usize)],
    config: &ThresholdConfig,
) -> Result<ThresholdReport> {
    model.validate()?;
    if !config.step.is_finite() || config.step <= 0.0 {
        return Err(Error::InvalidArgument(format!("step must be positive, got {}", config.step)));
    }
    if config.cap == 0 {
        return Err(Error::InvalidArgument("cap must be at least 1".into()));
    }
    check_cells(model.dim(), cells)?;
    let ord = ordering_for(model, config)?;

    let mut trace = Vec::new();
    let mut last_safe: Option<(f64, IntervalMatrix)> = None;
    let mut status = ThresholdStatus::CapReached;
    for k in 0..config.cap {
        let p = k as f64 * config.step;
        let lambda = distribute(&model.a, cells, ord.as_ref(), p, config.scheme)?;
        let verdict = check_safety(model, &lambda, config.engine)?;
        trace.push(TraceEntry {
            budget: p,
            norm: lambda.frobenius_sup(),
            safe: verdict.is_safe(),
            verdict,
        });
        if !verdict.is_safe() {
            status = if k == 0 {
                ThresholdStatus::AlreadyUnsafe
            } else {
                ThresholdStatus::Found
            };
            break;
        }
        last_safe = Some((p, lambda));
    }

    let n = model.dim();
    let (final_budget, safe_uncertainty) = last_safe.unwrap_or((0.0, IntervalMatrix::zeros(n, n)));
    let norm = if status == ThresholdStatus::AlreadyUnsafe {
        0.0
    } else {
        safe_uncertainty.frobenius_sup()
    };
    Ok(ThresholdReport {
        scheme: config.scheme,
        cells: cells.to_vec(),
        status,
        final_budget,
        safe_uncertainty,
        norm,
        iterations: trace.len(),
        trace,
    })
}
