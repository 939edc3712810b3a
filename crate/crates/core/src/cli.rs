//! Command implementations behind the `ureach` binary.
//!
//! Every command reads a model file, runs one pipeline and writes CSV or JSON
//! to a file or to standard output. They return a summary so callers (the
//! binary, tests) can report verdicts without reparsing the output.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;

use crate::bounds::{self, BoundMethod, NormKind};
use crate::error::{Error, Result};
use crate::interval::IntervalMatrix;
use crate::model::load_model;
use crate::reach::{self, SafetyVerdict};
use crate::robustness::{self, ThresholdConfig, ThresholdReport};
use crate::sensitivity::{self, OrdMatrix};
use crate::star::Hyperbox;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReachMethod {
    Numeric,
    Bound(BoundMethod),
}

impl FromStr for ReachMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "numeric" {
            Ok(ReachMethod::Numeric)
        } else {
            s.parse().map(ReachMethod::Bound)
        }
    }
}

impl fmt::Display for ReachMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReachMethod::Numeric => f.write_str("numeric"),
            ReachMethod::Bound(b) => write!(f, "{b}"),
        }
    }
}

/// Closed time window for the rows written by `reach`; open ends are unbounded.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TimeWindow {
    pub from: Option<f64>,
    pub to: Option<f64>,
}

impl TimeWindow {
    pub fn contains(&self, t: f64) -> bool {
        self.from.is_none_or(|a| t >= a) && self.to.is_none_or(|b| t <= b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReachSummary {
    pub model: String,
    pub method: ReachMethod,
    pub rows: usize,
    pub verdict: SafetyVerdict,
    pub elapsed: Duration,
}

impl fmt::Display for ReachSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} reach, {} rows, {} ({:.3} s)",
            self.model,
            self.method,
            self.rows,
            self.verdict,
            self.elapsed.as_secs_f64()
        )
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Shortest round-trip decimal, switching to exponent form for tiny or huge values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn box_fields(b: &Hyperbox) -> impl Iterator<Item = String> + '_ {
    b.intervals().iter().flat_map(|iv| [num(iv.lo()), num(iv.hi())])
}

fn bound_header(n: usize) -> impl Iterator<Item = String> {
    (1..=n).flat_map(|i| [format!("lo_{i}"), format!("hi_{i}")])
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Numeric: `step, lo_1, hi_1, …, lo_n, hi_n, gen_count` per step.
/// Bound methods: `t, phi, radius, lo_1, hi_1, …` of the bloated box.
pub fn cmd_reach(
    model_path: &Path,
    method: ReachMethod,
    norm: NormKind,
    out: Option<&Path>,
    window: TimeWindow,
) -> Result<ReachSummary> {
    let model = load_model(model_path)?;
    let n = model.dim();
    let times = model.time_grid();
    let mut wtr = csv::Writer::from_writer(open_out(out)?);
    let mut rows = 0;
    let (verdict, elapsed) = match method {
        ReachMethod::Numeric => {
            let result = model.numeric_reach()?;
            let header = std::iter::once("step".to_string())
                .chain(bound_header(n))
                .chain(std::iter::once("gen_count".to_string()));
            wtr.write_record(header).map_err(csv_err)?;
            for (k, star) in result.stars.iter().enumerate() {
                if !window.contains(times[k]) {
                    continue;
                }
                let b = star.bounding_box();
                let record = std::iter::once(k.to_string())
                    .chain(box_fields(&b))
                    .chain(std::iter::once(star.num_generators().to_string()));
                wtr.write_record(record).map_err(csv_err)?;
                rows += 1;
            }
            (reach::safety_check(&result, &model.unsafe_set)?, result.elapsed)
        }
        ReachMethod::Bound(bound) => {
            if !model.continuous {
                return Err(Error::InvalidArgument(format!(
                    "{bound} bound needs a continuous-time model"
                )));
            }
            let start = std::time::Instant::now();
            let lambda = model.uncertainty_matrix()?;
            let steps = bounds::symbolic_reach(&model.a, &lambda, &model.initial, &times, bound, norm)
                .map_err(|e| Error::InvalidArgument(format!("{bound} ({norm} norm): {e}")))?;
            let elapsed = start.elapsed();
            let header = ["t", "phi", "radius"].into_iter().map(String::from).chain(bound_header(n));
            wtr.write_record(header).map_err(csv_err)?;
            for s in steps.iter().filter(|s| window.contains(s.t)) {
                let b = s.bloated_box();
                let record = [num(s.t), num(s.phi), num(s.radius)]
                    .into_iter()
                    .chain(box_fields(&b));
                wtr.write_record(record).map_err(csv_err)?;
                rows += 1;
            }
            let verdict = reach::first_violation(steps.len(), &model.unsafe_set, |k, d| steps[k].support(d))?;
            (verdict, elapsed)
        }
    };
    wtr.flush()?;
    Ok(ReachSummary {
        model: model.name,
        method,
        rows,
        verdict,
        elapsed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderReport {
    pub model: String,
    /// `"A"` or `"exp(A h)"`.
    pub basis: String,
    #[serde(flatten)]
    pub ordering: OrdMatrix,
    pub top5: Vec<(usize, usize)>,
    pub bottom5: Vec<(usize, usize)>,
}

pub fn cmd_order(model_path: &Path, out: Option<&Path>, discrete: bool) -> Result<OrderReport> {
    let model = load_model(model_path)?;
    let (basis, ordering) = if discrete && model.continuous {
        ("exp(A h)", sensitivity::order_cells_discrete(&model.a, model.step)?)
    } else {
        ("A", sensitivity::order_cells(&model.a)?)
    };
    let report = OrderReport {
        model: model.name,
        basis: basis.into(),
        top5: ordering.top(5).to_vec(),
        bottom5: ordering.bottom(5).to_vec(),
        ordering,
    };
    write_json(&report, out)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustReport {
    pub model: String,
    pub step: f64,
    pub cap: usize,
    pub engine: robustness::SafetyEngine,
    #[serde(flatten)]
    pub report: ThresholdReport,
}

/// `cells` defaults to the model's uncertain cells.
pub fn cmd_robust(
    model_path: &Path,
    cells: Option<&[(usize, usize)]>,
    config: &ThresholdConfig,
    out: Option<&Path>,
) -> Result<RobustReport> {
    let model = load_model(model_path)?;
    let model_cells = model.cells();
    let cells = cells.unwrap_or(&model_cells);
    let report = robustness::robustness_threshold(&model, cells, config)?;
    let full = RobustReport {
        model: model.name,
        step: config.step,
        cap: config.cap,
        engine: config.engine,
        report,
    };
    write_json(&full, out)?;
    Ok(full)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Norms {
    pub frobenius_sup: f64,
    /// `None` above the 2-norm enumeration limit.
    pub two_norm_sup: Option<f64>,
}

impl Norms {
    fn of(l: &IntervalMatrix) -> Result<Self> {
        let two_norm_sup = match l.two_norm_sup() {
            Ok(v) => Some(v),
            Err(Error::DimensionTooLarge { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Norms {
            frobenius_sup: l.frobenius_sup(),
            two_norm_sup,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormsReport {
    pub model: String,
    pub uncertainty: Norms,
    /// Norms of the one-step deviation `Λ̄`, for continuous models.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrete_uncertainty: Option<Norms>,
}

pub fn cmd_norms(model_path: &Path, out: Option<&Path>) -> Result<NormsReport> {
    let model = load_model(model_path)?;
    let lambda = model.uncertainty_matrix()?;
    let discrete_uncertainty = if model.continuous {
        Some(Norms::of(&model.discrete_system_with(&lambda)?.lambda)?)
    } else {
        None
    };
    let report = NormsReport {
        model: model.name,
        uncertainty: Norms::of(&lambda)?,
        discrete_uncertainty,
    };
    write_json(&report, out)?;
    Ok(report)
}

/// `"i,j"` → `(i, j)`.
pub fn parse_cell(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidArgument(format!("cell must look like `row,col`, got `{s}`"));
    let (i, j) = s.split_once(',').ok_or_else(bad)?;
    Ok((i.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?))
}
