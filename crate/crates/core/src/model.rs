//! TOML model files.
//!
//! ```toml
//! name = "girard-i"
//! dimension = 2
//! horizon = 2050
//!
//! [dynamics]
//! matrix = [-1.0, -4.0, 4.0, -1.0]   # row-major
//! continuous = true
//! step = 0.01
//!
//! [[uncertainty]]                     # 0-indexed; `relative` or `interval`
//! row = 0
//! col = 0
//! relative = 0.02
//!
//! [initial]
//! box = [[0.9, 1.1], [-0.1, 0.1]]
//!
//! [[unsafe]]                          # normal·x >= offset is unsafe
//! normal = [1.0, 0.0]
//! offset = 2.0
//!
//! [reduction]                         # optional
//! method = "interval"                 # none | interval | zonotope
//! period = 500
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::{Matrix, Vector};
use crate::reach::{
    CellUncertainty, HalfSpace, ModelSpec, ReductionMethod, ReductionPolicy, UncertainCell, DEFAULT_REDUCTION_PERIOD,
    DEFAULT_STEP,
};
use crate::star::Hyperbox;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub dimension: usize,
    pub horizon: usize,
    pub dynamics: Dynamics,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub uncertainty: Vec<UncertaintyEntry>,
    pub initial: Initial,
    #[serde(default, rename = "unsafe", skip_serializing_if = "Vec::is_empty")]
    pub unsafe_set: Vec<UnsafeEntry>,
    #[serde(default)]
    pub reduction: Reduction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dynamics {
    pub matrix: Vec<f64>,
    #[serde(default = "yes")]
    pub continuous: bool,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn yes() -> bool {
    true
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintyEntry {
    pub row: usize,
    pub col: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnsafeEntry {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reduction {
    pub method: ReductionMethod,
    #[serde(default = "default_period")]
    pub period: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
}

fn default_period() -> usize {
    DEFAULT_REDUCTION_PERIOD
}

impl Default for Reduction {
    fn default() -> Self {
        Reduction {
            method: ReductionMethod::None,
            period: DEFAULT_REDUCTION_PERIOD,
            target: None,
        }
    }
}

fn finite(what: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{what} contains NaN or infinite values")))
    }
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::InvalidModel(msg) => Error::InvalidModel(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidModel(e.to_string()))
    }

    pub fn to_spec(&self) -> Result<ModelSpec> {
        let n = self.dimension;
        if self.dynamics.matrix.len() != n * n {
            return Err(Error::InvalidModel(format!(
                "dynamics matrix has {} entries, expected {n}x{n} = {}",
                self.dynamics.matrix.len(),
                n * n
            )));
        }
        finite("dynamics matrix", &self.dynamics.matrix)?;
        finite("dynamics step", &[self.dynamics.step])?;
        let a = Matrix::from_row_slice(n, n, &self.dynamics.matrix);

        let uncertainty = self
            .uncertainty
            .iter()
            .map(|u| {
                let spec = match (u.relative, u.interval) {
                    (Some(r), None) => {
                        finite("relative uncertainty", &[r])?;
                        CellUncertainty::Relative(r)
                    }
                    (None, Some([lo, hi])) => {
                        finite("uncertainty interval", &[lo, hi])?;
                        CellUncertainty::Interval(Interval::new(lo, hi)?)
                    }
                    _ => {
                        return Err(Error::InvalidModel(format!(
                            "uncertainty at ({}, {}) needs exactly one of `relative` or `interval`",
                            u.row, u.col
                        )))
                    }
                };
                Ok(UncertainCell { row: u.row, col: u.col, spec })
            })
            .collect::<Result<Vec<_>>>()?;

        for b in &self.initial.bounds {
            finite("initial box", b)?;
        }
        let initial = Hyperbox::from_bounds(&self.initial.bounds)?;

        let unsafe_set = self
            .unsafe_set
            .iter()
            .map(|u| {
                finite("unsafe normal", &u.normal)?;
                finite("unsafe offset", &[u.offset])?;
                HalfSpace::new(Vector::from_vec(u.normal.clone()), u.offset)
            })
            .collect::<Result<Vec<_>>>()?;

        let spec = ModelSpec {
            name: self.name.clone(),
            a,
            uncertainty,
            continuous: self.dynamics.continuous,
            step: self.dynamics.step,
            horizon: self.horizon,
            initial,
            unsafe_set,
            reduction: ReductionPolicy {
                method: self.reduction.method,
                period: self.reduction.period,
                target: self.reduction.target,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_spec(spec: &ModelSpec) -> Self {
        let n = spec.dim();
        ModelFile {
            name: spec.name.clone(),
            dimension: n,
            horizon: spec.horizon,
            dynamics: Dynamics {
                matrix: (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|ij| spec.a[ij]).collect(),
                continuous: spec.continuous,
                step: spec.step,
            },
            uncertainty: spec
                .uncertainty
                .iter()
                .map(|c| {
                    let (relative, interval) = match c.spec {
                        CellUncertainty::Relative(r) => (Some(r), None),
                        CellUncertainty::Interval(iv) => (None, Some([iv.lo(), iv.hi()])),
                    };
                    UncertaintyEntry { row: c.row, col: c.col, relative, interval }
                })
                .collect(),
            initial: Initial {
                bounds: spec.initial.intervals().iter().map(|iv| [iv.lo(), iv.hi()]).collect(),
            },
            unsafe_set: spec
                .unsafe_set
                .iter()
                .map(|h| UnsafeEntry {
                    normal: h.normal.iter().copied().collect(),
                    offset: h.offset,
                })
                .collect(),
            reduction: Reduction {
                method: spec.reduction.method,
                period: spec.reduction.period,
                target: spec.reduction.target,
            },
        }
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelSpec> {
    ModelFile::load(path)?.to_spec()
}
