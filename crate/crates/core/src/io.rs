//! Model, distribution and report files.
//!
//! All files are JSON. Floats are written with 17 significant digits
//! (`1.2345678901234567e-1`), which round-trips every `f64` exactly.
//! Subsets appear both as sorted 1-based index lists and as masks `h(u)`.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::blocks::{BlockPartition, GroupedReport};
use crate::error::{ModelValidationError, ValidationKind};
use crate::gaussian::GaussianInput;
use crate::indices::SensitivityReport;
use crate::model::LinearGaussianModel;
use crate::permutation::CvSummary;
use crate::subset::{elements, SubsetId, MAX_DIM};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub beta: Vec<f64>,
    pub gamma: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
}

/// Distribution of the inputs of a black-box model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
}

fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, ModelValidationError> {
    let n = rows.len();
    if let Some(r) = rows.iter().position(|r| r.len() != n) {
        return Err(ModelValidationError::new(
            ValidationKind::DimensionMismatch,
            format!("{what} has {n} rows but row {} has {} entries", r + 1, rows[r].len()),
        ));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl ModelFile {
    pub fn from_model(model: &LinearGaussianModel) -> Self {
        let mu = model.mu();
        Self {
            beta: model.beta().iter().copied().collect(),
            gamma: matrix_to_rows(model.gamma()),
            mu: mu.iter().any(|&m| m != 0.0).then(|| mu.iter().copied().collect()),
        }
    }

    pub fn to_model(&self) -> Result<LinearGaussianModel, ModelValidationError> {
        let gamma = matrix_from_rows(&self.gamma, "gamma")?;
        LinearGaussianModel::new(
            DVector::from_vec(self.beta.clone()),
            gamma,
            self.mu.clone().map(DVector::from_vec),
        )
    }
}

impl DistFile {
    pub fn to_input(&self) -> Result<GaussianInput, ModelValidationError> {
        let gamma = matrix_from_rows(&self.gamma, "gamma")?;
        let mu = match &self.mu {
            Some(m) => DVector::from_vec(m.clone()),
            None => DVector::zeros(gamma.nrows()),
        };
        GaussianInput::new(mu, gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetValue {
    /// Sorted 1-based input labels.
    pub subset: Vec<usize>,
    pub mask: u64,
    pub value: f64,
}

impl SubsetValue {
    fn new(mask: u64, value: f64) -> Self {
        Self {
            subset: elements(mask),
            mask,
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub algorithm: String,
    pub p: usize,
    /// Independent groups as 1-based labels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl ReportMetadata {
    pub fn new(algorithm: &str, p: usize) -> Self {
        Self {
            algorithm: algorithm.to_string(),
            p,
            partition: None,
            eval_count: None,
            seed: None,
            config: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub var_y: f64,
    pub shapley: Vec<f64>,
    pub sobol: Vec<SubsetValue>,
    pub closed_sobol: Vec<SubsetValue>,
    pub metadata: ReportMetadata,
    /// Estimated variance of each Shapley component (stochastic runs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shapley_variance: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cv: Option<CvSummary>,
}

pub fn partition_labels(partition: &BlockPartition) -> Vec<Vec<usize>> {
    partition
        .groups()
        .iter()
        .map(|g| g.iter().map(|i| i + 1).collect())
        .collect()
}

impl ReportFile {
    /// Full-lattice report: one row per non-empty subset.
    pub fn from_report(report: &SensitivityReport, algorithm: &str) -> Self {
        let rows = |v: &[f64]| -> Vec<SubsetValue> {
            (1..v.len() as u64).map(|m| SubsetValue::new(m, v[m as usize])).collect()
        };
        let mut metadata = ReportMetadata::new(algorithm, report.p());
        metadata.eval_count = Some(report.eval_count as u64);
        Self {
            var_y: report.var_y,
            shapley: report.shapley.clone(),
            sobol: rows(&report.sobol),
            closed_sobol: rows(&report.closed_sobol),
            metadata,
            shapley_variance: None,
            cv: None,
        }
    }

    /// Grouped report. Only subsets inside a single group are listed, in
    /// increasing mask order; every other Sobol index is zero.
    pub fn from_grouped(report: &GroupedReport, var_y: f64, algorithm: &str) -> Self {
        let part = &report.partition;
        let mut masks: Vec<u64> = (0..part.k())
            .flat_map(|j| (1..1u64 << part.groups()[j].len()).map(move |l| part.to_global(j, l)))
            .collect();
        masks.sort_unstable();
        let sobol = masks
            .iter()
            .map(|&m| SubsetValue::new(m, report.sobol(SubsetId::new(m, part.p()).unwrap())))
            .collect();
        let closed_sobol = masks
            .iter()
            .map(|&m| SubsetValue::new(m, report.closed_sobol(SubsetId::new(m, part.p()).unwrap())))
            .collect();
        let mut metadata = ReportMetadata::new(algorithm, part.p());
        metadata.partition = Some(partition_labels(part));
        metadata.eval_count = Some(report.eval_count as u64);
        Self {
            var_y,
            shapley: report.shapley.clone(),
            sobol,
            closed_sobol,
            metadata,
            shapley_variance: None,
            cv: None,
        }
    }

    /// Shapley-only report, as produced by the estimators.
    pub fn shapley_only(var_y: f64, shapley: Vec<f64>, metadata: ReportMetadata) -> Self {
        Self {
            var_y,
            shapley,
            sobol: Vec::new(),
            closed_sobol: Vec::new(),
            metadata,
            shapley_variance: None,
            cv: None,
        }
    }

    /// Structural checks: lengths and subset/mask consistency of every row.
    pub fn validate(&self) -> Result<()> {
        let p = self.metadata.p;
        if p == 0 || p > MAX_DIM {
            return Err(Error::Format(format!("p = {p} is out of range")));
        }
        if self.shapley.len() != p {
            return Err(Error::Format(format!(
                "shapley has {} entries for p = {p}",
                self.shapley.len()
            )));
        }
        for row in self.sobol.iter().chain(&self.closed_sobol) {
            let expected = SubsetId::encode(&row.subset, p)
                .map_err(|e| Error::Format(format!("row {:?}: {e}", row.subset)))?;
            if expected.value() != row.mask {
                return Err(Error::Format(format!(
                    "mask {} does not match subset {:?}",
                    row.mask, row.subset
                )));
            }
            if row.subset.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Format(format!("subset {:?} is not sorted", row.subset)));
            }
        }
        Ok(())
    }
}

/// Pretty JSON with every float written as `{:.16e}`.
struct SigDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SigDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Format(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn from_json_str<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
}

/// Writes `value` to `path`, or to stdout when `path` is `None`.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let text = to_json_string(value)?;
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    from_json_str(&text).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}
