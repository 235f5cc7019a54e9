//! On-disk formats: CSV tables, series with JSON sidecars, model and belief
//! JSON.

use std::fs;
use std::path::{Path, PathBuf};

use multirate_core::blm::{BeliefState, PriorSpec, SpectrumSummary};
use multirate_core::linalg::Matrix;
use multirate_core::process::ar2_from_omega;
use multirate_core::{LogSpectrum, SampledSeries, SpectralModel, Spectrum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Floats are written with 17 significant digits; missing values as `NA`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NA".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), fmt_f64)
}

/// Comma-separated table with LF line endings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_text(path, &self.render())
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Numerical(format!("cannot serialise {}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// SARMA model: `{"ar","ma","sar","sma","s","sigma2"}`. An AR(2) with a
/// spectral peak can be given instead of `ar` through `peak`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default)]
    pub ar: Vec<f64>,
    #[serde(default)]
    pub ma: Vec<f64>,
    #[serde(default)]
    pub sar: Vec<f64>,
    #[serde(default)]
    pub sma: Vec<f64>,
    #[serde(default = "one")]
    pub s: usize,
    pub sigma2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak: Option<PeakSpec>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakSpec {
    pub omega0: f64,
    pub modulus: f64,
}

impl ModelSpec {
    pub fn build(&self) -> CliResult<SpectralModel> {
        let ar = match self.peak {
            Some(p) => {
                if !self.ar.is_empty() {
                    return Err(CliError::input("model: give either `ar` or `peak`, not both"));
                }
                let (a, b) = ar2_from_omega(p.omega0, p.modulus)?;
                vec![a, b]
            }
            None => self.ar.clone(),
        };
        Ok(SpectralModel::new(
            ar,
            self.ma.clone(),
            self.sar.clone(),
            self.sma.clone(),
            self.s,
            self.sigma2,
        )?)
    }
}

/// A spectrum given either as a SARMA model or as log-spectrum cosine
/// coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logspec: Option<Vec<f64>>,
}

pub enum SpectrumSource {
    Model(SpectralModel),
    Log(LogSpectrum),
}

impl Spectrum for SpectrumSource {
    fn density(&self, omega: f64) -> f64 {
        match self {
            Self::Model(m) => m.density(omega),
            Self::Log(l) => l.density(omega),
        }
    }

    fn log_density(&self, omega: f64) -> f64 {
        match self {
            Self::Model(m) => m.log_density(omega),
            Self::Log(l) => l.log_density(omega),
        }
    }
}

impl SpectrumSpec {
    pub fn white_noise(sigma2: f64) -> Self {
        Self {
            model: Some(ModelSpec {
                ar: Vec::new(),
                ma: Vec::new(),
                sar: Vec::new(),
                sma: Vec::new(),
                s: 1,
                sigma2,
                peak: None,
            }),
            logspec: None,
        }
    }

    pub fn build(&self) -> CliResult<SpectrumSource> {
        match (&self.model, &self.logspec) {
            (Some(m), None) => Ok(SpectrumSource::Model(m.build()?)),
            (None, Some(c)) => Ok(SpectrumSource::Log(LogSpectrum::new(c.clone())?)),
            _ => Err(CliError::input("exactly one of `model` or `logspec` is required")),
        }
    }
}

/// `{"stride","offset","base_step"}` next to a series CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub stride: usize,
    pub offset: usize,
    pub base_step: f64,
}

/// Sidecar path for a series CSV: same stem, `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_series(csv: &Path, series: &SampledSeries) -> CliResult<()> {
    let mut t = Csv::new(["index", "value"]);
    for (i, v) in series.observations() {
        t.push(vec![i.to_string(), fmt_f64(v)]);
    }
    t.write(csv)?;
    write_json(
        &sidecar_path(csv),
        &Sidecar {
            stride: series.stride(),
            offset: series.offset(),
            base_step: series.base_step(),
        },
    )
}

/// Reads `index,value` rows and the sidecar. Errors name the line number.
pub fn read_series(csv: &Path, sidecar: Option<&Path>) -> CliResult<SampledSeries> {
    let side_path = sidecar.map_or_else(|| sidecar_path(csv), Path::to_path_buf);
    let side: Sidecar = read_json(&side_path)?;
    let text = fs::read_to_string(csv)
        .map_err(|e| CliError::input(format!("{}: {e}", csv.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "index,value" => {}
        _ => {
            return Err(CliError::input(format!(
                "{}: expected header `index,value`",
                csv.display()
            )))
        }
    }
    let mut values = Vec::new();
    for (n, line) in lines {
        let row = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |why: &str| CliError::input(format!("{}: row {row}: {why}", csv.display()));
        let mut fields = line.split(',');
        let (Some(i), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad("expected two fields"));
        };
        let i: usize = i.trim().parse().map_err(|_| bad("index is not a non-negative integer"))?;
        let v: f64 = v.trim().parse().map_err(|_| bad("value is not a number"))?;
        if !v.is_finite() {
            return Err(bad("value is not finite"));
        }
        let expected = side.offset + values.len() * side.stride;
        if i != expected {
            return Err(bad(&format!("index {i} does not match stride/offset (expected {expected})")));
        }
        values.push(v);
    }
    SampledSeries::new(values, side.stride, side.offset, side.base_step)
        .map_err(|e| CliError::input(format!("{}: {e}", side_path.display())))
}

/// `{"mean":[...], "variance":[[...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefJson {
    pub mean: Vec<f64>,
    pub variance: Vec<Vec<f64>>,
}

impl From<&BeliefState> for BeliefJson {
    fn from(s: &BeliefState) -> Self {
        Self {
            mean: s.mean().to_vec(),
            variance: s.variance().to_rows(),
        }
    }
}

impl BeliefJson {
    pub fn build(&self) -> CliResult<BeliefState> {
        let var = Matrix::from_rows(&self.variance).map_err(|e| CliError::input(e.to_string()))?;
        BeliefState::new(self.mean.clone(), var).map_err(|e| CliError::input(e.to_string()))
    }
}

pub fn read_belief(path: &Path) -> CliResult<BeliefState> {
    read_json::<BeliefJson>(path)?
        .build()
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Prior settings; omitted fields take the library defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PriorJson {
    pub basis_size: usize,
    pub intercept_mean: f64,
    pub scale: f64,
    pub smoothness: f64,
    pub cutoff: f64,
}

impl Default for PriorJson {
    fn default() -> Self {
        let p = PriorSpec::default();
        Self {
            basis_size: p.basis_size,
            intercept_mean: p.intercept_mean,
            scale: p.scale,
            smoothness: p.smoothness,
            cutoff: p.cutoff,
        }
    }
}

impl PriorJson {
    pub fn build(&self) -> CliResult<PriorSpec> {
        let p = PriorSpec {
            basis_size: self.basis_size,
            intercept_mean: self.intercept_mean,
            scale: self.scale,
            smoothness: self.smoothness,
            cutoff: self.cutoff,
        };
        p.validate().map_err(|e| CliError::input(format!("prior: {e}")))?;
        Ok(p)
    }
}

/// `omega,mean,lo50,hi50,lo90,hi90`.
pub fn summary_csv(summary: &SpectrumSummary) -> CliResult<Csv> {
    let b50 = summary
        .band(0.5)
        .ok_or_else(|| CliError::Numerical("summary lacks the 50% band".into()))?;
    let b90 = summary
        .band(0.9)
        .ok_or_else(|| CliError::Numerical("summary lacks the 90% band".into()))?;
    let mut t = Csv::new(["omega", "mean", "lo50", "hi50", "lo90", "hi90"]);
    for k in 0..summary.omegas.len() {
        t.push(vec![
            fmt_f64(summary.omegas[k]),
            fmt_f64(summary.mean[k]),
            fmt_f64(b50.lower[k]),
            fmt_f64(b50.upper[k]),
            fmt_f64(b90.lower[k]),
            fmt_f64(b90.upper[k]),
        ]);
    }
    Ok(t)
}
