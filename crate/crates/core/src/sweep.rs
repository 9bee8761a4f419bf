//! Parameter sweeps over (T, λ) and their tabular serialization.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation;
use crate::measures;
use crate::profile::Profile;
use crate::states::OscillatorState;
use crate::susy::{DeformationParameter, LAMBDA_MIN};

/// Sentinel written in place of undefined or failed values.
pub const NA: &str = "NA";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureTag {
    /// Var X, Var P and their product.
    Moments,
    Nong,
    Fano,
    Wigner,
    Qcs,
    Qfi,
    Cfi,
}

impl MeasureTag {
    pub const ALL: [MeasureTag; 7] = [
        MeasureTag::Moments,
        MeasureTag::Nong,
        MeasureTag::Fano,
        MeasureTag::Wigner,
        MeasureTag::Qcs,
        MeasureTag::Qfi,
        MeasureTag::Cfi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureTag::Moments => "moments",
            MeasureTag::Nong => "nong",
            MeasureTag::Fano => "fano",
            MeasureTag::Wigner => "wigner",
            MeasureTag::Qcs => "qcs",
            MeasureTag::Qfi => "qfi",
            MeasureTag::Cfi => "cfi",
        }
    }
}

impl fmt::Display for MeasureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        MeasureTag::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let known: Vec<_> = MeasureTag::ALL.iter().map(|m| m.name()).collect();
            Error::Config(format!("unknown measure '{s}' (known: {})", known.join(",")))
        })
    }
}

/// Parses a comma-separated measure list; `all` selects every measure.
pub fn parse_measures(list: &str) -> Result<BTreeSet<MeasureTag>> {
    let mut out = BTreeSet::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item.eq_ignore_ascii_case("all") {
            out.extend(MeasureTag::ALL);
        } else {
            out.insert(item.parse()?);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("measure list is empty".into()));
    }
    Ok(out)
}

/// Parses a comma-separated temperature list; `ground` or `0` stands for the ground state.
pub fn parse_temperatures(list: &str) -> Result<Vec<Option<f64>>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item.eq_ignore_ascii_case("ground") {
            out.push(None);
            continue;
        }
        let t: f64 = item.parse().map_err(|_| Error::Config(format!("bad temperature '{item}'")))?;
        if t == 0.0 {
            out.push(None);
        } else if t.is_finite() && t > 0.0 {
            out.push(Some(t));
        } else {
            return Err(Error::Config(format!("temperature {t} must be positive")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl LambdaGrid {
    /// 61 log-spaced points on [10⁻², 10³].
    pub fn ground_default() -> Self {
        LambdaGrid { min: 1e-2, max: 1e3, count: 61, spacing: Spacing::Log }
    }

    /// Log grid reaching 2·10³, for thermal Fano thresholds.
    pub fn thermal_default() -> Self {
        LambdaGrid { min: 1e-2, max: 2e3, count: 67, spacing: Spacing::Log }
    }

    pub fn single(lambda: f64) -> Self {
        LambdaGrid { min: lambda, max: lambda, count: 1, spacing: Spacing::Linear }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(Error::Config("lambda grid needs at least one point".into()));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(Error::Config(format!("lambda range [{}, {}] is invalid", self.min, self.max)));
        }
        if self.min <= LAMBDA_MIN {
            return Err(Error::Config(format!("lambda must exceed {LAMBDA_MIN}, got {}", self.min)));
        }
        if self.count == 1 {
            return Ok(vec![self.min]);
        }
        let n = (self.count - 1) as f64;
        match self.spacing {
            Spacing::Linear => Ok((0..self.count).map(|i| self.min + (self.max - self.min) * i as f64 / n).collect()),
            Spacing::Log => {
                if self.min <= 0.0 {
                    return Err(Error::Config("log-spaced lambda grid needs min > 0".into()));
                }
                let (a, b) = (self.min.log10(), self.max.log10());
                Ok((0..self.count).map(|i| 10f64.powf(a + (b - a) * i as f64 / n)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub lambda: LambdaGrid,
    /// `None` is the ground state; an empty list means ground state only.
    pub temperatures: Vec<Option<f64>>,
    pub measures: BTreeSet<MeasureTag>,
    pub profile: Profile,
    /// Worker count; `None` uses the available parallelism.
    pub threads: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lambda: LambdaGrid::ground_default(),
            temperatures: Vec::new(),
            measures: MeasureTag::ALL.into_iter().collect(),
            profile: Profile::default(),
            threads: None,
        }
    }
}

impl SweepConfig {
    /// (T, λ) cells in output order: ground first, then ascending T; λ ascending.
    pub fn cells(&self) -> Result<Vec<(Option<f64>, f64)>> {
        let lambdas = self.lambda.values()?;
        let mut temps = if self.temperatures.is_empty() { vec![None] } else { self.temperatures.clone() };
        temps.sort_by(|a, b| match (a, b) {
            (None, None) => std::cmp::Ordering::Equal,
            (None, _) => std::cmp::Ordering::Less,
            (_, None) => std::cmp::Ordering::Greater,
            (Some(x), Some(y)) => x.total_cmp(y),
        });
        temps.dedup();
        let mut cells = Vec::with_capacity(temps.len() * lambdas.len());
        for t in &temps {
            for &l in &lambdas {
                cells.push((*t, l));
            }
        }
        Ok(cells)
    }

    pub fn validate(&self) -> Result<()> {
        if self.measures.is_empty() {
            return Err(Error::Config("no measures selected".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        self.cells().map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlagKind {
    /// The quantity does not exist for this state (Fano of the vacuum).
    Undefined,
    /// A truncation or refinement did not reach its tolerance; the value is withheld.
    NonConvergence,
    /// Evaluation failed for another reason; the value is withheld.
    Error,
    /// A cross-check disagreed or a roundoff clip was applied; the value is reported.
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub measure: MeasureTag,
    pub kind: FlagKind,
    pub detail: String,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            FlagKind::Undefined => "undefined",
            FlagKind::NonConvergence => "nonconvergence",
            FlagKind::Error => "error",
            FlagKind::Warning => "warning",
        };
        write!(f, "{}:{kind}:{}", self.measure, self.detail)
    }
}

/// Every measure for one (λ, T) cell; `None` marks a value that was not requested or is
/// withheld (see `flags`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub lambda: f64,
    pub temperature: Option<f64>,
    pub var_x: Option<f64>,
    pub var_p: Option<f64>,
    pub uncertainty_product: Option<f64>,
    pub delta_nong: Option<f64>,
    pub fano: Option<f64>,
    pub wigner_negativity: Option<f64>,
    pub qcs_paper: Option<f64>,
    pub qcs_kernel: Option<f64>,
    pub qfi: Option<f64>,
    pub classical_fi: Option<f64>,
    pub flags: Vec<Flag>,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "lambda",
    "temperature",
    "var_x",
    "var_p",
    "uncertainty_product",
    "delta_nong",
    "fano",
    "wigner_negativity",
    "qcs_paper",
    "qcs_kernel",
    "qfi",
    "classical_fi",
    "flags",
];

/// Shortest representation that round-trips.
fn fmt_value(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:?}"),
        _ => NA.to_string(),
    }
}

impl MeasureReport {
    fn empty(lambda: f64, temperature: Option<f64>) -> Self {
        MeasureReport {
            lambda,
            temperature,
            var_x: None,
            var_p: None,
            uncertainty_product: None,
            delta_nong: None,
            fano: None,
            wigner_negativity: None,
            qcs_paper: None,
            qcs_kernel: None,
            qfi: None,
            classical_fi: None,
            flags: Vec::new(),
        }
    }

    /// True when some requested value was withheld for non-convergence or failure.
    pub fn has_failure(&self) -> bool {
        self.flags.iter().any(|f| matches!(f.kind, FlagKind::NonConvergence | FlagKind::Error))
    }

    pub fn csv_row(&self) -> String {
        let flags = if self.flags.is_empty() {
            String::new()
        } else {
            self.flags.iter().map(|f| f.to_string().replace([',', '\n'], " ")).collect::<Vec<_>>().join(";")
        };
        let cells = [
            fmt_value(Some(self.lambda)),
            self.temperature.map_or_else(|| "ground".to_string(), |t| fmt_value(Some(t))),
            fmt_value(self.var_x),
            fmt_value(self.var_p),
            fmt_value(self.uncertainty_product),
            fmt_value(self.delta_nong),
            fmt_value(self.fano),
            fmt_value(self.wigner_negativity),
            fmt_value(self.qcs_paper),
            fmt_value(self.qcs_kernel),
            fmt_value(self.qfi),
            fmt_value(self.classical_fi),
            flags,
        ];
        cells.join(",")
    }
}

fn classify(err: &Error) -> FlagKind {
    match err {
        Error::UndefinedFano { .. } | Error::InfiniteBound { .. } => FlagKind::Undefined,
        Error::NonConvergence { .. } => FlagKind::NonConvergence,
        _ => FlagKind::Error,
    }
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::no_convergence("evaluate", format!("non-finite value {v}")))
    }
}

/// Evaluates the requested measures for one cell. Failures are recorded as flags and never
/// abort the cell.
pub fn evaluate_cell(
    lambda: f64,
    temperature: Option<f64>,
    measures: &BTreeSet<MeasureTag>,
    profile: Profile,
) -> MeasureReport {
    let mut report = MeasureReport::empty(lambda, temperature);
    let state = match DeformationParameter::new(lambda).and_then(|l| OscillatorState::new(l, temperature, profile)) {
        Ok(s) => s,
        Err(e) => {
            for &m in measures {
                report.flags.push(Flag { measure: m, kind: classify(&e), detail: e.to_string() });
            }
            return report;
        }
    };
    let fail = |report: &mut MeasureReport, m: MeasureTag, e: Error| {
        report.flags.push(Flag { measure: m, kind: classify(&e), detail: e.to_string() });
    };
    let warn = |report: &mut MeasureReport, m: MeasureTag, detail: String| {
        report.flags.push(Flag { measure: m, kind: FlagKind::Warning, detail });
    };

    for &m in measures {
        match m {
            MeasureTag::Moments => match measures::quadrature_moments(&state) {
                Ok(ms) => {
                    report.var_x = finite(ms.var_x()).ok();
                    report.var_p = finite(ms.var_p()).ok();
                    report.uncertainty_product = finite(ms.uncertainty_product()).ok();
                }
                Err(e) => fail(&mut report, m, e),
            },
            MeasureTag::Nong => match measures::nong_delta(&state).and_then(|d| finite(d.value).map(|_| d)) {
                Ok(d) => {
                    report.delta_nong = Some(d.value);
                    if d.clipped {
                        warn(&mut report, m, format!("clipped {:e} to 0", d.raw));
                    }
                }
                Err(e) => fail(&mut report, m, e),
            },
            MeasureTag::Fano => match measures::fano_factor(&state) {
                Ok(f) if f.converged => report.fano = finite(f.value).ok(),
                Ok(f) => fail(
                    &mut report,
                    m,
                    Error::no_convergence("fano_factor", format!("Fock cut capped (value {:e})", f.value)),
                ),
                Err(e) => fail(&mut report, m, e),
            },
            MeasureTag::Wigner => match measures::wigner_negativity_auto(&state) {
                Ok(w) if w.converged => report.wigner_negativity = finite(w.value).ok(),
                Ok(w) => fail(
                    &mut report,
                    m,
                    Error::no_convergence("wigner_negativity", format!("refinement not settled (value {:e})", w.value)),
                ),
                Err(e) => fail(&mut report, m, e),
            },
            MeasureTag::Qcs => match measures::qcs(&state) {
                Ok(q) => {
                    report.qcs_paper = finite(q.reduced).ok();
                    report.qcs_kernel = finite(q.kernel).ok();
                }
                Err(e) => fail(&mut report, m, e),
            },
            MeasureTag::Qfi => match estimation::qfi(&state) {
                Ok(h) => {
                    report.qfi = finite(h.value).ok();
                    if h.metadata.flagged {
                        warn(
                            &mut report,
                            m,
                            format!(
                                "cross-check fd={:e} doubled={:e}",
                                h.metadata.finite_difference_value.unwrap_or(f64::NAN),
                                h.metadata.doubled_levels_value.unwrap_or(f64::NAN)
                            ),
                        );
                    }
                }
                Err(e) => fail(&mut report, m, e),
            },
            MeasureTag::Cfi => match estimation::classical_fi(&state) {
                Ok(f) => report.classical_fi = finite(f.value).ok(),
                Err(e) => fail(&mut report, m, e),
            },
        }
    }
    report
}

/// One report per (T, λ) cell in the order of [`SweepConfig::cells`], independent of how
/// the cells were scheduled.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<MeasureReport>> {
    config.validate()?;
    let cells = config.cells()?;
    let work = || -> Vec<MeasureReport> {
        cells.par_iter().map(|&(t, l)| evaluate_cell(l, t, &config.measures, config.profile)).collect()
    };
    match config.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}
