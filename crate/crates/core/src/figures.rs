//! Data behind each published figure, in long format (panel, series, x, y).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::states::{self, OscillatorState};
use crate::susy::{self, DeformationParameter};
use crate::sweep::{self, LambdaGrid, MeasureReport, MeasureTag, SweepConfig, NA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FigureTag {
    #[serde(rename = "isoSHO")]
    IsoSho,
    #[serde(rename = "GNONG")]
    Gnong,
    #[serde(rename = "SqzFig")]
    SqzFig,
    #[serde(rename = "GNONC")]
    Gnonc,
    #[serde(rename = "TNONG")]
    Tnong,
    #[serde(rename = "Squee")]
    Squee,
    #[serde(rename = "TQFI")]
    Tqfi,
}

impl FigureTag {
    pub const ALL: [FigureTag; 7] = [
        FigureTag::IsoSho,
        FigureTag::Gnong,
        FigureTag::SqzFig,
        FigureTag::Gnonc,
        FigureTag::Tnong,
        FigureTag::Squee,
        FigureTag::Tqfi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureTag::IsoSho => "isoSHO",
            FigureTag::Gnong => "GNONG",
            FigureTag::SqzFig => "SqzFig",
            FigureTag::Gnonc => "GNONC",
            FigureTag::Tnong => "TNONG",
            FigureTag::Squee => "Squee",
            FigureTag::Tqfi => "TQFI",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            FigureTag::IsoSho => "isospectral potentials and the two lowest eigenfunctions",
            FigureTag::Gnong => "relative-entropy non-Gaussianity of the ground states",
            FigureTag::SqzFig => "quadrature variances and uncertainty product of the ground states",
            FigureTag::Gnonc => "Fano factor, photon distribution, Wigner negativity and QCS of the ground states",
            FigureTag::Tnong => "non-Gaussianity of thermal states with the ground-state baseline",
            FigureTag::Squee => "thermal squeezing, Fano factor, Wigner negativity and QCS",
            FigureTag::Tqfi => "quantum and position-measurement Fisher information of thermal states",
        }
    }

    /// λ grid used when none is given.
    pub fn default_grid(self) -> LambdaGrid {
        match self {
            FigureTag::Squee => LambdaGrid::thermal_default(),
            _ => LambdaGrid::ground_default(),
        }
    }
}

impl fmt::Display for FigureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureTag::ALL.into_iter().find(|t| t.name().eq_ignore_ascii_case(s.trim())).ok_or_else(|| {
            let known: Vec<_> = FigureTag::ALL.iter().map(|t| t.name()).collect();
            Error::Config(format!("unknown figure '{s}' (known: {})", known.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigurePoint {
    pub panel: String,
    pub series: String,
    pub x: f64,
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub tag: FigureTag,
    pub points: Vec<FigurePoint>,
    /// Cells whose values were withheld for non-convergence or failure.
    pub failed_cells: usize,
}

impl FigureData {
    /// CSV with `#` header lines naming the figure; `extra_header` lines are inserted verbatim
    /// after a leading `# `.
    pub fn to_csv(&self, extra_header: &[String]) -> String {
        let mut out = format!("# figure: {}\n# {}\n", self.tag.name(), self.tag.title());
        for line in extra_header {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("# panel,series,x,y\n");
        for p in &self.points {
            let y = match p.y {
                Some(v) if v.is_finite() => format!("{v:?}"),
                _ => NA.to_string(),
            };
            out.push_str(&format!("{},{},{:?},{y}\n", p.panel, p.series, p.x));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FigureOptions {
    /// Overrides the figure's λ grid (ignored by isoSHO).
    pub lambda: Option<LambdaGrid>,
    pub profile: Profile,
    pub threads: Option<usize>,
}

fn series_name(t: Option<f64>) -> String {
    t.map_or_else(|| "ground".to_string(), |t| format!("T={t}"))
}

fn sweep_for(
    tag: FigureTag,
    temps: &[Option<f64>],
    measures: &[MeasureTag],
    opts: &FigureOptions,
) -> Result<Vec<MeasureReport>> {
    let config = SweepConfig {
        lambda: opts.lambda.unwrap_or_else(|| tag.default_grid()),
        temperatures: temps.to_vec(),
        measures: measures.iter().copied().collect::<BTreeSet<_>>(),
        profile: opts.profile,
        threads: opts.threads,
    };
    sweep::run_sweep(&config)
}

type Column = (&'static str, fn(&MeasureReport) -> Option<f64>);

fn push_columns(points: &mut Vec<FigurePoint>, reports: &[MeasureReport], columns: &[Column], series_by_column: bool) {
    for &(name, get) in columns {
        for r in reports {
            let (panel, series) = if series_by_column {
                ("variances".to_string(), name.to_string())
            } else {
                (name.to_string(), series_name(r.temperature))
            };
            points.push(FigurePoint { panel, series, x: r.lambda, y: get(r) });
        }
    }
}

const ISO_LAMBDAS: [f64; 4] = [0.0, 10.0, 1e3, 1e5];
const THERMAL_TEMPS: [f64; 3] = [0.25, 0.33, 0.5];
const INSET_LAMBDA: f64 = 500.0;

fn iso_sho_points() -> Result<Vec<FigurePoint>> {
    let xs: Vec<f64> = (0..=500).map(|i| -5.0 + 0.02 * i as f64).collect();
    let mut points = Vec::new();
    for &l in &ISO_LAMBDAS {
        let lam = DeformationParameter::new(l)?;
        let series = format!("lambda={l}");
        for &x in &xs {
            let v = susy::isospectral_potential(lam, x);
            points.push(FigurePoint { panel: "potential".into(), series: series.clone(), x, y: Some(v) });
        }
        for &x in &xs {
            let v = susy::ground_wavefunction(lam, x);
            points.push(FigurePoint { panel: "phi0".into(), series: series.clone(), x, y: Some(v) });
        }
        for &x in &xs {
            let v = susy::excited_wavefunction(1, lam, x)?;
            points.push(FigurePoint { panel: "phi1".into(), series: series.clone(), x, y: Some(v) });
        }
    }
    Ok(points)
}

fn photon_inset(profile: Profile) -> Result<Vec<FigurePoint>> {
    let state = OscillatorState::ground_with(DeformationParameter::new(INSET_LAMBDA)?, profile);
    let dist = states::photon_distribution(&state)?;
    let mut points = Vec::new();
    let mut acc = 0.0;
    for (n, &p) in dist.probabilities.iter().enumerate() {
        points.push(FigurePoint {
            panel: "photon_distribution".into(),
            series: format!("lambda={INSET_LAMBDA}"),
            x: n as f64,
            y: Some(p),
        });
        acc += p;
        if acc > 1.0 - 1e-6 {
            break;
        }
    }
    Ok(points)
}

/// Computes the data for one figure.
pub fn figure(tag: FigureTag, opts: &FigureOptions) -> Result<FigureData> {
    let thermal: Vec<Option<f64>> = THERMAL_TEMPS.iter().map(|&t| Some(t)).collect();
    let with_ground: Vec<Option<f64>> = std::iter::once(None).chain(thermal.iter().copied()).collect();
    let mut points = Vec::new();
    let reports = match tag {
        FigureTag::IsoSho => {
            points = iso_sho_points()?;
            Vec::new()
        }
        FigureTag::Gnong => {
            let r = sweep_for(tag, &[None], &[MeasureTag::Nong], opts)?;
            push_columns(&mut points, &r, &[("delta", |r| r.delta_nong)], false);
            r
        }
        FigureTag::SqzFig => {
            let r = sweep_for(tag, &[None], &[MeasureTag::Moments], opts)?;
            push_columns(
                &mut points,
                &r,
                &[
                    ("var_x", |r| r.var_x),
                    ("var_p", |r| r.var_p),
                    ("uncertainty_product", |r| r.uncertainty_product),
                    ("shot_noise", |_| Some(0.5)),
                ],
                true,
            );
            r
        }
        FigureTag::Gnonc => {
            let r = sweep_for(tag, &[None], &[MeasureTag::Fano, MeasureTag::Wigner, MeasureTag::Qcs], opts)?;
            push_columns(
                &mut points,
                &r,
                &[("fano", |r| r.fano), ("wigner_negativity", |r| r.wigner_negativity), ("qcs", |r| r.qcs_paper)],
                false,
            );
            points.extend(photon_inset(opts.profile)?);
            r
        }
        FigureTag::Tnong => {
            let r = sweep_for(tag, &with_ground, &[MeasureTag::Nong], opts)?;
            push_columns(&mut points, &r, &[("delta", |r| r.delta_nong)], false);
            r
        }
        FigureTag::Squee => {
            let measures = [MeasureTag::Moments, MeasureTag::Fano, MeasureTag::Wigner, MeasureTag::Qcs];
            let r = sweep_for(tag, &thermal, &measures, opts)?;
            push_columns(
                &mut points,
                &r,
                &[
                    ("var_x", |r| r.var_x),
                    ("fano", |r| r.fano),
                    ("wigner_negativity", |r| r.wigner_negativity),
                    ("qcs_paper", |r| r.qcs_paper),
                    ("qcs_kernel", |r| r.qcs_kernel),
                ],
                false,
            );
            r
        }
        FigureTag::Tqfi => {
            let r = sweep_for(tag, &with_ground, &[MeasureTag::Qfi, MeasureTag::Cfi], opts)?;
            push_columns(&mut points, &r, &[("qfi", |r| r.qfi), ("classical_fi", |r| r.classical_fi)], false);
            r
        }
    };
    let failed_cells = reports.iter().filter(|r| r.has_failure()).count();
    Ok(FigureData { tag, points, failed_cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::Spacing;

    #[test]
    fn tags_round_trip() {
        for t in FigureTag::ALL {
            assert_eq!(t.name().parse::<FigureTag>().unwrap(), t);
        }
        assert_eq!("gnong".parse::<FigureTag>().unwrap(), FigureTag::Gnong);
        assert!("Fig9".parse::<FigureTag>().is_err());
    }

    #[test]
    fn iso_sho_has_all_curves() {
        let f = figure(FigureTag::IsoSho, &FigureOptions::default()).unwrap();
        assert_eq!(f.points.len(), 3 * 4 * 501);
        let csv = f.to_csv(&[]);
        assert!(csv.starts_with("# figure: isoSHO\n"));
        assert!(csv.contains("potential,lambda=100000,"));
    }

    #[test]
    fn thermal_figure_has_baseline_and_three_temperatures() {
        let opts = FigureOptions {
            lambda: Some(LambdaGrid { min: 1.0, max: 10.0, count: 2, spacing: Spacing::Log }),
            ..FigureOptions::default()
        };
        let f = figure(FigureTag::Tnong, &opts).unwrap();
        let series: BTreeSet<_> = f.points.iter().map(|p| p.series.clone()).collect();
        assert_eq!(series.into_iter().collect::<Vec<_>>(), ["T=0.25", "T=0.33", "T=0.5", "ground"]);
        assert_eq!(f.failed_cells, 0);
    }
}
