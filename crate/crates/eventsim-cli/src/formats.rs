//! On-disk formats: geometry config JSON, `histogram.json`, `hits.csv`,
//! `trials.csv`/`trials.json`, `report.json`, and the plot-ready pattern
//! CSV. Writers are byte-deterministic: the same data always serializes
//! to the same bytes.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use eventsim::twoslit::BeamKind;
use eventsim::{
    CheckReport, Collective, DetectionPattern, ParticleHit, SlitGeometry, SlitMode, TwoslitError,
};

use crate::CliError;

/// Geometry configuration as it appears on disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub wavelength_nm: f64,
    pub d_mm: f64,
    pub a_mm: f64,
    #[serde(rename = "L_m")]
    pub l_m: f64,
    pub window_mm: f64,
    pub bins: u32,
}

impl GeometryConfig {
    pub fn from_geometry(geometry: &SlitGeometry) -> Self {
        Self {
            wavelength_nm: geometry.wavelength_nm(),
            d_mm: geometry.slit_separation_mm(),
            a_mm: geometry.slit_width_mm(),
            l_m: geometry.screen_distance_m(),
            window_mm: geometry.window_mm(),
            bins: geometry.bins() as u32,
        }
    }

    pub fn into_geometry(self) -> Result<SlitGeometry, TwoslitError> {
        SlitGeometry::new(
            self.wavelength_nm,
            self.d_mm,
            self.a_mm,
            self.l_m,
            self.window_mm,
            self.bins,
        )
    }
}

/// One screen bin of a serialized detection pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinJson {
    pub x_lo: f64,
    pub x_hi: f64,
    pub count: u64,
    pub expected: f64,
}

/// `histogram.json`: a detection pattern with its geometry, slit mode,
/// photon count, seed, and per-bin counts next to the model expectation.
/// Weak beams store expected counts (`K * p`); intense beams store the
/// profile mass itself with zero counts and `K = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramJson {
    pub geometry: GeometryConfig,
    pub mode: String,
    #[serde(rename = "K")]
    pub k: u64,
    pub seed: u64,
    pub bins: Vec<BinJson>,
}

impl HistogramJson {
    pub fn from_pattern(pattern: &DetectionPattern) -> Self {
        let geometry = pattern.geometry();
        let k = pattern.photons();
        let bins = (0..geometry.bins())
            .map(|i| {
                let (x_lo, x_hi) = geometry.bin_edges(i);
                let count = pattern.counts().map_or(0, |c| c[i]);
                let expected = match pattern.beam() {
                    BeamKind::Weak => k as f64 * pattern.expected_pdf()[i],
                    BeamKind::Intense => pattern.expected_pdf()[i],
                };
                BinJson {
                    x_lo,
                    x_hi,
                    count,
                    expected,
                }
            })
            .collect();
        Self {
            geometry: GeometryConfig::from_geometry(geometry),
            mode: pattern.mode().as_str().to_string(),
            k,
            seed: pattern.seed().unwrap_or(0),
            bins,
        }
    }

    pub fn counts(&self) -> Vec<u64> {
        self.bins.iter().map(|b| b.count).collect()
    }

    pub fn total_count(&self) -> u64 {
        self.bins.iter().map(|b| b.count).sum()
    }

    pub fn slit_mode(&self) -> Result<SlitMode, CliError> {
        self.mode
            .parse()
            .map_err(|e: String| CliError::Config(format!("histogram mode field: {e}")))
    }
}

/// One check entry of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckJson {
    pub name: String,
    pub passed: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub n: u64,
    pub seed: u64,
    pub details: BTreeMap<String, f64>,
}

impl CheckJson {
    pub fn from_report(report: &CheckReport) -> Self {
        Self {
            name: report.name.as_str().to_string(),
            passed: report.passed,
            statistic: report.statistic,
            threshold: report.threshold,
            n: report.n,
            seed: report.seed,
            details: report.details.clone(),
        }
    }
}

/// `report.json`: the outcome of every check run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub checks: Vec<CheckJson>,
}

/// Writes `hits.csv`: one row per detected photon, positions in meters
/// with nine significant digits.
pub fn write_hits_csv(mut w: impl Write, hits: &[ParticleHit]) -> std::io::Result<()> {
    writeln!(w, "photon_index,t_omega,bin,x_position_m")?;
    for hit in hits {
        writeln!(
            w,
            "{},{},{},{:.8e}",
            hit.photon_index, hit.t_omega, hit.bin, hit.x_position
        )?;
    }
    Ok(())
}

/// Writes `trials.csv`: one row per trial of a collective.
pub fn write_trials_csv(mut w: impl Write, collective: &Collective) -> std::io::Result<()> {
    writeln!(w, "trial_index,t_omega,outcome")?;
    let outcomes = collective.model().outcomes();
    for record in collective.records() {
        writeln!(
            w,
            "{},{},{}",
            record.trial_index(),
            record.t_omega(),
            outcomes[record.realized()]
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct TrialJson<'a> {
    trial_index: u64,
    t_omega: u64,
    outcome: &'a str,
}

#[derive(Debug, Serialize)]
struct CollectiveModelJson<'a> {
    label: &'a str,
    params: &'a BTreeMap<String, f64>,
    outcomes: &'a [String],
    probabilities: &'a [f64],
}

#[derive(Debug, Serialize)]
struct CollectiveJson<'a> {
    model: CollectiveModelJson<'a>,
    n: u64,
    seed: u64,
    trials: Vec<TrialJson<'a>>,
}

/// Writes `trials.json`: the collective with its generating model.
pub fn write_trials_json(w: impl Write, collective: &Collective) -> Result<(), CliError> {
    let model = collective.model();
    let doc = CollectiveJson {
        model: CollectiveModelJson {
            label: &model.conditions().label,
            params: &model.conditions().params,
            outcomes: model.outcomes(),
            probabilities: model.probabilities(),
        },
        n: collective.len(),
        seed: collective.seed(),
        trials: collective
            .records()
            .iter()
            .map(|r| TrialJson {
                trial_index: r.trial_index(),
                t_omega: r.t_omega(),
                outcome: &model.outcomes()[r.realized()],
            })
            .collect(),
    };
    serde_json::to_writer_pretty(w, &doc).map_err(CliError::from)
}

/// Writes the plot-ready comparison CSV: bin center, observed density,
/// and model density, both per meter.
pub fn write_pattern_csv(
    mut w: impl Write,
    geometry: &SlitGeometry,
    counts: &[u64],
    expected_pdf: &[f64],
    total: u64,
) -> std::io::Result<()> {
    writeln!(w, "x_position_m,observed_density,expected_density")?;
    let bin_width = geometry.bin_width();
    for i in 0..geometry.bins() {
        let observed = counts[i] as f64 / (total as f64 * bin_width);
        let expected = expected_pdf[i] / bin_width;
        writeln!(
            w,
            "{:.8e},{:.8e},{:.8e}",
            geometry.bin_center(i),
            observed,
            expected
        )?;
    }
    Ok(())
}
