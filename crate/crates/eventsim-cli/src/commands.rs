//! Command implementations behind the CLI surface. Each command returns
//! its machine-greppable summary lines; `verify` additionally reports
//! whether every check predicate held.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use eventsim::classical::{roulette_event, urn_event};
use eventsim::{
    check_tc, check_td, check_tic, check_tln, check_tsn, chi_square_gof, indirect_estimate,
    intensity_profile, ks_distance, run_intense_beam, run_weak_beam, CheckName, CheckReport,
    Collective, Conditions, EventStructure, SlitGeometry, SlitMode,
};

use crate::formats::{
    write_hits_csv, write_pattern_csv, write_trials_csv, write_trials_json, CheckJson,
    GeometryConfig, HistogramJson, ReportJson,
};
use crate::{CliError, OutputFormat};

/// Output file name for one run: the canonical name for a single seed,
/// seed-suffixed when a run covers several.
fn seeded_name(stem: &str, ext: &str, seed: u64, multi: bool) -> String {
    if multi {
        format!("{stem}_s{seed}.{ext}")
    } else {
        format!("{stem}.{ext}")
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_collective(
    out_dir: &Path,
    stem: &str,
    format: OutputFormat,
    collective: &Collective,
    multi: bool,
) -> Result<PathBuf, CliError> {
    let ext = match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let path = out_dir.join(seeded_name(stem, ext, collective.seed(), multi));
    let writer = create(&path)?;
    match format {
        OutputFormat::Csv => write_trials_csv(writer, collective)?,
        OutputFormat::Json => write_trials_json(writer, collective)?,
    }
    Ok(path)
}

pub fn simulate_urn(
    reds: u64,
    whites: u64,
    n: u64,
    seeds: &[u64],
    out_dir: &Path,
    format: OutputFormat,
) -> Result<Vec<String>, CliError> {
    let event = urn_event(reds, whites)?;
    let multi = seeds.len() > 1;
    let mut lines = Vec::new();
    for &seed in seeds {
        let collective = Collective::run(&event, n, seed)?;
        let path = write_collective(out_dir, "trials", format, &collective, multi)?;
        let f_red = collective.frequency("red")?.value();
        let f_white = collective.frequency("white")?.value();
        lines.push(format!(
            "target=urn reds={reds} whites={whites} n={n} seed={seed} \
             frequency_red={f_red} frequency_white={f_white} out={}",
            path.display()
        ));
    }
    Ok(lines)
}

pub fn simulate_roulette(
    n: u64,
    seeds: &[u64],
    out_dir: &Path,
    format: OutputFormat,
) -> Result<Vec<String>, CliError> {
    let event = roulette_event();
    let multi = seeds.len() > 1;
    let mut lines = Vec::new();
    for &seed in seeds {
        let collective = Collective::run(&event, n, seed)?;
        let path = write_collective(out_dir, "trials", format, &collective, multi)?;
        let gof = chi_square_gof(&collective.counts(), event.probabilities())?;
        lines.push(format!(
            "target=roulette cells=37 n={n} seed={seed} chi2={} chi2_p={} out={}",
            gof.statistic,
            gof.p_value,
            path.display()
        ));
    }
    Ok(lines)
}

#[allow(clippy::too_many_arguments)]
pub fn simulate_twoslit(
    geometry: &SlitGeometry,
    mode: SlitMode,
    photons: u64,
    intense: bool,
    seeds: &[u64],
    out_dir: &Path,
) -> Result<Vec<String>, CliError> {
    if !geometry.is_far_field() {
        eprintln!(
            "warning: geometry is not far-field (L/d = {:.1}); the closed-form profile \
             is a poor model here",
            geometry.screen_distance() / geometry.slit_separation()
        );
    }
    let mut lines = Vec::new();
    if intense {
        let pattern = run_intense_beam(geometry, mode);
        let path = out_dir.join("histogram.json");
        serde_json::to_writer_pretty(create(&path)?, &HistogramJson::from_pattern(&pattern))?;
        lines.push(format!(
            "target=twoslit beam=intense mode={mode} bins={} histogram={}",
            geometry.bins(),
            path.display()
        ));
        return Ok(lines);
    }

    let multi = seeds.len() > 1;
    for &seed in seeds {
        let run = run_weak_beam(geometry, mode, photons, seed)?;
        let hits_path = out_dir.join(seeded_name("hits", "csv", seed, multi));
        write_hits_csv(create(&hits_path)?, &run.hits)?;
        let histogram_path = out_dir.join(seeded_name("histogram", "json", seed, multi));
        serde_json::to_writer_pretty(
            create(&histogram_path)?,
            &HistogramJson::from_pattern(&run.pattern),
        )?;

        let counts = run.pattern.counts().expect("weak beam has counts");
        let gof = chi_square_gof(counts, run.pattern.expected_pdf())?;
        lines.push(format!(
            "target=twoslit beam=weak mode={mode} K={photons} seed={seed} bins={} \
             chi2={} chi2_p={} hits={} histogram={}",
            geometry.bins(),
            gof.statistic,
            gof.p_value,
            hits_path.display(),
            histogram_path.display()
        ));
    }
    Ok(lines)
}

/// Resolves the fixture event for `verify` from its model name.
pub fn verify_model(
    name: &str,
    reds: u64,
    whites: u64,
) -> Result<(EventStructure, String), CliError> {
    match name {
        "urn" => Ok((urn_event(reds, whites)?, "red".to_string())),
        "certain" => {
            let event =
                EventStructure::new(Conditions::labeled("certain"), [("only".to_string(), 1.0)])?;
            Ok((event, "only".to_string()))
        }
        "roulette" => Ok((roulette_event(), "0".to_string())),
        other => Err(CliError::Config(format!(
            "unknown model `{other}`, expected urn|certain|roulette"
        ))),
    }
}

/// Checkpoint schedule for the long-run check: two decades up to `n`.
fn tln_schedule(n: u64) -> Vec<u64> {
    let mut schedule = vec![n / 100, n / 10, n];
    schedule.retain(|&c| c > 0);
    schedule.dedup();
    schedule
}

pub struct VerifyOutcome {
    pub lines: Vec<String>,
    pub all_passed: bool,
}

pub fn verify(
    checks: &[CheckName],
    event: &EventStructure,
    label: &str,
    n: u64,
    confidence: f64,
    seeds: &[u64],
    out_path: &Path,
) -> Result<VerifyOutcome, CliError> {
    let mut reports: Vec<CheckReport> = Vec::new();
    for &seed in seeds {
        for &check in checks {
            let report = match check {
                CheckName::Tsn => check_tsn(event, seed)?,
                CheckName::Tln => check_tln(event, label, &tln_schedule(n), seed)?.0,
                CheckName::Tic => check_tic(event, n, seed)?,
                CheckName::Tc => check_tc(event, label, n, seed)?,
                CheckName::Td => check_td(event, n, seed)?,
                CheckName::Indirect => indirect_estimate(event, label, n, confidence, seed)?.1,
                CheckName::Bayes => {
                    return Err(CliError::Config(
                        "BAYES is not part of the verify surface".to_string(),
                    ))
                }
            };
            reports.push(report);
        }
    }

    let mut lines = Vec::new();
    for report in &reports {
        lines.push(format!(
            "check={} seed={} n={} passed={} statistic={} threshold={}",
            report.name, report.seed, report.n, report.passed, report.statistic, report.threshold
        ));
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let all_passed = failed == 0;

    let doc = ReportJson {
        checks: reports.iter().map(CheckJson::from_report).collect(),
    };
    serde_json::to_writer_pretty(create(out_path)?, &doc)?;
    lines.push(format!(
        "verify={} checks={} failed={failed} report={}",
        if all_passed { "pass" } else { "fail" },
        reports.len(),
        out_path.display()
    ));
    Ok(VerifyOutcome { lines, all_passed })
}

pub fn report(
    input: &Path,
    geometry: &SlitGeometry,
    out_path: &Path,
) -> Result<Vec<String>, CliError> {
    let file = File::open(input)?;
    let histogram: HistogramJson = serde_json::from_reader(file)?;
    if histogram.bins.is_empty() || histogram.total_count() == 0 {
        return Err(CliError::EmptyInput(input.display().to_string()));
    }
    if histogram.bins.len() != geometry.bins() {
        return Err(CliError::Config(format!(
            "length mismatch: histogram has {} bins, preset expects {}",
            histogram.bins.len(),
            geometry.bins()
        )));
    }
    let total = histogram.total_count();
    if histogram.k != total {
        return Err(CliError::EmptyInput(format!(
            "histogram K={} disagrees with summed counts {total}",
            histogram.k
        )));
    }

    let mode = histogram.slit_mode()?;
    let profile = intensity_profile(geometry, mode);
    let counts = histogram.counts();
    let gof = chi_square_gof(&counts, profile.pdf())?;
    let ks = ks_distance(&counts, profile.pdf())?;
    write_pattern_csv(create(out_path)?, geometry, &counts, profile.pdf(), total)?;

    Ok(vec![format!(
        "input={} mode={mode} K={total} bins={} chi2={} chi2_p={} ks={} dof={} out={}",
        input.display(),
        geometry.bins(),
        gof.statistic,
        gof.p_value,
        ks,
        gof.dof,
        out_path.display()
    )])
}

/// Built-in geometry presets.
pub fn preset_geometry(name: &str) -> Result<SlitGeometry, CliError> {
    match name {
        "reference" => Ok(SlitGeometry::reference()),
        other => Err(CliError::Config(format!(
            "unknown preset `{other}`, expected `reference`"
        ))),
    }
}

/// Loads a geometry from a JSON config file.
pub fn load_geometry(path: &Path) -> Result<SlitGeometry, CliError> {
    let file = File::open(path)?;
    let config: GeometryConfig = serde_json::from_reader(file)?;
    Ok(config.into_geometry()?)
}
