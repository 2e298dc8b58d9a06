//! Seeded pass/fail checks of the frequency laws the event model obeys:
//! single-trial frequencies are integers (TSN), long-run frequencies
//! approach the model probability (TLN), random outcomes are indeterminate
//! before delivery (TIC), a long run's aggregate frequency stays interior
//! (TC), a single outcome switches to determinate at delivery (TD), plus
//! interval estimation of a single event's probability through its long
//! run (INDIRECT) and a conjugate Beta-Bernoulli updater (BAYES).
//!
//! Every check records its trial count and seed, so any report can be
//! reproduced bit-for-bit. A check that returns `Ok` with `passed: false`
//! found its predicate false on that run; `Err` means the check could not
//! be run at all.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::event::{Collective, EventError, EventStructure};
use crate::stats::{self, StatsError};

/// Width of the binomial tolerance band used by the long-run checks, in
/// standard deviations. Four sigma keeps the false-failure rate per check
/// under 1e-4.
pub const TLN_SIGMA_FACTOR: f64 = 4.0;

/// Smallest final trial count accepted by the long-run frequency check.
/// Keeps the single-trial and long-run regimes from overlapping.
pub const TLN_MIN_FINAL_TRIALS: u64 = 10_000;

/// Smallest collective accepted by the continuity check.
pub const TC_MIN_TRIALS: u64 = 100;

/// Smallest collective accepted by the indirect interval estimate.
pub const INDIRECT_MIN_TRIALS: u64 = 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error("check requires a random event (some outcome with 0 < p < 1)")]
    NonRandomEvent,
    #[error("outcome `{label}` has degenerate probability {probability}")]
    DegenerateLabel { label: String, probability: f64 },
    #[error("check needs at least {needed} trials, got {given}")]
    TooFewTrials { needed: u64, given: u64 },
    #[error("invalid trial schedule: {0}")]
    InvalidSchedule(String),
    #[error("confidence level {0} is outside (0, 1)")]
    InvalidConfidence(f64),
    #[error("Beta prior parameters must be positive and finite, got a={a}, b={b}")]
    InvalidPrior { a: f64, b: f64 },
    #[error(transparent)]
    Event(#[from] EventError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Which law a report verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckName {
    Tsn,
    Tln,
    Tic,
    Tc,
    Td,
    Indirect,
    Bayes,
}

impl CheckName {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::Tsn => "TSN",
            CheckName::Tln => "TLN",
            CheckName::Tic => "TIC",
            CheckName::Tc => "TC",
            CheckName::Td => "TD",
            CheckName::Indirect => "INDIRECT",
            CheckName::Bayes => "BAYES",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "TSN" => Ok(CheckName::Tsn),
            "TLN" => Ok(CheckName::Tln),
            "TIC" => Ok(CheckName::Tic),
            "TC" => Ok(CheckName::Tc),
            "TD" => Ok(CheckName::Td),
            "INDIRECT" => Ok(CheckName::Indirect),
            "BAYES" => Ok(CheckName::Bayes),
            other => Err(format!("unknown check name `{other}`")),
        }
    }
}

/// Outcome of one check run.
///
/// `passed` is always the check's predicate evaluated on
/// `(statistic, threshold)`: the counting checks (TIC, TD) pass at
/// `statistic <= threshold` with the statistic a violation count, the
/// bound checks (TLN, BAYES) pass at `statistic <= threshold`, and the
/// margin checks (TSN, TC, INDIRECT) pass at `statistic > threshold`
/// (strict) or `statistic >= threshold` (INDIRECT, closed interval).
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: CheckName,
    pub passed: bool,
    pub statistic: f64,
    pub threshold: f64,
    pub n: u64,
    pub seed: u64,
    pub details: BTreeMap<String, f64>,
}

/// Absolute-error trajectory of a long-run frequency toward its model
/// probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    /// `(trial count, |frequency - probability|)` per checkpoint,
    /// strictly increasing in trial count.
    pub checkpoints: Vec<(u64, f64)>,
    /// Four-sigma binomial bound at the final checkpoint.
    pub final_bound: f64,
}

fn interior_probability(event: &EventStructure, label: &str) -> Result<f64, CheckError> {
    let p = event.probability(label)?;
    if p <= 0.0 || p >= 1.0 {
        return Err(CheckError::DegenerateLabel {
            label: label.to_string(),
            probability: p,
        });
    }
    Ok(p)
}

fn require_random(event: &EventStructure) -> Result<(), CheckError> {
    if event.is_random() {
        Ok(())
    } else {
        Err(CheckError::NonRandomEvent)
    }
}

/// Single-number check: one trial only. The relative frequency of every
/// outcome after a single trial is an exact integer, so it can never equal
/// a probability that is strictly between 0 and 1.
pub fn check_tsn(event: &EventStructure, seed: u64) -> Result<CheckReport, CheckError> {
    require_random(event)?;
    let collective = Collective::run(event, 1, seed)?;
    let mut all_integer = true;
    let mut min_gap = f64::INFINITY;
    for index in 0..event.n_outcomes() {
        let f = collective.frequency_at(index);
        all_integer &= f.is_integer();
        let p = event.probability_at(index);
        if p > 0.0 && p < 1.0 {
            min_gap = min_gap.min((f.value() - p).abs());
        }
    }
    let mut details = BTreeMap::new();
    details.insert(
        "realized_index".to_string(),
        collective.records()[0].realized() as f64,
    );
    Ok(CheckReport {
        name: CheckName::Tsn,
        passed: all_integer && min_gap > 0.0,
        statistic: min_gap,
        threshold: 0.0,
        n: 1,
        seed,
        details,
    })
}

/// Long-run frequency check over a schedule of checkpoints. Passes when
/// the final frequency sits within the four-sigma binomial band around
/// the model probability.
pub fn check_tln(
    event: &EventStructure,
    label: &str,
    schedule: &[u64],
    seed: u64,
) -> Result<(CheckReport, ConvergenceTrace), CheckError> {
    validate_schedule(schedule)?;
    interior_probability(event, label)?;
    let collective = Collective::run(event, *schedule.last().unwrap(), seed)?;
    evaluate_tln(&collective, label, schedule)
}

/// Evaluates the long-run predicate on an existing collective against the
/// probability its model claims. Exposed separately so a collective from
/// a different (or deliberately wrong) source can be audited.
pub fn evaluate_tln(
    collective: &Collective,
    label: &str,
    schedule: &[u64],
) -> Result<(CheckReport, ConvergenceTrace), CheckError> {
    validate_schedule(schedule)?;
    let model = collective.model();
    let p = interior_probability(model, label)?;
    let index = model.index_of(label).expect("label validated above");
    let final_n = *schedule.last().unwrap();
    if collective.len() < final_n {
        return Err(CheckError::TooFewTrials {
            needed: final_n,
            given: collective.len(),
        });
    }

    let mut checkpoints = Vec::with_capacity(schedule.len());
    let mut count = 0u64;
    let mut next = 0usize;
    for (i, record) in collective
        .records()
        .iter()
        .take(final_n as usize)
        .enumerate()
    {
        if record.realized() == index {
            count += 1;
        }
        let done = (i + 1) as u64;
        while next < schedule.len() && schedule[next] == done {
            let freq = count as f64 / done as f64;
            checkpoints.push((done, (freq - p).abs()));
            next += 1;
        }
    }

    let final_bound = TLN_SIGMA_FACTOR * (p * (1.0 - p) / final_n as f64).sqrt();
    let (_, final_error) = *checkpoints.last().unwrap();
    let mut details = BTreeMap::new();
    details.insert("probability".to_string(), p);
    details.insert("frequency".to_string(), count as f64 / final_n as f64);
    let report = CheckReport {
        name: CheckName::Tln,
        passed: final_error <= final_bound,
        statistic: final_error,
        threshold: final_bound,
        n: final_n,
        seed: collective.seed(),
        details,
    };
    Ok((
        report,
        ConvergenceTrace {
            checkpoints,
            final_bound,
        },
    ))
}

fn validate_schedule(schedule: &[u64]) -> Result<(), CheckError> {
    if schedule.is_empty() {
        return Err(CheckError::InvalidSchedule("schedule is empty".to_string()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CheckError::InvalidSchedule(
            "checkpoints must strictly increase".to_string(),
        ));
    }
    let final_n = *schedule.last().unwrap();
    if final_n < TLN_MIN_FINAL_TRIALS {
        return Err(CheckError::InvalidSchedule(format!(
            "final checkpoint {final_n} is below the long-run minimum {TLN_MIN_FINAL_TRIALS}"
        )));
    }
    Ok(())
}

/// Initial-conditions check: in a random event, every outcome with
/// interior probability is indeterminate at every tick before delivery,
/// for every trial of the collective — whatever the collective's size.
///
/// Sub-collectives are prefixes here (sub-streams are per-trial), so
/// checking every record of the size-`n` run covers the single-trial and
/// intermediate sizes as well; the sizes audited are recorded in details.
pub fn check_tic(event: &EventStructure, n: u64, seed: u64) -> Result<CheckReport, CheckError> {
    require_random(event)?;
    let collective = Collective::run(event, n, seed)?;
    let mut violations = 0u64;
    for record in collective.records() {
        // the status branch is constant over t < t_omega, so probing the
        // first and last pre-delivery ticks covers the whole interval
        for t in [0, record.t_omega() - 1] {
            for index in 0..event.n_outcomes() {
                let p = event.probability_at(index);
                let status = record.status_at_index(event, index, t);
                let ok = if p > 0.0 && p < 1.0 {
                    status.is_indeterminate()
                } else {
                    status.is_determinate()
                };
                if !ok {
                    violations += 1;
                }
            }
        }
    }
    let mut details = BTreeMap::new();
    details.insert("records_checked".to_string(), collective.len() as f64);
    details.insert("sizes_covered_min".to_string(), 1.0);
    details.insert("sizes_covered_max".to_string(), n as f64);
    Ok(CheckReport {
        name: CheckName::Tic,
        passed: violations == 0,
        statistic: violations as f64,
        threshold: 0.0,
        n,
        seed,
        details,
    })
}

/// Continuity check: after all `n` trials complete, the aggregate
/// frequency of the outcome still lies strictly inside (0, 1) — the
/// long-run event's outcome stays indeterminate.
///
/// For extreme probabilities at small `n` the predicate can be false on a
/// legitimate run (every trial realized the same side); that is reported
/// as `passed: false` with the zero side's count in details, not as an
/// error.
pub fn check_tc(
    event: &EventStructure,
    label: &str,
    n: u64,
    seed: u64,
) -> Result<CheckReport, CheckError> {
    let p = interior_probability(event, label)?;
    if n < TC_MIN_TRIALS {
        return Err(CheckError::TooFewTrials {
            needed: TC_MIN_TRIALS,
            given: n,
        });
    }
    let collective = Collective::run(event, n, seed)?;
    let freq = collective.frequency(label)?;
    let passed = freq.is_interior();
    let f = freq.value();
    let mut details = BTreeMap::new();
    details.insert("count".to_string(), freq.count() as f64);
    details.insert("frequency".to_string(), f);
    details.insert("probability".to_string(), p);
    Ok(CheckReport {
        name: CheckName::Tc,
        passed,
        statistic: f.min(1.0 - f),
        threshold: 0.0,
        n,
        seed,
        details,
    })
}

/// Discontinuity check: every trial's realized outcome is exactly certain
/// from its delivery tick on, every other outcome exactly impossible, and
/// one tick before delivery every interior-probability outcome is still
/// indeterminate.
pub fn check_td(event: &EventStructure, n: u64, seed: u64) -> Result<CheckReport, CheckError> {
    require_random(event)?;
    let collective = Collective::run(event, n, seed)?;
    let mut violations = 0u64;
    for record in collective.records() {
        let t_omega = record.t_omega();
        for index in 0..event.n_outcomes() {
            let at_delivery = record.status_at_index(event, index, t_omega);
            let expected_value = u8::from(index == record.realized());
            if at_delivery.determinate_value() != Some(expected_value) {
                violations += 1;
            }
            let p = event.probability_at(index);
            if p > 0.0 && p < 1.0 {
                let before = record.status_at_index(event, index, t_omega - 1);
                if !before.is_indeterminate() {
                    violations += 1;
                }
            }
        }
    }
    let mut details = BTreeMap::new();
    details.insert("records_checked".to_string(), collective.len() as f64);
    Ok(CheckReport {
        name: CheckName::Td,
        passed: violations == 0,
        statistic: violations as f64,
        threshold: 0.0,
        n,
        seed,
        details,
    })
}

/// Indirect estimate of a single event's probability through its long
/// run: a Wilson score interval from the collective's counts. Passes when
/// the model probability lies inside the interval, which should happen at
/// roughly the confidence rate across seeds.
pub fn indirect_estimate(
    event: &EventStructure,
    label: &str,
    n: u64,
    confidence: f64,
    seed: u64,
) -> Result<((f64, f64), CheckReport), CheckError> {
    let p = interior_probability(event, label)?;
    if n < INDIRECT_MIN_TRIALS {
        return Err(CheckError::TooFewTrials {
            needed: INDIRECT_MIN_TRIALS,
            given: n,
        });
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(CheckError::InvalidConfidence(confidence));
    }
    let collective = Collective::run(event, n, seed)?;
    let freq = collective.frequency(label)?;
    let (lo, hi) = stats::wilson_interval(freq.count(), n, confidence)?;
    let margin = (p - lo).min(hi - p);
    let mut details = BTreeMap::new();
    details.insert("lo".to_string(), lo);
    details.insert("hi".to_string(), hi);
    details.insert("probability".to_string(), p);
    details.insert("frequency".to_string(), freq.value());
    details.insert("confidence".to_string(), confidence);
    let report = CheckReport {
        name: CheckName::Indirect,
        passed: margin >= 0.0,
        statistic: margin,
        threshold: 0.0,
        n,
        seed,
        details,
    };
    Ok(((lo, hi), report))
}

/// Parameters of a Beta distribution, the conjugate prior for a Bernoulli
/// probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self, CheckError> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(CheckError::InvalidPrior { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }
}

/// Conjugate update of a Beta prior with observed Bernoulli counts.
/// Associative over batch splits: updating with two batches equals one
/// update with their sums.
pub fn bayesian_update(prior: BetaParams, successes: u64, failures: u64) -> BetaParams {
    BetaParams {
        a: prior.a + successes as f64,
        b: prior.b + failures as f64,
    }
}

/// Consistency of the Bayesian route with the long-run frequency: the
/// posterior mean from a flat prior must land within the four-sigma band
/// around the model probability (widened by the prior's 2/n pull).
pub fn check_bayes(
    event: &EventStructure,
    label: &str,
    n: u64,
    seed: u64,
) -> Result<CheckReport, CheckError> {
    let p = interior_probability(event, label)?;
    let collective = Collective::run(event, n, seed)?;
    let freq = collective.frequency(label)?;
    let posterior = bayesian_update(
        BetaParams::new(1.0, 1.0).expect("flat prior"),
        freq.count(),
        n - freq.count(),
    );
    let bound = TLN_SIGMA_FACTOR * (p * (1.0 - p) / n as f64).sqrt() + 2.0 / n as f64;
    let gap = (posterior.mean() - p).abs();
    let mut details = BTreeMap::new();
    details.insert("posterior_a".to_string(), posterior.a());
    details.insert("posterior_b".to_string(), posterior.b());
    details.insert("posterior_mean".to_string(), posterior.mean());
    details.insert("probability".to_string(), p);
    Ok(CheckReport {
        name: CheckName::Bayes,
        passed: gap <= bound,
        statistic: gap,
        threshold: bound,
        n,
        seed,
        details,
    })
}
