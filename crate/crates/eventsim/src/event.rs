//! The structural event model: initial conditions, a categorical sampling
//! kernel over a finite outcome space, outcome statuses on an integer
//! timeline, and seeded trial sequences (collectives).
//!
//! Time is abstract. Trial `i` runs through ticks `[0, i + 1)` and delivers
//! its outcome at `t_omega = i + 1`, so every trial has a non-empty
//! pre-delivery interval. Before `t_omega` a random outcome is
//! *indeterminate* (probability strictly inside (0, 1)); from `t_omega` on
//! it is *determinate*: probability exactly 1 for the realized outcome and
//! exactly 0 for every other.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Tolerance on the sum of user-supplied probabilities.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EventError {
    #[error("outcome space is empty")]
    EmptyOutcomeSpace,
    #[error("duplicate outcome label `{0}`")]
    DuplicateLabel(String),
    #[error("probability {value} for outcome `{label}` is negative")]
    NegativeProbability { label: String, value: f64 },
    #[error("probability {value} for outcome `{label}` is not a finite value in [0, 1]")]
    InvalidProbability { label: String, value: f64 },
    #[error("probabilities sum to {0}, expected 1 within 1e-12")]
    ProbabilitySumMismatch(f64),
    #[error("a collective needs at least one trial")]
    ZeroTrials,
    #[error("unknown outcome label `{0}`")]
    UnknownLabel(String),
    #[error("trial record {index} is inconsistent: {reason}")]
    BadRecord { index: usize, reason: String },
}

/// Initial conditions of an event: an opaque label plus named parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditions {
    pub label: String,
    pub params: BTreeMap<String, f64>,
}

impl Conditions {
    pub fn labeled(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: impl Into<String>, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }
}

/// Status of an outcome at a given tick.
///
/// `Certain` and `Impossible` are the two determinate statuses; they carry
/// the exact integer probabilities 1 and 0 and are never produced by
/// thresholding a float. `Indeterminate` carries a probability strictly
/// inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutcomeStatus {
    Certain,
    Impossible,
    Indeterminate(f64),
}

impl OutcomeStatus {
    /// Maps a model probability to its status. Exact 0 and 1 become the
    /// determinate statuses; anything strictly between is indeterminate.
    pub fn from_probability(p: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
        if p == 0.0 {
            OutcomeStatus::Impossible
        } else if p == 1.0 {
            OutcomeStatus::Certain
        } else {
            OutcomeStatus::Indeterminate(p)
        }
    }

    pub fn is_determinate(&self) -> bool {
        matches!(self, OutcomeStatus::Certain | OutcomeStatus::Impossible)
    }

    pub fn is_indeterminate(&self) -> bool {
        !self.is_determinate()
    }

    /// The exact integer carried by a determinate status.
    pub fn determinate_value(&self) -> Option<u8> {
        match self {
            OutcomeStatus::Certain => Some(1),
            OutcomeStatus::Impossible => Some(0),
            OutcomeStatus::Indeterminate(_) => None,
        }
    }

    /// Probability view of the status: 1, 0, or the interior value.
    pub fn probability(&self) -> f64 {
        match self {
            OutcomeStatus::Certain => 1.0,
            OutcomeStatus::Impossible => 0.0,
            OutcomeStatus::Indeterminate(p) => *p,
        }
    }
}

impl fmt::Display for OutcomeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutcomeStatus::Certain => write!(f, "determinate(1)"),
            OutcomeStatus::Impossible => write!(f, "determinate(0)"),
            OutcomeStatus::Indeterminate(p) => write!(f, "indeterminate({p})"),
        }
    }
}

/// A validated event model: initial conditions `alpha`, a categorical
/// kernel `rho` assigning a probability to each outcome, and the finite
/// outcome space itself. Outcome order is the construction order and is
/// part of the model identity (it fixes the sampling map).
#[derive(Debug, Clone, PartialEq)]
pub struct EventStructure {
    conditions: Conditions,
    outcomes: Vec<String>,
    probabilities: Vec<f64>,
    cdf: Vec<f64>,
}

impl EventStructure {
    /// Builds a validated event from `(label, probability)` pairs.
    ///
    /// Labels must be distinct, probabilities finite, non-negative, at most
    /// one, and summing to 1 within [`PROBABILITY_SUM_TOLERANCE`]. Models
    /// where some label has probability exactly 1 are allowed; they are
    /// non-random (see [`EventStructure::is_random`]).
    pub fn new(
        conditions: Conditions,
        probabilities: impl IntoIterator<Item = (String, f64)>,
    ) -> Result<Self, EventError> {
        let pairs: Vec<(String, f64)> = probabilities.into_iter().collect();
        if pairs.is_empty() {
            return Err(EventError::EmptyOutcomeSpace);
        }
        let mut seen = std::collections::BTreeSet::new();
        for (label, p) in &pairs {
            if !seen.insert(label.as_str()) {
                return Err(EventError::DuplicateLabel(label.clone()));
            }
            if !p.is_finite() {
                return Err(EventError::InvalidProbability {
                    label: label.clone(),
                    value: *p,
                });
            }
            if *p < 0.0 {
                return Err(EventError::NegativeProbability {
                    label: label.clone(),
                    value: *p,
                });
            }
            if *p > 1.0 {
                return Err(EventError::InvalidProbability {
                    label: label.clone(),
                    value: *p,
                });
            }
        }
        let sum: f64 = pairs.iter().map(|(_, p)| p).sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(EventError::ProbabilitySumMismatch(sum));
        }
        let (outcomes, probabilities): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let cdf = cumulative(&probabilities);
        Ok(Self {
            conditions,
            outcomes,
            probabilities,
            cdf,
        })
    }

    pub fn conditions(&self) -> &Conditions {
        &self.conditions
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn n_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|l| l == label)
    }

    pub fn probability(&self, label: &str) -> Result<f64, EventError> {
        self.index_of(label)
            .map(|i| self.probabilities[i])
            .ok_or_else(|| EventError::UnknownLabel(label.to_string()))
    }

    pub fn probability_at(&self, index: usize) -> f64 {
        self.probabilities[index]
    }

    /// An event is random when no outcome has probability exactly 1.
    pub fn is_random(&self) -> bool {
        !self.probabilities.contains(&1.0)
    }

    /// Draws one trial. The draw is a pure function of
    /// `(stream seed, trial_index)`; trial order never changes a result.
    pub fn sample_trial(&self, stream: &TrialStream, trial_index: u64) -> TrialRecord {
        let u = stream.uniform(trial_index);
        let realized = sample_index(&self.cdf, u);
        let status_before = if self.is_random() {
            // The realized label of a random event always has 0 < p < 1.
            OutcomeStatus::Indeterminate(self.probabilities[realized])
        } else {
            OutcomeStatus::Certain
        };
        TrialRecord {
            trial_index,
            t_omega: trial_index + 1,
            realized,
            status_before,
            status_after: OutcomeStatus::Certain,
        }
    }

    /// Internal constructor for callers that already hold a validated
    /// distribution and its cumulative table. Sharing the table keeps a
    /// profile-backed event bit-identical to the profile's own sampler.
    pub(crate) fn from_validated_parts(
        conditions: Conditions,
        outcomes: Vec<String>,
        probabilities: Vec<f64>,
        cdf: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(outcomes.len(), probabilities.len());
        debug_assert_eq!(outcomes.len(), cdf.len());
        debug_assert!(!outcomes.is_empty());
        debug_assert!((probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        Self {
            conditions,
            outcomes,
            probabilities,
            cdf,
        }
    }
}

/// Convenience constructor mirroring the library's usual entry point:
/// an event from initial conditions and a label → probability map.
pub fn make_event(
    conditions: Conditions,
    probabilities: impl IntoIterator<Item = (String, f64)>,
) -> Result<EventStructure, EventError> {
    EventStructure::new(conditions, probabilities)
}

/// Cumulative distribution over bins; the final entry is pinned to exactly
/// 1.0 so every draw in [0, 1) lands inside the table.
pub(crate) fn cumulative(probabilities: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = probabilities
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    cdf
}

/// Inverse-CDF lookup: the first index whose cumulative mass exceeds `u`.
/// Zero-width (probability 0) bins are never selected.
pub(crate) fn sample_index(cdf: &[f64], u: f64) -> usize {
    let idx = cdf.partition_point(|&c| c <= u);
    idx.min(cdf.len() - 1)
}

/// A seeded random stream with per-trial sub-streams.
///
/// The generator is ChaCha8 (`rand_chacha`): the 64-bit seed keys the
/// cipher and the trial index selects one of its 2^64 independent streams,
/// so trial `i`'s draw depends only on `(seed, i)`. This is what makes
/// collectives order-stable and reproducible across platforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialStream {
    seed: u64,
}

impl TrialStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in [0, 1) for one trial, 53-bit resolution.
    pub fn uniform(&self, trial_index: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial_index);
        rng.random()
    }
}

/// One completed trial: which outcome was realized and when its status
/// switched from indeterminate to determinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    trial_index: u64,
    t_omega: u64,
    realized: usize,
    status_before: OutcomeStatus,
    status_after: OutcomeStatus,
}

impl TrialRecord {
    pub fn trial_index(&self) -> u64 {
        self.trial_index
    }

    /// Delivery tick: the first tick at which the outcome is determinate.
    pub fn t_omega(&self) -> u64 {
        self.t_omega
    }

    /// Index of the realized outcome in the model's outcome space.
    pub fn realized(&self) -> usize {
        self.realized
    }

    /// Status of the realized outcome through the pre-delivery interval.
    pub fn status_before(&self) -> OutcomeStatus {
        self.status_before
    }

    /// Status of the realized outcome from `t_omega` on.
    pub fn status_after(&self) -> OutcomeStatus {
        self.status_after
    }

    /// Status of `label` at tick `t`.
    ///
    /// Before `t_omega` the status comes from the model probability of the
    /// queried label; from `t_omega` on it is `Certain` for the realized
    /// label and `Impossible` for every other.
    pub fn status_at(
        &self,
        model: &EventStructure,
        label: &str,
        t: u64,
    ) -> Result<OutcomeStatus, EventError> {
        let index = model
            .index_of(label)
            .ok_or_else(|| EventError::UnknownLabel(label.to_string()))?;
        Ok(self.status_at_index(model, index, t))
    }

    /// Index-addressed variant of [`TrialRecord::status_at`] for hot loops.
    pub fn status_at_index(&self, model: &EventStructure, index: usize, t: u64) -> OutcomeStatus {
        if t >= self.t_omega {
            if index == self.realized {
                OutcomeStatus::Certain
            } else {
                OutcomeStatus::Impossible
            }
        } else {
            OutcomeStatus::from_probability(model.probability_at(index))
        }
    }
}

/// Exact relative frequency of an outcome in a collective: the rational
/// `count / trials` plus its floating approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frequency {
    count: u64,
    trials: u64,
}

impl Frequency {
    pub fn new(count: u64, trials: u64) -> Self {
        assert!(trials > 0, "frequency over zero trials");
        assert!(count <= trials, "count exceeds trial total");
        Self { count, trials }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    /// The exact rational value.
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.count, self.trials)
    }

    /// Floating approximation of the rational value.
    pub fn value(&self) -> f64 {
        self.count as f64 / self.trials as f64
    }

    /// True when the frequency is exactly 0 or exactly 1.
    pub fn is_integer(&self) -> bool {
        self.count == 0 || self.count == self.trials
    }

    /// True when the frequency lies strictly inside (0, 1).
    pub fn is_interior(&self) -> bool {
        !self.is_integer()
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.count, self.trials)
    }
}

/// An ordered sequence of i.i.d. trials of one event model.
#[derive(Debug, Clone, PartialEq)]
pub struct Collective {
    model: EventStructure,
    records: Vec<TrialRecord>,
    seed: u64,
}

impl Collective {
    /// Runs `n` trials with independent per-trial sub-streams derived from
    /// `seed`. The result is bit-identical across runs and platforms.
    pub fn run(model: &EventStructure, n: u64, seed: u64) -> Result<Self, EventError> {
        if n == 0 {
            return Err(EventError::ZeroTrials);
        }
        let stream = TrialStream::new(seed);
        let records = (0..n).map(|i| model.sample_trial(&stream, i)).collect();
        Ok(Self {
            model: model.clone(),
            records,
            seed,
        })
    }

    /// Assembles a collective from externally built records. Intended for
    /// diagnostics and fault injection; the caller vouches that the records
    /// were drawn i.i.d. from the claimed model.
    pub fn from_records(
        model: EventStructure,
        records: Vec<TrialRecord>,
        seed: u64,
    ) -> Result<Self, EventError> {
        if records.is_empty() {
            return Err(EventError::ZeroTrials);
        }
        for (index, record) in records.iter().enumerate() {
            if record.realized >= model.n_outcomes() {
                return Err(EventError::BadRecord {
                    index,
                    reason: format!("realized index {} out of range", record.realized),
                });
            }
            if record.t_omega <= record.trial_index {
                return Err(EventError::BadRecord {
                    index,
                    reason: "t_omega must follow the trial start".to_string(),
                });
            }
        }
        Ok(Self {
            model,
            records,
            seed,
        })
    }

    /// Builds a synthetic collective whose trial `i` realized
    /// `realized[i]`. Statuses are filled in the same way as sampled
    /// trials. Useful for injecting a stream that contradicts the model.
    pub fn synthetic(
        model: EventStructure,
        realized: &[usize],
        seed: u64,
    ) -> Result<Self, EventError> {
        let records = realized
            .iter()
            .enumerate()
            .map(|(i, &r)| TrialRecord {
                trial_index: i as u64,
                t_omega: i as u64 + 1,
                realized: r,
                status_before: OutcomeStatus::Indeterminate(0.5),
                status_after: OutcomeStatus::Certain,
            })
            .collect();
        Self::from_records(model, records, seed)
    }

    pub fn model(&self) -> &EventStructure {
        &self.model
    }

    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> u64 {
        self.records.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Count of trials that realized the outcome at `index`.
    pub fn count_at(&self, index: usize) -> u64 {
        self.records.iter().filter(|r| r.realized == index).count() as u64
    }

    /// Per-outcome realized counts, in outcome order.
    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.model.n_outcomes()];
        for record in &self.records {
            counts[record.realized] += 1;
        }
        counts
    }

    pub fn frequency(&self, label: &str) -> Result<Frequency, EventError> {
        let index = self
            .model
            .index_of(label)
            .ok_or_else(|| EventError::UnknownLabel(label.to_string()))?;
        Ok(self.frequency_at(index))
    }

    pub fn frequency_at(&self, index: usize) -> Frequency {
        Frequency::new(self.count_at(index), self.len())
    }

    /// Status of `label` at tick `t` in the record at `record_index`.
    pub fn status_at(
        &self,
        record_index: usize,
        label: &str,
        t: u64,
    ) -> Result<OutcomeStatus, EventError> {
        self.records[record_index].status_at(&self.model, label, t)
    }

    /// A prefix of this collective is itself a collective of the same
    /// model and seed (sub-streams are per-trial, not sequential).
    pub fn prefix(&self, n: u64) -> Result<Self, EventError> {
        if n == 0 {
            return Err(EventError::ZeroTrials);
        }
        let n = (n as usize).min(self.records.len());
        Ok(Self {
            model: self.model.clone(),
            records: self.records[..n].to_vec(),
            seed: self.seed,
        })
    }
}
