//! Stochastic event simulation over a structural event model.
//!
//! An event is a triad of initial conditions, a categorical sampling
//! kernel, and a finite outcome space. Outcomes carry a status at every
//! tick of an abstract timeline: *indeterminate* while the probability is
//! strictly between 0 and 1, *determinate* once it is exactly 0 or 1.
//! On top of that model the crate provides:
//!
//! - seeded, reproducible trial sequences ([`Collective`]) with per-trial
//!   sub-streams (ChaCha8, one stream per trial index);
//! - pass/fail checks of the frequency laws that govern single trials and
//!   long runs ([`checks`]);
//! - the urn and roulette fixtures with exact rational probabilities
//!   ([`classical`]);
//! - a two-slit interference sampler: Fraunhofer intensity profiles,
//!   single-photon wavelet collapse, weak and intense beams ([`twoslit`]);
//! - chi-square / Kolmogorov-Smirnov / Wilson-interval statistics
//!   ([`stats`]).

pub mod checks;
pub mod classical;
pub mod event;
pub mod stats;
pub mod twoslit;

pub use checks::{
    bayesian_update, check_bayes, check_tc, check_td, check_tic, check_tln, check_tsn,
    evaluate_tln, indirect_estimate, BetaParams, CheckError, CheckName, CheckReport,
    ConvergenceTrace,
};
pub use event::{
    make_event, Collective, Conditions, EventError, EventStructure, Frequency, OutcomeStatus,
    TrialRecord, TrialStream,
};
pub use stats::{
    chi_square_gof, ks_distance, peak_spacing, wilson_interval, GofResult, StatsError,
};
pub use twoslit::{
    free_flight_event, fringe_spacing, intensity_profile, run_intense_beam, run_weak_beam,
    DetectionPattern, FringeSpacing, ParticleHit, SlitGeometry, SlitMode, TwoslitError,
    WaveProfile, WeakBeamRun,
};
