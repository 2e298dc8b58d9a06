//! Concrete event models with exact rational probabilities: the
//! red/white ball urn and the 37-cell roulette wheel with its angular
//! spatial-probability profile.

use num_rational::Ratio;
use thiserror::Error;

use crate::event::{
    Collective, Conditions, EventError, EventStructure, OutcomeStatus, TrialRecord, TrialStream,
};

/// Number of cells on the wheel.
pub const ROULETTE_CELLS: u32 = 37;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("urn must contain at least one ball")]
    EmptyUrn,
    #[error("angle {0} is outside [0, 360)")]
    AngleOutOfRange(f64),
}

/// An urn of red and white balls; drawing one ball is the event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UrnModel {
    reds: u64,
    whites: u64,
}

impl UrnModel {
    pub fn new(reds: u64, whites: u64) -> Result<Self, ModelError> {
        if reds + whites == 0 {
            return Err(ModelError::EmptyUrn);
        }
        Ok(Self { reds, whites })
    }

    pub fn reds(&self) -> u64 {
        self.reds
    }

    pub fn whites(&self) -> u64 {
        self.whites
    }

    /// Exact probability of drawing red: `reds / (reds + whites)`.
    pub fn p_red(&self) -> Ratio<u64> {
        Ratio::new(self.reds, self.reds + self.whites)
    }

    pub fn p_white(&self) -> Ratio<u64> {
        Ratio::new(self.whites, self.reds + self.whites)
    }

    /// The two-outcome event `{red, white}` with the urn's probabilities.
    pub fn event(&self) -> EventStructure {
        let total = (self.reds + self.whites) as f64;
        let conditions = Conditions::labeled("urn")
            .with_param("reds", self.reds as f64)
            .with_param("whites", self.whites as f64);
        EventStructure::new(
            conditions,
            [
                ("red".to_string(), self.reds as f64 / total),
                ("white".to_string(), self.whites as f64 / total),
            ],
        )
        .expect("urn probabilities are valid by construction")
    }
}

/// Event for drawing from an urn with the given ball counts.
pub fn urn_event(reds: u64, whites: u64) -> Result<EventStructure, ModelError> {
    Ok(UrnModel::new(reds, whites)?.event())
}

/// Width of one roulette cell in degrees, exactly 360/37.
pub fn roulette_cell_width_deg() -> Ratio<u64> {
    Ratio::new(360, ROULETTE_CELLS as u64)
}

/// Exact spatial probability of any single cell while the wheel rotates.
pub fn roulette_cell_probability() -> Ratio<u64> {
    Ratio::new(1, ROULETTE_CELLS as u64)
}

/// Maps an angular position to its cell index.
///
/// Cells are half-open: cell `n` covers `[n * 360/37, (n+1) * 360/37)`,
/// so every angle in `[0, 360)` belongs to exactly one cell.
pub fn roulette_cell(angle_deg: f64) -> Result<u32, ModelError> {
    if !(0.0..360.0).contains(&angle_deg) {
        return Err(ModelError::AngleOutOfRange(angle_deg));
    }
    let cell = (angle_deg * ROULETTE_CELLS as f64 / 360.0).floor() as u32;
    Ok(cell.min(ROULETTE_CELLS - 1))
}

/// The 37-outcome event with every cell equally likely.
pub fn roulette_event() -> EventStructure {
    let p = 1.0 / ROULETTE_CELLS as f64;
    let conditions =
        Conditions::labeled("roulette_wheel").with_param("cells", ROULETTE_CELLS as f64);
    EventStructure::new(conditions, (0..ROULETTE_CELLS).map(|n| (n.to_string(), p)))
        .expect("roulette probabilities are valid by construction")
}

/// Phase of the wheel at some tick: still rotating, or stopped on a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoulettePhase {
    Rotating,
    Stopped(u32),
}

/// One spin of the wheel as a timeline: `Rotating` through the
/// pre-delivery interval, `Stopped` on the sampled cell from `t_omega` on.
#[derive(Debug, Clone, PartialEq)]
pub struct RouletteSpin {
    event: EventStructure,
    record: TrialRecord,
}

impl RouletteSpin {
    pub fn record(&self) -> &TrialRecord {
        &self.record
    }

    pub fn event(&self) -> &EventStructure {
        &self.event
    }

    pub fn t_omega(&self) -> u64 {
        self.record.t_omega()
    }

    pub fn stopped_cell(&self) -> u32 {
        self.record.realized() as u32
    }

    pub fn phase_at(&self, t: u64) -> RoulettePhase {
        if t >= self.record.t_omega() {
            RoulettePhase::Stopped(self.stopped_cell())
        } else {
            RoulettePhase::Rotating
        }
    }

    /// Spatial-probability status of one cell at tick `t`: indeterminate
    /// at 1/37 while rotating, then exactly 1 for the stopped cell and
    /// exactly 0 for the rest.
    pub fn cell_status_at(&self, cell: u32, t: u64) -> OutcomeStatus {
        self.record.status_at_index(&self.event, cell as usize, t)
    }
}

/// Spins the wheel once. The stopped cell is sampled uniformly; the
/// wheel's deceleration is not modeled, only the probability profile.
pub fn spin(seed: u64) -> RouletteSpin {
    let event = roulette_event();
    let record = event.sample_trial(&TrialStream::new(seed), 0);
    RouletteSpin { event, record }
}

/// A collective of spins (each spin is one trial of the wheel event).
pub fn spin_collective(n: u64, seed: u64) -> Result<Collective, EventError> {
    Collective::run(&roulette_event(), n, seed)
}
