//! Comparison optimizers over the same search space and feedback interface.
//!
//! Both work on the real embedding `[Re w, Im w, phi]` of a
//! [`FishPosition`] and handle the user-power window with the feasibility
//! rule: feasible beats infeasible, two feasible compare by echo power, two
//! infeasible compare by distance to the window.

mod aco;
mod pso;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use aco::{run_aco, AcoParams};
pub use pso::{run_pso, PsoParams};

use crate::error::Result;
use crate::oracle::Feedback;
use crate::search::{self, Evaluation, FishPosition, PowerWindow, TraceRecord, TrainingResult};

pub(crate) fn dimension(antennas: usize, elements: usize) -> usize {
    2 * antennas + elements
}

pub(crate) fn to_vector(pos: &FishPosition) -> Vec<f64> {
    let w = pos.active();
    w.iter()
        .map(|x| x.re)
        .chain(w.iter().map(|x| x.im))
        .chain(pos.phi.iter().copied())
        .collect()
}

pub(crate) fn from_vector(x: &[f64], antennas: usize, power: f64) -> FishPosition {
    let (re, rest) = x.split_at(antennas);
    let (im, phi) = rest.split_at(antennas);
    let w: Vec<Complex64> = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
    FishPosition::settle(&w, phi.to_vec(), power)
}

/// Per-coordinate `(lower, upper)` of the embedding.
pub(crate) fn bounds(antennas: usize, elements: usize, power: f64) -> Vec<(f64, f64)> {
    let amp = power.sqrt();
    std::iter::repeat_n((-amp, amp), 2 * antennas)
        .chain(std::iter::repeat_n((0.0, 2.0 * PI), elements))
        .collect()
}

/// An evaluated candidate.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Scored {
    pub position: FishPosition,
    pub x: Vec<f64>,
    pub eval: Evaluation,
    pub feasible: bool,
}

impl Scored {
    pub fn measure<O: Feedback + ?Sized>(oracle: &mut O, position: FishPosition, window: &PowerWindow) -> Result<Self> {
        let eval = search::evaluate(oracle, &position)?;
        Ok(Self {
            x: to_vector(&position),
            feasible: window.contains(eval.comm_power),
            position,
            eval,
        })
    }

    /// Strictly better under the feasibility rule.
    pub fn beats(&self, other: &Scored, window: &PowerWindow) -> bool {
        match (self.feasible, other.feasible) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => self.eval.fitness > other.eval.fitness,
            (false, false) => window.violation(self.eval.comm_power) < window.violation(other.eval.comm_power),
        }
    }

    /// Fitness as reported in traces: `-inf` while infeasible.
    pub fn reported_fitness(&self) -> f64 {
        if self.feasible {
            self.eval.fitness
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Ordering for sorting best-first.
pub(crate) fn rank(a: &Scored, b: &Scored, window: &PowerWindow) -> std::cmp::Ordering {
    if a.beats(b, window) {
        std::cmp::Ordering::Less
    } else if b.beats(a, window) {
        std::cmp::Ordering::Greater
    } else {
        std::cmp::Ordering::Equal
    }
}

/// Evaluation budget bookkeeping shared by both baselines.
pub(crate) struct Budget {
    start: u64,
    limit: Option<u64>,
}

impl Budget {
    pub fn new<O: Feedback + ?Sized>(oracle: &O, limit: Option<u64>) -> Self {
        Self {
            start: oracle.echo_evals(),
            limit,
        }
    }

    pub fn used<O: Feedback + ?Sized>(&self, oracle: &O) -> u64 {
        oracle.echo_evals() - self.start
    }

    /// Whether a batch of `batch` more evaluations fits.
    pub fn allows<O: Feedback + ?Sized>(&self, oracle: &O, batch: u64) -> bool {
        self.limit.is_none_or(|l| self.used(oracle) + batch <= l)
    }
}

pub(crate) fn trace_record(best: &Scored, population: &[Scored]) -> TraceRecord {
    TraceRecord {
        global_fitness: best.reported_fitness(),
        feasible_count: population.iter().filter(|s| s.feasible).count(),
        case: None,
    }
}

pub(crate) fn finish<O: Feedback + ?Sized>(
    oracle: &O,
    best: Scored,
    trace: Vec<TraceRecord>,
    evals_at_start: (u64, u64),
) -> TrainingResult {
    TrainingResult {
        best_beam: best.position.decode(oracle.transmit_power()),
        best_fitness: best.reported_fitness(),
        never_feasible: !best.feasible,
        best_position: best.position,
        trace,
        echo_evals: oracle.echo_evals() - evals_at_start.0,
        user_evals: oracle.user_evals() - evals_at_start.1,
    }
}
