//! Search space and result types shared by every optimizer.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::CVector;
use crate::error::{Error, Result};
use crate::oracle::{BeamPair, Feedback};

/// One candidate beam pair in optimizer coordinates: transmit amplitudes
/// `beta` in `[0, sqrt(P)]`, transmit phases `theta` in `[-pi, pi)` and RIS
/// phases `phi` in `[0, 2 pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FishPosition {
    pub beta: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

pub fn wrap_phase(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta - two_pi * ((theta + PI) / two_pi).floor();
    if t >= PI {
        t -= two_pi;
    }
    if t < -PI {
        t += two_pi;
    }
    t
}

impl FishPosition {
    /// Uniform draw over the box, then power-normalized.
    pub fn random<R: Rng + ?Sized>(antennas: usize, elements: usize, power: f64, rng: &mut R) -> Self {
        let amp = power.sqrt();
        let beta = (0..antennas).map(|_| rng.random_range(0.0..=amp)).collect();
        let theta = (0..antennas).map(|_| rng.random_range(-PI..PI)).collect();
        let phi = (0..elements).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let mut pos = Self { beta, theta, phi };
        pos.normalize(power);
        pos
    }

    /// Builds a position from a raw complex active beam and raw RIS phases,
    /// then projects and normalizes it.
    pub fn settle(w: &[Complex64], phi: Vec<f64>, power: f64) -> Self {
        let beta = w.iter().map(|x| x.norm()).collect();
        let theta = w.iter().map(|x| x.arg()).collect();
        let mut pos = Self { beta, theta, phi }.project_bounds(power);
        pos.normalize(power);
        pos
    }

    pub fn antennas(&self) -> usize {
        self.beta.len()
    }

    pub fn ris_elements(&self) -> usize {
        self.phi.len()
    }

    /// `w_m = beta_m exp(j theta_m)` without normalization.
    pub fn active(&self) -> CVector {
        self.beta
            .iter()
            .zip(&self.theta)
            .map(|(b, t)| Complex64::from_polar(*b, *t))
            .collect()
    }

    /// Clamps amplitudes to `[0, sqrt(P)]` and RIS phases to `[0, 2 pi]`;
    /// transmit phases are wrapped into `[-pi, pi)`.
    pub fn project_bounds(&self, power: f64) -> Self {
        let upper = power.sqrt();
        Self {
            beta: self.beta.iter().map(|b| b.max(0.0).min(upper)).collect(),
            theta: self.theta.iter().map(|t| wrap_phase(*t)).collect(),
            phi: self.phi.iter().map(|p| p.clamp(0.0, 2.0 * PI)).collect(),
        }
    }

    /// Rescales `beta` so that `sum beta^2 = P`. An all-zero amplitude vector
    /// becomes uniform `sqrt(P / M)`.
    pub fn normalize(&mut self, power: f64) {
        let norm_sq: f64 = self.beta.iter().map(|b| b * b).sum();
        if norm_sq > 0.0 && norm_sq.is_finite() {
            let scale = (power / norm_sq).sqrt();
            let upper = power.sqrt();
            // rounding can push a lone amplitude a hair above sqrt(P)
            self.beta.iter_mut().for_each(|b| *b = (*b * scale).min(upper));
        } else {
            let uniform = (power / self.beta.len() as f64).sqrt();
            self.beta.iter_mut().for_each(|b| *b = uniform);
        }
    }

    /// Maps the position to a beam pair with `||w||^2 = P` and unit-modulus
    /// RIS coefficients.
    pub fn decode(&self, power: f64) -> BeamPair {
        let mut pos = self.clone();
        pos.normalize(power);
        BeamPair {
            w: pos.active(),
            xi: self.phi.iter().map(|p| Complex64::from_polar(1.0, *p)).collect(),
        }
    }

    pub fn in_bounds(&self, power: f64) -> bool {
        let upper = power.sqrt();
        self.beta.iter().all(|b| (0.0..=upper).contains(b))
            && self.theta.iter().all(|t| (-PI..PI).contains(t))
            && self.phi.iter().all(|p| (0.0..=2.0 * PI).contains(p))
    }
}

/// The closed user-power window `[eta_min, eta_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerWindow {
    pub eta_min: f64,
    pub eta_max: f64,
}

impl PowerWindow {
    pub fn new(eta_min: f64, eta_max: f64) -> Result<Self> {
        if eta_min.is_nan() || eta_min < 0.0 || eta_max.is_nan() || eta_min > eta_max {
            return Err(Error::validation(
                "eta_min/eta_max",
                format!("need 0 <= eta_min <= eta_max, got eta_min = {eta_min}, eta_max = {eta_max}"),
            ));
        }
        Ok(Self { eta_min, eta_max })
    }

    pub fn unconstrained() -> Self {
        Self {
            eta_min: 0.0,
            eta_max: f64::INFINITY,
        }
    }

    pub fn contains(&self, power: f64) -> bool {
        (self.eta_min..=self.eta_max).contains(&power)
    }

    /// Distance from `power` to the window, zero inside.
    pub fn violation(&self, power: f64) -> f64 {
        if power < self.eta_min {
            self.eta_min - power
        } else if power > self.eta_max {
            power - self.eta_max
        } else {
            0.0
        }
    }
}

/// Fitness `F` (echo power) and communication power `f` of a position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    pub comm_power: f64,
}

/// Measures `F` then `f`: one echo and one user query.
pub fn evaluate<O: Feedback + ?Sized>(oracle: &mut O, pos: &FishPosition) -> Result<Evaluation> {
    let beam = pos.decode(oracle.transmit_power());
    let fitness = oracle.measure_echo_power(&beam)?;
    let comm_power = oracle.measure_user_power(&beam)?;
    Ok(Evaluation { fitness, comm_power })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    A,
    B,
    C,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseLabel::A => "A",
            CaseLabel::B => "B",
            CaseLabel::C => "C",
        };
        f.write_str(s)
    }
}

/// One sub-block (or iteration) of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub global_fitness: f64,
    pub feasible_count: usize,
    /// Feasibility case that drove this sub-block; `None` for initialization
    /// and for the baseline optimizers.
    pub case: Option<CaseLabel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingResult {
    pub best_beam: BeamPair,
    pub best_position: FishPosition,
    /// Fitness recorded for `best_position`, `-inf` if nothing feasible was
    /// ever observed.
    pub best_fitness: f64,
    pub never_feasible: bool,
    pub trace: Vec<TraceRecord>,
    pub echo_evals: u64,
    pub user_evals: u64,
}

impl TrainingResult {
    /// Smallest 1-based iteration whose global fitness reaches 95% of the
    /// final value. Runs that never found a feasible point report the trace
    /// length.
    pub fn iterations_to_95(&self) -> usize {
        let Some(last) = self.trace.last() else {
            return 0;
        };
        if !last.global_fitness.is_finite() {
            return self.trace.len();
        }
        let threshold = 0.95 * last.global_fitness;
        self.trace
            .iter()
            .position(|r| r.global_fitness >= threshold)
            .map_or(self.trace.len(), |i| i + 1)
    }
}
