use num_complex::Complex64;
use rand::Rng;

use super::{Afsa, SwarmState};
use crate::channel::CVector;
use crate::error::Result;
use crate::oracle::Feedback;
use crate::search::FishPosition;

/// A new position together with its measured fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Moved {
    pub position: FishPosition,
    pub fitness: f64,
}

/// Outcome of clustering or rear-chasing.
#[derive(Debug, Clone, PartialEq)]
pub enum Behavior {
    Moved(Moved),
    /// No partners, or the crowding test failed; the caller forages instead.
    NoImprovement,
}

/// `(active, passive)` distance: Euclidean norm of the complex beam
/// difference and of the raw RIS phase difference (no wrap-around).
pub fn distance(a: &FishPosition, b: &FishPosition) -> (f64, f64) {
    let active = a
        .active()
        .iter()
        .zip(b.active())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let passive = a
        .phi
        .iter()
        .zip(&b.phi)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    (active, passive)
}

fn norm_c(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn norm_r(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl<O: Feedback + ?Sized> Afsa<'_, O> {
    /// Uniform in `(-1, 1)`.
    fn rand_sym(&mut self) -> f64 {
        self.rng.random_range(-1.0..1.0)
    }

    /// Uniform in `[0, 1)`.
    fn rand_unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    fn perturb_active(&mut self, w: &[Complex64]) -> CVector {
        let scale = self.params.vision_active / self.params.correction_active;
        w.iter()
            .map(|x| {
                let re = self.rand_sym();
                let im = self.rand_sym();
                x + Complex64::new(re, im) * scale
            })
            .collect()
    }

    fn perturb_passive(&mut self, phi: &[f64]) -> Vec<f64> {
        let scale = self.params.vision_passive / self.params.correction_passive;
        phi.iter().map(|p| p + self.rand_sym() * scale).collect()
    }

    /// Visual-range perturbation of both parts, before projection.
    fn perturb(&mut self, pos: &FishPosition) -> FishPosition {
        let w = self.perturb_active(&pos.active());
        let phi = self.perturb_passive(&pos.phi);
        FishPosition::settle(&w, phi, self.power)
    }

    /// Step of length `chi r` from `pos` toward `target`, each part on its own.
    /// A part that already coincides with the target takes a random move.
    pub(crate) fn move_towards(&mut self, pos: &FishPosition, target: &FishPosition) -> FishPosition {
        let r1 = self.rand_unit();
        let r2 = self.rand_unit();

        let from = pos.active();
        let diff: CVector = target.active().iter().zip(&from).map(|(t, f)| t - f).collect();
        let len = norm_c(&diff);
        let w = if len > 0.0 {
            let scale = self.params.step_active * r1 / len;
            from.iter().zip(&diff).map(|(f, d)| f + d * scale).collect()
        } else {
            self.perturb_active(&from)
        };

        let diff: Vec<f64> = target.phi.iter().zip(&pos.phi).map(|(t, f)| t - f).collect();
        let len = norm_r(&diff);
        let phi = if len > 0.0 {
            let scale = self.params.step_passive * r2 / len;
            pos.phi.iter().zip(&diff).map(|(f, d)| f + d * scale).collect()
        } else {
            self.perturb_passive(&pos.phi)
        };

        FishPosition::settle(&w, phi, self.power)
    }

    pub(super) fn fitness_of(&mut self, pos: &FishPosition) -> Result<f64> {
        let beam = pos.decode(self.power);
        self.oracle.measure_echo_power(&beam)
    }

    /// Up to `T_max` visual probes; the first one that beats the current
    /// fitness is stepped toward. Otherwise a random move is taken.
    pub fn foraging(&mut self, state: &SwarmState, i: usize) -> Result<Moved> {
        let current = &state.positions[i];
        let current_fitness = state.fitness[i];
        for _ in 0..self.params.max_forage_tries {
            let visual = self.perturb(current);
            if self.fitness_of(&visual)? > current_fitness {
                let position = self.move_towards(current, &visual);
                let fitness = self.fitness_of(&position)?;
                return Ok(Moved { position, fitness });
            }
        }
        let position = self.perturb(current);
        let fitness = self.fitness_of(&position)?;
        Ok(Moved { position, fitness })
    }

    /// Fish in `pool` other than `i` within both visions.
    pub fn partners(&self, state: &SwarmState, i: usize, pool: &[usize]) -> Vec<usize> {
        pool.iter()
            .copied()
            .filter(|&j| j != i)
            .filter(|&j| {
                let (da, dp) = distance(&state.positions[i], &state.positions[j]);
                da < self.params.vision_active && dp < self.params.vision_passive
            })
            .collect()
    }

    /// Moves toward the partners' center when `F(center) / n_f > delta F(i)`.
    pub fn clustering(&mut self, state: &SwarmState, i: usize, pool: &[usize]) -> Result<Behavior> {
        let partners = self.partners(state, i, pool);
        if partners.is_empty() {
            return Ok(Behavior::NoImprovement);
        }
        let count = partners.len() as f64;
        let m = state.positions[i].antennas();
        let mut w = vec![Complex64::new(0.0, 0.0); m];
        let mut phi = vec![0.0; state.positions[i].ris_elements()];
        for &j in &partners {
            for (acc, x) in w.iter_mut().zip(state.positions[j].active()) {
                *acc += x / count;
            }
            for (acc, p) in phi.iter_mut().zip(&state.positions[j].phi) {
                *acc += p / count;
            }
        }
        let center = FishPosition::settle(&w, phi, self.power);
        let center_fitness = self.fitness_of(&center)?;
        if center_fitness / count > self.params.crowding * state.fitness[i] {
            let position = self.move_towards(&state.positions[i], &center);
            let fitness = self.fitness_of(&position)?;
            Ok(Behavior::Moved(Moved { position, fitness }))
        } else {
            Ok(Behavior::NoImprovement)
        }
    }

    /// Moves toward the fittest partner when `F(best) / n_f > delta F(i)`.
    pub fn rear_chasing(&mut self, state: &SwarmState, i: usize, pool: &[usize]) -> Result<Behavior> {
        let partners = self.partners(state, i, pool);
        let Some(best) = partners
            .iter()
            .copied()
            .reduce(|b, j| if state.fitness[j] > state.fitness[b] { j } else { b })
        else {
            return Ok(Behavior::NoImprovement);
        };
        let count = partners.len() as f64;
        if state.fitness[best] / count > self.params.crowding * state.fitness[i] {
            let target = state.positions[best].clone();
            let position = self.move_towards(&state.positions[i], &target);
            let fitness = self.fitness_of(&position)?;
            Ok(Behavior::Moved(Moved { position, fitness }))
        } else {
            Ok(Behavior::NoImprovement)
        }
    }
}
