use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{dimension, finish, from_vector, rank, trace_record, Budget, Scored};
use crate::error::{Error, Result};
use crate::oracle::Feedback;
use crate::search::{FishPosition, PowerWindow, TrainingResult};

/// Continuous ant colony optimization with a ranked solution archive and
/// Gaussian kernel sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct AcoParams {
    pub archive_size: usize,
    pub ants: usize,
    pub iterations: usize,
    /// Locality `q`: small values concentrate sampling on the best solutions.
    pub locality: f64,
    /// Deviation ratio `xi` scaling the kernel widths (pheromone evaporation).
    pub deviation_ratio: f64,
    pub window: PowerWindow,
    pub rng_seed: u64,
    /// Stop once another iteration would exceed this many echo measurements.
    /// When set, `iterations` is ignored.
    pub echo_budget: Option<u64>,
}

impl Default for AcoParams {
    fn default() -> Self {
        Self {
            archive_size: 50,
            ants: 20,
            iterations: 100,
            locality: 0.1,
            deviation_ratio: 0.85,
            window: PowerWindow::unconstrained(),
            rng_seed: 0,
            echo_budget: None,
        }
    }
}

impl AcoParams {
    pub fn validate(&self) -> Result<()> {
        if self.ants == 0 {
            return Err(Error::validation("ants", "must be at least 1"));
        }
        if self.archive_size < self.ants {
            return Err(Error::validation("archive_size", "must be at least `ants`"));
        }
        if self.iterations == 0 {
            return Err(Error::validation("iterations", "must be positive"));
        }
        if !(self.locality > 0.0 && self.locality.is_finite()) {
            return Err(Error::validation("locality", "must be positive"));
        }
        if !(self.deviation_ratio > 0.0 && self.deviation_ratio.is_finite()) {
            return Err(Error::validation("deviation_ratio", "must be positive"));
        }
        PowerWindow::new(self.window.eta_min, self.window.eta_max)?;
        Ok(())
    }
}

/// Selection probabilities over archive ranks, from the Gaussian weights
/// `exp(-(l - 1)^2 / (2 q^2 k^2))`.
fn rank_weights(k: usize, q: f64) -> Vec<f64> {
    let spread = 2.0 * (q * k as f64).powi(2);
    let raw: Vec<f64> = (0..k).map(|l| (-((l * l) as f64) / spread).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

fn roulette<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let mut u: f64 = rng.random();
    for (l, p) in probabilities.iter().enumerate() {
        if u < *p {
            return l;
        }
        u -= p;
    }
    probabilities.len() - 1
}

pub fn run_aco<O: Feedback + ?Sized>(params: &AcoParams, oracle: &mut O) -> Result<TrainingResult> {
    params.validate()?;
    let (m, n, power) = (oracle.antennas(), oracle.ris_elements(), oracle.transmit_power());
    let window = params.window;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let evals_at_start = (oracle.echo_evals(), oracle.user_evals());
    let budget = Budget::new(oracle, params.echo_budget);
    let k = params.archive_size;
    let dim = dimension(m, n);
    let weights = rank_weights(k, params.locality);

    let mut archive = Vec::with_capacity(k + params.ants);
    for _ in 0..k {
        let pos = FishPosition::random(m, n, power, &mut rng);
        archive.push(Scored::measure(oracle, pos, &window)?);
    }
    // stable sort keeps insertion order among equals
    archive.sort_by(|a, b| rank(a, b, &window));
    let mut trace = vec![trace_record(&archive[0], &archive)];

    let mut iteration = 1;
    while match params.echo_budget {
        Some(_) => budget.allows(oracle, params.ants as u64),
        None => iteration < params.iterations,
    } {
        let mut ants = Vec::with_capacity(params.ants);
        for _ in 0..params.ants {
            let guide = roulette(&weights, &mut rng);
            let mut x = Vec::with_capacity(dim);
            for d in 0..dim {
                let mean = archive[guide].x[d];
                let spread: f64 = archive.iter().map(|s| (s.x[d] - mean).abs()).sum::<f64>() / (k.max(2) - 1) as f64;
                let z: f64 = rng.sample(StandardNormal);
                x.push(mean + params.deviation_ratio * spread * z);
            }
            let pos = from_vector(&x, m, power);
            ants.push(Scored::measure(oracle, pos, &window)?);
        }
        archive.extend(ants.iter().cloned());
        archive.sort_by(|a, b| rank(a, b, &window));
        archive.truncate(k);
        trace.push(trace_record(&archive[0], &ants));
        iteration += 1;
    }

    let best = archive.swap_remove(0);
    Ok(finish(oracle, best, trace, evals_at_start))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_decay_with_rank() {
        let w = rank_weights(50, 0.1);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.windows(2).all(|p| p[0] > p[1]));
    }

    #[test]
    fn roulette_respects_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = [0.0, 1.0, 0.0];
        for _ in 0..20 {
            assert_eq!(roulette(&p, &mut rng), 1);
        }
    }
}
