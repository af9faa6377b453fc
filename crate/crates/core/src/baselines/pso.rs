use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bounds, dimension, finish, from_vector, trace_record, Budget, Scored};
use crate::error::{Error, Result};
use crate::oracle::Feedback;
use crate::search::{FishPosition, PowerWindow, TrainingResult};

/// Global-best particle swarm settings.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoParams {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity limit as a fraction of each coordinate's range.
    pub velocity_clamp: f64,
    pub window: PowerWindow,
    pub rng_seed: u64,
    /// Stop once another iteration would exceed this many echo measurements.
    /// When set, `iterations` is ignored.
    pub echo_budget: Option<u64>,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            swarm_size: 20,
            iterations: 100,
            inertia: 0.72,
            cognitive: 1.49,
            social: 1.49,
            velocity_clamp: 0.2,
            window: PowerWindow::unconstrained(),
            rng_seed: 0,
            echo_budget: None,
        }
    }
}

impl PsoParams {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size == 0 {
            return Err(Error::validation("swarm_size", "must be positive"));
        }
        if self.iterations == 0 {
            return Err(Error::validation("iterations", "must be positive"));
        }
        for (key, v) in [
            ("inertia", self.inertia),
            ("cognitive", self.cognitive),
            ("social", self.social),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(key, format!("must be positive, got {v}")));
            }
        }
        if !(self.velocity_clamp > 0.0 && self.velocity_clamp <= 1.0) {
            return Err(Error::validation("velocity_clamp", "must lie in (0, 1]"));
        }
        PowerWindow::new(self.window.eta_min, self.window.eta_max)?;
        Ok(())
    }
}

struct Particle {
    current: Scored,
    velocity: Vec<f64>,
    best: Scored,
}

pub fn run_pso<O: Feedback + ?Sized>(params: &PsoParams, oracle: &mut O) -> Result<TrainingResult> {
    params.validate()?;
    let (m, n, power) = (oracle.antennas(), oracle.ris_elements(), oracle.transmit_power());
    let window = params.window;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let evals_at_start = (oracle.echo_evals(), oracle.user_evals());
    let budget = Budget::new(oracle, params.echo_budget);
    let batch = params.swarm_size as u64;

    let vmax: Vec<f64> = bounds(m, n, power)
        .iter()
        .map(|(lo, hi)| params.velocity_clamp * (hi - lo))
        .collect();

    let mut swarm = Vec::with_capacity(params.swarm_size);
    for _ in 0..params.swarm_size {
        let pos = FishPosition::random(m, n, power, &mut rng);
        let current = Scored::measure(oracle, pos, &window)?;
        let velocity = vmax.iter().map(|v| rng.random_range(-*v..=*v)).collect();
        swarm.push(Particle {
            best: current.clone(),
            current,
            velocity,
        });
    }
    let mut global = best_of(swarm.iter().map(|p| &p.best), &window).clone();
    let mut trace = vec![trace_record(&global, &currents(&swarm))];

    let mut iteration = 1;
    while match params.echo_budget {
        Some(_) => budget.allows(oracle, batch),
        None => iteration < params.iterations,
    } {
        for p in swarm.iter_mut() {
            let mut x = p.current.x.clone();
            for d in 0..dimension(m, n) {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let v = params.inertia * p.velocity[d]
                    + params.cognitive * r1 * (p.best.x[d] - x[d])
                    + params.social * r2 * (global.x[d] - x[d]);
                p.velocity[d] = v.clamp(-vmax[d], vmax[d]);
                x[d] += p.velocity[d];
            }
            let pos = from_vector(&x, m, power);
            p.current = Scored::measure(oracle, pos, &window)?;
            if p.current.beats(&p.best, &window) {
                p.best = p.current.clone();
            }
        }
        let candidate = best_of(swarm.iter().map(|p| &p.best), &window);
        if candidate.beats(&global, &window) {
            global = candidate.clone();
        }
        trace.push(trace_record(&global, &currents(&swarm)));
        iteration += 1;
    }

    Ok(finish(oracle, global, trace, evals_at_start))
}

fn currents(swarm: &[Particle]) -> Vec<Scored> {
    swarm.iter().map(|p| p.current.clone()).collect()
}

fn best_of<'s>(mut items: impl Iterator<Item = &'s Scored>, window: &PowerWindow) -> &'s Scored {
    let first = items.next().expect("non-empty swarm");
    items.fold(first, |b, s| if s.beats(b, window) { s } else { b })
}
