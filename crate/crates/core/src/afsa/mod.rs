//! Improved artificial fish swarm beam training.
//!
//! Each fish carries a candidate `(w, phi)`. Sub-block `l` looks at how many
//! fish of sub-block `l - 1` satisfied the user-power window and dispatches:
//!
//! * case A, all feasible: every fish tries clustering and rear-chasing
//!   (falling back to foraging) and keeps the better move;
//! * case B, some feasible: infeasible fish step toward the best feasible
//!   fish, feasible fish behave as in case A among themselves;
//! * case C, none feasible: fish step toward the one whose user power is
//!   closest to the window, which forages on its own.
//!
//! The best feasible fitness ever observed never decreases.

mod behavior;
mod cases;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle::Feedback;
use crate::search::{self, CaseLabel, FishPosition, PowerWindow, TraceRecord, TrainingResult};

pub use crate::search::FishPosition as AfPosition;
pub use behavior::{distance, Behavior, Moved};
pub use cases::{select_target_case_b, select_target_case_c};

/// Swarm hyperparameters. Active quantities (`*_active`) act on the complex
/// transmit beam, passive ones on the RIS phase vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AfsaParams {
    /// S, fish per sub-block.
    pub swarm_size: usize,
    /// K, number of training sub-blocks.
    pub sub_blocks: usize,
    pub step_active: f64,
    pub step_passive: f64,
    pub vision_active: f64,
    pub vision_passive: f64,
    /// Divides the vision when drawing a visual or random position.
    pub correction_active: f64,
    pub correction_passive: f64,
    /// Crowding factor `delta`.
    pub crowding: f64,
    /// Visual positions tried before a random move.
    pub max_forage_tries: usize,
    pub window: PowerWindow,
    pub rng_seed: u64,
}

impl AfsaParams {
    /// Defaults for `M` antennas, `N` RIS elements and transmit power `P`.
    pub fn defaults(antennas: usize, elements: usize, power: f64) -> Self {
        let amp = power.sqrt();
        Self {
            swarm_size: 20,
            sub_blocks: 100,
            step_active: 0.3 * amp,
            step_passive: 0.4,
            vision_active: 1.5 * amp,
            vision_passive: 2.0,
            correction_active: (2.0 * antennas as f64).sqrt(),
            correction_passive: (elements as f64).sqrt(),
            crowding: 0.75,
            max_forage_tries: 5,
            window: PowerWindow::unconstrained(),
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::validation("swarm_size", "must be at least 2"));
        }
        if self.sub_blocks < 2 {
            return Err(Error::validation("sub_blocks", "must be at least 2"));
        }
        for (key, v) in [
            ("step_active", self.step_active),
            ("step_passive", self.step_passive),
            ("vision_active", self.vision_active),
            ("vision_passive", self.vision_passive),
            ("correction_active", self.correction_active),
            ("correction_passive", self.correction_passive),
            ("crowding", self.crowding),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(key, format!("must be positive, got {v}")));
            }
        }
        if self.max_forage_tries == 0 {
            return Err(Error::validation("max_forage_tries", "must be at least 1"));
        }
        PowerWindow::new(self.window.eta_min, self.window.eta_max)?;
        Ok(())
    }

    /// Upper bound on echo measurements for a full run:
    /// `(K - 1) S (T_max + 4) + S`.
    pub fn echo_budget_bound(&self) -> u64 {
        let s = self.swarm_size as u64;
        (self.sub_blocks as u64 - 1) * s * (self.max_forage_tries as u64 + 4) + s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub positions: Vec<FishPosition>,
    /// Echo power `F` per fish.
    pub fitness: Vec<f64>,
    /// User power `f` per fish.
    pub comm_power: Vec<f64>,
    /// Membership in the feasible set.
    pub feasible: Vec<bool>,
    pub global_opt: Option<FishPosition>,
    /// `-inf` until a feasible fish has been recorded.
    pub global_fitness: f64,
    /// 1-based index of the sub-block that produced this swarm.
    pub sub_block: usize,
}

impl SwarmState {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn feasible_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.feasible[i]).collect()
    }

    pub fn feasible_count(&self) -> usize {
        self.feasible.iter().filter(|f| **f).count()
    }

    /// Which case the next sub-block falls into.
    pub fn case(&self) -> CaseLabel {
        match self.feasible_count() {
            0 => CaseLabel::C,
            r if r == self.len() => CaseLabel::A,
            _ => CaseLabel::B,
        }
    }

    /// Takes the best feasible fish as global optimum if it is at least as
    /// good as the incumbent.
    pub(crate) fn absorb_feasible(&mut self) {
        let best = self
            .feasible_indices()
            .into_iter()
            .fold(None::<usize>, |acc, i| match acc {
                Some(b) if self.fitness[b] >= self.fitness[i] => Some(b),
                _ => Some(i),
            });
        if let Some(i) = best {
            self.offer_global(i);
        }
    }

    /// Global-optimum update with fish `i` as challenger: replace on `>=`.
    pub(crate) fn offer_global(&mut self, i: usize) {
        if self.fitness[i] >= self.global_fitness {
            self.global_fitness = self.fitness[i];
            self.global_opt = Some(self.positions[i].clone());
        }
    }

    fn trace_record(&self, case: Option<CaseLabel>) -> TraceRecord {
        TraceRecord {
            global_fitness: self.global_fitness,
            feasible_count: self.feasible_count(),
            case,
        }
    }
}

/// Trainer state: parameters, the random stream and the feedback channel.
pub struct Afsa<'a, O: Feedback + ?Sized> {
    params: AfsaParams,
    oracle: &'a mut O,
    rng: ChaCha8Rng,
    power: f64,
    evals_at_start: (u64, u64),
}

impl<'a, O: Feedback + ?Sized> Afsa<'a, O> {
    pub fn new(params: AfsaParams, oracle: &'a mut O) -> Result<Self> {
        params.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
        let power = oracle.transmit_power();
        let evals_at_start = (oracle.echo_evals(), oracle.user_evals());
        Ok(Self {
            params,
            oracle,
            rng,
            power,
            evals_at_start,
        })
    }

    pub fn params(&self) -> &AfsaParams {
        &self.params
    }

    /// Random initial swarm, evaluated, with the global optimum taken from the
    /// best feasible fish (if any).
    pub fn init_swarm(&mut self) -> Result<SwarmState> {
        let (m, n) = (self.oracle.antennas(), self.oracle.ris_elements());
        let s = self.params.swarm_size;
        let mut state = SwarmState {
            positions: Vec::with_capacity(s),
            fitness: Vec::with_capacity(s),
            comm_power: Vec::with_capacity(s),
            feasible: Vec::with_capacity(s),
            global_opt: None,
            global_fitness: f64::NEG_INFINITY,
            sub_block: 1,
        };
        for _ in 0..s {
            let pos = FishPosition::random(m, n, self.power, &mut self.rng);
            let eval = search::evaluate(self.oracle, &pos)?;
            state.positions.push(pos);
            state.fitness.push(eval.fitness);
            state.comm_power.push(eval.comm_power);
            state.feasible.push(self.params.window.contains(eval.comm_power));
        }
        state.absorb_feasible();
        Ok(state)
    }

    /// One sub-block: dispatch on the feasible count and update in place.
    pub fn step(&mut self, state: &mut SwarmState) -> Result<CaseLabel> {
        let case = state.case();
        match case {
            CaseLabel::A => self.case_a_step(state)?,
            CaseLabel::B => self.case_b_step(state)?,
            CaseLabel::C => {
                self.case_c_step(state)?;
                // fish that became feasible are recorded here rather than at
                // the start of the next sub-block, so the last one counts too
                state.absorb_feasible();
            }
        }
        state.sub_block += 1;
        Ok(case)
    }

    /// Full training period of `K` sub-blocks.
    pub fn run(mut self) -> Result<TrainingResult> {
        let mut state = self.init_swarm()?;
        let mut trace = Vec::with_capacity(self.params.sub_blocks);
        trace.push(state.trace_record(None));
        for _ in 1..self.params.sub_blocks {
            let case = self.step(&mut state)?;
            trace.push(state.trace_record(Some(case)));
        }
        let (best_position, never_feasible) = match &state.global_opt {
            Some(opt) => (opt.clone(), false),
            None => {
                let target = select_target_case_c(&state, &self.params.window);
                (state.positions[target].clone(), true)
            }
        };
        Ok(TrainingResult {
            best_beam: best_position.decode(self.power),
            best_position,
            best_fitness: state.global_fitness,
            never_feasible,
            trace,
            echo_evals: self.oracle.echo_evals() - self.evals_at_start.0,
            user_evals: self.oracle.user_evals() - self.evals_at_start.1,
        })
    }
}

/// Runs a complete AFSA training period against `oracle`.
pub fn run_training<O: Feedback + ?Sized>(params: &AfsaParams, oracle: &mut O) -> Result<TrainingResult> {
    Afsa::new(params.clone(), oracle)?.run()
}
