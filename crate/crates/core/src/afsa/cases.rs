use super::{Afsa, Behavior, Moved, SwarmState};
use crate::error::{Error, Result};
use crate::oracle::Feedback;
use crate::search::PowerWindow;

/// Target for case B: the only feasible fish, or the fittest one (lowest
/// index on ties).
pub fn select_target_case_b(state: &SwarmState) -> Result<usize> {
    let feasible = state.feasible_indices();
    if feasible.is_empty() || feasible.len() == state.len() {
        return Err(Error::ContractViolation(format!(
            "case B target needs a partially feasible swarm, got {} of {}",
            feasible.len(),
            state.len()
        )));
    }
    Ok(feasible
        .into_iter()
        .reduce(|b, j| if state.fitness[j] > state.fitness[b] { j } else { b })
        .expect("non-empty"))
}

/// Target for case C, chosen over the whole swarm: the largest user power
/// if all fall short of `eta_min`, the smallest if all exceed `eta_max`,
/// otherwise the one closest to either bound. Lowest index on ties.
pub fn select_target_case_c(state: &SwarmState, window: &PowerWindow) -> usize {
    let f = &state.comm_power;
    let argbest = |key: &dyn Fn(f64) -> f64| {
        (0..f.len())
            .reduce(|b, j| if key(f[j]) < key(f[b]) { j } else { b })
            .expect("swarm is never empty")
    };
    let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = f.iter().copied().fold(f64::INFINITY, f64::min);
    if max < window.eta_min {
        argbest(&|x| -x)
    } else if min > window.eta_max {
        argbest(&|x| x)
    } else {
        argbest(&|x| (x - window.eta_min).abs().min((x - window.eta_max).abs()))
    }
}

fn better(a: Moved, b: Moved) -> Moved {
    if b.fitness > a.fitness {
        b
    } else {
        a
    }
}

impl<O: Feedback + ?Sized> Afsa<'_, O> {
    /// Clustering and rear-chasing, each falling back to foraging, keeping the
    /// fitter result. Foraging runs at most once per fish.
    fn swarm_behaviour(&mut self, state: &SwarmState, i: usize, pool: &[usize]) -> Result<Moved> {
        let clustered = self.clustering(state, i, pool)?;
        let chased = self.rear_chasing(state, i, pool)?;
        Ok(match (clustered, chased) {
            (Behavior::Moved(a), Behavior::Moved(b)) => better(a, b),
            (Behavior::Moved(a), Behavior::NoImprovement) => better(a, self.foraging(state, i)?),
            (Behavior::NoImprovement, Behavior::Moved(b)) => better(self.foraging(state, i)?, b),
            (Behavior::NoImprovement, Behavior::NoImprovement) => self.foraging(state, i)?,
        })
    }

    /// Eq-22 style move toward `target`, measured.
    fn approach(&mut self, state: &SwarmState, i: usize, target: usize) -> Result<Moved> {
        let position = self.move_towards(&state.positions[i], &state.positions[target]);
        let fitness = self.fitness_of(&position)?;
        Ok(Moved { position, fitness })
    }

    /// Replaces the swarm with `moves` (all computed from the old swarm) and
    /// measures the user power of each new fish.
    fn commit(&mut self, state: &mut SwarmState, moves: Vec<Moved>) -> Result<()> {
        for (i, mv) in moves.into_iter().enumerate() {
            let beam = mv.position.decode(self.power);
            let comm = self.oracle.measure_user_power(&beam)?;
            state.positions[i] = mv.position;
            state.fitness[i] = mv.fitness;
            state.comm_power[i] = comm;
            state.feasible[i] = self.params.window.contains(comm);
        }
        Ok(())
    }

    /// All fish feasible.
    pub fn case_a_step(&mut self, state: &mut SwarmState) -> Result<()> {
        state.absorb_feasible();
        let pool: Vec<usize> = (0..state.len()).collect();
        let moves = (0..state.len())
            .map(|i| self.swarm_behaviour(state, i, &pool))
            .collect::<Result<Vec<_>>>()?;
        self.commit(state, moves)?;
        state.absorb_feasible();
        Ok(())
    }

    /// Some fish feasible.
    pub fn case_b_step(&mut self, state: &mut SwarmState) -> Result<()> {
        let target = select_target_case_b(state)?;
        state.offer_global(target);
        let pool = state.feasible_indices();
        let moves = (0..state.len())
            .map(|i| {
                if state.feasible[i] {
                    self.swarm_behaviour(state, i, &pool)
                } else {
                    self.approach(state, i, target)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        self.commit(state, moves)?;
        state.absorb_feasible();
        Ok(())
    }

    /// No fish feasible. The global optimum is left alone.
    pub fn case_c_step(&mut self, state: &mut SwarmState) -> Result<()> {
        let target = select_target_case_c(state, &self.params.window);
        let moves = (0..state.len())
            .map(|i| {
                if i == target {
                    self.foraging(state, i)
                } else {
                    self.approach(state, i, target)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        self.commit(state, moves)
    }
}
