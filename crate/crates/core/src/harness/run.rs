use std::fs;
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;

use super::config::{Algorithm, ExperimentConfig};
use super::records::{self, RunRecord};
use crate::afsa;
use crate::baselines::{run_aco, run_pso};
use crate::channel::Scenario;
use crate::error::Result;
use crate::oracle::Oracle;
use crate::search::{PowerWindow, TraceRecord, TrainingResult};

/// A run record together with the convergence trace that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub trace: Vec<TraceRecord>,
}

impl RunOutcome {
    pub fn trace_file_name(&self) -> String {
        let value = match self.record.sweep_value {
            Some(v) => v.to_string(),
            None => "base".to_string(),
        };
        format!("trace_{}_{}_{}.csv", self.record.algorithm, value, self.record.seed)
    }
}

fn oracle_for(scenario: &Scenario, seed: u64, noise: bool) -> Result<Oracle> {
    let mut scenario = scenario.clone();
    scenario.rng_seed = scenario.rng_seed.wrapping_add(seed);
    Ok(Oracle::new(scenario)?.with_measurement_noise(noise))
}

/// Trains one optimizer on a fresh oracle. `echo_budget` caps PSO/ACO.
pub fn train(
    config: &ExperimentConfig,
    algorithm: Algorithm,
    scenario: &Scenario,
    window: PowerWindow,
    seed: u64,
    echo_budget: Option<u64>,
) -> Result<(TrainingResult, Oracle)> {
    let mut oracle = oracle_for(scenario, seed, config.algorithm.measurement_noise)?;
    let result = match algorithm {
        Algorithm::Afsa => {
            let params = config.algorithm.afsa.resolve(scenario, window, seed);
            afsa::run_training(&params, &mut oracle)?
        }
        Algorithm::Pso => run_pso(&config.algorithm.pso.resolve(window, seed, echo_budget), &mut oracle)?,
        Algorithm::Aco => run_aco(&config.algorithm.aco.resolve(window, seed, echo_budget), &mut oracle)?,
    };
    Ok((result, oracle))
}

fn outcome(
    config: &ExperimentConfig,
    algorithm: Algorithm,
    value: Option<f64>,
    seed: u64,
    window: PowerWindow,
    result: TrainingResult,
    oracle: &Oracle,
) -> Result<RunOutcome> {
    let (fitness, user) = oracle.true_metrics(&result.best_beam)?;
    Ok(RunOutcome {
        record: RunRecord {
            algorithm,
            sweep_axis: config.sweep.as_ref().map(|s| s.axis),
            sweep_value: value,
            seed,
            final_fitness: fitness,
            final_user_power: user,
            feasible: window.contains(user),
            iters_to_95: result.iterations_to_95(),
            echo_evals: result.echo_evals,
        },
        trace: result.trace,
    })
}

fn run_point(config: &ExperimentConfig, value: Option<f64>, seed: u64) -> Result<Vec<RunOutcome>> {
    let (scenario, window) = config.at_point(value)?;
    let algorithms = config.algorithms();
    let context = |alg: Algorithm| match value {
        Some(v) => format!(
            "{alg} run ({} = {v}, seed {seed})",
            config.sweep.as_ref().map_or("", |s| s.axis.name())
        ),
        None => format!("{alg} run (seed {seed})"),
    };

    let reference = if algorithms.contains(&Algorithm::Afsa) || config.algorithm.budget_match {
        Some(
            train(config, Algorithm::Afsa, &scenario, window, seed, None)
                .map_err(|e| e.with_context(context(Algorithm::Afsa)))?,
        )
    } else {
        None
    };
    let budget = match (&reference, config.algorithm.budget_match) {
        (Some((r, _)), true) => Some(r.echo_evals),
        _ => None,
    };

    let mut reference = reference;
    let mut out = Vec::with_capacity(algorithms.len());
    for alg in algorithms {
        let (result, oracle) = match alg {
            Algorithm::Afsa => reference.take().expect("AFSA run computed above"),
            _ => train(config, alg, &scenario, window, seed, budget).map_err(|e| e.with_context(context(alg)))?,
        };
        out.push(outcome(config, alg, value, seed, window, result, &oracle).map_err(|e| e.with_context(context(alg)))?);
    }
    Ok(out)
}

/// Runs every (sweep value, seed, algorithm) combination. Runs execute in
/// parallel; the result order is algorithm, sweep value, seed.
pub fn execute(config: &ExperimentConfig) -> Result<Vec<RunOutcome>> {
    config.validate()?;
    let jobs: Vec<(Option<f64>, u64)> = config
        .points()
        .into_iter()
        .flat_map(|v| (0..config.n_seeds as u64).map(move |s| (v, s)))
        .map(|(v, s)| (v, config.base_seed + s))
        .collect();
    let nested = jobs
        .par_iter()
        .map(|&(v, seed)| run_point(config, v, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut outcomes: Vec<RunOutcome> = nested.into_iter().flatten().collect();
    // stable: keeps sweep/seed order within an algorithm
    outcomes.sort_by_key(|o| o.record.algorithm);
    Ok(outcomes)
}

/// Writes `summary.csv`, `runs.csv` and (optionally) one trace per run.
pub fn write_outputs(outcomes: &[RunOutcome], dir: &Path, traces: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    let records: Vec<RunRecord> = outcomes.iter().map(|o| o.record.clone()).collect();
    let summary = records::summarize(&records)?;
    records::write_summary(BufWriter::new(fs::File::create(dir.join("summary.csv"))?), &summary)?;
    records::write_records(BufWriter::new(fs::File::create(dir.join("runs.csv"))?), &records)?;
    if traces {
        for o in outcomes {
            records::write_trace(
                BufWriter::new(fs::File::create(dir.join(o.trace_file_name()))?),
                &o.trace,
            )?;
        }
    }
    Ok(())
}

/// Executes the experiment and writes its outputs to `config.output.dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let outcomes = execute(config)?;
    write_outputs(&outcomes, &config.output.dir, config.output.traces)
        .map_err(|e| e.with_context(format!("writing results to {}", config.output.dir.display())))?;
    Ok(outcomes.into_iter().map(|o| o.record).collect())
}
