use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::config::{Algorithm, SweepAxis};
use crate::error::{Error, Result};
use crate::search::TraceRecord;

/// Outcome of one (algorithm, sweep value, seed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub sweep_axis: Option<SweepAxis>,
    pub sweep_value: Option<f64>,
    pub seed: u64,
    /// Noiseless echo power of the trained beam pair, watts.
    pub final_fitness: f64,
    /// Noiseless user power of the trained beam pair, watts.
    pub final_user_power: f64,
    pub feasible: bool,
    pub iters_to_95: usize,
    pub echo_evals: u64,
}

pub fn to_db(watts: f64) -> f64 {
    10.0 * watts.log10()
}

/// `runs.csv` row. Column order is part of the file format.
#[derive(Debug, Serialize, Deserialize)]
struct RunRow {
    algorithm: Algorithm,
    sweep_axis: Option<SweepAxis>,
    sweep_value: Option<f64>,
    seed: u64,
    final_fitness_w: f64,
    final_fitness_db: f64,
    final_user_power_w: f64,
    feasible: bool,
    iters_to_95: usize,
    echo_evals: u64,
}

impl From<&RunRecord> for RunRow {
    fn from(r: &RunRecord) -> Self {
        Self {
            algorithm: r.algorithm,
            sweep_axis: r.sweep_axis,
            sweep_value: r.sweep_value,
            seed: r.seed,
            final_fitness_w: r.final_fitness,
            final_fitness_db: to_db(r.final_fitness),
            final_user_power_w: r.final_user_power,
            feasible: r.feasible,
            iters_to_95: r.iters_to_95,
            echo_evals: r.echo_evals,
        }
    }
}

impl From<RunRow> for RunRecord {
    fn from(r: RunRow) -> Self {
        Self {
            algorithm: r.algorithm,
            sweep_axis: r.sweep_axis,
            sweep_value: r.sweep_value,
            seed: r.seed,
            final_fitness: r.final_fitness_w,
            final_user_power: r.final_user_power_w,
            feasible: r.feasible,
            iters_to_95: r.iters_to_95,
            echo_evals: r.echo_evals,
        }
    }
}

pub const RUNS_HEADER: &str = "algorithm,sweep_axis,sweep_value,seed,final_fitness_w,final_fitness_db,final_user_power_w,feasible,iters_to_95,echo_evals";

pub const SUMMARY_HEADER: &str = "algorithm,sweep_axis,sweep_value,runs,median_fitness_w,median_fitness_db,min_fitness_w,max_fitness_w,feasibility_rate,median_iters_to_95";

pub const TRACE_HEADER: &str = "iteration,global_fitness,feasible_count,case";

pub fn write_records<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(RunRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize::<RunRow>().map(|row| Ok(row?.into())).collect()
}

/// Per (algorithm, sweep value) statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub sweep_axis: Option<SweepAxis>,
    pub sweep_value: Option<f64>,
    pub runs: usize,
    pub median_fitness_w: f64,
    pub median_fitness_db: f64,
    pub min_fitness_w: f64,
    pub max_fitness_w: f64,
    pub feasibility_rate: f64,
    pub median_iters_to_95: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Groups by algorithm (afsa, pso, aco) and ascending sweep value.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::invalid("cannot summarize an empty record set"));
    }
    let mut keys: Vec<(Algorithm, Option<f64>)> = records.iter().map(|r| (r.algorithm, r.sweep_value)).collect();
    keys.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| a.1.unwrap_or(0.0).total_cmp(&b.1.unwrap_or(0.0)))
    });
    keys.dedup_by(|a, b| a.0 == b.0 && a.1.map(f64::to_bits) == b.1.map(f64::to_bits));

    Ok(keys
        .into_iter()
        .map(|(algorithm, value)| {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.algorithm == algorithm && r.sweep_value.map(f64::to_bits) == value.map(f64::to_bits))
                .collect();
            let fitness: Vec<f64> = group.iter().map(|r| r.final_fitness).collect();
            let iters: Vec<f64> = group.iter().map(|r| r.iters_to_95 as f64).collect();
            let med = median(&fitness);
            SummaryRow {
                algorithm,
                sweep_axis: group[0].sweep_axis,
                sweep_value: value,
                runs: group.len(),
                median_fitness_w: med,
                median_fitness_db: to_db(med),
                min_fitness_w: fitness.iter().copied().fold(f64::INFINITY, f64::min),
                max_fitness_w: fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                feasibility_rate: group.iter().filter(|r| r.feasible).count() as f64 / group.len() as f64,
                median_iters_to_95: median(&iters),
            }
        })
        .collect())
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary<R: Read>(input: R) -> Result<Vec<SummaryRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| Ok(row?)).collect()
}

#[derive(Serialize)]
struct TraceRow {
    iteration: usize,
    global_fitness: f64,
    feasible_count: usize,
    case: String,
}

pub fn write_trace<W: Write>(out: W, trace: &[TraceRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (i, r) in trace.iter().enumerate() {
        w.serialize(TraceRow {
            iteration: i + 1,
            global_fitness: r.global_fitness,
            feasible_count: r.feasible_count,
            case: r.case.map(|c| c.to_string()).unwrap_or_default(),
        })?;
    }
    w.flush()?;
    Ok(())
}
