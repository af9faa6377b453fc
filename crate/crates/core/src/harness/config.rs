//! Experiment configuration files.
//!
//! A config is a TOML document with a required `[scenario]` table and
//! optional `[algorithm]`, `[sweep]`, `[output]` and `[frame]` tables. Every
//! table rejects unknown keys. See `configs/` for complete examples.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::afsa::AfsaParams;
use crate::baselines::{AcoParams, PsoParams};
use crate::channel::Scenario;
use crate::error::{Error, Result};
use crate::search::PowerWindow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Afsa,
    Pso,
    Aco,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Afsa, Algorithm::Pso, Algorithm::Aco];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Afsa => "afsa",
            Algorithm::Pso => "pso",
            Algorithm::Aco => "aco",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `afsa`, `pso`, `aco` or `all`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmChoice {
    #[default]
    Afsa,
    Pso,
    Aco,
    All,
}

impl AlgorithmChoice {
    pub fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgorithmChoice::Afsa => vec![Algorithm::Afsa],
            AlgorithmChoice::Pso => vec![Algorithm::Pso],
            AlgorithmChoice::Aco => vec![Algorithm::Aco],
            AlgorithmChoice::All => Algorithm::ALL.to_vec(),
        }
    }
}

impl FromStr for AlgorithmChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "afsa" => Ok(Self::Afsa),
            "pso" => Ok(Self::Pso),
            "aco" => Ok(Self::Aco),
            "all" => Ok(Self::All),
            other => Err(format!("unknown algorithm `{other}` (expected afsa, pso, aco or all)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "eta_max")]
    EtaMax,
    M,
    N,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::EtaMax => "eta_max",
            SweepAxis::M => "M",
            SweepAxis::N => "N",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "eta_max" => Ok(Self::EtaMax),
            "M" | "m" => Ok(Self::M),
            "N" | "n" => Ok(Self::N),
            other => Err(format!("unknown sweep axis `{other}` (expected eta_max, M or N)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Optional overrides for [`AfsaParams`]; absent keys take the defaults for
/// the scenario being run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AfsaSection {
    pub swarm_size: Option<usize>,
    pub sub_blocks: Option<usize>,
    pub step_active: Option<f64>,
    pub step_passive: Option<f64>,
    pub vision_active: Option<f64>,
    pub vision_passive: Option<f64>,
    pub correction_active: Option<f64>,
    pub correction_passive: Option<f64>,
    pub crowding: Option<f64>,
    pub max_forage_tries: Option<usize>,
}

impl AfsaSection {
    pub fn resolve(&self, scenario: &Scenario, window: PowerWindow, seed: u64) -> AfsaParams {
        let mut p = AfsaParams::defaults(scenario.antennas, scenario.ris_elements(), scenario.transmit_power);
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { p.$field = v; }
            )*};
        }
        take!(
            swarm_size,
            sub_blocks,
            step_active,
            step_passive,
            vision_active,
            vision_passive,
            correction_active,
            correction_passive,
            crowding,
            max_forage_tries
        );
        p.window = window;
        p.rng_seed = seed;
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsoSection {
    pub swarm_size: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub velocity_clamp: f64,
}

impl Default for PsoSection {
    fn default() -> Self {
        let d = PsoParams::default();
        Self {
            swarm_size: d.swarm_size,
            iterations: d.iterations,
            inertia: d.inertia,
            cognitive: d.cognitive,
            social: d.social,
            velocity_clamp: d.velocity_clamp,
        }
    }
}

impl PsoSection {
    pub fn resolve(&self, window: PowerWindow, seed: u64, echo_budget: Option<u64>) -> PsoParams {
        PsoParams {
            swarm_size: self.swarm_size,
            iterations: self.iterations,
            inertia: self.inertia,
            cognitive: self.cognitive,
            social: self.social,
            velocity_clamp: self.velocity_clamp,
            window,
            rng_seed: seed,
            echo_budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AcoSection {
    pub archive_size: usize,
    pub ants: usize,
    pub iterations: usize,
    pub locality: f64,
    pub deviation_ratio: f64,
}

impl Default for AcoSection {
    fn default() -> Self {
        let d = AcoParams::default();
        Self {
            archive_size: d.archive_size,
            ants: d.ants,
            iterations: d.iterations,
            locality: d.locality,
            deviation_ratio: d.deviation_ratio,
        }
    }
}

impl AcoSection {
    pub fn resolve(&self, window: PowerWindow, seed: u64, echo_budget: Option<u64>) -> AcoParams {
        AcoParams {
            archive_size: self.archive_size,
            ants: self.ants,
            iterations: self.iterations,
            locality: self.locality,
            deviation_ratio: self.deviation_ratio,
            window,
            rng_seed: seed,
            echo_budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgorithmSection {
    pub kind: AlgorithmChoice,
    /// Watts.
    pub eta_min: f64,
    /// Watts.
    pub eta_max: f64,
    /// Give PSO and ACO the echo budget AFSA actually used on the same seed.
    pub budget_match: bool,
    pub measurement_noise: bool,
    pub afsa: AfsaSection,
    pub pso: PsoSection,
    pub aco: AcoSection,
}

impl Default for AlgorithmSection {
    fn default() -> Self {
        Self {
            kind: AlgorithmChoice::default(),
            eta_min: 0.0,
            eta_max: f64::INFINITY,
            budget_match: false,
            measurement_noise: false,
            afsa: AfsaSection::default(),
            pso: PsoSection::default(),
            aco: AcoSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Write one convergence trace CSV per run.
    pub traces: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            traces: true,
        }
    }
}

/// Frame bookkeeping: training period `T1 = K S`, ISAC period `T2` split in
/// `L` sub-blocks of `U = T2 / L` slots. Recorded only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameSection {
    pub t1: Option<usize>,
    pub t2: usize,
    pub l: usize,
}

impl Default for FrameSection {
    fn default() -> Self {
        Self {
            t1: None,
            t2: 1000,
            l: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    pub t1: usize,
    pub t2: usize,
    pub l: usize,
    pub u: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "one")]
    pub n_seeds: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub scenario: Scenario,
    #[serde(default)]
    pub algorithm: AlgorithmSection,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub frame: FrameSection,
}

pub const SHIPPED: [(&str, &str); 5] = [
    ("paper_fig2", include_str!("../../configs/paper_fig2.toml")),
    ("paper_fig3", include_str!("../../configs/paper_fig3.toml")),
    ("paper_fig4", include_str!("../../configs/paper_fig4.toml")),
    ("paper_fig5", include_str!("../../configs/paper_fig5.toml")),
    ("desk", include_str!("../../configs/desk.toml")),
];

/// Text of a config bundled with the crate.
pub fn shipped_config(name: &str) -> Option<&'static str> {
    SHIPPED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Reads and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::MissingFile(path.to_path_buf())),
        Err(e) => return Err(e.into()),
    };
    parse_config(&text, path)
}

/// Loads `name` as a file path, falling back to a shipped config name.
pub fn resolve_config(name: &str) -> Result<ExperimentConfig> {
    let path = Path::new(name);
    if !path.exists() {
        if let Some(text) = shipped_config(name) {
            return parse_config(text, path);
        }
    }
    load_config(path)
}

pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    pub fn window(&self) -> Result<PowerWindow> {
        let (lo, hi) = (self.algorithm.eta_min, self.algorithm.eta_max);
        if lo.is_nan() || lo < 0.0 {
            return Err(Error::validation("algorithm.eta_min", "must be non-negative"));
        }
        if hi.is_nan() || lo > hi {
            return Err(Error::validation(
                "algorithm.eta_min, algorithm.eta_max",
                format!("eta_min ({lo}) must not exceed eta_max ({hi})"),
            ));
        }
        PowerWindow::new(lo, hi)
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        self.algorithm.kind.algorithms()
    }

    /// Sweep points, or a single `None` point for an un-swept config.
    pub fn points(&self) -> Vec<Option<f64>> {
        match &self.sweep {
            Some(s) => s.values.iter().copied().map(Some).collect(),
            None => vec![None],
        }
    }

    /// Scenario and power window at one sweep point.
    pub fn at_point(&self, value: Option<f64>) -> Result<(Scenario, PowerWindow)> {
        let mut scenario = self.scenario.clone();
        let mut window = self.window()?;
        if let (Some(sweep), Some(v)) = (&self.sweep, value) {
            match sweep.axis {
                SweepAxis::EtaMax => window = PowerWindow::new(window.eta_min, v)?,
                SweepAxis::M => scenario.antennas = v as usize,
                SweepAxis::N => (scenario.ris_rows, scenario.ris_cols) = ura_shape(v as usize),
            }
        }
        scenario.validate()?;
        Ok((scenario, window))
    }

    pub fn frame(&self) -> Result<Frame> {
        let params = self
            .algorithm
            .afsa
            .resolve(&self.scenario, PowerWindow::unconstrained(), 0);
        let t1 = params.sub_blocks * params.swarm_size;
        if let Some(given) = self.frame.t1 {
            if given != t1 {
                return Err(Error::validation(
                    "frame.t1",
                    format!("T1 = {given} disagrees with K * S = {t1}"),
                ));
            }
        }
        if self.frame.l == 0 || !self.frame.t2.is_multiple_of(self.frame.l) {
            return Err(Error::validation("frame.l", "must divide frame.t2"));
        }
        Ok(Frame {
            t1,
            t2: self.frame.t2,
            l: self.frame.l,
            u: self.frame.t2 / self.frame.l,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_seeds == 0 {
            return Err(Error::validation("n_seeds", "must be at least 1"));
        }
        self.scenario.validate()?;
        let window = self.window()?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::validation("sweep.values", "must not be empty"));
            }
            if sweep.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::validation("sweep.values", "values must be positive and finite"));
            }
            if sweep.values.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::validation("sweep.values", "values must be strictly increasing"));
            }
            match sweep.axis {
                SweepAxis::M | SweepAxis::N => {
                    if sweep.values.iter().any(|v| v.fract() != 0.0) {
                        return Err(Error::validation("sweep.values", "array sizes must be integers"));
                    }
                }
                SweepAxis::EtaMax => {
                    if sweep.values[0] < window.eta_min {
                        return Err(Error::validation(
                            "sweep.values",
                            "eta_max values must not fall below algorithm.eta_min",
                        ));
                    }
                }
            }
        }
        for value in self.points() {
            let (scenario, window) = self.at_point(value)?;
            let seed = self.base_seed;
            self.algorithm.afsa.resolve(&scenario, window, seed).validate()?;
            self.algorithm.pso.resolve(window, seed, None).validate()?;
            self.algorithm.aco.resolve(window, seed, None).validate()?;
        }
        self.frame()?;
        Ok(())
    }
}

/// Near-square URA for `n` elements: rows is the largest divisor of `n` not
/// above `sqrt(n)`.
pub fn ura_shape(n: usize) -> (usize, usize) {
    let rows = (1..=n)
        .take_while(|r| r * r <= n)
        .filter(|r| n.is_multiple_of(*r))
        .last()
        .unwrap_or(1);
    (rows, n / rows.max(1))
}
