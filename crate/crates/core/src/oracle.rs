//! Measurement-only view of the physical layer.
//!
//! [`Oracle`] owns the channels and answers scalar power queries. Optimizers
//! are written against the [`Feedback`] trait, which has no way to reach the
//! channels.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{self, CVector, ChannelSet, Scenario};
use crate::error::{Error, Result};

/// Active beam `w` and RIS reflection vector `xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPair {
    pub w: CVector,
    pub xi: CVector,
}

impl BeamPair {
    pub fn power(&self) -> f64 {
        self.w.iter().map(|x| x.norm_sqr()).sum()
    }

    /// Checks `||w||^2 = P` and `|xi_n| = 1` to 1e-9.
    pub fn validate(&self, antennas: usize, elements: usize, power: f64) -> Result<()> {
        if self.w.len() != antennas || self.xi.len() != elements {
            return Err(Error::invalid(format!(
                "beam pair has dimensions ({}, {}), expected ({antennas}, {elements})",
                self.w.len(),
                self.xi.len()
            )));
        }
        let p = self.power();
        if (p - power).abs() > 1e-9 * power {
            return Err(Error::invalid(format!(
                "active beam power {p} violates ||w||^2 = {power}"
            )));
        }
        if let Some(n) = self.xi.iter().position(|x| (x.norm() - 1.0).abs() > 1e-9) {
            return Err(Error::invalid(format!(
                "RIS coefficient {n} has modulus {}",
                self.xi[n].norm()
            )));
        }
        Ok(())
    }
}

/// What an optimizer is allowed to know about the system.
pub trait Feedback {
    /// M
    fn antennas(&self) -> usize;
    /// N
    fn ris_elements(&self) -> usize;
    /// P, watts.
    fn transmit_power(&self) -> f64;

    /// Echo power at the DFBS for one pilot slot.
    fn measure_echo_power(&mut self, beam: &BeamPair) -> Result<f64>;

    /// Received power fed back by the user for one pilot slot.
    fn measure_user_power(&mut self, beam: &BeamPair) -> Result<f64>;

    fn echo_evals(&self) -> u64;

    fn user_evals(&self) -> u64;

    /// Whether the user power lies in `[eta_min, eta_max]`. Takes one fresh
    /// user measurement.
    fn feasibility(&mut self, beam: &BeamPair, eta_min: f64, eta_max: f64) -> Result<bool> {
        if eta_min > eta_max || eta_min.is_nan() || eta_max.is_nan() {
            return Err(Error::invalid(format!(
                "eta_min ({eta_min}) must not exceed eta_max ({eta_max})"
            )));
        }
        let power = self.measure_user_power(beam)?;
        Ok((eta_min..=eta_max).contains(&power))
    }
}

pub struct Oracle {
    scenario: Scenario,
    channels: ChannelSet,
    echo_evals: u64,
    user_evals: u64,
    noise: bool,
    rng: ChaCha8Rng,
}

impl std::fmt::Debug for Oracle {
    // channels deliberately omitted
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Oracle")
            .field("echo_evals", &self.echo_evals)
            .field("user_evals", &self.user_evals)
            .field("noise", &self.noise)
            .finish_non_exhaustive()
    }
}

impl Oracle {
    /// Generates the scenario's channels and wraps them. Measurement noise
    /// starts disabled.
    pub fn new(scenario: Scenario) -> Result<Self> {
        let channels = channel::generate_channels(&scenario)?;
        Self::with_channels(scenario, channels)
    }

    pub fn with_channels(scenario: Scenario, channels: ChannelSet) -> Result<Self> {
        if channels.antennas() != scenario.antennas || channels.ris_elements() != scenario.ris_elements() {
            return Err(Error::invalid("channel dimensions do not match the scenario"));
        }
        let rng = ChaCha8Rng::seed_from_u64(scenario.rng_seed);
        Ok(Self {
            scenario,
            channels,
            echo_evals: 0,
            user_evals: 0,
            noise: false,
            rng,
        })
    }

    pub fn with_measurement_noise(mut self, enabled: bool) -> Self {
        self.noise = enabled;
        self
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    fn check(&self, beam: &BeamPair) -> Result<()> {
        beam.validate(
            self.scenario.antennas,
            self.scenario.ris_elements(),
            self.scenario.transmit_power,
        )
    }

    fn awgn(&mut self, variance: f64) -> Complex64 {
        let scale = (variance / 2.0).sqrt();
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    }

    fn signal_at_user(&self, beam: &BeamPair) -> Result<Complex64> {
        let h_u = channel::effective_channel(&self.channels, &beam.xi)?;
        Ok(channel::inner(&h_u, &beam.w))
    }

    /// `|h_u^H w|^2 / sigma_c^2`. Computed from the channels directly and not
    /// counted as a feedback measurement.
    pub fn user_snr(&self, beam: &BeamPair) -> Result<f64> {
        self.check(beam)?;
        let noise = self.scenario.user_noise_var;
        if noise == 0.0 {
            return Err(Error::DivisionByZero("user noise variance is zero".into()));
        }
        Ok(self.signal_at_user(beam)?.norm_sqr() / noise)
    }

    /// Noiseless `(echo power, user power)` for reporting trained beams.
    /// Counters are left untouched.
    pub fn true_metrics(&self, beam: &BeamPair) -> Result<(f64, f64)> {
        self.check(beam)?;
        let zeros = vec![Complex64::new(0.0, 0.0); self.scenario.antennas];
        let y = channel::echo_signal(&self.channels, &self.scenario.rho, &beam.w, &beam.xi, &zeros)?;
        let echo = y.iter().map(|v| v.norm_sqr()).sum();
        let user = self.signal_at_user(beam)?.norm_sqr() + self.scenario.user_noise_var;
        Ok((echo, user))
    }
}

impl Feedback for Oracle {
    fn antennas(&self) -> usize {
        self.scenario.antennas
    }

    fn ris_elements(&self) -> usize {
        self.scenario.ris_elements()
    }

    fn transmit_power(&self) -> f64 {
        self.scenario.transmit_power
    }

    fn measure_echo_power(&mut self, beam: &BeamPair) -> Result<f64> {
        self.check(beam)?;
        let m = self.scenario.antennas;
        let noise: CVector = if self.noise {
            let var = self.scenario.echo_noise_var;
            (0..m).map(|_| self.awgn(var)).collect()
        } else {
            vec![Complex64::new(0.0, 0.0); m]
        };
        let y = channel::echo_signal(&self.channels, &self.scenario.rho, &beam.w, &beam.xi, &noise)?;
        self.echo_evals += 1;
        Ok(y.iter().map(|v| v.norm_sqr()).sum())
    }

    fn measure_user_power(&mut self, beam: &BeamPair) -> Result<f64> {
        self.check(beam)?;
        let signal = self.signal_at_user(beam)?;
        let power = if self.noise {
            let n = self.awgn(self.scenario.user_noise_var);
            (signal + n).norm_sqr()
        } else {
            signal.norm_sqr() + self.scenario.user_noise_var
        };
        self.user_evals += 1;
        Ok(power)
    }

    fn echo_evals(&self) -> u64 {
        self.echo_evals
    }

    fn user_evals(&self) -> u64 {
        self.user_evals
    }
}
