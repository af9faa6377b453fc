//! Geometric mmWave channel model for the DFBS / RIS / user / target setup.
//!
//! The DFBS carries an `M`-element ULA laid along the y axis. The RIS is an
//! `N1 x N2` URA in the y-z plane; element `(n1, n2)` sits at index
//! `n1 * N2 + n2` (row-major), with `n1` running along y and `n2` along z.
//! Every link is a deterministic line-of-sight path, so `H_br` is rank one.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CVector = Vec<Complex64>;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[Complex64]) -> CVector {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `A^H x`
    pub fn adjoint_mul_vec(&self, x: &[Complex64]) -> CVector {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (r, xr) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * xr;
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.data.iter()
    }
}

/// One physical setup: node positions (meters), array sizes, power and noise
/// levels, and the five echo-path coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub dfbs_pos: [f64; 3],
    pub ris_pos: [f64; 3],
    pub target_pos: [f64; 3],
    pub user_pos: [f64; 3],
    /// M
    pub antennas: usize,
    /// N1
    pub ris_rows: usize,
    /// N2
    pub ris_cols: usize,
    #[serde(default = "defaults::wavelength")]
    pub wavelength: f64,
    /// Element spacing in wavelengths, shared by both arrays.
    #[serde(default = "defaults::element_spacing")]
    pub element_spacing: f64,
    #[serde(default = "defaults::pathloss_exponent")]
    pub pathloss_exponent_los: f64,
    #[serde(default = "defaults::ref_pathloss_db")]
    pub ref_pathloss_db: f64,
    /// Extra attenuation on the DFBS-user direct link, in dB.
    #[serde(default = "defaults::direct_link_loss_db")]
    pub direct_link_loss_db: f64,
    /// P, watts.
    #[serde(default = "defaults::transmit_power")]
    pub transmit_power: f64,
    /// Noise variance at the user, watts.
    #[serde(default = "defaults::noise_var")]
    pub user_noise_var: f64,
    /// Per-antenna echo noise variance at the DFBS, watts.
    #[serde(default = "defaults::noise_var")]
    pub echo_noise_var: f64,
    /// Echo coefficients: RIS-target-RIS, RIS-user-RIS, RIS-user-DFBS,
    /// DFBS-user-DFBS, DFBS-user-RIS.
    #[serde(default = "defaults::rho")]
    pub rho: [Complex64; 5],
    #[serde(default)]
    pub rng_seed: u64,
}

pub(crate) mod defaults {
    use num_complex::Complex64;

    pub fn wavelength() -> f64 {
        // 28 GHz carrier
        299_792_458.0 / 28e9
    }
    pub fn element_spacing() -> f64 {
        0.5
    }
    pub fn pathloss_exponent() -> f64 {
        2.0
    }
    pub fn ref_pathloss_db() -> f64 {
        30.0
    }
    pub fn direct_link_loss_db() -> f64 {
        20.0
    }
    pub fn transmit_power() -> f64 {
        1.0
    }
    pub fn noise_var() -> f64 {
        1e-12
    }
    pub fn rho() -> [Complex64; 5] {
        let clutter = Complex64::new(0.3, 0.0);
        [Complex64::new(1.0, 0.0), clutter, clutter, clutter, clutter]
    }
}

impl Scenario {
    /// Node layout used throughout the evaluation section: DFBS (0, 0, 15),
    /// RIS (30, 0, 10), target (15, -25, 0), user (15, 30, 0).
    pub fn paper_geometry(antennas: usize, ris_rows: usize, ris_cols: usize) -> Self {
        Self {
            dfbs_pos: [0.0, 0.0, 15.0],
            ris_pos: [30.0, 0.0, 10.0],
            target_pos: [15.0, -25.0, 0.0],
            user_pos: [15.0, 30.0, 0.0],
            antennas,
            ris_rows,
            ris_cols,
            wavelength: defaults::wavelength(),
            element_spacing: defaults::element_spacing(),
            pathloss_exponent_los: defaults::pathloss_exponent(),
            ref_pathloss_db: defaults::ref_pathloss_db(),
            direct_link_loss_db: defaults::direct_link_loss_db(),
            transmit_power: defaults::transmit_power(),
            user_noise_var: defaults::noise_var(),
            echo_noise_var: defaults::noise_var(),
            rho: defaults::rho(),
            rng_seed: 0,
        }
    }

    /// N = N1 * N2
    pub fn ris_elements(&self) -> usize {
        self.ris_rows * self.ris_cols
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(Error::validation("antennas", "must be at least 1"));
        }
        if self.ris_rows == 0 {
            return Err(Error::validation("ris_rows", "must be at least 1"));
        }
        if self.ris_cols == 0 {
            return Err(Error::validation("ris_cols", "must be at least 1"));
        }
        if !(self.transmit_power > 0.0 && self.transmit_power.is_finite()) {
            return Err(Error::validation("transmit_power", "must be positive and finite"));
        }
        if !(self.user_noise_var >= 0.0 && self.user_noise_var.is_finite()) {
            return Err(Error::validation("user_noise_var", "must be non-negative"));
        }
        if !(self.echo_noise_var >= 0.0 && self.echo_noise_var.is_finite()) {
            return Err(Error::validation("echo_noise_var", "must be non-negative"));
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(Error::validation("wavelength", "must be positive"));
        }
        if !(self.element_spacing > 0.0 && self.element_spacing.is_finite()) {
            return Err(Error::validation("element_spacing", "must be positive"));
        }
        for (key, v) in [
            ("pathloss_exponent_los", self.pathloss_exponent_los),
            ("ref_pathloss_db", self.ref_pathloss_db),
            ("direct_link_loss_db", self.direct_link_loss_db),
        ] {
            if !v.is_finite() {
                return Err(Error::validation(key, "must be finite"));
            }
        }
        if self.rho.iter().any(|r| !r.is_finite()) {
            return Err(Error::validation("rho", "coefficients must be finite"));
        }
        let nodes = self.nodes();
        for (name, p) in &nodes {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::validation(*name, "position must be finite"));
            }
        }
        for (i, (a, pa)) in nodes.iter().enumerate() {
            for (b, pb) in &nodes[i + 1..] {
                if distance(pa, pb) == 0.0 {
                    return Err(Error::DegenerateGeometry(format!("`{a}` and `{b}` coincide")));
                }
            }
        }
        Ok(())
    }

    fn nodes(&self) -> [(&'static str, [f64; 3]); 4] {
        [
            ("dfbs_pos", self.dfbs_pos),
            ("ris_pos", self.ris_pos),
            ("target_pos", self.target_pos),
            ("user_pos", self.user_pos),
        ]
    }
}

/// The four links hidden from the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// DFBS -> RIS, `N x M`.
    pub h_br: CMatrix,
    /// DFBS -> user, length M.
    pub h_bu: CVector,
    /// RIS -> user, length N.
    pub h_ru: CVector,
    /// RIS -> target, length N.
    pub g_rt: CVector,
}

impl ChannelSet {
    pub fn antennas(&self) -> usize {
        self.h_bu.len()
    }

    pub fn ris_elements(&self) -> usize {
        self.h_ru.len()
    }

    fn check_dims(&self) -> Result<()> {
        let (m, n) = (self.antennas(), self.ris_elements());
        if self.h_br.rows() != n || self.h_br.cols() != m || self.g_rt.len() != n {
            return Err(Error::invalid(format!(
                "inconsistent channel dimensions: H_br {}x{}, h_bu {m}, h_ru {n}, g_rt {}",
                self.h_br.rows(),
                self.h_br.cols(),
                self.g_rt.len()
            )));
        }
        Ok(())
    }
}

fn check_angle(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite, got {v}")))
    }
}

fn axis_response(count: usize, spacing: f64, direction_cosine: f64) -> impl Iterator<Item = Complex64> {
    (0..count).map(move |m| Complex64::from_polar(1.0, 2.0 * PI * spacing * m as f64 * direction_cosine))
}

/// ULA response: element `m` is `exp(j 2 pi d m sin(angle))`.
pub fn steering_vector_ula(angle: f64, elements: usize, spacing: f64) -> Result<CVector> {
    check_angle("angle", angle)?;
    if elements == 0 {
        return Err(Error::invalid("ULA needs at least one element"));
    }
    Ok(axis_response(elements, spacing, angle.sin()).collect())
}

/// URA response as the Kronecker product of the two axis responses, flattened
/// row-major. Axis 1 sees `sin(az) cos(el)`, axis 2 sees `sin(el)`.
pub fn steering_vector_ura(azimuth: f64, elevation: f64, rows: usize, cols: usize, spacing: f64) -> Result<CVector> {
    check_angle("azimuth", azimuth)?;
    check_angle("elevation", elevation)?;
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("URA needs at least one row and one column"));
    }
    let first: CVector = axis_response(rows, spacing, azimuth.sin() * elevation.cos()).collect();
    let second: CVector = axis_response(cols, spacing, elevation.sin()).collect();
    Ok(first.iter().flat_map(|a| second.iter().map(move |b| a * b)).collect())
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (y - x).powi(2)).sum::<f64>().sqrt()
}

fn unit(from: &[f64; 3], to: &[f64; 3]) -> Result<([f64; 3], f64)> {
    let d = distance(from, to);
    if d == 0.0 || !d.is_finite() {
        return Err(Error::DegenerateGeometry(format!(
            "nodes at {from:?} and {to:?} coincide"
        )));
    }
    Ok(([(to[0] - from[0]) / d, (to[1] - from[1]) / d, (to[2] - from[2]) / d], d))
}

/// Complex LoS gain: amplitude `sqrt(10^(-L0/10)) d^(-alpha/2)` with the
/// carrier phase `exp(-j 2 pi d / lambda)`.
fn path_gain(s: &Scenario, d: f64, extra_loss_db: f64) -> Complex64 {
    let amp = 10f64.powf(-(s.ref_pathloss_db + extra_loss_db) / 20.0) * d.powf(-s.pathloss_exponent_los / 2.0);
    Complex64::from_polar(amp, -2.0 * PI * d / s.wavelength)
}

fn dfbs_response(s: &Scenario, dir: &[f64; 3]) -> Result<CVector> {
    steering_vector_ula(dir[1].clamp(-1.0, 1.0).asin(), s.antennas, s.element_spacing)
}

fn ris_response(s: &Scenario, dir: &[f64; 3]) -> Result<CVector> {
    let elevation = dir[2].clamp(-1.0, 1.0).asin();
    let azimuth = dir[1].atan2(dir[0]);
    steering_vector_ura(azimuth, elevation, s.ris_rows, s.ris_cols, s.element_spacing)
}

/// Builds the deterministic LoS channels implied by the scenario geometry.
pub fn generate_channels(s: &Scenario) -> Result<ChannelSet> {
    s.validate()?;

    let (dir_b_r, d_br) = unit(&s.dfbs_pos, &s.ris_pos)?;
    let (dir_r_b, _) = unit(&s.ris_pos, &s.dfbs_pos)?;
    let (dir_b_u, d_bu) = unit(&s.dfbs_pos, &s.user_pos)?;
    let (dir_r_u, d_ru) = unit(&s.ris_pos, &s.user_pos)?;
    let (dir_r_t, d_rt) = unit(&s.ris_pos, &s.target_pos)?;

    let g_br = path_gain(s, d_br, 0.0);
    let depart = dfbs_response(s, &dir_b_r)?;
    let arrive = ris_response(s, &dir_r_b)?;
    let h_br = CMatrix::from_fn(arrive.len(), depart.len(), |n, m| g_br * arrive[n] * depart[m].conj());

    let g_bu = path_gain(s, d_bu, s.direct_link_loss_db);
    let h_bu = dfbs_response(s, &dir_b_u)?.into_iter().map(|a| g_bu * a).collect();

    let g_ru = path_gain(s, d_ru, 0.0);
    let h_ru = ris_response(s, &dir_r_u)?.into_iter().map(|a| g_ru * a).collect();

    let g_t = path_gain(s, d_rt, 0.0);
    let g_rt = ris_response(s, &dir_r_t)?.into_iter().map(|a| g_t * a).collect();

    Ok(ChannelSet { h_br, h_bu, h_ru, g_rt })
}

fn check_len(name: &str, v: &[Complex64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::invalid(format!(
            "{name} has length {}, expected {expected}",
            v.len()
        )));
    }
    Ok(())
}

fn check_unit_modulus(xi: &[Complex64]) -> Result<()> {
    match xi.iter().position(|x| (x.norm() - 1.0).abs() > 1e-9) {
        Some(n) => Err(Error::invalid(format!(
            "RIS coefficient {n} has modulus {}, expected 1",
            xi[n].norm()
        ))),
        None => Ok(()),
    }
}

/// RIS contribution to `h_u^H`, evaluated as `h_ru^H diag(xi) H_br`.
pub fn ris_row_phase_first(ch: &ChannelSet, xi: &[Complex64]) -> Result<CVector> {
    ch.check_dims()?;
    check_len("xi", xi, ch.ris_elements())?;
    let mut out = vec![Complex64::new(0.0, 0.0); ch.antennas()];
    for (n, x) in xi.iter().enumerate() {
        let weight = ch.h_ru[n].conj() * x;
        for (o, a) in out.iter_mut().zip(ch.h_br.row(n)) {
            *o += weight * a;
        }
    }
    Ok(out)
}

/// RIS contribution to `h_u^H`, evaluated as `xi^T diag(h_ru^H) H_br`.
pub fn ris_row_channel_first(ch: &ChannelSet, xi: &[Complex64]) -> Result<CVector> {
    ch.check_dims()?;
    check_len("xi", xi, ch.ris_elements())?;
    let m = ch.antennas();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for (n, x) in xi.iter().enumerate() {
        let hc = ch.h_ru[n].conj();
        for (o, a) in out.iter_mut().zip(ch.h_br.row(n)) {
            *o += x * (hc * a);
        }
    }
    Ok(out)
}

/// Combined user channel `h_u` (column form), so that the received sample
/// is `h_u^H w`.
pub fn effective_channel(ch: &ChannelSet, xi: &[Complex64]) -> Result<CVector> {
    check_unit_modulus(xi)?;
    let row = ris_row_phase_first(ch, xi)?;
    Ok(ch.h_bu.iter().zip(&row).map(|(d, r)| d + r.conj()).collect())
}

/// `u^H w`
pub(crate) fn inner(u: &[Complex64], w: &[Complex64]) -> Complex64 {
    u.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

/// Superimposed DFBS echo for one unit pilot, i.e. the five echo paths plus
/// `noise`.
///
/// All five terms are built from three scalars (`s_t = xi^T diag(g^H) H w`,
/// `s_u = xi^T diag(h_ru^H) H w`, `s_d = h_bu^H w`) and two receive
/// vectors (`H^H diag(g) xi*`, `H^H diag(h_ru) xi*`).
pub fn echo_signal(
    ch: &ChannelSet,
    rho: &[Complex64; 5],
    w: &[Complex64],
    xi: &[Complex64],
    noise: &[Complex64],
) -> Result<CVector> {
    ch.check_dims()?;
    let (m, n) = (ch.antennas(), ch.ris_elements());
    check_len("w", w, m)?;
    check_len("xi", xi, n)?;
    check_len("noise", noise, m)?;
    check_unit_modulus(xi)?;

    let hw = ch.h_br.mul_vec(w);
    let mut s_t = Complex64::new(0.0, 0.0);
    let mut s_u = Complex64::new(0.0, 0.0);
    let mut q_t = Vec::with_capacity(n);
    let mut q_u = Vec::with_capacity(n);
    for k in 0..n {
        s_t += xi[k] * ch.g_rt[k].conj() * hw[k];
        s_u += xi[k] * ch.h_ru[k].conj() * hw[k];
        q_t.push(ch.g_rt[k] * xi[k].conj());
        q_u.push(ch.h_ru[k] * xi[k].conj());
    }
    let s_d = inner(&ch.h_bu, w);
    let v_t = ch.h_br.adjoint_mul_vec(&q_t);
    let v_u = ch.h_br.adjoint_mul_vec(&q_u);

    let [r1, r2, r3, r4, r5] = *rho;
    Ok((0..m)
        .map(|k| {
            r1 * s_t * v_t[k]
                + r2 * s_u * v_u[k]
                + r3 * s_u * ch.h_bu[k]
                + r4 * s_d * ch.h_bu[k]
                + r5 * s_d * v_u[k]
                + noise[k]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn ula_broadside_and_single_element() {
        let v = steering_vector_ula(0.0, 4, 0.5).unwrap();
        assert!(close(&v, &[c(1.0, 0.0); 4], 1e-15));
        let v = steering_vector_ula(1.234, 1, 0.5).unwrap();
        assert!(close(&v, &[c(1.0, 0.0)], 0.0));
    }

    #[test]
    fn ula_thirty_degrees() {
        let v = steering_vector_ula(PI / 6.0, 2, 0.5).unwrap();
        let expected = [c(1.0, 0.0), Complex64::from_polar(1.0, PI * 0.5)];
        assert!(close(&v, &expected, 1e-12));
    }

    #[test]
    fn steering_rejects_non_finite() {
        assert!(matches!(
            steering_vector_ula(f64::NAN, 4, 0.5),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            steering_vector_ura(0.0, f64::INFINITY, 2, 2, 0.5),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn ura_cases() {
        let v = steering_vector_ura(0.0, 0.0, 2, 2, 0.5).unwrap();
        assert!(close(&v, &[c(1.0, 0.0); 4], 1e-15));
        let v = steering_vector_ura(0.3, -0.7, 1, 1, 0.5).unwrap();
        assert!(close(&v, &[c(1.0, 0.0)], 0.0));
        let ura = steering_vector_ura(PI / 4.0, 0.0, 2, 1, 0.5).unwrap();
        let ula = steering_vector_ula(PI / 4.0, 2, 0.5).unwrap();
        assert!(close(&ura, &ula, 1e-15));
    }

    #[test]
    fn ura_entries_are_unit_modulus_and_row_major() {
        let v = steering_vector_ura(0.4, 0.2, 3, 2, 0.5).unwrap();
        assert!(v.iter().all(|x| (x.norm() - 1.0).abs() < 1e-12));
        // moving one step along axis 2 multiplies by exp(j pi sin(el))
        let step = Complex64::from_polar(1.0, PI * 0.2f64.sin());
        assert!((v[1] - v[0] * step).norm() < 1e-12);
        let step1 = Complex64::from_polar(1.0, PI * 0.4f64.sin() * 0.2f64.cos());
        assert!((v[2] - v[0] * step1).norm() < 1e-12);
    }

    fn broadside_user(distance: f64) -> Scenario {
        let mut s = Scenario::paper_geometry(4, 2, 2);
        s.dfbs_pos = [0.0, 0.0, 0.0];
        s.user_pos = [distance, 0.0, 0.0];
        s.ris_pos = [0.0, 30.0, 10.0];
        s.target_pos = [20.0, -25.0, 0.0];
        s.direct_link_loss_db = 0.0;
        s
    }

    #[test]
    fn broadside_user_sees_equal_magnitudes() {
        let s = broadside_user(20.0);
        let ch = generate_channels(&s).unwrap();
        let gain = 10f64.powf(-3.0 / 2.0) / 20.0;
        for h in &ch.h_bu {
            assert!((h.norm() - gain).abs() < 1e-15);
        }
    }

    #[test]
    fn doubling_distance_halves_amplitude() {
        let near = generate_channels(&broadside_user(20.0)).unwrap();
        let far = generate_channels(&broadside_user(40.0)).unwrap();
        let norm = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let ratio = norm(&far.h_bu) / norm(&near.h_bu);
        assert!((ratio - 0.5).abs() < 1e-12);
    }

    #[test]
    fn paper_geometry_dimensions() {
        let s = Scenario::paper_geometry(8, 8, 8);
        let ch = generate_channels(&s).unwrap();
        assert_eq!((ch.h_br.rows(), ch.h_br.cols()), (64, 8));
        assert_eq!(ch.h_bu.len(), 8);
        assert_eq!(ch.h_ru.len(), 64);
        assert_eq!(ch.g_rt.len(), 64);
        assert!(ch
            .h_br
            .iter()
            .chain(&ch.h_bu)
            .chain(&ch.h_ru)
            .chain(&ch.g_rt)
            .all(|x| x.is_finite()));
        assert!(ch.h_bu.iter().all(|x| x.norm() > 0.0));
        assert!(ch.g_rt.iter().all(|x| x.norm() > 0.0));
    }

    #[test]
    fn h_br_is_rank_one() {
        let ch = generate_channels(&Scenario::paper_geometry(3, 2, 2)).unwrap();
        // every 2x2 minor vanishes
        for r in 1..ch.h_br.rows() {
            for k in 1..ch.h_br.cols() {
                let det = ch.h_br.get(0, 0) * ch.h_br.get(r, k) - ch.h_br.get(0, k) * ch.h_br.get(r, 0);
                assert!(det.norm() < 1e-18, "minor ({r},{k}) = {det}");
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let s = Scenario::paper_geometry(8, 4, 4);
        assert_eq!(generate_channels(&s).unwrap(), generate_channels(&s).unwrap());
    }

    #[test]
    fn coincident_nodes_are_degenerate() {
        let mut s = Scenario::paper_geometry(2, 2, 2);
        s.user_pos = s.target_pos;
        assert!(matches!(generate_channels(&s), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn vanishing_ris_path_leaves_direct_link() {
        let mut ch = generate_channels(&Scenario::paper_geometry(3, 2, 2)).unwrap();
        let xi = vec![Complex64::from_polar(1.0, 0.4); 4];
        ch.h_ru = vec![c(0.0, 0.0); 4];
        assert!(close(&effective_channel(&ch, &xi).unwrap(), &ch.h_bu, 0.0));

        let mut ch = generate_channels(&Scenario::paper_geometry(3, 2, 2)).unwrap();
        ch.h_br = CMatrix::zeros(4, 3);
        assert!(close(&effective_channel(&ch, &xi).unwrap(), &ch.h_bu, 0.0));
    }

    #[test]
    fn effective_channel_rejects_bad_xi() {
        let ch = generate_channels(&Scenario::paper_geometry(3, 2, 2)).unwrap();
        assert!(effective_channel(&ch, &[c(1.0, 0.0); 3]).is_err());
        assert!(effective_channel(&ch, &[c(0.5, 0.0); 4]).is_err());
    }

    #[test]
    fn echo_without_paths_is_zero() {
        let ch = generate_channels(&Scenario::paper_geometry(2, 1, 2)).unwrap();
        let w = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let xi = vec![c(1.0, 0.0); 2];
        let y = echo_signal(&ch, &[c(0.0, 0.0); 5], &w, &xi, &[c(0.0, 0.0); 2]).unwrap();
        assert!(y.iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn single_element_target_echo_is_rank_one_chain() {
        let ch = ChannelSet {
            h_br: CMatrix::from_fn(1, 2, |_, k| [c(0.5, 0.1), c(-0.2, 0.3)][k]),
            h_bu: vec![c(0.1, 0.0), c(0.0, 0.2)],
            h_ru: vec![c(0.3, -0.1)],
            g_rt: vec![c(0.7, 0.2)],
        };
        let w = vec![c(0.6, -0.4), c(0.1, 0.9)];
        let rho = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let y = echo_signal(&ch, &rho, &w, &[c(1.0, 0.0)], &[c(0.0, 0.0); 2]).unwrap();
        // a = g* h_br (1 x M row); y = a^H (a w)
        let a: Vec<Complex64> = ch.h_br.row(0).iter().map(|h| ch.g_rt[0].conj() * h).collect();
        let aw: Complex64 = a.iter().zip(&w).map(|(x, y)| x * y).sum();
        let expected: Vec<Complex64> = a.iter().map(|x| x.conj() * aw).collect();
        assert!(close(&y, &expected, 1e-15));
    }

    #[test]
    fn echo_dimension_mismatch() {
        let ch = generate_channels(&Scenario::paper_geometry(2, 1, 2)).unwrap();
        let xi = vec![c(1.0, 0.0); 2];
        let err = echo_signal(&ch, &defaults::rho(), &[c(1.0, 0.0)], &xi, &[c(0.0, 0.0); 2]);
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }
}
