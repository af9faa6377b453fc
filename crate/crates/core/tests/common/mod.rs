//! Reference evaluations written directly from the matrix expressions, with
//! nalgebra, for comparison against the library's vector shortcuts.
#![allow(dead_code)]

use afsa_beam::channel::{CMatrix, ChannelSet};
use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;
use rand::Rng;

pub type C = Complex64;

pub fn random_c<R: Rng>(rng: &mut R) -> C {
    C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_unit<R: Rng>(rng: &mut R) -> C {
    C::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn random_channels<R: Rng>(rng: &mut R, m: usize, n: usize) -> ChannelSet {
    ChannelSet {
        h_br: CMatrix::from_fn(n, m, |_, _| random_c(rng)),
        h_bu: (0..m).map(|_| random_c(rng)).collect(),
        h_ru: (0..n).map(|_| random_c(rng)).collect(),
        g_rt: (0..n).map(|_| random_c(rng)).collect(),
    }
}

pub fn mat(ch: &ChannelSet) -> DMatrix<C> {
    DMatrix::from_fn(ch.h_br.rows(), ch.h_br.cols(), |r, c| ch.h_br.get(r, c))
}

pub fn col(v: &[C]) -> DVector<C> {
    DVector::from_column_slice(v)
}

fn diag(v: &[C]) -> DMatrix<C> {
    DMatrix::from_diagonal(&col(v))
}

/// `h_u^H` as a 1 x M row: `h_bu^H + h_ru^H diag(xi) H_br`.
pub fn user_row(ch: &ChannelSet, xi: &[C]) -> RowDVector<C> {
    col(&ch.h_bu).adjoint() + col(&ch.h_ru).adjoint() * diag(xi) * mat(ch)
}

/// The same row via `xi^T diag(h_ru^H) H_br`.
pub fn user_row_alt(ch: &ChannelSet, xi: &[C]) -> RowDVector<C> {
    let h_ru_h: Vec<C> = ch.h_ru.iter().map(|h| h.conj()).collect();
    col(&ch.h_bu).adjoint() + col(xi).transpose() * diag(&h_ru_h) * mat(ch)
}

/// Noiseless echo, each of the five paths built as its own matrix product.
pub fn echo(ch: &ChannelSet, rho: &[C; 5], w: &[C], xi: &[C]) -> DVector<C> {
    let h = mat(ch);
    let g_h: Vec<C> = ch.g_rt.iter().map(|g| g.conj()).collect();
    let hru_h: Vec<C> = ch.h_ru.iter().map(|g| g.conj()).collect();
    let a_t = diag(&g_h) * &h;
    let a_u = diag(&hru_h) * &h;
    let xi_c = col(xi).conjugate();
    let xi_t = col(xi).transpose();
    let h_bu = col(&ch.h_bu);
    let w = col(w);

    let p1 = a_t.adjoint() * &xi_c * &xi_t * &a_t * &w * rho[0];
    let p2 = a_u.adjoint() * &xi_c * &xi_t * &a_u * &w * rho[1];
    let p3 = &h_bu * &xi_t * &a_u * &w * rho[2];
    let p4 = &h_bu * h_bu.adjoint() * &w * rho[3];
    let p5 = a_u.adjoint() * &xi_c * h_bu.adjoint() * &w * rho[4];
    p1 + p2 + p3 + p4 + p5
}

pub fn rel_err(a: &[C], b: &[C]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
