//! Dense reference implementations built from Kronecker products, independent
//! of the library's bit-twiddling Hamiltonian.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-site spin operator in the (down, up) basis, index 1 = up.
pub fn spin(axis: usize) -> CMat {
    match axis {
        0 => CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]),
        1 => CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.0, 0.0)]),
        _ => CMat::from_row_slice(2, 2, &[c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]),
    }
}

/// Operator `op` on `site` of `n`; site 0 is the least significant bit.
pub fn site_op(op: &CMat, site: usize, n: usize) -> CMat {
    let mut out = CMat::identity(1, 1);
    for s in (0..n).rev() {
        let f = if s == site { op.clone() } else { CMat::identity(2, 2) };
        out = out.kronecker(&f);
    }
    out
}

pub fn total(axis: usize, n: usize) -> CMat {
    let mut m = CMat::zeros(1 << n, 1 << n);
    for s in 0..n {
        m += site_op(&spin(axis), s, n);
    }
    m
}

/// sum_{i<j} perp_ij (SxSx + SySy) + par_ij SzSz + sum_i drive (S_axis)
pub fn xxz(perp: &DMatrix<f64>, par: &DMatrix<f64>, drive: Option<(usize, f64)>) -> CMat {
    let n = perp.nrows();
    let ops: Vec<Vec<CMat>> = (0..n)
        .map(|s| (0..3).map(|a| site_op(&spin(a), s, n)).collect())
        .collect();
    let mut h = CMat::zeros(1 << n, 1 << n);
    for i in 0..n {
        for j in i + 1..n {
            let xy = &ops[i][0] * &ops[j][0] + &ops[i][1] * &ops[j][1];
            h += xy * c(perp[(i, j)], 0.0);
            h += &ops[i][2] * &ops[j][2] * c(par[(i, j)], 0.0);
        }
    }
    if let Some((axis, rabi)) = drive {
        h += total(axis, n) * c(rabi, 0.0);
    }
    h
}

/// exp(-i H t) by nalgebra's Pade-based matrix exponential.
pub fn propagator(h: &CMat, t: f64) -> CMat {
    (h * c(0.0, -t)).exp()
}

/// Every spin along +x.
pub fn x_polarized(n: usize) -> CVec {
    let d = 1 << n;
    CVec::from_element(d, c((d as f64).powf(-0.5), 0.0))
}

pub fn expect(op: &CMat, psi: &CVec) -> f64 {
    (psi.adjoint() * op * psi)[(0, 0)].re
}

/// Random symmetric matrix with zero diagonal, entries in [-scale, scale].
pub fn random_symmetric(n: usize, scale: f64, seed: u64) -> DMatrix<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random_range(-scale..scale);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

pub fn to_cvec(a: &[Complex64]) -> CVec {
    CVec::from_column_slice(a)
}

/// Largest absolute amplitude difference.
pub fn max_diff(a: &CVec, b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
