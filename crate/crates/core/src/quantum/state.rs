use num_complex::Complex64;

use super::{bit, Axis};
use crate::error::{Error, Result};

/// Pure state of `n` spin-1/2 sites. Bit `i` of a basis index is 1 when
/// site `i` is up.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    n: usize,
    amps: Vec<Complex64>,
}

impl SpinState {
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "a state needs at least one spin"));
        }
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        Ok(Self { n, amps })
    }

    /// Basis state with the given bit pattern.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub fn all_down(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        for a in &mut self.amps {
            *a /= n;
        }
    }

    /// <self|other>
    pub fn overlap(&self, other: &SpinState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// L2 distance between amplitude vectors (phase sensitive).
    pub fn distance(&self, other: &SpinState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// (<S_x^i>, <S_y^i>, <S_z^i>) for one site.
    pub fn site_expectation(&self, site: usize) -> [f64; 3] {
        let b = bit(site);
        let mut flip = Complex64::new(0.0, 0.0);
        let mut sz = 0.0;
        for (s, a) in self.amps.iter().enumerate() {
            if s & b == 0 {
                // conj(up) * down
                flip += self.amps[s | b].conj() * a;
                sz -= 0.5 * a.norm_sqr();
            } else {
                sz += 0.5 * a.norm_sqr();
            }
        }
        [flip.re, flip.im, sz]
    }

    pub fn total_sz(&self) -> f64 {
        let half = self.n as f64 / 2.0;
        self.amps
            .iter()
            .enumerate()
            .map(|(s, a)| (s.count_ones() as f64 - half) * a.norm_sqr())
            .sum()
    }
}

/// Every spin in (|down> + e^{i phi}|up>)/sqrt2 up to the azimuth convention
/// that makes `magnetization(state, phi)` equal +0.5; amplitudes are
/// 2^{-n/2} e^{-i phi m}, m the number of up spins.
pub fn initial_product_state(n: usize, phi: f64) -> SpinState {
    assert!(n >= 1, "a state needs at least one spin");
    let norm = (0.5f64).powf(n as f64 / 2.0);
    let amps = (0..1usize << n)
        .map(|s| Complex64::from_polar(norm, -phi * s.count_ones() as f64))
        .collect();
    SpinState { n, amps }
}

/// Single-site unitary exp(-i angle S_axis) as [[d<-d, d<-u], [u<-d, u<-u]].
fn single_site_rotation(axis: Axis, angle: f64) -> [[Complex64; 2]; 2] {
    let c = (angle / 2.0).cos();
    let s = (angle / 2.0).sin();
    let z = Complex64::new(0.0, 0.0);
    match axis {
        Axis::X => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        Axis::Y => [
            [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
            [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
        ],
        Axis::Z => [
            [Complex64::from_polar(1.0, angle / 2.0), z],
            [z, Complex64::from_polar(1.0, -angle / 2.0)],
        ],
    }
}

/// Global rotation exp(-i angle sum_i S_axis^i). With this sign convention
/// +pi/2 about y takes all-down to the -x direction, so the preparation pulse
/// into the phi = 0 state is -pi/2 about y.
pub fn apply_rotation(state: &SpinState, axis: Axis, angle: f64) -> SpinState {
    let mut out = state.clone();
    rotate_in_place(&mut out, axis, angle);
    out
}

pub fn rotate_in_place(state: &mut SpinState, axis: Axis, angle: f64) {
    let u = single_site_rotation(axis, angle);
    let dim = state.dim();
    for site in 0..state.n {
        let b = bit(site);
        for s in 0..dim {
            if s & b != 0 {
                continue;
            }
            let d = state.amps[s];
            let up = state.amps[s | b];
            state.amps[s] = u[0][0] * d + u[0][1] * up;
            state.amps[s | b] = u[1][0] * d + u[1][1] * up;
        }
    }
}

fn site_list(n: usize, sites: Option<&[usize]>) -> Result<Vec<usize>> {
    match sites {
        None => Ok((0..n).collect()),
        Some([]) => Err(Error::invalid("sites", "subset must be nonempty")),
        Some(s) => {
            if let Some(&bad) = s.iter().find(|&&i| i >= n) {
                return Err(Error::invalid(
                    "sites",
                    format!("site {bad} out of range for {n} spins"),
                ));
            }
            Ok(s.to_vec())
        }
    }
}

/// Mean transverse magnetization (<S_x>, <S_y>) over the given sites.
pub fn transverse_magnetization(state: &SpinState, sites: Option<&[usize]>) -> Result<(f64, f64)> {
    let sites = site_list(state.n, sites)?;
    let (mut mx, mut my) = (0.0, 0.0);
    for &i in &sites {
        let [x, y, _] = state.site_expectation(i);
        mx += x;
        my += y;
    }
    let k = sites.len() as f64;
    Ok((mx / k, my / k))
}

/// (1/|sites|) sum_i <cos(phi) S_x^i + sin(phi) S_y^i>
pub fn magnetization(state: &SpinState, phi: f64, sites: Option<&[usize]>) -> Result<f64> {
    let (mx, my) = transverse_magnetization(state, sites)?;
    Ok(phi.cos() * mx + phi.sin() * my)
}

/// Transverse magnetization maximized over the readout phase.
pub fn phase_contrast_amplitude(state: &SpinState, sites: Option<&[usize]>) -> Result<f64> {
    let (mx, my) = transverse_magnetization(state, sites)?;
    Ok(mx.hypot(my))
}
