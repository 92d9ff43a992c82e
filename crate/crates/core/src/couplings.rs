//! Dipolar coupling matrices and the diagnostics built on them.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ensemble::{median, Vec3};
use crate::error::{Error, Result};
use crate::units::PLANCK;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    /// C3/2pi in MHz um^3, signed.
    pub c3_over_2pi: f64,
    /// Unit vector along the quantization axis.
    pub quantization_axis: [f64; 3],
    /// Multiplier for the current encoding: +1 in the first period, -k in the second.
    pub sign_scale: f64,
}

impl Default for InteractionParams {
    fn default() -> Self {
        Self {
            c3_over_2pi: 3200.0,
            quantization_axis: [0.0, 0.0, 1.0],
            sign_scale: 1.0,
        }
    }
}

impl InteractionParams {
    pub fn new(c3_over_2pi: f64) -> Self {
        Self {
            c3_over_2pi,
            ..Self::default()
        }
    }

    pub fn axis(&self) -> Vec3 {
        Vec3::from(self.quantization_axis)
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.axis().norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "quantization_axis",
                format!("must have unit norm, found {norm}"),
            ));
        }
        if !self.c3_over_2pi.is_finite() || !self.sign_scale.is_finite() {
            return Err(Error::invalid("c3_over_2pi", "must be finite"));
        }
        Ok(())
    }
}

/// Symmetric coupling matrix in rad/us with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    pub values: DMatrix<f64>,
    /// us
    pub timestamp: f64,
}

impl CouplingMatrix {
    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.norm()
    }

    /// Restriction to `indices`, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> CouplingMatrix {
        let n = indices.len();
        CouplingMatrix {
            values: DMatrix::from_fn(n, n, |a, b| self.values[(indices[a], indices[b])]),
            timestamp: self.timestamp,
        }
    }

    pub fn scaled(&self, factor: f64) -> CouplingMatrix {
        CouplingMatrix {
            values: &self.values * factor,
            timestamp: self.timestamp,
        }
    }

    /// Row-major CSV with a comment header carrying the timestamp and parameters.
    pub fn to_csv(&self, params: &InteractionParams) -> String {
        let mut out = String::new();
        let a = params.quantization_axis;
        let _ = writeln!(
            out,
            "# coupling-matrix v1 timestamp_us={} c3_over_2pi_mhz_um3={} axis={},{},{} sign_scale={} unit=rad/us",
            self.timestamp, params.c3_over_2pi, a[0], a[1], a[2], params.sign_scale
        );
        let n = self.dim();
        let header: Vec<String> = (0..n).map(|j| format!("j{j}")).collect();
        let _ = writeln!(out, "{}", header.join(","));
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| format!("{}", self.values[(i, j)])).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: &Path, params: &InteractionParams) -> Result<()> {
        std::fs::write(path, self.to_csv(params))?;
        Ok(())
    }
}

/// J_ij = 2 C3 (1 - 3 cos^2 theta) / r^3 as an angular frequency, times the sign scale.
pub fn pair_coupling(r_i: &Vec3, r_j: &Vec3, params: &InteractionParams) -> Result<f64> {
    let d = r_j - r_i;
    let r2 = d.norm_squared();
    if r2 == 0.0 {
        return Err(Error::Domain("coincident positions have no dipolar coupling".into()));
    }
    let proj = d.dot(&params.axis());
    // (r^2 - 3 (d.a)^2) / r^5 keeps the magic angle exactly zero for lattice vectors
    let angular = (r2 - 3.0 * proj * proj) / (r2 * r2 * r2.sqrt());
    Ok(TAU * 2.0 * params.c3_over_2pi * angular * params.sign_scale)
}

pub fn coupling_matrix(positions: &[Vec3], params: &InteractionParams) -> Result<CouplingMatrix> {
    coupling_matrix_at(positions, params, 0.0)
}

pub fn coupling_matrix_at(positions: &[Vec3], params: &InteractionParams, timestamp: f64) -> Result<CouplingMatrix> {
    let n = positions.len();
    let mut values = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let jij = pair_coupling(&positions[i], &positions[j], params)?;
            values[(i, j)] = jij;
            values[(j, i)] = jij;
        }
    }
    Ok(CouplingMatrix { values, timestamp })
}

/// J_m = median_j max_{i != j} |J_ij|, in rad/us.
pub fn median_nn_strength(j: &CouplingMatrix) -> Result<f64> {
    let n = j.dim();
    if n < 2 {
        return Err(Error::Domain(
            "median interaction strength needs at least two spins".into(),
        ));
    }
    let mut maxima: Vec<f64> = (0..n)
        .map(|col| {
            (0..n)
                .filter(|&row| row != col)
                .map(|row| j.values[(row, col)].abs())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(median(&mut maxima))
}

/// ||J(t) - J(0)||_F / ||J(t)||_F
pub fn coupling_deviation(j_t: &CouplingMatrix, j_0: &CouplingMatrix) -> Result<f64> {
    if j_t.values.shape() != j_0.values.shape() {
        return Err(Error::DimensionMismatch {
            expected: j_0.dim(),
            found: j_t.dim(),
        });
    }
    let norm = j_t.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::Domain("coupling deviation undefined for a zero matrix".into()));
    }
    Ok((&j_t.values - &j_0.values).norm() / norm)
}

/// Sign of the resonant exchange coefficient for a pair encoding:
/// Delta m_j = 0 gives +|d0|^2, Delta m_j = +-1 gives -|d+-|^2.
pub fn resonant_c3_sign(delta_mj: i32, matrix_element_sq: f64) -> Result<f64> {
    if !(matrix_element_sq > 0.0) {
        return Err(Error::Domain("matrix element squared must be positive".into()));
    }
    match delta_mj {
        0 => Ok(matrix_element_sq),
        1 | -1 => Ok(-matrix_element_sq),
        other => Err(Error::Domain(format!(
            "Delta m_j = {other} has no resonant exchange term"
        ))),
    }
}

/// k = |C3 of the first encoding / C3 of the second|.
pub fn coupling_ratio(c3_first: f64, c3_second: f64) -> f64 {
    (c3_first / c3_second).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementEstimate {
    /// v t with v = sqrt(2 k_B T / m), um.
    pub thermal: f64,
    /// a t^2 with a = 3 d^2 / (4 pi eps0 r^4 m), um. No factor 1/2, as in the
    /// original order-of-magnitude estimate.
    pub force: f64,
}

/// Order-of-magnitude displacements from thermal motion and from dipolar forces.
///
/// `dipole_sq_scale` is d^2/(4 pi eps0 h) expressed as a C3/2pi-like
/// coefficient in MHz um^3, `r` in um, `temperature` in K, `mass` in kg, `t` in us.
pub fn displacement_estimates(
    r: f64,
    dipole_sq_scale: f64,
    temperature: f64,
    mass: f64,
    t: f64,
) -> DisplacementEstimate {
    // m/s == um/us
    let v = (2.0 * crate::units::BOLTZMANN * temperature / mass).sqrt();
    // energy coefficient in J m^3: h * (MHz -> Hz) * (um^3 -> m^3)
    let c3_si = PLANCK * dipole_sq_scale * 1e6 * 1e-18;
    let r_si = r * 1e-6;
    let force = 3.0 * c3_si / r_si.powi(4);
    let accel = force / mass;
    let t_si = t * 1e-6;
    DisplacementEstimate {
        thermal: v * t,
        force: accel * t_si * t_si * 1e6,
    }
}
