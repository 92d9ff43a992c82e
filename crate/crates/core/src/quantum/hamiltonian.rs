use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{bit, Axis, SpinState};
use crate::couplings::CouplingMatrix;
use crate::error::{Error, Result};

/// Couplings of sum_{i<j} J^perp_ij (S_x S_x + S_y S_y) + J^par_ij S_z S_z,
/// in rad/us. Each unordered pair is counted once.
#[derive(Debug, Clone, PartialEq)]
pub struct XXZCouplings {
    pub perp: DMatrix<f64>,
    pub parallel: DMatrix<f64>,
}

impl XXZCouplings {
    pub fn xx(j: &DMatrix<f64>) -> Self {
        Self {
            perp: j.clone(),
            parallel: DMatrix::zeros(j.nrows(), j.ncols()),
        }
    }

    pub fn from_matrix(j: &CouplingMatrix, perp_scale: f64, parallel_scale: f64) -> Self {
        Self {
            perp: &j.values * perp_scale,
            parallel: &j.values * parallel_scale,
        }
    }

    pub fn n(&self) -> usize {
        self.perp.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.perp.nrows();
        for m in [&self.perp, &self.parallel] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if m.nrows() != n { m.nrows() } else { m.ncols() },
                });
            }
            for i in 0..n {
                if m[(i, i)] != 0.0 {
                    return Err(Error::Domain(format!("nonzero diagonal coupling at site {i}")));
                }
                for j in i + 1..n {
                    if m[(i, j)] != m[(j, i)] {
                        return Err(Error::Domain(format!("asymmetric coupling between {i} and {j}")));
                    }
                }
            }
        }
        if n == 0 {
            return Err(Error::invalid("couplings", "need at least one spin"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct FlipTerm {
    pub lo: usize,
    pub hi: usize,
    /// J^perp / 2, the flip-flop matrix element.
    pub amp: f64,
}

/// Uniform transverse drive rabi * sum_i S_axis^i.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive {
    pub axis: Axis,
    pub rabi: f64,
}

/// Matrix-free XXZ Hamiltonian plus an optional global drive.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    diag: Vec<f64>,
    flips: Vec<FlipTerm>,
    drive: Option<Drive>,
}

impl Hamiltonian {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn drive(&self) -> Option<Drive> {
        self.drive
    }

    pub(crate) fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub(crate) fn flip_terms(&self) -> &[FlipTerm] {
        &self.flips
    }

    /// True when the Hamiltonian commutes with total S_z.
    pub fn conserves_sz(&self) -> bool {
        self.drive.is_none()
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            diag: vec![0.0; 1 << n],
            flips: Vec::new(),
            drive: None,
        }
    }

    /// Adds rabi * sum_i S_axis^i. A z drive is folded into the diagonal.
    pub fn with_drive(&self, axis: Axis, rabi: f64) -> Self {
        let mut h = self.clone();
        match axis {
            Axis::Z => {
                let half = h.n as f64 / 2.0;
                for (s, d) in h.diag.iter_mut().enumerate() {
                    *d += rabi * (s.count_ones() as f64 - half);
                }
            }
            _ => {
                assert!(h.drive.is_none(), "only one transverse drive supported");
                h.drive = Some(Drive { axis, rabi });
            }
        }
        h
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            diag: self.diag.iter().map(|d| d * factor).collect(),
            flips: self
                .flips
                .iter()
                .map(|f| FlipTerm {
                    amp: f.amp * factor,
                    ..*f
                })
                .collect(),
            drive: self.drive.map(|d| Drive {
                rabi: d.rabi * factor,
                ..d
            }),
        }
    }

    /// y = H x
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim());
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.diag) {
            *yi = xi * d;
        }
        let dim = self.dim();
        for f in &self.flips {
            let (bl, bh) = (bit(f.lo), bit(f.hi));
            // runs of bl states with lo set and hi clear, paired with lo clear and hi set
            for outer in (0..dim).step_by(bh << 1) {
                for mid in (outer..outer + bh).step_by(bl << 1) {
                    let (a0, b0) = (mid + bl, mid + bh);
                    let (head, tail) = y.split_at_mut(b0);
                    let ya = &mut head[a0..a0 + bl];
                    let yb = &mut tail[..bl];
                    let xa = &x[a0..a0 + bl];
                    let xb = &x[b0..b0 + bl];
                    for i in 0..bl {
                        ya[i] += xb[i] * f.amp;
                        yb[i] += xa[i] * f.amp;
                    }
                }
            }
        }
        if let Some(drive) = self.drive {
            let half = 0.5 * drive.rabi;
            // <up|S_x|down> = 1/2, <up|S_y|down> = -i/2
            let (to_up, to_down) = match drive.axis {
                Axis::X => (Complex64::new(half, 0.0), Complex64::new(half, 0.0)),
                Axis::Y => (Complex64::new(0.0, -half), Complex64::new(0.0, half)),
                Axis::Z => unreachable!("z drive is diagonal"),
            };
            let halfdim = self.dim() >> 1;
            for site in 0..self.n {
                let b = bit(site);
                for k in 0..halfdim {
                    let down = super::insert_zero_bit(k, site);
                    let up = down | b;
                    let xd = x[down];
                    let xu = x[up];
                    y[up] += to_up * xd;
                    y[down] += to_down * xu;
                }
            }
        }
    }

    pub fn apply_state(&self, state: &SpinState) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply(state.amplitudes(), &mut out);
        out
    }

    /// <psi|H|psi>
    pub fn expectation(&self, state: &SpinState) -> f64 {
        let hpsi = self.apply_state(state);
        state
            .amplitudes()
            .iter()
            .zip(&hpsi)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Cheap upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let dmax = self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let flips: f64 = self.flips.iter().map(|f| f.amp.abs()).sum();
        let drive = self.drive.map_or(0.0, |d| 0.5 * d.rabi.abs() * self.n as f64);
        dmax + flips + drive
    }

    /// Dense complex matrix; only for small systems and tests.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        let mut col = vec![Complex64::new(0.0, 0.0); dim];
        for j in 0..dim {
            e[j] = Complex64::new(1.0, 0.0);
            self.apply(&e, &mut col);
            for i in 0..dim {
                m[(i, j)] = col[i];
            }
            e[j] = Complex64::new(0.0, 0.0);
        }
        m
    }
}

/// Builds the matrix-free representation of an XXZ coupling set.
pub fn build_hamiltonian(c: &XXZCouplings) -> Result<Hamiltonian> {
    c.validate()?;
    let n = c.n();
    if n > 26 {
        return Err(Error::invalid(
            "couplings",
            format!("{n} spins exceed the state-vector limit"),
        ));
    }
    let dim = 1usize << n;
    let mut diag = vec![0.0; dim];
    let mut flips = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let perp = c.perp[(i, j)];
            if perp != 0.0 {
                flips.push(FlipTerm {
                    lo: i,
                    hi: j,
                    amp: 0.5 * perp,
                });
            }
            let par = c.parallel[(i, j)];
            if par != 0.0 {
                let q = 0.25 * par;
                let mask = bit(i) | bit(j);
                for (s, d) in diag.iter_mut().enumerate() {
                    // aligned pair: +1/4, anti-aligned: -1/4
                    let m = s & mask;
                    if m == 0 || m == mask {
                        *d += q;
                    } else {
                        *d -= q;
                    }
                }
            }
        }
    }
    Ok(Hamiltonian {
        n,
        diag,
        flips,
        drive: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn pair(j: f64, par: f64) -> XXZCouplings {
        let mut perp = DMatrix::zeros(2, 2);
        perp[(0, 1)] = j;
        perp[(1, 0)] = j;
        let mut p = DMatrix::zeros(2, 2);
        p[(0, 1)] = par;
        p[(1, 0)] = par;
        XXZCouplings { perp, parallel: p }
    }

    #[test]
    fn flip_flop_splitting() {
        let j = 1.7;
        let h = build_hamiltonian(&pair(j, 0.0)).unwrap();
        let dense = h.to_dense().map(|c| c.re);
        let mut ev: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let expect = [-j / 2.0, 0.0, 0.0, j / 2.0];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ising_is_diagonal() {
        let h = build_hamiltonian(&pair(0.0, 2.0)).unwrap();
        let m = h.to_dense();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(m[(i, j)], Complex64::new(0.0, 0.0));
                }
            }
        }
        assert_eq!(m[(0, 0)].re, 0.5);
        assert_eq!(m[(1, 1)].re, -0.5);
    }

    #[test]
    fn drive_matrix_elements() {
        let h = Hamiltonian::zero(1).with_drive(Axis::Y, 2.0);
        let m = h.to_dense();
        // basis order: down (0), up (1); S_y = [[0, i/2], [-i/2, 0]]
        assert_eq!(m[(1, 0)], Complex64::new(0.0, -1.0));
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 1.0));
        let h = Hamiltonian::zero(1).with_drive(Axis::X, 2.0);
        assert_eq!(h.to_dense()[(1, 0)], Complex64::new(1.0, 0.0));
        let h = Hamiltonian::zero(1).with_drive(Axis::Z, 2.0);
        assert_eq!(h.to_dense()[(1, 1)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn validation() {
        let mut c = pair(1.0, 0.0);
        c.perp[(0, 1)] = 2.0;
        assert!(build_hamiltonian(&c).is_err());
        let mut c = pair(1.0, 0.0);
        c.parallel = DMatrix::zeros(3, 3);
        assert!(matches!(build_hamiltonian(&c), Err(Error::DimensionMismatch { .. })));
        let mut c = pair(1.0, 0.0);
        c.perp[(0, 0)] = 1.0;
        assert!(build_hamiltonian(&c).is_err());
    }

    #[test]
    fn hermitian_with_drive() {
        let mut perp = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { (i + j) as f64 * 0.3 });
        perp[(0, 1)] = 0.7;
        perp[(1, 0)] = 0.7;
        let par = perp.map(|x| -0.5 * x);
        let h = build_hamiltonian(&XXZCouplings { perp, parallel: par })
            .unwrap()
            .with_drive(Axis::Y, 1.3);
        let m = h.to_dense();
        assert!((&m - m.adjoint()).norm() < 1e-15);
    }
}
