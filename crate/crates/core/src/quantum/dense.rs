//! Dense eigendecomposition propagator.
//!
//! Couplings are real, so every supported Hamiltonian is real symmetric in
//! the computational basis up to a global z rotation: S_z-conserving terms
//! are diagonalized sector by sector, an x drive in one full block, and a y
//! drive through U_z = exp(-i pi/2 S_z), which maps S_x onto S_y and leaves
//! the XXZ part invariant.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::hamiltonian::Hamiltonian;
use super::{bit, Axis};

#[derive(Debug, Clone)]
struct Block {
    states: Vec<usize>,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct DenseEigen {
    n: usize,
    blocks: Vec<Block>,
    y_frame: bool,
}

impl DenseEigen {
    pub fn new(h: &Hamiltonian) -> Self {
        let n = h.n();
        let dim = h.dim();
        let (groups, drive_x, y_frame) = match h.drive() {
            None => {
                let mut groups = vec![Vec::new(); n + 1];
                for s in 0..dim {
                    groups[s.count_ones() as usize].push(s);
                }
                (groups, 0.0, false)
            }
            Some(d) => ((vec![(0..dim).collect()]), d.rabi, d.axis == Axis::Y),
        };
        let mut position = vec![0usize; dim];
        let blocks = groups
            .into_iter()
            .filter(|g: &Vec<usize>| !g.is_empty())
            .map(|states| {
                for (k, &s) in states.iter().enumerate() {
                    position[s] = k;
                }
                let m = states.len();
                let mut mat = DMatrix::<f64>::zeros(m, m);
                for (k, &s) in states.iter().enumerate() {
                    mat[(k, k)] = h.diagonal()[s];
                }
                for f in h.flip_terms() {
                    let (bl, bh) = (bit(f.lo), bit(f.hi));
                    for (k, &s) in states.iter().enumerate() {
                        if s & bl != 0 && s & bh == 0 {
                            let t = s ^ bl ^ bh;
                            let kt = position[t];
                            mat[(k, kt)] += f.amp;
                            mat[(kt, k)] += f.amp;
                        }
                    }
                }
                if drive_x != 0.0 {
                    for site in 0..n {
                        let b = bit(site);
                        for &s in &states {
                            if s & b == 0 {
                                let (kd, ku) = (position[s], position[s | b]);
                                mat[(kd, ku)] += 0.5 * drive_x;
                                mat[(ku, kd)] += 0.5 * drive_x;
                            }
                        }
                    }
                }
                let eig = SymmetricEigen::new(mat);
                Block {
                    states,
                    energies: eig.eigenvalues.iter().copied().collect(),
                    vectors: eig.eigenvectors,
                }
            })
            .collect();
        Self { n, blocks, y_frame }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// All eigenvalues, unsorted.
    pub fn energies(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| b.energies.iter().copied()).collect()
    }

    /// psi <- exp(-i H t) psi
    pub fn propagate(&self, psi: &mut [Complex64], t: f64) {
        if self.y_frame {
            self.z_frame(psi, 1.0);
        }
        for b in &self.blocks {
            let m = b.states.len();
            let re = DVector::from_iterator(m, b.states.iter().map(|&s| psi[s].re));
            let im = DVector::from_iterator(m, b.states.iter().map(|&s| psi[s].im));
            let cr = b.vectors.tr_mul(&re);
            let ci = b.vectors.tr_mul(&im);
            let mut pr = DVector::zeros(m);
            let mut pi = DVector::zeros(m);
            for k in 0..m {
                let phase = Complex64::from_polar(1.0, -b.energies[k] * t);
                let c = Complex64::new(cr[k], ci[k]) * phase;
                pr[k] = c.re;
                pi[k] = c.im;
            }
            let or = &b.vectors * pr;
            let oi = &b.vectors * pi;
            for (k, &s) in b.states.iter().enumerate() {
                psi[s] = Complex64::new(or[k], oi[k]);
            }
        }
        if self.y_frame {
            self.z_frame(psi, -1.0);
        }
    }

    /// Multiplies by U_z^dagger (sign = +1) or U_z (sign = -1).
    fn z_frame(&self, psi: &mut [Complex64], sign: f64) {
        let half = self.n as f64 / 2.0;
        for (s, a) in psi.iter_mut().enumerate() {
            let m = s.count_ones() as f64 - half;
            *a *= Complex64::from_polar(1.0, sign * std::f64::consts::FRAC_PI_2 * m);
        }
    }
}
