//! Per-center traces, averaged observables and their CSV/JSON forms.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RUN_SCHEMA: &str = "rydberg-reversal/run-result v1";
pub const AVERAGE_SCHEMA: &str = "rydberg-reversal/disorder-average v1";

/// Coupling diagnostics of the whole ensemble at one sample point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// Wall-clock time including pulse durations, us.
    pub clock: f64,
    /// J_m / 2pi in MHz, NaN when undefined.
    pub jm_mhz: f64,
    /// ||J(t) - J(0)||_F / ||J(t)||_F
    pub delta_j: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub solver: String,
    pub n_atoms: usize,
    pub cluster_size: Option<usize>,
    pub seed: Option<u64>,
    pub jm0_mhz: Option<f64>,
    pub config_hash: Option<String>,
    #[serde(default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Column name of the sample axis, e.g. "t_us".
    pub axis: String,
    pub x: Vec<f64>,
    /// Spin index of each trace.
    pub centers: Vec<usize>,
    /// traces[c][i] = (sx, sy, sz) of center c at x[i].
    pub traces: Vec<Vec<[f64; 3]>>,
    pub diagnostics: Vec<Diagnostic>,
    pub meta: RunMeta,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

impl RunResult {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Center-averaged spin vector at sample i.
    pub fn mean_vector(&self, i: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (a, o) in out.iter_mut().enumerate() {
            *o = mean(self.traces.iter().map(|t| t[i][a]));
        }
        out
    }

    /// Mean of S_x cos(phi) + S_y sin(phi) over centers.
    pub fn magnetization(&self, phi: f64) -> Vec<f64> {
        let (s, c) = phi.sin_cos();
        (0..self.len())
            .map(|i| {
                let v = self.mean_vector(i);
                c * v[0] + s * v[1]
            })
            .collect()
    }

    /// Phase-maximized transverse magnetization of the center average.
    pub fn contrast(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let v = self.mean_vector(i);
                v[0].hypot(v[1])
            })
            .collect()
    }

    /// Standard deviation over centers of the projected magnetization.
    pub fn spread(&self, phi: f64) -> Vec<f64> {
        let (s, c) = phi.sin_cos();
        (0..self.len())
            .map(|i| {
                let vals: Vec<f64> = self.traces.iter().map(|t| c * t[i][0] + s * t[i][1]).collect();
                let m = mean(vals.iter().copied());
                mean(vals.iter().map(|v| (v - m) * (v - m))).sqrt()
            })
            .collect()
    }

    /// Largest absolute difference between corresponding trace entries.
    pub fn max_trace_difference(&self, other: &RunResult) -> Result<f64> {
        if self.centers != other.centers || self.x.len() != other.x.len() {
            return Err(Error::Domain("run results cover different centers or samples".into()));
        }
        let mut worst = 0.0f64;
        for (a, b) in self.traces.iter().zip(&other.traces) {
            for (u, v) in a.iter().zip(b) {
                for k in 0..3 {
                    worst = worst.max((u[k] - v[k]).abs());
                }
            }
        }
        Ok(worst)
    }

    /// Index of the sample closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        (0..self.len())
            .min_by(|&a, &b| (self.x[a] - x).abs().total_cmp(&(self.x[b] - x).abs()))
            .unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let hash = self.meta.config_hash.as_deref().unwrap_or("none");
        let _ = writeln!(out, "# {RUN_SCHEMA} config_hash={hash}");
        let _ = writeln!(
            out,
            "{},magnetization,contrast,spread,sx,sy,sz,clock_us,jm_mhz,delta_j",
            self.axis
        );
        let m = self.magnetization(0.0);
        let c = self.contrast();
        let s = self.spread(0.0);
        for i in 0..self.len() {
            let v = self.mean_vector(i);
            let _ = write!(
                out,
                "{},{},{},{},{},{},{}",
                self.x[i], m[i], c[i], s[i], v[0], v[1], v[2]
            );
            match self.diagnostics.get(i) {
                Some(d) => {
                    let _ = writeln!(out, ",{},{},{}", d.clock, fmt_opt(d.jm_mhz), fmt_opt(d.delta_j));
                }
                None => out.push_str(",,,\n"),
            }
        }
        out
    }

    /// Writes `<stem>.csv` and the `<stem>.json` sidecar.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{stem}.csv"));
        let json = dir.join(format!("{stem}.json"));
        fs::write(&csv, self.to_csv())?;
        fs::write(&json, serde_json::to_string_pretty(self)?)?;
        Ok((csv, json))
    }
}

fn fmt_opt(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        String::new()
    }
}

/// Independent disorder realizations of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderAverage {
    pub realizations: Vec<RunResult>,
}

impl DisorderAverage {
    pub fn new(realizations: Vec<RunResult>) -> Result<Self> {
        let first = realizations
            .first()
            .ok_or_else(|| Error::Domain("disorder average needs at least one realization".into()))?;
        if realizations.iter().any(|r| r.x != first.x) {
            return Err(Error::Domain("realizations use different sample grids".into()));
        }
        Ok(Self { realizations })
    }

    pub fn x(&self) -> &[f64] {
        &self.realizations[0].x
    }

    pub fn axis(&self) -> &str {
        &self.realizations[0].axis
    }

    fn average(&self, f: impl Fn(&RunResult) -> Vec<f64>) -> Vec<f64> {
        let per: Vec<Vec<f64>> = self.realizations.iter().map(f).collect();
        (0..self.x().len()).map(|i| mean(per.iter().map(|p| p[i]))).collect()
    }

    pub fn magnetization(&self, phi: f64) -> Vec<f64> {
        self.average(|r| r.magnetization(phi))
    }

    /// Realization-averaged phase contrast.
    pub fn contrast(&self) -> Vec<f64> {
        self.average(RunResult::contrast)
    }

    /// Standard error of the mean contrast across realizations.
    pub fn contrast_sem(&self) -> Vec<f64> {
        let n = self.realizations.len();
        let per: Vec<Vec<f64>> = self.realizations.iter().map(RunResult::contrast).collect();
        (0..self.x().len())
            .map(|i| {
                if n < 2 {
                    return 0.0;
                }
                let m = mean(per.iter().map(|p| p[i]));
                let var = per.iter().map(|p| (p[i] - m).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            })
            .collect()
    }

    pub fn jm_mhz(&self) -> Vec<f64> {
        self.average(|r| r.diagnostics.iter().map(|d| d.jm_mhz).collect())
    }

    pub fn delta_j(&self) -> Vec<f64> {
        self.average(|r| r.diagnostics.iter().map(|d| d.delta_j).collect())
    }

    /// Mean columns, then one magnetization and one contrast column per realization.
    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {AVERAGE_SCHEMA} config_hash={config_hash} realizations={}",
            self.realizations.len()
        );
        let _ = write!(
            out,
            "{},magnetization,contrast,contrast_sem,jm_mhz,delta_j",
            self.axis()
        );
        for r in 0..self.realizations.len() {
            let _ = write!(out, ",magnetization_r{r}");
        }
        for r in 0..self.realizations.len() {
            let _ = write!(out, ",contrast_r{r}");
        }
        out.push('\n');
        let m = self.magnetization(0.0);
        let c = self.contrast();
        let sem = self.contrast_sem();
        let has_diag = self.realizations.iter().all(|r| r.diagnostics.len() == r.x.len());
        let (jm, dj) = if has_diag {
            (self.jm_mhz(), self.delta_j())
        } else {
            (vec![f64::NAN; m.len()], vec![f64::NAN; m.len()])
        };
        let per_m: Vec<Vec<f64>> = self.realizations.iter().map(|r| r.magnetization(0.0)).collect();
        let per: Vec<Vec<f64>> = self.realizations.iter().map(RunResult::contrast).collect();
        for i in 0..self.x().len() {
            let _ = write!(
                out,
                "{},{},{},{},{},{}",
                self.x()[i],
                m[i],
                c[i],
                sem[i],
                fmt_opt(jm[i]),
                fmt_opt(dj[i])
            );
            for p in per_m.iter().chain(&per) {
                let _ = write!(out, ",{}", p[i]);
            }
            out.push('\n');
        }
        out
    }
}
