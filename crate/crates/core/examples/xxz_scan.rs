//! Floquet-engineered XXZ dynamics: forward magnetization after a fixed time
//! for several anisotropies, and its full recovery under ideal reversal.
//!
//!     cargo run --release --example xxz_scan

use rydberg_reversal::couplings::InteractionParams;
use rydberg_reversal::ensemble::{CloudParams, Ensemble};
use rydberg_reversal::protocols::{anisotropy_scan, FloquetMode, FloquetParams, ReversalParams, Solver};
use rydberg_reversal::quantum::EvolutionConfig;

fn main() -> rydberg_reversal::Result<()> {
    let ensemble = Ensemble::sample(&CloudParams::new(10, 8.1, 14.0, 11e-6, 4))?;
    let floquet = FloquetParams {
        tau1: 0.0,
        tau: 0.01,
        cycles: 1,
        mode: FloquetMode::IdealXxz,
    };
    let reversal = ReversalParams {
        t1: 0.5,
        prep: Some(0.1),
        ..ReversalParams::default()
    };
    let anis = [0.14, 0.33, 0.6, 1.0];
    let scan = anisotropy_scan(
        &ensemble,
        &InteractionParams::default(),
        &anis,
        &floquet,
        &reversal,
        &Solver::Exact(EvolutionConfig::dense()),
    )?;
    let (p, f, r) = (
        scan.post_prep.magnetization(0.0),
        scan.forward.magnetization(0.0),
        scan.reversed.magnetization(0.0),
    );
    println!("anisotropy  post-prep  forward(t1)  reversed");
    for i in 0..anis.len() {
        println!("{:10.2}  {:9.5}  {:11.5}  {:8.5}", anis[i], p[i], f[i], r[i]);
    }
    Ok(())
}
