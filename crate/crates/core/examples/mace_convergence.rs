//! Cluster-size convergence of MACE on a 12-atom ensemble, against the
//! exact full-system evolution of the same protocol.
//!
//!     cargo run --release --example mace_convergence

use rydberg_reversal::couplings::InteractionParams;
use rydberg_reversal::ensemble::{CloudParams, Ensemble};
use rydberg_reversal::mace::MaceConfig;
use rydberg_reversal::protocols::{
    build_reversal_timeline, cluster_size_scan, execute_timeline, ReversalParams, Solver, TransferModel,
};
use rydberg_reversal::quantum::EvolutionConfig;

fn main() -> rydberg_reversal::Result<()> {
    let ensemble = Ensemble::sample(&CloudParams::new(12, 8.1, 14.0, 11e-6, 8))?;
    let interaction = InteractionParams::default();
    let p = ReversalParams {
        t1: 0.4,
        transfer: TransferModel::experimental(),
        ..ReversalParams::default()
    };
    let sizes: Vec<usize> = (1..=6).map(|k| 2 * k).collect();
    let scan = cluster_size_scan(&ensemble, &interaction, &p, &sizes, &MaceConfig::default())?;
    let exact = execute_timeline(
        &ensemble,
        &interaction,
        &build_reversal_timeline(&p, &[])?,
        &Solver::Exact(EvolutionConfig::dense()),
    )?;
    let m_exact = exact.magnetization(0.0)[0];
    println!("exact N = 12: M(t_rev) = {m_exact:.8}");
    for (n, m) in sizes.iter().zip(scan.magnetization(0.0)) {
        println!("n = {n:2}: M(t_rev) = {m:.8}  (diff {:+.2e})", m - m_exact);
    }
    Ok(())
}
