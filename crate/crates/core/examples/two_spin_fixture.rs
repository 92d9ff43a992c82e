//! Two coupled spins starting along x: the magnetization follows
//! 0.5 cos(J t / 2) exactly.
//!
//!     cargo run --release --example two_spin_fixture

use nalgebra::Vector3;
use rydberg_reversal::couplings::{coupling_matrix, InteractionParams};
use rydberg_reversal::quantum::{
    build_hamiltonian, evolve, initial_product_state, magnetization, EvolutionConfig, XXZCouplings,
};

fn main() -> rydberg_reversal::Result<()> {
    // 10 um apart along x, perpendicular to the quantization axis
    let positions = vec![Vector3::zeros(), Vector3::new(10.0, 0.0, 0.0)];
    let j = coupling_matrix(&positions, &InteractionParams::default())?;
    let h = build_hamiltonian(&XXZCouplings::from_matrix(&j, 1.0, 0.0))?;
    let jval = j.get(0, 1);
    println!("J = {jval:.5} rad/us");
    let psi0 = initial_product_state(2, 0.0);
    let mut worst = 0.0f64;
    for k in 0..=10 {
        let t = 0.1 * k as f64;
        let m = magnetization(&evolve(&psi0, &h, t, &EvolutionConfig::dense())?, 0.0, None)?;
        let exact = 0.5 * (jval * t / 2.0).cos();
        worst = worst.max((m - exact).abs());
        println!("t = {t:.1} us  M = {m:+.10}  closed form {exact:+.10}");
    }
    println!("largest deviation {worst:.2e}");
    Ok(())
}
