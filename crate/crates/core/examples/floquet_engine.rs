//! Average Hamiltonians of the two pulse cycles, and the delay ratios that
//! reach a target anisotropy.
//!
//!     cargo run --release --example floquet_engine

use rydberg_reversal::protocols::floquet::{
    average_hamiltonian, eq2_form, ideal_delay_ratio, mirrored_cycle, pulsed_delay_ratio, sequential_cycle,
};

fn main() -> rydberg_reversal::Result<()> {
    let tau = 0.01;
    for ratio in [0.0, 1.0, 6.14] {
        let tau1 = ratio * tau;
        let m = average_hamiltonian(&mirrored_cycle(tau1, tau))?;
        let s = average_hamiltonian(&sequential_cycle(tau1, tau))?;
        let ideal = eq2_form(tau1, tau);
        println!("tau1/tau = {ratio}");
        println!(
            "  mirrored   c = ({:.4}, {:.4}, {:.4})  sum {:.3}  anisotropy {:.4}",
            m.c_xx,
            m.c_yy,
            m.c_zz,
            m.sum(),
            m.anisotropy()
        );
        println!(
            "  sequential c = ({:.4}, {:.4}, {:.4})  sum {:.3}  closes {}",
            s.c_xx,
            s.c_yy,
            s.c_zz,
            s.sum(),
            s.closes
        );
        println!(
            "  ideal form perp {:.4} parallel {:.4}  anisotropy {:.4}",
            ideal.perp,
            ideal.parallel,
            ideal.anisotropy()
        );
    }
    for a in [0.14, 0.33, 0.6, 1.0] {
        println!(
            "anisotropy {a}: ideal tau1/tau = {:.3}, pulsed tau1/tau = {:.3}",
            ideal_delay_ratio(a)?,
            pulsed_delay_ratio(a)?
        );
    }
    Ok(())
}
