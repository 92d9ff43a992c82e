//! Samples one cloud per preset and prints its length and energy scales,
//! then follows the coupling drift caused by thermal motion.
//!
//!     cargo run --release --example sample_ensemble

use rydberg_reversal::cli::Preset;
use rydberg_reversal::couplings::{coupling_deviation, coupling_matrix, median_nn_strength, InteractionParams};
use rydberg_reversal::ensemble::Ensemble;
use rydberg_reversal::units::angular_to_mhz;

fn main() -> rydberg_reversal::Result<()> {
    let interaction = InteractionParams::default();
    for name in Preset::names() {
        let preset = Preset::load(name)?;
        let ensemble = Ensemble::sample(&preset.cloud().params(1))?;
        let j = coupling_matrix(&ensemble.positions, &interaction)?;
        println!(
            "{name}: N = {}, r_med = {:.2} um (table {:.1}), J_m/2pi = {:.3} MHz (table {}), closest pair {:.2} um",
            ensemble.len(),
            ensemble.median_nn_distance(),
            preset.rmed_um,
            angular_to_mhz(median_nn_strength(&j)?),
            preset.jm_nominal_mhz,
            ensemble.min_pair_distance(),
        );
    }

    let preset = Preset::load("0.43MHz")?;
    let ensemble = Ensemble::sample(&preset.cloud().params(1))?;
    let j0 = coupling_matrix(&ensemble.positions, &interaction)?;
    println!("\ncoupling drift at 11 uK");
    for cycles in [1.0, 2.0, 4.0, 6.0] {
        let t = cycles * preset.cycle_time();
        let jt = coupling_matrix(&ensemble.positions_at(t), &interaction)?;
        println!(
            "  {cycles} cycles ({t:.2} us): ||dJ|| = {:.3}",
            coupling_deviation(&jt, &j0)?
        );
    }
    Ok(())
}
