//! A hand-written event timeline: XX evolution, a z rotation, XXZ evolution
//! and a partial reversal, run exactly and printed as JSON.
//!
//!     cargo run --release --example custom_timeline

use std::f64::consts::FRAC_PI_2;

use rydberg_reversal::couplings::InteractionParams;
use rydberg_reversal::ensemble::{CloudParams, Ensemble};
use rydberg_reversal::protocols::{execute_timeline, CouplingForm, Event, EventTimeline, Solver};
use rydberg_reversal::quantum::{Axis, EvolutionConfig};

fn main() -> rydberg_reversal::Result<()> {
    let timeline = EventTimeline::new(vec![
        Event::Measure { label: 0.0 },
        Event::free(0.2),
        Event::Measure { label: 0.2 },
        Event::Rotation {
            axis: Axis::Z,
            angle: FRAC_PI_2,
        },
        Event::free_with(
            0.2,
            CouplingForm {
                perp: 1.0,
                parallel: 0.5,
            },
        ),
        Event::Measure { label: 0.4 },
        Event::SetSignScale { scale: -1.1 },
        Event::free_with(
            0.2,
            CouplingForm {
                perp: 1.0,
                parallel: 0.5,
            },
        ),
        Event::Measure { label: 0.6 },
    ]);
    println!("{}", timeline.to_json()?);
    let ensemble = Ensemble::sample(&CloudParams::new(8, 8.1, 12.0, 11e-6, 7))?;
    let run = execute_timeline(
        &ensemble,
        &InteractionParams::default(),
        &timeline,
        &Solver::Exact(EvolutionConfig::default()),
    )?;
    let (mx, c) = (run.magnetization(0.0), run.contrast());
    for i in 0..run.len() {
        println!("t = {:.1} us  M_x = {:+.5}  contrast = {:.5}", run.x[i], mx[i], c[i]);
    }
    Ok(())
}
