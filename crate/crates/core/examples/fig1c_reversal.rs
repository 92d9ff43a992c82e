//! Forward relaxation and time-reversed revival on the 0.43 MHz preset with
//! the two finite transfer pulses. A reduced center count keeps this to a
//! few minutes; the `fig1c` config runs the full version.
//!
//!     cargo run --release --example fig1c_reversal

use rydberg_reversal::cli::{run_experiment, Backend, ExperimentConfig};

const CONFIG: &str = r#"
experiment = "fig1c"
preset = "0.43MHz"
realizations = 3
seed = 1

[mace]
cluster_size = 12
centers = 12

[protocol]
t1 = 0.4
t_max = 1.0
sample_step = 0.05
"#;

fn main() -> rydberg_reversal::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?.resolve()?;
    let report = run_experiment(&cfg, Backend::Mace)?;
    let fwd = report.get("forward").expect("forward series");
    let rev = report.get("reversal").expect("reversal series");
    let (mf, mr) = (fwd.magnetization(0.0), rev.magnetization(0.0));
    println!("  t (us)   forward   reversed");
    for (i, t) in rev.x().iter().enumerate() {
        let f = fwd.x().iter().position(|x| x == t).map(|j| format!("{:8.4}", mf[j]));
        println!("{t:8.3}  {}  {:8.4}", f.unwrap_or_else(|| "       -".into()), mr[i]);
    }
    for line in &report.summary {
        println!("{line}");
    }
    Ok(())
}
