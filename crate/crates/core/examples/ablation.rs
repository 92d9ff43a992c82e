//! Reversed magnetization against reversal time with ideal transfer, finite
//! transfer pulses, thermal motion and both, plus the coupling drift.
//!
//!     cargo run --release --example ablation

use rydberg_reversal::cli::{run_experiment, Backend, ExperimentConfig};

const CONFIG: &str = r#"
experiment = "ablation"
preset = "0.43MHz"
realizations = 2
seed = 3

[mace]
cluster_size = 10
centers = 8

[protocol]
cycles = [1.0, 3.0, 6.0]
"#;

fn main() -> rydberg_reversal::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?.resolve()?;
    let report = run_experiment(&cfg, Backend::Mace)?;
    let x = report.series[0].1.x().to_vec();
    print!("{:>12}", "t_rev (us)");
    for t in &x {
        print!("{t:9.2}");
    }
    println!();
    for (name, avg) in &report.series {
        print!("{name:>12}");
        for m in avg.magnetization(0.0) {
            print!("{m:9.4}");
        }
        println!();
    }
    let both = report.get("both").expect("both series");
    print!("{:>12}", "||dJ||");
    for d in both.delta_j() {
        print!("{d:9.4}");
    }
    println!();
    Ok(())
}
