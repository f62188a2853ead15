//! Builds a scenario, writes its dump and report, re-imports the dump and
//! verifies it again.

use causal_surgery::scenario::{demo_config, run_build, run_verify};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("causal-surgery-roundtrip-{}", std::process::id()));
    let mut cfg = demo_config("join_pair_flrw_ultrastatic").expect("demo exists");
    cfg.time_samples_per_unit = 4;

    let built = run_build(&cfg, &dir)?;
    print!("{}", built.summary());
    let again = run_verify(&cfg, &dir.join(&cfg.outputs.metric_csv), None)?;
    print!("{}", again.summary());

    let same = built.checks.iter().zip(&again.checks).all(|(a, b)| a.passed == b.passed);
    println!("verdicts agree: {same}");
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
