//! Run a built-in experiment, write its report and replay it.

use paracalc::experiments::{self, ExperimentSpec};
use paracalc::Result;

fn main() -> Result<()> {
    for (name, description) in experiments::list_experiments() {
        println!("{name:<30} {description}");
    }

    let mut spec = ExperimentSpec::named("paraproduct-identity");
    spec.n = Some(vec![64, 128]);
    spec.samples = Some(8);
    let report = experiments::run_with_workers(&spec, 2)?;
    for c in &report.checks {
        println!("{}: {:.2e} ({}) {}", c.name, c.value, c.bound, if c.passed { "pass" } else { "FAIL" });
    }

    let dir = std::env::temp_dir().join("paracalc-example-report");
    report.write(&dir)?;
    let outcome = experiments::replay_with_workers(&report, 1)?;
    println!("wrote {}; replay identical: {}", dir.display(), outcome.identical());
    Ok(())
}
