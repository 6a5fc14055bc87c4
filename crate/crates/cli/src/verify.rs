//! `isotune verify <suite>`.

use clap::{Args, Subcommand};

use isotune_core::harness::suites::{
    verify_bounds, verify_invariance, verify_lemmas, verify_oracles, BoundsConfig, InvarianceConfig, SuiteReport,
};

use crate::CliError;

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Certificate soundness over learners x streams x seeds.
    Bounds(BoundsArgs),
    /// Scalar inequalities on dense grids.
    Lemmas,
    /// Scale and translation invariance of the simplex learners.
    Invariance,
    /// Isotuning factor-two and square-root oracles plus hand traces.
    Oracles,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Number of seeds, 1..=S
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    /// Rounds per run
    #[arg(long = "T", default_value_t = 10_000)]
    pub t: usize,
}

fn print(report: &SuiteReport) {
    for c in report.failures() {
        match c.seed {
            Some(s) => println!("FAIL {}: {} (reproduce with seed {s})", c.name, c.detail),
            None => println!("FAIL {}: {}", c.name, c.detail),
        }
    }
    println!("{}: {} passed, {} failed in {:.2?}", report.suite, report.passed(), report.failed(), report.elapsed);
}

pub fn cmd_verify(suite: &Suite) -> Result<(), CliError> {
    let report = match suite {
        Suite::Bounds(a) => {
            if a.seeds == 0 || a.t == 0 {
                return Err(CliError::Config("--seeds and --T must be positive".into()));
            }
            let cfg = BoundsConfig { seeds: (1..=a.seeds).collect(), rounds: a.t, ..BoundsConfig::default() };
            let (report, summary) = verify_bounds(&cfg);
            println!("max regret/bound ratio {:.4} over {} runs", summary.max_ratio, summary.runs);
            report
        }
        Suite::Lemmas => verify_lemmas(),
        Suite::Invariance => verify_invariance(&InvarianceConfig::default()),
        Suite::Oracles => verify_oracles(),
    };
    print(&report);
    if report.ok() {
        Ok(())
    } else {
        let seed = report.failures().find_map(|c| c.seed);
        Err(CliError::Violation(match seed {
            Some(s) => format!("{} violations; minimal reproduction seed {s}", report.failed()),
            None => format!("{} violations", report.failed()),
        }))
    }
}
