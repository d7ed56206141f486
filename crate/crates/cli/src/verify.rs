use std::time::Instant;

use clap::Args;

use macc_core::checks;

use crate::common::Failure;

#[derive(Args)]
pub struct VerifyArgs {
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Run only the seeded fault-injection check.
    #[arg(long)]
    inject_fault: bool,
}

pub fn run(args: VerifyArgs) -> Result<(), Failure> {
    let started = Instant::now();
    let outcomes = if args.inject_fault {
        vec![checks::fault_detection(args.seed)]
    } else {
        checks::run_all(args.seed)
    };

    let mut failed = 0usize;
    for o in &outcomes {
        println!(
            "{}\t{}\tcases={}\t{}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.cases,
            o.detail
        );
        if !o.passed {
            failed += 1;
        }
    }
    println!(
        "RESULT\t{}\t{}/{} checks passed",
        if failed == 0 { "pass" } else { "fail" },
        outcomes.len() - failed,
        outcomes.len()
    );
    eprintln!("verify finished in {:?}", started.elapsed());

    if failed > 0 {
        return Err(Failure::invariant(format!("{failed} check(s) failed")));
    }
    Ok(())
}
