use crate::{CliResult, Failure};
use rvm_lab::{hard_checks_pass, run_suite, IneqReport, LabError, Suite};

fn table(reports: &[IneqReport]) -> String {
    let w = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut s = format!("{:<w$}  {:>9}  {:>12}  {:>10}  {:<4}  {:<4}  note\n", "name", "samples", "max ratio", "constant", "hard", "pass");
    for r in reports {
        let c = r.constant.map(|c| format!("{c:.4e}")).unwrap_or_else(|| "-".into());
        s += &format!(
            "{:<w$}  {:>9}  {:>12.6e}  {:>10}  {:<4}  {:<4}  {}\n",
            r.name,
            r.samples,
            r.max_ratio,
            c,
            if r.hard { "yes" } else { "no" },
            if r.pass { "ok" } else { "FAIL" },
            r.note
        );
    }
    s
}

/// JSON records on stdout, one per check, then the summary table on stderr.
pub fn run(suite: Suite, seed: u64, count: Option<usize>) -> CliResult {
    let reports = run_suite(suite, seed, count).map_err(|e| match e {
        LabError::Config(m) | LabError::Input(m) => Failure::Usage(m),
        e => Failure::Assertion(e.to_string()),
    })?;
    for r in &reports {
        println!("{}", serde_json::to_string(r).expect("report serializes"));
    }
    eprint!("{}", table(&reports));
    if hard_checks_pass(&reports) {
        Ok(())
    } else {
        let failed: Vec<&str> = reports.iter().filter(|r| r.hard && !r.pass).map(|r| r.name.as_str()).collect();
        Err(Failure::Assertion(format!("hard checks failed: {}", failed.join(", "))))
    }
}
