//! Run every verification suite on a generated grid and print the report.

use truss_fretsaw::generate::gen_grid;
use truss_fretsaw::verify::{verify, Suite};

fn main() -> truss_fretsaw::Result<()> {
    let truss = gen_grid(6, 6, 0.2, 11)?;
    let report = verify(&truss, &Suite::ALL, None, 0);
    for s in &report.suites {
        println!("{:<10} {}", s.suite.name(), if s.passed { "pass" } else { "FAIL" });
        for c in &s.checks {
            let value = c.value.map(|v| format!("{v:.4e}")).unwrap_or_default();
            println!("    {:<48} {:>12} {}", c.name, value, if c.passed { "" } else { "FAIL" });
        }
    }
    std::process::exit(if report.passed { 0 } else { 2 });
}
