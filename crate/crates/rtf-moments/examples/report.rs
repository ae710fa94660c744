//! Driving the verification harness from code and writing a JSON report.

use rtf_moments::harness::{cmd_verify_second, render_moment_table, write_report, Command, RunConfig};

fn main() -> rtf_moments::Result<()> {
    let mut cfg = RunConfig::new(Command::VerifySecond);
    cfg.apply_text("weights = 12, 16\nlevels = 1, 5\nhecke = 1, 2\ntruncation-tol = 1e-8\n")?;
    cfg.timings = false;
    let report = cmd_verify_second(&cfg)?;
    print!("{}", render_moment_table(&report));
    let path = std::env::temp_dir().join("rtf-second-moment.json");
    write_report(&report, &path)?;
    println!("report written to {}", path.display());
    Ok(())
}
