//! Acceptance run: one pass/fail line per criterion, nonzero exit on failure.

use ctent::selftest;
use std::process::{Command, ExitCode};

fn main() -> ExitCode {
    ctent::init_threads();
    let mut all = true;
    for n in 1..=9 {
        let c = selftest::criterion(n).expect("criteria 1 to 9 exist");
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("criterion {n}: {status} ({}, {:.2}s)", c.name, c.seconds);
        if !c.passed {
            println!("    {}", c.detail);
        }
        all &= c.passed;
    }

    let dir = std::env::temp_dir().join(format!("ctent-acceptance-{}", std::process::id()));
    let out = Command::new(env!("CARGO_BIN_EXE_ctent"))
        .args(["selftest", "--level", "full", "--format", "csv", "--figures"])
        .arg(&dir)
        .output()
        .expect("ctent binary runs");
    let failing: Vec<String> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| l.contains(",false,"))
        .map(str::to_string)
        .collect();
    let ok = out.status.success() && failing.is_empty();
    println!(
        "criterion 10: {} (selftest --level full exited with {:?}{})",
        if ok { "PASS" } else { "FAIL" },
        out.status.code(),
        if failing.is_empty() { String::new() } else { format!("; failing: {}", failing.join(" | ")) }
    );
    let _ = std::fs::remove_dir_all(&dir);
    all &= ok;

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
