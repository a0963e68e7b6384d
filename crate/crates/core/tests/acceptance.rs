//! Runs the built-in acceptance suite and prints one line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the report
//! lines with timings as they come back.

use qhom_core::selftest::run_all;

#[test]
fn acceptance_criteria() {
    let reports = run_all();
    assert_eq!(reports.len(), 11);
    let mut failed = 0;
    for r in &reports {
        println!("{} [{:.1}s]", r.line(), r.seconds);
        if !r.passed() {
            failed += 1;
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
