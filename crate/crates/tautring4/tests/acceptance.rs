//! One line per acceptance criterion. Criteria whose published claim does
//! not hold are expected to fail; the test pins those verdicts so that a
//! change in either direction is noticed.

use std::time::Instant;
use tautring4::verify::suite::{run, CHECKS};

/// Known failures and the reason each one fails.
const EXPECTED_FAILURES: [(usize, &str); 3] = [
    (5, "several printed genus-three relations do not vanish on the boundary"),
    (6, "the printed display differs from the derived relation in a few coordinates"),
    (7, "the genus-zero lemma fails for five points and the genus-two map has a kernel"),
];

fn main() {
    let mut unexpected = Vec::new();
    for (id, _) in CHECKS {
        let start = Instant::now();
        let check = run(id).unwrap_or_else(|e| panic!("check {id} could not run: {e}"));
        println!("{check}\n    ({:.1}s)", start.elapsed().as_secs_f64());
        let expected_failure = EXPECTED_FAILURES.iter().find(|f| f.0 == id);
        match (check.pass, expected_failure) {
            (true, None) | (false, Some(_)) => {}
            (true, Some((_, why))) => unexpected.push(format!("{id} passed although {why}")),
            (false, None) => unexpected.push(format!("{id} failed")),
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected verdicts: {unexpected:?}");
        std::process::exit(1);
    }
}
