//! Random search for violations of the sure-thing principle and of weak
//! consistency.
//!
//! cargo run --release --example principle_search -- [trials] [seed]

use qdt::principles::{check_principle, replay, Principle, PrincipleConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    for principle in [Principle::SureThing, Principle::WeakConsistency] {
        let report = check_principle(&PrincipleConfig::new(principle, trials, seed)).expect("search runs");
        println!(
            "{principle}: {} trials, {} vacuous, antecedent held {} times, {} confirmed, {} rejected",
            report.trials_run,
            report.vacuous,
            report.antecedent_held,
            report.counterexamples.len(),
            report.rejected.len()
        );
        if let Some(f) = report.counterexamples.first() {
            println!("first confirmed violation (trial {}):", f.trial);
            for v in &f.values {
                println!("  {}  action {}  baseline {}  assertable {}", v.query, v.action, v.baseline, v.assertable);
            }
            println!("{}\n{}", f.model, f.query);
            println!("replays: {:?}", replay(principle, f));
        }
    }
}
