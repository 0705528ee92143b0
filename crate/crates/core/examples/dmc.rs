//! Decision-making conditionals: would pushing the switch up turn the
//! light on?

use qdt::decision::{dmc, EpistemicState};
use qdt::dsl::{parse_action, parse_formula};
use qdt::models;

fn main() {
    let doc = models::switch();
    let names = doc.names();
    let es = EpistemicState::new(doc.network.clone(), doc.utility.clone()).unwrap();
    let cases = [("(u)", "l", "!l"), ("(!u)", "l", "!l"), ("(u & n)", "l", "true"), ("(u)", "l", "l")];
    for (a, b, c) in cases {
        let action = parse_action(a, &names).unwrap();
        let outcome = parse_formula(b, &names).unwrap();
        let given = parse_formula(c, &names).unwrap();
        println!("{a} > {b} | {c}: {}", dmc(&es, &action, &outcome, &given).unwrap());
    }
}
