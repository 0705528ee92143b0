//! Should you take an umbrella when it is cloudy?

use qdt::decision::{expected_utility_rank, ought, EpistemicState, OughtMode, RiskPolicy};
use qdt::dsl::parse_action;
use qdt::logic::Prop;
use qdt::models;

fn main() {
    let doc = models::umbrella();
    let names = doc.names();
    let es = EpistemicState::new(doc.network.clone(), doc.utility.clone()).unwrap();
    let (c, u) = (Prop::var(0), Prop::var(2));

    let cloudy = es.prior().condition(&c).unwrap();
    let baseline = expected_utility_rank(&Prop::True, &cloudy, es.utility()).unwrap();
    let with_umbrella = es.prior().condition(&(u & c.clone())).unwrap();
    let act = expected_utility_rank(&Prop::var(2), &with_umbrella, es.utility()).unwrap();
    println!("mu(true | c) = {}", baseline.verdict);
    println!("mu(u | u, c) = {}", act.verdict);

    for (action, given) in [("(u)", c.clone()), ("(!r)", c & !Prop::var(2))] {
        let a = parse_action(action, &names).unwrap();
        let v = ought(&es, &a, &given, RiskPolicy::RiskAverse, OughtMode::Standard).unwrap();
        println!(
            "O({} | {}): {} ({} vs {})",
            a.display(&names),
            given.display(&names),
            if v.assertable { "assertable" } else { "not assertable" },
            v.action_value,
            v.baseline_value
        );
    }
}
