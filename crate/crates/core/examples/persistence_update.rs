//! How persistence strength shapes what an action changes.
//!
//! A lamp `l` is caused by a switch `s`; a cat `c` may wander in. Doing
//! `l` (forcing the lamp on) either explains itself or drags the switch
//! along, depending on how strongly the switch persists.

use qdt::action::{doubled_network_ranking, post_action_trace, ActionConjunct};
use qdt::dsl::parse_model;
use qdt::network::{atomic_action_update, AtomicAction};

fn model(persist: u64) -> String {
    format!(
        "model lamp
var s persist={persist}
var l persist=1
var c persist=2
edge s -> l
rank s : T=0, F=1
rank c : T=1, F=0
rank l | s=F : T=2, F=0
rank l | s=T : T=0, F=2
"
    )
}

fn main() {
    for persist in [1, 3] {
        let doc = parse_model(&model(persist)).unwrap();
        let net = &doc.network;
        let names = doc.names();
        let belief = qdt::network::stratified_joint(net).condition(&qdt::logic::Prop::lit(1, false)).unwrap();
        let a = ActionConjunct::single(1, true);
        let trace = post_action_trace(net, &belief, &a).unwrap();
        assert_eq!(trace.ranking, doubled_network_ranking(net, &belief, &a).unwrap());
        println!("switch persistence {persist}, lamp seen off, then do(l):");
        for (w, prev) in &trace.argmin {
            let from: Vec<String> = prev.iter().map(|p| p.describe(&names)).collect();
            println!("  {}  {:<8} from {}", trace.ranking.rank(*w), w.describe(&names), from.join(" / "));
        }
    }

    // without observations the intervention just cuts the lamp from the switch
    let doc = parse_model(&model(1)).unwrap();
    let k = atomic_action_update(&doc.network, AtomicAction::new(1, true)).unwrap();
    println!("intervention on the prior:");
    for (w, r) in k.support() {
        println!("  {r}  {}", w.describe(&doc.names()));
    }
}
