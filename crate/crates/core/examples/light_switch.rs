//! A robot facing a dark room: push the switch up, then learn it was up.

use qdt::dsl::{command_text, parse_query};
use qdt::models;
use qdt::session::{Outcome, Session};

fn main() {
    let doc = models::switch();
    let names = doc.names();
    let script = parse_query(models::DIALOGUE_SCRIPT, &names).unwrap();
    let mut session = Session::new(&doc).unwrap();

    println!("prior:");
    for (w, r) in session.belief().support() {
        println!("  {}  {}", r, w.describe(&names));
    }
    for (_, cmd) in &script.commands {
        let out = session.execute(cmd).unwrap();
        print!("{:<16}", command_text(cmd, &names));
        match out {
            Outcome::Ought(v) => {
                println!("{}  {} vs {}", if v.assertable { "yes" } else { "no" }, v.action_value, v.baseline_value);
                for (w, r) in v.trace.post.ranking.support() {
                    println!("    after acting: {}  {}", r, w.describe(&names));
                }
            }
            _ => {
                let worlds: Vec<String> = session.belief().support().map(|(w, r)| format!("{}@{r}", w.describe(&names))).collect();
                println!("{}", worlds.join(", "));
            }
        }
    }
}
