//! Ranks as orders of magnitude of infinitesimal probabilities.

use qdt::epsilon::{agreement_report, joint_exponents, leading_exponent, numeric_joint, EpsilonModel};
use qdt::models;
use qdt::network::stratified_joint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let doc = models::switch();
    let net = &doc.network;
    let em = EpsilonModel::new(1e-3).unwrap();
    let p = numeric_joint(net, &em).unwrap();
    let k = stratified_joint(net);
    let exps = joint_exponents(net, &em).unwrap();
    println!("world  P            single-point  two-scale  rank");
    for (w, r) in k.iter() {
        let i = w.index();
        let single = leading_exponent(p[i], em.epsilon()).map(|e| e.to_string()).unwrap_or_else(|e| e.to_string());
        let two = exps[i].as_ref().map(|e| e.to_string()).unwrap_or_else(|e| e.to_string());
        println!("{}    {:<12.4e} {:<13} {:<10} {}", w.bitstring(3), p[i], single, two, r);
    }

    for doc in [models::umbrella(), models::switch()] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let report = agreement_report(&doc, 1e-3, 20, 1, &mut rng).unwrap();
        let compared: usize = report.checks.iter().map(|c| c.compared).sum();
        println!("{}: {} comparisons, agree = {}", report.model, compared, report.agree);
    }
}
