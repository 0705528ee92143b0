//! Parse, serialize and re-parse models, including random ones.

use qdt::dsl::parse_model;
use qdt::gen::{random_document, GenConfig};
use qdt::models;
use qdt::network::stratified_joint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let doc = models::umbrella();
    let text = doc.serialize();
    print!("{text}");
    assert_eq!(parse_model(&text).unwrap(), doc);

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let cfg = GenConfig::default();
    for k in 0..100 {
        let doc = random_document(&cfg, &format!("random{k}"), &mut rng);
        let again = parse_model(&doc.serialize()).unwrap();
        assert_eq!(stratified_joint(&again.network), stratified_joint(&doc.network));
        assert_eq!(again.utility, doc.utility);
    }
    println!("100 random models round-trip");
    print!("{}", random_document(&cfg, "sample", &mut rng).serialize());
}
