//! Bundled example models and scripts.

use crate::dsl::{parse_model, ModelDocument};

pub const UMBRELLA: &str = include_str!("../models/umbrella.qdt");
pub const UMBRELLA_SCRIPT: &str = include_str!("../models/umbrella.qdq");
pub const SWITCH: &str = include_str!("../models/switch.qdt");
pub const DIALOGUE_SCRIPT: &str = include_str!("../models/dialogue.qdq");

/// The cloudy/rain/umbrella model.
pub fn umbrella() -> ModelDocument {
    parse_model(UMBRELLA).expect("bundled model parses")
}

/// Two switches and a light wired in series.
pub fn switch() -> ModelDocument {
    parse_model(SWITCH).expect("bundled model parses")
}
