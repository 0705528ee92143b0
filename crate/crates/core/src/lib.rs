pub mod action;
pub mod cli;
pub mod error;
pub mod gen;
pub mod logic;
pub mod models;
pub mod network;
pub mod principles;
pub mod rank;
pub mod ranking;
pub mod session;
pub mod decision;
pub mod dsl;
pub mod epsilon;
