//! Text formats: `.qdt` model documents and `.qdq` query scripts.
//!
//! ```text
//! model umbrella
//! var c
//! var r persist=2
//! edge c -> r
//! rank c : T=0, F=0
//! rank r | c=T : T=0, F=0
//! rank r | c=F : T=1, F=0
//! util -1 : r & !u
//! ```

mod lexer;
mod parser;

use std::fmt::{self, Write as _};

use crate::action::ActionDnf;
use crate::decision::UtilityRanking;
use crate::error::Result;
use crate::logic::Prop;
use crate::network::CausalNetwork;
use crate::rank::Rank;

pub use parser::{parse_action, parse_formula, parse_model, parse_query};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Lexical,
    Syntax,
    Semantic,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lexical => "lexical error",
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Semantic => "error",
        })
    }
}

/// A positioned diagnostic. Lines and columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(kind: ErrorKind, line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { kind, line, column, message: message.into(), expected: Vec::new() }
    }

    pub(crate) fn expecting(mut self, expected: &[&str]) -> Self {
        self.expected = expected.iter().map(|s| s.to_string()).collect();
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.kind, self.message)?;
        if !self.expected.is_empty() {
            write!(f, ", expected {}", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// A parsed model: the network plus the utility clauses it was written with.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelDocument {
    pub name: String,
    pub network: CausalNetwork,
    pub utility_clauses: Vec<(i64, Prop)>,
    pub utility: UtilityRanking,
}

impl ModelDocument {
    pub fn new(name: impl Into<String>, network: CausalNetwork, utility_clauses: Vec<(i64, Prop)>) -> Result<Self> {
        let utility = UtilityRanking::from_clauses(network.num_vars(), &utility_clauses)?;
        Ok(ModelDocument { name: name.into(), network, utility_clauses, utility })
    }

    pub fn names(&self) -> Vec<String> {
        self.network.names()
    }

    /// Canonical text form. Parsing it yields an equal document.
    pub fn serialize(&self) -> String {
        serialize_model(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShowTarget {
    Ranking,
    Utility,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Observe(Prop),
    Do(ActionDnf),
    Ought { action: ActionDnf, strong: bool },
    Dmc { action: ActionDnf, outcome: Prop },
    Show(ShowTarget),
    Reset,
}

/// Commands paired with their source line.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct QueryScript {
    pub commands: Vec<(usize, Command)>,
}

fn rank_text(r: Rank) -> String {
    match r {
        Rank::Finite(v) => v.to_string(),
        Rank::Infinite => "inf".into(),
    }
}

pub fn serialize_model(doc: &ModelDocument) -> String {
    let net = &doc.network;
    let names = net.names();
    let mut out = String::new();
    writeln!(out, "model {}", doc.name).unwrap();
    for v in net.variables() {
        if v.persistence == 1 {
            writeln!(out, "var {}", v.name).unwrap();
        } else {
            writeln!(out, "var {} persist={}", v.name, v.persistence).unwrap();
        }
    }
    for (a, b) in net.edges() {
        writeln!(out, "edge {} -> {}", names[a], names[b]).unwrap();
    }
    for i in 0..net.num_vars() {
        let table = net.table(i);
        let parents = table.parents();
        for (k, row) in table.rows().iter().enumerate() {
            let cond = if parents.is_empty() {
                String::new()
            } else {
                let assign: Vec<String> = parents
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| format!("{}={}", names[p], if k >> j & 1 == 1 { 'T' } else { 'F' }))
                    .collect();
                format!(" | {}", assign.join(", "))
            };
            writeln!(out, "rank {}{} : T={}, F={}", names[i], cond, rank_text(row.if_true), rank_text(row.if_false))
                .unwrap();
        }
    }
    for (lvl, p) in &doc.utility_clauses {
        writeln!(out, "util {} : {}", lvl, p.display(&names)).unwrap();
    }
    out
}

/// One command in script syntax, without the trailing newline.
pub fn command_text(cmd: &Command, names: &[String]) -> String {
    match cmd {
        Command::Observe(p) => format!("observe {}", p.display(names)),
        Command::Do(a) => format!("do {}", a.display(names)),
        Command::Ought { action, strong } => {
            format!("ought {} ?{}", action.display(names), if *strong { " strong" } else { "" })
        }
        Command::Dmc { action, outcome } => format!("dmc {} => {} ?", action.display(names), outcome.display(names)),
        Command::Show(ShowTarget::Ranking) => "show ranking".into(),
        Command::Show(ShowTarget::Utility) => "show utility".into(),
        Command::Reset => "reset".into(),
    }
}

pub fn serialize_query(script: &QueryScript, names: &[String]) -> String {
    let mut out = String::new();
    for (_, cmd) in &script.commands {
        out.push_str(&command_text(cmd, names));
        out.push('\n');
    }
    out
}
