use std::collections::{BTreeMap, HashMap};

use super::lexer::{lex_line, lines, Spanned, Tok};
use super::{Command, ErrorKind, ModelDocument, ParseError, QueryScript, ShowTarget};
use crate::action::{ActionConjunct, ActionDnf};
use crate::logic::{Prop, MAX_VARS};
use crate::network::{Diagnostic, NetworkBuilder, RankTable, Row, Variable};
use crate::rank::Rank;

struct Cursor<'a> {
    toks: &'a [Spanned],
    pos: usize,
    line: usize,
    eol: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Spanned], line: usize, len: usize) -> Self {
        Cursor { toks, pos: 0, line, eol: len + 1 }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.eol, |s| s.col)
    }

    fn bump(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|s| &s.tok);
        self.pos += 1;
        t
    }

    fn syntax(&self, expected: &[&str]) -> ParseError {
        let found = self.peek().map_or("end of line".to_string(), Tok::describe);
        ParseError::new(ErrorKind::Syntax, self.line, self.col(), format!("unexpected {found}"))
            .expecting(expected)
    }

    fn semantic(&self, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(ErrorKind::Semantic, self.line, col, msg)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.syntax(&[&tok.describe()]))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        let col = self.col();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, col))
            }
            _ => Err(self.syntax(&[what])),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(&[&format!("`{kw}`")])),
        }
    }

    fn uint(&mut self, what: &str) -> Result<u64, ParseError> {
        match self.peek() {
            Some(&Tok::Int(v)) => {
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.syntax(&[what])),
        }
    }

    fn end(&mut self) -> Result<(), ParseError> {
        if self.peek().is_some() {
            Err(self.syntax(&["end of line"]))
        } else {
            Ok(())
        }
    }
}

/// Name resolution for formulas and actions.
pub(crate) struct Vocab<'a> {
    index: HashMap<&'a str, usize>,
}

impl<'a> Vocab<'a> {
    pub(crate) fn new(names: &'a [String]) -> Self {
        Vocab { index: names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect() }
    }

    fn resolve(&self, cur: &Cursor<'_>, name: &str, col: usize) -> Result<usize, ParseError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| cur.semantic(col, format!("unknown variable `{name}`")))
    }
}

fn formula(cur: &mut Cursor<'_>, vocab: &Vocab<'_>) -> Result<Prop, ParseError> {
    let mut p = conjunction(cur, vocab)?;
    while cur.eat(&Tok::Pipe) {
        p = p | conjunction(cur, vocab)?;
    }
    Ok(p)
}

fn conjunction(cur: &mut Cursor<'_>, vocab: &Vocab<'_>) -> Result<Prop, ParseError> {
    let mut p = negation(cur, vocab)?;
    while cur.eat(&Tok::Amp) {
        p = p & negation(cur, vocab)?;
    }
    Ok(p)
}

fn negation(cur: &mut Cursor<'_>, vocab: &Vocab<'_>) -> Result<Prop, ParseError> {
    if cur.eat(&Tok::Bang) {
        return Ok(!negation(cur, vocab)?);
    }
    atom(cur, vocab)
}

fn atom(cur: &mut Cursor<'_>, vocab: &Vocab<'_>) -> Result<Prop, ParseError> {
    const EXPECTED: &[&str] = &["identifier", "`true`", "`false`", "`(`", "`!`"];
    let col = cur.col();
    match cur.peek().cloned() {
        Some(Tok::Ident(s)) => {
            cur.bump();
            match s.as_str() {
                "true" => Ok(Prop::True),
                "false" => Ok(Prop::False),
                _ => Ok(Prop::Var(vocab.resolve(cur, &s, col)?)),
            }
        }
        Some(Tok::LParen) => {
            cur.bump();
            let p = formula(cur, vocab)?;
            cur.expect(Tok::RParen)?;
            Ok(p)
        }
        _ => Err(cur.syntax(EXPECTED)),
    }
}

fn action(cur: &mut Cursor<'_>, vocab: &Vocab<'_>) -> Result<ActionDnf, ParseError> {
    let mut disjuncts = vec![action_conjunct(cur, vocab)?];
    while cur.eat(&Tok::Pipe) {
        disjuncts.push(action_conjunct(cur, vocab)?);
    }
    Ok(ActionDnf::new(disjuncts).expect("at least one disjunct"))
}

fn action_conjunct(cur: &mut Cursor<'_>, vocab: &Vocab<'_>) -> Result<ActionConjunct, ParseError> {
    let open = cur.col();
    cur.expect(Tok::LParen)?;
    let mut lits = vec![literal(cur, vocab)?];
    while cur.eat(&Tok::Amp) {
        lits.push(literal(cur, vocab)?);
    }
    cur.expect(Tok::RParen)?;
    ActionConjunct::new(lits).map_err(|_| cur.semantic(open, "inconsistent conjunct"))
}

fn literal(cur: &mut Cursor<'_>, vocab: &Vocab<'_>) -> Result<(usize, bool), ParseError> {
    let value = !cur.eat(&Tok::Bang);
    let (name, col) = cur.ident("literal")?;
    Ok((vocab.resolve(cur, &name, col)?, value))
}

fn rank_value(cur: &mut Cursor<'_>) -> Result<Rank, ParseError> {
    match cur.peek() {
        Some(&Tok::Int(v)) => {
            cur.bump();
            Ok(Rank::Finite(v))
        }
        Some(Tok::Ident(s)) if s == "inf" => {
            cur.bump();
            Ok(Rank::Infinite)
        }
        _ => Err(cur.syntax(&["non-negative integer", "`inf`"])),
    }
}

fn truth(cur: &mut Cursor<'_>) -> Result<bool, ParseError> {
    match cur.peek() {
        Some(Tok::Ident(s)) if s == "T" => {
            cur.bump();
            Ok(true)
        }
        Some(Tok::Ident(s)) if s == "F" => {
            cur.bump();
            Ok(false)
        }
        _ => Err(cur.syntax(&["`T`", "`F`"])),
    }
}

struct RankLine {
    var: usize,
    line: usize,
    col: usize,
    assignment: Vec<(usize, bool, usize)>,
    row: Row,
}

fn at(kind: ErrorKind, line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::new(kind, line, col, msg)
}

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> Result<ModelDocument, ParseError> {
    let mut name: Option<String> = None;
    let mut vars: Vec<Variable> = Vec::new();
    let mut var_pos: Vec<(usize, usize)> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut rank_lines: Vec<RankLine> = Vec::new();
    let mut utils: Vec<(i64, Prop)> = Vec::new();

    for (lineno, content) in lines(text) {
        let toks = lex_line(content, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&toks, lineno, content.chars().count());
        let vocab = Vocab::new(&names);
        let head_col = cur.col();
        let head = match cur.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return Err(cur.syntax(&["`model`", "`var`", "`edge`", "`rank`", "`util`"])),
        };
        match head.as_str() {
            "model" => {
                cur.bump();
                let (n, _) = cur.ident("model name")?;
                cur.end()?;
                if name.is_some() {
                    return Err(cur.semantic(head_col, "duplicate `model` declaration"));
                }
                name = Some(n);
            }
            "var" => {
                cur.bump();
                let (v, col) = cur.ident("variable name")?;
                if ["true", "false", "inf", "T", "F"].contains(&v.as_str()) {
                    return Err(cur.semantic(col, format!("`{v}` is reserved")));
                }
                let mut persistence = 1;
                if cur.peek().is_some() {
                    let pcol = cur.col();
                    cur.keyword("persist")?;
                    cur.expect(Tok::Eq)?;
                    persistence = cur.uint("persistence strength")?;
                    if persistence == 0 {
                        return Err(cur.semantic(pcol, "persistence must be at least 1"));
                    }
                }
                cur.end()?;
                if names.contains(&v) {
                    return Err(cur.semantic(col, format!("duplicate variable `{v}`")));
                }
                if names.len() == MAX_VARS {
                    return Err(cur.semantic(col, format!("too many variables (limit {MAX_VARS})")));
                }
                names.push(v.clone());
                vars.push(Variable::with_persistence(v, persistence));
                var_pos.push((lineno, col));
            }
            "edge" => {
                cur.bump();
                let (a, acol) = cur.ident("variable name")?;
                cur.expect(Tok::Arrow)?;
                let (b, bcol) = cur.ident("variable name")?;
                cur.end()?;
                let ai = vocab.resolve(&cur, &a, acol)?;
                let bi = vocab.resolve(&cur, &b, bcol)?;
                if ai == bi {
                    return Err(cur.semantic(acol, format!("cycle: self loop on `{a}`")));
                }
                if edges.iter().any(|e| e.0 == ai && e.1 == bi) {
                    return Err(cur.semantic(acol, format!("duplicate edge {a} -> {b}")));
                }
                edges.push((ai, bi, lineno, acol));
            }
            "rank" => {
                cur.bump();
                let (v, vcol) = cur.ident("variable name")?;
                let var = vocab.resolve(&cur, &v, vcol)?;
                let mut assignment = Vec::new();
                if cur.eat(&Tok::Pipe) {
                    loop {
                        let (p, pcol) = cur.ident("parent name")?;
                        let pi = vocab.resolve(&cur, &p, pcol)?;
                        cur.expect(Tok::Eq)?;
                        let value = truth(&mut cur)?;
                        if assignment.iter().any(|&(q, _, _)| q == pi) {
                            return Err(cur.semantic(pcol, format!("parent `{p}` assigned twice")));
                        }
                        assignment.push((pi, value, pcol));
                        if !cur.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                cur.expect(Tok::Colon)?;
                cur.keyword("T")?;
                cur.expect(Tok::Eq)?;
                let if_true = rank_value(&mut cur)?;
                cur.expect(Tok::Comma)?;
                cur.keyword("F")?;
                cur.expect(Tok::Eq)?;
                let if_false = rank_value(&mut cur)?;
                cur.end()?;
                rank_lines.push(RankLine {
                    var,
                    line: lineno,
                    col: head_col,
                    assignment,
                    row: Row::new(if_true, if_false),
                });
            }
            "util" => {
                cur.bump();
                let negative = cur.eat(&Tok::Minus);
                let col = cur.col();
                let magnitude = cur.uint("integer utility level")?;
                let level = i64::try_from(magnitude)
                    .map_err(|_| cur.semantic(col, "utility level out of range"))?;
                cur.expect(Tok::Colon)?;
                let p = formula(&mut cur, &vocab)?;
                cur.end()?;
                utils.push((if negative { -level } else { level }, p));
            }
            _ => return Err(cur.syntax(&["`model`", "`var`", "`edge`", "`rank`", "`util`"])),
        }
    }

    let name = name.ok_or_else(|| at(ErrorKind::Syntax, 1, 1, "missing `model` declaration").expecting(&["`model`"]))?;
    let n = vars.len();

    // parent sets and rows
    let mut graph_parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b, _, _) in &edges {
        graph_parents[b].push(a);
    }
    for p in &mut graph_parents {
        p.sort_unstable();
    }
    let mut rows: Vec<BTreeMap<usize, Row>> = vec![BTreeMap::new(); n];
    let mut last_line: Vec<Option<(usize, usize)>> = vec![None; n];
    for rl in &rank_lines {
        let mut given: Vec<usize> = rl.assignment.iter().map(|a| a.0).collect();
        given.sort_unstable();
        let parents = &graph_parents[rl.var];
        if &given != parents {
            let list = |v: &[usize]| v.iter().map(|&i| names[i].as_str()).collect::<Vec<_>>().join(", ");
            return Err(at(
                ErrorKind::Semantic,
                rl.line,
                rl.col,
                format!(
                    "rank row for `{}` conditions on [{}] but its graph parents are [{}]",
                    names[rl.var],
                    list(&given),
                    list(parents)
                ),
            ));
        }
        let idx = rl
            .assignment
            .iter()
            .filter(|a| a.1)
            .map(|a| 1usize << parents.iter().position(|&p| p == a.0).unwrap())
            .sum::<usize>();
        if rows[rl.var].insert(idx, rl.row).is_some() {
            return Err(at(ErrorKind::Semantic, rl.line, rl.col, format!("duplicate table row for `{}`", names[rl.var])));
        }
        if !rl.row.is_normalized() {
            return Err(at(
                ErrorKind::Semantic,
                rl.line,
                rl.col,
                format!("row not normalized: `{}` needs a zero entry", names[rl.var]),
            ));
        }
        last_line[rl.var] = Some((rl.line, rl.col));
    }

    let mut builder = NetworkBuilder::new();
    for v in &vars {
        builder.variable(v.clone());
    }
    for &(a, b, _, _) in &edges {
        builder.edge(a, b);
    }
    for i in 0..n {
        let parents = &graph_parents[i];
        let expected = 1usize << parents.len();
        let (line, col) = last_line[i].unwrap_or(var_pos[i]);
        if rows[i].is_empty() {
            return Err(at(ErrorKind::Semantic, line, col, format!("missing rank table for `{}`", names[i])));
        }
        if let Some(missing) = (0..expected).find(|k| !rows[i].contains_key(k)) {
            let cfg = parents
                .iter()
                .enumerate()
                .map(|(j, &p)| format!("{}={}", names[p], if missing >> j & 1 == 1 { 'T' } else { 'F' }))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(at(ErrorKind::Semantic, line, col, format!("missing row `{} | {cfg}`", names[i])));
        }
        builder.table(i, RankTable::new(parents.clone(), rows[i].values().copied().collect()));
    }

    let network = match builder.build() {
        Ok(net) => net,
        Err(crate::error::Error::InvalidNetwork(diags)) => {
            let d = &diags[0];
            let (line, col) = match d {
                Diagnostic::Cycle(cycle) if cycle.len() >= 2 => {
                    let a = names.iter().position(|x| *x == cycle[0]).unwrap_or(0);
                    let b = names.iter().position(|x| *x == cycle[1]).unwrap_or(0);
                    edges
                        .iter()
                        .find(|e| e.0 == a && e.1 == b)
                        .map_or((1, 1), |e| (e.2, e.3))
                }
                _ => (1, 1),
            };
            return Err(at(ErrorKind::Semantic, line, col, d.to_string()));
        }
        Err(other) => return Err(at(ErrorKind::Semantic, 1, 1, other.to_string())),
    };
    ModelDocument::new(name, network, utils).map_err(|e| at(ErrorKind::Semantic, 1, 1, e.to_string()))
}

/// Parses a query script against the model's variable names.
pub fn parse_query(text: &str, names: &[String]) -> Result<QueryScript, ParseError> {
    let vocab = Vocab::new(names);
    let mut commands = Vec::new();
    for (lineno, content) in lines(text) {
        let toks = lex_line(content, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&toks, lineno, content.chars().count());
        const HEADS: &[&str] = &["`observe`", "`do`", "`ought`", "`dmc`", "`show`", "`reset`"];
        let head = match cur.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return Err(cur.syntax(HEADS)),
        };
        let cmd = match head.as_str() {
            "observe" => {
                cur.bump();
                Command::Observe(formula(&mut cur, &vocab)?)
            }
            "do" => {
                cur.bump();
                Command::Do(action(&mut cur, &vocab)?)
            }
            "ought" => {
                cur.bump();
                let a = action(&mut cur, &vocab)?;
                cur.expect(Tok::Question)?;
                let strong = match cur.peek() {
                    Some(Tok::Ident(s)) if s == "strong" => {
                        cur.bump();
                        true
                    }
                    None => false,
                    _ => return Err(cur.syntax(&["`strong`", "end of line"])),
                };
                Command::Ought { action: a, strong }
            }
            "dmc" => {
                cur.bump();
                let a = action(&mut cur, &vocab)?;
                cur.expect(Tok::Implies)?;
                let b = formula(&mut cur, &vocab)?;
                cur.expect(Tok::Question)?;
                Command::Dmc { action: a, outcome: b }
            }
            "show" => {
                cur.bump();
                let target = match cur.peek() {
                    Some(Tok::Ident(s)) if s == "ranking" => ShowTarget::Ranking,
                    Some(Tok::Ident(s)) if s == "utility" => ShowTarget::Utility,
                    _ => return Err(cur.syntax(&["`ranking`", "`utility`"])),
                };
                cur.bump();
                Command::Show(target)
            }
            "reset" => {
                cur.bump();
                Command::Reset
            }
            _ => return Err(cur.syntax(HEADS)),
        };
        cur.end()?;
        commands.push((lineno, cmd));
    }
    Ok(QueryScript { commands })
}

/// Parses a standalone formula, as used by one-shot queries.
pub fn parse_formula(text: &str, names: &[String]) -> Result<Prop, ParseError> {
    let vocab = Vocab::new(names);
    let toks = lex_line(text, 1)?;
    let mut cur = Cursor::new(&toks, 1, text.chars().count());
    let p = formula(&mut cur, &vocab)?;
    cur.end()?;
    Ok(p)
}

/// Parses a standalone action such as `(u & !n) | (l)`.
pub fn parse_action(text: &str, names: &[String]) -> Result<ActionDnf, ParseError> {
    let vocab = Vocab::new(names);
    let toks = lex_line(text, 1)?;
    let mut cur = Cursor::new(&toks, 1, text.chars().count());
    let a = action(&mut cur, &vocab)?;
    cur.end()?;
    Ok(a)
}
