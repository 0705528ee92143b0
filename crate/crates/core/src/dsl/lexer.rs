use super::{ErrorKind, ParseError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u64),
    Minus,
    Arrow,
    Implies,
    Pipe,
    Amp,
    Bang,
    LParen,
    RParen,
    Colon,
    Comma,
    Eq,
    Question,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Minus => "`-`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Implies => "`=>`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bang => "`!`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Question => "`?`".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub col: usize,
}

/// Tokenizes one line (comment already stripped). Columns are 1-based
/// character offsets.
pub(crate) fn lex_line(line: &str, lineno: usize) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned { tok: Tok::Ident(chars[start..i].iter().collect()), col });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<u64>().map_err(|_| {
                ParseError::new(ErrorKind::Lexical, lineno, col, format!("integer `{text}` out of range"))
            })?;
            out.push(Spanned { tok: Tok::Int(value), col });
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('=', Some('>')) => (Tok::Implies, 2),
            ('-', _) => (Tok::Minus, 1),
            ('|', _) => (Tok::Pipe, 1),
            ('&', _) => (Tok::Amp, 1),
            ('!', _) => (Tok::Bang, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (':', _) => (Tok::Colon, 1),
            (',', _) => (Tok::Comma, 1),
            ('=', _) => (Tok::Eq, 1),
            ('?', _) => (Tok::Question, 1),
            _ => {
                return Err(ParseError::new(
                    ErrorKind::Lexical,
                    lineno,
                    col,
                    format!("unexpected character `{c}`"),
                ))
            }
        };
        out.push(Spanned { tok, col });
        i += width;
    }
    Ok(out)
}

/// Splits text into `(line number, content)` with comments and trailing
/// carriage returns removed.
pub(crate) fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n').enumerate().map(|(k, raw)| {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        (k + 1, content)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_and_columns() {
        let toks = lex_line("edge c -> r", 1).unwrap();
        assert_eq!(toks[2].tok, Tok::Arrow);
        assert_eq!(toks[2].col, 8);
        let toks = lex_line("dmc (u) => l ?", 1).unwrap();
        assert!(toks.iter().any(|t| t.tok == Tok::Implies));
    }

    #[test]
    fn rejects_unknown_characters() {
        let err = lex_line("util 1 : a $ b", 4).unwrap_err();
        assert_eq!((err.kind, err.line, err.column), (ErrorKind::Lexical, 4, 12));
    }

    #[test]
    fn strips_comments_and_crlf() {
        let ls: Vec<_> = lines("a # x\r\nb\r\n").collect();
        assert_eq!(ls, vec![(1, "a "), (2, "b"), (3, "")]);
    }
}
