use std::fmt;

use super::{ErrorKind, ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Identifier starting with a lowercase letter.
    Ident(String),
    /// Identifier starting with an uppercase letter.
    Var(String),
    /// Identifier starting with `_`.
    Anonymous(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    DotDot,
    Colon,
    If,
    Semicolon,
    Plus,
    Minus,
    Star,
    Slash,
    Backslash,
    Rel(crate::syntax::Relation),
    Iff,
    Implies,
    And,
    Or,
    Not,
    Forall,
    Exists,
    Top,
    Bottom,
    /// Any other character; kept so the parser can report it precisely.
    Other(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) | Tok::Anonymous(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::DotDot => f.write_str("`..`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::If => f.write_str("`:-`"),
            Tok::Semicolon => f.write_str("`;`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Backslash => f.write_str("`\\`"),
            Tok::Rel(r) => write!(f, "`{}`", r.ascii()),
            Tok::Iff => f.write_str("`<->`"),
            Tok::Implies => f.write_str("`->`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Not => f.write_str("`~`"),
            Tok::Forall => f.write_str("`forall`"),
            Tok::Exists => f.write_str("`exists`"),
            Tok::Top => f.write_str("`true`"),
            Tok::Bottom => f.write_str("`false`"),
            Tok::Other(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str, file: &str) -> Result<Vec<Token>, ParseError> {
    use crate::syntax::Relation;

    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut pos, mut line, mut column) = (0usize, 1usize, 1usize);

    macro_rules! advance {
        ($n:expr) => {
            for _ in 0..$n {
                if chars[pos] == '\n' {
                    line += 1;
                    column = 1;
                } else {
                    column += 1;
                }
                pos += 1;
            }
        };
    }

    while pos < chars.len() {
        let c = chars[pos];
        let next = chars.get(pos + 1).copied();
        let next2 = chars.get(pos + 2).copied();
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if c == '%' {
            if next == Some('*') {
                let (start_line, start_col) = (line, column);
                advance!(2);
                loop {
                    if pos >= chars.len() {
                        return Err(ParseError {
                            span: SourceSpan::new(file, start_line, start_col),
                            kind: ErrorKind::Syntax("unterminated block comment".into()),
                        });
                    }
                    if chars[pos] == '*' && chars.get(pos + 1) == Some(&'%') {
                        advance!(2);
                        break;
                    }
                    advance!(1);
                }
            } else {
                while pos < chars.len() && chars[pos] != '\n' {
                    advance!(1);
                }
            }
            continue;
        }
        let (tok_line, tok_col) = (line, column);
        let (tok, len) = if c.is_ascii_digit() {
            let mut end = pos;
            while end < chars.len() && chars[end].is_ascii_digit() {
                end += 1;
            }
            let digits: String = chars[pos..end].iter().collect();
            let value = digits.parse::<i64>().map_err(|_| ParseError {
                span: SourceSpan::new(file, tok_line, tok_col),
                kind: ErrorKind::Syntax(format!("integer literal {digits} is out of range")),
            })?;
            (Tok::Int(value), end - pos)
        } else if c.is_alphabetic() || c == '_' {
            let mut end = pos;
            while end < chars.len() && (chars[end].is_alphanumeric() || chars[end] == '_') {
                end += 1;
            }
            let word: String = chars[pos..end].iter().collect();
            let tok = match word.as_str() {
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                "true" => Tok::Top,
                "false" => Tok::Bottom,
                _ if c == '_' => Tok::Anonymous(word),
                _ if c.is_uppercase() => Tok::Var(word),
                _ => Tok::Ident(word),
            };
            (tok, end - pos)
        } else {
            match (c, next, next2) {
                ('<', Some('-'), Some('>')) => (Tok::Iff, 3),
                ('<', Some('='), _) => (Tok::Rel(Relation::Le), 2),
                ('>', Some('='), _) => (Tok::Rel(Relation::Ge), 2),
                ('!', Some('='), _) => (Tok::Rel(Relation::Ne), 2),
                ('-', Some('>'), _) => (Tok::Implies, 2),
                (':', Some('-'), _) => (Tok::If, 2),
                ('.', Some('.'), _) => (Tok::DotDot, 2),
                ('<', _, _) => (Tok::Rel(Relation::Lt), 1),
                ('>', _, _) => (Tok::Rel(Relation::Gt), 1),
                ('=', _, _) => (Tok::Rel(Relation::Eq), 1),
                ('≠', _, _) => (Tok::Rel(Relation::Ne), 1),
                ('≤', _, _) => (Tok::Rel(Relation::Le), 1),
                ('≥', _, _) => (Tok::Rel(Relation::Ge), 1),
                ('(', _, _) => (Tok::LParen, 1),
                (')', _, _) => (Tok::RParen, 1),
                ('{', _, _) => (Tok::LBrace, 1),
                ('}', _, _) => (Tok::RBrace, 1),
                (',', _, _) => (Tok::Comma, 1),
                ('.', _, _) => (Tok::Dot, 1),
                (':', _, _) => (Tok::Colon, 1),
                (';', _, _) => (Tok::Semicolon, 1),
                ('+', _, _) => (Tok::Plus, 1),
                ('-', _, _) | ('−', _, _) => (Tok::Minus, 1),
                ('*', _, _) | ('×', _, _) => (Tok::Star, 1),
                ('/', _, _) => (Tok::Slash, 1),
                ('\\', _, _) => (Tok::Backslash, 1),
                ('&', _, _) | ('∧', _, _) => (Tok::And, 1),
                ('|', _, _) | ('∨', _, _) => (Tok::Or, 1),
                ('~', _, _) | ('¬', _, _) => (Tok::Not, 1),
                ('↔', _, _) => (Tok::Iff, 1),
                ('→', _, _) => (Tok::Implies, 1),
                ('∀', _, _) => (Tok::Forall, 1),
                ('∃', _, _) => (Tok::Exists, 1),
                ('⊤', _, _) => (Tok::Top, 1),
                ('⊥', _, _) => (Tok::Bottom, 1),
                (other, _, _) => (Tok::Other(other), 1),
            }
        };
        out.push(Token {
            tok,
            line: tok_line,
            column: tok_col,
        });
        advance!(len);
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Relation;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, "t")
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect()
    }

    #[test]
    fn distinguishes_multi_character_operators() {
        assert_eq!(
            toks("a <-> b -> c <= d :- e..f."),
            vec![
                Tok::Ident("a".into()),
                Tok::Iff,
                Tok::Ident("b".into()),
                Tok::Implies,
                Tok::Ident("c".into()),
                Tok::Rel(Relation::Le),
                Tok::Ident("d".into()),
                Tok::If,
                Tok::Ident("e".into()),
                Tok::DotDot,
                Tok::Ident("f".into()),
                Tok::Dot,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn skips_comments_and_tracks_positions() {
        let tokens = tokenize("% comment\n  p(X). %* block\n *% q", "t").unwrap();
        assert_eq!(tokens[0].tok, Tok::Ident("p".into()));
        assert_eq!((tokens[0].line, tokens[0].column), (2, 3));
        let q = tokens
            .iter()
            .find(|t| t.tok == Tok::Ident("q".into()))
            .unwrap();
        assert_eq!(q.line, 3);
    }

    #[test]
    fn unicode_connectives() {
        assert_eq!(
            toks("∀V ¬p(V) ∧ q ≤"),
            vec![
                Tok::Forall,
                Tok::Var("V".into()),
                Tok::Not,
                Tok::Ident("p".into()),
                Tok::LParen,
                Tok::Var("V".into()),
                Tok::RParen,
                Tok::And,
                Tok::Ident("q".into()),
                Tok::Rel(Relation::Le),
                Tok::Eof
            ]
        );
    }
}
