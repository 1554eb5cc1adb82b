use super::lexer::Tok;
use super::{Cursor, ParseError};
use crate::formula::{Formula, Sort, Term, Variable};
use crate::syntax::BinOp;

pub(super) struct FormulaParser<'c> {
    cur: &'c mut Cursor,
    /// Variables bound by enclosing quantifiers, innermost last.
    scope: Vec<Variable>,
}

impl<'c> FormulaParser<'c> {
    pub(super) fn new(cur: &'c mut Cursor) -> Self {
        FormulaParser {
            cur,
            scope: Vec::new(),
        }
    }

    pub(super) fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if self.cur.eat(&Tok::Iff) {
            let rhs = self.implication()?;
            if self.cur.peek() == &Tok::Iff {
                return Err(self.cur.error("`<->` is not associative; add parentheses"));
            }
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.cur.eat(&Tok::Implies) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while self.cur.eat(&Tok::Or) {
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = Vec::new();
        // chained comparisons splice into the surrounding conjunction
        let push = |f: Formula, chained: bool, parts: &mut Vec<Formula>| match f {
            Formula::And(inner) if chained => parts.extend(inner),
            other => parts.push(other),
        };
        let (f, chained) = self.unary()?;
        push(f, chained, &mut parts);
        while self.cur.eat(&Tok::And) {
            let (f, chained) = self.unary()?;
            push(f, chained, &mut parts);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    /// Returns the formula and whether it is an expanded comparison chain.
    fn unary(&mut self) -> Result<(Formula, bool), ParseError> {
        match self.cur.peek().clone() {
            Tok::Not => {
                self.cur.bump();
                let (f, _) = self.unary()?;
                Ok((Formula::not(f), false))
            }
            Tok::Forall | Tok::Exists => {
                let universal = self.cur.bump() == Tok::Forall;
                let mut vars = Vec::new();
                while let Some(v) = self.try_variable()? {
                    vars.push(v);
                }
                if vars.is_empty() {
                    return Err(self.cur.unexpected("a variable after the quantifier"));
                }
                let depth = self.scope.len();
                self.scope.extend(vars.iter().cloned());
                let body = self.formula();
                self.scope.truncate(depth);
                let body = body?;
                let f = if universal {
                    Formula::Forall(vars, Box::new(body))
                } else {
                    Formula::Exists(vars, Box::new(body))
                };
                Ok((f, false))
            }
            Tok::Top => {
                self.cur.bump();
                Ok((Formula::True, false))
            }
            Tok::Bottom => {
                self.cur.bump();
                Ok((Formula::False, false))
            }
            Tok::LParen => {
                let saved = self.cur.pos;
                if let Ok(chain) = self.comparison_chain() {
                    return Ok(chain);
                }
                self.cur.pos = saved;
                self.cur.bump();
                let f = self.formula()?;
                self.cur.expect(&Tok::RParen, "`)`")?;
                Ok((f, false))
            }
            Tok::Ident(name)
                if !is_sort_prefix(&name, self.cur.peek_at(1))
                    && !matches!(
                        self.cur.peek_at(1),
                        Tok::Rel(_) | Tok::Plus | Tok::Minus | Tok::Star
                    ) =>
            {
                self.cur.bump();
                let mut args = Vec::new();
                if self.cur.eat(&Tok::LParen) && !self.cur.eat(&Tok::RParen) {
                    loop {
                        args.push(self.term()?);
                        if self.cur.eat(&Tok::Comma) {
                            continue;
                        }
                        self.cur.expect(&Tok::RParen, "`,` or `)`")?;
                        break;
                    }
                }
                Ok((Formula::atom(name, args), false))
            }
            _ => self.comparison_chain(),
        }
    }

    fn comparison_chain(&mut self) -> Result<(Formula, bool), ParseError> {
        let mut lhs = self.term()?;
        let mut links = Vec::new();
        while let Tok::Rel(rel) = self.cur.peek().clone() {
            self.cur.bump();
            let rhs = self.term()?;
            links.push(Formula::compare(lhs, rel, rhs.clone()));
            lhs = rhs;
        }
        match links.len() {
            0 => Err(self.cur.unexpected("a comparison symbol")),
            1 => Ok((links.pop().unwrap(), false)),
            _ => Ok((Formula::And(links), true)),
        }
    }

    fn try_variable(&mut self) -> Result<Option<Variable>, ParseError> {
        match self.cur.peek().clone() {
            Tok::Var(name) => {
                self.cur.bump();
                let sort = match self.scope.iter().rev().find(|v| v.name == name) {
                    Some(bound) => bound.sort,
                    None => Sort::from_name(&name),
                };
                Ok(Some(Variable::new(name, sort)))
            }
            Tok::Ident(prefix) if is_sort_prefix(&prefix, self.cur.peek_at(1)) => {
                self.cur.bump();
                self.cur.bump();
                let sort = if prefix == "int" {
                    Sort::Integer
                } else {
                    Sort::General
                };
                match self.cur.peek().clone() {
                    Tok::Var(name) => {
                        self.cur.bump();
                        Ok(Some(Variable::new(name, sort)))
                    }
                    _ => Err(self.cur.unexpected("a variable name after the sort prefix")),
                }
            }
            _ => Ok(None),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.cur.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.cur.bump();
            let rhs = self.product()?;
            lhs = Term::binary(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.factor()?;
        while self.cur.eat(&Tok::Star) {
            let rhs = self.factor()?;
            lhs = Term::binary(BinOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        if let Some(v) = self.try_variable()? {
            return Ok(Term::Var(v));
        }
        match self.cur.peek().clone() {
            Tok::Int(n) => {
                self.cur.bump();
                Ok(Term::Numeral(n))
            }
            Tok::Minus => {
                self.cur.bump();
                match self.cur.peek().clone() {
                    Tok::Int(n) => {
                        self.cur.bump();
                        Ok(Term::Numeral(-n))
                    }
                    _ => Err(self
                        .cur
                        .error("unary minus is only allowed on integer literals")),
                }
            }
            Tok::Ident(s) => {
                self.cur.bump();
                Ok(Term::Symbol(s))
            }
            Tok::LParen => {
                self.cur.bump();
                let t = self.term()?;
                self.cur.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.cur.unexpected("a term")),
        }
    }
}

fn is_sort_prefix(word: &str, next: &Tok) -> bool {
    (word == "int" || word == "gen") && next == &Tok::Colon
}
