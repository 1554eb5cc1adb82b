use super::lexer::Tok;
use super::{Cursor, ParseError};
use crate::syntax::{
    ArgTerm, BinOp, BodyLiteral, Comparison, Head, Program, RegularAtom, RegularTerm, Relation,
    Rule,
};

pub(super) struct ProgramParser {
    cur: Cursor,
}

impl ProgramParser {
    pub(super) fn new(cur: Cursor) -> Self {
        ProgramParser { cur }
    }

    pub(super) fn program(mut self) -> Result<Program, ParseError> {
        let mut rules = Vec::new();
        while self.cur.peek() != &Tok::Eof {
            rules.push(self.rule()?);
        }
        Ok(Program::new(rules))
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let head = match self.cur.peek().clone() {
            Tok::If => Head::None,
            Tok::LBrace => {
                self.cur.bump();
                let atom = self.atom()?;
                match self.cur.peek() {
                    Tok::RBrace => {
                        self.cur.bump();
                    }
                    Tok::Semicolon | Tok::Colon | Tok::Comma => {
                        return Err(self
                            .cur
                            .non_regular("choice rules must have exactly one atom in braces"))
                    }
                    _ => return Err(self.cur.unexpected("`}`")),
                }
                if matches!(self.cur.peek(), Tok::Int(_)) {
                    return Err(self.cur.non_regular("cardinality bounds on choice rules"));
                }
                Head::Choice(atom)
            }
            Tok::Int(_) if self.cur.peek_at(1) == &Tok::LBrace => {
                return Err(self.cur.non_regular("cardinality bounds on choice rules"))
            }
            Tok::Other('#') => return Err(self.cur.non_regular("directives and aggregates")),
            Tok::Minus if matches!(self.cur.peek_at(1), Tok::Ident(_)) => {
                return Err(self.cur.non_regular("classical negation"))
            }
            Tok::Ident(_) => {
                let atom = self.atom()?;
                match self.cur.peek() {
                    Tok::Semicolon | Tok::Or => {
                        return Err(self.cur.non_regular("disjunctive heads"))
                    }
                    Tok::Colon => return Err(self.cur.non_regular("conditional literals")),
                    _ => {}
                }
                Head::Basic(atom)
            }
            _ => return Err(self.cur.unexpected("a rule")),
        };
        let mut body = Vec::new();
        if self.cur.eat(&Tok::If) && self.cur.peek() != &Tok::Dot {
            loop {
                body.push(self.literal()?);
                match self.cur.peek() {
                    Tok::Comma | Tok::Semicolon => {
                        self.cur.bump();
                    }
                    Tok::Colon => return Err(self.cur.non_regular("conditional literals")),
                    _ => break,
                }
            }
        }
        self.cur.expect(&Tok::Dot, "`.` at the end of the rule")?;
        Ok(Rule::new(head, body))
    }

    fn atom(&mut self) -> Result<RegularAtom, ParseError> {
        let name = match self.cur.peek().clone() {
            Tok::Ident(name) => {
                self.cur.bump();
                name
            }
            _ => return Err(self.cur.unexpected("a predicate name")),
        };
        let mut args = Vec::new();
        if self.cur.eat(&Tok::LParen) && !self.cur.eat(&Tok::RParen) {
            loop {
                args.push(self.arg_term()?);
                match self.cur.peek() {
                    Tok::Comma => {
                        self.cur.bump();
                    }
                    Tok::RParen => {
                        self.cur.bump();
                        break;
                    }
                    Tok::DotDot => return Err(self.cur.non_regular("intervals as atom arguments")),
                    Tok::Semicolon => return Err(self.cur.non_regular("pooled terms")),
                    _ => return Err(self.cur.unexpected("`,` or `)`")),
                }
            }
        }
        Ok(RegularAtom::new(name, args))
    }

    fn literal(&mut self) -> Result<BodyLiteral, ParseError> {
        match self.cur.peek().clone() {
            Tok::Ident(word) if word == "not" && !matches!(self.cur.peek_at(1), Tok::Rel(_)) => {
                self.cur.bump();
                if matches!(self.cur.peek(), Tok::Ident(w) if w == "not") {
                    return Err(self.cur.non_regular("double negation"));
                }
                if !matches!(self.cur.peek(), Tok::Ident(_)) {
                    return Err(self.cur.non_regular("negation of a non-atom"));
                }
                Ok(BodyLiteral::Negated(self.atom()?))
            }
            Tok::Ident(_)
                if !matches!(
                    self.cur.peek_at(1),
                    Tok::Rel(_) | Tok::Plus | Tok::Minus | Tok::Star
                ) =>
            {
                Ok(BodyLiteral::Positive(self.atom()?))
            }
            Tok::Other('#') => Err(self.cur.non_regular("aggregates")),
            Tok::LBrace => Err(self.cur.non_regular("aggregates")),
            Tok::Minus if matches!(self.cur.peek_at(1), Tok::Ident(_)) => {
                Err(self.cur.non_regular("classical negation"))
            }
            _ => self.comparison().map(BodyLiteral::Comparison),
        }
    }

    fn comparison(&mut self) -> Result<Comparison, ParseError> {
        let lhs = self.arg_term()?;
        let rel = match self.cur.peek() {
            Tok::Rel(r) => *r,
            _ => return Err(self.cur.unexpected("a comparison symbol")),
        };
        self.cur.bump();
        let rhs = self.arg_term()?;
        if self.cur.peek() != &Tok::DotDot {
            return Ok(Comparison::Relational { lhs, rel, rhs });
        }
        if rel != Relation::Eq {
            return Err(self.cur.non_regular("intervals outside `t = t1..t2`"));
        }
        self.cur.bump();
        let high = self.arg_term()?;
        let regular = |t: ArgTerm, cur: &Cursor| match t {
            ArgTerm::Regular(r) => Ok(r),
            ArgTerm::Symbol(_) => Err(cur.non_regular("symbolic constants in intervals")),
        };
        Ok(Comparison::Interval {
            lhs: regular(lhs, &self.cur)?,
            low: regular(rhs, &self.cur)?,
            high: regular(high, &self.cur)?,
        })
    }

    fn arg_term(&mut self) -> Result<ArgTerm, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.cur.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.cur.bump();
            let rhs = self.product()?;
            lhs = self.combine(op, lhs, rhs)?;
        }
    }

    fn product(&mut self) -> Result<ArgTerm, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.cur.peek() {
                Tok::Star if self.cur.peek_at(1) == &Tok::Star => {
                    return Err(self.cur.non_regular("exponentiation"))
                }
                Tok::Star => {
                    self.cur.bump();
                    let rhs = self.factor()?;
                    lhs = self.combine(BinOp::Mul, lhs, rhs)?;
                }
                Tok::Slash | Tok::Backslash => {
                    return Err(self.cur.non_regular("integer division and modulo"))
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn combine(&self, op: BinOp, lhs: ArgTerm, rhs: ArgTerm) -> Result<ArgTerm, ParseError> {
        match (lhs, rhs) {
            (ArgTerm::Regular(l), ArgTerm::Regular(r)) => {
                Ok(ArgTerm::Regular(RegularTerm::binary(op, l, r)))
            }
            _ => Err(self
                .cur
                .non_regular("symbolic constants under arithmetic operations")),
        }
    }

    fn factor(&mut self) -> Result<ArgTerm, ParseError> {
        match self.cur.peek().clone() {
            Tok::Int(n) => {
                self.cur.bump();
                Ok(ArgTerm::numeral(n))
            }
            Tok::Minus => {
                self.cur.bump();
                match self.cur.peek().clone() {
                    Tok::Int(n) => {
                        self.cur.bump();
                        Ok(ArgTerm::numeral(-n))
                    }
                    _ => Err(self
                        .cur
                        .error("unary minus is only allowed on integer literals")),
                }
            }
            Tok::Var(v) => {
                self.cur.bump();
                Ok(ArgTerm::var(v))
            }
            Tok::Anonymous(_) => Err(self.cur.non_regular("anonymous variables")),
            Tok::Ident(s) => {
                self.cur.bump();
                if self.cur.peek() == &Tok::LParen {
                    return Err(self.cur.non_regular("function symbols"));
                }
                Ok(ArgTerm::symbol(s))
            }
            Tok::LParen => {
                self.cur.bump();
                let inner = self.arg_term()?;
                match self.cur.peek() {
                    Tok::RParen => {
                        self.cur.bump();
                        Ok(inner)
                    }
                    Tok::Comma => Err(self.cur.non_regular("tuples")),
                    Tok::Semicolon => Err(self.cur.non_regular("pooled terms")),
                    Tok::DotDot => Err(self.cur.non_regular("intervals inside terms")),
                    _ => Err(self.cur.unexpected("`)`")),
                }
            }
            Tok::Or => Err(self.cur.non_regular("absolute value")),
            Tok::Other('"') => Err(self.cur.non_regular("strings")),
            Tok::Other('#') => Err(self.cur.non_regular("special constants")),
            _ => Err(self.cur.unexpected("a term")),
        }
    }
}
