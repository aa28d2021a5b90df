//! Formula syntax: a temporal operator AST generic over its atoms, trace
//! quantifier prefixes, a parser for the concrete grammar, and a printer that
//! reparses to the same AST.
//!
//! Grammar (binding weakest to strongest): quantifier prefix, `<->`, `->`,
//! `|`, `&`, then the unary layer `!`, `X`, `G`, `F` and `U`. Binary chains
//! associate to the right, and a prefix operator scopes over a following `U`,
//! so `X a[p] U b[p]` reads `X (a[p] U b[p])`. Atoms are `var[trace]`,
//! `true`, `false`; `l = r` between atoms abbreviates `l <-> r`. Comments run
//! from `#` to the end of the line.

use std::fmt;

use thiserror::Error;

/// Temporal formulas over atoms of type `A`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Ltl<A> {
    True,
    False,
    Atom(A),
    Not(Box<Ltl<A>>),
    And(Box<Ltl<A>>, Box<Ltl<A>>),
    Or(Box<Ltl<A>>, Box<Ltl<A>>),
    Implies(Box<Ltl<A>>, Box<Ltl<A>>),
    Iff(Box<Ltl<A>>, Box<Ltl<A>>),
    Next(Box<Ltl<A>>),
    Until(Box<Ltl<A>>, Box<Ltl<A>>),
    Globally(Box<Ltl<A>>),
    Finally(Box<Ltl<A>>),
}

impl<A> Ltl<A> {
    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Ltl<A>) -> Self {
        Ltl::Not(Box::new(p))
    }
    pub fn and(p: Ltl<A>, q: Ltl<A>) -> Self {
        Ltl::And(Box::new(p), Box::new(q))
    }
    pub fn or(p: Ltl<A>, q: Ltl<A>) -> Self {
        Ltl::Or(Box::new(p), Box::new(q))
    }
    pub fn implies(p: Ltl<A>, q: Ltl<A>) -> Self {
        Ltl::Implies(Box::new(p), Box::new(q))
    }
    pub fn iff(p: Ltl<A>, q: Ltl<A>) -> Self {
        Ltl::Iff(Box::new(p), Box::new(q))
    }
    pub fn next(p: Ltl<A>) -> Self {
        Ltl::Next(Box::new(p))
    }
    pub fn until(p: Ltl<A>, q: Ltl<A>) -> Self {
        Ltl::Until(Box::new(p), Box::new(q))
    }
    pub fn globally(p: Ltl<A>) -> Self {
        Ltl::Globally(Box::new(p))
    }
    pub fn finally(p: Ltl<A>) -> Self {
        Ltl::Finally(Box::new(p))
    }

    /// Conjunction of all formulas, `True` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Ltl<A>>) -> Self {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => Ltl::True,
            Some(first) => iter.fold(first, Ltl::and),
        }
    }

    /// Rebuild the formula with every atom mapped through `f`.
    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> Ltl<B> {
        match self {
            Ltl::True => Ltl::True,
            Ltl::False => Ltl::False,
            Ltl::Atom(a) => Ltl::Atom(f(a)),
            Ltl::Not(p) => Ltl::not(p.map_atoms(f)),
            Ltl::And(p, q) => Ltl::and(p.map_atoms(f), q.map_atoms(f)),
            Ltl::Or(p, q) => Ltl::or(p.map_atoms(f), q.map_atoms(f)),
            Ltl::Implies(p, q) => Ltl::implies(p.map_atoms(f), q.map_atoms(f)),
            Ltl::Iff(p, q) => Ltl::iff(p.map_atoms(f), q.map_atoms(f)),
            Ltl::Next(p) => Ltl::next(p.map_atoms(f)),
            Ltl::Until(p, q) => Ltl::until(p.map_atoms(f), q.map_atoms(f)),
            Ltl::Globally(p) => Ltl::globally(p.map_atoms(f)),
            Ltl::Finally(p) => Ltl::finally(p.map_atoms(f)),
        }
    }

    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.visit(&mut |node| {
            if let Ltl::Atom(a) = node {
                out.push(a);
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Ltl<A>)) {
        f(self);
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => {}
            Ltl::Not(p) | Ltl::Next(p) | Ltl::Globally(p) | Ltl::Finally(p) => p.visit(f),
            Ltl::And(p, q) | Ltl::Or(p, q) | Ltl::Implies(p, q) | Ltl::Iff(p, q)
            | Ltl::Until(p, q) => {
                p.visit(f);
                q.visit(f);
            }
        }
    }

    /// Number of AST nodes.
    pub fn subformula_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Deepest nesting of `X`.
    pub fn next_depth(&self) -> usize {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => 0,
            Ltl::Not(p) | Ltl::Globally(p) | Ltl::Finally(p) => p.next_depth(),
            Ltl::Next(p) => 1 + p.next_depth(),
            Ltl::And(p, q) | Ltl::Or(p, q) | Ltl::Implies(p, q) | Ltl::Iff(p, q)
            | Ltl::Until(p, q) => p.next_depth().max(q.next_depth()),
        }
    }

    /// True when no temporal operator occurs.
    pub fn is_propositional(&self) -> bool {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => true,
            Ltl::Not(p) => p.is_propositional(),
            Ltl::And(p, q) | Ltl::Or(p, q) | Ltl::Implies(p, q) | Ltl::Iff(p, q) => {
                p.is_propositional() && q.is_propositional()
            }
            Ltl::Next(_) | Ltl::Until(_, _) | Ltl::Globally(_) | Ltl::Finally(_) => false,
        }
    }
}

/// An atom `var[trace_var]`: the value of `var` on the trace bound to
/// `trace_var`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HyperAtom {
    pub var: String,
    pub trace_var: String,
}

impl HyperAtom {
    pub fn new(var: impl Into<String>, trace_var: impl Into<String>) -> Self {
        HyperAtom {
            var: var.into(),
            trace_var: trace_var.into(),
        }
    }
}

impl fmt::Display for HyperAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.var, self.trace_var)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// A quantifier prefix over trace variables followed by a quantifier-free
/// body.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HyperLtlFormula {
    pub prefix: Vec<(Quantifier, String)>,
    pub body: Ltl<HyperAtom>,
}

/// Shape summary used to pick formula fragments.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FormulaClass {
    pub quantifiers: usize,
    pub distinct_trace_vars: usize,
    pub next_depth: usize,
    /// Body is `G p` with `p` propositional.
    pub globally_fragment: bool,
}

pub fn classify(formula: &HyperLtlFormula) -> FormulaClass {
    let mut vars: std::collections::BTreeSet<&str> = formula
        .prefix
        .iter()
        .map(|(_, v)| v.as_str())
        .collect();
    for atom in formula.body.atoms() {
        vars.insert(atom.trace_var.as_str());
    }
    let globally_fragment = match &formula.body {
        Ltl::Globally(p) => p.is_propositional(),
        _ => false,
    };
    FormulaClass {
        quantifiers: formula.prefix.len(),
        distinct_trace_vars: vars.len(),
        next_depth: formula.body.next_depth(),
        globally_fragment,
    }
}

/// Which of the two independence readings a check should use.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IndependenceSemantics {
    /// Fresh witness allowed at every position.
    Point,
    /// One witness must cover all shared positions of a pair.
    Segment,
}

/// How the action variable that splits a trace in two is treated.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ActionDiscipline {
    /// The action must occur at the same position on every trace.
    Sync,
    /// Traces are cut at their own first action position.
    Async,
    /// No action variable; some cut profile must exist.
    Hidden,
}

/// Variable roles for a two-phase independence check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PropertySelector {
    pub semantics: IndependenceSemantics,
    pub action: ActionDiscipline,
    pub x: String,
    pub y: String,
    pub z: String,
    /// Cut variable; `None` exactly for the hidden discipline.
    pub a: Option<String>,
}

/// Errors with source position (1-based line and column).
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("{line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: trace variable `{var}` is not bound by any quantifier")]
    UnboundTraceVariable {
        var: String,
        line: usize,
        col: usize,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Forall,
    Exists,
    KwTrue,
    KwFalse,
    Next,
    Globally,
    Finally,
    Until,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Equals,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "`{name}`"),
            Tok::Forall => "`forall`",
            Tok::Exists => "`exists`",
            Tok::KwTrue => "`true`",
            Tok::KwFalse => "`false`",
            Tok::Next => "`X`",
            Tok::Globally => "`G`",
            Tok::Finally => "`F`",
            Tok::Until => "`U`",
            Tok::Dot => "`.`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Bang => "`!`",
            Tok::Amp => "`&`",
            Tok::Pipe => "`|`",
            Tok::Arrow => "`->`",
            Tok::DArrow => "`<->`",
            Tok::Equals => "`=`",
        };
        f.write_str(s)
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, message: impl Into<String>) -> SyntaxError {
    SyntaxError::Parse {
        line,
        col,
        message: message.into(),
    }
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, SyntaxError> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let (line, col) = (self.line, self.col);
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    self.bump();
                }
                '#' => {
                    while self.chars.peek().is_some_and(|&c| c != '\n') {
                        self.bump();
                    }
                }
                '.' | '(' | ')' | '[' | ']' | '!' | '&' | '|' | '=' => {
                    self.bump();
                    let tok = match c {
                        '.' => Tok::Dot,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        '!' => Tok::Bang,
                        '&' => Tok::Amp,
                        '|' => Tok::Pipe,
                        _ => Tok::Equals,
                    };
                    out.push((tok, line, col));
                }
                '-' => {
                    self.bump();
                    if self.chars.peek() == Some(&'>') {
                        self.bump();
                        out.push((Tok::Arrow, line, col));
                    } else {
                        return Err(err(line, col, "expected `->`"));
                    }
                }
                '<' => {
                    self.bump();
                    if self.bump() == Some('-') && self.chars.peek() == Some(&'>') {
                        self.bump();
                        out.push((Tok::DArrow, line, col));
                    } else {
                        return Err(err(line, col, "expected `<->`"));
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut name = String::new();
                    while self
                        .chars
                        .peek()
                        .is_some_and(|&c| c.is_ascii_alphanumeric() || c == '_')
                    {
                        name.push(self.bump().unwrap());
                    }
                    let tok = match name.as_str() {
                        "forall" => Tok::Forall,
                        "exists" => Tok::Exists,
                        "true" => Tok::KwTrue,
                        "false" => Tok::KwFalse,
                        "X" => Tok::Next,
                        "G" => Tok::Globally,
                        "F" => Tok::Finally,
                        "U" => Tok::Until,
                        _ => Tok::Ident(name),
                    };
                    out.push((tok, line, col));
                }
                other => {
                    return Err(err(line, col, format!("unexpected character `{other}`")));
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    tokens: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
    bound: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .map(|&(_, l, c)| (l, c))
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let tok = self.tokens.get(self.pos).map(|(t, _, _)| t.clone());
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: &Tok) -> Result<(), SyntaxError> {
        let (line, col) = self.here();
        match self.next() {
            Some(ref tok) if tok == want => Ok(()),
            Some(tok) => Err(err(line, col, format!("expected {want}, found {tok}"))),
            None => Err(err(line, col, format!("expected {want}, found end of input"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), SyntaxError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Tok::Ident(name)) => Ok((name, line, col)),
            Some(tok) => Err(err(line, col, format!("expected {what}, found {tok}"))),
            None => Err(err(line, col, format!("expected {what}, found end of input"))),
        }
    }

    fn formula(&mut self) -> Result<HyperLtlFormula, SyntaxError> {
        let mut prefix = Vec::new();
        loop {
            let quant = match self.peek() {
                Some(Tok::Forall) => Quantifier::Forall,
                Some(Tok::Exists) => Quantifier::Exists,
                _ => break,
            };
            self.next();
            let (name, _, _) = self.expect_ident("a trace variable")?;
            self.expect(&Tok::Dot)?;
            self.bound.push(name.clone());
            prefix.push((quant, name));
        }
        let body = self.iff()?;
        if let Some(tok) = self.peek() {
            let (line, col) = self.here();
            return Err(err(line, col, format!("unexpected {tok} after the formula")));
        }
        Ok(HyperLtlFormula { prefix, body })
    }

    fn right_chain(
        &mut self,
        sep: &Tok,
        next: fn(&mut Self) -> Result<Ltl<HyperAtom>, SyntaxError>,
        join: fn(Ltl<HyperAtom>, Ltl<HyperAtom>) -> Ltl<HyperAtom>,
    ) -> Result<Ltl<HyperAtom>, SyntaxError> {
        let mut parts = vec![next(self)?];
        while self.eat(sep) {
            parts.push(next(self)?);
        }
        let last = parts.pop().unwrap();
        Ok(parts.into_iter().rev().fold(last, |acc, p| join(p, acc)))
    }

    fn iff(&mut self) -> Result<Ltl<HyperAtom>, SyntaxError> {
        self.right_chain(&Tok::DArrow, Self::imp, Ltl::iff)
    }

    fn imp(&mut self) -> Result<Ltl<HyperAtom>, SyntaxError> {
        self.right_chain(&Tok::Arrow, Self::or, Ltl::implies)
    }

    fn or(&mut self) -> Result<Ltl<HyperAtom>, SyntaxError> {
        self.right_chain(&Tok::Pipe, Self::and, Ltl::or)
    }

    fn and(&mut self) -> Result<Ltl<HyperAtom>, SyntaxError> {
        self.right_chain(&Tok::Amp, Self::unary, Ltl::and)
    }

    fn unary(&mut self) -> Result<Ltl<HyperAtom>, SyntaxError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.next();
                Ok(Ltl::not(self.unary()?))
            }
            Some(Tok::Next) => {
                self.next();
                Ok(Ltl::next(self.unary()?))
            }
            Some(Tok::Globally) => {
                self.next();
                Ok(Ltl::globally(self.unary()?))
            }
            Some(Tok::Finally) => {
                self.next();
                Ok(Ltl::finally(self.unary()?))
            }
            _ => {
                let left = self.atom_or_paren()?;
                if self.eat(&Tok::Until) {
                    Ok(Ltl::until(left, self.unary()?))
                } else {
                    Ok(left)
                }
            }
        }
    }

    fn atom_or_paren(&mut self) -> Result<Ltl<HyperAtom>, SyntaxError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Tok::LParen) => {
                let inner = self.iff()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::KwTrue) => Ok(Ltl::True),
            Some(Tok::KwFalse) => Ok(Ltl::False),
            Some(Tok::Ident(var)) => {
                let left = self.finish_atom(var)?;
                if self.eat(&Tok::Equals) {
                    let (var2, _, _) = self.expect_ident("an atom")?;
                    let right = self.finish_atom(var2)?;
                    Ok(Ltl::iff(left, right))
                } else {
                    Ok(left)
                }
            }
            Some(tok) => Err(err(line, col, format!("expected an atom, found {tok}"))),
            None => Err(err(line, col, "expected an atom, found end of input")),
        }
    }

    fn finish_atom(&mut self, var: String) -> Result<Ltl<HyperAtom>, SyntaxError> {
        self.expect(&Tok::LBracket)?;
        let (trace_var, line, col) = self.expect_ident("a trace variable")?;
        self.expect(&Tok::RBracket)?;
        if !self.bound.contains(&trace_var) {
            return Err(SyntaxError::UnboundTraceVariable {
                var: trace_var,
                line,
                col,
            });
        }
        Ok(Ltl::Atom(HyperAtom::new(var, trace_var)))
    }
}

/// Parse a closed sentence: quantifier prefix plus body.
pub fn parse_formula(src: &str) -> Result<HyperLtlFormula, SyntaxError> {
    let tokens = Lexer::new(src).tokens()?;
    let end = src.chars().fold((1, 1), |(l, c), ch| match ch {
        '\n' => (l + 1, 1),
        _ => (l, c + 1),
    });
    let mut parser = Parser {
        tokens,
        pos: 0,
        end,
        bound: Vec::new(),
    };
    parser.formula()
}

fn level<A>(node: &Ltl<A>) -> u8 {
    match node {
        Ltl::Iff(_, _) => 1,
        Ltl::Implies(_, _) => 2,
        Ltl::Or(_, _) => 3,
        Ltl::And(_, _) => 4,
        Ltl::Until(_, _) => 5,
        Ltl::Not(_) | Ltl::Next(_) | Ltl::Globally(_) | Ltl::Finally(_) => 6,
        Ltl::True | Ltl::False | Ltl::Atom(_) => 7,
    }
}

fn print_at<A: fmt::Display>(node: &Ltl<A>, min: u8, out: &mut String) {
    use std::fmt::Write;
    if level(node) < min {
        out.push('(');
        print_at(node, 0, out);
        out.push(')');
        return;
    }
    match node {
        Ltl::True => out.push_str("true"),
        Ltl::False => out.push_str("false"),
        Ltl::Atom(a) => write!(out, "{a}").unwrap(),
        Ltl::Not(p) => {
            out.push('!');
            print_at(p, 5, out);
        }
        Ltl::Next(p) => {
            out.push_str("X ");
            print_at(p, 5, out);
        }
        Ltl::Globally(p) => {
            out.push_str("G ");
            print_at(p, 5, out);
        }
        Ltl::Finally(p) => {
            out.push_str("F ");
            print_at(p, 5, out);
        }
        Ltl::Until(p, q) => {
            print_at(p, 7, out);
            out.push_str(" U ");
            print_at(q, 5, out);
        }
        Ltl::And(p, q) => {
            print_at(p, 5, out);
            out.push_str(" & ");
            print_at(q, 4, out);
        }
        Ltl::Or(p, q) => {
            print_at(p, 4, out);
            out.push_str(" | ");
            print_at(q, 3, out);
        }
        Ltl::Implies(p, q) => {
            print_at(p, 3, out);
            out.push_str(" -> ");
            print_at(q, 2, out);
        }
        Ltl::Iff(p, q) => {
            print_at(p, 2, out);
            out.push_str(" <-> ");
            print_at(q, 1, out);
        }
    }
}

/// Render a body; `parse` of the result yields the same AST.
pub fn print_ltl<A: fmt::Display>(body: &Ltl<A>) -> String {
    let mut out = String::new();
    print_at(body, 0, &mut out);
    out
}

/// Render a sentence; `parse_formula` of the result yields the same AST.
pub fn print_formula(formula: &HyperLtlFormula) -> String {
    let mut out = String::new();
    for (quant, var) in &formula.prefix {
        out.push_str(match quant {
            Quantifier::Forall => "forall ",
            Quantifier::Exists => "exists ",
        });
        out.push_str(var);
        out.push_str(". ");
    }
    out.push_str(&print_ltl(&formula.body));
    out
}
