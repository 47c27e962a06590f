//! Formulas with bounded quantifiers, their Boolean-valued evaluation, a
//! classical evaluator over hereditarily finite sets, and the text syntax
//! used by the command line.

use crate::algebra::AlgebraElement;
use crate::bvset::{BvsetError, HfSet, SetId, Universe};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// A set-valued term position: a variable or an interned constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetTerm {
    Var(String),
    Const(SetId),
}

/// A formula in which every quantifier is bounded by a set term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Delta0 {
    True,
    False,
    Eq(SetTerm, SetTerm),
    Mem(SetTerm, SetTerm),
    Not(Box<Delta0>),
    And(Box<Delta0>, Box<Delta0>),
    Or(Box<Delta0>, Box<Delta0>),
    Implies(Box<Delta0>, Box<Delta0>),
    Forall(String, SetTerm, Box<Delta0>),
    Exists(String, SetTerm, Box<Delta0>),
}

impl Delta0 {
    pub fn free_vars(&self) -> BTreeSet<&str> {
        fn term<'a>(t: &'a SetTerm, out: &mut BTreeSet<&'a str>) {
            if let SetTerm::Var(v) = t {
                out.insert(v.as_str());
            }
        }
        fn walk<'a>(f: &'a Delta0, out: &mut BTreeSet<&'a str>) {
            match f {
                Delta0::True | Delta0::False => {}
                Delta0::Eq(a, b) | Delta0::Mem(a, b) => {
                    term(a, out);
                    term(b, out);
                }
                Delta0::Not(p) => walk(p, out),
                Delta0::And(p, q) | Delta0::Or(p, q) | Delta0::Implies(p, q) => {
                    walk(p, out);
                    walk(q, out);
                }
                Delta0::Forall(x, bound, p) | Delta0::Exists(x, bound, p) => {
                    term(bound, out);
                    let mut inner = BTreeSet::new();
                    walk(p, &mut inner);
                    inner.remove(x.as_str());
                    out.extend(inner);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }

    fn resolve(
        term: &SetTerm,
        env: &BTreeMap<String, SetId>,
    ) -> Result<SetId, BvsetError> {
        match term {
            SetTerm::Const(s) => Ok(*s),
            SetTerm::Var(v) => env
                .get(v)
                .copied()
                .ok_or_else(|| BvsetError::UnboundVariable(v.clone())),
        }
    }

    /// The truth value `‖Φ‖` in the universe, with quantifiers running over
    /// the domain of their bound, guarded by the membership value.
    pub fn eval(
        &self,
        u: &Universe,
        env: &BTreeMap<String, SetId>,
    ) -> Result<AlgebraElement, BvsetError> {
        match self {
            Delta0::True => Ok(u.top()),
            Delta0::False => Ok(u.bot()),
            Delta0::Eq(a, b) => Ok(u.equality(
                Self::resolve(a, env)?,
                Self::resolve(b, env)?,
            )),
            Delta0::Mem(a, b) => Ok(u.membership(
                Self::resolve(a, env)?,
                Self::resolve(b, env)?,
            )),
            Delta0::Not(p) => Ok(p.eval(u, env)?.not()),
            Delta0::And(p, q) => Ok(p.eval(u, env)?.meet(&q.eval(u, env)?)),
            Delta0::Or(p, q) => Ok(p.eval(u, env)?.join(&q.eval(u, env)?)),
            Delta0::Implies(p, q) => Ok(p.eval(u, env)?.implies(&q.eval(u, env)?)),
            Delta0::Forall(x, bound, p) => {
                let bound = Self::resolve(bound, env)?;
                u.eval_forall(bound, |t| {
                    let mut env2 = env.clone();
                    env2.insert(x.clone(), t);
                    p.eval(u, &env2)
                })
            }
            Delta0::Exists(x, bound, p) => {
                let bound = Self::resolve(bound, env)?;
                u.eval_exists(bound, |t| {
                    let mut env2 = env.clone();
                    env2.insert(x.clone(), t);
                    p.eval(u, &env2)
                })
            }
        }
    }
}

/// The same formula shape over classical hereditarily finite constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HfTerm {
    Var(String),
    Const(HfSet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HfFormula {
    True,
    False,
    Eq(HfTerm, HfTerm),
    Mem(HfTerm, HfTerm),
    Not(Box<HfFormula>),
    And(Box<HfFormula>, Box<HfFormula>),
    Or(Box<HfFormula>, Box<HfFormula>),
    Implies(Box<HfFormula>, Box<HfFormula>),
    Forall(String, HfTerm, Box<HfFormula>),
    Exists(String, HfTerm, Box<HfFormula>),
}

impl HfFormula {
    fn resolve<'a>(
        t: &'a HfTerm,
        env: &'a BTreeMap<String, HfSet>,
    ) -> Result<&'a HfSet, BvsetError> {
        match t {
            HfTerm::Const(s) => Ok(s),
            HfTerm::Var(v) => env
                .get(v)
                .ok_or_else(|| BvsetError::UnboundVariable(v.clone())),
        }
    }

    /// Ordinary two-valued truth over classical sets.
    pub fn eval_classical(
        &self,
        env: &BTreeMap<String, HfSet>,
    ) -> Result<bool, BvsetError> {
        Ok(match self {
            HfFormula::True => true,
            HfFormula::False => false,
            HfFormula::Eq(a, b) => Self::resolve(a, env)? == Self::resolve(b, env)?,
            HfFormula::Mem(a, b) => {
                let a = Self::resolve(a, env)?;
                Self::resolve(b, env)?.0.contains(a)
            }
            HfFormula::Not(p) => !p.eval_classical(env)?,
            HfFormula::And(p, q) => p.eval_classical(env)? && q.eval_classical(env)?,
            HfFormula::Or(p, q) => p.eval_classical(env)? || q.eval_classical(env)?,
            HfFormula::Implies(p, q) => !p.eval_classical(env)? || q.eval_classical(env)?,
            HfFormula::Forall(x, bound, p) => {
                let bound = Self::resolve(bound, env)?.clone();
                for t in &bound.0 {
                    let mut env2 = env.clone();
                    env2.insert(x.clone(), t.clone());
                    if !p.eval_classical(&env2)? {
                        return Ok(false);
                    }
                }
                true
            }
            HfFormula::Exists(x, bound, p) => {
                let bound = Self::resolve(bound, env)?.clone();
                for t in &bound.0 {
                    let mut env2 = env.clone();
                    env2.insert(x.clone(), t.clone());
                    if p.eval_classical(&env2)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// Replaces every classical constant by its check-embedding.
    pub fn embed(&self, u: &Universe) -> Result<Delta0, BvsetError> {
        let term = |t: &HfTerm| -> Result<SetTerm, BvsetError> {
            Ok(match t {
                HfTerm::Var(v) => SetTerm::Var(v.clone()),
                HfTerm::Const(s) => SetTerm::Const(u.check_embed(s)?),
            })
        };
        Ok(match self {
            HfFormula::True => Delta0::True,
            HfFormula::False => Delta0::False,
            HfFormula::Eq(a, b) => Delta0::Eq(term(a)?, term(b)?),
            HfFormula::Mem(a, b) => Delta0::Mem(term(a)?, term(b)?),
            HfFormula::Not(p) => Delta0::Not(Box::new(p.embed(u)?)),
            HfFormula::And(p, q) => {
                Delta0::And(Box::new(p.embed(u)?), Box::new(q.embed(u)?))
            }
            HfFormula::Or(p, q) => {
                Delta0::Or(Box::new(p.embed(u)?), Box::new(q.embed(u)?))
            }
            HfFormula::Implies(p, q) => {
                Delta0::Implies(Box::new(p.embed(u)?), Box::new(q.embed(u)?))
            }
            HfFormula::Forall(x, bound, p) => {
                Delta0::Forall(x.clone(), term(bound)?, Box::new(p.embed(u)?))
            }
            HfFormula::Exists(x, bound, p) => {
                Delta0::Exists(x.clone(), term(bound)?, Box::new(p.embed(u)?))
            }
        })
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct FormulaParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(usize),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,    // ->
    FatArrow, // =>
    Equals,
    Amp,
    Pipe,
    Tilde,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, FormulaParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '{' => {
                out.push((i, Tok::LBrace));
                i += 1;
            }
            '}' => {
                out.push((i, Tok::RBrace));
                i += 1;
            }
            '[' => {
                out.push((i, Tok::LBracket));
                i += 1;
            }
            ']' => {
                out.push((i, Tok::RBracket));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                out.push((i, Tok::Comma));
                i += 1;
            }
            '.' => {
                out.push((i, Tok::Dot));
                i += 1;
            }
            '&' => {
                out.push((i, Tok::Amp));
                i += 1;
            }
            '|' => {
                out.push((i, Tok::Pipe));
                i += 1;
            }
            '~' => {
                out.push((i, Tok::Tilde));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((i, Tok::Arrow));
                    i += 2;
                } else {
                    return Err(FormulaParseError {
                        pos: i,
                        msg: "expected `->`".into(),
                    });
                }
            }
            '=' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((i, Tok::FatArrow));
                    i += 2;
                } else {
                    out.push((i, Tok::Equals));
                    i += 1;
                }
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: usize = text[start..i].parse().map_err(|_| FormulaParseError {
                    pos: start,
                    msg: "number too large".into(),
                })?;
                out.push((start, Tok::Num(n)));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(FormulaParseError {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Recursive-descent parser for formulas and A-set literals.
///
/// Grammar, loosest first:
/// `forall x in T. φ` / `exists x in T. φ`, `φ => φ` (right-assoc),
/// `φ | φ`, `φ & φ`, `~φ`, then atoms `true`, `false`, `T = T`, `T in T`
/// and parentheses. Set terms `T` are variables, literals
/// `{key -> elem, ...}` with elems `top`, `bot` or `[atom,...]`, or check
/// literals `chk{...}`.
pub struct FormulaParser<'u> {
    universe: &'u Universe,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl<'u> FormulaParser<'u> {
    pub fn new(universe: &'u Universe, text: &str) -> Result<Self, FormulaParseError> {
        Ok(FormulaParser {
            universe,
            toks: tokenize(text)?,
            pos: 0,
            end: text.len(),
        })
    }

    pub fn parse_formula_text(
        universe: &'u Universe,
        text: &str,
    ) -> Result<Delta0, FormulaParseError> {
        let mut p = FormulaParser::new(universe, text)?;
        let f = p.formula()?;
        p.expect_end()?;
        Ok(f)
    }

    pub fn parse_set_text(
        universe: &'u Universe,
        text: &str,
    ) -> Result<SetId, FormulaParseError> {
        let mut p = FormulaParser::new(universe, text)?;
        let t = p.set_term()?;
        p.expect_end()?;
        match t {
            SetTerm::Const(s) => Ok(s),
            SetTerm::Var(v) => Err(FormulaParseError {
                pos: 0,
                msg: format!("expected a set literal, found variable `{v}`"),
            }),
        }
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormulaParseError> {
        Err(FormulaParseError {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, tok: &Tok, what: &str) -> Result<(), FormulaParseError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expect_end(&self) -> Result<(), FormulaParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }

    fn formula(&mut self) -> Result<Delta0, FormulaParseError> {
        if let Some(Tok::Ident(kw)) = self.peek() {
            if kw == "forall" || kw == "exists" {
                let is_forall = kw == "forall";
                self.bump();
                let var = match self.bump() {
                    Some(Tok::Ident(v)) if !is_keyword(&v) => v,
                    _ => return self.err("expected a variable name"),
                };
                match self.bump() {
                    Some(Tok::Ident(k)) if k == "in" => {}
                    _ => return self.err("expected `in`"),
                }
                let bound = self.set_term()?;
                self.eat(&Tok::Dot, "`.`")?;
                let body = Box::new(self.formula()?);
                return Ok(if is_forall {
                    Delta0::Forall(var, bound, body)
                } else {
                    Delta0::Exists(var, bound, body)
                });
            }
        }
        self.implies()
    }

    fn implies(&mut self) -> Result<Delta0, FormulaParseError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::FatArrow) {
            self.bump();
            let rhs = self.formula()?;
            Ok(Delta0::Implies(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Delta0, FormulaParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let rhs = self.and()?;
            lhs = Delta0::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Delta0, FormulaParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let rhs = self.unary()?;
            lhs = Delta0::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Delta0, FormulaParseError> {
        if self.peek() == Some(&Tok::Tilde) {
            self.bump();
            return Ok(Delta0::Not(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Delta0, FormulaParseError> {
        match self.peek() {
            Some(Tok::Ident(kw)) if kw == "true" => {
                self.bump();
                Ok(Delta0::True)
            }
            Some(Tok::Ident(kw)) if kw == "false" => {
                self.bump();
                Ok(Delta0::False)
            }
            Some(Tok::Ident(kw)) if kw == "forall" || kw == "exists" => self.formula(),
            Some(Tok::LParen) => {
                self.bump();
                let f = self.formula()?;
                self.eat(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => {
                let lhs = self.set_term()?;
                match self.bump() {
                    Some(Tok::Equals) => {
                        let rhs = self.set_term()?;
                        Ok(Delta0::Eq(lhs, rhs))
                    }
                    Some(Tok::Ident(k)) if k == "in" => {
                        let rhs = self.set_term()?;
                        Ok(Delta0::Mem(lhs, rhs))
                    }
                    _ => self.err("expected `=` or `in`"),
                }
            }
        }
    }

    fn set_term(&mut self) -> Result<SetTerm, FormulaParseError> {
        match self.peek() {
            Some(Tok::Ident(kw)) if kw == "chk" => {
                let hf = self.chk_literal()?;
                let id = self.universe.check_embed(&hf).map_err(|e| FormulaParseError {
                    pos: self.here(),
                    msg: e.to_string(),
                })?;
                Ok(SetTerm::Const(id))
            }
            Some(Tok::Ident(v)) if !is_keyword(v) => {
                let v = v.clone();
                self.bump();
                Ok(SetTerm::Var(v))
            }
            Some(Tok::LBrace) => {
                let id = self.set_literal()?;
                Ok(SetTerm::Const(id))
            }
            _ => self.err("expected a set term"),
        }
    }

    fn set_term_const(&mut self) -> Result<SetId, FormulaParseError> {
        match self.set_term()? {
            SetTerm::Const(s) => Ok(s),
            SetTerm::Var(v) => self.err(format!(
                "variables (`{v}`) are not allowed inside set literals"
            )),
        }
    }

    fn set_literal(&mut self) -> Result<SetId, FormulaParseError> {
        self.eat(&Tok::LBrace, "`{`")?;
        let mut entries = Vec::new();
        if self.peek() != Some(&Tok::RBrace) {
            loop {
                let key = self.set_term_const()?;
                self.eat(&Tok::Arrow, "`->`")?;
                let value = self.elem_literal()?;
                entries.push((key, value));
                if self.peek() == Some(&Tok::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.eat(&Tok::RBrace, "`}`")?;
        self.universe.mk_set(entries).map_err(|e| FormulaParseError {
            pos: self.here(),
            msg: e.to_string(),
        })
    }

    fn elem_literal(&mut self) -> Result<AlgebraElement, FormulaParseError> {
        match self.bump() {
            Some(Tok::Ident(k)) if k == "top" => Ok(self.universe.top()),
            Some(Tok::Ident(k)) if k == "bot" => Ok(self.universe.bot()),
            Some(Tok::LBracket) => {
                let mut atoms = Vec::new();
                if self.peek() != Some(&Tok::RBracket) {
                    loop {
                        match self.bump() {
                            Some(Tok::Num(n)) => atoms.push(n),
                            _ => return self.err("expected an atom index"),
                        }
                        if self.peek() == Some(&Tok::Comma) {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.eat(&Tok::RBracket, "`]`")?;
                AlgebraElement::from_atoms(self.universe.algebra(), atoms).map_err(|e| {
                    FormulaParseError {
                        pos: self.here(),
                        msg: e.to_string(),
                    }
                })
            }
            _ => self.err("expected `top`, `bot` or `[atoms]`"),
        }
    }

    fn chk_literal(&mut self) -> Result<HfSet, FormulaParseError> {
        match self.bump() {
            Some(Tok::Ident(k)) if k == "chk" => {}
            _ => return self.err("expected `chk`"),
        }
        self.eat(&Tok::LBrace, "`{`")?;
        let mut elems = Vec::new();
        if self.peek() != Some(&Tok::RBrace) {
            loop {
                elems.push(self.chk_literal()?);
                if self.peek() == Some(&Tok::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.eat(&Tok::RBrace, "`}`")?;
        Ok(HfSet::from_elems(elems))
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(
        s,
        "forall" | "exists" | "in" | "true" | "false" | "top" | "bot" | "chk"
    )
}

/// Renders a set as a literal in the same grammar the parser accepts.
pub fn print_set(u: &Universe, s: SetId) -> String {
    if let Some(hf) = u.to_hf(s) {
        return print_hf(&hf);
    }
    let mut out = String::from("{");
    for (i, (k, v)) in u.entries(s).iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&print_set(u, *k));
        out.push_str(" -> ");
        if v.is_top() {
            out.push_str("top");
        } else if v.is_bot() {
            out.push_str("bot");
        } else {
            out.push('[');
            for (j, a) in v.atoms().iter_ones().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&a.to_string());
            }
            out.push(']');
        }
    }
    out.push('}');
    out
}

fn print_hf(s: &HfSet) -> String {
    let mut out = String::from("chk{");
    for (i, x) in s.0.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&print_hf(x));
    }
    out.push('}');
    out
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_hf(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    fn universe() -> Universe {
        Universe::new(Algebra::weightless(2).unwrap())
    }

    #[test]
    fn empty_forall_is_top() {
        let u = universe();
        let f = FormulaParser::parse_formula_text(&u, "forall x in chk{}. false").unwrap();
        assert!(f.eval(&u, &BTreeMap::new()).unwrap().is_top());
    }

    #[test]
    fn guarded_exists() {
        // ‖∃x∈{∅̌↦{p}}. x=∅̌‖ = {p}
        let u = universe();
        let f =
            FormulaParser::parse_formula_text(&u, "exists x in {chk{} -> [0]}. x = chk{}")
                .unwrap();
        let p = AlgebraElement::atom(u.algebra(), 0).unwrap();
        assert_eq!(f.eval(&u, &BTreeMap::new()).unwrap(), p);
    }

    #[test]
    fn unbound_variable_is_reported() {
        let u = universe();
        let f = FormulaParser::parse_formula_text(&u, "x = chk{}").unwrap();
        assert_eq!(
            f.eval(&u, &BTreeMap::new()).unwrap_err(),
            BvsetError::UnboundVariable("x".into())
        );
    }

    #[test]
    fn separation_with_literal_formulas() {
        let u = universe();
        let a = u.algebra().clone();
        let p = AlgebraElement::atom(&a, 0).unwrap();
        let q = AlgebraElement::atom(&a, 1).unwrap();
        let e = u.empty_set();
        let se = u.singleton(e).unwrap();
        let x = u.mk_set(vec![(e, p.clone()), (se, q.clone())]).unwrap();

        // Φ = true keeps X unchanged; Φ = false zeroes every value.
        let same = u.separation(x, "v", &Delta0::True).unwrap();
        assert_eq!(same, x);
        let none = u.separation(x, "v", &Delta0::False).unwrap();
        for (_, v) in u.entries(none) {
            assert!(v.is_bot());
        }

        // Φ = "v = ∅̌" meets each value with the equality truth value.
        let phi = Delta0::Eq(SetTerm::Var("v".into()), SetTerm::Const(e));
        let sep = u.separation(x, "v", &phi).unwrap();
        let entries = u.entries(sep);
        assert_eq!(entries[0], (e, p));
        assert_eq!(entries[1].0, se);
        assert_eq!(entries[1].1, q.meet(&u.equality(se, e)));

        // A stray free variable is an error.
        let bad = Delta0::Eq(SetTerm::Var("v".into()), SetTerm::Var("w".into()));
        assert_eq!(
            u.separation(x, "v", &bad).unwrap_err(),
            BvsetError::ExtraFreeVariable("w".into())
        );
    }

    #[test]
    fn classical_and_embedded_agree_on_samples() {
        let u = universe();
        let zero = HfSet::numeral(0);
        let one = HfSet::numeral(1);
        let two = HfSet::numeral(2);
        let samples = vec![
            (
                HfFormula::Mem(HfTerm::Const(one.clone()), HfTerm::Const(two.clone())),
                true,
            ),
            (
                HfFormula::Mem(HfTerm::Const(two.clone()), HfTerm::Const(one.clone())),
                false,
            ),
            (
                HfFormula::Forall(
                    "x".into(),
                    HfTerm::Const(two.clone()),
                    Box::new(HfFormula::Mem(
                        HfTerm::Var("x".into()),
                        HfTerm::Const(two.clone()),
                    )),
                ),
                true,
            ),
            (
                HfFormula::Exists(
                    "x".into(),
                    HfTerm::Const(two.clone()),
                    Box::new(HfFormula::Eq(
                        HfTerm::Var("x".into()),
                        HfTerm::Const(zero.clone()),
                    )),
                ),
                true,
            ),
        ];
        for (f, expect) in samples {
            assert_eq!(f.eval_classical(&BTreeMap::new()).unwrap(), expect);
            let embedded = f.embed(&u).unwrap();
            let value = embedded.eval(&u, &BTreeMap::new()).unwrap();
            assert_eq!(value.is_top(), expect, "{f:?}");
        }
    }

    #[test]
    fn set_literal_round_trip() {
        let u = universe();
        let s = FormulaParser::parse_set_text(&u, "{chk{} -> [0], {chk{} -> top} -> [1]}")
            .unwrap();
        let printed = print_set(&u, s);
        let again = FormulaParser::parse_set_text(&u, &printed).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn parse_errors_have_positions() {
        let u = universe();
        let err = FormulaParser::parse_formula_text(&u, "forall x chk{}. true").unwrap_err();
        assert!(err.pos > 0);
        assert!(err.msg.contains("`in`"));
    }
}
