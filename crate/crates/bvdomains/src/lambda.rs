//! Untyped λ-calculus: syntax, capture-avoiding substitution, normal-order
//! reduction with a step budget, Church encodings, and derivable equality
//! between normalizing terms.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type TermRef = Arc<Term>;

/// Handle to a model constant; resolution lives with the denotation engine.
#[derive(Debug, Clone)]
pub struct ConstHandle {
    pub id: u64,
    pub label: String,
}

impl PartialEq for ConstHandle {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for ConstHandle {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    Lam(String, TermRef),
    App(TermRef, TermRef),
    Const(ConstHandle),
}

pub fn var(name: &str) -> TermRef {
    Arc::new(Term::Var(name.to_string()))
}

pub fn lam(name: &str, body: TermRef) -> TermRef {
    Arc::new(Term::Lam(name.to_string(), body))
}

pub fn app(f: TermRef, a: TermRef) -> TermRef {
    Arc::new(Term::App(f, a))
}

pub fn app2(f: TermRef, a: TermRef, b: TermRef) -> TermRef {
    app(app(f, a), b)
}

pub fn app3(f: TermRef, a: TermRef, b: TermRef, c: TermRef) -> TermRef {
    app(app(app(f, a), b), c)
}

/// Free variables, in name order.
pub fn free_vars(t: &Term) -> BTreeSet<String> {
    match t {
        Term::Var(x) => BTreeSet::from([x.clone()]),
        Term::Lam(x, b) => {
            let mut fv = free_vars(b);
            fv.remove(x);
            fv
        }
        Term::App(f, a) => {
            let mut fv = free_vars(f);
            fv.extend(free_vars(a));
            fv
        }
        Term::Const(_) => BTreeSet::new(),
    }
}

pub fn is_closed(t: &Term) -> bool {
    free_vars(t).is_empty()
}

/// Smallest `basen` (n = 1, 2, ...) not in `avoid`.
fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem: String = base
        .trim_end_matches(|c: char| c.is_ascii_digit())
        .to_string();
    let stem = if stem.is_empty() { "x".to_string() } else { stem };
    for i in 1u64.. {
        let candidate = format!("{stem}{i}");
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

/// `M[x := N]`, renaming bound variables that would capture a free
/// variable of `N`. Fresh names come from a deterministic suffix counter.
pub fn substitute(m: &TermRef, x: &str, n: &TermRef) -> TermRef {
    match m.as_ref() {
        Term::Var(y) => {
            if y == x {
                Arc::clone(n)
            } else {
                Arc::clone(m)
            }
        }
        Term::Const(_) => Arc::clone(m),
        Term::App(f, a) => app(substitute(f, x, n), substitute(a, x, n)),
        Term::Lam(y, body) => {
            if y == x {
                return Arc::clone(m);
            }
            let fv_n = free_vars(n);
            if !free_vars(m).contains(x) {
                return Arc::clone(m);
            }
            if fv_n.contains(y) {
                let mut avoid = fv_n;
                avoid.extend(free_vars(body));
                avoid.insert(x.to_string());
                let y2 = fresh_name(y, &avoid);
                let renamed = substitute(body, y, &var(&y2));
                lam(&y2, substitute(&renamed, x, n))
            } else {
                lam(y, substitute(body, x, n))
            }
        }
    }
}

/// Contracts the leftmost-outermost β-redex, if any.
fn reduce_once(t: &TermRef) -> Option<TermRef> {
    match t.as_ref() {
        Term::Var(_) | Term::Const(_) => None,
        Term::Lam(x, b) => reduce_once(b).map(|b2| lam(x, b2)),
        Term::App(f, a) => {
            if let Term::Lam(x, body) = f.as_ref() {
                return Some(substitute(body, x, a));
            }
            if let Some(f2) = reduce_once(f) {
                return Some(app(f2, Arc::clone(a)));
            }
            reduce_once(a).map(|a2| app(Arc::clone(f), a2))
        }
    }
}

/// Result of running the normalizer; budget exhaustion is a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized {
    /// A β-normal form was reached within the budget.
    Normal { term: TermRef, steps: usize },
    /// The budget ran out; carries the last reduct.
    BudgetExceeded { last: TermRef },
}

/// Leftmost-outermost reduction for at most `max_steps` contractions.
pub fn normalize(t: &TermRef, max_steps: usize) -> Normalized {
    let mut cur = Arc::clone(t);
    for steps in 0..=max_steps {
        match reduce_once(&cur) {
            None => return Normalized::Normal { term: cur, steps },
            Some(next) => {
                if steps == max_steps {
                    return Normalized::BudgetExceeded { last: next };
                }
                cur = next;
            }
        }
    }
    unreachable!()
}

/// α-equivalence via positional comparison of binders.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, ea: &mut Vec<String>, eb: &mut Vec<String>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let ia = ea.iter().rposition(|n| n == x);
                let ib = eb.iter().rposition(|n| n == y);
                match (ia, ib) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::Const(c), Term::Const(d)) => c == d,
            (Term::App(f1, a1), Term::App(f2, a2)) => {
                go(f1, f2, ea, eb) && go(a1, a2, ea, eb)
            }
            (Term::Lam(x, b1), Term::Lam(y, b2)) => {
                ea.push(x.clone());
                eb.push(y.clone());
                let r = go(b1, b2, ea, eb);
                ea.pop();
                eb.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

/// Outcome of comparing two terms under β-conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoryVerdict {
    /// Both normalize to α-equal forms; the equation is derivable.
    Equal,
    /// Both normalize, to distinct normal forms.
    UnequalNormalForms,
    /// At least one side exhausted the step budget.
    Inconclusive,
}

/// Sound decision procedure for derivable equality between normalizing
/// terms: normalize both sides and compare up to α.
pub fn theory_equal(m: &TermRef, n: &TermRef, max_steps: usize) -> TheoryVerdict {
    let nm = normalize(m, max_steps);
    let nn = normalize(n, max_steps);
    match (nm, nn) {
        (
            Normalized::Normal { term: tm, .. },
            Normalized::Normal { term: tn, .. },
        ) => {
            if alpha_eq(&tm, &tn) {
                TheoryVerdict::Equal
            } else {
                TheoryVerdict::UnequalNormalForms
            }
        }
        _ => TheoryVerdict::Inconclusive,
    }
}

pub mod church {
    //! Church Booleans, numerals and the arithmetic combinators.

    use super::*;

    /// `λf.λx. f (f ... (f x))` with `n` applications.
    pub fn numeral(n: usize) -> TermRef {
        let mut body = var("x");
        for _ in 0..n {
            body = app(var("f"), body);
        }
        lam("f", lam("x", body))
    }

    pub fn ctrue() -> TermRef {
        lam("x", lam("y", var("x")))
    }

    pub fn cfalse() -> TermRef {
        lam("x", lam("y", var("y")))
    }

    pub fn cif() -> TermRef {
        lam("b", lam("t", lam("e", app2(var("b"), var("t"), var("e")))))
    }

    pub fn succ() -> TermRef {
        lam(
            "n",
            lam(
                "f",
                lam("x", app(var("f"), app2(var("n"), var("f"), var("x")))),
            ),
        )
    }

    pub fn pred() -> TermRef {
        // λn.λf.λx. n (λg.λh. h (g f)) (λu. x) (λu. u)
        let inner = lam("g", lam("h", app(var("h"), app(var("g"), var("f")))));
        lam(
            "n",
            lam(
                "f",
                lam(
                    "x",
                    app3(var("n"), inner, lam("u", var("x")), lam("u", var("u"))),
                ),
            ),
        )
    }

    pub fn iszero() -> TermRef {
        lam("n", app2(var("n"), lam("z", cfalse()), ctrue()))
    }

    /// The numeral recognizer: `num(m) c_n` is `true` iff `m = n`.
    /// `num(0)` is the zero test itself; `num(1) = λm. if (iszero m) false
    /// (iszero (pred m))`; `num(k) = λm. num(k-1) (pred m)` above that.
    pub fn num(m: usize) -> TermRef {
        match m {
            0 => iszero(),
            1 => lam(
                "m",
                app3(
                    cif(),
                    app(iszero(), var("m")),
                    cfalse(),
                    app(iszero(), app(pred(), var("m"))),
                ),
            ),
            _ => lam("m", app(num(m - 1), app(pred(), var("m")))),
        }
    }

    /// Test helper: Church addition.
    pub fn plus() -> TermRef {
        lam(
            "a",
            lam(
                "b",
                lam(
                    "f",
                    lam(
                        "x",
                        app2(var("a"), var("f"), app2(var("b"), var("f"), var("x"))),
                    ),
                ),
            ),
        )
    }

    /// Test helper: Church multiplication.
    pub fn times() -> TermRef {
        lam(
            "a",
            lam(
                "b",
                lam("f", app(var("a"), app(var("b"), var("f")))),
            ),
        )
    }
}

/// Decodes a normal form back to the index of the Church numeral it is
/// α-equal to, if any.
pub fn as_numeral(t: &Term) -> Option<usize> {
    let Term::Lam(f, body) = t else { return None };
    let Term::Lam(x, mut cur) = body.as_ref().clone() else {
        return None;
    };
    // Unwrap n applications of f around x; binder names may shadow.
    if f == &x {
        // λf.λf. ... : inner binder shadows, only #0 possible.
        return match cur.as_ref() {
            Term::Var(v) if *v == x => Some(0),
            _ => None,
        };
    }
    let mut n = 0;
    loop {
        match cur.as_ref().clone() {
            Term::Var(v) if v == x => return Some(n),
            Term::App(g, rest) => match g.as_ref() {
                Term::Var(v) if v == f.as_str() => {
                    n += 1;
                    cur = rest;
                }
                _ => return None,
            },
            _ => return None,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct TermParseError {
    pub pos: usize,
    pub msg: String,
}

struct Lexer {
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum TTok {
    Lambda,
    Dot,
    LParen,
    RParen,
    Hash(usize),
    Ident(String),
}

impl Lexer {
    fn tokens(text: &str) -> Result<Vec<(usize, TTok)>, TermParseError> {
        let mut lx = Lexer { pos: 0 };
        let mut out = Vec::new();
        let bytes = text.as_bytes();
        while lx.pos < bytes.len() {
            let c = bytes[lx.pos] as char;
            let start = lx.pos;
            match c {
                ' ' | '\t' | '\n' | '\r' => lx.pos += 1,
                '\\' => {
                    out.push((start, TTok::Lambda));
                    lx.pos += 1;
                }
                '.' => {
                    out.push((start, TTok::Dot));
                    lx.pos += 1;
                }
                '(' => {
                    out.push((start, TTok::LParen));
                    lx.pos += 1;
                }
                ')' => {
                    out.push((start, TTok::RParen));
                    lx.pos += 1;
                }
                '#' => {
                    lx.pos += 1;
                    let ds = lx.pos;
                    while lx.pos < bytes.len() && bytes[lx.pos].is_ascii_digit() {
                        lx.pos += 1;
                    }
                    if ds == lx.pos {
                        return Err(TermParseError {
                            pos: start,
                            msg: "`#` must be followed by digits".into(),
                        });
                    }
                    let n = text[ds..lx.pos].parse().map_err(|_| TermParseError {
                        pos: start,
                        msg: "numeral too large".into(),
                    })?;
                    out.push((start, TTok::Hash(n)));
                }
                _ if c.is_ascii_alphabetic() || c == '_' => {
                    while lx.pos < bytes.len()
                        && (bytes[lx.pos].is_ascii_alphanumeric() || bytes[lx.pos] == b'_')
                    {
                        lx.pos += 1;
                    }
                    out.push((start, TTok::Ident(text[start..lx.pos].to_string())));
                }
                _ => {
                    return Err(TermParseError {
                        pos: start,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            }
        }
        Ok(out)
    }
}

struct TermParser {
    toks: Vec<(usize, TTok)>,
    pos: usize,
    end: usize,
}

impl TermParser {
    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn peek(&self) -> Option<&TTok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, TermParseError> {
        Err(TermParseError {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn term(&mut self) -> Result<TermRef, TermParseError> {
        if self.peek() == Some(&TTok::Lambda) {
            self.pos += 1;
            let mut binders = Vec::new();
            loop {
                match self.peek() {
                    Some(TTok::Ident(name)) => {
                        if sugar_keyword(name) {
                            return self.err(format!("`{name}` is reserved"));
                        }
                        binders.push(name.clone());
                        self.pos += 1;
                    }
                    Some(TTok::Dot) => break,
                    _ => return self.err("expected binder or `.`"),
                }
            }
            if binders.is_empty() {
                return self.err("λ needs at least one binder");
            }
            self.pos += 1; // dot
            let mut body = self.term()?;
            for b in binders.iter().rev() {
                body = lam(b, body);
            }
            return Ok(body);
        }
        // Application: one or more atoms, left associated.
        let mut acc = self.atom()?;
        loop {
            match self.peek() {
                Some(TTok::Lambda) => {
                    // `f \x. M` applies f to the whole abstraction.
                    let arg = self.term()?;
                    acc = app(acc, arg);
                    break;
                }
                Some(TTok::LParen) | Some(TTok::Hash(_)) | Some(TTok::Ident(_)) => {
                    let arg = self.atom()?;
                    acc = app(acc, arg);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<TermRef, TermParseError> {
        match self.peek().cloned() {
            Some(TTok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                if self.peek() == Some(&TTok::RParen) {
                    self.pos += 1;
                    Ok(t)
                } else {
                    self.err("expected `)`")
                }
            }
            Some(TTok::Hash(n)) => {
                self.pos += 1;
                Ok(church::numeral(n))
            }
            Some(TTok::Ident(name)) => {
                self.pos += 1;
                Ok(match name.as_str() {
                    "true" => church::ctrue(),
                    "false" => church::cfalse(),
                    "if" => church::cif(),
                    "succ" => church::succ(),
                    "pred" => church::pred(),
                    "iszero" => church::iszero(),
                    _ => {
                        if let Some(m) = name
                            .strip_prefix("num_")
                            .and_then(|d| d.parse::<usize>().ok())
                        {
                            church::num(m)
                        } else {
                            var(&name)
                        }
                    }
                })
            }
            _ => self.err("expected a term"),
        }
    }
}

fn sugar_keyword(s: &str) -> bool {
    matches!(s, "true" | "false" | "if" | "succ" | "pred" | "iszero")
        || s.strip_prefix("num_")
            .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

/// Parses the documented grammar; sugar expands to pure terms.
pub fn parse_term(text: &str) -> Result<TermRef, TermParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = TermParser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let t = p.term()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(t)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_term(self))
    }
}

/// Pretty-prints in the same grammar `parse_term` accepts.
pub fn print_term(t: &Term) -> String {
    fn atom(t: &Term, out: &mut String) {
        match t {
            Term::Var(x) => out.push_str(x),
            Term::Const(c) => {
                out.push_str("<const:");
                out.push_str(&c.label);
                out.push('>');
            }
            _ => {
                out.push('(');
                walk(t, out);
                out.push(')');
            }
        }
    }
    fn appl(t: &Term, out: &mut String) {
        match t {
            Term::App(f, a) => {
                appl(f, out);
                out.push(' ');
                atom(a, out);
            }
            _ => atom(t, out),
        }
    }
    fn walk(t: &Term, out: &mut String) {
        match t {
            Term::Lam(x, b) => {
                out.push('\\');
                out.push_str(x);
                out.push_str(". ");
                walk(b, out);
            }
            Term::App(..) => appl(t, out),
            _ => atom(t, out),
        }
    }
    let mut out = String::new();
    walk(t, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(m: &TermRef, n: &TermRef) -> TheoryVerdict {
        theory_equal(m, n, 10_000)
    }

    #[test]
    fn parse_basics() {
        let t = parse_term("\\x. x").unwrap();
        assert_eq!(t, lam("x", var("x")));
        let t = parse_term("#2").unwrap();
        assert!(alpha_eq(
            &t,
            &lam("g", lam("y", app(var("g"), app(var("g"), var("y")))))
        ));
        assert!(parse_term("\\x. \\x").is_err());
        assert!(parse_term("(x").is_err());
        let e = parse_term("x @ y").unwrap_err();
        assert!(e.pos > 0);
    }

    #[test]
    fn application_is_left_associative() {
        let t = parse_term("f a b").unwrap();
        assert_eq!(t, app(app(var("f"), var("a")), var("b")));
    }

    #[test]
    fn substitution_examples() {
        // (λy.x)[x:=y] renames the binder.
        let m = lam("y", var("x"));
        let r = substitute(&m, "x", &var("y"));
        match r.as_ref() {
            Term::Lam(b, body) => {
                assert_ne!(b, "y");
                assert_eq!(body.as_ref(), &Term::Var("y".into()));
            }
            _ => panic!("expected a lambda"),
        }
        // x[x:=N] = N
        assert_eq!(substitute(&var("x"), "x", &var("z")), var("z"));
        // Only free occurrences are replaced.
        let m = app(lam("x", var("x")), var("x"));
        let r = substitute(&m, "x", &church::numeral(0));
        assert_eq!(
            r,
            app(lam("x", var("x")), church::numeral(0))
        );
    }

    #[test]
    fn capture_avoidance_through_nested_binders() {
        // (λf.λx. f x)[applied to] (λy. x) must not capture the free x.
        let outer = lam("f", lam("x", app(var("f"), var("x"))));
        let arg = lam("y", var("x"));
        let r = normalize(&app(outer, arg), 100);
        let Normalized::Normal { term, .. } = r else {
            panic!()
        };
        // Result is λx1. x applied inside: the free x stays free.
        assert!(free_vars(&term).contains("x"));
    }

    #[test]
    fn normalize_counts_steps() {
        let t = app(lam("x", var("x")), var("y"));
        match normalize(&t, 10) {
            Normalized::Normal { term, steps } => {
                assert_eq!(term, var("y"));
                assert_eq!(steps, 1);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn omega_exhausts_budget() {
        let w = lam("x", app(var("x"), var("x")));
        let omega = app(w.clone(), w);
        assert!(matches!(
            normalize(&omega, 50),
            Normalized::BudgetExceeded { .. }
        ));
        assert_eq!(eq(&omega, &omega), TheoryVerdict::Inconclusive);
    }

    #[test]
    fn numeral_arithmetic() {
        for n in 0..=8usize {
            let succ_n = app(church::succ(), church::numeral(n));
            assert_eq!(eq(&succ_n, &church::numeral(n + 1)), TheoryVerdict::Equal);
            let pred_n1 = app(church::pred(), church::numeral(n + 1));
            assert_eq!(eq(&pred_n1, &church::numeral(n)), TheoryVerdict::Equal);
        }
        let pred_0 = app(church::pred(), church::numeral(0));
        assert_eq!(eq(&pred_0, &church::numeral(0)), TheoryVerdict::Equal);
    }

    #[test]
    fn boolean_selection() {
        let a = church::numeral(4);
        let b = church::numeral(7);
        let pick_t = app3(church::cif(), church::ctrue(), a.clone(), b.clone());
        assert_eq!(eq(&pick_t, &a), TheoryVerdict::Equal);
        let pick_f = app3(church::cif(), church::cfalse(), a, b);
        assert_eq!(
            eq(&pick_f, &church::numeral(7)),
            TheoryVerdict::Equal
        );
        assert_eq!(
            eq(&church::ctrue(), &church::cfalse()),
            TheoryVerdict::UnequalNormalForms
        );
    }

    #[test]
    fn zero_test() {
        assert_eq!(
            eq(
                &app(church::iszero(), church::numeral(0)),
                &church::ctrue()
            ),
            TheoryVerdict::Equal
        );
        for n in 1..=8usize {
            assert_eq!(
                eq(
                    &app(church::iszero(), church::numeral(n)),
                    &church::cfalse()
                ),
                TheoryVerdict::Equal
            );
        }
    }

    #[test]
    fn numeral_recognizers() {
        for m in 0..=5usize {
            for n in 0..=5usize {
                let t = app(church::num(m), church::numeral(n));
                let expect = if m == n {
                    church::ctrue()
                } else {
                    church::cfalse()
                };
                assert_eq!(eq(&t, &expect), TheoryVerdict::Equal, "num_{m} #{n}");
            }
        }
    }

    #[test]
    fn plus_times_match_machine_arithmetic() {
        for a in 0..=6usize {
            for b in 0..=6usize {
                let s = app2(church::plus(), church::numeral(a), church::numeral(b));
                assert_eq!(eq(&s, &church::numeral(a + b)), TheoryVerdict::Equal);
                let p = app2(church::times(), church::numeral(a), church::numeral(b));
                assert_eq!(eq(&p, &church::numeral(a * b)), TheoryVerdict::Equal);
            }
        }
    }

    #[test]
    fn numeral_decoding() {
        for n in 0..6 {
            assert_eq!(as_numeral(&church::numeral(n)), Some(n));
        }
        assert_eq!(as_numeral(&church::ctrue()), None);
        let Normalized::Normal { term, .. } =
            normalize(&app(church::succ(), church::numeral(2)), 1000)
        else {
            panic!()
        };
        assert_eq!(as_numeral(&term), Some(3));
    }

    #[test]
    fn print_parse_round_trip() {
        let samples = [
            "\\x. x",
            "\\f. \\x. f (f x)",
            "(\\x. x x) (\\y. y)",
            "f a b (c d)",
            "\\x. \\y. x (\\z. z y) y",
        ];
        for s in samples {
            let t = parse_term(s).unwrap();
            let printed = print_term(&t);
            let again = parse_term(&printed).unwrap();
            assert!(alpha_eq(&t, &again), "{s} -> {printed}");
        }
    }

    #[test]
    fn sugar_expands_to_pure_terms() {
        for text in ["#3", "true", "false", "if", "succ", "pred", "iszero", "num_2"] {
            let t = parse_term(text).unwrap();
            assert!(is_closed(&t), "{text}");
            assert!(!format!("{t}").contains("const"));
        }
        // Sugar in context behaves like its expansion.
        let t = parse_term("succ #2").unwrap();
        assert_eq!(
            eq(&t, &church::numeral(3)),
            TheoryVerdict::Equal
        );
    }

    #[test]
    fn normalize_is_deterministic() {
        let t = parse_term("(\\x. x x) ((\\y. y) (\\z. z))").unwrap();
        let a = normalize(&t, 1000);
        let b = normalize(&t, 1000);
        assert_eq!(a, b);
    }
}
