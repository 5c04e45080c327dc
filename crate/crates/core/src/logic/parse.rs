//! Concrete syntax.
//!
//! ```text
//! φ ::= top | bot | pN | ~φ | φ & φ | φ | φ | <>φ | []φ | <>{>=k}φ | <>{<=k}φ | <>{=k}φ | (φ)
//! ```
//! The dynamic logic adds `<π>φ`, `[π]φ` and `<π>=1 φ` with
//! `π ::= step | stay | test(φ) | π;π | π+π | (π)`, `;` binding tighter.
//! `≥` is accepted for `>=`.

use std::fmt;

use thiserror::Error;

use super::{GmlFormula, LddlFormula, LddlProgram};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Logic {
    Ml,
    Gml,
    Lddl,
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Logic::Ml => "ml",
            Logic::Gml => "gml",
            Logic::Lddl => "lddl",
        })
    }
}

impl std::str::FromStr for Logic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ml" => Ok(Logic::Ml),
            "gml" => Ok(Logic::Gml),
            "lddl" => Ok(Logic::Lddl),
            _ => Err(format!("unknown logic `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Gml(GmlFormula),
    Lddl(LddlFormula),
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Gml(g) => g.fmt(f),
            Formula::Lddl(l) => l.fmt(f),
        }
    }
}

struct Cursor<'a> {
    s: &'a str,
    i: usize,
}

fn perr<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, msg: msg.into() })
}

impl<'a> Cursor<'a> {
    fn ws(&mut self) {
        while let Some(c) = self.s[self.i..].chars().next() {
            if c.is_whitespace() {
                self.i += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.i..]
    }

    /// Consumes `t` after skipping whitespace.
    fn eat(&mut self, t: &str) -> bool {
        self.ws();
        if self.rest().starts_with(t) {
            self.i += t.len();
            true
        } else {
            false
        }
    }

    /// Consumes a keyword not followed by an identifier character.
    fn keyword(&mut self, k: &str) -> bool {
        self.ws();
        let r = self.rest();
        if r.starts_with(k) && !r[k.len()..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
            self.i += k.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.ws();
            perr(self.i, format!("expected `{t}`"))
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        self.ws();
        let start = self.i;
        let n = self.rest().bytes().take_while(|b| b.is_ascii_digit()).count();
        if n == 0 {
            return perr(start, "expected a number");
        }
        self.i += n;
        self.s[start..self.i].parse().or_else(|_| perr(start, "number too large"))
    }

    fn prop(&mut self) -> Result<Option<usize>, ParseError> {
        self.ws();
        let r = self.rest();
        if r.starts_with('p') && r[1..].starts_with(|c: char| c.is_ascii_digit()) {
            let at = self.i;
            self.i += 1;
            let n = self.number()?;
            if n == 0 {
                return perr(at, "props are numbered from 1");
            }
            return Ok(Some(n));
        }
        Ok(None)
    }
}

enum Grade {
    Geq(usize),
    Leq(usize),
    Eq(usize),
}

/// Parses an optional `{>=k}`, `{<=k}` or `{=k}` after `<>`.
fn grade(c: &mut Cursor) -> Result<Option<(usize, Grade)>, ParseError> {
    if !c.eat("{") {
        return Ok(None);
    }
    c.ws();
    let at = c.i;
    let kind = if c.eat(">=") || c.eat("≥") {
        0
    } else if c.eat("<=") || c.eat("≤") {
        1
    } else if c.eat("=") {
        2
    } else {
        return perr(at, "expected `>=`, `<=` or `=`");
    };
    c.ws();
    let np = c.i;
    let k = c.number()?;
    if k == 0 {
        return perr(np, "grade must be at least 1");
    }
    c.expect("}")?;
    Ok(Some((at, [Grade::Geq(k), Grade::Leq(k), Grade::Eq(k)].into_iter().nth(kind).unwrap())))
}

trait Syntax {
    type F;
    fn top() -> Self::F;
    fn prop(i: usize) -> Self::F;
    fn not(f: Self::F) -> Self::F;
    fn and(a: Self::F, b: Self::F) -> Self::F;
    fn or(a: Self::F, b: Self::F) -> Self::F;
    /// Modal prefixes; `None` if the input does not start with one.
    fn modal(&self, c: &mut Cursor) -> Result<Option<Self::F>, ParseError>;
}

fn or_expr<S: Syntax>(s: &S, c: &mut Cursor) -> Result<S::F, ParseError> {
    let mut f = and_expr(s, c)?;
    while c.eat("|") {
        f = S::or(f, and_expr(s, c)?);
    }
    Ok(f)
}

fn and_expr<S: Syntax>(s: &S, c: &mut Cursor) -> Result<S::F, ParseError> {
    let mut f = unary(s, c)?;
    while c.eat("&") {
        f = S::and(f, unary(s, c)?);
    }
    Ok(f)
}

fn unary<S: Syntax>(s: &S, c: &mut Cursor) -> Result<S::F, ParseError> {
    if c.eat("~") {
        return Ok(S::not(unary(s, c)?));
    }
    if let Some(f) = s.modal(c)? {
        return Ok(f);
    }
    if c.keyword("top") {
        return Ok(S::top());
    }
    if c.keyword("bot") {
        return Ok(S::not(S::top()));
    }
    if let Some(i) = c.prop()? {
        return Ok(S::prop(i));
    }
    if c.eat("(") {
        let f = or_expr(s, c)?;
        c.expect(")")?;
        return Ok(f);
    }
    c.ws();
    if c.i >= c.s.len() {
        perr(c.i, "unexpected end of formula")
    } else {
        perr(c.i, format!("unexpected `{}`", c.rest().chars().next().unwrap()))
    }
}

struct GmlSyntax {
    ml_only: bool,
}

impl Syntax for GmlSyntax {
    type F = GmlFormula;
    fn top() -> GmlFormula {
        GmlFormula::Top
    }
    fn prop(i: usize) -> GmlFormula {
        GmlFormula::Prop(i)
    }
    fn not(f: GmlFormula) -> GmlFormula {
        f.not()
    }
    fn and(a: GmlFormula, b: GmlFormula) -> GmlFormula {
        a.and(b)
    }
    fn or(a: GmlFormula, b: GmlFormula) -> GmlFormula {
        a.or(b)
    }
    fn modal(&self, c: &mut Cursor) -> Result<Option<GmlFormula>, ParseError> {
        if c.eat("[]") {
            return Ok(Some(GmlFormula::box_(unary(self, c)?)));
        }
        if !c.eat("<>") {
            return Ok(None);
        }
        let g = grade(c)?;
        let body = unary(self, c)?;
        Ok(Some(match g {
            None => GmlFormula::diamond(body),
            Some((at, g)) => {
                let f = match g {
                    Grade::Geq(k) => GmlFormula::diamond_geq(k, body),
                    Grade::Leq(k) => GmlFormula::diamond_leq(k, body),
                    Grade::Eq(k) => GmlFormula::diamond_eq(k, body),
                };
                if self.ml_only && !matches!(f, GmlFormula::DiamondGeq(1, _)) {
                    return perr(at, "modal logic allows only grade >= 1");
                }
                f
            }
        }))
    }
}

struct LddlSyntax;

impl LddlSyntax {
    fn program(&self, c: &mut Cursor) -> Result<LddlProgram, ParseError> {
        let mut p = self.seq(c)?;
        while c.eat("+") {
            p = p.union(self.seq(c)?);
        }
        Ok(p)
    }

    fn seq(&self, c: &mut Cursor) -> Result<LddlProgram, ParseError> {
        let mut p = self.patom(c)?;
        while c.eat(";") {
            p = p.seq(self.patom(c)?);
        }
        Ok(p)
    }

    fn patom(&self, c: &mut Cursor) -> Result<LddlProgram, ParseError> {
        if c.keyword("step") {
            return Ok(LddlProgram::Step);
        }
        if c.keyword("stay") {
            return Ok(LddlProgram::stay());
        }
        if c.eat("test(") || (c.keyword("test") && c.eat("(")) {
            let f = or_expr(self, c)?;
            c.expect(")")?;
            return Ok(LddlProgram::test(f));
        }
        if c.eat("(") {
            let p = self.program(c)?;
            c.expect(")")?;
            return Ok(p);
        }
        c.ws();
        perr(c.i, "expected a program")
    }

    fn after_program(&self, c: &mut Cursor, p: LddlProgram) -> Result<LddlFormula, ParseError> {
        // `=1` must follow the closing `>` immediately
        if c.rest().starts_with("=1") && !c.rest()[2..].starts_with(|ch: char| ch.is_ascii_digit()) {
            c.i += 2;
            return Ok(LddlFormula::unique(p, unary(self, c)?));
        }
        Ok(LddlFormula::diamond(p, unary(self, c)?))
    }
}

impl Syntax for LddlSyntax {
    type F = LddlFormula;
    fn top() -> LddlFormula {
        LddlFormula::Top
    }
    fn prop(i: usize) -> LddlFormula {
        LddlFormula::Prop(i)
    }
    fn not(f: LddlFormula) -> LddlFormula {
        f.not()
    }
    fn and(a: LddlFormula, b: LddlFormula) -> LddlFormula {
        a.and(b)
    }
    fn or(a: LddlFormula, b: LddlFormula) -> LddlFormula {
        a.or(b)
    }
    fn modal(&self, c: &mut Cursor) -> Result<Option<LddlFormula>, ParseError> {
        if c.eat("[]") {
            return Ok(Some(LddlFormula::box_(LddlProgram::Step, unary(self, c)?)));
        }
        if c.eat("<>") {
            let g = grade(c)?;
            return Ok(Some(match g {
                None | Some((_, Grade::Geq(1))) => LddlFormula::diamond(LddlProgram::Step, unary(self, c)?),
                Some((_, Grade::Eq(1))) => LddlFormula::unique(LddlProgram::Step, unary(self, c)?),
                Some((at, _)) => return perr(at, "only grades >=1 and =1 exist here"),
            }));
        }
        if c.eat("[") {
            let p = self.program(c)?;
            c.expect("]")?;
            return Ok(Some(LddlFormula::box_(p, unary(self, c)?)));
        }
        if c.eat("<") {
            let p = self.program(c)?;
            c.expect(">")?;
            return Ok(Some(self.after_program(c, p)?));
        }
        Ok(None)
    }
}

fn finish<T>(c: &mut Cursor, f: T) -> Result<T, ParseError> {
    c.ws();
    if c.i < c.s.len() {
        return perr(c.i, "trailing input");
    }
    Ok(f)
}

pub fn parse_gml(text: &str) -> Result<GmlFormula, ParseError> {
    let mut c = Cursor { s: text, i: 0 };
    let f = or_expr(&GmlSyntax { ml_only: false }, &mut c)?;
    finish(&mut c, f)
}

pub fn parse_ml(text: &str) -> Result<GmlFormula, ParseError> {
    let mut c = Cursor { s: text, i: 0 };
    let f = or_expr(&GmlSyntax { ml_only: true }, &mut c)?;
    finish(&mut c, f)
}

pub fn parse_lddl(text: &str) -> Result<LddlFormula, ParseError> {
    let mut c = Cursor { s: text, i: 0 };
    let f = or_expr(&LddlSyntax, &mut c)?;
    finish(&mut c, f)
}

pub fn parse_formula(text: &str, logic: Logic) -> Result<Formula, ParseError> {
    match logic {
        Logic::Ml => parse_ml(text).map(Formula::Gml),
        Logic::Gml => parse_gml(text).map(Formula::Gml),
        Logic::Lddl => parse_lddl(text).map(Formula::Lddl),
    }
}

pub(crate) fn print_gml(f: &GmlFormula) -> String {
    match f {
        GmlFormula::Top => "top".into(),
        GmlFormula::Not(a) if **a == GmlFormula::Top => "bot".into(),
        GmlFormula::Prop(i) => format!("p{i}"),
        GmlFormula::Not(a) => format!("~{}", print_gml(a)),
        GmlFormula::And(a, b) => format!("({} & {})", print_gml(a), print_gml(b)),
        GmlFormula::Or(a, b) => format!("({} | {})", print_gml(a), print_gml(b)),
        GmlFormula::DiamondGeq(1, a) => format!("<>{}", print_gml(a)),
        GmlFormula::DiamondGeq(k, a) => format!("<>{{>={k}}}{}", print_gml(a)),
    }
}

pub(crate) fn print_lddl(f: &LddlFormula) -> String {
    match f {
        LddlFormula::Top => "top".into(),
        LddlFormula::Not(a) if **a == LddlFormula::Top => "bot".into(),
        LddlFormula::Prop(i) => format!("p{i}"),
        LddlFormula::Not(a) => format!("~{}", print_lddl(a)),
        LddlFormula::And(a, b) => format!("({} & {})", print_lddl(a), print_lddl(b)),
        LddlFormula::Or(a, b) => format!("({} | {})", print_lddl(a), print_lddl(b)),
        LddlFormula::Diamond(p, a) => format!("<{}>{}", print_program(p), print_lddl(a)),
        LddlFormula::Box(p, a) => format!("[{}]{}", print_program(p), print_lddl(a)),
        LddlFormula::Unique(p, a) => format!("<{}>=1 {}", print_program(p), print_lddl(a)),
    }
}

pub(crate) fn print_program(p: &LddlProgram) -> String {
    match p {
        LddlProgram::Step => "step".into(),
        LddlProgram::Test(f) if **f == LddlFormula::Top => "stay".into(),
        LddlProgram::Test(f) => format!("test({})", print_lddl(f)),
        LddlProgram::Seq(a, b) => {
            let l = match **a {
                LddlProgram::Union(..) => format!("({})", print_program(a)),
                _ => print_program(a),
            };
            let r = match **b {
                LddlProgram::Union(..) | LddlProgram::Seq(..) => format!("({})", print_program(b)),
                _ => print_program(b),
            };
            format!("{l};{r}")
        }
        LddlProgram::Union(a, b) => {
            let r = match **b {
                LddlProgram::Union(..) => format!("({})", print_program(b)),
                _ => print_program(b),
            };
            format!("{}+{r}", print_program(a))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gml_examples() {
        assert_eq!(parse_gml("<>p1").unwrap(), GmlFormula::diamond(GmlFormula::Prop(1)));
        let e = parse_gml("<>{>=0} p1").unwrap_err();
        assert!(e.msg.contains("at least 1"));
        assert_eq!(parse_gml("<>{≥2}top").unwrap(), GmlFormula::diamond_geq(2, GmlFormula::Top));
        assert_eq!(
            parse_gml("p1 | p2 & ~p1").unwrap(),
            GmlFormula::Prop(1).or(GmlFormula::Prop(2).and(GmlFormula::Prop(1).not()))
        );
        assert_eq!(parse_gml("[]p1").unwrap(), GmlFormula::box_(GmlFormula::Prop(1)));
        assert_eq!(parse_gml("<>{=2}top").unwrap(), GmlFormula::diamond_eq(2, GmlFormula::Top));
        assert!(parse_gml("p1 &").is_err());
        assert!(parse_gml("p0").is_err());
    }

    #[test]
    fn ml_rejects_grades() {
        assert!(parse_ml("<>{>=2}p1").is_err());
        assert!(parse_ml("<>{=1}p1").is_err());
        assert!(parse_ml("<>{>=1}p1").is_ok());
    }

    #[test]
    fn lddl_examples() {
        let f = parse_lddl("<step;step>=1 p1").unwrap();
        assert_eq!(
            f,
            LddlFormula::unique(LddlProgram::Step.seq(LddlProgram::Step), LddlFormula::Prop(1))
        );
        let g = parse_lddl("<(step + stay);step>top").unwrap();
        assert_eq!(
            g,
            LddlFormula::diamond(
                LddlProgram::Step.union(LddlProgram::stay()).seq(LddlProgram::Step),
                LddlFormula::Top
            )
        );
        assert_eq!(parse_lddl("<>{=1}top").unwrap(), LddlFormula::unique(LddlProgram::Step, LddlFormula::Top));
        assert!(parse_lddl("<>{>=2}top").is_err());
        assert!(parse_lddl("<test(<step>p1)>top").is_ok());
        assert!(parse_lddl("<step>= 1 p1").is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        for s in ["<step;(step+stay)>=1 ~p1", "[step;step](p1 | <stay>top)", "<step;(step;step)>top", "<step+(step+stay)>p2"] {
            let f = parse_lddl(s).unwrap();
            assert_eq!(parse_lddl(&f.to_string()).unwrap(), f, "{s}");
        }
    }
}
