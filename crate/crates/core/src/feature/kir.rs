//! `.kir` s-expression model format.
//!
//! Beyond the plain node forms, a model may carry a `(defs e0 e1 ...)` block
//! before its expression; `(ref i)` then denotes definition `i`. The writer
//! uses this for every non-atomic node referenced more than once, so shared
//! DAGs serialize in linear size.

use std::collections::HashMap;

use thiserror::Error;

use super::classifier::{GnnClassifier, Policy};
use super::{Feature, FeatureExpr};
use crate::rational::Rational;
use crate::scalar::{Mode, Primitive};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {pos}: {msg}")]
pub struct KirError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, KirError> {
    Err(KirError { pos, msg: msg.into() })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, KirError> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b';' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
        } else if c == b'(' {
            out.push((i, Tok::Open));
            i += 1;
        } else if c == b')' {
            out.push((i, Tok::Close));
            i += 1;
        } else {
            let start = i;
            let mut s = String::new();
            while i < b.len() && !b[i].is_ascii_whitespace() && b[i] != b'(' && b[i] != b')' {
                if b[i] == b'"' {
                    i += 1;
                    loop {
                        if i >= b.len() {
                            return err(start, "unterminated string");
                        }
                        match b[i] {
                            b'"' => break,
                            b'\\' if i + 1 < b.len() => {
                                s.push(text[i + 1..].chars().next().unwrap());
                                i += 1 + text[i + 1..].chars().next().unwrap().len_utf8();
                                continue;
                            }
                            _ => {
                                let ch = text[i..].chars().next().unwrap();
                                s.push(ch);
                                i += ch.len_utf8();
                                continue;
                            }
                        }
                    }
                    i += 1;
                } else {
                    let ch = text[i..].chars().next().unwrap();
                    s.push(ch);
                    i += ch.len_utf8();
                }
            }
            out.push((start, Tok::Atom(s)));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    defs: Vec<Feature>,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self, KirError> {
        Ok(Parser { toks: lex(text)?, i: 0, end: text.len(), defs: vec![], _src: text })
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.0)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn next(&mut self) -> Result<(usize, Tok), KirError> {
        let t = self.toks.get(self.i).cloned();
        self.i += 1;
        t.ok_or(KirError { pos: self.end, msg: "unexpected end of input".into() })
    }

    fn open(&mut self) -> Result<(), KirError> {
        match self.next()? {
            (_, Tok::Open) => Ok(()),
            (p, _) => err(p, "expected `(`"),
        }
    }

    fn close(&mut self) -> Result<(), KirError> {
        match self.next()? {
            (_, Tok::Close) => Ok(()),
            (p, _) => err(p, "expected `)`"),
        }
    }

    fn atom(&mut self) -> Result<(usize, String), KirError> {
        match self.next()? {
            (p, Tok::Atom(s)) => Ok((p, s)),
            (p, _) => err(p, "expected an atom"),
        }
    }

    fn rational(&mut self) -> Result<Rational, KirError> {
        let (p, s) = self.atom()?;
        s.parse().or_else(|_| err(p, format!("bad rational `{s}`")))
    }

    fn index(&mut self) -> Result<(usize, usize), KirError> {
        let (p, s) = self.atom()?;
        s.parse().map(|i| (p, i)).or_else(|_| err(p, format!("bad index `{s}`")))
    }

    fn args_until_close(&mut self) -> Result<Vec<Feature>, KirError> {
        let mut xs = Vec::new();
        while self.peek() != Some(&Tok::Close) {
            xs.push(self.expr()?);
        }
        self.close()?;
        Ok(xs)
    }

    fn expr(&mut self) -> Result<Feature, KirError> {
        let start = self.pos();
        self.open()?;
        let (p, head) = self.atom()?;
        let unary = |xs: Vec<Feature>, p: usize, head: &str| -> Result<Feature, KirError> {
            if xs.len() != 1 {
                return err(p, format!("`{head}` takes 1 argument, got {}", xs.len()));
            }
            Ok(xs.into_iter().next().unwrap())
        };
        let f = match head.as_str() {
            "prop" => {
                let (q, i) = self.index()?;
                if i == 0 {
                    return err(q, "props are numbered from 1");
                }
                self.close()?;
                Feature::prop(i)
            }
            "val" => {
                self.close()?;
                Feature::val()
            }
            "const" => {
                let q = self.rational()?;
                self.close()?;
                Feature::constant(q)
            }
            "ref" => {
                let (q, i) = self.index()?;
                self.close()?;
                match self.defs.get(i) {
                    Some(d) => d.clone(),
                    None => return err(q, format!("undefined ref {i}")),
                }
            }
            "affine" => {
                self.open()?;
                let mut coefs = Vec::new();
                while self.peek() != Some(&Tok::Close) {
                    coefs.push(self.rational()?);
                }
                self.close()?;
                let bias = self.rational()?;
                let xs = self.args_until_close()?;
                if xs.len() != coefs.len() {
                    return err(p, format!("affine has {} coefficients but {} arguments", coefs.len(), xs.len()));
                }
                Feature::affine(coefs, bias, xs)
            }
            "ifpos" => {
                let xs = self.args_until_close()?;
                if xs.len() != 3 {
                    return err(p, format!("`ifpos` takes 3 arguments, got {}", xs.len()));
                }
                Feature::apply(Primitive::IfPos, xs)
            }
            "relu" | "heaviside" | "square" | "triwave" | "sigmoid" => {
                let x = unary(self.args_until_close()?, p, &head)?;
                let prim = match head.as_str() {
                    "relu" => Primitive::Relu,
                    "heaviside" => Primitive::Heaviside,
                    "square" => Primitive::Square,
                    "triwave" => Primitive::TriWave,
                    _ => Primitive::Sigmoid,
                };
                Feature::apply(prim, vec![x])
            }
            "localmax" => unary(self.args_until_close()?, p, &head)?.local_max(),
            "localsum" => unary(self.args_until_close()?, p, &head)?.local_sum(),
            "globalsum" => unary(self.args_until_close()?, p, &head)?.global_sum(),
            _ => return err(p, format!("unknown node `{head}`")),
        };
        let _ = start;
        Ok(f)
    }

    fn defs_block(&mut self) -> Result<(), KirError> {
        // caller has seen `(` `defs`
        while self.peek() != Some(&Tok::Close) {
            let d = self.expr()?;
            self.defs.push(d);
        }
        self.close()
    }

    fn finish(&self) -> Result<(), KirError> {
        if self.i < self.toks.len() {
            return err(self.pos(), "trailing input");
        }
        Ok(())
    }

    fn is_defs_next(&self) -> bool {
        matches!(
            (self.toks.get(self.i).map(|t| &t.1), self.toks.get(self.i + 1).map(|t| &t.1)),
            (Some(Tok::Open), Some(Tok::Atom(a))) if a == "defs"
        )
    }

    fn maybe_defs(&mut self) -> Result<(), KirError> {
        if self.is_defs_next() {
            self.i += 2;
            self.defs_block()?;
        }
        Ok(())
    }
}

/// Parses a bare expression, optionally preceded by a `(defs ...)` block.
pub fn parse_feature(text: &str) -> Result<Feature, KirError> {
    let mut p = Parser::new(text)?;
    p.maybe_defs()?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses a `(classifier policy="..." mode=... [meta="..."] [(defs ...)] expr)` model.
pub fn parse_model(text: &str) -> Result<GnnClassifier, KirError> {
    let mut p = Parser::new(text)?;
    p.open()?;
    let (hp, head) = p.atom()?;
    if head != "classifier" {
        return err(hp, "expected `classifier`");
    }
    let (mut policy, mut mode, mut meta) = (None, None, String::new());
    while let Some(Tok::Atom(_)) = p.peek() {
        let (ap, a) = p.atom()?;
        let Some((k, v)) = a.split_once('=') else {
            return err(ap, format!("expected key=value, got `{a}`"));
        };
        match k {
            "policy" => policy = Some(v.parse::<Policy>().or_else(|e| err(ap, e.to_string()))?),
            "mode" => {
                mode = Some(match v {
                    "exact" => Mode::Exact,
                    "float" => Mode::Float,
                    _ => return err(ap, format!("unknown mode `{v}`")),
                })
            }
            "meta" => meta = v.to_string(),
            _ => return err(ap, format!("unknown attribute `{k}`")),
        }
    }
    let policy = policy.ok_or(KirError { pos: hp, msg: "missing policy".into() })?;
    let mode = mode.ok_or(KirError { pos: hp, msg: "missing mode".into() })?;
    p.maybe_defs()?;
    let ep = p.pos();
    let expr = p.expr()?;
    p.close()?;
    p.finish()?;
    let c = GnnClassifier::new(expr, policy, mode).or_else(|e| err(ep, e.to_string()))?;
    Ok(c.with_meta(meta))
}

struct Writer {
    defs: HashMap<*const FeatureExpr, usize>,
    out: String,
}

fn is_atomic(f: &Feature) -> bool {
    match &**f {
        FeatureExpr::Prop(_) | FeatureExpr::Val => true,
        FeatureExpr::Apply(Primitive::Const(_), _) => true,
        _ => false,
    }
}

impl Writer {
    fn node(&mut self, f: &Feature, top: bool) {
        if !top {
            if let Some(i) = self.defs.get(&f.key()) {
                self.out.push_str(&format!("(ref {i})"));
                return;
            }
        }
        match &**f {
            FeatureExpr::Prop(i) => self.out.push_str(&format!("(prop {i})")),
            FeatureExpr::Val => self.out.push_str("(val)"),
            FeatureExpr::Apply(Primitive::Const(q), _) => self.out.push_str(&format!("(const {q})")),
            FeatureExpr::Apply(Primitive::Affine { coefs, bias }, xs) => {
                let cs: Vec<String> = coefs.iter().map(|c| c.to_string()).collect();
                self.out.push_str(&format!("(affine ({}) {bias}", cs.join(" ")));
                for x in xs {
                    self.out.push(' ');
                    self.node(x, false);
                }
                self.out.push(')');
            }
            FeatureExpr::Apply(p, xs) => {
                self.out.push('(');
                self.out.push_str(p.name());
                for x in xs {
                    self.out.push(' ');
                    self.node(x, false);
                }
                self.out.push(')');
            }
            FeatureExpr::LocalMax(x) | FeatureExpr::LocalSum(x) | FeatureExpr::GlobalSum(x) => {
                let name = match &**f {
                    FeatureExpr::LocalMax(_) => "localmax",
                    FeatureExpr::LocalSum(_) => "localsum",
                    _ => "globalsum",
                };
                self.out.push_str(&format!("({name} "));
                self.node(x, false);
                self.out.push(')');
            }
        }
    }
}

/// Writes the defs block (if any) followed by the expression.
fn write_body(e: &Feature) -> String {
    let order = e.post_order();
    let mut refs: HashMap<*const FeatureExpr, usize> = HashMap::new();
    for n in &order {
        for c in n.children() {
            *refs.entry(c.key()).or_default() += 1;
        }
    }
    let shared: Vec<&Feature> = order
        .iter()
        .filter(|n| !is_atomic(n) && refs.get(&n.key()).copied().unwrap_or(0) >= 2)
        .collect();
    let mut w = Writer { defs: HashMap::new(), out: String::new() };
    if !shared.is_empty() {
        w.out.push_str("(defs");
        for (i, d) in shared.iter().enumerate() {
            w.out.push_str("\n  ");
            w.node(d, true);
            w.defs.insert(d.key(), i);
        }
        w.out.push_str(")\n");
    }
    w.node(e, false);
    w.out
}

pub fn write_feature(e: &Feature) -> String {
    write_body(e)
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

pub fn write_model(c: &GnnClassifier) -> String {
    let mode = match c.mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    };
    let mut s = format!("(classifier policy={} mode={mode}", quote(c.policy.band()));
    if !c.meta.is_empty() {
        s.push_str(&format!(" meta={}", quote(&c.meta)));
    }
    s.push('\n');
    s.push_str(&write_body(&c.expr));
    s.push_str(")\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_max_classifier() {
        let c = parse_model("(classifier policy=\">=1/<=0\" mode=exact (localmax (prop 1)))").unwrap();
        assert_eq!(c.policy, Policy::OneZero);
        assert_eq!(c.mode, Mode::Exact);
        assert!(matches!(&*c.expr, FeatureExpr::LocalMax(x) if matches!(**x, FeatureExpr::Prop(1))));
    }

    #[test]
    fn rejects_sigmoid_in_exact() {
        let e = parse_model("(classifier policy=\">0/<=0\" mode=exact (sigmoid (val)))").unwrap_err();
        assert!(e.msg.contains("sigmoid"), "{e}");
    }

    #[test]
    fn reports_positions() {
        let text = "(classifier policy=\">0/<=0\" mode=exact (relu (val) (val)))";
        let e = parse_model(text).unwrap_err();
        assert_eq!(e.pos, text.find("relu").unwrap());
        let e = parse_feature("(affine (1 2) 0 (val))").unwrap_err();
        assert!(e.msg.contains("coefficients"));
        assert!(parse_feature("(bogus)").is_err());
        assert!(parse_feature("(val) (val)").is_err());
    }

    #[test]
    fn shared_nodes_round_trip() {
        let x = Feature::val().local_max();
        let e = Feature::min(&x, &x.square()).clip01();
        let c = GnnClassifier::new(e, Policy::PosNonpos, Mode::Exact).unwrap().with_meta("a \"quoted\" note");
        let text = write_model(&c);
        assert!(text.contains("(defs"));
        let back = parse_model(&text).unwrap();
        assert_eq!(back.meta, c.meta);
        assert_eq!(write_model(&back), text);
        assert_eq!(back.expr.dag_size(), c.expr.dag_size());
    }

    #[test]
    fn decimal_literals() {
        let f = parse_feature("(const 0.125)").unwrap();
        assert_eq!(write_feature(&f), "(const 1/8)");
    }
}
