//! Combination functions: primitives, function trees, macros, and the
//! piecewise-linear to ReLU/Heaviside compiler.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::rational::Rational;

/// Evaluation mode.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

/// A tagged scalar value.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64(),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float(x) => write!(f, "{x:e}"),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::Exact(q)
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(q) => s.serialize_str(&q.to_string()),
            Scalar::Float(x) => s.serialize_f64(*x),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("sigmoid cannot be evaluated exactly")]
    SigmoidInExact,
    #[error("arity mismatch: expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("argument mode does not match evaluation mode")]
    ModeMismatch,
    #[error("unknown macro `{0}`")]
    UnknownMacro(String),
    #[error("invalid piecewise specification: {0}")]
    Piecewise(String),
}

/// A primitive combination function.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Primitive {
    Const(Rational),
    /// `Σ coefs[i]·x_i + bias`; arity is the number of coefficients.
    Affine { coefs: Vec<Rational>, bias: Rational },
    IfPos,
    Relu,
    Heaviside,
    Square,
    /// `|(x mod 2) - 1|`: 1 on even integers, 0 on odd ones.
    TriWave,
    Sigmoid,
}

impl Primitive {
    pub fn arity(&self) -> usize {
        match self {
            Primitive::Const(_) => 0,
            Primitive::Affine { coefs, .. } => coefs.len(),
            Primitive::IfPos => 3,
            _ => 1,
        }
    }

    pub fn is_exact_capable(&self) -> bool {
        !matches!(self, Primitive::Sigmoid)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Primitive::Const(_) => "const",
            Primitive::Affine { .. } => "affine",
            Primitive::IfPos => "ifpos",
            Primitive::Relu => "relu",
            Primitive::Heaviside => "heaviside",
            Primitive::Square => "square",
            Primitive::TriWave => "triwave",
            Primitive::Sigmoid => "sigmoid",
        }
    }

    pub(crate) fn apply<T: Num>(&self, args: &[&T]) -> T {
        match self {
            Primitive::Const(q) => T::from_rational(q),
            Primitive::Affine { coefs, bias } => {
                let mut acc = T::from_rational(bias);
                for (c, x) in coefs.iter().zip(args) {
                    acc = acc.add(&x.scale(c));
                }
                acc
            }
            Primitive::IfPos => {
                if args[0].is_pos() {
                    args[1].clone()
                } else {
                    args[2].clone()
                }
            }
            Primitive::Relu => {
                if args[0].is_pos() {
                    args[0].clone()
                } else {
                    T::zero()
                }
            }
            Primitive::Heaviside => {
                if args[0].is_neg() {
                    T::zero()
                } else {
                    T::one()
                }
            }
            Primitive::Square => args[0].mul(args[0]),
            Primitive::TriWave => args[0].triwave(),
            Primitive::Sigmoid => args[0].sigmoid(),
        }
    }
}

/// Numeric carrier used by the evaluators.
pub(crate) trait Num: Clone + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn max(a: &Self, b: &Self) -> Self;
    fn triwave(&self) -> Self;
    /// Only called in float mode; exact plans reject sigmoid up front.
    fn sigmoid(&self) -> Self;
}

impl Num for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn max(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
    fn triwave(&self) -> Self {
        let two = Rational::from(2);
        let m = self - &(&two * &(self / &two).floor());
        (m - Rational::one()).abs()
    }
    fn sigmoid(&self) -> Self {
        unreachable!("sigmoid in exact evaluation")
    }
}

impl Num for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(q: &Rational) -> Self {
        q.to_f64()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c.to_f64()
    }
    fn is_pos(&self) -> bool {
        *self > 0.0
    }
    fn is_neg(&self) -> bool {
        *self < 0.0
    }
    fn max(a: &Self, b: &Self) -> Self {
        a.max(*b)
    }
    fn triwave(&self) -> Self {
        (self.rem_euclid(2.0) - 1.0).abs()
    }
    fn sigmoid(&self) -> Self {
        1.0 / (1.0 + (-self).exp())
    }
}

/// A combination-function tree over numbered arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ScalarFn {
    Arg(usize),
    Op(Primitive, Vec<Arc<ScalarFn>>),
}

impl ScalarFn {
    pub fn arg(i: usize) -> Self {
        ScalarFn::Arg(i)
    }

    pub fn constant(q: impl Into<Rational>) -> Self {
        ScalarFn::Op(Primitive::Const(q.into()), vec![])
    }

    pub fn op(p: Primitive, args: Vec<ScalarFn>) -> Self {
        assert_eq!(p.arity(), args.len(), "arity of {}", p.name());
        ScalarFn::Op(p, args.into_iter().map(Arc::new).collect())
    }

    pub fn affine(coefs: Vec<Rational>, bias: Rational, args: Vec<ScalarFn>) -> Self {
        ScalarFn::op(Primitive::Affine { coefs, bias }, args)
    }

    pub fn relu(self) -> Self {
        ScalarFn::op(Primitive::Relu, vec![self])
    }

    pub fn heaviside(self) -> Self {
        ScalarFn::op(Primitive::Heaviside, vec![self])
    }

    pub fn square(self) -> Self {
        ScalarFn::op(Primitive::Square, vec![self])
    }

    pub fn triwave(self) -> Self {
        ScalarFn::op(Primitive::TriWave, vec![self])
    }

    pub fn sigmoid(self) -> Self {
        ScalarFn::op(Primitive::Sigmoid, vec![self])
    }

    pub fn if_pos(c: ScalarFn, a: ScalarFn, b: ScalarFn) -> Self {
        ScalarFn::op(Primitive::IfPos, vec![c, a, b])
    }

    /// `c·self + b`.
    pub fn scaled(self, c: impl Into<Rational>, b: impl Into<Rational>) -> Self {
        ScalarFn::affine(vec![c.into()], b.into(), vec![self])
    }

    pub fn plus(self, o: ScalarFn) -> Self {
        ScalarFn::affine(vec![Rational::one(), Rational::one()], Rational::zero(), vec![self, o])
    }

    pub fn minus(self, o: ScalarFn) -> Self {
        ScalarFn::affine(vec![Rational::one(), -Rational::one()], Rational::zero(), vec![self, o])
    }

    pub fn negate(self) -> Self {
        self.scaled(-1, 0)
    }

    /// Number of inputs: one more than the largest argument index used.
    pub fn arity(&self) -> usize {
        match self {
            ScalarFn::Arg(i) => i + 1,
            ScalarFn::Op(_, xs) => xs.iter().map(|x| x.arity()).max().unwrap_or(0),
        }
    }

    pub fn is_exact_capable(&self) -> bool {
        match self {
            ScalarFn::Arg(_) => true,
            ScalarFn::Op(p, xs) => p.is_exact_capable() && xs.iter().all(|x| x.is_exact_capable()),
        }
    }

    /// Calls `f` on every primitive in the tree.
    pub fn visit_primitives(&self, f: &mut impl FnMut(&Primitive)) {
        if let ScalarFn::Op(p, xs) = self {
            f(p);
            for x in xs {
                x.visit_primitives(f);
            }
        }
    }

    pub(crate) fn eval_num<T: Num>(&self, args: &[T]) -> T {
        match self {
            ScalarFn::Arg(i) => args[*i].clone(),
            ScalarFn::Op(p, xs) => {
                let vals: Vec<T> = xs.iter().map(|x| x.eval_num(args)).collect();
                let refs: Vec<&T> = vals.iter().collect();
                p.apply(&refs)
            }
        }
    }

    /// Exact evaluation; sigmoid is an error.
    pub fn eval_exact(&self, args: &[Rational]) -> Result<Rational, ScalarError> {
        if args.len() < self.arity() {
            return Err(ScalarError::Arity { expected: self.arity(), got: args.len() });
        }
        if !self.is_exact_capable() {
            return Err(ScalarError::SigmoidInExact);
        }
        Ok(self.eval_num(args))
    }

    pub fn eval_float(&self, args: &[f64]) -> Result<f64, ScalarError> {
        if args.len() < self.arity() {
            return Err(ScalarError::Arity { expected: self.arity(), got: args.len() });
        }
        Ok(self.eval_num(args))
    }
}

/// Evaluates `f` on tagged scalars in the given mode.
pub fn eval_scalar_fn(f: &ScalarFn, args: &[Scalar], mode: Mode) -> Result<Scalar, ScalarError> {
    match mode {
        Mode::Exact => {
            let xs = args
                .iter()
                .map(|a| a.as_exact().cloned().ok_or(ScalarError::ModeMismatch))
                .collect::<Result<Vec<_>, _>>()?;
            f.eval_exact(&xs).map(Scalar::Exact)
        }
        Mode::Float => {
            let xs = args
                .iter()
                .map(|a| match a {
                    Scalar::Float(x) => Ok(*x),
                    Scalar::Exact(_) => Err(ScalarError::ModeMismatch),
                })
                .collect::<Result<Vec<_>, _>>()?;
            f.eval_float(&xs).map(Scalar::Float)
        }
    }
}

/// Named macro expansions.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Macro {
    Min,
    Max,
    Abs,
    IfZero,
    Clip01,
}

impl Macro {
    pub fn from_name(name: &str) -> Result<Self, ScalarError> {
        Ok(match name {
            "min" => Macro::Min,
            "max" => Macro::Max,
            "abs" => Macro::Abs,
            "ifZero" | "ifzero" => Macro::IfZero,
            "clip01" => Macro::Clip01,
            _ => return Err(ScalarError::UnknownMacro(name.to_string())),
        })
    }

    pub fn input_count(self) -> usize {
        match self {
            Macro::Min | Macro::Max => 2,
            Macro::Abs | Macro::Clip01 => 1,
            Macro::IfZero => 3,
        }
    }
}

/// Expands a macro over the given input trees.
pub fn build_macro(m: Macro, inputs: Vec<ScalarFn>) -> Result<ScalarFn, ScalarError> {
    if inputs.len() != m.input_count() {
        return Err(ScalarError::Arity { expected: m.input_count(), got: inputs.len() });
    }
    let mut it = inputs.into_iter();
    let mut next = || it.next().unwrap();
    Ok(match m {
        Macro::Min => {
            let (x, y) = (next(), next());
            x.clone().minus(x.minus(y).relu())
        }
        Macro::Max => {
            let (x, y) = (next(), next());
            build_macro(Macro::Min, vec![x.negate(), y.negate()])?.negate()
        }
        Macro::Abs => {
            let x = next();
            x.clone().relu().plus(x.negate().relu())
        }
        Macro::IfZero => {
            let (x, a, b) = (next(), next(), next());
            ScalarFn::if_pos(build_macro(Macro::Abs, vec![x])?, b, a)
        }
        Macro::Clip01 => {
            let x = next();
            x.clone().relu().minus(x.scaled(1, -1).relu())
        }
    })
}

/// One side of an interval endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Unbounded,
    Open(Rational),
    Closed(Rational),
}

/// An interval piece `lo .. hi` carrying `slope·x + intercept`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub lo: Bound,
    pub hi: Bound,
    pub slope: Rational,
    pub intercept: Rational,
}

impl Piece {
    pub fn new(lo: Bound, hi: Bound, slope: impl Into<Rational>, intercept: impl Into<Rational>) -> Self {
        Piece { lo, hi, slope: slope.into(), intercept: intercept.into() }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let lo_ok = match &self.lo {
            Bound::Unbounded => true,
            Bound::Open(a) => x > a,
            Bound::Closed(a) => x >= a,
        };
        let hi_ok = match &self.hi {
            Bound::Unbounded => true,
            Bound::Open(b) => x < b,
            Bound::Closed(b) => x <= b,
        };
        lo_ok && hi_ok
    }

    pub fn value(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }
}

/// Direct evaluation of a piecewise specification.
pub fn eval_piecewise(pieces: &[Piece], x: &Rational) -> Option<Rational> {
    pieces.iter().find(|p| p.contains(x)).map(|p| p.value(x))
}

fn check_partition(pieces: &[Piece]) -> Result<(), ScalarError> {
    let bad = |m: &str| Err(ScalarError::Piecewise(m.to_string()));
    if pieces.is_empty() {
        return bad("no pieces");
    }
    if pieces[0].lo != Bound::Unbounded {
        return bad("first piece must start at -infinity");
    }
    if pieces[pieces.len() - 1].hi != Bound::Unbounded {
        return bad("last piece must end at +infinity");
    }
    for w in pieces.windows(2) {
        let ok = match (&w[0].hi, &w[1].lo) {
            (Bound::Open(a), Bound::Closed(b)) | (Bound::Closed(a), Bound::Open(b)) => a == b,
            (Bound::Closed(_), Bound::Closed(_)) => return bad("overlapping intervals"),
            (Bound::Open(_), Bound::Open(_)) => return bad("gap between intervals"),
            _ => false,
        };
        if !ok {
            return bad("adjacent intervals do not meet");
        }
    }
    for p in pieces {
        if let (Bound::Closed(a) | Bound::Open(a), Bound::Closed(b) | Bound::Open(b)) = (&p.lo, &p.hi) {
            let degenerate_ok = a == b && matches!((&p.lo, &p.hi), (Bound::Closed(_), Bound::Closed(_)));
            if a > b || (a == b && !degenerate_ok) {
                return bad("empty interval");
            }
        }
    }
    Ok(())
}

/// Compiles a unary piecewise-affine function into a tree built from
/// Affine, ReLU and Heaviside only.
///
/// Each piece contributes its affine map evaluated on `x` clamped into the
/// piece, and the clamped values of neighbouring pieces are cancelled with
/// Heaviside switches. Open/closed endpoints decide which side of a
/// breakpoint takes the shared value; `H(t) = 1` at `t = 0`, and
/// `1 - H(-t)` is the strict step.
pub fn compile_unary_piecewise_to_ffn(pieces: &[Piece]) -> Result<ScalarFn, ScalarError> {
    check_partition(pieces)?;
    let x = ScalarFn::arg(0);
    if pieces.len() == 1 {
        let p = &pieces[0];
        return Ok(x.scaled(p.slope.clone(), p.intercept.clone()));
    }
    // indicator that x lies at or right of the breakpoint `a`, honoring which
    // side owns `a`: [x >= a] if the right piece is closed at a, [x > a] otherwise
    let right_of = |a: &Rational, closed_right: bool| -> ScalarFn {
        if closed_right {
            ScalarFn::arg(0).scaled(1, -a).heaviside()
        } else {
            ScalarFn::arg(0).scaled(-1, a.clone()).heaviside().scaled(-1, 1)
        }
    };
    let mut terms: Vec<ScalarFn> = Vec::new();
    for p in pieces {
        let f = |arg: ScalarFn| arg.scaled(p.slope.clone(), p.intercept.clone());
        let lo = match &p.lo {
            Bound::Unbounded => None,
            Bound::Open(a) | Bound::Closed(a) => Some(a.clone()),
        };
        let hi = match &p.hi {
            Bound::Unbounded => None,
            Bound::Open(b) | Bound::Closed(b) => Some(b.clone()),
        };
        // clamp(x) into [lo, hi]
        let clamped = match (&lo, &hi) {
            (None, None) => x.clone(),
            (None, Some(b)) => x.clone().scaled(-1, b.clone()).relu().scaled(-1, b.clone()),
            (Some(a), None) => x.clone().scaled(1, -a).relu().scaled(1, a.clone()),
            (Some(a), Some(b)) => {
                let w = b - a;
                x.clone().scaled(1, -a).relu().scaled(-1, w).relu().scaled(-1, b.clone())
            }
        };
        let mut term = f(clamped);
        // subtract f(lo) where x is left of this piece, f(hi) where right of it
        if let Some(a) = &lo {
            let inside_from_a = right_of(a, matches!(p.lo, Bound::Closed(_)));
            let left = inside_from_a.scaled(-1, 1);
            let fa = p.value(a);
            term = ScalarFn::affine(vec![Rational::one(), -fa], Rational::zero(), vec![term, left]);
        }
        if let Some(b) = &hi {
            let right = right_of(b, matches!(p.hi, Bound::Open(_)));
            let fb = p.value(b);
            term = ScalarFn::affine(vec![Rational::one(), -fb], Rational::zero(), vec![term, right]);
        }
        terms.push(term);
    }
    let n = terms.len();
    Ok(ScalarFn::affine(vec![Rational::one(); n], Rational::zero(), terms))
}
