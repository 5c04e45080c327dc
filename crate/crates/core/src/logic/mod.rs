//! Modal, graded modal and dynamic logics over pointed graphs: syntax,
//! concrete grammar, model checking and normalization.

mod check;
mod normalize;
mod parse;
mod sample;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use check::{modelcheck_gml, modelcheck_lddl, program_relation, sat_gml, sat_lddl};
pub use normalize::{is_normal_lddl, normalize_lddl, program_sequences, seq_program, Atom};
pub use parse::{parse_formula, parse_gml, parse_lddl, parse_ml, Formula, Logic, ParseError};
pub use sample::{random_gml, random_lddl, random_ml, random_wgml_modal, random_wgml_top};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("prop {index} out of range for {props} props")]
    PropOutOfRange { index: usize, props: usize },
}

/// Graded modal logic; the modal fragment uses grade 1 only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GmlFormula {
    Top,
    Prop(usize),
    Not(Box<GmlFormula>),
    And(Box<GmlFormula>, Box<GmlFormula>),
    Or(Box<GmlFormula>, Box<GmlFormula>),
    /// At least `k >= 1` neighbors satisfy the argument.
    DiamondGeq(usize, Box<GmlFormula>),
}

impl GmlFormula {
    pub fn bot() -> Self {
        GmlFormula::Not(Box::new(GmlFormula::Top))
    }

    pub fn prop(i: usize) -> Self {
        GmlFormula::Prop(i)
    }

    pub fn not(self) -> Self {
        GmlFormula::Not(Box::new(self))
    }

    pub fn and(self, o: GmlFormula) -> Self {
        GmlFormula::And(Box::new(self), Box::new(o))
    }

    pub fn or(self, o: GmlFormula) -> Self {
        GmlFormula::Or(Box::new(self), Box::new(o))
    }

    pub fn diamond_geq(k: usize, f: GmlFormula) -> Self {
        assert!(k >= 1, "grade must be at least 1");
        GmlFormula::DiamondGeq(k, Box::new(f))
    }

    pub fn diamond(f: GmlFormula) -> Self {
        GmlFormula::diamond_geq(1, f)
    }

    /// `¬◇¬φ`.
    pub fn box_(f: GmlFormula) -> Self {
        GmlFormula::diamond(f.not()).not()
    }

    /// `◇≥k φ ∧ ¬◇≥k+1 φ`.
    pub fn diamond_eq(k: usize, f: GmlFormula) -> Self {
        let upper = GmlFormula::diamond_geq(k + 1, f.clone()).not();
        if k == 0 {
            upper
        } else {
            GmlFormula::diamond_geq(k, f).and(upper)
        }
    }

    /// `¬◇≥k+1 φ`.
    pub fn diamond_leq(k: usize, f: GmlFormula) -> Self {
        GmlFormula::diamond_geq(k + 1, f).not()
    }

    pub fn is_ml(&self) -> bool {
        match self {
            GmlFormula::Top | GmlFormula::Prop(_) => true,
            GmlFormula::Not(a) => a.is_ml(),
            GmlFormula::And(a, b) | GmlFormula::Or(a, b) => a.is_ml() && b.is_ml(),
            GmlFormula::DiamondGeq(k, a) => *k == 1 && a.is_ml(),
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            GmlFormula::Top | GmlFormula::Prop(_) => 0,
            GmlFormula::Not(a) => a.modal_depth(),
            GmlFormula::And(a, b) | GmlFormula::Or(a, b) => a.modal_depth().max(b.modal_depth()),
            GmlFormula::DiamondGeq(_, a) => 1 + a.modal_depth(),
        }
    }

    pub fn max_prop(&self) -> usize {
        match self {
            GmlFormula::Top => 0,
            GmlFormula::Prop(i) => *i,
            GmlFormula::Not(a) | GmlFormula::DiamondGeq(_, a) => a.max_prop(),
            GmlFormula::And(a, b) | GmlFormula::Or(a, b) => a.max_prop().max(b.max_prop()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            GmlFormula::Top | GmlFormula::Prop(_) => 1,
            GmlFormula::Not(a) | GmlFormula::DiamondGeq(_, a) => 1 + a.size(),
            GmlFormula::And(a, b) | GmlFormula::Or(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// Formulas of the dynamic logic with a unique-successor modality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LddlFormula {
    Top,
    Prop(usize),
    Not(Box<LddlFormula>),
    And(Box<LddlFormula>, Box<LddlFormula>),
    Or(Box<LddlFormula>, Box<LddlFormula>),
    Diamond(Box<LddlProgram>, Box<LddlFormula>),
    Box(Box<LddlProgram>, Box<LddlFormula>),
    /// Exactly one program successor satisfies the argument.
    Unique(Box<LddlProgram>, Box<LddlFormula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LddlProgram {
    Step,
    Test(Box<LddlFormula>),
    Seq(Box<LddlProgram>, Box<LddlProgram>),
    Union(Box<LddlProgram>, Box<LddlProgram>),
}

impl LddlProgram {
    pub fn stay() -> Self {
        LddlProgram::Test(Box::new(LddlFormula::Top))
    }

    pub fn test(f: LddlFormula) -> Self {
        LddlProgram::Test(Box::new(f))
    }

    pub fn seq(self, o: LddlProgram) -> Self {
        LddlProgram::Seq(Box::new(self), Box::new(o))
    }

    pub fn union(self, o: LddlProgram) -> Self {
        LddlProgram::Union(Box::new(self), Box::new(o))
    }

    /// Number of step and test atoms.
    pub fn len(&self) -> usize {
        match self {
            LddlProgram::Step | LddlProgram::Test(_) => 1,
            LddlProgram::Seq(a, b) | LddlProgram::Union(a, b) => a.len() + b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl LddlFormula {
    pub fn bot() -> Self {
        LddlFormula::Not(Box::new(LddlFormula::Top))
    }

    pub fn not(self) -> Self {
        LddlFormula::Not(Box::new(self))
    }

    pub fn and(self, o: LddlFormula) -> Self {
        LddlFormula::And(Box::new(self), Box::new(o))
    }

    pub fn or(self, o: LddlFormula) -> Self {
        LddlFormula::Or(Box::new(self), Box::new(o))
    }

    pub fn diamond(p: LddlProgram, f: LddlFormula) -> Self {
        LddlFormula::Diamond(Box::new(p), Box::new(f))
    }

    pub fn box_(p: LddlProgram, f: LddlFormula) -> Self {
        LddlFormula::Box(Box::new(p), Box::new(f))
    }

    pub fn unique(p: LddlProgram, f: LddlFormula) -> Self {
        LddlFormula::Unique(Box::new(p), Box::new(f))
    }

    pub fn max_prop(&self) -> usize {
        match self {
            LddlFormula::Top => 0,
            LddlFormula::Prop(i) => *i,
            LddlFormula::Not(a) => a.max_prop(),
            LddlFormula::And(a, b) | LddlFormula::Or(a, b) => a.max_prop().max(b.max_prop()),
            LddlFormula::Diamond(p, a) | LddlFormula::Box(p, a) | LddlFormula::Unique(p, a) => {
                program_max_prop(p).max(a.max_prop())
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            LddlFormula::Top | LddlFormula::Prop(_) => 0,
            LddlFormula::Not(a) => 1 + a.depth(),
            LddlFormula::And(a, b) | LddlFormula::Or(a, b) => 1 + a.depth().max(b.depth()),
            LddlFormula::Diamond(p, a) | LddlFormula::Box(p, a) | LddlFormula::Unique(p, a) => {
                1 + a.depth().max(program_depth(p))
            }
        }
    }
}

fn program_max_prop(p: &LddlProgram) -> usize {
    match p {
        LddlProgram::Step => 0,
        LddlProgram::Test(f) => f.max_prop(),
        LddlProgram::Seq(a, b) | LddlProgram::Union(a, b) => program_max_prop(a).max(program_max_prop(b)),
    }
}

fn program_depth(p: &LddlProgram) -> usize {
    match p {
        LddlProgram::Step => 0,
        LddlProgram::Test(f) => f.depth(),
        LddlProgram::Seq(a, b) | LddlProgram::Union(a, b) => program_depth(a).max(program_depth(b)),
    }
}

/// Standard GML formulas embed into the dynamic logic when all grades are 1.
pub fn ml_to_lddl(f: &GmlFormula) -> Option<LddlFormula> {
    Some(match f {
        GmlFormula::Top => LddlFormula::Top,
        GmlFormula::Prop(i) => LddlFormula::Prop(*i),
        GmlFormula::Not(a) => ml_to_lddl(a)?.not(),
        GmlFormula::And(a, b) => ml_to_lddl(a)?.and(ml_to_lddl(b)?),
        GmlFormula::Or(a, b) => ml_to_lddl(a)?.or(ml_to_lddl(b)?),
        GmlFormula::DiamondGeq(1, a) => LddlFormula::diamond(LddlProgram::Step, ml_to_lddl(a)?),
        GmlFormula::DiamondGeq(..) => return None,
    })
}

/// Which weakly graded fragment a formula belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum WgmlMembership {
    InWgmlTop,
    InWgmlModal,
    /// Smallest offending subterm found.
    NotWgml { witness: String },
}

fn find_bad(f: &GmlFormula, modal: bool) -> Option<&GmlFormula> {
    if f.is_ml() {
        return None;
    }
    match f {
        GmlFormula::And(a, b) | GmlFormula::Or(a, b) => find_bad(a, modal).or_else(|| find_bad(b, modal)),
        GmlFormula::DiamondGeq(1, a) => find_bad(a, modal),
        GmlFormula::DiamondGeq(2, a) if **a == GmlFormula::Top => None,
        GmlFormula::DiamondGeq(2, a) if modal && a.is_ml() => None,
        _ => Some(f),
    }
}

/// Syntactic membership in the weakly graded fragments.
pub fn wgml_membership(f: &GmlFormula) -> WgmlMembership {
    if find_bad(f, false).is_none() {
        WgmlMembership::InWgmlTop
    } else {
        match find_bad(f, true) {
            None => WgmlMembership::InWgmlModal,
            Some(w) => WgmlMembership::NotWgml { witness: w.to_string() },
        }
    }
}

impl fmt::Display for GmlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::print_gml(self))
    }
}

impl fmt::Display for LddlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::print_lddl(self))
    }
}

impl fmt::Display for LddlProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&parse::print_program(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        let top2 = GmlFormula::diamond_geq(2, GmlFormula::Top);
        assert_eq!(wgml_membership(&top2), WgmlMembership::InWgmlTop);
        let p2 = GmlFormula::diamond_geq(2, GmlFormula::Prop(1));
        assert_eq!(wgml_membership(&p2), WgmlMembership::InWgmlModal);
        let neg = top2.clone().not();
        assert_eq!(wgml_membership(&neg), WgmlMembership::NotWgml { witness: neg.to_string() });
        let nested = GmlFormula::diamond(GmlFormula::Prop(1).and(top2.clone()));
        assert_eq!(wgml_membership(&nested), WgmlMembership::InWgmlTop);
        let bad = GmlFormula::diamond_geq(2, top2.clone());
        assert!(matches!(wgml_membership(&bad), WgmlMembership::NotWgml { .. }));
        let three = GmlFormula::diamond_geq(3, GmlFormula::Top);
        assert!(matches!(wgml_membership(&three), WgmlMembership::NotWgml { .. }));
    }

    #[test]
    fn depths() {
        let f = GmlFormula::diamond(GmlFormula::box_(GmlFormula::Prop(2)));
        assert_eq!(f.modal_depth(), 2);
        assert_eq!(f.max_prop(), 2);
        assert!(f.is_ml());
        assert!(!GmlFormula::diamond_eq(1, GmlFormula::Top).is_ml());
    }
}
