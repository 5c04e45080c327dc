//! Normal form: no box modalities, every modality has argument `top`, and
//! every program is a union of sequences of steps and tests ending in `stay`.

use super::{LddlFormula, LddlProgram};

/// One element of a normalized sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Step,
    Test(LddlFormula),
}

fn push_unique(out: &mut Vec<Vec<Atom>>, s: Vec<Atom>) {
    if !out.contains(&s) {
        out.push(s);
    }
}

/// Sequences (without the trailing `stay`) whose union is `p`, with tests
/// normalized and trivial tests dropped.
fn sequences(p: &LddlProgram) -> Vec<Vec<Atom>> {
    match p {
        LddlProgram::Step => vec![vec![Atom::Step]],
        LddlProgram::Test(f) => match normalize_lddl(f) {
            LddlFormula::Top => vec![vec![]],
            g => vec![vec![Atom::Test(g)]],
        },
        LddlProgram::Seq(a, b) => {
            let (sa, sb) = (sequences(a), sequences(b));
            let mut out = Vec::new();
            for x in &sa {
                for y in &sb {
                    push_unique(&mut out, x.iter().chain(y).cloned().collect());
                }
            }
            out
        }
        LddlProgram::Union(a, b) => {
            let mut out = sequences(a);
            for s in sequences(b) {
                push_unique(&mut out, s);
            }
            out
        }
    }
}

/// Builds the left-nested program `a1;...;an;stay`.
pub fn seq_program(atoms: &[Atom]) -> LddlProgram {
    let mut it = atoms.iter().map(|a| match a {
        Atom::Step => LddlProgram::Step,
        Atom::Test(f) => LddlProgram::test(f.clone()),
    });
    match it.next() {
        None => LddlProgram::stay(),
        Some(first) => it.fold(first, |p, a| p.seq(a)).seq(LddlProgram::stay()),
    }
}

fn union_program(seqs: &[Vec<Atom>]) -> LddlProgram {
    let mut it = seqs.iter().map(|s| seq_program(s));
    let first = it.next().expect("nonempty union");
    it.fold(first, |p, q| p.union(q))
}

/// Splits a normalized program back into its atom sequences.
pub fn program_sequences(p: &LddlProgram) -> Option<Vec<Vec<Atom>>> {
    fn seq_atoms(p: &LddlProgram, out: &mut Vec<Atom>) -> Option<()> {
        match p {
            LddlProgram::Step => out.push(Atom::Step),
            LddlProgram::Test(f) => out.push(Atom::Test((**f).clone())),
            LddlProgram::Seq(a, b) => {
                seq_atoms(a, out)?;
                seq_atoms(b, out)?;
            }
            LddlProgram::Union(..) => return None,
        }
        Some(())
    }
    let mut seqs = Vec::new();
    let mut stack = vec![p];
    let mut parts = Vec::new();
    while let Some(q) = stack.pop() {
        match q {
            LddlProgram::Union(a, b) => {
                stack.push(b);
                stack.push(a);
            }
            _ => parts.push(q),
        }
    }
    for q in parts {
        let mut atoms = Vec::new();
        seq_atoms(q, &mut atoms)?;
        if atoms.pop() != Some(Atom::Test(LddlFormula::Top)) {
            return None;
        }
        if atoms.contains(&Atom::Test(LddlFormula::Top)) {
            return None;
        }
        seqs.push(atoms);
    }
    Some(seqs)
}

pub fn normalize_lddl(f: &LddlFormula) -> LddlFormula {
    match f {
        LddlFormula::Top | LddlFormula::Prop(_) => f.clone(),
        LddlFormula::Not(a) => normalize_lddl(a).not(),
        LddlFormula::And(a, b) => normalize_lddl(a).and(normalize_lddl(b)),
        LddlFormula::Or(a, b) => normalize_lddl(a).or(normalize_lddl(b)),
        LddlFormula::Box(p, a) => normalize_lddl(&LddlFormula::diamond((**p).clone(), (**a).clone().not())).not(),
        LddlFormula::Diamond(p, a) | LddlFormula::Unique(p, a) => {
            let mut seqs = sequences(p);
            let body = normalize_lddl(a);
            if body != LddlFormula::Top {
                for s in &mut seqs {
                    s.push(Atom::Test(body.clone()));
                }
            }
            if matches!(f, LddlFormula::Unique(..)) {
                LddlFormula::unique(union_program(&seqs), LddlFormula::Top)
            } else {
                let mut it = seqs.iter().map(|s| LddlFormula::diamond(seq_program(s), LddlFormula::Top));
                let first = it.next().expect("nonempty union");
                it.fold(first, |x, y| x.or(y))
            }
        }
    }
}

pub fn is_normal_lddl(f: &LddlFormula) -> bool {
    let prog_ok = |p: &LddlProgram| {
        program_sequences(p).is_some_and(|seqs| {
            seqs.iter().flatten().all(|a| match a {
                Atom::Step => true,
                Atom::Test(t) => is_normal_lddl(t),
            })
        })
    };
    match f {
        LddlFormula::Top | LddlFormula::Prop(_) => true,
        LddlFormula::Not(a) => is_normal_lddl(a),
        LddlFormula::And(a, b) | LddlFormula::Or(a, b) => is_normal_lddl(a) && is_normal_lddl(b),
        LddlFormula::Box(..) => false,
        LddlFormula::Diamond(p, a) | LddlFormula::Unique(p, a) => **a == LddlFormula::Top && prog_ok(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate_pointed_graphs;
    use crate::logic::{modelcheck_lddl, parse_lddl};

    fn same_truth(a: &LddlFormula, b: &LddlFormula) {
        for pg in enumerate_pointed_graphs(3, 1, false).unwrap() {
            assert_eq!(modelcheck_lddl(&pg, a).unwrap(), modelcheck_lddl(&pg, b).unwrap(), "{a} vs {b}");
        }
    }

    #[test]
    fn box_rewrite() {
        let f = parse_lddl("[step]p1").unwrap();
        let n = normalize_lddl(&f);
        assert_eq!(n, parse_lddl("~<step;test(~p1);stay>top").unwrap());
        assert!(is_normal_lddl(&n));
        same_truth(&f, &n);
    }

    #[test]
    fn distribution() {
        let f = parse_lddl("<(step + stay);step>top").unwrap();
        let n = normalize_lddl(&f);
        assert_eq!(n, parse_lddl("<step;step;stay>top | <step;stay>top").unwrap());
        same_truth(&f, &n);
    }

    #[test]
    fn fixed_point() {
        let f = parse_lddl("<step;stay>top").unwrap();
        assert_eq!(normalize_lddl(&f), f);
        let u = parse_lddl("<step + step;step>=1 p1").unwrap();
        let n = normalize_lddl(&u);
        assert!(is_normal_lddl(&n));
        assert_eq!(normalize_lddl(&n), n);
        same_truth(&u, &n);
    }
}
