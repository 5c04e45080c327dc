//! Seeded random formulas. Each production is chosen uniformly among those
//! allowed by the remaining depth budget.

use rand::Rng;

use super::{GmlFormula, LddlFormula, LddlProgram};

fn leaf_gml<R: Rng>(rng: &mut R, props: usize) -> GmlFormula {
    let c = rng.random_range(0..=props);
    if c == 0 {
        GmlFormula::Top
    } else {
        GmlFormula::Prop(c)
    }
}

/// Random GML formula of tree depth at most `depth`, grades in `1..=max_grade`.
pub fn random_gml<R: Rng>(rng: &mut R, depth: usize, max_grade: usize, props: usize) -> GmlFormula {
    if depth == 0 {
        return leaf_gml(rng, props);
    }
    match rng.random_range(0..5) {
        0 => leaf_gml(rng, props),
        1 => random_gml(rng, depth - 1, max_grade, props).not(),
        2 => random_gml(rng, depth - 1, max_grade, props).and(random_gml(rng, depth - 1, max_grade, props)),
        3 => random_gml(rng, depth - 1, max_grade, props).or(random_gml(rng, depth - 1, max_grade, props)),
        _ => {
            let k = rng.random_range(1..=max_grade.max(1));
            GmlFormula::diamond_geq(k, random_gml(rng, depth - 1, max_grade, props))
        }
    }
}

pub fn random_ml<R: Rng>(rng: &mut R, depth: usize, props: usize) -> GmlFormula {
    random_gml(rng, depth, 1, props)
}

fn random_wgml<R: Rng>(rng: &mut R, depth: usize, props: usize, modal: bool) -> GmlFormula {
    let counting = |rng: &mut R| {
        if modal && depth > 0 {
            GmlFormula::diamond_geq(2, random_ml(rng, depth - 1, props))
        } else {
            GmlFormula::diamond_geq(2, GmlFormula::Top)
        }
    };
    if depth == 0 {
        return if rng.random_bool(0.5) { leaf_gml(rng, props) } else { counting(rng) };
    }
    match rng.random_range(0..5) {
        0 => random_ml(rng, depth, props),
        1 => counting(rng),
        2 => random_wgml(rng, depth - 1, props, modal).or(random_wgml(rng, depth - 1, props, modal)),
        3 => random_wgml(rng, depth - 1, props, modal).and(random_wgml(rng, depth - 1, props, modal)),
        _ => GmlFormula::diamond(random_wgml(rng, depth - 1, props, modal)),
    }
}

/// Random formula of the fragment with positive `◇≥2 top`.
pub fn random_wgml_top<R: Rng>(rng: &mut R, depth: usize, props: usize) -> GmlFormula {
    random_wgml(rng, depth, props, false)
}

/// Random formula of the fragment with positive `◇≥2 χ`, `χ` modal.
pub fn random_wgml_modal<R: Rng>(rng: &mut R, depth: usize, props: usize) -> GmlFormula {
    random_wgml(rng, depth, props, true)
}

fn leaf_lddl<R: Rng>(rng: &mut R, props: usize) -> LddlFormula {
    let c = rng.random_range(0..=props);
    if c == 0 {
        LddlFormula::Top
    } else {
        LddlFormula::Prop(c)
    }
}

fn random_program<R: Rng>(rng: &mut R, depth: usize, len: usize, props: usize) -> LddlProgram {
    if len >= 2 && rng.random_range(0..4) == 0 {
        let l = rng.random_range(1..len);
        let a = random_program(rng, depth, l, props);
        let b = random_program(rng, depth, len - l, props);
        return a.union(b);
    }
    let n = rng.random_range(1..=len.max(1));
    let mut atoms = (0..n).map(|_| match rng.random_range(0..4) {
        0 | 1 => LddlProgram::Step,
        2 => LddlProgram::stay(),
        _ => LddlProgram::test(random_lddl(rng, depth.saturating_sub(1), 1, props)),
    });
    let first = atoms.next().expect("n >= 1");
    atoms.fold(first, |p, a| p.seq(a))
}

/// Random formula of tree depth at most `depth`, each program with at most
/// `prog_len` atoms.
pub fn random_lddl<R: Rng>(rng: &mut R, depth: usize, prog_len: usize, props: usize) -> LddlFormula {
    if depth == 0 {
        return leaf_lddl(rng, props);
    }
    let sub = |rng: &mut R| random_lddl(rng, depth - 1, prog_len, props);
    match rng.random_range(0..7) {
        0 => leaf_lddl(rng, props),
        1 => sub(rng).not(),
        2 => sub(rng).and(sub(rng)),
        3 => sub(rng).or(sub(rng)),
        4 => LddlFormula::diamond(random_program(rng, depth - 1, prog_len, props), sub(rng)),
        5 => LddlFormula::box_(random_program(rng, depth - 1, prog_len, props), sub(rng)),
        _ => LddlFormula::unique(random_program(rng, depth - 1, prog_len, props), sub(rng)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_gml, parse_lddl, parse_ml, wgml_membership, WgmlMembership};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samplers_respect_fragments_and_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let f = random_gml(&mut rng, 3, 3, 2);
            assert_eq!(parse_gml(&f.to_string()).unwrap(), f);
            let m = random_ml(&mut rng, 3, 2);
            assert!(m.is_ml());
            assert_eq!(parse_ml(&m.to_string()).unwrap(), m);
            let t = random_wgml_top(&mut rng, 3, 2);
            assert_eq!(wgml_membership(&t), WgmlMembership::InWgmlTop, "{t}");
            let w = random_wgml_modal(&mut rng, 3, 2);
            assert_ne!(wgml_membership(&w), WgmlMembership::NotWgml { witness: String::new() });
            assert!(!matches!(wgml_membership(&w), WgmlMembership::NotWgml { .. }), "{w}");
            let l = random_lddl(&mut rng, 2, 3, 1);
            assert!(l.depth() <= 2 + 1);
            assert_eq!(parse_lddl(&l.to_string()).unwrap(), l, "{l}");
        }
    }

    #[test]
    fn deterministic() {
        let a = random_gml(&mut ChaCha8Rng::seed_from_u64(3), 3, 3, 2);
        let b = random_gml(&mut ChaCha8Rng::seed_from_u64(3), 3, 3, 2);
        assert_eq!(a, b);
    }
}
