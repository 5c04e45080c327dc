//! Seeded random feature expressions.

use rand::Rng;

use super::Feature;
use crate::rational::Rational;

fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(rng.random_range(-4..=4), rng.random_range(1..=2))
}

fn leaf<R: Rng>(rng: &mut R, props: usize) -> Feature {
    match rng.random_range(0..3) {
        0 if props > 0 => Feature::prop(rng.random_range(1..=props)),
        1 => Feature::constant(small_rational(rng)),
        _ => Feature::val(),
    }
}

/// Random feature of tree depth at most `depth`. With `exact_only` the
/// sigmoid is never used.
pub fn random_feature<R: Rng>(rng: &mut R, depth: usize, props: usize, exact_only: bool) -> Feature {
    if depth == 0 {
        return leaf(rng, props);
    }
    let sub = |rng: &mut R| random_feature(rng, depth - 1, props, exact_only);
    let choices = if exact_only { 11 } else { 12 };
    match rng.random_range(0..choices) {
        0 => leaf(rng, props),
        1 => {
            let n = rng.random_range(1..=3);
            let args: Vec<Feature> = (0..n).map(|_| sub(rng)).collect();
            let coefs = (0..n).map(|_| small_rational(rng)).collect();
            let bias = small_rational(rng);
            Feature::affine(coefs, bias, args)
        }
        2 => sub(rng).relu(),
        3 => sub(rng).heaviside(),
        4 => sub(rng).square(),
        5 => sub(rng).triwave(),
        6 => {
            let (c, a, b) = (sub(rng), sub(rng), sub(rng));
            Feature::if_pos(&c, &a, &b)
        }
        7 => sub(rng).local_max(),
        8 => sub(rng).local_sum(),
        9 => sub(rng).global_sum(),
        10 => {
            let (a, b) = (sub(rng), sub(rng));
            Feature::max(&a, &b)
        }
        _ => sub(rng).sigmoid(),
    }
}
