//! Seeded random terms and identities.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::term::derivation::Axiom;
use crate::term::normalize::root_redex;
use crate::term::{Dir, Identity, Position, Subst, Term};

pub const VARS: [&str; 3] = ["x", "y", "z"];

/// A uniformly shaped random term with exactly `size` nodes.
pub fn random_term<R: Rng>(rng: &mut R, size: usize, vars: &[&str]) -> Term {
    let size = size.max(1);
    if size == 1 {
        return Term::var(*vars.choose(rng).expect("at least one variable"));
    }
    if size >= 3 && rng.gen_bool(0.5) {
        let left = rng.gen_range(1..size - 1);
        return Term::mul(random_term(rng, left, vars), random_term(rng, size - 1 - left, vars));
    }
    let inner = random_term(rng, size - 1, vars);
    if rng.gen_bool(0.5) {
        Term::l(inner)
    } else {
        Term::r(inner)
    }
}

fn positions(t: &Term, at: &mut Position, out: &mut Vec<Position>) {
    out.push(at.clone());
    let children: Vec<(Dir, &Term)> = match t {
        Term::Var(_) => vec![],
        Term::Mul(a, b) => vec![(Dir::MulLeft, a), (Dir::MulRight, b)],
        Term::L(a) => vec![(Dir::UnderL, a)],
        Term::R(a) => vec![(Dir::UnderR, a)],
    };
    for (d, c) in children {
        at.push(d);
        positions(c, at, out);
        at.pop();
    }
}

/// Applies one random Σ-step somewhere in `t`, if one fits in `max_size`.
pub fn perturb_once<R: Rng>(rng: &mut R, t: &Term, max_size: usize, vars: &[&str]) -> Option<Term> {
    let mut all = Vec::new();
    positions(t, &mut Vec::new(), &mut all);
    let pos = all.choose(rng)?;
    let u = t.subterm(pos)?.clone();
    let replacement = match rng.gen_range(0..4) {
        0 => {
            let (ax, sigma) = root_redex(&u)?;
            ax.identity().rhs.substitute(&sigma)
        }
        1 => Term::l(Term::mul(u, random_term(rng, 1, vars))),
        2 => Term::r(Term::mul(random_term(rng, 1, vars), u)),
        _ => Term::mul(Term::l(u.clone()), Term::r(u)),
    };
    let out = t.replace(pos, replacement)?;
    (out.size() <= max_size).then_some(out)
}

/// An instance of one of the three Σ identities.
pub fn sigma_instance<R: Rng>(rng: &mut R, ax: Axiom, max_arg: usize) -> Identity {
    let id = ax.identity();
    let sigma: Subst = ["x", "y", "z"]
        .iter()
        .map(|v| {
            let size = rng.gen_range(1..=max_arg);
            (v.to_string(), random_term(rng, size, &VARS))
        })
        .collect();
    Identity::new(id.lhs.substitute(&sigma), id.rhs.substitute(&sigma))
}

/// Identities over `x, y, z` with both sides of size at most `max_size`.
///
/// Half are two independent random terms; the other half start from a
/// random term and take a few random Σ-steps from it, so both verdicts
/// are well represented.
pub struct Corpus {
    rng: ChaCha8Rng,
    max_size: usize,
}

impl Corpus {
    pub fn new(seed: u64, max_size: usize) -> Self {
        Corpus {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_size: max_size.max(1),
        }
    }

    pub fn next_identity(&mut self) -> Identity {
        let rng = &mut self.rng;
        let lhs_size = rng.gen_range(1..=self.max_size);
        let lhs = random_term(rng, lhs_size, &VARS);
        let rhs = if rng.gen_bool(0.5) {
            let size = rng.gen_range(1..=self.max_size);
            random_term(rng, size, &VARS)
        } else {
            let mut t = lhs.clone();
            for _ in 0..rng.gen_range(1..=4) {
                if let Some(next) = perturb_once(rng, &t, self.max_size, &VARS) {
                    t = next;
                }
            }
            t
        };
        Identity::new(lhs, rhs)
    }
}

impl Iterator for Corpus {
    type Item = Identity;

    fn next(&mut self) -> Option<Identity> {
        Some(self.next_identity())
    }
}

pub fn corpus(seed: u64, count: usize, max_size: usize) -> Vec<Identity> {
    Corpus::new(seed, max_size).take(count).collect()
}
