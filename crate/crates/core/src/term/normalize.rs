//! Normal forms under the three identities oriented left to right:
//! `l((x*y)) -> x`, `r((x*y)) -> y`, `(l(z)*r(z)) -> z`.
//!
//! Every rule strictly shrinks the term, so rewriting terminates. Normal
//! forms are m,u-terms: no projection sits above a product.

use super::derivation::{Axiom, Chain, Derivation, Direction};
use super::{Dir, Subst, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Rewrite children before their parent (one bottom-up pass).
    Innermost,
    /// Repeatedly contract the leftmost-outermost redex.
    Outermost,
}

/// Normal form of `t` together with an axiom-only derivation reaching it.
pub fn normalize(t: &Term) -> (Term, Derivation) {
    normalize_with(t, Strategy::Innermost)
}

pub fn normalize_with(t: &Term, strategy: Strategy) -> (Term, Derivation) {
    let chain = match strategy {
        Strategy::Innermost => normalize_chain(t),
        Strategy::Outermost => outermost_chain(t),
    };
    (chain.end.clone(), chain.into_derivation(None))
}

pub fn is_normal(t: &Term) -> bool {
    if root_redex(t).is_some() {
        return false;
    }
    match t {
        Term::Var(_) => true,
        Term::Mul(a, b) => is_normal(a) && is_normal(b),
        Term::L(a) | Term::R(a) => is_normal(a),
    }
}

/// The rule and instance contracting `t` at its root, if any.
pub(crate) fn root_redex(t: &Term) -> Option<(Axiom, Subst)> {
    match t {
        Term::L(a) => match a.as_ref() {
            Term::Mul(x, y) => Some((Axiom::EpsL, pair_subst(x, y))),
            _ => None,
        },
        Term::R(a) => match a.as_ref() {
            Term::Mul(x, y) => Some((Axiom::EpsR, pair_subst(x, y))),
            _ => None,
        },
        Term::Mul(a, b) => match (a.as_ref(), b.as_ref()) {
            (Term::L(z1), Term::R(z2)) if z1 == z2 => {
                Some((Axiom::EpsMul, [("z".to_string(), (**z1).clone())].into()))
            }
            _ => None,
        },
        Term::Var(_) => None,
    }
}

fn pair_subst(x: &Term, y: &Term) -> Subst {
    [("x".to_string(), x.clone()), ("y".to_string(), y.clone())].into()
}

pub(crate) fn normalize_chain(t: &Term) -> Chain {
    let mut chain = Chain::empty(t.clone());
    let mut pos = Vec::new();
    innermost(t, &mut pos, &mut chain);
    chain
}

// Normalizes the subterm at `pos` of `chain.end`, appending steps, and
// returns the normal form of that subterm.
fn innermost(t: &Term, pos: &mut Vec<Dir>, chain: &mut Chain) -> Term {
    let rebuilt = match t {
        Term::Var(_) => return t.clone(),
        Term::Mul(a, b) => {
            pos.push(Dir::MulLeft);
            let na = innermost(a, pos, chain);
            pos.pop();
            pos.push(Dir::MulRight);
            let nb = innermost(b, pos, chain);
            pos.pop();
            Term::mul(na, nb)
        }
        Term::L(a) => {
            pos.push(Dir::UnderL);
            let na = innermost(a, pos, chain);
            pos.pop();
            Term::l(na)
        }
        Term::R(a) => {
            pos.push(Dir::UnderR);
            let na = innermost(a, pos, chain);
            pos.pop();
            Term::r(na)
        }
    };
    match root_redex(&rebuilt) {
        Some((ax, sigma)) => {
            let rhs = ax.identity().rhs.substitute(&sigma);
            let step = Chain::axiom(&chain.end, pos.clone(), ax, Direction::Forward, sigma);
            chain.append(step);
            rhs
        }
        None => rebuilt,
    }
}

fn outermost_chain(t: &Term) -> Chain {
    let mut chain = Chain::empty(t.clone());
    while let Some((pos, ax, sigma)) = leftmost_outermost(&chain.end, &mut Vec::new()) {
        let step = Chain::axiom(&chain.end, pos, ax, Direction::Forward, sigma);
        chain = chain.then(step);
    }
    chain
}

fn leftmost_outermost(t: &Term, pos: &mut Vec<Dir>) -> Option<(Vec<Dir>, Axiom, Subst)> {
    if let Some((ax, sigma)) = root_redex(t) {
        return Some((pos.clone(), ax, sigma));
    }
    let children: Vec<(Dir, &Term)> = match t {
        Term::Var(_) => vec![],
        Term::Mul(a, b) => vec![(Dir::MulLeft, a), (Dir::MulRight, b)],
        Term::L(a) => vec![(Dir::UnderL, a)],
        Term::R(a) => vec![(Dir::UnderR, a)],
    };
    for (d, c) in children {
        pos.push(d);
        let found = leftmost_outermost(c, pos);
        pos.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}
