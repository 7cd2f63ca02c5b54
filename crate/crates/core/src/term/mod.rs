//! Terms over one binary product `*` and two unary projections `l`, `r`.
//!
//! The submodules cover the textual grammar ([`parse`]), the oriented
//! rewrite system and its normal forms ([`normalize`]), positioned
//! derivations ([`derivation`]), the independent replay checker
//! ([`check`]) and the entailment decision procedure ([`decide`]).

pub mod check;
pub mod decide;
pub mod derivation;
pub mod normalize;
pub mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parse::{parse, parse_identity, ParseError};

/// A unary operation symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    L,
    R,
}

impl Sym {
    pub fn other(self) -> Sym {
        match self {
            Sym::L => Sym::R,
            Sym::R => Sym::L,
        }
    }

    pub fn apply(self, t: Term) -> Term {
        match self {
            Sym::L => Term::L(Box::new(t)),
            Sym::R => Term::R(Box::new(t)),
        }
    }

    /// The path step that descends under this symbol.
    pub fn dir(self) -> Dir {
        match self {
            Sym::L => Dir::UnderL,
            Sym::R => Dir::UnderR,
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sym::L => "l",
            Sym::R => "r",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Mul(Box<Term>, Box<Term>),
    L(Box<Term>),
    R(Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn l(a: Term) -> Term {
        Term::L(Box::new(a))
    }

    pub fn r(a: Term) -> Term {
        Term::R(Box::new(a))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Mul(a, b) => 1 + a.size() + b.size(),
            Term::L(a) | Term::R(a) => 1 + a.size(),
        }
    }

    pub fn has_mul(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Mul(..) => true,
            Term::L(a) | Term::R(a) => a.has_mul(),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::L(a) | Term::R(a) => a.collect_vars(out),
        }
    }

    pub fn subterm(&self, pos: &[Dir]) -> Option<&Term> {
        let mut cur = self;
        for d in pos {
            cur = match (d, cur) {
                (Dir::MulLeft, Term::Mul(a, _)) => a,
                (Dir::MulRight, Term::Mul(_, b)) => b,
                (Dir::UnderL, Term::L(a)) => a,
                (Dir::UnderR, Term::R(a)) => a,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Replaces the subterm at `pos`, returning `None` if the path does not exist.
    pub fn replace(&self, pos: &[Dir], with: Term) -> Option<Term> {
        let Some((first, rest)) = pos.split_first() else {
            return Some(with);
        };
        Some(match (first, self) {
            (Dir::MulLeft, Term::Mul(a, b)) => Term::Mul(Box::new(a.replace(rest, with)?), b.clone()),
            (Dir::MulRight, Term::Mul(a, b)) => Term::Mul(a.clone(), Box::new(b.replace(rest, with)?)),
            (Dir::UnderL, Term::L(a)) => Term::L(Box::new(a.replace(rest, with)?)),
            (Dir::UnderR, Term::R(a)) => Term::R(Box::new(a.replace(rest, with)?)),
            _ => return None,
        })
    }

    /// Simultaneous substitution; unmapped variables are left alone.
    pub fn substitute(&self, s: &Subst) -> Term {
        match self {
            Term::Var(x) => s.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Mul(a, b) => Term::mul(a.substitute(s), b.substitute(s)),
            Term::L(a) => Term::l(a.substitute(s)),
            Term::R(a) => Term::r(a.substitute(s)),
        }
    }

    /// Views the term as a unary prefix applied to a variable, if it is one.
    pub fn unary_view(&self) -> Option<UnaryView> {
        let mut prefix = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Term::Var(x) => {
                    return Some(UnaryView {
                        prefix,
                        variable: x.clone(),
                    })
                }
                Term::L(a) => {
                    prefix.push(Sym::L);
                    cur = a;
                }
                Term::R(a) => {
                    prefix.push(Sym::R);
                    cur = a;
                }
                Term::Mul(..) => return None,
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Mul(a, b) => write!(f, "({a}*{b})"),
            Term::L(a) => write!(f, "l({a})"),
            Term::R(a) => write!(f, "r({a})"),
        }
    }
}

/// Canonical fully parenthesized rendering.
pub fn render(t: &Term) -> String {
    t.to_string()
}

/// True iff `t` is a product tree whose leaves are unary-prefixed variables.
pub fn is_mu_term(t: &Term) -> bool {
    match t {
        Term::Mul(a, b) => is_mu_term(a) && is_mu_term(b),
        _ => t.unary_view().is_some(),
    }
}

pub fn mult_count(t: &Term) -> usize {
    match t {
        Term::Var(_) => 0,
        Term::Mul(a, b) => 1 + mult_count(a) + mult_count(b),
        Term::L(a) | Term::R(a) => mult_count(a),
    }
}

/// A unary term split into its symbol string and variable.
///
/// `prefix[0]` is the outermost symbol; the last entry is the rightmost
/// (innermost, applied first) symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnaryView {
    pub prefix: Vec<Sym>,
    pub variable: String,
}

impl UnaryView {
    pub fn to_term(&self) -> Term {
        self.prefix
            .iter()
            .rev()
            .fold(Term::Var(self.variable.clone()), |t, s| s.apply(t))
    }

    pub fn rightmost(&self) -> Option<Sym> {
        self.prefix.last().copied()
    }
}

/// One step of a path into a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    #[serde(rename = "left")]
    MulLeft,
    #[serde(rename = "right")]
    MulRight,
    #[serde(rename = "under_l")]
    UnderL,
    #[serde(rename = "under_r")]
    UnderR,
}

pub type Position = Vec<Dir>;

pub type Subst = BTreeMap<String, Term>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Identity {
        Identity { lhs, rhs }
    }

    pub fn flipped(&self) -> Identity {
        Identity::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}
