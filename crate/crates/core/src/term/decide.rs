//! Decision procedure for identities over the three projection axioms.
//!
//! Every identity `s = t` is either derivable from the axioms, or together
//! with them it derives `x = y` for distinct variables. [`decide`] says
//! which, and returns a replayable certificate either way.
//!
//! Outline of the recursion:
//!
//! * normalize both sides; equal normal forms are entailed;
//! * if either side still has a product, decide `l(s) = l(t)` and then
//!   `r(s) = r(t)`. Both entailed gives `s = (l(s)*r(s)) = (l(t)*r(t)) = t`;
//!   a collapse of either is lifted back to `s = t` by rewriting under the
//!   projection with the hypothesis;
//! * otherwise both sides are unary, `P(x) = P'(y)`, and a collapse is
//!   built by substituting fresh products for variables and peeling off
//!   rightmost symbols until two distinct bare variables are equated.
//!
//! Intermediate identities are derived from the hypothesis by chains;
//! each recursive collapse certificate is relative to the intermediate
//! identity and gets its hypothesis steps replaced by instances of that
//! chain, so the final certificate only mentions the original hypothesis.

use serde_json::json;

use super::derivation::{Axiom, Chain, Derivation, Direction, Rule, Step};
use super::normalize::normalize_chain;
use super::{Dir, Identity, Subst, Sym, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The axioms derive the identity. The derivation goes from lhs to rhs
    /// and uses no hypothesis steps.
    Entailed(Derivation),
    /// The axioms plus the identity derive `x = y`. The derivation is
    /// relative to the identity and certifies an equation between two
    /// distinct variables.
    Collapsing(Derivation),
}

impl Verdict {
    pub fn is_entailed(&self) -> bool {
        matches!(self, Verdict::Entailed(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Entailed(_) => "Entailed",
            Verdict::Collapsing(_) => "Collapsing",
        }
    }

    pub fn derivation(&self) -> &Derivation {
        match self {
            Verdict::Entailed(d) | Verdict::Collapsing(d) => d,
        }
    }

    pub fn to_json(&self, id: &Identity) -> serde_json::Value {
        json!({
            "identity": id.to_string(),
            "verdict": self.name(),
            "proof": self.derivation().to_json_value(),
        })
    }
}

pub fn decide(id: &Identity) -> Verdict {
    let mut builder = Builder::new(id);
    match builder.decide_terms(&id.lhs, &id.rhs) {
        Outcome::Entailed(chain) => Verdict::Entailed(chain.into_derivation(None)),
        Outcome::Collapsing(chain) => {
            let (Term::Var(u), Term::Var(v)) = (&chain.start, &chain.end) else {
                unreachable!("collapse chains run between variables");
            };
            debug_assert_ne!(u, v);
            let rename: Subst = [
                (u.clone(), Term::var("x")),
                (v.clone(), Term::var("y")),
            ]
            .into();
            let mut d = chain.into_derivation(Some(id.clone()));
            d.steps.push(Step {
                pos: vec![],
                rule: Rule::Instantiate,
                dir: Direction::Forward,
                subst: Some(rename),
            });
            d.end = Term::var("y");
            Verdict::Collapsing(d)
        }
    }
}

enum Outcome {
    Entailed(Chain),
    /// A chain between two distinct variables relative to the identity the
    /// call was asked about.
    Collapsing(Chain),
}

struct Builder {
    next_fresh: usize,
}

impl Builder {
    fn new(id: &Identity) -> Builder {
        // reserved names never come out of the public parser, but stay clear
        // of any that were constructed directly
        let next_fresh = id
            .vars()
            .iter()
            .filter_map(|v| v.strip_prefix('$')?.parse::<usize>().ok())
            .max()
            .map_or(0, |m| m + 1);
        Builder { next_fresh }
    }

    fn fresh(&mut self) -> Term {
        let v = Term::Var(format!("${}", self.next_fresh));
        self.next_fresh += 1;
        v
    }

    fn decide_terms(&mut self, s: &Term, t: &Term) -> Outcome {
        let ds = normalize_chain(s);
        let dt = normalize_chain(t);
        if ds.end == dt.end {
            return Outcome::Entailed(ds.then(dt.reversed()));
        }
        let (ns, nt) = (ds.end.clone(), dt.end.clone());
        match self.decide_normal(&ns, &nt) {
            Outcome::Entailed(c) => Outcome::Entailed(ds.then(c).then(dt.reversed())),
            Outcome::Collapsing(c) => {
                let hyp = Identity::new(s.clone(), t.clone());
                let lemma = ds
                    .reversed()
                    .then(hyp_step(s, vec![], &hyp, Direction::Forward, &Subst::new()))
                    .then(dt);
                Outcome::Collapsing(c.inline_hypothesis(&lemma))
            }
        }
    }

    // Both sides normal and distinct.
    fn decide_normal(&mut self, s: &Term, t: &Term) -> Outcome {
        if !s.has_mul() && !t.has_mul() {
            return Outcome::Collapsing(self.unary(s, t));
        }
        let hyp = Identity::new(s.clone(), t.clone());
        let mut halves = Vec::with_capacity(2);
        for sym in [Sym::L, Sym::R] {
            match self.decide_terms(&sym.apply(s.clone()), &sym.apply(t.clone())) {
                Outcome::Entailed(c) => halves.push(c),
                Outcome::Collapsing(c) => {
                    let host = sym.apply(s.clone());
                    let lemma = hyp_step(&host, vec![sym.dir()], &hyp, Direction::Forward, &Subst::new());
                    return Outcome::Collapsing(c.inline_hypothesis(&lemma));
                }
            }
        }
        let right = halves.pop().expect("two halves");
        let left = halves.pop().expect("two halves");
        let z = |t: &Term| -> Subst { [("z".to_string(), t.clone())].into() };
        let mut chain = Chain::axiom(s, vec![], Axiom::EpsMul, Direction::Backward, z(s));
        let host = chain.end.clone();
        chain.append(left.embedded(&host, &[Dir::MulLeft]));
        let host = chain.end.clone();
        chain.append(right.embedded(&host, &[Dir::MulRight]));
        let host = chain.end.clone();
        chain.append(Chain::axiom(&host, vec![], Axiom::EpsMul, Direction::Forward, z(t)));
        Outcome::Entailed(chain)
    }

    /// Collapse chain for distinct unary terms `s = t`.
    fn unary(&mut self, s: &Term, t: &Term) -> Chain {
        let sv = s.unary_view().expect("unary term");
        let tv = t.unary_view().expect("unary term");
        if sv.prefix.len() < tv.prefix.len() {
            return self.unary(t, s).flip_hypothesis();
        }
        let hyp = Identity::new(s.clone(), t.clone());
        let x = sv.variable.clone();

        if sv.variable != tv.variable {
            if sv.prefix == tv.prefix {
                if sv.prefix.is_empty() {
                    // two distinct bare variables
                    return hyp_step(s, vec![], &hyp, Direction::Forward, &Subst::new());
                }
                // same prefix PQ: substitute products for both variables,
                // which reduces to P applied to the Q-components
                let (a, b, c, d) = (self.fresh(), self.fresh(), self.fresh(), self.fresh());
                let tau: Subst = [
                    (x, Term::mul(a, b)),
                    (tv.variable.clone(), Term::mul(c, d)),
                ]
                .into();
                return self.via_substitution(&hyp, &tau, None);
            }
            // different prefixes: rename the shorter side's variable and
            // chain through the longer side, P'(y) = P(x) = P'(z)
            let z = self.fresh();
            let tau: Subst = [(tv.variable.clone(), z)].into();
            let lemma = hyp_step(t, vec![], &hyp, Direction::Backward, &Subst::new())
                .then(hyp_step(s, vec![], &hyp, Direction::Forward, &tau));
            let (from, to) = (lemma.start.clone(), lemma.end.clone());
            return self.unary(&from, &to).inline_hypothesis(&lemma);
        }

        // same variable; s has the longer, nonempty prefix
        let q = sv.rightmost().expect("distinct terms with the same variable");
        let (a, b) = (self.fresh(), self.fresh());
        let tau: Subst = [(x, Term::mul(a, b))].into();
        match tv.rightmost() {
            // PQ(x) = x: substitute and project both sides with the other symbol
            None => self.via_substitution(&hyp, &tau, Some(q.other())),
            // PQ(x) = P'Q'(x), with Q' equal to Q or not
            Some(_) => self.via_substitution(&hyp, &tau, None),
        }
    }

    /// Instantiates the hypothesis with `tau`, optionally wraps both sides
    /// in `context`, normalizes, and recurses on the resulting identity.
    fn via_substitution(&mut self, hyp: &Identity, tau: &Subst, context: Option<Sym>) -> Chain {
        let inner = hyp.lhs.substitute(tau);
        let (host, pos) = match context {
            Some(sym) => (sym.apply(inner), vec![sym.dir()]),
            None => (inner, vec![]),
        };
        let step = hyp_step(&host, pos, hyp, Direction::Forward, tau);
        let ds = normalize_chain(&host);
        let dt = normalize_chain(&step.end);
        let lemma = ds.reversed().then(step).then(dt);
        let (from, to) = (lemma.start.clone(), lemma.end.clone());
        self.unary(&from, &to).inline_hypothesis(&lemma)
    }
}

/// A hypothesis step whose substitution binds every variable of `hyp`
/// (identity where `tau` is silent).
fn hyp_step(host: &Term, pos: Vec<Dir>, hyp: &Identity, dir: Direction, tau: &Subst) -> Chain {
    let sigma: Subst = hyp
        .vars()
        .into_iter()
        .map(|v| {
            let image = tau.get(&v).cloned().unwrap_or_else(|| Term::Var(v.clone()));
            (v, image)
        })
        .collect();
    Chain::single(host, pos, Rule::Hypothesis, hyp, dir, sigma)
}
