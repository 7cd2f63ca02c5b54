//! Derivation replay.
//!
//! This module deliberately carries its own matcher, positional lookup and
//! substitution code and reads the axioms from their textual form, so that
//! a certificate is validated without going through any of the code that
//! built it.

use std::collections::BTreeMap;
use std::fmt;

use super::decide::Verdict;
use super::derivation::{Axiom, Derivation, Direction, Rule};
use super::parse::parse_identity;
use super::{Dir, Identity, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct CheckFailure {
    /// Index of the failing step, or `None` for whole-derivation problems.
    pub step: Option<usize>,
    pub reason: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(i) => write!(f, "step {i}: {}", self.reason),
            None => f.write_str(&self.reason),
        }
    }
}

fn fail<T>(step: Option<usize>, reason: impl Into<String>) -> Result<T, CheckFailure> {
    Err(CheckFailure {
        step,
        reason: reason.into(),
    })
}

fn axiom_statement(ax: Axiom) -> Identity {
    let text = match ax {
        Axiom::EpsL => "l((x*y)) = x",
        Axiom::EpsR => "r((x*y)) = y",
        Axiom::EpsMul => "(l(z)*r(z)) = z",
    };
    parse_identity(text).expect("axiom text parses")
}

type Binding = BTreeMap<String, Term>;

fn lookup<'t>(t: &'t Term, path: &[Dir]) -> Option<&'t Term> {
    match path.split_first() {
        None => Some(t),
        Some((d, rest)) => {
            let child = match (t, d) {
                (Term::Mul(a, _), Dir::MulLeft) => a,
                (Term::Mul(_, b), Dir::MulRight) => b,
                (Term::L(a), Dir::UnderL) => a,
                (Term::R(a), Dir::UnderR) => a,
                _ => return None,
            };
            lookup(child, rest)
        }
    }
}

fn graft(t: &Term, path: &[Dir], with: &Term) -> Term {
    match path.split_first() {
        None => with.clone(),
        Some((d, rest)) => match (t, d) {
            (Term::Mul(a, b), Dir::MulLeft) => Term::Mul(Box::new(graft(a, rest, with)), b.clone()),
            (Term::Mul(a, b), Dir::MulRight) => Term::Mul(a.clone(), Box::new(graft(b, rest, with))),
            (Term::L(a), Dir::UnderL) => Term::L(Box::new(graft(a, rest, with))),
            (Term::R(a), Dir::UnderR) => Term::R(Box::new(graft(a, rest, with))),
            _ => unreachable!("graft is only called on paths that lookup accepted"),
        },
    }
}

fn match_into(pattern: &Term, t: &Term, b: &mut Binding) -> bool {
    match (pattern, t) {
        (Term::Var(v), _) => match b.get(v) {
            Some(bound) => bound == t,
            None => {
                b.insert(v.clone(), t.clone());
                true
            }
        },
        (Term::Mul(p1, p2), Term::Mul(t1, t2)) => match_into(p1, t1, b) && match_into(p2, t2, b),
        (Term::L(p), Term::L(a)) | (Term::R(p), Term::R(a)) => match_into(p, a, b),
        _ => false,
    }
}

fn instantiate(pattern: &Term, b: &Binding) -> Result<Term, String> {
    Ok(match pattern {
        Term::Var(v) => b
            .get(v)
            .cloned()
            .ok_or_else(|| format!("variable `{v}` of the rule is not bound"))?,
        Term::Mul(p, q) => Term::Mul(Box::new(instantiate(p, b)?), Box::new(instantiate(q, b)?)),
        Term::L(p) => Term::L(Box::new(instantiate(p, b)?)),
        Term::R(p) => Term::R(Box::new(instantiate(p, b)?)),
    })
}

fn rename(t: &Term, b: &Binding) -> Term {
    match t {
        Term::Var(v) => b.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Mul(p, q) => Term::Mul(Box::new(rename(p, b)), Box::new(rename(q, b))),
        Term::L(p) => Term::L(Box::new(rename(p, b))),
        Term::R(p) => Term::R(Box::new(rename(p, b))),
    }
}

fn rule_vars(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Var(v) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        Term::Mul(p, q) => {
            rule_vars(p, out);
            rule_vars(q, out);
        }
        Term::L(p) | Term::R(p) => rule_vars(p, out),
    }
}

/// Replays `d` and returns the identity it certifies.
///
/// `hypothesis` must be supplied when the derivation contains hypothesis
/// steps. The certified identity is `origin = end`, where `origin` is the
/// start term after every `Instantiate` step has been applied to it.
pub fn check_derivation(d: &Derivation, hypothesis: Option<&Identity>) -> Result<Identity, CheckFailure> {
    let mut origin = d.start.clone();
    let mut cur = d.start.clone();
    for (i, step) in d.steps.iter().enumerate() {
        let at = Some(i);
        let statement = match step.rule {
            Rule::Instantiate => {
                if !step.pos.is_empty() {
                    return fail(at, "instantiation applies to the whole term; position must be empty");
                }
                let Some(s) = &step.subst else {
                    return fail(at, "instantiation without a substitution");
                };
                origin = rename(&origin, s);
                cur = rename(&cur, s);
                continue;
            }
            Rule::Axiom(ax) => axiom_statement(ax),
            Rule::Hypothesis => match hypothesis {
                Some(h) => h.clone(),
                None => return fail(at, "hypothesis step but no hypothesis was supplied"),
            },
        };
        let (from, to) = match step.dir {
            Direction::Forward => (&statement.lhs, &statement.rhs),
            Direction::Backward => (&statement.rhs, &statement.lhs),
        };
        let Some(sub) = lookup(&cur, &step.pos) else {
            return fail(at, format!("position {:?} does not exist in {cur}", step.pos));
        };
        let mut vars = Vec::new();
        rule_vars(&statement.lhs, &mut vars);
        rule_vars(&statement.rhs, &mut vars);
        let mut binding = Binding::new();
        if let Some(s) = &step.subst {
            for (k, v) in s {
                if !vars.contains(k) {
                    return fail(at, format!("substitution binds `{k}`, which the rule does not mention"));
                }
                binding.insert(k.clone(), v.clone());
            }
        }
        if !match_into(from, sub, &mut binding) {
            return fail(at, format!("subterm {sub} is not an instance of {from}"));
        }
        let replacement = match instantiate(to, &binding) {
            Ok(t) => t,
            Err(e) => return fail(at, e),
        };
        cur = graft(&cur, &step.pos, &replacement);
    }
    if cur != d.end {
        return fail(None, format!("replay ends at {cur} but the derivation claims {}", d.end));
    }
    Ok(Identity::new(origin, cur))
}

/// Checks that a verdict's certificate proves what the verdict claims about `id`.
pub fn check_verdict(id: &Identity, verdict: &Verdict) -> Result<(), CheckFailure> {
    match verdict {
        Verdict::Entailed(d) => {
            if let Some(i) = d.steps.iter().position(|s| s.rule == Rule::Hypothesis) {
                return fail(Some(i), "entailment certificate uses the hypothesis");
            }
            let proved = check_derivation(d, None)?;
            if proved != *id {
                return fail(None, format!("certificate proves {proved}, not {id}"));
            }
            Ok(())
        }
        Verdict::Collapsing(d) => {
            if d.hypothesis.as_ref() != Some(id) {
                return fail(None, "collapse certificate is not relative to the identity");
            }
            let proved = check_derivation(d, Some(id))?;
            match (&proved.lhs, &proved.rhs) {
                (Term::Var(a), Term::Var(b)) if a != b => Ok(()),
                _ => fail(None, format!("collapse certificate proves {proved}, not an equation of distinct variables")),
            }
        }
    }
}
