//! Positioned rewrite derivations and their JSON form.
//!
//! A derivation is a chain of steps starting from a term. Rewrite steps
//! (`Axiom`, `Hypothesis`) replace an instance of one side of an identity
//! at a position with the matching instance of the other side. An
//! `Instantiate` step applies a substitution to both ends of the identity
//! proved so far, so a derivation certifies `origin = end` where `origin`
//! is `start` pushed through every instantiation.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::parse::{parse_identity_with_reserved, parse_with_reserved, ParseError};
use super::{Dir, Identity, Position, Subst, Term};

/// The three identities of the theory, by their conventional names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axiom {
    /// `l((x*y)) = x`
    #[serde(rename = "eps_l")]
    EpsL,
    /// `r((x*y)) = y`
    #[serde(rename = "eps_r")]
    EpsR,
    /// `(l(z)*r(z)) = z`
    #[serde(rename = "eps_mul")]
    EpsMul,
}

impl Axiom {
    pub const ALL: [Axiom; 3] = [Axiom::EpsL, Axiom::EpsR, Axiom::EpsMul];

    pub fn id(self) -> &'static str {
        match self {
            Axiom::EpsL => "eps_l",
            Axiom::EpsR => "eps_r",
            Axiom::EpsMul => "eps_mul",
        }
    }

    pub fn identity(self) -> Identity {
        let x = || Term::var("x");
        let y = || Term::var("y");
        let z = || Term::var("z");
        match self {
            Axiom::EpsL => Identity::new(Term::l(Term::mul(x(), y())), x()),
            Axiom::EpsR => Identity::new(Term::r(Term::mul(x(), y())), y()),
            Axiom::EpsMul => Identity::new(Term::mul(Term::l(z()), Term::r(z())), z()),
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Axiom(Axiom),
    Hypothesis,
    Instantiate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "fwd")]
    Forward,
    #[serde(rename = "bwd")]
    Backward,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub pos: Position,
    pub rule: Rule,
    pub dir: Direction,
    /// For rewrite steps: the instance substitution (optional, may be
    /// partial; the checker completes it by matching). For `Instantiate`:
    /// the substitution itself.
    pub subst: Option<Subst>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub start: Term,
    pub steps: Vec<Step>,
    pub end: Term,
    /// The identity `Hypothesis` steps refer to, when there are any.
    pub hypothesis: Option<Identity>,
}

#[derive(Debug, thiserror::Error)]
pub enum DerivationFormatError {
    #[error("malformed derivation JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad term in derivation field `{field}`: {source}")]
    Term {
        field: String,
        #[source]
        source: ParseError,
    },
    #[error("unknown rule `{0}`")]
    Rule(String),
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    pos: Vec<Dir>,
    rule: String,
    dir: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    subst: Option<BTreeMap<String, String>>,
}

#[derive(Serialize, Deserialize)]
struct DerivationJson {
    start: String,
    steps: Vec<StepJson>,
    end: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hypothesis: Option<String>,
}

impl Derivation {
    pub fn to_json_value(&self) -> serde_json::Value {
        let dto = DerivationJson {
            start: self.start.to_string(),
            steps: self
                .steps
                .iter()
                .map(|s| StepJson {
                    pos: s.pos.clone(),
                    rule: match s.rule {
                        Rule::Axiom(a) => a.id().to_string(),
                        Rule::Hypothesis => "hyp".to_string(),
                        Rule::Instantiate => "inst".to_string(),
                    },
                    dir: s.dir,
                    subst: s.subst.as_ref().map(|m| {
                        m.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
                    }),
                })
                .collect(),
            end: self.end.to_string(),
            hypothesis: self.hypothesis.as_ref().map(|h| h.to_string()),
        };
        serde_json::to_value(dto).expect("derivation serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("derivation serializes")
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<Derivation, DerivationFormatError> {
        let dto: DerivationJson = serde_json::from_value(v)?;
        let term = |field: &str, s: &str| {
            parse_with_reserved(s).map_err(|source| DerivationFormatError::Term {
                field: field.to_string(),
                source,
            })
        };
        let mut steps = Vec::with_capacity(dto.steps.len());
        for (i, s) in dto.steps.iter().enumerate() {
            let rule = match s.rule.as_str() {
                "eps_l" => Rule::Axiom(Axiom::EpsL),
                "eps_r" => Rule::Axiom(Axiom::EpsR),
                "eps_mul" => Rule::Axiom(Axiom::EpsMul),
                "hyp" => Rule::Hypothesis,
                "inst" => Rule::Instantiate,
                other => return Err(DerivationFormatError::Rule(other.to_string())),
            };
            let subst = match &s.subst {
                None => None,
                Some(m) => {
                    let mut out = Subst::new();
                    for (k, v) in m {
                        out.insert(k.clone(), term(&format!("steps[{i}].subst.{k}"), v)?);
                    }
                    Some(out)
                }
            };
            steps.push(Step {
                pos: s.pos.clone(),
                rule,
                dir: s.dir,
                subst,
            });
        }
        let hypothesis = match &dto.hypothesis {
            None => None,
            Some(h) => Some(parse_identity_with_reserved(h).map_err(|source| {
                DerivationFormatError::Term {
                    field: "hypothesis".to_string(),
                    source,
                }
            })?),
        };
        Ok(Derivation {
            start: term("start", &dto.start)?,
            steps,
            end: term("end", &dto.end)?,
            hypothesis,
        })
    }

    pub fn from_json(text: &str) -> Result<Derivation, DerivationFormatError> {
        Self::from_json_value(serde_json::from_str(text)?)
    }
}

/// Construction-side chain of rewrite steps with its endpoints tracked.
///
/// Chains never contain `Instantiate` steps; every rewrite step carries the
/// full instance substitution so chains can be reversed, instantiated and
/// spliced without replaying.
#[derive(Clone, Debug)]
pub(crate) struct Chain {
    pub start: Term,
    pub steps: Vec<Step>,
    pub end: Term,
}

impl Chain {
    pub fn empty(t: Term) -> Chain {
        Chain {
            start: t.clone(),
            steps: Vec::new(),
            end: t,
        }
    }

    /// One rewrite step at `pos` of `host` using `rule_id` (the identity the
    /// rule stands for) instantiated with `sigma`.
    pub fn single(host: &Term, pos: Position, rule: Rule, rule_id: &Identity, dir: Direction, sigma: Subst) -> Chain {
        let (from, to) = match dir {
            Direction::Forward => (&rule_id.lhs, &rule_id.rhs),
            Direction::Backward => (&rule_id.rhs, &rule_id.lhs),
        };
        debug_assert_eq!(host.subterm(&pos), Some(&from.substitute(&sigma)));
        let end = host
            .replace(&pos, to.substitute(&sigma))
            .expect("step position exists in host");
        Chain {
            start: host.clone(),
            steps: vec![Step {
                pos,
                rule,
                dir,
                subst: Some(sigma),
            }],
            end,
        }
    }

    pub fn axiom(host: &Term, pos: Position, ax: Axiom, dir: Direction, sigma: Subst) -> Chain {
        Self::single(host, pos, Rule::Axiom(ax), &ax.identity(), dir, sigma)
    }

    pub fn then(mut self, next: Chain) -> Chain {
        self.append(next);
        self
    }

    pub fn append(&mut self, next: Chain) {
        debug_assert_eq!(self.end, next.start, "chains must meet");
        self.steps.extend(next.steps);
        self.end = next.end;
    }

    pub fn reversed(self) -> Chain {
        let steps = self
            .steps
            .into_iter()
            .rev()
            .map(|mut s| {
                s.dir = s.dir.flip();
                s
            })
            .collect();
        Chain {
            start: self.end,
            steps,
            end: self.start,
        }
    }

    pub fn substituted(&self, tau: &Subst) -> Chain {
        Chain {
            start: self.start.substitute(tau),
            steps: self
                .steps
                .iter()
                .map(|s| Step {
                    pos: s.pos.clone(),
                    rule: s.rule,
                    dir: s.dir,
                    subst: s
                        .subst
                        .as_ref()
                        .map(|m| m.iter().map(|(k, v)| (k.clone(), v.substitute(tau))).collect()),
                })
                .collect(),
            end: self.end.substitute(tau),
        }
    }

    /// Lifts a chain on the subterm of `host` at `at` to a chain on `host`.
    pub fn embedded(self, host: &Term, at: &[Dir]) -> Chain {
        debug_assert_eq!(host.subterm(at), Some(&self.start));
        let end = host.replace(at, self.end).expect("embedding position exists");
        Chain {
            start: host.clone(),
            steps: self
                .steps
                .into_iter()
                .map(|mut s| {
                    let mut pos = at.to_vec();
                    pos.extend(s.pos);
                    s.pos = pos;
                    s
                })
                .collect(),
            end,
        }
    }

    /// Flips the direction of every hypothesis step, turning a chain that
    /// uses `s = t` into one that uses `t = s`.
    pub fn flip_hypothesis(mut self) -> Chain {
        for s in &mut self.steps {
            if s.rule == Rule::Hypothesis {
                s.dir = s.dir.flip();
            }
        }
        self
    }

    /// Replaces every hypothesis step with an instance of `lemma`, a chain
    /// from the hypothesis' lhs to its rhs under some other hypothesis.
    pub fn inline_hypothesis(self, lemma: &Chain) -> Chain {
        let mut cur = Chain::empty(self.start.clone());
        let mut term = self.start;
        for step in self.steps {
            if step.rule == Rule::Hypothesis {
                let tau = step.subst.expect("construction steps carry substitutions");
                let mut piece = lemma.substituted(&tau);
                if step.dir == Direction::Backward {
                    piece = piece.reversed();
                }
                let piece = piece.embedded(&term, &step.pos);
                term = piece.end.clone();
                cur = cur.then(piece);
            } else {
                let next = apply_known(&term, &step);
                cur.steps.push(step);
                cur.end = next.clone();
                term = next;
            }
        }
        cur
    }

    pub fn into_derivation(self, hypothesis: Option<Identity>) -> Derivation {
        Derivation {
            start: self.start,
            steps: self.steps,
            end: self.end,
            hypothesis,
        }
    }
}

/// Applies an axiom step whose substitution is complete.
fn apply_known(term: &Term, step: &Step) -> Term {
    let Rule::Axiom(ax) = step.rule else {
        unreachable!("only axiom steps remain after inlining");
    };
    let id = ax.identity();
    let to = match step.dir {
        Direction::Forward => &id.rhs,
        Direction::Backward => &id.lhs,
    };
    let sigma = step.subst.as_ref().expect("construction steps carry substitutions");
    term.replace(&step.pos, to.substitute(sigma))
        .expect("step position exists")
}
