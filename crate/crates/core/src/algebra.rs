//! The algebra interface shared by the concrete carriers.
//!
//! A Jónsson–Tarski algebra is a carrier with a pairing `mul` whose inverse
//! is `(left, right)`. Each carrier also fixes a canonical probe order so
//! axiom reports are comparable across runs.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{Debug, Display};
use std::hash::Hash;

use serde::Serialize;

use crate::exec::Exec;
use crate::term::derivation::Axiom;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("variable `{0}` is not bound in the assignment")]
    Unbound(String),
    #[error("`{value}` is not an element of carrier {carrier}")]
    CarrierMismatch { carrier: String, value: String },
    #[error("closure needs at least one generator")]
    NoGenerators,
    #[error("probe size must be at least 1")]
    EmptyProbe,
}

pub trait JtAlgebra: Sync {
    type Elem: Clone + Eq + Ord + Hash + Debug + Display + Send + Sync;

    fn carrier_name(&self) -> &str;
    fn mul(&self, p: &Self::Elem, q: &Self::Elem) -> Self::Elem;
    fn left(&self, v: &Self::Elem) -> Self::Elem;
    fn right(&self, v: &Self::Elem) -> Self::Elem;
    /// The `index`-th element of the canonical probe window, or `None` past
    /// its end.
    fn probe(&self, index: usize) -> Option<Self::Elem>;
    /// Reads an element literal, rejecting values from other carriers.
    fn parse_element(&self, text: &str) -> Result<Self::Elem, AlgebraError>;
}

pub type Assignment<E> = BTreeMap<String, E>;

pub fn evaluate<A: JtAlgebra>(t: &Term, alg: &A, env: &Assignment<A::Elem>) -> Result<A::Elem, AlgebraError> {
    Ok(match t {
        Term::Var(x) => env.get(x).cloned().ok_or_else(|| AlgebraError::Unbound(x.clone()))?,
        Term::Mul(a, b) => alg.mul(&evaluate(a, alg, env)?, &evaluate(b, alg, env)?),
        Term::L(a) => alg.left(&evaluate(a, alg, env)?),
        Term::R(a) => alg.right(&evaluate(a, alg, env)?),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: &'static str,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checked: u64,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_axioms<A: JtAlgebra>(alg: &A, probe_size: usize) -> Result<AxiomReport, AlgebraError> {
    check_axioms_with(alg, probe_size, Exec::default())
}

/// Checks `l(p*q) = p` and `r(p*q) = q` on all pairs from the first
/// `probe_size` probe elements, and `l(v)*r(v) = v` on each of them.
pub fn check_axioms_with<A: JtAlgebra>(alg: &A, probe_size: usize, exec: Exec) -> Result<AxiomReport, AlgebraError> {
    if probe_size == 0 {
        return Err(AlgebraError::EmptyProbe);
    }
    let elems: Vec<A::Elem> = (0..probe_size).map_while(|i| alg.probe(i)).collect();
    let rows = exec.map(elems.len(), |i| {
        let p = &elems[i];
        let mut out = Vec::new();
        let mut checked = 0u64;
        for q in &elems {
            let v = alg.mul(p, q);
            checked += 2;
            if alg.left(&v) != *p {
                out.push(Violation {
                    axiom: Axiom::EpsL.id(),
                    witness: vec![p.to_string(), q.to_string()],
                });
            }
            if alg.right(&v) != *q {
                out.push(Violation {
                    axiom: Axiom::EpsR.id(),
                    witness: vec![p.to_string(), q.to_string()],
                });
            }
        }
        checked += 1;
        if alg.mul(&alg.left(p), &alg.right(p)) != *p {
            out.push(Violation {
                axiom: Axiom::EpsMul.id(),
                witness: vec![p.to_string()],
            });
        }
        (checked, out)
    });
    let mut report = AxiomReport::default();
    for (checked, violations) in rows {
        report.checked += checked;
        report.violations.extend(violations);
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct ClosureBudget<E> {
    /// Stop after this many elements have been discovered.
    pub max_elements: usize,
    /// Products larger than this are deferred; `None` means `l`/`r` only.
    pub product_ceiling: Option<E>,
}

impl<E> ClosureBudget<E> {
    pub fn unary_only(max_elements: usize) -> Self {
        ClosureBudget {
            max_elements,
            product_ceiling: None,
        }
    }

    pub fn with_ceiling(max_elements: usize, ceiling: E) -> Self {
        ClosureBudget {
            max_elements,
            product_ceiling: Some(ceiling),
        }
    }
}

/// A bounded closure, kept resumable.
///
/// Elements are discovered breadth-first: each processed element
/// contributes its left and right images, then its products with every
/// element processed before it (both orders). Products above the ceiling
/// are remembered and retried by [`Closure::extend`].
#[derive(Clone, Debug)]
pub struct Closure<E> {
    elements: Vec<E>,
    index: HashMap<E, usize>,
    processed: usize,
    deferred: Vec<(u32, u32)>,
    products_skipped: bool,
    ceiling: Option<E>,
    max_elements: usize,
    truncated: bool,
}

impl<E: Clone + Eq + Ord + Hash> Closure<E> {
    /// Elements in discovery order.
    pub fn elements(&self) -> &[E] {
        &self.elements
    }

    pub fn contains(&self, e: &E) -> bool {
        self.index.contains_key(e)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// True when the element budget ran out before the set was closed.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn deferred_products(&self) -> usize {
        self.deferred.len()
    }

    pub fn sorted(&self) -> Vec<E> {
        let mut v = self.elements.clone();
        v.sort();
        v
    }

    // false when the budget is exhausted
    fn add(&mut self, e: E) -> bool {
        if self.index.contains_key(&e) {
            return true;
        }
        if self.elements.len() >= self.max_elements {
            self.truncated = true;
            return false;
        }
        self.index.insert(e.clone(), self.elements.len());
        self.elements.push(e);
        true
    }

    fn admits(&self, v: &E) -> bool {
        matches!(&self.ceiling, Some(c) if v <= c)
    }

    /// Continues with a (possibly larger) budget, retrying deferred products.
    pub fn extend<A: JtAlgebra<Elem = E>>(&mut self, alg: &A, budget: ClosureBudget<E>) {
        self.max_elements = self.max_elements.max(budget.max_elements);
        let raised = match (&self.ceiling, &budget.product_ceiling) {
            (_, None) => false,
            (None, Some(_)) => true,
            (Some(old), Some(new)) => new > old,
        };
        if raised {
            self.ceiling = budget.product_ceiling;
        }
        self.truncated = false;
        if raised {
            if self.products_skipped {
                self.products_skipped = false;
                for k in 0..self.processed {
                    for j in 0..=k {
                        self.deferred.push((k as u32, j as u32));
                    }
                }
            }
            let pending = std::mem::take(&mut self.deferred);
            for (k, j) in pending {
                if !self.try_pair(alg, k as usize, j as usize) {
                    return;
                }
            }
        }
        self.run(alg);
    }

    // false when the budget is exhausted
    fn try_pair<A: JtAlgebra<Elem = E>>(&mut self, alg: &A, k: usize, j: usize) -> bool {
        let (a, b) = (self.elements[k].clone(), self.elements[j].clone());
        let mut keep = false;
        for v in [alg.mul(&a, &b), alg.mul(&b, &a)] {
            if self.admits(&v) {
                if !self.add(v) {
                    self.deferred.push((k as u32, j as u32));
                    return false;
                }
            } else {
                keep = true;
            }
        }
        if keep {
            self.deferred.push((k as u32, j as u32));
        }
        true
    }

    fn run<A: JtAlgebra<Elem = E>>(&mut self, alg: &A) {
        while self.processed < self.elements.len() {
            let k = self.processed;
            let e = self.elements[k].clone();
            if !self.add(alg.left(&e)) || !self.add(alg.right(&e)) {
                return;
            }
            if self.ceiling.is_none() {
                self.products_skipped = true;
            } else {
                for j in 0..=k {
                    if !self.try_pair(alg, k, j) {
                        return;
                    }
                }
            }
            self.processed += 1;
        }
    }
}

/// Least subset containing `generators` closed under `left`, `right` and
/// products that stay under the budget's ceiling.
pub fn closure<A: JtAlgebra>(
    alg: &A,
    generators: &[A::Elem],
    budget: ClosureBudget<A::Elem>,
) -> Result<Closure<A::Elem>, AlgebraError> {
    if generators.is_empty() {
        return Err(AlgebraError::NoGenerators);
    }
    let mut c = Closure {
        elements: Vec::new(),
        index: HashMap::new(),
        processed: 0,
        deferred: Vec::new(),
        products_skipped: false,
        ceiling: budget.product_ceiling,
        max_elements: budget.max_elements,
        truncated: false,
    };
    for g in generators {
        if !c.add(g.clone()) {
            return Ok(c);
        }
    }
    c.run(alg);
    Ok(c)
}
