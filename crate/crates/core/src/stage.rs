//! A finite truncation of the uncountable construction: ordinals below
//! ω·K, extended one limit at a time.
//!
//! Over `λ = ω·a` (a ≥ 1) the element `λ+n` is placed as follows.
//!
//! * even `n`: `r(λ+n) = λ+n+2`, and `l(λ+n) = λ+(n-2)/4` when `n ≡ 2 (mod 4)`
//!   or `l(λ+n) = e_λ(n/4)` when `n ≡ 0 (mod 4)`, with
//!   `e_λ(j) = ω·(j mod a) + (j div a)`;
//! * odd `n`: the odd offsets are split into sets `L_{λ+m}` (m < n), and
//!   `L_{λ+m}` fills the L-shaped region of cells whose larger coordinate
//!   is `λ+m`, minus the one cell holding an even value.
//!
//! Everything below ω is the base algebra from [`crate::jomega`].

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use serde::Serialize;

use crate::algebra::{check_axioms_with, AlgebraError, JtAlgebra};
use crate::exec::Exec;
use crate::jomega::{isqrt_u128, jw_mul_u64, jw_unpair_u64};

/// `ω·limit + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Ordinal {
    pub limit: u64,
    pub offset: u64,
}

impl Ordinal {
    pub const OMEGA: Ordinal = Ordinal { limit: 1, offset: 0 };

    pub const fn new(limit: u64, offset: u64) -> Self {
        Ordinal { limit, offset }
    }

    pub const fn finite(n: u64) -> Self {
        Ordinal { limit: 0, offset: n }
    }

    pub fn is_base(&self) -> bool {
        self.limit == 0
    }

    /// `ω·limit`.
    pub fn limit_part(&self) -> Ordinal {
        Ordinal::new(self.limit, 0)
    }

    fn plus(&self, k: u128) -> Result<Ordinal, StageError> {
        let offset = u64::try_from(self.offset as u128 + k).map_err(|_| StageError::Overflow)?;
        Ok(Ordinal::new(self.limit, offset))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.limit, self.offset) {
            (0, n) => write!(f, "{n}"),
            (1, 0) => f.write_str("w"),
            (1, n) => write!(f, "w+{n}"),
            (a, 0) => write!(f, "w*{a}"),
            (a, n) => write!(f, "w*{a}+{n}"),
        }
    }
}

impl Serialize for Ordinal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid ordinal literal at offset {offset}: {message}")]
pub struct OrdinalParseError {
    pub offset: usize,
    pub message: String,
}

impl FromStr for Ordinal {
    type Err = OrdinalParseError;

    /// Accepts `N`, `w`, `w+N`, `w*A`, `w*A+N` (`ω` may stand for `w`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |offset: usize, message: &str| OrdinalParseError {
            offset,
            message: message.to_string(),
        };
        let number = |from: usize| -> Result<(u64, usize), OrdinalParseError> {
            let digits = s[from..].bytes().take_while(u8::is_ascii_digit).count();
            if digits == 0 {
                return Err(err(from, "expected a decimal number"));
            }
            let v = s[from..from + digits]
                .parse()
                .map_err(|_| err(from, "number does not fit in 64 bits"))?;
            Ok((v, from + digits))
        };
        if s.is_empty() {
            return Err(err(0, "empty literal"));
        }
        let omega = if s.starts_with('w') {
            Some(1)
        } else if s.starts_with('ω') {
            Some('ω'.len_utf8())
        } else {
            None
        };
        let Some(mut at) = omega else {
            let (n, end) = number(0)?;
            if end != s.len() {
                return Err(err(end, "unexpected trailing input"));
            }
            return Ok(Ordinal::finite(n));
        };
        let mut limit = 1;
        if s[at..].starts_with('*') {
            let (a, end) = number(at + 1)?;
            limit = a;
            at = end;
        }
        let mut offset = 0;
        if s[at..].starts_with('+') {
            let (n, end) = number(at + 1)?;
            offset = n;
            at = end;
        }
        if at != s.len() {
            return Err(err(at, "expected `*`, `+` or end of input"));
        }
        Ok(Ordinal::new(limit, offset))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ParityClass {
    Base,
    Even0Mod4,
    Even2Mod4,
    Odd,
}

pub fn classify(o: Ordinal) -> ParityClass {
    if o.is_base() {
        ParityClass::Base
    } else if o.offset % 2 == 1 {
        ParityClass::Odd
    } else if o.offset.is_multiple_of(4) {
        ParityClass::Even0Mod4
    } else {
        ParityClass::Even2Mod4
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cell {
    pub row: Ordinal,
    pub col: Ordinal,
}

impl Cell {
    pub fn new(row: Ordinal, col: Ordinal) -> Self {
        Cell { row, col }
    }

    /// The head of the region the cell lies in.
    pub fn head(&self) -> Ordinal {
        self.row.max(self.col)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StageError {
    #[error("offset arithmetic overflowed 64 bits")]
    Overflow,
    #[error("{value} is not below w*{stages}")]
    OutOfRange { value: Ordinal, stages: u64 },
    #[error("{0} is already a limit")]
    AtLimit(Ordinal),
    #[error("{0} is not an odd element above w")]
    NotOdd(Ordinal),
    #[error("{0} is not an even element above w")]
    NotEven(Ordinal),
    #[error("{0} is finite; region operations need an element at or above w")]
    Finite(Ordinal),
}

/// `e_λ(j)` for `λ = ω·a`.
pub fn e_lambda(a: u64, j: u128) -> Result<Ordinal, StageError> {
    debug_assert!(a >= 1);
    let a = a as u128;
    let offset = u64::try_from(j / a).map_err(|_| StageError::Overflow)?;
    Ok(Ordinal::new((j % a) as u64, offset))
}

/// Inverse of [`e_lambda`]: `ω·b + c ↦ c·a + b` for `b < a`.
pub fn e_lambda_inverse(a: u64, o: Ordinal) -> u128 {
    debug_assert!(o.limit < a);
    o.offset as u128 * a as u128 + o.limit as u128
}

fn s_of(k: u128) -> Option<u128> {
    k.checked_mul(k + 3).map(|v| v / 2)
}

/// The L-set column `m` and row `i` of an odd element.
pub fn lset_locate(o: Ordinal) -> Result<(u64, u64), StageError> {
    if classify(o) != ParityClass::Odd {
        return Err(StageError::NotOdd(o));
    }
    let t = (o.offset as u128 - 1) / 2;
    // S(k) > t first happens near sqrt(2t)
    let mut k = isqrt_u128(2 * t).max(1);
    while k > 1 && s_of(k - 1).unwrap() > t {
        k -= 1;
    }
    while s_of(k).unwrap() <= t {
        k += 1;
    }
    let m = t - s_of(k - 1).unwrap();
    let i = k - m.max(1);
    Ok((m as u64, i as u64))
}

/// The `i`-th element of `L_{λ+m}`.
pub fn lset_element(lambda: Ordinal, m: u64, i: u64) -> Result<Ordinal, StageError> {
    let k = m.max(1) as u128 + i as u128;
    let s = s_of(k - 1).ok_or(StageError::Overflow)?;
    let idx = s.checked_add(m as u128).ok_or(StageError::Overflow)?;
    let off = idx.checked_mul(2).and_then(|v| v.checked_add(1)).ok_or(StageError::Overflow)?;
    Ordinal::new(lambda.limit, 0).plus(off)
}

fn even_left(o: Ordinal) -> Result<Ordinal, StageError> {
    let n = o.offset as u128;
    match classify(o) {
        ParityClass::Even0Mod4 => e_lambda(o.limit, n / 4),
        ParityClass::Even2Mod4 => Ok(Ordinal::new(o.limit, ((n - 2) / 4) as u64)),
        _ => Err(StageError::NotEven(o)),
    }
}

/// Raw position of the even-occupied cell in the region of `head`, if any.
fn even_raw(head: Ordinal) -> Option<u128> {
    let n = head.offset as u128;
    if head.is_base() || n < 2 || n % 2 == 1 {
        return None;
    }
    let k = n - 2;
    Some(if k.is_multiple_of(4) { 2 * n + 2 + 2 * (k / 4) } else { 2 * ((k - 2) / 4) + 1 })
}

fn raw_cell(head: Ordinal, raw: u128) -> Result<Cell, StageError> {
    let n = head.offset as u128;
    let lam = head.limit_part();
    if raw < 2 * n {
        let alpha = lam.plus(raw / 2)?;
        return Ok(if raw.is_multiple_of(2) { Cell::new(head, alpha) } else { Cell::new(alpha, head) });
    }
    if raw == 2 * n {
        return Ok(Cell::new(head, head));
    }
    let r = raw - 2 * n - 1;
    let alpha = e_lambda(head.limit, r / 2)?;
    Ok(if r.is_multiple_of(2) { Cell::new(head, alpha) } else { Cell::new(alpha, head) })
}

fn cell_raw(c: Cell) -> u128 {
    let head = c.head();
    let n = head.offset as u128;
    if c.row == c.col {
        return 2 * n;
    }
    let (alpha, head_is_row) = if c.row == head { (c.col, true) } else { (c.row, false) };
    let base = if alpha.limit == head.limit {
        2 * alpha.offset as u128
    } else {
        2 * n + 1 + 2 * e_lambda_inverse(head.limit, alpha)
    };
    if head_is_row {
        base
    } else {
        base + 1
    }
}

/// The `i`-th unoccupied cell of the region headed by `head`.
pub fn region_cell(head: Ordinal, i: u64) -> Result<Cell, StageError> {
    if head.is_base() {
        return Err(StageError::Finite(head));
    }
    let i = i as u128;
    let raw = match even_raw(head) {
        Some(e) if i >= e => i + 1,
        _ => i,
    };
    raw_cell(head, raw)
}

/// Position of an unoccupied cell among the unoccupied cells of its region.
pub fn region_index(c: Cell) -> Result<u64, StageError> {
    let head = c.head();
    if head.is_base() {
        return Err(StageError::Finite(head));
    }
    let raw = cell_raw(c);
    let idx = match even_raw(head) {
        Some(e) if raw > e => raw - 1,
        _ => raw,
    };
    u64::try_from(idx).map_err(|_| StageError::Overflow)
}

/// The even value placed at `c`, if any.
pub fn cell_even_occupant(c: Cell) -> Option<Ordinal> {
    let col = c.col;
    if col.is_base() || col.offset < 2 || col.offset % 2 == 1 {
        return None;
    }
    let v = Ordinal::new(col.limit, col.offset - 2);
    (even_left(v).ok() == Some(c.row)).then_some(v)
}

/// The cell holding `o`.
pub fn cell_of(o: Ordinal) -> Result<Cell, StageError> {
    match classify(o) {
        ParityClass::Base => {
            let (p, q) = jw_unpair_u64(o.offset);
            Ok(Cell::new(Ordinal::finite(p), Ordinal::finite(q)))
        }
        ParityClass::Odd => {
            let (m, i) = lset_locate(o)?;
            region_cell(Ordinal::new(o.limit, m), i)
        }
        _ => Ok(Cell::new(even_left(o)?, o.plus(2)?)),
    }
}

pub fn stage_left(o: Ordinal) -> Result<Ordinal, StageError> {
    Ok(cell_of(o)?.row)
}

pub fn stage_right(o: Ordinal) -> Result<Ordinal, StageError> {
    Ok(cell_of(o)?.col)
}

pub fn stage_mul(p: Ordinal, q: Ordinal) -> Result<Ordinal, StageError> {
    if p.is_base() && q.is_base() {
        return jw_mul_u64(p.offset, q.offset).map(Ordinal::finite).ok_or(StageError::Overflow);
    }
    let c = Cell::new(p, q);
    if let Some(v) = cell_even_occupant(c) {
        return Ok(v);
    }
    let head = c.head();
    lset_element(head.limit_part(), head.offset, region_index(c)?)
}

/// One step towards the limit part, realized by `l`, `r` or `l∘r`.
pub fn descent_step(o: Ordinal) -> Result<Ordinal, StageError> {
    if o.is_base() {
        return Err(StageError::Finite(o));
    }
    let n = o.offset;
    match classify(o) {
        _ if n == 0 => Err(StageError::AtLimit(o)),
        ParityClass::Odd => Ok(Ordinal::new(o.limit, lset_locate(o)?.0)),
        ParityClass::Even2Mod4 => even_left(o),
        _ => Ok(Ordinal::new(o.limit, n / 4)),
    }
}

/// The full path from `o` down to its limit part.
pub fn descent(o: Ordinal) -> Result<Vec<Ordinal>, StageError> {
    let mut out = vec![o];
    let mut cur = o;
    while cur.offset > 0 {
        cur = descent_step(cur)?;
        out.push(cur);
    }
    Ok(out)
}

#[derive(Default, Debug)]
struct Memo {
    by_cell: HashMap<Cell, Ordinal>,
    by_value: HashMap<Ordinal, Cell>,
    conflicts: Vec<String>,
}

impl Memo {
    fn record(&mut self, c: Cell, v: Ordinal) {
        match self.by_cell.get(&c) {
            Some(old) if *old != v => self.conflicts.push(format!("cell {c} holds both {old} and {v}")),
            Some(_) => {}
            None => {
                self.by_cell.insert(c, v);
            }
        }
        match self.by_value.get(&v) {
            Some(old) if *old != c => self.conflicts.push(format!("{v} placed at both {old} and {c}")),
            Some(_) => {}
            None => {
                self.by_value.insert(v, c);
            }
        }
    }
}

/// The truncated table on ordinals below ω·K, with a shared memo of every
/// placement computed so far.
#[derive(Debug)]
pub struct StageTable {
    stages: u64,
    memo: RwLock<Memo>,
}

impl StageTable {
    pub fn new(stages: u64) -> Self {
        StageTable {
            stages,
            memo: RwLock::new(Memo::default()),
        }
    }

    pub fn stages(&self) -> u64 {
        self.stages
    }

    fn in_range(&self, o: Ordinal) -> Result<(), StageError> {
        if o.limit < self.stages {
            Ok(())
        } else {
            Err(StageError::OutOfRange {
                value: o,
                stages: self.stages,
            })
        }
    }

    fn record(&self, c: Cell, v: Ordinal) {
        self.memo.write().unwrap_or_else(|e| e.into_inner()).record(c, v);
    }

    pub fn mul(&self, p: Ordinal, q: Ordinal) -> Result<Ordinal, StageError> {
        self.in_range(p)?;
        self.in_range(q)?;
        let c = Cell::new(p, q);
        if let Some(v) = self.memo.read().unwrap_or_else(|e| e.into_inner()).by_cell.get(&c) {
            return Ok(*v);
        }
        let v = stage_mul(p, q)?;
        self.record(c, v);
        Ok(v)
    }

    pub fn cell(&self, o: Ordinal) -> Result<Cell, StageError> {
        self.in_range(o)?;
        if let Some(c) = self.memo.read().unwrap_or_else(|e| e.into_inner()).by_value.get(&o) {
            return Ok(*c);
        }
        let c = cell_of(o)?;
        self.record(c, o);
        Ok(c)
    }

    pub fn left(&self, o: Ordinal) -> Result<Ordinal, StageError> {
        Ok(self.cell(o)?.row)
    }

    pub fn right(&self, o: Ordinal) -> Result<Ordinal, StageError> {
        Ok(self.cell(o)?.col)
    }

    /// Placement conflicts seen by the memo so far.
    pub fn conflicts(&self) -> Vec<String> {
        self.memo.read().unwrap_or_else(|e| e.into_inner()).conflicts.clone()
    }

    /// Number of distinct memoized placements.
    pub fn memo_len(&self) -> usize {
        self.memo.read().unwrap_or_else(|e| e.into_inner()).by_cell.len()
    }

    /// Checks that the memo's two maps are mutually inverse.
    fn memo_mismatches(&self) -> Vec<String> {
        let m = self.memo.read().unwrap_or_else(|e| e.into_inner());
        let mut out = Vec::new();
        for (c, v) in &m.by_cell {
            if m.by_value.get(v) != Some(c) {
                out.push(format!("cell {c} maps to {v}, which maps back elsewhere"));
            }
        }
        for (v, c) in &m.by_value {
            if m.by_cell.get(c) != Some(v) {
                out.push(format!("{v} maps to cell {c}, which maps back elsewhere"));
            }
        }
        out.sort();
        out
    }

    pub fn window(&self, window: u64) -> Vec<Ordinal> {
        (0..self.stages)
            .flat_map(|a| (0..window).map(move |n| Ordinal::new(a, n)))
            .collect()
    }
}

/// A stage table viewed as an algebra whose probe order runs through the
/// window `{ω·a + n : a < K, n < window}` lexicographically.
///
/// The `JtAlgebra` operations panic if offsets overflow 64 bits; use the
/// `StageTable` methods for fallible access.
pub struct StageAlgebra<'t> {
    pub table: &'t StageTable,
    pub window: u64,
    name: String,
}

impl<'t> StageAlgebra<'t> {
    pub fn new(table: &'t StageTable, window: u64) -> Self {
        StageAlgebra {
            table,
            window,
            name: format!("stage(K={})", table.stages),
        }
    }
}

impl JtAlgebra for StageAlgebra<'_> {
    type Elem = Ordinal;

    fn carrier_name(&self) -> &str {
        &self.name
    }

    fn mul(&self, p: &Ordinal, q: &Ordinal) -> Ordinal {
        self.table.mul(*p, *q).unwrap_or_else(|e| panic!("{p} * {q}: {e}"))
    }

    fn left(&self, v: &Ordinal) -> Ordinal {
        self.table.left(*v).unwrap_or_else(|e| panic!("l({v}): {e}"))
    }

    fn right(&self, v: &Ordinal) -> Ordinal {
        self.table.right(*v).unwrap_or_else(|e| panic!("r({v}): {e}"))
    }

    fn probe(&self, index: usize) -> Option<Ordinal> {
        let w = self.window.max(1) as usize;
        let a = (index / w) as u64;
        (a < self.table.stages).then(|| Ordinal::new(a, (index % w) as u64))
    }

    fn parse_element(&self, text: &str) -> Result<Ordinal, AlgebraError> {
        let mismatch = || AlgebraError::CarrierMismatch {
            carrier: self.name.clone(),
            value: text.to_string(),
        };
        let o: Ordinal = text.trim().parse().map_err(|_| mismatch())?;
        self.table.in_range(o).map_err(|_| mismatch())?;
        Ok(o)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StageCheck {
    pub name: &'static str,
    pub checked: u64,
    pub failure_count: u64,
    /// The first few failures, as witnesses.
    pub failures: Vec<String>,
}

impl StageCheck {
    const MAX_LISTED: usize = 16;

    fn new(name: &'static str) -> Self {
        StageCheck {
            name,
            ..Default::default()
        }
    }

    fn tick(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(witness());
        }
    }

    fn fail(&mut self, w: String) {
        self.failure_count += 1;
        if self.failures.len() < Self::MAX_LISTED {
            self.failures.push(w);
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub stages: u64,
    pub window: u64,
    pub checks: Vec<StageCheck>,
    /// Largest number of even-occupied cells seen in one region.
    pub max_even_per_region: u64,
    /// Whether no region had more than one even-occupied cell.
    pub at_most_one_even_per_region: bool,
}

impl StageReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(StageCheck::passed)
    }

    pub fn check(&self, name: &str) -> Option<&StageCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("need at least one stage")]
    NoStages,
    #[error("window must be at least 16, got {0}")]
    WindowTooSmall(u64),
    #[error(transparent)]
    Stage(#[from] StageError),
}

/// Checks the truncated table on all `ω·a + n` with `a < stages`, `n < window`.
pub fn verify_stage(stages: u64, window: u64, exec: Exec) -> Result<StageReport, VerifyError> {
    if stages == 0 {
        return Err(VerifyError::NoStages);
    }
    if window < 16 {
        return Err(VerifyError::WindowTooSmall(window));
    }
    let table = StageTable::new(stages);
    let elems = table.window(window);
    let mut checks = Vec::new();

    let alg = StageAlgebra::new(&table, window);
    let axioms = check_axioms_with(&alg, elems.len(), exec).expect("window is nonempty");
    let mut c = StageCheck::new("axioms");
    c.checked = axioms.checked;
    for v in axioms.violations {
        c.fail(format!("{} at {}", v.axiom, v.witness.join(", ")));
    }
    checks.push(c);

    let products = exec.map_slice(&elems, |p| {
        elems.iter().map(|q| table.mul(*p, *q)).collect::<Result<Vec<_>, _>>()
    });
    let products: Vec<Vec<Ordinal>> = products.into_iter().collect::<Result<_, _>>()?;
    for o in &elems {
        table.cell(*o)?;
    }

    let mut c = StageCheck::new("confinement");
    for (p, row) in elems.iter().zip(&products) {
        for (q, v) in elems.iter().zip(row) {
            c.tick(v.limit == p.limit.max(q.limit), || format!("{p} * {q} = {v}"));
        }
    }
    checks.push(c);

    let mut c = StageCheck::new("placement");
    let conflicts = table.conflicts();
    let mismatches = table.memo_mismatches();
    c.checked = table.memo_len() as u64;
    for w in conflicts.into_iter().chain(mismatches) {
        c.fail(w);
    }
    checks.push(c);

    let limits: Vec<u64> = (1..stages).collect();

    let mut c = StageCheck::new("even_injectivity");
    for &a in &limits {
        let mut rows = HashMap::new();
        let mut cols = HashMap::new();
        for n in (0..window).step_by(2) {
            let v = Ordinal::new(a, n);
            let cell = table.cell(v)?;
            let row_new = rows.insert(cell.row, v);
            let col_new = cols.insert(cell.col, v);
            c.tick(row_new.is_none(), || format!("{v} shares row {} with {}", cell.row, row_new.unwrap()));
            c.tick(col_new.is_none(), || format!("{v} shares column {} with {}", cell.col, col_new.unwrap()));
            c.tick(cell_even_occupant(cell) == Some(v), || format!("{v} not recognized at {cell}"));
        }
    }
    checks.push(c);

    let mut c = StageCheck::new("partition");
    for &a in &limits {
        for n in (1..window).step_by(2) {
            let v = Ordinal::new(a, n);
            let (m, i) = lset_locate(v)?;
            let back = lset_element(v.limit_part(), m, i)?;
            c.tick(m < n && back == v, || format!("{v} located at L[{m}] #{i}, which is {back}"));
        }
    }
    checks.push(c);

    let mut c = StageCheck::new("even_occupancy");
    let mut max_even = 0u64;
    for &a in &limits {
        for n in 0..window {
            let head = Ordinal::new(a, n);
            let mut count = 0u64;
            for alpha in elems.iter().filter(|x| **x <= head) {
                let mut cells = vec![Cell::new(head, *alpha)];
                if *alpha != head {
                    cells.push(Cell::new(*alpha, head));
                }
                count += cells.iter().filter(|x| cell_even_occupant(**x).is_some()).count() as u64;
            }
            max_even = max_even.max(count);
            c.tick(count <= 2, || format!("region {head} has {count} even cells"));
        }
    }
    checks.push(c);

    let mut c = StageCheck::new("descent");
    for &a in &limits {
        for n in 1..window {
            let start = Ordinal::new(a, n);
            let mut cur = start;
            let mut steps = 0u64;
            while cur.offset > 0 && steps <= n {
                let next = descent_step(cur)?;
                let realized = table.left(cur)? == next
                    || table.right(cur)? == next
                    || table.right(cur).and_then(|r| table.left(r))? == next;
                c.tick(realized && next.offset < cur.offset, || {
                    format!("{cur} -> {next} is not a decreasing table step")
                });
                cur = next;
                steps += 1;
            }
            c.tick(cur == start.limit_part() && steps <= n, || {
                format!("{start} reached {cur} after {steps} steps")
            });
        }
    }
    checks.push(c);

    let mut c = StageCheck::new("even_generation");
    let reach = window / 4;
    for &a in &limits {
        let lam = Ordinal::new(a, 0);
        let mut reached = BTreeSet::new();
        let mut cur = lam;
        for k in 0..=window / 2 + 1 {
            c.tick(cur == Ordinal::new(a, 2 * k), || format!("r^{k}({lam}) = {cur}"));
            reached.insert(cur);
            reached.insert(table.left(cur)?);
            cur = table.right(cur)?;
        }
        for j in 0..=reach {
            let plain = Ordinal::new(a, j);
            c.tick(reached.contains(&plain), || format!("{plain} not reached from {lam}"));
            let low = e_lambda(a, j as u128)?;
            c.tick(reached.contains(&low), || format!("{low} not reached from {lam}"));
        }
    }
    checks.push(c);

    let mut c = StageCheck::new("restriction");
    if stages >= 2 {
        let smaller = StageTable::new(stages - 1);
        let index: HashMap<Ordinal, usize> = elems.iter().enumerate().map(|(i, o)| (*o, i)).collect();
        let sub = smaller.window(window);
        for p in &sub {
            for q in &sub {
                let big = products[index[p]][index[q]];
                let small = smaller.mul(*p, *q)?;
                c.tick(big == small, || format!("{p} * {q}: {big} at K={stages}, {small} at K={}", stages - 1));
            }
            let (bc, sc) = (table.cell(*p)?, smaller.cell(*p)?);
            c.tick(bc == sc, || format!("cell of {p}: {bc} vs {sc}"));
        }
    }
    checks.push(c);

    let seen: HashSet<Ordinal> = products.iter().flatten().copied().collect();
    let mut c = StageCheck::new("window_coverage");
    for o in &elems {
        let cell = table.cell(*o)?;
        let inside = cell.row.offset < window && cell.col.offset < window;
        c.tick(!inside || seen.contains(o), || format!("{o} has a window cell but no window product hit it"));
    }
    checks.push(c);

    Ok(StageReport {
        stages,
        window,
        checks,
        max_even_per_region: max_even,
        at_most_one_even_per_region: max_even <= 1,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DumpRow {
    pub row: Ordinal,
    pub col: Ordinal,
    pub value: Ordinal,
    pub kind: &'static str,
    pub region: Ordinal,
}

/// Every product of two window elements, row-major.
pub fn dump(stages: u64, window: u64) -> Result<Vec<DumpRow>, StageError> {
    let table = StageTable::new(stages);
    let elems = table.window(window);
    let mut out = Vec::with_capacity(elems.len() * elems.len());
    for p in &elems {
        for q in &elems {
            let value = table.mul(*p, *q)?;
            let kind = match classify(value) {
                ParityClass::Base => "base",
                ParityClass::Odd => "odd",
                _ => "even",
            };
            out.push(DumpRow {
                row: *p,
                col: *q,
                value,
                kind,
                region: Cell::new(*p, *q).head(),
            });
        }
    }
    Ok(out)
}

pub fn dump_csv(rows: &[DumpRow]) -> String {
    let mut s = String::from("row,col,value,kind,region\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{},{}\n", r.row, r.col, r.value, r.kind, r.region));
    }
    s
}

/// The first `rows` elements of each L-set `L_{λ+m}`, `m < columns`.
pub fn lset_table(lambda: Ordinal, columns: u64, rows: u64) -> Result<BTreeMap<u64, Vec<Ordinal>>, StageError> {
    (0..columns)
        .map(|m| Ok((m, (0..rows).map(|i| lset_element(lambda, m, i)).collect::<Result<_, _>>()?)))
        .collect()
}
