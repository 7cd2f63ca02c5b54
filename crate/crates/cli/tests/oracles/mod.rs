//! Independent reference computations for the acceptance suite.
//!
//! Nothing here calls the library's normalizer, decision procedure or
//! stage formulas; terms and tables are rebuilt from first principles.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::{BuildHasherDefault, Hasher};

use jtalg::term::Term;

// prefix codes, three bits each
const MUL: u8 = 1;
const L: u8 = 2;
const R: u8 = 3;
const VAR0: u8 = 4;

fn flatten(t: &Term, vars: &mut Vec<String>, out: &mut Vec<u8>) {
    match t {
        Term::Var(v) => {
            let i = vars.iter().position(|w| w == v).unwrap_or_else(|| {
                vars.push(v.clone());
                vars.len() - 1
            });
            assert!(i < 3, "at most three variables");
            out.push(VAR0 + i as u8);
        }
        Term::Mul(a, b) => {
            out.push(MUL);
            flatten(a, vars, out);
            flatten(b, vars, out);
        }
        Term::L(a) => {
            out.push(L);
            flatten(a, vars, out);
        }
        Term::R(a) => {
            out.push(R);
            flatten(a, vars, out);
        }
    }
}

#[derive(Default)]
struct Mix(u64);

impl Hasher for Mix {
    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.write_u64(*b as u64);
        }
    }

    fn write_u64(&mut self, x: u64) {
        self.0 = (self.0 ^ x ^ (x >> 29)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    }

    fn finish(&self) -> u64 {
        self.0 ^ (self.0 >> 32)
    }
}

type Seen = HashSet<u64, BuildHasherDefault<Mix>>;

fn pack(code: &[u8]) -> u64 {
    code.iter().rev().fold(0u64, |acc, c| (acc << 3) | *c as u64)
}

fn unpack(mut w: u64, buf: &mut Vec<u8>) {
    buf.clear();
    while w != 0 {
        buf.push((w & 7) as u8);
        w >>= 3;
    }
}

fn end_of(code: &[u8], i: usize) -> usize {
    let mut pending = 1i32;
    let mut j = i;
    while pending > 0 {
        pending += match code[j] {
            MUL => 1,
            L | R => 0,
            _ => -1,
        };
        j += 1;
    }
    j
}

/// Smallest multiplication count among all terms reachable from `t` by
/// single Σ-steps in either direction, never exceeding `cap` nodes.
/// Backward projection steps introduce the discarded argument only as one
/// of three variables.
pub fn min_mult_bfs(t: &Term, cap: usize) -> usize {
    MinMult::new(cap).get(t)
}

/// [`min_mult_bfs`] with answers remembered per start term. Variables are
/// numbered by first occurrence, so renamings share one search.
pub struct MinMult {
    cap: usize,
    cache: HashMap<u64, usize>,
    pub states: usize,
}

impl MinMult {
    pub fn new(cap: usize) -> Self {
        assert!(cap <= 21, "packing holds 21 symbols");
        MinMult {
            cap,
            cache: HashMap::new(),
            states: 0,
        }
    }

    pub fn get(&mut self, t: &Term) -> usize {
        let mut vars = Vec::new();
        let mut start = Vec::new();
        flatten(t, &mut vars, &mut start);
        assert!(start.len() <= self.cap);
        let key = pack(&start);
        if let Some(v) = self.cache.get(&key) {
            return *v;
        }
        let (v, states) = search(start, self.cap);
        self.states += states;
        self.cache.insert(key, v);
        v
    }
}

fn search(start: Vec<u8>, cap: usize) -> (usize, usize) {
    let muls = |c: &[u8]| c.iter().filter(|s| **s == MUL).count();
    let mut best = muls(&start);
    let mut seen = Seen::default();
    let mut queue = VecDeque::new();
    seen.insert(pack(&start));
    queue.push_back(pack(&start));
    let mut code = Vec::with_capacity(cap);
    let mut next = Vec::with_capacity(cap);
    while let Some(w) = queue.pop_front() {
        if best == 0 {
            break;
        }
        unpack(w, &mut code);
        best = best.min(muls(&code));
        let n = code.len();
        let emit = |next: &Vec<u8>, seen: &mut Seen, queue: &mut VecDeque<u64>| {
            if next.len() <= cap {
                let p = pack(next);
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        };
        for i in 0..n {
            let e = end_of(&code, i);
            let sub = &code[i..e];
            // contractions
            if (sub[0] == L || sub[0] == R) && sub[1] == MUL {
                let a_end = end_of(sub, 2);
                let kept = if sub[0] == L { &sub[2..a_end] } else { &sub[a_end..] };
                next.clear();
                next.extend_from_slice(&code[..i]);
                next.extend_from_slice(kept);
                next.extend_from_slice(&code[e..]);
                emit(&next, &mut seen, &mut queue);
            }
            if sub[0] == MUL && sub[1] == L {
                let a_end = end_of(sub, 2);
                if sub[a_end] == R && sub[a_end + 1..] == sub[2..a_end] {
                    next.clear();
                    next.extend_from_slice(&code[..i]);
                    next.extend_from_slice(&sub[2..a_end]);
                    next.extend_from_slice(&code[e..]);
                    emit(&next, &mut seen, &mut queue);
                }
            }
            // expansions
            if n + 3 <= cap {
                for v in 0..3u8 {
                    for head in [L, R] {
                        next.clear();
                        next.extend_from_slice(&code[..i]);
                        next.push(head);
                        next.push(MUL);
                        if head == L {
                            next.extend_from_slice(sub);
                            next.push(VAR0 + v);
                        } else {
                            next.push(VAR0 + v);
                            next.extend_from_slice(sub);
                        }
                        next.extend_from_slice(&code[e..]);
                        emit(&next, &mut seen, &mut queue);
                    }
                }
            }
            if n + sub.len() + 2 <= cap {
                next.clear();
                next.extend_from_slice(&code[..i]);
                next.push(MUL);
                next.push(L);
                next.extend_from_slice(sub);
                next.push(R);
                next.extend_from_slice(sub);
                next.extend_from_slice(&code[e..]);
                emit(&next, &mut seen, &mut queue);
            }
        }
    }
    (best, seen.len())
}

/// The J_ω table rebuilt by hand: 0, 1, 2 go in the upper left corner,
/// then the remaining naturals fill the free cells in increasing order,
/// one anti-diagonal at a time from the bottom-left upward.
pub fn diagonal_fill(diagonals: u64) -> HashMap<(u64, u64), u64> {
    let mut cells = HashMap::from([((0, 0), 1), ((0, 1), 2), ((1, 0), 0)]);
    let mut next = 3;
    for d in 0..diagonals {
        for q in 0..=d {
            let p = d - q;
            if let std::collections::hash_map::Entry::Vacant(e) = cells.entry((p, q)) {
                e.insert(next);
                next += 1;
            }
        }
    }
    cells
}

/// `(limit, offset)`; only limits 0 and 1 occur.
pub type HOrd = (u64, u64);

/// The λ = ω region tables for heads ω+n, n < `heads`, with finite
/// coordinates below `finite`, filled by walking the placement rules.
pub struct HandOmega {
    pub cells: HashMap<(HOrd, HOrd), HOrd>,
    pub lsets: Vec<Vec<u64>>,
}

impl HandOmega {
    pub fn build(heads: u64, finite: u64) -> Self {
        let mut cells = HashMap::new();
        // even ω+k: column ω+k+2, row ω+(k-2)/4 or the finite k/4
        for k in (0..heads).step_by(2) {
            if k + 2 >= heads {
                break;
            }
            let row = if k % 4 == 2 { (1, (k - 2) / 4) } else { (0, k / 4) };
            cells.insert((row, (1, k + 2)), (1, k));
        }
        // L-set columns, filled row by row along the anti-diagonals
        let per_region = (2 * heads + 1 + 2 * finite) as usize;
        let mut lsets: Vec<Vec<u64>> = vec![Vec::new(); heads as usize];
        let mut odd = 1;
        let mut k = 1u64;
        while lsets.iter().any(|c| c.len() < per_region) {
            for m in 0..=k {
                if (m as usize) < lsets.len() {
                    lsets[m as usize].push(odd);
                }
                odd += 2;
            }
            k += 1;
        }
        for n in 0..heads {
            let h = (1, n);
            let mut order = Vec::new();
            for j in 0..n {
                order.push((h, (1, j)));
                order.push(((1, j), h));
            }
            order.push((h, h));
            for j in 0..finite {
                order.push((h, (0, j)));
                order.push(((0, j), h));
            }
            let mut fill = lsets[n as usize].iter();
            for c in order {
                cells.entry(c).or_insert_with(|| (1, *fill.next().expect("L-set long enough")));
            }
        }
        HandOmega { cells, lsets }
    }

    pub fn mul(&self, p: HOrd, q: HOrd) -> Option<HOrd> {
        self.cells.get(&(p, q)).copied()
    }

    pub fn cell_of(&self, v: HOrd) -> Option<(HOrd, HOrd)> {
        self.cells.iter().find(|(_, x)| **x == v).map(|(c, _)| *c)
    }

    pub fn left(&self, v: HOrd) -> Option<HOrd> {
        self.cell_of(v).map(|c| c.0)
    }

    pub fn right(&self, v: HOrd) -> Option<HOrd> {
        self.cell_of(v).map(|c| c.1)
    }
}
