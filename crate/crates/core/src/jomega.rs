//! The countable algebra J_ω on the natural numbers.
//!
//! Pairing is the Cantor diagonal enumeration with three seed cells
//! swapped around so that 0, 1 and 2 also get preimages:
//! `(0,0) ↦ 1`, `(0,1) ↦ 2`, `(1,0) ↦ 0`, and otherwise
//! `(p,q) ↦ (p+q+1)(p+q)/2 + q`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::{AlgebraError, JtAlgebra};
use crate::exec::Exec;

/// Integer square root by Newton iteration.
pub fn isqrt(n: &BigUint) -> BigUint {
    if n.is_zero() {
        return BigUint::zero();
    }
    let mut x = BigUint::one() << n.bits().div_ceil(2);
    loop {
        let y = (&x + n / &x) >> 1u32;
        if y >= x {
            return x;
        }
        x = y;
    }
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let bits = 128 - n.leading_zeros();
    let mut x: u128 = 1 << bits.div_ceil(2);
    loop {
        let y = (x + n / x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

fn seed(p: u64, q: u64) -> Option<u64> {
    match (p, q) {
        (0, 0) => Some(1),
        (0, 1) => Some(2),
        (1, 0) => Some(0),
        _ => None,
    }
}

fn seed_inverse(n: u64) -> Option<(u64, u64)> {
    match n {
        0 => Some((1, 0)),
        1 => Some((0, 0)),
        2 => Some((0, 1)),
        _ => None,
    }
}

pub fn jw_mul(p: &BigUint, q: &BigUint) -> BigUint {
    if let (Some(a), Some(b)) = (p.to_u64(), q.to_u64()) {
        if let Some(v) = seed(a, b) {
            return BigUint::from(v);
        }
        let d = a as u128 + b as u128;
        if let Some(t) = (d + 1).checked_mul(d) {
            return BigUint::from(t / 2 + b as u128);
        }
    }
    let d = p + q;
    (((&d + 1u32) * &d) >> 1u32) + q
}

/// Fast path of [`jw_mul`]; `None` if the result does not fit in a `u64`.
pub fn jw_mul_u64(p: u64, q: u64) -> Option<u64> {
    if let Some(v) = seed(p, q) {
        return Some(v);
    }
    let d = p as u128 + q as u128;
    let t = (d + 1).checked_mul(d)? / 2 + q as u128;
    u64::try_from(t).ok()
}

pub fn jw_unpair(n: &BigUint) -> (BigUint, BigUint) {
    if let Some(v) = n.to_u64() {
        let (p, q) = jw_unpair_u64(v);
        return (BigUint::from(p), BigUint::from(q));
    }
    let d = (isqrt(&((n << 3u32) + 1u32)) - 1u32) >> 1u32;
    let q = n - ((&d * (&d + 1u32)) >> 1u32);
    let p = &d - &q;
    (p, q)
}

pub fn jw_unpair_u64(n: u64) -> (u64, u64) {
    if let Some(pq) = seed_inverse(n) {
        return pq;
    }
    let n = n as u128;
    let d = (isqrt_u128(8 * n + 1) - 1) / 2;
    let q = n - d * (d + 1) / 2;
    ((d - q) as u64, q as u64)
}

/// `n, l(n), l(l(n)), …` down to and including 0.
pub fn jw_descent(n: &BigUint) -> Vec<BigUint> {
    let mut out = vec![n.clone()];
    let mut cur = n.clone();
    while !cur.is_zero() {
        cur = jw_unpair(&cur).0;
        out.push(cur.clone());
    }
    out
}

pub fn jw_table(rows: u64, cols: u64) -> Vec<Vec<BigUint>> {
    (0..rows)
        .map(|p| (0..cols).map(|q| jw_mul(&BigUint::from(p), &BigUint::from(q))).collect())
        .collect()
}

/// The 5×5 upper-left block of the multiplication table.
pub const TABLE_5X5: [[u64; 5]; 5] = [
    [1, 2, 5, 9, 14],
    [0, 4, 8, 13, 19],
    [3, 7, 12, 18, 25],
    [6, 11, 17, 24, 32],
    [10, 16, 23, 31, 40],
];

#[derive(Clone, Debug, Serialize)]
pub struct JwFailure {
    pub check: &'static str,
    pub witness: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct JwReport {
    pub bound: u64,
    pub pair_bound: u64,
    pub values_checked: u64,
    pub pairs_checked: u64,
    pub failure_count: u64,
    /// At most [`JwReport::MAX_LISTED`] failures are listed.
    pub failures: Vec<JwFailure>,
}

impl JwReport {
    pub const MAX_LISTED: usize = 32;

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

const CHUNK: u64 = 4096;

/// Verifies the bijection and regressivity on `0..=bound` and the inverse
/// law on all pairs with `p + q <= pair_bound`, plus the fixed 5×5 block.
pub fn jw_verify(bound: u64, pair_bound: u64, exec: Exec) -> JwReport {
    let mut failures = Vec::new();
    let mut count = 0u64;
    let mut record = |f: Vec<JwFailure>, n: u64| {
        count += n;
        for x in f {
            if failures.len() < JwReport::MAX_LISTED {
                failures.push(x);
            }
        }
    };

    for (p, row) in TABLE_5X5.iter().enumerate() {
        for (q, &want) in row.iter().enumerate() {
            let got = jw_mul_u64(p as u64, q as u64);
            if got != Some(want) {
                record(
                    vec![JwFailure {
                        check: "table",
                        witness: format!("({p},{q}) gives {got:?}, expected {want}"),
                    }],
                    1,
                );
            }
        }
    }

    let chunks = bound / CHUNK + 1;
    let values = exec.map(chunks as usize, |c| {
        let lo = c as u64 * CHUNK;
        let hi = (lo + CHUNK - 1).min(bound);
        let mut f = Vec::new();
        let mut n_fail = 0u64;
        for n in lo..=hi {
            let (p, q) = jw_unpair_u64(n);
            if jw_mul_u64(p, q) != Some(n) {
                n_fail += 1;
                f.push(JwFailure {
                    check: "mul_unpair",
                    witness: n.to_string(),
                });
            }
            if n >= 1 && (p >= n || q >= n) {
                n_fail += 1;
                f.push(JwFailure {
                    check: "regressive",
                    witness: n.to_string(),
                });
            }
            f.truncate(JwReport::MAX_LISTED);
        }
        (f, n_fail)
    });
    for (f, n) in values {
        record(f, n);
    }

    let diagonals = exec.map(pair_bound as usize + 1, |d| {
        let d = d as u64;
        let mut f = Vec::new();
        let mut n_fail = 0u64;
        for p in 0..=d {
            let q = d - p;
            let ok = jw_mul_u64(p, q).map(jw_unpair_u64) == Some((p, q));
            if !ok {
                n_fail += 1;
                if f.len() < JwReport::MAX_LISTED {
                    f.push(JwFailure {
                        check: "unpair_mul",
                        witness: format!("({p},{q})"),
                    });
                }
            }
        }
        (f, n_fail)
    });
    for (f, n) in diagonals {
        record(f, n);
    }

    let pairs = (pair_bound as u128 + 1) * (pair_bound as u128 + 2) / 2;
    JwReport {
        bound,
        pair_bound,
        values_checked: bound + 1,
        pairs_checked: pairs.min(u64::MAX as u128) as u64,
        failure_count: count,
        failures,
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct JOmega;

impl JtAlgebra for JOmega {
    type Elem = BigUint;

    fn carrier_name(&self) -> &str {
        "J_omega"
    }

    fn mul(&self, p: &BigUint, q: &BigUint) -> BigUint {
        jw_mul(p, q)
    }

    fn left(&self, v: &BigUint) -> BigUint {
        jw_unpair(v).0
    }

    fn right(&self, v: &BigUint) -> BigUint {
        jw_unpair(v).1
    }

    fn probe(&self, index: usize) -> Option<BigUint> {
        Some(BigUint::from(index))
    }

    fn parse_element(&self, text: &str) -> Result<BigUint, AlgebraError> {
        let t = text.trim();
        if !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()) {
            if let Ok(v) = t.parse() {
                return Ok(v);
            }
        }
        Err(AlgebraError::CarrierMismatch {
            carrier: self.carrier_name().to_string(),
            value: text.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn seeds_and_formula() {
        assert_eq!(jw_mul(&b(0), &b(0)), b(1));
        assert_eq!(jw_mul(&b(0), &b(1)), b(2));
        assert_eq!(jw_mul(&b(1), &b(0)), b(0));
        assert_eq!(jw_mul(&b(3), &b(4)), b(32));
        assert_eq!(jw_unpair(&b(13)), (b(1), b(3)));
        assert_eq!(jw_unpair(&b(23)), (b(4), b(2)));
        assert_eq!(jw_unpair(&b(0)), (b(1), b(0)));
        for (p, row) in TABLE_5X5.iter().enumerate() {
            for (q, &v) in row.iter().enumerate() {
                assert_eq!(jw_mul_u64(p as u64, q as u64), Some(v));
            }
        }
    }

    #[test]
    fn isqrt_is_floor() {
        for n in 0u128..5000 {
            let r = isqrt_u128(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "{n}");
            assert_eq!(isqrt(&BigUint::from(n)), BigUint::from(r));
        }
        let big = (BigUint::one() << 200u32) - 1u32;
        let r = isqrt(&big);
        assert!(&r * &r <= big && (&r + 1u32) * (&r + 1u32) > big);
        assert_eq!(isqrt_u128(u128::MAX), u64::MAX as u128);
    }

    #[test]
    fn big_round_trip() {
        let p = BigUint::parse_bytes(b"123456789012345678901234567890", 10).unwrap();
        let q = BigUint::parse_bytes(b"987654321098765432109876543210", 10).unwrap();
        let n = jw_mul(&p, &q);
        assert_eq!(jw_unpair(&n), (p, q));
        assert_eq!(jw_mul_u64(u64::MAX, 1), None);
        let n = jw_mul(&b(u64::MAX), &b(7));
        assert_eq!(jw_unpair(&n), (b(u64::MAX), b(7)));
    }

    #[test]
    fn descent_reaches_seed() {
        assert_eq!(jw_descent(&b(13)), vec![b(13), b(1), b(0)]);
        assert_eq!(jw_descent(&b(0)), vec![b(0)]);
        assert_eq!(jw_descent(&b(40)), vec![b(40), b(4), b(1), b(0)]);
        let d = jw_descent(&b(1_000_000));
        assert_eq!(*d.last().unwrap(), b(0));
        assert!(d.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn verify_small() {
        for exec in [Exec::Sequential, Exec::Parallel] {
            let r = jw_verify(10_000, 200, exec);
            assert!(r.passed(), "{:?}", r.failures);
            assert_eq!(r.values_checked, 10_001);
            assert_eq!(r.pairs_checked, 201 * 202 / 2);
        }
    }

    #[test]
    fn parse_rejects_ordinals() {
        assert_eq!(JOmega.parse_element("42").unwrap(), b(42));
        assert!(JOmega.parse_element("w+1").is_err());
        assert!(JOmega.parse_element("").is_err());
    }
}
