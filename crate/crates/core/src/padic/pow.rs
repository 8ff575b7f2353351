use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

thread_local! {
    static POWERS: RefCell<HashMap<u64, Vec<BigUint>>> = RefCell::new(HashMap::new());
}

/// `p^k`, memoized per thread.
pub(crate) fn pow(p: u64, k: i64) -> BigUint {
    debug_assert!(k >= 0);
    let k = k as usize;
    POWERS.with(|cell| {
        let mut map = cell.borrow_mut();
        let table = map.entry(p).or_insert_with(|| vec![BigUint::one()]);
        while table.len() <= k {
            let next = table.last().unwrap() * p;
            table.push(next);
        }
        table[k].clone()
    })
}

/// Splits `n = p^v * m` with `p ∤ m`. `n` must be nonzero.
pub(crate) fn split_p(mut n: BigUint, p: u64) -> (i64, BigUint) {
    debug_assert!(!n.is_zero());
    if p == 2 {
        let tz = n.trailing_zeros().unwrap_or(0);
        return (tz as i64, n >> tz);
    }
    let pb = BigUint::from(p);
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
