//! Small shared integer utilities: integer square roots, prime generation,
//! valuations, and quadratic characters.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

/// Floor of the square root of a nonnegative `i64`.
pub fn isqrt64(n: i64) -> i64 {
    debug_assert!(n >= 0);
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r > 0 && r.checked_mul(r).map_or(true, |v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |v| v <= n) {
        r += 1;
    }
    r
}

/// Floor of the square root of a nonnegative `i128`.
pub fn isqrt128(n: i128) -> i128 {
    debug_assert!(n >= 0);
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r > 0 && r.checked_mul(r).map_or(true, |v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |v| v <= n) {
        r += 1;
    }
    r
}

/// Exact square test; returns the nonnegative root when `n` is a perfect square.
pub fn exact_sqrt64(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    // Squares mod 64 are sparse; cheap rejection before isqrt.
    const OK: [bool; 64] = {
        let mut t = [false; 64];
        let mut i = 0;
        while i < 64 {
            t[(i * i) % 64] = true;
            i += 1;
        }
        t
    };
    if !OK[(n % 64) as usize] {
        return None;
    }
    let r = isqrt64(n);
    if r * r == n {
        Some(r)
    } else {
        None
    }
}

/// Exact square test on `i128`.
pub fn exact_sqrt128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt128(n);
    if r * r == n {
        Some(r)
    } else {
        None
    }
}

/// All primes up to `limit` inclusive, by a sieve of Eratosthenes.
pub fn primes_upto(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return vec![];
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest prime factor table for `0..=limit`; `spf[0] = spf[1] = 0`.
pub fn spf_table(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// p-adic valuation of a nonzero `u64`.
pub fn val_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// p-adic valuation of a nonzero `BigInt`.
pub fn val_big(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if r.is_zero() {
            n = q;
            v += 1;
        } else {
            return v;
        }
    }
}

/// `base^exp` as `u128` with overflow panic (desk-scale exponents only).
pub fn pow_u128(base: u64, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128).expect("pow_u128 overflow");
    }
    acc
}

/// `base^exp` as `BigInt`.
pub fn pow_big(base: u64, exp: u32) -> BigInt {
    num_traits::pow::pow(BigInt::from(base), exp as usize)
}

/// Modular exponentiation on `u64` via 128-bit intermediates.
pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Modular inverse of `a` mod `m` (gcd(a, m) = 1), by extended Euclid.
pub fn inv_mod(a: i128, m: i128) -> i128 {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    assert!(old_r == 1, "inv_mod: arguments not coprime");
    old_s.rem_euclid(m)
}

/// Legendre symbol (a/p) for odd prime p: +1, -1, or 0.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = (a.rem_euclid(p as i64)) as u64;
    if a == 0 {
        return 0;
    }
    let e = pow_mod(a, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Quadratic character of a `BigInt` mod an odd prime.
pub fn legendre_big(a: &BigInt, p: u64) -> i32 {
    let r = a.mod_floor(&BigInt::from(p)).to_i64().unwrap();
    legendre(r, p)
}

/// True when `n` is prime (deterministic Miller–Rabin for u64).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This base set is a proven deterministic test for all n < 3.3 * 10^24.
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`, if it fits in u64.
pub fn next_prime(mut n: u64) -> Option<u64> {
    loop {
        n = n.checked_add(1)?;
        if is_prime_u64(n) {
            return Some(n);
        }
    }
}
