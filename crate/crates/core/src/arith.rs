//! Modular arithmetic on 64-bit moduli.
//!
//! Residues and moduli are `u64`; every product goes through a `u128`
//! intermediate, so nothing here can wrap. Exact integer sums that may grow
//! past 64 bits (Gram entries, lag sums) live in [`num_bigint::BigUint`] and
//! are reduced with [`big_mod`].

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;

use crate::error::{NhtError, Result};

/// A modulus `q >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Modulus(u64);

impl Modulus {
    pub fn new(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(NhtError::InvalidModulus(q));
        }
        Ok(Self(q))
    }

    /// Narrows an exact integer to a modulus, failing when it needs more than 64 bits.
    pub fn from_big(q: &BigUint) -> Result<Self> {
        let q = q
            .to_u64()
            .ok_or_else(|| NhtError::ModulusTooLarge(q.to_string()))?;
        Self::new(q)
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.0
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.0 as u128) as u64
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.0)
    }

    pub fn pow(self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.0)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `a mod q` for an exact integer.
pub fn big_mod(a: &BigUint, q: Modulus) -> u64 {
    (a % q.get())
        .to_u64()
        .expect("remainder below a 64-bit modulus fits in 64 bits")
}

/// Euclid's algorithm on exact integers, with `gcd(0, x) = x`.
pub fn gcd_big(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Multiplicative inverse of `a` modulo `q` by the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, q: Modulus) -> Result<u64> {
    let m = q.get() as i128;
    let (mut old_r, mut r) = ((a % q.get()) as i128, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quotient = old_r / r;
        (old_r, r) = (r, old_r - quotient * r);
        (old_s, s) = (s, old_s - quotient * s);
    }
    if old_r != 1 {
        return Err(NhtError::NonInvertible {
            value: a,
            modulus: q.get(),
        });
    }
    Ok(old_s.rem_euclid(m) as u64)
}

// Witness set that is deterministic for every n < 2^64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller–Rabin. Exact for the whole `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Both square roots of `a` modulo a prime `q`, smaller first.
///
/// Tonelli–Shanks. Returns `None` when `a` is a quadratic non-residue; for
/// `a ≡ 0` the pair is `(0, 0)`.
pub fn sqrt_mod_prime(a: u64, q: Modulus) -> Result<Option<(u64, u64)>> {
    let p = q.get();
    if !is_prime(p) {
        return Err(NhtError::CompositeModulus(p));
    }
    let a = a % p;
    if a == 0 {
        return Ok(Some((0, 0)));
    }
    if p == 2 {
        return Ok(Some((a, a)));
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return Ok(None);
    }

    let root = if p % 4 == 3 {
        pow_mod(a, (p + 1) / 4, p)
    } else {
        let mut odd = p - 1;
        let mut twos = 0u32;
        while odd.is_multiple_of(2) {
            odd /= 2;
            twos += 1;
        }
        let mut z = 2;
        while pow_mod(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = twos;
        let mut c = pow_mod(z, odd, p);
        let mut t = pow_mod(a, odd, p);
        let mut x = pow_mod(a, odd.div_ceil(2), p);
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mul_mod(t2, t2, p);
                i += 1;
            }
            let b = pow_mod(c, 1 << (m - i - 1), p);
            m = i;
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            x = mul_mod(x, b, p);
        }
        x
    };
    let other = p - root;
    Ok(Some((root.min(other), root.max(other))))
}

/// Prime factorization as `(prime, exponent)` pairs in ascending order.
///
/// Complete for every `x < 2^64`: trial division by small primes, then
/// Pollard's rho (Brent variant) with Miller–Rabin on the cofactors.
pub fn factorize(x: u64) -> Result<Vec<(u64, u32)>> {
    if x == 0 {
        return Err(NhtError::ZeroFactorization);
    }
    let mut primes = Vec::new();
    let mut rest = x;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
    }
    split(rest, &mut primes);
    primes.sort_unstable();

    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

fn split(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split(d, out);
    split(n / d, out);
}

// n is odd, composite and free of factors below 50.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut r = 1u64;
        let mut q = 1u64;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}
