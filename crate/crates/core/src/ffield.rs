//! Prime-field arithmetic contexts: primitive root, discrete logarithms,
//! the quadratic character, multiplicative characters and Gauss sums.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{FftNum, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest prime served by the cached Gauss-sum table.
pub const MAX_DIRECT_PRIME: u64 = 1_000_000;

/// Deterministic primality check by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo the prime `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Index `j` of the character `omega^j`, reduced modulo `p - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CharacterIndex(u32);

impl CharacterIndex {
    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_trivial(self) -> bool {
        self.0 == 0
    }
}

/// Immutable per-prime context. Shared freely between workers.
#[derive(Clone, Debug)]
pub struct PrimeFieldContext {
    p: u32,
    g: u32,
    dlog: Vec<u32>,
    quadchar: Vec<i8>,
}

/// Builds the context for the prime `p`, choosing the smallest primitive root.
pub fn build_field(p: u64) -> Result<PrimeFieldContext> {
    if p < 5 {
        return Err(Error::TooSmall(p));
    }
    if !is_prime(p) {
        return Err(Error::CompositeInput(p));
    }
    if p > u32::MAX as u64 {
        return Err(Error::InvalidInput(format!("prime {p} exceeds the 32-bit table range")));
    }
    let order = p - 1;
    let factors = prime_divisors(order);
    let g = (2..p)
        .find(|&c| factors.iter().all(|&q| pow_mod(c, order / q, p) != 1))
        .expect("every prime has a primitive root");

    let mut dlog = vec![0u32; p as usize];
    let mut x = 1u64;
    for k in 0..order {
        dlog[x as usize] = k as u32;
        x = x * g % p;
    }
    debug_assert_eq!(x, 1);

    let mut quadchar = vec![0i8; p as usize];
    for (v, q) in quadchar.iter_mut().enumerate().skip(1) {
        *q = if dlog[v].is_multiple_of(2) { 1 } else { -1 };
    }
    Ok(PrimeFieldContext { p: p as u32, g: g as u32, dlog, quadchar })
}

impl PrimeFieldContext {
    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn primitive_root(&self) -> u64 {
        self.g as u64
    }

    /// Order of the multiplicative group, `p - 1`.
    pub fn group_order(&self) -> u64 {
        self.p as u64 - 1
    }

    /// Discrete logarithm base `g`; `None` at zero.
    pub fn dlog(&self, x: u64) -> Option<u32> {
        let x = (x % self.p as u64) as usize;
        (x != 0).then(|| self.dlog[x])
    }

    /// Legendre symbol of `x`.
    pub fn quadchar(&self, x: u64) -> i8 {
        self.quadchar[(x % self.p as u64) as usize]
    }

    /// Full quadratic-character table, indexed by residue.
    pub fn quadchar_table(&self) -> &[i8] {
        &self.quadchar
    }

    pub fn character(&self, j: i64) -> CharacterIndex {
        CharacterIndex(j.rem_euclid(self.group_order() as i64) as u32)
    }

    /// Character index of `omega^(q * e)` for a rational exponent `e` with
    /// `q * e` integral (q = p - 1).
    pub fn character_of_fraction(&self, num: i64, den: i64) -> Option<CharacterIndex> {
        let q = self.group_order() as i128;
        let scaled = q * num as i128;
        (scaled % den as i128 == 0)
            .then(|| CharacterIndex((scaled / den as i128).rem_euclid(q) as u32))
    }

    /// `omega^j(x) = exp(2 pi i j dlog(x) / (p - 1))`, zero at `x = 0`.
    pub fn char_eval<T: Real>(&self, j: CharacterIndex, x: u64) -> Complex<T> {
        match self.dlog(x) {
            None => Complex::new(T::zero(), T::zero()),
            Some(ind) => {
                let q = self.group_order();
                let r = (j.0 as u64 * ind as u64) % q;
                unit_root(r, q)
            }
        }
    }

    /// Gauss sum `g(omega^j) = sum_{x != 0} omega^j(x) zeta_p^x`, by direct summation.
    pub fn gauss_sum<T: Real>(&self, j: CharacterIndex) -> Complex<T> {
        let p = self.p();
        let mut acc = Complex::new(T::zero(), T::zero());
        for x in 1..p {
            acc = acc + self.char_eval::<T>(j, x) * unit_root::<T>(x, p);
        }
        acc
    }
}

/// `exp(2 pi i r / n)` with the angle reduced exactly before conversion.
fn unit_root<T: Real>(r: u64, n: u64) -> Complex<T> {
    let r = r % n;
    let theta = T::TAU() * (T::from_u64(r).unwrap() / T::from_u64(n).unwrap());
    Complex::new(theta.cos(), theta.sin())
}

/// All `p - 1` Gauss sums of a field, computed with one length-(p-1) DFT.
///
/// `g(omega^j) = sum_k exp(2 pi i j k / (p-1)) zeta_p^(g^k)`, which is an
/// unnormalized inverse DFT of the sequence `k -> zeta_p^(g^k)`.
#[derive(Clone, Debug)]
pub struct GaussTable<T> {
    values: Arc<[Complex<T>]>,
}

impl<T: Real + FftNum> GaussTable<T> {
    pub fn new(ctx: &PrimeFieldContext) -> Result<Self> {
        let p = ctx.p();
        if p > MAX_DIRECT_PRIME {
            return Err(Error::InvalidInput(format!(
                "Gauss-sum table limited to p <= {MAX_DIRECT_PRIME}, got {p}"
            )));
        }
        let q = ctx.group_order() as usize;
        let g = ctx.primitive_root();
        let mut buf = Vec::with_capacity(q);
        let mut x = 1u64;
        for _ in 0..q {
            buf.push(unit_root::<T>(x, p));
            x = x * g % p;
        }
        FftPlanner::<T>::new().plan_fft_inverse(q).process(&mut buf);
        Ok(Self { values: buf.into() })
    }

    pub fn get(&self, j: CharacterIndex) -> Complex<T> {
        self.values[j.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
