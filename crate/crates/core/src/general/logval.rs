//! Exact values `r + Σ q_k log b_k` with rational `r, q_k` and integer bases.
//!
//! Bases are split into primes below 2¹⁶ and the remaining cofactors are
//! kept pairwise coprime, which makes them multiplicatively independent: a
//! value is zero iff its rational part is zero and no log terms remain.
//! Signs of nonzero values are certified with interval bounds on the
//! logarithms, doubling precision until the interval excludes 0.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exact::{fmt_rational, to_f64, Rational};

/// Largest precision tried before giving up on a sign.
pub const MAX_BITS: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogValue {
    rational: Rational,
    logs: BTreeMap<BigInt, Rational>,
}

impl LogValue {
    pub fn zero() -> Self {
        LogValue { rational: Rational::zero(), logs: BTreeMap::new() }
    }

    pub fn rational(q: Rational) -> Self {
        LogValue { rational: q, logs: BTreeMap::new() }
    }

    /// `log(x)` for a positive rational `x`.
    pub fn log(x: &Rational) -> Result<Self> {
        if !x.is_positive() {
            return invalid(format!("log of non-positive {}", fmt_rational(x)));
        }
        let mut v = LogValue::zero();
        v.add_log(x.numer().clone(), Rational::one());
        v.add_log(x.denom().clone(), -Rational::one());
        Ok(v)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.rational
    }

    /// Pairwise coprime bases with their coefficients.
    pub fn log_terms(&self) -> &BTreeMap<BigInt, Rational> {
        &self.logs
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.logs.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.logs.is_empty()
    }

    fn add_log(&mut self, base: BigInt, coef: Rational) {
        if base.is_one() || coef.is_zero() {
            return;
        }
        let (primes, rest) = split_small_primes(base);
        for (pr, e) in primes {
            self.add_coprime(pr, &coef * Rational::from_integer(BigInt::from(e)));
        }
        self.add_coprime(rest, coef);
    }

    fn add_coprime(&mut self, base: BigInt, coef: Rational) {
        let mut pending = vec![(base, coef)];
        while let Some((b, q)) = pending.pop() {
            if b.is_one() || q.is_zero() {
                continue;
            }
            let clash = self.logs.keys().find(|k| !b.gcd(k).is_one()).cloned();
            match clash {
                None => {
                    self.logs.insert(b, q);
                }
                Some(k) if k == b => {
                    let sum = self.logs.remove(&k).expect("present") + q;
                    if !sum.is_zero() {
                        self.logs.insert(k, sum);
                    }
                }
                Some(k) => {
                    // log k = log g + log(k/g), same for b
                    let qk = self.logs.remove(&k).expect("present");
                    let g = b.gcd(&k);
                    pending.push((g.clone(), qk.clone()));
                    pending.push((&k / &g, qk));
                    pending.push((g.clone(), q.clone()));
                    pending.push((&b / &g, q));
                }
            }
        }
    }

    /// `Some(k)` with `self = k · other` when both are pure log terms or
    /// both rational, and proportional.
    pub fn ratio(&self, other: &LogValue) -> Option<Rational> {
        if other.is_zero() {
            return None;
        }
        let k = if let Some((b, q)) = other.logs.iter().next() {
            self.logs.get(b).cloned().unwrap_or_else(Rational::zero) / q
        } else {
            &self.rational / &other.rational
        };
        (self.clone() - other.clone() * &k).is_zero().then_some(k)
    }

    /// Interval containing the value, each log bounded to about `bits` bits.
    pub fn bounds(&self, bits: u64) -> (Rational, Rational) {
        let mut lo = self.rational.clone();
        let mut hi = self.rational.clone();
        for (b, q) in &self.logs {
            let (l, h) = ln_bounds(b, bits);
            if q.is_positive() {
                lo += q * &l;
                hi += q * &h;
            } else {
                lo += q * &h;
                hi += q * &l;
            }
        }
        (lo, hi)
    }

    pub fn to_f64(&self) -> f64 {
        let mut v = to_f64(&self.rational);
        for (b, q) in &self.logs {
            v += to_f64(q) * ln_f64(b);
        }
        v
    }

    /// Certified sign. Exact when the value is rational.
    pub fn signum(&self) -> Result<Ordering> {
        if self.logs.is_empty() {
            return Ok(self.rational.cmp(&Rational::zero()));
        }
        let approx = self.to_f64();
        let scale = self.rational.abs().to_f64().unwrap_or(f64::INFINITY)
            + self.logs.iter().map(|(b, q)| to_f64(&q.abs()) * ln_f64(b)).sum::<f64>();
        if approx.is_finite() && scale.is_finite() && approx.abs() > 1e-9 * (1.0 + scale) {
            return Ok(if approx > 0.0 { Ordering::Greater } else { Ordering::Less });
        }
        let mut bits = 64;
        while bits <= MAX_BITS {
            let (lo, hi) = self.bounds(bits);
            if lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if hi.is_negative() {
                return Ok(Ordering::Less);
            }
            bits *= 2;
        }
        Err(Error::ResourceGuard(format!("sign of {self} not resolved at {MAX_BITS} bits")))
    }

    /// Certified comparison.
    pub fn try_cmp(&self, other: &LogValue) -> Result<Ordering> {
        (self.clone() - other.clone()).signum()
    }
}

impl From<Rational> for LogValue {
    fn from(q: Rational) -> Self {
        LogValue::rational(q)
    }
}

impl Add for LogValue {
    type Output = LogValue;
    fn add(mut self, rhs: LogValue) -> LogValue {
        self.rational += rhs.rational;
        for (b, q) in rhs.logs {
            self.add_log(b, q);
        }
        self
    }
}

impl Add<&Rational> for LogValue {
    type Output = LogValue;
    fn add(mut self, rhs: &Rational) -> LogValue {
        self.rational += rhs;
        self
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        self * &(-Rational::one())
    }
}

impl Sub for LogValue {
    type Output = LogValue;
    fn sub(self, rhs: LogValue) -> LogValue {
        self + (-rhs)
    }
}

impl Mul<&Rational> for LogValue {
    type Output = LogValue;
    fn mul(self, k: &Rational) -> LogValue {
        if k.is_zero() {
            return LogValue::zero();
        }
        LogValue {
            rational: self.rational * k,
            logs: self.logs.into_iter().map(|(b, q)| (b, q * k)).collect(),
        }
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.rational.is_zero() || self.logs.is_empty() {
            parts.push(fmt_rational(&self.rational));
        }
        for (b, q) in &self.logs {
            if q.is_one() {
                parts.push(format!("log({b})"));
            } else {
                parts.push(format!("{}·log({b})", fmt_rational(q)));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for LogValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LogValue", 3)?;
        st.serialize_field("text", &self.to_string())?;
        st.serialize_field("rational", &fmt_rational(&self.rational))?;
        let logs: BTreeMap<String, String> = self.logs.iter().map(|(b, q)| (b.to_string(), fmt_rational(q))).collect();
        st.serialize_field("logs", &logs)?;
        st.end()
    }
}

const SMALL_PRIME_LIMIT: u64 = 1 << 16;

fn split_small_primes(mut n: BigInt) -> (Vec<(BigInt, u32)>, BigInt) {
    let mut out = Vec::new();
    let mut d: u64 = 2;
    while d < SMALL_PRIME_LIMIT {
        let bd = BigInt::from(d);
        if &bd * &bd > n {
            break;
        }
        let mut e = 0;
        while (&n % &bd).is_zero() {
            n /= &bd;
            e += 1;
        }
        if e > 0 {
            out.push((bd, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    // what is left is 1, a prime, or has only factors ≥ 2¹⁶
    if n > BigInt::one() && n < BigInt::from(SMALL_PRIME_LIMIT * SMALL_PRIME_LIMIT) {
        out.push((n, 1));
        n = BigInt::one();
    }
    (out, n)
}

fn ln_f64(b: &BigInt) -> f64 {
    let bits = b.bits();
    if bits < 1000 {
        return b.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (b >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// `2 atanh(z) = ln((1+z)/(1−z))` for `0 ≤ z ≤ 1/3`, bracketed to `2^-bits`.
fn two_atanh_bounds(z: &Rational, bits: u64) -> (Rational, Rational) {
    let z2 = z * z;
    let eps = Rational::new(BigInt::one(), BigInt::one() << bits);
    let mut pow = z.clone();
    let mut sum = Rational::zero();
    let mut k: u64 = 0;
    loop {
        sum += &pow / Rational::from_integer(BigInt::from(2 * k + 1));
        pow *= &z2;
        k += 1;
        // remaining terms ≤ z^{2k+1} / ((2k+1)(1 − z²))
        let tail = &pow / (Rational::from_integer(BigInt::from(2 * k + 1)) * (Rational::one() - &z2));
        if tail < eps || pow.is_zero() {
            let two = Rational::from_integer(BigInt::from(2));
            return round_out(&sum * &two, (sum + tail) * two, bits + 8);
        }
    }
}

fn round_out(lo: Rational, hi: Rational, bits: u64) -> (Rational, Rational) {
    let den = BigInt::one() << bits;
    let l = (lo * Rational::from_integer(den.clone())).floor().to_integer();
    let h = (hi * Rational::from_integer(den.clone())).ceil().to_integer();
    (Rational::new(l, den.clone()), Rational::new(h, den))
}

/// Bracket of `ln b` for an integer `b ≥ 1`.
pub fn ln_bounds(b: &BigInt, bits: u64) -> (Rational, Rational) {
    assert_eq!(b.sign(), Sign::Plus, "ln of non-positive integer");
    let k = b.bits() - 1;
    let pow2 = BigInt::one() << k;
    // b = 2^k · y with 1 ≤ y < 2, z = (y−1)/(y+1) < 1/3
    let z = Rational::new(b - &pow2, b + &pow2);
    let (ly, hy) = two_atanh_bounds(&z, bits + 2);
    if k == 0 {
        return (ly, hy);
    }
    let (l2, h2) = two_atanh_bounds(&Rational::new(BigInt::one(), BigInt::from(3)), bits + 2 + 64 - (k.leading_zeros() as u64));
    let kq = Rational::from_integer(BigInt::from(k));
    (ly + &kq * l2, hy + kq * h2)
}
