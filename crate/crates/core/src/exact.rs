//! Exact rationals, index sets and the symmetric-function kernels.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"num/den"` or an integer. Decimals are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return invalid("empty rational");
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad_rational(s))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad_rational(s))?;
        if d.is_zero() {
            return invalid(format!("zero denominator in {s:?}"));
        }
        Ok(Rational::new(n, d))
    } else {
        let n = BigInt::from_str(t).map_err(|_| bad_rational(s))?;
        Ok(Rational::from_integer(n))
    }
}

/// Like [`parse_rational`] but also accepts finite decimals such as `-5.7`,
/// read exactly (`-57/10`).
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let t = s.trim();
    let Some((int, frac)) = t.split_once('.') else {
        return parse_rational(t);
    };
    if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad_rational(s));
    }
    let neg = int.starts_with('-');
    let int_digits = int.trim_start_matches(['-', '+']);
    if !int_digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad_rational(s));
    }
    let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
    let n = BigInt::from_str(&digits).map_err(|_| bad_rational(s))?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let q = Rational::new(n, d);
    Ok(if neg { -q } else { q })
}

fn bad_rational(s: &str) -> Error {
    Error::Invalid(format!("not a rational: {s:?}"))
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Very large numerator/denominator: scale down by bit length first.
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = (nb - db) - 60;
    let scaled = if shift > 0 {
        q / Rational::from_integer(BigInt::one() << shift as usize)
    } else {
        q * Rational::from_integer(BigInt::one() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

pub fn sign(q: &Rational) -> std::cmp::Ordering {
    if q.is_positive() {
        std::cmp::Ordering::Greater
    } else if q.is_negative() {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Equal
    }
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(fmt_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Sorted, duplicate-free list of 1-based phase indices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Sorts the input; rejects duplicates, zeros and empty input.
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return invalid("empty index set");
        }
        indices.sort_unstable();
        if indices[0] == 0 {
            return invalid("phase indices are 1-based");
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return invalid(format!("duplicate index in {indices:?}"));
        }
        Ok(IndexSet(indices))
    }

    pub fn from_slice(indices: &[usize]) -> Result<Self> {
        Self::new(indices.to_vec())
    }

    /// `{1, …, n}`.
    pub fn range(n: usize) -> Self {
        IndexSet((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    pub fn max(&self) -> usize {
        *self.0.last().expect("non-empty")
    }

    /// The set with its `pos`-th element (0-based) removed.
    pub fn without_position(&self, pos: usize) -> IndexSet {
        let mut v = self.0.clone();
        v.remove(pos);
        IndexSet(v)
    }

    pub fn without(&self, k: usize) -> Option<IndexSet> {
        let pos = self.0.binary_search(&k).ok()?;
        Some(self.without_position(pos))
    }

    pub fn with(&self, k: usize) -> Option<IndexSet> {
        match self.0.binary_search(&k) {
            Ok(_) => None,
            Err(pos) => {
                let mut v = self.0.clone();
                v.insert(pos, k);
                Some(IndexSet(v))
            }
        }
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&k| other.contains(k))
    }

    /// Complement inside `{1, …, total}`.
    pub fn complement(&self, total: usize) -> Vec<usize> {
        (1..=total).filter(|&k| !self.contains(k)).collect()
    }

    /// All subsets of `{1, …, total}` of the given size, lexicographic.
    pub fn all_of_size(total: usize, size: usize) -> Vec<IndexSet> {
        let mut out = Vec::new();
        if size == 0 || size > total {
            return out;
        }
        let mut cur: Vec<usize> = (1..=size).collect();
        loop {
            out.push(IndexSet(cur.clone()));
            let mut i = size;
            while i > 0 && cur[i - 1] == total - size + i {
                i -= 1;
            }
            if i == 0 {
                return out;
            }
            cur[i - 1] += 1;
            for j in i..size {
                cur[j] = cur[j - 1] + 1;
            }
        }
    }
}

impl TryFrom<Vec<usize>> for IndexSet {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        IndexSet::new(v)
    }
}

impl From<IndexSet> for Vec<usize> {
    fn from(s: IndexSet) -> Self {
        s.0
    }
}

impl fmt::Display for IndexSet {
    /// Compact `123` when all indices are single digits, else `1,2,10`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.max() < 10 { "" } else { "," };
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Complete homogeneous symmetric polynomial `h_m(values)`.
///
/// `h_m = 0` for `m < 0` and `h_0 = 1`.
pub fn h_poly(m: i64, values: &[Rational]) -> Result<Rational> {
    if values.is_empty() {
        return invalid("h_poly needs at least one value");
    }
    if m < 0 {
        return Ok(Rational::zero());
    }
    Ok(h_table(m as usize, values).pop().expect("non-empty"))
}

/// `[h_0, h_1, …, h_m]` of the given values.
pub fn h_table(m: usize, values: &[Rational]) -> Vec<Rational> {
    let mut h = vec![Rational::zero(); m + 1];
    h[0] = Rational::one();
    // h_d(x_1..x_k) = h_d(x_1..x_{k-1}) + x_k h_{d-1}(x_1..x_k)
    for x in values {
        for d in 1..=m {
            let prev = &h[d - 1] * x;
            h[d] += prev;
        }
    }
    h
}

/// `∏_{i<j} (v_j − v_i)`.
pub fn vandermonde(values: &[Rational]) -> Rational {
    let mut prod = Rational::one();
    for j in 0..values.len() {
        for i in 0..j {
            prod *= &values[j] - &values[i];
        }
    }
    prod
}

/// Values of `p` at the indices of `s` (1-based).
pub fn pick(p: &[Rational], s: &IndexSet) -> Result<Vec<Rational>> {
    s.iter()
        .map(|k| {
            p.get(k - 1)
                .cloned()
                .ok_or_else(|| Error::Invalid(format!("index {k} out of range 1..={}", p.len())))
        })
        .collect()
}

/// Partial-fraction coefficient `c_S = Σ_i c_{k_i} / ∏_{j≠i}(p_{k_i} − p_{k_j})`.
///
/// For `|S| = 1` this is `c_k` itself.
pub fn c_coeff(p: &[Rational], c: &[Rational], s: &IndexSet) -> Result<Rational> {
    let ps = pick(p, s)?;
    let cs = pick(c, s)?;
    let mut total = Rational::zero();
    for i in 0..ps.len() {
        let mut denom = Rational::one();
        for j in 0..ps.len() {
            if i != j {
                let d = &ps[i] - &ps[j];
                if d.is_zero() {
                    return invalid(format!("repeated p value on {s}"));
                }
                denom *= d;
            }
        }
        total += &cs[i] / denom;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_slice(v).unwrap()
    }

    #[test]
    fn h_poly_small_cases() {
        assert_eq!(h_poly(1, &[rat(3), rat(5)]).unwrap(), rat(8));
        assert_eq!(h_poly(2, &[rat(1), rat(2)]).unwrap(), rat(7));
        let p = q(3, 7);
        assert_eq!(h_poly(2, &[p.clone(), p.clone(), p.clone()]).unwrap(), rat(6) * &p * &p);
        assert_eq!(h_poly(-1, &[rat(4)]).unwrap(), rat(0));
        assert_eq!(h_poly(0, &[rat(4)]).unwrap(), rat(1));
        assert!(h_poly(1, &[]).is_err());
    }

    #[test]
    fn h_poly_matches_monomial_enumeration() {
        // brute force: sum over multisets of size m
        fn brute(m: usize, v: &[Rational], start: usize) -> Rational {
            if m == 0 {
                return rat(1);
            }
            let mut s = rat(0);
            for i in start..v.len() {
                s += &v[i] * brute(m - 1, v, i);
            }
            s
        }
        let v = vec![q(1, 2), q(-3, 4), rat(2), q(5, 3)];
        for m in 0..6 {
            assert_eq!(h_poly(m as i64, &v).unwrap(), brute(m, &v, 0));
        }
    }

    #[test]
    fn vandermonde_small_cases() {
        assert_eq!(vandermonde(&[q(7, 3)]), rat(1));
        assert_eq!(vandermonde(&[rat(1), rat(2), rat(3)]), rat(2));
        assert_eq!(vandermonde(&[rat(1), rat(1), rat(2)]), rat(0));
    }

    #[test]
    fn c_coeff_small_cases() {
        let p = vec![rat(0), rat(1)];
        let c = vec![rat(0), rat(3)];
        assert_eq!(c_coeff(&p, &c, &set(&[1, 2])).unwrap(), rat(3));
        let p = vec![rat(0), rat(1), rat(2)];
        let c = vec![rat(1), rat(0), rat(0)];
        assert_eq!(c_coeff(&p, &c, &set(&[1, 2, 3])).unwrap(), q(1, 2));
        assert_eq!(c_coeff(&p, &c, &set(&[2])).unwrap(), rat(0));
        let zero = vec![rat(0); 3];
        assert_eq!(c_coeff(&p, &zero, &set(&[1, 2, 3])).unwrap(), rat(0));
        let dup = vec![rat(1), rat(1), rat(2)];
        assert!(c_coeff(&dup, &c, &set(&[1, 2])).is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-3/2").unwrap(), q(-3, 2));
        assert_eq!(parse_rational("10").unwrap(), rat(10));
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(parse_decimal("-5.7").unwrap(), q(-57, 10));
        assert_eq!(parse_decimal("-.5").unwrap(), q(-1, 2));
        assert_eq!(parse_decimal("3").unwrap(), rat(3));
        assert_eq!(fmt_rational(&q(6, -4)), "-3/2");
        assert_eq!(fmt_rational(&rat(4)), "4");
    }

    #[test]
    fn index_set_basics() {
        let s = set(&[3, 1, 2]);
        assert_eq!(s.as_slice(), &[1, 2, 3]);
        assert_eq!(s.to_string(), "123");
        assert_eq!(set(&[1, 10]).to_string(), "1,10");
        assert!(IndexSet::new(vec![1, 1]).is_err());
        assert_eq!(IndexSet::all_of_size(5, 3).len(), 10);
        assert_eq!(s.without(2).unwrap(), set(&[1, 3]));
        assert_eq!(s.with(5).unwrap(), set(&[1, 2, 3, 5]));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-40i64..40, 1i64..12).prop_map(|(n, d)| ratio(n, d))
    }

    /// Distinct p values plus arbitrary c values, length n.
    fn arb_pc(n: usize) -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
        (
            proptest::collection::btree_set((-60i64..60, 1i64..6).prop_map(|(a, b)| ratio(a, b)), n),
            proptest::collection::vec(arb_rational(), n),
        )
            .prop_filter_map("need n distinct p", move |(ps, cs)| {
                let ps: Vec<Rational> = ps.into_iter().collect();
                (ps.len() == n).then_some((ps, cs))
            })
    }

    proptest! {
        #[test]
        fn c_coeff_recursion((p, c) in arb_pc(6), n in 2usize..=6, i in 0usize..6, j in 0usize..6) {
            let s = IndexSet::range(n);
            let (i, j) = (i % n, j % n);
            prop_assume!(i != j);
            let lhs = c_coeff(&p, &c, &s).unwrap();
            let ci = c_coeff(&p, &c, &s.without_position(i)).unwrap();
            let cj = c_coeff(&p, &c, &s.without_position(j)).unwrap();
            let rhs = (ci - cj) / (&p[j] - &p[i]);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn c_coeff_substitution_law((p, c) in arb_pc(6), n in 1usize..=6, r in 0usize..8, s in arb_rational()) {
            let set = IndexSet::range(n);
            let c2: Vec<Rational> = c.iter().zip(&p).map(|(ck, pk)| ck + num_traits::pow(pk.clone(), r) * &s).collect();
            let shift = h_poly(r as i64 - n as i64 + 1, &p[..n]).unwrap() * &s;
            prop_assert_eq!(c_coeff(&p, &c2, &set).unwrap(), c_coeff(&p, &c, &set).unwrap() + shift);
        }

        #[test]
        fn c_coeff_is_symmetric((p, c) in arb_pc(5), perm in Just(()).prop_perturb(|_, mut rng| {
            let mut v: Vec<usize> = (0..5).collect();
            for i in (1..5).rev() { v.swap(i, (rng.next_u32() as usize) % (i + 1)); }
            v
        })) {
            let s = IndexSet::range(5);
            let pp: Vec<Rational> = perm.iter().map(|&i| p[i].clone()).collect();
            let cc: Vec<Rational> = perm.iter().map(|&i| c[i].clone()).collect();
            prop_assert_eq!(c_coeff(&p, &c, &s).unwrap(), c_coeff(&pp, &cc, &s).unwrap());
        }

        /// c_S equals κ/Δ: the coefficient of the top power in the
        /// polynomial interpolating (p_k, c_k), obtained by solving the
        /// Vandermonde system exactly.
        #[test]
        fn c_coeff_matches_linear_solve((p, c) in arb_pc(6), n in 1usize..=6) {
            let a: Vec<Vec<Rational>> = (0..n)
                .map(|i| (0..n).map(|r| num_traits::pow(p[i].clone(), r)).collect())
                .collect();
            let b: Vec<Rational> = c[..n].to_vec();
            let sol = linalg::solve(&a, &b).unwrap();
            prop_assert_eq!(sol[n - 1].clone(), c_coeff(&p, &c, &IndexSet::range(n)).unwrap());
        }
    }
}
