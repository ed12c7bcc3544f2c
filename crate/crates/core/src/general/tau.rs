//! Wedge-product τ-functions `f₁ ∧ ⋯ ∧ f_n` over the exponentials `e_j`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{vandermonde, IndexSet, Rational};
use crate::general::LogValue;
use crate::model::SolitonConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub index: usize,
    pub sign: i8,
}

/// `f_i = Σ_j ε_ij e_j`, one list of nonzero entries per factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WedgeSpec {
    pub factors: Vec<Vec<FactorEntry>>,
}

impl WedgeSpec {
    /// From signed indices: `[[1, 2], [3, -4]]` is `(e₁+e₂)∧(e₃−e₄)`.
    pub fn from_signed(factors: &[&[i64]]) -> Self {
        let factors = factors
            .iter()
            .map(|f| {
                f.iter()
                    .map(|&k| FactorEntry { index: k.unsigned_abs() as usize, sign: if k < 0 { -1 } else { 1 } })
                    .collect()
            })
            .collect();
        WedgeSpec { factors }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("wedge spec: {e}")))
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn validate(&self, phases: usize) -> Result<()> {
        if self.factors.is_empty() {
            return invalid("wedge spec has no factors");
        }
        let mut seen = BTreeMap::new();
        for (i, f) in self.factors.iter().enumerate() {
            if f.is_empty() {
                return invalid(format!("factor {} is empty", i + 1));
            }
            for e in f {
                if e.sign != 1 && e.sign != -1 {
                    return invalid(format!("factor {}: sign {} not ±1", i + 1, e.sign));
                }
                if e.index == 0 || e.index > phases {
                    return invalid(format!("factor {}: index {} outside 1..={phases}", i + 1, e.index));
                }
                if let Some(j) = seen.insert(e.index, i) {
                    return invalid(format!("factors {} and {} share e_{}", j + 1, i + 1, e.index));
                }
            }
        }
        Ok(())
    }
}

/// `θ_K = Σ_{k∈K} θ_k + log|A| + shift`, linear in `t⁽¹⁾ … t⁽ᴺ⁾`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneralPhase {
    pub key: IndexSet,
    #[serde(with = "crate::exact::serde_rational_vec")]
    pub linear: Vec<Rational>,
    pub constant: LogValue,
}

impl GeneralPhase {
    /// Value at `t⁽¹⁾ … t⁽ᴺ⁾`; missing trailing coordinates count as zero.
    pub fn eval(&self, coords: &[LogValue]) -> LogValue {
        let mut v = self.constant.clone();
        for (a, t) in self.linear.iter().zip(coords) {
            v = v + t.clone() * a;
        }
        v
    }

    pub fn eval_rational(&self, coords: &[Rational]) -> Rational {
        self.linear.iter().zip(coords).map(|(a, t)| a * t).sum()
    }
}

/// `a − b` at a point, with certified sign.
pub fn compare_phases(a: &GeneralPhase, b: &GeneralPhase, coords: &[LogValue]) -> Result<Ordering> {
    if a == b {
        return Ok(Ordering::Equal);
    }
    a.eval(coords).try_cmp(&b.eval(coords))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TauTerm {
    pub key: IndexSet,
    /// `A_K`; sign decides regularity.
    #[serde(with = "crate::exact::serde_rational")]
    pub coeff: Rational,
    /// Extra constant `log b` picked up in `p`-limits.
    #[serde(with = "crate::exact::serde_rational")]
    pub shift: Rational,
    pub phase: GeneralPhase,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneralTau {
    #[serde(skip)]
    pub config: SolitonConfig,
    /// Subset size `n`.
    pub n: usize,
    /// Sorted by key. A key may repeat after a `p`-limit; the repeats share
    /// their linear part and differ in the constant.
    pub terms: Vec<TauTerm>,
    pub regular: bool,
}

fn linear_part(config: &SolitonConfig, key: &IndexSet) -> Vec<Rational> {
    let mut lin = vec![Rational::zero(); config.horizon()];
    for k in key.iter() {
        let p = config.p_at(k);
        let mut pow = Rational::one();
        for slot in lin.iter_mut() {
            pow *= p;
            *slot += &pow;
        }
    }
    lin
}

fn make_term(config: &SolitonConfig, key: IndexSet, coeff: Rational, shift: Rational) -> Result<TauTerm> {
    let lin = linear_part(config, &key);
    let c: Rational = key.iter().map(|k| config.c()[k - 1].clone()).sum();
    let frozen: Rational = (4..=config.horizon()).map(|r| &lin[r - 1] * config.time(r)).sum();
    let constant = LogValue::log(&coeff.abs())? + &(c + &shift + frozen);
    let phase = GeneralPhase { key: key.clone(), linear: lin, constant };
    Ok(TauTerm { key, coeff, shift, phase })
}

/// Phases are functions of `x, y, t` only: higher times are folded into the constants.
fn finish(config: SolitonConfig, n: usize, mut terms: Vec<TauTerm>) -> Result<GeneralTau> {
    if terms.is_empty() {
        return invalid("τ vanishes identically");
    }
    for t in &mut terms {
        t.phase.linear.truncate(3);
    }
    terms.sort_by(|a, b| a.key.cmp(&b.key).then_with(|| a.shift.cmp(&b.shift)));
    let regular = terms.iter().all(|t| !t.coeff.is_negative());
    Ok(GeneralTau { config, n, terms, regular })
}

fn sub_vandermonde(config: &SolitonConfig, key: &IndexSet) -> Rational {
    let ps: Vec<Rational> = key.iter().map(|k| config.p_at(k).clone()).collect();
    vandermonde(&ps)
}

/// Expands the wedge product: `A_K = ε_{1k₁} ⋯ ε_{nk_n} Δ(p_{k₁}, …, p_{k_n})`.
pub fn build_tau(config: &SolitonConfig, spec: &WedgeSpec) -> Result<GeneralTau> {
    spec.validate(config.phases())?;
    let mut acc: BTreeMap<IndexSet, Rational> = BTreeMap::new();
    let mut choice = vec![0usize; spec.n()];
    loop {
        let picks: Vec<FactorEntry> = choice.iter().zip(&spec.factors).map(|(&c, f)| f[c]).collect();
        let ps: Vec<Rational> = picks.iter().map(|e| config.p_at(e.index).clone()).collect();
        let sign: i64 = picks.iter().map(|e| e.sign as i64).product();
        let key = IndexSet::new(picks.iter().map(|e| e.index).collect())?;
        *acc.entry(key).or_insert_with(Rational::zero) += vandermonde(&ps) * Rational::from_integer(sign.into());
        // odometer over factor choices
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                let terms = acc
                    .into_iter()
                    .filter(|(_, a)| !a.is_zero())
                    .map(|(k, a)| make_term(config, k, a, Rational::zero()))
                    .collect::<Result<Vec<_>>>()?;
                return finish(config.clone(), spec.n(), terms);
            }
            choice[pos] += 1;
            if choice[pos] < spec.factors[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Re-keys every term to the complement of its index set, keeping `A`.
pub fn dual_tau(tau: &GeneralTau) -> Result<GeneralTau> {
    let total = tau.config.phases();
    let terms = tau
        .terms
        .iter()
        .map(|t| make_term(&tau.config, IndexSet::new(t.key.complement(total))?, t.coeff.clone(), t.shift.clone()))
        .collect::<Result<Vec<_>>>()?;
    finish(tau.config.clone(), total - tau.n, terms)
}

/// The limit `p_{i+1} → p_i`. Terms with both indices drop out; terms with
/// only `i+1` move to `i` and keep `e^{c_{i+1} − c_i}` as a shift;
/// indices above `i+1` move down by one.
pub fn p_limit(tau: &GeneralTau, i: usize) -> Result<GeneralTau> {
    let cfg = &tau.config;
    if i == 0 || i >= cfg.phases() {
        return invalid(format!("p-limit needs 1 ≤ i < {}", cfg.phases()));
    }
    let mut p = cfg.p().to_vec();
    let mut c = cfg.c().to_vec();
    p.remove(i);
    let ci1 = c.remove(i);
    let b = ci1 - &c[i - 1];
    let times = cfg.times().clone();
    let m = cfg.m() - 1;
    let horizon = (m.max(3)).max(times.keys().copied().max().unwrap_or(0));
    let next = SolitonConfig::new(m, p, c, Some(horizon), times)?;
    let renumber = |k: usize| if k > i + 1 { k - 1 } else if k == i + 1 { i } else { k };
    let mut terms = Vec::new();
    for t in &tau.terms {
        if t.key.contains(i) && t.key.contains(i + 1) {
            continue;
        }
        let key = IndexSet::new(t.key.iter().map(renumber).collect())?;
        let sign = t.coeff.clone() / sub_vandermonde(cfg, &t.key);
        let coeff = sign * sub_vandermonde(&next, &key);
        let shift = if t.key.contains(i + 1) { &t.shift + &b } else { t.shift.clone() };
        terms.push(make_term(&next, key, coeff, shift)?);
    }
    finish(next, tau.n, terms)
}

impl GeneralTau {
    pub fn keys(&self) -> BTreeSet<IndexSet> {
        self.terms.iter().map(|t| t.key.clone()).collect()
    }

    pub fn term(&self, key: &IndexSet) -> Option<&TauTerm> {
        self.terms.iter().find(|t| t.key == *key)
    }

    pub fn phases(&self) -> Vec<&GeneralPhase> {
        self.terms.iter().map(|t| &t.phase).collect()
    }

    /// Index of a dominating term at `(x, y, t)`, with all tying terms.
    pub fn dominant(&self, coords: &[LogValue]) -> Result<Vec<usize>> {
        let vals: Vec<LogValue> = self.terms.iter().map(|t| t.phase.eval(coords)).collect();
        let mut best = vec![0];
        for k in 1..vals.len() {
            match vals[k].try_cmp(&vals[best[0]])? {
                Ordering::Greater => best = vec![k],
                Ordering::Equal => best.push(k),
                Ordering::Less => {}
            }
        }
        Ok(best)
    }

    /// Fast variant of [`GeneralTau::dominant`] for plotting: floating values
    /// decide unless two leaders are within `1e-9`, where the certified path runs.
    pub fn dominant_f64(&self, x: f64, y: f64, t: f64) -> Result<Vec<usize>> {
        let vals: Vec<f64> = self.terms.iter().map(|term| phase_f64(&term.phase, x, y, t)).collect();
        let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let near: Vec<usize> = (0..vals.len()).filter(|&k| top - vals[k] < 1e-9 * (1.0 + top.abs())).collect();
        if near.len() == 1 {
            return Ok(near);
        }
        let to_q = |v: f64| {
            Rational::from_float(v).map(LogValue::rational).ok_or_else(|| Error::Invalid(format!("{v} not finite")))
        };
        let coords = [to_q(x)?, to_q(y)?, to_q(t)?];
        let vals: Vec<LogValue> = near.iter().map(|&k| self.terms[k].phase.eval(&coords)).collect();
        let mut best = vec![0];
        for k in 1..vals.len() {
            match vals[k].try_cmp(&vals[best[0]])? {
                Ordering::Greater => best = vec![k],
                Ordering::Equal => best.push(k),
                Ordering::Less => {}
            }
        }
        Ok(best.into_iter().map(|b| near[b]).collect())
    }
}

pub(crate) fn phase_f64(phase: &GeneralPhase, x: f64, y: f64, t: f64) -> f64 {
    use crate::exact::to_f64;
    let l = &phase.linear;
    let mut v = phase.constant.to_f64();
    for (a, s) in l.iter().zip([x, y, t]) {
        v += to_f64(a) * s;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    fn cfg(p: &[Rational]) -> SolitonConfig {
        SolitonConfig::simple(p.to_vec(), vec![rat(0); p.len()]).unwrap()
    }

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_slice(v).unwrap()
    }

    fn keys(v: &[&[usize]]) -> BTreeSet<IndexSet> {
        v.iter().map(|k| set(k)).collect()
    }

    #[test]
    fn o_type_coefficients() {
        let p = [rat(-1), ratio(-1, 2), ratio(1, 4), ratio(5, 4)];
        let tau = build_tau(&cfg(&p), &WedgeSpec::from_signed(&[&[1, 2], &[3, 4]])).unwrap();
        assert!(tau.regular);
        let got: Vec<(String, Rational)> = tau.terms.iter().map(|t| (t.key.to_string(), t.coeff.clone())).collect();
        let want = vec![
            ("13".to_string(), &p[2] - &p[0]),
            ("14".to_string(), &p[3] - &p[0]),
            ("23".to_string(), &p[2] - &p[1]),
            ("24".to_string(), &p[3] - &p[1]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn p_type_and_singular_specs() {
        let p = [rat(-2), ratio(-1, 2), ratio(1, 4), ratio(5, 4)];
        let tau = build_tau(&cfg(&p), &WedgeSpec::from_signed(&[&[1, -4], &[2, 3]])).unwrap();
        assert_eq!(tau.keys(), keys(&[&[1, 2], &[1, 3], &[2, 4], &[3, 4]]));
        assert!(tau.regular);
        let bad = build_tau(&cfg(&p), &WedgeSpec::from_signed(&[&[1, -2], &[3, 4]])).unwrap();
        assert!(!bad.regular);
        let signs: Vec<bool> = bad.terms.iter().map(|t| t.coeff.is_positive()).collect();
        assert_eq!(signs, [true, true, false, false]);
    }

    #[test]
    fn shared_column_rejected() {
        let p = [rat(-1), rat(0), rat(1)];
        let err = build_tau(&cfg(&p), &WedgeSpec::from_signed(&[&[1, 2], &[2, 3]]));
        assert!(matches!(err, Err(Error::Invalid(_))));
    }

    #[test]
    fn json_spec() {
        let s = WedgeSpec::from_json(r#"{"factors": [[{"index":1,"sign":1},{"index":2,"sign":1}], [{"index":3,"sign":1},{"index":4,"sign":-1}]]}"#).unwrap();
        assert_eq!(s, WedgeSpec::from_signed(&[&[1, 2], &[3, -4]]));
    }

    #[test]
    fn duals() {
        let p = [rat(-1), ratio(-1, 2), ratio(1, 4), ratio(5, 4)];
        let one = build_tau(&cfg(&p), &WedgeSpec::from_signed(&[&[1, 2, 3, 4]])).unwrap();
        let star = dual_tau(&one).unwrap();
        assert_eq!(star.n, 3);
        assert_eq!(star.keys(), IndexSet::all_of_size(4, 3).into_iter().collect());
        assert_eq!(dual_tau(&star).unwrap().keys(), one.keys());
        let o = build_tau(&cfg(&p), &WedgeSpec::from_signed(&[&[1, 2], &[3, 4]])).unwrap();
        assert_eq!(dual_tau(&o).unwrap().keys(), o.keys());
    }

    #[test]
    fn p_limits_of_five_phase_two_forms() {
        let p5 = [rat(-2), rat(-1), rat(0), rat(1), rat(3)];
        // (e1+e2)∧(e3+e4+e5), p3 → p2
        let tau = build_tau(&cfg(&p5), &WedgeSpec::from_signed(&[&[1, 2], &[3, 4, 5]])).unwrap();
        let lim = p_limit(&tau, 2).unwrap();
        assert!(lim.regular);
        assert_eq!(lim.keys(), keys(&[&[1, 2], &[1, 3], &[1, 4], &[2, 3], &[2, 4]]));
        assert_eq!(lim.config.m(), 3);
        // (e1−e5)∧(e2+e3+e4), p5 → p4 gives (e1−e4)∧(e2+e3+e4)
        let tau = build_tau(&cfg(&p5), &WedgeSpec::from_signed(&[&[1, -5], &[2, 3, 4]])).unwrap();
        let lim = p_limit(&tau, 4).unwrap();
        assert!(lim.regular);
        assert_eq!(lim.keys(), keys(&[&[1, 2], &[1, 3], &[1, 4], &[2, 4], &[3, 4]]));
    }

    #[test]
    fn double_limit_keeps_both_merged_terms() {
        let p6 = [rat(-3), rat(-2), rat(-1), rat(0), rat(1), rat(2)];
        let tau = build_tau(&cfg(&p6), &WedgeSpec::from_signed(&[&[1, 2, -6], &[3, 4, 5]])).unwrap();
        assert!(tau.regular);
        let lim = p_limit(&p_limit(&tau, 5).unwrap(), 2).unwrap();
        assert!(lim.regular);
        assert_eq!(lim.keys(), keys(&[&[1, 2], &[1, 3], &[1, 4], &[2, 3], &[2, 4], &[3, 4]]));
        // the 24 region carries two exponentials: the retained constant
        assert_eq!(lim.terms.iter().filter(|t| t.key == set(&[2, 4])).count(), 2);
    }
}
