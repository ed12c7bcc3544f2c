//! Critical values and points: where `n+1` phases coincide.
//!
//! For `S = {k₁ … k_{n+1}}` the critical value of `t⁽ⁿ⁾` is
//! `t⁽ⁿ⁾_S = −Σ_{r=1}^{N−n} h_r(p_S) t⁽ⁿ⁺ʳ⁾ − c_S`, with the higher times
//! taken from the configuration. The linear-solve route in
//! [`critical_point`] is kept independent of that formula.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{inconsistency, invalid, Result};
use crate::exact::{c_coeff, h_table, pick, IndexSet, Rational};
use crate::linalg;
use crate::model::{SolitonConfig, SpacetimePoint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalValue {
    /// Time index `n` whose value is reported; `|indices| = n + 1`.
    pub level: usize,
    pub indices: IndexSet,
    #[serde(with = "crate::exact::serde_rational")]
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalPoint {
    pub indices: IndexSet,
    pub point: SpacetimePoint,
    /// The common phase value `θ_{k₁} = … = θ_{k_{n+1}}`.
    #[serde(with = "crate::exact::serde_rational")]
    pub phase: Rational,
}

/// Time `t⁽ᵐ⁾` at which the level-`(m−1)` critical values of two
/// `m`-element sets coincide (`t_{ijk;lmn}` for `m = 3`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCriticalValue {
    pub left: IndexSet,
    pub right: IndexSet,
    pub time_index: usize,
    #[serde(with = "crate::exact::serde_rational")]
    pub value: Rational,
}

/// Position of a frozen time relative to a critical value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Below,
    At,
    Above,
}

impl Side {
    pub fn of(time: &Rational, critical: &Rational) -> Side {
        match time.cmp(critical) {
            Ordering::Less => Side::Below,
            Ordering::Equal => Side::At,
            Ordering::Greater => Side::Above,
        }
    }
}

fn check_indices(config: &SolitonConfig, s: &IndexSet) -> Result<()> {
    if s.max() > config.phases() {
        return invalid(format!("index set {s} exceeds {} phases", config.phases()));
    }
    Ok(())
}

pub fn critical_value(config: &SolitonConfig, s: &IndexSet) -> Result<CriticalValue> {
    if s.len() < 2 {
        return invalid("critical values need at least two phases");
    }
    check_indices(config, s)?;
    let n = s.len() - 1;
    let horizon = config.horizon();
    if n > horizon {
        return invalid(format!("level {n} exceeds horizon {horizon}"));
    }
    let ps = pick(config.p(), s)?;
    let h = h_table(horizon - n, &ps);
    let mut value = -c_coeff(config.p(), config.c(), s)?;
    for r in 1..=horizon - n {
        value -= &h[r] * config.time(n + r);
    }
    Ok(CriticalValue { level: n, indices: s.clone(), value })
}

/// Solves `θ_{k₁} = … = θ_{k_{n+1}}` for `t⁽¹⁾ … t⁽ⁿ⁾` by exact elimination.
pub fn critical_point(config: &SolitonConfig, s: &IndexSet) -> Result<CriticalPoint> {
    if s.len() < 2 {
        return invalid("critical points need at least two phases");
    }
    check_indices(config, s)?;
    let n = s.len() - 1;
    let horizon = config.horizon();
    if n > horizon {
        return invalid(format!("level {n} exceeds horizon {horizon}"));
    }
    // unknowns: t⁽¹⁾..t⁽ⁿ⁾, v (common phase value)
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for k in s.iter() {
        let p = config.p_at(k);
        let mut row = Vec::with_capacity(n + 1);
        let mut pow = Rational::one();
        for _ in 0..n {
            pow *= p;
            row.push(pow.clone());
        }
        row.push(-Rational::one());
        let mut rhs = -config.c()[k - 1].clone();
        for r in n + 1..=horizon {
            pow *= p;
            rhs -= &pow * config.time(r);
        }
        a.push(row);
        b.push(rhs);
    }
    let Some(mut sol) = linalg::solve(&a, &b) else {
        return inconsistency(format!("singular coincidence system for {s} despite distinct p"));
    };
    let phase = sol.pop().expect("n+1 unknowns");
    let point = config.complete_point(&sol)?;
    Ok(CriticalPoint { indices: s.clone(), point, phase })
}

/// Both sides of `t⁽ⁿ⁻¹⁾_{S∖k_i} − t⁽ⁿ⁻¹⁾_{S∖k_j} = (p_{k_i} − p_{k_j})(t⁽ⁿ⁾ − t⁽ⁿ⁾_S)`
/// for `|S| = n + 1`; `i`, `j` are 1-based positions in `S`.
pub fn difference_identity_check(
    config: &SolitonConfig,
    s: &IndexSet,
    i: usize,
    j: usize,
) -> Result<(Rational, Rational)> {
    if s.len() < 3 {
        return invalid("difference identity needs |S| ≥ 3");
    }
    if i == j || i == 0 || j == 0 || i > s.len() || j > s.len() {
        return invalid(format!("positions {i}, {j} invalid for {s}"));
    }
    let n = s.len() - 1;
    let ti = critical_value(config, &s.without_position(i - 1))?.value;
    let tj = critical_value(config, &s.without_position(j - 1))?.value;
    let parent = critical_value(config, s)?.value;
    let ki = s.as_slice()[i - 1];
    let kj = s.as_slice()[j - 1];
    let lhs = ti - tj;
    let rhs = (config.p_at(ki) - config.p_at(kj)) * (config.time(n) - parent);
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChildOrdering {
    pub parent: CriticalValue,
    pub side: Side,
    /// Children in increasing order of value.
    pub children: Vec<CriticalValue>,
    /// Groups of children with equal values (only when `side == At`).
    pub ties: Vec<Vec<IndexSet>>,
}

/// Children `S ∖ k_j` of a parent, ordered as predicted from the side of
/// `t⁽ⁿ⁾` relative to `t⁽ⁿ⁾_S`, `|S| = n + 1`.
///
/// Below the parent value the child missing the largest `p` comes first;
/// above it the order reverses.
pub fn predicted_child_order(parent: &IndexSet, side: Side) -> Vec<IndexSet> {
    let m = parent.len();
    let mut out: Vec<IndexSet> = (0..m).rev().map(|pos| parent.without_position(pos)).collect();
    if side == Side::Above {
        out.reverse();
    }
    out
}

pub fn order_critical_values(config: &SolitonConfig, parent: &IndexSet) -> Result<ChildOrdering> {
    if parent.len() < 3 {
        return invalid("ordering children needs a parent of size ≥ 3");
    }
    let parent_cv = critical_value(config, parent)?;
    let side = Side::of(&config.time(parent_cv.level), &parent_cv.value);
    let mut children = (0..parent.len())
        .map(|pos| critical_value(config, &parent.without_position(pos)))
        .collect::<Result<Vec<_>>>()?;
    children.sort_by(|a, b| a.value.cmp(&b.value).then_with(|| a.indices.cmp(&b.indices)));
    let mut ties: Vec<Vec<IndexSet>> = Vec::new();
    for group in children.chunk_by(|a, b| a.value == b.value) {
        if group.len() > 1 {
            ties.push(group.iter().map(|c| c.indices.clone()).collect());
        }
    }
    match side {
        Side::At => {
            if ties.len() != 1 || ties[0].len() != parent.len() {
                return inconsistency(format!("children of {parent} not all equal at the parent value"));
            }
        }
        _ => {
            if !ties.is_empty() {
                return inconsistency(format!("tie among children of {parent} off the parent value"));
            }
            let got: Vec<IndexSet> = children.iter().map(|c| c.indices.clone()).collect();
            if got != predicted_child_order(parent, side) {
                return inconsistency(format!("children of {parent} out of predicted order"));
            }
        }
    }
    Ok(ChildOrdering { parent: parent_cv, side, children, ties })
}

/// Factored form `θ_{k₁} − θ_{k_{n+1}} = coefficient · (t⁽ⁿ⁾ − critical)`
/// valid on the plane where `θ_{k₁} = … = θ_{k_n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneDifference {
    pub level: usize,
    pub coefficient: Rational,
    pub critical: Rational,
}

impl PlaneDifference {
    pub fn eval(&self, t_n: &Rational) -> Rational {
        &self.coefficient * (t_n - &self.critical)
    }
}

pub fn phase_difference_on_plane(config: &SolitonConfig, chain: &[usize]) -> Result<PlaneDifference> {
    if chain.len() < 2 {
        return invalid("need at least two indices");
    }
    let set = IndexSet::from_slice(chain)?;
    let n = chain.len() - 1;
    let last = config.p_at(chain[n]);
    let mut prod = Rational::one();
    for &k in &chain[..n] {
        prod *= last - config.p_at(k);
    }
    let critical = critical_value(config, &set)?.value;
    Ok(PlaneDifference { level: n, coefficient: -prod, critical })
}

pub fn level_critical_value(config: &SolitonConfig, t1: &IndexSet, t2: &IndexSet) -> Result<LevelCriticalValue> {
    let m = t1.len();
    if t2.len() != m || m < 2 {
        return invalid("level critical values need two sets of equal size ≥ 2");
    }
    if t1 == t2 {
        return invalid("identical sets never cross");
    }
    check_indices(config, t1)?;
    check_indices(config, t2)?;
    let horizon = config.horizon();
    if m > horizon {
        return invalid(format!("no time t{m} within horizon {horizon}"));
    }
    let span = horizon - m + 1;
    let h1 = h_table(span, &pick(config.p(), t1)?);
    let h2 = h_table(span, &pick(config.p(), t2)?);
    let dh1 = &h1[1] - &h2[1];
    if dh1.is_zero() {
        return invalid(format!("p-sums of {t1} and {t2} agree: undefined (parallel)"));
    }
    let mut num = c_coeff(config.p(), config.c(), t1)? - c_coeff(config.p(), config.c(), t2)?;
    for r in 2..=span {
        num += (&h1[r] - &h2[r]) * config.time(m - 1 + r);
    }
    Ok(LevelCriticalValue { left: t1.clone(), right: t2.clone(), time_index: m, value: -num / dh1 })
}

/// Critical value of `t⁽ⁿ⁾` with one frozen time overridden.
pub fn critical_value_with(config: &SolitonConfig, s: &IndexSet, r: usize, t: &Rational) -> Result<Rational> {
    Ok(critical_value(&config.with_time(r, t.clone())?, s)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};
    use std::collections::BTreeMap;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_slice(v).unwrap()
    }

    fn fig12() -> SolitonConfig {
        let p = vec![rat(-2), ratio(-3, 2), rat(-1), ratio(1, 2), ratio(5, 4), rat(2)];
        let c = vec![rat(10), rat(0), rat(0), rat(0), rat(0), rat(-10)];
        SolitonConfig::simple(p, c).unwrap()
    }

    #[test]
    fn trivial_values() {
        let config = SolitonConfig::simple(vec![rat(0), rat(1), rat(2)], vec![rat(0); 3]).unwrap();
        for s in [set(&[1, 2]), set(&[1, 3]), set(&[1, 2, 3])] {
            assert_eq!(critical_value(&config, &s).unwrap().value, rat(0));
        }
        assert!(critical_value(&config, &set(&[1])).is_err());
        let pt = critical_point(&config, &set(&[1, 2, 3])).unwrap();
        assert_eq!(pt.point.coords()[..2], [rat(0), rat(0)]);
    }

    #[test]
    fn x13_example() {
        let config = SolitonConfig::simple(vec![rat(0), rat(1), rat(2)], vec![rat(0), rat(0), rat(3)]).unwrap();
        assert_eq!(critical_value(&config, &set(&[1, 3])).unwrap().value, ratio(-3, 2));
        let moved = config.with_time(2, rat(5)).unwrap();
        assert_eq!(critical_value(&moved, &set(&[1, 3])).unwrap().value, rat(-10) - ratio(3, 2));
    }

    #[test]
    fn fig12_top_value() {
        // frozen: 6×6 solve of θ₁ = … = θ₆ gives t⁽⁵⁾ = 8/13 + 40/189
        let config = fig12();
        let cv = critical_value(&config, &IndexSet::range(6)).unwrap();
        assert_eq!(cv.value, ratio(8, 13) + ratio(40, 189));
        let pt = critical_point(&config, &IndexSet::range(6)).unwrap();
        assert_eq!(pt.point.t(5), &cv.value);
    }

    #[test]
    fn m3_child_order_below_parent() {
        let config = SolitonConfig::new(
            3,
            vec![rat(-2), rat(-1), ratio(1, 2), rat(3)],
            vec![rat(1), rat(-2), rat(0), ratio(5, 2)],
            None,
            BTreeMap::new(),
        )
        .unwrap();
        let top = critical_value(&config, &IndexSet::range(4)).unwrap().value;
        let below = config.with_time(3, top.clone() - rat(1)).unwrap();
        let ord = order_critical_values(&below, &IndexSet::range(4)).unwrap();
        let got: Vec<String> = ord.children.iter().map(|c| c.indices.to_string()).collect();
        assert_eq!(got, ["123", "124", "134", "234"]);
        let at = config.with_time(3, top).unwrap();
        let ord = order_critical_values(&at, &IndexSet::range(4)).unwrap();
        assert_eq!(ord.side, Side::At);
        assert_eq!(ord.ties.len(), 1);
    }

    #[test]
    fn level_values() {
        let zero = SolitonConfig::simple(vec![rat(-1), rat(0), rat(1), rat(3), rat(4)], vec![rat(0); 5]).unwrap();
        let v = level_critical_value(&zero, &set(&[1, 2, 3]), &set(&[3, 4, 5])).unwrap();
        assert_eq!(v.value, rat(0));
        assert!(level_critical_value(&zero, &set(&[1, 2, 5]), &set(&[1, 3, 4])).is_err());
    }

    #[test]
    fn level_value_closed_form_fig12() {
        // t⁽⁴⁾_{1236;3456} − t⁽⁴⁾_{12356} = −(p₄−p₁)(p₄−p₂)/(p₄+p₅−p₁−p₂)·λ
        let base = fig12();
        let p = base.p().to_vec();
        let top5 = critical_value(&base, &IndexSet::range(6)).unwrap().value;
        for lambda in [rat(-1), ratio(3, 7), rat(5)] {
            let config = base.with_time(5, &top5 + &lambda).unwrap();
            let lv = level_critical_value(&config, &set(&[1, 2, 3, 6]), &set(&[3, 4, 5, 6])).unwrap();
            let t12356 = critical_value(&config, &set(&[1, 2, 3, 5, 6])).unwrap().value;
            let expected = -(&p[3] - &p[0]) * (&p[3] - &p[1]) / (&p[3] + &p[4] - &p[0] - &p[1]) * &lambda;
            assert_eq!(lv.value - t12356, expected);
        }
    }
}
