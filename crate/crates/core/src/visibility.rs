//! Visibility of critical points, decided twice: by direct dominance at the
//! coincidence point, and by the half-line deletion rules applied level by
//! level from the top coincidence down. The two must agree.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::critical::{critical_point, critical_value, order_critical_values, predicted_child_order, CriticalValue, Side};
use crate::error::{inconsistency, invalid, Result};
use crate::exact::IndexSet;
use crate::model::SolitonConfig;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VisibilityVerdict {
    pub visible: bool,
    /// Phase strictly exceeding the coinciding ones (largest, then lowest index).
    pub witness: Option<usize>,
    /// No phase outside the set attains the common value.
    pub generic: bool,
}

/// Direct test: compares every phase at the coincidence point of `s`.
pub fn is_visible(config: &SolitonConfig, s: &IndexSet) -> Result<VisibilityVerdict> {
    let cp = critical_point(config, s)?;
    let mut witness: Option<(usize, crate::Rational)> = None;
    let mut generic = true;
    for m in 1..=config.phases() {
        if s.contains(m) {
            continue;
        }
        let theta = config.phase_unchecked(m, cp.point.coords());
        match theta.cmp(&cp.phase) {
            std::cmp::Ordering::Greater => {
                if witness.as_ref().map_or(true, |(_, w)| theta > *w) {
                    witness = Some((m, theta));
                }
            }
            std::cmp::Ordering::Equal => generic = false,
            std::cmp::Ordering::Less => {}
        }
    }
    Ok(VisibilityVerdict { visible: witness.is_none(), witness: witness.map(|(m, _)| m), generic })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalflinePartition {
    pub non_visible: Vec<IndexSet>,
    pub potentially_visible: Vec<IndexSet>,
}

/// Children of `parent` (`|parent| = n + 1`) that are non-visible on one
/// side of the parent critical value.
///
/// Below: children missing `k_n, k_{n−2}, …`. Above: missing
/// `k_{n+1}, k_{n−1}, …`. At the parent value nothing is excluded.
pub fn halfline_visibility_rule(parent: &IndexSet, side: Side) -> Result<HalflinePartition> {
    if parent.len() < 3 {
        return invalid("half-line rule needs a parent of size ≥ 3");
    }
    let n = parent.len() - 1;
    let first = match side {
        Side::Below => Some(n),
        Side::Above => Some(n + 1),
        Side::At => None,
    };
    let killed: BTreeSet<usize> = match first {
        Some(f) => (1..=f).rev().step_by(2).collect(),
        None => BTreeSet::new(),
    };
    let mut out = HalflinePartition { non_visible: Vec::new(), potentially_visible: Vec::new() };
    for pos in 1..=parent.len() {
        let child = parent.without_position(pos - 1);
        if killed.contains(&pos) {
            out.non_visible.push(child);
        } else {
            out.potentially_visible.push(child);
        }
    }
    Ok(out)
}

/// The doubly-deleted child of `parent` (`|parent| = n + 2`) whose whole
/// line is non-visible on the given side of the parent critical value.
///
/// Below: delete `k_{n+1−2s}` and `k_{n+1−2r}`, `0 ≤ r < s ≤ ⌈(n+1)/2⌉ − 1`.
/// Above: delete `k_{n+2−2s}` and `k_{n+2−2r}`, `0 ≤ r < s ≤ ⌊(n+1)/2⌋`.
pub fn two_step_rule(parent: &IndexSet, r: usize, s: usize, side: Side) -> Result<IndexSet> {
    if parent.len() < 4 {
        return invalid("two-step rule needs a parent of size ≥ 4");
    }
    let n = parent.len() - 2;
    let (base, bound) = match side {
        Side::Below => (n + 1, (n + 1).div_ceil(2) - 1),
        Side::Above => (n + 2, (n + 1) / 2),
        Side::At => return invalid("two-step rule is undefined at the parent value"),
    };
    if r >= s || s > bound {
        return invalid(format!("need 0 ≤ r < s ≤ {bound}, got r={r}, s={s}"));
    }
    let (hi, lo) = (base - 2 * r, base - 2 * s);
    if lo < 1 {
        return invalid(format!("deleted position {lo} out of range"));
    }
    let child = parent.without_position(hi - 1).without_position(lo - 1);
    Ok(child)
}

pub fn two_step_exclusions(parent: &IndexSet, side: Side) -> Vec<IndexSet> {
    let mut out = Vec::new();
    if parent.len() < 4 || side == Side::At {
        return out;
    }
    for s in 1..parent.len() {
        for r in 0..s {
            if let Ok(child) = two_step_rule(parent, r, s, side) {
                out.push(child);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum KillReason {
    /// Excluded by the half-line rule of this parent.
    Halfline(IndexSet),
    /// Excluded by the two-step rule of this grandparent.
    TwoStep(IndexSet),
    NoVisibleParent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    /// Visible critical values, increasing (ties by index set).
    pub visible: Vec<CriticalValue>,
    /// Covering relations `a < b` among visible values implied by the
    /// child orderings of all parents.
    pub order: Vec<(IndexSet, IndexSet)>,
    pub killed: BTreeMap<IndexSet, Vec<KillReason>>,
    /// Parents whose critical value equals the frozen time.
    pub degenerate_parents: Vec<IndexSet>,
    /// Visible points where an extra phase also attains the maximum.
    pub nongeneric: Vec<IndexSet>,
}

impl LevelReport {
    pub fn visible_sets(&self) -> Vec<IndexSet> {
        self.visible.iter().map(|c| c.indices.clone()).collect()
    }
}

/// Analytic pruning at level `n` (sets of size `n + 1`). Returns survivors
/// and the reasons each other child was excluded. No oracle involved.
pub fn analytic_prune(
    config: &SolitonConfig,
    n: usize,
    visible_parents: &[IndexSet],
    use_parent_rule: bool,
) -> Result<(Vec<IndexSet>, BTreeMap<IndexSet, Vec<KillReason>>, Vec<IndexSet>)> {
    let total = config.phases();
    if n == 0 || n + 1 > total {
        return invalid(format!("level {n} out of range for {total} phases"));
    }
    let visible: BTreeSet<&IndexSet> = visible_parents.iter().collect();
    let mut kills: BTreeMap<IndexSet, Vec<KillReason>> = BTreeMap::new();
    let mut degenerate = Vec::new();
    let t_parent = config.time(n + 1);
    for parent in IndexSet::all_of_size(total, n + 2) {
        let cv = critical_value(config, &parent)?;
        let side = Side::of(&t_parent, &cv.value);
        if side == Side::At {
            degenerate.push(parent.clone());
            continue;
        }
        for child in halfline_visibility_rule(&parent, side)?.non_visible {
            kills.entry(child).or_default().push(KillReason::Halfline(parent.clone()));
        }
    }
    if n + 3 <= total {
        let t_grand = config.time(n + 2);
        for grand in IndexSet::all_of_size(total, n + 3) {
            let cv = critical_value(config, &grand)?;
            let side = Side::of(&t_grand, &cv.value);
            for child in two_step_exclusions(&grand, side) {
                kills.entry(child).or_default().push(KillReason::TwoStep(grand.clone()));
            }
        }
    }
    let mut survivors = Vec::new();
    for child in IndexSet::all_of_size(total, n + 1) {
        if use_parent_rule {
            let has_visible_parent = child
                .complement(total)
                .into_iter()
                .any(|k| visible.contains(&child.with(k).expect("k outside child")));
            if !has_visible_parent {
                kills.entry(child.clone()).or_default().push(KillReason::NoVisibleParent);
            }
        }
        if !kills.contains_key(&child) {
            survivors.push(child);
        }
    }
    Ok((survivors, kills, degenerate))
}

/// Visible critical values at level `n`, cross-checked against
/// [`is_visible`] for every child. Disagreement is a hard error.
pub fn prune_level(config: &SolitonConfig, n: usize, visible_parents: &[IndexSet]) -> Result<LevelReport> {
    let (survivors, killed, degenerate_parents) = analytic_prune(config, n, visible_parents, true)?;
    let total = config.phases();
    let mut nongeneric = Vec::new();
    for child in IndexSet::all_of_size(total, n + 1) {
        let verdict = is_visible(config, &child)?;
        let analytic = survivors.contains(&child);
        if verdict.visible != analytic {
            return inconsistency(format!(
                "level {n}: {child} analytic {} but oracle {} (witness {:?})",
                if analytic { "visible" } else { "non-visible" },
                if verdict.visible { "visible" } else { "non-visible" },
                verdict.witness
            ));
        }
        if verdict.visible && !verdict.generic {
            nongeneric.push(child);
        }
    }
    let mut visible = survivors
        .iter()
        .map(|s| critical_value(config, s))
        .collect::<Result<Vec<_>>>()?;
    visible.sort_by(|a, b| a.value.cmp(&b.value).then_with(|| a.indices.cmp(&b.indices)));
    let order = if n + 2 <= total && n >= 1 && n + 1 >= 2 {
        order_relations(config, n, &survivors)?
    } else {
        Vec::new()
    };
    Ok(LevelReport { level: n, visible, order, killed, degenerate_parents, nongeneric })
}

/// Covering relations among `survivors` from each parent's child order,
/// after checking the orders numerically and the union for cycles.
fn order_relations(config: &SolitonConfig, n: usize, survivors: &[IndexSet]) -> Result<Vec<(IndexSet, IndexSet)>> {
    let total = config.phases();
    let keep: BTreeSet<&IndexSet> = survivors.iter().collect();
    let mut edges: BTreeSet<(IndexSet, IndexSet)> = BTreeSet::new();
    if n == 0 || n + 2 > total {
        return Ok(Vec::new());
    }
    for parent in IndexSet::all_of_size(total, n + 2) {
        if parent.len() < 3 {
            continue;
        }
        let ordering = order_critical_values(config, &parent)?;
        if ordering.side == Side::At {
            continue;
        }
        let seq: Vec<IndexSet> = predicted_child_order(&parent, ordering.side)
            .into_iter()
            .filter(|c| keep.contains(c))
            .collect();
        for w in seq.windows(2) {
            edges.insert((w[0].clone(), w[1].clone()));
        }
    }
    let edges: Vec<(IndexSet, IndexSet)> = edges.into_iter().collect();
    if has_cycle(survivors, &edges) {
        return inconsistency(format!("order relations at level {n} contain a cycle"));
    }
    Ok(transitive_reduction(survivors, &edges))
}

pub(crate) fn has_cycle<T: Ord + Clone>(nodes: &[T], edges: &[(T, T)]) -> bool {
    let mut indeg: BTreeMap<&T, usize> = nodes.iter().map(|n| (n, 0)).collect();
    for (_, b) in edges {
        *indeg.entry(b).or_default() += 1;
    }
    let mut ready: Vec<&T> = indeg.iter().filter(|(_, &d)| d == 0).map(|(n, _)| *n).collect();
    let mut seen = 0;
    while let Some(n) = ready.pop() {
        seen += 1;
        for (a, b) in edges {
            if a == n {
                let d = indeg.get_mut(b).expect("node");
                *d -= 1;
                if *d == 0 {
                    ready.push(b);
                }
            }
        }
    }
    seen != indeg.len()
}

pub(crate) fn transitive_reduction<T: Ord + Clone>(nodes: &[T], edges: &[(T, T)]) -> Vec<(T, T)> {
    let mut succ: BTreeMap<&T, Vec<&T>> = nodes.iter().map(|n| (n, Vec::new())).collect();
    for (a, b) in edges {
        succ.entry(a).or_default().push(b);
    }
    let reaches_without = |from: &T, to: &T| -> bool {
        // path of length ≥ 2 from `from` to `to`
        let mut stack: Vec<&T> = succ[from].iter().copied().filter(|n| *n != to).collect();
        let mut seen: BTreeSet<&T> = stack.iter().copied().collect();
        while let Some(n) = stack.pop() {
            for &m in succ.get(n).map(|v| v.as_slice()).unwrap_or(&[]) {
                if m == to {
                    return true;
                }
                if seen.insert(m) {
                    stack.push(m);
                }
            }
        }
        false
    };
    edges.iter().filter(|(a, b)| !reaches_without(a, b)).cloned().collect()
}

/// Level reports from the top coincidence `{1 … M+1}` down to `lowest`.
pub fn visible_hierarchy(config: &SolitonConfig, lowest: usize) -> Result<Vec<LevelReport>> {
    let m = config.m();
    if lowest == 0 || lowest > m {
        return invalid(format!("lowest level {lowest} outside 1..={m}"));
    }
    let top_set = IndexSet::range(m + 1);
    let top = LevelReport {
        level: m,
        visible: vec![critical_value(config, &top_set)?],
        order: Vec::new(),
        killed: BTreeMap::new(),
        degenerate_parents: Vec::new(),
        nongeneric: Vec::new(),
    };
    let mut reports = vec![top];
    for n in (lowest..m).rev() {
        let parents = reports.last().expect("top").visible_sets();
        reports.push(prune_level(config, n, &parents)?);
    }
    Ok(reports)
}

/// Children that survive the half-line rule of every parent but are not
/// visible: candidates against dropping the parent-existence rule.
pub fn parent_rule_counterexamples(config: &SolitonConfig, n: usize) -> Result<Vec<IndexSet>> {
    let (survivors, _, _) = analytic_prune(config, n, &[], false)?;
    let mut out = Vec::new();
    for s in survivors {
        if !is_visible(config, &s)?.visible {
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};
    use std::collections::BTreeMap;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_slice(v).unwrap()
    }

    fn names(v: &[IndexSet]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn halfline_rule_small_parents() {
        let p = halfline_visibility_rule(&set(&[1, 2, 3]), Side::Above).unwrap();
        assert_eq!(names(&p.non_visible), ["23", "12"]);
        assert_eq!(names(&p.potentially_visible), ["13"]);
        let p = halfline_visibility_rule(&set(&[1, 2, 3]), Side::Below).unwrap();
        assert_eq!(names(&p.non_visible), ["13"]);
        let p = halfline_visibility_rule(&set(&[1, 2, 3, 4]), Side::Below).unwrap();
        assert_eq!(names(&p.non_visible), ["234", "124"]);
        let p = halfline_visibility_rule(&set(&[1, 2, 3, 4, 5]), Side::Below).unwrap();
        assert_eq!(names(&p.non_visible), ["1345", "1235"]);
    }

    #[test]
    fn halfline_sides_are_complementary() {
        for size in 3..=7 {
            let parent = IndexSet::range(size);
            let below = halfline_visibility_rule(&parent, Side::Below).unwrap();
            let above = halfline_visibility_rule(&parent, Side::Above).unwrap();
            let mut a = below.non_visible.clone();
            a.sort();
            let mut b = above.potentially_visible.clone();
            b.sort();
            assert_eq!(a, b);
            assert_eq!(below.non_visible.len() + above.non_visible.len(), size);
        }
    }

    #[test]
    fn two_step_examples() {
        let k = IndexSet::range(6);
        assert_eq!(names(&two_step_exclusions(&k, Side::Below)), ["1246", "2346", "2456"]);
        assert_eq!(names(&two_step_exclusions(&k, Side::Above)), ["1235", "1345", "1356"]);
        assert!(two_step_rule(&k, 1, 1, Side::Below).is_err());
        assert!(two_step_rule(&k, 0, 3, Side::Below).is_err());
    }

    fn m3() -> SolitonConfig {
        SolitonConfig::new(
            3,
            vec![rat(-2), rat(-1), ratio(1, 2), rat(3)],
            vec![rat(1), rat(-2), rat(0), ratio(5, 2)],
            None,
            BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn m3_point_beyond_top_time_is_hidden() {
        let config = m3();
        let top = critical_value(&config, &IndexSet::range(4)).unwrap().value;
        let after = config.with_time(3, top + rat(1)).unwrap();
        let v = is_visible(&after, &set(&[1, 2, 3])).unwrap();
        assert!(!v.visible);
        assert_eq!(v.witness, Some(4));
        let miles = SolitonConfig::simple(vec![rat(-1), rat(0), rat(1)], vec![rat(0); 3]).unwrap();
        let v = is_visible(&miles, &set(&[1, 2, 3])).unwrap();
        assert!(v.visible && v.generic);
    }

    #[test]
    fn m3_single_visible_time_and_asymptotic_trees() {
        let config = m3();
        let reports = visible_hierarchy(&config, 2).unwrap();
        assert_eq!(names(&reports[0].visible_sets()), ["1234"]);
        let top = reports[0].visible[0].value.clone();
        let early = visible_hierarchy(&config.with_time(3, &top - rat(10)).unwrap(), 2).unwrap();
        let mut got = names(&early[1].visible_sets());
        got.sort();
        assert_eq!(got, ["123", "134"]);
        let late = visible_hierarchy(&config.with_time(3, &top + rat(10)).unwrap(), 2).unwrap();
        let mut got = names(&late[1].visible_sets());
        got.sort();
        assert_eq!(got, ["124", "234"]);
    }

    #[test]
    fn reduction_helpers() {
        let nodes = vec![1, 2, 3];
        let edges = vec![(1, 2), (2, 3), (1, 3)];
        assert_eq!(transitive_reduction(&nodes, &edges), vec![(1, 2), (2, 3)]);
        assert!(!has_cycle(&nodes, &edges));
        assert!(has_cycle(&nodes, &[(1, 2), (2, 1)]));
    }
}
