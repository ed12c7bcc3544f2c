//! Soliton trees at fixed times and their evolution through visible
//! critical times `t_ijkl`, assembled as a maximal Tamari chain.

mod levels;
mod table;

pub use levels::{refine_with_levels, LevelEvent, LevelEventKind, RefinedChain};
pub use table::{
    level_crossings, region_thresholds, table1_region, table3_regions, table_conditions, with_mu_lambda, LevelCrossingReport, TableReport,
    TABLE1,
};

use num_traits::One;
use serde::Serialize;

use crate::combinatorics::{tamari_cover, BinaryTree, LevelSeq, Op, OpWord, TamariSeq};
use crate::critical::critical_value;
use crate::error::{inconsistency, invalid, Error, Result};
use crate::exact::{IndexSet, Rational};
use crate::model::SolitonConfig;
use crate::visibility::visible_hierarchy;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeNode {
    /// `{i, j, k}`: the point where lines `x_ij`, `x_jk`, `x_ik` meet.
    pub triple: IndexSet,
    #[serde(with = "crate::exact::serde_rational")]
    pub y: Rational,
}

/// A rooted binary tree of visible triple points at one event.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolitonTree {
    pub m: usize,
    /// Top to bottom (decreasing `y`).
    pub nodes: Vec<TreeNode>,
    pub y_code: TamariSeq,
    pub level_code: LevelSeq,
    #[serde(skip)]
    tree: BinaryTree,
}

impl SolitonTree {
    /// Grows the tree from a top-to-bottom node sequence by splitting
    /// `x_ik` into `(x_ij, x_jk)` at each `{i, j, k}`, starting from `x_{1,M+1}`.
    pub fn from_nodes(m: usize, nodes: Vec<TreeNode>) -> Result<SolitonTree> {
        let seq: Vec<IndexSet> = nodes.iter().map(|n| n.triple.clone()).collect();
        let level_code = grow(m, &seq)?;
        let tree = BinaryTree::from_level_seq(&level_code);
        let y_code = tree.tamari_code();
        let got: Vec<(usize, usize, usize)> = tree.triples();
        for (k, t) in got.iter().enumerate() {
            if seq[k].as_slice() != [t.0, t.1, t.2] {
                return inconsistency(format!("node {} decodes as {:?}", seq[k], t));
            }
        }
        Ok(SolitonTree { m, nodes, y_code, level_code, tree })
    }

    pub fn triples(&self) -> Vec<IndexSet> {
        self.nodes.iter().map(|n| n.triple.clone()).collect()
    }

    /// Triples in preorder: the order of the Tamari code.
    pub fn preorder_triples(&self) -> Vec<IndexSet> {
        self.tree.preorder().into_iter().map(|k| self.nodes[k].triple.clone()).collect()
    }

    pub fn binary_tree(&self) -> &BinaryTree {
        &self.tree
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Level code of a top-to-bottom triple sequence under the branching rule.
pub fn grow(m: usize, seq: &[IndexSet]) -> Result<LevelSeq> {
    if m == 0 {
        return invalid("M must be at least 1");
    }
    let mut open: Vec<(usize, usize)> = vec![(1, m + 1)];
    let mut code = Vec::with_capacity(seq.len());
    for s in seq {
        let &[i, j, k] = s.as_slice() else {
            return invalid(format!("{s} is not a triple"));
        };
        let Some(pos) = open.iter().position(|&e| e == (i, k)) else {
            return inconsistency(format!("no open line x_{i},{k} for node {s}"));
        };
        open.splice(pos..=pos, [(i, j), (j, k)]);
        code.push(pos + 1);
    }
    if open.len() != m || open.iter().enumerate().any(|(n, &(a, b))| a != n + 1 || b != n + 2) {
        return inconsistency(format!("tree leaves {open:?} are not x_12 … x_{m},{}", m + 1));
    }
    LevelSeq::new(code)
}

/// `y_ijk` values of all visible level-2 points, plus the level-3 report
/// used to detect events. Errors as degenerate at a visible `t_ijkl` or on
/// tied `y`-values.
pub fn tree_at_event(config: &SolitonConfig) -> Result<SolitonTree> {
    let m = config.m();
    if m == 1 {
        return SolitonTree::from_nodes(1, Vec::new());
    }
    if config.horizon() < 3 {
        return invalid("tree snapshots need t = t3 within the horizon");
    }
    let reports = visible_hierarchy(config, 2)?;
    let t = config.time(3);
    if m >= 3 {
        let level3 = reports.iter().find(|r| r.level == 3).expect("level 3 present");
        if let Some(cv) = level3.visible.iter().find(|cv| cv.value == t) {
            return Err(Error::Degenerate(format!("t is the visible critical time t_{}", cv.indices)));
        }
    }
    let level2 = reports.last().expect("level 2 present");
    let mut nodes: Vec<TreeNode> =
        level2.visible.iter().map(|cv| TreeNode { triple: cv.indices.clone(), y: cv.value.clone() }).collect();
    nodes.sort_by(|a, b| b.y.cmp(&a.y).then_with(|| a.triple.cmp(&b.triple)));
    if let Some(w) = nodes.windows(2).find(|w| w[0].y == w[1].y) {
        return Err(Error::Degenerate(format!("y_{} = y_{}", w[0].triple, w[1].triple)));
    }
    if nodes.len() + 1 != m {
        return inconsistency(format!("{} visible triple points, expected {}", nodes.len(), m - 1));
    }
    SolitonTree::from_nodes(m, nodes)
}

/// `(y_ikl, y_ijk) → (y_ijl, y_jkl)` on a top-to-bottom triple sequence.
/// `ijk` is first moved up to sit directly below `ikl`.
pub fn apply_rotation(seq: &[IndexSet], ijkl: &IndexSet) -> Result<Vec<IndexSet>> {
    let &[i, j, k, l] = ijkl.as_slice() else {
        return invalid(format!("{ijkl} is not a quadruple"));
    };
    let tri = |a, b, c| IndexSet::from_slice(&[a, b, c]).expect("distinct");
    let (ikl, ijk) = (tri(i, k, l), tri(i, j, k));
    let pa = seq.iter().position(|s| *s == ikl);
    let pb = seq.iter().position(|s| *s == ijk);
    let (Some(pa), Some(pb)) = (pa, pb) else {
        return invalid(format!("t_{ijkl}: nodes {ikl} and {ijk} not both present"));
    };
    if pb < pa {
        return invalid(format!("t_{ijkl}: {ijk} lies above {ikl}"));
    }
    let mut out = seq.to_vec();
    let moved = out.remove(pb);
    out.insert(pa + 1, moved);
    out[pa] = tri(i, j, l);
    out[pa + 1] = tri(j, k, l);
    Ok(out)
}

/// Site `s` of the `a`-letter realizing `t_ijkl` on a tree: `r − q` where
/// `q` is the preorder position of `ikl`.
pub fn rotation_site(tree: &SolitonTree, ijkl: &IndexSet) -> Result<usize> {
    let s = ijkl.as_slice();
    if s.len() != 4 {
        return invalid(format!("{ijkl} is not a quadruple"));
    }
    let ikl = IndexSet::from_slice(&[s[0], s[2], s[3]])?;
    let ijk = IndexSet::from_slice(&[s[0], s[1], s[2]])?;
    let pre = tree.preorder_triples();
    let q = pre.iter().position(|t| *t == ikl).ok_or_else(|| Error::Invalid(format!("{ikl} not in tree")))?;
    if pre.get(q + 1) != Some(&ijk) {
        return invalid(format!("{ijk} is not the left child of {ikl}"));
    }
    Ok(pre.len() - (q + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvolutionStep {
    #[serde(with = "crate::exact::serde_rational")]
    pub time: Rational,
    /// Critical times `t_ijkl` falling at this time; more than one is a
    /// simultaneous rotation.
    pub events: Vec<IndexSet>,
    /// `a`-sites, one per event, in the order applied.
    pub sites: Vec<usize>,
    /// Tamari cover words, one per event.
    pub words: Vec<OpWord>,
    pub tree: SolitonTree,
}

impl EvolutionStep {
    pub fn is_degenerate(&self) -> bool {
        self.events.len() > 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvolutionChain {
    pub m: usize,
    pub initial: SolitonTree,
    pub steps: Vec<EvolutionStep>,
    /// Row of the nine-chain table for `M = 5`, when the event sequence matches one.
    pub table_type: Option<usize>,
}

impl EvolutionChain {
    pub fn events(&self) -> Vec<IndexSet> {
        self.steps.iter().flat_map(|s| s.events.iter().cloned()).collect()
    }

    pub fn y_codes(&self) -> Vec<TamariSeq> {
        std::iter::once(self.initial.y_code.clone()).chain(self.steps.iter().map(|s| s.tree.y_code.clone())).collect()
    }

    pub fn word(&self) -> OpWord {
        self.steps.iter().flat_map(|s| s.words.iter()).fold(OpWord::default(), |acc, w| acc.concat(w))
    }

    pub fn has_degenerate_steps(&self) -> bool {
        self.steps.iter().any(|s| s.is_degenerate())
    }
}

fn mid(a: &Rational, b: &Rational) -> Rational {
    (a + b) / Rational::from_integer(2.into())
}

/// Visible `t_ijkl` grouped by equal value, increasing.
pub fn visible_events(config: &SolitonConfig) -> Result<Vec<(Rational, Vec<IndexSet>)>> {
    if config.m() < 3 {
        return Ok(Vec::new());
    }
    let reports = visible_hierarchy(config, 3)?;
    let level3 = reports.last().expect("level 3");
    let mut groups: Vec<(Rational, Vec<IndexSet>)> = Vec::new();
    for cv in &level3.visible {
        match groups.last_mut() {
            Some((v, sets)) if *v == cv.value => sets.push(cv.indices.clone()),
            _ => groups.push((cv.value.clone(), vec![cv.indices.clone()])),
        }
    }
    Ok(groups)
}

/// Applies every event of a simultaneous group, in whichever order the
/// rotation rule admits.
fn rotate_group(tree: &SolitonTree, events: &[IndexSet]) -> Result<(Vec<IndexSet>, Vec<usize>, Vec<OpWord>, TamariSeq)> {
    let mut seq = tree.triples();
    let mut code = tree.y_code.clone();
    let mut pending: Vec<IndexSet> = events.to_vec();
    let mut order = Vec::new();
    let mut sites = Vec::new();
    let mut words = Vec::new();
    let m = tree.m;
    while !pending.is_empty() {
        let current = SolitonTree::from_nodes(
            m,
            seq.iter().map(|t| TreeNode { triple: t.clone(), y: Rational::one() }).collect(),
        )?;
        let Some(pos) = pending.iter().position(|e| rotation_site(&current, e).is_ok()) else {
            return inconsistency(format!("no rotation of {pending:?} applies to {}", current.y_code));
        };
        let e = pending.remove(pos);
        let site = rotation_site(&current, &e)?;
        let (word, next) = tamari_cover(&code, site)
            .ok_or_else(|| Error::Inconsistency(format!("a{site} not a Tamari cover at {code}")))?;
        seq = apply_rotation(&seq, &e)?;
        let grown = SolitonTree::from_nodes(
            m,
            seq.iter().map(|t| TreeNode { triple: t.clone(), y: Rational::one() }).collect(),
        )?;
        if grown.y_code != next {
            return inconsistency(format!("rotation t_{e} gives {} but the cover gives {next}", grown.y_code));
        }
        code = next;
        order.push(e);
        sites.push(site);
        words.push(word);
    }
    Ok((order, sites, words, code))
}

/// Classifies the evolution in `t = t3` with the higher times of `config`
/// frozen. Each step is checked against the snapshot after it and against
/// the Tamari cover relation; the whole chain must run from the left comb
/// to the right comb.
pub fn classify_evolution(config: &SolitonConfig) -> Result<EvolutionChain> {
    let m = config.m();
    if m < 2 {
        let initial = SolitonTree::from_nodes(m.max(1), Vec::new())?;
        return Ok(EvolutionChain { m, initial, steps: Vec::new(), table_type: None });
    }
    let groups = visible_events(config)?;
    let first = groups.first().map(|g| g.0.clone()).unwrap_or_else(|| config.time(3));
    let initial = tree_at_event(&config.with_time(3, first - Rational::one())?)?;
    let r = m - 1;
    if initial.y_code != TamariSeq::min(r) {
        return inconsistency(format!("initial tree {} is not the left comb", initial.y_code));
    }
    let mut steps = Vec::with_capacity(groups.len());
    let mut before = initial.clone();
    for (g, (time, events)) in groups.iter().enumerate() {
        let sample = match groups.get(g + 1) {
            Some((next, _)) => mid(time, next),
            None => time + Rational::one(),
        };
        let after = tree_at_event(&config.with_time(3, sample)?)?;
        let (order, sites, words, code) = rotate_group(&before, events)?;
        if code != after.y_code {
            return inconsistency(format!("after t = {time}: rotations give {code}, snapshot gives {}", after.y_code));
        }
        steps.push(EvolutionStep { time: time.clone(), events: order, sites, words, tree: after.clone() });
        before = after;
    }
    if before.y_code != TamariSeq::max(r) {
        return inconsistency(format!("final tree {} is not the right comb", before.y_code));
    }
    let mut chain = EvolutionChain { m, initial, steps, table_type: None };
    if m == 5 && !chain.has_degenerate_steps() {
        let ev = chain.events();
        chain.table_type = TABLE1.iter().position(|row| table::row_sets(row) == ev).map(|i| i + 1);
    }
    Ok(chain)
}

/// Critical times `t_ijkl` read off a Tamari word on `r = M − 1` nodes,
/// starting from the left comb: each `a_s` rotates the preorder node at
/// level `r − s` (triple `ikl`) with its left child (`ijk`).
pub fn chain_to_critical_times(m: usize, word: &OpWord) -> Result<Vec<IndexSet>> {
    if m < 2 {
        return invalid("critical-time chains need M ≥ 2");
    }
    let r = m - 1;
    let mut code = TamariSeq::min(r);
    let letters = word.letters();
    let mut out = Vec::new();
    let mut i = 0;
    while i < letters.len() {
        let l = letters[i];
        if l.op != Op::A || l.site >= r.max(1) || l.site == 0 {
            return invalid(format!("{word}: expected an a-letter with site < {r} at position {}", i + 1));
        }
        let tree = BinaryTree::from_tamari(&code);
        let triples = tree.triples();
        let pre = tree.preorder();
        let q = r - l.site;
        let (i0, k, l_) = triples[pre[q - 1]];
        let (i1, j, k1) = triples[pre[q]];
        if i0 != i1 || k != k1 {
            return inconsistency(format!("levels {q}, {} do not form a rotation pair", q + 1));
        }
        out.push(IndexSet::from_slice(&[i0, j, k, l_])?);
        let (cover, next) = tamari_cover(&code, l.site)
            .ok_or_else(|| Error::Invalid(format!("{word}: a{} not applicable at {code}", l.site)))?;
        let n = cover.len();
        if letters.get(i..i + n) != Some(cover.letters()) {
            return invalid(format!("{word}: cover at {code} must read {}", cover.compact()));
        }
        code = next;
        i += n;
    }
    Ok(out)
}

/// Critical value `t_ijkl` of a visible event, exposed for reporting.
pub fn event_time(config: &SolitonConfig, ijkl: &IndexSet) -> Result<Rational> {
    Ok(critical_value(config, ijkl)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_slice(v).unwrap()
    }

    fn sets(v: &[&[usize]]) -> Vec<IndexSet> {
        v.iter().map(|s| set(s)).collect()
    }

    #[test]
    fn rotation_examples() {
        let start = sets(&[&[1, 4, 5], &[1, 3, 4], &[1, 2, 3]]);
        let next = apply_rotation(&start, &set(&[1, 2, 3, 4])).unwrap();
        assert_eq!(next, sets(&[&[1, 4, 5], &[1, 2, 4], &[2, 3, 4]]));
        let later = sets(&[&[1, 2, 5], &[2, 4, 5], &[2, 3, 4]]);
        assert_eq!(apply_rotation(&later, &set(&[2, 3, 4, 5])).unwrap(), sets(&[&[1, 2, 5], &[2, 3, 5], &[3, 4, 5]]));
        assert!(apply_rotation(&next, &set(&[1, 2, 3, 4])).is_err());
    }

    #[test]
    fn branching_rule_example() {
        let code = grow(3, &sets(&[&[1, 3, 4], &[1, 2, 3]])).unwrap();
        assert_eq!(code.entries(), &[1, 1]);
        assert!(grow(3, &sets(&[&[1, 2, 3], &[1, 3, 4]])).is_err());
    }

    #[test]
    fn m3_single_chain() {
        let p = vec![rat(-1), rat(0), rat(1), rat(3)];
        let c = vec![rat(0), rat(2), rat(-1), rat(1)];
        let cfg = SolitonConfig::simple(p, c).unwrap();
        let chain = classify_evolution(&cfg).unwrap();
        assert_eq!(chain.events(), sets(&[&[1, 2, 3, 4]]));
        assert_eq!(chain.steps[0].sites, vec![1]);
        assert_eq!(chain.y_codes(), vec![TamariSeq::min(2), TamariSeq::max(2)]);
    }

    #[test]
    fn m4_chains_on_both_sides() {
        let p = vec![rat(-2), rat(-1), rat(0), rat(1), rat(3)];
        let c = vec![rat(0), rat(1), rat(-1), rat(2), rat(0)];
        let cfg = SolitonConfig::simple(p, c).unwrap();
        let top = critical_value(&cfg, &IndexSet::range(5)).unwrap().value;
        let below = classify_evolution(&cfg.with_time(4, &top - rat(1)).unwrap()).unwrap();
        assert_eq!(below.events(), sets(&[&[1, 2, 3, 4], &[1, 2, 4, 5], &[2, 3, 4, 5]]));
        let above = classify_evolution(&cfg.with_time(4, &top + rat(1)).unwrap()).unwrap();
        assert_eq!(above.events(), sets(&[&[1, 3, 4, 5], &[1, 2, 3, 5]]));
        assert_eq!(above.word().compact(), "a2b1a2");
        assert_eq!(below.word().compact(), "a1a2a1");
        assert!(matches!(
            tree_at_event(&cfg.with_time(4, &top + rat(1)).unwrap().with_time(3, above.steps[0].time.clone()).unwrap()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn fig12_type_one() {
        let p = vec![rat(-2), ratio(-3, 2), rat(-1), ratio(1, 2), ratio(5, 4), rat(2)];
        let c = vec![rat(10), rat(0), rat(0), rat(0), rat(0), rat(-10)];
        let cfg = with_mu_lambda(&SolitonConfig::simple(p, c).unwrap(), &rat(-2), &rat(-1)).unwrap();
        let chain = classify_evolution(&cfg).unwrap();
        assert_eq!(chain.table_type, Some(1));
        assert_eq!(
            chain.events(),
            sets(&[&[1, 2, 3, 4], &[1, 2, 4, 5], &[2, 3, 4, 5], &[1, 2, 5, 6], &[2, 3, 5, 6], &[3, 4, 5, 6]])
        );
    }

    #[test]
    fn words_translate_to_times() {
        let w = OpWord::from_composition("a1 a2 a1").unwrap();
        assert_eq!(chain_to_critical_times(4, &w).unwrap(), sets(&[&[1, 2, 3, 4], &[1, 2, 4, 5], &[2, 3, 4, 5]]));
        let w: OpWord = "a2b1a2".parse().unwrap();
        assert_eq!(chain_to_critical_times(4, &w).unwrap(), sets(&[&[1, 3, 4, 5], &[1, 2, 3, 5]]));
        assert!(chain_to_critical_times(4, &"a2a2".parse().unwrap()).is_err());
    }
}
