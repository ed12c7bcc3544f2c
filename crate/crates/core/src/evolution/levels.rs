//! Trees with levels: between rotations, two nodes exchange height when
//! their `y`-values cross at `t_{ijk;lmn}`.

use num_traits::One;
use serde::Serialize;

use crate::combinatorics::{sigma_s, LevelSeq};
use crate::critical::level_critical_value;
use crate::error::{Error, Result};
use crate::evolution::{tree_at_event, EvolutionChain};
use crate::exact::{IndexSet, Rational};
use crate::model::SolitonConfig;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LevelEventKind {
    Rotation(Vec<IndexSet>),
    /// `upper` was above `lower` before the crossing.
    LevelSwap { upper: IndexSet, lower: IndexSet },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelEvent {
    #[serde(with = "crate::exact::serde_rational")]
    pub time: Rational,
    pub kind: LevelEventKind,
    pub level_code: LevelSeq,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinedChain {
    pub initial: LevelSeq,
    pub events: Vec<LevelEvent>,
    /// Every step is a single `a` or `b` move and the ends are the extreme
    /// elements of `S_r`.
    pub permutohedron_chain: bool,
    /// Two crossings in one interval coincide.
    pub degenerate: bool,
}

/// Whether `next` is one `a`/`b` move above `prev`.
pub fn is_level_cover(prev: &LevelSeq, next: &LevelSeq) -> bool {
    prev.len() == next.len()
        && next.weight() == prev.weight() + 1
        && (1..prev.len()).any(|s| sigma_s(prev, s).map_or(false, |x| x == *next))
}

pub fn refine_with_levels(config: &SolitonConfig, chain: &EvolutionChain) -> Result<RefinedChain> {
    let mut bounds: Vec<Option<Rational>> = vec![None];
    bounds.extend(chain.steps.iter().map(|s| Some(s.time.clone())));
    bounds.push(None);
    let trees: Vec<&crate::evolution::SolitonTree> =
        std::iter::once(&chain.initial).chain(chain.steps.iter().map(|s| &s.tree)).collect();
    let mut events: Vec<(Rational, LevelEventKind)> = Vec::new();
    let mut degenerate = false;
    for (w, tree) in trees.iter().enumerate() {
        let (lo, hi) = (&bounds[w], &bounds[w + 1]);
        let triples = tree.triples();
        let mut crossings: Vec<(Rational, IndexSet, IndexSet)> = Vec::new();
        for a in 0..triples.len() {
            for b in a + 1..triples.len() {
                let t0 = match level_critical_value(config, &triples[a], &triples[b]) {
                    Ok(v) => v.value,
                    Err(Error::Invalid(_)) => continue,
                    Err(e) => return Err(e),
                };
                let inside_lo = lo.as_ref().map_or(true, |l| t0 > *l);
                let inside_hi = hi.as_ref().map_or(true, |h| t0 < *h);
                if inside_lo && inside_hi {
                    crossings.push((t0, triples[a].clone(), triples[b].clone()));
                }
            }
        }
        crossings.sort();
        if crossings.windows(2).any(|p| p[0].0 == p[1].0) {
            degenerate = true;
        }
        for (t0, a, b) in crossings {
            // nodes are listed top to bottom, so `a` starts above `b`
            events.push((t0, LevelEventKind::LevelSwap { upper: a, lower: b }));
        }
        if let Some(step) = chain.steps.get(w) {
            events.push((step.time.clone(), LevelEventKind::Rotation(step.events.clone())));
        }
    }
    let times: Vec<Rational> = events.iter().map(|e| e.0.clone()).collect();
    let sample = |i: usize| -> Rational {
        match (i.checked_sub(1).map(|j| &times[j]), times.get(i)) {
            (None, Some(t)) => t - Rational::one(),
            (Some(t), None) => t + Rational::one(),
            (Some(a), Some(b)) => (a + b) / Rational::from_integer(2.into()),
            (None, None) => config.time(3),
        }
    };
    let initial = tree_at_event(&config.with_time(3, sample(0))?)?.level_code;
    let mut out = Vec::with_capacity(events.len());
    let mut ok = initial == LevelSeq::min(initial.len());
    let mut prev = initial.clone();
    for (i, (time, kind)) in events.into_iter().enumerate() {
        let code = tree_at_event(&config.with_time(3, sample(i + 1))?)?.level_code;
        let single = !matches!(&kind, LevelEventKind::Rotation(v) if v.len() > 1);
        if single && !is_level_cover(&prev, &code) {
            ok = false;
        }
        prev = code.clone();
        out.push(LevelEvent { time, kind, level_code: code });
    }
    ok &= prev == LevelSeq::max(prev.len());
    Ok(RefinedChain { initial, events: out, permutohedron_chain: ok && !degenerate, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::critical_value;
    use crate::evolution::classify_evolution;
    use crate::exact::rat;

    #[test]
    fn m4_right_chain_gets_one_level_swap() {
        let p = vec![rat(-2), rat(-1), rat(0), rat(1), rat(3)];
        let c = vec![rat(0), rat(1), rat(-1), rat(2), rat(0)];
        let cfg = SolitonConfig::simple(p, c).unwrap();
        let top = critical_value(&cfg, &IndexSet::range(5)).unwrap().value;
        let cfg = cfg.with_time(4, top + rat(1)).unwrap();
        let chain = classify_evolution(&cfg).unwrap();
        let refined = refine_with_levels(&cfg, &chain).unwrap();
        let kinds: Vec<&LevelEventKind> = refined.events.iter().map(|e| &e.kind).collect();
        assert_eq!(kinds.len(), 3);
        let LevelEventKind::LevelSwap { upper, lower } = kinds[1] else { panic!("expected a swap") };
        let mut pair = [upper.to_string(), lower.to_string()];
        pair.sort();
        assert_eq!(pair, ["123", "345"]);
        assert!(refined.permutohedron_chain);
        assert!(refined.events[0].time < refined.events[1].time && refined.events[1].time < refined.events[2].time);
    }

    #[test]
    fn left_chain_unchanged() {
        let p = vec![rat(-2), rat(-1), rat(0), rat(1), rat(3)];
        let c = vec![rat(0), rat(1), rat(-1), rat(2), rat(0)];
        let cfg = SolitonConfig::simple(p, c).unwrap();
        let top = critical_value(&cfg, &IndexSet::range(5)).unwrap().value;
        let cfg = cfg.with_time(4, top - rat(1)).unwrap();
        let chain = classify_evolution(&cfg).unwrap();
        let refined = refine_with_levels(&cfg, &chain).unwrap();
        assert!(refined.events.iter().all(|e| matches!(e.kind, LevelEventKind::Rotation(_))));
        assert!(refined.permutohedron_chain);
    }
}
