//! Concrete posets: permutohedron, Tamari lattice, simplex and hypercube families.

use std::collections::BTreeMap;
use std::fmt;

use crate::combinatorics::poset::{Cover, CoverLabel, Poset, PosetKind};
use crate::combinatorics::seq::{apply_op, pair_positions, Letter, LevelSeq, OpWord, TamariSeq};
use crate::error::{invalid, Error, Result};
use crate::exact::IndexSet;

pub const PERMUTOHEDRON_BOUND: usize = 7;
pub const TAMARI_BOUND: usize = 8;

fn guard(what: &str, r: usize, bound: usize) -> Result<()> {
    if r == 0 {
        return invalid(format!("{what} needs r ≥ 1"));
    }
    if r > bound {
        return Err(Error::ResourceGuard(format!("{what}({r}) exceeds the bound {bound}")));
    }
    Ok(())
}

/// `S_r` under single `a`/`b` moves.
pub fn permutohedron(r: usize) -> Result<Poset<LevelSeq>> {
    permutohedron_bounded(r, PERMUTOHEDRON_BOUND)
}

pub fn permutohedron_bounded(r: usize, bound: usize) -> Result<Poset<LevelSeq>> {
    guard("permutohedron", r, bound)?;
    let nodes = LevelSeq::all(r);
    let index: BTreeMap<&LevelSeq, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut covers = Vec::new();
    for (i, seq) in nodes.iter().enumerate() {
        for s in 1..r {
            for letter in [Letter::a(s), Letter::b(s)] {
                if let Ok(next) = apply_op(seq, letter) {
                    covers.push(Cover { from: i, to: index[&next], label: CoverLabel::Word(OpWord(vec![letter])) });
                }
            }
        }
    }
    Poset::new(PosetKind::Permutohedron, nodes, covers)
}

/// The Tamari cover at site `s`: `a_s`, then `b` at the descent until the
/// sequence is nondecreasing again. `None` when the pair is not equal.
pub fn tamari_cover(y: &TamariSeq, s: usize) -> Option<(OpWord, TamariSeq)> {
    let r = y.len();
    let (i, j) = pair_positions(r, s).ok()?;
    if y.entries()[i] != y.entries()[j] {
        return None;
    }
    let mut word = vec![Letter::a(s)];
    let mut cur = apply_op(&y.as_level(), Letter::a(s)).ok()?;
    let mut site = s;
    while site > 1 {
        let b = Letter::b(site - 1);
        match apply_op(&cur, b) {
            Ok(next) => {
                cur = next;
                word.push(b);
                site -= 1;
            }
            Err(_) => break,
        }
    }
    let t = cur.to_tamari()?;
    Some((OpWord(word), t))
}

/// `Y_r` with covers given by [`tamari_cover`].
pub fn tamari(r: usize) -> Result<Poset<TamariSeq>> {
    tamari_bounded(r, TAMARI_BOUND)
}

pub fn tamari_bounded(r: usize, bound: usize) -> Result<Poset<TamariSeq>> {
    guard("tamari", r, bound)?;
    let nodes = TamariSeq::all(r);
    let index: BTreeMap<&TamariSeq, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut covers = Vec::new();
    for (i, y) in nodes.iter().enumerate() {
        for s in 1..r {
            if let Some((w, next)) = tamari_cover(y, s) {
                let to = *index.get(&next).ok_or_else(|| Error::Inconsistency(format!("{next} not in Y_{r}")))?;
                covers.push(Cover { from: i, to, label: CoverLabel::Word(w) });
            }
        }
    }
    Poset::new(PosetKind::Tamari, nodes, covers)
}

/// A chain of boundary lines through consecutive phases of an index set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LineChain(pub IndexSet);

impl fmt::Display for LineChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .as_slice()
            .windows(2)
            .map(|w| format!("x{}", IndexSet::from_slice(w).expect("distinct")))
            .collect();
        f.write_str(&parts.join("<"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Phase(pub usize);

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Complete digraph on the phases `1..M+1`, edge `i → j` labelled `x_ij`.
/// Kept complete, so covers are not irreducible here.
pub fn simplex(m: usize) -> Result<Poset<Phase>> {
    if m < 2 {
        return invalid("simplex poset needs M ≥ 2");
    }
    let nodes: Vec<Phase> = (1..=m + 1).map(Phase).collect();
    let mut covers = Vec::new();
    for i in 1..=m + 1 {
        for j in i + 1..=m + 1 {
            let label = format!("x{}", IndexSet::from_slice(&[i, j])?);
            covers.push(Cover { from: i - 1, to: j - 1, label: CoverLabel::Symbol(label) });
        }
    }
    Poset::new(PosetKind::Simplex, nodes, covers)
}

/// Index sets containing `1` and `M+1`, from the full set down to `{1, M+1}`.
/// Deleting the interior index `j` with neighbours `i < j < k` is an edge `y_ijk`.
pub fn hypercube(m: usize) -> Result<Poset<LineChain>> {
    if m < 3 {
        return invalid("hypercube poset needs M ≥ 3");
    }
    if m > 16 {
        return Err(Error::ResourceGuard(format!("hypercube with M={m} is too large")));
    }
    let interior: Vec<usize> = (2..=m).collect();
    let mut nodes = Vec::new();
    for mask in (0u32..1 << interior.len()).rev() {
        let mut v = vec![1];
        v.extend(interior.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &j)| j));
        v.push(m + 1);
        nodes.push(LineChain(IndexSet::new(v)?));
    }
    nodes.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
    let index: BTreeMap<IndexSet, usize> = nodes.iter().enumerate().map(|(i, n)| (n.0.clone(), i)).collect();
    let mut covers = Vec::new();
    for (i, node) in nodes.iter().enumerate() {
        let s = node.0.as_slice();
        for pos in 1..s.len().saturating_sub(1) {
            let smaller = node.0.without_position(pos);
            let label = format!("y{}", IndexSet::from_slice(&s[pos - 1..=pos + 1])?);
            covers.push(Cover { from: i, to: index[&smaller], label: CoverLabel::Symbol(label) });
        }
    }
    Poset::new(PosetKind::Hypercube, nodes, covers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::poset::chain_classes;
    use crate::combinatorics::tree::{collapse, BinaryTree};

    #[test]
    fn tamari_three_is_a_pentagon() {
        let t = tamari(3).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t.covers.len(), 5);
        let chains = t.maximal_chains(100).unwrap();
        let words: Vec<String> = chains.iter().map(|c| t.chain_word(c).unwrap().compact()).collect();
        assert_eq!(words, vec!["a1a2a1", "a2b1a2"]);
    }

    #[test]
    fn tamari_counts() {
        let t4 = tamari(4).unwrap();
        assert_eq!((t4.len(), t4.chain_count()), (14, 9));
        let t5 = tamari(5).unwrap();
        assert_eq!((t5.len(), t5.chain_count()), (42, 98));
        for r in 1..=6 {
            let t = tamari(r).unwrap();
            assert!(t.is_irreducible());
            for c in &t.covers {
                let CoverLabel::Word(w) = &c.label else { panic!("tamari covers carry words") };
                assert_eq!(w.count(crate::combinatorics::seq::Op::A), 1);
            }
            let (short, long) = t.chain_length_range();
            assert_eq!(long, r * (r - 1) / 2);
            assert_eq!(short, r - 1);
        }
    }

    #[test]
    fn tamari_classes() {
        for (r, classes) in [(3, 2), (4, 6), (5, 25)] {
            let t = tamari(r).unwrap();
            let words: Vec<OpWord> =
                t.maximal_chains(1000).unwrap().iter().map(|c| t.chain_word(c).unwrap()).collect();
            assert_eq!(chain_classes(&words).unwrap().len(), classes);
        }
    }

    #[test]
    fn shortest_chain_is_composition_word() {
        let t = tamari(4).unwrap();
        let words: Vec<OpWord> = t.maximal_chains(100).unwrap().iter().map(|c| t.chain_word(c).unwrap()).collect();
        let want = OpWord::from_composition("a1 a2 a3 a2 b1 a2").unwrap();
        assert!(words.contains(&want));
        let shortest = OpWord::from_composition("a3 b2 a3 b1 b2 a3").unwrap();
        assert!(words.contains(&shortest));
    }

    #[test]
    fn tamari_covers_are_right_rotations() {
        for r in 1..=6 {
            let t = tamari(r).unwrap();
            for (i, y) in t.nodes.iter().enumerate() {
                let mut by_cover: Vec<TamariSeq> =
                    t.out_covers(i).iter().map(|&ci| t.nodes[t.covers[ci].to].clone()).collect();
                let mut by_rotation: Vec<TamariSeq> =
                    BinaryTree::from_tamari(y).right_rotations().iter().map(|(_, s)| s.tamari_code()).collect();
                by_cover.sort();
                by_rotation.sort();
                assert_eq!(by_cover, by_rotation, "at {y}");
            }
        }
    }

    #[test]
    fn permutohedron_counts() {
        let p3 = permutohedron(3).unwrap();
        assert_eq!((p3.len(), p3.covers.len()), (6, 6));
        let p4 = permutohedron(4).unwrap();
        assert_eq!((p4.len(), p4.chain_count()), (24, 16));
        for r in 1..=6 {
            let p = permutohedron(r).unwrap();
            assert_eq!(p.chain_length_range(), (r * (r - 1) / 2, r * (r - 1) / 2));
            assert_eq!(p.minimal(), vec![0]);
        }
        assert!(matches!(permutohedron(8), Err(Error::ResourceGuard(_))));
        assert!(matches!(tamari(9), Err(Error::ResourceGuard(_))));
    }

    #[test]
    fn special_permutohedron_chain() {
        for r in 2..=6 {
            let mut word = Vec::new();
            for k in 1..r {
                for s in (1..=k).rev() {
                    word.push(Letter::a(s));
                }
            }
            let mut w = OpWord(word);
            w.0.reverse();
            let end = crate::combinatorics::seq::apply_word(&LevelSeq::min(r), &w).unwrap();
            assert_eq!(end, LevelSeq::max(r));
        }
    }

    #[test]
    fn collapse_fibers_partition() {
        for r in 1..=6 {
            let mut sizes: BTreeMap<TamariSeq, usize> = BTreeMap::new();
            for s in LevelSeq::all(r) {
                *sizes.entry(collapse(&s)).or_default() += 1;
            }
            assert_eq!(sizes.len(), TamariSeq::all(r).len());
            assert_eq!(sizes.values().sum::<usize>(), (1..=r).product::<usize>());
        }
    }

    #[test]
    fn simplex_and_hypercube() {
        let s = simplex(3).unwrap();
        assert_eq!((s.len(), s.covers.len()), (4, 6));
        let h3 = hypercube(3).unwrap();
        assert_eq!(h3.len(), 4);
        assert_eq!(h3.nodes[0].to_string(), "x12<x23<x34");
        assert_eq!(h3.nodes[3].to_string(), "x14");
        assert_eq!(h3.chain_count(), 2);
        let h4 = hypercube(4).unwrap();
        assert_eq!((h4.len(), h4.covers.len()), (8, 12));
        assert_eq!(h4.nodes[0].to_string(), "x12<x23<x34<x45");
        let second: Vec<String> = h4.nodes[1..4].iter().map(|n| n.to_string()).collect();
        assert_eq!(second, vec!["x12<x23<x35", "x12<x24<x45", "x13<x34<x45"]);
        assert!(h4.is_irreducible());
        assert!(hypercube(2).is_err());
        assert!(simplex(1).is_err());
    }
}
