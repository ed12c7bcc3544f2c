//! Finite posets given by labelled cover relations, with chain enumeration.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Display, Write as _};

use serde::Serialize;
use serde_json::{json, Value};

use crate::combinatorics::seq::{apply_word, OpWord, Op, TamariSeq};
use crate::error::{inconsistency, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PosetKind {
    Simplex,
    Hypercube,
    Permutohedron,
    Tamari,
    Custom,
}

impl Display for PosetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PosetKind::Simplex => "simplex",
            PosetKind::Hypercube => "hypercube",
            PosetKind::Permutohedron => "permutohedron",
            PosetKind::Tamari => "tamari",
            PosetKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum CoverLabel {
    Word(OpWord),
    Symbol(String),
}

impl Display for CoverLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverLabel::Word(w) => f.write_str(&w.compact()),
            CoverLabel::Symbol(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cover {
    pub from: usize,
    pub to: usize,
    pub label: CoverLabel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub nodes: Vec<usize>,
    pub covers: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Poset<N> {
    pub kind: PosetKind,
    pub nodes: Vec<N>,
    pub covers: Vec<Cover>,
    out: Vec<Vec<usize>>,
}

impl<N: Display> Poset<N> {
    /// Errors when an edge points outside the node list or the relation has a cycle.
    pub fn new(kind: PosetKind, nodes: Vec<N>, covers: Vec<Cover>) -> Result<Self> {
        let n = nodes.len();
        if let Some(c) = covers.iter().find(|c| c.from >= n || c.to >= n || c.from == c.to) {
            return inconsistency(format!("bad cover {} -> {}", c.from, c.to));
        }
        let mut out = vec![Vec::new(); n];
        for (i, c) in covers.iter().enumerate() {
            out[c.from].push(i);
        }
        for list in &mut out {
            list.sort_by(|&a, &b| (&covers[a].label, covers[a].to).cmp(&(&covers[b].label, covers[b].to)));
        }
        let p = Poset { kind, nodes, covers, out };
        if p.topological_order().is_none() {
            return inconsistency(format!("{kind} relation has a cycle"));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn out_covers(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn minimal(&self) -> Vec<usize> {
        let mut has_in = vec![false; self.nodes.len()];
        for c in &self.covers {
            has_in[c.to] = true;
        }
        (0..self.nodes.len()).filter(|&v| !has_in[v]).collect()
    }

    pub fn maximal(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&v| self.out[v].is_empty()).collect()
    }

    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.nodes.len()];
        for c in &self.covers {
            indeg[c.to] += 1;
        }
        let mut queue: VecDeque<usize> = (0..self.nodes.len()).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &ci in &self.out[v] {
                let w = self.covers[ci].to;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    /// Whether no cover is implied by a longer path.
    pub fn is_irreducible(&self) -> bool {
        let nodes: Vec<usize> = (0..self.nodes.len()).collect();
        let edges: BTreeSet<(usize, usize)> = self.covers.iter().map(|c| (c.from, c.to)).collect();
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        crate::visibility::transitive_reduction(&nodes, &edges).len() == edges.len()
    }

    /// Number of maximal chains, counted without enumerating them.
    pub fn chain_count(&self) -> u128 {
        let order = self.topological_order().expect("acyclic");
        let mut paths = vec![0u128; self.nodes.len()];
        for &v in order.iter().rev() {
            paths[v] = if self.out[v].is_empty() {
                1
            } else {
                self.out[v].iter().map(|&ci| paths[self.covers[ci].to]).sum()
            };
        }
        self.minimal().iter().map(|&v| paths[v]).sum()
    }

    /// Shortest and longest maximal chain, measured by `weight` per cover.
    pub fn chain_length_range_by(&self, weight: impl Fn(&Cover) -> usize) -> (usize, usize) {
        let order = self.topological_order().expect("acyclic");
        let mut lo = vec![0usize; self.nodes.len()];
        let mut hi = vec![0usize; self.nodes.len()];
        for &v in order.iter().rev() {
            if self.out[v].is_empty() {
                continue;
            }
            let steps = self.out[v].iter().map(|&ci| {
                let c = &self.covers[ci];
                (weight(c) + lo[c.to], weight(c) + hi[c.to])
            });
            let (l, h) = steps.fold((usize::MAX, 0), |(l, h), (a, b)| (l.min(a), h.max(b)));
            lo[v] = l;
            hi[v] = h;
        }
        let mins = self.minimal();
        let l = mins.iter().map(|&v| lo[v]).min().unwrap_or(0);
        let h = mins.iter().map(|&v| hi[v]).max().unwrap_or(0);
        (l, h)
    }

    /// Shortest and longest maximal chain in covers.
    pub fn chain_length_range(&self) -> (usize, usize) {
        self.chain_length_range_by(|_| 1)
    }

    /// Every maximal chain, from minimal to maximal elements, sorted by
    /// label sequence. Refuses when there are more than `limit`.
    pub fn maximal_chains(&self, limit: usize) -> Result<Vec<Chain>> {
        let count = self.chain_count();
        if count > limit as u128 {
            return Err(Error::ResourceGuard(format!("{count} maximal chains exceed the limit {limit}")));
        }
        let mut out = Vec::with_capacity(count as usize);
        for start in self.minimal() {
            let mut stack = vec![(start, Vec::<usize>::new())];
            while let Some((v, path)) = stack.pop() {
                if self.out[v].is_empty() {
                    let mut nodes = vec![start];
                    nodes.extend(path.iter().map(|&ci| self.covers[ci].to));
                    out.push(Chain { nodes, covers: path });
                    continue;
                }
                for &ci in self.out[v].iter().rev() {
                    let mut p = path.clone();
                    p.push(ci);
                    stack.push((self.covers[ci].to, p));
                }
            }
        }
        out.sort_by_cached_key(|c| c.covers.iter().map(|&ci| self.covers[ci].label.clone()).collect::<Vec<_>>());
        Ok(out)
    }

    pub fn chain_labels(&self, chain: &Chain) -> Vec<String> {
        chain.covers.iter().map(|&ci| self.covers[ci].label.to_string()).collect()
    }

    /// Concatenated op word of a chain; errors on symbol labels.
    pub fn chain_word(&self, chain: &Chain) -> Result<OpWord> {
        let mut w = OpWord::default();
        for &ci in &chain.covers {
            match &self.covers[ci].label {
                CoverLabel::Word(x) => w = w.concat(x),
                CoverLabel::Symbol(s) => return crate::error::invalid(format!("cover {s} carries no op word")),
            }
        }
        Ok(w)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph {} {{", self.kind);
        let _ = writeln!(s, "  rankdir=BT;");
        let _ = writeln!(s, "  node [shape=box, fontname=\"Helvetica\"];");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", escape(&n.to_string()));
        }
        for c in &self.covers {
            let _ = writeln!(s, "  n{} -> n{} [label=\"{}\"];", c.from, c.to, escape(&c.label.to_string()));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> Value {
        let nodes: Vec<String> = self.nodes.iter().map(|n| n.to_string()).collect();
        let covers: Vec<Value> = self
            .covers
            .iter()
            .map(|c| json!({"from": c.from, "to": c.to, "label": c.label.to_string()}))
            .collect();
        json!({"kind": self.kind, "nodes": nodes, "covers": covers})
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl Poset<TamariSeq> {
    /// The maximal chain spelled by `word` from the bottom element: each
    /// `a`-letter with the `b`-letters after it is one cover.
    pub fn trace_word(&self, word: &OpWord) -> Result<Chain> {
        let index: BTreeMap<&TamariSeq, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let starts = self.minimal();
        let &[mut cur] = starts.as_slice() else {
            return inconsistency("tamari poset without a unique bottom");
        };
        let mut chain = Chain { nodes: vec![cur], covers: Vec::new() };
        let letters = word.letters();
        let mut i = 0;
        while i < letters.len() {
            if letters[i].op != Op::A {
                return crate::error::invalid(format!("{word}: cover must start with an a-letter"));
            }
            let mut j = i + 1;
            while j < letters.len() && letters[j].op == Op::B {
                j += 1;
            }
            let block = OpWord(letters[i..j].to_vec());
            let next = apply_word(&self.nodes[cur].as_level(), &block)?;
            let ci = self.out[cur]
                .iter()
                .copied()
                .find(|&ci| Some(&self.covers[ci].to) == next.to_tamari().as_ref().and_then(|y| index.get(y)))
                .ok_or_else(|| Error::Invalid(format!("{word}: {block} is not a cover at {}", self.nodes[cur])))?;
            cur = self.covers[ci].to;
            chain.nodes.push(cur);
            chain.covers.push(ci);
            i = j;
        }
        if !self.out[cur].is_empty() {
            return crate::error::invalid(format!("{word} stops below the top"));
        }
        Ok(chain)
    }
}

impl<N: Display> Poset<N> {
    /// Chains obtained by replacing one middle node of a square face
    /// `u → v → w`, `u → v' → w`.
    fn square_flips(&self, nodes: &[usize]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..nodes.len().saturating_sub(2) {
            let (u, v, w) = (nodes[i], nodes[i + 1], nodes[i + 2]);
            let mids: Vec<usize> = self.out[u]
                .iter()
                .map(|&ci| self.covers[ci].to)
                .filter(|&x| self.out[x].iter().any(|&cj| self.covers[cj].to == w))
                .collect();
            if mids.len() == 2 {
                for x in mids.into_iter().filter(|&x| x != v) {
                    let mut n = nodes.to_vec();
                    n[i + 1] = x;
                    out.push(n);
                }
            }
        }
        out
    }

    /// Least node sequence reachable from `nodes` by square flips.
    pub fn class_key(&self, nodes: &[usize], limit: usize) -> Result<Vec<usize>> {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        seen.insert(nodes.to_vec());
        let mut stack = vec![nodes.to_vec()];
        while let Some(n) = stack.pop() {
            for m in self.square_flips(&n) {
                if seen.insert(m.clone()) {
                    if seen.len() > limit {
                        return Err(Error::ResourceGuard(format!("chain class exceeds {limit} members")));
                    }
                    stack.push(m);
                }
            }
        }
        Ok(seen.into_iter().next().expect("contains the chain itself"))
    }

    /// Groups chains that differ by commuting two independent steps. Classes
    /// appear in order of their first member.
    pub fn classes_of(&self, chains: &[Chain]) -> Result<Vec<Vec<usize>>> {
        group_by_key(chains.iter().map(|c| self.class_key(&c.nodes, 1 << 20)))
    }
}

fn group_by_key<K: Ord>(keys: impl Iterator<Item = Result<K>>) -> Result<Vec<Vec<usize>>> {
    let mut by_key: BTreeMap<K, usize> = BTreeMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, key) in keys.enumerate() {
        let key = key?;
        match by_key.get(&key) {
            Some(&c) => classes[c].push(i),
            None => {
                by_key.insert(key, classes.len());
                classes.push(vec![i]);
            }
        }
    }
    Ok(classes)
}

/// Commutation classes of maximal Tamari chains given as op words. The
/// lattice order is read off the largest site; every word must spell a
/// maximal chain of it.
pub fn chain_classes(words: &[OpWord]) -> Result<Vec<Vec<usize>>> {
    let Some(r) = words.iter().flat_map(|w| w.letters().iter().map(|l| l.site + 1)).max() else {
        return Ok((0..words.len()).map(|i| vec![i]).collect());
    };
    let t = crate::combinatorics::families::tamari(r)?;
    let chains = words.iter().map(|w| t.trace_word(w)).collect::<Result<Vec<_>>>()?;
    t.classes_of(&chains)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> CoverLabel {
        CoverLabel::Symbol(s.to_string())
    }

    fn diamond() -> Poset<&'static str> {
        let covers = vec![
            Cover { from: 0, to: 1, label: sym("x") },
            Cover { from: 0, to: 2, label: sym("y") },
            Cover { from: 1, to: 3, label: sym("z") },
            Cover { from: 2, to: 3, label: sym("w") },
        ];
        Poset::new(PosetKind::Custom, vec!["bot", "l", "r", "top"], covers).unwrap()
    }

    #[test]
    fn diamond_chains() {
        let p = diamond();
        assert_eq!(p.minimal(), vec![0]);
        assert_eq!(p.maximal(), vec![3]);
        assert_eq!(p.chain_count(), 2);
        let chains = p.maximal_chains(10).unwrap();
        assert_eq!(p.chain_labels(&chains[0]), vec!["x", "z"]);
        assert_eq!(chains[1].nodes, vec![0, 2, 3]);
        assert!(p.is_irreducible());
        assert!(matches!(p.maximal_chains(1), Err(Error::ResourceGuard(_))));
        assert!(p.chain_word(&chains[0]).is_err());
    }

    #[test]
    fn cycle_rejected() {
        let covers = vec![Cover { from: 0, to: 1, label: sym("x") }, Cover { from: 1, to: 0, label: sym("y") }];
        assert!(Poset::new(PosetKind::Custom, vec!["a", "b"], covers).is_err());
    }

    #[test]
    fn dot_is_stable() {
        let p = diamond();
        assert_eq!(p.to_dot(), p.to_dot());
        assert!(p.to_dot().contains("n0 -> n1 [label=\"x\"]"));
        assert_eq!(p.to_json()["nodes"][3], "top");
    }

    #[test]
    fn square_classes() {
        let p = diamond();
        let chains = p.maximal_chains(10).unwrap();
        assert_eq!(p.classes_of(&chains).unwrap(), vec![vec![0, 1]]);
        let words: Vec<OpWord> = ["a1 a2 a1", "a2 b1 a2"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(chain_classes(&words).unwrap(), vec![vec![0], vec![1]]);
        let words: Vec<OpWord> = ["a1 a2 a3 a1 a2 a1", "a1 a2 a1 a3 a2 a1"].iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(chain_classes(&words).unwrap(), vec![vec![0, 1]]);
        assert!(chain_classes(&["a2 a1".parse().unwrap()]).is_err());
    }
}
