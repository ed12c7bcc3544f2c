//! Level sequences `(n₁ … n_r)` with `1 ≤ n_i ≤ i` and the `σ`, `a`, `b` moves.
//!
//! The move with site `s` acts on the pair at 1-based positions
//! `(r−s, r−s+1)`, i.e. the `s`-th pair counted from the right.
//! Words are stored in application order (leftmost letter applied first).

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelSeq(Vec<usize>);

/// A level sequence that is also nondecreasing: the canonical tree code.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TamariSeq(Vec<usize>);

impl LevelSeq {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        for (i, &n) in entries.iter().enumerate() {
            if n < 1 || n > i + 1 {
                return invalid(format!("entry {n} at position {} violates 1 ≤ n_i ≤ i", i + 1));
            }
        }
        Ok(LevelSeq(entries))
    }

    pub fn min(r: usize) -> Self {
        LevelSeq(vec![1; r])
    }

    pub fn max(r: usize) -> Self {
        LevelSeq((1..=r).collect())
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_tamari(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn to_tamari(&self) -> Option<TamariSeq> {
        self.is_tamari().then(|| TamariSeq(self.0.clone()))
    }

    /// All `r!` elements, lexicographic.
    pub fn all(r: usize) -> Vec<LevelSeq> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(r);
        fn rec(r: usize, cur: &mut Vec<usize>, out: &mut Vec<LevelSeq>) {
            if cur.len() == r {
                out.push(LevelSeq(cur.clone()));
                return;
            }
            for n in 1..=cur.len() + 1 {
                cur.push(n);
                rec(r, cur, out);
                cur.pop();
            }
        }
        rec(r, &mut cur, &mut out);
        out
    }
}

impl TamariSeq {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        let level = LevelSeq::new(entries)?;
        level.to_tamari().ok_or_else(|| Error::Invalid(format!("{level} is not nondecreasing")))
    }

    pub fn min(r: usize) -> Self {
        TamariSeq(vec![1; r])
    }

    pub fn max(r: usize) -> Self {
        TamariSeq((1..=r).collect())
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_level(&self) -> LevelSeq {
        LevelSeq(self.0.clone())
    }

    /// All Catalan-many elements, lexicographic.
    pub fn all(r: usize) -> Vec<TamariSeq> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(r);
        fn rec(r: usize, cur: &mut Vec<usize>, out: &mut Vec<TamariSeq>) {
            if cur.len() == r {
                out.push(TamariSeq(cur.clone()));
                return;
            }
            let lo = cur.last().copied().unwrap_or(1);
            for n in lo..=cur.len() + 1 {
                cur.push(n);
                rec(r, cur, out);
                cur.pop();
            }
        }
        rec(r, &mut cur, &mut out);
        out
    }
}

fn fmt_entries(v: &[usize], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let parts: Vec<String> = v.iter().map(|n| n.to_string()).collect();
    write!(f, "({})", parts.join(","))
}

impl fmt::Display for LevelSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_entries(&self.0, f)
    }
}

impl fmt::Debug for LevelSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_entries(&self.0, f)
    }
}

impl fmt::Display for TamariSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_entries(&self.0, f)
    }
}

impl fmt::Debug for TamariSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_entries(&self.0, f)
    }
}

impl Serialize for LevelSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl Serialize for TamariSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub op: Op,
    pub site: usize,
}

impl Letter {
    pub fn a(site: usize) -> Self {
        Letter { op: Op::A, site }
    }

    pub fn b(site: usize) -> Self {
        Letter { op: Op::B, site }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.op {
            Op::A => 'a',
            Op::B => 'b',
        };
        write!(f, "{c}{}", self.site)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpWord(pub Vec<Letter>);

impl OpWord {
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, op: Op) -> usize {
        self.0.iter().filter(|l| l.op == op).count()
    }

    pub fn concat(&self, other: &OpWord) -> OpWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        OpWord(v)
    }

    /// Reads a word written as an operator composition (rightmost letter
    /// applied first) into application order.
    pub fn from_composition(text: &str) -> Result<OpWord> {
        let mut w: OpWord = text.parse()?;
        w.0.reverse();
        Ok(w)
    }

    pub fn to_composition(&self) -> String {
        let mut rev = self.0.clone();
        rev.reverse();
        OpWord(rev).to_string()
    }

    /// Compact form `a1a2b1`.
    pub fn compact(&self) -> String {
        self.0.iter().map(|l| l.to_string()).collect()
    }
}

impl fmt::Display for OpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for OpWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.compact())
    }
}

impl FromStr for OpWord {
    type Err = Error;

    /// Accepts `a1 a2 b1`, `a1a2b1` or `a_1 b_2`; sites are decimal.
    fn from_str(text: &str) -> Result<OpWord> {
        let mut letters = Vec::new();
        let mut chars = text.chars().filter(|c| !c.is_whitespace() && *c != '_').peekable();
        while let Some(c) = chars.next() {
            let op = match c {
                'a' => Op::A,
                'b' => Op::B,
                _ => return invalid(format!("unexpected {c:?} in word {text:?}")),
            };
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let site = digits
                .parse::<usize>()
                .ok()
                .filter(|&s| s >= 1)
                .ok_or_else(|| Error::Invalid(format!("missing site in word {text:?}")))?;
            letters.push(Letter { op, site });
        }
        Ok(OpWord(letters))
    }
}

/// 0-based positions of the pair with site `s` in a sequence of length `r`.
pub fn pair_positions(r: usize, s: usize) -> Result<(usize, usize)> {
    if s < 1 || s + 1 > r {
        return invalid(format!("site {s} outside 1..={}", r.saturating_sub(1)));
    }
    Ok((r - s - 1, r - s))
}

/// `σ(m,n) = (n, m+1)` for `m ≥ n`, `(n−1, m)` for `m < n`.
pub fn sigma(m: usize, n: usize) -> (usize, usize) {
    if m >= n {
        (n, m + 1)
    } else {
        (n - 1, m)
    }
}

pub fn sigma_s(seq: &LevelSeq, s: usize) -> Result<LevelSeq> {
    let (i, j) = pair_positions(seq.len(), s)?;
    let mut v = seq.0.clone();
    let (x, y) = sigma(v[i], v[j]);
    v[i] = x;
    v[j] = y;
    Ok(LevelSeq(v))
}

/// Whether the letter's domain condition holds.
pub fn applicable(seq: &LevelSeq, letter: Letter) -> bool {
    match pair_positions(seq.len(), letter.site) {
        Ok((i, j)) => match letter.op {
            Op::A => seq.0[i] == seq.0[j],
            Op::B => seq.0[i] > seq.0[j],
        },
        Err(_) => false,
    }
}

/// `a(n,n) = (n,n+1)`, `b(m,n) = (n,m+1)` for `m > n`.
pub fn apply_op(seq: &LevelSeq, letter: Letter) -> Result<LevelSeq> {
    if !applicable(seq, letter) {
        return invalid(format!("{letter} not applicable to {seq}"));
    }
    sigma_s(seq, letter.site)
}

pub fn apply_word(seq: &LevelSeq, word: &OpWord) -> Result<LevelSeq> {
    let mut cur = seq.clone();
    for &l in word.letters() {
        cur = apply_op(&cur, l)?;
    }
    Ok(cur)
}

/// Whether both words apply from `start` and end at the same sequence.
pub fn braid_check(w1: &OpWord, w2: &OpWord, start: &LevelSeq) -> Result<bool> {
    Ok(apply_word(start, w1)? == apply_word(start, w2)?)
}

/// The rewrite identities among `a`/`b` moves, in application order, for
/// sites `s` and `s+1`.
pub fn braid_identities(s: usize) -> Vec<(&'static str, OpWord, OpWord)> {
    let (a, b) = (Letter::a, Letter::b);
    let t = s + 1;
    vec![
        ("aaa", OpWord(vec![a(s), a(t), a(s)]), OpWord(vec![a(t), b(s), a(t)])),
        ("abb", OpWord(vec![a(s), b(t), b(s)]), OpWord(vec![b(t), b(s), a(t)])),
        ("bba", OpWord(vec![b(s), b(t), a(s)]), OpWord(vec![a(t), b(s), b(t)])),
        ("bbb", OpWord(vec![b(s), b(t), b(s)]), OpWord(vec![b(t), b(s), b(t)])),
    ]
}

/// Checks every braid identity and every far commutation wherever both
/// sides apply in `S_r`. Returns the number of instances checked per rule.
pub fn verify_braid_rules(r: usize) -> Result<std::collections::BTreeMap<&'static str, usize>> {
    let all = LevelSeq::all(r);
    let mut checked = std::collections::BTreeMap::new();
    for s in 1..r.saturating_sub(1) {
        for (name, lhs, rhs) in braid_identities(s) {
            let mut hits = 0;
            for seq in &all {
                let (l, rr) = (apply_word(seq, &lhs), apply_word(seq, &rhs));
                match (l, rr) {
                    (Ok(x), Ok(y)) => {
                        if x != y {
                            return crate::error::inconsistency(format!("braid {name} fails at {seq}"));
                        }
                        hits += 1;
                    }
                    (Ok(_), Err(_)) | (Err(_), Ok(_)) => {
                        return crate::error::inconsistency(format!("braid {name}: one side only applies at {seq}"));
                    }
                    _ => {}
                }
            }
            *checked.entry(name).or_insert(0) += hits;
        }
    }
    for s in 1..r {
        for s2 in s + 2..r {
            for (o1, o2) in [(Op::A, Op::A), (Op::A, Op::B), (Op::B, Op::A), (Op::B, Op::B)] {
                let x = Letter { op: o1, site: s };
                let y = Letter { op: o2, site: s2 };
                let w1 = OpWord(vec![x, y]);
                let w2 = OpWord(vec![y, x]);
                for seq in &all {
                    if let (Ok(p), Ok(q)) = (apply_word(seq, &w1), apply_word(seq, &w2)) {
                        if p != q {
                            return crate::error::inconsistency(format!("far commutation fails at {seq}"));
                        }
                        *checked.entry("far").or_insert(0) += 1;
                    }
                }
            }
        }
    }
    Ok(checked)
}
