//! Simple-class soliton configurations and exact phase evaluation.
//!
//! Phases are `θ_k = Σ_{r=1}^{N} p_k^r t⁽ʳ⁾ + c_k` with `t⁽¹⁾ = x`, `t⁽²⁾ = y`,
//! `t⁽³⁾ = t`. Higher times stay explicit and are merged at evaluation.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{fmt_rational, parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolitonConfig {
    m: usize,
    p: Vec<Rational>,
    c: Vec<Rational>,
    horizon: usize,
    times: BTreeMap<usize, Rational>,
}

/// Coordinates `t⁽¹⁾ … t⁽ᴺ⁾`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpacetimePoint(#[serde(with = "crate::exact::serde_rational_vec")] pub Vec<Rational>);

impl SpacetimePoint {
    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    /// `t⁽ʳ⁾`, 1-based.
    pub fn t(&self, r: usize) -> &Rational {
        &self.0[r - 1]
    }
}

pub fn default_horizon(m: usize) -> usize {
    m.max(3)
}

impl SolitonConfig {
    /// Validates and builds a configuration, listing every violated invariant.
    ///
    /// `horizon` defaults to `max(M, 3)` so that `x, y, t` always exist.
    pub fn new(
        m: usize,
        p: Vec<Rational>,
        c: Vec<Rational>,
        horizon: Option<usize>,
        times: BTreeMap<usize, Rational>,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        if m < 1 {
            problems.push("M must be at least 1".to_string());
        }
        if p.len() != m + 1 {
            problems.push(format!("p has {} entries, expected M+1 = {}", p.len(), m + 1));
        }
        if c.len() != m + 1 {
            problems.push(format!("c has {} entries, expected M+1 = {}", c.len(), m + 1));
        }
        if p.windows(2).any(|w| w[0] >= w[1]) {
            problems.push("p not strictly increasing".to_string());
        }
        let horizon = horizon.unwrap_or_else(|| default_horizon(m));
        if horizon < m {
            problems.push(format!("horizon {horizon} below M = {m}"));
        }
        for &r in times.keys() {
            if r == 0 || r > horizon {
                problems.push(format!("time t{r} outside 1..={horizon}"));
            }
        }
        if !problems.is_empty() {
            return invalid(problems.join("; "));
        }
        let times = times.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(SolitonConfig { m, p, c, horizon, times })
    }

    /// Configuration with all times zero and default horizon.
    pub fn simple(p: Vec<Rational>, c: Vec<Rational>) -> Result<Self> {
        let m = p.len().saturating_sub(1);
        Self::new(m, p, c, None, BTreeMap::new())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of phases, `M + 1`.
    pub fn phases(&self) -> usize {
        self.m + 1
    }

    pub fn p(&self) -> &[Rational] {
        &self.p
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    /// `p_k`, 1-based.
    pub fn p_at(&self, k: usize) -> &Rational {
        &self.p[k - 1]
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Frozen value of `t⁽ʳ⁾`; zero when unset or beyond the horizon.
    pub fn time(&self, r: usize) -> Rational {
        self.times.get(&r).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn times(&self) -> &BTreeMap<usize, Rational> {
        &self.times
    }

    pub fn with_time(&self, r: usize, value: Rational) -> Result<Self> {
        if r == 0 || r > self.horizon {
            return invalid(format!("time t{r} outside 1..={}", self.horizon));
        }
        let mut next = self.clone();
        if value.is_zero() {
            next.times.remove(&r);
        } else {
            next.times.insert(r, value);
        }
        Ok(next)
    }

    pub fn with_c(&self, c: Vec<Rational>) -> Result<Self> {
        Self::new(self.m, self.p.clone(), c, Some(self.horizon), self.times.clone())
    }

    /// Point whose first coordinates are `lower` and the rest are the frozen times.
    pub fn complete_point(&self, lower: &[Rational]) -> Result<SpacetimePoint> {
        if lower.len() > self.horizon {
            return invalid(format!("{} coordinates exceed horizon {}", lower.len(), self.horizon));
        }
        let mut coords = lower.to_vec();
        for r in lower.len() + 1..=self.horizon {
            coords.push(self.time(r));
        }
        Ok(SpacetimePoint(coords))
    }

    /// Exact `θ_i` at a full point.
    pub fn phase_value(&self, i: usize, point: &SpacetimePoint) -> Result<Rational> {
        if i == 0 || i > self.phases() {
            return invalid(format!("phase index {i} outside 1..={}", self.phases()));
        }
        if point.0.len() != self.horizon {
            return invalid(format!(
                "point has dimension {}, horizon is {}",
                point.0.len(),
                self.horizon
            ));
        }
        Ok(self.phase_unchecked(i, &point.0))
    }

    pub(crate) fn phase_unchecked(&self, i: usize, coords: &[Rational]) -> Rational {
        let p = &self.p[i - 1];
        let mut pow = Rational::one();
        let mut total = self.c[i - 1].clone();
        for t in coords {
            pow *= p;
            total += &pow * t;
        }
        total
    }

    pub fn all_phases(&self, point: &SpacetimePoint) -> Result<Vec<Rational>> {
        (1..=self.phases()).map(|i| self.phase_value(i, point)).collect()
    }
}

/// On-disk configuration.
///
/// ```json
/// {"M": 5, "p": ["-2", "-3/2", "-1", "1/2", "5/4", "2"],
///  "c": ["10", "0", "0", "0", "0", "-10"],
///  "offsets": {"t5": "-1", "t4": "-2"}}
/// ```
///
/// `times` sets absolute values. `offsets` sets `t⁽ʳ⁾` relative to the
/// top critical value `t⁽ʳ⁾_{1…r+1}`, resolved from the highest time down,
/// so `{"t5": λ, "t4": μ}` reproduces the `(λ, μ)` parametrization.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "M")]
    pub m: usize,
    pub p: Vec<String>,
    pub c: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub times: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub offsets: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

/// `"x"`, `"y"`, `"t"` or `"tN"`.
pub fn parse_time_key(key: &str) -> Result<usize> {
    match key {
        "x" => Ok(1),
        "y" => Ok(2),
        "t" => Ok(3),
        _ => key
            .strip_prefix('t')
            .and_then(|r| r.parse::<usize>().ok())
            .filter(|&r| r >= 1)
            .ok_or_else(|| Error::Invalid(format!("unknown time key {key:?}"))),
    }
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("config JSON: {e}")))
    }

    pub fn build(&self) -> Result<SolitonConfig> {
        let p = self.p.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        let c = self.c.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        let mut times = BTreeMap::new();
        for (k, v) in &self.times {
            times.insert(parse_time_key(k)?, parse_rational(v)?);
        }
        let mut offsets = BTreeMap::new();
        for (k, v) in &self.offsets {
            let r = parse_time_key(k)?;
            if times.contains_key(&r) {
                return invalid(format!("{k} given both as time and offset"));
            }
            offsets.insert(r, parse_rational(v)?);
        }
        let mut config = SolitonConfig::new(self.m, p, c, self.horizon, times)?;
        for (&r, off) in offsets.iter().rev() {
            if r > config.m() {
                return invalid(format!("offset t{r} needs r ≤ M = {}", config.m()));
            }
            let top = crate::critical::critical_value(&config, &crate::exact::IndexSet::range(r + 1))?;
            config = config.with_time(r, top.value + off)?;
        }
        Ok(config)
    }

    pub fn from_config(config: &SolitonConfig) -> Self {
        ConfigFile {
            m: config.m(),
            p: config.p().iter().map(fmt_rational).collect(),
            c: config.c().iter().map(fmt_rational).collect(),
            times: config.times().iter().map(|(r, v)| (format!("t{r}"), fmt_rational(v))).collect(),
            offsets: BTreeMap::new(),
            horizon: Some(config.horizon()),
        }
    }
}

pub fn load_config_json(text: &str) -> Result<SolitonConfig> {
    ConfigFile::from_json(text)?.build()
}
