//! Seeded random configurations and the oracle sweeps shared by the
//! acceptance suite, the benches and `kptrop check`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::verify_braid_rules;
use crate::critical::critical_value;
use crate::error::Result;
use crate::evolution::{classify_evolution, region_thresholds, table_conditions, with_mu_lambda};
use crate::exact::{rat, ratio, IndexSet, Rational};
use crate::model::SolitonConfig;
use crate::visibility::{prune_level, visible_hierarchy};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational `n/d` with `|n| ≤ num_bound` and `1 ≤ d ≤ den_bound`.
pub fn small_rational<R: Rng>(rng: &mut R, num_bound: i64, den_bound: i64) -> Rational {
    ratio(rng.gen_range(-num_bound..=num_bound), rng.gen_range(1..=den_bound))
}

/// Strictly increasing distinct momenta on a quarter grid in `[-4, 4]`.
pub fn random_momenta<R: Rng>(rng: &mut R, count: usize) -> Vec<Rational> {
    let mut grid: Vec<i64> = (-16..=16).collect();
    grid.shuffle(rng);
    let mut picks: Vec<i64> = grid[..count].to_vec();
    picks.sort();
    picks.into_iter().map(|k| ratio(k, 4)).collect()
}

/// Random simple-class configuration with `M + 1` phases and random
/// frozen higher times `t⁽⁴⁾ … t⁽ᴹ⁾`.
pub fn random_config<R: Rng>(rng: &mut R, m: usize) -> SolitonConfig {
    let p = random_momenta(rng, m + 1);
    let c: Vec<Rational> = (0..=m).map(|_| small_rational(rng, 20, 3)).collect();
    let mut times = BTreeMap::new();
    for r in 4..=m {
        times.insert(r, small_rational(rng, 6, 2));
    }
    SolitonConfig::new(m, p, c, None, times).expect("valid by construction")
}

/// Outcome of the analytic-versus-oracle visibility sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VisibilitySweep {
    /// Critical points whose analytic and direct verdicts were compared.
    pub point_checks: usize,
    /// Parent critical values straddled.
    pub parents: usize,
    pub disagreements: Vec<String>,
}

/// For every level `n ≥ 2` and every parent set of size `n + 1`, places
/// `t⁽ⁿ⁾` just below and just above the parent critical value and re-runs
/// the analytic pruning of levels `n − 1 … 1`, which checks each child
/// against direct dominance. Levels `≥ n` do not depend on `t⁽ⁿ⁾`.
pub fn visibility_sweep(config: &SolitonConfig) -> Result<VisibilitySweep> {
    let mut out = VisibilitySweep::default();
    let total = config.phases();
    for n in 2..=config.m().min(config.horizon()) {
        let upper = match visible_hierarchy(config, n) {
            Ok(reports) => reports.last().expect("top").visible_sets(),
            Err(crate::Error::Inconsistency(msg)) => {
                out.disagreements.push(msg);
                continue;
            }
            Err(e) => return Err(e),
        };
        let parents = IndexSet::all_of_size(total, n + 1);
        let mut values: Vec<Rational> =
            parents.iter().map(|s| critical_value(config, s).map(|c| c.value)).collect::<Result<_>>()?;
        values.sort();
        values.dedup();
        let gap = values.windows(2).map(|w| &w[1] - &w[0]).min().unwrap_or_else(|| ratio(2, 1));
        let delta = gap / Rational::from_integer(4.into());
        for v in &values {
            out.parents += 1;
            for t in [v - &delta, v + &delta] {
                let cfg = config.with_time(n, t)?;
                let mut visible = upper.clone();
                for level in (1..n).rev() {
                    match prune_level(&cfg, level, &visible) {
                        Ok(report) => {
                            out.point_checks += IndexSet::all_of_size(total, level + 1).len();
                            visible = report.visible_sets();
                        }
                        Err(crate::Error::Inconsistency(msg)) => {
                            out.disagreements.push(msg);
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A nonzero rational offset.
pub fn nonzero_rational<R: Rng>(rng: &mut R, num_bound: i64, den_bound: i64) -> Rational {
    loop {
        let q = small_rational(rng, num_bound, den_bound);
        if !q.is_zero() {
            return q;
        }
    }
}

/// The six-soliton configuration of the worked `M = 5` example, before
/// `t⁽⁴⁾`, `t⁽⁵⁾` are set.
pub fn fig12_base() -> SolitonConfig {
    let p = vec![rat(-2), ratio(-3, 2), rat(-1), ratio(1, 2), ratio(5, 4), rat(2)];
    let c = vec![rat(10), rat(0), rat(0), rat(0), rat(0), rat(-10)];
    SolitonConfig::new(5, p, c, None, BTreeMap::new()).expect("valid")
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableSweep {
    pub samples: usize,
    /// Samples off every region boundary with no simultaneous events.
    pub generic: usize,
    /// Generic samples per row `1..=9` (index 0 unused).
    pub per_region: [usize; 10],
    pub mismatches: Vec<String>,
}

/// Random `(λ, μ)` for the worked `M = 5` momenta, `cases` per row, each
/// drawn strictly inside the row's `λ/μ` interval. Compares the row from
/// the inequalities with the row found by classifying the evolution.
pub fn table_sweep<R: Rng>(rng: &mut R, cases: usize) -> Result<TableSweep> {
    let base = fig12_base();
    let th: BTreeMap<&str, Rational> = region_thresholds(base.p())?.into_iter().collect();
    let span = rat(4);
    // (row, sign of μ, lower ρ, upper ρ)
    let rows: Vec<(usize, i64, Rational, Rational)> = vec![
        (1, -1, th["A"].clone(), &th["A"] + &span),
        (2, -1, th["B"].clone(), th["A"].clone()),
        (3, -1, th["C"].clone(), th["B"].clone()),
        (4, -1, th["D"].clone(), th["C"].clone()),
        (5, -1, th["E"].clone(), th["D"].clone()),
        (6, -1, &th["E"] - &span, th["E"].clone()),
        (6, 1, th["F"].clone(), &th["F"] + &span),
        (7, 1, th["G"].clone(), th["F"].clone()),
        (8, 1, th["H"].clone(), th["G"].clone()),
        (9, 1, &th["H"] - &span, th["H"].clone()),
    ];
    let mut out = TableSweep::default();
    for (row, sign, lo, hi) in rows {
        for _ in 0..cases {
            let frac = ratio(rng.gen_range(1..=99), 100);
            let rho = &lo + (&hi - &lo) * frac;
            let mu = ratio(sign * rng.gen_range(1..=40), rng.gen_range(1..=8));
            let lambda = &rho * &mu;
            out.samples += 1;
            let cfg = with_mu_lambda(&base, &mu, &lambda)?;
            let report = table_conditions(&cfg)?;
            let chain = classify_evolution(&cfg)?;
            if report.region.is_none() || chain.has_degenerate_steps() {
                continue;
            }
            out.generic += 1;
            if report.region == Some(row) {
                out.per_region[row] += 1;
            }
            if report.region != chain.table_type || report.region != Some(row) {
                out.mismatches.push(format!(
                    "λ={lambda} μ={mu}: target row {row}, inequalities {:?}, evolution {:?}",
                    report.region, chain.table_type
                ));
            }
        }
    }
    Ok(out)
}

/// Braid identities checked on every level sequence they apply to, for
/// `r = 3 … max_r`. Returns the number of checked instances.
pub fn braid_sweep(max_r: usize) -> Result<usize> {
    let mut total = 0;
    for r in 3..=max_r {
        total += verify_braid_rules(r)?.values().sum::<usize>();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_deterministic() {
        let a = random_config(&mut rng(7), 5);
        let b = random_config(&mut rng(7), 5);
        assert_eq!(a, b);
        assert_eq!(a.phases(), 6);
    }

    #[test]
    fn sweep_agrees_on_small_config() {
        let cfg = random_config(&mut rng(1), 4);
        let sweep = visibility_sweep(&cfg).unwrap();
        assert!(sweep.disagreements.is_empty(), "{:?}", sweep.disagreements);
        assert!(sweep.point_checks > 0);
    }

    #[test]
    fn table_sweep_small() {
        let sweep = table_sweep(&mut rng(3), 1).unwrap();
        assert!(sweep.mismatches.is_empty(), "{:?}", sweep.mismatches);
        assert_eq!(sweep.samples, 10);
    }
}
