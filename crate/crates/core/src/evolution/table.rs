//! The nine `M = 5` evolution types and their parameter regions, in the
//! `(λ, μ)` form and in the `t⁽⁴⁾` form.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::critical::{critical_value, level_critical_value};
use crate::error::{invalid, Result};
use crate::exact::{rat, IndexSet, Rational};
use crate::model::SolitonConfig;

/// Critical-time sequences of the nine maximal chains of the Tamari
/// lattice on four nodes, for `M = 5`.
pub const TABLE1: [&[[usize; 4]]; 9] = [
    &[[1, 2, 3, 4], [1, 2, 4, 5], [2, 3, 4, 5], [1, 2, 5, 6], [2, 3, 5, 6], [3, 4, 5, 6]],
    &[[1, 2, 3, 4], [1, 2, 4, 5], [1, 2, 5, 6], [2, 3, 4, 5], [2, 3, 5, 6], [3, 4, 5, 6]],
    &[[1, 2, 3, 4], [1, 2, 4, 5], [1, 2, 5, 6], [2, 4, 5, 6], [2, 3, 4, 6]],
    &[[1, 2, 3, 4], [1, 4, 5, 6], [1, 2, 4, 6], [2, 3, 4, 6]],
    &[[1, 4, 5, 6], [1, 2, 3, 4], [1, 2, 4, 6], [2, 3, 4, 6]],
    &[[1, 4, 5, 6], [1, 3, 4, 6], [1, 2, 3, 6]],
    &[[1, 3, 4, 5], [1, 3, 5, 6], [3, 4, 5, 6], [1, 2, 3, 6]],
    &[[1, 3, 4, 5], [1, 3, 5, 6], [1, 2, 3, 6], [3, 4, 5, 6]],
    &[[1, 3, 4, 5], [1, 2, 3, 5], [1, 2, 5, 6], [2, 3, 5, 6], [3, 4, 5, 6]],
];

pub(crate) fn row_sets(row: &[[usize; 4]]) -> Vec<IndexSet> {
    row.iter().map(|q| IndexSet::from_slice(q).expect("distinct")).collect()
}

fn set(v: &[usize]) -> IndexSet {
    IndexSet::from_slice(v).expect("distinct")
}

/// Sets `t⁽⁵⁾ = t⁽⁵⁾_{123456} + λ`, then `t⁽⁴⁾ = t⁽⁴⁾_{12345} + μ` (the latter
/// evaluated at the new `t⁽⁵⁾`).
pub fn with_mu_lambda(config: &SolitonConfig, mu: &Rational, lambda: &Rational) -> Result<SolitonConfig> {
    if config.m() != 5 {
        return invalid("the (λ, μ) parametrization needs M = 5");
    }
    let t5 = critical_value(config, &IndexSet::range(6))?.value + lambda;
    let cfg = config.with_time(5, t5)?;
    let t4 = critical_value(&cfg, &IndexSet::range(5))?.value + mu;
    cfg.with_time(4, t4)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableReport {
    #[serde(with = "crate::exact::serde_rational")]
    pub mu: Rational,
    #[serde(with = "crate::exact::serde_rational")]
    pub lambda: Rational,
    /// Region from the `λ/μ` inequalities; `None` on a boundary.
    pub region: Option<usize>,
    /// Rows whose `t⁽⁴⁾` conditions hold.
    pub t4_regions: Vec<usize>,
    /// The inequalities that decided `region`, as text.
    pub conditions: Vec<String>,
}

impl TableReport {
    pub fn is_degenerate(&self) -> bool {
        self.region.is_none()
    }
}

fn cmp_text(a: &Rational, b: &Rational, name_a: &str, name_b: &str) -> String {
    let op = match a.cmp(b) {
        Ordering::Less => "<",
        Ordering::Equal => "=",
        Ordering::Greater => ">",
    };
    format!("{name_a} {op} {name_b}")
}

/// The `λ/μ` thresholds `A … H` separating the rows, for six momenta.
pub fn region_thresholds(p: &[Rational]) -> Result<Vec<(&'static str, Rational)>> {
    if p.len() != 6 {
        return invalid("table regions need six momenta");
    }
    let q = |i: usize| &p[i - 1];
    let one = rat(1);
    Ok(vec![
        ("A", (q(3) + q(4) - q(1) - q(6)) / ((q(3) - q(6)) * (q(4) - q(6)))),
        ("B", &one / (q(1) - q(6))),
        ("C", &one / (q(3) - q(6))),
        ("D", (q(2) + q(3) - q(5) - q(6)) / ((q(2) - q(6)) * (q(3) - q(6)))),
        ("E", &one / (q(5) - q(6))),
        ("F", &one / (q(2) - q(6))),
        ("G", (q(1) + q(2) - q(4) - q(5)) / (q(1) * q(2) - q(4) * q(5) + (q(4) + q(5) - q(1) - q(2)) * q(6))),
        ("H", &one / (q(4) - q(6))),
    ])
}

/// Region by the `λ/μ` thresholds. Returns the row and the comparisons made.
pub fn table1_region(p: &[Rational], mu: &Rational, lambda: &Rational) -> Result<(Option<usize>, Vec<String>)> {
    let th = region_thresholds(p)?;
    let (a, b, c, d, e, f, g, h) = (&th[0].1, &th[1].1, &th[2].1, &th[3].1, &th[4].1, &th[5].1, &th[6].1, &th[7].1);
    let mut notes = Vec::new();
    if mu.is_zero() {
        notes.push("μ = 0".to_string());
        return Ok(match lambda.cmp(&Rational::zero()) {
            Ordering::Greater => {
                notes.push("λ > 0".to_string());
                (Some(6), notes)
            }
            _ => {
                notes.push("λ ≤ 0".to_string());
                (None, notes)
            }
        });
    }
    let rho = lambda / mu;
    // descending thresholds; region k lies between thresholds k−1 and k
    let (rows, cuts): (Vec<usize>, Vec<(&str, &Rational)>) = if mu.is_negative() {
        notes.push("μ < 0".to_string());
        (vec![1, 2, 3, 4, 5, 6], vec![("A", a), ("B", b), ("C", c), ("D", d), ("E", e)])
    } else {
        notes.push("μ > 0".to_string());
        (vec![6, 7, 8, 9], vec![("F", f), ("G", g), ("H", h)])
    };
    for (idx, (name, cut)) in cuts.iter().enumerate() {
        notes.push(cmp_text(&rho, cut, "λ/μ", name));
        match rho.cmp(cut) {
            Ordering::Greater => return Ok((Some(rows[idx]), notes)),
            Ordering::Equal => return Ok((None, notes)),
            Ordering::Less => {}
        }
    }
    Ok((Some(*rows.last().expect("rows")), notes))
}

/// Rows whose `t⁽⁴⁾`-form conditions hold. Undefined level crossings
/// (equal momentum sums) drop out of the minima they appear in.
pub fn table3_regions(config: &SolitonConfig) -> Result<Vec<usize>> {
    if config.m() != 5 {
        return invalid("the t4 table needs M = 5");
    }
    let t4 = config.time(4);
    let cv = |s: &[usize]| critical_value(config, &set(s)).map(|c| Some(c.value));
    let lv = |a: &[usize], b: &[usize]| -> Result<Option<Rational>> {
        match level_critical_value(config, &set(a), &set(b)) {
            Ok(v) => Ok(Some(v.value)),
            Err(crate::Error::Invalid(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let v12345 = cv(&[1, 2, 3, 4, 5])?;
    let v23456 = cv(&[2, 3, 4, 5, 6])?;
    let v12456 = cv(&[1, 2, 4, 5, 6])?;
    let v12346 = cv(&[1, 2, 3, 4, 6])?;
    let v12356 = cv(&[1, 2, 3, 5, 6])?;
    let v13456 = cv(&[1, 3, 4, 5, 6])?;
    let x2345_1256 = lv(&[2, 3, 4, 5], &[1, 2, 5, 6])?;
    let x1234_1456 = lv(&[1, 2, 3, 4], &[1, 4, 5, 6])?;
    let x1236_3456 = lv(&[1, 2, 3, 6], &[3, 4, 5, 6])?;
    let below_all = |vals: &[&Option<Rational>]| vals.iter().all(|v| v.as_ref().map_or(true, |v| t4 < *v));
    let above_all = |vals: &[&Option<Rational>]| vals.iter().all(|v| v.as_ref().map_or(true, |v| t4 > *v));
    let above = |v: &Option<Rational>| v.as_ref().map_or(false, |v| t4 > *v);
    let conds = [
        below_all(&[&v12345, &v23456, &x2345_1256]),
        above(&x2345_1256) && below_all(&[&v12345, &v23456]),
        above(&v23456) && below_all(&[&v12345, &v12456]),
        above(&v12456) && below_all(&[&v12346, &x1234_1456]),
        above(&x1234_1456) && below_all(&[&v12346]),
        above_all(&[&v12346, &v13456]),
        above(&v12345) && below_all(&[&v12356, &v23456]),
        above(&v12356) && below_all(&[&v13456, &x1236_3456]),
        above(&x1236_3456) && below_all(&[&v13456]),
    ];
    Ok(conds.iter().enumerate().filter(|(_, &c)| c).map(|(i, _)| i + 1).collect())
}

pub fn table_conditions(config: &SolitonConfig) -> Result<TableReport> {
    if config.m() != 5 {
        return invalid("table conditions need M = 5");
    }
    let lambda = config.time(5) - critical_value(config, &IndexSet::range(6))?.value;
    let mu = config.time(4) - critical_value(config, &IndexSet::range(5))?.value;
    let (region, conditions) = table1_region(config.p(), &mu, &lambda)?;
    let t4_regions = table3_regions(config)?;
    Ok(TableReport { mu, lambda, region, t4_regions, conditions })
}

/// Which additional `t⁽⁴⁾` level crossings fall inside the ordered window
/// of ordinary critical values, on the current side of `t⁽⁵⁾_{123456}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCrossingReport {
    /// Sign of `λ = t⁽⁵⁾ − t⁽⁵⁾_{123456}`.
    pub lambda_sign: i8,
    /// Sign of `p₁ + p₆ − p₃ − p₄`.
    pub sum_sign: i8,
    /// `t⁽⁴⁾_{1256;2345}` lies below `t⁽⁴⁾_{12345}` (λ < 0) or `t⁽⁴⁾_{23456}` (λ > 0).
    pub x1256_2345_present: bool,
    /// `t⁽⁴⁾_{1236;3456}` between `t⁽⁴⁾_{12356}` and `t⁽⁴⁾_{13456}` (λ < 0), or
    /// `t⁽⁴⁾_{1234;1456}` between `t⁽⁴⁾_{12456}` and `t⁽⁴⁾_{12346}` (λ > 0).
    pub inner_present: bool,
}

fn sign_of(q: &Rational) -> i8 {
    match q.cmp(&Rational::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

pub fn level_crossings(config: &SolitonConfig) -> Result<LevelCrossingReport> {
    if config.m() != 5 {
        return invalid("level crossings of t4 need M = 5");
    }
    let lambda = config.time(5) - critical_value(config, &IndexSet::range(6))?.value;
    let p = config.p();
    let sum = &p[0] + &p[5] - &p[2] - &p[3];
    let cv = |s: &[usize]| critical_value(config, &set(s)).map(|c| c.value);
    let lv = |a: &[usize], b: &[usize]| -> Result<Option<Rational>> {
        match level_critical_value(config, &set(a), &set(b)) {
            Ok(v) => Ok(Some(v.value)),
            Err(crate::Error::Invalid(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let x = lv(&[1, 2, 5, 6], &[2, 3, 4, 5])?;
    let (x_present, inner_present) = if lambda < Rational::zero() {
        let inner = lv(&[1, 2, 3, 6], &[3, 4, 5, 6])?;
        let lo = cv(&[1, 2, 3, 5, 6])?;
        let hi = cv(&[1, 3, 4, 5, 6])?;
        let top = cv(&[1, 2, 3, 4, 5])?;
        (x.map_or(false, |v| v < top), inner.map_or(false, |v| lo < v && v < hi))
    } else {
        let inner = lv(&[1, 2, 3, 4], &[1, 4, 5, 6])?;
        let lo = cv(&[1, 2, 4, 5, 6])?;
        let hi = cv(&[1, 2, 3, 4, 6])?;
        let top = cv(&[2, 3, 4, 5, 6])?;
        (x.map_or(false, |v| v < top), inner.map_or(false, |v| lo < v && v < hi))
    };
    Ok(LevelCrossingReport {
        lambda_sign: sign_of(&lambda),
        sum_sign: sign_of(&sum),
        x1256_2345_present: x_present,
        inner_present,
    })
}
