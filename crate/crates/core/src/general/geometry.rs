//! Boundary lines `θ_{S₁} = θ_{S₂}`, their intersections and the two worked
//! four-phase cases: the O-type shifts and the parallel P-type solitons.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exact::{rat, IndexSet, Rational};
use crate::general::{build_tau, GeneralTau, LogValue, TauTerm, WedgeSpec};
use crate::model::SolitonConfig;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryLine {
    /// `x = y_coeff·y + t_coeff·t + constant`.
    Solved {
        #[serde(with = "crate::exact::serde_rational")]
        y_coeff: Rational,
        #[serde(with = "crate::exact::serde_rational")]
        t_coeff: Rational,
        constant: LogValue,
    },
    /// Equal momentum sums: `dy·y + dt·t + constant = 0`, parallel to the x-axis.
    XParallel {
        #[serde(with = "crate::exact::serde_rational")]
        dy: Rational,
        #[serde(with = "crate::exact::serde_rational")]
        dt: Rational,
        constant: LogValue,
    },
}

impl BoundaryLine {
    pub fn x_at(&self, y: &LogValue, t: &LogValue) -> Option<LogValue> {
        match self {
            BoundaryLine::Solved { y_coeff, t_coeff, constant } => {
                Some(constant.clone() + y.clone() * y_coeff + t.clone() * t_coeff)
            }
            BoundaryLine::XParallel { .. } => None,
        }
    }

    /// Slope `dy/dx` of a solved line; `None` when vertical in this frame.
    pub fn slope(&self) -> Option<Rational> {
        match self {
            BoundaryLine::Solved { y_coeff, .. } if !y_coeff.is_zero() => Some(Rational::one() / y_coeff),
            BoundaryLine::Solved { .. } => None,
            BoundaryLine::XParallel { .. } => Some(Rational::zero()),
        }
    }
}

fn find<'a>(tau: &'a GeneralTau, key: &IndexSet) -> Result<&'a TauTerm> {
    tau.term(key).ok_or_else(|| Error::Invalid(format!("no term θ_{key} in τ")))
}

pub(crate) fn line_between(a: &TauTerm, b: &TauTerm) -> BoundaryLine {
    let d = |r: usize| &a.phase.linear[r] - &b.phase.linear[r];
    let k = a.phase.constant.clone() - b.phase.constant.clone();
    let (dx, dy, dt) = (d(0), d(1), d(2));
    if dx.is_zero() {
        return BoundaryLine::XParallel { dy, dt, constant: k };
    }
    let inv = -(Rational::one() / &dx);
    BoundaryLine::Solved { y_coeff: dy * &inv, t_coeff: dt * &inv, constant: k * &inv }
}

/// The line `x_{S₁,S₂}(y, t)` where `θ_{S₁} = θ_{S₂}`.
pub fn boundary_line(tau: &GeneralTau, s1: &IndexSet, s2: &IndexSet) -> Result<BoundaryLine> {
    if s1 == s2 {
        return invalid(format!("boundary of θ_{s1} with itself"));
    }
    Ok(line_between(find(tau, s1)?, find(tau, s2)?))
}

/// Intersection `(x, y)` of two solved lines at time `t`.
pub fn intersect(l1: &BoundaryLine, l2: &BoundaryLine, t: &LogValue) -> Result<(LogValue, LogValue)> {
    let (
        BoundaryLine::Solved { y_coeff: y1, t_coeff: t1, constant: k1 },
        BoundaryLine::Solved { y_coeff: y2, t_coeff: t2, constant: k2 },
    ) = (l1, l2)
    else {
        return invalid("intersection needs lines solved for x");
    };
    if y1 == y2 {
        return Err(Error::Degenerate("parallel boundary lines".into()));
    }
    let inv = -(Rational::one() / (y1 - y2));
    let y = (t.clone() * &(t1 - t2) + (k1.clone() - k2.clone())) * &inv;
    let x = l1.x_at(&y, t).expect("solved");
    Ok((x, y))
}

/// Time at which two parallel solved lines coincide.
pub fn coincidence_time(l1: &BoundaryLine, l2: &BoundaryLine) -> Result<LogValue> {
    let (
        BoundaryLine::Solved { y_coeff: y1, t_coeff: t1, constant: k1 },
        BoundaryLine::Solved { y_coeff: y2, t_coeff: t2, constant: k2 },
    ) = (l1, l2)
    else {
        return invalid("coincidence needs lines solved for x");
    };
    if y1 != y2 {
        return invalid("lines are not parallel");
    }
    if t1 == t2 {
        return Err(Error::Degenerate("lines move together".into()));
    }
    Ok((k2.clone() - k1.clone()) * &(Rational::one() / (t1 - t2)))
}

/// `ℓ(p_i, p_j, p_k, p_l) = log((p_k−p_i)(p_l−p_j) / ((p_l−p_i)(p_k−p_j)))`.
pub fn cross_ratio_log(pi: &Rational, pj: &Rational, pk: &Rational, pl: &Rational) -> Result<LogValue> {
    let den = (pl - pi) * (pk - pj);
    if den.is_zero() {
        return invalid("cross ratio with coinciding momenta");
    }
    LogValue::log(&(((pk - pi) * (pl - pj)) / den).abs())
}

/// Pairs of terms whose boundary is visible at height `y` and time `t`:
/// both phases attain the maximum at the boundary point.
pub fn visible_boundaries(tau: &GeneralTau, y: &LogValue, t: &LogValue) -> Result<Vec<(IndexSet, IndexSet)>> {
    let mut out = Vec::new();
    for a in 0..tau.terms.len() {
        for b in a + 1..tau.terms.len() {
            let (ta, tb) = (&tau.terms[a], &tau.terms[b]);
            if ta.key == tb.key {
                continue;
            }
            let Some(x) = line_between(ta, tb).x_at(y, t) else { continue };
            let top = tau.dominant(&[x, y.clone(), t.clone()])?;
            if top.contains(&a) && top.contains(&b) {
                out.push((ta.key.clone(), tb.key.clone()));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OTypeGeometry {
    /// `ℓ(p₁, p₂, p₃, p₄)`.
    pub ell: LogValue,
    /// `x_{13,14} − x_{23,24}`.
    pub sep_34: LogValue,
    /// `x_{14,24} − x_{13,23}`.
    pub sep_12: LogValue,
    /// `(x, y)` where `θ₁₃, θ₁₄, θ₂₄` meet.
    pub upper: (LogValue, LogValue),
    /// `(x, y)` where `θ₁₃, θ₂₃, θ₂₄` meet.
    pub lower: (LogValue, LogValue),
    pub dy_shift: LogValue,
    pub dx_shift: LogValue,
    /// `δy/δx`, rational because both shifts are multiples of `ℓ`.
    #[serde(with = "crate::exact::serde_rational")]
    pub slope: Rational,
}

/// Geometry of `(e₁+e₂)∧(e₃+e₄)` at time `t`.
pub fn otype_geometry(config: &SolitonConfig, t: &Rational) -> Result<OTypeGeometry> {
    if config.phases() != 4 {
        return invalid("the O-type needs four phases");
    }
    let tau = build_tau(config, &WedgeSpec::from_signed(&[&[1, 2], &[3, 4]]))?;
    let s = |v: &[usize]| IndexSet::from_slice(v).expect("distinct");
    let line = |a: &[usize], b: &[usize]| boundary_line(&tau, &s(a), &s(b));
    let (l13_14, l23_24, l13_23, l14_24) = (line(&[1, 3], &[1, 4])?, line(&[2, 3], &[2, 4])?, line(&[1, 3], &[2, 3])?, line(&[1, 4], &[2, 4])?);
    let t = LogValue::rational(t.clone());
    let zero = LogValue::zero();
    let x_at = |l: &BoundaryLine| l.x_at(&zero, &t).ok_or_else(|| Error::Inconsistency("O-type line not solvable".into()));
    let sep_34 = x_at(&l13_14)? - x_at(&l23_24)?;
    let sep_12 = x_at(&l14_24)? - x_at(&l13_23)?;
    let upper = intersect(&l13_14, &l14_24, &t)?;
    let lower = intersect(&l23_24, &l13_23, &t)?;
    let dy_shift = upper.1.clone() - lower.1.clone();
    let dx_shift = upper.0.clone() - lower.0.clone();
    let slope = dy_shift
        .ratio(&dx_shift)
        .ok_or_else(|| Error::Inconsistency(format!("shifts {dy_shift} and {dx_shift} not proportional")))?;
    let p = config.p();
    let ell = cross_ratio_log(&p[0], &p[1], &p[2], &p[3])?;
    Ok(OTypeGeometry { ell, sep_34, sep_12, upper, lower, dy_shift, dx_shift, slope })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParallelEvents {
    #[serde(with = "crate::exact::serde_rational_vec")]
    pub p: Vec<Rational>,
    #[serde(with = "crate::exact::serde_rational")]
    pub t0: Rational,
    pub delta_t: LogValue,
    pub t_minus: LogValue,
    pub t_plus: LogValue,
}

/// `p = ½(q−a−b, q−a, q+a, q+a+b)`, so that `p₁ + p₄ = p₂ + p₃`.
pub fn parallel_momenta(q: &Rational, a: &Rational, b: &Rational) -> Result<Vec<Rational>> {
    if !a.is_positive() || !b.is_positive() {
        return invalid("parallel solitons need a, b > 0");
    }
    let h = rat(1) / rat(2);
    Ok(vec![(q - a - b) * &h, (q - a) * &h, (q + a) * &h, (q + a + b) * h])
}

/// The P-type configuration `(e₁−e₄)∧(e₂+e₃)` with `p₁ + p₄ = p₂ + p₃`.
pub fn parallel_tau(q: &Rational, a: &Rational, b: &Rational, c: &[Rational]) -> Result<GeneralTau> {
    let p = parallel_momenta(q, a, b)?;
    let config = SolitonConfig::simple(p, c.to_vec())?;
    build_tau(&config, &WedgeSpec::from_signed(&[&[1, -4], &[2, 3]]))
}

/// Closed-form event times `t₀`, `t± = t₀ ± Δt`.
pub fn parallel_events(q: &Rational, a: &Rational, b: &Rational, c: &[Rational]) -> Result<ParallelEvents> {
    let p = parallel_momenta(q, a, b)?;
    if c.len() != 4 {
        return invalid("parallel solitons need four constants c");
    }
    let (two, four) = (rat(2), rat(4));
    let ab = a + b;
    let t0 = &four * (a * (&c[0] - &c[3]) - &ab * (&c[1] - &c[2])) / (a * b * &ab * (&two * a + b));
    let delta_t = LogValue::log(&(rat(1) + &two * a / b))? * &(&four / (a * &ab * (&two * a + b)));
    let t_minus = LogValue::rational(t0.clone()) - delta_t.clone();
    let t_plus = LogValue::rational(t0.clone()) + delta_t.clone();
    Ok(ParallelEvents { p, t0, delta_t, t_minus, t_plus })
}

/// Number of visible boundaries at `y = 0` for each sample time.
pub fn parallel_sweep(tau: &GeneralTau, times: &[Rational]) -> Result<Vec<(Rational, Vec<(IndexSet, IndexSet)>)>> {
    times
        .iter()
        .map(|t| Ok((t.clone(), visible_boundaries(tau, &LogValue::zero(), &LogValue::rational(t.clone()))?)))
        .collect()
}

/// Certified position of `t` relative to an exact event time.
pub fn cmp_time(t: &Rational, event: &LogValue) -> Result<Ordering> {
    LogValue::rational(t.clone()).try_cmp(event)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn s(v: &[usize]) -> IndexSet {
        IndexSet::from_slice(v).unwrap()
    }

    fn fig17() -> SolitonConfig {
        SolitonConfig::simple(
            vec![rat(-1), ratio(-1, 2), ratio(1, 4), ratio(5, 4)],
            vec![rat(0), rat(-10), rat(10), rat(0)],
        )
        .unwrap()
    }

    #[test]
    fn x_ik_jk_shift() {
        let cfg = fig17();
        let tau = build_tau(&cfg, &WedgeSpec::from_signed(&[&[1, 2], &[3, 4]])).unwrap();
        let p = cfg.p();
        // x_{13,23} = x_12 + log((p3−p1)/(p3−p2))/(p2−p1)
        let line = boundary_line(&tau, &s(&[1, 3]), &s(&[2, 3])).unwrap();
        let BoundaryLine::Solved { y_coeff, t_coeff, constant } = &line else { panic!() };
        assert_eq!(*y_coeff, -(&p[0] + &p[1]));
        assert_eq!(*t_coeff, -(&p[0] * &p[0] + &p[0] * &p[1] + &p[1] * &p[1]));
        let c12 = (&cfg.c()[0] - &cfg.c()[1]) / (&p[0] - &p[1]);
        let shift = LogValue::log(&((&p[2] - &p[0]) / (&p[2] - &p[1]))).unwrap() * &(rat(1) / (&p[1] - &p[0]));
        assert_eq!(*constant, shift + &(-c12));
    }

    #[test]
    fn otype_separations_and_slope() {
        let cfg = fig17();
        let g = otype_geometry(&cfg, &rat(0)).unwrap();
        let p = cfg.p();
        assert_eq!(g.sep_34.ratio(&g.ell), Some(rat(1) / (&p[3] - &p[2])));
        assert_eq!(g.sep_12.ratio(&g.ell), Some(-(rat(1) / (&p[1] - &p[0]))));
        let want_dy = (rat(1) / (&p[2] - &p[0] + &p[3] - &p[1])) * (rat(1) / (&p[3] - &p[2]) + rat(1) / (&p[1] - &p[0]));
        assert_eq!(g.dy_shift.ratio(&g.ell), Some(want_dy));
        let sq = |v: &Rational| v * v;
        let want = -(&p[1] - &p[0] + &p[3] - &p[2]) / (sq(&p[1]) - sq(&p[0]) + sq(&p[3]) - sq(&p[2]));
        assert_eq!(g.slope, want);
        // shifts do not move with t
        let later = otype_geometry(&cfg, &rat(7)).unwrap();
        assert_eq!(later.dy_shift, g.dy_shift);
        assert_eq!(later.sep_12, g.sep_12);
    }

    #[test]
    fn otype_visibility_at_triple_point() {
        let cfg = fig17();
        let tau = build_tau(&cfg, &WedgeSpec::from_signed(&[&[1, 2], &[3, 4]])).unwrap();
        let g = otype_geometry(&cfg, &rat(0)).unwrap();
        let (x, y) = g.lower.clone();
        let at = [x, y, LogValue::zero()];
        let v = |k: &[usize]| tau.term(&s(k)).unwrap().phase.eval(&at);
        assert_eq!(v(&[1, 3]), v(&[2, 3]));
        let p = cfg.p();
        let gap = v(&[2, 3]) - v(&[1, 4]);
        assert_eq!(gap, cross_ratio_log(&p[1], &p[0], &p[3], &p[2]).unwrap());
        assert_eq!(gap.signum().unwrap(), Ordering::Greater);
        // the 14/23 boundary is never visible
        for t in -5..=5 {
            for y in -10..=10 {
                let vis = visible_boundaries(&tau, &LogValue::rational(rat(y)), &LogValue::rational(rat(t))).unwrap();
                assert!(!vis.contains(&(s(&[1, 4]), s(&[2, 3]))));
            }
        }
    }

    #[test]
    fn parallel_lines_and_events() {
        let (q, a, b) = (rat(1), rat(1), ratio(1, 2));
        let c = vec![rat(0); 4];
        let ev = parallel_events(&q, &a, &b, &c).unwrap();
        assert_eq!(ev.t0, rat(0));
        assert_eq!(ev.delta_t, LogValue::log(&rat(5)).unwrap() * &ratio(16, 15));
        let tau = parallel_tau(&q, &a, &b, &c).unwrap();
        let line = |x: &[usize], y: &[usize]| boundary_line(&tau, &s(x), &s(y)).unwrap();
        for (l1, l2) in [(line(&[1, 2], &[1, 3]), line(&[2, 4], &[3, 4])), (line(&[1, 3], &[2, 4]), line(&[1, 2], &[3, 4]))] {
            assert_eq!(l1.slope(), Some(-(rat(1) / &q)));
            assert_eq!(l2.slope(), Some(-(rat(1) / &q)));
        }
        assert_eq!(coincidence_time(&line(&[1, 3], &[2, 4]), &line(&[1, 3], &[3, 4])).unwrap(), ev.t_minus);
        assert_eq!(coincidence_time(&line(&[1, 3], &[2, 4]), &line(&[2, 4], &[3, 4])).unwrap(), ev.t_minus);
        assert_eq!(coincidence_time(&line(&[1, 2], &[1, 3]), &line(&[1, 2], &[2, 4])).unwrap(), ev.t_plus);
        assert_eq!(coincidence_time(&line(&[1, 2], &[3, 4]), &line(&[1, 3], &[2, 4])).unwrap(), LogValue::rational(ev.t0.clone()));
    }

    #[test]
    fn parallel_sweep_counts() {
        let (q, a, b) = (rat(1), rat(1), ratio(1, 2));
        let c = vec![rat(0); 4];
        let ev = parallel_events(&q, &a, &b, &c).unwrap();
        let tau = parallel_tau(&q, &a, &b, &c).unwrap();
        let times: Vec<Rational> = (-12..=12).map(|k| ratio(k, 4)).collect();
        for (t, vis) in parallel_sweep(&tau, &times).unwrap() {
            let inside = cmp_time(&t, &ev.t_minus).unwrap() == Ordering::Greater
                && cmp_time(&t, &ev.t_plus).unwrap() == Ordering::Less;
            assert_eq!(vis.len(), if inside { 3 } else { 2 }, "t = {t}");
            assert!(!vis.contains(&(s(&[1, 2]), s(&[3, 4]))));
        }
    }

    #[test]
    fn parallel_requires_positive_widths() {
        assert!(parallel_events(&rat(0), &rat(0), &rat(1), &vec![rat(0); 4]).is_err());
    }
}
