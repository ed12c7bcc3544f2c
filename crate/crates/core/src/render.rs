//! Tropical phase fields on grids, boundary extraction with tropical
//! amplitudes, the exact `u = 2ħ²(log τ)_xx`, and SVG/DOT output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::evolution::SolitonTree;
use crate::exact::{fmt_rational, to_f64, Rational};
use crate::general::{GeneralTau, LogValue};
use crate::model::SolitonConfig;

/// What a field is drawn from.
#[derive(Clone, Copy, Debug)]
pub enum FieldSource<'a> {
    Simple(&'a SolitonConfig),
    General(&'a GeneralTau),
}

impl FieldSource<'_> {
    /// Phase labels, in key order.
    pub fn labels(&self) -> Vec<String> {
        match self {
            FieldSource::Simple(c) => (1..=c.phases()).map(|k| k.to_string()).collect(),
            FieldSource::General(t) => t.terms.iter().map(|term| term.key.to_string()).collect(),
        }
    }

    /// `∂θ/∂x` of each phase.
    pub fn x_momenta(&self) -> Vec<Rational> {
        match self {
            FieldSource::Simple(c) => c.p().to_vec(),
            FieldSource::General(t) => t.terms.iter().map(|term| term.phase.linear[0].clone()).collect(),
        }
    }

    /// Exact phase values at `(x, y, t)`; higher times come from the configuration.
    pub fn phases_at(&self, x: &Rational, y: &Rational, t: &Rational) -> Result<Vec<LogValue>> {
        match self {
            FieldSource::Simple(c) => {
                let pt = c.complete_point(&[x.clone(), y.clone(), t.clone()])?;
                Ok(c.all_phases(&pt)?.into_iter().map(LogValue::rational).collect())
            }
            FieldSource::General(tau) => {
                let coords = [x.clone().into(), y.clone().into(), t.clone().into()];
                Ok(tau.terms.iter().map(|term| term.phase.eval(&coords)).collect())
            }
        }
    }
}

/// `[x0, x1] × [y0, y1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BBox {
    #[serde(with = "crate::exact::serde_rational")]
    pub x0: Rational,
    #[serde(with = "crate::exact::serde_rational")]
    pub x1: Rational,
    #[serde(with = "crate::exact::serde_rational")]
    pub y0: Rational,
    #[serde(with = "crate::exact::serde_rational")]
    pub y1: Rational,
}

impl BBox {
    pub fn new(x0: Rational, x1: Rational, y0: Rational, y1: Rational) -> Result<BBox> {
        if x0 >= x1 || y0 >= y1 {
            return invalid("degenerate bounding box");
        }
        Ok(BBox { x0, x1, y0, y1 })
    }

    /// From `"x0,x1,y0,y1"`.
    pub fn parse(text: &str) -> Result<BBox> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return invalid(format!("bbox {text:?}: expected x0,x1,y0,y1"));
        }
        let v = parts.iter().map(|s| crate::exact::parse_decimal(s)).collect::<Result<Vec<_>>>()?;
        BBox::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone())
    }

    fn cell_center(&self, nx: usize, ny: usize, i: usize, j: usize) -> (Rational, Rational) {
        let two = Rational::from_integer(2.into());
        let fx = (Rational::from_integer((2 * i + 1).into())) / (&two * Rational::from_integer(nx.into()));
        let fy = (Rational::from_integer((2 * j + 1).into())) / (&two * Rational::from_integer(ny.into()));
        (&self.x0 + (&self.x1 - &self.x0) * fx, &self.y0 + (&self.y1 - &self.y0) * fy)
    }
}

/// Parses `"NxM"`.
pub fn parse_resolution(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Invalid(format!("resolution {text:?}: expected NxM")))?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| Error::Invalid(format!("resolution {text:?}: {e}")));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionGrid {
    pub bbox: BBox,
    pub nx: usize,
    pub ny: usize,
    #[serde(with = "crate::exact::serde_rational")]
    pub t: Rational,
    pub labels: Vec<String>,
    #[serde(skip)]
    pub momenta: Vec<Rational>,
    /// Row-major from `y0` upward; each cell lists every maximal phase.
    pub cells: Vec<Vec<usize>>,
}

impl RegionGrid {
    pub fn cell(&self, i: usize, j: usize) -> &[usize] {
        &self.cells[j * self.nx + i]
    }

    pub fn ties(&self) -> usize {
        self.cells.iter().filter(|c| c.len() > 1).count()
    }

    /// Phases dominating at least one cell.
    pub fn present(&self) -> BTreeSet<usize> {
        self.cells.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect()
    }
}

fn argmax(vals: &[LogValue]) -> Result<Vec<usize>> {
    let mut best = vec![0];
    for k in 1..vals.len() {
        match vals[k].try_cmp(&vals[best[0]])? {
            std::cmp::Ordering::Greater => best = vec![k],
            std::cmp::Ordering::Equal => best.push(k),
            std::cmp::Ordering::Less => {}
        }
    }
    Ok(best)
}

/// `θ_k = p_k x + p_k² y + const_k` at a fixed `t`, in exact and float form.
struct AffinePhases {
    exact: Vec<[Rational; 3]>,
    approx: Vec<[f64; 3]>,
}

impl AffinePhases {
    fn new(config: &SolitonConfig, t: &Rational) -> Result<AffinePhases> {
        let origin = config.complete_point(&[Rational::zero(), Rational::zero(), t.clone()])?;
        let consts = config.all_phases(&origin)?;
        let exact: Vec<[Rational; 3]> =
            config.p().iter().zip(consts).map(|(p, k)| [p.clone(), p * p, k]).collect();
        let approx = exact.iter().map(|e| [to_f64(&e[0]), to_f64(&e[1]), to_f64(&e[2])]).collect();
        Ok(AffinePhases { exact, approx })
    }

    /// Float argmax, falling back to exact comparison when the top two are close.
    fn dominant(&self, x: &Rational, y: &Rational) -> Vec<usize> {
        let (xf, yf) = (to_f64(x), to_f64(y));
        let vals: Vec<f64> = self.approx.iter().map(|a| a[0] * xf + a[1] * yf + a[2]).collect();
        let mut best = 0;
        for k in 1..vals.len() {
            if vals[k] > vals[best] {
                best = k;
            }
        }
        let scale: f64 = self.approx.iter().map(|a| a[0].abs() * xf.abs() + a[1].abs() * yf.abs() + a[2].abs()).fold(1.0, f64::max);
        let close = (0..vals.len()).any(|k| k != best && vals[best] - vals[k] <= 1e-9 * scale);
        if !close {
            return vec![best];
        }
        let exact: Vec<Rational> = self.exact.iter().map(|e| &e[0] * x + &e[1] * y + &e[2]).collect();
        let top = exact.iter().max().expect("phases").clone();
        (0..exact.len()).filter(|&k| exact[k] == top).collect()
    }
}

/// Dominating phase at every cell center.
pub fn tropical_field(source: FieldSource<'_>, bbox: &BBox, nx: usize, ny: usize, t: &Rational) -> Result<RegionGrid> {
    if nx < 2 || ny < 2 {
        return invalid("resolution must be at least 2x2");
    }
    let affine = match source {
        FieldSource::Simple(c) => Some(AffinePhases::new(c, t)?),
        FieldSource::General(_) => None,
    };
    let rows: Vec<Vec<Vec<usize>>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            (0..nx)
                .map(|i| {
                    let (x, y) = bbox.cell_center(nx, ny, i, j);
                    match (source, &affine) {
                        (FieldSource::Simple(_), Some(aff)) => Ok(aff.dominant(&x, &y)),
                        (FieldSource::General(tau), _) => tau.dominant_f64(to_f64(&x), to_f64(&y), to_f64(t)),
                        _ => unreachable!(),
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionGrid {
        bbox: bbox.clone(),
        nx,
        ny,
        t: t.clone(),
        labels: source.labels(),
        momenta: source.x_momenta(),
        cells: rows.into_iter().flatten().collect(),
    })
}

/// `(2/m²) Σ_{i<j} (P_j − P_i)²` for the `x`-momenta of `m` coinciding phases.
pub fn tropical_amplitude(momenta: &[Rational]) -> Rational {
    let m = momenta.len();
    if m < 2 {
        return Rational::zero();
    }
    let mut sum = Rational::zero();
    for j in 0..m {
        for i in 0..j {
            let d = &momenta[j] - &momenta[i];
            sum += &d * &d;
        }
    }
    let m2 = Rational::from_integer(((m * m) as i64).into());
    sum * Rational::from_integer(2.into()) / m2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundarySegment {
    pub from: (f64, f64),
    pub to: (f64, f64),
    pub left: usize,
    pub right: usize,
    #[serde(with = "crate::exact::serde_rational")]
    pub amplitude: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Junction {
    pub at: (f64, f64),
    pub phases: Vec<usize>,
    #[serde(with = "crate::exact::serde_rational")]
    pub amplitude: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Boundaries {
    pub segments: Vec<BoundarySegment>,
    /// Corners where three or more phases meet.
    pub junctions: Vec<Junction>,
}

/// Cell edges separating different dominating phases, merged along grid
/// lines, plus corners where at least three phases meet.
pub fn extract_boundaries(grid: &RegionGrid) -> Boundaries {
    let (nx, ny) = (grid.nx, grid.ny);
    let fx = |i: usize| to_f64(&grid.bbox.x0) + (to_f64(&grid.bbox.x1) - to_f64(&grid.bbox.x0)) * i as f64 / nx as f64;
    let fy = |j: usize| to_f64(&grid.bbox.y0) + (to_f64(&grid.bbox.y1) - to_f64(&grid.bbox.y0)) * j as f64 / ny as f64;
    let key = |c: &[usize]| c[0];
    let amp = |a: usize, b: usize| tropical_amplitude(&[grid.momenta[a].clone(), grid.momenta[b].clone()]);
    let mut segments = Vec::new();
    // vertical edges between (i-1, j) and (i, j), merged along j
    for i in 1..nx {
        let mut run: Option<(usize, usize, usize)> = None;
        for j in 0..=ny {
            let pair = (j < ny).then(|| (key(grid.cell(i - 1, j)), key(grid.cell(i, j)))).filter(|(a, b)| a != b);
            match (run, pair) {
                (Some((start, a, b)), Some((c, d))) if (a, b) == (c, d) => run = Some((start, a, b)),
                (prev, next) => {
                    if let Some((start, a, b)) = prev {
                        segments.push(BoundarySegment { from: (fx(i), fy(start)), to: (fx(i), fy(j)), left: a, right: b, amplitude: amp(a, b) });
                    }
                    run = next.map(|(a, b)| (j, a, b));
                }
            }
        }
    }
    // horizontal edges between (i, j-1) and (i, j), merged along i
    for j in 1..ny {
        let mut run: Option<(usize, usize, usize)> = None;
        for i in 0..=nx {
            let pair = (i < nx).then(|| (key(grid.cell(i, j - 1)), key(grid.cell(i, j)))).filter(|(a, b)| a != b);
            match (run, pair) {
                (Some((start, a, b)), Some((c, d))) if (a, b) == (c, d) => run = Some((start, a, b)),
                (prev, next) => {
                    if let Some((start, a, b)) = prev {
                        segments.push(BoundarySegment { from: (fx(start), fy(j)), to: (fx(i), fy(j)), left: a, right: b, amplitude: amp(a, b) });
                    }
                    run = next.map(|(a, b)| (i, a, b));
                }
            }
        }
    }
    let mut junctions = Vec::new();
    for j in 1..ny {
        for i in 1..nx {
            let set: BTreeSet<usize> =
                [grid.cell(i - 1, j - 1), grid.cell(i, j - 1), grid.cell(i - 1, j), grid.cell(i, j)].iter().map(|c| key(c)).collect();
            if set.len() >= 3 {
                let phases: Vec<usize> = set.into_iter().collect();
                let ps: Vec<Rational> = phases.iter().map(|&k| grid.momenta[k].clone()).collect();
                junctions.push(Junction { at: (fx(i), fy(j)), phases, amplitude: tropical_amplitude(&ps) });
            }
        }
    }
    Boundaries { segments, junctions }
}

/// `u = 2ħ²(log τ)_xx = (2/τ²) Σ_{i<j} (P_j − P_i)² e^{(θ_i+θ_j)/ħ}` with
/// the largest phase factored out, so only non-positive exponents occur.
pub fn exact_u(source: FieldSource<'_>, x: &Rational, y: &Rational, t: &Rational, hbar: f64) -> Result<f64> {
    if !(hbar > 0.0) {
        return invalid("ħ must be positive");
    }
    if let FieldSource::General(tau) = source {
        if !tau.regular {
            return invalid("τ has negative coefficients: the solution is singular");
        }
    }
    let phases = source.phases_at(x, y, t)?;
    let top = argmax(&phases)?[0];
    let w: Vec<f64> =
        phases.iter().map(|v| ((v.clone() - phases[top].clone()).to_f64() / hbar).exp()).collect();
    let p: Vec<f64> = source.x_momenta().iter().map(to_f64).collect();
    let tau: f64 = w.iter().sum();
    let mut num = 0.0;
    for j in 0..w.len() {
        for i in 0..j {
            num += (p[j] - p[i]).powi(2) * w[i] * w[j];
        }
    }
    Ok(2.0 * num / (tau * tau))
}

/// Drawing options; unknown keys are rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct Style {
    pub width: u32,
    pub height: u32,
    pub stroke: f64,
    pub fill_regions: bool,
    pub show_labels: bool,
}

impl Default for Style {
    fn default() -> Self {
        Style { width: 480, height: 480, stroke: 1.5, fill_regions: true, show_labels: true }
    }
}

impl Style {
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Style> {
        let mut s = Style::default();
        for &(k, v) in pairs {
            let bad = |e: String| Error::Invalid(format!("style {k}={v}: {e}"));
            match k {
                "width" => s.width = v.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                "height" => s.height = v.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                "stroke" => s.stroke = v.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                "fill" => s.fill_regions = v.parse().map_err(|e: std::str::ParseBoolError| bad(e.to_string()))?,
                "labels" => s.show_labels = v.parse().map_err(|e: std::str::ParseBoolError| bad(e.to_string()))?,
                _ => return invalid(format!("unsupported style key {k:?}")),
            }
        }
        Ok(s)
    }
}

const PALETTE: [&str; 10] =
    ["#e8d5b7", "#b7d5e8", "#c8e8b7", "#e8b7c8", "#d5b7e8", "#e8e3b7", "#b7e8e0", "#f0c8a0", "#a0c8f0", "#c0c0c0"];

/// SVG of a phase field with its boundaries. `y` grows upward.
pub fn svg_field(grid: &RegionGrid, boundaries: &Boundaries, style: &Style, title: &str) -> String {
    let (w, h) = (style.width as f64, style.height as f64);
    let (x0, x1) = (to_f64(&grid.bbox.x0), to_f64(&grid.bbox.x1));
    let (y0, y1) = (to_f64(&grid.bbox.y0), to_f64(&grid.bbox.y1));
    let sx = |x: f64| (x - x0) / (x1 - x0) * w;
    let sy = |y: f64| h - (y - y0) / (y1 - y0) * h;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#, style.width, style.height, style.width, style.height);
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    if style.fill_regions {
        let (cw, ch) = (w / grid.nx as f64, h / grid.ny as f64);
        for j in 0..grid.ny {
            let mut i = 0;
            while i < grid.nx {
                let c = grid.cell(i, j);
                let mut k = i + 1;
                while k < grid.nx && grid.cell(k, j) == c {
                    k += 1;
                }
                let color = if c.len() > 1 { "#000000" } else { PALETTE[c[0] % PALETTE.len()] };
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{color}" stroke="none"/>"#,
                    i as f64 * cw,
                    h - (j + 1) as f64 * ch,
                    (k - i) as f64 * cw,
                    ch
                );
                i = k;
            }
        }
    }
    for s in &boundaries.segments {
        let _ = writeln!(
            out,
            r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#202020" stroke-width="{:.2}"/>"##,
            sx(s.from.0),
            sy(s.from.1),
            sx(s.to.0),
            sy(s.to.1),
            style.stroke
        );
    }
    if style.show_labels {
        let mut sums: BTreeMap<usize, (f64, f64, usize)> = BTreeMap::new();
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let c = grid.cell(i, j);
                if c.len() == 1 {
                    let e = sums.entry(c[0]).or_insert((0.0, 0.0, 0));
                    e.0 += i as f64 + 0.5;
                    e.1 += j as f64 + 0.5;
                    e.2 += 1;
                }
            }
        }
        for (k, (si, sj, n)) in sums {
            let (cx, cy) = (si / n as f64 / grid.nx as f64 * w, h - sj / n as f64 / grid.ny as f64 * h);
            let _ = writeln!(out, r#"<text x="{cx:.3}" y="{cy:.3}" font-size="12" text-anchor="middle">θ{}</text>"#, escape(&grid.labels[k]));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Grayscale SVG of the exact `u` sampled at cell centers.
pub fn svg_exact(source: FieldSource<'_>, bbox: &BBox, nx: usize, ny: usize, t: &Rational, style: &Style) -> Result<String> {
    if nx < 2 || ny < 2 {
        return invalid("resolution must be at least 2x2");
    }
    let vals: Vec<Vec<f64>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            (0..nx)
                .map(|i| {
                    let (x, y) = bbox.cell_center(nx, ny, i, j);
                    exact_u(source, &x, &y, t, 1.0)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let max = vals.iter().flatten().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let (w, h) = (style.width as f64, style.height as f64);
    let (cw, ch) = (w / nx as f64, h / ny as f64);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#, style.width, style.height, style.width, style.height);
    for (j, row) in vals.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let g = 255 - ((v / max).clamp(0.0, 1.0) * 255.0).round() as u8;
            let _ = writeln!(
                out,
                r##"<rect x="{:.3}" y="{:.3}" width="{cw:.3}" height="{ch:.3}" fill="#{g:02x}{g:02x}{g:02x}"/>"##,
                i as f64 * cw,
                h - (j + 1) as f64 * ch
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// DOT of a soliton tree: root `x_{1,M+1}`, leaves `x_{k,k+1}`, nodes
/// labeled by their triple and ranked top to bottom.
pub fn tree_dot(tree: &SolitonTree, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(title));
    let _ = writeln!(out, "  node [shape=circle, fontsize=10];");
    let triples = tree.triples();
    let _ = writeln!(out, "  root [label=\"x1,{}\", shape=plaintext];", tree.m + 1);
    for (k, t) in triples.iter().enumerate() {
        let _ = writeln!(out, "  n{k} [label=\"{t}\"];");
    }
    let mut open: Vec<((usize, usize), String)> = vec![((1, tree.m + 1), "root".to_string())];
    for (k, t) in triples.iter().enumerate() {
        let s = t.as_slice();
        let (i, j, l) = (s[0], s[1], s[2]);
        let pos = open.iter().position(|(e, _)| *e == (i, l)).expect("grown tree");
        let (_, parent) = open.remove(pos);
        let _ = writeln!(out, "  {parent} -> n{k};");
        open.insert(pos, ((j, l), format!("n{k}")));
        open.insert(pos, ((i, j), format!("n{k}")));
    }
    for ((i, j), parent) in open {
        let _ = writeln!(out, "  l{i}_{j} [label=\"x{i}{j}\", shape=plaintext];");
        let _ = writeln!(out, "  {parent} -> l{i}_{j};");
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// `t` formatted for file names and titles.
pub fn time_label(t: &Rational) -> String {
    if t.is_integer() || t.denom() == &num_bigint::BigInt::one() {
        return fmt_rational(t);
    }
    format!("{:.4}", to_f64(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio, IndexSet};

    fn bbox(a: i64) -> BBox {
        BBox::new(rat(-a), rat(a), rat(-a), rat(a)).unwrap()
    }

    #[test]
    fn one_soliton_halves() {
        let cfg = SolitonConfig::simple(vec![rat(-1), rat(1)], vec![rat(0), rat(0)]).unwrap();
        let grid = tropical_field(FieldSource::Simple(&cfg), &bbox(4), 8, 8, &rat(0)).unwrap();
        // x_12 = −(p1+p2) y − … = 0 here: left half θ1, right half θ2
        for j in 0..8 {
            for i in 0..8 {
                assert_eq!(grid.cell(i, j), [if i < 4 { 0 } else { 1 }]);
            }
        }
        let b = extract_boundaries(&grid);
        assert_eq!(b.segments.len(), 1);
        assert_eq!(b.segments[0].amplitude, rat(2));
        assert!(b.junctions.is_empty());
    }

    #[test]
    fn miles_y_shape() {
        let cfg = SolitonConfig::simple(vec![rat(-1), rat(0), rat(1)], vec![rat(0); 3]).unwrap();
        let grid = tropical_field(FieldSource::Simple(&cfg), &bbox(4), 16, 16, &rat(0)).unwrap();
        assert_eq!(grid.present().len(), 3);
        let b = extract_boundaries(&grid);
        assert!(b.junctions.iter().any(|j| j.phases.len() == 3 && j.amplitude == ratio(4, 3)));
    }

    #[test]
    fn interior_has_no_segments() {
        let cfg = SolitonConfig::simple(vec![rat(-1), rat(1)], vec![rat(100), rat(0)]).unwrap();
        let grid = tropical_field(FieldSource::Simple(&cfg), &bbox(1), 4, 4, &rat(0)).unwrap();
        assert!(extract_boundaries(&grid).segments.is_empty());
    }

    #[test]
    fn amplitude_formula() {
        assert_eq!(tropical_amplitude(&[rat(-1), rat(0), rat(1)]), ratio(4, 3));
        assert_eq!(tropical_amplitude(&[rat(0), rat(3)]), ratio(9, 2));
    }

    #[test]
    fn exact_equals_tropical_at_top_coincidence() {
        let cfg = SolitonConfig::simple(vec![rat(-1), ratio(1, 3), rat(2)], vec![rat(1), rat(0), rat(-2)]).unwrap();
        let cp = crate::critical::critical_point(&cfg, &IndexSet::range(3)).unwrap();
        let (x, y) = (cp.point.t(1).clone(), cp.point.t(2).clone());
        let u = exact_u(FieldSource::Simple(&cfg), &x, &y, cp.point.t(3), 1.0).unwrap();
        assert!((u - to_f64(&tropical_amplitude(cfg.p()))).abs() < 1e-12);
        // deep inside a region u vanishes
        let far = exact_u(FieldSource::Simple(&cfg), &rat(200), &rat(0), &rat(0), 1.0).unwrap();
        assert!(far < 1e-30);
    }

    #[test]
    fn svg_is_deterministic_and_styles_checked() {
        let cfg = SolitonConfig::simple(vec![rat(-1), rat(0), rat(1)], vec![rat(0); 3]).unwrap();
        let grid = tropical_field(FieldSource::Simple(&cfg), &bbox(4), 10, 10, &rat(0)).unwrap();
        let b = extract_boundaries(&grid);
        let a = svg_field(&grid, &b, &Style::default(), "t=0");
        assert_eq!(a, svg_field(&grid, &b, &Style::default(), "t=0"));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        let empty = Boundaries { segments: vec![], junctions: vec![] };
        assert!(svg_field(&grid, &empty, &Style::from_pairs(&[("fill", "false")]).unwrap(), "").contains("</svg>"));
        assert!(Style::from_pairs(&[("colour", "red")]).is_err());
    }

    #[test]
    fn bbox_and_resolution_parsing() {
        assert_eq!(parse_resolution("40x30").unwrap(), (40, 30));
        assert!(parse_resolution("40").is_err());
        assert!(BBox::parse("1,0,0,1").is_err());
        assert_eq!(BBox::parse("-1,1,-2.5,2").unwrap().y0, ratio(-5, 2));
    }
}
