//! Numeric cross-checks for the exact layer.
//!
//! `numeric_dominance` samples Re(phi - psi) along rays approaching the
//! puncture. `section_dimension` counts grid components of
//! `U ∩ {t >= -Re f + a}` in (log10 r, theta, t) coordinates and discards
//! those whose closure in U reaches the `t = +inf` face or leaves W.
//!
//! The t axis is sheared by `Re f` before discretization. The shear is a
//! homeomorphism on each column, so component counts do not change, but the
//! level set becomes the flat plane `t' = a`. This keeps thin bands resolvable
//! when Re f is large.

use crate::error::{Error, Result};
use crate::homspaces::ExponentialSum;
use crate::json::format_rational;
use crate::numfield::{q_frac, q_int, Q};
use crate::puiseux::PuiseuxExponent;
use crate::sectors::{Comparison, Sector};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::VecDeque;

/// Sampling resolution. `radial_decades` lists the exponents k of the radii
/// r = 10^-k that are sampled.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub radial_decades: Vec<u32>,
    pub angular_samples: usize,
    pub t_samples: usize,
    #[serde(serialize_with = "ser_q")]
    pub growth_threshold: Q,
    /// Smallest |Re h| / sum |c| r^-a at which a sample counts as decisive.
    #[serde(serialize_with = "ser_q")]
    pub confidence_margin: Q,
}

fn ser_q<S: serde::Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            radial_decades: (1..=6).collect(),
            angular_samples: 64,
            t_samples: 64,
            growth_threshold: q_int(1000),
            confidence_margin: q_frac(1, 16),
        }
    }
}

impl GridSpec {
    pub fn check(&self) -> Result<()> {
        if self.radial_decades.is_empty() {
            return Err(Error::Malformed("at least one radial decade is required".into()));
        }
        if self.angular_samples < 8 || self.t_samples < 8 {
            return Err(Error::Malformed("sample counts must be at least 8".into()));
        }
        let z = Q::from_integer(0.into());
        if self.growth_threshold <= z || self.confidence_margin <= z {
            return Err(Error::Malformed("thresholds must be positive".into()));
        }
        Ok(())
    }

    fn deepest(&self) -> u32 {
        *self.radial_decades.iter().max().unwrap_or(&1)
    }
}

/// Decades sampled beyond the grid when values stay below the threshold.
const EXTRA_DECADES: u32 = 48;

fn qf(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Floating evaluator for Re of a polar part.
#[derive(Clone, Debug)]
struct ReEval {
    terms: Vec<(f64, Complex64)>,
}

impl ReEval {
    fn new(p: &PuiseuxExponent) -> ReEval {
        let terms = p
            .terms()
            .map(|(a, c)| (*a.numer() as f64 / *a.denom() as f64, c.to_complex()))
            .collect();
        ReEval { terms }
    }

    /// Re at log10 radius x and lifted argument theta (turns).
    fn at(&self, x: f64, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| {
                let w = Complex64::from_polar(10f64.powf(-a * x), -2.0 * std::f64::consts::PI * a * theta);
                (c * w).re
            })
            .sum()
    }

    fn magnitude(&self, x: f64) -> f64 {
        self.terms.iter().map(|(a, c)| c.norm() * 10f64.powf(-a * x)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominanceReport {
    #[serde(serialize_with = "ser_cmp")]
    pub verdict: Comparison,
    pub confidence: f64,
    pub samples: usize,
    pub decisive: usize,
    /// An arc endpoint gave no decisive sample.
    pub endpoint_borderline: bool,
    /// The deepest radius used, as log10 r.
    pub depth: f64,
}

fn ser_cmp<S: serde::Serializer>(c: &Comparison, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(c.name())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Obs {
    Up,
    Down,
    Weak,
}

/// Empirical dominance verdict for phi against psi on the closed arc of s.
///
/// A sample at angle theta is decisive when, at the two deepest radii, Re h
/// keeps one sign, clears the threshold, carries at least the confidence
/// margin of the total magnitude, and grows at the rate of the leading
/// exponent. Samples dominated by lower-order terms fail the growth test.
/// The deepest radius is pushed past the listed decades until the magnitude
/// clears `growth_threshold / confidence_margin`.
pub fn numeric_dominance(phi: &PuiseuxExponent, psi: &PuiseuxExponent, s: &Sector, grid: &GridSpec) -> DominanceReport {
    let n = grid.angular_samples.max(8);
    let h = match phi.difference(psi) {
        Ok(h) => h,
        Err(_) => {
            return DominanceReport {
                verdict: Comparison::Incomparable,
                confidence: 0.0,
                samples: 0,
                decisive: 0,
                endpoint_borderline: false,
                depth: 0.0,
            }
        }
    };
    let Some((lead, _)) = h.leading() else {
        return DominanceReport {
            verdict: Comparison::Equivalent,
            confidence: 1.0,
            samples: n,
            decisive: n,
            endpoint_borderline: false,
            depth: -(grid.deepest() as f64),
        };
    };
    let ev = ReEval::new(&h);
    let a = *lead.numer() as f64 / *lead.denom() as f64;
    let gap = 1.0 / h.ramification() as f64;
    let thr = qf(&grid.growth_threshold);
    let margin = qf(&grid.confidence_margin);
    let mut depth = grid.deepest() as f64;
    let cap = depth + EXTRA_DECADES as f64;
    while ev.magnitude(-depth) < thr / margin && depth < cap {
        depth += 1.0;
    }
    let (x1, x0) = (-depth, -depth + 1.0);
    let (lo, hi) = (qf(&s.lo), qf(&s.hi));
    let growth = 10f64.powf(a - gap / 2.0);
    let obs: Vec<Obs> = (0..n)
        .map(|i| {
            let th = if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
            let (v0, v1) = (ev.at(x0, th), ev.at(x1, th));
            let strong = v1.abs() >= thr
                && v1.abs() >= margin * ev.magnitude(x1)
                && v0.signum() == v1.signum()
                && v1.abs() >= growth * v0.abs();
            match (strong, v1 > 0.0) {
                (false, _) => Obs::Weak,
                (true, true) => Obs::Up,
                (true, false) => Obs::Down,
            }
        })
        .collect();
    let ups = obs.iter().filter(|o| **o == Obs::Up).count();
    let downs = obs.iter().filter(|o| **o == Obs::Down).count();
    let weak = n - ups - downs;
    let endpoint_borderline = obs[0] == Obs::Weak || obs[n - 1] == Obs::Weak;
    let share = (ups + downs) as f64 / n as f64;
    let (verdict, confidence) = if ups > 0 && downs > 0 {
        // opposite decisive signs force a sign change of the leading term
        (Comparison::Incomparable, 1.0 - 0.01 * weak as f64 / n as f64)
    } else if ups + downs == 0 {
        (Comparison::Incomparable, 0.0)
    } else {
        let v = if downs > 0 { Comparison::Less } else { Comparison::Greater };
        let c = share.powi(8);
        (v, if endpoint_borderline { c.min(0.5) } else { c })
    };
    DominanceReport {
        verdict,
        confidence,
        samples: n,
        decisive: ups + downs,
        endpoint_borderline,
        depth: x1,
    }
}

/// One side of the t-range of a region.
#[derive(Clone, Debug, PartialEq)]
pub enum TBound {
    NegInfinity,
    /// `closed` includes the face t = +inf in U.
    PosInfinity { closed: bool },
    Value(Q),
    /// t compared with `-Re psi + shift`.
    BelowExponent { psi: PuiseuxExponent, shift: Q },
}

impl TBound {
    fn describe(&self) -> String {
        match self {
            TBound::NegInfinity => "-inf".into(),
            TBound::PosInfinity { closed: true } => "+inf]".into(),
            TBound::PosInfinity { closed: false } => "+inf)".into(),
            TBound::Value(q) => format_rational(q),
            TBound::BelowExponent { psi, shift } => format!("-Re({}) + {}", psi, format_rational(shift)),
        }
    }
}

/// An open region `{x in (x_lo, x_hi), theta in (theta_lo, theta_hi),
/// t_lo < t < t_hi}` with x = log10 r. `log_r_lo = None` lets the region
/// approach the puncture without containing it. `a` is the smallest
/// threshold to try.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionSample {
    pub log_r_lo: Option<Q>,
    pub log_r_hi: Q,
    pub theta: (Q, Q),
    pub t_lo: TBound,
    pub t_hi: TBound,
    pub a: Q,
}

impl RegionSample {
    /// W x R for a sector W: the full open t-line over the whole sector.
    pub fn over_sector(w: &Sector) -> RegionSample {
        RegionSample {
            log_r_lo: None,
            log_r_hi: log10_q(&w.radius),
            theta: (w.lo.clone(), w.hi.clone()),
            t_lo: TBound::NegInfinity,
            t_hi: TBound::PosInfinity { closed: false },
            a: q_int(1),
        }
    }

    pub fn with_t(mut self, lo: TBound, hi: TBound) -> RegionSample {
        self.t_lo = lo;
        self.t_hi = hi;
        self
    }

    pub fn check(&self) -> Result<()> {
        if let Some(lo) = &self.log_r_lo {
            if lo >= &self.log_r_hi {
                return Err(Error::Malformed("empty radial range".into()));
            }
        }
        if self.theta.0 >= self.theta.1 {
            return Err(Error::Malformed("empty angular range".into()));
        }
        if matches!(self.t_lo, TBound::PosInfinity { .. }) || matches!(self.t_hi, TBound::NegInfinity) {
            return Err(Error::Malformed("t bounds are reversed".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "log_r": [self.log_r_lo.as_ref().map(format_rational).unwrap_or_else(|| "-inf".into()), format_rational(&self.log_r_hi)],
            "theta": [format_rational(&self.theta.0), format_rational(&self.theta.1)],
            "t": [self.t_lo.describe(), self.t_hi.describe()],
            "a": format_rational(&self.a),
        })
    }
}

/// A rational just below or at log10 q, good enough for region bounds.
fn log10_q(q: &Q) -> Q {
    let v = qf(q).log10();
    Q::new(((v * 64.0).floor() as i64).into(), 64.into())
}

enum Bound {
    Inf(f64),
    Fixed(f64),
    Exp(ReEval, f64),
}

impl Bound {
    fn of(b: &TBound) -> Bound {
        match b {
            TBound::NegInfinity => Bound::Inf(f64::NEG_INFINITY),
            TBound::PosInfinity { .. } => Bound::Inf(f64::INFINITY),
            TBound::Value(q) => Bound::Fixed(qf(q)),
            TBound::BelowExponent { psi, shift } => Bound::Exp(ReEval::new(psi), qf(shift)),
        }
    }

    fn at(&self, x: f64, th: f64) -> f64 {
        match self {
            Bound::Inf(v) | Bound::Fixed(v) => *v,
            Bound::Exp(e, s) => s - e.at(x, th),
        }
    }
}

struct Layout {
    xs: Vec<f64>,
    ths: Vec<f64>,
    nt: usize,
}

impl Layout {
    fn new(region: &RegionSample, grid: &GridSpec, level: usize, x0: f64) -> Layout {
        let x1 = qf(&region.log_r_hi);
        let x0 = x0.min(x1 - 0.25);
        let nx = (((x1 - x0) * 4.0).ceil() as usize).max(8) * level;
        let nth = grid.angular_samples * level;
        let (t0, t1) = (qf(&region.theta.0), qf(&region.theta.1));
        Layout {
            xs: (0..nx).map(|i| x0 + (x1 - x0) * (i as f64 + 0.5) / nx as f64).collect(),
            ths: (0..nth).map(|j| t0 + (t1 - t0) * (j as f64 + 0.5) / nth as f64).collect(),
            nt: grid.t_samples * level,
        }
    }

    /// Sheared t' levels, dense near a.
    fn t_level(&self, k: usize, a: f64, tau: f64) -> f64 {
        let s = (k as f64 + 0.5) / self.nt as f64 - 0.5;
        a + tau * (std::f64::consts::PI * s).tan()
    }
}

fn in_sector(w: &Sector, x: f64, th: f64) -> bool {
    th > qf(&w.lo) && th < qf(&w.hi) && x < qf(&w.radius).log10()
}

/// Components of the discretized U ∩ {t >= -Re f + a} that survive the
/// closure rules.
fn count_components(f: &ReEval, region: &RegionSample, w: &Sector, a: f64, lay: &Layout) -> usize {
    let (nx, nth, nt) = (lay.xs.len(), lay.ths.len(), lay.nt);
    let (blo, bhi) = (Bound::of(&region.t_lo), Bound::of(&region.t_hi));
    let top_closed = matches!(region.t_hi, TBound::PosInfinity { closed: true });
    let tau = a.abs().max(1.0);
    let levels: Vec<f64> = (0..nt).map(|k| lay.t_level(k, a, tau)).collect();
    // 0 = not in U, 1 = in U outside W, 2 = member
    let mut cell = vec![0u8; nx * nth * nt];
    let idx = |i: usize, j: usize, k: usize| (i * nth + j) * nt + k;
    for (i, &x) in lay.xs.iter().enumerate() {
        for (j, &th) in lay.ths.iter().enumerate() {
            let fv = f.at(x, th);
            let (lo, hi) = (blo.at(x, th) + fv, bhi.at(x, th) + fv);
            let inside = in_sector(w, x, th);
            for (k, &t) in levels.iter().enumerate() {
                if t > lo && t < hi {
                    cell[idx(i, j, k)] = if !inside {
                        1
                    } else if t >= a {
                        2
                    } else {
                        0
                    };
                }
            }
        }
    }
    let mut seen = vec![false; cell.len()];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..cell.len() {
        if cell[start] != 2 || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut excluded = false;
        while let Some(c) = queue.pop_front() {
            let k = c % nt;
            let j = (c / nt) % nth;
            let i = c / (nt * nth);
            if top_closed && k + 1 == nt {
                excluded = true;
            }
            let mut nb = Vec::with_capacity(6);
            if i > 0 {
                nb.push(idx(i - 1, j, k));
            }
            if i + 1 < nx {
                nb.push(idx(i + 1, j, k));
            }
            if j > 0 {
                nb.push(idx(i, j - 1, k));
            }
            if j + 1 < nth {
                nb.push(idx(i, j + 1, k));
            }
            if k > 0 {
                nb.push(idx(i, j, k - 1));
            }
            if k + 1 < nt {
                nb.push(idx(i, j, k + 1));
            }
            for d in nb {
                match cell[d] {
                    1 => excluded = true,
                    2 if !seen[d] => {
                        seen[d] = true;
                        queue.push_back(d);
                    }
                    _ => {}
                }
            }
        }
        if !excluded {
            count += 1;
        }
    }
    count
}

/// Smallest threshold of the ladder: above `region.a` and above the values
/// of Re f and of the t bounds on the part of U away from the puncture, so
/// that bounded pieces of U are empty from the first rung on.
fn base_threshold(f: &ReEval, region: &RegionSample, lay: &Layout) -> f64 {
    let x1 = qf(&region.log_r_hi);
    let (blo, bhi) = (Bound::of(&region.t_lo), Bound::of(&region.t_hi));
    let mut sup: f64 = 0.0;
    for &x in &lay.xs {
        if region.log_r_lo.is_none() && x < x1 - 1.0 {
            continue;
        }
        for &th in &lay.ths {
            let mut v = f.at(x, th).abs();
            for b in [&blo, &bhi] {
                let bv = b.at(x, th);
                if bv.is_finite() {
                    v += bv.abs();
                }
            }
            sup = sup.max(v);
        }
    }
    qf(&region.a).max(1.0 + sup)
}

/// Inner end of the x range. A region reaching the puncture is sampled past
/// the grid while its sheared t bounds keep growing, until they clear 8a.
fn inner_depth(f: &ReEval, region: &RegionSample, grid: &GridSpec, a: f64, ths: &[f64]) -> f64 {
    if let Some(lo) = &region.log_r_lo {
        return qf(lo);
    }
    let (blo, bhi) = (Bound::of(&region.t_lo), Bound::of(&region.t_hi));
    let peak = |x: f64| {
        let mut m: f64 = 0.0;
        for &th in ths {
            for b in [&blo, &bhi] {
                let v = b.at(x, th);
                if v.is_finite() {
                    m = m.max((v + f.at(x, th)).abs());
                }
            }
        }
        m
    };
    let mut x0 = -(grid.deepest() as f64);
    let mut prev = peak(x0);
    for _ in 0..EXTRA_DECADES {
        if prev >= 8.0 * a {
            break;
        }
        let next = peak(x0 - 1.0);
        if next <= 1.5 * prev {
            break;
        }
        x0 -= 1.0;
        prev = next;
    }
    x0
}

/// Grid approximation of the dimension of sections of the exponential sum
/// on U, for exponentials supported on the sector W. Each exponent
/// contributes its component count times its multiplicity. The count for a
/// single exponent is taken at the threshold ladder a, 2a, 4a and at two
/// resolutions; ResolutionTooCoarse reports disagreement.
pub fn section_dimension(sum: &ExponentialSum, region: &RegionSample, w: &Sector, grid: &GridSpec) -> Result<usize> {
    grid.check()?;
    region.check()?;
    let outer = Layout::new(region, grid, 1, region.log_r_lo.as_ref().map(qf).unwrap_or(-(grid.deepest() as f64)));
    let mut total = 0;
    for (phi, m) in sum.entries() {
        let f = ReEval::new(phi);
        let a = base_threshold(&f, region, &outer);
        let x0 = inner_depth(&f, region, grid, a, &outer.ths);
        let coarse = Layout::new(region, grid, 1, x0);
        let fine = Layout::new(region, grid, 2, x0);
        let c4 = count_components(&f, region, w, 4.0 * a, &coarse);
        let f2 = count_components(&f, region, w, 2.0 * a, &fine);
        let f4 = count_components(&f, region, w, 4.0 * a, &fine);
        if c4 != f4 {
            return Err(Error::ResolutionTooCoarse(c4, f4));
        }
        if f2 != f4 {
            return Err(Error::ResolutionTooCoarse(f2, f4));
        }
        total += f4 * m;
    }
    Ok(total)
}

/// A region separating E^g from E^f when Re(g - f) blows up somewhere on W:
/// `U = {r < r1, theta in window, t < -Re f}` over a window where g - f is
/// sampled positive and growing. None if no such window is seen.
pub fn separating_region(g: &PuiseuxExponent, f: &PuiseuxExponent, w: &Sector, grid: &GridSpec) -> Option<RegionSample> {
    let h = ReEval::new(&g.difference(f).ok()?);
    let n = grid.angular_samples * 4;
    let (lo, hi) = (qf(&w.lo), qf(&w.hi));
    let thr = qf(&grid.growth_threshold);
    // past the listed decades until the peak clears the threshold, as in dominance
    let mut found = None;
    for extra in 0..=EXTRA_DECADES {
        let x = -((grid.deepest() + extra) as f64);
        let vals: Vec<f64> = (0..n)
            .map(|i| h.at(x, lo + (hi - lo) * (i as f64 + 0.5) / n as f64))
            .collect();
        let (best, &vmax) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
        if vmax >= thr {
            found = Some((vals, best, vmax));
            break;
        }
    }
    let (vals, best, vmax) = found?;
    // widen around the peak while Re(g - f) stays large
    let (mut i0, mut i1) = (best, best);
    while i0 > 0 && vals[i0 - 1] > vmax / 2.0 && best - i0 < n / 16 {
        i0 -= 1;
    }
    while i1 + 1 < n && vals[i1 + 1] > vmax / 2.0 && i1 - best < n / 16 {
        i1 += 1;
    }
    let scale = (n * 2) as i64;
    let turn = |i: usize| {
        let v = lo + (hi - lo) * i as f64 / n as f64;
        Q::new(((v * scale as f64).round() as i64).into(), scale.into())
    };
    let (mut t0, mut t1) = (turn(i0), turn(i1 + 1));
    if t0 <= w.lo {
        t0 = &w.lo + q_frac(1, 4 * scale);
    }
    if t1 >= w.hi {
        t1 = &w.hi - q_frac(1, 4 * scale);
    }
    if t0 >= t1 {
        return None;
    }
    Some(RegionSample {
        log_r_lo: None,
        log_r_hi: log10_q(&w.radius).min(q_int(-1)),
        theta: (t0, t1),
        t_lo: TBound::NegInfinity,
        t_hi: TBound::BelowExponent {
            psi: f.clone(),
            shift: q_int(0),
        },
        a: q_int(1),
    })
}
