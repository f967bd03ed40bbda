use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::structure::HolderStructure;
use crate::error::{Error, Result};
use crate::lawcore::{
    bisect_predicate, invert_in_first_tol, invert_in_second, linspace, AdditiveRepresentation,
    BivariateCode, Direction, Gauge, Interval, MonotoneFunction,
};

/// Default number of dyadic halvings of the unit step.
pub const DEFAULT_DEPTH: u32 = 20;
/// Levels refined everywhere before the adaptive criterion applies.
const UNCONDITIONAL_LEVELS: u32 = 6;
/// Refinement stops on an interval once linear interpolation of `f` misses
/// the next dyadic value by less than this (in units of the step).
const REFINE_TOL: f64 = 1e-9;
const MAX_POINTS: usize = 1 << 21;
/// Knots used to tabulate `g` over `J′`.
const G_KNOTS: usize = 8193;

/// How elementary steps `f ↦ f + δ(r)` are realised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StepMode {
    /// `G(·, r)` itself, with `G(·, base) = id`.
    Direct { base: f64 },
    /// `y ↦ w` with `G(w, base) = G(y, r)`, for codes without an identity
    /// modifier; `base` is the end of `J′` whose `ψ` lies closest to `x0`.
    Composite { base: f64 },
}

impl StepMode {
    fn base(self) -> f64 {
        match self {
            StepMode::Direct { base } | StepMode::Composite { base } => base,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionMeta {
    pub x0: f64,
    pub r0: f64,
    pub depth: u32,
    pub mode: StepMode,
    /// Interval of `J` on which `f` is tabulated.
    pub coverage: [f64; 2],
    /// Points on the coarse orbit of the unit step (including `x0`).
    pub orbit_len: usize,
    pub points: usize,
    /// Modifiers `r_k` of the halved steps, level 0 first.
    pub modifiers: Vec<f64>,
}

/// Constructed `f` with its metadata.
#[derive(Debug, Clone)]
pub struct Construction {
    pub f: MonotoneFunction,
    pub meta: ConstructionMeta,
}

/// Constructed `g` over the part of `J′` where it could be determined.
#[derive(Debug, Clone)]
pub struct GConstruction {
    pub g: MonotoneFunction,
    pub coverage: [f64; 2],
    pub clipped_fraction: f64,
}

struct Stepper<'a> {
    code: &'a BivariateCode,
    mode: StepMode,
    j: Interval,
}

impl Stepper<'_> {
    fn forward(&self, y: f64, r: f64) -> Option<f64> {
        let v = self.code.eval(y, r);
        let out = match self.mode {
            StepMode::Direct { .. } => v,
            StepMode::Composite { base } => invert_in_first_tol(self.code, v, base, 0.0).ok()?,
        };
        self.j.contains(out).then_some(out)
    }

    fn backward(&self, y: f64, r: f64) -> Option<f64> {
        let target = match self.mode {
            StepMode::Direct { .. } => y,
            StepMode::Composite { base } => self.code.eval(y, base),
        };
        let out = invert_in_first_tol(self.code, target, r, 0.0).ok()?;
        self.j.contains(out).then_some(out)
    }
}

fn step_mode(hs: &HolderStructure) -> StepMode {
    match invert_in_second(hs.code(), hs.x0(), hs.x0()) {
        Ok(base) => StepMode::Direct { base },
        Err(_) => {
            let jp = hs.code().second();
            let (a, b) = (hs.code().eval(hs.x0(), jp.lo), hs.code().eval(hs.x0(), jp.hi));
            let base = if (a - hs.x0()).abs() <= (b - hs.x0()).abs() { jp.lo } else { jp.hi };
            StepMode::Composite { base }
        }
    }
}

/// Modifier whose step from `x0` moves about a quarter of `J` (at most half
/// of the room on that side), preferring the side allowing the larger step.
pub fn default_r0(hs: &HolderStructure) -> Result<f64> {
    let code = hs.code();
    let j = code.first();
    let x0 = hs.x0();
    let st = Stepper { code, mode: step_mode(hs), j };
    let rs = code.second().linspace(2001);
    let steps: Vec<(f64, f64)> = rs.iter().filter_map(|&r| Some((r, st.forward(x0, r)?))).collect();
    let mut best: Option<(f64, f64)> = None;
    for (d, room) in [(1.0, j.hi - x0), (-1.0, x0 - j.lo)] {
        if room <= 0.0 {
            continue;
        }
        let target = x0 + d * (0.25 * j.width()).min(0.5 * room);
        let pick = steps
            .iter()
            .filter(|(_, v)| d * (v - x0) > 0.0)
            .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()));
        if let Some(&(r, v)) = pick {
            let size = (v - x0).abs();
            if best.is_none_or(|(_, s)| size > s) {
                best = Some((r, size));
            }
        }
    }
    best.map(|b| b.0)
        .ok_or_else(|| Error::UnitDegenerate("no modifier moves x0 inside J".into()))
}

/// `g(s)` from a constructed `f`: `f(ψ(s))`, or `f(G(y, s)) − f(y)` for some
/// `y` in the coverage of `f` when `ψ(s)` falls outside it.
fn g_value(code: &BivariateCode, x0: f64, f: &MonotoneFunction, s: f64) -> Option<f64> {
    let cov = f.domain();
    let p = code.eval(x0, s);
    if cov.contains(p) {
        return Some(f.eval_unchecked(p) - f.eval_unchecked(x0));
    }
    linspace(cov.lo, cov.hi, 17).into_iter().find_map(|y| {
        let v = code.eval(y, s);
        cov.contains(v).then(|| f.eval_unchecked(v) - f.eval_unchecked(y))
    })
}

/// Construct `f` with `f(y•x) = f(y) + f(x)` from orbits of `r0`.
///
/// The orbit `y_{n+1} = G(y_n, r0)` through `x0` pins `f` at multiples of the
/// unit; modifiers `r_k` with `G(G(y, r_k), r_k) = G(y, r_{k−1})` halve the
/// step, and each level inserts midpoints between existing points. After a
/// few levels, an interval is refined only while linear interpolation of `f`
/// is still visibly off at its midpoint. The result is normalised so that
/// `f(x0) = 0` and `|g(r0)| = 1` with `g = f∘ψ`.
pub fn construct_f(hs: &HolderStructure, r0: f64, depth: u32) -> Result<Construction> {
    if !(1..=40).contains(&depth) {
        return Err(Error::InvalidParams(format!("depth must be in 1..=40, got {depth}")));
    }
    let code = hs.code();
    let j = code.first();
    if !code.second().contains(r0) {
        let jp = code.second();
        return Err(Error::OutOfDomain { x: r0, lo: jp.lo, hi: jp.hi });
    }
    let x0 = hs.x0();
    let mode = step_mode(hs);
    let st = Stepper { code, mode, j };

    // sign of the change a forward step makes, read off whichever step exists
    let moved = match (st.forward(x0, r0), st.backward(x0, r0)) {
        (Some(v), _) => v - x0,
        (None, Some(b)) => x0 - b,
        (None, None) => return Err(Error::OrbitEscaped { steps: 0 }),
    };
    let moved = if moved.abs() <= 1e-12 * x0.abs().max(1.0) { 0.0 } else { moved };
    let sigma = Direction::of(moved)
        .ok_or_else(|| Error::UnitDegenerate(format!("step at r0 = {r0} does not move x0")))?
        .sign();

    let unit: i64 = 1 << depth;
    let mut pts: BTreeMap<i64, f64> = BTreeMap::new();
    pts.insert(0, x0);
    // coarse orbit; a forward step changes f by σ units
    let orbit_cap = 1_000_000;
    for (dir, k) in [(1.0, sigma as i64), (-1.0, -(sigma as i64))] {
        let mut y = x0;
        let mut key = 0i64;
        for _ in 0..orbit_cap {
            let next = if dir > 0.0 { st.forward(y, r0) } else { st.backward(y, r0) };
            match next {
                Some(v) if (v - y) * sigma * dir > 0.0 => {
                    key += k * unit;
                    pts.insert(key, v);
                    y = v;
                }
                _ => break,
            }
        }
    }
    let orbit_len = pts.len();
    if orbit_len < 3 {
        return Err(Error::OrbitEscaped { steps: orbit_len - 1 });
    }

    // reference pair for the halving solves: y_ref and its forward image
    let yref = pts
        .iter()
        .find(|(k, _)| pts.contains_key(&(**k + sigma as i64 * unit)))
        .map(|(_, &y)| y)
        .expect("orbit has consecutive points");
    let base = mode.base();
    let mut modifiers = vec![r0];
    let mut active: Vec<i64> = pts.keys().copied().collect::<Vec<_>>();
    active.pop();

    for level in 1..=depth {
        let prev = *modifiers.last().unwrap();
        let target = match st.forward(yref, prev) {
            Some(t) => t,
            None => break,
        };
        // "bad" once the double step overshoots the target or is undefined
        let r = bisect_predicate(
            |r| match st.forward(yref, r).and_then(|v| st.forward(v, r)) {
                Some(v) => sigma * (v - target) > 0.0,
                None => true,
            },
            base,
            prev,
        );
        if r == base {
            break;
        }
        modifiers.push(r);
        let width = unit >> (level - 1);
        let half = width / 2;
        let mut next_active = Vec::new();
        let mut new_pts = Vec::new();
        for &ka in &active {
            let (Some(&xa), Some(&xb)) = (pts.get(&ka), pts.get(&(ka + width))) else {
                continue;
            };
            let mid = if sigma > 0.0 { st.forward(xa, r) } else { st.forward(xb, r) };
            let Some(xm) = mid.filter(|&m| m > xa && m < xb) else {
                continue;
            };
            let (fa, fb) = (ka as f64, (ka + width) as f64);
            let interp = fa + (fb - fa) * (xm - xa) / (xb - xa);
            let dev = (interp - (fa + fb) / 2.0).abs() / unit as f64;
            new_pts.push((ka + half, xm));
            if level < UNCONDITIONAL_LEVELS || dev > REFINE_TOL {
                next_active.push(ka);
                next_active.push(ka + half);
            }
        }
        for (k, x) in new_pts {
            pts.insert(k, x);
        }
        // extend both ends by single steps of the current size
        for end in [-1i64, 1] {
            for _ in 0..4 {
                let (&k, &x) = if end < 0 {
                    pts.iter().next().unwrap()
                } else {
                    pts.iter().next_back().unwrap()
                };
                // moving the key down means decreasing f, i.e. decreasing y
                let up = end > 0;
                let next = if up == (sigma > 0.0) { st.forward(x, r) } else { st.backward(x, r) };
                match next {
                    Some(v) if (v - x) * end as f64 > 0.0 => {
                        let nk = k + end * half;
                        pts.insert(nk, v);
                        next_active.push(nk.min(k));
                    }
                    _ => break,
                }
            }
        }
        next_active.sort_unstable();
        next_active.dedup();
        active = next_active;
        if pts.len() > MAX_POINTS || active.is_empty() {
            break;
        }
    }

    let mut xs = Vec::with_capacity(pts.len());
    let mut fs = Vec::with_capacity(pts.len());
    for (&k, &x) in &pts {
        if xs.last().is_none_or(|&l| x > l) {
            xs.push(x);
            fs.push(k as f64 / unit as f64);
        }
    }
    let raw = MonotoneFunction::new(xs, fs, Direction::Increasing)?;
    let g0 = g_value(code, x0, &raw, r0)
        .filter(|g| *g != 0.0 && g.is_finite())
        .ok_or_else(|| Error::UnitDegenerate(format!("g(r0) undetermined at r0 = {r0}")))?;
    let f = raw.affine(1.0 / g0.abs(), 0.0)?;
    let dom = f.domain();
    Ok(Construction {
        meta: ConstructionMeta {
            x0,
            r0,
            depth,
            mode,
            coverage: [dom.lo, dom.hi],
            orbit_len,
            points: f.len(),
            modifiers,
        },
        f,
    })
}

/// Tabulate `g` over `J′` (with `r0` among the knots) from a constructed `f`,
/// keeping the longest run of modifiers at which it could be determined.
pub fn construct_g(hs: &HolderStructure, f: &MonotoneFunction, r0: f64) -> Result<GConstruction> {
    let code = hs.code();
    let jp = code.second();
    // the gauge modifier is a knot, so |g(r0)| = 1 holds exactly
    let mut ss = jp.linspace(G_KNOTS);
    if jp.contains(r0) {
        let i = ss.partition_point(|&s| s < r0);
        if ss.get(i) != Some(&r0) {
            ss.insert(i, r0);
        }
    }
    let vals: Vec<Option<f64>> = ss.iter().map(|&s| g_value(code, hs.x0(), f, s)).collect();
    let defined = vals.iter().filter(|v| v.is_some()).count();

    let (mut best, mut cur) = ((0usize, 0usize), None::<usize>);
    for (i, v) in vals.iter().enumerate() {
        match (v, cur) {
            (Some(_), None) => cur = Some(i),
            (None, Some(s)) => {
                if i - s > best.1 - best.0 {
                    best = (s, i);
                }
                cur = None;
            }
            _ => {}
        }
    }
    if let Some(s) = cur {
        if vals.len() - s > best.1 - best.0 {
            best = (s, vals.len());
        }
    }
    if best.1 - best.0 < 2 {
        return Err(Error::OutOfDomain { x: jp.lo, lo: f.domain().lo, hi: f.domain().hi });
    }
    let dir = code.dir_second();
    let mut xs = Vec::new();
    let mut gs: Vec<f64> = Vec::new();
    for i in best.0..best.1 {
        let v = vals[i].unwrap();
        if gs.last().is_none_or(|&l| dir.sign() * (v - l) > 0.0) {
            xs.push(ss[i]);
            gs.push(v);
        }
    }
    let g = MonotoneFunction::new(xs, gs, dir)?;
    let dom = g.domain();
    Ok(GConstruction {
        coverage: [dom.lo, dom.hi],
        clipped_fraction: 1.0 - defined as f64 / vals.len() as f64,
        g,
    })
}

/// `construct_f` followed by `construct_g`, packaged as a representation.
pub fn construct_representation(
    hs: &HolderStructure,
    r0: Option<f64>,
    depth: u32,
) -> Result<(AdditiveRepresentation, Construction, GConstruction)> {
    let r0 = match r0 {
        Some(r) => r,
        None => default_r0(hs)?,
    };
    let c = construct_f(hs, r0, depth)?;
    let g = construct_g(hs, &c.f, r0)?;
    let gauge = Gauge { x0: hs.x0(), r0, unit: 1.0 };
    let rep = AdditiveRepresentation::new(c.f.clone(), g.g.clone(), None, gauge)?;
    Ok((rep, c, g))
}
