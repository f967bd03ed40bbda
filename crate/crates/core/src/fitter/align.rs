use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holder::{construct_representation, HolderStructure};
use crate::lawcore::{linspace, AffineMap, BivariateCode, MonotoneFunction};

/// Pass threshold for alignment errors and g-scale consistency.
pub const ALIGN_TOL: f64 = 1e-3;

/// Least-squares `v2 ≈ ξ·v1 + θ` over paired samples, with its largest
/// absolute deviation. Exactly `(1, 0)` when the samples coincide.
pub fn affine_align_values(v1: &[f64], v2: &[f64]) -> Result<(AffineMap, f64)> {
    if v1.len() != v2.len() || v1.len() < 2 {
        return Err(Error::InvalidParams("need at least two paired samples".into()));
    }
    let n = v1.len() as f64;
    let m1 = v1.iter().sum::<f64>() / n;
    let spread = v1.iter().fold(0.0f64, |m, a| m.max((a - m1).abs()));
    if !(spread > 1e-14 * m1.abs().max(1.0)) {
        return Err(Error::DegenerateFit("first function is constant on the samples".into()));
    }
    if v1 == v2 {
        return Ok((AffineMap::identity(), 0.0));
    }
    let m2 = v2.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (a, b) in v1.iter().zip(v2) {
        sxx += (a - m1) * (a - m1);
        sxy += (a - m1) * (b - m2);
    }
    let xi = sxy / sxx;
    let map = AffineMap::new(xi, m2 - xi * m1)?;
    let err = v1
        .iter()
        .zip(v2)
        .map(|(a, b)| (map.apply(*a) - b).abs())
        .fold(0.0, f64::max);
    Ok((map, err))
}

/// Fit `f2 ≈ ξ·f1 + θ` with `ξ > 0` on `xs` (which must lie in both domains).
pub fn affine_align(f1: &MonotoneFunction, f2: &MonotoneFunction, xs: &[f64]) -> Result<(AffineMap, f64)> {
    let v1 = xs.iter().map(|&x| f1.eval(x)).collect::<Result<Vec<_>>>()?;
    let v2 = xs.iter().map(|&x| f2.eval(x)).collect::<Result<Vec<_>>>()?;
    affine_align_values(&v1, &v2)
}

/// As [`affine_align`] with a closed-form target `f2`.
pub fn affine_align_fn<F: Fn(f64) -> f64>(f1: &MonotoneFunction, f2: F, xs: &[f64]) -> Result<(AffineMap, f64)> {
    let v1 = xs.iter().map(|&x| f1.eval(x)).collect::<Result<Vec<_>>>()?;
    let v2: Vec<f64> = xs.iter().map(|&x| f2(x)).collect();
    affine_align_values(&v1, &v2)
}

/// `n` points spanning the common domain of two tables.
pub fn shared_samples(f1: &MonotoneFunction, f2: &MonotoneFunction, n: usize) -> Result<Vec<f64>> {
    let d = f1
        .domain()
        .intersect(&f2.domain())
        .ok_or_else(|| Error::DegenerateFit("tables share no domain".into()))?;
    Ok(linspace(d.lo, d.hi, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeConfig {
    pub x0: f64,
    pub r0: Option<f64>,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairAlignment {
    pub i: usize,
    pub j: usize,
    pub xi: f64,
    pub theta: f64,
    pub f_error: f64,
    /// Least-squares ratio `g_j / g_i` through the origin.
    pub g_scale: f64,
    /// `|g_scale / ξ − 1|`.
    pub g_consistency: f64,
    pub g_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeUniquenessReport {
    pub configs: Vec<GaugeConfig>,
    /// Gauge modifier actually used by each construction.
    pub r0s: Vec<f64>,
    pub pairs: Vec<PairAlignment>,
    pub max_f_error: f64,
    pub max_g_consistency: f64,
    pub tolerance: f64,
    pub pass: bool,
}

const SAMPLES: usize = 201;

/// Construct `(f, g)` for every configuration and align each pair:
/// `f_j ≈ ξ f_i + θ` and `g_j ≈ ξ' g_i`, requiring `ξ' = ξ`.
pub fn check_gauge_uniqueness(code: &BivariateCode, configs: &[GaugeConfig]) -> Result<GaugeUniquenessReport> {
    if configs.len() < 2 {
        return Err(Error::InvalidParams("need at least two configurations".into()));
    }
    let mut reps = Vec::with_capacity(configs.len());
    for c in configs {
        let hs = HolderStructure::new(code.clone(), c.x0)?;
        reps.push(construct_representation(&hs, c.r0, c.depth)?);
    }
    let mut pairs = Vec::new();
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            let (a, b) = (&reps[i].0, &reps[j].0);
            let (map, f_error) = affine_align(&a.f, &b.f, &shared_samples(&a.f, &b.f, SAMPLES)?)?;
            let rs = shared_samples(&a.g, &b.g, SAMPLES)?;
            let ga: Vec<f64> = rs.iter().map(|&r| a.g.eval_unchecked(r)).collect();
            let gb: Vec<f64> = rs.iter().map(|&r| b.g.eval_unchecked(r)).collect();
            let saa: f64 = ga.iter().map(|v| v * v).sum();
            if saa == 0.0 {
                return Err(Error::DegenerateFit("g vanishes on the shared samples".into()));
            }
            let g_scale = ga.iter().zip(&gb).map(|(p, q)| p * q).sum::<f64>() / saa;
            let g_error = ga
                .iter()
                .zip(&gb)
                .map(|(p, q)| (map.xi() * p - q).abs())
                .fold(0.0, f64::max);
            pairs.push(PairAlignment {
                i,
                j,
                xi: map.xi(),
                theta: map.theta(),
                f_error,
                g_scale,
                g_consistency: (g_scale / map.xi() - 1.0).abs(),
                g_error,
            });
        }
    }
    let max_f_error = pairs.iter().map(|p| p.f_error).fold(0.0, f64::max);
    let max_g_consistency = pairs.iter().map(|p| p.g_consistency).fold(0.0, f64::max);
    Ok(GaugeUniquenessReport {
        configs: configs.to_vec(),
        r0s: reps.iter().map(|r| r.1.meta.r0).collect(),
        pass: max_f_error <= ALIGN_TOL && max_g_consistency <= ALIGN_TOL,
        pairs,
        max_f_error,
        max_g_consistency,
        tolerance: ALIGN_TOL,
    })
}
