use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::synthetic::{make_synthetic, SyntheticKnots};
use crate::error::{Error, Result};
use crate::lawcore::{BivariateCode, Direction, Interval};

/// The built-in laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawName {
    Lorentz,
    Beer,
    Cylinder,
    Pythagoras,
    Vanderwaals,
    Synthetic,
}

impl LawName {
    pub const ALL: [LawName; 6] = [
        LawName::Lorentz,
        LawName::Beer,
        LawName::Cylinder,
        LawName::Pythagoras,
        LawName::Vanderwaals,
        LawName::Synthetic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LawName::Lorentz => "lorentz",
            LawName::Beer => "beer",
            LawName::Cylinder => "cylinder",
            LawName::Pythagoras => "pythagoras",
            LawName::Vanderwaals => "vanderwaals",
            LawName::Synthetic => "synthetic",
        }
    }

    /// Closed form of the law as a one-line formula.
    pub fn formula(self) -> &'static str {
        match self {
            LawName::Lorentz => "L(l, v) = l * sqrt(1 - (v/c)^2)",
            LawName::Beer => "I(x, y) = x * exp(-y/c)",
            LawName::Cylinder => "C(l, r) = l * pi * r^2",
            LawName::Pythagoras => "P(x, y) = sqrt(x^2 + y^2)",
            LawName::Vanderwaals => "T(p, v) = K * (p + a/v^2) * (v - b)",
            LawName::Synthetic => "G(y, r) = m(f(y) + g(r)) from knot tables",
        }
    }
}

impl fmt::Display for LawName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LawName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LawName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown law `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub first: Interval,
    pub second: Interval,
}

/// Description of a law: which one, its constants and its rectangle.
///
/// Parses from `{"name": …, "params": {…}, "domain": {…}}`; missing params and
/// domain fall back to the defaults of each law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSpec {
    pub name: LawName,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub domain: Option<Domain>,
    #[serde(default)]
    pub synthetic: Option<SyntheticKnots>,
}

impl LawSpec {
    pub fn new(name: LawName) -> Self {
        Self {
            name,
            params: BTreeMap::new(),
            domain: None,
            synthetic: None,
        }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_domain(mut self, first: Interval, second: Interval) -> Self {
        self.domain = Some(Domain { first, second });
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParams(e.to_string()))
    }

    /// Params merged over the law's defaults.
    pub fn resolved_params(&self) -> BTreeMap<String, f64> {
        let mut p = default_params(self.name);
        for (k, v) in &self.params {
            p.insert(k.clone(), *v);
        }
        p
    }

    pub fn resolved_domain(&self) -> Result<Domain> {
        if let Some(d) = self.domain {
            return Ok(d);
        }
        let p = self.resolved_params();
        let iv = Interval::new;
        Ok(match self.name {
            LawName::Lorentz => Domain {
                first: iv(0.1, 10.0)?,
                second: iv(0.0, 0.95 * positive(&p, "c")?)?,
            },
            LawName::Beer => Domain {
                first: iv(0.1, 10.0)?,
                second: iv(0.0, 5.0 * positive(&p, "c")?)?,
            },
            LawName::Cylinder => Domain {
                first: iv(0.1, 10.0)?,
                second: iv(0.1, 3.0)?,
            },
            LawName::Pythagoras => Domain {
                first: iv(0.5, 10.0)?,
                second: iv(0.5, 10.0)?,
            },
            LawName::Vanderwaals => Domain {
                first: iv(0.5, 5.0)?,
                second: iv(1.0, 3.0)?,
            },
            LawName::Synthetic => {
                return Err(Error::InvalidParams(
                    "synthetic laws take their domain from the knot tables".into(),
                ))
            }
        })
    }
}

fn default_params(name: LawName) -> BTreeMap<String, f64> {
    let pairs: &[(&str, f64)] = match name {
        LawName::Lorentz | LawName::Beer => &[("c", 1.0)],
        LawName::Vanderwaals => &[("a", 3.0), ("b", 0.5), ("K", 1.0)],
        _ => &[],
    };
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn positive(p: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    match p.get(key) {
        Some(&v) if v > 0.0 && v.is_finite() => Ok(v),
        Some(&v) => Err(Error::InvalidParams(format!("{key} must be > 0, got {v}"))),
        None => Err(Error::InvalidParams(format!("missing parameter {key}"))),
    }
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParams(msg.into()))
    }
}

/// Build the code for a law.
pub fn make_law(spec: &LawSpec) -> Result<BivariateCode> {
    if spec.name == LawName::Synthetic {
        let knots = spec
            .synthetic
            .as_ref()
            .ok_or_else(|| Error::InvalidParams("synthetic law needs knot tables".into()))?;
        let (f, g, m) = knots.to_functions()?;
        let code = make_synthetic(f, g, m)?;
        return Ok(match spec.domain {
            Some(d) => code.with_domain(d.first, d.second),
            None => code,
        });
    }
    let p = spec.resolved_params();
    let d = spec.resolved_domain()?;
    require(d.first.lo >= 0.0, "first interval must be nonnegative")?;
    let code = match spec.name {
        LawName::Lorentz => {
            let c = positive(&p, "c")?;
            require(d.second.lo >= 0.0 && d.second.hi < c, "speeds must lie in [0, c)")?;
            BivariateCode::new("lorentz", d.first, d.second, Direction::Decreasing, move |l, v| {
                l * (1.0 - (v / c) * (v / c)).sqrt()
            })
        }
        LawName::Beer => {
            let c = positive(&p, "c")?;
            require(d.second.lo >= 0.0, "concentration must be nonnegative")?;
            BivariateCode::new("beer", d.first, d.second, Direction::Decreasing, move |x, y| {
                x * (-y / c).exp()
            })
        }
        LawName::Cylinder => {
            require(d.second.lo > 0.0, "radius must be positive")?;
            BivariateCode::new("cylinder", d.first, d.second, Direction::Increasing, |l, r| {
                l * PI * r * r
            })
        }
        LawName::Pythagoras => {
            require(d.first.lo > 0.0 && d.second.lo > 0.0, "sides must be positive")?;
            BivariateCode::new("pythagoras", d.first, d.second, Direction::Increasing, |x, y| {
                (x * x + y * y).sqrt()
            })
        }
        LawName::Vanderwaals => {
            let a = positive(&p, "a")?;
            let b = positive(&p, "b")?;
            let k = positive(&p, "K")?;
            require(d.second.lo > b, "volume must exceed b")?;
            BivariateCode::new("vanderwaals", d.first, d.second, Direction::Increasing, move |pr, v| {
                k * (pr + a / (v * v)) * (v - b)
            })
        }
        LawName::Synthetic => unreachable!(),
    };
    Ok(code.with_params(p))
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Closed-form `f` and `g` of a law, in the gauge `ξ = 1, θ = 0`.
#[derive(Clone)]
pub struct AnalyticReference {
    pub f_closed: RealFn,
    pub g_closed: RealFn,
    pub notes: &'static str,
}

impl AnalyticReference {
    pub fn f(&self, x: f64) -> f64 {
        (self.f_closed)(x)
    }

    pub fn g(&self, r: f64) -> f64 {
        (self.g_closed)(r)
    }

    /// `f⁻¹(f(y) + g(r))` with `f` inverted in closed form.
    pub fn reconstruct(&self, name: LawName, y: f64, r: f64) -> f64 {
        let s = self.f(y) + self.g(r);
        match name {
            LawName::Pythagoras => s.sqrt(),
            _ => s.exp(),
        }
    }
}

impl fmt::Debug for AnalyticReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticReference").field("notes", &self.notes).finish()
    }
}

pub fn analytic_reference(spec: &LawSpec) -> Result<AnalyticReference> {
    let p = spec.resolved_params();
    let r = match spec.name {
        LawName::Lorentz => {
            let c = positive(&p, "c")?;
            AnalyticReference {
                f_closed: Arc::new(f64::ln),
                g_closed: Arc::new(move |v: f64| (1.0 - (v / c) * (v / c)).sqrt().ln()),
                notes: "f = ln l, g = ln sqrt(1 - (v/c)^2); xi = 1, theta = 0",
            }
        }
        LawName::Beer => {
            let c = positive(&p, "c")?;
            AnalyticReference {
                f_closed: Arc::new(f64::ln),
                g_closed: Arc::new(move |y: f64| -y / c),
                notes: "f = ln x, g = -y/c; xi = 1, theta = 0",
            }
        }
        LawName::Cylinder => AnalyticReference {
            f_closed: Arc::new(f64::ln),
            g_closed: Arc::new(|r: f64| (PI * r * r).ln()),
            notes: "f = ln l, g = ln(pi r^2); xi = 1, theta = 0",
        },
        LawName::Pythagoras => AnalyticReference {
            f_closed: Arc::new(|x: f64| x * x),
            g_closed: Arc::new(|y: f64| y * y),
            notes: "f = g = x^2; xi = 1, theta = 0",
        },
        LawName::Vanderwaals | LawName::Synthetic => {
            return Err(Error::NoAnalyticForm(spec.name.to_string()))
        }
    };
    Ok(r)
}
