use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::interval::Interval;

/// Direction of strict monotonicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Increasing => 1.0,
            Direction::Decreasing => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }

    /// Direction implied by the sign of a nonzero difference.
    pub fn of(delta: f64) -> Option<Self> {
        if delta > 0.0 {
            Some(Direction::Increasing)
        } else if delta < 0.0 {
            Some(Direction::Decreasing)
        } else {
            None
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Increasing => f.write_str("increasing"),
            Direction::Decreasing => f.write_str("decreasing"),
        }
    }
}

type Eval = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A bivariate law `M: J × J′ → H`, strictly increasing in its first argument
/// and strictly monotone in its second.
///
/// The monotonicity and continuity requirements are declared here and checked
/// numerically by [`crate::axioms::check_code_axioms`].
#[derive(Clone)]
pub struct BivariateCode {
    name: String,
    eval: Arc<Eval>,
    first: Interval,
    second: Interval,
    range_hint: Option<Interval>,
    dir_second: Direction,
    params: BTreeMap<String, f64>,
}

impl BivariateCode {
    pub fn new<F>(
        name: impl Into<String>,
        first: Interval,
        second: Interval,
        dir_second: Direction,
        eval: F,
    ) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            first,
            second,
            range_hint: None,
            dir_second,
            params: BTreeMap::new(),
        }
    }

    pub fn with_params(mut self, params: BTreeMap<String, f64>) -> Self {
        self.params = params;
        self
    }

    pub fn with_range_hint(mut self, h: Interval) -> Self {
        self.range_hint = Some(h);
        self
    }

    /// Same law restricted (or extended) to a new rectangle.
    pub fn with_domain(mut self, first: Interval, second: Interval) -> Self {
        self.first = first;
        self.second = second;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    #[inline]
    pub fn eval(&self, y: f64, r: f64) -> f64 {
        (self.eval)(y, r)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The interval `J` of the first argument.
    pub fn first(&self) -> Interval {
        self.first
    }

    /// The interval `J′` of the second argument.
    pub fn second(&self) -> Interval {
        self.second
    }

    pub fn range_hint(&self) -> Option<Interval> {
        self.range_hint
    }

    pub fn dir_first(&self) -> Direction {
        Direction::Increasing
    }

    pub fn dir_second(&self) -> Direction {
        self.dir_second
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Post-compose with a strictly increasing map, e.g. `ln ∘ M`.
    pub fn map_output<F>(&self, name: impl Into<String>, outer: F) -> BivariateCode
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = Arc::clone(&self.eval);
        BivariateCode {
            name: name.into(),
            eval: Arc::new(move |y, r| outer(inner(y, r))),
            first: self.first,
            second: self.second,
            range_hint: None,
            dir_second: self.dir_second,
            params: self.params.clone(),
        }
    }

    /// Attainable range of `r ↦ M(x, r)` over `J′`, probed at the endpoints.
    pub fn section_range_second(&self, x: f64) -> (f64, f64) {
        let a = self.eval(x, self.second.lo);
        let b = self.eval(x, self.second.hi);
        (a.min(b), a.max(b))
    }

    /// Attainable range of `y ↦ M(y, t)` over `J`, probed at the endpoints.
    pub fn section_range_first(&self, t: f64) -> (f64, f64) {
        let a = self.eval(self.first.lo, t);
        let b = self.eval(self.first.hi, t);
        (a.min(b), a.max(b))
    }
}

impl fmt::Debug for BivariateCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BivariateCode")
            .field("name", &self.name)
            .field("first", &self.first)
            .field("second", &self.second)
            .field("dir_second", &self.dir_second)
            .field("params", &self.params)
            .finish()
    }
}
