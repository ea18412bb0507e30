//! Functions of `t ∈ (0, ∞)`: rearrangements, weights and transformed profiles.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Grid, Integrand};
use crate::rearrange::StepProfile;
use crate::tail::Tail;

/// `1 + |log t|`, the building block of the broken logarithms.
#[inline]
pub fn log_factor(t: f64) -> f64 {
    1.0 + t.ln().abs()
}

/// `coef · t^power · (1 + |log t|)^log_power · exp(-exp_rate · t^exp_power)` on `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub coef: f64,
    #[serde(default)]
    pub power: f64,
    #[serde(default)]
    pub log_power: f64,
    #[serde(default)]
    pub exp_rate: f64,
    #[serde(default)]
    pub exp_power: f64,
}

impl Segment {
    pub fn constant(start: f64, end: f64, c: f64) -> Self {
        Segment {
            start,
            end,
            coef: c,
            power: 0.0,
            log_power: 0.0,
            exp_rate: 0.0,
            exp_power: 0.0,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.coef == 0.0 {
            return 0.0;
        }
        let mut v = self.coef;
        if self.power != 0.0 {
            v *= t.powf(self.power);
        }
        if self.log_power != 0.0 {
            v *= log_factor(t).powf(self.log_power);
        }
        if self.exp_rate != 0.0 {
            v *= (-self.exp_rate * t.powf(self.exp_power)).exp();
        }
        v
    }

    fn tail(&self, at_zero: bool) -> Tail {
        if self.coef == 0.0 {
            return Tail::Zero;
        }
        let exp_active = self.exp_rate != 0.0
            && ((at_zero && self.exp_power < 0.0) || (!at_zero && self.exp_power > 0.0));
        if exp_active {
            return if self.exp_rate > 0.0 {
                Tail::Rapid
            } else {
                Tail::Explosive
            };
        }
        Tail::power_log(self.power, self.log_power)
    }
}

/// A closure-backed profile with declared metadata.
#[derive(Clone)]
pub struct MapProfile {
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub breaks: Vec<f64>,
    pub tail_zero: Tail,
    pub tail_inf: Tail,
    pub limit_zero: Option<f64>,
}

impl fmt::Debug for MapProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapProfile")
            .field("breaks", &self.breaks)
            .field("tail_zero", &self.tail_zero)
            .field("tail_inf", &self.tail_inf)
            .field("limit_zero", &self.limit_zero)
            .finish_non_exhaustive()
    }
}

/// Samples `(t_i, v_i)` with log–log interpolation between positive neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledProfile {
    pub ts: Vec<f64>,
    pub vs: Vec<f64>,
    /// Points where panels must be split (jumps, kinks).
    #[serde(default)]
    pub breaks: Vec<f64>,
    pub tail_zero: Tail,
    pub tail_inf: Tail,
    #[serde(default)]
    pub limit_zero: Option<f64>,
}

impl SampledProfile {
    pub fn new(ts: Vec<f64>, vs: Vec<f64>, tail_zero: Tail, tail_inf: Tail) -> Result<Self> {
        if ts.len() != vs.len() || ts.is_empty() {
            return Err(Error::domain("sampled profile needs matching, nonempty t and value lists"));
        }
        if ts[0] <= 0.0 || ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("sampled profile grid must be positive and strictly increasing"));
        }
        Ok(SampledProfile {
            ts,
            vs,
            breaks: Vec::new(),
            tail_zero,
            tail_inf,
            limit_zero: None,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.ts.len();
        let t0 = self.ts[0];
        if t < t0 {
            if let Some(c) = self.limit_zero {
                if self.tail_zero == Tail::CONSTANT {
                    return c;
                }
            }
            return match self.tail_zero {
                Tail::Power { power, .. } => self.vs[0] * (t / t0).powf(power),
                Tail::Zero => 0.0,
                _ => self.vs[0],
            };
        }
        let tl = self.ts[n - 1];
        if t >= tl {
            if t == tl {
                return self.vs[n - 1];
            }
            return match self.tail_inf {
                Tail::Power { power, .. } => self.vs[n - 1] * (t / tl).powf(power),
                _ => 0.0,
            };
        }
        let i = match self.ts.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return self.vs[i],
            Err(i) => i - 1,
        };
        let (ta, tb, va, vb) = (self.ts[i], self.ts[i + 1], self.vs[i], self.vs[i + 1]);
        if va > 0.0 && vb > 0.0 {
            let s = (t / ta).ln() / (tb / ta).ln();
            (va.ln() + s * (vb / va).ln()).exp()
        } else {
            va + (vb - va) * (t - ta) / (tb - ta)
        }
    }
}

#[derive(Debug, Clone)]
pub enum Profile {
    Analytic(Vec<Segment>),
    Sampled(SampledProfile),
    Step(StepProfile),
    Map(MapProfile),
}

impl Profile {
    pub fn zero() -> Self {
        Profile::Analytic(vec![Segment::constant(0.0, f64::INFINITY, 0.0)])
    }

    pub fn constant(c: f64) -> Self {
        Profile::Analytic(vec![Segment::constant(0.0, f64::INFINITY, c)])
    }

    /// `c · χ_(0,a)`.
    pub fn indicator_scaled(a: f64, c: f64) -> Self {
        if a <= 0.0 || c == 0.0 {
            return Profile::zero();
        }
        if a.is_infinite() {
            return Profile::constant(c);
        }
        Profile::Analytic(vec![
            Segment::constant(0.0, a, c),
            Segment::constant(a, f64::INFINITY, 0.0),
        ])
    }

    /// `χ_(0,a)`.
    pub fn indicator(a: f64) -> Self {
        Self::indicator_scaled(a, 1.0)
    }

    /// `c · e^{-rate·t}`.
    pub fn exp_decay(c: f64, rate: f64) -> Self {
        Profile::Analytic(vec![Segment {
            start: 0.0,
            end: f64::INFINITY,
            coef: c,
            power: 0.0,
            log_power: 0.0,
            exp_rate: rate,
            exp_power: 1.0,
        }])
    }

    /// `c · t^power` on `(0, a)`, zero after (`a = ∞` allowed).
    pub fn power_on(c: f64, power: f64, a: f64) -> Self {
        let mut segs = vec![Segment {
            start: 0.0,
            end: a,
            coef: c,
            power,
            log_power: 0.0,
            exp_rate: 0.0,
            exp_power: 0.0,
        }];
        if a.is_finite() {
            segs.push(Segment::constant(a, f64::INFINITY, 0.0));
        }
        Profile::Analytic(segs)
    }

    pub fn analytic(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::domain("analytic profile needs at least one segment"));
        }
        if segments[0].start != 0.0 || segments[segments.len() - 1].end != f64::INFINITY {
            return Err(Error::domain("analytic segments must cover (0, ∞)"));
        }
        if segments.windows(2).any(|w| w[0].end != w[1].start)
            || segments.iter().any(|s| !(s.end > s.start))
        {
            return Err(Error::domain("analytic segments must be contiguous and non-overlapping"));
        }
        Ok(Profile::Analytic(segments))
    }

    pub fn from_fn(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        breaks: Vec<f64>,
        tail_zero: Tail,
        tail_inf: Tail,
        limit_zero: Option<f64>,
    ) -> Self {
        Profile::Map(MapProfile {
            f: Arc::new(f),
            breaks,
            tail_zero,
            tail_inf,
            limit_zero,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Analytic(segs) => {
                let i = segs.partition_point(|s| s.end <= t);
                segs.get(i).map_or(0.0, |s| s.eval(t))
            }
            Profile::Sampled(s) => s.eval(t),
            Profile::Step(s) => s.eval(t),
            Profile::Map(m) => (m.f)(t),
        }
    }

    /// Left limit `f(t⁻)`.
    pub fn eval_left(&self, t: f64) -> f64 {
        match self {
            Profile::Analytic(segs) => {
                let i = segs.partition_point(|s| s.end < t);
                segs.get(i).map_or(0.0, |s| s.eval(t))
            }
            Profile::Step(s) => s.eval_left(t),
            _ => self.eval(t * (1.0 - 4.0 * f64::EPSILON)),
        }
    }

    /// Interior points of `(0, ∞)` where the profile is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Profile::Analytic(segs) => segs.iter().skip(1).map(|s| s.start).collect(),
            Profile::Sampled(s) => s.breaks.clone(),
            Profile::Step(s) => s.breakpoints.iter().copied().filter(|&b| b > 0.0).collect(),
            Profile::Map(m) => m.breaks.clone(),
        }
    }

    pub fn tail_zero(&self) -> Tail {
        match self {
            Profile::Analytic(segs) => segs[0].tail(true),
            Profile::Sampled(s) => s.tail_zero,
            Profile::Step(s) => {
                if s.values.first().copied().unwrap_or(s.tail_value) == 0.0 {
                    Tail::Zero
                } else {
                    Tail::CONSTANT
                }
            }
            Profile::Map(m) => m.tail_zero,
        }
    }

    pub fn tail_inf(&self) -> Tail {
        match self {
            Profile::Analytic(segs) => segs[segs.len() - 1].tail(false),
            Profile::Sampled(s) => s.tail_inf,
            Profile::Step(s) => {
                if s.tail_value == 0.0 {
                    Tail::Zero
                } else if s.tail_value.is_infinite() {
                    Tail::Infinite
                } else {
                    Tail::CONSTANT
                }
            }
            Profile::Map(m) => m.tail_inf,
        }
    }

    /// `f(0⁺)` when it is finite and known.
    pub fn limit_zero(&self) -> Option<f64> {
        match self {
            Profile::Analytic(segs) => {
                let s = &segs[0];
                match s.tail(true) {
                    Tail::Zero | Tail::Rapid => Some(0.0),
                    Tail::Power { power, logs } => {
                        if power > 0.0 {
                            Some(0.0)
                        } else if power == 0.0 && logs[0] == 0.0 {
                            Some(s.coef)
                        } else if power == 0.0 && logs[0] < 0.0 {
                            Some(0.0)
                        } else {
                            None
                        }
                    }
                    _ => None,
                }
            }
            Profile::Sampled(s) => s.limit_zero,
            Profile::Step(s) => Some(s.values.first().copied().unwrap_or(s.tail_value)),
            Profile::Map(m) => m.limit_zero,
        }
    }

    /// `λ·f`.
    pub fn scaled(&self, c: f64) -> Profile {
        match self {
            Profile::Analytic(segs) => Profile::Analytic(
                segs.iter()
                    .map(|s| Segment {
                        coef: s.coef * c,
                        ..*s
                    })
                    .collect(),
            ),
            Profile::Step(s) => Profile::Step(s.scaled(c)),
            Profile::Sampled(s) => {
                let mut s = s.clone();
                s.vs.iter_mut().for_each(|v| *v *= c);
                s.limit_zero = s.limit_zero.map(|v| v * c);
                Profile::Sampled(s)
            }
            Profile::Map(m) => {
                let f = m.f.clone();
                let tz = if c == 0.0 { Tail::Zero } else { m.tail_zero };
                let ti = if c == 0.0 { Tail::Zero } else { m.tail_inf };
                Profile::from_fn(
                    move |t| c * f(t),
                    m.breaks.clone(),
                    tz,
                    ti,
                    m.limit_zero.map(|v| v * c),
                )
            }
        }
    }

    /// Shared handle usable inside closures.
    pub fn shared(&self) -> Arc<Profile> {
        Arc::new(self.clone())
    }

    /// `∫_0^t f`.
    pub fn integral_to(&self, t: f64, grid: &Grid) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if let Profile::Step(s) = self {
            return s.integral_to(t);
        }
        let f = |s: f64| self.eval(s);
        let g = Integrand::new(&f)
            .on(0.0, t)
            .breaks(self.breakpoints())
            .tails(self.tail_zero(), self.tail_inf());
        integrate(&g, grid).value
    }

    /// `∫_0^∞ f`.
    pub fn integral(&self, grid: &Grid) -> f64 {
        if let Profile::Step(s) = self {
            if s.tail_value != 0.0 {
                return f64::INFINITY;
            }
            return s.integral_to(*s.breakpoints.last().unwrap_or(&0.0));
        }
        let f = |s: f64| self.eval(s);
        let g = Integrand::new(&f)
            .breaks(self.breakpoints())
            .tails(self.tail_zero(), self.tail_inf());
        integrate(&g, grid).value
    }

    /// Whether the profile is identically zero (cheap structural test).
    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Analytic(segs) => segs.iter().all(|s| s.coef == 0.0),
            Profile::Step(s) => s.values.iter().all(|&v| v == 0.0) && s.tail_value == 0.0,
            Profile::Sampled(s) => s.vs.iter().all(|&v| v == 0.0) && s.limit_zero.unwrap_or(0.0) == 0.0,
            Profile::Map(m) => m.tail_zero == Tail::Zero && m.tail_inf == Tail::Zero && m.breaks.is_empty(),
        }
    }

    /// Values at the grid nodes and breakpoints, for sup and order tests.
    pub fn probe_points(&self, grid: &Grid) -> Vec<f64> {
        let mut pts = grid.nodes();
        pts.extend(self.breakpoints());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}
