//! Unsigned, signed and maximal rearrangements; radial change of variables.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{Profile, SampledProfile};
use crate::quadrature::{invert_monotone, Grid};
use crate::tail::Tail;

/// A measurable function as `(value, measure)` atoms.
///
/// With `zero_tail` the function lives on a space of infinite measure and
/// vanishes off the atoms. Otherwise `total_measure` must declare a finite
/// space; measure not covered by atoms carries the value 0.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampledFunction {
    pub atoms: Vec<(f64, f64)>,
    #[serde(default = "default_true")]
    pub zero_tail: bool,
    #[serde(default)]
    pub total_measure: Option<f64>,
}

fn default_true() -> bool {
    true
}

impl SampledFunction {
    pub fn new(atoms: Vec<(f64, f64)>) -> Self {
        SampledFunction {
            atoms,
            zero_tail: true,
            total_measure: None,
        }
    }

    pub fn on_finite_space(atoms: Vec<(f64, f64)>, total: f64) -> Self {
        SampledFunction {
            atoms,
            zero_tail: false,
            total_measure: Some(total),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for &(v, w) in &self.atoms {
            if !(w >= 0.0) || !w.is_finite() || v.is_nan() {
                return Err(Error::domain("atom weights must be finite and nonnegative"));
            }
        }
        if let Some(t) = self.total_measure {
            if !self.zero_tail && !(t >= self.finite_weight() * (1.0 - 1e-12)) {
                return Err(Error::domain("total measure is smaller than the atom weights"));
            }
        }
        Ok(())
    }

    pub fn finite_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    fn live_atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().copied().filter(|a| a.1 > 0.0)
    }
}

/// Piecewise-constant profile on `[t_{i-1}, t_i)` with `t_0 = 0` and a tail on `[t_k, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepProfile {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub tail_value: f64,
}

impl StepProfile {
    pub fn zero() -> Self {
        StepProfile {
            breakpoints: vec![0.0],
            values: Vec::new(),
            tail_value: 0.0,
        }
    }

    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, tail_value: f64) -> Result<Self> {
        if breakpoints.first() != Some(&0.0) {
            return Err(Error::domain("step profile must start at t = 0"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("step breakpoints must be strictly increasing"));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::domain("step profile needs one value per interval"));
        }
        Ok(StepProfile {
            breakpoints,
            values,
            tail_value,
        })
    }

    /// Value on the interval containing `t` (left-closed convention).
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b <= t);
        if i == 0 {
            return self.values.first().copied().unwrap_or(self.tail_value);
        }
        self.values.get(i - 1).copied().unwrap_or(self.tail_value)
    }

    pub fn eval_left(&self, t: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&b| b < t);
        if i == 0 {
            return self.values.first().copied().unwrap_or(self.tail_value);
        }
        self.values.get(i - 1).copied().unwrap_or(self.tail_value)
    }

    pub fn integral_to(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let (a, b) = (self.breakpoints[i], self.breakpoints[i + 1]);
            if t <= a {
                return acc;
            }
            acc += v * (b.min(t) - a);
        }
        let end = *self.breakpoints.last().unwrap();
        if t > end && self.tail_value != 0.0 {
            acc += self.tail_value * (t - end);
        }
        acc
    }

    pub fn scaled(&self, c: f64) -> Self {
        StepProfile {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            tail_value: self.tail_value * c,
        }
    }

    /// `|{t : f(t) > λ}|`.
    pub fn measure_above(&self, lambda: f64) -> f64 {
        if self.tail_value > lambda {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > lambda)
            .map(|(i, _)| self.breakpoints[i + 1] - self.breakpoints[i])
            .sum()
    }

    pub fn support_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }
}

/// Sort by decreasing key, merge equal keys, lay the weights out from 0.
fn lay_out(mut atoms: Vec<(f64, f64)>, tail_value: f64) -> StepProfile {
    atoms.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
    let mut breakpoints = vec![0.0];
    let mut values: Vec<f64> = Vec::new();
    let mut t = 0.0;
    for (v, w) in atoms {
        t += w;
        if values.last() == Some(&v) {
            *breakpoints.last_mut().unwrap() = t;
        } else {
            values.push(v);
            breakpoints.push(t);
        }
    }
    StepProfile {
        breakpoints,
        values,
        tail_value,
    }
}

/// `f*(t) = inf{λ > 0 : |{|f| > λ}| ≤ t}`.
pub fn decreasing_rearrangement(f: &SampledFunction) -> StepProfile {
    let atoms: Vec<_> = f
        .live_atoms()
        .map(|(v, w)| (v.abs(), w))
        .filter(|a| a.0 > 0.0)
        .collect();
    lay_out(atoms, 0.0)
}

/// `f°(t) = inf{λ ∈ ℝ : |{f > λ}| ≤ t}`.
///
/// On an infinite space with a zero tail, super-level sets of negative
/// levels have infinite measure, so `f° ≥ 0`. On a finite space of measure
/// `T` the profile is `-∞` beyond `T`.
pub fn signed_rearrangement(f: &SampledFunction) -> Result<StepProfile> {
    f.validate()?;
    if f.zero_tail {
        let atoms: Vec<_> = f.live_atoms().filter(|a| a.0 > 0.0).collect();
        return Ok(lay_out(atoms, 0.0));
    }
    let total = f.total_measure.ok_or_else(|| {
        Error::domain("signed rearrangement needs a zero tail or a declared finite total measure")
    })?;
    if !total.is_finite() {
        return Err(Error::domain(
            "signed rearrangement on an infinite space needs the zero tail flag",
        ));
    }
    let mut atoms: Vec<_> = f.live_atoms().collect();
    let rest = total - f.finite_weight();
    if rest > 0.0 {
        atoms.push((0.0, rest));
    }
    Ok(lay_out(atoms, f64::NEG_INFINITY))
}

/// `|{|f| > λ}|`.
pub fn distribution_function(f: &SampledFunction, lambda: f64) -> f64 {
    if lambda < 0.0 {
        return if f.zero_tail {
            f64::INFINITY
        } else {
            f.total_measure.unwrap_or(f.finite_weight())
        };
    }
    f.live_atoms()
        .filter(|a| a.0.abs() > lambda)
        .map(|a| a.1)
        .sum()
}

/// `f**(t) = (1/t) ∫_0^t f*`.
pub fn maximal_rearrangement(fstar: &Profile, t: f64) -> f64 {
    maximal_rearrangement_on(fstar, t, &Grid::default())
}

pub fn maximal_rearrangement_on(fstar: &Profile, t: f64, grid: &Grid) -> f64 {
    if !(t > 0.0) {
        return fstar.limit_zero().unwrap_or(f64::INFINITY);
    }
    fstar.integral_to(t, grid) / t
}

/// Volume of the unit ball in `ℝⁿ`, from `ω_n = 2π ω_{n-2} / n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let mut w = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        w *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    w
}

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Monotonicity of `|g|` on `[0, ∞)`, declared by the constructor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialShape {
    Nonincreasing,
    /// Nondecreasing on `[0, peak]`, nonincreasing after.
    Unimodal { peak: f64 },
    General,
}

/// `u(x) = g(|x|)` on `ℝⁿ`.
#[derive(Clone)]
pub struct RadialProfile {
    pub g: RadialFn,
    /// `g', g'', …` as far as known.
    pub derivatives: Vec<RadialFn>,
    pub dimension: usize,
    pub shape: RadialShape,
    /// Radii where `g` is not smooth.
    pub breaks: Vec<f64>,
    /// Size class of `|g(r)|` as `r → ∞`.
    pub decay: Tail,
    /// `g = 0` for `r ≥ support`.
    pub support: Option<f64>,
    /// Characteristic radius, used to place samples.
    pub scale: f64,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("dimension", &self.dimension)
            .field("derivatives", &self.derivatives.len())
            .field("shape", &self.shape)
            .field("breaks", &self.breaks)
            .field("decay", &self.decay)
            .field("support", &self.support)
            .field("scale", &self.scale)
            .finish()
    }
}

impl RadialProfile {
    pub fn new(g: impl Fn(f64) -> f64 + Send + Sync + 'static, dimension: usize) -> Self {
        RadialProfile {
            g: Arc::new(g),
            derivatives: Vec::new(),
            dimension,
            shape: RadialShape::Nonincreasing,
            breaks: Vec::new(),
            decay: Tail::Unknown,
            support: None,
            scale: 1.0,
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivatives.push(Arc::new(d));
        self
    }

    pub fn with_shape(mut self, shape: RadialShape) -> Self {
        self.shape = shape;
        self
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }

    pub fn with_decay(mut self, decay: Tail) -> Self {
        self.decay = decay;
        self
    }

    pub fn with_support(mut self, r: f64) -> Self {
        self.support = Some(r);
        self.decay = Tail::Zero;
        self
    }

    pub fn with_scale(mut self, s: f64) -> Self {
        self.scale = s;
        self
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.g)(r)
    }

    /// `g^{(k)}`, with `k = 0` the profile itself.
    pub fn derivative(&self, k: usize) -> Option<RadialFn> {
        if k == 0 {
            Some(self.g.clone())
        } else {
            self.derivatives.get(k - 1).cloned()
        }
    }

    pub fn ball_volume(&self) -> f64 {
        unit_ball_volume(self.dimension)
    }

    /// Size class of `t ↦ |g|((t/ω)^{1/n})` at infinity.
    fn decay_in_measure(&self) -> Tail {
        match self.decay {
            Tail::Power { power, logs } => Tail::Power {
                power: power / self.dimension as f64,
                logs,
            },
            other => other,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::domain("radial profiles need dimension n ≥ 2"));
        }
        if !(self.scale > 0.0) {
            return Err(Error::domain("radial profile scale must be positive"));
        }
        Ok(())
    }
}

/// Exact `f*(t) = |g|((t/ω_n)^{1/n})` for `|g|` declared nonincreasing.
pub fn radial_rearrangement(u: &RadialProfile) -> Result<Profile> {
    u.validate()?;
    if u.shape != RadialShape::Nonincreasing {
        return Err(Error::domain(
            "exact radial rearrangement needs |g| declared nonincreasing; use rearrange_radial for other shapes",
        ));
    }
    let n = u.dimension as f64;
    let w = u.ball_volume();
    let g = u.g.clone();
    let to_t = |r: f64| w * r.powf(n);
    let mut breaks: Vec<f64> = u.breaks.iter().map(|&r| to_t(r)).collect();
    if let Some(r) = u.support {
        breaks.push(to_t(r));
    }
    breaks.retain(|&b| b > 0.0 && b.is_finite());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let g0 = g(0.0).abs();
    let tail_zero = if g0 == 0.0 { Tail::Zero } else { Tail::CONSTANT };
    let (tail_inf, support) = (u.decay_in_measure(), u.support);
    Ok(Profile::from_fn(
        move |t: f64| {
            let r = (t / w).powf(1.0 / n);
            match support {
                Some(s) if r >= s => 0.0,
                _ => g(r).abs(),
            }
        },
        breaks,
        tail_zero,
        tail_inf,
        Some(g0),
    ))
}

/// Rearrangement of any declared shape: exact map, level-set tabulation or shells.
pub fn rearrange_radial(u: &RadialProfile) -> Result<Profile> {
    match u.shape {
        RadialShape::Nonincreasing => radial_rearrangement(u),
        RadialShape::Unimodal { peak } => level_set_rearrangement(u, peak),
        RadialShape::General => {
            let r_max = u.support.unwrap_or(40.0 * u.scale);
            Ok(Profile::Step(radial_rearrangement_sliced(u, 40_000, r_max)?))
        }
    }
}

const SAMPLES_PER_DECADE: f64 = 1024.0;

/// Tabulates `f*` for `|g|` increasing on `[0, peak]` and decreasing after.
///
/// Each outer radius `r₊ > peak` fixes the level `λ = |g(r₊)|`; the inner radius
/// `r₋ = inf{r ≤ peak : |g(r)| ≥ λ}` gives `|{|u| ≥ λ}| = ω(r₊ⁿ − r₋ⁿ)`.
pub fn level_set_rearrangement(u: &RadialProfile, peak: f64) -> Result<Profile> {
    u.validate()?;
    let n = u.dimension as f64;
    let w = u.ball_volume();
    let a = |r: f64| (u.g)(r).abs();
    let top = a(peak).max(a(peak + 1e-12 * peak.max(u.scale)));
    let end = u.support.unwrap_or(f64::INFINITY);

    let mut radii: Vec<f64> = Vec::new();
    let lo_k = (-7.0 * SAMPLES_PER_DECADE) as i64;
    let hi_k = (8.0 * SAMPLES_PER_DECADE) as i64;
    for k in lo_k..=hi_k {
        let r = peak + u.scale * 10f64.powf(k as f64 / SAMPLES_PER_DECADE);
        if r >= end {
            break;
        }
        radii.push(r);
    }
    let mut break_radii: Vec<f64> = u.breaks.iter().copied().filter(|&b| b > peak).collect();
    if end.is_finite() {
        break_radii.push(end);
    }
    for &b in &break_radii {
        radii.push(b * (1.0 - 1e-12));
        if b < end {
            radii.push(b);
        }
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();

    let a0 = a(0.0);
    let mut ts = Vec::new();
    let mut vs: Vec<f64> = Vec::new();
    let mut t_breaks = Vec::new();
    let mut vanished = false;
    for &rp in &radii {
        let lam = a(rp).min(top);
        if lam == 0.0 || !lam.is_finite() {
            vanished = lam == 0.0;
            break;
        }
        let rm = if peak == 0.0 || a0 >= lam {
            0.0
        } else {
            invert_monotone(&a, lam, 0.0, peak).unwrap_or(peak)
        };
        let t = w * (rp.powf(n) - rm.powf(n));
        let v = vs.last().map_or(lam, |&last: &f64| last.min(lam));
        if ts.last().map_or(true, |&last| t > last) {
            if break_radii.iter().any(|&b| (rp - b * (1.0 - 1e-12)).abs() <= 1e-15 * b) {
                t_breaks.push(t);
            }
            ts.push(t);
            vs.push(v);
        }
        if lam < 1e-300 {
            break;
        }
    }
    if ts.is_empty() {
        return Ok(Profile::zero());
    }
    let tail_inf = if vanished { Tail::Zero } else { u.decay_in_measure() };
    let mut s = SampledProfile::new(ts, vs, Tail::CONSTANT, tail_inf)?;
    s.breaks = t_breaks;
    s.limit_zero = Some(top);
    Ok(Profile::Sampled(s))
}

/// `f*` of `u` discretized into `shells` equal-width shells on `[0, r_max)`,
/// each carrying the midpoint value.
pub fn radial_rearrangement_sliced(
    u: &RadialProfile,
    shells: usize,
    r_max: f64,
) -> Result<StepProfile> {
    u.validate()?;
    if shells == 0 || !(r_max > 0.0) {
        return Err(Error::domain("shell discretization needs shells > 0 and r_max > 0"));
    }
    let n = u.dimension as f64;
    let w = u.ball_volume();
    let h = r_max / shells as f64;
    let atoms = (0..shells)
        .map(|i| {
            let (r0, r1) = (i as f64 * h, (i + 1) as f64 * h);
            ((u.g)(0.5 * (r0 + r1)), w * (r1.powf(n) - r0.powf(n)))
        })
        .collect();
    Ok(decreasing_rearrangement(&SampledFunction::new(atoms)))
}
