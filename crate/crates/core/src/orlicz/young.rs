//! Young functions: closed forms, exponential forms and derivative tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::log_factor;
use crate::quadrature::{invert_monotone, Grid};
use crate::tail::Tail;

/// `coef · t^power · (1 + |log t|)^log_power + offset` from `start` up to the next piece.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLogPiece {
    #[serde(default)]
    pub start: f64,
    pub coef: f64,
    pub power: f64,
    #[serde(default)]
    pub log_power: f64,
    #[serde(default)]
    pub offset: f64,
}

impl PowerLogPiece {
    fn eval(&self, t: f64) -> f64 {
        let mut v = self.coef * t.powf(self.power);
        if self.log_power != 0.0 {
            v *= log_factor(t).powf(self.log_power);
        }
        v + self.offset
    }

    fn deriv(&self, t: f64) -> f64 {
        let l = log_factor(t);
        let (p, b) = (self.power, self.log_power);
        let mut v = p * t.powf(p - 1.0) * l.powf(b);
        if b != 0.0 && t != 1.0 {
            v += t.powf(p) * b * l.powf(b - 1.0) * t.ln().signum() / t;
        }
        self.coef * v
    }
}

/// Derivative samples `a(t_i)` with per-cell power-law interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "YoungTableRaw")]
pub struct YoungTable {
    pub ts: Vec<f64>,
    pub a: Vec<f64>,
    /// `A(t_i)`.
    pub values: Vec<f64>,
    /// `A = ∞` beyond this point.
    pub infinite_beyond: Option<f64>,
}

#[derive(Deserialize)]
struct YoungTableRaw {
    ts: Vec<f64>,
    a: Vec<f64>,
    #[serde(default)]
    infinite_beyond: Option<f64>,
}

impl TryFrom<YoungTableRaw> for YoungTable {
    type Error = Error;

    fn try_from(r: YoungTableRaw) -> Result<Self> {
        YoungTable::new(r.ts, r.a, r.infinite_beyond)
    }
}

/// Log–log slope of `a` on a cell, `None` when an endpoint vanishes.
fn cell_slope(t0: f64, t1: f64, a0: f64, a1: f64) -> Option<f64> {
    (a0 > 0.0 && a1 > 0.0).then(|| (a1 / a0).ln() / (t1 / t0).ln())
}

/// `∫_{t0}^{t} a` with `a = a0 (s/t0)^slope`.
fn power_cell(t0: f64, a0: f64, slope: f64, t: f64) -> f64 {
    let e = slope + 1.0;
    if e.abs() < 1e-12 {
        a0 * t0 * (t / t0).ln()
    } else {
        a0 * t0 / e * ((t / t0).powf(e) - 1.0)
    }
}

impl YoungTable {
    pub fn new(ts: Vec<f64>, mut a: Vec<f64>, infinite_beyond: Option<f64>) -> Result<Self> {
        if ts.len() < 2 || ts.len() != a.len() {
            return Err(Error::domain("a Young table needs at least two matching nodes"));
        }
        if ts[0] <= 0.0 || ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("Young table nodes must be positive and increasing"));
        }
        if a.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain("Young table derivative must be finite and nonnegative"));
        }
        for i in 1..a.len() {
            if a[i] < a[i - 1] {
                if a[i] < a[i - 1] * (1.0 - 1e-6) {
                    return Err(Error::domain(format!(
                        "Young derivative decreases at t = {}: not convex",
                        ts[i]
                    )));
                }
                a[i] = a[i - 1];
            }
        }
        let mut values = Vec::with_capacity(ts.len());
        let first = match cell_slope(ts[0], ts[1], a[0], a[1]) {
            Some(s) if s > -1.0 => a[0] * ts[0] / (s + 1.0),
            _ => a[0] * ts[0],
        };
        values.push(first);
        for i in 1..ts.len() {
            let inc = match cell_slope(ts[i - 1], ts[i], a[i - 1], a[i]) {
                Some(s) => power_cell(ts[i - 1], a[i - 1], s, ts[i]),
                None => 0.5 * (a[i - 1] + a[i]) * (ts[i] - ts[i - 1]),
            };
            values.push(values[i - 1] + inc);
        }
        Ok(YoungTable {
            ts,
            a,
            values,
            infinite_beyond,
        })
    }

    fn end_exponent(&self, first: bool) -> f64 {
        let i = if first { 0 } else { self.ts.len() - 1 };
        if self.values[i] > 0.0 {
            self.ts[i] * self.a[i] / self.values[i]
        } else {
            1.0
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if let Some(b) = self.infinite_beyond {
            if t > b {
                return f64::INFINITY;
            }
        }
        let n = self.ts.len();
        if t < self.ts[0] {
            return self.values[0] * (t / self.ts[0]).powf(self.end_exponent(true));
        }
        if t >= self.ts[n - 1] {
            return self.values[n - 1] * (t / self.ts[n - 1]).powf(self.end_exponent(false));
        }
        let i = self.ts.partition_point(|&x| x <= t) - 1;
        let (t0, t1, a0, a1) = (self.ts[i], self.ts[i + 1], self.a[i], self.a[i + 1]);
        self.values[i]
            + match cell_slope(t0, t1, a0, a1) {
                Some(s) => power_cell(t0, a0, s, t),
                None => {
                    let at = a0 + (a1 - a0) * (t - t0) / (t1 - t0);
                    0.5 * (a0 + at) * (t - t0)
                }
            }
    }

    pub fn deriv(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if let Some(b) = self.infinite_beyond {
            if t > b {
                return f64::INFINITY;
            }
        }
        let n = self.ts.len();
        if t < self.ts[0] {
            return self.a[0] * (t / self.ts[0]).powf(self.end_exponent(true) - 1.0);
        }
        if t >= self.ts[n - 1] {
            return self.a[n - 1] * (t / self.ts[n - 1]).powf(self.end_exponent(false) - 1.0);
        }
        let i = self.ts.partition_point(|&x| x < t).max(1) - 1;
        let (t0, t1, a0, a1) = (self.ts[i], self.ts[i + 1], self.a[i], self.a[i + 1]);
        match cell_slope(t0, t1, a0, a1) {
            Some(s) => a0 * (t / t0).powf(s),
            None => a0 + (a1 - a0) * (t - t0) / (t1 - t0),
        }
    }
}

/// A Young function.
///
/// JSON: `{"form": "powerlog", "pieces": [...]}`, `{"form": "exp", ...}`,
/// `{"form": "table", "ts": [...], "a": [...]}` or `{"form": "linfty"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum YoungSpec {
    #[serde(rename = "powerlog")]
    PowerLog { pieces: Vec<PowerLogPiece> },
    /// `sign = 1`: `0` on `[0, cut]`, then `E(t) - E(cut)` with `E = exp(t^γ)`
    /// (or `exp(exp(t^γ))` when `double`). `sign = -1`: `exp(-t^γ)`, `γ < 0`.
    #[serde(rename = "exp")]
    ExpForm {
        sign: i8,
        gamma: f64,
        #[serde(default)]
        double: bool,
        #[serde(default)]
        cut: f64,
    },
    #[serde(rename = "table")]
    Tabulated(YoungTable),
    /// `0` on `[0, 1]`, `∞` after.
    Linfty,
}

impl YoungSpec {
    pub fn power(p: f64) -> Self {
        Self::power_log(p, 0.0)
    }

    pub fn power_log(p: f64, b: f64) -> Self {
        YoungSpec::PowerLog {
            pieces: vec![PowerLogPiece {
                start: 0.0,
                coef: 1.0,
                power: p,
                log_power: b,
                offset: 0.0,
            }],
        }
    }

    /// `t` on `[0, 1]`, `(t^p + p - 1)/p` after: convex for `p ≥ 1`.
    pub fn linear_then_power(p: f64) -> Self {
        YoungSpec::PowerLog {
            pieces: vec![
                PowerLogPiece {
                    start: 0.0,
                    coef: 1.0,
                    power: 1.0,
                    log_power: 0.0,
                    offset: 0.0,
                },
                PowerLogPiece {
                    start: 1.0,
                    coef: 1.0 / p,
                    power: p,
                    log_power: 0.0,
                    offset: (p - 1.0) / p,
                },
            ],
        }
    }

    /// `e^{t^γ}` near infinity, cut where it becomes convex.
    pub fn exp_growth(gamma: f64, double: bool) -> Self {
        let cut = if gamma >= 1.0 {
            1.0
        } else {
            ((1.0 - gamma) / gamma).powf(1.0 / gamma).max(1.0)
        };
        YoungSpec::ExpForm {
            sign: 1,
            gamma,
            double,
            cut,
        }
    }

    /// `e^{-t^γ}` with `γ < 0`: the near-zero behaviour of exponential rows.
    pub fn exp_decay_at_zero(gamma: f64) -> Self {
        YoungSpec::ExpForm {
            sign: -1,
            gamma,
            double: false,
            cut: 0.0,
        }
    }

    pub fn tabulated(ts: Vec<f64>, a: Vec<f64>, infinite_beyond: Option<f64>) -> Result<Self> {
        Ok(YoungSpec::Tabulated(YoungTable::new(ts, a, infinite_beyond)?))
    }

    pub fn label(&self) -> String {
        match self {
            YoungSpec::PowerLog { pieces } => {
                let ps: Vec<String> = pieces
                    .iter()
                    .map(|p| {
                        if p.log_power == 0.0 {
                            format!("t^{}", p.power)
                        } else {
                            format!("t^{}l^{}", p.power, p.log_power)
                        }
                    })
                    .collect();
                ps.join("|")
            }
            YoungSpec::ExpForm { sign, gamma, double, .. } => {
                let s = if *sign < 0 { "-" } else { "" };
                if *double {
                    format!("e^{{e^{{{s}t^{gamma}}}}}")
                } else {
                    format!("e^{{{s}t^{gamma}}}")
                }
            }
            YoungSpec::Tabulated(t) => format!("table[{}]", t.ts.len()),
            YoungSpec::Linfty => "linfty".into(),
        }
    }

    fn piece(pieces: &[PowerLogPiece], t: f64) -> &PowerLogPiece {
        let i = pieces.partition_point(|p| p.start < t);
        &pieces[i.max(1) - 1]
    }

    fn exp_core(gamma: f64, double: bool, t: f64) -> f64 {
        let e = t.powf(gamma).exp();
        if double {
            e.exp()
        } else {
            e
        }
    }

    /// `A(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            YoungSpec::PowerLog { pieces } => Self::piece(pieces, t).eval(t),
            YoungSpec::ExpForm {
                sign,
                gamma,
                double,
                cut,
            } => {
                if *sign < 0 {
                    (-t.powf(*gamma)).exp()
                } else if t <= *cut {
                    0.0
                } else {
                    Self::exp_core(*gamma, *double, t) - Self::exp_core(*gamma, *double, *cut)
                }
            }
            YoungSpec::Tabulated(tab) => tab.eval(t),
            YoungSpec::Linfty => {
                if t <= 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Left-continuous derivative `a(t)`.
    pub fn deriv(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            YoungSpec::PowerLog { pieces } => Self::piece(pieces, t).deriv(t),
            YoungSpec::ExpForm {
                sign,
                gamma,
                double,
                cut,
            } => {
                let g = *gamma;
                let inner = g * t.powf(g - 1.0);
                if *sign < 0 {
                    -inner * (-t.powf(g)).exp()
                } else if t <= *cut {
                    0.0
                } else {
                    let e = t.powf(g).exp();
                    if *double {
                        inner * e * e.exp()
                    } else {
                        inner * e
                    }
                }
            }
            YoungSpec::Tabulated(tab) => tab.deriv(t),
            YoungSpec::Linfty => {
                if t <= 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `a⁻¹(y) = inf{t ≥ 0 : a(t) ≥ y}`, `∞` if `a` stays below `y`.
    pub fn deriv_inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if let YoungSpec::PowerLog { pieces } = self {
            if let [p] = pieces.as_slice() {
                if p.log_power == 0.0 && p.power > 1.0 {
                    return (y / (p.coef * p.power)).powf(1.0 / (p.power - 1.0));
                }
            }
        }
        if self.deriv(0.0f64.max(f64::MIN_POSITIVE)) >= y {
            return 0.0;
        }
        let mut hi = 1.0;
        while self.deriv(hi) < y {
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        invert_monotone(|t| self.deriv(t), y, 0.0, hi).unwrap_or(hi)
    }

    /// Point beyond which `A = ∞`.
    pub fn infinite_beyond(&self) -> Option<f64> {
        match self {
            YoungSpec::Linfty => Some(1.0),
            YoungSpec::Tabulated(t) => t.infinite_beyond,
            _ => None,
        }
    }

    /// Size class of `A(t)` as `t → 0`.
    pub fn tail_zero(&self) -> Tail {
        match self {
            YoungSpec::PowerLog { pieces } => {
                let p = &pieces[0];
                if p.offset != 0.0 {
                    Tail::Unknown
                } else {
                    Tail::power_log(p.power, p.log_power)
                }
            }
            YoungSpec::ExpForm { sign, .. } => {
                if *sign < 0 {
                    Tail::Rapid
                } else {
                    Tail::Zero
                }
            }
            YoungSpec::Tabulated(t) => {
                if t.values[0] == 0.0 {
                    Tail::Zero
                } else {
                    Tail::power(t.end_exponent(true))
                }
            }
            YoungSpec::Linfty => Tail::Zero,
        }
    }

    /// Size class of `A(t)` as `t → ∞`.
    pub fn tail_inf(&self) -> Tail {
        match self {
            YoungSpec::PowerLog { pieces } => {
                let p = &pieces[pieces.len() - 1];
                Tail::power_log(p.power, p.log_power)
            }
            YoungSpec::ExpForm { sign, .. } => {
                if *sign < 0 {
                    Tail::CONSTANT
                } else {
                    Tail::Explosive
                }
            }
            YoungSpec::Tabulated(t) => {
                if t.infinite_beyond.is_some() {
                    Tail::Infinite
                } else {
                    Tail::power(t.end_exponent(false))
                }
            }
            YoungSpec::Linfty => Tail::Infinite,
        }
    }

    /// Checks `A(0) = 0`, convexity (nondecreasing `a`) and nontriviality on the grid.
    pub fn check_young(&self, grid: &Grid) -> Result<()> {
        let nodes = grid.nodes();
        let mut prev = 0.0f64;
        let mut positive = false;
        let mut finite = false;
        for &t in &nodes {
            let a = self.deriv(t);
            if a < prev * (1.0 - 1e-9) - 1e-300 {
                return Err(Error::domain(format!("Young derivative decreases at t = {t}")));
            }
            prev = prev.max(a);
            let v = self.eval(t);
            positive |= v > 0.0;
            finite |= v.is_finite();
        }
        if !positive || !finite {
            return Err(Error::domain("Young function is identically 0 or ∞ on the grid"));
        }
        Ok(())
    }
}
