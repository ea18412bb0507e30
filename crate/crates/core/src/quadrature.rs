//! Integration over `(0, ∞)` on log-spaced panels, symbolic tail handling,
//! and monotone inversion by bisection.
//!
//! The finite part `[t_min, t_max]` is covered by Gauss–Legendre panels in
//! the variable `x = log t`; the pieces `(0, t_min)` and `(t_max, ∞)` are
//! evaluated from the declared [`Tail`] of the integrand (a Gauss–Laguerre
//! rule on the power–log model), or declared divergent.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tail::{approx_eq, Tail};

const GL_ORDER: usize = 8;
const LAGUERRE_ORDER: usize = 24;

/// How the integration domain beyond `[t_min, t_max]` is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailPolicy {
    AnalyticExponent,
    TruncateWithBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t_min: f64,
    pub t_max: f64,
    pub nodes_per_decade: usize,
    pub tail_policy: TailPolicy,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            t_min: 1e-8,
            t_max: 1e8,
            nodes_per_decade: 64,
            tail_policy: TailPolicy::AnalyticExponent,
        }
    }
}

impl Grid {
    pub fn new(t_min: f64, t_max: f64, nodes_per_decade: usize) -> Result<Self> {
        let g = Grid {
            t_min,
            t_max,
            nodes_per_decade,
            tail_policy: TailPolicy::AnalyticExponent,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn with_policy(mut self, policy: TailPolicy) -> Self {
        self.tail_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min < 1.0 && self.t_max > 1.0 && self.t_max.is_finite()) {
            return Err(Error::domain(format!(
                "grid requires 0 < t_min < 1 < t_max < ∞, got [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        if self.nodes_per_decade == 0 {
            return Err(Error::domain("grid requires nodes_per_decade ≥ 1"));
        }
        Ok(())
    }

    /// The same grid with twice the node density.
    pub fn refined(&self) -> Self {
        Grid {
            nodes_per_decade: self.nodes_per_decade * 2,
            ..*self
        }
    }

    /// Log-spaced nodes `10^{k/npd}` lying strictly inside `(lo, hi)`.
    pub fn nodes_between(&self, lo: f64, hi: f64) -> Vec<f64> {
        let npd = self.nodes_per_decade as f64;
        let k_lo = (lo.log10() * npd).floor() as i64 + 1;
        let k_hi = (hi.log10() * npd).ceil() as i64 - 1;
        (k_lo..=k_hi)
            .map(|k| 10f64.powf(k as f64 / npd))
            .filter(|&t| t > lo && t < hi)
            .collect()
    }

    /// All grid nodes in `[t_min, t_max]`.
    pub fn nodes(&self) -> Vec<f64> {
        let mut v = vec![self.t_min];
        v.extend(self.nodes_between(self.t_min, self.t_max));
        v.push(self.t_max);
        v
    }
}

/// An integrand on `(lo, hi) ⊆ (0, ∞)` with its known nonsmooth points and tails.
pub struct Integrand<'a> {
    pub f: &'a dyn Fn(f64) -> f64,
    pub lo: f64,
    pub hi: f64,
    pub breakpoints: Vec<f64>,
    pub tail_zero: Tail,
    pub tail_inf: Tail,
}

impl<'a> Integrand<'a> {
    pub fn new(f: &'a dyn Fn(f64) -> f64) -> Self {
        Integrand {
            f,
            lo: 0.0,
            hi: f64::INFINITY,
            breakpoints: Vec::new(),
            tail_zero: Tail::Unknown,
            tail_inf: Tail::Unknown,
        }
    }

    pub fn on(mut self, lo: f64, hi: f64) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    pub fn breaks(mut self, b: Vec<f64>) -> Self {
        self.breakpoints = b;
        self
    }

    pub fn tails(mut self, zero: Tail, inf: Tail) -> Self {
        self.tail_zero = zero;
        self.tail_inf = inf;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Set when part of the domain could not be accounted for.
    pub unresolved_tail: bool,
}

/// `∫_lo^hi f` of a nonnegative (or at least tail-signed) integrand.
pub fn integrate(g: &Integrand<'_>, grid: &Grid) -> Integral {
    let mut unresolved = false;
    let mut total = 0.0;
    if g.hi <= g.lo {
        return Integral {
            value: 0.0,
            unresolved_tail: false,
        };
    }

    let lower_open = g.lo <= 0.0;
    let upper_open = g.hi.is_infinite();

    let core_lo = if lower_open {
        grid.t_min.min(g.hi * grid.t_min)
    } else {
        g.lo
    };
    let core_hi = if upper_open {
        grid.t_max.max(g.lo * grid.t_max)
    } else {
        g.hi
    };

    if lower_open {
        match tail_piece(g.f, core_lo, g.tail_zero, true, grid.tail_policy) {
            TailPiece::Value(v) => total += v,
            TailPiece::Divergent => return infinite(),
            TailPiece::Unresolved => unresolved = true,
        }
    }
    if upper_open {
        match tail_piece(g.f, core_hi, g.tail_inf, false, grid.tail_policy) {
            TailPiece::Value(v) => total += v,
            TailPiece::Divergent => return infinite(),
            TailPiece::Unresolved => unresolved = true,
        }
    }

    let mut nodes = vec![core_lo];
    nodes.extend(grid.nodes_between(core_lo, core_hi));
    nodes.extend(
        g.breakpoints
            .iter()
            .copied()
            .filter(|&b| b > core_lo && b < core_hi),
    );
    nodes.push(core_hi);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();

    for w in nodes.windows(2) {
        total += log_panel(g.f, w[0], w[1]);
    }
    Integral {
        value: total,
        unresolved_tail: unresolved,
    }
}

fn infinite() -> Integral {
    Integral {
        value: f64::INFINITY,
        unresolved_tail: false,
    }
}

/// Gauss–Legendre on `[a, b]`, `0 < a < b < ∞`, in the variable `log t`.
pub fn log_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (xs, ws) = gauss_legendre();
    let la = a.ln();
    let lb = b.ln();
    let half = 0.5 * (lb - la);
    let mid = 0.5 * (lb + la);
    let mut s = 0.0;
    for (x, w) in xs.iter().zip(ws) {
        let t = (mid + half * x).exp();
        let v = f(t);
        if v != 0.0 {
            s += w * v * t;
        }
    }
    s * half
}

/// `∫_a^b f` for `0 < a < b < ∞` using the grid's panel density and the given breakpoints.
pub fn integrate_interval(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], grid: &Grid) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut nodes = vec![a];
    nodes.extend(grid.nodes_between(a, b));
    nodes.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    nodes.push(b);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes.windows(2).map(|w| log_panel(f, w[0], w[1])).sum()
}

enum TailPiece {
    Value(f64),
    Divergent,
    Unresolved,
}

/// Contribution of `(0, edge)` (`at_zero`) or `(edge, ∞)` from the power–log model
/// `F(t) ≈ F(edge) (t/edge)^a (L(t)/L(edge))^b`.
fn tail_piece(f: &dyn Fn(f64) -> f64, edge: f64, tail: Tail, at_zero: bool, policy: TailPolicy) -> TailPiece {
    let conv = if at_zero {
        tail.integrable_at_zero()
    } else {
        tail.integrable_at_infinity()
    };
    if conv.diverges() {
        return TailPiece::Divergent;
    }
    match tail {
        Tail::Zero | Tail::Rapid => return TailPiece::Value(0.0),
        Tail::Unknown => return TailPiece::Unresolved,
        _ => {}
    }
    if policy == TailPolicy::TruncateWithBound {
        return TailPiece::Unresolved;
    }
    let (a, logs) = match tail {
        Tail::Power { power, logs } => (power, logs),
        _ => return TailPiece::Unresolved,
    };
    let fe = f(edge);
    if fe == 0.0 {
        return TailPiece::Value(0.0);
    }
    if !fe.is_finite() {
        return TailPiece::Divergent;
    }
    let l_edge = 1.0 + edge.ln().abs();
    // Rate of decay of t^{a+1} in the variable x = |log t| away from the edge.
    let rate = if at_zero { a + 1.0 } else { -a - 1.0 };
    if rate > 1e-12 && !approx_eq(a, -1.0) {
        let b = logs[0];
        let (ys, ws) = gauss_laguerre();
        let s: f64 = ys
            .iter()
            .zip(ws)
            .map(|(y, w)| w * ((l_edge + y / rate) / l_edge).powf(b))
            .sum();
        TailPiece::Value(fe * edge / rate * s)
    } else {
        // Borderline power: convergence comes from the log layers.
        let b = logs[0];
        if (b + 1.0).abs() > 1e-12 {
            TailPiece::Value(fe * edge * l_edge / (-b - 1.0))
        } else {
            let c = logs[1];
            TailPiece::Value(fe * edge * l_edge * l_edge.ln().max(1e-300) / (-c - 1.0))
        }
    }
}

fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static NODES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    NODES.get_or_init(|| legendre_nodes(GL_ORDER))
}

fn gauss_laguerre() -> &'static (Vec<f64>, Vec<f64>) {
    static NODES: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    NODES.get_or_init(|| laguerre_nodes(LAGUERRE_ORDER))
}

fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_eval(n, z);
        if d != 0.0 {
            dp = d;
        }
        xs[i] = -z;
        xs[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

fn legendre_eval(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

fn laguerre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - xs[i - 2])
            }
        };
        let mut lm1 = 0.0;
        for _ in 0..200 {
            let (l, prev) = laguerre_eval(n, z);
            let d = nf * (l - prev) / z;
            let dz = l / d;
            z -= dz;
            lm1 = prev;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, prev) = laguerre_eval(n, z);
        if prev != 0.0 {
            lm1 = prev;
        }
        xs[i] = z;
        // w_i = x_i / ((n+1)^2 L_{n+1}(x_i)^2) = x_i / (n^2 L_{n-1}(x_i)^2)
        ws[i] = z / (nf * nf * lm1 * lm1);
    }
    (xs, ws)
}

/// Returns `(L_n(z), L_{n-1}(z))`.
fn laguerre_eval(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = 1.0 - z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0 - z) * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

pub const BISECTION_TOL: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 200;

/// Left-continuous generalized inverse `inf{x ∈ [lo, hi] : F(x) ≥ y}` of a
/// nondecreasing `F`, by bisection.
///
/// Stops once the bracket is narrower than `1e-12` absolute and `1e-14`
/// relative, or after 200 halvings.
pub fn invert_monotone(f: impl Fn(f64) -> f64, y: f64, lo: f64, hi: f64) -> Result<f64> {
    let flo = f(lo);
    if flo > y {
        return Err(Error::Bracket {
            endpoint: "lower",
            x: lo,
            value: flo,
            target: y,
        });
    }
    let fhi = f(hi);
    if fhi < y {
        return Err(Error::Bracket {
            endpoint: "upper",
            x: hi,
            value: fhi,
            target: y,
        });
    }
    if flo >= y {
        return Ok(lo);
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..BISECTION_MAX_ITER {
        let w = b - a;
        if w <= BISECTION_TOL && w <= 1e-14 * b.abs() {
            break;
        }
        let mid = if a > 0.0 && b / a > 4.0 {
            // geometric split resolves brackets spanning many decades
            (a * b).sqrt()
        } else {
            0.5 * (a + b)
        };
        if mid <= a || mid >= b {
            break;
        }
        if f(mid) >= y {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_are_exact_on_polynomials() {
        let (xs, ws) = gauss_legendre();
        let s: f64 = ws.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m: f64 = xs.iter().zip(ws).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m - 2.0 / 15.0).abs() < 1e-14);
        let (ys, vs) = gauss_laguerre();
        let m0: f64 = vs.iter().sum();
        let m3: f64 = ys.iter().zip(vs).map(|(y, w)| w * y.powi(3)).sum();
        assert!((m0 - 1.0).abs() < 1e-12, "{m0}");
        assert!((m3 - 6.0).abs() < 1e-9, "{m3}");
    }

    #[test]
    fn exponential_integrates_to_one() {
        let f = |t: f64| (-t).exp();
        let g = Integrand::new(&f).tails(Tail::CONSTANT, Tail::Rapid);
        let r = integrate(&g, &Grid::default());
        assert!((r.value - 1.0).abs() < 1e-8, "{}", r.value);
        assert!(!r.unresolved_tail);
    }

    #[test]
    fn inverse_square_root_on_unit_interval() {
        let f = |t: f64| if t < 1.0 { t.powf(-0.5) } else { 0.0 };
        let g = Integrand::new(&f)
            .breaks(vec![1.0])
            .tails(Tail::power(-0.5), Tail::Zero);
        let r = integrate(&g, &Grid::default());
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn reciprocal_diverges_at_zero() {
        let f = |t: f64| if t < 1.0 { 1.0 / t } else { 0.0 };
        let g = Integrand::new(&f)
            .breaks(vec![1.0])
            .tails(Tail::power(-1.0), Tail::Zero);
        assert_eq!(integrate(&g, &Grid::default()).value, f64::INFINITY);
    }

    #[test]
    fn log_weighted_tail() {
        // ∫_1^∞ t^{-2} (1 + log t)^2 dt = 5
        let f = |t: f64| if t >= 1.0 { t.powi(-2) * (1.0 + t.ln()).powi(2) } else { 0.0 };
        let g = Integrand::new(&f)
            .breaks(vec![1.0])
            .tails(Tail::Zero, Tail::power_log(-2.0, 2.0));
        let r = integrate(&g, &Grid::new(1e-4, 1e3, 64).unwrap());
        assert!((r.value - 5.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn truncation_policy_flags_the_tail() {
        let f = |t: f64| (-t).exp();
        let g = Integrand::new(&f).tails(Tail::CONSTANT, Tail::Rapid);
        let grid = Grid::default().with_policy(TailPolicy::TruncateWithBound);
        let r = integrate(&g, &grid);
        assert!(r.unresolved_tail);
        assert!((r.value - 1.0).abs() < 1e-7);
        let g = Integrand::new(&f);
        assert!(integrate(&g, &Grid::default()).unresolved_tail);
    }

    #[test]
    fn inversion_examples() {
        let x = invert_monotone(|x| x * x * x, 8.0, 0.0, 10.0).unwrap();
        assert!((x - 2.0).abs() < 1e-11);
        let x = invert_monotone(|x| x, 0.37, -5.0, 5.0).unwrap();
        assert!((x - 0.37).abs() < 1e-11);
        let c = 1.25;
        let x = invert_monotone(|x| if x >= c { 1.0 } else { 0.0 }, 0.5, 0.0, 4.0).unwrap();
        assert!((x - c).abs() < 1e-11);
        // a flat stretch resolves to the infimum of the solution set
        let x = invert_monotone(|x: f64| x.min(1.0).max(x - 1.0), 1.0, 0.0, 5.0).unwrap();
        assert!((x - 1.0).abs() < 1e-11);
    }

    #[test]
    fn bracket_violation_names_endpoint() {
        match invert_monotone(|x| x, 20.0, 0.0, 10.0) {
            Err(Error::Bracket { endpoint, .. }) => assert_eq!(endpoint, "upper"),
            other => panic!("{other:?}"),
        }
        match invert_monotone(|x| x, -1.0, 0.0, 10.0) {
            Err(Error::Bracket { endpoint, .. }) => assert_eq!(endpoint, "lower"),
            other => panic!("{other:?}"),
        }
    }
}
