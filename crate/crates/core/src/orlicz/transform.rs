use serde::{Deserialize, Serialize};

use super::young::YoungSpec;
use super::{check_mn, condition_a, orlicz_lorentz_admissible};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, invert_monotone, log_panel, Grid, Integrand};
use crate::tail::{Convergence, Tail};

/// Nondecreasing map tabulated at `xs` with log–log interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneTable {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `lim_{x→∞}`; finite limits stop the power extrapolation.
    #[serde(with = "crate::ext_real")]
    pub limit: f64,
}

impl MonotoneTable {
    fn slope(&self, i: usize) -> f64 {
        let (x0, x1, y0, y1) = (self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]);
        if y0 > 0.0 && y1 > 0.0 {
            (y1 / y0).ln() / (x1 / x0).ln()
        } else {
            0.0
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= 0.0 {
            return 0.0;
        }
        if x < self.xs[0] {
            return self.ys[0] * (x / self.xs[0]).powf(self.slope(0));
        }
        if x >= self.xs[n - 1] {
            if self.limit.is_finite() || x.is_infinite() {
                return if x.is_infinite() { self.limit } else { self.ys[n - 1] };
            }
            return self.ys[n - 1] * (x / self.xs[n - 1]).powf(self.slope(n - 2));
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let (x0, x1, y0, y1) = (self.xs[i], self.xs[i + 1], self.ys[i], self.ys[i + 1]);
        if y0 > 0.0 && y1 > 0.0 {
            y0 * (x / x0).powf((y1 / y0).ln() / (x1 / x0).ln())
        } else {
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }

    /// `inf{x : eval(x) ≥ y}`.
    pub fn inverse(&self, y: f64) -> f64 {
        let n = self.xs.len();
        if y <= 0.0 {
            return 0.0;
        }
        if y <= self.ys[0] {
            let s = self.slope(0);
            return if s > 0.0 { self.xs[0] * (y / self.ys[0]).powf(1.0 / s) } else { self.xs[0] };
        }
        if y > self.ys[n - 1] {
            let s = self.slope(n - 2);
            if self.limit.is_finite() || s <= 0.0 {
                return f64::INFINITY;
            }
            return self.xs[n - 1] * (y / self.ys[n - 1]).powf(1.0 / s);
        }
        let i = self.ys.partition_point(|&v| v < y);
        invert_monotone(|x| self.eval(x), y, self.xs[i - 1], self.xs[i]).unwrap_or(self.xs[i])
    }
}

/// `H_m`, `H^∞`, `D_m` and `A_m` for a Young function `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub m: usize,
    pub n: usize,
    pub h_m: MonotoneTable,
    #[serde(with = "crate::ext_real")]
    pub h_infinity: f64,
    /// `D_m` on `(0, H^∞)`.
    pub d_m: MonotoneTable,
    pub a_m: YoungSpec,
    pub condition_zero_ok: bool,
    pub condition_infty_converges: bool,
}

impl TransformReport {
    pub fn h(&self, t: f64) -> f64 {
        self.h_m.eval(t)
    }

    pub fn h_inverse(&self, t: f64) -> f64 {
        self.h_m.inverse(t)
    }

    /// `D_m(t)`, `∞` for `t ≥ H^∞`.
    pub fn d(&self, t: f64) -> f64 {
        if t >= self.h_infinity {
            f64::INFINITY
        } else {
            self.d_m.eval(t)
        }
    }
}

const NODES_PER_DECADE: f64 = 32.0;
const DECADES: i32 = 14;

fn wide_nodes(extra: &[f64]) -> Vec<f64> {
    let lo = -(DECADES as f64 * NODES_PER_DECADE) as i32;
    let mut xs: Vec<f64> = (lo..=-lo)
        .map(|j| 10f64.powf(j as f64 / NODES_PER_DECADE))
        .collect();
    let (a, b) = (xs[0], xs[xs.len() - 1]);
    xs.extend(extra.iter().copied().filter(|&x| x > a && x < b));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn young_breaks(a: &YoungSpec) -> Vec<f64> {
    let mut b: Vec<f64> = match a {
        YoungSpec::PowerLog { pieces } => pieces.iter().map(|p| p.start).filter(|&s| s > 0.0).collect(),
        YoungSpec::ExpForm { cut, .. } if *cut > 0.0 => vec![*cut],
        _ => Vec::new(),
    };
    b.push(1.0);
    b.extend(a.infinite_beyond());
    b
}

/// Running integral `∫_0^{x_i} f` on the node list, with the given near-zero tail.
fn cumulative(f: &dyn Fn(f64) -> f64, xs: &[f64], tail_zero: Tail, grid: &Grid) -> Vec<f64> {
    let head = Integrand::new(f).on(0.0, xs[0]).tails(tail_zero, Tail::Zero);
    let mut acc = integrate(&head, grid).value;
    let mut out = Vec::with_capacity(xs.len());
    out.push(acc);
    for w in xs.windows(2) {
        acc += log_panel(f, w[0], w[1]);
        out.push(acc);
    }
    out
}

fn near_zero_required(c: Convergence, what: &str) -> Result<()> {
    match c {
        Convergence::Converges => Ok(()),
        Convergence::Diverges => Err(Error::divergent(format!(
            "{what} is not integrable near zero"
        ))),
        Convergence::Undetermined => Err(Error::domain(format!(
            "integrability of {what} near zero cannot be decided from the declared tails"
        ))),
    }
}

/// The optimal Orlicz target Young function `A_m` of `L^A` for `m`-th order Sobolev embeddings.
pub fn sobolev_young_transform(a: &YoungSpec, m: usize, n: usize, grid: &Grid) -> Result<TransformReport> {
    let cond = condition_a(a, m, n)?;
    near_zero_required(cond.near_zero, "(s/A(s))^(m/(n-m))")?;
    let k = m as f64 / (n - m) as f64;
    let outer = (n - m) as f64 / n as f64;
    let phi = |s: f64| {
        let v = a.eval(s);
        if v.is_infinite() {
            0.0
        } else {
            (s / v).powf(k)
        }
    };
    let xs = wide_nodes(&young_breaks(a));
    let tail0 = super::sobolev_integrand_tail(a, m, n, true);
    let j = cumulative(&phi, &xs, tail0, grid);
    let converges = cond.near_infinity.converges();
    let j_inf = if converges {
        let last = *xs.last().unwrap();
        let tail = Integrand::new(&phi)
            .on(last, f64::INFINITY)
            .tails(Tail::Zero, super::sobolev_integrand_tail(a, m, n, false));
        j.last().unwrap() + integrate(&tail, grid).value
    } else {
        f64::INFINITY
    };
    let h_infinity = j_inf.powf(outer);
    let h_m = MonotoneTable {
        xs: xs.clone(),
        ys: j.iter().map(|v| v.powf(outer)).collect(),
        limit: h_infinity,
    };

    let t_lo = h_m.ys.iter().copied().find(|&v| v > 0.0).unwrap_or(f64::MIN_POSITIVE);
    let t_hi = h_m.ys.last().copied().unwrap().min(h_infinity);
    let mut ts: Vec<f64> = Vec::new();
    let span = (t_hi / t_lo).log10();
    let count = (span * NODES_PER_DECADE).ceil().max(2.0) as usize;
    for i in 0..count {
        ts.push(t_lo * 10f64.powf(span * i as f64 / count as f64));
    }
    if h_infinity.is_finite() {
        for jj in 8..=96 {
            let t = h_infinity * (1.0 - 10f64.powf(-jj as f64 / 8.0));
            if t > *ts.last().unwrap() {
                ts.push(t);
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let expo = n as f64 / (n - m) as f64;
    let mut ds = Vec::with_capacity(ts.len());
    let mut keep = Vec::with_capacity(ts.len());
    for &t in &ts {
        let u = h_m.inverse(t);
        if !(u > 0.0) || !u.is_finite() {
            continue;
        }
        let d = (t * a.eval(u) / u).powf(expo);
        if d.is_finite() && d >= 0.0 {
            keep.push(t);
            ds.push(d);
        }
    }
    if keep.len() < 2 {
        return Err(Error::NonConvergence("D_m could not be tabulated".into()));
    }
    let slopes: Vec<f64> = keep.iter().zip(&ds).map(|(t, d)| d / t).collect();
    let a_m = YoungSpec::tabulated(keep.clone(), slopes, h_infinity.is_finite().then_some(h_infinity))?;
    Ok(TransformReport {
        m,
        n,
        h_m,
        h_infinity,
        d_m: MonotoneTable {
            xs: keep,
            ys: ds,
            limit: f64::INFINITY,
        },
        a_m,
        condition_zero_ok: true,
        condition_infty_converges: converges,
    })
}

/// Tables behind `E_m`: the curve `u ↦ S(u) = e_m⁻¹(a(u))` and the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmReport {
    pub e_m: YoungSpec,
    /// `S(u) = K(u)^{-m/(n-m)}`, `K(u) = ∫_u^∞ J^{-n/m} a^{-n/(n-m)}`, `J(s) = ∫_0^s a^{-m/(n-m)}`.
    pub s_curve: MonotoneTable,
}

/// Derivative `a` size class from that of `A`.
fn deriv_tail(t: Tail) -> Tail {
    match t {
        Tail::Power { .. } => t.mul(Tail::power(-1.0)),
        other => other,
    }
}

pub fn build_em_report(a: &YoungSpec, m: usize, n: usize, grid: &Grid) -> Result<EmReport> {
    check_mn(m, n)?;
    let cond = condition_a(a, m, n)?;
    near_zero_required(cond.near_zero, "(s/A(s))^(m/(n-m))")?;
    let k = m as f64 / (n - m) as f64;
    let nm = n as f64 / m as f64;
    let nnm = n as f64 / (n - m) as f64;
    let inner = |s: f64| {
        let d = a.deriv(s);
        if d.is_infinite() {
            0.0
        } else {
            d.powf(-k)
        }
    };
    let us = wide_nodes(&young_breaks(a));
    let (ta0, tainf) = (deriv_tail(a.tail_zero()), deriv_tail(a.tail_inf()));
    let j = cumulative(&inner, &us, ta0.powf(-k), grid);
    if j.iter().any(|v| !v.is_finite()) {
        return Err(Error::divergent("∫_0 a^(-m/(n-m)) diverges: the inner integral of e_m⁻¹ is infinite"));
    }
    let j_table = MonotoneTable {
        xs: us.clone(),
        ys: j.clone(),
        limit: f64::INFINITY,
    };
    let inner_inf = tainf.powf(-k);
    let j_tail = if inner_inf.integrable_at_infinity().converges() {
        Tail::CONSTANT
    } else {
        Tail::power(1.0).mul(inner_inf)
    };
    let psi = |s: f64| {
        let d = a.deriv(s);
        if d.is_infinite() {
            return 0.0;
        }
        j_table.eval(s).powf(-nm) * d.powf(-nnm)
    };
    let last = *us.last().unwrap();
    let head = Integrand::new(&psi)
        .on(last, f64::INFINITY)
        .tails(Tail::Zero, j_tail.powf(-nm).mul(tainf.powf(-nnm)));
    let k_last = integrate(&head, grid).value;
    if !k_last.is_finite() {
        return Err(Error::divergent("the outer integral ∫^∞ J^(-n/m) a^(-n/(n-m)) of e_m⁻¹ diverges"));
    }
    let mut kk = vec![0.0; us.len()];
    kk[us.len() - 1] = k_last;
    for i in (0..us.len() - 1).rev() {
        kk[i] = kk[i + 1] + log_panel(&psi, us[i], us[i + 1]);
    }
    let mut sx = Vec::with_capacity(us.len());
    let mut sy = Vec::with_capacity(us.len());
    for (u, kv) in us.iter().zip(&kk) {
        let s = kv.powf(-k);
        if s.is_finite() && s > 0.0 && sy.last().map_or(true, |&p| s > p) {
            sx.push(*u);
            sy.push(s);
        }
    }
    if sx.len() < 2 {
        return Err(Error::NonConvergence("e_m⁻¹ could not be tabulated".into()));
    }
    let s_curve = MonotoneTable {
        xs: sx,
        ys: sy,
        limit: f64::INFINITY,
    };
    let e_inv = |t: f64| s_curve.eval(a.deriv_inverse(t));
    let mut ex = Vec::with_capacity(s_curve.xs.len());
    let mut ev: Vec<f64> = Vec::with_capacity(s_curve.xs.len());
    for (u, &x) in s_curve.xs.iter().zip(&s_curve.ys) {
        let hi = a.deriv(*u) * (1.0 + 1e-9) + 1e-300;
        let e = invert_monotone(e_inv, x, 0.0, hi).unwrap_or(hi);
        if e > 0.0 && e.is_finite() {
            ex.push(x);
            ev.push(ev.last().map_or(e, |&p: &f64| p.max(e)));
        }
    }
    let e_m = YoungSpec::tabulated(ex, ev, None)?;
    if orlicz_lorentz_admissible(&e_m, nm).diverges() {
        return Err(Error::domain(format!(
            "E_m violates ∫^∞ E(t)/t^(1+p) < ∞ for p = n/m = {nm}"
        )));
    }
    Ok(EmReport { e_m, s_curve })
}

/// `E_m(t) = ∫_0^t e_m`, the Young function of the Orlicz–Lorentz optimal target.
pub fn build_em(a: &YoungSpec, m: usize, n: usize, grid: &Grid) -> Result<YoungSpec> {
    Ok(build_em_report(a, m, n, grid)?.e_m)
}
