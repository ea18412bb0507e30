//! Radial test functions on `ℝⁿ`, ball-mean polynomials, Poincaré ratios and
//! the Hardy-type operator check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimal_target::{admissibility, target_norm, Decision, TargetSpec};
use crate::profile::Profile;
use crate::quadrature::{integrate, integrate_interval, log_panel, Grid, Integrand};
use crate::rearrange::{radial_rearrangement_sliced, rearrange_radial, RadialProfile, RadialShape};
use crate::ri_norms::{ri_norm, SpaceDescriptor};
use crate::tail::{Convergence, Tail};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestKind {
    Constant,
    /// `e^{-|x|²}`.
    Gaussian,
    /// `(1 + |x|²)^{-β/2}`.
    PowerDecay { beta: f64 },
    /// `1` on `B(0, R)`, linear down to `0` at radius `R + w`.
    Plateau { radius: f64, ramp: f64 },
    /// `x₁ + e^{-|x|²}`.
    AffinePlusGaussian,
}

impl TestKind {
    pub fn family(&self) -> &'static str {
        match self {
            TestKind::Constant => "constant",
            TestKind::Gaussian => "gaussian",
            TestKind::PowerDecay { .. } => "power-decay",
            TestKind::Plateau { .. } => "plateau",
            TestKind::AffinePlusGaussian => "affine-plus-gaussian",
        }
    }
}

/// `u(x) = offset + tilt·x + g(|x - x₀| / dilation)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub kind: TestKind,
    pub n: usize,
    pub offset: f64,
    pub dilation: f64,
    pub tilt: Option<Vec<f64>>,
    pub center: Vec<f64>,
}

pub fn make_test_function(kind: TestKind, n: usize) -> Result<TestFunction> {
    if n < 2 {
        return Err(Error::domain("test functions live on ℝⁿ with n ≥ 2"));
    }
    match kind {
        TestKind::PowerDecay { beta } if !(beta > (n - 1) as f64) => {
            return Err(Error::domain(format!(
                "power-decay needs β > n - 1 = {} for finite gradient norms, got {beta}",
                n - 1
            )))
        }
        TestKind::Plateau { radius, ramp } if !(radius >= 0.0) || !(ramp > 0.0) => {
            return Err(Error::domain("plateau needs radius ≥ 0 and ramp > 0"))
        }
        _ => {}
    }
    let tilt = match kind {
        TestKind::AffinePlusGaussian => {
            let mut e1 = vec![0.0; n];
            e1[0] = 1.0;
            Some(e1)
        }
        _ => None,
    };
    Ok(TestFunction {
        kind,
        n,
        offset: 0.0,
        dilation: 1.0,
        tilt,
        center: vec![0.0; n],
    })
}

impl TestFunction {
    pub fn with_offset(mut self, c: f64) -> Self {
        self.offset = c;
        self
    }

    pub fn with_dilation(mut self, r: f64) -> Self {
        self.dilation = r;
        self
    }

    pub fn with_tilt(mut self, a: Vec<f64>) -> Self {
        self.tilt = Some(a);
        self
    }

    pub fn with_center(mut self, x0: Vec<f64>) -> Self {
        self.center = x0;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dilation > 0.0) || !self.dilation.is_finite() {
            return Err(Error::domain("dilation must be a positive real"));
        }
        if self.center.len() != self.n || self.tilt.as_ref().is_some_and(|a| a.len() != self.n) {
            return Err(Error::domain("center and tilt need n coordinates"));
        }
        Ok(())
    }

    fn center_distance(&self) -> f64 {
        self.center.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn is_tilted(&self) -> bool {
        self.tilt.as_ref().is_some_and(|a| a.iter().any(|&x| x != 0.0))
    }

    /// `g(∞)`, the value of the radial part at infinity.
    pub fn radial_limit(&self) -> f64 {
        0.0
    }

    /// `u(x)` at a point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let rho = x.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let lin: f64 = self.tilt.as_ref().map_or(0.0, |a| a.iter().zip(x).map(|(a, b)| a * b).sum());
        self.offset + lin + unit_value(self.kind, rho / self.dilation)
    }

    /// `|∇^k g(|·|/r)|` as a radial profile about the bump center (Frobenius norm for `k = 2`).
    pub fn radial_part(&self, k: usize) -> Result<RadialProfile> {
        self.validate()?;
        let (n, r) = (self.n, self.dilation);
        let nf = n as f64;
        let scale = r.powi(-(k as i32));
        let mk = |g: Box<dyn Fn(f64) -> f64 + Send + Sync>| {
            RadialProfile::new(move |rho| scale * g(rho / r), n).with_scale(r)
        };
        let p = match (self.kind, k) {
            (TestKind::Constant, _) => RadialProfile::new(|_| 0.0, n).with_support(0.0),
            (TestKind::Gaussian | TestKind::AffinePlusGaussian, 0) => mk(Box::new(|s| (-s * s).exp())).with_decay(Tail::Rapid),
            (TestKind::Gaussian | TestKind::AffinePlusGaussian, 1) => mk(Box::new(|s| 2.0 * s * (-s * s).exp()))
                .with_shape(RadialShape::Unimodal {
                    peak: r / 2f64.sqrt(),
                })
                .with_decay(Tail::Rapid),
            (TestKind::Gaussian | TestKind::AffinePlusGaussian, 2) => mk(Box::new(move |s| {
                (-s * s).exp() * ((4.0 * s * s - 2.0).powi(2) + 4.0 * (nf - 1.0)).sqrt()
            }))
            .with_decay(Tail::Rapid),
            (TestKind::PowerDecay { beta }, 0) => {
                mk(Box::new(move |s| (1.0 + s * s).powf(-beta / 2.0))).with_decay(Tail::power(-beta))
            }
            (TestKind::PowerDecay { beta }, 1) => mk(Box::new(move |s| beta * s * (1.0 + s * s).powf(-beta / 2.0 - 1.0)))
                .with_shape(RadialShape::Unimodal {
                    peak: r / (beta + 1.0).sqrt(),
                })
                .with_decay(Tail::power(-beta - 1.0)),
            (TestKind::PowerDecay { beta }, 2) => mk(Box::new(move |s| {
                let q = 1.0 + s * s;
                let radial = 1.0 - (beta + 1.0) * s * s;
                beta * q.powf(-beta / 2.0 - 2.0) * (radial * radial + (nf - 1.0) * q * q).sqrt()
            }))
            .with_shape(RadialShape::General)
            .with_decay(Tail::power(-beta - 2.0)),
            (TestKind::Plateau { radius, ramp }, 0) => mk(Box::new(move |s| {
                if s <= radius {
                    1.0
                } else {
                    (1.0 - (s - radius) / ramp).max(0.0)
                }
            }))
            .with_breaks(vec![radius * r])
            .with_support((radius + ramp) * r),
            (TestKind::Plateau { radius, ramp }, 1) => mk(Box::new(move |s| {
                if s > radius && s < radius + ramp {
                    1.0 / ramp
                } else {
                    0.0
                }
            }))
            .with_shape(RadialShape::Unimodal { peak: radius * r })
            .with_breaks(vec![radius * r])
            .with_support((radius + ramp) * r),
            _ => {
                return Err(Error::domain(format!(
                    "{} has no analytic derivative profile of order {k}",
                    self.kind.family()
                )))
            }
        };
        Ok(p)
    }
}

fn unit_value(kind: TestKind, s: f64) -> f64 {
    match kind {
        TestKind::Constant => 0.0,
        TestKind::Gaussian | TestKind::AffinePlusGaussian => (-s * s).exp(),
        TestKind::PowerDecay { beta } => (1.0 + s * s).powf(-beta / 2.0),
        TestKind::Plateau { radius, ramp } => {
            if s <= radius {
                1.0
            } else {
                (1.0 - (s - radius) / ramp).max(0.0)
            }
        }
    }
}

/// `‖∇^m u‖_X` computed from the radial rearrangement of `|∇^m u|`.
pub fn gradient_source_norm(u: &TestFunction, x: &SpaceDescriptor, m: usize, grid: &Grid) -> Result<f64> {
    if m == 0 {
        return Err(Error::domain("gradient order m must be at least 1"));
    }
    if m == 1 && u.is_tilted() {
        return Err(Error::domain("|∇u| is not radial for tilted functions"));
    }
    if u.kind == TestKind::Constant {
        return Ok(0.0);
    }
    let fstar = rearrange_radial(&u.radial_part(m)?)?;
    ri_norm(&fstar, x, grid)
}

/// Means `λ_k` of `u` over the balls `B(0, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMeanReport {
    pub lambdas: Vec<f64>,
    pub converged: bool,
    /// Mean over the annulus `B_K \ B_{K/2}`.
    pub limit: f64,
}

/// Fraction of the unit sphere in `ℝⁿ` within polar angle `θ` of a fixed axis.
fn cap_fraction(n: usize, theta: f64) -> f64 {
    match n {
        2 => theta / std::f64::consts::PI,
        3 => 0.5 * (1.0 - theta.cos()),
        _ => {
            let k = (n - 2) as i32;
            let simpson = |b: f64| {
                let steps = 256;
                let h = b / steps as f64;
                (0..=steps)
                    .map(|i| {
                        let w = if i == 0 || i == steps {
                            1.0
                        } else if i % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        w * (i as f64 * h).sin().powi(k)
                    })
                    .sum::<f64>()
                    * h
                    / 3.0
            };
            simpson(theta) / simpson(std::f64::consts::PI)
        }
    }
}

/// `(1/|B_k|) ∫_{B(0,k)} g(|x - x₀|/r) dx`.
fn radial_ball_mean(u: &TestFunction, k: f64, grid: &Grid) -> f64 {
    if u.kind == TestKind::Constant {
        return 0.0;
    }
    let (n, d, r) = (u.n, u.center_distance(), u.dilation);
    let kind = u.kind;
    let inside = |rho: f64| -> f64 {
        if d == 0.0 {
            return if rho <= k { 1.0 } else { 0.0 };
        }
        let c = (k * k - rho * rho - d * d) / (2.0 * rho * d);
        if c >= 1.0 {
            1.0
        } else if c <= -1.0 {
            0.0
        } else {
            cap_fraction(n, std::f64::consts::PI - c.acos())
        }
    };
    let f = |rho: f64| unit_value(kind, rho / r) * rho.powi(n as i32 - 1) * inside(rho);
    let hi = k + d;
    let mut breaks = vec![(k - d).abs()];
    if let TestKind::Plateau { radius, ramp } = kind {
        breaks.extend([radius * r, (radius + ramp) * r]);
    }
    if matches!(kind, TestKind::Gaussian | TestKind::AffinePlusGaussian | TestKind::PowerDecay { .. }) {
        breaks.extend([r, 4.0 * r, 8.0 * r]);
    }
    breaks.retain(|&b| b > 0.0 && b < hi);
    let lo = 1e-12 * hi;
    let v = integrate_interval(&f, lo, hi, &breaks, grid) + f(lo) * lo / n as f64;
    n as f64 * v / k.powi(n as i32)
}

pub fn ball_means(u: &TestFunction, k_max: usize, grid: &Grid) -> Result<BallMeanReport> {
    u.validate()?;
    if k_max < 4 {
        return Err(Error::domain("ball means need K ≥ 4"));
    }
    let g: Vec<f64> = (1..=k_max).map(|k| radial_ball_mean(u, k as f64, grid)).collect();
    let lambdas = g.iter().map(|v| u.offset + v).collect();
    let n = u.n as i32;
    let annulus = |hi: usize| {
        let lo = hi.div_ceil(2);
        let (vh, vl) = ((hi as f64).powi(n), (lo as f64).powi(n));
        (vh * g[hi - 1] - vl * g[lo - 1]) / (vh - vl)
    };
    let a_full = annulus(k_max);
    let a_half = annulus(k_max.div_ceil(2));
    // the tilt averages to zero over centered balls
    let limit = u.offset + a_full;
    let converged = (a_full - a_half).abs() < 1e-6 * (1.0 + limit.abs());
    Ok(BallMeanReport { lambdas, converged, limit })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialApprox {
    pub m: usize,
    pub n: usize,
    pub constant: f64,
    /// Coefficients of `x₁, …, x_n`; empty for `m = 1`.
    pub linear: Vec<f64>,
}

impl PolynomialApprox {
    /// `(multi-index, coefficient)` pairs.
    pub fn coefficients(&self) -> Vec<(Vec<usize>, f64)> {
        let mut out = vec![(vec![0; self.n], self.constant)];
        for (i, &c) in self.linear.iter().enumerate() {
            let mut a = vec![0; self.n];
            a[i] = 1;
            out.push((a, c));
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.linear.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }
}

pub fn find_polynomial(u: &TestFunction, m: usize, k_max: usize, grid: &Grid) -> Result<PolynomialApprox> {
    if !(1..=2).contains(&m) {
        return Err(Error::domain(format!("ball-mean polynomials are built for m ∈ {{1, 2}}, got {m}")));
    }
    u.validate()?;
    let linear = if m == 2 {
        if u.center_distance() != 0.0 && u.kind != TestKind::Constant {
            return Err(Error::domain("second-order ball means need a centered bump"));
        }
        // ∂_i of the radial part is odd, so its ball means vanish
        u.tilt.clone().unwrap_or_else(|| vec![0.0; u.n])
    } else {
        if u.is_tilted() {
            return Err(Error::domain("tilted functions need m = 2"));
        }
        Vec::new()
    };
    let report = ball_means(u, k_max, grid)?;
    if !report.converged {
        return Err(Error::NonConvergence(format!(
            "ball means did not settle by K = {k_max}: limit estimate {}, λ_K = {}",
            report.limit,
            report.lambdas.last().copied().unwrap_or(f64::NAN)
        )));
    }
    Ok(PolynomialApprox {
        m,
        n: u.n,
        constant: report.limit,
        linear,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub family: String,
    pub polynomial: PolynomialApprox,
    pub source_norm: f64,
    pub target_norm: f64,
    pub ratio: f64,
    pub degenerate: bool,
    /// `P`'s constant was replaced by `u(∞)` after matching it within tolerance.
    pub snapped: bool,
    /// Target norm from shell slicing, when requested.
    pub sliced_target_norm: Option<f64>,
}

const SNAP_TOL: f64 = 1e-6;

/// `‖u - P‖_{X^m} / ‖∇^m u‖_X`.
pub fn poincare_ratio(
    u: &TestFunction,
    x: &SpaceDescriptor,
    spec: &TargetSpec,
    m: usize,
    k_max: usize,
    grid: &Grid,
    slicing: bool,
) -> Result<PoincareReport> {
    if admissibility(x, m, u.n)? == Decision::No {
        return Err(Error::domain(format!(
            "{} is not admissible for m = {m}, n = {}",
            x.label(),
            u.n
        )));
    }
    let mut poly = find_polynomial(u, m, k_max, grid)?;
    let at_inf = u.offset + u.radial_limit();
    let snapped = (poly.constant - at_inf).abs() <= SNAP_TOL * (1.0 + at_inf.abs());
    if snapped {
        poly.constant = at_inf;
    }
    let delta = u.offset - poly.constant;
    let base = u.radial_part(0)?;
    let v = if delta == 0.0 {
        base
    } else {
        let g = base.g.clone();
        RadialProfile::new(move |rho| (delta + g(rho)).abs(), u.n)
            .with_shape(RadialShape::General)
            .with_breaks(base.breaks.clone())
            .with_decay(Tail::CONSTANT)
            .with_scale(base.scale)
    };
    let vstar = if u.kind == TestKind::Constant && delta == 0.0 {
        Profile::zero()
    } else {
        rearrange_radial(&v)?
    };
    let num = target_norm(&vstar, spec, grid)?;
    let sliced = if slicing && !vstar.is_zero() {
        let r_max = v.support.unwrap_or(12.0 * v.scale);
        let s = Profile::Step(radial_rearrangement_sliced(&v, 256 * 256, r_max)?);
        Some(target_norm(&s, spec, grid)?)
    } else {
        None
    };
    let den = gradient_source_norm(u, x, m, grid)?;
    let (ratio, degenerate) = if den == 0.0 {
        if num == 0.0 {
            (0.0, true)
        } else {
            return Err(Error::domain("‖∇^m u‖_X = 0 but u - P ≠ 0"));
        }
    } else {
        (num / den, false)
    };
    Ok(PoincareReport {
        family: u.kind.family().into(),
        polynomial: poly,
        source_norm: den,
        target_norm: num,
        ratio,
        degenerate,
        snapped,
        sliced_target_norm: sliced,
    })
}

/// One row of a family sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub param: f64,
    pub source_norm: f64,
    pub target_norm: f64,
    pub ratio: f64,
    pub converged: bool,
    pub degenerate: bool,
}

impl SweepRow {
    pub const CSV_HEADER: &'static [&'static str] =
        &["family", "param", "source_norm", "target_norm", "ratio", "converged", "degenerate"];
}

/// Poincaré ratios of `u(·/r)` for each `r`, evaluated in parallel and sorted by `r`.
/// Ball means run to `K·max(1, r)` so the dilated bump sits as deep inside `B_K`.
pub fn dilation_sweep(
    u: &TestFunction,
    x: &SpaceDescriptor,
    spec: &TargetSpec,
    m: usize,
    k_max: usize,
    dilations: &[f64],
    grid: &Grid,
) -> Vec<Result<SweepRow>> {
    let mut rows: Vec<(f64, Result<SweepRow>)> = dilations
        .par_iter()
        .map(|&r| {
            let ur = u.clone().with_dilation(u.dilation * r);
            let k = (k_max as f64 * r.max(1.0)).ceil() as usize;
            let row = poincare_ratio(&ur, x, spec, m, k, grid, false).map(|p| SweepRow {
                family: p.family,
                param: r,
                source_norm: p.source_norm,
                target_norm: p.target_norm,
                ratio: p.ratio,
                converged: true,
                degenerate: p.degenerate,
            });
            (r, row)
        })
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    rows.into_iter().map(|(_, r)| r).collect()
}

/// `Tf(t) = ∫_t^∞ f(s) s^{1/n-1} ds` for `f ≥ 0`.
pub fn hardy_operator(f: &Profile, n: usize, grid: &Grid) -> Profile {
    let e = 1.0 / n as f64 - 1.0;
    let fs = f.shared();
    let phi = {
        let fs = fs.clone();
        move |s: f64| fs.eval(s) * s.powf(e)
    };
    let mut nodes = grid.nodes();
    nodes.extend(f.breakpoints().into_iter().filter(|&b| b > grid.t_min && b < grid.t_max));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let w = Tail::power(e);
    let (phi_zero, phi_inf) = (w.mul(f.tail_zero()), w.mul(f.tail_inf()));
    let last = *nodes.last().unwrap();
    let beyond = {
        let ig = Integrand::new(&phi).on(last, f64::INFINITY).breaks(f.breakpoints()).tails(phi_zero, phi_inf);
        integrate(&ig, grid).value
    };
    // right cumulative sums: back[i] = ∫_{nodes[i]}^∞ φ
    let mut back = vec![0.0; nodes.len()];
    back[nodes.len() - 1] = beyond;
    for i in (0..nodes.len() - 1).rev() {
        back[i] = back[i + 1] + log_panel(&phi, nodes[i], nodes[i + 1]);
    }
    let t0 = nodes[0];
    let f0 = fs.eval(t0);
    let head_power = match f.tail_zero() {
        Tail::Power { power, .. } => power,
        _ => 0.0,
    };
    // ∫_t^{t0} f(t0)(s/t0)^a s^{1/n-1} ds with a the leading power at zero
    let head = move |t: f64| {
        let b = head_power + 1.0 / n as f64;
        if b.abs() < 1e-14 {
            f0 * t0.powf(-head_power) * (t0 / t).ln()
        } else {
            f0 * t0.powf(-head_power) * (t0.powf(b) - t.powf(b)) / b
        }
    };
    let total = match phi_zero.integrable_at_zero() {
        Convergence::Converges => back[0] + head(0.0),
        _ => f64::INFINITY,
    };
    let tz = if total.is_finite() { Tail::CONSTANT } else { Tail::Unknown };
    let ti = match phi_inf {
        Tail::Zero => Tail::Zero,
        Tail::Rapid => Tail::Rapid,
        other => Tail::power(1.0).mul(other),
    };
    let breaks = f.breakpoints();
    let phi2 = phi.clone();
    let g = *grid;
    let inner_breaks = breaks.clone();
    Profile::from_fn(
        move |t| {
            if !(t > 0.0) {
                total
            } else if t < t0 {
                back[0] + head(t)
            } else if t >= last {
                let ig = Integrand::new(&phi2).on(t, f64::INFINITY).breaks(inner_breaks.clone()).tails(phi_zero, phi_inf);
                integrate(&ig, &g).value
            } else {
                let i = nodes.partition_point(|&x| x <= t) - 1;
                back[i + 1] + log_panel(&phi2, t, nodes[i + 1])
            }
        },
        breaks,
        tz,
        ti,
        Some(total),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    /// `‖Tf‖_Y / ‖f‖_X` per member; `None` for skipped members with `‖f‖_X = 0`.
    pub ratios: Vec<Option<f64>>,
    pub max_ratio: f64,
}

/// `max ‖Tf‖_Y / ‖f‖_X` over a family of nonnegative nonincreasing profiles.
pub fn hardy_check(x: &SpaceDescriptor, y: &SpaceDescriptor, family: &[Profile], n: usize, grid: &Grid) -> Result<HardyReport> {
    if n < 2 {
        return Err(Error::domain("the Hardy-type operator needs n ≥ 2"));
    }
    let mut ratios: Vec<(usize, Result<Option<f64>>)> = family
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let r = (|| {
                let fx = ri_norm(f, x, grid)?;
                if fx == 0.0 {
                    return Ok(None);
                }
                let ty = ri_norm(&hardy_operator(f, n, grid), y, grid)?;
                Ok(Some(ty / fx))
            })();
            (i, r)
        })
        .collect();
    ratios.sort_by_key(|p| p.0);
    let ratios = ratios.into_iter().map(|(_, r)| r).collect::<Result<Vec<_>>>()?;
    let max_ratio = ratios.iter().flatten().copied().fold(0.0, f64::max);
    Ok(HardyReport { ratios, max_ratio })
}
