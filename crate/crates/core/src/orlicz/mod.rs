//! Orlicz and Orlicz–Lorentz norms, the Sobolev transform `A ↦ A_m` and `E_m`.

mod transform;
mod young;

pub use transform::{build_em, sobolev_young_transform, EmReport, MonotoneTable, TransformReport};
pub use young::{PowerLogPiece, YoungSpec, YoungTable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::quadrature::{integrate, Grid, Integrand};
use crate::ri_norms::weighted_norm;
use crate::tail::{Convergence, Tail};

/// Size class of `A(f(t))` from the classes of `A` and `f` at one end.
pub(crate) fn composed_tail(a: &YoungSpec, f: Tail, at_zero: bool) -> Tail {
    match f {
        Tail::Zero => Tail::Zero,
        Tail::Rapid => match a.tail_zero() {
            Tail::Zero => Tail::Zero,
            Tail::Power { power, .. } if power > 0.0 => Tail::Rapid,
            Tail::Rapid => Tail::Rapid,
            _ => Tail::Unknown,
        },
        Tail::Power { power: e, logs } => {
            if e == 0.0 && logs == [0.0; 3] {
                return Tail::CONSTANT;
            }
            let vanishes = f.vanishes(at_zero);
            let outer = match vanishes {
                Convergence::Converges => a.tail_zero(),
                Convergence::Diverges => a.tail_inf(),
                Convergence::Undetermined => return Tail::Unknown,
            };
            match outer {
                Tail::Power { power: k, logs: b } => Tail::Power {
                    power: e * k,
                    logs: [logs[0] * k + b[0], 0.0, 0.0],
                },
                Tail::Zero if vanishes.converges() => Tail::Zero,
                Tail::Rapid if vanishes.converges() => Tail::Rapid,
                Tail::Explosive | Tail::Infinite if vanishes.diverges() => outer,
                _ => Tail::Unknown,
            }
        }
        Tail::Explosive | Tail::Infinite => match a.tail_inf() {
            Tail::Zero => Tail::Zero,
            Tail::Power { power, .. } if power > 0.0 => Tail::Explosive,
            Tail::Explosive | Tail::Infinite => Tail::Infinite,
            _ => Tail::Unknown,
        },
        Tail::Unknown => Tail::Unknown,
    }
}

/// `∫_0^∞ A(f*(t)/λ) dt`.
pub fn modular(fstar: &Profile, a: &YoungSpec, lambda: f64, grid: &Grid) -> f64 {
    if let Profile::Step(s) = fstar {
        let tail = a.eval(s.tail_value.abs() / lambda);
        if tail > 0.0 {
            return f64::INFINITY;
        }
        return s
            .values
            .iter()
            .zip(s.breakpoints.windows(2))
            .map(|(v, w)| a.eval(v.abs() / lambda) * (w[1] - w[0]))
            .sum();
    }
    let g = |t: f64| a.eval(fstar.eval(t).abs() / lambda);
    let ig = Integrand::new(&g).breaks(fstar.breakpoints()).tails(
        composed_tail(a, fstar.tail_zero(), true),
        composed_tail(a, fstar.tail_inf(), false),
    );
    integrate(&ig, grid).value
}

const LUX_REL_TOL: f64 = 1e-12;

/// `inf{λ > 0 : ∫ A(f*/λ) ≤ 1}`; the returned `λ` always satisfies the constraint.
pub fn luxemburg_norm(fstar: &Profile, a: &YoungSpec, grid: &Grid) -> Result<f64> {
    if fstar.is_zero() {
        return Ok(0.0);
    }
    let sup = weighted_norm(fstar, f64::INFINITY, f64::INFINITY, &[], 0.0, f64::INFINITY, grid);
    if let YoungSpec::Linfty = a {
        return Ok(sup);
    }
    let floor = match a.infinite_beyond() {
        Some(b) => {
            if sup.is_infinite() {
                return Ok(f64::INFINITY);
            }
            sup / b
        }
        None => 0.0,
    };
    let ok = |l: f64| l >= floor && modular(fstar, a, l, grid) <= 1.0;
    let mut hi = if floor > 0.0 { floor } else { 1.0 };
    let mut steps = 0;
    while !ok(hi) {
        hi *= 16.0;
        steps += 1;
        if steps > 300 || !hi.is_finite() {
            return Ok(f64::INFINITY);
        }
    }
    let mut lo = hi;
    loop {
        let next = lo / 16.0;
        if next < floor || next < 1e-300 {
            lo = floor.max(1e-300);
            if ok(lo) {
                return Ok(lo);
            }
            break;
        }
        lo = next;
        if !ok(lo) {
            break;
        }
        hi = lo;
    }
    while hi / lo - 1.0 > LUX_REL_TOL {
        let mid = (lo * hi).sqrt();
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Convergence of `∫ A(t)/t^{1+p}` near infinity.
pub fn orlicz_lorentz_admissible(a: &YoungSpec, p: f64) -> Convergence {
    a.tail_inf().mul(Tail::power(-1.0 - p)).integrable_at_infinity()
}

/// `‖t^{-1/p} f*(t^{1/q})‖_{L^A}`.
pub fn orlicz_lorentz_norm(fstar: &Profile, p: f64, q: f64, a: &YoungSpec, grid: &Grid) -> Result<f64> {
    if !(p > 0.0) || !(q > 0.0) || q.is_infinite() {
        return Err(Error::domain("Orlicz–Lorentz exponents need 0 < p and 0 < q < ∞"));
    }
    if orlicz_lorentz_admissible(a, p).diverges() {
        return Err(Error::domain(format!(
            "∫^∞ A(t)/t^(1+p) diverges for p = {p}: A is too large near infinity"
        )));
    }
    if fstar.is_zero() {
        return Ok(0.0);
    }
    let h = transformed_profile(fstar, p, q);
    luxemburg_norm(&h, a, grid)
}

/// `t ↦ t^{-1/p} f(t^{1/q})`.
pub fn transformed_profile(f: &Profile, p: f64, q: f64) -> Profile {
    let fs = f.shared();
    let rescale = |t: Tail| match t {
        Tail::Power { power, logs } => Tail::Power {
            power: power / q,
            logs,
        },
        other => other,
    };
    let w = Tail::power(-1.0 / p);
    Profile::from_fn(
        move |t| t.powf(-1.0 / p) * fs.eval(t.powf(1.0 / q)),
        f.breakpoints().into_iter().map(|b| b.powf(q)).collect(),
        w.mul(rescale(f.tail_zero())),
        w.mul(rescale(f.tail_inf())),
        None,
    )
}

/// Convergence of `∫ (s/A(s))^{m/(n-m)}` near zero and near infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionA {
    pub near_zero: Convergence,
    pub near_infinity: Convergence,
}

pub(crate) fn check_mn(m: usize, n: usize) -> Result<()> {
    if n < 2 || m < 1 || m >= n {
        return Err(Error::domain(format!("need n ≥ 2 and 1 ≤ m < n, got m = {m}, n = {n}")));
    }
    Ok(())
}

/// Size class of `(s/A(s))^{m/(n-m)}`.
pub(crate) fn sobolev_integrand_tail(a: &YoungSpec, m: usize, n: usize, at_zero: bool) -> Tail {
    let k = m as f64 / (n - m) as f64;
    let at = if at_zero { a.tail_zero() } else { a.tail_inf() };
    Tail::power(1.0).mul(at.recip()).powf(k)
}

pub fn condition_a(a: &YoungSpec, m: usize, n: usize) -> Result<ConditionA> {
    check_mn(m, n)?;
    Ok(ConditionA {
        near_zero: sobolev_integrand_tail(a, m, n, true).integrable_at_zero(),
        near_infinity: sobolev_integrand_tail(a, m, n, false).integrable_at_infinity(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Zero,
    Infinity,
}

/// Semi-decision for `B(t) ≤ A(ct)` near one end, searching `c = 2^k`,
/// `|k| ≤ 20`, over the last four decades of the grid on that side.
pub fn domination_check(a: &YoungSpec, b: &YoungSpec, side: Side, grid: &Grid) -> bool {
    let nodes: Vec<f64> = match side {
        Side::Infinity => grid.nodes().into_iter().filter(|&t| t >= grid.t_max * 1e-4).collect(),
        Side::Zero => grid.nodes().into_iter().filter(|&t| t <= grid.t_min * 1e4).collect(),
    };
    (-20..=20).any(|k| {
        let c = 2f64.powi(k);
        nodes.iter().all(|&t| {
            let bv = b.eval(t);
            let av = a.eval(c * t);
            bv <= av * (1.0 + 1e-12)
        })
    })
}

/// Domination in both directions.
pub fn equivalent_near(a: &YoungSpec, b: &YoungSpec, side: Side, grid: &Grid) -> bool {
    domination_check(a, b, side, grid) && domination_check(b, a, side, grid)
}
