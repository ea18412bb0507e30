//! Rearrangement-invariant norms of nonincreasing profiles.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orlicz::{luxemburg_norm, orlicz_lorentz_norm, YoungSpec};
use crate::profile::Profile;
use crate::quadrature::{integrate, Grid, Integrand};
use crate::tail::Tail;

/// Description of a rearrangement-invariant space over `(0, ∞)`.
///
/// JSON form: `{"family": "lorentz", "p": 2, "q": 1}`; `∞` is written `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpaceDescriptor {
    Lebesgue {
        #[serde(with = "crate::ext_real")]
        p: f64,
    },
    Lorentz {
        #[serde(with = "crate::ext_real")]
        p: f64,
        #[serde(with = "crate::ext_real")]
        q: f64,
    },
    /// Weight `t^{1/p-1/q}` times one broken logarithm per layer `[α₀, α∞]`.
    LorentzZygmund {
        #[serde(with = "crate::ext_real")]
        p: f64,
        #[serde(with = "crate::ext_real")]
        q: f64,
        #[serde(default)]
        layers: Vec<[f64; 2]>,
    },
    /// `‖t^{-1} ℓ^{α₀-1}(t) f*(t)‖_{L¹(0,1)}`.
    #[serde(rename = "y1")]
    SpecialY1 { a0: f64 },
    /// `‖f‖_∞ + ‖t^{-1/q} ℓ^{α∞-1}(t) f*(t)‖_{L^q(1,∞)}`.
    #[serde(rename = "y2")]
    SpecialY2 {
        #[serde(with = "crate::ext_real")]
        q: f64,
        a_inf: f64,
    },
    Orlicz { young: YoungSpec },
    OrliczLorentz {
        #[serde(with = "crate::ext_real")]
        p: f64,
        #[serde(with = "crate::ext_real")]
        q: f64,
        young: YoungSpec,
    },
    /// `‖f‖_∞ + ‖f‖_inner`.
    #[serde(rename = "intersection_linfty")]
    IntersectionWithLinfty { inner: Box<SpaceDescriptor> },
}

const INF: f64 = f64::INFINITY;

/// Hölder conjugate, `1 ↔ ∞`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        INF
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

fn pow_label(x: f64) -> String {
    if x.is_infinite() {
        "∞".into()
    } else {
        format!("{x}")
    }
}

impl SpaceDescriptor {
    pub fn lebesgue(p: f64) -> Self {
        SpaceDescriptor::Lebesgue { p }
    }

    pub fn linfty() -> Self {
        SpaceDescriptor::Lebesgue { p: INF }
    }

    pub fn lorentz(p: f64, q: f64) -> Self {
        SpaceDescriptor::Lorentz { p, q }
    }

    pub fn lz(p: f64, q: f64, layers: Vec<[f64; 2]>) -> Self {
        SpaceDescriptor::LorentzZygmund { p, q, layers }
    }

    /// Parameter range checks shared by every evaluator.
    pub fn validate(&self) -> Result<()> {
        let in_range = |x: f64| x >= 1.0 && !x.is_nan();
        match self {
            SpaceDescriptor::Lebesgue { p } if !in_range(*p) => {
                Err(Error::domain(format!("Lebesgue exponent p = {p} outside [1, ∞]")))
            }
            SpaceDescriptor::Lorentz { p, q } | SpaceDescriptor::LorentzZygmund { p, q, .. }
                if !in_range(*p) || !in_range(*q) =>
            {
                Err(Error::domain(format!("Lorentz exponents (p, q) = ({p}, {q}) outside [1, ∞]")))
            }
            SpaceDescriptor::LorentzZygmund { p, q, layers } => {
                if layers.len() > 3 {
                    return Err(Error::domain("at most three logarithmic layers are supported"));
                }
                if layers.iter().flatten().any(|a| !a.is_finite()) {
                    return Err(Error::domain("logarithmic exponents must be finite"));
                }
                if layers.len() == 1 && layers[0] != [0.0, 0.0] {
                    if let LzValidity::Invalid { reason } = lz_validity(*p, *q, layers) {
                        return Err(Error::domain(reason));
                    }
                }
                Ok(())
            }
            SpaceDescriptor::SpecialY2 { q, .. } if !in_range(*q) => {
                Err(Error::domain(format!("exponent q = {q} outside [1, ∞]")))
            }
            SpaceDescriptor::OrliczLorentz { p, q, .. } if !(*p > 0.0) || !(*q > 0.0) => {
                Err(Error::domain("Orlicz–Lorentz exponents must be positive"))
            }
            SpaceDescriptor::IntersectionWithLinfty { inner } => inner.validate(),
            _ => Ok(()),
        }
    }

    /// Short human-readable name, e.g. `L^{2,1}`.
    pub fn label(&self) -> String {
        match self {
            SpaceDescriptor::Lebesgue { p } => format!("L^{}", pow_label(*p)),
            SpaceDescriptor::Lorentz { p, q } => format!("L^{{{},{}}}", pow_label(*p), pow_label(*q)),
            SpaceDescriptor::LorentzZygmund { p, q, layers } => {
                let ls: Vec<String> = layers.iter().map(|l| format!("[{},{}]", l[0], l[1])).collect();
                format!("L^{{{},{};{}}}", pow_label(*p), pow_label(*q), ls.join(","))
            }
            SpaceDescriptor::SpecialY1 { a0 } => format!("Y1(a0={a0})"),
            SpaceDescriptor::SpecialY2 { q, a_inf } => format!("Y2(q={},aInf={a_inf})", pow_label(*q)),
            SpaceDescriptor::Orlicz { young } => format!("L^A({})", young.label()),
            SpaceDescriptor::OrliczLorentz { p, q, young } => {
                format!("L({},{},{})", pow_label(*p), pow_label(*q), young.label())
            }
            SpaceDescriptor::IntersectionWithLinfty { inner } => format!("{} ∩ L^∞", inner.label()),
        }
    }

    /// `(p, q, layers)` for the power-weight families.
    fn lz_parts(&self) -> Option<(f64, f64, &[[f64; 2]])> {
        match self {
            SpaceDescriptor::Lebesgue { p } => Some((*p, *p, &[])),
            SpaceDescriptor::Lorentz { p, q } => Some((*p, *q, &[])),
            SpaceDescriptor::LorentzZygmund { p, q, layers } => Some((*p, *q, layers)),
            _ => None,
        }
    }
}

/// One broken logarithmic factor of the given depth at `t`.
///
/// Depth 1 is `(1 - log t)^{α₀}` below 1 and `(1 + log t)^{α∞}` above;
/// each further depth applies `1 + log(·)` once more to the inner factor.
pub fn broken_log(t: f64, layer: [f64; 2], depth: usize) -> f64 {
    let (mut x, alpha) = if t < 1.0 {
        (1.0 - t.ln(), layer[0])
    } else {
        (1.0 + t.ln(), layer[1])
    };
    if alpha == 0.0 {
        return 1.0;
    }
    for _ in 1..depth {
        x = 1.0 + x.ln();
    }
    x.powf(alpha)
}

/// `t^{1/p-1/q} Π_d ℓ_d(t)`.
pub fn lz_weight(t: f64, p: f64, q: f64, layers: &[[f64; 2]]) -> f64 {
    let e = recip(p) - recip(q);
    let mut w = if e == 0.0 { 1.0 } else { t.powf(e) };
    for (d, l) in layers.iter().enumerate() {
        w *= broken_log(t, *l, d + 1);
    }
    w
}

fn lz_weight_tail(p: f64, q: f64, layers: &[[f64; 2]], at_zero: bool) -> Tail {
    let side = if at_zero { 0 } else { 1 };
    let mut logs = [0.0; 3];
    for (d, l) in layers.iter().enumerate().take(3) {
        logs[d] = l[side];
    }
    Tail::Power {
        power: recip(p) - recip(q),
        logs,
    }
}

/// Outcome of the one-layer validity test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LzValidity {
    /// `clause` indexes: 1 `p=q=1, α₀≥0, α∞≤0`; 2 `1<p<∞`;
    /// 3 `p=∞, q<∞, α₀+1/q<0`; 4 `p=q=∞, α₀≤0`.
    Valid { clause: u8 },
    Invalid { reason: String },
    /// More than one layer: no criterion available.
    NotChecked,
}

impl LzValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, LzValidity::Valid { .. })
    }
}

/// Whether `ρ_{p,q;[α₀,α∞]}` is equivalent to a rearrangement-invariant norm.
pub fn lz_validity(p: f64, q: f64, layers: &[[f64; 2]]) -> LzValidity {
    if layers.len() > 1 {
        return LzValidity::NotChecked;
    }
    let [a0, ainf] = layers.first().copied().unwrap_or([0.0, 0.0]);
    if p == 1.0 && q == 1.0 && a0 >= 0.0 && ainf <= 0.0 {
        return LzValidity::Valid { clause: 1 };
    }
    if p > 1.0 && p < INF {
        return LzValidity::Valid { clause: 2 };
    }
    if p.is_infinite() && q < INF && a0 + 1.0 / q < 0.0 {
        return LzValidity::Valid { clause: 3 };
    }
    if p.is_infinite() && q.is_infinite() && a0 <= 0.0 {
        return LzValidity::Valid { clause: 4 };
    }
    let reason = if p == 1.0 && q == 1.0 {
        format!("p = q = 1 needs α₀ ≥ 0 and α∞ ≤ 0, got [{a0}, {ainf}]")
    } else if p == 1.0 {
        format!("p = 1 needs q = 1, got q = {q} (quasi-norm)")
    } else if q < INF {
        format!("p = ∞, q = {q} needs α₀ + 1/q < 0, got α₀ = {a0}")
    } else {
        format!("p = q = ∞ needs α₀ ≤ 0, got α₀ = {a0}")
    };
    LzValidity::Invalid { reason }
}

/// `‖f*‖_X`, `+∞` allowed. The profile must already be nonincreasing.
pub fn ri_norm(fstar: &Profile, space: &SpaceDescriptor, grid: &Grid) -> Result<f64> {
    space.validate()?;
    if fstar.is_zero() {
        return Ok(0.0);
    }
    match space {
        SpaceDescriptor::Lebesgue { .. }
        | SpaceDescriptor::Lorentz { .. }
        | SpaceDescriptor::LorentzZygmund { .. } => {
            let (p, q, layers) = space.lz_parts().unwrap();
            Ok(weighted_norm(fstar, p, q, layers, 0.0, INF, grid))
        }
        SpaceDescriptor::SpecialY1 { a0 } => {
            Ok(weighted_norm(fstar, INF, 1.0, &[[a0 - 1.0, 0.0]], 0.0, 1.0, grid))
        }
        SpaceDescriptor::SpecialY2 { q, a_inf } => {
            let sup = weighted_norm(fstar, INF, INF, &[], 0.0, INF, grid);
            let tail = weighted_norm(fstar, INF, *q, &[[0.0, a_inf - 1.0]], 1.0, INF, grid);
            Ok(sup + tail)
        }
        SpaceDescriptor::Orlicz { young } => luxemburg_norm(fstar, young, grid),
        SpaceDescriptor::OrliczLorentz { p, q, young } => {
            orlicz_lorentz_norm(fstar, *p, *q, young, grid)
        }
        SpaceDescriptor::IntersectionWithLinfty { inner } => {
            let sup = weighted_norm(fstar, INF, INF, &[], 0.0, INF, grid);
            Ok(sup + ri_norm(fstar, inner, grid)?)
        }
    }
}

/// `‖w f‖_{L^q(lo, hi)}` with the Lorentz–Zygmund weight `w`.
pub fn weighted_norm(
    f: &Profile,
    p: f64,
    q: f64,
    layers: &[[f64; 2]],
    lo: f64,
    hi: f64,
    grid: &Grid,
) -> f64 {
    let w = |t: f64| lz_weight(t, p, q, layers);
    let tz = lz_weight_tail(p, q, layers, true).mul(f.tail_zero());
    let ti = lz_weight_tail(p, q, layers, false).mul(f.tail_inf());
    let mut breaks = f.breakpoints();
    breaks.push(1.0);
    breaks.retain(|&b| b > lo && b < hi);
    if q.is_infinite() {
        if (lo == 0.0 && tz.bounded(true).diverges()) || (hi == INF && ti.bounded(false).diverges()) {
            return INF;
        }
        let h = |t: f64| w(t) * f.eval(t);
        let mut best = 0.0f64;
        if lo == 0.0 && tz == Tail::CONSTANT && lz_weight_tail(p, q, layers, true) == Tail::CONSTANT {
            if let Some(c) = f.limit_zero() {
                best = best.max(c.abs());
            }
        }
        if lo > 0.0 {
            best = best.max(h(lo));
        }
        if hi.is_finite() {
            best = best.max(w(hi) * f.eval_left(hi));
        }
        for &b in &breaks {
            best = best.max(w(b) * f.eval_left(b)).max(h(b));
        }
        let mut pts: Vec<f64> = grid
            .nodes()
            .into_iter()
            .filter(|&t| t > lo && t < hi)
            .collect();
        pts.extend(breaks.iter().copied());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut arg = None;
        for (i, &t) in pts.iter().enumerate() {
            let v = h(t);
            if v > best {
                best = v;
                arg = Some(i);
            }
        }
        if let Some(i) = arg {
            best = best.max(refine_max(&h, &pts, i));
        }
        return best;
    }
    let g = |t: f64| (w(t) * f.eval(t)).abs().powf(q);
    let ig = Integrand::new(&g)
        .on(lo, hi)
        .breaks(breaks)
        .tails(tz.powf(q), ti.powf(q));
    let v = integrate(&ig, grid).value;
    if v.is_infinite() {
        INF
    } else {
        v.powf(1.0 / q)
    }
}

/// Golden-section search in `log t` between the neighbours of a grid maximum.
fn refine_max(h: &dyn Fn(f64) -> f64, pts: &[f64], i: usize) -> f64 {
    let a = pts[i.saturating_sub(1)];
    let b = pts[(i + 1).min(pts.len() - 1)];
    if !(b > a) {
        return h(pts[i]);
    }
    let mut lo = a.ln();
    let mut hi = b.ln();
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut best = h(pts[i]);
    for _ in 0..60 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        let (v1, v2) = (h(x1.exp()), h(x2.exp()));
        best = best.max(v1).max(v2);
        if v1 < v2 {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    best
}

/// `φ_X(t) = ‖χ_(0,t)‖_X`.
pub fn fundamental_function(space: &SpaceDescriptor, t: f64, grid: &Grid) -> Result<f64> {
    space.validate()?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    match space {
        SpaceDescriptor::Lebesgue { p } => Ok(t.powf(recip(*p))),
        SpaceDescriptor::Lorentz { p, q } => {
            if q.is_infinite() {
                Ok(t.powf(recip(*p)))
            } else if p.is_infinite() {
                Ok(INF)
            } else {
                Ok((p / q).powf(1.0 / q) * t.powf(1.0 / p))
            }
        }
        _ => ri_norm(&Profile::indicator(t), space, grid),
    }
}

/// Constants relating Lorentz norms to their associates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityConstants {
    /// `‖g‖_{X'} ≤ holder_upper · ‖g‖_{L^{p',q'}}`.
    pub holder_upper: f64,
    /// `‖g‖_{X'} ≥ norm_lower · ‖g‖_{L^{p',q'}}` when known.
    pub norm_lower: Option<f64>,
    /// `φ_X(t) · φ_{L^{p',q'}}(t) = fundamental · t`.
    pub fundamental: f64,
}

/// Table entry for `X = L^{p,q}`, `1 < p < ∞`.
pub fn lorentz_duality_constants(p: f64, q: f64) -> DualityConstants {
    let (pc, qc) = (conjugate(p), conjugate(q));
    let part = |a: f64, b: f64| if b.is_infinite() { 1.0 } else { (a / b).powf(1.0 / b) };
    let norm_lower = if q == p {
        Some(1.0)
    } else if q == 1.0 {
        Some(1.0 / p)
    } else {
        None
    };
    DualityConstants {
        holder_upper: 1.0,
        norm_lower,
        fundamental: part(p, q) * part(pc, qc),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Associate {
    Exact { space: SpaceDescriptor },
    Equivalent {
        space: SpaceDescriptor,
        constants: DualityConstants,
    },
    Unsupported,
}

impl Associate {
    pub fn space(&self) -> Option<&SpaceDescriptor> {
        match self {
            Associate::Exact { space } | Associate::Equivalent { space, .. } => Some(space),
            Associate::Unsupported => None,
        }
    }
}

pub fn associate_descriptor(space: &SpaceDescriptor) -> Associate {
    match *space {
        SpaceDescriptor::Lebesgue { p } => Associate::Exact {
            space: SpaceDescriptor::lebesgue(conjugate(p)),
        },
        SpaceDescriptor::Lorentz { p, q } if p == q => Associate::Exact {
            space: SpaceDescriptor::lebesgue(conjugate(p)),
        },
        SpaceDescriptor::Lorentz { p, q } if p > 1.0 && p < INF => Associate::Equivalent {
            space: SpaceDescriptor::lorentz(conjugate(p), conjugate(q)),
            constants: lorentz_duality_constants(p, q),
        },
        _ => Associate::Unsupported,
    }
}

/// `∫_0^∞ f g`.
pub fn pairing(f: &Profile, g: &Profile, grid: &Grid) -> f64 {
    let h = |t: f64| f.eval(t) * g.eval(t);
    let mut breaks = f.breakpoints();
    breaks.extend(g.breakpoints());
    let ig = Integrand::new(&h)
        .breaks(breaks)
        .tails(f.tail_zero().mul(g.tail_zero()), f.tail_inf().mul(g.tail_inf()));
    integrate(&ig, grid).value
}

/// Van der Corput radical inverse in base 2.
fn van_der_corput(mut k: u64) -> f64 {
    let mut x = 0.0;
    let mut base = 0.5;
    while k > 0 {
        if k & 1 == 1 {
            x += base;
        }
        base *= 0.5;
        k >>= 1;
    }
    x
}

fn power_of(g: &Profile, r: f64) -> Profile {
    let gs: Arc<Profile> = g.shared();
    Profile::from_fn(
        move |t| gs.eval(t).abs().powf(r),
        g.breakpoints(),
        g.tail_zero().powf(r),
        g.tail_inf().powf(r),
        g.limit_zero().map(|c| c.abs().powf(r)),
    )
}

/// The `k`-th test function of the dual search: indicators `χ_(0,s)` at
/// low-discrepancy points of `log s ∈ [-6, 6]·ln 10` alternating with powers `g^r`.
pub fn dual_candidate(g: &Profile, k: usize, hint: f64) -> Profile {
    const POWERS: [f64; 9] = [1.0, 0.5, 2.0, 1.0 / 3.0, 3.0, 0.25, 4.0, 1.5, 2.0 / 3.0];
    if k % 2 == 0 {
        let s = 10f64.powf(-6.0 + 12.0 * van_der_corput(k as u64 / 2 + 1));
        Profile::indicator(s)
    } else {
        let j = k / 2;
        let r = if j == 0 { hint } else { POWERS[(j - 1) % POWERS.len()] };
        power_of(g, r)
    }
}

/// Lower bound for `sup{∫ f g : N(f) ≤ 1}` over the first `candidates` test functions.
pub fn dual_lower_bound_by(
    g: &Profile,
    normalizer: &dyn Fn(&Profile) -> Result<f64>,
    hint: f64,
    candidates: usize,
    grid: &Grid,
) -> f64 {
    if g.is_zero() {
        return 0.0;
    }
    let mut best = 0.0f64;
    for k in 0..candidates {
        let f = dual_candidate(g, k, hint);
        let nf = match normalizer(&f) {
            Ok(v) if v > 0.0 && v.is_finite() => v,
            _ => continue,
        };
        let v = pairing(&f, g, grid) / nf;
        if v.is_finite() {
            best = best.max(v);
        }
    }
    best
}

/// Certified lower bound for `‖g‖_{X'}`; nondecreasing in `candidates`.
pub fn dual_lower_bound(g: &Profile, space: &SpaceDescriptor, candidates: usize) -> f64 {
    dual_lower_bound_on(g, space, candidates, &Grid::default())
}

pub fn dual_lower_bound_on(
    g: &Profile,
    space: &SpaceDescriptor,
    candidates: usize,
    grid: &Grid,
) -> f64 {
    let hint = match space.lz_parts() {
        Some((p, _, _)) if p > 1.0 && p < INF => conjugate(p) - 1.0,
        _ => 1.0,
    };
    dual_lower_bound_by(g, &|f| ri_norm(f, space, grid), hint, candidates, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::default()
    }

    #[test]
    fn broken_log_examples() {
        assert_eq!(broken_log(1.0, [3.0, 7.0], 1), 1.0);
        assert!((broken_log((-1f64).exp(), [3.0, 7.0], 1) - 8.0).abs() < 1e-12);
        assert!((broken_log(1f64.exp(), [3.0, 7.0], 1) - 128.0).abs() < 1e-10);
        assert_eq!(broken_log(1.0, [3.0, 7.0], 3), 1.0);
    }

    #[test]
    fn lorentz_indicator() {
        let v = ri_norm(&Profile::indicator(4.0), &SpaceDescriptor::lorentz(2.0, 1.0), &grid()).unwrap();
        assert!((v - 4.0).abs() < 1e-9, "{v}");
        let v = ri_norm(&Profile::indicator(9.0), &SpaceDescriptor::lorentz(2.0, INF), &grid()).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
        let v = ri_norm(&Profile::exp_decay(1.0, 1.0), &SpaceDescriptor::lebesgue(1.0), &grid()).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(ri_norm(&Profile::zero(), &SpaceDescriptor::lebesgue(2.0), &grid()).unwrap(), 0.0);
    }

    #[test]
    fn linfty_and_divergence() {
        let v = ri_norm(&Profile::indicator_scaled(2.0, 3.0), &SpaceDescriptor::linfty(), &grid()).unwrap();
        assert_eq!(v, 3.0);
        let f = Profile::power_on(1.0, -0.5, 1.0);
        assert_eq!(ri_norm(&f, &SpaceDescriptor::linfty(), &grid()).unwrap(), INF);
        assert_eq!(ri_norm(&f, &SpaceDescriptor::lebesgue(2.0), &grid()).unwrap(), INF);
        let v = ri_norm(&f, &SpaceDescriptor::lebesgue(1.0), &grid()).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn validity_clauses() {
        assert_eq!(lz_validity(1.0, 1.0, &[[0.0, 0.0]]), LzValidity::Valid { clause: 1 });
        assert_eq!(lz_validity(2.0, 5.0, &[[-3.0, 9.0]]), LzValidity::Valid { clause: 2 });
        assert!(!lz_validity(1.0, 2.0, &[[0.0, 0.0]]).is_valid());
        assert_eq!(lz_validity(INF, 2.0, &[[-1.0, 0.0]]), LzValidity::Valid { clause: 3 });
        assert_eq!(lz_validity(INF, INF, &[[0.0, 3.0]]), LzValidity::Valid { clause: 4 });
        assert_eq!(lz_validity(2.0, 2.0, &[[0.0, 0.0], [1.0, 1.0]]), LzValidity::NotChecked);
        let bad = SpaceDescriptor::lz(1.0, 1.0, vec![[-1.0, 0.0]]);
        assert!(ri_norm(&Profile::indicator(1.0), &bad, &grid()).is_err());
    }

    #[test]
    fn fundamental_closed_forms() {
        let g = grid();
        let l = SpaceDescriptor::lorentz(3.0, 2.0);
        let a = fundamental_function(&l, 5.0, &g).unwrap();
        let b = ri_norm(&Profile::indicator(5.0), &l, &g).unwrap();
        assert!((a - b).abs() < 1e-9 * a);
        assert_eq!(fundamental_function(&l, 0.0, &g).unwrap(), 0.0);
    }

    #[test]
    fn associates() {
        assert_eq!(
            associate_descriptor(&SpaceDescriptor::lebesgue(1.0)),
            Associate::Exact { space: SpaceDescriptor::linfty() }
        );
        let a = associate_descriptor(&SpaceDescriptor::lorentz(3.0, 1.0));
        assert_eq!(a.space(), Some(&SpaceDescriptor::lorentz(1.5, INF)));
        assert_eq!(
            associate_descriptor(&SpaceDescriptor::lz(2.0, 2.0, vec![[1.0, 1.0]])),
            Associate::Unsupported
        );
    }

    #[test]
    fn dual_examples() {
        let g = Profile::indicator(1.0);
        let v = dual_lower_bound(&g, &SpaceDescriptor::lebesgue(2.0), 16);
        assert!(v >= 1.0 - 1e-3 && v <= 1.0 + 1e-9, "{v}");
        let v = dual_lower_bound(&g, &SpaceDescriptor::lebesgue(1.0), 64);
        assert!(v >= 1.0 - 1e-3 && v <= 1.0 + 1e-9, "{v}");
        assert_eq!(dual_lower_bound(&Profile::zero(), &SpaceDescriptor::lebesgue(2.0), 8), 0.0);
    }

    #[test]
    fn json_schema() {
        let s: SpaceDescriptor = serde_json::from_str(r#"{"family":"lorentz","p":2,"q":1}"#).unwrap();
        assert_eq!(s, SpaceDescriptor::lorentz(2.0, 1.0));
        let s: SpaceDescriptor =
            serde_json::from_str(r#"{"family":"lorentz_zygmund","p":"inf","q":2,"layers":[[-0.5,1],[-1,0]]}"#)
                .unwrap();
        assert_eq!(s, SpaceDescriptor::lz(INF, 2.0, vec![[-0.5, 1.0], [-1.0, 0.0]]));
        let txt = serde_json::to_string(&SpaceDescriptor::linfty()).unwrap();
        assert_eq!(txt, r#"{"family":"lebesgue","p":"inf"}"#);
    }
}
