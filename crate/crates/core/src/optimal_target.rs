//! Optimal targets `X^m` of `m`-th order Poincaré–Sobolev inequalities on `ℝⁿ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orlicz::{build_em, check_mn, condition_a, YoungSpec};
use crate::profile::Profile;
use crate::quadrature::{integrate, integrate_interval, log_panel, Grid, Integrand};
use crate::rearrange::{decreasing_rearrangement, SampledFunction};
use crate::ri_norms::{
    associate_descriptor, conjugate, dual_lower_bound_by, ri_norm, weighted_norm, Associate,
    SpaceDescriptor,
};
use crate::profile::SampledProfile;
use crate::tail::{approx_eq, Convergence, Tail};

const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    CaseTable,
    DualOracle,
}

/// A resolved target: either a closed-form descriptor or the generic `σ_m'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub source: SpaceDescriptor,
    pub m: usize,
    pub n: usize,
    /// `None` means the generic associate of `σ_m`.
    pub target: Option<SpaceDescriptor>,
    pub provenance: Provenance,
    pub row_id: Option<String>,
    /// Whether the polynomial `P` is unique.
    pub unique: Option<bool>,
}

/// One row of a target table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub row_id: String,
    pub target: SpaceDescriptor,
    pub unique: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Yes,
    No,
    Undetermined,
}

impl From<Convergence> for Decision {
    fn from(c: Convergence) -> Self {
        match c {
            Convergence::Converges => Decision::Yes,
            Convergence::Diverges => Decision::No,
            Convergence::Undetermined => Decision::Undetermined,
        }
    }
}

fn is_crit(p: f64, m: usize, n: usize) -> bool {
    approx_eq(p, n as f64 / m as f64)
}

/// Whether `t^{m/n-1} χ_(1,∞) ∈ X'(0, ∞)`.
pub fn admissibility(x: &SpaceDescriptor, m: usize, n: usize) -> Result<Decision> {
    check_mn(m, n)?;
    x.validate()?;
    let crit = n as f64 / m as f64;
    let below = |p: f64| p < crit && !is_crit(p, m, n);
    Ok(match x {
        SpaceDescriptor::Lebesgue { p } => {
            if below(*p) {
                Decision::Yes
            } else {
                Decision::No
            }
        }
        SpaceDescriptor::Lorentz { p, q } => single_layer_admissible(*p, *q, 0.0, m, n),
        SpaceDescriptor::LorentzZygmund { p, q, layers } => match layers.as_slice() {
            [] => single_layer_admissible(*p, *q, 0.0, m, n),
            [[_, a_inf]] => single_layer_admissible(*p, *q, *a_inf, m, n),
            _ => Decision::Undetermined,
        },
        SpaceDescriptor::Orlicz { young } => match condition_a(young, m, n)?.near_zero {
            Convergence::Converges => Decision::Yes,
            _ => Decision::Undetermined,
        },
        _ => Decision::Undetermined,
    })
}

/// Tail test for `L^{p',q';-𝔸}` against `t^{m/n-1}` at infinity.
fn single_layer_admissible(p: f64, q: f64, a_inf: f64, m: usize, n: usize) -> Decision {
    if is_crit(p, m, n) {
        let qc = conjugate(q);
        let ok = if qc.is_infinite() {
            a_inf >= 0.0
        } else {
            a_inf > 1.0 / qc && !approx_eq(a_inf, 1.0 / qc)
        };
        return if ok { Decision::Yes } else { Decision::No };
    }
    if p < n as f64 / m as f64 {
        Decision::Yes
    } else {
        Decision::No
    }
}

/// `f**` as a profile: exact for step inputs, tabulated running integral otherwise.
pub fn maximal_profile(f: &Profile, grid: &Grid) -> Profile {
    let tz = match f.tail_zero() {
        Tail::Power { power, logs } if power > -1.0 => Tail::Power { power, logs },
        Tail::Zero | Tail::Rapid => f.tail_zero(),
        _ => Tail::Unknown,
    };
    let ti = match f.tail_inf().integrable_at_infinity() {
        Convergence::Converges => {
            if f.is_zero() {
                Tail::Zero
            } else {
                Tail::power(-1.0)
            }
        }
        _ => match f.tail_inf() {
            Tail::Power { power, logs } if power > -1.0 => Tail::Power { power, logs },
            _ => Tail::Unknown,
        },
    };
    let lim = f.limit_zero();
    if let Profile::Step(s) = f {
        let s = s.clone();
        return Profile::from_fn(
            move |t| if t > 0.0 { s.integral_to(t) / t } else { s.eval(0.0) },
            f.breakpoints(),
            tz,
            ti,
            lim,
        );
    }
    let mut nodes = grid.nodes();
    nodes.extend(f.breakpoints().into_iter().filter(|&b| b > grid.t_min && b < grid.t_max));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let mut cum = Vec::with_capacity(nodes.len());
    let mut acc = f.integral_to(nodes[0], grid);
    cum.push(acc);
    for w in nodes.windows(2) {
        acc += log_panel(&|t| f.eval(t), w[0], w[1]);
        cum.push(acc);
    }
    let fs = f.shared();
    let g = *grid;
    let breaks = f.breakpoints();
    let inner_breaks = breaks.clone();
    Profile::from_fn(
        move |t| {
            if !(t > 0.0) {
                return fs.limit_zero().unwrap_or(INF);
            }
            let ev = |s: f64| fs.eval(s);
            let big = if t < nodes[0] {
                fs.integral_to(t, &g)
            } else if t >= *nodes.last().unwrap() {
                cum[cum.len() - 1] + integrate_interval(&ev, *nodes.last().unwrap(), t, &inner_breaks, &g)
            } else {
                let i = nodes.partition_point(|&x| x <= t) - 1;
                cum[i] + log_panel(&ev, nodes[i], t)
            };
            big / t
        },
        breaks,
        tz,
        ti,
        lim,
    )
}

/// `t ↦ t^{m/n} f**(t)`.
fn sigma_integrand(fstar: &Profile, m: usize, n: usize, grid: &Grid) -> Profile {
    let fss = maximal_profile(fstar, grid);
    let e = m as f64 / n as f64;
    let w = Tail::power(e);
    let (tz, ti) = (w.mul(fss.tail_zero()), w.mul(fss.tail_inf()));
    let breaks = fss.breakpoints();
    let fs = fss.shared();
    Profile::from_fn(move |t| t.powf(e) * fs.eval(t), breaks, tz, ti, Some(0.0))
}

/// Nonincreasing rearrangement of a profile by cell sampling on the grid,
/// keeping `h`'s declared class at infinity.
pub fn rearrange_profile(h: &Profile, grid: &Grid) -> Result<Profile> {
    let mut nodes = grid.nodes();
    nodes.extend(h.breakpoints().into_iter().filter(|&b| b > grid.t_min && b < grid.t_max));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let mut atoms = vec![(h.eval(0.5 * nodes[0]), nodes[0])];
    for w in nodes.windows(2) {
        atoms.push((h.eval((w[0] * w[1]).sqrt()), w[1] - w[0]));
    }
    let step = decreasing_rearrangement(&SampledFunction::new(atoms));
    if step.values.is_empty() {
        return Ok(Profile::zero());
    }
    // Cells far below the running measure vanish in rounding; drop the empty intervals.
    let (mut ts, mut vs) = (Vec::new(), Vec::new());
    for (&t, &v) in step.breakpoints[1..].iter().zip(&step.values) {
        if ts.last().map_or(t > 0.0, |&p| t > p) {
            ts.push(t);
            vs.push(v);
        }
    }
    let mut s = SampledProfile::new(ts, vs, Tail::CONSTANT, h.tail_inf())?;
    s.limit_zero = Some(step.values[0]);
    Ok(Profile::Sampled(s))
}

/// `σ_m(f) = ‖t^{m/n} f**(t)‖_{X'}`.
pub fn sigma_m(fstar: &Profile, x: &SpaceDescriptor, m: usize, n: usize, grid: &Grid) -> Result<f64> {
    sigma_m_with(fstar, x, m, n, grid, false)
}

/// As [`sigma_m`]; with `allow_oracle` unsupported associates fall back to
/// the dual lower bound (a lower bound for `σ_m`).
pub fn sigma_m_with(
    fstar: &Profile,
    x: &SpaceDescriptor,
    m: usize,
    n: usize,
    grid: &Grid,
    allow_oracle: bool,
) -> Result<f64> {
    check_mn(m, n)?;
    x.validate()?;
    if fstar.is_zero() {
        return Ok(0.0);
    }
    let h = sigma_integrand(fstar, m, n, grid);
    match associate_descriptor(x) {
        Associate::Exact {
            space: SpaceDescriptor::Lebesgue { p },
        } => Ok(weighted_norm(&h, p, p, &[], 0.0, INF, grid)),
        Associate::Exact { space } | Associate::Equivalent { space, .. } => {
            ri_norm(&rearrange_profile(&h, grid)?, &space, grid)
        }
        Associate::Unsupported if allow_oracle => {
            let hs = rearrange_profile(&h, grid)?;
            Ok(dual_lower_bound_by(&hs, &|f| ri_norm(f, x, grid), 1.0, 64, grid))
        }
        Associate::Unsupported => Err(Error::domain(format!(
            "associate of {} is not tabulated; enable the dual oracle",
            x.label()
        ))),
    }
}

/// Row of the Lorentz–Zygmund source table.
pub fn glz_case_table(p: f64, q: f64, layers: &[[f64; 2]], m: usize, n: usize) -> Result<CaseRow> {
    check_mn(m, n)?;
    let [a0, ai] = match layers {
        [] => [0.0, 0.0],
        [l] => *l,
        _ => {
            return Err(Error::NotCovered(
                "source tables cover a single logarithmic layer".into(),
            ))
        }
    };
    let crit = n as f64 / m as f64;
    let not_covered = || {
        Error::NotCovered(format!(
            "(p, q, [α₀, α∞]) = ({p}, {q}, [{a0}, {ai}]) with m = {m}, n = {n} lies in no row of the Lorentz–Zygmund target table"
        ))
    };
    if !(p >= 1.0) || !(q >= 1.0) || (p > crit && !is_crit(p, m, n)) {
        return Err(not_covered());
    }
    let eq = approx_eq;
    let row = |id: &str, target: SpaceDescriptor, unique: bool| {
        Ok(CaseRow {
            row_id: id.to_string(),
            target,
            unique,
        })
    };
    if !is_crit(p, m, n) {
        let ok = (p == 1.0 && q == 1.0 && a0 >= 0.0 && ai <= 0.0) || p > 1.0;
        if !ok {
            return Err(not_covered());
        }
        let (mf, nf) = (m as f64, n as f64);
        let target_p = nf * p / (nf - mf * p);
        let target = if a0 == 0.0 && ai == 0.0 {
            SpaceDescriptor::lorentz(target_p, q)
        } else {
            SpaceDescriptor::lz(target_p, q, vec![[a0, ai]])
        };
        return row("glz:p<n/m", target, true);
    }
    let r = 1.0 - 1.0 / q;
    let gt = |x: f64, y: f64| x > y && !eq(x, y);
    let lt = |x: f64, y: f64| x < y && !eq(x, y);
    if lt(a0, r) && gt(ai, r) {
        return row(
            "glz:p=n/m,a0<1/q',aInf>1/q'",
            SpaceDescriptor::lz(INF, q, vec![[a0 - 1.0, ai - 1.0]]),
            true,
        );
    }
    if q == 1.0 {
        if eq(a0, 0.0) && gt(ai, 0.0) {
            return row(
                "glz:p=n/m,q=1,a0=0,aInf>0",
                SpaceDescriptor::lz(INF, 1.0, vec![[-1.0, ai - 1.0], [-1.0, 0.0], [-1.0, 0.0]]),
                true,
            );
        }
        if lt(a0, 0.0) && eq(ai, 0.0) {
            return row("glz:p=n/m,q=1,a0<0,aInf=0", SpaceDescriptor::SpecialY1 { a0 }, false);
        }
        if a0 >= 0.0 && eq(ai, 0.0) {
            return row("glz:p=n/m,q=1,a0>=0,aInf=0", SpaceDescriptor::linfty(), false);
        }
    }
    if q < INF && gt(a0, r) && gt(ai, r) {
        return row(
            "glz:p=n/m,q<inf,a0>1/q',aInf>1/q'",
            SpaceDescriptor::SpecialY2 { q, a_inf: ai },
            true,
        );
    }
    if q > 1.0 && eq(a0, r) && gt(ai, r) {
        return row(
            "glz:p=n/m,q>1,a0=1/q',aInf>1/q'",
            SpaceDescriptor::lz(INF, q, vec![[-1.0 / q, ai - 1.0], [-1.0, 0.0]]),
            true,
        );
    }
    if q == INF && gt(a0, 1.0) && gt(ai, 1.0) {
        return row(
            "glz:p=n/m,q=inf,a0>1,aInf>1",
            SpaceDescriptor::lz(INF, INF, vec![[0.0, ai - 1.0]]),
            true,
        );
    }
    Err(not_covered())
}

/// Near-zero and near-infinity rows of the Orlicz–Zygmund table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrliczRow {
    pub zero_id: String,
    pub near_zero: YoungSpec,
    pub infinity_id: String,
    pub near_infinity: YoungSpec,
}

pub fn orlicz_case_table(p0: f64, p_inf: f64, a0: f64, a_inf: f64, m: usize, n: usize) -> Result<OrliczRow> {
    check_mn(m, n)?;
    let (mf, nf) = (m as f64, n as f64);
    let crit = nf / mf;
    let edge = (nf - mf) / mf;
    let not_covered = |side: &str| {
        Error::NotCovered(format!(
            "(p₀, p∞, α₀, α∞) = ({p0}, {p_inf}, {a0}, {a_inf}) with m = {m}, n = {n}: no Orlicz table row near {side}"
        ))
    };
    let power_row = |p: f64, a: f64| YoungSpec::power_log(nf * p / (nf - mf * p), nf * a / (nf - mf * p));
    let p0_crit = is_crit(p0, m, n);
    let (zero_id, near_zero) = if (p0 == 1.0 && a0 <= 0.0) || (p0 > 1.0 && p0 < crit && !p0_crit) {
        ("orlicz-zero:power-log", power_row(p0, a0))
    } else if p0_crit && a0 > edge && !approx_eq(a0, edge) {
        (
            "orlicz-zero:exp",
            YoungSpec::exp_decay_at_zero(nf / (nf - (1.0 + a0) * mf)),
        )
    } else {
        return Err(not_covered("zero"));
    };
    let pi_crit = is_crit(p_inf, m, n);
    let (infinity_id, near_infinity) = if !(p_inf >= 1.0) || p_inf.is_infinite() {
        return Err(not_covered("infinity"));
    } else if (p_inf == 1.0 && a_inf >= 0.0) || (p_inf > 1.0 && p_inf < crit && !pi_crit) {
        ("orlicz-inf:power-log", power_row(p_inf, a_inf))
    } else if pi_crit && approx_eq(a_inf, edge) {
        ("orlicz-inf:double-exp", YoungSpec::exp_growth(nf / (nf - mf), true))
    } else if pi_crit && a_inf < edge {
        (
            "orlicz-inf:exp",
            YoungSpec::exp_growth(nf / (nf - (1.0 + a_inf) * mf), false),
        )
    } else if (pi_crit && a_inf > edge) || p_inf > crit {
        ("orlicz-inf:bounded", YoungSpec::Linfty)
    } else {
        return Err(not_covered("infinity"));
    };
    Ok(OrliczRow {
        zero_id: zero_id.into(),
        near_zero,
        infinity_id: infinity_id.into(),
        near_infinity,
    })
}

/// `L(n/m, 1, E_m)`, intersected with `L^∞` when `∫^∞ (s/A(s))^{m/(n-m)}` converges.
pub fn em_target(a: &YoungSpec, m: usize, n: usize, grid: &Grid) -> Result<(String, SpaceDescriptor)> {
    let cond = condition_a(a, m, n)?;
    let e = build_em(a, m, n, grid)?;
    let ol = SpaceDescriptor::OrliczLorentz {
        p: n as f64 / m as f64,
        q: 1.0,
        young: e,
    };
    Ok(match cond.near_infinity {
        Convergence::Converges => (
            "orlicz-lorentz:E_m,cap-linfty".into(),
            SpaceDescriptor::IntersectionWithLinfty { inner: Box::new(ol) },
        ),
        _ => ("orlicz-lorentz:E_m".into(), ol),
    })
}

/// Target for a source space, from the tables when the family is covered.
pub fn resolve_target(source: &SpaceDescriptor, m: usize, n: usize, grid: &Grid) -> Result<TargetSpec> {
    check_mn(m, n)?;
    source.validate()?;
    let table = |row: CaseRow| TargetSpec {
        source: source.clone(),
        m,
        n,
        target: Some(row.target),
        provenance: Provenance::CaseTable,
        row_id: Some(row.row_id),
        unique: Some(row.unique),
    };
    match source {
        SpaceDescriptor::Lebesgue { p } if *p < n as f64 / m as f64 && !is_crit(*p, m, n) => {
            Ok(table(glz_case_table(*p, *p, &[], m, n)?))
        }
        SpaceDescriptor::Lorentz { p, q } => Ok(table(glz_case_table(*p, *q, &[], m, n)?)),
        SpaceDescriptor::LorentzZygmund { p, q, layers } => Ok(table(glz_case_table(*p, *q, layers, m, n)?)),
        SpaceDescriptor::Orlicz { young } => {
            let (id, target) = em_target(young, m, n, grid)?;
            Ok(TargetSpec {
                source: source.clone(),
                m,
                n,
                target: Some(target),
                provenance: Provenance::CaseTable,
                row_id: Some(id),
                unique: Some(true),
            })
        }
        _ => {
            if admissibility(source, m, n)? == Decision::No {
                return Err(Error::domain(format!(
                    "{} is not admissible: t^(m/n-1) χ_(1,∞) is not in its associate space",
                    source.label()
                )));
            }
            Ok(TargetSpec {
                source: source.clone(),
                m,
                n,
                target: None,
                provenance: Provenance::DualOracle,
                row_id: None,
                unique: None,
            })
        }
    }
}

/// Target dual route on demand: `σ_m'` lower bound regardless of the tables.
pub fn oracle_spec(source: &SpaceDescriptor, m: usize, n: usize) -> TargetSpec {
    TargetSpec {
        source: source.clone(),
        m,
        n,
        target: None,
        provenance: Provenance::DualOracle,
        row_id: None,
        unique: None,
    }
}

/// `‖g‖_{X^m}`; for the dual route a certified lower bound.
pub fn target_norm(gstar: &Profile, spec: &TargetSpec, grid: &Grid) -> Result<f64> {
    if gstar.is_zero() {
        return Ok(0.0);
    }
    match (&spec.target, spec.provenance) {
        (Some(t), Provenance::CaseTable) => ri_norm(gstar, t, grid),
        _ => {
            let (m, n, x) = (spec.m, spec.n, &spec.source);
            let norm = |f: &Profile| sigma_m_with(f, x, m, n, grid, true);
            Ok(dual_lower_bound_by(gstar, &norm, 1.0, 64, grid))
        }
    }
}

/// `∫_0^∞ f` with the profile's declared tails (helper for callers).
pub fn total_integral(f: &Profile, grid: &Grid) -> f64 {
    let ev = |t: f64| f.eval(t);
    let ig = Integrand::new(&ev)
        .breaks(f.breakpoints())
        .tails(f.tail_zero(), f.tail_inf());
    integrate(&ig, grid).value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility_examples() {
        let (m, n) = (1, 3);
        assert_eq!(admissibility(&SpaceDescriptor::lebesgue(2.0), m, n).unwrap(), Decision::Yes);
        assert_eq!(admissibility(&SpaceDescriptor::lorentz(3.0, 1.0), m, n).unwrap(), Decision::Yes);
        assert_eq!(admissibility(&SpaceDescriptor::lebesgue(3.0), m, n).unwrap(), Decision::No);
        assert_eq!(admissibility(&SpaceDescriptor::lorentz(3.0, 2.0), m, n).unwrap(), Decision::No);
    }

    #[test]
    fn sigma_examples() {
        let g = Grid::default();
        let l1 = SpaceDescriptor::lebesgue(1.0);
        for (n, a) in [(2usize, 4.0f64), (3, 0.5)] {
            let v = sigma_m(&Profile::indicator(a), &l1, 1, n, &g).unwrap();
            let ex = a.powf(1.0 / n as f64);
            assert!((v - ex).abs() < 1e-9 * ex, "{v} vs {ex}");
        }
        assert_eq!(sigma_m(&Profile::zero(), &l1, 1, 3, &g).unwrap(), 0.0);
        let f = Profile::power_on(1.0, -0.5, 1.0);
        let fs = maximal_profile(&f, &g);
        for t in [0.01f64, 0.5, 0.99] {
            let ex = 2.0 / t.sqrt();
            assert!((fs.eval(t) - ex).abs() < 1e-8 * ex);
        }
        // sup of t^{1/n} f**: t^{1/3}·2t^{-1/2} decreases on (0,1), t^{1/3}·2/t after: maximum is ∞ at 0⁺
        assert_eq!(sigma_m(&f, &l1, 1, 3, &g).unwrap(), INF);
        let v = sigma_m(&f, &l1, 1, 2, &g).unwrap();
        assert!((v - 2.0).abs() < 1e-7, "{v}");
    }

    #[test]
    fn first_rows() {
        let r = glz_case_table(1.0, 1.0, &[[0.0, 0.0]], 1, 3).unwrap();
        assert_eq!(r.target, SpaceDescriptor::lorentz(1.5, 1.0));
        let r = glz_case_table(3.0, 1.0, &[[0.0, 0.0]], 1, 3).unwrap();
        assert_eq!((r.target, r.unique), (SpaceDescriptor::linfty(), false));
        let r = glz_case_table(3.0, 2.0, &[[0.5, 2.0]], 1, 3).unwrap();
        assert_eq!(r.target, SpaceDescriptor::lz(INF, 2.0, vec![[-0.5, 1.0], [-1.0, 0.0]]));
        assert!(matches!(glz_case_table(3.0, 2.0, &[[0.0, 0.0]], 1, 3), Err(Error::NotCovered(_))));
    }

    #[test]
    fn orlicz_rows() {
        let r = orlicz_case_table(1.0, 1.0, 0.0, 0.0, 1, 3).unwrap();
        assert_eq!(r.near_zero, YoungSpec::power_log(1.5, 0.0));
        let r = orlicz_case_table(1.0, 3.0, 0.0, 2.0, 1, 3).unwrap();
        assert_eq!(r.infinity_id, "orlicz-inf:double-exp");
        let r = orlicz_case_table(1.0, 5.0, 0.0, 0.0, 1, 3).unwrap();
        assert_eq!(r.near_infinity, YoungSpec::Linfty);
    }

    #[test]
    fn em_targets() {
        let g = Grid::default();
        let (id, t) = em_target(&YoungSpec::power(1.0), 1, 3, &g).unwrap();
        assert_eq!(id, "orlicz-lorentz:E_m");
        assert!(matches!(t, SpaceDescriptor::OrliczLorentz { .. }));
        let (id, t) = em_target(&YoungSpec::linear_then_power(4.0), 1, 3, &g).unwrap();
        assert_eq!(id, "orlicz-lorentz:E_m,cap-linfty");
        assert!(matches!(t, SpaceDescriptor::IntersectionWithLinfty { .. }));
        assert!(em_target(&YoungSpec::power(3.0), 1, 3, &g).is_err());
    }
}
