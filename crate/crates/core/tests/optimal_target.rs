use rinorm::error::Error;
use rinorm::optimal_target::*;
use rinorm::orlicz::YoungSpec;
use rinorm::profile::Profile;
use rinorm::quadrature::Grid;
use rinorm::ri_norms::{conjugate, SpaceDescriptor};

const INF: f64 = f64::INFINITY;

fn g() -> Grid {
    Grid::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn admissibility_examples() {
    for (m, n) in [(1, 2), (1, 3), (2, 5), (3, 4)] {
        let crit = n as f64 / m as f64;
        for p in [1.0, 0.5 * (1.0 + crit), crit * 0.999] {
            assert_eq!(admissibility(&SpaceDescriptor::lebesgue(p), m, n).unwrap(), Decision::Yes);
        }
        assert_eq!(admissibility(&SpaceDescriptor::lorentz(crit, 1.0), m, n).unwrap(), Decision::Yes);
        assert_eq!(admissibility(&SpaceDescriptor::lebesgue(crit), m, n).unwrap(), Decision::No);
    }
    assert!(admissibility(&SpaceDescriptor::lebesgue(2.0), 2, 2).is_err());
    let multi = SpaceDescriptor::lz(3.0, 1.0, vec![[0.0, 0.0], [1.0, 1.0]]);
    assert_eq!(admissibility(&multi, 1, 3).unwrap(), Decision::Undetermined);
}

#[test]
fn sigma_examples() {
    let l1 = SpaceDescriptor::lebesgue(1.0);
    for (n, a) in [(2usize, 0.3f64), (3, 1.0), (4, 20.0)] {
        let v = sigma_m(&Profile::indicator(a), &l1, 1, n, &g()).unwrap();
        assert!(rel(v, a.powf(1.0 / n as f64)) < 1e-9);
    }
    assert_eq!(sigma_m(&Profile::zero(), &l1, 1, 3, &g()).unwrap(), 0.0);
    // t^{1/2}·2t^{-1/2} = 2 on (0,1), t^{1/2}·2/t after: sup 2.
    let v = sigma_m(&Profile::power_on(1.0, -0.5, 1.0), &l1, 1, 2, &g()).unwrap();
    assert!((v - 2.0).abs() < 1e-7);
    let lz = SpaceDescriptor::lz(2.0, 2.0, vec![[1.0, 1.0]]);
    assert!(sigma_m(&Profile::indicator(1.0), &lz, 1, 3, &g()).is_err());
    let v = sigma_m_with(&Profile::indicator(1.0), &lz, 1, 3, &g(), true).unwrap();
    assert!(v.is_finite() && v > 0.0);
}

#[test]
fn sigma_finite_iff_admissible() {
    let (mut yes, mut no) = (0, 0);
    for (m, n) in [(1, 2), (1, 3), (2, 3), (2, 5)] {
        let crit = n as f64 / m as f64;
        let mut corpus = vec![];
        for p in [1.0, 1.2, 0.5 * (1.0 + crit), crit, crit + 0.7] {
            corpus.push(SpaceDescriptor::lebesgue(p));
            for q in [1.0, 1.5, p, INF] {
                if p > 1.0 {
                    corpus.push(SpaceDescriptor::lorentz(p, q));
                }
            }
        }
        for x in corpus {
            let d = admissibility(&x, m, n).unwrap();
            let s = sigma_m(&Profile::indicator(1.0), &x, m, n, &g()).unwrap_or_else(|e| panic!("{} m={m} n={n}: {e}", x.label()));
            match d {
                Decision::Yes => {
                    yes += 1;
                    assert!(s.is_finite(), "{} m={m} n={n}: σ = {s}", x.label());
                }
                Decision::No => {
                    no += 1;
                    assert_eq!(s, INF, "{} m={m} n={n}", x.label());
                }
                Decision::Undetermined => panic!("{} undetermined", x.label()),
            }
        }
    }
    assert!(yes > 10 && no > 10);
}

#[test]
fn target_examples() {
    for (n, p) in [(3usize, 1.5f64), (2, 1.2), (4, 2.0)] {
        let spec = resolve_target(&SpaceDescriptor::lebesgue(p), 1, n, &g()).unwrap();
        let ps = n as f64 * p / (n as f64 - p);
        assert_eq!(spec.target, Some(SpaceDescriptor::lorentz(ps, p)));
        assert_eq!((spec.provenance, spec.row_id.as_deref()), (Provenance::CaseTable, Some("glz:p<n/m")));
        let v = target_norm(&Profile::indicator(1.0), &spec, &g()).unwrap();
        assert!(rel(v, (ps / p).powf(1.0 / p)) < 1e-9);
        assert_eq!(target_norm(&Profile::zero(), &spec, &g()).unwrap(), 0.0);
    }
    for n in [2usize, 3] {
        let spec = resolve_target(&SpaceDescriptor::lorentz(n as f64, 1.0), 1, n, &g()).unwrap();
        assert_eq!(spec.target, Some(SpaceDescriptor::linfty()));
        let v = target_norm(&Profile::exp_decay(2.5, 1.0), &spec, &g()).unwrap();
        assert!(rel(v, 2.5) < 1e-12);
    }
    let spec = resolve_target(&SpaceDescriptor::lz(2.0, 2.0, vec![[0.0, 0.0], [1.0, 1.0]]), 1, 3, &g());
    assert!(matches!(spec, Err(Error::NotCovered(_))));
    let spec = resolve_target(&SpaceDescriptor::Orlicz { young: YoungSpec::power(1.0) }, 1, 3, &g()).unwrap();
    assert_eq!(spec.row_id.as_deref(), Some("orlicz-lorentz:E_m"));
}

#[test]
fn glz_examples() {
    for (m, n) in [(1, 2), (1, 3), (2, 5)] {
        let (mf, nf) = (m as f64, n as f64);
        let r = glz_case_table(1.0, 1.0, &[[0.0, 0.0]], m, n).unwrap();
        assert_eq!(r.target, SpaceDescriptor::lorentz(nf / (nf - mf), 1.0));
        let r = glz_case_table(nf / mf, 1.0, &[[0.0, 0.0]], m, n).unwrap();
        assert_eq!((r.target, r.unique), (SpaceDescriptor::linfty(), false));
        let r = glz_case_table(nf / mf, 2.0, &[[0.5, 2.0]], m, n).unwrap();
        assert_eq!(r.target, SpaceDescriptor::lz(INF, 2.0, vec![[-0.5, 1.0], [-1.0, 0.0]]));
    }
    assert!(matches!(glz_case_table(4.0, 1.0, &[[0.0, 0.0]], 1, 3), Err(Error::NotCovered(_))));
    let e = glz_case_table(1.0, 2.0, &[[0.0, 0.0]], 1, 3).unwrap_err();
    assert!(e.to_string().contains("no row"));
}

#[test]
fn orlicz_examples() {
    for (m, n) in [(1, 2), (1, 3), (2, 5)] {
        let (mf, nf) = (m as f64, n as f64);
        let r = orlicz_case_table(1.0, 1.0, 0.0, 0.0, m, n).unwrap();
        assert_eq!(r.near_zero, YoungSpec::power_log(nf / (nf - mf), 0.0));
        let r = orlicz_case_table(1.0, nf / mf, 0.0, (nf - mf) / mf, m, n).unwrap();
        assert_eq!(r.near_infinity, YoungSpec::exp_growth(nf / (nf - mf), true));
        let r = orlicz_case_table(1.0, nf / mf + 0.5, 0.0, -3.0, m, n).unwrap();
        assert_eq!((r.infinity_id.as_str(), r.near_infinity), ("orlicz-inf:bounded", YoungSpec::Linfty));
    }
    assert!(orlicz_case_table(2.0, 1.0, 0.0, 0.0, 1, 3).is_ok());
    assert!(matches!(orlicz_case_table(3.0, 1.0, 0.0, 0.0, 1, 3), Err(Error::NotCovered(_))));
    assert!(matches!(orlicz_case_table(1.0, 1.0, 0.0, -1.0, 1, 3), Err(Error::NotCovered(_))));
}

#[test]
fn em_examples() {
    let (id, t) = em_target(&YoungSpec::power(1.0), 1, 3, &g()).unwrap();
    assert_eq!(id, "orlicz-lorentz:E_m");
    assert!(matches!(t, SpaceDescriptor::OrliczLorentz { q, .. } if q == 1.0));
    let (id, t) = em_target(&YoungSpec::linear_then_power(4.0), 1, 3, &g()).unwrap();
    assert_eq!(id, "orlicz-lorentz:E_m,cap-linfty");
    assert!(matches!(t, SpaceDescriptor::IntersectionWithLinfty { .. }));
    assert!(em_target(&YoungSpec::power(3.0), 1, 3, &g()).is_err());
    assert!(em_target(&YoungSpec::power(2.5), 2, 5, &g()).is_err());
}

/// Which rows of the Lorentz–Zygmund target table contain `(p, q, α₀, α∞)`.
fn rows_containing(p: f64, q: f64, a0: f64, ai: f64, m: usize, n: usize) -> Vec<&'static str> {
    let crit = n as f64 / m as f64;
    let r = 1.0 / conjugate(q);
    let mut out = vec![];
    if (p == 1.0 && q == 1.0 && a0 >= 0.0 && ai <= 0.0) || (p > 1.0 && p < crit) {
        out.push("glz:p<n/m");
    }
    if p == crit {
        if a0 < r && ai > r {
            out.push("glz:p=n/m,a0<1/q',aInf>1/q'");
        }
        if q == 1.0 && a0 == 0.0 && ai > 0.0 {
            out.push("glz:p=n/m,q=1,a0=0,aInf>0");
        }
        if q == 1.0 && a0 < 0.0 && ai == 0.0 {
            out.push("glz:p=n/m,q=1,a0<0,aInf=0");
        }
        if q == 1.0 && a0 >= 0.0 && ai == 0.0 {
            out.push("glz:p=n/m,q=1,a0>=0,aInf=0");
        }
        if q < INF && a0 > r && ai > r {
            out.push("glz:p=n/m,q<inf,a0>1/q',aInf>1/q'");
        }
        if q > 1.0 && a0 == r && ai > r {
            out.push("glz:p=n/m,q>1,a0=1/q',aInf>1/q'");
        }
        if q == INF && a0 > 1.0 && ai > 1.0 {
            out.push("glz:p=n/m,q=inf,a0>1,aInf>1");
        }
    }
    out
}

#[test]
fn table_totality() {
    let mut seen = std::collections::BTreeSet::new();
    let mut count = 0;
    for (m, n) in [(1usize, 2usize), (1, 4)] {
        let crit = n as f64 / m as f64;
        for p in [1.0, 0.5 * (1.0 + crit), crit, crit + 1.0] {
            for q in [1.0, 2.0, INF] {
                for a0 in [-1.0, 0.0, 0.5, 1.0, 2.0] {
                    for ai in [0.0, 0.5, 2.0] {
                        count += 1;
                        let want = rows_containing(p, q, a0, ai, m, n);
                        assert!(want.len() <= 1, "overlapping rows {want:?}");
                        match glz_case_table(p, q, &[[a0, ai]], m, n) {
                            Ok(row) => {
                                assert_eq!(want, vec![row.row_id.as_str()], "({p},{q},{a0},{ai}) m={m} n={n}");
                                assert_eq!(row.unique, !(p == crit && q == 1.0 && ai == 0.0));
                                seen.insert(row.row_id);
                            }
                            Err(Error::NotCovered(_)) => assert!(want.is_empty(), "({p},{q},{a0},{ai}): expected {want:?}"),
                            Err(e) => panic!("unexpected error {e}"),
                        }
                    }
                }
            }
        }
    }
    assert!(count >= 200);
    assert_eq!(seen.len(), 8, "{seen:?}");
}

#[test]
fn monotone_in_m() {
    let n = 4;
    for m in 1..n {
        let crit = n as f64 / m as f64;
        let spec = resolve_target(&SpaceDescriptor::lorentz(crit, 1.0), m, n, &g()).unwrap();
        assert_eq!(spec.row_id.as_deref(), Some("glz:p=n/m,q=1,a0>=0,aInf=0"));
        assert_eq!((spec.target, spec.unique), (Some(SpaceDescriptor::linfty()), Some(false)));
        let p = 0.5 * (1.0 + crit);
        let spec = resolve_target(&SpaceDescriptor::lorentz(p, 1.0), m, n, &g()).unwrap();
        let ps = n as f64 * p / (n as f64 - m as f64 * p);
        assert_eq!(spec.target, Some(SpaceDescriptor::lorentz(ps, 1.0)));
        assert_eq!(spec.unique, Some(true));
    }
}

#[test]
fn two_routes() {
    let (n, p) = (3usize, 1.5f64);
    let x = SpaceDescriptor::lebesgue(p);
    let table = resolve_target(&x, 1, n, &g()).unwrap();
    let oracle = oracle_spec(&x, 1, n);
    let mut ratios = vec![];
    for a in [0.1, 1.0, 10.0] {
        let f = Profile::indicator(a);
        let closed = target_norm(&f, &table, &g()).unwrap();
        let lower = target_norm(&f, &oracle, &g()).unwrap();
        assert!(lower > 0.0 && lower <= closed * (1.0 + 1e-9), "a={a}: {lower} vs {closed}");
        ratios.push(closed / lower);
    }
    for r in &ratios {
        assert!(rel(*r, ratios[0]) <= 1e-3, "{ratios:?}");
    }
}
