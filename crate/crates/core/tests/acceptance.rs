//! One PASS/FAIL line per acceptance criterion, written straight to stdout
//! so it shows up without `--nocapture`.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rinorm::harness::*;
use rinorm::optimal_target::*;
use rinorm::orlicz::{sobolev_young_transform, YoungSpec};
use rinorm::profile::Profile;
use rinorm::quadrature::Grid;
use rinorm::rearrange::*;
use rinorm::ri_norms::{conjugate, ri_norm, SpaceDescriptor};

const INF: f64 = f64::INFINITY;

fn report(id: usize, what: &str, ok: bool, detail: String) {
    let tag = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{tag} criterion {id}: {what} ({detail})");
    let _ = out.flush();
    assert!(ok, "criterion {id} failed: {detail}");
}

fn g() -> Grid {
    Grid::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

/// Sort-free layout: each level starts after the total weight of strictly larger levels.
fn oracle_levels(atoms: &[(f64, f64)]) -> Vec<(f64, f64, f64)> {
    let live: Vec<(f64, f64)> = atoms.iter().map(|&(v, w)| (v.abs(), w)).filter(|a| a.0 > 0.0 && a.1 > 0.0).collect();
    let mut levels: Vec<f64> = live.iter().map(|a| a.0).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    levels
        .into_iter()
        .map(|v| {
            let start: f64 = live.iter().filter(|a| a.0 > v).map(|a| a.1).sum();
            let width: f64 = live.iter().filter(|a| a.0 == v).map(|a| a.1).sum();
            (v, start, start + width)
        })
        .collect()
}

#[test]
fn criterion_01_rearrangement_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut bad = 0;
    for _ in 0..1000 {
        let k = rng.gen_range(1..=50);
        let pool: Vec<f64> = (0..4).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let atoms: Vec<(f64, f64)> = (0..k)
            .map(|_| {
                let v = match rng.gen_range(0..4) {
                    0 => pool[rng.gen_range(0..pool.len())],
                    1 => 0.0,
                    _ => rng.gen_range(-10.0..10.0),
                };
                let w = if rng.gen_bool(0.05) { 0.0 } else { rng.gen_range(0.0..3.0) };
                (v, w)
            })
            .collect();
        let f = SampledFunction::new(atoms.clone());
        let s = decreasing_rearrangement(&f);
        let levels = oracle_levels(&atoms);
        let mut ok = s.values.len() == levels.len();
        for (i, &(v, lo, hi)) in levels.iter().enumerate() {
            ok &= s.values.get(i) == Some(&v);
            ok &= (s.breakpoints[i] - lo).abs() <= 8.0 * f64::EPSILON * hi;
            ok &= (s.breakpoints[i + 1] - hi).abs() <= 8.0 * f64::EPSILON * hi;
            ok &= s.eval(0.5 * (lo + hi)) == v || hi - lo <= 16.0 * f64::EPSILON * hi;
            for lam in [v, v * (1.0 - 1e-9)] {
                ok &= (distribution_function(&f, lam) - s.measure_above(lam)).abs() <= 1e-12 * (1.0 + hi);
            }
        }
        let end = levels.last().map_or(0.0, |l| l.2);
        ok &= s.eval(end * 1.01 + 1.0) == 0.0;
        ok &= (distribution_function(&f, 0.0) - s.measure_above(0.0)).abs() <= 1e-12 * (1.0 + end);
        bad += usize::from(!ok);
    }
    let t = start.elapsed();
    report(
        1,
        "rearrangement matches brute-force oracle",
        bad == 0 && t < Duration::from_secs(5),
        format!("{bad}/1000 mismatches, {}", secs(t)),
    );
}

#[test]
fn criterion_02_lorentz_closed_form() {
    let mut worst: f64 = 0.0;
    for p in [1.0, 1.5, 2.0, 4.0, 7.0] {
        for q in [1.0, 1.5, 2.0, 4.0, 7.0] {
            for a in [0.01, 0.5, 1.0, 3.0, 100.0] {
                let v = ri_norm(&Profile::indicator(a), &SpaceDescriptor::lorentz(p, q), &g()).unwrap();
                worst = worst.max(rel(v, (p / q).powf(1.0 / q) * a.powf(1.0 / p)));
            }
        }
    }
    report(2, "Lorentz norms of indicators", worst <= 1e-6, format!("worst relative error {worst:.2e}"));
}

#[test]
fn criterion_03_young_power_law() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut finite = 0;
    for (n, m, p) in [(3usize, 1usize, 1.0f64), (3, 1, 2.0), (4, 2, 1.0)] {
        let r = sobolev_young_transform(&YoungSpec::power(p), m, n, &g()).unwrap();
        let want = 2f64.powf(n as f64 * p / (n as f64 - m as f64 * p));
        for j in -40..=40 {
            let t = 10f64.powf(j as f64 / 20.0);
            let q = r.a_m.eval(2.0 * t) / r.a_m.eval(t);
            if q.is_finite() {
                finite += 1;
                worst = worst.max(rel(q, want));
            }
        }
    }
    let t = start.elapsed();
    report(
        3,
        "A_m(2t)/A_m(t) matches the table exponent",
        worst <= 5e-3 && finite == 3 * 81 && t < Duration::from_secs(10),
        format!("worst relative error {worst:.2e} over {finite} points, {}", secs(t)),
    );
}

#[test]
fn criterion_04_hardy_constant() {
    let fam: Vec<Profile> = [0.1, 1.0, 10.0].iter().map(|&a| Profile::indicator(a)).collect();
    let r = hardy_check(&SpaceDescriptor::lebesgue(1.0), &SpaceDescriptor::lorentz(1.5, 1.0), &fam, 3, &g()).unwrap();
    let ratios: Vec<f64> = r.ratios.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
    let ok = ratios.iter().all(|v| (v - 1.5).abs() <= 1e-3);
    report(4, "Hardy-type ratio L¹ → L^{3/2,1}, n = 3", ok, format!("ratios {ratios:?}"));
}

#[test]
fn criterion_05_endpoint_identity() {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in [2usize, 3] {
        let fam: Vec<Profile> = (0..20)
            .map(|i| match i % 4 {
                0 => Profile::indicator(0.5 + i as f64),
                1 => Profile::exp_decay(1.0 + i as f64 * 0.1, 0.2 + 0.05 * i as f64),
                2 => Profile::power_on(1.0, -0.3, 1.0 + i as f64),
                _ => Profile::Step(decreasing_rearrangement(&SampledFunction::new(vec![
                    (3.0, 0.5),
                    (1.0 + i as f64 * 0.1, 2.0),
                    (0.2, i as f64),
                ]))),
            })
            .collect();
        let r = hardy_check(&SpaceDescriptor::lorentz(n as f64, 1.0), &SpaceDescriptor::linfty(), &fam, n, &g()).unwrap();
        for v in r.ratios.iter().flatten() {
            count += 1;
            worst = worst.max((v - 1.0).abs());
        }
    }
    report(
        5,
        "Hardy endpoint L^{n,1} → L^∞ identity",
        worst <= 1e-6 && count == 40,
        format!("{count} profiles, worst deviation {worst:.2e}"),
    );
}

#[test]
fn criterion_06_dilation_invariance() {
    let start = Instant::now();
    let u = make_test_function(TestKind::Gaussian, 2).unwrap();
    let dil: Vec<f64> = (-3..=3).map(|k| 2f64.powi(k)).collect();
    let mut ok = true;
    let mut details = vec![];
    for (x, target) in [
        (SpaceDescriptor::lorentz(2.0, 1.0), SpaceDescriptor::linfty()),
        (SpaceDescriptor::lebesgue(1.5), SpaceDescriptor::lorentz(6.0, 1.5)),
    ] {
        let spec = resolve_target(&x, 1, 2, &g()).unwrap();
        ok &= spec.target.as_ref() == Some(&target);
        let ratios: Vec<f64> = dilation_sweep(&u, &x, &spec, 1, 64, &dil, &g())
            .into_iter()
            .map(|r| r.map_or(f64::NAN, |row| row.ratio))
            .collect();
        let (lo, hi) = ratios.iter().fold((INF, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        let spread = (hi - lo) / lo;
        ok &= ratios.iter().all(|r| r.is_finite() && *r > 0.0) && spread <= 5e-3;
        details.push(format!("{} spread {spread:.2e}", x.label()));
    }
    let t = start.elapsed();
    ok &= t < Duration::from_secs(60);
    details.push(secs(t));
    report(6, "Poincaré ratio invariant under dilation", ok, details.join(", "));
}

#[test]
fn criterion_07_ball_mean_limit() {
    let mut worst: f64 = 0.0;
    for c in [-2.0, 0.0, 5.0] {
        let u = make_test_function(TestKind::Gaussian, 2).unwrap().with_offset(c);
        let p = find_polynomial(&u, 1, 64, &g()).unwrap();
        worst = worst.max((p.constant - c).abs());
    }
    report(7, "ball-mean limit recovers the offset at K = 64", worst <= 1e-4, format!("worst |limit - c| {worst:.2e}"));
}

#[test]
fn criterion_08_case_tables() {
    let (m, n) = (1, 3);
    let lz = SpaceDescriptor::lz;
    let glz: [(f64, f64, [f64; 2], &str, SpaceDescriptor, bool); 8] = [
        (2.0, 2.0, [0.5, -1.0], "glz:p<n/m", lz(6.0, 2.0, vec![[0.5, -1.0]]), true),
        (3.0, 2.0, [0.0, 1.0], "glz:p=n/m,a0<1/q',aInf>1/q'", lz(INF, 2.0, vec![[-1.0, 0.0]]), true),
        (
            3.0,
            1.0,
            [0.0, 0.5],
            "glz:p=n/m,q=1,a0=0,aInf>0",
            lz(INF, 1.0, vec![[-1.0, -0.5], [-1.0, 0.0], [-1.0, 0.0]]),
            true,
        ),
        (3.0, 1.0, [-1.0, 0.0], "glz:p=n/m,q=1,a0<0,aInf=0", SpaceDescriptor::SpecialY1 { a0: -1.0 }, false),
        (3.0, 1.0, [0.5, 0.0], "glz:p=n/m,q=1,a0>=0,aInf=0", SpaceDescriptor::linfty(), false),
        (
            3.0,
            2.0,
            [1.0, 1.0],
            "glz:p=n/m,q<inf,a0>1/q',aInf>1/q'",
            SpaceDescriptor::SpecialY2 { q: 2.0, a_inf: 1.0 },
            true,
        ),
        (3.0, 2.0, [0.5, 2.0], "glz:p=n/m,q>1,a0=1/q',aInf>1/q'", lz(INF, 2.0, vec![[-0.5, 1.0], [-1.0, 0.0]]), true),
        (3.0, INF, [2.0, 3.0], "glz:p=n/m,q=inf,a0>1,aInf>1", lz(INF, INF, vec![[0.0, 2.0]]), true),
    ];
    let mut misses = vec![];
    for (p, q, layer, id, target, unique) in glz {
        match glz_case_table(p, q, &[layer], m, n) {
            Ok(r) if r.row_id == id && r.target == target && r.unique == unique => {}
            other => misses.push(format!("{id}: {other:?}")),
        }
    }
    let pl = YoungSpec::power_log;
    let orl: [(f64, f64, f64, f64, &str, YoungSpec, &str, YoungSpec); 4] = [
        (1.0, 1.0, 0.0, 0.5, "orlicz-zero:power-log", pl(1.5, 0.0), "orlicz-inf:power-log", pl(1.5, 0.75)),
        (
            3.0,
            3.0,
            3.0,
            1.0,
            "orlicz-zero:exp",
            YoungSpec::exp_decay_at_zero(-3.0),
            "orlicz-inf:exp",
            YoungSpec::exp_growth(3.0, false),
        ),
        (2.0, 3.0, 1.0, 2.0, "orlicz-zero:power-log", pl(6.0, 3.0), "orlicz-inf:double-exp", YoungSpec::exp_growth(1.5, true)),
        (1.0, 4.0, -1.0, 0.0, "orlicz-zero:power-log", pl(1.5, -1.5), "orlicz-inf:bounded", YoungSpec::Linfty),
    ];
    let mut ids = std::collections::BTreeSet::new();
    for (p0, pi, a0, ai, zid, z, iid, inf) in orl {
        match orlicz_case_table(p0, pi, a0, ai, m, n) {
            Ok(r) if r.zero_id == zid && r.near_zero == z && r.infinity_id == iid && r.near_infinity == inf => {
                ids.insert(r.zero_id);
                ids.insert(r.infinity_id);
            }
            other => misses.push(format!("({p0},{pi},{a0},{ai}): {other:?}")),
        }
    }
    report(
        8,
        "case tables reproduce every row",
        misses.is_empty() && ids.len() == 6,
        format!("12 tuples, {} Orlicz row ids, misses {misses:?}", ids.len()),
    );
}

#[test]
fn criterion_09_admissibility_boundary() {
    let mut misses = vec![];
    for (m, n) in [(1usize, 2usize), (1, 3), (2, 3), (1, 4), (2, 5), (3, 4)] {
        let crit = n as f64 / m as f64;
        let mut cases = vec![(SpaceDescriptor::lorentz(crit, 1.0), Decision::Yes), (SpaceDescriptor::lebesgue(crit), Decision::No)];
        for k in 0..8 {
            let p = 1.0 + crit * k as f64 / 7.0;
            // ∫_1^∞ t^{(m/n-1)p'} dt < ∞ iff (m/n - 1)p' < -1
            let pc = conjugate(p);
            let converges = pc.is_infinite() || (m as f64 / n as f64 - 1.0) * pc < -1.0 && (p - crit).abs() > 1e-12;
            cases.push((SpaceDescriptor::lebesgue(p), if converges { Decision::Yes } else { Decision::No }));
        }
        for (x, want) in cases {
            let got = admissibility(&x, m, n).unwrap();
            if got != want {
                misses.push(format!("{} m={m} n={n}: {got:?}", x.label()));
            }
        }
    }
    report(9, "admissibility boundary", misses.is_empty(), format!("misses {misses:?}"));
}

#[test]
fn criterion_10_invariant_suites() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_rinorm"))
        .args(["selftest", "--seed", "2024"])
        .env_remove("RINORM_GRID")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<Vec<String>> = text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    let names = ["lattice", "homogeneity", "holder", "subadditivity", "luxemburg"];
    let ok = out.status.success()
        && rows.len() == names.len()
        && rows.iter().all(|r| r[2] == "0" && r[1] == "500")
        && names.iter().all(|n| rows.iter().any(|r| r[0].contains(n)));
    let summary: Vec<String> = rows.iter().map(|r| format!("{} {}/{}", r[0], r[2], r[1])).collect();
    report(
        10,
        "invariant suites, 500 cases each",
        ok,
        format!("exit {:?}, violations {}", out.status.code(), summary.join(", ")),
    );
}
