//! Randomized invariant suites: lattice, homogeneity, Hölder pairing, `f**`
//! subadditivity and the Luxemburg bisection certificate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::orlicz::{luxemburg_norm, modular, YoungSpec};
use crate::profile::Profile;
use crate::quadrature::Grid;
use crate::rearrange::{decreasing_rearrangement, maximal_rearrangement_on, SampledFunction};
use crate::ri_norms::{associate_descriptor, pairing, ri_norm, Associate, SpaceDescriptor};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub violations: usize,
    /// Largest relative excess over the allowed slack, `0` when clean.
    pub worst_excess: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

const REL_SLACK: f64 = 1e-9;

fn random_atoms(rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let k = rng.gen_range(1..=12);
    (0..k)
        .map(|_| (10f64.powf(rng.gen_range(-2.0..1.0)), 10f64.powf(rng.gen_range(-3.0..3.0))))
        .collect()
}

fn step(atoms: Vec<(f64, f64)>) -> Profile {
    Profile::Step(decreasing_rearrangement(&SampledFunction::new(atoms)))
}

fn random_space(rng: &mut ChaCha8Rng) -> SpaceDescriptor {
    let p = rng.gen_range(1.0..5.0);
    let q = match rng.gen_range(0..3) {
        0 => 1.0,
        1 => rng.gen_range(1.0..5.0),
        _ => f64::INFINITY,
    };
    match rng.gen_range(0..5) {
        0 => SpaceDescriptor::lebesgue(if rng.gen_bool(0.2) { f64::INFINITY } else { p }),
        1 => SpaceDescriptor::lorentz(p.max(1.01), q),
        2 => SpaceDescriptor::lz(
            p.max(1.01),
            q,
            vec![[rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]],
        ),
        3 => SpaceDescriptor::lorentz(p.max(1.01), p.max(1.01)),
        _ => SpaceDescriptor::Orlicz {
            young: random_young(rng),
        },
    }
}

fn random_young(rng: &mut ChaCha8Rng) -> YoungSpec {
    match rng.gen_range(0..4) {
        0 => YoungSpec::power(rng.gen_range(1.0..4.0)),
        1 => YoungSpec::power_log(rng.gen_range(1.0..3.0), rng.gen_range(0.0..2.0)),
        2 => YoungSpec::linear_then_power(rng.gen_range(2.0..5.0)),
        _ => YoungSpec::exp_growth(rng.gen_range(0.5..2.0), false),
    }
}

fn excess(lhs: f64, rhs: f64, slack: f64) -> f64 {
    if lhs <= rhs * (1.0 + slack) + 1e-300 {
        0.0
    } else {
        (lhs - rhs) / rhs.abs().max(1e-300)
    }
}

fn summarize(name: &'static str, results: Vec<f64>) -> SuiteReport {
    SuiteReport {
        name,
        cases: results.len(),
        violations: results.iter().filter(|&&e| e > 0.0 || e.is_nan()).count(),
        worst_excess: results.iter().copied().fold(0.0, f64::max),
    }
}

/// `|f| ≤ |g|` implies `‖f‖_X ≤ ‖g‖_X`.
pub fn lattice_suite(seed: u64, cases: usize, grid: &Grid) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<_> = (0..cases)
        .map(|_| {
            let g = random_atoms(&mut rng);
            let f: Vec<_> = g.iter().map(|&(v, w)| (v * rng.gen_range(0.0..1.0), w)).collect();
            (step(f), step(g), random_space(&mut rng))
        })
        .collect();
    let r = inputs
        .par_iter()
        .map(|(f, g, x)| match (ri_norm(f, x, grid), ri_norm(g, x, grid)) {
            (Ok(a), Ok(b)) => excess(a, b, REL_SLACK),
            _ => f64::NAN,
        })
        .collect();
    summarize("lattice", r)
}

/// `‖c f‖_X = |c| ‖f‖_X`.
pub fn homogeneity_suite(seed: u64, cases: usize, grid: &Grid) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1);
    let inputs: Vec<_> = (0..cases)
        .map(|_| {
            let c = 10f64.powf(rng.gen_range(-2.0..2.0));
            (step(random_atoms(&mut rng)), c, random_space(&mut rng))
        })
        .collect();
    let r = inputs
        .par_iter()
        .map(|(f, c, x)| match (ri_norm(&f.scaled(*c), x, grid), ri_norm(f, x, grid)) {
            (Ok(a), Ok(b)) => {
                let d = (a - c * b).abs() / (c * b).max(1e-300);
                if d <= REL_SLACK {
                    0.0
                } else {
                    d
                }
            }
            _ => f64::NAN,
        })
        .collect();
    summarize("homogeneity", r)
}

/// `∫ f* g* ≤ ‖f‖_X ‖g‖_{X'}` with the tabulated associate.
pub fn holder_suite(seed: u64, cases: usize, grid: &Grid) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2);
    let inputs: Vec<_> = (0..cases)
        .map(|_| {
            let p = rng.gen_range(1.0..5.0);
            let x = if rng.gen_bool(0.5) {
                SpaceDescriptor::lebesgue(p)
            } else {
                let q = if rng.gen_bool(0.3) { 1.0 } else { rng.gen_range(1.0..5.0) };
                SpaceDescriptor::lorentz(p.max(1.01), q)
            };
            (step(random_atoms(&mut rng)), step(random_atoms(&mut rng)), x)
        })
        .collect();
    let r = inputs
        .par_iter()
        .map(|(f, g, x)| {
            let (assoc, c) = match associate_descriptor(x) {
                Associate::Exact { space } => (space, 1.0),
                Associate::Equivalent { space, constants } => (space, constants.holder_upper),
                Associate::Unsupported => return f64::NAN,
            };
            match (ri_norm(f, x, grid), ri_norm(g, &assoc, grid)) {
                (Ok(a), Ok(b)) => excess(pairing(f, g, grid), c * a * b, REL_SLACK),
                _ => f64::NAN,
            }
        })
        .collect();
    summarize("holder", r)
}

/// `(f + g)** ≤ f** + g**` pointwise.
pub fn subadditivity_suite(seed: u64, cases: usize, grid: &Grid) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3);
    let inputs: Vec<_> = (0..cases)
        .map(|_| {
            let k = rng.gen_range(1..=12);
            let cells: Vec<(f64, f64, f64)> = (0..k)
                .map(|_| {
                    (
                        rng.gen_range(-3.0..3.0),
                        rng.gen_range(-3.0..3.0),
                        10f64.powf(rng.gen_range(-2.0..2.0)),
                    )
                })
                .collect();
            let ts: Vec<f64> = (0..8).map(|_| 10f64.powf(rng.gen_range(-3.0..3.0))).collect();
            (cells, ts)
        })
        .collect();
    let r = inputs
        .par_iter()
        .map(|(cells, ts)| {
            let f = step(cells.iter().map(|c| (c.0, c.2)).collect());
            let g = step(cells.iter().map(|c| (c.1, c.2)).collect());
            let h = step(cells.iter().map(|c| (c.0 + c.1, c.2)).collect());
            ts.iter()
                .map(|&t| {
                    let lhs = maximal_rearrangement_on(&h, t, grid);
                    let rhs = maximal_rearrangement_on(&f, t, grid) + maximal_rearrangement_on(&g, t, grid);
                    excess(lhs, rhs, 1e-12)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    summarize("fss_subadditivity", r)
}

/// The returned `λ` satisfies `∫A(f*/λ) ≤ 1` and `λ(1 - 1e-9)` does not.
pub fn luxemburg_suite(seed: u64, cases: usize, grid: &Grid) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4);
    let inputs: Vec<_> = (0..cases)
        .map(|_| (step(random_atoms(&mut rng)), random_young(&mut rng)))
        .collect();
    let r = inputs
        .par_iter()
        .map(|(f, a)| match luxemburg_norm(f, a, grid) {
            Ok(l) if l > 0.0 && l.is_finite() => {
                let inside = modular(f, a, l, grid);
                let below = modular(f, a, l * (1.0 - 1e-9), grid);
                if inside <= 1.0 && below > 1.0 {
                    0.0
                } else {
                    (inside - 1.0).abs().max(1e-300)
                }
            }
            _ => f64::NAN,
        })
        .collect();
    summarize("luxemburg_certificate", r)
}

pub const DEFAULT_CASES: usize = 500;

/// All five suites with `cases` random inputs each.
pub fn run_all(seed: u64, cases: usize, grid: &Grid) -> Vec<SuiteReport> {
    vec![
        lattice_suite(seed, cases, grid),
        homogeneity_suite(seed, cases, grid),
        holder_suite(seed, cases, grid),
        subadditivity_suite(seed, cases, grid),
        luxemburg_suite(seed, cases, grid),
    ]
}
