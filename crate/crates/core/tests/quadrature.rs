use proptest::prelude::*;
use rinorm::error::Error;
use rinorm::quadrature::*;
use rinorm::tail::Tail;

fn int(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, brk: Vec<f64>, tz: Tail, ti: Tail, g: &Grid) -> f64 {
    integrate(&Integrand::new(f).on(lo, hi).breaks(brk).tails(tz, ti), g).value
}

#[test]
fn integrate_examples() {
    let g = Grid::default();
    let e = |s: f64| (-s).exp();
    assert!((int(&e, 0.0, f64::INFINITY, vec![], Tail::CONSTANT, Tail::Rapid, &g) - 1.0).abs() < 1e-8);
    let inv = |s: f64| if s < 1.0 { 1.0 / s } else { 0.0 };
    assert_eq!(int(&inv, 0.0, f64::INFINITY, vec![1.0], Tail::power(-1.0), Tail::Zero, &g), f64::INFINITY);
    let h = |s: f64| if s < 1.0 { s.powf(-0.5) } else { 0.0 };
    assert!((int(&h, 0.0, f64::INFINITY, vec![1.0], Tail::power(-0.5), Tail::Zero, &g) - 2.0).abs() < 1e-8);
}

#[test]
fn unknown_tail_is_flagged() {
    let g = Grid::default();
    let f = |s: f64| 1.0 / (1.0 + s * s);
    let r = integrate(&Integrand::new(&f).tails(Tail::CONSTANT, Tail::Unknown), &g);
    assert!(r.unresolved_tail);
}

#[test]
fn invert_examples() {
    assert!((invert_monotone(|x| x * x * x, 8.0, 0.0, 10.0).unwrap() - 2.0).abs() < 1e-11);
    assert!((invert_monotone(|x| x, 0.37, 0.0, 1.0).unwrap() - 0.37).abs() < 1e-12);
    let c = 0.625;
    let step = |x: f64| if x >= c { 1.0 } else { 0.0 };
    assert!((invert_monotone(step, 0.5, 0.0, 1.0).unwrap() - c).abs() < 1e-12);
    assert!(matches!(invert_monotone(|x| x, 2.0, 0.0, 1.0), Err(Error::Bracket { endpoint: "upper", .. })));
    assert!(matches!(invert_monotone(|x| x + 1.0, 0.5, 0.0, 1.0), Err(Error::Bracket { endpoint: "lower", .. })));
}

#[test]
fn grid_validation() {
    assert!(Grid::new(1e-8, 1e8, 64).is_ok());
    assert!(Grid::new(2.0, 1e8, 64).is_err());
    assert!(Grid::new(1e-8, 1e8, 0).is_err());
}

#[test]
fn refinement_never_hurts() {
    let cases: Vec<(Box<dyn Fn(f64) -> f64>, Vec<f64>, Tail, Tail, f64)> = vec![
        (Box::new(|s: f64| (-s).exp()), vec![], Tail::CONSTANT, Tail::Rapid, 1.0),
        (Box::new(|s: f64| 1.0 / (1.0 + s * s)), vec![], Tail::CONSTANT, Tail::power(-2.0), std::f64::consts::FRAC_PI_2),
        (
            Box::new(|s: f64| if s < 1.0 { s.powf(-0.5) } else { 0.0 }),
            vec![1.0],
            Tail::power(-0.5),
            Tail::Zero,
            2.0,
        ),
        (Box::new(|s: f64| s * (-s * s).exp()), vec![], Tail::power(1.0), Tail::Rapid, 0.5),
        (
            Box::new(|s: f64| if s < 2.0 { 1.0 } else { 0.0 }),
            vec![2.0],
            Tail::CONSTANT,
            Tail::Zero,
            2.0,
        ),
    ];
    for (i, (f, b, tz, ti, exact)) in cases.iter().enumerate() {
        let mut g = Grid::new(1e-8, 1e8, 4).unwrap();
        let mut err = f64::INFINITY;
        for _ in 0..5 {
            let v = int(f.as_ref(), 0.0, f64::INFINITY, b.clone(), *tz, *ti, &g);
            let e = (v - exact).abs();
            assert!(e <= err + 8.0 * f64::EPSILON * exact, "case {i}: {e} after {err} at {} nodes/decade", g.nodes_per_decade);
            err = e;
            g = g.refined();
        }
    }
}

fn piecewise_power(pieces: &[(f64, f64, f64)]) -> impl Fn(f64) -> f64 + '_ {
    move |x: f64| {
        let mut acc = 0.0;
        let mut start = 0.0;
        for &(len, c, p) in pieces {
            if x <= start + len {
                return acc + c * (x - start).max(0.0).powf(p);
            }
            acc += c * len.powf(p);
            start += len;
        }
        acc
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn invert_then_apply(pieces in prop::collection::vec((0.1f64..3.0, 0.1f64..10.0, 1.0f64..3.0), 1..6), u in 0.0f64..1.0) {
        let f = piecewise_power(&pieces);
        let hi: f64 = pieces.iter().map(|p| p.0).sum();
        let y = u * f(hi);
        let x = invert_monotone(&f, y, 0.0, hi).unwrap();
        prop_assert!((f(x) - y).abs() <= 1e-9 * (1.0 + y.abs()));
    }

    #[test]
    fn invert_steep_pieces(pieces in prop::collection::vec((0.1f64..3.0, 0.1f64..10.0, 0.5f64..1.0), 1..6), u in 0.0f64..1.0) {
        let f = piecewise_power(&pieces);
        let hi: f64 = pieces.iter().map(|p| p.0).sum();
        let xs = u * hi;
        let x = invert_monotone(&f, f(xs), 0.0, hi).unwrap();
        prop_assert!((x - xs).abs() <= 1e-10 * (1.0 + xs));
    }

    #[test]
    fn additive(lo in 1e-3f64..1.0, mid in 1.0f64..10.0, hi in 10.0f64..1e3, k in 0.1f64..2.0) {
        let g = Grid::default();
        let f = move |s: f64| (-k * s).exp() * (1.0 + s.sqrt());
        let whole = int(&f, lo, hi, vec![], Tail::Unknown, Tail::Unknown, &g);
        let parts = int(&f, lo, mid, vec![], Tail::Unknown, Tail::Unknown, &g) + int(&f, mid, hi, vec![], Tail::Unknown, Tail::Unknown, &g);
        prop_assert!((whole - parts).abs() <= 1e-10 * whole.abs());
    }
}
