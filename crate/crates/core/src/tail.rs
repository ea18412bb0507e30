//! Asymptotic size classes of functions near `0` or near `∞`.
//!
//! Every integrand handled by the crate carries one [`Tail`] per end of
//! `(0, ∞)`. Convergence of `∫_0` and `∫^∞` is decided from these classes
//! symbolically, quadrature only resolves the finite part.

use serde::{Deserialize, Serialize};

const EXP_EQ_TOL: f64 = 1e-12;

/// Size class of a function as the argument tends to one end of `(0, ∞)`.
///
/// `Power` means `≍ t^power · L^logs[0] · (log L)^logs[1] · (log log L)^logs[2]`
/// where `L = 1 + |log t|`. `Rapid` is below every power at that end,
/// `Explosive` above every power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tail {
    Zero,
    Rapid,
    Power { power: f64, logs: [f64; 3] },
    Explosive,
    Infinite,
    Unknown,
}

/// Outcome of a symbolic convergence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    Converges,
    Diverges,
    Undetermined,
}

impl Convergence {
    pub fn converges(self) -> bool {
        self == Convergence::Converges
    }

    pub fn diverges(self) -> bool {
        self == Convergence::Diverges
    }
}

impl Tail {
    pub const CONSTANT: Tail = Tail::Power {
        power: 0.0,
        logs: [0.0; 3],
    };

    pub fn power(power: f64) -> Tail {
        Tail::Power {
            power,
            logs: [0.0; 3],
        }
    }

    pub fn power_log(power: f64, log: f64) -> Tail {
        Tail::Power {
            power,
            logs: [log, 0.0, 0.0],
        }
    }

    pub fn mul(self, other: Tail) -> Tail {
        use Tail::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Unknown, _) | (_, Unknown) => Unknown,
            (Rapid, Rapid) => Rapid,
            (Rapid, Power { .. }) | (Power { .. }, Rapid) => Rapid,
            (Rapid, _) | (_, Rapid) => Unknown,
            (Power { power: a, logs: la }, Power { power: b, logs: lb }) => Power {
                power: a + b,
                logs: [la[0] + lb[0], la[1] + lb[1], la[2] + lb[2]],
            },
            (Infinite, _) | (_, Infinite) => Infinite,
            (Explosive, _) | (_, Explosive) => Explosive,
        }
    }

    pub fn recip(self) -> Tail {
        use Tail::*;
        match self {
            Zero => Infinite,
            Rapid => Explosive,
            Power { power, logs } => Power {
                power: -power,
                logs: [-logs[0], -logs[1], -logs[2]],
            },
            Explosive => Rapid,
            Infinite => Zero,
            Unknown => Unknown,
        }
    }

    pub fn powf(self, k: f64) -> Tail {
        if k == 0.0 {
            return Tail::CONSTANT;
        }
        if k < 0.0 {
            return self.recip().powf(-k);
        }
        match self {
            Tail::Power { power, logs } => Tail::Power {
                power: power * k,
                logs: [logs[0] * k, logs[1] * k, logs[2] * k],
            },
            other => other,
        }
    }

    /// Size class of the inverse function of a monotone power-type map.
    /// Deeper log layers are dropped.
    pub fn inverse(self) -> Tail {
        match self {
            Tail::Power { power, logs } if power.abs() > EXP_EQ_TOL => {
                Tail::power_log(1.0 / power, -logs[0] / power)
            }
            _ => Tail::Unknown,
        }
    }

    /// Convergence of `∫^∞ F` for a nonnegative `F` of this class near `∞`.
    pub fn integrable_at_infinity(self) -> Convergence {
        match self {
            Tail::Zero | Tail::Rapid => Convergence::Converges,
            Tail::Explosive | Tail::Infinite => Convergence::Diverges,
            Tail::Unknown => Convergence::Undetermined,
            Tail::Power { power, logs } => lexicographic(power, &logs),
        }
    }

    /// Convergence of `∫_0 F` for a nonnegative `F` of this class near `0`.
    pub fn integrable_at_zero(self) -> Convergence {
        match self {
            Tail::Zero | Tail::Rapid => Convergence::Converges,
            Tail::Explosive | Tail::Infinite => Convergence::Diverges,
            Tail::Unknown => Convergence::Undetermined,
            // t^{-a} grows as t → 0, so the power test flips sign; the log
            // layers behave exactly as at infinity (u = log 1/t).
            Tail::Power { power, logs } => lexicographic(-power - 2.0, &logs),
        }
    }

    /// Whether the function stays bounded at this end.
    /// `at_zero` selects the end of `(0, ∞)`.
    pub fn bounded(self, at_zero: bool) -> Convergence {
        match self {
            Tail::Zero | Tail::Rapid => Convergence::Converges,
            Tail::Explosive | Tail::Infinite => Convergence::Diverges,
            Tail::Unknown => Convergence::Undetermined,
            Tail::Power { power, logs } => {
                let lead = if at_zero { -power } else { power };
                let comps = [lead, logs[0], logs[1], logs[2]];
                for c in comps {
                    if c.abs() > EXP_EQ_TOL {
                        return if c < 0.0 {
                            Convergence::Converges
                        } else {
                            Convergence::Diverges
                        };
                    }
                }
                Convergence::Converges
            }
        }
    }

    /// Whether the function tends to zero at this end (vs. a nonzero limit or blow-up).
    pub fn vanishes(self, at_zero: bool) -> Convergence {
        match self {
            Tail::Zero | Tail::Rapid => Convergence::Converges,
            Tail::Explosive | Tail::Infinite => Convergence::Diverges,
            Tail::Unknown => Convergence::Undetermined,
            Tail::Power { power, logs } => {
                let lead = if at_zero { -power } else { power };
                let comps = [lead, logs[0], logs[1], logs[2]];
                for c in comps {
                    if c.abs() > EXP_EQ_TOL {
                        return if c < 0.0 {
                            Convergence::Converges
                        } else {
                            Convergence::Diverges
                        };
                    }
                }
                Convergence::Diverges
            }
        }
    }

    pub fn leading_power(self) -> Option<f64> {
        match self {
            Tail::Power { power, .. } => Some(power),
            _ => None,
        }
    }

    pub fn is_power(self) -> bool {
        matches!(self, Tail::Power { .. })
    }
}

/// `∫^∞ t^a L^b0 (log L)^b1 ...` converges iff the first component that is
/// not `-1` is below `-1`.
fn lexicographic(power: f64, logs: &[f64; 3]) -> Convergence {
    let comps = [power, logs[0], logs[1], logs[2]];
    for c in comps {
        if (c + 1.0).abs() > EXP_EQ_TOL {
            return if c < -1.0 {
                Convergence::Converges
            } else {
                Convergence::Diverges
            };
        }
    }
    Convergence::Diverges
}

pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EXP_EQ_TOL * (1.0 + a.abs().max(b.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_tests_at_both_ends() {
        assert!(Tail::power(-0.5).integrable_at_zero().converges());
        assert!(Tail::power(-1.0).integrable_at_zero().diverges());
        assert!(Tail::power(-2.0).integrable_at_infinity().converges());
        assert!(Tail::power(-1.0).integrable_at_infinity().diverges());
        assert!(Tail::power_log(-1.0, -2.0).integrable_at_infinity().converges());
        assert!(Tail::power_log(-1.0, -2.0).integrable_at_zero().converges());
        assert!(Tail::power_log(-1.0, -1.0).integrable_at_zero().diverges());
    }

    #[test]
    fn algebra() {
        let t = Tail::power_log(2.0, 1.0).mul(Tail::power(-3.0));
        assert_eq!(t, Tail::power_log(-1.0, 1.0));
        assert_eq!(Tail::Rapid.mul(Tail::power(40.0)), Tail::Rapid);
        assert_eq!(Tail::Zero.mul(Tail::Infinite), Tail::Zero);
        assert_eq!(Tail::power(2.0).inverse(), Tail::power(0.5));
        assert_eq!(Tail::power(-2.0).powf(-0.5), Tail::power(1.0));
    }

    #[test]
    fn boundedness() {
        assert!(Tail::CONSTANT.bounded(true).converges());
        assert!(Tail::power(0.1).bounded(true).converges());
        assert!(Tail::power(0.1).bounded(false).diverges());
        assert!(Tail::power_log(0.0, -1.0).vanishes(false).converges());
        assert!(Tail::CONSTANT.vanishes(false).diverges());
    }
}
