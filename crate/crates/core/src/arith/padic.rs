use std::fmt;

use super::{prime_power, Modulus, Residue};
use crate::error::{Error, Result};

/// A number `unit * p^valuation` whose unit is known modulo `p^unit_precision`.
///
/// `precision` is the ceiling `e` on unit precision fixed at construction.
/// Multiplication and inversion keep the unit precision; additions that cancel
/// powers of `p` lose it, and the loss is tracked rather than hidden. A sum
/// that cancels completely becomes a zero known only up to `p^known_to`.
#[derive(Debug, Clone, Copy)]
pub struct PAdicApprox {
    p: u64,
    precision: u32,
    kind: Kind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Zero {
        known_to: Option<i64>,
    },
    Unit {
        valuation: i64,
        unit: u64,
        unit_precision: u32,
    },
}

fn validate(p: u64, e: u32) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::NotOddPrime(p));
    }
    if e == 0 {
        return Err(Error::OutOfRange(
            "p-adic precision must be at least 1".into(),
        ));
    }
    prime_power(p, e).map(|_| ())
}

/// Splits a nonzero integer into `u * p^v` with `p` not dividing `u`, `u` reduced mod `p^e`.
pub fn split_valuation(x: i128, p: u64, e: u32) -> Result<PAdicApprox> {
    validate(p, e)?;
    if x == 0 {
        return Err(Error::ZeroValue);
    }
    let pi = p as i128;
    let mut v = 0i64;
    let mut u = x;
    while u % pi == 0 {
        u /= pi;
        v += 1;
    }
    let modulus = prime_power(p, e)?;
    Ok(PAdicApprox {
        p,
        precision: e,
        kind: Kind::Unit {
            valuation: v,
            unit: u.rem_euclid(modulus as i128) as u64,
            unit_precision: e,
        },
    })
}

impl PAdicApprox {
    pub fn zero(p: u64, e: u32) -> Result<Self> {
        validate(p, e)?;
        Ok(PAdicApprox {
            p,
            precision: e,
            kind: Kind::Zero { known_to: None },
        })
    }

    pub fn one(p: u64, e: u32) -> Result<Self> {
        Self::from_unit(p, e, 0, 1)
    }

    /// Builds `unit * p^valuation`; `unit` must be coprime to `p`.
    pub fn from_unit(p: u64, e: u32, valuation: i64, unit: i128) -> Result<Self> {
        validate(p, e)?;
        if unit % p as i128 == 0 {
            return Err(Error::DivisibleByPrime { value: unit, p });
        }
        let modulus = prime_power(p, e)?;
        Ok(PAdicApprox {
            p,
            precision: e,
            kind: Kind::Unit {
                valuation,
                unit: unit.rem_euclid(modulus as i128) as u64,
                unit_precision: e,
            },
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `None` stands for infinite valuation (zero).
    pub fn valuation(&self) -> Option<i64> {
        match self.kind {
            Kind::Zero { .. } => None,
            Kind::Unit { valuation, .. } => Some(valuation),
        }
    }

    pub fn unit(&self) -> Option<u64> {
        match self.kind {
            Kind::Zero { .. } => None,
            Kind::Unit { unit, .. } => Some(unit),
        }
    }

    pub fn unit_precision(&self) -> Option<u32> {
        match self.kind {
            Kind::Zero { .. } => None,
            Kind::Unit { unit_precision, .. } => Some(unit_precision),
        }
    }

    /// Exponent `N` such that the value is determined modulo `p^N`; `None` when exact.
    pub fn absolute_precision(&self) -> Option<i64> {
        match self.kind {
            Kind::Zero { known_to } => known_to,
            Kind::Unit {
                valuation,
                unit_precision,
                ..
            } => Some(valuation + unit_precision as i64),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, Kind::Zero { .. })
    }

    fn pow_p(&self, k: u32) -> u64 {
        // k never exceeds `precision`, whose power was checked at construction
        self.p.pow(k)
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p || self.precision != other.precision {
            return Err(Error::PrecisionMismatch {
                p1: self.p,
                e1: self.precision,
                p2: other.p,
                e2: other.precision,
            });
        }
        Ok(())
    }

    fn with_kind(&self, kind: Kind) -> Self {
        PAdicApprox { kind, ..*self }
    }

    fn unit_kind(&self, valuation: i64, unit: u64, unit_precision: u32) -> Self {
        let m = self.pow_p(unit_precision);
        self.with_kind(Kind::Unit {
            valuation,
            unit: unit % m,
            unit_precision,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let kind = match (self.kind, other.kind) {
            (Kind::Zero { known_to: None }, _) | (_, Kind::Zero { known_to: None }) => {
                Kind::Zero { known_to: None }
            }
            (Kind::Zero { known_to: Some(a) }, Kind::Zero { known_to: Some(b) }) => Kind::Zero {
                known_to: Some(a + b),
            },
            (Kind::Zero { known_to: Some(n) }, Kind::Unit { valuation, .. })
            | (Kind::Unit { valuation, .. }, Kind::Zero { known_to: Some(n) }) => Kind::Zero {
                known_to: Some(n + valuation),
            },
            (
                Kind::Unit {
                    valuation: va,
                    unit: ua,
                    unit_precision: pa,
                },
                Kind::Unit {
                    valuation: vb,
                    unit: ub,
                    unit_precision: pb,
                },
            ) => {
                let up = pa.min(pb);
                let m = Modulus(self.pow_p(up));
                return Ok(self.unit_kind(va + vb, m.mul(ua % m.get(), ub % m.get()), up));
            }
        };
        Ok(self.with_kind(kind))
    }

    pub fn inverse(&self) -> Result<Self> {
        match self.kind {
            Kind::Zero { .. } => Err(Error::NotInvertible {
                value: 0,
                modulus: self.pow_p(self.precision),
            }),
            Kind::Unit {
                valuation,
                unit,
                unit_precision,
            } => {
                let m = Modulus(self.pow_p(unit_precision));
                let inv = m.inv(unit).ok_or(Error::NotInvertible {
                    value: unit as i128,
                    modulus: m.get(),
                })?;
                Ok(self.unit_kind(-valuation, inv, unit_precision))
            }
        }
    }

    pub fn neg(&self) -> Self {
        match self.kind {
            Kind::Zero { .. } => *self,
            Kind::Unit {
                valuation,
                unit,
                unit_precision,
            } => {
                let m = self.pow_p(unit_precision);
                self.unit_kind(valuation, m - unit, unit_precision)
            }
        }
    }

    /// Multiplies by `p^k` (any sign of `k`).
    pub fn shift(&self, k: i64) -> Self {
        let kind = match self.kind {
            Kind::Zero { known_to } => Kind::Zero {
                known_to: known_to.map(|n| n + k),
            },
            Kind::Unit {
                valuation,
                unit,
                unit_precision,
            } => Kind::Unit {
                valuation: valuation + k,
                unit,
                unit_precision,
            },
        };
        self.with_kind(kind)
    }

    /// Restricts a unit to known precision below `p^limit` (absolute).
    fn truncate(&self, limit: i64) -> Self {
        match self.kind {
            Kind::Zero { known_to } => self.with_kind(Kind::Zero {
                known_to: Some(known_to.map_or(limit, |n| n.min(limit))),
            }),
            Kind::Unit {
                valuation,
                unit,
                unit_precision,
            } => {
                if valuation >= limit {
                    self.with_kind(Kind::Zero {
                        known_to: Some(limit),
                    })
                } else {
                    let up = (unit_precision as i64).min(limit - valuation) as u32;
                    self.unit_kind(valuation, unit, up)
                }
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let (a, b) = match (self.kind, other.kind) {
            (Kind::Zero { known_to: None }, _) => return Ok(*other),
            (_, Kind::Zero { known_to: None }) => return Ok(*self),
            (Kind::Zero { known_to: Some(n) }, _) => return Ok(other.truncate(n)),
            (_, Kind::Zero { known_to: Some(n) }) => return Ok(self.truncate(n)),
            (a @ Kind::Unit { .. }, b @ Kind::Unit { .. }) => (a, b),
        };
        let (
            Kind::Unit {
                valuation: va,
                unit: ua,
                unit_precision: pa,
            },
            Kind::Unit {
                valuation: vb,
                unit: ub,
                unit_precision: pb,
            },
        ) = (if self.valuation() <= other.valuation() {
            (a, b)
        } else {
            (b, a)
        })
        else {
            unreachable!()
        };
        let known_to = (va + pa as i64).min(vb + pb as i64);
        // digits of the aligned sum that are determined; at least 1 since vb >= va
        let digits = (known_to - va) as u32;
        let m = Modulus(self.pow_p(digits));
        let gap = vb - va;
        let shifted = if gap >= digits as i64 {
            0
        } else {
            m.mul(ub % m.get(), self.pow_p(gap as u32))
        };
        let mut s = m.add(ua % m.get(), shifted);
        if s == 0 {
            return Ok(self.with_kind(Kind::Zero {
                known_to: Some(known_to),
            }));
        }
        let mut t = 0u32;
        while s.is_multiple_of(self.p) {
            s /= self.p;
            t += 1;
        }
        Ok(self.unit_kind(va + t as i64, s, digits - t))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// Fails with `PrecisionExhausted` unless the unit is known to at least `digits` places.
    pub fn require_unit_precision(&self, digits: u32) -> Result<()> {
        let available = match self.kind {
            Kind::Zero { known_to: None } => return Ok(()),
            Kind::Zero { .. } => 0,
            Kind::Unit { unit_precision, .. } => unit_precision,
        };
        if available < digits {
            return Err(Error::PrecisionExhausted {
                needed: digits as i64,
                available: available as i64,
            });
        }
        Ok(())
    }

    /// Reduces to a residue modulo `p^exponent`. The value must be p-integral and
    /// known to at least that absolute precision.
    pub fn to_residue(&self, exponent: u32) -> Result<Residue> {
        let modulus = prime_power(self.p, exponent)?;
        match self.kind {
            Kind::Zero { known_to: None } => Residue::zero(modulus),
            Kind::Zero { known_to: Some(n) } => {
                if n < exponent as i64 {
                    return Err(Error::PrecisionExhausted {
                        needed: exponent as i64,
                        available: n,
                    });
                }
                Residue::zero(modulus)
            }
            Kind::Unit {
                valuation,
                unit,
                unit_precision,
            } => {
                if valuation < 0 {
                    return Err(Error::NonIntegral(valuation));
                }
                if valuation >= exponent as i64 {
                    return Residue::zero(modulus);
                }
                let known = valuation + unit_precision as i64;
                if known < exponent as i64 {
                    return Err(Error::PrecisionExhausted {
                        needed: exponent as i64,
                        available: known,
                    });
                }
                let m = Modulus(modulus);
                Ok(Residue::from_canonical(
                    m.mul(unit % modulus, self.p.pow(valuation as u32)),
                    modulus,
                ))
            }
        }
    }
}

impl PartialEq for PAdicApprox {
    /// Zeros are equal to each other; units compare at the coarser of the two precisions.
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p || self.precision != other.precision {
            return false;
        }
        match (self.kind, other.kind) {
            (Kind::Zero { .. }, Kind::Zero { .. }) => true,
            (
                Kind::Unit {
                    valuation: va,
                    unit: ua,
                    unit_precision: pa,
                },
                Kind::Unit {
                    valuation: vb,
                    unit: ub,
                    unit_precision: pb,
                },
            ) => {
                let m = self.pow_p(pa.min(pb));
                va == vb && ua % m == ub % m
            }
            _ => false,
        }
    }
}

impl fmt::Display for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Zero { known_to: None } => write!(f, "0"),
            Kind::Zero { known_to: Some(n) } => write!(f, "O({}^{})", self.p, n),
            Kind::Unit {
                valuation,
                unit,
                unit_precision,
            } => write!(
                f,
                "{unit}*{p}^{valuation} (unit mod {p}^{unit_precision})",
                p = self.p
            ),
        }
    }
}
