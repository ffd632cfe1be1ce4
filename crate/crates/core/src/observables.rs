//! The six two-qubit observables with four outcomes and their dichotomic
//! bit masks.
//!
//! Each outcome is a pair of bits `(first, second)` with values ±1. An
//! observable is kept as four rank-1 projectors keyed by outcome, since
//! the Bell expressions read individual bits rather than eigenvalues.
//! Alice's register is ordered (qubit 1, qubit 3); Bob's is (qubit 2,
//! qubit 4) before swapping and (qubit 6, qubit 8) after.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qla::{Operator, StateVector, STRUCT_TOL};
use crate::states::{bell, chi_omega, minus, one, plus, product, zero, BellLabel, ChiOmega};

/// One of the four outcomes r₊₊, r₊₋, r₋₊, r₋₋.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FourOutcome {
    PlusPlus,
    PlusMinus,
    MinusPlus,
    MinusMinus,
}

impl FourOutcome {
    pub const ALL: [FourOutcome; 4] = [
        FourOutcome::PlusPlus,
        FourOutcome::PlusMinus,
        FourOutcome::MinusPlus,
        FourOutcome::MinusMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> FourOutcome {
        Self::ALL[i]
    }

    pub fn from_bits(first: i32, second: i32) -> Result<FourOutcome> {
        match (first, second) {
            (1, 1) => Ok(FourOutcome::PlusPlus),
            (1, -1) => Ok(FourOutcome::PlusMinus),
            (-1, 1) => Ok(FourOutcome::MinusPlus),
            (-1, -1) => Ok(FourOutcome::MinusMinus),
            _ => Err(Error::Parse {
                what: "outcome bits",
                detail: format!("({first},{second}) is not a pair of ±1"),
            }),
        }
    }

    pub fn first_bit(self) -> i32 {
        if self.index() < 2 {
            1
        } else {
            -1
        }
    }

    pub fn second_bit(self) -> i32 {
        if self.index().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for FourOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |b: i32| if b > 0 { '+' } else { '-' };
        write!(f, "{}{}", sign(self.first_bit()), sign(self.second_bit()))
    }
}

impl FromStr for FourOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bit = |c: char| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            _ => Err(Error::Parse {
                what: "outcome",
                detail: format!("{s:?}"),
            }),
        };
        let mut chars = s.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => FourOutcome::from_bits(bit(a)?, bit(b)?),
            _ => Err(Error::Parse {
                what: "outcome",
                detail: format!("{s:?}"),
            }),
        }
    }
}

/// Which bits of an outcome a correlator reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitMask {
    /// Superscript 10: the first bit.
    First,
    /// Superscript 01: the second bit.
    Second,
    /// Superscript 11: the product of both bits.
    Both,
}

impl BitMask {
    pub fn from_bits(use_first: bool, use_second: bool) -> Result<BitMask> {
        match (use_first, use_second) {
            (true, false) => Ok(BitMask::First),
            (false, true) => Ok(BitMask::Second),
            (true, true) => Ok(BitMask::Both),
            (false, false) => Err(Error::EmptyMask),
        }
    }

    /// Mask used for setting `k` in the correlator pattern: 10, 01, 11.
    pub fn for_setting(k: usize) -> BitMask {
        [BitMask::First, BitMask::Second, BitMask::Both][k]
    }

    pub fn value(self, outcome: FourOutcome) -> i32 {
        match self {
            BitMask::First => outcome.first_bit(),
            BitMask::Second => outcome.second_bit(),
            BitMask::Both => outcome.first_bit() * outcome.second_bit(),
        }
    }
}

impl fmt::Display for BitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BitMask::First => "10",
            BitMask::Second => "01",
            BitMask::Both => "11",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

/// Four orthogonal rank-1 projectors on a two-qubit register.
#[derive(Debug, Clone)]
pub struct FourOutcomeObservable {
    party: Party,
    setting: usize,
    eigenvectors: [StateVector; 4],
    projectors: [Operator; 4],
}

impl FourOutcomeObservable {
    /// `eigenvectors` are listed in [`FourOutcome::ALL`] order.
    pub fn new(party: Party, setting: usize, eigenvectors: [StateVector; 4]) -> Result<Self> {
        if setting > 2 {
            return Err(Error::InvalidSetting(setting));
        }
        let projectors = eigenvectors.clone().map(|v| Operator::projector(&v));
        let mut total = Operator::zeros(4);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != 4 {
                return Err(Error::DimensionMismatch { expected: 4, found: p.dim() });
            }
            if (p.trace().re - 1.0).abs() > STRUCT_TOL || !p.is_projector(STRUCT_TOL) {
                return Err(Error::IncompleteProjectors(p.trace().re - 1.0));
            }
            for q in &projectors[i + 1..] {
                let overlap = p.matmul(q)?.max_abs_diff(&Operator::zeros(4));
                if overlap > STRUCT_TOL {
                    return Err(Error::IncompleteProjectors(overlap));
                }
            }
            total = total.add(p)?;
        }
        let deviation = total.max_abs_diff(&Operator::identity(4));
        if deviation > STRUCT_TOL {
            return Err(Error::IncompleteProjectors(deviation));
        }
        Ok(Self {
            party,
            setting,
            eigenvectors,
            projectors,
        })
    }

    pub fn party(&self) -> Party {
        self.party
    }

    pub fn setting(&self) -> usize {
        self.setting
    }

    pub fn projector(&self, outcome: FourOutcome) -> &Operator {
        &self.projectors[outcome.index()]
    }

    pub fn projectors(&self) -> &[Operator; 4] {
        &self.projectors
    }

    pub fn eigenvector(&self, outcome: FourOutcome) -> &StateVector {
        &self.eigenvectors[outcome.index()]
    }

    /// Σ over outcomes of (mask value) · projector; a ±1-valued observable.
    pub fn masked_operator(&self, mask: BitMask) -> Operator {
        FourOutcome::ALL
            .iter()
            .fold(Operator::zeros(4), |acc, &o| {
                acc.add(&self.projector(o).scale(f64::from(mask.value(o))))
                    .expect("all projectors are 4x4")
            })
    }
}

/// Convenience wrapper over [`FourOutcomeObservable::masked_operator`] taking
/// raw mask bits.
pub fn masked_operator(
    obs: &FourOutcomeObservable,
    use_first: bool,
    use_second: bool,
) -> Result<Operator> {
    Ok(obs.masked_operator(BitMask::from_bits(use_first, use_second)?))
}

fn kets(pairs: [(StateVector, StateVector); 4]) -> [StateVector; 4] {
    pairs.map(|(a, b)| product(&a, &b))
}

/// Alice's A₀ (computational basis), A₁ (σx product basis) or A₂ (χ/ω basis).
pub fn alice_observable(setting: usize) -> Result<FourOutcomeObservable> {
    let vectors = match setting {
        0 => kets([
            (zero(1), zero(2)),
            (zero(1), one(2)),
            (one(1), zero(2)),
            (one(1), one(2)),
        ]),
        1 => kets([
            (plus(1), plus(2)),
            (minus(1), plus(2)),
            (plus(1), minus(2)),
            (minus(1), minus(2)),
        ]),
        2 => ChiOmega::ALL.map(chi_omega),
        s => return Err(Error::InvalidSetting(s)),
    };
    FourOutcomeObservable::new(Party::Alice, setting, vectors)
}

/// Bob's B₀ (|0±⟩, |1±⟩), B₁ (|±0⟩, |±1⟩) or B₂ (Bell basis).
pub fn bob_observable(setting: usize) -> Result<FourOutcomeObservable> {
    let vectors = match setting {
        0 => kets([
            (zero(1), plus(2)),
            (zero(1), minus(2)),
            (one(1), plus(2)),
            (one(1), minus(2)),
        ]),
        1 => kets([
            (plus(1), zero(2)),
            (minus(1), zero(2)),
            (plus(1), one(2)),
            (minus(1), one(2)),
        ]),
        2 => BellLabel::ALL.map(bell),
        s => return Err(Error::InvalidSetting(s)),
    };
    FourOutcomeObservable::new(Party::Bob, setting, vectors)
}

/// A₀, A₁, A₂, built once.
pub fn alice_observables() -> &'static [FourOutcomeObservable; 3] {
    static CELL: OnceLock<[FourOutcomeObservable; 3]> = OnceLock::new();
    CELL.get_or_init(|| [0, 1, 2].map(|k| alice_observable(k).expect("valid setting")))
}

/// B₀, B₁, B₂, built once.
pub fn bob_observables() -> &'static [FourOutcomeObservable; 3] {
    static CELL: OnceLock<[FourOutcomeObservable; 3]> = OnceLock::new();
    CELL.get_or_init(|| [0, 1, 2].map(|k| bob_observable(k).expect("valid setting")))
}
