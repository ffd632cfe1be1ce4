//! Named states: Bell states, the χ/ω basis, four-qubit Bell products and
//! the eight-qubit initial state of the swapping protocol.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qla::StateVector;

/// One of the four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Two-letter code used in record files: PP, PM, SP, SM.
    pub fn code(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "PP",
            BellLabel::PhiMinus => "PM",
            BellLabel::PsiPlus => "SP",
            BellLabel::PsiMinus => "SM",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "φ+",
            BellLabel::PhiMinus => "φ-",
            BellLabel::PsiPlus => "ψ+",
            BellLabel::PsiMinus => "ψ-",
        }
    }

    /// Amplitudes in the computational basis |00⟩, |01⟩, |10⟩, |11⟩.
    pub fn amplitudes(self) -> [f64; 4] {
        let h = FRAC_1_SQRT_2;
        match self {
            BellLabel::PhiPlus => [h, 0.0, 0.0, h],
            BellLabel::PhiMinus => [h, 0.0, 0.0, -h],
            BellLabel::PsiPlus => [0.0, h, h, 0.0],
            BellLabel::PsiMinus => [0.0, h, -h, 0.0],
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for BellLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "PP" | "phi+" | "phi_plus" => Ok(BellLabel::PhiPlus),
            "PM" | "phi-" | "phi_minus" => Ok(BellLabel::PhiMinus),
            "SP" | "psi+" | "psi_plus" => Ok(BellLabel::PsiPlus),
            "SM" | "psi-" | "psi_minus" => Ok(BellLabel::PsiMinus),
            other => Err(Error::Parse {
                what: "Bell label",
                detail: format!("unknown label {other:?} (expected PP, PM, SP or SM)"),
            }),
        }
    }
}

/// Bell state on the qubits `(first, second)`.
pub fn bell_on(label: BellLabel, first: usize, second: usize) -> StateVector {
    StateVector::from_real(&label.amplitudes(), vec![first, second])
        .expect("four amplitudes on two distinct qubits")
}

/// Bell state on qubits 1 and 2.
pub fn bell(label: BellLabel) -> StateVector {
    bell_on(label, 1, 2)
}

/// Joint eigenvectors of σz⊗σx and σx⊗σz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChiOmega {
    ChiPlus,
    ChiMinus,
    OmegaPlus,
    OmegaMinus,
}

impl ChiOmega {
    pub const ALL: [ChiOmega; 4] = [
        ChiOmega::ChiPlus,
        ChiOmega::ChiMinus,
        ChiOmega::OmegaPlus,
        ChiOmega::OmegaMinus,
    ];
}

/// Single-qubit kets |0⟩, |1⟩, |+⟩, |−⟩ on qubit `q`.
pub(crate) fn zero(q: usize) -> StateVector {
    StateVector::from_real(&[1.0, 0.0], vec![q]).unwrap()
}

pub(crate) fn one(q: usize) -> StateVector {
    StateVector::from_real(&[0.0, 1.0], vec![q]).unwrap()
}

pub(crate) fn plus(q: usize) -> StateVector {
    StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], vec![q]).unwrap()
}

pub(crate) fn minus(q: usize) -> StateVector {
    StateVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2], vec![q]).unwrap()
}

/// |x y⟩ on qubits 1 and 2 from two single-qubit kets.
pub(crate) fn product(a: &StateVector, b: &StateVector) -> StateVector {
    a.relabel(&[(a.labels()[0], 1)])
        .and_then(|a| a.tensor(&b.relabel(&[(b.labels()[0], 2)])?))
        .expect("two single-qubit kets")
}

fn superpose(a: &StateVector, b: &StateVector, sign: f64) -> StateVector {
    let amps = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x + y * sign) * FRAC_1_SQRT_2)
        .collect();
    StateVector::new(amps, a.labels().to_vec()).unwrap()
}

/// χ± = (|0+⟩ ± |1−⟩)/√2 and ω± = (|1+⟩ ± |0−⟩)/√2 on qubits 1 and 2.
pub fn chi_omega(which: ChiOmega) -> StateVector {
    let zp = product(&zero(1), &plus(2));
    let om = product(&one(1), &minus(2));
    let op = product(&one(1), &plus(2));
    let zm = product(&zero(1), &minus(2));
    match which {
        ChiOmega::ChiPlus => superpose(&zp, &om, 1.0),
        ChiOmega::ChiMinus => superpose(&zp, &om, -1.0),
        ChiOmega::OmegaPlus => superpose(&op, &zm, 1.0),
        ChiOmega::OmegaMinus => superpose(&op, &zm, -1.0),
    }
}

/// A product of two Bell states: `first` on one pair, `second` on another.
///
/// Ordered as the rows of the reference value table, which is also the
/// index of the inequality each state saturates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FourQubitProductLabel {
    pub first: BellLabel,
    pub second: BellLabel,
}

impl FourQubitProductLabel {
    pub const fn new(first: BellLabel, second: BellLabel) -> Self {
        Self { first, second }
    }

    pub fn all() -> impl Iterator<Item = FourQubitProductLabel> {
        BellLabel::ALL
            .into_iter()
            .flat_map(|a| BellLabel::ALL.into_iter().map(move |b| Self::new(a, b)))
    }

    /// 1-based position in the canonical ordering.
    pub fn index(self) -> usize {
        self.first.index() * 4 + self.second.index() + 1
    }

    pub fn from_index(index: usize) -> Result<Self> {
        if !(1..=16).contains(&index) {
            return Err(Error::InvalidIndex(index));
        }
        let i = index - 1;
        Ok(Self::new(BellLabel::ALL[i / 4], BellLabel::ALL[i % 4]))
    }

    pub fn code(self) -> String {
        format!("{},{}", self.first.code(), self.second.code())
    }
}

impl fmt::Display for FourQubitProductLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first.symbol(), self.second.symbol())
    }
}

impl FromStr for FourQubitProductLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once(',').ok_or_else(|| Error::Parse {
            what: "Bell product",
            detail: format!("expected two comma-separated labels, got {s:?}"),
        })?;
        Ok(Self::new(a.parse()?, b.parse()?))
    }
}

/// `first` on `(p1, p2)` and `second` on `(q1, q2)`, stored canonically.
pub fn bell_product_on(
    label: FourQubitProductLabel,
    pair1: (usize, usize),
    pair2: (usize, usize),
) -> Result<StateVector> {
    let a = bell_on(label.first, pair1.0, pair1.1);
    let b = bell_on(label.second, pair2.0, pair2.1);
    Ok(a.tensor(&b)?.canonical())
}

/// Bell product on qubits (1,2) and (3,4), labels [1,2,3,4].
pub fn four_qubit_product(label: FourQubitProductLabel) -> StateVector {
    bell_product_on(label, (1, 2), (3, 4)).expect("distinct labels")
}

/// Two identical sources: `sources.first` on (1,2) and (5,6), `sources.second`
/// on (3,4) and (7,8).
pub fn eight_qubit_state(sources: FourQubitProductLabel) -> StateVector {
    let a = four_qubit_product(sources);
    let b = bell_product_on(sources, (5, 6), (7, 8)).expect("distinct labels");
    a.tensor(&b).expect("disjoint labels").canonical()
}

/// Default sources of the swapping protocol: ψ⁻ on every pair.
pub const SINGLET_SOURCES: FourQubitProductLabel =
    FourQubitProductLabel::new(BellLabel::PsiMinus, BellLabel::PsiMinus);

/// ψ⁻ on (1,2), (3,4), (5,6) and (7,8).
pub fn eight_qubit_initial() -> StateVector {
    eight_qubit_state(SINGLET_SOURCES)
}
