//! The sixteen Bell expressions and their evaluation on quantum states and
//! on behaviors.
//!
//! Expression `k` is `Σ_ij s_ij ⟨A_i^{μ(j)} B_j^{μ(i)}⟩` where `μ(0) = 10`,
//! `μ(1) = 01`, `μ(2) = 11` select outcome bits. Every local deterministic
//! model gives at most 7; the algebraic and no-signaling maximum is 9.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::observables::{alice_observables, bob_observables, BitMask, FourOutcome};
use crate::qla::{embed, expectation, DensityMatrix, Operator, StateVector};

/// Sign tables for the paired expressions `(k, 17 - k)`, `k = 1..=8`, with
/// the upper sign. Entries are row-major `s00 s01 s02 s10 ... s22`.
const PAIRED_SIGNS: [[i32; 9]; 8] = [
    [1, 1, 1, 1, 1, 1, 1, 1, -1],
    [1, 1, 1, -1, 1, -1, -1, 1, 1],
    [1, -1, -1, 1, 1, 1, 1, -1, 1],
    [1, -1, -1, -1, 1, -1, -1, -1, -1],
    [1, 1, 1, 1, -1, -1, 1, -1, 1],
    [1, 1, 1, -1, -1, 1, -1, -1, -1],
    [1, -1, -1, 1, -1, -1, 1, 1, -1],
    [1, -1, -1, -1, -1, 1, -1, 1, 1],
];

/// Entries that carry ± or ∓ and flip for the lower-index partner.
const PAIRED_ENTRIES: [usize; 4] = [0, 1, 3, 4];

/// Maximum over local deterministic strategies, for every expression.
pub const LHV_BOUND: i32 = 7;
/// Algebraic maximum, reached by no-signaling (and quantum) boxes.
pub const NS_BOUND: i32 = 9;

/// One of the sixteen Bell expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BellExpression {
    index: usize,
    signs: [[i32; 3]; 3],
}

impl BellExpression {
    pub fn new(index: usize) -> Result<Self> {
        if !(1..=16).contains(&index) {
            return Err(Error::InvalidIndex(index));
        }
        let (row, flip) = if index <= 8 {
            (index - 1, false)
        } else {
            (16 - index, true)
        };
        let mut flat = PAIRED_SIGNS[row];
        if flip {
            for e in PAIRED_ENTRIES {
                flat[e] = -flat[e];
            }
        }
        let mut signs = [[0; 3]; 3];
        for (k, s) in flat.into_iter().enumerate() {
            signs[k / 3][k % 3] = s;
        }
        Ok(Self { index, signs })
    }

    /// An expression with an arbitrary sign table; entries must be ±1.
    pub fn from_signs(index: usize, signs: [[i32; 3]; 3]) -> Result<Self> {
        if signs.iter().flatten().any(|s| s.abs() != 1) {
            return Err(Error::Parse {
                what: "sign table",
                detail: format!("entries must be ±1, got {signs:?}"),
            });
        }
        Ok(Self { index, signs })
    }

    /// All sixteen expressions, index 1 first.
    pub fn all() -> &'static [BellExpression; 16] {
        static CELL: OnceLock<[BellExpression; 16]> = OnceLock::new();
        CELL.get_or_init(|| std::array::from_fn(|k| BellExpression::new(k + 1).unwrap()))
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn signs(&self) -> &[[i32; 3]; 3] {
        &self.signs
    }

    pub fn sign(&self, i: usize, j: usize) -> i32 {
        self.signs[i][j]
    }

    /// Σ|s_ij|, the algebraic maximum.
    pub fn algebraic_max(&self) -> i32 {
        self.signs.iter().flatten().map(|s| s.abs()).sum()
    }

    /// The expression with Alice and Bob exchanged: the sign table is
    /// transposed and the mask pattern maps onto itself.
    pub fn party_swapped(&self) -> BellExpression {
        let mut signs = [[0; 3]; 3];
        for (i, row) in signs.iter_mut().enumerate() {
            for (j, s) in row.iter_mut().enumerate() {
                *s = self.signs[j][i];
            }
        }
        BellExpression {
            index: self.index,
            signs,
        }
    }

    /// The term value `s_xy · maskA(a) · maskB(b)` for a single event.
    pub fn term(&self, x: usize, y: usize, a: FourOutcome, b: FourOutcome) -> i32 {
        let (ma, mb) = mask_pattern(x, y);
        self.signs[x][y] * ma.value(a) * mb.value(b)
    }
}

/// Bit masks `(alice, bob)` read by the term with Alice setting `i` and Bob
/// setting `j`: Alice's mask follows `j`, Bob's follows `i`.
pub fn mask_pattern(i: usize, j: usize) -> (BitMask, BitMask) {
    (BitMask::for_setting(j), BitMask::for_setting(i))
}

/// Where Alice's and Bob's qubit pairs live in a four-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartyLayout {
    pub alice: [usize; 2],
    pub bob: [usize; 2],
}

impl PartyLayout {
    /// Qubits prepared directly: Alice (1,3), Bob (2,4).
    pub const DIRECT: PartyLayout = PartyLayout {
        alice: [1, 3],
        bob: [2, 4],
    };

    /// After swapping: Alice (1,3), Bob (6,8).
    pub const SWAPPED: PartyLayout = PartyLayout {
        alice: [1, 3],
        bob: [6, 8],
    };

    pub fn labels(&self) -> Vec<usize> {
        let mut l = vec![self.alice[0], self.alice[1], self.bob[0], self.bob[1]];
        l.sort_unstable();
        l
    }

    /// Picks the layout from a four-qubit labeling.
    pub fn infer(labels: &[usize]) -> Result<PartyLayout> {
        let mut sorted = labels.to_vec();
        sorted.sort_unstable();
        [Self::DIRECT, Self::SWAPPED]
            .into_iter()
            .find(|l| l.labels() == sorted)
            .ok_or_else(|| Error::LabelMismatch {
                found: labels.to_vec(),
            })
    }
}

/// The two-party operator of term `(i, j)` on the register `context`.
fn term_operator(layout: PartyLayout, context: &[usize], i: usize, j: usize) -> Result<Operator> {
    if i > 2 {
        return Err(Error::InvalidSetting(i));
    }
    if j > 2 {
        return Err(Error::InvalidSetting(j));
    }
    let (ma, mb) = mask_pattern(i, j);
    let a = alice_observables()[i].masked_operator(ma);
    let b = bob_observables()[j].masked_operator(mb);
    // both factors are embedded on disjoint qubits, so they commute
    embed(&a, &layout.alice, context)?.matmul(&embed(&b, &layout.bob, context)?)
}

/// `⟨A_i^{μ(j)} ⊗ B_j^{μ(i)}⟩` on a four-qubit state.
pub fn correlator_quantum(state: &StateVector, i: usize, j: usize) -> Result<f64> {
    let layout = PartyLayout::infer(state.labels())?;
    expectation(state, &term_operator(layout, state.labels(), i, j)?)
}

/// Same correlator evaluated on a density matrix.
pub fn correlator_density(rho: &DensityMatrix, i: usize, j: usize) -> Result<f64> {
    let layout = PartyLayout::infer(rho.labels())?;
    rho.expectation(&term_operator(layout, rho.labels(), i, j)?)
}

pub fn beta_quantum(state: &StateVector, expr: &BellExpression) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            total += f64::from(expr.sign(i, j)) * correlator_quantum(state, i, j)?;
        }
    }
    Ok(total)
}

pub fn beta_density(rho: &DensityMatrix, expr: &BellExpression) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            total += f64::from(expr.sign(i, j)) * correlator_density(rho, i, j)?;
        }
    }
    Ok(total)
}

/// Layout of [`Behavior`] entries: `((x * 3 + y) * 4 + a) * 4 + b`.
pub fn behavior_slot(x: usize, y: usize, a: FourOutcome, b: FourOutcome) -> usize {
    ((x * 3 + y) * 4 + a.index()) * 4 + b.index()
}

pub const BEHAVIOR_LEN: usize = 144;

/// A normalized probability table `p(a, b | x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    probs: Vec<f64>,
}

impl Behavior {
    /// Validates non-negativity and per-setting normalization at 1e-9.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() != BEHAVIOR_LEN {
            return Err(Error::DimensionMismatch {
                expected: BEHAVIOR_LEN,
                found: probs.len(),
            });
        }
        if let Some(&value) = probs.iter().find(|&&p| p < -1e-12 || !p.is_finite()) {
            return Err(Error::NegativeProbability { value });
        }
        for x in 0..3 {
            for y in 0..3 {
                let start = (x * 3 + y) * 16;
                let total: f64 = probs[start..start + 16].iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::Unnormalized { x, y, total });
                }
            }
        }
        Ok(Self { probs })
    }

    pub fn uniform() -> Self {
        Self {
            probs: vec![1.0 / 16.0; BEHAVIOR_LEN],
        }
    }

    /// Outcome statistics of Alice's and Bob's observables on a state.
    pub fn from_state(state: &StateVector) -> Result<Self> {
        let layout = PartyLayout::infer(state.labels())?;
        let mut probs = vec![0.0; BEHAVIOR_LEN];
        for x in 0..3 {
            for a in FourOutcome::ALL {
                let after_alice =
                    state.apply(alice_observables()[x].projector(a), &layout.alice)?;
                for y in 0..3 {
                    for b in FourOutcome::ALL {
                        let p = after_alice
                            .apply(bob_observables()[y].projector(b), &layout.bob)?
                            .norm_sqr();
                        probs[behavior_slot(x, y, a, b)] = p;
                    }
                }
            }
        }
        Self::new(probs)
    }

    /// Convex combination `w·self + (1 − w)·other`.
    pub fn mix(&self, other: &Behavior, weight: f64) -> Behavior {
        Behavior {
            probs: self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(p, q)| weight * p + (1.0 - weight) * q)
                .collect(),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, x: usize, y: usize, a: FourOutcome, b: FourOutcome) -> f64 {
        self.probs[behavior_slot(x, y, a, b)]
    }

    pub fn alice_marginal(&self, x: usize, y: usize, a: FourOutcome) -> f64 {
        FourOutcome::ALL.iter().map(|&b| self.get(x, y, a, b)).sum()
    }

    pub fn bob_marginal(&self, x: usize, y: usize, b: FourOutcome) -> f64 {
        FourOutcome::ALL.iter().map(|&a| self.get(x, y, a, b)).sum()
    }

    /// Whether each party's marginals ignore the other party's setting.
    pub fn is_no_signaling(&self, tol: f64) -> bool {
        let alice_ok = (0..3).all(|x| {
            FourOutcome::ALL.iter().all(|&a| {
                let m0 = self.alice_marginal(x, 0, a);
                (1..3).all(|y| (self.alice_marginal(x, y, a) - m0).abs() <= tol)
            })
        });
        let bob_ok = (0..3).all(|y| {
            FourOutcome::ALL.iter().all(|&b| {
                let m0 = self.bob_marginal(0, y, b);
                (1..3).all(|x| (self.bob_marginal(x, y, b) - m0).abs() <= tol)
            })
        });
        alice_ok && bob_ok
    }
}

/// Expression value with expectations taken over `p(a, b | x, y)`.
pub fn beta_behavior(behavior: &Behavior, expr: &BellExpression) -> f64 {
    let mut total = 0.0;
    for x in 0..3 {
        for y in 0..3 {
            for a in FourOutcome::ALL {
                for b in FourOutcome::ALL {
                    total += behavior.get(x, y, a, b) * f64::from(expr.term(x, y, a, b));
                }
            }
        }
    }
    total
}
