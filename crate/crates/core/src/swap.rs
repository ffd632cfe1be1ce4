//! Entanglement swapping between two four-qubit sources.
//!
//! Source one holds qubits 1..4, source two qubits 5..8. A robot measures
//! qubits (2,5) and (4,7) in the Bell basis, after which Alice's qubits
//! (1,3) and Bob's (6,8) are left in a product of Bell states on (1,6) and
//! (3,8). Each of the sixteen robot outcomes therefore selects one of the
//! sixteen nonlocal boxes.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inequalities::{beta_quantum, BellExpression, PartyLayout};
use crate::observables::{alice_observables, bob_observables, FourOutcome};
use crate::qla::{born_select, measure_on, partial_trace, DensityMatrix, Operator, StateVector};
use crate::states::{bell, bell_on, bell_product_on, eight_qubit_state, BellLabel, FourQubitProductLabel};

/// Qubits of the robot's first Bell measurement.
pub const FIRST_PAIR: [usize; 2] = [2, 5];
/// Qubits of the robot's second Bell measurement.
pub const SECOND_PAIR: [usize; 2] = [4, 7];
/// Alice's and Bob's qubits after swapping, canonical order.
pub const PARTY_QUBITS: [usize; 4] = [1, 3, 6, 8];

/// Minimum fidelity accepted when identifying a Bell product.
pub const IDENTIFY_THRESHOLD: f64 = 1.0 - 1e-9;

/// The pair of Bell labels found by the robot on (2,5) and (4,7).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RobotOutcome {
    pub first: BellLabel,
    pub second: BellLabel,
}

impl RobotOutcome {
    pub const fn new(first: BellLabel, second: BellLabel) -> Self {
        Self { first, second }
    }

    pub fn all() -> impl Iterator<Item = RobotOutcome> {
        BellLabel::ALL
            .into_iter()
            .flat_map(|a| BellLabel::ALL.into_iter().map(move |b| Self::new(a, b)))
    }

    /// 0-based position in [`RobotOutcome::all`].
    pub fn index(self) -> usize {
        self.first.index() * 4 + self.second.index()
    }

    pub fn from_index(i: usize) -> RobotOutcome {
        Self::new(BellLabel::ALL[i / 4], BellLabel::ALL[i % 4])
    }

    pub fn code(self) -> String {
        format!("{},{}", self.first.code(), self.second.code())
    }
}

impl fmt::Display for RobotOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}₂₅{}₄₇", self.first.symbol(), self.second.symbol())
    }
}

impl FromStr for RobotOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let l: FourQubitProductLabel = s.parse()?;
        Ok(Self::new(l.first, l.second))
    }
}

/// Bell-basis projectors in [`BellLabel::ALL`] order.
pub fn bell_projectors() -> &'static [Operator; 4] {
    static CELL: OnceLock<[Operator; 4]> = OnceLock::new();
    CELL.get_or_init(|| BellLabel::ALL.map(|l| Operator::projector(&bell(l))))
}

/// Which of the robot's two measurements is performed first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOrder {
    FirstPairFirst,
    SecondPairFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotMeasurement {
    pub outcome: RobotOutcome,
    pub post: StateVector,
    pub probability: f64,
}

/// Bell measurements on (2,5) then (4,7); `rand1` drives the first.
pub fn bell_measurement_pair(state: &StateVector, rand1: f64, rand2: f64) -> Result<RobotMeasurement> {
    bell_measurement_pair_ordered(state, PairOrder::FirstPairFirst, rand1, rand2)
}

pub fn bell_measurement_pair_ordered(
    state: &StateVector,
    order: PairOrder,
    rand1: f64,
    rand2: f64,
) -> Result<RobotMeasurement> {
    let (p, q) = match order {
        PairOrder::FirstPairFirst => (FIRST_PAIR, SECOND_PAIR),
        PairOrder::SecondPairFirst => (SECOND_PAIR, FIRST_PAIR),
    };
    let m1 = measure_on(state, bell_projectors(), &p, rand1)?;
    let m2 = measure_on(&m1.post, bell_projectors(), &q, rand2)?;
    let (l1, l2) = (BellLabel::ALL[m1.outcome], BellLabel::ALL[m2.outcome]);
    let outcome = match order {
        PairOrder::FirstPairFirst => RobotOutcome::new(l1, l2),
        PairOrder::SecondPairFirst => RobotOutcome::new(l2, l1),
    };
    Ok(RobotMeasurement {
        outcome,
        post: m2.post,
        probability: m1.probability * m2.probability,
    })
}

/// Unnormalized projection of an eight-qubit state onto a robot outcome.
pub fn project_robot(state: &StateVector, outcome: RobotOutcome) -> Result<StateVector> {
    state
        .apply(&bell_projectors()[outcome.first.index()], &FIRST_PAIR)?
        .apply(&bell_projectors()[outcome.second.index()], &SECOND_PAIR)
}

/// Exact probability of every robot outcome, in [`RobotOutcome::all`] order.
pub fn robot_distribution(state: &StateVector) -> Result<[f64; 16]> {
    let mut probs = [0.0; 16];
    for o in RobotOutcome::all() {
        probs[o.index()] = project_robot(state, o)?.norm_sqr();
    }
    Ok(probs)
}

/// Strips the robot's Bell pairs from a post-measurement state, returning the
/// normalized state of qubits (1,3,6,8) and the weight of the factorization
/// (1 when the robot's qubits are exactly in the measured Bell states).
pub fn reduce_to_parties(post: &StateVector, outcome: RobotOutcome) -> Result<(StateVector, f64)> {
    let bra = bell_on(outcome.first, FIRST_PAIR[0], FIRST_PAIR[1])
        .tensor(&bell_on(outcome.second, SECOND_PAIR[0], SECOND_PAIR[1]))?;
    let rest = post.contract(&bra)?.reorder(&PARTY_QUBITS)?;
    let weight = rest.norm_sqr() / post.norm_sqr();
    Ok((rest.normalize()?, weight))
}

/// Reference state `label` on (1,6) and (3,8).
pub fn swapped_reference(label: FourQubitProductLabel) -> StateVector {
    bell_product_on(label, (1, 6), (3, 8)).expect("distinct labels")
}

/// Finds the Bell product on (1,6)/(3,8) a four-qubit state equals up to
/// phase.
pub fn identify_bell_product(state: &StateVector) -> Result<(FourQubitProductLabel, f64)> {
    let mut best = (FourQubitProductLabel::new(BellLabel::PhiPlus, BellLabel::PhiPlus), -1.0);
    for label in FourQubitProductLabel::all() {
        let f = swapped_reference(label).fidelity(state)?;
        if f > best.1 {
            best = (label, f);
        }
    }
    if best.1 < IDENTIFY_THRESHOLD {
        return Err(Error::NoMatchingReference(best.1));
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMapEntry {
    pub outcome: RobotOutcome,
    pub resulting_state: FourQubitProductLabel,
    pub matched_inequality: usize,
    pub probability: f64,
    pub fidelity: f64,
    /// Value of the matched inequality on the post-selected state.
    pub beta: f64,
    /// Normalized state of qubits (1,3,6,8).
    pub post_state: StateVector,
}

/// Exact class map for the given sources, in [`RobotOutcome::all`] order.
pub fn class_map(sources: FourQubitProductLabel) -> Result<Vec<ClassMapEntry>> {
    let initial = eight_qubit_state(sources);
    RobotOutcome::all()
        .map(|outcome| {
            let projected = project_robot(&initial, outcome)?;
            let probability = projected.norm_sqr();
            let (post_state, _) = reduce_to_parties(&projected, outcome)?;
            let (resulting_state, fidelity) = identify_bell_product(&post_state)?;
            let matched_inequality = resulting_state.index();
            let beta = beta_quantum(&post_state, &BellExpression::new(matched_inequality)?)?;
            Ok(ClassMapEntry {
                outcome,
                resulting_state,
                matched_inequality,
                probability,
                fidelity,
                beta,
                post_state,
            })
        })
        .collect()
}

/// State of Alice's and Bob's qubits before the robot acts.
pub fn premeasurement_marginal(sources: FourQubitProductLabel) -> Result<DensityMatrix> {
    partial_trace(&eight_qubit_state(sources), &PARTY_QUBITS)
}

/// Branch probabilities of the robot's sequential measurement, computed once
/// so runs can be sampled without touching the eight-qubit register.
///
/// [`RobotBranches::sample`] selects the same outcome as
/// [`bell_measurement_pair`] for the same variates.
#[derive(Debug, Clone)]
pub struct RobotBranches {
    first: [f64; 4],
    second: [[f64; 4]; 4],
    entries: Vec<ClassMapEntry>,
}

fn normalized_norms(branches: &[StateVector]) -> Vec<f64> {
    let norms: Vec<f64> = branches.iter().map(StateVector::norm_sqr).collect();
    let total: f64 = norms.iter().sum();
    norms.iter().map(|n| n / total).collect()
}

impl RobotBranches {
    pub fn new(sources: FourQubitProductLabel) -> Result<Self> {
        let initial = eight_qubit_state(sources);
        let projectors = bell_projectors();
        let mut first = [0.0; 4];
        let mut second = [[0.0; 4]; 4];
        let level1: Vec<StateVector> = projectors
            .iter()
            .map(|p| initial.apply(p, &FIRST_PAIR))
            .collect::<Result<_>>()?;
        for (i, p) in normalized_norms(&level1).into_iter().enumerate() {
            first[i] = p;
        }
        for (i, branch) in level1.iter().enumerate() {
            if first[i] == 0.0 {
                continue;
            }
            let post = branch.normalize()?;
            let level2: Vec<StateVector> = projectors
                .iter()
                .map(|p| post.apply(p, &SECOND_PAIR))
                .collect::<Result<_>>()?;
            for (j, p) in normalized_norms(&level2).into_iter().enumerate() {
                second[i][j] = p;
            }
        }
        Ok(Self {
            first,
            second,
            entries: class_map(sources)?,
        })
    }

    pub fn sample(&self, rand1: f64, rand2: f64) -> RobotOutcome {
        let i = born_select(&self.first, rand1);
        let j = born_select(&self.second[i], rand2);
        RobotOutcome::new(BellLabel::ALL[i], BellLabel::ALL[j])
    }

    pub fn entry(&self, outcome: RobotOutcome) -> &ClassMapEntry {
        &self.entries[outcome.index()]
    }

    pub fn entries(&self) -> &[ClassMapEntry] {
        &self.entries
    }
}

/// When the robot's measurements happen relative to Alice's and Bob's.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationOrder {
    RobotFirst,
    RobotLast,
}

/// `p(robot, a, b | x, y)` indexed as `[robot][a][b]`.
pub type JointDistribution = [[[f64; 4]; 4]; 16];

/// Exact joint distribution of the robot outcome and the local outcomes for
/// Alice setting `x` and Bob setting `y`.
pub fn joint_distribution(
    sources: FourQubitProductLabel,
    x: usize,
    y: usize,
    order: SimulationOrder,
) -> Result<JointDistribution> {
    let alice = alice_observables().get(x).ok_or(Error::InvalidSetting(x))?;
    let bob = bob_observables().get(y).ok_or(Error::InvalidSetting(y))?;
    let layout = PartyLayout::SWAPPED;
    let mut dist = [[[0.0; 4]; 4]; 16];
    match order {
        SimulationOrder::RobotFirst => {
            for entry in class_map(sources)? {
                for a in FourOutcome::ALL {
                    let after_a = entry.post_state.apply(alice.projector(a), &layout.alice)?;
                    for b in FourOutcome::ALL {
                        let p = after_a.apply(bob.projector(b), &layout.bob)?.norm_sqr();
                        dist[entry.outcome.index()][a.index()][b.index()] = entry.probability * p;
                    }
                }
            }
        }
        SimulationOrder::RobotLast => {
            let initial = eight_qubit_state(sources);
            for a in FourOutcome::ALL {
                let after_a = initial.apply(alice.projector(a), &layout.alice)?;
                for b in FourOutcome::ALL {
                    let after_b = after_a.apply(bob.projector(b), &layout.bob)?;
                    for o in RobotOutcome::all() {
                        dist[o.index()][a.index()][b.index()] = project_robot(&after_b, o)?.norm_sqr();
                    }
                }
            }
        }
    }
    Ok(dist)
}
