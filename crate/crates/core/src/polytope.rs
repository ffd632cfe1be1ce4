//! Local deterministic strategies, exact local and no-signaling bounds, and
//! the facet test by affine rank.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::inequalities::{
    behavior_slot, beta_quantum, BellExpression, Behavior, BEHAVIOR_LEN, NS_BOUND,
};
use crate::observables::FourOutcome;
use crate::qla::VALUE_TOL;
use crate::states::{four_qubit_product, FourQubitProductLabel};

/// Number of joint deterministic strategies: 4³ per party, squared.
pub const STRATEGY_COUNT: usize = 4096;

/// A local deterministic model: each setting mapped to a fixed outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub alice: [FourOutcome; 3],
    pub bob: [FourOutcome; 3],
}

fn party_code(map: &[FourOutcome; 3]) -> usize {
    map.iter().fold(0, |acc, o| acc * 4 + o.index())
}

fn party_map(code: usize) -> [FourOutcome; 3] {
    [
        FourOutcome::from_index(code / 16 % 4),
        FourOutcome::from_index(code / 4 % 4),
        FourOutcome::from_index(code % 4),
    ]
}

impl DeterministicStrategy {
    /// Strategy `index` in `0..4096`: Alice's map in the high six bits,
    /// setting 0 most significant within each party.
    pub fn from_index(index: usize) -> DeterministicStrategy {
        debug_assert!(index < STRATEGY_COUNT);
        DeterministicStrategy {
            alice: party_map(index / 64),
            bob: party_map(index % 64),
        }
    }

    pub fn index(&self) -> usize {
        party_code(&self.alice) * 64 + party_code(&self.bob)
    }

    /// Exact integer value of `expr` on this strategy.
    pub fn beta(&self, expr: &BellExpression) -> i32 {
        (0..3)
            .flat_map(|x| (0..3).map(move |y| (x, y)))
            .map(|(x, y)| expr.term(x, y, self.alice[x], self.bob[y]))
            .sum()
    }

    /// The 0/1 probability table of this strategy.
    pub fn vertex(&self) -> Vec<i64> {
        let mut v = vec![0; BEHAVIOR_LEN];
        for x in 0..3 {
            for y in 0..3 {
                v[behavior_slot(x, y, self.alice[x], self.bob[y])] = 1;
            }
        }
        v
    }

    pub fn to_behavior(&self) -> Behavior {
        Behavior::new(self.vertex().into_iter().map(|p| p as f64).collect())
            .expect("deterministic tables are normalized")
    }

    /// Exchanges the roles of Alice and Bob.
    pub fn swapped(&self) -> DeterministicStrategy {
        DeterministicStrategy {
            alice: self.bob,
            bob: self.alice,
        }
    }
}

impl fmt::Display for DeterministicStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |m: &[FourOutcome; 3]| {
            m.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
        };
        write!(f, "A[{}] B[{}]", show(&self.alice), show(&self.bob))
    }
}

/// All 4096 joint strategies, in index order.
pub fn enumerate_strategies() -> impl Iterator<Item = DeterministicStrategy> {
    (0..STRATEGY_COUNT).map(DeterministicStrategy::from_index)
}

/// Vertices of the local polytope as integer rows of length 144.
pub fn vertex_matrix() -> Vec<Vec<i64>> {
    enumerate_strategies().map(|s| s.vertex()).collect()
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Incrementally built row echelon basis over the integers.
///
/// Rows are kept sorted by pivot column, each row zero left of its pivot and
/// divided through by the gcd of its entries.
#[derive(Debug, Clone, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, Vec<i64>)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, mut v: Vec<i64>) -> Result<bool> {
        for (pivot, row) in &self.rows {
            let target = v[*pivot];
            if target == 0 {
                continue;
            }
            let g = gcd(target, row[*pivot]);
            let (keep, sub) = (row[*pivot] / g, target / g);
            for (x, r) in v.iter_mut().zip(row) {
                *x = x
                    .checked_mul(keep)
                    .and_then(|a| r.checked_mul(sub).and_then(|b| a.checked_sub(b)))
                    .ok_or(Error::Overflow)?;
            }
            let content = v.iter().fold(0, |acc, &x| gcd(acc, x));
            if content > 1 {
                v.iter_mut().for_each(|x| *x /= content);
            }
        }
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return Ok(false);
        };
        let at = self.rows.partition_point(|(p, _)| *p < pivot);
        self.rows.insert(at, (pivot, v));
        Ok(true)
    }
}

/// Exact rank of an integer matrix.
pub fn integer_rank<I>(rows: I) -> Result<usize>
where
    I: IntoIterator<Item = Vec<i64>>,
{
    let mut basis = EchelonBasis::new();
    for row in rows {
        basis.insert(row)?;
    }
    Ok(basis.rank())
}

/// Affine dimension of a point set: the rank of differences to the first
/// point. `None` for an empty set.
pub fn affine_dimension(points: &[Vec<i64>]) -> Result<Option<usize>> {
    let Some((origin, rest)) = points.split_first() else {
        return Ok(None);
    };
    let diffs = rest
        .iter()
        .map(|p| p.iter().zip(origin).map(|(a, b)| a - b).collect());
    integer_rank(diffs).map(Some)
}

/// Affine dimension of the whole local polytope, computed once.
pub fn local_polytope_dimension() -> Result<usize> {
    static CELL: OnceLock<Result<usize>> = OnceLock::new();
    CELL.get_or_init(|| {
        affine_dimension(&vertex_matrix()).map(|d| d.expect("vertex set is non-empty"))
    })
    .clone()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LhvBound {
    pub index: usize,
    pub max: i32,
    pub min: i32,
    pub witness: DeterministicStrategy,
    pub saturator_count: usize,
}

/// Exact maximum (and minimum) of `expr` over all deterministic strategies.
pub fn lhv_bound(expr: &BellExpression) -> LhvBound {
    let mut best: Option<(i32, DeterministicStrategy)> = None;
    let mut min = i32::MAX;
    let mut count = 0;
    for s in enumerate_strategies() {
        let v = s.beta(expr);
        min = min.min(v);
        match best {
            Some((m, _)) if v < m => {}
            Some((m, _)) if v == m => count += 1,
            _ => {
                best = Some((v, s));
                count = 1;
            }
        }
    }
    let (max, witness) = best.expect("strategy set is non-empty");
    LhvBound {
        index: expr.index(),
        max,
        min,
        witness,
        saturator_count: count,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NsBound {
    pub index: usize,
    pub value: i32,
    pub witness: FourQubitProductLabel,
    pub quantum_value: f64,
}

/// No-signaling maximum: the algebraic bound Σ|s_ij|, certified tight by the
/// matched Bell product reaching it.
pub fn ns_bound(expr: &BellExpression) -> Result<NsBound> {
    let value = expr.algebraic_max();
    let witness = FourQubitProductLabel::from_index(expr.index())?;
    let quantum_value = beta_quantum(&four_qubit_product(witness), expr)?;
    if value != NS_BOUND || (quantum_value - f64::from(value)).abs() > VALUE_TOL {
        return Err(Error::AttainmentFailed {
            index: expr.index(),
            value: quantum_value,
            expected: value,
        });
    }
    Ok(NsBound {
        index: expr.index(),
        value,
        witness,
        quantum_value,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetReport {
    pub index: usize,
    pub polytope_dim: usize,
    pub saturator_dim: usize,
    pub saturator_count: usize,
    pub is_facet: bool,
}

/// Compares the affine dimension of the vertices saturating the local bound
/// with that of the local polytope.
pub fn facet_check(expr: &BellExpression) -> Result<FacetReport> {
    let bound = lhv_bound(expr);
    let saturators: Vec<Vec<i64>> = enumerate_strategies()
        .filter(|s| s.beta(expr) == bound.max)
        .map(|s| s.vertex())
        .collect();
    let saturator_dim =
        affine_dimension(&saturators)?.ok_or(Error::EmptySaturator(expr.index()))?;
    let polytope_dim = local_polytope_dimension()?;
    Ok(FacetReport {
        index: expr.index(),
        polytope_dim,
        saturator_dim,
        saturator_count: saturators.len(),
        is_facet: saturator_dim + 1 == polytope_dim,
    })
}
