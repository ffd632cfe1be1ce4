//! Dense complex linear algebra on small qubit registers.
//!
//! States carry an explicit labeling of physical qubits. The qubit at
//! position `p` of a labeling of `n` qubits is stored in bit `n - 1 - p`
//! of the amplitude index, so the first label is the most significant.
//! Operators carry no labels; they are placed onto labeled qubits through
//! [`embed`] or [`StateVector::apply`].

use nalgebra::{Complex as NaComplex, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex amplitude type used for every state and operator entry.
pub type C64 = Complex64;

/// Tolerance for structural assertions (Hermiticity, completeness, norms).
pub const STRUCT_TOL: f64 = 1e-10;

/// Tolerance for Bell-expression values.
pub const VALUE_TOL: f64 = 1e-9;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn check_distinct(labels: &[usize]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(*l));
        }
    }
    Ok(())
}

fn positions_of(labels: &[usize], targets: &[usize]) -> Result<Vec<usize>> {
    check_distinct(targets)?;
    targets
        .iter()
        .map(|t| {
            labels
                .iter()
                .position(|l| l == t)
                .ok_or(Error::UnknownLabel(*t))
        })
        .collect()
}

/// Bit masks (in index space) for each position of an `n`-qubit register.
fn bit_of(position: usize, n: usize) -> usize {
    1 << (n - 1 - position)
}

/// Reads the bits of `index` at `positions` into a sub-index, first position
/// most significant.
fn gather(index: usize, positions: &[usize], n: usize) -> usize {
    positions.iter().fold(0, |acc, &p| {
        (acc << 1) | usize::from(index & bit_of(p, n) != 0)
    })
}

/// Writes the bits of `sub` (first position most significant) into `index`.
fn scatter(index: usize, sub: usize, positions: &[usize], n: usize) -> usize {
    let k = positions.len();
    positions.iter().enumerate().fold(index, |acc, (i, &p)| {
        let bit = bit_of(p, n);
        if sub & (1 << (k - 1 - i)) != 0 {
            acc | bit
        } else {
            acc & !bit
        }
    })
}

/// A pure state on an ordered set of labeled qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    labels: Vec<usize>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>, labels: Vec<usize>) -> Result<Self> {
        check_distinct(&labels)?;
        if labels.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: amplitudes.len(),
            });
        }
        let expected = 1usize << labels.len();
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self { amplitudes, labels })
    }

    pub fn from_real(amplitudes: &[f64], labels: Vec<usize>) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect(), labels)
    }

    /// Computational basis state with a one at `index`.
    pub fn basis(index: usize, labels: Vec<usize>) -> Result<Self> {
        let mut amps = vec![ZERO; 1usize << labels.len()];
        let dim = amps.len();
        *amps.get_mut(index).ok_or(Error::DimensionMismatch {
            expected: dim,
            found: index + 1,
        })? = ONE;
        Self::new(amps, labels)
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm < 1e-300 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|a| a / norm).collect(),
            labels: self.labels.clone(),
        })
    }

    /// Kronecker product; the labeling of the result is the concatenation.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self::new(amplitudes, labels)
    }

    /// The same state stored under a different ordering of its labels.
    pub fn reorder(&self, order: &[usize]) -> Result<StateVector> {
        if order.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labels.len(),
                found: order.len(),
            });
        }
        let positions = positions_of(&self.labels, order)?;
        let n = self.num_qubits();
        let all: Vec<usize> = (0..n).collect();
        let mut amplitudes = vec![ZERO; self.dim()];
        for (old, amp) in self.amplitudes.iter().enumerate() {
            let new = scatter(0, gather(old, &positions, n), &all, n);
            amplitudes[new] = *amp;
        }
        Self::new(amplitudes, order.to_vec())
    }

    /// Reorders labels ascending, the canonical storage order.
    pub fn canonical(&self) -> StateVector {
        let mut order = self.labels.clone();
        order.sort_unstable();
        self.reorder(&order).expect("labels are a permutation of themselves")
    }

    /// Renames qubits; `map` lists `(old, new)` pairs, unlisted labels keep
    /// their names.
    pub fn relabel(&self, map: &[(usize, usize)]) -> Result<StateVector> {
        let labels = self
            .labels
            .iter()
            .map(|l| map.iter().find(|(o, _)| o == l).map_or(*l, |(_, n)| *n))
            .collect();
        Self::new(self.amplitudes.clone(), labels)
    }

    /// `⟨self|other⟩`, with `other` aligned to this labeling first.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        let other = other.reorder(&self.labels)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Squared overlap `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Applies `op` to the qubits `targets` (in listed order), identity
    /// elsewhere, without forming the full matrix.
    pub fn apply(&self, op: &Operator, targets: &[usize]) -> Result<StateVector> {
        let positions = positions_of(&self.labels, targets)?;
        let sub_dim = 1usize << positions.len();
        if op.dim() != sub_dim {
            return Err(Error::DimensionMismatch {
                expected: sub_dim,
                found: op.dim(),
            });
        }
        let n = self.num_qubits();
        let mut out = vec![ZERO; self.dim()];
        for (i, slot) in out.iter_mut().enumerate() {
            let row = gather(i, &positions, n);
            *slot = (0..sub_dim)
                .map(|col| op.get(row, col) * self.amplitudes[scatter(i, col, &positions, n)])
                .sum();
        }
        Self::new(out, self.labels.clone())
    }

    /// Contracts `bra` against the qubits it is labeled with, returning the
    /// (unnormalized) state of the remaining qubits in their current order.
    pub fn contract(&self, bra: &StateVector) -> Result<StateVector> {
        let positions = positions_of(&self.labels, bra.labels())?;
        let n = self.num_qubits();
        let rest: Vec<usize> = (0..n).filter(|p| !positions.contains(p)).collect();
        let labels: Vec<usize> = rest.iter().map(|&p| self.labels[p]).collect();
        let mut out = vec![ZERO; 1usize << rest.len()];
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let b = bra.amplitudes[gather(i, &positions, n)].conj();
            out[gather(i, &rest, n)] += b * amp;
        }
        Self::new(out, labels)
    }
}

/// A square complex matrix of power-of-two dimension, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(2),
                found: dim,
            });
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(dim, vec![ZERO; dim * dim]).expect("power-of-two dimension")
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = ONE;
        }
        op
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let i = C64::new(0.0, 1.0);
        Self::new(2, vec![ZERO, -i, i, ZERO]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    /// The rank-1 projector `|ψ⟩⟨ψ|` in the state's own label order.
    pub fn projector(state: &StateVector) -> Self {
        let amps = state.amplitudes();
        let entries = amps
            .iter()
            .flat_map(|a| amps.iter().map(move |b| a * b.conj()))
            .collect();
        Self::new(state.dim(), entries).expect("state dimension is a power of two")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Operator) -> Operator {
        let dim = self.dim * other.dim;
        let mut entries = vec![ZERO; dim * dim];
        for (r1, c1) in (0..self.dim).flat_map(|r| (0..self.dim).map(move |c| (r, c))) {
            let a = self.get(r1, c1);
            if a == ZERO {
                continue;
            }
            for (r2, c2) in (0..other.dim).flat_map(|r| (0..other.dim).map(move |c| (r, c))) {
                entries[(r1 * other.dim + r2) * dim + c1 * other.dim + c2] = a * other.get(r2, c2);
            }
        }
        Operator { dim, entries }
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * other.get(k, c);
                }
            }
        }
        Ok(Operator { dim: d, entries })
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, factor: f64) -> Operator {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn dagger(&self) -> Operator {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.get(r, c).conj();
            }
        }
        Operator { dim: d, entries }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.dagger(), tol)
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && self
                .matmul(self)
                .map(|sq| sq.approx_eq(self, tol))
                .unwrap_or(false)
    }
}

/// Places `op` on the qubits `targets` (in listed order) of a register
/// labeled `context`, identity on the remaining qubits.
pub fn embed(op: &Operator, targets: &[usize], context: &[usize]) -> Result<Operator> {
    check_distinct(context)?;
    let positions = positions_of(context, targets)?;
    let sub_dim = 1usize << positions.len();
    if op.dim() != sub_dim {
        return Err(Error::DimensionMismatch {
            expected: sub_dim,
            found: op.dim(),
        });
    }
    let n = context.len();
    let dim = 1usize << n;
    let mut entries = vec![ZERO; dim * dim];
    for row in 0..dim {
        let sub_row = gather(row, &positions, n);
        for sub_col in 0..sub_dim {
            let col = scatter(row, sub_col, &positions, n);
            entries[row * dim + col] = op.get(sub_row, sub_col);
        }
    }
    Operator::new(dim, entries)
}

/// `⟨ψ|op|ψ⟩` for a Hermitian operator acting on the state's full register.
pub fn expectation(state: &StateVector, op: &Operator) -> Result<f64> {
    if op.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: op.dim(),
        });
    }
    let deviation = op.max_abs_diff(&op.dagger());
    if deviation > STRUCT_TOL {
        return Err(Error::NotHermitian(deviation));
    }
    let amps = state.amplitudes();
    let value: C64 = (0..op.dim())
        .map(|r| {
            amps[r].conj()
                * (0..op.dim())
                    .map(|c| op.get(r, c) * amps[c])
                    .sum::<C64>()
        })
        .sum();
    if value.im.abs() > STRUCT_TOL {
        return Err(Error::ComplexExpectation(value.im));
    }
    Ok(value.re)
}

/// Result of a projective measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub outcome: usize,
    pub post: StateVector,
    pub probability: f64,
}

fn check_complete(projectors: &[Operator], dim: usize) -> Result<()> {
    let mut total = Operator::zeros(dim);
    for p in projectors {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        total = total.add(p)?;
    }
    let mut deviation = total.max_abs_diff(&Operator::identity(dim));
    for (i, p) in projectors.iter().enumerate() {
        for q in &projectors[i + 1..] {
            deviation = deviation.max(p.matmul(q)?.max_abs_diff(&Operator::zeros(dim)));
        }
    }
    if deviation > STRUCT_TOL {
        return Err(Error::IncompleteProjectors(deviation));
    }
    Ok(())
}

/// Selects the first outcome whose cumulative probability exceeds `rand`.
pub fn born_select(probabilities: &[f64], rand: f64) -> usize {
    let mut cumulative = 0.0;
    let mut last_nonzero = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p > 0.0 {
            last_nonzero = i;
        }
        cumulative += p;
        if rand < cumulative && p > 0.0 {
            return i;
        }
    }
    // rand landed in the rounding gap above the cumulative total
    last_nonzero
}

fn measure_with(
    count: usize,
    rand: f64,
    project: impl Fn(usize) -> Result<StateVector>,
) -> Result<Measurement> {
    let branches: Vec<StateVector> = (0..count).map(project).collect::<Result<_>>()?;
    let probabilities: Vec<f64> = branches.iter().map(StateVector::norm_sqr).collect();
    let total: f64 = probabilities.iter().sum();
    if total < 1e-300 {
        return Err(Error::ZeroNorm);
    }
    let normalized: Vec<f64> = probabilities.iter().map(|p| p / total).collect();
    let outcome = born_select(&normalized, rand);
    let probability = normalized[outcome];
    Ok(Measurement {
        outcome,
        post: branches[outcome].normalize()?,
        probability,
    })
}

/// Born-rule projective measurement with full-register projectors; the
/// outcome is chosen by comparing `rand` against cumulative probabilities in
/// the listed order.
pub fn projective_measure(
    state: &StateVector,
    projectors: &[Operator],
    rand: f64,
) -> Result<Measurement> {
    check_complete(projectors, state.dim())?;
    let all = state.labels().to_vec();
    measure_with(projectors.len(), rand, |i| state.apply(&projectors[i], &all))
}

/// Like [`projective_measure`], with projectors acting on `targets` only.
pub fn measure_on(
    state: &StateVector,
    projectors: &[Operator],
    targets: &[usize],
    rand: f64,
) -> Result<Measurement> {
    check_complete(projectors, 1usize << targets.len())?;
    measure_with(projectors.len(), rand, |i| state.apply(&projectors[i], targets))
}

/// Outcome probabilities of a measurement on `targets`, in listed order.
pub fn outcome_probabilities(
    state: &StateVector,
    projectors: &[Operator],
    targets: &[usize],
) -> Result<Vec<f64>> {
    projectors
        .iter()
        .map(|p| Ok(state.apply(p, targets)?.norm_sqr()))
        .collect()
}

/// A density matrix on an ordered set of labeled qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: Operator,
    labels: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and a non-negative spectrum.
    pub fn new(matrix: Operator, labels: Vec<usize>) -> Result<Self> {
        check_distinct(&labels)?;
        if matrix.dim() != 1usize << labels.len() {
            return Err(Error::DimensionMismatch {
                expected: 1usize << labels.len(),
                found: matrix.dim(),
            });
        }
        if !matrix.is_hermitian(1e-12) {
            return Err(Error::InvalidDensityMatrix("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let rho = Self { matrix, labels };
        let floor = rho.min_eigenvalue();
        if floor < -1e-10 {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {floor:e}"
            )));
        }
        Ok(rho)
    }

    pub fn maximally_mixed(labels: Vec<usize>) -> Result<Self> {
        let dim = 1usize << labels.len();
        Self::new(Operator::identity(dim).scale(1.0 / dim as f64), labels)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.matrix.get(row, col)
    }

    pub fn purity(&self) -> f64 {
        self.matrix
            .matmul(&self.matrix)
            .expect("same dimension")
            .trace()
            .re
    }

    /// `Tr(ρ·op)` for a Hermitian operator on the full register.
    pub fn expectation(&self, op: &Operator) -> Result<f64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        let deviation = op.max_abs_diff(&op.dagger());
        if deviation > STRUCT_TOL {
            return Err(Error::NotHermitian(deviation));
        }
        let value = self.matrix.matmul(op)?.trace();
        if value.im.abs() > STRUCT_TOL {
            return Err(Error::ComplexExpectation(value.im));
        }
        Ok(value.re)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |r, c| {
            let z = self.matrix.get(r, c);
            NaComplex::new(z.re, z.im)
        });
        m.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Reduced density matrix of `state` on `keep` (in listed order).
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let labels = state.labels();
    let kept = positions_of(labels, keep)?;
    let n = state.num_qubits();
    let rest: Vec<usize> = (0..n).filter(|p| !kept.contains(p)).collect();
    let dim = 1usize << kept.len();
    let amps = state.amplitudes();
    let mut entries = vec![ZERO; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            entries[r * dim + c] = (0..1usize << rest.len())
                .map(|e| {
                    let base = scatter(0, e, &rest, n);
                    amps[scatter(base, r, &kept, n)] * amps[scatter(base, c, &kept, n)].conj()
                })
                .sum();
        }
    }
    DensityMatrix::new(Operator::new(dim, entries)?, keep.to_vec())
}
