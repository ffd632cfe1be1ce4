//! Report documents produced by each command.

use serde::Serialize;

use nlbox::polytope::{facet_check, lhv_bound, ns_bound, STRATEGY_COUNT};
use nlbox::reference::{table3, ValueTable};
use nlbox::sampler::{summarize, ProtocolSampler, SampleSummary};
use nlbox::states::four_qubit_product;
use nlbox::swap::class_map;
use nlbox::{beta_quantum, BellExpression, FourQubitProductLabel, Result};

use crate::format::sig;

pub const SCHEMA_VERSION: u32 = 1;
pub const TABLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub state_index: usize,
    pub state: String,
    pub inequality: usize,
    pub computed: f64,
    pub expected: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table3Report {
    pub schema_version: u32,
    pub tolerance: f64,
    pub total: usize,
    pub matches: usize,
    /// Rows are states in index order, columns are inequalities 1..16.
    pub values: Vec<Vec<f64>>,
    pub mismatches: Vec<Mismatch>,
}

impl Table3Report {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Evaluates `expressions` on the sixteen Bell products and compares them
/// with the reference table.
pub fn verify_table3(expressions: &[BellExpression]) -> Result<Table3Report> {
    let reference: ValueTable = table3()?;
    let mut values = Vec::with_capacity(16);
    let mut mismatches = Vec::new();
    for label in FourQubitProductLabel::all() {
        let state = four_qubit_product(label);
        let mut row = Vec::with_capacity(expressions.len());
        for expr in expressions {
            let computed = beta_quantum(&state, expr)?;
            let expected = reference[label.index() - 1][expr.index() - 1];
            if (computed - f64::from(expected)).abs() > TABLE_TOL {
                mismatches.push(Mismatch {
                    state_index: label.index(),
                    state: label.code(),
                    inequality: expr.index(),
                    computed: sig(computed),
                    expected,
                });
            }
            row.push(sig(computed));
        }
        values.push(row);
    }
    Ok(Table3Report {
        schema_version: SCHEMA_VERSION,
        tolerance: TABLE_TOL,
        total: 16 * expressions.len(),
        matches: 16 * expressions.len() - mismatches.len(),
        values,
        mismatches,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub index: usize,
    pub lhv_max: i32,
    pub lhv_min: i32,
    pub ns_value: i32,
    pub quantum_value: f64,
    pub ns_witness: String,
    pub saturator_count: usize,
    pub saturator_dim: usize,
    pub is_facet: bool,
    pub lhv_witness: String,
    pub lhv_witness_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub schema_version: u32,
    pub strategies: usize,
    pub polytope_dim: usize,
    pub lhv_bound: i32,
    pub ns_bound: i32,
    pub inequalities: Vec<BoundRow>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.inequalities.iter().all(|r| {
            r.lhv_max == self.lhv_bound
                && r.ns_value == self.ns_bound
                && r.is_facet
                && r.saturator_dim + 1 == self.polytope_dim
        })
    }
}

pub fn bounds() -> Result<BoundsReport> {
    let mut rows = Vec::with_capacity(16);
    let mut polytope_dim = 0;
    for expr in BellExpression::all() {
        let lhv = lhv_bound(expr);
        let ns = ns_bound(expr)?;
        let facet = facet_check(expr)?;
        polytope_dim = facet.polytope_dim;
        rows.push(BoundRow {
            index: expr.index(),
            lhv_max: lhv.max,
            lhv_min: lhv.min,
            ns_value: ns.value,
            quantum_value: sig(ns.quantum_value),
            ns_witness: ns.witness.code(),
            saturator_count: facet.saturator_count,
            saturator_dim: facet.saturator_dim,
            is_facet: facet.is_facet,
            lhv_witness: lhv.witness.to_string(),
            lhv_witness_index: lhv.witness.index(),
        });
    }
    Ok(BoundsReport {
        schema_version: SCHEMA_VERSION,
        strategies: STRATEGY_COUNT,
        polytope_dim,
        lhv_bound: nlbox::inequalities::LHV_BOUND,
        ns_bound: nlbox::inequalities::NS_BOUND,
        inequalities: rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapRow {
    pub robot_outcome: String,
    pub resulting_state: String,
    pub matched_inequality: usize,
    pub probability: f64,
    pub fidelity: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapReport {
    pub schema_version: u32,
    pub sources: String,
    pub is_permutation: bool,
    pub entries: Vec<SwapRow>,
}

impl SwapReport {
    pub fn passed(&self) -> bool {
        self.is_permutation && self.entries.iter().all(|e| e.beta == 9.0)
    }
}

pub fn swap_map(sources: FourQubitProductLabel) -> Result<SwapReport> {
    let entries = class_map(sources)?;
    let mut seen = [false; 16];
    for e in &entries {
        seen[e.matched_inequality - 1] = true;
    }
    Ok(SwapReport {
        schema_version: SCHEMA_VERSION,
        sources: sources.code(),
        is_permutation: entries.len() == 16 && seen.iter().all(|&s| s),
        entries: entries
            .iter()
            .map(|e| SwapRow {
                robot_outcome: e.outcome.code(),
                resulting_state: e.resulting_state.code(),
                matched_inequality: e.matched_inequality,
                probability: sig(e.probability),
                fidelity: sig(e.fidelity),
                beta: sig(e.beta),
            })
            .collect(),
    })
}

/// Samples `shots` runs and summarizes them by class.
pub fn sample(
    shots: u64,
    seed: u64,
    sources: FourQubitProductLabel,
) -> Result<(Vec<nlbox::EventRecord>, SampleSummary)> {
    let sampler = ProtocolSampler::new(sources)?;
    let events = sampler.sample(shots, seed);
    let mut summary = summarize(&sampler, &events, seed)?;
    for class in &mut summary.classes {
        class.frequency = sig(class.frequency);
        class.beta_hat = class.beta_hat.map(sig);
        class.std_error = class.std_error.map(sig);
    }
    Ok((events, summary))
}
