//! Seeded Monte Carlo runs of the swapping protocol, class sorting and
//! empirical Bell values.
//!
//! Every run draws from its own ChaCha8 stream: the generator is seeded
//! with the 64-bit run seed and its stream id is set to the run id. Runs
//! are therefore independent of each other and of how many runs are
//! generated, and can be produced in parallel.
//!
//! Within a run the variates are consumed in a fixed order: Alice's
//! setting, Bob's setting, the robot's two Bell measurements, Alice's
//! outcome, Bob's outcome.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inequalities::{mask_pattern, BellExpression, Behavior, PartyLayout};
use crate::observables::{alice_observables, bob_observables, FourOutcome};
use crate::qla::{born_select, outcome_probabilities, StateVector};
use crate::states::FourQubitProductLabel;
use crate::swap::{RobotBranches, RobotOutcome};

/// Deterministic per-run random source.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform variate in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    /// Uniform setting in {0, 1, 2}.
    pub fn setting(&mut self) -> usize {
        self.rng.random_range(0..3)
    }
}

/// One run of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EventRecord {
    pub run_id: u64,
    pub alice_setting: usize,
    pub alice_outcome: FourOutcome,
    pub bob_setting: usize,
    pub bob_outcome: FourOutcome,
    pub robot_outcome: RobotOutcome,
}

impl EventRecord {
    /// Product of the outcome bits read by the term of this run's settings.
    pub fn masked_product(&self) -> i32 {
        let (ma, mb) = mask_pattern(self.alice_setting, self.bob_setting);
        ma.value(self.alice_outcome) * mb.value(self.bob_outcome)
    }

    /// Whether the run agrees with the sign of its term in `expr`.
    pub fn saturates(&self, expr: &BellExpression) -> bool {
        self.masked_product() == expr.sign(self.alice_setting, self.bob_setting)
    }
}

/// Born-rule branch probabilities of the two parties' measurements on one
/// post-selected state for one setting pair: Alice first, then Bob on
/// Alice's post-measurement state.
#[derive(Debug, Clone, PartialEq)]
pub struct PartyBranches {
    pub alice: [f64; 4],
    pub bob: [[f64; 4]; 4],
}

fn normalized(p: Vec<f64>) -> Result<[f64; 4]> {
    let total: f64 = p.iter().sum();
    if total < 1e-300 {
        return Err(Error::ZeroNorm);
    }
    let mut out = [0.0; 4];
    for (o, v) in out.iter_mut().zip(&p) {
        *o = v / total;
    }
    Ok(out)
}

impl PartyBranches {
    pub fn new(state: &StateVector, x: usize, y: usize) -> Result<Self> {
        let layout = PartyLayout::SWAPPED;
        let alice_ops = alice_observables()[x].projectors();
        let bob_ops = bob_observables()[y].projectors();
        let alice = normalized(outcome_probabilities(state, alice_ops, &layout.alice)?)?;
        let mut bob = [[0.0; 4]; 4];
        for (a, row) in bob.iter_mut().enumerate() {
            if alice[a] > 0.0 {
                let post = state.apply(&alice_ops[a], &layout.alice)?.normalize()?;
                *row = normalized(outcome_probabilities(&post, bob_ops, &layout.bob)?)?;
            }
        }
        Ok(Self { alice, bob })
    }

    pub fn sample(&self, rand_alice: f64, rand_bob: f64) -> (FourOutcome, FourOutcome) {
        let a = born_select(&self.alice, rand_alice);
        let b = born_select(&self.bob[a], rand_bob);
        (FourOutcome::from_index(a), FourOutcome::from_index(b))
    }
}

/// Precomputed protocol for a choice of sources.
#[derive(Debug, Clone)]
pub struct ProtocolSampler {
    sources: FourQubitProductLabel,
    branches: RobotBranches,
    /// Indexed by robot outcome, then settings.
    parties: Vec<[[PartyBranches; 3]; 3]>,
}

impl ProtocolSampler {
    pub fn new(sources: FourQubitProductLabel) -> Result<Self> {
        let branches = RobotBranches::new(sources)?;
        let parties = branches
            .entries()
            .iter()
            .map(|entry| {
                let cell = |x, y| PartyBranches::new(&entry.post_state, x, y);
                Ok([
                    [cell(0, 0)?, cell(0, 1)?, cell(0, 2)?],
                    [cell(1, 0)?, cell(1, 1)?, cell(1, 2)?],
                    [cell(2, 0)?, cell(2, 1)?, cell(2, 2)?],
                ])
            })
            .collect::<Result<_>>()?;
        Ok(Self { sources, branches, parties })
    }

    pub fn party_branches(&self, outcome: RobotOutcome, x: usize, y: usize) -> &PartyBranches {
        &self.parties[outcome.index()][x][y]
    }

    pub fn sources(&self) -> FourQubitProductLabel {
        self.sources
    }

    pub fn branches(&self) -> &RobotBranches {
        &self.branches
    }

    /// Generates run `run_id` from its own substream of `seed`.
    pub fn run(&self, seed: u64, run_id: u64) -> EventRecord {
        let mut rng = RandomStream::new(seed, run_id);
        let x = rng.setting();
        let y = rng.setting();
        let robot_outcome = self.branches.sample(rng.uniform(), rng.uniform());
        let (alice_outcome, bob_outcome) =
            self.party_branches(robot_outcome, x, y).sample(rng.uniform(), rng.uniform());
        EventRecord {
            run_id,
            alice_setting: x,
            alice_outcome,
            bob_setting: y,
            bob_outcome,
            robot_outcome,
        }
    }

    /// Runs `0..n`, ordered by run id.
    pub fn sample(&self, n: u64, seed: u64) -> Vec<EventRecord> {
        (0..n).into_par_iter().map(|id| self.run(seed, id)).collect()
    }
}

pub fn sample_events(n: u64, seed: u64, sources: FourQubitProductLabel) -> Result<Vec<EventRecord>> {
    Ok(ProtocolSampler::new(sources)?.sample(n, seed))
}

/// Runs drawn directly from a behavior with uniform settings; every record
/// carries the robot outcome `label`.
pub fn sample_behavior(behavior: &Behavior, n: u64, seed: u64, label: RobotOutcome) -> Vec<EventRecord> {
    (0..n)
        .into_par_iter()
        .map(|run_id| {
            let mut rng = RandomStream::new(seed, run_id);
            let x = rng.setting();
            let y = rng.setting();
            let start = (x * 3 + y) * 16;
            let cell = born_select(&behavior.probs()[start..start + 16], rng.uniform());
            EventRecord {
                run_id,
                alice_setting: x,
                alice_outcome: FourOutcome::from_index(cell / 4),
                bob_setting: y,
                bob_outcome: FourOutcome::from_index(cell % 4),
                robot_outcome: label,
            }
        })
        .collect()
}

/// Partitions runs by robot outcome; all sixteen classes are present.
pub fn sort_events(events: &[EventRecord]) -> BTreeMap<RobotOutcome, Vec<EventRecord>> {
    let mut classes: BTreeMap<RobotOutcome, Vec<EventRecord>> =
        RobotOutcome::all().map(|o| (o, Vec::new())).collect();
    for e in events {
        classes.entry(e.robot_outcome).or_default().push(*e);
    }
    classes
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaEstimate {
    pub beta_hat: f64,
    pub std_error: f64,
    pub cell_counts: [[usize; 3]; 3],
    pub cell_means: [[f64; 3]; 3],
}

/// Per-cell empirical means of the masked products, combined with the
/// signs of `expr`. Every setting pair needs at least one run.
pub fn estimate_beta(events: &[EventRecord], expr: &BellExpression) -> Result<BetaEstimate> {
    let mut counts = [[0usize; 3]; 3];
    let mut sums = [[0i64; 3]; 3];
    for e in events {
        counts[e.alice_setting][e.bob_setting] += 1;
        sums[e.alice_setting][e.bob_setting] += i64::from(e.masked_product());
    }
    let mut means = [[0.0; 3]; 3];
    let mut beta_hat = 0.0;
    let mut variance = 0.0;
    for x in 0..3 {
        for y in 0..3 {
            let n = counts[x][y];
            if n == 0 {
                return Err(Error::InsufficientSamples { x, y });
            }
            let mean = sums[x][y] as f64 / n as f64;
            means[x][y] = mean;
            beta_hat += f64::from(expr.sign(x, y)) * mean;
            // products are ±1, so the per-run variance is 1 − mean²
            variance += (1.0 - mean * mean) / n as f64;
        }
    }
    Ok(BetaEstimate {
        beta_hat,
        std_error: variance.sqrt(),
        cell_counts: counts,
        cell_means: means,
    })
}

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSummary {
    pub robot_outcome: String,
    pub resulting_state: String,
    pub count: usize,
    pub frequency: f64,
    pub matched_index: usize,
    pub beta_hat: Option<f64>,
    pub std_error: Option<f64>,
    pub cell_counts: [[usize; 3]; 3],
    /// Runs whose masked product equals the sign of their term.
    pub saturating_events: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    pub schema_version: u32,
    pub shots: u64,
    pub seed: u64,
    pub sources: String,
    pub classes: Vec<ClassSummary>,
}

impl SampleSummary {
    /// Whether every run saturates its class's matched inequality.
    pub fn all_saturated(&self) -> bool {
        self.classes.iter().all(|c| c.saturating_events == c.count)
    }
}

/// Sorts runs, scores each class on its matched inequality and records the
/// cells that lack samples.
pub fn summarize(sampler: &ProtocolSampler, events: &[EventRecord], seed: u64) -> Result<SampleSummary> {
    let total = events.len();
    let classes = sort_events(events)
        .into_iter()
        .map(|(outcome, runs)| {
            let entry = sampler.branches().entry(outcome);
            let expr = BellExpression::new(entry.matched_inequality)?;
            let estimate = estimate_beta(&runs, &expr);
            let mut cell_counts = [[0usize; 3]; 3];
            for e in &runs {
                cell_counts[e.alice_setting][e.bob_setting] += 1;
            }
            Ok(ClassSummary {
                robot_outcome: outcome.code(),
                resulting_state: entry.resulting_state.code(),
                count: runs.len(),
                frequency: if total == 0 { 0.0 } else { runs.len() as f64 / total as f64 },
                matched_index: entry.matched_inequality,
                beta_hat: estimate.as_ref().ok().map(|e| e.beta_hat),
                std_error: estimate.as_ref().ok().map(|e| e.std_error),
                cell_counts,
                saturating_events: runs.iter().filter(|e| e.saturates(&expr)).count(),
                error: estimate.err().map(|e| e.to_string()),
            })
        })
        .collect::<Result<_>>()?;
    Ok(SampleSummary {
        schema_version: SUMMARY_SCHEMA_VERSION,
        shots: total as u64,
        seed,
        sources: sampler.sources().code(),
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::beta_behavior;
    use crate::reference::table3;
    use crate::states::{eight_qubit_initial, four_qubit_product, BellLabel, SINGLET_SOURCES};
    use crate::qla::measure_on;
    use crate::swap::bell_measurement_pair;

    fn sampler() -> ProtocolSampler {
        ProtocolSampler::new(SINGLET_SOURCES).unwrap()
    }

    #[test]
    fn same_seed_same_events() {
        let s = sampler();
        assert_eq!(s.sample(500, 42), s.sample(500, 42));
        assert_ne!(s.sample(500, 42), s.sample(500, 43));
    }

    #[test]
    fn runs_do_not_depend_on_batch_size() {
        let s = sampler();
        let short = s.sample(100, 7);
        let long = s.sample(1000, 7);
        assert_eq!(&long[..100], &short[..]);
        assert_eq!(s.run(7, 555), long[555]);
    }

    #[test]
    fn robot_sampling_matches_state_measurement() {
        // the cached branches pick the same outcome as measuring the register
        let initial = eight_qubit_initial();
        let s = sampler();
        for run_id in 0..200 {
            let mut rng = RandomStream::new(3, run_id);
            rng.setting();
            rng.setting();
            let (r1, r2) = (rng.uniform(), rng.uniform());
            let exact = bell_measurement_pair(&initial, r1, r2).unwrap();
            assert_eq!(s.run(3, run_id).robot_outcome, exact.outcome);
        }
    }

    #[test]
    fn party_tables_match_sequential_measurement() {
        let s = sampler();
        let layout = PartyLayout::SWAPPED;
        for outcome in RobotOutcome::all().step_by(5) {
            let state = &s.branches().entry(outcome).post_state;
            for x in 0..3 {
                for y in 0..3 {
                    let table = s.party_branches(outcome, x, y);
                    for run_id in 0..40 {
                        let mut rng = RandomStream::new(21, run_id);
                        let (ra, rb) = (rng.uniform(), rng.uniform());
                        let alice = measure_on(state, alice_observables()[x].projectors(), &layout.alice, ra).unwrap();
                        let bob = measure_on(&alice.post, bob_observables()[y].projectors(), &layout.bob, rb).unwrap();
                        let (a, b) = table.sample(ra, rb);
                        assert_eq!((a.index(), b.index()), (alice.outcome, bob.outcome));
                    }
                }
            }
        }
    }

    fn within_sigmas(count: usize, n: usize, p: f64, sigmas: f64) -> bool {
        let mean = n as f64 * p;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        (count as f64 - mean).abs() <= sigmas * sd
    }

    #[test]
    fn class_and_setting_frequencies() {
        let n = 16_000;
        let events = sampler().sample(n as u64, 2024);
        for (_, class) in sort_events(&events) {
            assert!(within_sigmas(class.len(), n, 1.0 / 16.0, 5.0), "{}", class.len());
        }
        let mut settings = [[0usize; 3]; 3];
        for e in &events {
            settings[e.alice_setting][e.bob_setting] += 1;
        }
        for c in settings.iter().flatten() {
            assert!(within_sigmas(*c, n, 1.0 / 9.0, 5.0));
        }
    }

    #[test]
    fn sorting_preserves_events() {
        let events = sampler().sample(1000, 1);
        let classes = sort_events(&events);
        assert_eq!(classes.len(), 16);
        assert_eq!(classes.values().map(Vec::len).sum::<usize>(), 1000);
        let empty = sort_events(&[]);
        assert_eq!(empty.len(), 16);
        assert!(empty.values().all(Vec::is_empty));
    }

    #[test]
    fn every_run_saturates_its_class() {
        let s = sampler();
        let events = s.sample(5000, 99);
        for e in &events {
            let k = s.branches().entry(e.robot_outcome).matched_inequality;
            assert!(e.saturates(&BellExpression::new(k).unwrap()));
        }
        for (outcome, class) in sort_events(&events) {
            let k = s.branches().entry(outcome).matched_inequality;
            let est = estimate_beta(&class, &BellExpression::new(k).unwrap()).unwrap();
            assert_eq!(est.beta_hat, 9.0);
        }
    }

    #[test]
    fn single_event_per_cell_scores_nine() {
        let s = sampler();
        let events = s.sample(3000, 5);
        let outcome = events[0].robot_outcome;
        let mut picked = Vec::new();
        for x in 0..3 {
            for y in 0..3 {
                let e = events
                    .iter()
                    .find(|e| e.robot_outcome == outcome && e.alice_setting == x && e.bob_setting == y)
                    .unwrap();
                picked.push(*e);
            }
        }
        let k = s.branches().entry(outcome).matched_inequality;
        let est = estimate_beta(&picked, &BellExpression::new(k).unwrap()).unwrap();
        assert_eq!(est.beta_hat, 9.0);
        assert_eq!(est.cell_counts, [[1; 3]; 3]);
    }

    #[test]
    fn mismatched_inequality_tends_to_reference_value() {
        let s = sampler();
        let events = s.sample(60_000, 11);
        let reference = table3().unwrap();
        let classes = sort_events(&events);
        for (outcome, class) in classes.iter().take(4) {
            let state = s.branches().entry(*outcome).resulting_state.index();
            for k in [1, 6, 11, 16] {
                if k == state {
                    continue;
                }
                let est = estimate_beta(class, &BellExpression::new(k).unwrap()).unwrap();
                let expected = f64::from(reference[state - 1][k - 1]);
                assert!(
                    (est.beta_hat - expected).abs() <= 5.0 * est.std_error,
                    "class {outcome:?} β{k}: {} vs {expected}",
                    est.beta_hat
                );
            }
        }
    }

    #[test]
    fn empty_cell_is_an_error() {
        let events = sampler().sample(200, 8);
        let only_diagonal: Vec<_> = events
            .into_iter()
            .filter(|e| e.alice_setting == e.bob_setting)
            .collect();
        let err = estimate_beta(&only_diagonal, &BellExpression::new(1).unwrap()).unwrap_err();
        assert_eq!(err, Error::InsufficientSamples { x: 0, y: 1 });
    }

    #[test]
    fn estimator_converges_on_synthetic_behavior() {
        let pure = Behavior::from_state(&four_qubit_product(FourQubitProductLabel::from_index(1).unwrap())).unwrap();
        let noisy = pure.mix(&Behavior::uniform(), 0.55);
        let label = RobotOutcome::new(BellLabel::PhiPlus, BellLabel::PhiPlus);
        let events = sample_behavior(&noisy, 100_000, 17, label);
        for k in [1, 4, 16] {
            let expr = BellExpression::new(k).unwrap();
            let est = estimate_beta(&events, &expr).unwrap();
            let expected = beta_behavior(&noisy, &expr);
            assert!(
                (est.beta_hat - expected).abs() <= 4.0 * est.std_error,
                "β{k}: {} vs {expected} (se {})",
                est.beta_hat,
                est.std_error
            );
        }
    }

    #[test]
    fn summary_reports_each_class() {
        let s = sampler();
        let events = s.sample(2000, 3);
        let summary = summarize(&s, &events, 3).unwrap();
        assert_eq!(summary.classes.len(), 16);
        assert!(summary.all_saturated());
        for c in &summary.classes {
            if c.error.is_none() {
                assert_eq!(c.beta_hat, Some(9.0));
            }
        }
        let sparse = summarize(&s, &events[..20], 3).unwrap();
        assert!(sparse.classes.iter().any(|c| c.error.is_some() && c.beta_hat.is_none()));
    }
}
