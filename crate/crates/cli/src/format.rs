//! JSON and CSV rendering.

use serde::Serialize;

use nlbox::sampler::SampleSummary;
use nlbox::{EventRecord, FourOutcome};

use crate::report::{BoundsReport, SwapReport, Table3Report};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

pub fn json<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("report serializes");
    out.push(b'\n');
    out
}

fn csv_bytes(rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn num(x: f64) -> String {
    format!("{}", sig(x))
}

pub fn table3_csv(report: &Table3Report) -> Vec<u8> {
    let mut header = vec!["state_index".to_string(), "state".to_string()];
    header.extend((1..=16).map(|k| format!("beta{k}")));
    let mut rows = vec![header];
    for (i, values) in report.values.iter().enumerate() {
        let label = nlbox::FourQubitProductLabel::from_index(i + 1).expect("index in range");
        let mut row = vec![(i + 1).to_string(), label.code()];
        row.extend(values.iter().map(|&v| num(v)));
        rows.push(row);
    }
    csv_bytes(rows)
}

pub fn bounds_csv(report: &BoundsReport) -> Vec<u8> {
    let header = [
        "index",
        "lhv_max",
        "lhv_min",
        "ns_value",
        "quantum_value",
        "polytope_dim",
        "saturator_dim",
        "saturator_count",
        "is_facet",
        "lhv_witness_index",
        "lhv_witness",
    ];
    let mut rows = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in &report.inequalities {
        rows.push(vec![
            r.index.to_string(),
            r.lhv_max.to_string(),
            r.lhv_min.to_string(),
            r.ns_value.to_string(),
            num(r.quantum_value),
            report.polytope_dim.to_string(),
            r.saturator_dim.to_string(),
            r.saturator_count.to_string(),
            r.is_facet.to_string(),
            r.lhv_witness_index.to_string(),
            r.lhv_witness.clone(),
        ]);
    }
    csv_bytes(rows)
}

pub fn swap_csv(report: &SwapReport) -> Vec<u8> {
    let header = ["robot_outcome", "resulting_state", "matched_inequality", "probability", "fidelity", "beta"];
    let mut rows = vec![header.iter().map(|s| s.to_string()).collect()];
    for e in &report.entries {
        rows.push(vec![
            e.robot_outcome.clone(),
            e.resulting_state.clone(),
            e.matched_inequality.to_string(),
            num(e.probability),
            num(e.fidelity),
            num(e.beta),
        ]);
    }
    csv_bytes(rows)
}

pub fn summary_csv(summary: &SampleSummary) -> Vec<u8> {
    let mut header: Vec<String> = [
        "robot_outcome",
        "resulting_state",
        "count",
        "frequency",
        "matched_index",
        "beta_hat",
        "std_error",
        "saturating_events",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for x in 0..3 {
        for y in 0..3 {
            header.push(format!("n{x}{y}"));
        }
    }
    header.push("error".into());
    let mut rows = vec![header];
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for c in &summary.classes {
        let mut row = vec![
            c.robot_outcome.clone(),
            c.resulting_state.clone(),
            c.count.to_string(),
            num(c.frequency),
            c.matched_index.to_string(),
            opt(c.beta_hat),
            opt(c.std_error),
            c.saturating_events.to_string(),
        ];
        row.extend(c.cell_counts.iter().flatten().map(|n| n.to_string()));
        row.push(c.error.clone().unwrap_or_default());
        rows.push(row);
    }
    csv_bytes(rows)
}

fn bit(v: i32) -> &'static str {
    if v > 0 {
        "+1"
    } else {
        "-1"
    }
}

pub const EVENT_HEADER: [&str; 9] = ["run_id", "x", "y", "a1", "a2", "b1", "b2", "r1", "r2"];

pub fn events_csv(events: &[EventRecord]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(EVENT_HEADER).expect("in-memory write");
    let bits = |o: FourOutcome| [bit(o.first_bit()), bit(o.second_bit())];
    for e in events {
        let [a1, a2] = bits(e.alice_outcome);
        let [b1, b2] = bits(e.bob_outcome);
        w.write_record([
            e.run_id.to_string().as_str(),
            &e.alice_setting.to_string(),
            &e.bob_setting.to_string(),
            a1,
            a2,
            b1,
            b2,
            e.robot_outcome.first.code(),
            e.robot_outcome.second.code(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}
