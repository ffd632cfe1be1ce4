//! Dense real-amplitude recomputation of the value table and of the
//! behaviors of Bell products, sharing no code with the library's
//! state-vector engine.

use nlbox::inequalities::behavior_slot;
use nlbox::{BellExpression, BellLabel, Behavior, FourOutcome, FourQubitProductLabel};

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

type Ket2 = [f64; 4];

fn bell(label: BellLabel) -> Ket2 {
    match label {
        BellLabel::PhiPlus => [H, 0.0, 0.0, H],
        BellLabel::PhiMinus => [H, 0.0, 0.0, -H],
        BellLabel::PsiPlus => [0.0, H, H, 0.0],
        BellLabel::PsiMinus => [0.0, H, -H, 0.0],
    }
}

fn kron(a: [f64; 2], b: [f64; 2]) -> Ket2 {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

const Z: [f64; 2] = [1.0, 0.0];
const O: [f64; 2] = [0.0, 1.0];
const P: [f64; 2] = [H, H];
const M: [f64; 2] = [H, -H];

fn add(a: Ket2, b: Ket2, sign: f64) -> Ket2 {
    [0, 1, 2, 3].map(|i| (a[i] + sign * b[i]) * H)
}

fn alice_basis(x: usize) -> [Ket2; 4] {
    match x {
        0 => [kron(Z, Z), kron(Z, O), kron(O, Z), kron(O, O)],
        1 => [kron(P, P), kron(M, P), kron(P, M), kron(M, M)],
        _ => [
            add(kron(Z, P), kron(O, M), 1.0),
            add(kron(Z, P), kron(O, M), -1.0),
            add(kron(O, P), kron(Z, M), 1.0),
            add(kron(O, P), kron(Z, M), -1.0),
        ],
    }
}

fn bob_basis(y: usize) -> [Ket2; 4] {
    match y {
        0 => [kron(Z, P), kron(Z, M), kron(O, P), kron(O, M)],
        1 => [kron(P, Z), kron(M, Z), kron(P, O), kron(M, O)],
        _ => BellLabel::ALL.map(bell),
    }
}

/// Amplitudes over qubits 1..4, qubit 1 most significant.
fn product_state(label: FourQubitProductLabel) -> [f64; 16] {
    let (u, v) = (bell(label.first), bell(label.second));
    let mut psi = [0.0; 16];
    for (i, amp) in psi.iter_mut().enumerate() {
        let q = |k: usize| (i >> (4 - k)) & 1;
        *amp = u[q(1) * 2 + q(2)] * v[q(3) * 2 + q(4)];
    }
    psi
}

/// p(a, b | x, y) with Alice on qubits (1,3) and Bob on (2,4).
fn probability(psi: &[f64; 16], x: usize, a: usize, y: usize, b: usize) -> f64 {
    let (va, wb) = (alice_basis(x)[a], bob_basis(y)[b]);
    let mut amp = 0.0;
    for (i, &c) in psi.iter().enumerate() {
        let q = |k: usize| (i >> (4 - k)) & 1;
        amp += va[q(1) * 2 + q(3)] * wb[q(2) * 2 + q(4)] * c;
    }
    amp * amp
}

/// Bit selectors: setting 0 reads the first bit, 1 the second, 2 both.
fn masked(setting: usize, outcome: usize) -> f64 {
    let first = if outcome < 2 { 1.0 } else { -1.0 };
    let second = if outcome.is_multiple_of(2) { 1.0 } else { -1.0 };
    match setting {
        0 => first,
        1 => second,
        _ => first * second,
    }
}

fn oracle_beta(psi: &[f64; 16], expr: &BellExpression) -> f64 {
    let mut total = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let mut e = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    e += probability(psi, i, a, j, b) * masked(j, a) * masked(i, b);
                }
            }
            total += f64::from(expr.sign(i, j)) * e;
        }
    }
    total
}

fn reference_rows() -> Vec<Vec<i32>> {
    include_str!("../data/table3.csv")
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').skip(2).map(|v| v.trim().parse().unwrap()).collect())
        .collect()
}

#[test]
fn dense_oracle_reproduces_reference_table() {
    let rows = reference_rows();
    assert_eq!(rows.len(), 16);
    for label in FourQubitProductLabel::all() {
        let psi = product_state(label);
        for expr in BellExpression::all() {
            let v = oracle_beta(&psi, expr);
            let expected = f64::from(rows[label.index() - 1][expr.index() - 1]);
            assert!((v - expected).abs() < 1e-12, "{label} β{}: {v}", expr.index());
        }
    }
}

#[test]
fn dense_oracle_matches_library_behaviors() {
    for label in FourQubitProductLabel::all() {
        let psi = product_state(label);
        let behavior = Behavior::from_state(&nlbox::states::four_qubit_product(label)).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                for a in FourOutcome::ALL {
                    for b in FourOutcome::ALL {
                        let p = probability(&psi, x, a.index(), y, b.index());
                        let q = behavior.probs()[behavior_slot(x, y, a, b)];
                        assert!((p - q).abs() < 1e-12, "{label} x={x} y={y} {a}{b}");
                    }
                }
            }
        }
    }
}

#[test]
fn matched_state_outcomes_are_certain_pairs() {
    // on its own state each term's correlator is ±1, so for every setting
    // pair only outcome pairs consistent with the sign occur
    for expr in BellExpression::all() {
        let psi = product_state(FourQubitProductLabel::from_index(expr.index()).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..4 {
                    for b in 0..4 {
                        let product = masked(j, a) * masked(i, b);
                        if product != f64::from(expr.sign(i, j)) {
                            assert!(probability(&psi, i, a, j, b) < 1e-24);
                        }
                    }
                }
            }
        }
    }
}
