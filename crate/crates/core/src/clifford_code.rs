//! The Clifford authentication code: a message of `n` qubits is padded with
//! `d` trap qubits in `|0⟩` and conjugated by a secret Clifford on `n + d`
//! qubits. Decoding undoes the Clifford and accepts iff every trap reads 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::adversary::{AttackUnitary, PauliDecomposition};
use crate::channel::{flagged_decode, message_reference_kraus, reject_kraus, FlaggedChannel};
use crate::clifford::{CliffordElement, MAX_UNITARY_QUBITS};
use crate::error::{QauthError, Result};
use crate::linear_sim::{apply_unitary, CMatrix, DensityState, FlaggedOutput, SubsystemLayout};
use crate::pauli::{enumerate_paulis, PauliOperator};
use crate::sampling::{exhaustive_average, sampled_average, AveragedChannel, KeyStrategy, DEFAULT_BATCHES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordCodeParams {
    pub n: usize,
    pub d: usize,
}

impl CliffordCodeParams {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(QauthError::Infeasible(format!(
                "Clifford code needs n, d ≥ 1 (got n={n}, d={d})"
            )));
        }
        if n + d > MAX_UNITARY_QUBITS {
            return Err(QauthError::LimitExceeded {
                what: "Clifford code qubits",
                value: n + d,
                limit: MAX_UNITARY_QUBITS,
            });
        }
        Ok(Self { n, d })
    }

    pub fn total(&self) -> usize {
        self.n + self.d
    }

    fn check_key(&self, key: &CliffordElement) -> Result<()> {
        if key.n() != self.total() {
            return Err(QauthError::SizeMismatch {
                expected: self.total(),
                actual: key.n(),
            });
        }
        Ok(())
    }

    /// Codeword index `c` passes the trap test iff its trap bits are zero.
    fn traps_clean(&self, c: usize) -> bool {
        c >> self.n == 0
    }
}

/// `C_k (ρ_M ⊗ |0⟩⟨0|^{⊗d}) C_k†` on a single register `C`.
pub fn encode(params: &CliffordCodeParams, key: &CliffordElement, rho_m: &DensityState) -> Result<DensityState> {
    params.check_key(key)?;
    if rho_m.layout().total_qubits() != params.n {
        return Err(QauthError::SizeMismatch {
            expected: params.n,
            actual: rho_m.layout().total_qubits(),
        });
    }
    let padded = rho_m.tensor(&DensityState::basis(SubsystemLayout::single("T", params.d)?, 0)?)?;
    let rho_c = padded.merged(SubsystemLayout::single("C", params.total())?)?;
    apply_unitary(&rho_c, &key.to_unitary()?, &["C"])
}

/// Undoes the key on the leading `n + d` qubits of `rho_c` and measures the
/// traps. Any registers after the codeword are carried through.
pub fn decode(
    params: &CliffordCodeParams,
    key: &CliffordElement,
    rho_c: &DensityState,
    omega: &DensityState,
) -> Result<FlaggedOutput> {
    params.check_key(key)?;
    let u_dag = key.to_unitary()?.adjoint();
    let c_dim = 1usize << params.total();
    let m_dim = 1usize << params.n;
    let select = CMatrix::from_fn(m_dim, c_dim, |m, c| {
        if c == m {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    flagged_decode(
        rho_c,
        params.total(),
        &u_dag,
        &[select],
        |c| !params.traps_clean(c),
        omega,
    )
}

/// `𝒟_k(U (ℰ_k ⊗ 1_R)(ρ_MR) U†)`, evaluated on states.
pub fn real_channel(
    params: &CliffordCodeParams,
    key: &CliffordElement,
    attack: &AttackUnitary,
    rho_mr: &DensityState,
    omega: &DensityState,
) -> Result<FlaggedOutput> {
    check_attack(params, attack)?;
    let (m_qubits, r_qubits) = message_reference_shape(rho_mr)?;
    if m_qubits != params.n || r_qubits != attack.r_qubits() {
        return Err(QauthError::SizeMismatch {
            expected: params.n + attack.r_qubits(),
            actual: m_qubits + r_qubits,
        });
    }
    let rho_r_last = reorder_reference_last(rho_mr, params.d)?;
    let layout = SubsystemLayout::new(vec![("C", params.total()), ("R", r_qubits)])?;
    let state = DensityState::new(layout, rho_r_last)?;
    let encoded = apply_unitary(&state, &key.to_unitary()?, &["C"])?;
    let attacked = apply_unitary(&encoded, attack.matrix(), &["C", "R"])?;
    decode(params, key, &attacked, omega)
}

/// `(m_qubits, r_qubits)` of a `[M, R]` state.
pub(crate) fn message_reference_shape(rho: &DensityState) -> Result<(usize, usize)> {
    let systems = rho.layout().systems();
    match systems {
        [(m, mq), (r, rq)] if m == "M" && r == "R" => Ok((*mq, *rq)),
        _ => Err(QauthError::InvalidLayout(format!("expected [M, R], got {systems:?}"))),
    }
}

/// Inserts `pad` zero qubits between `M` and `R`: the matrix of
/// `ρ_MR ⊗ |0⟩⟨0|^{⊗pad}` in the order `[M, pad, R]`.
fn reorder_reference_last(rho_mr: &DensityState, pad: usize) -> Result<CMatrix> {
    let (m_qubits, r_qubits) = message_reference_shape(rho_mr)?;
    let m_dim = 1usize << m_qubits;
    let r_dim = 1usize << r_qubits;
    let c_dim = m_dim << pad;
    let mut out = CMatrix::zeros(c_dim * r_dim, c_dim * r_dim);
    let rho = rho_mr.matrix();
    for r in 0..r_dim {
        for m in 0..m_dim {
            for s in 0..r_dim {
                for k in 0..m_dim {
                    out[(m + c_dim * r, k + c_dim * s)] = rho[(m + m_dim * r, k + m_dim * s)];
                }
            }
        }
    }
    Ok(out)
}

fn check_attack(params: &CliffordCodeParams, attack: &AttackUnitary) -> Result<()> {
    if attack.n_c() != params.total() {
        return Err(QauthError::SizeMismatch {
            expected: params.total(),
            actual: attack.n_c(),
        });
    }
    Ok(())
}

/// The keyed real channel as Kraus operators on `MR`.
///
/// With `W = (U_k† ⊗ I) A (U_k ⊗ I)` restricted to inputs with clean traps,
/// the rows with clean traps form the accept operator and every other
/// message/trap row block gives a reject operator into `R`.
pub fn real_channel_kraus(
    params: &CliffordCodeParams,
    key_unitary: &CMatrix,
    attack: &AttackUnitary,
    omega: &DensityState,
) -> Result<FlaggedChannel> {
    check_attack(params, attack)?;
    let c_dim = 1usize << params.total();
    if key_unitary.nrows() != c_dim {
        return Err(QauthError::SizeMismatch {
            expected: c_dim,
            actual: key_unitary.nrows(),
        });
    }
    let r_dim = attack.r_dim();
    let m_dim = 1usize << params.n;
    let full = CMatrix::identity(r_dim, r_dim).kronecker(key_unitary);
    let w = full.adjoint() * attack.matrix() * &full;
    let in_cols: Vec<usize> = (0..m_dim * r_dim).map(|j| (j % m_dim) + c_dim * (j / m_dim)).collect();
    let g = w.select_columns(&in_cols);
    let mut ch = FlaggedChannel::zero(params.n, attack.r_qubits(), omega.clone())?;
    let acc_rows: Vec<usize> = in_cols.clone();
    ch.add_acc_kraus(&g.select_rows(&acc_rows), 1.0)?;
    for c in (0..c_dim).filter(|&c| !params.traps_clean(c)) {
        let rows: Vec<usize> = (0..r_dim).map(|r| c + c_dim * r).collect();
        ch.add_rej_kraus(&g.select_rows(&rows), 1.0)?;
    }
    Ok(ch)
}

/// `(1/|𝒦|) Σ_k ℰ_k` as a channel.
pub fn keyed_average_channel(
    params: &CliffordCodeParams,
    attack: &AttackUnitary,
    strategy: KeyStrategy,
    omega: &DensityState,
) -> Result<AveragedChannel> {
    check_attack(params, attack)?;
    match strategy {
        KeyStrategy::Exhaustive { allow_two_qubits } => {
            if params.total() > 2 || (params.total() == 2 && !allow_two_qubits) {
                return Err(QauthError::Infeasible(format!(
                    "exhaustive Clifford keys on {} qubits{}",
                    params.total(),
                    if params.total() == 2 {
                        " need the two-qubit flag"
                    } else {
                        ""
                    }
                )));
            }
            let keys = CliffordElement::enumerate_all(params.total(), allow_two_qubits)?;
            exhaustive_average(&keys, |k| real_channel_kraus(params, &k.to_unitary()?, attack, omega))
        }
        KeyStrategy::Sampled { count, seed } => sampled_average(count, DEFAULT_BATCHES, seed, |rng| {
            let key = CliffordElement::sample_uniform(params.total(), rng)?;
            real_channel_kraus(params, &key.to_unitary()?, attack, omega)
        }),
    }
}

/// Key-averaged output on one input, with standard errors of the branch
/// weights (zero for exhaustive averages).
#[derive(Clone, Debug)]
pub struct KeyedOutput {
    pub output: FlaggedOutput,
    pub acc_weight_stderr: f64,
    pub rej_weight_stderr: f64,
}

pub fn keyed_average(
    params: &CliffordCodeParams,
    attack: &AttackUnitary,
    rho_mr: &DensityState,
    strategy: KeyStrategy,
    omega: &DensityState,
) -> Result<KeyedOutput> {
    let avg = keyed_average_channel(params, attack, strategy, omega)?;
    keyed_output(&avg, rho_mr)
}

pub(crate) fn keyed_output(avg: &AveragedChannel, rho: &DensityState) -> Result<KeyedOutput> {
    let output = avg.mean.apply(rho)?;
    if !avg.is_sampled() {
        return Ok(KeyedOutput {
            output,
            acc_weight_stderr: 0.0,
            rej_weight_stderr: 0.0,
        });
    }
    let mut acc = Vec::with_capacity(avg.batches.len());
    for b in &avg.batches {
        acc.push(b.apply(rho)?.acc_weight());
    }
    let (_, se) = crate::sampling::mean_and_stderr(&acc);
    Ok(KeyedOutput {
        output,
        acc_weight_stderr: se,
        rej_weight_stderr: se,
    })
}

/// The key average in closed form. The Clifford twirl removes cross terms
/// between different Pauli components and maps each non-identity component
/// to a uniformly random non-identity Pauli on `n + d` qubits; it is
/// accepted with message Pauli `Q_M` for each of the `2^d − [Q_M = I]` trap
/// parts in `{I, Z}^{⊗d}`.
pub fn twirled_channel(
    params: &CliffordCodeParams,
    decomp: &PauliDecomposition,
    omega: &DensityState,
) -> Result<FlaggedChannel> {
    if decomp.n_c() != params.total() {
        return Err(QauthError::SizeMismatch {
            expected: params.total(),
            actual: decomp.n_c(),
        });
    }
    let m_dim = 1usize << params.n;
    let nonidentity = 4f64.powi(params.total() as i32) - 1.0;
    let two_d = (1u64 << params.d) as f64;
    let p_acc = (4f64.powi(params.n as i32) * two_d - 1.0) / nonidentity;
    let message_paulis: Vec<(PauliOperator, CMatrix)> = enumerate_paulis(params.n)?
        .into_iter()
        .map(|p| p.to_matrix().map(|m| (p, m)))
        .collect::<Result<_>>()?;
    let mut ch = FlaggedChannel::zero(params.n, decomp.r_qubits(), omega.clone())?;
    let id_m = CMatrix::identity(m_dim, m_dim);
    for (p, a, w) in decomp.iter() {
        if w == 0.0 {
            continue;
        }
        if p.is_identity() {
            ch.add_acc_kraus(&message_reference_kraus(&id_m, a), 1.0)?;
            continue;
        }
        for (q, qm) in &message_paulis {
            let count = two_d - if q.is_identity() { 1.0 } else { 0.0 };
            ch.add_acc_kraus(&message_reference_kraus(qm, a), count / nonidentity)?;
        }
        for m in 0..m_dim {
            ch.add_rej_kraus(&reject_kraus(a, m, params.n), 1.0 - p_acc)?;
        }
    }
    Ok(ch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::decompose;
    use crate::channel::default_omega;
    use crate::linear_sim::{trace_distance, MaxAbs};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(n: usize, d: usize) -> CliffordCodeParams {
        CliffordCodeParams::new(n, d).unwrap()
    }

    fn message(n: usize, rng: &mut ChaCha8Rng) -> DensityState {
        DensityState::random_pure(SubsystemLayout::single("M", n).unwrap(), rng).unwrap()
    }

    fn mr_input(n: usize, r: usize, rng: &mut ChaCha8Rng) -> DensityState {
        DensityState::random_pure(SubsystemLayout::new(vec![("M", n), ("R", r)]).unwrap(), rng).unwrap()
    }

    #[test]
    fn identity_key_encodes_to_zeros() {
        let p = params(1, 2);
        let rho = DensityState::basis(SubsystemLayout::single("M", 1).unwrap(), 0).unwrap();
        let enc = encode(&p, &CliffordElement::identity(3), &rho).unwrap();
        assert!((enc.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn encode_preserves_trace_and_purity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = params(2, 1);
        for _ in 0..10 {
            let key = CliffordElement::sample_uniform(3, &mut rng).unwrap();
            let rho = message(2, &mut rng);
            let enc = encode(&p, &key, &rho).unwrap();
            assert!((enc.trace_weight() - 1.0).abs() < 1e-12);
            assert!((enc.purity() - rho.purity()).abs() < 1e-10);
        }
    }

    #[test]
    fn correctness() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (n, d) in [(1, 1), (1, 2), (2, 1)] {
            let p = params(n, d);
            let omega = default_omega(n).unwrap();
            for _ in 0..50 {
                let key = CliffordElement::sample_uniform(n + d, &mut rng).unwrap();
                let rho = message(n, &mut rng);
                let out = decode(&p, &key, &encode(&p, &key, &rho).unwrap(), &omega).unwrap();
                assert!(out.acc_weight() > 1.0 - 1e-9);
                assert!(trace_distance(&out.acc, &rho).unwrap() < 1e-9);
            }
        }
    }

    fn pauli_on_encoded(p: &CliffordCodeParams, lit: &str) -> FlaggedOutput {
        let key = CliffordElement::identity(p.total());
        let rho = DensityState::basis(SubsystemLayout::single("M", p.n).unwrap(), 0).unwrap();
        let enc = encode(p, &key, &rho).unwrap();
        let attack: PauliOperator = lit.parse().unwrap();
        let attacked = apply_unitary(&enc, &attack.to_matrix().unwrap(), &["C"]).unwrap();
        decode(p, &key, &attacked, &default_omega(p.n).unwrap()).unwrap()
    }

    #[test]
    fn trap_and_message_flips() {
        let p = params(1, 2);
        let out = pauli_on_encoded(&p, "IXI");
        assert!((out.rej_weight() - 1.0).abs() < 1e-12);
        let out = pauli_on_encoded(&p, "XII");
        assert!((out.acc_weight() - 1.0).abs() < 1e-12);
        assert!((out.acc.matrix()[(1, 1)].re - 1.0).abs() < 1e-12);
        // Z on a trap is invisible.
        let out = pauli_on_encoded(&p, "IIZ");
        assert!((out.acc_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kraus_form_matches_state_level_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (n, d, r) in [(1, 1, 1), (1, 2, 1), (2, 1, 0)] {
            let p = params(n, d);
            let omega = default_omega(n).unwrap();
            for _ in 0..5 {
                let key = CliffordElement::sample_uniform(n + d, &mut rng).unwrap();
                let attack = AttackUnitary::haar(n + d, r, &mut rng).unwrap();
                let rho = mr_input(n, r, &mut rng);
                let literal = real_channel(&p, &key, &attack, &rho, &omega).unwrap();
                let kraus = real_channel_kraus(&p, &key.to_unitary().unwrap(), &attack, &omega).unwrap();
                let fast = kraus.apply(&rho).unwrap();
                assert!(literal.distance(&fast).unwrap() < 1e-10);
                assert!((literal.total_weight() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn identity_attack_gives_identity_channel() {
        let p = params(1, 1);
        let omega = default_omega(1).unwrap();
        let attack = AttackUnitary::identity(2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = mr_input(1, 1, &mut rng);
        for strategy in [
            KeyStrategy::Exhaustive { allow_two_qubits: true },
            KeyStrategy::Sampled { count: 40, seed: 1 },
        ] {
            let out = keyed_average(&p, &attack, &rho, strategy, &omega).unwrap();
            assert!((out.output.acc.matrix() - rho.matrix()).max_abs() < 1e-12);
            assert!(out.acc_weight_stderr < 1e-12);
        }
        let bad = keyed_average(
            &p,
            &attack,
            &rho,
            KeyStrategy::Exhaustive {
                allow_two_qubits: false,
            },
            &omega,
        );
        assert!(matches!(bad, Err(QauthError::Infeasible(_))));
    }

    #[test]
    fn exhaustive_average_matches_closed_form() {
        let p = params(1, 1);
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for attack in [
            AttackUnitary::haar(2, 1, &mut rng).unwrap(),
            AttackUnitary::pauli(&"XZ".parse().unwrap(), 1).unwrap(),
        ] {
            let avg =
                keyed_average_channel(&p, &attack, KeyStrategy::Exhaustive { allow_two_qubits: true }, &omega).unwrap();
            let closed = twirled_channel(&p, &decompose(&attack).unwrap(), &omega).unwrap();
            assert!((avg.mean.acc().matrix() - closed.acc().matrix()).max_abs() < 1e-10);
            assert!((avg.mean.rej().matrix() - closed.rej().matrix()).max_abs() < 1e-10);
        }
    }

    #[test]
    fn average_is_invariant_under_conjugating_the_attack_by_a_clifford() {
        let p = params(1, 1);
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let attack = AttackUnitary::haar(2, 1, &mut rng).unwrap();
        let fixed = CliffordElement::sample_uniform(2, &mut rng)
            .unwrap()
            .to_unitary()
            .unwrap();
        let moved = attack.conjugated_on_c_by(&fixed).unwrap();
        let strategy = KeyStrategy::Exhaustive { allow_two_qubits: true };
        let a = keyed_average_channel(&p, &attack, strategy, &omega).unwrap();
        let b = keyed_average_channel(&p, &moved, strategy, &omega).unwrap();
        assert!((a.mean.acc().matrix() - b.mean.acc().matrix()).max_abs() < 1e-10);
    }

    #[test]
    fn closed_form_is_trace_preserving() {
        let p = params(1, 2);
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let attack = AttackUnitary::haar(3, 1, &mut rng).unwrap();
        let ch = twirled_channel(&p, &decompose(&attack).unwrap(), &omega).unwrap();
        let rho = mr_input(1, 1, &mut rng);
        let out = ch.apply(&rho).unwrap();
        assert!((out.total_weight() - 1.0).abs() < 1e-9);
    }
}
