//! Ideal-world channels.
//!
//! The EPR simulators run the attack on halves of EPR pairs in place of the
//! codeword and accept iff a Bell measurement finds an allowed Pauli. The
//! closed forms express the same channels directly through the attack's
//! Pauli decomposition; the two are independent oracles for each other.

use crate::adversary::{AttackUnitary, PauliDecomposition};
use crate::channel::{message_reference_kraus, reject_kraus, FlaggedChannel};
use crate::error::{QauthError, Result};
use crate::linear_sim::{
    apply_left, apply_unitary, bell_subspace_projector, epr_state, epr_vector, partial_trace, project, CMatrix,
    DensityState, FlaggedOutput, DEFAULT_QUBIT_CAP,
};
use crate::pauli::{enumerate_paulis, in_set_f, PauliOperator, Permutation, QubitPartition};
use crate::sampling::exhaustive_average;

/// Largest number of EPR pairs the dense trap simulator will permute.
pub const MAX_TRAP_SIMULATOR_PAIRS: usize = 3;

fn check_pairs(pairs: usize, r_qubits: usize, message_qubits: usize) -> Result<()> {
    let total = 2 * pairs + r_qubits + message_qubits;
    if total > DEFAULT_QUBIT_CAP {
        return Err(QauthError::LimitExceeded {
            what: "simulator qubits",
            value: total,
            limit: DEFAULT_QUBIT_CAP,
        });
    }
    Ok(())
}

/// Paulis the trap simulator accepts: the set `F` for the trap layout.
pub fn trap_accept_set(n: usize, t: usize) -> Result<Vec<PauliOperator>> {
    let part = QubitPartition::trap_code(n);
    Ok(enumerate_paulis(3 * n)?
        .into_iter()
        .filter(|p| in_set_f(p, &part, t))
        .collect())
}

/// EPR simulator on a state: `ρ_MR ⊗ Φ^{⊗m}` on `[M, R, C1, C2]`, the
/// attack (conjugated by `perm` on `C1`) on `C1 ⊗ R`, then the projector
/// onto the Bell subspace spanned by `accept` on `C1 C2`.
fn epr_simulate(
    attack: &AttackUnitary,
    perm: &Permutation,
    accept: &[PauliOperator],
    rho_mr: &DensityState,
    omega: &DensityState,
) -> Result<FlaggedOutput> {
    let m = attack.n_c();
    let m_qubits = rho_mr.layout().size_of("M")?;
    check_pairs(m, attack.r_qubits(), m_qubits)?;
    let joint = rho_mr.tensor(&epr_state(m)?)?;
    let v = perm.matrix()?;
    let permuted = apply_unitary(&joint, &v, &["C1"])?;
    let attacked = apply_unitary(&permuted, attack.matrix(), &["C1", "R"])?;
    let restored = apply_unitary(&attacked, &v.adjoint(), &["C1"])?;
    let proj = bell_subspace_projector(m, accept)?;
    let dim = proj.nrows();
    let complement = CMatrix::identity(dim, dim) - &proj;
    let acc = partial_trace(&project(&restored, &proj, &["C1", "C2"])?, &["M", "R"])?;
    let rej_r = partial_trace(&project(&restored, &complement, &["C1", "C2"])?, &["R"])?;
    let rej = DensityState::new(rho_mr.layout().clone(), rej_r.matrix().kronecker(omega.matrix()))?;
    Ok(FlaggedOutput { acc, rej })
}

/// Clifford-code simulator on one input: accept iff the Bell measurement
/// on all `n + d` pairs finds `|Φ⁺⟩`.
pub fn ideal_clifford(attack: &AttackUnitary, rho_mr: &DensityState, omega: &DensityState) -> Result<FlaggedOutput> {
    let m = attack.n_c();
    epr_simulate(
        attack,
        &Permutation::identity(m),
        &[PauliOperator::identity(m)],
        rho_mr,
        omega,
    )
}

/// Trap-code simulator on one input: average over every permutation of
/// the `3n` pairs, accepting on the Bell subspace of `F`.
pub fn ideal_trap(
    attack: &AttackUnitary,
    n: usize,
    t: usize,
    rho_mr: &DensityState,
    omega: &DensityState,
) -> Result<FlaggedOutput> {
    check_trap_dense(attack, n)?;
    let accept = trap_accept_set(n, t)?;
    let mut total: Option<FlaggedOutput> = None;
    let mut count = 0usize;
    for perm in Permutation::all(3 * n) {
        let out = epr_simulate(attack, &perm, &accept, rho_mr, omega)?;
        count += 1;
        total = Some(match total {
            None => out,
            Some(acc) => FlaggedOutput {
                acc: add_states(&acc.acc, &out.acc)?,
                rej: add_states(&acc.rej, &out.rej)?,
            },
        });
    }
    let total = total.expect("at least one permutation");
    let scale = 1.0 / count as f64;
    Ok(FlaggedOutput {
        acc: total.acc.scaled(scale),
        rej: total.rej.scaled(scale),
    })
}

fn add_states(a: &DensityState, b: &DensityState) -> Result<DensityState> {
    DensityState::from_parts(a.layout().clone(), a.matrix() + b.matrix())
}

fn check_trap_dense(attack: &AttackUnitary, n: usize) -> Result<()> {
    if 3 * n != attack.n_c() {
        return Err(QauthError::SizeMismatch {
            expected: 3 * n,
            actual: attack.n_c(),
        });
    }
    if 3 * n > MAX_TRAP_SIMULATOR_PAIRS {
        return Err(QauthError::LimitExceeded {
            what: "trap simulator pairs",
            value: 3 * n,
            limit: MAX_TRAP_SIMULATOR_PAIRS,
        });
    }
    Ok(())
}

/// EPR simulator as Kraus operators. The attacked pairs
/// `(V† A V ⊗ I_C2)(|Φ⟩^{⊗m} ⊗ |r⟩)` are split by the Bell projector; each
/// `C1 C2` basis index of the accepted (rejected) part gives one Kraus
/// operator on `R`.
fn epr_channel(
    attack: &AttackUnitary,
    perm: &Permutation,
    accept: &[PauliOperator],
    message_qubits: usize,
    omega: &DensityState,
) -> Result<FlaggedChannel> {
    let m = attack.n_c();
    let r_qubits = attack.r_qubits();
    check_pairs(m, r_qubits, message_qubits)?;
    let r_dim = 1usize << r_qubits;
    let pair_dim = 1usize << (2 * m);
    let epr = epr_vector(m);
    // Working order [C1, C2, R]; column r holds |Φ⟩^{⊗m} ⊗ |r⟩.
    let mut x = CMatrix::zeros(pair_dim * r_dim, r_dim);
    for r in 0..r_dim {
        for (b, amp) in epr.iter().enumerate() {
            x[(b + pair_dim * r, r)] = *amp;
        }
    }
    let c1: Vec<usize> = (0..m).collect();
    let c1_r: Vec<usize> = (0..m).chain(2 * m..2 * m + r_qubits).collect();
    let pairs: Vec<usize> = (0..2 * m).collect();
    let v = perm.matrix()?;
    let x = apply_left(&x, &v, &c1)?;
    let x = apply_left(&x, attack.matrix(), &c1_r)?;
    let x = apply_left(&x, &v.adjoint(), &c1)?;
    let acc_part = apply_left(&x, &bell_subspace_projector(m, accept)?, &pairs)?;
    let rej_part = &x - &acc_part;

    let mut ch = FlaggedChannel::zero(message_qubits, r_qubits, omega.clone())?;
    let m_dim = 1usize << message_qubits;
    let id_m = CMatrix::identity(m_dim, m_dim);
    for b in 0..pair_dim {
        let rows: Vec<usize> = (0..r_dim).map(|r| b + pair_dim * r).collect();
        let k_acc = acc_part.select_rows(&rows);
        if k_acc.iter().any(|z| z.norm_sqr() > 0.0) {
            ch.add_acc_kraus(&message_reference_kraus(&id_m, &k_acc), 1.0)?;
        }
        let k_rej = rej_part.select_rows(&rows);
        if k_rej.iter().any(|z| z.norm_sqr() > 0.0) {
            for mm in 0..m_dim {
                ch.add_rej_kraus(&reject_kraus(&k_rej, mm, message_qubits), 1.0)?;
            }
        }
    }
    Ok(ch)
}

/// Clifford-code EPR simulator as a channel on `MR`.
pub fn ideal_clifford_channel(
    attack: &AttackUnitary,
    message_qubits: usize,
    omega: &DensityState,
) -> Result<FlaggedChannel> {
    let m = attack.n_c();
    epr_channel(
        attack,
        &Permutation::identity(m),
        &[PauliOperator::identity(m)],
        message_qubits,
        omega,
    )
}

/// Trap-code EPR simulator as a channel on `MR`, averaged over all `(3n)!`
/// permutations.
pub fn ideal_trap_channel(attack: &AttackUnitary, n: usize, t: usize, omega: &DensityState) -> Result<FlaggedChannel> {
    check_trap_dense(attack, n)?;
    let accept = trap_accept_set(n, t)?;
    let perms: Vec<Permutation> = Permutation::all(3 * n).collect();
    Ok(exhaustive_average(&perms, |p| epr_channel(attack, p, &accept, 1, omega))?.mean)
}

/// Closed form of the Clifford simulator: accept carries `1_M ⊗ A_I`, reject
/// carries every other component with the message traced out.
pub fn closed_form_clifford(
    decomp: &PauliDecomposition,
    message_qubits: usize,
    omega: &DensityState,
) -> Result<FlaggedChannel> {
    let mut ch = FlaggedChannel::zero(message_qubits, decomp.r_qubits(), omega.clone())?;
    let m_dim = 1usize << message_qubits;
    let id_m = CMatrix::identity(m_dim, m_dim);
    for (p, a, w) in decomp.iter() {
        if w == 0.0 {
            continue;
        }
        if p.is_identity() {
            ch.add_acc_kraus(&message_reference_kraus(&id_m, a), 1.0)?;
        } else {
            for mm in 0..m_dim {
                ch.add_rej_kraus(&reject_kraus(a, mm, message_qubits), 1.0)?;
            }
        }
    }
    Ok(ch)
}

/// Counts of `X`, `Y`, `Z` letters of a Pauli.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LetterCounts {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl LetterCounts {
    pub fn of(p: &PauliOperator) -> Self {
        let y = (p.x_mask() & p.z_mask()).count_ones() as usize;
        Self {
            x: p.x_mask().count_ones() as usize - y,
            y,
            z: p.z_mask().count_ones() as usize - y,
        }
    }

    pub fn weight(&self) -> usize {
        self.x + self.y + self.z
    }
}

pub(crate) fn factorial(k: usize) -> Option<u128> {
    (1..=k as u128).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

/// `n! / (n − k)!`, zero when `k > n`.
pub(crate) fn falling(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    ((n - k + 1)..=n).try_fold(1u128, |acc, i| acc.checked_mul(i as u128))
}

pub(crate) fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    (0..k).try_fold(1u128, |acc, i| {
        acc.checked_mul((n - i) as u128).map(|v| v / (i as u128 + 1))
    })
}

fn overflow() -> QauthError {
    QauthError::LimitExceeded {
        what: "exact permutation count (u128)",
        value: usize::MAX,
        limit: 128,
    }
}

/// Number of permutations `π` of the `3n` trap-code qubits that carry a
/// Pauli with letter counts `counts` into the accept set `E` with message
/// weight in `min_msg..=max_msg`.
///
/// `Y` must land in the message block, `X` in the message or `|+⟩` block,
/// `Z` in the message or `|0⟩` block. Summing over how many `X` and `Z`
/// go to the message block, the count is a product of choices of which
/// letters move, injective placements into each block, and an arbitrary
/// arrangement of the identity positions.
pub fn accepting_placements(counts: LetterCounts, n: usize, min_msg: usize, max_msg: usize) -> Result<u128> {
    let LetterCounts { x: a, y: b, z: c } = counts;
    if counts.weight() > 3 * n {
        return Err(QauthError::SizeMismatch {
            expected: 3 * n,
            actual: counts.weight(),
        });
    }
    let rest = factorial(3 * n - counts.weight()).ok_or_else(overflow)?;
    let mut total = 0u128;
    for xm in 0..=a {
        for zm in 0..=c {
            let msg = xm + b + zm;
            if msg < min_msg || msg > max_msg || msg > n || a - xm > n || c - zm > n {
                continue;
            }
            let term = [
                binomial(a, xm),
                binomial(c, zm),
                falling(n, msg),
                falling(n, a - xm),
                falling(n, c - zm),
                Some(rest),
            ]
            .into_iter()
            .try_fold(1u128, |acc, f| f.and_then(|f| acc.checked_mul(f)))
            .ok_or_else(overflow)?;
            total = total.checked_add(term).ok_or_else(overflow)?;
        }
    }
    Ok(total)
}

/// Fraction of permutations under which the simulator accepts `P`.
pub fn trap_accept_fraction(p: &PauliOperator, n: usize, t: usize) -> Result<f64> {
    let count = accepting_placements(LetterCounts::of(p), n, 0, t)?;
    let all = factorial(3 * n).ok_or_else(overflow)?;
    Ok(count as f64 / all as f64)
}

/// Closed form of the trap simulator: component `P` is accepted (message
/// untouched) with the permutation-averaged probability that `π†Pπ ∈ F`.
pub fn closed_form_trap(
    decomp: &PauliDecomposition,
    n: usize,
    t: usize,
    omega: &DensityState,
) -> Result<FlaggedChannel> {
    if decomp.n_c() != 3 * n {
        return Err(QauthError::SizeMismatch {
            expected: 3 * n,
            actual: decomp.n_c(),
        });
    }
    let mut ch = FlaggedChannel::zero(1, decomp.r_qubits(), omega.clone())?;
    let id_m = CMatrix::identity(2, 2);
    for (p, a, w) in decomp.iter() {
        if w == 0.0 {
            continue;
        }
        let f = trap_accept_fraction(p, n, t)?;
        if f > 0.0 {
            ch.add_acc_kraus(&message_reference_kraus(&id_m, a), f)?;
        }
        if f < 1.0 {
            for mm in 0..2 {
                ch.add_rej_kraus(&reject_kraus(a, mm, 1), 1.0 - f)?;
            }
        }
    }
    Ok(ch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::decompose;
    use crate::channel::default_omega;
    use crate::linear_sim::{MaxAbs, SubsystemLayout};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mr(r: usize, rng: &mut ChaCha8Rng) -> DensityState {
        DensityState::random_pure(SubsystemLayout::new(vec![("M", 1), ("R", r)]).unwrap(), rng).unwrap()
    }

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn identity_attack_is_accepted() {
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = mr(1, &mut rng);
        let out = ideal_clifford(&AttackUnitary::identity(2, 1).unwrap(), &rho, &omega).unwrap();
        assert!((out.acc.matrix() - rho.matrix()).max_abs() < 1e-12);
        let out = ideal_trap(&AttackUnitary::identity(3, 1).unwrap(), 1, 0, &rho, &omega).unwrap();
        assert!((out.acc_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_on_an_epr_half_is_rejected() {
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = mr(1, &mut rng);
        for lit in ["XI", "IZ", "YY"] {
            let out = ideal_clifford(&AttackUnitary::pauli(&p(lit), 1).unwrap(), &rho, &omega).unwrap();
            assert!((out.rej_weight() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_x_on_trap_simulator() {
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = mr(1, &mut rng);
        let attack = AttackUnitary::pauli(&p("XII"), 1).unwrap();
        let out = ideal_trap(&attack, 1, 0, &rho, &omega).unwrap();
        assert!((out.acc_weight() - 1.0 / 3.0).abs() < 1e-12);
        assert!((out.acc.matrix() - rho.matrix() * num_complex::Complex64::new(1.0 / 3.0, 0.0)).max_abs() < 1e-12);
        assert!((trap_accept_fraction(&p("XII"), 1, 0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn channel_forms_match_state_level_simulators() {
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..3 {
            let rho = mr(1, &mut rng);
            let a2 = AttackUnitary::haar(2, 1, &mut rng).unwrap();
            let lit = ideal_clifford(&a2, &rho, &omega).unwrap();
            let fast = ideal_clifford_channel(&a2, 1, &omega).unwrap().apply(&rho).unwrap();
            assert!(lit.distance(&fast).unwrap() < 1e-10);
            let a3 = AttackUnitary::haar(3, 1, &mut rng).unwrap();
            let lit = ideal_trap(&a3, 1, 0, &rho, &omega).unwrap();
            let fast = ideal_trap_channel(&a3, 1, 0, &omega).unwrap().apply(&rho).unwrap();
            assert!(lit.distance(&fast).unwrap() < 1e-10);
        }
    }

    #[test]
    fn closed_forms_match_epr_simulators() {
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inputs: Vec<DensityState> = (0..4).map(|_| mr(1, &mut rng)).collect();
        for _ in 0..50 {
            let a = AttackUnitary::haar(2, 1, &mut rng).unwrap();
            let cf = closed_form_clifford(&decompose(&a).unwrap(), 1, &omega).unwrap();
            let epr = ideal_clifford_channel(&a, 1, &omega).unwrap();
            assert!(cf.max_distance(&epr, &inputs).unwrap() < 1e-9);
        }
        for attack in enumerate_paulis(3).unwrap() {
            let a = AttackUnitary::pauli(&attack, 1).unwrap();
            let cf = closed_form_trap(&decompose(&a).unwrap(), 1, 0, &omega).unwrap();
            let epr = ideal_trap_channel(&a, 1, 0, &omega).unwrap();
            assert!(cf.max_distance(&epr, &inputs).unwrap() < 1e-9, "{attack}");
        }
    }

    #[test]
    fn simulators_ignore_global_phase_and_preserve_trace() {
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = mr(1, &mut rng);
        let a = AttackUnitary::haar(3, 1, &mut rng).unwrap();
        let b = a.with_global_phase(0.7);
        let oa = ideal_trap_channel(&a, 1, 0, &omega).unwrap().apply(&rho).unwrap();
        let ob = ideal_trap_channel(&b, 1, 0, &omega).unwrap().apply(&rho).unwrap();
        assert!(oa.distance(&ob).unwrap() < 1e-12);
        assert!((oa.total_weight() - 1.0).abs() < 1e-9);
        let oc = ideal_clifford_channel(&a, 1, &omega).unwrap().apply(&rho).unwrap();
        assert!((oc.total_weight() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn placements_match_brute_force() {
        let part = QubitPartition::trap_code(2);
        for attack in enumerate_paulis(6).unwrap().into_iter().step_by(7) {
            for t in 0..=1 {
                let brute = Permutation::all(6)
                    .filter(|perm| in_set_f(&attack.conjugate_by_permutation(perm).unwrap(), &part, t))
                    .count() as u128;
                assert_eq!(
                    accepting_placements(LetterCounts::of(&attack), 2, 0, t).unwrap(),
                    brute,
                    "{attack}"
                );
            }
        }
    }

    #[test]
    fn combinatorial_helpers() {
        assert_eq!(factorial(5), Some(120));
        assert_eq!(falling(5, 2), Some(20));
        assert_eq!(falling(2, 3), Some(0));
        assert_eq!(binomial(6, 2), Some(15));
        assert_eq!(binomial(2, 3), Some(0));
        assert!(factorial(40).is_none());
        assert_eq!(LetterCounts::of(&p("XYZZI")), LetterCounts { x: 1, y: 1, z: 2 });
    }
}
