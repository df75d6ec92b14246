//! The trap authentication code.
//!
//! The message qubit is encoded in an `[[n,1,2t+1]]` code, padded with `n`
//! traps in `|0⟩` and `n` in `|+⟩`, permuted and one-time padded with a
//! Pauli. Codeword qubits `[0, n)` hold the encoded message, `[n, 2n)` the
//! `|0⟩` traps and `[2n, 3n)` the `|+⟩` traps before permutation.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::AttackUnitary;
use crate::channel::{flagged_decode, message_reference_kraus, reject_kraus, FlaggedChannel};
use crate::clifford_code::message_reference_shape;
use crate::error::{QauthError, Result};
use crate::linear_sim::{apply_unitary, embed_operator, CMatrix, DensityState, FlaggedOutput, SubsystemLayout};
use crate::pauli::{
    enumerate_paulis, in_set_e, PauliLetter, PauliOperator, Permutation, QubitPartition, MAX_MATRIX_QUBITS,
};
use crate::sampling::{exhaustive_average, sampled_average, AveragedChannel, DEFAULT_BATCHES};

/// Largest codeword (in qubits) the dense trap-code paths will build.
pub const MAX_DENSE_CODEWORD: usize = 9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EcCodeKind {
    Trivial,
    FiveQubit,
}

impl FromStr for EcCodeKind {
    type Err = QauthError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(EcCodeKind::Trivial),
            "five_qubit" => Ok(EcCodeKind::FiveQubit),
            other => Err(QauthError::Parse(format!(
                "unknown error-correcting code {other:?} (expected \"trivial\" or \"five_qubit\")"
            ))),
        }
    }
}

impl fmt::Display for EcCodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EcCodeKind::Trivial => "trivial",
            EcCodeKind::FiveQubit => "five_qubit",
        })
    }
}

/// A one-logical-qubit stabilizer code with a lookup decoder for errors of
/// weight at most `t`. Decoding always corrects; it never rejects.
#[derive(Clone, Debug)]
pub struct EcCode {
    kind: EcCodeKind,
    n: usize,
    t: usize,
    stabilizers: Vec<PauliOperator>,
    logical_x: PauliOperator,
    logical_z: PauliOperator,
    corrections: Vec<PauliOperator>,
}

impl EcCode {
    /// `[[1,1,1]]`: the identity encoding.
    pub fn trivial() -> Self {
        Self::build(EcCodeKind::Trivial, 0, Vec::new(), "X", "Z").expect("trivial code")
    }

    /// The `[[5,1,3]]` perfect code with stabilizers `XZZXI` and its cyclic
    /// shifts.
    pub fn five_qubit() -> Self {
        let stabilizers = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
            .iter()
            .map(|s| s.parse().expect("stabilizer literal"))
            .collect();
        Self::build(EcCodeKind::FiveQubit, 1, stabilizers, "XXXXX", "ZZZZZ").expect("five-qubit code")
    }

    pub fn from_kind(kind: EcCodeKind) -> Self {
        match kind {
            EcCodeKind::Trivial => Self::trivial(),
            EcCodeKind::FiveQubit => Self::five_qubit(),
        }
    }

    fn build(kind: EcCodeKind, t: usize, stabilizers: Vec<PauliOperator>, lx: &str, lz: &str) -> Result<Self> {
        let logical_x: PauliOperator = lx.parse()?;
        let logical_z: PauliOperator = lz.parse()?;
        let n = logical_x.n();
        let mut corrections: Vec<Option<PauliOperator>> = vec![None; 1 << stabilizers.len()];
        let mut code = Self {
            kind,
            n,
            t,
            stabilizers,
            logical_x,
            logical_z,
            corrections: Vec::new(),
        };
        let mut by_weight = enumerate_paulis(n)?;
        by_weight.sort_by_key(|p| p.weight());
        for e in by_weight.into_iter().filter(|e| e.weight() <= t) {
            let s = code.syndrome(&e);
            if corrections[s].is_none() {
                corrections[s] = Some(e);
            }
        }
        code.corrections = corrections
            .into_iter()
            .map(|c| c.ok_or_else(|| QauthError::InvalidState("syndrome without a correction".into())))
            .collect::<Result<_>>()?;
        Ok(code)
    }

    pub fn kind(&self) -> EcCodeKind {
        self.kind
    }

    /// Physical qubits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Correctable errors.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn stabilizers(&self) -> &[PauliOperator] {
        &self.stabilizers
    }

    pub fn logical_x(&self) -> &PauliOperator {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliOperator {
        &self.logical_z
    }

    /// Bit `j` set iff `e` anticommutes with stabilizer generator `j`.
    pub fn syndrome(&self, e: &PauliOperator) -> usize {
        self.stabilizers
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.commutes_with(e))
            .fold(0, |acc, (j, _)| acc | (1 << j))
    }

    pub fn correction(&self, syndrome: usize) -> &PauliOperator {
        &self.corrections[syndrome]
    }

    /// Logical effect (phase-free, one qubit) of the physical error `e` after
    /// syndrome correction.
    pub fn logical_pauli(&self, e: &PauliOperator) -> Result<PauliOperator> {
        if e.n() != self.n {
            return Err(QauthError::SizeMismatch {
                expected: self.n,
                actual: e.n(),
            });
        }
        let corrected = self.correction(self.syndrome(e)).multiply(e)?;
        let x = !corrected.commutes_with(&self.logical_z);
        let z = !corrected.commutes_with(&self.logical_x);
        PauliOperator::from_letters(&[PauliLetter::from_bits(x, z)])
    }

    /// Encoding isometry `|m⟩ ↦ |m_L⟩`, `2^n × 2`. `|0_L⟩` is the +1
    /// eigenstate of the stabilizers and of logical Z; `|1_L⟩ = X_L|0_L⟩`.
    pub fn encoder(&self) -> Result<CMatrix> {
        if self.n > MAX_MATRIX_QUBITS {
            return Err(QauthError::LimitExceeded {
                what: "code qubits",
                value: self.n,
                limit: MAX_MATRIX_QUBITS,
            });
        }
        let dim = 1usize << self.n;
        let project = |mut v: Vec<Complex64>| {
            for s in self.stabilizers.iter().chain(std::iter::once(&self.logical_z)) {
                let sv = s.apply_to_vector(&v);
                for (a, b) in v.iter_mut().zip(&sv) {
                    *a = (*a + b) * 0.5;
                }
            }
            v
        };
        let zero_l = (0..dim)
            .map(|b| {
                let mut v = vec![ZERO; dim];
                v[b] = ONE;
                project(v)
            })
            .find(|v| v.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-6)
            .ok_or_else(|| QauthError::InvalidState("empty code space".into()))?;
        let norm = zero_l.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let zero_l: Vec<Complex64> = zero_l.iter().map(|a| a / norm).collect();
        let one_l = self.logical_x.apply_to_vector(&zero_l);
        Ok(CMatrix::from_fn(
            dim,
            2,
            |r, c| if c == 0 { zero_l[r] } else { one_l[r] },
        ))
    }

    /// Kraus operators `V† E_s Π_s` of correct-then-decode, one per syndrome.
    pub fn decode_kraus(&self) -> Result<Vec<CMatrix>> {
        let v_dag = self.encoder()?.adjoint();
        let dim = 1usize << self.n;
        let mut out = Vec::with_capacity(self.corrections.len());
        for (s, e) in self.corrections.iter().enumerate() {
            let mut proj = CMatrix::identity(dim, dim);
            for (j, g) in self.stabilizers.iter().enumerate() {
                let sign = if (s >> j) & 1 == 1 { -1.0 } else { 1.0 };
                let half = (CMatrix::identity(dim, dim) + g.to_matrix()? * Complex64::new(sign, 0.0))
                    * Complex64::new(0.5, 0.0);
                proj = half * proj;
            }
            out.push(&v_dag * e.to_matrix()? * proj);
        }
        Ok(out)
    }

    pub fn ec_encode(&self, rho: &DensityState) -> Result<DensityState> {
        if rho.layout().total_qubits() != 1 {
            return Err(QauthError::SizeMismatch {
                expected: 1,
                actual: rho.layout().total_qubits(),
            });
        }
        let v = self.encoder()?;
        DensityState::new(SubsystemLayout::single("E", self.n)?, &v * rho.matrix() * v.adjoint())
    }

    pub fn ec_decode(&self, rho: &DensityState) -> Result<DensityState> {
        if rho.layout().total_qubits() != self.n {
            return Err(QauthError::SizeMismatch {
                expected: self.n,
                actual: rho.layout().total_qubits(),
            });
        }
        let mut out = CMatrix::zeros(2, 2);
        for k in self.decode_kraus()? {
            out += &k * rho.matrix() * k.adjoint();
        }
        DensityState::new(SubsystemLayout::single("M", 1)?, crate::linear_sim::hermitize(out))
    }
}

/// `k = (k1, k2)`: a permutation of the `3n` codeword qubits and a
/// phase-free Pauli pad.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrapKey {
    pub perm: Permutation,
    pub pauli: PauliOperator,
}

impl TrapKey {
    pub fn new(perm: Permutation, pauli: PauliOperator) -> Result<Self> {
        if perm.len() != pauli.n() {
            return Err(QauthError::SizeMismatch {
                expected: perm.len(),
                actual: pauli.n(),
            });
        }
        Ok(Self {
            perm,
            pauli: pauli.phase_free(),
        })
    }

    pub fn identity(codeword_qubits: usize) -> Self {
        Self {
            perm: Permutation::identity(codeword_qubits),
            pauli: PauliOperator::identity(codeword_qubits),
        }
    }

    pub fn random<R: Rng + ?Sized>(codeword_qubits: usize, rng: &mut R) -> Result<Self> {
        let perm = Permutation::random(codeword_qubits, rng);
        let pauli = PauliOperator::random(codeword_qubits, false, rng)?;
        Self::new(perm, pauli)
    }

    /// All `(3n)! · 4^{3n}` keys, permutation-major.
    pub fn all(codeword_qubits: usize) -> Result<Vec<Self>> {
        if codeword_qubits > 3 {
            return Err(QauthError::LimitExceeded {
                what: "exhaustive trap-key codeword qubits",
                value: codeword_qubits,
                limit: 3,
            });
        }
        let paulis = enumerate_paulis(codeword_qubits)?;
        Ok(Permutation::all(codeword_qubits)
            .flat_map(|perm| {
                paulis.iter().map(move |p| TrapKey {
                    perm: perm.clone(),
                    pauli: *p,
                })
            })
            .collect())
    }

    /// `P_{k2} π_{k1}`.
    pub fn unitary(&self) -> Result<CMatrix> {
        Ok(self.pauli.to_matrix()? * self.perm.matrix()?)
    }
}

/// Trap-code parameters: the EC code fixes `n` and `t`.
#[derive(Clone, Debug)]
pub struct TrapCode {
    code: EcCode,
}

impl TrapCode {
    pub fn new(code: EcCode) -> Self {
        Self { code }
    }

    pub fn ec(&self) -> &EcCode {
        &self.code
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn t(&self) -> usize {
        self.code.t()
    }

    pub fn codeword_qubits(&self) -> usize {
        3 * self.code.n()
    }

    pub fn partition(&self) -> QubitPartition {
        QubitPartition::trap_code(self.code.n())
    }

    fn check_dense(&self) -> Result<()> {
        if self.codeword_qubits() > MAX_DENSE_CODEWORD {
            return Err(QauthError::LimitExceeded {
                what: "dense trap-code codeword qubits",
                value: self.codeword_qubits(),
                limit: MAX_DENSE_CODEWORD,
            });
        }
        Ok(())
    }

    fn check_key(&self, key: &TrapKey) -> Result<()> {
        if key.perm.len() != self.codeword_qubits() {
            return Err(QauthError::SizeMismatch {
                expected: self.codeword_qubits(),
                actual: key.perm.len(),
            });
        }
        Ok(())
    }

    /// `Enc_M(·) ⊗ |0⟩^{⊗n} ⊗ |+⟩^{⊗n}` as a `2^{3n} × 2` isometry.
    pub fn padded_encoder(&self) -> Result<CMatrix> {
        self.check_dense()?;
        let n = self.n();
        let v = self.code.encoder()?;
        let low = (1usize << n) - 1;
        let plus = 1.0 / ((1usize << n) as f64).sqrt();
        Ok(CMatrix::from_fn(1 << (3 * n), 2, |c, m| {
            if (c >> n) & low == 0 {
                v[(c & low, m)] * plus
            } else {
                ZERO
            }
        }))
    }

    /// `H^{⊗n}` on the `|+⟩` trap block, identity elsewhere.
    fn plus_basis_change(&self) -> Result<CMatrix> {
        let n = self.n();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ],
        );
        let hn = (1..n).fold(h.clone(), |acc, _| h.kronecker(&acc));
        let qubits: Vec<usize> = (2 * n..3 * n).collect();
        embed_operator(&hn, &qubits, 3 * n)
    }

    /// Decoder Kraus operators from the codeword (after un-keying and the
    /// `|+⟩`-trap basis change) to the message: trap bits must read zero.
    fn accept_kraus(&self) -> Result<Vec<CMatrix>> {
        let n = self.n();
        let c_dim = 1usize << (3 * n);
        let select = CMatrix::from_fn(1 << n, c_dim, |m, c| if c == m { ONE } else { ZERO });
        Ok(self.code.decode_kraus()?.into_iter().map(|k| k * &select).collect())
    }

    fn traps_clean(&self, c: usize) -> bool {
        c >> self.n() == 0
    }

    /// `P_{k2} π_{k1} (Enc(ρ) ⊗ |0⟩⟨0|^{⊗n} ⊗ |+⟩⟨+|^{⊗n}) π_{k1}† P_{k2}`.
    pub fn encode(&self, key: &TrapKey, rho_m: &DensityState) -> Result<DensityState> {
        self.check_dense()?;
        self.check_key(key)?;
        let enc = self.code.ec_encode(rho_m)?;
        let n = self.n();
        let traps = DensityState::basis(SubsystemLayout::single("T0", n)?, 0)?
            .tensor(&DensityState::plus(SubsystemLayout::single("TP", n)?)?)?;
        let padded = enc.tensor(&traps)?.merged(SubsystemLayout::single("C", 3 * n)?)?;
        apply_unitary(&padded, &key.unitary()?, &["C"])
    }

    /// Un-keys the leading `3n` qubits, measures `|0⟩` traps in the
    /// computational basis and `|+⟩` traps in the Hadamard basis, and decodes
    /// the message on acceptance. Later registers are carried through.
    pub fn decode(&self, key: &TrapKey, rho_c: &DensityState, omega: &DensityState) -> Result<FlaggedOutput> {
        self.check_dense()?;
        self.check_key(key)?;
        let unkey = self.plus_basis_change()? * key.unitary()?.adjoint();
        flagged_decode(
            rho_c,
            3 * self.n(),
            &unkey,
            &self.accept_kraus()?,
            |c| !self.traps_clean(c),
            omega,
        )
    }

    /// Real-world channel on states: encode `M` (carrying `R`), attack
    /// `C ⊗ R`, decode.
    pub fn real_channel(
        &self,
        key: &TrapKey,
        attack: &AttackUnitary,
        rho_mr: &DensityState,
        omega: &DensityState,
    ) -> Result<FlaggedOutput> {
        self.check_key(key)?;
        self.check_attack(attack)?;
        let (m_qubits, r_qubits) = message_reference_shape(rho_mr)?;
        if m_qubits != 1 || r_qubits != attack.r_qubits() {
            return Err(QauthError::SizeMismatch {
                expected: 1 + attack.r_qubits(),
                actual: m_qubits + r_qubits,
            });
        }
        let r_dim = attack.r_dim();
        let iso = CMatrix::identity(r_dim, r_dim).kronecker(&self.padded_encoder()?);
        let layout = SubsystemLayout::new(vec![("C", 3 * self.n()), ("R", r_qubits)])?;
        let padded = DensityState::new(layout, &iso * rho_mr.matrix() * iso.adjoint())?;
        let encoded = apply_unitary(&padded, &key.unitary()?, &["C"])?;
        let attacked = apply_unitary(&encoded, attack.matrix(), &["C", "R"])?;
        self.decode(key, &attacked, omega)
    }

    fn check_attack(&self, attack: &AttackUnitary) -> Result<()> {
        if attack.n_c() != self.codeword_qubits() {
            return Err(QauthError::SizeMismatch {
                expected: self.codeword_qubits(),
                actual: attack.n_c(),
            });
        }
        Ok(())
    }

    /// The keyed real channel as Kraus operators on `MR`.
    pub fn real_channel_kraus(
        &self,
        key: &TrapKey,
        attack: &AttackUnitary,
        omega: &DensityState,
    ) -> Result<FlaggedChannel> {
        self.check_key(key)?;
        self.check_attack(attack)?;
        let r_dim = attack.r_dim();
        let c_dim = 1usize << self.codeword_qubits();
        let m_dim = 1usize << self.n();
        let id_r = CMatrix::identity(r_dim, r_dim);
        let k = id_r.kronecker(&key.unitary()?);
        let unkey = id_r.kronecker(&(self.plus_basis_change()? * key.unitary()?.adjoint()));
        let iso = id_r.kronecker(&self.padded_encoder()?);
        let g = unkey * attack.matrix() * k * iso;
        let mut ch = FlaggedChannel::zero(1, attack.r_qubits(), omega.clone())?;
        let acc_rows: Vec<usize> = (0..m_dim * r_dim).map(|j| (j % m_dim) + c_dim * (j / m_dim)).collect();
        let g_acc = g.select_rows(&acc_rows);
        for ks in self.code.decode_kraus()? {
            ch.add_acc_kraus(&(id_r.kronecker(&ks) * &g_acc), 1.0)?;
        }
        for c in (0..c_dim).filter(|&c| !self.traps_clean(c)) {
            let rows: Vec<usize> = (0..r_dim).map(|r| c + c_dim * r).collect();
            ch.add_rej_kraus(&g.select_rows(&rows), 1.0)?;
        }
        Ok(ch)
    }

    /// Exact key average over all `(3n)! · 4^{3n}` keys (dense, `n = 1`).
    pub fn exhaustive_keyed_channel(&self, attack: &AttackUnitary, omega: &DensityState) -> Result<AveragedChannel> {
        let keys = TrapKey::all(self.codeword_qubits())?;
        exhaustive_average(&keys, |k| self.real_channel_kraus(k, attack, omega))
    }

    /// Outcome of a Pauli attack under the permutation of `key`. The Pauli
    /// pad only changes the phase of the attack.
    pub fn symbolic_pauli_outcome(&self, perm: &Permutation, attack: &PauliOperator) -> Result<PauliOutcome> {
        if attack.n() != self.codeword_qubits() || perm.len() != attack.n() {
            return Err(QauthError::SizeMismatch {
                expected: self.codeword_qubits(),
                actual: attack.n(),
            });
        }
        let effective = attack.conjugate_by_permutation(&perm.inverse())?;
        if !in_set_e(&effective, &self.partition()) {
            return Ok(PauliOutcome {
                accepted: false,
                logical: PauliOperator::identity(1),
            });
        }
        let logical = self.code.logical_pauli(&effective.slice(0, self.n())?)?;
        Ok(PauliOutcome {
            accepted: true,
            logical,
        })
    }

    /// Real channel for the attack `P ⊗ I_R` under permutation `perm`.
    pub fn symbolic_channel(
        &self,
        perm: &Permutation,
        attack: &PauliOperator,
        r_qubits: usize,
        omega: &DensityState,
    ) -> Result<FlaggedChannel> {
        let outcome = self.symbolic_pauli_outcome(perm, attack)?;
        let r_dim = 1usize << r_qubits;
        let id_r = CMatrix::identity(r_dim, r_dim);
        let mut ch = FlaggedChannel::zero(1, r_qubits, omega.clone())?;
        if outcome.accepted {
            ch.add_acc_kraus(&message_reference_kraus(&outcome.logical.to_matrix()?, &id_r), 1.0)?;
        } else {
            for m in 0..2 {
                ch.add_rej_kraus(&reject_kraus(&id_r, m, 1), 1.0)?;
            }
        }
        Ok(ch)
    }

    /// Key average for a Pauli attack: exact over all permutations, or
    /// over `samples` uniformly random permutations.
    pub fn symbolic_keyed_channel(
        &self,
        attack: &PauliOperator,
        r_qubits: usize,
        samples: Option<(usize, u64)>,
        omega: &DensityState,
    ) -> Result<AveragedChannel> {
        match samples {
            None => {
                if self.codeword_qubits() > 9 {
                    return Err(QauthError::Infeasible(format!(
                        "enumerating {}! permutations",
                        self.codeword_qubits()
                    )));
                }
                let perms: Vec<Permutation> = Permutation::all(self.codeword_qubits()).collect();
                exhaustive_average(&perms, |p| self.symbolic_channel(p, attack, r_qubits, omega))
            }
            Some((count, seed)) => sampled_average(count, DEFAULT_BATCHES, seed, |rng| {
                let perm = Permutation::random(self.codeword_qubits(), rng);
                self.symbolic_channel(&perm, attack, r_qubits, omega)
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliOutcome {
    pub accepted: bool,
    pub logical: PauliOperator,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::AttackUnitary;
    use crate::channel::default_omega;
    use crate::linear_sim::{trace_distance, MaxAbs};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn qubit_state(rng: &mut ChaCha8Rng) -> DensityState {
        DensityState::random_pure(SubsystemLayout::single("M", 1).unwrap(), rng).unwrap()
    }

    fn named_states() -> Vec<DensityState> {
        let l = || SubsystemLayout::single("M", 1).unwrap();
        vec![
            DensityState::basis(l(), 0).unwrap(),
            DensityState::basis(l(), 1).unwrap(),
            DensityState::plus(l()).unwrap(),
        ]
    }

    #[test]
    fn codes_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for code in [EcCode::trivial(), EcCode::five_qubit()] {
            let v = code.encoder().unwrap();
            assert!((v.adjoint() * &v - CMatrix::identity(2, 2)).max_abs() < 1e-12);
            for _ in 0..10 {
                let rho = qubit_state(&mut rng);
                let back = code.ec_decode(&code.ec_encode(&rho).unwrap()).unwrap();
                assert!(trace_distance(&back.merged(rho.layout().clone()).unwrap(), &rho).unwrap() < 1e-10);
            }
        }
        assert_eq!(EcCode::trivial().encoder().unwrap(), CMatrix::identity(2, 2));
    }

    #[test]
    fn five_qubit_code_structure() {
        let code = EcCode::five_qubit();
        let dim = 32;
        for s in code.stabilizers() {
            assert!(s.commutes_with(code.logical_x()) && s.commutes_with(code.logical_z()));
        }
        let v = code.encoder().unwrap();
        for s in code.stabilizers() {
            assert!((s.to_matrix().unwrap() * &v - &v).max_abs() < 1e-12);
        }
        // Every syndrome is produced by exactly one error of weight ≤ 1.
        let light: Vec<_> = enumerate_paulis(5)
            .unwrap()
            .into_iter()
            .filter(|e| e.weight() <= 1)
            .collect();
        assert_eq!(light.len(), 16);
        let syndromes: std::collections::HashSet<_> = light.iter().map(|e| code.syndrome(e)).collect();
        assert_eq!(syndromes.len(), 16);
        let mut total = CMatrix::zeros(dim, dim);
        for k in code.decode_kraus().unwrap() {
            total += k.adjoint() * k;
        }
        assert!((total - CMatrix::identity(dim, dim)).max_abs() < 1e-12);
    }

    #[test]
    fn single_qubit_errors_are_corrected() {
        let code = EcCode::five_qubit();
        let light: Vec<_> = enumerate_paulis(5)
            .unwrap()
            .into_iter()
            .filter(|e| e.weight() == 1)
            .collect();
        assert_eq!(light.len(), 15);
        for rho in named_states() {
            let enc = code.ec_encode(&rho).unwrap();
            for e in &light {
                let hit = apply_unitary(&enc, &e.to_matrix().unwrap(), &["E"]).unwrap();
                let back = code.ec_decode(&hit).unwrap();
                assert!(trace_distance(&back, &rho).unwrap() < 1e-10, "{e}");
                assert!(code.logical_pauli(e).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn logical_paulis_match_dense_decoding() {
        let code = EcCode::five_qubit();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = qubit_state(&mut rng);
        let enc = code.ec_encode(&rho).unwrap();
        for _ in 0..40 {
            let e = PauliOperator::random(5, false, &mut rng).unwrap();
            let hit = apply_unitary(&enc, &e.to_matrix().unwrap(), &["E"]).unwrap();
            let back = code.ec_decode(&hit).unwrap();
            let l = code.logical_pauli(&e).unwrap().to_matrix().unwrap();
            let expected = &l * rho.matrix() * l.adjoint();
            assert!((back.matrix() - expected).max_abs() < 1e-10, "{e}");
        }
    }

    #[test]
    fn logical_map_is_a_homomorphism_on_the_normalizer() {
        let code = EcCode::five_qubit();
        let logicals = [
            (PauliOperator::identity(5), p("I")),
            (*code.logical_x(), p("X")),
            (*code.logical_z(), p("Z")),
            (code.logical_x().multiply(code.logical_z()).unwrap(), p("Y")),
        ];
        let light: Vec<_> = enumerate_paulis(5)
            .unwrap()
            .into_iter()
            .filter(|e| e.weight() <= 1)
            .collect();
        for (rep, l) in &logicals {
            for e in &light {
                let moved = rep.multiply(e).unwrap();
                let got = code.logical_pauli(&moved).unwrap();
                let want = l.multiply(&code.logical_pauli(e).unwrap()).unwrap();
                assert!(got.eq_up_to_phase(&want));
                for s in code.stabilizers() {
                    let shifted = moved.multiply(s).unwrap();
                    assert!(code.logical_pauli(&shifted).unwrap().eq_up_to_phase(&got));
                }
            }
        }
    }

    #[test]
    fn trap_correctness() {
        let trap = TrapCode::new(EcCode::trivial());
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let key = TrapKey::random(3, &mut rng).unwrap();
            let rho = qubit_state(&mut rng);
            let out = trap.decode(&key, &trap.encode(&key, &rho).unwrap(), &omega).unwrap();
            assert!(out.acc_weight() > 1.0 - 1e-9);
            assert!(trace_distance(&out.acc, &rho).unwrap() < 1e-9);
        }
    }

    #[test]
    fn identity_key_encoding() {
        let trap = TrapCode::new(EcCode::trivial());
        let rho = DensityState::basis(SubsystemLayout::single("M", 1).unwrap(), 0).unwrap();
        let enc = trap.encode(&TrapKey::identity(3), &rho).unwrap();
        // |0⟩|0⟩|+⟩: indices 0 and 4 with amplitude 1/√2.
        for (i, j) in [(0, 0), (0, 4), (4, 0), (4, 4)] {
            assert!((enc.matrix()[(i, j)].re - 0.5).abs() < 1e-12);
        }
        assert!((enc.trace_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trap_detection_with_identity_key() {
        let trap = TrapCode::new(EcCode::trivial());
        let omega = default_omega(1).unwrap();
        let rho = DensityState::plus(SubsystemLayout::single("M", 1).unwrap()).unwrap();
        let key = TrapKey::identity(3);
        let enc = trap.encode(&key, &rho).unwrap();
        let hit = |lit: &str| {
            let attacked = apply_unitary(&enc, &p(lit).to_matrix().unwrap(), &["C"]).unwrap();
            trap.decode(&key, &attacked, &omega).unwrap()
        };
        assert!((hit("IIZ").rej_weight() - 1.0).abs() < 1e-12);
        assert!((hit("IXI").rej_weight() - 1.0).abs() < 1e-12);
        assert!((hit("IZX").acc_weight() - 1.0).abs() < 1e-12);
        let flipped = hit("ZII");
        assert!((flipped.acc_weight() - 1.0).abs() < 1e-12);
        assert!((flipped.acc.matrix()[(0, 1)].re + 0.5).abs() < 1e-12);
    }

    #[test]
    fn five_qubit_trap_corrects_message_errors_symbolically() {
        let trap = TrapCode::new(EcCode::five_qubit());
        let id = Permutation::identity(15);
        let mut attack = vec![PauliLetter::I; 15];
        attack[2] = PauliLetter::Y;
        let out = trap
            .symbolic_pauli_outcome(&id, &PauliOperator::from_letters(&attack).unwrap())
            .unwrap();
        assert!(out.accepted && out.logical.is_identity());
        attack[3] = PauliLetter::X;
        let out = trap
            .symbolic_pauli_outcome(&id, &PauliOperator::from_letters(&attack).unwrap())
            .unwrap();
        assert!(out.accepted && !out.logical.is_identity());
    }

    #[test]
    fn symbolic_outcomes() {
        let trap = TrapCode::new(EcCode::trivial());
        let id = Permutation::identity(3);
        let out = trap.symbolic_pauli_outcome(&id, &p("III")).unwrap();
        assert!(out.accepted && out.logical.is_identity());
        assert!(!trap.symbolic_pauli_outcome(&id, &p("IXI")).unwrap().accepted);
        let out = trap.symbolic_pauli_outcome(&id, &p("XII")).unwrap();
        assert!(out.accepted && out.logical == p("X"));
    }

    #[test]
    fn symbolic_matches_dense_for_every_key_shape() {
        let trap = TrapCode::new(EcCode::trivial());
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inputs: Vec<DensityState> = (0..3)
            .map(|_| {
                DensityState::random_pure(SubsystemLayout::new(vec![("M", 1), ("R", 1)]).unwrap(), &mut rng).unwrap()
            })
            .collect();
        for perm in Permutation::all(3) {
            let pad = PauliOperator::random(3, false, &mut rng).unwrap();
            let key = TrapKey::new(perm.clone(), pad).unwrap();
            for attack in enumerate_paulis(3).unwrap() {
                let dense = trap
                    .real_channel_kraus(&key, &AttackUnitary::pauli(&attack, 1).unwrap(), &omega)
                    .unwrap();
                let symbolic = trap.symbolic_channel(&perm, &attack, 1, &omega).unwrap();
                for rho in &inputs {
                    let d = dense
                        .apply(rho)
                        .unwrap()
                        .distance(&symbolic.apply(rho).unwrap())
                        .unwrap();
                    assert!(d < 1e-9, "{perm:?} {attack}");
                }
            }
        }
    }

    #[test]
    fn kraus_form_matches_state_level_channel() {
        let trap = TrapCode::new(EcCode::trivial());
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let key = TrapKey::random(3, &mut rng).unwrap();
            let attack = AttackUnitary::haar(3, 1, &mut rng).unwrap();
            let rho =
                DensityState::random_pure(SubsystemLayout::new(vec![("M", 1), ("R", 1)]).unwrap(), &mut rng).unwrap();
            let literal = trap.real_channel(&key, &attack, &rho, &omega).unwrap();
            let fast = trap
                .real_channel_kraus(&key, &attack, &omega)
                .unwrap()
                .apply(&rho)
                .unwrap();
            assert!(literal.distance(&fast).unwrap() < 1e-10);
            assert!((literal.total_weight() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn key_average_depends_only_on_pauli_weights() {
        let trap = TrapCode::new(EcCode::trivial());
        let omega = default_omega(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let attack = AttackUnitary::haar(3, 1, &mut rng).unwrap();
        // Conjugating by a Pauli on C only changes the phases of the
        // components, not their weights.
        let q = PauliOperator::random(3, true, &mut rng).unwrap();
        let modified = attack.conjugated_on_c_by(&q.to_matrix().unwrap()).unwrap();
        let a = trap.exhaustive_keyed_channel(&attack, &omega).unwrap();
        let b = trap.exhaustive_keyed_channel(&modified, &omega).unwrap();
        assert!((a.mean.acc().matrix() - b.mean.acc().matrix()).max_abs() < 1e-9);
        assert!((a.mean.rej().matrix() - b.mean.rej().matrix()).max_abs() < 1e-9);
        assert_eq!(a.samples, 384);
    }

    #[test]
    fn code_names() {
        assert_eq!("five_qubit".parse::<EcCodeKind>().unwrap(), EcCodeKind::FiveQubit);
        assert_eq!(EcCodeKind::Trivial.to_string(), "trivial");
        assert!("steane".parse::<EcCodeKind>().is_err());
    }
}
