//! Numerical checks of the twirl lemmas, correctness, the security bounds
//! of both codes and the permutation counting behind the trap-code bound.

pub mod eta;
pub mod suites;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{decompose, AttackUnitary, PauliDecomposition};
use crate::channel::FlaggedChannel;
use crate::clifford::CliffordElement;
use crate::clifford_code::{self, CliffordCodeParams};
use crate::error::{QauthError, Result};
use crate::linear_sim::{random_unit_vector, trace_distance, CMatrix, DensityState, SubsystemLayout};
use crate::pauli::{enumerate_paulis, PauliOperator};
use crate::sampling::{mean_and_stderr, AveragedChannel, KeyStrategy};
use crate::simulators::{
    closed_form_clifford, closed_form_trap, ideal_clifford_channel, ideal_trap_channel, MAX_TRAP_SIMULATOR_PAIRS,
};
use crate::trap_code::{TrapCode, TrapKey};

pub use eta::{
    bound_chain_check, eta_bound, eta_bruteforce, eta_composition, eta_from_compositions, eta_product, Composition,
};

pub const LEMMA_TOLERANCE: f64 = 1e-9;
pub const ORACLE_TOLERANCE: f64 = 1e-9;
/// Bound checks on sampled quantities pass when `measured + k·stderr ≤ bound`.
pub const STDERR_MULTIPLIER: f64 = 3.0;
/// Random pure inputs in the default battery.
pub const DEFAULT_RANDOM_INPUTS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `|measured − expected| ≤ tolerance`.
    Exact,
    /// `measured + 3·stderr ≤ expected + tolerance`.
    Bound,
}

/// Outcome of one named check. The runtime is kept out of the serialized
/// form so reports are reproducible byte for byte.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerificationReport {
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub kind: CheckKind,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stderr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub details: BTreeMap<String, serde_json::Value>,
    pub pass: bool,
    #[serde(skip)]
    pub runtime_secs: f64,
}

impl VerificationReport {
    pub fn exact(check: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self::build(check.into(), CheckKind::Exact, measured, expected, tolerance, None)
    }

    pub fn bound(check: impl Into<String>, measured: f64, bound: f64, tolerance: f64, stderr: Option<f64>) -> Self {
        Self::build(check.into(), CheckKind::Bound, measured, bound, tolerance, stderr)
    }

    fn build(
        check: String,
        kind: CheckKind,
        measured: f64,
        expected: f64,
        tolerance: f64,
        stderr: Option<f64>,
    ) -> Self {
        let mut r = Self {
            check,
            params: BTreeMap::new(),
            kind,
            measured,
            expected,
            tolerance,
            stderr,
            samples: None,
            seed: None,
            details: BTreeMap::new(),
            pass: false,
            runtime_secs: 0.0,
        };
        r.pass = r.evaluate();
        r
    }

    fn evaluate(&self) -> bool {
        if !self.measured.is_finite() {
            return false;
        }
        match self.kind {
            CheckKind::Exact => (self.measured - self.expected).abs() <= self.tolerance,
            CheckKind::Bound => {
                self.measured + STDERR_MULTIPLIER * self.stderr.unwrap_or(0.0) <= self.expected + self.tolerance
            }
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn sampled(mut self, samples: usize, seed: u64) -> Self {
        self.samples = Some(samples);
        self.seed = Some(seed);
        self
    }

    pub fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("detail values serialize"),
        );
        self
    }

    /// Fails the check on a side condition, recording why.
    pub fn require(mut self, condition: bool, what: &str) -> Self {
        if !condition {
            self.pass = false;
            self.details.insert(
                "failed_condition".to_string(),
                serde_json::Value::String(what.to_string()),
            );
        }
        self
    }
}

/// Residuals of a twirl identity: the largest norm of a cross term
/// (`P ≠ P′`) and the largest deviation of a diagonal term from its
/// expected value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwirlResiduals {
    pub cross: f64,
    pub diagonal: f64,
}

/// Random density matrices: reduced states of random pure states on twice
/// as many qubits, so they are generically full rank.
pub fn random_density_matrices<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<CMatrix> {
    let dim = 1usize << n;
    (0..count)
        .map(|_| {
            let v = random_unit_vector(dim * dim, rng);
            CMatrix::from_fn(dim, dim, |i, j| {
                (0..dim).map(|k| v[i + dim * k] * v[j + dim * k].conj()).sum()
            })
        })
        .collect()
}

fn pauli_matrices(n: usize) -> Result<Vec<CMatrix>> {
    enumerate_paulis(n)?.iter().map(|p| p.to_matrix()).collect()
}

/// `(1/4^n) Σ_Q Q†PQ ρ Q†P′†Q` for all phase-free `P, P′` and each `ρ`:
/// zero when `P ≠ P′`, `PρP†` otherwise.
pub fn pauli_twirl_residuals(n: usize, inputs: &[CMatrix]) -> Result<TwirlResiduals> {
    if n > 3 {
        return Err(QauthError::LimitExceeded {
            what: "Pauli twirl qubits",
            value: n,
            limit: 3,
        });
    }
    let paulis = pauli_matrices(n)?;
    let norm = Complex64::new(1.0 / paulis.len() as f64, 0.0);
    let mut res = TwirlResiduals {
        cross: 0.0,
        diagonal: 0.0,
    };
    for (i, p) in paulis.iter().enumerate() {
        let twirled_p: Vec<CMatrix> = paulis.iter().map(|q| q.adjoint() * p * q).collect();
        for (j, pp) in paulis.iter().enumerate() {
            let twirled_pp: Vec<CMatrix> = paulis.iter().map(|q| q.adjoint() * pp.adjoint() * q).collect();
            for rho in inputs {
                let sum: CMatrix = twirled_p
                    .iter()
                    .zip(&twirled_pp)
                    .map(|(a, b)| a * rho * b)
                    .fold(CMatrix::zeros(rho.nrows(), rho.ncols()), |acc, m| acc + m)
                    * norm;
                if i == j {
                    res.diagonal = res.diagonal.max((sum - p * rho * p.adjoint()).norm());
                } else {
                    res.cross = res.cross.max(sum.norm());
                }
            }
        }
    }
    Ok(res)
}

/// `Σ_{C ∈ 𝒞₁} C†PC ρ C†P′C` over the 24 single-qubit Cliffords: zero for
/// `P ≠ P′`, and `8(2·Tr(ρ)·I − ρ)` for `P = P′ ≠ I`, which is never zero.
pub fn clifford_twirl_residuals(inputs: &[CMatrix]) -> Result<TwirlResiduals> {
    let group: Vec<CMatrix> = CliffordElement::enumerate_all(1, false)?
        .iter()
        .map(|c| c.to_unitary())
        .collect::<Result<_>>()?;
    let paulis: Vec<CMatrix> = pauli_matrices(1)?.into_iter().skip(1).collect();
    let id = CMatrix::identity(2, 2);
    let mut res = TwirlResiduals {
        cross: 0.0,
        diagonal: 0.0,
    };
    for (i, p) in paulis.iter().enumerate() {
        for (j, pp) in paulis.iter().enumerate() {
            for rho in inputs {
                let sum = group
                    .iter()
                    .map(|c| c.adjoint() * p * c * rho * c.adjoint() * pp * c)
                    .fold(CMatrix::zeros(2, 2), |acc, m| acc + m);
                if i == j {
                    let expected = (&id * (rho.trace() * 2.0) - rho) * Complex64::new(8.0, 0.0);
                    res.diagonal = res.diagonal.max((sum - expected).norm());
                } else {
                    res.cross = res.cross.max(sum.norm());
                }
            }
        }
    }
    Ok(res)
}

/// Table `counts[p][q] = |{C : C Q C† = P up to phase}|` over the
/// non-identity single-qubit Paulis in the order Z, X, Y.
pub fn clifford_randomization_table() -> Result<Vec<Vec<usize>>> {
    let group = CliffordElement::enumerate_all(1, false)?;
    let paulis: Vec<PauliOperator> = enumerate_paulis(1)?.into_iter().skip(1).collect();
    paulis
        .iter()
        .map(|p| {
            paulis
                .iter()
                .map(|q| crate::clifford::randomization_counts(&group, p, q))
                .collect()
        })
        .collect()
}

/// Inputs on `[M, R]`: a maximally entangled state between the message and
/// the reference (on as many qubit pairs as the smaller register has, the
/// rest in `|0⟩`), every computational basis state and `random` random
/// pure states.
pub fn input_battery<R: Rng + ?Sized>(
    message_qubits: usize,
    r_qubits: usize,
    random: usize,
    rng: &mut R,
) -> Result<Vec<DensityState>> {
    let layout = SubsystemLayout::new(vec![("M", message_qubits), ("R", r_qubits)])?;
    let pairs = message_qubits.min(r_qubits);
    let mut inputs = Vec::with_capacity(1 + layout.dim() + random);
    let mut v = vec![Complex64::new(0.0, 0.0); layout.dim()];
    let amp = Complex64::new(1.0 / ((1usize << pairs) as f64).sqrt(), 0.0);
    for j in 0..(1usize << pairs) {
        v[j | (j << message_qubits)] = amp;
    }
    inputs.push(DensityState::from_pure(layout.clone(), &v)?);
    for b in 0..layout.dim() {
        inputs.push(DensityState::basis(layout.clone(), b)?);
    }
    for _ in 0..random {
        inputs.push(DensityState::random_pure(layout.clone(), rng)?);
    }
    Ok(inputs)
}

/// Result of a security-gap measurement over an input battery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapMeasurement {
    /// `max_ρ D(real(ρ), ideal(ρ))`.
    pub measured: f64,
    /// Standard error of the gap at the maximizing input, from batch means.
    pub stderr: Option<f64>,
    pub worst_input: usize,
    /// Largest disagreement between the two ideal-channel oracles, when the
    /// EPR simulator is feasible.
    pub oracle_residual: Option<f64>,
    /// Gap of the closed-form key average (Clifford code only).
    pub closed_form_gap: Option<f64>,
    /// `(acc_mc − acc_closed)/σ` at the first input, for sampled keys.
    pub acc_weight_z: Option<f64>,
}

fn oracle_gate(check: &str, a: &FlaggedChannel, b: &FlaggedChannel, inputs: &[DensityState]) -> Result<f64> {
    let residual = a.max_distance(b, inputs)?;
    if residual > ORACLE_TOLERANCE {
        return Err(QauthError::OracleDisagreement {
            check: check.to_string(),
            residual,
            tolerance: ORACLE_TOLERANCE,
        });
    }
    Ok(residual)
}

fn gaps(real: &FlaggedChannel, ideal: &FlaggedChannel, inputs: &[DensityState]) -> Result<Vec<f64>> {
    inputs
        .iter()
        .map(|rho| real.apply(rho)?.distance(&ideal.apply(rho)?))
        .collect()
}

fn argmax(values: &[f64]) -> (usize, f64) {
    values.iter().cloned().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (i, v)| if v > best.1 { (i, v) } else { best },
    )
}

fn measure(real: &AveragedChannel, ideal: &FlaggedChannel, inputs: &[DensityState]) -> Result<GapMeasurement> {
    if inputs.is_empty() {
        return Err(QauthError::Infeasible("empty input battery".into()));
    }
    let (worst_input, measured) = argmax(&gaps(&real.mean, ideal, inputs)?);
    let stderr = if real.is_sampled() {
        let rho = &inputs[worst_input];
        let batch_gaps = real
            .batches
            .iter()
            .map(|b| b.apply(rho)?.distance(&ideal.apply(rho)?))
            .collect::<Result<Vec<f64>>>()?;
        Some(mean_and_stderr(&batch_gaps).1)
    } else {
        None
    };
    Ok(GapMeasurement {
        measured,
        stderr,
        worst_input,
        oracle_residual: None,
        closed_form_gap: None,
        acc_weight_z: None,
    })
}

/// Security gap of the Clifford code against `attack`. The EPR simulator
/// and the closed form must agree before anything is measured; the
/// closed-form key average is reported alongside, and for sampled keys the
/// accept weight of the Monte-Carlo average is compared with it.
pub fn security_gap_clifford(
    params: &CliffordCodeParams,
    attack: &AttackUnitary,
    inputs: &[DensityState],
    strategy: KeyStrategy,
    omega: &DensityState,
) -> Result<GapMeasurement> {
    let decomp = decompose(attack)?;
    let ideal = closed_form_clifford(&decomp, params.n, omega)?;
    let oracle_residual = match ideal_clifford_channel(attack, params.n, omega) {
        Ok(epr) => Some(oracle_gate("clifford ideal channel", &ideal, &epr, inputs)?),
        Err(QauthError::LimitExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let twirled = clifford_code::twirled_channel(params, &decomp, omega)?;
    let closed_form_gap = argmax(&gaps(&twirled, &ideal, inputs)?).1;
    let real = clifford_code::keyed_average_channel(params, attack, strategy, omega)?;
    let mut m = measure(&real, &ideal, inputs)?;
    m.oracle_residual = oracle_residual;
    m.closed_form_gap = Some(closed_form_gap);
    if real.is_sampled() {
        let rho = &inputs[0];
        let batch_acc = real
            .batches
            .iter()
            .map(|b| Ok(b.apply(rho)?.acc_weight()))
            .collect::<Result<Vec<f64>>>()?;
        let (_, se) = mean_and_stderr(&batch_acc);
        let diff = real.mean.apply(rho)?.acc_weight() - twirled.apply(rho)?.acc_weight();
        m.acc_weight_z = (se > 0.0).then(|| diff / se);
    }
    Ok(m)
}

/// Closed-form Clifford-code gap for a decomposed attack: the twirled key
/// average against the closed-form ideal channel.
pub fn closed_form_gap_clifford(
    params: &CliffordCodeParams,
    decomp: &PauliDecomposition,
    inputs: &[DensityState],
    omega: &DensityState,
) -> Result<f64> {
    let ideal = closed_form_clifford(decomp, params.n, omega)?;
    let twirled = clifford_code::twirled_channel(params, decomp, omega)?;
    Ok(argmax(&gaps(&twirled, &ideal, inputs)?).1)
}

/// `(4^n·2^d − 1)/(4^{n+d} − 1)`, the gap of any non-identity Pauli attack.
pub fn clifford_pauli_gap(params: &CliffordCodeParams) -> f64 {
    let num = 4f64.powi(params.n as i32) * 2f64.powi(params.d as i32) - 1.0;
    num / (4f64.powi(params.total() as i32) - 1.0)
}

/// Closed-form gaps of a single-qubit Pauli `letter ⊗ I` attack for
/// `n = 1` and each `d`.
pub fn clifford_gap_by_d(
    letter: &str,
    ds: &[usize],
    inputs: &[DensityState],
    omega: &DensityState,
) -> Result<Vec<f64>> {
    ds.iter()
        .map(|&d| {
            let params = CliffordCodeParams::new(1, d)?;
            let p: PauliOperator = format!("{letter}{}", "I".repeat(d)).parse()?;
            let decomp = PauliDecomposition::single_pauli(&p, inputs[0].layout().size_of("R")?)?;
            closed_form_gap_clifford(&params, &decomp, inputs, omega)
        })
        .collect()
}

/// How the trap-code key average is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrapMode {
    /// Dense simulation averaged over every key.
    Dense,
    /// Pauli attacks tracked symbolically, over every permutation
    /// (`samples = None`) or a seeded sample of permutations.
    Symbolic { samples: Option<usize>, seed: u64 },
}

#[derive(Clone, Debug)]
pub enum TrapAttack {
    Unitary(AttackUnitary),
    /// `P ⊗ I_R` on a reference of `r_qubits`.
    Pauli {
        pauli: PauliOperator,
        r_qubits: usize,
    },
}

impl TrapAttack {
    fn decomposition(&self) -> Result<PauliDecomposition> {
        match self {
            TrapAttack::Unitary(u) => decompose(u),
            TrapAttack::Pauli { pauli, r_qubits } => PauliDecomposition::single_pauli(pauli, *r_qubits),
        }
    }

    fn unitary(&self) -> Result<AttackUnitary> {
        match self {
            TrapAttack::Unitary(u) => Ok(u.clone()),
            TrapAttack::Pauli { pauli, r_qubits } => AttackUnitary::pauli(pauli, *r_qubits),
        }
    }
}

/// Security gap of the trap code. The closed-form ideal channel is checked
/// against the EPR simulator whenever the latter fits.
pub fn security_gap_trap(
    trap: &TrapCode,
    attack: &TrapAttack,
    inputs: &[DensityState],
    mode: TrapMode,
    omega: &DensityState,
) -> Result<GapMeasurement> {
    let decomp = attack.decomposition()?;
    let ideal = closed_form_trap(&decomp, trap.n(), trap.t(), omega)?;
    let oracle_residual = if trap.codeword_qubits() <= MAX_TRAP_SIMULATOR_PAIRS {
        let epr = ideal_trap_channel(&attack.unitary()?, trap.n(), trap.t(), omega)?;
        Some(oracle_gate("trap ideal channel", &ideal, &epr, inputs)?)
    } else {
        None
    };
    let real = match (mode, attack) {
        (TrapMode::Dense, _) => {
            if trap.codeword_qubits() > 3 {
                return Err(QauthError::Infeasible(format!(
                    "dense key average over {} codeword qubits",
                    trap.codeword_qubits()
                )));
            }
            trap.exhaustive_keyed_channel(&attack.unitary()?, omega)?
        }
        (TrapMode::Symbolic { samples, seed }, TrapAttack::Pauli { pauli, r_qubits }) => {
            trap.symbolic_keyed_channel(pauli, *r_qubits, samples.map(|s| (s, seed)), omega)?
        }
        (TrapMode::Symbolic { .. }, TrapAttack::Unitary(_)) => {
            return Err(QauthError::Infeasible("symbolic mode needs a Pauli attack".into()));
        }
    };
    let mut m = measure(&real, &ideal, inputs)?;
    m.oracle_residual = oracle_residual;
    Ok(m)
}

/// Largest `max(1 − acc weight, D(acc, ρ))` over `trials` random keys and
/// pure inputs with no attack.
pub fn correctness_clifford<R: Rng + ?Sized>(params: &CliffordCodeParams, trials: usize, rng: &mut R) -> Result<f64> {
    let omega = crate::channel::default_omega(params.n)?;
    let layout = SubsystemLayout::single("M", params.n)?;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let key = CliffordElement::sample_uniform(params.total(), rng)?;
        let rho = DensityState::random_pure(layout.clone(), rng)?;
        let out = clifford_code::decode(params, &key, &clifford_code::encode(params, &key, &rho)?, &omega)?;
        worst = worst.max(1.0 - out.acc_weight()).max(trace_distance(&out.acc, &rho)?);
    }
    Ok(worst)
}

/// As [`correctness_clifford`] for the trap code.
pub fn correctness_trap<R: Rng + ?Sized>(trap: &TrapCode, trials: usize, rng: &mut R) -> Result<f64> {
    let omega = crate::channel::default_omega(1)?;
    let layout = SubsystemLayout::single("M", 1)?;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let key = TrapKey::random(trap.codeword_qubits(), rng)?;
        let rho = DensityState::random_pure(layout.clone(), rng)?;
        let out = trap.decode(&key, &trap.encode(&key, &rho)?, &omega)?;
        worst = worst.max(1.0 - out.acc_weight()).max(trace_distance(&out.acc, &rho)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::default_omega;
    use crate::trap_code::EcCode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn battery(seed: u64) -> Vec<DensityState> {
        input_battery(1, 1, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn report_pass_rules() {
        assert!(VerificationReport::exact("a", 1.0, 1.0 + 1e-10, 1e-9).pass);
        assert!(!VerificationReport::exact("a", 1.0, 1.1, 1e-9).pass);
        assert!(VerificationReport::bound("b", 0.5, 0.75, 0.0, Some(0.08)).pass);
        assert!(!VerificationReport::bound("b", 0.5, 0.75, 0.0, Some(0.09)).pass);
        assert!(!VerificationReport::bound("b", f64::NAN, 0.75, 0.0, None).pass);
        assert!(
            !VerificationReport::exact("a", 0.0, 0.0, 0.0)
                .require(false, "side")
                .pass
        );
    }

    #[test]
    fn report_serialization_omits_runtime() {
        let mut r = VerificationReport::exact("a", 0.0, 0.0, 0.0)
            .param("n", 1)
            .detail("xs", [1, 2]);
        r.runtime_secs = 3.0;
        let json = serde_json::to_string(&r).unwrap();
        assert!(!json.contains("runtime"));
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.params["n"], "1");
        assert_eq!(back.runtime_secs, 0.0);
    }

    #[test]
    fn pauli_twirl_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=2 {
            let inputs = random_density_matrices(n, 5, &mut rng);
            let r = pauli_twirl_residuals(n, &inputs).unwrap();
            assert!(r.cross < 1e-12 && r.diagonal < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn clifford_twirl_and_randomization() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let inputs = random_density_matrices(1, 5, &mut rng);
        let r = clifford_twirl_residuals(&inputs).unwrap();
        assert!(r.cross < 1e-12 && r.diagonal < 1e-12, "{r:?}");
        for row in clifford_randomization_table().unwrap() {
            assert_eq!(row, vec![8, 8, 8]);
        }
    }

    #[test]
    fn random_density_matrices_are_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in random_density_matrices(2, 3, &mut rng) {
            let s = DensityState::new(SubsystemLayout::single("A", 2).unwrap(), m).unwrap();
            assert!((s.trace_weight() - 1.0).abs() < 1e-12);
            assert!(s.purity() < 1.0 - 1e-6);
        }
    }

    #[test]
    fn battery_shape() {
        let b = battery(4);
        assert_eq!(b.len(), 1 + 4 + 4);
        assert!((b[0].purity() - 1.0).abs() < 1e-12);
        assert!((b[0].matrix()[(3, 0)].re - 0.5).abs() < 1e-12);
        let uneven = input_battery(2, 1, 0, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(uneven.len(), 9);
    }

    #[test]
    fn pauli_attack_gap_closed_form() {
        let omega = default_omega(1).unwrap();
        let inputs = battery(5);
        for (d, expected) in [(1, 7.0 / 15.0), (2, 5.0 / 21.0), (3, 31.0 / 255.0)] {
            let params = CliffordCodeParams::new(1, d).unwrap();
            assert!((clifford_pauli_gap(&params) - expected).abs() < 1e-15);
        }
        let gaps = clifford_gap_by_d("X", &[1, 2, 3], &inputs, &omega).unwrap();
        assert!((gaps[1] - 5.0 / 21.0).abs() < 1e-9, "{gaps:?}");
        assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn clifford_gap_exhaustive_matches_closed_form() {
        let omega = default_omega(1).unwrap();
        let inputs = battery(6);
        let params = CliffordCodeParams::new(1, 1).unwrap();
        let attack = AttackUnitary::pauli(&"IX".parse().unwrap(), 1).unwrap();
        let strategy = KeyStrategy::Exhaustive { allow_two_qubits: true };
        let m = security_gap_clifford(&params, &attack, &inputs, strategy, &omega).unwrap();
        assert!((m.measured - 7.0 / 15.0).abs() < 1e-9, "{m:?}");
        assert!((m.closed_form_gap.unwrap() - m.measured).abs() < 1e-9);
        assert!(m.oracle_residual.unwrap() < 1e-9);
        let id = AttackUnitary::identity(2, 1).unwrap();
        let m = security_gap_clifford(&params, &id, &inputs, strategy, &omega).unwrap();
        assert!(m.measured < 1e-9);
    }

    #[test]
    fn clifford_sampled_gap_has_error_bars() {
        let omega = default_omega(1).unwrap();
        let inputs = battery(7);
        let params = CliffordCodeParams::new(1, 2).unwrap();
        let attack = AttackUnitary::pauli(&"XII".parse().unwrap(), 1).unwrap();
        let strategy = KeyStrategy::Sampled { count: 2000, seed: 9 };
        let m = security_gap_clifford(&params, &attack, &inputs, strategy, &omega).unwrap();
        let se = m.stderr.unwrap();
        assert!(se > 0.0 && se < 0.05);
        assert!((m.measured - 5.0 / 21.0).abs() < 6.0 * se + 0.02, "{m:?}");
        assert!(m.acc_weight_z.unwrap().abs() < 5.0);
    }

    #[test]
    fn trap_gap_is_tight_for_message_flip() {
        let omega = default_omega(1).unwrap();
        let inputs = battery(8);
        let trap = TrapCode::new(EcCode::trivial());
        let attack = TrapAttack::Pauli {
            pauli: "XII".parse().unwrap(),
            r_qubits: 1,
        };
        let m = security_gap_trap(&trap, &attack, &inputs, TrapMode::Dense, &omega).unwrap();
        assert!((m.measured - 1.0 / 3.0).abs() < 1e-9, "{m:?}");
        let sym = security_gap_trap(
            &trap,
            &attack,
            &inputs,
            TrapMode::Symbolic { samples: None, seed: 0 },
            &omega,
        )
        .unwrap();
        assert!((sym.measured - m.measured).abs() < 1e-9);
        let u = TrapAttack::Unitary(AttackUnitary::identity(3, 1).unwrap());
        let err = security_gap_trap(
            &trap,
            &u,
            &inputs,
            TrapMode::Symbolic { samples: None, seed: 0 },
            &omega,
        );
        assert!(matches!(err, Err(QauthError::Infeasible(_))));
    }

    #[test]
    fn correctness_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let params = CliffordCodeParams::new(1, 2).unwrap();
        assert!(correctness_clifford(&params, 5, &mut rng).unwrap() < 1e-9);
        let trap = TrapCode::new(EcCode::trivial());
        assert!(correctness_trap(&trap, 5, &mut rng).unwrap() < 1e-9);
    }
}
