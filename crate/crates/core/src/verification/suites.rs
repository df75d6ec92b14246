//! Named groups of checks with their configuration. Every check draws its
//! randomness from a seed derived from the root seed and the check name.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::eta::{
    bound_chain_check, eta_bound, eta_bruteforce_multi, eta_from_compositions, eta_product, extremal_pauli,
    max_eta_ratio_bruteforce, pauli_with_counts, random_pauli_uniform_weight, worst_letter_profile, Composition,
};
use super::*;
use crate::adversary::AttackSpec;
use crate::channel::default_omega;
use crate::pauli::enumerate_paulis;
use crate::seeds::{derive_seed, job_rng};
use crate::simulators::LetterCounts;
use crate::trap_code::{EcCode, EcCodeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemmas,
    Correctness,
    SecurityClifford,
    SecurityTrap,
    Eta,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Lemmas,
        Suite::Correctness,
        Suite::SecurityClifford,
        Suite::SecurityTrap,
        Suite::Eta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Correctness => "correctness",
            Suite::SecurityClifford => "security_clifford",
            Suite::SecurityTrap => "security_trap",
            Suite::Eta => "eta",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = QauthError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| QauthError::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaConfig {
    /// Pauli twirl checked for every `n` up to this.
    pub pauli_max_n: usize,
    pub random_inputs: usize,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self {
            pauli_max_n: 2,
            random_inputs: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrectnessConfig {
    pub trials: usize,
    pub n: usize,
    pub d: usize,
}

impl Default for CorrectnessConfig {
    fn default() -> Self {
        Self { trials: 50, n: 1, d: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CliffordSecurityConfig {
    pub n: usize,
    pub d: usize,
    pub r_qubits: usize,
    pub haar_attacks: usize,
    /// Adds every non-identity Pauli on the codeword as an attack.
    pub pauli_attacks: bool,
    pub key_samples: usize,
    pub random_inputs: usize,
    /// Trap counts for the monotonicity check at `n = 1`.
    pub monotonic_d: Vec<usize>,
    pub extra_attacks: Vec<AttackSpec>,
}

impl Default for CliffordSecurityConfig {
    fn default() -> Self {
        Self {
            n: 1,
            d: 2,
            r_qubits: 1,
            haar_attacks: 50,
            pauli_attacks: true,
            key_samples: 10_000,
            random_inputs: DEFAULT_RANDOM_INPUTS,
            monotonic_d: vec![1, 2, 3],
            extra_attacks: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapSecurityConfig {
    pub r_qubits: usize,
    pub random_inputs: usize,
    /// Haar attacks for the dense `n = 1` key average.
    pub haar_attacks: usize,
    pub symbolic_code: EcCodeKind,
    pub symbolic_attacks: usize,
    pub symbolic_samples: usize,
    /// Added to the dense `n = 1` attacks.
    pub extra_attacks: Vec<AttackSpec>,
}

impl Default for TrapSecurityConfig {
    fn default() -> Self {
        Self {
            r_qubits: 1,
            random_inputs: DEFAULT_RANDOM_INPUTS,
            haar_attacks: 20,
            symbolic_code: EcCodeKind::FiveQubit,
            symbolic_attacks: 200,
            symbolic_samples: 10_000,
            extra_attacks: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EtaConfig {
    pub n: Vec<usize>,
    pub t: Vec<usize>,
    /// Codewords up to this size are checked on every Pauli; larger ones on
    /// `sampled_paulis` random Paulis.
    pub exhaustive_max_qubits: usize,
    pub sampled_paulis: usize,
    pub chain_max_n: usize,
}

impl Default for EtaConfig {
    fn default() -> Self {
        Self {
            n: vec![1, 2, 3],
            t: vec![0, 1],
            exhaustive_max_qubits: 6,
            sampled_paulis: 500,
            chain_max_n: 50,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub lemmas: LemmaConfig,
    pub correctness: CorrectnessConfig,
    pub clifford: CliffordSecurityConfig,
    pub trap: TrapSecurityConfig,
    pub eta: EtaConfig,
}

impl SuiteConfig {
    /// Rejects parameter combinations the suites cannot run.
    pub fn validate(&self) -> Result<()> {
        let infeasible = |msg: String| Err(QauthError::Infeasible(msg));
        if self.lemmas.pauli_max_n == 0 || self.lemmas.pauli_max_n > 3 {
            return infeasible(format!("lemmas.pauli_max_n = {} (1..=3)", self.lemmas.pauli_max_n));
        }
        if self.lemmas.random_inputs == 0 {
            return infeasible("lemmas.random_inputs must be positive".into());
        }
        CliffordCodeParams::new(self.correctness.n, self.correctness.d)?;
        let c = &self.clifford;
        CliffordCodeParams::new(c.n, c.d)?;
        if c.key_samples < crate::sampling::DEFAULT_BATCHES {
            return infeasible(format!(
                "clifford.key_samples = {} (at least {})",
                c.key_samples,
                crate::sampling::DEFAULT_BATCHES
            ));
        }
        if c.r_qubits > 3 || self.trap.r_qubits > 3 {
            return infeasible("reference register above 3 qubits".into());
        }
        for spec in &c.extra_attacks {
            spec.build(c.n + c.d, c.r_qubits)?;
        }
        for spec in &self.trap.extra_attacks {
            spec.build(3, self.trap.r_qubits)?;
        }
        for &d in &c.monotonic_d {
            CliffordCodeParams::new(1, d)?;
        }
        if self.trap.symbolic_samples < crate::sampling::DEFAULT_BATCHES {
            return infeasible(format!("trap.symbolic_samples = {}", self.trap.symbolic_samples));
        }
        let e = &self.eta;
        if let Some(&n) = e.n.iter().find(|&&n| n == 0 || 3 * n > eta::MAX_BRUTEFORCE_QUBITS) {
            return infeasible(format!("eta.n = {n} (1..=3)"));
        }
        if e.chain_max_n == 0 || e.chain_max_n > 200 {
            return infeasible(format!("eta.chain_max_n = {} (1..=200)", e.chain_max_n));
        }
        Ok(())
    }
}

fn timed(f: impl FnOnce() -> Result<VerificationReport>) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut r = f()?;
    r.runtime_secs = start.elapsed().as_secs_f64();
    Ok(r)
}

/// Runs one suite; reports come back sorted by check name.
pub fn run_suite(suite: Suite, config: &SuiteConfig, seed: u64) -> Result<Vec<VerificationReport>> {
    let mut reports = match suite {
        Suite::Lemmas => lemmas(&config.lemmas, seed)?,
        Suite::Correctness => correctness(&config.correctness, seed)?,
        Suite::SecurityClifford => security_clifford(&config.clifford, seed)?,
        Suite::SecurityTrap => security_trap(&config.trap, seed)?,
        Suite::Eta => eta_suite(&config.eta, seed)?,
    };
    reports.sort_by(|a, b| a.check.cmp(&b.check));
    Ok(reports)
}

pub fn lemmas(cfg: &LemmaConfig, root: u64) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for n in 1..=cfg.pauli_max_n {
        let name = format!("lemma.pauli_twirl.n{n}");
        let seed = derive_seed(root, &name);
        out.push(timed(|| {
            let inputs = random_density_matrices(n, cfg.random_inputs, &mut job_rng(seed, "inputs"));
            let r = pauli_twirl_residuals(n, &inputs)?;
            Ok(
                VerificationReport::exact(&name, r.cross.max(r.diagonal), 0.0, LEMMA_TOLERANCE)
                    .param("n", n)
                    .param("inputs", cfg.random_inputs)
                    .seeded(seed)
                    .detail("cross_residual", r.cross)
                    .detail("diagonal_residual", r.diagonal),
            )
        })?);
    }
    let name = "lemma.clifford_twirl";
    let seed = derive_seed(root, name);
    out.push(timed(|| {
        let inputs = random_density_matrices(1, cfg.random_inputs, &mut job_rng(seed, "inputs"));
        let r = clifford_twirl_residuals(&inputs)?;
        Ok(VerificationReport::exact(name, r.cross, 0.0, LEMMA_TOLERANCE)
            .param("n", 1)
            .param("inputs", cfg.random_inputs)
            .seeded(seed)
            .detail("diagonal_residual", r.diagonal)
            .require(r.diagonal <= LEMMA_TOLERANCE, "P = P' sum equals 8(2 Tr(rho) I - rho)"))
    })?);
    out.push(timed(|| {
        let table = clifford_randomization_table()?;
        let worst = table
            .iter()
            .flatten()
            .map(|&c| (c as f64 - 8.0).abs())
            .fold(0.0, f64::max);
        Ok(
            VerificationReport::exact("lemma.clifford_randomization", worst, 0.0, 0.0)
                .param("n", 1)
                .detail("table", table),
        )
    })?);
    Ok(out)
}

pub fn correctness(cfg: &CorrectnessConfig, root: u64) -> Result<Vec<VerificationReport>> {
    let params = CliffordCodeParams::new(cfg.n, cfg.d)?;
    let name = "correctness.clifford";
    let seed = derive_seed(root, name);
    let clifford = timed(|| {
        let worst = correctness_clifford(&params, cfg.trials, &mut job_rng(seed, "trials"))?;
        Ok(VerificationReport::bound(name, worst, 0.0, LEMMA_TOLERANCE, None)
            .param("n", cfg.n)
            .param("d", cfg.d)
            .sampled(cfg.trials, seed))
    })?;
    let name = "correctness.trap";
    let seed = derive_seed(root, name);
    let trap = timed(|| {
        let code = TrapCode::new(EcCode::trivial());
        let worst = correctness_trap(&code, cfg.trials, &mut job_rng(seed, "trials"))?;
        Ok(VerificationReport::bound(name, worst, 0.0, LEMMA_TOLERANCE, None)
            .param("n", 1)
            .param("ec", EcCodeKind::Trivial)
            .sampled(cfg.trials, seed))
    })?;
    Ok(vec![clifford, trap])
}

/// One attack with the label used in reports.
struct LabelledAttack<A> {
    label: String,
    attack: A,
}

/// Gap measurements, or the disagreement that stopped them.
#[derive(Clone)]
enum Gated<T> {
    Measured(Vec<(String, T)>),
    Disagreement { check: String, residual: f64 },
}

fn gated<A, T>(attacks: &[LabelledAttack<A>], mut f: impl FnMut(&LabelledAttack<A>) -> Result<T>) -> Result<Gated<T>> {
    let mut out = Vec::with_capacity(attacks.len());
    for a in attacks {
        match f(a) {
            Ok(m) => out.push((a.label.clone(), m)),
            Err(QauthError::OracleDisagreement { check, residual, .. }) => {
                return Ok(Gated::Disagreement {
                    check: format!("{check} ({})", a.label),
                    residual,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Gated::Measured(out))
}

fn oracle_report(name: &str, gated: &Gated<GapMeasurement>) -> VerificationReport {
    match gated {
        Gated::Measured(ms) => {
            let worst = ms.iter().filter_map(|(_, m)| m.oracle_residual).fold(0.0, f64::max);
            let checked = ms.iter().filter(|(_, m)| m.oracle_residual.is_some()).count();
            VerificationReport::bound(name, worst, ORACLE_TOLERANCE, 0.0, None).detail("attacks_checked", checked)
        }
        Gated::Disagreement { check, residual } => {
            VerificationReport::bound(name, *residual, ORACLE_TOLERANCE, 0.0, None).detail("disagreement", check)
        }
    }
}

/// The measurement with the largest `measured + 3·stderr`.
fn worst_gap(ms: &[(String, GapMeasurement)]) -> Option<&(String, GapMeasurement)> {
    let key = |m: &GapMeasurement| m.measured + STDERR_MULTIPLIER * m.stderr.unwrap_or(0.0);
    ms.iter().fold(None, |best, cur| match best {
        Some(b) if key(&b.1) >= key(&cur.1) => Some(b),
        _ => Some(cur),
    })
}

fn bound_report(name: &str, bound: f64, tolerance: f64, gated: &Gated<GapMeasurement>) -> VerificationReport {
    match gated {
        Gated::Measured(ms) => match worst_gap(ms) {
            Some((label, m)) => VerificationReport::bound(name, m.measured, bound, tolerance, m.stderr)
                .detail("worst_attack", label)
                .detail("worst_input", m.worst_input)
                .detail("attacks", ms.len()),
            None => VerificationReport::bound(name, f64::NAN, bound, tolerance, None).detail("attacks", 0),
        },
        Gated::Disagreement { check, .. } => VerificationReport::bound(name, f64::NAN, bound, tolerance, None)
            .detail("not_run", format!("oracle disagreement in {check}")),
    }
}

pub fn security_clifford(cfg: &CliffordSecurityConfig, root: u64) -> Result<Vec<VerificationReport>> {
    let params = CliffordCodeParams::new(cfg.n, cfg.d)?;
    let omega = default_omega(cfg.n)?;
    let inputs = input_battery(
        cfg.n,
        cfg.r_qubits,
        cfg.random_inputs,
        &mut job_rng(root, "security.clifford/inputs"),
    )?;
    let total = params.total();
    let mut attacks = Vec::new();
    for i in 0..cfg.haar_attacks {
        let seed = derive_seed(root, &format!("security.clifford/haar-{i}"));
        attacks.push(LabelledAttack {
            label: format!("haar-{i}"),
            attack: AttackUnitary::haar_seeded(total, cfg.r_qubits, seed)?,
        });
    }
    for spec in &cfg.extra_attacks {
        attacks.push(LabelledAttack {
            label: spec.to_string(),
            attack: spec.build(total, cfg.r_qubits)?,
        });
    }
    let paulis: Vec<PauliOperator> = if cfg.pauli_attacks {
        enumerate_paulis(total)?
            .into_iter()
            .filter(|p| !p.is_identity())
            .collect()
    } else {
        Vec::new()
    };
    for p in &paulis {
        attacks.push(LabelledAttack {
            label: format!("pauli:{p}"),
            attack: AttackUnitary::pauli(p, cfg.r_qubits)?,
        });
    }
    let base = |r: VerificationReport| r.param("n", cfg.n).param("d", cfg.d).param("r_qubits", cfg.r_qubits);

    let start = Instant::now();
    let key_seed = derive_seed(root, "security.clifford/keys");
    let measured = gated(&attacks, |a| {
        let strategy = KeyStrategy::Sampled {
            count: cfg.key_samples,
            seed: derive_seed(key_seed, &a.label),
        };
        security_gap_clifford(&params, &a.attack, &inputs, strategy, &omega)
    })?;
    let shared_runtime = start.elapsed().as_secs_f64();

    let mut out = Vec::new();
    let mut r = base(oracle_report("security.clifford.oracle", &measured));
    r.runtime_secs = shared_runtime;
    out.push(r);
    let bound = 3.0 / 2f64.powi(cfg.d as i32);
    let mut r = base(bound_report("security.clifford.bound", bound, 0.0, &measured))
        .sampled(cfg.key_samples, key_seed)
        .param("inputs", inputs.len());
    r.runtime_secs = shared_runtime;
    out.push(r);

    if let Gated::Measured(ms) = &measured {
        if !paulis.is_empty() {
            let expected = clifford_pauli_gap(&params);
            let deviation = |v: f64| {
                if v.is_nan() {
                    f64::INFINITY
                } else {
                    (v - expected).abs()
                }
            };
            let (label, cf) = ms
                .iter()
                .filter(|(l, _)| l.starts_with("pauli:"))
                .map(|(l, m)| (l.clone(), m.closed_form_gap.unwrap_or(f64::NAN)))
                .fold((String::new(), expected), |best, cur| {
                    if deviation(cur.1) > deviation(best.1) {
                        cur
                    } else {
                        best
                    }
                });
            out.push(base(
                VerificationReport::exact("security.clifford.pauli_closed_form", cf, expected, 1e-6)
                    .detail("worst_attack", label)
                    .detail("attacks", paulis.len()),
            ));
        }
        let zs: Vec<f64> = ms.iter().filter_map(|(_, m)| m.acc_weight_z).collect();
        if !zs.is_empty() {
            let pooled = zs.iter().sum::<f64>() / (zs.len() as f64).sqrt();
            let max_abs = zs.iter().map(|z| z.abs()).fold(0.0, f64::max);
            out.push(base(
                VerificationReport::bound(
                    "security.clifford.mc_agreement",
                    pooled.abs(),
                    STDERR_MULTIPLIER,
                    0.0,
                    None,
                )
                .detail("attacks", zs.len())
                .detail("max_abs_z", max_abs)
                .sampled(cfg.key_samples, key_seed),
            ));
        }
    }

    let name = "security.clifford.identity";
    out.push(timed(|| {
        let seed = derive_seed(root, name);
        let strategy = KeyStrategy::Sampled { count: 200, seed };
        let id = AttackUnitary::identity(total, cfg.r_qubits)?;
        let m = security_gap_clifford(&params, &id, &inputs, strategy, &omega)?;
        Ok(base(VerificationReport::exact(name, m.measured, 0.0, LEMMA_TOLERANCE)).sampled(200, seed))
    })?);

    if !cfg.monotonic_d.is_empty() {
        let name = "security.clifford.monotonic_d";
        out.push(timed(|| {
            let mono_inputs = input_battery(1, cfg.r_qubits, cfg.random_inputs, &mut job_rng(root, name))?;
            let gaps = clifford_gap_by_d("X", &cfg.monotonic_d, &mono_inputs, &default_omega(1)?)?;
            let increase = gaps.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            Ok(VerificationReport::bound(name, increase, 0.0, 1e-12, None)
                .param("n", 1)
                .param("d", format!("{:?}", cfg.monotonic_d))
                .param("attack", "X on the message qubit")
                .detail("gaps", gaps))
        })?);
    }
    Ok(out)
}

pub fn security_trap(cfg: &TrapSecurityConfig, root: u64) -> Result<Vec<VerificationReport>> {
    let omega = default_omega(1)?;
    let inputs = input_battery(
        1,
        cfg.r_qubits,
        cfg.random_inputs,
        &mut job_rng(root, "security.trap/inputs"),
    )?;
    let mut out = Vec::new();

    // Dense: n = 1, t = 0, exhaustive keys.
    let trap = TrapCode::new(EcCode::trivial());
    let dense_params = |r: VerificationReport| r.param("n", 1).param("t", 0).param("r_qubits", cfg.r_qubits);
    let mut pauli_attacks = Vec::new();
    for p in enumerate_paulis(3)? {
        pauli_attacks.push(LabelledAttack {
            label: format!("pauli:{p}"),
            attack: TrapAttack::Pauli {
                pauli: p,
                r_qubits: cfg.r_qubits,
            },
        });
    }
    let mut haar_attacks = Vec::new();
    for i in 0..cfg.haar_attacks {
        let seed = derive_seed(root, &format!("security.trap/haar-{i}"));
        haar_attacks.push(LabelledAttack {
            label: format!("haar-{i}"),
            attack: TrapAttack::Unitary(AttackUnitary::haar_seeded(3, cfg.r_qubits, seed)?),
        });
    }
    for spec in &cfg.extra_attacks {
        haar_attacks.push(LabelledAttack {
            label: spec.to_string(),
            attack: TrapAttack::Unitary(spec.build(3, cfg.r_qubits)?),
        });
    }
    let start = Instant::now();
    let run = |a: &LabelledAttack<TrapAttack>| security_gap_trap(&trap, &a.attack, &inputs, TrapMode::Dense, &omega);
    let paulis = gated(&pauli_attacks, run)?;
    let haars = gated(&haar_attacks, run)?;
    let runtime = start.elapsed().as_secs_f64();
    let combined = match (&paulis, haars) {
        (Gated::Measured(a), Gated::Measured(b)) => Gated::Measured(a.iter().cloned().chain(b).collect()),
        (d @ Gated::Disagreement { .. }, _) => d.clone(),
        (_, d) => d,
    };
    let mut r = dense_params(oracle_report("security.trap.oracle", &combined));
    r.runtime_secs = runtime;
    out.push(r);
    let third = 1.0 / 3.0;
    let mut r = dense_params(bound_report(
        "security.trap.dense_bound",
        third,
        LEMMA_TOLERANCE,
        &combined,
    ))
    .param("keys", 384)
    .param("inputs", inputs.len());
    r.runtime_secs = runtime;
    out.push(r);
    let tight = bound_report("security.trap.dense_tight", third, LEMMA_TOLERANCE, &paulis);
    let mut r = dense_params(VerificationReport {
        kind: CheckKind::Exact,
        ..tight
    });
    r.pass = r.measured.is_finite() && (r.measured - third).abs() <= LEMMA_TOLERANCE;
    out.push(r);

    let name = "security.trap.identity";
    out.push(timed(|| {
        let id = TrapAttack::Unitary(AttackUnitary::identity(3, cfg.r_qubits)?);
        let m = security_gap_trap(&trap, &id, &inputs, TrapMode::Dense, &omega)?;
        Ok(dense_params(VerificationReport::exact(
            name,
            m.measured,
            0.0,
            LEMMA_TOLERANCE,
        )))
    })?);

    // Symbolic: sampled permutations, random Pauli attacks.
    let name = "security.trap.symbolic_bound";
    out.push(timed(|| {
        let code = TrapCode::new(EcCode::from_kind(cfg.symbolic_code));
        let m = code.codeword_qubits();
        let seed = derive_seed(root, name);
        let mut rng = job_rng(seed, "attacks");
        let mut attacks = Vec::with_capacity(cfg.symbolic_attacks);
        for i in 0..cfg.symbolic_attacks {
            let p = PauliOperator::random(m, true, &mut rng)?;
            attacks.push(LabelledAttack {
                label: format!("{i}:{p}"),
                attack: TrapAttack::Pauli {
                    pauli: p,
                    r_qubits: cfg.r_qubits,
                },
            });
        }
        let measured = gated(&attacks, |a| {
            let mode = TrapMode::Symbolic {
                samples: Some(cfg.symbolic_samples),
                seed: derive_seed(seed, &a.label),
            };
            security_gap_trap(&code, &a.attack, &inputs, mode, &omega)
        })?;
        let bound = (1.0f64 / 3.0).powi(code.t() as i32 + 1);
        Ok(bound_report(name, bound, LEMMA_TOLERANCE, &measured)
            .param("n", code.n())
            .param("t", code.t())
            .param("ec", cfg.symbolic_code)
            .param("r_qubits", cfg.r_qubits)
            .sampled(cfg.symbolic_samples, seed))
    })?);

    // The letter profile with the most permutations into E \ F.
    let name = "security.trap.symbolic_worst_profile";
    out.push(timed(|| {
        let code = TrapCode::new(EcCode::from_kind(cfg.symbolic_code));
        let m = code.codeword_qubits();
        let (counts, eta) = worst_letter_profile(code.n(), code.t())?;
        let pauli = pauli_with_counts(m, counts)?;
        let seed = derive_seed(root, name);
        let samples = (m > eta::MAX_BRUTEFORCE_QUBITS).then_some(cfg.symbolic_samples);
        let attack = TrapAttack::Pauli {
            pauli,
            r_qubits: cfg.r_qubits,
        };
        let measured = gated(
            &[LabelledAttack {
                label: format!("pauli:{pauli}"),
                attack,
            }],
            |a| security_gap_trap(&code, &a.attack, &inputs, TrapMode::Symbolic { samples, seed }, &omega),
        )?;
        let exact = eta as f64 / crate::simulators::factorial(m).map_or(f64::INFINITY, |f| f as f64);
        let bound = (1.0f64 / 3.0).powi(code.t() as i32 + 1);
        let r = bound_report(name, bound, LEMMA_TOLERANCE, &measured)
            .param("n", code.n())
            .param("t", code.t())
            .param("ec", cfg.symbolic_code)
            .param("r_qubits", cfg.r_qubits)
            .detail("exact_gap", exact);
        Ok(match samples {
            Some(s) => r.sampled(s, seed),
            None => r,
        })
    })?);
    Ok(out)
}

/// Paulis checked for one codeword size: all of them, or a seeded sample
/// with uniformly drawn weight that always includes the extremal Paulis.
fn eta_paulis(n: usize, cfg: &EtaConfig, rng: &mut impl Rng) -> Result<(Vec<PauliOperator>, bool)> {
    if 3 * n <= cfg.exhaustive_max_qubits {
        return Ok((enumerate_paulis(3 * n)?, true));
    }
    let mut ps: Vec<PauliOperator> = cfg.t.iter().filter_map(|&t| extremal_pauli(n, t).ok()).collect();
    while ps.len() < cfg.sampled_paulis {
        ps.push(random_pauli_uniform_weight(3 * n, rng)?);
    }
    Ok((ps, false))
}

pub fn eta_suite(cfg: &EtaConfig, root: u64) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for &n in &cfg.n {
        let name = format!("eta.n{n}");
        let seed = derive_seed(root, &name);
        let start = Instant::now();
        let (paulis, exhaustive) = eta_paulis(n, cfg, &mut job_rng(seed, "paulis"))?;
        let brute: Vec<Vec<u64>> = paulis
            .iter()
            .map(|p| eta_bruteforce_multi(n, &cfg.t, p))
            .collect::<Result<_>>()?;
        let shared = start.elapsed().as_secs_f64();
        for (ti, &t) in cfg.t.iter().enumerate() {
            let bound = eta_bound(n, t)?;
            let mut mismatches = 0usize;
            let mut over_bound = 0usize;
            let mut single_term = 0usize;
            let mut single_term_product_matches = 0usize;
            let mut max_eta = 0u64;
            for (p, b) in paulis.iter().zip(&brute) {
                let eta = b[ti];
                max_eta = max_eta.max(eta);
                if eta_from_compositions(n, t, p)? != eta as u128 {
                    mismatches += 1;
                }
                if eta as u128 > bound {
                    over_bound += 1;
                }
                let comps = Composition::enumerate(LetterCounts::of(p), n, t);
                if comps.len() == 1 {
                    single_term += 1;
                    if eta_product(n, t, &comps[0])? == eta as u128 {
                        single_term_product_matches += 1;
                    }
                }
            }
            let params = |r: VerificationReport| {
                let r = r
                    .param("n", n)
                    .param("t", t)
                    .param("paulis", paulis.len())
                    .param("mode", if exhaustive { "exhaustive" } else { "sampled" });
                if exhaustive {
                    r
                } else {
                    r.seeded(seed)
                }
            };
            let mut r = params(VerificationReport::exact(
                format!("eta.compositions.n{n}.t{t}"),
                mismatches as f64,
                0.0,
                0.0,
            ))
            .detail("single_composition_paulis", single_term)
            .detail("single_composition_product_matches", single_term_product_matches)
            .detail("max_eta", max_eta);
            r.runtime_secs = shared;
            out.push(r);
            out.push(
                params(VerificationReport::exact(
                    format!("eta.bound.n{n}.t{t}"),
                    over_bound as f64,
                    0.0,
                    0.0,
                ))
                .detail("bound", bound.to_string())
                .detail("max_eta", max_eta),
            );
            if let Ok(e) = extremal_pauli(n, t) {
                let eta = eta_bruteforce_multi(n, &[t], &e)?[0];
                out.push(
                    VerificationReport::exact(format!("eta.equality.n{n}.t{t}"), eta as f64, bound as f64, 0.0)
                        .param("n", n)
                        .param("t", t)
                        .param("pauli", e),
                );
            }
        }
        let ratio_name = format!("eta.ratio.n{n}");
        let start = Instant::now();
        let best = max_eta_ratio_bruteforce(n, &cfg.t)?;
        let runtime = start.elapsed().as_secs_f64();
        for (&t, (ratio, p)) in cfg.t.iter().zip(best) {
            let mut r = VerificationReport::bound(
                format!("{ratio_name}.t{t}"),
                ratio,
                (1.0f64 / 3.0).powi(t as i32 + 1),
                1e-12,
                None,
            )
            .param("n", n)
            .param("t", t)
            .detail("maximizer", p);
            r.runtime_secs = runtime;
            out.push(r);
        }
    }
    out.push(timed(|| {
        let check = bound_chain_check(cfg.chain_max_n);
        let failures = check.failures.len() as f64;
        Ok(VerificationReport::exact("eta.chain", failures, 0.0, 0.0)
            .param("n_max", cfg.chain_max_n)
            .detail("cases", check.cases)
            .detail("max_normalized_ratio", check.max_normalized_ratio)
            .detail("failures", check.failures))
    })?);
    Ok(out)
}
