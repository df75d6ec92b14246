//! Experiment configuration: an optional TOML file overlaid by flags.

use std::fs;
use std::path::{Path, PathBuf};

use qauth_core::verification::suites::{
    CliffordSecurityConfig, CorrectnessConfig, EtaConfig, LemmaConfig, TrapSecurityConfig,
};
use qauth_core::{Suite, SuiteConfig};
use serde::Deserialize;

use crate::args::{Cli, Command, SecurityCommand};

pub const DEFAULT_OUT: &str = "qauth-out";

/// Seed used by suites that only draw random test inputs.
pub const DEFAULT_INPUT_SEED: u64 = 0;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub lemmas: LemmaConfig,
    pub correctness: CorrectnessConfig,
    pub clifford: CliffordSecurityConfig,
    pub trap: TrapSecurityConfig,
    pub eta: EtaConfig,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string().trim_end().to_string())
    }
}

#[derive(Debug)]
pub struct Experiment {
    pub command: String,
    pub suites: Vec<Suite>,
    pub config: SuiteConfig,
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: usize,
}

impl Experiment {
    pub fn from_cli(cli: Cli) -> Result<Self, String> {
        let file = match &cli.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let mut config = SuiteConfig {
            lemmas: file.lemmas,
            correctness: file.correctness,
            clifford: file.clifford,
            trap: file.trap,
            eta: file.eta,
        };
        let (command, suites) = match cli.command {
            Command::Lemmas(a) => {
                let c = &mut config.lemmas;
                set(&mut c.pauli_max_n, a.max_n);
                set(&mut c.random_inputs, a.inputs);
                ("lemmas", vec![Suite::Lemmas])
            }
            Command::Correctness(a) => {
                let c = &mut config.correctness;
                set(&mut c.trials, a.trials);
                set(&mut c.n, a.n);
                set(&mut c.d, a.d);
                ("correctness", vec![Suite::Correctness])
            }
            Command::Security {
                code: SecurityCommand::Clifford(a),
            } => {
                let c = &mut config.clifford;
                set(&mut c.n, a.n);
                set(&mut c.d, a.d);
                set(&mut c.r_qubits, a.r_qubits);
                set(&mut c.haar_attacks, a.attacks);
                set(&mut c.key_samples, a.samples);
                set(&mut c.random_inputs, a.inputs);
                set(&mut c.monotonic_d, a.monotonic_d);
                if a.no_pauli_attacks {
                    c.pauli_attacks = false;
                }
                c.extra_attacks.extend(a.extra_attacks);
                ("security clifford", vec![Suite::SecurityClifford])
            }
            Command::Security {
                code: SecurityCommand::Trap(a),
            } => {
                let c = &mut config.trap;
                set(&mut c.r_qubits, a.r_qubits);
                set(&mut c.symbolic_attacks, a.attacks);
                set(&mut c.symbolic_samples, a.samples);
                set(&mut c.haar_attacks, a.haar);
                set(&mut c.random_inputs, a.inputs);
                set(&mut c.symbolic_code, a.ec);
                c.extra_attacks.extend(a.extra_attacks);
                ("security trap", vec![Suite::SecurityTrap])
            }
            Command::Eta(a) => {
                let c = &mut config.eta;
                set(&mut c.n, a.n);
                set(&mut c.t, a.t);
                set(&mut c.sampled_paulis, a.sampled);
                set(&mut c.exhaustive_max_qubits, a.exhaustive_max_qubits);
                set(&mut c.chain_max_n, a.chain_max_n);
                ("eta", vec![Suite::Eta])
            }
            Command::All => ("all", Suite::ALL.to_vec()),
        };
        config.validate().map_err(|e| e.to_string())?;

        let seed = match cli.seed.or(file.seed) {
            Some(seed) => seed,
            None => match suites.iter().find(|s| samples_keys(**s, &config)) {
                Some(s) => return Err(format!("suite {s} samples keys or Paulis and needs --seed or `seed`")),
                None => DEFAULT_INPUT_SEED,
            },
        };
        let jobs = cli.jobs.or(file.jobs).unwrap_or(1);
        if jobs == 0 {
            return Err("jobs must be at least 1".into());
        }
        Ok(Self {
            command: command.to_string(),
            suites,
            config,
            seed,
            out: cli.out.or(file.out).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            jobs,
        })
    }
}

fn set<T>(field: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *field = v;
    }
}

/// Whether a suite uses a sampled strategy, which makes the seed mandatory.
fn samples_keys(suite: Suite, config: &SuiteConfig) -> bool {
    match suite {
        Suite::Lemmas | Suite::Correctness => false,
        Suite::SecurityClifford | Suite::SecurityTrap => true,
        Suite::Eta => config.eta.n.iter().any(|&n| 3 * n > config.eta.exhaustive_max_qubits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = ConfigFile::parse("seed = 7\n[eta]\nn = [1,\n").unwrap_err();
        assert!(err.contains("line"), "{err}");
        let err = ConfigFile::parse("seed = 7\n\n[clifford]\nbogus = 1\n").unwrap_err();
        assert!(err.contains("line 4"), "{err}");
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn sections_fill_in_defaults() {
        let f = ConfigFile::parse("seed = 3\n[clifford]\nd = 3\nextra_attacks = [\"pauli:XIII\"]\n").unwrap();
        assert_eq!(f.seed, Some(3));
        assert_eq!(f.clifford.d, 3);
        assert_eq!(f.clifford.n, 1);
        assert_eq!(f.clifford.extra_attacks.len(), 1);
        assert_eq!(f.eta.chain_max_n, 50);
    }
}
