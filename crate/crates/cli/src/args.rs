use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qauth_core::{AttackSpec, EcCodeKind};

#[derive(Debug, Parser)]
#[command(
    name = "qauth",
    version,
    about = "Runs the authentication-code verification suites and writes reports"
)]
pub struct Cli {
    /// TOML configuration file; flags override its fields.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Root seed; every check derives its own seed from it.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Output directory for report.json, metadata.json and summary.csv.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, env = "QAUTH_JOBS", value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pauli twirl, Clifford twirl and Clifford randomization.
    Lemmas(LemmaArgs),
    /// Decoding an honest encoding returns the message on both codes.
    Correctness(CorrectnessArgs),
    /// Distance between the real and the simulated channel.
    Security {
        #[command(subcommand)]
        code: SecurityCommand,
    },
    /// Permutation counts of the trap code.
    Eta(EtaArgs),
    /// Every suite.
    All,
}

#[derive(Debug, Subcommand)]
pub enum SecurityCommand {
    Clifford(CliffordArgs),
    Trap(TrapArgs),
}

#[derive(Debug, Default, Args)]
pub struct LemmaArgs {
    /// Largest n for the Pauli twirl.
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Random density matrices per check.
    #[arg(long)]
    pub inputs: Option<usize>,
}

#[derive(Debug, Default, Args)]
pub struct CorrectnessArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    /// Message qubits of the Clifford code.
    #[arg(long)]
    pub n: Option<usize>,
    /// Trap qubits of the Clifford code.
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Default, Args)]
pub struct CliffordArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Reference qubits held by the adversary.
    #[arg(long)]
    pub r_qubits: Option<usize>,
    /// Haar-random attacks.
    #[arg(long)]
    pub attacks: Option<usize>,
    /// Key samples per attack.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random pure inputs added to the battery.
    #[arg(long)]
    pub inputs: Option<usize>,
    /// Skip the exhaustive Pauli attacks.
    #[arg(long)]
    pub no_pauli_attacks: bool,
    /// Trap counts for the monotonicity check, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub monotonic_d: Option<Vec<usize>>,
    /// Extra attack: identity, pauli:<literal>, haar:<seed> or a matrix file. Repeatable.
    #[arg(long = "attack", value_name = "SPEC")]
    pub extra_attacks: Vec<AttackSpec>,
}

#[derive(Debug, Default, Args)]
pub struct TrapArgs {
    #[arg(long)]
    pub r_qubits: Option<usize>,
    /// Random Pauli attacks in symbolic mode.
    #[arg(long)]
    pub attacks: Option<usize>,
    /// Sampled permutations per symbolic attack.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Haar-random attacks on the dense n = 1 code.
    #[arg(long)]
    pub haar: Option<usize>,
    #[arg(long)]
    pub inputs: Option<usize>,
    /// Inner code for symbolic mode: trivial or five_qubit.
    #[arg(long)]
    pub ec: Option<EcCodeKind>,
    /// Extra attack on the dense code. Repeatable.
    #[arg(long = "attack", value_name = "SPEC")]
    pub extra_attacks: Vec<AttackSpec>,
}

#[derive(Debug, Default, Args)]
pub struct EtaArgs {
    /// Message sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Correctable error counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<usize>>,
    /// Random Paulis per size when enumeration is too large.
    #[arg(long)]
    pub sampled: Option<usize>,
    #[arg(long)]
    pub exhaustive_max_qubits: Option<usize>,
    #[arg(long)]
    pub chain_max_n: Option<usize>,
}
