//! Simulation and verification toolkit for quantum message authentication
//! with the Clifford code and the trap code.

pub mod adversary;
pub mod channel;
pub mod clifford;
pub mod clifford_code;
pub mod error;
pub mod linear_sim;
pub mod pauli;
pub mod sampling;
pub mod seeds;
pub mod simulators;
pub mod trap_code;
pub mod verification;

pub use adversary::{AttackSpec, AttackUnitary, PauliDecomposition};
pub use channel::{FlaggedChannel, Superoperator};
pub use clifford::CliffordElement;
pub use clifford_code::CliffordCodeParams;
pub use error::{QauthError, Result};
pub use linear_sim::{CMatrix, DensityState, FlaggedOutput, SubsystemLayout};
pub use pauli::{PauliLetter, PauliOperator, Permutation, QubitPartition};
pub use sampling::KeyStrategy;
pub use trap_code::{EcCode, EcCodeKind, TrapCode, TrapKey};
pub use verification::suites::{run_suite, Suite, SuiteConfig};
pub use verification::VerificationReport;
