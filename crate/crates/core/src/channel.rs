//! Flagged channels on a message ⊗ reference input, stored as superoperators.
//!
//! Key averages and closed-form twirled channels are linear in the input, so
//! the verification suites build each channel once and evaluate it on a
//! whole battery of inputs. Vectorisation is row-major:
//! `vec(K ρ K†) = (K ⊗ K̄) vec(ρ)`.

use num_complex::Complex64;

use crate::error::{QauthError, Result};
use crate::linear_sim::{hermitize, CMatrix, DensityState, FlaggedOutput, SubsystemLayout};

/// Linear map from `in_dim × in_dim` to `out_dim × out_dim` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    in_dim: usize,
    out_dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn zero(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            matrix: CMatrix::zeros(out_dim * out_dim, in_dim * in_dim),
        }
    }

    pub fn from_kraus(in_dim: usize, out_dim: usize, kraus: &[CMatrix]) -> Result<Self> {
        let mut s = Self::zero(in_dim, out_dim);
        for k in kraus {
            s.add_kraus(k, 1.0)?;
        }
        Ok(s)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Adds `weight · K(·)K†`; `K` is `out_dim × in_dim`.
    pub fn add_kraus(&mut self, k: &CMatrix, weight: f64) -> Result<()> {
        if k.nrows() != self.out_dim || k.ncols() != self.in_dim {
            return Err(QauthError::SizeMismatch {
                expected: self.out_dim * self.in_dim,
                actual: k.nrows() * k.ncols(),
            });
        }
        let (o, n) = (self.out_dim, self.in_dim);
        for i in 0..o {
            for a in 0..n {
                let kia = k[(i, a)] * weight;
                if kia == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..o {
                    for b in 0..n {
                        self.matrix[(i * o + j, a * n + b)] += kia * k[(j, b)].conj();
                    }
                }
            }
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, other: &Superoperator, weight: f64) -> Result<()> {
        if other.in_dim != self.in_dim || other.out_dim != self.out_dim {
            return Err(QauthError::SizeMismatch {
                expected: self.in_dim,
                actual: other.in_dim,
            });
        }
        self.matrix += &other.matrix * Complex64::new(weight, 0.0);
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        self.matrix *= Complex64::new(factor, 0.0);
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.in_dim || rho.ncols() != self.in_dim {
            return Err(QauthError::SizeMismatch {
                expected: self.in_dim,
                actual: rho.nrows(),
            });
        }
        let n = self.in_dim;
        let v = nalgebra::DVector::from_fn(n * n, |idx, _| rho[(idx / n, idx % n)]);
        let w = &self.matrix * v;
        let o = self.out_dim;
        Ok(CMatrix::from_fn(o, o, |i, j| w[i * o + j]))
    }
}

/// The all-zeros pure state, the default reject replacement.
pub fn default_omega(message_qubits: usize) -> Result<DensityState> {
    DensityState::basis(SubsystemLayout::single("M", message_qubits)?, 0)
}

/// Flagged channel `ρ_MR ↦ acc(ρ) ⊗ |acc⟩⟨acc| + rej_R(ρ) ⊗ Ω_M ⊗ |rej⟩⟨rej|`.
///
/// The accept part maps `MR → MR`; the reject part maps `MR → R` and the
/// fixed replacement `Ω_M` is tensored in on application.
#[derive(Clone, Debug)]
pub struct FlaggedChannel {
    layout: SubsystemLayout,
    acc: Superoperator,
    rej: Superoperator,
    omega: DensityState,
}

impl FlaggedChannel {
    pub fn zero(message_qubits: usize, reference_qubits: usize, omega: DensityState) -> Result<Self> {
        let layout = SubsystemLayout::new(vec![("M", message_qubits), ("R", reference_qubits)])?;
        if omega.layout().total_qubits() != message_qubits {
            return Err(QauthError::SizeMismatch {
                expected: message_qubits,
                actual: omega.layout().total_qubits(),
            });
        }
        let omega = omega.relabel(SubsystemLayout::single("M", message_qubits)?)?;
        let dim = layout.dim();
        let r_dim = 1 << reference_qubits;
        Ok(Self {
            layout,
            acc: Superoperator::zero(dim, dim),
            rej: Superoperator::zero(dim, r_dim),
            omega,
        })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn message_qubits(&self) -> usize {
        self.omega.layout().total_qubits()
    }

    pub fn reference_qubits(&self) -> usize {
        self.layout.total_qubits() - self.message_qubits()
    }

    pub fn omega(&self) -> &DensityState {
        &self.omega
    }

    pub fn acc(&self) -> &Superoperator {
        &self.acc
    }

    pub fn rej(&self) -> &Superoperator {
        &self.rej
    }

    /// `K` maps MR to MR.
    pub fn add_acc_kraus(&mut self, k: &CMatrix, weight: f64) -> Result<()> {
        self.acc.add_kraus(k, weight)
    }

    /// `K` maps MR to R.
    pub fn add_rej_kraus(&mut self, k: &CMatrix, weight: f64) -> Result<()> {
        self.rej.add_kraus(k, weight)
    }

    pub fn add_scaled(&mut self, other: &FlaggedChannel, weight: f64) -> Result<()> {
        if other.layout != self.layout {
            return Err(QauthError::InvalidLayout("adding channels on different layouts".into()));
        }
        self.acc.add_scaled(&other.acc, weight)?;
        self.rej.add_scaled(&other.rej, weight)
    }

    pub fn scale(&mut self, factor: f64) {
        self.acc.scale(factor);
        self.rej.scale(factor);
    }

    pub fn apply(&self, rho: &DensityState) -> Result<FlaggedOutput> {
        if rho.layout() != &self.layout {
            return Err(QauthError::InvalidLayout(format!(
                "channel expects {:?}, got {:?}",
                self.layout.systems(),
                rho.layout().systems()
            )));
        }
        let acc = hermitize(self.acc.apply(rho.matrix())?);
        let rej_r = hermitize(self.rej.apply(rho.matrix())?);
        let rej = rej_r.kronecker(self.omega.matrix());
        Ok(FlaggedOutput {
            acc: DensityState::from_parts(self.layout.clone(), acc)?,
            rej: DensityState::from_parts(self.layout.clone(), rej)?,
        })
    }

    /// Largest flagged trace distance between the two channels over `inputs`.
    pub fn max_distance(&self, other: &FlaggedChannel, inputs: &[DensityState]) -> Result<f64> {
        inputs.iter().try_fold(0.0f64, |best, rho| {
            Ok(best.max(self.apply(rho)?.distance(&other.apply(rho)?)?))
        })
    }
}

/// `K ⊗ I` on an `M`-low layout: `p_m` on the message, `a` on the reference.
pub fn message_reference_kraus(p_m: &CMatrix, a: &CMatrix) -> CMatrix {
    a.kronecker(p_m)
}

/// `⟨m|_M ⊗ a`, mapping `MR` to `R`.
pub fn reject_kraus(a: &CMatrix, m: usize, message_qubits: usize) -> CMatrix {
    let mut row = CMatrix::zeros(1, 1 << message_qubits);
    row[(0, m)] = Complex64::new(1.0, 0.0);
    a.kronecker(&row)
}

/// Shared decoder skeleton. The first `c_qubits` of `rho` form the codeword;
/// `unkey` is applied to them, the accepted branch is
/// `Σ_K (K ⊗ I) ρ' (K ⊗ I)†` with each `K` mapping the codeword to the
/// message, and the rejected branch traces the codeword over the basis
/// indices selected by `reject` and appends `Ω_M`.
pub(crate) fn flagged_decode(
    rho: &DensityState,
    c_qubits: usize,
    unkey: &CMatrix,
    acc_kraus: &[CMatrix],
    reject: impl Fn(usize) -> bool,
    omega: &DensityState,
) -> Result<FlaggedOutput> {
    let systems = rho.layout().systems();
    match systems.first() {
        Some((_, q)) if *q == c_qubits => {}
        _ => {
            return Err(QauthError::InvalidLayout(format!(
                "expected a leading {c_qubits}-qubit codeword register, got {systems:?}"
            )))
        }
    }
    let m_qubits = omega.layout().total_qubits();
    let mut out_systems = vec![("M".to_string(), m_qubits)];
    out_systems.extend(systems[1..].iter().cloned());
    let out_layout = SubsystemLayout::new(out_systems)?;

    let qubits: Vec<usize> = (0..c_qubits).collect();
    let rho_p = crate::linear_sim::conjugate_on(rho.matrix(), unkey, &qubits)?;
    let c_dim = 1usize << c_qubits;
    let rest = rho.layout().dim() / c_dim;
    let id_rest = CMatrix::identity(rest, rest);

    let m_dim = 1usize << m_qubits;
    let mut acc = CMatrix::zeros(m_dim * rest, m_dim * rest);
    for k in acc_kraus {
        if k.nrows() != m_dim || k.ncols() != c_dim {
            return Err(QauthError::SizeMismatch {
                expected: m_dim,
                actual: k.nrows(),
            });
        }
        let full = id_rest.kronecker(k);
        acc += &full * &rho_p * full.adjoint();
    }
    let rejected: Vec<usize> = (0..c_dim).filter(|&c| reject(c)).collect();
    let x = CMatrix::from_fn(rest, rest, |a, b| {
        rejected.iter().map(|c| rho_p[(c + c_dim * a, c + c_dim * b)]).sum()
    });
    let rej = x.kronecker(omega.matrix());
    Ok(FlaggedOutput {
        acc: DensityState::from_parts(out_layout.clone(), hermitize(acc))?,
        rej: DensityState::from_parts(out_layout, hermitize(rej))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_sim::MaxAbs;
    use crate::pauli::PauliOperator;

    #[test]
    fn kraus_superoperator_matches_direct_conjugation() {
        let k = "XZ".parse::<PauliOperator>().unwrap().to_matrix().unwrap() * Complex64::new(0.5, 0.25);
        let s = Superoperator::from_kraus(4, 4, std::slice::from_ref(&k)).unwrap();
        let rho = CMatrix::from_fn(4, 4, |i, j| Complex64::new((i + 2 * j) as f64, i as f64 - j as f64));
        let direct = &k * &rho * k.adjoint();
        assert!((s.apply(&rho).unwrap() - direct).max_abs() < 1e-12);
    }

    #[test]
    fn rectangular_kraus() {
        let k = CMatrix::from_fn(2, 4, |i, j| Complex64::new((i * 4 + j) as f64, 1.0));
        let s = Superoperator::from_kraus(4, 2, std::slice::from_ref(&k)).unwrap();
        let rho = CMatrix::identity(4, 4);
        assert!((s.apply(&rho).unwrap() - &k * k.adjoint()).max_abs() < 1e-12);
        assert!(Superoperator::from_kraus(2, 2, &[k]).is_err());
    }

    #[test]
    fn identity_channel_output() {
        let mut ch = FlaggedChannel::zero(1, 1, default_omega(1).unwrap()).unwrap();
        ch.add_acc_kraus(&CMatrix::identity(4, 4), 1.0).unwrap();
        let rho = DensityState::maximally_entangled(ch.layout().clone(), "M", "R").unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!((out.acc_weight() - 1.0).abs() < 1e-12);
        assert!(out.rej_weight().abs() < 1e-12);
        assert!((out.acc.matrix() - rho.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn reject_branch_carries_omega() {
        let mut ch = FlaggedChannel::zero(1, 1, default_omega(1).unwrap()).unwrap();
        for m in 0..2 {
            ch.add_rej_kraus(&reject_kraus(&CMatrix::identity(2, 2), m, 1), 1.0)
                .unwrap();
        }
        let rho = DensityState::maximally_entangled(ch.layout().clone(), "M", "R").unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!((out.rej_weight() - 1.0).abs() < 1e-12);
        // tr_M of the Bell state is I/2 on R, message reset to |0⟩.
        let expected = CMatrix::from_fn(4, 4, |i, j| {
            if i == j && i % 2 == 0 {
                Complex64::new(0.5, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert!((out.rej.matrix() - expected).max_abs() < 1e-12);
    }
}
