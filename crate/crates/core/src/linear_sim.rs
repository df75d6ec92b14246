//! Dense density-matrix engine over labelled qubit registers.
//!
//! Matrices are `nalgebra` complex matrices. Basis index bit `q` is qubit
//! `q`; a [`SubsystemLayout`] assigns consecutive qubits to labels in order,
//! so the first label occupies the least-significant bits.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{QauthError, Result};
use crate::pauli::PauliOperator;

pub type CMatrix = DMatrix<Complex64>;

/// Largest entry modulus of a complex matrix.
pub trait MaxAbs {
    fn max_abs(&self) -> f64;
}

impl MaxAbs for CMatrix {
    fn max_abs(&self) -> f64 {
        self.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// Default cap on the total qubit count of a layout.
pub const DEFAULT_QUBIT_CAP: usize = 14;
/// Tolerance used when validating constructed states and operators.
pub const CONSTRUCTION_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Ordered `(label, qubit count)` registers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsystemLayout {
    systems: Vec<(String, usize)>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(systems: Vec<(S, usize)>) -> Result<Self> {
        Self::with_cap(systems, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap<S: Into<String>>(systems: Vec<(S, usize)>, cap: usize) -> Result<Self> {
        let systems: Vec<(String, usize)> = systems.into_iter().map(|(l, n)| (l.into(), n)).collect();
        for (i, (label, _)) in systems.iter().enumerate() {
            if systems[..i].iter().any(|(l, _)| l == label) {
                return Err(QauthError::InvalidLayout(format!("duplicate label {label:?}")));
            }
        }
        let total: usize = systems.iter().map(|(_, n)| n).sum();
        if total > cap {
            return Err(QauthError::LimitExceeded {
                what: "layout qubits",
                value: total,
                limit: cap,
            });
        }
        Ok(Self { systems })
    }

    pub fn single(label: &str, qubits: usize) -> Result<Self> {
        Self::new(vec![(label, qubits)])
    }

    pub fn systems(&self) -> &[(String, usize)] {
        &self.systems
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.systems.iter().map(|(l, _)| l.as_str())
    }

    pub fn total_qubits(&self) -> usize {
        self.systems.iter().map(|(_, n)| n).sum()
    }

    pub fn dim(&self) -> usize {
        1 << self.total_qubits()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.systems.iter().any(|(l, _)| l == label)
    }

    /// Absolute qubit indices of `label`.
    pub fn qubits(&self, label: &str) -> Result<std::ops::Range<usize>> {
        let mut offset = 0;
        for (l, n) in &self.systems {
            if l == label {
                return Ok(offset..offset + n);
            }
            offset += n;
        }
        Err(QauthError::UnknownLabel(label.to_string()))
    }

    pub fn size_of(&self, label: &str) -> Result<usize> {
        Ok(self.qubits(label)?.len())
    }

    /// Qubits of several labels, concatenated in the order given.
    pub fn qubits_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for l in labels {
            out.extend(self.qubits(l)?);
        }
        Ok(out)
    }

    /// `self` followed by `other` (other in the higher qubits).
    pub fn concat(&self, other: &SubsystemLayout) -> Result<Self> {
        let mut systems = self.systems.clone();
        systems.extend(other.systems.iter().cloned());
        Self::new(systems)
    }

    fn restricted(&self, keep: &[&str]) -> Self {
        Self {
            systems: self
                .systems
                .iter()
                .filter(|(l, _)| keep.contains(&l.as_str()))
                .cloned()
                .collect(),
        }
    }
}

/// Hermitian positive semidefinite operator on a [`SubsystemLayout`]; the
/// trace may be below one for measurement branches.
#[derive(Clone, Debug)]
pub struct DensityState {
    layout: SubsystemLayout,
    matrix: CMatrix,
    trace_weight: f64,
}

impl DensityState {
    /// Validates Hermiticity, positivity and dimension.
    pub fn new(layout: SubsystemLayout, matrix: CMatrix) -> Result<Self> {
        let s = Self::from_parts(layout, matrix)?;
        let herm = (&s.matrix - s.matrix.adjoint()).max_abs();
        if herm > CONSTRUCTION_TOL {
            return Err(QauthError::InvalidState(format!("not Hermitian (residual {herm:e})")));
        }
        let min_eig = SymmetricEigen::new(s.matrix.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -CONSTRUCTION_TOL {
            return Err(QauthError::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        if s.trace_weight > 1.0 + CONSTRUCTION_TOL {
            return Err(QauthError::InvalidState(format!(
                "trace {} exceeds one",
                s.trace_weight
            )));
        }
        Ok(s)
    }

    /// Dimension check only; for results of trusted maps.
    pub(crate) fn from_parts(layout: SubsystemLayout, matrix: CMatrix) -> Result<Self> {
        let dim = layout.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(QauthError::SizeMismatch {
                expected: dim,
                actual: matrix.nrows(),
            });
        }
        let trace_weight = matrix.trace().re;
        Ok(Self {
            layout,
            matrix,
            trace_weight,
        })
    }

    pub fn from_pure(layout: SubsystemLayout, amplitudes: &[Complex64]) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(QauthError::SizeMismatch {
                expected: layout.dim(),
                actual: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(QauthError::InvalidState(format!("state vector norm {norm}")));
        }
        let v = nalgebra::DVector::from_column_slice(amplitudes);
        Self::from_parts(layout, &v * v.adjoint())
    }

    /// Haar-random pure state (normalised complex Gaussian vector).
    pub fn random_pure<R: rand::Rng + ?Sized>(layout: SubsystemLayout, rng: &mut R) -> Result<Self> {
        let v = random_unit_vector(layout.dim(), rng);
        Self::from_pure(layout, &v)
    }

    /// `|index⟩⟨index|`.
    pub fn basis(layout: SubsystemLayout, index: usize) -> Result<Self> {
        let dim = layout.dim();
        if index >= dim {
            return Err(QauthError::SizeMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = ONE;
        Self::from_parts(layout, m)
    }

    /// `|+⟩⟨+|` on every qubit.
    pub fn plus(layout: SubsystemLayout) -> Result<Self> {
        let dim = layout.dim();
        let m = CMatrix::from_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0));
        Self::from_parts(layout, m)
    }

    pub fn maximally_mixed(layout: SubsystemLayout) -> Result<Self> {
        let dim = layout.dim();
        let m = CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Self::from_parts(layout, m)
    }

    /// Maximally entangled state between `a` and `b` (equal sizes, only
    /// labels of the layout), pairing qubit `i` of `a` with qubit `i` of `b`.
    pub fn maximally_entangled(layout: SubsystemLayout, a: &str, b: &str) -> Result<Self> {
        let qa = layout.qubits(a)?;
        let qb = layout.qubits(b)?;
        if qa.len() != qb.len() || qa.len() + qb.len() != layout.total_qubits() {
            return Err(QauthError::InvalidLayout(format!(
                "cannot maximally entangle {a}:{} with {b}:{}",
                qa.len(),
                qb.len()
            )));
        }
        let k = qa.len();
        let mut v = vec![ZERO; layout.dim()];
        let amp = Complex64::new(1.0 / ((1usize << k) as f64).sqrt(), 0.0);
        for j in 0..(1usize << k) {
            v[(j << qa.start) | (j << qb.start)] = amp;
        }
        Self::from_pure(layout, &v)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace_weight(&self) -> f64 {
        self.trace_weight
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `self ⊗ other`, `self` in the low qubits.
    pub fn tensor(&self, other: &DensityState) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Self::from_parts(layout, other.matrix.kronecker(&self.matrix))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix: &self.matrix * Complex64::new(factor, 0.0),
            trace_weight: self.trace_weight * factor,
        }
    }

    /// Same matrix under a relabelled layout of equal shape.
    pub fn relabel(&self, layout: SubsystemLayout) -> Result<Self> {
        let same_shape = layout.systems.len() == self.layout.systems.len()
            && layout
                .systems
                .iter()
                .zip(&self.layout.systems)
                .all(|((_, a), (_, b))| a == b);
        if !same_shape {
            return Err(QauthError::InvalidLayout("relabel changes register sizes".into()));
        }
        Self::from_parts(layout, self.matrix.clone())
    }

    /// Same matrix under any layout with the same total qubit count, for
    /// merging or splitting consecutive registers.
    pub fn merged(&self, layout: SubsystemLayout) -> Result<Self> {
        if layout.total_qubits() != self.layout.total_qubits() {
            return Err(QauthError::InvalidLayout(
                "merged layout changes the qubit count".into(),
            ));
        }
        Self::from_parts(layout, self.matrix.clone())
    }

    /// Smallest eigenvalue (for invariant checks).
    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Accept and reject branches of a flagged decoder output, both on the same
/// layout; their weights sum to the input trace.
#[derive(Clone, Debug)]
pub struct FlaggedOutput {
    pub acc: DensityState,
    pub rej: DensityState,
}

impl FlaggedOutput {
    pub fn total_weight(&self) -> f64 {
        self.acc.trace_weight() + self.rej.trace_weight()
    }

    pub fn acc_weight(&self) -> f64 {
        self.acc.trace_weight()
    }

    pub fn rej_weight(&self) -> f64 {
        self.rej.trace_weight()
    }

    /// Trace distance of the flag-extended states; flags are orthogonal so
    /// the branches contribute additively.
    pub fn distance(&self, other: &FlaggedOutput) -> Result<f64> {
        Ok(trace_distance(&self.acc, &other.acc)? + trace_distance(&self.rej, &other.rej)?)
    }
}

/// `Σ|λ_i|` of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(herm).eigenvalues.iter().map(|l| l.abs()).sum()
}

/// `½‖a − b‖₁`.
pub fn trace_distance(a: &DensityState, b: &DensityState) -> Result<f64> {
    if a.layout != b.layout {
        return Err(QauthError::InvalidLayout(
            "trace distance between different layouts".into(),
        ));
    }
    Ok(0.5 * trace_norm(&(&a.matrix - &b.matrix)))
}

/// Scatters the bits of `local` onto the absolute positions `qubits`.
#[inline]
pub(crate) fn scatter_bits(local: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &q)| acc | (((local >> j) & 1) << q))
}

/// Left-multiplies `mat` by `op` acting on `qubits` (local qubit `j` of `op`
/// is absolute qubit `qubits[j]`), identity elsewhere.
pub fn apply_left(mat: &CMatrix, op: &CMatrix, qubits: &[usize]) -> Result<CMatrix> {
    let k = qubits.len();
    let sub = 1usize << k;
    if op.nrows() != sub || op.ncols() != sub {
        return Err(QauthError::SizeMismatch {
            expected: sub,
            actual: op.nrows(),
        });
    }
    let dim = mat.nrows();
    let total = dim.trailing_zeros() as usize;
    if !dim.is_power_of_two() || qubits.iter().any(|&q| q >= total) {
        return Err(QauthError::SizeMismatch {
            expected: dim,
            actual: 1 << (qubits.iter().max().copied().unwrap_or(0) + 1),
        });
    }
    let target_mask = qubits.iter().fold(0usize, |m, &q| m | (1 << q));
    if target_mask.count_ones() as usize != k {
        return Err(QauthError::InvalidLayout("repeated target qubit".into()));
    }
    let offsets: Vec<usize> = (0..sub).map(|a| scatter_bits(a, qubits)).collect();
    let mut out = CMatrix::zeros(dim, mat.ncols());
    let mut buf = vec![ZERO; sub];
    for base in (0..dim).filter(|b| b & target_mask == 0) {
        for col in 0..mat.ncols() {
            for (a, off) in offsets.iter().enumerate() {
                buf[a] = mat[(base | off, col)];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (c, v) in buf.iter().enumerate() {
                    acc += op[(r, c)] * v;
                }
                out[(base | off, col)] = acc;
            }
        }
    }
    Ok(out)
}

/// `op ρ op†` with `op` acting on `qubits`.
pub fn conjugate_on(rho: &CMatrix, op: &CMatrix, qubits: &[usize]) -> Result<CMatrix> {
    let left = apply_left(rho, op, qubits)?;
    Ok(apply_left(&left.adjoint(), op, qubits)?.adjoint())
}

/// `op` on `qubits` tensored with identity, as a full `2^total` matrix.
pub fn embed_operator(op: &CMatrix, qubits: &[usize], total: usize) -> Result<CMatrix> {
    let dim = 1usize << total;
    apply_left(&CMatrix::identity(dim, dim), op, qubits)
}

fn check_unitary(u: &CMatrix) -> Result<()> {
    let dim = u.nrows();
    let residual = (u.adjoint() * u - CMatrix::identity(dim, dim)).max_abs();
    if residual > CONSTRUCTION_TOL || u.ncols() != dim {
        return Err(QauthError::NotUnitary(residual));
    }
    Ok(())
}

/// `U ρ U†` with `U` acting on the concatenation of `targets`.
pub fn apply_unitary(s: &DensityState, u: &CMatrix, targets: &[&str]) -> Result<DensityState> {
    let qubits = s.layout.qubits_of(targets)?;
    if u.nrows() != 1 << qubits.len() {
        return Err(QauthError::SizeMismatch {
            expected: 1 << qubits.len(),
            actual: u.nrows(),
        });
    }
    check_unitary(u)?;
    DensityState::from_parts(s.layout.clone(), conjugate_on(&s.matrix, u, &qubits)?)
}

/// `𝒫 ρ 𝒫` for a Hermitian projector `𝒫` on `targets`.
pub fn project(s: &DensityState, projector: &CMatrix, targets: &[&str]) -> Result<DensityState> {
    let qubits = s.layout.qubits_of(targets)?;
    if projector.nrows() != 1 << qubits.len() || projector.ncols() != projector.nrows() {
        return Err(QauthError::SizeMismatch {
            expected: 1 << qubits.len(),
            actual: projector.nrows(),
        });
    }
    let idem = (projector * projector - projector).max_abs();
    let herm = (projector - projector.adjoint()).max_abs();
    if idem.max(herm) > CONSTRUCTION_TOL {
        return Err(QauthError::NotProjector(idem.max(herm)));
    }
    DensityState::from_parts(s.layout.clone(), conjugate_on(&s.matrix, projector, &qubits)?)
}

/// Reduced state on `keep` (kept labels stay in layout order).
pub fn partial_trace(s: &DensityState, keep: &[&str]) -> Result<DensityState> {
    for l in keep {
        if !s.layout.contains(l) {
            return Err(QauthError::UnknownLabel(l.to_string()));
        }
    }
    let layout = s.layout.restricted(keep);
    let mut kept = Vec::new();
    let mut traced = Vec::new();
    for (label, _) in &s.layout.systems {
        let qs = s.layout.qubits(label)?;
        if keep.contains(&label.as_str()) {
            kept.extend(qs);
        } else {
            traced.extend(qs);
        }
    }
    let out = partial_trace_qubits(&s.matrix, &kept, &traced);
    DensityState::from_parts(layout, out)
}

pub(crate) fn partial_trace_qubits(m: &CMatrix, kept: &[usize], traced: &[usize]) -> CMatrix {
    let kdim = 1usize << kept.len();
    let tdim = 1usize << traced.len();
    let kept_idx: Vec<usize> = (0..kdim).map(|i| scatter_bits(i, kept)).collect();
    let traced_idx: Vec<usize> = (0..tdim).map(|i| scatter_bits(i, traced)).collect();
    CMatrix::from_fn(kdim, kdim, |i, j| {
        traced_idx.iter().map(|t| m[(kept_idx[i] | t, kept_idx[j] | t)]).sum()
    })
}

/// `|Φ⁺⟩^{⊗m}` as a vector on `[C1:m, C2:m]`.
pub fn epr_vector(m: usize) -> Vec<Complex64> {
    let dim = 1usize << (2 * m);
    let mut v = vec![ZERO; dim];
    let amp = Complex64::new(1.0 / ((1usize << m) as f64).sqrt(), 0.0);
    for j in 0..(1usize << m) {
        v[j | (j << m)] = amp;
    }
    v
}

/// `(|Φ⁺⟩⟨Φ⁺|)^{⊗m}` on `[C1:m, C2:m]`, qubit `i` of C1 paired with qubit `i` of C2.
pub fn epr_state(m: usize) -> Result<DensityState> {
    let layout = SubsystemLayout::new(vec![("C1", m), ("C2", m)])?;
    DensityState::from_pure(layout, &epr_vector(m))
}

/// `Σ_{P ∈ allowed} (P ⊗ I)|Φ⁺⟩⟨Φ⁺|^{⊗m}(P ⊗ I)†` on `[C1:m, C2:m]`.
pub fn bell_subspace_projector(m: usize, allowed: &[PauliOperator]) -> Result<CMatrix> {
    if 2 * m > DEFAULT_QUBIT_CAP {
        return Err(QauthError::LimitExceeded {
            what: "Bell projector qubits",
            value: 2 * m,
            limit: DEFAULT_QUBIT_CAP,
        });
    }
    let mut seen = std::collections::HashSet::new();
    for p in allowed {
        if p.n() != m {
            return Err(QauthError::SizeMismatch {
                expected: m,
                actual: p.n(),
            });
        }
        if !seen.insert((p.x_mask(), p.z_mask())) {
            return Err(QauthError::DuplicatePauli(p.to_string()));
        }
    }
    let dim = 1usize << (2 * m);
    let base = epr_vector(m);
    let mut proj = CMatrix::zeros(dim, dim);
    let mut v = vec![ZERO; dim];
    for p in allowed {
        // P acts on the low m qubits of each basis index.
        let low = (1usize << m) - 1;
        v.iter_mut().for_each(|a| *a = ZERO);
        for (b, amp) in base.iter().enumerate() {
            if *amp == ZERO {
                continue;
            }
            let (row, c) = p.column_action(b & low);
            v[(b & !low) | row] += c * amp;
        }
        let nz: Vec<usize> = (0..dim).filter(|&i| v[i] != ZERO).collect();
        for &i in &nz {
            for &j in &nz {
                proj[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    Ok(proj)
}

/// Uniformly random unit vector in `C^dim`.
pub fn random_unit_vector<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    use rand_distr::{Distribution, StandardNormal};
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

/// Hermitian part, to remove rounding asymmetry from composed maps.
pub(crate) fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}
