//! Attacks on the ciphertext and reference registers.
//!
//! An [`AttackUnitary`] acts on `C ⊗ R` with `C` in the low qubits. Its Pauli
//! decomposition `U = Σ_P P ⊗ A_P` carries an operator `A_P` on `R` per
//! phase-free Pauli `P` on `C`, with weight `w_P = tr(A_P† A_P) / dim R`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{QauthError, Result};
use crate::linear_sim::{CMatrix, MaxAbs, CONSTRUCTION_TOL, DEFAULT_QUBIT_CAP};
use crate::pauli::{enumerate_paulis, PauliOperator};

/// Largest `C` register [`decompose`] accepts.
pub const MAX_DECOMPOSE_QUBITS: usize = 6;

#[derive(Clone, Debug)]
pub struct AttackUnitary {
    matrix: CMatrix,
    n_c: usize,
    r_qubits: usize,
}

impl AttackUnitary {
    pub fn new(matrix: CMatrix, n_c: usize, r_qubits: usize) -> Result<Self> {
        let total = n_c + r_qubits;
        if total > DEFAULT_QUBIT_CAP {
            return Err(QauthError::LimitExceeded {
                what: "attack qubits",
                value: total,
                limit: DEFAULT_QUBIT_CAP,
            });
        }
        let dim = 1usize << total;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(QauthError::SizeMismatch {
                expected: dim,
                actual: matrix.nrows(),
            });
        }
        let residual = (matrix.adjoint() * &matrix - CMatrix::identity(dim, dim)).max_abs();
        if residual > CONSTRUCTION_TOL {
            return Err(QauthError::NotUnitary(residual));
        }
        Ok(Self { matrix, n_c, r_qubits })
    }

    pub fn identity(n_c: usize, r_qubits: usize) -> Result<Self> {
        let dim = 1usize << (n_c + r_qubits);
        Self::new(CMatrix::identity(dim, dim), n_c, r_qubits)
    }

    /// `P ⊗ I_R`.
    pub fn pauli(p: &PauliOperator, r_qubits: usize) -> Result<Self> {
        let r_dim = 1usize << r_qubits;
        Self::new(
            CMatrix::identity(r_dim, r_dim).kronecker(&p.to_matrix()?),
            p.n(),
            r_qubits,
        )
    }

    /// `P ⊗ I_R` for a uniformly random phase-free non-identity `P`.
    pub fn random_pauli<R: Rng + ?Sized>(n_c: usize, r_qubits: usize, rng: &mut R) -> Result<Self> {
        Self::pauli(&PauliOperator::random(n_c, true, rng)?, r_qubits)
    }

    /// Haar-random unitary on `C ⊗ R`.
    pub fn haar<R: Rng + ?Sized>(n_c: usize, r_qubits: usize, rng: &mut R) -> Result<Self> {
        Self::new(haar_unitary(1 << (n_c + r_qubits), rng), n_c, r_qubits)
    }

    pub fn haar_seeded(n_c: usize, r_qubits: usize, seed: u64) -> Result<Self> {
        Self::haar(n_c, r_qubits, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Reads the plain-text format: one row per line, whitespace-separated
    /// entries `a+bi`; blank lines and lines starting with `#` are skipped.
    pub fn from_text(text: &str, n_c: usize, r_qubits: usize) -> Result<Self> {
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    parse_complex(tok)
                        .ok_or_else(|| QauthError::Parse(format!("line {}: bad complex entry {tok:?}", lineno + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let dim = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(QauthError::Parse(format!(
                "row {} has {} entries, expected {dim}",
                i + 1,
                r.len()
            )));
        }
        let matrix = CMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
        Self::new(matrix, n_c, r_qubits)
    }

    pub fn from_file(path: &Path, n_c: usize, r_qubits: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| QauthError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_text(&text, n_c, r_qubits)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_c(&self) -> usize {
        self.n_c
    }

    pub fn r_qubits(&self) -> usize {
        self.r_qubits
    }

    pub fn r_dim(&self) -> usize {
        1 << self.r_qubits
    }

    /// `e^{iθ} U`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        Self {
            matrix: &self.matrix * Complex64::from_polar(1.0, theta),
            ..self.clone()
        }
    }

    /// `(V ⊗ I_R) U` for a unitary `V` on `C`.
    pub fn preceded_on_c_by(&self, v: &CMatrix) -> Result<Self> {
        let r = CMatrix::identity(self.r_dim(), self.r_dim());
        Self::new(r.kronecker(v) * &self.matrix, self.n_c, self.r_qubits)
    }

    /// `(V ⊗ I_R) U (V† ⊗ I_R)`.
    pub fn conjugated_on_c_by(&self, v: &CMatrix) -> Result<Self> {
        let full = CMatrix::identity(self.r_dim(), self.r_dim()).kronecker(v);
        Self::new(&full * &self.matrix * full.adjoint(), self.n_c, self.r_qubits)
    }
}

fn parse_complex(tok: &str) -> Option<Complex64> {
    let t = tok.trim();
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        // Split at the last sign that is not part of an exponent.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        return match split {
            Some(k) => {
                let re = body[..k].parse::<f64>().ok()?;
                let im_str = &body[k..];
                let im = match im_str {
                    "+" => 1.0,
                    "-" => -1.0,
                    s => s.parse::<f64>().ok()?,
                };
                Some(Complex64::new(re, im))
            }
            None => {
                let im = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    s => s.parse::<f64>().ok()?,
                };
                Some(Complex64::new(0.0, im))
            }
        };
    }
    t.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0))
}

/// Haar-random `dim × dim` unitary: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DVector::from_fn(dim, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    CMatrix::from_fn(dim, dim, |i, j| q[(i, j)] * phases[j])
}

/// `U = Σ_P P ⊗ A_P` over all phase-free `P` on `C`, in enumeration order.
#[derive(Clone, Debug)]
pub struct PauliDecomposition {
    n_c: usize,
    r_qubits: usize,
    paulis: Vec<PauliOperator>,
    components: Vec<CMatrix>,
    weights: Vec<f64>,
}

impl PauliDecomposition {
    /// Builds a decomposition from explicit components; weights are derived.
    pub fn from_components(n_c: usize, r_qubits: usize, components: Vec<(PauliOperator, CMatrix)>) -> Result<Self> {
        let r_dim = 1usize << r_qubits;
        let mut paulis = Vec::with_capacity(components.len());
        let mut mats = Vec::with_capacity(components.len());
        let mut weights = Vec::with_capacity(components.len());
        for (p, a) in components {
            if p.n() != n_c {
                return Err(QauthError::SizeMismatch {
                    expected: n_c,
                    actual: p.n(),
                });
            }
            if a.nrows() != r_dim || a.ncols() != r_dim {
                return Err(QauthError::SizeMismatch {
                    expected: r_dim,
                    actual: a.nrows(),
                });
            }
            let p = p.phase_free();
            if paulis.contains(&p) {
                return Err(QauthError::DuplicatePauli(p.to_string()));
            }
            weights.push(a.iter().map(|z| z.norm_sqr()).sum::<f64>() / r_dim as f64);
            paulis.push(p);
            mats.push(a);
        }
        Ok(Self {
            n_c,
            r_qubits,
            paulis,
            components: mats,
            weights,
        })
    }

    /// A single Pauli `P ⊗ I_R` without touching dense `C` matrices.
    pub fn single_pauli(p: &PauliOperator, r_qubits: usize) -> Result<Self> {
        let r_dim = 1usize << r_qubits;
        let phase = crate::pauli::I_POWERS[(p.phase_exp() & 3) as usize];
        Self::from_components(p.n(), r_qubits, vec![(*p, CMatrix::identity(r_dim, r_dim) * phase)])
    }

    pub fn n_c(&self) -> usize {
        self.n_c
    }

    pub fn r_qubits(&self) -> usize {
        self.r_qubits
    }

    pub fn len(&self) -> usize {
        self.paulis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paulis.is_empty()
    }

    /// `(P, A_P, w_P)` triples; Paulis absent from the list have `A_P = 0`.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliOperator, &CMatrix, f64)> {
        self.paulis
            .iter()
            .zip(&self.components)
            .zip(&self.weights)
            .map(|((p, a), w)| (p, a, *w))
    }

    pub fn component(&self, p: &PauliOperator) -> Option<&CMatrix> {
        let p = p.phase_free();
        self.paulis.iter().position(|q| *q == p).map(|i| &self.components[i])
    }

    pub fn weight(&self, p: &PauliOperator) -> f64 {
        let p = p.phase_free();
        self.paulis
            .iter()
            .position(|q| *q == p)
            .map_or(0.0, |i| self.weights[i])
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ_P P ⊗ A_P` as a dense matrix.
    pub fn reconstruct(&self) -> Result<CMatrix> {
        let dim = 1usize << (self.n_c + self.r_qubits);
        let mut u = CMatrix::zeros(dim, dim);
        for (p, a) in self.paulis.iter().zip(&self.components) {
            u += a.kronecker(&p.to_matrix()?);
        }
        Ok(u)
    }
}

/// `A_P = tr_C[(P† ⊗ I) U] / 2^{n_C}` for every phase-free `P`.
pub fn decompose(u: &AttackUnitary) -> Result<PauliDecomposition> {
    if u.n_c > MAX_DECOMPOSE_QUBITS {
        return Err(QauthError::LimitExceeded {
            what: "decomposition qubits",
            value: u.n_c,
            limit: MAX_DECOMPOSE_QUBITS,
        });
    }
    let c_dim = 1usize << u.n_c;
    let r_dim = u.r_dim();
    let norm = 1.0 / c_dim as f64;
    let m = &u.matrix;
    let components = enumerate_paulis(u.n_c)?
        .into_iter()
        .map(|p| {
            // ⟨c'|P|c⟩ is non-zero only for c' = c ⊕ x.
            let action: Vec<(usize, Complex64)> = (0..c_dim).map(|c| p.column_action(c)).collect();
            let a = CMatrix::from_fn(r_dim, r_dim, |r, s| {
                action
                    .iter()
                    .enumerate()
                    .map(|(c, (row, phase))| phase.conj() * m[(row + c_dim * r, c + c_dim * s)])
                    .sum::<Complex64>()
                    * norm
            });
            (p, a)
        })
        .collect();
    PauliDecomposition::from_components(u.n_c, u.r_qubits, components)
}

/// Attack selector used in configuration files and on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AttackSpec {
    Identity,
    Pauli(PauliOperator),
    Haar(u64),
    File(PathBuf),
}

impl AttackSpec {
    pub fn build(&self, n_c: usize, r_qubits: usize) -> Result<AttackUnitary> {
        match self {
            AttackSpec::Identity => AttackUnitary::identity(n_c, r_qubits),
            AttackSpec::Pauli(p) => {
                if p.n() != n_c {
                    return Err(QauthError::SizeMismatch {
                        expected: n_c,
                        actual: p.n(),
                    });
                }
                AttackUnitary::pauli(p, r_qubits)
            }
            AttackSpec::Haar(seed) => AttackUnitary::haar_seeded(n_c, r_qubits, *seed),
            AttackSpec::File(path) => AttackUnitary::from_file(path, n_c, r_qubits),
        }
    }
}

impl FromStr for AttackSpec {
    type Err = QauthError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "identity" {
            return Ok(AttackSpec::Identity);
        }
        if let Some(lit) = s.strip_prefix("pauli:") {
            return Ok(AttackSpec::Pauli(lit.parse()?));
        }
        if let Some(seed) = s.strip_prefix("haar:") {
            return seed
                .parse()
                .map(AttackSpec::Haar)
                .map_err(|_| QauthError::Parse(format!("bad Haar seed {seed:?}")));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(AttackSpec::File(PathBuf::from(path)));
        }
        if s.is_empty() {
            return Err(QauthError::Parse("empty attack spec".into()));
        }
        Ok(AttackSpec::File(PathBuf::from(s)))
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackSpec::Identity => f.write_str("identity"),
            AttackSpec::Pauli(p) => write!(f, "pauli:{p}"),
            AttackSpec::Haar(seed) => write!(f, "haar:{seed}"),
            AttackSpec::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

impl serde::Serialize for AttackSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for AttackSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
