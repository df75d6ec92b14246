//! Clifford unitaries as tableaux of generator images.
//!
//! An element is identified by its conjugation action, i.e. modulo global
//! phase. Image `image_x[j]` is `C X_j C†` and `image_z[j]` is `C Z_j C†`;
//! both must be Hermitian Paulis (sign ±1).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_size, QauthError, Result};
use crate::linear_sim::CMatrix;
use crate::pauli::{PauliLetter, PauliOperator, MAX_PAULI_QUBITS};

/// Default cap for [`CliffordElement::sample_uniform`].
pub const MAX_SAMPLE_QUBITS: usize = 32;
/// Largest tableau [`CliffordElement::to_unitary`] will expand.
pub const MAX_UNITARY_QUBITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordElement {
    n: usize,
    image_x: Vec<PauliOperator>,
    image_z: Vec<PauliOperator>,
}

impl CliffordElement {
    /// Builds a tableau, checking the symplectic condition.
    pub fn from_images(image_x: Vec<PauliOperator>, image_z: Vec<PauliOperator>) -> Result<Self> {
        let n = image_x.len();
        ensure_size(n, image_z.len())?;
        if n == 0 || n > MAX_PAULI_QUBITS {
            return Err(QauthError::InvalidTableau(format!("{n} generators")));
        }
        for p in image_x.iter().chain(&image_z) {
            ensure_size(n, p.n())?;
            if !p.is_hermitian() {
                return Err(QauthError::InvalidTableau(format!("image {p} is not Hermitian")));
            }
        }
        for j in 0..n {
            for k in 0..n {
                let want_anti = j == k;
                if image_x[j].commutes_with(&image_z[k]) == want_anti {
                    return Err(QauthError::InvalidTableau(format!(
                        "images of X{} and Z{} violate the commutation relations",
                        j + 1,
                        k + 1
                    )));
                }
                if j < k && (!image_x[j].commutes_with(&image_x[k]) || !image_z[j].commutes_with(&image_z[k])) {
                    return Err(QauthError::InvalidTableau(format!(
                        "images of generators {} and {} do not commute",
                        j + 1,
                        k + 1
                    )));
                }
            }
        }
        Ok(Self { n, image_x, image_z })
    }

    pub fn identity(n: usize) -> Self {
        let image_x = (0..n)
            .map(|q| PauliOperator::single(n, q, PauliLetter::X).unwrap())
            .collect();
        let image_z = (0..n)
            .map(|q| PauliOperator::single(n, q, PauliLetter::Z).unwrap())
            .collect();
        Self { n, image_x, image_z }
    }

    /// Hadamard on qubit `q`.
    pub fn hadamard(n: usize, q: usize) -> Result<Self> {
        let mut c = Self::identity(n);
        c.image_x[q] = PauliOperator::single(n, q, PauliLetter::Z)?;
        c.image_z[q] = PauliOperator::single(n, q, PauliLetter::X)?;
        Ok(c)
    }

    /// `S = diag(1, i)` on qubit `q`: X ↦ Y, Z ↦ Z.
    pub fn phase_gate(n: usize, q: usize) -> Result<Self> {
        let mut c = Self::identity(n);
        c.image_x[q] = PauliOperator::single(n, q, PauliLetter::Y)?;
        Ok(c)
    }

    pub fn cnot(n: usize, control: usize, target: usize) -> Result<Self> {
        if control == target || control >= n || target >= n {
            return Err(QauthError::InvalidTableau(format!(
                "CNOT({control},{target}) on {n} qubits"
            )));
        }
        let mut c = Self::identity(n);
        let xt = PauliOperator::single(n, target, PauliLetter::X)?;
        let zc = PauliOperator::single(n, control, PauliLetter::Z)?;
        c.image_x[control] = c.image_x[control].multiply(&xt)?;
        c.image_z[target] = zc.multiply(&c.image_z[target])?;
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn image_x(&self) -> &[PauliOperator] {
        &self.image_x
    }

    pub fn image_z(&self) -> &[PauliOperator] {
        &self.image_z
    }

    /// `C p C†`, phase exact.
    pub fn conjugate(&self, p: &PauliOperator) -> Result<PauliOperator> {
        ensure_size(self.n, p.n())?;
        // p = i^(phase + |x∧z|) X^x Z^z
        let start = p.phase_exp() + (p.x_mask() & p.z_mask()).count_ones() as u8;
        let mut acc = PauliOperator::identity(self.n).with_phase(start);
        for j in 0..self.n {
            if (p.x_mask() >> j) & 1 == 1 {
                acc = acc.mul_unchecked(&self.image_x[j]);
            }
        }
        for j in 0..self.n {
            if (p.z_mask() >> j) & 1 == 1 {
                acc = acc.mul_unchecked(&self.image_z[j]);
            }
        }
        Ok(acc)
    }

    /// `self ∘ inner`: conjugating by the result equals conjugating by
    /// `inner`, then by `self`.
    pub fn compose(&self, inner: &CliffordElement) -> Result<Self> {
        ensure_size(self.n, inner.n)?;
        let image_x = inner.image_x.iter().map(|p| self.conjugate(p)).collect::<Result<_>>()?;
        let image_z = inner.image_z.iter().map(|p| self.conjugate(p)).collect::<Result<_>>()?;
        Ok(Self {
            n: self.n,
            image_x,
            image_z,
        })
    }

    /// Uniform over the Clifford group modulo phase.
    ///
    /// Generator pairs are drawn one at a time: the image of `X_j` is a
    /// uniform non-zero vector of the symplectic complement of the images
    /// chosen so far, the image of `Z_j` a uniform vector of that complement
    /// anticommuting with it. Each image then gets an independent sign.
    pub fn sample_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 || n > MAX_SAMPLE_QUBITS {
            return Err(QauthError::LimitExceeded {
                what: "Clifford sampling qubits",
                value: n,
                limit: MAX_SAMPLE_QUBITS,
            });
        }
        let mut image_x: Vec<PauliOperator> = Vec::with_capacity(n);
        let mut image_z: Vec<PauliOperator> = Vec::with_capacity(n);
        for _ in 0..n {
            let x = loop {
                let v = project_complement(PauliOperator::random(n, false, rng)?, &image_x, &image_z);
                if !v.is_identity() {
                    break v;
                }
            };
            let z = loop {
                let v = project_complement(PauliOperator::random(n, false, rng)?, &image_x, &image_z);
                if !v.commutes_with(&x) {
                    break v;
                }
            };
            image_x.push(x);
            image_z.push(z);
        }
        for p in image_x.iter_mut().chain(image_z.iter_mut()) {
            if rng.random::<bool>() {
                *p = p.with_phase(2);
            }
        }
        Ok(Self { n, image_x, image_z })
    }

    pub fn sample_uniform_seeded(n: usize, seed: u64) -> Result<Self> {
        Self::sample_uniform(n, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// A unitary implementing the tableau. The global phase makes the first
    /// non-zero entry of the first column real and positive.
    pub fn to_unitary(&self) -> Result<CMatrix> {
        if self.n > MAX_UNITARY_QUBITS {
            return Err(QauthError::LimitExceeded {
                what: "Clifford unitary qubits",
                value: self.n,
                limit: MAX_UNITARY_QUBITS,
            });
        }
        let dim = 1usize << self.n;
        // U|0⟩ is the state stabilised by the images of Z_j.
        let mut psi = None;
        for k in 0..dim {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[k] = Complex64::new(1.0, 0.0);
            for s in &self.image_z {
                let sv = s.apply_to_vector(&v);
                for (a, b) in v.iter_mut().zip(&sv) {
                    *a = (*a + b) * 0.5;
                }
            }
            let norm2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            if norm2 > 0.5 / dim as f64 {
                let norm = norm2.sqrt();
                let lead = v.iter().find(|a| a.norm() > 1e-9).copied().unwrap();
                let phase = lead.conj() / lead.norm();
                v.iter_mut().for_each(|a| *a = *a * phase / norm);
                psi = Some(v);
                break;
            }
        }
        let psi = psi.ok_or_else(|| QauthError::InvalidTableau("no stabiliser state".into()))?;
        let mut u = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            let mut v = psi.clone();
            for j in 0..self.n {
                if (b >> j) & 1 == 1 {
                    v = self.image_x[j].apply_to_vector(&v);
                }
            }
            for (r, a) in v.into_iter().enumerate() {
                u[(r, b)] = a;
            }
        }
        Ok(u)
    }

    /// Every element for `n = 1` (24), and for `n = 2` (11520) when
    /// `allow_two_qubits` is set.
    pub fn enumerate_all(n: usize, allow_two_qubits: bool) -> Result<Vec<Self>> {
        let limit = if allow_two_qubits { 2 } else { 1 };
        if n == 0 || n > limit {
            return Err(QauthError::LimitExceeded {
                what: "Clifford enumeration qubits",
                value: n,
                limit,
            });
        }
        let nonzero: Vec<PauliOperator> = crate::pauli::enumerate_paulis(n)?
            .into_iter()
            .filter(|p| !p.is_identity())
            .collect();
        let mut frames = Vec::new();
        extend_frames(&nonzero, n, &mut Vec::new(), &mut Vec::new(), &mut frames);
        let mut out = Vec::with_capacity(frames.len() << (2 * n));
        for (xs, zs) in frames {
            for signs in 0..(1u32 << (2 * n)) {
                let sign = |k: usize, p: &PauliOperator| p.with_phase(if (signs >> k) & 1 == 1 { 2 } else { 0 });
                let image_x = xs.iter().enumerate().map(|(k, p)| sign(k, p)).collect();
                let image_z = zs.iter().enumerate().map(|(k, p)| sign(n + k, p)).collect();
                out.push(Self { n, image_x, image_z });
            }
        }
        Ok(out)
    }
}

fn project_complement(mut v: PauliOperator, xs: &[PauliOperator], zs: &[PauliOperator]) -> PauliOperator {
    let original = v;
    for (x, z) in xs.iter().zip(zs) {
        if !original.commutes_with(z) {
            v = v.mul_unchecked(x);
        }
        if !original.commutes_with(x) {
            v = v.mul_unchecked(z);
        }
    }
    v.phase_free()
}

fn extend_frames(
    nonzero: &[PauliOperator],
    n: usize,
    xs: &mut Vec<PauliOperator>,
    zs: &mut Vec<PauliOperator>,
    out: &mut Vec<(Vec<PauliOperator>, Vec<PauliOperator>)>,
) {
    if xs.len() == n {
        out.push((xs.clone(), zs.clone()));
        return;
    }
    let free: Vec<PauliOperator> = nonzero
        .iter()
        .filter(|p| xs.iter().chain(zs.iter()).all(|q| q.commutes_with(p)))
        .copied()
        .collect();
    for x in &free {
        for z in free.iter().filter(|p| !p.commutes_with(x)) {
            xs.push(*x);
            zs.push(*z);
            extend_frames(nonzero, n, xs, zs, out);
            xs.pop();
            zs.pop();
        }
    }
}

/// `|{C ∈ group : C† P C = Q up to phase}|`, computed as the number of `C`
/// with `C Q C† ∝ P`.
pub fn randomization_counts(group: &[CliffordElement], p: &PauliOperator, q: &PauliOperator) -> Result<usize> {
    if p.is_identity() || q.is_identity() {
        return Err(QauthError::IdentityPauli);
    }
    let mut count = 0;
    for c in group {
        if c.conjugate(q)?.eq_up_to_phase(p) {
            count += 1;
        }
    }
    Ok(count)
}

impl fmt::Display for CliffordElement {
    /// `{X1→"Z", Z1→"X"}` with 1-based generator indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for j in 0..self.n {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(
                f,
                "X{}→\"{}\", Z{}→\"{}\"",
                j + 1,
                self.image_x[j],
                j + 1,
                self.image_z[j]
            )?;
        }
        f.write_str("}")
    }
}

impl CliffordElement {
    fn from_image_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let n = map.len() / 2;
        if n == 0 || !map.len().is_multiple_of(2) {
            return Err(QauthError::Parse(format!(
                "expected X/Z image pairs, got {} entries",
                map.len()
            )));
        }
        let mut image_x = Vec::with_capacity(n);
        let mut image_z = Vec::with_capacity(n);
        for j in 1..=n {
            for (prefix, images) in [("X", &mut image_x), ("Z", &mut image_z)] {
                let key = format!("{prefix}{j}");
                let lit = map
                    .get(&key)
                    .ok_or_else(|| QauthError::Parse(format!("missing generator image {key}")))?;
                images.push(lit.parse::<PauliOperator>()?);
            }
        }
        Self::from_images(image_x, image_z)
    }

    fn image_map(&self) -> Vec<(String, String)> {
        (0..self.n)
            .flat_map(|j| {
                [
                    (format!("X{}", j + 1), self.image_x[j].to_string()),
                    (format!("Z{}", j + 1), self.image_z[j].to_string()),
                ]
            })
            .collect()
    }
}

impl FromStr for CliffordElement {
    type Err = QauthError;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| QauthError::Parse(format!("expected braces around {s:?}")))?;
        let mut map = BTreeMap::new();
        for entry in body.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            let (key, value) = entry
                .split_once('→')
                .or_else(|| entry.split_once("->"))
                .ok_or_else(|| QauthError::Parse(format!("missing arrow in {entry:?}")))?;
            let value = value.trim().trim_matches('"');
            if map.insert(key.trim().to_string(), value.to_string()).is_some() {
                return Err(QauthError::Parse(format!("repeated generator {}", key.trim())));
            }
        }
        Self::from_image_map(&map)
    }
}

impl serde::Serialize for CliffordElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let entries = self.image_map();
        let mut m = serializer.serialize_map(Some(entries.len()))?;
        for (k, v) in &entries {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl<'de> serde::Deserialize<'de> for CliffordElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, String>::deserialize(deserializer)?;
        Self::from_image_map(&map).map_err(serde::de::Error::custom)
    }
}
