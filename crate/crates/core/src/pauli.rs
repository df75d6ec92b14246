//! Symplectic representation of the n-qubit Pauli group.
//!
//! A [`PauliOperator`] is stored as two bit masks plus a phase exponent. The
//! operator it denotes is `i^phase_exp · ⊗_q σ_q`, where `σ_q` is the
//! Hermitian letter on qubit `q` (`I`, `X`, `Y` or `Z`, with `Y = iXZ`).
//! Qubit `q` corresponds to bit `q` of both masks and to bit `q` of a dense
//! matrix index (little-endian).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{ensure_size, QauthError, Result};
use crate::linear_sim::CMatrix;

/// Masks are single machine words.
pub const MAX_PAULI_QUBITS: usize = 64;
/// Default cap for [`enumerate_paulis`] (4^10 entries).
pub const DEFAULT_ENUMERATION_LIMIT: usize = 10;
/// Largest operator [`PauliOperator::to_matrix`] will build.
pub const MAX_MATRIX_QUBITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

#[inline]
fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
fn popcount(v: u64) -> u32 {
    v.count_ones()
}

/// Phase-tracked n-qubit Pauli operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliOperator {
    pub fn new(n: usize, x_mask: u64, z_mask: u64, phase_exp: u8) -> Result<Self> {
        if n == 0 || n > MAX_PAULI_QUBITS {
            return Err(QauthError::LimitExceeded {
                what: "Pauli qubit count",
                value: n,
                limit: MAX_PAULI_QUBITS,
            });
        }
        if x_mask & !mask(n) != 0 || z_mask & !mask(n) != 0 {
            return Err(QauthError::InvalidState(format!("Pauli masks exceed {n} qubits")));
        }
        Ok(Self {
            n,
            x: x_mask,
            z: z_mask,
            phase: phase_exp & 3,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, 0, 0, 0).expect("identity on a valid qubit count")
    }

    /// `letter` on qubit `q`, identity elsewhere.
    pub fn single(n: usize, q: usize, letter: PauliLetter) -> Result<Self> {
        if q >= n {
            return Err(QauthError::SizeMismatch {
                expected: n,
                actual: q + 1,
            });
        }
        let (x, z) = letter.bits();
        Self::new(n, (x as u64) << q, (z as u64) << q, 0)
    }

    pub fn from_letters(letters: &[PauliLetter]) -> Result<Self> {
        let (mut x, mut z) = (0u64, 0u64);
        for (q, l) in letters.iter().enumerate().take(MAX_PAULI_QUBITS) {
            let (bx, bz) = l.bits();
            x |= (bx as u64) << q;
            z |= (bz as u64) << q;
        }
        Self::new(letters.len(), x, z, 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn letter(&self, q: usize) -> PauliLetter {
        PauliLetter::from_bits((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1)
    }

    pub fn letters(&self) -> impl Iterator<Item = PauliLetter> + '_ {
        (0..self.n).map(move |q| self.letter(q))
    }

    pub fn with_phase(self, phase_exp: u8) -> Self {
        Self {
            phase: phase_exp & 3,
            ..self
        }
    }

    /// Same letters, phase `+1`.
    pub fn phase_free(self) -> Self {
        self.with_phase(0)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn eq_up_to_phase(&self, other: &Self) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn adjoint(&self) -> Self {
        self.with_phase((4 - self.phase) & 3)
    }

    /// Symplectic form: true iff the two operators commute. Sizes must match.
    pub fn commutes_with(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n);
        (popcount(self.x & other.z) + popcount(self.z & other.x)).is_multiple_of(2)
    }

    /// Phase-exact product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        ensure_size(self.n, other.n)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        // i^a i^|x1z1| X^x1 Z^z1 · i^b i^|x2z2| X^x2 Z^z2, moving Z^z1 past X^x2.
        let phase = self.phase as u32
            + other.phase as u32
            + popcount(self.x & self.z)
            + popcount(other.x & other.z)
            + 2 * popcount(self.z & other.x)
            + 4 * 64
            - popcount(x & z);
        Self {
            n: self.n,
            x,
            z,
            phase: (phase % 4) as u8,
        }
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        popcount(self.x | self.z) as usize
    }

    /// Weight restricted to qubits `start..start + len`.
    pub fn weight_in(&self, start: usize, len: usize) -> usize {
        let m = mask(len) << start;
        popcount((self.x | self.z) & m) as usize
    }

    /// `self ⊗ other`; `self` occupies the low qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        if n > MAX_PAULI_QUBITS {
            return Err(QauthError::LimitExceeded {
                what: "Pauli qubit count",
                value: n,
                limit: MAX_PAULI_QUBITS,
            });
        }
        Self::new(
            n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
            (self.phase + other.phase) & 3,
        )
    }

    /// Restriction to qubits `start..start + len` (phase dropped).
    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.n || len == 0 {
            return Err(QauthError::SizeMismatch {
                expected: self.n,
                actual: start + len,
            });
        }
        Self::new(len, (self.x >> start) & mask(len), (self.z >> start) & mask(len), 0)
    }

    /// Relocates the letter on qubit `i` to qubit `perm[i]`; phase unchanged.
    ///
    /// With `V = perm.matrix()` this is `V · self · V†`.
    pub fn conjugate_by_permutation(&self, perm: &Permutation) -> Result<Self> {
        ensure_size(self.n, perm.len())?;
        let (mut x, mut z) = (0u64, 0u64);
        for (i, &target) in perm.as_slice().iter().enumerate() {
            x |= ((self.x >> i) & 1) << target;
            z |= ((self.z >> i) & 1) << target;
        }
        Ok(Self { x, z, ..*self })
    }

    /// `P|b⟩ = c·|b ⊕ x⟩`; returns `(b ⊕ x, c)`.
    #[inline]
    pub fn column_action(&self, b: usize) -> (usize, Complex64) {
        let exp = self.phase as u32 + popcount(self.x & self.z) + 2 * popcount(self.z & b as u64);
        (b ^ self.x as usize, I_POWERS[(exp % 4) as usize])
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.n > MAX_MATRIX_QUBITS {
            return Err(QauthError::LimitExceeded {
                what: "Pauli matrix qubits",
                value: self.n,
                limit: MAX_MATRIX_QUBITS,
            });
        }
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            let (row, c) = self.column_action(b);
            m[(row, b)] = c;
        }
        Ok(m)
    }

    /// Applies the operator to a state vector of matching dimension.
    pub fn apply_to_vector(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (b, amp) in v.iter().enumerate() {
            let (row, c) = self.column_action(b);
            out[row] = c * amp;
        }
        out
    }

    /// Uniformly random phase-free Pauli; `non_identity` excludes `I`.
    pub fn random<R: Rng + ?Sized>(n: usize, non_identity: bool, rng: &mut R) -> Result<Self> {
        if n == 0 || n > MAX_PAULI_QUBITS {
            return Err(QauthError::LimitExceeded {
                what: "Pauli qubit count",
                value: n,
                limit: MAX_PAULI_QUBITS,
            });
        }
        loop {
            let x = rng.random::<u64>() & mask(n);
            let z = rng.random::<u64>() & mask(n);
            if !(non_identity && x == 0 && z == 0) {
                return Self::new(n, x, z, 0);
            }
        }
    }
}

pub(crate) const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliOperator {
    type Err = QauthError;

    /// Parses `[+|-|+i|-i|i]{I,X,Y,Z}+`; the first letter is qubit 0.
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| QauthError::PauliParse {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim().replace('\u{2212}', "-");
        let (phase, body) = if let Some(rest) = t.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = t.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = t.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = t.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = t.strip_prefix('+') {
            (0, rest)
        } else {
            (0, t.as_str())
        };
        if body.is_empty() {
            return Err(err("no Pauli letters"));
        }
        let letters = body
            .chars()
            .map(|c| match c {
                'I' => Ok(PauliLetter::I),
                'X' => Ok(PauliLetter::X),
                'Y' => Ok(PauliLetter::Y),
                'Z' => Ok(PauliLetter::Z),
                other => Err(err(&format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.len() > MAX_PAULI_QUBITS {
            return Err(err("too many qubits"));
        }
        Ok(Self::from_letters(&letters)?.with_phase(phase))
    }
}

impl serde::Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All `4^n` phase-free Paulis ordered by `(x_mask, z_mask)`.
pub fn enumerate_paulis(n: usize) -> Result<Vec<PauliOperator>> {
    enumerate_paulis_with_limit(n, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_paulis_with_limit(n: usize, limit: usize) -> Result<Vec<PauliOperator>> {
    if n == 0 || n > limit || n > 31 {
        return Err(QauthError::LimitExceeded {
            what: "Pauli enumeration qubits",
            value: n,
            limit: limit.min(31),
        });
    }
    let side = 1u64 << n;
    let mut out = Vec::with_capacity((side * side) as usize);
    for x in 0..side {
        for z in 0..side {
            out.push(PauliOperator { n, x, z, phase: 0 });
        }
    }
    Ok(out)
}

/// Block structure `message ⊗ trap0 ⊗ trap+` on consecutive qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct QubitPartition {
    pub message: usize,
    pub trap0: usize,
    pub trapplus: usize,
}

impl QubitPartition {
    /// Trap-code layout: `n` message, `n` |0⟩ traps, `n` |+⟩ traps.
    pub fn trap_code(n: usize) -> Self {
        Self {
            message: n,
            trap0: n,
            trapplus: n,
        }
    }

    /// Clifford-code layout: `n` message qubits followed by `d` |0⟩ traps.
    pub fn clifford_code(n: usize, d: usize) -> Self {
        Self {
            message: n,
            trap0: d,
            trapplus: 0,
        }
    }

    pub fn total(&self) -> usize {
        self.message + self.trap0 + self.trapplus
    }

    fn trap0_mask(&self) -> u64 {
        mask(self.trap0) << self.message
    }

    fn trapplus_mask(&self) -> u64 {
        mask(self.trapplus) << (self.message + self.trap0)
    }
}

/// Membership in the accept set: `{I,Z}` on the |0⟩ traps and `{I,X}` on the
/// |+⟩ traps, anything on the message block. Phase is ignored.
pub fn in_set_e(p: &PauliOperator, part: &QubitPartition) -> bool {
    debug_assert_eq!(p.n(), part.total());
    p.x_mask() & part.trap0_mask() == 0 && p.z_mask() & part.trapplus_mask() == 0
}

/// [`in_set_e`] with message-block weight at most `t`.
pub fn in_set_f(p: &PauliOperator, part: &QubitPartition, t: usize) -> bool {
    in_set_e(p, part) && p.weight_in(0, part.message) <= t
}

/// Permutation of qubit positions: qubit `i` moves to position `self[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n {
                return Err(QauthError::MalformedPermutation(format!(
                    "index {i} out of range for length {n}"
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(QauthError::MalformedPermutation(format!("index {i} repeated")));
            }
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Exchanges positions `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut v: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(QauthError::MalformedPermutation(format!(
                "transposition ({a} {b}) outside length {n}"
            )));
        }
        v.swap(a, b);
        Ok(Self(v))
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Self(inv)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Permutation) -> Result<Self> {
        ensure_size(self.len(), first.len())?;
        Ok(Self(first.0.iter().map(|&i| self.0[i]).collect()))
    }

    /// Unitary moving qubit `i` to position `self[i]` (little-endian indices).
    pub fn matrix(&self) -> Result<CMatrix> {
        let n = self.len();
        if n > MAX_MATRIX_QUBITS {
            return Err(QauthError::LimitExceeded {
                what: "permutation matrix qubits",
                value: n,
                limit: MAX_MATRIX_QUBITS,
            });
        }
        let dim = 1usize << n;
        let mut m = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            m[(self.permute_index(b), b)] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// Basis index with bit `i` moved to bit `self[i]`.
    pub fn permute_index(&self, b: usize) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &t)| acc | (((b >> i) & 1) << t))
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> AllPermutations {
        AllPermutations {
            next: Some((0..n).collect()),
        }
    }
}

/// Lexicographic permutation iterator (see [`Permutation::all`]).
pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut v = current.clone();
        if next_permutation(&mut v) {
            self.next = Some(v);
        }
        Some(Permutation(current))
    }
}

/// In-place lexicographic successor; false when `v` was the last one.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn all_phased(n: usize) -> Vec<PauliOperator> {
        enumerate_paulis(n)
            .unwrap()
            .into_iter()
            .flat_map(|q| (0..4).map(move |k| q.with_phase(k)))
            .collect()
    }

    // Independent Kronecker oracle: qubit 0 is the rightmost Kronecker factor.
    fn kron_oracle(q: &PauliOperator) -> CMatrix {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let z = Complex64::new(0.0, 0.0);
        let mut m = CMatrix::from_element(1, 1, I_POWERS[q.phase_exp() as usize]);
        for l in q.letters() {
            let f = match l {
                PauliLetter::I => CMatrix::from_row_slice(2, 2, &[one, z, z, one]),
                PauliLetter::X => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
                PauliLetter::Y => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
                PauliLetter::Z => CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
            };
            m = f.kronecker(&m);
        }
        m
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let prod = p("X").multiply(&p("Z")).unwrap();
        assert_eq!(prod, p("-iY"));
        assert_eq!(prod.phase_exp(), 3);
    }

    #[test]
    fn identity_is_neutral() {
        for q in all_phased(2) {
            assert_eq!(PauliOperator::identity(2).multiply(&q).unwrap(), q);
        }
    }

    #[test]
    fn single_qubit_products_match_dense() {
        for a in all_phased(1) {
            for b in all_phased(1) {
                let ab = a.multiply(&b).unwrap();
                assert_eq!(ab.to_matrix().unwrap(), a.to_matrix().unwrap() * b.to_matrix().unwrap());
            }
            let sq = a.multiply(&a).unwrap();
            assert!(sq.is_identity());
        }
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert!(matches!(
            p("XI").multiply(&p("X")),
            Err(QauthError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn weights() {
        assert_eq!(p("IXY").weight(), 2);
        assert_eq!(PauliOperator::identity(5).weight(), 0);
        let a = p("XYI");
        let b = p("ZZ");
        assert_eq!(a.tensor(&b).unwrap().weight(), a.weight() + b.weight());
    }

    #[test]
    fn tensor_masks() {
        let xi = p("X").tensor(&p("I")).unwrap();
        assert_eq!((xi.x_mask(), xi.z_mask()), (0b01, 0b00));
    }

    #[test]
    fn matrices_of_letters() {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(
            p("X").to_matrix().unwrap(),
            CMatrix::from_row_slice(2, 2, &[z, one, one, z])
        );
        assert_eq!(
            p("Y").to_matrix().unwrap(),
            CMatrix::from_row_slice(2, 2, &[z, -i, i, z])
        );
        for q in all_phased(3) {
            assert_eq!(q.to_matrix().unwrap(), kron_oracle(&q));
        }
    }

    #[test]
    fn matrix_limit() {
        let big = PauliOperator::identity(13);
        assert!(matches!(big.to_matrix(), Err(QauthError::LimitExceeded { .. })));
    }

    #[test]
    fn enumeration_order_and_size() {
        let one = enumerate_paulis(1).unwrap();
        assert_eq!(one, vec![p("I"), p("Z"), p("X"), p("Y")]);
        assert_eq!(enumerate_paulis(2).unwrap().len(), 16);
        let three: HashSet<_> = enumerate_paulis(3).unwrap().into_iter().collect();
        assert_eq!(three.len(), 64);
        assert!(enumerate_paulis(11).is_err());
    }

    #[test]
    fn permutation_conjugation() {
        let id = Permutation::identity(3);
        assert_eq!(p("XYZ").conjugate_by_permutation(&id).unwrap(), p("XYZ"));
        let swap = Permutation::transposition(2, 0, 1).unwrap();
        assert_eq!(p("XI").conjugate_by_permutation(&swap).unwrap(), p("IX"));
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(p("XI").conjugate_by_permutation(&Permutation::identity(3)).is_err());
    }

    #[test]
    fn permutation_conjugation_matches_dense() {
        for perm in Permutation::all(3) {
            let v = perm.matrix().unwrap();
            for q in enumerate_paulis(3).unwrap() {
                let dense = &v * q.to_matrix().unwrap() * v.adjoint();
                assert_eq!(dense, q.conjugate_by_permutation(&perm).unwrap().to_matrix().unwrap());
            }
        }
    }

    #[test]
    fn permutation_conjugation_composes() {
        let perms: Vec<_> = Permutation::all(3).collect();
        assert_eq!(perms.len(), 6);
        for s in &perms {
            for t in &perms {
                let ts = t.after(s).unwrap();
                for q in enumerate_paulis(3).unwrap() {
                    let twice = q
                        .conjugate_by_permutation(s)
                        .unwrap()
                        .conjugate_by_permutation(t)
                        .unwrap();
                    assert_eq!(twice, q.conjugate_by_permutation(&ts).unwrap());
                }
            }
        }
    }

    #[test]
    fn accept_sets() {
        let part = QubitPartition::trap_code(1);
        assert!(in_set_e(&p("III"), &part));
        assert!(!in_set_e(&p("IXI"), &part));
        assert!(!in_set_e(&p("IIZ"), &part));
        assert!(in_set_e(&p("YZX"), &part));
        assert!(in_set_f(&p("III"), &part, 0));
        assert!(!in_set_f(&p("XII"), &part, 0));
        assert!(in_set_f(&p("IIX"), &part, 0));
    }

    #[test]
    fn accept_set_cardinalities() {
        for n in 1..=3 {
            let part = QubitPartition::trap_code(n);
            let all = enumerate_paulis(3 * n).unwrap();
            let e: Vec<_> = all.iter().filter(|q| in_set_e(q, &part)).collect();
            assert_eq!(
                e.len(),
                4usize.pow(n as u32) * 2usize.pow(n as u32) * 2usize.pow(n as u32)
            );
            for t in 0..=n {
                // Brute-force construction of F from its definition.
                let expected = all
                    .iter()
                    .filter(|q| {
                        let msg_ok = (0..n).filter(|&i| q.letter(i) != PauliLetter::I).count() <= t;
                        let t0_ok = (n..2 * n).all(|i| matches!(q.letter(i), PauliLetter::I | PauliLetter::Z));
                        let tp_ok = (2 * n..3 * n).all(|i| matches!(q.letter(i), PauliLetter::I | PauliLetter::X));
                        msg_ok && t0_ok && tp_ok
                    })
                    .count();
                let f: Vec<_> = all.iter().filter(|q| in_set_f(q, &part, t)).collect();
                assert_eq!(f.len(), expected);
                assert!(f.iter().all(|q| in_set_e(q, &part)));
            }
        }
    }

    #[test]
    fn literal_forms() {
        let q = p("-iXIZ");
        assert_eq!(q.phase_exp(), 3);
        assert_eq!(q.to_string(), "-iXIZ");
        assert_eq!(p("+XY").to_string(), "XY");
        assert_eq!(p("iX"), p("+iX"));
        assert!("XQ".parse::<PauliOperator>().is_err());
        assert!("-".parse::<PauliOperator>().is_err());
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliOperator> {
        (0..(1u64 << n), 0..(1u64 << n), 0u8..4).prop_map(move |(x, z, ph)| PauliOperator::new(n, x, z, ph).unwrap())
    }

    proptest! {
        #[test]
        fn literal_round_trip(q in (1usize..20).prop_flat_map(arb_pauli)) {
            let s = q.to_string();
            let back: PauliOperator = s.parse().unwrap();
            prop_assert_eq!(back, q);
            prop_assert_eq!(back.to_string(), s);
        }

        #[test]
        fn product_matches_dense(a in arb_pauli(3), b in arb_pauli(3)) {
            let ab = a.multiply(&b).unwrap();
            prop_assert_eq!(ab.to_matrix().unwrap(), a.to_matrix().unwrap() * b.to_matrix().unwrap());
        }

        #[test]
        fn tensor_is_associative_and_kronecker(a in arb_pauli(2), b in arb_pauli(1), c in arb_pauli(2)) {
            let left = a.tensor(&b).unwrap().tensor(&c).unwrap();
            let right = a.tensor(&b.tensor(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            let dense = c.to_matrix().unwrap().kronecker(&b.to_matrix().unwrap()).kronecker(&a.to_matrix().unwrap());
            prop_assert_eq!(left.to_matrix().unwrap(), dense);
        }

        #[test]
        fn commutation_matches_dense(a in arb_pauli(3), b in arb_pauli(3)) {
            let (ma, mb) = (a.to_matrix().unwrap(), b.to_matrix().unwrap());
            let commute = (&ma * &mb - &mb * &ma).norm() < 1e-12;
            prop_assert_eq!(a.commutes_with(&b), commute);
        }
    }
}
