//! Counting permutations that carry a Pauli into `E ∖ F` for the trap code.
//!
//! `η_P` is the number of permutations `π` of the `3n` codeword qubits with
//! `π†Pπ` accepted by the trap test but carrying more than `t` errors on
//! the message block.

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QauthError, Result};
use crate::pauli::{in_set_e, next_permutation, PauliLetter, PauliOperator, QubitPartition};
use crate::simulators::{accepting_placements, binomial, factorial, falling, LetterCounts};

/// Largest codeword for brute-force enumeration (`9! = 362880` permutations).
pub const MAX_BRUTEFORCE_QUBITS: usize = 9;

fn overflow() -> QauthError {
    QauthError::LimitExceeded {
        what: "exact permutation count (u128)",
        value: usize::MAX,
        limit: 128,
    }
}

fn product(factors: &[Option<u128>]) -> Result<u128> {
    factors
        .iter()
        .try_fold(1u128, |acc, f| f.and_then(|f| acc.checked_mul(f)))
        .ok_or_else(overflow)
}

/// `η_P` for each `t` in `ts`, by enumerating all `(3n)!` permutations.
pub fn eta_bruteforce_multi(n: usize, ts: &[usize], p: &PauliOperator) -> Result<Vec<u64>> {
    let m = 3 * n;
    if p.n() != m {
        return Err(QauthError::SizeMismatch {
            expected: m,
            actual: p.n(),
        });
    }
    if m > MAX_BRUTEFORCE_QUBITS {
        return Err(QauthError::LimitExceeded {
            what: "brute-force eta qubits",
            value: m,
            limit: MAX_BRUTEFORCE_QUBITS,
        });
    }
    let part = QubitPartition::trap_code(n);
    let support: Vec<usize> = (0..m).filter(|&i| p.letter(i) != PauliLetter::I).collect();
    let mut counts = vec![0u64; ts.len()];
    let mut perm: Vec<usize> = (0..m).collect();
    loop {
        let (mut x, mut z) = (0u64, 0u64);
        for &i in &support {
            x |= ((p.x_mask() >> i) & 1) << perm[i];
            z |= ((p.z_mask() >> i) & 1) << perm[i];
        }
        let moved = PauliOperator::new(m, x, z, 0)?;
        if in_set_e(&moved, &part) {
            let w = moved.weight_in(0, n);
            for (c, &t) in counts.iter_mut().zip(ts) {
                if w > t {
                    *c += 1;
                }
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(counts)
}

/// `η_P` by enumerating all `(3n)!` permutations; `3n ≤ 9`.
pub fn eta_bruteforce(n: usize, t: usize, p: &PauliOperator) -> Result<u64> {
    Ok(eta_bruteforce_multi(n, &[t], p)?[0])
}

/// `C(n, t+1)·(t+1)!·(3n − t − 1)!`; zero when `t ≥ n`.
pub fn eta_bound(n: usize, t: usize) -> Result<u128> {
    if t + 1 > n {
        return Ok(0);
    }
    product(&[falling(n, t + 1), factorial(3 * n - t - 1)])
}

/// Where the letters of a Pauli go under a permutation counted by `η_P`:
/// `d_x + d_y + d_z = t + 1` letters fill the required message slots,
/// `x1, y, z1` further letters land in the message block, `x2` `X`s in the
/// `|+⟩` traps and `z2` `Z`s in the `|0⟩` traps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Composition {
    pub d_x: usize,
    pub d_y: usize,
    pub d_z: usize,
    pub x1: usize,
    pub y: usize,
    pub z1: usize,
    pub x2: usize,
    pub z2: usize,
}

impl Composition {
    pub fn letter_counts(&self) -> LetterCounts {
        LetterCounts {
            x: self.d_x + self.x1 + self.x2,
            y: self.d_y + self.y,
            z: self.d_z + self.z1 + self.z2,
        }
    }

    pub fn message_weight(&self) -> usize {
        self.d_x + self.d_y + self.d_z + self.x1 + self.y + self.z1
    }

    pub fn validate(&self, n: usize, t: usize) -> Result<()> {
        let required = self.d_x + self.d_y + self.d_z;
        if required != t + 1 {
            return Err(QauthError::InvalidComposition(format!(
                "d_x + d_y + d_z = {required}, expected t + 1 = {}",
                t + 1
            )));
        }
        if self.message_weight() > n || self.x2 > n || self.z2 > n {
            return Err(QauthError::InvalidComposition(format!(
                "{self:?} does not fit blocks of {n} qubits"
            )));
        }
        Ok(())
    }

    /// Checks that the composition distributes exactly the letters of `p`.
    pub fn validate_for(&self, n: usize, t: usize, p: &PauliOperator) -> Result<()> {
        self.validate(n, t)?;
        if self.letter_counts() != LetterCounts::of(p) {
            return Err(QauthError::InvalidComposition(format!(
                "{:?} does not match the letters {:?} of {p}",
                self.letter_counts(),
                LetterCounts::of(p)
            )));
        }
        Ok(())
    }

    /// The compositions of `counts`, one per split of the `X`s and `Z`s
    /// between the message block and the traps. The required slots are
    /// filled with `Y`s first, then `X`s, then `Z`s.
    pub fn enumerate(counts: LetterCounts, n: usize, t: usize) -> Vec<Self> {
        let LetterCounts { x: a, y: b, z: c } = counts;
        let mut out = Vec::new();
        for x_msg in 0..=a {
            for z_msg in 0..=c {
                let msg = x_msg + b + z_msg;
                if msg <= t || msg > n || a - x_msg > n || c - z_msg > n {
                    continue;
                }
                let d_y = b.min(t + 1);
                let d_x = x_msg.min(t + 1 - d_y);
                let d_z = t + 1 - d_y - d_x;
                out.push(Self {
                    d_x,
                    d_y,
                    d_z,
                    x1: x_msg - d_x,
                    y: b - d_y,
                    z1: z_msg - d_z,
                    x2: a - x_msg,
                    z2: c - z_msg,
                });
            }
        }
        out
    }
}

/// The product formula for a composition,
/// `n!·n!·n!·(3n − w)! / ((n − t − 1 − x1 − y − z1)!·(n − x2)!·(n − z2)!)`
/// with `w` the weight of the Pauli. It counts the placements of the
/// letters once the split between message block and traps is fixed and the
/// letters of each kind are told apart by their destination block only.
pub fn eta_product(n: usize, t: usize, comp: &Composition) -> Result<u128> {
    comp.validate(n, t)?;
    let w = comp.letter_counts().weight();
    if w > 3 * n {
        return Err(QauthError::InvalidComposition(format!("weight {w} exceeds {}", 3 * n)));
    }
    product(&[
        falling(n, comp.message_weight()),
        falling(n, comp.x2),
        falling(n, comp.z2),
        factorial(3 * n - w),
    ])
}

/// Permutations realizing a composition: [`eta_product`] times the number
/// of ways to pick which `X` and `Z` positions of the Pauli go to the
/// message block, `C(x1 + d_x + x2, x2)·C(z1 + d_z + z2, z2)`.
pub fn eta_composition(n: usize, t: usize, comp: &Composition) -> Result<u128> {
    let counts = comp.letter_counts();
    product(&[
        Some(eta_product(n, t, comp)?),
        binomial(counts.x, comp.x2),
        binomial(counts.z, comp.z2),
    ])
}

/// `η_P` as the sum of [`eta_composition`] over the compositions of `P`.
pub fn eta_from_compositions(n: usize, t: usize, p: &PauliOperator) -> Result<u128> {
    if p.n() != 3 * n {
        return Err(QauthError::SizeMismatch {
            expected: 3 * n,
            actual: p.n(),
        });
    }
    Composition::enumerate(LetterCounts::of(p), n, t)
        .iter()
        .try_fold(0u128, |acc, c| {
            acc.checked_add(eta_composition(n, t, c)?).ok_or_else(overflow)
        })
}

/// `η_P` from letter counts alone, via the placement count of the
/// simulator closed form.
pub fn eta_from_placements(n: usize, t: usize, p: &PauliOperator) -> Result<u128> {
    accepting_placements(LetterCounts::of(p), n, t + 1, n)
}

/// `X^{⊗(t+1)}` on the first message qubits, identity elsewhere.
pub fn extremal_pauli(n: usize, t: usize) -> Result<PauliOperator> {
    let weight = t + 1;
    if weight > n {
        return Err(QauthError::Infeasible(format!("weight {weight} on {n} message qubits")));
    }
    PauliOperator::new(3 * n, (1u64 << weight) - 1, 0, 0)
}

/// Random Pauli on `qubits` qubits whose weight is uniform in
/// `0..=qubits`, with uniform support and letters.
pub fn random_pauli_uniform_weight<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<PauliOperator> {
    let weight = rng.random_range(0..=qubits);
    let support = rand::seq::index::sample(rng, qubits, weight);
    let mut letters = vec![PauliLetter::I; qubits];
    for q in support.iter() {
        letters[q] = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z][rng.random_range(0..3)];
    }
    PauliOperator::from_letters(&letters)
}

/// `max_P η_P / (3n)!` by brute force for each `t` in `ts`, with the
/// maximizing Pauli. `η_P` depends only on the letter counts of `P`, so
/// one Pauli per count triple is enumerated.
pub fn max_eta_ratio_bruteforce(n: usize, ts: &[usize]) -> Result<Vec<(f64, PauliOperator)>> {
    let m = 3 * n;
    let all = factorial(m).ok_or_else(overflow)? as f64;
    let mut best = vec![(0.0f64, PauliOperator::identity(m)); ts.len()];
    for a in 0..=m {
        for b in 0..=(m - a) {
            for c in 0..=(m - a - b) {
                let p = pauli_with_counts(m, LetterCounts { x: a, y: b, z: c })?;
                for (slot, eta) in best.iter_mut().zip(eta_bruteforce_multi(n, ts, &p)?) {
                    let ratio = eta as f64 / all;
                    if ratio > slot.0 {
                        *slot = (ratio, p);
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Letter counts maximizing `η_P` for the given `n` and `t`, by exact
/// counting over every count triple, with the maximal count. Ties go to
/// the first triple in `(x, y, z)` order.
pub fn worst_letter_profile(n: usize, t: usize) -> Result<(LetterCounts, u128)> {
    let m = 3 * n;
    let mut best = (LetterCounts { x: 0, y: 0, z: 0 }, 0u128);
    for x in 0..=m {
        for y in 0..=(m - x) {
            for z in 0..=(m - x - y) {
                let counts = LetterCounts { x, y, z };
                let eta = accepting_placements(counts, n, t + 1, n)?;
                if eta > best.1 {
                    best = (counts, eta);
                }
            }
        }
    }
    Ok(best)
}

/// A Pauli with the given letter counts: `X`s, then `Y`s, then `Z`s from
/// qubit 0, identity on the rest.
pub fn pauli_with_counts(qubits: usize, counts: LetterCounts) -> Result<PauliOperator> {
    if counts.weight() > qubits {
        return Err(QauthError::SizeMismatch {
            expected: qubits,
            actual: counts.weight(),
        });
    }
    let letters: Vec<PauliLetter> = std::iter::repeat_n(PauliLetter::X, counts.x)
        .chain(std::iter::repeat_n(PauliLetter::Y, counts.y))
        .chain(std::iter::repeat_n(PauliLetter::Z, counts.z))
        .chain(std::iter::repeat_n(PauliLetter::I, qubits - counts.weight()))
        .collect();
    PauliOperator::from_letters(&letters)
}

/// Outcome of [`bound_chain_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub n_max: usize,
    pub cases: usize,
    /// `(n, t)` pairs where an identity or inequality failed.
    pub failures: Vec<(usize, usize)>,
    /// Largest `3^{t+1}·bound/(3n)!` seen; at most one when the chain holds.
    pub max_normalized_ratio: f64,
}

/// For every `1 ≤ n ≤ n_max` and `t < n`, checks in exact integers that
/// `bound/(3n)! = ∏_{i=0}^{t} (n−t+i)/(3n−t+i)` and that each factor, hence
/// the product, is at most `1/3`.
pub fn bound_chain_check(n_max: usize) -> ChainCheck {
    let mut fact = vec![BigUint::from(1u32)];
    for i in 1..=(3 * n_max) {
        let next = &fact[i - 1] * BigUint::from(i);
        fact.push(next);
    }
    let mut failures = Vec::new();
    let mut cases = 0;
    let mut max_ratio = 0.0f64;
    for n in 1..=n_max {
        for t in 0..n {
            cases += 1;
            // C(n, t+1)(t+1)! = n!/(n−t−1)!
            let bound = &fact[n] / &fact[n - t - 1] * &fact[3 * n - t - 1];
            let mut num = BigUint::from(1u32);
            let mut den = BigUint::from(1u32);
            let mut factors_ok = true;
            for i in 0..=t {
                let (a, b) = (n - t + i, 3 * n - t + i);
                factors_ok &= 3 * a <= b;
                num *= BigUint::from(a);
                den *= BigUint::from(b);
            }
            let identity = &bound * &den == &fact[3 * n] * &num;
            let three = BigUint::from(3u32).pow(t as u32 + 1);
            let chain = &three * &num <= den;
            if !(identity && factors_ok && chain) {
                failures.push((n, t));
            }
            let ratio = (0..=t)
                .map(|i| 3.0 * (n - t + i) as f64 / (3 * n - t + i) as f64)
                .product::<f64>();
            max_ratio = max_ratio.max(ratio);
        }
    }
    ChainCheck {
        n_max,
        cases,
        failures,
        max_normalized_ratio: max_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::enumerate_paulis;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn single_flip_is_tight() {
        assert_eq!(eta_bruteforce(1, 0, &p("XII")).unwrap(), 2);
        assert_eq!(eta_bound(1, 0).unwrap(), 2);
        assert_eq!(eta_bruteforce(1, 0, &p("III")).unwrap(), 0);
        assert_eq!(eta_bound(1, 1).unwrap(), 0);
    }

    #[test]
    fn product_formula_drops_the_choice_of_moving_letters() {
        // Two X's, one of which must reach the single message slot.
        let comps = Composition::enumerate(LetterCounts::of(&p("XXI")), 1, 0);
        assert_eq!(comps.len(), 1);
        assert_eq!(eta_product(1, 0, &comps[0]).unwrap(), 1);
        assert_eq!(eta_composition(1, 0, &comps[0]).unwrap(), 2);
        assert_eq!(eta_bruteforce(1, 0, &p("XXI")).unwrap(), 2);
    }

    #[test]
    fn compositions_match_bruteforce_exhaustively() {
        for n in 1..=2 {
            for q in enumerate_paulis(3 * n).unwrap() {
                let brute = eta_bruteforce_multi(n, &[0, 1], &q).unwrap();
                for (t, b) in [0, 1].into_iter().zip(brute) {
                    assert_eq!(eta_from_compositions(n, t, &q).unwrap(), b as u128, "{q} t={t}");
                    assert_eq!(eta_from_placements(n, t, &q).unwrap(), b as u128);
                    if t == 0 {
                        assert!(b as u128 <= eta_bound(n, t).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn mixed_x_z_pauli_exceeds_the_extremal_count() {
        // One X and one Z in the message block, the others in their traps.
        let q = p("XXZZII");
        assert_eq!(eta_bruteforce(2, 1, &q).unwrap(), 80);
        assert_eq!(eta_bound(2, 1).unwrap(), 48);
        let (counts, eta) = worst_letter_profile(3, 1).unwrap();
        assert_eq!((counts, eta), (LetterCounts { x: 0, y: 0, z: 3 }, 43200));
        let q = pauli_with_counts(9, counts).unwrap();
        assert_eq!(eta_bruteforce(3, 1, &q).unwrap() as u128, eta);
        assert!(eta * 9 > 362880);
    }

    #[test]
    fn extremal_paulis_attain_the_bound() {
        for (n, t) in [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)] {
            let e = extremal_pauli(n, t).unwrap();
            assert_eq!(eta_from_compositions(n, t, &e).unwrap(), eta_bound(n, t).unwrap());
        }
        assert_eq!(eta_bruteforce(2, 1, &extremal_pauli(2, 1).unwrap()).unwrap(), 48);
        assert!(extremal_pauli(1, 1).is_err());
    }

    #[test]
    fn composition_validation() {
        let c = Composition {
            d_x: 1,
            d_y: 0,
            d_z: 0,
            x1: 0,
            y: 0,
            z1: 0,
            x2: 0,
            z2: 0,
        };
        assert!(c.validate(1, 0).is_ok());
        assert!(c.validate(1, 1).is_err());
        assert!(c.validate_for(1, 0, &p("XII")).is_ok());
        assert!(c.validate_for(1, 0, &p("ZII")).is_err());
        let big = Composition { x1: 1, ..c };
        assert!(matches!(
            eta_product(1, 0, &big),
            Err(QauthError::InvalidComposition(_))
        ));
    }

    #[test]
    fn chain_holds_with_equality_at_t0() {
        let check = bound_chain_check(50);
        assert!(check.failures.is_empty());
        assert_eq!(check.cases, 50 * 51 / 2);
        assert!((check.max_normalized_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_ratio_maximum() {
        let best = max_eta_ratio_bruteforce(1, &[0]).unwrap();
        assert!((best[0].0 - 1.0 / 3.0).abs() < 1e-15);
        let best = max_eta_ratio_bruteforce(2, &[0, 1]).unwrap();
        assert!((best[0].0 - 1.0 / 3.0).abs() < 1e-15);
        assert!((best[1].0 - 80.0 / 720.0).abs() < 1e-15);
    }

    #[test]
    fn worst_profiles() {
        assert_eq!(worst_letter_profile(1, 0).unwrap().1, 2);
        let (counts, eta) = worst_letter_profile(5, 1).unwrap();
        assert_eq!(counts, LetterCounts { x: 0, y: 0, z: 3 });
        let q = pauli_with_counts(15, counts).unwrap();
        assert_eq!(q.to_string(), "ZZZIIIIIIIIIIII");
        assert_eq!(eta_from_compositions(5, 1, &q).unwrap(), eta);
    }

    #[test]
    fn limits() {
        assert!(eta_bruteforce(4, 0, &PauliOperator::identity(12)).is_err());
        assert!(eta_bruteforce(1, 0, &PauliOperator::identity(4)).is_err());
    }

    proptest! {
        #[test]
        fn random_weighted_paulis_are_well_formed(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = random_pauli_uniform_weight(9, &mut rng).unwrap();
            prop_assert_eq!(q.n(), 9);
            prop_assert_eq!(q.phase_exp(), 0);
        }

        #[test]
        fn compositions_partition_the_letters(a in 0usize..4, b in 0usize..4, c in 0usize..4, t in 0usize..2) {
            let counts = LetterCounts { x: a, y: b, z: c };
            for comp in Composition::enumerate(counts, 3, t) {
                prop_assert_eq!(comp.letter_counts(), counts);
                prop_assert!(comp.validate(3, t).is_ok());
            }
        }
    }
}
