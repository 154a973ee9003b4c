//! Finite-quotient witnesses: given a finite presentation and a nontrivial
//! word, search small finite groups for a homomorphism under which every
//! relator dies and the word survives. Each returned assignment is a
//! per-element certificate that the group does not collapse the word — the
//! computational face of residual finiteness.
//!
//! Two target families are searched: the affine groups `x ↦ αx + β` over
//! `ℤ/m` (the natural quotients for one-relator groups whose stable letter
//! acts by multiplication) and the symmetric groups as a generic fallback.
//! Enumeration order is fixed, so searches are reproducible and the returned
//! witness is the minimum under the documented total order.

use std::fmt;

use thiserror::Error;

use crate::presentations::FinitePresentation;
use crate::words::FreeWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("target word is trivial; only nontrivial elements can be separated")]
    TrivialTarget,
    #[error("word over {{{0}}} does not match the presentation alphabet {{{1}}}")]
    AlphabetMismatch(String, String),
    #[error("generator `{0}` has no assigned image")]
    Unassigned(String),
}

/// The finite group a witness lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum WitnessTarget {
    /// Invertible affine maps `x ↦ αx + β` on `ℤ/m`; order `m·φ(m)`.
    Affine(u64),
    /// The symmetric group on `n` points; order `n!`.
    Sym(usize),
}

impl fmt::Display for WitnessTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessTarget::Affine(m) => write!(f, "Affine({m})"),
            WitnessTarget::Sym(n) => write!(f, "Sym({n})"),
        }
    }
}

impl WitnessTarget {
    pub fn order(&self) -> u128 {
        match self {
            WitnessTarget::Affine(m) => (*m as u128) * (euler_phi(*m) as u128),
            WitnessTarget::Sym(n) => (1..=*n as u128).product(),
        }
    }
}

/// A single element of a witness target.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupElem {
    /// `(α, β)` acting as `x ↦ αx + β`.
    Affine { mul: u64, add: u64 },
    /// One-line notation on `0..n`.
    Perm(Vec<usize>),
}

impl GroupElem {
    fn is_identity(&self) -> bool {
        match self {
            GroupElem::Affine { mul, add } => *mul == 1 && *add == 0,
            GroupElem::Perm(p) => p.iter().enumerate().all(|(i, &v)| i == v),
        }
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Affine { mul, add } => write!(f, "({mul},{add})"),
            GroupElem::Perm(p) => {
                if self.is_identity() {
                    return write!(f, "id");
                }
                let mut seen = vec![false; p.len()];
                for start in 0..p.len() {
                    if seen[start] || p[start] == start {
                        continue;
                    }
                    write!(f, "(")?;
                    let mut cur = start;
                    let mut first = true;
                    while !seen[cur] {
                        seen[cur] = true;
                        if !first {
                            write!(f, " ")?;
                        }
                        first = false;
                        write!(f, "{}", cur + 1)?;
                        cur = p[cur];
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// A homomorphism into a finite target, given by one image per generator of
/// the presentation's alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAssignment {
    pub target: WitnessTarget,
    images: Vec<GroupElem>,
    pres: FinitePresentation,
}

impl FiniteAssignment {
    pub fn images(&self) -> &[GroupElem] {
        &self.images
    }

    pub fn image(&self, gen: usize) -> &GroupElem {
        &self.images[gen]
    }

    fn identity(&self) -> GroupElem {
        match self.target {
            WitnessTarget::Affine(_) => GroupElem::Affine { mul: 1, add: 0 },
            WitnessTarget::Sym(n) => GroupElem::Perm((0..n).collect()),
        }
    }

    fn compose(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        match (self.target, a, b) {
            (WitnessTarget::Affine(m), GroupElem::Affine { mul: a1, add: b1 }, GroupElem::Affine { mul: a2, add: b2 }) => {
                GroupElem::Affine { mul: (a1 * a2) % m, add: (a1 * b2 + b1) % m }
            }
            (WitnessTarget::Sym(_), GroupElem::Perm(p), GroupElem::Perm(q)) => {
                GroupElem::Perm(q.iter().map(|&i| p[i]).collect())
            }
            _ => unreachable!("assignment images always match the target"),
        }
    }

    fn invert(&self, a: &GroupElem) -> GroupElem {
        match (self.target, a) {
            (WitnessTarget::Affine(m), GroupElem::Affine { mul, add }) => {
                let inv = mod_inverse(*mul, m).expect("affine multiplier is a unit");
                GroupElem::Affine { mul: inv, add: (m - (inv * add) % m) % m }
            }
            (WitnessTarget::Sym(_), GroupElem::Perm(p)) => {
                let mut out = vec![0; p.len()];
                for (i, &v) in p.iter().enumerate() {
                    out[v] = i;
                }
                GroupElem::Perm(out)
            }
            _ => unreachable!("assignment images always match the target"),
        }
    }

    /// Evaluate a word under the assignment (group product of the images).
    pub fn evaluate(&self, word: &FreeWord) -> Result<GroupElem, QuotientError> {
        if word.alphabet() != &self.pres.alphabet {
            return Err(QuotientError::AlphabetMismatch(
                word.alphabet().to_string(),
                self.pres.alphabet.to_string(),
            ));
        }
        let mut acc = self.identity();
        for (g, inverted) in word.letters() {
            let img = self.images.get(g).ok_or_else(|| {
                QuotientError::Unassigned(word.alphabet().name(g).to_string())
            })?;
            let step = if inverted { self.invert(img) } else { img.clone() };
            acc = self.compose(&acc, &step);
        }
        Ok(acc)
    }

    /// Re-verify the witness from scratch: all relators must evaluate to the
    /// identity and the target word must not.
    pub fn verify(&self, target_word: &FreeWord) -> bool {
        let relators_die = self
            .pres
            .relators
            .iter()
            .all(|r| self.evaluate(r).map(|e| e.is_identity()).unwrap_or(false));
        let word_survives =
            self.evaluate(target_word).map(|e| !e.is_identity()).unwrap_or(false);
        relators_die && word_survives
    }
}

impl fmt::Display for FiniteAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.target)?;
        let mut first = true;
        for (i, img) in self.images.iter().enumerate() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{}={}", self.pres.alphabet.name(i), img)?;
        }
        Ok(())
    }
}

/// Evaluate a relator under an assignment; exposed for report tooling.
pub fn evaluate_relator(
    assignment: &FiniteAssignment,
    relator: &FreeWord,
) -> Result<GroupElem, QuotientError> {
    assignment.evaluate(relator)
}

fn check_target(pres: &FinitePresentation, word: &FreeWord) -> Result<(), QuotientError> {
    if word.is_identity() {
        return Err(QuotientError::TrivialTarget);
    }
    if word.alphabet() != &pres.alphabet {
        return Err(QuotientError::AlphabetMismatch(
            word.alphabet().to_string(),
            pres.alphabet.to_string(),
        ));
    }
    Ok(())
}

/// Search `Affine(m)` for `m = 2..=m_max`, generators enumerated in
/// lexicographic `(α, β)` order (α over the units of `ℤ/m` ascending), and
/// return the first assignment killing all relators while the target word
/// survives.
pub fn affine_witness(
    pres: &FinitePresentation,
    target_word: &FreeWord,
    m_max: u64,
) -> Result<Option<FiniteAssignment>, QuotientError> {
    check_target(pres, target_word)?;
    for m in 2..=m_max {
        if let Some(found) = affine_witness_in(pres, target_word, m)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// The single-modulus unit of the affine search; the partitionable piece of
/// the contract. Deterministic for a fixed `m`.
pub fn affine_witness_in(
    pres: &FinitePresentation,
    target_word: &FreeWord,
    m: u64,
) -> Result<Option<FiniteAssignment>, QuotientError> {
    check_target(pres, target_word)?;
    let elements: Vec<GroupElem> = (1..m)
        .filter(|a| gcd(*a, m) == 1)
        .flat_map(|mul| (0..m).map(move |add| GroupElem::Affine { mul, add }))
        .collect();
    let k = pres.alphabet.size();
    let mut indices = vec![0usize; k];
    loop {
        let images: Vec<GroupElem> = indices.iter().map(|&i| elements[i].clone()).collect();
        let assignment = FiniteAssignment {
            target: WitnessTarget::Affine(m),
            images,
            pres: pres.clone(),
        };
        if assignment.verify(target_word) {
            return Ok(Some(assignment));
        }
        // odometer over element indices, most significant digit first
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < elements.len() {
                break;
            }
            indices[pos] = 0;
        }
    }
}

/// Search `Sym(n)` for `n = 2..=n_max`. By conjugation invariance the first
/// generator only ranges over one representative per cycle type; remaining
/// generators range over all of `Sym(n)` in lexicographic one-line order.
/// Relators whose support is already assigned prune the search.
pub fn perm_witness(
    pres: &FinitePresentation,
    target_word: &FreeWord,
    n_max: usize,
) -> Result<Option<FiniteAssignment>, QuotientError> {
    check_target(pres, target_word)?;
    for n in 2..=n_max {
        if let Some(found) = perm_witness_in(pres, target_word, n)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// The single-degree unit of the symmetric-group search.
pub fn perm_witness_in(
    pres: &FinitePresentation,
    target_word: &FreeWord,
    n: usize,
) -> Result<Option<FiniteAssignment>, QuotientError> {
    check_target(pres, target_word)?;
    let k = pres.alphabet.size();
    let class_reps: Vec<GroupElem> =
        partitions(n).into_iter().map(|p| GroupElem::Perm(partition_representative(n, &p))).collect();
    let all: Vec<GroupElem> = permutations_lex(n).into_iter().map(GroupElem::Perm).collect();

    // relators checkable once generators 0..=i are assigned
    let support_bound = |relator: &FreeWord| -> usize {
        relator.syllables().iter().map(|&(g, _)| g).max().unwrap_or(0)
    };
    let mut images: Vec<GroupElem> = Vec::with_capacity(k);
    search_perm(
        pres,
        target_word,
        n,
        &class_reps,
        &all,
        &support_bound,
        &mut images,
    )
}

fn search_perm(
    pres: &FinitePresentation,
    target_word: &FreeWord,
    n: usize,
    class_reps: &[GroupElem],
    all: &[GroupElem],
    support_bound: &dyn Fn(&FreeWord) -> usize,
    images: &mut Vec<GroupElem>,
) -> Result<Option<FiniteAssignment>, QuotientError> {
    let k = pres.alphabet.size();
    if images.len() == k {
        let assignment = FiniteAssignment {
            target: WitnessTarget::Sym(n),
            images: images.clone(),
            pres: pres.clone(),
        };
        return Ok(if assignment.verify(target_word) { Some(assignment) } else { None });
    }
    let depth = images.len();
    let pool = if depth == 0 { class_reps } else { all };
    for candidate in pool {
        images.push(candidate.clone());
        // prune on relators fully supported by the assigned prefix
        let partial = FiniteAssignment {
            target: WitnessTarget::Sym(n),
            images: images.clone(),
            pres: pres.clone(),
        };
        let viable = pres
            .relators
            .iter()
            .filter(|r| !r.is_identity() && support_bound(r) < images.len())
            .all(|r| partial.evaluate(r).map(|e| e.is_identity()).unwrap_or(false));
        if viable {
            if let Some(found) =
                search_perm(pres, target_word, n, class_reps, all, support_bound, images)?
            {
                images.pop();
                return Ok(Some(found));
            }
        }
        images.pop();
    }
    Ok(None)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn euler_phi(m: u64) -> u64 {
    (1..=m).filter(|&a| gcd(a, m) == 1).count() as u64
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(((t % m as i128 + m as i128) % m as i128) as u64)
}

/// All permutations of `0..n` in lexicographic one-line order.
fn permutations_lex(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Partitions of `n` as non-increasing part lists, ascending
/// lexicographically (`[1,1,…]` first, `[n]` last).
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in 1..=max.min(n) {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    go(n, n, &mut prefix, &mut out);
    out.sort();
    out
}

/// Canonical representative of a cycle type: cycles on consecutive points.
fn partition_representative(n: usize, parts: &[usize]) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut start = 0;
    for &len in parts {
        for i in 0..len {
            p[start + i] = start + (i + 1) % len;
        }
        start += len;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn one_relator_pres() -> (FinitePresentation, FreeWord) {
        // ⟨a, t | t² a t⁻² a⁻²⟩
        let at = Alphabet::new(["a", "t"]).unwrap();
        let relator = at.parse("t^2 a t^-2 a^-2").unwrap();
        let pres = FinitePresentation::new(at.clone(), vec![relator]);
        let a = at.generator(0);
        (pres, a)
    }

    #[test]
    fn affine_example_from_search() {
        let (pres, a) = one_relator_pres();
        let witness = affine_witness(&pres, &a, 7).unwrap().expect("witness exists at m = 7");
        assert_eq!(witness.target, WitnessTarget::Affine(7));
        assert_eq!(witness.to_string(), "Affine(7): a=(1,1), t=(3,0)");
        assert_eq!(witness.target.order(), 42);
        assert!(witness.verify(&a));
        // no witness below 7
        assert!(affine_witness(&pres, &a, 2).unwrap().is_none());
        assert!(affine_witness(&pres, &a, 6).unwrap().is_none());
    }

    #[test]
    fn affine_relator_evaluation() {
        let (pres, a) = one_relator_pres();
        let witness = affine_witness(&pres, &a, 7).unwrap().unwrap();
        let value = evaluate_relator(&witness, &pres.relators[0]).unwrap();
        assert!(value.is_identity());
        let empty = pres.alphabet.identity();
        assert!(evaluate_relator(&witness, &empty).unwrap().is_identity());
        assert_eq!(
            witness.evaluate(&a).unwrap(),
            GroupElem::Affine { mul: 1, add: 1 }
        );
    }

    #[test]
    fn trivial_target_is_rejected() {
        let (pres, _) = one_relator_pres();
        let empty = pres.alphabet.identity();
        assert!(matches!(affine_witness(&pres, &empty, 7), Err(QuotientError::TrivialTarget)));
        assert!(matches!(perm_witness(&pres, &empty, 3), Err(QuotientError::TrivialTarget)));
    }

    #[test]
    fn perm_small_examples() {
        // ⟨a | a²⟩, separate a in Sym(2)
        let a_only = Alphabet::new(["a"]).unwrap();
        let pres = FinitePresentation::new(a_only.clone(), vec![a_only.parse("a^2").unwrap()]);
        let witness = perm_witness(&pres, &a_only.generator(0), 2).unwrap().unwrap();
        assert_eq!(witness.to_string(), "Sym(2): a=(1 2)");

        // a transposition in Sym(3) kills the relator a²
        let transposition = FiniteAssignment {
            target: WitnessTarget::Sym(3),
            images: vec![GroupElem::Perm(vec![1, 0, 2])],
            pres: pres.clone(),
        };
        assert!(evaluate_relator(&transposition, &pres.relators[0]).unwrap().is_identity());

        // free abelian ⟨a, t | [t, a]⟩, separate a in Sym(2)
        let at = Alphabet::new(["a", "t"]).unwrap();
        let pres =
            FinitePresentation::new(at.clone(), vec![at.parse("t a t^-1 a^-1").unwrap()]);
        let witness = perm_witness(&pres, &at.generator(0), 2).unwrap().unwrap();
        assert_eq!(witness.to_string(), "Sym(2): a=(1 2), t=id");
    }

    #[test]
    fn perm_witness_for_the_one_relator_group() {
        let (pres, a) = one_relator_pres();
        let witness = perm_witness(&pres, &a, 7).unwrap().expect("witness exists by n = 7");
        assert!(witness.verify(&a));
        assert!(matches!(witness.target, WitnessTarget::Sym(n) if n <= 7));
    }

    #[test]
    fn searches_are_deterministic_and_partitionable() {
        let (pres, a) = one_relator_pres();
        let direct = affine_witness(&pres, &a, 9).unwrap();
        let again = affine_witness(&pres, &a, 9).unwrap();
        assert_eq!(direct, again);
        // simulate partitioned execution: per-modulus workers, merged by
        // smallest modulus
        let merged = (2..=9)
            .filter_map(|m| affine_witness_in(&pres, &a, m).unwrap())
            .next();
        assert_eq!(direct, merged);
    }

    #[test]
    fn class_restriction_matches_full_search() {
        // on small degrees, restricting the first generator to class
        // representatives finds a witness iff the full search does
        let at = Alphabet::new(["a", "t"]).unwrap();
        let presentations = [
            FinitePresentation::new(at.clone(), vec![at.parse("t a t^-1 a^-1").unwrap()]),
            FinitePresentation::new(at.clone(), vec![at.parse("a^2").unwrap()]),
            FinitePresentation::new(at.clone(), vec![at.parse("t a t^-1 a^-2").unwrap()]),
        ];
        for pres in &presentations {
            for n in 2..=4 {
                let restricted = perm_witness_in(pres, &at.generator(0), n).unwrap();
                let full = full_perm_search(pres, &at.generator(0), n);
                assert_eq!(restricted.is_some(), full.is_some(), "degree {n}");
                if let Some(r) = &restricted {
                    assert!(r.verify(&at.generator(0)));
                }
            }
        }
    }

    fn full_perm_search(
        pres: &FinitePresentation,
        word: &FreeWord,
        n: usize,
    ) -> Option<FiniteAssignment> {
        let all: Vec<GroupElem> = permutations_lex(n).into_iter().map(GroupElem::Perm).collect();
        let k = pres.alphabet.size();
        let mut indices = vec![0usize; k];
        loop {
            let images: Vec<GroupElem> = indices.iter().map(|&i| all[i].clone()).collect();
            let assignment =
                FiniteAssignment { target: WitnessTarget::Sym(n), images, pres: pres.clone() };
            if assignment.verify(word) {
                return Some(assignment);
            }
            let mut pos = k;
            loop {
                if pos == 0 {
                    return None;
                }
                pos -= 1;
                indices[pos] += 1;
                if indices[pos] < all.len() {
                    break;
                }
                indices[pos] = 0;
            }
        }
    }

    #[test]
    fn partition_enumeration_is_canonical() {
        assert_eq!(
            partitions(4),
            vec![vec![1, 1, 1, 1], vec![2, 1, 1], vec![2, 2], vec![3, 1], vec![4]]
        );
        let rep = partition_representative(4, &[2, 2]);
        assert_eq!(GroupElem::Perm(rep).to_string(), "(1 2)(3 4)");
    }
}
