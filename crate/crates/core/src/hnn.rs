//! Ascending HNN extensions of free groups: normal forms, the word problem,
//! Magnus rewriting of `⟨a, t | tⁿat⁻ⁿ = w(a)⟩` presentations, homomorphism
//! verification, and a sufficient abelianization criterion for "no power of
//! φ is inner".
//!
//! For an injective endomorphism `φ` of the free group on the base alphabet,
//! the extension is `⟨base, t | t·g·t⁻¹ = φ(g)⟩`. Every element can be put
//! in the form `t⁻ᵖ · w · tᵠ` with `p, q ≥ 0` and `w` in the base group; the
//! form is reduced once `p` and `q` are not both positive while `w` lies in
//! the image of `φ`, and then it is unique for the element. Preimages under
//! `φ` are computed constructively through the folded Stallings graph of the
//! image subgroup.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::subgroups::{is_injective, SubgroupError, SubgroupGraph};
use crate::words::{Alphabet, Endomorphism, FreeWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HnnError {
    #[error("endomorphism is not injective (image subgroup has rank below the alphabet size)")]
    NotInjective,
    #[error("stable letter `{0}` collides with a base generator")]
    StableLetterClash(String),
    #[error("word over {{{0}}} does not belong to this presentation (expected {{{1}}})")]
    UnknownLetters(String, String),
    #[error("one-relator rewriting needs a single-generator base, got {0} generators")]
    BaseNotCyclic(usize),
    #[error("expected {expected} generator images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
}

/// The reduced form `t⁻ᵖ · word · tᵠ` of an element, with `p, q ≥ 0` and
/// `word` over the base alphabet. When `p` and `q` are both positive the
/// word is not in the image of `φ`.
#[derive(Clone, PartialEq, Eq)]
pub struct HnnNormalForm {
    pub p: u64,
    pub word: FreeWord,
    pub q: u64,
}

impl fmt::Display for HnnNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.p > 0 {
            parts.push(format!("t^-{}", self.p));
        }
        if !self.word.is_identity() || (self.p == 0 && self.q == 0) {
            parts.push(self.word.to_string());
        }
        if self.q > 0 {
            parts.push(if self.q == 1 { "t".to_string() } else { format!("t^{}", self.q) });
        }
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for HnnNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HnnNormalForm({self})")
    }
}

/// Outcome of the abelianization check for inner powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerPowerCheck {
    /// No power of the endomorphism is an inner automorphism.
    NoPowerInner,
    /// The criterion does not decide.
    Inconclusive,
}

/// An ascending HNN extension of a free group of finite rank.
pub struct HnnPresentation {
    base: Alphabet,
    stable: String,
    full: Alphabet,
    stable_index: usize,
    phi: Endomorphism,
    image_graph: SubgroupGraph,
}

impl HnnPresentation {
    pub fn new(phi: Endomorphism, stable: &str) -> Result<Self, HnnError> {
        let base = phi.alphabet().clone();
        if base.index(stable).is_some() {
            return Err(HnnError::StableLetterClash(stable.to_string()));
        }
        if !is_injective(&phi) {
            return Err(HnnError::NotInjective);
        }
        let full = base.extend([stable])?;
        // Image subgroup generators named by the base alphabet, so that
        // `express` directly computes preimages under phi.
        let image_graph = SubgroupGraph::build_named(&base, phi.images(), base.clone())?;
        Ok(HnnPresentation {
            stable_index: base.size(),
            base,
            stable: stable.to_string(),
            full,
            phi,
            image_graph,
        })
    }

    pub fn base_alphabet(&self) -> &Alphabet {
        &self.base
    }

    /// Base generators plus the stable letter (last).
    pub fn full_alphabet(&self) -> &Alphabet {
        &self.full
    }

    pub fn stable_letter(&self) -> &str {
        &self.stable
    }

    pub fn endomorphism(&self) -> &Endomorphism {
        &self.phi
    }

    /// Parse a word over the base generators and the stable letter
    /// (extended grammar).
    pub fn parse_word(&self, text: &str) -> Result<FreeWord, crate::error::ParseError> {
        self.full.parse_extended(text)
    }

    /// Left-to-right scan maintaining the prefix invariant
    /// `t⁻ᵖ · w · tᵠ`: a base letter `g` multiplies `φᵠ(g)` into `w`, a
    /// stable letter raises `q`, and a stable inverse either lowers `q` or
    /// (at `q = 0`) applies `φ` to `w` and raises `p`. A final pass strips
    /// `t⁻¹ … t` pairs while `w` stays in the image of `φ`.
    pub fn normal_form(&self, u: &FreeWord) -> Result<HnnNormalForm, HnnError> {
        if u.alphabet() != &self.full {
            return Err(HnnError::UnknownLetters(u.alphabet().to_string(), self.full.to_string()));
        }
        let mut p: u64 = 0;
        let mut q: u64 = 0;
        let mut word = self.base.identity();
        // powers[j][i] = φ^j applied to base generator i
        let mut powers: Vec<Vec<FreeWord>> =
            vec![(0..self.base.size()).map(|i| self.base.generator(i)).collect()];
        for &(g, e) in u.syllables() {
            if g == self.stable_index {
                if e > 0 {
                    q += e as u64;
                } else {
                    let mut k = e.unsigned_abs();
                    let drop = k.min(q);
                    q -= drop;
                    k -= drop;
                    for _ in 0..k {
                        word = self.phi.apply(&word)?;
                        p += 1;
                    }
                }
            } else {
                while powers.len() <= q as usize {
                    let prev = powers.last().expect("seeded with identity row");
                    let next =
                        prev.iter().map(|w| self.phi.apply(w)).collect::<Result<Vec<_>, _>>()?;
                    powers.push(next);
                }
                word = word.multiply(&powers[q as usize][g].pow(e))?;
            }
        }
        while p > 0 && q > 0 && self.image_graph.contains(&word) {
            word = self.image_graph.express(&word)?;
            p -= 1;
            q -= 1;
        }
        Ok(HnnNormalForm { p, word, q })
    }

    /// The word problem: two words are equal in the group iff their normal
    /// forms agree componentwise.
    pub fn equal(&self, u: &FreeWord, v: &FreeWord) -> Result<bool, HnnError> {
        Ok(self.normal_form(u)? == self.normal_form(v)?)
    }

    /// Lift a base word into the full alphabet.
    pub fn lift(&self, w: &FreeWord) -> Result<FreeWord, HnnError> {
        Ok(w.embed_by_name(&self.full)?)
    }

    /// The defining relators `t·g·t⁻¹·φ(g)⁻¹`, one per base generator, over
    /// the full alphabet.
    pub fn relators(&self) -> Vec<FreeWord> {
        let t = self.full.generator(self.stable_index);
        (0..self.base.size())
            .map(|i| {
                let g = self.full.generator(i);
                let image = self
                    .phi
                    .image(i)
                    .embed_by_name(&self.full)
                    .expect("base embeds in the full alphabet");
                t.mul_unchecked(&g).mul_unchecked(&t.invert()).mul_unchecked(&image.invert())
            })
            .collect()
    }
}

impl fmt::Debug for HnnPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HnnPresentation(gens: {}; stable: {}; phi: {})", self.base, self.stable, self.phi)
    }
}

/// Rewrite the one-relator presentation `⟨a, t | tⁿ·a·t⁻ⁿ = w(a)⟩` as an
/// ascending HNN extension of the free group on `b₀, …, b_{n−1}` (standing
/// for `tⁱat⁻ⁱ`), with `φ: bᵢ ↦ b_{i+1}` and `b_{n−1} ↦ w(b₀)`. For `n = 1`
/// the original generator name is kept.
pub fn magnus_rewrite(n: u32, w: &FreeWord) -> Result<HnnPresentation, HnnError> {
    if w.alphabet().size() != 1 {
        return Err(HnnError::BaseNotCyclic(w.alphabet().size()));
    }
    assert!(n >= 1, "exponent n must be at least 1");
    let base = if n == 1 {
        w.alphabet().clone()
    } else {
        Alphabet::new((0..n).map(|i| format!("b{i}")))?
    };
    let relator_image = w.substitute(&base, &[base.generator(0)])?;
    let images: Vec<FreeWord> = (0..n as usize)
        .map(|i| if i + 1 < n as usize { base.generator(i + 1) } else { relator_image.clone() })
        .collect();
    let phi = Endomorphism::new(base, images)?;
    HnnPresentation::new(phi, "t")
}

/// Check that generator images define a homomorphism from a finitely
/// presented group into an ascending HNN extension: every relator, with
/// images substituted, must equal the identity in the target.
pub fn check_homomorphism(
    source_alphabet: &Alphabet,
    relators: &[FreeWord],
    target: &HnnPresentation,
    images: &[FreeWord],
) -> Result<bool, HnnError> {
    if images.len() != source_alphabet.size() {
        return Err(HnnError::ImageCount { expected: source_alphabet.size(), got: images.len() });
    }
    let identity = target.full_alphabet().identity();
    for relator in relators {
        let mapped = relator.substitute(target.full_alphabet(), images)?;
        if !target.equal(&mapped, &identity)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sufficient criterion for "no power of φ is inner": inner automorphisms
/// act trivially on the abelianization, so if the abelianization matrix of
/// `φ` has determinant outside `{1, −1}` no power of `φ` can be inner.
/// Never answers "some power is inner".
pub fn no_power_inner_sufficient(phi: &Endomorphism) -> InnerPowerCheck {
    let k = phi.alphabet().size();
    let matrix: Vec<Vec<BigInt>> = (0..k)
        .map(|i| (0..k).map(|j| BigInt::from(phi.image(j).exponent_sum(i))).collect())
        .collect();
    let det = determinant(&matrix);
    if det.abs().is_one() {
        InnerPowerCheck::Inconclusive
    } else {
        InnerPowerCheck::NoPowerInner
    }
}

fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = BigInt::zero();
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| {
                row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect()
            })
            .collect();
        let cofactor = entry * determinant(&minor);
        if j % 2 == 0 {
            det += cofactor;
        } else {
            det -= cofactor;
        }
    }
    det
}
