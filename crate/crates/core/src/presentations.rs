//! Finite presentations and the plain-text presentation format.
//!
//! Two file shapes are accepted, line-oriented, with `#` comments:
//!
//! ```text
//! gens: a b
//! stable: t            # optional, defaults to t
//! phi: a -> b ; b -> a^2
//! ```
//!
//! gives an ascending HNN extension directly, while
//!
//! ```text
//! gens: a t
//! rel: t^2 a t^-2 = a^2
//! ```
//!
//! is a one-relator presentation; when the relation has the shape
//! `tⁿ·a·t⁻ⁿ = w(a)` it can be rewritten into HNN form. Several `rel:`
//! lines (with or without an `=` sign) describe a general finite
//! presentation, which is what the quotient searches consume.

use std::fmt;

use crate::error::ParseError;
use crate::hnn::{magnus_rewrite, HnnError, HnnPresentation};
use crate::words::{Alphabet, Endomorphism, FreeWord};

/// A finite presentation: generators plus relator words.
#[derive(Clone, PartialEq, Eq)]
pub struct FinitePresentation {
    pub alphabet: Alphabet,
    pub relators: Vec<FreeWord>,
}

impl FinitePresentation {
    pub fn new(alphabet: Alphabet, relators: Vec<FreeWord>) -> Self {
        for r in &relators {
            assert!(r.alphabet() == &alphabet, "relator over a different alphabet");
        }
        FinitePresentation { alphabet, relators }
    }
}

impl fmt::Debug for FinitePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{} | ", self.alphabet)?;
        let rs: Vec<String> = self.relators.iter().map(|r| r.to_string()).collect();
        write!(f, "{}⟩", rs.join(", "))
    }
}

/// Parsed form of a presentation file, before committing to a view.
#[derive(Clone, Debug)]
pub struct PresentationText {
    alphabet: Alphabet,
    stable: Option<String>,
    phi_images: Option<Vec<FreeWord>>,
    relations: Vec<(FreeWord, FreeWord)>,
}

impl PresentationText {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut alphabet: Option<Alphabet> = None;
        let mut stable: Option<String> = None;
        let mut phi_images: Option<Vec<FreeWord>> = None;
        let mut relations: Vec<(FreeWord, FreeWord)> = Vec::new();
        let mut offset = 0usize;
        for line in text.split_inclusive('\n') {
            let line_start = offset;
            offset += line.len();
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, rest)) = content.split_once(':') else {
                return Err(ParseError::new(line_start, "expected `key: value`"));
            };
            let rest = rest.trim();
            match key.trim() {
                "gens" => {
                    let names: Vec<&str> = rest.split_whitespace().collect();
                    alphabet = Some(Alphabet::new(names).map_err(|e| {
                        ParseError::new(line_start, format!("invalid generator list: {e}"))
                    })?);
                }
                "stable" => {
                    stable = Some(rest.to_string());
                }
                "phi" => {
                    let alphabet = alphabet.as_ref().ok_or_else(|| {
                        ParseError::new(line_start, "`gens:` must come before `phi:`")
                    })?;
                    phi_images = Some(parse_phi_spec(alphabet, rest)?);
                }
                "rel" => {
                    let alphabet = alphabet.as_ref().ok_or_else(|| {
                        ParseError::new(line_start, "`gens:` must come before `rel:`")
                    })?;
                    let (lhs, rhs) = match rest.split_once('=') {
                        Some((l, r)) => {
                            (alphabet.parse_extended(l)?, alphabet.parse_extended(r)?)
                        }
                        None => (alphabet.parse_extended(rest)?, alphabet.identity()),
                    };
                    relations.push((lhs, rhs));
                }
                other => {
                    return Err(ParseError::new(
                        line_start,
                        format!("unknown directive `{other}:`"),
                    ));
                }
            }
        }
        let alphabet =
            alphabet.ok_or_else(|| ParseError::new(0, "missing `gens:` line"))?;
        if phi_images.is_none() && relations.is_empty() {
            return Err(ParseError::new(0, "presentation needs a `phi:` or `rel:` line"));
        }
        if phi_images.is_some() && !relations.is_empty() {
            return Err(ParseError::new(0, "`phi:` and `rel:` lines cannot be mixed"));
        }
        Ok(PresentationText { alphabet, stable, phi_images, relations })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// View as an ascending HNN extension. Endomorphism files use the
    /// declared images; a single relation of the Magnus shape
    /// `tⁿ·a·t⁻ⁿ = w(a)` is rewritten.
    pub fn as_hnn(&self) -> Result<HnnPresentation, HnnError> {
        if let Some(images) = &self.phi_images {
            let phi = Endomorphism::new(self.alphabet.clone(), images.clone())?;
            let stable = self.stable.as_deref().unwrap_or("t");
            return HnnPresentation::new(phi, stable);
        }
        let [(lhs, rhs)] = self.relations.as_slice() else {
            return Err(HnnError::BaseNotCyclic(self.alphabet.size()));
        };
        let (n, base_gen, stable_gen) = magnus_shape(lhs).ok_or(HnnError::BaseNotCyclic(
            self.alphabet.size(),
        ))?;
        if let Some(declared) = &self.stable {
            if declared != self.alphabet.name(stable_gen) {
                return Err(HnnError::StableLetterClash(declared.clone()));
            }
        }
        let single = Alphabet::new([self.alphabet.name(base_gen)]).expect("valid name");
        if rhs.syllables().iter().any(|&(g, _)| g != base_gen) {
            return Err(HnnError::BaseNotCyclic(self.alphabet.size()));
        }
        let w = rhs.embed_by_name(&single)?;
        magnus_rewrite(n, &w)
    }

    /// View as a bare finite presentation. Endomorphism files contribute the
    /// defining relators `t·g·t⁻¹·φ(g)⁻¹`; relation files contribute
    /// `lhs·rhs⁻¹` per line.
    pub fn as_finite_presentation(&self) -> Result<FinitePresentation, HnnError> {
        if let Some(images) = &self.phi_images {
            let phi = Endomorphism::new(self.alphabet.clone(), images.clone())?;
            let stable = self.stable.as_deref().unwrap_or("t");
            let pres = HnnPresentation::new(phi, stable)?;
            let alphabet = pres.full_alphabet().clone();
            Ok(FinitePresentation::new(alphabet, pres.relators()))
        } else {
            let relators = self
                .relations
                .iter()
                .map(|(lhs, rhs)| lhs.multiply(&rhs.invert()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(FinitePresentation::new(self.alphabet.clone(), relators))
        }
    }
}

/// Parse `"a -> b ; b -> a^2"` into per-generator images (extended word
/// grammar, every generator exactly once).
pub fn parse_phi_spec(alphabet: &Alphabet, text: &str) -> Result<Vec<FreeWord>, ParseError> {
    let mut images: Vec<Option<FreeWord>> = vec![None; alphabet.size()];
    let mut offset = 0usize;
    for part in text.split(';') {
        let entry_start = offset;
        offset += part.len() + 1;
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (lhs, rhs) = part
            .split_once("->")
            .ok_or_else(|| ParseError::new(entry_start, "expected `gen -> word`"))?;
        let name = lhs.trim();
        let gen = alphabet
            .index(name)
            .ok_or_else(|| ParseError::new(entry_start, format!("unknown generator `{name}`")))?;
        if images[gen].is_some() {
            return Err(ParseError::new(entry_start, format!("duplicate image for `{name}`")));
        }
        images[gen] = Some(alphabet.parse_extended(rhs)?);
    }
    images
        .into_iter()
        .enumerate()
        .map(|(i, img)| {
            img.ok_or_else(|| {
                ParseError::new(0, format!("missing image for generator `{}`", alphabet.name(i)))
            })
        })
        .collect()
}

/// Recognize `sⁿ · g · s⁻ⁿ` with `s ≠ g` and `n ≥ 1`, returning
/// `(n, g, s)`.
fn magnus_shape(lhs: &FreeWord) -> Option<(u32, usize, usize)> {
    match *lhs.syllables() {
        [(s1, n), (g, 1), (s2, m)] if s1 == s2 && s1 != g && n >= 1 && m == -n => {
            Some((u32::try_from(n).ok()?, g, s1))
        }
        _ => None,
    }
}
