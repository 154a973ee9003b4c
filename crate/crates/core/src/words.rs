//! Free-group words over a finite generator alphabet.
//!
//! Words are stored in syllable (run-length) form: an ordered list of
//! `(generator, exponent)` pairs with nonzero exponents in which adjacent
//! syllables carry distinct generators. The empty list is the identity.
//! All operations return fresh, fully reduced values.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::error::ParseError;

/// Errors from word algebra and alphabet construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("alphabet mismatch: {{{0}}} vs {{{1}}}")]
    AlphabetMismatch(String, String),
    #[error("invalid generator name `{0}`")]
    BadGeneratorName(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("expected {expected} generator images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("alphabet must have at least one generator")]
    EmptyAlphabet,
}

fn valid_generator_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && name != "1"
}

/// An ordered finite set of named generators. Cheap to clone; equality is by
/// name sequence, so independently built alphabets with identical names are
/// interchangeable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alphabet(Arc<Vec<String>>);

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_generator_name(n) {
                return Err(WordError::BadGeneratorName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(WordError::DuplicateGenerator(n.clone()));
            }
        }
        Ok(Alphabet(Arc::new(names)))
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.0[idx]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// A new alphabet with extra generators appended.
    pub fn extend<'a>(&self, extra: impl IntoIterator<Item = &'a str>) -> Result<Self, WordError> {
        let names: Vec<String> =
            self.names().map(str::to_string).chain(extra.into_iter().map(str::to_string)).collect();
        Alphabet::new(names)
    }

    pub fn identity(&self) -> FreeWord {
        FreeWord { alphabet: self.clone(), syllables: Vec::new() }
    }

    /// The single-letter word for generator `idx`.
    pub fn generator(&self, idx: usize) -> FreeWord {
        self.word(&[(idx, 1)])
    }

    /// Reduce a raw syllable list into a word. Zero exponents are dropped,
    /// adjacent equal-generator syllables merge, cancellations cascade.
    pub fn word(&self, raw: &[(usize, i64)]) -> FreeWord {
        let mut stack: Vec<(usize, i64)> = Vec::with_capacity(raw.len());
        for &(g, e) in raw {
            assert!(g < self.size(), "generator index {g} out of range");
            push_syllable(&mut stack, g, e);
        }
        FreeWord { alphabet: self.clone(), syllables: stack }
    }

    /// Build a word from single letters `(generator, inverted)`.
    pub fn from_letters<I>(&self, letters: I) -> FreeWord
    where
        I: IntoIterator<Item = (usize, bool)>,
    {
        let raw: Vec<(usize, i64)> =
            letters.into_iter().map(|(g, inv)| (g, if inv { -1 } else { 1 })).collect();
        self.word(&raw)
    }

    /// Parse the plain word grammar:
    ///
    /// ```text
    /// word   := "1" | term { WS term } ;
    /// term   := ident [ "^" integer ] ;
    /// ```
    ///
    /// `"1"` denotes the identity and cannot be mixed with terms. Exponents
    /// are nonzero integers. The result round-trips with [`FreeWord`]'s
    /// `Display` implementation.
    pub fn parse(&self, text: &str) -> Result<FreeWord, ParseError> {
        let mut lx = Lexer::new(text);
        let mut syllables = Vec::new();
        lx.skip_ws();
        if lx.peek() == Some('1') {
            let pos = lx.pos;
            lx.bump();
            lx.skip_ws();
            if !lx.done() {
                return Err(ParseError::new(pos, "`1` denotes the identity and cannot be mixed with terms"));
            }
            return Ok(self.identity());
        }
        while !lx.done() {
            let pos = lx.pos;
            let ident = lx.ident()?;
            if ident == "1" {
                return Err(ParseError::new(pos, "`1` denotes the identity and cannot be mixed with terms"));
            }
            let idx = self
                .index(&ident)
                .ok_or_else(|| ParseError::new(pos, format!("unknown generator `{ident}`")))?;
            let exp = if lx.eat('^') { lx.nonzero_integer()? } else { 1 };
            syllables.push((idx, exp));
            lx.skip_ws();
        }
        if syllables.is_empty() {
            return Err(ParseError::new(0, "empty word (use `1` for the identity)"));
        }
        Ok(self.word(&syllables))
    }

    /// Parse the extended word grammar, which additionally allows
    /// parenthesized groups and commutator brackets:
    ///
    /// ```text
    /// word   := "1" | factor { WS factor } ;
    /// factor := atom [ "^" integer ] ;
    /// atom   := ident | "(" word ")" | "[" word "," word "]" ;
    /// ```
    pub fn parse_extended(&self, text: &str) -> Result<FreeWord, ParseError> {
        let mut lx = Lexer::new(text);
        lx.skip_ws();
        if lx.peek() == Some('1') {
            let pos = lx.pos;
            lx.bump();
            lx.skip_ws();
            if !lx.done() {
                return Err(ParseError::new(pos, "`1` denotes the identity and cannot be mixed with terms"));
            }
            return Ok(self.identity());
        }
        let w = self.parse_sequence(&mut lx, &[])?;
        if !lx.done() {
            return Err(ParseError::new(lx.pos, "unexpected trailing input"));
        }
        if w.is_identity() && text.trim() != "1" && text.trim().is_empty() {
            return Err(ParseError::new(0, "empty word (use `1` for the identity)"));
        }
        Ok(w)
    }

    fn parse_sequence(&self, lx: &mut Lexer, stop: &[char]) -> Result<FreeWord, ParseError> {
        let mut acc = self.identity();
        let mut any = false;
        loop {
            lx.skip_ws();
            match lx.peek() {
                None => break,
                Some(c) if stop.contains(&c) => break,
                _ => {}
            }
            let atom = self.parse_atom(lx)?;
            let exp = if lx.eat('^') { lx.nonzero_integer()? } else { 1 };
            acc = acc.mul_unchecked(&atom.pow(exp));
            any = true;
        }
        if !any {
            return Err(ParseError::new(lx.pos, "expected a word"));
        }
        Ok(acc)
    }

    fn parse_atom(&self, lx: &mut Lexer) -> Result<FreeWord, ParseError> {
        lx.skip_ws();
        let pos = lx.pos;
        match lx.peek() {
            Some('(') => {
                lx.bump();
                let inner = self.parse_sequence(lx, &[')'])?;
                if !lx.eat(')') {
                    return Err(ParseError::new(lx.pos, "expected `)`"));
                }
                Ok(inner)
            }
            Some('[') => {
                lx.bump();
                let left = self.parse_sequence(lx, &[','])?;
                if !lx.eat(',') {
                    return Err(ParseError::new(lx.pos, "expected `,` in commutator"));
                }
                let right = self.parse_sequence(lx, &[']'])?;
                if !lx.eat(']') {
                    return Err(ParseError::new(lx.pos, "expected `]`"));
                }
                Ok(left.commutator_unchecked(&right))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let ident = lx.ident()?;
                self.index(&ident)
                    .map(|idx| self.generator(idx))
                    .ok_or_else(|| ParseError::new(pos, format!("unknown generator `{ident}`")))
            }
            Some(c) => Err(ParseError::new(pos, format!("unexpected character `{c}`"))),
            None => Err(ParseError::new(pos, "unexpected end of input")),
        }
    }

    fn mismatch(&self, other: &Alphabet) -> WordError {
        WordError::AlphabetMismatch(self.to_string(), other.to_string())
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(" "))
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({})", self.0.join(" "))
    }
}

fn push_syllable(stack: &mut Vec<(usize, i64)>, g: usize, e: i64) {
    if e == 0 {
        return;
    }
    match stack.last_mut() {
        Some((top, exp)) if *top == g => {
            *exp += e;
            if *exp == 0 {
                stack.pop();
            }
        }
        _ => stack.push((g, e)),
    }
}

/// A reduced word in the free group over an [`Alphabet`]. Immutable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeWord {
    alphabet: Alphabet,
    syllables: Vec<(usize, i64)>,
}

impl FreeWord {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Total letter length, `Σ |exponent|`.
    pub fn len(&self) -> usize {
        self.syllables.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    /// The word expanded into single letters `(generator, inverted)`.
    pub fn letters(&self) -> Vec<(usize, bool)> {
        let mut out = Vec::with_capacity(self.len());
        for &(g, e) in &self.syllables {
            for _ in 0..e.unsigned_abs() {
                out.push((g, e < 0));
            }
        }
        out
    }

    pub fn multiply(&self, other: &FreeWord) -> Result<FreeWord, WordError> {
        if self.alphabet != other.alphabet {
            return Err(self.alphabet.mismatch(&other.alphabet));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &FreeWord) -> FreeWord {
        let mut stack = self.syllables.clone();
        for &(g, e) in &other.syllables {
            push_syllable(&mut stack, g, e);
        }
        FreeWord { alphabet: self.alphabet.clone(), syllables: stack }
    }

    pub fn invert(&self) -> FreeWord {
        let syllables = self.syllables.iter().rev().map(|&(g, e)| (g, -e)).collect();
        FreeWord { alphabet: self.alphabet.clone(), syllables }
    }

    pub fn pow(&self, n: i64) -> FreeWord {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let mut acc = self.alphabet.identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul_unchecked(&base);
        }
        acc
    }

    /// `u·v·u⁻¹·v⁻¹`.
    pub fn commutator(&self, other: &FreeWord) -> Result<FreeWord, WordError> {
        if self.alphabet != other.alphabet {
            return Err(self.alphabet.mismatch(&other.alphabet));
        }
        Ok(self.commutator_unchecked(other))
    }

    fn commutator_unchecked(&self, other: &FreeWord) -> FreeWord {
        self.mul_unchecked(other).mul_unchecked(&self.invert()).mul_unchecked(&other.invert())
    }

    /// `u·self·u⁻¹`.
    pub fn conjugate_by(&self, u: &FreeWord) -> Result<FreeWord, WordError> {
        u.multiply(self)?.multiply(&u.invert())
    }

    /// Exponent sum of one generator over the whole word.
    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.syllables.iter().filter(|&&(g, _)| g == gen).map(|&(_, e)| e).sum()
    }

    /// Homomorphic substitution: replaces generator `i` of this word's
    /// alphabet with `images[i]`. All images must live over `target`.
    pub fn substitute(&self, target: &Alphabet, images: &[FreeWord]) -> Result<FreeWord, WordError> {
        if images.len() != self.alphabet.size() {
            return Err(WordError::ImageCount { expected: self.alphabet.size(), got: images.len() });
        }
        for img in images {
            if img.alphabet() != target {
                return Err(target.mismatch(img.alphabet()));
            }
        }
        let mut acc = target.identity();
        for &(g, e) in &self.syllables {
            acc = acc.mul_unchecked(&images[g].pow(e));
        }
        Ok(acc)
    }

    /// Re-express the word over `target`, mapping generators by name.
    pub fn embed_by_name(&self, target: &Alphabet) -> Result<FreeWord, WordError> {
        let mut raw = Vec::with_capacity(self.syllables.len());
        for &(g, e) in &self.syllables {
            let name = self.alphabet.name(g);
            let idx = target
                .index(name)
                .ok_or_else(|| WordError::BadGeneratorName(name.to_string()))?;
            raw.push((idx, e));
        }
        Ok(target.word(&raw))
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(g, e) in &self.syllables {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}", self.alphabet.name(g))?;
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeWord({self})")
    }
}

/// An endomorphism of the free group over an alphabet: one image word per
/// generator, extended homomorphically.
#[derive(Clone, PartialEq, Eq)]
pub struct Endomorphism {
    alphabet: Alphabet,
    images: Vec<FreeWord>,
}

impl Endomorphism {
    pub fn new(alphabet: Alphabet, images: Vec<FreeWord>) -> Result<Self, WordError> {
        if images.len() != alphabet.size() {
            return Err(WordError::ImageCount { expected: alphabet.size(), got: images.len() });
        }
        for img in &images {
            if *img.alphabet() != alphabet {
                return Err(alphabet.mismatch(img.alphabet()));
            }
        }
        Ok(Endomorphism { alphabet, images })
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        let images = (0..alphabet.size()).map(|i| alphabet.generator(i)).collect();
        Endomorphism { alphabet: alphabet.clone(), images }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn image(&self, gen: usize) -> &FreeWord {
        &self.images[gen]
    }

    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord, WordError> {
        if *w.alphabet() != self.alphabet {
            return Err(self.alphabet.mismatch(w.alphabet()));
        }
        w.substitute(&self.alphabet, &self.images)
    }

    /// Composition `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism, WordError> {
        if self.alphabet != other.alphabet {
            return Err(self.alphabet.mismatch(&other.alphabet));
        }
        let images = other
            .images
            .iter()
            .map(|img| self.apply(img))
            .collect::<Result<Vec<_>, _>>()?;
        Endomorphism::new(self.alphabet.clone(), images)
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, img) in self.images.iter().enumerate() {
            if !first {
                write!(f, " ; ")?;
            }
            first = false;
            write!(f, "{} -> {}", self.alphabet.name(i), img)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Endomorphism({self})")
    }
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { text, pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn done(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('1') => {
                self.bump();
                return Ok("1".to_string());
            }
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return Err(ParseError::new(start, "expected a generator name")),
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn nonzero_integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let neg = self.eat('-');
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == digits_start {
            return Err(ParseError::new(start, "expected an integer exponent"));
        }
        let value: i64 = self.text[digits_start..self.pos]
            .parse()
            .map_err(|_| ParseError::new(start, "exponent out of range"))?;
        if value == 0 {
            return Err(ParseError::new(start, "exponent must be nonzero"));
        }
        Ok(if neg { -value } else { value })
    }
}
