//! Exact multivariate polynomial arithmetic with integer coefficients.
//!
//! Polynomials live over a fixed ordered variable set (by default `x, y, z`)
//! and are stored as a map from exponent vectors to nonzero arbitrary-
//! precision integer coefficients. The canonical term order is graded
//! lexicographic with `x > y > z`; printing and equality both use it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::error::ParseError;

/// Exact rational numbers (reduced, positive denominator).
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial has degree {got} in `{var}`, expected exactly 2")]
    NotQuadratic { var: String, got: u32 },
    #[error("coefficient of `{var}`^2 is not a constant ±1")]
    NotMonic { var: String },
    #[error("variable set mismatch: {{{0}}} vs {{{1}}}")]
    VarMismatch(String, String),
}

/// An ordered set of variable names. Position 0 is the most significant
/// variable in the lexicographic part of the term order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarSet(Arc<Vec<String>>);

impl VarSet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        assert!(!names.is_empty(), "variable set must be nonempty");
        for (i, n) in names.iter().enumerate() {
            assert!(!names[..i].contains(n), "duplicate variable `{n}`");
        }
        VarSet(Arc::new(names))
    }

    /// The standard Fricke coordinate variables.
    pub fn xyz() -> Self {
        VarSet::new(["x", "y", "z"])
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.0[idx]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(", "))
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarSet({})", self.0.join(", "))
    }
}

/// Exponent vector, parallel to a `VarSet`. Ordered graded-lexicographically
/// (total degree first, then exponents left to right), ascending.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    fn is_constant(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    fn quotient(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect();
        Monomial { exps }
    }

    fn product(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { exps }
    }

    fn halved(&self) -> Option<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for &e in &self.exps {
            if e % 2 != 0 {
                return None;
            }
            exps.push(e / 2);
        }
        Some(Monomial { exps })
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A multivariate polynomial with `BigInt` coefficients in canonical form:
/// no zero coefficients are stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: VarSet,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero(vars: &VarSet) -> Self {
        Polynomial { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &VarSet, c: impl Into<BigInt>) -> Self {
        let mut p = Polynomial::zero(vars);
        p.add_term(Monomial { exps: vec![0; vars.size()] }, c.into());
        p
    }

    pub fn variable(vars: &VarSet, idx: usize) -> Self {
        assert!(idx < vars.size(), "variable index out of range");
        let mut exps = vec![0; vars.size()];
        exps[idx] = 1;
        let mut p = Polynomial::zero(vars);
        p.add_term(Monomial { exps }, BigInt::one());
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_constant)
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exps[var]).max().unwrap_or(0)
    }

    /// True if the variable does not occur.
    pub fn is_free_of(&self, var: usize) -> bool {
        self.degree_in(var) == 0
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn assert_same_vars(&self, other: &Polynomial) {
        assert!(
            self.vars == other.vars,
            "variable set mismatch: {{{}}} vs {{{}}}",
            self.vars,
            other.vars
        );
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.assert_same_vars(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Polynomial { vars: self.vars.clone(), terms }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.assert_same_vars(other);
        let mut out = Polynomial::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.product(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::constant(&self.vars, 1);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale(&self, c: impl Into<BigInt>) -> Polynomial {
        let c: BigInt = c.into();
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(m, k)| (m.clone(), k * &c)).collect();
        Polynomial { vars: self.vars.clone(), terms }
    }

    /// Leading term under the graded-lexicographic order.
    fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Simultaneous substitution of every variable; the result is fully
    /// expanded. Identity images leave a variable in place.
    pub fn substitute(&self, sigma: &Substitution) -> Polynomial {
        assert!(self.vars == sigma.vars, "substitution over a different variable set");
        // Precompute image powers up to the maximal exponent in use.
        let mut max_exp = vec![0u32; self.vars.size()];
        for m in self.terms.keys() {
            for (v, &e) in m.exps.iter().enumerate() {
                max_exp[v] = max_exp[v].max(e);
            }
        }
        let mut powers: Vec<Vec<Polynomial>> = Vec::with_capacity(self.vars.size());
        for (v, &top) in max_exp.iter().enumerate() {
            let mut pows = vec![Polynomial::constant(&self.vars, 1)];
            for e in 1..=top {
                let next = pows[(e - 1) as usize].mul(&sigma.images[v]);
                pows.push(next);
            }
            powers.push(pows);
        }
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(&self.vars, c.clone());
            for (v, &e) in m.exps.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&powers[v][e as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Exact evaluation at a rational point (one value per variable).
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.size(), "evaluation point arity mismatch");
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = Rational::from(c.clone());
            for (v, &e) in m.exps.iter().enumerate() {
                for _ in 0..e {
                    term *= &point[v];
                }
            }
            acc += term;
        }
        acc
    }

    /// Coefficients of the polynomial viewed as a univariate polynomial in
    /// `var`; index `k` holds the coefficient of `var^k` (a polynomial free
    /// of `var`).
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Polynomial::zero(&self.vars); deg + 1];
        for (m, c) in &self.terms {
            let k = m.exps[var] as usize;
            let mut rest = m.clone();
            rest.exps[var] = 0;
            out[k].add_term(rest, c.clone());
        }
        out
    }

    /// Rebuild a polynomial from coefficients in `var` (inverse of
    /// [`coefficients_in`](Self::coefficients_in)).
    pub fn from_coefficients_in(vars: &VarSet, var: usize, coeffs: &[Polynomial]) -> Polynomial {
        let v = Polynomial::variable(vars, var);
        let mut out = Polynomial::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            out = out.add(&c.mul(&v.pow(k as u32)));
        }
        out
    }

    /// Division with remainder by a divisor whose leading coefficient in
    /// `var` is a constant ±1: returns `(q, r)` with `self = q·d + r` and
    /// `deg_var(r) < deg_var(d)`. Returns `None` when the divisor is not
    /// monic up to sign in `var` or has degree 0 in it.
    pub fn div_rem_in(&self, divisor: &Polynomial, var: usize) -> Option<(Polynomial, Polynomial)> {
        self.assert_same_vars(divisor);
        let dd = divisor.degree_in(var) as usize;
        if dd == 0 {
            return None;
        }
        let dcoeffs = divisor.coefficients_in(var);
        let lead = dcoeffs[dd].as_constant()?;
        if !(lead == BigInt::one() || lead == -BigInt::one()) {
            return None;
        }
        let mut rem = self.coefficients_in(var);
        if rem.len() < dd + 1 {
            return Some((Polynomial::zero(&self.vars), self.clone()));
        }
        let mut quot = vec![Polynomial::zero(&self.vars); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            // lead is ±1 so the factor is exact.
            let factor = rem[i].scale(lead.clone());
            for (j, dc) in dcoeffs.iter().enumerate() {
                rem[i - dd + j] = rem[i - dd + j].sub(&factor.mul(dc));
            }
            quot[i - dd] = factor;
        }
        let q = Polynomial::from_coefficients_in(&self.vars, var, &quot);
        let r = Polynomial::from_coefficients_in(&self.vars, var, &rem[..dd]);
        Some((q, r))
    }

    /// Exact polynomial square root over the integers: returns `q` with
    /// `q² = self` when one exists, normalized to a positive leading
    /// coefficient. Works by matching the leading monomial and then peeling
    /// successive terms off the remainder.
    pub fn poly_sqrt(&self) -> Option<Polynomial> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lm, lc) = self.leading()?;
        if lc.is_negative() {
            return None;
        }
        let s = lc.sqrt();
        if &(&s * &s) != lc {
            return None;
        }
        let half = lm.halved()?;
        let mut q = Polynomial::zero(&self.vars);
        q.add_term(half.clone(), s.clone());
        let two_s = BigInt::from(2) * &s;
        let mut last_mono: Option<Monomial> = None;
        loop {
            let rem = self.sub(&q.mul(&q));
            if rem.is_zero() {
                return Some(q);
            }
            let (rm, rc) = rem.leading()?;
            if !half.divides(rm) {
                return None;
            }
            let (c, residue) = rc.div_rem(&two_s);
            if !residue.is_zero() {
                return None;
            }
            let mono = rm.quotient(&half);
            // Each new term must be strictly smaller; otherwise no square
            // root exists and we would loop.
            if let Some(prev) = &last_mono {
                if &mono >= prev {
                    return None;
                }
            } else if mono >= half {
                return None;
            }
            last_mono = Some(mono.clone());
            q.add_term(mono, c);
        }
    }

    /// Solve a quadratic in `var` that is monic up to sign: writes
    /// `self = ±(var² + B·var + C)` with `B`, `C` free of `var`, and returns
    /// the two roots when the discriminant `B² − 4C` has an integer
    /// polynomial square root and both `(−B ∓ s)` are divisible by 2. The
    /// root using `−s` comes first.
    pub fn quadratic_roots_in(&self, var: usize) -> Result<Option<(Polynomial, Polynomial)>, PolyError> {
        let deg = self.degree_in(var);
        if deg != 2 {
            return Err(PolyError::NotQuadratic { var: self.vars.name(var).to_string(), got: deg });
        }
        let coeffs = self.coefficients_in(var);
        let lead = coeffs[2]
            .as_constant()
            .filter(|c| c.magnitude() == &BigInt::one().to_biguint().unwrap())
            .ok_or_else(|| PolyError::NotMonic { var: self.vars.name(var).to_string() })?;
        let sign = if lead.is_negative() { -1 } else { 1 };
        let b = coeffs[1].scale(sign);
        let c = coeffs[0].scale(sign);
        let disc = b.mul(&b).sub(&c.scale(4));
        let Some(s) = disc.poly_sqrt() else {
            return Ok(None);
        };
        let minus_b = b.neg();
        let Some(r1) = minus_b.sub(&s).div_exact_by_two() else {
            return Ok(None);
        };
        let Some(r2) = minus_b.add(&s).div_exact_by_two() else {
            return Ok(None);
        };
        Ok(Some((r1, r2)))
    }

    fn div_exact_by_two(&self) -> Option<Polynomial> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if c.is_odd() {
                return None;
            }
            terms.insert(m.clone(), c / 2);
        }
        Some(Polynomial { vars: self.vars.clone(), terms })
    }

    /// Parse the printed polynomial form. `*` between factors is optional.
    pub fn parse(vars: &VarSet, text: &str) -> Result<Polynomial, ParseError> {
        let mut p = PolyParser { text, pos: 0, vars };
        p.parse()
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::add(self, rhs)
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::sub(self, rhs)
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::mul(self, rhs)
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::neg(self)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let mag = c.abs();
            if m.is_constant() {
                write!(f, "{mag}")?;
            } else {
                let mut wrote = false;
                if !mag.is_one() {
                    write!(f, "{mag}")?;
                    wrote = true;
                }
                for (v, &e) in m.exps.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if wrote {
                        write!(f, "*")?;
                    }
                    wrote = true;
                    write!(f, "{}", self.vars.name(v))?;
                    if e > 1 {
                        write!(f, "^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

/// A total substitution: one image polynomial per variable (identity images
/// by default).
#[derive(Clone, PartialEq, Eq)]
pub struct Substitution {
    vars: VarSet,
    images: Vec<Polynomial>,
}

impl Substitution {
    pub fn identity(vars: &VarSet) -> Self {
        let images = (0..vars.size()).map(|v| Polynomial::variable(vars, v)).collect();
        Substitution { vars: vars.clone(), images }
    }

    pub fn with(mut self, var: usize, image: Polynomial) -> Self {
        assert!(image.vars() == &self.vars, "image over a different variable set");
        self.images[var] = image;
        self
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn image(&self, var: usize) -> &Polynomial {
        &self.images[var]
    }

    pub fn is_identity_on(&self, var: usize) -> bool {
        self.images[var] == Polynomial::variable(&self.vars, var)
    }

    /// Parse `"y=2; z=x"` style assignment lists; unmentioned variables stay
    /// fixed.
    pub fn parse(vars: &VarSet, text: &str) -> Result<Self, ParseError> {
        let mut sigma = Substitution::identity(vars);
        let mut offset = 0;
        for part in text.split(';') {
            let trimmed = part.trim();
            if !trimmed.is_empty() {
                let eq = trimmed
                    .find('=')
                    .ok_or_else(|| ParseError::new(offset, "expected `var = polynomial`"))?;
                let name = trimmed[..eq].trim();
                let var = vars
                    .index(name)
                    .ok_or_else(|| ParseError::new(offset, format!("unknown variable `{name}`")))?;
                let image = Polynomial::parse(vars, &trimmed[eq + 1..])?;
                sigma = sigma.with(var, image);
            }
            offset += part.len() + 1;
        }
        Ok(sigma)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for v in 0..self.vars.size() {
            if self.is_identity_on(v) {
                continue;
            }
            if wrote {
                write!(f, ", ")?;
            }
            wrote = true;
            write!(f, "{}={}", self.vars.name(v), self.images[v])?;
        }
        if !wrote {
            write!(f, "identity")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Substitution({self})")
    }
}

struct PolyParser<'a> {
    text: &'a str,
    pos: usize,
    vars: &'a VarSet,
}

impl<'a> PolyParser<'a> {
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

    fn parse(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = Polynomial::zero(self.vars);
        self.skip_ws();
        if self.pos >= self.text.len() {
            return Err(ParseError::new(0, "empty polynomial"));
        }
        let mut sign = BigInt::one();
        if self.peek() == Some('-') {
            sign = -sign;
            self.bump();
        } else if self.peek() == Some('+') {
            self.bump();
        }
        loop {
            let term = self.parse_term(sign.clone())?;
            acc = acc.add(&term);
            self.skip_ws();
            match self.peek() {
                None => break,
                Some('+') => {
                    sign = BigInt::one();
                    self.bump();
                }
                Some('-') => {
                    sign = -BigInt::one();
                    self.bump();
                }
                Some(c) => {
                    return Err(ParseError::new(self.pos, format!("unexpected character `{c}`")));
                }
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self, sign: BigInt) -> Result<Polynomial, ParseError> {
        let mut coeff = sign;
        let mut exps = vec![0u32; self.vars.size()];
        let mut any = false;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    coeff *= self.integer()?;
                    any = true;
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    let pos = self.pos;
                    let name = self.ident();
                    let var = self.vars.index(&name).ok_or_else(|| {
                        ParseError::new(pos, format!("unknown variable `{name}`"))
                    })?;
                    let e = if self.eat('^') {
                        let pos = self.pos;
                        let v = self.integer()?;
                        u32::try_from(v).ok().filter(|&v| v >= 1).ok_or_else(|| {
                            ParseError::new(pos, "exponent must be a positive integer")
                        })?
                    } else {
                        1
                    };
                    exps[var] += e;
                    any = true;
                }
                _ => break,
            }
            // `*` between factors is optional.
            self.eat('*');
        }
        if !any {
            return Err(ParseError::new(self.pos, "expected a term"));
        }
        let mut p = Polynomial::zero(self.vars);
        p.add_term(Monomial { exps }, coeff);
        Ok(p)
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

    fn ident(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        self.text[start..self.pos].to_string()
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return Err(ParseError::new(start, "expected an integer"));
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| ParseError::new(start, "integer out of range"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xyz() -> VarSet {
        VarSet::xyz()
    }

    fn parse(s: &str) -> Polynomial {
        Polynomial::parse(&xyz(), s).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn basic_ring_ops() {
        let x = parse("x");
        assert!(x.add(&x.neg()).is_zero());
        assert_eq!(parse("x + 1").mul(&parse("x - 1")), parse("x^2 - 1"));
        assert_eq!(parse("x + y").pow(2), parse("x^2 + 2*x*y + y^2"));
    }

    #[test]
    fn canonical_printing_is_graded_lex() {
        assert_eq!(parse("1 + x^2 - x*y*z + z^2 + y^2 - 3").to_string(), "-x*y*z + x^2 + y^2 + z^2 - 2");
        assert_eq!(parse("x^3*z - 2*x*y + 1").to_string(), "x^3*z - 2*x*y + 1");
        assert_eq!(Polynomial::zero(&xyz()).to_string(), "0");
        assert_eq!(parse("y*x^2").to_string(), "x^2*y");
        assert_eq!(parse("-x").to_string(), "-x");
    }

    #[test]
    fn substitute_examples() {
        let vars = xyz();
        let p = parse("x*y - x");
        let sigma = Substitution::identity(&vars).with(1, Polynomial::constant(&vars, 2));
        assert_eq!(p.substitute(&sigma), parse("x"));
        let sigma = Substitution::identity(&vars).with(1, parse("x^2 - 1"));
        assert_eq!(p.substitute(&sigma), parse("x^3 - 2*x"));
        assert_eq!(p.substitute(&Substitution::identity(&vars)), p);
    }

    #[test]
    fn eval_examples() {
        let two = rat(2, 1);
        let kappa = parse("x^2 + y^2 + z^2 - x*y*z - 2");
        assert_eq!(kappa.eval(&[two.clone(), two.clone(), two.clone()]), rat(2, 1));
        let x = parse("x");
        assert_eq!(x.eval(&[rat(5, 3), rat(0, 1), rat(0, 1)]), rat(5, 3));
        assert_eq!(parse("x*y - z").eval(&[rat(2, 1), rat(2, 1), rat(3, 1)]), rat(1, 1));
    }

    #[test]
    fn poly_sqrt_examples() {
        assert_eq!(parse("x^4 - 6*x^2 + 9").poly_sqrt(), Some(parse("x^2 - 3")));
        assert_eq!(parse("4").poly_sqrt(), Some(parse("2")));
        assert_eq!(parse("x").poly_sqrt(), None);
        assert_eq!(parse("x^2 + 1").poly_sqrt(), None);
        assert_eq!(parse("-4").poly_sqrt(), None);
        assert!(Polynomial::zero(&xyz()).poly_sqrt().unwrap().is_zero());
    }

    #[test]
    fn quadratic_solver_examples() {
        let vars = xyz();
        let q = parse("y^2 - y - x^2*y + 2*x^2 - 2");
        let (r1, r2) = q.quadratic_roots_in(1).unwrap().unwrap();
        assert_eq!(r1, parse("2"));
        assert_eq!(r2, parse("x^2 - 1"));
        // both roots satisfy the quadratic
        for r in [r1, r2] {
            let sigma = Substitution::identity(&vars).with(1, r);
            assert!(q.substitute(&sigma).is_zero());
        }

        let v2 = parse("y^2");
        let (r1, r2) = v2.quadratic_roots_in(1).unwrap().unwrap();
        assert!(r1.is_zero() && r2.is_zero());

        assert_eq!(parse("y^2 + 1").quadratic_roots_in(1).unwrap(), None);
        assert!(matches!(parse("y + 1").quadratic_roots_in(1), Err(PolyError::NotQuadratic { .. })));
        assert!(matches!(parse("2*y^2 + 1").quadratic_roots_in(1), Err(PolyError::NotMonic { .. })));
    }

    #[test]
    fn division_in_a_variable() {
        let p = parse("x*z^2 + x*y - z");
        let d = parse("z^2 - y");
        let (q, r) = p.div_rem_in(&d, 2).unwrap();
        assert_eq!(p, q.mul(&d).add(&r));
        assert!(r.degree_in(2) < 2);
        // non-monic divisor is rejected
        assert!(p.div_rem_in(&parse("x*z^2"), 2).is_none());
    }

    fn poly_strategy() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..3), -9i64..=9), 0..6).prop_map(|terms| {
            let vars = VarSet::xyz();
            let mut p = Polynomial::zero(&vars);
            for ((ex, ey, ez), c) in terms {
                p = p.add(&Polynomial::constant(&vars, c).mul(
                    &Polynomial::variable(&vars, 0)
                        .pow(ex)
                        .mul(&Polynomial::variable(&vars, 1).pow(ey))
                        .mul(&Polynomial::variable(&vars, 2).pow(ez)),
                ));
            }
            p
        })
    }

    fn point_strategy() -> impl Strategy<Value = Vec<Rational>> {
        prop::collection::vec((-6i64..=6, 1i64..=4), 3)
            .prop_map(|cs| cs.into_iter().map(|(n, d)| rat(n, d)).collect())
    }

    proptest! {
        #[test]
        fn ring_axioms(p in poly_strategy(), q in poly_strategy(), r in poly_strategy()) {
            prop_assert_eq!(p.add(&q), q.add(&p));
            prop_assert_eq!(p.mul(&q), q.mul(&p));
            prop_assert_eq!(p.add(&q).add(&r), p.add(&q.add(&r)));
            prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
            prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        }

        #[test]
        fn eval_commutes_with_substitute(
            p in poly_strategy(),
            img in poly_strategy(),
            pt in point_strategy(),
        ) {
            let vars = VarSet::xyz();
            let sigma = Substitution::identity(&vars).with(2, img.clone());
            let lhs = p.substitute(&sigma).eval(&pt);
            let moved = vec![pt[0].clone(), pt[1].clone(), img.eval(&pt)];
            let rhs = p.eval(&moved);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn sqrt_of_square_recovers(q in poly_strategy()) {
            let sq = q.mul(&q);
            let s = sq.poly_sqrt().expect("square must have a root");
            prop_assert!(s == q || s == q.neg());
            if !s.is_zero() {
                let (_, lc) = s.leading().unwrap();
                prop_assert!(!lc.is_negative());
            }
        }

        #[test]
        fn display_parse_roundtrip(p in poly_strategy()) {
            let printed = p.to_string();
            prop_assert_eq!(Polynomial::parse(&VarSet::xyz(), &printed).unwrap(), p);
        }
    }
}
