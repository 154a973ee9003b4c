//! Trace polynomials of words in two SL2 matrices, in the Fricke coordinates
//! `x = tr(a)`, `y = tr(b)`, `z = tr(ab)`, plus an exact rational-matrix
//! oracle for cross-checking them.
//!
//! The computation rests on three classical identities, valid for any pair
//! of unimodular 2×2 matrices over a commutative ring:
//!
//! * `tr(u⁻¹) = tr(u)` and invariance of traces under cyclic rotation;
//! * the Cayley–Hamilton power reduction
//!   `tr(B·A²·C) = tr(A)·tr(B·A·C) − tr(B·C)`;
//! * the product splitting `tr(u·v) = tr(u)·tr(v) − tr(u·v⁻¹)`.
//!
//! Every word is first cyclically reduced and rotated to a canonical
//! position, which both maximizes memo hits and discharges the conjugation
//! invariances for free.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::polyring::{Polynomial, Rational, VarSet};
use crate::words::{Alphabet, FreeWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("trace coordinates need an alphabet of exactly two generators, got {0}")]
    AlphabetSize(usize),
    #[error("word alphabet {{{0}}} does not match the trace context {{{1}}}")]
    AlphabetMismatch(String, String),
    #[error("matrix has determinant {0}, expected 1")]
    NotUnimodular(Rational),
}

/// An exact 2×2 rational matrix of determinant 1.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat2 {
    entries: [[Rational; 2]; 2],
}

impl Mat2 {
    pub fn new(entries: [[Rational; 2]; 2]) -> Result<Self, TraceError> {
        let det = &entries[0][0] * &entries[1][1] - &entries[0][1] * &entries[1][0];
        if !det.is_one() {
            return Err(TraceError::NotUnimodular(det));
        }
        Ok(Mat2 { entries })
    }

    pub fn from_integers(e: [[i64; 2]; 2]) -> Result<Self, TraceError> {
        Mat2::new(e.map(|row| row.map(|v| Rational::from_integer(v.into()))))
    }

    pub fn identity() -> Self {
        Mat2 {
            entries: [
                [Rational::one(), Rational::zero()],
                [Rational::zero(), Rational::one()],
            ],
        }
    }

    /// Upper triangular elementary matrix `[[1, r], [0, 1]]`.
    pub fn upper(r: Rational) -> Self {
        Mat2 {
            entries: [[Rational::one(), r], [Rational::zero(), Rational::one()]],
        }
    }

    /// Lower triangular elementary matrix `[[1, 0], [r, 1]]`.
    pub fn lower(r: Rational) -> Self {
        Mat2 {
            entries: [[Rational::one(), Rational::zero()], [r, Rational::one()]],
        }
    }

    /// Product of elementary triangular factors, alternating shape per flag;
    /// stays in SL2 exactly. This is the sampler the oracle suites use.
    pub fn from_elementary_factors(factors: &[(bool, Rational)]) -> Self {
        let mut m = Mat2::identity();
        for (upper, r) in factors {
            let f = if *upper { Mat2::upper(r.clone()) } else { Mat2::lower(r.clone()) };
            m = m.mul(&f);
        }
        m
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let a = &self.entries;
        let b = &other.entries;
        let mut out = [
            [Rational::zero(), Rational::zero()],
            [Rational::zero(), Rational::zero()],
        ];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
            }
        }
        Mat2 { entries: out }
    }

    /// Inverse via the adjugate; exact because the determinant is 1.
    pub fn inverse(&self) -> Mat2 {
        let e = &self.entries;
        Mat2 {
            entries: [
                [e[1][1].clone(), -e[0][1].clone()],
                [-e[1][0].clone(), e[0][0].clone()],
            ],
        }
    }

    pub fn trace(&self) -> Rational {
        &self.entries[0][0] + &self.entries[1][1]
    }

    pub fn det(&self) -> Rational {
        &self.entries[0][0] * &self.entries[1][1] - &self.entries[0][1] * &self.entries[1][0]
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.entries[0][0], self.entries[0][1], self.entries[1][0], self.entries[1][1]
        )
    }
}

/// Evaluate a word over a two-generator alphabet at a concrete matrix pair.
pub fn eval_word(w: &FreeWord, a: &Mat2, b: &Mat2) -> Result<Mat2, TraceError> {
    if w.alphabet().size() != 2 {
        return Err(TraceError::AlphabetSize(w.alphabet().size()));
    }
    let mats = [a, b];
    let invs = [a.inverse(), b.inverse()];
    let mut acc = Mat2::identity();
    for (g, inverted) in w.letters() {
        let factor = if inverted { &invs[g] } else { mats[g] };
        acc = acc.mul(factor);
    }
    Ok(acc)
}

/// The commutator-trace form `κ(px, py, pz) = px² + py² + pz² − px·py·pz − 2`,
/// equal to `tr([A,B])` when the arguments are the traces of `A`, `B`, `AB`.
pub fn kappa(px: &Polynomial, py: &Polynomial, pz: &Polynomial) -> Polynomial {
    let two = Polynomial::constant(px.vars(), 2);
    &(&(&(px * px) + &(py * py)) + &(pz * pz)) - &(&(&(px * py) * pz) + &two)
}

/// True iff `κ(px, py, pz) − 2` vanishes identically; for trace triples this
/// certifies that the corresponding pairs generate solvable subgroups.
pub fn is_solvable_triple(px: &Polynomial, py: &Polynomial, pz: &Polynomial) -> bool {
    let two = Polynomial::constant(px.vars(), 2);
    kappa(px, py, pz).sub(&two).is_zero()
}

/// Single letter of a two-generator word: generator index and inversion flag.
/// The derived order (`a < a⁻¹ < b < b⁻¹`) fixes the canonical rotation.
type Letter = (u8, bool);

fn invert_letters(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|&(g, inv)| (g, !inv)).collect()
}

fn reduce_letters(letters: &[Letter]) -> Vec<Letter> {
    let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if stack.last().is_some_and(|&(g, inv)| g == l.0 && inv != l.1) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    stack
}

fn cyclically_reduce(mut letters: Vec<Letter>) -> Vec<Letter> {
    while letters.len() >= 2 {
        let first = letters[0];
        let last = letters[letters.len() - 1];
        if first.0 == last.0 && first.1 != last.1 {
            letters.pop();
            letters.remove(0);
        } else {
            break;
        }
    }
    letters
}

/// Least rotation, over all cyclic rotations of `letters` and of its inverse.
/// Input must be cyclically reduced.
fn canonical_rotation(letters: &[Letter]) -> Vec<Letter> {
    if letters.is_empty() {
        return Vec::new();
    }
    let inv = invert_letters(letters);
    let mut best: Option<Vec<Letter>> = None;
    for source in [letters, inv.as_slice()] {
        for start in 0..source.len() {
            let mut rot = Vec::with_capacity(source.len());
            rot.extend_from_slice(&source[start..]);
            rot.extend_from_slice(&source[..start]);
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap()
}

/// True when the cyclic word strictly alternates generators (no two adjacent
/// letters, including around the wrap, share a generator).
fn is_cyclically_alternating(letters: &[Letter]) -> bool {
    let n = letters.len();
    if n < 2 {
        return false;
    }
    (0..n).all(|i| letters[i].0 != letters[(i + 1) % n].0)
}

/// Termination measure for the recursion: twice the cyclically reduced
/// length, plus one for alternating cyclic words (which are the only ones
/// the product-splitting rule applies to).
fn measure(letters: &[Letter]) -> usize {
    let core = cyclically_reduce(reduce_letters(letters));
    2 * core.len() + usize::from(core.len() >= 3 && is_cyclically_alternating(&core))
}

/// Shared computation state: the distinguished generator pair and a memo
/// table keyed by canonical rotations.
pub struct TraceContext {
    alphabet: Alphabet,
    vars: VarSet,
    memo: HashMap<Vec<Letter>, Polynomial>,
    memo_enabled: bool,
}

impl TraceContext {
    pub fn new(alphabet: Alphabet) -> Result<Self, TraceError> {
        if alphabet.size() != 2 {
            return Err(TraceError::AlphabetSize(alphabet.size()));
        }
        Ok(TraceContext {
            alphabet,
            vars: VarSet::xyz(),
            memo: HashMap::new(),
            memo_enabled: true,
        })
    }

    /// A context that recomputes everything from scratch; used to check that
    /// memoization is observationally transparent.
    pub fn without_memo(alphabet: Alphabet) -> Result<Self, TraceError> {
        let mut ctx = TraceContext::new(alphabet)?;
        ctx.memo_enabled = false;
        Ok(ctx)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    /// The unique polynomial `P` with `P(tr A, tr B, tr AB) = tr(w(A, B))`
    /// for all unimodular 2×2 matrices `A`, `B`.
    pub fn trace_poly(&mut self, w: &FreeWord) -> Result<Polynomial, TraceError> {
        if w.alphabet() != &self.alphabet {
            return Err(TraceError::AlphabetMismatch(
                w.alphabet().to_string(),
                self.alphabet.to_string(),
            ));
        }
        let letters: Vec<Letter> = w.letters().into_iter().map(|(g, inv)| (g as u8, inv)).collect();
        Ok(self.compute(letters))
    }

    fn var(&self, v: usize) -> Polynomial {
        Polynomial::variable(&self.vars, v)
    }

    fn generator_trace(&self, g: u8) -> Polynomial {
        self.var(g as usize)
    }

    fn compute(&mut self, letters: Vec<Letter>) -> Polynomial {
        let canonical = canonical_rotation(&cyclically_reduce(reduce_letters(&letters)));
        if self.memo_enabled {
            if let Some(hit) = self.memo.get(&canonical) {
                return hit.clone();
            }
        }
        let result = self.compute_canonical(&canonical);
        if self.memo_enabled {
            self.memo.insert(canonical, result.clone());
        }
        result
    }

    fn compute_canonical(&mut self, canonical: &[Letter]) -> Polynomial {
        match canonical {
            [] => Polynomial::constant(&self.vars, 2),
            [(g, false)] => self.generator_trace(*g),
            [(0, false), (1, false)] => self.var(2),
            // tr(ab⁻¹) = tr(a)·tr(b) − tr(ab)
            [(0, false), (1, true)] => (&self.var(0) * &self.var(1)).sub(&self.var(2)),
            _ => {
                if let Some(i) = (0..canonical.len() - 1).find(|&i| canonical[i].0 == canonical[i + 1].0)
                {
                    self.power_reduction(canonical, i)
                } else {
                    self.split_reduction(canonical)
                }
            }
        }
    }

    /// Cayley–Hamilton: with `w = pre·g·g·post`,
    /// `tr(w) = tr(g)·tr(pre·g·post) − tr(pre·post)`.
    fn power_reduction(&mut self, letters: &[Letter], i: usize) -> Polynomial {
        let g = letters[i];
        let mut shorter = letters.to_vec();
        shorter.remove(i + 1);
        let mut shortest = shorter.clone();
        shortest.remove(i);
        let t_g = self.generator_trace(g.0);
        let a = self.compute(shorter);
        let b = self.compute(shortest);
        (&t_g * &a).sub(&b)
    }

    /// Product splitting for alternating words: `tr(u·v) = tr(u)·tr(v) −
    /// tr(u·v⁻¹)`. The split is chosen to strictly decrease the termination
    /// measure on every branch (an even split always does, because the
    /// boundary letters of `u·v⁻¹` then share a generator and either cancel
    /// or merge into a square); ties prefer the middle.
    fn split_reduction(&mut self, letters: &[Letter]) -> Polynomial {
        let n = letters.len();
        let mut best: Option<(usize, usize, usize, Vec<Letter>)> = None;
        for m in 1..n {
            let u = &letters[..m];
            let v = &letters[m..];
            let mut uv_inv = u.to_vec();
            uv_inv.extend(invert_letters(v));
            let uv_inv = reduce_letters(&uv_inv);
            let score = measure(u).max(measure(v)).max(measure(&uv_inv));
            let tie = m.abs_diff(n / 2);
            if best.as_ref().is_none_or(|(s, t, _, _)| (score, tie) < (*s, *t)) {
                best = Some((score, tie, m, uv_inv));
            }
        }
        let (score, _, m, uv_inv) = best.expect("word of length >= 2 always splits");
        debug_assert!(score < measure(letters), "split must shrink the termination measure");
        let t_u = self.compute(letters[..m].to_vec());
        let t_v = self.compute(letters[m..].to_vec());
        let t_mixed = self.compute(uv_inv);
        (&t_u * &t_v).sub(&t_mixed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn ctx() -> TraceContext {
        TraceContext::new(ab()).unwrap()
    }

    fn parse_poly(s: &str) -> Polynomial {
        Polynomial::parse(&VarSet::xyz(), s).unwrap()
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn base_cases() {
        let ab = ab();
        let mut ctx = ctx();
        assert_eq!(ctx.trace_poly(&ab.identity()).unwrap(), parse_poly("2"));
        assert_eq!(ctx.trace_poly(&ab.parse("a").unwrap()).unwrap(), parse_poly("x"));
        assert_eq!(ctx.trace_poly(&ab.parse("b").unwrap()).unwrap(), parse_poly("y"));
        assert_eq!(ctx.trace_poly(&ab.parse("a b").unwrap()).unwrap(), parse_poly("z"));
        assert_eq!(ctx.trace_poly(&ab.parse("a b^-1").unwrap()).unwrap(), parse_poly("x*y - z"));
        assert_eq!(ctx.trace_poly(&ab.parse("a^2").unwrap()).unwrap(), parse_poly("x^2 - 2"));
    }

    #[test]
    fn commutator_trace_is_kappa() {
        let ab = ab();
        let mut ctx = ctx();
        let comm = ab.parse("a b a^-1 b^-1").unwrap();
        assert_eq!(
            ctx.trace_poly(&comm).unwrap(),
            parse_poly("x^2 + y^2 + z^2 - x*y*z - 2")
        );
        let vars = VarSet::xyz();
        let (x, y, z) = (
            Polynomial::variable(&vars, 0),
            Polynomial::variable(&vars, 1),
            Polynomial::variable(&vars, 2),
        );
        assert_eq!(kappa(&x, &y, &z), parse_poly("x^2 + y^2 + z^2 - x*y*z - 2"));
        let two = Polynomial::constant(&vars, 2);
        assert_eq!(kappa(&two, &two, &two), parse_poly("2"));
        assert_eq!(kappa(&x, &two, &x), parse_poly("2"));
    }

    #[test]
    fn solvable_triples() {
        let vars = VarSet::xyz();
        let x = Polynomial::variable(&vars, 0);
        let y = Polynomial::variable(&vars, 1);
        let z = Polynomial::variable(&vars, 2);
        let two = Polynomial::constant(&vars, 2);
        assert!(is_solvable_triple(&x, &two, &x));
        assert!(!is_solvable_triple(&x, &y, &z));
        assert!(is_solvable_triple(&two, &two, &two));
    }

    #[test]
    fn commutator_times_generator() {
        let ab = ab();
        let mut ctx = ctx();
        let a = ab.generator(0);
        let comm = ab.parse("a b a^-1 b^-1").unwrap();
        let w = a.multiply(&comm).unwrap();
        let kappa_poly = parse_poly("x^2 + y^2 + z^2 - x*y*z - 2");
        let expected = parse_poly("x").mul(&kappa_poly).sub(&parse_poly("x"));
        assert_eq!(ctx.trace_poly(&w).unwrap(), expected);
    }

    #[test]
    fn mat2_examples() {
        let a = Mat2::from_integers([[1, 1], [0, 1]]).unwrap();
        let b = Mat2::from_integers([[1, 0], [1, 1]]).unwrap();
        let ab_mat = a.mul(&b);
        assert_eq!(ab_mat.trace(), rat(3, 1));
        assert!(Mat2::from_integers([[2, 0], [0, 1]]).is_err());
        let alphabet = ab();
        assert_eq!(
            eval_word(&alphabet.identity(), &a, &b).unwrap(),
            Mat2::identity()
        );
        let w = alphabet.parse("a b").unwrap();
        let m = eval_word(&w, &a, &b).unwrap();
        assert_eq!(m, Mat2::from_integers([[2, 1], [1, 1]]).unwrap());

        // trace of the commutator matches kappa at the matrix point
        let comm = alphabet.parse("a b a^-1 b^-1").unwrap();
        let tr = eval_word(&comm, &a, &b).unwrap().trace();
        let kappa_at = parse_poly("x^2 + y^2 + z^2 - x*y*z - 2")
            .eval(&[rat(2, 1), rat(2, 1), rat(3, 1)]);
        assert_eq!(tr, kappa_at);
        assert_eq!(tr, rat(3, 1));
    }

    fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> FreeWord {
        let alphabet = ab();
        let len = rng.gen_range(0..=max_len);
        let mut letters: Vec<(usize, bool)> = Vec::with_capacity(len);
        while letters.len() < len {
            let cand = (rng.gen_range(0..2usize), rng.gen_bool(0.5));
            if letters
                .last()
                .is_some_and(|&(g, inv)| g == cand.0 && inv != cand.1)
            {
                continue;
            }
            letters.push(cand);
        }
        alphabet.from_letters(letters)
    }

    fn random_mat(rng: &mut ChaCha8Rng) -> Mat2 {
        let k = rng.gen_range(1..=6);
        let factors: Vec<(bool, Rational)> = (0..k)
            .map(|_| {
                let num = loop {
                    let n = rng.gen_range(-3i64..=3);
                    if n != 0 {
                        break n;
                    }
                };
                (rng.gen_bool(0.5), rat(num, rng.gen_range(1..=3)))
            })
            .collect();
        Mat2::from_elementary_factors(&factors)
    }

    #[test]
    fn oracle_equivalence_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut ctx = ctx();
        for _ in 0..60 {
            let w = random_word(&mut rng, 12);
            let p = ctx.trace_poly(&w).unwrap();
            for _ in 0..4 {
                let a = random_mat(&mut rng);
                let b = random_mat(&mut rng);
                let point = [a.trace(), b.trace(), a.mul(&b).trace()];
                let by_poly = p.eval(&point);
                let by_matrix = eval_word(&w, &a, &b).unwrap().trace();
                assert_eq!(by_poly, by_matrix, "word {w}");
            }
        }
    }

    #[test]
    fn memoization_is_transparent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let alphabet = ab();
        let mut with = TraceContext::new(alphabet.clone()).unwrap();
        let mut without = TraceContext::without_memo(alphabet).unwrap();
        for _ in 0..40 {
            let w = random_word(&mut rng, 10);
            assert_eq!(with.trace_poly(&w).unwrap(), without.trace_poly(&w).unwrap());
        }
    }

    #[test]
    fn rejects_other_alphabets() {
        let big = Alphabet::new(["a", "b", "c"]).unwrap();
        assert!(TraceContext::new(big.clone()).is_err());
        let mut ctx = ctx();
        let other = Alphabet::new(["u", "v"]).unwrap();
        assert!(ctx.trace_poly(&other.generator(0)).is_err());
    }

    fn letters_strategy() -> impl Strategy<Value = FreeWord> {
        prop::collection::vec((0usize..2, prop::bool::ANY), 0..10)
            .prop_map(|ls| ab().from_letters(ls))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn invariance_under_inversion_rotation_conjugation(
            w in letters_strategy(),
            u in letters_strategy(),
            rot in 0usize..8,
        ) {
            let mut ctx = ctx();
            let base = ctx.trace_poly(&w).unwrap();
            prop_assert_eq!(ctx.trace_poly(&w.invert()).unwrap(), base.clone());
            let letters = w.letters();
            if !letters.is_empty() {
                let k = rot % letters.len();
                let rotated: Vec<_> = letters[k..].iter().chain(&letters[..k]).copied().collect();
                let rotated = ab().from_letters(rotated);
                prop_assert_eq!(ctx.trace_poly(&rotated).unwrap(), base.clone());
            }
            let conj = w.conjugate_by(&u).unwrap();
            prop_assert_eq!(ctx.trace_poly(&conj).unwrap(), base);
        }

        #[test]
        fn power_reduction_identity(
            pre in letters_strategy(),
            post in letters_strategy(),
            g in 0usize..2,
        ) {
            let alphabet = ab();
            let mut ctx = ctx();
            let gen = alphabet.generator(g);
            let squared = pre.multiply(&gen.pow(2)).unwrap().multiply(&post).unwrap();
            let once = pre.multiply(&gen).unwrap().multiply(&post).unwrap();
            let none = pre.multiply(&post).unwrap();
            let lhs = ctx.trace_poly(&squared).unwrap();
            let rhs = ctx.trace_poly(&gen).unwrap()
                .mul(&ctx.trace_poly(&once).unwrap())
                .sub(&ctx.trace_poly(&none).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn split_identity_at_every_position(w in letters_strategy()) {
            let alphabet = ab();
            let mut ctx = ctx();
            let letters = w.letters();
            let total = ctx.trace_poly(&w).unwrap();
            for m in 0..=letters.len() {
                let u = alphabet.from_letters(letters[..m].iter().copied());
                let v = alphabet.from_letters(letters[m..].iter().copied());
                let mixed = u.multiply(&v.invert()).unwrap();
                let rhs = ctx.trace_poly(&u).unwrap()
                    .mul(&ctx.trace_poly(&v).unwrap())
                    .sub(&ctx.trace_poly(&mixed).unwrap());
                prop_assert_eq!(total.clone(), rhs);
            }
        }
    }
}
