//! Shared fixtures for the criterion benchmarks.

use fricke_core::words::{Alphabet, Endomorphism, FreeWord};
use fricke_core::FinitePresentation;

pub fn two_generators() -> Alphabet {
    Alphabet::new(["a", "b"]).expect("static alphabet")
}

/// The word whose trace polynomial has eleven terms.
pub fn long_commutator_word() -> FreeWord {
    two_generators().parse("a b^-1 a^-1 b a^-1 b^-1 a").expect("static word")
}

/// `a -> a, b -> [a, b]`, whose trace variety splits into two curves.
pub fn commutator_endomorphism() -> Endomorphism {
    let ab = two_generators();
    Endomorphism::new(
        ab.clone(),
        vec![ab.parse("a").expect("static"), ab.parse_extended("[a,b]").expect("static")],
    )
    .expect("images over the same alphabet")
}

/// `⟨a, t | t² a t⁻² = a²⟩` as a bare finite presentation.
pub fn one_relator_presentation() -> (FinitePresentation, FreeWord) {
    let at = Alphabet::new(["a", "t"]).expect("static alphabet");
    let relator = at.parse("t^2 a t^-2 a^-2").expect("static word");
    let target = at.generator(0);
    (FinitePresentation::new(at, vec![relator]), target)
}
