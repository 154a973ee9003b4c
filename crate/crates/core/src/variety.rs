//! Trace varieties of endomorphisms of the rank-two free group.
//!
//! A representation of `⟨a, b, t | tat⁻¹ = φ(a), tbt⁻¹ = φ(b)⟩` restricted
//! to the base gives a pair of SL2 matrices whose trace triple must satisfy
//! `tr(φ(a)) = x`, `tr(φ(b)) = y`, `tr(φ(ab)) = z`. The solution set of this
//! system is the trace variety of `φ`.
//!
//! The solver is deliberately narrow: it drops zero equations, eliminates
//! variables with unit linear coefficient, inter-reduces equations by
//! polynomial division when one is monic in a variable, and finishes with
//! the monic quadratic solver. Anything else is reported as `Unsolved`
//! together with the residual system — the toolkit does not pretend to be a
//! general solver.

use std::fmt;

use thiserror::Error;

use crate::polyring::{Polynomial, Substitution, VarSet};
use crate::trace::{is_solvable_triple, kappa, TraceContext, TraceError};
use crate::words::{Endomorphism, FreeWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VarietyError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Word(#[from] crate::words::WordError),
}

/// The defining equations of a trace variety, stored as left-minus-right
/// polynomials: `E₁ = tr(φ(a)) − x`, `E₂ = tr(φ(b)) − y`,
/// `E₃ = tr(φ(ab)) − z`.
#[derive(Clone, PartialEq, Eq)]
pub struct TraceSystem {
    vars: VarSet,
    equations: [Polynomial; 3],
}

impl TraceSystem {
    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn equations(&self) -> &[Polynomial; 3] {
        &self.equations
    }

    pub fn equation(&self, i: usize) -> &Polynomial {
        &self.equations[i]
    }
}

impl fmt::Debug for TraceSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "TraceSystem(E1 = {}, E2 = {}, E3 = {})",
            self.equations[0], self.equations[1], self.equations[2]
        )
    }
}

/// One solved branch of a trace variety: a total substitution sending the
/// solved variables to polynomials in the free ones (free variables map to
/// themselves).
#[derive(Clone, PartialEq, Eq)]
pub struct Component {
    substitution: Substitution,
    free_vars: Vec<usize>,
}

impl Component {
    pub fn substitution(&self) -> &Substitution {
        &self.substitution
    }

    pub fn free_vars(&self) -> &[usize] {
        &self.free_vars
    }

    pub fn dimension(&self) -> usize {
        self.free_vars.len()
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.substitution)
    }
}

impl fmt::Debug for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Component({}, dim {})", self.substitution, self.dimension())
    }
}

/// Result of [`solve_triangular`]: either a finite list of components or the
/// residual system the strategy could not decompose.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolveOutcome {
    Components(Vec<Component>),
    Unsolved {
        /// Equations left after elimination and reduction.
        residual: Vec<Polynomial>,
        /// Number of variables eliminated on the way.
        eliminations: usize,
        /// `variables − eliminations − residual constraints`.
        dimension: usize,
    },
}

impl SolveOutcome {
    pub fn dimension(&self) -> usize {
        match self {
            SolveOutcome::Components(cs) => cs.iter().map(Component::dimension).max().unwrap_or(0),
            SolveOutcome::Unsolved { dimension, .. } => *dimension,
        }
    }
}

/// Build the trace system of an endomorphism of the two-generator free
/// group.
pub fn build_system(phi: &Endomorphism) -> Result<TraceSystem, VarietyError> {
    let alphabet = phi.alphabet().clone();
    let mut ctx = TraceContext::new(alphabet.clone())?;
    let vars = ctx.vars().clone();
    let a = alphabet.generator(0);
    let b = alphabet.generator(1);
    let ab = a.multiply(&b)?;
    let mut equations = Vec::with_capacity(3);
    for (word, var) in [(a, 0), (b, 1), (ab, 2)] {
        let image = phi.apply(&word)?;
        let lhs = ctx.trace_poly(&image)?;
        equations.push(lhs.sub(&Polynomial::variable(&vars, var)));
    }
    Ok(TraceSystem {
        vars,
        equations: [equations[0].clone(), equations[1].clone(), equations[2].clone()],
    })
}

/// True iff the substitution annihilates every defining equation.
pub fn check_component(system: &TraceSystem, sigma: &Substitution) -> bool {
    system.equations.iter().all(|e| e.substitute(sigma).is_zero())
}

/// Triangular solving strategy. Elimination prefers the variable whose
/// solved form has the lowest-degree right-hand side, with ties broken in
/// the order `z, y, x`; back-substitution composes eliminations in reverse.
/// Every returned component is checked against the full system.
pub fn solve_triangular(system: &TraceSystem) -> SolveOutcome {
    let vars = system.vars.clone();
    let nvars = vars.size();
    let mut equations: Vec<Polynomial> =
        system.equations.iter().filter(|e| !e.is_zero()).cloned().collect();
    let mut eliminations: Vec<(usize, Polynomial)> = Vec::new();

    // Variable preference order: z first, then y, then x.
    let var_order: Vec<usize> = (0..nvars).rev().collect();

    let mut passes = 0;
    loop {
        passes += 1;
        if passes > 64 {
            break;
        }
        equations.retain(|e| !e.is_zero());

        // (1) eliminate any variable occurring as ±(v − p) with p free of v
        let mut candidate: Option<(usize, usize, Polynomial)> = None;
        for (idx, eq) in equations.iter().enumerate() {
            for &v in &var_order {
                if eq.degree_in(v) != 1 {
                    continue;
                }
                let coeffs = eq.coefficients_in(v);
                let Some(lead) = coeffs[1].as_constant() else { continue };
                let sign = if lead == 1.into() {
                    1
                } else if lead == (-1).into() {
                    -1
                } else {
                    continue;
                };
                // eq = ±(v − p)  ⟹  p = ∓ constant-part
                let image = coeffs[0].scale(-sign);
                let better = match &candidate {
                    None => true,
                    Some((_, cv, cp)) => {
                        let key = (image.total_degree(), nvars - v);
                        let cur = (cp.total_degree(), nvars - cv);
                        key < cur
                    }
                };
                if better {
                    candidate = Some((idx, v, image));
                }
            }
        }
        if let Some((idx, v, image)) = candidate {
            equations.remove(idx);
            let sigma = Substitution::identity(&vars).with(v, image.clone());
            for eq in &mut equations {
                *eq = eq.substitute(&sigma);
            }
            eliminations.push((v, image));
            continue;
        }

        // (2) inter-reduce: divide one equation by another that is monic
        // (up to sign) in some variable, keeping the remainder
        let mut reduced = false;
        'reduction: for &v in &var_order {
            for i in 0..equations.len() {
                let di = equations[i].degree_in(v);
                if di == 0 {
                    continue;
                }
                for j in 0..equations.len() {
                    if i == j || equations[j].degree_in(v) < di {
                        continue;
                    }
                    if let Some((_, rem)) = equations[j].div_rem_in(&equations[i], v) {
                        if rem != equations[j] {
                            equations[j] = rem;
                            reduced = true;
                            break 'reduction;
                        }
                    }
                }
            }
        }
        if reduced {
            continue;
        }
        break;
    }

    equations.retain(|e| !e.is_zero());

    // (3) a single monic quadratic left: branch on its two roots
    if equations.len() == 1 {
        let eq = &equations[0];
        for &v in &var_order {
            if eq.degree_in(v) != 2 {
                continue;
            }
            match eq.quadratic_roots_in(v) {
                Ok(Some((r1, r2))) => {
                    let components = [r1, r2]
                        .into_iter()
                        .map(|root| finish_component(&vars, &eliminations, Some((v, root))))
                        .collect::<Vec<_>>();
                    for c in &components {
                        assert!(
                            check_component(system, c.substitution()),
                            "solver produced a branch that does not lie on the variety"
                        );
                    }
                    return SolveOutcome::Components(components);
                }
                Ok(None) => break,
                Err(_) => continue,
            }
        }
    }

    // (4) fully solved by eliminations alone
    if equations.is_empty() && !eliminations.is_empty() {
        let component = finish_component(&vars, &eliminations, None);
        assert!(check_component(system, component.substitution()));
        return SolveOutcome::Components(vec![component]);
    }

    let dimension = nvars - eliminations.len() - equations.len();
    SolveOutcome::Unsolved { residual: equations, eliminations: eliminations.len(), dimension }
}

/// Compose recorded eliminations (earlier ones may mention variables solved
/// later, so substitute back to front) with an optional final quadratic
/// root.
fn finish_component(
    vars: &VarSet,
    eliminations: &[(usize, Polynomial)],
    root: Option<(usize, Polynomial)>,
) -> Component {
    let mut sigma = Substitution::identity(vars);
    let mut solved = vec![false; vars.size()];
    if let Some((v, image)) = &root {
        sigma = sigma.with(*v, image.clone());
        solved[*v] = true;
    }
    for (v, image) in eliminations.iter().rev() {
        let composed = image.substitute(&sigma);
        sigma = sigma.with(*v, composed);
        solved[*v] = true;
    }
    let free_vars = (0..vars.size()).filter(|&v| !solved[v]).collect();
    Component { substitution: sigma, free_vars }
}

/// Substitute a component into the trace triple of `(u, v, u·v)` and test
/// the solvability criterion `κ = 2`.
pub fn solvable_pair_probe(
    sigma: &Substitution,
    u: &FreeWord,
    v: &FreeWord,
) -> Result<bool, VarietyError> {
    let mut ctx = TraceContext::new(u.alphabet().clone())?;
    let pu = ctx.trace_poly(u)?.substitute(sigma);
    let pv = ctx.trace_poly(v)?.substitute(sigma);
    let puv = ctx.trace_poly(&u.multiply(v)?)?.substitute(sigma);
    Ok(is_solvable_triple(&pu, &pv, &puv))
}

/// The commutator-trace polynomial `κ(x, y, z)` over the standard variables.
pub fn kappa_xyz() -> Polynomial {
    let vars = VarSet::xyz();
    kappa(
        &Polynomial::variable(&vars, 0),
        &Polynomial::variable(&vars, 1),
        &Polynomial::variable(&vars, 2),
    )
}
