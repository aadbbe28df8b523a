//! Bayesian inversion and decompositions of states.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::kernel::{as_equal, compose, is_deterministic, Kernel};
use crate::rational::{self, Rational};
use crate::space::FinSpace;

/// A factorization `p = k ∘ q` of a state `p` through a state `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    q: Kernel,
    k: Kernel,
    p: Kernel,
}

impl Decomposition {
    /// Checks that `k ∘ q` reproduces `p` exactly.
    pub fn new(q: Kernel, k: Kernel, p: Kernel) -> Result<Self> {
        if !q.is_state() || !p.is_state() {
            return Err(Error::SpaceMismatch("q and p must be states".into()));
        }
        let composite = compose(&k, &q)?;
        if composite.cod() != p.cod() {
            return Err(Error::SpaceMismatch("k must land in the space of p".into()));
        }
        if composite.probs() != p.probs() {
            return Err(Error::InvalidKernel("k ∘ q does not reproduce p".into()));
        }
        Ok(Decomposition { q, k, p })
    }

    pub fn q(&self) -> &Kernel {
        &self.q
    }

    pub fn k(&self) -> &Kernel {
        &self.k
    }

    pub fn p(&self) -> &Kernel {
        &self.p
    }
}

fn require_state_on(p: &Kernel, space: &Arc<FinSpace>) -> Result<()> {
    if !p.is_state() {
        return Err(Error::SpaceMismatch("expected a state".into()));
    }
    if p.cod() != space {
        return Err(Error::SpaceMismatch(format!("state lives on {}, expected {}", p.cod(), space)));
    }
    Ok(())
}

/// The Bayesian inverse `f⁺ₚ : Y -> X` of `f : X -> Y` with respect to a
/// state `p` on `X`:
///
/// `f⁺ₚ(x|y) = p(x) f(y|x) / q(y)` where `q = f ∘ p`.
///
/// Rows with `q(y) = 0` are filled with `p` itself; any choice there is
/// almost surely equal.
pub fn bayes_invert(f: &Kernel, p: &Kernel) -> Result<Kernel> {
    require_state_on(p, f.dom())?;
    let prior = p.probs();
    let pushed = compose(f, p)?;
    let rows = pushed
        .probs()
        .iter()
        .enumerate()
        .map(|(y, qy)| {
            if qy.is_zero() {
                prior.to_vec()
            } else {
                prior.iter().enumerate().map(|(x, px)| px * f.entry(x, y) / qy).collect()
            }
        })
        .collect();
    Ok(Kernel::from_rows_unchecked(Arc::clone(f.cod()), Arc::clone(f.dom()), rows))
}

/// Checks the joint equation `p(x) f(y|x) = q(y) c(x|y)` entrywise.
pub fn verify_disintegration(f: &Kernel, p: &Kernel, c: &Kernel) -> Result<bool> {
    require_state_on(p, f.dom())?;
    if c.dom() != f.cod() || c.cod() != f.dom() {
        return Err(Error::SpaceMismatch("c must run from cod(f) back to dom(f)".into()));
    }
    let pushed = compose(f, p)?;
    let q = pushed.probs();
    let prior = p.probs();
    for (x, px) in prior.iter().enumerate() {
        for (y, qy) in q.iter().enumerate() {
            if px * f.entry(x, y) != qy * c.entry(y, x) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Trivial iff `k` is `q`-almost surely the constant kernel at `p`.
pub fn is_trivial_decomposition(d: &Decomposition) -> Result<bool> {
    let constant = compose(&d.p, &Kernel::delete(d.k.dom()))?;
    as_equal(&d.q, &d.k, &constant)
}

/// Returns a nontrivial decomposition of `p`, or `None` when `p` is
/// deterministic (and therefore indecomposable).
///
/// The witness lives on a two-point space: the first support atom `S` against
/// the rest of the support `S'`, with `q = (p(S), p(S'))` and the rows of `k`
/// the conditionals of `p` on `S` and on `S'`.
pub fn find_nontrivial_decomposition(p: &Kernel) -> Result<Option<Decomposition>> {
    if !p.is_state() {
        return Err(Error::SpaceMismatch("expected a state".into()));
    }
    if is_deterministic(p) {
        return Ok(None);
    }
    let probs = p.probs();
    let support = p.support();
    let first = support[0];
    let mass_first = probs[first].clone();
    let mass_rest = rational::one() - &mass_first;

    let conditional = |keep: &dyn Fn(usize) -> bool, mass: &Rational| -> Vec<Rational> {
        probs.iter().enumerate().map(|(x, v)| if keep(x) { v / mass } else { Rational::zero() }).collect()
    };
    let on_first = conditional(&|x| x == first, &mass_first);
    let on_rest = conditional(&|x| x != first, &mass_rest);

    let split = Arc::new(FinSpace::discrete(["S", "S'"]));
    let q = Kernel::state(Arc::clone(&split), vec![mass_first, mass_rest])?;
    let k = Kernel::new(split, Arc::clone(p.cod()), vec![on_first, on_rest])?;
    Decomposition::new(q, k, p.clone()).map(Some)
}

/// One instance of positivity for states: if `f ∘ p` is deterministic then
/// `f` is `p`-almost surely equal to the constant kernel at `f ∘ p`.
/// Vacuously true otherwise.
pub fn positivity_instance(f: &Kernel, p: &Kernel) -> Result<bool> {
    let pushed = compose(f, p)?;
    if !is_deterministic(&pushed) {
        return Ok(true);
    }
    let constant = compose(&pushed, &Kernel::delete(f.dom()))?;
    as_equal(p, f, &constant)
}

/// For deterministic `f`, `f ∘ f⁺ₚ` is `(f ∘ p)`-almost surely the identity.
pub fn inversion_section_check(f: &Kernel, p: &Kernel) -> Result<bool> {
    if !is_deterministic(f) {
        return Err(Error::NotDeterministic);
    }
    let pushed = compose(f, p)?;
    let inverse = bayes_invert(f, p)?;
    let round_trip = compose(f, &inverse)?;
    as_equal(&pushed, &round_trip, &Kernel::identity(f.cod()))
}
