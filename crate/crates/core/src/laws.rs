//! Law checks run by `check-axioms` against a loaded system and measure.
//!
//! Each check evaluates one identity exactly and reports a verdict with a
//! witness on failure. Random companions (extra kernels, states and
//! generator words) are drawn from a seeded generator so reports are
//! reproducible.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::disintegration::{
    bayes_invert, find_nontrivial_decomposition, inversion_section_check, is_trivial_decomposition,
    positivity_instance, verify_disintegration,
};
use crate::dynamics::{invariant_sigma, is_invariant_set, is_left_invariant, zigzag_quotient, DynSystem, InvariantSigma};
use crate::error::Result;
use crate::kernel::{as_equal, compose, deterministic_by_diagram, is_deterministic, is_zero_one, tensor, Kernel};
use crate::random;
use crate::space::{product, FinSpace};

/// Atom count above which the brute-force invariant-set oracle is skipped.
pub const ORACLE_ATOM_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawResult {
    pub name: String,
    pub holds: bool,
    pub detail: Option<String>,
}

impl LawResult {
    fn new(name: impl Into<String>, holds: bool, witness: impl FnOnce() -> String) -> Self {
        let detail = if holds { None } else { Some(witness()) };
        LawResult { name: name.into(), holds, detail }
    }
}

/// Coassociativity, counitality and cocommutativity of copy on `x`, which
/// must be discrete.
pub fn comonoid_laws(x: &Arc<FinSpace>) -> Result<Vec<LawResult>> {
    let copy = Kernel::copy(x)?;
    let id = Kernel::identity(x);
    let xx = Arc::new(product(x, x));

    let left = compose(&tensor(&copy, &id), &copy)?;
    let right = compose(&tensor(&id, &copy), &copy)?;
    let assoc = compose(&Kernel::associator(x, x, x), &left)?;
    let coassoc = assoc == right;

    let del = Kernel::delete(x);
    let counit_left = compose(&Kernel::left_unitor(x), &compose(&tensor(&del, &id), &copy)?)? == id;
    let counit_right = compose(&Kernel::right_unitor(x), &compose(&tensor(&id, &del), &copy)?)? == id;
    let cocomm = compose(&Kernel::swap(x, x), &copy)? == copy;
    debug_assert_eq!(copy.cod(), &xx);

    Ok(vec![
        LawResult::new("comonoid.coassociativity", coassoc, || "(copy⊗id)∘copy differs from (id⊗copy)∘copy".into()),
        LawResult::new("comonoid.counit_left", counit_left, || "(delete⊗id)∘copy is not the identity".into()),
        LawResult::new("comonoid.counit_right", counit_right, || "(id⊗delete)∘copy is not the identity".into()),
        LawResult::new("comonoid.cocommutativity", cocomm, || "swap∘copy differs from copy".into()),
    ])
}

/// `copy_{X⊗Y} = (id⊗swap⊗id) ∘ (copy_X ⊗ copy_Y)` up to the associators
/// between `(X⊗X)⊗(Y⊗Y)` and `(X⊗Y)⊗(X⊗Y)`.
pub fn copy_tensor_compatibility(x: &Arc<FinSpace>, y: &Arc<FinSpace>) -> Result<bool> {
    let xy = Arc::new(product(x, y));
    let direct = Kernel::copy(&xy)?;
    let copies = tensor(&Kernel::copy(x)?, &Kernel::copy(y)?);
    // Rearrange ((x,x'),(y,y')) into ((x,y),(x',y')).
    let (nx, ny) = (x.num_atoms(), y.num_atoms());
    let map: Vec<usize> = (0..nx * nx * ny * ny)
        .map(|i| {
            let (xs, ys) = (i / (ny * ny), i % (ny * ny));
            let (a, a2, b, b2) = (xs / nx, xs % nx, ys / ny, ys % ny);
            (a * ny + b) * (nx * ny) + (a2 * ny + b2)
        })
        .collect();
    let middle_swap = Kernel::from_atom_map(Arc::clone(copies.cod()), Arc::clone(direct.cod()), &map);
    Ok(compose(&middle_swap, &copies)? == direct)
}

fn check_tensor_functoriality(f: &Kernel, g: &Kernel, k: &Kernel, h: &Kernel) -> Result<bool> {
    let lhs = compose(&tensor(f, g), &tensor(k, h))?;
    let rhs = tensor(&compose(f, k)?, &compose(g, h)?);
    Ok(lhs == rhs)
}

fn sigma_oracle(sys: &DynSystem, sigma: &InvariantSigma) -> Result<Option<String>> {
    let space = sys.space();
    let n = space.num_atoms();
    for mask in 0u64..(1 << n) {
        let atoms: Vec<usize> = (0..n).filter(|a| mask & (1 << a) != 0).collect();
        let points = space.points_of_atoms(&atoms);
        let brute = is_invariant_set(&points, sys)?;
        let union_of_components = sigma.components().iter().all(|c| {
            let inside = c.iter().filter(|a| atoms.contains(a)).count();
            inside == 0 || inside == c.len()
        });
        if brute != union_of_components {
            return Ok(Some(format!("set {} disagrees with the quotient atoms", space.set_label(&points))));
        }
    }
    Ok(None)
}

/// Runs every applicable law on the system (and the measure, if any).
pub fn check_all(sys: &DynSystem, measure: Option<&Kernel>, seed: u64) -> Result<Vec<LawResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();
    let space = sys.space();
    let gens = sys.generators();

    if space.is_discrete() {
        results.extend(comonoid_laws(space)?);
        let companion = random::discrete_space(rng.gen_range(1..=3));
        results.push(LawResult::new(
            "copy.tensor_compatibility",
            copy_tensor_compatibility(space, &companion)?,
            || "copy on a product differs from the product of copies".into(),
        ));
    }

    for (name, m) in gens {
        let terminal = compose(&Kernel::delete(space), m)? == Kernel::delete(space);
        results.push(LawResult::new(format!("terminality.{name}"), terminal, || format!("delete∘{name} ≠ delete")));
        if space.is_discrete() {
            let agree = deterministic_by_diagram(m)? == is_zero_one(m);
            results.push(LawResult::new(format!("determinism.{name}"), agree, || {
                format!("copy∘{name} vs ({name}⊗{name})∘copy disagrees with the entry test")
            }));
        }
    }

    for (i, (a, f)) in gens.iter().enumerate() {
        for (b, g) in gens.iter().skip(i) {
            let k = random::kernel(&mut rng, space, space);
            let h = random::kernel(&mut rng, space, space);
            let holds = check_tensor_functoriality(f, g, &k, &h)?;
            results.push(LawResult::new(format!("tensor.functoriality.{a}.{b}"), holds, || {
                format!("({a}⊗{b})∘(k⊗h) ≠ ({a}∘k)⊗({b}∘h) for a random k, h")
            }));
        }
    }

    let prior = match measure {
        Some(p) => p.clone(),
        None => random::state(&mut rng, space),
    };
    for (name, m) in gens {
        let inverse = bayes_invert(m, &prior)?;
        let holds = verify_disintegration(m, &prior, &inverse)?;
        results.push(LawResult::new(format!("disintegration.{name}"), holds, || {
            format!("p(x){name}(y|x) ≠ q(y){name}⁺(x|y) for some atom pair")
        }));
        // A second inverse with scrambled null rows must agree almost surely.
        let pushed = compose(m, &prior)?;
        let rows: Vec<_> = (0..inverse.rows().len())
            .map(|y| {
                if pushed.probs()[y] == crate::rational::zero() {
                    random::prob_vector(&mut rng, space.num_atoms())
                } else {
                    inverse.row(y).to_vec()
                }
            })
            .collect();
        let other = Kernel::new(Arc::clone(inverse.dom()), Arc::clone(inverse.cod()), rows)?;
        let unique = verify_disintegration(m, &prior, &other)? && as_equal(&pushed, &inverse, &other)?;
        results.push(LawResult::new(format!("disintegration.uniqueness.{name}"), unique, || {
            "two valid inverses are not almost surely equal".into()
        }));
        if is_deterministic(m) {
            let section = inversion_section_check(m, &prior)?;
            results.push(LawResult::new(format!("disintegration.section.{name}"), section, || {
                format!("{name}∘{name}⁺ is not almost surely the identity")
            }));
        }
        results.push(LawResult::new(format!("positivity.{name}"), positivity_instance(m, &prior)?, || {
            format!("{name}∘p is deterministic but {name} is not almost surely constant")
        }));
    }

    let witness = find_nontrivial_decomposition(&prior)?;
    let indecomposable = witness.is_none() == is_deterministic(&prior)
        && match &witness {
            Some(d) => !is_trivial_decomposition(d)?,
            None => true,
        };
    results.push(LawResult::new("indecomposability", indecomposable, || {
        "nontrivial decomposition search disagrees with determinism".into()
    }));

    let sigma = invariant_sigma(sys);
    if space.num_atoms() <= ORACLE_ATOM_LIMIT {
        let mismatch = sigma_oracle(sys, &sigma)?;
        let holds = mismatch.is_none();
        results.push(LawResult::new("invariant_sigma.oracle", holds, || mismatch.unwrap_or_default()));
    }
    let cocone = sigma.cocone();
    let right_inv = gens.iter().all(|(_, m)| compose(cocone, m).map(|c| c == *cocone).unwrap_or(false));
    results.push(LawResult::new("quotient.cocone_right_invariant", right_inv, || "r∘m ≠ r for some generator".into()));
    results.push(LawResult::new("quotient.cocone_deterministic", is_deterministic(cocone), || {
        "the cocone has an entry outside {0,1}".into()
    }));

    if sys.is_deterministic() {
        let target = random::discrete_space(rng.gen_range(1..=3));
        let s_bar = random::mixed_kernel(&mut rng, sigma.quotient_space(), &target);
        let s = compose(&s_bar, cocone)?;
        let factored = sigma.factor(&s)?;
        let unique = factored == s_bar && is_deterministic(&factored) == is_deterministic(&s);
        results.push(LawResult::new("quotient.universal_property", unique, || {
            "factorization through the quotient is not the one it was built from".into()
        }));

        let z = zigzag_quotient(&sigma)?;
        let iso = compose(&z.inverse, &z.descended)? == Kernel::identity(sigma.quotient_space())
            && compose(&z.descended, &z.inverse)? == Kernel::identity(&z.orbit_space)
            && is_zero_one(&z.inverse)
            && is_zero_one(&z.descended);
        results.push(LawResult::new("zigzag.isomorphism", iso, || {
            "the orbit-space map and its inverse do not compose to identities".into()
        }));
    }

    if let Some(p) = measure {
        if is_left_invariant(p, sys)? && !gens.is_empty() {
            let mut word = Kernel::identity(space);
            for _ in 0..rng.gen_range(2..=6) {
                let (_, m) = &gens[rng.gen_range(0..gens.len())];
                word = compose(m, &word)?;
            }
            let holds = compose(&word, p)? == *p;
            results.push(LawResult::new("generator_sufficiency", holds, || {
                "an invariant state is moved by a composite of generators".into()
            }));
        }
        if sys.is_deterministic() && is_left_invariant(p, sys)? {
            let d = sigma.decompose(p)?;
            let recovers = compose(d.k(), d.q())? == *p;
            let as_erg = sigma.is_as_ergodic(d.k(), d.q())?;
            results.push(LawResult::new("decomposition.recovers_p", recovers, || "k∘q ≠ p".into()));
            results.push(LawResult::new("decomposition.as_ergodic", as_erg, || {
                "k is not almost surely ergodic".into()
            }));
            let section = as_equal(d.q(), &compose(cocone, d.k())?, &Kernel::identity(sigma.quotient_space()))?;
            results.push(LawResult::new("decomposition.cocone_section", section, || {
                "r∘k is not q-almost surely the identity".into()
            }));
        }
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_hold_on_small_spaces() {
        for n in 1..=4 {
            let x = random::discrete_space(n);
            assert!(comonoid_laws(&x).unwrap().iter().all(|l| l.holds));
            for m in 1..=3 {
                assert!(copy_tensor_compatibility(&x, &random::discrete_space(m)).unwrap());
            }
        }
    }

    #[test]
    fn check_all_on_sys1() {
        let x = Arc::new(FinSpace::discrete(["a", "b", "c", "d"]));
        let sys = DynSystem::from_functions(x.clone(), vec![("t".into(), vec![1, 0, 2, 2])]).unwrap();
        let p = Kernel::state(x, ["1/4", "1/4", "1/2", "0"].iter().map(|s| crate::rational::parse(s).unwrap()).collect())
            .unwrap();
        let results = check_all(&sys, Some(&p), 3).unwrap();
        assert!(results.iter().all(|l| l.holds), "{results:?}");
        assert!(results.iter().any(|l| l.name == "decomposition.as_ergodic"));
    }
}
