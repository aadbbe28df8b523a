//! Seeded random spaces, kernels and systems for property checks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dynamics::DynSystem;
use crate::kernel::Kernel;
use crate::rational::{self, Rational};
use crate::space::FinSpace;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

pub fn discrete_space(n: usize) -> Arc<FinSpace> {
    Arc::new(FinSpace::discrete(labels(n)))
}

/// `n` points split into a random number of atoms.
pub fn space<R: Rng>(rng: &mut R, n: usize) -> Arc<FinSpace> {
    let blocks = rng.gen_range(1..=n);
    let mut assignment: Vec<usize> = (0..n).map(|i| if i < blocks { i } else { rng.gen_range(0..blocks) }).collect();
    assignment.shuffle(rng);
    let atoms = (0..blocks).map(|b| (0..n).filter(|&i| assignment[i] == b).collect()).collect();
    Arc::new(FinSpace::new(labels(n), atoms).expect("every block is hit"))
}

/// A probability vector with small denominators and some exact zeros.
pub fn prob_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    let mut weights: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..=6) }).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[rng.gen_range(0..n)] = 1;
    }
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| rational::ratio(w, total)).collect()
}

pub fn state<R: Rng>(rng: &mut R, space: &Arc<FinSpace>) -> Kernel {
    Kernel::state(Arc::clone(space), prob_vector(rng, space.num_atoms())).expect("normalized")
}

pub fn kernel<R: Rng>(rng: &mut R, dom: &Arc<FinSpace>, cod: &Arc<FinSpace>) -> Kernel {
    let rows = (0..dom.num_atoms()).map(|_| prob_vector(rng, cod.num_atoms())).collect();
    Kernel::new(Arc::clone(dom), Arc::clone(cod), rows).expect("normalized rows")
}

pub fn deterministic_kernel<R: Rng>(rng: &mut R, dom: &Arc<FinSpace>, cod: &Arc<FinSpace>) -> Kernel {
    let map: Vec<usize> = (0..dom.num_atoms()).map(|_| rng.gen_range(0..cod.num_atoms())).collect();
    Kernel::from_atom_map(Arc::clone(dom), Arc::clone(cod), &map)
}

/// Either a general kernel or, half the time, a zero-one one.
pub fn mixed_kernel<R: Rng>(rng: &mut R, dom: &Arc<FinSpace>, cod: &Arc<FinSpace>) -> Kernel {
    if rng.gen_bool(0.5) {
        deterministic_kernel(rng, dom, cod)
    } else {
        kernel(rng, dom, cod)
    }
}

pub fn point_map<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

pub fn permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// A random function that mostly stays inside a hidden partition, so the
/// invariant σ-algebra is usually nontrivial.
fn blocky_map<R: Rng>(rng: &mut R, blocks: &[usize]) -> Vec<usize> {
    let n = blocks.len();
    (0..n)
        .map(|x| {
            let same: Vec<usize> = (0..n).filter(|&y| blocks[y] == blocks[x]).collect();
            if rng.gen_bool(0.9) {
                same[rng.gen_range(0..same.len())]
            } else {
                rng.gen_range(0..n)
            }
        })
        .collect()
}

fn hidden_blocks<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let count = rng.gen_range(1..=n.clamp(1, 4));
    (0..n).map(|_| rng.gen_range(0..count)).collect()
}

/// One to `max_gens` point maps on a discrete space.
pub fn function_system<R: Rng>(rng: &mut R, n: usize, gens: usize) -> DynSystem {
    let space = discrete_space(n);
    let blocks = hidden_blocks(rng, n);
    let maps = (0..gens).map(|g| (format!("m{g}"), blocky_map(rng, &blocks))).collect();
    DynSystem::from_functions(space, maps).expect("discrete spaces make every map measurable")
}

/// Permutations that preserve a hidden partition, so orbits vary in size.
pub fn permutation_system<R: Rng>(rng: &mut R, n: usize, gens: usize) -> DynSystem {
    let space = discrete_space(n);
    let blocks = hidden_blocks(rng, n);
    let maps = (0..gens)
        .map(|g| {
            let mut map: Vec<usize> = (0..n).collect();
            for b in 0..=*blocks.iter().max().unwrap_or(&0) {
                let members: Vec<usize> = (0..n).filter(|&x| blocks[x] == b).collect();
                let mut images = members.clone();
                images.shuffle(rng);
                for (x, y) in members.into_iter().zip(images) {
                    map[x] = y;
                }
            }
            (format!("s{g}"), map)
        })
        .collect();
    DynSystem::from_functions(space, maps).expect("permutations are measurable")
}

/// Stochastic generators with sparse support over a random (possibly
/// coarse) space.
pub fn stochastic_system<R: Rng>(rng: &mut R, n: usize, gens: usize) -> DynSystem {
    let space = space(rng, n);
    let atoms = space.num_atoms();
    let blocks = hidden_blocks(rng, atoms);
    let generators = (0..gens)
        .map(|g| {
            let rows = (0..atoms)
                .map(|x| {
                    let mut row = vec![Rational::from_integer(0.into()); atoms];
                    let targets = blocky_map(rng, &blocks);
                    let spread = rng.gen_range(1..=3);
                    let picks: Vec<usize> = (0..spread).map(|i| targets[(x + i) % atoms]).collect();
                    let weights = prob_vector(rng, spread);
                    for (t, w) in picks.into_iter().zip(weights) {
                        row[t] += w;
                    }
                    row
                })
                .collect();
            let m = Kernel::new(Arc::clone(&space), Arc::clone(&space), rows).expect("normalized rows");
            (format!("k{g}"), m)
        })
        .collect();
    DynSystem::new(space, generators).expect("endo-kernels")
}
