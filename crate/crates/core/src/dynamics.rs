//! Dynamical systems on finite spaces and their ergodic theory.
//!
//! A system is a space together with finitely many endo-kernels generating
//! the acting monoid. Invariance of states, kernels and sets only needs to be
//! checked on generators, so nothing here ever forms monoid words.
//!
//! The invariant σ-algebra has the same carrier as the space; its atoms are
//! the weakly connected components of the support graph, which has an edge
//! between atoms `x` and `x'` whenever some generator moves mass from `x` to
//! `x'`. A set is invariant exactly when no generator moves mass across its
//! boundary in either direction, so invariant sets are the unions of these
//! components. For deterministic generators the components are the zig-zag
//! classes of the action.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use num_traits::{One, Zero};
use petgraph::unionfind::UnionFind;

use crate::disintegration::{bayes_invert, Decomposition};
use crate::error::{Error, Result};
use crate::kernel::{as_equal, compose, is_deterministic, is_zero_one, Kernel};
use crate::rational::{self, Rational};
use crate::space::{FinSpace, PointRelation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynSystem {
    space: Arc<FinSpace>,
    generators: Vec<(String, Kernel)>,
    deterministic: bool,
    bijective: bool,
}

impl DynSystem {
    pub fn new(space: Arc<FinSpace>, generators: Vec<(String, Kernel)>) -> Result<Self> {
        for (i, (name, m)) in generators.iter().enumerate() {
            if m.dom() != &space || m.cod() != &space {
                return Err(Error::SpaceMismatch(format!("generator {name} is not an endo-kernel of the space")));
            }
            if generators[..i].iter().any(|(other, _)| other == name) {
                return Err(Error::InvalidKernel(format!("generator name {name} is used twice")));
            }
        }
        let deterministic = generators.iter().all(|(_, m)| is_deterministic(m));
        let bijective = deterministic && generators.iter().all(|(_, m)| is_permutation(m));
        Ok(DynSystem { space, generators, deterministic, bijective })
    }

    /// A system generated by point maps, `maps[name][i] = m(carrier[i])`.
    pub fn from_functions(space: Arc<FinSpace>, maps: Vec<(String, Vec<usize>)>) -> Result<Self> {
        let generators = maps
            .into_iter()
            .map(|(name, map)| crate::kernel::kernel_from_function(&map, &space, &space).map(|k| (name, k)))
            .collect::<Result<Vec<_>>>()?;
        DynSystem::new(space, generators)
    }

    pub fn space(&self) -> &Arc<FinSpace> {
        &self.space
    }

    pub fn generators(&self) -> &[(String, Kernel)] {
        &self.generators
    }

    pub fn generator(&self, name: &str) -> Option<&Kernel> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, k)| k)
    }

    /// All generators are zero-one kernels.
    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// All generators are permutation matrices.
    pub fn is_bijective(&self) -> bool {
        self.bijective
    }

    /// Atom maps of the generators of a deterministic system.
    fn atom_maps(&self) -> Option<Vec<Vec<usize>>> {
        self.generators.iter().map(|(_, m)| m.atom_map()).collect()
    }
}

fn is_permutation(m: &Kernel) -> bool {
    match m.atom_map() {
        Some(map) => {
            let mut hit = vec![false; map.len()];
            map.iter().all(|&t| !std::mem::replace(&mut hit[t], true))
        }
        None => false,
    }
}

/// The invariant σ-algebra of a system together with the cocone `r : X -> X_inv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantSigma {
    system: DynSystem,
    quotient_space: Arc<FinSpace>,
    cocone: Kernel,
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
}

/// Computes the invariant σ-algebra as the weak components of the support graph.
pub fn invariant_sigma(sys: &DynSystem) -> InvariantSigma {
    let space = sys.space();
    let n = space.num_atoms();
    let mut uf = UnionFind::<usize>::new(n);
    for (_, m) in sys.generators() {
        for x in 0..n {
            for (y, v) in m.row(x).iter().enumerate() {
                if !v.is_zero() {
                    uf.union(x, y);
                }
            }
        }
    }
    // Number components in order of their smallest atom.
    let mut component_of = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut by_root: HashMap<usize, usize> = HashMap::new();
    for (x, slot) in component_of.iter_mut().enumerate() {
        let root = uf.find(x);
        let c = *by_root.entry(root).or_insert_with(|| {
            components.push(Vec::new());
            components.len() - 1
        });
        components[c].push(x);
        *slot = c;
    }
    let atoms = components.iter().map(|c| space.points_of_atoms(c)).collect();
    let quotient_space =
        Arc::new(FinSpace::new(space.carrier().to_vec(), atoms).expect("components partition the carrier"));
    let cocone = Kernel::from_atom_map(Arc::clone(space), Arc::clone(&quotient_space), &component_of);
    InvariantSigma { system: sys.clone(), quotient_space, cocone, components, component_of }
}

impl InvariantSigma {
    pub fn system(&self) -> &DynSystem {
        &self.system
    }

    pub fn quotient_space(&self) -> &Arc<FinSpace> {
        &self.quotient_space
    }

    /// The zero-one kernel `r(A|x) = 1_A(x)`.
    pub fn cocone(&self) -> &Kernel {
        &self.cocone
    }

    /// Atoms of the original space grouped by quotient atom.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, atom: usize) -> usize {
        self.component_of[atom]
    }

    /// The unique `s̃ : X_inv -> S` with `s̃ ∘ r = s`, for a right-invariant
    /// `s` over a deterministic system.
    pub fn factor(&self, s: &Kernel) -> Result<Kernel> {
        if !self.system.is_deterministic() {
            return Err(Error::NotDeterministicSystem);
        }
        if let Some(name) = right_invariance_violation(s, &self.system)? {
            return Err(Error::NotInvariant(format!("s ∘ {name} differs from s")));
        }
        let mut rows = Vec::with_capacity(self.components.len());
        for (c, component) in self.components.iter().enumerate() {
            let first = s.row(component[0]);
            if component.iter().any(|&x| s.row(x) != first) {
                return Err(Error::RowsDisagree { atom: c });
            }
            rows.push(first.to_vec());
        }
        Ok(Kernel::from_rows_unchecked(Arc::clone(&self.quotient_space), Arc::clone(s.cod()), rows))
    }

    /// Mass a state puts on each quotient atom.
    pub fn component_masses(&self, p: &Kernel) -> Vec<Rational> {
        self.components.iter().map(|c| p.mass(0, c)).collect()
    }

    /// Left-invariant with a deterministic pushforward to `X_inv`. The
    /// zero-one law over invariant sets is evaluated alongside and must agree.
    pub fn is_ergodic(&self, p: &Kernel) -> Result<bool> {
        if !is_left_invariant(p, &self.system)? {
            return Ok(false);
        }
        let pushed = compose(&self.cocone, p)?;
        let by_quotient = is_deterministic(&pushed);
        let by_zero_one = self.component_masses(p).iter().filter(|m| !m.is_zero()).count() == 1;
        assert_eq!(by_quotient, by_zero_one, "ergodicity criteria disagree");
        Ok(by_quotient)
    }

    /// `k : Y -> X` is `q`-almost surely ergodic: `q`-a.s. invariant under
    /// every generator, and `r ∘ k` is zero-one on every `q`-charged row.
    pub fn is_as_ergodic(&self, k: &Kernel, q: &Kernel) -> Result<bool> {
        if k.cod() != self.system.space() {
            return Err(Error::SpaceMismatch("k must land in the system's space".into()));
        }
        if !q.is_state() || q.cod() != k.dom() {
            return Err(Error::SpaceMismatch("q must be a state on the domain of k".into()));
        }
        let mut invariant = true;
        for (_, m) in self.system.generators() {
            if !as_equal(q, &compose(m, k)?, k)? {
                invariant = false;
                break;
            }
        }
        let pushed = compose(&self.cocone, k)?;
        let charged = q.support();
        let zero_one = charged.iter().all(|&y| pushed.row(y).iter().all(rational::is_zero_or_one));
        let verdict = invariant && zero_one;

        let mut rows_ergodic = true;
        for &y in &charged {
            let row = Kernel::state(Arc::clone(k.cod()), k.row(y).to_vec())?;
            if !self.is_ergodic(&row)? {
                rows_ergodic = false;
                break;
            }
        }
        assert_eq!(verdict, rows_ergodic, "almost-sure ergodicity criteria disagree");
        Ok(verdict)
    }

    /// Splits an invariant state into ergodic components: `q = r ∘ p` and
    /// `k = r⁺ₚ`, so that `k ∘ q = p` with `k` almost surely ergodic.
    pub fn decompose(&self, p: &Kernel) -> Result<Decomposition> {
        if !self.system.is_deterministic() {
            return Err(Error::NotDeterministicSystem);
        }
        if !is_left_invariant(p, &self.system)? {
            return Err(Error::NotInvariant("state is moved by a generator".into()));
        }
        let q = compose(&self.cocone, p)?;
        let k = bayes_invert(&self.cocone, p)?;
        Decomposition::new(q, k, p.clone())
    }
}

fn right_invariance_violation(s: &Kernel, sys: &DynSystem) -> Result<Option<String>> {
    if s.dom() != sys.space() {
        return Err(Error::SpaceMismatch("kernel must start at the system's space".into()));
    }
    for (name, m) in sys.generators() {
        if compose(s, m)? != *s {
            return Ok(Some(name.clone()));
        }
    }
    Ok(None)
}

/// `m ∘ c = c` for every generator `m`.
pub fn is_left_invariant(c: &Kernel, sys: &DynSystem) -> Result<bool> {
    if c.cod() != sys.space() {
        return Err(Error::SpaceMismatch("kernel must land in the system's space".into()));
    }
    for (_, m) in sys.generators() {
        if compose(m, c)? != *c {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First generator moving a state, with the first atom where `m ∘ p` and `p` differ.
pub fn left_invariance_violation(p: &Kernel, sys: &DynSystem) -> Result<Option<(String, usize, Rational, Rational)>> {
    if p.cod() != sys.space() {
        return Err(Error::SpaceMismatch("kernel must land in the system's space".into()));
    }
    for (name, m) in sys.generators() {
        let moved = compose(m, p)?;
        for (after, before) in moved.rows().iter().zip(p.rows()) {
            if let Some(x) = (0..after.len()).find(|&x| after[x] != before[x]) {
                return Ok(Some((name.clone(), x, before[x].clone(), after[x].clone())));
            }
        }
    }
    Ok(None)
}

/// `s ∘ m = s` for every generator `m`.
pub fn is_right_invariant(s: &Kernel, sys: &DynSystem) -> Result<bool> {
    Ok(right_invariance_violation(s, sys)?.is_none())
}

/// `m(A|x) = 1_A(x)` for every generator and atom. `set` is a set of carrier
/// points and must be a union of atoms.
pub fn is_invariant_set(set: &[usize], sys: &DynSystem) -> Result<bool> {
    let space = sys.space();
    let atoms = space.atoms_of_set(set)?;
    let mut inside = vec![false; space.num_atoms()];
    for &a in &atoms {
        inside[a] = true;
    }
    for (_, m) in sys.generators() {
        for (x, &x_inside) in inside.iter().enumerate() {
            let mass = m.mass(x, &atoms);
            let expected = if x_inside { mass.is_one() } else { mass.is_zero() };
            if !expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn factor_through_quotient(s: &Kernel, sys: &DynSystem) -> Result<Kernel> {
    invariant_sigma(sys).factor(s)
}

pub fn is_ergodic(p: &Kernel, sys: &DynSystem) -> Result<bool> {
    invariant_sigma(sys).is_ergodic(p)
}

pub fn is_as_ergodic(k: &Kernel, q: &Kernel, sys: &DynSystem) -> Result<bool> {
    invariant_sigma(sys).is_as_ergodic(k, q)
}

pub fn ergodic_decomposition(p: &Kernel, sys: &DynSystem) -> Result<Decomposition> {
    invariant_sigma(sys).decompose(p)
}

/// The ergodic states of a system driven by one function, or by bijections.
///
/// With a single function every quotient atom holds exactly one cycle and its
/// ergodic state is uniform on that cycle. When every generator is a
/// permutation the quotient atoms are orbits and invariance forces the
/// uniform state on each. States are listed in quotient-atom order.
pub fn enumerate_ergodic(sys: &DynSystem) -> Result<Vec<Kernel>> {
    let sigma = invariant_sigma(sys);
    let space = sys.space();
    let uniform_on = |atoms: &[usize]| {
        let weight = rational::ratio(1, atoms.len() as i64);
        let mut probs = vec![Rational::zero(); space.num_atoms()];
        for &a in atoms {
            probs[a] = weight.clone();
        }
        Kernel::state(Arc::clone(space), probs)
    };

    if sys.is_bijective() {
        return sigma.components().iter().map(|c| uniform_on(c)).collect();
    }
    let maps = sys.atom_maps().filter(|maps| maps.len() == 1).ok_or_else(|| {
        Error::UnsupportedGenerators(
            "ergodic states are only enumerated for a single function or for bijections".into(),
        )
    })?;
    let map = &maps[0];
    sigma
        .components()
        .iter()
        .map(|component| {
            let mut seen = HashMap::new();
            let mut orbit = Vec::new();
            let mut x = component[0];
            while !seen.contains_key(&x) {
                seen.insert(x, orbit.len());
                orbit.push(x);
                x = map[x];
            }
            let mut cycle = orbit.split_off(seen[&x]);
            cycle.sort_unstable();
            uniform_on(&cycle)
        })
        .collect()
}

/// The orbit space `X/M` of a deterministic action with the maps relating it
/// to the invariant σ-algebra.
#[derive(Debug, Clone)]
pub struct ZigZagQuotient {
    pub relation: PointRelation,
    pub orbit_space: Arc<FinSpace>,
    /// Quotient map `X -> X/M`.
    pub to_orbits: Kernel,
    /// The same map read on `X_inv`.
    pub descended: Kernel,
    /// `h(A|[x]) = 1_A(x)`, the inverse of `descended`.
    pub inverse: Kernel,
}

/// Classes of the zig-zag relation: atoms joined by alternating forward and
/// backward generator steps. Requires a deterministic system.
pub fn zigzag_relation(sys: &DynSystem) -> Result<PointRelation> {
    let maps = sys.atom_maps().ok_or(Error::NotDeterministicSystem)?;
    let space = sys.space();
    let n = space.num_atoms();
    let mut preimages = vec![Vec::new(); n];
    for map in &maps {
        for (x, &y) in map.iter().enumerate() {
            preimages[y].push(x);
        }
    }
    let mut class_of = vec![usize::MAX; n];
    let mut classes = Vec::new();
    for start in 0..n {
        if class_of[start] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        class_of[start] = id;
        while let Some(x) = queue.pop_front() {
            members.push(x);
            let forward = maps.iter().map(|m| m[x]);
            for y in forward.chain(preimages[x].iter().copied()) {
                if class_of[y] == usize::MAX {
                    class_of[y] = id;
                    queue.push_back(y);
                }
            }
        }
        classes.push(space.points_of_atoms(&members));
    }
    PointRelation::new(Arc::clone(space), classes)
}

pub fn zigzag_quotient(sigma: &InvariantSigma) -> Result<ZigZagQuotient> {
    let sys = sigma.system();
    let relation = zigzag_relation(sys)?;
    let space = sys.space();
    let labels = relation.classes().iter().map(|c| {
        let names: Vec<&str> = c.iter().map(|&p| space.label(p)).collect();
        format!("[{}]", names.join(","))
    });
    let orbit_space = Arc::new(FinSpace::discrete(labels));

    let class_of_atom: Vec<usize> = (0..space.num_atoms()).map(|a| relation.class_of(space.atom(a)[0])).collect();
    let to_orbits = Kernel::from_atom_map(Arc::clone(space), Arc::clone(&orbit_space), &class_of_atom);

    // q descends to X_inv: each invariant atom sits inside one zig-zag class.
    let quotient = sigma.quotient_space();
    let mut descended_map = Vec::with_capacity(quotient.num_atoms());
    for (c, component) in sigma.components().iter().enumerate() {
        let class = class_of_atom[component[0]];
        if component.iter().any(|&a| class_of_atom[a] != class) {
            return Err(Error::RowsDisagree { atom: c });
        }
        descended_map.push(class);
    }
    let descended = Kernel::from_atom_map(Arc::clone(quotient), Arc::clone(&orbit_space), &descended_map);

    let inverse_map: Vec<usize> = relation
        .classes()
        .iter()
        .map(|class| sigma.component_of(space.atom_of(class[0])))
        .collect();
    let inverse = Kernel::from_atom_map(Arc::clone(&orbit_space), Arc::clone(quotient), &inverse_map);
    debug_assert!(is_zero_one(&inverse));

    Ok(ZigZagQuotient { relation, orbit_space, to_orbits, descended, inverse })
}
