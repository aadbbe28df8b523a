//! Finite measurable spaces.
//!
//! A finite σ-algebra is presented by its atoms: a partition of the carrier
//! into nonempty blocks. Measurable sets are exactly the unions of atoms, so
//! they are handled as sorted point-index sets and checked on demand.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::Kernel;

#[derive(Debug, Clone)]
pub struct FinSpace {
    carrier: Vec<String>,
    atoms: Vec<Vec<usize>>,
    atom_of: Vec<usize>,
    factors: Option<(Arc<FinSpace>, Arc<FinSpace>)>,
}

// Factor structure is bookkeeping; two spaces are equal when their points and
// atoms are.
impl PartialEq for FinSpace {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier && self.atoms == other.atoms
    }
}

impl Eq for FinSpace {}

impl FinSpace {
    /// Builds a space from point labels and an atom partition given as index
    /// sets. Indices inside each atom are sorted; atom order is kept.
    pub fn new(carrier: Vec<String>, atoms: Vec<Vec<usize>>) -> Result<Self> {
        let mut atom_of = vec![usize::MAX; carrier.len()];
        let mut sorted_atoms = Vec::with_capacity(atoms.len());
        for (a, atom) in atoms.into_iter().enumerate() {
            if atom.is_empty() {
                return Err(Error::InvalidSpace(format!("atom {a} is empty")));
            }
            let mut atom = atom;
            atom.sort_unstable();
            for &i in &atom {
                if i >= carrier.len() {
                    return Err(Error::InvalidSpace(format!(
                        "atom {a} contains index {i}, carrier has {} points",
                        carrier.len()
                    )));
                }
                if atom_of[i] != usize::MAX {
                    return Err(Error::InvalidSpace(format!(
                        "index {i} appears in atoms {} and {a}",
                        atom_of[i]
                    )));
                }
                atom_of[i] = a;
            }
            sorted_atoms.push(atom);
        }
        if let Some(i) = atom_of.iter().position(|&a| a == usize::MAX) {
            return Err(Error::InvalidSpace(format!("index {i} is not covered by any atom")));
        }
        Ok(FinSpace { carrier, atoms: sorted_atoms, atom_of, factors: None })
    }

    /// Every point is its own atom.
    pub fn discrete<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        let carrier: Vec<String> = labels.into_iter().map(Into::into).collect();
        let atoms = (0..carrier.len()).map(|i| vec![i]).collect();
        FinSpace::new(carrier, atoms).expect("singleton atoms partition the carrier")
    }

    /// The one-point space, the monoidal unit.
    pub fn unit() -> Self {
        FinSpace::discrete(["*"])
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn atoms(&self) -> &[Vec<usize>] {
        &self.atoms
    }

    pub fn atom(&self, a: usize) -> &[usize] {
        &self.atoms[a]
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    /// Index of the atom containing `point`.
    pub fn atom_of(&self, point: usize) -> usize {
        self.atom_of[point]
    }

    pub fn is_discrete(&self) -> bool {
        self.atoms.iter().all(|a| a.len() == 1)
    }

    pub fn is_unit(&self) -> bool {
        self.carrier.len() == 1
    }

    /// The two factors when this space was built by [`product`].
    pub fn factors(&self) -> Option<(&Arc<FinSpace>, &Arc<FinSpace>)> {
        self.factors.as_ref().map(|(l, r)| (l, r))
    }

    pub fn label(&self, point: usize) -> &str {
        &self.carrier[point]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.carrier.iter().position(|l| l == label)
    }

    /// `a` for a singleton atom, `{a,b}` otherwise.
    pub fn atom_label(&self, a: usize) -> String {
        match self.atoms[a].as_slice() {
            [only] => self.carrier[*only].clone(),
            points => format!("{{{}}}", self.join_labels(points)),
        }
    }

    /// `{a,b,...}` for an arbitrary set of points.
    pub fn set_label(&self, points: &[usize]) -> String {
        format!("{{{}}}", self.join_labels(points))
    }

    fn join_labels(&self, points: &[usize]) -> String {
        points.iter().map(|&p| self.carrier[p].as_str()).collect::<Vec<_>>().join(",")
    }

    /// Points of a set of atoms, sorted.
    pub fn points_of_atoms(&self, atoms: &[usize]) -> Vec<usize> {
        let mut points: Vec<usize> = atoms.iter().flat_map(|&a| self.atoms[a].iter().copied()).collect();
        points.sort_unstable();
        points
    }

    /// Converts a point set into the sorted atom indices it is the union of.
    /// Fails with `NotMeasurable` naming the first atom the set cuts through.
    pub fn atoms_of_set(&self, points: &[usize]) -> Result<Vec<usize>> {
        let mut member = vec![false; self.len()];
        for &p in points {
            if p >= self.len() {
                return Err(Error::NotMeasurable(format!(
                    "index {p} is outside a carrier of {} points",
                    self.len()
                )));
            }
            member[p] = true;
        }
        let mut result = Vec::new();
        for (a, atom) in self.atoms.iter().enumerate() {
            let inside = atom.iter().filter(|&&p| member[p]).count();
            if inside == atom.len() {
                result.push(a);
            } else if inside > 0 {
                return Err(Error::NotMeasurable(format!(
                    "set cuts atom {a} {}",
                    self.atom_label(a)
                )));
            }
        }
        Ok(result)
    }

    /// The indistinguishability relation: two points are related iff no
    /// measurable set separates them, i.e. they share an atom.
    pub fn indistinguishability(self: &Arc<Self>) -> PointRelation {
        PointRelation { space: Arc::clone(self), classes: self.atoms.clone() }
    }
}

impl fmt::Display for FinSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = (0..self.num_atoms()).map(|a| self.atom_label(a)).collect();
        write!(f, "[{}]", atoms.join(" | "))
    }
}

/// An equivalence relation on the points of a space, stored by its classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointRelation {
    space: Arc<FinSpace>,
    classes: Vec<Vec<usize>>,
}

impl PointRelation {
    pub fn new(space: Arc<FinSpace>, classes: Vec<Vec<usize>>) -> Result<Self> {
        // Reuse the partition validation.
        let checked = FinSpace::new(space.carrier().to_vec(), classes)?;
        Ok(PointRelation { space, classes: checked.atoms })
    }

    pub fn space(&self) -> &Arc<FinSpace> {
        &self.space
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, point: usize) -> usize {
        self.classes.iter().position(|c| c.contains(&point)).expect("classes cover the carrier")
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.class_of(x) == self.class_of(y)
    }
}

/// Cartesian product with the product σ-algebra. Pair `(i, j)` sits at
/// `i * |y| + j` and atom pair `(a, b)` at `a * atoms(y) + b`.
pub fn product(x: &Arc<FinSpace>, y: &Arc<FinSpace>) -> FinSpace {
    let ny = y.len();
    let carrier = x
        .carrier
        .iter()
        .flat_map(|l| y.carrier.iter().map(move |r| format!("({l},{r})")))
        .collect();
    let mut atoms = Vec::with_capacity(x.num_atoms() * y.num_atoms());
    for ax in &x.atoms {
        for ay in &y.atoms {
            let mut block: Vec<usize> = ax.iter().flat_map(|&i| ay.iter().map(move |&j| i * ny + j)).collect();
            block.sort_unstable();
            atoms.push(block);
        }
    }
    let mut space = FinSpace::new(carrier, atoms).expect("rectangles of atoms partition the product");
    space.factors = Some((Arc::clone(x), Arc::clone(y)));
    space
}

/// Quotient of a space by indistinguishability: one point per atom, all atoms
/// singletons. Returns the quotient together with the quotient-map kernel and
/// its zero-one inverse.
pub fn indistinguishability_quotient(x: &Arc<FinSpace>) -> (Arc<FinSpace>, Kernel, Kernel) {
    let quotient = Arc::new(FinSpace::discrete((0..x.num_atoms()).map(|a| x.atom_label(a))));
    let atom_map: Vec<usize> = (0..x.num_atoms()).collect();
    let to_quotient = Kernel::from_atom_map(Arc::clone(x), Arc::clone(&quotient), &atom_map);
    let back = Kernel::from_atom_map(Arc::clone(&quotient), Arc::clone(x), &atom_map);
    (quotient, to_quotient, back)
}

#[cfg(test)]
mod tests {
    use num_traits::One;

    use super::*;
    use crate::kernel::{compose, is_deterministic, Kernel};

    fn coarse_abc() -> Arc<FinSpace> {
        Arc::new(FinSpace::new(vec!["a".into(), "b".into(), "c".into()], vec![vec![0, 1], vec![2]]).unwrap())
    }

    #[test]
    fn validation_names_offending_index() {
        let err = FinSpace::new(vec!["a".into(), "b".into()], vec![vec![0, 5]]).unwrap_err();
        assert!(err.to_string().contains("index 5"), "{err}");
        let err = FinSpace::new(vec!["a".into(), "b".into()], vec![vec![0], vec![0, 1]]).unwrap_err();
        assert!(err.to_string().contains("index 0"), "{err}");
        let err = FinSpace::new(vec!["a".into(), "b".into()], vec![vec![1]]).unwrap_err();
        assert!(err.to_string().contains("index 0"), "{err}");
        let err = FinSpace::new(vec!["a".into()], vec![vec![0], vec![]]).unwrap_err();
        assert!(err.to_string().contains("atom 1"), "{err}");
    }

    #[test]
    fn product_with_unit_mirrors_factor() {
        let unit = Arc::new(FinSpace::unit());
        let y = coarse_abc();
        let p = product(&unit, &y);
        assert_eq!(p.len(), y.len());
        assert_eq!(p.atoms(), y.atoms());
        let p = product(&y, &unit);
        assert_eq!(p.atoms(), y.atoms());
    }

    #[test]
    fn discrete_product() {
        let x = Arc::new(FinSpace::discrete(["a", "b"]));
        let y = Arc::new(FinSpace::discrete(["c", "d", "e"]));
        let p = product(&x, &y);
        assert_eq!(p.len(), 6);
        assert_eq!(p.num_atoms(), 6);
        assert!(p.is_discrete());
        assert_eq!(p.label(4), "(b,d)");
    }

    #[test]
    fn coarse_times_discrete() {
        let x = Arc::new(FinSpace::new(vec!["a".into(), "b".into()], vec![vec![0, 1]]).unwrap());
        let y = Arc::new(FinSpace::discrete(["c", "d"]));
        let p = product(&x, &y);
        assert_eq!(p.len(), 4);
        // (a,c)=0 (a,d)=1 (b,c)=2 (b,d)=3
        assert_eq!(p.atoms(), &[vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn measurable_sets() {
        let x = coarse_abc();
        assert_eq!(x.atoms_of_set(&[0, 1]).unwrap(), vec![0]);
        assert_eq!(x.atoms_of_set(&[]).unwrap(), Vec::<usize>::new());
        assert_eq!(x.atoms_of_set(&[2, 1, 0]).unwrap(), vec![0, 1]);
        assert!(matches!(x.atoms_of_set(&[0]), Err(Error::NotMeasurable(_))));
    }

    #[test]
    fn quotient_of_discrete_is_identity() {
        let x = Arc::new(FinSpace::discrete(["a", "b", "c"]));
        let (q, to, back) = indistinguishability_quotient(&x);
        assert_eq!(*q, *x);
        assert_eq!(to, Kernel::identity(&x));
        assert_eq!(back, Kernel::identity(&x));
    }

    #[test]
    fn quotient_of_coarse_space() {
        let x = coarse_abc();
        let (q, to, back) = indistinguishability_quotient(&x);
        assert_eq!(q.carrier(), &["{a,b}".to_string(), "c".to_string()]);
        assert!(q.is_discrete());
        // Row for atom {a,b} (i.e. points a and b) sends to the first point.
        assert!(to.entry(0, 0).is_one());
        assert!(is_deterministic(&to) && is_deterministic(&back));
        assert_eq!(compose(&back, &to).unwrap(), Kernel::identity(&x));
        assert_eq!(compose(&to, &back).unwrap(), Kernel::identity(&q));
    }

    #[test]
    fn quotient_of_unit() {
        let unit = Arc::new(FinSpace::unit());
        let (q, to, back) = indistinguishability_quotient(&unit);
        assert_eq!(*q, *unit);
        assert_eq!(to, Kernel::identity(&unit));
        assert_eq!(back, Kernel::identity(&unit));
    }

    #[test]
    fn indistinguishability_matches_atoms() {
        let x = coarse_abc();
        let rel = x.indistinguishability();
        assert!(rel.related(0, 1));
        assert!(!rel.related(0, 2));
        // Brute force over the measurable sets (unions of atoms).
        for x_pt in 0..3 {
            for y_pt in 0..3 {
                let separated = (0u32..4).any(|mask| {
                    let pts = x.points_of_atoms(&(0..2).filter(|a| mask & (1 << a) != 0).collect::<Vec<_>>());
                    pts.contains(&x_pt) != pts.contains(&y_pt)
                });
                assert_eq!(rel.related(x_pt, y_pt), !separated);
            }
        }
    }
}
