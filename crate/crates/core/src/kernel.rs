//! Markov kernels between finite spaces as exact stochastic matrices.
//!
//! Rows are indexed by the atoms of the domain and columns by the atoms of the
//! codomain, which is exactly the measurability requirement on a finite
//! kernel: `k(B|x)` cannot vary inside an atom of the domain. A state is a
//! kernel out of the one-point space.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::space::{product, FinSpace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    dom: Arc<FinSpace>,
    cod: Arc<FinSpace>,
    rows: Vec<Vec<Rational>>,
}

/// The structural morphisms of the Markov category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structural {
    Identity,
    Copy,
    Delete,
    Swap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn same_space(a: &Arc<FinSpace>, b: &Arc<FinSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Kernel {
    /// Validates shape, non-negativity and that every row sums to one.
    pub fn new(dom: Arc<FinSpace>, cod: Arc<FinSpace>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        if rows.len() != dom.num_atoms() {
            return Err(Error::InvalidKernel(format!(
                "{} rows for a domain with {} atoms",
                rows.len(),
                dom.num_atoms()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cod.num_atoms() {
                return Err(Error::InvalidKernel(format!(
                    "row {i} has {} entries for a codomain with {} atoms",
                    row.len(),
                    cod.num_atoms()
                )));
            }
            if let Some(j) = row.iter().position(|v| v < &Rational::zero()) {
                return Err(Error::InvalidKernel(format!("row {i} column {j} is negative")));
            }
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(Error::InvalidKernel(format!("row {i} sums to {sum}")));
            }
        }
        Ok(Kernel { dom, cod, rows })
    }

    pub(crate) fn from_rows_unchecked(dom: Arc<FinSpace>, cod: Arc<FinSpace>, rows: Vec<Vec<Rational>>) -> Self {
        debug_assert!(Kernel::new(dom.clone(), cod.clone(), rows.clone()).is_ok());
        Kernel { dom, cod, rows }
    }

    /// A probability vector over the atoms of `cod`, as a kernel out of the unit.
    pub fn state(cod: Arc<FinSpace>, probs: Vec<Rational>) -> Result<Self> {
        Kernel::new(Arc::new(FinSpace::unit()), cod, vec![probs])
    }

    /// Point mass on atom `atom`.
    pub fn dirac(cod: Arc<FinSpace>, atom: usize) -> Self {
        let unit = Arc::new(FinSpace::unit());
        Kernel::from_atom_map(unit, cod, &[atom])
    }

    /// The zero-one kernel sending domain atom `a` to codomain atom `map[a]`.
    pub fn from_atom_map(dom: Arc<FinSpace>, cod: Arc<FinSpace>, map: &[usize]) -> Self {
        assert_eq!(map.len(), dom.num_atoms(), "one target per domain atom");
        let rows = map
            .iter()
            .map(|&target| {
                assert!(target < cod.num_atoms(), "target atom {target} out of range");
                (0..cod.num_atoms()).map(|b| if b == target { rational::one() } else { rational::zero() }).collect()
            })
            .collect();
        Kernel { dom, cod, rows }
    }

    pub fn identity(x: &Arc<FinSpace>) -> Self {
        let map: Vec<usize> = (0..x.num_atoms()).collect();
        Kernel::from_atom_map(Arc::clone(x), Arc::clone(x), &map)
    }

    /// The diagonal `X -> X⊗X`. Only defined when every atom is a point.
    pub fn copy(x: &Arc<FinSpace>) -> Result<Self> {
        if let Some((atom, block)) = x.atoms().iter().enumerate().find(|(_, b)| b.len() != 1) {
            return Err(Error::CopyNeedsPoints { atom, size: block.len() });
        }
        let n = x.num_atoms();
        let map: Vec<usize> = (0..n).map(|a| a * n + a).collect();
        Ok(Kernel::from_atom_map(Arc::clone(x), Arc::new(product(x, x)), &map))
    }

    /// The unique kernel to the unit.
    pub fn delete(x: &Arc<FinSpace>) -> Self {
        let map = vec![0; x.num_atoms()];
        Kernel::from_atom_map(Arc::clone(x), Arc::new(FinSpace::unit()), &map)
    }

    /// The symmetry `X⊗Y -> Y⊗X`.
    pub fn swap(x: &Arc<FinSpace>, y: &Arc<FinSpace>) -> Self {
        let (nx, ny) = (x.num_atoms(), y.num_atoms());
        let map: Vec<usize> = (0..nx * ny).map(|i| (i % ny) * nx + i / ny).collect();
        Kernel::from_atom_map(Arc::new(product(x, y)), Arc::new(product(y, x)), &map)
    }

    /// Builds one of the structural kernels. `Swap` needs the second space.
    pub fn structural(kind: Structural, x: &Arc<FinSpace>, y: Option<&Arc<FinSpace>>) -> Result<Self> {
        match kind {
            Structural::Identity => Ok(Kernel::identity(x)),
            Structural::Copy => Kernel::copy(x),
            Structural::Delete => Ok(Kernel::delete(x)),
            Structural::Swap => {
                let y = y.ok_or_else(|| Error::SpaceMismatch("swap needs a second space".into()))?;
                Ok(Kernel::swap(x, y))
            }
        }
    }

    /// The associator `(X⊗Y)⊗Z -> X⊗(Y⊗Z)`. With row-major products both
    /// sides enumerate atoms in the same order, so the matrix is a unit matrix
    /// between differently labelled spaces.
    pub fn associator(x: &Arc<FinSpace>, y: &Arc<FinSpace>, z: &Arc<FinSpace>) -> Self {
        let left = Arc::new(product(&Arc::new(product(x, y)), z));
        let right = Arc::new(product(x, &Arc::new(product(y, z))));
        let map: Vec<usize> = (0..left.num_atoms()).collect();
        Kernel::from_atom_map(left, right, &map)
    }

    /// `I⊗X -> X`.
    pub fn left_unitor(x: &Arc<FinSpace>) -> Self {
        let dom = Arc::new(product(&Arc::new(FinSpace::unit()), x));
        let map: Vec<usize> = (0..x.num_atoms()).collect();
        Kernel::from_atom_map(dom, Arc::clone(x), &map)
    }

    /// `X⊗I -> X`.
    pub fn right_unitor(x: &Arc<FinSpace>) -> Self {
        let dom = Arc::new(product(x, &Arc::new(FinSpace::unit())));
        let map: Vec<usize> = (0..x.num_atoms()).collect();
        Kernel::from_atom_map(dom, Arc::clone(x), &map)
    }

    pub fn dom(&self) -> &Arc<FinSpace> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FinSpace> {
        &self.cod
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn row(&self, atom: usize) -> &[Rational] {
        &self.rows[atom]
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.rows[row][col]
    }

    pub fn is_state(&self) -> bool {
        self.dom.is_unit()
    }

    /// Probability vector of a state.
    pub fn probs(&self) -> &[Rational] {
        assert!(self.is_state(), "probs() on a kernel with {} rows", self.rows.len());
        &self.rows[0]
    }

    /// `k(B|row)` for a set `B` of codomain atoms.
    pub fn mass(&self, row: usize, atoms: &[usize]) -> Rational {
        atoms.iter().map(|&b| &self.rows[row][b]).sum()
    }

    /// Codomain atoms carrying positive mass in some row.
    pub fn support(&self) -> Vec<usize> {
        (0..self.cod.num_atoms()).filter(|&b| self.rows.iter().any(|r| !r[b].is_zero())).collect()
    }

    /// For a zero-one kernel, the codomain atom each row points to.
    pub fn atom_map(&self) -> Option<Vec<usize>> {
        self.rows
            .iter()
            .map(|row| {
                if row.iter().all(rational::is_zero_or_one) {
                    row.iter().position(One::is_one)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Same matrix over new spaces with matching atom counts.
    pub fn relabel(&self, dom: Arc<FinSpace>, cod: Arc<FinSpace>) -> Result<Self> {
        if dom.num_atoms() != self.dom.num_atoms() || cod.num_atoms() != self.cod.num_atoms() {
            return Err(Error::SpaceMismatch("relabel must preserve atom counts".into()));
        }
        Ok(Kernel { dom, cod, rows: self.rows.clone() })
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            let entries: Vec<String> = row.iter().map(rational::format).collect();
            writeln!(f, "{}: [{}]", self.dom.atom_label(i), entries.join(", "))?;
        }
        Ok(())
    }
}

/// `h ∘ k`: first `k`, then `h`, summing over the middle atoms.
pub fn compose(h: &Kernel, k: &Kernel) -> Result<Kernel> {
    if !same_space(&k.cod, &h.dom) {
        return Err(Error::SpaceMismatch(format!(
            "cannot compose: codomain {} differs from domain {}",
            k.cod, h.dom
        )));
    }
    let width = h.cod.num_atoms();
    let rows = k
        .rows
        .iter()
        .map(|row| {
            let mut out = vec![Rational::zero(); width];
            for (y, weight) in row.iter().enumerate() {
                if weight.is_zero() {
                    continue;
                }
                for (z, value) in h.rows[y].iter().enumerate() {
                    if !value.is_zero() {
                        out[z] += weight * value;
                    }
                }
            }
            out
        })
        .collect();
    Ok(Kernel { dom: Arc::clone(&k.dom), cod: Arc::clone(&h.cod), rows })
}

/// Independent product `k ⊗ h`.
pub fn tensor(k: &Kernel, h: &Kernel) -> Kernel {
    let dom = Arc::new(product(&k.dom, &h.dom));
    let cod = Arc::new(product(&k.cod, &h.cod));
    let width = cod.num_atoms();
    let h_width = h.cod.num_atoms();
    let mut rows = Vec::with_capacity(dom.num_atoms());
    for k_row in &k.rows {
        for h_row in &h.rows {
            let mut out = vec![Rational::zero(); width];
            for (y, kv) in k_row.iter().enumerate() {
                if kv.is_zero() {
                    continue;
                }
                for (w, hv) in h_row.iter().enumerate() {
                    if !hv.is_zero() {
                        out[y * h_width + w] = kv * hv;
                    }
                }
            }
            rows.push(out);
        }
    }
    Kernel { dom, cod, rows }
}

/// Marginal of a state on a product: sums out the other factor.
pub fn marginal(p: &Kernel, side: Side) -> Result<Kernel> {
    let (left, right) = p.cod.factors().ok_or(Error::NotAProduct)?;
    let (nl, nr) = (left.num_atoms(), right.num_atoms());
    let rows = p
        .rows
        .iter()
        .map(|row| match side {
            Side::Left => (0..nl).map(|a| (0..nr).map(|b| &row[a * nr + b]).sum()).collect(),
            Side::Right => (0..nr).map(|b| (0..nl).map(|a| &row[a * nr + b]).sum()).collect(),
        })
        .collect();
    let cod = match side {
        Side::Left => Arc::clone(left),
        Side::Right => Arc::clone(right),
    };
    Ok(Kernel { dom: Arc::clone(&p.dom), cod, rows })
}

/// Entry test: every value is zero or one.
pub fn is_zero_one(f: &Kernel) -> bool {
    f.rows.iter().flatten().all(rational::is_zero_or_one)
}

/// The diagram `copy ∘ f = (f ⊗ f) ∘ copy`, evaluated literally. Needs copy on
/// both ends.
pub fn deterministic_by_diagram(f: &Kernel) -> Result<bool> {
    let lhs = compose(&Kernel::copy(&f.cod)?, f)?;
    let rhs = compose(&tensor(f, f), &Kernel::copy(&f.dom)?)?;
    Ok(lhs == rhs)
}

/// Determinism, decided by the zero-one entry test. When both spaces admit
/// copy the diagrammatic form is evaluated too and must agree.
pub fn is_deterministic(f: &Kernel) -> bool {
    let by_entries = is_zero_one(f);
    if f.dom.is_discrete() && f.cod.is_discrete() {
        let by_diagram = deterministic_by_diagram(f).expect("copy exists on discrete spaces");
        assert_eq!(by_entries, by_diagram, "determinism tests disagree on\n{f}");
    }
    by_entries
}

/// Whether a state on a product is the product of its marginals.
pub fn is_independent(p: &Kernel) -> Result<bool> {
    let left = marginal(p, Side::Left)?;
    let right = marginal(p, Side::Right)?;
    let joint = tensor(&left, &right);
    // Domains are I⊗I against I; only the matrices need comparing.
    Ok(joint.rows.len() == 1 && joint.rows[0] == p.rows[0])
}

fn check_as_shapes(p: &Kernel, f: &Kernel, g: &Kernel) -> Result<()> {
    if !same_space(&p.cod, &f.dom) || !same_space(&p.cod, &g.dom) {
        return Err(Error::SpaceMismatch("p must land in the domain of f and g".into()));
    }
    if !same_space(&f.cod, &g.cod) {
        return Err(Error::SpaceMismatch("f and g must share a codomain".into()));
    }
    Ok(())
}

/// Support form of almost-sure equality: rows of `f` and `g` agree at every
/// atom that `p` charges from some input.
pub fn as_equal_on_support(p: &Kernel, f: &Kernel, g: &Kernel) -> Result<bool> {
    check_as_shapes(p, f, g)?;
    Ok(p.support().into_iter().all(|x| f.rows[x] == g.rows[x]))
}

/// Diagrammatic form: `(id ⊗ f) ∘ copy ∘ p = (id ⊗ g) ∘ copy ∘ p`.
pub fn as_equal_by_diagram(p: &Kernel, f: &Kernel, g: &Kernel) -> Result<bool> {
    check_as_shapes(p, f, g)?;
    let x = &f.dom;
    let copied = compose(&Kernel::copy(x)?, p)?;
    let id = Kernel::identity(x);
    let lhs = compose(&tensor(&id, f), &copied)?;
    let rhs = compose(&tensor(&id, g), &copied)?;
    Ok(lhs == rhs)
}

/// `f` and `g` are `p`-almost surely equal. On spaces with copy both forms
/// are evaluated and must agree; on coarse spaces the support form decides.
pub fn as_equal(p: &Kernel, f: &Kernel, g: &Kernel) -> Result<bool> {
    let reduced = as_equal_on_support(p, f, g)?;
    if f.dom.is_discrete() {
        let diagram = as_equal_by_diagram(p, f, g)?;
        assert_eq!(reduced, diagram, "almost-sure equality tests disagree");
    }
    Ok(reduced)
}

/// The zero-one kernel of a point map `map[i] = f(carrier[i])`. Every atom of
/// `dom` must land inside a single atom of `cod`.
pub fn kernel_from_function(map: &[usize], dom: &Arc<FinSpace>, cod: &Arc<FinSpace>) -> Result<Kernel> {
    if map.len() != dom.len() {
        return Err(Error::InvalidKernel(format!(
            "function gives {} images for {} points",
            map.len(),
            dom.len()
        )));
    }
    if let Some(i) = map.iter().position(|&y| y >= cod.len()) {
        return Err(Error::InvalidKernel(format!("image of point {i} is out of range")));
    }
    let mut atom_map = Vec::with_capacity(dom.num_atoms());
    for (a, atom) in dom.atoms().iter().enumerate() {
        let target = cod.atom_of(map[atom[0]]);
        if let Some(&p) = atom.iter().find(|&&p| cod.atom_of(map[p]) != target) {
            let cut = cod.atom_of(map[p]);
            return Err(Error::NotMeasurable(format!(
                "preimage of atom {} cuts domain atom {a} {}",
                cod.atom_label(cut),
                dom.atom_label(a)
            )));
        }
        atom_map.push(target);
    }
    Ok(Kernel::from_atom_map(Arc::clone(dom), Arc::clone(cod), &atom_map))
}
