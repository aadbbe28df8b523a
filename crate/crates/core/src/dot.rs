//! Graphviz export of the support graph, clustered by invariant atom.

use std::fmt::Write;

use num_traits::{One, Zero};

use crate::dynamics::InvariantSigma;
use crate::rational;

fn quote(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One node per atom of the space, one cluster per atom of the invariant
/// σ-algebra, one edge per generator transition with positive mass. Edges
/// carry the generator name and, unless it is 1, the transition probability.
pub fn support_graph_dot(sigma: &InvariantSigma) -> String {
    let sys = sigma.system();
    let space = sys.space();
    let mut out = String::from("digraph support {\n  node [shape=circle];\n");
    for (c, component) in sigma.components().iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{c} {{");
        let _ = writeln!(out, "    label={};", quote(&sigma.quotient_space().atom_label(c)));
        for &a in component {
            let _ = writeln!(out, "    n{a} [label={}];", quote(&space.atom_label(a)));
        }
        out.push_str("  }\n");
    }
    for (name, m) in sys.generators() {
        for x in 0..space.num_atoms() {
            for (y, v) in m.row(x).iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let label = if v.is_one() { name.clone() } else { format!("{name} {}", rational::format(v)) };
                let _ = writeln!(out, "  n{x} -> n{y} [label={}];", quote(&label));
            }
        }
    }
    out.push_str("}\n");
    out
}
