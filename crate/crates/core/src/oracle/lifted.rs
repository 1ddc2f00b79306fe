//! Membership in a tree's world by a single linear program, without
//! enumerating vertices.
//!
//! Each node `N` gets a mass `m_N`, with `m_root = 1`, and for each branch
//! `lo·m_N ≤ m_child ≤ hi·m_N` and `Σ m_child = m_N`. A state leaf sends its
//! mass to its state; a hull leaf splits its mass over its states. The point
//! is a member iff the leaf masses can add up to it.

use num::{One, Zero};

use super::simplex::LinearProgram;
use crate::credal::{Distribution, Rational};
use crate::error::Result;
use crate::tree::AffineTree;

/// A sparse equality row.
struct Row {
    terms: Vec<(usize, Rational)>,
    rhs: Rational,
}

#[derive(Default)]
struct Builder {
    n_vars: usize,
    rows: Vec<Row>,
    /// Variables (with coefficients) contributing to each state's mass.
    outflow: Vec<Vec<usize>>,
}

impl Builder {
    fn var(&mut self) -> usize {
        self.n_vars += 1;
        self.n_vars - 1
    }

    fn node(&mut self, t: &AffineTree, mass: usize) {
        match t {
            AffineTree::State(s) => self.outflow[s.0].push(mass),
            AffineTree::Set(b) | AffineTree::Finite(b) => {
                let mut terms = vec![(mass, -Rational::one())];
                for s in b.iter() {
                    let v = self.var();
                    self.outflow[s.0].push(v);
                    terms.push((v, Rational::one()));
                }
                self.rows.push(Row { terms, rhs: Rational::zero() });
            }
            AffineTree::Star(bs) => {
                let mut total = vec![(mass, -Rational::one())];
                for b in bs {
                    let child = self.var();
                    total.push((child, Rational::one()));
                    // m_child - lo·m_N - s = 0
                    let s_lo = self.var();
                    self.rows.push(Row {
                        terms: vec![(child, Rational::one()), (mass, -b.weight.lo().clone()), (s_lo, -Rational::one())],
                        rhs: Rational::zero(),
                    });
                    // hi·m_N - m_child - s = 0
                    let s_hi = self.var();
                    self.rows.push(Row {
                        terms: vec![(mass, b.weight.hi().clone()), (child, -Rational::one()), (s_hi, -Rational::one())],
                        rhs: Rational::zero(),
                    });
                    self.node(&b.child, child);
                }
                self.rows.push(Row { terms: total, rhs: Rational::zero() });
            }
        }
    }
}

/// `x ∈ world(tree)` (for trees with finite leaves, the hull of the world).
pub fn member_in_tree(x: &Distribution, tree: &AffineTree) -> Result<bool> {
    tree.validate_over(x.len()).into_result()?;
    let mut b = Builder { outflow: vec![Vec::new(); x.len()], ..Default::default() };
    let root = b.var();
    b.rows.push(Row { terms: vec![(root, Rational::one())], rhs: Rational::one() });
    b.node(tree, root);
    for (s, xs) in x.masses().iter().enumerate() {
        let terms = b.outflow[s].iter().map(|&v| (v, Rational::one())).collect();
        b.rows.push(Row { terms, rhs: xs.clone() });
    }
    let mut lp = LinearProgram::new(b.n_vars);
    for row in b.rows {
        let mut dense = vec![Rational::zero(); b.n_vars];
        for (v, c) in row.terms {
            dense[v] += c;
        }
        lp.add_equality(dense, row.rhs);
    }
    Ok(lp.is_feasible())
}

/// `world(sup) ⊇ world(sub)`, checking each generator of `sub` against `sup`
/// directly.
pub fn subsumes_lifted(sup: &AffineTree, sub: &AffineTree, n_states: usize) -> Result<bool> {
    let sub_vs = super::vertices::world_vertices(sub, n_states)?;
    for v in sub_vs.vertices() {
        if !member_in_tree(v, sup)? {
            return Ok(false);
        }
    }
    Ok(true)
}
