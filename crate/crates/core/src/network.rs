//! Constraint networks of disjunctive RCC-8 relations.
//!
//! [`ConstraintNetwork::algebraic_closure`] refines a network to its
//! path-consistent fixed point. It is sound but not complete for arbitrary
//! disjunctions; [`ConstraintNetwork::refine_to_scenario`] is the decision
//! procedure.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{BaseRelation, CompositionTable, RelationSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("constraint on ({x}, {y}) became empty")]
    EmptyConstraint { x: String, y: String },
    #[error("variable {0} can only be constrained to EQ with itself")]
    SelfConstraint(String),
    #[error("invalid network document: {0}")]
    Document(String),
}

/// Marker for a network that closure proved inconsistent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inconsistent;

impl fmt::Display for Inconsistent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("INCONSISTENT")
    }
}

/// One record of the network input document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintRecord {
    pub x: String,
    pub y: String,
    pub rels: RelationSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintNetwork {
    variables: Vec<String>,
    // row-major n x n; (i, i) = {EQ}, (j, i) = converse of (i, j)
    constraints: Vec<RelationSet>,
}

impl ConstraintNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// A network over `n` variables named `v0..`, every off-diagonal pair ALL.
    pub fn unconstrained(n: usize) -> Self {
        let mut net = Self::new();
        for i in 0..n {
            net.variable(&format!("v{i}"));
        }
        net
    }

    pub fn from_records(records: &[ConstraintRecord]) -> Result<Self, NetworkError> {
        let mut net = Self::new();
        for rec in records {
            net.add_constraint(&rec.x, &rec.y, rec.rels)?;
        }
        Ok(net)
    }

    pub fn from_json(source: &str) -> Result<Self, NetworkError> {
        let records: Vec<ConstraintRecord> =
            serde_json::from_str(source).map_err(|e| NetworkError::Document(e.to_string()))?;
        Self::from_records(&records)
    }

    pub fn load(path: &Path) -> Result<Self, NetworkError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| NetworkError::Document(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Index of `name`, creating the variable if it is new.
    pub fn variable(&mut self, name: &str) -> usize {
        if let Some(i) = self.index_of(name) {
            return i;
        }
        let n = self.variables.len();
        let mut grown = vec![RelationSet::ALL; (n + 1) * (n + 1)];
        for i in 0..n {
            for j in 0..n {
                grown[i * (n + 1) + j] = self.constraints[i * n + j];
            }
        }
        grown[n * (n + 1) + n] = RelationSet::singleton(BaseRelation::EQ);
        self.variables.push(name.to_string());
        self.constraints = grown;
        n
    }

    pub fn get(&self, i: usize, j: usize) -> RelationSet {
        self.constraints[i * self.len() + j]
    }

    pub fn get_named(&self, x: &str, y: &str) -> Option<RelationSet> {
        Some(self.get(self.index_of(x)?, self.index_of(y)?))
    }

    fn set(&mut self, i: usize, j: usize, s: RelationSet) {
        let n = self.len();
        self.constraints[i * n + j] = s;
        self.constraints[j * n + i] = s.converse();
    }

    /// Intersects the `(x, y)` constraint with `s`, keeping `(y, x)` coherent.
    pub fn add_constraint(&mut self, x: &str, y: &str, s: RelationSet) -> Result<(), NetworkError> {
        if x == y {
            if s.contains(BaseRelation::EQ) {
                self.variable(x);
                return Ok(());
            }
            return Err(NetworkError::SelfConstraint(x.to_string()));
        }
        let i = self.variable(x);
        let j = self.variable(y);
        let refined = self.get(i, j).intersection(s);
        if refined.is_empty() {
            return Err(NetworkError::EmptyConstraint {
                x: x.to_string(),
                y: y.to_string(),
            });
        }
        self.set(i, j, refined);
        Ok(())
    }

    pub fn with_constraint(mut self, x: &str, y: &str, s: impl Into<RelationSet>) -> Result<Self, NetworkError> {
        self.add_constraint(x, y, s.into())?;
        Ok(self)
    }

    /// Path-consistency fixed point.
    ///
    /// Pairs `(i, j)` with `i < j` are seeded onto the work-list in
    /// lexicographic order; whenever a pair is refined its incident pairs are
    /// requeued.
    pub fn algebraic_closure(&self, table: &CompositionTable) -> Result<ConstraintNetwork, Inconsistent> {
        let mut net = self.clone();
        net.close_in_place(table)?;
        Ok(net)
    }

    fn close_in_place(&mut self, table: &CompositionTable) -> Result<(), Inconsistent> {
        let n = self.len();
        let mut queued = vec![false; n * n];
        let mut queue = VecDeque::new();
        for i in 0..n {
            for j in (i + 1)..n {
                queued[i * n + j] = true;
                queue.push_back((i, j));
            }
        }
        while let Some((i, j)) = queue.pop_front() {
            queued[i * n + j] = false;
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                // (i, k) <- (i, k) & (i, j);(j, k)
                let via = table.compose_sets(self.get(i, j), self.get(j, k));
                self.revise(i, k, via, &mut queue, &mut queued)?;
                // (k, j) <- (k, j) & (k, i);(i, j)
                let via = table.compose_sets(self.get(k, i), self.get(i, j));
                self.revise(k, j, via, &mut queue, &mut queued)?;
            }
        }
        Ok(())
    }

    /// Intersects `(a, b)` with `via`, requeueing the pair when it shrinks.
    fn revise(
        &mut self,
        a: usize,
        b: usize,
        via: RelationSet,
        queue: &mut VecDeque<(usize, usize)>,
        queued: &mut [bool],
    ) -> Result<(), Inconsistent> {
        let old = self.get(a, b);
        let new = old.intersection(via);
        if new == old {
            return Ok(());
        }
        if new.is_empty() {
            return Err(Inconsistent);
        }
        self.set(a, b, new);
        let n = self.len();
        let (lo, hi) = (a.min(b), a.max(b));
        if !queued[lo * n + hi] {
            queued[lo * n + hi] = true;
            queue.push_back((lo, hi));
        }
        Ok(())
    }

    pub fn is_closed(&self, table: &CompositionTable) -> bool {
        self.algebraic_closure(table).as_ref() == Ok(self)
    }

    /// Backtracking search for an atomic refinement that survives closure.
    ///
    /// Branches on the unresolved pair with the fewest remaining relations
    /// (ties broken lexicographically), trying relations in canonical order.
    pub fn refine_to_scenario(&self, table: &CompositionTable) -> Option<Scenario> {
        let closed = self.algebraic_closure(table).ok()?;
        let solved = search(closed, table)?;
        Some(Scenario { network: solved })
    }

    pub fn to_records(&self) -> Vec<ConstraintRecord> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let s = self.get(i, j);
                if !s.is_all() {
                    out.push(ConstraintRecord {
                        x: self.variables[i].clone(),
                        y: self.variables[j].clone(),
                        rels: s,
                    });
                }
            }
        }
        out
    }

    /// Tab-separated matrix with a header row of variable names.
    pub fn render_matrix(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("\t{}\n", self.variables.join("\t")));
        for (i, v) in self.variables.iter().enumerate() {
            out.push_str(v);
            for j in 0..self.len() {
                out.push('\t');
                out.push_str(&self.get(i, j).to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn search(net: ConstraintNetwork, table: &CompositionTable) -> Option<ConstraintNetwork> {
    let n = net.len();
    let mut branch: Option<(usize, usize, usize)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let len = net.get(i, j).len();
            if len > 1 && branch.is_none_or(|(_, _, best)| len < best) {
                branch = Some((i, j, len));
            }
        }
    }
    let Some((i, j, _)) = branch else {
        return Some(net);
    };
    for r in net.get(i, j).iter() {
        let mut candidate = net.clone();
        candidate.set(i, j, RelationSet::singleton(r));
        if candidate.close_in_place(table).is_ok() {
            if let Some(found) = search(candidate, table) {
                return Some(found);
            }
        }
    }
    None
}

/// An atomic, closed network: exactly one base relation per pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    network: ConstraintNetwork,
}

impl Scenario {
    pub fn relation(&self, i: usize, j: usize) -> BaseRelation {
        self.network.get(i, j).single().expect("scenario cells are singletons")
    }

    pub fn network(&self) -> &ConstraintNetwork {
        &self.network
    }

    pub fn len(&self) -> usize {
        self.network.len()
    }

    pub fn is_empty(&self) -> bool {
        self.network.is_empty()
    }

    /// True when every triple satisfies `r(i,k) in r(i,j);r(j,k)`.
    pub fn is_path_consistent(&self, table: &CompositionTable) -> bool {
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    table
                        .get(self.relation(i, j), self.relation(j, k))
                        .contains(self.relation(i, k))
                })
            })
        })
    }
}

pub fn add_constraint(
    mut net: ConstraintNetwork,
    x: &str,
    y: &str,
    s: RelationSet,
) -> Result<ConstraintNetwork, NetworkError> {
    net.add_constraint(x, y, s)?;
    Ok(net)
}

pub fn algebraic_closure(net: &ConstraintNetwork, t: &CompositionTable) -> Result<ConstraintNetwork, Inconsistent> {
    net.algebraic_closure(t)
}

pub fn refine_to_scenario(net: &ConstraintNetwork, t: &CompositionTable) -> Option<Scenario> {
    net.refine_to_scenario(t)
}
