//! Finitely generated abelian groups, homomorphisms between presentations,
//! cokernels and exactness checks.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::{integer_kernel, smith_normal_form, solve_with, Matrix, SmithForm};
use crate::{Error, Int, IntMatrix, Result};

/// Isomorphism type `ℤ^r ⊕ ℤ/t₁ ⊕ … ⊕ (block of order N)`.
///
/// `unresolved_order` records a finite block whose order is known but whose
/// cyclic decomposition is not; such a block is never split.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroupDescriptor {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unresolved_order: Option<u64>,
}

impl AbelianGroupDescriptor {
    /// Builds a descriptor from cyclic orders, where 0 stands for `ℤ`.
    /// Orders are taken in absolute value and order-1 summands are dropped.
    pub fn from_cyclic_orders<I: IntoIterator<Item = i64>>(orders: I) -> Self {
        let mut out = Self::default();
        for n in orders {
            match n.unsigned_abs() {
                0 => out.free_rank += 1,
                1 => {}
                t => out.torsion.push(t),
            }
        }
        out.torsion.sort_unstable();
        out
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, ..Self::default() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty() && self.unresolved_order.unwrap_or(1) <= 1
    }

    /// Order of the torsion subgroup, resolved and unresolved parts together.
    pub fn torsion_order(&self) -> u64 {
        self.torsion.iter().product::<u64>() * self.unresolved_order.unwrap_or(1)
    }

    /// Invariant-factor normal form of the resolved torsion: the sorted
    /// multiset of prime powers. Two resolved descriptors are isomorphic
    /// exactly when their free ranks and elementary divisors agree.
    pub fn elementary_divisors(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for &t in &self.torsion {
            let mut n = t;
            let mut p = 2;
            while p * p <= n {
                if n % p == 0 {
                    let mut q = 1;
                    while n % p == 0 {
                        n /= p;
                        q *= p;
                    }
                    out.push(q);
                }
                p += 1;
            }
            if n > 1 {
                out.push(n);
            }
        }
        out.sort_unstable();
        out
    }

    /// Isomorphism test for fully resolved descriptors.
    pub fn isomorphic(&self, other: &Self) -> bool {
        self.free_rank == other.free_rank
            && self.unresolved_order == other.unresolved_order
            && self.elementary_divisors() == other.elementary_divisors()
    }
}

impl fmt::Display for AbelianGroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if let Some(n) = self.unresolved_order.filter(|&n| n > 1) {
            parts.push(format!("T({n})"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// Presentation `ℤ^g / R` on named generators.
///
/// Relations are the columns `orders[i]·eᵢ` for each generator of finite
/// order plus the listed extra relation vectors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Presentation {
    #[serde(default)]
    pub label: String,
    pub generators: Vec<String>,
    /// Order of each generator, 0 for infinite order.
    pub orders: Vec<u64>,
    #[serde(default)]
    pub relations: Vec<Vec<Int>>,
}

impl Presentation {
    /// Direct sum of cyclic groups on named generators.
    pub fn cyclic(label: impl Into<String>, generators: Vec<(String, u64)>) -> Self {
        let (generators, orders) = generators.into_iter().unzip();
        Self { label: label.into(), generators, orders, relations: Vec::new() }
    }

    pub fn trivial(label: impl Into<String>) -> Self {
        Self::cyclic(label, Vec::new())
    }

    /// Adds an extra relation vector.
    pub fn with_relation(mut self, relation: Vec<Int>) -> Self {
        self.relations.push(relation);
        self
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    fn validate(&self) -> Result<()> {
        if self.orders.len() != self.generators.len() {
            return Err(Error::MalformedMorphism(format!(
                "group {} has {} generators but {} orders",
                self.label,
                self.generators.len(),
                self.orders.len()
            )));
        }
        if let Some(r) = self.relations.iter().find(|r| r.len() != self.generators.len()) {
            return Err(Error::MalformedMorphism(format!(
                "relation {r:?} of group {} has the wrong length",
                self.label
            )));
        }
        Ok(())
    }

    /// Relation matrix: one column per relation.
    pub fn relation_matrix(&self) -> IntMatrix {
        let g = self.rank();
        let mut cols: Vec<Vec<Int>> = Vec::new();
        for (i, &n) in self.orders.iter().enumerate() {
            if n > 0 {
                let mut c = vec![0; g];
                c[i] = n as Int;
                cols.push(c);
            }
        }
        cols.extend(self.relations.iter().cloned());
        Matrix::from_columns(&cols, g)
    }

    /// Isomorphism type, by Smith reduction of the relation matrix.
    pub fn descriptor(&self) -> AbelianGroupDescriptor {
        descriptor_of_relations(&self.relation_matrix())
    }

    /// True when `v` is zero in the group.
    pub fn is_zero_element(&self, v: &[Int]) -> bool {
        let r = self.relation_matrix();
        solve_with(&smith_normal_form(&r), v).is_some()
    }

    /// Writes a coordinate vector on the named generators.
    pub fn format_element(&self, v: &[Int]) -> String {
        let terms: Vec<String> = v
            .iter()
            .zip(&self.generators)
            .filter(|(c, _)| **c != 0)
            .map(|(c, g)| match c {
                1 => g.clone(),
                -1 => format!("-{g}"),
                c => format!("{c}·{g}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ").replace("+ -", "- ")
        }
    }
}

/// Descriptor of `ℤ^rows / (column span of relations)`.
pub fn descriptor_of_relations(relations: &IntMatrix) -> AbelianGroupDescriptor {
    let snf = smith_normal_form(relations);
    let factors = snf.invariant_factors();
    let mut out = AbelianGroupDescriptor::from_cyclic_orders(factors.iter().copied());
    out.free_rank = relations.rows() - factors.len();
    out
}

/// Homomorphism of presented groups given by the images of the domain
/// generators: column `j` of `matrix` is the image of generator `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupMorphism {
    #[serde(default)]
    pub name: String,
    pub domain: Presentation,
    pub codomain: Presentation,
    /// Row-major, `codomain.rank()` rows by `domain.rank()` columns.
    pub matrix: Vec<Vec<Int>>,
}

impl GroupMorphism {
    /// Builds a morphism and checks that it respects the domain relations.
    pub fn new(
        name: impl Into<String>,
        domain: Presentation,
        codomain: Presentation,
        matrix: Vec<Vec<Int>>,
    ) -> Result<Self> {
        let f = Self { name: name.into(), domain, codomain, matrix };
        f.validate()?;
        Ok(f)
    }

    /// Morphism from column images given as sparse `(row, value)` lists.
    pub fn from_images(
        name: impl Into<String>,
        domain: Presentation,
        codomain: Presentation,
        images: &[Vec<(usize, Int)>],
    ) -> Result<Self> {
        let mut m = vec![vec![0; domain.rank()]; codomain.rank()];
        for (j, img) in images.iter().enumerate() {
            for &(i, c) in img {
                m[i][j] += c;
            }
        }
        Self::new(name, domain, codomain, m)
    }

    pub fn matrix(&self) -> IntMatrix {
        Matrix::from_rows(self.matrix.clone(), self.domain.rank())
    }

    /// Checks dimensions and that every domain relation maps to zero.
    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        self.codomain.validate()?;
        if self.matrix.len() != self.codomain.rank()
            || self.matrix.iter().any(|r| r.len() != self.domain.rank())
        {
            return Err(Error::MalformedMorphism(format!(
                "{}: matrix must be {}×{}",
                self.name,
                self.codomain.rank(),
                self.domain.rank()
            )));
        }
        let m = self.matrix();
        let target = smith_normal_form(&self.codomain.relation_matrix());
        let rels = self.domain.relation_matrix();
        for j in 0..rels.cols() {
            let image = m.mul_vec(&rels.column(j));
            if solve_with(&target, &image).is_none() {
                return Err(Error::MalformedMorphism(format!(
                    "{}: relation {} of {} maps to the nonzero element {}",
                    self.name,
                    self.domain.format_element(&rels.column(j)),
                    self.domain.label,
                    self.codomain.format_element(&image)
                )));
            }
        }
        Ok(())
    }

    /// Applies the morphism to a coordinate vector.
    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        self.matrix().mul_vec(v)
    }
}

/// Cokernel `codomain / image(f)` via the Smith form of `[relations | f]`.
pub fn cokernel(f: &GroupMorphism) -> AbelianGroupDescriptor {
    descriptor_of_relations(&f.codomain.relation_matrix().hstack(&f.matrix()))
}

/// How a node of a sequence failed to be exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Failure {
    /// The composite of the two maps is nonzero on this image element.
    ImageNotInKernel,
    /// This kernel element is not hit by the incoming map.
    KernelNotInImage,
}

/// Verdict at one node of a sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NodeStatus {
    Exact,
    NotExact { failure: Failure, witness: Vec<Int>, witness_text: String },
    NotChecked { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeReport {
    pub index: usize,
    pub group: String,
    pub incoming: String,
    pub outgoing: String,
    #[serde(flatten)]
    pub status: NodeStatus,
}

/// Per-node result of an exactness check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub nodes: Vec<NodeReport>,
}

impl ExactnessReport {
    /// True when every checked node is exact.
    pub fn all_exact(&self) -> bool {
        self.nodes.iter().all(|n| !matches!(n.status, NodeStatus::NotExact { .. }))
    }

    pub fn failures(&self) -> impl Iterator<Item = &NodeReport> {
        self.nodes.iter().filter(|n| matches!(n.status, NodeStatus::NotExact { .. }))
    }

    pub fn checked_count(&self) -> usize {
        self.nodes.iter().filter(|n| !matches!(n.status, NodeStatus::NotChecked { .. })).count()
    }
}

impl fmt::Display for ExactnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            let verdict = match &n.status {
                NodeStatus::Exact => "exact".to_string(),
                NodeStatus::NotExact { failure, witness_text, .. } => {
                    let why = match failure {
                        Failure::ImageNotInKernel => "composite nonzero on",
                        Failure::KernelNotInImage => "kernel element not in image:",
                    };
                    format!("NOT EXACT ({why} {witness_text})")
                }
                NodeStatus::NotChecked { reason } => format!("not checked ({reason})"),
            };
            writeln!(f, "node {:>3}  {:<12} {}", n.index, n.group, verdict)?;
        }
        Ok(())
    }
}

/// Decides `im(fᵢ) = ker(fᵢ₊₁)` at every interior node by two-sided
/// generator membership. The first and last groups are reported as not
/// checked.
pub fn check_exact(seq: &[GroupMorphism]) -> Result<ExactnessReport> {
    for (i, w) in seq.windows(2).enumerate() {
        if w[0].codomain != w[1].domain {
            return Err(Error::NotComposable { index: i, next: i + 1 });
        }
    }
    for f in seq {
        f.validate()?;
    }
    if seq.is_empty() {
        return Ok(ExactnessReport::default());
    }
    let interior: Vec<NodeReport> =
        (1..seq.len()).into_par_iter().map(|i| check_node(i, &seq[i - 1], &seq[i])).collect();
    let mut nodes = Vec::with_capacity(seq.len() + 1);
    nodes.push(NodeReport {
        index: 0,
        group: seq[0].domain.label.clone(),
        incoming: String::new(),
        outgoing: seq[0].name.clone(),
        status: NodeStatus::NotChecked { reason: "start of sequence".into() },
    });
    nodes.extend(interior);
    let last = &seq[seq.len() - 1];
    nodes.push(NodeReport {
        index: seq.len(),
        group: last.codomain.label.clone(),
        incoming: last.name.clone(),
        outgoing: String::new(),
        status: NodeStatus::NotChecked { reason: "end of sequence".into() },
    });
    Ok(ExactnessReport { nodes })
}

fn check_node(index: usize, f: &GroupMorphism, g: &GroupMorphism) -> NodeReport {
    let b = &f.codomain;
    let status = node_status(f, g);
    NodeReport {
        index,
        group: b.label.clone(),
        incoming: f.name.clone(),
        outgoing: g.name.clone(),
        status,
    }
}

fn node_status(f: &GroupMorphism, g: &GroupMorphism) -> NodeStatus {
    let b = &f.codomain;
    let fm = f.matrix();
    let gm = g.matrix();
    let rel_c = g.codomain.relation_matrix();
    let snf_c: SmithForm<Int> = smith_normal_form(&rel_c);
    for j in 0..fm.cols() {
        let image = fm.column(j);
        if solve_with(&snf_c, &gm.mul_vec(&image)).is_none() {
            return NodeStatus::NotExact {
                failure: Failure::ImageNotInKernel,
                witness_text: b.format_element(&image),
                witness: image,
            };
        }
    }
    // ker g = { v : g·v ∈ span(R_C) } = projection of ker [g | -R_C].
    let neg_rel = {
        let mut m = rel_c.clone();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                m[(i, j)] = -m[(i, j)];
            }
        }
        m
    };
    let stacked = gm.hstack(&neg_rel);
    let span_b = smith_normal_form(&fm.hstack(&b.relation_matrix()));
    for k in integer_kernel(&stacked) {
        let v: Vec<Int> = k[..b.rank()].to_vec();
        if solve_with(&span_b, &v).is_none() {
            return NodeStatus::NotExact {
                failure: Failure::KernelNotInImage,
                witness_text: b.format_element(&v),
                witness: v,
            };
        }
    }
    NodeStatus::Exact
}
