//! The Gysin sequence of the circle action on `LSⁿ` as a sequence of
//! presented groups, its mechanical exactness check, and an audit of the
//! string homology tables against an independent recursion and closed
//! forms for the torsion blocks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{basis, cap, erasing, marking, monomials_of_degree, BasisElement, CircleWindow, StringChain};
use crate::chain::Graded;
use crate::group::{check_exact, cokernel, ExactnessReport, GroupMorphism, Presentation};
use crate::loops::{bv_delta, LoopChain, LoopMonomial, Space, SpaceKind};
use crate::{Error, Int, Result};

/// `𝐇_j` as a presented group on the loop generators of degree `j`.
pub fn loop_group(space: Space, j: i64, window: CircleWindow) -> (Presentation, Vec<LoopMonomial>) {
    let gens = monomials_of_degree(space, j, window);
    let named = gens.iter().map(|g| (g.to_string(), g.order() as u64)).collect();
    (Presentation::cyclic(format!("𝐇_{j}"), named), gens)
}

/// `H_k` as the direct sum of cyclic groups of the split model.
pub fn string_group(space: Space, k: i64, window: CircleWindow) -> Result<(Presentation, Vec<BasisElement>)> {
    let elements = if k < 0 { Vec::new() } else { basis(space, k, window)? };
    let named = elements.iter().map(|b| (b.label.clone(), b.split_order)).collect();
    Ok((Presentation::cyclic(format!("H_{k}"), named), elements))
}

fn loop_coordinates(x: &LoopChain, gens: &[LoopMonomial]) -> Result<Vec<(usize, Int)>> {
    x.iter()
        .map(|(g, &c)| {
            let i = gens
                .iter()
                .position(|h| h == g)
                .ok_or_else(|| Error::Internal(format!("{g} is missing from its degree")))?;
            Ok((i, c))
        })
        .collect()
}

fn string_coordinates(x: &StringChain, elements: &[BasisElement]) -> Result<Vec<(usize, Int)>> {
    x.iter()
        .map(|(g, &c)| {
            let i = elements
                .iter()
                .position(|b| b.generator == *g)
                .ok_or_else(|| Error::Internal(format!("{g} is missing from the basis of H_{}", g.degree())))?;
            Ok((i, c))
        })
        .collect()
}

/// The sequence `𝐇_{K−d} →e H_K →c H_{K−2} →M 𝐇_{K−d−1} →e H_{K−1} → … → 𝐇_{−d−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GysinSequence {
    pub space: Space,
    pub max_degree: i64,
    pub window: CircleWindow,
    pub morphisms: Vec<GroupMorphism>,
}

impl GysinSequence {
    /// Assembles the sequence from the split model of `H_*` for degrees
    /// `0..=max_degree`.
    pub fn assemble(space: Space, max_degree: i64, window: CircleWindow) -> Result<Self> {
        if max_degree < 0 {
            return Err(Error::Invalid(format!("maximum degree {max_degree} is negative")));
        }
        let d = space.dimension();
        let mut morphisms = Vec::new();
        for k in (0..=max_degree).rev() {
            let (lk, lgens) = loop_group(space, k - d, window);
            let (hk, hbasis) = string_group(space, k, window)?;
            let (hk2, hbasis2) = string_group(space, k - 2, window)?;
            let (lk1, lgens1) = loop_group(space, k - d - 1, window);

            let e_images = lgens
                .iter()
                .map(|g| string_coordinates(&erasing(&LoopChain::monomial(*g))?, &hbasis))
                .collect::<Result<Vec<_>>>()?;
            morphisms.push(GroupMorphism::from_images(format!("e_{k}"), lk, hk.clone(), &e_images)?);

            let c_images = hbasis
                .iter()
                .map(|b| string_coordinates(&cap(&StringChain::generator(b.generator)?), &hbasis2))
                .collect::<Result<Vec<_>>>()?;
            morphisms.push(GroupMorphism::from_images(format!("c_{k}"), hk, hk2.clone(), &c_images)?);

            let m_images = hbasis2
                .iter()
                .map(|b| loop_coordinates(&marking(&StringChain::generator(b.generator)?), &lgens1))
                .collect::<Result<Vec<_>>>()?;
            morphisms.push(GroupMorphism::from_images(format!("M_{}", k - 2), hk2, lk1, &m_images)?);
        }
        Ok(Self { space, max_degree, window, morphisms })
    }

    pub fn check(&self) -> Result<ExactnessReport> {
        check_exact(&self.morphisms)
    }
}

/// Checks exactness of the Gysin sequence through degree `max_degree`.
///
/// Only `S¹` and `S³` are accepted: on the other spheres the split model
/// is not the actual group structure of the torsion blocks.
pub fn verify_gysin(space: Space, max_degree: i64, window: CircleWindow) -> Result<ExactnessReport> {
    match space.kind() {
        SpaceKind::Circle | SpaceKind::OddSphere(3) => GysinSequence::assemble(space, max_degree, window)?.check(),
        _ => Err(Error::UnsupportedSpace {
            space: space.to_string(),
            reason: "exactness is verified on S1 and S3 only; use `audit` for the other spheres".into(),
        }),
    }
}

/// A positive integer as a prime factorization, so that products of
/// torsion orders never overflow.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Factored(BTreeMap<u64, u32>);

impl Factored {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn of(n: u64) -> Self {
        assert!(n > 0, "only positive integers are factored");
        let mut out = BTreeMap::new();
        let mut n = n;
        let mut p = 2;
        while p * p <= n {
            while n.is_multiple_of(p) {
                *out.entry(p).or_insert(0) += 1;
                n /= p;
            }
            p += 1;
        }
        if n > 1 {
            *out.entry(n).or_insert(0) += 1;
        }
        Self(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.0.clone();
        for (p, e) in &other.0 {
            *out.entry(*p).or_insert(0) += e;
        }
        Self(out)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().all(|(p, e)| other.0.get(p).is_some_and(|f| f >= e))
    }

    /// The part prime to 2.
    pub fn odd_part(&self) -> Self {
        Self(self.0.iter().filter(|(p, _)| **p != 2).map(|(p, e)| (*p, *e)).collect())
    }

    /// The value, when it fits in 64 bits.
    pub fn value(&self) -> Option<u64> {
        self.0.iter().try_fold(1u64, |acc, (p, e)| acc.checked_mul(p.checked_pow(*e)?))
    }
}

impl fmt::Display for Factored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.value() {
            return write!(f, "{v}");
        }
        let parts: Vec<String> =
            self.0.iter().map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") }).collect();
        write!(f, "{}", parts.join("·"))
    }
}

impl Serialize for Factored {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// One degree of the audit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditRow {
    pub degree: i64,
    pub model_rank: usize,
    pub model_torsion: Factored,
    pub recursion_rank: i64,
    /// The recursion bounds the torsion order from above: the model's
    /// torsion order must divide it.
    pub recursion_torsion_bound: Factored,
    pub passed: bool,
}

/// One torsion block compared with its closed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockRow {
    pub index: u32,
    pub degree: i64,
    pub model: Factored,
    pub closed_form: Factored,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub space: Space,
    pub rows: Vec<AuditRow>,
    pub blocks: Vec<BlockRow>,
    pub passed: bool,
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "audit of H_*^S1(L{})", self.space)?;
        for r in &self.rows {
            writeln!(
                f,
                "  H_{:<3} rank {} (recursion {}), torsion {} divides {}  {}",
                r.degree,
                r.model_rank,
                r.recursion_rank,
                r.model_torsion,
                r.recursion_torsion_bound,
                if r.passed { "ok" } else { "FAIL" }
            )?;
        }
        for b in &self.blocks {
            writeln!(
                f,
                "  block {:<2} H_{:<3} torsion {} closed form {}  {}",
                b.index,
                b.degree,
                b.model,
                b.closed_form,
                if b.passed { "ok" } else { "FAIL" }
            )?;
        }
        write!(f, "{}", if self.passed { "audit passed" } else { "audit FAILED" })
    }
}

fn model_torsion(space: Space, k: i64) -> Result<Factored> {
    Ok(basis(space, k, CircleWindow::default())?
        .iter()
        .filter(|b| b.split_order > 1)
        .fold(Factored::one(), |acc, b| acc.mul(&Factored::of(b.split_order))))
}

/// `Δ: 𝐇_j → 𝐇_{j+1}` as a morphism of presented groups.
fn delta_morphism(space: Space, j: i64) -> Result<GroupMorphism> {
    let window = CircleWindow::default();
    let (dom, gens) = loop_group(space, j, window);
    let (cod, gens1) = loop_group(space, j + 1, window);
    let images = gens
        .iter()
        .map(|g| loop_coordinates(&bv_delta(&LoopChain::monomial(*g)), &gens1))
        .collect::<Result<Vec<_>>>()?;
    GroupMorphism::from_images(format!("Δ_{j}"), dom, cod, &images)
}

fn image_rank(f: &GroupMorphism) -> i64 {
    f.codomain.descriptor().free_rank as i64 - cokernel(f).free_rank as i64
}

/// Compares `H_0 … H_{max_degree}` with the recursion
/// `r_k = rank A_k + r_{k−2} − rank Δ_{k−d−2}`, `T_k = |tors A_k|·T_{k−2}`
/// where `A_k = coker(Δ: 𝐇_{k−d−1} → 𝐇_{k−d})`, and the torsion blocks
/// with `k!` (odd spheres) and `3·5⋯(2k+1)` (odd part, even spheres).
pub fn consistency_audit(space: Space, max_degree: i64) -> Result<AuditReport> {
    let n = match space {
        Space::Sphere { n } if n >= 2 => n,
        _ => {
            return Err(Error::UnsupportedSpace {
                space: space.to_string(),
                reason: "the audit covers the spheres S^n with n ≥ 2".into(),
            })
        }
    };
    if max_degree < 0 {
        return Err(Error::Invalid(format!("maximum degree {max_degree} is negative")));
    }
    let d = space.dimension();
    let mut ranks: Vec<i64> = Vec::new();
    let mut bounds: Vec<Factored> = Vec::new();
    let mut rows = Vec::new();
    for k in 0..=max_degree {
        let a = cokernel(&delta_morphism(space, k - d - 1)?);
        let (r_prev, t_prev) =
            if k >= 2 { (ranks[(k - 2) as usize], bounds[(k - 2) as usize].clone()) } else { (0, Factored::one()) };
        let r = a.free_rank as i64 + r_prev - image_rank(&delta_morphism(space, k - d - 2)?);
        let t = a.torsion.iter().fold(t_prev, |acc, &q| acc.mul(&Factored::of(q)));
        let model_rank = basis(space, k, CircleWindow::default())?.iter().filter(|b| b.split_order == 0).count();
        let torsion = model_torsion(space, k)?;
        let passed = model_rank as i64 == r && torsion.divides(&t);
        ranks.push(r);
        bounds.push(t.clone());
        rows.push(AuditRow {
            degree: k,
            model_rank,
            model_torsion: torsion,
            recursion_rank: r,
            recursion_torsion_bound: t,
            passed,
        });
    }

    let mut blocks = Vec::new();
    let odd = n % 2 == 1;
    let (step, offset) = if odd { (n as i64 - 1, 1) } else { (2 * n as i64 - 2, n as i64) };
    let mut closed = Factored::one();
    let mut index = 0u32;
    loop {
        let degree = index as i64 * step + offset;
        if degree > max_degree {
            break;
        }
        if index >= 1 {
            closed = closed.mul(&Factored::of(if odd { index as u64 } else { 2 * index as u64 + 1 }));
        }
        let total = model_torsion(space, degree)?;
        let model = if odd { total } else { total.odd_part() };
        let passed = model == closed;
        blocks.push(BlockRow { index, degree, model, closed_form: closed.clone(), passed });
        index += 1;
    }
    let passed = rows.iter().all(|r| r.passed) && blocks.iter().all(|b| b.passed);
    Ok(AuditReport { space, rows, blocks, passed })
}
