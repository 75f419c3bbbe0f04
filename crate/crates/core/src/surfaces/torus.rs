//! String homology of the torus, block by block over `(n, m) ∈ ℤ²`.
//!
//! The loop groups are `𝐇_{−2} = ⊕ℤ1ₙₘ`, `𝐇_{−1} = ⊕ℤxₙₘ ⊕ ℤyₙₘ` and
//! `𝐇_0 = ⊕ℤzₙₘ`, with `Δ(1ₙₘ) = n xₙₘ + m yₙₘ`, `Δ(xₙₘ) = m zₙₘ` and
//! `Δ(yₙₘ) = −n zₙₘ`. Every map of the Gysin sequence preserves `(n, m)`,
//! so each block is a finite computation. With `g = gcd(n, m)`,
//! `(n′, m′) = (n, m)/g` and a Bézout pair `u n′ + v m′ = 1`, the degree-one
//! block over `(n, m) ≠ (0, 0)` is `ℤ/g·τₙₘ ⊕ ℤ·φₙₘ` where
//!
//! * `τₙₘ = e(n′xₙₘ + m′yₙₘ)` is torsion of order `g` and lifts along the
//!   cap map to all odd degrees (`τₙₘγ_l`);
//! * `φₙₘ = e(−v xₙₘ + u yₙₘ)` is free with `M(φₙₘ) = −g zₙₘ`.
//!
//! The remaining generators are `e(1ₙₘ)`, `e(zₙₘ)` of order `g` (free at
//! the origin), `e(x₀₀)`, `e(y₀₀)` and the lifts `e(1₀₀)γ_l`, `e(x₀₀)γ_l`,
//! `e(y₀₀)γ_l`, `e(zₙₘ)γ_l`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{FreeChain, Graded};
use crate::goldman::bezout;
use crate::group::{
    check_exact, cokernel, descriptor_of_relations, AbelianGroupDescriptor, ExactnessReport, GroupMorphism, Presentation,
};
use crate::loops::{bv_delta, loop_product, LoopChain, LoopMonomial, Space, TorusFamily};
use crate::matrix::{integer_kernel, solve_integer, Matrix};
use crate::scalar::gcd;
use crate::text::{parse_chain, Cursor};
use crate::{Error, Int, IntChain, Result};

/// Generator families of torus string homology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusStringKind {
    /// `e(1ₙₘ)`; lifts only at the origin.
    One,
    /// `e(x₀₀)` and its lifts.
    X,
    /// `e(y₀₀)` and its lifts.
    Y,
    /// The torsion generator of the degree-one block.
    Tau,
    /// The free generator of the degree-one block.
    Phi,
    /// `e(zₙₘ)` and its lifts.
    Z,
}

/// A generator of `H_*^{S¹}(LT)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TorusStringGenerator {
    pub kind: TorusStringKind,
    pub n: Int,
    pub m: Int,
    pub level: u32,
}

/// `(g, n′, m′, u, v)` for a nonzero block.
fn block_data(n: Int, m: Int) -> (Int, Int, Int, Int, Int) {
    let g = gcd(n, m);
    let (np, mp) = (n / g, m / g);
    let (u, v) = bezout(np, mp);
    debug_assert_eq!(u * np + v * mp, 1);
    (g, np, mp, u, v)
}

impl TorusStringGenerator {
    pub fn new(kind: TorusStringKind, n: Int, m: Int, level: u32) -> Self {
        Self { kind, n, m, level }
    }

    pub fn erased_one(n: Int, m: Int) -> Self {
        Self::new(TorusStringKind::One, n, m, 0)
    }

    pub fn block(&self) -> (Int, Int) {
        (self.n, self.m)
    }

    /// Additive order: 0 for infinite order, 1 when the class vanishes.
    pub fn order(&self) -> u64 {
        match self.kind {
            TorusStringKind::Tau | TorusStringKind::Z => gcd(self.n, self.m).unsigned_abs(),
            _ => 0,
        }
    }

    /// Whether this is one of the basis generators (before reduction).
    fn is_basis(&self) -> bool {
        let origin = self.n == 0 && self.m == 0;
        let lifts = self.level == 0;
        match self.kind {
            TorusStringKind::One => lifts || origin,
            TorusStringKind::X | TorusStringKind::Y => origin,
            TorusStringKind::Tau => !origin && self.order() != 1,
            TorusStringKind::Phi => !origin && lifts,
            TorusStringKind::Z => self.order() != 1,
        }
    }

    /// A loop chain whose erasure is this generator at level 0.
    fn representative(&self) -> LoopChain {
        let (n, m) = (self.n, self.m);
        let mono = |family| LoopMonomial::Torus { family, n, m };
        match self.kind {
            TorusStringKind::One => LoopChain::monomial(mono(TorusFamily::One)),
            TorusStringKind::X => LoopChain::monomial(mono(TorusFamily::X)),
            TorusStringKind::Y => LoopChain::monomial(mono(TorusFamily::Y)),
            TorusStringKind::Z => LoopChain::monomial(mono(TorusFamily::Z)),
            TorusStringKind::Tau | TorusStringKind::Phi => {
                let (_, np, mp, u, v) = block_data(n, m);
                let (p, q) = if self.kind == TorusStringKind::Tau { (np, mp) } else { (-v, u) };
                LoopChain::term(mono(TorusFamily::X), p).add(&LoopChain::term(mono(TorusFamily::Y), q)).expect("torus")
            }
        }
    }

    pub fn label(&self) -> String {
        let (n, m) = (self.n, self.m);
        let head = match self.kind {
            TorusStringKind::One => format!("e(1[{n},{m}])"),
            TorusStringKind::X => format!("e(x[{n},{m}])"),
            TorusStringKind::Y => format!("e(y[{n},{m}])"),
            TorusStringKind::Z => format!("e(z[{n},{m}])"),
            TorusStringKind::Tau => format!("τ[{n},{m}]"),
            TorusStringKind::Phi => format!("φ[{n},{m}]"),
        };
        if self.level == 0 {
            head
        } else {
            format!("{head}γ_{}", self.level)
        }
    }
}

impl Graded for TorusStringGenerator {
    fn degree(&self) -> i64 {
        let base = match self.kind {
            TorusStringKind::One => 0,
            TorusStringKind::Z => 2,
            _ => 1,
        };
        base + 2 * self.level as i64
    }
}

impl fmt::Display for TorusStringGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Writes `(n, m)` coordinates `p xₙₘ + q yₙₘ` of the degree-one block in
/// the basis `τ, φ` (or `x₀₀, y₀₀` at the origin), at the given level.
fn decompose_xy(n: Int, m: Int, p: Int, q: Int, level: u32) -> Result<IntChain<TorusStringGenerator>> {
    if n == 0 && m == 0 {
        return Ok(FreeChain::from_terms([
            (TorusStringGenerator::new(TorusStringKind::X, 0, 0, level), p),
            (TorusStringGenerator::new(TorusStringKind::Y, 0, 0, level), q),
        ]));
    }
    let (_, np, mp, u, v) = block_data(n, m);
    let alpha = u * p + v * q;
    let beta = -mp * p + np * q;
    if level > 0 && beta != 0 {
        return Err(Error::Invalid(format!(
            "e({p}·x[{n},{m}] + {q}·y[{n},{m}]) has a nonzero marking and does not lift along the cap map"
        )));
    }
    Ok(FreeChain::from_terms([
        (TorusStringGenerator::new(TorusStringKind::Tau, n, m, level), alpha),
        (TorusStringGenerator::new(TorusStringKind::Phi, n, m, level), beta),
    ]))
}

/// Expresses any named class in the basis.
fn normalize(g: &TorusStringGenerator) -> Result<IntChain<TorusStringGenerator>> {
    let origin = g.n == 0 && g.m == 0;
    match g.kind {
        TorusStringKind::X | TorusStringKind::Y if !origin => {
            let (p, q) = if g.kind == TorusStringKind::X { (1, 0) } else { (0, 1) };
            decompose_xy(g.n, g.m, p, q, g.level)
        }
        TorusStringKind::One if g.level > 0 && !origin => Err(Error::Invalid(format!(
            "e(1[{},{}]) has a nonzero marking and does not lift along the cap map",
            g.n, g.m
        ))),
        TorusStringKind::Phi if g.level > 0 => {
            Err(Error::Invalid(format!("φ[{},{}] has a nonzero marking and does not lift", g.n, g.m)))
        }
        TorusStringKind::Tau | TorusStringKind::Phi if origin => {
            Err(Error::Invalid("τ and φ are defined away from the origin; use e(x[0,0]) and e(y[0,0])".into()))
        }
        _ if g.is_basis() => Ok(FreeChain::generator(*g)),
        _ => Ok(FreeChain::zero()),
    }
}

fn parse_level(cur: &mut Cursor<'_>) -> Result<u32> {
    if !cur.eat("γ") {
        return Ok(0);
    }
    if !cur.eat("_") {
        return Ok(1);
    }
    let at = cur.clone();
    let l = if cur.eat("{") {
        let l = cur.parse_natural()?;
        cur.expect("}")?;
        l
    } else {
        cur.parse_natural()?
    };
    if l == 0 {
        return Err(at.error("γ subscripts start at 1"));
    }
    Ok(l)
}

fn parse_block(cur: &mut Cursor<'_>) -> Result<(Int, Int)> {
    cur.expect("[")?;
    let n = cur.parse_int()?;
    cur.expect(",")?;
    let m = cur.parse_int()?;
    cur.expect("]")?;
    Ok((n, m))
}

fn parse_generator(cur: &mut Cursor<'_>) -> Result<TorusStringGenerator> {
    let at = cur.clone();
    let (kind, n, m) = if cur.eat("e(") || (cur.eat("e") && cur.eat("(")) {
        let LoopMonomial::Torus { family, n, m } = LoopMonomial::parse_from(Space::Torus, cur)? else {
            return Err(at.error("expected a torus loop generator"));
        };
        cur.expect(")")?;
        let kind = match family {
            TorusFamily::One => TorusStringKind::One,
            TorusFamily::X => TorusStringKind::X,
            TorusFamily::Y => TorusStringKind::Y,
            TorusFamily::Z => TorusStringKind::Z,
        };
        (kind, n, m)
    } else if cur.eat("τ") || cur.eat("tau") {
        let (n, m) = parse_block(cur)?;
        (TorusStringKind::Tau, n, m)
    } else if cur.eat("φ") || cur.eat("phi") {
        let (n, m) = parse_block(cur)?;
        (TorusStringKind::Phi, n, m)
    } else {
        return Err(at.error("expected `e(…)`, `τ[n,m]` or `φ[n,m]`"));
    };
    let level = parse_level(cur)?;
    Ok(TorusStringGenerator { kind, n, m, level })
}

/// An element of `H_*^{S¹}(LT)` in normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct TorusStringChain {
    chain: IntChain<TorusStringGenerator>,
}

impl TorusStringChain {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a chain from arbitrary named classes.
    pub fn from_terms<I: IntoIterator<Item = (TorusStringGenerator, Int)>>(terms: I) -> Result<Self> {
        let mut chain = FreeChain::zero();
        for (g, c) in terms {
            for (h, e) in normalize(&g)?.iter() {
                chain.add_term(*h, e * c);
            }
        }
        Ok(Self { chain }.reduced())
    }

    pub fn generator(g: TorusStringGenerator) -> Result<Self> {
        Self::from_terms([(g, 1)])
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.trim() == "0" {
            return Ok(Self::zero());
        }
        let raw: IntChain<TorusStringGenerator> = parse_chain(s, parse_generator, None)?;
        Self::from_terms(raw.iter().map(|(g, c)| (*g, *c)))
    }

    fn reduced(self) -> Self {
        Self { chain: self.chain.reduce_with(|g| g.order() as Int) }
    }

    pub fn chain(&self) -> &IntChain<TorusStringGenerator> {
        &self.chain
    }

    pub fn is_zero(&self) -> bool {
        self.chain.is_zero()
    }

    pub fn coefficient(&self, g: &TorusStringGenerator) -> Int {
        self.chain.coefficient(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TorusStringGenerator, &Int)> {
        self.chain.iter()
    }

    pub fn degree(&self) -> Option<i64> {
        self.chain.homogeneous_degree()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { chain: self.chain.add(&other.chain) }.reduced()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { chain: self.chain.sub(&other.chain) }.reduced()
    }

    pub fn scale(&self, c: Int) -> Self {
        Self { chain: self.chain.scale(&c) }.reduced()
    }

    /// Splits the chain into homogeneous components.
    pub fn components(&self) -> Vec<TorusStringChain> {
        let degrees: BTreeSet<i64> = self.chain.keys().map(Graded::degree).collect();
        degrees
            .into_iter()
            .map(|d| Self {
                chain: FreeChain::from_terms(self.iter().filter(|(g, _)| g.degree() == d).map(|(g, c)| (*g, *c))),
            })
            .collect()
    }
}

impl fmt::Display for TorusStringChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.chain.fmt(f)
    }
}

fn expect_torus(x: &LoopChain) -> Result<()> {
    if x.space() == Space::Torus {
        Ok(())
    } else {
        Err(Error::MixedSpaces { left: Space::Torus.to_string(), right: x.space().to_string() })
    }
}

/// The erasing map `e: 𝐇_*(LT) → H_{*+2}^{S¹}(LT)`.
pub fn torus_erasing(x: &LoopChain) -> Result<TorusStringChain> {
    expect_torus(x)?;
    let mut out = FreeChain::zero();
    for (g, &c) in x.iter() {
        let LoopMonomial::Torus { family, n, m } = *g else { unreachable!("checked torus") };
        let part = match family {
            TorusFamily::One => FreeChain::generator(TorusStringGenerator::erased_one(n, m)),
            TorusFamily::X => decompose_xy(n, m, 1, 0, 0)?,
            TorusFamily::Y => decompose_xy(n, m, 0, 1, 0)?,
            TorusFamily::Z => normalize(&TorusStringGenerator::new(TorusStringKind::Z, n, m, 0))?,
        };
        out = out.add(&part.scale(&c));
    }
    Ok(TorusStringChain { chain: out }.reduced())
}

/// The marking map `M: H_*^{S¹}(LT) → 𝐇_{*−1}(LT)`.
pub fn torus_marking(x: &TorusStringChain) -> LoopChain {
    let mut out = LoopChain::zero(Space::Torus);
    for (g, &c) in x.iter() {
        if g.level == 0 {
            out = out.add(&bv_delta(&g.representative()).scale(c)).expect("torus");
        }
    }
    out
}

/// The cap map `c: H_* → H_{*−2}`.
pub fn torus_cap(x: &TorusStringChain) -> TorusStringChain {
    let terms = x.iter().filter(|(g, _)| g.level > 0).map(|(g, c)| (TorusStringGenerator { level: g.level - 1, ..*g }, *c));
    TorusStringChain::from_terms(terms).expect("lowering a level stays in the basis")
}

/// The string bracket `[x, y] = (−1)^{|x|} e(M(x) • M(y))` on the torus.
pub fn torus_string_bracket(x: &TorusStringChain, y: &TorusStringChain) -> Result<TorusStringChain> {
    if x.is_zero() {
        return Ok(TorusStringChain::zero());
    }
    let deg = x.degree().ok_or_else(|| Error::NotHomogeneous(x.to_string()))?;
    let product = loop_product(&torus_marking(x), &torus_marking(y))?;
    let e = torus_erasing(&product)?;
    Ok(if deg.rem_euclid(2) == 0 { e } else { e.scale(-1) })
}

fn support_radius(x: &TorusStringChain) -> Int {
    x.iter().map(|(g, _)| g.n.abs().max(g.m.abs())).max().unwrap_or(0)
}

/// Generators with nonzero marking: `e(1ₖₗ)` and `φₖₗ` for `|k|, |l| ≤ r`.
fn marked_generators(r: Int) -> Vec<TorusStringGenerator> {
    let mut out = Vec::new();
    for k in -r..=r {
        for l in -r..=r {
            out.push(TorusStringGenerator::erased_one(k, l));
            if (k, l) != (0, 0) {
                out.push(TorusStringGenerator::new(TorusStringKind::Phi, k, l, 0));
            }
        }
    }
    out
}

/// A generator whose bracket with `x` is nonzero, with that bracket.
///
/// Only generators with nonzero marking bracket nontrivially, and for a
/// component of `x` supported in `|n|, |m| ≤ r` a nonzero bracket is
/// always attained against `e(1ₖₗ)` or `φₖₗ` with `|k|, |l| ≤ r + 1`: the
/// `1`-terms are detected by `k, l ∈ {0, ±1}`, and a `z`-term over
/// `(n, m)` by `(k, l) = (−n, −m)`, where the image lands in the free
/// block at the origin. The search uses radius `r + 2`.
pub fn torus_center_witness(x: &TorusStringChain) -> Result<Option<(TorusStringGenerator, TorusStringChain)>> {
    let r = support_radius(x) + 2;
    let gens = marked_generators(r);
    for part in x.components() {
        let found = gens
            .par_iter()
            .map(|g| -> Result<Option<(TorusStringGenerator, TorusStringChain)>> {
                let b = torus_string_bracket(&part, &TorusStringChain::generator(*g)?)?;
                Ok((!b.is_zero()).then_some((*g, b)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .next();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Whether `x` lies in the center of the string Lie algebra of the torus.
pub fn torus_center_membership(x: &TorusStringChain) -> Result<bool> {
    Ok(torus_center_witness(x)?.is_none())
}

/// Basis generators of degree `k` over the block `(n, m)`.
pub fn block_generators(n: Int, m: Int, k: i64) -> Vec<TorusStringGenerator> {
    if k < 0 {
        return Vec::new();
    }
    let level = |base: i64| -> Option<u32> { (k >= base && (k - base) % 2 == 0).then(|| ((k - base) / 2) as u32) };
    let mut out = Vec::new();
    let candidates = [
        (TorusStringKind::One, level(0)),
        (TorusStringKind::X, level(1)),
        (TorusStringKind::Y, level(1)),
        (TorusStringKind::Tau, level(1)),
        (TorusStringKind::Phi, level(1)),
        (TorusStringKind::Z, level(2)),
    ];
    for (kind, l) in candidates {
        if let Some(level) = l {
            let g = TorusStringGenerator { kind, n, m, level };
            if g.is_basis() {
                out.push(g);
            }
        }
    }
    out
}

fn block_loop_generators(n: Int, m: Int, j: i64) -> Vec<LoopMonomial> {
    let families: &[TorusFamily] = match j {
        -2 => &[TorusFamily::One],
        -1 => &[TorusFamily::X, TorusFamily::Y],
        0 => &[TorusFamily::Z],
        _ => &[],
    };
    families.iter().map(|&family| LoopMonomial::Torus { family, n, m }).collect()
}

/// Order of a basis generator in the model.
fn model_descriptor(gens: &[TorusStringGenerator]) -> AbelianGroupDescriptor {
    AbelianGroupDescriptor::from_cyclic_orders(gens.iter().map(|g| g.order() as i64))
}

/// `Δ` restricted to one block, from `𝐇_j` to `𝐇_{j+1}`.
fn block_delta(n: Int, m: Int, j: i64) -> Matrix<Int> {
    let dom = block_loop_generators(n, m, j);
    let cod = block_loop_generators(n, m, j + 1);
    let mut out = Matrix::zeros(cod.len(), dom.len());
    for (c, g) in dom.iter().enumerate() {
        for (h, v) in g.delta().iter() {
            let r = cod.iter().position(|x| x == h).expect("Δ stays in the block");
            out[(r, c)] += *v;
        }
    }
    out
}

fn free_presentation(label: &str, rank: usize) -> Presentation {
    Presentation::cyclic(label, (0..rank).map(|i| (format!("g{i}"), 0)).collect())
}

fn delta_morphism(n: Int, m: Int, j: i64) -> GroupMorphism {
    let d = block_delta(n, m, j);
    let rows = (0..d.rows()).map(|r| (0..d.cols()).map(|c| d[(r, c)]).collect()).collect();
    GroupMorphism::new(
        format!("Δ_{j}[{n},{m}]"),
        free_presentation(&format!("𝐇_{j}"), d.cols()),
        free_presentation(&format!("𝐇_{}", j + 1), d.rows()),
        rows,
    )
    .expect("free groups carry no relations")
}

fn direct_sum(a: &AbelianGroupDescriptor, b: &AbelianGroupDescriptor) -> AbelianGroupDescriptor {
    let mut torsion: Vec<u64> = a.torsion.iter().chain(&b.torsion).copied().collect();
    torsion.sort_unstable();
    AbelianGroupDescriptor { free_rank: a.free_rank + b.free_rank, torsion, unresolved_order: None }
}

/// The block `(n, m)` of `H_k^{S¹}(LT)` computed from `Δ` alone:
/// `H_0 = ℤ`, `H_1 = coker Δ_{−2}`, `H_{2i} = coker Δ_{−1} ⊕ ker Δ_{−2}` and
/// `H_{2i+1} = ker Δ_{−1} / im Δ_{−2}` for `i ≥ 1`.
pub fn block_descriptor(n: Int, m: Int, k: i64) -> AbelianGroupDescriptor {
    match k {
        k if k < 0 => AbelianGroupDescriptor::trivial(),
        0 => AbelianGroupDescriptor::free(1),
        1 => cokernel(&delta_morphism(n, m, -2)),
        k if k % 2 == 0 => {
            let lower_kernel = integer_kernel(&block_delta(n, m, -2)).len();
            direct_sum(&cokernel(&delta_morphism(n, m, -1)), &AbelianGroupDescriptor::free(lower_kernel))
        }
        _ => {
            let kernel = integer_kernel(&block_delta(n, m, -1));
            let basis = Matrix::from_columns(&kernel, 2);
            let image = block_delta(n, m, -2);
            let coords: Vec<Vec<Int>> = (0..image.cols())
                .map(|c| solve_integer(&basis, &image.column(c)).expect("ΔΔ = 0 puts the image in the kernel"))
                .collect();
            descriptor_of_relations(&Matrix::from_columns(&coords, kernel.len()))
        }
    }
}

/// Inclusive window `n0..=n1` by `m0..=m1` of blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusWindow {
    pub n0: Int,
    pub n1: Int,
    pub m0: Int,
    pub m1: Int,
}

impl TorusWindow {
    pub fn square(r: Int) -> Self {
        Self { n0: -r, n1: r, m0: -r, m1: r }
    }

    pub fn blocks(&self) -> Vec<(Int, Int)> {
        (self.n0..=self.n1).flat_map(|n| (self.m0..=self.m1).map(move |m| (n, m))).collect()
    }
}

impl Default for TorusWindow {
    fn default() -> Self {
        Self::square(2)
    }
}

impl std::str::FromStr for TorusWindow {
    type Err = Error;

    /// Parses `n0:n1,m0:m1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let n0 = cur.parse_int()?;
        cur.expect(":")?;
        let n1 = cur.parse_int()?;
        cur.expect(",")?;
        let m0 = cur.parse_int()?;
        cur.expect(":")?;
        let m1 = cur.parse_int()?;
        cur.finish()?;
        if n0 > n1 || m0 > m1 {
            return Err(Error::Invalid(format!("empty window {s}")));
        }
        Ok(Self { n0, n1, m0, m1 })
    }
}

/// One block of a torus homology table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusBlock {
    pub n: Int,
    pub m: Int,
    /// Computed from the cokernels and homology of `Δ`.
    pub group: AbelianGroupDescriptor,
    /// Named generators of the model with their orders (0 for `ℤ`).
    pub generators: Vec<(String, u64)>,
    /// Whether the model's generators have the computed isomorphism type.
    pub agrees: bool,
}

/// `H_k^{S¹}(LT)` restricted to a window of blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusHomology {
    pub degree: i64,
    pub window: TorusWindow,
    pub blocks: Vec<TorusBlock>,
    pub group: AbelianGroupDescriptor,
}

/// The blocks of `H_k^{S¹}(LT)` in a window.
pub fn torus_string_homology(k: i64, window: TorusWindow) -> Result<TorusHomology> {
    if k < 0 {
        return Err(Error::Invalid(format!("degree {k} is negative")));
    }
    let blocks: Vec<TorusBlock> = window
        .blocks()
        .into_par_iter()
        .map(|(n, m)| {
            let group = block_descriptor(n, m, k);
            let gens = block_generators(n, m, k);
            let agrees = model_descriptor(&gens).isomorphic(&group);
            TorusBlock { n, m, group, generators: gens.iter().map(|g| (g.label(), g.order())).collect(), agrees }
        })
        .collect();
    let group = blocks.iter().fold(AbelianGroupDescriptor::trivial(), |acc, b| direct_sum(&acc, &b.group));
    Ok(TorusHomology { degree: k, window, blocks, group })
}

impl fmt::Display for TorusHomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "H_{}^S1(LT) on blocks {}..{} x {}..{}: {}", self.degree, self.window.n0, self.window.n1, self.window.m0, self.window.m1, self.group)?;
        for b in &self.blocks {
            let gens: Vec<String> = b
                .generators
                .iter()
                .map(|(l, o)| if *o == 0 { format!("Z ⟨{l}⟩") } else { format!("Z/{o} ⟨{l}⟩") })
                .collect();
            writeln!(f, "  [{},{}]  {:<12} {}", b.n, b.m, b.group.to_string(), if gens.is_empty() { "0".into() } else { gens.join(" ⊕ ") })?;
        }
        Ok(())
    }
}

fn block_string_group(n: Int, m: Int, k: i64) -> (Presentation, Vec<TorusStringGenerator>) {
    let gens = block_generators(n, m, k);
    let named = gens.iter().map(|g| (g.label(), g.order())).collect();
    (Presentation::cyclic(format!("H_{k}[{n},{m}]"), named), gens)
}

fn block_loop_group(n: Int, m: Int, j: i64) -> (Presentation, Vec<LoopMonomial>) {
    let gens = block_loop_generators(n, m, j);
    let named = gens.iter().map(|g| (g.to_string(), 0)).collect();
    (Presentation::cyclic(format!("𝐇_{j}[{n},{m}]"), named), gens)
}

fn coords<K: PartialEq + fmt::Display>(terms: impl Iterator<Item = (K, Int)>, basis: &[K]) -> Result<Vec<(usize, Int)>> {
    terms
        .map(|(g, c)| {
            basis
                .iter()
                .position(|h| *h == g)
                .map(|i| (i, c))
                .ok_or_else(|| Error::Internal(format!("{g} lies outside its block")))
        })
        .collect()
}

/// The Gysin sequence of the block `(n, m)` through degree `max_degree`.
pub fn torus_block_sequence(n: Int, m: Int, max_degree: i64) -> Result<Vec<GroupMorphism>> {
    let mut out = Vec::new();
    for k in (0..=max_degree).rev() {
        let (lk, lgens) = block_loop_group(n, m, k - 2);
        let (hk, hgens) = block_string_group(n, m, k);
        let (hk2, hgens2) = block_string_group(n, m, k - 2);
        let (lk1, lgens1) = block_loop_group(n, m, k - 3);
        let e = lgens
            .iter()
            .map(|g| coords(torus_erasing(&LoopChain::monomial(*g))?.iter().map(|(a, b)| (*a, *b)), &hgens))
            .collect::<Result<Vec<_>>>()?;
        out.push(GroupMorphism::from_images(format!("e_{k}"), lk, hk.clone(), &e)?);
        let c = hgens
            .iter()
            .map(|g| coords(torus_cap(&TorusStringChain::generator(*g)?).iter().map(|(a, b)| (*a, *b)), &hgens2))
            .collect::<Result<Vec<_>>>()?;
        out.push(GroupMorphism::from_images(format!("c_{k}"), hk, hk2.clone(), &c)?);
        let mk = hgens2
            .iter()
            .map(|g| coords(torus_marking(&TorusStringChain::generator(*g)?).iter().map(|(a, b)| (*a, *b)), &lgens1))
            .collect::<Result<Vec<_>>>()?;
        out.push(GroupMorphism::from_images(format!("M_{}", k - 2), hk2, lk1, &mk)?);
    }
    Ok(out)
}

/// Exactness of every block's Gysin sequence in a window, in window order.
pub fn verify_torus_blocks(window: TorusWindow, max_degree: i64) -> Result<Vec<((Int, Int), ExactnessReport)>> {
    window
        .blocks()
        .into_par_iter()
        .map(|(n, m)| Ok(((n, m), check_exact(&torus_block_sequence(n, m, max_degree)?)?)))
        .collect()
}
