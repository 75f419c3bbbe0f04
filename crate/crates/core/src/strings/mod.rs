//! Integral string homology `H_*^{S¹}(LSⁿ)` with the erasing map `e`, the
//! marking map `M`, the cap map `c` and the string bracket.
//!
//! The groups are modelled on the Gysin sequence
//! `… → 𝐇_{k−d} →e H_k →c H_{k−2} →M 𝐇_{k−d−1} → …` with `Δ = M∘e`.
//! A generator of `H_k` is a pair `(g, l)` of a loop generator `g` and a
//! level `l ≥ 0` with `|g| + d + 2l = k`:
//!
//! * level 0 is the erased class `e(g)`; its order is the order of `g` in
//!   `𝐇_*/im Δ`, so `e(g)` vanishes when `g` is a unit multiple of some
//!   `Δ(h)`;
//! * level `l ≥ 1` exists when `Δ(g) = 0` and is a chosen class with
//!   `cˡ(g, l) = e(g)`.
//!
//! `c` lowers the level by one and kills level 0; `M` sends `e(g)` to
//! `Δ(g)` and kills higher levels. The resulting table is exact by
//! construction; [`gysin`] checks this mechanically and audits it against
//! closed forms.
//!
//! On `S¹` and `S³` the groups are direct sums of the cyclic groups on these
//! generators. On odd spheres `n ≥ 5` the torsion in each degree is a block
//! of known order whose cyclic decomposition is not determined; on even
//! spheres the 2-primary part splits into `ℤ/2` summands and the odd part
//! forms such a block. Elements of a block are reduced modulo the block
//! order only.
//!
//! Display names follow the usual conventions: on `S³` the classes are
//! `α⊗yⁱ`, `(α⊗yʲ)x` and `(α⊗yʲ)x_{l+1}` (the lifts of `e(1⊗yʲ⁻¹)`) and
//! `x_l` (the lifts of `e(α⊗1)`); elsewhere `e(g)`, `e(g)γ_l`, and `γ_l` for
//! the lifts of `e(a)`.

pub mod gysin;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{FreeChain, Graded};
use crate::group::AbelianGroupDescriptor;
use crate::loops::{loop_product, EvenFamily, LoopChain, LoopMonomial, Space, SpaceKind};
use crate::text::{parse_chain, Cursor};
use crate::{Error, Int, IntChain, Result};

/// Inclusive exponent window for `S¹`, whose groups have infinite rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleWindow {
    pub lo: Int,
    pub hi: Int,
}

impl Default for CircleWindow {
    fn default() -> Self {
        Self { lo: -6, hi: 6 }
    }
}

impl CircleWindow {
    pub fn symmetric(w: Int) -> Self {
        Self { lo: -w, hi: w }
    }

}

/// A generator `(g, l)` of string homology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StringGen {
    pub base: LoopMonomial,
    pub level: u32,
}

impl StringGen {
    pub fn erased(base: LoopMonomial) -> Self {
        Self { base, level: 0 }
    }

    pub fn lift(base: LoopMonomial, level: u32) -> Self {
        Self { base, level }
    }

    pub fn space(&self) -> Space {
        self.base.space()
    }
}

impl Graded for StringGen {
    fn degree(&self) -> i64 {
        self.base.degree() + self.space().dimension() + 2 * self.level as i64
    }
}

/// Order of a generator as used for coefficient reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenOrder {
    Free,
    /// Exactly cyclic of this order.
    Cyclic { order: u64 },
    /// Member of an unresolved torsion block; `bound` is the block's total
    /// torsion order, which annihilates the element.
    Block { bound: u64 },
}

impl GenOrder {
    fn modulus(&self) -> Int {
        match *self {
            GenOrder::Free => 0,
            GenOrder::Cyclic { order } => order as Int,
            GenOrder::Block { bound } => bound as Int,
        }
    }
}

fn sphere_dim(space: Space) -> Result<u32> {
    match space {
        Space::Sphere { n } => Ok(n),
        Space::Torus => Err(Error::UnsupportedSpace {
            space: space.to_string(),
            reason: "torus string homology is computed blockwise in the surfaces module".into(),
        }),
    }
}

/// `a⊗1`, `α⊗1` or `a`: the loop generator whose erasure and its lifts
/// come from the classifying space of the circle.
pub fn gamma_base(space: Space) -> Result<LoopMonomial> {
    Ok(match space.kind() {
        SpaceKind::Circle => LoopMonomial::Circle { a: true, k: 0 },
        SpaceKind::OddSphere(n) => LoopMonomial::Odd { n, a: true, k: 0 },
        SpaceKind::EvenSphere(n) => LoopMonomial::Even { n, family: EvenFamily::AV, k: 0 },
        SpaceKind::Torus => return Err(sphere_dim(space).unwrap_err()),
    })
}

/// On `S²` the classes `e(a vʲ)`, `j ≥ 1`, are multiples of `e(vʲ⁻¹)` and
/// are not used as generators.
fn is_rewritten(g: &LoopMonomial) -> bool {
    matches!(g, LoopMonomial::Even { n: 2, family: EvenFamily::AV, k } if *k >= 1)
}

/// Order of `e(g)` in `𝐇_*/im Δ`: 0 for infinite order, 1 when `e(g) = 0`.
pub fn erased_order(g: &LoopMonomial) -> u64 {
    match *g {
        LoopMonomial::Circle { a: false, k } => k.unsigned_abs(),
        LoopMonomial::Odd { a: false, k, .. } => k as u64 + 1,
        LoopMonomial::Even { n, family: EvenFamily::V, k } => {
            if n == 2 {
                4 * k as u64 + 2
            } else {
                2 * k as u64 + 1
            }
        }
        LoopMonomial::Even { family: EvenFamily::AV, k, .. } if k >= 1 => 2,
        _ => 0,
    }
}

fn has_lifts(g: &LoopMonomial) -> bool {
    g.delta().is_zero() && erased_order(g) != 1 && !is_rewritten(g)
}

/// Whether the torsion of the lifts of `e(g)` is known to be cyclic of the
/// same order as `e(g)`.
fn lift_resolved(space: Space, g: &LoopMonomial) -> bool {
    match space.kind() {
        SpaceKind::Circle => true,
        SpaceKind::OddSphere(n) => n == 3,
        SpaceKind::EvenSphere(_) => erased_order(g) == 2 || erased_order(g) == 0,
        SpaceKind::Torus => false,
    }
}

/// Loop generators of degree `j`.
pub fn monomials_of_degree(space: Space, j: i64, window: CircleWindow) -> Vec<LoopMonomial> {
    match space.kind() {
        SpaceKind::Circle => match j {
            0 => (window.lo..=window.hi).map(|k| LoopMonomial::Circle { a: false, k }).collect(),
            -1 => (window.lo..=window.hi).map(|k| LoopMonomial::Circle { a: true, k }).collect(),
            _ => Vec::new(),
        },
        SpaceKind::OddSphere(n) => {
            let (n_, step) = (n as i64, n as i64 - 1);
            [false, true]
                .into_iter()
                .filter_map(|a| {
                    let r = j + if a { n_ } else { 0 };
                    (r >= 0 && r % step == 0).then(|| LoopMonomial::Odd { n, a, k: (r / step) as u32 })
                })
                .collect()
        }
        SpaceKind::EvenSphere(n) => {
            let (n_, step) = (n as i64, 2 * n as i64 - 2);
            [(EvenFamily::V, 0), (EvenFamily::BV, 1), (EvenFamily::AV, n_)]
                .into_iter()
                .filter_map(|(family, shift)| {
                    let r = j + shift;
                    (r >= 0 && r % step == 0).then(|| LoopMonomial::Even { n, family, k: (r / step) as u32 })
                })
                .collect()
        }
        SpaceKind::Torus => Vec::new(),
    }
}

/// A basis element of `H_k` in the split model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub generator: StringGen,
    pub label: String,
    /// Order in the split model, 0 for infinite order.
    pub split_order: u64,
    /// False when the element lies in an unresolved torsion block.
    pub resolved: bool,
}

/// Generators of `H_k`, ordered by base generator and then level.
pub fn basis(space: Space, k: i64, window: CircleWindow) -> Result<Vec<BasisElement>> {
    let d = sphere_dim(space)? as i64;
    let mut out = Vec::new();
    let lowest = lowest_loop_degree(space);
    let mut j = k - d;
    while j >= lowest {
        let level = ((k - d - j) / 2) as u32;
        for g in monomials_of_degree(space, j, window) {
            let order = erased_order(&g);
            let valid = if level == 0 { order != 1 && !is_rewritten(&g) } else { has_lifts(&g) };
            if !valid {
                continue;
            }
            let generator = StringGen { base: g, level };
            let resolved = match space.kind() {
                SpaceKind::OddSphere(n) if n >= 5 => order == 0,
                SpaceKind::EvenSphere(_) => order == 0 || order == 2,
                _ => level == 0 || lift_resolved(space, &g),
            };
            out.push(BasisElement { label: gen_label(&generator), generator, split_order: order, resolved });
        }
        j -= 2;
    }
    out.sort_by_key(|x| x.generator);
    Ok(out)
}

fn lowest_loop_degree(space: Space) -> i64 {
    match space {
        Space::Sphere { n } => -(n as i64),
        Space::Torus => -2,
    }
}

/// Total order of the torsion of `H_k` in the split model.
pub fn torsion_order(space: Space, k: i64) -> Result<u64> {
    let mut total: u64 = 1;
    for b in basis(space, k, CircleWindow::default())? {
        if b.split_order > 1 {
            total = total
                .checked_mul(b.split_order)
                .ok_or_else(|| Error::Invalid(format!("torsion order of degree {k} overflows")))?;
        }
    }
    Ok(total)
}

/// Reduction order of a generator.
pub fn gen_order(g: &StringGen) -> GenOrder {
    let space = g.space();
    let order = erased_order(&g.base);
    if order == 0 {
        return GenOrder::Free;
    }
    if g.level == 0 || lift_resolved(space, &g.base) {
        return GenOrder::Cyclic { order };
    }
    match torsion_order(space, g.degree()) {
        Ok(bound) => GenOrder::Block { bound },
        Err(_) => GenOrder::Free,
    }
}

fn power(letter: char, k: i64) -> String {
    match k {
        0 => "1".into(),
        1 => letter.to_string(),
        k => format!("{letter}^{k}"),
    }
}

/// Display name of a generator.
pub fn gen_label(g: &StringGen) -> String {
    let l = g.level;
    match g.base {
        LoopMonomial::Odd { n: 3, a: true, k: 0 } if l >= 1 => format!("x_{l}"),
        LoopMonomial::Odd { n: 3, a: true, k } => format!("α⊗{}", power('y', k as i64)),
        LoopMonomial::Odd { n: 3, a: false, k } => {
            let head = format!("(α⊗{})x", power('y', k as i64 + 1));
            if l == 0 {
                head
            } else {
                format!("{head}_{}", l + 1)
            }
        }
        base if l >= 1 && gamma_base(base.space()).ok() == Some(base) => format!("γ_{l}"),
        base if l == 0 => format!("e({base})"),
        base => format!("e({base})γ_{l}"),
    }
}

impl fmt::Display for StringGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&gen_label(self))
    }
}

fn parse_subscript(cur: &mut Cursor<'_>) -> Result<Option<u32>> {
    if !cur.eat("_") {
        return Ok(None);
    }
    let n = if cur.eat("{") {
        let n = cur.parse_natural()?;
        cur.expect("}")?;
        n
    } else {
        cur.parse_natural()?
    };
    Ok(Some(n))
}

fn parse_gamma_level(cur: &mut Cursor<'_>) -> Result<Option<u32>> {
    if !cur.eat("γ") {
        return Ok(None);
    }
    let at = cur.clone();
    match parse_subscript(cur)? {
        Some(0) => Err(at.error("γ subscripts start at 1")),
        Some(l) => Ok(Some(l)),
        None => Ok(Some(1)),
    }
}

/// Parses a generator name in any of the display forms; the result is not
/// yet normalized.
fn parse_gen(space: Space, cur: &mut Cursor<'_>) -> Result<StringGen> {
    let s3 = space == Space::Sphere { n: 3 };
    match cur.peek() {
        Some('e') => {
            cur.bump();
            cur.expect("(")?;
            let base = LoopMonomial::parse_from(space, cur)?;
            cur.expect(")")?;
            let level = parse_gamma_level(cur)?.unwrap_or(0);
            Ok(StringGen { base, level })
        }
        Some('γ') => {
            let level = parse_gamma_level(cur)?.unwrap_or(1);
            Ok(StringGen { base: gamma_base(space)?, level })
        }
        Some('(') if s3 => {
            cur.bump();
            let at = cur.clone();
            let inner = LoopMonomial::parse_from(space, cur)?;
            cur.expect(")")?;
            let LoopMonomial::Odd { a: true, k, .. } = inner else {
                return Err(at.error("expected `α⊗y^j` inside the parentheses"));
            };
            if k == 0 {
                return Err(at.error("the exponent of y must be at least 1"));
            }
            cur.expect("x")?;
            let at = cur.clone();
            let level = match parse_subscript(cur)? {
                None => 0,
                Some(0) => return Err(at.error("x subscripts start at 1")),
                Some(i) => i - 1,
            };
            Ok(StringGen { base: LoopMonomial::Odd { n: 3, a: false, k: k - 1 }, level })
        }
        Some('x') if s3 => {
            cur.bump();
            let at = cur.clone();
            match parse_subscript(cur)? {
                Some(l) if l >= 1 => Ok(StringGen { base: LoopMonomial::Odd { n: 3, a: true, k: 0 }, level: l }),
                _ => Err(at.error("expected `x_l` with l ≥ 1")),
            }
        }
        _ => Ok(StringGen { base: LoopMonomial::parse_from(space, cur)?, level: 0 }),
    }
}

/// An element of `H_*^{S¹}(LSⁿ)`, reduced after every operation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StringChain {
    space: Space,
    chain: IntChain<StringGen>,
}

impl StringChain {
    pub fn zero(space: Space) -> Self {
        Self { space, chain: FreeChain::zero() }
    }

    /// Builds a chain from arbitrary `(g, l)` terms, rewriting non-basis
    /// classes and rejecting lifts that do not exist.
    pub fn from_terms<I: IntoIterator<Item = (StringGen, Int)>>(space: Space, terms: I) -> Result<Self> {
        sphere_dim(space)?;
        let mut chain = FreeChain::zero();
        for (g, c) in terms {
            if g.space() != space {
                return Err(Error::MixedSpaces { left: space.to_string(), right: g.space().to_string() });
            }
            for (h, e) in normalize_gen(&g)?.iter() {
                chain.add_term(*h, e * c);
            }
        }
        Ok(Self { space, chain }.reduced())
    }

    pub fn generator(g: StringGen) -> Result<Self> {
        Self::from_terms(g.space(), [(g, 1)])
    }

    pub fn parse(space: Space, s: &str) -> Result<Self> {
        sphere_dim(space)?;
        if s.trim() == "0" {
            return Ok(Self::zero(space));
        }
        let raw: IntChain<StringGen> = parse_chain(s, |c| parse_gen(space, c), None)?;
        Self::from_terms(space, raw.iter().map(|(g, c)| (*g, *c)))
    }

    fn reduced(self) -> Self {
        let chain = self.chain.reduce_with(|g| gen_order(g).modulus());
        Self { space: self.space, chain }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn chain(&self) -> &IntChain<StringGen> {
        &self.chain
    }

    pub fn is_zero(&self) -> bool {
        self.chain.is_zero()
    }

    pub fn coefficient(&self, g: &StringGen) -> Int {
        self.chain.coefficient(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StringGen, &Int)> {
        self.chain.iter()
    }

    pub fn degree(&self) -> Option<i64> {
        self.chain.homogeneous_degree()
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(Error::MixedSpaces { left: self.space.to_string(), right: other.space.to_string() })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self { space: self.space, chain: self.chain.add(&other.chain) }.reduced())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_space(other)?;
        Ok(Self { space: self.space, chain: self.chain.sub(&other.chain) }.reduced())
    }

    pub fn scale(&self, c: Int) -> Self {
        Self { space: self.space, chain: self.chain.scale(&c) }.reduced()
    }
}

impl fmt::Display for StringChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.chain.fmt(f)
    }
}

/// Expresses `(g, l)` in the basis.
fn normalize_gen(g: &StringGen) -> Result<IntChain<StringGen>> {
    if is_rewritten(&g.base) {
        if g.level > 0 {
            return Err(Error::Invalid(format!("{} has no lifts; use the lifts of e(v^k)", g.base)));
        }
        // Δ(b vʲ⁻¹) = (2j−1) vʲ⁻¹ + a vʲ, so e(a vʲ) = −(2j−1) e(vʲ⁻¹).
        let LoopMonomial::Even { n, k, .. } = g.base else { unreachable!() };
        let v = LoopMonomial::Even { n, family: EvenFamily::V, k: k - 1 };
        return Ok(FreeChain::term(StringGen::erased(v), -(2 * k as Int - 1)));
    }
    if g.level == 0 {
        return Ok(if erased_order(&g.base) == 1 { FreeChain::zero() } else { FreeChain::generator(*g) });
    }
    if has_lifts(&g.base) {
        Ok(FreeChain::generator(*g))
    } else {
        Err(Error::Invalid(format!(
            "e({}) has no lift to level {} (its BV image is nonzero or the class vanishes)",
            g.base, g.level
        )))
    }
}

/// The erasing map `e: 𝐇_{*} → H_{*+d}`.
pub fn erasing(x: &LoopChain) -> Result<StringChain> {
    StringChain::from_terms(x.space(), x.iter().map(|(g, c)| (StringGen::erased(*g), *c)))
}

/// The marking map `M: H_* → 𝐇_{*−d+1}`.
pub fn marking(x: &StringChain) -> LoopChain {
    let mut out = LoopChain::zero(x.space());
    for (g, &c) in x.iter() {
        if g.level == 0 {
            let image = LoopChain::from_chain(x.space(), g.base.delta()).expect("Δ stays in the space");
            out = out.add(&image.scale(c)).expect("same space");
        }
    }
    out
}

/// The cap map `c: H_* → H_{*−2}`.
pub fn cap(x: &StringChain) -> StringChain {
    let terms = x.iter().filter(|(g, _)| g.level > 0).map(|(g, c)| (StringGen { base: g.base, level: g.level - 1 }, *c));
    StringChain::from_terms(x.space(), terms).expect("lowering a level stays in the basis")
}

/// The string bracket `[x, y] = (−1)^{|x|−d} e(M(x) • M(y))`.
pub fn string_bracket(x: &StringChain, y: &StringChain) -> Result<StringChain> {
    x.same_space(y)?;
    if x.is_zero() {
        return Ok(StringChain::zero(x.space()));
    }
    let deg = x.degree().ok_or_else(|| Error::NotHomogeneous(x.to_string()))?;
    let sign = if (deg - x.space().dimension()).rem_euclid(2) == 0 { 1 } else { -1 };
    let product = loop_product(&marking(x), &marking(y))?;
    Ok(erasing(&product)?.scale(sign))
}

/// One summand of a homology table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    pub generator: String,
    /// Order in the split model, 0 for `ℤ`.
    pub order: u64,
    pub resolved: bool,
}

/// `H_k^{S¹}(LSⁿ)` with named generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringHomology {
    pub space: Space,
    pub degree: i64,
    pub group: AbelianGroupDescriptor,
    pub summands: Vec<Summand>,
}

fn two_part(n: u64) -> u64 {
    if n == 0 {
        0
    } else {
        1 << n.trailing_zeros()
    }
}

/// The group `H_k^{S¹}(LSⁿ)`; on `S¹` restricted to `window`.
pub fn string_homology(space: Space, k: i64, window: CircleWindow) -> Result<StringHomology> {
    if k < 0 {
        return Err(Error::Invalid(format!("degree {k} is negative")));
    }
    let elements = basis(space, k, window)?;
    let mut group = AbelianGroupDescriptor::default();
    let mut block: u64 = 1;
    let even = matches!(space.kind(), SpaceKind::EvenSphere(_));
    let mut torsion = Vec::new();
    for b in &elements {
        match (b.split_order, b.resolved) {
            (0, _) => group.free_rank += 1,
            (n, true) => torsion.push(n),
            (n, false) => {
                let resolved = if even { two_part(n) } else { 1 };
                if resolved > 1 {
                    torsion.push(resolved);
                }
                block = block
                    .checked_mul(n / resolved)
                    .ok_or_else(|| Error::Invalid(format!("torsion order of degree {k} overflows")))?;
            }
        }
    }
    torsion.sort_unstable();
    group.torsion = torsion;
    if block > 1 {
        group.unresolved_order = Some(block);
    }
    let summands = elements
        .into_iter()
        .map(|b| Summand { generator: b.label, order: b.split_order, resolved: b.resolved })
        .collect();
    Ok(StringHomology { space, degree: k, group, summands })
}

impl fmt::Display for StringHomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        let mut block = Vec::new();
        for s in &self.summands {
            match (s.order, s.resolved) {
                (0, _) => parts.push(format!("Z ⟨{}⟩", s.generator)),
                (n, true) => parts.push(format!("Z/{n} ⟨{}⟩", s.generator)),
                (_, false) => block.push(s.generator.clone()),
            }
        }
        if let Some(n) = self.group.unresolved_order {
            let two: Vec<String> = self
                .summands
                .iter()
                .filter(|s| !s.resolved && two_part(s.order) > 1 && matches!(self.space.kind(), SpaceKind::EvenSphere(_)))
                .map(|s| format!("Z/{} ⟨{}⟩", two_part(s.order), s.generator))
                .collect();
            parts.extend(two);
            parts.push(format!("T({n}) ⟨{}⟩", block.join(", ")));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loops::bv_delta;

    fn sp(s: &str) -> Space {
        s.parse().unwrap()
    }

    fn st(space: &str, s: &str) -> StringChain {
        StringChain::parse(sp(space), s).unwrap()
    }

    fn lp(space: &str, s: &str) -> LoopChain {
        LoopChain::parse(sp(space), s).unwrap()
    }

    fn h(space: &str, k: i64) -> AbelianGroupDescriptor {
        string_homology(sp(space), k, CircleWindow::default()).unwrap().group
    }

    fn desc(free: usize, torsion: &[u64]) -> AbelianGroupDescriptor {
        AbelianGroupDescriptor { free_rank: free, torsion: torsion.to_vec(), unresolved_order: None }
    }

    #[test]
    fn homology_examples() {
        let h2 = string_homology(sp("S3"), 2, CircleWindow::default()).unwrap();
        assert_eq!(h2.group, desc(2, &[]));
        let names: Vec<&str> = h2.summands.iter().map(|s| s.generator.as_str()).collect();
        assert_eq!(names, ["x_1", "α⊗y"]);
        assert!(h("S3", 3).is_trivial());
        assert_eq!(h("S4", 6), desc(1, &[2]));
        let h5 = string_homology(sp("S3"), 5, CircleWindow::default()).unwrap();
        assert_eq!(h5.to_string(), "Z/2 ⟨(α⊗y^2)x⟩");
    }

    #[test]
    fn s3_table() {
        assert_eq!(h("S3", 0), desc(1, &[]));
        assert!(h("S3", 1).is_trivial());
        for i in 1..=10 {
            assert_eq!(h("S3", 2 * i), desc(2, &[]), "H_{}", 2 * i);
        }
        for i in 1..10i64 {
            let expected: Vec<u64> = (2..=i as u64).collect();
            assert_eq!(h("S3", 2 * i + 1), desc(0, &expected), "H_{}", 2 * i + 1);
        }
        assert_eq!(h("S3", 7).torsion_order(), 6);
    }

    #[test]
    fn s4_table() {
        let expected = [desc(1, &[]), desc(0, &[]), desc(1, &[]), desc(1, &[]), desc(1, &[]), desc(0, &[]), desc(1, &[2]), desc(0, &[])];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(&h("S4", k as i64), e, "H_{k}(LS^4)");
        }
        let names: Vec<String> =
            string_homology(sp("S4"), 6, CircleWindow::default()).unwrap().summands.into_iter().map(|s| s.generator).collect();
        assert_eq!(names, ["γ_3", "e(a v)"]);
    }

    #[test]
    fn s1_table() {
        let w = CircleWindow::symmetric(5);
        let get = |k| string_homology(sp("S1"), k, w).unwrap().group;
        assert_eq!(get(0), desc(11, &[]));
        for i in 0..6 {
            assert_eq!(get(2 * i + 1), desc(1, &[2, 2, 3, 3, 4, 4, 5, 5]), "H_{}", 2 * i + 1);
        }
        for i in 1..6 {
            assert_eq!(get(2 * i), desc(1, &[]), "H_{}", 2 * i);
        }
    }

    #[test]
    fn marking_and_erasing_examples() {
        assert_eq!(marking(&st("S3", "α⊗y^3")), lp("S3", "3·1⊗y^2"));
        assert!(marking(&st("S5", "γ_5")).is_zero());
        for k in 0..6 {
            let x = StringChain::generator(StringGen::erased(LoopMonomial::Even { n: 6, family: EvenFamily::BV, k })).unwrap();
            let v = LoopChain::monomial(LoopMonomial::Even { n: 6, family: EvenFamily::V, k });
            assert_eq!(marking(&x), v.scale(2 * k as Int + 1));
        }
        let e = erasing(&lp("S3", "1⊗y")).unwrap();
        assert_eq!(e, st("S3", "(α⊗y^2)x"));
        assert_eq!(gen_order(e.iter().next().unwrap().0), GenOrder::Cyclic { order: 2 });
        assert!(erasing(&lp("S3", "1⊗1")).unwrap().is_zero());
        assert!(erasing(&lp("S1", "2·1⊗x^2")).unwrap().is_zero());
        assert_eq!(erasing(&lp("S2", "a v^2")).unwrap(), st("S2", "3·e(v)"));
    }

    #[test]
    fn cap_lowers_levels() {
        assert_eq!(cap(&st("S3", "(α⊗y^2)x_3")), st("S3", "(α⊗y^2)x_2"));
        assert_eq!(cap(&st("S3", "x_1")), st("S3", "α⊗1"));
        assert_eq!(cap(&st("S4", "γ_1")), st("S4", "e(a)"));
        assert!(cap(&st("S4", "e(b)")).is_zero());
    }

    #[test]
    fn bracket_examples() {
        let x = st("S1", "e(a⊗x^2)");
        let y = st("S1", "e(a⊗x^3)");
        let b = string_bracket(&x, &y).unwrap();
        assert_eq!(b, st("S1", "4·e(1⊗x^5)"));
        assert_eq!(b.to_string(), "4·e(1⊗x^5)");
        let a = st("S3", "α⊗y");
        assert!(string_bracket(&a, &a).unwrap().is_zero());
        for k in 1..8u32 {
            for l in 1..8u32 {
                let bk = StringChain::generator(StringGen::erased(LoopMonomial::Even { n: 4, family: EvenFamily::BV, k })).unwrap();
                let bl = StringChain::generator(StringGen::erased(LoopMonomial::Even { n: 4, family: EvenFamily::BV, k: l })).unwrap();
                let v = StringChain::generator(StringGen::erased(LoopMonomial::Even { n: 4, family: EvenFamily::V, k: k + l })).unwrap();
                let expected = v.scale(-((2 * k as Int + 1) * (2 * l as Int + 1)));
                assert_eq!(string_bracket(&bk, &bl).unwrap(), expected);
                assert_eq!(v.scale(-4 * k as Int * l as Int), expected, "congruence mod 2(k+l)+1");
            }
        }
        let mixed = st("S3", "α⊗y + α⊗y^2");
        assert!(matches!(string_bracket(&mixed, &a), Err(Error::NotHomogeneous(_))));
        assert!(matches!(string_bracket(&a, &st("S5", "e(a⊗u)")), Err(Error::MixedSpaces { .. })));
    }

    #[test]
    fn s3_bracket_vanishing_criterion() {
        for i in 1..=30i64 {
            for j in 1..=30i64 {
                let x = st("S3", &format!("α⊗y^{i}"));
                let y = st("S3", &format!("α⊗y^{j}"));
                let b = string_bracket(&x, &y).unwrap();
                let target = StringGen::erased(LoopMonomial::Odd { n: 3, a: false, k: (i + j - 2) as u32 });
                let expected = (-i * j).rem_euclid(i + j - 1);
                assert_eq!(b.coefficient(&target), expected);
                assert_eq!(b.is_zero(), (i * j) % (i + j - 1) == 0, "i={i}, j={j}");
            }
        }
    }

    #[test]
    fn even_sphere_bracket_vanishes_exactly_when_the_odd_modulus_divides_4kl() {
        let mut zeros = Vec::new();
        for k in 1..=30u32 {
            for l in 1..=30u32 {
                let g = |k| StringChain::generator(StringGen::erased(LoopMonomial::Even { n: 4, family: EvenFamily::BV, k })).unwrap();
                let zero = string_bracket(&g(k), &g(l)).unwrap().is_zero();
                assert_eq!(zero, (4 * k * l) % (2 * k + 2 * l + 1) == 0);
                if zero {
                    zeros.push((k, l));
                }
            }
        }
        assert!(zeros.contains(&(6, 13)));
    }

    #[test]
    fn circle_degree_zero_brackets_are_free_exactly_when_exponents_cancel() {
        for n in -10..=10i64 {
            for m in -10..=10i64 {
                let x = st("S1", &format!("e(a⊗x^{n})"));
                let y = st("S1", &format!("e(a⊗x^{m})"));
                let b = string_bracket(&x, &y).unwrap();
                for (g, _) in b.iter() {
                    assert_eq!(gen_order(g) == GenOrder::Free, n + m == 0);
                }
                if n + m == 0 {
                    assert_eq!(b.coefficient(&StringGen::erased(LoopMonomial::Circle { a: false, k: 0 })), n * n);
                }
            }
        }
    }

    fn sphere_spaces() -> Vec<Space> {
        (1..=8).map(|n| Space::Sphere { n }).collect()
    }

    fn string_generators(space: Space, bound: u32) -> Vec<StringGen> {
        let mut out = Vec::new();
        for g in space.generators(bound) {
            for level in 0..=3 {
                let s = StringGen { base: g, level };
                if let Ok(c) = normalize_gen(&s) {
                    if c.as_single_term().map(|(h, _)| *h == s).unwrap_or(false) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn structure_identities_hold_exhaustively() {
        for space in sphere_spaces() {
            for g in space.generators(20) {
                let x = LoopChain::monomial(g);
                let m_e = marking(&erasing(&x).unwrap());
                assert_eq!(m_e, bv_delta(&x), "M∘e ≠ Δ on {g} in {space}");
            }
            for s in string_generators(space, 20) {
                let x = StringChain::generator(s).unwrap();
                assert!(erasing(&marking(&x)).unwrap().is_zero(), "e∘M ≠ 0 on {s} in {space}");
                if let Some(d) = marking(&x).degree() {
                    assert_eq!(d, s.degree() - space.dimension() + 1);
                }
                if let Some(d) = cap(&x).degree() {
                    assert_eq!(d, s.degree() - 2);
                }
            }
        }
    }

    #[test]
    fn bracket_is_bilinear_with_degree_two_minus_d() {
        for space in sphere_spaces() {
            let gens: Vec<StringGen> = string_generators(space, 3);
            for p in &gens {
                for q in &gens {
                    let x = StringChain::generator(*p).unwrap();
                    let y = StringChain::generator(*q).unwrap();
                    let b = string_bracket(&x, &y).unwrap();
                    if let Some(d) = b.degree() {
                        assert_eq!(d, p.degree() + q.degree() + 2 - space.dimension());
                    }
                    let y2 = y.scale(3).add(&x.scale(0)).unwrap();
                    assert_eq!(string_bracket(&x, &y2).unwrap(), b.scale(3));
                    assert_eq!(string_bracket(&x.scale(-2), &y).unwrap(), b.scale(-2));
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        for space in sphere_spaces() {
            for s in string_generators(space, 4) {
                let x = StringChain::generator(s).unwrap().scale(5);
                let back = StringChain::parse(space, &x.to_string()).unwrap();
                assert_eq!(back, x, "{x} in {space}");
            }
        }
        assert_eq!(st("S3", "(α⊗y^3)x_2"), StringChain::generator(StringGen::lift(LoopMonomial::Odd { n: 3, a: false, k: 2 }, 1)).unwrap());
        assert_eq!(st("S4", "γ"), st("S4", "γ_1"));
        assert_eq!(st("S4", "e(a)γ_2"), st("S4", "γ_2"));
        assert!(StringChain::parse(sp("S3"), "α⊗y^2 x").is_err());
        assert!(matches!(StringChain::parse(sp("S4"), "e(b)γ_1"), Err(Error::Invalid(_))));
        assert!(matches!(StringChain::parse(sp("S3"), "(α⊗1)x"), Err(Error::Parse { column: 2, .. })));
    }

    #[test]
    fn block_members_reduce_by_block_order() {
        let x = st("S5", "e(1⊗u)γ_1");
        let bound = torsion_order(sp("S5"), x.degree().unwrap()).unwrap();
        assert!(matches!(gen_order(x.iter().next().unwrap().0), GenOrder::Block { .. }));
        assert!(x.scale(bound as Int).is_zero());
        assert!(!x.scale(2).is_zero() || bound == 2);
    }

    /// Mod-2 Poincaré series of `H_*^{S¹}(LS⁴; ℤ/2)`:
    /// `(t³ + (1 + t⁷)/(1 − t²)) / (1 − t⁶)`.
    fn westerland_s4(m: i64) -> i64 {
        let mut count = 0;
        for j in 0..=m / 6 {
            let r = m - 6 * j;
            if r == 3 {
                count += 1;
            }
            if r >= 0 && r % 2 == 0 {
                count += 1;
            }
            if r >= 7 && (r - 7) % 2 == 0 {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn s4_agrees_with_mod_two_series_by_universal_coefficients() {
        let even_cyclic = |g: &AbelianGroupDescriptor| g.torsion.iter().filter(|t| *t % 2 == 0).count() as i64;
        for m in 0..=60 {
            let hm = h("S4", m);
            let prev = if m > 0 { even_cyclic(&h("S4", m - 1)) } else { 0 };
            let dim = hm.free_rank as i64 + even_cyclic(&hm) + prev;
            assert_eq!(dim, westerland_s4(m), "degree {m}");
        }
    }
}
