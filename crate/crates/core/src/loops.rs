//! Loop homology rings of spheres and the torus.
//!
//! Each space is modelled by its monomial presentation:
//!
//! | space | ring | degrees |
//! |-------|------|---------|
//! | `S¹` | `Λ[a] ⊗ ℤ[x, x⁻¹]` | `|a| = −1`, `|x| = 0` |
//! | `Sⁿ`, `n` odd | `Λ[a] ⊗ ℤ[u]` | `|a| = −n`, `|u| = n − 1` |
//! | `Sⁿ`, `n` even | `Λ[b] ⊗ ℤ[a, v] / (a², ab, 2av)` | `|a| = −n`, `|b| = −1`, `|v| = 2n − 2` |
//! | `T²` | `1ₙₘ, xₙₘ, yₙₘ, zₙₘ` for `(n, m) ∈ ℤ²` | `−2, −1, −1, 0` |
//!
//! The BV operator is linear with
//!
//! * `Δ(a⊗xᵏ) = k·(1⊗xᵏ)` on `S¹`,
//! * `Δ(a⊗uⁱ) = i·(1⊗uⁱ⁻¹)` on odd spheres,
//! * `Δ(b vᵏ) = (2k+1)·vᵏ` on even spheres `n ≥ 4`, and
//!   `Δ(b vᵏ) = (2k+1)·vᵏ + a vᵏ⁺¹` on `S²`,
//! * `Δ(1ₙₘ) = n·xₙₘ + m·yₙₘ`, `Δ(xₙₘ) = m·zₙₘ`, `Δ(yₙₘ) = −n·zₙₘ`,
//!   `Δ(zₙₘ) = 0` on the torus,
//!
//! and zero on every other generator. The torus values are those of the
//! tensor product rule `Δ(A⊗B) = ΔA⊗B + (−1)^{|A|+1} A⊗ΔB` on two circle
//! factors under `1ₙₘ = −(a⊗xⁿ)⊗(a⊗xᵐ)`, `xₙₘ = −(1⊗xⁿ)⊗(a⊗xᵐ)`,
//! `yₙₘ = −(a⊗xⁿ)⊗(1⊗xᵐ)`, `zₙₘ = (1⊗xⁿ)⊗(1⊗xᵐ)`; this is the unique
//! choice compatible with `Δ(1ₙₘ)` above and with `Δ∘Δ = 0`.
//!
//! The torus loop product adds indices and is given on families by
//! `z•w = w•z = w`, `x•y = 1`, `y•x = −1`, and zero otherwise.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{FreeChain, Graded};
use crate::text::{parse_chain, Cursor};
use crate::{Error, Int, IntChain, Result};

/// A space with an implemented loop homology presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Space {
    /// The sphere `Sⁿ`, `n ≥ 1`.
    Sphere { n: u32 },
    /// The torus `T²`.
    Torus,
}

/// Coarse classification used to dispatch on presentations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Circle,
    OddSphere(u32),
    EvenSphere(u32),
    Torus,
}

impl Space {
    pub fn sphere(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedSpace { space: "S^0".into(), reason: "spheres need n ≥ 1".into() });
        }
        Ok(Space::Sphere { n })
    }

    pub fn kind(&self) -> SpaceKind {
        match *self {
            Space::Sphere { n: 1 } => SpaceKind::Circle,
            Space::Sphere { n } if n % 2 == 1 => SpaceKind::OddSphere(n),
            Space::Sphere { n } => SpaceKind::EvenSphere(n),
            Space::Torus => SpaceKind::Torus,
        }
    }

    /// The manifold dimension `d`.
    pub fn dimension(&self) -> i64 {
        match *self {
            Space::Sphere { n } => n as i64,
            Space::Torus => 2,
        }
    }

    /// The unit of the loop product (the fundamental class on the constant
    /// loops); on the torus this is `z₀₀`.
    pub fn unit(&self) -> LoopMonomial {
        match self.kind() {
            SpaceKind::Circle => LoopMonomial::Circle { a: false, k: 0 },
            SpaceKind::OddSphere(n) => LoopMonomial::Odd { n, a: false, k: 0 },
            SpaceKind::EvenSphere(n) => LoopMonomial::Even { n, family: EvenFamily::V, k: 0 },
            SpaceKind::Torus => LoopMonomial::Torus { family: TorusFamily::Z, n: 0, m: 0 },
        }
    }

    /// All generators with exponents bounded by `bound` in absolute value.
    pub fn generators(&self, bound: u32) -> Vec<LoopMonomial> {
        let b = bound as Int;
        match self.kind() {
            SpaceKind::Circle => [false, true]
                .into_iter()
                .flat_map(|a| (-b..=b).map(move |k| LoopMonomial::Circle { a, k }))
                .collect(),
            SpaceKind::OddSphere(n) => [false, true]
                .into_iter()
                .flat_map(|a| (0..=bound).map(move |k| LoopMonomial::Odd { n, a, k }))
                .collect(),
            SpaceKind::EvenSphere(n) => [EvenFamily::V, EvenFamily::BV, EvenFamily::AV]
                .into_iter()
                .flat_map(|family| (0..=bound).map(move |k| LoopMonomial::Even { n, family, k }))
                .collect(),
            SpaceKind::Torus => TorusFamily::ALL
                .into_iter()
                .flat_map(|family| {
                    (-b..=b).flat_map(move |n| (-b..=b).map(move |m| LoopMonomial::Torus { family, n, m }))
                })
                .collect(),
        }
    }

    /// Whether `m` is a generator of this space's presentation.
    pub fn contains(&self, m: &LoopMonomial) -> bool {
        m.space() == *self
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Sphere { n } => write!(f, "S{n}"),
            Space::Torus => write!(f, "T2"),
        }
    }
}

impl std::str::FromStr for Space {
    type Err = Error;

    /// Accepts `S3`, `S^3`, `s3`, `T`, `T2`, `T^2` and `torus`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "t" | "t2" | "t^2" | "torus") {
            return Ok(Space::Torus);
        }
        let digits = t.strip_prefix('s').map(|r| r.trim_start_matches('^'));
        match digits.and_then(|d| d.parse::<u32>().ok()) {
            Some(n) => Space::sphere(n),
            None => Err(Error::Invalid(format!("unknown space {s:?}; expected S<n> or T"))),
        }
    }
}

/// Monomial families on an even sphere: `vᵏ`, `b vᵏ` and `a vᵏ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EvenFamily {
    V,
    BV,
    AV,
}

/// Generator families of the torus loop homology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TorusFamily {
    One,
    X,
    Y,
    Z,
}

impl TorusFamily {
    pub const ALL: [TorusFamily; 4] = [TorusFamily::One, TorusFamily::X, TorusFamily::Y, TorusFamily::Z];

    pub fn degree(&self) -> i64 {
        match self {
            TorusFamily::One => -2,
            TorusFamily::X | TorusFamily::Y => -1,
            TorusFamily::Z => 0,
        }
    }

    fn symbol(&self) -> char {
        match self {
            TorusFamily::One => '1',
            TorusFamily::X => 'x',
            TorusFamily::Y => 'y',
            TorusFamily::Z => 'z',
        }
    }
}

/// An additive generator of `𝐇_*(LM)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LoopMonomial {
    /// `aᵉ⊗xᵏ` on `S¹`, `k ∈ ℤ`.
    Circle { a: bool, k: Int },
    /// `aᵉ⊗uᵏ` on the odd sphere `Sⁿ`, `n ≥ 3`.
    Odd { n: u32, a: bool, k: u32 },
    /// `vᵏ`, `b vᵏ` or `a vᵏ` on the even sphere `Sⁿ`.
    Even { n: u32, family: EvenFamily, k: u32 },
    /// `1ₙₘ`, `xₙₘ`, `yₙₘ` or `zₙₘ` on the torus.
    Torus { family: TorusFamily, n: Int, m: Int },
}

impl LoopMonomial {
    pub fn space(&self) -> Space {
        match *self {
            LoopMonomial::Circle { .. } => Space::Sphere { n: 1 },
            LoopMonomial::Odd { n, .. } | LoopMonomial::Even { n, .. } => Space::Sphere { n },
            LoopMonomial::Torus { .. } => Space::Torus,
        }
    }

    /// Additive order: 2 for `a vᵏ`, `k ≥ 1`, and 0 (infinite) otherwise.
    pub fn order(&self) -> Int {
        match self {
            LoopMonomial::Even { family: EvenFamily::AV, k, .. } if *k >= 1 => 2,
            _ => 0,
        }
    }

    /// Loop product of two generators of the same space, as `(sign, monomial)`,
    /// or `None` when it vanishes.
    pub fn product(&self, other: &Self) -> Option<(Int, LoopMonomial)> {
        use LoopMonomial::*;
        match (*self, *other) {
            (Circle { a: a1, k: k1 }, Circle { a: a2, k: k2 }) => {
                (!(a1 && a2)).then_some((1, Circle { a: a1 || a2, k: k1 + k2 }))
            }
            (Odd { n, a: a1, k: k1 }, Odd { n: n2, a: a2, k: k2 }) if n == n2 => {
                (!(a1 && a2)).then_some((1, Odd { n, a: a1 || a2, k: k1 + k2 }))
            }
            (Even { n, family: f1, k: k1 }, Even { n: n2, family: f2, k: k2 }) if n == n2 => {
                let family = match (f1, f2) {
                    (EvenFamily::V, f) | (f, EvenFamily::V) => f,
                    _ => return None,
                };
                Some((1, Even { n, family, k: k1 + k2 }))
            }
            (Torus { family: f1, n: n1, m: m1 }, Torus { family: f2, n: n2, m: m2 }) => {
                let (sign, family) = match (f1, f2) {
                    (TorusFamily::Z, f) | (f, TorusFamily::Z) => (1, f),
                    (TorusFamily::X, TorusFamily::Y) => (1, TorusFamily::One),
                    (TorusFamily::Y, TorusFamily::X) => (-1, TorusFamily::One),
                    _ => return None,
                };
                Some((sign, Torus { family, n: n1 + n2, m: m1 + m2 }))
            }
            _ => None,
        }
    }

    /// The BV operator on one generator, before torsion reduction.
    pub fn delta(&self) -> IntChain<LoopMonomial> {
        use LoopMonomial::*;
        match *self {
            Circle { a: true, k } => FreeChain::term(Circle { a: false, k }, k),
            Odd { n, a: true, k } if k >= 1 => FreeChain::term(Odd { n, a: false, k: k - 1 }, k as Int),
            Even { n, family: EvenFamily::BV, k } => {
                let mut out = FreeChain::term(Even { n, family: EvenFamily::V, k }, 2 * k as Int + 1);
                if n == 2 {
                    out.add_term(Even { n, family: EvenFamily::AV, k: k + 1 }, 1);
                }
                out
            }
            Torus { family: TorusFamily::One, n, m } => FreeChain::from_terms([
                (Torus { family: TorusFamily::X, n, m }, n),
                (Torus { family: TorusFamily::Y, n, m }, m),
            ]),
            Torus { family: TorusFamily::X, n, m } => FreeChain::term(Torus { family: TorusFamily::Z, n, m }, m),
            Torus { family: TorusFamily::Y, n, m } => FreeChain::term(Torus { family: TorusFamily::Z, n, m }, -n),
            _ => FreeChain::zero(),
        }
    }

    /// Parses one generator of `space`.
    pub fn parse_from(space: Space, cur: &mut Cursor<'_>) -> Result<Self> {
        match space.kind() {
            SpaceKind::Circle => {
                let (a, k) = parse_exterior(cur, &['x'], true)?;
                Ok(LoopMonomial::Circle { a, k })
            }
            SpaceKind::OddSphere(n) => {
                let at = cur.clone();
                let (a, k) = parse_exterior(cur, &['u', 'y'], false)?;
                let k = u32::try_from(k).map_err(|_| at.error("exponents are nonnegative on this sphere"))?;
                Ok(LoopMonomial::Odd { n, a, k })
            }
            SpaceKind::EvenSphere(n) => parse_even(n, cur),
            SpaceKind::Torus => parse_torus(cur),
        }
    }

    /// Parses a standalone generator.
    pub fn parse(space: Space, s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let m = Self::parse_from(space, &mut cur)?;
        cur.finish()?;
        Ok(m)
    }
}

fn variable_letter(n: u32) -> char {
    match n {
        1 => 'x',
        3 => 'y',
        _ => 'u',
    }
}

fn exterior_letter(n: u32) -> char {
    if n == 3 {
        'α'
    } else {
        'a'
    }
}

fn power_text(letter: char, k: Int) -> String {
    match k {
        0 => "1".into(),
        1 => letter.to_string(),
        k => format!("{letter}^{k}"),
    }
}

/// `aᵉ⊗tᵏ` with `a` or `α` optional, `⊗`/`*` or juxtaposition between
/// the factors, and `1` for either trivial factor.
fn parse_exterior(cur: &mut Cursor<'_>, letters: &[char], negative_ok: bool) -> Result<(bool, Int)> {
    let mut a = false;
    let mut saw_factor = false;
    match cur.peek() {
        Some('a') | Some('α') => {
            cur.bump();
            a = true;
            saw_factor = true;
        }
        Some('1') => {
            cur.bump();
            saw_factor = true;
        }
        _ => {}
    }
    let separated = saw_factor && cur.eat_any(&["⊗", "*"]).is_some();
    let at = cur.clone();
    let k = match cur.peek() {
        Some(c) if letters.contains(&c) => {
            cur.bump();
            cur.parse_exponent()?
        }
        Some('1') if separated => {
            cur.bump();
            0
        }
        _ if separated => return Err(cur.error(format!("expected `{}` or `1` after `⊗`", letters[0]))),
        _ if saw_factor => 0,
        _ => return Err(cur.error(format!("expected a generator such as `a⊗{}^2`", letters[0]))),
    };
    if k < 0 && !negative_ok {
        return Err(at.error("exponents are nonnegative on this sphere"));
    }
    Ok((a, k))
}

fn parse_even(n: u32, cur: &mut Cursor<'_>) -> Result<LoopMonomial> {
    let start = cur.clone();
    let (mut a, mut b, mut k) = (0, 0, 0i64);
    let mut any = false;
    loop {
        if any {
            cur.eat("*");
        }
        let at = cur.clone();
        match cur.peek() {
            Some('a') => {
                cur.bump();
                a += 1;
            }
            Some('b') => {
                cur.bump();
                b += 1;
            }
            Some('v') => {
                cur.bump();
                let e = cur.parse_exponent()?;
                if e < 0 {
                    return Err(at.error("exponents are nonnegative on this sphere"));
                }
                k += e;
            }
            Some('1') if !any => {
                cur.bump();
            }
            _ if any => break,
            _ => return Err(cur.error("expected a generator such as `b v^2`")),
        }
        any = true;
    }
    let family = match (a, b) {
        (0, 0) => EvenFamily::V,
        (0, 1) => EvenFamily::BV,
        (1, 0) => EvenFamily::AV,
        _ => return Err(start.error("a², ab and b² vanish; write such products as 0")),
    };
    let k = u32::try_from(k).map_err(|_| start.error("exponent out of range"))?;
    Ok(LoopMonomial::Even { n, family, k })
}

fn parse_torus(cur: &mut Cursor<'_>) -> Result<LoopMonomial> {
    let family = match cur.bump() {
        Some('1') => TorusFamily::One,
        Some('x') => TorusFamily::X,
        Some('y') => TorusFamily::Y,
        Some('z') => TorusFamily::Z,
        _ => return Err(cur.error("expected one of `1[n,m]`, `x[n,m]`, `y[n,m]`, `z[n,m]`")),
    };
    let close = if cur.eat("[") {
        "]"
    } else if cur.eat("_{") {
        "}"
    } else {
        return Err(cur.error("expected `[n,m]` after the family symbol"));
    };
    let n = cur.parse_int()?;
    cur.expect(",")?;
    let m = cur.parse_int()?;
    cur.expect(close)?;
    Ok(LoopMonomial::Torus { family, n, m })
}

impl Graded for LoopMonomial {
    fn degree(&self) -> i64 {
        match *self {
            LoopMonomial::Circle { a, .. } => -(a as i64),
            LoopMonomial::Odd { n, a, k } => -(n as i64) * (a as i64) + (n as i64 - 1) * k as i64,
            LoopMonomial::Even { n, family, k } => {
                let v = (2 * n as i64 - 2) * k as i64;
                match family {
                    EvenFamily::V => v,
                    EvenFamily::BV => v - 1,
                    EvenFamily::AV => v - n as i64,
                }
            }
            LoopMonomial::Torus { family, .. } => family.degree(),
        }
    }
}

impl fmt::Display for LoopMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LoopMonomial::Circle { a, k } => {
                write!(f, "{}⊗{}", if a { "a" } else { "1" }, power_text('x', k))
            }
            LoopMonomial::Odd { n, a, k } => {
                let ext = if a { exterior_letter(n).to_string() } else { "1".into() };
                write!(f, "{ext}⊗{}", power_text(variable_letter(n), k as Int))
            }
            LoopMonomial::Even { family, k, .. } => {
                let prefix = match family {
                    EvenFamily::V => "",
                    EvenFamily::BV => "b",
                    EvenFamily::AV => "a",
                };
                match (prefix, k) {
                    ("", _) => write!(f, "{}", power_text('v', k as Int)),
                    (p, 0) => write!(f, "{p}"),
                    (p, k) => write!(f, "{p} {}", power_text('v', k as Int)),
                }
            }
            LoopMonomial::Torus { family, n, m } => write!(f, "{}[{n},{m}]", family.symbol()),
        }
    }
}

/// An element of `𝐇_*(LM)` for a fixed space, with `a vᵏ` coefficients
/// kept in `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LoopChain {
    space: Space,
    chain: IntChain<LoopMonomial>,
}

impl LoopChain {
    pub fn zero(space: Space) -> Self {
        Self { space, chain: FreeChain::zero() }
    }

    /// `c·m`, reduced.
    pub fn term(m: LoopMonomial, c: Int) -> Self {
        Self { space: m.space(), chain: FreeChain::term(m, c) }.reduced()
    }

    pub fn monomial(m: LoopMonomial) -> Self {
        Self::term(m, 1)
    }

    /// Wraps a raw chain, checking that every generator belongs to `space`.
    pub fn from_chain(space: Space, chain: IntChain<LoopMonomial>) -> Result<Self> {
        if let Some(m) = chain.keys().find(|m| !space.contains(m)) {
            return Err(Error::MixedSpaces { left: space.to_string(), right: m.space().to_string() });
        }
        Ok(Self { space, chain }.reduced())
    }

    fn reduced(self) -> Self {
        let chain = self.chain.reduce_with(LoopMonomial::order);
        Self { space: self.space, chain }
    }

    pub fn parse(space: Space, s: &str) -> Result<Self> {
        let chain = parse_chain(s, |c| LoopMonomial::parse_from(space, c), Some(space.unit()))?;
        Ok(Self { space, chain }.reduced())
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn chain(&self) -> &IntChain<LoopMonomial> {
        &self.chain
    }

    pub fn is_zero(&self) -> bool {
        self.chain.is_zero()
    }

    pub fn coefficient(&self, m: &LoopMonomial) -> Int {
        self.chain.coefficient(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LoopMonomial, &Int)> {
        self.chain.iter()
    }

    /// The common degree of all terms; `None` for the zero chain or a
    /// mixed-degree chain.
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

    pub fn negate(&self) -> Self {
        self.scale(-1)
    }
}

impl fmt::Display for LoopChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.chain.fmt(f)
    }
}

/// The loop product, extended bilinearly.
pub fn loop_product(x: &LoopChain, y: &LoopChain) -> Result<LoopChain> {
    x.same_space(y)?;
    let chain = x.chain.map_bilinear(&y.chain, |p, q| match p.product(q) {
        Some((sign, m)) => FreeChain::term(m, sign),
        None => FreeChain::zero(),
    });
    Ok(LoopChain { space: x.space, chain }.reduced())
}

/// The BV operator, extended linearly.
pub fn bv_delta(x: &LoopChain) -> LoopChain {
    LoopChain { space: x.space, chain: x.chain.map_linear(LoopMonomial::delta) }.reduced()
}

/// The loop bracket
/// `{α, β} = (−1)^{|α|} Δ(α•β) − (−1)^{|α|} Δ(α)•β − α•Δ(β)`.
pub fn loop_bracket(x: &LoopChain, y: &LoopChain) -> Result<LoopChain> {
    x.same_space(y)?;
    if x.is_zero() {
        return Ok(LoopChain::zero(x.space));
    }
    let deg = x.degree().ok_or_else(|| Error::NotHomogeneous(x.to_string()))?;
    let sign = if deg.rem_euclid(2) == 0 { 1 } else { -1 };
    let first = bv_delta(&loop_product(x, y)?).scale(sign);
    let second = loop_product(&bv_delta(x), y)?.scale(sign);
    let third = loop_product(x, &bv_delta(y))?;
    first.sub(&second)?.sub(&third)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn spaces() -> Vec<Space> {
        let mut v: Vec<Space> = (1..=8).map(|n| Space::Sphere { n }).collect();
        v.push(Space::Torus);
        v
    }

    fn parse(space: &str, s: &str) -> LoopChain {
        LoopChain::parse(space.parse().unwrap(), s).unwrap()
    }

    #[test]
    fn spec_product_examples() {
        let s5 = Space::Sphere { n: 5 };
        let x = LoopChain::monomial(LoopMonomial::Odd { n: 5, a: true, k: 2 });
        let y = LoopChain::monomial(LoopMonomial::Odd { n: 5, a: false, k: 3 });
        assert_eq!(loop_product(&x, &y).unwrap(), LoopChain::parse(s5, "a⊗u^5").unwrap());
        assert!(loop_product(&parse("S4", "a"), &parse("S4", "b")).unwrap().is_zero());
        assert_eq!(loop_product(&parse("T", "x[1,0]"), &parse("T", "y[0,1]")).unwrap(), parse("T", "1[1,1]"));
        assert_eq!(
            loop_product(&parse("S3", "1⊗y"), &parse("S4", "v")),
            Err(Error::MixedSpaces { left: "S3".into(), right: "S4".into() })
        );
    }

    #[test]
    fn spec_delta_examples() {
        assert_eq!(bv_delta(&parse("S3", "α⊗y^2")), parse("S3", "2·1⊗y"));
        assert_eq!(bv_delta(&parse("S4", "b v")), parse("S4", "3·v"));
        assert!(bv_delta(&parse("T", "z[3,-1]")).is_zero());
        assert_eq!(bv_delta(&parse("S1", "a⊗x^-3")), parse("S1", "-3·1⊗x^-3"));
        assert_eq!(bv_delta(&parse("S2", "b v^2")), parse("S2", "5·v^2 + a v^3"));
        assert_eq!(bv_delta(&parse("T", "1[2,-3]")), parse("T", "2·x[2,-3] - 3·y[2,-3]"));
    }

    #[test]
    fn torsion_of_av() {
        let x = parse("S4", "3·a v^2 + 2·a v + a");
        assert_eq!(x.to_string(), "a + a v^2");
        assert!(parse("S6", "a v").scale(2).is_zero());
    }

    #[test]
    fn delta_squares_to_zero_and_raises_degree() {
        for space in spaces() {
            for g in space.generators(20) {
                let x = LoopChain::monomial(g);
                let dx = bv_delta(&x);
                assert!(bv_delta(&dx).is_zero(), "ΔΔ({g}) ≠ 0 on {space}");
                if let Some(d) = dx.degree() {
                    assert_eq!(d, g.degree() + 1, "degree of Δ({g})");
                }
            }
        }
    }

    #[test]
    fn products_are_graded_commutative_with_additive_degree() {
        for space in spaces() {
            let gens = space.generators(4);
            for p in &gens {
                for q in &gens {
                    let (x, y) = (LoopChain::monomial(*p), LoopChain::monomial(*q));
                    let xy = loop_product(&x, &y).unwrap();
                    let yx = loop_product(&y, &x).unwrap();
                    let sign = if (p.degree() * q.degree()) % 2 == 0 { 1 } else { -1 };
                    assert_eq!(xy, yx.scale(sign), "{p} • {q} on {space}");
                    if let Some(d) = xy.degree() {
                        assert_eq!(d, p.degree() + q.degree());
                    }
                }
            }
        }
    }

    #[test]
    fn products_are_associative() {
        for space in spaces() {
            let gens = space.generators(2);
            for p in &gens {
                for q in &gens {
                    for r in &gens {
                        let (x, y, z) = (LoopChain::monomial(*p), LoopChain::monomial(*q), LoopChain::monomial(*r));
                        let left = loop_product(&loop_product(&x, &y).unwrap(), &z).unwrap();
                        let right = loop_product(&x, &loop_product(&y, &z).unwrap()).unwrap();
                        assert_eq!(left, right, "({p}•{q})•{r} on {space}");
                    }
                }
            }
        }
    }

    /// Circle generators `(a, k)` with degree `−a`.
    type Circle = (bool, Int);
    type Tensor = BTreeMap<(Circle, Circle), Int>;

    fn circle_delta(c: Circle) -> Option<(Int, Circle)> {
        let (a, k) = c;
        (a && k != 0).then_some((k, (false, k)))
    }

    fn circle_degree(c: Circle) -> i64 {
        -(c.0 as i64)
    }

    fn push(t: &mut Tensor, key: (Circle, Circle), c: Int) {
        let e = t.entry(key).or_insert(0);
        *e += c;
        if *e == 0 {
            t.remove(&key);
        }
    }

    fn tensor_delta(t: &Tensor) -> Tensor {
        let mut out = Tensor::new();
        for (&(p, q), &c) in t {
            if let Some((s, dp)) = circle_delta(p) {
                push(&mut out, (dp, q), c * s);
            }
            if let Some((s, dq)) = circle_delta(q) {
                let sign = if (circle_degree(p) + 1) % 2 == 0 { 1 } else { -1 };
                push(&mut out, (p, dq), c * s * sign);
            }
        }
        out
    }

    fn circle_product(p: Circle, q: Circle) -> Option<Circle> {
        (!(p.0 && q.0)).then_some((p.0 || q.0, p.1 + q.1))
    }

    fn tensor_product(x: &Tensor, y: &Tensor) -> Tensor {
        let mut out = Tensor::new();
        for (&(p, q), &c) in x {
            for (&(r, s), &e) in y {
                if let (Some(pr), Some(qs)) = (circle_product(p, r), circle_product(q, s)) {
                    let koszul = if (circle_degree(q) * circle_degree(r)) % 2 == 0 { 1 } else { -1 };
                    push(&mut out, (pr, qs), c * e * koszul);
                }
            }
        }
        out
    }

    fn to_tensor(x: &LoopChain) -> Tensor {
        let mut out = Tensor::new();
        for (m, &c) in x.iter() {
            let LoopMonomial::Torus { family, n, m } = *m else { panic!("not a torus generator") };
            let (key, sign) = match family {
                TorusFamily::One => (((true, n), (true, m)), -1),
                TorusFamily::X => (((false, n), (true, m)), -1),
                TorusFamily::Y => (((true, n), (false, m)), -1),
                TorusFamily::Z => (((false, n), (false, m)), 1),
            };
            push(&mut out, key, c * sign);
        }
        out
    }

    #[test]
    fn torus_table_matches_tensor_rule() {
        let gens = Space::Torus.generators(10);
        for g in &gens {
            let x = LoopChain::monomial(*g);
            assert_eq!(to_tensor(&bv_delta(&x)), tensor_delta(&to_tensor(&x)), "Δ({g})");
        }
        for g in Space::Torus.generators(2) {
            for h in Space::Torus.generators(2) {
                let (x, y) = (LoopChain::monomial(g), LoopChain::monomial(h));
                assert_eq!(
                    to_tensor(&loop_product(&x, &y).unwrap()),
                    tensor_product(&to_tensor(&x), &to_tensor(&y)),
                    "{g} • {h}"
                );
            }
        }
    }

    #[test]
    fn loop_bracket_examples() {
        for i in 0..5 {
            for j in 0..5 {
                let x = LoopChain::monomial(LoopMonomial::Odd { n: 5, a: false, k: i });
                let y = LoopChain::monomial(LoopMonomial::Odd { n: 5, a: false, k: j });
                assert!(loop_bracket(&x, &y).unwrap().is_zero());
            }
        }
        let x = parse("S5", "a⊗u");
        let y = parse("S5", "1⊗u");
        let xy = loop_product(&x, &y).unwrap();
        let first = bv_delta(&xy).scale(-1);
        let second = loop_product(&bv_delta(&x), &y).unwrap().scale(-1);
        let third = loop_product(&x, &bv_delta(&y)).unwrap();
        assert_eq!(first, parse("S5", "-2·1⊗u"));
        assert_eq!(second, parse("S5", "-1⊗u"));
        assert!(third.is_zero());
        assert_eq!(loop_bracket(&x, &y).unwrap(), parse("S5", "-1⊗u"));
        let v = parse("S4", "v^3");
        assert!(loop_bracket(&v, &v).unwrap().is_zero());
        let mixed = parse("S3", "α⊗y + 1⊗1");
        assert!(matches!(loop_bracket(&mixed, &v), Err(Error::MixedSpaces { .. })));
        assert!(matches!(loop_bracket(&mixed, &mixed), Err(Error::NotHomogeneous(_))));
    }

    #[test]
    fn text_round_trip() {
        for space in spaces() {
            for g in space.generators(3) {
                let x = LoopChain::monomial(g).scale(3).add(&LoopChain::monomial(space.unit())).unwrap();
                let back = LoopChain::parse(space, &x.to_string()).unwrap();
                assert_eq!(back, x, "{x} on {space}");
            }
        }
        assert_eq!(parse("S1", "a*x^{-2}"), parse("S1", "a⊗x^-2"));
        assert_eq!(parse("S3", "a y^2"), parse("S3", "α⊗y^2"));
        assert_eq!(parse("S5", "2·a*u^3 + 1"), parse("S5", "2·a⊗u^3 + 1⊗1"));
        assert_eq!(parse("S4", "b*v^2"), parse("S4", "b v^2"));
        assert_eq!(parse("T", "z_{1,-2}"), parse("T", "z[1,-2]"));
        assert!(matches!(LoopChain::parse(Space::Sphere { n: 3 }, "α⊗y^-1"), Err(Error::Parse { column: 3, .. })));
        assert!(LoopChain::parse(Space::Sphere { n: 4 }, "a b").is_err());
        assert!(LoopChain::parse(Space::Torus, "x[1 2]").is_err());
    }

    #[test]
    fn degrees() {
        let deg = |s: &str, g: &str| LoopMonomial::parse(s.parse().unwrap(), g).unwrap().degree();
        assert_eq!(deg("S1", "a⊗x^4"), -1);
        assert_eq!(deg("S3", "α⊗y^2"), 1);
        assert_eq!(deg("S5", "1⊗u^2"), 8);
        assert_eq!(deg("S4", "a"), -4);
        assert_eq!(deg("S4", "b v"), 5);
        assert_eq!(deg("S4", "a v"), 2);
        assert_eq!(deg("T", "1[0,0]"), -2);
    }
}
