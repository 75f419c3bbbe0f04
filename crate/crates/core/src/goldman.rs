//! The Goldman Lie algebra of the closed torus.
//!
//! Free homotopy classes of loops on the torus are the monomials `aⁱbʲ`
//! and the bracket is `[aⁱbʲ, aᵏbˡ] = (il − jk)·aⁱ⁺ᵏbʲ⁺ˡ`, extended
//! bilinearly over ℤ or ℚ.
//!
//! Besides the bracket the module produces certificates:
//!
//! * [`generation_witness`] writes every noncontractible class as a nested
//!   bracket of `a, b, a⁻¹, b⁻¹` over ℚ, with scalars obtained by evaluating
//!   each bracket;
//! * [`z_bracket_reachable`] and [`derived_membership`] decide which integer
//!   multiples of a class are brackets over ℤ;
//! * [`lcs_member_witness`] builds nested brackets of prescribed depth for
//!   members of the lower central series.
//!
//! The contractible class `1` is central and no bracket of two classes has
//! a nonzero component on it: `il − jk` vanishes whenever
//! `(i, j) + (k, l) = (0, 0)`. In particular `[ab⁻¹, a⁻¹b] = 0`, so `1` is not
//! in the span of brackets and has no generation witness.
//!
//! The three-element generating set `{a, a⁻¹b⁻¹ + b + 1, b}` evaluates as
//! `[a⁻¹b⁻¹ + b + 1, b] = −a⁻¹`, `[a⁻¹b⁻¹ + b + 1, a] = b⁻¹ − ab` and
//! `[a, b] = ab` under the bracket above; see the unit tests.

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use num_traits::Zero;

use crate::chain::{FreeChain, Graded};
use crate::scalar::{extended_gcd, gcd, Ring};
use crate::text::{parse_chain, Cursor};
use crate::{Error, Int, Rat, Result};

/// The class `aⁱbʲ`; `(0, 0)` is the contractible class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TorusClass {
    pub i: Int,
    pub j: Int,
}

impl TorusClass {
    pub const ONE: TorusClass = TorusClass { i: 0, j: 0 };
    pub const A: TorusClass = TorusClass { i: 1, j: 0 };
    pub const B: TorusClass = TorusClass { i: 0, j: 1 };
    pub const A_INV: TorusClass = TorusClass { i: -1, j: 0 };
    pub const B_INV: TorusClass = TorusClass { i: 0, j: -1 };

    pub fn new(i: Int, j: Int) -> Self {
        Self { i, j }
    }

    pub fn is_contractible(&self) -> bool {
        self.i == 0 && self.j == 0
    }

    /// Product in π₁(T) = ℤ².
    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.i + other.i, self.j + other.j)
    }

    /// The intersection number `il − jk` of two classes.
    pub fn intersection(&self, other: &Self) -> Int {
        self.i * other.j - self.j * other.i
    }

    /// Parses one class from a cursor: `a^i b^j`, `ab`, `1`.
    pub fn parse_from(cur: &mut Cursor<'_>) -> Result<Self> {
        let mut class = TorusClass::ONE;
        let mut any = false;
        loop {
            match cur.peek() {
                Some('a') => {
                    cur.bump();
                    class.i += cur.parse_exponent()?;
                }
                Some('b') => {
                    cur.bump();
                    class.j += cur.parse_exponent()?;
                }
                Some('1') if !any => {
                    cur.bump();
                    return Ok(class);
                }
                _ => break,
            }
            any = true;
        }
        if any {
            Ok(class)
        } else {
            Err(cur.error("expected a class such as `a^2 b^-1` or `1`"))
        }
    }
}

impl Graded for TorusClass {
    fn degree(&self) -> i64 {
        0
    }
}

fn power(letter: char, n: Int) -> Option<String> {
    match n {
        0 => None,
        1 => Some(letter.to_string()),
        n => Some(format!("{letter}^{n}")),
    }
}

impl fmt::Display for TorusClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [power('a', self.i), power('b', self.j)].into_iter().flatten().collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

impl FromStr for TorusClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let c = TorusClass::parse_from(&mut cur)?;
        cur.finish()?;
        Ok(c)
    }
}

/// Element of the Goldman algebra with coefficients in `R`.
pub type TorusChain<R> = FreeChain<TorusClass, R>;

/// The chain `1·aⁱbʲ`.
pub fn class_chain<R: Ring>(i: Int, j: Int) -> TorusChain<R> {
    FreeChain::generator(TorusClass::new(i, j))
}

/// Parses a chain such as `2·a^2 b^2 - 1/3·b + 1`.
pub fn parse_torus_chain<R: Ring>(s: &str) -> Result<TorusChain<R>> {
    parse_chain(s, TorusClass::parse_from, Some(TorusClass::ONE))
}

/// Bracket of two classes.
pub fn bracket_classes<R: Ring>(x: &TorusClass, y: &TorusClass) -> TorusChain<R> {
    FreeChain::term(x.mul(y), R::from(x.intersection(y)))
}

/// The Goldman bracket, extended bilinearly.
pub fn goldman_bracket<R: Ring>(x: &TorusChain<R>, y: &TorusChain<R>) -> TorusChain<R> {
    x.map_bilinear(y, bracket_classes)
}

/// `[x,[y,z]] + [y,[z,x]] + [z,[x,y]]`, which is always zero.
pub fn jacobi_residual<R: Ring>(x: &TorusChain<R>, y: &TorusChain<R>, z: &TorusChain<R>) -> TorusChain<R> {
    let b = goldman_bracket;
    b(x, &b(y, z)).add(&b(y, &b(z, x))).add(&b(z, &b(x, y)))
}

/// A chain whose ring is chosen at run time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyTorusChain {
    Integer(TorusChain<Int>),
    Rational(TorusChain<Rat>),
}

impl AnyTorusChain {
    /// Parses `s` over the ring named by `ring` (`Z` or `Q`).
    pub fn parse(ring: &str, s: &str) -> Result<Self> {
        match ring {
            "Z" | "z" => Ok(Self::Integer(parse_torus_chain(s)?)),
            "Q" | "q" => Ok(Self::Rational(parse_torus_chain(s)?)),
            other => Err(Error::Invalid(format!("unknown ring {other:?}; expected Z or Q"))),
        }
    }

    pub fn ring(&self) -> &'static str {
        match self {
            Self::Integer(_) => <Int as Ring>::TAG,
            Self::Rational(_) => <Rat as Ring>::TAG,
        }
    }

    /// Bracket of chains over the same ring.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Integer(x), Self::Integer(y)) => Ok(Self::Integer(goldman_bracket(x, y))),
            (Self::Rational(x), Self::Rational(y)) => Ok(Self::Rational(goldman_bracket(x, y))),
            _ => Err(Error::MixedRings { left: self.ring().into(), right: other.ring().into() }),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Self::Integer(x) => serde_json::to_value(x),
            Self::Rational(x) => serde_json::to_value(x),
        }
        .expect("chains serialize")
    }
}

impl fmt::Display for AnyTorusChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Integer(x) => x.fmt(f),
            Self::Rational(x) => x.fmt(f),
        }
    }
}

/// A tree of brackets, scalar multiples and sums over classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BracketExpr<R> {
    Leaf { coefficient: R, class: TorusClass },
    Bracket(Box<BracketExpr<R>>, Box<BracketExpr<R>>),
    Scale(R, Box<BracketExpr<R>>),
    Sum(Vec<BracketExpr<R>>),
}

impl<R: Ring> BracketExpr<R> {
    pub fn leaf(class: TorusClass) -> Self {
        Self::Leaf { coefficient: R::one(), class }
    }

    pub fn bracket(x: Self, y: Self) -> Self {
        Self::Bracket(Box::new(x), Box::new(y))
    }

    /// `c·x`, collapsing `1·x` to `x`.
    pub fn scaled(c: R, x: Self) -> Self {
        if c.is_one() {
            x
        } else {
            Self::Scale(c, Box::new(x))
        }
    }

    /// Evaluates the tree with [`goldman_bracket`].
    pub fn evaluate(&self) -> TorusChain<R> {
        match self {
            Self::Leaf { coefficient, class } => FreeChain::term(*class, coefficient.clone()),
            Self::Bracket(x, y) => goldman_bracket(&x.evaluate(), &y.evaluate()),
            Self::Scale(c, x) => x.evaluate().scale(c),
            Self::Sum(xs) => xs.iter().fold(FreeChain::zero(), |acc, x| acc.add(&x.evaluate())),
        }
    }

    /// Bracket nesting depth: leaves have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Self::Leaf { .. } => 0,
            Self::Bracket(x, y) => 1 + x.depth().max(y.depth()),
            Self::Scale(_, x) => x.depth(),
            Self::Sum(xs) => xs.iter().map(Self::depth).max().unwrap_or(0),
        }
    }

    /// All leaf classes, left to right.
    pub fn leaves(&self) -> Vec<TorusClass> {
        match self {
            Self::Leaf { class, .. } => vec![*class],
            Self::Bracket(x, y) => {
                let mut v = x.leaves();
                v.extend(y.leaves());
                v
            }
            Self::Scale(_, x) => x.leaves(),
            Self::Sum(xs) => xs.iter().flat_map(Self::leaves).collect(),
        }
    }

    /// Infix rendering such as `1/3·[b^-1, [a, [a, b]]]`.
    pub fn to_infix(&self) -> String {
        match self {
            Self::Leaf { coefficient, class } if coefficient.is_one() => class.to_string(),
            Self::Leaf { coefficient, class } => format!("{coefficient}·{class}"),
            Self::Bracket(x, y) => format!("[{}, {}]", x.to_infix(), y.to_infix()),
            Self::Scale(c, x) => format!("{c}·{}", x.to_infix()),
            Self::Sum(xs) => format!("({})", xs.iter().map(Self::to_infix).collect::<Vec<_>>().join(" + ")),
        }
    }

    fn check(self, expected: &TorusChain<R>) -> Result<Self> {
        let value = self.evaluate();
        if &value == expected {
            Ok(self)
        } else {
            Err(Error::Internal(format!("expression {} evaluates to {value}, not {expected}", self.to_infix())))
        }
    }
}

/// S-expression rendering: `(bracket (class a) (scale 1/2 (class b)))`.
impl<R: Ring> fmt::Display for BracketExpr<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Leaf { coefficient, class } if coefficient.is_one() => write!(f, "(class {class})"),
            Self::Leaf { coefficient, class } => write!(f, "(term {coefficient} {class})"),
            Self::Bracket(x, y) => write!(f, "(bracket {x} {y})"),
            Self::Scale(c, x) => write!(f, "(scale {c} {x})"),
            Self::Sum(xs) => {
                write!(f, "(sum")?;
                for x in xs {
                    write!(f, " {x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl<R: Ring> Serialize for BracketExpr<R> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Leaf { coefficient, class } => {
                let mut st = s.serialize_struct("Leaf", 4)?;
                st.serialize_field("op", "leaf")?;
                st.serialize_field("coefficient", &coefficient.to_string())?;
                st.serialize_field("class", class)?;
                st.serialize_field("text", &class.to_string())?;
                st.end()
            }
            Self::Bracket(x, y) => {
                let mut st = s.serialize_struct("Bracket", 3)?;
                st.serialize_field("op", "bracket")?;
                st.serialize_field("left", x)?;
                st.serialize_field("right", y)?;
                st.end()
            }
            Self::Scale(c, x) => {
                let mut st = s.serialize_struct("Scale", 3)?;
                st.serialize_field("op", "scale")?;
                st.serialize_field("coefficient", &c.to_string())?;
                st.serialize_field("operand", x)?;
                st.end()
            }
            Self::Sum(xs) => {
                let mut st = s.serialize_struct("Sum", 2)?;
                st.serialize_field("op", "sum")?;
                st.serialize_field("operands", xs)?;
                st.end()
            }
        }
    }
}

fn seed(class: TorusClass) -> bool {
    class.i.abs() + class.j.abs() == 1
}

/// Expression over the leaves `a, b, a⁻¹, b⁻¹` evaluating to `1·target`.
///
/// Classes are reached in stages: the lines `aⁿb^{±1}` and `a^{±1}bⁿ` by
/// repeated bracketing with a seed, the axes `aⁿ`, `bⁿ` by one more bracket
/// with `b⁻¹` or `a⁻¹`, the diagonals `aⁱb^{±i}` as `[aⁱ, b^{±i}]`, and any
/// other class as a bracket of a diagonal class with an axis class. Each
/// stage is rescaled by the inverse of the coefficient its bracket actually
/// produces.
pub fn generation_witness(target: TorusClass) -> Result<BracketExpr<Rat>> {
    if target.is_contractible() {
        return Err(Error::ContractibleTarget);
    }
    let expr = witness_rec(target.i, target.j);
    expr.check(&class_chain(target.i, target.j))
}

fn witness_rec(i: Int, j: Int) -> BracketExpr<Rat> {
    let target = TorusClass::new(i, j);
    if seed(target) {
        return BracketExpr::leaf(target);
    }
    let (left, right) = if j.abs() == 1 {
        // aⁱb^{±1}, |i| ≥ 1: bracket with a^{sign i}.
        let s = i.signum();
        (BracketExpr::leaf(TorusClass::new(s, 0)), witness_rec(i - s, j))
    } else if i.abs() == 1 {
        let s = j.signum();
        (BracketExpr::leaf(TorusClass::new(0, s)), witness_rec(i, j - s))
    } else if j == 0 {
        (BracketExpr::leaf(TorusClass::B_INV), witness_rec(i, 1))
    } else if i == 0 {
        (BracketExpr::leaf(TorusClass::A_INV), witness_rec(1, j))
    } else if i.abs() == j.abs() {
        (witness_rec(i, 0), witness_rec(0, j))
    } else if i.abs() < j.abs() {
        let t = j.signum() * i.abs();
        (witness_rec(i, t), witness_rec(0, j - t))
    } else {
        let t = i.signum() * j.abs();
        (witness_rec(t, j), witness_rec(i - t, 0))
    };
    let raw = BracketExpr::bracket(left, right);
    let c = raw.evaluate().coefficient(&target);
    debug_assert!(!c.is_zero(), "stage for {target} produced a zero bracket");
    BracketExpr::scaled(c.recip(), raw)
}

/// Whether `m·aⁿ` (or `m·bⁿ`) is a single bracket over ℤ, i.e. `n | m`.
///
/// Every bracket landing on `aⁿ` has coefficient `il − jk` with `j + l = 0`
/// and `i + k = n`, which equals `n·l`.
pub fn z_bracket_reachable(m: Int, target: TorusClass) -> Result<bool> {
    let n = match (target.i, target.j) {
        (0, 0) => return Err(Error::Invalid("target must be a nonzero power of a or b".into())),
        (n, 0) | (0, n) => n,
        _ => return Err(Error::Invalid(format!("target {target} is not on an axis"))),
    };
    Ok(m % n == 0)
}

/// Whether `c·aⁱbʲ` lies in the derived subalgebra over ℤ: `gcd(i, j) | c`,
/// with `gcd(0, 0) = 0` so that only `0·1` qualifies at the contractible
/// class.
pub fn derived_membership(c: Int, class: TorusClass) -> bool {
    let d = gcd(class.i, class.j);
    if d == 0 {
        c == 0
    } else {
        c % d == 0
    }
}

/// Bézout pair `(x, y)` with `x·i + y·j = gcd(i, j)`, `|y|` minimal and ties
/// broken toward `y ≥ 0`; when `i` vanishes `y` is forced and `|x|` is
/// minimised instead.
pub fn bezout(i: Int, j: Int) -> (Int, Int) {
    let (d, _, y0) = extended_gcd(i, j);
    assert!(d != 0, "Bézout pair of (0, 0)");
    let si = i / d;
    if si == 0 {
        return (0, j.signum());
    }
    let step = si.abs();
    let r = y0.rem_euclid(step);
    let y = if r <= step - r { r } else { r - step };
    let x = (d - y * j) / i;
    debug_assert_eq!(x * i + y * j, d);
    (x, y)
}

/// Bracket expression of nesting depth exactly `depth` evaluating to
/// `c·aⁱbʲ`, built from `[a^{i+y}b^{j−x}, a^{−y}bˣ] = d·aⁱbʲ` with `(x, y)`
/// from [`bezout`]; the second operand has coprime exponents and is
/// expanded the same way one level down.
pub fn lcs_member_witness(c: Int, class: TorusClass, depth: usize) -> Result<BracketExpr<Int>> {
    if depth == 0 {
        return Err(Error::Invalid("depth must be at least 1".into()));
    }
    if !derived_membership(c, class) {
        return Err(Error::NotInDerived { coefficient: c, class: class.to_string() });
    }
    let expr = if class.is_contractible() || c == 0 {
        BracketExpr::Scale(0, Box::new(unit_witness(TorusClass::A, depth)))
    } else {
        let d = gcd(class.i, class.j);
        BracketExpr::scaled(c / d, gcd_witness(class, depth))
    };
    expr.check(&FreeChain::term(class, c))
}

/// Depth-`depth` expression evaluating to `gcd(i, j)·aⁱbʲ`.
fn gcd_witness(class: TorusClass, depth: usize) -> BracketExpr<Int> {
    let (x, y) = bezout(class.i, class.j);
    let left = BracketExpr::leaf(TorusClass::new(class.i + y, class.j - x));
    BracketExpr::bracket(left, unit_witness(TorusClass::new(-y, x), depth - 1))
}

/// Depth-`depth` expression evaluating to `1·aⁱbʲ` for coprime `(i, j)`.
fn unit_witness(class: TorusClass, depth: usize) -> BracketExpr<Int> {
    if depth == 0 {
        BracketExpr::leaf(class)
    } else {
        gcd_witness(class, depth)
    }
}
