//! String homology of a closed surface `Σ_g`, `g ≥ 2`, over a finite window
//! of conjugacy classes, with degree-0 brackets supplied by a Goldman
//! bracket table.
//!
//! The loop groups are `𝐇_{−2} = ⊕ℤ[γ]` over all conjugacy classes,
//! `𝐇_{−1} = H_1(Σ_g) ⊕ ⊕_{γ ≠ e} ℤβ_γ` and `𝐇_0 = ℤ1`, with
//! `Δ([γ]) = l_γ β_γ` where `γ = κ_γ^{l_γ}` for the generator `κ_γ` of the
//! centralizer, and `Δ = 0` on everything else. The loop product has `1` as
//! unit, `a_i • b_j = δ_ij [e] = −b_j • a_i`, `a_i • a_j = b_i • b_j = 0` and
//! `β_1 • β_2 = [γ_1, γ_2] / (l_1 l_2)` from the bracket table.
//!
//! String homology is periodic above degree 2: `H_0 = ⊕ℤe([γ])`,
//! `H_1 = ⊕ℤe(a_i) ⊕ ⊕ℤe(b_i) ⊕ ⊕ℤ/l_γ e(β_γ)`, `H_2 = ℤe(1) ⊕ ℤs` with
//! `s = e([e])γ_1` the lift of `e([e])` along the cap map, and
//! `H_{2i+1} ≅ H_1`, `H_{2i} ≅ H_2` through the lifts `γ_i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::chain::{FreeChain, Graded};
use crate::group::AbelianGroupDescriptor;
use crate::text::{parse_chain, Cursor};
use crate::{Error, Int, IntChain, Result};

/// A conjugacy class `[γ]` of `π₁(Σ_g)`, named by an opaque token.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceConjClass {
    pub token: String,
    /// `l_γ ≥ 1` with `γ = κ_γ^{l_γ}`; ignored for the identity class.
    #[serde(default = "one")]
    pub exponent: u32,
    #[serde(default)]
    pub identity: bool,
}

fn one() -> u32 {
    1
}

impl SurfaceConjClass {
    pub fn new(token: impl Into<String>, exponent: u32) -> Self {
        Self { token: token.into(), exponent, identity: false }
    }

    pub fn identity(token: impl Into<String>) -> Self {
        Self { token: token.into(), exponent: 1, identity: true }
    }
}

/// A genus and a finite list of conjugacy classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceWindow {
    pub genus: u32,
    pub classes: Vec<SurfaceConjClass>,
}

impl SurfaceWindow {
    /// Validates the genus, token names and exponents.
    pub fn new(genus: u32, classes: Vec<SurfaceConjClass>) -> Result<Self> {
        let w = Self { genus, classes };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<()> {
        if self.genus < 2 {
            return Err(Error::UnsupportedSpace {
                space: format!("Σ_{}", self.genus),
                reason: "genus must be at least 2; the torus has its own module".into(),
            });
        }
        let mut seen = BTreeSet::new();
        for c in &self.classes {
            let valid = !c.token.is_empty() && c.token.chars().all(|ch| ch.is_alphanumeric() || "_'-".contains(ch));
            if !valid {
                return Err(Error::Invalid(format!("class token `{}` must be alphanumeric", c.token)));
            }
            if !seen.insert(c.token.as_str()) {
                return Err(Error::Invalid(format!("class `{}` is listed twice", c.token)));
            }
            if c.exponent == 0 && !c.identity {
                return Err(Error::Invalid(format!("class `{}` needs an exponent l ≥ 1", c.token)));
            }
        }
        if self.classes.iter().filter(|c| c.identity).count() > 1 {
            return Err(Error::Invalid("at most one class may be the identity".into()));
        }
        Ok(())
    }

    /// Parses `tok:l,tok:l,…`, with `tok:id` marking the identity class.
    pub fn parse(genus: u32, s: &str) -> Result<Self> {
        let mut classes = Vec::new();
        for (i, item) in s.split(',').map(str::trim).filter(|t| !t.is_empty()).enumerate() {
            let (token, exponent) = item.split_once(':').unwrap_or((item, "1"));
            let class = match exponent.trim() {
                "id" | "e" => SurfaceConjClass::identity(token.trim()),
                e => SurfaceConjClass::new(
                    token.trim(),
                    e.parse().map_err(|_| Error::Invalid(format!("class {}: exponent `{e}` is not a natural number", i + 1)))?,
                ),
            };
            classes.push(class);
        }
        Self::new(genus, classes)
    }

    pub fn class(&self, token: &str) -> Result<&SurfaceConjClass> {
        self.classes
            .iter()
            .find(|c| c.token == token)
            .ok_or_else(|| Error::Invalid(format!("class `{token}` is not in the window")))
    }

    fn loop_of(&self, token: &str) -> Result<SigmaLoopGen> {
        Ok(if self.class(token)?.identity { SigmaLoopGen::Identity } else { SigmaLoopGen::Class(token.to_string()) })
    }

    fn exponent(&self, token: &str) -> Result<u32> {
        Ok(self.class(token)?.exponent)
    }
}

/// An additive generator of `𝐇_*(LΣ_g)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "index", rename_all = "snake_case")]
pub enum SigmaLoopGen {
    /// `[e]`, the point class of the constant loops.
    Identity,
    /// `[γ]`, `γ ≠ e`.
    Class(String),
    A(u32),
    B(u32),
    /// `β_γ`, `γ ≠ e`.
    Beta(String),
    /// The fundamental class of the constant loops, the unit.
    One,
}

impl Graded for SigmaLoopGen {
    fn degree(&self) -> i64 {
        match self {
            SigmaLoopGen::Identity | SigmaLoopGen::Class(_) => -2,
            SigmaLoopGen::A(_) | SigmaLoopGen::B(_) | SigmaLoopGen::Beta(_) => -1,
            SigmaLoopGen::One => 0,
        }
    }
}

impl fmt::Display for SigmaLoopGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaLoopGen::Identity => write!(f, "[e]"),
            SigmaLoopGen::Class(t) => write!(f, "[{t}]"),
            SigmaLoopGen::A(i) => write!(f, "a_{i}"),
            SigmaLoopGen::B(i) => write!(f, "b_{i}"),
            SigmaLoopGen::Beta(t) => write!(f, "β_{t}"),
            SigmaLoopGen::One => write!(f, "1"),
        }
    }
}

/// One table row: `left`, `right` and the terms `(c, γ)` of `[left, right]`.
pub type TableEntry = (String, String, Vec<(Int, String)>);

/// Bracket table `[γ₁, γ₂] = Σ c [γ]` on conjugacy classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldmanOracle {
    pub window: SurfaceWindow,
    table: BTreeMap<(String, String), Vec<(Int, String)>>,
}

#[derive(Deserialize)]
struct OracleTerm {
    coefficient: Int,
    class: String,
}

#[derive(Deserialize)]
struct OracleEntry {
    left: String,
    right: String,
    #[serde(default)]
    value: Vec<OracleTerm>,
}

#[derive(Deserialize)]
struct OracleFile {
    genus: u32,
    classes: Vec<SurfaceConjClass>,
    entries: Vec<OracleEntry>,
}

#[derive(Deserialize)]
struct CsvRow {
    left: String,
    right: String,
    coefficient: Option<Int>,
    class: Option<String>,
}

fn combine(terms: &[(Int, String)]) -> BTreeMap<String, Int> {
    let mut out = BTreeMap::new();
    for (c, t) in terms {
        *out.entry(t.clone()).or_insert(0) += c;
    }
    out.retain(|_, c| *c != 0);
    out
}

impl GoldmanOracle {
    /// Builds a table from `(left, right, value)` entries, completing missing
    /// reverse entries by antisymmetry and rejecting inconsistent ones.
    pub fn new(window: SurfaceWindow, entries: Vec<TableEntry>) -> Result<Self> {
        window.validate()?;
        let mut table: BTreeMap<(String, String), Vec<(Int, String)>> = BTreeMap::new();
        for (l, r, v) in entries {
            for t in [&l, &r].into_iter().chain(v.iter().map(|(_, t)| t)) {
                window.class(t).map_err(|e| Error::InvalidOracle(e.to_string()))?;
            }
            table.entry((l, r)).or_default().extend(v);
        }
        let keys: Vec<(String, String)> = table.keys().cloned().collect();
        for (l, r) in keys {
            let value = combine(&table[&(l.clone(), r.clone())]);
            if l == r && !value.is_empty() {
                return Err(Error::InvalidOracle(format!("[{l}, {l}] must vanish")));
            }
            let negated: Vec<(Int, String)> = value.iter().map(|(t, c)| (-c, t.clone())).collect();
            match table.get(&(r.clone(), l.clone())) {
                Some(rev) if combine(rev) != combine(&negated) => {
                    return Err(Error::InvalidOracle(format!("[{l}, {r}] and [{r}, {l}] are not negatives of each other")));
                }
                Some(_) => {}
                None => {
                    table.insert((r, l), negated);
                }
            }
        }
        Ok(Self { window, table })
    }

    /// Reads `{"genus", "classes", "entries": [{"left", "right", "value": [{"coefficient", "class"}]}]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: OracleFile = serde_json::from_str(text).map_err(|e| Error::InvalidOracle(e.to_string()))?;
        let window = SurfaceWindow { genus: file.genus, classes: file.classes };
        let entries = file
            .entries
            .into_iter()
            .map(|e| (e.left, e.right, e.value.into_iter().map(|t| (t.coefficient, t.class)).collect()))
            .collect();
        Self::new(window, entries)
    }

    /// Reads CSV rows `left,right,coefficient,class` (one row per term; an
    /// empty coefficient and class record a vanishing bracket).
    pub fn from_csv<R: Read>(window: SurfaceWindow, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut entries = Vec::new();
        for row in rdr.deserialize::<CsvRow>() {
            let row = row.map_err(|e| Error::InvalidOracle(e.to_string()))?;
            let value = match (row.coefficient, row.class) {
                (Some(c), Some(t)) => vec![(c, t)],
                (None, None) => Vec::new(),
                _ => return Err(Error::InvalidOracle(format!("row [{}, {}] needs both a coefficient and a class", row.left, row.right))),
            };
            entries.push((row.left, row.right, value));
        }
        Self::new(window, entries)
    }

    /// `[γ₁, γ₂]`; brackets with the identity class vanish.
    pub fn lookup(&self, left: &str, right: &str) -> Result<BTreeMap<String, Int>> {
        if self.window.class(left)?.identity || self.window.class(right)?.identity {
            return Ok(BTreeMap::new());
        }
        self.table
            .get(&(left.to_string(), right.to_string()))
            .map(|v| combine(v))
            .ok_or_else(|| Error::MissingOracleEntry { left: left.into(), right: right.into() })
    }
}

/// Loop product of two generators.
pub fn sigma_loop_product(p: &SigmaLoopGen, q: &SigmaLoopGen, oracle: &GoldmanOracle) -> Result<IntChain<SigmaLoopGen>> {
    use SigmaLoopGen::*;
    let w = &oracle.window;
    Ok(match (p, q) {
        (One, x) | (x, One) => FreeChain::generator(x.clone()),
        (A(i), B(j)) => FreeChain::term(Identity, (i == j) as Int),
        (B(j), A(i)) => FreeChain::term(Identity, -((i == j) as Int)),
        (A(_), A(_)) | (B(_), B(_)) => FreeChain::zero(),
        (Beta(s), Beta(t)) => {
            let l = w.exponent(s)? as Int * w.exponent(t)? as Int;
            let mut out = FreeChain::zero();
            for (token, c) in oracle.lookup(s, t)? {
                if c % l != 0 {
                    return Err(Error::InvalidOracle(format!(
                        "β_{s} • β_{t} needs [{s}, {t}] divisible by l·l = {l}, but [{token}] has coefficient {c}"
                    )));
                }
                out.add_term(w.loop_of(&token)?, c / l);
            }
            out
        }
        (x, y) if x.degree() + y.degree() < -2 => FreeChain::zero(),
        (x, y) => return Err(Error::UnsupportedProduct(format!("{x} • {y}"))),
    })
}

/// The BV operator: `Δ([γ]) = l_γ β_γ`, zero on every other generator.
pub fn sigma_delta(p: &SigmaLoopGen, window: &SurfaceWindow) -> Result<IntChain<SigmaLoopGen>> {
    Ok(match p {
        SigmaLoopGen::Class(t) => FreeChain::term(SigmaLoopGen::Beta(t.clone()), window.exponent(t)? as Int),
        _ => FreeChain::zero(),
    })
}

/// A generator `(g, l)` of `H_*^{S¹}(LΣ_g)`: `e(g)` for `l = 0`, else its
/// `l`-th lift along the cap map.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SigmaStringGen {
    pub base: SigmaLoopGen,
    pub level: u32,
}

impl Graded for SigmaStringGen {
    fn degree(&self) -> i64 {
        self.base.degree() + 2 + 2 * self.level as i64
    }
}

impl fmt::Display for SigmaStringGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.base, self.level) {
            (SigmaLoopGen::Identity, 1) => write!(f, "s"),
            (b, 0) => write!(f, "e({b})"),
            (b, l) => write!(f, "e({b})γ_{l}"),
        }
    }
}

/// Order of `(g, l)`: 0 for infinite order, 1 when it vanishes, and an
/// error when `g` does not lift to level `l` or is not in the window.
fn sigma_order(g: &SigmaStringGen, window: &SurfaceWindow) -> Result<u64> {
    match &g.base {
        SigmaLoopGen::Class(t) if g.level > 0 => {
            Err(Error::Invalid(format!("e([{t}]) has nonzero marking and does not lift along the cap map")))
        }
        SigmaLoopGen::Class(t) => window.exponent(t).map(|_| 0),
        SigmaLoopGen::Beta(t) => window.exponent(t).map(u64::from),
        SigmaLoopGen::A(i) | SigmaLoopGen::B(i) if *i == 0 || *i > window.genus => {
            Err(Error::Invalid(format!("{} is not a basis class of H_1(Σ_{})", g.base, window.genus)))
        }
        _ => Ok(0),
    }
}

/// An element of `H_*^{S¹}(LΣ_g)` in normal form for a window.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SigmaStringChain {
    chain: IntChain<SigmaStringGen>,
}

impl SigmaStringChain {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (SigmaStringGen, Int)>>(window: &SurfaceWindow, terms: I) -> Result<Self> {
        let mut chain = FreeChain::zero();
        for (g, c) in terms {
            match sigma_order(&g, window)? {
                0 => chain.add_term(g, c),
                n => chain.add_term(g, c.rem_euclid(n as Int)),
            }
        }
        Ok(Self { chain })
    }

    pub fn parse(window: &SurfaceWindow, s: &str) -> Result<Self> {
        if s.trim() == "0" {
            return Ok(Self::zero());
        }
        let raw: IntChain<SigmaStringGen> = parse_chain(s, |c| parse_sigma_gen(window, c), None)?;
        Self::from_terms(window, raw.iter().map(|(g, c)| (g.clone(), *c)))
    }

    pub fn is_zero(&self) -> bool {
        self.chain.is_zero()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SigmaStringGen, &Int)> {
        self.chain.iter()
    }

    pub fn degree(&self) -> Option<i64> {
        self.chain.homogeneous_degree()
    }

    pub fn coefficient(&self, g: &SigmaStringGen) -> Int {
        self.chain.coefficient(g)
    }
}

impl fmt::Display for SigmaStringChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.chain.fmt(f)
    }
}

fn parse_token(cur: &mut Cursor<'_>) -> Result<String> {
    cur.skip_ws();
    let mut token = String::new();
    while let Some(c) = cur.peek_raw() {
        if c.is_alphanumeric() || "_'-".contains(c) {
            token.push(c);
            cur.bump();
        } else {
            break;
        }
    }
    if token.is_empty() {
        return Err(cur.error("expected a class token"));
    }
    Ok(token)
}

fn parse_sigma_loop(window: &SurfaceWindow, cur: &mut Cursor<'_>) -> Result<SigmaLoopGen> {
    let at = cur.clone();
    if cur.eat("[") {
        let token = parse_token(cur)?;
        cur.expect("]")?;
        if token == "e" && window.class("e").is_err() {
            return Ok(SigmaLoopGen::Identity);
        }
        return window.loop_of(&token).map_err(|e| at.error(e.to_string()));
    }
    if cur.eat("β_") || cur.eat("beta_") {
        let token = parse_token(cur)?;
        window.class(&token).map_err(|e| at.error(e.to_string()))?;
        return Ok(SigmaLoopGen::Beta(token));
    }
    if cur.eat("a_") {
        return Ok(SigmaLoopGen::A(cur.parse_natural()?));
    }
    if cur.eat("b_") {
        return Ok(SigmaLoopGen::B(cur.parse_natural()?));
    }
    if cur.eat("1") {
        return Ok(SigmaLoopGen::One);
    }
    Err(at.error("expected `[γ]`, `a_i`, `b_i`, `β_γ` or `1`"))
}

fn parse_sigma_gen(window: &SurfaceWindow, cur: &mut Cursor<'_>) -> Result<SigmaStringGen> {
    if cur.eat("s") {
        return Ok(SigmaStringGen { base: SigmaLoopGen::Identity, level: 1 });
    }
    cur.expect("e")?;
    cur.expect("(")?;
    let base = parse_sigma_loop(window, cur)?;
    cur.expect(")")?;
    let mut level = 0;
    if cur.eat("γ") {
        level = 1;
        if cur.eat("_") {
            let at = cur.clone();
            level = cur.parse_natural()?;
            if level == 0 {
                return Err(at.error("γ subscripts start at 1"));
            }
        }
    }
    Ok(SigmaStringGen { base, level })
}

/// `H_k^{S¹}(LΣ_g)` restricted to a window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaHomology {
    pub genus: u32,
    pub degree: i64,
    pub group: AbelianGroupDescriptor,
    /// Generators with their orders (0 for `ℤ`).
    pub generators: Vec<(String, u64)>,
}

impl fmt::Display for SigmaHomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .generators
            .iter()
            .map(|(g, o)| if *o == 0 { format!("Z ⟨{g}⟩") } else { format!("Z/{o} ⟨{g}⟩") })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// Basis generators of degree `k` for the window.
pub fn sigma_basis(window: &SurfaceWindow, k: i64) -> Result<Vec<(SigmaStringGen, u64)>> {
    window.validate()?;
    let mut out = Vec::new();
    let gen = |base, level| SigmaStringGen { base, level };
    match k {
        k if k < 0 => {}
        0 => {
            for c in &window.classes {
                out.push((gen(window.loop_of(&c.token)?, 0), 0));
            }
        }
        k if k % 2 == 1 => {
            let level = ((k - 1) / 2) as u32;
            for i in 1..=window.genus {
                out.push((gen(SigmaLoopGen::A(i), level), 0));
            }
            for i in 1..=window.genus {
                out.push((gen(SigmaLoopGen::B(i), level), 0));
            }
            for c in window.classes.iter().filter(|c| !c.identity && c.exponent > 1) {
                out.push((gen(SigmaLoopGen::Beta(c.token.clone()), level), c.exponent as u64));
            }
        }
        k => {
            let level = (k / 2) as u32;
            out.push((gen(SigmaLoopGen::One, level - 1), 0));
            out.push((gen(SigmaLoopGen::Identity, level), 0));
        }
    }
    Ok(out)
}

/// `H_k^{S¹}(LΣ_g)` on the classes of the window.
pub fn sigma_g_string_homology(window: &SurfaceWindow, k: i64) -> Result<SigmaHomology> {
    if k < 0 {
        return Err(Error::Invalid(format!("degree {k} is negative")));
    }
    let basis = sigma_basis(window, k)?;
    let group = AbelianGroupDescriptor::from_cyclic_orders(basis.iter().map(|(_, o)| *o as i64));
    let generators = basis.into_iter().map(|(g, o)| (g.to_string(), o)).collect();
    Ok(SigmaHomology { genus: window.genus, degree: k, group, generators })
}

/// The string bracket on `Σ_g`: bilinear extension of the table on
/// `H_0 ⊗ H_0`, zero on every other pair of degrees.
pub fn sigma_g_string_bracket(x: &SigmaStringChain, y: &SigmaStringChain, oracle: &GoldmanOracle) -> Result<SigmaStringChain> {
    let mut out = FreeChain::zero();
    for (p, &c) in x.iter() {
        for (q, &d) in y.iter() {
            if p.level != 0 || q.level != 0 || p.degree() != 0 || q.degree() != 0 {
                continue;
            }
            let (SigmaLoopGen::Class(s), SigmaLoopGen::Class(t)) = (&p.base, &q.base) else {
                continue;
            };
            for (token, e) in oracle.lookup(s, t)? {
                out.add_term(SigmaStringGen { base: oracle.window.loop_of(&token)?, level: 0 }, c * d * e);
            }
        }
    }
    Ok(SigmaStringChain { chain: out })
}
