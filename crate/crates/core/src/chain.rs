//! Sparse formal linear combinations of graded generators.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::de::{DeserializeOwned, Error as _};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{IntegerScalar, Ring, Scalar};

/// A generator key that carries an integer degree.
pub trait Graded {
    fn degree(&self) -> i64;
}

/// Finite formal sum `Σ cₖ·k` with no zero coefficients stored.
///
/// Keys are kept in their `Ord` order, so iteration and printing are
/// deterministic and two chains are equal exactly when their maps are.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FreeChain<K: Ord, R> {
    terms: BTreeMap<K, R>,
}

impl<K: Ord + Clone, R: Scalar> Default for FreeChain<K, R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<K: Ord + Clone, R: Scalar> FreeChain<K, R> {
    /// The empty chain.
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    /// The chain `c·key`.
    pub fn term(key: K, c: R) -> Self {
        let mut out = Self::zero();
        out.add_term(key, c);
        out
    }

    /// The chain `1·key`.
    pub fn generator(key: K) -> Self {
        Self::term(key, R::one())
    }

    /// Sums the given terms, merging repeated keys.
    pub fn from_terms<I: IntoIterator<Item = (K, R)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    /// Adds `c·key` in place, dropping the key if its coefficient cancels.
    pub fn add_term(&mut self, key: K, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of generators with a nonzero coefficient.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `key` (zero when absent).
    pub fn coefficient(&self, key: &K) -> R {
        self.terms.get(key).cloned().unwrap_or_else(R::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &R)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    /// The single term of a one-term chain.
    pub fn as_single_term(&self) -> Option<(&K, &R)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Coefficient-wise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    /// Coefficient-wise difference.
    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &R) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (k.clone(), c.clone() * v.clone())))
    }

    pub fn negate(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (k.clone(), -v.clone())).collect() }
    }

    /// Extends `f`, defined on generators, linearly.
    pub fn map_linear<K2, F>(&self, mut f: F) -> FreeChain<K2, R>
    where
        K2: Ord + Clone,
        F: FnMut(&K) -> FreeChain<K2, R>,
    {
        let mut out = FreeChain::zero();
        for (k, c) in &self.terms {
            for (k2, c2) in f(k).terms {
                out.add_term(k2, c.clone() * c2);
            }
        }
        out
    }

    /// Extends `f`, defined on pairs of generators, bilinearly.
    pub fn map_bilinear<K2, K3, F>(&self, other: &FreeChain<K2, R>, mut f: F) -> FreeChain<K3, R>
    where
        K2: Ord + Clone,
        K3: Ord + Clone,
        F: FnMut(&K, &K2) -> FreeChain<K3, R>,
    {
        let mut out = FreeChain::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                for (k3, c3) in f(k1, k2).terms {
                    out.add_term(k3, c1.clone() * c2.clone() * c3);
                }
            }
        }
        out
    }

    /// Fallible linear extension.
    pub fn try_map_linear<K2, F, E>(&self, mut f: F) -> Result<FreeChain<K2, R>, E>
    where
        K2: Ord + Clone,
        F: FnMut(&K) -> Result<FreeChain<K2, R>, E>,
    {
        let mut out = FreeChain::zero();
        for (k, c) in &self.terms {
            for (k2, c2) in f(k)?.terms {
                out.add_term(k2, c.clone() * c2);
            }
        }
        Ok(out)
    }

    /// Fallible bilinear extension.
    pub fn try_map_bilinear<K2, K3, F, E>(
        &self,
        other: &FreeChain<K2, R>,
        mut f: F,
    ) -> Result<FreeChain<K3, R>, E>
    where
        K2: Ord + Clone,
        K3: Ord + Clone,
        F: FnMut(&K, &K2) -> Result<FreeChain<K3, R>, E>,
    {
        let mut out = FreeChain::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                for (k3, c3) in f(k1, k2)?.terms {
                    out.add_term(k3, c1.clone() * c2.clone() * c3);
                }
            }
        }
        Ok(out)
    }
}

impl<K: Ord + Clone + Graded, R: Scalar> FreeChain<K, R> {
    /// The common degree of all terms; `None` for the zero chain or a
    /// chain spread over several degrees.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut degrees = self.terms.keys().map(Graded::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// True when all terms share one degree (the zero chain qualifies).
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }
}

impl<K: Ord + Clone, R: IntegerScalar> FreeChain<K, R> {
    /// Reduces each coefficient modulo the order of its generator, where
    /// `order` returns zero for a free generator.
    pub fn reduce_with<F: Fn(&K) -> R>(&self, order: F) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| {
            let n = order(k);
            let reduced = if n.is_zero() { c.clone() } else { c.mod_floor(&n.abs()) };
            (k.clone(), reduced)
        }))
    }
}

impl<K: Ord + Clone, R: Scalar> Add for &FreeChain<K, R> {
    type Output = FreeChain<K, R>;
    fn add(self, rhs: Self) -> FreeChain<K, R> {
        FreeChain::add(self, rhs)
    }
}

impl<K: Ord + Clone, R: Scalar> Sub for &FreeChain<K, R> {
    type Output = FreeChain<K, R>;
    fn sub(self, rhs: Self) -> FreeChain<K, R> {
        FreeChain::sub(self, rhs)
    }
}

impl<K: Ord + Clone, R: Scalar> Neg for &FreeChain<K, R> {
    type Output = FreeChain<K, R>;
    fn neg(self) -> FreeChain<K, R> {
        self.negate()
    }
}

/// Writes `Σ c·k` as `2·g₁ - g₂ + 1/2·g₃`; the zero chain prints `0`.
pub fn write_chain<'a, K, R, I, F>(f: &mut fmt::Formatter<'_>, terms: I, mut key: F) -> fmt::Result
where
    K: 'a,
    R: Ring + 'a,
    I: IntoIterator<Item = (&'a K, &'a R)>,
    F: FnMut(&K) -> String,
{
    let mut first = true;
    for (k, c) in terms {
        let label = key(k);
        let negative = c.is_negative();
        let magnitude = c.abs();
        if first {
            if negative {
                write!(f, "-")?;
            }
        } else if negative {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        if magnitude.is_one() {
            write!(f, "{label}")?;
        } else {
            write!(f, "{magnitude}·{label}")?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl<K: Ord + Clone + fmt::Display, R: Ring> fmt::Display for FreeChain<K, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_chain(f, self.terms.iter(), |k| k.to_string())
    }
}

impl<K: Ord + Clone + fmt::Debug, R: Scalar> fmt::Debug for FreeChain<K, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

#[derive(Serialize)]
struct TermOut<'a, K> {
    generator: &'a K,
    label: String,
    degree: i64,
    coefficient: String,
}

#[derive(Deserialize)]
struct TermIn<K> {
    generator: K,
    coefficient: String,
}

impl<K, R> Serialize for FreeChain<K, R>
where
    K: Ord + Clone + Serialize + Graded + fmt::Display,
    R: Ring,
{
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermOut<'_, K>> = self
            .terms
            .iter()
            .map(|(k, c)| TermOut {
                generator: k,
                label: k.to_string(),
                degree: k.degree(),
                coefficient: c.to_string(),
            })
            .collect();
        let mut st = s.serialize_struct("FreeChain", 3)?;
        st.serialize_field("ring", R::TAG)?;
        st.serialize_field("text", &self.to_string())?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

impl<'de, K, R> Deserialize<'de> for FreeChain<K, R>
where
    K: Ord + Clone + DeserializeOwned,
    R: Ring,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound = "K: DeserializeOwned")]
        struct Raw<K> {
            terms: Vec<TermIn<K>>,
        }
        let raw: Raw<K> = Raw::deserialize(d)?;
        let mut out = FreeChain::zero();
        for t in raw.terms {
            let c = R::from_str(t.coefficient.trim())
                .map_err(|_| D::Error::custom(format!("bad coefficient {:?}", t.coefficient)))?;
            out.add_term(t.generator, c);
        }
        Ok(out)
    }
}
