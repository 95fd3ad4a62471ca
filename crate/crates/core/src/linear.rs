//! Finite linear combinations with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::scalars::Cyc;

/// Basis label: a group element as a tuple of integers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct Label(pub Vec<i64>);

impl Label {
    pub fn new(v: &[i64]) -> Label {
        Label(v.to_vec())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `sum c_k * k` over an ordered key set, with no stored zero coefficients.
#[derive(Clone, Debug)]
pub struct Lin<K: Ord> {
    terms: BTreeMap<K, Cyc>,
}

pub type Elem = Lin<Label>;
pub type Tensor = Lin<Vec<Label>>;

impl<K: Ord + Clone> Default for Lin<K> {
    fn default() -> Self {
        Lin { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> Lin<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: Cyc) -> Self {
        let mut l = Self::zero();
        l.add_term(k, c);
        l
    }

    pub fn basis(k: K) -> Self {
        Self::single(k, Cyc::one())
    }

    pub fn add_term(&mut self, k: K, c: Cyc) {
        if c.raw_terms().is_empty() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(old) => {
                let s = &*old + &c;
                if s.is_zero() {
                    self.terms.remove(&k);
                } else {
                    *old = s;
                }
            }
            None => {
                if !c.is_zero() {
                    self.terms.insert(k, c);
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Cyc) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Cyc::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Cyc::from_int(-1));
        out
    }

    pub fn scale(&self, c: &Cyc) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&Cyc::from_int(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: &K) -> Cyc {
        self.terms.get(k).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Cyc)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    /// Applies a linear map given on keys.
    pub fn map_linear<K2: Ord + Clone, F: FnMut(&K) -> Lin<K2>>(&self, mut f: F) -> Lin<K2> {
        let mut out = Lin::zero();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }

    /// Applies an antilinear map given on keys.
    pub fn map_antilinear<K2: Ord + Clone, F: FnMut(&K) -> Lin<K2>>(&self, mut f: F) -> Lin<K2> {
        let mut out = Lin::zero();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), &c.conj());
        }
        out
    }

    pub fn map_keys<K2: Ord + Clone, F: FnMut(&K) -> K2>(&self, mut f: F) -> Lin<K2> {
        let mut out = Lin::zero();
        for (k, c) in &self.terms {
            out.add_term(f(k), c.clone());
        }
        out
    }

    /// Sum of a scalar-valued linear functional.
    pub fn eval<F: FnMut(&K) -> Cyc>(&self, mut f: F) -> Cyc {
        let mut acc = Cyc::zero();
        for (k, c) in &self.terms {
            acc += &(c * &f(k));
        }
        acc
    }
}

impl<K: Ord + Clone> PartialEq for Lin<K> {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl<K: Ord + Clone> FromIterator<(K, Cyc)> for Lin<K> {
    fn from_iter<I: IntoIterator<Item = (K, Cyc)>>(iter: I) -> Self {
        let mut l = Lin::zero();
        for (k, c) in iter {
            l.add_term(k, c);
        }
        l
    }
}

/// Formats a combination given a key printer.
pub fn show<K: Ord + Clone, F: Fn(&K) -> String>(l: &Lin<K>, f: F) -> String {
    if l.is_zero() {
        return "0".to_string();
    }
    let parts: Vec<String> = l.iter().map(|(k, c)| format!("({c})*{}", f(k))).collect();
    parts.join(" + ")
}

impl<K: Ord + Clone + fmt::Debug> fmt::Display for Lin<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", show(self, |k| format!("{k:?}")))
    }
}
