//! Sparse linear combinations with exact rational coefficients.
//!
//! Every algebraic object in the crate (word series, tensors, forests,
//! polynomials) is a [`Series`] over some ordered basis. Terms with a zero
//! coefficient are never stored, so structural equality is coefficient
//! equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact coefficient type used throughout the algebraic modules.
pub type Rational = BigRational;

/// Shorthand for the rational `num / den`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for the integer `n` as a rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Finite linear combination `Σ c_k · k` over an ordered basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series<K: Ord> {
    terms: BTreeMap<K, Rational>,
}

impl<K: Ord> Default for Series<K> {
    fn default() -> Self {
        Series {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Series<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis element `k` with coefficient one.
    pub fn basis(k: K) -> Self {
        Self::term(k, Rational::one())
    }

    pub fn term(k: K, c: Rational) -> Self {
        let mut s = Self::zero();
        s.add_term(k, c);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        let mut s = Self::zero();
        for (k, c) in iter {
            s.add_term(k, c);
        }
        s
    }

    /// Adds `c · k`, dropping the entry if the coefficient cancels.
    pub fn add_term(&mut self, k: K, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: &Rational, other: &Series<K>) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add_term(k.clone(), c * v);
        }
    }

    pub fn coeff(&self, k: &K) -> Rational {
        self.terms.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn get(&self, k: &K) -> Option<&Rational> {
        self.terms.get(k)
    }

    /// Overwrites a coefficient; used by mutation tests.
    pub fn set_coeff(&mut self, k: K, c: Rational) {
        if c.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Series {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    /// Keeps the terms whose key satisfies `pred`.
    pub fn filter<F: Fn(&K) -> bool>(&self, pred: F) -> Self {
        Series {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| pred(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Linear extension of a basis map `k ↦ f(k)`.
    pub fn linear_map<K2: Ord + Clone, F: FnMut(&K) -> Series<K2>>(&self, mut f: F) -> Series<K2> {
        let mut out = Series::zero();
        for (k, c) in &self.terms {
            out.add_scaled(c, &f(k));
        }
        out
    }

    /// Linear extension of a basis relabelling `k ↦ f(k)`.
    pub fn map_keys<K2: Ord + Clone, F: FnMut(&K) -> K2>(&self, mut f: F) -> Series<K2> {
        let mut out = Series::zero();
        for (k, c) in &self.terms {
            out.add_term(f(k), c.clone());
        }
        out
    }

    /// Bilinear extension of a product defined on basis pairs.
    pub fn bilinear<K2, K3, F>(&self, other: &Series<K2>, mut f: F) -> Series<K3>
    where
        K2: Ord + Clone,
        K3: Ord + Clone,
        F: FnMut(&K, &K2) -> Series<K3>,
    {
        let mut out = Series::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in other.iter() {
                let c = ca * cb;
                out.add_scaled(&c, &f(a, b));
            }
        }
        out
    }

    /// Sum of products of matching coefficients (the diagonal pairing).
    pub fn pairing(&self, other: &Series<K>) -> Rational {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .terms
            .iter()
            .filter_map(|(k, c)| large.terms.get(k).map(|d| c * d))
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl<K: Ord + Clone> FromIterator<(K, Rational)> for Series<K> {
    fn from_iter<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        Series::from_terms(iter)
    }
}

impl<'a, K: Ord + Clone> IntoIterator for &'a Series<K> {
    type Item = (&'a K, &'a Rational);
    type IntoIter = std::collections::btree_map::Iter<'a, K, Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

impl<K: Ord + Clone> AddAssign<&Series<K>> for Series<K> {
    fn add_assign(&mut self, rhs: &Series<K>) {
        for (k, v) in &rhs.terms {
            self.add_term(k.clone(), v.clone());
        }
    }
}

impl<K: Ord + Clone> SubAssign<&Series<K>> for Series<K> {
    fn sub_assign(&mut self, rhs: &Series<K>) {
        for (k, v) in &rhs.terms {
            self.add_term(k.clone(), -v.clone());
        }
    }
}

impl<K: Ord + Clone> Add for &Series<K> {
    type Output = Series<K>;
    fn add(self, rhs: &Series<K>) -> Series<K> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<K: Ord + Clone> Add for Series<K> {
    type Output = Series<K>;
    fn add(mut self, rhs: Series<K>) -> Series<K> {
        self += &rhs;
        self
    }
}

impl<K: Ord + Clone> Sub for &Series<K> {
    type Output = Series<K>;
    fn sub(self, rhs: &Series<K>) -> Series<K> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<K: Ord + Clone> Sub for Series<K> {
    type Output = Series<K>;
    fn sub(mut self, rhs: Series<K>) -> Series<K> {
        self -= &rhs;
        self
    }
}

impl<K: Ord + Clone> Neg for &Series<K> {
    type Output = Series<K>;
    fn neg(self) -> Series<K> {
        self.scale(&-Rational::one())
    }
}

impl<K: Ord + Clone> Mul<&Rational> for &Series<K> {
    type Output = Series<K>;
    fn mul(self, rhs: &Rational) -> Series<K> {
        self.scale(rhs)
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for Series<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms.iter().map(|(k, v)| (k, v.to_string())))
            .finish()
    }
}

/// Writes `c·k` terms joined by signs, `0` for the empty combination.
pub fn format_terms<K: Ord, F: Fn(&K) -> String>(s: &Series<K>, show: F) -> String {
    if s.terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (k, c)) in s.terms.iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let body = show(k);
        if body.is_empty() {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&body);
        } else {
            out.push_str(&format!("{} {}", mag, body));
        }
    }
    out
}

impl<K: Ord + fmt::Display> fmt::Display for Series<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_terms(self, |k| k.to_string()))
    }
}
