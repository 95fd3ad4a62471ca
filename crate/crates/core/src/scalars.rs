//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! A [`Cyc`] is stored in the power basis `zeta^0 .. zeta^(N-1)` and only reduced
//! modulo the N-th cyclotomic polynomial when it is compared or printed.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("cyclotomic order must be at least 1")]
    ZeroOrder,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

/// Element of `Q(zeta_N)`.
#[derive(Clone, Debug)]
pub struct Cyc {
    order: u32,
    // sorted by exponent, exponents < order, no zero rationals
    terms: Vec<(u32, Q)>,
}

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

fn cyclo_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (constant term first) of the n-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<BigInt>> {
    assert!(n >= 1);
    if let Some(p) = cyclo_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d with d | n, d < n
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let div = cyclotomic_poly(d);
            num = poly_exact_div(&num, &div);
        }
    }
    let p = Arc::new(num);
    cyclo_cache().lock().unwrap().insert(n, p.clone());
    p
}

fn poly_exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // den is monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|r| r.is_zero()));
    quot
}

/// Euler's totient, which is the degree of `Q(zeta_n)`.
pub fn totient(n: u32) -> u32 {
    (cyclotomic_poly(n).len() - 1) as u32
}

/// Solves `a x = b` over Q. Returns one solution (free variables set to zero)
/// or `None` when the system is inconsistent.
pub fn solve_rational(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for j in c..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        b[r] = &b[r] * &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
                let t = &f * &b[r];
                b[i] -= t;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Some(x)
}

impl Cyc {
    pub fn zero() -> Cyc {
        Cyc { order: 1, terms: Vec::new() }
    }

    pub fn one() -> Cyc {
        Cyc::from_rational(q(1))
    }

    pub fn from_int(n: i64) -> Cyc {
        Cyc::from_rational(q(n))
    }

    pub fn from_rational(r: Q) -> Cyc {
        if r.is_zero() {
            return Cyc::zero();
        }
        Cyc { order: 1, terms: vec![(0, r)] }
    }

    pub fn frac(n: i64, d: i64) -> Cyc {
        Cyc::from_rational(Q::new(BigInt::from(n), BigInt::from(d)))
    }

    /// `zeta_n^k`, i.e. `exp(2 pi i k / n)`.
    pub fn root(n: u32, k: i64) -> Result<Cyc, ScalarError> {
        if n == 0 {
            return Err(ScalarError::ZeroOrder);
        }
        let e = k.rem_euclid(n as i64) as u32;
        Ok(Cyc { order: n, terms: vec![(e, q(1))] })
    }

    /// The imaginary unit `zeta_4`.
    pub fn i() -> Cyc {
        Cyc::root(4, 1).unwrap()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Raw power-basis coefficients before reduction.
    pub fn raw_terms(&self) -> &[(u32, Q)] {
        &self.terms
    }

    /// Re-expresses `self` in `Q(zeta_m)`; `m` must be a multiple of the order.
    pub fn embed(&self, m: u32) -> Cyc {
        assert!(m % self.order == 0, "embedding into a field that does not contain the order");
        if m == self.order {
            return self.clone();
        }
        let f = m / self.order;
        Cyc { order: m, terms: self.terms.iter().map(|(k, c)| (k * f, c.clone())).collect() }
    }

    fn dense(&self) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.order as usize];
        for (k, c) in &self.terms {
            v[*k as usize] += c;
        }
        v
    }

    fn from_dense(order: u32, v: Vec<Q>) -> Cyc {
        let terms = v
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as u32, c))
            .collect();
        Cyc { order, terms }
    }

    /// Reduced coefficients modulo the cyclotomic polynomial, of length `totient(order)`.
    pub fn canonical(&self) -> Vec<Q> {
        let phi = cyclotomic_poly(self.order);
        let deg = phi.len() - 1;
        let mut v = self.dense();
        for i in (deg..v.len()).rev() {
            let c = v[i].clone();
            if c.is_zero() {
                continue;
            }
            let shift = i - deg;
            for (j, pj) in phi.iter().enumerate() {
                if !pj.is_zero() {
                    v[shift + j] -= &c * Q::from_integer(pj.clone());
                }
            }
        }
        v.truncate(deg);
        v
    }

    pub fn is_zero(&self) -> bool {
        if self.terms.is_empty() {
            return true;
        }
        self.canonical().iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        (self - &Cyc::one()).is_zero()
    }

    /// Returns the rational value when `self` lies in Q.
    pub fn as_rational(&self) -> Option<Q> {
        let c = self.canonical();
        if c.iter().skip(1).all(|x| x.is_zero()) {
            Some(c.first().cloned().unwrap_or_else(Q::zero))
        } else {
            None
        }
    }

    pub fn conj(&self) -> Cyc {
        let n = self.order;
        let mut terms: Vec<(u32, Q)> =
            self.terms.iter().map(|(k, c)| ((n - k) % n, c.clone())).collect();
        terms.sort_by_key(|t| t.0);
        Cyc { order: n, terms }
    }

    /// Galois automorphism `zeta_N -> zeta_N^a`, `gcd(a, N) = 1`.
    pub fn galois(&self, a: u32) -> Cyc {
        let n = self.order;
        let mut v = vec![Q::zero(); n as usize];
        for (k, c) in &self.terms {
            v[((*k as u64 * a as u64) % n as u64) as usize] += c;
        }
        Cyc::from_dense(n, v)
    }

    pub fn scale(&self, r: &Q) -> Cyc {
        if r.is_zero() {
            return Cyc::zero();
        }
        Cyc { order: self.order, terms: self.terms.iter().map(|(k, c)| (*k, c * r)).collect() }
    }

    fn rational_single(&self) -> Option<&Q> {
        match self.terms.as_slice() {
            [(0, c)] => Some(c),
            _ => None,
        }
    }

    pub fn mul_ref(&self, other: &Cyc) -> Cyc {
        if self.terms.is_empty() || other.terms.is_empty() {
            return Cyc::zero();
        }
        if let Some(r) = self.rational_single() {
            return other.scale(r);
        }
        if let Some(r) = other.rational_single() {
            return self.scale(r);
        }
        let n = lcm(self.order, other.order);
        let (a, b) = (self.embed(n), other.embed(n));
        if a.terms.len() == 1 && b.terms.len() == 1 {
            let (ka, ca) = &a.terms[0];
            let (kb, cb) = &b.terms[0];
            return Cyc { order: n, terms: vec![((ka + kb) % n, ca * cb)] };
        }
        let mut v = vec![Q::zero(); n as usize];
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                v[((ka + kb) % n) as usize] += ca * cb;
            }
        }
        Cyc::from_dense(n, v)
    }

    pub fn add_ref(&self, other: &Cyc) -> Cyc {
        if self.terms.is_empty() {
            return other.clone();
        }
        if other.terms.is_empty() {
            return self.clone();
        }
        let n = lcm(self.order, other.order);
        let mut v = self.embed(n).dense();
        for (k, c) in other.embed(n).terms {
            v[k as usize] += c;
        }
        Cyc::from_dense(n, v)
    }

    pub fn inv(&self) -> Result<Cyc, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if self.terms.len() == 1 {
            let (k, c) = &self.terms[0];
            let n = self.order;
            return Ok(Cyc { order: n, terms: vec![((n - k) % n, c.recip())] });
        }
        // multiplication-by-self matrix on the reduced power basis
        let n = self.order;
        let d = totient(n) as usize;
        let mut cols = Vec::with_capacity(d);
        for j in 0..d {
            let xj = Cyc { order: n, terms: vec![(j as u32, q(1))] };
            cols.push(self.mul_ref(&xj).embed(n).canonical());
        }
        let a: Vec<Vec<Q>> = (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect();
        let mut b = vec![Q::zero(); d];
        b[0] = q(1);
        let x = solve_rational(a, b).ok_or(ScalarError::DivisionByZero)?;
        Ok(Cyc::from_dense(n, x))
    }

    pub fn div(&self, other: &Cyc) -> Result<Cyc, ScalarError> {
        Ok(self.mul_ref(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Cyc, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Cyc::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul_ref(&base);
        }
        Ok(acc)
    }

    /// Smallest `m | order` with `self` in `Q(zeta_m)`, together with the
    /// reduced coordinates there.
    pub fn minimal_field(&self) -> (u32, Vec<Q>) {
        let n = self.order;
        for m in 1..=n {
            if n % m != 0 || (m % 4 == 2) {
                continue;
            }
            let fixed = (1..n)
                .filter(|a| a.gcd(&n) == 1 && a % m == 1 % m)
                .all(|a| (&self.galois(a) - self).is_zero());
            if !fixed {
                continue;
            }
            let d = totient(m) as usize;
            let target = self.canonical();
            let basis: Vec<Vec<Q>> = (0..d)
                .map(|j| Cyc { order: m, terms: vec![(j as u32, q(1))] }.embed(n).canonical())
                .collect();
            let a: Vec<Vec<Q>> =
                (0..target.len()).map(|i| (0..d).map(|j| basis[j][i].clone()).collect()).collect();
            if let Some(x) = solve_rational(a, target) {
                return (m, x);
            }
        }
        (n, self.canonical())
    }
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Cyc) -> bool {
        (self - other).is_zero()
    }
}

impl Eq for Cyc {}

impl Default for Cyc {
    fn default() -> Self {
        Cyc::zero()
    }
}

impl From<i64> for Cyc {
    fn from(n: i64) -> Cyc {
        Cyc::from_int(n)
    }
}

impl<'a> Add<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn add(self, o: &Cyc) -> Cyc {
        self.add_ref(o)
    }
}

impl Add for Cyc {
    type Output = Cyc;
    fn add(self, o: Cyc) -> Cyc {
        self.add_ref(&o)
    }
}

impl AddAssign<&Cyc> for Cyc {
    fn add_assign(&mut self, o: &Cyc) {
        *self = self.add_ref(o);
    }
}

impl<'a> Sub<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn sub(self, o: &Cyc) -> Cyc {
        self.add_ref(&-o)
    }
}

impl Sub for Cyc {
    type Output = Cyc;
    fn sub(self, o: Cyc) -> Cyc {
        self.add_ref(&-&o)
    }
}

impl<'a> Mul<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn mul(self, o: &Cyc) -> Cyc {
        self.mul_ref(o)
    }
}

impl Mul for Cyc {
    type Output = Cyc;
    fn mul(self, o: Cyc) -> Cyc {
        self.mul_ref(&o)
    }
}

impl Neg for &Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc { order: self.order, terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl Neg for Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        -&self
    }
}

fn fmt_rational(r: &Q) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_zeta(m: u32, k: u32) -> String {
    if k == 1 {
        format!("zeta({m})")
    } else {
        format!("zeta({m})^{k}")
    }
}

/// Symbolic form: `c * zeta(M)^k` sums in the smallest cyclotomic field
/// containing the value. A single root of unity times a rational is printed
/// as one term.
impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, coords) = self.minimal_field();
        if coords.iter().all(|c| c.is_zero()) {
            return write!(f, "0");
        }
        let small = Cyc::from_dense(m, {
            let mut v = coords.clone();
            v.resize(m as usize, Q::zero());
            v
        });
        // prefer c * zeta^k with c > 0
        let mut mono: Option<(u32, Q)> = None;
        for k in 0..m {
            let shifted = small.mul_ref(&Cyc::root(m, -(k as i64)).unwrap());
            if let Some(r) = shifted.as_rational() {
                let better = match &mono {
                    None => true,
                    Some((_, old)) => old.is_negative() && r.is_positive(),
                };
                if better {
                    mono = Some((k, r));
                }
            }
        }
        let terms: Vec<(u32, Q)> = match mono {
            Some(t) => vec![t],
            None => coords.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k as u32, c)).collect(),
        };
        let mut out = String::new();
        for (idx, (k, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if *k == 0 {
                out.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                out.push_str(&fmt_zeta(m, *k));
            } else {
                out.push_str(&format!("{} * {}", fmt_rational(&a), fmt_zeta(m, *k)));
            }
        }
        write!(f, "{out}")
    }
}

fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        Some(Q::new(a, b))
    } else {
        Some(Q::from_integer(s.parse().ok()?))
    }
}

fn parse_zeta(s: &str) -> Option<(u32, i64)> {
    let rest = s.trim().strip_prefix("zeta(")?;
    let (m, tail) = rest.split_once(')')?;
    let m: u32 = m.trim().parse().ok()?;
    let k = match tail.trim().strip_prefix('^') {
        Some(e) => e.trim().parse().ok()?,
        None if tail.trim().is_empty() => 1,
        None => return None,
    };
    Some((m, k))
}

fn parse_term(s: &str) -> Option<Cyc> {
    let s = s.trim();
    if let Some((c, z)) = s.split_once('*') {
        let (m, k) = parse_zeta(z)?;
        Some(Cyc::root(m, k).ok()?.scale(&parse_rational(c)?))
    } else if s.starts_with("zeta(") {
        let (m, k) = parse_zeta(s)?;
        Cyc::root(m, k).ok()
    } else {
        Some(Cyc::from_rational(parse_rational(s)?))
    }
}

impl FromStr for Cyc {
    type Err = ScalarError;

    /// Inverse of the `Display` format.
    fn from_str(s: &str) -> Result<Cyc, ScalarError> {
        let err = || ScalarError::Parse(s.to_string());
        let mut acc = Cyc::zero();
        let mut rest = s.trim();
        let mut sign = 1;
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        }
        loop {
            let cut = [" + ", " - "].iter().filter_map(|p| rest.find(p).map(|i| (i, *p))).min();
            let (term, next) = match cut {
                Some((i, p)) => (&rest[..i], Some((p, &rest[i + 3..]))),
                None => (rest, None),
            };
            let t = parse_term(term).ok_or_else(err)?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
            match next {
                Some((p, r)) => {
                    sign = if p == " + " { 1 } else { -1 };
                    rest = r;
                }
                None => break,
            }
        }
        Ok(acc)
    }
}

/// Operation selector for [`scalar_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Div,
    Conj,
    IsZero,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScalarValue {
    Scalar(Cyc),
    Bool(bool),
}

/// Single entry point for field operations; `conj` and `is_zero` ignore `b`.
pub fn scalar_arith(a: &Cyc, b: &Cyc, op: ScalarOp) -> Result<ScalarValue, ScalarError> {
    Ok(match op {
        ScalarOp::Add => ScalarValue::Scalar(a + b),
        ScalarOp::Sub => ScalarValue::Scalar(a - b),
        ScalarOp::Mul => ScalarValue::Scalar(a * b),
        ScalarOp::Div => ScalarValue::Scalar(a.div(b)?),
        ScalarOp::Conj => ScalarValue::Scalar(a.conj()),
        ScalarOp::IsZero => ScalarValue::Bool(a.is_zero()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32, k: i64) -> Cyc {
        Cyc::root(n, k).unwrap()
    }

    #[test]
    fn cyclotomic_polys() {
        let p: Vec<i64> = cyclotomic_poly(12).iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(p, vec![1, 0, -1, 0, 1]);
        let p: Vec<i64> = cyclotomic_poly(5).iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(p, vec![1, 1, 1, 1, 1]);
        assert_eq!(totient(20), 8);
    }

    #[test]
    fn root_examples() {
        assert_eq!(z(4, 1) * z(4, 1), Cyc::from_int(-1));
        assert_eq!(z(7, 3).conj(), z(7, 4));
        assert!((Cyc::one() + z(3, 1) + z(3, 2)).is_zero());
        assert_eq!(Cyc::root(0, 1).unwrap_err(), ScalarError::ZeroOrder);
        assert!(z(5, 0).is_one());
    }

    #[test]
    fn arith_examples() {
        assert!((z(8, 4) + Cyc::one()).is_zero());
        assert_eq!(Cyc::one().div(&z(5, 1)).unwrap(), z(5, 4));
        let p = z(6, 1) * z(4, 1);
        assert_eq!(p, z(12, 5));
        assert_eq!(p.order(), 12);
        assert_eq!(Cyc::one().div(&Cyc::zero()).unwrap_err(), ScalarError::DivisionByZero);
        let not_zero = z(3, 1) + z(3, 2);
        assert_eq!(not_zero, Cyc::from_int(-1));
        assert_eq!(
            scalar_arith(&Cyc::zero(), &Cyc::zero(), ScalarOp::IsZero).unwrap(),
            ScalarValue::Bool(true)
        );
    }

    #[test]
    fn inverse_of_sum() {
        let a = Cyc::one() + z(5, 1) + z(5, 1) * z(5, 1);
        let b = a.inv().unwrap();
        assert!((a * b).is_one());
    }

    #[test]
    fn display_forms() {
        assert_eq!(z(12, 8).to_string(), "zeta(3)^2");
        assert_eq!(z(12, 4).conj().to_string(), "zeta(3)^2");
        assert_eq!(z(4, 2).to_string(), "-1");
        assert_eq!(Cyc::frac(-1, 2).to_string(), "-1/2");
        assert_eq!((z(4, 1) * Cyc::frac(-1, 2)).to_string(), "1/2 * zeta(4)^3");
        assert_eq!((Cyc::one() + z(12, 3)).to_string(), "1 + zeta(4)");
        assert_eq!(z(6, 1).to_string(), "-zeta(3)^2");
        assert_eq!(Cyc::zero().to_string(), "0");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["zeta(3)^2", "-1/2", "1 + zeta(4)", "1/2 * zeta(4)^3", "0", "3 - 2/3 * zeta(5)^2"] {
            let c: Cyc = s.parse().unwrap();
            assert_eq!(c.to_string().parse::<Cyc>().unwrap(), c, "{s}");
        }
        assert!("zeta(x)".parse::<Cyc>().is_err());
    }

    #[test]
    fn minimal_field_of_sqrt_minus_three() {
        // zeta_3 - zeta_3^2 = i sqrt(3) lives in Q(zeta_3)
        let s = z(12, 4) - z(12, 8);
        assert_eq!(s.minimal_field().0, 3);
    }
}
