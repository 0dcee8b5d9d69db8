//! Sparse multivariate polynomials over the rationals.
//!
//! Exponent vectors are stored with trailing zeros trimmed, so the derived
//! lexicographic `Ord` on `Vec<u32>` is the lex monomial order with
//! `x0 > x1 > x2 > ...` and polynomials of different arity combine freely.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rat;

/// A power product `x0^e0 * x1^e1 * ...` with trailing zero exponents removed.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Self::var_pow(i, 1)
    }

    pub fn var_pow(i: usize, e: u32) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = e;
        Monomial::from_exponents(v)
    }

    pub fn from_exponents(mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().max(other.0.len());
        let v = (0..len)
            .map(|i| self.exponent(i) + other.exponent(i))
            .collect();
        Monomial(v)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, if exact.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let v = (0..other.0.len())
            .map(|i| other.exponent(i) - self.exponent(i))
            .collect();
        Some(Monomial::from_exponents(v))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().min(other.0.len());
        Monomial::from_exponents((0..len).map(|i| self.0[i].min(other.0[i])).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().max(other.0.len());
        Monomial((0..len).map(|i| self.exponent(i).max(other.exponent(i))).collect())
    }
}

/// Sparse polynomial: monomial -> nonzero rational coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn monomial(m: Monomial, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn var(i: usize) -> Self {
        Poly::monomial(Monomial::var(i), Rat::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rat)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// Leading term under lex order.
    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.last_key_value()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Number of variable slots touched by any term.
    pub fn arity(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    /// Componentwise maximal exponent over all terms.
    pub fn max_exponents(&self) -> Monomial {
        self.terms
            .keys()
            .fold(Monomial::one(), |acc, m| acc.lcm(m))
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(),
            Some(first) => it.fold(first.clone(), |acc, m| acc.gcd(m)),
        }
    }

    /// Positive rational content: gcd of numerators over lcm of denominators.
    pub fn content(&self) -> Rat {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            Rat::one()
        } else {
            Rat::new(num, den)
        }
    }

    /// Splits `self = c * p` with `p` having coprime integer coefficients and a
    /// positive leading coefficient.
    pub fn primitive_part(&self) -> (Rat, Poly) {
        if self.is_zero() {
            return (Rat::zero(), Poly::zero());
        }
        let mut c = self.content();
        if self.leading().is_some_and(|(_, a)| a.is_negative()) {
            c = -c;
        }
        let inv = c.recip();
        (c, self.scale(&inv))
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm_d, lc_d) = d.leading()?;
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((lm_r, lc_r)) = rem.leading() {
            let m = lm_d.quotient_of(lm_r)?;
            let c = lc_r / lc_d;
            rem = &rem - &d.mul_monomial(&m).scale(&c);
            quot.add_term(m, c);
        }
        Some(quot)
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let x = point
                        .get(i)
                        .unwrap_or_else(|| panic!("evaluation point has no value for variable {i}"));
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// `p(-x)`.
    pub fn negate_vars(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let c = if m.degree() % 2 == 1 { -c } else { c.clone() };
                    (m.clone(), c)
                })
                .collect(),
        }
    }

    /// `x^d * p(1/x)` where `d` is [`Poly::max_exponents`].
    pub fn reverse(&self) -> (Poly, Monomial) {
        let d = self.max_exponents();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.quotient_of(&d).expect("max exponent bounds every term"), c.clone()));
        (Poly::from_terms(terms), d)
    }

    /// Writes the polynomial with variables named `{prefix}{index}`.
    pub fn write_text(&self, prefix: &str, out: &mut String) {
        if self.is_zero() {
            out.push('0');
            return;
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.is_one() {
                factors.push(a.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("{prefix}{i}")),
                    _ => factors.push(format!("{prefix}{i}^{e}")),
                }
            }
            let _ = write!(out, "{}", factors.join("*"));
        }
    }

    pub fn to_text(&self, prefix: &str) -> String {
        let mut s = String::new();
        self.write_text(prefix, &mut s);
        s
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text("x"))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (mut acc, other) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &other.terms {
            acc.add_term(m.clone(), c.clone());
        }
        acc
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut acc = self.clone();
        for (m, c) in &rhs.terms {
            acc.add_term(m.clone(), -c);
        }
        acc
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                acc.add_term(m1.mul(m2), c1 * c2);
            }
        }
        acc
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_poly_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_poly_binop!(Add, add);
forward_poly_binop!(Sub, sub);
forward_poly_binop!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    fn c(v: i64) -> Poly {
        Poly::constant(Rat::from_integer(v.into()))
    }

    #[test]
    fn monomial_order_is_lex() {
        // x0 > x1^5 > x1 > 1
        let a = Monomial::var(0);
        let b = Monomial::var_pow(1, 5);
        let d = Monomial::var(1);
        assert!(a > b && b > d && d > Monomial::one());
    }

    #[test]
    fn exact_division_recovers_factor() {
        let f = &(&x(0) + &x(1)) * &(&x(2) - &c(3));
        let g = &f * &(&x(1) * &x(1) + c(1));
        assert_eq!(g.div_exact(&f).unwrap(), &x(1) * &x(1) + c(1));
        assert!(g.div_exact(&(&x(0) + &c(2))).is_none());
    }

    #[test]
    fn primitive_part_normalizes_sign_and_content() {
        let p = (&x(0) * &c(-4)) + c(6);
        let (k, q) = p.primitive_part();
        assert_eq!(k, Rat::from_integer((-2).into()));
        assert_eq!(q, &x(0) * &c(2) - c(3));
    }

    #[test]
    fn reverse_inverts_variables() {
        // x0^2 x1 + 3 x1 + 1 -> x1 + 3 x0^2 + x0^2 x1 with d = (2, 1)
        let p = &(&x(0) * &x(0)) * &x(1) + &x(1) * &c(3) + c(1);
        let (r, d) = p.reverse();
        assert_eq!(d, Monomial::from_exponents(vec![2, 1]));
        assert_eq!(r, c(1) + &(&x(0) * &x(0)) * &c(3) + &(&x(0) * &x(0)) * &x(1));
    }

    #[test]
    fn text_form_is_sorted() {
        let p = &x(1) * &c(-1) + &x(0) * &x(0) + Poly::constant(Rat::new(1.into(), 2.into()));
        assert_eq!(p.to_text("a"), "a0^2 - a1 + 1/2");
    }
}
