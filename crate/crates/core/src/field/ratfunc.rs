//! Rational functions with a partially factored denominator.
//!
//! No multivariate gcd is ever computed. The denominator is kept as a product
//! of primitive factors (whatever polynomials happened to be divided by), and
//! after every operation the numerator is trial-divided by those factors. In
//! this domain denominators are products of linear forms, so this keeps values
//! small and usually fully reduced. Equality never depends on reduction: it is
//! decided by whether the numerator of the difference is the zero polynomial.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::poly::{Monomial, Poly};
use super::{FieldError, Rat};

#[derive(Clone, Debug)]
pub struct RatFunc {
    num: Poly,
    /// Primitive, non-constant factors with positive leading coefficient.
    den: BTreeMap<Poly, u32>,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn from_poly(num: Poly) -> Self {
        RatFunc {
            num,
            den: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn from_int(v: i64) -> Self {
        RatFunc::constant(Rat::from_integer(v.into()))
    }

    pub fn var(i: usize) -> Self {
        RatFunc::from_poly(Poly::var(i))
    }

    /// `num / den` for an arbitrary nonzero polynomial `den`.
    pub fn from_ratio(num: Poly, den: &Poly) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let (scalar, factors) = factor_lightly(den, &[]);
        let mut r = RatFunc {
            num: num.scale(&scalar.recip()),
            den: factors,
        };
        r.cancel();
        Ok(r)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_factors(&self) -> impl Iterator<Item = (&Poly, u32)> {
        self.den.iter().map(|(p, e)| (p, *e))
    }

    pub fn denominator(&self) -> Poly {
        expand(&self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rat> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RatFunc, FieldError> {
        if self.num.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let known: Vec<&Poly> = self.den.keys().collect();
        let (scalar, factors) = factor_lightly(&self.num, &known);
        let mut r = RatFunc {
            num: expand(&self.den).scale(&scalar.recip()),
            den: factors,
        };
        r.cancel();
        Ok(r)
    }

    pub fn checked_div(&self, other: &RatFunc) -> Result<RatFunc, FieldError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        let mut acc = RatFunc::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[Rat]) -> Result<Rat, FieldError> {
        let mut d = Rat::one();
        for (f, e) in &self.den {
            d *= num_traits::pow(f.eval(point), *e as usize);
        }
        if d.is_zero() {
            return Err(FieldError::DenominatorVanishes);
        }
        Ok(self.num.eval(point) / d)
    }

    /// `f(-x)`.
    pub fn negate_vars(&self) -> RatFunc {
        let mut num = self.num.negate_vars();
        let mut den = BTreeMap::new();
        for (f, e) in &self.den {
            let (c, p) = f.negate_vars().primitive_part();
            // f(-x) = c * p, so 1/f(-x)^e = c^-e / p^e
            num = num.scale(&num_traits::pow(c.recip(), *e as usize));
            *den.entry(p).or_insert(0) += *e;
        }
        RatFunc { num, den }
    }

    /// `f(1/x)`, cleared back to a polynomial fraction.
    pub fn invert_vars(&self) -> RatFunc {
        // num(1/x) = x^-d * rev(num);  f(1/x) = x^-d_f * rev(f)
        let (num_rev, num_deg) = self.num.reverse();
        let mut numer_shift = Monomial::one();
        let mut den_polys: Vec<(Poly, u32)> = Vec::new();
        for (f, e) in &self.den {
            let (f_rev, d_f) = f.reverse();
            for _ in 0..*e {
                numer_shift = numer_shift.mul(&d_f);
            }
            den_polys.push((f_rev, *e));
        }
        den_polys.push((Poly::monomial(num_deg, Rat::one()), 1));
        let mut num = num_rev.mul_monomial(&numer_shift);
        let mut den: BTreeMap<Poly, u32> = BTreeMap::new();
        for (p, e) in den_polys {
            let (c, fs) = factor_lightly(&p, &[]);
            num = num.scale(&num_traits::pow(c.recip(), e as usize));
            for (f, k) in fs {
                *den.entry(f).or_insert(0) += k * e;
            }
        }
        let mut r = RatFunc { num, den };
        r.cancel();
        r
    }

    /// Multiplies a list of rational functions by the lcm `D` of their (factored)
    /// denominators, returning the polynomials `f_i * D` and `D`.
    pub fn clear_denominators(items: &[RatFunc]) -> (Vec<Poly>, Poly) {
        let mut l = BTreeMap::new();
        for f in items {
            l = lcm_factors(&l, &f.den);
        }
        let polys = items
            .iter()
            .map(|f| &f.num * &cofactor(&l, &f.den))
            .collect();
        (polys, expand(&l))
    }

    /// Divides common factors out of numerator and denominator.
    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let mut done = BTreeMap::new();
        for (f, mut e) in std::mem::take(&mut self.den) {
            while e > 0 {
                match self.num.div_exact(&f) {
                    Some(q) => {
                        self.num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                done.insert(f, e);
            }
        }
        self.den = done;
    }

    /// Text form with variables `{prefix}{i}`.
    pub fn to_text(&self, prefix: &str) -> String {
        let num = self.num.to_text(prefix);
        if self.den.is_empty() {
            return num;
        }
        let mut parts = Vec::new();
        for (f, e) in self.den.iter().rev() {
            let body = f.to_text(prefix);
            let base = if f.num_terms() > 1 {
                format!("({body})")
            } else {
                body
            };
            if *e == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{base}^{e}"));
            }
        }
        let num = if self.num.num_terms() > 1 {
            format!("({num})")
        } else {
            num
        };
        if parts.len() == 1 && !parts[0].contains('^') && !parts[0].contains('*') {
            format!("{num}/{}", parts[0])
        } else {
            format!("{num}/({})", parts.join("*"))
        }
    }
}

fn expand(den: &BTreeMap<Poly, u32>) -> Poly {
    let mut acc = Poly::one();
    for (f, e) in den {
        acc = &acc * &f.pow(*e);
    }
    acc
}

/// Splits a nonzero polynomial into `scalar * prod(factors)` using only
/// monomial content, rational content, and trial division by `known`.
fn factor_lightly(p: &Poly, known: &[&Poly]) -> (Rat, BTreeMap<Poly, u32>) {
    let mut out = BTreeMap::new();
    if let Some(c) = p.as_constant() {
        return (c, out);
    }
    let mc = p.monomial_content();
    for (i, &e) in mc.exponents().iter().enumerate() {
        if e > 0 {
            out.insert(Poly::var(i), e);
        }
    }
    let rest = p
        .div_exact(&Poly::monomial(mc, Rat::one()))
        .expect("monomial content divides");
    let (scalar, mut rest) = rest.primitive_part();
    for f in known {
        if f.num_terms() < 2 {
            continue;
        }
        while !rest.is_constant() {
            match rest.div_exact(f) {
                Some(q) => {
                    *out.entry((*f).clone()).or_insert(0) += 1;
                    rest = q;
                }
                None => break,
            }
        }
    }
    let (c2, rest) = rest.primitive_part();
    let scalar = scalar * c2;
    if !rest.is_one() {
        *out.entry(rest).or_insert(0) += 1;
    }
    (scalar, out)
}

fn lcm_factors(a: &BTreeMap<Poly, u32>, b: &BTreeMap<Poly, u32>) -> BTreeMap<Poly, u32> {
    let mut out = a.clone();
    for (f, e) in b {
        let slot = out.entry(f.clone()).or_insert(0);
        *slot = (*slot).max(*e);
    }
    out
}

fn cofactor(lcm: &BTreeMap<Poly, u32>, part: &BTreeMap<Poly, u32>) -> Poly {
    let mut acc = Poly::one();
    for (f, e) in lcm {
        let have = part.get(f).copied().unwrap_or(0);
        if *e > have {
            acc = &acc * &f.pow(e - have);
        }
    }
    acc
}

impl PartialEq for RatFunc {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        (self - other).is_zero()
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let mut r = RatFunc {
                num: &self.num + &rhs.num,
                den: self.den.clone(),
            };
            r.cancel();
            return r;
        }
        let den = lcm_factors(&self.den, &rhs.den);
        let num = &(&self.num * &cofactor(&den, &self.den)) + &(&rhs.num * &cofactor(&den, &rhs.den));
        let mut r = RatFunc { num, den };
        r.cancel();
        r
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        let mut den = self.den.clone();
        for (f, e) in &rhs.den {
            *den.entry(f.clone()).or_insert(0) += e;
        }
        let mut r = RatFunc {
            num: &self.num * &rhs.num,
            den,
        };
        r.cancel();
        r
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_rf_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $method(self, rhs: RatFunc) -> RatFunc {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_rf_binop!(Add, add);
forward_rf_binop!(Sub, sub);
forward_rf_binop!(Mul, mul);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text("x"))
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(i: usize) -> RatFunc {
        RatFunc::var(i)
    }

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(p.into(), q.into())
    }

    #[test]
    fn inverse_pair_is_one() {
        let f = a(1).checked_div(&a(2)).unwrap();
        let g = a(2).checked_div(&a(1)).unwrap();
        let p = &f * &g;
        assert_eq!(p.as_constant(), Some(Rat::one()));
    }

    #[test]
    fn common_denominator() {
        let s = &a(1).inv().unwrap() + &a(2).inv().unwrap();
        let want = (&a(1) + &a(2)).checked_div(&(&a(1) * &a(2))).unwrap();
        assert_eq!(s, want);
        assert_eq!(s.to_text("a"), "(a1 + a2)/(a1*a2)");
    }

    #[test]
    fn cancellation_reduces_to_polynomial() {
        let f = &a(0) + &a(1);
        let g = (&f * &f).checked_div(&f).unwrap();
        assert!(g.is_polynomial());
        assert_eq!(g, f);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(a(0).checked_div(&RatFunc::zero()), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn eval_reports_vanishing_denominator() {
        let f = a(0).inv().unwrap();
        let pt = vec![Rat::zero()];
        assert_eq!(f.eval(&pt), Err(FieldError::DenominatorVanishes));
        let pt = vec![r(1, 3)];
        assert_eq!(f.eval(&pt), Ok(r(3, 1)));
    }

    #[test]
    fn invert_vars_clears_monomials() {
        // (x0 x1 - 1) / ((x0 - 1)(x1 - 1)) at 1/x equals (1 - x0 x1) / ((1 - x0)(1 - x1))
        let one = RatFunc::one();
        let f = (&(&a(0) * &a(1)) - &one)
            .checked_div(&(&(&a(0) - &one) * &(&a(1) - &one)))
            .unwrap();
        let g = f.invert_vars();
        assert_eq!(g, -&f);
        assert_eq!(g.invert_vars(), f);
    }

    #[test]
    fn negate_vars_is_involutive() {
        let f = (&a(0) + &RatFunc::from_int(2)).checked_div(&(&a(1) * &(&a(2) - &a(0)))).unwrap();
        let g = f.negate_vars();
        assert_ne!(g, f);
        assert_eq!(g.negate_vars(), f);
    }
}
