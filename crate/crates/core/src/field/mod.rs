//! Exact arithmetic over ℚ(α₀,…,α_{k+n+1}) and ℚ(λ₀,…,λ_{k+n+1}).
//!
//! Values are sparse polynomials over big rationals ([`Poly`]) and fractions of those
//! ([`RatFunc`]). A [`ParamContext`] fixes the number of parameters and eliminates the
//! last one through the balancing condition (Σα = 0, resp. ∏λ = 1), so every
//! [`RatFunc`] built through a context automatically satisfies it.

mod parse;
pub mod poly;
pub mod ratfunc;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use poly::{Monomial, Poly};
pub use ratfunc::RatFunc;

/// Arbitrary-precision rational number in canonical form.
pub type Rat = num_rational::BigRational;

/// Denominator of random evaluation points (a prime above 10⁶).
pub const EVAL_PRIME: i64 = 1_000_003;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("the evaluation point zeroes a denominator")]
    DenominatorVanishes,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Parses a rational number written as `p`, `p/q` or a finite decimal such as `-0.25`.
pub fn parse_rat(s: &str) -> Result<Rat, FieldError> {
    let s = s.trim();
    let bad = || FieldError::Parse(format!("not a rational number: `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        let whole: BigInt = if ip_abs.is_empty() {
            BigInt::zero()
        } else {
            ip_abs.parse().map_err(|_| bad())?
        };
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let v = Rat::new(whole * &scale + frac, scale);
        return Ok(if neg { -v } else { v });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(p))
}

/// Canonical text of a rational: `p` or `p/q`.
pub fn rat_to_text(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion to `f64` (used only by the numerical layers).
pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            // scale down huge operands before dividing
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
            let a = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let b = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            a / b
        }
    }
}

/// Field element usable by the generic linear algebra (`zero`, `one`, `is_zero` come from
/// the `num_traits` supertraits).
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + std::ops::Sub<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn from_int(v: i64) -> Self;
    fn from_rat(r: &Rat) -> Self;
    fn try_inv(&self) -> Result<Self, FieldError>;
    fn try_div(&self, other: &Self) -> Result<Self, FieldError> {
        Ok(self.clone() * other.try_inv()?)
    }
}

impl Scalar for Rat {
    fn from_int(v: i64) -> Self {
        Rat::from_integer(v.into())
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
    fn try_inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
}

impl Scalar for RatFunc {
    fn from_int(v: i64) -> Self {
        RatFunc::from_int(v)
    }
    fn from_rat(r: &Rat) -> Self {
        RatFunc::constant(r.clone())
    }
    fn try_inv(&self) -> Result<Self, FieldError> {
        self.inv()
    }
}

/// Which family of parameters a context describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    /// Exponents α with Σα = 0.
    Alpha,
    /// Monodromies λ = e^{2πiα} with ∏λ = 1.
    Lambda,
}

/// Parameter context: `k + n + 2` parameters indexed `0..=k+n+1`, the last one eliminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamContext {
    k: usize,
    n: usize,
    kind: VarKind,
}

impl ParamContext {
    pub fn new(k: usize, n: usize, kind: VarKind) -> Self {
        assert!(k >= 1 && n >= 1, "k and n must be positive");
        ParamContext { k, n, kind }
    }

    pub fn alpha(k: usize, n: usize) -> Self {
        Self::new(k, n, VarKind::Alpha)
    }

    pub fn lambda(k: usize, n: usize) -> Self {
        Self::new(k, n, VarKind::Lambda)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    /// Total number of parameters, `k + n + 2`.
    pub fn num_params(&self) -> usize {
        self.k + self.n + 2
    }

    /// Index of the eliminated parameter, `k + n + 1`.
    pub fn last(&self) -> usize {
        self.k + self.n + 1
    }

    /// Variable-name prefix used in text output.
    pub fn prefix(&self) -> &'static str {
        match self.kind {
            VarKind::Alpha => "a",
            VarKind::Lambda => "l",
        }
    }

    /// The `j`-th parameter as a rational function (the last one is expressed through the others).
    pub fn var(&self, j: usize) -> RatFunc {
        assert!(j < self.num_params(), "parameter index {j} out of range");
        if j < self.last() {
            return RatFunc::var(j);
        }
        match self.kind {
            VarKind::Alpha => {
                let mut s = Poly::zero();
                for i in 0..self.last() {
                    s.add_term(Monomial::var(i), -Rat::one());
                }
                RatFunc::from_poly(s)
            }
            VarKind::Lambda => {
                let m = Monomial::from_exponents(vec![1; self.last()]);
                RatFunc::from_poly(Poly::monomial(m, Rat::one()))
                    .inv()
                    .expect("monomial is nonzero")
            }
        }
    }

    /// All parameters `0..=k+n+1`.
    pub fn params(&self) -> Vec<RatFunc> {
        (0..self.num_params()).map(|j| self.var(j)).collect()
    }

    /// Sum of the α's over an index set.
    pub fn sum(&self, idx: &[usize]) -> RatFunc {
        idx.iter().fold(RatFunc::zero(), |acc, &j| &acc + &self.var(j))
    }

    /// Product of the parameters over an index set.
    pub fn product(&self, idx: &[usize]) -> RatFunc {
        idx.iter().fold(RatFunc::one(), |acc, &j| &acc * &self.var(j))
    }

    /// The duality involution: α ↦ −α, resp. λ ↦ 1/λ.
    pub fn dualize(&self, f: &RatFunc) -> RatFunc {
        match self.kind {
            VarKind::Alpha => f.negate_vars(),
            VarKind::Lambda => f.invert_vars(),
        }
    }

    /// Reads a rational function such as `(a0 + a1)/(a0*a1)` or `(l1*l2 - 1)/(l1 - 1)`.
    pub fn parse(&self, src: &str) -> Result<RatFunc, FieldError> {
        parse::parse(src, self)
    }

    /// Canonical text form (sorted monomials, explicit exponents).
    pub fn format(&self, f: &RatFunc) -> String {
        f.to_text(self.prefix())
    }

    /// Completes a point on the free parameters `0..k+n+1` by the elimination rule.
    pub fn complete_point(&self, free: &[Rat]) -> Vec<Rat> {
        assert_eq!(free.len(), self.last());
        let mut pt = free.to_vec();
        match self.kind {
            VarKind::Alpha => {
                let s: Rat = free.iter().fold(Rat::zero(), |a, b| a + b);
                pt.push(-s);
            }
            VarKind::Lambda => {
                let p: Rat = free.iter().fold(Rat::one(), |a, b| a * b);
                pt.push(p.recip());
            }
        }
        pt
    }

    /// Draws a random evaluation point (all `k + n + 2` coordinates) satisfying the
    /// non-integrality conditions; `avoid` lists index sets whose α-sum must not be an
    /// integer (resp. whose λ-product must not be 1).
    pub fn random_point(&self, seed: u64, avoid: &[Vec<usize>]) -> Vec<Rat> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = BigInt::from(EVAL_PRIME);
        loop {
            let free: Vec<Rat> = (0..self.last())
                .map(|_| Rat::new(BigInt::from(rng.gen_range(1..EVAL_PRIME)), q.clone()))
                .collect();
            let pt = self.complete_point(&free);
            if self.point_ok(&pt, avoid) {
                return pt;
            }
        }
    }

    /// Checks the non-integrality conditions of a full point.
    pub fn point_ok(&self, pt: &[Rat], avoid: &[Vec<usize>]) -> bool {
        match self.kind {
            VarKind::Alpha => {
                pt.iter().all(|a| !a.is_integer())
                    && avoid.iter().all(|set| {
                        let s: Rat = set.iter().fold(Rat::zero(), |acc, &j| acc + &pt[j]);
                        !s.is_integer()
                    })
            }
            VarKind::Lambda => {
                pt.iter().all(|l| !l.is_one() && !l.is_zero() && l.is_positive())
                    && avoid.iter().all(|set| {
                        let p: Rat = set.iter().fold(Rat::one(), |acc, &j| acc * &pt[j]);
                        !p.is_one()
                    })
            }
        }
    }

    /// Evaluates `f` at the random point of `seed` (see [`ParamContext::random_point`]).
    pub fn eval_random(&self, f: &RatFunc, seed: u64, avoid: &[Vec<usize>]) -> Result<Rat, FieldError> {
        f.eval(&self.random_point(seed, avoid))
    }
}
