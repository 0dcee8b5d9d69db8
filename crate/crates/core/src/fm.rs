//! Exact feasibility of systems of strict and non-strict linear inequalities over ℚ by
//! Fourier–Motzkin elimination. The systems met in chamber enumeration are tiny (a few
//! variables, a handful of inequalities), so the quadratic blow-up per eliminated
//! variable is harmless and exactness removes any tolerance tuning.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::field::Rat;

/// The constraint `coeffs · x + constant > 0` (strict) or `≥ 0` (non-strict).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ineq {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
    pub strict: bool,
}

impl Ineq {
    pub fn new(coeffs: Vec<Rat>, constant: Rat, strict: bool) -> Self {
        Ineq {
            coeffs,
            constant,
            strict,
        }
    }

    /// `coeffs · x + constant > 0`.
    pub fn gt(coeffs: Vec<Rat>, constant: Rat) -> Self {
        Ineq::new(coeffs, constant, true)
    }

    /// `coeffs · x + constant ≥ 0`.
    pub fn ge(coeffs: Vec<Rat>, constant: Rat) -> Self {
        Ineq::new(coeffs, constant, false)
    }

    /// The pair of non-strict inequalities expressing `coeffs · x + constant = 0`.
    pub fn eq(coeffs: Vec<Rat>, constant: Rat) -> [Ineq; 2] {
        let neg: Vec<Rat> = coeffs.iter().map(|c| -c).collect();
        [Ineq::ge(coeffs, constant.clone()), Ineq::ge(neg, -constant)]
    }

    /// `x_i ≥ 1` or `x_i ≤ −1` (as `−x_i ≥ 1`) in dimension `dim`.
    pub fn unit_bound(dim: usize, i: usize, positive: bool) -> Self {
        let mut c = vec![Rat::zero(); dim];
        c[i] = if positive { Rat::one() } else { -Rat::one() };
        Ineq::ge(c, -Rat::one())
    }

    pub fn negated_coeffs(&self) -> Ineq {
        Ineq::new(
            self.coeffs.iter().map(|c| -c).collect(),
            -self.constant.clone(),
            self.strict,
        )
    }

    /// Value of the left-hand side at `x`.
    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut v = self.constant.clone();
        for (c, xi) in self.coeffs.iter().zip(x) {
            v += c * xi;
        }
        v
    }

    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        let v = self.eval(x);
        if self.strict {
            v.is_positive()
        } else {
            !v.is_negative()
        }
    }

    /// Scales so that the first nonzero coefficient (or the constant, when all
    /// coefficients vanish) has absolute value 1; positive scaling preserves meaning.
    fn normalized(mut self) -> Ineq {
        let pivot = self
            .coeffs
            .iter()
            .find(|c| !c.is_zero())
            .or(if self.constant.is_zero() {
                None
            } else {
                Some(&self.constant)
            })
            .map(|c| c.abs());
        if let Some(p) = pivot {
            for c in self.coeffs.iter_mut() {
                *c = &*c / &p;
            }
            self.constant = &self.constant / &p;
        }
        self
    }
}

/// Decides whether the system has a solution in ℚ^dim (equivalently ℝ^dim).
pub fn feasible(system: &[Ineq]) -> bool {
    let Some(dim) = system.first().map(|c| c.coeffs.len()) else {
        return true;
    };
    assert!(
        system.iter().all(|c| c.coeffs.len() == dim),
        "inconsistent dimensions in inequality system"
    );
    let mut cur: BTreeSet<Ineq> = system.iter().cloned().map(Ineq::normalized).collect();
    for var in 0..dim {
        let mut next = BTreeSet::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for c in cur {
            let a = &c.coeffs[var];
            if a.is_zero() {
                next.insert(c);
            } else if a.is_positive() {
                pos.push(c);
            } else {
                neg.push(c);
            }
        }
        for p in &pos {
            for q in &neg {
                // p: a x + P > 0 with a > 0; q: −b x + Q > 0 with b > 0.
                // b·p + a·q eliminates x; strictness propagates from either side.
                let a = p.coeffs[var].clone();
                let b = -q.coeffs[var].clone();
                let coeffs: Vec<Rat> = p
                    .coeffs
                    .iter()
                    .zip(&q.coeffs)
                    .map(|(pc, qc)| &b * pc + &a * qc)
                    .collect();
                let constant = &b * &p.constant + &a * &q.constant;
                next.insert(Ineq::new(coeffs, constant, p.strict || q.strict).normalized());
            }
        }
        if next
            .iter()
            .any(|c| c.coeffs.iter().all(Zero::is_zero) && !trivially_ok(c))
        {
            return false;
        }
        cur = next;
    }
    cur.iter().all(trivially_ok)
}

fn trivially_ok(c: &Ineq) -> bool {
    if c.strict {
        c.constant.is_positive()
    } else {
        !c.constant.is_negative()
    }
}

/// Whether a homogeneous non-strict system `{A x ≥ 0}` admits a nonzero solution.
/// Decided by the 2·dim systems adding `x_i ≥ 1` or `x_i ≤ −1` (scaling invariance).
pub fn has_nonzero_solution(system: &[Ineq]) -> bool {
    let Some(dim) = system.first().map(|c| c.coeffs.len()) else {
        return true;
    };
    debug_assert!(system.iter().all(|c| c.constant.is_zero() && !c.strict));
    (0..dim).any(|i| {
        [true, false].into_iter().any(|positive| {
            let mut s = system.to_vec();
            s.push(Ineq::unit_bound(dim, i, positive));
            feasible(&s)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(v: i64) -> Rat {
        Rat::from_integer(BigInt::from(v))
    }

    #[test]
    fn open_interval_and_point() {
        // 0 < x < 1
        let s = vec![Ineq::gt(vec![r(1)], r(0)), Ineq::gt(vec![r(-1)], r(1))];
        assert!(feasible(&s));
        // 0 < x < 0 is empty; 0 ≤ x ≤ 0 is a point
        let s = vec![Ineq::gt(vec![r(1)], r(0)), Ineq::gt(vec![r(-1)], r(0))];
        assert!(!feasible(&s));
        let s = vec![Ineq::ge(vec![r(1)], r(0)), Ineq::ge(vec![r(-1)], r(0))];
        assert!(feasible(&s));
    }

    #[test]
    fn triangle_and_separated_regions() {
        // x > 0, y > 0, x + y < 1
        let tri = vec![
            Ineq::gt(vec![r(1), r(0)], r(0)),
            Ineq::gt(vec![r(0), r(1)], r(0)),
            Ineq::gt(vec![r(-1), r(-1)], r(1)),
        ];
        assert!(feasible(&tri));
        let mut far = tri.clone();
        far.push(Ineq::gt(vec![r(1), r(1)], r(-2))); // x + y > 2
        assert!(!feasible(&far));
        // closed triangle touches x + y ≥ 1 along an edge
        let mut closed: Vec<Ineq> = tri.iter().map(|c| Ineq::ge(c.coeffs.clone(), c.constant.clone())).collect();
        closed.push(Ineq::ge(vec![r(1), r(1)], r(-1)));
        assert!(feasible(&closed));
    }

    #[test]
    fn nonzero_cone_detection() {
        // x ≥ 0, y ≥ 0, −x − y ≥ 0 has only the origin
        let s = vec![
            Ineq::ge(vec![r(1), r(0)], r(0)),
            Ineq::ge(vec![r(0), r(1)], r(0)),
            Ineq::ge(vec![r(-1), r(-1)], r(0)),
        ];
        assert!(!has_nonzero_solution(&s));
        let s = vec![Ineq::ge(vec![r(1), r(0)], r(0)), Ineq::ge(vec![r(0), r(1)], r(0))];
        assert!(has_nonzero_solution(&s));
    }

    #[test]
    fn satisfied_by_agrees_with_feasibility_witness() {
        let c = Ineq::gt(vec![r(2), r(-3)], r(1));
        assert!(c.satisfied_by(&[r(2), r(1)]));
        assert!(!c.satisfied_by(&[r(1), r(2)]));
        let [a, b] = Ineq::eq(vec![r(1), r(1)], r(-2));
        assert!(a.satisfied_by(&[r(1), r(1)]) && b.satisfied_by(&[r(1), r(1)]));
        assert_eq!(a.negated_coeffs(), b);
    }
}
