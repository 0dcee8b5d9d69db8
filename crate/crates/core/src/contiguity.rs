//! Contiguity matrices conti_l(α; z₀) for a one-point degenerate arrangement, assembled
//! from degenerate intersection matrices and ratios of maximal minors, together with the
//! closed-form inverse of R_l and the inverse factorizations of C, P_l and Q_l built on it.
//!
//! Families are tuple lists; positional replacement `a → b` is applied to every tuple
//! containing `a`, so corresponding elements of two families stay aligned.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arrangement::{index_family, Classification, CoeffMatrix, FamilySpec, IndexTuple};
use crate::cohomology::{
    gram_degenerate, orientation_sign, pairing_generic, CohomologyError, GramMatrix,
};
use crate::field::{Rat, Scalar};
use crate::linalg::{FractionFree, Matrix};

type Result<T> = std::result::Result<T, CohomologyError>;

/// Largest basis size for which symbolic contiguity matrices are attempted.
pub const SYMBOLIC_SIZE_LIMIT: usize = 6;

/// How the inverses C⁻¹ and P_l⁻¹ are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InversePath {
    /// Fraction-free Gauss–Jordan elimination.
    Elimination,
    /// Closed-form R⁻¹ and the inverse factorizations.
    Closed,
}

/// Data fixing a contiguity relation: z₀ with its vanishing tuple, j₀ ∈ J^van,
/// q ∉ J^van and the shift index l ≠ j₀.
#[derive(Clone, Debug, PartialEq)]
pub struct ContiguityContext {
    z0: CoeffMatrix,
    jvan: IndexTuple,
    j0: usize,
    q: usize,
    l: usize,
    base: Vec<IndexTuple>,
}

fn replace_in_family(fam: &[IndexTuple], old: usize, new: usize) -> Vec<IndexTuple> {
    fam.iter()
        .map(|t| {
            if t.contains(old) {
                t.replace(old, new).expect("replacement keeps the tuple valid")
            } else {
                t.clone()
            }
        })
        .collect()
}

impl ContiguityContext {
    pub fn new(z0: CoeffMatrix, j0: usize, q: usize, l: usize) -> Result<Self> {
        let jvan = match z0.classify() {
            Classification::OneDegenerate { jvan } => jvan,
            other => {
                return Err(CohomologyError::Precondition(format!(
                    "contiguity needs a one-point degenerate matrix, got {other:?}"
                )))
            }
        };
        let top = z0.top();
        if !jvan.contains(j0) {
            return Err(CohomologyError::Precondition(format!("j0 = {j0} is not in J^van = {jvan}")));
        }
        if q > top || jvan.contains(q) {
            return Err(CohomologyError::Precondition(format!("q = {q} must lie outside J^van = {jvan}")));
        }
        if l > top || l == j0 {
            return Err(CohomologyError::Precondition(format!("shift index l = {l} must differ from j0 and be ≤ {top}")));
        }
        let spec = FamilySpec::excluding_including(q, j0).without(jvan.clone());
        let base = index_family(z0.k(), z0.n(), &spec)?;
        Ok(ContiguityContext {
            z0,
            jvan,
            j0,
            q,
            l,
            base,
        })
    }

    /// The same data with a different shift index.
    pub fn with_shift(&self, l: usize) -> Result<Self> {
        ContiguityContext::new(self.z0.clone(), self.j0, self.q, l)
    }

    pub fn z0(&self) -> &CoeffMatrix {
        &self.z0
    }

    pub fn jvan(&self) -> &IndexTuple {
        &self.jvan
    }

    pub fn j0(&self) -> usize {
        self.j0
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.z0.k()
    }

    pub fn n(&self) -> usize {
        self.z0.n()
    }

    /// 𝒥° = {J : q ∉ J, j₀ ∈ J} − {J^van}, ascending tuples.
    pub fn base_family(&self) -> &[IndexTuple] {
        &self.base
    }

    /// ₗ𝒥°ⱼ₀: l replaced by q in 𝒥°.
    pub fn shifted_family(&self) -> Vec<IndexTuple> {
        replace_in_family(&self.base, self.l, self.q)
    }

    /// ⱼ₀𝒥°ₗ: j₀ replaced by l in ₗ𝒥°ⱼ₀ (aligned with it).
    pub fn swapped_family(&self) -> Vec<IndexTuple> {
        replace_in_family(&self.shifted_family(), self.j0, self.l)
    }

    /// α^(l) = α + e_l − e_{j₀}.
    pub fn shift_alpha<F: Scalar>(&self, alpha: &[F]) -> Vec<F> {
        let mut out = alpha.to_vec();
        out[self.l] = out[self.l].clone() + F::one();
        out[self.j0] = out[self.j0].clone() - F::one();
        out
    }

    /// D_l(z₀) = diag(|z₀⟨ⱼ₀J_l⟩| / |z₀⟨J⟩|) over J ∈ ₗ𝒥°ⱼ₀; rows ⱼ₀𝒥°ₗ, cols ₗ𝒥°ⱼ₀.
    pub fn diag_minor_ratio(&self) -> Result<GramMatrix<Rat>> {
        let cols = self.shifted_family();
        let rows = self.swapped_family();
        let mut d = Matrix::zeros(cols.len(), cols.len());
        for (i, (r, c)) in rows.iter().zip(&cols).enumerate() {
            let den = self.z0.minor(c);
            if den.is_zero() {
                return Err(CohomologyError::Precondition(format!("minor |z0<{c}>| vanishes")));
            }
            d.set(i, i, self.z0.minor(r) / den);
        }
        Ok(GramMatrix::new(rows, cols, d, 0))
    }

    /// C(α) = (ℐ₀(φ⟨I⟩, φ⟨J⟩))_{I,J ∈ 𝒥°}.
    pub fn c_matrix<F: Scalar>(&self, alpha: &[F]) -> Result<GramMatrix<F>> {
        gram_degenerate(alpha, &self.base, &self.base, &self.jvan)
    }

    /// P_l(α): rows ⱼ₀𝒥°ₗ, cols 𝒥°.
    pub fn p_matrix<F: Scalar>(&self, alpha: &[F]) -> Result<GramMatrix<F>> {
        gram_degenerate(alpha, &self.swapped_family(), &self.base, &self.jvan)
    }

    /// Q_l(α): rows ₗ𝒥°ⱼ₀, cols 𝒥°.
    pub fn q_matrix<F: Scalar>(&self, alpha: &[F]) -> Result<GramMatrix<F>> {
        gram_degenerate(alpha, &self.shifted_family(), &self.base, &self.jvan)
    }

    /// R_l(α): rows ⱼ₀𝒥°ₗ, cols ₗ𝒥°ⱼ₀.
    pub fn r_matrix<F: Scalar>(&self, alpha: &[F]) -> Result<GramMatrix<F>> {
        gram_degenerate(alpha, &self.swapped_family(), &self.shifted_family(), &self.jvan)
    }

    /// Closed form of R_l⁻¹ (rows ₗ𝒥°ⱼ₀, cols ⱼ₀𝒥°ₗ): diag(∏_{j∈J−{j₀}} α_j) plus, when
    /// l ∈ J^van, the entries (∏_{J^van−{j₀,l}} α_j / α_q)·α_{p₁}α_{p₂} at the tuples
    /// ₗJ^van_{p₁}, ₗJ^van_{p₂} (p₁, p₂ ∉ J^van ∪ {q}), oriented like the family tuples.
    pub fn r_inverse_closed<F: Scalar>(&self, alpha: &[F]) -> Result<GramMatrix<F>> {
        let rows = self.shifted_family();
        let cols = self.swapped_family();
        let size = rows.len();
        let mut m = Matrix::zeros(size, size);
        for (i, t) in rows.iter().enumerate() {
            let mut p = F::one();
            for &j in t.as_slice().iter().filter(|&&j| j != self.j0) {
                p = p * alpha[j].clone();
            }
            m.set(i, i, p);
        }
        if self.jvan.contains(self.l) {
            let mut scale = F::one();
            for &j in self.jvan.as_slice() {
                if j != self.j0 && j != self.l {
                    scale = scale * alpha[j].clone();
                }
            }
            let scale = scale.try_div(&alpha[self.q])?;
            // positions of the tuples ₗJ^van_p inside ₗ𝒥°ⱼ₀ with their orientation signs
            let slots: Vec<(usize, usize, i64)> = (0..=self.z0.top())
                .filter(|&p| !self.jvan.contains(p) && p != self.q)
                .map(|p| {
                    let target = self.jvan.replace(self.l, p).expect("p ∉ J^van");
                    let pos = rows
                        .iter()
                        .position(|t| t.same_set(&target))
                        .expect("ₗJ^van_p belongs to ₗ𝒥°ⱼ₀");
                    (p, pos, orientation_sign(&rows[pos], &target))
                })
                .collect();
            for &(p1, a, s1) in &slots {
                for &(p2, b, s2) in &slots {
                    let v = scale.clone() * alpha[p1].clone() * alpha[p2].clone() * F::from_int(s1 * s2);
                    let cur = m.get(a, b).clone();
                    m.set(a, b, cur + v);
                }
            }
        }
        Ok(GramMatrix::new(rows, cols, m, -(self.k() as i32)))
    }

    /// C⁻¹, P_l⁻¹ and Q_l⁻¹ through R_q⁻¹ and R_l⁻¹ in closed form:
    /// C⁻¹ = R_q⁻¹·G(ⱼ₀𝒥°_q, ⱼ₀𝒥°_q)·(R_q⁻¹)ᵀ,
    /// P_l⁻¹ = R_q⁻¹·G(ⱼ₀𝒥°_q, ₗ𝒥°ⱼ₀)·R_l⁻¹,
    /// Q_l⁻¹ = R_q⁻¹·G(ⱼ₀𝒥°_q, ⱼ₀𝒥°ₗ)·(R_l⁻¹)ᵀ.
    pub fn inverse_factorizations<F: Scalar>(&self, alpha: &[F]) -> Result<InverseFactors<F>> {
        let at_q = self.with_shift(self.q)?;
        let rq_inv = at_q.r_inverse_closed(alpha)?;
        let rl_inv = self.r_inverse_closed(alpha)?;
        let bq = at_q.swapped_family();
        let g = |cols: &[IndexTuple]| gram_degenerate(alpha, &bq, cols, &self.jvan);
        let c_inv = rq_inv.then(&g(&bq)?)?.then(&rq_inv.transpose())?;
        let p_inv = rq_inv.then(&g(&self.shifted_family())?)?.then(&rl_inv)?;
        let q_inv = rq_inv
            .then(&g(&self.swapped_family())?)?
            .then(&rl_inv.transpose())?;
        Ok(InverseFactors { c_inv, p_inv, q_inv })
    }

    /// The Schur-complement scalar c₂ of R_l bordered by φ^van (for l ∈ J^van), computed
    /// from generic pairings, and its closed form −α_q / ∏_{J^van} α_j.
    pub fn c2_check<F: Scalar>(&self, alpha: &[F]) -> Result<(F, F)> {
        let vv = pairing_generic(alpha, &self.jvan, &self.jvan)?;
        let mut c2 = vv;
        for (r, c) in self.swapped_family().iter().zip(self.shifted_family().iter()) {
            let d = pairing_generic(alpha, r, c)?;
            let u = pairing_generic(alpha, r, &self.jvan)?;
            let v = pairing_generic(alpha, &self.jvan, c)?;
            if !u.is_zero() && !v.is_zero() {
                c2 = c2 - (u * v).try_div(&d)?;
            }
        }
        let mut prod = F::one();
        for &j in self.jvan.as_slice() {
            prod = prod * alpha[j].clone();
        }
        let closed = (-alpha[self.q].clone()).try_div(&prod)?;
        Ok((c2, closed))
    }

    /// conti_l(α; z₀) = C(α^(l))·P_l(α^(l))⁻¹·D_l(z₀)·Q_l(α)·C(α)⁻¹.
    pub fn conti_matrix<F: FractionFree>(&self, alpha: &[F], path: InversePath) -> Result<GramMatrix<F>> {
        let shifted = self.shift_alpha(alpha);
        let d = self.diag_minor_ratio()?.map(F::from_rat);
        let (c_inv, p_inv_shifted) = match path {
            InversePath::Elimination => (
                self.c_matrix(alpha)?.inverse_fraction_free()?,
                self.p_matrix(&shifted)?.inverse_fraction_free()?,
            ),
            InversePath::Closed => (
                self.inverse_factorizations(alpha)?.c_inv,
                self.inverse_factorizations(&shifted)?.p_inv,
            ),
        };
        let out = self
            .c_matrix(&shifted)?
            .then(&p_inv_shifted)?
            .then(&d)?
            .then(&self.q_matrix(alpha)?)?
            .then(&c_inv)?;
        if out.power != 0 {
            return Err(CohomologyError::Alignment(format!(
                "unbalanced (2πi) powers: {}",
                out.power
            )));
        }
        Ok(out)
    }
}

/// Closed-form inverses of C, P_l and Q_l.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseFactors<F> {
    pub c_inv: GramMatrix<F>,
    pub p_inv: GramMatrix<F>,
    pub q_inv: GramMatrix<F>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::SpecialMatrix;
    use crate::field::{parse_rat, ParamContext};

    fn example_z0() -> CoeffMatrix {
        let x = vec![
            vec![parse_rat("0").unwrap(), parse_rat("1/7").unwrap()],
            vec![parse_rat("-2/9").unwrap(), parse_rat("3/11").unwrap()],
        ];
        SpecialMatrix::new(x).unwrap().coeff()
    }

    #[test]
    fn families_for_the_worked_example() {
        let ctx = ContiguityContext::new(example_z0(), 0, 5, 5).unwrap();
        assert_eq!(ctx.jvan().as_slice(), &[0, 2, 3]);
        let base: Vec<String> = ctx.base_family().iter().map(|t| t.to_string()).collect();
        assert_eq!(base, ["<0 1 2>", "<0 1 3>", "<0 1 4>", "<0 2 4>", "<0 3 4>"]);
        assert_eq!(ctx.shifted_family(), ctx.base_family());
        let ctx1 = ctx.with_shift(2).unwrap();
        let sh: Vec<String> = ctx1.shifted_family().iter().map(|t| t.to_string()).collect();
        assert_eq!(sh, ["<0 1 5>", "<0 1 3>", "<0 1 4>", "<0 5 4>", "<0 3 4>"]);
        let sw: Vec<String> = ctx1.swapped_family().iter().map(|t| t.to_string()).collect();
        assert_eq!(sw, ["<2 1 5>", "<2 1 3>", "<2 1 4>", "<2 5 4>", "<2 3 4>"]);
    }

    #[test]
    fn preconditions() {
        let z0 = example_z0();
        assert!(ContiguityContext::new(z0.clone(), 1, 5, 2).is_err()); // j0 ∉ J^van
        assert!(ContiguityContext::new(z0.clone(), 0, 2, 1).is_err()); // q ∈ J^van
        assert!(ContiguityContext::new(z0.clone(), 0, 5, 0).is_err()); // l = j0
        let generic = CoeffMatrix::random_generic(2, 2, 3);
        assert!(ContiguityContext::new(generic, 0, 5, 1).is_err());
    }

    #[test]
    fn r_inverse_closed_symbolic_small() {
        let ctx = ContiguityContext::new(example_z0(), 0, 5, 2).unwrap();
        let pc = ParamContext::alpha(2, 2);
        let a = pc.params();
        let r = ctx.r_matrix(&a).unwrap();
        let ri = ctx.r_inverse_closed(&a).unwrap();
        let prod = r.then(&ri).unwrap();
        assert!(prod.entries.is_identity());
        assert_eq!(prod.power, 0);
        let (c2, closed) = ctx.c2_check(&a).unwrap();
        assert_eq!(c2, closed);
    }
}
