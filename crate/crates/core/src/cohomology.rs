//! Intersection numbers of logarithmic forms φ⟨J⟩ on twisted cohomology, for arrangements
//! in general position and (through the vanishing-cocycle projection) for one-point
//! degenerate ones; degenerate bases and the determinant identities certifying them.
//!
//! Every pairing is a function of an exponent vector `alpha` of length `k + n + 2`
//! over any [`Scalar`]: pass `ParamContext::params()` for symbolic values, a rational
//! point for evaluated values, or a shifted vector for α + e_l − e_{j₀}. All values
//! carry an implicit factor (2πi)^k which is never materialized.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{index_family, ArrangementError, FamilySpec, IndexTuple};
use crate::field::{FieldError, ParamContext, Rat, RatFunc, Scalar};
use crate::linalg::{FractionFree, LinalgError, Matrix};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CohomologyError {
    #[error("the vanishing tuple {0} cannot be paired in the degenerate space")]
    VanishingArgument(IndexTuple),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("family alignment mismatch: {0}")]
    Alignment(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T> = std::result::Result<T, CohomologyError>;

/// Sign of the permutation taking sequence `a` to sequence `b` (same elements).
fn permutation_sign(a: &[usize], b: &[usize]) -> i64 {
    debug_assert_eq!(a.len(), b.len());
    let pos: Vec<usize> = a
        .iter()
        .map(|x| b.iter().position(|y| y == x).expect("same elements"))
        .collect();
    let mut inv = 0;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            if pos[i] > pos[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Orientation sign between two tuples with the same underlying set.
pub fn orientation_sign(a: &IndexTuple, b: &IndexTuple) -> i64 {
    assert!(a.same_set(b));
    permutation_sign(a.as_slice(), b.as_slice())
}

fn check_alpha<F>(alpha: &[F], t: &IndexTuple) -> Result<()> {
    if let Some(bad) = t.as_slice().iter().find(|&&j| j >= alpha.len()) {
        return Err(CohomologyError::Precondition(format!(
            "index {bad} of {t} has no exponent"
        )));
    }
    Ok(())
}

fn product<F: Scalar>(alpha: &[F], idx: impl IntoIterator<Item = usize>) -> F {
    idx.into_iter().fold(F::one(), |acc, j| acc * alpha[j].clone())
}

/// ℐᶜ(φ⟨I⟩, φ⟨J⟩) / (2πi)^k for an arrangement in general position.
///
/// Equal sets: Σ_{j∈J} α_j / ∏_{j∈J} α_j; sets sharing k indices: (−1)^{p+q} / ∏_{I∩J} α_j
/// with I − {i_p} = J − {j_q}; otherwise 0. The formula is taken literally for tuples
/// whose shared indices appear in the same relative order; for arbitrary orders the
/// permutation sign between the two shared sequences is applied as well, so the value
/// is alternating in each argument.
pub fn pairing_generic<F: Scalar>(alpha: &[F], i: &IndexTuple, j: &IndexTuple) -> Result<F> {
    check_alpha(alpha, i)?;
    check_alpha(alpha, j)?;
    if i.len() != j.len() {
        return Err(CohomologyError::Precondition(format!("{i} and {j} differ in length")));
    }
    let k = i.len() - 1;
    let common = i.common(j);
    if common == k + 1 {
        let s: F = j.as_slice().iter().fold(F::zero(), |acc, &x| acc + alpha[x].clone());
        let v = s.try_div(&product(alpha, j.as_slice().iter().copied()))?;
        return Ok(signed(v, orientation_sign(i, j)));
    }
    if common != k {
        return Ok(F::zero());
    }
    let p = i.as_slice().iter().position(|x| !j.contains(*x)).expect("one index differs");
    let q = j.as_slice().iter().position(|x| !i.contains(*x)).expect("one index differs");
    let shared_i: Vec<usize> = i.as_slice().iter().copied().filter(|x| j.contains(*x)).collect();
    let shared_j: Vec<usize> = j.as_slice().iter().copied().filter(|x| i.contains(*x)).collect();
    let mut sign = if (p + q) % 2 == 0 { 1 } else { -1 };
    sign *= permutation_sign(&shared_i, &shared_j);
    let v = product(alpha, shared_i.iter().copied()).try_inv()?;
    Ok(signed(v, sign))
}

fn signed<F: Scalar>(v: F, s: i64) -> F {
    if s < 0 {
        -v
    } else {
        v
    }
}

/// ℐᶜ₀ between the limits of φ⟨I⟩ and φ⟨J⟩ in the one-point degenerate space:
/// ℐ(I,J) − ℐ(I,J^van)·ℐ(J^van,J)/ℐ(J^van,J^van).
pub fn pairing_degenerate<F: Scalar>(
    alpha: &[F],
    i: &IndexTuple,
    j: &IndexTuple,
    jvan: &IndexTuple,
) -> Result<F> {
    if i.same_set(jvan) {
        return Err(CohomologyError::VanishingArgument(i.clone()));
    }
    if j.same_set(jvan) {
        return Err(CohomologyError::VanishingArgument(j.clone()));
    }
    let g = pairing_generic(alpha, i, j)?;
    let a = pairing_generic(alpha, i, jvan)?;
    let b = pairing_generic(alpha, jvan, j)?;
    if a.is_zero() || b.is_zero() {
        return Ok(g);
    }
    let vv = pairing_generic(alpha, jvan, jvan)?;
    Ok(g - (a * b).try_div(&vv)?)
}

/// Matrix of pairings indexed by two tuple families, with an implicit (2πi)^power.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix<F> {
    pub rows: Vec<IndexTuple>,
    pub cols: Vec<IndexTuple>,
    pub entries: Matrix<F>,
    /// Exponent of the implicit (2πi) factor.
    pub power: i32,
}

impl<F: Scalar> GramMatrix<F> {
    pub fn new(rows: Vec<IndexTuple>, cols: Vec<IndexTuple>, entries: Matrix<F>, power: i32) -> Self {
        assert_eq!(entries.rows(), rows.len());
        assert_eq!(entries.cols(), cols.len());
        GramMatrix {
            rows,
            cols,
            entries,
            power,
        }
    }

    pub fn size(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }

    /// Product, asserting that the column family of `self` is the row family of `other`.
    pub fn then(&self, other: &GramMatrix<F>) -> Result<GramMatrix<F>> {
        if self.cols != other.rows {
            return Err(CohomologyError::Alignment(format!(
                "column family [{}] does not match row family [{}]",
                join(&self.cols),
                join(&other.rows)
            )));
        }
        Ok(GramMatrix {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            entries: self.entries.try_mul(&other.entries)?,
            power: self.power + other.power,
        })
    }

    pub fn transpose(&self) -> GramMatrix<F> {
        GramMatrix {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            entries: self.entries.transpose(),
            power: self.power,
        }
    }

    /// Inverse by Gauss–Jordan elimination; row and column families swap.
    pub fn inverse(&self) -> Result<GramMatrix<F>> {
        Ok(GramMatrix {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            entries: self.entries.inverse()?,
            power: -self.power,
        })
    }

    pub fn det(&self) -> F {
        self.entries.det()
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> GramMatrix<G> {
        GramMatrix {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self.entries.map(f),
            power: self.power,
        }
    }
}

impl<F: FractionFree> GramMatrix<F> {
    /// Inverse by fraction-free elimination; row and column families swap.
    pub fn inverse_fraction_free(&self) -> Result<GramMatrix<F>> {
        Ok(GramMatrix {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            entries: self.entries.inverse_fraction_free()?,
            power: -self.power,
        })
    }
}

fn join(f: &[IndexTuple]) -> String {
    f.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

/// JSON form of a Gram matrix: families plus entries as canonical text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramJson {
    pub rows: Vec<IndexTuple>,
    pub cols: Vec<IndexTuple>,
    pub two_pi_i_power: i32,
    pub entries: Vec<Vec<String>>,
}

impl GramMatrix<RatFunc> {
    pub fn to_json(&self, ctx: &ParamContext) -> GramJson {
        GramJson {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            two_pi_i_power: self.power,
            entries: self.entries.to_rows().iter().map(|r| r.iter().map(|v| ctx.format(v)).collect()).collect(),
        }
    }

    pub fn from_json(j: &GramJson, ctx: &ParamContext) -> Result<Self> {
        let rows = j
            .entries
            .iter()
            .map(|r| r.iter().map(|s| ctx.parse(s)).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if rows.len() != j.rows.len() || rows.iter().any(|r| r.len() != j.cols.len()) {
            return Err(CohomologyError::Alignment("entry shape does not match families".into()));
        }
        Ok(GramMatrix::new(j.rows.clone(), j.cols.clone(), Matrix::from_rows(rows), j.two_pi_i_power))
    }
}

impl GramMatrix<Rat> {
    pub fn to_json(&self) -> GramJson {
        GramJson {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            two_pi_i_power: self.power,
            entries: self
                .entries
                .to_rows()
                .iter()
                .map(|r| r.iter().map(crate::field::rat_to_text).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &GramJson) -> Result<Self> {
        let rows = j
            .entries
            .iter()
            .map(|r| r.iter().map(|s| crate::field::parse_rat(s)).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if rows.len() != j.rows.len() || rows.iter().any(|r| r.len() != j.cols.len()) {
            return Err(CohomologyError::Alignment("entry shape does not match families".into()));
        }
        Ok(GramMatrix::new(j.rows.clone(), j.cols.clone(), Matrix::from_rows(rows), j.two_pi_i_power))
    }
}

fn gram_with<F: Scalar>(
    rows: &[IndexTuple],
    cols: &[IndexTuple],
    f: impl Fn(&IndexTuple, &IndexTuple) -> Result<F> + Sync,
) -> Result<Matrix<F>> {
    let cells: Vec<(usize, usize)> = (0..rows.len()).flat_map(|i| (0..cols.len()).map(move |j| (i, j))).collect();
    let vals: Vec<F> = cells
        .par_iter()
        .map(|&(i, j)| f(&rows[i], &cols[j]))
        .collect::<Result<_>>()?;
    let c = cols.len();
    Ok(Matrix::from_fn(rows.len(), c, |i, j| vals[i * c + j].clone()))
}

/// Gram matrix of generic pairings.
pub fn gram_generic<F: Scalar>(alpha: &[F], rows: &[IndexTuple], cols: &[IndexTuple]) -> Result<GramMatrix<F>> {
    let k = rows.first().or(cols.first()).map_or(0, |t| t.len() as i32 - 1);
    let m = gram_with(rows, cols, |i, j| pairing_generic(alpha, i, j))?;
    Ok(GramMatrix::new(rows.to_vec(), cols.to_vec(), m, k))
}

/// Gram matrix of degenerate pairings.
pub fn gram_degenerate<F: Scalar>(
    alpha: &[F],
    rows: &[IndexTuple],
    cols: &[IndexTuple],
    jvan: &IndexTuple,
) -> Result<GramMatrix<F>> {
    let k = jvan.len() as i32 - 1;
    let m = gram_with(rows, cols, |i, j| pairing_degenerate(alpha, i, j, jvan))?;
    Ok(GramMatrix::new(rows.to_vec(), cols.to_vec(), m, k))
}

/// Which twisted cohomology group (∇^{+α} or ∇^{−α}) a class lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// A cohomology class Σ c_J φ⟨J⟩ over a declared family of tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomClass<F> {
    pub family: Vec<IndexTuple>,
    pub coords: Vec<F>,
    pub side: Side,
}

impl<F: Scalar> fmt::Display for CohomClass<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, c) in self.family.iter().zip(&self.coords) {
            write!(f, "{c:?}·φ{t} ")?;
        }
        Ok(())
    }
}

impl<F: Scalar> CohomClass<F> {
    pub fn new(family: Vec<IndexTuple>, coords: Vec<F>, side: Side) -> Self {
        assert_eq!(family.len(), coords.len(), "coordinate count must match the family");
        CohomClass { family, coords, side }
    }

    /// The single form φ⟨J⟩.
    pub fn basis(j: &IndexTuple, side: Side) -> Self {
        CohomClass::new(vec![j.clone()], vec![F::one()], side)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Coefficient of φ⟨J⟩ (tuples compared as sets, with orientation sign).
    pub fn coefficient(&self, j: &IndexTuple) -> F {
        self.family
            .iter()
            .zip(&self.coords)
            .filter(|(t, _)| t.same_set(j))
            .fold(F::zero(), |acc, (t, c)| acc + signed(c.clone(), orientation_sign(t, j)))
    }

    fn add_multiple(&mut self, j: &IndexTuple, c: F) {
        if let Some(pos) = self.family.iter().position(|t| t.same_set(j)) {
            let s = orientation_sign(&self.family[pos], j);
            self.coords[pos] = self.coords[pos].clone() + signed(c, s);
        } else {
            self.family.push(j.clone());
            self.coords.push(c);
        }
    }

    /// Drops the φ⟨J^van⟩ component: the limit map onto the degenerate space, where
    /// the vanishing cocycle is zero.
    pub fn limit(&self, jvan: &IndexTuple) -> CohomClass<F> {
        let (family, coords) = self
            .family
            .iter()
            .zip(&self.coords)
            .filter(|(t, _)| !t.same_set(jvan))
            .map(|(t, c)| (t.clone(), c.clone()))
            .unzip();
        CohomClass {
            family,
            coords,
            side: self.side,
        }
    }
}

/// Generic intersection pairing of two classes on opposite sides (bilinear extension).
pub fn pair_classes<F: Scalar>(alpha: &[F], a: &CohomClass<F>, b: &CohomClass<F>) -> Result<F> {
    if a.side == b.side {
        return Err(CohomologyError::Precondition(
            "the pairing is between the +α and −α sides".into(),
        ));
    }
    let mut acc = F::zero();
    for (i, ca) in a.family.iter().zip(&a.coords) {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.family.iter().zip(&b.coords) {
            if cb.is_zero() {
                continue;
            }
            let g = pairing_generic(alpha, i, j)?;
            if !g.is_zero() {
                acc = acc + ca.clone() * cb.clone() * g;
            }
        }
    }
    Ok(acc)
}

/// Degenerate pairing of two classes whose families avoid J^van (bilinear extension).
pub fn pair_classes_degenerate<F: Scalar>(
    alpha: &[F],
    a: &CohomClass<F>,
    b: &CohomClass<F>,
    jvan: &IndexTuple,
) -> Result<F> {
    if a.side == b.side {
        return Err(CohomologyError::Precondition(
            "the pairing is between the +α and −α sides".into(),
        ));
    }
    let mut acc = F::zero();
    for (i, ca) in a.family.iter().zip(&a.coords) {
        for (j, cb) in b.family.iter().zip(&b.coords) {
            if ca.is_zero() || cb.is_zero() {
                continue;
            }
            acc = acc + ca.clone() * cb.clone() * pairing_degenerate(alpha, i, j, jvan)?;
        }
    }
    Ok(acc)
}

/// Projection onto the orthogonal complement of the vanishing cocycle:
/// v ↦ v − (ℐ(v, φ^van_∓)/ℐ(φ^van_±, φ^van_∓))·φ^van_±.
pub fn project_vanishing<F: Scalar>(alpha: &[F], v: &CohomClass<F>, jvan: &IndexTuple) -> Result<CohomClass<F>> {
    let van = CohomClass::basis(jvan, v.side.opposite());
    let num = pair_classes(alpha, v, &van)?;
    let vv = pairing_generic(alpha, jvan, jvan)?;
    let mut out = v.clone();
    if !num.is_zero() {
        out.add_multiple(jvan, -num.try_div(&vv)?);
    } else if !out.family.iter().any(|t| t.same_set(jvan)) {
        out.add_multiple(jvan, F::zero());
    }
    Ok(out)
}

/// The degenerate bases: kinds 1–3 are the three β-nbc type families built from
/// J^van = ⟨j₀ … j_k⟩, kind 4 is the pair of aligned families l′𝒥_l / l𝒥_{l′}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BasisKind {
    /// ⱼₗ𝒥_p − {ⱼₗJ^van_p}; `l` is a position in J^van, p ∉ J^van.
    One { l: usize, p: usize },
    /// q𝒥_p − {ⱼₗJ^van_p}; p, q ∉ J^van, p ≠ q.
    Two { l: usize, p: usize, q: usize },
    /// q𝒥_{j_l} − {J^van}; q ∉ J^van.
    Three { l: usize, q: usize },
    /// rows l′𝒥_l − {l′J^van_p}, columns l𝒥_{l′} − {lJ^van_p} aligned by J ↔ ₗJ_{l′};
    /// `l`, `l2` are elements of J^van, p ∉ J^van.
    Four { p: usize, l: usize, l2: usize },
}

/// A basis family together with the family of its dual-side partner (aligned).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisFamilies {
    pub rows: Vec<IndexTuple>,
    pub cols: Vec<IndexTuple>,
}

pub fn basis_degenerate(k: usize, n: usize, jvan: &IndexTuple, kind: BasisKind) -> Result<BasisFamilies> {
    let top = k + n + 1;
    let jv = jvan.sorted();
    let bad = |m: &str| Err(CohomologyError::Precondition(m.to_string()));
    let outside = |x: usize| x <= top && !jv.contains(x);
    let fam = |include: usize, exclude: usize, remove: IndexTuple| {
        index_family(
            k,
            n,
            &FamilySpec {
                include: vec![include],
                exclude: vec![exclude],
                remove: vec![remove],
            },
        )
    };
    match kind {
        BasisKind::One { l, p } => {
            if l > k || !outside(p) {
                return bad("kind 1 needs l ≤ k and p ∉ J^van");
            }
            let jl = jv.as_slice()[l];
            let f = fam(p, jl, jv.replace(jl, p)?)?;
            Ok(BasisFamilies { rows: f.clone(), cols: f })
        }
        BasisKind::Two { l, p, q } => {
            if l > k || !outside(p) || !outside(q) || p == q {
                return bad("kind 2 needs l ≤ k and distinct p, q ∉ J^van");
            }
            let jl = jv.as_slice()[l];
            let f = fam(p, q, jv.replace(jl, p)?)?;
            Ok(BasisFamilies { rows: f.clone(), cols: f })
        }
        BasisKind::Three { l, q } => {
            if l > k || !outside(q) {
                return bad("kind 3 needs l ≤ k and q ∉ J^van");
            }
            let jl = jv.as_slice()[l];
            let f = fam(jl, q, jv.clone())?;
            Ok(BasisFamilies { rows: f.clone(), cols: f })
        }
        BasisKind::Four { p, l, l2 } => {
            if !outside(p) || !jv.contains(l) || !jv.contains(l2) || l == l2 {
                return bad("kind 4 needs p ∉ J^van and distinct l, l′ ∈ J^van");
            }
            let rows = fam(l, l2, jv.replace(l2, p)?)?;
            let cols = rows.iter().map(|t| t.replace(l, l2)).collect::<std::result::Result<Vec<_>, _>>()?;
            Ok(BasisFamilies { rows, cols })
        }
    }
}

/// The two evaluations of |C| from the proof that kind-4 families are bases, together
/// with c₂ and its closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct DetIdentity<F> {
    /// |C| computed directly.
    pub det_c: F,
    /// ℐ(φ^van₊, φ^van₋)·|C₀|.
    pub via_c0: F,
    /// c₂·|C₁|.
    pub via_c1: F,
    pub c2: F,
    /// −α_p / ∏_{j∈J^van} α_j.
    pub c2_closed: F,
}

impl<F: Scalar> DetIdentity<F> {
    pub fn holds(&self) -> bool {
        self.det_c == self.via_c0 && self.det_c == self.via_c1 && self.c2 == self.c2_closed
    }
}

/// Computes the determinant identity |C| = ℐ(φ^van₊,φ^van₋)·|C₀| = c₂·|C₁|.
pub fn det_identity_check<F: Scalar>(
    alpha: &[F],
    k: usize,
    n: usize,
    jvan: &IndexTuple,
    p: usize,
    l: usize,
    l2: usize,
) -> Result<DetIdentity<F>> {
    let fams = basis_degenerate(k, n, jvan, BasisKind::Four { p, l, l2 })?;
    let jv = jvan.sorted();
    let mut rows = vec![jv.clone()];
    rows.extend(fams.rows.iter().cloned());
    let mut cols = vec![jv.clone()];
    cols.extend(fams.cols.iter().cloned());
    let c = gram_generic(alpha, &rows, &cols)?;
    let c0 = gram_degenerate(alpha, &fams.rows, &fams.cols, &jv)?;
    let c1 = gram_generic(alpha, &fams.rows, &fams.cols)?;
    let vv = pairing_generic(alpha, &jv, &jv)?;
    // C₁ is diagonal by construction
    for i in 0..c1.rows.len() {
        for j in 0..c1.cols.len() {
            if i != j && !c1.entries.get(i, j).is_zero() {
                return Err(CohomologyError::Alignment(format!(
                    "C₁ is not diagonal at ({}, {})",
                    c1.rows[i], c1.cols[j]
                )));
            }
        }
    }
    let mut c2 = vv.clone();
    for (idx, jrow) in fams.rows.iter().enumerate() {
        let a = pairing_generic(alpha, &jv, &fams.cols[idx])?;
        let b = pairing_generic(alpha, jrow, &jv)?;
        if a.is_zero() || b.is_zero() {
            continue;
        }
        c2 = c2 - (a * b).try_div(c1.entries.get(idx, idx))?;
    }
    let det_c1 = (0..c1.rows.len()).fold(F::one(), |acc, i| acc * c1.entries.get(i, i).clone());
    let c2_closed = (-alpha[p].clone()).try_div(&product(alpha, jv.as_slice().iter().copied()))?;
    Ok(DetIdentity {
        det_c: c.det(),
        via_c0: vv * c0.det(),
        via_c1: c2.clone() * det_c1,
        c2,
        c2_closed,
    })
}
