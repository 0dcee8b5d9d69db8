//! Coefficient matrices of hyperplane arrangements, their maximal minors, the
//! generic / one-point-degenerate classification, index-tuple combinatorics and the
//! ε-perturbation that moves a degenerate matrix back into general position.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{parse_rat, rat_to_text, FieldError, Rat};
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ArrangementError {
    #[error("invalid index tuple: {0}")]
    InvalidTuple(String),
    #[error("invalid coefficient matrix: {0}")]
    InvalidMatrix(String),
    #[error("inconsistent family constraints: {0}")]
    Constraint(String),
    #[error("matrix is not one-point degenerate with the given vanishing tuple")]
    NotOneDegenerate,
    #[error("no stable perturbation found (ill-conditioned input)")]
    PerturbationFailed,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Sign of a linear form at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn of(r: &Rat) -> Sign {
        if r.is_zero() {
            Sign::Zero
        } else if r.is_positive() {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '-' => Some(Sign::Minus),
            '0' => Some(Sign::Zero),
            '+' => Some(Sign::Plus),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }
}

/// An ordered tuple of distinct column indices ⟨j₀ j₁ … j_k⟩.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexTuple(Vec<usize>);

impl TryFrom<Vec<usize>> for IndexTuple {
    type Error = ArrangementError;
    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        IndexTuple::new(v)
    }
}

impl From<IndexTuple> for Vec<usize> {
    fn from(t: IndexTuple) -> Self {
        t.0
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|j| j.to_string()).collect();
        write!(f, "<{}>", parts.join(" "))
    }
}

impl IndexTuple {
    /// Checks that the entries are pairwise distinct.
    pub fn new(v: Vec<usize>) -> Result<Self, ArrangementError> {
        for (i, a) in v.iter().enumerate() {
            if v[i + 1..].contains(a) {
                return Err(ArrangementError::InvalidTuple(format!("repeated index {a} in {v:?}")));
            }
        }
        Ok(IndexTuple(v))
    }

    /// Like [`IndexTuple::new`] but also checks length `k + 1` and range `0..=k+n+1`.
    pub fn checked(v: Vec<usize>, k: usize, n: usize) -> Result<Self, ArrangementError> {
        if v.len() != k + 1 {
            return Err(ArrangementError::InvalidTuple(format!(
                "{v:?} has length {} instead of {}",
                v.len(),
                k + 1
            )));
        }
        if let Some(bad) = v.iter().find(|&&j| j > k + n + 1) {
            return Err(ArrangementError::InvalidTuple(format!("index {bad} exceeds {}", k + n + 1)));
        }
        IndexTuple::new(v)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.contains(&j)
    }

    pub fn position(&self, j: usize) -> Option<usize> {
        self.0.iter().position(|&x| x == j)
    }

    pub fn sorted(&self) -> IndexTuple {
        let mut v = self.0.clone();
        v.sort_unstable();
        IndexTuple(v)
    }

    pub fn is_ascending(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    /// Equality as sets.
    pub fn same_set(&self, other: &IndexTuple) -> bool {
        self.len() == other.len() && self.0.iter().all(|j| other.contains(*j))
    }

    /// Number of shared indices.
    pub fn common(&self, other: &IndexTuple) -> usize {
        self.0.iter().filter(|j| other.contains(**j)).count()
    }

    /// Indices of `self` not in `other`, in the order of `self`.
    pub fn minus(&self, other: &IndexTuple) -> Vec<usize> {
        self.0.iter().copied().filter(|j| !other.contains(*j)).collect()
    }

    /// Sign (+1/−1) of the permutation sorting the tuple into ascending order.
    pub fn sort_sign(&self) -> i64 {
        let mut inv = 0usize;
        for i in 0..self.0.len() {
            for j in i + 1..self.0.len() {
                if self.0[i] > self.0[j] {
                    inv += 1;
                }
            }
        }
        if inv.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Positional replacement ⱼₗJ𝑞: `old` is replaced by `new` in place.
    pub fn replace(&self, old: usize, new: usize) -> Result<IndexTuple, ArrangementError> {
        let p = self
            .position(old)
            .ok_or_else(|| ArrangementError::InvalidTuple(format!("{old} is not in {self}")))?;
        if self.contains(new) {
            return Err(ArrangementError::InvalidTuple(format!("{new} is already in {self}")));
        }
        let mut v = self.0.clone();
        v[p] = new;
        Ok(IndexTuple(v))
    }
}

/// All ascending (k+1)-subsets of `0..=k+n+1`, in lexicographic order.
pub fn all_tuples(k: usize, n: usize) -> Vec<IndexTuple> {
    combinations(k + n + 2, k + 1).into_iter().map(IndexTuple).collect()
}

/// Ascending `r`-subsets of `0..m`, lexicographic.
pub fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > m {
        return out;
    }
    let mut c: Vec<usize> = (0..r).collect();
    loop {
        out.push(c.clone());
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < m - r + i {
                c[i] += 1;
                for t in i + 1..r {
                    c[t] = c[t - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binomial(m: usize, r: usize) -> usize {
    if r > m {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Membership constraints for [`index_family`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    /// Indices every member must contain.
    #[serde(default)]
    pub include: Vec<usize>,
    /// Indices no member may contain.
    #[serde(default)]
    pub exclude: Vec<usize>,
    /// Tuples removed from the family (compared as sets).
    #[serde(default)]
    pub remove: Vec<IndexTuple>,
}

impl FamilySpec {
    /// The family q𝒥p = {J | q ∉ J, p ∈ J}.
    pub fn excluding_including(q: usize, p: usize) -> Self {
        FamilySpec {
            include: vec![p],
            exclude: vec![q],
            remove: vec![],
        }
    }

    pub fn without(mut self, t: IndexTuple) -> Self {
        self.remove.push(t);
        self
    }
}

/// Deterministic ascending enumeration of the tuples satisfying `spec`.
pub fn index_family(k: usize, n: usize, spec: &FamilySpec) -> Result<Vec<IndexTuple>, ArrangementError> {
    let top = k + n + 1;
    for &j in spec.include.iter().chain(&spec.exclude) {
        if j > top {
            return Err(ArrangementError::Constraint(format!("index {j} exceeds {top}")));
        }
    }
    if let Some(j) = spec.include.iter().find(|j| spec.exclude.contains(j)) {
        return Err(ArrangementError::Constraint(format!("{j} is both required and excluded")));
    }
    let mut inc = spec.include.clone();
    inc.sort_unstable();
    inc.dedup();
    if inc.len() > k + 1 {
        return Err(ArrangementError::Constraint("too many required indices".into()));
    }
    Ok(all_tuples(k, n)
        .into_iter()
        .filter(|t| inc.iter().all(|&j| t.contains(j)))
        .filter(|t| spec.exclude.iter().all(|&j| !t.contains(j)))
        .filter(|t| spec.remove.iter().all(|r| !r.same_set(t)))
        .collect())
}

/// Result of scanning all maximal minors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum Classification {
    Generic,
    OneDegenerate {
        #[serde(rename = "Jvan")]
        jvan: IndexTuple,
    },
    Other {
        vanishing: Vec<IndexTuple>,
    },
}

/// A (k+1)×(k+n+2) coefficient matrix z with 0-th column (1,0,…,0)ᵀ.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMatrix {
    k: usize,
    n: usize,
    m: Matrix<Rat>,
}

#[derive(Serialize, Deserialize)]
struct CoeffMatrixText {
    k: usize,
    n: usize,
    rows: Vec<Vec<String>>,
}

impl CoeffMatrix {
    pub fn new(k: usize, n: usize, rows: Vec<Vec<Rat>>) -> Result<Self, ArrangementError> {
        if k == 0 || n == 0 {
            return Err(ArrangementError::InvalidMatrix("k and n must be positive".into()));
        }
        if rows.len() != k + 1 || rows.iter().any(|r| r.len() != k + n + 2) {
            return Err(ArrangementError::InvalidMatrix(format!(
                "expected {} rows of {} entries",
                k + 1,
                k + n + 2
            )));
        }
        for (i, r) in rows.iter().enumerate() {
            let want = if i == 0 { Rat::one() } else { Rat::zero() };
            if r[0] != want {
                return Err(ArrangementError::InvalidMatrix(
                    "column 0 must be (1, 0, ..., 0)".into(),
                ));
            }
        }
        Ok(CoeffMatrix {
            k,
            n,
            m: Matrix::from_rows(rows),
        })
    }

    /// Builds from integer/rational literals `(p, q)`.
    pub fn from_ints(k: usize, n: usize, rows: &[Vec<i64>]) -> Result<Self, ArrangementError> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| Rat::from_integer(BigInt::from(v))).collect())
            .collect();
        CoeffMatrix::new(k, n, rows)
    }

    pub fn from_json(s: &str) -> Result<Self, ArrangementError> {
        let t: CoeffMatrixText =
            serde_json::from_str(s).map_err(|e| ArrangementError::InvalidMatrix(e.to_string()))?;
        let rows = t
            .rows
            .iter()
            .map(|r| r.iter().map(|v| parse_rat(v)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        CoeffMatrix::new(t.k, t.n, rows)
    }

    /// CSV of rationals (one matrix row per line); `k` and `n` are read off the shape.
    pub fn from_csv(s: &str) -> Result<Self, ArrangementError> {
        let rows: Vec<Vec<Rat>> = s
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.split(',').map(parse_rat).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let k = rows.len().saturating_sub(1);
        let cols = rows.first().map_or(0, |r| r.len());
        if k == 0 || cols < k + 3 {
            return Err(ArrangementError::InvalidMatrix("matrix too small".into()));
        }
        CoeffMatrix::new(k, cols - k - 2, rows)
    }

    pub fn to_json(&self) -> String {
        let t = CoeffMatrixText {
            k: self.k,
            n: self.n,
            rows: self.m.to_rows().iter().map(|r| r.iter().map(rat_to_text).collect()).collect(),
        };
        serde_json::to_string_pretty(&t).expect("serializable")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of columns minus one, i.e. the largest column index.
    pub fn top(&self) -> usize {
        self.k + self.n + 1
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rat {
        self.m.get(i, j)
    }

    pub fn matrix(&self) -> &Matrix<Rat> {
        &self.m
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..=self.k).map(|i| self.m.get(i, j).clone()).collect()
    }

    fn check_tuple(&self, j: &IndexTuple) {
        assert_eq!(j.len(), self.k + 1, "tuple {j} has the wrong length");
        assert!(j.as_slice().iter().all(|&x| x <= self.top()), "tuple {j} out of range");
    }

    /// |z⟨J⟩| with columns in tuple order.
    pub fn minor(&self, j: &IndexTuple) -> Rat {
        self.check_tuple(j);
        self.m.select_cols(j.as_slice()).det()
    }

    /// Scans all C(k+n+2, k+1) maximal minors.
    pub fn classify(&self) -> Classification {
        let vanishing: Vec<IndexTuple> = all_tuples(self.k, self.n)
            .into_par_iter()
            .filter(|t| self.minor(t).is_zero())
            .collect();
        match vanishing.len() {
            0 => Classification::Generic,
            1 => Classification::OneDegenerate {
                jvan: vanishing.into_iter().next().expect("one element"),
            },
            _ => Classification::Other { vanishing },
        }
    }

    /// Value of L_j at the affine point t = (t₁,…,t_k) (t₀ = 1).
    pub fn eval_form(&self, j: usize, t: &[Rat]) -> Rat {
        assert_eq!(t.len(), self.k, "affine point has the wrong dimension");
        let mut v = self.m.get(0, j).clone();
        for (i, ti) in t.iter().enumerate() {
            v += ti * self.m.get(i + 1, j);
        }
        v
    }

    /// Sign of L_j at the affine point t.
    pub fn linear_form_sign(&self, j: usize, t: &[Rat]) -> Sign {
        Sign::of(&self.eval_form(j, t))
    }

    /// Intersection point of the affine hyperplanes L_j = 0 for the `k` indices in `js`
    /// (all in `1..=k+n+1`), if it is a single point.
    pub fn vertex(&self, js: &[usize]) -> Option<Vec<Rat>> {
        assert_eq!(js.len(), self.k);
        // Σ_i t_i z_{ij} = −z_{0j}
        let a = Matrix::from_fn(self.k, self.k, |r, c| self.m.get(c + 1, js[r]).clone());
        let inv = a.inverse().ok()?;
        let rhs: Vec<Rat> = js.iter().map(|&j| -self.m.get(0, j).clone()).collect();
        Some(inv.mul_vec(&rhs))
    }

    /// Signs of all affine forms L₁…L_{k+n+1} at every vertex P(l₁…l_k).
    pub fn vertex_signs(&self) -> Vec<Option<Vec<Sign>>> {
        combinations(self.top(), self.k)
            .into_iter()
            .map(|c| {
                let js: Vec<usize> = c.iter().map(|x| x + 1).collect();
                self.vertex(&js).map(|p| {
                    (1..=self.top()).map(|j| self.linear_form_sign(j, &p)).collect()
                })
            })
            .collect()
    }

    /// Adds `delta` to column `j` (never column 0).
    pub fn with_column_shift(&self, j: usize, delta: &[Rat]) -> CoeffMatrix {
        assert!(j != 0 && delta.len() == self.k + 1);
        let mut m = self.m.clone();
        for (i, d) in delta.iter().enumerate() {
            let v = m.get(i, j) + d;
            m.set(i, j, v);
        }
        CoeffMatrix {
            k: self.k,
            n: self.n,
            m,
        }
    }

    /// The perturbation of column j_k by (ε, ε², …, ε^{k+1}) with ε = 2^{−m}.
    pub fn perturb_with(&self, jvan: &IndexTuple, m: u32) -> CoeffMatrix {
        let jk = *jvan.sorted().as_slice().last().expect("nonempty tuple");
        let eps = Rat::new(BigInt::one(), BigInt::one() << m);
        let mut p = eps.clone();
        let mut delta = Vec::with_capacity(self.k + 1);
        for _ in 0..=self.k {
            delta.push(p.clone());
            p *= &eps;
        }
        self.with_column_shift(jk, &delta)
    }

    /// Moves a one-point-degenerate matrix into general position by perturbing the
    /// last column of J^van, halving ε until the result is generic and the sign
    /// pattern at every vertex is stable under two further halvings.
    pub fn perturb(&self, jvan: &IndexTuple) -> Result<(CoeffMatrix, u32), ArrangementError> {
        match self.classify() {
            Classification::OneDegenerate { jvan: found } if found.same_set(jvan) => {}
            _ => return Err(ArrangementError::NotOneDegenerate),
        }
        const MAX_HALVINGS: u32 = 80;
        let candidate = |m: u32| {
            let z = self.perturb_with(jvan, m);
            if z.classify() == Classification::Generic {
                Some(z.vertex_signs())
            } else {
                None
            }
        };
        let mut window = [candidate(1), candidate(2), candidate(3)];
        for m in 1..=MAX_HALVINGS {
            if window.iter().all(|w| w.is_some()) && window[0] == window[1] && window[1] == window[2] {
                return Ok((self.perturb_with(jvan, m), m));
            }
            window = [window[1].take(), window[2].take(), candidate(m + 3)];
        }
        Err(ArrangementError::PerturbationFailed)
    }
}

impl CoeffMatrix {
    /// A random generic matrix with small integer entries, reproducible from `seed`.
    pub fn random_generic(k: usize, n: usize, seed: u64) -> CoeffMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        loop {
            let rows: Vec<Vec<Rat>> = (0..=k)
                .map(|i| {
                    (0..k + n + 2)
                        .map(|j| {
                            let v: i64 = match (i, j) {
                                (0, 0) => 1,
                                (_, 0) => 0,
                                _ => rng.gen_range(-12..=12),
                            };
                            Rat::from_integer(BigInt::from(v))
                        })
                        .collect()
                })
                .collect();
            let z = CoeffMatrix::new(k, n, rows).expect("well-formed");
            if z.classify() == Classification::Generic {
                return z;
            }
        }
    }

    /// A random one-point-degenerate matrix: a random generic matrix whose column
    /// max(J^van) is replaced by a random combination of the other columns of J^van.
    pub fn random_one_degenerate(k: usize, n: usize, seed: u64) -> (CoeffMatrix, IndexTuple) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0de9);
        let tuples = all_tuples(k, n);
        for attempt in 0u64.. {
            let jvan = tuples[rng.gen_range(0..tuples.len())].clone();
            let base = CoeffMatrix::random_generic(k, n, seed.wrapping_mul(31).wrapping_add(attempt));
            let js = jvan.as_slice();
            let last = js[k];
            let mut col = vec![Rat::zero(); k + 1];
            for &j in &js[..k] {
                let mut c: i64 = 0;
                while c == 0 {
                    c = rng.gen_range(-4..=4);
                }
                let c = Rat::from_integer(BigInt::from(c));
                for (i, e) in col.iter_mut().enumerate() {
                    *e += &c * base.entry(i, j);
                }
            }
            let delta: Vec<Rat> = col
                .iter()
                .enumerate()
                .map(|(i, v)| v - base.entry(i, last))
                .collect();
            let z = base.with_column_shift(last, &delta);
            if z.classify() == (Classification::OneDegenerate { jvan: jvan.clone() }) {
                return (z, jvan);
            }
        }
        unreachable!("the attempt loop is unbounded")
    }
}

/// The matrix x̃ built from a k×n matrix x:
/// row 0 = (1, 0…0, 1…1, 1), row i = (0, e_i, x_{i1}…x_{in}, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct SpecialMatrix {
    k: usize,
    n: usize,
    x: Matrix<Rat>,
}

impl SpecialMatrix {
    pub fn new(x: Vec<Vec<Rat>>) -> Result<Self, ArrangementError> {
        let k = x.len();
        let n = x.first().map_or(0, |r| r.len());
        if k == 0 || n == 0 || x.iter().any(|r| r.len() != n) {
            return Err(ArrangementError::InvalidMatrix("x must be a nonempty k×n matrix".into()));
        }
        Ok(SpecialMatrix {
            k,
            n,
            x: Matrix::from_rows(x),
        })
    }

    pub fn x(&self) -> &Matrix<Rat> {
        &self.x
    }

    pub fn coeff(&self) -> CoeffMatrix {
        let (k, n) = (self.k, self.n);
        let rows = (0..=k)
            .map(|i| {
                (0..k + n + 2)
                    .map(|j| {
                        if j <= k {
                            if i == j {
                                Rat::one()
                            } else {
                                Rat::zero()
                            }
                        } else if j == k + n + 1 || i == 0 {
                            Rat::one()
                        } else {
                            self.x.get(i - 1, j - k - 1).clone()
                        }
                    })
                    .collect()
            })
            .collect();
        CoeffMatrix::new(k, n, rows).expect("x̃ has the right shape")
    }

    /// J^van = ⟨0 1 … ı−1 k+ȷ ı+1 … k⟩ for a zero cell (ı, ȷ) (1-based).
    pub fn zero_cell_tuple(k: usize, i: usize, j: usize) -> IndexTuple {
        let mut v: Vec<usize> = (0..=k).collect();
        v[i] = k + j;
        IndexTuple(v)
    }
}
