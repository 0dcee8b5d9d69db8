//! Chambers of real arrangements, the vanishing chamber of a perturbed one-point
//! degenerate arrangement and its orthogonal complement, limits of chambers as the
//! perturbation is removed, and the degenerate homology pairing expressed through an
//! oracle for the generic pairing of loaded chambers.
//!
//! Hyperplanes are indexed `1..=k+n+1`; `L_0 = t_0` is the hyperplane at infinity of
//! the standard chart. Feasibility questions are decided exactly with [`crate::fm`].

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::{Classification, CoeffMatrix, IndexTuple, Sign};
use crate::cohomology::Side;
use crate::field::{FieldError, ParamContext, Rat, RatFunc};
use crate::fm::{feasible, has_nonzero_solution, Ineq};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HomologyError {
    #[error("arrangement is neither generic nor one-point degenerate")]
    NotSupported,
    #[error("vanishing chamber not found or not unique ({0} candidates)")]
    VanishingChamber(usize),
    #[error("exceptional chamber D' not found or not unique ({0} candidates)")]
    Exceptional(usize),
    #[error("invalid chamber id `{0}`")]
    ChamberId(String),
    #[error("oracle has no value for ({0}, {1})")]
    OracleGap(String, String),
    #[error("loaded cycles must be paired as (+, -)")]
    Sides,
    #[error("invalid oracle table: {0}")]
    Oracle(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

type Result<T> = std::result::Result<T, HomologyError>;

/// A chamber: a connected component of ℝ^k minus the hyperplanes `1..=k+n+1`,
/// identified by its sign vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chamber {
    /// Signs of L_1, …, L_{k+n+1} on the chamber (never `Zero`).
    pub signs: Vec<Sign>,
    /// Whether the chamber is bounded in ℝ^k.
    pub bounded: bool,
    /// Hyperplanes (indices in `1..=k+n+1`) supporting a facet of the chamber.
    pub walls: Vec<usize>,
}

impl Chamber {
    /// Canonical id: one `+`/`-` per hyperplane `1..=k+n+1`.
    pub fn id(&self) -> String {
        sign_id(&self.signs)
    }

    /// Sign of L_j (`j ≥ 1`); L_0 is positive on every chamber.
    pub fn sign(&self, j: usize) -> Sign {
        if j == 0 {
            Sign::Plus
        } else {
            self.signs[j - 1]
        }
    }
}

pub fn sign_id(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.to_char()).collect()
}

pub fn parse_sign_id(id: &str) -> Result<Vec<Sign>> {
    id.chars()
        .map(|c| match Sign::from_char(c) {
            Some(s) if s != Sign::Zero => Ok(s),
            _ => Err(HomologyError::ChamberId(id.to_string())),
        })
        .collect()
}

/// A chamber loaded with the branch of u_z (`Plus`) or u_z⁻¹ (`Minus`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedCycle {
    pub chamber: Chamber,
    pub side: Side,
}

impl LoadedCycle {
    pub fn new(chamber: Chamber, side: Side) -> Self {
        LoadedCycle { chamber, side }
    }
}

fn num_hyperplanes(z: &CoeffMatrix) -> usize {
    z.k() + z.n() + 1
}

/// Affine coefficients of L_j in t = (t_1, …, t_k), with constant term z_{0j}.
fn affine_form(z: &CoeffMatrix, j: usize) -> (Vec<Rat>, Rat) {
    let coeffs = (1..=z.k()).map(|i| z.entry(i, j).clone()).collect();
    (coeffs, z.entry(0, j).clone())
}

/// Homogeneous coefficients of L_j in (t_0, …, t_k).
fn homogeneous_form(z: &CoeffMatrix, j: usize) -> Vec<Rat> {
    (0..=z.k()).map(|i| z.entry(i, j).clone()).collect()
}

fn signed(v: Vec<Rat>, s: Sign) -> Vec<Rat> {
    match s {
        Sign::Minus => v.into_iter().map(|c| -c).collect(),
        _ => v,
    }
}

/// `{s_j L_j > 0}` for all hyperplanes, except `skip` which is set to zero.
fn open_system(z: &CoeffMatrix, signs: &[Sign], on: Option<usize>) -> Vec<Ineq> {
    let mut sys = Vec::new();
    for j in 1..=num_hyperplanes(z) {
        let (c, c0) = affine_form(z, j);
        if Some(j) == on {
            sys.extend(Ineq::eq(c, c0));
        } else {
            let s = signs[j - 1];
            let c = signed(c, s);
            let c0 = if s == Sign::Minus { -c0 } else { c0 };
            sys.push(Ineq::gt(c, c0));
        }
    }
    sys
}

/// Closed homogeneous cone `{s_j L_j ≥ 0, j = 0..=k+n+1}` of a chamber, with the
/// overall sign `global` (the projective point −t is the same as t).
fn closed_cone(z: &CoeffMatrix, signs: &[Sign], global: Sign) -> Vec<Ineq> {
    let flip = |s: Sign| if global == Sign::Minus { flip_sign(s) } else { s };
    let dim = z.k() + 1;
    let mut sys = Vec::new();
    for j in 0..=num_hyperplanes(z) {
        let s = if j == 0 { Sign::Plus } else { signs[j - 1] };
        sys.push(Ineq::ge(signed(homogeneous_form(z, j), flip(s)), Rat::zero()));
    }
    debug_assert!(sys.iter().all(|c| c.coeffs.len() == dim));
    sys
}

fn flip_sign(s: Sign) -> Sign {
    match s {
        Sign::Plus => Sign::Minus,
        Sign::Minus => Sign::Plus,
        Sign::Zero => Sign::Zero,
    }
}

/// Whether the sign vector is realized by a nonempty open chamber of `z`.
pub fn is_realizable(z: &CoeffMatrix, signs: &[Sign]) -> bool {
    feasible(&open_system(z, signs, None))
}

/// Whether the closure of the chamber (in ℙ^k) misses the hyperplane L_h. For `h = 0`
/// this is ordinary boundedness in ℝ^k (empty recession cone).
pub fn bounded_in_chart(z: &CoeffMatrix, signs: &[Sign], h: usize) -> bool {
    let mut sys = closed_cone(z, signs, Sign::Plus);
    sys.extend(Ineq::eq(homogeneous_form(z, h), Rat::zero()));
    !has_nonzero_solution(&sys)
}

/// Whether the closures in ℙ^k of two chambers intersect.
pub fn closures_meet(z: &CoeffMatrix, a: &[Sign], b: &[Sign]) -> bool {
    [Sign::Plus, Sign::Minus].into_iter().any(|g| {
        let mut sys = closed_cone(z, a, Sign::Plus);
        sys.extend(closed_cone(z, b, g));
        has_nonzero_solution(&sys)
    })
}

fn walls_of(z: &CoeffMatrix, signs: &[Sign]) -> Vec<usize> {
    (1..=num_hyperplanes(z))
        .filter(|&j| feasible(&open_system(z, signs, Some(j))))
        .collect()
}

fn make_chamber(z: &CoeffMatrix, signs: Vec<Sign>) -> Chamber {
    let bounded = bounded_in_chart(z, &signs, 0);
    let walls = walls_of(z, &signs);
    Chamber {
        signs,
        bounded,
        walls,
    }
}

/// All chambers of the real arrangement, sorted by id.
pub fn enumerate_chambers(z: &CoeffMatrix) -> Result<Vec<Chamber>> {
    if matches!(z.classify(), Classification::Other { .. }) {
        return Err(HomologyError::NotSupported);
    }
    let m = num_hyperplanes(z);
    let mut out: Vec<Chamber> = (0u64..1 << m)
        .into_par_iter()
        .filter_map(|bits| {
            let signs: Vec<Sign> = (0..m)
                .map(|j| if bits >> j & 1 == 1 { Sign::Minus } else { Sign::Plus })
                .collect();
            is_realizable(z, &signs).then(|| make_chamber(z, signs))
        })
        .collect();
    out.sort_by_key(|c| c.id());
    Ok(out)
}

/// The chamber of `z` (a small perturbation of a one-point degenerate `z₀`) that
/// collapses onto the point P(J^van): the unique chamber whose walls are exactly
/// J^van ∖ {0}, bounded iff 0 ∉ J^van.
pub fn vanishing_chamber(chambers: &[Chamber], jvan: &IndexTuple) -> Result<Chamber> {
    let walls: Vec<usize> = jvan.as_slice().iter().copied().filter(|&j| j != 0).collect();
    let bounded = !jvan.contains(0);
    let cands: Vec<&Chamber> = chambers
        .iter()
        .filter(|c| c.walls == walls && c.bounded == bounded)
        .collect();
    match cands.as_slice() {
        [c] => Ok((*c).clone()),
        _ => Err(HomologyError::VanishingChamber(cands.len())),
    }
}

/// Result of [`orth_complement`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthComplement {
    /// The hyperplane sent to infinity: 0 if 0 ∈ J^van, else min J^van.
    pub chart: usize,
    /// Chambers bounded in the chart whose closures miss the closure of Δ^van.
    pub perp: Vec<Chamber>,
    /// The bounded chamber whose closure meets that of Δ^van (only at P(J^van)).
    pub exceptional: Chamber,
}

/// (Δ^van)^⊥ and the exceptional chamber D′. When 0 ∉ J^van the vanishing chamber is
/// bounded and the construction is carried out in the projective chart where L_h
/// (h = min J^van) is the hyperplane at infinity, so that Δ^van becomes an unbounded
/// cone; "bounded" then means that the closure avoids L_h.
pub fn orth_complement(
    z: &CoeffMatrix,
    chambers: &[Chamber],
    vanishing: &Chamber,
    jvan: &IndexTuple,
) -> Result<OrthComplement> {
    let chart = if jvan.contains(0) { 0 } else { jvan.as_slice()[0] };
    let tagged: Vec<(Chamber, bool)> = chambers
        .par_iter()
        .filter(|c| c.signs != vanishing.signs && bounded_in_chart(z, &c.signs, chart))
        .map(|c| (c.clone(), closures_meet(z, &c.signs, &vanishing.signs)))
        .collect();
    let mut perp = Vec::new();
    let mut touching = Vec::new();
    for (c, meets) in tagged {
        if meets {
            touching.push(c);
        } else {
            perp.push(c);
        }
    }
    if touching.len() != 1 {
        return Err(HomologyError::Exceptional(touching.len()));
    }
    Ok(OrthComplement {
        chart,
        perp,
        exceptional: touching.pop().expect("one element"),
    })
}

/// Limit of a chamber of `z` as `z → z₀`: the chamber of `z₀` with the same sign
/// vector, or `None` when that sign vector is not realized (the vanishing chamber).
pub fn limit_chamber(chamber: &Chamber, z0: &CoeffMatrix) -> Option<Chamber> {
    is_realizable(z0, &chamber.signs).then(|| make_chamber(z0, chamber.signs.clone()))
}

/// Limit of a loaded chamber; the branch is carried over unchanged.
pub fn limit_cycle(cycle: &LoadedCycle, z0: &CoeffMatrix) -> Option<LoadedCycle> {
    limit_chamber(&cycle.chamber, z0).map(|c| LoadedCycle::new(c, cycle.side))
}

/// Table of generic homology intersection numbers ℐʰ(a₊, b₋) ∈ ℚ(λ).
#[derive(Clone, Debug)]
pub struct PairingOracle {
    ctx: ParamContext,
    names: BTreeMap<String, String>,
    values: BTreeMap<(String, String), RatFunc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct OracleEntry {
    left: String,
    left_side: String,
    right: String,
    right_side: String,
    value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct OracleFile {
    k: usize,
    n: usize,
    /// Optional human names for chamber ids (e.g. "sigma'" → "+--+-").
    #[serde(default)]
    names: BTreeMap<String, String>,
    entries: Vec<OracleEntry>,
}

fn parse_side(s: &str) -> Result<Side> {
    match s {
        "+" => Ok(Side::Plus),
        "-" => Ok(Side::Minus),
        other => Err(HomologyError::Oracle(format!("bad side `{other}`"))),
    }
}

impl PairingOracle {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: OracleFile =
            serde_json::from_str(text).map_err(|e| HomologyError::Oracle(e.to_string()))?;
        let ctx = ParamContext::lambda(file.k, file.n);
        let m = file.k + file.n + 1;
        let resolve = |id: &str| -> Result<String> {
            let id = file.names.get(id).map(String::as_str).unwrap_or(id);
            let signs = parse_sign_id(id)?;
            if signs.len() != m {
                return Err(HomologyError::ChamberId(id.to_string()));
            }
            Ok(id.to_string())
        };
        for id in file.names.values() {
            resolve(id)?;
        }
        let mut values = BTreeMap::new();
        for e in &file.entries {
            if parse_side(&e.left_side)? != Side::Plus || parse_side(&e.right_side)? != Side::Minus {
                return Err(HomologyError::Sides);
            }
            let key = (resolve(&e.left)?, resolve(&e.right)?);
            if values.insert(key, ctx.parse(&e.value)?).is_some() {
                return Err(HomologyError::Oracle(format!(
                    "duplicate entry ({}, {})",
                    e.left, e.right
                )));
            }
        }
        Ok(PairingOracle {
            ctx,
            names: file.names,
            values,
        })
    }

    pub fn context(&self) -> &ParamContext {
        &self.ctx
    }

    /// Chamber id registered under a human name, if any.
    pub fn named(&self, name: &str) -> Option<&str> {
        self.names.get(name).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// ℐʰ(a, b) for `a` on the + side and `b` on the − side.
    pub fn value(&self, a: &LoadedCycle, b: &LoadedCycle) -> Result<RatFunc> {
        if a.side != Side::Plus || b.side != Side::Minus {
            return Err(HomologyError::Sides);
        }
        let (ia, ib) = (a.chamber.id(), b.chamber.id());
        self.values
            .get(&(ia.clone(), ib.clone()))
            .cloned()
            .ok_or(HomologyError::OracleGap(ia, ib))
    }

    /// Like [`PairingOracle::value`], but pairs of chambers whose closures are disjoint
    /// get 0 without consulting the table (intersection numbers are local).
    pub fn value_or_local(&self, z: &CoeffMatrix, a: &LoadedCycle, b: &LoadedCycle) -> Result<RatFunc> {
        if a.side != Side::Plus || b.side != Side::Minus {
            return Err(HomologyError::Sides);
        }
        if !closures_meet(z, &a.chamber.signs, &b.chamber.signs) {
            return Ok(RatFunc::zero());
        }
        self.value(a, b)
    }
}

/// ℐʰ₀(σ₊, τ₋) on the degenerate arrangement through loaded chambers σ′, τ′ of the
/// perturbed arrangement with limits σ, τ:
/// ℐʰ(σ′,τ′) − ℐʰ(σ′,Δ^van₋)·ℐʰ(Δ^van₊,τ′)/ℐʰ(Δ^van₊,Δ^van₋).
pub fn pairing_degenerate_h(
    sigma: &LoadedCycle,
    tau: &LoadedCycle,
    vanishing: &Chamber,
    oracle: &PairingOracle,
) -> Result<RatFunc> {
    let vp = LoadedCycle::new(vanishing.clone(), Side::Plus);
    let vm = LoadedCycle::new(vanishing.clone(), Side::Minus);
    let direct = oracle.value(sigma, tau)?;
    let left = oracle.value(sigma, &vm)?;
    let right = oracle.value(&vp, tau)?;
    if left.is_zero() || right.is_zero() {
        return Ok(direct);
    }
    let self_pair = oracle.value(&vp, &vm)?;
    let correction = (&left * &right).checked_div(&self_pair)?;
    Ok(&direct - &correction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::binomial;

    fn points_on_line() -> CoeffMatrix {
        // k = 1, n = 1: L1 = t, L2 = t − 1, L3 = t − 3
        CoeffMatrix::from_ints(1, 1, &[vec![1, 0, -1, -3], vec![0, 1, 1, 1]]).unwrap()
    }

    #[test]
    fn three_points_give_two_intervals() {
        let ch = enumerate_chambers(&points_on_line()).unwrap();
        assert_eq!(ch.len(), 4);
        assert_eq!(ch.iter().filter(|c| c.bounded).count(), binomial(2, 1));
        let interval = ch.iter().find(|c| c.id() == "+--").unwrap();
        assert!(interval.bounded);
        assert_eq!(interval.walls, vec![1, 2]);
    }

    #[test]
    fn sign_ids_round_trip() {
        let s = parse_sign_id("+-+").unwrap();
        assert_eq!(sign_id(&s), "+-+");
        assert!(parse_sign_id("+0+").is_err());
        assert!(parse_sign_id("+x").is_err());
    }

    #[test]
    fn projective_closures_meet_at_infinity() {
        // Two unbounded chambers t > 3 and t < 0 meet at the point at infinity.
        let z = points_on_line();
        let right = parse_sign_id("+++").unwrap();
        let left = parse_sign_id("---").unwrap();
        assert!(closures_meet(&z, &right, &left));
        let mid = parse_sign_id("+--").unwrap();
        assert!(closures_meet(&z, &mid, &parse_sign_id("++-").unwrap()));
        assert!(!closures_meet(&z, &mid, &right));
        assert!(!bounded_in_chart(&z, &right, 0));
        assert!(bounded_in_chart(&z, &right, 1));
        assert!(!bounded_in_chart(&z, &left, 1));
        assert!(bounded_in_chart(&z, &left, 3));
    }

    #[test]
    fn oracle_rejects_wrong_sides_and_bad_ids() {
        let bad = r#"{"k":1,"n":1,"entries":[{"left":"+--","left_side":"-","right":"+--","right_side":"+","value":"1"}]}"#;
        assert!(matches!(PairingOracle::from_json(bad), Err(HomologyError::Sides)));
        let bad = r#"{"k":1,"n":1,"entries":[{"left":"+-","left_side":"+","right":"+--","right_side":"-","value":"1"}]}"#;
        assert!(matches!(PairingOracle::from_json(bad), Err(HomologyError::ChamberId(_))));
    }
}
