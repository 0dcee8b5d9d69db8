//! Floating-point evaluation of the hypergeometric series
//! S(α; x) = Σ_m x^m / Γ_m(α) over k×n matrices m of nonnegative integers, the vector
//! S(α; x₀) attached to the basis 𝒥° of the k = n = 2 example with x₁₁ = 0, and the
//! numerical check of the contiguity relations for that vector.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrangement::combinations;
use crate::field::{rat_to_f64, ParamContext, Rat};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("invalid series parameters: {0}")]
    Params(String),
    #[error("Γ evaluated at the pole {0}")]
    Pole(f64),
    #[error("only k = n = 2 with the zero cell at (1, 1) is supported")]
    UnsupportedShape,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

type Result<T> = std::result::Result<T, SeriesError>;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Γ(x) by the Lanczos approximation, with the reflection formula for x < 1/2.
pub fn gamma(x: f64) -> Result<f64> {
    if is_pole(x) {
        return Err(SeriesError::Pole(x));
    }
    Ok(1.0 / rgamma(x))
}

/// 1/Γ(x), an entire function (zero at the poles of Γ).
pub fn rgamma(x: f64) -> f64 {
    if is_pole(x) {
        return 0.0;
    }
    if x < 0.5 {
        // 1/Γ(x) = sin(πx)·Γ(1 − x)/π
        let s = (std::f64::consts::PI * x).sin();
        return s / (std::f64::consts::PI * rgamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    1.0 / ((2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a)
}

/// Parameters of S(α; x).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    pub k: usize,
    pub n: usize,
    /// α_0, …, α_{k+n+1} (Σ = 0; α_0 does not enter the series).
    pub alpha: Vec<f64>,
    /// x_{ij}, stored as `x[i-1][j-1]`.
    pub x: Vec<Vec<f64>>,
    /// 1-based cell (ı, ȷ) held at zero: terms with m_{ıȷ} > 0 are dropped.
    #[serde(default)]
    pub zero_cell: Option<(usize, usize)>,
    /// Largest total degree Σ m_{ij} kept.
    pub truncation: usize,
    /// Upper bound on |x_{ij}|.
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_radius() -> f64 {
    0.25
}

impl SeriesParams {
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(SeriesError::Params(m));
        if self.alpha.len() != self.k + self.n + 2 {
            return err(format!("expected {} exponents", self.k + self.n + 2));
        }
        if self.x.len() != self.k || self.x.iter().any(|r| r.len() != self.n) {
            return err(format!("x must be {}×{}", self.k, self.n));
        }
        if let Some(a) = self.alpha.iter().find(|a| (*a - a.round()).abs() < 1e-12) {
            return err(format!("exponent {a} is an integer"));
        }
        let s: f64 = self.alpha.iter().sum();
        if s.abs() > 1e-9 {
            return err(format!("exponents sum to {s}, not 0"));
        }
        if let Some(v) = self.x.iter().flatten().find(|v| v.abs() >= self.radius) {
            return err(format!("|x| = {} violates the radius guard {}", v.abs(), self.radius));
        }
        if let Some((i, j)) = self.zero_cell {
            if i == 0 || j == 0 || i > self.k || j > self.n {
                return err(format!("zero cell ({i}, {j}) out of range"));
            }
            if self.x[i - 1][j - 1] != 0.0 {
                return err(format!("zero cell ({i}, {j}) holds a nonzero value"));
            }
        }
        Ok(())
    }

    /// The same parameters at α^(l) = α + e_l − e_0.
    pub fn shifted(&self, l: usize) -> SeriesParams {
        let mut p = self.clone();
        p.alpha[l] += 1.0;
        p.alpha[0] -= 1.0;
        p
    }

    fn free_cells(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for i in 0..self.k {
            for j in 0..self.n {
                if self.zero_cell != Some((i + 1, j + 1)) {
                    cells.push((i, j));
                }
            }
        }
        cells
    }
}

/// Γ_m(α) = ∏_i Γ(−α_i − Σ_j m_ij + 1)·∏_j Γ(α_{k+j} − Σ_i m_ij + 1)
///          ·Γ(Σ_i α_i + α_{k+n+1} + Σ m + 1)·∏ Γ(m_ij + 1).
pub fn gamma_m(k: usize, n: usize, alpha: &[f64], m: &[Vec<u32>]) -> Result<f64> {
    let r = rgamma_m(k, n, alpha, m);
    if r == 0.0 {
        return Err(SeriesError::Pole(f64::NAN));
    }
    Ok(1.0 / r)
}

/// 1/Γ_m(α).
pub fn rgamma_m(k: usize, n: usize, alpha: &[f64], m: &[Vec<u32>]) -> f64 {
    let row = |i: usize| m[i].iter().map(|&v| v as f64).sum::<f64>();
    let col = |j: usize| (0..k).map(|i| m[i][j] as f64).sum::<f64>();
    let total: f64 = (0..k).map(row).sum();
    let mut r = 1.0;
    for i in 0..k {
        r *= rgamma(-alpha[i + 1] - row(i) + 1.0);
    }
    for j in 0..n {
        r *= rgamma(alpha[k + j + 1] - col(j) + 1.0);
    }
    let s: f64 = (1..=k).map(|i| alpha[i]).sum::<f64>() + alpha[k + n + 1];
    r *= rgamma(s + total + 1.0);
    for v in m.iter().flatten() {
        r *= rgamma(*v as f64 + 1.0);
    }
    r
}

/// All vectors of `len` nonnegative integers summing to `d`, in lexicographic order.
fn compositions(len: usize, d: usize) -> Vec<Vec<u32>> {
    if len == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    // stars and bars: choose len−1 bar positions among d+len−1 slots
    combinations(d + len - 1, len - 1)
        .into_iter()
        .map(|bars| {
            let mut out = Vec::with_capacity(len);
            let mut prev: isize = -1;
            for &b in &bars {
                out.push((b as isize - prev - 1) as u32);
                prev = b as isize;
            }
            out.push((d as isize + len as isize - 2 - prev) as u32);
            out
        })
        .collect()
}

/// Sum of `weight(m)·x^m/Γ_m(α)` over one degree shell, summed in a fixed order.
fn shell<const W: usize>(p: &SeriesParams, d: usize, weight: &(dyn Fn(&[Vec<u32>]) -> [f64; W] + Sync)) -> [f64; W] {
    let cells = p.free_cells();
    let mut acc = [0.0; W];
    for comp in compositions(cells.len(), d) {
        let mut m = vec![vec![0u32; p.n]; p.k];
        let mut mono = 1.0;
        for (&(i, j), &e) in cells.iter().zip(&comp) {
            m[i][j] = e;
            mono *= p.x[i][j].powi(e as i32);
        }
        let c = mono * rgamma_m(p.k, p.n, &p.alpha, &m);
        let w = weight(&m);
        for t in 0..W {
            acc[t] += c * w[t];
        }
    }
    acc
}

fn sum_shells<const W: usize>(
    p: &SeriesParams,
    weight: &(dyn Fn(&[Vec<u32>]) -> [f64; W] + Sync),
) -> (Vec<[f64; W]>, [f64; W]) {
    let shells: Vec<[f64; W]> = (0..=p.truncation)
        .into_par_iter()
        .map(|d| shell(p, d, weight))
        .collect();
    let mut total = [0.0; W];
    for s in &shells {
        for t in 0..W {
            total[t] += s[t];
        }
    }
    (shells, total)
}

/// Value of the truncated series with the magnitude of its last degree shell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail: f64,
    /// |shell d| for d = 0..=M.
    pub shells: Vec<f64>,
}

/// S(α; x) truncated at total degree M.
pub fn series_s(p: &SeriesParams) -> Result<SeriesValue> {
    p.validate()?;
    let (shells, total) = sum_shells::<1>(p, &|_| [1.0]);
    let shells: Vec<f64> = shells.iter().map(|s| s[0].abs()).collect();
    Ok(SeriesValue {
        value: total[0],
        tail: *shells.last().expect("at least one shell"),
        shells,
    })
}

/// The vector S(α; x₀) over 𝒥° = (012, 013, 014, 024, 034) for k = n = 2, x₁₁ = 0:
/// (S, (x₂₁/α₃)∂S/∂x₂₁, (x₂₂/α₄)∂S/∂x₂₂, (−x₁₂/α₄)∂S/∂x₁₂, (−x₁₂x₂₁/(α₃α₄))∂²S/∂x₁₂∂x₂₁),
/// with every derivative taken term by term on the truncated series.
pub fn bold_s(p: &SeriesParams) -> Result<[f64; 5]> {
    if p.k != 2 || p.n != 2 || p.zero_cell != Some((1, 1)) {
        return Err(SeriesError::UnsupportedShape);
    }
    p.validate()?;
    let (a3, a4) = (p.alpha[3], p.alpha[4]);
    let (_, total) = sum_shells::<5>(p, &|m| {
        let (m12, m21, m22) = (m[0][1] as f64, m[1][0] as f64, m[1][1] as f64);
        [1.0, m21 / a3, m22 / a4, -m12 / a4, -m12 * m21 / (a3 * a4)]
    });
    Ok(total)
}

/// Term-by-term partial derivative ∂^{|d|}S/∏∂x_ij^{d_ij} of the truncated series,
/// with `orders[i][j] = d_ij`.
pub fn series_partial(p: &SeriesParams, orders: &[Vec<u32>]) -> Result<f64> {
    p.validate()?;
    if orders.len() != p.k || orders.iter().any(|r| r.len() != p.n) {
        return Err(SeriesError::Shape("derivative orders must match x".into()));
    }
    let cells = p.free_cells();
    if let Some((i, j)) = p.zero_cell {
        if orders[i - 1][j - 1] > 0 {
            return Err(SeriesError::Params("cannot differentiate in the zero cell".into()));
        }
    }
    let shells: Vec<f64> = (0..=p.truncation)
        .into_par_iter()
        .map(|d| {
            let mut acc = 0.0;
            for comp in compositions(cells.len(), d) {
                let mut m = vec![vec![0u32; p.n]; p.k];
                let mut term = 1.0;
                for (&(i, j), &e) in cells.iter().zip(&comp) {
                    m[i][j] = e;
                    let o = orders[i][j];
                    if o > e {
                        term = 0.0;
                        break;
                    }
                    for f in 0..o {
                        term *= (e - f) as f64;
                    }
                    term *= p.x[i][j].powi((e - o) as i32);
                }
                if term != 0.0 {
                    acc += term * rgamma_m(p.k, p.n, &p.alpha, &m);
                }
            }
            acc
        })
        .collect();
    Ok(shells.iter().sum())
}

/// ‖S(α^(l)) − scale·conti·S(α)‖_∞ with scale = 1 for l ≤ k and 1/(α_l + 1) for
/// l = k + j, the contiguity relations for the vector of [`bold_s`].
pub fn check_contiguity(p: &SeriesParams, l: usize, conti: &[Vec<f64>]) -> Result<f64> {
    if l == 0 || l > p.k + p.n + 1 {
        return Err(SeriesError::Shape(format!("shift index {l} out of range")));
    }
    let base = bold_s(p)?;
    if conti.len() != base.len() || conti.iter().any(|r| r.len() != base.len()) {
        return Err(SeriesError::Shape(format!("contiguity matrix must be {0}×{0}", base.len())));
    }
    let shifted = bold_s(&p.shifted(l))?;
    let scale = if l <= p.k { 1.0 } else { 1.0 / (p.alpha[l] + 1.0) };
    let mut worst: f64 = 0.0;
    for (i, row) in conti.iter().enumerate() {
        let v: f64 = row.iter().zip(&base).map(|(c, s)| c * s).sum();
        worst = worst.max((shifted[i] - scale * v).abs());
    }
    Ok(worst)
}

/// Random exact exponents for the series check: α_1..α_{k+n+1} in (0, 1) with all
/// partial sums over proper subsets non-integral, α_0 = −Σ.
pub fn random_alpha(k: usize, n: usize, seed: u64) -> Vec<Rat> {
    let ctx = ParamContext::alpha(k, n);
    let m = ctx.num_params();
    let avoid: Vec<Vec<usize>> = (1..m)
        .flat_map(|r| combinations(m, r))
        .collect();
    ctx.random_point(seed, &avoid)
}

pub fn to_f64(v: &[Rat]) -> Vec<f64> {
    v.iter().map(rat_to_f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(5.0).unwrap() - 24.0).abs() < 1e-12);
        assert!((gamma(0.5).unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((gamma(-0.5).unwrap() + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(gamma(-3.0).is_err());
        assert_eq!(rgamma(-2.0), 0.0);
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(3, 4).len(), 15);
        assert!(compositions(3, 4).iter().all(|c| c.iter().sum::<u32>() == 4));
        assert_eq!(compositions(0, 0), vec![Vec::<u32>::new()]);
        assert_eq!(compositions(1, 3), vec![vec![3]]);
    }
}
