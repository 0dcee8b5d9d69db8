use twisted_core::arrangement::SpecialMatrix;
use twisted_core::contiguity::{ContiguityContext, InversePath};
use twisted_core::field::{parse_rat, rat_to_f64, Rat};
use twisted_core::series::*;

fn x0() -> Vec<Vec<Rat>> {
    ["0", "1/25", "-1/30", "1/40"]
        .chunks(2)
        .map(|r| r.iter().map(|s| parse_rat(s).unwrap()).collect())
        .collect()
}

fn params(alpha: &[Rat], x: &[Vec<Rat>], m: usize) -> SeriesParams {
    SeriesParams {
        k: 2,
        n: 2,
        alpha: to_f64(alpha),
        x: x.iter().map(|r| to_f64(r)).collect(),
        zero_cell: Some((1, 1)),
        truncation: m,
        radius: 0.25,
    }
}

#[test]
fn flagship_residuals() {
    let z0 = SpecialMatrix::new(x0()).unwrap().coeff();
    for seed in 0..2 {
        let alpha = random_alpha(2, 2, seed);
        let p = params(&alpha, &x0(), 24);
        for l in 1..=5 {
            let ctx = ContiguityContext::new(z0.clone(), 0, 5, l).unwrap();
            let conti = ctx.conti_matrix(&alpha, InversePath::Elimination).unwrap();
            let c: Vec<Vec<f64>> = conti.entries.to_rows().iter().map(|r| r.iter().map(rat_to_f64).collect()).collect();
            let res = check_contiguity(&p, l, &c).unwrap();
            println!("seed {seed} l {l} residual {res:e}");
            assert!(res < 1e-8, "seed {seed}, l = {l}: residual {res}");
        }
    }
}

fn generic_params(m: usize) -> SeriesParams {
    let alpha = random_alpha(2, 2, 11);
    SeriesParams {
        k: 2,
        n: 2,
        alpha: to_f64(&alpha),
        x: vec![vec![0.031, -0.022], vec![0.017, 0.044]],
        zero_cell: None,
        truncation: m,
        radius: 0.25,
    }
}

#[test]
fn gamma_recurrence_on_a_grid() {
    let mut a = -4.95;
    while a < 5.0 {
        let lhs = gamma(a + 1.0).unwrap();
        let rhs = a * gamma(a).unwrap();
        assert!(((lhs - rhs) / rhs).abs() < 1e-12, "a = {a}");
        a += 0.0731;
    }
}

#[test]
fn gamma_m_at_zero_and_recurrence() {
    let alpha = to_f64(&random_alpha(2, 2, 3));
    let zero = vec![vec![0u32; 2]; 2];
    let g0 = gamma_m(2, 2, &alpha, &zero).unwrap();
    let expect = gamma(-alpha[1] + 1.0).unwrap()
        * gamma(-alpha[2] + 1.0).unwrap()
        * gamma(alpha[3] + 1.0).unwrap()
        * gamma(alpha[4] + 1.0).unwrap()
        * gamma(alpha[1] + alpha[2] + alpha[5] + 1.0).unwrap();
    assert!(((g0 - expect) / expect).abs() < 1e-12);
    // raising m_ij by one multiplies Γ_m by
    // (m_ij + 1)·(s + |m| + 1) / ((−α_i − r_i)(α_{k+j} − c_j))
    let m = vec![vec![1u32, 2], vec![0, 3]];
    let (i, j) = (1usize, 0usize);
    let mut m2 = m.clone();
    m2[i][j] += 1;
    let r_i: f64 = m[i].iter().map(|&v| v as f64).sum();
    let c_j: f64 = (0..2).map(|t| m[t][j] as f64).sum();
    let total: f64 = m.iter().flatten().map(|&v| v as f64).sum();
    let s = alpha[1] + alpha[2] + alpha[5];
    let ratio = (m[i][j] as f64 + 1.0) * (s + total + 1.0) / ((-alpha[i + 1] - r_i) * (alpha[2 + j + 1] - c_j));
    let got = gamma_m(2, 2, &alpha, &m2).unwrap() / gamma_m(2, 2, &alpha, &m).unwrap();
    assert!(((got - ratio) / ratio).abs() < 1e-11, "{got} vs {ratio}");
}

#[test]
fn gamma_m_column_symmetry() {
    let alpha = to_f64(&random_alpha(2, 2, 5));
    let m = vec![vec![1u32, 3], vec![2, 0]];
    let swapped_m = vec![vec![3u32, 1], vec![0, 2]];
    let mut swapped_a = alpha.clone();
    swapped_a.swap(3, 4);
    let a = gamma_m(2, 2, &alpha, &m).unwrap();
    let b = gamma_m(2, 2, &swapped_a, &swapped_m).unwrap();
    assert!(((a - b) / a).abs() < 1e-13);
}

#[test]
fn series_at_zero_and_convergence() {
    let mut p = generic_params(24);
    p.x = vec![vec![0.0; 2]; 2];
    let v = series_s(&p).unwrap();
    let zero = vec![vec![0u32; 2]; 2];
    assert!((v.value - 1.0 / gamma_m(2, 2, &p.alpha, &zero).unwrap()).abs() < 1e-15);

    let p = generic_params(20);
    let q = generic_params(24);
    let a = series_s(&p).unwrap();
    let b = series_s(&q).unwrap();
    assert!((a.value - b.value).abs() < 1e-10);
    // geometric decay of the degree shells beyond degree 8
    for d in 9..b.shells.len() {
        if b.shells[d - 1] > 1e-300 {
            assert!(b.shells[d] / b.shells[d - 1] < 0.5, "shell {d}");
        }
    }
}

#[test]
fn zero_cell_drops_terms() {
    let mut p = generic_params(16);
    p.x[0][0] = 0.0;
    let with_cell = series_s(&SeriesParams { zero_cell: Some((1, 1)), ..p.clone() }).unwrap();
    let plain = series_s(&p).unwrap();
    assert!((with_cell.value - plain.value).abs() < 1e-15);
    let mut bad = p.clone();
    bad.x[0][0] = 0.01;
    bad.zero_cell = Some((1, 1));
    assert!(series_s(&bad).is_err());
    let mut far = generic_params(8);
    far.x[1][1] = 0.3;
    assert!(series_s(&far).is_err());
}

#[test]
fn mixed_partials_agree() {
    let p = generic_params(24);
    let d1122 = series_partial(&p, &[vec![1, 0], vec![0, 1]]).unwrap();
    let d1221 = series_partial(&p, &[vec![0, 1], vec![1, 0]]).unwrap();
    assert!(((d1122 - d1221) / d1122).abs() < 1e-9, "{d1122} vs {d1221}");
}

#[test]
fn bold_s_entries() {
    let alpha = random_alpha(2, 2, 8);
    let p = params(&alpha, &x0(), 24);
    let v = bold_s(&p).unwrap();
    assert_eq!(v[0], series_s(&p).unwrap().value);
    // x → 0: (1/Γ_0, 0, 0, 0, 0)
    let mut z = p.clone();
    z.x = vec![vec![0.0; 2]; 2];
    let v0 = bold_s(&z).unwrap();
    let zero = vec![vec![0u32; 2]; 2];
    assert!((v0[0] - 1.0 / gamma_m(2, 2, &z.alpha, &zero).unwrap()).abs() < 1e-15);
    assert!(v0[1..].iter().all(|e| *e == 0.0));
    // entry 2 against a central finite difference of S in x21
    let h = 1e-5;
    let mut up = p.clone();
    up.x[1][0] += h;
    let mut dn = p.clone();
    dn.x[1][0] -= h;
    let fd = (series_s(&up).unwrap().value - series_s(&dn).unwrap().value) / (2.0 * h);
    let entry = p.x[1][0] / p.alpha[3] * fd;
    assert!((entry - v[1]).abs() < 1e-8 * v[0].abs().max(1.0), "{entry} vs {}", v[1]);
    // unsupported shape
    let mut q = p.clone();
    q.zero_cell = Some((2, 2));
    q.x[1][1] = 0.0;
    assert!(matches!(bold_s(&q), Err(SeriesError::UnsupportedShape)));
}

#[test]
fn identity_is_a_negative_control() {
    let alpha = random_alpha(2, 2, 4);
    let p = params(&alpha, &x0(), 24);
    let id: Vec<Vec<f64>> = (0..5).map(|i| (0..5).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let worst = (1..=5).map(|l| check_contiguity(&p, l, &id).unwrap()).fold(0.0, f64::max);
    assert!(worst > 1e-3, "identity should not satisfy the relations ({worst})");
    assert!(check_contiguity(&p, 1, &id[..4]).is_err());
}

#[test]
fn residual_tracks_truncation() {
    let z0 = SpecialMatrix::new(x0()).unwrap().coeff();
    let alpha = random_alpha(2, 2, 9);
    let ctx = ContiguityContext::new(z0, 0, 5, 1).unwrap();
    let conti = ctx.conti_matrix(&alpha, InversePath::Elimination).unwrap();
    let c: Vec<Vec<f64>> = conti.entries.to_rows().iter().map(|r| r.iter().map(rat_to_f64).collect()).collect();
    let coarse = check_contiguity(&params(&alpha, &x0(), 2), 1, &c).unwrap();
    let fine = check_contiguity(&params(&alpha, &x0(), 24), 1, &c).unwrap();
    assert!(coarse > fine);
    assert!(coarse > 1e-8);
}
