use std::time::Instant;

use twisted_core::arrangement::{all_tuples, IndexTuple};
use twisted_core::cohomology::*;
use twisted_core::field::{ParamContext, Rat, RatFunc};

fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn tuple(v: &serde_json::Value) -> IndexTuple {
    let idx = v
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap() as usize)
        .collect();
    IndexTuple::new(idx).unwrap()
}

/// Every index set whose exponent sum shows up in a denominator.
fn avoid_sets(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..k + n + 2).map(|j| vec![j]).collect();
    out.extend(all_tuples(k, n).iter().map(|t| t.as_slice().to_vec()));
    out
}

#[test]
fn cohomology_fixture_values() {
    let v: serde_json::Value = serde_json::from_str(&fixture("k2n2_cohomology.json")).unwrap();
    let (k, n) = (v["k"].as_u64().unwrap() as usize, v["n"].as_u64().unwrap() as usize);
    let ctx = ParamContext::alpha(k, n);
    let a = ctx.params();
    let jvan = tuple(&v["jvan"]);
    for e in v["generic"].as_array().unwrap() {
        let (i, j) = (tuple(&e["row"]), tuple(&e["col"]));
        let want = ctx.parse(e["value"].as_str().unwrap()).unwrap();
        assert_eq!(pairing_generic(&a, &i, &j).unwrap(), want, "{i} × {j}");
    }
    for e in v["degenerate"].as_array().unwrap() {
        let (i, j) = (tuple(&e["row"]), tuple(&e["col"]));
        let want = ctx.parse(e["value"].as_str().unwrap()).unwrap();
        assert_eq!(pairing_degenerate(&a, &i, &j, &jvan).unwrap(), want, "{i} × {j}");
    }
    let g = gram_generic(&a, &[tuple(&v["jvan"])], &[tuple(&v["jvan"])]).unwrap();
    assert_eq!(g.power as u64, v["two_pi_i_power"].as_u64().unwrap());
}

fn structural(k: usize, n: usize) {
    let ctx = ParamContext::alpha(k, n);
    let a = ctx.params();
    let neg: Vec<RatFunc> = a.iter().map(|x| -x.clone()).collect();
    let tuples = all_tuples(k, n);
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    for i in &tuples {
        for j in &tuples {
            let g = pairing_generic(&a, i, j).unwrap();
            assert_eq!(g, pairing_generic(&a, j, i).unwrap(), "symmetry {i} {j}");
            let d = pairing_generic(&neg, i, j).unwrap();
            assert_eq!(d, g.clone() * RatFunc::from_int(sign), "duality {i} {j}");
        }
    }
    for jvan in &tuples {
        for j in &tuples {
            let orth = pairing_generic(&a, j, jvan).unwrap().is_zero();
            assert_eq!(orth, j.common(jvan) < k, "orthogonality {j} against {jvan}");
        }
        let projected: Vec<_> = tuples
            .iter()
            .map(|t| {
                let plus = project_vanishing(&a, &CohomClass::basis(t, Side::Plus), jvan).unwrap();
                let minus = project_vanishing(&a, &CohomClass::basis(t, Side::Minus), jvan).unwrap();
                assert_eq!(project_vanishing(&a, &plus, jvan).unwrap().coords.len(), plus.coords.len());
                let twice = project_vanishing(&a, &plus, jvan).unwrap();
                for s in &tuples {
                    assert_eq!(twice.coefficient(s), plus.coefficient(s), "idempotence {t}");
                }
                (plus, minus)
            })
            .collect();
        for (x, i) in tuples.iter().enumerate() {
            if i.same_set(jvan) {
                continue;
            }
            for (y, j) in tuples.iter().enumerate() {
                if j.same_set(jvan) {
                    continue;
                }
                let lhs = pairing_degenerate(&a, i, j, jvan).unwrap();
                let rhs = pair_classes(&a, &projected[x].0, &projected[y].1).unwrap();
                assert_eq!(lhs, rhs, "degenerate pairing {i} {j} with J^van {jvan}");
            }
        }
    }
}

#[test]
fn structural_invariants_small() {
    for (k, n) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        structural(k, n);
    }
}

/// All parameter choices of the four degenerate basis kinds for one J^van.
fn all_kinds(k: usize, n: usize, jvan: &IndexTuple) -> Vec<BasisKind> {
    let outside: Vec<usize> = (0..=k + n + 1).filter(|j| !jvan.contains(*j)).collect();
    let mut out = Vec::new();
    for l in 0..=k {
        for &p in &outside {
            out.push(BasisKind::One { l, p });
            for &q in &outside {
                if q != p {
                    out.push(BasisKind::Two { l, p, q });
                }
            }
            out.push(BasisKind::Three { l, q: p });
        }
    }
    for &p in &outside {
        for &l in jvan.as_slice() {
            for &l2 in jvan.as_slice() {
                if l != l2 {
                    out.push(BasisKind::Four { p, l, l2 });
                }
            }
        }
    }
    out
}

#[test]
fn degenerate_bases_have_invertible_gram_matrices() {
    for (k, n) in [(2, 2), (2, 3)] {
        let ctx = ParamContext::alpha(k, n);
        let avoid = avoid_sets(k, n);
        for jvan in all_tuples(k, n) {
            for kind in all_kinds(k, n, &jvan) {
                let f = basis_degenerate(k, n, &jvan, kind).unwrap();
                for seed in 0..2 {
                    let a: Vec<Rat> = ctx.random_point(seed, &avoid);
                    let g = gram_degenerate(&a, &f.rows, &f.cols, &jvan).unwrap();
                    assert!(g.det() != Rat::from_integer(0.into()), "{kind:?} with J^van {jvan}");
                }
            }
        }
    }
}

#[test]
fn determinant_identity_symbolic_k2_n2() {
    let start = Instant::now();
    let ctx = ParamContext::alpha(2, 2);
    let a = ctx.params();
    let jvan = IndexTuple::new(vec![1, 2, 3]).unwrap();
    for (p, l, l2) in [(0, 1, 2), (4, 2, 3), (5, 3, 1)] {
        let d = det_identity_check(&a, 2, 2, &jvan, p, l, l2).unwrap();
        assert!(d.holds(), "p = {p}, l = {l}, l′ = {l2}");
    }
    eprintln!("symbolic determinant identities: {:?}", start.elapsed());
}

#[test]
fn determinant_identity_evaluated_k2_n3() {
    let ctx = ParamContext::alpha(2, 3);
    let avoid = avoid_sets(2, 3);
    for jvan in all_tuples(2, 3).into_iter().step_by(5) {
        for kind in all_kinds(2, 3, &jvan) {
            if let BasisKind::Four { p, l, l2 } = kind {
                let a: Vec<Rat> = ctx.random_point(p as u64, &avoid);
                let d = det_identity_check(&a, 2, 3, &jvan, p, l, l2).unwrap();
                assert!(d.holds(), "{kind:?} with J^van {jvan}");
            }
        }
    }
}
