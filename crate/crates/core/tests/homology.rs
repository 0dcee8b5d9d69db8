use std::collections::BTreeSet;

use twisted_core::arrangement::{binomial, Classification, CoeffMatrix, IndexTuple};
use twisted_core::cohomology::Side;
use twisted_core::field::{ParamContext, RatFunc};
use twisted_core::homology::*;

fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn z_left() -> CoeffMatrix {
    CoeffMatrix::from_json(&fixture("k2n2_generic.json")).unwrap()
}

fn z_right() -> CoeffMatrix {
    CoeffMatrix::from_json(&fixture("k2n2_degenerate.json")).unwrap()
}

fn jvan() -> IndexTuple {
    IndexTuple::new(vec![1, 2, 3]).unwrap()
}

fn chamber(chambers: &[Chamber], id: &str) -> Chamber {
    chambers
        .iter()
        .find(|c| c.id() == id)
        .unwrap_or_else(|| panic!("no chamber {id}"))
        .clone()
}

#[test]
fn classification_and_bounded_counts() {
    assert_eq!(z_left().classify(), Classification::Generic);
    assert_eq!(z_right().classify(), Classification::OneDegenerate { jvan: jvan() });
    let left = enumerate_chambers(&z_left()).unwrap();
    let right = enumerate_chambers(&z_right()).unwrap();
    assert_eq!(left.iter().filter(|c| c.bounded).count(), 6);
    assert_eq!(right.iter().filter(|c| c.bounded).count(), 5);
    // every chamber of z₀ is the limit of a chamber of z
    let limits: BTreeSet<String> = left
        .iter()
        .filter_map(|c| limit_chamber(c, &z_right()))
        .map(|c| c.id())
        .collect();
    let targets: BTreeSet<String> = right.iter().map(|c| c.id()).collect();
    assert_eq!(limits, targets);
}

#[test]
fn named_chambers_and_limits() {
    let left = enumerate_chambers(&z_left()).unwrap();
    let dvan = vanishing_chamber(&left, &jvan()).unwrap();
    assert_eq!(dvan.id(), "+-++-");
    assert!(dvan.bounded);
    assert_eq!(limit_chamber(&dvan, &z_right()), None);

    let sigma_p = chamber(&left, "+--+-");
    let tau_p = chamber(&left, "++-+-");
    assert_eq!(sigma_p.walls, vec![1, 2, 3, 4]);
    assert_eq!(tau_p.walls, vec![2, 3, 4]);
    let sigma = limit_chamber(&sigma_p, &z_right()).unwrap();
    let tau = limit_chamber(&tau_p, &z_right()).unwrap();
    assert_eq!(sigma.walls, vec![1, 2, 4]);
    assert_eq!(tau.walls, vec![2, 3, 4]);
    assert!(sigma.bounded && tau.bounded);

    // the only chamber that disappears in the limit is Δ^van
    let vanishing: Vec<_> = left
        .iter()
        .filter(|c| limit_chamber(c, &z_right()).is_none())
        .collect();
    assert_eq!(vanishing, vec![&dvan]);
}

#[test]
fn orthogonal_complement_of_the_vanishing_chamber() {
    let z = z_left();
    let left = enumerate_chambers(&z).unwrap();
    let dvan = vanishing_chamber(&left, &jvan()).unwrap();
    let oc = orth_complement(&z, &left, &dvan, &jvan()).unwrap();
    assert_eq!(oc.chart, 1);
    assert_eq!(oc.perp.len(), binomial(4, 2) - 1);
    assert!(closures_meet(&z, &oc.exceptional.signs, &dvan.signs));
    // limits of (Δ^van)^⊥ are distinct and are exactly the chambers of z₀ bounded in
    // the same chart
    let z0 = z_right();
    let limits: BTreeSet<String> = oc
        .perp
        .iter()
        .map(|c| limit_chamber(c, &z0).expect("nonempty limit").id())
        .collect();
    assert_eq!(limits.len(), oc.perp.len());
    let bounded0: BTreeSet<String> = enumerate_chambers(&z0)
        .unwrap()
        .iter()
        .filter(|c| bounded_in_chart(&z0, &c.signs, oc.chart))
        .map(|c| c.id())
        .collect();
    assert_eq!(limits, bounded0);
}

#[test]
fn degenerate_pairings_of_named_chambers() {
    let oracle = PairingOracle::from_json(&fixture("k2n2_homology_table.json")).unwrap();
    let ctx = ParamContext::lambda(2, 2);
    let left = enumerate_chambers(&z_left()).unwrap();
    let dvan = vanishing_chamber(&left, &jvan()).unwrap();
    assert_eq!(oracle.named("dvan"), Some(dvan.id().as_str()));
    let sigma = chamber(&left, oracle.named("sigma'").unwrap());
    let tau = chamber(&left, oracle.named("tau'").unwrap());
    let plus = |c: &Chamber| LoadedCycle::new(c.clone(), Side::Plus);
    let minus = |c: &Chamber| LoadedCycle::new(c.clone(), Side::Minus);

    let ss = pairing_degenerate_h(&plus(&sigma), &minus(&sigma), &dvan, &oracle).unwrap();
    let st = pairing_degenerate_h(&plus(&sigma), &minus(&tau), &dvan, &oracle).unwrap();
    let want_ss = ctx
        .parse("(l1*l2 - 1)*(l1*l2*l3*l4 - 1)/((l1 - 1)*(l2 - 1)*(l4 - 1)*(l1*l2*l3 - 1))")
        .unwrap();
    let want_st = ctx
        .parse("-(l1*l2*l3*l4 - 1)/((l2 - 1)*(l4 - 1)*(l1*l2*l3 - 1))")
        .unwrap();
    assert_eq!(ss, want_ss);
    assert_eq!(st, want_st);
    // an equivalent partial-fraction form of the same value
    let alt = ctx
        .parse("-(1/(l2 - 1))*(1 + 1/(l4 - 1) + 1/(l1*l2*l3 - 1))")
        .unwrap();
    assert_eq!(st, alt);

    // self-pairing of Δ^van: (1 − ∏λ_j)/∏(1 − λ_j) over j ∈ J^van
    let self_pair = oracle.value(&plus(&dvan), &minus(&dvan)).unwrap();
    let want = ctx.parse("(1 - l1*l2*l3)/((1 - l1)*(1 - l2)*(1 - l3))").unwrap();
    assert_eq!(self_pair, want);
}

#[test]
fn oracle_gaps_and_vanishing_cross_terms() {
    let oracle = PairingOracle::from_json(&fixture("k2n2_homology_table.json")).unwrap();
    let z = z_left();
    let left = enumerate_chambers(&z).unwrap();
    let dvan = vanishing_chamber(&left, &jvan()).unwrap();
    let tau = chamber(&left, oracle.named("tau'").unwrap());
    let err = pairing_degenerate_h(
        &LoadedCycle::new(tau.clone(), Side::Plus),
        &LoadedCycle::new(tau.clone(), Side::Minus),
        &dvan,
        &oracle,
    );
    assert!(matches!(err, Err(HomologyError::OracleGap(_, _))));

    // members of (Δ^van)^⊥ pair to zero with Δ^van in both orders
    let oc = orth_complement(&z, &left, &dvan, &jvan()).unwrap();
    for c in &oc.perp {
        let a = oracle
            .value_or_local(&z, &LoadedCycle::new(c.clone(), Side::Plus), &LoadedCycle::new(dvan.clone(), Side::Minus))
            .unwrap();
        let b = oracle
            .value_or_local(&z, &LoadedCycle::new(dvan.clone(), Side::Plus), &LoadedCycle::new(c.clone(), Side::Minus))
            .unwrap();
        assert_eq!(a, RatFunc::from_int(0));
        assert_eq!(b, RatFunc::from_int(0));
    }
}

#[test]
fn zero_cross_terms_leave_the_pairing_unchanged() {
    let text = r#"{"k":1,"n":1,"entries":[
        {"left":"+--","left_side":"+","right":"+--","right_side":"-","value":"(l1*l2 - 1)/((l1 - 1)*(l2 - 1))"},
        {"left":"+--","left_side":"+","right":"++-","right_side":"-","value":"0"},
        {"left":"++-","left_side":"+","right":"+--","right_side":"-","value":"0"},
        {"left":"++-","left_side":"+","right":"++-","right_side":"-","value":"(l2*l3 - 1)/((l2 - 1)*(l3 - 1))"}
    ]}"#;
    let oracle = PairingOracle::from_json(text).unwrap();
    let z = CoeffMatrix::from_ints(1, 1, &[vec![1, 0, -1, -3], vec![0, 1, 1, 1]]).unwrap();
    let ch = enumerate_chambers(&z).unwrap();
    let a = chamber(&ch, "+--");
    let v = chamber(&ch, "++-");
    let got = pairing_degenerate_h(
        &LoadedCycle::new(a.clone(), Side::Plus),
        &LoadedCycle::new(a.clone(), Side::Minus),
        &v,
        &oracle,
    )
    .unwrap();
    assert_eq!(got, oracle.context().parse("(l1*l2 - 1)/((l1 - 1)*(l2 - 1))").unwrap());
}

#[test]
fn vanishing_chamber_shrinks_with_epsilon() {
    let z0 = z_right();
    let widths: Vec<_> = [14u32, 15]
        .iter()
        .map(|&m| {
            let z = z0.perturb_with(&jvan(), m);
            let ch = enumerate_chambers(&z).unwrap();
            let dv = vanishing_chamber(&ch, &jvan()).unwrap();
            assert!(dv.bounded);
            let pts: Vec<Vec<_>> = [[1, 2], [1, 3], [2, 3]]
                .iter()
                .map(|p| z.vertex(p).unwrap())
                .collect();
            let xs: Vec<_> = pts.iter().map(|p| p[0].clone()).collect();
            xs.iter().max().unwrap() - xs.iter().min().unwrap()
        })
        .collect();
    let ratio = &widths[1] / &widths[0];
    let ratio = twisted_core::field::rat_to_f64(&ratio);
    assert!((ratio - 0.5).abs() < 0.05, "ratio {ratio}");
}

#[test]
fn random_degenerate_arrangements_perturb_consistently() {
    for seed in 0..6u64 {
        let (z0, jv) = CoeffMatrix::random_one_degenerate(2, 2, seed);
        let (z, _) = z0.perturb(&jv).unwrap();
        let ch = enumerate_chambers(&z).unwrap();
        let b = binomial(4, 2);
        assert_eq!(ch.iter().filter(|c| c.bounded).count(), b);
        assert_eq!(
            enumerate_chambers(&z0).unwrap().iter().filter(|c| c.bounded).count(),
            b - 1
        );
        let dv = vanishing_chamber(&ch, &jv).unwrap();
        assert_eq!(dv.bounded, !jv.contains(0));
        assert_eq!(limit_chamber(&dv, &z0), None);
        let oc = orth_complement(&z, &ch, &dv, &jv).unwrap();
        assert_eq!(oc.perp.len(), b - 1, "seed {seed}, J^van {jv}");
        let limits: BTreeSet<String> = oc
            .perp
            .iter()
            .map(|c| limit_chamber(c, &z0).unwrap().id())
            .collect();
        assert_eq!(limits.len(), b - 1);
        if jv.contains(0) {
            let bounded0: BTreeSet<String> = enumerate_chambers(&z0)
                .unwrap()
                .into_iter()
                .filter(|c| c.bounded)
                .map(|c| c.id())
                .collect();
            assert_eq!(limits, bounded0);
            assert!(oc.exceptional.bounded);
        }
    }
}
