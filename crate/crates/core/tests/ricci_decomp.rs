mod common;

use clairaut_core::clairaut;
use clairaut_core::ricci_decomp::{self, BetaData, Block, DecompContext, Pair};

#[test]
fn clairaut_and_general_forms_differ_by_the_divergence_substitution() {
    let scn = common::scenario_with_count("golden", 5);
    let (samples, _) = scn.samples().unwrap();
    for at in &samples {
        let p = at.point();
        let ctx = DecompContext::new(&scn.submersion, p).unwrap();
        let beta = BetaData::new(&scn, p).unwrap();
        let vv = Pair::new(Block::VerticalVertical, 0, 0);
        let gap = ricci_decomp::ccs_ricci(&ctx, &beta, vv).rhs_total - ricci_decomp::hcs_ricci(&ctx, vv).rhs_total;
        let div = ricci_decomp::substitution_identities(&ctx, &beta)
            .into_iter()
            .find(|r| r.name == "substitution.divergence")
            .unwrap();
        assert!((gap.abs() - div.residual).abs() < 1e-6, "{gap} vs {}", div.residual);
        // Ric(V, V) = −e^{2u1}; the Clairaut form gives twice that.
        let e = (2.0 * p[0]).exp();
        assert!((ricci_decomp::hcs_ricci(&ctx, vv).intrinsic + e).abs() < 1e-8);
        assert!((ricci_decomp::ccs_ricci(&ctx, &beta, vv).rhs_total + 2.0 * e).abs() < 1e-6);
        for pair in Pair::all(Block::HorizontalHorizontal, 1, 2) {
            let b = ricci_decomp::ccs_ricci(&ctx, &beta, pair);
            assert!(b.delta.abs() < 1e-6, "{pair:?}: {}", b.delta);
        }
    }
}

#[test]
fn dilation_is_fourth_power() {
    let scn = common::scenario_with_count("golden", 5);
    let (samples, _) = scn.samples().unwrap();
    for at in &samples {
        let want = (4.0 * at.point()[0]).exp();
        assert!((at.sigma2() - want).abs() < 1e-12 * want);
    }
}

#[test]
fn fiber_coordinate_perturbation_keeps_the_certificate() {
    let scn = common::scenario_with_count("perturbed_fiber_coordinate", 8);
    let (samples, _) = scn.samples().unwrap();
    let report = clairaut::clairaut_certificate(&scn, &samples).unwrap();
    assert!(!report.any_failed(), "{}", report.to_json());

    let scn = common::scenario_with_count("perturbed", 8);
    let (samples, _) = scn.samples().unwrap();
    let report = clairaut::clairaut_certificate(&scn, &samples).unwrap();
    assert!(report.record("clairaut.umbilical_fibers").unwrap().max_residual > 1e-3);
}
