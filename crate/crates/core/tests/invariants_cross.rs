//! Cross-module invariants exercised on a mixed instance corpus.

use proptest::prelude::*;

use specgap::certify::{certify_instance, CertifyOptions};
use specgap::corpus::{petersen, prism, symmetric_connection_sets, triangle};
use specgap::freiman::verify_left2right;
use specgap::graph::{
    build_instance, decompose_into_permutations, validate_instance, GraphKind, SpectralInstance,
};
use specgap::group::FiniteGroup;
use specgap::invariants::{edge_bipartiteness_exact, to_real};

fn mixed_corpus() -> Vec<SpectralInstance> {
    let z5 = FiniteGroup::cyclic(5).unwrap();
    let z7 = FiniteGroup::cyclic(7).unwrap();
    let d4 = FiniteGroup::dihedral(4).unwrap();
    let s3 = FiniteGroup::symmetric(3).unwrap();
    let q8 = FiniteGroup::quaternion8().unwrap();
    let transpositions: Vec<usize> = (0..6)
        .filter(|&x| x != s3.identity() && s3.mul(x, x) == s3.identity())
        .collect();
    let neg6: Vec<usize> = (0..6).map(|x| (6 - x) % 6).collect();
    let z6 = FiniteGroup::cyclic(6).unwrap();
    vec![
        triangle(),
        build_instance(GraphKind::Cayley, &z5, &[1, 4], None).unwrap(),
        build_instance(GraphKind::Cayley, &z5, &[0, 1, 4], None).unwrap(),
        build_instance(GraphKind::Cayley, &z7, &[1, 2, 5, 6], None).unwrap(),
        build_instance(GraphKind::Cayley, &d4, &[2, 4, 5], None).unwrap(),
        build_instance(GraphKind::Cayley, &s3, &transpositions, None).unwrap(),
        build_instance(GraphKind::Cayley, &q8, &[2, 3, 4, 5], None).unwrap(),
        build_instance(GraphKind::CayleySum, &s3, &transpositions, None).unwrap(),
        build_instance(GraphKind::TwistedCayley, &z6, &[1, 5], Some(&neg6)).unwrap(),
        prism(),
        petersen(),
    ]
}

#[test]
fn every_check_id_appears_exactly_once() {
    let report = certify_instance::<f64>(&prism(), &CertifyOptions::default()).unwrap();
    let ids: Vec<&str> = report.checks.iter().map(|c| c.id.as_str()).collect();
    let want: Vec<String> = (1..=15).map(|k| format!("C{k}")).collect();
    assert_eq!(ids, want.iter().map(|s| s.as_str()).collect::<Vec<_>>());
}

#[test]
fn beta_f_dominates_beta_edge() {
    // the sign vector of a nowhere-zero f is one admissible candidate in
    // the bipartiteness minimum
    let opts = CertifyOptions::<f64>::default();
    for inst in mixed_corpus() {
        if !validate_instance(&inst).ok() || inst.n() > 13 {
            continue;
        }
        let report = certify_instance(&inst, &opts).unwrap();
        let (Some(beta_f), Some(beta_edge)) = (
            report.constants.beta_f,
            report.constants.edge_bipartiteness.as_ref(),
        ) else {
            continue;
        };
        assert!(
            beta_f >= beta_edge.value - 1e-12,
            "beta_f < beta_edge on {}",
            inst.label()
        );
    }
}

#[test]
fn bipartite_iff_beta_edge_zero_on_small_corpus() {
    for n in 3..=8 {
        let g = FiniteGroup::cyclic(n).unwrap();
        for s in symmetric_connection_sets(&g, 4, true) {
            let inst = build_instance(GraphKind::Cayley, &g, &s, None).unwrap();
            let beta = edge_bipartiteness_exact(&inst, 13).unwrap();
            assert_eq!(
                to_real::<f64>(beta) == 0.0,
                !inst.flags().nonbipartite,
                "mismatch on {}",
                inst.label()
            );
        }
    }
}

#[test]
fn left2right_canonical_map_verifies_across_kinds() {
    for inst in mixed_corpus() {
        let out = verify_left2right(&inst, None);
        assert!(
            out.verified,
            "companion condition unverified on {}: {:?}",
            inst.label(),
            out.failure
        );
    }
}

#[test]
fn dual_cheeger_sandwich_on_small_corpus() {
    let opts = CertifyOptions::<f64>::default();
    for inst in mixed_corpus() {
        if !validate_instance(&inst).ok() || inst.n() > 13 {
            continue;
        }
        let report = certify_instance(&inst, &opts).unwrap();
        let beta = report.constants.edge_bipartiteness.as_ref().unwrap().value;
        let lower_gap = 1.0 + report.mu;
        assert!(2.0 * beta >= lower_gap - 1e-9, "left side on {}", inst.label());
        assert!(
            lower_gap >= beta * beta / 2.0 - 1e-9,
            "right side on {}",
            inst.label()
        );
    }
}

#[test]
fn profile_conditions_on_valid_instances() {
    for inst in mixed_corpus() {
        if !validate_instance(&inst).ok() {
            continue;
        }
        let p = specgap::spectral::bottom_eigenfunction::<f64>(&inst).unwrap();
        let d = inst.d() as f64;
        // top eigenvalue is d with a strict gap on connected instances
        assert!((p.eigenvalues[0] - d).abs() <= 1e-8 * d, "{}", inst.label());
        assert!(p.eigenvalues[0] - p.eigenvalues[1] > 1e-9, "{}", inst.label());
        // non-bipartite: mu stays above -1; and mu <= mu2 always
        assert!(p.mu > -1.0 + 1e-12, "{}", inst.label());
        assert!(p.mu <= p.mu2 + 1e-12, "{}", inst.label());
        assert!(p.status.orthogonal_to_ones, "{}", inst.label());
        assert!(p.status.nowhere_zero, "{}", inst.label());
        assert!(p.supp_plus.len() >= p.supp_minus.len(), "{}", inst.label());
        assert_eq!(
            p.supp_plus.len() + p.supp_minus.len(),
            inst.n(),
            "{}",
            inst.label()
        );
        assert!(p.residual <= 1e-8 * d, "{}", inst.label());
    }
}

#[test]
fn simplicity_claim_above_scan_cap_activates_c2() {
    // order 250 is above the brute-force simplicity cap; without the
    // claim C2 is vacuous, with it the check runs
    let g = FiniteGroup::cyclic(250).unwrap();
    let inst = build_instance(GraphKind::Cayley, &g, &[1, 2, 248, 249], None).unwrap();
    assert!(validate_instance(&inst).ok());
    let plain = certify_instance::<f64>(&inst, &CertifyOptions::default()).unwrap();
    let c2 = plain.checks.iter().find(|c| c.id == "C2").unwrap();
    assert!(!c2.hypothesis_satisfied);
    let opts = CertifyOptions::<f64> {
        assume_simple: Some(true),
        ..CertifyOptions::default()
    };
    let claimed = certify_instance::<f64>(&inst, &opts).unwrap();
    let c2 = claimed.checks.iter().find(|c| c.id == "C2").unwrap();
    assert!(c2.hypothesis_satisfied);
    assert_eq!(c2.status, specgap::certify::CheckStatus::Pass);
}

fn perm_strategy(m: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..m).collect::<Vec<usize>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_of_random_generators_is_a_group(
        g1 in perm_strategy(5),
        g2 in perm_strategy(5),
    ) {
        let (group, action) =
            FiniteGroup::from_permutation_generators(&[g1, g2], 5, 200).unwrap();
        // spot-check the axioms beyond what construction verifies
        for g in 0..group.order() {
            prop_assert_eq!(group.mul(g, group.inv(g)), group.identity());
            prop_assert_eq!(group.mul(group.identity(), g), g);
        }
        // Lagrange inside Sym(5)
        prop_assert_eq!(120 % group.order(), 0);
        prop_assert_eq!(action.n(), 5);
    }

    #[test]
    fn random_shuffled_permutations_decompose(
        p1 in perm_strategy(6),
        p2 in perm_strategy(6),
        p3 in perm_strategy(6),
    ) {
        let m = 6;
        let mut a = vec![0u32; m * m];
        for p in [&p1, &p2, &p3] {
            for v in 0..m {
                a[p[v] * m + v] += 1;
            }
        }
        let decomposition = decompose_into_permutations(m, 3, &a).unwrap();
        prop_assert_eq!(decomposition.len(), 3);
        let mut acc = vec![0u32; m * m];
        for p in &decomposition {
            for v in 0..m {
                acc[p[v] * m + v] += 1;
            }
        }
        prop_assert_eq!(acc, a);
    }

    #[test]
    fn sigma_overlap_is_a_fraction(
        pi in perm_strategy(8),
        vset in prop::collection::btree_set(0usize..8, 0..8),
    ) {
        let pi16: Vec<u16> = pi.iter().map(|&x| x as u16).collect();
        let vset: Vec<usize> = vset.into_iter().collect();
        let out = specgap::invariants::sigma_overlap(&pi16, &vset, 8);
        let sigma = to_real::<f64>(out.sigma);
        prop_assert!((0.0..=1.0).contains(&sigma));
        // the intersection lies inside the set
        for v in &out.intersection {
            prop_assert!(vset.contains(v));
        }
    }
}
