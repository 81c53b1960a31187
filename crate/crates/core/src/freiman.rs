//! The pivoting pipeline: correlation profile over group translates,
//! dichotomy detection, index-two subgroup extraction, orbit
//! concentration, and verification of the edge-count companion condition.

use crate::error::{Error, Result};
use crate::graph::{GraphKind, SpectralInstance};
use crate::group::{invert, FiniteGroup, GroupAction};
use crate::real::Real;
use crate::spectral::{DerivedConstants, SpectralProfile};

/// Absolute tie tolerance on threshold comparisons; boundary values count
/// as outside the open interval.
fn tie_tol<R: Real>() -> R {
    R::of(1e-12).max(R::epsilon() * R::of(4.0))
}

/// Correlations of the positive part against every translate:
/// `values[tau] = <f_+, (tau . f)_+>`.
#[derive(Debug, Clone)]
pub struct CorrelationProfile<R> {
    pub values: Vec<R>,
    pub norm_plus_sq: R,
}

impl<R: Real> CorrelationProfile<R> {
    /// Synthetic profile; lets the extraction logic be tested without a
    /// spectral computation behind it.
    pub fn from_values(values: Vec<R>, norm_plus_sq: R) -> Self {
        CorrelationProfile {
            values,
            norm_plus_sq,
        }
    }
}

/// `values[tau] = sum over v with f(v) > 0 and f(tau^{-1} v) > 0 of
/// f(v) f(tau^{-1} v)`.
pub fn correlation_profile<R: Real>(
    profile: &SpectralProfile<R>,
    action: &GroupAction,
) -> CorrelationProfile<R> {
    let f = &profile.f;
    let n = f.len();
    let order = action.group().order();
    let mut values = Vec::with_capacity(order);
    for tau in 0..order {
        let tau_inv = action.group().inv(tau);
        let mut acc = R::zero();
        for v in 0..n {
            let fv = f[v];
            if fv > R::zero() {
                let fu = f[action.apply(tau_inv, v)];
                if fu > R::zero() {
                    acc += fv * fu;
                }
            }
        }
        values.push(acc);
    }
    CorrelationProfile {
        values,
        norm_plus_sq: profile.norm_plus_sq(),
    }
}

/// Outcome of scanning for a correlation strictly inside the middle
/// interval `(delta B, (1 - delta) B)` with `B = ||f_+||^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DichotomyVerdict {
    /// First group element (in element order) whose correlation lies
    /// strictly inside the interval.
    Witness(usize),
    NoDichotomy,
}

/// Scan without a range restriction on `delta`; used internally where the
/// computed threshold may be negative (interval covers everything).
pub(crate) fn middle_witness<R: Real>(corr: &CorrelationProfile<R>, delta: R) -> DichotomyVerdict {
    let b = corr.norm_plus_sq;
    let lo = delta * b;
    let hi = (R::one() - delta) * b;
    let tie = tie_tol::<R>();
    for (tau, &v) in corr.values.iter().enumerate() {
        if v - lo > tie && hi - v > tie {
            return DichotomyVerdict::Witness(tau);
        }
    }
    DichotomyVerdict::NoDichotomy
}

/// First translate strictly inside the middle interval, or `NoDichotomy`.
/// Requires `delta` in the open interval (0, 1/2).
pub fn dichotomy_test<R: Real>(
    corr: &CorrelationProfile<R>,
    delta: R,
) -> Result<DichotomyVerdict> {
    if !(delta > R::zero() && delta < R::of(0.5)) {
        return Err(Error::InvalidDelta(delta.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(middle_witness(corr, delta))
}

/// The extracted candidate subgroup with its verification record.
#[derive(Debug, Clone)]
pub struct IndexTwoExtraction {
    pub h: Vec<usize>,
    pub verified_closure: bool,
    pub verified_index: bool,
}

/// Collect `H = {tau : values[tau] >= (1 - delta) ||f_+||^2}` and verify
/// that it is a subgroup of index two. Failures name the hypothesis set
/// that must have been violated upstream.
pub fn extract_index_two<R: Real>(
    corr: &CorrelationProfile<R>,
    group: &FiniteGroup,
    delta: R,
) -> Result<IndexTwoExtraction> {
    let b = corr.norm_plus_sq;
    let threshold = (R::one() - delta) * b - tie_tol::<R>();
    let h: Vec<usize> = (0..group.order())
        .filter(|&tau| corr.values[tau] >= threshold)
        .collect();

    let hypotheses = "kappa <= 1/260, xi <= 4/5, eigenfunction and \
                      no-transitive-index-two-subgroup conditions";
    let mut member = vec![false; group.order()];
    for &tau in &h {
        member[tau] = true;
    }
    if !member[group.identity()] {
        return Err(Error::NotASubgroup(format!(
            "identity not in H; some hypothesis of {{{hypotheses}}} failed"
        )));
    }
    for &x in &h {
        if !member[group.inv(x)] {
            return Err(Error::NotASubgroup(format!(
                "inverse of {x} escapes H; some hypothesis of {{{hypotheses}}} failed"
            )));
        }
        for &y in &h {
            let p = group.mul(x, y);
            if !member[p] {
                return Err(Error::NotASubgroup(format!(
                    "product {x}*{y} = {p} escapes H; some hypothesis of {{{hypotheses}}} failed"
                )));
            }
        }
    }
    if 2 * h.len() != group.order() {
        let actual = if h.is_empty() {
            0
        } else {
            group.order() / h.len()
        };
        return Err(Error::WrongIndex {
            expected: 2,
            actual,
            detail: format!(
                "|H| = {} in a group of order {}; some hypothesis of {{{hypotheses}}} failed",
                h.len(),
                group.order()
            ),
        });
    }
    Ok(IndexTwoExtraction {
        h,
        verified_closure: true,
        verified_index: true,
    })
}

/// Orbit concentration bound for the extracted subgroup: the positive
/// support sits inside one orbit up to an explicit error term.
#[derive(Debug, Clone)]
pub struct OrbitConcentration<R> {
    /// `min over orbits O of |supp(f_+) inter O^c| / n`.
    pub lhs: R,
    /// `sigma/sqrt(2) + (sqrt(delta)/2) sqrt((1 + sigma + kappa + 2 sqrt(2) sqrt(kappa)) / (2 (1 - kappa)))`.
    pub rhs: R,
    pub orbits: Vec<Vec<usize>>,
}

pub fn orbit_concentration<R: Real>(
    h: &[usize],
    profile: &SpectralProfile<R>,
    consts: &DerivedConstants<R>,
    action: &GroupAction,
) -> Result<OrbitConcentration<R>> {
    let kappa = consts.kappa;
    if !(kappa > R::zero() && kappa <= R::of(1.0 / 260.0) + tie_tol::<R>()) {
        return Err(Error::HypothesisNotMet(format!(
            "kappa = {kappa} outside (0, 1/260]"
        )));
    }
    if consts.xi > R::of(0.8) + tie_tol::<R>() {
        return Err(Error::HypothesisNotMet(format!(
            "xi = {} exceeds 4/5",
            consts.xi
        )));
    }
    let orbits = action.subgroup_orbits(h)?;
    if orbits.len() < 2 {
        return Err(Error::HypothesisNotMet(
            "index-two subgroup acts transitively".into(),
        ));
    }
    let n = action.n();
    let mut in_plus = vec![false; n];
    for &v in &profile.supp_plus {
        in_plus[v] = true;
    }
    let lhs = orbits
        .iter()
        .map(|orbit| {
            let mut in_orbit = vec![false; n];
            for &v in orbit {
                in_orbit[v] = true;
            }
            let outside = (0..n).filter(|&v| in_plus[v] && !in_orbit[v]).count();
            R::of_usize(outside) / R::of_usize(n)
        })
        .fold(R::infinity(), |m, x| m.min(x));

    let one = R::one();
    let sigma = consts.sigma_c;
    let delta = consts.delta;
    let ratio = (one + sigma + kappa + R::of(2.0) * R::of(2.0).sqrt() * kappa.sqrt())
        / (R::of(2.0) * (one - kappa));
    let rhs = sigma / R::of(2.0).sqrt() + delta.sqrt() / R::of(2.0) * ratio.sqrt();
    Ok(OrbitConcentration { lhs, rhs, orbits })
}

/// Verification record for the edge-count companion condition: for each
/// group element `tau` there is a vertex permutation `c = companion(tau)`
/// with `a[u][v] = a[c(u)][tau(v)]` for all `u, v`.
#[derive(Debug, Clone)]
pub struct Left2Right {
    pub verified: bool,
    /// Companion permutations, one per group element, when verified.
    pub companions: Option<Vec<Vec<u16>>>,
    /// First failing `(tau, u, v)` otherwise.
    pub failure: Option<(usize, usize, usize)>,
}

fn canonical_companion(inst: &SpectralInstance, tau: usize) -> Vec<u16> {
    let action = inst.action();
    let group = action.group();
    let n = inst.n();
    match inst.kind() {
        // left translation is a graph automorphism
        GraphKind::Cayley => (0..n).map(|u| action.apply(tau, u) as u16).collect(),
        // right translation by tau^{-1} preserves u*v membership
        GraphKind::CayleySum => {
            let ti = group.inv(tau);
            (0..n).map(|u| group.mul(u, ti) as u16).collect()
        }
        // conjugate the translations through the twist
        GraphKind::TwistedCayley => {
            let sigma = inst.automorphism().expect("twisted instance has sigma");
            let sigma16: Vec<u16> = sigma.iter().map(|&x| x as u16).collect();
            let sigma_inv = invert(&sigma16);
            (0..n)
                .map(|u| sigma[group.mul(tau, sigma_inv[u] as usize)] as u16)
                .collect()
        }
        GraphKind::TwistedCayleySum => {
            let sigma = inst.automorphism().expect("twisted instance has sigma");
            let sigma16: Vec<u16> = sigma.iter().map(|&x| x as u16).collect();
            let sigma_inv = invert(&sigma16);
            let ti = group.inv(tau);
            (0..n)
                .map(|u| sigma[group.mul(sigma_inv[u] as usize, ti)] as u16)
                .collect()
        }
        // the action was verified to fix the adjacency entrywise
        GraphKind::VertexTransitive => (0..n).map(|u| action.apply(tau, u) as u16).collect(),
    }
}

/// Check the companion condition entrywise for every group element, using
/// the supplied candidates or the canonical ones for the instance kind.
pub fn verify_left2right(
    inst: &SpectralInstance,
    candidates: Option<&[Vec<usize>]>,
) -> Left2Right {
    let action = inst.action();
    let order = action.group().order();
    let n = inst.n();
    if let Some(c) = candidates {
        if c.len() != order {
            return Left2Right {
                verified: false,
                companions: None,
                failure: Some((0, 0, 0)),
            };
        }
    }
    let mut companions: Vec<Vec<u16>> = Vec::with_capacity(order);
    for tau in 0..order {
        let companion: Vec<u16> = match candidates {
            Some(c) => c[tau].iter().map(|&x| x as u16).collect(),
            None => canonical_companion(inst, tau),
        };
        for u in 0..n {
            for v in 0..n {
                if inst.a(u, v) != inst.a(companion[u] as usize, action.apply(tau, v)) {
                    return Left2Right {
                        verified: false,
                        companions: None,
                        failure: Some((tau, u, v)),
                    };
                }
            }
        }
        companions.push(companion);
    }
    Left2Right {
        verified: true,
        companions: Some(companions),
        failure: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_instance, GraphKind};
    use crate::group::FiniteGroup;
    use crate::spectral::bottom_eigenfunction;
    use approx::assert_abs_diff_eq;

    fn prism() -> SpectralInstance {
        let g = FiniteGroup::cyclic(6).unwrap();
        build_instance(GraphKind::Cayley, &g, &[2, 3, 4], None).unwrap()
    }

    #[test]
    fn correlation_identity_equals_plus_norm() {
        let inst = prism();
        let p = bottom_eigenfunction::<f64>(&inst).unwrap();
        let corr = correlation_profile(&p, inst.action());
        assert_abs_diff_eq!(corr.values[0], corr.norm_plus_sq, epsilon = 1e-12);
    }

    #[test]
    fn correlation_values_are_within_cauchy_schwarz() {
        let inst = prism();
        let p = bottom_eigenfunction::<f64>(&inst).unwrap();
        let corr = correlation_profile(&p, inst.action());
        for &v in &corr.values {
            assert!(v >= 0.0);
            assert!(v <= corr.norm_plus_sq * (1.0 + 1e-9));
        }
    }

    #[test]
    fn prism_correlation_ratios() {
        // with f proportional to (1, .5, -.5, -1, -.5, .5), direct
        // summation gives <f_+, (shift_k . f)_+> / ||f_+||^2 equal to
        // 1, 2/3, 1/6, 0, 1/6, 2/3 for k = 0..5
        let inst = prism();
        let seed = vec![1.0, 0.5, -0.5, -1.0, -0.5, 0.5];
        let p = crate::spectral::profile_from_seed(
            &inst,
            vec![3.0, 1.0, 0.0, 0.0, -2.0, -2.0],
            -2.0,
            &seed,
        )
        .unwrap();
        let corr = correlation_profile(&p, inst.action());
        let want = [1.0, 2.0 / 3.0, 1.0 / 6.0, 0.0, 1.0 / 6.0, 2.0 / 3.0];
        for (tau, &w) in want.iter().enumerate() {
            assert_abs_diff_eq!(corr.values[tau] / corr.norm_plus_sq, w, epsilon = 1e-12);
        }
    }

    #[test]
    fn t_to_one_counting_identity() {
        // sum_tau values[tau] = t (sum over supp(f_+) of f)^2
        let inst = prism();
        let p = bottom_eigenfunction::<f64>(&inst).unwrap();
        let corr = correlation_profile(&p, inst.action());
        let t = inst.action().stabilizer_size().unwrap() as f64;
        let total: f64 = corr.values.iter().sum();
        let plus_sum: f64 = p.supp_plus.iter().map(|&v| p.f[v]).sum();
        assert_abs_diff_eq!(total, t * plus_sum * plus_sum, epsilon = 1e-9);
    }

    #[test]
    fn prism_dichotomy_witness_is_shift_by_one() {
        let inst = prism();
        let p = bottom_eigenfunction::<f64>(&inst).unwrap();
        let corr = correlation_profile(&p, inst.action());
        match dichotomy_test(&corr, 0.1).unwrap() {
            DichotomyVerdict::Witness(tau) => assert_eq!(tau, 1),
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn two_cluster_profile_has_no_dichotomy() {
        let b = 1.5f64;
        let values = vec![b, 0.0, b, 0.0, b, 0.0];
        let corr = CorrelationProfile::from_values(values, b);
        for delta in [0.05, 0.1, 0.3, 0.49] {
            assert_eq!(
                dichotomy_test(&corr, delta).unwrap(),
                DichotomyVerdict::NoDichotomy
            );
        }
    }

    #[test]
    fn delta_range_is_enforced() {
        let corr = CorrelationProfile::from_values(vec![1.0], 1.0);
        assert!(matches!(
            dichotomy_test(&corr, 0.5),
            Err(Error::InvalidDelta(_))
        ));
        assert!(matches!(
            dichotomy_test(&corr, 0.0),
            Err(Error::InvalidDelta(_))
        ));
        assert!(matches!(
            dichotomy_test(&corr, -0.1),
            Err(Error::InvalidDelta(_))
        ));
    }

    #[test]
    fn extraction_on_synthetic_two_cluster() {
        let g = FiniteGroup::cyclic(6).unwrap();
        let b = 1.5f64;
        let values = vec![b, 0.0, b, 0.0, b, 0.0];
        let corr = CorrelationProfile::from_values(values, b);
        let out = extract_index_two(&corr, &g, 0.1).unwrap();
        assert_eq!(out.h, vec![0, 2, 4]);
        assert!(out.verified_closure && out.verified_index);
    }

    #[test]
    fn extraction_rejects_non_closed_set() {
        let g = FiniteGroup::cyclic(6).unwrap();
        let b = 1.0f64;
        let values = vec![b, b, 0.0, 0.0, 0.0, 0.0];
        let corr = CorrelationProfile::from_values(values, b);
        // 1 + 1 = 2 escapes {0, 1}
        assert!(matches!(
            extract_index_two(&corr, &g, 0.1),
            Err(Error::NotASubgroup(_))
        ));
    }

    #[test]
    fn extraction_rejects_wrong_index() {
        let g = FiniteGroup::cyclic(6).unwrap();
        let b = 1.0f64;
        let values = vec![b, 0.0, 0.0, b, 0.0, 0.0]; // {0, 3}: subgroup of index 3
        let corr = CorrelationProfile::from_values(values, b);
        assert!(matches!(
            extract_index_two(&corr, &g, 0.1),
            Err(Error::WrongIndex { expected: 2, actual: 3, .. })
        ));
    }

    #[test]
    fn extraction_is_stable_under_delta_refinement() {
        // no value inside (delta' B, delta B]: halving delta keeps H
        let g = FiniteGroup::cyclic(6).unwrap();
        let b = 2.0f64;
        let values = vec![b, 0.01, b * 0.97, 0.01, b * 0.97, 0.01];
        let corr = CorrelationProfile::from_values(values, b);
        let h1 = extract_index_two(&corr, &g, 0.1).unwrap().h;
        let h2 = extract_index_two(&corr, &g, 0.05).unwrap().h;
        assert_eq!(h1, h2);
        assert_eq!(h1, vec![0, 2, 4]);
    }

    #[test]
    fn left2right_holds_on_cayley_with_canonical_map() {
        let inst = prism();
        let out = verify_left2right(&inst, None);
        assert!(out.verified);
        let comp = out.companions.unwrap();
        // canonical companion for a Cayley graph is tau itself
        for tau in 0..6 {
            for u in 0..6 {
                assert_eq!(comp[tau][u] as usize, inst.action().apply(tau, u));
            }
        }
    }

    #[test]
    fn left2right_fails_on_scrambled_candidate() {
        let inst = prism();
        let mut cands: Vec<Vec<usize>> = (0..6)
            .map(|tau| (0..6).map(|u| inst.action().apply(tau, u)).collect())
            .collect();
        cands[1].swap(0, 1);
        let out = verify_left2right(&inst, Some(&cands));
        assert!(!out.verified);
        let (tau, _, _) = out.failure.unwrap();
        assert_eq!(tau, 1);
    }

    #[test]
    fn left2right_holds_on_cayley_sum() {
        // nonabelian check: S3 with a conjugation-closed connection set
        let g = FiniteGroup::symmetric(3).unwrap();
        let transpositions: Vec<usize> = (0..6)
            .filter(|&x| x != g.identity() && g.mul(x, x) == g.identity())
            .collect();
        assert_eq!(transpositions.len(), 3);
        let inst = build_instance(GraphKind::CayleySum, &g, &transpositions, None).unwrap();
        assert!(inst.flags().undirected);
        let out = verify_left2right(&inst, None);
        assert!(out.verified, "failure: {:?}", out.failure);
    }

    #[test]
    fn left2right_holds_on_twisted_cayley() {
        let g = FiniteGroup::cyclic(6).unwrap();
        let neg: Vec<usize> = (0..6).map(|x| (6 - x) % 6).collect();
        let inst = build_instance(GraphKind::TwistedCayley, &g, &[1, 5], Some(&neg)).unwrap();
        let out = verify_left2right(&inst, None);
        assert!(out.verified, "failure: {:?}", out.failure);
    }

    #[test]
    fn orbit_concentration_trivial_case() {
        // synthetic: kappa tiny, supp(f_+) equal to one orbit exactly
        let inst = prism();
        let mut p = bottom_eigenfunction::<f64>(&inst).unwrap();
        p.mu = -1.0 + 0.5 / 260.0; // kappa = (1+mu)/(1-mu2) small
        p.mu2 = 0.0;
        p.supp_plus = vec![0, 2, 4];
        p.supp_minus = vec![1, 3, 5];
        let consts = crate::spectral::DerivedConstants {
            kappa: p.kappa(),
            sigma_c: (p.kappa() / (1.0 - p.kappa())).sqrt(),
            theta_c: 0.5,
            xi: 0.8,
            delta: crate::spectral::delta_threshold(p.kappa(), 0.8),
            beta_f: 0.1,
            kappa_in_range: true,
        };
        let out = orbit_concentration(&[0, 2, 4], &p, &consts, inst.action()).unwrap();
        assert_eq!(out.lhs, 0.0);
        assert!(out.rhs > 0.0);
        assert_eq!(out.orbits.len(), 2);
    }

    #[test]
    fn orbit_concentration_gate() {
        let inst = prism();
        let p = bottom_eigenfunction::<f64>(&inst).unwrap();
        let consts = crate::spectral::derived_constants(&p, &inst, 0.8);
        // prism kappa = 1/2 fails the gate
        assert!(matches!(
            orbit_concentration(&[0, 2, 4], &p, &consts, inst.action()),
            Err(Error::HypothesisNotMet(_))
        ));
    }

    #[test]
    fn concentration_bound_spot_value() {
        // at kappa = 1/260, xi = 4/5 the right-hand side evaluates to
        // sigma/sqrt(2) + (sqrt(delta)/2) sqrt(ratio) = 0.05334593731...
        let kappa: f64 = 1.0 / 260.0;
        let sigma = (kappa / (1.0 - kappa)).sqrt();
        let delta = crate::spectral::delta_threshold(kappa, 0.8);
        let ratio = (1.0 + sigma + kappa + 2.0 * 2.0f64.sqrt() * kappa.sqrt()) / (2.0 * (1.0 - kappa));
        let rhs = sigma / 2.0f64.sqrt() + delta.sqrt() / 2.0 * ratio.sqrt();
        assert_abs_diff_eq!(rhs, 0.053345937312993886, epsilon = 1e-12);
    }
}
