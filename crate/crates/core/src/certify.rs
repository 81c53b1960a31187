//! The certificate engine: evaluates every inequality on an instance,
//! recording hypothesis status, both sides, and margin, then aggregates
//! family scans.
//!
//! A check whose preconditions fail is reported vacuous, never silently
//! skipped; a check whose computation fails is reported failed with a
//! diagnostic. The slack policy for every comparison is
//! `margin >= -tol * max(1, |lhs|, |rhs|)`.

use std::collections::BTreeMap;

use num_rational::Rational64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{enumerate_family, FamilySpec};
use crate::error::{Error, Result};
use crate::freiman::{
    correlation_profile, extract_index_two, middle_witness, orbit_concentration, verify_left2right,
    CorrelationProfile, DichotomyVerdict, Left2Right,
};
use crate::graph::{validate_instance, SpectralInstance};
use crate::invariants::{
    edge_bipartiteness_exact, edge_cheeger_exact, nu_constant, to_real, vertex_cheeger_exact,
    DEFAULT_BIPARTITENESS_CAP, DEFAULT_CHEEGER_CAP,
};
use crate::real::Real;
use crate::spectral::{
    bottom_eigenfunction, decompose, default_xi, delta_threshold, derived_constants,
    Decomposition, DerivedConstants, SpectralProfile,
};

pub const SIMPLICITY_SCAN_CAP: usize = 200;

#[derive(Debug, Clone)]
pub struct CertifyOptions<R> {
    /// Mixing parameter; `None` selects the per-instance default
    /// (4/5 when nu = 1, else 123/1000).
    pub xi: Option<R>,
    /// Relative slack tolerance for every inequality and gate.
    pub tolerance: R,
    pub max_exact_bipartiteness: usize,
    pub max_exact_cheeger: usize,
    /// Simplicity claim for groups above the brute-force scan cap.
    pub assume_simple: Option<bool>,
}

impl<R: Real> Default for CertifyOptions<R> {
    fn default() -> Self {
        CertifyOptions {
            xi: None,
            tolerance: R::of(1e-9),
            max_exact_bipartiteness: DEFAULT_BIPARTITENESS_CAP,
            max_exact_cheeger: DEFAULT_CHEEGER_CAP,
            assume_simple: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Vacuous,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckResult<R> {
    pub id: String,
    pub hypothesis_satisfied: bool,
    pub lhs: Option<R>,
    pub rhs: Option<R>,
    pub margin: Option<R>,
    pub status: CheckStatus,
    /// Binding sub-inequality, vacuity reason, or failure diagnostic.
    pub detail: String,
    /// Some hypothesis gate sat within tolerance of its boundary.
    pub borderline: bool,
}

/// Accumulates the sub-inequalities of one check, keeping only the
/// binding one (smallest relative margin).
struct CheckAcc<R> {
    id: &'static str,
    hypothesis: bool,
    vacuous_reason: String,
    borderline: bool,
    tol: R,
    binding: Option<(String, R, R, R)>,
    all_pass: bool,
    failure: Option<String>,
}

impl<R: Real> CheckAcc<R> {
    fn new(id: &'static str, tol: R) -> Self {
        CheckAcc {
            id,
            hypothesis: true,
            vacuous_reason: String::new(),
            borderline: false,
            tol,
            binding: None,
            all_pass: true,
            failure: None,
        }
    }

    fn vacuous(mut self, reason: impl Into<String>) -> Self {
        self.hypothesis = false;
        self.vacuous_reason = reason.into();
        self
    }

    fn fail(&mut self, diagnostic: impl Into<String>) {
        self.failure = Some(diagnostic.into());
    }

    /// Record the claim `lhs >= rhs`.
    fn part(&mut self, label: impl FnOnce() -> String, lhs: R, rhs: R) {
        let scale = R::one().max(lhs.abs()).max(rhs.abs());
        let margin = lhs - rhs;
        let rel = margin / scale;
        if margin < -self.tol * scale {
            self.all_pass = false;
        }
        let replace = match &self.binding {
            None => true,
            Some((_, _, _, best)) => rel < *best,
        };
        if replace {
            self.binding = Some((label(), lhs, rhs, rel));
        }
    }

    fn finish(self) -> CheckResult<R> {
        if !self.hypothesis {
            return CheckResult {
                id: self.id.to_string(),
                hypothesis_satisfied: false,
                lhs: None,
                rhs: None,
                margin: None,
                status: CheckStatus::Vacuous,
                detail: self.vacuous_reason,
                borderline: self.borderline,
            };
        }
        if let Some(diag) = self.failure {
            return CheckResult {
                id: self.id.to_string(),
                hypothesis_satisfied: true,
                lhs: None,
                rhs: None,
                margin: None,
                status: CheckStatus::Fail,
                detail: diag,
                borderline: self.borderline,
            };
        }
        match self.binding {
            Some((label, lhs, rhs, _)) => CheckResult {
                id: self.id.to_string(),
                hypothesis_satisfied: true,
                lhs: Some(lhs),
                rhs: Some(rhs),
                margin: Some(lhs - rhs),
                status: if self.all_pass {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                detail: label,
                borderline: self.borderline,
            },
            None => CheckResult {
                id: self.id.to_string(),
                hypothesis_satisfied: true,
                lhs: None,
                rhs: None,
                margin: None,
                status: CheckStatus::Pass,
                detail: "no applicable sub-inequality".into(),
                borderline: self.borderline,
            },
        }
    }
}

/// `x <= bound` under the tolerance rule; also reports whether the
/// comparison was within tolerance of the boundary.
fn gate_le<R: Real>(x: R, bound: R, tol: R) -> (bool, bool) {
    let scale = R::one().max(x.abs()).max(bound.abs());
    ((x - bound) <= tol * scale, (x - bound).abs() <= tol * scale)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct InstanceSummary {
    pub label: String,
    pub kind: String,
    pub group: String,
    pub n: usize,
    pub d: usize,
    pub connection_set: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RationalValue<R> {
    pub exact: String,
    pub value: R,
}

impl<R: Real> RationalValue<R> {
    fn from_rational(q: Rational64) -> Self {
        RationalValue {
            exact: format!("{}/{}", q.numer(), q.denom()),
            value: to_real(q),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConstantsSection<R> {
    pub edge_cheeger: Option<RationalValue<R>>,
    pub vertex_cheeger: Option<RationalValue<R>>,
    pub edge_bipartiteness: Option<RationalValue<R>>,
    pub beta_f: Option<R>,
    pub nu: RationalValue<R>,
    pub sigma: Option<R>,
    pub theta: Option<R>,
    pub delta: Option<R>,
    pub xi: R,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FreimanSection<R> {
    pub left2right_verified: bool,
    /// Dichotomy verdict at the configured xi: "witness(tau)" or
    /// "no_dichotomy", absent when the profile is unavailable.
    pub dichotomy: Option<String>,
    pub witness: Option<usize>,
    /// Extracted index-two subgroup in the no-dichotomy branch.
    pub h: Option<Vec<usize>>,
    pub delta: Option<R>,
    /// Verdict data at the built-in default xi (used by the final check).
    pub default_xi: R,
    pub default_witness: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertificateReport<R> {
    pub instance: InstanceSummary,
    pub n: usize,
    pub d: usize,
    pub mu: R,
    pub mu2: R,
    pub kappa: R,
    pub constants: ConstantsSection<R>,
    pub freiman: FreimanSection<R>,
    pub checks: Vec<CheckResult<R>>,
    pub overall: String,
}

impl<R: Real> CertificateReport<R> {
    pub fn passed(&self) -> bool {
        self.overall == "pass"
    }

    /// One-line summary of why checks were or were not evaluated.
    pub fn hypothesis_summary(&self) -> String {
        let vacuous = self
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Vacuous)
            .count();
        format!(
            "hypotheses: kappa={} nu={} dichotomy={} left2right={} vacuous_checks={}",
            self.kappa,
            self.constants.nu.exact,
            self.freiman.dichotomy.as_deref().unwrap_or("unavailable"),
            self.freiman.left2right_verified,
            vacuous
        )
    }
}

/// Deterministic vertex subsets derived from the instance content.
fn pseudo_random_subsets(inst: &SpectralInstance, count: usize) -> Vec<Vec<usize>> {
    let mut hasher = Sha256::new();
    hasher.update(inst.kind().as_str().as_bytes());
    hasher.update((inst.n() as u64).to_le_bytes());
    hasher.update((inst.d() as u64).to_le_bytes());
    hasher.update((inst.action().group().order() as u64).to_le_bytes());
    for &x in inst.adjacency() {
        hasher.update(x.to_le_bytes());
    }
    let seed: [u8; 32] = hasher.finalize().into();
    let mut rng = ChaCha12Rng::from_seed(seed);
    (0..count)
        .map(|_| {
            (0..inst.n())
                .filter(|_| rng.next_u32() & 1 == 1)
                .collect()
        })
        .collect()
}

struct Workspace<R: Real> {
    profile: std::result::Result<SpectralProfile<R>, String>,
    decomp: Option<Decomposition<R>>,
    consts: Option<DerivedConstants<R>>,
    corr: Option<CorrelationProfile<R>>,
    kappa: R,
    mu: R,
    mu2: R,
    nu: Rational64,
    xi: R,
    xi_default: R,
    edge_cheeger: Option<Rational64>,
    vertex_cheeger: Option<Rational64>,
    beta_edge: Option<Rational64>,
    c2_hypothesis: bool,
    condition_no_transitive_index_two: bool,
    index_two_orbits: Vec<Vec<usize>>,
    random_sets: Vec<Vec<usize>>,
    left2right: Left2Right,
    verdict_config: Option<DichotomyVerdict>,
    verdict_default: Option<DichotomyVerdict>,
    extracted_h: Option<Vec<usize>>,
}

/// Evaluate all fifteen checks on a validated instance.
pub fn certify_instance<R: Real>(
    inst: &SpectralInstance,
    opts: &CertifyOptions<R>,
) -> Result<CertificateReport<R>> {
    let record = validate_instance(inst);
    if let Some(reason) = record.first_failure() {
        return Err(Error::InvalidInstance(reason.to_string()));
    }

    let ws = prepare(inst, opts)?;
    let tol = opts.tolerance;
    let mut checks: Vec<CheckResult<R>> = Vec::with_capacity(15);

    let one = R::one();
    let d_real = R::of_usize(inst.d());
    let n = inst.n();
    let lower_gap = one + ws.mu;
    let upper_gap = one - ws.mu2;
    let kappa = ws.kappa;
    // Condition on kappa strictly inside (0, 1): boundary instances
    // (within tolerance of either end) are classified out of range and
    // flagged borderline; the nowhere-vanishing guarantee degenerates at
    // kappa = 1.
    let (kappa_in_range, kappa_borderline) = {
        let scale = R::one().max(kappa.abs());
        let near_zero = kappa.abs() <= tol * scale;
        let near_one = (kappa - one).abs() <= tol * scale;
        (
            kappa > tol * scale && kappa < one - tol * scale,
            near_zero || near_one,
        )
    };
    // the eigenfunction conditions require a nowhere-zero f; a best-effort
    // f with zeros can only arise at boundary kappa
    let f_nowhere_zero = ws
        .profile
        .as_ref()
        .map(|p| p.status.nowhere_zero)
        .unwrap_or(true);

    // C1: main bound
    {
        let mut c = CheckAcc::new("C1", tol);
        c.part(
            || "1 + mu >= (1 - mu2) / (50000 d)".into(),
            lower_gap,
            upper_gap / (R::of(50000.0) * d_real),
        );
        checks.push(c.finish());
    }

    // C2: stronger bound for odd-order or simple groups
    {
        let mut c = CheckAcc::new("C2", tol);
        if ws.c2_hypothesis {
            c.part(
                || "1 + mu >= (1 - mu2) / 2525".into(),
                lower_gap,
                upper_gap / R::of(2525.0),
            );
            checks.push(c.finish());
        } else {
            checks.push(c.vacuous("group neither of odd order nor known simple").finish());
        }
    }

    // C3: vertex Cheeger corollary
    {
        let mut c = CheckAcc::new("C3", tol);
        match ws.vertex_cheeger {
            Some(h) => {
                let h: R = to_real(h);
                c.part(
                    || "1 + mu >= h^2 / (350000 d^2)".into(),
                    lower_gap,
                    h * h / (R::of(350000.0) * d_real * d_real),
                );
                if ws.c2_hypothesis {
                    c.part(
                        || "1 + mu >= h^2 / 17675".into(),
                        lower_gap,
                        h * h / R::of(17675.0),
                    );
                }
                checks.push(c.finish());
            }
            None => checks.push(c.vacuous("vertex Cheeger constant not computed exactly").finish()),
        }
    }

    // C4: dual Cheeger sandwich
    {
        let mut c = CheckAcc::new("C4", tol);
        match ws.beta_edge {
            Some(b) => {
                let b: R = to_real(b);
                c.part(|| "2 beta_edge >= 1 + mu".into(), R::of(2.0) * b, lower_gap);
                c.part(
                    || "1 + mu >= beta_edge^2 / 2".into(),
                    lower_gap,
                    b * b / R::of(2.0),
                );
                checks.push(c.finish());
            }
            None => checks.push(c.vacuous("edge bipartiteness constant not computed exactly").finish()),
        }
    }

    // C5: beta_edge against kappa
    {
        let mut c = CheckAcc::new("C5", tol);
        c.borderline |= kappa_borderline;
        match (kappa_in_range, ws.beta_edge) {
            (true, Some(b)) => {
                let b: R = to_real(b);
                c.part(
                    || "(1 + mu) / (2 (1 - kappa)) >= beta_edge".into(),
                    lower_gap / (R::of(2.0) * (one - kappa)),
                    b,
                );
                c.part(|| "kappa >= beta_edge / 2".into(), kappa, b / R::of(2.0));
                checks.push(c.finish());
            }
            (false, _) => checks.push(c.vacuous("kappa outside (0, 1)").finish()),
            (_, None) => checks.push(c.vacuous("edge bipartiteness constant not computed exactly").finish()),
        }
    }

    // C6: decomposition norm bounds
    {
        let mut c = CheckAcc::new("C6", tol);
        c.borderline |= kappa_borderline;
        if !kappa_in_range {
            checks.push(c.vacuous("kappa outside (0, 1)").finish());
        } else if !f_nowhere_zero {
            checks.push(c.vacuous("eigenfunction vanishes somewhere (boundary kappa)").finish());
        } else {
            match (&ws.profile, &ws.decomp) {
                (Ok(p), Some(dec)) => {
                    let norm = p.norm_sq().sqrt();
                    let sigma = ws.consts.as_ref().map(|k| k.sigma_c).unwrap_or_else(R::nan);
                    c.part(
                        || "sqrt(kappa) ||f|| >= ||f_sml||".into(),
                        kappa.sqrt() * norm,
                        dec.norm_sml,
                    );
                    c.part(
                        || "||f_str|| >= sqrt(1 - kappa) ||f||".into(),
                        dec.norm_str,
                        (one - kappa).sqrt() * norm,
                    );
                    c.part(
                        || "sigma ||f_str|| >= ||f_sml||".into(),
                        sigma * dec.norm_str,
                        dec.norm_sml,
                    );
                    checks.push(c.finish());
                }
                _ => {
                    c.fail(format!(
                        "eigenfunction unavailable: {}",
                        ws.profile.as_ref().err().cloned().unwrap_or_default()
                    ));
                    checks.push(c.finish());
                }
            }
        }
    }

    // C7: kappa against the bipartiteness constant of f
    {
        let mut c = CheckAcc::new("C7", tol);
        c.borderline |= kappa_borderline;
        if !kappa_in_range {
            checks.push(c.vacuous("kappa outside (0, 1)").finish());
        } else if !f_nowhere_zero {
            checks.push(c.vacuous("eigenfunction vanishes somewhere (boundary kappa)").finish());
        } else {
            match &ws.consts {
                Some(consts) => {
                    let beta = consts.beta_f;
                    let sigma_sq = kappa / (one - kappa);
                    c.part(
                        || "beta <= (1 + mu + (1 - mu) sigma^2) / 2".into(),
                        (one + ws.mu + (one - ws.mu) * sigma_sq) / R::of(2.0),
                        beta,
                    );
                    c.part(
                        || "(1 - mu2) kappa / (2 (1 - kappa)) >= beta".into(),
                        upper_gap * kappa / (R::of(2.0) * (one - kappa)),
                        beta,
                    );
                    let chain1 = R::of(2.0) * beta / (upper_gap + R::of(2.0) * beta);
                    c.part(|| "kappa >= 2 beta / (1 - mu2 + 2 beta)".into(), kappa, chain1);
                    c.part(
                        || "2 beta / (1 - mu2 + 2 beta) >= beta / (1 + beta)".into(),
                        chain1,
                        beta / (one + beta),
                    );
                    c.part(
                        || "beta / (1 + beta) >= beta / 2".into(),
                        beta / (one + beta),
                        beta / R::of(2.0),
                    );
                    let (branch, borderline) =
                        gate_le(one, R::of(2.0) * d_real * beta, tol);
                    c.borderline |= borderline;
                    if branch {
                        c.part(
                            || "2 d beta >= 1 branch: kappa >= 1 / (d (1 - mu2) + 1)".into(),
                            kappa,
                            one / (d_real * upper_gap + one),
                        );
                    }
                    checks.push(c.finish());
                }
                None => {
                    c.fail(format!(
                        "eigenfunction unavailable: {}",
                        ws.profile.as_ref().err().cloned().unwrap_or_default()
                    ));
                    checks.push(c.finish());
                }
            }
        }
    }

    // C8: l1 bounds on f restricted to subsets
    {
        let mut c = CheckAcc::new("C8", tol);
        c.borderline |= kappa_borderline;
        if !kappa_in_range {
            checks.push(c.vacuous("kappa outside (0, 1)").finish());
        } else if !f_nowhere_zero {
            checks.push(c.vacuous("eigenfunction vanishes somewhere (boundary kappa)").finish());
        } else {
            match (&ws.profile, &ws.decomp, &ws.consts) {
                (Ok(p), Some(dec), Some(consts)) => {
                    let sqrt_n = R::of_usize(n).sqrt();
                    let sigma = consts.sigma_c;
                    let mut in_plus = vec![false; n];
                    for &v in &p.supp_plus {
                        in_plus[v] = true;
                    }
                    let all: Vec<usize> = (0..n).collect();
                    let mut sets: Vec<(String, &[usize])> = vec![("V".into(), &all)];
                    for (i, o) in ws.index_two_orbits.iter().enumerate() {
                        sets.push((format!("orbit{i}"), o));
                    }
                    for (i, s) in ws.random_sets.iter().enumerate() {
                        sets.push((format!("rand{i}"), s));
                    }
                    for (name, set) in sets {
                        let mut m = 0usize;
                        let mut abs_sml = R::zero();
                        let mut sum_f = R::zero();
                        for &x in set {
                            if in_plus[x] {
                                m += 1;
                                abs_sml += dec.f_sml[x].abs();
                                sum_f += p.f[x];
                            }
                        }
                        let m_real = R::of_usize(m);
                        let frac_sqrt = (m_real / R::of_usize(n)).sqrt();
                        c.part(
                            || format!("X={name}: sigma sqrt(|S+ cap X|/n) ||f_str|| >= (1/sqrt n) sum |f_sml|"),
                            sigma * frac_sqrt * dec.norm_str,
                            abs_sml / sqrt_n,
                        );
                        c.part(
                            || format!("X={name}: (1/sqrt n)|sum f| >= ||f_str|| |S+ cap X|/n - sigma ||f_str|| sqrt(|S+ cap X|)/sqrt n"),
                            sum_f.abs() / sqrt_n,
                            dec.norm_str * m_real / R::of_usize(n)
                                - sigma * dec.norm_str * m_real.sqrt() / sqrt_n,
                        );
                    }
                    checks.push(c.finish());
                }
                _ => {
                    c.fail(format!(
                        "eigenfunction unavailable: {}",
                        ws.profile.as_ref().err().cloned().unwrap_or_default()
                    ));
                    checks.push(c.finish());
                }
            }
        }
    }

    // C9: support size bounds, kappa <= 1/5
    {
        let mut c = CheckAcc::new("C9", tol);
        c.borderline |= kappa_borderline;
        let (gate, borderline) = gate_le(kappa, R::of(0.2), tol);
        c.borderline |= borderline;
        if !(kappa_in_range && gate) {
            checks.push(c.vacuous("kappa outside (0, 1/5]").finish());
        } else if !f_nowhere_zero {
            checks.push(c.vacuous("eigenfunction vanishes somewhere (boundary kappa)").finish());
        } else {
            match (&ws.profile, &ws.consts) {
                (Ok(p), Some(consts)) => {
                    let sigma = consts.sigma_c;
                    let n_real = R::of_usize(n);
                    let plus = R::of_usize(p.supp_plus.len());
                    let minus = R::of_usize(p.supp_minus.len());
                    c.part(
                        || "(1 + sigma)/2 n >= |supp f+|".into(),
                        (one + sigma) / R::of(2.0) * n_real,
                        plus,
                    );
                    c.part(
                        || "|supp f-| >= (1 - sigma)/2 n".into(),
                        minus,
                        (one - sigma) / R::of(2.0) * n_real,
                    );
                    c.part(
                        || "|supp f-| >= (1 - sigma)/(1 + sigma) |supp f+|".into(),
                        minus,
                        (one - sigma) / (one + sigma) * plus,
                    );
                    let load = one + sigma + kappa + R::of(2.0) * R::of(2.0).sqrt() * kappa.sqrt();
                    c.part(
                        || "(1 + sigma + kappa + 2 sqrt2 sqrt kappa)/2 ||f||^2 >= ||f+||^2".into(),
                        load / R::of(2.0) * p.norm_sq(),
                        p.norm_plus_sq(),
                    );
                    checks.push(c.finish());
                }
                _ => {
                    c.fail(format!(
                        "eigenfunction unavailable: {}",
                        ws.profile.as_ref().err().cloned().unwrap_or_default()
                    ));
                    checks.push(c.finish());
                }
            }
        }
    }

    // C10: norm bounds on f+, kappa <= 1/3
    {
        let mut c = CheckAcc::new("C10", tol);
        c.borderline |= kappa_borderline;
        let (gate, borderline) = gate_le(kappa, R::of(1.0) / R::of(3.0), tol);
        c.borderline |= borderline;
        if !(kappa_in_range && gate) {
            checks.push(c.vacuous("kappa outside (0, 1/3]").finish());
        } else if !f_nowhere_zero {
            checks.push(c.vacuous("eigenfunction vanishes somewhere (boundary kappa)").finish());
        } else {
            match (&ws.profile, &ws.consts) {
                (Ok(p), Some(consts)) => {
                    let theta = consts.theta_c;
                    let norm = p.norm_sq().sqrt();
                    let plus = p.norm_plus_sq().sqrt();
                    let minus = p.norm_minus_sq().sqrt();
                    c.part(|| "||f+|| >= theta ||f||".into(), plus, theta * norm);
                    let residual_sq = (one - theta * theta).max(R::zero());
                    c.part(
                        || "sqrt(1 - theta^2) ||f|| >= ||f-||".into(),
                        residual_sq.sqrt() * norm,
                        minus,
                    );
                    if theta > R::zero() {
                        c.part(
                            || "sqrt(theta^-2 - 1) ||f+|| >= ||f-||".into(),
                            (one / (theta * theta) - one).max(R::zero()).sqrt() * plus,
                            minus,
                        );
                    }
                    checks.push(c.finish());
                }
                _ => {
                    c.fail(format!(
                        "eigenfunction unavailable: {}",
                        ws.profile.as_ref().err().cloned().unwrap_or_default()
                    ));
                    checks.push(c.finish());
                }
            }
        }
    }

    // C11: translate correlation bounds for every action permutation
    {
        let mut c = CheckAcc::new("C11", tol);
        c.borderline |= kappa_borderline;
        if !kappa_in_range {
            checks.push(c.vacuous("kappa outside (0, 1)").finish());
        } else if !f_nowhere_zero {
            checks.push(c.vacuous("eigenfunction vanishes somewhere (boundary kappa)").finish());
        } else {
            match (&ws.profile, &ws.decomp, &ws.corr) {
                (Ok(p), Some(dec), Some(corr)) => {
                    let n_real = R::of_usize(n);
                    let norm_sq = p.norm_sq();
                    let str_sq = dec.norm_str * dec.norm_str;
                    let mut in_plus = vec![false; n];
                    for &v in &p.supp_plus {
                        in_plus[v] = true;
                    }
                    let order = inst.action().group().order();
                    for g in 0..order {
                        // |I| = |supp(f+) cap pi(supp(f+))|
                        let mut overlap = 0usize;
                        for v in 0..n {
                            if in_plus[v] && in_plus[inst.action().apply(g, v)] {
                                overlap += 1;
                            }
                        }
                        let frac = R::of_usize(overlap) / n_real;
                        let corrv = corr.values[g];
                        let err1 = (R::of(2.0) * frac.sqrt() * kappa.sqrt() + kappa) * norm_sq;
                        c.part(
                            || format!("pi=element {g}: |<f+,(pi f)+> - (|I|/n)||f_str||^2| bound"),
                            err1,
                            (corrv - frac * str_sq).abs(),
                        );
                        let err2 = (frac * kappa + R::of(2.0) * frac.sqrt() * kappa.sqrt() + kappa)
                            * norm_sq;
                        c.part(
                            || format!("pi=element {g}: |<f+,(pi f)+> - (|I|/n)||f||^2| bound"),
                            err2,
                            (corrv - frac * norm_sq).abs(),
                        );
                    }
                    checks.push(c.finish());
                }
                _ => {
                    c.fail(format!(
                        "eigenfunction unavailable: {}",
                        ws.profile.as_ref().err().cloned().unwrap_or_default()
                    ));
                    checks.push(c.finish());
                }
            }
        }
    }

    // C12: agreement fraction comparison across set pairs
    {
        let mut c = CheckAcc::new("C12", tol);
        let mut sets: Vec<(String, Vec<usize>)> = Vec::new();
        if let Ok(p) = &ws.profile {
            sets.push(("supp_f_plus".into(), p.supp_plus.clone()));
        }
        for (i, o) in ws.index_two_orbits.iter().enumerate() {
            sets.push((format!("orbit{i}"), o.clone()));
        }
        for (i, s) in ws.random_sets.iter().enumerate() {
            sets.push((format!("rand{i}"), s.clone()));
        }
        let order = inst.action().group().order();
        let n_real = R::of_usize(n);
        let members: Vec<Vec<bool>> = sets
            .iter()
            .map(|(_, s)| {
                let mut m = vec![false; n];
                for &v in s {
                    m[v] = true;
                }
                m
            })
            .collect();
        // |A symmetric-difference B| does not depend on the permutation
        let sym_bound: Vec<Vec<R>> = (0..sets.len())
            .map(|i| {
                (0..sets.len())
                    .map(|j| {
                        let sym = (0..n).filter(|&v| members[i][v] != members[j][v]).count();
                        R::of(2.0).sqrt() * (R::of_usize(sym) / n_real).sqrt()
                    })
                    .collect()
            })
            .collect();
        for g in 0..order {
            let pi = inst.action().perm(g);
            let sigmas: Vec<R> = sets
                .iter()
                .map(|(_, s)| {
                    to_real::<R>(crate::invariants::sigma_overlap(pi, s, n).sigma)
                })
                .collect();
            for i in 0..sets.len() {
                for j in (i + 1)..sets.len() {
                    let lhs = (sigmas[i] - sigmas[j]).abs();
                    c.part(
                        || {
                            format!(
                                "pi=element {g}: |Sigma(A={}) - Sigma(B={})| <= sqrt2 sqrt(|A diff B|/n)",
                                sets[i].0, sets[j].0
                            )
                        },
                        sym_bound[i][j],
                        lhs,
                    );
                }
            }
        }
        checks.push(c.finish());
    }

    // C13: pivoting pipeline in the no-dichotomy branch
    {
        let mut c = CheckAcc::new("C13", tol);
        c.borderline |= kappa_borderline;
        let (gate_kappa, b1) = gate_le(kappa, R::of(1.0 / 260.0), tol);
        let (gate_xi, b2) = gate_le(ws.xi, R::of(0.8), tol);
        c.borderline |= b1 || b2;
        let no_dichotomy = matches!(ws.verdict_config, Some(DichotomyVerdict::NoDichotomy));
        if !(kappa_in_range && gate_kappa) {
            checks.push(c.vacuous("kappa outside (0, 1/260]").finish());
        } else if !gate_xi {
            checks.push(c.vacuous("xi exceeds 4/5").finish());
        } else if !ws.condition_no_transitive_index_two {
            checks.push(c.vacuous("an index-two subgroup acts transitively").finish());
        } else if !f_nowhere_zero {
            checks.push(c.vacuous("eigenfunction vanishes somewhere (boundary kappa)").finish());
        } else if !no_dichotomy {
            checks.push(c.vacuous("dichotomy witness exists (middle correlation)").finish());
        } else {
            match (&ws.profile, &ws.consts, &ws.corr) {
                (Ok(p), Some(consts), Some(corr)) => {
                    match extract_index_two(corr, inst.action().group(), consts.delta) {
                        Ok(extraction) => {
                            match orbit_concentration(
                                &extraction.h,
                                p,
                                consts,
                                inst.action(),
                            ) {
                                Ok(conc) => {
                                    c.part(
                                        || "orbit concentration: bound >= min_orbit |supp f+ outside|/n".into(),
                                        conc.rhs,
                                        conc.lhs,
                                    );
                                }
                                Err(e) => c.fail(format!("orbit concentration failed: {e}")),
                            }
                        }
                        Err(e) => c.fail(format!("index-two extraction failed: {e}")),
                    }
                    checks.push(c.finish());
                }
                _ => {
                    c.fail(format!(
                        "eigenfunction unavailable: {}",
                        ws.profile.as_ref().err().cloned().unwrap_or_default()
                    ));
                    checks.push(c.finish());
                }
            }
        }
    }

    // C14: lower bound on kappa in the no-dichotomy branch
    {
        let mut c = CheckAcc::new("C14", tol);
        c.borderline |= kappa_borderline;
        let (gate_kappa, b1) = gate_le(kappa, R::of(1.0 / 260.0), tol);
        c.borderline |= b1;
        let no_dichotomy = matches!(ws.verdict_config, Some(DichotomyVerdict::NoDichotomy));
        let nu_is_one = ws.nu == Rational64::new(1, 1);
        let nu_ge_half = ws.nu >= Rational64::new(1, 2);
        let (gate_xi, b2) = if nu_is_one {
            gate_le(ws.xi, R::of(0.8), tol)
        } else {
            gate_le(ws.xi, R::of(0.123), tol)
        };
        c.borderline |= b2;
        if !(kappa_in_range && gate_kappa) {
            checks.push(c.vacuous("kappa outside (0, 1/260]").finish());
        } else if !ws.condition_no_transitive_index_two {
            checks.push(c.vacuous("an index-two subgroup acts transitively").finish());
        } else if !no_dichotomy {
            checks.push(c.vacuous("dichotomy witness exists (middle correlation)").finish());
        } else if !nu_ge_half {
            checks.push(c.vacuous("nu < 1/2").finish());
        } else if !gate_xi {
            checks.push(c.vacuous("xi exceeds its branch gate").finish());
        } else {
            if nu_is_one {
                c.part(
                    || "nu = 1 branch: kappa >= 1 / (10 d)".into(),
                    kappa,
                    one / (R::of(10.0) * d_real),
                );
            } else {
                c.part(
                    || "nu >= 1/2 branch: kappa >= 1 / (50000 d)".into(),
                    kappa,
                    one / (R::of(50000.0) * d_real),
                );
            }
            checks.push(c.finish());
        }
    }

    // C15: lower bound when a dichotomy witness exists at default xi
    {
        let mut c = CheckAcc::new("C15", tol);
        c.borderline |= kappa_borderline;
        let witness = matches!(ws.verdict_default, Some(DichotomyVerdict::Witness(_)));
        let nu_is_one = ws.nu == Rational64::new(1, 1);
        let nu_ge_half = ws.nu >= Rational64::new(1, 2);
        if !ws.left2right.verified {
            checks.push(c.vacuous("companion condition not verified").finish());
        } else if !kappa_in_range {
            checks.push(c.vacuous("kappa outside (0, 1)").finish());
        } else if !f_nowhere_zero {
            checks.push(c.vacuous("eigenfunction vanishes somewhere (boundary kappa)").finish());
        } else if !witness {
            checks.push(
                c.vacuous("no middle correlation witness at the default xi").finish(),
            );
        } else if !nu_ge_half {
            checks.push(c.vacuous("nu < 1/2").finish());
        } else {
            if nu_is_one {
                c.part(
                    || "nu = 1 branch: 1 + mu >= (1 - mu2) / 2521".into(),
                    lower_gap,
                    upper_gap / R::of(2521.0),
                );
            } else {
                c.part(
                    || "nu >= 1/2 branch: 1 + mu >= (1 - mu2) / 54632".into(),
                    lower_gap,
                    upper_gap / R::of(54632.0),
                );
            }
            checks.push(c.finish());
        }
    }

    let overall = if checks.iter().any(|c| c.status == CheckStatus::Fail) {
        "fail"
    } else {
        "pass"
    };

    let group = inst.action().group();
    Ok(CertificateReport {
        instance: InstanceSummary {
            label: inst.label().to_string(),
            kind: inst.kind().as_str().to_string(),
            group: group.name().to_string(),
            n: inst.n(),
            d: inst.d(),
            connection_set: inst.connection_set().map(|s| s.to_vec()),
        },
        n: inst.n(),
        d: inst.d(),
        mu: ws.mu,
        mu2: ws.mu2,
        kappa: ws.kappa,
        constants: ConstantsSection {
            edge_cheeger: ws.edge_cheeger.map(RationalValue::from_rational),
            vertex_cheeger: ws.vertex_cheeger.map(RationalValue::from_rational),
            edge_bipartiteness: ws.beta_edge.map(RationalValue::from_rational),
            beta_f: ws.consts.as_ref().map(|c| c.beta_f),
            nu: RationalValue::from_rational(ws.nu),
            sigma: ws.consts.as_ref().map(|c| c.sigma_c),
            theta: ws.consts.as_ref().map(|c| c.theta_c),
            delta: ws.consts.as_ref().map(|c| c.delta),
            xi: ws.xi,
        },
        freiman: FreimanSection {
            left2right_verified: ws.left2right.verified,
            dichotomy: ws.verdict_config.map(|v| match v {
                DichotomyVerdict::Witness(tau) => format!("witness({tau})"),
                DichotomyVerdict::NoDichotomy => "no_dichotomy".into(),
            }),
            witness: match ws.verdict_config {
                Some(DichotomyVerdict::Witness(tau)) => Some(tau),
                _ => None,
            },
            h: ws.extracted_h,
            delta: ws.consts.as_ref().map(|c| c.delta),
            default_xi: ws.xi_default,
            default_witness: match ws.verdict_default {
                Some(DichotomyVerdict::Witness(tau)) => Some(tau),
                _ => None,
            },
        },
        checks,
        overall: overall.to_string(),
    })
}

fn prepare<R: Real>(inst: &SpectralInstance, opts: &CertifyOptions<R>) -> Result<Workspace<R>> {
    let spec = crate::spectral::spectrum::<R>(inst)?;
    let (mu, mu2) = (spec.mu, spec.mu2);
    let kappa = (R::one() + mu) / (R::one() - mu2);

    let profile = bottom_eigenfunction::<R>(inst).map_err(|e| e.to_string());
    let decomp = profile.as_ref().ok().map(decompose);

    let nu = nu_constant(inst)?;
    let nu_is_one = nu == Rational64::new(1, 1);
    let xi_default = default_xi::<R>(nu_is_one);
    let xi = opts.xi.unwrap_or(xi_default);

    let consts = profile
        .as_ref()
        .ok()
        .map(|p| derived_constants(p, inst, xi));
    let corr = profile
        .as_ref()
        .ok()
        .map(|p| correlation_profile(p, inst.action()));

    let n = inst.n();
    let edge_cheeger = (n <= opts.max_exact_cheeger)
        .then(|| edge_cheeger_exact(inst, opts.max_exact_cheeger))
        .transpose()?;
    let vertex_cheeger = (n <= opts.max_exact_cheeger)
        .then(|| vertex_cheeger_exact(inst, opts.max_exact_cheeger))
        .transpose()?;
    let beta_edge = (n <= opts.max_exact_bipartiteness)
        .then(|| edge_bipartiteness_exact(inst, opts.max_exact_bipartiteness))
        .transpose()?;

    let group = inst.action().group();
    let c2_hypothesis = group.order() % 2 == 1
        || match group.is_simple(SIMPLICITY_SCAN_CAP) {
            Some(simple) => simple,
            None => opts.assume_simple.unwrap_or(false),
        };

    let index_two = group.index_two_subgroups();
    let mut condition_no_transitive_index_two = true;
    let mut index_two_orbits: Vec<Vec<usize>> = Vec::new();
    for h in &index_two {
        let orbits = inst.action().subgroup_orbits(h)?;
        if orbits.len() < 2 {
            condition_no_transitive_index_two = false;
        }
        index_two_orbits.extend(orbits);
    }
    index_two_orbits.sort();
    index_two_orbits.dedup();

    let random_sets = pseudo_random_subsets(inst, 16);
    let left2right = verify_left2right(inst, None);

    let (verdict_config, verdict_default) = match (&profile, &corr) {
        (Ok(_), Some(corr)) => {
            let delta_cfg = delta_threshold(kappa, xi);
            let delta_def = delta_threshold(kappa, xi_default);
            let cfg = if delta_cfg.is_nan() {
                None
            } else {
                Some(middle_witness(corr, delta_cfg))
            };
            let def = if delta_def.is_nan() {
                None
            } else {
                Some(middle_witness(corr, delta_def))
            };
            (cfg, def)
        }
        _ => (None, None),
    };

    // Record the extracted subgroup whenever the no-dichotomy branch is
    // live, regardless of whether C13's gates run it.
    let extracted_h = match (&corr, &consts, verdict_config) {
        (Some(corr), Some(consts), Some(DichotomyVerdict::NoDichotomy)) => {
            extract_index_two(corr, group, consts.delta)
                .ok()
                .map(|e| e.h)
        }
        _ => None,
    };

    Ok(Workspace {
        profile,
        decomp,
        consts,
        corr,
        kappa,
        mu,
        mu2,
        nu,
        xi,
        xi_default,
        edge_cheeger,
        vertex_cheeger,
        beta_edge,
        c2_hypothesis,
        condition_no_transitive_index_two,
        index_two_orbits,
        random_sets,
        left2right,
        verdict_config,
        verdict_default,
        extracted_h,
    })
}

/// Render a report as pretty JSON (trailing newline included).
pub fn report_to_json<R: Real>(report: &CertificateReport<R>) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
    out.push(b'\n');
    out
}

/// Parse a report back from JSON.
pub fn report_from_json<R: Real>(bytes: &[u8]) -> Result<CertificateReport<R>> {
    serde_json::from_slice(bytes).map_err(|e| Error::parse("report", e.to_string()))
}

/// Render a report as CSV, one row per check.
pub fn report_to_csv<R: Real>(report: &CertificateReport<R>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "instance",
        "id",
        "hypothesis_satisfied",
        "lhs",
        "rhs",
        "margin",
        "status",
        "borderline",
        "detail",
    ])
    .expect("csv header");
    for c in &report.checks {
        let fmt = |x: &Option<R>| x.map(|v| v.to_string()).unwrap_or_default();
        let lhs = fmt(&c.lhs);
        let rhs = fmt(&c.rhs);
        let margin = fmt(&c.margin);
        w.write_record([
            report.instance.label.as_str(),
            c.id.as_str(),
            if c.hypothesis_satisfied { "true" } else { "false" },
            lhs.as_str(),
            rhs.as_str(),
            margin.as_str(),
            match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "fail",
                CheckStatus::Vacuous => "vacuous",
            },
            if c.borderline { "true" } else { "false" },
            c.detail.as_str(),
        ])
        .expect("csv row");
    }
    w.into_inner().expect("csv buffer")
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScanRow<R> {
    pub instance: String,
    pub n: usize,
    pub d: usize,
    pub mu: R,
    pub mu2: R,
    pub kappa: R,
    /// `(1 + mu) * 50000 * d / (1 - mu2)`; at least 1 whenever C1 holds.
    pub ratio: R,
    pub overall: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScanSummary<R> {
    pub certified: usize,
    pub failed: usize,
    pub skipped: BTreeMap<String, usize>,
    pub min_ratio: Option<R>,
    pub min_instance: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScanResult<R> {
    pub rows: Vec<ScanRow<R>>,
    pub summary: ScanSummary<R>,
}

/// Certify every valid instance of a family, with an order-independent
/// min-reduction over the C1 ratio.
pub fn scan_family<R: Real>(
    spec: &FamilySpec,
    opts: &CertifyOptions<R>,
    workers: usize,
) -> Result<ScanResult<R>> {
    let enumeration = enumerate_family(spec)?;
    let mut skipped = enumeration.skipped;

    let certify_all = |instances: &[SpectralInstance]| -> Vec<Result<CertificateReport<R>>> {
        use rayon::prelude::*;
        instances
            .par_iter()
            .map(|inst| certify_instance(inst, opts))
            .collect()
    };

    let outcomes: Vec<Result<CertificateReport<R>>> = if workers <= 1 {
        enumeration
            .instances
            .iter()
            .map(|inst| certify_instance(inst, opts))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Io(e.to_string()))?;
        pool.install(|| certify_all(&enumeration.instances))
    };

    let mut rows = Vec::new();
    let mut failed = 0usize;
    for (inst, outcome) in enumeration.instances.iter().zip(outcomes) {
        match outcome {
            Ok(report) => {
                let one = R::one();
                let ratio = (one + report.mu) * R::of(50000.0) * R::of_usize(report.d)
                    / (one - report.mu2);
                if !report.passed() {
                    failed += 1;
                }
                rows.push(ScanRow {
                    instance: inst.label().to_string(),
                    n: report.n,
                    d: report.d,
                    mu: report.mu,
                    mu2: report.mu2,
                    kappa: report.kappa,
                    ratio,
                    overall: report.overall,
                });
            }
            Err(Error::InvalidInstance(reason)) => {
                *skipped.entry(reason).or_insert(0) += 1;
            }
            Err(other) => return Err(other),
        }
    }

    let mut min_ratio: Option<R> = None;
    let mut min_instance: Option<String> = None;
    for row in &rows {
        if min_ratio.map_or(true, |m| row.ratio < m) {
            min_ratio = Some(row.ratio);
            min_instance = Some(row.instance.clone());
        }
    }

    let summary = ScanSummary {
        certified: rows.len(),
        failed,
        skipped,
        min_ratio,
        min_instance,
    };
    Ok(ScanResult { rows, summary })
}

pub fn scan_to_json<R: Real>(scan: &ScanResult<R>) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(scan).expect("scan serializes");
    out.push(b'\n');
    out
}

pub fn scan_to_csv<R: Real>(scan: &ScanResult<R>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "instance", "n", "d", "mu", "mu2", "kappa", "ratio", "overall",
    ])
    .expect("csv header");
    for r in &scan.rows {
        let cols = [
            r.instance.clone(),
            r.n.to_string(),
            r.d.to_string(),
            r.mu.to_string(),
            r.mu2.to_string(),
            r.kappa.to_string(),
            r.ratio.to_string(),
            r.overall.clone(),
        ];
        w.write_record(&cols).expect("csv row");
    }
    let skipped: Vec<String> = scan
        .summary
        .skipped
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect();
    let summary_cols = [
        "SUMMARY".to_string(),
        scan.summary.certified.to_string(),
        scan.summary.failed.to_string(),
        skipped.join(";"),
        String::new(),
        String::new(),
        scan.summary
            .min_ratio
            .map(|x| x.to_string())
            .unwrap_or_default(),
        scan.summary.min_instance.clone().unwrap_or_default(),
    ];
    w.write_record(&summary_cols).expect("csv summary");
    w.into_inner().expect("csv buffer")
}
