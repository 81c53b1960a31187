//! Named instances and bounded family enumeration for scans and tests.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    build_instance, decompose_into_permutations, vertex_transitive_instance, GraphKind,
    SpectralInstance,
};
use crate::group::{FiniteGroup, GroupAction};

/// Triangle = Cay(Z3, {1, 2}), the complete graph on three vertices.
pub fn triangle() -> SpectralInstance {
    let g = FiniteGroup::cyclic(3).expect("cyclic(3)");
    let mut inst = build_instance(GraphKind::Cayley, &g, &[1, 2], None).expect("triangle");
    inst.set_label("triangle");
    inst
}

/// Odd cycle Cay(Z_n, {1, n-1}).
pub fn cycle(n: usize) -> SpectralInstance {
    let g = FiniteGroup::cyclic(n).expect("cyclic group");
    let mut inst = build_instance(GraphKind::Cayley, &g, &[1, n - 1], None).expect("cycle");
    inst.set_label(format!("cycle({n})"));
    inst
}

/// Triangular prism = Cay(Z6, {2, 3, 4}).
pub fn prism() -> SpectralInstance {
    let g = FiniteGroup::cyclic(6).expect("cyclic(6)");
    let mut inst = build_instance(GraphKind::Cayley, &g, &[2, 3, 4], None).expect("prism");
    inst.set_label("prism");
    inst
}

/// The Petersen graph as a vertex-transitive instance: vertices are the
/// 2-element subsets of {0..4}, adjacent when disjoint, with the full
/// symmetric group permuting the underlying points.
pub fn petersen() -> SpectralInstance {
    let pairs: Vec<(usize, usize)> = (0..5)
        .flat_map(|a| ((a + 1)..5).map(move |b| (a, b)))
        .collect();
    let index_of = |a: usize, b: usize| -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        pairs.iter().position(|&p| p == (lo, hi)).expect("pair")
    };
    let n = pairs.len();
    let mut adj = vec![0u32; n * n];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for (j, &(c, d)) in pairs.iter().enumerate() {
            if a != c && a != d && b != c && b != d {
                adj[i * n + j] = 1;
            }
        }
    }

    // S5 from a 5-cycle and a transposition, acting naturally on points.
    let (group, point_action) = FiniteGroup::from_permutation_generators(
        &[vec![1, 2, 3, 4, 0], vec![1, 0, 2, 3, 4]],
        5,
        200,
    )
    .expect("symmetric group on 5 points");
    assert_eq!(group.order(), 120);
    let perms: Vec<Vec<u16>> = (0..group.order())
        .map(|g| {
            pairs
                .iter()
                .map(|&(a, b)| index_of(point_action.apply(g, a), point_action.apply(g, b)) as u16)
                .collect()
        })
        .collect();
    let action = GroupAction::new(group, n, perms).expect("pair action");

    let rho = decompose_into_permutations(n, 3, &adj).expect("3-regular decomposition");
    let mut inst = vertex_transitive_instance(n, rho, action).expect("petersen");
    inst.set_label("petersen");
    inst
}

/// Inverse-closed classes `{g, g^-1}` of the non-identity elements, in
/// index order.
pub fn inverse_pair_classes(group: &FiniteGroup) -> Vec<Vec<usize>> {
    let mut classes = Vec::new();
    let mut seen = vec![false; group.order()];
    seen[group.identity()] = true;
    for g in 0..group.order() {
        if seen[g] {
            continue;
        }
        let gi = group.inv(g);
        seen[g] = true;
        if gi == g {
            classes.push(vec![g]);
        } else {
            seen[gi] = true;
            classes.push(vec![g, gi]);
        }
    }
    classes
}

/// All symmetric connection multisets (without repeats) of size at most
/// `max_size`: unions of inverse-pair classes, optionally allowing the
/// identity element (a loop at every vertex).
pub fn symmetric_connection_sets(
    group: &FiniteGroup,
    max_size: usize,
    include_identity: bool,
) -> Vec<Vec<usize>> {
    let classes = inverse_pair_classes(group);
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();

    fn rec(
        classes: &[Vec<usize>],
        k: usize,
        max_size: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == classes.len() {
            if !current.is_empty() {
                let mut s = current.clone();
                s.sort_unstable();
                out.push(s);
            }
            return;
        }
        rec(classes, k + 1, max_size, current, out);
        if current.len() + classes[k].len() <= max_size {
            current.extend(&classes[k]);
            rec(classes, k + 1, max_size, current, out);
            current.truncate(current.len() - classes[k].len());
        }
    }
    rec(&classes, 0, max_size, &mut current, &mut out);

    if include_identity {
        let base = out.clone();
        for s in base {
            if s.len() + 1 <= max_size {
                let mut t = s;
                t.push(group.identity());
                t.sort_unstable();
                out.push(t);
            }
        }
        if max_size >= 1 {
            out.push(vec![group.identity()]);
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionPolicy {
    AllSymmetric,
    Explicit(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum AutomorphismPolicy {
    None,
    /// Use the inversion map `x -> x^-1` (an automorphism exactly on
    /// abelian groups; other groups are skipped).
    Inversion,
}

/// A bounded family of instances to scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: GraphKind,
    /// cyclic | dihedral | symmetric | quaternion8
    pub family: String,
    /// Inclusive parameter range for the group family.
    pub n_range: Option<[usize; 2]>,
    pub degree_max: usize,
    pub connection_policy: ConnectionPolicy,
    #[serde(default)]
    pub automorphism_policy: Option<AutomorphismPolicy>,
    #[serde(default)]
    pub include_identity: Option<bool>,
    /// Enumeration cap; refuse larger scans.
    #[serde(default)]
    pub max_instances: Option<usize>,
}

pub const DEFAULT_MAX_INSTANCES: usize = 10_000;

#[derive(Debug, Clone)]
pub struct FamilyEnumeration {
    pub instances: Vec<SpectralInstance>,
    /// Build-level skips (directed results, inapplicable automorphism),
    /// reason -> count.
    pub skipped: BTreeMap<String, usize>,
}

fn family_groups(spec: &FamilySpec) -> Result<Vec<FiniteGroup>> {
    // an inverted range enumerates nothing (empty scan, not an error)
    let range = |default_lo: usize| -> Result<(usize, usize)> {
        match spec.n_range {
            Some([lo, hi]) => Ok((lo.max(default_lo), hi)),
            None => Err(Error::parse(
                "n_range",
                format!("required for {}", spec.family),
            )),
        }
    };
    match spec.family.as_str() {
        "cyclic" => {
            let (lo, hi) = range(1)?;
            (lo..=hi).map(FiniteGroup::cyclic).collect()
        }
        "dihedral" => {
            let (lo, hi) = range(3)?;
            (lo..=hi).map(FiniteGroup::dihedral).collect()
        }
        "symmetric" => {
            let (lo, hi) = range(1)?;
            (lo..=hi).map(FiniteGroup::symmetric).collect()
        }
        "quaternion8" => Ok(vec![FiniteGroup::quaternion8()?]),
        other => Err(Error::parse("family", format!("unknown family `{other}`"))),
    }
}

/// Enumerate the instances of a family spec, deterministic in the spec.
pub fn enumerate_family(spec: &FamilySpec) -> Result<FamilyEnumeration> {
    if spec.degree_max == 0 {
        return Err(Error::parse("degree_max", "must be positive"));
    }
    let cap = spec.max_instances.unwrap_or(DEFAULT_MAX_INSTANCES);
    let groups = family_groups(spec)?;
    let mut instances = Vec::new();
    let mut skipped: BTreeMap<String, usize> = BTreeMap::new();
    let mut attempted = 0usize;

    for group in &groups {
        let sets: Vec<Vec<usize>> = match &spec.connection_policy {
            ConnectionPolicy::AllSymmetric => symmetric_connection_sets(
                group,
                spec.degree_max,
                spec.include_identity.unwrap_or(false),
            ),
            ConnectionPolicy::Explicit(sets) => sets
                .iter()
                .filter(|s| s.len() <= spec.degree_max)
                .cloned()
                .collect(),
        };
        let sigma: Option<Vec<usize>> = match spec.automorphism_policy.unwrap_or(AutomorphismPolicy::None) {
            AutomorphismPolicy::None => None,
            AutomorphismPolicy::Inversion => {
                let inv: Vec<usize> = (0..group.order()).map(|x| group.inv(x)).collect();
                if group.verify_automorphism(&inv) {
                    Some(inv)
                } else {
                    *skipped
                        .entry("inversion is not an automorphism".to_string())
                        .or_insert(0) += 1;
                    continue;
                }
            }
        };
        let twisted = matches!(
            spec.kind,
            GraphKind::TwistedCayley | GraphKind::TwistedCayleySum
        );
        if twisted && sigma.is_none() {
            return Err(Error::parse(
                "automorphism_policy",
                "twisted kinds need an automorphism policy",
            ));
        }
        for s in sets {
            attempted += 1;
            if attempted > cap {
                return Err(Error::parse(
                    "max_instances",
                    format!("family enumerates more than {cap} instances"),
                ));
            }
            let sigma_arg = if twisted { sigma.as_deref() } else { None };
            match build_instance(spec.kind, group, &s, sigma_arg) {
                Ok(inst) => instances.push(inst),
                Err(Error::NotUndirected { .. }) => {
                    *skipped.entry("directed".to_string()).or_insert(0) += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(FamilyEnumeration { instances, skipped })
}
