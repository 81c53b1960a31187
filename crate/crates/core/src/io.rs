//! Instance and family spec files (JSON, bit-exact integer fields).
//!
//! Instance files carry either a Cayley-type description (group +
//! connection set + optional automorphism) or explicit permutations with
//! an acting group for vertex-transitive input.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::FamilySpec;
use crate::error::{Error, Result};
use crate::graph::{build_instance, vertex_transitive_instance, GraphKind, SpectralInstance};
use crate::group::{FiniteGroup, GroupAction};

/// Group description: a named family with parameters, or explicit
/// permutation generators.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Family {
        family: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        factors: Option<Vec<GroupSpec>>,
    },
    Generators {
        generators: Vec<Vec<usize>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        max_order: Option<usize>,
    },
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Family { family, n, factors } => match family.as_str() {
                "cyclic" => FiniteGroup::cyclic(
                    n.ok_or_else(|| Error::parse("group.n", "cyclic requires n"))?,
                ),
                "dihedral" => FiniteGroup::dihedral(
                    n.ok_or_else(|| Error::parse("group.n", "dihedral requires n"))?,
                ),
                "symmetric" => FiniteGroup::symmetric(
                    n.ok_or_else(|| Error::parse("group.n", "symmetric requires n"))?,
                ),
                "quaternion8" => FiniteGroup::quaternion8(),
                "direct_product" => {
                    let factors = factors.as_ref().ok_or_else(|| {
                        Error::parse("group.factors", "direct_product requires factors")
                    })?;
                    if factors.len() != 2 {
                        return Err(Error::parse(
                            "group.factors",
                            "direct_product takes exactly two factors",
                        ));
                    }
                    let a = factors[0].build()?;
                    let b = factors[1].build()?;
                    FiniteGroup::direct_product(&a, &b)
                }
                other => Err(Error::parse(
                    "group.family",
                    format!("unknown family `{other}`"),
                )),
            },
            GroupSpec::Generators {
                generators,
                max_order,
            } => {
                let m = generators
                    .iter()
                    .map(|g| g.len())
                    .max()
                    .ok_or_else(|| Error::parse("group.generators", "need at least one generator"))?;
                let (group, _) = FiniteGroup::from_permutation_generators(
                    generators,
                    m,
                    max_order.unwrap_or(crate::group::MAX_GROUP_ORDER),
                )?;
                Ok(group)
            }
        }
    }
}

/// Acting group with one vertex permutation per element.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionSpec {
    pub group: GroupSpec,
    pub perms: Vec<Vec<usize>>,
}

/// One instance per file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub kind: GraphKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connection_set: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub automorphism: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl InstanceFile {
    pub fn build(&self) -> Result<SpectralInstance> {
        let mut inst = match self.kind {
            GraphKind::VertexTransitive => {
                let rho = self
                    .rho
                    .clone()
                    .ok_or_else(|| Error::parse("rho", "vertex_transitive requires rho"))?;
                let action_spec = self
                    .action
                    .as_ref()
                    .ok_or_else(|| Error::parse("action", "vertex_transitive requires action"))?;
                let n = rho
                    .first()
                    .map(|p| p.len())
                    .ok_or_else(|| Error::parse("rho", "rho must be non-empty"))?;
                let group = action_spec.group.build()?;
                let perms: Vec<Vec<u16>> = action_spec
                    .perms
                    .iter()
                    .map(|p| p.iter().map(|&x| x as u16).collect())
                    .collect();
                let action = GroupAction::new(group, n, perms)?;
                vertex_transitive_instance(n, rho, action)?
            }
            kind => {
                let group_spec = self
                    .group
                    .as_ref()
                    .ok_or_else(|| Error::parse("group", "Cayley kinds require group"))?;
                let connection = self
                    .connection_set
                    .as_ref()
                    .ok_or_else(|| Error::parse("connection_set", "Cayley kinds require connection_set"))?;
                let group = group_spec.build()?;
                build_instance(kind, &group, connection, self.automorphism.as_deref())?
            }
        };
        if let Some(label) = &self.label {
            inst.set_label(label.clone());
        }
        Ok(inst)
    }
}

pub fn parse_instance(text: &str) -> Result<SpectralInstance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::parse("instance", e.to_string()))?;
    file.build()
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<SpectralInstance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

pub fn parse_family_spec(text: &str) -> Result<FamilySpec> {
    serde_json::from_str(text).map_err(|e| Error::parse("family_spec", e.to_string()))
}

pub fn load_family_spec(path: impl AsRef<Path>) -> Result<FamilySpec> {
    let text = std::fs::read_to_string(path)?;
    parse_family_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_cayley_instance() {
        let text = r#"{"kind": "cayley", "group": {"family": "cyclic", "n": 6}, "connection_set": [2, 3, 4]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.n(), 6);
        assert_eq!(inst.d(), 3);
        assert!(inst.flags().nonbipartite);
    }

    #[test]
    fn parse_generator_group() {
        // Sym(3) from a transposition and a 3-cycle; the three
        // transpositions land at indices 1, 3, 4 in closure order
        let text = r#"{"kind": "cayley", "group": {"generators": [[1, 0, 2], [1, 2, 0]]}, "connection_set": [1, 3, 4]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.n(), 6);
        assert!(inst.flags().undirected);
    }

    #[test]
    fn parse_direct_product() {
        let text = r#"{"kind": "cayley",
                       "group": {"family": "direct_product",
                                 "factors": [{"family": "cyclic", "n": 2},
                                             {"family": "cyclic", "n": 3}]},
                       "connection_set": [1, 2, 3]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.n(), 6);
    }

    #[test]
    fn parse_vertex_transitive_roundtrip() {
        // triangle as explicit permutations with the cyclic action
        let text = r#"{"kind": "vertex_transitive",
                       "rho": [[1, 2, 0], [2, 0, 1]],
                       "action": {"group": {"family": "cyclic", "n": 3},
                                  "perms": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]}}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.d(), 2);
        assert!(inst.flags().nonbipartite);
    }

    #[test]
    fn malformed_instances_name_the_field() {
        let missing = r#"{"kind": "cayley", "group": {"family": "cyclic", "n": 6}}"#;
        match parse_instance(missing) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "connection_set"),
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad_gen = r#"{"kind": "cayley", "group": {"generators": [[0, 0, 2]]}, "connection_set": [1]}"#;
        assert!(matches!(
            parse_instance(bad_gen),
            Err(Error::InvalidPermutation(_))
        ));
        let garbage = "not json";
        assert!(matches!(parse_instance(garbage), Err(Error::Parse { .. })));
    }

    #[test]
    fn instance_file_serializes_back() {
        let file = InstanceFile {
            kind: GraphKind::Cayley,
            group: Some(GroupSpec::Family {
                family: "cyclic".into(),
                n: Some(6),
                factors: None,
            }),
            connection_set: Some(vec![2, 3, 4]),
            automorphism: None,
            rho: None,
            action: None,
            label: Some("prism".into()),
        };
        let text = serde_json::to_string(&file).unwrap();
        let inst = parse_instance(&text).unwrap();
        assert_eq!(inst.label(), "prism");
    }
}
