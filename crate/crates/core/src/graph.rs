//! Construction of the graph families as sums of permutation operators.
//!
//! Every instance stores the permutation list `rho` together with the
//! integer adjacency counts `a_uv = |{i : rho_i(v) = u}|`; row and column
//! sums equal the degree. Builders verify symmetry of `a` and reject
//! directed results outright, and record connectivity and bipartiteness
//! as flags.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{is_permutation, FiniteGroup, GroupAction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Cayley,
    CayleySum,
    TwistedCayley,
    TwistedCayleySum,
    VertexTransitive,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Cayley => "cayley",
            GraphKind::CayleySum => "cayley_sum",
            GraphKind::TwistedCayley => "twisted_cayley",
            GraphKind::TwistedCayleySum => "twisted_cayley_sum",
            GraphKind::VertexTransitive => "vertex_transitive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationFlags {
    pub undirected: bool,
    pub connected: bool,
    pub nonbipartite: bool,
}

/// Result of re-validating an instance from its adjacency counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationRecord {
    pub n_ok: bool,
    pub d_ok: bool,
    pub flags: ValidationFlags,
}

impl ValidationRecord {
    /// All hypotheses of a certifiable instance hold.
    pub fn ok(&self) -> bool {
        self.n_ok
            && self.d_ok
            && self.flags.undirected
            && self.flags.connected
            && self.flags.nonbipartite
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.n_ok {
            Some("n >= 2 violated")
        } else if !self.d_ok {
            Some("d > 0 violated")
        } else if !self.flags.undirected {
            Some("directed")
        } else if !self.flags.connected {
            Some("disconnected")
        } else if !self.flags.nonbipartite {
            Some("bipartite")
        } else {
            None
        }
    }
}

/// A regular multigraph presented as a sum of permutation operators,
/// carrying a transitive group action.
#[derive(Debug, Clone)]
pub struct SpectralInstance {
    n: usize,
    d: usize,
    rho: Vec<Vec<u16>>,
    a: Vec<u32>,
    kind: GraphKind,
    action: GroupAction,
    connection: Option<Vec<usize>>,
    sigma: Option<Vec<usize>>,
    flags: ValidationFlags,
    label: String,
}

impl SpectralInstance {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn a(&self, u: usize, v: usize) -> u32 {
        self.a[u * self.n + v]
    }

    pub fn adjacency(&self) -> &[u32] {
        &self.a
    }

    pub fn rho(&self) -> &[Vec<u16>] {
        &self.rho
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn connection_set(&self) -> Option<&[usize]> {
        self.connection.as_deref()
    }

    pub fn automorphism(&self) -> Option<&[usize]> {
        self.sigma.as_deref()
    }

    pub fn flags(&self) -> ValidationFlags {
        self.flags
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    /// Duplicate every connection permutation: `d` doubles, `a` doubles,
    /// the normalized spectrum is unchanged.
    pub fn double_connections(&self) -> SpectralInstance {
        let mut rho = self.rho.clone();
        rho.extend(self.rho.iter().cloned());
        let a = self.a.iter().map(|&x| 2 * x).collect();
        SpectralInstance {
            n: self.n,
            d: 2 * self.d,
            rho,
            a,
            kind: self.kind,
            action: self.action.clone(),
            connection: self.connection.as_ref().map(|s| {
                let mut t = s.clone();
                t.extend(s.iter().copied());
                t
            }),
            sigma: self.sigma.clone(),
            flags: self.flags,
            label: format!("{} (doubled)", self.label),
        }
    }
}

fn adjacency_from_rho(n: usize, rho: &[Vec<u16>]) -> Vec<u32> {
    let mut a = vec![0u32; n * n];
    for perm in rho {
        for v in 0..n {
            let u = perm[v] as usize;
            a[u * n + v] += 1;
        }
    }
    a
}

fn check_symmetric(n: usize, a: &[u32]) -> Result<()> {
    for u in 0..n {
        for v in (u + 1)..n {
            if a[u * n + v] != a[v * n + u] {
                return Err(Error::NotUndirected { u, v });
            }
        }
    }
    Ok(())
}

fn is_connected(n: usize, a: &[u32]) -> bool {
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0usize];
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if !seen[v] && (a[u * n + v] > 0 || a[v * n + u] > 0) {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

/// Proper 2-colorability of the support multigraph; loops count as odd
/// cycles, so any `a_vv > 0` makes the graph non-bipartite.
fn is_bipartite(n: usize, a: &[u32]) -> bool {
    for v in 0..n {
        if a[v * n + v] > 0 {
            return false;
        }
    }
    let mut color = vec![-1i8; n];
    for start in 0..n {
        if color[start] >= 0 {
            continue;
        }
        color[start] = 0;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if a[u * n + v] == 0 && a[v * n + u] == 0 {
                    continue;
                }
                if color[v] < 0 {
                    color[v] = 1 - color[u];
                    stack.push(v);
                } else if color[v] == color[u] {
                    return false;
                }
            }
        }
    }
    true
}

fn flags_from_adjacency(n: usize, a: &[u32]) -> ValidationFlags {
    let undirected = check_symmetric(n, a).is_ok();
    ValidationFlags {
        undirected,
        connected: is_connected(n, a),
        nonbipartite: !is_bipartite(n, a),
    }
}

/// Left translation of a group on itself.
pub fn left_translation_action(group: &FiniteGroup) -> GroupAction {
    GroupAction::left_translation(group.clone())
}

fn format_set(group: &FiniteGroup, s: &[usize]) -> String {
    let body: Vec<String> = s.iter().map(|&x| group.label(x)).collect();
    format!("{{{}}}", body.join(","))
}

/// Build a Cayley-type instance from a group, a connection multiset and,
/// for the twisted kinds, an automorphism.
///
/// Neighbor maps per connection element `s`:
/// cayley `x -> x*s`; cayley_sum `x -> s*x^-1`;
/// twisted_cayley `x -> sigma(x*s)`; twisted_cayley_sum `x -> sigma(s*x^-1)`.
pub fn build_instance(
    kind: GraphKind,
    group: &FiniteGroup,
    connection: &[usize],
    sigma: Option<&[usize]>,
) -> Result<SpectralInstance> {
    if kind == GraphKind::VertexTransitive {
        return Err(Error::UnsupportedParameter(
            "vertex_transitive instances take explicit rho and action".into(),
        ));
    }
    if connection.is_empty() {
        return Err(Error::UnsupportedParameter(
            "connection set must be non-empty".into(),
        ));
    }
    let ord = group.order();
    for &s in connection {
        if s >= ord {
            return Err(Error::UnsupportedParameter(format!(
                "connection element {s} outside 0..{ord}"
            )));
        }
    }
    let twisted = matches!(kind, GraphKind::TwistedCayley | GraphKind::TwistedCayleySum);
    let sigma = match (twisted, sigma) {
        (true, Some(s)) => {
            if !group.verify_automorphism(s) {
                return Err(Error::UnsupportedParameter(
                    "supplied map is not a group automorphism".into(),
                ));
            }
            Some(s.to_vec())
        }
        (true, None) => {
            return Err(Error::UnsupportedParameter(
                "twisted kinds require an automorphism".into(),
            ))
        }
        (false, Some(_)) => {
            return Err(Error::UnsupportedParameter(
                "automorphism only applies to twisted kinds".into(),
            ))
        }
        (false, None) => None,
    };

    let rho: Vec<Vec<u16>> = connection
        .iter()
        .map(|&s| {
            (0..ord)
                .map(|x| {
                    let y = match kind {
                        GraphKind::Cayley => group.mul(x, s),
                        GraphKind::CayleySum => group.mul(s, group.inv(x)),
                        GraphKind::TwistedCayley => sigma.as_ref().unwrap()[group.mul(x, s)],
                        GraphKind::TwistedCayleySum => {
                            sigma.as_ref().unwrap()[group.mul(s, group.inv(x))]
                        }
                        GraphKind::VertexTransitive => unreachable!(),
                    };
                    y as u16
                })
                .collect()
        })
        .collect();

    let a = adjacency_from_rho(ord, &rho);
    check_symmetric(ord, &a)?;
    let flags = flags_from_adjacency(ord, &a);
    let label = format!(
        "{}({}, S={})",
        kind.as_str(),
        group.name(),
        format_set(group, connection)
    );
    Ok(SpectralInstance {
        n: ord,
        d: connection.len(),
        rho,
        a,
        kind,
        action: left_translation_action(group),
        connection: Some(connection.to_vec()),
        sigma,
        flags,
        label,
    })
}

/// Wrap explicit permutations and a transitive action into an instance,
/// verifying that the adjacency is invariant under the whole action.
pub fn vertex_transitive_instance(
    n: usize,
    rho: Vec<Vec<usize>>,
    action: GroupAction,
) -> Result<SpectralInstance> {
    if rho.is_empty() {
        return Err(Error::UnsupportedParameter(
            "rho list must be non-empty".into(),
        ));
    }
    for (i, p) in rho.iter().enumerate() {
        if !is_permutation(p, n) {
            return Err(Error::InvalidPermutation(format!(
                "rho[{i}] is not a bijection on 0..{n}"
            )));
        }
    }
    if action.n() != n {
        return Err(Error::UnsupportedParameter(
            "action degree does not match vertex count".into(),
        ));
    }
    if !action.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let rho: Vec<Vec<u16>> = rho
        .into_iter()
        .map(|p| p.into_iter().map(|x| x as u16).collect())
        .collect();
    let a = adjacency_from_rho(n, &rho);
    check_symmetric(n, &a)?;
    for g in 0..action.group().order() {
        for u in 0..n {
            for v in 0..n {
                if a[action.apply(g, u) * n + action.apply(g, v)] != a[u * n + v] {
                    return Err(Error::NotInvariant { g, u, v });
                }
            }
        }
    }
    let flags = flags_from_adjacency(n, &a);
    let d = rho.len();
    let label = format!("vertex_transitive(n={n}, d={d})");
    Ok(SpectralInstance {
        n,
        d,
        rho,
        a,
        kind: GraphKind::VertexTransitive,
        action,
        connection: None,
        sigma: None,
        flags,
        label,
    })
}

/// Re-derive all validation flags from the stored adjacency.
pub fn validate_instance(inst: &SpectralInstance) -> ValidationRecord {
    ValidationRecord {
        n_ok: inst.n >= 2,
        d_ok: inst.d > 0,
        flags: flags_from_adjacency(inst.n, &inst.a),
    }
}

/// Split a matrix with all row and column sums equal to `d` into `d`
/// permutations (repeated bipartite perfect matching).
pub fn decompose_into_permutations(n: usize, d: usize, a: &[u32]) -> Result<Vec<Vec<usize>>> {
    for u in 0..n {
        let row: u32 = (0..n).map(|v| a[u * n + v]).sum();
        let col: u32 = (0..n).map(|v| a[v * n + u]).sum();
        if row != d as u32 || col != d as u32 {
            return Err(Error::UnsupportedParameter(format!(
                "row/column sums must equal d = {d}"
            )));
        }
    }
    let mut rem = a.to_vec();
    let mut perms = Vec::with_capacity(d);

    fn augment(
        n: usize,
        rem: &[u32],
        v: usize,
        visited: &mut [bool],
        match_row: &mut [usize],
        match_col: &mut [usize],
    ) -> bool {
        for u in 0..n {
            if rem[u * n + v] > 0 && !visited[u] {
                visited[u] = true;
                if match_row[u] == usize::MAX
                    || augment(n, rem, match_row[u], visited, match_row, match_col)
                {
                    match_row[u] = v;
                    match_col[v] = u;
                    return true;
                }
            }
        }
        false
    }

    for _ in 0..d {
        let mut match_row = vec![usize::MAX; n];
        let mut match_col = vec![usize::MAX; n];
        for v in 0..n {
            let mut visited = vec![false; n];
            if !augment(n, &rem, v, &mut visited, &mut match_row, &mut match_col) {
                return Err(Error::UnsupportedParameter(
                    "no perfect matching in remaining multigraph".into(),
                ));
            }
        }
        let perm: Vec<usize> = match_col.clone();
        for v in 0..n {
            rem[perm[v] * n + v] -= 1;
        }
        perms.push(perm);
    }
    Ok(perms)
}
