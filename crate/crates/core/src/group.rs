//! Finite-group arithmetic on dense index tables.
//!
//! Groups are stored as explicit multiplication tables over element indices
//! `0..order`, which keeps every verification (group axioms, homomorphism
//! properties, subgroup closure) exhaustive and exact. The order is capped
//! at [`MAX_GROUP_ORDER`].

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Hard cap on group order; dense tables stay cheap below it.
pub const MAX_GROUP_ORDER: usize = 5000;

/// Associativity is checked on all triples up to this order. Groups built
/// from permutation closure are associative by construction, so larger
/// tables skip the cubic scan.
const ASSOC_CHECK_CAP: usize = 512;

/// Apply `f` after `g`: `compose(f, g)(x) = f(g(x))`.
pub fn compose(f: &[u16], g: &[u16]) -> Vec<u16> {
    g.iter().map(|&x| f[x as usize]).collect()
}

/// Inverse of a permutation given in one-line notation.
pub fn invert(p: &[u16]) -> Vec<u16> {
    let mut inv = vec![0u16; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as u16;
    }
    inv
}

/// Check that `p` is a bijection on `0..m`.
pub fn is_permutation(p: &[usize], m: usize) -> bool {
    if p.len() != m {
        return false;
    }
    let mut seen = vec![false; m];
    for &x in p {
        if x >= m || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// A finite group as a dense multiplication table over element indices.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
    identity: usize,
    labels: Option<Vec<String>>,
    name: String,
}

impl FiniteGroup {
    /// Build from a multiplication table, verifying the group axioms.
    ///
    /// `assoc_guaranteed` skips the cubic associativity scan above
    /// [`ASSOC_CHECK_CAP`]; callers set it when the table was produced by
    /// composing actual permutations.
    fn from_table(
        order: usize,
        mul: Vec<u16>,
        labels: Option<Vec<String>>,
        name: String,
        assoc_guaranteed: bool,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::NotAGroup("empty element set".into()));
        }
        if order > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge {
                order,
                cap: MAX_GROUP_ORDER,
            });
        }
        assert_eq!(mul.len(), order * order);

        // Latin square: each row and column is a permutation of 0..order.
        for g in 0..order {
            let mut row = vec![false; order];
            let mut col = vec![false; order];
            for h in 0..order {
                let r = mul[g * order + h] as usize;
                let c = mul[h * order + g] as usize;
                if r >= order || row[r] || c >= order || col[c] {
                    return Err(Error::NotAGroup(format!(
                        "row or column {g} is not a permutation"
                    )));
                }
                row[r] = true;
                col[c] = true;
            }
        }

        // Two-sided identity.
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mul[e * order + g] as usize == g && mul[g * order + e] as usize == g))
            .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;

        // Inverses.
        let mut inv = vec![0u16; order];
        for g in 0..order {
            let j = (0..order)
                .find(|&h| mul[g * order + h] as usize == identity)
                .ok_or_else(|| Error::NotAGroup(format!("element {g} has no inverse")))?;
            if mul[j * order + g] as usize != identity {
                return Err(Error::NotAGroup(format!("inverse of {g} is one-sided")));
            }
            inv[g] = j as u16;
        }

        if order <= ASSOC_CHECK_CAP && !assoc_guaranteed {
            for a in 0..order {
                for b in 0..order {
                    let ab = mul[a * order + b] as usize;
                    for c in 0..order {
                        let bc = mul[b * order + c] as usize;
                        if mul[ab * order + c] != mul[a * order + bc] {
                            return Err(Error::NotAGroup(format!(
                                "associativity fails on ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        }

        Ok(FiniteGroup {
            order,
            mul,
            inv,
            identity,
            labels,
            name,
        })
    }

    /// Build from an explicit multiplication table (full verification).
    pub fn from_mul_table(order: usize, mul: Vec<u16>, labels: Option<Vec<String>>) -> Result<Self> {
        Self::from_table(order, mul, labels, format!("table({order})"), false)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mul[g * self.order + h] as usize
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inv[g] as usize
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn label(&self, g: usize) -> String {
        match &self.labels {
            Some(l) => l[g].clone(),
            None => g.to_string(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|g| (g..self.order).all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    /// Conjugate `x g x^{-1}`.
    #[inline]
    pub fn conj(&self, x: usize, g: usize) -> usize {
        self.mul(self.mul(x, g), self.inv(x))
    }

    /// Cyclic group of order `n`; `mul[i][j] = (i + j) mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedParameter("cyclic(0)".into()));
        }
        if n > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge {
                order: n,
                cap: MAX_GROUP_ORDER,
            });
        }
        let mut mul = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                mul[i * n + j] = ((i + j) % n) as u16;
            }
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::from_table(n, mul, Some(labels), format!("cyclic({n})"), true)
    }

    /// Dihedral group of order `2n` (`n >= 3`). Index `eps*n + k` encodes
    /// `s^eps r^k` with `r^n = s^2 = e`, `s r s = r^{-1}`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::UnsupportedParameter(format!(
                "dihedral({n}): need n >= 3"
            )));
        }
        let ord = 2 * n;
        if ord > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge {
                order: ord,
                cap: MAX_GROUP_ORDER,
            });
        }
        let idx = |eps: usize, k: usize| eps * n + k % n;
        let mut mul = vec![0u16; ord * ord];
        for e1 in 0..2 {
            for k1 in 0..n {
                for e2 in 0..2 {
                    for k2 in 0..n {
                        // (s^e1 r^k1)(s^e2 r^k2) = s^(e1+e2) r^(k2 +- k1)
                        let (eps, k) = if e2 == 0 {
                            (e1, (k1 + k2) % n)
                        } else {
                            ((e1 + 1) % 2, (n + k2 - k1) % n)
                        };
                        mul[idx(e1, k1) * ord + idx(e2, k2)] = idx(eps, k) as u16;
                    }
                }
            }
        }
        let labels = (0..ord)
            .map(|i| {
                if i < n {
                    format!("r^{i}")
                } else {
                    format!("s r^{}", i - n)
                }
            })
            .collect();
        Self::from_table(ord, mul, Some(labels), format!("dihedral({n})"), false)
    }

    /// Symmetric group on `n <= 8` letters, elements in lexicographic
    /// one-line order (identity first).
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 8 {
            return Err(Error::UnsupportedParameter(format!(
                "symmetric({n}): need 1 <= n <= 8"
            )));
        }
        let mut perms: Vec<Vec<u16>> = Vec::new();
        let mut cur: Vec<u16> = (0..n as u16).collect();
        loop {
            perms.push(cur.clone());
            // next lexicographic permutation
            let mut i = n.wrapping_sub(1);
            while i > 0 && cur[i - 1] >= cur[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = n - 1;
            while cur[j] <= cur[i - 1] {
                j -= 1;
            }
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        let ord = perms.len();
        if ord > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge {
                order: ord,
                cap: MAX_GROUP_ORDER,
            });
        }
        let index: HashMap<Vec<u16>, usize> =
            perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut mul = vec![0u16; ord * ord];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                mul[i * ord + j] = index[&compose(p, q)] as u16;
            }
        }
        let labels = perms
            .iter()
            .map(|p| {
                let body: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                format!("[{}]", body.join(","))
            })
            .collect();
        Self::from_table(ord, mul, Some(labels), format!("symmetric({n})"), true)
    }

    /// The quaternion group of order 8: indices 0..8 stand for
    /// `1, -1, i, -i, j, -j, k, -k`.
    pub fn quaternion8() -> Result<Self> {
        // axis: 0 = 1, 1 = i, 2 = j, 3 = k; element = (sign, axis)
        let enc = |sign: usize, axis: usize| 2 * axis + sign;
        let qmul = |a: usize, b: usize| -> usize {
            let (sa, xa) = (a % 2, a / 2);
            let (sb, xb) = (b % 2, b / 2);
            let (s, x) = match (xa, xb) {
                (0, x) | (x, 0) => (0, x),
                (x, y) if x == y => (1, 0),            // i*i = -1
                (1, 2) => (0, 3),                      // i*j = k
                (2, 1) => (1, 3),                      // j*i = -k
                (2, 3) => (0, 1),                      // j*k = i
                (3, 2) => (1, 1),                      // k*j = -i
                (3, 1) => (0, 2),                      // k*i = j
                (1, 3) => (1, 2),                      // i*k = -j
                _ => unreachable!(),
            };
            enc((s + sa + sb) % 2, x)
        };
        let mut mul = vec![0u16; 64];
        for a in 0..8 {
            for b in 0..8 {
                mul[a * 8 + b] = qmul(a, b) as u16;
            }
        }
        let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Self::from_table(8, mul, Some(labels), "quaternion8".into(), false)
    }

    /// Direct product; index `a * |B| + b`.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<Self> {
        let ord = a.order * b.order;
        if ord > MAX_GROUP_ORDER {
            return Err(Error::GroupTooLarge {
                order: ord,
                cap: MAX_GROUP_ORDER,
            });
        }
        let enc = |x: usize, y: usize| x * b.order + y;
        let mut mul = vec![0u16; ord * ord];
        for x1 in 0..a.order {
            for y1 in 0..b.order {
                for x2 in 0..a.order {
                    for y2 in 0..b.order {
                        mul[enc(x1, y1) * ord + enc(x2, y2)] =
                            enc(a.mul(x1, x2), b.mul(y1, y2)) as u16;
                    }
                }
            }
        }
        let labels = (0..ord)
            .map(|i| format!("({},{})", a.label(i / b.order), b.label(i % b.order)))
            .collect();
        Self::from_table(
            ord,
            mul,
            Some(labels),
            format!("{}x{}", a.name, b.name),
            true,
        )
    }

    /// Closure of permutation generators on `0..m`, together with the
    /// natural action on `0..m`. The action need not be transitive.
    pub fn from_permutation_generators(
        gens: &[Vec<usize>],
        m: usize,
        max_order: usize,
    ) -> Result<(Self, GroupAction)> {
        if m == 0 {
            return Err(Error::InvalidPermutation("empty domain".into()));
        }
        let cap = max_order.min(MAX_GROUP_ORDER);
        let mut gens16: Vec<Vec<u16>> = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if !is_permutation(g, m) {
                return Err(Error::InvalidPermutation(format!(
                    "generator {i} is not a bijection on 0..{m}"
                )));
            }
            gens16.push(g.iter().map(|&x| x as u16).collect());
        }

        let id: Vec<u16> = (0..m as u16).collect();
        let mut elems: Vec<Vec<u16>> = vec![id.clone()];
        let mut index: HashMap<Vec<u16>, usize> = HashMap::new();
        index.insert(id, 0);
        let mut frontier = 0;
        while frontier < elems.len() {
            let cur = elems[frontier].clone();
            frontier += 1;
            for g in &gens16 {
                let next = compose(&cur, g);
                if !index.contains_key(&next) {
                    if elems.len() >= cap {
                        return Err(Error::ClosureExceedsLimit { limit: cap });
                    }
                    index.insert(next.clone(), elems.len());
                    elems.push(next);
                }
            }
        }

        let ord = elems.len();
        let mut mul = vec![0u16; ord * ord];
        for (i, p) in elems.iter().enumerate() {
            for (j, q) in elems.iter().enumerate() {
                let prod = compose(p, q);
                mul[i * ord + j] = *index
                    .get(&prod)
                    .ok_or_else(|| Error::NotAGroup("closure not multiplication-closed".into()))?
                    as u16;
            }
        }
        let group = Self::from_table(ord, mul, None, format!("perm-closure({ord})"), true)?;
        let action = GroupAction::from_perms_unchecked(group.clone(), m, elems);
        Ok((group, action))
    }

    /// True iff `sigma` is a group automorphism (exhaustive check).
    pub fn verify_automorphism(&self, sigma: &[usize]) -> bool {
        if !is_permutation(sigma, self.order) {
            return false;
        }
        if sigma[self.identity] != self.identity {
            return false;
        }
        for g in 0..self.order {
            for h in 0..self.order {
                if sigma[self.mul(g, h)] != self.mul(sigma[g], sigma[h]) {
                    return false;
                }
            }
        }
        true
    }

    /// Closure of a generating set under multiplication, as a sorted element list.
    pub fn subgroup_closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        let mut out = vec![self.identity];
        let mut queue: Vec<usize> = Vec::new();
        for &g in gens {
            if !member[g] {
                member[g] = true;
                out.push(g);
                queue.push(g);
            }
        }
        while let Some(x) = queue.pop() {
            for i in 0..out.len() {
                let h = out[i];
                for p in [self.mul(x, h), self.mul(h, x)] {
                    if !member[p] {
                        member[p] = true;
                        out.push(p);
                        queue.push(p);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// True iff `set` contains the identity and is closed under
    /// multiplication and inverses.
    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.order];
        for &g in set {
            if g >= self.order {
                return false;
            }
            member[g] = true;
        }
        if !member[self.identity] {
            return false;
        }
        set.iter().all(|&g| member[self.inv(g)])
            && set
                .iter()
                .all(|&g| set.iter().all(|&h| member[self.mul(g, h)]))
    }

    /// All subgroups of index two, each as a sorted element list.
    ///
    /// Computed through the quotient by `N = <squares, commutators>`:
    /// `G/N` is elementary abelian of order `2^k`, and the index-two
    /// subgroups of `G` are the preimages of its `2^k - 1` hyperplanes.
    pub fn index_two_subgroups(&self) -> Vec<Vec<usize>> {
        let ord = self.order;
        if ord % 2 != 0 {
            return Vec::new();
        }
        let mut gens: Vec<usize> = Vec::new();
        let mut seen = vec![false; ord];
        let push = |g: usize, gens: &mut Vec<usize>, seen: &mut Vec<bool>| {
            if !seen[g] {
                seen[g] = true;
                gens.push(g);
            }
        };
        for g in 0..ord {
            push(self.mul(g, g), &mut gens, &mut seen);
        }
        for g in 0..ord {
            for h in 0..ord {
                // [g,h] = g^{-1} h^{-1} g h
                let c = self.mul(self.mul(self.inv(g), self.inv(h)), self.mul(g, h));
                push(c, &mut gens, &mut seen);
            }
        }
        let n_sub = self.subgroup_closure(&gens);
        let n_member: Vec<bool> = {
            let mut m = vec![false; ord];
            for &g in &n_sub {
                m[g] = true;
            }
            m
        };

        // Label cosets of N.
        let mut coset = vec![usize::MAX; ord];
        let mut reps: Vec<usize> = Vec::new();
        for g in 0..ord {
            if coset[g] == usize::MAX {
                let id = reps.len();
                reps.push(g);
                for &x in &n_sub {
                    coset[self.mul(g, x)] = id;
                }
            }
        }
        let q = reps.len();
        if q == 1 || !q.is_power_of_two() {
            // q must be a power of two since G/N is elementary abelian;
            // q == 1 means no index-two subgroup exists.
            debug_assert!(q.is_power_of_two() || q == 1);
            return Vec::new();
        }

        // Coordinates of each coset over F2 with respect to a greedy basis.
        let id_coset = coset[self.identity];
        let mut vec_of = vec![u32::MAX; q];
        vec_of[id_coset] = 0;
        let mut known: Vec<usize> = vec![id_coset];
        let mut dim = 0u32;
        for c in 0..q {
            if vec_of[c] != u32::MAX {
                continue;
            }
            // c is independent of the current span: new basis vector
            let bit = 1u32 << dim;
            dim += 1;
            for i in 0..known.len() {
                let k = known[i];
                let sum = coset[self.mul(reps[c], reps[k])];
                if vec_of[sum] == u32::MAX {
                    vec_of[sum] = vec_of[k] | bit;
                    known.push(sum);
                }
            }
        }
        debug_assert_eq!(1usize << dim, q);

        let mut out: Vec<Vec<usize>> = Vec::new();
        for phi in 1u32..(1 << dim) {
            let h: Vec<usize> = (0..ord)
                .filter(|&g| (vec_of[coset[g]] & phi).count_ones() % 2 == 0)
                .collect();
            debug_assert_eq!(h.len(), ord / 2);
            debug_assert!(self.is_subgroup(&h));
            out.push(h);
        }
        out.sort();
        let _ = n_member;
        out
    }

    /// Brute-force simplicity test via normal closures of single elements.
    /// Returns `None` above the order cap.
    pub fn is_simple(&self, cap: usize) -> Option<bool> {
        if self.order > cap {
            return None;
        }
        if self.order == 1 {
            return Some(false);
        }
        for g in 0..self.order {
            if g == self.identity {
                continue;
            }
            let conj_class: Vec<usize> = (0..self.order).map(|x| self.conj(x, g)).collect();
            let closure = self.subgroup_closure(&conj_class);
            if closure.len() < self.order {
                return Some(false);
            }
        }
        Some(true)
    }
}

/// A group acting on a vertex set `0..n` by permutations.
#[derive(Debug, Clone)]
pub struct GroupAction {
    group: FiniteGroup,
    n: usize,
    perm: Vec<Vec<u16>>,
    transitive: bool,
    stabilizer_size: Option<usize>,
}

impl GroupAction {
    /// Build from explicit permutations, verifying the homomorphism
    /// property exhaustively and computing transitivity.
    pub fn new(group: FiniteGroup, n: usize, perm: Vec<Vec<u16>>) -> Result<Self> {
        if perm.len() != group.order() {
            return Err(Error::InvalidPermutation(
                "need one permutation per group element".into(),
            ));
        }
        for (g, p) in perm.iter().enumerate() {
            let as_usize: Vec<usize> = p.iter().map(|&x| x as usize).collect();
            if !is_permutation(&as_usize, n) {
                return Err(Error::InvalidPermutation(format!(
                    "image of element {g} is not a bijection on 0..{n}"
                )));
            }
        }
        let id = &perm[group.identity()];
        if !(0..n).all(|x| id[x] as usize == x) {
            return Err(Error::InvalidPermutation(
                "identity element must act as the identity permutation".into(),
            ));
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                let gh = group.mul(g, h);
                for x in 0..n {
                    if perm[gh][x] != perm[g][perm[h][x] as usize] {
                        return Err(Error::InvalidPermutation(format!(
                            "not a homomorphism at ({g},{h}) on vertex {x}"
                        )));
                    }
                }
            }
        }
        Ok(Self::from_perms_unchecked(group, n, perm))
    }

    /// Internal constructor for actions whose homomorphism property holds
    /// by construction (permutation closure and left translation).
    fn from_perms_unchecked(group: FiniteGroup, n: usize, perm: Vec<Vec<u16>>) -> Self {
        let transitive = {
            let mut seen = vec![false; n];
            seen[0] = true;
            let mut stack = vec![0usize];
            let mut count = 1;
            while let Some(x) = stack.pop() {
                for p in &perm {
                    let y = p[x] as usize;
                    if !seen[y] {
                        seen[y] = true;
                        count += 1;
                        stack.push(y);
                    }
                }
            }
            count == n
        };
        let stabilizer_size = if transitive && group.order() % n == 0 {
            Some(group.order() / n)
        } else {
            None
        };
        GroupAction {
            group,
            n,
            perm,
            transitive,
            stabilizer_size,
        }
    }

    /// Left translation of a group on itself; free and transitive, `t = 1`.
    pub fn left_translation(group: FiniteGroup) -> Self {
        let ord = group.order();
        let perm: Vec<Vec<u16>> = (0..ord)
            .map(|g| (0..ord).map(|x| group.mul(g, x) as u16).collect())
            .collect();
        Self::from_perms_unchecked(group, ord, perm)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn apply(&self, g: usize, x: usize) -> usize {
        self.perm[g][x] as usize
    }

    pub fn perm(&self, g: usize) -> &[u16] {
        &self.perm[g]
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive
    }

    /// Stabilizer size `t = |G| / n`; defined for transitive actions.
    pub fn stabilizer_size(&self) -> Option<usize> {
        self.stabilizer_size
    }

    /// Orbit partition of the vertex set under a verified subgroup `H`.
    pub fn subgroup_orbits(&self, h: &[usize]) -> Result<Vec<Vec<usize>>> {
        if !self.group.is_subgroup(h) {
            return Err(Error::NotASubgroup(
                "orbit computation requires a verified subgroup".into(),
            ));
        }
        let mut seen = vec![false; self.n];
        let mut orbits = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(x) = stack.pop() {
                orbit.push(x);
                for &g in h {
                    let y = self.apply(g, x);
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits.sort();
        Ok(orbits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_index_two(g: &FiniteGroup) -> Vec<Vec<usize>> {
        let ord = g.order();
        if ord % 2 != 0 {
            return Vec::new();
        }
        let half = ord / 2;
        let mut out = Vec::new();
        // every subset of size ord/2 containing the identity
        let others: Vec<usize> = (0..ord).filter(|&x| x != g.identity()).collect();
        let mut subset = vec![g.identity()];
        fn rec(
            g: &FiniteGroup,
            others: &[usize],
            start: usize,
            subset: &mut Vec<usize>,
            half: usize,
            out: &mut Vec<Vec<usize>>,
        ) {
            if subset.len() == half {
                let mut s = subset.clone();
                s.sort_unstable();
                if g.is_subgroup(&s) {
                    out.push(s);
                }
                return;
            }
            for i in start..others.len() {
                subset.push(others[i]);
                rec(g, others, i + 1, subset, half, out);
                subset.pop();
            }
        }
        rec(g, &others, 0, &mut subset, half, &mut out);
        out.sort();
        out
    }

    #[test]
    fn closure_of_three_cycle_has_order_three() {
        let (g, action) = FiniteGroup::from_permutation_generators(&[vec![1, 2, 0]], 3, 100).unwrap();
        assert_eq!(g.order(), 3);
        assert!(action.is_transitive());
    }

    #[test]
    fn closure_of_transposition_and_cycle_is_sym3() {
        let gens = vec![vec![1, 0, 2], vec![1, 2, 0]];
        let (g, _) = FiniteGroup::from_permutation_generators(&gens, 3, 100).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let (g, action) = FiniteGroup::from_permutation_generators(&[], 1, 100).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(action.n(), 1);
        assert!(action.is_transitive());
    }

    #[test]
    fn intransitive_generator_action() {
        // a single transposition fixes the third point
        let (g, action) = FiniteGroup::from_permutation_generators(&[vec![1, 0, 2]], 3, 10).unwrap();
        assert_eq!(g.order(), 2);
        assert!(!action.is_transitive());
        assert_eq!(action.stabilizer_size(), None);
    }

    #[test]
    fn closure_cap_is_enforced() {
        let err = FiniteGroup::from_permutation_generators(&[vec![1, 2, 3, 4, 0]], 5, 3);
        assert!(matches!(err, Err(Error::ClosureExceedsLimit { limit: 3 })));
    }

    #[test]
    fn non_bijective_generator_rejected() {
        let err = FiniteGroup::from_permutation_generators(&[vec![0, 0, 2]], 3, 10);
        assert!(matches!(err, Err(Error::InvalidPermutation(_))));
    }

    #[test]
    fn cyclic_five_table() {
        let g = FiniteGroup::cyclic(5).unwrap();
        assert_eq!(g.order(), 5);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(g.mul(i, j), (i + j) % 5);
            }
        }
        assert!(g.is_abelian());
    }

    #[test]
    fn dihedral_three_matches_sym3_structure() {
        let d3 = FiniteGroup::dihedral(3).unwrap();
        assert_eq!(d3.order(), 6);
        assert!(!d3.is_abelian());
        // same (order, #involutions) fingerprint as Sym(3)
        let invol = |g: &FiniteGroup| {
            (0..g.order())
                .filter(|&x| x != g.identity() && g.mul(x, x) == g.identity())
                .count()
        };
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(invol(&d3), invol(&s3));
        assert_eq!(invol(&d3), 3);
    }

    #[test]
    fn direct_product_of_cyclics() {
        let a = FiniteGroup::cyclic(2).unwrap();
        let b = FiniteGroup::cyclic(3).unwrap();
        let p = FiniteGroup::direct_product(&a, &b).unwrap();
        assert_eq!(p.order(), 6);
        assert!(p.is_abelian());
    }

    #[test]
    fn quaternion_relations() {
        let q = FiniteGroup::quaternion8().unwrap();
        assert_eq!(q.order(), 8);
        assert!(!q.is_abelian());
        // i*i = j*j = k*k = -1
        assert_eq!(q.mul(2, 2), 1);
        assert_eq!(q.mul(4, 4), 1);
        assert_eq!(q.mul(6, 6), 1);
        // i*j = k, j*i = -k
        assert_eq!(q.mul(2, 4), 6);
        assert_eq!(q.mul(4, 2), 7);
    }

    #[test]
    fn unsupported_parameters_rejected() {
        assert!(matches!(
            FiniteGroup::dihedral(2),
            Err(Error::UnsupportedParameter(_))
        ));
        assert!(matches!(
            FiniteGroup::symmetric(9),
            Err(Error::UnsupportedParameter(_))
        ));
        // symmetric(7) has order 5040, over the dense-table cap
        assert!(matches!(
            FiniteGroup::symmetric(7),
            Err(Error::GroupTooLarge { .. })
        ));
    }

    #[test]
    fn index_two_of_odd_group_is_empty() {
        let g = FiniteGroup::cyclic(5).unwrap();
        assert!(g.index_two_subgroups().is_empty());
    }

    #[test]
    fn index_two_of_cyclic_six() {
        let g = FiniteGroup::cyclic(6).unwrap();
        assert_eq!(g.index_two_subgroups(), vec![vec![0, 2, 4]]);
    }

    #[test]
    fn index_two_of_sym3_is_alternating() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let subs = g.index_two_subgroups();
        assert_eq!(subs.len(), 1);
        let h = &subs[0];
        assert_eq!(h.len(), 3);
        assert!(h.contains(&g.identity()));
        // the two 3-cycles square to each other
        for &x in h {
            assert!(h.contains(&g.mul(x, x)));
        }
    }

    #[test]
    fn index_two_matches_brute_force_up_to_order_16() {
        let c2 = FiniteGroup::cyclic(2).unwrap();
        let c4 = FiniteGroup::cyclic(4).unwrap();
        let mut corpus = vec![
            FiniteGroup::cyclic(2).unwrap(),
            FiniteGroup::cyclic(4).unwrap(),
            FiniteGroup::cyclic(6).unwrap(),
            FiniteGroup::cyclic(8).unwrap(),
            FiniteGroup::cyclic(12).unwrap(),
            FiniteGroup::cyclic(16).unwrap(),
            FiniteGroup::dihedral(3).unwrap(),
            FiniteGroup::dihedral(4).unwrap(),
            FiniteGroup::dihedral(5).unwrap(),
            FiniteGroup::dihedral(6).unwrap(),
            FiniteGroup::dihedral(7).unwrap(),
            FiniteGroup::dihedral(8).unwrap(),
            FiniteGroup::symmetric(3).unwrap(),
            FiniteGroup::quaternion8().unwrap(),
            FiniteGroup::direct_product(&c2, &c4).unwrap(),
            FiniteGroup::direct_product(&c2, &c2).unwrap(),
        ];
        let c2xc4 = corpus[14].clone();
        corpus.push(FiniteGroup::direct_product(&c2, &c2xc4).unwrap()); // C2 x (C2 x C4)
        for g in &corpus {
            assert!(g.order() <= 16);
            assert_eq!(
                g.index_two_subgroups(),
                brute_force_index_two(g),
                "mismatch for {}",
                g.name()
            );
        }
        // Q8 has exactly three index-two subgroups
        let q = FiniteGroup::quaternion8().unwrap();
        assert_eq!(q.index_two_subgroups().len(), 3);
    }

    #[test]
    fn whole_group_orbit_is_everything() {
        let g = FiniteGroup::cyclic(6).unwrap();
        let action = GroupAction::left_translation(g);
        let all: Vec<usize> = (0..6).collect();
        let orbits = action.subgroup_orbits(&all).unwrap();
        assert_eq!(orbits, vec![(0..6).collect::<Vec<_>>()]);
    }

    #[test]
    fn index_two_orbits_are_cosets() {
        let g = FiniteGroup::cyclic(6).unwrap();
        let action = GroupAction::left_translation(g);
        let orbits = action.subgroup_orbits(&[0, 2, 4]).unwrap();
        assert_eq!(orbits, vec![vec![0, 2, 4], vec![1, 3, 5]]);
    }

    #[test]
    fn trivial_subgroup_gives_singletons() {
        let g = FiniteGroup::cyclic(4).unwrap();
        let action = GroupAction::left_translation(g);
        let orbits = action.subgroup_orbits(&[0]).unwrap();
        assert_eq!(orbits.len(), 4);
        assert!(orbits.iter().all(|o| o.len() == 1));
    }

    #[test]
    fn orbit_stabilizer_consistency() {
        // |H| = |orbit| * |stabilizer of a vertex inside H|
        let g = FiniteGroup::dihedral(4).unwrap();
        let action = GroupAction::left_translation(g.clone());
        for h in g.index_two_subgroups() {
            for orbit in action.subgroup_orbits(&h).unwrap() {
                let v = orbit[0];
                let stab = h.iter().filter(|&&x| action.apply(x, v) == v).count();
                assert_eq!(h.len(), orbit.len() * stab);
            }
        }
    }

    #[test]
    fn not_a_subgroup_error() {
        let g = FiniteGroup::cyclic(6).unwrap();
        let action = GroupAction::left_translation(g);
        assert!(matches!(
            action.subgroup_orbits(&[0, 1]),
            Err(Error::NotASubgroup(_))
        ));
    }

    #[test]
    fn automorphism_checks() {
        let g = FiniteGroup::cyclic(6).unwrap();
        let id: Vec<usize> = (0..6).collect();
        assert!(g.verify_automorphism(&id));
        let neg: Vec<usize> = (0..6).map(|x| (6 - x) % 6).collect();
        assert!(g.verify_automorphism(&neg));
        let mut swap = id.clone();
        swap.swap(1, 2);
        assert!(!g.verify_automorphism(&swap));
    }

    #[test]
    fn simplicity_scan() {
        assert_eq!(FiniteGroup::cyclic(5).unwrap().is_simple(200), Some(true));
        assert_eq!(FiniteGroup::cyclic(6).unwrap().is_simple(200), Some(false));
        assert_eq!(FiniteGroup::symmetric(3).unwrap().is_simple(200), Some(false));
        assert_eq!(FiniteGroup::symmetric(4).unwrap().is_simple(200), Some(false));
        assert_eq!(FiniteGroup::quaternion8().unwrap().is_simple(200), Some(false));
    }

    #[test]
    fn simplicity_cap_returns_none() {
        let s5 = FiniteGroup::symmetric(5).unwrap();
        assert_eq!(s5.is_simple(100), None);
        // the normal closure of a 3-cycle is the alternating group
        assert_eq!(s5.is_simple(200), Some(false));
    }

    #[test]
    fn left_translation_is_free_and_transitive() {
        let g = FiniteGroup::symmetric(3).unwrap();
        let action = GroupAction::left_translation(g);
        assert!(action.is_transitive());
        assert_eq!(action.stabilizer_size(), Some(1));
        // perm[3] on cyclic(6) swaps x and x+3
        let c6 = FiniteGroup::cyclic(6).unwrap();
        let a6 = GroupAction::left_translation(c6);
        for x in 0..6 {
            assert_eq!(a6.apply(3, x), (x + 3) % 6);
        }
    }

    #[test]
    fn action_homomorphism_validation_rejects_garbage() {
        let g = FiniteGroup::cyclic(3).unwrap();
        // wrong: element 1 acts as identity
        let perms: Vec<Vec<u16>> = vec![vec![0, 1, 2], vec![0, 1, 2], vec![2, 0, 1]];
        assert!(GroupAction::new(g, 3, perms).is_err());
    }
}
