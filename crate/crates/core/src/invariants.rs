//! Exact combinatorial constants by exhaustive search, the overlap
//! functionals, and the orbit connectivity constant.
//!
//! Everything here is integer or rational arithmetic: certificates quote
//! these values exactly. Scans refuse to run above their caps instead of
//! falling back to approximation.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::graph::SpectralInstance;
use crate::real::Real;

/// Default cap for the 2^n subset scans.
pub const DEFAULT_CHEEGER_CAP: usize = 22;
/// Default cap for the 3^n sign-vector scan.
pub const DEFAULT_BIPARTITENESS_CAP: usize = 13;

/// Edge Cheeger constant: min over proper nonempty `F` of
/// `<T 1_F, 1_{V\F}> / min(vol F, vol V\F)` with `vol F = d |F|`.
///
/// Gray-code scan over subsets containing vertex 0 (the objective is
/// invariant under complementation), maintaining the cut incrementally.
pub fn edge_cheeger_exact(inst: &SpectralInstance, cap: usize) -> Result<Rational64> {
    let n = inst.n();
    if n > cap {
        return Err(Error::TooLargeForExact { n, cap });
    }
    assert!(n >= 2);
    let d = inst.d() as i64;
    let a = |u: usize, v: usize| inst.a(u, v) as i64;

    // in_f[w] = sum over u in F of a_uw
    let mut in_f: Vec<i64> = (0..n).map(|w| a(0, w)).collect();
    let mut members = vec![false; n];
    members[0] = true;
    let mut size: i64 = 1;
    let mut cut: i64 = d - a(0, 0);

    let mut best_num = i64::MAX;
    let mut best_den = 1i64;
    let mut consider = |cut: i64, size: i64| {
        let den = d * size.min(n as i64 - size);
        // compare cut/den < best in wide arithmetic
        if (cut as i128) * (best_den as i128) < (best_num as i128) * (den as i128) {
            best_num = cut;
            best_den = den;
        }
    };
    consider(cut, size);

    let steps = 1u64 << (n - 1);
    for i in 1..steps {
        let w = i.trailing_zeros() as usize + 1; // flip among vertices 1..n
        if members[w] {
            // remove w: shrink in_f first so it reflects F \ {w}
            members[w] = false;
            for v in 0..n {
                in_f[v] -= a(w, v);
            }
            cut -= d - a(w, w) - 2 * in_f[w];
            size -= 1;
        } else {
            members[w] = true;
            cut += d - a(w, w) - 2 * in_f[w];
            for v in 0..n {
                in_f[v] += a(w, v);
            }
            size += 1;
        }
        if size < n as i64 {
            consider(cut, size);
        }
    }
    Ok(Rational64::new(best_num, best_den))
}

/// Vertex Cheeger constant: min over nonempty `F` with `|F| <= n/2` of
/// `|boundary(F)| / |F|`, boundary taken as outside vertices adjacent to `F`.
pub fn vertex_cheeger_exact(inst: &SpectralInstance, cap: usize) -> Result<Rational64> {
    let n = inst.n();
    if n > cap {
        return Err(Error::TooLargeForExact { n, cap });
    }
    let adj = |u: usize, v: usize| u != v && inst.a(u, v) > 0;

    let mut nbrs_in_f = vec![0i64; n]; // count of F-neighbors, per vertex
    let mut members = vec![false; n];
    let mut size: i64 = 0;
    let mut boundary: i64 = 0; // |{v outside F : nbrs_in_f[v] > 0}|

    let mut best_num = i64::MAX;
    let mut best_den = 1i64;

    let steps = 1u64 << n;
    for i in 1..steps {
        let w = i.trailing_zeros() as usize;
        if members[w] {
            members[w] = false;
            size -= 1;
            for v in 0..n {
                if adj(w, v) {
                    nbrs_in_f[v] -= 1;
                    if nbrs_in_f[v] == 0 && !members[v] {
                        boundary -= 1;
                    }
                }
            }
            if nbrs_in_f[w] > 0 {
                boundary += 1; // w left F and is adjacent to it
            }
        } else {
            members[w] = true;
            size += 1;
            if nbrs_in_f[w] > 0 {
                boundary -= 1; // w was a boundary vertex
            }
            for v in 0..n {
                if adj(w, v) {
                    if nbrs_in_f[v] == 0 && !members[v] {
                        boundary += 1;
                    }
                    nbrs_in_f[v] += 1;
                }
            }
        }
        if size >= 1
            && 2 * size <= n as i64
            && (boundary as i128) * (best_den as i128) < (best_num as i128) * (size as i128)
        {
            best_num = boundary;
            best_den = size;
        }
    }
    Ok(Rational64::new(best_num, best_den))
}

/// Edge bipartiteness constant: exact minimum of
/// `<(dI + T) psi, psi> / (2 d ||psi||^2)` over nonzero `psi` in
/// `{-1, 0, 1}^V`, by depth-first enumeration with an incrementally
/// maintained quadratic form.
pub fn edge_bipartiteness_exact(inst: &SpectralInstance, cap: usize) -> Result<Rational64> {
    let n = inst.n();
    if n > cap {
        return Err(Error::TooLargeForExact { n, cap });
    }
    let d = inst.d() as i64;
    let a: Vec<i64> = inst.adjacency().iter().map(|&x| x as i64).collect();

    struct Dfs<'s> {
        n: usize,
        d: i64,
        a: &'s [i64],
        acc: Vec<i64>, // acc[v] = sum_{u < k} a_uv psi_u
        best_num: i64,
        best_den: i64,
    }
    impl Dfs<'_> {
        fn run(&mut self, k: usize, nonzero: i64, quad: i64) {
            if k == self.n {
                if nonzero > 0 {
                    let num = self.d * nonzero + quad;
                    let den = 2 * self.d * nonzero;
                    if (num as i128) * (self.best_den as i128)
                        < (self.best_num as i128) * (den as i128)
                    {
                        self.best_num = num;
                        self.best_den = den;
                    }
                }
                return;
            }
            self.run(k + 1, nonzero, quad);
            for s in [1i64, -1] {
                let q = quad + 2 * s * self.acc[k] + self.a[k * self.n + k];
                for v in (k + 1)..self.n {
                    self.acc[v] += s * self.a[k * self.n + v];
                }
                self.run(k + 1, nonzero + 1, q);
                for v in (k + 1)..self.n {
                    self.acc[v] -= s * self.a[k * self.n + v];
                }
            }
        }
    }

    let mut dfs = Dfs {
        n,
        d,
        a: &a,
        acc: vec![0; n],
        best_num: i64::MAX,
        best_den: 1,
    };
    dfs.run(0, 0, 0);
    Ok(Rational64::new(dfs.best_num, dfs.best_den))
}

/// Overlap data of a permutation against a vertex subset: the
/// intersection `I` of the subset with its image under `pi`, and the
/// agreement fraction
/// `Sigma = (|{v in V' : pi(v) in V'}| + |{v not in V' : pi(v) not in V'}|) / n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaOverlap {
    pub sigma: Rational64,
    pub intersection: Vec<usize>,
}

pub fn sigma_overlap(pi: &[u16], vset: &[usize], n: usize) -> SigmaOverlap {
    let mut member = vec![false; n];
    for &v in vset {
        member[v] = true;
    }
    let mut agree: i64 = 0;
    let mut image = vec![false; n];
    for u in 0..n {
        let pu = pi[u] as usize;
        if member[u] {
            image[pu] = true;
        }
        if member[u] == member[pu] {
            agree += 1;
        }
    }
    let intersection: Vec<usize> = (0..n).filter(|&v| member[v] && image[v]).collect();
    SigmaOverlap {
        sigma: Rational64::new(agree, n as i64),
        intersection,
    }
}

/// The orbit connectivity constant: 1 when the group has no index-two
/// subgroup, otherwise
/// `min over index-two H of max over i of min over H-orbits O of Sigma_{rho_i, O}`.
pub fn nu_constant(inst: &SpectralInstance) -> Result<Rational64> {
    let action = inst.action();
    let group = action.group();
    let subs = group.index_two_subgroups();
    if subs.is_empty() {
        return Ok(Rational64::new(1, 1));
    }
    let n = inst.n();
    let mut nu: Option<Rational64> = None;
    for h in subs {
        let orbits = action.subgroup_orbits(&h)?;
        let mut best_generator: Option<Rational64> = None;
        for rho in inst.rho() {
            let worst_orbit = orbits
                .iter()
                .map(|orbit| sigma_overlap(rho, orbit, n).sigma)
                .min()
                .expect("at least one orbit");
            best_generator = Some(match best_generator {
                Some(b) => b.max(worst_orbit),
                None => worst_orbit,
            });
        }
        let value = best_generator.expect("d >= 1");
        nu = Some(match nu {
            Some(v) => v.min(value),
            None => value,
        });
    }
    Ok(nu.unwrap())
}

/// Convert an exact rational to the scalar type.
pub fn to_real<R: Real>(q: Rational64) -> R {
    R::of(*q.numer() as f64) / R::of(*q.denom() as f64)
}
