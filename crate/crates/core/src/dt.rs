//! Integer points in Dehn–Thurston coordinates relative to a pants
//! decomposition, and their lattice counts.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::dsu::UnionFind;
use crate::error::{Error, Result};

/// Pairs of pants as triples of curve indices; `-1` marks a puncture.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PantsDecomposition {
    pub g: u32,
    pub n: u32,
    pub regions: Vec<[i64; 3]>,
}

impl PantsDecomposition {
    pub fn new(g: u32, n: u32, regions: Vec<[i64; 3]>) -> Result<Self> {
        let pd = Self { g, n, regions };
        pd.validate()?;
        Ok(pd)
    }

    /// `3g - 3 + n`.
    pub fn n_curves(&self) -> usize {
        (3 * self.g as i64 - 3 + self.n as i64).max(0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGraph(m));
        if 2 - 2 * self.g as i64 - self.n as i64 >= 0 {
            return bad(format!("(g, n) = ({}, {}) is not hyperbolic", self.g, self.n));
        }
        let np = self.n_curves();
        if np == 0 {
            return bad("a pair of pants has no interior curves".into());
        }
        if self.regions.len() != (2 * self.g + self.n) as usize - 2 {
            return bad(format!(
                "expected {} regions, got {}",
                2 * self.g + self.n - 2,
                self.regions.len()
            ));
        }
        let mut seen = vec![0u32; np];
        let mut punctures = 0;
        for r in &self.regions {
            for &c in r {
                if c == -1 {
                    punctures += 1;
                } else if c < 0 || c as usize >= np {
                    return bad(format!("curve index {c} out of range"));
                } else {
                    seen[c as usize] += 1;
                }
            }
        }
        if punctures != self.n {
            return bad(format!("expected {} puncture slots, got {punctures}", self.n));
        }
        if let Some(i) = seen.iter().position(|&k| k != 2) {
            return bad(format!("curve {i} must bound exactly two slots"));
        }
        let mut uf = UnionFind::new(self.regions.len());
        for i in 0..np as i64 {
            let owners: Vec<usize> = (0..self.regions.len())
                .filter(|&r| self.regions[r].contains(&i))
                .collect();
            uf.union(owners[0] as u32, owners[owners.len() - 1] as u32);
        }
        if uf.labels().1 != 1 {
            return bad("pants graph is disconnected".into());
        }
        Ok(())
    }

    /// Region × curve incidence modulo 2.
    fn parity_masks(&self) -> Vec<u32> {
        let mut masks = vec![0u32; self.n_curves()];
        for (r, slots) in self.regions.iter().enumerate() {
            for &c in slots {
                if c >= 0 {
                    masks[c as usize] ^= 1 << r;
                }
            }
        }
        masks
    }
}

/// Intersection and twist numbers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DtPoint {
    pub m: Vec<u64>,
    pub t: Vec<i64>,
}

impl DtPoint {
    pub fn add(&self, other: &DtPoint) -> DtPoint {
        DtPoint {
            m: self.m.iter().zip(&other.m).map(|(a, b)| a + b).collect(),
            t: self.t.iter().zip(&other.t).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Membership in the semigroup of integral measured laminations: zero
/// intersection forces a non-negative twist, and the intersection numbers
/// around each pair of pants sum to an even number.
pub fn semigroup_contains(p: &DtPoint, pd: &PantsDecomposition) -> Result<bool> {
    let np = pd.n_curves();
    if p.m.len() != np || p.t.len() != np {
        return Err(Error::Domain(format!(
            "point has lengths ({}, {}), expected {np}",
            p.m.len(),
            p.t.len()
        )));
    }
    if p.m.iter().zip(&p.t).any(|(&m, &t)| m == 0 && t < 0) {
        return Ok(false);
    }
    Ok(pd
        .regions
        .iter()
        .all(|r| r.iter().filter(|&&c| c >= 0).map(|&c| p.m[c as usize]).sum::<u64>() % 2 == 0))
}

/// `#I_L`: points with every `m_i > 0`, `0 ≤ t_i < m_i` and `Σ m_i ≤ L`.
pub fn count_il(pd: &PantsDecomposition, l: u64) -> BigUint {
    let masks = pd.parity_masks();
    let states = 1usize << pd.regions.len();
    let l = l as usize;
    // dp[s][mask]: Σ ∏ m_i over assignments so far with Σ m = s and parity `mask`
    let mut dp = vec![vec![BigUint::zero(); states]; l + 1];
    dp[0][0] = BigUint::one();
    for &mask in &masks {
        let mut next = vec![vec![BigUint::zero(); states]; l + 1];
        for s in 0..=l {
            for st in 0..states {
                if dp[s][st].is_zero() {
                    continue;
                }
                for m in 1..=l - s {
                    let flip = if m % 2 == 1 { mask as usize } else { 0 };
                    let add = &dp[s][st] * BigUint::from(m);
                    next[s + m][st ^ flip] += add;
                }
            }
        }
        dp = next;
    }
    dp.iter().fold(BigUint::zero(), |acc, row| acc + &row[0])
}

/// Rank over GF(2) of the parity conditions.
pub fn parity_rank(pd: &PantsDecomposition) -> u32 {
    let mut rows: Vec<u32> = pd.parity_masks();
    let mut rank = 0;
    for bit in 0..pd.regions.len() {
        if let Some(i) = rows.iter().position(|&r| r >> bit & 1 == 1) {
            let pivot = rows.swap_remove(i);
            for r in rows.iter_mut() {
                if *r >> bit & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Index of the integral lamination semigroup's group in `Z^{2Np}`.
pub fn semigroup_index(pd: &PantsDecomposition) -> BigUint {
    BigUint::one() << parity_rank(pd)
}

/// Volume of `{0 ≤ y_i < x_i, Σ x_i ≤ 1}` in `R^{2Np}`: `1 / (2Np)!`.
pub fn leb_a1(np: u32) -> Result<BigRational> {
    if np == 0 {
        return Err(Error::Domain("need at least one curve".into()));
    }
    let f: BigInt = (1..=2 * np as u64).map(BigInt::from).product();
    Ok(BigRational::new(BigInt::one(), f))
}

/// `(#I_L / L^{2Np}, Leb(A₁) / index)`.
pub fn volume_limit_check(pd: &PantsDecomposition, l: u64) -> Result<(BigRational, BigRational)> {
    if l == 0 {
        return Err(Error::Domain("L must be positive".into()));
    }
    let np = pd.n_curves() as u32;
    let count = BigInt::from(count_il(pd, l));
    let ratio = BigRational::new(count, BigInt::from(l).pow(2 * np));
    let limit = leb_a1(np)? / BigRational::from_integer(BigInt::from(semigroup_index(pd)));
    Ok((ratio, limit))
}

/// `c(𝒫) = Leb(A₁) / [Stab(𝒫) : Stab_*(𝒫)]` for a supplied index.
pub fn pants_frequency(pd: &PantsDecomposition, stab_index: u64) -> Result<BigRational> {
    if stab_index == 0 {
        return Err(Error::Domain("stabilizer index must be positive".into()));
    }
    Ok(leb_a1(pd.n_curves() as u32)? / BigRational::from_integer(stab_index.into()))
}

/// Ratio of the lattice-count limit to `c(𝒫)`; the volume and the
/// stabilizer index cancel, leaving `1 / index`.
pub fn r_from_pants(pd: &PantsDecomposition, stab_index: u64) -> Result<BigRational> {
    let (_, limit) = volume_limit_check(pd, 1)?;
    let c = pants_frequency(pd, stab_index)?;
    Ok(limit / c / BigRational::from_integer(stab_index.into()))
}

/// Every pants graph of type `(g, n)` up to isomorphism.
pub fn all_pants_graphs(g: u32, n: u32) -> Result<Vec<PantsDecomposition>> {
    let np = 3 * g as i64 - 3 + n as i64;
    if 2 - 2 * g as i64 - n as i64 >= 0 || np < 1 {
        return Err(Error::Domain(format!("(g, n) = ({g}, {n}) has no pants curves")));
    }
    let r = (2 * g + n - 2) as usize;
    let mut found = BTreeSet::new();
    for legs in leg_distributions(r, n) {
        let deg: Vec<u32> = legs.iter().map(|&l| 3 - l).collect();
        let mut adj = vec![vec![0u32; r]; r];
        fill_adjacency(0, 0, &deg, &mut vec![0; r], &mut adj, &mut |adj| {
            if connected(adj) {
                found.insert(canonical_graph(&legs, adj));
            }
        });
    }
    found
        .into_iter()
        .map(|(legs, adj)| PantsDecomposition::new(g, n, regions_of(&legs, &adj)))
        .collect()
}

/// Non-increasing leg counts per pair of pants.
fn leg_distributions(r: usize, n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, r: usize, out: &mut Vec<Vec<u32>>) {
        if i == r {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let cap = cur.last().map_or(3, |&c| c.min(3));
        for l in 0..=left.min(cap) {
            cur.push(l);
            rec(i + 1, left - l, cur, r, out);
            cur.pop();
        }
    }
    rec(0, n, &mut Vec::new(), r, &mut out);
    out
}

/// Symmetric multigraph with `adj[v][v]` loops (each using two ends) and
/// exact degrees `deg`.
fn fill_adjacency(
    i: usize,
    j: usize,
    deg: &[u32],
    used: &mut Vec<u32>,
    adj: &mut Vec<Vec<u32>>,
    emit: &mut dyn FnMut(&Vec<Vec<u32>>),
) {
    let r = deg.len();
    if i == r {
        emit(adj);
        return;
    }
    if j == r {
        if used[i] == deg[i] {
            fill_adjacency(i + 1, i + 1, deg, used, adj, emit);
        }
        return;
    }
    let per = if i == j { 2 } else { 1 };
    let mut k = 0;
    loop {
        let need_i = used[i] + per * k;
        let need_j = if i == j { need_i } else { used[j] + k };
        if need_i > deg[i] || need_j > deg[j] {
            break;
        }
        used[i] += per * k;
        if i != j {
            used[j] += k;
        }
        adj[i][j] = k;
        adj[j][i] = k;
        fill_adjacency(i, j + 1, deg, used, adj, emit);
        used[i] -= per * k;
        if i != j {
            used[j] -= k;
        }
        k += 1;
    }
    adj[i][j] = 0;
    adj[j][i] = 0;
}

fn connected(adj: &[Vec<u32>]) -> bool {
    let mut uf = UnionFind::new(adj.len());
    for i in 0..adj.len() {
        for j in i + 1..adj.len() {
            if adj[i][j] > 0 {
                uf.union(i as u32, j as u32);
            }
        }
    }
    uf.labels().1 == 1
}

fn canonical_graph(legs: &[u32], adj: &[Vec<u32>]) -> (Vec<u32>, Vec<Vec<u32>>) {
    let r = legs.len();
    let mut best: Option<(Vec<u32>, Vec<Vec<u32>>)> = None;
    let mut perm: Vec<usize> = (0..r).collect();
    loop {
        if perm.iter().enumerate().any(|(i, &p)| legs[p] != legs[i]) {
            if !next_permutation(&mut perm) {
                break;
            }
            continue;
        }
        let l = legs.to_vec();
        let a: Vec<Vec<u32>> = perm
            .iter()
            .map(|&p| perm.iter().map(|&q| adj[p][q]).collect())
            .collect();
        let cand = (l, a);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn regions_of(legs: &[u32], adj: &[Vec<u32>]) -> Vec<[i64; 3]> {
    let r = legs.len();
    let mut slots: Vec<Vec<i64>> = vec![Vec::new(); r];
    let mut curve = 0i64;
    for i in 0..r {
        for j in i..r {
            for _ in 0..adj[i][j] {
                slots[i].push(curve);
                slots[j].push(curve);
                curve += 1;
            }
        }
        for _ in 0..legs[i] {
            slots[i].push(-1);
        }
    }
    slots.into_iter().map(|s| [s[0], s[1], s[2]]).collect()
}
