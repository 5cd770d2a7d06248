//! Backtracking enumeration over vertical matchings for each canonical
//! horizontal structure.
//!
//! Every horizontal matching is conjugate, under relabelings with half-turns,
//! to exactly one table `H_λ`: rows of lengths `λ` made of consecutive squares
//! glued by translations. Summing over vertical matchings for `H_λ` with weight
//! `1 / |Stab(H_λ)|` therefore reproduces the naive weighting.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::run::Budget;
use super::{check_class, classify_filtered, weighted, CountTable, CylinderFilter, Filter, RawCounts};
use crate::dsu::UnionFind;
use crate::error::Result;
use crate::tiling::{combinations, corner_orbits, GluingTable, MarkedTiling};

/// Partitions of `n` with parts in non-increasing order, largest first.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            cur.push(k);
            rec(n - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Row structures compatible with a cylinder filter.
pub(crate) fn allowed_partitions(n: u32, f: CylinderFilter) -> Vec<Vec<u32>> {
    partitions(n)
        .into_iter()
        .filter(|p| match f {
            CylinderFilter::Any => true,
            CylinderFilter::OneCylinder => p.iter().all(|&k| k == p[0]),
            CylinderFilter::OneCylinderHeight1 => p.len() == 1,
        })
        .collect()
}

/// `∏ (2k)^{m_k} m_k!` over part sizes `k` with multiplicity `m_k`.
pub fn stabilizer_order(partition: &[u32]) -> BigInt {
    let mut out = BigInt::one();
    let mut i = 0;
    while i < partition.len() {
        let k = partition[i];
        let m = partition[i..].iter().take_while(|&&x| x == k).count();
        for j in 1..=m {
            out *= BigInt::from(2 * k) * BigInt::from(j);
        }
        i += m;
    }
    out
}

/// Horizontal partners and row successor for `H_λ`.
pub(crate) fn canonical_rows(partition: &[u32]) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
    let n: u32 = partition.iter().sum();
    let mut h = vec![0u32; 2 * n as usize];
    let mut next = vec![0u32; n as usize];
    let mut row = vec![0u32; n as usize];
    let mut start = 0;
    for (r, &k) in partition.iter().enumerate() {
        for j in 0..k {
            let a = start + j;
            let b = start + (j + 1) % k;
            h[2 * a as usize] = 2 * b + 1;
            h[(2 * b + 1) as usize] = 2 * a;
            next[a as usize] = b;
            row[a as usize] = r as u32;
        }
        start += k;
    }
    (h, next, row)
}

const NONE: u32 = u32::MAX;

/// Vertex points of `H_λ` (a bottom and a top point per square) joined by
/// vertical gluings. Every point has two side ends, so components are paths
/// until they close into cycles; a closed cycle is a vertex class.
struct Points {
    parent: Vec<u32>,
    size: Vec<u32>,
    edges: Vec<u32>,
    log: Vec<(u32, u32)>,
    closed: u32,
    poles: u32,
    open: u32,
}

impl Points {
    fn new(m: usize) -> Self {
        Self {
            parent: (0..m as u32).collect(),
            size: vec![1; m],
            edges: vec![0; m],
            log: Vec::with_capacity(4 * m),
            closed: 0,
            poles: 0,
            open: m as u32,
        }
    }

    #[inline]
    fn find(&self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            x = self.parent[x as usize];
        }
        x
    }

    #[inline]
    fn join(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.edges[ra as usize] += 1;
            self.log.push((NONE, ra));
            self.closed += 1;
            self.open -= 1;
            if self.size[ra as usize] == 1 {
                self.poles += 1;
            }
        } else {
            let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
                (ra, rb)
            } else {
                (rb, ra)
            };
            self.parent[small as usize] = big;
            self.size[big as usize] += self.size[small as usize];
            self.edges[big as usize] += self.edges[small as usize] + 1;
            self.log.push((small, big));
            self.open -= 1;
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (small, root) = self.log.pop().unwrap();
            if small == NONE {
                self.edges[root as usize] -= 1;
                self.closed -= 1;
                self.open += 1;
                if self.size[root as usize] == 1 {
                    self.poles -= 1;
                }
            } else {
                self.size[root as usize] -= self.size[small as usize];
                self.edges[root as usize] -= self.edges[small as usize] + 1;
                self.parent[small as usize] = small;
                self.open += 1;
            }
        }
    }
}

struct Search<'a> {
    g: u32,
    n: u32,
    area: u32,
    filter: &'a Filter,
    h: Vec<u32>,
    next: Vec<u32>,
    row: Vec<u32>,
    rows: usize,
    v: Vec<u32>,
    points: Points,
    target: u32,
    budget: &'a Budget,
    pending: u64,
    counts: RawCounts,
}

impl Search<'_> {
    /// Bottom or top points at the two ends of vertical slot `s`.
    #[inline]
    fn ends(&self, s: u32) -> (u32, u32) {
        let i = s / 2;
        let base = if s & 1 == 0 { self.area } else { 0 };
        (base + i, base + self.next[i as usize])
    }

    #[inline]
    fn glue(&mut self, a: u32, b: u32) {
        self.v[a as usize] = b;
        self.v[b as usize] = a;
        let (la, ra) = self.ends(a);
        let (lb, rb) = self.ends(b);
        if (a ^ b) & 1 == 1 {
            self.points.join(la, lb);
            self.points.join(ra, rb);
        } else {
            self.points.join(la, rb);
            self.points.join(ra, lb);
        }
    }

    #[inline]
    fn unglue(&mut self, a: u32, b: u32, mark: usize) {
        self.points.undo_to(mark);
        self.v[a as usize] = NONE;
        self.v[b as usize] = NONE;
    }

    #[inline]
    fn viable(&self) -> bool {
        let p = &self.points;
        p.closed <= self.target && p.poles <= self.n && p.closed + p.open >= self.target
    }

    fn charge(&mut self) -> Result<()> {
        self.pending += 1;
        if self.pending >= 1 << 16 {
            self.budget.charge(std::mem::take(&mut self.pending))?;
        }
        Ok(())
    }

    fn dfs(&mut self, from: u32) -> Result<()> {
        let m = 2 * self.area;
        let mut a = from;
        while a < m && self.v[a as usize] != NONE {
            a += 1;
        }
        if a == m {
            return self.leaf();
        }
        for b in a + 1..m {
            if self.v[b as usize] != NONE {
                continue;
            }
            self.charge()?;
            let mark = self.points.log.len();
            self.glue(a, b);
            if self.viable() {
                self.dfs(a + 1)?;
            }
            self.unglue(a, b, mark);
        }
        Ok(())
    }

    fn leaf(&mut self) -> Result<()> {
        if self.points.closed != self.target {
            return Ok(());
        }
        if self.rows > 1 {
            let mut uf = UnionFind::new(self.rows);
            for s in 0..2 * self.area {
                let t = self.v[s as usize] / 2;
                uf.union(self.row[(s / 2) as usize], self.row[t as usize]);
            }
            if uf.labels().1 != 1 {
                return Ok(());
            }
        }
        let table = GluingTable::from_partners_unchecked(self.area, self.h.clone(), self.v.clone());
        let cone = corner_orbits(&table);
        debug_assert_eq!(cone.len() as u32, self.target);
        let poles: Vec<usize> = (0..cone.len()).filter(|&i| cone.angle(i) == 2).collect();
        let others: Vec<usize> = (0..cone.len()).filter(|&i| cone.angle(i) != 2).collect();
        let extra = (self.n as usize) - poles.len();
        for pick in combinations(others.len(), extra) {
            let mut marked: Vec<usize> = poles.iter().copied().chain(pick.iter().map(|&j| others[j])).collect();
            marked.sort_unstable();
            let mt = MarkedTiling::from_parts(table.clone(), cone.clone(), marked)?;
            debug_assert_eq!(mt.genus(), self.g);
            if let Some(key) = classify_filtered(&mt, self.filter)? {
                *self.counts.entry(key).or_insert(0) += 1;
            }
        }
        Ok(())
    }
}

/// Unweighted leaf counts below a prefix of vertical pairs for `H_λ`.
pub(crate) fn pruned_shard(
    g: u32,
    n: u32,
    partition: &[u32],
    filter: &Filter,
    prefix: &[[u32; 2]],
    budget: &Budget,
) -> Result<RawCounts> {
    let area: u32 = partition.iter().sum();
    let target = area as i64 + 2 - 2 * g as i64;
    if target < 1 {
        return Ok(RawCounts::new());
    }
    let (h, next, row) = canonical_rows(partition);
    let mut s = Search {
        g,
        n,
        area,
        filter,
        h,
        next,
        row,
        rows: partition.len(),
        v: vec![NONE; 2 * area as usize],
        points: Points::new(2 * area as usize),
        target: target as u32,
        budget,
        pending: 0,
        counts: RawCounts::new(),
    };
    for &[a, b] in prefix {
        s.glue(a, b);
        if !s.viable() {
            return Ok(RawCounts::new());
        }
    }
    s.dfs(0)?;
    budget.charge(s.pending)?;
    Ok(s.counts)
}

/// Choices of the first `depth` vertical pairs, in search order.
pub(crate) fn prefixes(area: u32, depth: u32) -> Vec<Vec<[u32; 2]>> {
    let m = 2 * area;
    let mut out: Vec<Vec<[u32; 2]>> = vec![Vec::new()];
    for _ in 0..depth.min(area) {
        let mut grown = Vec::new();
        for p in &out {
            let used = |x: u32| p.iter().any(|&[a, b]| a == x || b == x);
            let a = (0..m).find(|&x| !used(x)).unwrap();
            for b in a + 1..m {
                if !used(b) {
                    let mut q = p.clone();
                    q.push([a, b]);
                    grown.push(q);
                }
            }
        }
        out = grown;
    }
    out
}

/// Weighted counts at area exactly `area` from the canonical-row search.
pub fn enumerate_pruned(g: u32, n: u32, area: u32, filter: &Filter) -> Result<CountTable> {
    check_class(g, n)?;
    let budget = Budget::unlimited();
    let mut ct = CountTable::new(g, n, area, filter.clone());
    for p in allowed_partitions(area, filter.horizontal) {
        let counts = pruned_shard(g, n, &p, filter, &[], &budget)?;
        for (h, v, q) in weighted(&counts, &stabilizer_order(&p)) {
            if !q.is_zero() {
                ct.add(area, h, v, q);
            }
        }
    }
    Ok(ct)
}
