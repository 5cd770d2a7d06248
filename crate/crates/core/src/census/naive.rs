//! Reference enumeration over every pair of side matchings.

use num_traits::Zero;

use super::run::Budget;
use super::{check_class, classify_filtered, relabeling_group_order, weighted, CountTable, Filter, RawCounts};
use crate::dsu::UnionFind;
use crate::error::Result;
use crate::tiling::{glued_corners, h_side_corners, mark_assignments, v_side_corners, GluingTable};

/// All fixed-point-free involutions on `0..2n` extending `prefix`, in the
/// order produced by pairing the lowest free slot with each later free slot.
pub(crate) fn matchings(n: u32, prefix: &[[u32; 2]]) -> Vec<Vec<u32>> {
    let m = 2 * n as usize;
    let mut p = vec![u32::MAX; m];
    for &[a, b] in prefix {
        p[a as usize] = b;
        p[b as usize] = a;
    }
    let mut out = Vec::new();
    fn rec(p: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let Some(a) = p.iter().position(|&x| x == u32::MAX) else {
            out.push(p.clone());
            return;
        };
        for b in a + 1..p.len() {
            if p[b] == u32::MAX {
                p[a] = b as u32;
                p[b] = a as u32;
                rec(p, out);
                p[a] = u32::MAX;
                p[b] = u32::MAX;
            }
        }
    }
    rec(&mut p, &mut out);
    out
}

/// Vertex classes and angle-π classes of the table given by two partner arrays.
fn vertex_stats(n: u32, h: &[u32], v: &[u32], uf: &mut UnionFind) -> (usize, u32) {
    *uf = UnionFind::new(4 * n as usize);
    for s in 0..2 * n {
        for (partners, ends) in [
            (h, h_side_corners as fn(u32) -> (u32, u32)),
            (v, v_side_corners as fn(u32) -> (u32, u32)),
        ] {
            let t = partners[s as usize];
            if s < t {
                for (a, b) in glued_corners(s, t, ends) {
                    uf.union(a, b);
                }
            }
        }
    }
    let mut size = vec![0u32; 4 * n as usize];
    for c in 0..4 * n {
        size[uf.find(c) as usize] += 1;
    }
    let classes = size.iter().filter(|&&k| k > 0).count();
    let poles = size.iter().filter(|&&k| k == 2).count() as u32;
    (classes, poles)
}

/// Counts of one naive shard: horizontal matchings extending `h_prefix`,
/// every vertical matching.
pub(crate) fn naive_shard(
    g: u32,
    n: u32,
    area: u32,
    filter: &Filter,
    h_prefix: &[[u32; 2]],
    budget: &Budget,
) -> Result<RawCounts> {
    let target = area as i64 + 2 - 2 * g as i64;
    let mut counts = RawCounts::new();
    if target < 1 {
        return Ok(counts);
    }
    let vs = matchings(area, &[]);
    let mut uf = UnionFind::new(0);
    for h in matchings(area, h_prefix) {
        budget.charge(vs.len() as u64)?;
        for v in &vs {
            let (classes, poles) = vertex_stats(area, &h, v, &mut uf);
            if classes as i64 != target || poles > n {
                continue;
            }
            let table = GluingTable::from_partners_unchecked(area, h.clone(), v.clone());
            if !table.is_connected() {
                continue;
            }
            for mt in mark_assignments(&table, n)? {
                if let Some(key) = classify_filtered(&mt, filter)? {
                    *counts.entry(key).or_insert(0) += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Weighted counts at area exactly `area` from the full double enumeration:
/// each labeled table with marking weighs `1 / (2^N N!)`.
pub fn enumerate_naive(g: u32, n: u32, area: u32, filter: &Filter) -> Result<CountTable> {
    check_class(g, n)?;
    let counts = naive_shard(g, n, area, filter, &[], &Budget::unlimited())?;
    let mut ct = CountTable::new(g, n, area, filter.clone());
    for (h, v, q) in weighted(&counts, &relabeling_group_order(area)) {
        if !q.is_zero() {
            ct.add(area, h, v, q);
        }
    }
    Ok(ct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn matching_counts() {
        assert_eq!(matchings(1, &[]).len(), 1);
        assert_eq!(matchings(2, &[]).len(), 3);
        assert_eq!(matchings(3, &[]).len(), 15);
        assert_eq!(matchings(3, &[[0, 3]]).len(), 3);
    }

    #[test]
    fn torus_total_is_half() {
        let ct = enumerate_naive(1, 1, 1, &Filter::any()).unwrap();
        assert_eq!(ct.total(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn one_square_has_no_genus_two() {
        assert!(enumerate_naive(2, 0, 1, &Filter::any()).unwrap().is_empty());
    }
}
