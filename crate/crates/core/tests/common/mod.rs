#![allow(dead_code)]

use flatcensus::tiling::{corner_orbits, east, mark_assignments, north, south, west, Relabeling};
use flatcensus::{GluingTable, MarkedTiling};
use proptest::prelude::*;

pub fn t1() -> MarkedTiling {
    let t = GluingTable::from_pairs(1, &[[east(0), west(0)]], &[[north(0), south(0)]]).unwrap();
    MarkedTiling::new(t, &[0]).unwrap()
}

pub fn p2() -> MarkedTiling {
    let t = GluingTable::from_pairs(
        2,
        &[[east(0), west(1)], [east(1), west(0)]],
        &[[north(0), north(1)], [south(0), south(1)]],
    )
    .unwrap();
    let ids: Vec<u32> = corner_orbits(&t).classes().iter().map(|c| c[0]).collect();
    MarkedTiling::new(t, &ids).unwrap()
}

pub fn g4() -> MarkedTiling {
    let h: Vec<[u32; 2]> = (0..4).map(|i| [east(i), west((i + 1) % 4)]).collect();
    let t = GluingTable::from_pairs(
        4,
        &h,
        &[
            [north(0), south(1)],
            [north(1), south(0)],
            [north(2), south(3)],
            [north(3), south(2)],
        ],
    )
    .unwrap();
    MarkedTiling::new(t, &[]).unwrap()
}

pub fn v2() -> MarkedTiling {
    let t = GluingTable::from_pairs(
        2,
        &[[east(0), west(0)], [east(1), west(1)]],
        &[[north(0), south(1)], [north(1), south(0)]],
    )
    .unwrap();
    MarkedTiling::new(t, &[0]).unwrap()
}

/// Every perfect matching of `0..2n`, as partner arrays.
pub fn all_matchings(n: u32) -> Vec<Vec<u32>> {
    fn go(free: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = free[0];
        for k in 1..free.len() {
            let b = free[k];
            cur[a as usize] = b;
            cur[b as usize] = a;
            let rest: Vec<u32> = free.iter().copied().filter(|&x| x != a && x != b).collect();
            go(&rest, cur, out);
        }
    }
    let free: Vec<u32> = (0..2 * n).collect();
    let mut out = Vec::new();
    go(&free, &mut vec![0; 2 * n as usize], &mut out);
    out
}

pub fn connected_tables(n: u32) -> Vec<GluingTable> {
    let ms = all_matchings(n);
    let mut out = Vec::new();
    for h in &ms {
        for v in &ms {
            let t = GluingTable::new(n, h.clone(), v.clone()).unwrap();
            if t.is_connected() {
                out.push(t);
            }
        }
    }
    out
}

/// All `2^n n!` relabelings.
pub fn all_relabelings(n: u32) -> Vec<Relabeling> {
    fn perms(n: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    let mut out = Vec::new();
    for perm in perms(n) {
        for mask in 0..1u32 << n {
            out.push(Relabeling {
                perm: perm.clone(),
                flips: (0..n).map(|i| mask >> i & 1 == 1).collect(),
            });
        }
    }
    out
}

fn matching_from(order: &[u32]) -> Vec<u32> {
    let mut p = vec![0; order.len()];
    for w in order.chunks(2) {
        p[w[0] as usize] = w[1];
        p[w[1] as usize] = w[0];
    }
    p
}

/// Random connected table with a random valid marking of at most three points.
pub fn arb_marked(max_squares: u32) -> impl Strategy<Value = Option<MarkedTiling>> {
    (1..=max_squares)
        .prop_flat_map(|n| {
            let slots: Vec<u32> = (0..2 * n).collect();
            (
                Just(n),
                Just(slots.clone()).prop_shuffle(),
                Just(slots).prop_shuffle(),
                0u32..4,
                any::<prop::sample::Index>(),
            )
        })
        .prop_map(|(n, h, v, marks, pick)| {
            let t = GluingTable::new(n, matching_from(&h), matching_from(&v)).ok()?;
            if !t.is_connected() {
                return None;
            }
            let options = mark_assignments(&t, marks).ok()?;
            (!options.is_empty()).then(|| options[pick.index(options.len())].clone())
        })
}

pub type Key = (Vec<u32>, Vec<u32>, Vec<u32>);

pub fn key(mt: &MarkedTiling) -> Key {
    (
        mt.table().h_partners().to_vec(),
        mt.table().v_partners().to_vec(),
        mt.marked_ids(),
    )
}

/// Orbit-stabilizer oracle: one representative per relabeling orbit, weighted
/// by one over the number of relabelings fixing it, both found by brute force.
pub fn orbit_census(g: u32, n: u32, area: u32) -> Vec<(MarkedTiling, usize)> {
    let group = all_relabelings(area);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for t in connected_tables(area) {
        if flatcensus::tiling::genus(&t).unwrap() != g {
            continue;
        }
        for mt in mark_assignments(&t, n).unwrap() {
            let images: Vec<Key> = group.iter().map(|r| key(&mt.relabeled(r))).collect();
            let min = images.iter().min().unwrap().clone();
            if seen.insert(min) {
                let k = key(&mt);
                let stab = images.iter().filter(|x| **x == k).count();
                out.push((mt, stab));
            }
        }
    }
    out
}
