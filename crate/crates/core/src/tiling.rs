//! Square-tiled half-translation surfaces encoded as gluing tables.
//!
//! A surface of area `N` is `N` unit squares whose sides are paired off.
//! Vertical sides live in the `h` family (slot `2i` is the east side of
//! square `i`, slot `2i + 1` its west side); horizontal sides live in the `v`
//! family (slot `2i` north, `2i + 1` south). An E–W or N–S pair is a
//! translation, an E–E, W–W, N–N or S–S pair a half-turn.
//!
//! Corners are numbered `4i + q` with `q` one of [`SW`], [`SE`], [`NE`], [`NW`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsu::UnionFind;
use crate::error::{Error, Result};

pub const SW: u32 = 0;
pub const SE: u32 = 1;
pub const NE: u32 = 2;
pub const NW: u32 = 3;

#[inline]
pub fn east(square: u32) -> u32 {
    2 * square
}
#[inline]
pub fn west(square: u32) -> u32 {
    2 * square + 1
}
#[inline]
pub fn north(square: u32) -> u32 {
    2 * square
}
#[inline]
pub fn south(square: u32) -> u32 {
    2 * square + 1
}
#[inline]
pub fn corner(square: u32, q: u32) -> u32 {
    4 * square + q
}

/// Corner as seen from a square that has been turned by a half-turn.
#[inline]
pub(crate) fn turned(q: u32, flipped: bool) -> u32 {
    if flipped {
        (q + 2) & 3
    } else {
        q
    }
}

/// End corners of a vertical side, ordered (lower, upper).
#[inline]
pub(crate) fn h_side_corners(slot: u32) -> (u32, u32) {
    let sq = slot / 2;
    if slot & 1 == 0 {
        (corner(sq, SE), corner(sq, NE))
    } else {
        (corner(sq, SW), corner(sq, NW))
    }
}

/// End corners of a horizontal side, ordered (left, right).
#[inline]
pub(crate) fn v_side_corners(slot: u32) -> (u32, u32) {
    let sq = slot / 2;
    if slot & 1 == 0 {
        (corner(sq, NW), corner(sq, NE))
    } else {
        (corner(sq, SW), corner(sq, SE))
    }
}

/// The two corner identifications generated by pairing sides `a` and `b` of
/// one family.
#[inline]
pub(crate) fn glued_corners(a: u32, b: u32, ends: fn(u32) -> (u32, u32)) -> [(u32, u32); 2] {
    let (a0, a1) = ends(a);
    let (b0, b1) = ends(b);
    if (a ^ b) & 1 == 1 {
        [(a0, b0), (a1, b1)]
    } else {
        [(a0, b1), (a1, b0)]
    }
}

/// Side family of a slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    H,
    V,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::H => f.write_str("h"),
            Family::V => f.write_str("v"),
        }
    }
}

/// Table exactly as written in a JSON file; may violate the matching rules.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTable {
    pub n_squares: u32,
    pub h_pairs: Vec<[u32; 2]>,
    pub v_pairs: Vec<[u32; 2]>,
    #[serde(default)]
    pub marked: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoSquares,
    FixedSlot { family: Family, slot: u32 },
    SlotOutOfRange { family: Family, slot: u32 },
    DuplicateSlot { family: Family, slot: u32 },
    UncoveredSlot { family: Family, slot: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoSquares => f.write_str("table has no squares"),
            Violation::FixedSlot { family, slot } => {
                write!(f, "fixed slot: {family} slot {slot} is paired with itself")
            }
            Violation::SlotOutOfRange { family, slot } => {
                write!(f, "{family} slot {slot} is out of range")
            }
            Violation::DuplicateSlot { family, slot } => {
                write!(f, "{family} slot {slot} appears in more than one pair")
            }
            Violation::UncoveredSlot { family, slot } => {
                write!(f, "coverage gap: {family} slot {slot} is not paired")
            }
        }
    }
}

/// Outcome of [`validate_table`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
    /// Connected components of the square adjacency graph (pairs in range only).
    pub components: usize,
}

impl Diagnostics {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_connected(&self) -> bool {
        self.components == 1
    }
}

/// Checks a raw table for fixed slots, coverage gaps and disconnectedness.
pub fn validate_table(raw: &RawTable) -> Diagnostics {
    let n = raw.n_squares;
    let mut violations = Vec::new();
    if n == 0 {
        violations.push(Violation::NoSquares);
    }
    let mut uf = UnionFind::new(n as usize);
    for (family, pairs) in [(Family::H, &raw.h_pairs), (Family::V, &raw.v_pairs)] {
        let mut seen = vec![false; 2 * n as usize];
        for &[a, b] in pairs {
            let mut in_range = true;
            for s in [a, b] {
                if s >= 2 * n {
                    violations.push(Violation::SlotOutOfRange { family, slot: s });
                    in_range = false;
                }
            }
            if a == b {
                violations.push(Violation::FixedSlot { family, slot: a });
            }
            if !in_range {
                continue;
            }
            for s in if a == b { vec![a] } else { vec![a, b] } {
                if std::mem::replace(&mut seen[s as usize], true) {
                    violations.push(Violation::DuplicateSlot { family, slot: s });
                }
            }
            uf.union(a / 2, b / 2);
        }
        for (s, covered) in seen.iter().enumerate() {
            if !covered {
                violations.push(Violation::UncoveredSlot { family, slot: s as u32 });
            }
        }
    }
    let (_, components) = uf.labels();
    Diagnostics { violations, components }
}

/// A valid gluing table: both side families are fixed-point-free matchings.
/// The surface may still be disconnected.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GluingTable {
    n: u32,
    h: Vec<u32>,
    v: Vec<u32>,
}

impl GluingTable {
    /// Builds a table from partner arrays (`h[s]` is the slot glued to `s`).
    pub fn new(n_squares: u32, h: Vec<u32>, v: Vec<u32>) -> Result<Self> {
        if n_squares == 0 {
            return Err(Error::InvalidTable("no squares".into()));
        }
        for (family, p) in [(Family::H, &h), (Family::V, &v)] {
            if p.len() != 2 * n_squares as usize {
                return Err(Error::InvalidTable(format!(
                    "{family} partner array has length {}, expected {}",
                    p.len(),
                    2 * n_squares
                )));
            }
            for (s, &t) in p.iter().enumerate() {
                if t as usize >= p.len() || p[t as usize] as usize != s {
                    return Err(Error::InvalidTable(format!(
                        "{family} partners are not an involution at slot {s}"
                    )));
                }
                if t as usize == s {
                    return Err(Error::InvalidTable(format!("fixed slot: {family} slot {s}")));
                }
            }
        }
        Ok(Self { n: n_squares, h, v })
    }

    /// Trusts the caller that both arrays are fixed-point-free involutions.
    pub(crate) fn from_partners_unchecked(n_squares: u32, h: Vec<u32>, v: Vec<u32>) -> Self {
        debug_assert!(Self::new(n_squares, h.clone(), v.clone()).is_ok());
        Self { n: n_squares, h, v }
    }

    /// Partner arrays from pair lists.
    pub fn from_pairs(n_squares: u32, h_pairs: &[[u32; 2]], v_pairs: &[[u32; 2]]) -> Result<Self> {
        let raw = RawTable {
            n_squares,
            h_pairs: h_pairs.to_vec(),
            v_pairs: v_pairs.to_vec(),
            marked: Vec::new(),
        };
        Self::from_raw(&raw)
    }

    pub fn from_raw(raw: &RawTable) -> Result<Self> {
        let diag = validate_table(raw);
        if let Some(v) = diag.violations.first() {
            return Err(Error::InvalidTable(v.to_string()));
        }
        let n = raw.n_squares as usize;
        let mut h = vec![0; 2 * n];
        let mut v = vec![0; 2 * n];
        for &[a, b] in &raw.h_pairs {
            h[a as usize] = b;
            h[b as usize] = a;
        }
        for &[a, b] in &raw.v_pairs {
            v[a as usize] = b;
            v[b as usize] = a;
        }
        Ok(Self { n: raw.n_squares, h, v })
    }

    pub fn to_raw(&self) -> RawTable {
        RawTable {
            n_squares: self.n,
            h_pairs: self.h_pairs(),
            v_pairs: self.v_pairs(),
            marked: Vec::new(),
        }
    }

    #[inline]
    pub fn n_squares(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn h_partner(&self, slot: u32) -> u32 {
        self.h[slot as usize]
    }

    #[inline]
    pub fn v_partner(&self, slot: u32) -> u32 {
        self.v[slot as usize]
    }

    pub fn h_partners(&self) -> &[u32] {
        &self.h
    }

    pub fn v_partners(&self) -> &[u32] {
        &self.v
    }

    pub fn h_pairs(&self) -> Vec<[u32; 2]> {
        pairs_of(&self.h)
    }

    pub fn v_pairs(&self) -> Vec<[u32; 2]> {
        pairs_of(&self.v)
    }

    /// Number of connected components of the surface.
    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.n as usize);
        for (s, &t) in self.h.iter().chain(self.v.iter()).enumerate() {
            let s = (s % (2 * self.n as usize)) as u32;
            uf.union(s / 2, t / 2);
        }
        uf.labels().1
    }

    pub fn is_connected(&self) -> bool {
        self.components() == 1
    }

    /// The same surface turned by a half-turn: every square swaps E↔W and N↔S.
    pub fn frame_flip(&self) -> Self {
        Self {
            n: self.n,
            h: self.h.iter().enumerate().map(|(s, _)| self.h[s ^ 1] ^ 1).collect(),
            v: self.v.iter().enumerate().map(|(s, _)| self.v[s ^ 1] ^ 1).collect(),
        }
    }

    /// The quarter-turned surface (new E = old N, new N = old W, new W = old S,
    /// new S = old E). Its horizontal direction is the old vertical one.
    pub fn rotate90(&self) -> Self {
        Self {
            n: self.n,
            h: self.v.clone(),
            v: (0..self.h.len()).map(|s| self.h[s ^ 1] ^ 1).collect(),
        }
    }

    /// Refines every square into a 2×2 block. Sub-square `4i + q` is the
    /// quadrant of square `i` containing corner `q`.
    pub fn subdivide2(&self) -> Self {
        let n4 = 4 * self.n;
        let mut h = vec![0u32; 2 * n4 as usize];
        let mut v = vec![0u32; 2 * n4 as usize];
        let link = |p: &mut Vec<u32>, a: u32, b: u32| {
            p[a as usize] = b;
            p[b as usize] = a;
        };
        for i in 0..self.n {
            let sub = |q: u32| 4 * i + q;
            link(&mut h, east(sub(SW)), west(sub(SE)));
            link(&mut h, east(sub(NW)), west(sub(NE)));
            link(&mut v, north(sub(SW)), south(sub(NW)));
            link(&mut v, north(sub(SE)), south(sub(NE)));
        }
        // A side of the coarse table splits into two halves, one per end corner;
        // the half containing corner 4i+q belongs to sub-square 4i+q, and the
        // refined halves are glued exactly like the coarse end corners.
        for (partners, ends, fine) in [
            (&self.h, h_side_corners as fn(u32) -> (u32, u32), &mut h),
            (&self.v, v_side_corners as fn(u32) -> (u32, u32), &mut v),
        ] {
            for (a, &b) in partners.iter().enumerate() {
                let a = a as u32;
                if a > b {
                    continue;
                }
                for (ca, cb) in glued_corners(a, b, ends) {
                    // corner id doubles as sub-square id; keep the side kind
                    link(fine, 2 * ca + (a & 1), 2 * cb + (b & 1));
                }
            }
        }
        Self { n: n4, h, v }
    }

    /// Applies a relabeling: square `i` becomes `perm[i]`, turned by a
    /// half-turn when `flips[i]`.
    pub fn relabeled(&self, g: &Relabeling) -> Self {
        let n = self.n as usize;
        let mut h = vec![0u32; 2 * n];
        let mut v = vec![0u32; 2 * n];
        for s in 0..2 * n as u32 {
            h[g.slot(s) as usize] = g.slot(self.h[s as usize]);
            v[g.slot(s) as usize] = g.slot(self.v[s as usize]);
        }
        Self { n: self.n, h, v }
    }
}

fn pairs_of(p: &[u32]) -> Vec<[u32; 2]> {
    p.iter()
        .enumerate()
        .filter(|(a, &b)| (*a as u32) < b)
        .map(|(a, &b)| [a as u32, b])
        .collect()
}

/// Vertex classes of the square corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeData {
    class_of: Vec<u32>,
    classes: Vec<Vec<u32>>,
}

impl ConeData {
    /// Classes ordered by their minimal corner; each class lists its corners ascending.
    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Index of the class containing `corner`.
    #[inline]
    pub fn class_of(&self, corner: u32) -> usize {
        self.class_of[corner as usize] as usize
    }

    /// Public id of a class: its minimal corner.
    pub fn class_id(&self, idx: usize) -> u32 {
        self.classes[idx][0]
    }

    pub fn index_of_id(&self, id: u32) -> Option<usize> {
        let idx = *self.class_of.get(id as usize)? as usize;
        (self.classes[idx][0] == id).then_some(idx)
    }

    /// Cone angle of each class in units of π/2.
    pub fn angles(&self) -> Vec<u32> {
        self.classes.iter().map(|c| c.len() as u32).collect()
    }

    #[inline]
    pub fn angle(&self, idx: usize) -> u32 {
        self.classes[idx].len() as u32
    }

    /// Singularity order `k/2 - 2` of a class with angle `kπ/2`.
    #[inline]
    pub fn order(&self, idx: usize) -> i32 {
        self.classes[idx].len() as i32 / 2 - 2
    }

    pub fn total_order(&self) -> i32 {
        (0..self.len()).map(|i| self.order(i)).sum()
    }
}

/// Partitions the `4N` corners into vertex classes.
pub fn corner_orbits(table: &GluingTable) -> ConeData {
    let n = table.n_squares();
    let mut uf = UnionFind::new(4 * n as usize);
    for s in 0..2 * n {
        let t = table.h_partner(s);
        if s < t {
            for (a, b) in glued_corners(s, t, h_side_corners) {
                uf.union(a, b);
            }
        }
        let t = table.v_partner(s);
        if s < t {
            for (a, b) in glued_corners(s, t, v_side_corners) {
                uf.union(a, b);
            }
        }
    }
    let (class_of, count) = uf.labels();
    let mut classes = vec![Vec::new(); count];
    for (c, &k) in class_of.iter().enumerate() {
        classes[k as usize].push(c as u32);
    }
    ConeData { class_of, classes }
}

/// Genus of a connected table, `(2 - V + N) / 2`.
pub fn genus(table: &GluingTable) -> Result<u32> {
    let comps = table.components();
    if comps != 1 {
        return Err(Error::Disconnected(comps));
    }
    genus_from_vertex_count(table.n_squares(), corner_orbits(table).len())
}

pub(crate) fn genus_from_vertex_count(n_squares: u32, vertices: usize) -> Result<u32> {
    let twice = 2 + n_squares as i64 - vertices as i64;
    if twice < 0 || twice % 2 != 0 {
        return Err(Error::InvalidTable(format!(
            "inconsistent Euler characteristic: V = {vertices}, N = {n_squares}"
        )));
    }
    Ok((twice / 2) as u32)
}

/// A connected table together with its marked vertex classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedTiling {
    table: GluingTable,
    cone: ConeData,
    marked: Vec<usize>,
    genus: u32,
}

impl MarkedTiling {
    /// `marked_ids` are vertex-class ids (minimal corner of the class).
    pub fn new(table: GluingTable, marked_ids: &[u32]) -> Result<Self> {
        let comps = table.components();
        if comps != 1 {
            return Err(Error::Disconnected(comps));
        }
        let cone = corner_orbits(&table);
        let mut marked = Vec::with_capacity(marked_ids.len());
        for &id in marked_ids {
            let idx = cone
                .index_of_id(id)
                .ok_or_else(|| Error::InvalidMarking(format!("{id} is not a vertex-class id")))?;
            marked.push(idx);
        }
        marked.sort_unstable();
        if marked.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidMarking("vertex marked twice".into()));
        }
        Self::from_parts(table, cone, marked)
    }

    pub(crate) fn from_parts(table: GluingTable, cone: ConeData, marked: Vec<usize>) -> Result<Self> {
        let genus = genus_from_vertex_count(table.n_squares(), cone.len())?;
        for idx in 0..cone.len() {
            if cone.angle(idx) == 2 && marked.binary_search(&idx).is_err() {
                return Err(Error::InvalidMarking(format!(
                    "angle-π vertex {} must be marked",
                    cone.class_id(idx)
                )));
            }
        }
        if 2 - 2 * genus as i64 - marked.len() as i64 >= 0 {
            return Err(Error::InvalidMarking(format!(
                "surface class (g, n) = ({genus}, {}) is not hyperbolic",
                marked.len()
            )));
        }
        Ok(Self {
            table,
            cone,
            marked,
            genus,
        })
    }

    pub fn from_raw(raw: &RawTable) -> Result<Self> {
        Self::new(GluingTable::from_raw(raw)?, &raw.marked)
    }

    pub fn to_raw(&self) -> RawTable {
        RawTable {
            marked: self.marked_ids(),
            ..self.table.to_raw()
        }
    }

    pub fn table(&self) -> &GluingTable {
        &self.table
    }

    pub fn cone(&self) -> &ConeData {
        &self.cone
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn n_marked(&self) -> u32 {
        self.marked.len() as u32
    }

    pub fn n_squares(&self) -> u32 {
        self.table.n_squares()
    }

    /// Marked class indices, ascending.
    pub fn marked(&self) -> &[usize] {
        &self.marked
    }

    pub fn marked_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.marked.iter().map(|&i| self.cone.class_id(i)).collect();
        ids.sort_unstable();
        ids
    }

    pub fn is_marked(&self, idx: usize) -> bool {
        self.marked.binary_search(&idx).is_ok()
    }

    /// Per class: true for cone points (angle ≠ 2π) and marked points.
    pub fn singular_classes(&self) -> Vec<bool> {
        let mut s: Vec<bool> = (0..self.cone.len()).map(|i| self.cone.angle(i) != 4).collect();
        for &m in &self.marked {
            s[m] = true;
        }
        s
    }

    /// Rebuilds the marking on `table` through a corner correspondence.
    fn carried(&self, table: GluingTable, corner_map: impl Fn(u32) -> u32) -> Self {
        let cone = corner_orbits(&table);
        let mut marked: Vec<usize> = self
            .marked
            .iter()
            .map(|&i| cone.class_of(corner_map(self.cone.class_id(i))))
            .collect();
        marked.sort_unstable();
        Self {
            table,
            cone,
            marked,
            genus: self.genus,
        }
    }

    pub fn relabeled(&self, g: &Relabeling) -> Self {
        self.carried(self.table.relabeled(g), |c| g.corner(c))
    }

    pub fn frame_flip(&self) -> Self {
        self.relabeled(&Relabeling::frame_flip(self.n_squares()))
    }

    pub fn rotate90(&self) -> Self {
        self.carried(self.table.rotate90(), |c| (c & !3) | ((c + 3) & 3))
    }

    pub fn subdivide2(&self) -> Self {
        self.carried(self.table.subdivide2(), |c| 4 * c + (c & 3))
    }

    /// Canonical byte key: equal iff the two marked tilings differ by a
    /// relabeling with per-square half-turns.
    pub fn canonical_form(&self) -> Vec<u8> {
        canonical_form(self)
    }

    pub fn automorphisms(&self) -> AutGroup {
        automorphisms(self)
    }
}

/// All markings of `n` vertex classes that include every angle-π class.
pub fn mark_assignments(table: &GluingTable, n: u32) -> Result<Vec<MarkedTiling>> {
    let comps = table.components();
    if comps != 1 {
        return Err(Error::Disconnected(comps));
    }
    let cone = corner_orbits(table);
    let genus = genus_from_vertex_count(table.n_squares(), cone.len())?;
    if 2 - 2 * genus as i64 - n as i64 >= 0 {
        return Ok(Vec::new());
    }
    let poles: Vec<usize> = (0..cone.len()).filter(|&i| cone.angle(i) == 2).collect();
    let others: Vec<usize> = (0..cone.len()).filter(|&i| cone.angle(i) != 2).collect();
    let Some(extra) = (n as usize).checked_sub(poles.len()) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for pick in combinations(others.len(), extra) {
        let mut marked: Vec<usize> = poles.iter().copied().chain(pick.iter().map(|&j| others[j])).collect();
        marked.sort_unstable();
        out.push(MarkedTiling {
            table: table.clone(),
            cone: cone.clone(),
            marked,
            genus,
        });
    }
    Ok(out)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// An element of the hyperoctahedral group acting on tables: square `i`
/// goes to `perm[i]`, turned by a half-turn when `flips[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relabeling {
    pub perm: Vec<u32>,
    pub flips: Vec<bool>,
}

impl Relabeling {
    pub fn identity(n: u32) -> Self {
        Self {
            perm: (0..n).collect(),
            flips: vec![false; n as usize],
        }
    }

    pub fn frame_flip(n: u32) -> Self {
        Self {
            perm: (0..n).collect(),
            flips: vec![true; n as usize],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| p == i as u32) && self.flips.iter().all(|f| !f)
    }

    #[inline]
    pub fn slot(&self, s: u32) -> u32 {
        let sq = (s / 2) as usize;
        2 * self.perm[sq] + ((s & 1) ^ self.flips[sq] as u32)
    }

    #[inline]
    pub fn corner(&self, c: u32) -> u32 {
        let sq = (c / 4) as usize;
        4 * self.perm[sq] + turned(c & 3, self.flips[sq])
    }

    /// `self` after `first`.
    pub fn after(&self, first: &Relabeling) -> Relabeling {
        let perm = first.perm.iter().map(|&p| self.perm[p as usize]).collect();
        let flips = first
            .perm
            .iter()
            .zip(&first.flips)
            .map(|(&p, &f)| f ^ self.flips[p as usize])
            .collect();
        Relabeling { perm, flips }
    }

    pub fn inverse(&self) -> Relabeling {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut flips = vec![false; n];
        for i in 0..n {
            perm[self.perm[i] as usize] = i as u32;
            flips[self.perm[i] as usize] = self.flips[i];
        }
        Relabeling { perm, flips }
    }
}

/// Automorphism group of a marked tiling inside the relabeling group.
#[derive(Clone, Debug)]
pub struct AutGroup {
    pub elements: Vec<Relabeling>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &Relabeling) -> bool {
        self.elements.contains(g)
    }

    /// Whether some element turns squares by a half-turn.
    pub fn has_half_turn(&self) -> bool {
        self.elements.iter().any(|g| g.flips.iter().any(|&f| f))
    }
}

/// Relabeling produced by a breadth-first walk from `(start, flipped)`, which
/// makes every tree gluing a translation. Requires a connected table.
fn bfs_relabeling(table: &GluingTable, start: u32, flipped: bool) -> Relabeling {
    let n = table.n_squares() as usize;
    let mut perm = vec![u32::MAX; n];
    let mut flips = vec![false; n];
    let mut order = Vec::with_capacity(n);
    perm[start as usize] = 0;
    flips[start as usize] = flipped;
    order.push(start);
    let mut head = 0;
    while head < order.len() {
        let o = order[head];
        let f = flips[o as usize] as u32;
        head += 1;
        for (partners, side) in [
            (table.h_partners(), 0u32),
            (table.h_partners(), 1),
            (table.v_partners(), 0),
            (table.v_partners(), 1),
        ] {
            let p = partners[(2 * o + (side ^ f)) as usize];
            let nb = p / 2;
            if perm[nb as usize] == u32::MAX {
                perm[nb as usize] = order.len() as u32;
                // the neighbour's matching side must read as the opposite one
                flips[nb as usize] = (p & 1) ^ 1 ^ side == 1;
                order.push(nb);
            }
        }
    }
    Relabeling { perm, flips }
}

fn encode(mt: &MarkedTiling, g: &Relabeling) -> Vec<u32> {
    let t = mt.table.relabeled(g);
    let mut marks: Vec<u32> = mt
        .marked
        .iter()
        .map(|&i| mt.cone.classes()[i].iter().map(|&c| g.corner(c)).min().unwrap())
        .collect();
    marks.sort_unstable();
    let mut out = Vec::with_capacity(1 + 4 * t.n as usize + marks.len());
    out.push(t.n);
    out.extend_from_slice(&t.h);
    out.extend_from_slice(&t.v);
    out.extend(marks);
    out
}

fn normal_forms(mt: &MarkedTiling) -> Vec<(Vec<u32>, Relabeling)> {
    let n = mt.n_squares();
    let mut out = Vec::with_capacity(2 * n as usize);
    for start in 0..n {
        for flipped in [false, true] {
            let g = bfs_relabeling(&mt.table, start, flipped);
            out.push((encode(mt, &g), g));
        }
    }
    out
}

/// Minimal normal form over all starting squares and frames, as bytes.
pub fn canonical_form(mt: &MarkedTiling) -> Vec<u8> {
    let best = normal_forms(mt).into_iter().map(|(e, _)| e).min().unwrap();
    best.iter().flat_map(|x| x.to_be_bytes()).collect()
}

/// Stabilizer of the marked tiling. Automorphisms act freely on
/// (square, frame) pairs, so it is found by comparing the normal forms
/// reached from every starting square and frame.
pub fn automorphisms(mt: &MarkedTiling) -> AutGroup {
    let forms = normal_forms(mt);
    let (base, base_g) = &forms[0];
    let elements = forms
        .iter()
        .filter(|(e, _)| e == base)
        .map(|(_, g)| g.inverse().after(base_g))
        .collect();
    AutGroup { elements }
}
