//! Horizontal and vertical cylinder decompositions.
//!
//! A row is the orbit of the straight-line flow through the mid-lines of the
//! squares. Its states are `(square, flipped)`: `flipped` means the square is
//! crossed against its own frame (westward for horizontal rows). Vertical data
//! is computed as the horizontal data of the quarter-turned surface, so a
//! vertical state's sign refers to that turned frame.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tiling::{turned, MarkedTiling, NE, NW, SE, SW};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
}

/// One flow state: square id and traversal sign.
pub type Visit = (u32, bool);

/// A closed row of squares in flow order.
pub type Row = Vec<Visit>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cylinder {
    pub direction: Direction,
    pub circumference: u32,
    pub height: u32,
    /// Rows from bottom to top, all traversed in the same sense.
    pub rows: Vec<Row>,
    /// Core circle on the 2×2 refinement: refined squares whose upper sides
    /// run along the mid-height of the cylinder.
    pub core: Row,
    #[serde(skip)]
    pub(crate) bottom_corners: Vec<u32>,
    #[serde(skip)]
    pub(crate) top_corners: Vec<u32>,
}

impl Cylinder {
    pub fn area(&self) -> u32 {
        self.circumference * self.height
    }
}

/// One weighted core curve.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CurveComponent {
    pub core: Row,
    pub weight: u32,
}

/// Weighted core multicurve of one direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveSystem {
    pub direction: Direction,
    pub components: Vec<CurveComponent>,
}

impl CurveSystem {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// The marked tiling whose horizontal direction is `dir`.
pub(crate) fn in_frame(mt: &MarkedTiling, dir: Direction) -> std::borrow::Cow<'_, MarkedTiling> {
    match dir {
        Direction::Horizontal => std::borrow::Cow::Borrowed(mt),
        Direction::Vertical => std::borrow::Cow::Owned(mt.rotate90()),
    }
}

/// Next horizontal state after leaving `(sq, flipped)` across its forward side.
#[inline]
pub(crate) fn step(h_partner: &[u32], (sq, flipped): Visit) -> Visit {
    let t = h_partner[(2 * sq + flipped as u32) as usize];
    (t / 2, t & 1 == 0)
}

fn horizontal_rows(mt: &MarkedTiling) -> Vec<Row> {
    let h = mt.table().h_partners();
    let n = mt.n_squares();
    let mut seen = vec![false; n as usize];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s as usize] {
            continue;
        }
        let mut row = Vec::new();
        let mut x = (s, false);
        loop {
            seen[x.0 as usize] = true;
            row.push(x);
            x = step(h, x);
            if x == (s, false) {
                break;
            }
        }
        out.push(row);
    }
    out
}

/// Rows of the flow in the given direction.
pub fn rows(mt: &MarkedTiling, dir: Direction) -> Vec<Row> {
    horizontal_rows(&in_frame(mt, dir))
}

#[inline]
fn top_slot((sq, f): Visit) -> u32 {
    2 * sq + f as u32
}

#[inline]
fn bottom_slot((sq, f): Visit) -> u32 {
    2 * sq + !f as u32
}

/// Corners along the top of a row, left to right (one per square, plus the closing one implied).
fn top_corners(row: &[Visit]) -> Vec<u32> {
    row.iter().map(|&(s, f)| 4 * s + turned(NW, f)).collect()
}

fn bottom_corners(row: &[Visit]) -> Vec<u32> {
    row.iter().map(|&(s, f)| 4 * s + turned(SW, f)).collect()
}

/// The same row traversed in the opposite sense.
fn reversed(row: &[Visit]) -> Row {
    row.iter().rev().map(|&(s, f)| (s, !f)).collect()
}

/// Row glued above (or below) `row`, oriented consistently with it.
fn neighbour(
    mt: &MarkedTiling,
    rows: &[Row],
    row_of: &[(usize, usize)],
    row: &[Visit],
    up: bool,
) -> Result<(usize, Row)> {
    let v = mt.table().v_partners();
    let side = |x: Visit| if up { top_slot(x) } else { bottom_slot(x) };
    let t0 = v[side(row[0]) as usize];
    let (r, _) = row_of[(t0 / 2) as usize];
    let other = &rows[r];
    if other.len() != row.len() {
        return Err(Error::NotAnAnnulus(format!(
            "rows of lengths {} and {} meet along a regular circle",
            row.len(),
            other.len()
        )));
    }
    // the neighbour must present its opposite side to us
    let (_, pos) = row_of[(t0 / 2) as usize];
    let facing = |x: Visit| if up { bottom_slot(x) } else { top_slot(x) };
    let oriented = if facing(other[pos]) == t0 {
        other.clone()
    } else {
        reversed(other)
    };
    // first-return consistency: the gluing must match the rows square by square
    let start = oriented.iter().position(|&x| facing(x) == t0).unwrap();
    let c = row.len();
    for k in 0..c {
        let t = v[side(row[k]) as usize];
        if facing(oriented[(start + k) % c]) != t {
            return Err(Error::NotAnAnnulus("rows are not glued along a whole circle".into()));
        }
    }
    Ok((r, oriented))
}

/// Horizontal cylinders of a marked tiling.
pub(crate) fn horizontal_cylinders(mt: &MarkedTiling, dir: Direction) -> Result<Vec<Cylinder>> {
    let rows = horizontal_rows(mt);
    let mut row_of = vec![(0usize, 0usize); mt.n_squares() as usize];
    for (r, row) in rows.iter().enumerate() {
        for (p, &(s, _)) in row.iter().enumerate() {
            row_of[s as usize] = (r, p);
        }
    }
    let singular = mt.singular_classes();
    let cone = mt.cone();
    let circle_singular = |corners: &[u32]| corners.iter().any(|&c| singular[cone.class_of(c)]);

    let mut visited = vec![false; rows.len()];
    let mut out = Vec::new();
    for r0 in 0..rows.len() {
        if visited[r0] {
            continue;
        }
        // walk down to a row whose bottom circle is singular
        let mut cur = rows[r0].clone();
        let mut steps = 0;
        while !circle_singular(&bottom_corners(&cur)) {
            let (_, below) = neighbour(mt, &rows, &row_of, &cur, false)?;
            cur = below;
            steps += 1;
            if steps > rows.len() {
                return Err(Error::NotAnAnnulus("closed family of regular rows".into()));
            }
        }
        let mut stack = Vec::new();
        loop {
            let (r, _) = row_of[cur[0].0 as usize];
            if visited[r] {
                return Err(Error::NotAnAnnulus("row belongs to two cylinders".into()));
            }
            visited[r] = true;
            let done = circle_singular(&top_corners(&cur));
            stack.push(cur);
            if done {
                break;
            }
            let (_, above) = neighbour(mt, &rows, &row_of, stack.last().unwrap(), true)?;
            cur = above;
        }
        let height = stack.len() as u32;
        let core = core_of(&stack);
        out.push(Cylinder {
            direction: dir,
            circumference: stack[0].len() as u32,
            height,
            bottom_corners: bottom_corners(&stack[0]),
            top_corners: top_corners(stack.last().unwrap()),
            rows: stack,
            core,
        });
    }
    Ok(out)
}

/// Refined squares just below the mid-height circle of a cylinder.
fn core_of(stack: &[Row]) -> Row {
    let h = stack.len();
    let (row, upper) = if h % 2 == 1 {
        (&stack[(h - 1) / 2], false)
    } else {
        (&stack[h / 2 - 1], true)
    };
    let mut out = Vec::with_capacity(2 * row.len());
    for &(s, f) in row {
        let qs = match (f, upper) {
            (false, false) => [SW, SE],
            (false, true) => [NW, NE],
            (true, false) => [NE, NW],
            (true, true) => [SE, SW],
        };
        out.extend(qs.iter().map(|&q| (4 * s + q, f)));
    }
    out
}

/// Cylinders in the given direction. Rows are merged across grid circles
/// carrying no cone point and no marked point.
pub fn cylinders(mt: &MarkedTiling, dir: Direction) -> Result<Vec<Cylinder>> {
    horizontal_cylinders(&in_frame(mt, dir), dir)
}

/// Weighted core multicurve: one component per cylinder, weight = height.
pub fn core_multicurve(mt: &MarkedTiling, dir: Direction) -> Result<CurveSystem> {
    Ok(CurveSystem {
        direction: dir,
        components: cylinders(mt, dir)?
            .into_iter()
            .map(|c| CurveComponent {
                core: c.core,
                weight: c.height,
            })
            .collect(),
    })
}

/// Checks that `cs` could be a core multicurve of `refined`: every core is a closed flow orbit of the
/// refined surface whose upper circle avoids cone and marked points.
pub(crate) fn check_cores(refined: &MarkedTiling, cs: &CurveSystem) -> Result<()> {
    let n = refined.n_squares();
    let h = refined.table().h_partners();
    let singular = refined.singular_classes();
    let mut used = vec![false; n as usize];
    for (k, comp) in cs.components.iter().enumerate() {
        let bad = |why: &str| Error::InvalidCurveSystem(format!("curve {k}: {why}"));
        if comp.weight == 0 {
            return Err(bad("zero weight"));
        }
        if comp.core.is_empty() {
            return Err(bad("empty core"));
        }
        for (j, &x) in comp.core.iter().enumerate() {
            if x.0 >= n {
                return Err(bad("square out of range"));
            }
            if std::mem::replace(&mut used[x.0 as usize], true) {
                return Err(bad("cores overlap"));
            }
            if step(h, x) != comp.core[(j + 1) % comp.core.len()] {
                return Err(bad("core is not a closed row"));
            }
        }
        if top_corners(&comp.core)
            .iter()
            .any(|&c| singular[refined.cone().class_of(c)])
        {
            return Err(bad("core passes through a cone or marked point"));
        }
    }
    Ok(())
}
