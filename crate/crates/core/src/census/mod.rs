//! Automorphism-weighted counts of square-tiled surfaces, bucketed by area and
//! by the types of their horizontal and vertical multicurves.

mod naive;
mod pruned;
mod run;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::curve_type::{multicurve_type, TopType};
use crate::error::{Error, Result};
use crate::foliation::{cylinders, Direction};
use crate::tiling::MarkedTiling;

pub use naive::enumerate_naive;
pub use pruned::{enumerate_pruned, partitions, stabilizer_order};
pub use run::{plan, run_census, Budget, CensusRun, Manifest, Mode, RunConfig, ShardRecord, ShardSpec};

/// Restriction on the horizontal cylinder structure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CylinderFilter {
    #[default]
    Any,
    OneCylinder,
    OneCylinderHeight1,
}

impl fmt::Display for CylinderFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CylinderFilter::Any => "any",
            CylinderFilter::OneCylinder => "one-cylinder",
            CylinderFilter::OneCylinderHeight1 => "one-cylinder-height-1",
        })
    }
}

impl FromStr for CylinderFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "any" | "none" => Ok(CylinderFilter::Any),
            "one-cylinder" => Ok(CylinderFilter::OneCylinder),
            "one-cylinder-height-1" => Ok(CylinderFilter::OneCylinderHeight1),
            _ => Err(Error::Parse(format!("unknown filter {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Filter {
    pub horizontal: CylinderFilter,
    pub h_type: Option<TopType>,
}

impl Filter {
    pub fn any() -> Self {
        Self::default()
    }

    pub fn cylinders(horizontal: CylinderFilter) -> Self {
        Self {
            horizontal,
            h_type: None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.h_type {
            None => self.horizontal.to_string(),
            Some(t) => format!("{}; h_type={t}", self.horizontal),
        }
    }
}

/// Exact weighted counts keyed by `(area, h_type, v_type)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub g: u32,
    pub n: u32,
    /// Areas `1..=max_area` are fully enumerated.
    pub max_area: u32,
    pub filter: Filter,
    buckets: BTreeMap<(u32, TopType, TopType), BigRational>,
}

impl CountTable {
    pub fn new(g: u32, n: u32, max_area: u32, filter: Filter) -> Self {
        Self {
            g,
            n,
            max_area,
            filter,
            buckets: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, area: u32, h: TopType, v: TopType, q: BigRational) {
        if q.is_zero() {
            return;
        }
        *self.buckets.entry((area, h, v)).or_insert_with(BigRational::zero) += q;
    }

    /// Adds every bucket of `other`; the coverage becomes the larger of the two.
    pub fn merge(&mut self, other: &CountTable) {
        for ((a, h, v), q) in &other.buckets {
            self.add(*a, h.clone(), v.clone(), q.clone());
        }
        self.max_area = self.max_area.max(other.max_area);
    }

    pub fn get(&self, area: u32, h: &TopType, v: &TopType) -> BigRational {
        self.buckets
            .get(&(area, h.clone(), v.clone()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn buckets(&self) -> impl Iterator<Item = (u32, &TopType, &TopType, &BigRational)> {
        self.buckets.iter().map(|((a, h, v), q)| (*a, h, v, q))
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn total(&self) -> BigRational {
        self.buckets.values().fold(BigRational::zero(), |a, b| a + b)
    }

    fn check_coverage(&self, l: u32) -> Result<()> {
        if l > self.max_area {
            return Err(Error::CensusIncomplete {
                requested: l,
                available: self.max_area,
            });
        }
        Ok(())
    }

    /// Weighted count with area `≤ l`, horizontal type `h` and vertical type
    /// `v` (any vertical type when `None`).
    pub fn s_value(&self, h: &TopType, v: Option<&TopType>, l: u32) -> Result<BigRational> {
        self.check_coverage(l)?;
        Ok(self
            .buckets
            .iter()
            .filter(|((a, bh, bv), _)| *a <= l && bh == h && v.is_none_or(|v| bv == v))
            .fold(BigRational::zero(), |acc, (_, q)| acc + q))
    }

    /// Weighted count of everything with area `≤ l`.
    pub fn total_up_to(&self, l: u32) -> Result<BigRational> {
        self.check_coverage(l)?;
        Ok(self
            .buckets
            .iter()
            .filter(|((a, _, _), _)| *a <= l)
            .fold(BigRational::zero(), |acc, (_, q)| acc + q))
    }

    /// Horizontal types present, sorted.
    pub fn h_types(&self) -> Vec<TopType> {
        let mut t: Vec<TopType> = self.buckets.keys().map(|(_, h, _)| h.clone()).collect();
        t.sort();
        t.dedup();
        t
    }

    /// The table with horizontal and vertical roles exchanged.
    pub fn swapped(&self) -> CountTable {
        let mut out = CountTable::new(self.g, self.n, self.max_area, self.filter.clone());
        for ((a, h, v), q) in &self.buckets {
            out.add(*a, v.clone(), h.clone(), q.clone());
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("area,h_type,v_type,count_num,count_den\n");
        for ((a, h, v), q) in &self.buckets {
            s.push_str(&format!("{a},{h},{v},{},{}\n", q.numer(), q.denom()));
        }
        s
    }

    /// Parses rows written by [`CountTable::to_csv`].
    pub fn from_csv(text: &str, g: u32, n: u32, max_area: u32, filter: Filter) -> Result<Self> {
        let mut out = CountTable::new(g, n, max_area, filter);
        for (i, line) in text.lines().enumerate() {
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(Error::Parse(format!("line {}: expected 5 fields", i + 1)));
            }
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what}", i + 1));
            let area: u32 = f[0].parse().map_err(|_| bad("area"))?;
            let num: BigInt = f[3].parse().map_err(|_| bad("numerator"))?;
            let den: BigInt = f[4].parse().map_err(|_| bad("denominator"))?;
            if den.is_zero() {
                return Err(bad("denominator"));
            }
            out.add(area, f[1].parse()?, f[2].parse()?, BigRational::new(num, den));
        }
        Ok(out)
    }
}

/// Total weighted count up to `l` divided by `l^(12g - 12 + 4n)`.
pub fn mgn_estimate(ct: &CountTable, l: u32) -> Result<BigRational> {
    if l == 0 {
        return Err(Error::Domain("L must be positive".into()));
    }
    let exp = 12 * ct.g as i64 - 12 + 4 * ct.n as i64;
    let total = ct.total_up_to(l)?;
    let scale = BigRational::from_integer(BigInt::from(l)).pow(exp.unsigned_abs() as u32);
    Ok(if exp >= 0 { total / scale } else { total * scale })
}

/// `s(γ₁, γ₂, L)` (or `s(γ, *, L)` when `v` is `None`).
pub fn s_value(ct: &CountTable, h: &TopType, v: Option<&TopType>, l: u32) -> Result<BigRational> {
    ct.s_value(h, v, l)
}

pub fn check_class(g: u32, n: u32) -> Result<()> {
    if 2 - 2 * g as i64 - n as i64 >= 0 {
        return Err(Error::Domain(format!("(g, n) = ({g}, {n}) is not hyperbolic")));
    }
    Ok(())
}

/// Whether the horizontal cylinders pass `f`.
pub(crate) fn passes_cylinder_filter(mt: &MarkedTiling, f: CylinderFilter) -> Result<bool> {
    if f == CylinderFilter::Any {
        return Ok(true);
    }
    let cyl = cylinders(mt, Direction::Horizontal)?;
    Ok(cyl.len() == 1 && (f == CylinderFilter::OneCylinder || cyl[0].height == 1))
}

/// Types of both directions if the surface passes the filter.
pub(crate) fn classify_filtered(mt: &MarkedTiling, filter: &Filter) -> Result<Option<(TopType, TopType)>> {
    if !passes_cylinder_filter(mt, filter.horizontal)? {
        return Ok(None);
    }
    let h = multicurve_type(mt, Direction::Horizontal)?;
    if filter.h_type.as_ref().is_some_and(|t| *t != h) {
        return Ok(None);
    }
    let v = multicurve_type(mt, Direction::Vertical)?;
    Ok(Some((h, v)))
}

/// Raw per-bucket integer counts before dividing by the group order.
pub(crate) type RawCounts = BTreeMap<(TopType, TopType), u64>;

pub(crate) fn weighted(counts: &RawCounts, den: &BigInt) -> Vec<(TopType, TopType, BigRational)> {
    counts
        .iter()
        .map(|((h, v), &c)| (h.clone(), v.clone(), BigRational::new(BigInt::from(c), den.clone())))
        .collect()
}

/// `2^N · N!`, the order of the relabeling group on `N` squares.
pub fn relabeling_group_order(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(2 * k))
}
