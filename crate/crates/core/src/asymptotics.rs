//! Closed-form asymptotic constants and comparison against census data.

use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::census::{check_class, mgn_estimate, CountTable};
use crate::curve_type::{top_type, DualGraph, Edge, Piece, TopType};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    Empirical,
    SymbolicInB,
}

/// `rational · π^pi_power · b^b_power`, with `b = b_{g,n}` kept symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymConstant {
    #[serde(with = "rational_string")]
    pub rational: BigRational,
    pub pi_power: i32,
    #[serde(default, skip_serializing_if = "is_zero_i32")]
    pub b_power: i32,
    pub provenance: Provenance,
}

fn is_zero_i32(x: &i32) -> bool {
    *x == 0
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl AsymConstant {
    pub fn exact(q: BigRational) -> Self {
        Self {
            rational: q,
            pi_power: 0,
            b_power: 0,
            provenance: Provenance::Exact,
        }
    }

    pub fn empirical(q: BigRational) -> Self {
        Self {
            provenance: Provenance::Empirical,
            ..Self::exact(q)
        }
    }

    fn with_b(q: BigRational, pi_power: i32, b_power: i32) -> Self {
        Self {
            rational: q,
            pi_power,
            b_power,
            provenance: if b_power == 0 {
                Provenance::Exact
            } else {
                Provenance::SymbolicInB
            },
        }
    }

    /// Quotient of two constants; `b` powers cancel where they can.
    pub fn ratio(&self, other: &AsymConstant) -> Result<AsymConstant> {
        if other.rational.is_zero() {
            return Err(Error::Domain("division by a zero constant".into()));
        }
        let q = &self.rational / &other.rational;
        let mut out = Self::with_b(q, self.pi_power - other.pi_power, self.b_power - other.b_power);
        if self.provenance == Provenance::Empirical || other.provenance == Provenance::Empirical {
            out.provenance = Provenance::Empirical;
        }
        Ok(out)
    }

    /// Numeric value when free of `b`.
    pub fn to_f64(&self) -> Option<f64> {
        if self.b_power != 0 {
            return None;
        }
        Some(self.rational.to_f64()? * std::f64::consts::PI.powi(self.pi_power))
    }
}

impl fmt::Display for AsymConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rational)?;
        if self.pi_power != 0 {
            write!(f, " pi^{}", self.pi_power)?;
        }
        if self.b_power != 0 {
            write!(f, " b^{}", self.b_power)?;
        }
        Ok(())
    }
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn factorial(n: u64) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

fn pow2(e: i64) -> BigRational {
    let two = BigRational::from_integer(2.into());
    if e >= 0 {
        two.pow(e as u32)
    } else {
        BigRational::one() / two.pow((-e) as u32)
    }
}

/// Classes with a positive-dimensional space of measured laminations.
fn check_asym(g: u32, n: u32) -> Result<()> {
    check_class(g, n)?;
    if (g, n) == (0, 3) {
        return Err(Error::Domain("(g, n) = (0, 3) carries no simple closed curves".into()));
    }
    Ok(())
}

/// `2g - 3 + n`.
fn excess(g: u32, n: u32) -> i64 {
    2 * g as i64 - 3 + n as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Separating,
    Nonseparating,
}

/// Frequency of simple closed curves of the given kind on a closed genus-2 surface.
pub fn freq_genus2(kind: CurveKind) -> AsymConstant {
    AsymConstant::exact(match kind {
        CurveKind::Separating => q(1, 27648),
        CurveKind::Nonseparating => q(1, 576),
    })
}

fn split_domain(total: u32, i: u32, min_side: u32, what: &str) -> Result<()> {
    if i < min_side || i > total.saturating_sub(min_side) || 2 * i == total {
        return Err(Error::Domain(format!(
            "{what} split ({i}, {}) is outside the closed-form range",
            total as i64 - i as i64
        )));
    }
    Ok(())
}

/// Frequency of a curve cutting `S_{0,n}` into discs with `i` and `n - i` punctures.
pub fn freq_genus0(n: u32, i: u32) -> Result<AsymConstant> {
    split_domain(n, i, 2, "puncture")?;
    let den = BigInt::from(2).pow(n - 4)
        * factorial((i - 2) as u64)
        * factorial((n - i - 2) as u64)
        * BigInt::from(2 * n - 6);
    Ok(AsymConstant::exact(BigRational::new(BigInt::one(), den)))
}

/// `c(γ_i) / c(γ_j)` on `S_{0,n}` as a ratio of binomials.
pub fn freq_genus0_ratio(n: u32, i: u32, j: u32) -> Result<BigRational> {
    split_domain(n, i, 2, "puncture")?;
    split_domain(n, j, 2, "puncture")?;
    let b = |k: u32| BigInt::from(binomial(n as u64 - 4, k as u64 - 2));
    Ok(BigRational::new(b(i), b(j)))
}

/// Frequency of a curve cutting `S_{g,0}` into pieces of genus `i` and `g - i`.
pub fn freq_genusg_split(g: u32, i: u32) -> Result<AsymConstant> {
    split_domain(g, i, 2, "genus")?;
    let (i, g) = (i as u64, g as u64);
    let den = BigInt::from(2).pow(3 * g as u32 - 2)
        * BigInt::from(24).pow(g as u32)
        * factorial(i)
        * factorial(g - i)
        * factorial(3 * i - 2)
        * factorial(3 * (g - i) - 2)
        * BigInt::from(6 * g - 6);
    Ok(AsymConstant::exact(BigRational::new(BigInt::one(), den)))
}

/// `c(γ_i) / c(γ_j)` on `S_{g,0}` as a ratio of binomials.
pub fn freq_genusg_ratio(g: u32, i: u32, j: u32) -> Result<BigRational> {
    split_domain(g, i, 2, "genus")?;
    split_domain(g, j, 2, "genus")?;
    let g = g as u64;
    let b = |k: u64| BigInt::from(binomial(g, k)) * BigInt::from(binomial(3 * g - 4, 3 * k - 2));
    Ok(BigRational::new(b(i as u64), b(j as u64)))
}

fn require_exact(c: &AsymConstant) -> Result<()> {
    if c.provenance != Provenance::Exact {
        return Err(Error::Domain(format!("constant {c} is not exact")));
    }
    Ok(())
}

/// Limit of `s(γ, *, L) / L^{6g-6+2n}`: `c(γ) / 2^{2g-3+n}`.
pub fn thm12_constant(c: &AsymConstant, g: u32, n: u32) -> Result<AsymConstant> {
    check_asym(g, n)?;
    require_exact(c)?;
    Ok(AsymConstant::with_b(&c.rational * pow2(-excess(g, n)), c.pi_power, 0))
}

/// Limit of `s(γ₁, γ₂, L) / L^{6g-6+2n}`: `c₁ c₂ / (2^{2g-3+n} b_{g,n})`.
pub fn thm11_constant(c1: &AsymConstant, c2: &AsymConstant, g: u32, n: u32) -> Result<AsymConstant> {
    check_asym(g, n)?;
    require_exact(c1)?;
    require_exact(c2)?;
    Ok(AsymConstant::with_b(
        &c1.rational * &c2.rational * pow2(-excess(g, n)),
        c1.pi_power + c2.pi_power,
        -1,
    ))
}

/// Coefficient of `1 / m_{g,n}` in `c₁ c₂ / (2^{4g-6+2n} m_{g,n})`.
pub fn volume_form_coefficient(c1: &AsymConstant, c2: &AsymConstant, g: u32, n: u32) -> Result<BigRational> {
    check_asym(g, n)?;
    require_exact(c1)?;
    require_exact(c2)?;
    Ok(&c1.rational * &c2.rational * pow2(-2 * excess(g, n)))
}

/// Rewrites `k / m_{g,n}` in terms of `b_{g,n}` using `m = b / 2^{2g-3+n}`.
pub fn m_to_b(coefficient: &BigRational, pi_power: i32, g: u32, n: u32) -> AsymConstant {
    AsymConstant::with_b(coefficient * pow2(excess(g, n)), pi_power, -1)
}

/// Order of the generic automorphism fixing every simple closed curve class.
pub fn epsilon(g: u32, n: u32) -> Result<u32> {
    check_asym(g, n)?;
    Ok(match (g, n) {
        (0, 4) => 4,
        (1, 1) | (1, 2) | (2, 0) => 2,
        _ => 1,
    })
}

/// `r_{g,n} = 1 / 2^{2g-3+n}`.
pub fn r_const(g: u32, n: u32) -> Result<AsymConstant> {
    check_asym(g, n)?;
    Ok(AsymConstant::exact(pow2(-excess(g, n))))
}

/// Ratio of the two Thurston measures, `2^{2g-3+n}`.
pub fn nu_scaling(g: u32, n: u32) -> Result<AsymConstant> {
    check_asym(g, n)?;
    Ok(AsymConstant::exact(pow2(excess(g, n))))
}

/// Empirical `b_{g,n} ≈ 2^{2g-3+n} · m_{g,n}` from a census.
pub fn b_estimate(ct: &CountTable, l: u32) -> Result<AsymConstant> {
    Ok(AsymConstant::empirical(mgn_estimate(ct, l)? * pow2(excess(ct.g, ct.n))))
}

/// Type key of one simple closed curve of weight 1.
pub fn simple_curve_type(pieces: &[(u32, u32)]) -> TopType {
    let vertices: Vec<Piece> = pieces.iter().map(|&(genus, marked)| Piece { genus, marked }).collect();
    let b = if vertices.len() == 1 { 0 } else { 1 };
    top_type(&DualGraph {
        vertices,
        edges: vec![Edge { a: 0, b, weight: 1 }],
    })
}

/// What a prediction is compared against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Target {
    /// No census counterpart.
    Constant,
    /// `s(h, v, L) / L^{6g-6+2n}` (`v` absent means any vertical type).
    Normalized { h: TopType, v: Option<TopType> },
    /// `s(num) / s(den)`.
    Ratio {
        num_h: TopType,
        num_v: Option<TopType>,
        den_h: TopType,
        den_v: Option<TopType>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub name: String,
    #[serde(flatten)]
    pub constant: AsymConstant,
    pub target: Target,
}

fn pred(name: impl Into<String>, constant: AsymConstant, target: Target) -> Prediction {
    Prediction {
        name: name.into(),
        constant,
        target,
    }
}

/// Every closed-form constant available for `(g, n)`.
pub fn predictions(g: u32, n: u32) -> Result<Vec<Prediction>> {
    check_asym(g, n)?;
    let mut out = vec![
        pred(
            "epsilon",
            AsymConstant::exact(BigRational::from_integer(epsilon(g, n)?.into())),
            Target::Constant,
        ),
        pred("r", r_const(g, n)?, Target::Constant),
        pred("nu", nu_scaling(g, n)?, Target::Constant),
    ];
    let mut families: Vec<(String, AsymConstant, TopType)> = Vec::new();
    if (g, n) == (2, 0) {
        families.push((
            "sep".into(),
            freq_genus2(CurveKind::Separating),
            simple_curve_type(&[(1, 0), (1, 0)]),
        ));
        families.push((
            "nonsep".into(),
            freq_genus2(CurveKind::Nonseparating),
            simple_curve_type(&[(1, 0)]),
        ));
    } else if g == 0 {
        for i in 2..n.div_ceil(2) {
            families.push((
                format!("split-{i}"),
                freq_genus0(n, i)?,
                simple_curve_type(&[(0, i), (0, n - i)]),
            ));
        }
    } else if n == 0 {
        for i in 2..g.div_ceil(2) {
            families.push((
                format!("split-{i}"),
                freq_genusg_split(g, i)?,
                simple_curve_type(&[(i, 0), (g - i, 0)]),
            ));
        }
    }
    for (name, c, t) in &families {
        out.push(pred(format!("c-{name}"), c.clone(), Target::Constant));
        out.push(pred(
            format!("lattice-{name}"),
            thm12_constant(c, g, n)?,
            Target::Normalized { h: t.clone(), v: None },
        ));
        out.push(pred(
            format!("pair-{name}-{name}"),
            thm11_constant(c, c, g, n)?,
            Target::Constant,
        ));
    }
    for (a, (na, ca, ta)) in families.iter().enumerate() {
        for (nb, cb, tb) in families.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, f)| f) {
            out.push(pred(
                format!("ratio-{na}-{nb}"),
                ca.ratio(cb)?,
                Target::Ratio {
                    num_h: ta.clone(),
                    num_v: None,
                    den_h: tb.clone(),
                    den_v: None,
                },
            ));
            out.push(pred(
                format!("ratio-{na}-{na}-{nb}-{nb}"),
                thm11_constant(ca, ca, g, n)?.ratio(&thm11_constant(cb, cb, g, n)?)?,
                Target::Ratio {
                    num_h: ta.clone(),
                    num_v: Some(ta.clone()),
                    den_h: tb.clone(),
                    den_v: Some(tb.clone()),
                },
            ));
        }
    }
    Ok(out)
}

/// One line of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub name: String,
    pub l: u32,
    pub empirical: Option<BigRational>,
    pub predicted: f64,
    pub ratio: Option<f64>,
}

/// Empirical counterparts of each comparable prediction at every covered `L`.
pub fn compare_report(ct: &CountTable, preds: &[Prediction]) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::new();
    if ct.is_empty() {
        return Ok(rows);
    }
    let dim = 6 * ct.g as i64 - 6 + 2 * ct.n as i64;
    for p in preds {
        let Some(predicted) = p.constant.to_f64() else {
            continue;
        };
        for l in 1..=ct.max_area {
            let empirical = match &p.target {
                Target::Constant => break,
                Target::Normalized { h, v } => {
                    let s = ct.s_value(h, v.as_ref(), l)?;
                    let scale = BigRational::from_integer(BigInt::from(l)).pow(dim.unsigned_abs() as u32);
                    Some(if dim >= 0 { s / scale } else { s * scale })
                }
                Target::Ratio {
                    num_h,
                    num_v,
                    den_h,
                    den_v,
                } => {
                    let den = ct.s_value(den_h, den_v.as_ref(), l)?;
                    (!den.is_zero())
                        .then(|| ct.s_value(num_h, num_v.as_ref(), l).map(|num| num / den))
                        .transpose()?
                }
            };
            let ratio = empirical.as_ref().and_then(|e| e.to_f64()).map(|e| e / predicted);
            rows.push(ConvergenceRow {
                name: p.name.clone(),
                l,
                empirical,
                predicted,
                ratio,
            });
        }
    }
    Ok(rows)
}

/// Fifteen significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("name,L,empirical_num,empirical_den,predicted,ratio\n");
    for r in rows {
        let (num, den) = match &r.empirical {
            Some(e) => (e.numer().to_string(), e.denom().to_string()),
            None => (String::new(), String::new()),
        };
        let ratio = r.ratio.map(format_float).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{num},{den},{},{ratio}\n",
            r.name,
            r.l,
            format_float(r.predicted)
        ));
    }
    s
}

/// Whether the ratio of consecutive values shrinks toward 1 (absolute log distance non-increasing).
pub fn approaches(values: &[f64], target: f64) -> bool {
    values
        .windows(2)
        .all(|w| ((w[1] / target).ln().abs()) <= ((w[0] / target).ln().abs()) + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_two_constants() {
        let s = freq_genus2(CurveKind::Separating);
        let ns = freq_genus2(CurveKind::Nonseparating);
        assert_eq!(s.rational, q(1, 27648));
        assert_eq!(ns.rational, q(1, 576));
        assert_eq!(s.ratio(&ns).unwrap().rational, q(1, 48));
        assert_eq!(thm12_constant(&ns, 2, 0).unwrap().rational, q(1, 1152));
        assert_eq!(thm12_constant(&s, 2, 0).unwrap().rational, q(1, 55296));
        assert!(thm12_constant(&AsymConstant::exact(q(0, 1)), 2, 0)
            .unwrap()
            .rational
            .is_zero());
    }

    #[test]
    fn theorem_forms_agree() {
        let s = freq_genus2(CurveKind::Separating);
        let ns = freq_genus2(CurveKind::Nonseparating);
        let ss = thm11_constant(&s, &s, 2, 0).unwrap();
        let nn = thm11_constant(&ns, &ns, 2, 0).unwrap();
        assert_eq!(ss.provenance, Provenance::SymbolicInB);
        let r = ss.ratio(&nn).unwrap();
        assert_eq!(
            (r.rational, r.b_power, r.provenance),
            (q(1, 2304), 0, Provenance::Exact)
        );
        assert_eq!(
            thm11_constant(&s, &ns, 2, 0).unwrap(),
            thm11_constant(&ns, &s, 2, 0).unwrap()
        );
        let k = volume_form_coefficient(&s, &ns, 2, 0).unwrap();
        assert_eq!(m_to_b(&k, 0, 2, 0), thm11_constant(&s, &ns, 2, 0).unwrap());
        // Theorem 1.1 constant × 2^{2g-3+n} × b = c₁ c₂
        assert_eq!(&ss.rational * pow2(excess(2, 0)), &s.rational * &s.rational);
    }

    #[test]
    fn genus_zero_family() {
        assert_eq!(freq_genus0_ratio(8, 3, 2).unwrap(), q(4, 1));
        assert_eq!(freq_genus0(5, 2).unwrap().rational, q(1, 8));
        assert_eq!(freq_genus0(7, 2).unwrap(), freq_genus0(7, 5).unwrap());
        for n in 5..12 {
            for i in 2..=n - 2 {
                for j in 2..=n - 2 {
                    if 2 * i == n || 2 * j == n {
                        continue;
                    }
                    let direct = freq_genus0(n, i).unwrap().ratio(&freq_genus0(n, j).unwrap()).unwrap();
                    assert_eq!(direct.rational, freq_genus0_ratio(n, i, j).unwrap());
                }
            }
        }
        assert!(freq_genus0(6, 3).is_err());
        assert!(freq_genus0(6, 1).is_err());
    }

    #[test]
    fn genus_g_family() {
        assert_eq!(freq_genusg_ratio(5, 2, 2).unwrap(), q(1, 1));
        assert_eq!(freq_genusg_split(5, 2).unwrap(), freq_genusg_split(5, 3).unwrap());
        for g in 5..10 {
            for i in 2..=g - 2 {
                for j in 2..=g - 2 {
                    if 2 * i == g || 2 * j == g {
                        continue;
                    }
                    let direct = freq_genusg_split(g, i)
                        .unwrap()
                        .ratio(&freq_genusg_split(g, j).unwrap())
                        .unwrap();
                    assert_eq!(direct.rational, freq_genusg_ratio(g, i, j).unwrap());
                }
            }
        }
        assert!(freq_genusg_split(4, 2).is_err());
    }

    #[test]
    fn small_tables() {
        assert_eq!(epsilon(0, 4).unwrap(), 4);
        assert_eq!(epsilon(2, 0).unwrap(), 2);
        assert_eq!(epsilon(3, 0).unwrap(), 1);
        assert_eq!(r_const(2, 0).unwrap().rational, q(1, 2));
        assert_eq!(r_const(1, 1).unwrap().rational, q(1, 1));
        assert_eq!(nu_scaling(0, 4).unwrap().rational, q(2, 1));
        assert!(epsilon(0, 3).is_err());
    }

    #[test]
    fn prediction_names() {
        let p = predictions(2, 0).unwrap();
        let get = |n: &str| p.iter().find(|x| x.name == n).unwrap().constant.rational.clone();
        assert_eq!(get("ratio-sep-nonsep"), q(1, 48));
        assert_eq!(get("ratio-sep-sep-nonsep-nonsep"), q(1, 2304));
        assert_eq!(get("lattice-nonsep"), q(1, 1152));
        let p8 = predictions(0, 8).unwrap();
        let r = p8.iter().find(|x| x.name == "ratio-split-3-split-2").unwrap();
        assert_eq!(r.constant.rational, q(4, 1));
    }

    #[test]
    fn empty_census_compares_to_nothing() {
        let ct = CountTable::new(2, 0, 5, Default::default());
        assert!(compare_report(&ct, &predictions(2, 0).unwrap()).unwrap().is_empty());
    }
}
