//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Heavy criteria (naive genus-2 enumeration, the genus-2 trend to area 12)
//! take a few minutes on one core.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use flatcensus::asymptotics::{
    epsilon, freq_genus0_ratio, freq_genus2, r_const, thm11_constant, thm12_constant, CurveKind,
};
use flatcensus::census::{run_census, CountTable, CylinderFilter, Filter, Mode, RunConfig};
use flatcensus::curve_type::{cut_along, multicurve_type, TopType};
use flatcensus::dt::{
    all_pants_graphs, count_il, leb_a1, r_from_pants, semigroup_index, volume_limit_check, PantsDecomposition,
};
use flatcensus::foliation::{core_multicurve, cylinders, Direction};
use flatcensus::tiling::{corner_orbits, genus};
use flatcensus::{GluingTable, MarkedTiling};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const TREND_MAX_AREA: u32 = 12;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run(g: u32, n: u32, max_area: u32, mode: Mode, filter: Filter) -> CountTable {
    let mut cfg = RunConfig::new(g, n, max_area);
    cfg.mode = mode;
    cfg.filter = filter;
    cfg.workers = workers();
    run_census(&cfg).expect("census run").table
}

fn nonsep() -> TopType {
    "g1n0/0-0w1".parse().unwrap()
}

fn sep() -> TopType {
    "g1n0+g1n0/0-1w1".parse().unwrap()
}

fn criterion_1() -> Outcome {
    let mut buckets = 0;
    for (g, n, max_area, filter) in [
        (0, 4, 5, Filter::any()),
        (1, 1, 5, Filter::any()),
        (2, 0, 6, Filter::cylinders(CylinderFilter::OneCylinder)),
    ] {
        let pruned = run(g, n, max_area, Mode::Pruned, filter.clone());
        let naive = run(g, n, max_area, Mode::Naive, filter);
        ensure(pruned == naive, || format!("({g}, {n}) differs"))?;
        buckets += pruned.len();
    }
    Ok(format!("{buckets} buckets equal"))
}

fn criterion_2() -> Outcome {
    let one = run(1, 1, 1, Mode::Pruned, Filter::any());
    ensure(one.total() == q(1, 2), || format!("(1,1) area 1 total {}", one.total()))?;
    let p = p2();
    let (h, v) = (
        multicurve_type(&p, Direction::Horizontal).unwrap(),
        multicurve_type(&p, Direction::Vertical).unwrap(),
    );
    let pillow = run(0, 4, 2, Mode::Pruned, Filter::any());
    ensure(pillow.get(2, &h, &v) == q(1, 4), || {
        format!("P2 bucket {}", pillow.get(2, &h, &v))
    })?;

    let mut surfaces = 0;
    for (g, n) in [(0, 4), (0, 5), (1, 1), (1, 2), (2, 0)] {
        let ct = run(g, n, 4, Mode::Pruned, Filter::any());
        for area in 1..=4 {
            let mut oracle: BTreeMap<(TopType, TopType), BigRational> = BTreeMap::new();
            for (mt, stab) in orbit_census(g, n, area) {
                ensure(mt.automorphisms().order() == stab, || {
                    format!(
                        "({g}, {n}) area {area}: #Aut {} vs brute force {stab}",
                        mt.automorphisms().order()
                    )
                })?;
                let key = (
                    multicurve_type(&mt, Direction::Horizontal).unwrap(),
                    multicurve_type(&mt, Direction::Vertical).unwrap(),
                );
                *oracle.entry(key).or_insert_with(BigRational::zero) += q(1, stab as i64);
                surfaces += 1;
            }
            let got: BTreeMap<(TopType, TopType), BigRational> = ct
                .buckets()
                .filter(|(a, ..)| *a == area)
                .map(|(_, h, v, c)| ((h.clone(), v.clone()), c.clone()))
                .collect();
            ensure(got == oracle, || {
                format!("({g}, {n}) area {area}: buckets differ from 1/#Aut sums")
            })?;
        }
    }
    Ok(format!("{surfaces} canonical surfaces checked"))
}

/// Rows of consecutive squares glued by translations, one per part.
fn row_table(partition: &[u32]) -> Vec<u32> {
    let n: u32 = partition.iter().sum();
    let mut h = vec![0; 2 * n as usize];
    let mut start = 0;
    for &k in partition {
        for j in 0..k {
            let (a, b) = (start + j, start + (j + 1) % k);
            h[2 * a as usize] = 2 * b + 1;
            h[2 * b as usize + 1] = 2 * a;
        }
        start += k;
    }
    h
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for k in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - k, k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

/// Poles plus the lowest-numbered vertices until the surface is hyperbolic.
fn minimal_marking(t: &GluingTable) -> MarkedTiling {
    let cone = corner_orbits(t);
    let g = genus(t).unwrap() as i64;
    let mut ids: Vec<u32> = (0..cone.len())
        .filter(|&i| cone.angle(i) == 2)
        .map(|i| cone.class_id(i))
        .collect();
    for i in 0..cone.len() {
        if 2 - 2 * g - (ids.len() as i64) < 0 {
            break;
        }
        if !ids.contains(&cone.class_id(i)) {
            ids.push(cone.class_id(i));
        }
    }
    MarkedTiling::new(t.clone(), &ids).unwrap()
}

fn check_surface(mt: &MarkedTiling) -> Result<(), String> {
    let cone = mt.cone();
    ensure(cone.classes().iter().all(|c| c.len() % 2 == 0), || {
        "odd corner orbit".into()
    })?;
    ensure(cone.total_order() == 4 * mt.genus() as i32 - 4, || {
        "orders do not sum to 4g - 4".into()
    })?;
    for dir in [Direction::Horizontal, Direction::Vertical] {
        let area: u32 = cylinders(mt, dir)
            .unwrap()
            .iter()
            .map(|c| c.circumference * c.height)
            .sum();
        ensure(area == mt.n_squares(), || {
            format!("{dir:?} cylinder areas sum to {area}")
        })?;
        let cs = core_multicurve(mt, dir).unwrap();
        let pieces = cut_along(mt, &cs).unwrap();
        let chi: i64 = pieces
            .iter()
            .map(|p| 2 - 2 * p.genus as i64 - p.boundaries.len() as i64)
            .sum();
        ensure(chi == 2 - 2 * mt.genus() as i64, || "cut Euler bookkeeping".into())?;
    }
    let r = mt.rotate90();
    ensure(r.rotate90() == mt.frame_flip(), || {
        "rotate90 twice is not the frame flip".into()
    })?;
    let shape = |m: &MarkedTiling, d| {
        let mut v: Vec<(u32, u32)> = cylinders(m, d)
            .unwrap()
            .iter()
            .map(|c| (c.circumference, c.height))
            .collect();
        v.sort_unstable();
        v
    };
    ensure(
        shape(mt, Direction::Vertical) == shape(&r, Direction::Horizontal),
        || "rotation moves cylinders".into(),
    )?;
    if mt.genus() == 2 && mt.n_marked() == 0 {
        ensure(mt.automorphisms().order().is_multiple_of(2), || {
            "genus-2 surface with odd #Aut".into()
        })?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let mut checked = 0usize;
    for area in 1..=6u32 {
        let verticals = all_matchings(area);
        for p in partitions(area, area) {
            let h = row_table(&p);
            for v in &verticals {
                let t = GluingTable::new(area, h.clone(), v.clone()).unwrap();
                if !t.is_connected() {
                    continue;
                }
                let mt = minimal_marking(&t);
                check_surface(&mt).map_err(|e| format!("area {area}, rows {p:?}, v {v:?}: {e}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} surfaces, zero violations"))
}

fn criterion_4() -> Outcome {
    let ct = run(2, 0, 8, Mode::Pruned, Filter::any());
    for (a, h, v, c) in ct.buckets() {
        let other = ct.get(a, v, h);
        ensure(*c == other, || {
            format!("area {a}: s({h}, {v}) = {c} but s({v}, {h}) = {other}")
        })?;
    }
    Ok(format!("{} buckets symmetric", ct.len()))
}

struct Trend {
    table: CountTable,
}

impl Trend {
    fn new() -> Self {
        let table = run(
            2,
            0,
            TREND_MAX_AREA,
            Mode::Pruned,
            Filter::cylinders(CylinderFilter::OneCylinderHeight1),
        );
        Self { table }
    }
}

fn trend_matches_full_census(trend: &Trend) -> Result<(), String> {
    // a weight-1 simple curve is the core of a single height-1 cylinder
    let full = run(2, 0, 8, Mode::Pruned, Filter::any());
    for l in 1..=8 {
        for t in [sep(), nonsep()] {
            let a = trend.table.s_value(&t, None, l).unwrap();
            let b = full.s_value(&t, None, l).unwrap();
            ensure(a == b, || {
                format!("filtered census disagrees with the full census at L = {l}")
            })?;
        }
    }
    Ok(())
}

fn criterion_5(trend: &Trend) -> Outcome {
    trend_matches_full_census(trend)?;
    let evens: Vec<u32> = (2..=TREND_MAX_AREA).filter(|l| l % 2 == 0).collect();
    let mut ratios = Vec::new();
    for &l in &evens {
        let s = trend.table.s_value(&sep(), None, l).unwrap();
        let ns = trend.table.s_value(&nonsep(), None, l).unwrap();
        if !ns.is_zero() {
            ratios.push((l, (s / ns).to_f64().unwrap()));
        }
    }
    let last: Vec<(u32, f64)> = ratios[ratios.len() - 3..].to_vec();
    let text = last
        .iter()
        .map(|(l, r)| format!("L={l}: {r:.5}"))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(last.iter().all(|&(_, r)| r > 0.0 && r < 0.15), || {
        format!("out of (0, 0.15): {text}")
    })?;
    ensure(last.windows(2).all(|w| w[1].1 <= w[0].1), || {
        format!("increasing: {text}")
    })?;
    Ok(format!("{text}; limit 1/48 = {:.5}", 1.0 / 48.0))
}

fn criterion_6(trend: &Trend) -> Outcome {
    let l = TREND_MAX_AREA;
    let s = trend.table.s_value(&nonsep(), None, l).unwrap();
    let empirical = (s / BigRational::from_integer(l.into()).pow(6)).to_f64().unwrap();
    let c = thm12_constant(&freq_genus2(CurveKind::Nonseparating), 2, 0).unwrap();
    let predicted = c.to_f64().unwrap();
    let factor = empirical / predicted;
    ensure((1.0 / 3.0..=3.0).contains(&factor), || format!("factor {factor:.3}"))?;
    Ok(format!(
        "s(nonsep, *, {l}) / {l}^6 = {empirical:.6e}, predicted {predicted:.6e} (factor {factor:.3})"
    ))
}

fn criterion_7() -> Outcome {
    let s04 = PantsDecomposition::new(0, 4, vec![[0, -1, -1], [0, -1, -1]]).unwrap();
    ensure(count_il(&s04, 10) == BigUint::from(30u32), || {
        format!("count_IL(10) = {}", count_il(&s04, 10))
    })?;
    let (ratio, limit) = volume_limit_check(&s04, 1000).unwrap();
    let closed_form: f64 = (1..=500u64).map(|k| 2.0 * k as f64).sum::<f64>() / 1e6;
    let r = ratio.to_f64().unwrap();
    ensure((r - closed_form).abs() < 1e-5, || format!("ratio {r} vs {closed_form}"))?;
    ensure(limit == q(1, 4), || format!("limit {limit}"))?;
    ensure(
        limit == leb_a1(1).unwrap() / BigRational::from_integer(semigroup_index(&s04).into()),
        || "limit is not leb_A1 / index".into(),
    )?;
    let mut graphs = 0;
    for g in 0..=3u32 {
        for n in 0..=9u32 {
            let np = 3 * g as i64 - 3 + n as i64;
            if !(1..=6).contains(&np) || 2 - 2 * g as i64 - n as i64 >= 0 {
                continue;
            }
            for pd in all_pants_graphs(g, n).unwrap() {
                let want = BigUint::from(1u32) << (2 * g + n - 3);
                ensure(semigroup_index(&pd) == want, || format!("index of {pd:?}"))?;
                graphs += 1;
            }
        }
    }
    Ok(format!(
        "count 30, ratio {r:.6}, {graphs} pants graphs with index 2^(2g-3+n)"
    ))
}

/// Hit-or-miss estimate of the volume of `{0 ≤ y_i < x_i, Σ x_i ≤ 1}` in the unit cube.
fn monte_carlo_volume(np: usize, samples: u64, rng: &mut ChaCha8Rng) -> f64 {
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut sum = 0.0;
        let mut inside = true;
        for _ in 0..np {
            let x: f64 = rng.gen();
            let y: f64 = rng.gen();
            sum += x;
            inside &= y < x;
        }
        if inside && sum <= 1.0 {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1e6a);
    let mut parts = Vec::new();
    for np in 1..=3u32 {
        let exact = leb_a1(np).unwrap().to_f64().unwrap();
        let mc = monte_carlo_volume(np as usize, 10_000_000, &mut rng);
        let rel = (mc - exact).abs() / exact;
        parts.push(format!("Np={np}: {:.3}%", 100.0 * rel));
        ensure(rel < 0.02, || format!("Np = {np}: MC {mc:.6e} vs {exact:.6e}"))?;
    }
    Ok(parts.join(", "))
}

fn criterion_9() -> Outcome {
    let s = freq_genus2(CurveKind::Separating);
    let ns = freq_genus2(CurveKind::Nonseparating);
    ensure(s.ratio(&ns).unwrap().rational == q(1, 48), || "sep / nonsep".into())?;
    let ss = thm11_constant(&s, &s, 2, 0).unwrap();
    let nn = thm11_constant(&ns, &ns, 2, 0).unwrap();
    ensure(ss.ratio(&nn).unwrap().rational == q(1, 2304), || "squared ratio".into())?;
    ensure(freq_genus0_ratio(8, 3, 2).unwrap() == q(4, 1), || {
        "genus-0 ratio".into()
    })?;
    // (g, n, epsilon, 1 / r)
    let table: [(u32, u32, u32, i64); 17] = [
        (0, 4, 4, 2),
        (0, 5, 1, 4),
        (0, 6, 1, 8),
        (0, 7, 1, 16),
        (0, 8, 1, 32),
        (0, 9, 1, 64),
        (1, 1, 2, 1),
        (1, 2, 2, 2),
        (1, 3, 1, 4),
        (1, 4, 1, 8),
        (1, 5, 1, 16),
        (1, 6, 1, 32),
        (2, 0, 2, 2),
        (2, 1, 1, 4),
        (2, 2, 1, 8),
        (2, 3, 1, 16),
        (3, 0, 1, 8),
    ];
    for (g, n, eps, inv_r) in table {
        ensure(epsilon(g, n).unwrap() == eps, || format!("epsilon({g}, {n})"))?;
        let r = r_const(g, n).unwrap().rational;
        ensure(r == q(1, inv_r), || format!("r({g}, {n}) = {r}"))?;
        for pd in all_pants_graphs(g, n).unwrap() {
            ensure(r_from_pants(&pd, 1).unwrap() == r, || format!("lattice r for {pd:?}"))?;
        }
    }
    Ok(format!("{} (g, n) classes", table.len()))
}

fn criterion_10() -> Outcome {
    let mut outputs = Vec::new();
    for w in [1, 4, 16] {
        let mut cfg = RunConfig::new(0, 4, 4);
        cfg.workers = w;
        let r = run_census(&cfg).map_err(|e| e.to_string())?;
        outputs.push((r.table.to_csv(), serde_json::to_string(&r.manifest).unwrap()));
    }
    ensure(outputs.windows(2).all(|w| w[0] == w[1]), || "outputs differ".into())?;
    Ok("1, 4, 16 workers byte-identical".into())
}

fn main() {
    let started = Instant::now();
    let mut trend: Option<Trend> = None;
    let mut failed = 0;
    for k in 1..=10u32 {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| match k {
            1 => criterion_1(),
            2 => criterion_2(),
            3 => criterion_3(),
            4 => criterion_4(),
            5 => criterion_5(trend.get_or_insert_with(Trend::new)),
            6 => criterion_6(trend.get_or_insert_with(Trend::new)),
            7 => criterion_7(),
            8 => criterion_8(),
            9 => criterion_9(),
            _ => criterion_10(),
        }))
        .unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {k:>2}: PASS  {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {k:>2}: FAIL  {detail} [{secs:.1}s]");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        10 - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
