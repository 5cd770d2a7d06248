//! Sharded, checkpointable census runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::naive::naive_shard;
use super::pruned::{allowed_partitions, prefixes, pruned_shard, stabilizer_order};
use super::{check_class, relabeling_group_order, weighted, CountTable, Filter, RawCounts};
use crate::curve_type::TopType;
use crate::error::{Error, Result};

/// Shared work counter; exceeding the limit aborts the run.
#[derive(Debug)]
pub struct Budget {
    limit: Option<u64>,
    used: AtomicU64,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self {
            limit: None,
            used: AtomicU64::new(0),
        }
    }

    pub fn with_limit(limit: Option<u64>) -> Self {
        Self {
            limit,
            used: AtomicU64::new(0),
        }
    }

    pub fn charge(&self, work: u64) -> Result<()> {
        let used = self.used.fetch_add(work, Ordering::Relaxed) + work;
        match self.limit {
            Some(l) if used > l => Err(Error::ResourceLimit(format!("work counter passed {l}"))),
            _ => Ok(()),
        }
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Naive,
    #[default]
    Pruned,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Mode::Naive),
            "pruned" => Ok(Mode::Pruned),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub g: u32,
    pub n: u32,
    pub max_area: u32,
    pub mode: Mode,
    pub filter: Filter,
    pub workers: usize,
    /// Abort once this many tables (naive) or search nodes (pruned) are visited.
    pub max_work: Option<u64>,
    pub checkpoint_dir: Option<PathBuf>,
    /// Run only shards whose index is `i` modulo `k`.
    pub shard: Option<(u32, u32)>,
}

impl RunConfig {
    pub fn new(g: u32, n: u32, max_area: u32) -> Self {
        Self {
            g,
            n,
            max_area,
            mode: Mode::Pruned,
            filter: Filter::any(),
            workers: 1,
            max_work: None,
            checkpoint_dir: None,
            shard: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_class(self.g, self.n)?;
        if self.max_area == 0 {
            return Err(Error::Domain("max area must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Domain("worker count must be at least 1".into()));
        }
        if let Some((i, k)) = self.shard {
            if k == 0 || i >= k {
                return Err(Error::Domain(format!("bad shard selection {i}/{k}")));
            }
        }
        Ok(())
    }
}

/// One unit of work: an area, a row structure (pruned mode only) and the
/// first few pairs of the matching being searched.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardSpec {
    pub area: u32,
    pub partition: Vec<u32>,
    pub prefix: Vec<[u32; 2]>,
}

impl ShardSpec {
    pub fn id(&self) -> String {
        let join = |v: Vec<String>| if v.is_empty() { "-".to_string() } else { v.join(".") };
        format!(
            "a{}_p{}_x{}",
            self.area,
            join(self.partition.iter().map(u32::to_string).collect()),
            join(self.prefix.iter().map(|[a, b]| format!("{a}x{b}")).collect())
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct ShardResult {
    spec: ShardSpec,
    weight_den: String,
    counts: Vec<(TopType, TopType, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardRecord {
    pub id: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub g: u32,
    pub n: u32,
    pub max_area: u32,
    pub mode: Mode,
    pub filter: Filter,
    pub filter_description: String,
    pub shard_selection: Option<String>,
    pub shards: Vec<ShardRecord>,
    pub total_num: String,
    pub total_den: String,
}

#[derive(Clone, Debug)]
pub struct CensusRun {
    pub table: CountTable,
    pub manifest: Manifest,
}

impl CensusRun {
    /// Writes `census.csv` and `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("census.csv"), self.table.to_csv())?;
        fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(&self.manifest)? + "\n",
        )?;
        Ok(())
    }

    /// Reads a directory written by [`CensusRun::write`].
    pub fn read(dir: &Path) -> Result<Self> {
        let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
        let csv = fs::read_to_string(dir.join("census.csv"))?;
        let table = CountTable::from_csv(&csv, manifest.g, manifest.n, manifest.max_area, manifest.filter.clone())?;
        Ok(Self { table, manifest })
    }
}

impl CensusRun {
    /// Combines runs over disjoint shard selections of one configuration.
    pub fn merge(parts: &[CensusRun]) -> Result<CensusRun> {
        let Some(first) = parts.first() else {
            return Err(Error::Domain("nothing to merge".into()));
        };
        let m0 = &first.manifest;
        let mut table = CountTable::new(m0.g, m0.n, m0.max_area, m0.filter.clone());
        let mut shards: Vec<ShardRecord> = Vec::new();
        let mut selections = Vec::new();
        for p in parts {
            let m = &p.manifest;
            if (m.g, m.n, m.max_area, m.mode, &m.filter) != (m0.g, m0.n, m0.max_area, m0.mode, &m0.filter) {
                return Err(Error::Domain("runs have different configurations".into()));
            }
            table.merge(&p.table);
            shards.extend(m.shards.iter().cloned());
            selections.push(m.shard_selection.clone().unwrap_or_else(|| "all".into()));
        }
        shards.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = shards.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::Domain(format!("shard {} appears twice", w[0].id)));
        }
        let total = table.total();
        let manifest = Manifest {
            shard_selection: Some(selections.join("+")),
            shards,
            total_num: total.numer().to_string(),
            total_den: total.denom().to_string(),
            ..m0.clone()
        };
        Ok(CensusRun { table, manifest })
    }
}

fn shard_depth(area: u32) -> u32 {
    match area {
        0..=4 => 0,
        5..=7 => 1,
        _ => 2,
    }
}

/// Shards of a run in their fixed order.
pub fn plan(cfg: &RunConfig) -> Vec<ShardSpec> {
    let mut out = Vec::new();
    for area in 1..=cfg.max_area {
        let structures = match cfg.mode {
            Mode::Naive => vec![Vec::new()],
            Mode::Pruned => allowed_partitions(area, cfg.filter.horizontal),
        };
        for partition in structures {
            for prefix in prefixes(area, shard_depth(area)) {
                out.push(ShardSpec {
                    area,
                    partition: partition.clone(),
                    prefix,
                });
            }
        }
    }
    out
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn compute_shard(cfg: &RunConfig, spec: &ShardSpec, budget: &Budget) -> Result<ShardResult> {
    let (counts, den): (RawCounts, BigInt) = match cfg.mode {
        Mode::Naive => (
            naive_shard(cfg.g, cfg.n, spec.area, &cfg.filter, &spec.prefix, budget)?,
            relabeling_group_order(spec.area),
        ),
        Mode::Pruned => (
            pruned_shard(cfg.g, cfg.n, &spec.partition, &cfg.filter, &spec.prefix, budget)?,
            stabilizer_order(&spec.partition),
        ),
    };
    Ok(ShardResult {
        spec: spec.clone(),
        weight_den: den.to_string(),
        counts: counts.into_iter().map(|((h, v), c)| (h, v, c)).collect(),
    })
}

fn shard_with_checkpoint(cfg: &RunConfig, spec: &ShardSpec, budget: &Budget) -> Result<(ShardResult, String)> {
    let path = cfg
        .checkpoint_dir
        .as_ref()
        .map(|d| d.join(format!("shard-{}.json", spec.id())));
    if let Some(p) = &path {
        if let Ok(bytes) = fs::read(p) {
            if let Ok(r) = serde_json::from_slice::<ShardResult>(&bytes) {
                if r.spec == *spec {
                    return Ok((r, sha256_hex(&bytes)));
                }
            }
        }
    }
    let r = compute_shard(cfg, spec, budget)?;
    let bytes = serde_json::to_vec(&r)?;
    if let Some(p) = &path {
        let tmp = p.with_extension("json.tmp");
        fs::write(&tmp, &bytes)?;
        fs::rename(&tmp, p)?;
    }
    Ok((r, sha256_hex(&bytes)))
}

/// Runs (part of) a census. The result does not depend on the worker count.
pub fn run_census(cfg: &RunConfig) -> Result<CensusRun> {
    cfg.validate()?;
    if let Some(d) = &cfg.checkpoint_dir {
        fs::create_dir_all(d)?;
    }
    let specs: Vec<ShardSpec> = plan(cfg)
        .into_iter()
        .enumerate()
        .filter(|(i, _)| cfg.shard.is_none_or(|(j, k)| *i as u32 % k == j))
        .map(|(_, s)| s)
        .collect();
    let budget = Budget::with_limit(cfg.max_work);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let results: Vec<(ShardResult, String)> = pool.install(|| {
        use rayon::prelude::*;
        specs
            .par_iter()
            .map(|s| shard_with_checkpoint(cfg, s, &budget))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut table = CountTable::new(cfg.g, cfg.n, cfg.max_area, cfg.filter.clone());
    let mut shards = Vec::with_capacity(results.len());
    for (r, sha) in &results {
        let den: BigInt = r
            .weight_den
            .parse()
            .map_err(|_| Error::Parse(format!("shard {}: bad weight", r.spec.id())))?;
        let raw: RawCounts = r.counts.iter().map(|(h, v, c)| ((h.clone(), v.clone()), *c)).collect();
        for (h, v, q) in weighted(&raw, &den) {
            if !q.is_zero() {
                table.add(r.spec.area, h, v, q);
            }
        }
        shards.push(ShardRecord {
            id: r.spec.id(),
            sha256: sha.clone(),
        });
    }
    let total = table.total();
    let manifest = Manifest {
        g: cfg.g,
        n: cfg.n,
        max_area: cfg.max_area,
        mode: cfg.mode,
        filter: cfg.filter.clone(),
        filter_description: cfg.filter.describe(),
        shard_selection: cfg.shard.map(|(i, k)| format!("{i}/{k}")),
        shards,
        total_num: total.numer().to_string(),
        total_den: total.denom().to_string(),
    };
    Ok(CensusRun { table, manifest })
}
