//! Benchmark driver: times graph build, attribute ingestion and queries for
//! each backend and shard count, and reads/writes the results CSV.

use std::fmt;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::attr::{AttributeStore, Backend, EntityMask};
use crate::di::{DiGraphIndex, VertexName};
use crate::error::{Error, Result};
use crate::gen::{self, AttrFamily, GenConfig};
use crate::ingest::{self, AttrKind, AttrRows};
use crate::par::Sharding;
use crate::prop_graph::{PropGraph, PropGraphConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operation {
    Build,
    AddLabels,
    AddRels,
    QueryLabels,
    QueryRels,
}

impl Operation {
    pub const ALL: [Operation; 5] = [
        Operation::Build,
        Operation::AddLabels,
        Operation::AddRels,
        Operation::QueryLabels,
        Operation::QueryRels,
    ];
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operation::Build => "build",
            Operation::AddLabels => "add-labels",
            Operation::AddRels => "add-rels",
            Operation::QueryLabels => "query-labels",
            Operation::QueryRels => "query-rels",
        })
    }
}

/// One timed measurement: the median over repetitions of a single operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub operation: Operation,
    pub backend: Backend,
    pub shards: usize,
    pub m: usize,
    pub seconds: f64,
    /// Entities (edges, vertices or attribute pairs) handled per second.
    pub throughput: f64,
    /// Logical size of the structure the operation built or read.
    pub bytes: usize,
}

pub const CSV_HEADER: [&str; 7] = ["operation", "backend", "shards", "m", "seconds", "throughput", "bytes"];

/// Writes a header row followed by one row per record.
pub fn write_csv(records: &[BenchRecord], path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::ShapeMismatch(format!("unexpected results header {header:?}")));
    }
    Ok(r.deserialize().collect::<Result<_, csv::Error>>()?)
}

/// Inputs for one graph size: edges plus label and relationship assignments
/// keyed by original names, and the attribute strings each query asks for.
#[derive(Debug, Clone)]
pub struct Workload {
    pub src: Vec<VertexName>,
    pub dst: Vec<VertexName>,
    pub label_nodes: Vec<VertexName>,
    pub labels: Vec<String>,
    pub rel_src: Vec<VertexName>,
    pub rel_dst: Vec<VertexName>,
    pub rels: Vec<String>,
    pub label_query: Vec<String>,
    pub rel_query: Vec<String>,
}

impl Workload {
    /// Random graph of `cfg.m` edges; one label pick per vertex and one
    /// relationship pick per structural edge.
    pub fn generate(cfg: &GenConfig, query_arity: usize) -> Self {
        let (src, dst) = gen::generate_random_graph(cfg);
        let di = DiGraphIndex::build_from_edges(&src, &dst, cfg.dedup, &Sharding::sequential(1))
            .expect("generated arrays have equal length");
        let labels = gen::assign_random_attributes(di.vertex_count(), cfg, AttrFamily::Labels);
        let rels = gen::assign_random_attributes(di.edge_count(), cfg, AttrFamily::Relationships);
        let pool = gen::attribute_pool(cfg.pool_size);
        Self {
            label_nodes: labels.entities.iter().map(|&u| di.names()[u]).collect(),
            labels: labels.strings().into_iter().map(str::to_owned).collect(),
            rel_src: rels.entities.iter().map(|&e| di.names()[di.src()[e] as usize]).collect(),
            rel_dst: rels.entities.iter().map(|&e| di.names()[di.dst()[e] as usize]).collect(),
            rels: rels.strings().into_iter().map(str::to_owned).collect(),
            label_query: gen::query_subset(&pool, query_arity, cfg.seed, AttrFamily::Labels),
            rel_query: gen::query_subset(&pool, query_arity, cfg.seed, AttrFamily::Relationships),
            src,
            dst,
        }
    }

    /// Reads `PREFIX.edges.csv`, `PREFIX.labels.csv` and `PREFIX.rels.csv`.
    /// Query strings are drawn by seed from the distinct values present.
    pub fn load(prefix: &str, query_arity: usize, seed: u64) -> Result<Self> {
        let paths = WorkloadPaths::new(prefix);
        let edges = ingest::load_edge_csv(&paths.edges)?;
        let AttrRows::VertexLabels { nodes, labels } = ingest::load_attr_csv(&paths.labels, AttrKind::VertexLabel)?
        else {
            unreachable!("vertex-label rows")
        };
        let AttrRows::EdgeRels { src, dst, rels } = ingest::load_attr_csv(&paths.rels, AttrKind::EdgeRel)? else {
            unreachable!("edge-rel rows")
        };
        let distinct = |v: &[String]| {
            let mut d = v.to_vec();
            d.sort_unstable();
            d.dedup();
            d
        };
        Ok(Self {
            label_query: gen::query_subset(&distinct(&labels), query_arity, seed, AttrFamily::Labels),
            rel_query: gen::query_subset(&distinct(&rels), query_arity, seed, AttrFamily::Relationships),
            src: edges.src,
            dst: edges.dst,
            label_nodes: nodes,
            labels,
            rel_src: src,
            rel_dst: dst,
            rels,
        })
    }

    pub fn save(&self, prefix: &str) -> Result<()> {
        let paths = WorkloadPaths::new(prefix);
        ingest::write_edge_csv(&paths.edges, &self.src, &self.dst)?;
        ingest::write_vertex_label_csv(&paths.labels, &self.label_nodes, &self.labels)?;
        ingest::write_edge_rel_csv(&paths.rels, &self.rel_src, &self.rel_dst, &self.rels)
    }

    pub fn edge_count(&self) -> usize {
        self.src.len()
    }
}

/// File names used by [`Workload::save`] and [`Workload::load`].
#[derive(Debug, Clone)]
pub struct WorkloadPaths {
    pub edges: String,
    pub labels: String,
    pub rels: String,
}

impl WorkloadPaths {
    pub fn new(prefix: &str) -> Self {
        Self {
            edges: format!("{prefix}.edges.csv"),
            labels: format!("{prefix}.labels.csv"),
            rels: format!("{prefix}.rels.csv"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub edges: Vec<usize>,
    pub backends: Vec<Backend>,
    pub shards: Vec<usize>,
    pub seed: u64,
    pub reps: usize,
    pub pool_size: usize,
    pub query_arity: usize,
    pub dedup: bool,
    /// Run shards on worker threads; `false` selects the sequential fallback.
    pub parallel: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            edges: vec![100_000],
            backends: Backend::ALL.to_vec(),
            shards: vec![1, 2, 4, 8],
            seed: 1,
            reps: 3,
            pool_size: 50,
            query_arity: 5,
            dedup: true,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellFailure {
    pub m: usize,
    pub backend: Backend,
    pub shards: usize,
    pub message: String,
}

/// Query answers of one cell, from its last repetition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMasks {
    pub m: usize,
    pub backend: Backend,
    pub shards: usize,
    pub labels: EntityMask,
    pub rels: EntityMask,
}

#[derive(Debug, Clone, Default)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub failures: Vec<CellFailure>,
    pub masks: Vec<CellMasks>,
}

fn median(samples: &mut [f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2.0
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64().max(1e-9))
}

/// Runs every repetition of one (workload, backend, shard count) cell.
pub fn run_cell(
    workload: &Workload,
    backend: Backend,
    sharding: Sharding,
    reps: usize,
    dedup: bool,
) -> Result<(Vec<BenchRecord>, Option<(EntityMask, EntityMask)>)> {
    let m = workload.edge_count();
    let mut times: Vec<Vec<f64>> = vec![Vec::new(); Operation::ALL.len()];
    let mut bytes = [0usize; 5];
    let mut scale = [0usize; 5];
    let mut masks = None;
    let shards = sharding.shards();
    let config = PropGraphConfig::new(backend, shards).with_sharding(sharding).with_dedup(dedup);

    for _ in 0..reps.max(1) {
        let mut g = PropGraph::new(config.clone());
        let (built, t) = timed(|| g.add_edges_from(&workload.src, &workload.dst));
        built?;
        times[0].push(t);
        let di = g.graph()?;
        bytes[0] = di.logical_bytes();
        scale[0] = m;
        let (n, structural) = (di.vertex_count(), di.edge_count());
        if m == 0 {
            continue;
        }

        let (r, t) = timed(|| g.add_node_labels(&workload.label_nodes, &workload.labels));
        r?;
        times[1].push(t);
        let (r, t) = timed(|| g.add_edge_relationships(&workload.rel_src, &workload.rel_dst, &workload.rels));
        r?;
        times[2].push(t);
        let (lmask, t) = timed(|| g.query_labels(&workload.label_query));
        times[3].push(t);
        let (rmask, t) = timed(|| g.query_relationships(&workload.rel_query));
        times[4].push(t);

        bytes[1] = g.label_store()?.logical_bytes();
        bytes[2] = g.rel_store()?.logical_bytes();
        bytes[3] = bytes[1];
        bytes[4] = bytes[2];
        scale[1] = workload.labels.len();
        scale[2] = workload.rels.len();
        scale[3] = n;
        scale[4] = structural;
        masks = Some((lmask?, rmask?));
    }

    let records = Operation::ALL
        .iter()
        .zip(times.iter_mut())
        .enumerate()
        .filter(|(_, (_, t))| !t.is_empty())
        .map(|(i, (&operation, samples))| {
            let seconds = median(samples);
            BenchRecord {
                operation,
                backend,
                shards,
                m,
                seconds,
                throughput: scale[i] as f64 / seconds,
                bytes: bytes[i],
            }
        })
        .collect();
    Ok((records, masks))
}

/// Rough peak bytes for one cell, used to skip sizes that cannot fit.
pub fn estimated_cell_bytes(m: usize, backend: Backend) -> usize {
    let per_edge = match backend {
        Backend::List => 220,
        Backend::ListD => 330,
        Backend::Arr => 170,
    };
    m * per_edge
}

fn available_memory() -> Option<usize> {
    let info = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kb: usize = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<String>()
        .cloned()
        .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic".into())
}

/// Runs the suite over generated workloads. Cells that fail (including ones
/// skipped for lack of memory) are reported in `failures`; the rest continue.
pub fn run_benchmark(cfg: &SuiteConfig, mut progress: impl Write) -> BenchOutcome {
    let mut outcome = BenchOutcome::default();
    for &m in &cfg.edges {
        let gen_cfg = GenConfig {
            m,
            seed: cfg.seed,
            pool_size: cfg.pool_size,
            dedup: cfg.dedup,
        };
        let workload = Workload::generate(&gen_cfg, cfg.query_arity);
        run_suite_on(&workload, cfg, &mut outcome, &mut progress);
    }
    outcome
}

/// Runs every backend × shard cell of `cfg` on one prepared workload.
pub fn run_suite_on(workload: &Workload, cfg: &SuiteConfig, outcome: &mut BenchOutcome, mut progress: impl Write) {
    let m = workload.edge_count();
    for &backend in &cfg.backends {
        for &shards in &cfg.shards {
            let fail = |message: String| CellFailure {
                m,
                backend,
                shards,
                message,
            };
            if let Some(avail) = available_memory() {
                let need = estimated_cell_bytes(m, backend);
                if need > avail {
                    outcome.failures.push(fail(format!(
                        "estimated {need} bytes exceeds {avail} available"
                    )));
                    continue;
                }
            }
            let sharding = if cfg.parallel {
                Sharding::parallel(shards)
            } else {
                Sharding::sequential(shards)
            };
            let result = catch_unwind(AssertUnwindSafe(|| {
                run_cell(workload, backend, sharding, cfg.reps, cfg.dedup)
            }));
            match result {
                Ok(Ok((records, masks))) => {
                    for r in &records {
                        let _ = writeln!(
                            progress,
                            "{:>12} {:>6} P={:<2} m={:<10} {:>12.6}s {:>14.0}/s",
                            r.operation.to_string(),
                            r.backend.to_string(),
                            r.shards,
                            r.m,
                            r.seconds,
                            r.throughput
                        );
                    }
                    outcome.records.extend(records);
                    if let Some((labels, rels)) = masks {
                        outcome.masks.push(CellMasks {
                            m,
                            backend,
                            shards,
                            labels,
                            rels,
                        });
                    }
                }
                Ok(Err(e)) => outcome.failures.push(fail(e.to_string())),
                Err(p) => outcome.failures.push(fail(panic_message(p))),
            }
        }
    }
}
