use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dipgraph::bench::{self, BenchOutcome, SuiteConfig, Workload, WorkloadPaths};
use dipgraph::gen::GenConfig;
use dipgraph::{Backend, PropGraph, PropGraphConfig, Result, Sharding};

#[derive(Parser)]
#[command(name = "dipgraph", version, about = "Double-Index property graph generator and benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random graph with labels and relationships as CSV files.
    Gen {
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output prefix; writes PREFIX.edges.csv, PREFIX.labels.csv, PREFIX.rels.csv.
        #[arg(long)]
        out: String,
        #[arg(long, default_value_t = 50)]
        pool: usize,
        /// Keep duplicate (src, dst) pairs as separate structural edges.
        #[arg(long)]
        keep_multiedges: bool,
    },
    /// Time build, attribute ingestion and queries across backends and shard counts.
    Bench {
        /// Edge counts to generate, comma separated.
        #[arg(long, value_delimiter = ',', required_unless_present = "graph")]
        edges: Vec<usize>,
        /// Benchmark a workload written by `gen` instead of generating one.
        #[arg(long, conflicts_with = "edges")]
        graph: Option<String>,
        #[arg(long, value_delimiter = ',', default_value = "list,listd,arr")]
        backends: Vec<Backend>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        shards: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 50)]
        pool: usize,
        /// Attributes per query.
        #[arg(long, default_value_t = 5)]
        query_arity: usize,
        /// Process shards in turn on one thread.
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: String,
    },
    /// Load a generated workload and print the indices of matching entities.
    Query {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value = "list")]
        backend: Backend,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        /// Relationships to match on edges, comma separated.
        #[arg(long, value_delimiter = ',', required_unless_present = "labels")]
        rels: Vec<String>,
        /// Labels to match on vertices, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with = "rels")]
        labels: Vec<String>,
    },
    /// Print vertex/edge counts and degree statistics of a generated graph.
    Stats {
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Gen {
            edges,
            seed,
            out,
            pool,
            keep_multiedges,
        } => {
            let cfg = GenConfig {
                dedup: !keep_multiedges,
                ..GenConfig::new(edges, seed).with_pool_size(pool.max(1))
            };
            let workload = Workload::generate(&cfg, 5);
            workload.save(&out)?;
            let paths = WorkloadPaths::new(&out);
            eprintln!("wrote {}, {}, {}", paths.edges, paths.labels, paths.rels);
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            edges,
            graph,
            backends,
            shards,
            seed,
            reps,
            pool,
            query_arity,
            sequential,
            out,
        } => {
            let cfg = SuiteConfig {
                edges,
                backends,
                shards,
                seed,
                reps,
                pool_size: pool.max(1),
                query_arity,
                parallel: !sequential,
                ..SuiteConfig::default()
            };
            let outcome = match graph {
                Some(prefix) => {
                    let workload = Workload::load(&prefix, query_arity, seed)?;
                    let mut outcome = BenchOutcome::default();
                    bench::run_suite_on(&workload, &cfg, &mut outcome, std::io::stderr());
                    outcome
                }
                None => bench::run_benchmark(&cfg, std::io::stderr()),
            };
            bench::write_csv(&outcome.records, &out)?;
            for f in &outcome.failures {
                eprintln!("cell failed: m={} backend={} shards={}: {}", f.m, f.backend, f.shards, f.message);
            }
            Ok(if outcome.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Query {
            graph,
            backend,
            shards,
            rels,
            labels,
        } => {
            let workload = Workload::load(&graph, 0, 0)?;
            let mut g = PropGraph::new(PropGraphConfig::new(backend, shards));
            g.add_edges_from(&workload.src, &workload.dst)?;
            let mask = if labels.is_empty() {
                g.add_edge_relationships(&workload.rel_src, &workload.rel_dst, &workload.rels)?;
                g.query_relationships(&rels)?
            } else {
                g.add_node_labels(&workload.label_nodes, &workload.labels)?;
                g.query_labels(&labels)?
            };
            use std::io::Write;
            let stdout = std::io::stdout();
            let mut out = std::io::BufWriter::new(stdout.lock());
            for i in mask.iter_ones() {
                writeln!(out, "{i}")?;
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { edges, seed } => {
            let (src, dst) = dipgraph::gen::generate_random_graph(&GenConfig::new(edges, seed));
            let di = dipgraph::DiGraphIndex::build_from_edges(&src, &dst, true, &Sharding::parallel(1))?;
            let s = di.degree_stats()?;
            println!("n,m,min_in,max_in,avg_in,min_out,max_out,avg_out");
            println!(
                "{},{},{},{},{},{},{},{}",
                di.vertex_count(),
                di.edge_count(),
                s.min_in,
                s.max_in,
                s.avg_in.floor(),
                s.min_out,
                s.max_out,
                s.avg_out.floor()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
