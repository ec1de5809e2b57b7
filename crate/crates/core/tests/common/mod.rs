#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dipgraph::oracle::{self, OracleGraph};
use dipgraph::{AnyStore, AttributeStore, Backend, DiGraphIndex, EntityKind, Sharding};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` random edges with endpoint names drawn from `0..name_range`.
pub fn random_edges(rng: &mut impl Rng, m: usize, name_range: u64) -> (Vec<u64>, Vec<u64>) {
    let src = (0..m).map(|_| rng.gen_range(0..name_range)).collect();
    let dst = (0..m).map(|_| rng.gen_range(0..name_range)).collect();
    (src, dst)
}

/// Checks every layout invariant of `g` and compares each adjacency run with
/// the oracle built from the same input.
pub fn check_against_oracle(g: &DiGraphIndex, src: &[u64], dst: &[u64], dedup: bool) -> Result<(), String> {
    let oracle = oracle::oracle_build(src, dst, dedup).map_err(|e| e.to_string())?;
    let (n, m) = (g.vertex_count(), g.edge_count());
    let seg = g.seg();
    if seg.len() != n + 1 || seg[0] != 0 || seg[n] != m {
        return Err(format!("bad seg ends: len {} first {:?} last {:?}", seg.len(), seg.first(), seg.last()));
    }
    if seg.windows(2).any(|w| w[0] > w[1]) {
        return Err("seg decreases".into());
    }
    for e in 1..m {
        let (a, b) = ((g.src()[e - 1], g.dst()[e - 1]), (g.src()[e], g.dst()[e]));
        if a > b || (dedup && a == b) {
            return Err(format!("edges {} and {e} out of order: {a:?} {b:?}", e - 1));
        }
    }
    for u in 0..n {
        if g.src()[seg[u]..seg[u + 1]].iter().any(|&s| s as usize != u) {
            return Err(format!("seg run of {u} holds a foreign source"));
        }
    }
    if g.src().iter().chain(g.dst()).any(|&v| v as usize >= n) {
        return Err("endpoint out of range".into());
    }
    let total: usize = (0..n as u32).map(|u| g.out_degree(u).unwrap()).sum();
    if total != m {
        return Err(format!("degrees sum to {total}, not {m}"));
    }
    let vertices: Vec<u64> = oracle.vertices().into_iter().collect();
    if g.names() != vertices.as_slice() {
        return Err("vertex names differ from oracle vertex set".into());
    }
    for (u, &name) in g.names().iter().enumerate() {
        if g.internal_index_of(name) != Some(u as u32) {
            return Err(format!("name {name} does not map back to {u}"));
        }
        let got: Vec<u64> = g.neighbors(u as u32).unwrap().iter().map(|&v| g.names()[v as usize]).collect();
        if got != oracle.neighbors(name) {
            return Err(format!("neighbors of {name}: {got:?} vs oracle {:?}", oracle.neighbors(name)));
        }
    }
    Ok(())
}

/// Random (entity, attribute) history over `n` entities and `k` attributes.
pub fn random_history(rng: &mut impl Rng, n: usize, k: usize, len: usize) -> (Vec<usize>, Vec<u32>) {
    let ents = (0..len).map(|_| rng.gen_range(0..n)).collect();
    let attrs = (0..len).map(|_| rng.gen_range(0..k as u32)).collect();
    (ents, attrs)
}

pub fn oracle_sets(n: usize, ents: &[usize], attrs: &[u32]) -> Vec<BTreeSet<String>> {
    let mut sets = vec![BTreeSet::new(); n];
    for (&e, &a) in ents.iter().zip(attrs) {
        sets[e].insert(format!("a{a}"));
    }
    sets
}

pub fn stores(n: usize, k: usize, shards: usize) -> Vec<AnyStore> {
    Backend::ALL
        .iter()
        .map(|&b| AnyStore::new(b, n, k, EntityKind::Edge, Sharding::parallel(shards)))
        .collect()
}

/// Inserts the history into all three backends and verifies every answer and
/// every linked-list chain.
pub fn check_history(n: usize, k: usize, shards: usize, ents: &[usize], attrs: &[u32], queries: &[Vec<u32>]) -> Result<(), String> {
    let all = check_equivalence(n, k, shards, ents, attrs, queries)?;
    check_chains(&all, k)
}

/// Inserts the history into all three backends and compares every answer
/// with the string-set oracle. Returns the loaded stores.
pub fn check_equivalence(
    n: usize,
    k: usize,
    shards: usize,
    ents: &[usize],
    attrs: &[u32],
    queries: &[Vec<u32>],
) -> Result<Vec<AnyStore>, String> {
    let sets = oracle_sets(n, ents, attrs);
    let mut all = stores(n, k, shards);
    for s in &mut all {
        s.insert_bulk(ents, attrs).map_err(|e| e.to_string())?;
    }
    for q in queries {
        let names: Vec<String> = q.iter().map(|a| format!("a{a}")).collect();
        let expected = oracle::oracle_query(&sets, &names);
        for s in &all {
            let got = s.query_any(q).map_err(|e| e.to_string())?.to_bools();
            if got != expected {
                return Err(format!("{:?} query {q:?} disagrees with oracle", s.backend()));
            }
        }
    }
    for s in &all {
        for (e, set) in sets.iter().enumerate() {
            let got: BTreeSet<String> = s.attributes_of(e).unwrap().iter().map(|a| format!("a{a}")).collect();
            if &got != set {
                return Err(format!("{:?} attributes_of({e}) = {got:?}, oracle {set:?}", s.backend()));
            }
        }
        let mut counts = BTreeMap::new();
        for set in &sets {
            for a in set {
                *counts.entry(a.clone()).or_insert(0usize) += 1;
            }
        }
        for a in 0..k as u32 {
            let want = counts.get(&format!("a{a}")).copied().unwrap_or(0);
            let got = s.count_entities(a).unwrap();
            if got != want {
                return Err(format!("{:?} count_entities({a}) = {got}, oracle {want}", s.backend()));
            }
        }
    }
    Ok(all)
}

/// Walks every attribute chain of the linked-list stores in `all`.
pub fn check_chains(all: &[AnyStore], k: usize) -> Result<(), String> {
    for s in all {
        if let AnyStore::ListD(d) = s {
            for a in 0..k as u32 {
                let walk = d.verify_chain(a)?;
                if walk.records != d.count_entities(a).unwrap() {
                    return Err(format!("chain {a} length differs from count"));
                }
            }
        }
    }
    Ok(())
}

pub fn oracle_for_graph(src: &[u64], dst: &[u64]) -> OracleGraph {
    oracle::oracle_build(src, dst, true).unwrap()
}
