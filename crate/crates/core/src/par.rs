//! Shard partitioning and the execution policy used by every bulk operation.
//!
//! A [`Sharding`] stands in for a set of locales: entity index ranges are split
//! into `shards` contiguous blocks, and per-shard work runs either on a rayon
//! pool with one worker per shard or inline on the calling thread.

use std::ops::Range;
#[cfg(feature = "parallel")]
use std::{
    collections::HashMap,
    sync::{Arc, Mutex, OnceLock},
};

/// Shard boundaries are rounded to this many entities so that a shard owns
/// whole words of any packed bitmap over the same entities.
pub const SHARD_ALIGN: usize = 64;

#[derive(Clone)]
pub struct Sharding {
    shards: usize,
    #[cfg(feature = "parallel")]
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl std::fmt::Debug for Sharding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Sharding")
            .field("shards", &self.shards)
            .field("parallel", &self.is_parallel())
            .finish()
    }
}

#[cfg(feature = "parallel")]
fn shared_pool(threads: usize) -> Arc<rayon::ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut pools = POOLS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    pools
        .entry(threads)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .thread_name(move |i| format!("shard-{threads}-{i}"))
                    .build()
                    .expect("failed to start shard worker pool"),
            )
        })
        .clone()
}

impl Sharding {
    /// Shards executed on a worker pool of the same size. Without the
    /// `parallel` feature this is identical to [`Sharding::sequential`].
    pub fn parallel(shards: usize) -> Self {
        let shards = shards.max(1);
        Self {
            shards,
            #[cfg(feature = "parallel")]
            pool: Some(shared_pool(shards)),
        }
    }

    /// Same partitioning, every shard processed in turn on the calling thread.
    pub fn sequential(shards: usize) -> Self {
        Self {
            shards: shards.max(1),
            #[cfg(feature = "parallel")]
            pool: None,
        }
    }

    pub fn shards(&self) -> usize {
        self.shards
    }

    pub fn is_parallel(&self) -> bool {
        #[cfg(feature = "parallel")]
        {
            self.pool.is_some()
        }
        #[cfg(not(feature = "parallel"))]
        {
            false
        }
    }

    /// Contiguous, aligned block ranges covering `0..n`. Always returns exactly
    /// `shards()` ranges; trailing ones may be empty.
    pub fn ranges(&self, n: usize) -> Vec<Range<usize>> {
        let per = n.div_ceil(self.shards).next_multiple_of(SHARD_ALIGN).max(SHARD_ALIGN);
        (0..self.shards)
            .map(|s| {
                let start = (s * per).min(n);
                let end = ((s + 1) * per).min(n);
                start..end
            })
            .collect()
    }

    /// Index of the shard owning `entity` under `ranges(n)`.
    pub fn owner(&self, n: usize, entity: usize) -> usize {
        let per = n.div_ceil(self.shards).next_multiple_of(SHARD_ALIGN).max(SHARD_ALIGN);
        (entity / per).min(self.shards - 1)
    }

    /// Runs `f` inside the worker pool, so nested rayon calls use it.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            return pool.install(f);
        }
        f()
    }

    /// Evaluates `f(i)` for `i in 0..count`, results in index order.
    pub fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| (0..count).into_par_iter().map(&f).collect());
        }
        (0..count).map(f).collect()
    }

    /// Consumes `items` with one task per item, results in item order.
    pub fn map_items<T, U, F>(&self, items: Vec<T>, f: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(usize, T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| {
                items
                    .into_par_iter()
                    .enumerate()
                    .map(|(i, item)| f(i, item))
                    .collect()
            });
        }
        items.into_iter().enumerate().map(|(i, item)| f(i, item)).collect()
    }

    pub fn for_each<T, F>(&self, items: Vec<T>, f: F)
    where
        T: Send,
        F: Fn(usize, T) + Sync + Send,
    {
        self.map_items(items, f);
    }

    /// Chunked element-wise map over a slice, preserving order.
    pub fn map_slice<T, U, F>(&self, input: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            let chunk = input.len().div_ceil(self.shards).max(1024);
            return pool.install(|| input.par_chunks(chunk).flat_map_iter(|c| c.iter().map(&f)).collect());
        }
        input.iter().map(f).collect()
    }

    pub fn sort_unstable<T: Ord + Send>(&self, v: &mut [T]) {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            use rayon::prelude::*;
            return pool.install(|| v.par_sort_unstable());
        }
        v.sort_unstable();
    }

    /// Splits `slice` along `ranges` (as produced by [`Sharding::ranges`]).
    pub fn split_mut<'a, T>(ranges: &[Range<usize>], mut slice: &'a mut [T]) -> Vec<&'a mut [T]> {
        let mut parts = Vec::with_capacity(ranges.len());
        let mut offset = 0;
        for r in ranges {
            let (head, tail) = slice.split_at_mut(r.end - offset);
            parts.push(head);
            slice = tail;
            offset = r.end;
        }
        parts
    }

    /// Buckets `(entity, value)` pairs by owning shard, preserving input order
    /// within each bucket. Input chunks are bucketed in parallel and then
    /// concatenated per shard.
    pub fn bucket_pairs<V: Copy + Send + Sync>(
        &self,
        n: usize,
        entities: &[usize],
        values: &[V],
    ) -> Vec<Vec<(usize, V)>> {
        let p = self.shards;
        let chunk = entities.len().div_ceil(p).max(1);
        let partial: Vec<Vec<Vec<(usize, V)>>> = self.map(p, |c| {
            let lo = (c * chunk).min(entities.len());
            let hi = ((c + 1) * chunk).min(entities.len());
            let mut local = vec![Vec::new(); p];
            for i in lo..hi {
                local[self.owner(n, entities[i])].push((entities[i], values[i]));
            }
            local
        });
        let mut out: Vec<Vec<(usize, V)>> = (0..p)
            .map(|s| Vec::with_capacity(partial.iter().map(|l| l[s].len()).sum()))
            .collect();
        for local in partial {
            for (s, bucket) in local.into_iter().enumerate() {
                out[s].extend(bucket);
            }
        }
        out
    }
}

impl Default for Sharding {
    fn default() -> Self {
        Sharding::parallel(1)
    }
}
