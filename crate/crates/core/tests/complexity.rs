mod common;

use std::time::Instant;

use common::rng;
use dipgraph::{AttributeStore, DipArr, DipList, EntityKind, Sharding};
use rand::Rng;

const K: usize = 50;

/// Each entity gets one or two attributes out of `K`.
fn sparse_history(n: usize, seed: u64) -> (Vec<usize>, Vec<u32>) {
    let mut r = rng(seed);
    let mut ents = Vec::with_capacity(n + n / 2);
    let mut attrs = Vec::with_capacity(n + n / 2);
    for e in 0..n {
        ents.push(e);
        attrs.push(r.gen_range(0..K as u32));
        if r.gen_bool(0.5) {
            ents.push(e);
            attrs.push(r.gen_range(0..K as u32));
        }
    }
    (ents, attrs)
}

fn median_query_secs(store: &dyn AttributeStore, reps: usize) -> f64 {
    let mut t: Vec<f64> = (0..reps)
        .map(|i| {
            let start = Instant::now();
            let mask = store.query_any(&[(i % K) as u32]).unwrap();
            std::hint::black_box(mask);
            start.elapsed().as_secs_f64()
        })
        .collect();
    t.sort_by(f64::total_cmp);
    t[reps / 2]
}

fn r_squared(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

#[test]
fn arr_single_attribute_query_is_linear_in_entities() {
    let sizes = [100_000usize, 1_000_000, 10_000_000];
    let mut times = Vec::new();
    for &n in &sizes {
        let (ents, attrs) = sparse_history(n, n as u64);
        let mut arr = DipArr::new(n, K, EntityKind::Edge, Sharding::sequential(1));
        arr.insert_bulk(&ents, &attrs).unwrap();
        drop((ents, attrs));
        times.push(median_query_secs(&arr, 51));
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let r2 = r_squared(&xs, &times);
    eprintln!("arr query times {times:?} r2 {r2:.4}");
    assert!(r2 >= 0.95, "r2 {r2} for times {times:?}");
}

#[test]
fn sparse_list_is_smaller_than_a_byte_matrix() {
    let n = 1_000_000;
    let (ents, attrs) = sparse_history(n, 3);
    let mut list = DipList::new(n, K, EntityKind::Vertex, Sharding::sequential(1));
    list.insert_bulk(&ents, &attrs).unwrap();
    let mut arr = DipArr::new(n, K, EntityKind::Vertex, Sharding::sequential(1));
    arr.insert_bulk(&ents, &attrs).unwrap();
    let byte_matrix = n * K;
    let (lb, ab) = (list.logical_bytes(), arr.logical_bytes());
    eprintln!(
        "list {lb} B, packed arr {ab} B ({:.2}x), byte matrix {byte_matrix} B ({:.2}x)",
        lb as f64 / ab as f64,
        lb as f64 / byte_matrix as f64
    );
    assert!(lb < byte_matrix);
    // packed rows cost K bits per entity no matter how sparse
    assert_eq!(ab, K * n.div_ceil(64) * 8);
}
