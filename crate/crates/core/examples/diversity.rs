//! Jaccard distances between cores, and the summary figures over a set of
//! them.

use std::collections::BTreeSet;

use ivc_kind::analysis::{core_set, jaccard, overall_dissimilarity, overhead, pairwise_stats};

fn set(xs: &[&'static str]) -> BTreeSet<&'static str> {
    xs.iter().copied().collect()
}

fn main() {
    let cores = [set(&["a", "b"]), set(&["b", "c"]), set(&["a", "b"])];
    println!("d(ab, bc) = {}", jaccard(&cores[0], &cores[1]));
    let stats = pairwise_stats(&cores).unwrap();
    println!("pairwise: min {} max {} mean {} stdev {:.4}", stats.min, stats.max, stats.mean, stats.stdev);
    println!("core set {:?}", core_set(&cores));
    println!("overall dissimilarity {}", overall_dissimilarity(&cores));
    println!("overhead of a 3 s core on a 1 s proof: {:?}%", overhead(3000.0, 1000.0));
}
