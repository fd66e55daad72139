//! Reconstruct the most likely infection history behind a snapshot.
//!
//! Given a candidate source and an observed infected set, the most likely
//! elapsed time is the infection eccentricity, and the optimal path infects
//! every node of the spanning subtree as late as feasibility allows. This
//! example prints the latest schedule and checks the closed-form reasoning
//! against the exact dynamic program.
//!
//! ```sh
//! cargo run --example most_likely_path
//! ```

use sis_source::sis::log_path_probability;
use sis_source::{
    construct_most_likely_path, latest_schedule, optimal_elapsed_time, viterbi_max_path, Graph,
    InfectedSet, SisParams,
};

fn main() {
    // a path graph: 0 - 1 - 2 - ... - 8, snapshot at the ends of the middle
    let edges: Vec<_> = (0..8).map(|i| (i, i + 1)).collect();
    let g = Graph::from_edges(9, &edges).unwrap();
    let vi = InfectedSet::new([2, 6]);
    let source = 4;

    let t = optimal_elapsed_time(&g, source, &vi).unwrap();
    println!("source {source}, snapshot {:?}, best elapsed time t = {t}", vi.members());

    let schedule = latest_schedule(&g, source, t, &vi).unwrap();
    println!("latest feasible first infections:");
    for (node, slot) in &schedule.first_infection {
        println!("  node {node}: slot {slot}");
    }

    let witness = construct_most_likely_path(&g, source, t, &vi).unwrap();
    for q in [0.3, 0.5] {
        let p = SisParams::new(q).unwrap();
        let exact = viterbi_max_path(&g, source, t, &vi, &p).unwrap();
        let lp = log_path_probability(&g, &witness, &p);
        println!(
            "q = {q}: constructed log-prob {lp:.6}, exact maximum {:.6}",
            exact.log_prob
        );
        assert!(lp <= exact.log_prob + 1e-9);
    }
}
