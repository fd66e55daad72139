//! Hide a source, let the infection run, then try to recover it from the
//! final snapshot alone with both estimators.
//!
//! ```sh
//! cargo run --example estimate_source
//! ```

use sis_source::seeding::stream_rng;
use sis_source::{
    distance_centrality, jordan_centers, regular_tree, simulate, InfectedSet, SisParams,
};

fn main() {
    let (tree, root) = regular_tree(4, 6).unwrap();
    let p = SisParams::new(0.45).unwrap();

    for seed in 0..5u64 {
        // the snapshot can be empty (everyone recovered); redraw if so
        let mut attempt = 0;
        let snapshot = loop {
            let mut rng = stream_rng(&[seed, attempt]);
            let path = simulate(&tree, root, &p, 4, &mut rng);
            if path.snapshot().infected_count() > 0 {
                break InfectedSet::new(path.snapshot().infected().iter().copied());
            }
            attempt += 1;
        };

        let oip = jordan_centers(&tree, &snapshot).unwrap();
        let dc = distance_centrality(&tree, &snapshot).unwrap();
        let dist = tree.bfs_distances(root);
        println!(
            "seed {seed}: |snapshot| = {:<3} oip -> {} (off by {}), dc -> {} (off by {})",
            snapshot.len(),
            oip.chosen,
            dist[oip.chosen].unwrap(),
            dc.chosen,
            dist[dc.chosen].unwrap(),
        );
    }
    println!("(the true source is node {root} in every run)");
}
