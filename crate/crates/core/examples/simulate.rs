//! Simulate the SIS process on a regular tree and print the full infection
//! path slot by slot.
//!
//! ```sh
//! cargo run --example simulate
//! ```

use sis_source::seeding::stream_rng;
use sis_source::{regular_tree, simulate, SisParams};

fn main() {
    let degree = 3;
    let t = 4;
    let (tree, root) = regular_tree(degree, t + 1).unwrap();
    let p = SisParams::new(0.55).unwrap();
    let mut rng = stream_rng(&[2024, 1]);

    let path = simulate(&tree, root, &p, t, &mut rng);

    println!(
        "degree-{degree} tree, {} nodes, source {root}, q = {}, {t} slots",
        tree.node_count(),
        p.q()
    );
    print!("{}", path.dump());
    println!(
        "final snapshot: {} infected of {} nodes",
        path.snapshot().infected_count(),
        tree.node_count()
    );
}
