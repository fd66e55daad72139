//! The point of the Jordan-center estimator: on trees, the sources preferred
//! by the exact maximum-likelihood-path oracle are always Jordan infection
//! centers. This example samples random small trees and snapshots and shows
//! the containment holding case after case.
//!
//! ```sh
//! cargo run --example oracle_vs_jordan
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sis_source::verify::sample_boundary_safe_case;
use sis_source::{exhaustive_oracle_estimate, jordan_centers, SisParams};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..10 {
        let (g, vi) = sample_boundary_safe_case(&mut rng);
        let jordan = jordan_centers(&g, &vi).unwrap();
        let p = SisParams::new(0.5).unwrap();
        let oracle = exhaustive_oracle_estimate(&g, &vi, &p, 3).unwrap();
        let contained = oracle.candidates.iter().all(|c| jordan.candidates.contains(c));
        println!(
            "case {case}: n = {:<2} |vi| = {:<2} oracle {:?} within jordan {:?} -> {}",
            g.node_count(),
            vi.len(),
            oracle.candidates,
            jordan.candidates,
            if contained { "yes" } else { "NO" },
        );
        assert!(contained);
    }
}
