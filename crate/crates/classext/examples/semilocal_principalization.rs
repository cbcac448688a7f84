//! Every invertible ideal over a ring with finitely many maximal ideals is
//! principal — constructively.
//!
//! For each maximal ideal M_k the algorithm picks x_k ∈ L, y_k ∈ L⁻¹ with
//! x_k·y_k ∉ M_k and a CRT element a_k ∈ ∩_{i≠k} M_i \ M_k, forms
//! y = Σ a_k·y_k, and returns the unit inverse g = y⁻¹ with L = A·g.
//!
//! ```text
//! cargo run -p classext --example semilocal_principalization
//! ```

use classext::classgrp::{enumerate_invertible, maximal_ideals_of_sub, principalize_semilocal};
use classext::corpus::{random_extension, Rng};

fn main() {
    let mut rng = Rng::new(7);
    for _ in 0..5 {
        let ext = random_extension(&mut rng, 128).unwrap();
        let maximal = maximal_ideals_of_sub(&ext).unwrap();
        let invertibles = match enumerate_invertible(&ext) {
            Ok(v) => v,
            Err(_) => continue,
        };
        println!(
            "{}: {} maximal ideals in A, {} invertible ideals",
            ext.label,
            maximal.len(),
            invertibles.len()
        );
        for ideal in &invertibles {
            let g = principalize_semilocal(ideal, &maximal).unwrap();
            let regen = ext.unit_ideal().scale(&g).unwrap();
            assert!(regen.equals(&ideal.module).unwrap());
            println!("  L = {:?}  =  A·{:?}", ideal.module, g);
        }
    }
}
