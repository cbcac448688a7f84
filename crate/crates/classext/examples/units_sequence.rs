//! Counting along 0 → B*/A* → G(A,B) → Pic(A) → Pic(B) on finite
//! extensions: the group of invertible ideals has exactly |B*/A*|·|C(A,B)|
//! elements, and u·A* ↦ A·u hits exactly the principal ones.
//!
//! ```text
//! cargo run -p classext --example units_sequence
//! ```

use classext::classgrp::{enumerate_invertible, verify_units_sequence};
use classext::corpus;

fn main() {
    for ext in [corpus::f2_in_f4().unwrap(), corpus::z2_diagonal().unwrap()] {
        let report = verify_units_sequence(&ext).unwrap();
        println!("{}", report.to_string_canonical());
        assert!(report.pass());
        let g = enumerate_invertible(&ext).unwrap();
        println!("  G(A,B) members:");
        for ideal in &g {
            println!("    {:?}", ideal.module);
        }
    }
}
