//! Class groups of imaginary quadratic orders from reduced binary
//! quadratic forms.
//!
//! ```text
//! cargo run -p classext --example class_numbers
//! ```

use classext::classgrp::class_group_quad;
use classext::quadforms::reduced_forms;
use num_bigint::BigInt;

fn main() {
    for d in [-4i64, -20, -23, -36, -47, -163] {
        let d = BigInt::from(d);
        let forms = reduced_forms(&d).unwrap();
        let group = class_group_quad(&d).unwrap();
        let structure = if group.is_trivial() {
            "trivial".to_string()
        } else {
            group
                .factors
                .iter()
                .map(|f| format!("Z/{f}"))
                .collect::<Vec<_>>()
                .join(" x ")
        };
        println!("D = {d}: h = {}, structure {structure}", forms.len());
        for f in &forms {
            println!("    reduced form {f}");
        }
    }
}
