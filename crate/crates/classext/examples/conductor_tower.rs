//! The tower sequence 0 → C(A,B) → C(A,C) → C(B,C) on
//! Z+3Z[i] ⊆ Z[i] ⊆ Q(i), with the constructive kernel witness.
//!
//! The class of L = 2Z + (−1+3i)Z dies under scalar extension:
//! L·Z[i] = (1+i)Z[i].  The witness L₁ = {b ∈ Z[i] : b(1+i) ∈ L} is an
//! invertible ideal of (A, Z[i]) with L₁·(1+i) = L, certifying that the
//! kernel of the second map is exactly the image of the first.
//!
//! ```text
//! cargo run -p classext --example conductor_tower
//! ```

use classext::classgrp::{recover_kernel_witness, verify_tower};
use classext::extensions::{Elt, Submodule, TowerExtension};
use classext::rings::quad::QuadElt;
use num_bigint::BigInt;

fn qe(u: i64, v: i64) -> Elt {
    // Coordinates over {1, ω₀} with ω₀ = −2 + i for discriminant −4.
    Elt::Quad(QuadElt::new(
        BigInt::from(-4),
        BigInt::from(u),
        BigInt::from(v),
        BigInt::from(1),
    ))
}

fn main() {
    let tower = TowerExtension::quad(&BigInt::from(-36), &BigInt::from(-4), None).unwrap();
    let report = verify_tower(&tower).unwrap();
    println!("{}", report.to_string_canonical());
    assert!(report.pass());

    // −1 + 3i = 5 + 3ω₀ and 1 + i = 3 + ω₀.
    let l = Submodule::from_gens(&tower.ac, &[qe(2, 0), qe(5, 3)]).unwrap();
    let x = qe(3, 1);
    let witness = recover_kernel_witness(&tower, &l, &x).unwrap();
    println!("\nL = {:?}", l);
    println!("witness L1 = {:?} with L1·(1+i) = L", witness.module);
    println!(
        "certificate: 1 expressed through {} pairs in L1 × L1⁻¹",
        witness.certificate.len()
    );
}
