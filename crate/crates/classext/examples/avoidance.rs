//! The avoidance property: an invertible ideal contained in a finite union
//! of submodules is contained in one of them — and the invertibility
//! hypothesis is sharp.
//!
//! ```text
//! cargo run -p classext --example avoidance
//! ```

use classext::classgrp::{avoidance_check, enumerate_invertible, AvoidanceVerdict};
use classext::corpus;
use classext::extensions::{Elt, Submodule};
use num_bigint::BigInt;

fn main() {
    // Invertible ideals of F2 ⊆ F4 against covers drawn from all proper
    // F2-subspaces: every genuine cover forces containment in one piece.
    let ext = corpus::f2_in_f4().unwrap();
    let lines: Vec<Submodule> = [[1i64, 0], [0, 1], [1, 1]]
        .iter()
        .map(|gens| {
            let coords: Vec<BigInt> = gens.iter().map(|&x| BigInt::from(x)).collect();
            Submodule::from_gens(&ext, &[Elt::Alg(coords)]).unwrap()
        })
        .collect();
    for ideal in enumerate_invertible(&ext).unwrap() {
        let verdict = avoidance_check(&ideal.module, &lines).unwrap();
        println!("invertible {:?}: {verdict:?}", ideal.module);
        assert!(matches!(
            verdict,
            AvoidanceVerdict::ContainedIn(_) | AvoidanceVerdict::NotACover
        ));
    }

    // Control: the full module F4 is NOT invertible over F2 ⊆ F4, and the
    // three lines cover it without any one containing it.
    let full = ext.ambient_module().unwrap();
    let verdict = avoidance_check(&full, &lines).unwrap();
    println!("non-invertible F4: {verdict:?}");
    assert_eq!(verdict, AvoidanceVerdict::Violated);
}
