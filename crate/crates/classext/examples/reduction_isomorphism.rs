//! C(A,B) ≅ C(A_red, B_red): nilpotents change nothing, verified through an
//! explicit lift rather than an abstract diagram chase.
//!
//! The instance crosses a nontrivial group: A = O_{−36} ⊕ M inside
//! B = Z[i] ⊕ M with M = Z[i]/3.  Each class of C(O_{−36}, Z[i]) ≅ Z/2 is
//! lifted through L̄ ↦ L̄ ⊕ L̄M, checked invertible over (A, B), and
//! projected back to exactly the class it came from.
//!
//! ```text
//! cargo run -p classext --example reduction_isomorphism
//! ```

use classext::classgrp::{reduction_map_finite, reduction_map_ideal_over_order};
use classext::corpus::{random_idealization_pair, Rng};
use classext::intlat::IntMatrix;
use num_bigint::BigInt;

fn main() {
    let j3 = IntMatrix::from_rows(vec![
        vec![BigInt::from(3), BigInt::from(0)],
        vec![BigInt::from(0), BigInt::from(3)],
    ]);
    let report = reduction_map_ideal_over_order(&BigInt::from(-36), &BigInt::from(-4), j3).unwrap();
    println!("{}", report.to_string_canonical());
    assert!(report.pass());

    // Finite idealization pairs: same machinery, trivial class groups.
    let mut rng = Rng::new(11);
    for _ in 0..3 {
        let ext = random_idealization_pair(&mut rng, 128).unwrap();
        let r = reduction_map_finite(&ext).unwrap();
        println!("{}", r.to_string_canonical());
        assert!(r.pass());
    }
}
