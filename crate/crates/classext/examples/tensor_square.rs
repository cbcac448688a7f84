//! C(A,B) = C(A, B⊗_A B): the tensor square adds nothing to the class
//! group, because B ⊆ B⊗_A B retracts through multiplication.
//!
//! ```text
//! cargo run -p classext --example tensor_square
//! ```

use classext::classgrp::verify_tensor_square;
use classext::corpus;
use classext::rings::{tensor_square, ZLattice};

fn main() {
    // The raw construction: F4 ⊗_F2 F4 is a 16-element algebra (it splits
    // as F4 × F4), with both embeddings and the multiplication retraction.
    let b = classext::rings::f4();
    let a = ZLattice::from_rows(&b, vec![b.one.clone()]);
    let t = tensor_square(&b, &a, 512).unwrap();
    println!(
        "F4 ⊗_F2 F4: size {}, idempotents {}",
        t.alg.size().unwrap(),
        t.alg
            .elements(64)
            .unwrap()
            .iter()
            .filter(|x| t.alg.mul_elt(x, x) == **x)
            .count()
    );

    for ext in [corpus::f2_in_f4().unwrap(), corpus::z2_diagonal().unwrap()] {
        let report = verify_tensor_square(&ext).unwrap();
        println!("{}", report.to_string_canonical());
        assert!(report.pass());
    }
}
