//! Exact fractional-ideal arithmetic in an imaginary quadratic order:
//! canonical HNF representations, products, colon ideals, invertibility
//! certificates, and the form dictionary.
//!
//! ```text
//! cargo run -p classext --example ideal_arithmetic
//! ```

use classext::classgrp::try_invertible;
use classext::extensions::{Elt, Extension, Submodule};
use classext::quadforms::{ideal_to_form, principal_generator};
use classext::rings::quad::QuadElt;
use num_bigint::BigInt;

fn qe(u: i64, v: i64, w: i64) -> Elt {
    Elt::Quad(QuadElt::new(
        BigInt::from(-20),
        BigInt::from(u),
        BigInt::from(v),
        BigInt::from(w),
    ))
}

fn main() {
    let ext = Extension::quad(&BigInt::from(-20), None).unwrap();
    // L = 2Z + (1+√−5)Z, the non-principal ideal of norm 2 in Z[√−5].
    let l = Submodule::from_gens(&ext, &[qe(2, 0, 1), qe(11, 1, 1)]).unwrap();
    println!("L = {:?}", l);
    println!("form of L: {}", ideal_to_form(&l).unwrap().reduce());

    let ideal = try_invertible(&l).unwrap().expect("L is invertible");
    println!("L⁻¹ = {:?}", ideal.inverse);
    print!("certificate: 1 =");
    for (x, y) in &ideal.certificate {
        print!(" + ({x:?})({y:?})");
    }
    println!();

    // L² is principal, generated by 2.
    let sq = l.mul(&l).unwrap();
    let g = principal_generator(&sq).unwrap().expect("L² is principal");
    println!("L² = A·({g})");

    // L itself is not.
    assert!(principal_generator(&l).unwrap().is_none());
    println!("L is not principal: its reduced form is not the identity");
}
