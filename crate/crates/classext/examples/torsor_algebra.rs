//! The one-step torsor algebra A(L) = ⊕_{|n| ≤ N} Lⁿ in which an invertible
//! ideal acquires an inverse.
//!
//! For the non-principal L = (2, 1+√−5) of Z[√−5] the degree-(±1)
//! components multiply to the degree-0 component A, with an explicit
//! certificate 1 = Σ x_k·y_k; L is therefore an invertible ideal of the
//! extension A ⊆ A(L) and its class dies in Pic(A(L)).  A homogeneous
//! degree-1 unit would mean L is principal — the bounded search finds none
//! here, and finds one immediately for the principal ideal (√−5).
//!
//! ```text
//! cargo run -p classext --example torsor_algebra
//! ```

use classext::extensions::{Elt, Extension, Submodule};
use classext::rings::quad::QuadElt;
use classext::torsor::build_torsor;
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
    // 1 + √−5 has coordinates (11, 1) over {1, ω₀}.
    let l = Submodule::from_gens(&ext, &[qe(2, 0, 1), qe(11, 1, 1)]).unwrap();
    let t = build_torsor(&l, 3).unwrap();
    println!("components of A(L), N = 3:");
    for (deg, lat) in &t.components {
        let (n, d) = lat.norm_rel(&BigInt::from(1));
        println!("  degree {deg:>2}: lattice of norm {n}/{d}");
    }
    t.check_power_law().unwrap();
    t.check_commutativity().unwrap();
    let cert = t.check_vanishing().unwrap();
    println!("\nvanishing certificate in degrees ±1:");
    let mut total = QuadElt::zero(&BigInt::from(-20));
    for (x, y) in &cert {
        println!("  ({x}) · ({y}) = {}", x.mul(y));
        total = total.add(&x.mul(y));
    }
    println!("  sum = {total}");

    println!("\ndegree-1 unit search up to height 20:");
    println!(
        "  non-principal L: {:?}",
        t.graded_unit_search(1, 20).unwrap()
    );
    let p = ext.unit_ideal().scale(&qe(10, 1, 1)).unwrap();
    let tp = build_torsor(&p, 3).unwrap();
    println!(
        "  principal (√−5): {:?}",
        tp.graded_unit_search(1, 20).unwrap()
    );
}
