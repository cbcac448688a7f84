//! If B retracts onto A, then C(A,B) = 0: every invertible ideal of the
//! extension is principal.
//!
//! Two reads of the same fact:
//! * finite shapes (idealizations, truncated polynomials, group rings) are
//!   swept exhaustively — every invertible candidate turns out principal;
//! * over A = Z[√−5], whose own class group is Z/2, the non-principal ideal
//!   (2, 1+√−5) embedded into A[x]/(x³) (or A[Z/3], or A⊗A) is certified
//!   NOT invertible over the extension: its colon product lands strictly
//!   inside A, as the vanishing theorem demands.
//!
//! ```text
//! cargo run -p classext --example retraction_vanishing
//! ```

use classext::classgrp::{all_submodules, check_retraction_vanishing, try_invertible};
use classext::corpus::{
    embed_order_ideal, over_order_retraction, retraction_extension, OverOrderShape, RetractionShape,
};
use classext::extensions::{Elt, Extension, Submodule};
use classext::rings::quad::QuadElt;
use classext::rings::zn;
use num_bigint::BigInt;

fn main() {
    // Finite family, exhaustive candidates.
    for shape in [
        RetractionShape::Idealization(2),
        RetractionShape::TruncPoly(3),
        RetractionShape::GroupRing(3),
    ] {
        let ext = retraction_extension(&zn(4), shape).unwrap();
        let candidates = all_submodules(&ext).unwrap();
        let (report, outcomes) = check_retraction_vanishing(&ext, &candidates).unwrap();
        let invertible = outcomes.iter().filter(|o| o.invertible).count();
        println!(
            "{}: {} candidates, {} invertible, all principal: {}",
            ext.label,
            outcomes.len(),
            invertible,
            report.pass()
        );
        assert!(report.pass());
    }

    // Over the order Z[√−5].
    let d = BigInt::from(-20);
    let ext_ak = Extension::quad(&d, None).unwrap();
    let nonprincipal = Submodule::from_gens(
        &ext_ak,
        &[
            Elt::Quad(QuadElt::new(d.clone(), 2.into(), 0.into(), 1.into())),
            Elt::Quad(QuadElt::new(d.clone(), 11.into(), 1.into(), 1.into())),
        ],
    )
    .unwrap();
    for shape in [
        OverOrderShape::TruncPoly(3),
        OverOrderShape::GroupRing(3),
        OverOrderShape::TensorSelf,
    ] {
        let ext = over_order_retraction(&d, shape).unwrap();
        let embedded = embed_order_ideal(&ext, &nonprincipal).unwrap();
        let colon = embedded.colon_into_a().unwrap();
        let prod = embedded.mul(&colon).unwrap();
        println!(
            "{}: embedded (2, 1+√−5) invertible? {} (colon product = A? {})",
            ext.label,
            try_invertible(&embedded).unwrap().is_some(),
            prod.equals(&ext.unit_ideal()).unwrap()
        );
        assert!(try_invertible(&embedded).unwrap().is_none());
    }
}
