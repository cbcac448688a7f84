//! The two computable ring families: imaginary quadratic orders inside
//! their fraction field, and commutative algebras given by structure
//! constants (finite rings, idealizations, truncated polynomial rings,
//! group rings, tensor squares, and their over-order variants).

pub mod algebra;
pub mod quad;

pub use algebra::{
    decompose_module, f4, group_ring, idealization, is_subring, maximal_ideals, nilradical,
    product, quotient_by_ideal, reduce_ring, subring_closure, tensor_square, trunc_poly, zn,
    Algebra, AlgebraMeta, AlgebraTag, Coords, LinearMap, ModulePresentation, ZLattice,
};
pub use quad::{make_quad_order, units_of_order, QuadElt, QuadLat, QuadOrderDesc};

use crate::error::{Error, Result};
use num_bigint::BigInt;

/// The total ring of fractions of a supported ring.
pub enum TotalFractionRing {
    /// A quadratic order localizes to its fraction field `Q(√D₀)`.
    QuadField { d0: BigInt },
    /// In a finite ring every non-zero-divisor is a unit, so `T(R) = R`
    /// and the embedding is the identity; the fact itself is asserted.
    SameRing,
}

/// `T(R)` with its canonical embedding.
///
/// For a finite ring the claim `T(R) = R` is not assumed: every
/// non-zero-divisor is checked to be a unit by scanning.
pub fn total_fraction_ring(ring: &RingRef<'_>) -> Result<TotalFractionRing> {
    match ring {
        RingRef::QuadOrder(desc) => Ok(TotalFractionRing::QuadField {
            d0: desc.d0.clone(),
        }),
        RingRef::Finite(alg) => {
            if !alg.is_finite() {
                return Err(Error::UnsupportedRing(
                    "total ring of fractions is supported for finite rings and quadratic orders"
                        .into(),
                ));
            }
            for x in alg.elements(crate::classgrp::STRUCTURE_BOUND)? {
                if !alg.is_zero_divisor(&x) && !alg.is_unit(&x) {
                    return Err(Error::UnsupportedRing(format!(
                        "non-zero-divisor {x:?} is not a unit; ring is not its own total fraction ring"
                    )));
                }
            }
            Ok(TotalFractionRing::SameRing)
        }
    }
}

/// A borrowed ring of either family.
pub enum RingRef<'a> {
    QuadOrder(&'a QuadOrderDesc),
    Finite(&'a Algebra),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_fractions_of_order_is_the_field() {
        let desc = make_quad_order(&BigInt::from(-20)).unwrap();
        match total_fraction_ring(&RingRef::QuadOrder(&desc)).unwrap() {
            TotalFractionRing::QuadField { d0 } => assert_eq!(d0, BigInt::from(-20)),
            _ => panic!("expected the field"),
        }
    }

    #[test]
    fn total_fractions_of_finite_rings_is_identity() {
        // Z/6 and the idealization Z/4 ⊕ Z/2: every non-zero-divisor is a
        // unit, verified by scan.
        let z6 = zn(6);
        assert!(matches!(
            total_fraction_ring(&RingRef::Finite(&z6)).unwrap(),
            TotalFractionRing::SameRing
        ));
        let pres = ModulePresentation {
            gens: 1,
            rels: vec![vec![vec![BigInt::from(2)]]],
        };
        let ideal = idealization(&zn(4), &pres).unwrap();
        assert!(matches!(
            total_fraction_ring(&RingRef::Finite(&ideal)).unwrap(),
            TotalFractionRing::SameRing
        ));
    }
}
