//! Deterministic instance generation for the property suites: named small
//! extensions and seeded pseudo-random finite extensions.
//!
//! Randomness comes from a self-contained SplitMix64 stream so that a seed
//! pins the whole corpus bit-for-bit across platforms and releases.

use crate::error::Result;
use crate::extensions::Extension;
use crate::rings::algebra::{
    group_ring, idealization, product, subring_closure, trunc_poly, zn, Algebra, Coords,
    ModulePresentation, ZLattice,
};
use crate::rings::f4;
use num_bigint::BigInt;
use std::sync::Arc;

/// SplitMix64: tiny, seedable, platform-independent.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len() as u64) as usize]
    }
}

/// `F2 ⊆ F4`.
pub fn f2_in_f4() -> Result<Arc<Extension>> {
    let b = f4();
    let a = ZLattice::from_rows(&b, vec![b.one.clone()]);
    Extension::alg(b, a, None, "finite(F2 ⊆ F4)")
}

/// `Z/2` diagonal in `Z/2 × Z/2`.
pub fn z2_diagonal() -> Result<Arc<Extension>> {
    let b = product(&[zn(2), zn(2)])?;
    let a = ZLattice::from_rows(&b, vec![b.one.clone()]);
    Extension::alg(b, a, None, "finite(Z/2 diag ⊆ Z/2×Z/2)")
}

/// A random finite commutative ring of size at most `max_size`.
pub fn random_algebra(rng: &mut Rng, max_size: u64) -> Result<Algebra> {
    for _ in 0..64 {
        let pick = rng.below(7);
        let candidate = match pick {
            0 => zn(*rng.pick(&[2u64, 3, 4, 5, 6, 8, 9, 12, 16])),
            1 => f4(),
            2 => {
                let a = zn(*rng.pick(&[2u64, 3, 4, 8]));
                let b = zn(*rng.pick(&[2u64, 3, 4, 5, 9]));
                product(&[a, b])?
            }
            3 => {
                let base = zn(*rng.pick(&[2u64, 3, 4, 8]));
                let q = BigInt::from(*rng.pick(&[2u64, 3, 4]));
                let pres = ModulePresentation {
                    gens: 1,
                    rels: vec![vec![vec![q]]],
                };
                idealization(&base, &pres)?
            }
            4 => trunc_poly(&zn(*rng.pick(&[2u64, 3, 4])), *rng.pick(&[2usize, 3, 4]))?,
            5 => group_ring(&zn(*rng.pick(&[2u64, 3, 4])), *rng.pick(&[2usize, 3, 4]))?,
            _ => {
                let a = zn(*rng.pick(&[2u64, 3, 4]));
                let b = f4();
                let c = zn(*rng.pick(&[2u64, 5]));
                product(&[a, b, c])?
            }
        };
        if let Some(size) = candidate.size() {
            if size <= BigInt::from(max_size) {
                return Ok(candidate);
            }
        }
    }
    Ok(zn(4))
}

/// A random extension `A ⊆ B`: a random ambient ring together with the
/// subring generated by a few random elements.
pub fn random_extension(rng: &mut Rng, max_size: u64) -> Result<Arc<Extension>> {
    let b = random_algebra(rng, max_size)?;
    let elts = b.elements(max_size)?;
    let mut gens: Vec<Coords> = Vec::new();
    for _ in 0..rng.below(3) {
        gens.push(rng.pick(&elts).clone());
    }
    let a = subring_closure(&b, &gens);
    let label = format!(
        "finite(random |B|={}, |A-basis|={})",
        b.size().map(|s| s.to_string()).unwrap_or_default(),
        a.basis.rows()
    );
    Extension::alg(b, a, None, label)
}

/// A random idealization pair `A = R ⊕ M ⊆ B = R' ⊕ M` with reduced bases
/// `R ⊆ R'`, for the reduction-isomorphism suite.  Returned as the big
/// extension; its ambient carries the idealization tag.
pub fn random_idealization_pair(rng: &mut Rng, max_size: u64) -> Result<Arc<Extension>> {
    for _ in 0..64 {
        // Reduced base rings: fields and products of fields.
        let rp = match rng.below(3) {
            0 => zn(*rng.pick(&[2u64, 3, 5])),
            1 => f4(),
            _ => product(&[zn(*rng.pick(&[2u64, 3])), zn(*rng.pick(&[2u64, 3, 5]))])?,
        };
        let q = BigInt::from(*rng.pick(&[2u64, 3]));
        let rel: Coords = rp.one.iter().map(|c| c * &q).collect();
        let pres = ModulePresentation {
            gens: 1,
            rels: vec![vec![rel]],
        };
        let b = idealization(&rp, &pres)?;
        if b.size().map(|s| s > BigInt::from(max_size)).unwrap_or(true) {
            continue;
        }
        // Subring: R-part generated by random elements, all of M.
        let elts = b.elements(max_size)?;
        let mut gens: Vec<Coords> = Vec::new();
        for _ in 0..=rng.below(2) {
            gens.push(rng.pick(&elts).clone());
        }
        // Always include the module columns.
        for c in rp.cols()..b.cols() {
            let mut m = b.zero_elt();
            m[c] = BigInt::from(1);
            gens.push(m);
        }
        let a = subring_closure(&b, &gens);
        let label = format!(
            "idealization(random |B|={})",
            b.size().map(|s| s.to_string()).unwrap_or_default()
        );
        return Extension::alg(b, a, None, label);
    }
    // Deterministic fallback.
    let rp = zn(3);
    let pres = ModulePresentation {
        gens: 1,
        rels: vec![],
    };
    let b = idealization(&rp, &pres)?;
    let a = ZLattice::full(&b);
    Extension::alg(b, a, None, "idealization(Z/3 ⊕ Z/3)")
}

/// Retraction-carrying extensions over a finite base ring `R`:
/// idealizations, truncated polynomials, and group rings, with the base
/// embedded as `A` and the canonical retraction attached.
pub fn retraction_extension(base: &Algebra, shape: RetractionShape) -> Result<Arc<Extension>> {
    use crate::intlat::IntMatrix;
    use crate::rings::algebra::LinearMap;
    let r = base.cols();
    let (b, label, retr_rows) = match shape {
        RetractionShape::Idealization(q) => {
            let pres = ModulePresentation {
                gens: 1,
                rels: if q == 0 {
                    vec![]
                } else {
                    let rel: Coords = base.one.iter().map(|c| c * BigInt::from(q)).collect();
                    vec![vec![rel]]
                },
            };
            let b = idealization(base, &pres)?;
            // (a, m) ↦ (a, 0).
            let mut rows = Vec::new();
            for i in 0..b.cols() {
                let mut row = vec![BigInt::from(0); b.cols()];
                if i < r {
                    row[i] = BigInt::from(1);
                }
                rows.push(row);
            }
            (b, format!("idealization(R ⊕ R/{q})"), rows)
        }
        RetractionShape::TruncPoly(k) => {
            let b = trunc_poly(base, k)?;
            // x ↦ 0: keep the degree-0 block.
            let mut rows = Vec::new();
            for i in 0..b.cols() {
                let mut row = vec![BigInt::from(0); b.cols()];
                if i < r {
                    row[i] = BigInt::from(1);
                }
                rows.push(row);
            }
            (b, format!("trunc_poly(R[x]/(x^{k}))"), rows)
        }
        RetractionShape::GroupRing(m) => {
            let b = group_ring(base, m)?;
            // Augmentation: g ↦ 1, i.e. each block collapses onto block 0.
            let mut rows = Vec::new();
            for _ in 0..m {
                for i in 0..r {
                    let mut row = vec![BigInt::from(0); b.cols()];
                    row[i] = BigInt::from(1);
                    rows.push(row);
                }
            }
            (b, format!("group_ring(R[Z/{m}])"), rows)
        }
    };
    let mut a_rows = Vec::new();
    for i in 0..r {
        let mut row = vec![BigInt::from(0); b.cols()];
        row[i] = BigInt::from(1);
        a_rows.push(row);
    }
    let a = ZLattice::from_rows(&b, a_rows);
    let retr = LinearMap {
        m: IntMatrix::from_rows(retr_rows),
    };
    Extension::alg(b, a, Some(retr), label)
}

#[derive(Clone, Copy, Debug)]
pub enum RetractionShape {
    /// `R ⊆ R ⊕ R/q` (`q = 0` means the free rank-1 module `R`).
    Idealization(u64),
    /// `R ⊆ R[x]/(x^k)`.
    TruncPoly(usize),
    /// `R ⊆ R[Z/m]` with the augmentation retraction.
    GroupRing(usize),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classgrp;

    #[test]
    fn rng_is_deterministic() {
        let mut a = Rng::new(7);
        let mut b = Rng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn random_extensions_are_valid() {
        let mut rng = Rng::new(42);
        for _ in 0..10 {
            let ext = random_extension(&mut rng, 128).unwrap();
            // A is a subring: unit ideal equals itself under closure.
            let a = ext.unit_ideal();
            assert!(a.mul(&a).unwrap().equals(&a).unwrap());
        }
    }

    #[test]
    fn retraction_shapes_validate() {
        for shape in [
            RetractionShape::Idealization(2),
            RetractionShape::TruncPoly(3),
            RetractionShape::GroupRing(3),
        ] {
            let ext = retraction_extension(&zn(4), shape).unwrap();
            assert!(ext.retraction.is_some());
        }
    }

    #[test]
    fn named_instances() {
        let f = f2_in_f4().unwrap();
        let g = classgrp::enumerate_invertible(&f).unwrap();
        assert_eq!(g.len(), 3);
        let z = z2_diagonal().unwrap();
        let gz = classgrp::enumerate_invertible(&z).unwrap();
        assert_eq!(gz.len(), 1);
    }
}

/// Retraction-carrying algebras over an imaginary quadratic order `O_D`:
/// `O_D[x]/(x^k)`, `O_D[Z/m]`, and `O_D ⊗_Z O_D`, with `A = O_D` embedded
/// as the degree-zero block.
pub fn over_order_retraction(d: &BigInt, shape: OverOrderShape) -> Result<Arc<Extension>> {
    use crate::intlat::IntMatrix;
    use crate::rings::algebra::{
        over_order_group_ring, over_order_tensor_self, over_order_trunc_poly, LinearMap,
    };
    let desc = crate::rings::make_quad_order(d)?;
    let (b, label, retr_rows) = match shape {
        OverOrderShape::TruncPoly(k) => {
            let b = over_order_trunc_poly(&desc, k)?;
            // x ↦ 0: keep the degree-zero block, kill the rest.
            let rows =
                block_projection_rows(b.cols(), |blk| if blk == 0 { Some(0) } else { None }, &desc);
            (b, format!("trunc_poly(O({d})[x]/(x^{k}))"), rows)
        }
        OverOrderShape::GroupRing(m) => {
            let b = over_order_group_ring(&desc, m)?;
            let rows = block_projection_rows(b.cols(), |_| Some(0), &desc);
            (b, format!("group_ring(O({d})[Z/{m}])"), rows)
        }
        OverOrderShape::TensorSelf => {
            let b = over_order_tensor_self(&desc)?;
            // s⊗s' ↦ ss': 1⊗1 ↦ 1, ω⊗1 ↦ ω, 1⊗ω ↦ ω, ω⊗ω ↦ ω².
            let tr = desc.d.clone();
            let nm = (&desc.d * &desc.d - &desc.d) / BigInt::from(4);
            let z = BigInt::from(0);
            let o = BigInt::from(1);
            let rows = vec![
                vec![o.clone(), z.clone(), z.clone(), z.clone()],
                vec![z.clone(), o.clone(), z.clone(), z.clone()],
                vec![z.clone(), o.clone(), z.clone(), z.clone()],
                vec![-nm, tr, z.clone(), z.clone()],
            ];
            (b, format!("tensor_self(O({d})⊗O({d}))"), rows)
        }
    };
    let mut a_rows = Vec::new();
    for i in 0..2 {
        let mut row = vec![BigInt::from(0); b.cols()];
        row[i] = BigInt::from(1);
        a_rows.push(row);
    }
    let a = ZLattice::from_rows(&b, a_rows);
    let retr = LinearMap {
        m: IntMatrix::from_rows(retr_rows),
    };
    Extension::alg(b, a, Some(retr), label)
}

/// Rows sending each 2-column order block either onto the image block given
/// by `target` (identity on block coordinates) or to zero.
fn block_projection_rows(
    cols: usize,
    target: impl Fn(usize) -> Option<usize>,
    _desc: &crate::rings::QuadOrderDesc,
) -> Vec<Vec<BigInt>> {
    let blocks = cols / 2;
    let mut rows = Vec::with_capacity(cols);
    for blk in 0..blocks {
        for j in 0..2 {
            let mut row = vec![BigInt::from(0); cols];
            if let Some(t) = target(blk) {
                row[2 * t + j] = BigInt::from(1);
            }
            rows.push(row);
        }
    }
    rows
}

#[derive(Clone, Copy, Debug)]
pub enum OverOrderShape {
    TruncPoly(usize),
    GroupRing(usize),
    TensorSelf,
}

/// Embed an integral ideal of `O_D ⊆ K` into the degree-zero block of an
/// over-order algebra extension.
pub fn embed_order_ideal(
    over: &Arc<Extension>,
    l: &crate::extensions::Submodule,
) -> Result<crate::extensions::Submodule> {
    use crate::extensions::{Elt, SubRepr, Submodule};
    use crate::rings::algebra::order_elt_to_block;
    let SubRepr::Quad(lat) = &l.repr else {
        return Err(crate::error::Error::UnsupportedExtension(
            "only quadratic ideals embed".into(),
        ));
    };
    let alg = over.algebra().ok_or_else(|| {
        crate::error::Error::UnsupportedExtension("over-order extension required".into())
    })?;
    let mut gens = Vec::new();
    for g in lat.basis_elements() {
        gens.push(Elt::Alg(order_elt_to_block(alg, &g)?));
    }
    Submodule::from_gens(over, &gens)
}
