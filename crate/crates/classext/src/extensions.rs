//! Extensions `(A, B)` and the arithmetic of finitely generated
//! A-submodules of `B`: construction, canonical form, membership, sum,
//! product, colon, scalar extension, pushforward.
//!
//! Submodules are canonical by construction (trimmed HNF bases, minimal
//! denominators), so `equals` is representation equality and every
//! downstream group computation is reproducible bit for bit.

use crate::error::{Error, Result};
use crate::intlat::{self, IntMatrix};
use crate::rings::algebra::{Algebra, AlgebraMeta, Coords, LinearMap, ZLattice};
use crate::rings::quad::{make_quad_order, QuadElt, QuadLat};
use crate::rings::{is_subring, units_of_order};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;
use std::sync::Arc;

/// Ambient ring of a quadratic-family extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadAmbient {
    /// The fraction field `Q(√D₀)`.
    Field,
    /// The order of conductor `f` (so `B = Z + f·ω₀Z`).
    Order(BigInt),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExtensionKind {
    Quad {
        d0: BigInt,
        /// Conductor of the subring `A`.
        sub_f: BigInt,
        amb: QuadAmbient,
    },
    Alg {
        ambient: Algebra,
        sub: ZLattice,
    },
}

/// An ordered pair `(A, B)`: an ambient ring with a designated subring.
#[derive(Clone)]
pub struct Extension {
    pub kind: ExtensionKind,
    /// A ring morphism `B → B` with image in `A` fixing `A` pointwise,
    /// when the extension has one (idealizations, truncated polynomials,
    /// group rings, tensor squares).
    pub retraction: Option<LinearMap>,
    pub label: String,
}

impl PartialEq for Extension {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl fmt::Debug for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Extension({})", self.label)
    }
}

impl Extension {
    /// Quadratic-family extension `O_{D_A} ⊆ B` where `B` is the order of
    /// discriminant `D_B` or the fraction field (`amb = None`).
    pub fn quad(d_a: &BigInt, amb: Option<&BigInt>) -> Result<Arc<Extension>> {
        let a = make_quad_order(d_a)?;
        let (amb_kind, label) = match amb {
            None => (QuadAmbient::Field, format!("quad(A=O({d_a}),B=K)")),
            Some(d_b) => {
                let b = make_quad_order(d_b)?;
                if b.d0 != a.d0 {
                    return Err(Error::UnsupportedExtension(format!(
                        "orders of discriminants {d_a} and {d_b} live in different fields"
                    )));
                }
                if !(&a.conductor % &b.conductor).is_zero() {
                    return Err(Error::UnsupportedExtension(format!(
                        "O({d_a}) is not contained in O({d_b})"
                    )));
                }
                (
                    QuadAmbient::Order(b.conductor.clone()),
                    format!("quad(A=O({d_a}),B=O({d_b}))"),
                )
            }
        };
        Ok(Arc::new(Extension {
            kind: ExtensionKind::Quad {
                d0: a.d0,
                sub_f: a.conductor,
                amb: amb_kind,
            },
            retraction: None,
            label,
        }))
    }

    /// Structure-constant-family extension with subring lattice `sub`.
    pub fn alg(
        ambient: Algebra,
        sub: ZLattice,
        retraction: Option<LinearMap>,
        label: impl Into<String>,
    ) -> Result<Arc<Extension>> {
        if !is_subring(&ambient, &sub) {
            return Err(Error::UnsupportedExtension(
                "subring lattice is not a unital subring".into(),
            ));
        }
        if let Some(r) = &retraction {
            validate_retraction(&ambient, &sub, r)?;
        }
        Ok(Arc::new(Extension {
            kind: ExtensionKind::Alg { ambient, sub },
            retraction,
            label: label.into(),
        }))
    }

    /// The trivial extension `R ⊆ R` in the structure-constant family.
    pub fn alg_identity(ambient: Algebra, label: impl Into<String>) -> Result<Arc<Extension>> {
        let full = ZLattice::full(&ambient);
        let retr = LinearMap::identity(ambient.cols());
        Extension::alg(ambient, full, Some(retr), label)
    }

    pub fn same_as(&self, other: &Extension) -> bool {
        self.kind == other.kind
    }

    pub fn is_quad(&self) -> bool {
        matches!(self.kind, ExtensionKind::Quad { .. })
    }

    pub fn quad_d0(&self) -> Option<&BigInt> {
        match &self.kind {
            ExtensionKind::Quad { d0, .. } => Some(d0),
            _ => None,
        }
    }

    /// Discriminant of the subring order in the quadratic family.
    pub fn quad_sub_disc(&self) -> Option<BigInt> {
        match &self.kind {
            ExtensionKind::Quad { d0, sub_f, .. } => Some(sub_f * sub_f * d0),
            _ => None,
        }
    }

    pub fn quad_amb(&self) -> Option<&QuadAmbient> {
        match &self.kind {
            ExtensionKind::Quad { amb, .. } => Some(amb),
            _ => None,
        }
    }

    pub fn algebra(&self) -> Option<&Algebra> {
        match &self.kind {
            ExtensionKind::Alg { ambient, .. } => Some(ambient),
            _ => None,
        }
    }

    pub fn sub_lattice(&self) -> Option<&ZLattice> {
        match &self.kind {
            ExtensionKind::Alg { sub, .. } => Some(sub),
            _ => None,
        }
    }

    /// `Z`-module generators of the subring `A`.
    pub fn a_gens(&self) -> Vec<Elt> {
        match &self.kind {
            ExtensionKind::Quad { d0, sub_f, .. } => vec![
                Elt::Quad(QuadElt::one(d0)),
                Elt::Quad(QuadElt::new(
                    d0.clone(),
                    BigInt::zero(),
                    sub_f.clone(),
                    BigInt::one(),
                )),
            ],
            ExtensionKind::Alg { ambient, sub } => {
                sub.gens(ambient).into_iter().map(Elt::Alg).collect()
            }
        }
    }

    /// The subring as a submodule of the extension (the unit ideal).
    pub fn unit_ideal(self: &Arc<Extension>) -> Submodule {
        match &self.kind {
            ExtensionKind::Quad { d0, sub_f, .. } => Submodule {
                ext: self.clone(),
                repr: SubRepr::Quad(QuadLat::order(d0, sub_f)),
            },
            ExtensionKind::Alg { sub, .. } => Submodule {
                ext: self.clone(),
                repr: SubRepr::Alg(sub.clone()),
            },
        }
    }

    /// The ambient ring as a submodule, when it is itself a lattice.
    pub fn ambient_module(self: &Arc<Extension>) -> Option<Submodule> {
        match &self.kind {
            ExtensionKind::Quad { d0, amb, .. } => match amb {
                QuadAmbient::Field => None,
                QuadAmbient::Order(fb) => Some(Submodule {
                    ext: self.clone(),
                    repr: SubRepr::Quad(QuadLat::order(d0, fb)),
                }),
            },
            ExtensionKind::Alg { ambient, .. } => Some(Submodule {
                ext: self.clone(),
                repr: SubRepr::Alg(ZLattice::full(ambient)),
            }),
        }
    }

    pub fn one_elt(&self) -> Elt {
        match &self.kind {
            ExtensionKind::Quad { d0, .. } => Elt::Quad(QuadElt::one(d0)),
            ExtensionKind::Alg { ambient, .. } => Elt::Alg(ambient.one.clone()),
        }
    }

    pub fn contains_elt(&self, e: &Elt) -> bool {
        match (&self.kind, e) {
            (ExtensionKind::Quad { d0, amb, .. }, Elt::Quad(x)) => {
                if &x.d0 != d0 {
                    return false;
                }
                match amb {
                    QuadAmbient::Field => true,
                    QuadAmbient::Order(fb) => x.in_order(fb),
                }
            }
            (ExtensionKind::Alg { ambient, .. }, Elt::Alg(x)) => x.len() == ambient.cols(),
            _ => false,
        }
    }

    /// Units of the ambient ring, when enumerable (torsion units of an
    /// ambient order, or all units of a finite algebra).
    pub fn ambient_units(&self, bound: u64) -> Result<Vec<Elt>> {
        match &self.kind {
            ExtensionKind::Quad { d0, amb, .. } => match amb {
                QuadAmbient::Field => Err(Error::EnumerationImpossible("K* is infinite".into())),
                QuadAmbient::Order(fb) => {
                    Ok(units_of_order(d0, fb).into_iter().map(Elt::Quad).collect())
                }
            },
            ExtensionKind::Alg { ambient, .. } => {
                let elts = ambient.elements(bound)?;
                Ok(elts
                    .into_iter()
                    .filter(|x| ambient.is_unit(x))
                    .map(Elt::Alg)
                    .collect())
            }
        }
    }
}

fn validate_retraction(ambient: &Algebra, sub: &ZLattice, r: &LinearMap) -> Result<()> {
    let n = ambient.cols();
    if r.m.rows() != n || r.m.cols() != n {
        return Err(Error::InconsistentPresentation(
            "retraction matrix has wrong shape".into(),
        ));
    }
    if ambient.reduce(r.apply(&ambient.one)) != ambient.one {
        return Err(Error::InconsistentPresentation(
            "retraction does not fix 1".into(),
        ));
    }
    for i in 0..n {
        let mut ei = vec![BigInt::zero(); n];
        ei[i] = BigInt::one();
        let fi = ambient.reduce(r.apply(&ei));
        if !sub.contains(&fi) {
            return Err(Error::InconsistentPresentation(
                "retraction image is not inside A".into(),
            ));
        }
        for j in 0..n {
            let mut ej = vec![BigInt::zero(); n];
            ej[j] = BigInt::one();
            let fj = ambient.reduce(r.apply(&ej));
            let lhs = ambient.reduce(r.apply(&ambient.mul[i][j].clone()));
            let rhs = ambient.mul_elt(&fi, &fj);
            if lhs != rhs {
                return Err(Error::InconsistentPresentation(
                    "retraction is not multiplicative".into(),
                ));
            }
        }
    }
    for a in sub.gens(ambient) {
        if ambient.reduce(r.apply(&a)) != a {
            return Err(Error::InconsistentPresentation(
                "retraction does not fix A pointwise".into(),
            ));
        }
    }
    Ok(())
}

/// An element of an extension's ambient ring.
#[derive(Clone, PartialEq, Eq)]
pub enum Elt {
    Quad(QuadElt),
    Alg(Coords),
}

impl fmt::Debug for Elt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elt::Quad(x) => write!(f, "{x}"),
            Elt::Alg(x) => write!(
                f,
                "[{}]",
                x.iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub enum SubRepr {
    Quad(QuadLat),
    Alg(ZLattice),
}

/// A finitely generated A-submodule of `B`, in canonical form.
#[derive(Clone)]
pub struct Submodule {
    pub ext: Arc<Extension>,
    pub repr: SubRepr,
}

impl PartialEq for Submodule {
    fn eq(&self, other: &Self) -> bool {
        self.ext.same_as(&other.ext) && self.repr == other.repr
    }
}

impl Eq for Submodule {}

impl fmt::Debug for Submodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Submodule({})", self.repr_key())
    }
}

impl Submodule {
    /// Smallest A-submodule of `B` containing the generators, in canonical
    /// form.  Saturates the span under multiplication by the A-basis and
    /// iterates until the lattice stabilizes.
    pub fn from_gens(ext: &Arc<Extension>, gens: &[Elt]) -> Result<Submodule> {
        for g in gens {
            if !ext.contains_elt(g) {
                return Err(Error::ElementNotInAmbient(format!("{g:?}")));
            }
        }
        let a_gens = ext.a_gens();
        match &ext.kind {
            ExtensionKind::Quad { d0, .. } => {
                let elts: Vec<QuadElt> = gens
                    .iter()
                    .map(|g| match g {
                        Elt::Quad(x) => x.clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                let mut lat = QuadLat::from_elements(d0, &elts);
                loop {
                    let mut next_elts = lat.basis_elements();
                    for a in &a_gens {
                        let Elt::Quad(a) = a else { unreachable!() };
                        for b in lat.basis_elements() {
                            next_elts.push(a.mul(&b));
                        }
                    }
                    let next = QuadLat::from_elements(d0, &next_elts);
                    if next == lat {
                        break;
                    }
                    lat = next;
                }
                Ok(Submodule {
                    ext: ext.clone(),
                    repr: SubRepr::Quad(lat),
                })
            }
            ExtensionKind::Alg { ambient, .. } => {
                let rows: Vec<Coords> = gens
                    .iter()
                    .map(|g| match g {
                        Elt::Alg(x) => ambient.reduce(x.clone()),
                        _ => unreachable!(),
                    })
                    .collect();
                let mut lat = ZLattice::from_rows(ambient, rows);
                loop {
                    let basis = lat.gens(ambient);
                    let mut next_rows = basis.clone();
                    for a in &a_gens {
                        let Elt::Alg(a) = a else { unreachable!() };
                        for b in &basis {
                            next_rows.push(ambient.mul_elt(a, b));
                        }
                    }
                    let next = ZLattice::from_rows(ambient, next_rows);
                    if next == lat {
                        break;
                    }
                    lat = next;
                }
                Ok(Submodule {
                    ext: ext.clone(),
                    repr: SubRepr::Alg(lat),
                })
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match (&self.repr, &self.ext.kind) {
            (SubRepr::Quad(l), _) => l.is_zero(),
            (SubRepr::Alg(l), ExtensionKind::Alg { ambient, .. }) => l.is_zero_subgroup(ambient),
            _ => unreachable!(),
        }
    }

    /// Deterministic serialization key (used for witness ordering and
    /// discrete-log tables).
    pub fn repr_key(&self) -> String {
        match &self.repr {
            SubRepr::Quad(l) => {
                let rows: Vec<String> = (0..l.basis.rows())
                    .map(|i| format!("{},{}", l.basis.get(i, 0), l.basis.get(i, 1)))
                    .collect();
                format!("q{}|{}", l.den, rows.join(";"))
            }
            SubRepr::Alg(l) => {
                let rows: Vec<String> = (0..l.basis.rows())
                    .map(|i| {
                        l.basis
                            .row(i)
                            .iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .collect();
                rows.join(";")
            }
        }
    }

    pub fn contains(&self, e: &Elt) -> Result<bool> {
        if !self.ext.contains_elt(e) {
            return Ok(false);
        }
        match (&self.repr, e) {
            (SubRepr::Quad(l), Elt::Quad(x)) => Ok(l.contains(x)),
            (SubRepr::Alg(l), Elt::Alg(x)) => Ok(l.contains(x)),
            _ => Err(Error::ParentMismatch),
        }
    }

    pub fn equals(&self, other: &Submodule) -> Result<bool> {
        if !self.ext.same_as(&other.ext) {
            return Err(Error::ParentMismatch);
        }
        Ok(self.repr == other.repr)
    }

    pub fn subset(&self, other: &Submodule) -> Result<bool> {
        if !self.ext.same_as(&other.ext) {
            return Err(Error::ParentMismatch);
        }
        match (&self.repr, &other.repr) {
            (SubRepr::Quad(a), SubRepr::Quad(b)) => Ok(a.subset(b)),
            (SubRepr::Alg(a), SubRepr::Alg(b)) => Ok(a.subset(b)),
            _ => Err(Error::ParentMismatch),
        }
    }

    pub fn sum(&self, other: &Submodule) -> Result<Submodule> {
        if !self.ext.same_as(&other.ext) {
            return Err(Error::ParentMismatch);
        }
        let repr = match (&self.repr, &other.repr) {
            (SubRepr::Quad(a), SubRepr::Quad(b)) => SubRepr::Quad(a.add_lat(b)),
            (SubRepr::Alg(a), SubRepr::Alg(b)) => SubRepr::Alg(a.sum(b)),
            _ => return Err(Error::ParentMismatch),
        };
        Ok(Submodule {
            ext: self.ext.clone(),
            repr,
        })
    }

    /// Module product: canonical form of the span of pairwise products.
    pub fn mul(&self, other: &Submodule) -> Result<Submodule> {
        if !self.ext.same_as(&other.ext) {
            return Err(Error::ParentMismatch);
        }
        let repr = match (&self.repr, &other.repr, &self.ext.kind) {
            (SubRepr::Quad(a), SubRepr::Quad(b), _) => SubRepr::Quad(a.mul_lat(b)),
            (SubRepr::Alg(a), SubRepr::Alg(b), ExtensionKind::Alg { ambient, .. }) => {
                let mut rows = Vec::new();
                for x in a.gens(ambient) {
                    for y in b.gens(ambient) {
                        rows.push(ambient.mul_elt(&x, &y));
                    }
                }
                SubRepr::Alg(ZLattice::from_rows(ambient, rows))
            }
            _ => return Err(Error::ParentMismatch),
        };
        Ok(Submodule {
            ext: self.ext.clone(),
            repr,
        })
    }

    /// Scale by a single element of the ambient ring.
    pub fn scale(&self, x: &Elt) -> Result<Submodule> {
        if !self.ext.contains_elt(x) {
            return Err(Error::ElementNotInAmbient(format!("{x:?}")));
        }
        let repr = match (&self.repr, x, &self.ext.kind) {
            (SubRepr::Quad(l), Elt::Quad(x), _) => SubRepr::Quad(l.scale_elt(x)),
            (SubRepr::Alg(l), Elt::Alg(x), ExtensionKind::Alg { ambient, .. }) => {
                let rows = l
                    .gens(ambient)
                    .into_iter()
                    .map(|g| ambient.mul_elt(&g, x))
                    .collect();
                SubRepr::Alg(ZLattice::from_rows(ambient, rows))
            }
            _ => return Err(Error::ParentMismatch),
        };
        Ok(Submodule {
            ext: self.ext.clone(),
            repr,
        })
    }

    /// `{b ∈ B : self·b ⊆ A}`.
    pub fn colon_into_a(&self) -> Result<Submodule> {
        if self.is_zero() {
            return Err(Error::ZeroModule);
        }
        match (&self.repr, &self.ext.kind) {
            (SubRepr::Quad(l), ExtensionKind::Quad { d0, sub_f, amb }) => {
                let a_lat = QuadLat::order(d0, sub_f);
                let mut col = l.colon(&a_lat);
                if let QuadAmbient::Order(fb) = amb {
                    col = col.intersect(&QuadLat::order(d0, fb));
                }
                Ok(Submodule {
                    ext: self.ext.clone(),
                    repr: SubRepr::Quad(col),
                })
            }
            (SubRepr::Alg(l), ExtensionKind::Alg { ambient, sub }) => {
                let gens = l.gens(ambient);
                let n = ambient.cols();
                // Solve z·M_g ∈ Λ_A for every generator g: stack the
                // constraint blocks and take the integer kernel.
                let h = &sub.basis;
                let k = h.rows();
                let width = gens.len() * n;
                let mut rows: Vec<Vec<BigInt>> = Vec::new();
                for i in 0..n {
                    let mut row = Vec::with_capacity(width);
                    for g in &gens {
                        let mg = ambient.mult_matrix(g);
                        row.extend(mg.row(i).to_vec());
                    }
                    rows.push(row);
                }
                for (gi, _) in gens.iter().enumerate() {
                    for j in 0..k {
                        let mut row = vec![BigInt::zero(); width];
                        for c in 0..n {
                            row[gi * n + c] = -h.get(j, c).clone();
                        }
                        rows.push(row);
                    }
                }
                let stacked = IntMatrix::from_rows(rows);
                let kern = intlat::left_kernel(&stacked);
                let mut out_rows = Vec::new();
                for i in 0..kern.rows() {
                    out_rows.push(kern.row(i)[..n].to_vec());
                }
                Ok(Submodule {
                    ext: self.ext.clone(),
                    repr: SubRepr::Alg(ZLattice::from_rows(ambient, out_rows)),
                })
            }
            _ => unreachable!(),
        }
    }

    /// `self·B` inside the ambient ring, for the `LB = B` test.  Returns
    /// `None` for a field ambient (where `L·K = K` for every nonzero `L`).
    pub fn extend_to_ambient(&self) -> Option<Submodule> {
        let amb = self.ext.ambient_module()?;
        Some(self.mul(&amb).expect("same parent"))
    }

    /// Basis generators as elements.
    pub fn gens(&self) -> Vec<Elt> {
        match (&self.repr, &self.ext.kind) {
            (SubRepr::Quad(l), _) => l.basis_elements().into_iter().map(Elt::Quad).collect(),
            (SubRepr::Alg(l), ExtensionKind::Alg { ambient, .. }) => {
                l.gens(ambient).into_iter().map(Elt::Alg).collect()
            }
            _ => unreachable!(),
        }
    }

    /// Reinterpret a quadratic-family submodule over another extension with
    /// the same underlying field (e.g. view an ideal of `(A, C)` over
    /// `(B, C)`).  The lattice must be a module over the new subring.
    pub fn reparent_quad(&self, new_ext: &Arc<Extension>) -> Result<Submodule> {
        let SubRepr::Quad(_) = &self.repr else {
            return Err(Error::UnsupportedExtension("reparent is quad-only".into()));
        };
        if new_ext.quad_d0() != self.ext.quad_d0() {
            return Err(Error::ParentMismatch);
        }
        let gens: Vec<Elt> = self.gens();
        for g in &gens {
            if !new_ext.contains_elt(g) {
                return Err(Error::ElementNotInAmbient(format!("{g:?}")));
            }
        }
        let out = Submodule::from_gens(new_ext, &gens)?;
        // The lattice must already be a module over the new subring.
        let SubRepr::Quad(old_lat) = &self.repr else {
            unreachable!()
        };
        let SubRepr::Quad(new_lat) = &out.repr else {
            unreachable!()
        };
        if old_lat != new_lat {
            return Err(Error::UnsupportedExtension(
                "lattice is not a module over the new subring".into(),
            ));
        }
        Ok(out)
    }
}

/// A morphism `φ: (A, B) → (A', B')` in the category of extensions,
/// witnessed by the images of the source basis (structure-constant family).
pub struct RingMorphismWitness {
    pub source: Arc<Extension>,
    pub target: Arc<Extension>,
    pub map: LinearMap,
}

impl RingMorphismWitness {
    /// Validate additivity (built in), unitality, multiplicativity,
    /// compatibility with additive orders, and `φ(A) ⊆ A'`.
    pub fn new(
        source: Arc<Extension>,
        target: Arc<Extension>,
        map: LinearMap,
    ) -> Result<RingMorphismWitness> {
        let (
            ExtensionKind::Alg {
                ambient: src,
                sub: src_sub,
            },
            ExtensionKind::Alg {
                ambient: dst,
                sub: dst_sub,
            },
        ) = (&source.kind, &target.kind)
        else {
            return Err(Error::UnsupportedExtension(
                "morphism witnesses are supported in the structure-constant family".into(),
            ));
        };
        let n = src.cols();
        if map.m.rows() != n || map.m.cols() != dst.cols() {
            return Err(Error::InconsistentPresentation(
                "morphism matrix has wrong shape".into(),
            ));
        }
        if dst.reduce(map.apply(&src.one)) != dst.one {
            return Err(Error::InconsistentPresentation("φ(1) ≠ 1".into()));
        }
        for i in 0..n {
            let mut ei = vec![BigInt::zero(); n];
            ei[i] = BigInt::one();
            let fi = dst.reduce(map.apply(&ei));
            if !src.mods[i].is_zero() {
                let scaled: Coords = fi.iter().map(|c| c * &src.mods[i]).collect();
                if !dst.is_zero_coords(&scaled) {
                    return Err(Error::InconsistentPresentation(format!(
                        "mods[{i}]·φ(e{i}) ≠ 0"
                    )));
                }
            }
            for j in 0..n {
                let mut ej = vec![BigInt::zero(); n];
                ej[j] = BigInt::one();
                let fj = dst.reduce(map.apply(&ej));
                let lhs = dst.reduce(map.apply(&src.mul[i][j].clone()));
                let rhs = dst.mul_elt(&fi, &fj);
                if lhs != rhs {
                    return Err(Error::InconsistentPresentation(format!(
                        "φ(e{i}·e{j}) ≠ φ(e{i})·φ(e{j})"
                    )));
                }
            }
        }
        for a in src_sub.gens(src) {
            if !dst_sub.contains(&dst.reduce(map.apply(&a))) {
                return Err(Error::InconsistentPresentation("φ(A) ⊄ A'".into()));
            }
        }
        Ok(RingMorphismWitness {
            source,
            target,
            map,
        })
    }

    pub fn identity(ext: &Arc<Extension>) -> Result<RingMorphismWitness> {
        let Some(alg) = ext.algebra() else {
            return Err(Error::UnsupportedExtension(
                "identity witness needs a structure-constant extension".into(),
            ));
        };
        RingMorphismWitness::new(ext.clone(), ext.clone(), LinearMap::identity(alg.cols()))
    }

    pub fn apply_elt(&self, x: &Coords) -> Coords {
        let dst = self.target.algebra().expect("validated");
        dst.reduce(self.map.apply(x))
    }
}

/// Pushforward `L_φ = A'·φ(L)`, the functorial image of a submodule.
pub fn pushforward(l: &Submodule, phi: &RingMorphismWitness) -> Result<Submodule> {
    if !l.ext.same_as(&phi.source) {
        return Err(Error::ParentMismatch);
    }
    let gens: Vec<Elt> = l
        .gens()
        .into_iter()
        .map(|g| match g {
            Elt::Alg(x) => Elt::Alg(phi.apply_elt(&x)),
            Elt::Quad(_) => unreachable!("witnesses are alg-family"),
        })
        .collect();
    Submodule::from_gens(&phi.target, &gens)
}

/// A tower `A ⊆ B ⊆ C` bundled as its three extensions; the tower's own
/// `B` is the registered intermediate for scalar extension.
pub struct TowerExtension {
    pub ab: Arc<Extension>,
    pub bc: Arc<Extension>,
    pub ac: Arc<Extension>,
}

impl TowerExtension {
    /// Quadratic tower `O_{D_A} ⊆ O_{D_B} ⊆ C` with `C` either a third
    /// order or the fraction field (`d_c = None`).
    pub fn quad(d_a: &BigInt, d_b: &BigInt, d_c: Option<&BigInt>) -> Result<TowerExtension> {
        let ab = Extension::quad(d_a, Some(d_b))?;
        let bc = Extension::quad(d_b, d_c)?;
        let ac = Extension::quad(d_a, d_c)?;
        Ok(TowerExtension { ab, bc, ac })
    }

    /// Structure-constant tower given by two nested subring lattices of a
    /// common ambient algebra.
    pub fn alg(
        ambient: Algebra,
        a: ZLattice,
        b: ZLattice,
        label: impl Into<String>,
    ) -> Result<TowerExtension> {
        if !a.subset(&b) {
            return Err(Error::UnsupportedExtension(
                "A is not contained in B".into(),
            ));
        }
        let label = label.into();
        let sub_b = restrict_algebra(&ambient, &b)?;
        let a_in_b: Vec<Coords> = a
            .gens(&ambient)
            .into_iter()
            .map(|g| to_sub_coords(&sub_b, &g))
            .collect::<Result<_>>()?;
        let ab = Extension::alg(
            sub_b.alg.clone(),
            ZLattice::from_rows(&sub_b.alg, a_in_b),
            None,
            format!("{label}:AB"),
        )?;
        let bc = Extension::alg(ambient.clone(), b, None, format!("{label}:BC"))?;
        let ac = Extension::alg(ambient, a, None, format!("{label}:AC"))?;
        Ok(TowerExtension { ab, bc, ac })
    }

    /// The map `L ↦ L·B` from submodules of `(A, C)` to submodules of
    /// `(B, C)`.
    pub fn extend_scalars(&self, l: &Submodule) -> Result<Submodule> {
        if !l.ext.same_as(&self.ac) {
            return Err(Error::NotIntermediate);
        }
        match (&l.repr, &self.ac.kind) {
            (SubRepr::Quad(lat), ExtensionKind::Quad { d0, .. }) => {
                let ExtensionKind::Quad { sub_f: fb, .. } = &self.bc.kind else {
                    unreachable!()
                };
                let b_lat = QuadLat::order(d0, fb);
                Ok(Submodule {
                    ext: self.bc.clone(),
                    repr: SubRepr::Quad(lat.mul_lat(&b_lat)),
                })
            }
            (SubRepr::Alg(lat), ExtensionKind::Alg { ambient, .. }) => {
                let b = self.bc.sub_lattice().expect("alg tower");
                let mut rows = Vec::new();
                for x in lat.gens(ambient) {
                    for y in b.gens(ambient) {
                        rows.push(ambient.mul_elt(&x, &y));
                    }
                }
                Ok(Submodule {
                    ext: self.bc.clone(),
                    repr: SubRepr::Alg(ZLattice::from_rows(ambient, rows)),
                })
            }
            _ => Err(Error::ParentMismatch),
        }
    }

    /// View a submodule of `(A, B)` as a submodule of `(A, C)` — the
    /// injection leg of the tower (same module, larger ambient).
    pub fn inject_ab_into_ac(&self, l: &Submodule) -> Result<Submodule> {
        if !l.ext.same_as(&self.ab) {
            return Err(Error::ParentMismatch);
        }
        match (&l.repr, &self.ac.kind) {
            (SubRepr::Quad(lat), ExtensionKind::Quad { .. }) => Ok(Submodule {
                ext: self.ac.clone(),
                repr: SubRepr::Quad(lat.clone()),
            }),
            (SubRepr::Alg(lat), ExtensionKind::Alg { ambient, .. }) => {
                // AB lives in B-coordinates; lift back to C-coordinates.
                let b = self.bc.sub_lattice().expect("alg tower");
                let sub_b = restrict_algebra(ambient, b)?;
                let sub_alg = l.ext.algebra().expect("alg");
                let mut rows = Vec::new();
                for g in lat.gens(sub_alg) {
                    rows.push(from_sub_coords(ambient, &sub_b.basis_rows, &g));
                }
                Ok(Submodule {
                    ext: self.ac.clone(),
                    repr: SubRepr::Alg(ZLattice::from_rows(ambient, rows)),
                })
            }
            _ => Err(Error::ParentMismatch),
        }
    }
}

/// A subring lattice turned into a standalone algebra, with conversion data.
pub struct SubAlgebra {
    pub alg: Algebra,
    /// Rows = ambient coordinates of the subalgebra basis.
    pub basis_rows: IntMatrix,
}

/// Present a subring lattice of a finite algebra as an algebra in its own
/// right (basis = HNF basis of the lattice).
pub fn restrict_algebra(ambient: &Algebra, sub: &ZLattice) -> Result<SubAlgebra> {
    if !ambient.is_finite() {
        return Err(Error::UnsupportedRing(
            "restriction of an infinite algebra".into(),
        ));
    }
    if !is_subring(ambient, sub) {
        return Err(Error::UnsupportedExtension(
            "lattice is not a subring".into(),
        ));
    }
    // Additive order of a row: smallest m ≥ 1 with m·row ≡ 0; rows of order
    // 1 are zero as ring elements and are dropped from the basis.
    let row_order = |row: &[BigInt]| -> BigInt {
        let mut m = BigInt::one();
        for (c, mc) in ambient.mods.iter().enumerate() {
            if mc.is_zero() || row[c].is_zero() {
                continue;
            }
            let g = num_integer::Integer::gcd(&row[c], mc);
            let ord = mc / g;
            m = num_integer::Integer::lcm(&m, &ord);
        }
        m
    };
    let mut kept_rows: Vec<Vec<BigInt>> = Vec::new();
    let mut mods = Vec::new();
    for i in 0..sub.basis.rows() {
        let row = sub.basis.row(i).to_vec();
        let m = row_order(&row);
        if !m.is_one() {
            kept_rows.push(row);
            mods.push(m);
        }
    }
    if kept_rows.is_empty() {
        return Err(Error::UnsupportedExtension(
            "subring lattice is additively trivial".into(),
        ));
    }
    let basis = IntMatrix::from_rows(kept_rows);
    let k = basis.rows();
    let to_sub = |x: &Coords| -> Result<Coords> {
        let rows = ambient.mods_rows();
        let work = if rows.is_empty() {
            basis.clone()
        } else {
            basis.stack(&IntMatrix::from_rows(rows))
        };
        let sol = intlat::solve_mod(&work, x, 0)
            .ok_or_else(|| Error::ElementNotInAmbient("element outside subring".into()))?;
        Ok(sol[..k].to_vec())
    };
    let mut mul = vec![vec![vec![BigInt::zero(); k]; k]; k];
    for i in 0..k {
        for j in 0..k {
            let prod = ambient.mul_elt(
                &ambient.reduce(basis.row(i).to_vec()),
                &ambient.reduce(basis.row(j).to_vec()),
            );
            mul[i][j] = to_sub(&prod)?;
        }
    }
    let one = to_sub(&ambient.one)?;
    let mut n = 1u64;
    for m in &mods {
        n = num_integer::lcm(n, m.to_u64_digits().1.first().copied().unwrap_or(1));
    }
    let alg = Algebra::new(
        mods,
        mul,
        one,
        AlgebraMeta::Finite {
            n,
            tag: crate::rings::AlgebraTag::Plain,
        },
    )?;
    Ok(SubAlgebra {
        alg,
        basis_rows: basis,
    })
}

/// Ambient coordinates → subalgebra coordinates.
pub fn to_sub_coords(sub: &SubAlgebra, x: &Coords) -> Result<Coords> {
    let k = sub.basis_rows.rows();
    match intlat::solve_mod(&sub.basis_rows, x, 0) {
        Some(z) => Ok(sub.alg.reduce(z[..k].to_vec())),
        None => {
            // Allow matching modulo the ambient additive orders.
            Err(Error::ElementNotInAmbient("element outside subring".into()))
        }
    }
}

/// Subalgebra coordinates → ambient coordinates, via the subalgebra's
/// basis rows.
pub fn from_sub_coords(ambient: &Algebra, basis_rows: &IntMatrix, z: &Coords) -> Coords {
    let mut out = vec![BigInt::zero(); ambient.cols()];
    for (i, c) in z.iter().enumerate() {
        for (j, o) in out.iter_mut().enumerate() {
            *o += c * basis_rows.get(i, j);
        }
    }
    ambient.reduce(out)
}


#[cfg(test)]
mod lemma_tests {
    use super::*;
    use crate::quadforms::{form_to_ideal, reduced_forms};

    /// Inclusion reverses inverses: for invertible L₁ ⊆ L₂,
    /// colon(L₂) ⊆ colon(L₁); pairs are built as L₁ = L₂·J with J an
    /// integral invertible ideal.
    #[test]
    fn monotone_colon_on_invertible_pairs() {
        for d in [-20i64, -23, -47] {
            let d = num_bigint::BigInt::from(d);
            let ext = Extension::quad(&d, None).unwrap();
            let forms = reduced_forms(&d).unwrap();
            for f in &forms {
                for g in &forms {
                    let l2 = form_to_ideal(f, &ext).unwrap();
                    let j = form_to_ideal(g, &ext).unwrap();
                    let l1 = l2.mul(&j).unwrap();
                    assert!(l1.subset(&l2).unwrap(), "L₂·J ⊄ L₂ for integral J");
                    let c2 = l2.colon_into_a().unwrap();
                    let c1 = l1.colon_into_a().unwrap();
                    assert!(
                        c2.subset(&c1).unwrap(),
                        "colon not antitone at D={d}, {f}, {g}"
                    );
                }
            }
        }
    }
}

#[cfg(test)]
mod scalar_extension_tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn principal_ideals_extend_to_principal() {
        // A·u extends to B₀·u for any unit u of the ambient ring.
        let tower = TowerExtension::quad(&BigInt::from(-36), &BigInt::from(-4), None).unwrap();
        for (u, v) in [(3i64, 1i64), (2, 1), (5, 3)] {
            // Arbitrary nonzero field elements act as units of K.
            let x = Elt::Quad(QuadElt::new(
                BigInt::from(-4),
                BigInt::from(u),
                BigInt::from(v),
                BigInt::from(1),
            ));
            let l = tower.ac.unit_ideal().scale(&x).unwrap();
            let lb = tower.extend_scalars(&l).unwrap();
            let expected = tower.bc.unit_ideal().scale(&x).unwrap();
            assert!(lb.equals(&expected).unwrap());
        }
    }
}
