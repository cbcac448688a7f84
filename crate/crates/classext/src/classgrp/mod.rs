//! Invertibility, principality, class groups `G(A,B)` and `C(A,B)`, the
//! semi-local principalization algorithm, and the elementwise verifiers for
//! the exact sequences and vanishing theorems.
//!
//! Every `InvertibleIdeal` carries a certificate `1 = Σ x_k·y_k` with
//! `x_k ∈ L`, `y_k ∈ L⁻¹`; the verifiers consume exactly these certificates,
//! which keeps failures debuggable and every verdict constructive.

mod verify;

pub use verify::*;

use crate::error::{Error, Result};
use crate::extensions::{Elt, Extension, QuadAmbient, SubRepr, Submodule};
use crate::intlat::{self, IntMatrix};
use crate::quadforms::{self, Bqf};
use crate::rings::algebra::ZLattice;
use crate::rings::quad::QuadLat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Ambient-size bound for exhaustive invertible-ideal enumeration; the
/// CLASSEXT_MAX_ENUM environment variable overrides it.
pub fn max_enum() -> u64 {
    std::env::var("CLASSEXT_MAX_ENUM")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(512)
}

/// Ring-structure scans (nilradicals, maximal ideals) go up to this size.
pub const STRUCTURE_BOUND: u64 = 4096;

/// Safety valve for submodule closure enumeration.
const SUBMODULE_BUDGET: usize = 20000;

/// An invertible ideal of an extension, with its inverse and a certificate
/// `1 = Σ x_k·y_k`.
#[derive(Clone, Debug)]
pub struct InvertibleIdeal {
    pub module: Submodule,
    pub inverse: Submodule,
    pub certificate: Vec<(Elt, Elt)>,
}

fn elt_mul(ext: &Extension, a: &Elt, b: &Elt) -> Elt {
    match (a, b) {
        (Elt::Quad(x), Elt::Quad(y)) => Elt::Quad(x.mul(y)),
        (Elt::Alg(x), Elt::Alg(y)) => Elt::Alg(ext.algebra().expect("alg ext").mul_elt(x, y)),
        _ => unreachable!("mixed element families"),
    }
}

fn elt_add(ext: &Extension, a: &Elt, b: &Elt) -> Elt {
    match (a, b) {
        (Elt::Quad(x), Elt::Quad(y)) => Elt::Quad(x.add(y)),
        (Elt::Alg(x), Elt::Alg(y)) => Elt::Alg(ext.algebra().expect("alg ext").add_elt(x, y)),
        _ => unreachable!("mixed element families"),
    }
}

fn elt_is_zero(ext: &Extension, a: &Elt) -> bool {
    match a {
        Elt::Quad(x) => x.is_zero(),
        Elt::Alg(x) => ext.algebra().expect("alg ext").is_zero_coords(x),
    }
}

fn elt_scale_int(a: &Elt, z: &BigInt) -> Elt {
    match a {
        Elt::Quad(x) => Elt::Quad(x.scale(z, &BigInt::one())),
        Elt::Alg(x) => Elt::Alg(x.iter().map(|c| c * z).collect()),
    }
}

/// Express `1 = Σ z_ij · x_i·y_j` over the generator products and fold into
/// certificate pairs `(Σ_i z_ij x_i, y_j)`.
fn build_certificate(ext: &Arc<Extension>, xs: &[Elt], ys: &[Elt]) -> Result<Vec<(Elt, Elt)>> {
    let one = ext.one_elt();
    let solve = |products: &[Elt]| -> Option<Vec<BigInt>> {
        match &ext.kind {
            crate::extensions::ExtensionKind::Quad { .. } => {
                // Scale all products to a common denominator.
                let quads: Vec<_> = products
                    .iter()
                    .map(|p| match p {
                        Elt::Quad(q) => q.clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                let mut den = BigInt::one();
                for q in &quads {
                    den = den.lcm(&q.w);
                }
                let rows: Vec<Vec<BigInt>> = quads
                    .iter()
                    .map(|q| {
                        let s = &den / &q.w;
                        vec![&q.u * &s, &q.v * &s]
                    })
                    .collect();
                let m = IntMatrix::from_rows(rows);
                intlat::solve_mod(&m, &[den.clone(), BigInt::zero()], 0)
            }
            crate::extensions::ExtensionKind::Alg { ambient, .. } => {
                let mut rows: Vec<Vec<BigInt>> = products
                    .iter()
                    .map(|p| match p {
                        Elt::Alg(x) => x.clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                let k = rows.len();
                rows.extend(ambient.mods_rows());
                let m = IntMatrix::from_rows(rows);
                intlat::solve_mod(&m, &ambient.one, 0).map(|z| z[..k].to_vec())
            }
        }
    };
    let mut products = Vec::new();
    for x in xs {
        for y in ys {
            products.push(elt_mul(ext, x, y));
        }
    }
    let z = solve(&products).ok_or_else(|| {
        Error::NotInvertible("1 is not a combination of generator products".into())
    })?;
    let mut pairs = Vec::new();
    for (j, y) in ys.iter().enumerate() {
        let mut u: Option<Elt> = None;
        for (i, x) in xs.iter().enumerate() {
            let zij = &z[i * ys.len() + j];
            if zij.is_zero() {
                continue;
            }
            let term = elt_scale_int(x, zij);
            u = Some(match u {
                None => term,
                Some(acc) => elt_add(ext, &acc, &term),
            });
        }
        if let Some(u) = u {
            if !elt_is_zero(ext, &u) {
                pairs.push((u, y.clone()));
            }
        }
    }
    // The certificate must sum to exactly 1.
    let mut acc: Option<Elt> = None;
    for (x, y) in &pairs {
        let term = elt_mul(ext, x, y);
        acc = Some(match acc {
            None => term,
            Some(a) => elt_add(ext, &a, &term),
        });
    }
    let total = acc.ok_or_else(|| Error::NotInvertible("empty certificate".into()))?;
    if total != one {
        return Err(Error::NotInvertible("certificate does not sum to 1".into()));
    }
    Ok(pairs)
}

/// Compute `C = {b : Lb ⊆ A}` and return the certificate-carrying
/// invertible ideal iff `L·C = A`; also checks `LB = B`, which must hold
/// whenever `L` is invertible.
pub fn try_invertible(l: &Submodule) -> Result<Option<InvertibleIdeal>> {
    if l.is_zero() {
        return Err(Error::ZeroModule);
    }
    let inv = l.colon_into_a()?;
    let prod = l.mul(&inv)?;
    let unit = l.ext.unit_ideal();
    if !prod.equals(&unit)? {
        return Ok(None);
    }
    // LB = B whenever L is invertible (ambient-order and finite cases).
    if let Some(lb) = l.extend_to_ambient() {
        let amb = l.ext.ambient_module().expect("lattice ambient");
        if !lb.equals(&amb)? {
            return Err(Error::NotInvertible(
                "L·C = A but LB ≠ B; inconsistent state".into(),
            ));
        }
    }
    let certificate = build_certificate(&l.ext, &l.gens(), &inv.gens())?;
    Ok(Some(InvertibleIdeal {
        module: l.clone(),
        inverse: inv,
        certificate,
    }))
}

/// Elements of a finite-family submodule, in deterministic order.
fn lattice_elements(l: &Submodule) -> Result<Vec<Elt>> {
    let SubRepr::Alg(lat) = &l.repr else {
        return Err(Error::EnumerationImpossible(
            "cannot enumerate a quadratic-family module".into(),
        ));
    };
    let alg = l.ext.algebra().expect("alg ext");
    Ok(lat
        .elements(alg, max_enum())?
        .into_iter()
        .map(Elt::Alg)
        .collect())
}

/// Principality test.  Quadratic field ambient: form reduction with
/// generator recovery.  Ambient order or finite family: scan for a unit
/// generator.  Any returned `g` satisfies `A·g = L` and `g ∈ B*`.
pub fn is_principal(l: &InvertibleIdeal) -> Result<Option<Elt>> {
    let ext = &l.module.ext;
    match &ext.kind {
        crate::extensions::ExtensionKind::Quad { amb, .. } => match amb {
            QuadAmbient::Field => Ok(quadforms::principal_generator(&l.module)?.map(Elt::Quad)),
            QuadAmbient::Order(_) => {
                for u in ext.ambient_units(max_enum())? {
                    let cand = ext.unit_ideal().scale(&u)?;
                    if cand.equals(&l.module)? {
                        return Ok(Some(u));
                    }
                }
                Ok(None)
            }
        },
        crate::extensions::ExtensionKind::Alg { ambient, .. } => {
            for x in lattice_elements(&l.module)? {
                let Elt::Alg(coords) = &x else { unreachable!() };
                if !ambient.is_unit(coords) {
                    continue;
                }
                let cand = ext.unit_ideal().scale(&x)?;
                if cand.equals(&l.module)? {
                    return Ok(Some(x));
                }
            }
            Ok(None)
        }
    }
}

/// Maximal ideals of the subring `A` of a finite-family extension, as
/// lattices in ambient coordinates.
pub fn maximal_ideals_of_sub(ext: &Arc<Extension>) -> Result<Vec<Submodule>> {
    let ambient = ext
        .algebra()
        .ok_or_else(|| Error::UnsupportedExtension("finite family required".into()))?;
    let sub = ext.sub_lattice().expect("alg ext");
    let restricted = crate::extensions::restrict_algebra(ambient, sub)?;
    let ideals = crate::rings::maximal_ideals(&restricted.alg, STRUCTURE_BOUND)?;
    let mut out = Vec::new();
    for m in ideals {
        let rows: Vec<_> = m
            .gens(&restricted.alg)
            .into_iter()
            .map(|z| crate::extensions::from_sub_coords(ambient, &restricted.basis_rows, &z))
            .collect();
        out.push(Submodule {
            ext: ext.clone(),
            repr: SubRepr::Alg(ZLattice::from_rows(ambient, rows)),
        });
    }
    out.sort_by_key(|m| m.repr_key());
    Ok(out)
}

/// Semi-local principalization, following the constructive proof: for each
/// maximal ideal `M_k` pick `x_k ∈ L`, `y_k ∈ L⁻¹` with `x_k·y_k ∉ M_k`,
/// pick `a_k ∈ ∩_{i≠k} M_i` with `a_k ∉ M_k`, set `y = Σ a_i·y_i`, verify
/// `L·(A·y) = A`, and return `g = y⁻¹` with `L = A·g`.
pub fn principalize_semilocal(l: &InvertibleIdeal, maxideals: &[Submodule]) -> Result<Elt> {
    let ext = &l.module.ext;
    let ambient = ext.algebra().ok_or_else(|| {
        Error::UnsupportedExtension("semi-local principalization needs the finite family".into())
    })?;
    validate_maximal_ideal_list(ext, maxideals)?;
    let n = maxideals.len();
    let l_elts = lattice_elements(&l.module)?;
    let inv_elts = lattice_elements(&l.inverse)?;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for mk in maxideals {
        let mut found = None;
        'search: for x in &l_elts {
            for y in &inv_elts {
                let p = elt_mul(ext, x, y);
                if !mk.contains(&p)? {
                    found = Some((x.clone(), y.clone()));
                    break 'search;
                }
            }
        }
        let (x, y) = found.ok_or_else(|| {
            Error::NotInvertible(format!(
                "no product of L·L⁻¹ avoids the maximal ideal {}",
                mk.repr_key()
            ))
        })?;
        xs.push(x);
        ys.push(y);
    }
    // a_k ∈ ∩_{i≠k} M_i with a_k ∉ M_k; intersection over the empty family
    // is A itself.
    let mut a_elts = Vec::with_capacity(n);
    for k in 0..n {
        let mut inter: Option<ZLattice> = None;
        for (i, mi) in maxideals.iter().enumerate() {
            if i == k {
                continue;
            }
            let SubRepr::Alg(ml) = &mi.repr else {
                unreachable!()
            };
            inter = Some(match inter {
                None => ml.clone(),
                Some(acc) => ZLattice {
                    basis: intlat::lattice_intersect(&acc.basis, &ml.basis),
                },
            });
        }
        let inter = match inter {
            Some(x) => Submodule {
                ext: ext.clone(),
                repr: SubRepr::Alg(x),
            },
            None => ext.unit_ideal(),
        };
        let mut found = None;
        for cand in lattice_elements(&inter)? {
            if !maxideals[k].contains(&cand)? {
                found = Some(cand);
                break;
            }
        }
        a_elts.push(found.ok_or_else(|| {
            Error::MaximalIdealListInvalid(format!(
                "∩_(i≠{k}) M_i is contained in M_{k}; ideals are not distinct maximal"
            ))
        })?);
    }
    let mut y: Option<Elt> = None;
    for k in 0..n {
        let term = elt_mul(ext, &a_elts[k], &ys[k]);
        y = Some(match y {
            None => term,
            Some(acc) => elt_add(ext, &acc, &term),
        });
    }
    let y = y.ok_or_else(|| Error::MaximalIdealListInvalid("empty ideal list".into()))?;
    // L·(A·y) must be A.
    let ay = ext.unit_ideal().scale(&y)?;
    let ly = l.module.mul(&ay)?;
    if !ly.equals(&ext.unit_ideal())? {
        return Err(Error::NotInvertible("L·(A·y) ≠ A".into()));
    }
    let Elt::Alg(yc) = &y else { unreachable!() };
    let g = ambient
        .try_inverse(yc)
        .map(Elt::Alg)
        .ok_or_else(|| Error::NotInvertible("y is not a unit of B".into()))?;
    // Validate the output: A·g = L and g ∈ B*.
    let ag = ext.unit_ideal().scale(&g)?;
    if !ag.equals(&l.module)? {
        return Err(Error::NotInvertible(
            "A·y⁻¹ ≠ L after principalization".into(),
        ));
    }
    Ok(g)
}

fn validate_maximal_ideal_list(ext: &Arc<Extension>, maxideals: &[Submodule]) -> Result<()> {
    let ambient = ext.algebra().expect("alg ext");
    let sub = ext.sub_lattice().expect("alg ext");
    let expected = maximal_ideals_of_sub(ext)?;
    let mut got: Vec<String> = maxideals.iter().map(|m| m.repr_key()).collect();
    got.sort();
    let want: Vec<String> = expected.iter().map(|m| m.repr_key()).collect();
    if got != want {
        return Err(Error::MaximalIdealListInvalid(format!(
            "supplied list {:?} does not match the maximal ideals {:?}",
            got, want
        )));
    }
    // Union must be exactly the non-units of A.
    for a in sub.elements(ambient, max_enum())? {
        let is_unit = ambient.is_unit(&a);
        let covered = maxideals.iter().any(|m| {
            let SubRepr::Alg(ml) = &m.repr else {
                unreachable!()
            };
            ml.contains(&a)
        });
        if is_unit == covered {
            return Err(Error::MaximalIdealListInvalid(format!(
                "element {a:?}: unit={is_unit} but covered={covered}"
            )));
        }
    }
    Ok(())
}

/// A class-group element's canonical representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassRep {
    Form(Bqf),
    Module(Submodule),
}

impl ClassRep {
    pub fn key(&self) -> String {
        match self {
            ClassRep::Form(f) => format!("{f}"),
            ClassRep::Module(m) => m.repr_key(),
        }
    }
}

/// A finite abelian group of ideal classes: cyclic invariant factors,
/// generator classes, the full element list, and a discrete-log table.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    /// `d₁ | d₂ | …`, all > 1; empty for the trivial group.
    pub factors: Vec<BigInt>,
    pub generators: Vec<ClassRep>,
    pub elements: Vec<ClassRep>,
    /// canonical representative key → exponent vector over `factors`.
    pub dlog: BTreeMap<String, Vec<i64>>,
}

impl ClassGroup {
    pub fn order(&self) -> BigInt {
        self.factors.iter().product::<BigInt>().max(BigInt::one())
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn trivial(identity: ClassRep) -> ClassGroup {
        let mut dlog = BTreeMap::new();
        dlog.insert(identity.key(), Vec::new());
        ClassGroup {
            factors: Vec::new(),
            generators: Vec::new(),
            elements: vec![identity],
            dlog,
        }
    }

    pub fn exponents_of(&self, rep: &ClassRep) -> Option<&Vec<i64>> {
        self.dlog.get(&rep.key())
    }
}

/// Compute the structure of a finite abelian group presented by a complete
/// element list and a multiplication closure, via SNF of the relation
/// lattice of `Z^n → G`.
pub fn abelian_structure<T, FM, FK>(
    elements: &[T],
    identity: &T,
    mul: FM,
    key: FK,
    to_rep: impl Fn(&T) -> ClassRep,
) -> Result<ClassGroup>
where
    T: Clone,
    FM: Fn(&T, &T) -> Result<T>,
    FK: Fn(&T) -> String,
{
    let n = elements.len();
    if n == 0 {
        return Err(Error::EnumerationImpossible("empty element list".into()));
    }
    let index: BTreeMap<String, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (key(e), i))
        .collect();
    if index.len() != n {
        return Err(Error::EnumerationImpossible(
            "duplicate canonical representatives".into(),
        ));
    }
    let id_idx = *index
        .get(&key(identity))
        .ok_or_else(|| Error::EnumerationImpossible("identity not in element list".into()))?;
    // Relation rows of Z^n → G: ε_id and ε_i + ε_j − ε_{i∘j}.
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n * n + 1);
    let mut row = vec![BigInt::zero(); n];
    row[id_idx] = BigInt::one();
    rows.push(row);
    for i in 0..n {
        for j in i..n {
            let p = mul(&elements[i], &elements[j])?;
            let k = *index.get(&key(&p)).ok_or_else(|| {
                Error::EnumerationImpossible("product escapes the element list".into())
            })?;
            let mut row = vec![BigInt::zero(); n];
            row[i] += BigInt::one();
            row[j] += BigInt::one();
            row[k] -= BigInt::one();
            rows.push(row);
        }
    }
    let rel = IntMatrix::from_rows(rows);
    let full = intlat::snf_ext(&rel);
    let t = rel.rows().min(n);
    let mut kept: Vec<(usize, BigInt)> = Vec::new();
    for i in 0..n {
        let d = if i < t {
            full.s.get(i, i).clone()
        } else {
            BigInt::zero()
        };
        if d.is_zero() {
            return Err(Error::EnumerationImpossible(
                "relation lattice is not full rank; element list incomplete".into(),
            ));
        }
        if !d.is_one() {
            kept.push((i, d));
        }
    }
    // Generator of the factor at kept position i: ∏_k elements[k]^{v_inv[i][k]}.
    // Every element's order divides the group order, so exponents are
    // reduced modulo it first; SNF transform entries can be large.
    let group_order: BigInt = kept.iter().map(|(_, d)| d.clone()).product();
    let pow = |x: &T, e: &BigInt| -> Result<T> {
        let e_red = e.mod_floor(&group_order);
        let steps = e_red.to_u64_digits().1.first().copied().unwrap_or(0);
        let mut acc = identity.clone();
        for _ in 0..steps {
            acc = mul(&acc, x)?;
        }
        Ok(acc)
    };
    let mut generators = Vec::new();
    let mut gen_elts: Vec<T> = Vec::new();
    for (i, _) in &kept {
        let mut g = identity.clone();
        for k in 0..n {
            let e = full.v_inv.get(*i, k);
            if !e.is_zero() {
                g = mul(&g, &pow(&elements[k], e)?)?;
            }
        }
        generators.push(to_rep(&g));
        gen_elts.push(g);
    }
    // Discrete-log table over the generator basis.
    let factors: Vec<BigInt> = kept.iter().map(|(_, d)| d.clone()).collect();
    let mut dlog = BTreeMap::new();
    let mut reps = Vec::new();
    let mut stack: Vec<(usize, T, Vec<i64>)> = vec![(0, identity.clone(), Vec::new())];
    while let Some((pos, acc, exps)) = stack.pop() {
        if pos == factors.len() {
            dlog.insert(key(&acc), exps.clone());
            reps.push(to_rep(&acc));
            continue;
        }
        let d = factors[pos].to_u64_digits().1.first().copied().unwrap_or(1) as i64;
        let mut cur = acc.clone();
        for e in 0..d {
            let mut ex = exps.clone();
            ex.push(e);
            stack.push((pos + 1, cur.clone(), ex));
            if e + 1 < d {
                cur = mul(&cur, &gen_elts[pos])?;
            }
        }
    }
    if dlog.len() != n {
        return Err(Error::EnumerationImpossible(format!(
            "group order mismatch: enumerated {} classes but table has {}",
            n,
            dlog.len()
        )));
    }
    let mut elements_out: Vec<ClassRep> = elements.iter().map(&to_rep).collect();
    elements_out.sort_by_key(|r| r.key());
    let _ = reps;
    Ok(ClassGroup {
        factors,
        generators,
        elements: elements_out,
        dlog,
    })
}

/// The form class group of discriminant `d`: the classical realization of
/// both `C(O_D)` and `Pic(O_D)`.
pub fn class_group_quad(d: &BigInt) -> Result<ClassGroup> {
    let forms = quadforms::reduced_forms(d)?;
    let identity = Bqf::principal(d)?;
    abelian_structure(
        &forms,
        &identity,
        quadforms::compose,
        |f| format!("{f}"),
        |f| ClassRep::Form(f.clone()),
    )
}

/// All A-submodules of `B` for a finite-family extension: cyclic modules
/// first, then closure under sums.
pub fn all_submodules(ext: &Arc<Extension>) -> Result<Vec<Submodule>> {
    let ambient = ext
        .algebra()
        .ok_or_else(|| Error::EnumerationImpossible("finite family required".into()))?;
    let elts = ambient.elements(max_enum())?;
    let mut set: BTreeMap<String, Submodule> = BTreeMap::new();
    let mut queue: Vec<Submodule> = Vec::new();
    for e in elts {
        let m = Submodule::from_gens(ext, &[Elt::Alg(e)])?;
        let k = m.repr_key();
        if let std::collections::btree_map::Entry::Vacant(e) = set.entry(k) {
            e.insert(m.clone());
            queue.push(m);
        }
    }
    while let Some(m) = queue.pop() {
        let snapshot: Vec<Submodule> = set.values().cloned().collect();
        for other in snapshot {
            let s = m.sum(&other)?;
            let k = s.repr_key();
            if !set.contains_key(&k) {
                if set.len() >= SUBMODULE_BUDGET {
                    return Err(Error::SizeBoundExceeded(format!(
                        "more than {SUBMODULE_BUDGET} submodules"
                    )));
                }
                set.insert(k, s.clone());
                queue.push(s);
            }
        }
    }
    Ok(set.into_values().collect())
}

/// All invertible ideals of a finite-family extension.
pub fn enumerate_invertible(ext: &Arc<Extension>) -> Result<Vec<InvertibleIdeal>> {
    let mut out = Vec::new();
    for m in all_submodules(ext)? {
        if m.is_zero() {
            continue;
        }
        if let Some(inv) = try_invertible(&m)? {
            out.push(inv);
        }
    }
    Ok(out)
}

/// Canonical representative of the class of `L` in `C(A,B)`: the
/// lexicographically minimal representation among `{L·(A·u) : u ∈ B*}`.
pub fn class_canonical_rep(l: &Submodule, units: &[Elt]) -> Result<Submodule> {
    let mut best: Option<Submodule> = None;
    for u in units {
        let cand = l.scale(u)?;
        best = Some(match best {
            None => cand,
            Some(b) if cand.repr_key() < b.repr_key() => cand,
            Some(b) => b,
        });
    }
    best.ok_or_else(|| Error::EnumerationImpossible("no units supplied".into()))
}

/// The class group of an extension, with one representative invertible
/// ideal per class.
pub struct ExtensionClassGroup {
    pub group: ClassGroup,
    /// One certificate-carrying member per class, aligned with the sorted
    /// class-representative keys of `group.elements`.
    pub members: BTreeMap<String, InvertibleIdeal>,
}

/// `C(A,B)` with explicit members.
///
/// * `O_D ⊆ K`: the full form class group, every class witnessed by its
///   reduced-form ideal.
/// * `O_{f²D₀} ⊆ O_{D₀}`-style order pairs: the kernel of
///   `Pic(A) → Pic(B)`, realized constructively through kernel witnesses.
/// * finite family: exhaustive enumeration and quotient by principals.
pub fn class_group_extension(ext: &Arc<Extension>) -> Result<ExtensionClassGroup> {
    match &ext.kind {
        crate::extensions::ExtensionKind::Quad { amb, .. } => match amb {
            QuadAmbient::Field => {
                let d = ext.quad_sub_disc().expect("quad");
                let group = class_group_quad(&d)?;
                let mut members = BTreeMap::new();
                for rep in &group.elements {
                    let ClassRep::Form(f) = rep else {
                        unreachable!()
                    };
                    let l = quadforms::form_to_ideal(f, ext)?;
                    let inv = try_invertible(&l)?.ok_or_else(|| {
                        Error::NotInvertible(format!("form ideal {f} not invertible"))
                    })?;
                    members.insert(rep.key(), inv);
                }
                Ok(ExtensionClassGroup { group, members })
            }
            QuadAmbient::Order(_) => kernel_class_group(ext),
        },
        crate::extensions::ExtensionKind::Alg { .. } => {
            let invertibles = enumerate_invertible(ext)?;
            let units = ext.ambient_units(max_enum())?;
            let mut class_reps: BTreeMap<String, Submodule> = BTreeMap::new();
            for ideal in &invertibles {
                let rep = class_canonical_rep(&ideal.module, &units)?;
                class_reps.entry(rep.repr_key()).or_insert(rep);
            }
            let reps: Vec<Submodule> = class_reps.values().cloned().collect();
            let identity = class_canonical_rep(&ext.unit_ideal(), &units)?;
            let units2 = units.clone();
            let group = abelian_structure(
                &reps,
                &identity,
                |a, b| class_canonical_rep(&a.mul(b)?, &units2),
                |m| m.repr_key(),
                |m| ClassRep::Module(m.clone()),
            )?;
            let mut members = BTreeMap::new();
            for rep in &reps {
                let inv = try_invertible(rep)?.ok_or_else(|| {
                    Error::NotInvertible("class representative not invertible".into())
                })?;
                members.insert(rep.repr_key(), inv);
            }
            Ok(ExtensionClassGroup { group, members })
        }
    }
}

/// Kernel realization of `C(A,B)` for an order-in-order extension: classes
/// of `Pic(A)` whose scalar extension to `B` is principal, each witnessed by
/// an actual invertible ideal of `(A, B)` built from the generator.
fn kernel_class_group(ext: &Arc<Extension>) -> Result<ExtensionClassGroup> {
    let d_a = ext.quad_sub_disc().expect("quad");
    let QuadAmbient::Order(fb) = ext.quad_amb().expect("quad") else {
        unreachable!()
    };
    let d0 = ext.quad_d0().expect("quad").clone();
    let d_b = fb * fb * &d0;
    let pic_a = class_group_quad(&d_a)?;
    let ext_ak = Extension::quad(&d_a, None)?;
    let ext_bk = Extension::quad(&d_b, None)?;
    let tower = crate::extensions::TowerExtension::quad(&d_a, &d_b, None)?;

    let mut kernel_forms: Vec<Bqf> = Vec::new();
    let mut members: BTreeMap<String, InvertibleIdeal> = BTreeMap::new();
    for rep in &pic_a.elements {
        let ClassRep::Form(f) = rep else {
            unreachable!()
        };
        let l = quadforms::form_to_ideal(f, &ext_ak)?;
        let lb = tower.extend_scalars(&l)?;
        let lb_over_bk = Submodule {
            ext: ext_bk.clone(),
            repr: lb.repr.clone(),
        };
        if let Some(x) = quadforms::principal_generator(&lb_over_bk)? {
            // Kernel class: build the witness L₁ = {b ∈ B : bx ∈ L}.
            let witness = kernel_witness_quad(ext, &l, &Elt::Quad(x))?;
            kernel_forms.push(f.clone());
            members.insert(rep.key(), witness);
        }
    }
    let identity = Bqf::principal(&d_a)?;
    let group = abelian_structure(
        &kernel_forms,
        &identity,
        quadforms::compose,
        |f| format!("{f}"),
        |f| ClassRep::Form(f.clone()),
    )?;
    Ok(ExtensionClassGroup { group, members })
}

/// `L₁ = {b ∈ B : b·x ∈ L}` for a quadratic-family `L ⊆ K` with
/// `LB = Bx`, verified invertible over `(A, B)` with `L₁·x = L`.
pub fn kernel_witness_quad(
    ext_ab: &Arc<Extension>,
    l: &Submodule,
    x: &Elt,
) -> Result<InvertibleIdeal> {
    let Elt::Quad(x) = x else {
        return Err(Error::UnsupportedExtension(
            "quadratic witness required".into(),
        ));
    };
    let SubRepr::Quad(lat) = &l.repr else {
        return Err(Error::UnsupportedExtension(
            "quadratic witness required".into(),
        ));
    };
    let QuadAmbient::Order(fb) = ext_ab.quad_amb().ok_or(Error::ParentMismatch)? else {
        return Err(Error::UnsupportedExtension(
            "the target extension must have an order ambient".into(),
        ));
    };
    let d0 = ext_ab.quad_d0().expect("quad");
    let xinv = x.inv().ok_or(Error::ZeroModule)?;
    let shifted = lat.scale_elt(&xinv);
    let b_lat = QuadLat::order(d0, fb);
    let l1 = shifted.intersect(&b_lat);
    let sub = Submodule {
        ext: ext_ab.clone(),
        repr: SubRepr::Quad(l1.clone()),
    };
    // L₁·x must recover L exactly.
    let back = l1.scale_elt(x);
    if back != *lat {
        return Err(Error::NotInvertible(
            "kernel witness does not satisfy L₁·x = L".into(),
        ));
    }
    try_invertible(&sub)?
        .ok_or_else(|| Error::NotInvertible("kernel witness is not invertible over (A,B)".into()))
}

/// Structure of a subgroup of `parent` spanned by the classes in `member_keys`.
pub fn subgroup_structure(parent: &ClassGroup, member_keys: &[String]) -> Result<Vec<BigInt>> {
    let r = parent.factors.len();
    if r == 0 {
        return Ok(Vec::new());
    }
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for k in member_keys {
        let v = parent
            .dlog
            .get(k)
            .ok_or_else(|| Error::EnumerationImpossible(format!("unknown class {k}")))?;
        rows.push(v.iter().map(|&e| BigInt::from(e)).collect());
    }
    for (i, d) in parent.factors.iter().enumerate() {
        let mut row = vec![BigInt::zero(); r];
        row[i] = d.clone();
        rows.push(row);
    }
    let span = intlat::hnf(&IntMatrix::from_rows(rows))
        .h
        .without_zero_rows();
    // Relation matrix of the diag lattice inside the span basis.
    let mut rel_rows = Vec::new();
    for (i, d) in parent.factors.iter().enumerate() {
        let mut row = vec![BigInt::zero(); r];
        row[i] = d.clone();
        let z = intlat::back_substitute(&span, &row)
            .ok_or_else(|| Error::EnumerationImpossible("diag outside span".into()))?;
        rel_rows.push(z);
    }
    let s = intlat::snf(&IntMatrix::from_rows(rel_rows)).s;
    let mut factors = Vec::new();
    for i in 0..s.rows().min(s.cols()) {
        let d = s.get(i, i);
        if !d.is_one() && !d.is_zero() {
            factors.push(d.clone());
        }
    }
    factors.sort();
    Ok(factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extensions::TowerExtension;
    use crate::rings::{f4, product, zn, ZLattice};

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn qe(d0: i64, u: i64, v: i64, w: i64) -> Elt {
        Elt::Quad(crate::rings::QuadElt::new(bi(d0), bi(u), bi(v), bi(w)))
    }

    fn coords(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| bi(x)).collect()
    }

    #[test]
    fn invertible_with_certificate() {
        // L = (2, 1+√−5): certificate 1 = (1+√−5)·(1−√−5)/2 − 2·1.
        let ext = Extension::quad(&bi(-20), None).unwrap();
        let l = Submodule::from_gens(&ext, &[qe(-20, 2, 0, 1), qe(-20, 11, 1, 1)]).unwrap();
        let inv = try_invertible(&l).unwrap().unwrap();
        assert!(inv.inverse.contains(&qe(-20, -9, -1, 2)).unwrap());
        // Certificate sums to one exactly (validated inside); spot-check the
        // arithmetic identity (1+√−5)(1−√−5) = 6.
        let a = crate::rings::QuadElt::new(bi(-20), bi(11), bi(1), bi(1));
        let b = a.conj();
        assert_eq!(a.mul(&b), crate::rings::QuadElt::from_int(&bi(-20), 6));
    }

    #[test]
    fn unit_multiple_is_invertible() {
        let ext = Extension::quad(&bi(-20), None).unwrap();
        let l = ext.unit_ideal().scale(&qe(-20, 10, 1, 1)).unwrap(); // √−5·A
        let inv = try_invertible(&l).unwrap().unwrap();
        let g = is_principal(&inv).unwrap().unwrap();
        let regen = ext.unit_ideal().scale(&g).unwrap();
        assert!(regen.equals(&l).unwrap());
    }

    #[test]
    fn f4_over_f2_not_invertible() {
        // L = F4 over F2 ⊆ F4: colon = 0, not invertible.
        let b = f4();
        let a = ZLattice::from_rows(&b, vec![b.one.clone()]);
        let ext = Extension::alg(b, a, None, "f2f4").unwrap();
        let l = ext.ambient_module().unwrap();
        assert!(try_invertible(&l).unwrap().is_none());
    }

    #[test]
    fn principality_for_nonprincipal_class() {
        let ext = Extension::quad(&bi(-20), None).unwrap();
        let l = Submodule::from_gens(&ext, &[qe(-20, 2, 0, 1), qe(-20, 11, 1, 1)]).unwrap();
        let inv = try_invertible(&l).unwrap().unwrap();
        assert!(is_principal(&inv).unwrap().is_none());
        // (2) = 2·A is principal with generator 2.
        let two = ext.unit_ideal().scale(&qe(-20, 2, 0, 1)).unwrap();
        let inv2 = try_invertible(&two).unwrap().unwrap();
        let g = is_principal(&inv2).unwrap().unwrap();
        let regen = ext.unit_ideal().scale(&g).unwrap();
        assert!(regen.equals(&two).unwrap());
    }

    #[test]
    fn principalize_z6() {
        // A = B = Z/6, L = A·5 → 5.
        let ext = Extension::alg_identity(zn(6), "z6").unwrap();
        let l = ext.unit_ideal().scale(&Elt::Alg(coords(&[5]))).unwrap();
        let inv = try_invertible(&l).unwrap().unwrap();
        let ms = maximal_ideals_of_sub(&ext).unwrap();
        assert_eq!(ms.len(), 2);
        let g = principalize_semilocal(&inv, &ms).unwrap();
        let regen = ext.unit_ideal().scale(&g).unwrap();
        assert!(regen.equals(&l).unwrap());
        assert_eq!(g, Elt::Alg(coords(&[5])));
    }

    #[test]
    fn principalize_identity_class_diag() {
        // A = Z/2 diag ⊆ B = Z/2 × Z/2, L = A → (1,1).
        let b = product(&[zn(2), zn(2)]).unwrap();
        let a = ZLattice::from_rows(&b, vec![b.one.clone()]);
        let ext = Extension::alg(b, a, None, "z2diag").unwrap();
        let l = ext.unit_ideal();
        let inv = try_invertible(&l).unwrap().unwrap();
        let ms = maximal_ideals_of_sub(&ext).unwrap();
        let g = principalize_semilocal(&inv, &ms).unwrap();
        assert_eq!(g, Elt::Alg(coords(&[1, 1])));
    }

    #[test]
    fn quad_class_groups() {
        let g20 = class_group_quad(&bi(-20)).unwrap();
        assert_eq!(g20.factors, vec![bi(2)]);
        let g23 = class_group_quad(&bi(-23)).unwrap();
        assert_eq!(g23.factors, vec![bi(3)]);
        let g4 = class_group_quad(&bi(-4)).unwrap();
        assert!(g4.is_trivial());
        assert_eq!(g4.order(), bi(1));
    }

    #[test]
    fn class_group_of_field_extension_matches_forms() {
        let ext = Extension::quad(&bi(-20), None).unwrap();
        let cg = class_group_extension(&ext).unwrap();
        assert_eq!(cg.group.factors, vec![bi(2)]);
        assert_eq!(cg.members.len(), 2);
        for inv in cg.members.values() {
            // Inverse uniqueness: stored inverse equals the colon.
            let colon = inv.module.colon_into_a().unwrap();
            assert!(colon.equals(&inv.inverse).unwrap());
        }
    }

    #[test]
    fn kernel_class_group_conductor_3() {
        // Z+3Z[i] ⊆ Z[i]: kernel = Z/2, both classes extend to principal.
        let ext = Extension::quad(&bi(-36), Some(&bi(-4))).unwrap();
        let cg = class_group_extension(&ext).unwrap();
        assert_eq!(cg.group.factors, vec![bi(2)]);
        assert_eq!(cg.members.len(), 2);
        for inv in cg.members.values() {
            // Member really is an ideal of (A, Z[i]) with certificate.
            assert!(!inv.certificate.is_empty());
        }
    }

    #[test]
    fn finite_class_group_trivial() {
        // F2 ⊆ F4: C trivial, G of order 3.
        let b = f4();
        let a = ZLattice::from_rows(&b, vec![b.one.clone()]);
        let ext = Extension::alg(b, a, None, "f2f4").unwrap();
        let cg = class_group_extension(&ext).unwrap();
        assert!(cg.group.is_trivial());
        let g = enumerate_invertible(&ext).unwrap();
        assert_eq!(g.len(), 3);
    }

    #[test]
    fn recover_kernel_witness_example() {
        // L = 2Z + (−1+3i)Z over (O(−36), K); LB = (1+i)Z[i];
        // witness L₁ over (O(−36), Z[i]) with L₁·(1+i) = L.
        let ext_ab = Extension::quad(&bi(-36), Some(&bi(-4))).unwrap();
        let ext_ak = Extension::quad(&bi(-36), None).unwrap();
        let l = Submodule::from_gens(&ext_ak, &[qe(-4, 2, 0, 1), qe(-4, 5, 3, 1)]).unwrap();
        let x = qe(-4, 3, 1, 1); // 1+i
        let w = kernel_witness_quad(&ext_ab, &l, &x).unwrap();
        // The witness is invertible over (A,B) and L₁·x = L was verified.
        assert!(!w.certificate.is_empty());
        // And its colon equals its stored inverse (uniqueness).
        let colon = w.module.colon_into_a().unwrap();
        assert!(colon.equals(&w.inverse).unwrap());
    }

    #[test]
    fn tower_legs_agree() {
        let tower = TowerExtension::quad(&bi(-36), &bi(-4), None).unwrap();
        let ab = class_group_extension(&tower.ab).unwrap();
        let ac = class_group_extension(&tower.ac).unwrap();
        let bc = class_group_extension(&tower.bc).unwrap();
        assert_eq!(ab.group.factors, vec![bi(2)]);
        assert_eq!(ac.group.factors, vec![bi(2)]);
        assert!(bc.group.is_trivial());
    }

    #[test]
    fn subgroup_structure_of_kernel() {
        let parent = class_group_quad(&bi(-20)).unwrap();
        let keys: Vec<String> = parent.dlog.keys().cloned().collect();
        let sub = subgroup_structure(&parent, &keys).unwrap();
        assert_eq!(sub, vec![bi(2)]);
        let only_id = subgroup_structure(&parent, &[]).unwrap();
        assert!(only_id.is_empty());
    }
}

#[cfg(test)]
mod conductor_tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn qe(d0: i64, u: i64, v: i64, w: i64) -> Elt {
        Elt::Quad(crate::rings::QuadElt::new(bi(d0), bi(u), bi(v), bi(w)))
    }

    /// The conductor-touching ideal (2, 1+√−3) of Z[√−3] = O(−12) is not
    /// invertible there, while the same generators over the maximal order
    /// O(−3) span the principal ideal 2·O.
    #[test]
    fn conductor_ideal_is_not_invertible() {
        // √−3 = 3 + 2ω₀ over D₀ = −3, so 1+√−3 has coordinates (4, 2).
        let ext12 = Extension::quad(&bi(-12), None).unwrap();
        let l = Submodule::from_gens(&ext12, &[qe(-3, 2, 0, 1), qe(-3, 4, 2, 1)]).unwrap();
        assert!(try_invertible(&l).unwrap().is_none());
        // Its colon product lands strictly inside the order.
        let colon = l.colon_into_a().unwrap();
        let prod = l.mul(&colon).unwrap();
        assert!(!prod.equals(&ext12.unit_ideal()).unwrap());
        assert!(prod.subset(&ext12.unit_ideal()).unwrap());

        let ext3 = Extension::quad(&bi(-3), None).unwrap();
        let m = Submodule::from_gens(&ext3, &[qe(-3, 2, 0, 1), qe(-3, 4, 2, 1)]).unwrap();
        let inv = try_invertible(&m).unwrap().unwrap();
        let g = is_principal(&inv).unwrap().unwrap();
        let regen = ext3.unit_ideal().scale(&g).unwrap();
        assert!(regen.equals(&m).unwrap());
    }

    /// Avoidance in the quadratic family: containment verdicts only; a
    /// single containing cover is returned by index.
    #[test]
    fn avoidance_quad_single_cover() {
        let ext = Extension::quad(&bi(-20), None).unwrap();
        let l = Submodule::from_gens(&ext, &[qe(-20, 2, 0, 1), qe(-20, 11, 1, 1)]).unwrap();
        let a = ext.unit_ideal();
        let verdict = avoidance_check(&l, &[a.clone(), l.clone()]).unwrap();
        assert_eq!(verdict, AvoidanceVerdict::ContainedIn(0));
        // Proper sub-ideals never contain L, and coverage cannot be
        // confirmed from generators alone: NotACover.
        let small = l.mul(&l).unwrap();
        let verdict = avoidance_check(&l, &[small]).unwrap();
        assert_eq!(verdict, AvoidanceVerdict::NotACover);
    }
}

#[cfg(test)]
mod principal_unit_tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn qe(u: i64, v: i64) -> Elt {
        Elt::Quad(crate::rings::QuadElt::new(bi(-4), bi(u), bi(v), bi(1)))
    }

    /// `A·b` is invertible over `(A, B)` exactly when `b ∈ B*`, and then
    /// the inverse is `A·b⁻¹`.
    #[test]
    fn principal_iff_unit_generator() {
        let ext = Extension::quad(&bi(-36), Some(&bi(-4))).unwrap();
        // i = 2 + ω₀ is a unit of Z[i]: A·i is invertible with inverse
        // A·i⁻¹ = A·(−i) = A·i.
        let ai = ext.unit_ideal().scale(&qe(2, 1)).unwrap();
        let inv = try_invertible(&ai).unwrap().unwrap();
        let minus_i = qe(-2, -1);
        let expected_inverse = ext.unit_ideal().scale(&minus_i).unwrap();
        assert!(inv.inverse.equals(&expected_inverse).unwrap());
        assert!(is_principal(&inv).unwrap().is_some());
        // 2 is not a unit of Z[i]: A·2 is not invertible over (A, B)
        // (its extension 2·Z[i] is a proper ideal of B).
        let a2 = ext.unit_ideal().scale(&qe(2, 0)).unwrap();
        assert!(try_invertible(&a2).unwrap().is_none());
    }

    /// Group-law soundness on a nontrivial kernel class group: member
    /// products land in the composed class.
    #[test]
    fn kernel_members_respect_the_group_law() {
        let ext = Extension::quad(&bi(-36), Some(&bi(-4))).unwrap();
        let cg = class_group_extension(&ext).unwrap();
        assert_eq!(cg.group.factors, vec![bi(2)]);
        let units = ext.ambient_units(max_enum()).unwrap();
        let identity_key = class_canonical_rep(&ext.unit_ideal(), &units)
            .unwrap()
            .repr_key();
        let members: Vec<&InvertibleIdeal> = cg.members.values().collect();
        let id_member = members
            .iter()
            .find(|m| class_canonical_rep(&m.module, &units).unwrap().repr_key() == identity_key)
            .expect("identity class has a member");
        // Products with the identity member stay in their own class; the
        // square of the nontrivial member lands in the identity class.
        for m in &members {
            let prod = m.module.mul(&id_member.module).unwrap();
            let key = class_canonical_rep(&prod, &units).unwrap().repr_key();
            let own = class_canonical_rep(&m.module, &units).unwrap().repr_key();
            assert_eq!(key, own, "multiplying by the identity class moved a class");
        }
        let nontrivial = members
            .iter()
            .find(|m| class_canonical_rep(&m.module, &units).unwrap().repr_key() != identity_key)
            .expect("Z/2 has a nontrivial class");
        let sq = nontrivial.module.mul(&nontrivial.module).unwrap();
        let sq_key = class_canonical_rep(&sq, &units).unwrap().repr_key();
        assert_eq!(sq_key, identity_key, "order-2 class squared is not trivial");
    }
}
