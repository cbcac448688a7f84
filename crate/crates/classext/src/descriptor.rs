//! JSON descriptors for rings, extensions, towers and submodules.
//!
//! All integers travel as decimal strings (numbers are also accepted on
//! input); emission is canonical: `serde_json` maps are ordered, so equal
//! objects serialize identically.

use crate::error::{Error, Result};
use crate::extensions::{Extension, SubRepr, Submodule, TowerExtension};
use crate::intlat::IntMatrix;
use crate::rings::algebra::{
    group_ring, idealization, product, trunc_poly, zn, Algebra, AlgebraMeta, Coords,
    ModulePresentation, ZLattice,
};
use crate::rings::quad::{QuadElt, QuadLat};
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};
use std::str::FromStr;
use std::sync::Arc;

pub fn parse_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::String(s) => {
            BigInt::from_str(s).map_err(|_| Error::BadDescriptor(format!("bad integer {s}")))
        }
        Value::Number(n) => BigInt::from_str(&n.to_string())
            .map_err(|_| Error::BadDescriptor(format!("bad integer {n}"))),
        _ => Err(Error::BadDescriptor(format!("expected integer, got {v}"))),
    }
}

pub fn parse_u64(v: &Value) -> Result<u64> {
    let b = parse_bigint(v)?;
    b.to_string()
        .parse()
        .map_err(|_| Error::BadDescriptor(format!("expected small nonnegative integer, got {b}")))
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::BadDescriptor(format!("missing field \"{key}\"")))
}

fn as_obj(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::BadDescriptor(format!("expected object, got {v}")))
}

fn as_arr(v: &Value) -> Result<&Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::BadDescriptor(format!("expected array, got {v}")))
}

pub fn parse_coords(v: &Value) -> Result<Coords> {
    as_arr(v)?.iter().map(parse_bigint).collect()
}

pub fn parse_rows(v: &Value) -> Result<Vec<Coords>> {
    as_arr(v)?.iter().map(parse_coords).collect()
}

pub fn bigint_str(b: &BigInt) -> Value {
    Value::String(b.to_string())
}

pub fn coords_json(c: &[BigInt]) -> Value {
    Value::Array(c.iter().map(bigint_str).collect())
}

pub fn rows_json(m: &IntMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| coords_json(m.row(i))).collect())
}

/// Parse a ring descriptor into a finite-family algebra, or report the
/// quadratic order discriminant.
pub enum RingDesc {
    QuadOrder(BigInt),
    Finite(Algebra),
}

pub fn parse_ring(v: &Value) -> Result<RingDesc> {
    let obj = as_obj(v)?;
    let kind = get(obj, "kind")?
        .as_str()
        .ok_or_else(|| Error::BadDescriptor("\"kind\" must be a string".into()))?;
    match kind {
        "quad_order" => Ok(RingDesc::QuadOrder(parse_bigint(get(obj, "D")?)?)),
        "zn" => Ok(RingDesc::Finite(zn(parse_u64(get(obj, "n")?)?))),
        "finite" => {
            let n = parse_u64(get(obj, "n")?)?;
            let rank = parse_u64(get(obj, "rank")?)? as usize;
            let mul_v = as_arr(get(obj, "mul")?)?;
            if mul_v.len() != rank {
                return Err(Error::BadDescriptor("mul tensor has wrong rank".into()));
            }
            let mut mul = Vec::with_capacity(rank);
            for row in mul_v {
                let row_v = as_arr(row)?;
                let mut out_row = Vec::with_capacity(rank);
                for cell in row_v {
                    out_row.push(parse_coords(cell)?);
                }
                mul.push(out_row);
            }
            let one = parse_coords(get(obj, "one")?)?;
            let mods = match obj.get("mods") {
                Some(m) => parse_coords(m)?,
                None => vec![BigInt::from(n); rank],
            };
            Ok(RingDesc::Finite(Algebra::new(
                mods,
                mul,
                one,
                AlgebraMeta::Finite {
                    n,
                    tag: crate::rings::AlgebraTag::Plain,
                },
            )?))
        }
        "product" => {
            let factors = as_arr(get(obj, "factors")?)?
                .iter()
                .map(|f| match parse_ring(f)? {
                    RingDesc::Finite(a) => Ok(a),
                    RingDesc::QuadOrder(_) => {
                        Err(Error::BadDescriptor("product of quad orders".into()))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RingDesc::Finite(product(&factors)?))
        }
        "idealization" => {
            let RingDesc::Finite(base) = parse_ring(get(obj, "base")?)? else {
                return Err(Error::BadDescriptor(
                    "idealization base must be finite".into(),
                ));
            };
            let module = as_obj(get(obj, "module")?)?;
            let gens = parse_u64(get(module, "gens")?)? as usize;
            let rels = as_arr(get(module, "rels")?)?
                .iter()
                .map(|rel| {
                    as_arr(rel)?
                        .iter()
                        .map(parse_coords)
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RingDesc::Finite(idealization(
                &base,
                &ModulePresentation { gens, rels },
            )?))
        }
        "trunc_poly" => {
            let RingDesc::Finite(base) = parse_ring(get(obj, "base")?)? else {
                return Err(Error::BadDescriptor(
                    "trunc_poly base must be finite".into(),
                ));
            };
            let k = parse_u64(get(obj, "k")?)? as usize;
            Ok(RingDesc::Finite(trunc_poly(&base, k)?))
        }
        "group_ring" => {
            let RingDesc::Finite(base) = parse_ring(get(obj, "base")?)? else {
                return Err(Error::BadDescriptor(
                    "group_ring base must be finite".into(),
                ));
            };
            let m = parse_u64(get(obj, "order")?)? as usize;
            Ok(RingDesc::Finite(group_ring(&base, m)?))
        }
        other => Err(Error::BadDescriptor(format!(
            "unknown ring kind \"{other}\""
        ))),
    }
}

/// Parse an extension descriptor.
pub fn parse_extension(v: &Value) -> Result<Arc<Extension>> {
    let obj = as_obj(v)?;
    let kind = get(obj, "kind")?
        .as_str()
        .ok_or_else(|| Error::BadDescriptor("\"kind\" must be a string".into()))?;
    match kind {
        "quad_extension" => {
            let d_a = parse_bigint(get(obj, "DA")?)?;
            match obj.get("DB") {
                None => Extension::quad(&d_a, None),
                Some(Value::String(s)) if s == "field" => Extension::quad(&d_a, None),
                Some(v) => Extension::quad(&d_a, Some(&parse_bigint(v)?)),
            }
        }
        "extension" => {
            let RingDesc::Finite(ambient) = parse_ring(get(obj, "ambient")?)? else {
                return Err(Error::BadDescriptor(
                    "generic extensions need a finite ambient; use quad_extension".into(),
                ));
            };
            let rows = parse_rows(get(obj, "subring")?)?;
            let sub = ZLattice::from_rows(&ambient, rows);
            Extension::alg(ambient, sub, None, format!("file:{kind}"))
        }
        "retraction_extension" => {
            let RingDesc::Finite(base) = parse_ring(get(obj, "base")?)? else {
                return Err(Error::BadDescriptor(
                    "retraction base must be finite".into(),
                ));
            };
            let shape = as_obj(get(obj, "shape")?)?;
            let sh = if let Some(q) = shape.get("idealization") {
                crate::corpus::RetractionShape::Idealization(parse_u64(q)?)
            } else if let Some(k) = shape.get("trunc_poly") {
                crate::corpus::RetractionShape::TruncPoly(parse_u64(k)? as usize)
            } else if let Some(m) = shape.get("group_ring") {
                crate::corpus::RetractionShape::GroupRing(parse_u64(m)? as usize)
            } else {
                return Err(Error::BadDescriptor("unknown retraction shape".into()));
            };
            crate::corpus::retraction_extension(&base, sh)
        }
        other => Err(Error::BadDescriptor(format!(
            "unknown extension kind \"{other}\""
        ))),
    }
}

/// Parse a tower descriptor.
pub fn parse_tower(v: &Value) -> Result<TowerExtension> {
    let obj = as_obj(v)?;
    let kind = get(obj, "kind")?
        .as_str()
        .ok_or_else(|| Error::BadDescriptor("\"kind\" must be a string".into()))?;
    match kind {
        "tower" => {
            let d_a = parse_bigint(get(obj, "DA")?)?;
            let d_b = parse_bigint(get(obj, "DB")?)?;
            let d_c = match obj.get("DC") {
                None => None,
                Some(Value::String(s)) if s == "field" => None,
                Some(v) => Some(parse_bigint(v)?),
            };
            TowerExtension::quad(&d_a, &d_b, d_c.as_ref())
        }
        "tower_finite" => {
            let RingDesc::Finite(ambient) = parse_ring(get(obj, "ambient")?)? else {
                return Err(Error::BadDescriptor("tower ambient must be finite".into()));
            };
            let a = ZLattice::from_rows(&ambient, parse_rows(get(obj, "a")?)?);
            let b = ZLattice::from_rows(&ambient, parse_rows(get(obj, "b")?)?);
            TowerExtension::alg(ambient, a, b, "file:tower")
        }
        other => Err(Error::BadDescriptor(format!(
            "unknown tower kind \"{other}\""
        ))),
    }
}

/// Parse a submodule document: `{"ext":…, "den":q, "hnf":[[…]]}` for the
/// quadratic family, `{"ext":…, "rows":[[…]]}` for the finite family.
pub fn parse_submodule(v: &Value) -> Result<Submodule> {
    let obj = as_obj(v)?;
    let ext = parse_extension(get(obj, "ext")?)?;
    if let Some(hnf) = obj.get("hnf") {
        let den = match obj.get("den") {
            Some(d) => parse_bigint(d)?,
            None => BigInt::from(1),
        };
        let d0 = ext
            .quad_d0()
            .ok_or_else(|| Error::BadDescriptor("hnf form requires a quad extension".into()))?
            .clone();
        let rows = parse_rows(hnf)?;
        if rows.iter().any(|r| r.len() != 2) {
            return Err(Error::BadDescriptor("hnf rows must have width 2".into()));
        }
        let lat = QuadLat::new(&d0, IntMatrix::from_rows(rows), den);
        let sub = Submodule {
            ext: ext.clone(),
            repr: SubRepr::Quad(lat),
        };
        // Canonicalize through the constructor to validate A-stability.
        let canon = Submodule::from_gens(&ext, &sub.gens())?;
        if !canon.equals(&sub)? {
            return Err(Error::BadDescriptor(
                "lattice is not an A-submodule in canonical form".into(),
            ));
        }
        Ok(canon)
    } else if let Some(rows) = obj.get("rows") {
        let gens = parse_rows(rows)?
            .into_iter()
            .map(crate::extensions::Elt::Alg)
            .collect::<Vec<_>>();
        Submodule::from_gens(&ext, &gens)
    } else {
        Err(Error::BadDescriptor(
            "submodule needs \"hnf\" or \"rows\"".into(),
        ))
    }
}

/// Serialize a submodule representation (without its extension).
pub fn submodule_json(l: &Submodule) -> Value {
    match &l.repr {
        SubRepr::Quad(lat) => json!({
            "den": bigint_str(&lat.den),
            "hnf": rows_json(&lat.basis),
        }),
        SubRepr::Alg(lat) => json!({
            "rows": rows_json(&lat.basis),
        }),
    }
}

/// Serialize a quadratic field element as `(p + q·√D₀)/r` decimal strings.
pub fn quad_elt_json(x: &QuadElt) -> Value {
    let (p, q, r) = x.to_surd();
    json!({
        "p": bigint_str(&p),
        "q": bigint_str(&q),
        "r": bigint_str(&r),
        "surd": bigint_str(&x.d0),
    })
}

pub fn parse_quad_elt(d0: &BigInt, v: &Value) -> Result<QuadElt> {
    let obj = as_obj(v)?;
    let p = parse_bigint(get(obj, "p")?)?;
    let q = parse_bigint(get(obj, "q")?)?;
    let r = parse_bigint(get(obj, "r")?)?;
    if r.is_zero() {
        return Err(Error::BadDescriptor("zero denominator".into()));
    }
    QuadElt::from_surd(d0, &p, &q, &r)
}
