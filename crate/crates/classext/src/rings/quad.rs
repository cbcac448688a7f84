//! Imaginary quadratic orders and exact arithmetic in their fraction field.
//!
//! Every order of discriminant `D = f²·D₀` (`D₀` fundamental) sits inside
//! the maximal order `Z + ω₀Z` with `ω₀ = (D₀ + √D₀)/2`, as `Z + f·ω₀Z`.
//! Field elements are kept in coordinates over the basis `{1, ω₀}` with a
//! positive denominator, so that all lattice computations stay integral.

use crate::error::{Error, Result};
use crate::intlat::{self, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Discriminant descriptor of an imaginary quadratic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadOrderDesc {
    /// Order discriminant, `D ≡ 0, 1 (mod 4)`, `D < 0`.
    pub d: BigInt,
    /// Fundamental discriminant `D₀` with `D = f²·D₀`.
    pub d0: BigInt,
    /// Conductor `f ≥ 1`.
    pub conductor: BigInt,
}

/// Validate a discriminant and split off conductor and fundamental part.
pub fn make_quad_order(d: &BigInt) -> Result<QuadOrderDesc> {
    if d.sign() != num_bigint::Sign::Minus {
        return Err(Error::InvalidDiscriminant(format!(
            "{d} is not negative (real quadratic orders are unsupported)"
        )));
    }
    let four = BigInt::from(4);
    let m = d.mod_floor(&four);
    if !m.is_zero() && m != BigInt::one() {
        return Err(Error::InvalidDiscriminant(format!("{d} ≢ 0, 1 (mod 4)")));
    }
    // Split |d| = s²·m with m squarefree by trial division.
    let mut n = -d.clone();
    let mut s = BigInt::one();
    let mut sq_free = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0u32;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            if e % 2 == 1 {
                sq_free *= &p;
            }
            for _ in 0..(e / 2) {
                s *= &p;
            }
        }
        p += 1;
    }
    sq_free *= &n; // leftover prime
    let minus_m = -sq_free;
    let (d0, f) = if minus_m.mod_floor(&four) == BigInt::one() {
        (minus_m, s)
    } else {
        // D₀ = 4·(−m); the conductor must then absorb a factor of 2.
        if (&s % BigInt::from(2)).is_zero() {
            (minus_m * 4, s / 2)
        } else {
            return Err(Error::InvalidDiscriminant(format!(
                "{d} ≢ 0, 1 (mod 4) after removing square factors"
            )));
        }
    };
    debug_assert_eq!(&f * &f * &d0, *d);
    Ok(QuadOrderDesc {
        d: d.clone(),
        d0,
        conductor: f,
    })
}

/// `Tr(ω₀) = D₀` and `N(ω₀) = (D₀² − D₀)/4` for `ω₀ = (D₀ + √D₀)/2`.
pub fn omega_trace_norm(d0: &BigInt) -> (BigInt, BigInt) {
    let n = (d0 * d0 - d0) / BigInt::from(4);
    (d0.clone(), n)
}

/// An element `(u + v·ω₀)/w` of the quadratic field of fundamental
/// discriminant `d0`, in lowest terms with `w ≥ 1`.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadElt {
    pub d0: BigInt,
    pub u: BigInt,
    pub v: BigInt,
    pub w: BigInt,
}

macro_rules! check_same_field {
    ($a:expr, $b:expr) => {
        assert_eq!($a.d0, $b.d0, "elements of different quadratic fields");
    };
}

impl fmt::Debug for QuadElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl QuadElt {
    pub fn new(d0: BigInt, u: BigInt, v: BigInt, w: BigInt) -> Self {
        assert!(!w.is_zero(), "zero denominator");
        let mut e = QuadElt { d0, u, v, w };
        e.normalize();
        e
    }

    pub fn from_int(d0: &BigInt, n: i64) -> Self {
        QuadElt::new(d0.clone(), BigInt::from(n), BigInt::zero(), BigInt::one())
    }

    pub fn zero(d0: &BigInt) -> Self {
        QuadElt::from_int(d0, 0)
    }

    pub fn one(d0: &BigInt) -> Self {
        QuadElt::from_int(d0, 1)
    }

    /// Build `(p + q·√D₀)/r` from surd coordinates.
    pub fn from_surd(d0: &BigInt, p: &BigInt, q: &BigInt, r: &BigInt) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::BadDescriptor("zero denominator".into()));
        }
        // √D₀ = 2ω₀ − D₀.
        Ok(QuadElt::new(
            d0.clone(),
            p - q * d0,
            BigInt::from(2) * q,
            r.clone(),
        ))
    }

    /// Surd coordinates `(p, q, r)` with the element equal to `(p + q√D₀)/r`.
    pub fn to_surd(&self) -> (BigInt, BigInt, BigInt) {
        // u + v·(D₀+√D₀)/2 = (2u + v·D₀)/2 + (v/2)·√D₀.
        let mut p = BigInt::from(2) * &self.u + &self.v * &self.d0;
        let mut q = self.v.clone();
        let mut r = BigInt::from(2) * &self.w;
        let g = p.gcd(&q).gcd(&r);
        if !g.is_zero() && !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        (p, q, r)
    }

    fn normalize(&mut self) {
        if self.w.is_negative() {
            self.u = -self.u.clone();
            self.v = -self.v.clone();
            self.w = -self.w.clone();
        }
        let g = self.u.gcd(&self.v).gcd(&self.w);
        if !g.is_zero() && !g.is_one() {
            self.u /= &g;
            self.v /= &g;
            self.w /= &g;
        }
        if self.u.is_zero() && self.v.is_zero() {
            self.w = BigInt::one();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn add(&self, rhs: &QuadElt) -> QuadElt {
        check_same_field!(self, rhs);
        QuadElt::new(
            self.d0.clone(),
            &self.u * &rhs.w + &rhs.u * &self.w,
            &self.v * &rhs.w + &rhs.v * &self.w,
            &self.w * &rhs.w,
        )
    }

    pub fn sub(&self, rhs: &QuadElt) -> QuadElt {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> QuadElt {
        QuadElt {
            d0: self.d0.clone(),
            u: -self.u.clone(),
            v: -self.v.clone(),
            w: self.w.clone(),
        }
    }

    pub fn mul(&self, rhs: &QuadElt) -> QuadElt {
        check_same_field!(self, rhs);
        let (t0, n0) = omega_trace_norm(&self.d0);
        // (u1 + v1ω)(u2 + v2ω) with ω² = t0·ω − n0.
        let u = &self.u * &rhs.u - &self.v * &rhs.v * &n0;
        let v = &self.u * &rhs.v + &self.v * &rhs.u + &self.v * &rhs.v * &t0;
        QuadElt::new(self.d0.clone(), u, v, &self.w * &rhs.w)
    }

    /// Complex conjugate: `ω₀ ↦ D₀ − ω₀`.
    pub fn conj(&self) -> QuadElt {
        QuadElt::new(
            self.d0.clone(),
            &self.u + &self.v * &self.d0,
            -self.v.clone(),
            self.w.clone(),
        )
    }

    /// Field norm as a reduced fraction `(num, den)`, `den > 0`.
    pub fn norm(&self) -> (BigInt, BigInt) {
        let (t0, n0) = omega_trace_norm(&self.d0);
        let num = &self.u * &self.u + &self.u * &self.v * &t0 + &self.v * &self.v * &n0;
        reduce_frac(num, &self.w * &self.w)
    }

    /// Field inverse; `None` for zero.
    pub fn inv(&self) -> Option<QuadElt> {
        if self.is_zero() {
            return None;
        }
        let conj = self.conj();
        let (nn, nd) = self.norm();
        // 1/x = conj(x)·nd/nn
        Some(QuadElt::new(
            self.d0.clone(),
            &conj.u * &nd,
            &conj.v * &nd,
            &conj.w * &nn,
        ))
    }

    /// Multiply by an exact integer fraction `num/den`.
    pub fn scale(&self, num: &BigInt, den: &BigInt) -> QuadElt {
        QuadElt::new(self.d0.clone(), &self.u * num, &self.v * num, &self.w * den)
    }

    /// Membership in the order of conductor `f`: both coordinates integral
    /// and the `ω₀`-coordinate divisible by `f`.
    pub fn in_order(&self, f: &BigInt) -> bool {
        if !self.w.is_one() {
            return false;
        }
        (&self.v % f).is_zero()
    }

    /// Is this element a unit of the order of conductor `f`?
    /// Imaginary quadratic orders only have norm-one torsion units.
    pub fn is_unit_of_order(&self, f: &BigInt) -> bool {
        if !self.in_order(f) {
            return false;
        }
        let (nn, nd) = self.norm();
        nd.is_one() && nn.is_one()
    }
}

impl fmt::Display for QuadElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q, r) = self.to_surd();
        if q.is_zero() {
            if r.is_one() {
                write!(f, "{p}")
            } else {
                write!(f, "{p}/{r}")
            }
        } else if r.is_one() {
            let sign = if q.is_negative() { "" } else { "+" };
            write!(f, "{p}{sign}{q}*sqrt({})", self.d0)
        } else {
            let sign = if q.is_negative() { "" } else { "+" };
            write!(f, "({p}{sign}{q}*sqrt({}))/{r}", self.d0)
        }
    }
}

/// Reduce `num/den` to lowest terms with positive denominator.
pub fn reduce_frac(num: BigInt, den: BigInt) -> (BigInt, BigInt) {
    assert!(!den.is_zero());
    let g = num.gcd(&den);
    let (mut n, mut d) = if g.is_zero() {
        (num, den)
    } else {
        (num / &g, den / &g)
    };
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    (n, d)
}

/// The torsion units of the order of conductor `f` inside discriminant `d0`,
/// in a deterministic order.  Two, four, or six elements.
pub fn units_of_order(d0: &BigInt, f: &BigInt) -> Vec<QuadElt> {
    let mut out = Vec::new();
    for u in -3i64..=3 {
        for v in -3i64..=3 {
            let x = QuadElt::new(
                d0.clone(),
                BigInt::from(u),
                BigInt::from(v) * f,
                BigInt::one(),
            );
            if x.is_unit_of_order(f) {
                out.push(x);
            }
        }
    }
    out.sort_by_key(|x| (x.u.clone(), x.v.clone()));
    out
}

/// A rank ≤ 2 lattice in the quadratic field: `rows/den` in `{1, ω₀}`
/// coordinates, with `rows` a trimmed HNF basis and `den` minimal positive.
#[derive(Clone, PartialEq, Eq)]
pub struct QuadLat {
    pub d0: BigInt,
    pub den: BigInt,
    pub basis: IntMatrix,
}

impl fmt::Debug for QuadLat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadLat(den={}, basis={:?})", self.den, self.basis)
    }
}

impl QuadLat {
    /// Normalize raw integer rows over a common denominator.
    pub fn new(d0: &BigInt, rows: IntMatrix, den: BigInt) -> QuadLat {
        assert!(den.is_positive());
        let h = intlat::hnf(&rows).h.without_zero_rows();
        if h.rows() == 0 {
            return QuadLat {
                d0: d0.clone(),
                den: BigInt::one(),
                basis: IntMatrix::zero(0, 2),
            };
        }
        // Minimal q with q·L integral: q = den / gcd(den, content).
        let mut content = BigInt::zero();
        for i in 0..h.rows() {
            for j in 0..2 {
                content = content.gcd(h.get(i, j));
            }
        }
        let g = den.gcd(&content);
        let q = &den / &g;
        // Scale basis by q/den = 1/g.
        let mut rows2 = Vec::new();
        for i in 0..h.rows() {
            rows2.push(vec![h.get(i, 0) / &g, h.get(i, 1) / &g]);
        }
        QuadLat {
            d0: d0.clone(),
            den: q,
            basis: IntMatrix::from_rows(rows2),
        }
    }

    pub fn zero(d0: &BigInt) -> QuadLat {
        QuadLat {
            d0: d0.clone(),
            den: BigInt::one(),
            basis: IntMatrix::zero(0, 2),
        }
    }

    pub fn from_elements(d0: &BigInt, elts: &[QuadElt]) -> QuadLat {
        let mut den = BigInt::one();
        for e in elts {
            assert_eq!(&e.d0, d0);
            den = den.lcm(&e.w);
        }
        let rows: Vec<Vec<BigInt>> = elts
            .iter()
            .map(|e| {
                let s = &den / &e.w;
                vec![&e.u * &s, &e.v * &s]
            })
            .collect();
        if rows.is_empty() {
            return QuadLat::zero(d0);
        }
        QuadLat::new(d0, IntMatrix::from_rows(rows), den)
    }

    /// The order `Z + f·ω₀Z` as a lattice.
    pub fn order(d0: &BigInt, f: &BigInt) -> QuadLat {
        QuadLat::new(
            d0,
            IntMatrix::from_rows(vec![
                vec![BigInt::one(), BigInt::zero()],
                vec![BigInt::zero(), f.clone()],
            ]),
            BigInt::one(),
        )
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    /// Basis rows as field elements.
    pub fn basis_elements(&self) -> Vec<QuadElt> {
        (0..self.basis.rows())
            .map(|i| {
                QuadElt::new(
                    self.d0.clone(),
                    self.basis.get(i, 0).clone(),
                    self.basis.get(i, 1).clone(),
                    self.den.clone(),
                )
            })
            .collect()
    }

    pub fn contains(&self, x: &QuadElt) -> bool {
        assert_eq!(x.d0, self.d0);
        if x.is_zero() {
            return true;
        }
        // x·den must be integral.
        let nu = &x.u * &self.den;
        let nv = &x.v * &self.den;
        if !(&nu % &x.w).is_zero() || !(&nv % &x.w).is_zero() {
            return false;
        }
        intlat::lattice_contains(&self.basis, &[nu / &x.w, nv / &x.w])
    }

    pub fn subset(&self, other: &QuadLat) -> bool {
        self.basis_elements().iter().all(|e| other.contains(e))
    }

    pub fn add_lat(&self, other: &QuadLat) -> QuadLat {
        assert_eq!(self.d0, other.d0);
        let mut elts = self.basis_elements();
        elts.extend(other.basis_elements());
        QuadLat::from_elements(&self.d0, &elts)
    }

    /// Module product: the lattice spanned by pairwise products of bases.
    pub fn mul_lat(&self, other: &QuadLat) -> QuadLat {
        assert_eq!(self.d0, other.d0);
        let mut prods = Vec::new();
        for a in self.basis_elements() {
            for b in other.basis_elements() {
                prods.push(a.mul(&b));
            }
        }
        QuadLat::from_elements(&self.d0, &prods)
    }

    pub fn scale_elt(&self, x: &QuadElt) -> QuadLat {
        let elts: Vec<QuadElt> = self.basis_elements().iter().map(|e| e.mul(x)).collect();
        QuadLat::from_elements(&self.d0, &elts)
    }

    /// Intersection of two lattices.
    pub fn intersect(&self, other: &QuadLat) -> QuadLat {
        assert_eq!(self.d0, other.d0);
        if self.is_zero() || other.is_zero() {
            return QuadLat::zero(&self.d0);
        }
        let den = self.den.lcm(&other.den);
        let scale_rows = |l: &QuadLat| -> IntMatrix {
            let s = &den / &l.den;
            let rows: Vec<Vec<BigInt>> = (0..l.basis.rows())
                .map(|i| vec![l.basis.get(i, 0) * &s, l.basis.get(i, 1) * &s])
                .collect();
            IntMatrix::from_rows(rows)
        };
        let a = scale_rows(self);
        let b = scale_rows(other);
        let inter = intlat::lattice_intersect(&a, &b);
        if inter.rows() == 0 {
            return QuadLat::zero(&self.d0);
        }
        QuadLat::new(&self.d0, inter, den)
    }

    /// Colon lattice `{x ∈ K : x·self ⊆ target}`.
    pub fn colon(&self, target: &QuadLat) -> QuadLat {
        assert_eq!(self.d0, target.d0);
        assert!(!self.is_zero(), "colon by the zero lattice");
        if target.is_zero() {
            return QuadLat::zero(&self.d0);
        }
        let mut result: Option<QuadLat> = None;
        for g in self.basis_elements() {
            if g.is_zero() {
                continue;
            }
            // Multiplication-by-g matrix N/wg on {1, ω₀} coordinates.
            let (t0, n0) = omega_trace_norm(&self.d0);
            // 1·g = (u, v); ω₀·g = (−v·n0, u + v·t0).
            let n_mat = IntMatrix::from_rows(vec![
                vec![g.u.clone(), g.v.clone()],
                vec![-&g.v * &n0, &g.u + &g.v * &t0],
            ]);
            let det = n_mat.get(0, 0) * n_mat.get(1, 1) - n_mat.get(0, 1) * n_mat.get(1, 0);
            assert!(!det.is_zero());
            // adj(N)
            let adj = IntMatrix::from_rows(vec![
                vec![n_mat.get(1, 1).clone(), -n_mat.get(0, 1).clone()],
                vec![-n_mat.get(1, 0).clone(), n_mat.get(0, 0).clone()],
            ]);
            // Preimage of target under right multiplication by N/wg:
            // Λ_t·adj(N)·wg over den_t·det(N).
            let mut rows = target.basis.mul(&adj);
            for i in 0..rows.rows() {
                for j in 0..2 {
                    let v = rows.get(i, j) * &g.w;
                    rows.set(i, j, v);
                }
            }
            let mut den = &target.den * &det;
            if den.is_negative() {
                den = -den;
                for i in 0..rows.rows() {
                    for j in 0..2 {
                        let v = -rows.get(i, j).clone();
                        rows.set(i, j, v);
                    }
                }
            }
            let pre = QuadLat::new(&self.d0, rows, den);
            result = Some(match result {
                None => pre,
                Some(r) => r.intersect(&pre),
            });
        }
        result.expect("nonzero lattice has a nonzero basis element")
    }

    /// Lattice determinant `det(basis)/den²` as a reduced fraction.
    pub fn det_frac(&self) -> (BigInt, BigInt) {
        assert_eq!(self.rank(), 2, "determinant of a non-full lattice");
        let det = self.basis.get(0, 0) * self.basis.get(1, 1)
            - self.basis.get(0, 1) * self.basis.get(1, 0);
        reduce_frac(det.abs(), &self.den * &self.den)
    }

    /// Norm relative to the order of conductor `f`: covolume ratio.
    pub fn norm_rel(&self, f: &BigInt) -> (BigInt, BigInt) {
        let (n, d) = self.det_frac();
        reduce_frac(n, d * f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn order_minus_20_is_fundamental() {
        // −20/4 = −5 ≡ 3 (mod 4), so −20 is itself fundamental.
        let o = make_quad_order(&bi(-20)).unwrap();
        assert_eq!(o.d0, bi(-20));
        assert_eq!(o.conductor, bi(1));
    }

    #[test]
    fn order_minus_36_has_conductor_3() {
        let o = make_quad_order(&bi(-36)).unwrap();
        assert_eq!(o.d0, bi(-4));
        assert_eq!(o.conductor, bi(3));
    }

    #[test]
    fn order_minus_3_is_maximal() {
        let o = make_quad_order(&bi(-3)).unwrap();
        assert_eq!(o.d0, bi(-3));
        assert_eq!(o.conductor, bi(1));
    }

    #[test]
    fn rejects_bad_discriminants() {
        assert!(make_quad_order(&bi(-7)).is_ok());
        assert!(make_quad_order(&bi(-6)).is_err()); // ≡ 2 mod 4
        assert!(make_quad_order(&bi(5)).is_err()); // positive
        assert!(make_quad_order(&bi(-5)).is_err()); // ≡ 3 mod 4
    }

    #[test]
    fn element_arithmetic_sqrt_minus_5() {
        // D₀ = −20, √−20 = 2√−5; √−5 = ω₀ + 10 in {1, ω₀} coordinates
        // since ω₀ = (−20 + 2√−5)/2 = −10 + √−5.
        let d0 = bi(-20);
        let sqrt5 = QuadElt::new(d0.clone(), bi(10), bi(1), bi(1));
        let sq = sqrt5.mul(&sqrt5);
        assert_eq!(sq, QuadElt::from_int(&d0, -5));
        let (nn, nd) = sqrt5.norm();
        assert_eq!((nn, nd), (bi(5), bi(1)));
        // √−5 is not a unit of Z[√−5]: norm 5 ≠ ±1.
        assert!(!sqrt5.is_unit_of_order(&bi(1)));
        assert!(sqrt5.in_order(&bi(1)));
    }

    #[test]
    fn inverse_roundtrip() {
        let d0 = bi(-23);
        let x = QuadElt::new(d0.clone(), bi(3), bi(-2), bi(5));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), QuadElt::one(&d0));
    }

    #[test]
    fn surd_conversion_roundtrip() {
        let d0 = bi(-20);
        let x = QuadElt::new(d0.clone(), bi(7), bi(-3), bi(4));
        let (p, q, r) = x.to_surd();
        let y = QuadElt::from_surd(&d0, &p, &q, &r).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn units_of_gaussian_and_eisenstein_orders() {
        assert_eq!(units_of_order(&bi(-4), &bi(1)).len(), 4);
        assert_eq!(units_of_order(&bi(-3), &bi(1)).len(), 6);
        assert_eq!(units_of_order(&bi(-20), &bi(1)).len(), 2);
        // Nonmaximal order Z + 3Z[i]: only ±1.
        assert_eq!(units_of_order(&bi(-4), &bi(3)).len(), 2);
    }

    #[test]
    fn lattice_colon_inverts_nonprincipal_ideal() {
        // L = 2Z + (1+√−5)Z over Z[√−5]; L·L⁻¹ = A with
        // L⁻¹ = Z + ((1−√−5)/2)Z.
        let d0 = bi(-20);
        let two = QuadElt::from_int(&d0, 2);
        let g = QuadElt::new(d0.clone(), bi(11), bi(1), bi(1)); // 1 + √−5
        let omega = QuadElt::new(d0.clone(), bi(0), bi(1), bi(1));
        let l = QuadLat::from_elements(
            &d0,
            &[two.clone(), g.clone(), two.mul(&omega), g.mul(&omega)],
        );
        let a = QuadLat::order(&d0, &bi(1));
        let inv = l.colon(&a);
        let prod = l.mul_lat(&inv);
        assert_eq!(prod, a);
        // 1 − √−5 = 1 − (ω₀ + 10) = −9 − ω₀.
        let half = QuadElt::new(d0.clone(), bi(-9), bi(-1), bi(2));
        assert!(inv.contains(&half));
        let (nn, nd) = l.norm_rel(&bi(1));
        assert_eq!((nn, nd), (bi(2), bi(1)));
    }

    #[test]
    fn lattice_canonical_form_is_stable() {
        let d0 = bi(-20);
        let a = QuadElt::new(d0.clone(), bi(2), bi(0), bi(1));
        let b = QuadElt::new(d0.clone(), bi(11), bi(1), bi(1));
        let l1 = QuadLat::from_elements(&d0, &[a.clone(), b.clone()]);
        let l2 = QuadLat::from_elements(&d0, &[b.add(&a), a.neg(), b.clone()]);
        assert_eq!(l1, l2);
    }
}
