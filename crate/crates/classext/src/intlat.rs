//! Exact integer-lattice linear algebra.
//!
//! Row Hermite normal form, Smith normal form, kernels and linear solving
//! over `Z` and `Z/n`, all on arbitrary-precision integers.  Every ideal and
//! submodule computation in the crate bottoms out here, so the normal forms
//! are canonical: two generating sets with the same row lattice produce the
//! same HNF, which makes submodule equality a plain comparison.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    a: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            a: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        IntMatrix {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        IntMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.a[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + x * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Stack `self` above `other` (same column count).
    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols, "dimension mismatch");
        let mut a = self.a.clone();
        a.extend_from_slice(&other.a);
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            a,
        }
    }

    /// Drop all-zero rows; used to trim canonical lattice bases.
    pub fn without_zero_rows(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = (0..self.rows)
            .filter(|&i| self.row(i).iter().any(|x| !x.is_zero()))
            .map(|i| self.row(i).to_vec())
            .collect();
        if rows.is_empty() {
            IntMatrix::zero(0, self.cols)
        } else {
            IntMatrix::from_rows(rows)
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.a.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self.get(i, c).clone();
            self.set(i, c, v);
        }
    }

    /// row_i -= q * row_j
    fn row_sub_mul(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = self.get(i, c) - q * self.get(j, c);
            self.set(i, c, v);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.a.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// col_i -= q * col_j
    fn col_sub_mul(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = self.get(r, i) - q * self.get(r, j);
            self.set(r, i, v);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(
                f,
                "{:?}",
                self.row(i)
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
            )?;
        }
        write!(f, "]")
    }
}

/// Result of a Hermite normal form computation: `h = u * m` with `u` unimodular.
pub struct Hnf {
    pub h: IntMatrix,
    pub u: IntMatrix,
}

/// Row Hermite normal form.
///
/// Pivots are positive, every entry above a pivot is reduced into
/// `[0, pivot)`, zero rows come last, and `h = u * m` with `det(u) = ±1`.
pub fn hnf(m: &IntMatrix) -> Hnf {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut r = 0;
    for c in 0..h.cols {
        if r == h.rows {
            break;
        }
        // Euclidean elimination below row r in column c.
        loop {
            let mut p: Option<usize> = None;
            for i in r..h.rows {
                if !h.get(i, c).is_zero() {
                    p = match p {
                        Some(j) if h.get(j, c).abs() <= h.get(i, c).abs() => Some(j),
                        _ => Some(i),
                    };
                }
            }
            let Some(p) = p else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            if h.get(r, c).is_negative() {
                h.negate_row(r);
                u.negate_row(r);
            }
            let mut dirty = false;
            for i in (r + 1)..h.rows {
                if !h.get(i, c).is_zero() {
                    let q = h.get(i, c).div_floor(h.get(r, c));
                    h.row_sub_mul(i, r, &q);
                    u.row_sub_mul(i, r, &q);
                    if !h.get(i, c).is_zero() {
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        // Reduce the entries above the pivot into [0, pivot).  Row r is zero
        // on every earlier pivot column, so this cannot disturb them.
        for i in 0..r {
            let q = h.get(i, c).div_floor(h.get(r, c));
            h.row_sub_mul(i, r, &q);
            u.row_sub_mul(i, r, &q);
        }
        r += 1;
    }
    Hnf { h, u }
}

/// Result of a Smith normal form computation: `s = u * m * v`.
pub struct Snf {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

/// Smith normal form with `d1 | d2 | ...` and nonnegative diagonal.
pub fn snf(m: &IntMatrix) -> Snf {
    let full = snf_ext(m);
    Snf {
        s: full.s,
        u: full.u,
        v: full.v,
    }
}

pub struct SnfExt {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, tracked alongside so cokernel bases can be pulled back.
    pub v_inv: IntMatrix,
}

pub fn snf_ext(m: &IntMatrix) -> SnfExt {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let mut v_inv = IntMatrix::identity(m.cols);
    let t = m.rows.min(m.cols);

    // col_i -= q*col_j on s and v corresponds to row_j += q*row_i on v_inv.
    loop {
        for k in 0..t {
            'pivot: loop {
                let mut best: Option<(usize, usize)> = None;
                for i in k..s.rows {
                    for j in k..s.cols {
                        if !s.get(i, j).is_zero() {
                            best = match best {
                                Some((bi, bj)) if s.get(bi, bj).abs() <= s.get(i, j).abs() => {
                                    Some((bi, bj))
                                }
                                _ => Some((i, j)),
                            };
                        }
                    }
                }
                let Some((pi, pj)) = best else { break 'pivot };
                s.swap_rows(k, pi);
                u.swap_rows(k, pi);
                s.swap_cols(k, pj);
                v.swap_cols(k, pj);
                v_inv.swap_rows(k, pj);
                if s.get(k, k).is_negative() {
                    s.negate_row(k);
                    u.negate_row(k);
                }
                let mut dirty = false;
                for i in (k + 1)..s.rows {
                    if !s.get(i, k).is_zero() {
                        let q = s.get(i, k).div_floor(s.get(k, k));
                        s.row_sub_mul(i, k, &q);
                        u.row_sub_mul(i, k, &q);
                        if !s.get(i, k).is_zero() {
                            dirty = true;
                        }
                    }
                }
                for j in (k + 1)..s.cols {
                    if !s.get(k, j).is_zero() {
                        let q = s.get(k, j).div_floor(s.get(k, k));
                        s.col_sub_mul(j, k, &q);
                        v.col_sub_mul(j, k, &q);
                        // inverse of (col_j -= q*col_k) is row_k += q*row_j
                        for c in 0..v_inv.cols {
                            let val = v_inv.get(k, c) + &q * v_inv.get(j, c);
                            v_inv.set(k, c, val);
                        }
                        if !s.get(k, j).is_zero() {
                            dirty = true;
                        }
                    }
                }
                if !dirty {
                    break 'pivot;
                }
            }
        }
        // Fix the divisibility chain; a violation strictly shrinks d_i, so
        // the outer loop terminates.
        let mut violated = None;
        for i in 0..t.saturating_sub(1) {
            let a = s.get(i, i).clone();
            let b = s.get(i + 1, i + 1).clone();
            if a.is_zero() && !b.is_zero() {
                s.swap_rows(i, i + 1);
                u.swap_rows(i, i + 1);
                s.swap_cols(i, i + 1);
                v.swap_cols(i, i + 1);
                v_inv.swap_rows(i, i + 1);
                violated = Some(i);
                break;
            }
            if !a.is_zero() && !b.is_zero() && !(&b % &a).is_zero() {
                // col_i += col_{i+1}; inverse: row_{i+1} -= row_i on v_inv
                let minus_one = -BigInt::one();
                s.col_sub_mul(i, i + 1, &minus_one);
                v.col_sub_mul(i, i + 1, &minus_one);
                for c in 0..v_inv.cols {
                    let val = v_inv.get(i + 1, c) - v_inv.get(i, c);
                    v_inv.set(i + 1, c, val);
                }
                violated = Some(i);
                break;
            }
        }
        if violated.is_none() {
            break;
        }
    }
    for k in 0..t {
        if s.get(k, k).is_negative() {
            s.negate_row(k);
            u.negate_row(k);
        }
    }
    SnfExt { s, u, v, v_inv }
}

/// Generators of the right kernel `{x : M·x ≡ 0 (mod n)}`, `n = 0` meaning
/// the kernel over `Z` (in which case the rows are a lattice basis).
///
/// Returned as a matrix whose rows are the kernel vectors, in HNF.
pub fn kernel_mod(m: &IntMatrix, n: u64) -> IntMatrix {
    // Right kernel of M = left kernel of M^T.
    let mt = m.transpose();
    let work = if n == 0 {
        mt
    } else {
        let mut scaled = IntMatrix::identity(mt.cols);
        for i in 0..scaled.rows {
            let v = scaled.get(i, i) * BigInt::from(n);
            scaled.set(i, i, v);
        }
        mt.stack(&scaled)
    };
    let dec = hnf(&work);
    let mut gens: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..work.rows() {
        if dec.h.row(i).iter().all(|x| x.is_zero()) {
            gens.push(dec.u.row(i)[..m.cols()].to_vec());
        }
    }
    if n != 0 {
        for i in 0..m.cols() {
            let mut row = vec![BigInt::zero(); m.cols()];
            row[i] = BigInt::from(n);
            gens.push(row);
        }
    }
    if gens.is_empty() {
        return IntMatrix::zero(0, m.cols());
    }
    hnf(&IntMatrix::from_rows(gens)).h.without_zero_rows()
}

/// Left kernel lattice basis `{x : x·M = 0}` over `Z`.
pub fn left_kernel(m: &IntMatrix) -> IntMatrix {
    let dec = hnf(m);
    let mut gens: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..m.rows() {
        if dec.h.row(i).iter().all(|x| x.is_zero()) {
            gens.push(dec.u.row(i).to_vec());
        }
    }
    if gens.is_empty() {
        return IntMatrix::zero(0, m.rows());
    }
    hnf(&IntMatrix::from_rows(gens)).h.without_zero_rows()
}

/// Solve `z·H = b` by back-substitution against a row-HNF matrix `h`.
pub fn back_substitute(h: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(h.cols(), b.len());
    let mut rem = b.to_vec();
    let mut z = vec![BigInt::zero(); h.rows()];
    for i in 0..h.rows() {
        let Some(p) = (0..h.cols()).find(|&c| !h.get(i, c).is_zero()) else {
            break;
        };
        let (q, r) = rem[p].div_mod_floor(h.get(i, p));
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for c in 0..h.cols() {
                rem[c] = &rem[c] - &q * h.get(i, c);
            }
        }
        z[i] = q;
    }
    if rem.iter().all(|x| x.is_zero()) {
        Some(z)
    } else {
        None
    }
}

/// Solve `x·M ≡ b (mod n)` (`n = 0`: over `Z`), returning the canonical
/// solution: the particular solution reduced by the HNF kernel basis, which
/// pins the representative with each pivot coordinate in `[0, pivot)`.
pub fn solve_mod(m: &IntMatrix, b: &[BigInt], n: u64) -> Option<Vec<BigInt>> {
    assert_eq!(m.cols(), b.len());
    let work = if n == 0 {
        m.clone()
    } else {
        let mut scaled = IntMatrix::identity(m.cols());
        for i in 0..scaled.rows() {
            let v = scaled.get(i, i) * BigInt::from(n);
            scaled.set(i, i, v);
        }
        m.stack(&scaled)
    };
    let dec = hnf(&work);
    let z = back_substitute(&dec.h, b)?;
    let zu = IntMatrix::from_rows(vec![z]).mul(&dec.u);
    let mut x = zu.row(0)[..m.rows()].to_vec();

    // Canonical representative modulo the solution kernel.
    let mut kern_rows: Vec<Vec<BigInt>> = left_kernel(&work)
        .row_vecs()
        .into_iter()
        .map(|r| r[..m.rows()].to_vec())
        .collect();
    if n != 0 {
        for i in 0..m.rows() {
            let mut row = vec![BigInt::zero(); m.rows()];
            row[i] = BigInt::from(n);
            kern_rows.push(row);
        }
    }
    if !kern_rows.is_empty() {
        let kern = hnf(&IntMatrix::from_rows(kern_rows)).h.without_zero_rows();
        for i in 0..kern.rows() {
            let p = (0..kern.cols())
                .find(|&c| !kern.get(i, c).is_zero())
                .unwrap();
            let q = x[p].div_floor(kern.get(i, p));
            if !q.is_zero() {
                for c in 0..kern.cols() {
                    x[c] = &x[c] - &q * kern.get(i, c);
                }
            }
        }
    }
    Some(x)
}

/// Sum of two row lattices, as a trimmed HNF basis.
pub fn lattice_sum(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    hnf(&a.stack(b)).h.without_zero_rows()
}

/// Intersection of two row lattices, as a trimmed HNF basis.
pub fn lattice_intersect(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    if a.rows() == 0 || b.rows() == 0 {
        return IntMatrix::zero(0, a.cols().max(b.cols()));
    }
    assert_eq!(a.cols(), b.cols());
    let mut neg_b = b.clone();
    for i in 0..neg_b.rows() {
        neg_b.negate_row(i);
    }
    let stacked = a.stack(&neg_b);
    let kern = left_kernel(&stacked);
    let mut gens: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..kern.rows() {
        let za = &kern.row(i)[..a.rows()];
        let v = IntMatrix::from_rows(vec![za.to_vec()]).mul(a);
        gens.push(v.row(0).to_vec());
    }
    if gens.is_empty() {
        return IntMatrix::zero(0, a.cols());
    }
    hnf(&IntMatrix::from_rows(gens)).h.without_zero_rows()
}

/// Membership of a row vector in a row lattice given by an HNF basis.
pub fn lattice_contains(basis: &IntMatrix, v: &[BigInt]) -> bool {
    if basis.rows() == 0 {
        return v.iter().all(|x| x.is_zero());
    }
    back_substitute(basis, v).is_some()
}

/// Inclusion of row lattices: every basis row of `a` lies in `b`.
pub fn lattice_subset(a: &IntMatrix, b: &IntMatrix) -> bool {
    (0..a.rows()).all(|i| lattice_contains(b, a.row(i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// Oracle: two generator sets span the same sublattice of Z^2, checked by
    /// enumerating membership over a bounding box.
    fn same_lattice_by_enumeration(a: &IntMatrix, b: &IntMatrix, bound: i64) {
        for x in -bound..=bound {
            for y in -bound..=bound {
                let v = vec![bi(x), bi(y)];
                assert_eq!(
                    lattice_contains(&hnf(a).h.without_zero_rows(), &v),
                    lattice_contains(&hnf(b).h.without_zero_rows(), &v),
                    "membership of ({x},{y}) differs"
                );
            }
        }
    }

    #[test]
    fn hnf_identity() {
        let m = IntMatrix::identity(2);
        let dec = hnf(&m);
        assert_eq!(dec.h, IntMatrix::identity(2));
        assert_eq!(dec.u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_two_by_two() {
        let m = IntMatrix::from_i64(&[&[2, 0], &[1, 1]]);
        let dec = hnf(&m);
        let expected = IntMatrix::from_i64(&[&[1, 1], &[0, 2]]);
        assert_eq!(dec.h, expected);
        assert_eq!(dec.u.mul(&m), dec.h);
        same_lattice_by_enumeration(&m, &expected, 6);
    }

    #[test]
    fn hnf_gcd_column() {
        let m = IntMatrix::from_i64(&[&[4, 0], &[6, 0]]);
        let dec = hnf(&m);
        assert_eq!(dec.h, IntMatrix::from_i64(&[&[2, 0], &[0, 0]]));
    }

    #[test]
    fn snf_one_by_one() {
        let m = IntMatrix::from_i64(&[&[6]]);
        let dec = snf(&m);
        assert_eq!(dec.s, IntMatrix::from_i64(&[&[6]]));
    }

    #[test]
    fn snf_two_by_two() {
        let m = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let dec = snf(&m);
        // Oracle: |d1*d2| = |det| = |16-24| = 8 and d1 = gcd of entries = 2.
        assert_eq!(dec.s, IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
        assert_eq!(dec.u.mul(&m).mul(&dec.v), dec.s);
    }

    #[test]
    fn snf_zero() {
        let m = IntMatrix::zero(2, 3);
        let dec = snf(&m);
        assert!(dec.s.is_zero());
    }

    #[test]
    fn snf_v_inverse_tracked() {
        let m = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let full = snf_ext(&m);
        assert_eq!(full.v.mul(&full.v_inv), IntMatrix::identity(3));
        assert_eq!(full.u.mul(&m).mul(&full.v), full.s);
    }

    #[test]
    fn kernel_trivial() {
        let m = IntMatrix::identity(2);
        let k = kernel_mod(&m, 0);
        assert_eq!(k.rows(), 0);
    }

    #[test]
    fn kernel_modular() {
        // Oracle: enumerate x in Z/4 with 2x ≡ 0.
        let m = IntMatrix::from_i64(&[&[2]]);
        let k = kernel_mod(&m, 4);
        assert_eq!(k, IntMatrix::from_i64(&[&[2]]));
        for x in 0..4i64 {
            let in_kernel = (2 * x) % 4 == 0;
            let by_lattice = lattice_contains(&k, &[bi(x)]);
            assert_eq!(in_kernel, by_lattice, "x = {x}");
        }
    }

    #[test]
    fn kernel_symmetry() {
        let m = IntMatrix::from_i64(&[&[1, 1]]);
        let k = kernel_mod(&m, 0);
        assert_eq!(k, IntMatrix::from_i64(&[&[1, -1]]));
    }

    #[test]
    fn solve_identity() {
        let m = IntMatrix::identity(3);
        let b = vec![bi(5), bi(-2), bi(7)];
        assert_eq!(solve_mod(&m, &b, 0), Some(b));
    }

    #[test]
    fn solve_parity_obstruction() {
        let m = IntMatrix::from_i64(&[&[2]]);
        assert_eq!(solve_mod(&m, &[bi(1)], 4), None);
    }

    #[test]
    fn solve_mod_five() {
        // Oracle: enumerate Z/5; 3·2 = 6 ≡ 1.
        let m = IntMatrix::from_i64(&[&[3]]);
        let x = solve_mod(&m, &[bi(1)], 5).unwrap();
        assert_eq!(x, vec![bi(2)]);
    }

    #[test]
    fn solve_underdetermined_canonical() {
        // x + y = 3 over Z: kernel (1,-1); canonical rep has x in [0,1).
        let m = IntMatrix::from_i64(&[&[1], &[1]]);
        let x = solve_mod(&m, &[bi(3)], 0).unwrap();
        assert_eq!(x, vec![bi(0), bi(3)]);
    }

    #[test]
    fn intersect_lattices() {
        let a = IntMatrix::from_i64(&[&[2, 0], &[0, 1]]);
        let b = IntMatrix::from_i64(&[&[1, 0], &[0, 3]]);
        let c = lattice_intersect(&a, &b);
        assert_eq!(c, IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..4, 1usize..4).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-9i64..10, r * c).prop_map(move |vals| {
                IntMatrix::from_rows(
                    vals.chunks(c)
                        .map(|ch| ch.iter().map(|&x| BigInt::from(x)).collect())
                        .collect(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn hnf_is_idempotent(m in small_matrix()) {
            let h1 = hnf(&m).h;
            let h2 = hnf(&h1).h;
            prop_assert_eq!(h1, h2);
        }

        #[test]
        fn hnf_invariant_under_row_ops(m in small_matrix(), k in -3i64..4, swap in any::<bool>()) {
            // Apply a unimodular row operation; the HNF must not change.
            let mut m2 = m.clone();
            if m2.rows() >= 2 {
                if swap {
                    m2.swap_rows(0, 1);
                }
                let q = BigInt::from(k);
                m2.row_sub_mul(0, m2.rows() - 1, &q);
                if m2.rows() >= 2 && 0 != m2.rows() - 1 {
                    // already applied
                }
            }
            prop_assert_eq!(hnf(&m).h, hnf(&m2).h);
        }

        #[test]
        fn snf_divisibility_chain(m in small_matrix()) {
            let s = snf(&m).s;
            let t = s.rows().min(s.cols());
            for i in 0..t {
                prop_assert!(!s.get(i, i).is_negative());
                if i + 1 < t {
                    let a = s.get(i, i);
                    let b = s.get(i + 1, i + 1);
                    if !a.is_zero() {
                        prop_assert!((b % a).is_zero());
                    } else {
                        prop_assert!(b.is_zero());
                    }
                }
            }
        }

        #[test]
        fn snf_determinant_product(vals in proptest::collection::vec(-9i64..10, 9)) {
            let m = IntMatrix::from_rows(
                vals.chunks(3)
                    .map(|ch| ch.iter().map(|&x| BigInt::from(x)).collect())
                    .collect(),
            );
            // |d1 d2 d3| = |det M| on square inputs.
            let det = {
                let g = |i: usize, j: usize| m.get(i, j).clone();
                g(0,0)*g(1,1)*g(2,2) + g(0,1)*g(1,2)*g(2,0) + g(0,2)*g(1,0)*g(2,1)
                    - g(0,2)*g(1,1)*g(2,0) - g(0,0)*g(1,2)*g(2,1) - g(0,1)*g(1,0)*g(2,2)
            };
            let s = snf(&m).s;
            let prod = s.get(0,0) * s.get(1,1) * s.get(2,2);
            prop_assert_eq!(prod, det.abs());
        }

        #[test]
        fn solve_mod_matches_exhaustive(rows in 1usize..3, cols in 1usize..3,
                                        vals in proptest::collection::vec(0i64..16, 4),
                                        target in proptest::collection::vec(0i64..16, 2),
                                        n in 2u64..9) {
            let m = IntMatrix::from_rows(
                (0..rows).map(|i| (0..cols).map(|j| BigInt::from(vals[i * 2 + j] % n as i64)).collect()).collect(),
            );
            let b: Vec<BigInt> = (0..cols).map(|j| BigInt::from(target[j] % n as i64)).collect();
            let got = solve_mod(&m, &b, n);
            // Exhaustive search over (Z/n)^rows.
            let mut found = false;
            let total = n.pow(rows as u32);
            'outer: for idx in 0..total {
                let mut x = Vec::new();
                let mut rem = idx;
                for _ in 0..rows {
                    x.push(BigInt::from(rem % n));
                    rem /= n;
                }
                for j in 0..cols {
                    let mut acc = BigInt::zero();
                    for i in 0..rows {
                        acc += &x[i] * m.get(i, j);
                    }
                    if (&acc - &b[j]) % BigInt::from(n) != BigInt::zero() {
                        continue 'outer;
                    }
                }
                found = true;
                break;
            }
            prop_assert_eq!(got.is_some(), found);
            if let Some(x) = got {
                for j in 0..cols {
                    let mut acc = BigInt::zero();
                    for i in 0..rows {
                        acc += &x[i] * m.get(i, j);
                    }
                    let diff = (&acc - &b[j]) % BigInt::from(n);
                    prop_assert!(diff.is_zero());
                }
            }
        }
    }
}
