//! Commutative algebras presented by structure constants on a `Z`-basis.
//!
//! A single representation covers both supported shapes:
//!
//! * finite rings: every basis column carries a finite additive order
//!   (`mods[k] > 0`), so the ring is `⊕_k Z/mods[k]` with a multiplication
//!   tensor — this is the `FiniteAlgebra` of the JSON interface;
//! * algebras over an imaginary quadratic order: free columns come in pairs
//!   `(g·1, g·ω)` for a free order-basis `g`, optionally followed by torsion
//!   columns for an idealization module.
//!
//! Subgroups of the additive group are kept as trimmed row-HNF lattices that
//! always contain the rows `mods[k]·e_k`, so membership, sums, intersections
//! and equality are plain integer-lattice operations.

use crate::error::{Error, Result};
use crate::intlat::{self, IntMatrix};
use crate::rings::quad::{QuadElt, QuadOrderDesc};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Provenance tag recording how a finite algebra was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraTag {
    Plain,
    Product,
    Idealization { base_cols: usize },
    TruncPoly { base_cols: usize, k: usize },
    GroupRing { base_cols: usize, order: usize },
    TensorSquare { base_cols: usize },
    Quotient,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraMeta {
    /// Finite commutative ring; `n` is a common additive exponent.
    Finite { n: u64, tag: AlgebraTag },
    /// Free algebra over the order of conductor `f` in discriminant `d0`,
    /// with `blocks` order-basis elements (2 columns each), followed by
    /// torsion columns.
    OverOrder {
        d0: BigInt,
        f: BigInt,
        blocks: usize,
        tag: AlgebraTag,
    },
}

/// A commutative unital algebra given by a multiplication tensor.
#[derive(Clone, PartialEq, Eq)]
pub struct Algebra {
    /// Additive order of each basis column; 0 means free.
    pub mods: Vec<BigInt>,
    /// `mul[i][j]` = coordinates of `e_i · e_j`.
    pub mul: Vec<Vec<Vec<BigInt>>>,
    pub one: Vec<BigInt>,
    pub meta: AlgebraMeta,
}

pub type Coords = Vec<BigInt>;

impl std::fmt::Debug for Algebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Algebra(cols={}, mods={:?}, meta={:?})",
            self.cols(),
            self.mods.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            self.meta
        )
    }
}

impl Algebra {
    pub fn cols(&self) -> usize {
        self.mods.len()
    }

    pub fn is_finite(&self) -> bool {
        self.mods.iter().all(|m| !m.is_zero())
    }

    /// Number of elements, when finite.
    pub fn size(&self) -> Option<BigInt> {
        if !self.is_finite() {
            return None;
        }
        Some(self.mods.iter().product())
    }

    pub fn tag(&self) -> &AlgebraTag {
        match &self.meta {
            AlgebraMeta::Finite { tag, .. } => tag,
            AlgebraMeta::OverOrder { tag, .. } => tag,
        }
    }

    /// Construct and validate: commutativity, associativity, unity, and
    /// compatibility of the tensor with the additive orders.
    pub fn new(
        mods: Vec<BigInt>,
        mul: Vec<Vec<Vec<BigInt>>>,
        one: Vec<BigInt>,
        meta: AlgebraMeta,
    ) -> Result<Algebra> {
        let r = mods.len();
        if r == 0 || mul.len() != r || mul.iter().any(|x| x.len() != r) || one.len() != r {
            return Err(Error::InconsistentPresentation(
                "tensor dimensions do not match rank".into(),
            ));
        }
        let mut alg = Algebra {
            mods,
            mul,
            one,
            meta,
        };
        for i in 0..r {
            for j in 0..r {
                let red = alg.reduce(alg.mul[i][j].clone());
                alg.mul[i][j] = red;
            }
        }
        alg.one = alg.reduce(alg.one.clone());
        // Additive-order compatibility: mods[i]·(e_i e_j) = 0.
        for i in 0..r {
            if alg.mods[i].is_zero() {
                continue;
            }
            for j in 0..r {
                let scaled: Coords = alg.mul[i][j].iter().map(|c| c * &alg.mods[i]).collect();
                if !alg.is_zero_coords(&scaled) {
                    return Err(Error::InconsistentPresentation(format!(
                        "mods[{i}]·(e{i}·e{j}) ≠ 0"
                    )));
                }
            }
        }
        // Commutativity.
        for i in 0..r {
            for j in (i + 1)..r {
                if alg.mul[i][j] != alg.mul[j][i] {
                    return Err(Error::InconsistentPresentation(format!(
                        "e{i}·e{j} ≠ e{j}·e{i}"
                    )));
                }
            }
        }
        // Unity.
        for i in 0..r {
            let mut e = vec![BigInt::zero(); r];
            e[i] = BigInt::one();
            if alg.mul_elt(&alg.one, &e) != e {
                return Err(Error::InconsistentPresentation(format!("1·e{i} ≠ e{i}")));
            }
        }
        // Associativity on basis triples.
        for i in 0..r {
            for j in 0..r {
                let eij = alg.mul[i][j].clone();
                for k in 0..r {
                    let mut ek = vec![BigInt::zero(); r];
                    ek[k] = BigInt::one();
                    let left = alg.mul_elt(&eij, &ek);
                    let mut ei = vec![BigInt::zero(); r];
                    ei[i] = BigInt::one();
                    let right = alg.mul_elt(&ei, &alg.mul[j][k]);
                    if left != right {
                        return Err(Error::InconsistentPresentation(format!(
                            "(e{i}·e{j})·e{k} ≠ e{i}·(e{j}·e{k})"
                        )));
                    }
                }
            }
        }
        Ok(alg)
    }

    pub fn reduce(&self, mut x: Coords) -> Coords {
        for (k, m) in self.mods.iter().enumerate() {
            if !m.is_zero() {
                x[k] = x[k].mod_floor(m);
            }
        }
        x
    }

    pub fn is_zero_coords(&self, x: &Coords) -> bool {
        self.reduce(x.clone()).iter().all(|c| c.is_zero())
    }

    pub fn zero_elt(&self) -> Coords {
        vec![BigInt::zero(); self.cols()]
    }

    pub fn add_elt(&self, x: &Coords, y: &Coords) -> Coords {
        self.reduce(x.iter().zip(y).map(|(a, b)| a + b).collect())
    }

    pub fn sub_elt(&self, x: &Coords, y: &Coords) -> Coords {
        self.reduce(x.iter().zip(y).map(|(a, b)| a - b).collect())
    }

    pub fn mul_elt(&self, x: &Coords, y: &Coords) -> Coords {
        let r = self.cols();
        let mut out = vec![BigInt::zero(); r];
        for i in 0..r {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..r {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for k in 0..r {
                    if !self.mul[i][j][k].is_zero() {
                        out[k] += &c * &self.mul[i][j][k];
                    }
                }
            }
        }
        self.reduce(out)
    }

    /// Multiplication-by-x matrix: row i = coordinates of `e_i · x`.
    pub fn mult_matrix(&self, x: &Coords) -> IntMatrix {
        let r = self.cols();
        let mut rows = Vec::with_capacity(r);
        for i in 0..r {
            let mut e = vec![BigInt::zero(); r];
            e[i] = BigInt::one();
            rows.push(self.mul_elt(&e, x));
        }
        IntMatrix::from_rows(rows)
    }

    pub fn pow_elt(&self, x: &Coords, mut e: u64) -> Coords {
        let mut base = x.clone();
        let mut acc = self.one.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_elt(&acc, &base);
            }
            base = self.mul_elt(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Rows `mods[k]·e_k` for torsion columns; every additive subgroup
    /// lattice contains them.
    pub fn mods_rows(&self) -> Vec<Coords> {
        let mut rows = Vec::new();
        for (k, m) in self.mods.iter().enumerate() {
            if !m.is_zero() {
                let mut row = vec![BigInt::zero(); self.cols()];
                row[k] = m.clone();
                rows.push(row);
            }
        }
        rows
    }

    /// Enumerate all elements (finite algebras only), within `bound`.
    pub fn elements(&self, bound: u64) -> Result<Vec<Coords>> {
        let size = self
            .size()
            .ok_or_else(|| Error::UnsupportedRing("cannot enumerate an infinite algebra".into()))?;
        if size > BigInt::from(bound) {
            return Err(Error::SizeBoundExceeded(format!(
                "ring size {size} exceeds bound {bound}"
            )));
        }
        let mut out = vec![self.zero_elt()];
        for (k, m) in self.mods.iter().enumerate() {
            let mk = m.to_u64_digits().1.first().copied().unwrap_or(0);
            let mut next = Vec::with_capacity(out.len() * mk as usize);
            for x in &out {
                let mut c = BigInt::zero();
                for _ in 0..mk {
                    let mut y = x.clone();
                    y[k] = c.clone();
                    next.push(y);
                    c += 1;
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Inverse of `x`, if `x` is a unit.
    pub fn try_inverse(&self, x: &Coords) -> Option<Coords> {
        let m = self.mult_matrix(x);
        let rows = self.mods_rows();
        let work = if rows.is_empty() {
            m
        } else {
            m.stack(&IntMatrix::from_rows(rows))
        };
        let sol = intlat::solve_mod(&work, &self.one, 0)?;
        Some(self.reduce(sol[..self.cols()].to_vec()))
    }

    pub fn is_unit(&self, x: &Coords) -> bool {
        self.try_inverse(x).is_some()
    }

    /// Zero-divisor test via the kernel of the multiplication map: `x` is a
    /// zero divisor iff some nonzero element multiplies it to zero.
    pub fn is_zero_divisor(&self, x: &Coords) -> bool {
        if self.is_zero_coords(x) {
            return true;
        }
        let m = self.mult_matrix(x);
        // Kernel of y ↦ y·M modulo the additive relations.
        let mods = self.mods_rows();
        let r = self.cols();
        // Solve z·M ∈ Λ_mods: stack variables (z | w) with z·M − w·mods = 0.
        let mut stacked_rows: Vec<Coords> = (0..r).map(|i| m.row(i).to_vec()).collect();
        for mr in &mods {
            stacked_rows.push(mr.iter().map(|c| -c).collect());
        }
        let stacked = IntMatrix::from_rows(stacked_rows);
        let kern = intlat::left_kernel(&stacked);
        for i in 0..kern.rows() {
            let z = kern.row(i)[..r].to_vec();
            if !self.is_zero_coords(&z) {
                return true;
            }
        }
        false
    }

    /// Nilpotency test by repeated squaring: in a finite ring `x` is
    /// nilpotent iff `x^(2^k) = 0` once `2^k ≥ |R|`.
    pub fn is_nilpotent(&self, x: &Coords) -> bool {
        let Some(size) = self.size() else {
            // Over an order: nilpotents are supported only on torsion columns
            // killed by the (squared-to-zero) idealization module.
            let mut y = x.clone();
            let blocks = match &self.meta {
                AlgebraMeta::OverOrder { blocks, .. } => *blocks,
                AlgebraMeta::Finite { .. } => unreachable!(),
            };
            if y[..2 * blocks].iter().any(|c| !c.is_zero()) {
                return false;
            }
            y = self.mul_elt(&y, &y);
            return self.is_zero_coords(&y);
        };
        let mut steps = 1u32;
        let mut p = BigInt::from(2);
        while p < size {
            p *= 2;
            steps += 1;
        }
        let mut y = x.clone();
        for _ in 0..=steps {
            if self.is_zero_coords(&y) {
                return true;
            }
            y = self.mul_elt(&y, &y);
        }
        self.is_zero_coords(&y)
    }
}

/// A subgroup of an algebra's additive group: trimmed row-HNF basis over the
/// algebra's columns, always containing the additive-order rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZLattice {
    pub basis: IntMatrix,
}

impl std::fmt::Debug for ZLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ZLattice({:?})", self.basis)
    }
}

impl ZLattice {
    pub fn from_rows(alg: &Algebra, rows: Vec<Coords>) -> ZLattice {
        let mut all = rows;
        all.extend(alg.mods_rows());
        if all.is_empty() {
            return ZLattice {
                basis: IntMatrix::zero(0, alg.cols()),
            };
        }
        let h = intlat::hnf(&IntMatrix::from_rows(all))
            .h
            .without_zero_rows();
        ZLattice { basis: h }
    }

    pub fn zero(alg: &Algebra) -> ZLattice {
        ZLattice::from_rows(alg, Vec::new())
    }

    pub fn full(alg: &Algebra) -> ZLattice {
        let n = alg.cols();
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![BigInt::zero(); n];
                r[i] = BigInt::one();
                r
            })
            .collect();
        ZLattice::from_rows(alg, rows)
    }

    pub fn contains(&self, x: &Coords) -> bool {
        intlat::lattice_contains(&self.basis, x)
    }

    pub fn subset(&self, other: &ZLattice) -> bool {
        intlat::lattice_subset(&self.basis, &other.basis)
    }

    pub fn sum(&self, other: &ZLattice) -> ZLattice {
        ZLattice {
            basis: intlat::lattice_sum(&self.basis, &other.basis),
        }
    }

    /// Is this exactly the zero subgroup (mods rows only)?
    pub fn is_zero_subgroup(&self, alg: &Algebra) -> bool {
        self == &ZLattice::zero(alg)
    }

    /// Basis rows reduced to ring elements, zero rows dropped.
    pub fn gens(&self, alg: &Algebra) -> Vec<Coords> {
        (0..self.basis.rows())
            .map(|i| alg.reduce(self.basis.row(i).to_vec()))
            .filter(|x| !alg.is_zero_coords(x))
            .collect()
    }

    /// Elements of the subgroup as ring elements (finite algebras only).
    pub fn elements(&self, alg: &Algebra, bound: u64) -> Result<Vec<Coords>> {
        let all = alg.elements(bound)?;
        Ok(all.into_iter().filter(|x| self.contains(x)).collect())
    }
}

/// `Z/n` as a rank-1 algebra.
pub fn zn(n: u64) -> Algebra {
    assert!(n >= 2);
    Algebra::new(
        vec![BigInt::from(n)],
        vec![vec![vec![BigInt::one()]]],
        vec![BigInt::one()],
        AlgebraMeta::Finite {
            n,
            tag: AlgebraTag::Plain,
        },
    )
    .expect("Z/n is a ring")
}

/// The field with four elements, basis `{1, w}`, `w² = 1 + w`.
pub fn f4() -> Algebra {
    let z = BigInt::zero;
    let o = BigInt::one;
    Algebra::new(
        vec![BigInt::from(2), BigInt::from(2)],
        vec![
            vec![vec![o(), z()], vec![z(), o()]],
            vec![vec![z(), o()], vec![o(), o()]],
        ],
        vec![o(), z()],
        AlgebraMeta::Finite {
            n: 2,
            tag: AlgebraTag::Plain,
        },
    )
    .expect("F4 is a ring")
}

/// Direct product of finite algebras.
pub fn product(factors: &[Algebra]) -> Result<Algebra> {
    let mut mods = Vec::new();
    let mut offsets = Vec::new();
    let mut n = 1u64;
    for f in factors {
        let AlgebraMeta::Finite { n: fac_n, .. } = f.meta else {
            return Err(Error::UnsupportedRing(
                "product of non-finite algebras".into(),
            ));
        };
        offsets.push(mods.len());
        mods.extend(f.mods.iter().cloned());
        n = num_integer::lcm(n, fac_n);
    }
    let r = mods.len();
    let mut mul = vec![vec![vec![BigInt::zero(); r]; r]; r];
    let mut one = vec![BigInt::zero(); r];
    for (fi, f) in factors.iter().enumerate() {
        let off = offsets[fi];
        for i in 0..f.cols() {
            for j in 0..f.cols() {
                for k in 0..f.cols() {
                    mul[off + i][off + j][off + k] = f.mul[i][j][k].clone();
                }
            }
            one[off + i] = f.one[i].clone();
        }
    }
    Algebra::new(
        mods,
        mul,
        one,
        AlgebraMeta::Finite {
            n,
            tag: AlgebraTag::Product,
        },
    )
}

/// Presentation of a module over an algebra: `R^gens / ⟨rels⟩` with each
/// relation a row of ring elements.
#[derive(Clone, Debug)]
pub struct ModulePresentation {
    pub gens: usize,
    pub rels: Vec<Vec<Coords>>,
}

/// A module in cyclic-decomposition form, with the action of the base-ring
/// basis elements on the module basis.
pub struct DecomposedModule {
    /// Additive order of each module basis element.
    pub mods: Vec<BigInt>,
    /// `action[b]` = matrix of multiplication by ring basis element `e_b`
    /// (rows = images of module basis elements).
    pub action: Vec<IntMatrix>,
    /// Images of the presentation generators in the decomposed basis.
    pub gen_images: Vec<Coords>,
}

/// Decompose `R^gens / ⟨rels⟩` into cyclic summands via SNF.
pub fn decompose_module(base: &Algebra, pres: &ModulePresentation) -> Result<DecomposedModule> {
    let r = base.cols();
    let g = pres.gens;
    if g == 0 {
        return Ok(DecomposedModule {
            mods: Vec::new(),
            action: vec![IntMatrix::zero(0, 0); r],
            gen_images: Vec::new(),
        });
    }
    let width = g * r;
    let mut rel_rows: Vec<Coords> = Vec::new();
    for rel in &pres.rels {
        if rel.len() != g || rel.iter().any(|e| e.len() != r) {
            return Err(Error::InconsistentPresentation(
                "relation width does not match generators".into(),
            ));
        }
        // Close each relation under the ring action.
        for b in 0..r {
            let mut eb = vec![BigInt::zero(); r];
            eb[b] = BigInt::one();
            let mut row = Vec::with_capacity(width);
            for comp in rel {
                row.extend(base.mul_elt(&eb, comp));
            }
            rel_rows.push(row);
        }
    }
    // Additive orders of the free presentation.
    for j in 0..g {
        for (k, m) in base.mods.iter().enumerate() {
            if !m.is_zero() {
                let mut row = vec![BigInt::zero(); width];
                row[j * r + k] = m.clone();
                rel_rows.push(row);
            }
        }
    }
    if rel_rows.is_empty() {
        return Err(Error::UnsupportedRing(
            "free module over an infinite base is not supported".into(),
        ));
    }
    let rel = IntMatrix::from_rows(rel_rows);
    let full = intlat::snf_ext(&rel);
    let t = rel.rows().min(width);
    let mut kept = Vec::new();
    for i in 0..width {
        let d = if i < t {
            full.s.get(i, i).clone()
        } else {
            BigInt::zero()
        };
        if d.is_zero() {
            return Err(Error::UnsupportedRing(
                "module has a free summand; only torsion modules are supported".into(),
            ));
        }
        if !d.is_one() {
            kept.push((i, d));
        }
    }
    // Quotient coordinates: x ↦ (x·V) at kept indices; lift of kept basis i
    // is row i of V⁻¹.
    let project = |x: &[BigInt]| -> Coords {
        let xv = IntMatrix::from_rows(vec![x.to_vec()]).mul(&full.v);
        kept.iter()
            .map(|(i, d)| xv.get(0, *i).mod_floor(d))
            .collect()
    };
    let mut action = Vec::with_capacity(r);
    for b in 0..r {
        let mut eb = vec![BigInt::zero(); r];
        eb[b] = BigInt::one();
        let mut rows = Vec::with_capacity(kept.len());
        for (i, _) in &kept {
            let lift = full.v_inv.row(*i).to_vec();
            // Act blockwise: each generator block is a ring element.
            let mut img = Vec::with_capacity(width);
            for j in 0..g {
                let comp = lift[j * r..(j + 1) * r].to_vec();
                img.extend(base.mul_elt(&eb, &comp));
            }
            rows.push(project(&img));
        }
        action.push(if kept.is_empty() {
            IntMatrix::zero(0, 0)
        } else {
            IntMatrix::from_rows(rows)
        });
    }
    let mut gen_images = Vec::with_capacity(g);
    for j in 0..g {
        let mut x = vec![BigInt::zero(); width];
        for (k, c) in base.one.iter().enumerate() {
            x[j * r + k] = c.clone();
        }
        gen_images.push(project(&x));
    }
    Ok(DecomposedModule {
        mods: kept.into_iter().map(|(_, d)| d).collect(),
        action,
        gen_images,
    })
}

/// Nagata idealization `R ⊕ M` with `M² = 0`.
pub fn idealization(base: &Algebra, pres: &ModulePresentation) -> Result<Algebra> {
    let AlgebraMeta::Finite { n, .. } = base.meta else {
        return Err(Error::UnsupportedRing(
            "idealization over an order goes through the over-order constructor".into(),
        ));
    };
    let dm = decompose_module(base, pres)?;
    let r = base.cols();
    let t = dm.mods.len();
    let total = r + t;
    let mut mods = base.mods.clone();
    mods.extend(dm.mods.iter().cloned());
    let mut mul = vec![vec![vec![BigInt::zero(); total]; total]; total];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                mul[i][j][k] = base.mul[i][j][k].clone();
            }
        }
        for j in 0..t {
            // e_i · m_j given by the module action.
            for k in 0..t {
                mul[i][r + j][r + k] = dm.action[i].get(j, k).clone();
                mul[r + j][i][r + k] = dm.action[i].get(j, k).clone();
            }
        }
    }
    // M · M = 0: already zero.
    let mut one = base.one.clone();
    one.extend(vec![BigInt::zero(); t]);
    let mut exponent = n;
    for m in &dm.mods {
        let mv = m.to_u64_digits().1.first().copied().unwrap_or(1);
        exponent = num_integer::lcm(exponent, mv);
    }
    Algebra::new(
        mods,
        mul,
        one,
        AlgebraMeta::Finite {
            n: exponent,
            tag: AlgebraTag::Idealization { base_cols: r },
        },
    )
}

/// Truncated polynomial ring `R[x]/(x^k)`.
pub fn trunc_poly(base: &Algebra, k: usize) -> Result<Algebra> {
    let AlgebraMeta::Finite { n, .. } = base.meta else {
        return Err(Error::UnsupportedRing(
            "truncated polynomials over an order go through the over-order constructor".into(),
        ));
    };
    if k == 0 {
        return Err(Error::InconsistentPresentation(
            "k must be at least 1".into(),
        ));
    }
    let r = base.cols();
    let total = r * k;
    let mut mods = Vec::with_capacity(total);
    for _ in 0..k {
        mods.extend(base.mods.iter().cloned());
    }
    let mut mul = vec![vec![vec![BigInt::zero(); total]; total]; total];
    for s in 0..k {
        for t in 0..k {
            if s + t >= k {
                continue;
            }
            for i in 0..r {
                for j in 0..r {
                    for l in 0..r {
                        mul[s * r + i][t * r + j][(s + t) * r + l] = base.mul[i][j][l].clone();
                    }
                }
            }
        }
    }
    let mut one = vec![BigInt::zero(); total];
    one[..r].clone_from_slice(&base.one);
    Algebra::new(
        mods,
        mul,
        one,
        AlgebraMeta::Finite {
            n,
            tag: AlgebraTag::TruncPoly { base_cols: r, k },
        },
    )
}

/// Group ring `R[Z/m]`.
pub fn group_ring(base: &Algebra, m: usize) -> Result<Algebra> {
    let AlgebraMeta::Finite { n, .. } = base.meta else {
        return Err(Error::UnsupportedRing(
            "group rings over an order go through the over-order constructor".into(),
        ));
    };
    if m == 0 {
        return Err(Error::InconsistentPresentation(
            "group order must be ≥ 1".into(),
        ));
    }
    let r = base.cols();
    let total = r * m;
    let mut mods = Vec::with_capacity(total);
    for _ in 0..m {
        mods.extend(base.mods.iter().cloned());
    }
    let mut mul = vec![vec![vec![BigInt::zero(); total]; total]; total];
    for s in 0..m {
        for t in 0..m {
            let st = (s + t) % m;
            for i in 0..r {
                for j in 0..r {
                    for l in 0..r {
                        mul[s * r + i][t * r + j][st * r + l] = base.mul[i][j][l].clone();
                    }
                }
            }
        }
    }
    let mut one = vec![BigInt::zero(); total];
    one[..r].clone_from_slice(&base.one);
    Algebra::new(
        mods,
        mul,
        one,
        AlgebraMeta::Finite {
            n,
            tag: AlgebraTag::GroupRing {
                base_cols: r,
                order: m,
            },
        },
    )
}

/// A `Z`-linear map between algebra coordinate modules, row `i` = image of
/// the `i`-th source basis element.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearMap {
    pub m: IntMatrix,
}

impl std::fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LinearMap({:?})", self.m)
    }
}

impl LinearMap {
    pub fn identity(n: usize) -> LinearMap {
        LinearMap {
            m: IntMatrix::identity(n),
        }
    }

    pub fn apply(&self, x: &Coords) -> Coords {
        IntMatrix::from_rows(vec![x.clone()])
            .mul(&self.m)
            .row(0)
            .to_vec()
    }
}

/// Quotient of a finite algebra by an ideal lattice, with the projection and
/// a lift of the quotient basis.
pub struct QuotientAlgebra {
    pub alg: Algebra,
    pub proj: LinearMap,
    /// Lift of each quotient basis element back to the source.
    pub lifts: Vec<Coords>,
}

pub fn quotient_by_ideal(alg: &Algebra, ideal: &ZLattice) -> Result<QuotientAlgebra> {
    if !alg.is_finite() {
        return Err(Error::UnsupportedRing(
            "quotient of an infinite algebra".into(),
        ));
    }
    let r = alg.cols();
    // Verify it is an ideal: closed under multiplication by basis elements.
    for g in ideal.gens(alg) {
        for b in 0..r {
            let mut eb = vec![BigInt::zero(); r];
            eb[b] = BigInt::one();
            let prod = alg.mul_elt(&eb, &g);
            if !ideal.contains(&prod) {
                return Err(Error::InconsistentPresentation(
                    "lattice is not an ideal".into(),
                ));
            }
        }
    }
    let full = intlat::snf_ext(&ideal.basis);
    let t = ideal.basis.rows().min(r);
    let mut kept: Vec<(usize, BigInt)> = Vec::new();
    for i in 0..r {
        let d = if i < t {
            full.s.get(i, i).clone()
        } else {
            BigInt::zero()
        };
        if d.is_zero() {
            return Err(Error::InconsistentPresentation(
                "ideal lattice does not have full rank".into(),
            ));
        }
        if !d.is_one() {
            kept.push((i, d));
        }
    }
    if kept.is_empty() {
        // Quotient is the zero ring; represent as Z/1? Not a unital ring with
        // 1 ≠ 0 — reject, callers never quotient by the unit ideal.
        return Err(Error::InconsistentPresentation(
            "quotient by the unit ideal".into(),
        ));
    }
    let project = |x: &[BigInt]| -> Coords {
        let xv = IntMatrix::from_rows(vec![x.to_vec()]).mul(&full.v);
        kept.iter()
            .map(|(i, d)| xv.get(0, *i).mod_floor(d))
            .collect()
    };
    let lifts: Vec<Coords> = kept
        .iter()
        .map(|(i, _)| full.v_inv.row(*i).to_vec())
        .collect();
    let q = kept.len();
    let mut mul = vec![vec![vec![BigInt::zero(); q]; q]; q];
    for i in 0..q {
        for j in 0..q {
            let prod = alg.mul_elt(&alg.reduce(lifts[i].clone()), &alg.reduce(lifts[j].clone()));
            mul[i][j] = project(&prod);
        }
    }
    let one = project(&alg.one);
    let mods: Vec<BigInt> = kept.iter().map(|(_, d)| d.clone()).collect();
    let mut n = 1u64;
    for m in &mods {
        n = num_integer::lcm(n, m.to_u64_digits().1.first().copied().unwrap_or(1));
    }
    let qalg = Algebra::new(
        mods,
        mul,
        one,
        AlgebraMeta::Finite {
            n,
            tag: AlgebraTag::Quotient,
        },
    )?;
    let mut proj_rows = Vec::with_capacity(r);
    for i in 0..r {
        let mut e = vec![BigInt::zero(); r];
        e[i] = BigInt::one();
        proj_rows.push(project(&e));
    }
    Ok(QuotientAlgebra {
        alg: qalg,
        proj: LinearMap {
            m: IntMatrix::from_rows(proj_rows),
        },
        lifts,
    })
}

/// Nilradical of a finite algebra, as a lattice; the set of nilpotents of a
/// commutative ring is closed under addition, so its span is itself.
pub fn nilradical(alg: &Algebra, bound: u64) -> Result<ZLattice> {
    let elts = alg.elements(bound)?;
    let nil: Vec<Coords> = elts.into_iter().filter(|x| alg.is_nilpotent(x)).collect();
    Ok(ZLattice::from_rows(alg, nil))
}

/// Quotient by the nilradical, with the quotient morphism data.
pub fn reduce_ring(alg: &Algebra, bound: u64) -> Result<(QuotientAlgebra, ZLattice)> {
    let nil = nilradical(alg, bound)?;
    if nil.is_zero_subgroup(alg) {
        // Already reduced: identity quotient.
        let q = QuotientAlgebra {
            alg: alg.clone(),
            proj: LinearMap::identity(alg.cols()),
            lifts: (0..alg.cols())
                .map(|i| {
                    let mut e = vec![BigInt::zero(); alg.cols()];
                    e[i] = BigInt::one();
                    e
                })
                .collect(),
        };
        return Ok((q, nil));
    }
    Ok((quotient_by_ideal(alg, &nil)?, nil))
}

/// All maximal ideals of a finite algebra, via idempotent splitting of the
/// reduced quotient.
pub fn maximal_ideals(alg: &Algebra, bound: u64) -> Result<Vec<ZLattice>> {
    let (red, _) = reduce_ring(alg, bound)?;
    let relts = red.alg.elements(bound)?;
    // All idempotents of the reduced ring.
    let idems: Vec<Coords> = relts
        .iter()
        .filter(|e| red.alg.mul_elt(e, e) == **e && !red.alg.is_zero_coords(e))
        .cloned()
        .collect();
    // Primitive = minimal nonzero under e ≤ f ⟺ ef = e.
    let mut primitive = Vec::new();
    'outer: for e in &idems {
        for f in &idems {
            if f != e && red.alg.mul_elt(e, f) == *f {
                continue 'outer; // f < e, so e is not minimal
            }
        }
        primitive.push(e.clone());
    }
    primitive.sort();
    let mut out = Vec::new();
    for e in &primitive {
        // Maximal ideal of the reduced ring: ann-style {x : x·e = 0}.
        let killed: Vec<Coords> = relts
            .iter()
            .filter(|x| red.alg.is_zero_coords(&red.alg.mul_elt(x, e)))
            .cloned()
            .collect();
        // Pull back along the projection.
        let pre: Vec<Coords> = alg
            .elements(bound)?
            .into_iter()
            .filter(|x| {
                let px = red.alg.reduce(red.proj.apply(x));
                killed.contains(&px)
            })
            .collect();
        out.push(ZLattice::from_rows(alg, pre));
    }
    out.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
    out.dedup();
    Ok(out)
}

/// Subring generated by `1` and the given elements: iterate span closure
/// under multiplication until the lattice stabilizes.
pub fn subring_closure(alg: &Algebra, gens: &[Coords]) -> ZLattice {
    let mut rows: Vec<Coords> = vec![alg.one.clone()];
    rows.extend(gens.iter().cloned());
    let mut lat = ZLattice::from_rows(alg, rows);
    loop {
        let basis = lat.gens(alg);
        let mut new_rows = basis.clone();
        for a in &basis {
            for b in &basis {
                new_rows.push(alg.mul_elt(a, b));
            }
        }
        let next = ZLattice::from_rows(alg, new_rows);
        if next == lat {
            return lat;
        }
        lat = next;
    }
}

/// Check that a lattice is a subring containing 1.
pub fn is_subring(alg: &Algebra, lat: &ZLattice) -> bool {
    if !lat.contains(&alg.one) {
        return false;
    }
    let basis = lat.gens(alg);
    for a in &basis {
        for b in &basis {
            if !lat.contains(&alg.mul_elt(a, b)) {
                return false;
            }
        }
    }
    true
}

/// Result of a tensor-square construction `B ⊗_A B`.
pub struct TensorSquare {
    pub alg: Algebra,
    /// First embedding `b ↦ b⊗1`.
    pub j1: LinearMap,
    /// Second embedding `b ↦ 1⊗b`.
    pub j2: LinearMap,
    /// Multiplication retraction `s⊗s' ↦ ss'` back onto `B`.
    pub retraction: LinearMap,
}

/// `B ⊗_A B` for a finite extension, presented on the `Z`-tensor basis
/// `b_i ⊗ b_j` modulo the A-bilinearity ideal.
pub fn tensor_square(alg: &Algebra, a_sub: &ZLattice, bound: u64) -> Result<TensorSquare> {
    if !alg.is_finite() {
        return Err(Error::UnsupportedRing(
            "tensor square of an infinite algebra".into(),
        ));
    }
    let r = alg.cols();
    if r * r > 144 {
        return Err(Error::SizeBoundExceeded(format!(
            "tensor square on {r}² columns exceeds the supported window"
        )));
    }
    let width = r * r;
    let idx = |i: usize, j: usize| i * r + j;
    // Additive orders of b_i ⊗ b_j over Z.
    let t0_mods: Vec<BigInt> = (0..width)
        .map(|c| alg.mods[c / r].gcd(&alg.mods[c % r]))
        .collect();
    let t0_reduce = |x: &mut Vec<BigInt>| {
        for (c, m) in t0_mods.iter().enumerate() {
            if !m.is_zero() {
                x[c] = x[c].mod_floor(m);
            }
        }
    };
    // On-demand product of T0 vectors via (b_i⊗b_j)(b_k⊗b_l) = b_ib_k ⊗ b_jb_l.
    let t0_mul = |x: &[BigInt], y: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); width];
        for i in 0..r {
            for j in 0..r {
                let xc = &x[idx(i, j)];
                if xc.is_zero() {
                    continue;
                }
                for k in 0..r {
                    for l in 0..r {
                        let yc = &y[idx(k, l)];
                        if yc.is_zero() {
                            continue;
                        }
                        let coeff = xc * yc;
                        for p in 0..r {
                            let cip = &alg.mul[i][k][p];
                            if cip.is_zero() {
                                continue;
                            }
                            for q in 0..r {
                                let cjq = &alg.mul[j][l][q];
                                if !cjq.is_zero() {
                                    out[idx(p, q)] += &coeff * cip * cjq;
                                }
                            }
                        }
                    }
                }
            }
        }
        t0_reduce(&mut out);
        out
    };
    let embed = |x: &Coords, first: bool| -> Vec<BigInt> {
        // x⊗1 (first) or 1⊗x.
        let mut out = vec![BigInt::zero(); width];
        for i in 0..r {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..r {
                if alg.one[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &alg.one[j];
                if first {
                    out[idx(i, j)] += c;
                } else {
                    out[idx(j, i)] += c;
                }
            }
        }
        t0_reduce(&mut out);
        out
    };
    // Bilinearity ideal generators: (a·b_i)⊗b_j − b_i⊗(a·b_j).
    let mut ideal_gens: Vec<Vec<BigInt>> = Vec::new();
    for a in a_sub.gens(alg) {
        for i in 0..r {
            let mut ei = vec![BigInt::zero(); r];
            ei[i] = BigInt::one();
            let ai = alg.mul_elt(&a, &ei);
            for j in 0..r {
                let mut ej = vec![BigInt::zero(); r];
                ej[j] = BigInt::one();
                let aj = alg.mul_elt(&a, &ej);
                let mut row = vec![BigInt::zero(); width];
                for k in 0..r {
                    row[idx(k, j)] += &ai[k];
                    row[idx(i, k)] -= &aj[k];
                }
                t0_reduce(&mut row);
                ideal_gens.push(row);
            }
        }
    }
    // One round of multiplication by the T0 basis closes the span to an ideal.
    let mut closed = ideal_gens.clone();
    for g in &ideal_gens {
        for b in 0..width {
            let mut eb = vec![BigInt::zero(); width];
            eb[b] = BigInt::one();
            closed.push(t0_mul(g, &eb));
        }
    }
    for (c, m) in t0_mods.iter().enumerate() {
        let mut row = vec![BigInt::zero(); width];
        row[c] = m.clone();
        closed.push(row);
    }
    let rel = IntMatrix::from_rows(closed);
    let full = intlat::snf_ext(&rel);
    let t = rel.rows().min(width);
    let mut kept: Vec<(usize, BigInt)> = Vec::new();
    let mut size = BigInt::one();
    for i in 0..width {
        let d = if i < t {
            full.s.get(i, i).clone()
        } else {
            BigInt::zero()
        };
        if d.is_zero() {
            return Err(Error::InconsistentPresentation(
                "tensor square acquired a free summand".into(),
            ));
        }
        if !d.is_one() {
            size *= &d;
            kept.push((i, d));
        }
    }
    if size > BigInt::from(bound) {
        return Err(Error::SizeBoundExceeded(format!(
            "tensor square size {size} exceeds bound {bound}"
        )));
    }
    let project = |x: &[BigInt]| -> Coords {
        let xv = IntMatrix::from_rows(vec![x.to_vec()]).mul(&full.v);
        kept.iter()
            .map(|(i, d)| xv.get(0, *i).mod_floor(d))
            .collect()
    };
    let lifts: Vec<Vec<BigInt>> = kept
        .iter()
        .map(|(i, _)| full.v_inv.row(*i).to_vec())
        .collect();
    let q = kept.len();
    let mut mul = vec![vec![vec![BigInt::zero(); q]; q]; q];
    for i in 0..q {
        for j in 0..q {
            mul[i][j] = project(&t0_mul(&lifts[i], &lifts[j]));
        }
    }
    let one_t0 = embed(&alg.one, true);
    let one = project(&one_t0);
    let mods: Vec<BigInt> = kept.iter().map(|(_, d)| d.clone()).collect();
    let mut n = 1u64;
    for m in &mods {
        n = num_integer::lcm(n, m.to_u64_digits().1.first().copied().unwrap_or(1));
    }
    let talg = Algebra::new(
        mods,
        mul,
        one,
        AlgebraMeta::Finite {
            n,
            tag: AlgebraTag::TensorSquare { base_cols: r },
        },
    )?;
    let mut j1_rows = Vec::with_capacity(r);
    let mut j2_rows = Vec::with_capacity(r);
    for i in 0..r {
        let mut e = vec![BigInt::zero(); r];
        e[i] = BigInt::one();
        j1_rows.push(project(&embed(&e, true)));
        j2_rows.push(project(&embed(&e, false)));
    }
    // Retraction on the quotient basis: expand the lift on b_i⊗b_j and
    // multiply components back in B.
    let mut retr_rows = Vec::with_capacity(q);
    for lift in &lifts {
        let mut img = alg.zero_elt();
        for i in 0..r {
            for j in 0..r {
                let c = &lift[idx(i, j)];
                if c.is_zero() {
                    continue;
                }
                let prod = alg.mul[i][j].clone();
                for k in 0..r {
                    img[k] += c * &prod[k];
                }
            }
        }
        retr_rows.push(alg.reduce(img));
    }
    Ok(TensorSquare {
        alg: talg,
        j1: LinearMap {
            m: IntMatrix::from_rows(j1_rows),
        },
        j2: LinearMap {
            m: IntMatrix::from_rows(j2_rows),
        },
        retraction: LinearMap {
            m: IntMatrix::from_rows(retr_rows),
        },
    })
}

/// Free algebra over an order: `blocks` order-basis elements, with an
/// order-level multiplication table whose entries are `x + y·ω_D` pairs.
pub fn over_order_free(
    desc: &QuadOrderDesc,
    blocks: usize,
    table: &dyn Fn(usize, usize) -> Vec<(usize, BigInt, BigInt)>,
    tag: AlgebraTag,
) -> Result<Algebra> {
    // ω_D = (D + √D)/2 satisfies ω² = D·ω − (D²−D)/4.
    let d = &desc.d;
    let tr = d.clone();
    let nm = (d * d - d) / BigInt::from(4);
    let cols = 2 * blocks;
    let mut mul = vec![vec![vec![BigInt::zero(); cols]; cols]; cols];
    // Column 2b = g_b·1, column 2b+1 = g_b·ω_D.
    for s in 0..blocks {
        for t in 0..blocks {
            let entries = table(s, t);
            for pow_s in 0..2usize {
                for pow_t in 0..2usize {
                    // (g_s ω^ps)(g_t ω^pt) = Σ_r (x_r + y_r ω)·g_r·ω^{ps+pt}
                    let mut out = vec![BigInt::zero(); cols];
                    for (rblk, x, y) in &entries {
                        // (x + yω)·ω^(ps+pt) expanded on {1, ω}.
                        let (c0, c1) = match pow_s + pow_t {
                            0 => (x.clone(), y.clone()),
                            1 => (-(y * &nm), x + y * &tr),
                            2 => {
                                // (x + yω)·ω² = (x + yω)(tr·ω − nm)
                                let a0 = -(x * &nm);
                                let a1 = x * &tr;
                                let b0 = -(y * &tr) * &nm;
                                let b1 = y * (&tr * &tr - &nm);
                                (a0 + b0, a1 + b1)
                            }
                            _ => unreachable!(),
                        };
                        out[2 * rblk] += c0;
                        out[2 * rblk + 1] += c1;
                    }
                    mul[2 * s + pow_s][2 * t + pow_t] = out;
                }
            }
        }
    }
    let mut one = vec![BigInt::zero(); cols];
    one[0] = BigInt::one();
    Algebra::new(
        vec![BigInt::zero(); cols],
        mul,
        one,
        AlgebraMeta::OverOrder {
            d0: desc.d0.clone(),
            f: desc.conductor.clone(),
            blocks,
            tag,
        },
    )
}

/// `O_D[x]/(x^k)` over the order of discriminant `D`.
pub fn over_order_trunc_poly(desc: &QuadOrderDesc, k: usize) -> Result<Algebra> {
    over_order_free(
        desc,
        k,
        &|s, t| {
            if s + t < k {
                vec![(s + t, BigInt::one(), BigInt::zero())]
            } else {
                vec![]
            }
        },
        AlgebraTag::TruncPoly { base_cols: 2, k },
    )
}

/// Group ring `O_D[Z/m]`.
pub fn over_order_group_ring(desc: &QuadOrderDesc, m: usize) -> Result<Algebra> {
    over_order_free(
        desc,
        m,
        &|s, t| vec![((s + t) % m, BigInt::one(), BigInt::zero())],
        AlgebraTag::GroupRing {
            base_cols: 2,
            order: m,
        },
    )
}

/// `O_D ⊗_Z O_D` as a free rank-2 algebra over the left factor: basis
/// `{1⊗1, 1⊗ω}` with `(1⊗ω)² = −N(ω)·(1⊗1) + Tr(ω)·(1⊗ω)`.
pub fn over_order_tensor_self(desc: &QuadOrderDesc) -> Result<Algebra> {
    let d = desc.d.clone();
    let tr = d.clone();
    let nm = (&d * &d - &d) / BigInt::from(4);
    over_order_free(
        desc,
        2,
        &move |s, t| match (s, t) {
            (0, 0) => vec![(0, BigInt::one(), BigInt::zero())],
            (0, 1) | (1, 0) => vec![(1, BigInt::one(), BigInt::zero())],
            (1, 1) => vec![
                (0, -nm.clone(), BigInt::zero()),
                (1, tr.clone(), BigInt::zero()),
            ],
            _ => unreachable!(),
        },
        AlgebraTag::TensorSquare { base_cols: 2 },
    )
}

/// Idealization `O' ⊕ M` over an order, with `M = O'/J` for an ideal lattice
/// `J` of `O'` given in `{1, ω₀}` coordinates.
pub fn over_order_idealization(desc: &QuadOrderDesc, j_rows: IntMatrix) -> Result<Algebra> {
    let d = &desc.d;
    let tr = d.clone();
    let nm = (d * d - d) / BigInt::from(4);
    // Convert J from {1, ω₀} to {1, ω_D} coordinates: ω_D = c + f·ω₀.
    let f = &desc.conductor;
    let c_shift = (d - f * &desc.d0) / BigInt::from(2);
    let mut rows = Vec::new();
    for i in 0..j_rows.rows() {
        let u = j_rows.get(i, 0);
        let v = j_rows.get(i, 1);
        let (y, rem) = v.div_mod_floor(f);
        if !rem.is_zero() {
            return Err(Error::InconsistentPresentation(
                "module relation lattice is not inside the order".into(),
            ));
        }
        rows.push(vec![u - &y * &c_shift, y]);
    }
    let j_mat = IntMatrix::from_rows(rows);
    let full = intlat::snf_ext(&j_mat);
    let t = j_mat.rows().min(2);
    let mut kept: Vec<(usize, BigInt)> = Vec::new();
    for i in 0..2 {
        let dgl = if i < t {
            full.s.get(i, i).clone()
        } else {
            BigInt::zero()
        };
        if dgl.is_zero() {
            return Err(Error::InconsistentPresentation(
                "module relation lattice must have finite quotient".into(),
            ));
        }
        if !dgl.is_one() {
            kept.push((i, dgl));
        }
    }
    let project = |x: &[BigInt]| -> Vec<BigInt> {
        let xv = IntMatrix::from_rows(vec![x.to_vec()]).mul(&full.v);
        kept.iter()
            .map(|(i, dd)| xv.get(0, *i).mod_floor(dd))
            .collect()
    };
    let torsion = kept.len();
    let cols = 2 + torsion;
    let mut mul = vec![vec![vec![BigInt::zero(); cols]; cols]; cols];
    // Order block on columns {0, 1} = {1, ω_D}.
    mul[0][0] = unit_row(cols, 0);
    mul[0][1] = unit_row(cols, 1);
    mul[1][0] = unit_row(cols, 1);
    let mut omega_sq = vec![BigInt::zero(); cols];
    omega_sq[0] = -nm.clone();
    omega_sq[1] = tr.clone();
    mul[1][1] = omega_sq;
    // Action of {1, ω_D} on the module basis.
    let act = |pow: usize, lift: &[BigInt]| -> Vec<BigInt> {
        // lift = (x, y) meaning x + y·ω_D in the module.
        let (x, y) = (lift[0].clone(), lift[1].clone());
        match pow {
            0 => vec![x, y],
            1 => vec![-(&y * &nm), x + &y * &tr],
            _ => unreachable!(),
        }
    };
    for (mi, (ki, _)) in kept.iter().enumerate() {
        let lift = full.v_inv.row(*ki).to_vec();
        for pow in 0..2usize {
            let img = project(&act(pow, &lift));
            for (mj, c) in img.iter().enumerate() {
                mul[pow][2 + mi][2 + mj] = c.clone();
                mul[2 + mi][pow][2 + mj] = c.clone();
            }
        }
    }
    let mut one = vec![BigInt::zero(); cols];
    one[0] = BigInt::one();
    let mut mods = vec![BigInt::zero(), BigInt::zero()];
    mods.extend(kept.iter().map(|(_, dd)| dd.clone()));
    Algebra::new(
        mods,
        mul,
        one,
        AlgebraMeta::OverOrder {
            d0: desc.d0.clone(),
            f: desc.conductor.clone(),
            blocks: 1,
            tag: AlgebraTag::Idealization { base_cols: 2 },
        },
    )
}

fn unit_row(cols: usize, at: usize) -> Vec<BigInt> {
    let mut r = vec![BigInt::zero(); cols];
    r[at] = BigInt::one();
    r
}

/// Coordinates of an order element `(u + v·ω₀)` in the columns of an
/// over-order algebra's degree-zero block `{1, ω_amb}`.
pub fn order_elt_to_block(alg: &Algebra, x: &QuadElt) -> Result<Coords> {
    let AlgebraMeta::OverOrder { d0, f, .. } = &alg.meta else {
        return Err(Error::UnsupportedRing("not an over-order algebra".into()));
    };
    if &x.d0 != d0 || !x.w.is_one() {
        return Err(Error::ElementNotInAmbient(format!("{x}")));
    }
    let (y, rem) = x.v.div_mod_floor(f);
    if !rem.is_zero() {
        return Err(Error::ElementNotInAmbient(format!("{x} not in the order")));
    }
    let d = f * f * d0;
    let c_shift = (&d - f * d0) / BigInt::from(2);
    let mut out = vec![BigInt::zero(); alg.cols()];
    out[0] = &x.u - &y * &c_shift;
    out[1] = y;
    Ok(out)
}

/// Read back the degree-zero block of an over-order coordinate vector as an
/// order element in `{1, ω₀}` coordinates.
pub fn block_to_order_elt(alg: &Algebra, x: &Coords) -> Result<QuadElt> {
    let AlgebraMeta::OverOrder { d0, f, blocks, .. } = &alg.meta else {
        return Err(Error::UnsupportedRing("not an over-order algebra".into()));
    };
    for c in x.iter().take(2 * blocks).skip(2) {
        if !c.is_zero() {
            return Err(Error::ElementNotInAmbient(
                "element has components outside the degree-zero block".into(),
            ));
        }
    }
    let d = f * f * d0;
    let c_shift = (&d - f * d0) / BigInt::from(2);
    Ok(QuadElt::new(
        d0.clone(),
        &x[0] + &x[1] * &c_shift,
        &x[1] * f,
        BigInt::one(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::quad::make_quad_order;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn coords(v: &[i64]) -> Coords {
        v.iter().map(|&x| bi(x)).collect()
    }

    #[test]
    fn zn_units() {
        let r = zn(6);
        let five = coords(&[5]);
        let inv = r.try_inverse(&five).unwrap();
        assert_eq!(inv, coords(&[5]));
        assert!(r.is_zero_divisor(&coords(&[2])));
        assert!(!r.is_zero_divisor(&coords(&[5])));
    }

    #[test]
    fn idealization_z4_z2() {
        // R = Z/4, M = Z/2: 8 elements, (0,1)² = 0.
        let base = zn(4);
        let pres = ModulePresentation {
            gens: 1,
            rels: vec![vec![coords(&[2])]],
        };
        let a = idealization(&base, &pres).unwrap();
        assert_eq!(a.size(), Some(bi(8)));
        let eps = coords(&[0, 1]);
        assert!(a.is_zero_coords(&a.mul_elt(&eps, &eps)));
        // (2,1) is not a unit: base component 2 is not a unit of Z/4.
        assert!(!a.is_unit(&coords(&[2, 1])));
        // Zero-divisor characterization, cross-checked by exhaustive scan.
        for x in a.elements(64).unwrap() {
            let by_kernel = a.is_zero_divisor(&x);
            let mut by_scan = false;
            for y in a.elements(64).unwrap() {
                if !a.is_zero_coords(&y) && a.is_zero_coords(&a.mul_elt(&x, &y)) {
                    by_scan = true;
                    break;
                }
            }
            assert_eq!(by_kernel, by_scan, "x = {x:?}");
            // Example characterization: (a, m) is a zero divisor iff
            // a ∈ Z(R) ∪ Z(M) = {0, 2} here.
            let a_comp = &x[0];
            let expected = a_comp.is_zero() || *a_comp == bi(2);
            assert_eq!(by_scan, expected, "x = {x:?}");
        }
        assert!(a.is_zero_divisor(&coords(&[2, 0])));
        assert!(!a.is_zero_divisor(&coords(&[1, 1])));
    }

    #[test]
    fn idealization_dual_numbers() {
        // Z/2 ⊕ Z/2 = Z/2[ε]/(ε²): 4 elements, 2 units.
        let base = zn(2);
        let pres = ModulePresentation {
            gens: 1,
            rels: vec![],
        };
        let a = idealization(&base, &pres).unwrap();
        assert_eq!(a.size(), Some(bi(4)));
        let units = a
            .elements(16)
            .unwrap()
            .into_iter()
            .filter(|x| a.is_unit(x))
            .count();
        assert_eq!(units, 2);
    }

    #[test]
    fn idealization_of_zero_module() {
        let base = zn(3);
        let pres = ModulePresentation {
            gens: 1,
            rels: vec![vec![coords(&[1])]],
        };
        let a = idealization(&base, &pres).unwrap();
        assert_eq!(a.size(), Some(bi(3)));
        assert_eq!(a.cols(), 1);
    }

    #[test]
    fn nilradical_of_z4() {
        let r = zn(4);
        let nil = nilradical(&r, 64).unwrap();
        assert!(nil.contains(&coords(&[2])));
        assert!(!nil.contains(&coords(&[1])));
        let (red, _) = reduce_ring(&r, 64).unwrap();
        assert_eq!(red.alg.size(), Some(bi(2)));
    }

    #[test]
    fn nilradical_of_idealization() {
        let base = zn(3);
        let pres = ModulePresentation {
            gens: 1,
            rels: vec![],
        };
        let a = idealization(&base, &pres).unwrap();
        let nil = nilradical(&a, 64).unwrap();
        // Nilradical is exactly 0 ⊕ M.
        assert!(nil.contains(&coords(&[0, 1])));
        assert!(!nil.contains(&coords(&[1, 0])));
        let (red, _) = reduce_ring(&a, 64).unwrap();
        assert_eq!(red.alg.size(), Some(bi(3)));
    }

    #[test]
    fn nilradical_of_z6_is_trivial() {
        let r = zn(6);
        let nil = nilradical(&r, 64).unwrap();
        assert!(nil.is_zero_subgroup(&r));
    }

    #[test]
    fn maximal_ideals_of_z6() {
        let r = zn(6);
        let ms = maximal_ideals(&r, 64).unwrap();
        assert_eq!(ms.len(), 2);
        let two = ZLattice::from_rows(&r, vec![coords(&[2])]);
        let three = ZLattice::from_rows(&r, vec![coords(&[3])]);
        assert!(ms.contains(&two));
        assert!(ms.contains(&three));
    }

    #[test]
    fn maximal_ideals_of_z4() {
        let r = zn(4);
        let ms = maximal_ideals(&r, 64).unwrap();
        assert_eq!(ms.len(), 1);
        assert!(ms[0].contains(&coords(&[2])));
        assert!(!ms[0].contains(&coords(&[1])));
    }

    #[test]
    fn maximal_ideals_of_f2_square() {
        let r = product(&[zn(2), zn(2)]).unwrap();
        let ms = maximal_ideals(&r, 64).unwrap();
        assert_eq!(ms.len(), 2);
        let first = ZLattice::from_rows(&r, vec![coords(&[1, 0])]);
        let second = ZLattice::from_rows(&r, vec![coords(&[0, 1])]);
        assert!(ms.contains(&first));
        assert!(ms.contains(&second));
    }

    #[test]
    fn unit_xor_zero_divisor() {
        for alg in [zn(6), zn(8), f4(), product(&[zn(2), zn(4)]).unwrap()] {
            for x in alg.elements(64).unwrap() {
                let u = alg.is_unit(&x);
                let z = alg.is_zero_divisor(&x);
                assert!(u ^ z, "x = {x:?} unit={u} zd={z}");
            }
        }
    }

    #[test]
    fn tensor_square_of_f4_over_f2() {
        let b = f4();
        let a = ZLattice::from_rows(&b, vec![b.one.clone()]);
        let t = tensor_square(&b, &a, 512).unwrap();
        assert_eq!(t.alg.size(), Some(bi(16)));
        // F4 ⊗_F2 F4 ≅ F4 × F4: exactly 4 idempotents.
        let idems = t
            .alg
            .elements(64)
            .unwrap()
            .into_iter()
            .filter(|x| t.alg.mul_elt(x, x) == *x)
            .count();
        assert_eq!(idems, 4);
        // Retraction fixes the first copy pointwise.
        for x in b.elements(16).unwrap() {
            let emb = t.alg.reduce(t.j1.apply(&x));
            let back = b.reduce(t.retraction.apply(&emb));
            assert_eq!(back, x);
        }
    }

    #[test]
    fn tensor_square_identity_extension() {
        // A = B: B ⊗_B B ≅ B.
        let b = zn(6);
        let a = ZLattice::full(&b);
        let t = tensor_square(&b, &a, 512).unwrap();
        assert_eq!(t.alg.size(), Some(bi(6)));
    }

    #[test]
    fn tensor_square_of_split_extension() {
        // A = Z/2 diagonal in B = Z/2 × Z/2: rank 2 over B, 16 elements.
        let b = product(&[zn(2), zn(2)]).unwrap();
        let a = ZLattice::from_rows(&b, vec![b.one.clone()]);
        let t = tensor_square(&b, &a, 512).unwrap();
        assert_eq!(t.alg.size(), Some(bi(16)));
        for x in b.elements(16).unwrap() {
            let emb = t.alg.reduce(t.j1.apply(&x));
            let back = b.reduce(t.retraction.apply(&emb));
            assert_eq!(back, x);
        }
    }

    #[test]
    fn over_order_trunc_poly_is_a_ring() {
        let desc = make_quad_order(&bi(-20)).unwrap();
        let b = over_order_trunc_poly(&desc, 3).unwrap();
        assert_eq!(b.cols(), 6);
        assert!(!b.is_finite());
        // x² · x = 0 in O[x]/(x³).
        let x1 = {
            let mut e = b.zero_elt();
            e[2] = bi(1);
            e
        };
        let sq = b.mul_elt(&x1, &x1);
        assert!(!b.is_zero_coords(&sq));
        assert!(b.is_zero_coords(&b.mul_elt(&sq, &x1)));
    }

    #[test]
    fn over_order_idealization_zi_mod_3() {
        // B = Z[i] ⊕ Z[i]/3.
        let desc = make_quad_order(&bi(-4)).unwrap();
        let j = IntMatrix::from_i64(&[&[3, 0], &[0, 3]]);
        let b = over_order_idealization(&desc, j).unwrap();
        assert_eq!(b.cols(), 4);
        assert_eq!(b.mods, vec![bi(0), bi(0), bi(3), bi(3)]);
        // M² = 0.
        let m1 = {
            let mut e = b.zero_elt();
            e[2] = bi(1);
            e
        };
        assert!(b.is_zero_coords(&b.mul_elt(&m1, &m1)));
        assert!(b.is_nilpotent(&m1));
        // i·m cycles inside M.
        let i_elt = {
            let mut e = b.zero_elt();
            // ω_{−4} = (−4 + 2i)/2 = −2 + i, so i = ω + 2.
            e[0] = bi(2);
            e[1] = bi(1);
            e
        };
        let im = b.mul_elt(&i_elt, &m1);
        assert!(im[..2].iter().all(|c| c.is_zero()));
        assert!(!b.is_zero_coords(&im));
    }

    #[test]
    fn subring_closure_finds_diagonal() {
        let b = product(&[zn(2), zn(2)]).unwrap();
        let a = subring_closure(&b, &[]);
        assert!(a.contains(&coords(&[1, 1])));
        assert!(!a.contains(&coords(&[1, 0])));
        assert!(is_subring(&b, &a));
    }
}

#[cfg(test)]
mod structure_tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn unit_xor_zero_divisor_exhaustive() {
        // In a finite commutative ring every element is a unit or a zero
        // divisor, never both; swept up to size 256 here.
        let rings = vec![
            zn(6),
            zn(8),
            f4(),
            product(&[zn(2), zn(4)]).unwrap(),
            trunc_poly(&zn(4), 4).unwrap(),
            group_ring(&zn(4), 4).unwrap(),
            product(&[zn(8), zn(8)]).unwrap(),
        ];
        for alg in rings {
            for x in alg.elements(256).unwrap() {
                let u = alg.is_unit(&x);
                let z = alg.is_zero_divisor(&x);
                assert!(u ^ z, "size {:?}, x = {x:?}", alg.size());
            }
        }
    }

    #[test]
    fn idealization_zero_divisor_characterization_sweep() {
        // (a, m) is a zero divisor of R ⊕ M iff a ∈ Z(R) ∪ Z(M).
        let cases: Vec<(Algebra, BigInt)> = vec![
            (zn(4), bi(2)),
            (zn(8), bi(4)),
            (zn(9), bi(3)),
            (zn(6), bi(2)),
            (f4(), bi(0)),
        ];
        for (base, q) in cases {
            let rel: Coords = base.one.iter().map(|c| c * &q).collect();
            let pres = ModulePresentation {
                gens: 1,
                rels: vec![vec![rel]],
            };
            let alg = idealization(&base, &pres).unwrap();
            let r = base.cols();
            let t = alg.cols() - r;
            // Z(M): base elements killing some nonzero module element.
            let module_elements: Vec<Coords> = alg
                .elements(512)
                .unwrap()
                .into_iter()
                .filter(|x| x[..r].iter().all(|c| c.is_zero()))
                .collect();
            let in_z_m = |a: &[BigInt]| -> bool {
                let mut ax = vec![BigInt::zero(); alg.cols()];
                ax[..r].clone_from_slice(a);
                module_elements
                    .iter()
                    .any(|m| !alg.is_zero_coords(m) && alg.is_zero_coords(&alg.mul_elt(&ax, m)))
            };
            for x in alg.elements(512).unwrap() {
                let base_part = x[..r].to_vec();
                let expected = base.is_zero_divisor(&base_part) || in_z_m(&base_part);
                assert_eq!(
                    alg.is_zero_divisor(&x),
                    expected,
                    "base {:?} q {q} x {x:?} (t = {t})",
                    base.size()
                );
            }
        }
    }

    #[test]
    fn maximal_ideals_are_maximal_and_cover_nonunits() {
        let rings = vec![
            zn(6),
            zn(8),
            zn(12),
            f4(),
            product(&[zn(2), zn(2)]).unwrap(),
            product(&[zn(4), zn(9)]).unwrap(),
            trunc_poly(&zn(2), 3).unwrap(),
        ];
        for alg in rings {
            let ms = maximal_ideals(&alg, 4096).unwrap();
            // Pairwise distinct.
            for i in 0..ms.len() {
                for j in (i + 1)..ms.len() {
                    assert_ne!(ms[i], ms[j]);
                }
            }
            for m in &ms {
                // The quotient is a field: every nonzero element is a unit.
                let q = quotient_by_ideal(&alg, m).unwrap();
                for x in q.alg.elements(512).unwrap() {
                    if !q.alg.is_zero_coords(&x) {
                        assert!(q.alg.is_unit(&x), "quotient has a nonunit {x:?}");
                    }
                }
            }
            // Union of the maximal ideals = non-units.
            for x in alg.elements(512).unwrap() {
                let covered = ms.iter().any(|m| m.contains(&x));
                assert_eq!(covered, !alg.is_unit(&x), "x = {x:?}");
            }
        }
    }

    #[test]
    fn reduction_kills_exactly_the_nilradical() {
        let rings = vec![zn(4), zn(12), trunc_poly(&zn(2), 3).unwrap(), zn(9)];
        for alg in rings {
            let (red, nil) = reduce_ring(&alg, 4096).unwrap();
            // The reduced ring has no nonzero nilpotents.
            for x in red.alg.elements(512).unwrap() {
                if red.alg.is_nilpotent(&x) {
                    assert!(red.alg.is_zero_coords(&x));
                }
            }
            // The projection is surjective and its kernel is the nilradical.
            let mut images = std::collections::BTreeSet::new();
            for x in alg.elements(512).unwrap() {
                let px = red.alg.reduce(red.proj.apply(&x));
                assert_eq!(red.alg.is_zero_coords(&px), nil.contains(&x), "x = {x:?}");
                images.insert(px);
            }
            assert_eq!(BigInt::from(images.len()), red.alg.size().unwrap());
        }
    }
}
