//! Dense exact-rational operators on a tensor product of local spaces.
//!
//! Basis convention: site 1 is the leftmost (most significant) tensor
//! factor; a flat index decomposes row-major into per-site indices. Each
//! local basis is ordered by descending weight, so the flat ordering is
//! the lexicographic weight ordering used everywhere in this crate.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::perm::SitePermutation;
use crate::scalar::Rat;

/// Shape of a tensor-product space: the ordered list of local dimensions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorShape {
    local_dims: Vec<usize>,
    total_dim: usize,
}

impl TensorShape {
    pub fn new(local_dims: Vec<usize>) -> Self {
        assert!(!local_dims.is_empty(), "shape must have at least one site");
        assert!(local_dims.iter().all(|&d| d > 0), "local dims must be positive");
        let total_dim = local_dims.iter().product();
        TensorShape {
            local_dims,
            total_dim,
        }
    }

    pub fn single(dim: usize) -> Self {
        TensorShape::new(vec![dim])
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn num_sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn dim_at(&self, site: usize) -> usize {
        self.local_dims[site]
    }

    /// Row-major strides: `flat = sum_i idx[i] * stride[i]`.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.num_sites();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.local_dims[i + 1];
        }
        strides
    }

    pub fn decompose(&self, flat: usize) -> Vec<usize> {
        debug_assert!(flat < self.total_dim);
        let mut rest = flat;
        let mut idx = Vec::with_capacity(self.num_sites());
        for &s in &self.strides() {
            idx.push(rest / s);
            rest %= s;
        }
        idx
    }

    pub fn compose(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.num_sites());
        self.strides()
            .iter()
            .zip(idx)
            .map(|(s, i)| s * i)
            .sum()
    }

    /// Shape with the factors reordered by `perm`: slot `j` of the result
    /// has the dimension of slot `perm^{-1}(j)`.
    pub fn permuted(&self, perm: &SitePermutation) -> Result<TensorShape> {
        if perm.len() != self.num_sites() {
            return Err(Error::PermutationLengthMismatch {
                sites: self.num_sites(),
                perm_len: perm.len(),
            });
        }
        let inv = perm.inverse();
        let dims = (0..self.num_sites())
            .map(|j| self.local_dims[inv.apply(j)])
            .collect();
        Ok(TensorShape::new(dims))
    }

    /// Shape of all sites except `site`.
    pub fn complement(&self, site: usize) -> TensorShape {
        assert!(self.num_sites() > 1, "complement of a single-site shape");
        let dims = self
            .local_dims
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != site)
            .map(|(_, &d)| d)
            .collect();
        TensorShape::new(dims)
    }
}

/// Dense square matrix over [`Rat`] acting on a tensor-product space.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorOperator {
    shape: TensorShape,
    entries: Vec<Rat>, // row-major, total_dim x total_dim
}

impl TensorOperator {
    pub fn zeros(shape: TensorShape) -> Self {
        let n = shape.total_dim();
        TensorOperator {
            shape,
            entries: vec![Rat::zero(); n * n],
        }
    }

    pub fn identity(shape: TensorShape) -> Self {
        let n = shape.total_dim();
        let mut op = TensorOperator::zeros(shape);
        for i in 0..n {
            op.entries[i * n + i] = Rat::one();
        }
        op
    }

    pub fn from_fn(shape: TensorShape, f: impl Fn(usize, usize) -> Rat) -> Self {
        let n = shape.total_dim();
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c));
            }
        }
        TensorOperator { shape, entries }
    }

    pub fn from_rows(shape: TensorShape, rows: Vec<Vec<Rat>>) -> Self {
        let n = shape.total_dim();
        assert_eq!(rows.len(), n, "row count does not match shape");
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "column count does not match shape");
            entries.extend(row);
        }
        TensorOperator { shape, entries }
    }

    pub fn diagonal(shape: TensorShape, diag: Vec<Rat>) -> Self {
        let n = shape.total_dim();
        assert_eq!(diag.len(), n);
        let mut op = TensorOperator::zeros(shape);
        for (i, v) in diag.into_iter().enumerate() {
            op.entries[i * n + i] = v;
        }
        op
    }

    pub fn scalar(shape: TensorShape, value: Rat) -> Self {
        let n = shape.total_dim();
        TensorOperator::diagonal(shape, vec![value; n])
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.total_dim()
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.entries[r * self.dim() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        let n = self.dim();
        self.entries[r * n + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Rat::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim();
        self.entries
            .iter()
            .enumerate()
            .all(|(k, v)| if k / n == k % n { v.is_one() } else { v.is_zero() })
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        self.entries
            .iter()
            .enumerate()
            .all(|(k, v)| k / n == k % n || v.is_zero())
    }

    /// No nonzero entry strictly above the diagonal.
    pub fn is_lower_triangular(&self) -> bool {
        let n = self.dim();
        self.entries
            .iter()
            .enumerate()
            .all(|(k, v)| k / n >= k % n || v.is_zero())
    }

    pub fn diag(&self) -> Vec<Rat> {
        let n = self.dim();
        (0..n).map(|i| self.entries[i * n + i].clone()).collect()
    }

    pub fn scale(&self, s: &Rat) -> Self {
        TensorOperator {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    /// Matrix product `self * rhs` (self acts after rhs).
    pub fn matmul(&self, rhs: &TensorOperator) -> TensorOperator {
        assert_eq!(self.shape, rhs.shape, "operator shape mismatch in product");
        let n = self.dim();
        let mut out = TensorOperator::zeros(self.shape.clone());
        for r in 0..n {
            for k in 0..n {
                let a = &self.entries[r * n + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = &rhs.entries[k * n + c];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = &out.entries[r * n + c];
                    out.entries[r * n + c] = cur + &(a * b);
                }
            }
        }
        out
    }

    pub fn commutator(&self, rhs: &TensorOperator) -> TensorOperator {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|r| {
                let mut acc = Rat::zero();
                for c in 0..n {
                    let a = &self.entries[r * n + c];
                    if !a.is_zero() && !v[c].is_zero() {
                        acc += a * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, k: usize) -> TensorOperator {
        let mut acc = TensorOperator::identity(self.shape.clone());
        for _ in 0..k {
            acc = acc.matmul(self);
        }
        acc
    }

    /// Inverse of a diagonal operator; errors with the offending entry.
    pub fn invert_diagonal(&self) -> Result<TensorOperator> {
        assert!(self.is_diagonal(), "invert_diagonal on non-diagonal operator");
        let diag = self
            .diag()
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.recip()
                    .map_err(|_| Error::Singular(format!("zero diagonal entry at index {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorOperator::diagonal(self.shape.clone(), diag))
    }

    /// Exact Gauss-Jordan inverse.
    pub fn invert(&self) -> Result<TensorOperator> {
        let n = self.dim();
        let mut a = self.clone();
        let mut inv = TensorOperator::identity(self.shape.clone());
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or_else(|| Error::Singular(format!("no pivot in column {col}")))?;
            if pivot != col {
                for c in 0..n {
                    a.entries.swap(pivot * n + c, col * n + c);
                    inv.entries.swap(pivot * n + c, col * n + c);
                }
            }
            let p = a.get(col, col).clone();
            let p_inv = p.recip().expect("pivot nonzero");
            for c in 0..n {
                a.entries[col * n + c] = &a.entries[col * n + c] * &p_inv;
                inv.entries[col * n + c] = &inv.entries[col * n + c] * &p_inv;
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for c in 0..n {
                    let t = &a.entries[col * n + c] * &factor;
                    a.entries[r * n + c] = &a.entries[r * n + c] - &t;
                    let t = &inv.entries[col * n + c] * &factor;
                    inv.entries[r * n + c] = &inv.entries[r * n + c] - &t;
                }
            }
        }
        Ok(inv)
    }

    /// First position (row-major) where the two operators differ.
    pub fn first_discrepancy(&self, other: &TensorOperator) -> Option<(usize, usize, Rat, Rat)> {
        assert_eq!(self.shape, other.shape);
        let n = self.dim();
        for r in 0..n {
            for c in 0..n {
                if self.get(r, c) != other.get(r, c) {
                    return Some((r, c, self.get(r, c).clone(), other.get(r, c).clone()));
                }
            }
        }
        None
    }

    /// Total weight grading: `self` preserves the joint eigenspaces of the
    /// given per-slot diagonal weights (sum over slots).
    pub fn preserves_grading(&self, weights: &[Vec<Rat>]) -> bool {
        let n = self.dim();
        let grade = |flat: usize| -> Rat {
            let idx = self.shape.decompose(flat);
            let mut g = Rat::zero();
            for (s, &i) in idx.iter().enumerate() {
                g += &weights[s][i];
            }
            g
        };
        let grades: Vec<Rat> = (0..n).map(grade).collect();
        for r in 0..n {
            for c in 0..n {
                if !self.get(r, c).is_zero() && grades[r] != grades[c] {
                    return false;
                }
            }
        }
        true
    }
}

/// Embeds a local operator at one tensor slot, identity elsewhere.
pub fn tensor_embed(local: &[Vec<Rat>], site: usize, shape: &TensorShape) -> Result<TensorOperator> {
    let d = shape.dim_at(site);
    if local.len() != d || local.iter().any(|row| row.len() != d) {
        return Err(Error::DimensionMismatch {
            site: site + 1,
            expected: d,
            found: local.len(),
        });
    }
    let n = shape.total_dim();
    let strides = shape.strides();
    let mut out = TensorOperator::zeros(shape.clone());
    for flat in 0..n {
        let idx = shape.decompose(flat);
        let i_site = idx[site];
        for j_site in 0..d {
            let v = &local[i_site][j_site];
            if v.is_zero() {
                continue;
            }
            let col = flat - i_site * strides[site] + j_site * strides[site];
            out.entries[flat * n + col] = v.clone();
        }
    }
    Ok(out)
}

/// Embeds an operator on the ordered slot pair `(site_a, site_b)` of
/// `shape`, identity on the remaining slots. The local operator acts on
/// `V_a (x) V_b` with `a` as its most significant factor.
pub fn embed_pair(
    pair_op: &TensorOperator,
    site_a: usize,
    site_b: usize,
    shape: &TensorShape,
) -> Result<TensorOperator> {
    assert_ne!(site_a, site_b);
    let da = shape.dim_at(site_a);
    let db = shape.dim_at(site_b);
    if pair_op.dim() != da * db {
        return Err(Error::ShapeMismatch(format!(
            "pair operator has dimension {}, slots ({}, {}) need {}",
            pair_op.dim(),
            site_a + 1,
            site_b + 1,
            da * db
        )));
    }
    let n = shape.total_dim();
    let strides = shape.strides();
    let mut out = TensorOperator::zeros(shape.clone());
    for row in 0..n {
        let idx = shape.decompose(row);
        let (ia, ib) = (idx[site_a], idx[site_b]);
        let base = row - ia * strides[site_a] - ib * strides[site_b];
        for ja in 0..da {
            for jb in 0..db {
                let v = pair_op.get(ia * db + ib, ja * db + jb);
                if v.is_zero() {
                    continue;
                }
                let col = base + ja * strides[site_a] + jb * strides[site_b];
                out.entries[row * n + col] = v.clone();
            }
        }
    }
    Ok(out)
}

/// Extended action of the symmetric group on tensor operators: moves the
/// operator content of slot `i` to slot `perm(i)`, conjugating by the
/// corresponding factor-permutation of basis vectors. Applying the inverse
/// permutation recovers the original operator.
pub fn permute_tensor_factors(
    op: &TensorOperator,
    perm: &SitePermutation,
) -> Result<TensorOperator> {
    let shape = op.shape();
    if perm.len() != shape.num_sites() {
        return Err(Error::PermutationLengthMismatch {
            sites: shape.num_sites(),
            perm_len: perm.len(),
        });
    }
    let new_shape = shape.permuted(perm)?;
    let n = shape.total_dim();
    // P maps old flat index to new flat index: new[perm(i)] = old[i].
    let mut map = vec![0usize; n];
    for flat in 0..n {
        let idx = shape.decompose(flat);
        let mut new_idx = vec![0usize; idx.len()];
        for (i, &v) in idx.iter().enumerate() {
            new_idx[perm.apply(i)] = v;
        }
        map[flat] = new_shape.compose(&new_idx);
    }
    let mut out = TensorOperator::zeros(new_shape);
    let m = out.dim();
    for r in 0..n {
        for c in 0..n {
            let v = op.get(r, c);
            if !v.is_zero() {
                out.entries[map[r] * m + map[c]] = v.clone();
            }
        }
    }
    Ok(out)
}

/// Assembles an operator that is block diagonal in the index of `site`:
/// `blocks[a]` acts on the complement space when the site index is `a`.
pub fn from_blocks_at_site(
    site: usize,
    shape: &TensorShape,
    blocks: &[TensorOperator],
) -> TensorOperator {
    let d = shape.dim_at(site);
    assert_eq!(blocks.len(), d, "one block per local basis vector");
    let comp = shape.complement(site);
    for b in blocks {
        assert_eq!(b.shape(), &comp, "block shape must match complement");
    }
    let n = shape.total_dim();
    let strides = shape.strides();
    let mut out = TensorOperator::zeros(shape.clone());
    for row in 0..n {
        let idx = shape.decompose(row);
        let a = idx[site];
        let comp_row: Vec<usize> = idx
            .iter()
            .enumerate()
            .filter(|(s, _)| *s != site)
            .map(|(_, &v)| v)
            .collect();
        let cr = comp.compose(&comp_row);
        let m = comp.total_dim();
        for cc in 0..m {
            let v = blocks[a].get(cr, cc);
            if v.is_zero() {
                continue;
            }
            // rebuild full column index from (a, cc)
            let comp_idx = comp.decompose(cc);
            let mut col = a * strides[site];
            let mut k = 0;
            for s in 0..shape.num_sites() {
                if s == site {
                    continue;
                }
                col += comp_idx[k] * strides[s];
                k += 1;
            }
            out.entries[row * n + col] = v.clone();
        }
    }
    out
}

/// Identity at `site`, `op` on the complement (in site order).
pub fn embed_complement(op: &TensorOperator, site: usize, shape: &TensorShape) -> TensorOperator {
    let blocks = vec![op.clone(); shape.dim_at(site)];
    from_blocks_at_site(site, shape, &blocks)
}

impl fmt::Debug for TensorOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TensorOperator {:?} [", self.shape.local_dims())?;
        let n = self.dim();
        for r in 0..n {
            let row: Vec<String> = (0..n).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Add for &TensorOperator {
    type Output = TensorOperator;
    fn add(self, rhs: &TensorOperator) -> TensorOperator {
        assert_eq!(self.shape, rhs.shape, "operator shape mismatch in sum");
        TensorOperator {
            shape: self.shape.clone(),
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &TensorOperator {
    type Output = TensorOperator;
    fn sub(self, rhs: &TensorOperator) -> TensorOperator {
        assert_eq!(self.shape, rhs.shape, "operator shape mismatch in difference");
        TensorOperator {
            shape: self.shape.clone(),
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &TensorOperator {
    type Output = TensorOperator;
    fn mul(self, rhs: &TensorOperator) -> TensorOperator {
        self.matmul(rhs)
    }
}
