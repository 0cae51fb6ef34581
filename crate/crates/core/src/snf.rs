//! Integer Smith normal form for simplicial (co)homology.
//!
//! The reduction runs over `i64` with checked arithmetic; if any intermediate
//! overflows, the whole computation restarts over arbitrary-precision
//! integers. Dense storage — boundary matrices of desk-scale complexes.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    /// `self * other`, checked; `None` on overflow.
    pub fn checked_mul(&self, other: &IntMat) -> Option<IntMat> {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let t = a.checked_mul(other.get(k, c))?;
                    let s = out.get(r, c).checked_add(t)?;
                    out.set(r, c, s);
                }
            }
        }
        Some(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SnfError {
    #[error("entry does not fit in i64 after arbitrary-precision reduction")]
    ResultOutOfRange,
}

/// Scalar the reduction is generic over. `i64` reports overflow; `BigInt`
/// never does.
trait Scalar: Clone + PartialEq {
    fn from_i64(v: i64) -> Self;
    fn zero_val() -> Self;
    fn is_zero_val(&self) -> bool;
    fn is_neg_val(&self) -> bool;
    fn abs_cmp(&self, other: &Self) -> Ordering;
    fn checked_neg(&self) -> Option<Self>;
    fn checked_sub_mul(&self, q: &Self, b: &Self) -> Option<Self>; // self - q*b
    fn trunc_div(&self, other: &Self) -> Self;
    fn divides(&self, other: &Self) -> bool;
}

impl Scalar for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn zero_val() -> Self {
        0
    }
    fn is_zero_val(&self) -> bool {
        *self == 0
    }
    fn is_neg_val(&self) -> bool {
        *self < 0
    }
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn checked_neg(&self) -> Option<Self> {
        i64::checked_neg(*self)
    }
    fn checked_sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn trunc_div(&self, other: &Self) -> Self {
        self / other
    }
    fn divides(&self, other: &Self) -> bool {
        other % self == 0
    }
}

impl Scalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn zero_val() -> Self {
        BigInt::zero()
    }
    fn is_zero_val(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_neg_val(&self) -> bool {
        Signed::is_negative(self)
    }
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.abs().cmp(&other.abs())
    }
    fn checked_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn checked_sub_mul(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn trunc_div(&self, other: &Self) -> Self {
        self / other
    }
    fn divides(&self, other: &Self) -> bool {
        Zero::is_zero(&(other % self))
    }
}

struct Dense<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Dense<T> {
    fn from_int(m: &IntMat) -> Self {
        Dense {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&v| T::from_i64(v)).collect(),
        }
    }

    fn identity(n: usize) -> Self {
        let mut data = vec![T::zero_val(); n * n];
        for i in 0..n {
            data[i * n + i] = T::from_i64(1);
        }
        Dense {
            rows: n,
            cols: n,
            data,
        }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_i -= q * row_k
    fn row_sub_mul(&mut self, i: usize, k: usize, q: &T) -> Option<()> {
        for c in 0..self.cols {
            let v = self.at(i, c).checked_sub_mul(q, self.at(k, c))?;
            self.data[i * self.cols + c] = v;
        }
        Some(())
    }

    /// col_j -= q * col_k
    fn col_sub_mul(&mut self, j: usize, k: usize, q: &T) -> Option<()> {
        for r in 0..self.rows {
            let v = self.at(r, j).checked_sub_mul(q, self.at(r, k))?;
            self.data[r * self.cols + j] = v;
        }
        Some(())
    }

    fn negate_col(&mut self, j: usize) -> Option<()> {
        for r in 0..self.rows {
            let v = self.at(r, j).checked_neg()?;
            self.data[r * self.cols + j] = v;
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) -> Option<()> {
        for c in 0..self.cols {
            let v = self.at(i, c).checked_neg()?;
            self.data[i * self.cols + c] = v;
        }
        Some(())
    }
}

/// Unimodular transforms of `S = P A Q`; inverse matrices are maintained
/// alongside so kernel coordinates can be read off without solving.
struct Reducer<T> {
    a: Dense<T>,
    q: Option<Dense<T>>,
    q_inv: Option<Dense<T>>,
    p_inv: Option<Dense<T>>,
}

impl<T: Scalar> Reducer<T> {
    fn new(m: &IntMat, with_transforms: bool) -> Self {
        let a = Dense::<T>::from_int(m);
        let (q, q_inv, p_inv) = if with_transforms {
            (
                Some(Dense::identity(m.cols)),
                Some(Dense::identity(m.cols)),
                Some(Dense::identity(m.rows)),
            )
        } else {
            (None, None, None)
        };
        Reducer { a, q, q_inv, p_inv }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        if let Some(pi) = &mut self.p_inv {
            pi.swap_cols(i, j); // P -> E P  =>  P^-1 -> P^-1 E^-1, E = swap
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        if let Some(q) = &mut self.q {
            q.swap_cols(i, j);
        }
        if let Some(qi) = &mut self.q_inv {
            qi.swap_rows(i, j);
        }
    }

    /// row_i -= q * row_k  (left-multiply by E with E[i][k] = -q)
    fn row_op(&mut self, i: usize, k: usize, quo: &T) -> Option<()> {
        self.a.row_sub_mul(i, k, quo)?;
        if let Some(pi) = &mut self.p_inv {
            // P^-1 -> P^-1 E^-1 : col_k += q * col_i
            let neg = quo.checked_neg()?;
            pi.col_sub_mul(k, i, &neg)?;
        }
        Some(())
    }

    /// col_j -= q * col_k  (right-multiply by E with E[k][j] = -q)
    fn col_op(&mut self, j: usize, k: usize, quo: &T) -> Option<()> {
        self.a.col_sub_mul(j, k, quo)?;
        if let Some(q) = &mut self.q {
            q.col_sub_mul(j, k, quo)?;
        }
        if let Some(qi) = &mut self.q_inv {
            // Q^-1 -> E^-1 Q^-1 : row_k += q * row_j
            let neg = quo.checked_neg()?;
            qi.row_sub_mul(k, j, &neg)?;
        }
        Some(())
    }

    fn negate_col(&mut self, j: usize) -> Option<()> {
        self.a.negate_col(j)?;
        if let Some(q) = &mut self.q {
            q.negate_col(j)?;
        }
        if let Some(qi) = &mut self.q_inv {
            qi.negate_row(j)?;
        }
        Some(())
    }

    /// Returns `None` on arithmetic overflow.
    fn reduce(&mut self) -> Option<Vec<T>> {
        let (rows, cols) = (self.a.rows, self.a.cols);
        let mut diag = Vec::new();
        for k in 0..rows.min(cols) {
            'pivot: loop {
                // smallest nonzero |entry| in the trailing submatrix
                let mut best: Option<(usize, usize)> = None;
                for r in k..rows {
                    for c in k..cols {
                        if !self.a.at(r, c).is_zero_val()
                            && best
                                .map(|(br, bc)| {
                                    self.a.at(r, c).abs_cmp(self.a.at(br, bc)) == Ordering::Less
                                })
                                .unwrap_or(true)
                        {
                            best = Some((r, c));
                        }
                    }
                }
                let Some((pr, pc)) = best else {
                    return Some(diag); // trailing block is zero
                };
                self.swap_rows(k, pr);
                self.swap_cols(k, pc);

                let mut clean = true;
                for r in k + 1..rows {
                    if !self.a.at(r, k).is_zero_val() {
                        let q = self.a.at(r, k).trunc_div(self.a.at(k, k));
                        self.row_op(r, k, &q)?;
                        if !self.a.at(r, k).is_zero_val() {
                            clean = false;
                        }
                    }
                }
                if !clean {
                    continue 'pivot;
                }
                for c in k + 1..cols {
                    if !self.a.at(k, c).is_zero_val() {
                        let q = self.a.at(k, c).trunc_div(self.a.at(k, k));
                        self.col_op(c, k, &q)?;
                        if !self.a.at(k, c).is_zero_val() {
                            clean = false;
                        }
                    }
                }
                if !clean {
                    continue 'pivot;
                }
                // divisibility: pivot must divide the rest of the block
                for r in k + 1..rows {
                    for c in k + 1..cols {
                        if !self.a.at(k, k).divides(self.a.at(r, c)) {
                            // fold row r into row k and restart the pivot
                            let minus_one = T::from_i64(-1);
                            self.row_op(k, r, &minus_one)?;
                            continue 'pivot;
                        }
                    }
                }
                if self.a.at(k, k).is_neg_val() {
                    self.negate_col(k)?;
                }
                diag.push(self.a.at(k, k).clone());
                break;
            }
        }
        Some(diag)
    }
}

/// Diagonal of the Smith normal form (nonzero entries only, each dividing
/// the next).
pub fn smith_diagonal(m: &IntMat) -> Vec<BigInt> {
    if let Some(diag) = Reducer::<i64>::new(m, false).reduce() {
        return diag.into_iter().map(BigInt::from).collect();
    }
    Reducer::<BigInt>::new(m, false)
        .reduce()
        .expect("bigint reduction cannot overflow")
}

/// Rank of an integer matrix.
pub fn rank(m: &IntMat) -> usize {
    smith_diagonal(m).len()
}

pub struct SnfDecomposition {
    pub diag: Vec<BigInt>,
    pub q: Vec<Vec<BigInt>>,     // column-major columns of Q
    pub q_inv: Vec<Vec<BigInt>>, // rows of Q^-1
    pub p_inv: Vec<Vec<BigInt>>, // column-major columns of P^-1
}

pub fn smith_with_transforms(m: &IntMat) -> SnfDecomposition {
    fn extract<T: Scalar>(
        red: Reducer<T>,
        diag: Vec<T>,
        to_big: impl Fn(&T) -> BigInt,
    ) -> SnfDecomposition {
        let q = red.q.unwrap();
        let qi = red.q_inv.unwrap();
        let pi = red.p_inv.unwrap();
        SnfDecomposition {
            diag: diag.iter().map(&to_big).collect(),
            q: (0..q.cols)
                .map(|c| (0..q.rows).map(|r| to_big(q.at(r, c))).collect())
                .collect(),
            q_inv: (0..qi.rows)
                .map(|r| (0..qi.cols).map(|c| to_big(qi.at(r, c))).collect())
                .collect(),
            p_inv: (0..pi.cols)
                .map(|c| (0..pi.rows).map(|r| to_big(pi.at(r, c))).collect())
                .collect(),
        }
    }
    let mut red = Reducer::<i64>::new(m, true);
    if let Some(diag) = red.reduce() {
        return extract(red, diag, |v| BigInt::from(*v));
    }
    let mut red = Reducer::<BigInt>::new(m, true);
    let diag = red.reduce().expect("bigint reduction cannot overflow");
    extract(red, diag, Clone::clone)
}

/// Integer basis of the free part of `ker(d_out) / im(d_in)`.
///
/// `d_out` maps the chain group we compute in to the next one; `d_in` maps
/// from the previous one. Requires `d_out * d_in = 0`. Returned vectors live
/// in the domain of `d_out` (one entry per basis cell).
pub fn homology_free_basis(d_out: &IntMat, d_in: &IntMat) -> Result<Vec<Vec<i64>>, SnfError> {
    assert_eq!(d_out.cols, d_in.rows, "chain group dimensions disagree");
    let n = d_out.cols;
    let dec = smith_with_transforms(d_out);
    let r = dec.diag.len();
    let k = n - r; // kernel rank
    if k == 0 {
        return Ok(Vec::new());
    }
    // coordinates of im(d_in) in the kernel basis: rows r.. of Q^-1 * d_in
    let mut m = IntMat::zeros(k, d_in.cols);
    for (out_row, qrow) in dec.q_inv[r..].iter().enumerate() {
        for c in 0..d_in.cols {
            let mut acc = BigInt::zero();
            for (j, qv) in qrow.iter().enumerate() {
                if !Zero::is_zero(qv) {
                    acc += qv * BigInt::from(d_in.get(j, c));
                }
            }
            let v = acc.to_i64().ok_or(SnfError::ResultOutOfRange)?;
            m.set(out_row, c, v);
        }
    }
    // sanity: the first r coordinate rows of Q^-1 * d_in must vanish
    debug_assert!({
        let mut ok = true;
        for qrow in dec.q_inv[..r].iter() {
            for c in 0..d_in.cols {
                let mut acc = BigInt::zero();
                for (j, qv) in qrow.iter().enumerate() {
                    acc += qv * BigInt::from(d_in.get(j, c));
                }
                ok &= Zero::is_zero(&acc);
            }
        }
        ok
    });
    let sub = smith_with_transforms(&m);
    let r2 = sub.diag.len();
    let mut basis = Vec::with_capacity(k - r2);
    for g in sub.p_inv[r2..].iter() {
        // ambient vector = kernel-basis columns combined with coefficients g
        let mut v = vec![BigInt::zero(); n];
        for (j, coeff) in g.iter().enumerate() {
            if Zero::is_zero(coeff) {
                continue;
            }
            for (amb, qv) in dec.q[r + j].iter().enumerate() {
                v[amb] += coeff * qv;
            }
        }
        let vi: Option<Vec<i64>> = v.iter().map(|x| x.to_i64()).collect();
        basis.push(vi.ok_or(SnfError::ResultOutOfRange)?);
    }
    Ok(basis)
}
