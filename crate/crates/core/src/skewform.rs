//! Integer antisymmetric forms and their Frobenius (skew Smith) normal form.
//!
//! All arithmetic is exact over [`BigInt`]. The reduction finds a unimodular
//! `S` with `Sᵗ C S = M`, where `C` is block-canonical:
//! `C[j][r+j] = -d_j`, `C[r+j][j] = d_j`, every other entry zero, and the
//! positive divisors satisfy `d_j | d_{j+1}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::{Error, Result};

/// Square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, data: vec![BigInt::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::InvalidInput(format!(
                    "row of length {} in a {}x{} matrix",
                    row.len(),
                    n,
                    n
                )));
            }
            data.extend(row.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.rows()
            .into_iter()
            .map(|r| r.iter().map(|v| v.to_i64()).collect())
            .collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows()
            .into_iter()
            .map(|r| r.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * &other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<BigInt> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| &self.data[i * self.n + j] * v[j]).sum())
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }
}

/// Antisymmetric integer matrix with zero diagonal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SkewIntMatrix(IntMatrix);

impl fmt::Debug for SkewIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl SkewIntMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        let n = m.dim();
        for i in 0..n {
            if !m.get(i, i).is_zero() {
                return Err(Error::NotAntisymmetric(format!("nonzero diagonal entry at ({i},{i})")));
            }
            for j in i + 1..n {
                if *m.get(i, j) != -m.get(j, i) {
                    return Err(Error::NotAntisymmetric(format!(
                        "entries ({i},{j}) and ({j},{i}) are not negatives"
                    )));
                }
            }
        }
        Ok(SkewIntMatrix(m))
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows)?)
    }

    pub fn zeros(n: usize) -> Self {
        SkewIntMatrix(IntMatrix::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        self.0.get(i, j)
    }

    pub fn as_matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.0.to_i64_rows()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.0.to_f64_rows()
    }

    pub fn scaled(&self, c: i64) -> Self {
        let mut m = self.0.clone();
        for v in m.data.iter_mut() {
            *v *= c;
        }
        SkewIntMatrix(m)
    }

    /// `Pᵗ M P` for an arbitrary integer `P`; the result stays antisymmetric.
    pub fn congruent(&self, p: &IntMatrix) -> Self {
        SkewIntMatrix(p.transpose().mul(&self.0).mul(p))
    }

    /// Builds the canonical block matrix for the given divisors in dimension `n`.
    pub fn canonical(n: usize, divisors: &[BigInt]) -> Result<Self> {
        let r = divisors.len();
        if 2 * r > n {
            return Err(Error::InvalidInput(format!("{r} divisors do not fit in dimension {n}")));
        }
        let mut m = IntMatrix::zeros(n);
        for (j, d) in divisors.iter().enumerate() {
            m.set(j, r + j, -d.clone());
            m.set(r + j, j, d.clone());
        }
        Ok(SkewIntMatrix(m))
    }
}

/// Result of the skew Smith reduction: `basis_change` is `S` with
/// `Sᵗ · canonical · S = input`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusForm {
    pub canonical: SkewIntMatrix,
    pub basis_change: IntMatrix,
    pub basis_change_inverse: IntMatrix,
    pub divisors: Vec<BigInt>,
    pub rank: usize,
}

impl FrobeniusForm {
    pub fn half_rank(&self) -> usize {
        self.divisors.len()
    }

    pub fn divisors_i64(&self) -> Option<Vec<i64>> {
        self.divisors.iter().map(|d| d.to_i64()).collect()
    }

    /// Checks `Sᵗ C S = M` and `|det S| = 1` exactly.
    pub fn verify(&self, input: &SkewIntMatrix) -> bool {
        let s = &self.basis_change;
        let back = self.canonical.congruent(s);
        back == *input
            && s.determinant().abs().is_one()
            && s.mul(&self.basis_change_inverse) == IntMatrix::identity(s.dim())
            && validate_divisor_chain(&self.divisors).is_ok()
    }
}

struct Reducer {
    n: usize,
    a: Vec<Vec<BigInt>>,
    // a = e · input · eᵗ and input = t · a · tᵗ
    e: Vec<Vec<BigInt>>,
    t: Vec<Vec<BigInt>>,
}

impl Reducer {
    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        self.e.swap(i, j);
        for row in self.t.iter_mut() {
            row.swap(i, j);
        }
    }

    /// row_i += c·row_j and col_i += c·col_j.
    fn add(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let n = self.n;
        for k in 0..n {
            let v = &self.a[j][k] * c;
            self.a[i][k] += v;
        }
        for k in 0..n {
            let v = &self.a[k][j] * c;
            self.a[k][i] += v;
        }
        for k in 0..n {
            let v = &self.e[j][k] * c;
            self.e[i][k] += v;
        }
        for k in 0..n {
            let v = &self.t[k][i] * c;
            self.t[k][j] -= v;
        }
    }

    fn pivot(&self, from: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in from..self.n {
            for j in i + 1..self.n {
                let v = &self.a[i][j];
                if v.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[bi][bj].abs() <= v.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

/// Reduces an antisymmetric integer matrix to its Frobenius normal form.
///
/// Pivot choice: smallest nonzero magnitude, ties to the lowest row index
/// (then lowest column index).
pub fn frobenius_normal_form(m: &SkewIntMatrix) -> FrobeniusForm {
    let n = m.dim();
    let mut red = Reducer {
        n,
        a: m.as_matrix().rows(),
        e: IntMatrix::identity(n).rows(),
        t: IntMatrix::identity(n).rows(),
    };
    let mut divisors = Vec::new();
    let mut k = 0;
    while k + 1 < n {
        let mut found = false;
        loop {
            let Some((i, j)) = red.pivot(k) else { break };
            found = true;
            red.swap(i, k);
            red.swap(j, k + 1);
            let d = red.a[k][k + 1].clone();
            let mut clean = true;
            for col in k + 2..n {
                let c = -(&red.a[k][col] / &d);
                red.add(col, k + 1, &c);
                let c = -(&red.a[k + 1][col] / &red.a[k + 1][k]);
                red.add(col, k, &c);
                if !red.a[k][col].is_zero() || !red.a[k + 1][col].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let bad = (k + 2..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !red.a[i][j].is_multiple_of(&d));
            match bad {
                Some((i, _)) => red.add(k, i, &BigInt::one()),
                None => break,
            }
        }
        if !found {
            break;
        }
        if red.a[k][k + 1].is_positive() {
            red.swap(k, k + 1);
        }
        divisors.push(-red.a[k][k + 1].clone());
        k += 2;
    }

    // Interleaved pairs (2j, 2j+1) to blocks (j, r+j).
    let r = divisors.len();
    let mut target = vec![0usize; n];
    for j in 0..r {
        target[2 * j] = j;
        target[2 * j + 1] = r + j;
    }
    for (idx, slot) in target.iter_mut().enumerate().skip(2 * r) {
        *slot = idx;
    }
    let mut e = vec![Vec::new(); n];
    let mut t = vec![vec![BigInt::zero(); n]; n];
    for old in 0..n {
        e[target[old]] = red.e[old].clone();
        for row in 0..n {
            t[row][target[old]] = red.t[row][old].clone();
        }
    }
    let e = IntMatrix::from_rows(&e).expect("square");
    let t = IntMatrix::from_rows(&t).expect("square");
    let canonical = SkewIntMatrix::canonical(n, &divisors).expect("rank fits");
    FrobeniusForm {
        canonical,
        basis_change: t.transpose(),
        basis_change_inverse: e.transpose(),
        rank: 2 * r,
        divisors,
    }
}

/// Checks that every entry is positive and divides its successor.
pub fn validate_divisor_chain(divisors: &[BigInt]) -> Result<()> {
    for (j, d) in divisors.iter().enumerate() {
        if !d.is_positive() {
            return Err(Error::InvalidInput(format!("divisor {j} = {d} is not positive")));
        }
        if let Some(next) = divisors.get(j + 1) {
            if !next.is_multiple_of(d) {
                return Err(Error::InvalidInput(format!("divisor {d} does not divide {next}")));
            }
        }
    }
    Ok(())
}

/// Pfaffian of the principal minor on `axes` (0-based, distinct, even count).
pub fn pfaffian_minor(m: &SkewIntMatrix, axes: &[usize]) -> Result<BigInt> {
    if axes.len() % 2 != 0 {
        return Err(Error::InvalidInput(format!("odd number of axes ({})", axes.len())));
    }
    for (i, &a) in axes.iter().enumerate() {
        if a >= m.dim() {
            return Err(Error::InvalidInput(format!("axis {a} out of range for dimension {}", m.dim())));
        }
        if axes[..i].contains(&a) {
            return Err(Error::InvalidInput(format!("axis {a} repeated")));
        }
    }
    Ok(pfaffian_rec(m, axes))
}

fn pfaffian_rec(m: &SkewIntMatrix, axes: &[usize]) -> BigInt {
    if axes.is_empty() {
        return BigInt::one();
    }
    let first = axes[0];
    let mut total = BigInt::zero();
    for k in 1..axes.len() {
        let entry = m.get(first, axes[k]);
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = axes[1..].iter().enumerate().filter(|&(i, _)| i + 1 != k).map(|(_, &a)| a).collect();
        let sub = entry * pfaffian_rec(m, &rest);
        if k % 2 == 1 {
            total += sub;
        } else {
            total -= sub;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skew(rows: &[Vec<i64>]) -> SkewIntMatrix {
        SkewIntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn two_by_two_positive_entry_is_flipped() {
        let f = frobenius_normal_form(&skew(&[vec![0, 2], vec![-2, 0]]));
        assert_eq!(f.divisors, vec![BigInt::from(2)]);
        assert_eq!(f.canonical.to_i64_rows().unwrap(), vec![vec![0, -2], vec![2, 0]]);
        assert!(f.verify(&skew(&[vec![0, 2], vec![-2, 0]])));
    }

    #[test]
    fn four_by_four_chain() {
        let m = skew(&[vec![0, 2, 0, 0], vec![-2, 0, 0, 0], vec![0, 0, 0, 3], vec![0, 0, -3, 0]]);
        let f = frobenius_normal_form(&m);
        assert_eq!(f.divisors_i64().unwrap(), vec![1, 6]);
        assert!(f.verify(&m));
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let f = frobenius_normal_form(&SkewIntMatrix::zeros(3));
        assert_eq!(f.rank, 0);
        assert_eq!(f.basis_change, IntMatrix::identity(3));
    }

    #[test]
    fn odd_dimension_keeps_kernel() {
        let m = skew(&[vec![0, 1, 2], vec![-1, 0, 3], vec![-2, -3, 0]]);
        let f = frobenius_normal_form(&m);
        assert_eq!(f.rank, 2);
        assert_eq!(f.divisors_i64().unwrap(), vec![1]);
        assert!(f.verify(&m));
    }

    #[test]
    fn rejects_symmetric_input() {
        assert!(matches!(
            SkewIntMatrix::from_rows(&[vec![0i64, 1], vec![1, 0]]),
            Err(Error::NotAntisymmetric(_))
        ));
        assert!(SkewIntMatrix::from_rows(&[vec![1i64, 0], vec![0, -1]]).is_err());
    }

    #[test]
    fn divisor_chain_validation() {
        let ok: Vec<BigInt> = [3, 6, 18, 18].iter().map(|&v| BigInt::from(v)).collect();
        assert!(validate_divisor_chain(&ok).is_ok());
        let bad: Vec<BigInt> = [2, 3].iter().map(|&v| BigInt::from(v)).collect();
        assert!(validate_divisor_chain(&bad).is_err());
        assert!(validate_divisor_chain(&[BigInt::from(0)]).is_err());
    }

    #[test]
    fn pfaffian_small_cases() {
        let m = skew(&[vec![0, -3], vec![3, 0]]);
        assert_eq!(pfaffian_minor(&m, &[0, 1]).unwrap(), BigInt::from(-3));
        let m4 = skew(&[vec![0, 1, 0, 0], vec![-1, 0, 0, 0], vec![0, 0, 0, 2], vec![0, 0, -2, 0]]);
        assert_eq!(pfaffian_minor(&m4, &[0, 1, 2, 3]).unwrap(), BigInt::from(2));
        assert!(pfaffian_minor(&m4, &[0, 1, 2]).is_err());
        assert!(pfaffian_minor(&m4, &[0, 0]).is_err());
        assert!(pfaffian_minor(&m4, &[0, 7]).is_err());
    }

    #[test]
    fn pivot_tie_prefers_lowest_row() {
        // |entries| tie at 1 in rows 0 and 1; the reduction must start from (0,2).
        let m = skew(&[vec![0, 0, 1], vec![0, 0, 1], vec![-1, -1, 0]]);
        let f = frobenius_normal_form(&m);
        assert!(f.verify(&m));
        assert_eq!(f.divisors_i64().unwrap(), vec![1]);
    }

    #[test]
    fn bareiss_determinant() {
        let m = IntMatrix::from_rows(&[vec![2i64, 0, 1], vec![1, 3, 2], vec![1, 1, 2]]).unwrap();
        assert_eq!(m.determinant(), BigInt::from(6));
    }
}
