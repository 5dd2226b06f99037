//! Small dense helpers for covariance matrices.

use crate::scalar::Scalar;

pub type Matrix<S> = Vec<Vec<S>>;

/// Gauss-Jordan inverse with partial pivoting. `None` when a pivot falls
/// below `1e-10` relative to the largest diagonal entry.
pub fn invert<S: Scalar>(m: &[Vec<S>]) -> Option<Matrix<S>> {
    let n = m.len();
    let scale = m
        .iter()
        .enumerate()
        .map(|(k, row)| row[k].abs())
        .fold(S::zero(), S::max);
    if n == 0 {
        return Some(Vec::new());
    }
    if scale <= S::zero() {
        return None;
    }
    let tol = scale * S::lit(1e-10);
    let mut a: Matrix<S> = m.to_vec();
    let mut inv: Matrix<S> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { S::one() } else { S::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())
            .unwrap();
        if !(a[pivot][col].abs() > tol) {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for c in 0..n {
            a[col][c] /= p;
            inv[col][c] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col];
            if f == S::zero() {
                continue;
            }
            for c in 0..n {
                let (ac, ic) = (a[col][c], inv[col][c]);
                a[r][c] -= f * ac;
                inv[r][c] -= f * ic;
            }
        }
    }
    Some(symmetrize(inv))
}

pub fn symmetrize<S: Scalar>(mut m: Matrix<S>) -> Matrix<S> {
    let n = m.len();
    let half = S::lit(0.5);
    for r in 0..n {
        for c in r + 1..n {
            let v = (m[r][c] + m[c][r]) * half;
            m[r][c] = v;
            m[c][r] = v;
        }
    }
    m
}

pub fn mat_vec<S: Scalar>(m: &[Vec<S>], v: &[S]) -> Vec<S> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| *a * *b).sum())
        .collect()
}

/// Running mean and covariance (Welford), with an `n - 1` denominator.
#[derive(Clone, Debug)]
pub struct Moments<S> {
    n: usize,
    mean: Vec<S>,
    comoment: Matrix<S>,
    diag_only: bool,
}

impl<S: Scalar> Moments<S> {
    pub fn new(dim: usize) -> Self {
        Moments {
            n: 0,
            mean: vec![S::zero(); dim],
            comoment: vec![vec![S::zero(); dim]; dim],
            diag_only: false,
        }
    }

    /// Only tracks variances.
    pub fn variances_only(dim: usize) -> Self {
        Moments {
            diag_only: true,
            ..Self::new(dim)
        }
    }

    pub fn push(&mut self, x: &[S]) {
        self.n += 1;
        let n = S::from_count(self.n as u64);
        let dim = self.mean.len();
        let before: Vec<S> = (0..dim).map(|k| x[k] - self.mean[k]).collect();
        for k in 0..dim {
            self.mean[k] += before[k] / n;
        }
        for r in 0..dim {
            let after_r = x[r] - self.mean[r];
            if self.diag_only {
                self.comoment[r][r] += before[r] * after_r;
                continue;
            }
            for c in 0..dim {
                self.comoment[r][c] += before[c] * after_r;
            }
        }
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> &[S] {
        &self.mean
    }

    pub fn covariance(&self) -> Matrix<S> {
        let dim = self.mean.len();
        if self.n < 2 {
            return vec![vec![S::zero(); dim]; dim];
        }
        let d = S::from_count(self.n as u64 - 1);
        symmetrize(
            self.comoment
                .iter()
                .map(|row| row.iter().map(|v| *v / d).collect())
                .collect(),
        )
    }

    pub fn std_devs(&self) -> Vec<S> {
        let dim = self.mean.len();
        if self.n < 2 {
            return vec![S::zero(); dim];
        }
        let d = S::from_count(self.n as u64 - 1);
        (0..dim)
            .map(|k| (self.comoment[k][k] / d).max(S::zero()).sqrt())
            .collect()
    }
}
