//! Banded LU factorization with partial pivoting (column-major band storage
//! with room for the pivoting fill, the same layout LAPACK's `gbtrf` uses).

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
    factored: bool,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * n],
            ipiv: vec![0; n],
            factored: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (self.kl + self.ku + i - j) + j * self.ldab
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j <= i + self.ku && i <= j + self.kl
    }

    /// Adds `value` to entry `(i, j)`, which must lie inside the band.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.ab[k] += value;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.ab[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// In-place LU factorization.
    pub fn factor(&mut self) -> Result<()> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let kv = kl + ku;
        let ld = self.ldab;
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = self.ab[kv + j * ld].abs();
            for i in 1..=km {
                let a = self.ab[kv + i + j * ld].abs();
                if a > best {
                    best = a;
                    jp = i;
                }
            }
            self.ipiv[j] = j + jp;
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularJacobian);
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for jj in j..=ju {
                    let a = kv + j + jp - jj + jj * ld;
                    let b = kv + j - jj + jj * ld;
                    self.ab.swap(a, b);
                }
            }
            let pivot = self.ab[kv + j * ld];
            for i in 1..=km {
                self.ab[kv + i + j * ld] /= pivot;
            }
            for jj in j + 1..=ju {
                let t = self.ab[kv + j - jj + jj * ld];
                if t != 0.0 {
                    for i in 1..=km {
                        let l = self.ab[kv + i + j * ld];
                        self.ab[kv + j + i - jj + jj * ld] -= l * t;
                    }
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solves `A x = b` in place after [`BandMatrix::factor`].
    pub fn solve(&self, b: &mut [f64]) {
        assert!(self.factored, "solve before factor");
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let kv = kl + ku;
        let ld = self.ldab;
        for j in 0..n {
            let l = self.ipiv[j];
            if l != j {
                b.swap(l, j);
            }
            let bj = b[j];
            if bj != 0.0 {
                for i in 1..=kl.min(n - 1 - j) {
                    b[j + i] -= self.ab[kv + i + j * ld] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[kv + j * ld];
            let bj = b[j];
            if bj != 0.0 {
                for i in j.saturating_sub(kv)..j {
                    b[i] -= self.ab[kv + i - j + j * ld] * bj;
                }
            }
        }
    }
}
