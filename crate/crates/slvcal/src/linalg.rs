//! Banded LU factorization with partial pivoting, and compensated sums.
//!
//! The factorization stores the matrix row-wise over `2·kl + ku + 1`
//! diagonals; partial pivoting among the `kl` rows below the diagonal fills
//! at most `kl` extra superdiagonals, so everything stays inside the band.
//! The same code serves the tridiagonal/pentadiagonal directional solves of
//! the ADI scheme and the wider system coupling both directions in the
//! damped startup steps.

use crate::error::{Result, SlvError};

/// LU factors of a banded matrix with `kl` sub- and `ku` superdiagonals.
#[derive(Debug)]
pub(crate) struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row-major working band: row `i` holds columns `i-kl ..= i+ku+kl`.
    w: Vec<f64>,
    /// Multipliers of the eliminated entries, `kl` per column.
    mult: Vec<f64>,
    /// Pivot row chosen at each elimination column.
    piv: Vec<usize>,
}

impl BandedLu {
    /// Factors the matrix whose entry `(i, j)` is given by `entry`; `entry`
    /// is only consulted inside the band.
    pub(crate) fn factor(
        n: usize,
        kl: usize,
        ku: usize,
        entry: impl Fn(usize, usize) -> f64,
    ) -> Result<BandedLu> {
        let width = 2 * kl + ku + 1;
        let mut w = vec![0.0; n * width];
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                w[i * width + (j + kl - i)] = entry(i, j);
            }
        }
        let mut mult = vec![0.0; n * kl];
        let mut piv = vec![0usize; n];

        let idx = |i: usize, j: usize| i * width + (j + kl - i);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = w[idx(k, k)].abs();
            for r in k + 1..=last {
                let cand = w[idx(r, k)].abs();
                if cand > best {
                    best = cand;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(SlvError::Singular(format!(
                    "zero or non-finite pivot at column {k}"
                )));
            }
            piv[k] = p;
            if p != k {
                // Swap the stored spans of rows k and p over the shared
                // column range [k, k + ku + kl].
                let hi = (k + ku + kl).min(n - 1);
                for j in k..=hi {
                    w.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = w[idx(k, k)];
            let hi = (k + ku + kl).min(n - 1);
            for r in k + 1..=last {
                let m = w[idx(r, k)] / pivot;
                mult[k * kl + (r - k - 1)] = m;
                if m != 0.0 {
                    for j in k + 1..=hi {
                        w[idx(r, j)] -= m * w[idx(k, j)];
                    }
                }
                w[idx(r, k)] = 0.0;
            }
        }
        Ok(BandedLu {
            n,
            kl,
            ku,
            w,
            mult,
            piv,
        })
    }

    /// Solves `A x = rhs` in place.
    pub(crate) fn solve_in_place(&self, rhs: &mut [f64]) {
        debug_assert_eq!(rhs.len(), self.n);
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let width = 2 * kl + ku + 1;
        let idx = |i: usize, j: usize| i * width + (j + kl - i);
        for k in 0..n {
            if self.piv[k] != k {
                rhs.swap(k, self.piv[k]);
            }
            let last = (k + kl).min(n - 1);
            let rk = rhs[k];
            for r in k + 1..=last {
                let m = self.mult[k * kl + (r - k - 1)];
                if m != 0.0 {
                    rhs[r] -= m * rk;
                }
            }
        }
        for k in (0..n).rev() {
            let hi = (k + ku + kl).min(n - 1);
            let mut acc = rhs[k];
            for j in k + 1..=hi {
                acc -= self.w[idx(k, j)] * rhs[j];
            }
            rhs[k] = acc / self.w[idx(k, k)];
        }
    }
}

/// Neumaier-compensated sum; keeps grid functionals (mass, duality values)
/// accurate to a couple of ulps independent of the term count.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Compensated dot product of two equal-length slices.
pub(crate) fn compensated_dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    compensated_sum(a.iter().zip(b.iter()).map(|(x, y)| x * y))
}
