//! Dense eigendecomposition of general complex matrices.
//!
//! Householder reduction to upper Hessenberg form, then single-shift
//! implicit QR sweeps (Wilkinson shift, Givens bulge chasing) down to a
//! complex Schur form `A = Z T Z^H`. Eigenvectors come from back
//! substitution on `T`.

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense<T> {
    pub n: usize,
    pub data: Vec<C<T>>,
}

impl<T: Real> Dense<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C::new(T::zero(), T::zero()); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Dense<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Dense<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Complex Schur decomposition `A = Z T Z^H`.
#[derive(Clone, Debug)]
pub struct Schur<T> {
    pub t: Dense<T>,
    pub z: Dense<T>,
}

fn zero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

fn hessenberg<T: Real>(a: &mut Dense<T>, z: &mut Dense<T>) {
    let n = a.n;
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == T::zero() {
            C::new(T::one(), T::zero())
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<C<T>> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for e in &mut v {
            *e /= vnorm;
        }
        let two = T::lit(2.0);
        // A <- (I - 2 v v^H) A
        for j in 0..n {
            let dot: C<T> = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * a[(k + 1 + r, j)])
                .sum();
            for (r, vr) in v.iter().enumerate() {
                a[(k + 1 + r, j)] -= vr * dot * two;
            }
        }
        // A <- A (I - 2 v v^H), Z <- Z (I - 2 v v^H)
        for m in [&mut *a, &mut *z] {
            for i in 0..n {
                let dot: C<T> = v
                    .iter()
                    .enumerate()
                    .map(|(r, vr)| m[(i, k + 1 + r)] * vr)
                    .sum();
                for (r, vr) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= dot * vr.conj() * two;
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = zero();
        }
    }
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
fn givens<T: Real>(x: C<T>, y: C<T>) -> (T, C<T>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == T::zero() {
        return (T::one(), zero());
    }
    if ax == T::zero() {
        return (T::zero(), y.conj() / ay);
    }
    let norm = ax.hypot(ay);
    let phase = x / ax;
    (ax / norm, phase * y.conj() / norm)
}

fn wilkinson<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> C<T> {
    let half = T::lit(0.5);
    let m = (a + d) * half;
    let h = (a - d) * half;
    let disc = (h * h + b * c).sqrt();
    let l1 = m + disc;
    let l2 = m - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Reduce `a` to complex Schur form.
pub fn schur<T: Real>(a: &Dense<T>, max_sweeps_per_eigenvalue: usize) -> Result<Schur<T>> {
    let n = a.n;
    let mut h = a.clone();
    let mut z = Dense::identity(n);
    hessenberg(&mut h, &mut z);
    if n < 2 {
        return Ok(Schur { t: h, z });
    }
    let eps = T::epsilon();
    let scale = h.frobenius().max(T::min_positive_value());
    let budget = max_sweeps_per_eigenvalue * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == T::zero() {
                diag = scale;
            }
            if sub <= eps * diag {
                h[(lo, lo - 1)] = zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > budget {
            return Err(Error::NoConvergence { iterations: total });
        }
        let mut shift = wilkinson(
            h[(hi - 1, hi - 1)],
            h[(hi - 1, hi)],
            h[(hi, hi - 1)],
            h[(hi, hi)],
        );
        if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            shift = h[(hi, hi)] + C::new(h[(hi, hi - 1)].norm() * T::lit(0.75), T::zero());
        }
        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let first_col = if k == lo { lo } else { k - 1 };
            for j in first_col..n {
                let u = h[(k, j)];
                let w = h[(k + 1, j)];
                h[(k, j)] = u * c + s * w;
                h[(k + 1, j)] = -s.conj() * u + w * c;
            }
            if k > lo {
                h[(k + 1, k - 1)] = zero();
            }
            let last_row = (k + 2).min(hi);
            for i in 0..=last_row {
                let p = h[(i, k)];
                let q = h[(i, k + 1)];
                h[(i, k)] = p * c + q * s.conj();
                h[(i, k + 1)] = -p * s + q * c;
            }
            for i in 0..n {
                let p = z[(i, k)];
                let q = z[(i, k + 1)];
                z[(i, k)] = p * c + q * s.conj();
                z[(i, k + 1)] = -p * s + q * c;
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = zero();
        }
    }
    Ok(Schur { t: h, z })
}

pub type EigenPair<T> = (C<T>, Vec<C<T>>);

/// Eigenvalues and unit-norm right eigenvectors (columns) of `a`.
pub fn eigenpairs<T: Real>(
    a: &Dense<T>,
    max_sweeps_per_eigenvalue: usize,
) -> Result<Vec<EigenPair<T>>> {
    let n = a.n;
    let Schur { t, z } = schur(a, max_sweeps_per_eigenvalue)?;
    let norm = t.frobenius().max(T::min_positive_value());
    let degenerate = T::lit(1e-10) * norm;
    let small = T::epsilon() * norm;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = vec![zero::<T>(); n];
        y[k] = C::new(T::one(), T::zero());
        for j in (0..k).rev() {
            let s: C<T> = (j + 1..=k).map(|m| t[(j, m)] * y[m]).sum();
            let mut denom = t[(j, j)] - lambda;
            if denom.norm() <= degenerate {
                // same eigenvalue cluster: the Schur vector j already spans
                // its own eigendirection
                y[j] = zero();
                continue;
            }
            if denom.norm() < small {
                denom = C::new(small, T::zero());
            }
            y[j] = -s / denom;
        }
        let mut x: Vec<C<T>> = (0..n)
            .map(|i| (0..=k).map(|m| z[(i, m)] * y[m]).sum())
            .collect();
        let xn = x.iter().map(|e| e.norm_sqr()).sum::<T>().sqrt();
        for e in &mut x {
            *e /= xn;
        }
        out.push((lambda, x));
    }
    Ok(out)
}
