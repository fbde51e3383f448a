//! Brute-force reference: build `R` in the site basis and diagonalize it
//! numerically, without using any of the ring symmetry.

mod eigen;

use std::fmt::Write as _;

pub use eigen::{eigenpairs, schur, Dense, EigenPair, Schur};

use crate::correlation::Kernel;
use crate::error::{Error, Result};
use crate::geometry::{self, RingConfig};
use crate::scalar::{bilinear, cplx, imag_unit, Real, C};

/// Default dimension cap for [`eigen_numeric`].
pub const MAX_DIM: usize = 64;

/// Bilinear self-norm `|v^T v|` (for unit `v`) below which a mode is
/// reported as near-defective.
pub const NEAR_DEFECTIVE: f64 = 1e-8;

/// Relative gap under which eigenvalues are treated as one cluster when
/// building bilinear-orthonormal bases.
pub const CLUSTER_TOL: f64 = 1e-9;

const SWEEPS_PER_EIGENVALUE: usize = 60;

/// The complex-symmetric matrix `R` in the uncorrelated site basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMatrix<T> {
    pub entries: Dense<T>,
}

impl<T: Real> ChannelMatrix<T> {
    pub fn dim(&self) -> usize {
        self.entries.n
    }

    /// A single isolated atom, `R = [i]`.
    pub fn isolated() -> Self {
        let mut entries = Dense::zeros(1);
        entries[(0, 0)] = imag_unit();
        Self { entries }
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..i).all(|j| self.entries[(i, j)] == self.entries[(j, i)]))
    }

    /// Row-major text dump: one row per line, entries `re,im` separated by
    /// single spaces.
    pub fn to_text(&self) -> String {
        let n = self.dim();
        let mut out = String::new();
        for i in 0..n {
            for j in 0..n {
                let z = self.entries[(i, j)];
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{:?},{:?}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let rows: Vec<Vec<C<T>>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|line| {
                line.split_whitespace()
                    .map(parse_entry::<T>)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("matrix text is not square".into()));
        }
        let mut entries = Dense::zeros(n);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, z) in row.into_iter().enumerate() {
                entries[(i, j)] = z;
            }
        }
        Ok(Self { entries })
    }
}

fn parse_entry<T: Real>(tok: &str) -> Result<C<T>> {
    let bad = || Error::InvalidArgument(format!("bad matrix entry '{tok}'"));
    let (re, im) = tok.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    Ok(cplx(T::lit(re), T::lit(im)))
}

/// Assemble `R`: diagonal `i`, off-diagonal `M(k R_AB)`. Each unordered pair
/// is evaluated once and mirrored.
pub fn build_matrix<T: Real>(
    config: &RingConfig<T>,
    kernel: &Kernel<T>,
) -> Result<ChannelMatrix<T>> {
    let table = geometry::build(config);
    let n = config.n_sites();
    let mut entries = Dense::zeros(n);
    for i in 0..n {
        entries[(i, i)] = imag_unit();
        for j in 0..i {
            let m = kernel.at_distance(table.between(i, j))?.m;
            entries[(i, j)] = m;
            entries[(j, i)] = m;
        }
    }
    Ok(ChannelMatrix { entries })
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions<T> {
    /// Residual tolerance, relative to `max(1, ||R||_F)`, for unit right
    /// vectors.
    pub tol: T,
    pub max_dim: usize,
}

impl<T: Real> Default for OracleOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-10),
            max_dim: MAX_DIM,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericMode<T> {
    pub mu: C<T>,
    /// Right eigenvector scaled so that `left · right = 1`.
    pub right: Vec<C<T>>,
    pub left: Vec<C<T>>,
}

#[derive(Clone, Debug)]
pub struct NumericSpectrum<T> {
    pub modes: Vec<NumericMode<T>>,
    /// Largest `||R v - mu v||_inf` over unit right vectors.
    pub max_residual: T,
    /// Smallest `|v^T v|` over unit vectors after in-cluster
    /// orthogonalization.
    pub min_bilinear_norm: T,
    pub near_defective: bool,
}

impl<T: Real> NumericSpectrum<T> {
    pub fn eigenvalues(&self) -> Vec<C<T>> {
        self.modes.iter().map(|m| m.mu).collect()
    }

    /// Largest entry of `sum_p right_p left_p^T - 1`.
    pub fn completeness_error(&self) -> T {
        let n = self.modes.first().map_or(0, |m| m.right.len());
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let s: C<T> = self.modes.iter().map(|m| m.right[i] * m.left[j]).sum();
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((s - cplx(target, T::zero())).norm());
            }
        }
        worst
    }
}

/// Numerical eigendecomposition with the default options.
pub fn eigen_numeric<T: Real>(matrix: &ChannelMatrix<T>, tol: T) -> Result<NumericSpectrum<T>> {
    eigen_numeric_with(
        matrix,
        OracleOptions {
            tol,
            ..OracleOptions::default()
        },
    )
}

pub fn eigen_numeric_with<T: Real>(
    matrix: &ChannelMatrix<T>,
    opts: OracleOptions<T>,
) -> Result<NumericSpectrum<T>> {
    let n = matrix.dim();
    if n > opts.max_dim {
        return Err(Error::DimensionCap {
            dim: n,
            cap: opts.max_dim,
        });
    }
    let pairs = eigenpairs(&matrix.entries, SWEEPS_PER_EIGENVALUE)?;
    let scale = matrix.entries.frobenius().max(T::one());
    let mut max_residual = T::zero();
    for (mu, v) in &pairs {
        let rv = matrix.entries.mul_vec(v);
        let res = rv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - b * mu).norm())
            .fold(T::zero(), T::max);
        max_residual = max_residual.max(res);
    }
    let tol = opts.tol * scale;
    if !(max_residual <= tol) {
        return Err(Error::Residual {
            residual: max_residual.to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        });
    }

    let clusters = cluster(&pairs, T::lit(CLUSTER_TOL) * scale);
    let mut modes = Vec::with_capacity(n);
    let mut min_norm = T::infinity();
    for members in clusters {
        let mu_mean =
            members.iter().map(|&k| pairs[k].0).sum::<C<T>>() / T::from_usize_lossy(members.len());
        let vectors: Vec<Vec<C<T>>> = members.iter().map(|&k| pairs[k].1.clone()).collect();
        let (basis, worst) = bilinear_orthonormalize(vectors);
        min_norm = min_norm.min(worst);
        for (w, &k) in basis.into_iter().zip(&members) {
            let mu = if members.len() == 1 {
                pairs[k].0
            } else {
                refine(&matrix.entries, &w, mu_mean)
            };
            modes.push(NumericMode {
                mu,
                left: w.clone(),
                right: w,
            });
        }
    }
    Ok(NumericSpectrum {
        modes,
        max_residual,
        min_bilinear_norm: min_norm,
        near_defective: min_norm < T::lit(NEAR_DEFECTIVE),
    })
}

/// Rayleigh-type quotient `w^T R w / w^T w`; falls back to `fallback` for
/// degenerate denominators.
fn refine<T: Real>(r: &Dense<T>, w: &[C<T>], fallback: C<T>) -> C<T> {
    let den = bilinear(w, w);
    if den.norm() < T::lit(NEAR_DEFECTIVE) {
        return fallback;
    }
    bilinear(w, &r.mul_vec(w)) / den
}

fn cluster<T: Real>(pairs: &[(C<T>, Vec<C<T>>)], tol: T) -> Vec<Vec<usize>> {
    let n = pairs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in 0..i {
            if (pairs[i].0 - pairs[j].0).norm() <= tol {
                let a = find(&mut parent, i);
                let b = find(&mut parent, j);
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(i);
    }
    groups
}

/// Pivoted Gram-Schmidt with respect to the bilinear form `a^T b`.
/// Returns the basis (each `w^T w = 1`) and the smallest `|v^T v|/|v|^2`
/// seen at a pivot.
fn bilinear_orthonormalize<T: Real>(mut vectors: Vec<Vec<C<T>>>) -> (Vec<Vec<C<T>>>, T) {
    let mut basis: Vec<Vec<C<T>>> = Vec::with_capacity(vectors.len());
    let mut worst = T::infinity();
    while !vectors.is_empty() {
        let quality = |v: &[C<T>]| {
            let n2: T = v.iter().map(|z| z.norm_sqr()).sum();
            if n2 == T::zero() {
                T::zero()
            } else {
                bilinear(v, v).norm() / n2
            }
        };
        let mut best = 0;
        let mut best_q = quality(&vectors[0]);
        for (k, v) in vectors.iter().enumerate().skip(1) {
            let q = quality(v);
            if q > best_q {
                best = k;
                best_q = q;
            }
        }
        // an isotropic pivot can often be repaired by mixing with another member
        if best_q < T::lit(NEAR_DEFECTIVE) && vectors.len() > 1 {
            let other = if best == 0 { 1 } else { 0 };
            for phase in [cplx(T::one(), T::zero()), cplx(T::zero(), T::one())] {
                let mixed: Vec<C<T>> = vectors[best]
                    .iter()
                    .zip(&vectors[other])
                    .map(|(a, b)| a + b * phase)
                    .collect();
                let q = quality(&mixed);
                if q > best_q {
                    best_q = q;
                    vectors[best] = mixed;
                }
            }
        }
        worst = worst.min(best_q);
        let v = vectors.swap_remove(best);
        let norm = bilinear(&v, &v).sqrt();
        let w: Vec<C<T>> = if norm.norm() == T::zero() {
            v
        } else {
            v.iter().map(|z| z / norm).collect()
        };
        for u in &mut vectors {
            let proj = bilinear(&w, u);
            for (ui, wi) in u.iter_mut().zip(&w) {
                *ui -= wi * proj;
            }
            let n2: T = u.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if n2 > T::zero() {
                for ui in u.iter_mut() {
                    *ui /= n2;
                }
            }
        }
        basis.push(w);
    }
    (basis, worst)
}

/// Optimal min-max pairing between two equally sized eigenvalue multisets.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching<T> {
    /// `pairs[k] = (i, j)` pairs `a[i]` with `b[j]`.
    pub pairs: Vec<(usize, usize)>,
    pub max_gap: T,
}

/// Bottleneck assignment: among all perfect matchings choose one that
/// minimizes the largest `|a_i - b_j|`.
pub fn match_eigenvalues<T: Real>(a: &[C<T>], b: &[C<T>]) -> Result<Matching<T>> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "multiset sizes differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n == 0 {
        return Ok(Matching {
            pairs: Vec::new(),
            max_gap: T::zero(),
        });
    }
    let dist: Vec<Vec<T>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    let mut levels: Vec<T> = dist.iter().flatten().copied().collect();
    levels.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    levels.dedup();
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    let mut best = perfect_matching(&dist, levels[hi])
        .expect("complete bipartite graph has a perfect matching");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match perfect_matching(&dist, levels[mid]) {
            Some(m) => {
                best = m;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let pairs: Vec<(usize, usize)> = best.iter().enumerate().map(|(j, &i)| (i, j)).collect();
    let max_gap = pairs
        .iter()
        .map(|&(i, j)| dist[i][j])
        .fold(T::zero(), T::max);
    let mut pairs = pairs;
    pairs.sort_unstable();
    Ok(Matching { pairs, max_gap })
}

/// Kuhn's augmenting-path matching restricted to edges `dist <= level`.
/// Returns `owner[j] = i` for every column.
fn perfect_matching<T: Real>(dist: &[Vec<T>], level: T) -> Option<Vec<usize>> {
    let n = dist.len();
    let mut owner = vec![usize::MAX; n];
    fn augment<T: Real>(
        i: usize,
        dist: &[Vec<T>],
        level: T,
        seen: &mut [bool],
        owner: &mut [usize],
    ) -> bool {
        for j in 0..dist.len() {
            if dist[i][j] <= level && !seen[j] {
                seen[j] = true;
                if owner[j] == usize::MAX || augment(owner[j], dist, level, seen, owner) {
                    owner[j] = i;
                    return true;
                }
            }
        }
        false
    }
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, dist, level, &mut seen, &mut owner) {
            return None;
        }
    }
    Some(owner)
}
