use crate::geometry::DistanceTable;
use crate::scalar::Real;

use super::{ModeLabel, ModeSpectrum};

/// Two eigenvalues closer than this are treated as equal.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Eigenvalue coincidence between modes of different symmetry classes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccidentalDegeneracy<T> {
    pub a: ModeLabel,
    pub b: ModeLabel,
    pub gap: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Degeneracy<T> {
    /// Groups of mutually degenerate labels, each a subset of a
    /// `{p, N-p}` pair; sorted by first label.
    pub classes: Vec<Vec<ModeLabel>>,
    pub accidental: Vec<AccidentalDegeneracy<T>>,
}

fn symmetry_key(label: ModeLabel, n: usize) -> (u8, usize) {
    match label {
        ModeLabel::ZeroPlus => (0, 0),
        ModeLabel::ZeroMinus => (1, 0),
        ModeLabel::P(p) => (2, p.min(n - p)),
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut root = i;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = i;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Group modes by eigenvalue equality (within [`DEGENERACY_TOL`]).
///
/// Coincidences between different `{p, N-p}` symmetry classes are listed
/// as accidental and never merged into a class.
pub fn degeneracy_classes<T: Real>(spectrum: &ModeSpectrum<T>) -> Degeneracy<T> {
    let modes = &spectrum.modes;
    let n = spectrum.config.n_outer();
    let tol = T::lit(DEGENERACY_TOL);
    let mut parent: Vec<usize> = (0..modes.len()).collect();
    let mut accidental = Vec::new();
    for i in 0..modes.len() {
        for j in i + 1..modes.len() {
            let gap = (modes[i].mu - modes[j].mu).norm();
            if gap <= tol {
                let same_class = symmetry_key(modes[i].label, n) == symmetry_key(modes[j].label, n);
                if same_class {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[rj] = ri;
                } else {
                    accidental.push(AccidentalDegeneracy {
                        a: modes[i].label,
                        b: modes[j].label,
                        gap,
                    });
                }
            }
        }
    }
    let mut groups: Vec<Vec<ModeLabel>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for (i, mode) in modes.iter().enumerate() {
        let r = find(&mut parent, i);
        match roots.iter().position(|&x| x == r) {
            Some(k) => groups[k].push(mode.label),
            None => {
                roots.push(r);
                groups.push(vec![mode.label]);
            }
        }
    }
    for g in &mut groups {
        g.sort();
    }
    groups.sort();
    Degeneracy {
        classes: groups,
        accidental,
    }
}

/// `Σ_{A=2}^N F(R_1A) sin(2π p (A-1)/N)` with the angle taken literally.
///
/// Vanishes for every integer `p` and every `F` because the ring is
/// mirror symmetric, which is what reduces the carrier-space eigenvalues
/// to cosine transforms.
pub fn sine_sum_check<T: Real, F: Fn(T) -> T>(table: &DistanceTable<T>, p: i64, f: F) -> T {
    let n = table.config().n_outer();
    let nf = T::from_usize_lossy(n);
    let pf = T::from_i64(p).expect("p representable");
    (2..=n)
        .map(|a| {
            let angle = T::TAU() * pf * T::from_usize_lossy(a - 1) / nf;
            f(table.chord(a)) * angle.sin()
        })
        .sum()
}
