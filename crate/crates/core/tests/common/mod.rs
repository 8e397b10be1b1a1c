#![allow(dead_code)]

use nalgebra::DMatrix;
use symdiag::SymMatrix;

pub fn condition(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    sv.max() / sv.min()
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

pub fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Modes as tuples across the family: `modes[j][i] = spectra[i][j]`.
pub fn mode_tuples(spectra: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|j| spectra.iter().map(|sp| sp[j]).collect())
        .collect()
}

/// Largest componentwise deviation of a greedy one-to-one matching between
/// two multisets of mode tuples. Greedy is exact whenever the deviation is
/// small compared with the separation of distinct tuples.
pub fn match_modes(expected: &[Vec<f64>], got: &[Vec<f64>]) -> f64 {
    assert_eq!(expected.len(), got.len());
    let mut pool: Vec<&Vec<f64>> = got.iter().collect();
    let mut worst = 0.0f64;
    for e in expected {
        let dist = |g: &Vec<f64>| {
            e.iter()
                .zip(g)
                .map(|(x, y)| (x - y).abs() / x.abs().max(1.0))
                .fold(0.0, f64::max)
        };
        let (idx, d) = pool
            .iter()
            .enumerate()
            .map(|(i, g)| (i, dist(g)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        worst = worst.max(d);
        pool.swap_remove(idx);
    }
    worst
}

pub fn sym(dim: usize, rows: &[f64]) -> SymMatrix {
    SymMatrix::from_row_slice(dim, rows).unwrap()
}

pub fn powers_counterexample() -> SymMatrix {
    sym(2, &[2.0, 1.0, 1.0, 1.0])
}

pub fn squares_counterexample() -> (SymMatrix, SymMatrix) {
    let a = sym(
        4,
        &[
            3.0, 0.0, 0.0, 3.0, //
            0.0, 8.0, 5.0, 0.0, //
            0.0, 5.0, 5.0, 0.0, //
            3.0, 0.0, 0.0, 8.0,
        ],
    );
    let b = sym(
        4,
        &[
            7.0, 0.0, 0.0, 7.0, //
            0.0, 9.0, 2.0, 0.0, //
            0.0, 2.0, 2.0, 0.0, //
            7.0, 0.0, 0.0, 9.0,
        ],
    );
    (a, b)
}

/// Quadratic form `uᵀAu`.
pub fn quadratic(a: &DMatrix<f64>, u: &[f64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(u);
    (v.transpose() * a * &v)[(0, 0)]
}

/// Central finite-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, u: &[f64], h: f64) -> Vec<f64> {
    (0..u.len())
        .map(|i| {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[i] += h;
            dn[i] -= h;
            (f(&up) - f(&dn)) / (2.0 * h)
        })
        .collect()
}

/// `(∇f)ᵀ J (∇g)` in the interleaved layout.
pub fn canonical_bracket(gf: &[f64], gg: &[f64]) -> f64 {
    gf.chunks(2)
        .zip(gg.chunks(2))
        .map(|(a, b)| a[0] * b[1] - a[1] * b[0])
        .sum()
}
