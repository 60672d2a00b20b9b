//! Independent oracles used by the test and acceptance suites: dense
//! eigendecomposition and least-squares solves (nalgebra), fourth-order
//! finite-difference Laplacians, dense assembly of the block systems, and
//! log-log order fitting. These deliberately avoid the DFT/analytic paths
//! they are used to check.

use crate::interaction::{entry_row, Configuration, InteractionError, MatrixTag};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Fourth-order central finite-difference Laplacian of `f` at `x`.
pub fn fd_laplacian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> f64 {
    let mut acc = 0.0;
    let mut xs = x.to_vec();
    let f0 = f(x);
    for dim in 0..x.len() {
        let x0 = xs[dim];
        let mut sample = |d: f64| {
            xs[dim] = x0 + d;
            let v = f(&xs);
            xs[dim] = x0;
            v
        };
        let fp1 = sample(h);
        let fm1 = sample(-h);
        let fp2 = sample(2.0 * h);
        let fm2 = sample(-2.0 * h);
        acc += (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
    }
    acc
}

/// Eigenvalues of a dense real matrix (QR algorithm through nalgebra).
pub fn dense_eigenvalues(rows: &[Vec<f64>]) -> Vec<Complex64> {
    let k = rows.len();
    let m = DMatrix::from_fn(k, k, |i, j| rows[i][j]);
    m.complex_eigenvalues().iter().map(|z| Complex64::new(z.re, z.im)).collect()
}

/// Greedy multiset matching distance: max over a-entries of the distance to the
/// nearest unused b-entry.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for za in a {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        for (j, zb) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (za - zb).norm();
            if d < best {
                best = d;
                best_j = j;
            }
        }
        used[best_j] = true;
        worst = worst.max(best);
    }
    worst
}

fn dense_circulant(row: &[f64]) -> DMatrix<f64> {
    let k = row.len();
    DMatrix::from_fn(k, k, |i, j| row[(j + k - i) % k])
}

/// Dense 3k x 3k assembly of N = [[A,B,C],[B^T,F,D],[C^T,D^T,G]] from entry rows.
pub fn assemble_n_dense(cfg: &Configuration, xi: f64) -> Result<DMatrix<f64>, InteractionError> {
    let k = cfg.k();
    let a = dense_circulant(&entry_row(cfg, MatrixTag::A, xi)?);
    let b = dense_circulant(&entry_row(cfg, MatrixTag::B, xi)?);
    let c = dense_circulant(&entry_row(cfg, MatrixTag::C, xi)?);
    let d = dense_circulant(&entry_row(cfg, MatrixTag::D, xi)?);
    let f = dense_circulant(&entry_row(cfg, MatrixTag::F, xi)?);
    let g = dense_circulant(&entry_row(cfg, MatrixTag::G, xi)?);
    let mut n = DMatrix::zeros(3 * k, 3 * k);
    let blocks: [[&DMatrix<f64>; 3]; 3] = [[&a, &b, &c], [&b, &f, &d], [&c, &d, &g]];
    let transposed = [[false, false, false], [true, false, false], [true, true, false]];
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, blk) in row.iter().enumerate() {
            for i in 0..k {
                for j in 0..k {
                    let v = if transposed[bi][bj] { blk[(j, i)] } else { blk[(i, j)] };
                    n[(bi * k + i, bj * k + j)] = v;
                }
            }
        }
    }
    Ok(n)
}

pub fn assemble_h_dense(cfg: &Configuration, xi: f64) -> Result<DMatrix<f64>, InteractionError> {
    Ok(dense_circulant(&entry_row(cfg, MatrixTag::H, xi)?))
}

/// Minimal-norm least-squares solve through SVD with relative rank cutoff.
pub fn svd_min_norm_solve(m: &DMatrix<f64>, rhs: &[f64], rank_tol: f64) -> Vec<f64> {
    let b = DVector::from_column_slice(rhs);
    let svd = m.clone().svd(true, true);
    let x = svd.solve(&b, rank_tol).expect("svd solve");
    x.iter().copied().collect()
}

pub fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let x = DVector::from_column_slice(v);
    (m * x).iter().copied().collect()
}

pub fn frobenius_norm(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Least-squares slope of log(y) against log(x).
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fd_laplacian_quadratic() {
        // Laplacian of |x|^2 in R^3 is 6
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let lap = fd_laplacian(&f, &[0.3, -0.1, 0.7], 1e-2);
        assert_abs_diff_eq!(lap, 6.0, epsilon = 1e-9);
    }

    #[test]
    fn dense_eigenvalues_of_diagonal() {
        let rows = vec![vec![2.0, 0.0], vec![0.0, -3.0]];
        let mut eigs = dense_eigenvalues(&rows);
        eigs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_abs_diff_eq!(eigs[0].re, -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[1].re, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn slope_fit() {
        let xs = [8.0f64, 16.0, 32.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.5)).collect();
        assert_abs_diff_eq!(fit_loglog_slope(&xs, &ys), -1.5, epsilon = 1e-12);
    }
}
