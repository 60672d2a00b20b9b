//! Circulant matrix algebra: spectra by the explicit DFT formula, the unitary
//! eigenvector matrix, multiplication, and mode-space solving with kernel handling.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CirculantError {
    #[error("empty first row")]
    EmptyRow,
    #[error("rhs length {0} does not match matrix size {1}")]
    SizeMismatch(usize, usize),
    #[error("all modes degenerate (zero matrix)")]
    AllModesDegenerate,
    #[error("inconsistent rhs: kernel mode {mode} has |rhs-hat| = {magnitude:.3e} > tol {tol:.3e}")]
    InconsistentRhs { mode: usize, magnitude: f64, tol: f64 },
}

/// Unit roots e^{2 pi i j / k} for j = 0..k-1, built with exact mirror symmetry:
/// table[k-j] is bitwise (conj of table[j]). Shared by spectra and mode transforms.
#[derive(Debug, Clone)]
pub struct RootTable {
    k: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl RootTable {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1);
        let mut cos = vec![0.0; k];
        let mut sin = vec![0.0; k];
        for j in 0..=k / 2 {
            let th = 2.0 * PI * j as f64 / k as f64;
            cos[j] = th.cos();
            sin[j] = th.sin();
        }
        for j in 1..k.div_ceil(2) {
            cos[k - j] = cos[j];
            sin[k - j] = -sin[j];
        }
        if k >= 2 && k % 2 == 0 {
            cos[k / 2] = -1.0;
            sin[k / 2] = 0.0;
        }
        cos[0] = 1.0;
        sin[0] = 0.0;
        RootTable { k, cos, sin }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// e^{2 pi i (m j mod k)/k}
    pub fn root(&self, m: usize, j: usize) -> Complex64 {
        let idx = (m * j) % self.k;
        Complex64::new(self.cos[idx], self.sin[idx])
    }

    pub fn cos_at(&self, j: usize) -> f64 {
        self.cos[j % self.k]
    }

    pub fn sin_at(&self, j: usize) -> f64 {
        self.sin[j % self.k]
    }
}

/// A k x k circulant matrix given by its first row x_0..x_{k-1};
/// entry(i,j) = row[(j - i) mod k].
#[derive(Debug, Clone, PartialEq)]
pub struct Circulant {
    row: Vec<Complex64>,
}

/// Eigenvalues in mode order, eta_m = Σ_l row[l] e^{2 pi i m l / k}.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct CirculantSolution {
    /// Minimal-norm particular solution.
    pub particular: Vec<Complex64>,
    /// Mode indices declared degenerate (free parameters of the solution set).
    pub kernel_modes: Vec<usize>,
}

impl Circulant {
    pub fn new(row: Vec<Complex64>) -> Result<Self, CirculantError> {
        if row.is_empty() {
            return Err(CirculantError::EmptyRow);
        }
        Ok(Circulant { row })
    }

    pub fn from_real(row: &[f64]) -> Result<Self, CirculantError> {
        Circulant::new(row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn k(&self) -> usize {
        self.row.len()
    }

    pub fn row(&self) -> &[Complex64] {
        &self.row
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let k = self.k();
        self.row[(j + k - i % k) % k]
    }

    /// Dense assembly (for oracles and reconstruction checks).
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let k = self.k();
        (0..k).map(|i| (0..k).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// All k eigenvalues by the explicit exponential sum, O(k^2), fixed order,
    /// compensated accumulation.
    pub fn eigenvalues(&self) -> Spectrum {
        let k = self.k();
        let roots = RootTable::new(k);
        let mut eigenvalues = Vec::with_capacity(k);
        for m in 0..k {
            let mut re = Kahan::default();
            let mut im = Kahan::default();
            for (l, x) in self.row.iter().enumerate() {
                let w = roots.root(m, l);
                let p = x * w;
                re.add(p.re);
                im.add(p.im);
            }
            eigenvalues.push(Complex64::new(re.sum, im.sum));
        }
        Spectrum { eigenvalues }
    }

    /// Matrix-vector product (dense route over the first row).
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>, CirculantError> {
        let k = self.k();
        if v.len() != k {
            return Err(CirculantError::SizeMismatch(v.len(), k));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); k];
        for (i, o) in out.iter_mut().enumerate() {
            let mut re = Kahan::default();
            let mut im = Kahan::default();
            for j in 0..k {
                let p = self.entry(i, j) * v[j];
                re.add(p.re);
                im.add(p.im);
            }
            *o = Complex64::new(re.sum, im.sum);
        }
        Ok(out)
    }

    /// Solves C x = rhs in the DFT basis. A mode is degenerate when
    /// |eta_m| <= kernel_tol * max_m |eta_m|; degenerate modes require the
    /// transformed rhs component to vanish to the same relative tolerance and
    /// contribute free parameters (set to zero in the minimal-norm particular).
    pub fn solve(
        &self,
        rhs: &[Complex64],
        kernel_tol: f64,
    ) -> Result<CirculantSolution, CirculantError> {
        let k = self.k();
        if rhs.len() != k {
            return Err(CirculantError::SizeMismatch(rhs.len(), k));
        }
        let spec = self.eigenvalues();
        let max_eta = spec.eigenvalues.iter().map(|e| e.norm()).fold(0.0, f64::max);
        if max_eta == 0.0 {
            return Err(CirculantError::AllModesDegenerate);
        }
        let roots = RootTable::new(k);
        let rhs_hat = forward_modes(&roots, rhs);
        let rhs_norm = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tol_abs = kernel_tol * rhs_norm.max(f64::MIN_POSITIVE);

        let mut y_hat = vec![Complex64::new(0.0, 0.0); k];
        let mut kernel_modes = Vec::new();
        for m in 0..k {
            if spec.eigenvalues[m].norm() <= kernel_tol * max_eta {
                kernel_modes.push(m);
                let mag = rhs_hat[m].norm();
                if mag > tol_abs {
                    return Err(CirculantError::InconsistentRhs { mode: m, magnitude: mag, tol: tol_abs });
                }
            } else {
                y_hat[m] = rhs_hat[m] / spec.eigenvalues[m];
            }
        }
        let particular = backward_modes(&roots, &y_hat);
        Ok(CirculantSolution { particular, kernel_modes })
    }
}

/// Column m of the unitary DFT eigenvector matrix: k^{-1/2}(1, w^m, w^{2m}, ...).
pub fn eigenvector_matrix(k: usize) -> Vec<Vec<Complex64>> {
    let roots = RootTable::new(k);
    let scale = 1.0 / (k as f64).sqrt();
    (0..k)
        .map(|m| (0..k).map(|l| roots.root(m, l) * scale).collect())
        .collect()
}

/// P* v: mode coefficients of v in the DFT eigenbasis.
pub fn forward_modes(roots: &RootTable, v: &[Complex64]) -> Vec<Complex64> {
    let k = roots.k();
    let scale = 1.0 / (k as f64).sqrt();
    (0..k)
        .map(|m| {
            let mut re = Kahan::default();
            let mut im = Kahan::default();
            for (l, x) in v.iter().enumerate() {
                let w = roots.root(m, l).conj();
                let p = x * w;
                re.add(p.re);
                im.add(p.im);
            }
            Complex64::new(re.sum, im.sum) * scale
        })
        .collect()
}

/// P y: back-transform of mode coefficients.
pub fn backward_modes(roots: &RootTable, y: &[Complex64]) -> Vec<Complex64> {
    let k = roots.k();
    let scale = 1.0 / (k as f64).sqrt();
    (0..k)
        .map(|l| {
            let mut re = Kahan::default();
            let mut im = Kahan::default();
            for (m, x) in y.iter().enumerate() {
                let p = x * roots.root(m, l);
                re.add(p.re);
                im.add(p.im);
            }
            Complex64::new(re.sum, im.sum) * scale
        })
        .collect()
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, term: f64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_and_ones_spectra() {
        let mut row = vec![c(0.0); 8];
        row[0] = c(1.0);
        let id = Circulant::new(row).unwrap();
        for e in id.eigenvalues().eigenvalues {
            assert_abs_diff_eq!(e.re, 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(e.im, 0.0, epsilon = 1e-15);
        }

        let ones = Circulant::new(vec![c(1.0); 8]).unwrap();
        let spec = ones.eigenvalues().eigenvalues;
        assert_abs_diff_eq!(spec[0].re, 8.0, epsilon = 1e-13);
        for e in &spec[1..] {
            assert!(e.norm() < 1e-13);
        }
    }

    #[test]
    fn symmetric_row_real_spectrum_antisymmetric_imaginary() {
        let k = 16;
        let mut sym = vec![0.0; k];
        let mut asym = vec![0.0; k];
        for l in 1..k {
            let v = 1.0 / (l as f64 + 0.5);
            sym[l] = v + (1.0 / (k - l) as f64 + 0.5).recip();
            asym[l] = v;
        }
        for l in 1..k {
            sym[l] = sym[l].min(sym[k - l]);
            sym[k - l] = sym[l];
        }
        sym[0] = 0.7;
        for l in 1..=k / 2 {
            let v = if l == k - l { 0.0 } else { 1.0 / l as f64 };
            asym[l] = v;
            asym[k - l] = -v;
        }
        asym[0] = 0.0;
        for e in Circulant::from_real(&sym).unwrap().eigenvalues().eigenvalues {
            assert!(e.im.abs() < 1e-12, "{e}");
        }
        for e in Circulant::from_real(&asym).unwrap().eigenvalues().eigenvalues {
            assert!(e.re.abs() < 1e-12, "{e}");
        }
    }

    #[test]
    fn eigenvector_matrix_small_cases() {
        let p1 = eigenvector_matrix(1);
        assert_abs_diff_eq!(p1[0][0].re, 1.0, epsilon = 1e-15);

        let p2 = eigenvector_matrix(2);
        let s = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(p2[0][0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(p2[1][1].re, -s, epsilon = 1e-15);
    }

    #[test]
    fn eigenvector_matrix_unitary_k8() {
        let k = 8;
        let p = eigenvector_matrix(k);
        for a in 0..k {
            for b in 0..k {
                // (P* P)_{ab} = sum_l conj(P[l][a]) P[l][b]
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..k {
                    acc += p[a][l].conj() * p[b][l];
                }
                let expect = if a == b { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(acc.re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(acc.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn solve_identity_and_ones() {
        let mut row = vec![c(0.0); 6];
        row[0] = c(1.0);
        let id = Circulant::new(row).unwrap();
        let rhs: Vec<Complex64> = (0..6).map(|i| c(i as f64 - 2.0)).collect();
        let sol = id.solve(&rhs, 1e-10).unwrap();
        assert!(sol.kernel_modes.is_empty());
        for (a, b) in sol.particular.iter().zip(&rhs) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
        }

        // ones matrix: rhs = (k, 0, ..., 0) has DFT_0 = k/sqrt(k) != 0 on the only
        // invertible mode; the solution is the mean vector and k-1 kernel modes.
        let k = 5;
        let ones = Circulant::new(vec![c(1.0); k]).unwrap();
        let mut rhs = vec![c(0.0); k];
        rhs[0] = c(k as f64);
        let sol = ones.solve(&rhs, 1e-10).unwrap();
        assert_eq!(sol.kernel_modes.len(), k - 1);
        for a in &sol.particular {
            assert_abs_diff_eq!(a.re, 1.0, epsilon = 1e-12);
        }

        // an rhs with nonzero components on the kernel modes is rejected
        let mut bad = vec![c(0.0); k];
        bad[1] = c(1.0);
        bad[0] = c(-1.0);
        assert!(matches!(
            ones.solve(&bad, 1e-10),
            Err(CirculantError::InconsistentRhs { .. })
        ));
    }

    #[test]
    fn spectrum_linearity() {
        let k = 12;
        let r1: Vec<f64> = (0..k).map(|l| ((l * 7 + 1) % 5) as f64 - 1.5).collect();
        let r2: Vec<f64> = (0..k).map(|l| ((l * 3 + 2) % 7) as f64 * 0.25).collect();
        let sum: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| a + b).collect();
        let e1 = Circulant::from_real(&r1).unwrap().eigenvalues().eigenvalues;
        let e2 = Circulant::from_real(&r2).unwrap().eigenvalues().eigenvalues;
        let es = Circulant::from_real(&sum).unwrap().eigenvalues().eigenvalues;
        for m in 0..k {
            assert!((e1[m] + e2[m] - es[m]).norm() < 1e-12);
        }
    }

    #[test]
    fn transpose_spectrum_is_conjugate() {
        let k = 9;
        let row: Vec<f64> = (0..k).map(|l| (l as f64 * 0.37).sin()).collect();
        let mut trow = vec![0.0; k];
        trow[0] = row[0];
        for l in 1..k {
            trow[l] = row[k - l];
        }
        let e = Circulant::from_real(&row).unwrap().eigenvalues().eigenvalues;
        let et = Circulant::from_real(&trow).unwrap().eigenvalues().eigenvalues;
        // transpose spectrum equals the conjugate multiset; with this mode
        // convention eta^T_m = conj(eta_m) holds mode-by-mode.
        for m in 0..k {
            assert!((et[m] - e[m].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn reconstruction_from_modes() {
        // P diag(eta) P* reproduces the dense assembly entrywise
        for k in [4usize, 16, 64] {
            let row: Vec<f64> = (0..k).map(|l| ((l * l + 3) % 11) as f64 * 0.1 - 0.4).collect();
            let circ = Circulant::from_real(&row).unwrap();
            let eta = circ.eigenvalues().eigenvalues;
            let p = eigenvector_matrix(k);
            let dense = circ.to_dense();
            for i in 0..k {
                for j in 0..k {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for m in 0..k {
                        acc += p[m][i] * eta[m] * p[m][j].conj();
                    }
                    assert!(
                        (acc - dense[i][j]).norm() < 1e-10,
                        "k={k} ({i},{j}): {acc} vs {}",
                        dense[i][j]
                    );
                }
            }
        }
    }
}
