//! Per-mode 3x3 Hermitian blocks of the interaction system, the determinant
//! ell_m with its solvability classification (kernel modes m = 0 and m = 1, k-1),
//! and the full block-circulant solvers for the N and H_alpha systems.

use crate::circulant::{backward_modes, forward_modes, RootTable};
use crate::interaction::{mode_coefficients, Configuration, InteractionError, ModeCoefficients};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModesError {
    #[error(transparent)]
    Interaction(#[from] InteractionError),
    #[error("solvability violated: {condition} = {magnitude:.3e} exceeds tol {tol:.3e}")]
    SolvabilityViolation { condition: String, magnitude: f64, tol: f64 },
    #[error("resonance: regular mode {m} has |ell| = {ell:.3e} (relative {rel:.3e})")]
    Resonance { m: usize, ell: f64, rel: f64 },
    #[error("ell_{m} is not finite (scale overflow at n = {n}, k = {k})")]
    NonFiniteEll { m: usize, n: usize, k: usize },
    #[error("rhs length {0} does not match k = {1}")]
    SizeMismatch(usize, usize),
    #[error("alpha = {0} outside 3..=n = {1}")]
    BadAlpha(usize, usize),
    #[error("solution has imaginary residue {0:.3e}; inputs were not conjugate-symmetric")]
    ImaginaryResidue(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// m = 0: third row/column vanish; kernel direction (0, 0, 1).
    Kernel0,
    /// m = 1 or k-1: the middle diagonal f+b vanishes; kernel direction (1, 1, 0).
    Kernel1,
    Regular,
}

/// The mode-m block, stored both in its raw Hermitian form and in the reduced
/// variables (y0 - y1, y1, y2).
#[derive(Debug, Clone)]
pub struct ModeBlock {
    pub m: usize,
    pub k: usize,
    pub coeffs: ModeCoefficients,
    /// det of the reduced matrix: -(b+f) (g b + c^2).
    pub ell: f64,
    pub case_tag: CaseTag,
}

pub fn case_for_mode(m: usize, k: usize) -> CaseTag {
    if m == 0 {
        CaseTag::Kernel0
    } else if m == 1 || m == k - 1 {
        CaseTag::Kernel1
    } else {
        CaseTag::Regular
    }
}

/// Builds the block from the mode coefficients (bar scale).
pub fn build_block(coeffs: &ModeCoefficients, k: usize) -> ModeBlock {
    let ell = ell_from_coeffs(coeffs);
    ModeBlock { m: coeffs.m, k, coeffs: *coeffs, ell, case_tag: case_for_mode(coeffs.m, k) }
}

pub fn ell_from_coeffs(c: &ModeCoefficients) -> f64 {
    -(c.bbar + c.fbar) * (c.gbar * c.bbar + c.cbar * c.cbar)
}

impl ModeBlock {
    /// The unreduced Hermitian block: [[a, b, ic], [b, f, id], [-ic, -id, g]].
    pub fn full_matrix(&self) -> [[Complex64; 3]; 3] {
        let c = &self.coeffs;
        let i = Complex64::new(0.0, 1.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        [
            [re(c.abar), re(c.bbar), i * c.cbar],
            [re(c.bbar), re(c.fbar), i * c.dbar],
            [-i * c.cbar, -i * c.dbar, re(c.gbar)],
        ]
    }

    /// The reduced matrix acting on (y0 - y1, y1, y2):
    /// [[-b, 0, ic], [0, f + b, 0], [-ic, 0, g]].
    pub fn reduced_matrix(&self) -> [[Complex64; 3]; 3] {
        let c = &self.coeffs;
        let i = Complex64::new(0.0, 1.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        let z = Complex64::new(0.0, 0.0);
        [
            [re(-c.bbar), z, i * c.cbar],
            [z, re(c.fbar + c.bbar), z],
            [-i * c.cbar, z, re(c.gbar)],
        ]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EllRecord {
    pub m: usize,
    pub ell: f64,
    pub sign: i8,
    pub case_tag: CaseTag,
}

/// ell_m for all modes, with non-finite values surfaced as scale overflow.
pub fn ell_scan(cfg: &Configuration) -> Result<Vec<EllRecord>, ModesError> {
    let mut out = Vec::with_capacity(cfg.k());
    for m in 0..cfg.k() {
        let coeffs = mode_coefficients(cfg, m)?;
        let ell = ell_from_coeffs(&coeffs);
        if !ell.is_finite() {
            return Err(ModesError::NonFiniteEll { m, n: cfg.n(), k: cfg.k() });
        }
        let sign = if ell > 0.0 {
            1
        } else if ell < 0.0 {
            -1
        } else {
            0
        };
        out.push(EllRecord { m, ell, sign, case_tag: case_for_mode(m, cfg.k()) });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BlockSolution {
    pub y: [Complex64; 3],
    pub case_tag: CaseTag,
    /// Null direction of the block when degenerate.
    pub kernel_dir: Option<[f64; 3]>,
}

/// Solves the mode block (bar scale) against a 3-component rhs.
///
/// Kernel0 requires the third rhs component to vanish; Kernel1 requires
/// h0 + h1 = 0; Regular solves the full Hermitian system and reports a
/// resonance when |ell| is tiny relative to the row scales.
pub fn solve_block(
    block: &ModeBlock,
    rhs: [Complex64; 3],
    tol: f64,
) -> Result<BlockSolution, ModesError> {
    let c = &block.coeffs;
    let i = Complex64::new(0.0, 1.0);
    let rhs_norm = (rhs[0].norm_sqr() + rhs[1].norm_sqr() + rhs[2].norm_sqr()).sqrt();
    let h0 = rhs[0];
    let h01 = rhs[0] + rhs[1];
    let h2 = rhs[2];
    match block.case_tag {
        CaseTag::Kernel0 => {
            // third row/column are exactly zero (g0 = c0 = 0)
            if h2.norm() > tol * rhs_norm.max(f64::MIN_POSITIVE) {
                return Err(ModesError::SolvabilityViolation {
                    condition: format!("mode {} third component h2", block.m),
                    magnitude: h2.norm(),
                    tol: tol * rhs_norm,
                });
            }
            let u = -h0 / c.bbar;
            let v = h01 / (c.fbar + c.bbar);
            Ok(BlockSolution {
                y: [u + v, v, Complex64::new(0.0, 0.0)],
                case_tag: CaseTag::Kernel0,
                kernel_dir: Some([0.0, 0.0, 1.0]),
            })
        }
        CaseTag::Kernel1 => {
            if h01.norm() > tol * rhs_norm.max(f64::MIN_POSITIVE) {
                return Err(ModesError::SolvabilityViolation {
                    condition: format!("mode {} combination h0 + h1", block.m),
                    magnitude: h01.norm(),
                    tol: tol * rhs_norm,
                });
            }
            let det2 = -(c.bbar * c.gbar + c.cbar * c.cbar);
            let u = (c.gbar * h0 - i * c.cbar * h2) / det2;
            let w = (i * c.cbar * h0 - c.bbar * h2) / det2;
            // y1 free: minimal-norm particular takes it zero
            Ok(BlockSolution {
                y: [u, Complex64::new(0.0, 0.0), w],
                case_tag: CaseTag::Kernel1,
                kernel_dir: Some([1.0, 1.0, 0.0]),
            })
        }
        CaseTag::Regular => {
            let row_scale = c.bbar.abs().max((c.fbar + c.bbar).abs()).max(c.gbar.abs()).max(c.cbar.abs());
            let rel = block.ell.abs() / row_scale.powi(3).max(f64::MIN_POSITIVE);
            if rel < 1e-10 {
                return Err(ModesError::Resonance { m: block.m, ell: block.ell, rel });
            }
            let v = h01 / (c.fbar + c.bbar);
            let det2 = -(c.bbar * c.gbar + c.cbar * c.cbar);
            let u = (c.gbar * h0 - i * c.cbar * h2) / det2;
            let w = (i * c.cbar * h0 - c.bbar * h2) / det2;
            Ok(BlockSolution { y: [u + v, v, w], case_tag: CaseTag::Regular, kernel_dir: None })
        }
    }
}

#[derive(Debug, Clone)]
pub struct BlockSolveResult {
    /// Concatenated (c0, c1, c2) for the N system, or the single vector for H.
    pub particular: Vec<f64>,
    pub kernel_basis: Vec<Vec<f64>>,
    pub free_parameters: usize,
    /// ||particular|| * k^n mu^{n-2} / ||s|| (the a-priori bound has an
    /// unspecified constant; recorded, never asserted).
    pub bound_ratio: f64,
}

fn to_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// cos / sin / ones structure vectors on the ring.
pub fn structure_vectors(cfg: &Configuration) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let k = cfg.k();
    let ones = vec![1.0; k];
    let cos: Vec<f64> = (0..k).map(|j| cfg.roots().cos_at(j)).collect();
    let sin: Vec<f64> = (0..k).map(|j| cfg.roots().sin_at(j)).collect();
    (ones, cos, sin)
}

/// Solves N (c0, c1, c2) = (s0, s1, s2) for the full-scale system
/// (blocks Xi mu^{n-2} D-bar), mode by mode through the DFT.
///
/// Solvable iff s2·1 = (s0+s1)·cos = (s0+s1)·sin = 0 (within tol, relative);
/// kernel basis: (0,0,1), (cos,cos,0), (sin,sin,0).
pub fn solve_n_system(
    cfg: &Configuration,
    xi: f64,
    s0: &[f64],
    s1: &[f64],
    s2: &[f64],
    tol: f64,
) -> Result<BlockSolveResult, ModesError> {
    let k = cfg.k();
    for s in [s0, s1, s2] {
        if s.len() != k {
            return Err(ModesError::SizeMismatch(s.len(), k));
        }
    }
    let (ones, cos, sin) = structure_vectors(cfg);
    let s01: Vec<f64> = s0.iter().zip(s1).map(|(a, b)| a + b).collect();
    let smax = norm2(s0).max(norm2(s1)).max(norm2(s2)).max(f64::MIN_POSITIVE);
    let checks = [
        ("s2 . 1_k", dot(s2, &ones), norm2(&ones)),
        ("(s0+s1) . cos", dot(&s01, &cos), norm2(&cos)),
        ("(s0+s1) . sin", dot(&s01, &sin), norm2(&sin)),
    ];
    for (name, val, vnorm) in checks {
        let thresh = tol * smax * vnorm.max(1.0);
        if val.abs() > thresh {
            return Err(ModesError::SolvabilityViolation {
                condition: name.to_string(),
                magnitude: val.abs(),
                tol: thresh,
            });
        }
    }

    let scale = xi * cfg.mu_pow();
    let roots = RootTable::new(k);
    let h0 = forward_modes(&roots, &to_complex(s0));
    let h1 = forward_modes(&roots, &to_complex(s1));
    let h2 = forward_modes(&roots, &to_complex(s2));

    let mut y0 = vec![Complex64::new(0.0, 0.0); k];
    let mut y1 = y0.clone();
    let mut y2 = y0.clone();
    for m in 0..k {
        let coeffs = mode_coefficients(cfg, m)?;
        let block = build_block(&coeffs, k);
        // mode-level solvability residues below the global tol are projected out
        let rhs = [h0[m] / scale, h1[m] / scale, h2[m] / scale];
        let sol = solve_block_projected(&block, rhs, tol)?;
        y0[m] = sol.y[0];
        y1[m] = sol.y[1];
        y2[m] = sol.y[2];
    }
    let c0 = backward_modes(&roots, &y0);
    let c1 = backward_modes(&roots, &y1);
    let c2 = backward_modes(&roots, &y2);

    let mut particular = Vec::with_capacity(3 * k);
    let mut imag: f64 = 0.0;
    let mut mag: f64 = 0.0;
    for part in [&c0, &c1, &c2] {
        for z in part.iter() {
            particular.push(z.re);
            imag = imag.max(z.im.abs());
            mag = mag.max(z.re.abs());
        }
    }
    if imag > 1e-10 * mag.max(1e-300) {
        return Err(ModesError::ImaginaryResidue(imag));
    }

    let mut kernel_basis = vec![];
    let zeros = vec![0.0; k];
    kernel_basis.push([zeros.clone(), zeros.clone(), ones.clone()].concat());
    let cos_vec = [cos.clone(), cos.clone(), zeros.clone()].concat();
    if norm2(&cos_vec) > 0.0 {
        kernel_basis.push(cos_vec);
    }
    let sin_vec = [sin.clone(), sin.clone(), zeros].concat();
    if norm2(&sin_vec) > 1e-15 {
        kernel_basis.push(sin_vec);
    }
    let free_parameters = kernel_basis.len();
    let bound_ratio =
        norm2(&particular) * (k as f64).powi(cfg.n() as i32) * cfg.mu_pow() / smax;
    Ok(BlockSolveResult { particular, kernel_basis, free_parameters, bound_ratio })
}

/// Like `solve_block`, but instead of rejecting sub-tolerance solvability
/// residues on kernel modes it projects them out (the outer system already
/// verified the global conditions).
fn solve_block_projected(
    block: &ModeBlock,
    rhs: [Complex64; 3],
    tol: f64,
) -> Result<BlockSolution, ModesError> {
    match block.case_tag {
        CaseTag::Kernel0 => {
            let adj = [rhs[0], rhs[1], Complex64::new(0.0, 0.0)];
            let mut sol = solve_block(block, adj, tol)?;
            sol.y[2] = Complex64::new(0.0, 0.0);
            Ok(sol)
        }
        CaseTag::Kernel1 => {
            // split h0+h1 residue evenly so the consistent part is solved
            let r = 0.5 * (rhs[0] + rhs[1]);
            let adj = [rhs[0] - r, rhs[1] - r, rhs[2]];
            solve_block(block, adj, tol)
        }
        CaseTag::Regular => solve_block(block, rhs, tol),
    }
}

/// Solves H_alpha c = s: a scalar circulant with eigenvalues Xi mu^{n-2} h_m and
/// exact kernel modes m = 1, k-1. Solvable iff s·cos = s·sin = 0.
pub fn solve_h_system(
    cfg: &Configuration,
    xi: f64,
    alpha: usize,
    s: &[f64],
    tol: f64,
) -> Result<BlockSolveResult, ModesError> {
    let k = cfg.k();
    if s.len() != k {
        return Err(ModesError::SizeMismatch(s.len(), k));
    }
    if !(3..=cfg.n()).contains(&alpha) {
        return Err(ModesError::BadAlpha(alpha, cfg.n()));
    }
    let (_, cos, sin) = structure_vectors(cfg);
    let snorm = norm2(s).max(f64::MIN_POSITIVE);
    for (name, v) in [("s . cos", &cos), ("s . sin", &sin)] {
        let val = dot(s, v);
        let thresh = tol * snorm * norm2(v).max(1.0);
        if val.abs() > thresh {
            return Err(ModesError::SolvabilityViolation {
                condition: format!("alpha={alpha} {name}"),
                magnitude: val.abs(),
                tol: thresh,
            });
        }
    }
    let scale = xi * cfg.mu_pow();
    let roots = RootTable::new(k);
    let h = forward_modes(&roots, &to_complex(s));
    let mut y = vec![Complex64::new(0.0, 0.0); k];
    let mut hbars = Vec::with_capacity(k);
    for m in 0..k {
        hbars.push(mode_coefficients(cfg, m)?.hbar_alpha);
    }
    let hmax = hbars.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    for m in 0..k {
        if m == 1 || m == k - 1 {
            continue; // exact kernel modes; residue already checked globally
        }
        let hb = hbars[m];
        if hb.abs() <= 1e-12 * hmax {
            return Err(ModesError::Resonance { m, ell: hb, rel: hb.abs() / hmax });
        }
        y[m] = h[m] / (scale * hb);
    }
    let c = backward_modes(&roots, &y);
    let mut particular = Vec::with_capacity(k);
    let mut imag: f64 = 0.0;
    let mut mag: f64 = 0.0;
    for z in &c {
        particular.push(z.re);
        imag = imag.max(z.im.abs());
        mag = mag.max(z.re.abs());
    }
    if imag > 1e-10 * mag.max(1e-300) {
        return Err(ModesError::ImaginaryResidue(imag));
    }
    let mut kernel_basis = vec![cos];
    if norm2(&sin) > 1e-15 {
        kernel_basis.push(sin);
    }
    let free_parameters = kernel_basis.len();
    let bound_ratio = norm2(&particular) * (k as f64).powi(cfg.n() as i32) * cfg.mu_pow() / snorm;
    Ok(BlockSolveResult { particular, kernel_basis, free_parameters, bound_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn block_cases_and_ell() {
        let cfg = Configuration::new(4, 16).unwrap();
        for m in 0..16 {
            let c = mode_coefficients(&cfg, m).unwrap();
            let b = build_block(&c, 16);
            match m {
                0 => assert_eq!(b.case_tag, CaseTag::Kernel0),
                1 | 15 => assert_eq!(b.case_tag, CaseTag::Kernel1),
                _ => assert_eq!(b.case_tag, CaseTag::Regular),
            }
            // ell equals the cofactor-expansion determinant of the reduced matrix
            let r = b.reduced_matrix();
            let det = r[1][1] * (r[0][0] * r[2][2] - r[0][2] * r[2][0]);
            assert!(det.im.abs() < 1e-9 * det.re.abs().max(1e-300));
            let scale = b.ell.abs().max(1e-300);
            assert!(
                (det.re - b.ell).abs() <= 1e-10 * scale,
                "m={m}: {} vs {}",
                det.re,
                b.ell
            );
        }
    }

    #[test]
    fn ell_signs() {
        let cfg = Configuration::new(4, 16).unwrap();
        let scan = ell_scan(&cfg).unwrap();
        assert_eq!(scan[0].ell, 0.0);
        for r in &scan {
            if (2..=14).contains(&r.m) {
                assert!(r.ell < 0.0, "m={} ell={}", r.m, r.ell);
            }
        }
        // symmetric under m <-> k - m (bitwise by parity of the sums)
        for m in 1..8 {
            assert_eq!(scan[m].ell, scan[16 - m].ell);
        }
    }

    #[test]
    fn mode_one_block_annihilates_one_one_zero() {
        let cfg = Configuration::new(5, 12).unwrap();
        let c = mode_coefficients(&cfg, 1).unwrap();
        let b = build_block(&c, 12);
        let f = b.full_matrix();
        let v = [cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)];
        let mut scale: f64 = 0.0;
        for row in &f {
            for e in row {
                scale = scale.max(e.norm());
            }
        }
        for row in &f {
            let r: Complex64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(r.norm() <= 1e-12 * scale, "residual {r}");
        }
    }

    #[test]
    fn solve_block_cases() {
        let cfg = Configuration::new(4, 16).unwrap();
        // Kernel0 with rhs (0, 1, 0): solvable, y2 stays free (zero)
        let b0 = build_block(&mode_coefficients(&cfg, 0).unwrap(), 16);
        let sol = solve_block(&b0, [cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)], 1e-9).unwrap();
        assert_eq!(sol.kernel_dir, Some([0.0, 0.0, 1.0]));
        assert_eq!(sol.y[2], cx(0.0, 0.0));
        // check the first two equations hold
        let f = b0.full_matrix();
        for (r, want) in f.iter().take(2).zip([cx(0.0, 0.0), cx(1.0, 0.0)]) {
            let got: Complex64 = r.iter().zip(&sol.y).map(|(a, b)| a * b).sum();
            assert!((got - want).norm() < 1e-10);
        }
        // Kernel0 with rhs (0,0,1) is inconsistent
        assert!(matches!(
            solve_block(&b0, [cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)], 1e-9),
            Err(ModesError::SolvabilityViolation { .. })
        ));

        // Kernel1 with rhs (1, 1, 0): h0 + h1 = 2 != 0 -> inconsistent
        let b1 = build_block(&mode_coefficients(&cfg, 1).unwrap(), 16);
        assert!(matches!(
            solve_block(&b1, [cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)], 1e-9),
            Err(ModesError::SolvabilityViolation { .. })
        ));
        // Kernel1 with admissible rhs (1, -1, 0.3i)
        let sol = solve_block(&b1, [cx(1.0, 0.0), cx(-1.0, 0.0), cx(0.0, 0.3)], 1e-9).unwrap();
        let f = b1.full_matrix();
        let want = [cx(1.0, 0.0), cx(-1.0, 0.0), cx(0.0, 0.3)];
        for (r, w) in f.iter().zip(want) {
            let got: Complex64 = r.iter().zip(&sol.y).map(|(a, b)| a * b).sum();
            assert!((got - w).norm() < 1e-10, "{got} vs {w}");
        }

        // Regular block with random-ish rhs: residual at machine level
        let b5 = build_block(&mode_coefficients(&cfg, 5).unwrap(), 16);
        assert!(b5.ell < 0.0);
        let rhs = [cx(0.3, -0.1), cx(-0.7, 0.2), cx(0.05, 0.9)];
        let sol = solve_block(&b5, rhs, 1e-9).unwrap();
        let f = b5.full_matrix();
        let scale = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (r, w) in f.iter().zip(rhs) {
            let got: Complex64 = r.iter().zip(&sol.y).map(|(a, b)| a * b).sum();
            assert!((got - w).norm() <= 1e-10 * scale.max(1.0), "{got} vs {w}");
        }
    }

    #[test]
    fn solve_n_zero_rhs() {
        let cfg = Configuration::new(5, 16).unwrap();
        let z = vec![0.0; 16];
        let res = solve_n_system(&cfg, 1.0, &z, &z, &z, 1e-9).unwrap();
        assert_eq!(res.free_parameters, 3);
        assert!(res.particular.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn solve_n_rejects_ones_on_s2() {
        let cfg = Configuration::new(5, 16).unwrap();
        let z = vec![0.0; 16];
        let ones = vec![1.0; 16];
        let err = solve_n_system(&cfg, 1.0, &z, &z, &ones, 1e-9).unwrap_err();
        match err {
            ModesError::SolvabilityViolation { condition, magnitude, .. } => {
                assert!(condition.contains("s2 . 1_k"));
                assert_abs_diff_eq!(magnitude, 16.0, epsilon = 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn solve_h_rejects_cos_and_zero_is_zero() {
        let cfg = Configuration::new(5, 16).unwrap();
        let (_, cos, _) = structure_vectors(&cfg);
        let err = solve_h_system(&cfg, 1.0, 3, &cos, 1e-9).unwrap_err();
        assert!(matches!(err, ModesError::SolvabilityViolation { .. }));

        let z = vec![0.0; 16];
        let res = solve_h_system(&cfg, 1.0, 4, &z, 1e-9).unwrap();
        assert_eq!(res.free_parameters, 2);
        assert!(res.particular.iter().all(|&x| x == 0.0));
        assert!(solve_h_system(&cfg, 1.0, 2, &z, 1e-9).is_err());
        assert!(solve_h_system(&cfg, 1.0, 6, &z, 1e-9).is_err());
    }
}
