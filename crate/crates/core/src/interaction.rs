//! Leading-order eigenvalue coefficients of the circulant interaction matrices
//! (a, b, c, d, f, g and h_alpha per mode), the normalizing constant Xi, the
//! balancing scale mu, first rows of the matrices, and the asymptotic
//! comparison of the exact lattice sums against their g-function equivalents.

use crate::circulant::RootTable;
use crate::quad::{self, QuadError, QuadOpts};
use crate::series::{GKernel, SeriesError};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InteractionError {
    #[error("dimension {0} out of supported range (4..=48)")]
    InvalidDimension(usize),
    #[error("bubble count {0} too small; need k >= 2")]
    TooFewBubbles(usize),
    #[error("mode {m} out of range for k = {k}")]
    ModeOutOfRange { m: usize, k: usize },
    #[error("scale overflow: (1 - cos theta_2)^(-{exponent}) exceeds 1e300 at k = {k}")]
    ScaleOverflow { exponent: f64, k: usize },
    #[error("mode {m} maps to x = {x:.4} outside the admissible mid-range [pi/2, 3pi/2]")]
    ModeOutsideMidRange { m: usize, x: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Ring geometry: k bubbles at angles theta_l = 2 pi (l-1)/k with the balancing
/// scale mu solving mu^{(n-2)/2} * Σ_{l>1} (1-cos theta_l)^{-(n-2)/2} = 1.
#[derive(Debug, Clone)]
pub struct Configuration {
    n: usize,
    k: usize,
    mu: f64,
    roots: RootTable,
    /// 2 sin^2(pi j / k) = 1 - cos(2 pi j / k), j = 0..k-1, full relative accuracy.
    one_minus_cos: Vec<f64>,
    /// (1 - cos theta)^{-(n-2)/2} and ^{-n/2} for j = 1..k-1 (index 0 unused).
    w_half: Vec<f64>,
    w_full: Vec<f64>,
}

impl Configuration {
    pub fn new(n: usize, k: usize) -> Result<Self, InteractionError> {
        if !(4..=48).contains(&n) {
            return Err(InteractionError::InvalidDimension(n));
        }
        if k < 2 {
            return Err(InteractionError::TooFewBubbles(k));
        }
        let roots = RootTable::new(k);
        let mut one_minus_cos = vec![0.0; k];
        for j in 1..k {
            let s = (PI * j as f64 / k as f64).sin();
            one_minus_cos[j] = 2.0 * s * s;
        }
        // mirror symmetry exactly
        for j in 1..k.div_ceil(2) {
            one_minus_cos[k - j] = one_minus_cos[j];
        }
        let e_half = (n as f64 - 2.0) / 2.0;
        let e_full = n as f64 / 2.0;
        check_overflow(&one_minus_cos, e_full, k)?;
        let pow_table = |e: f64| -> Vec<f64> {
            let mut w = vec![0.0; k];
            for j in 1..=k / 2 {
                w[j] = one_minus_cos[j].powf(-e);
                w[k - j] = w[j];
            }
            w
        };
        let w_half = pow_table(e_half);
        let w_full = pow_table(e_full);
        let sum_half = kahan_sum((1..k).map(|j| w_half[j]));
        let mu = sum_half.powf(-2.0 / (n as f64 - 2.0));
        Ok(Configuration { n, k, mu, roots, one_minus_cos, w_half, w_full })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn roots(&self) -> &RootTable {
        &self.roots
    }
    pub fn theta(&self, l: usize) -> f64 {
        2.0 * PI * ((l - 1) % self.k) as f64 / self.k as f64
    }
    pub fn one_minus_cos(&self, j: usize) -> f64 {
        self.one_minus_cos[j % self.k]
    }
    /// mu^{n-2} (the common scale of every matrix entry).
    pub fn mu_pow(&self) -> f64 {
        self.mu.powi(self.n as i32 - 2)
    }
}

fn check_overflow(one_minus_cos: &[f64], e: f64, k: usize) -> Result<(), InteractionError> {
    let w2 = one_minus_cos[1].powf(-e);
    if !w2.is_finite() || w2 > 1e300 {
        return Err(InteractionError::ScaleOverflow { exponent: e, k });
    }
    Ok(())
}

/// Numerator of the shared lattice-sum primitive, as a function of theta_l.
#[derive(Debug, Clone, Copy)]
pub enum Numerator {
    One,
    CosTheta,
    SinTheta,
    /// a*cos(theta) + b
    Affine { cos_coeff: f64, constant: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Cos,
    Sin,
}

/// Σ_{l=2}^{k} numerator(theta_l) * phase(m theta_l) / (1 - cos theta_l)^exponent,
/// ascending l with compensated accumulation.
pub fn trig_kernel_sum(
    cfg: &Configuration,
    m: usize,
    numerator: Numerator,
    exponent: f64,
    phase: Phase,
) -> Result<f64, InteractionError> {
    if exponent <= 0.0 {
        return Err(InteractionError::InvalidDimension(cfg.n));
    }
    check_overflow(&cfg.one_minus_cos, exponent, cfg.k)?;
    let k = cfg.k;
    let e_half = (cfg.n as f64 - 2.0) / 2.0;
    let e_full = cfg.n as f64 / 2.0;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in 1..k {
        let w = if exponent == e_half {
            cfg.w_half[j]
        } else if exponent == e_full {
            cfg.w_full[j]
        } else {
            cfg.one_minus_cos[j].powf(-exponent)
        };
        let nu = match numerator {
            Numerator::One => 1.0,
            Numerator::CosTheta => cfg.roots.cos_at(j),
            Numerator::SinTheta => cfg.roots.sin_at(j),
            Numerator::Affine { cos_coeff, constant } => cos_coeff * cfg.roots.cos_at(j) + constant,
        };
        let ph = match phase {
            Phase::Cos => cfg.roots.cos_at(m * j),
            Phase::Sin => cfg.roots.sin_at(m * j),
        };
        let term = nu * ph * w;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}

fn kahan_sum(iter: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for term in iter {
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// The six leading-order eigenvalue scalars plus h_alpha, at one mode.
/// All on the Xi*mu^{n-2}-normalized ("bar") scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub m: usize,
    pub abar: f64,
    pub bbar: f64,
    pub cbar: f64,
    pub dbar: f64,
    pub fbar: f64,
    pub gbar: f64,
    /// One value for every alpha = 3..n.
    pub hbar_alpha: f64,
}

/// Leading-order coefficients at mode m.
///
/// The f coefficient's m-independent term carries exponent n/2 (as in the
/// diagonal display), which makes f+b = Σ (cos theta - cos m theta)/(1-cos)^{n/2};
/// that identity is what the m = 1 kernel case and the determinant signs require.
pub fn mode_coefficients(
    cfg: &Configuration,
    m: usize,
) -> Result<ModeCoefficients, InteractionError> {
    if m >= cfg.k {
        return Err(InteractionError::ModeOutOfRange { m, k: cfg.k });
    }
    let n = cfg.n as f64;
    let e_half = (n - 2.0) / 2.0;
    let e_full = n / 2.0;

    let s_a = trig_kernel_sum(cfg, m, Numerator::One, e_half, Phase::Cos)?;
    let abar = -e_half * s_a;
    let bbar = -abar;

    let s_f0 = trig_kernel_sum(cfg, 0, Numerator::CosTheta, e_full, Phase::Cos)?;
    let s_fm = trig_kernel_sum(
        cfg,
        m,
        Numerator::Affine { cos_coeff: e_half, constant: -e_full },
        e_full,
        Phase::Cos,
    )?;
    let fbar = s_f0 + s_fm;

    let s_g0 = trig_kernel_sum(
        cfg,
        0,
        Numerator::Affine { cos_coeff: e_half, constant: e_full },
        e_full,
        Phase::Cos,
    )?;
    let s_gm = trig_kernel_sum(
        cfg,
        m,
        Numerator::Affine { cos_coeff: e_half, constant: e_full },
        e_full,
        Phase::Cos,
    )?;
    let gbar = s_gm - s_g0;

    let cbar = e_half * trig_kernel_sum(cfg, m, Numerator::SinTheta, e_full, Phase::Sin)?;
    let dbar = -cbar;

    let s_hm = trig_kernel_sum(cfg, m, Numerator::One, e_full, Phase::Cos)?;
    let hbar_alpha = s_hm - s_f0;

    Ok(ModeCoefficients { m, abar, bbar, cbar, dbar, fbar, gbar, hbar_alpha })
}

/// Exact solution of the leading-order balance, mu = S^{-2/(n-2)} with
/// S = Σ_{l>1} (1-cos theta_l)^{-(n-2)/2}.
pub fn mu_solve(n: usize, k: usize) -> Result<f64, InteractionError> {
    Ok(Configuration::new(n, k)?.mu())
}

/// The positive constant Xi = p*gamma*(n-2)/2 * (-∫ y_1 U^{p-1} Z_1), with the
/// integration-by-parts route gamma*(n-2)/2 * ∫ U^p and the Gamma closed form
/// as cross-checks.
#[derive(Debug, Clone, Copy)]
pub struct XiConstant {
    pub n: usize,
    pub value: f64,
    /// gamma*(n-2)/2 * ∫U^p by quadrature.
    pub parts_path: f64,
    /// gamma*(n-2)/2 * 2^{(n+2)/2} pi^{n/2} / Gamma((n+2)/2).
    pub gamma_form: f64,
    pub dual_path_gap: f64,
}

pub fn xi_value(n: usize) -> Result<XiConstant, InteractionError> {
    if !(4..=48).contains(&n) {
        return Err(InteractionError::InvalidDimension(n));
    }
    let nf = n as f64;
    let p = (nf + 2.0) / (nf - 2.0);
    let gam = nf * (nf - 2.0) / 4.0;
    let area = quad::unit_sphere_area(n);
    let opts = QuadOpts::default();

    // -∫ y_1 U^{p-1} Z_1 = -(1/n) * area * ∫ r^{n+1} U^{p-1}(r) z1_radial(r) dr
    let i1 = -area / nf
        * quad::integrate_half_line(
            |r| {
                let r2 = r * r;
                quad::bubble_u_pm1(r2) * quad::bubble_z1_radial(n, r2) * r2 * r.powf(nf - 1.0)
            },
            opts,
        )?
        .value;
    let value = p * gam * (nf - 2.0) / 2.0 * i1;

    let int_up = area
        * quad::integrate_half_line(
            |r| quad::bubble_u(n, r * r).powf(p) * r.powf(nf - 1.0),
            opts,
        )?
        .value;
    let parts_path = gam * (nf - 2.0) / 2.0 * int_up;

    let gamma_form = gam * (nf - 2.0) / 2.0 * 2f64.powf((nf + 2.0) / 2.0) * PI.powf(nf / 2.0)
        / quad::gamma((nf + 2.0) / 2.0);

    let dual_path_gap = (value - parts_path).abs() / parts_path.abs();
    Ok(XiConstant { n, value, parts_path, gamma_form, dual_path_gap })
}

/// Which interaction matrix an entry row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixTag {
    A,
    B,
    C,
    D,
    F,
    G,
    H,
}

impl MatrixTag {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "A" | "a" => Some(MatrixTag::A),
            "B" | "b" => Some(MatrixTag::B),
            "C" | "c" => Some(MatrixTag::C),
            "D" | "d" => Some(MatrixTag::D),
            "F" | "f" => Some(MatrixTag::F),
            "G" | "g" => Some(MatrixTag::G),
            "H" | "h" => Some(MatrixTag::H),
            _ => None,
        }
    }
}

/// First row of the leading-order circulant, scaled by Xi*mu^{n-2}.
/// Off-diagonal entries follow the per-entry formulas; the diagonal row[0] is
/// reconstructed so the DFT of the row reproduces the analytic eigenvalues at
/// every mode (the printed diagonal displays carry inconsistent mu-powers).
pub fn entry_row(
    cfg: &Configuration,
    which: MatrixTag,
    xi: f64,
) -> Result<Vec<f64>, InteractionError> {
    let n = cfg.n as f64;
    let e_half = (n - 2.0) / 2.0;
    let e_full = n / 2.0;
    let scale = xi * cfg.mu_pow();
    let k = cfg.k;
    let mut row = vec![0.0; k];
    match which {
        MatrixTag::A => {
            for j in 1..k {
                row[j] = scale * (-e_half) * cfg.w_half[j];
            }
        }
        MatrixTag::B => {
            for j in 1..k {
                row[j] = scale * e_half * cfg.w_half[j];
            }
        }
        MatrixTag::C => {
            for j in 1..k {
                row[j] = scale * e_half * cfg.roots.sin_at(j) * cfg.w_full[j];
            }
        }
        MatrixTag::D => {
            for j in 1..k {
                row[j] = -scale * e_half * cfg.roots.sin_at(j) * cfg.w_full[j];
            }
        }
        MatrixTag::F => {
            for j in 1..k {
                row[j] = scale * (e_half * cfg.roots.cos_at(j) - e_full) * cfg.w_full[j];
            }
            row[0] = scale * trig_kernel_sum(cfg, 0, Numerator::CosTheta, e_full, Phase::Cos)?;
        }
        MatrixTag::G => {
            // canonicalized on the eigenvalue formula: off-diagonal sign is +,
            // diagonal balances so that eta_0 = 0
            for j in 1..k {
                row[j] = scale * (e_half * cfg.roots.cos_at(j) + e_full) * cfg.w_full[j];
            }
            row[0] = -scale
                * trig_kernel_sum(
                    cfg,
                    0,
                    Numerator::Affine { cos_coeff: e_half, constant: e_full },
                    e_full,
                    Phase::Cos,
                )?;
        }
        MatrixTag::H => {
            for j in 1..k {
                row[j] = scale * cfg.w_full[j];
            }
            row[0] = -scale * trig_kernel_sum(cfg, 0, Numerator::CosTheta, e_full, Phase::Cos)?;
        }
    }
    Ok(row)
}

/// Relative deviations of the exact mode sums from their g-function equivalents,
/// for mid-range modes 2 pi m / k in [pi/2, 3 pi/2].
///
/// The equivalents carry the factor 2 both tails of the lattice sum contribute:
///   abar ~ -(n-2)   * (k/(sqrt(2) pi))^{n-2} * g''(x)
///   gbar ~ -2(n-1)  * (k/(sqrt(2) pi))^{n}   * g(x)
///   cbar ~ sqrt(2)(n-2) * (k/(sqrt(2) pi))^{n-1} * g'(x)
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticDeviations {
    pub m: usize,
    pub x: f64,
    pub dev_a: f64,
    pub dev_g: f64,
    /// None when g'(x) vanishes (the comparison is skipped, e.g. x = pi).
    pub dev_c: Option<f64>,
    /// Ratio of the exact sum to the display without the factor 2 (tends to 2).
    pub display_ratio_a: f64,
}

pub fn asymptotic_check(
    cfg: &Configuration,
    m: usize,
    gk: &GKernel,
) -> Result<AsymptoticDeviations, InteractionError> {
    if m >= cfg.k {
        return Err(InteractionError::ModeOutOfRange { m, k: cfg.k });
    }
    let x = 2.0 * PI * m as f64 / cfg.k as f64;
    if !(PI / 2.0 - 1e-12..=1.5 * PI + 1e-12).contains(&x) {
        return Err(InteractionError::ModeOutsideMidRange { m, x });
    }
    // fold into [0, pi]: g even about pi, g' odd
    let (xf, gp_sign) = if x > PI { (2.0 * PI - x, -1.0) } else { (x, 1.0) };
    let (g, gp_raw, gpp) = gk.eval(xf)?;
    let gp = gp_sign * gp_raw;

    let n = cfg.n as f64;
    let kf = cfg.k as f64;
    let base = kf / (2f64.sqrt() * PI);
    let coeffs = mode_coefficients(cfg, m)?;

    let equiv_a = -(n - 2.0) * base.powf(n - 2.0) * gpp;
    let equiv_g = -2.0 * (n - 1.0) * base.powf(n) * g;
    let equiv_c = 2f64.sqrt() * (n - 2.0) * base.powf(n - 1.0) * gp;

    let dev_a = (coeffs.abar / equiv_a - 1.0).abs();
    let dev_g = (coeffs.gbar / equiv_g - 1.0).abs();
    let g_scale = base.powf(n - 1.0);
    let dev_c = if equiv_c.abs() <= 1e-9 * g_scale {
        None
    } else {
        Some((coeffs.cbar / equiv_c - 1.0).abs())
    };
    let display_ratio_a = coeffs.abar / (0.5 * equiv_a);
    Ok(AsymptoticDeviations { m, x, dev_a, dev_g, dev_c, display_ratio_a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circulant::Circulant;
    use approx::assert_abs_diff_eq;

    #[test]
    fn configuration_invariants() {
        let cfg = Configuration::new(4, 10).unwrap();
        // theta_1 = 0, strictly increasing, mirror symmetry
        assert_eq!(cfg.theta(1), 0.0);
        for l in 2..=10 {
            assert!(cfg.theta(l) > cfg.theta(l - 1));
        }
        for j in 2..=10usize {
            let a = cfg.theta(10 + 1 - (j - 1));
            let b = 2.0 * PI - cfg.theta(j);
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        // normalization exact: mu^{(n-2)/2} * sum = 1
        let s: f64 = (1..10).map(|j| cfg.w_half[j]).sum();
        assert_abs_diff_eq!(cfg.mu().powf(1.0) * s, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn lattice_sum_closed_form_k_squared() {
        // Σ 1/(1-cos theta_l) = (k^2-1)/6, confirmed by the direct sum
        for k in [4usize, 10, 33, 128] {
            let cfg = Configuration::new(4, k).unwrap();
            let s = trig_kernel_sum(&cfg, 0, Numerator::One, 1.0, Phase::Cos).unwrap();
            let closed = (k as f64 * k as f64 - 1.0) / 6.0;
            assert_abs_diff_eq!(s / closed, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn sin_phase_vanishes_at_mode_zero() {
        let cfg = Configuration::new(5, 12).unwrap();
        let s = trig_kernel_sum(&cfg, 0, Numerator::One, 2.5, Phase::Sin).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn single_term_sum_k2() {
        // k = 2: one term at theta = pi; numerator cos, exponent n/2, phase cos(m pi)
        for n in [4usize, 6, 9] {
            let cfg = Configuration::new(n, 2).unwrap();
            let s = trig_kernel_sum(&cfg, 1, Numerator::CosTheta, n as f64 / 2.0, Phase::Cos)
                .unwrap();
            assert_abs_diff_eq!(s, 2f64.powf(-(n as f64) / 2.0), epsilon = 1e-15);
        }
    }

    #[test]
    fn mu_examples() {
        // n=4, k=10: mu = 6/99
        assert_abs_diff_eq!(mu_solve(4, 10).unwrap(), 6.0 / 99.0, epsilon = 1e-15);
        // k=2: mu = 2 for any n (single term (1-cos pi) = 2)
        for n in [4usize, 7, 20] {
            assert_abs_diff_eq!(mu_solve(n, 2).unwrap(), 2.0, epsilon = 1e-12);
        }
        // n=4: mu*k^2 -> 6 (exact closed form 6 k^2/(k^2-1))
        let mu = mu_solve(4, 1000).unwrap();
        assert_abs_diff_eq!(mu * 1e6, 6.0, epsilon = 1e-4);
    }

    #[test]
    fn exact_identities_of_mode_coefficients() {
        let cfg = Configuration::new(5, 16).unwrap();
        for m in 0..16 {
            let c = mode_coefficients(&cfg, m).unwrap();
            assert_eq!(c.abar + c.bbar, 0.0);
            assert_eq!(c.cbar + c.dbar, 0.0);
        }
        let c0 = mode_coefficients(&cfg, 0).unwrap();
        assert_eq!(c0.gbar, 0.0);
        assert_eq!(c0.cbar, 0.0);
        // h telescopes termwise at m = 1 and k-1
        let c1 = mode_coefficients(&cfg, 1).unwrap();
        let ck1 = mode_coefficients(&cfg, 15).unwrap();
        assert_eq!(c1.hbar_alpha, 0.0);
        assert_eq!(ck1.hbar_alpha, 0.0);
        // parity: abar even, cbar odd under m <-> k-m (bitwise)
        for m in 1..8 {
            let cm = mode_coefficients(&cfg, m).unwrap();
            let ck = mode_coefficients(&cfg, 16 - m).unwrap();
            assert_eq!(cm.abar, ck.abar);
            assert_eq!(cm.cbar, -ck.cbar);
        }
    }

    #[test]
    fn case2_combination_is_exactly_zero_at_mode_one() {
        // f1 + b1 = Σ (cos th - cos th)/(1-cos th)^{n/2} = 0; with the canonical
        // exponent the cancellation is algebraic and the float residue is at
        // rounding level of the two sums.
        for (n, k) in [(4usize, 8usize), (5, 16), (7, 12)] {
            let cfg = Configuration::new(n, k).unwrap();
            let c1 = mode_coefficients(&cfg, 1).unwrap();
            let scale = c1.fbar.abs().max(c1.bbar.abs());
            assert!(
                (c1.fbar + c1.bbar).abs() <= 1e-12 * scale,
                "n={n} k={k}: f+b = {}",
                c1.fbar + c1.bbar
            );
        }
    }

    #[test]
    fn f_plus_b_formula() {
        // f_m + b_m = Σ (cos th_l - cos m th_l)/(1-cos th_l)^{n/2}
        let cfg = Configuration::new(6, 14).unwrap();
        for m in 0..14 {
            let c = mode_coefficients(&cfg, m).unwrap();
            let direct = trig_kernel_sum(&cfg, 0, Numerator::CosTheta, 3.0, Phase::Cos).unwrap()
                - trig_kernel_sum(&cfg, m, Numerator::One, 3.0, Phase::Cos).unwrap();
            let scale = c.fbar.abs().max(1.0);
            assert_abs_diff_eq!(c.fbar + c.bbar, direct, epsilon = 1e-11 * scale);
        }
    }

    #[test]
    fn xi_examples() {
        let xi = xi_value(4).unwrap();
        // n=4: Xi = 8 pi^2, ∫U^p = 4 pi^2
        assert_abs_diff_eq!(xi.value / (8.0 * PI * PI), 1.0, epsilon = 1e-10);
        assert!(xi.dual_path_gap < 1e-10, "{xi:?}");
        assert!((xi.parts_path - xi.gamma_form).abs() / xi.gamma_form < 1e-10);
        for n in [5usize, 7, 10] {
            let xi = xi_value(n).unwrap();
            assert!(xi.value > 0.0);
            assert!(xi.dual_path_gap < 1e-8);
        }
    }

    #[test]
    fn entry_row_examples() {
        // A, l=2, n=4, k=4: entry = -Xi mu^2 (1 - cos(pi/2) = 1)
        let cfg = Configuration::new(4, 4).unwrap();
        let xi = 8.0 * PI * PI;
        let row = entry_row(&cfg, MatrixTag::A, xi).unwrap();
        assert_abs_diff_eq!(row[1], -xi * cfg.mu_pow(), epsilon = 1e-12 * xi * cfg.mu_pow());
        // C: row[0] = 0 and antisymmetry
        let c_row = entry_row(&cfg, MatrixTag::C, xi).unwrap();
        assert_eq!(c_row[0], 0.0);
        for j in 1..4 {
            assert_eq!(c_row[j], -c_row[4 - j]);
        }
    }

    #[test]
    fn dft_of_rows_reproduces_eigenvalues() {
        for n in [4usize, 6, 8] {
            for k in [4usize, 8, 16] {
                let cfg = Configuration::new(n, k).unwrap();
                let xi = xi_value(n).unwrap().value;
                let scale = xi * cfg.mu_pow();
                for tag in [
                    MatrixTag::A,
                    MatrixTag::B,
                    MatrixTag::C,
                    MatrixTag::D,
                    MatrixTag::F,
                    MatrixTag::G,
                    MatrixTag::H,
                ] {
                    let row = entry_row(&cfg, tag, xi).unwrap();
                    let spec = Circulant::from_real(&row).unwrap().eigenvalues();
                    let mut max_scale = 0.0f64;
                    let mut max_err = 0.0f64;
                    for m in 0..k {
                        let c = mode_coefficients(&cfg, m).unwrap();
                        let target = scale
                            * match tag {
                                MatrixTag::A => num_complex::Complex64::new(c.abar, 0.0),
                                MatrixTag::B => num_complex::Complex64::new(c.bbar, 0.0),
                                MatrixTag::C => num_complex::Complex64::new(0.0, c.cbar),
                                MatrixTag::D => num_complex::Complex64::new(0.0, c.dbar),
                                MatrixTag::F => num_complex::Complex64::new(c.fbar, 0.0),
                                MatrixTag::G => num_complex::Complex64::new(c.gbar, 0.0),
                                MatrixTag::H => num_complex::Complex64::new(c.hbar_alpha, 0.0),
                            };
                        max_scale = max_scale.max(target.norm());
                        max_err = max_err.max((spec.eigenvalues[m] - target).norm());
                    }
                    assert!(
                        max_err <= 1e-10 * max_scale,
                        "n={n} k={k} {tag:?}: err {max_err:.3e} scale {max_scale:.3e}"
                    );
                }
            }
        }
    }

    #[test]
    fn asymptotic_midrange_deviations_decay() {
        let gk = GKernel::with_default_tol(5).unwrap();
        let mut prev: Option<AsymptoticDeviations> = None;
        for k in [32usize, 64, 128] {
            let cfg = Configuration::new(5, k).unwrap();
            let dev = asymptotic_check(&cfg, 3 * k / 8, &gk).unwrap();
            assert!((dev.display_ratio_a - 2.0).abs() < 0.05, "{dev:?}");
            if let Some(p) = prev {
                assert!(dev.dev_a < p.dev_a);
                assert!(dev.dev_g < p.dev_g);
                assert!(dev.dev_c.unwrap() < p.dev_c.unwrap());
            }
            prev = Some(dev);
        }
        // at x = pi, g' = 0: the c comparison is skipped
        let cfg = Configuration::new(5, 32).unwrap();
        let dev = asymptotic_check(&cfg, 16, &gk).unwrap();
        assert!(dev.dev_c.is_none());
        // out-of-midrange mode rejected
        assert!(matches!(
            asymptotic_check(&cfg, 1, &gk),
            Err(InteractionError::ModeOutsideMidRange { .. })
        ));
    }

    #[test]
    fn overflow_guard() {
        // (1-cos theta_2)^{-n/2} > 1e300 needs a very large k at n = 48:
        // the guard fires through the trig sum with a large explicit exponent
        let cfg = Configuration::new(4, 64).unwrap();
        assert!(matches!(
            trig_kernel_sum(&cfg, 0, Numerator::One, 200.0, Phase::Cos),
            Err(InteractionError::ScaleOverflow { .. })
        ));
    }
}
