//! Adaptive Gauss-Kronrod quadrature (finite intervals and the half-line via the
//! tangent substitution), the Gamma function, and the closed-form integral
//! identities of the bubble profile: the beta integral, the moment integrals,
//! the Z-mass identities, and the Kelvin-transform lemma.

use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature budget exhausted: {intervals} intervals, error estimate {error:.3e} > target {target:.3e}")]
    BudgetExhausted { intervals: usize, error: f64, target: f64 },
    #[error("divergent parameters: {0}")]
    DivergentParameters(String),
    #[error("weight precondition failed: Kelvin-weight identity violated at {0:.3e} relative")]
    WeightPrecondition(f64),
    #[error("nonfinite integrand value at x = {0}")]
    NonfiniteIntegrand(f64),
}

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadOpts {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_2,
    0.949_107_912_342_758_524_5,
    0.864_864_423_359_769_072_8,
    0.741_531_185_599_394_439_9,
    0.586_087_235_467_691_130_3,
    0.405_845_151_377_397_166_9,
    0.207_784_955_007_898_467_6,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_964,
    0.063_092_092_629_978_553_291,
    0.104_790_010_322_250_183_84,
    0.140_653_259_715_525_918_75,
    0.169_004_726_639_267_902_83,
    0.190_350_578_064_785_409_91,
    0.204_432_940_075_298_892_07,
    0.209_482_141_084_727_828_01,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_27,
    0.279_705_391_489_276_667_9,
    0.381_830_050_505_118_944_95,
    0.417_959_183_673_469_387_76,
];

fn qk15(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let hl = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonfiniteIntegrand(c));
    }
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    for j in 0..7 {
        let x = hl * XGK[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        if !f1.is_finite() || !f2.is_finite() {
            return Err(QuadError::NonfiniteIntegrand(c - x));
        }
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let value = resk * hl;
    let err = ((resk - resg) * hl).abs();
    Ok((value, err))
}

/// Globally adaptive bisection on [a, b], worst-interval-first with a
/// deterministic queue.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    opts: QuadOpts,
) -> Result<QuadResult, QuadError> {
    struct Seg {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }
    let (v0, e0) = qk15(&mut f, a, b)?;
    let mut segs = vec![Seg { a, b, value: v0, err: e0 }];
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= target {
            return Ok(QuadResult { value: total, error_estimate: err, intervals: segs.len() });
        }
        if segs.len() >= opts.max_intervals {
            return Err(QuadError::BudgetExhausted { intervals: segs.len(), error: err, target });
        }
        // deterministic worst-first: largest error, ties by left endpoint
        let mut worst = 0;
        for (i, s) in segs.iter().enumerate() {
            if s.err > segs[worst].err || (s.err == segs[worst].err && s.a < segs[worst].a) {
                worst = i;
            }
        }
        let Seg { a, b, .. } = segs.swap_remove(worst);
        let m = 0.5 * (a + b);
        let (v1, e1) = qk15(&mut f, a, m)?;
        let (v2, e2) = qk15(&mut f, m, b)?;
        segs.push(Seg { a, b: m, value: v1, err: e1 });
        segs.push(Seg { a: m, b, value: v2, err: e2 });
    }
}

/// ∫_0^∞ f(r) dr via r = tan(s), ds over (0, pi/2).
pub fn integrate_half_line(
    mut f: impl FnMut(f64) -> f64,
    opts: QuadOpts,
) -> Result<QuadResult, QuadError> {
    integrate(
        |s| {
            let t = s.tan();
            let sec2 = 1.0 + t * t;
            f(t) * sec2
        },
        0.0,
        PI / 2.0,
        opts,
    )
}

/// ∫_{-∞}^∞ f(x) dx via x = tan(s) over (-pi/2, pi/2).
pub fn integrate_line(
    mut f: impl FnMut(f64) -> f64,
    opts: QuadOpts,
) -> Result<QuadResult, QuadError> {
    integrate(
        |s| {
            let t = s.tan();
            let sec2 = 1.0 + t * t;
            f(t) * sec2
        },
        -PI / 2.0,
        PI / 2.0,
        opts,
    )
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function: exact for integer and half-integer arguments up to 60,
/// Lanczos approximation otherwise.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    let two_x = 2.0 * x;
    if x > 0.0 && two_x == two_x.floor() && two_x <= 120.0 {
        let half_steps = two_x as u64;
        if half_steps % 2 == 0 {
            let m = half_steps / 2;
            let mut acc = 1.0;
            for j in 2..m {
                acc *= j as f64;
            }
            return acc;
        } else {
            // Gamma(1/2 + m) = (2m)! sqrt(pi) / (4^m m!)
            let m = (half_steps - 1) / 2;
            let mut acc = PI.sqrt();
            for j in 0..m {
                acc *= j as f64 + 0.5;
            }
            return acc;
        }
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

/// Surface area of the unit sphere S^{n-1} in R^n.
pub fn unit_sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)
}

#[derive(Debug, Clone, Copy)]
pub struct BetaIntegral {
    pub quadrature: f64,
    pub gamma_form: f64,
    pub rel_gap: f64,
}

/// ∫_0^∞ (r/(1+r^2))^q r^{-1-alpha} dr against its Gamma closed form
/// Γ((q+α)/2) Γ((q-α)/2) / (2 Γ(q)).
pub fn beta_integral(q_exp: f64, alpha: f64) -> Result<BetaIntegral, QuadError> {
    if q_exp - alpha.abs() <= 0.0 {
        return Err(QuadError::DivergentParameters(format!(
            "q = {q_exp}, alpha = {alpha}: need q - |alpha| > 0"
        )));
    }
    let quad = integrate_half_line(
        |r| {
            if r == 0.0 {
                return 0.0;
            }
            (r / (1.0 + r * r)).powf(q_exp) * r.powf(-1.0 - alpha)
        },
        QuadOpts::default(),
    )?;
    let gamma_form = gamma((q_exp + alpha) / 2.0) * gamma((q_exp - alpha) / 2.0) / (2.0 * gamma(q_exp));
    let rel_gap = (quad.value - gamma_form).abs() / gamma_form.abs();
    Ok(BetaIntegral { quadrature: quad.value, gamma_form, rel_gap })
}

/// Radial profiles of the standard bubble and its dilation kernel.
pub fn bubble_u(n: usize, r2: f64) -> f64 {
    (2.0 / (1.0 + r2)).powf((n as f64 - 2.0) / 2.0)
}

/// U^{p-1} = (2/(1+r^2))^2 for every n.
pub fn bubble_u_pm1(r2: f64) -> f64 {
    let v = 2.0 / (1.0 + r2);
    v * v
}

/// Z_0 = (n-2)/2 U + ∇U·x as a radial profile.
pub fn bubble_z0(n: usize, r2: f64) -> f64 {
    let a = (n as f64 - 2.0) / 2.0;
    a * 2f64.powf(a) * (1.0 - r2) * (1.0 + r2).powf(-(n as f64) / 2.0)
}

/// dZ1/dx1 profile: Z_1 = z1_radial(r^2) * x_1.
pub fn bubble_z1_radial(n: usize, r2: f64) -> f64 {
    -(n as f64 - 2.0) * 2f64.powf((n as f64 - 2.0) / 2.0) * (1.0 + r2).powf(-(n as f64) / 2.0)
}

#[derive(Debug, Clone)]
pub struct BubbleMoments {
    pub n: usize,
    /// Radial integrals ∫_0^∞ r^{n-1} (1+r^2)^{-(n+2)} dr and with an extra r^2.
    pub i1_radial: f64,
    pub i2_radial: f64,
    /// The paper's printed Gamma expressions (they equal the radial integrals).
    pub i1_gamma: f64,
    pub i2_gamma: f64,
    /// Full n-space values (radial times sphere area).
    pub i1_full: f64,
    pub i2_full: f64,
    /// Normalization-free ratio i2/i1 = (n/2)/((n/2)+1).
    pub ratio: f64,
}

/// The moment integrals ∫ (1+|x|^2)^{-(n+2)} and ∫ |x|^2 (1+|x|^2)^{-(n+2)}
/// by radial quadrature, cross-checked against the printed Gamma values.
pub fn bubble_moments(n: usize) -> Result<BubbleMoments, QuadError> {
    if n < 3 {
        return Err(QuadError::DivergentParameters(format!("n = {n} < 3")));
    }
    let nf = n as f64;
    let i1 = integrate_half_line(
        |r| r.powf(nf - 1.0) * (1.0 + r * r).powf(-(nf + 2.0)),
        QuadOpts::default(),
    )?
    .value;
    let i2 = integrate_half_line(
        |r| r.powf(nf + 1.0) * (1.0 + r * r).powf(-(nf + 2.0)),
        QuadOpts::default(),
    )?
    .value;
    let h = nf / 2.0;
    let i1_gamma = h * (h + 1.0) * gamma(h).powi(2) / (2.0 * gamma(nf + 2.0));
    let i2_gamma = h * h * gamma(h).powi(2) / (2.0 * gamma(nf + 2.0));
    let area = unit_sphere_area(n);
    Ok(BubbleMoments {
        n,
        i1_radial: i1,
        i2_radial: i2,
        i1_gamma,
        i2_gamma,
        i1_full: i1 * area,
        i2_full: i2 * area,
        ratio: i2 / i1,
    })
}

#[derive(Debug, Clone)]
pub struct ZMassReport {
    pub n: usize,
    /// Quadrature values of ∫ U^{p-1} Z_0^2 and ∫ U^{p-1} Z_1^2 over R^n.
    pub z0_mass: f64,
    pub z1_mass: f64,
    /// Closed form 2^{n-2} n (n-2)^2 pi^{n/2} Γ(n/2)/Γ(n+2) (full n-space value).
    pub closed_form: f64,
    /// The printed constant 2^{(n-4)/2} n (n-2)^2 Γ(n/2)^2/Γ(n+2); the full-space
    /// value equals this times (2 pi)^{n/2}/Γ(n/2).
    pub printed_constant: f64,
    pub normalization: f64,
    /// Quadrature value re-expressed in the printed constant's units.
    pub z0_mass_printed_units: f64,
    /// Both sides of ∫ U^{p-1} Z_0 = (n-2)/2 ∫ y_1 U^{p-1} Z_1.
    pub linear_lhs: f64,
    pub linear_rhs: f64,
    pub equality_gap: f64,
    pub linear_gap: f64,
}

/// Quadratic and linear Z-mass identities by radial quadrature.
pub fn z_mass_identities(n: usize) -> Result<ZMassReport, QuadError> {
    if n < 4 {
        return Err(QuadError::DivergentParameters(format!("n = {n} < 4")));
    }
    let nf = n as f64;
    let area = unit_sphere_area(n);
    let opts = QuadOpts::default();

    let z0_mass = area
        * integrate_half_line(
            |r| {
                let r2 = r * r;
                bubble_u_pm1(r2) * bubble_z0(n, r2).powi(2) * r.powf(nf - 1.0)
            },
            opts,
        )?
        .value;
    // ∫ x_1^2 F(|x|) dx = (1/n) * area * ∫ r^{n+1} F dr
    let z1_mass = area / nf
        * integrate_half_line(
            |r| {
                let r2 = r * r;
                bubble_u_pm1(r2) * bubble_z1_radial(n, r2).powi(2) * r2 * r.powf(nf - 1.0)
            },
            opts,
        )?
        .value;

    let closed_form = 2f64.powi(n as i32 - 2) * nf * (nf - 2.0).powi(2) * PI.powf(nf / 2.0)
        * gamma(nf / 2.0)
        / gamma(nf + 2.0);
    let printed_constant =
        2f64.powf((nf - 4.0) / 2.0) * nf * (nf - 2.0).powi(2) * gamma(nf / 2.0).powi(2) / gamma(nf + 2.0);
    let normalization = (2.0 * PI).powf(nf / 2.0) / gamma(nf / 2.0);

    let linear_lhs = area
        * integrate_half_line(
            |r| {
                let r2 = r * r;
                bubble_u_pm1(r2) * bubble_z0(n, r2) * r.powf(nf - 1.0)
            },
            opts,
        )?
        .value;
    let y1_u_z1 = area / nf
        * integrate_half_line(
            |r| {
                let r2 = r * r;
                bubble_u_pm1(r2) * bubble_z1_radial(n, r2) * r2 * r.powf(nf - 1.0)
            },
            opts,
        )?
        .value;
    let linear_rhs = (nf - 2.0) / 2.0 * y1_u_z1;

    Ok(ZMassReport {
        n,
        z0_mass,
        z1_mass,
        closed_form,
        printed_constant,
        normalization,
        z0_mass_printed_units: z0_mass / normalization,
        linear_lhs,
        linear_rhs,
        equality_gap: (z0_mass - z1_mass).abs() / z0_mass.abs(),
        linear_gap: (linear_lhs - linear_rhs).abs() / linear_rhs.abs(),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct KelvinLemmaResult {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
    /// Maximum relative violation of the weight identity among the sample points.
    pub weight_check: f64,
}

/// Both sides of the dilation/translation identity
/// mu ∫ d/dmu(U_mu(x - xi)) h = xi · ∫ ∇U_mu(x - xi) h
/// for xi = xi1 * e_1 and h axially symmetric about e_1 with the Kelvin weight
/// h(y) = |y|^{-n-2} h(y/|y|^2). Reduced to a 2D (x_1, rho) integral.
pub fn kelvin_lemma_check(
    n: usize,
    mu: f64,
    xi1: f64,
    h: impl Fn(&[f64]) -> f64,
    rel_tol: f64,
) -> Result<KelvinLemmaResult, QuadError> {
    let nf = n as f64;
    // weight precondition at a deterministic sample set
    let mut worst: f64 = 0.0;
    for idx in 0..24 {
        let t = 0.15 + 0.11 * idx as f64;
        let mut y = vec![0.0; n];
        y[0] = t * (0.3 + 0.05 * idx as f64).cos();
        y[1] = t * (0.3 + 0.05 * idx as f64).sin();
        if n > 2 {
            y[2] = 0.2 * t;
        }
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let inv: Vec<f64> = y.iter().map(|v| v / r2).collect();
        let lhs = h(&y);
        let rhs = r2.powf(-(nf + 2.0) / 2.0) * h(&inv);
        if lhs != 0.0 {
            worst = worst.max((lhs - rhs).abs() / lhs.abs());
        }
    }
    if worst > 1e-9 {
        return Err(QuadError::WeightPrecondition(worst));
    }

    let area = unit_sphere_area(n - 1);
    let opts = QuadOpts { abs_tol: 1e-13, rel_tol: rel_tol.min(1e-9), max_intervals: 600 };
    let inner_opts = QuadOpts { abs_tol: 1e-14, rel_tol: opts.rel_tol * 0.1, max_intervals: 600 };

    let eval_h = |x1: f64, rho: f64| {
        let mut x = vec![0.0; n];
        x[0] = x1;
        x[1] = rho;
        h(&x)
    };
    // d/dmu U_mu(z) = -mu^{-n/2} Z_0(z/mu); grad U_mu(z)·e1 = mu^{-n/2} (dU)(z/mu)
    let lhs_integrand = |x1: f64, rho: f64| {
        let z1 = (x1 - xi1) / mu;
        let zr2 = z1 * z1 + (rho / mu) * (rho / mu);
        -mu.powf(1.0 - nf / 2.0) * bubble_z0(n, zr2) * eval_h(x1, rho) * rho.powf(nf - 2.0) * area
    };
    let rhs_integrand = |x1: f64, rho: f64| {
        let z1 = (x1 - xi1) / mu;
        let zr2 = z1 * z1 + (rho / mu) * (rho / mu);
        xi1 * mu.powf(-nf / 2.0)
            * (bubble_z1_radial(n, zr2) * z1)
            * eval_h(x1, rho)
            * rho.powf(nf - 2.0)
            * area
    };

    let lhs = integrate_line(
        |x1| {
            integrate_half_line(|rho| lhs_integrand(x1, rho), inner_opts)
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        },
        opts,
    )?;
    let rhs = integrate_line(
        |x1| {
            integrate_half_line(|rho| rhs_integrand(x1, rho), inner_opts)
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
        },
        opts,
    )?;
    let rel_gap = (lhs.value - rhs.value).abs() / rhs.value.abs().max(f64::MIN_POSITIVE);
    Ok(KelvinLemmaResult { lhs: lhs.value, rhs: rhs.value, rel_gap, weight_check: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gamma_values() {
        assert_abs_diff_eq!(gamma(1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(gamma(0.5), PI.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(gamma(6.0), 120.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gamma(2.5) / (1.5 * 0.5 * PI.sqrt()), 1.0, epsilon = 1e-14);
        // Lanczos path
        assert_abs_diff_eq!(gamma(4.7) / (3.7 * 2.7 * 1.7 * 0.7 * gamma(0.7)), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn basic_integrals() {
        let r = integrate(|x| x * x, 0.0, 1.0, QuadOpts::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / 3.0, epsilon = 1e-14);
        let r = integrate_half_line(|x| (-x).exp(), QuadOpts::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn budget_failure_is_explicit() {
        let res = integrate(
            |x: f64| (1.0 / (x + 1e-14)).sin() / (x + 1e-7).sqrt(),
            0.0,
            1.0,
            QuadOpts { abs_tol: 1e-14, rel_tol: 1e-14, max_intervals: 8 },
        );
        assert!(matches!(res, Err(QuadError::BudgetExhausted { .. })));
    }

    #[test]
    fn beta_integral_examples() {
        // q = 2, alpha = 0 -> Gamma(1)^2/(2 Gamma(2)) = 1/2
        let b = beta_integral(2.0, 0.0).unwrap();
        assert_abs_diff_eq!(b.gamma_form, 0.5, epsilon = 1e-15);
        assert!(b.rel_gap < 1e-10, "{b:?}");
        // symmetry in alpha
        let b1 = beta_integral(6.0, 1.5).unwrap();
        let b2 = beta_integral(6.0, -1.5).unwrap();
        assert_abs_diff_eq!(b1.gamma_form, b2.gamma_form, epsilon = 1e-14);
        assert!(b1.rel_gap < 1e-10 && b2.rel_gap < 1e-10);
        // divergent parameters rejected
        assert!(beta_integral(1.0, 1.5).is_err());
    }

    #[test]
    fn moment_ratio_normalization_free() {
        for n in [4usize, 5, 7] {
            let m = bubble_moments(n).unwrap();
            let h = n as f64 / 2.0;
            assert_abs_diff_eq!(m.ratio, h / (h + 1.0), epsilon = 1e-10);
            // the printed Gamma displays are exactly the radial integrals
            assert!((m.i1_radial - m.i1_gamma).abs() / m.i1_gamma < 1e-10, "{m:?}");
            assert!((m.i2_radial - m.i2_gamma).abs() / m.i2_gamma < 1e-10);
            assert!(m.i1_full > 0.0 && m.i2_full > 0.0);
        }
    }

    #[test]
    fn z_mass_identities_n4() {
        let z = z_mass_identities(4).unwrap();
        // equality of the two quadratic masses
        assert!(z.equality_gap < 1e-10, "{z:?}");
        // full-space closed form: 8 pi^2/15 at n = 4
        assert_abs_diff_eq!(z.closed_form, 8.0 * PI * PI / 15.0, epsilon = 1e-10);
        assert!((z.z0_mass - z.closed_form).abs() / z.closed_form < 1e-8);
        // printed-units value is 2/15
        assert_abs_diff_eq!(z.printed_constant, 2.0 / 15.0, epsilon = 1e-15);
        assert!((z.z0_mass_printed_units - 2.0 / 15.0).abs() / (2.0 / 15.0) < 1e-8);
        // linear identity, both sides
        assert!(z.linear_gap < 1e-10, "{z:?}");
        assert_abs_diff_eq!(z.linear_lhs, -4.0 * PI * PI / 3.0, epsilon = 1e-8);
    }

    #[test]
    fn symmetry_reduction_cross_check() {
        // ∫ x1^2 F dx computed via the 2D (x1, rho) reduction equals
        // (1/n) ∫ r^2 F dx computed radially, F = (1+r^2)^{-(n+2)}
        let n = 4usize;
        let nf = n as f64;
        let radial = unit_sphere_area(n) / nf
            * integrate_half_line(
                |r| r.powf(nf + 1.0) * (1.0 + r * r).powf(-(nf + 2.0)),
                QuadOpts::default(),
            )
            .unwrap()
            .value;
        let area_perp = unit_sphere_area(n - 1);
        let opts = QuadOpts { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 2000 };
        let planar = integrate_line(
            |x1| {
                integrate_half_line(
                    |rho| {
                        let r2 = x1 * x1 + rho * rho;
                        x1 * x1 * (1.0 + r2).powf(-(nf + 2.0)) * rho.powf(nf - 2.0) * area_perp
                    },
                    QuadOpts { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 2000 },
                )
                .map(|r| r.value)
                .unwrap_or(f64::NAN)
            },
            opts,
        )
        .unwrap()
        .value;
        assert!((radial - planar).abs() / radial < 1e-10, "{radial} vs {planar}");
    }

    #[test]
    fn kelvin_lemma_balanced_and_scaling() {
        let n = 4;
        let mu = 0.1f64;
        let xi1 = (1.0 - mu * mu).sqrt();
        let p = (n as f64 + 2.0) / (n as f64 - 2.0);
        let h = |x: &[f64]| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            bubble_u(n, r2).powf(p)
        };
        let res = kelvin_lemma_check(n, mu, xi1, h, 1e-8).unwrap();
        assert!(res.rel_gap < 1e-6, "{res:?}");

        // linearity: h -> 2h doubles both sides
        let res2 = kelvin_lemma_check(n, mu, xi1, |x: &[f64]| 2.0 * h(x), 1e-8).unwrap();
        assert_abs_diff_eq!(res2.lhs / res.lhs, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(res2.rhs / res.rhs, 2.0, epsilon = 1e-9);

        // xi = 0: both sides vanish (RHS identically, LHS by symmetry)
        let res0 = kelvin_lemma_check(n, mu, 0.0, h, 1e-8).unwrap();
        assert!(res0.rhs.abs() < 1e-12);
        assert!(res0.lhs.abs() < 1e-8, "{res0:?}");

        // a weight-violating h is rejected
        let bad = |x: &[f64]| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            (-r2).exp()
        };
        assert!(matches!(
            kelvin_lemma_check(n, mu, xi1, bad, 1e-8),
            Err(QuadError::WeightPrecondition(_))
        ));
    }

    #[test]
    fn budget_doubling_stability() {
        // Richardson-style stability: doubling max_intervals changes results
        // by <= 1e-8 relative once converged
        let f = |r: f64| r.powf(3.0) * (1.0 + r * r).powf(-6.0);
        let a = integrate_half_line(f, QuadOpts { max_intervals: 200, ..Default::default() })
            .unwrap()
            .value;
        let b = integrate_half_line(f, QuadOpts { max_intervals: 400, ..Default::default() })
            .unwrap()
            .value;
        assert!((a - b).abs() / a.abs() < 1e-8);
    }
}
