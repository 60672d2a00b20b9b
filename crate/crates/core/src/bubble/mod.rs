//! The bubble-tower approximate solution U_* = U - Σ U_j on a ring of k bubbles,
//! its symmetries (rotation, evenness, Kelvin), the analytically-computed error
//! field E = ΔU_* + f(U_*), the kernel fields z_0..z_{3n-1}, weighted norms, and
//! the Taylor-expansion order checks.

pub mod cubature;

use crate::interaction::{mu_solve, InteractionError};
use crate::oracle::fit_loglog_slope;
use crate::quad::{self, QuadError, QuadOpts};
use cubature::{adaptive_boxes, clean_breaks, grid_boxes, CubatureBudget};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BubbleError {
    #[error(transparent)]
    Interaction(#[from] InteractionError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("point has {0} coordinates; ensemble dimension is {1}")]
    DimensionMismatch(usize, usize),
    #[error("integrability exponent q = {q} outside (n/2, n) for n = {n}")]
    BadExponent { q: f64, n: usize },
    #[error("field is not axially symmetric; the reduced quadrature does not apply")]
    NotAxial,
    #[error("kernel field index {0} out of range 0..{1}")]
    FieldIndex(usize, usize),
    #[error("bubble index {0} out of range 1..={1}")]
    BubbleIndex(usize, usize),
    #[error("sample point outside the expansion validity region: |y| = {0:.3} > {1:.3}")]
    OutsideValidity(f64, f64),
}

/// Ring of k bubbles of scale mu at radius sqrt(1 - mu^2); mu^2 + |xi_l|^2 = 1
/// makes each satellite bubble Kelvin-invariant on its own.
#[derive(Debug, Clone)]
pub struct BubbleEnsemble {
    n: usize,
    k: usize,
    mu: f64,
    p: f64,
    gamma: f64,
    /// centers[l-1] = sqrt(1-mu^2) (cos theta_l, sin theta_l, 0, ...).
    centers: Vec<Vec<f64>>,
}

impl BubbleEnsemble {
    /// Balanced ensemble: mu from the leading-order force balance.
    pub fn new(n: usize, k: usize) -> Result<Self, BubbleError> {
        let mu = mu_solve(n, k)?;
        Self::with_mu(n, k, mu)
    }

    /// Ensemble with an explicit scale (used by expansion order checks).
    pub fn with_mu(n: usize, k: usize, mu: f64) -> Result<Self, BubbleError> {
        if !(4..=48).contains(&n) {
            return Err(BubbleError::Interaction(InteractionError::InvalidDimension(n)));
        }
        if k < 2 {
            return Err(BubbleError::Interaction(InteractionError::TooFewBubbles(k)));
        }
        let nf = n as f64;
        let radius = (1.0 - mu * mu).sqrt();
        let centers = (1..=k)
            .map(|l| {
                let th = 2.0 * PI * (l - 1) as f64 / k as f64;
                let mut c = vec![0.0; n];
                c[0] = radius * th.cos();
                c[1] = radius * th.sin();
                c
            })
            .collect();
        Ok(BubbleEnsemble {
            n,
            k,
            mu,
            p: (nf + 2.0) / (nf - 2.0),
            gamma: nf * (nf - 2.0) / 4.0,
            centers,
        })
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
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn center(&self, l: usize) -> &[f64] {
        &self.centers[l - 1]
    }
    pub fn theta(&self, l: usize) -> f64 {
        2.0 * PI * (l - 1) as f64 / self.k as f64
    }

    fn check_point(&self, x: &[f64]) -> Result<(), BubbleError> {
        if x.len() != self.n {
            return Err(BubbleError::DimensionMismatch(x.len(), self.n));
        }
        Ok(())
    }

    /// Standard bubble U(x) = (2/(1+|x|^2))^{(n-2)/2} and gradient.
    pub fn u_eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let u = (2.0 / (1.0 + r2)).powf((self.n as f64 - 2.0) / 2.0);
        let gscale = -(self.n as f64 - 2.0) * u / (1.0 + r2);
        (u, x.iter().map(|&v| gscale * v).collect())
    }

    /// Satellite bubble U_l and gradient.
    pub fn uj_eval(&self, l: usize, x: &[f64]) -> Result<(f64, Vec<f64>), BubbleError> {
        self.check_bubble(l)?;
        let y: Vec<f64> = x
            .iter()
            .zip(self.center(l))
            .map(|(a, b)| (a - b) / self.mu)
            .collect();
        let (u, g) = self.u_eval(&y);
        let a = (self.n as f64 - 2.0) / 2.0;
        let vs = self.mu.powf(-a);
        Ok((vs * u, g.iter().map(|&v| vs * v / self.mu).collect()))
    }

    fn check_bubble(&self, l: usize) -> Result<(), BubbleError> {
        if !(1..=self.k).contains(&l) {
            return Err(BubbleError::BubbleIndex(l, self.k));
        }
        Ok(())
    }

    /// U_*(x) = U(x) - Σ U_l(x).
    pub fn ustar(&self, x: &[f64]) -> Result<f64, BubbleError> {
        self.check_point(x)?;
        let (mut v, _) = self.u_eval(x);
        for l in 1..=self.k {
            v -= self.uj_eval(l, x)?.0;
        }
        Ok(v)
    }

    pub fn ustar_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>), BubbleError> {
        self.check_point(x)?;
        let (mut v, mut g) = self.u_eval(x);
        for l in 1..=self.k {
            let (vl, gl) = self.uj_eval(l, x)?;
            v -= vl;
            for (a, b) in g.iter_mut().zip(gl) {
                *a -= b;
            }
        }
        Ok((v, g))
    }

    /// E = ΔU_* + f(U_*) computed analytically:
    /// gamma (sign(U_*) |U_*|^p - U^p + Σ U_l^p) since ΔU = -gamma U^p exactly.
    pub fn error(&self, x: &[f64]) -> Result<f64, BubbleError> {
        self.check_point(x)?;
        let us = self.ustar(x)?;
        let mut acc = us.signum() * us.abs().powf(self.p);
        acc -= self.u_eval(x).0.powf(self.p);
        for l in 1..=self.k {
            acc += self.uj_eval(l, x)?.0.powf(self.p);
        }
        Ok(self.gamma * acc)
    }

    /// Relative Kelvin deviation |U_*(x) - |x|^{2-n} U_*(x/|x|^2)| / |U_*(x)|.
    pub fn kelvin_deviation(&self, x: &[f64]) -> Result<f64, BubbleError> {
        self.check_point(x)?;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let inv: Vec<f64> = x.iter().map(|&v| v / r2).collect();
        let lhs = self.ustar(x)?;
        let rhs = r2.powf((2.0 - self.n as f64) / 2.0) * self.ustar(&inv)?;
        Ok((lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE))
    }

    /// Kelvin covariance gap of the error field:
    /// |E(x) - |x|^{-n-2} E(x/|x|^2)| / |E(x)|.
    pub fn error_kelvin_deviation(&self, x: &[f64]) -> Result<f64, BubbleError> {
        self.check_point(x)?;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let inv: Vec<f64> = x.iter().map(|&v| v / r2).collect();
        let lhs = self.error(x)?;
        let rhs = r2.powf(-(self.n as f64 + 2.0) / 2.0) * self.error(&inv)?;
        Ok((lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE))
    }

    /// Kernel field z_idx built from U_* (the correction phi-tilde is omitted, so
    /// these are the leading-order fields; idx in 0..3n).
    pub fn kernel_field(&self, idx: usize, x: &[f64]) -> Result<f64, BubbleError> {
        self.check_point(x)?;
        let n = self.n;
        if idx >= 3 * n {
            return Err(BubbleError::FieldIndex(idx, 3 * n));
        }
        let (w, g) = self.ustar_grad(x)?;
        let z0 = (n as f64 - 2.0) / 2.0 * w + g.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let val = match idx {
            0 => z0,
            a if a <= n => g[a - 1],
            a if a == n + 1 => -x[1] * g[0] + x[0] * g[1],
            a if a == n + 2 => -2.0 * x[0] * z0 + r2 * g[0],
            a if a == n + 3 => -2.0 * x[1] * z0 + r2 * g[1],
            a if a <= 2 * n + 1 => {
                // rotations in the (x1, xl) planes, l = 3..n -> idx = n+l+1
                let l = a - n - 1;
                -x[l - 1] * g[0] + x[0] * g[l - 1]
            }
            a => {
                // rotations in the (x2, xl) planes, l = 3..n -> idx = 2n+l-1
                let l = a - 2 * n + 1;
                -x[l - 1] * g[1] + x[1] * g[l - 1]
            }
        };
        Ok(val)
    }

    /// Per-bubble kernel fields: Z_alpha of the base bubble (l = 0) or of
    /// satellite l >= 1. alpha = 0 is the dilation field; for satellites
    /// alpha = 1, 2 are the radial/tangential combinations and alpha >= 3 the
    /// plain derivatives.
    pub fn z_field(&self, alpha: usize, l: usize, x: &[f64]) -> Result<f64, BubbleError> {
        self.check_point(x)?;
        if alpha > self.n {
            return Err(BubbleError::FieldIndex(alpha, self.n + 1));
        }
        if l == 0 {
            let (u, g) = self.u_eval(x);
            return Ok(match alpha {
                0 => {
                    (self.n as f64 - 2.0) / 2.0 * u
                        + g.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
                }
                a => g[a - 1],
            });
        }
        self.check_bubble(l)?;
        let (u, g) = self.uj_eval(l, x)?;
        let th = self.theta(l);
        let rad = (1.0 - self.mu * self.mu).sqrt();
        Ok(match alpha {
            0 => {
                let shift: f64 = g
                    .iter()
                    .zip(x.iter().zip(self.center(l)))
                    .map(|(gi, (xi, ci))| gi * (xi - ci))
                    .sum();
                (self.n as f64 - 2.0) / 2.0 * u + shift
            }
            1 => rad * (th.cos() * g[0] + th.sin() * g[1]),
            2 => rad * (-th.sin() * g[0] + th.cos() * g[1]),
            a => g[a - 1],
        })
    }

    /// L_U(phi) = Δphi + p gamma U^{p-1} phi potential term for the base bubble.
    pub fn linearized_potential(&self, x: &[f64]) -> f64 {
        let (u, _) = self.u_eval(x);
        self.p * self.gamma * u.powf(self.p - 1.0)
    }
}

/// A scalar field with the symmetry metadata the reduced quadrature relies on.
pub trait ScalarField {
    fn dims(&self) -> usize;
    /// Order of rotational symmetry in the (x1, x2) plane (1 = none).
    fn sym_order(&self) -> usize;
    /// Invariance under rotations of (x3..xn).
    fn axial(&self) -> bool;
    fn value(&self, x: &[f64]) -> f64;
}

/// The error field E as a ScalarField.
pub struct ErrorField<'a>(pub &'a BubbleEnsemble);

impl ScalarField for ErrorField<'_> {
    fn dims(&self) -> usize {
        self.0.n()
    }
    fn sym_order(&self) -> usize {
        self.0.k()
    }
    fn axial(&self) -> bool {
        true
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.0.error(x).unwrap_or(f64::NAN)
    }
}

pub struct UStarField<'a>(pub &'a BubbleEnsemble);

impl ScalarField for UStarField<'_> {
    fn dims(&self) -> usize {
        self.0.n()
    }
    fn sym_order(&self) -> usize {
        self.0.k()
    }
    fn axial(&self) -> bool {
        true
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.0.ustar(x).unwrap_or(f64::NAN)
    }
}

/// The identically-zero field (trivial norm case).
pub struct ZeroField(pub usize);

impl ScalarField for ZeroField {
    fn dims(&self) -> usize {
        self.0
    }
    fn sym_order(&self) -> usize {
        1
    }
    fn axial(&self) -> bool {
        true
    }
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormFlavor {
    /// L^q with weight (1+|y|)^{n+2-2n/q}.
    StarStar,
    /// sup of (1+|y|^{n-2}) |phi| over the sample set.
    NMinus2,
}

#[derive(Debug, Clone, Copy)]
pub struct WeightedNormSpec {
    pub q: f64,
    pub flavor: NormFlavor,
}

impl WeightedNormSpec {
    pub fn star_star(q: f64) -> Self {
        WeightedNormSpec { q, flavor: NormFlavor::StarStar }
    }
    pub fn n_minus_2() -> Self {
        WeightedNormSpec { q: f64::NAN, flavor: NormFlavor::NMinus2 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NormBudget {
    pub cubature: CubatureBudget,
    /// Radius of the near region; the far field uses the decay-based tail.
    pub r_cut: f64,
}

impl Default for NormBudget {
    fn default() -> Self {
        NormBudget { cubature: CubatureBudget::default(), r_cut: 4.0 }
    }
}

/// Weighted norm of an axially symmetric field. The star-star flavor reduces
/// the n-dimensional integral to (x1, x2, rho), integrates one symmetry sector
/// of the near field adaptively (zones split around the bubble ring), and adds
/// an analytic far-field tail from the field's (1+|y|)^{-(n+2)} decay class.
pub fn weighted_norm(
    ens: &BubbleEnsemble,
    field: &dyn ScalarField,
    spec: WeightedNormSpec,
    budget: NormBudget,
) -> Result<f64, BubbleError> {
    match spec.flavor {
        NormFlavor::StarStar => star_star_norm(ens, field, spec.q, budget),
        NormFlavor::NMinus2 => Ok(n_minus_2_norm(ens, field)),
    }
}

fn star_star_norm(
    ens: &BubbleEnsemble,
    field: &dyn ScalarField,
    q: f64,
    budget: NormBudget,
) -> Result<f64, BubbleError> {
    let n = ens.n();
    let nf = n as f64;
    if !(q > nf / 2.0 && q < nf) {
        return Err(BubbleError::BadExponent { q, n });
    }
    if !field.axial() {
        return Err(BubbleError::NotAxial);
    }
    let sym = field.sym_order().max(1);
    let r = budget.r_cut;
    let w_exp = nf + 2.0 - 2.0 * nf / q;
    let area_perp = quad::unit_sphere_area(n - 2);

    let mut point = vec![0.0; n];
    let mut integrand = |s: f64, phi_hat: f64, rho: f64| {
        let phi = phi_hat * PI / sym as f64;
        point[0] = s * phi.cos();
        point[1] = s * phi.sin();
        point[2] = rho;
        for v in point.iter_mut().skip(3) {
            *v = 0.0;
        }
        let val = field.value(&point);
        let rr = (s * s + rho * rho).sqrt();
        let wt = (1.0 + rr).powf(w_exp);
        (wt * val.abs()).powf(q) * s * rho.powf(nf - 3.0)
    };

    // zone breakpoints around the bubble ring
    let s0 = (1.0 - ens.mu() * ens.mu()).sqrt();
    let delta = (3.0 * ens.mu()).max(0.02);
    let s_breaks = clean_breaks(
        vec![0.4 * s0, s0 - 2.0 * delta, s0, s0 + 2.0 * delta, s0 + 0.6],
        0.0,
        r,
    );
    let rho_breaks = clean_breaks(vec![delta, 0.5], 0.0, r);
    let dphi = (2.0 * delta * sym as f64 / (PI * s0)).min(0.9);
    let phi_breaks = clean_breaks(vec![-dphi, 0.0, dphi], -1.0, 1.0);
    let boxes = grid_boxes(&s_breaks, &phi_breaks, &rho_breaks);

    let (near, _err) = adaptive_boxes(&mut integrand, &boxes, budget.cubature)?;
    // sector width in phi is pi/sym each side; factor sym restores the circle,
    // and the phi_hat normalization contributes pi/sym
    let near_total = near * area_perp * (PI / sym as f64) * sym as f64;

    // far field: |field| <= c (1+r)^{-(n+2)} estimated on the shell
    let mut c_est: f64 = 0.0;
    for a in 0..12 {
        let ang = PI * a as f64 / 12.0 / sym as f64;
        for t in [0.0f64, 0.4, 0.8] {
            let rho = r * t;
            let s = (r * r - rho * rho).sqrt();
            point[0] = s * ang.cos();
            point[1] = s * ang.sin();
            point[2] = rho;
            for v in point.iter_mut().skip(3) {
                *v = 0.0;
            }
            c_est = c_est.max(field.value(&point).abs() * (1.0 + r).powf(nf + 2.0));
        }
    }
    let tail_radial = quad::integrate_half_line(
        |t| {
            let rr = r + t;
            ((1.0 + rr).powf(w_exp) * c_est * (1.0 + rr).powf(-(nf + 2.0))).powf(q)
                * rr.powf(nf - 1.0)
        },
        QuadOpts { abs_tol: 1e-300, rel_tol: 1e-9, max_intervals: 2000 },
    )?;
    let tail = tail_radial.value * quad::unit_sphere_area(n);

    Ok((near_total + tail).powf(1.0 / q))
}

fn n_minus_2_norm(ens: &BubbleEnsemble, field: &dyn ScalarField) -> f64 {
    let n = ens.n();
    let nf = n as f64;
    let sym = field.sym_order().max(1);
    let mut best: f64 = 0.0;
    let mut point = vec![0.0; n];
    let consider = |point: &[f64]| -> f64 {
        let r: f64 = point.iter().map(|v| v * v).sum::<f64>().sqrt();
        (1.0 + r.powf(nf - 2.0)) * field.value(point).abs()
    };
    // log-radial x angular sweep plus a refined ring near the bubble cores
    for ir in 0..60 {
        let r = 1e-3 * (100.0_f64 / 1e-3).powf(ir as f64 / 59.0);
        for ia in 0..=12 {
            let phi = PI * ia as f64 / 12.0 / sym as f64;
            for (c1, c2) in [(1.0, 0.0), (0.8, 0.6)] {
                point[0] = r * phi.cos() * c1;
                point[1] = r * phi.sin() * c1;
                point[2] = r * c2;
                for v in point.iter_mut().skip(3) {
                    *v = 0.0;
                }
                best = best.max(consider(&point));
            }
        }
    }
    let s0 = (1.0 - ens.mu() * ens.mu()).sqrt();
    for ir in 0..40 {
        let d = ens.mu() * (ir as f64 - 20.0) / 4.0;
        for ia in 0..8 {
            let phi = PI * ia as f64 / 8.0 / sym as f64;
            point[0] = (s0 + d) * phi.cos();
            point[1] = (s0 + d) * phi.sin();
            point[2] = ens.mu() * 0.3;
            for v in point.iter_mut().skip(3) {
                *v = 0.0;
            }
            best = best.max(consider(&point));
        }
    }
    best
}

/// Overlap integral ∫ |U_*|^{p-1} Z_{alpha,l} Z_{0,j} dx for alpha in {0, 1, 2},
/// reduced to (x1, x2, rho).
pub fn overlap_integral(
    ens: &BubbleEnsemble,
    alpha: usize,
    l: usize,
    j: usize,
    budget: CubatureBudget,
) -> Result<f64, BubbleError> {
    if alpha > 2 {
        return Err(BubbleError::FieldIndex(alpha, 3));
    }
    let n = ens.n();
    let nf = n as f64;
    let area_perp = quad::unit_sphere_area(n - 2);
    let r = 4.0;
    let mut point = vec![0.0; n];
    let mut integrand = |s: f64, phi: f64, rho: f64| {
        point[0] = s * phi.cos();
        point[1] = s * phi.sin();
        point[2] = rho;
        for v in point.iter_mut().skip(3) {
            *v = 0.0;
        }
        let us = ens.ustar(&point).unwrap_or(f64::NAN);
        let za = ens.z_field(alpha, l, &point).unwrap_or(f64::NAN);
        let z0 = ens.z_field(0, j, &point).unwrap_or(f64::NAN);
        us.abs().powf(ens.p() - 1.0) * za * z0 * s * rho.powf(nf - 3.0)
    };
    // split the angular range at every bubble and refine radially near the ring
    let s0 = (1.0 - ens.mu() * ens.mu()).sqrt();
    let delta = (3.0 * ens.mu()).max(0.01);
    let s_breaks =
        clean_breaks(vec![0.4, s0 - 2.0 * delta, s0, s0 + 2.0 * delta, 1.6], 0.0, r);
    let rho_breaks = clean_breaks(vec![delta, 0.5], 0.0, r);
    let mut phis: Vec<f64> = (0..ens.k()).map(|i| ens.theta(i + 1)).collect();
    let dphi = delta / s0;
    for i in 0..ens.k() {
        let th = ens.theta(i + 1);
        phis.push(th - dphi);
        phis.push(th + dphi);
    }
    let phi_breaks = clean_breaks(phis, 0.0, 2.0 * PI);
    let boxes = grid_boxes(&s_breaks, &phi_breaks, &rho_breaks);
    let (value, _err) = adaptive_boxes(&mut integrand, &boxes, budget)?;
    Ok(value * area_perp)
}

#[derive(Debug, Clone)]
pub struct TaylorOrderReport {
    pub man1_slope: f64,
    pub man2_slope: f64,
    pub man3_slope: f64,
    /// (mu, relative remainder) ladders behind each fit.
    pub man1_points: Vec<(f64, f64)>,
    pub man2_points: Vec<(f64, f64)>,
    pub man3_points: Vec<(f64, f64)>,
}

/// Fits the remainder order in mu of the three expansions around the bubble
/// ring against exact evaluation. The geometry (n, k, theta_l) is held fixed;
/// mu shrinks over a dyadic ladder inside the validity region |y| <= eta/(mu k).
pub fn taylor_order_check(
    n: usize,
    k: usize,
    eta: f64,
    y: &[f64],
) -> Result<TaylorOrderReport, BubbleError> {
    let nf = n as f64;
    let a = (nf - 2.0) / 2.0;
    let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mu_max = 0.9 * eta / (k as f64 * ynorm);
    if mu_max <= 0.0 || !mu_max.is_finite() {
        return Err(BubbleError::OutsideValidity(ynorm, eta));
    }
    let mus: Vec<f64> = (0..5).map(|j| mu_max * 0.5f64.powi(j)).collect();
    let l = 2usize; // nearest satellite

    let mut man1_points = Vec::new();
    let mut man2_points = Vec::new();
    let mut man3_points = Vec::new();
    for &mu in &mus {
        let ens = BubbleEnsemble::with_mu(n, k, mu)?;
        let xi1 = ens.center(1).to_vec();
        let xil = ens.center(l).to_vec();
        let y_full: Vec<f64> = (0..n).map(|i| y.get(i).copied().unwrap_or(0.0)).collect();
        if ynorm > eta / (mu * k as f64) {
            return Err(BubbleError::OutsideValidity(ynorm, eta / (mu * k as f64)));
        }

        // man1: U(xi1 + mu y) vs (2/(1+|xi1|^2))^a * bracket
        let arg1: Vec<f64> = xi1.iter().zip(&y_full).map(|(c, v)| c + mu * v).collect();
        let exact1 = ens.u_eval(&arg1).0;
        let xi1_sq: f64 = xi1.iter().map(|v| v * v).sum();
        let ydxi: f64 = y_full.iter().zip(&xi1).map(|(a, b)| a * b).sum();
        let y_sq: f64 = y_full.iter().map(|v| v * v).sum();
        let bracket1 = 1.0 - a * y_full[0] * mu
            + (nf - 2.0) / 4.0 * (nf * ydxi * ydxi / 2.0 - y_sq) * mu * mu;
        let approx1 = (2.0 / (1.0 + xi1_sq)).powf(a) * bracket1;
        man1_points.push((mu, ((exact1 - approx1) / exact1).abs()));

        // man2: U(y + (xi1 - xil)/mu) with c-hat = |d|^2/2
        let d: Vec<f64> = xi1.iter().zip(&xil).map(|(a, b)| a - b).collect();
        let d_sq: f64 = d.iter().map(|v| v * v).sum();
        let c_hat = d_sq / 2.0;
        let arg2: Vec<f64> = y_full.iter().zip(&d).map(|(v, di)| v + di / mu).collect();
        let exact2 = ens.u_eval(&arg2).0;
        let ddy: f64 = d.iter().zip(&y_full).map(|(a, b)| a * b).sum();
        let bracket2 = 1.0 - a * ddy / c_hat * mu
            + (nf - 2.0) / 4.0 * mu * mu / c_hat
                * (-1.0 - y_sq + nf * (ddy / d_sq.sqrt()).powi(2));
        let approx2 = mu.powf(nf - 2.0) / c_hat.powf(a) * bracket2;
        man2_points.push((mu, ((exact2 - approx2) / exact2).abs()));

        // man3: Z_0(y + (xil - xi1)/mu), prefactor with 1 - cos theta_l
        let dm: Vec<f64> = xil.iter().zip(&xi1).map(|(a, b)| a - b).collect();
        let arg3: Vec<f64> = y_full.iter().zip(&dm).map(|(v, di)| v + di / mu).collect();
        let exact3 = ens.z_field(0, 0, &arg3)?;
        let one_minus_cos = 1.0 - ens.theta(l).cos();
        let dmdy: f64 = dm.iter().zip(&y_full).map(|(a, b)| a * b).sum();
        let dm_sq: f64 = dm.iter().map(|v| v * v).sum();
        let bracket3 = 1.0 - (nf - 2.0) * dmdy / dm_sq * mu;
        let approx3 = -a * mu.powf(nf - 2.0) / one_minus_cos.powf(a) * bracket3;
        man3_points.push((mu, ((exact3 - approx3) / exact3).abs()));
    }

    let slope = |pts: &[(f64, f64)]| {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1.max(1e-300)).collect();
        fit_loglog_slope(&xs, &ys)
    };
    Ok(TaylorOrderReport {
        man1_slope: slope(&man1_points),
        man2_slope: slope(&man2_points),
        man3_slope: slope(&man3_points),
        man1_points,
        man2_points,
        man3_points,
    })
}
