//! Optimal-scaling calculus for the two kernels: diffusion speeds of the
//! limiting Langevin process, the optimal scale, and asymptotic acceptance
//! rates.
//!
//! For a product target with component Fisher information `I`:
//!
//! * `h_RWMH(l)  = 2 l² Φ(−l√I/2)`
//! * `h_ATMCMC(l) = 4 l² ∫₀^∞ z² Φ(−z l√I/2) φ(z) dz`
//! * `α_RWMH(l)  = 2 Φ(−l√I/2)`
//! * `α_ATMCMC(l) = 4 ∫₀^∞ Φ(−u l√I/2) φ(u) du`
//!
//! Both speeds are maximized near l = 2.4/√I; the acceptance rates there are
//! the familiar 0.234 and 0.439.

use statrs::function::erf::erfc;

use crate::quad::integrate;
use crate::samplers::KernelKind;
use crate::Error;

/// Standard normal pdf.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF via erfc, accurate deep in the tails.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Truncated-domain quadrature parameters for the Gaussian-weighted integrals.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    /// Upper truncation bound; the Gaussian-weighted tail beyond it must be
    /// below the tolerance (at 8.0 the tail mass is < 1e-15).
    pub bound: f64,
    pub tolerance: f64,
}

impl QuadratureSpec {
    pub fn new(bound: f64, tolerance: f64) -> Result<Self, Error> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::invalid("bound", format!("must be > 0, got {bound}")));
        }
        if !(tolerance > 0.0 && tolerance <= 1e-8) {
            return Err(Error::invalid("tolerance", format!("must be in (0, 1e-8], got {tolerance}")));
        }
        Ok(QuadratureSpec { bound, tolerance })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            bound: 8.0,
            tolerance: 1e-10,
        }
    }
}

fn check_l_i(l: f64, fisher_info: f64) -> Result<(), Error> {
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::invalid("l", format!("must be > 0, got {l}")));
    }
    if !(fisher_info.is_finite() && fisher_info > 0.0) {
        return Err(Error::invalid("fisher_info", format!("must be > 0, got {fisher_info}")));
    }
    Ok(())
}

/// E[min{1, e^X}] for X ~ N(μ, σ²): Φ(μ/σ) + exp(μ + σ²/2) Φ(−σ − μ/σ).
pub fn expected_min_exp(mu: f64, sigma: f64) -> Result<f64, Error> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid("sigma", format!("must be > 0, got {sigma}")));
    }
    if !mu.is_finite() {
        return Err(Error::invalid("mu", "must be finite"));
    }
    // exp(μ + σ²/2) can overflow on its own while the product stays in (0, 1];
    // combine the factors in log space.
    let first = std_normal_cdf(mu / sigma);
    let tail_arg = -sigma - mu / sigma;
    let tail = std_normal_cdf(tail_arg);
    let second = if tail > 0.0 {
        (mu + 0.5 * sigma * sigma + tail.ln()).exp()
    } else {
        0.0
    };
    Ok((first + second).clamp(f64::MIN_POSITIVE, 1.0))
}

/// h_RWMH(l) = 2 l² Φ(−l√I/2).
pub fn diffusion_speed_rwmh(l: f64, fisher_info: f64) -> Result<f64, Error> {
    check_l_i(l, fisher_info)?;
    Ok(2.0 * l * l * std_normal_cdf(-l * fisher_info.sqrt() / 2.0))
}

/// h_ATMCMC(l) = 4 l² ∫₀^∞ z² Φ(−z l√I/2) φ(z) dz by adaptive quadrature.
pub fn diffusion_speed_atmcmc(l: f64, fisher_info: f64, quad: &QuadratureSpec) -> Result<f64, Error> {
    check_l_i(l, fisher_info)?;
    let a = l * fisher_info.sqrt() / 2.0;
    let integral = integrate(
        |z| z * z * std_normal_cdf(-a * z) * std_normal_pdf(z),
        0.0,
        quad.bound,
        quad.tolerance,
    )?;
    Ok(4.0 * l * l * integral)
}

/// α_ATMCMC(l) = 4 ∫₀^∞ Φ(−u l√I/2) φ(u) du.
pub fn asymptotic_acceptance_atmcmc(l: f64, fisher_info: f64, quad: &QuadratureSpec) -> Result<f64, Error> {
    check_l_i(l, fisher_info)?;
    let a = l * fisher_info.sqrt() / 2.0;
    let integral = integrate(
        |u| std_normal_cdf(-a * u) * std_normal_pdf(u),
        0.0,
        quad.bound,
        quad.tolerance,
    )?;
    Ok(4.0 * integral)
}

/// α_RWMH(l) = 2 Φ(−l√I/2).
pub fn asymptotic_acceptance_rwmh(l: f64, fisher_info: f64) -> Result<f64, Error> {
    check_l_i(l, fisher_info)?;
    Ok(2.0 * std_normal_cdf(-l * fisher_info.sqrt() / 2.0))
}

/// Outcome of maximizing a diffusion speed over l.
#[derive(Debug, Clone, Copy)]
pub struct ScalingResult {
    pub kernel: KernelKind,
    pub l_opt: f64,
    pub h_at_opt: f64,
    pub alpha_opt: f64,
}

const L_SEARCH: (f64, f64) = (0.1, 10.0);

/// Maximize the kernel's diffusion speed over l ∈ [0.1, 10] by golden-section
/// search (both speeds are unimodal in l) to |Δl| < 1e-4.
pub fn optimize_scaling(kernel: KernelKind, fisher_info: f64, quad: &QuadratureSpec) -> Result<ScalingResult, Error> {
    if !(fisher_info.is_finite() && fisher_info > 0.0) {
        return Err(Error::invalid("fisher_info", format!("must be > 0, got {fisher_info}")));
    }
    let h = |l: f64| -> Result<f64, Error> {
        match kernel {
            KernelKind::Rwmh => diffusion_speed_rwmh(l, fisher_info),
            KernelKind::Atmcmc | KernelKind::AtmcmcScaled => diffusion_speed_atmcmc(l, fisher_info, quad),
        }
    };
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = L_SEARCH;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = h(c)?;
    let mut fd = h(d)?;
    while b - a > 1e-4 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = h(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = h(d)?;
        }
    }
    let l_opt = 0.5 * (a + b);
    let h_at_opt = h(l_opt)?;
    if h_at_opt <= 0.0 {
        return Err(Error::invalid("objective", "diffusion speed vanished over the search interval"));
    }
    let alpha_opt = match kernel {
        KernelKind::Rwmh => asymptotic_acceptance_rwmh(l_opt, fisher_info)?,
        KernelKind::Atmcmc | KernelKind::AtmcmcScaled => {
            asymptotic_acceptance_atmcmc(l_opt, fisher_info, quad)?
        }
    };
    Ok(ScalingResult {
        kernel,
        l_opt,
        h_at_opt,
        alpha_opt,
    })
}

/// One row of the scaling-curve export.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    pub l: f64,
    pub h_rwmh: f64,
    pub h_atmcmc: f64,
    pub alpha_rwmh: f64,
    pub alpha_atmcmc: f64,
}

/// Sample both speeds and acceptance rates on a uniform l-grid over [0.1, 10].
pub fn scaling_curve(fisher_info: f64, quad: &QuadratureSpec, n_points: usize) -> Result<Vec<CurvePoint>, Error> {
    if n_points < 2 {
        return Err(Error::invalid("n_points", "need at least 2 grid points"));
    }
    let (lo, hi) = L_SEARCH;
    (0..n_points)
        .map(|i| {
            let l = lo + (hi - lo) * i as f64 / (n_points - 1) as f64;
            Ok(CurvePoint {
                l,
                h_rwmh: diffusion_speed_rwmh(l, fisher_info)?,
                h_atmcmc: diffusion_speed_atmcmc(l, fisher_info, quad)?,
                alpha_rwmh: asymptotic_acceptance_rwmh(l, fisher_info)?,
                alpha_atmcmc: asymptotic_acceptance_atmcmc(l, fisher_info, quad)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RngStream;

    #[test]
    fn expected_min_exp_closed_form_points() {
        // μ=0, σ=1: Φ(0) + e^{1/2} Φ(−1), checked directly against
        // P(X ≥ 0) + E[e^X 1{X<0}] = 0.5 + e^{1/2} Φ(−1).
        let v = expected_min_exp(0.0, 1.0).unwrap();
        assert!((v - 0.76158).abs() < 1e-5, "{v}");
        assert!((expected_min_exp(10.0, 1.0).unwrap() - 1.0).abs() < 1e-4);
        // μ = −σ²/2: the symmetric-proposal case, 2Φ(−σ/2).
        let v = expected_min_exp(-0.5, 1.0).unwrap();
        assert!((v - 2.0 * std_normal_cdf(-0.5)).abs() < 1e-12);
        assert!((v - 0.61708).abs() < 1e-5);
    }

    #[test]
    fn expected_min_exp_matches_monte_carlo_grid() {
        let mut s = RngStream::new(100, 0);
        let n = 400_000usize;
        for mu in [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0] {
            for sigma in [0.25, 1.0, 4.0] {
                let draws = s.draw_std_normal_vec(n, 1.0).unwrap();
                let vals: Vec<f64> = draws.iter().map(|z| (mu + sigma * z).exp().min(1.0)).collect();
                let mean = vals.iter().sum::<f64>() / n as f64;
                let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
                let se = (var / n as f64).sqrt();
                let cf = expected_min_exp(mu, sigma).unwrap();
                assert!(
                    (cf - mean).abs() < 3.0 * se + 1e-9,
                    "mu={mu} sigma={sigma}: closed form {cf}, mc {mean} ± {se}"
                );
            }
        }
    }

    #[test]
    fn rwmh_speed_values() {
        let v = diffusion_speed_rwmh(2.38, 1.0).unwrap();
        let expect = 2.0 * 2.38 * 2.38 * std_normal_cdf(-1.19);
        assert!((v - expect).abs() < 1e-12);
        assert!((v - 1.3256).abs() < 2e-3, "{v}");
        assert!(diffusion_speed_rwmh(1e-8, 1.0).unwrap() < 1e-15);
    }

    #[test]
    fn atmcmc_speed_matches_monte_carlo() {
        // h = 2 l² E[Z² Φ(−|Z| l√I/2)] over the full line = 4 l² ∫₀^∞ …
        let quad = QuadratureSpec::default();
        let h = diffusion_speed_atmcmc(2.4, 1.0, &quad).unwrap();
        let mut s = RngStream::new(3, 0);
        let n = 2_000_000usize;
        let draws = s.draw_std_normal_vec(n, 1.0).unwrap();
        let vals: Vec<f64> = draws
            .iter()
            .map(|z| 2.0 * 2.4 * 2.4 * z * z * std_normal_cdf(-z.abs() * 2.4 / 2.0))
            .collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let se = (var / n as f64).sqrt();
        assert!((h - mean).abs() < 3.0 * se, "quad {h}, mc {mean} ± {se}");
        assert!(diffusion_speed_atmcmc(1e-8, 1.0, &quad).unwrap() < 1e-15);
    }

    #[test]
    fn acceptance_functions_decrease_and_limits() {
        let quad = QuadratureSpec::default();
        let mut prev_a = 1.0;
        let mut prev_r = 1.0;
        for i in 1..=40 {
            let l = 0.25 * i as f64;
            let a = asymptotic_acceptance_atmcmc(l, 1.0, &quad).unwrap();
            let r = asymptotic_acceptance_rwmh(l, 1.0).unwrap();
            assert!(a < prev_a && a > 0.0 && a < 1.0);
            assert!(r < prev_r && r > 0.0 && r < 1.0);
            prev_a = a;
            prev_r = r;
        }
        // decreasing in I as well
        assert!(
            asymptotic_acceptance_atmcmc(2.0, 2.0, &quad).unwrap()
                < asymptotic_acceptance_atmcmc(2.0, 1.0, &quad).unwrap()
        );
        assert!((asymptotic_acceptance_atmcmc(1e-6, 1.0, &quad).unwrap() - 1.0).abs() < 1e-5);
        assert!((asymptotic_acceptance_rwmh(1e-9, 1.0).unwrap() - 1.0).abs() < 1e-8);
        assert!((asymptotic_acceptance_rwmh(4.0, 1.0).unwrap() - 0.0455).abs() < 1e-4);
    }

    #[test]
    fn optimize_matches_known_rates() {
        let quad = QuadratureSpec::default();
        let r = optimize_scaling(KernelKind::Rwmh, 1.0, &quad).unwrap();
        assert!((r.l_opt - 2.4).abs() < 0.1, "rwmh l_opt {}", r.l_opt);
        assert!((r.alpha_opt - 0.234).abs() < 0.005, "rwmh alpha {}", r.alpha_opt);

        let a = optimize_scaling(KernelKind::Atmcmc, 1.0, &quad).unwrap();
        assert!((a.l_opt - 2.4).abs() < 0.1, "atmcmc l_opt {}", a.l_opt);
        assert!((a.alpha_opt - 0.439).abs() < 0.005, "atmcmc alpha {}", a.alpha_opt);

        // l_opt(4) = l_opt(1)/2 by the l√I reparametrization.
        let a4 = optimize_scaling(KernelKind::Atmcmc, 4.0, &quad).unwrap();
        assert!((a4.l_opt - a.l_opt / 2.0).abs() < 1e-3, "{} vs {}", a4.l_opt, a.l_opt / 2.0);
    }

    #[test]
    fn quadrature_vs_monte_carlo_random_grid() {
        // 20 pseudo-random (l, I) pairs in [0.5, 8] × [0.25, 4].
        let quad = QuadratureSpec::default();
        let mut s = RngStream::new(2024, 0);
        let n = 1_000_000usize;
        for k in 0..20 {
            let l = 0.5 + 7.5 * s.draw_uniform();
            let fi = 0.25 + 3.75 * s.draw_uniform();
            let a = l * fi.sqrt() / 2.0;
            let draws = s.draw_std_normal_vec(n, 1.0).unwrap();

            let h_vals: Vec<f64> = draws
                .iter()
                .map(|z| 2.0 * l * l * z * z * std_normal_cdf(-z.abs() * a))
                .collect();
            let h_mc = h_vals.iter().sum::<f64>() / n as f64;
            let h_var = h_vals.iter().map(|v| (v - h_mc) * (v - h_mc)).sum::<f64>() / n as f64;
            let h_q = diffusion_speed_atmcmc(l, fi, &quad).unwrap();
            assert!(
                (h_q - h_mc).abs() < 4.0 * (h_var / n as f64).sqrt(),
                "case {k}: h quad {h_q} vs mc {h_mc}"
            );

            let a_vals: Vec<f64> = draws.iter().map(|z| 2.0 * std_normal_cdf(-z.abs() * a)).collect();
            let a_mc = a_vals.iter().sum::<f64>() / n as f64;
            let a_var = a_vals.iter().map(|v| (v - a_mc) * (v - a_mc)).sum::<f64>() / n as f64;
            let a_q = asymptotic_acceptance_atmcmc(l, fi, &quad).unwrap();
            assert!(
                (a_q - a_mc).abs() < 4.0 * (a_var / n as f64).sqrt(),
                "case {k}: alpha quad {a_q} vs mc {a_mc}"
            );
        }
    }

    #[test]
    fn curve_export_shape() {
        let quad = QuadratureSpec::default();
        let curve = scaling_curve(1.0, &quad, 50).unwrap();
        assert_eq!(curve.len(), 50);
        assert!((curve[0].l - 0.1).abs() < 1e-12);
        assert!((curve[49].l - 10.0).abs() < 1e-12);
        assert!(curve.iter().all(|p| p.h_rwmh >= 0.0 && p.h_atmcmc >= 0.0));
    }

    #[test]
    fn parameter_validation() {
        let quad = QuadratureSpec::default();
        assert!(expected_min_exp(0.0, 0.0).is_err());
        assert!(diffusion_speed_rwmh(-1.0, 1.0).is_err());
        assert!(diffusion_speed_atmcmc(1.0, 0.0, &quad).is_err());
        assert!(QuadratureSpec::new(8.0, 1e-6).is_err());
        assert!(QuadratureSpec::new(-1.0, 1e-9).is_err());
    }
}
