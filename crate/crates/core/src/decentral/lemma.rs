use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `x² + βx + γ = 0` with complex coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonicQuadratic {
    pub beta: Complex64,
    pub gamma: Complex64,
}

impl MonicQuadratic {
    pub fn new(beta: Complex64, gamma: Complex64) -> Self {
        MonicQuadratic { beta, gamma }
    }

    pub fn real(beta: f64, gamma: f64) -> Self {
        Self::new(Complex64::new(beta, 0.0), Complex64::new(gamma, 0.0))
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        x * x + self.beta * x + self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CommonRoots {
    BothCommon,
    OneCommon(Complex64),
    None,
}

/// Decides how many roots two monic quadratics share.
///
/// Both roots are shared iff the polynomials coincide. Otherwise a shared
/// root `α` must satisfy `(β₁ − β₂)α + (γ₁ − γ₂) = 0` and, eliminating `x²`
/// the other way, `(γ₁ − γ₂)α = β₁γ₂ − β₂γ₁`. When `γ₁ = γ₂` only `α = 0` is
/// possible, which needs `γ = 0`. Comparisons use `tol` scaled by the
/// coefficient magnitudes.
pub fn lemma_common_roots(f: &MonicQuadratic, g: &MonicQuadratic, tol: f64) -> CommonRoots {
    let scale = [f.beta, f.gamma, g.beta, g.gamma]
        .iter()
        .map(|c| c.norm())
        .fold(1.0, f64::max);
    let close = |a: Complex64, b: Complex64| (a - b).norm() <= tol * scale;
    let d_beta = f.beta - g.beta;
    let d_gamma = f.gamma - g.gamma;

    let same_beta = close(f.beta, g.beta);
    let same_gamma = close(f.gamma, g.gamma);
    if same_beta && same_gamma {
        return CommonRoots::BothCommon;
    }
    if same_gamma {
        return if f.gamma.norm() <= tol * scale && g.gamma.norm() <= tol * scale {
            CommonRoots::OneCommon(Complex64::new(0.0, 0.0))
        } else {
            CommonRoots::None
        };
    }
    if same_beta {
        return CommonRoots::None;
    }

    let from_linear = -d_gamma / d_beta;
    let from_product = (f.beta * g.gamma - g.beta * f.gamma) / d_gamma;
    let alpha_scale = from_linear.norm().max(1.0);
    let agree = (from_linear - from_product).norm() <= tol * scale * alpha_scale;
    let root_tol = tol * scale * alpha_scale * alpha_scale;
    if agree && f.eval(from_linear).norm() <= root_tol && g.eval(from_linear).norm() <= root_tol {
        CommonRoots::OneCommon(from_linear)
    } else {
        CommonRoots::None
    }
}
