#![allow(dead_code)]

use decentral_lqr::decentral::{thm1_synthesize, Thm1System};
use decentral_lqr::models::PredatorPreyParams;
use decentral_lqr::spectral::{CirculantSpec, FrequencySymbols};
use decentral_lqr::Matrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut impl Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(lo..hi))
}

/// `MᵀM + I` with `M` uniform in `[−1, 1]`.
pub fn spd(rng: &mut impl Rng, n: usize) -> Matrix {
    let m = uniform(rng, n, n, -1.0, 1.0);
    &m.transpose().matmul(&m) + &Matrix::identity(n)
}

/// Smallest singular value proxy: `det(BᵀB)` relative to `‖B‖` powers.
fn well_ranked(b: &Matrix) -> bool {
    let g = b.transpose().matmul(b);
    // Cholesky of the Gram matrix shifted down a little.
    let m = g.rows();
    let shift = 1e-3 * g.trace() / m as f64;
    decentral_lqr::matcore::is_positive_definite(&(&g - &Matrix::identity(m).scale(shift)))
}

pub struct CareInstance {
    pub a: Matrix,
    pub b: Matrix,
    pub q: Matrix,
    pub r: Matrix,
}

/// `A` uniform in `[−2, 2]`, `B` full column rank, `Q = MᵀM + I`, `R = NᵀN + I`.
pub fn care_instance(rng: &mut impl Rng) -> CareInstance {
    care_instance_any(rng, false)
}

/// Like [`care_instance`], redrawing until the Bass construction certifies
/// the pair as stabilizable.
pub fn stabilizable_care_instance(rng: &mut impl Rng) -> CareInstance {
    care_instance_any(rng, true)
}

fn care_instance_any(rng: &mut impl Rng, bass_certified: bool) -> CareInstance {
    loop {
        let inst = draw_care_instance(rng);
        if !bass_certified || decentral_lqr::matcore::bass_stabilizing_gain(&inst.a, &inst.b).is_ok() {
            return inst;
        }
    }
}

fn draw_care_instance(rng: &mut impl Rng) -> CareInstance {
    let n = rng.gen_range(1..=8);
    let m = rng.gen_range(1..=n);
    let a = uniform(rng, n, n, -2.0, 2.0);
    let b = loop {
        let b = uniform(rng, n, m, -1.0, 1.0);
        if well_ranked(&b) {
            break b;
        }
    };
    CareInstance {
        a,
        b,
        q: spd(rng, n),
        r: spd(rng, m),
    }
}

/// A 2×2 system satisfying opposite-sign coupling and same-sign diagonal,
/// magnitudes in `[0.1, 3]`, with decentralizing costs from `q₂, γ₂ ∈ [0.1, 10]`.
pub fn thm1_instance(rng: &mut impl Rng) -> Thm1System {
    let diag_sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let coupling_sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let [m0, m1, m2, m3]: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.1..3.0));
    let (a0, a2) = (diag_sign * m0, diag_sign * m2);
    let (a1, a_minus1) = (coupling_sign * m1, -coupling_sign * m3);
    let q2 = rng.gen_range(0.1..10.0);
    let gamma2 = rng.gen_range(0.1..10.0);
    thm1_synthesize(a0, a1, a_minus1, a2, q2, gamma2).expect("conditions hold by construction")
}

pub fn random_row(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Positive, real, even symbols `s(κ) = s(n − κ)` in `[lo, hi]`: a symmetric circulant.
pub fn positive_symmetric_circulant(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> CirculantSpec {
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..=n / 2 {
        let v = Complex64::new(rng.gen_range(lo..hi), 0.0);
        values[k] = v;
        values[(n - k) % n] = v;
    }
    FrequencySymbols { values }.to_circulant().unwrap()
}

/// First row of `MᵀM + I` for a random circulant `M`: symmetric positive definite.
pub fn spd_circulant(rng: &mut impl Rng, n: usize) -> CirculantSpec {
    let m = CirculantSpec::new(random_row(rng, n, -1.0, 1.0)).unwrap().materialize();
    let g = &m.transpose().matmul(&m) + &Matrix::identity(n);
    CirculantSpec::new(g.row(0).to_vec()).unwrap()
}

pub fn symbols_to_spec(values: Vec<Complex64>) -> CirculantSpec {
    FrequencySymbols { values }.to_circulant().unwrap()
}

pub struct CirculantQuadruple {
    pub a: CirculantSpec,
    pub b: CirculantSpec,
    pub q: CirculantSpec,
    pub r: CirculantSpec,
    /// The common gain the construction aims for, if any.
    pub planted_c: Option<f64>,
}

/// Half of the draws plant a common gain `c`: with even positive `b̂`, `r̂`,
/// setting `q̂ = r̂·c·(c − 2 Re â / b̂)` makes every frequency gain equal `c`.
/// The other half are unstructured (general `A` and `B`, SPD circulant `Q`, `R`).
pub fn circulant_quadruple(rng: &mut impl Rng) -> CirculantQuadruple {
    let n = rng.gen_range(2..=12);
    let a = CirculantSpec::new(random_row(rng, n, -2.0, 2.0)).unwrap();
    if rng.gen_bool(0.5) {
        let b = positive_symmetric_circulant(rng, n, 0.5, 2.0);
        let r = positive_symmetric_circulant(rng, n, 0.5, 2.0);
        let (ah, bh, rh) = (a.eigenvalues(), b.eigenvalues(), r.eigenvalues());
        let floor = (0..n)
            .map(|k| 2.0 * ah.get(k).re / bh.get(k).re)
            .fold(0.0, f64::max);
        let c = floor + rng.gen_range(0.1..2.0);
        let q_hat = (0..n)
            .map(|k| {
                let ratio = ah.get(k).re / bh.get(k).re;
                Complex64::new(rh.get(k).re * c * (c - 2.0 * ratio), 0.0)
            })
            .collect();
        CirculantQuadruple {
            a,
            b,
            q: symbols_to_spec(q_hat),
            r,
            planted_c: Some(c),
        }
    } else {
        let b = loop {
            let b = CirculantSpec::new(random_row(rng, n, -2.0, 2.0)).unwrap();
            if b.eigenvalues().values.iter().all(|v| v.norm() >= 0.3) {
                break b;
            }
        };
        CirculantQuadruple {
            a,
            b,
            q: spd_circulant(rng, n),
            r: spd_circulant(rng, n),
            planted_c: None,
        }
    }
}

/// Parameters in `[0.1, 5]` (`b ∈ [0.1, 2]`, `e ∈ [0.1, 1]`), redrawn until
/// `r₁ − b·k₂` has the requested sign with margin `1e-3`.
pub fn predator_prey_params(rng: &mut impl Rng, prey_dominant: bool) -> PredatorPreyParams {
    loop {
        let p = PredatorPreyParams::new(
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..2.0),
            rng.gen_range(0.1..1.0),
        )
        .unwrap();
        let margin = p.r1 - p.b * p.k2;
        if (prey_dominant && margin > 1e-3) || (!prey_dominant && margin < -1e-3) {
            return p;
        }
    }
}
