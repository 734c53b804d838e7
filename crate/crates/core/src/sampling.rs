//! Seeded random parameter draws for the identity checks. All draws are
//! real, uniform in [0.1, 1.4], and rejected until every trigonometric
//! argument the consuming check evaluates stays clear of the zeros of sine.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::params::ModelParams;

pub const DRAW_LO: f64 = 0.1;
pub const DRAW_HI: f64 = 1.4;
/// Minimum distance (mod pi) from a sine zero for drawn arguments.
pub const POLE_MARGIN: f64 = 0.05;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

pub fn draw_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(DRAW_LO..DRAW_HI)
}

/// Distance of x from the nearest zero of sin (i.e. from the nearest
/// multiple of pi).
pub fn dist_from_sine_zero(x: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let r = x.rem_euclid(pi);
    r.min(pi - r)
}

pub fn margins_ok(args: &[f64]) -> bool {
    args.iter().all(|&a| dist_from_sine_zero(a) >= POLE_MARGIN)
}

/// Draw a full model parameter set with n_sites inhomogeneities, resampling
/// until the non-degeneracy margins hold.
pub fn draw_params(rng: &mut ChaCha8Rng, n_sites: usize) -> ModelParams {
    loop {
        let lambda1 = draw_angle(rng);
        let lambda2 = draw_angle(rng);
        let xi = draw_angle(rng);
        let delta = draw_angle(rng);
        let eta = draw_angle(rng);
        let z: Vec<f64> = (0..n_sites).map(|_| draw_angle(rng)).collect();

        if dist_from_sine_zero(lambda1 - lambda2) < POLE_MARGIN {
            continue;
        }
        let mut seps_ok = true;
        for j in 0..n_sites {
            for k in (j + 1)..n_sites {
                if dist_from_sine_zero(z[j] - z[k]) < POLE_MARGIN
                    || dist_from_sine_zero(z[j] + z[k]) < POLE_MARGIN
                {
                    seps_ok = false;
                }
            }
        }
        // keep the boundary factors of the K-matrices well-defined at the
        // inhomogeneities themselves
        for &zj in &z {
            for l in [lambda1, lambda2] {
                if dist_from_sine_zero(l + xi + zj) < POLE_MARGIN
                    || dist_from_sine_zero(l + xi - zj) < POLE_MARGIN
                {
                    seps_ok = false;
                }
            }
            if dist_from_sine_zero(2.0 * zj) < POLE_MARGIN {
                seps_ok = false;
            }
        }
        if !seps_ok {
            continue;
        }
        if let Ok(p) = ModelParams::from_real(lambda1, lambda2, xi, delta, eta, &z) {
            return p;
        }
    }
}

/// Draw a spectral-parameter list whose pairwise sine separations and
/// distances from the given fixed points all clear the margin.
pub fn draw_spectral(rng: &mut ChaCha8Rng, count: usize, avoid: &[f64]) -> Vec<f64> {
    'outer: loop {
        let us: Vec<f64> = (0..count).map(|_| draw_angle(rng)).collect();
        for a in 0..count {
            for b in (a + 1)..count {
                if dist_from_sine_zero(us[a] - us[b]) < POLE_MARGIN
                    || dist_from_sine_zero(us[a] + us[b]) < POLE_MARGIN
                {
                    continue 'outer;
                }
            }
            for &x in avoid {
                if dist_from_sine_zero(us[a] - x) < POLE_MARGIN
                    || dist_from_sine_zero(us[a] + x) < POLE_MARGIN
                {
                    continue 'outer;
                }
            }
            if dist_from_sine_zero(2.0 * us[a]) < POLE_MARGIN {
                continue 'outer;
            }
        }
        return us;
    }
}

pub fn to_c64(xs: &[f64]) -> Vec<C64> {
    xs.iter().map(|&x| C64::new(x, 0.0)).collect()
}
