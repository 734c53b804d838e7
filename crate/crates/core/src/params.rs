use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by all operations. Every value can be
/// overridden; the defaults are the ones used throughout the test suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Pole guard: any |sin(argument)| below this raises a pole error
    /// instead of returning a huge number.
    pub eps_degenerate: f64,
    /// Threshold on |det g(u)| for inverting the 2x2 gauge matrix.
    pub eps_singular_gauge: f64,
    /// A Bethe root set counts as on-shell when max |residual| is below this.
    pub tol_onshell: f64,
    /// Residual tolerance for the exact algebraic identities (QYBE, RE, ...).
    pub tol_identity: f64,
    /// Base step for one-sided eta-derivatives.
    pub fd_step: f64,
    /// Allowed relative disagreement between Richardson extrapolation
    /// levels before a derivative is declared non-convergent.
    pub fd_disagree: f64,
    /// Condition-number level that triggers a warning on monodromy inversion.
    pub cond_warn: f64,
    /// Condition-number level above which determinant results are flagged
    /// ill-conditioned.
    pub cond_ill: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_degenerate: 1e-8,
            eps_singular_gauge: 1e-10,
            tol_onshell: 1e-10,
            tol_identity: 1e-12,
            fd_step: 1e-4,
            fd_disagree: 1e-4,
            cond_warn: 1e8,
            cond_ill: 1e10,
        }
    }
}

/// All model constants: boundary parameters (lambda1, lambda2, xi, delta),
/// crossing parameter eta, and the chain inhomogeneities z_1..z_N.
///
/// The four boundary parameters select generic non-diagonal K-matrices; the
/// Gaudin operators themselves live in the eta -> 0 limit, but eta is kept
/// here because the vertex-model identities are checked at finite eta.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub lambda1: C64,
    pub lambda2: C64,
    pub xi: C64,
    pub delta: C64,
    pub eta: C64,
    pub z: Vec<C64>,
    pub n_sites: usize,
    pub tol: Tolerances,
}

impl ModelParams {
    /// Build and validate a parameter set. `n_sites` is taken from the
    /// length of `z` and must be even and >= 2.
    pub fn new(
        lambda1: C64,
        lambda2: C64,
        xi: C64,
        delta: C64,
        eta: C64,
        z: Vec<C64>,
    ) -> Result<Self> {
        let p = ModelParams {
            lambda1,
            lambda2,
            xi,
            delta,
            eta,
            n_sites: z.len(),
            z,
            tol: Tolerances::default(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Same as [`ModelParams::new`] with real-valued inputs.
    pub fn from_real(
        lambda1: f64,
        lambda2: f64,
        xi: f64,
        delta: f64,
        eta: f64,
        z: &[f64],
    ) -> Result<Self> {
        Self::new(
            C64::new(lambda1, 0.0),
            C64::new(lambda2, 0.0),
            C64::new(xi, 0.0),
            C64::new(delta, 0.0),
            C64::new(eta, 0.0),
            z.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// Number of Bethe roots per set, M = N/2.
    pub fn m_roots(&self) -> usize {
        self.n_sites / 2
    }

    /// The eta-dependent dual boundary parameter, truncated at first order:
    /// xi_bar = xi + eta * delta.
    pub fn xi_bar(&self, eta: C64) -> C64 {
        self.xi + eta * self.delta
    }

    pub fn validate(&self) -> Result<()> {
        let eps = self.tol.eps_degenerate;
        if self.n_sites < 2 || !self.n_sites.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "n_sites must be even and >= 2, got {}",
                self.n_sites
            )));
        }
        if self.z.len() != self.n_sites {
            return Err(Error::InvalidParams(format!(
                "z has {} entries but n_sites = {}",
                self.z.len(),
                self.n_sites
            )));
        }
        for v in [self.lambda1, self.lambda2, self.xi, self.delta, self.eta]
            .iter()
            .chain(self.z.iter())
        {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::InvalidParams("non-finite parameter".into()));
            }
        }
        if (self.lambda1 - self.lambda2).sin().norm() < eps {
            return Err(Error::InvalidParams(
                "lambda1 == lambda2 (mod pi): gauge matrix singular".into(),
            ));
        }
        for j in 0..self.n_sites {
            for k in (j + 1)..self.n_sites {
                let d = (self.z[j] - self.z[k]).sin().norm();
                let s = (self.z[j] + self.z[k]).sin().norm();
                if d < eps || s < eps {
                    return Err(Error::InvalidParams(format!(
                        "inhomogeneities z[{j}], z[{k}] degenerate: |sin(z_j-z_k)| = {d:.3e}, |sin(z_j+z_k)| = {s:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Stable hash of the model constants (not the tolerances), used to tie
    /// roots files and report records to the parameter set that produced
    /// them. FNV-1a over the IEEE-754 little-endian bytes.
    pub fn params_hash(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: f64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for v in [self.lambda1, self.lambda2, self.xi, self.delta, self.eta] {
            eat(v.re);
            eat(v.im);
        }
        eat(self.n_sites as f64);
        for z in &self.z {
            eat(z.re);
            eat(z.im);
        }
        format!("{h:016x}")
    }
}
