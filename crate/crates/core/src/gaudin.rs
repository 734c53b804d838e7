//! Gaudin Hamiltonians H_j built two independent ways: the explicit local
//! formula (boundary term Gamma_j plus two exchange sums) and the eta
//! derivative of the double-row transfer matrix at u = z_j. The two
//! constructions agree and the resulting family is mutually commuting.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::tensor::{
    embed_site, embed_two_site, permutation4, sigma_minus, sigma_plus, sigma_z, DenseOperator,
};
use crate::vertex::{k_minus, k_plus_eta, r_matrix, transfer_eta};

/// Result of a one-sided derivative in eta at 0, with Richardson
/// extrapolants at two step levels.
pub struct RichardsonDerivative {
    /// 2 D(h/2) - D(h): first-order extrapolant from the (h, h/2) pair.
    pub extrap_h: DenseOperator,
    /// 2 D(h/4) - D(h/2): the same combination one level down.
    pub extrap_h2: DenseOperator,
    /// Frobenius distance between the two extrapolation levels.
    pub disagreement: f64,
    /// disagreement / max(||extrap_h2||, 1): the convergence figure the
    /// guard compares against the tolerance.
    pub disagreement_rel: f64,
}

impl RichardsonDerivative {
    /// Second-order combination (4 * extrap_h2 - extrap_h) / 3, cancelling
    /// the O(h^2) error term as well.
    pub fn second_order(&self) -> DenseOperator {
        self.extrap_h2
            .scale(C64::new(4.0 / 3.0, 0.0))
            .sub(&self.extrap_h.scale(C64::new(1.0 / 3.0, 0.0)))
    }
}

/// One-sided derivative d f / d eta at eta = 0 from quotients
/// D(h') = (f(h') - base) / h' at h' = h, h/2, h/4. Central differences are
/// not used: eta enters xi_bar and the model is defined toward eta -> 0+.
/// The guard rejects derivatives whose extrapolation levels disagree by
/// more than `tol_disagree` relative to the derivative norm.
pub fn eta_derivative(
    mut f: impl FnMut(f64) -> Result<DenseOperator>,
    base: &DenseOperator,
    h: f64,
    tol_disagree: f64,
) -> Result<RichardsonDerivative> {
    let quotient = |fh: DenseOperator, step: f64| fh.sub(base).scale(C64::new(1.0 / step, 0.0));
    let d1 = quotient(f(h)?, h);
    let d2 = quotient(f(h / 2.0)?, h / 2.0);
    let d4 = quotient(f(h / 4.0)?, h / 4.0);
    let two = C64::new(2.0, 0.0);
    let extrap_h = d2.scale(two).sub(&d1);
    let extrap_h2 = d4.scale(two).sub(&d2);
    let disagreement = extrap_h2.sub(&extrap_h).frobenius_norm();
    let disagreement_rel = disagreement / extrap_h2.frobenius_norm().max(1.0);
    if disagreement_rel > tol_disagree {
        return Err(Error::DerivativeDisagreement {
            disagreement: disagreement_rel,
            tol: tol_disagree,
        });
    }
    Ok(RichardsonDerivative {
        extrap_h,
        extrap_h2,
        disagreement,
        disagreement_rel,
    })
}

/// K-bar(u; eta) = tr_0 { K^+_0(u) R_{0j}(2u) P_{0j} }, a 2x2 operator on
/// the site space. Directly evaluable at eta = 0.
pub fn kbar(u: C64, eta: C64, params: &ModelParams) -> Result<DenseOperator> {
    let eps = params.tol.eps_degenerate;
    let kp = k_plus_eta(u, eta, params)?;
    let r = r_matrix(2.0 * u, eta, eps)?;
    let p = permutation4();
    let kp0 = kp.kron(&DenseOperator::identity(2));
    Ok(kp0.matmul(&r).matmul(&p).partial_trace_first(2))
}

/// Gamma_j = K(z_j) * (d/d eta K-bar(z_j))|_{eta=0}, the one-site boundary
/// term of the Gaudin Hamiltonian. Non-diagonal for generic boundary
/// parameters. The product order is fixed by the transfer-matrix expansion:
/// only K * dK-bar reproduces the eta-linear coefficient of tau(z_j).
pub fn gamma(site_j: usize, params: &ModelParams) -> Result<DenseOperator> {
    let u = site_z(site_j, params)?;
    let base = kbar(u, C64::new(0.0, 0.0), params)?;
    let d = eta_derivative(
        |h| kbar(u, C64::new(h, 0.0), params),
        &base,
        params.tol.fd_step,
        params.tol.fd_disagree,
    )?;
    Ok(k_minus(u, params)?.matmul(&d.second_order()))
}

fn site_z(site_j: usize, params: &ModelParams) -> Result<C64> {
    if site_j == 0 || site_j > params.n_sites {
        return Err(Error::Index(format!(
            "site {site_j} out of range 1..={}",
            params.n_sites
        )));
    }
    Ok(params.z[site_j - 1])
}

/// The exchange block sigma^+ (x) sigma^- + sigma^- (x) sigma^+ +
/// cos(w) (sigma^z (x) sigma^z - 1)/2 on an ordered site pair.
fn exchange_block(w: C64) -> DenseOperator {
    let pm = sigma_plus().kron(&sigma_minus());
    let mp = sigma_minus().kron(&sigma_plus());
    let zz = sigma_z().kron(&sigma_z()).sub(&DenseOperator::identity(4));
    pm.add(&mp).add(&zz.scale(0.5 * w.cos()))
}

/// Gaudin Hamiltonian at site j from the explicit local formula: the
/// embedded Gamma_j plus the bare sin(z_j - z_k) exchange sum plus the
/// sin(z_j + z_k) exchange sum conjugated as K_j(z_j) (...) K_j(z_j)^{-1}.
/// The conjugation wraps the whole second sum; wrapping each summand gives
/// the same operator by linearity.
pub fn hamiltonian_direct(site_j: usize, params: &ModelParams) -> Result<DenseOperator> {
    let n = params.n_sites;
    let zj = site_z(site_j, params)?;
    let eps = params.tol.eps_degenerate;
    let mut h = embed_site(&gamma(site_j, params)?, site_j, n)?;

    let dim = 1usize << n;
    let mut sum_minus = DenseOperator::zeros(dim);
    let mut sum_plus = DenseOperator::zeros(dim);
    for k in 1..=n {
        if k == site_j {
            continue;
        }
        let zk = params.z[k - 1];
        let wm = zj - zk;
        let wp = zj + zk;
        let sm = crate::tensor::sin_guarded(wm, eps, "hamiltonian_direct")?;
        let sp = crate::tensor::sin_guarded(wp, eps, "hamiltonian_direct")?;
        // first sum: operators ordered (site k, site j)
        let b1 = embed_two_site(&exchange_block(wm), k, site_j, n)?;
        sum_minus.add_assign_scaled(&b1, C64::new(1.0, 0.0) / sm);
        // second sum: operators ordered (site j, site k)
        let b2 = embed_two_site(&exchange_block(wp), site_j, k, n)?;
        sum_plus.add_assign_scaled(&b2, C64::new(1.0, 0.0) / sp);
    }
    let kj = k_minus(zj, params)?;
    let kj_emb = embed_site(&kj, site_j, n)?;
    let kj_inv_emb = embed_site(&kj.inverse(1e-14, "K_j inversion")?, site_j, n)?;
    h = h.add(&sum_minus);
    h = h.add(&kj_emb.matmul(&sum_plus).matmul(&kj_inv_emb));
    Ok(h)
}

/// Gaudin Hamiltonian at site j as the one-sided eta-derivative of the
/// transfer matrix at u = z_j, Richardson-combined from steps h and h/2
/// (tau(z_j; 0) is the identity exactly).
pub fn hamiltonian_from_transfer(
    site_j: usize,
    params: &ModelParams,
    h: f64,
) -> Result<DenseOperator> {
    if h < 1e-6 {
        return Err(Error::InvalidParams(format!(
            "finite-difference step {h} below 1e-6"
        )));
    }
    let zj = site_z(site_j, params)?;
    let base = DenseOperator::identity(1usize << params.n_sites);
    let d = eta_derivative(
        |step| transfer_eta(zj, C64::new(step, 0.0), params),
        &base,
        h,
        params.tol.fd_disagree,
    )?;
    Ok(d.extrap_h)
}

/// Comparison of two Hamiltonian constructions, surfacing any constant
/// multiple of the identity separately: additive identity shifts do not
/// affect commutativity or eigenstates but must be reported.
pub struct HamiltonianComparison {
    pub rel_distance_raw: f64,
    pub identity_shift: C64,
    pub rel_distance_shift_adjusted: f64,
}

pub fn compare_hamiltonians(a: &DenseOperator, b: &DenseOperator) -> HamiltonianComparison {
    let scale = a.frobenius_norm().max(b.frobenius_norm()).max(1.0);
    let diff = a.sub(b);
    let shift = diff.trace() / C64::new(diff.dim() as f64, 0.0);
    let mut adjusted = diff.clone();
    let id = DenseOperator::identity(diff.dim());
    adjusted.add_assign_scaled(&id, -shift);
    HamiltonianComparison {
        rel_distance_raw: diff.frobenius_norm() / scale,
        identity_shift: shift,
        rel_distance_shift_adjusted: adjusted.frobenius_norm() / scale,
    }
}

/// The full commuting family {H_j} for one parameter set.
pub struct GaudinSet {
    pub params: ModelParams,
    pub hams: Vec<DenseOperator>,
}

impl GaudinSet {
    pub fn build(params: &ModelParams) -> Result<GaudinSet> {
        let hams = (1..=params.n_sites)
            .map(|j| hamiltonian_direct(j, params))
            .collect::<Result<Vec<_>>>()?;
        Ok(GaudinSet {
            params: params.clone(),
            hams,
        })
    }

    /// max over pairs (j, k) of ||[H_j, H_k]|| / (||H_j|| ||H_k||).
    pub fn max_pairwise_commutator_rel(&self) -> f64 {
        let n = self.hams.len();
        let norms: Vec<f64> = self.hams.iter().map(|h| h.frobenius_norm()).collect();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in (j + 1)..n {
                let c = self.hams[j].commutator(&self.hams[k]).frobenius_norm();
                worst = worst.max(c / (norms[j] * norms[k]));
            }
        }
        worst
    }
}
