//! The six-vertex R-matrix, non-diagonal boundary K-matrices, one-row and
//! double-row monodromy matrices, and the double-row transfer matrix,
//! together with residual checks of their defining algebraic identities.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::params::ModelParams;
use crate::tensor::{embed_site, embed_two_site, expi, permutation4, sin_guarded, DenseOperator};

/// Six-vertex R-matrix: diagonal corners 1, middle block
/// [[sin u, sin eta], [sin eta, sin u]] / sin(u + eta).
pub fn r_matrix(u: C64, eta: C64, eps: f64) -> Result<DenseOperator> {
    let den = sin_guarded(u + eta, eps, "r_matrix")?;
    let b = u.sin() / den;
    let cc = eta.sin() / den;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    DenseOperator::new(
        4,
        vec![
            one, zero, zero, zero, //
            zero, b, cc, zero, //
            zero, cc, b, zero, //
            zero, zero, zero, one,
        ],
    )
}

/// R acting on the swapped pair: R_{21}(u) = P R_{12}(u) P.
pub fn r_matrix_swapped(u: C64, eta: C64, eps: f64) -> Result<DenseOperator> {
    let p = permutation4();
    Ok(p.matmul(&r_matrix(u, eta, eps)?).matmul(&p))
}

/// Frobenius norm of LHS - RHS of the quantum Yang-Baxter equation for
/// pre-built 4x4 R-matrices (used directly by negative-control hooks).
pub fn qybe_residual_of(
    r12: &DenseOperator,
    r13: &DenseOperator,
    r23: &DenseOperator,
) -> Result<f64> {
    let e12 = embed_two_site(r12, 1, 2, 3)?;
    let e13 = embed_two_site(r13, 1, 3, 3)?;
    let e23 = embed_two_site(r23, 2, 3, 3)?;
    let lhs = e12.matmul(&e13).matmul(&e23);
    let rhs = e23.matmul(&e13).matmul(&e12);
    Ok(lhs.sub(&rhs).frobenius_norm())
}

/// Residual of the quantum Yang-Baxter equation at spectral points
/// (u1, u2, u3).
pub fn check_qybe(u1: C64, u2: C64, u3: C64, eta: C64, eps: f64) -> Result<f64> {
    let r12 = r_matrix(u1 - u2, eta, eps)?;
    let r13 = r_matrix(u1 - u3, eta, eps)?;
    let r23 = r_matrix(u2 - u3, eta, eps)?;
    qybe_residual_of(&r12, &r13, &r23)
}

/// Residual of the unitarity relation R_{12}(u) R_{21}(-u) = id.
pub fn unitarity_residual(u: C64, eta: C64, eps: f64) -> Result<f64> {
    let prod = r_matrix(u, eta, eps)?.matmul(&r_matrix_swapped(-u, eta, eps)?);
    Ok(prod.sub(&DenseOperator::identity(4)).frobenius_norm())
}

/// Boundary K-matrix K^-(u): the generic non-diagonal solution of the
/// reflection equation. Independent of eta.
pub fn k_minus(u: C64, params: &ModelParams) -> Result<DenseOperator> {
    let eps = params.tol.eps_degenerate;
    let (l1, l2, xi) = (params.lambda1, params.lambda2, params.xi);
    let s1 = sin_guarded(l1 + xi + u, eps, "k_minus")?;
    let s2 = sin_guarded(l2 + xi + u, eps, "k_minus")?;
    let den = 2.0 * s1 * s2;
    let cm = (l1 - l2).cos();
    let cp = (l1 + l2 + 2.0 * xi).cos();
    let i = C64::i();
    let k11 = (cm - cp * expi(-2.0 * u)) / den;
    let k12 = -i * (2.0 * u).sin() * expi(-(l1 + l2)) * expi(-u) / den;
    let k21 = i * (2.0 * u).sin() * expi(l1 + l2) * expi(-u) / den;
    let k22 = (cm * expi(-2.0 * u) - cp) / den;
    Ok(DenseOperator::two_by_two(k11, k12, k21, k22))
}

/// Dual K-matrix K^+(u) at explicit crossing parameter eta, with
/// xi_bar = xi + eta*delta truncated at first order.
pub fn k_plus_eta(u: C64, eta: C64, params: &ModelParams) -> Result<DenseOperator> {
    let eps = params.tol.eps_degenerate;
    let (l1, l2) = (params.lambda1, params.lambda2);
    let xb = params.xi_bar(eta);
    let s1 = sin_guarded(l1 + xb - u - eta, eps, "k_plus")?;
    let s2 = sin_guarded(l2 + xb - u - eta, eps, "k_plus")?;
    let den = 2.0 * s1 * s2;
    let cm = (l1 - l2).cos();
    let cp = (l1 + l2 + 2.0 * xb).cos();
    let i = C64::i();
    let k11 = (cm * expi(-eta) - cp * expi(2.0 * u + eta)) / den;
    let k12 = i * (2.0 * u + 2.0 * eta).sin() * expi(-(l1 + l2)) * expi(u - eta) / den;
    let k21 = -i * (2.0 * u + 2.0 * eta).sin() * expi(l1 + l2) * expi(u + eta) / den;
    let k22 = (cm * expi(2.0 * u + eta) - cp * expi(-eta)) / den;
    Ok(DenseOperator::two_by_two(k11, k12, k21, k22))
}

/// K^+(u) at the model's eta.
pub fn k_plus(u: C64, params: &ModelParams) -> Result<DenseOperator> {
    k_plus_eta(u, params.eta, params)
}

/// Residual of the reflection equation for K^- at (u1, u2).
pub fn check_re(u1: C64, u2: C64, params: &ModelParams) -> Result<f64> {
    let eps = params.tol.eps_degenerate;
    let eta = params.eta;
    let k1 = embed_site(&k_minus(u1, params)?, 1, 2)?;
    let k2 = embed_site(&k_minus(u2, params)?, 2, 2)?;
    let r12_m = r_matrix(u1 - u2, eta, eps)?;
    let r21_m = r_matrix_swapped(u1 - u2, eta, eps)?;
    let r12_p = r_matrix(u1 + u2, eta, eps)?;
    let r21_p = r_matrix_swapped(u1 + u2, eta, eps)?;
    let lhs = r12_m.matmul(&k1).matmul(&r21_p).matmul(&k2);
    let rhs = k2.matmul(&r12_p).matmul(&k1).matmul(&r21_m);
    Ok(lhs.sub(&rhs).frobenius_norm())
}

/// Residual of the dual reflection equation for explicit K^+ factors,
/// allowing the two factors to be built with different parameters.
pub fn dual_re_residual_of(
    u1: C64,
    u2: C64,
    kplus1: &DenseOperator,
    kplus2: &DenseOperator,
    eta: C64,
    eps: f64,
) -> Result<f64> {
    let k1 = embed_site(kplus1, 1, 2)?;
    let k2 = embed_site(kplus2, 2, 2)?;
    let r12_m = r_matrix(u2 - u1, eta, eps)?;
    let r21_m = r_matrix_swapped(u2 - u1, eta, eps)?;
    let r12_p = r_matrix(-u1 - u2 - 2.0 * eta, eta, eps)?;
    let r21_p = r_matrix_swapped(-u1 - u2 - 2.0 * eta, eta, eps)?;
    let lhs = r12_m.matmul(&k1).matmul(&r21_p).matmul(&k2);
    let rhs = k2.matmul(&r12_p).matmul(&k1).matmul(&r21_m);
    Ok(lhs.sub(&rhs).frobenius_norm())
}

/// Residual of the dual reflection equation for K^+ at (u1, u2).
pub fn check_dual_re(u1: C64, u2: C64, params: &ModelParams) -> Result<f64> {
    let kp1 = k_plus(u1, params)?;
    let kp2 = k_plus(u2, params)?;
    dual_re_residual_of(u1, u2, &kp1, &kp2, params.eta, params.tol.eps_degenerate)
}

/// || K^+(u; eta) K^-(u) - id ||, which vanishes linearly as eta -> 0.
pub fn classical_limit_residual(u: C64, eta: C64, params: &ModelParams) -> Result<f64> {
    let prod = k_plus_eta(u, eta, params)?.matmul(&k_minus(u, params)?);
    Ok(prod.sub(&DenseOperator::identity(2)).frobenius_norm())
}

/// One-row monodromy T(u) = R_{0N}(u - z_N) ... R_{01}(u - z_1) on the
/// (N+1)-factor space with the auxiliary space as the first (most
/// significant) factor.
pub fn monodromy_eta(u: C64, eta: C64, params: &ModelParams) -> Result<DenseOperator> {
    let n = params.n_sites;
    let eps = params.tol.eps_degenerate;
    let dim = 1usize << (n + 1);
    let mut t = DenseOperator::identity(dim);
    for j in (1..=n).rev() {
        // left-to-right: R_{0N} first
        let r = r_matrix(u - params.z[j - 1], eta, eps)?;
        let emb = embed_two_site(&r, 1, j + 1, n + 1)?;
        t = t.matmul(&emb);
    }
    Ok(t)
}

/// T(u) at the model's eta.
pub fn monodromy(u: C64, params: &ModelParams) -> Result<DenseOperator> {
    monodromy_eta(u, params.eta, params)
}

/// T-hat(u) = T(-u)^{-1}. Unitarity gives the inverse in closed form as
/// the reversed product R_{01}(u + z_1) ... R_{0N}(u + z_N), which stays
/// accurate where the LU inverse of T(-u) loses cond(T) * eps digits (the
/// per-factor condition numbers multiply along the chain). The one-norm
/// condition estimate of the inversion is still returned for logging.
pub fn monodromy_hat_eta(u: C64, eta: C64, params: &ModelParams) -> Result<(DenseOperator, f64)> {
    let n = params.n_sites;
    let eps = params.tol.eps_degenerate;
    let dim = 1usize << (n + 1);
    let mut t_hat = DenseOperator::identity(dim);
    for j in 1..=n {
        let r = r_matrix(u + params.z[j - 1], eta, eps)?;
        t_hat = t_hat.matmul(&embed_two_site(&r, 1, j + 1, n + 1)?);
    }
    let cond = (monodromy_eta(-u, eta, params)?.one_norm() * t_hat.one_norm()).max(1.0);
    Ok((t_hat, cond))
}

/// Double-row monodromy T(u) K^-_0(u) T-hat(u).
pub fn double_row_monodromy_eta(u: C64, eta: C64, params: &ModelParams) -> Result<DenseOperator> {
    let n = params.n_sites;
    let t = monodromy_eta(u, eta, params)?;
    let (t_hat, cond) = monodromy_hat_eta(u, eta, params)?;
    if cond > params.tol.cond_warn {
        eprintln!(
            "warning: monodromy inversion at u = {:.4}{:+.4}i has condition estimate {:.3e}",
            u.re, u.im, cond
        );
    }
    let k0 = embed_site(&k_minus(u, params)?, 1, n + 1)?;
    Ok(t.matmul(&k0).matmul(&t_hat))
}

pub fn double_row_monodromy(u: C64, params: &ModelParams) -> Result<DenseOperator> {
    double_row_monodromy_eta(u, params.eta, params)
}

/// Double-row transfer matrix tau(u) = tr_0( K^+_0(u) T(u) ), a 2^N x 2^N
/// operator on the chain space.
pub fn transfer_eta(u: C64, eta: C64, params: &ModelParams) -> Result<DenseOperator> {
    let n = params.n_sites;
    let dr = double_row_monodromy_eta(u, eta, params)?;
    let kp = embed_site(&k_plus_eta(u, eta, params)?, 1, n + 1)?;
    Ok(kp.matmul(&dr).partial_trace_first(2))
}

pub fn transfer(u: C64, params: &ModelParams) -> Result<DenseOperator> {
    transfer_eta(u, params.eta, params)
}

/// Relative commutator norm ||[tau(u), tau(v)]|| / (||tau(u)|| ||tau(v)||).
pub fn transfer_commutator_rel(u: C64, v: C64, params: &ModelParams) -> Result<f64> {
    let tu = transfer(u, params)?;
    let tv = transfer(v, params)?;
    let num = tu.commutator(&tv).frobenius_norm();
    Ok(num / (tu.frobenius_norm() * tv.frobenius_norm()))
}

/// Residual of the reflection-algebra relation satisfied by the double-row
/// monodromy, checked on two auxiliary spaces tensored with the chain.
pub fn double_row_re_residual(u: C64, v: C64, params: &ModelParams) -> Result<f64> {
    let n = params.n_sites;
    let qdim = 1usize << n;
    let eta = params.eta;
    let eps = params.tol.eps_degenerate;
    let id_q = DenseOperator::identity(qdim);
    let lift = |w: &DenseOperator, first: bool| -> DenseOperator {
        // w acts on aux (x) Q; lift to aux1 (x) aux2 (x) Q.
        let dim = 4 * qdim;
        let mut out = DenseOperator::zeros(dim);
        for a in 0..2usize {
            for b in 0..2usize {
                let blk = w.aux_block(a, b);
                for o in 0..2usize {
                    let (r1, r2) = if first { (a, o) } else { (o, a) };
                    let (c1, c2) = if first { (b, o) } else { (o, b) };
                    for r in 0..qdim {
                        for c in 0..qdim {
                            let v = blk.get(r, c);
                            if v.norm_sqr() == 0.0 {
                                continue;
                            }
                            let row = (r1 * 2 + r2) * qdim + r;
                            let col = (c1 * 2 + c2) * qdim + c;
                            out.set(row, col, out.get(row, col) + v);
                        }
                    }
                }
            }
        }
        out
    };
    let t1 = lift(&double_row_monodromy(u, params)?, true);
    let t2 = lift(&double_row_monodromy(v, params)?, false);
    let r12_m = r_matrix(u - v, eta, eps)?.kron(&id_q);
    let r21_m = r_matrix_swapped(u - v, eta, eps)?.kron(&id_q);
    let r12_p = r_matrix(u + v, eta, eps)?.kron(&id_q);
    let r21_p = r_matrix_swapped(u + v, eta, eps)?.kron(&id_q);
    let lhs = r12_m.matmul(&t1).matmul(&r21_p).matmul(&t2);
    let rhs = t2.matmul(&r12_p).matmul(&t1).matmul(&r21_m);
    Ok(lhs.sub(&rhs).frobenius_norm() / lhs.frobenius_norm().max(1.0))
}

/// Guard helper: true when every argument stays at least `margin` away from
/// the zeros of sine (mod pi), i.e. the evaluation is safely off-pole.
pub fn off_poles(args: &[C64], margin: f64) -> bool {
    args.iter().all(|a| a.sin().norm() >= margin)
}
