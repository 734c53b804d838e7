//! Determinant representations of the boundary partition functions
//! Z^(1), Z^(2) and the scalar products S^{1,2}, S^{2,1}, S^{1,1}, S^{2,2},
//! together with the recursive evaluation and brute-force tensor-space
//! oracles for all of them.

use num_complex::Complex64 as C64;

use crate::bethe::{
    b_coefficient, c_coefficient, dual_vacuum, op_b, op_c, vacuum, BetheRootSet, Kind,
};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::tensor::{sigma_minus, sigma_plus, sin_guarded, DenseOperator, StateVector};

/// Brute-force dimension cap (chain sites).
pub const BRUTEFORCE_SITE_CAP: usize = 12;

/// How a scalar-product value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Determinant,
    Bruteforce,
    Recursion,
}

/// A scalar-product or partition-function value with provenance and the
/// condition estimate of the determinant (1 for non-determinant methods).
#[derive(Debug, Clone)]
pub struct ScalarProductResult {
    pub value: C64,
    pub method: Method,
    pub condition_estimate: f64,
}

impl ScalarProductResult {
    fn plain(value: C64, method: Method) -> Self {
        ScalarProductResult {
            value,
            method,
            condition_estimate: 1.0,
        }
    }

    /// Flagged when the determinant's condition estimate exceeds the
    /// configured threshold.
    pub fn is_ill_conditioned(&self, params: &ModelParams) -> bool {
        self.condition_estimate > params.tol.cond_ill
    }
}

/// Relative-error metric used for every oracle comparison:
/// |a - b| / max(|a|, |b|, 1).
pub fn relative_error(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn check_pairwise(list: &[C64], eps: f64, context: &'static str) -> Result<()> {
    for a in 0..list.len() {
        for b in (a + 1)..list.len() {
            let d = (list[a] - list[b]).sin().norm();
            let s = (list[a] + list[b]).sin().norm();
            if d < eps || s < eps {
                return Err(Error::Degenerate {
                    context,
                    detail: format!(
                        "entries {a}, {b}: |sin(x_a-x_b)| = {d:.3e}, |sin(x_a+x_b)| = {s:.3e}"
                    ),
                });
            }
        }
    }
    Ok(())
}

/// Per-site expansion coefficient of the kind's tilde operator: tilde-C for
/// kind 1, tilde-B for kind 2.
fn tilde_coefficient(kind: Kind, u: C64, z: C64, params: &ModelParams) -> Result<C64> {
    match kind {
        Kind::One => c_coefficient(u, z, params),
        Kind::Two => b_coefficient(u, z, params),
    }
}

/// Entry (alpha, j) of the partition-function matrix for the given kind.
fn partition_matrix_entry(kind: Kind, u: C64, z: C64, params: &ModelParams) -> Result<C64> {
    let eps = params.tol.eps_degenerate;
    let (l1, l2, xi) = (params.lambda1, params.lambda2, params.xi);
    let dm = sin_guarded(u - z, eps, "partition matrix sin(u-z)")?;
    let dp = sin_guarded(u + z, eps, "partition matrix sin(u+z)")?;
    let (num, den) = match kind {
        Kind::One => (
            (l1 + xi - z).sin() * (l2 + xi + z).sin(),
            sin_guarded(l1 + xi + u, eps, "partition matrix sin(l1+xi+u)")?
                * sin_guarded(l2 + xi + u, eps, "partition matrix sin(l2+xi+u)")?,
        ),
        Kind::Two => (
            (l1 + xi + z).sin() * (l2 + xi - z).sin(),
            sin_guarded(l1 + xi - u, eps, "partition matrix sin(l1+xi-u)")?
                * sin_guarded(l2 + xi - u, eps, "partition matrix sin(l2+xi-u)")?,
        ),
    };
    Ok(num * (2.0 * u).sin() / (den * dm * dp * dm * dp))
}

fn partition_preconditions(ubar: &[C64], zs: &[C64], params: &ModelParams) -> Result<()> {
    if ubar.is_empty() || zs.is_empty() {
        return Err(Error::InvalidParams("empty argument list".into()));
    }
    let eps = params.tol.eps_degenerate;
    check_pairwise(ubar, eps, "partition spectral parameters")?;
    check_pairwise(zs, eps, "partition inhomogeneities")?;
    Ok(())
}

/// Partition function Z^(k) over the sites `zs` from the determinant
/// representation. `zs` need not be the full chain: sub-lattices and odd
/// site counts are meaningful here.
pub fn partition_det(
    kind: Kind,
    ubar: &[C64],
    zs: &[C64],
    params: &ModelParams,
) -> Result<ScalarProductResult> {
    partition_preconditions(ubar, zs, params)?;
    if ubar.len() != zs.len() {
        return Err(Error::InvalidParams(format!(
            "determinant needs equal list lengths, got {} spectral vs {} sites",
            ubar.len(),
            zs.len()
        )));
    }
    let n = ubar.len();
    let mut matrix = DenseOperator::zeros(n);
    for (a, &u) in ubar.iter().enumerate() {
        for (j, &z) in zs.iter().enumerate() {
            matrix.set(a, j, partition_matrix_entry(kind, u, z, params)?);
        }
    }
    let det = matrix.det();
    let cond = matrix.condition_one_norm();

    let mut prefactor = C64::new(1.0, 0.0);
    for &u in ubar {
        for &z in zs {
            prefactor *= (u + z).sin() * (u - z).sin();
        }
    }
    let mut denom = C64::new(1.0, 0.0);
    for a in 0..n {
        for b in 0..a {
            // alpha > beta
            denom *= (ubar[a] - ubar[b]).sin() * (ubar[a] + ubar[b]).sin();
        }
    }
    for k in 0..n {
        for j in (k + 1)..n {
            denom *= (zs[k] - zs[j]).sin() * (zs[k] + zs[j]).sin();
        }
    }
    Ok(ScalarProductResult {
        value: prefactor * det / denom,
        method: Method::Determinant,
        condition_estimate: cond,
    })
}

/// Partition function by the site-peeling recursion: expand the last
/// spectral parameter over the site it excites, base case Z_0 = 1.
pub fn partition_recursive(
    kind: Kind,
    ubar: &[C64],
    zs: &[C64],
    params: &ModelParams,
) -> Result<ScalarProductResult> {
    partition_preconditions(ubar, zs, params)?;
    if ubar.len() != zs.len() {
        return Err(Error::InvalidParams(format!(
            "recursion needs equal list lengths, got {} spectral vs {} sites",
            ubar.len(),
            zs.len()
        )));
    }
    fn go(kind: Kind, ubar: &[C64], zs: &[C64], params: &ModelParams) -> Result<C64> {
        let n = ubar.len();
        if n == 0 {
            return Ok(C64::new(1.0, 0.0));
        }
        let u_last = ubar[n - 1];
        let rest = &ubar[..n - 1];
        let mut total = C64::new(0.0, 0.0);
        for i in 0..n {
            let coeff = tilde_coefficient(kind, u_last, zs[i], params)?;
            let sub_z: Vec<C64> = zs
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, &z)| z)
                .collect();
            total += coeff * go(kind, rest, &sub_z, params)?;
        }
        Ok(total)
    }
    Ok(ScalarProductResult::plain(
        go(kind, ubar, zs, params)?,
        Method::Recursion,
    ))
}

/// Tilde ladder operator over an explicit site list (sigma^+ for kind 1,
/// sigma^- for kind 2) with the kind's expansion coefficients.
fn tilde_op_on(kind: Kind, u: C64, zs: &[C64], params: &ModelParams) -> Result<DenseOperator> {
    let n = zs.len();
    let mut out = DenseOperator::zeros(1 << n);
    let local = match kind {
        Kind::One => sigma_plus(),
        Kind::Two => sigma_minus(),
    };
    for (i, &z) in zs.iter().enumerate() {
        let c = tilde_coefficient(kind, u, z, params)?;
        crate::tensor::add_embedded_site(&mut out, &local, i + 1, n, c)?;
    }
    Ok(out)
}

/// Partition function by direct contraction of the dense tilde operators
/// against the polarized states. List lengths may differ; the spin-count
/// selection rule then gives an exact zero.
pub fn partition_bruteforce(
    kind: Kind,
    ubar: &[C64],
    zs: &[C64],
    params: &ModelParams,
) -> Result<ScalarProductResult> {
    partition_preconditions(ubar, zs, params)?;
    let n = zs.len();
    if n > BRUTEFORCE_SITE_CAP {
        return Err(Error::DimensionCap {
            n_sites: n,
            cap: BRUTEFORCE_SITE_CAP,
        });
    }
    let dim = 1usize << n;
    let (mut state, out_index) = match kind {
        // <up...| prod tilde-C |down...>
        Kind::One => (StateVector::all_down(n), 0),
        // <down...| prod tilde-B |up...>
        Kind::Two => (StateVector::all_up(n), dim - 1),
    };
    for &u in ubar {
        state = tilde_op_on(kind, u, zs, params)?.apply(&state);
    }
    Ok(ScalarProductResult::plain(
        state.get(out_index),
        Method::Bruteforce,
    ))
}

fn concat_args(u_list: &[C64], v_list: &[C64], params: &ModelParams) -> Result<Vec<C64>> {
    if u_list.len() + v_list.len() != params.n_sites {
        return Err(Error::InvalidParams(format!(
            "combined argument list has {} entries, chain has {} sites",
            u_list.len() + v_list.len(),
            params.n_sites
        )));
    }
    Ok(u_list.iter().chain(v_list.iter()).copied().collect())
}

/// Scalar product S^{1,2} = Z^(1) on the concatenated argument list.
pub fn s12(u_list: &[C64], v_list: &[C64], params: &ModelParams) -> Result<ScalarProductResult> {
    let ubar = concat_args(u_list, v_list, params)?;
    partition_det(Kind::One, &ubar, &params.z, params)
}

/// Scalar product S^{2,1} = Z^(2) on the concatenated argument list.
pub fn s21(u_list: &[C64], v_list: &[C64], params: &ModelParams) -> Result<ScalarProductResult> {
    let ubar = concat_args(u_list, v_list, params)?;
    partition_det(Kind::Two, &ubar, &params.z, params)
}

fn require_on_shell(roots: &BetheRootSet, expected: Kind, params: &ModelParams) -> Result<()> {
    if roots.kind != expected {
        return Err(Error::InvalidParams(format!(
            "root set of kind {} where kind {} is required",
            roots.kind.index(),
            expected.index()
        )));
    }
    let res = crate::bethe::ba_residual(roots.kind, &roots.roots, params)?;
    let norm = res.iter().map(|r| r.norm()).fold(0.0, f64::max);
    if norm > params.tol.tol_onshell {
        return Err(Error::OffShell {
            residual: norm,
            tol: params.tol.tol_onshell,
        });
    }
    Ok(())
}

/// The F^(k)_j function entering the S^{k,k} determinants. The bracket's
/// root sum excludes k = j, the function's own index; the bracket then
/// reduces to the j-th Bethe residual as u -> v_j, cancelling the double
/// pole of the prefactor on shell.
pub fn f_factor(
    kind: Kind,
    j: usize,
    u_alpha: C64,
    roots: &BetheRootSet,
    params: &ModelParams,
) -> Result<C64> {
    require_on_shell(roots, kind, params)?;
    let eps = params.tol.eps_degenerate;
    let (l1, l2, xi) = (params.lambda1, params.lambda2, params.xi);
    let v = &roots.roots;
    let m = v.len();
    if j == 0 || j > m {
        return Err(Error::Index(format!(
            "F index j = {j} out of range 1..={m}"
        )));
    }
    let u = u_alpha;
    let boundary = match kind {
        Kind::One => (l1 + xi - u).sin() * (l2 + xi - u).sin(),
        Kind::Two => (l1 + xi + u).sin() * (l2 + xi + u).sin(),
    };
    let mut root_products = C64::new(1.0, 0.0);
    for &vk in v {
        root_products *= (vk - u).sin() * (vk + u).sin();
    }
    let dm = sin_guarded(v[j - 1] - u, eps, "F denominator sin(v_j-u)")?;
    let dp = sin_guarded(v[j - 1] + u, eps, "F denominator sin(v_j+u)")?;

    let (w1, w2) = match kind {
        Kind::One => (
            C64::new(1.0, 0.0) - params.delta,
            C64::new(1.0, 0.0) + params.delta,
        ),
        Kind::Two => (
            C64::new(1.0, 0.0) + params.delta,
            C64::new(1.0, 0.0) - params.delta,
        ),
    };
    let b1 = sin_guarded(l1 + xi + u, eps, "F bracket sin(l1+xi+u)")?
        * sin_guarded(l1 + xi - u, eps, "F bracket sin(l1+xi-u)")?;
    let b2 = sin_guarded(l2 + xi + u, eps, "F bracket sin(l2+xi+u)")?
        * sin_guarded(l2 + xi - u, eps, "F bracket sin(l2+xi-u)")?;
    let mut bracket = w1 / b1 + w2 / b2;
    for &z in &params.z {
        let zm = sin_guarded(u - z, eps, "F bracket sin(u-z_k)")?;
        let zp = sin_guarded(u + z, eps, "F bracket sin(u+z_k)")?;
        bracket += C64::new(1.0, 0.0) / (zm * zp);
    }
    for (k, &vk) in v.iter().enumerate() {
        if k + 1 == j {
            continue;
        }
        let rm = sin_guarded(u - vk, eps, "F bracket sin(u-v_k)")?;
        let rp = sin_guarded(u + vk, eps, "F bracket sin(u+v_k)")?;
        bracket -= C64::new(2.0, 0.0) / (rm * rp);
    }
    Ok(boundary * root_products / (dm * dp * dm * dp) * bracket)
}

fn s_kk_det(
    kind: Kind,
    u_list: &[C64],
    roots: &BetheRootSet,
    params: &ModelParams,
) -> Result<ScalarProductResult> {
    require_on_shell(roots, kind, params)?;
    let eps = params.tol.eps_degenerate;
    let v = &roots.roots;
    let m = v.len();
    if u_list.len() != m {
        return Err(Error::InvalidParams(format!(
            "need {} spectral parameters, got {}",
            m,
            u_list.len()
        )));
    }
    check_pairwise(u_list, eps, "S^{k,k} spectral parameters")?;
    // the u's must stay away from the roots: the F denominators are
    // double poles there
    for (a, &u) in u_list.iter().enumerate() {
        for (j, &vj) in v.iter().enumerate() {
            let d = (vj - u).sin().norm().min((vj + u).sin().norm());
            if d < eps {
                return Err(Error::Degenerate {
                    context: "S^{k,k} arguments",
                    detail: format!("u_{a} within {d:.3e} of root v_{j}"),
                });
            }
        }
    }
    let (l1, l2, xi) = (params.lambda1, params.lambda2, params.xi);
    let mut matrix = DenseOperator::zeros(m);
    for (a, &u) in u_list.iter().enumerate() {
        for (j, &vj) in v.iter().enumerate() {
            let f = f_factor(kind, j + 1, u, roots, params)?;
            let den = match kind {
                Kind::One => {
                    sin_guarded(l2 + xi - vj, eps, "S^{1,1} matrix sin(l2+xi-v_j)")?
                        * sin_guarded(l1 + xi - vj, eps, "S^{1,1} matrix sin(l1+xi-v_j)")?
                }
                Kind::Two => {
                    sin_guarded(l2 + xi + vj, eps, "S^{2,2} matrix sin(l2+xi+v_j)")?
                        * sin_guarded(l1 + xi + vj, eps, "S^{2,2} matrix sin(l1+xi+v_j)")?
                }
            };
            matrix.set(a, j, (2.0 * vj).sin() * (2.0 * u).sin() * f / den);
        }
    }
    let det = matrix.det();
    let cond = matrix.condition_one_norm();
    let mut denom = C64::new(1.0, 0.0);
    for k in 0..m {
        for j in (k + 1)..m {
            denom *= (u_list[k] - u_list[j]).sin() * (u_list[k] + u_list[j]).sin();
        }
    }
    for a in 0..m {
        for b in 0..a {
            denom *= (v[a] - v[b]).sin() * (v[a] + v[b]).sin();
        }
    }
    Ok(ScalarProductResult {
        value: det / denom,
        method: Method::Determinant,
        condition_estimate: cond,
    })
}

/// Determinant representation of S^{1,1} for on-shell kind-1 roots.
pub fn s11_det(
    u_list: &[C64],
    roots: &BetheRootSet,
    params: &ModelParams,
) -> Result<ScalarProductResult> {
    s_kk_det(Kind::One, u_list, roots, params)
}

/// Determinant representation of S^{2,2} for on-shell kind-2 roots.
pub fn s22_det(
    u_list: &[C64],
    roots: &BetheRootSet,
    params: &ModelParams,
) -> Result<ScalarProductResult> {
    s_kk_det(Kind::Two, u_list, roots, params)
}

/// Both direct contractions of a same-kind scalar product: the tilde form
/// between polarized states and the original gauged form between the
/// pseudo-vacua. The gauged form carries the vacuum overlap as an overall
/// factor, so the comparable value is `gauged_raw / vacuum_overlap`.
#[derive(Debug, Clone)]
pub struct BruteforcePair {
    pub tilde: ScalarProductResult,
    pub gauged_raw: C64,
    pub vacuum_overlap: C64,
}

impl BruteforcePair {
    pub fn gauged_normalized(&self) -> C64 {
        self.gauged_raw / self.vacuum_overlap
    }

    /// Relative disagreement between the two contraction routes.
    pub fn route_disagreement(&self) -> f64 {
        relative_error(self.tilde.value, self.gauged_normalized())
    }
}

fn s_kk_bruteforce(
    kind: Kind,
    u_list: &[C64],
    v_list: &[C64],
    params: &ModelParams,
) -> Result<BruteforcePair> {
    let n = params.n_sites;
    if n > BRUTEFORCE_SITE_CAP {
        return Err(Error::DimensionCap {
            n_sites: n,
            cap: BRUTEFORCE_SITE_CAP,
        });
    }
    let dim = 1usize << n;
    // tilde form: <up| C~(u_1)...C~(u_M) B~(v_1)...B~(v_M) |up> for kind 1,
    // <down| B~(u_1)...B~(u_M) C~(v_1)...C~(v_M) |down> for kind 2.
    let (mut state, out_index, creation, annihilation) = match kind {
        Kind::One => (StateVector::all_up(n), 0usize, Kind::Two, Kind::One),
        Kind::Two => (StateVector::all_down(n), dim - 1, Kind::One, Kind::Two),
    };
    for &v in v_list.iter().rev() {
        state = tilde_op_on(creation, v, &params.z, params)?.apply(&state);
    }
    for &u in u_list.iter().rev() {
        state = tilde_op_on(annihilation, u, &params.z, params)?.apply(&state);
    }
    let tilde = ScalarProductResult::plain(state.get(out_index), Method::Bruteforce);

    // gauged form: <Omega| C(u_M)...C(u_1) B(v_1)...B(v_M) |Omega> for
    // kind 1 and the B/C swap for kind 2.
    let mut ket = vacuum(kind, params);
    for &v in v_list.iter().rev() {
        let op = match kind {
            Kind::One => op_b(v, params)?,
            Kind::Two => op_c(v, params)?,
        };
        ket = op.apply(&ket);
    }
    for &u in u_list {
        let op = match kind {
            Kind::One => op_c(u, params)?,
            Kind::Two => op_b(u, params)?,
        };
        ket = op.apply(&ket);
    }
    let bra = dual_vacuum(kind, params)?;
    let gauged_raw = bra.bilinear_pairing(&ket);
    let vacuum_overlap = bra.bilinear_pairing(&vacuum(kind, params));
    Ok(BruteforcePair {
        tilde,
        gauged_raw,
        vacuum_overlap,
    })
}

/// Brute-force S^{1,1}: both the tilde and the gauged contraction.
pub fn s11_bruteforce(
    u_list: &[C64],
    v_list: &[C64],
    params: &ModelParams,
) -> Result<BruteforcePair> {
    s_kk_bruteforce(Kind::One, u_list, v_list, params)
}

/// Brute-force S^{2,2}: both the tilde and the gauged contraction.
pub fn s22_bruteforce(
    u_list: &[C64],
    v_list: &[C64],
    params: &ModelParams,
) -> Result<BruteforcePair> {
    s_kk_bruteforce(Kind::Two, u_list, v_list, params)
}

/// Intermediate function G^(i): the partially contracted scalar product
/// with `i` annihilation arguments applied and M - i spins pinned down at
/// `down_sites` (1-based site labels).
pub fn intermediate_g(
    u_prefix: &[C64],
    down_sites: &[usize],
    roots: &BetheRootSet,
    params: &ModelParams,
) -> Result<C64> {
    let n = params.n_sites;
    let m = params.m_roots();
    if n > BRUTEFORCE_SITE_CAP {
        return Err(Error::DimensionCap {
            n_sites: n,
            cap: BRUTEFORCE_SITE_CAP,
        });
    }
    if roots.roots.len() != m {
        return Err(Error::InvalidParams(format!(
            "need M = {m} roots, got {}",
            roots.roots.len()
        )));
    }
    if u_prefix.len() + down_sites.len() != m {
        return Err(Error::Index(format!(
            "i = {} arguments with {} pinned sites does not partition M = {m}",
            u_prefix.len(),
            down_sites.len()
        )));
    }
    let mut mask = 0usize;
    for &s in down_sites {
        if s == 0 || s > n {
            return Err(Error::Index(format!("site {s} out of range 1..={n}")));
        }
        let bit = 1usize << (n - s);
        if mask & bit != 0 {
            return Err(Error::Index(format!("site {s} listed twice")));
        }
        mask |= bit;
    }
    let mut state = StateVector::all_up(n);
    for &v in roots.roots.iter().rev() {
        state = tilde_op_on(Kind::Two, v, &params.z, params)?.apply(&state);
    }
    for &u in u_prefix {
        state = tilde_op_on(Kind::One, u, &params.z, params)?.apply(&state);
    }
    Ok(state.get(mask))
}
