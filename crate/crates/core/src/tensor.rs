//! Dense complex tensor algebra on (C^2)^(x)N: operators, state vectors,
//! site embeddings, Pauli matrices, the permutation operator, and the
//! gauge-transformed spin operators.
//!
//! Conventions: site 1 is the leftmost (most significant) tensor factor.
//! Basis index b enumerates spins through its binary expansion with the
//! site-1 bit most significant; bit 0 is spin up, bit 1 is spin down.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// e^{iu} for complex u (principal branch through the exponential).
pub fn expi(u: C64) -> C64 {
    (C64::i() * u).exp()
}

/// cos(u)/sin(u) for complex u.
pub fn cot(u: C64) -> C64 {
    u.cos() / u.sin()
}

/// sin(u), raising a pole error when |sin(u)| falls below `eps`.
pub fn sin_guarded(u: C64, eps: f64, context: &'static str) -> Result<C64> {
    let s = u.sin();
    if s.norm() < eps {
        return Err(Error::Pole {
            context,
            argument: format!("{:.6}{:+.6}i", u.re, u.im),
            magnitude: s.norm(),
        });
    }
    Ok(s)
}

/// Which ladder operator, sigma^+ or sigma^-.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Square complex matrix with explicit dimension metadata. Row-major.
#[derive(Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<C64>,
}

impl std::fmt::Debug for DenseOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "DenseOperator(dim = {})", self.dim)?;
        if self.dim <= 8 {
            for r in 0..self.dim {
                for c in 0..self.dim {
                    let e = self.get(r, c);
                    write!(f, " {:+.4}{:+.4}i", e.re, e.im)?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl DenseOperator {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidParams("operator dim 0".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidParams(format!(
                "operator entries {} != dim^2 = {}",
                entries.len(),
                dim * dim
            )));
        }
        if entries
            .iter()
            .any(|e| !e.re.is_finite() || !e.im.is_finite())
        {
            return Err(Error::InvalidParams("non-finite operator entry".into()));
        }
        Ok(DenseOperator { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1);
        DenseOperator {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.entries[r * dim + c] = f(r, c);
            }
        }
        m
    }

    /// 2x2 matrix from rows.
    pub fn two_by_two(a: C64, b: C64, c: C64, d: C64) -> Self {
        DenseOperator {
            dim: 2,
            entries: vec![a, b, c, d],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.entries[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.entries[r * self.dim + c] = v;
    }

    pub fn add_assign_scaled(&mut self, other: &DenseOperator, s: C64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.entries.iter_mut().zip(other.entries.iter()) {
            *a += s * b;
        }
    }

    pub fn scale(&self, s: C64) -> DenseOperator {
        DenseOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|e| s * e).collect(),
        }
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim);
        DenseOperator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim);
        DenseOperator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let row_b = &other.entries[k * n..(k + 1) * n];
                let row_o = &mut out[r * n..(r + 1) * n];
                for c in 0..n {
                    row_o[c] += a * row_b[c];
                }
            }
        }
        DenseOperator {
            dim: n,
            entries: out,
        }
    }

    pub fn commutator(&self, other: &DenseOperator) -> DenseOperator {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut out = vec![C64::new(0.0, 0.0); dim * dim];
        for r1 in 0..n {
            for c1 in 0..n {
                let a = self.entries[r1 * n + c1];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for r2 in 0..m {
                    for c2 in 0..m {
                        out[(r1 * m + r2) * dim + (c1 * m + c2)] = a * other.entries[r2 * m + c2];
                    }
                }
            }
        }
        DenseOperator { dim, entries: out }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|c| (0..n).map(|r| self.entries[r * n + c].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.dim, v.dim, "dimension mismatch in apply");
        let n = self.dim;
        let out: Vec<C64> = (0..n)
            .map(|r| {
                let row = &self.entries[r * n..(r + 1) * n];
                row.iter().zip(v.entries.iter()).map(|(a, x)| a * x).sum()
            })
            .collect();
        StateVector {
            dim: n,
            entries: out,
        }
    }

    /// Row-vector times matrix, for bra-side contractions (no conjugation).
    pub fn apply_left(&self, row: &StateVector) -> StateVector {
        assert_eq!(self.dim, row.dim);
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let a = row.entries[k];
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let row_m = &self.entries[k * n..(k + 1) * n];
            for c in 0..n {
                out[c] += a * row_m[c];
            }
        }
        StateVector {
            dim: n,
            entries: out,
        }
    }

    /// Partial trace over the first tensor factor of dimension `d_first`,
    /// for an operator on a space of dimension d_first * d_rest.
    pub fn partial_trace_first(&self, d_first: usize) -> DenseOperator {
        assert_eq!(self.dim % d_first, 0);
        let d_rest = self.dim / d_first;
        let mut out = DenseOperator::zeros(d_rest);
        for a in 0..d_first {
            for q in 0..d_rest {
                for q2 in 0..d_rest {
                    let v = self.get(a * d_rest + q, a * d_rest + q2);
                    let cur = out.get(q, q2);
                    out.set(q, q2, cur + v);
                }
            }
        }
        out
    }

    /// Block (i, j) of an operator on a 2 x d space viewed as 2x2 blocks of
    /// d x d operators (auxiliary space is the first, most significant factor).
    pub fn aux_block(&self, i: usize, j: usize) -> DenseOperator {
        assert_eq!(self.dim % 2, 0);
        assert!(i < 2 && j < 2);
        let d = self.dim / 2;
        DenseOperator::from_fn(d, |r, c| self.get(i * d + r, j * d + c))
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> LuFactors {
        let n = self.dim;
        let mut lu = self.entries.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot: f64 = 0.0;
        for k in 0..n {
            // pivot search on column k
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for r in (k + 1)..n {
                let v = lu[r * n + k].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                piv.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[k * n + k];
            let pn = pivot.norm();
            min_pivot = min_pivot.min(pn);
            max_pivot = max_pivot.max(pn);
            if pn == 0.0 {
                continue; // singular; remaining multipliers stay zero
            }
            for r in (k + 1)..n {
                let m = lu[r * n + k] / pivot;
                lu[r * n + k] = m;
                if m.norm_sqr() == 0.0 {
                    continue;
                }
                for c in (k + 1)..n {
                    let v = lu[k * n + c];
                    lu[r * n + c] -= m * v;
                }
            }
        }
        LuFactors {
            dim: n,
            lu,
            piv,
            swaps,
            min_pivot,
            max_pivot,
        }
    }

    /// Determinant via LU. Singular matrices give 0 rather than an error.
    pub fn det(&self) -> C64 {
        self.lu().det()
    }

    /// Inverse via LU; errors when a pivot falls below `eps_pivot` relative
    /// to the largest pivot.
    pub fn inverse(&self, eps_pivot: f64, context: &'static str) -> Result<DenseOperator> {
        let f = self.lu();
        if f.max_pivot == 0.0 || f.min_pivot < eps_pivot * f.max_pivot {
            return Err(Error::SingularMatrix {
                context,
                pivot: f.min_pivot,
            });
        }
        let n = self.dim;
        let mut inv = DenseOperator::zeros(n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            for x in col.iter_mut() {
                *x = C64::new(0.0, 0.0);
            }
            col[j] = C64::new(1.0, 0.0);
            let sol = f.solve(&col);
            for (r, v) in sol.into_iter().enumerate() {
                inv.set(r, j, v);
            }
        }
        Ok(inv)
    }

    /// LU inverse followed by one Newton refinement step
    /// X <- X (2I - A X), which knocks the inversion error down to the
    /// level of the matrix products themselves.
    pub fn inverse_refined(&self, eps_pivot: f64, context: &'static str) -> Result<DenseOperator> {
        let x = self.inverse(eps_pivot, context)?;
        let mut correction = DenseOperator::identity(self.dim).scale(C64::new(2.0, 0.0));
        correction.add_assign_scaled(&self.matmul(&x), C64::new(-1.0, 0.0));
        Ok(x.matmul(&correction))
    }

    /// One-norm condition estimate ||A||_1 ||A^-1||_1 (infinite when
    /// numerically singular).
    pub fn condition_one_norm(&self) -> f64 {
        match self.inverse(1e-300, "condition estimate") {
            Ok(inv) => (self.one_norm() * inv.one_norm()).max(1.0),
            Err(_) => f64::INFINITY,
        }
    }
}

/// Packed LU factors with the pivot permutation.
pub struct LuFactors {
    dim: usize,
    lu: Vec<C64>,
    piv: Vec<usize>,
    swaps: usize,
    pub min_pivot: f64,
    pub max_pivot: f64,
}

impl LuFactors {
    pub fn det(&self) -> C64 {
        let sign = if self.swaps.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        let mut d = C64::new(sign, 0.0);
        for k in 0..self.dim {
            d *= self.lu[k * self.dim + k];
        }
        d
    }

    /// Solve A x = b for one right-hand side.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim;
        assert_eq!(b.len(), n);
        // apply permutation, then forward/back substitution
        let mut y: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        for r in 1..n {
            for k in 0..r {
                let m = self.lu[r * n + k];
                let v = y[k];
                y[r] -= m * v;
            }
        }
        for r in (0..n).rev() {
            for k in (r + 1)..n {
                let v = y[k];
                y[r] -= self.lu[r * n + k] * v;
            }
            y[r] /= self.lu[r * n + r];
        }
        y
    }
}

/// Complex vector on the chain Hilbert space (or a single site pair).
/// Used both for kets and for the printed row-form dual states; pairings
/// with dual rows are bilinear (no conjugation).
#[derive(Clone, PartialEq)]
pub struct StateVector {
    dim: usize,
    entries: Vec<C64>,
}

impl std::fmt::Debug for StateVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StateVector(dim = {})", self.dim)
    }
}

impl StateVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParams("empty state vector".into()));
        }
        if entries
            .iter()
            .any(|e| !e.re.is_finite() || !e.im.is_finite())
        {
            return Err(Error::InvalidParams("non-finite state amplitude".into()));
        }
        Ok(StateVector {
            dim: entries.len(),
            entries,
        })
    }

    pub fn zeros(dim: usize) -> Self {
        StateVector {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim],
        }
    }

    pub fn basis(dim: usize, idx: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[idx] = C64::new(1.0, 0.0);
        v
    }

    /// All spins up on n sites (basis index 0).
    pub fn all_up(n_sites: usize) -> Self {
        Self::basis(1 << n_sites, 0)
    }

    /// All spins down on n sites (basis index 2^n - 1).
    pub fn all_down(n_sites: usize) -> Self {
        let dim = 1 << n_sites;
        Self::basis(dim, dim - 1)
    }

    /// Product state from per-site spinors (up, down), site 1 first.
    pub fn product(factors: &[(C64, C64)]) -> Self {
        let n = factors.len();
        let dim = 1usize << n;
        let mut entries = Vec::with_capacity(dim);
        for b in 0..dim {
            let mut amp = C64::new(1.0, 0.0);
            for (j, f) in factors.iter().enumerate() {
                let bit = (b >> (n - 1 - j)) & 1;
                amp *= if bit == 0 { f.0 } else { f.1 };
            }
            entries.push(amp);
        }
        StateVector { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> C64 {
        self.entries[i]
    }

    pub fn scale(&self, s: C64) -> StateVector {
        StateVector {
            dim: self.dim,
            entries: self.entries.iter().map(|e| s * e).collect(),
        }
    }

    pub fn sub(&self, other: &StateVector) -> StateVector {
        assert_eq!(self.dim, other.dim);
        StateVector {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn norm2(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Bilinear pairing row . ket, matching the printed dual states.
    pub fn bilinear_pairing(&self, ket: &StateVector) -> C64 {
        assert_eq!(self.dim, ket.dim);
        self.entries
            .iter()
            .zip(ket.entries.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Hermitian inner product <self|ket> with conjugation on self.
    pub fn hermitian_inner(&self, ket: &StateVector) -> C64 {
        assert_eq!(self.dim, ket.dim);
        self.entries
            .iter()
            .zip(ket.entries.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// sigma^+ = |up><down|.
pub fn sigma_plus() -> DenseOperator {
    DenseOperator::two_by_two(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
}

/// sigma^- = |down><up|.
pub fn sigma_minus() -> DenseOperator {
    DenseOperator::two_by_two(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn sigma_z() -> DenseOperator {
    DenseOperator::two_by_two(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// Swap operator P on C^2 (x) C^2.
pub fn permutation4() -> DenseOperator {
    let mut p = DenseOperator::zeros(4);
    p.set(0, 0, c(1.0, 0.0));
    p.set(1, 2, c(1.0, 0.0));
    p.set(2, 1, c(1.0, 0.0));
    p.set(3, 3, c(1.0, 0.0));
    p
}

/// Embed a one-site operator at `site` (1-based) in an `n_sites` chain:
/// I (x) ... (x) op (x) ... (x) I with `op` at the given position.
pub fn embed_site(op2: &DenseOperator, site: usize, n_sites: usize) -> Result<DenseOperator> {
    if op2.dim() != 2 {
        return Err(Error::Index(format!(
            "embed_site expects a 2x2 operator, got dim {}",
            op2.dim()
        )));
    }
    if site == 0 || site > n_sites {
        return Err(Error::Index(format!(
            "site {site} out of range 1..={n_sites}"
        )));
    }
    let dim = 1usize << n_sites;
    let shift = n_sites - site; // bit position of `site`
    let mut out = DenseOperator::zeros(dim);
    for col in 0..dim {
        let cb = (col >> shift) & 1;
        for rb in 0..2 {
            let v = op2.get(rb, cb);
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let row = (col & !(1usize << shift)) | (rb << shift);
            let cur = out.get(row, col);
            out.set(row, col, cur + v);
        }
    }
    Ok(out)
}

/// Add `s` times the one-site embedding of `op2` at `site` into `acc`,
/// without materializing the embedded matrix (the embedding touches only
/// two entries per column).
pub fn add_embedded_site(
    acc: &mut DenseOperator,
    op2: &DenseOperator,
    site: usize,
    n_sites: usize,
    s: C64,
) -> Result<()> {
    if op2.dim() != 2 {
        return Err(Error::Index(format!(
            "add_embedded_site expects a 2x2 operator, got dim {}",
            op2.dim()
        )));
    }
    if site == 0 || site > n_sites {
        return Err(Error::Index(format!(
            "site {site} out of range 1..={n_sites}"
        )));
    }
    let dim = 1usize << n_sites;
    if acc.dim() != dim {
        return Err(Error::Index(format!(
            "accumulator dim {} does not match 2^{n_sites}",
            acc.dim()
        )));
    }
    let shift = n_sites - site;
    for col in 0..dim {
        let cb = (col >> shift) & 1;
        for rb in 0..2 {
            let v = op2.get(rb, cb);
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let row = (col & !(1usize << shift)) | (rb << shift);
            let cur = acc.get(row, col);
            acc.set(row, col, cur + s * v);
        }
    }
    Ok(())
}

/// Embed a two-site operator acting as `op4` on the ordered factor pair
/// (site_a, site_b), identity elsewhere.
pub fn embed_two_site(
    op4: &DenseOperator,
    site_a: usize,
    site_b: usize,
    n_sites: usize,
) -> Result<DenseOperator> {
    if op4.dim() != 4 {
        return Err(Error::Index(format!(
            "embed_two_site expects a 4x4 operator, got dim {}",
            op4.dim()
        )));
    }
    if site_a == site_b {
        return Err(Error::Index(format!("coincident sites {site_a}, {site_b}")));
    }
    for s in [site_a, site_b] {
        if s == 0 || s > n_sites {
            return Err(Error::Index(format!("site {s} out of range 1..={n_sites}")));
        }
    }
    let dim = 1usize << n_sites;
    let sa = n_sites - site_a;
    let sb = n_sites - site_b;
    let mut out = DenseOperator::zeros(dim);
    for col in 0..dim {
        let ca = (col >> sa) & 1;
        let cb = (col >> sb) & 1;
        let base = col & !(1usize << sa) & !(1usize << sb);
        for ra in 0..2usize {
            for rb in 0..2usize {
                let v = op4.get(ra * 2 + rb, ca * 2 + cb);
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                let row = base | (ra << sa) | (rb << sb);
                let cur = out.get(row, col);
                out.set(row, col, cur + v);
            }
        }
    }
    Ok(out)
}

/// The local gauge matrix g(u) = [[e^{-i(u+2 l1)}, e^{-i(u+2 l2)}], [1, 1]].
pub fn gauge_matrix(u: C64, params: &ModelParams) -> Result<DenseOperator> {
    let g = DenseOperator::two_by_two(
        expi(-(u + 2.0 * params.lambda1)),
        expi(-(u + 2.0 * params.lambda2)),
        c(1.0, 0.0),
        c(1.0, 0.0),
    );
    let det = g.get(0, 0) - g.get(0, 1);
    if det.norm() < params.tol.eps_singular_gauge {
        return Err(Error::SingularGauge {
            det_magnitude: det.norm(),
        });
    }
    Ok(g)
}

fn invert_two_by_two(m: &DenseOperator, det: C64) -> DenseOperator {
    let inv_det = C64::new(1.0, 0.0) / det;
    DenseOperator::two_by_two(
        m.get(1, 1) * inv_det,
        -m.get(0, 1) * inv_det,
        -m.get(1, 0) * inv_det,
        m.get(0, 0) * inv_det,
    )
}

/// Gauged Pauli ladder operator sigma^{+/-}(u) = g(u) sigma^{+/-} g(u)^{-1}.
pub fn gauged_sigma(sign: Sign, u: C64, params: &ModelParams) -> Result<DenseOperator> {
    let g = gauge_matrix(u, params)?;
    let det = g.get(0, 0) * g.get(1, 1) - g.get(0, 1) * g.get(1, 0);
    let g_inv = invert_two_by_two(&g, det);
    let s = match sign {
        Sign::Plus => sigma_plus(),
        Sign::Minus => sigma_minus(),
    };
    Ok(g.matmul(&s).matmul(&g_inv))
}
