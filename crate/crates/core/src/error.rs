use thiserror::Error;

/// Errors raised by operator construction, root finding, and the
/// determinant formulas.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A trigonometric factor was evaluated within `eps_degenerate` of one
    /// of its zeros; the enclosing formula has a pole there.
    #[error("pole in {context}: |sin({argument})| = {magnitude:.3e} below threshold")]
    Pole {
        context: &'static str,
        argument: String,
        magnitude: f64,
    },

    /// Two parameters that must stay separated (inhomogeneities, Bethe
    /// roots, spectral arguments) collided.
    #[error("degenerate parameters in {context}: {detail}")]
    Degenerate {
        context: &'static str,
        detail: String,
    },

    /// The 2x2 gauge matrix g(u) is numerically singular (lambda1 = lambda2
    /// mod pi).
    #[error("singular gauge matrix: |det g| = {det_magnitude:.3e}")]
    SingularGauge { det_magnitude: f64 },

    /// A linear solve or inversion hit a pivot below threshold.
    #[error("singular matrix in {context}: pivot magnitude {pivot:.3e}")]
    SingularMatrix { context: &'static str, pivot: f64 },

    /// Richardson extrapolants of a one-sided derivative disagree beyond
    /// tolerance.
    #[error("numerical derivative did not converge: extrapolants differ by {disagreement:.3e} (tol {tol:.3e})")]
    DerivativeDisagreement { disagreement: f64, tol: f64 },

    /// A site or index argument is out of range.
    #[error("index error: {0}")]
    Index(String),

    /// Operation requires on-shell Bethe roots but the supplied set has
    /// residual above `tol_onshell`.
    #[error("on-shell roots required: residual {residual:.3e} exceeds {tol:.3e}")]
    OffShell { residual: f64, tol: f64 },

    /// Tensor-space dimension would exceed the brute-force cap.
    #[error("dimension cap exceeded: N = {n_sites} > {cap}")]
    DimensionCap { n_sites: usize, cap: usize },

    /// Bethe state (or another constructed vector) is numerically zero.
    #[error("degenerate state: norm {norm:.3e}")]
    DegenerateState { norm: f64 },

    /// Invalid model parameters.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
