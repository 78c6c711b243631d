use thiserror::Error;

/// Errors surfaced by the geometric and numerical operations.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("point {0} outside the metric domain")]
    OutsideDomain(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("degenerate immersion: principal curvature -1 at {0} (1 + tr B + det B = 0)")]
    DegenerateImmersion(String),

    #[error("Epstein surface fails the sampled embeddedness check: {0}; rescale the metric by e^{{2r}} and retry")]
    NotEmbedded(String),

    #[error("quadrature did not reach the requested tolerance within {subdivisions} subdivisions (error estimate {error:.3e})")]
    QuadratureNonConvergence { subdivisions: usize, error: f64 },

    #[error("volume integration requires a rotationally symmetric metric; got {0}. Use the Polyakov route for conformal perturbations")]
    NonSymmetricVolume(String),

    #[error("caterpillar parameter v={v} outside bracket [{lo}, {hi}]")]
    CaterpillarBracket { v: f64, lo: f64, hi: f64 },

    #[error("limit sequence does not converge: {0}")]
    NonConvergent(String),
}
