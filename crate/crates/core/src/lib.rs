//! Classical multidimensional scaling of windowed Riemann zeta zeros.
//!
//! The pipeline runs in four stages, one module each:
//!
//! 1. [`zeros`]: parse zero ordinates `t_k` and cut them into windows of `m`
//!    consecutive values (disjoint blocks or sliding windows).
//! 2. [`metrics`]: pairwise dissimilarities under one of six metrics.
//! 3. [`mds`]: Torgerson scaling of the distance matrix, with stress and
//!    Shepard diagnostics.
//! 4. [`pattern`]: sinusoid fits of each embedding component plus the
//!    amplitude and frequency laws across components.
//!
//! [`zeta`] evaluates `zeta(1/2 + i t)` so ingested ordinates can be checked,
//! and [`eigen`] is the dense symmetric eigensolver behind [`mds`].
//!
//! ```
//! use zeta_mds_core::{distance_matrix, embed, window_disjoint, Metric, ZeroList};
//!
//! let zeros = ZeroList::new((1..=60).map(|k| 10.0 + 1.3 * k as f64 + (k as f64).sin()).collect(), "demo")?;
//! let objects = window_disjoint(&zeros, 3, None)?;
//! let d = distance_matrix(objects.vectors(), Metric::Lorentzian)?;
//! let e = embed(&d, 2)?;
//! assert_eq!(e.coordinates().dim(), (20, 2));
//! # Ok::<(), zeta_mds_core::Error>(())
//! ```

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod eigen;
pub mod error;
pub mod mds;
pub mod metrics;
pub mod pattern;
pub mod zeros;
pub mod zeta;

pub use eigen::{eigendecompose_symmetric, SymmetricEigen};
pub use error::{Error, Result};
pub use mds::{
    double_center, embed, embed_at_most, kruskal_stress, shepard_correlation, shepard_points, stress_curve,
    Embedding, GramMatrix, StressReport,
};
pub use metrics::{
    check_axioms, distance, distance_matrix, Axiom, AxiomReport, Counterexample, DistanceMatrix,
    Measure, Metric, Variant,
};
pub use pattern::{
    fit_components, fit_linear, fit_power_law, fit_sinusoid, summarize, write_fits_csv,
    LawSummary, LinearFit, PowerLawFit, SinusoidFit,
};
pub use zeros::{parse_zeros, window, window_disjoint, window_sliding, Approach, ObjectSet, ZeroList};
pub use zeta::{verify_zero, verify_zero_with, zeta_critical, zeta_critical_with, ZetaOptions};
