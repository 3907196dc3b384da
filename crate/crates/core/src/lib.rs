//! Numerical toolkit for average (subordinated) operators of probability
//! measures under group representations.
//!
//! Everything lives at desk scale: finite abelian groups `Z_{N1} x ... x Z_{Nd}`,
//! finitely supported measures on those groups or on the integers, and dense
//! complex matrices acting on finite-dimensional `l^p` and mixed `l^p(l^q)`
//! spaces. The crate computes
//!
//! * Fourier symbols of measures, with Lipschitz certificates on the torus,
//! * Stolz-domain geometry, bounded-angular-ratio (BAR) constants and minimal
//!   Stolz angles,
//! * power bounds, Ritt constants, resolvent and sectorial constants,
//! * polynomial functional calculus ratios against `sup` over Stolz domains,
//! * transference between representations and convolution operators,
//! * vector-valued tensor extensions, Rota's dilation for reversible chains
//!   and the commuting-projection expression that bounds Ritt constants on
//!   K-convex spaces.
//!
//! Every sup-type number carries a [`Certificate`] saying whether it is exact,
//! a grid value with an explicit error radius, or only a lower bound.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability, and the `rittkit` binary for the config-driven report runner.

pub mod error;
pub mod funcalc;
pub mod group;
pub mod linalg;
pub mod measures;
pub mod norms;
pub mod operators;
pub mod report;
pub mod representations;
pub mod stolz;
pub mod tensor;

pub use error::{Error, Result};
pub use funcalc::{eval_poly_operator, hinf_ratio, hinf_ratio_from_spectrum, sup_on_stolz, CalculusReport, FamilySpec, Polynomial};
pub use group::{DualIndex, FiniteAbelianGroup, GroupElement};
pub use measures::{Carrier, Measure, Point, ProbabilityMeasure, Symbol, SymbolDomain};
pub use norms::{compare, Certificate, CheckStatus, Exponent, NormEstimate, NormOptions, NormTag};
pub use operators::{
    convolution_operator, operator_norm, resolvent_constant, ritt_constants, ritt_from_spectrum, ritt_from_square_check,
    sectorial_constant, spectrum, LinearOperator, RittReport, Verdict,
};
pub use report::{export_plot_data, run, AnalysisConfig, PlotSeries, Report};
pub use representations::{average_operator, powers_profile, transference_check, transference_trials, Representation};
pub use tensor::{
    interchange_identity_check, kconvexity_lower, lemma_lem_check, pisier_expression_norm, regular_norm_lower, rota_dilation,
    subordination_chain_check, tensor_extend, DilationTriple, MixedSpace,
};
pub use stolz::{bar_constant, minimal_stolz_angle, phi_n_sup, stolz_contains, stolz_ratio_constant, BarReport, Sector, StolzDomain};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix.
pub type Mat = nalgebra::DMatrix<C64>;

/// Toolkit version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
