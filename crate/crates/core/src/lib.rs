//! Regular (quasi-arithmetic) means M_g(x) = g⁻¹(Σ g(xᵢ)/n), their
//! population counterparts, asymptotic normality and Edgeworth corrections,
//! Monte Carlo studies, stability with respect to the generator, and
//! portfolio-return helpers.

pub mod asymptotics;
pub mod distributions;
pub mod error;
pub mod figures;
pub mod generator;
pub mod mean;
pub mod numeric;
pub mod portfolio;
pub mod quadrature;
pub mod simulation;
pub mod stability;

pub use asymptotics::{
    asymptotic_variance, edgeworth_cdf, edgeworth_cdf_clamped, edgeworth_terms, g_moments,
    kolmogorov_expectation, standardize, AsymptoticSpec, EdgeworthCoefficients, EdgeworthVariant,
    GMoments, MomentMethod,
};
pub use distributions::DistributionModel;
pub use error::{Error, Result};
pub use generator::{Direction, Domain, Generator, Interval};
pub use mean::{check_axioms, mean, power_mean, AxiomReport, Sample};
