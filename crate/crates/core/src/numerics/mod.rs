//! Quadrature, compensated summation and chart sampling shared by the
//! moduli and zeta modules.

pub mod chart;
pub mod gauss;
pub mod quad;
pub mod sum;

pub use chart::{chart_nodes, in_truncated_domain, quad_chart, truncated_domain_area, ChartNode, ChartRule};
pub use gauss::{gauss_legendre, CompositeRule};
pub use quad::{quad_1d, quad_1d_real, quad_1d_with, Quad1dConfig, QuadratureResult};
pub use sum::{CompensatedSum, ComplexSum};
