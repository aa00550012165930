pub mod quadrature;
pub mod series;
pub mod special;

pub use quadrature::{
    gauss_hermite_rule, gauss_legendre_rule, integrate_adaptive, AdaptiveOptions, QuadratureRule,
};
pub use series::{series_coefficient, series_product, TruncatedBivariateSeries};
pub use special::{
    factorial, gamma_fn, hermite_function, hermite_functions, hermite_poly, laguerre,
};
