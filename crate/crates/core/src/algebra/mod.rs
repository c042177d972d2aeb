pub mod bound_expr;
pub mod interval;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod scalar;

pub use bound_expr::BoundExpr;
pub use interval::Interval;
pub use parse::{parse_poly, ParseError};
pub use poly::{Arena, Monomial, Poly, PolyError, PolyOp};
pub use scalar::{rat, ratio, rational_to_f64, Coeff, GaussianRational, Rational};
