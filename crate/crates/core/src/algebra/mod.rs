//! Exact arithmetic in F_q and F_q[T], and the absolute value on F_q[T].

pub mod abs;
pub mod field;
pub mod tpoly;

pub use abs::AbsValue;
pub use field::{Field, Fq};
pub use tpoly::{tpoly_arith, tpoly_content_primitive, TPoly, TPolyOp, TPolyResult};
