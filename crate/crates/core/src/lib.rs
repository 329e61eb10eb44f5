pub mod algebra;
pub mod budget;
pub mod dioph;
pub mod error;
pub mod mahler;
pub mod series;

pub use algebra::{AbsValue, Field, Fq, TPoly};
pub use budget::Budgets;
pub use dioph::{RecordTable, RootDescriptor, XPoly};
pub use error::{Error, Result};
pub use mahler::{Annihilator, MahlerSpec, Mask};
pub use series::{Precision, Series};
