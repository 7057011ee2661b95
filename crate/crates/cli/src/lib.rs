pub mod app;
pub mod eval;
pub mod expr;
pub mod suite;

pub use app::run;
