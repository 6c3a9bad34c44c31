pub mod analyze;
pub mod preprocess;
pub mod report;
pub mod train;
pub mod validate;
