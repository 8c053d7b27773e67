pub mod gramian;
pub mod simulate;
pub mod sweep;
pub mod validate;
