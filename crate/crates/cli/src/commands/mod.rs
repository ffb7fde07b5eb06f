pub mod generate;
pub mod gradcheck;
pub mod grid;
pub mod inspect;
pub mod train;
