pub mod error;
pub mod interval;
pub mod linalg;
pub mod star;
pub mod bounds;
pub mod reach;
pub mod sensitivity;
pub mod robustness;
pub mod model;
pub mod cli;
