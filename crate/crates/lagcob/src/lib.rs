pub mod cli;
pub mod cochains;
pub mod geom;
pub mod grading;
pub mod novikov;
pub mod verify;
