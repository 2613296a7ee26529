pub mod generators;
pub mod geometry;
pub mod instance_io;
pub mod kernel;
pub mod numerics;
pub mod solver;
pub mod udg;
