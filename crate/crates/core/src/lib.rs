pub mod arith;
pub mod error;
pub mod linalg;
pub mod numberfield;
pub mod symcone;
pub mod ffs;
pub mod theta;
pub mod cyclealg;
pub mod hodgebound;
pub mod io;
