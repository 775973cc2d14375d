pub mod arith;
pub mod classgroup;
pub mod cli;
pub mod det_oracle;
pub mod emat;
pub mod error;
pub mod field;
pub mod genus;
pub mod ideal;
pub mod io;
pub mod lattice;
pub mod local;
pub mod neighbour;
pub mod samples;
pub mod zlinalg;
