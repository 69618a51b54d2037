pub mod bifurcate;
pub mod bounded;
pub mod cli;
pub mod figures;
pub mod integrate;
pub mod models;
pub mod signals;
pub mod transitions;
