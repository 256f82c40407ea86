//! Paraproducts, commutators, paralinearization and their time-dependent variants.

mod controlled;
mod paraproduct;
mod time;

pub use controlled::{ParacontrolledFunction, ParacontrolledPath};
pub use paraproduct::{
    commutator_c, commutator_c2, commutator_t, para_greater, para_less, paralinearize_remainder, resonant, Paracalc,
    Paraproducts,
};
pub use time::{
    duhamel_j, heat_commutator_h, heat_operator, heat_propagate, intertwined_para, phi1, phi2, EtdStep, TimeField,
};
