//! Time steppers for the singular SPDEs, each in a paracontrolled and a classical form.

mod bundle;
mod config;
mod csbe;
mod gpam;
mod gsbe;
mod mesoscopic;
mod pam_ho;
mod phi42;
mod run;

pub use bundle::{Diagnostics, SolutionBundle};
pub use config::{Equation, ScalarFn, SolverConfig};
pub use csbe::{solve_csbe, solve_csbe_direct, solve_kpz};
pub use gpam::{gpam_remainder_source, solve_gpam_direct, solve_gpam_modified, solve_gpam_pc};
pub use gsbe::{gsbe_remainder_source, solve_gsbe, solve_gsbe_direct};
pub use mesoscopic::{mesoscopic_x_variance, simulate_mesoscopic, UniversalityConfig};
pub use pam_ho::{enhance_pam_ho, pam_product_expansion, solve_pam_direct, solve_pam_ho, PamHoEnhancement};
pub use phi42::{cubic_decay, solve_phi42_dd, solve_phi42_direct};
pub use run::{solve, Method, RunConfig};
