//! The energy-identity engine: per-time ledgers of
//! `|v(t)|² = |h(0)|² + drift pairing + stochastic term
//! − jump correction + quadratic variation`, the discrete telescoping
//! identity it descends from, correction-sum convergence studies, the
//! weak jump relation, and the quadratic scaling law tying all terms
//! together.

pub mod correction;
pub mod ledger;
pub mod telescoping;

pub use correction::{correction_study, CorrectionStudy};
pub use ledger::{
    cadlag_modification, energy_ledger, hilbert_ito_check, homogeneity_check, weak_jump_check,
    EnergyLedger, HomogeneityReport,
};
pub use telescoping::{telescoping_check, TelescopingReport, TelescopingTerms};
