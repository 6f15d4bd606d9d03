//! Verification sweeps over desk-scale moduli, emitting structured reports.
//!
//! Each check runs independent `(q, χ)` cells in parallel and merges them in
//! `(q, character index)` order, so a report depends only on its config.

mod bilinear;
mod checks;
mod config;
mod replay;
mod report;
mod rng;

pub use bilinear::{
    bilinear_experiment, envelopes, instance as bilinear_instance, small_prime_hypothesis,
    InstanceKey,
};
pub use checks::{
    case_table_value, check_bound_complete, check_case_table, check_incomplete_bound,
    check_lemma3_and_pair_sum, check_lemma4, check_theorem1, check_theorem2,
    check_vanishing_and_multiplicativity, coprime_splittings, mobius_weight, CheckKind,
    CONGRUENCE_TUPLES, LEMMA4_ENVELOPE, THEOREM2_ENVELOPE,
};
pub use config::{BilinearConfig, CoeffModel, ExperimentConfig};
pub use replay::{replay_case, replay_witnesses};
pub use report::{
    format_params, read_csv, write_csv, CaseRecord, Rank, ReportBundle, Summary,
    VerificationReport, CSV_HEADER, WITNESS_COUNT,
};
pub use rng::{stream_id, ExperimentRng};

use crate::Result;

/// Run one check over `cfg`'s range, which must lie inside its domain.
pub fn run_check(kind: CheckKind, cfg: &ExperimentConfig) -> Result<VerificationReport> {
    kind.run(cfg)
}

/// Run every check in [`CheckKind::ALL`] on its share of `cfg`'s range.
/// Checks whose domain misses the range entirely are skipped.
pub fn run_all(cfg: &ExperimentConfig) -> Result<ReportBundle> {
    let reports = CheckKind::ALL
        .iter()
        .filter_map(|k| k.run_clipped(cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReportBundle { reports })
}
