//! Recompute a recorded case from its check name, modulus, character and parameters.

use super::bilinear::{self, InstanceKey};
use super::checks::moment_weights;
use super::config::{BilinearConfig, ExperimentConfig};
use super::report::{CaseRecord, VerificationReport};
use crate::character::{CharacterGroup, DirichletCharacter};
use crate::sums::{self, BilinearStrategy, IntervalSpec, MomentStrategy};
use crate::{oracle, Complex64, Error, Result};

fn character(case: &CaseRecord) -> Result<DirichletCharacter> {
    let group = CharacterGroup::new(case.q)?;
    match case.chi_index {
        Some(i) => group.character(i),
        None => Err(Error::Parse(format!("{} case has no character", case.check))),
    }
}

fn config<T: serde::de::DeserializeOwned>(value: &serde_json::Value) -> Result<T> {
    serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The value of `case`, evaluated afresh. `config` is the owning report's config.
pub fn replay_case(case: &CaseRecord, config_value: &serde_json::Value) -> Result<Complex64> {
    let q = case.q;
    let p = |k: &str| case.param_i64(k);
    Ok(match case.check.as_str() {
        "theorem1" => real(sums::second_moment(&character(case)?, MomentStrategy::Reduced)?),
        "bound4" | "vanishing" | "multiplicativity" => {
            sums::complete_lambda(&character(case)?, p("m")?, p("n")?)
        }
        "bound5" => {
            let interval = IntervalSpec::new(p("start")?, p("len")? as u64, q)?;
            sums::incomplete_lambda(&character(case)?, p("m")?, p("n")?, &interval)
        }
        "lemma1" => sums::gauss_sum(&character(case)?, 1),
        "lemma3" => sums::orthogonality_average(&character(case)?, p("c")?, p("b")?).value,
        "pairsum" => sums::character_pair_sum(&character(case)?, p("y")?, p("ell")? as u64)?,
        "lemma4" => {
            let restricted = case.param("kind")? == "restricted";
            sums::quadratic_expsum(p("a")?, p("b")?, q, restricted)?
        }
        "theorem2" => {
            let cfg: ExperimentConfig = config(config_value)?;
            let chi = character(case)?;
            let w = moment_weights(q, chi.index(), p("trial")? as u64, &cfg);
            real(sums::weighted_second_moment(&chi, &w)?)
        }
        "case-table" => real(sums::unit_root_char_sum(&character(case)?) as f64),
        "congruence" => {
            let n = oracle::congruence_pair_count_enumerated(p("a")?, p("b")?, p("c")?, p("d")?, q)
                .ok_or_else(|| Error::domain("recorded tuple is not invertible"))?;
            real(n as f64)
        }
        "bilinear" => {
            let cfg: BilinearConfig = config(config_value)?;
            let key = InstanceKey {
                q,
                shape: (p("A")? as u64, p("M")? as u64, p("N")? as u64),
                trial: p("trial")? as u64,
            };
            let (chi, inst) = bilinear::instance(&cfg, key)?;
            sums::bilinear_form(&chi, &inst, BilinearStrategy::Tabulated)?
        }
        other => return Err(Error::Parse(format!("unknown check {other:?}"))),
    })
}

/// Largest `|recorded − replayed|` over the report's witnesses.
pub fn replay_witnesses(report: &VerificationReport) -> Result<f64> {
    report
        .summary
        .witnesses
        .iter()
        .map(|w| {
            let v = replay_case(w, &report.config)?;
            Ok((v - Complex64::new(w.value_re, w.value_im)).norm())
        })
        .try_fold(0.0f64, |acc, d: Result<f64>| Ok(acc.max(d?)))
}
