//! The scenario catalog and the dispatcher that parses, validates, runs and
//! records one scenario.

pub mod estimates;
pub mod structure;
pub mod symbolic;

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::config::{self, Envelope};
use crate::error::{LabError, LabResult};
use crate::output::{Recorder, RunResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    StarHpol,
    IntervalC,
    IntervalCn,
    FullshiftCode,
    CodingCrosscheck,
    IsometryCheck,
    CylinderCheck,
    ProductPower,
}

pub const ALL: [Scenario; 8] = [
    Scenario::StarHpol,
    Scenario::IntervalC,
    Scenario::IntervalCn,
    Scenario::FullshiftCode,
    Scenario::CodingCrosscheck,
    Scenario::IsometryCheck,
    Scenario::CylinderCheck,
    Scenario::ProductPower,
];

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::StarHpol => "star_hpol",
            Scenario::IntervalC => "interval_C",
            Scenario::IntervalCn => "interval_Cn",
            Scenario::FullshiftCode => "fullshift_code",
            Scenario::CodingCrosscheck => "coding_crosscheck",
            Scenario::IsometryCheck => "isometry_check",
            Scenario::CylinderCheck => "cylinder_check",
            Scenario::ProductPower => "product_power",
        }
    }

    /// The statement each scenario tests.
    pub fn citation(self) -> &'static str {
        match self {
            Scenario::StarHpol => {
                "k-star homeomorphism with wandering edges: the induced map on subcontinua has polynomial entropy k, \
                 witnessed on the sub-stars Y"
            }
            Scenario::IntervalC => {
                "interval homeomorphism x -> x^p: h_pol(f) = 1 and h_pol(C(f)) = 2"
            }
            Scenario::IntervalCn => {
                "interval homeomorphism: h_pol(C_2(f)) = 4 through the boundary map onto F_4, with h_pol(F_k(f)) = k \
                 and the Lipschitz-factor inequality for separated sets"
            }
            Scenario::FullshiftCode => {
                "finite sets coded along wandering orbits realize the full shift: p(m) = (2^k)^m and entropy k log 2"
            }
            Scenario::CodingCrosscheck => {
                "sub-stars code to sequences with at most one 1 per track; p(m) grows like m^k and the polynomial \
                 entropy of a shift-invariant, not necessarily closed, set is lim log p(m) / log m"
            }
            Scenario::IsometryCheck => {
                "the endpoint and boundary maps conjugate the induced maps; the boundary map is claimed to be an \
                 isometry on each piece of C_2"
            }
            Scenario::CylinderCheck => {
                "the join of l shifted covers by cylinders on [-n, n] has as many members as there are words of \
                 length 2n+l"
            }
            Scenario::ProductPower => {
                "h_pol of a k-fold product is k times h_pol(f), and h_pol(f^m) = h_pol(f)"
            }
        }
    }

    pub fn parse(name: &str) -> LabResult<Self> {
        ALL.iter().copied().find(|s| s.name() == name).ok_or_else(|| {
            LabError::UnknownScenario(name.to_string(), ALL.iter().map(|s| s.name()).collect::<Vec<_>>().join(", "))
        })
    }

    /// The config used when none is given: the acceptance settings.
    pub fn default_config(self) -> &'static str {
        match self {
            Scenario::StarHpol => include_str!("../../configs/star_hpol.json"),
            Scenario::IntervalC => include_str!("../../configs/interval_C.json"),
            Scenario::IntervalCn => include_str!("../../configs/interval_Cn.json"),
            Scenario::FullshiftCode => include_str!("../../configs/fullshift_code.json"),
            Scenario::CodingCrosscheck => include_str!("../../configs/coding_crosscheck.json"),
            Scenario::IsometryCheck => include_str!("../../configs/isometry_check.json"),
            Scenario::CylinderCheck => include_str!("../../configs/cylinder_check.json"),
            Scenario::ProductPower => include_str!("../../configs/product_power.json"),
        }
    }
}

type Validate<P, E> = fn(&Envelope<P, E>) -> LabResult<()>;
type Body<P, E> = fn(&Envelope<P, E>, &mut Recorder) -> LabResult<()>;

fn go<P, E>(s: Scenario, text: &str, seed: Option<u64>, out: &Path, validate: Validate<P, E>, body: Body<P, E>) -> LabResult<RunResult>
where
    P: DeserializeOwned + Serialize,
    E: DeserializeOwned + Serialize,
{
    let mut cfg: Envelope<P, E> = config::parse(text)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    validate(&cfg)?;
    let echo = serde_json::to_value(&cfg)?;
    let mut rec = Recorder::new(out, cfg.seed)?;
    body(&cfg, &mut rec)?;
    rec.finish(s.name(), s.citation(), echo)
}

/// Parses and validates `config`, runs the scenario on the current rayon
/// pool, and writes its tables, `fits.json` and `run.json` into `out`.
pub fn run(s: Scenario, config: &str, seed: Option<u64>, out: &Path) -> LabResult<RunResult> {
    use estimates::*;
    use structure::*;
    use symbolic::*;
    match s {
        Scenario::StarHpol => go(s, config, seed, out, validate_star, run_star),
        Scenario::IntervalC => go(s, config, seed, out, validate_interval, run_interval),
        Scenario::IntervalCn => go(s, config, seed, out, validate_cn, run_cn),
        Scenario::FullshiftCode => go(s, config, seed, out, validate_fullshift, run_fullshift),
        Scenario::CodingCrosscheck => go(s, config, seed, out, validate_coding, run_coding),
        Scenario::IsometryCheck => go(s, config, seed, out, validate_isometry, run_isometry),
        Scenario::CylinderCheck => go(s, config, seed, out, validate_cylinder, run_cylinder),
        Scenario::ProductPower => go(s, config, seed, out, validate_product_power, run_product_power),
    }
}
