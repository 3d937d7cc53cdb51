use crate::cone_split::{cone_split_family, ConeSplitQuadrature};
use crate::error::{LabError, Result};
use crate::geometry::geometry_suite;
use crate::gronwall::gronwall_suite;
use crate::identities::{flux_identity_suite, null_coordinate_suite, planar_reduction_suite};
use crate::interpolation::{default_configs, interpolation_suite};
use crate::profiles::battery;
use crate::report::{IneqReport, SamplerConfig};
use crate::singular::singular_suite;
use crate::strichartz::{admissibility_reports, ks1_exponents, kt_exponents, source_battery, strichartz_empirical, StrichartzGrid};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Geometry,
    Singular,
    Interpolation,
    Gronwall,
    Strichartz,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["identities", "geometry", "singular", "interpolation", "gronwall", "strichartz", "all"];

    /// Sample count used when none is given.
    pub fn default_count(self) -> usize {
        match self {
            Suite::Geometry => 1_000_000,
            _ => 100_000,
        }
    }
}

impl FromStr for Suite {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "identities" => Suite::Identities,
            "geometry" => Suite::Geometry,
            "singular" => Suite::Singular,
            "interpolation" => Suite::Interpolation,
            "gronwall" => Suite::Gronwall,
            "strichartz" => Suite::Strichartz,
            "all" => Suite::All,
            _ => return Err(LabError::Config(format!("unknown suite {s:?}; expected one of {}", Suite::NAMES.join(", ")))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = [Suite::Identities, Suite::Geometry, Suite::Singular, Suite::Interpolation, Suite::Gronwall, Suite::Strichartz, Suite::All]
            .iter()
            .position(|s| s == self)
            .unwrap_or(6);
        f.write_str(Suite::NAMES[i])
    }
}

/// Run one suite. `count` overrides the sample count of the randomized
/// identity and geometry checks.
pub fn run_suite(suite: Suite, seed: u64, count: Option<usize>) -> Result<Vec<IneqReport>> {
    let n = count.unwrap_or_else(|| suite.default_count());
    if n == 0 {
        return Err(LabError::Config("count must be at least 1".into()));
    }
    match suite {
        Suite::Identities => Ok(vec![flux_identity_suite(seed, n)?, planar_reduction_suite(seed, n)?, null_coordinate_suite(seed, n)?]),
        Suite::Geometry => geometry_suite(&SamplerConfig::new(seed, n)?),
        Suite::Singular => {
            let mut v = singular_suite(&battery(), seed)?;
            v.push(cone_split_family(1.5, &[1.0, 0.1, 0.01], &ConeSplitQuadrature::default())?.report);
            Ok(v)
        }
        Suite::Interpolation => interpolation_suite(&battery(), &default_configs(), seed),
        Suite::Gronwall => gronwall_suite(30_000),
        Suite::Strichartz => {
            let mut v = admissibility_reports(&[("K_T,N=14,k=7", kt_exponents(14, 7)), ("K_S1,N=14,k=9", ks1_exponents(14, 9))]);
            let grid = StrichartzGrid::default();
            v.push(strichartz_empirical(&source_battery(), &kt_exponents(14, 7), &grid)?);
            v.push(strichartz_empirical(&source_battery(), &ks1_exponents(14, 9), &grid)?);
            Ok(v)
        }
        Suite::All => {
            let mut v = Vec::new();
            for s in [Suite::Identities, Suite::Geometry, Suite::Singular, Suite::Interpolation, Suite::Gronwall, Suite::Strichartz] {
                v.extend(run_suite(s, seed, count)?);
            }
            Ok(v)
        }
    }
}

/// True when every hard-asserted report passes.
pub fn hard_checks_pass(reports: &[IneqReport]) -> bool {
    reports.iter().all(|r| !r.hard || r.pass)
}
