//! Campaign plumbing: configuration, seeded workloads, report aggregation
//! and serialization.

pub mod io;
pub mod json;
pub mod profiles;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SpaceConfig;
use crate::mechanisms::{MechanismSpec, Slope};
use crate::properties::{run_check, CheckConfig, Property, PropertyReport, Verdict};

pub use io::{format_profile, load_profile, parse_profile, save_profile};
pub use profiles::{fixtures, generate_profiles, median_counterexample, ProfileStream};

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidConfig(format!("format must be json or csv, got `{other}`"))),
        }
    }
}

/// Declared outcome for one (mechanism, property) pair. Pairs without a
/// declaration are expected to pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub mechanism: MechanismSpec,
    pub property: Property,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub mechanisms: Vec<MechanismSpec>,
    pub space: SpaceConfig,
    pub checks: Vec<Property>,
    #[serde(default)]
    pub check_config: CheckConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: ReportFormat,
    #[serde(default)]
    pub expectations: Vec<Expectation>,
}

impl CampaignConfig {
    /// Every catalog mechanism defined on `space` against every applicable
    /// check, with the known negative controls declared as expected failures.
    /// The declarations assume the default profile size of three agents.
    pub fn catalog(space: SpaceConfig, check_config: CheckConfig) -> Self {
        let m = space.m();
        let mut mechanisms = vec![MechanismSpec::Dictator(0), MechanismSpec::GeneralMedian];
        if m == 2 {
            for (u, v) in [(1, 1), (1, 0), (0, 1), (0, 0)] {
                mechanisms.push(MechanismSpec::c1(u, v).expect("bits"));
            }
            // The slope families are strategyproof only for the Euclidean metric.
            if space.is_euclidean() {
                let s = |x: f64| Slope::new(x).expect("nonzero slope");
                mechanisms.extend([MechanismSpec::C2(s(1.0)), MechanismSpec::C3(s(1.0))]);
            }
        }
        mechanisms.push(MechanismSpec::Midpoint);
        let checks: Vec<Property> = Property::ALL.into_iter().filter(|p| p.applies_to(&space)).collect();

        let mut expectations = Vec::new();
        let mut fail = |mechanism: MechanismSpec, property: Property| {
            if checks.contains(&property) {
                expectations.push(Expectation { mechanism, property, verdict: Verdict::Fail });
            }
        };
        fail(MechanismSpec::Dictator(0), Property::Anonymity);
        fail(MechanismSpec::GeneralMedian, Property::RotationInvariance);
        if m >= 3 {
            fail(MechanismSpec::GeneralMedian, Property::Conjecture1);
        }
        for spec in &mechanisms {
            if spec.fixed_dimension().is_some() {
                fail(*spec, Property::RotationInvariance);
            }
        }
        for property in [
            Property::Strategyproofness,
            Property::OutputAtAgent1d,
            Property::PullStability,
            Property::Conjecture1,
        ] {
            fail(MechanismSpec::Midpoint, property);
        }

        CampaignConfig {
            mechanisms,
            space,
            checks,
            check_config,
            output_path: None,
            format: ReportFormat::Json,
            expectations,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: CampaignConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mechanisms.is_empty() {
            return Err(Error::InvalidConfig("no mechanisms listed".into()));
        }
        if self.checks.is_empty() {
            return Err(Error::InvalidConfig("no checks listed".into()));
        }
        self.check_config.validate()
    }

    pub fn expected(&self, mechanism: &MechanismSpec, property: Property) -> Verdict {
        self.expectations
            .iter()
            .rev()
            .find(|e| e.mechanism == *mechanism && e.property == property)
            .map_or(Verdict::Pass, |e| e.verdict)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Unexpected {
    pub mechanism: MechanismSpec,
    pub property: Property,
    pub expected: Verdict,
    pub actual: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub tool_version: String,
    pub config_echo: CampaignConfig,
    pub reports: Vec<PropertyReport>,
    pub summary: BTreeMap<Property, Tally>,
    pub unexpected: Vec<Unexpected>,
}

impl CampaignReport {
    /// True iff every verdict matched its declaration.
    pub fn as_expected(&self) -> bool {
        self.unexpected.is_empty()
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => Ok(json::to_pretty_json(self)?),
            ReportFormat::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "mechanism",
            "property",
            "verdict",
            "expected",
            "trials",
            "seed",
            "tolerance",
            "witness_kind",
            "witness_magnitude",
        ])?;
        for r in &self.reports {
            let (kind, magnitude) = match &r.witness {
                Some(w) => {
                    let tagged = serde_json::to_value(&w.detail)?;
                    let kind = tagged["kind"].as_str().unwrap_or_default().to_string();
                    (kind, json::fmt_g17(w.detail.magnitude()))
                }
                None => (String::new(), String::new()),
            };
            w.write_record([
                r.mechanism.to_string(),
                r.property.to_string(),
                r.verdict.to_string(),
                self.config_echo.expected(&r.mechanism, r.property).to_string(),
                r.trials.to_string(),
                r.seed.to_string(),
                json::fmt_g17(r.tolerance),
                kind,
                magnitude,
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields"))
    }
}

pub fn save_report(report: &CampaignReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    io::write_text(path, &report.render(format)?)
}

/// Runs every (mechanism, check) pair in configuration order and writes the
/// report to `output_path` when one is set.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    cfg.validate()?;
    let mut reports = Vec::with_capacity(cfg.mechanisms.len() * cfg.checks.len());
    let mut summary: BTreeMap<Property, Tally> = BTreeMap::new();
    let mut unexpected = Vec::new();
    for spec in &cfg.mechanisms {
        for &property in &cfg.checks {
            let report = run_check(property, spec, &cfg.space, &cfg.check_config)?;
            let tally = summary.entry(property).or_default();
            match report.verdict {
                Verdict::Pass => tally.pass += 1,
                Verdict::Fail => tally.fail += 1,
            }
            let expected = cfg.expected(spec, property);
            if expected != report.verdict {
                unexpected.push(Unexpected { mechanism: *spec, property, expected, actual: report.verdict });
            }
            reports.push(report);
        }
    }
    let report = CampaignReport {
        tool_version: TOOL_VERSION.to_string(),
        config_echo: cfg.clone(),
        reports,
        summary,
        unexpected,
    };
    if let Some(path) = &cfg.output_path {
        save_report(&report, path, cfg.format)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: usize) -> CheckConfig {
        CheckConfig { num_profiles: n, ..CheckConfig::default() }
    }

    fn config(mechanisms: &[&str], checks: &[Property]) -> CampaignConfig {
        CampaignConfig {
            mechanisms: mechanisms.iter().map(|s| s.parse().unwrap()).collect(),
            space: SpaceConfig::euclidean(2).unwrap(),
            checks: checks.to_vec(),
            check_config: small(60),
            output_path: None,
            format: ReportFormat::Json,
            expectations: Vec::new(),
        }
    }

    #[test]
    fn midpoint_negative_control_is_tallied() {
        let report = run_campaign(&config(&["midpoint"], &[Property::Strategyproofness])).unwrap();
        assert_eq!(report.summary[&Property::Strategyproofness], Tally { pass: 0, fail: 1 });
        assert!(!report.as_expected());
    }

    #[test]
    fn c1_matrix() {
        let mut cfg = config(
            &["c1:1,1"],
            &[Property::Strategyproofness, Property::Anonymity, Property::RotationInvariance],
        );
        cfg.expectations.push(Expectation {
            mechanism: "c1:1,1".parse().unwrap(),
            property: Property::RotationInvariance,
            verdict: Verdict::Fail,
        });
        let report = run_campaign(&cfg).unwrap();
        let verdicts: Vec<Verdict> = report.reports.iter().map(|r| r.verdict).collect();
        assert_eq!(verdicts, [Verdict::Pass, Verdict::Pass, Verdict::Fail]);
        assert!(report.as_expected());
        let total: usize = report.summary.values().map(|t| t.pass + t.fail).sum();
        assert_eq!(total, report.reports.len());
    }

    #[test]
    fn catalog_matches_its_own_expectations() {
        for m in [1, 2, 3] {
            let cfg = CampaignConfig::catalog(SpaceConfig::euclidean(m).unwrap(), small(150));
            let report = run_campaign(&cfg).unwrap();
            assert!(report.as_expected(), "m = {m}: {:?}", report.unexpected);
        }
        let cfg = CampaignConfig::catalog(SpaceConfig::new(2, 3.0).unwrap(), small(100));
        assert!(!cfg.mechanisms.iter().any(|s| matches!(s, MechanismSpec::C2(_))));
        assert!(run_campaign(&cfg).unwrap().as_expected());
    }

    #[test]
    fn toml_round_trip_and_errors() {
        let text = r#"
            mechanisms = ["dictator:0", "c2:1.5"]
            checks = ["unanimity", "anonymity"]
            format = "csv"
            space = { m = 2, p = 2 }

            [check_config]
            seed = 3
            num_profiles = 20

            [[expectations]]
            mechanism = "dictator:0"
            property = "anonymity"
            verdict = "fail"
        "#;
        let cfg = CampaignConfig::from_toml(text).unwrap();
        assert_eq!(cfg.check_config.seed, 3);
        assert_eq!(cfg.format, ReportFormat::Csv);
        assert_eq!(cfg.expected(&cfg.mechanisms[0], Property::Anonymity), Verdict::Fail);
        let back = CampaignConfig::from_toml(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);

        let unknown = text.replace("\"anonymity\"]", "\"liveness\"]");
        assert!(CampaignConfig::from_toml(&unknown).unwrap_err().to_string().contains("liveness"));
        let bad_mech = text.replace("c2:1.5", "c9:1");
        assert!(CampaignConfig::from_toml(&bad_mech).unwrap_err().to_string().contains("c9"));
        assert!(CampaignConfig::from_toml(&text.replace("\"dictator:0\", \"c2:1.5\"", "")).is_err());
    }

    #[test]
    fn csv_report_has_a_row_per_check() {
        let mut cfg = config(&["dictator:0", "median"], &[Property::Anonymity, Property::Unanimity]);
        cfg.format = ReportFormat::Csv;
        let report = run_campaign(&cfg).unwrap();
        let text = report.render(ReportFormat::Csv).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("mechanism,property,verdict"));
        assert!(lines[1].starts_with("dictator:0,anonymity,fail,pass,"));
        assert!(lines[1].contains(",permutation,"));
    }

    #[test]
    fn writes_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(&["midpoint", "c3:-1"], &[Property::Strategyproofness, Property::PullStability]);
        let mut outputs = Vec::new();
        for name in ["a.json", "b.json"] {
            cfg.output_path = Some(dir.path().join(name));
            run_campaign(&cfg).unwrap();
            outputs.push(std::fs::read(dir.path().join(name)).unwrap());
        }
        // The echoed output path differs; everything else must match.
        let strip = |b: &[u8]| String::from_utf8(b.to_vec()).unwrap().replace("b.json", "a.json");
        assert_eq!(strip(&outputs[0]), strip(&outputs[1]));

        cfg.output_path = Some(dir.path().join("missing/dir/r.json"));
        assert!(matches!(run_campaign(&cfg), Err(Error::File { .. })));
    }
}
