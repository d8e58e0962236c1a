//! Versioned scenario files driving every subcommand.
//!
//! Paths inside a scenario are resolved relative to the scenario file.

use std::path::{Path, PathBuf};

use polariton_core::evolution::{BathConfig, IntegratorConfig, PolarizationFilter};
use polariton_core::{Medium, SpatialMediumMap};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// The only scenario schema version this build understands.
pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    /// Seed for every randomized input (random states, bath initial data).
    #[serde(default)]
    pub seed: u64,
    /// Inline medium definition; mutually exclusive with `medium_file`.
    #[serde(default)]
    pub medium: Option<Value>,
    #[serde(default)]
    pub medium_file: Option<PathBuf>,
    /// Spatial medium map for `green` and `evolve`.
    #[serde(default)]
    pub map_file: Option<PathBuf>,
    #[serde(default)]
    pub dispersion: DispersionParams,
    #[serde(default)]
    pub propagator: PropagatorParams,
    #[serde(default)]
    pub sumrules: SumRulesParams,
    #[serde(default)]
    pub green: GreenParams,
    #[serde(default)]
    pub hopfield: HopfieldParams,
    #[serde(default)]
    pub quasimode: QuasimodeParams,
    #[serde(default)]
    pub evolve: EvolveParams,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            version: SCENARIO_VERSION,
            seed: 0,
            medium: None,
            medium_file: None,
            map_file: None,
            dispersion: DispersionParams::default(),
            propagator: PropagatorParams::default(),
            sumrules: SumRulesParams::default(),
            green: GreenParams::default(),
            hopfield: HopfieldParams::default(),
            quasimode: QuasimodeParams::default(),
            evolve: EvolveParams::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

/// The medium used when a scenario names none: `{f = 1, ω_n = 1, γ = 0.1}`.
pub fn reference_medium() -> Medium {
    Medium::single(1.0, 1.0, 0.1).expect("reference medium is valid")
}

/// Parses JSON text into `T`, reporting the path of the offending field.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        CliError::validation(if field == "." { String::new() } else { field }, e.inner().to_string())
    })
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

impl Scenario {
    pub fn load(path: &Path) -> CliResult<Self> {
        let mut s: Scenario = parse_json(&read_file(path)?)?;
        if s.version != SCENARIO_VERSION {
            return Err(CliError::validation(
                "version",
                format!("scenario version {} is not supported (expected {SCENARIO_VERSION})", s.version),
            ));
        }
        s.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Ok(s)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// The homogeneous medium: inline, from file, or the reference medium.
    pub fn medium(&self) -> CliResult<Medium> {
        match (&self.medium, &self.medium_file) {
            (Some(_), Some(_)) => {
                Err(CliError::validation("medium", "give either `medium` or `medium_file`, not both"))
            }
            (Some(v), None) => {
                Ok(Medium::from_json_str(&v.to_string()).map_err(|e| CliError::from(e).within("medium"))?)
            }
            (None, Some(p)) => Ok(Medium::from_json_str(&read_file(&self.resolve(p))?)?),
            (None, None) => Ok(reference_medium()),
        }
    }

    pub fn map(&self) -> CliResult<Option<SpatialMediumMap>> {
        match &self.map_file {
            None => Ok(None),
            Some(p) => Ok(Some(SpatialMediumMap::from_json_str(&read_file(&self.resolve(p))?)?)),
        }
    }
}

/// A sorted list of sweep values: either explicit or `{start, stop, count}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Sweep {
    List(Vec<f64>),
    Range(Range),
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self, field: &str) -> CliResult<Vec<f64>> {
        let mut v = match self {
            Sweep::List(v) => v.clone(),
            Sweep::Range(r) => {
                if r.count == 0 {
                    return Err(CliError::validation(format!("{field}.count"), "must be ≥ 1"));
                }
                if r.count == 1 {
                    vec![r.start]
                } else {
                    (0..r.count).map(|i| r.start + (r.stop - r.start) * i as f64 / (r.count - 1) as f64).collect()
                }
            }
        };
        if v.is_empty() {
            return Err(CliError::validation(field, "sweep is empty"));
        }
        if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
            return Err(CliError::validation(field, format!("non-finite value {bad}")));
        }
        v.sort_by(f64::total_cmp);
        v.dedup();
        Ok(v)
    }

    fn of(values: &[f64]) -> Self {
        Sweep::List(values.to_vec())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionParams {
    /// Photon wavenumbers `k = ω_α` of the transverse sweep.
    #[serde(default = "default_k")]
    pub k: Sweep,
    #[serde(default = "yes")]
    pub longitudinal: bool,
}

impl Default for DispersionParams {
    fn default() -> Self {
        DispersionParams { k: default_k(), longitudinal: true }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorParams {
    #[serde(default = "default_omega_alpha")]
    pub omega_alpha: Sweep,
    /// Samples cover `τ ∈ [0, periods/ω_α]`.
    #[serde(default = "default_periods")]
    pub periods: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub n_fft: Option<usize>,
}

impl Default for PropagatorParams {
    fn default() -> Self {
        PropagatorParams { omega_alpha: default_omega_alpha(), periods: 20.0, samples: 2000, n_fft: None }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumRulesParams {
    /// Root file written by `dispersion`; when absent, roots are computed
    /// for the `omega_alpha` sweep.
    #[serde(default)]
    pub roots_file: Option<PathBuf>,
    #[serde(default)]
    pub omega_alpha: Option<Sweep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum GreenKind {
    G,
    S,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenParams {
    #[serde(default = "default_green_kind")]
    pub kind: GreenKind,
    #[serde(default = "default_omega_alpha")]
    pub omega: Sweep,
    #[serde(default)]
    pub source: [f64; 3],
    /// Field points are `source + s·direction` for each separation `s`.
    #[serde(default = "default_direction")]
    pub direction: [f64; 3],
    #[serde(default = "default_separation")]
    pub separation: Sweep,
    /// Tensor components such as `"xx"` or `"yz"`; all nine by default.
    #[serde(default = "all_components")]
    pub components: Vec<String>,
}

impl Default for GreenParams {
    fn default() -> Self {
        GreenParams {
            kind: GreenKind::G,
            omega: default_omega_alpha(),
            source: [0.0; 3],
            direction: default_direction(),
            separation: default_separation(),
            components: all_components(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfieldParams {
    #[serde(default = "one")]
    pub omega0: f64,
    #[serde(default = "one")]
    pub omegap: f64,
    #[serde(default = "default_omega_alpha")]
    pub omega_alpha: Sweep,
    /// Random field configurations used for the energy report.
    #[serde(default = "default_states")]
    pub random_states: usize,
}

impl Default for HopfieldParams {
    fn default() -> Self {
        HopfieldParams { omega0: 1.0, omegap: 1.0, omega_alpha: default_omega_alpha(), random_states: 100 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasimodeParams {
    #[serde(default = "default_omega_alpha")]
    pub omega_alpha: Sweep,
    /// Multiplier of the default window width.
    #[serde(default = "one")]
    pub width_factor: f64,
    #[serde(default = "yes")]
    pub longitudinal: bool,
}

impl Default for QuasimodeParams {
    fn default() -> Self {
        QuasimodeParams { omega_alpha: default_omega_alpha(), width_factor: 1.0, longitudinal: true }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasisSpec {
    /// Abstract modes with the given frequencies.
    Frequencies { omegas: Vec<f64> },
    /// Standing waves on a line of the given length.
    Line { length: f64, modes: usize },
    /// Periodic-box plane waves.
    Box {
        side: f64,
        k_max: f64,
        #[serde(default)]
        polarization: PolarizationFilter,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    /// Initial `D_n`, zero-padded to the number of modes.
    #[serde(default)]
    pub mode_d: Vec<f64>,
    /// Initial `B_n`, zero-padded to the number of modes.
    #[serde(default)]
    pub mode_b: Vec<f64>,
    /// Uniform random bath displacements and momenta in `±amplitude`.
    #[serde(default)]
    pub bath_amplitude: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveParams {
    #[serde(default = "default_basis")]
    pub basis: BasisSpec,
    #[serde(default)]
    pub bath: BathConfig,
    #[serde(default = "default_initial")]
    pub initial: InitialSpec,
    #[serde(default = "default_integrator")]
    pub integrator: IntegratorConfig,
    /// Modes whose `D` and `B` are written to the trajectory.
    #[serde(default = "default_probes")]
    pub probes: Vec<usize>,
}

impl Default for EvolveParams {
    fn default() -> Self {
        EvolveParams {
            basis: default_basis(),
            bath: BathConfig::default(),
            initial: default_initial(),
            integrator: default_integrator(),
            probes: default_probes(),
        }
    }
}

fn default_k() -> Sweep {
    Sweep::of(&[0.5, 1.0, 2.0])
}

fn default_omega_alpha() -> Sweep {
    Sweep::of(&[1.0])
}

fn default_separation() -> Sweep {
    Sweep::of(&[1.0])
}

fn default_direction() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn default_green_kind() -> GreenKind {
    GreenKind::G
}

fn all_components() -> Vec<String> {
    ["xx", "xy", "xz", "yx", "yy", "yz", "zx", "zy", "zz"].iter().map(|s| s.to_string()).collect()
}

fn default_periods() -> f64 {
    20.0
}

fn default_samples() -> usize {
    2000
}

fn default_states() -> usize {
    100
}

fn default_basis() -> BasisSpec {
    BasisSpec::Frequencies { omegas: vec![1.0] }
}

fn default_initial() -> InitialSpec {
    InitialSpec { mode_d: vec![1.0], mode_b: Vec::new(), bath_amplitude: 0.0 }
}

fn default_integrator() -> IntegratorConfig {
    IntegratorConfig::new(0.01, 100.0).stride(10)
}

fn default_probes() -> Vec<usize> {
    vec![0]
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}
