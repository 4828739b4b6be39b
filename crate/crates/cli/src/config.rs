//! Experiment configuration: a TOML file with optional sections, every key
//! defaulted, command-line flags applied on top.
//!
//! ```toml
//! seed = 7
//!
//! [params]
//! r = 0.4
//! R = 1.0
//!
//! [potential]          # trapezoidal single-site well
//! depth = -1.0
//! half_width = 0.3
//! shoulder = 0.05
//!
//! [grid]
//! h = 0.02
//! box = 60.0           # Dirichlet box [-box, box]
//!
//! [schedule]
//! S = [5.0, 10.0, 20.0, 40.0]
//!
//! [tolerances]
//! tol = 1e-3           # natural-distance truncation
//! pitch = 0.05         # construction grid pitch
//! eig = 1e-10
//! edge = 1e-9
//!
//! [spectrum]
//! window = [-1.0, 5.0]
//!
//! [background]         # gluing background: period·Z + offset
//! period = 1.0
//! offset = 0.0
//!
//! [omega]
//! half_width = 4010.0  # default 4/tol + 10
//!
//! [output]
//! dir = "results"
//! ```

use std::path::PathBuf;

use delone_core::geometry::{CrystallographicSet, DeloneParams};
use delone_core::spectra::{ExperimentSpec, Potential};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSection {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        ParamsSection { r: 0.4, big_r: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSection {
    pub depth: f64,
    pub half_width: f64,
    pub shoulder: f64,
}

impl Default for PotentialSection {
    fn default() -> Self {
        PotentialSection {
            depth: -1.0,
            half_width: 0.3,
            shoulder: 0.05,
        }
    }
}

impl PotentialSection {
    pub fn build(&self) -> CliResult<Potential> {
        Ok(Potential::trapezoid(self.depth, self.half_width, self.shoulder)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub h: f64,
    #[serde(rename = "box")]
    pub box_half_width: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let spec = ExperimentSpec::default();
        GridSection {
            h: spec.h,
            box_half_width: spec.box_half_width,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSection {
    #[serde(rename = "S")]
    pub s: Vec<f64>,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        ScheduleSection {
            s: ExperimentSpec::default().schedule,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub tol: f64,
    pub pitch: f64,
    pub eig: f64,
    pub edge: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let spec = ExperimentSpec::default();
        Tolerances {
            tol: spec.tol,
            pitch: spec.pitch,
            eig: spec.eig_tol,
            edge: spec.edge_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub window: [f64; 2],
}

impl Default for SpectrumSection {
    fn default() -> Self {
        let (a, b) = ExperimentSpec::default().window;
        SpectrumSection { window: [a, b] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundSection {
    pub period: f64,
    pub offset: f64,
}

impl Default for BackgroundSection {
    fn default() -> Self {
        BackgroundSection {
            period: 1.0,
            offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OmegaSection {
    pub half_width: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub params: ParamsSection,
    pub potential: PotentialSection,
    pub grid: GridSection,
    pub schedule: ScheduleSection,
    pub tolerances: Tolerances,
    pub spectrum: SpectrumSection,
    pub background: BackgroundSection,
    pub omega: OmegaSection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 7,
            params: ParamsSection::default(),
            potential: PotentialSection::default(),
            grid: GridSection::default(),
            schedule: ScheduleSection::default(),
            tolerances: Tolerances::default(),
            spectrum: SpectrumSection::default(),
            background: BackgroundSection::default(),
            omega: OmegaSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// The effective configuration with the output location removed, as
    /// hashed into the provenance record.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.output = OutputSection::default();
        toml::to_string(&c).expect("configs serialise to TOML")
    }

    pub fn delone_params(&self) -> CliResult<DeloneParams> {
        Ok(DeloneParams::new(self.params.r, self.params.big_r, 1)?)
    }

    pub fn omega_half_width(&self) -> f64 {
        self.omega.half_width.unwrap_or(4.0 / self.tolerances.tol + 10.0)
    }

    pub fn spec(&self) -> ExperimentSpec {
        ExperimentSpec {
            schedule: self.schedule.s.clone(),
            box_half_width: self.grid.box_half_width,
            h: self.grid.h,
            window: (self.spectrum.window[0], self.spectrum.window[1]),
            tol: self.tolerances.tol,
            pitch: self.tolerances.pitch,
            eig_tol: self.tolerances.eig,
            edge_tol: self.tolerances.edge,
        }
    }

    pub fn background(&self) -> CliResult<CrystallographicSet> {
        Ok(CrystallographicSet::lattice_1d(
            self.background.period,
            self.background.offset,
            self.delone_params()?,
        )?)
    }

    /// Checks every invariant; failures are configuration errors (exit 2).
    pub fn validate(&self) -> CliResult<()> {
        let wrap = |e: delone_core::Error| CliError::Config(e.to_string());
        self.spec().validate().map_err(wrap)?;
        self.delone_params().map_err(|e| match e {
            CliError::Core(e) => wrap(e),
            other => other,
        })?;
        self.potential.build().map_err(|e| CliError::Config(e.to_string()))?;
        let hw = self.omega_half_width();
        if !(hw > 0.0 && hw.is_finite()) {
            return Err(CliError::Config(format!("omega half-width must be positive, got {hw}")));
        }
        if !(self.background.period > 0.0 && self.background.period.is_finite() && self.background.offset.is_finite()) {
            return Err(CliError::Config(format!(
                "background needs a positive period and finite offset, got {:?}",
                self.background
            )));
        }
        Ok(())
    }
}
