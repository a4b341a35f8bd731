//! TOML run configuration: schema, validation, and the canonical digest
//! stamped into every artifact.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dps_core::birkhoff::SolverConfig;
use dps_core::carrier::CarrierLoop;
use dps_core::dalembert::FrameConfig;
use dps_core::mat2::Mat2;
use dps_core::potentials::{
    xi_minus_raw, xi_plus_raw, DressedPotential, Dressing, Potential, PotentialPair, SampledFn,
};
use dps_core::Rect;
use serde::Deserialize;
use sha2::{Digest, Sha256};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Build,
    Evolve,
    Validate,
    Example,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Mode::Build => "build",
            Mode::Evolve => "evolve",
            Mode::Validate => "validate",
            Mode::Example => "example",
        };
        f.write_str(s)
    }
}

/// One-variable function spec: closed-form presets or an explicit table.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum FnSpec {
    Constant { value: f64 },
    Linear { intercept: f64, slope: f64 },
    Sinusoidal { amplitude: f64, frequency: f64, phase: f64, offset: f64 },
    Table {
        values: Vec<f64>,
        #[serde(default)]
        start: i32,
    },
}

impl FnSpec {
    pub fn to_sampled(&self) -> SampledFn {
        match self {
            FnSpec::Constant { value } => SampledFn::Constant(*value),
            FnSpec::Linear { intercept, slope } => SampledFn::Linear {
                intercept: *intercept,
                slope: *slope,
            },
            FnSpec::Sinusoidal { amplitude, frequency, phase, offset } => SampledFn::Sinusoidal {
                amplitude: *amplitude,
                frequency: *frequency,
                phase: *phase,
                offset: *offset,
            },
            FnSpec::Table { values, start } => SampledFn::Table {
                start: *start,
                values: values.clone(),
            },
        }
    }

    fn canonical(&self, out: &mut String) {
        match self {
            FnSpec::Constant { value } => {
                let _ = write!(out, "constant({value:e})");
            }
            FnSpec::Linear { intercept, slope } => {
                let _ = write!(out, "linear({intercept:e},{slope:e})");
            }
            FnSpec::Sinusoidal { amplitude, frequency, phase, offset } => {
                let _ = write!(out, "sin({amplitude:e},{frequency:e},{phase:e},{offset:e})");
            }
            FnSpec::Table { values, start } => {
                let _ = write!(out, "table@{start}[");
                for v in values {
                    let _ = write!(out, "{v:e},");
                }
                out.push(']');
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    #[serde(default)]
    pub n_min: i32,
    pub n_max: i32,
    #[serde(default)]
    pub m_min: i32,
    pub m_max: i32,
}

impl LatticeSpec {
    pub fn rect(&self) -> Result<Rect, ConfigError> {
        if self.n_min > 0 || self.m_min > 0 || self.n_max < 0 || self.m_max < 0 {
            return Err(bad("lattice must contain the base point (0, 0)"));
        }
        if self.n_min > self.n_max || self.m_min > self.m_max {
            return Err(bad("empty lattice rectangle"));
        }
        Ok(Rect::new(self.n_min, self.n_max, self.m_min, self.m_max))
    }
}

/// Dressing factor presets supported in configuration files. General
/// loop-valued dressing tables are an API-level feature; the config grammar
/// covers the diagonal-twist family used by surfaces of revolution.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum DressingSpec {
    Revolution { c: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub alpha: FnSpec,
    pub beta: FnSpec,
    pub p: FnSpec,
    pub q: FnSpec,
    /// Initial diagonal phase of the plus product: F₊(0) = diag(e^{is}, e^{-is}).
    #[serde(default)]
    pub s: f64,
    /// Initial diagonal phase of the minus product.
    #[serde(default)]
    pub l: f64,
    pub dressing: Option<DressingSpec>,
}

impl PotentialSpec {
    pub fn to_potential(&self, rect: Rect) -> Result<Potential, ConfigError> {
        let pair = PotentialPair::new(
            self.alpha.to_sampled(),
            self.beta.to_sampled(),
            self.p.to_sampled(),
            self.q.to_sampled(),
            (rect.n_min, rect.n_max),
            (rect.m_min, rect.m_max),
        )
        .map_err(|e| bad(e.to_string()))?;

        let (p_minus_right, p_plus_right) = match &self.dressing {
            None => (Dressing::Identity, Dressing::Identity),
            Some(DressingSpec::Revolution { c }) => {
                let q0 = match self.q.to_sampled() {
                    SampledFn::Constant(v) => v,
                    _ => return Err(bad("the revolution dressing preset needs constant q")),
                };
                let minus = CarrierLoop::from_unitary(Mat2::phase_diag(*c))
                    .mul(&xi_minus_raw(q0, 0.0), 8)
                    .map_err(|e| bad(e.to_string()))?;
                let plus = CarrierLoop::from_unitary(Mat2::phase_diag(-*c))
                    .mul(&xi_plus_raw(q0, 0.0).inverse(), 8)
                    .map_err(|e| bad(e.to_string()))?;
                (Dressing::Constant(minus), Dressing::Constant(plus))
            }
        };

        let dp = DressedPotential::new(
            pair,
            Dressing::Identity,
            p_minus_right,
            Dressing::Identity,
            p_plus_right,
            Mat2::phase_diag(self.s),
            Mat2::phase_diag(self.l),
        )
        .map_err(|e| bad(e.to_string()))?;
        Ok(Potential::Dressed(dp))
    }

    fn canonical(&self, out: &mut String) {
        out.push_str("alpha=");
        self.alpha.canonical(out);
        out.push_str(";beta=");
        self.beta.canonical(out);
        out.push_str(";p=");
        self.p.canonical(out);
        out.push_str(";q=");
        self.q.canonical(out);
        let _ = write!(out, ";s={:e};l={:e}", self.s, self.l);
        match &self.dressing {
            None => out.push_str(";dressing=none"),
            Some(DressingSpec::Revolution { c }) => {
                let _ = write!(out, ";dressing=revolution({c:e})");
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    /// Inline row data u(n, 0), or a two-column CSV path.
    pub u_row: Option<Vec<f64>>,
    pub u_row_csv: Option<PathBuf>,
    pub u_col: Option<Vec<f64>>,
    pub u_col_csv: Option<PathBuf>,
    pub p: FnSpec,
    pub q: FnSpec,
    #[serde(default)]
    pub u00: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    /// 0 = choose from the pole-radius decay heuristic.
    pub truncation_k: usize,
    pub residual_tol: f64,
    pub max_k: usize,
    pub circle_samples: usize,
    pub condition_warn: f64,
    /// 0 = derive from the lattice extent.
    pub max_band: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            truncation_k: 0,
            residual_tol: 1e-12,
            max_k: 1024,
            circle_samples: 64,
            condition_warn: 1e12,
            max_band: 0,
        }
    }
}

impl SolverSpec {
    pub fn frame_config(&self, decay_radius: f64, unitarity_tol: f64) -> FrameConfig {
        let mut solver = SolverConfig::for_decay_radius(decay_radius, self.residual_tol);
        if self.truncation_k != 0 {
            solver.truncation_k = self.truncation_k;
        }
        solver.max_k = self.max_k;
        solver.circle_samples = self.circle_samples;
        solver.condition_warn = self.condition_warn;
        FrameConfig {
            solver,
            max_band: self.max_band,
            unitarity_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSpec {
    pub geometry_tol: f64,
    pub unitarity_tol: f64,
    pub dependence_tol: f64,
    pub equivalence_tol: f64,
    pub hirota_tol: f64,
    pub q_form_tol: f64,
    pub mc_shape_tol: f64,
}

impl Default for CheckSpec {
    fn default() -> Self {
        CheckSpec {
            geometry_tol: 1e-8,
            unitarity_tol: 1e-8,
            dependence_tol: 1e-8,
            equivalence_tol: 1e-8,
            hirota_tol: 1e-12,
            q_form_tol: 1e-10,
            mc_shape_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// OBJ path; with several λ values the stem is suffixed per member.
    pub obj: Option<PathBuf>,
    pub report: Option<PathBuf>,
    /// Opt-in wall-clock header line in the OBJ output.
    pub timestamp_header: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub lattice: LatticeSpec,
    #[serde(default = "default_lambda")]
    pub lambda: Vec<f64>,
    pub potential: Option<PotentialSpec>,
    pub axis: Option<AxisSpec>,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub checks: CheckSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_lambda() -> Vec<f64> {
    vec![1.0]
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = toml::from_str(&text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let rect = self.lattice.rect()?;
        if self.lambda.is_empty() {
            return Err(bad("at least one λ0 is required"));
        }
        for l in &self.lambda {
            if !(*l > 0.0) {
                return Err(bad(format!(
                    "the associated family is parametrized by λ0 > 0, got {l}"
                )));
            }
        }
        if let Some(p) = &self.potential {
            // Constructing the potential performs the precondition checks
            // (α(0) = 0 and the 0 < |p/2| < 1, 0 < |q/2| < 1 bounds).
            p.to_potential(rect)?;
        }
        if let Some(a) = &self.axis {
            if a.u_row.is_none() && a.u_row_csv.is_none() {
                return Err(bad("axis data needs u_row or u_row_csv"));
            }
            if a.u_col.is_none() && a.u_col_csv.is_none() {
                return Err(bad("axis data needs u_col or u_col_csv"));
            }
        }
        Ok(())
    }

    /// The fastest coefficient decay radius of the potential's factors,
    /// bounding the Birkhoff truncation.
    pub fn decay_radius(&self) -> f64 {
        let mut r: f64 = 0.0;
        let rect = match self.lattice.rect() {
            Ok(rect) => rect,
            Err(_) => return 0.5,
        };
        let mut scan = |f: &FnSpec, lo: i32, hi: i32| {
            let s = f.to_sampled();
            for i in lo..=hi {
                if let Ok(v) = s.eval(i) {
                    r = r.max(v.abs() / 2.0);
                }
            }
        };
        if let Some(p) = &self.potential {
            scan(&p.p, rect.n_min, rect.n_max);
            scan(&p.q, rect.m_min, rect.m_max);
        }
        if let Some(a) = &self.axis {
            scan(&a.p, rect.n_min, rect.n_max);
            scan(&a.q, rect.m_min, rect.m_max);
        }
        if r == 0.0 || r >= 1.0 {
            0.5
        } else {
            r
        }
    }

    /// Stable content digest used as artifact provenance.
    pub fn digest(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "lattice={},{},{},{};lambda=",
            self.lattice.n_min, self.lattice.n_max, self.lattice.m_min, self.lattice.m_max
        );
        for l in &self.lambda {
            let _ = write!(s, "{l:e},");
        }
        if let Some(p) = &self.potential {
            s.push_str(";potential{");
            p.canonical(&mut s);
            s.push('}');
        }
        if let Some(a) = &self.axis {
            s.push_str(";axis{");
            if let Some(v) = &a.u_row {
                s.push_str("u_row=[");
                for x in v {
                    let _ = write!(s, "{x:e},");
                }
                s.push(']');
            }
            if let Some(pth) = &a.u_row_csv {
                let _ = write!(s, "u_row_csv={}", pth.display());
            }
            if let Some(v) = &a.u_col {
                s.push_str("u_col=[");
                for x in v {
                    let _ = write!(s, "{x:e},");
                }
                s.push(']');
            }
            if let Some(pth) = &a.u_col_csv {
                let _ = write!(s, "u_col_csv={}", pth.display());
            }
            s.push_str(";p=");
            a.p.canonical(&mut s);
            s.push_str(";q=");
            a.q.canonical(&mut s);
            let _ = write!(s, ";u00={:e}", a.u00);
            s.push('}');
        }
        let _ = write!(
            s,
            ";solver={},{:e},{},{},{:e},{}",
            self.solver.truncation_k,
            self.solver.residual_tol,
            self.solver.max_k,
            self.solver.circle_samples,
            self.solver.condition_warn,
            self.solver.max_band
        );
        let mut hasher = Sha256::new();
        hasher.update(s.as_bytes());
        hex::encode(hasher.finalize())
    }
}
