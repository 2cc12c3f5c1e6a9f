//! Run configuration and its flat `key = value` file format.
//!
//! ```text
//! # NLS lattice, semiexplicit order 4
//! model = nls
//! nls_sites = 5
//! method = semiexplicit
//! composition = triple_jump
//! order = 4
//! dt = 1e-3
//! T = 1000
//! eps = 1e-10
//! solver = simplified_newton
//! stride = 1000
//! out = nls_se4.csv
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::composition::{CompositionKind, CompositionScheme};
use crate::error::{Error, Result};
use crate::models::{
    disparate_ten_vortex_config, nls_model, nls_standard_ic, quartic_exact_model, quartic_standard_ic, ten_vortex_config,
    vortex_model, vortex_to_canonical, HamiltonianModel, PhasePoint, VortexConfig,
};
use crate::projection::{SolverConfig, SolverMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VortexIc {
    /// Ten vortices with circulations in `(-1, 1)`.
    Ten,
    /// Ten vortices with disparate circulations.
    Disparate,
}

impl VortexIc {
    pub fn config(self) -> VortexConfig {
        match self {
            Self::Ten => ten_vortex_config(),
            Self::Disparate => disparate_ten_vortex_config(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSpec {
    Quartic,
    Nls { sites: usize },
    Vortex { ic: VortexIc },
}

impl ModelSpec {
    pub fn build(&self) -> Result<Box<dyn HamiltonianModel>> {
        Ok(match *self {
            Self::Quartic => Box::new(quartic_exact_model()),
            Self::Nls { sites } => Box::new(nls_model(sites)?),
            Self::Vortex { ic } => Box::new(vortex_model(&ic.config())?),
        })
    }

    pub fn initial_condition(&self) -> Result<PhasePoint> {
        match *self {
            Self::Quartic => Ok(quartic_standard_ic()),
            Self::Nls { sites: 5 } => Ok(nls_standard_ic()),
            Self::Nls { sites } => {
                // Same pattern as the five-site state: one excited site plus small noise.
                let mut q = vec![0.01; sites];
                let mut p = vec![0.0; sites];
                q[0] = 3.0;
                p[0] = 1.0;
                PhasePoint::new(q, p)
            }
            Self::Vortex { ic } => vortex_to_canonical(&ic.config()),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::Quartic => "quartic",
            Self::Nls { .. } => "nls",
            Self::Vortex { .. } => "vortex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Pihajoki,
    Tao,
    Semiexplicit,
    Midpoint,
    Irk4,
}

impl MethodKind {
    pub fn is_extended(self) -> bool {
        matches!(self, Self::Pihajoki | Self::Tao)
    }

    pub fn has_solver(self) -> bool {
        !self.is_extended()
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pihajoki" => Ok(Self::Pihajoki),
            "tao" => Ok(Self::Tao),
            "semiexplicit" => Ok(Self::Semiexplicit),
            "midpoint" => Ok(Self::Midpoint),
            "irk4" => Ok(Self::Irk4),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pihajoki => "pihajoki",
            Self::Tao => "tao",
            Self::Semiexplicit => "semiexplicit",
            Self::Midpoint => "midpoint",
            Self::Irk4 => "irk4",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub method: MethodKind,
    pub composition: CompositionKind,
    pub order: u32,
    pub dt: f64,
    pub t_end: f64,
    pub omega: Option<f64>,
    pub solver: SolverConfig,
    pub stride: usize,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::Quartic,
            method: MethodKind::Semiexplicit,
            composition: CompositionKind::None,
            order: 2,
            dt: 1e-2,
            t_end: 1.0,
            omega: None,
            solver: SolverConfig::default(),
            stride: 1,
            out: None,
            seed: 0,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("cannot parse {key} = {value:?}")))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt != 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be nonzero and finite, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("T must be non-negative, got {}", self.t_end)));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        if self.method == MethodKind::Tao && self.omega.is_none() {
            return Err(Error::Config("method tao requires omega".into()));
        }
        if matches!(self.method, MethodKind::Midpoint | MethodKind::Irk4) && self.composition != CompositionKind::None {
            return Err(Error::Config(format!("method {} does not take a composition", self.method)));
        }
        if self.method.has_solver() {
            self.solver.validate()?;
        }
        self.scheme().map(|_| ())
    }

    pub fn scheme(&self) -> Result<CompositionScheme> {
        CompositionScheme::build(self.composition, self.order)
    }

    /// Number of steps: `floor(T / |dt|)`.
    pub fn steps(&self) -> usize {
        let ratio = self.t_end / self.dt.abs();
        (ratio * (1.0 + 1e-12)).floor() as usize
    }

    /// Short label such as `semiexplicit-S 4`.
    pub fn label(&self) -> String {
        let order = match self.method {
            MethodKind::Midpoint => 2,
            MethodKind::Irk4 => 4,
            _ => self.order,
        };
        let suffix = match self.composition {
            CompositionKind::Suzuki => "-S",
            CompositionKind::Yoshida6 => "-Y",
            _ => "",
        };
        match self.method {
            MethodKind::Midpoint => "midpoint".into(),
            MethodKind::Irk4 => "irk4".into(),
            m => format!("{m}{suffix} {order}"),
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "model" => {
                self.model = match value {
                    "quartic" => ModelSpec::Quartic,
                    "nls" => ModelSpec::Nls { sites: self.nls_sites().unwrap_or(5) },
                    "vortex" => ModelSpec::Vortex { ic: self.vortex_ic().unwrap_or(VortexIc::Ten) },
                    other => return Err(Error::Config(format!("unknown model {other:?}"))),
                }
            }
            "nls_sites" => self.model = ModelSpec::Nls { sites: parse_num("nls_sites", value)? },
            "vortex_ic" => {
                let ic = match value {
                    "ten" => VortexIc::Ten,
                    "disparate" => VortexIc::Disparate,
                    other => return Err(Error::Config(format!("unknown vortex_ic {other:?}"))),
                };
                self.model = ModelSpec::Vortex { ic };
            }
            "method" => self.method = value.parse()?,
            "composition" => {
                self.composition = value.parse()?;
                if self.composition == CompositionKind::Yoshida6 {
                    self.order = 6;
                }
            }
            "order" => self.order = parse_num("order", value)?,
            "dt" => self.dt = parse_num("dt", value)?,
            "T" | "t_end" => self.t_end = parse_num("T", value)?,
            "omega" => self.omega = Some(parse_num("omega", value)?),
            "eps" | "tolerance" => self.solver.tolerance = parse_num("eps", value)?,
            "max_iterations" => self.solver.max_iterations = parse_num("max_iterations", value)?,
            "solver" => self.solver.method = value.parse::<SolverMethod>()?,
            "stride" => self.stride = parse_num("stride", value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "seed" => self.seed = parse_num("seed", value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    fn nls_sites(&self) -> Option<usize> {
        match self.model {
            ModelSpec::Nls { sites } => Some(sites),
            _ => None,
        }
    }

    fn vortex_ic(&self) -> Option<VortexIc> {
        match self.model {
            ModelSpec::Vortex { ic } => Some(ic),
            _ => None,
        }
    }

    /// Parses the flat text format; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Serializes back to the flat text format.
    pub fn to_text(&self) -> String {
        let mut lines = vec![format!("model = {}", self.model.id())];
        match self.model {
            ModelSpec::Nls { sites } => lines.push(format!("nls_sites = {sites}")),
            ModelSpec::Vortex { ic } => lines.push(format!(
                "vortex_ic = {}",
                match ic {
                    VortexIc::Ten => "ten",
                    VortexIc::Disparate => "disparate",
                }
            )),
            ModelSpec::Quartic => {}
        }
        lines.push(format!("method = {}", self.method));
        lines.push(format!("composition = {}", self.composition));
        lines.push(format!("order = {}", self.order));
        lines.push(format!("dt = {:e}", self.dt));
        lines.push(format!("T = {}", self.t_end));
        if let Some(w) = self.omega {
            lines.push(format!("omega = {w}"));
        }
        lines.push(format!("eps = {:e}", self.solver.tolerance));
        lines.push(format!("max_iterations = {}", self.solver.max_iterations));
        lines.push(format!("solver = {}", self.solver.method));
        lines.push(format!("stride = {}", self.stride));
        if let Some(out) = &self.out {
            lines.push(format!("out = {}", out.display()));
        }
        lines.push(format!("seed = {}", self.seed));
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let cfg = RunConfig::parse(
            "# comment\nmodel = nls\nnls_sites = 5\nmethod = semiexplicit\ncomposition = triple_jump\norder = 4\n\
             dt = 1e-3\nT = 1000\neps = 1e-10\nsolver = broyden\nstride = 1000 # trailing\nout = a.csv\n",
        )
        .unwrap();
        assert_eq!(cfg.model, ModelSpec::Nls { sites: 5 });
        assert_eq!(cfg.order, 4);
        assert_eq!(cfg.solver.method, SolverMethod::Broyden);
        assert_eq!(cfg.steps(), 1_000_000);
        assert_eq!(cfg.label(), "semiexplicit 4");
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::parse("model = pendulum").is_err());
        assert!(RunConfig::parse("dt 0.1").is_err());
        assert!(RunConfig::parse("colour = red").is_err());
        let tao = RunConfig { method: MethodKind::Tao, ..RunConfig::default() };
        assert!(tao.validate().is_err());
        let zero = RunConfig { dt: 0.0, ..RunConfig::default() };
        assert!(zero.validate().is_err());
        let stride = RunConfig { stride: 0, ..RunConfig::default() };
        assert!(stride.validate().is_err());
    }

    #[test]
    fn step_count_tolerates_rounding() {
        let cfg = RunConfig { dt: 0.1, t_end: 0.3, ..RunConfig::default() };
        assert_eq!(cfg.steps(), 3);
        let cfg = RunConfig { dt: 1e-3, t_end: 1.0, ..RunConfig::default() };
        assert_eq!(cfg.steps(), 1000);
    }
}
