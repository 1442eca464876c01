//! Run configuration: a single JSON document naming the domain, operator
//! coefficients, kernel, nonlinearity, solver parameters, and (optionally) a
//! kernel family for sequence studies.

use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use bidrift_core::io::{read_xy_csv, resample_to_grid};
use bidrift_core::{
    build_grid, DomainSpec, Error, Grid, Kernel, KernelSequence, NonlinearSpec, OperatorParams,
    ProblemConfig, Result,
};

fn one() -> f64 {
    1.0
}

fn default_doubling_tol() -> f64 {
    1e-6
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub params: ParamsConfig,
    pub kernel: KernelConfig,
    pub nonlinearity: NonlinearityConfig,
    pub epsilon_margin: f64,
    pub tol: f64,
    pub max_iter: usize,
    #[serde(default)]
    pub dealias: bool,
    #[serde(default)]
    pub sequence: Option<SequenceConfig>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Pass threshold for the resolution-doubling cross-check.
    #[serde(default = "default_doubling_tol")]
    pub doubling_tol: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
    },
    GaussianDerivative {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
    },
    Cosine {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Two-column `x,value` samples, resampled onto the run grid.
    CustomCsv { path: PathBuf },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    Zero,
    Cosine {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Centred at 0 on the line and at pi on the interval.
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NonlinearityConfig {
    Zero,
    Source { h: SourceConfig },
    Sine { mu: f64, h: SourceConfig },
    Saturating { mu: f64, h: SourceConfig },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceConfig {
    Scaling {
        c: f64,
        m_list: Vec<u32>,
    },
    Mollification {
        m_list: Vec<u32>,
    },
    Perturbation {
        c: f64,
        m_list: Vec<u32>,
        /// Perturbation direction; defaults to a unit odd Gaussian bump.
        #[serde(default)]
        direction: Option<Box<KernelConfig>>,
    },
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let file = File::open(path)?;
        let config: RunConfig = serde_json::from_reader(BufReader::new(file))?;
        if !config.tol.is_finite() || config.tol <= 0.0 {
            return Err(Error::Config(format!(
                "tol = {} must be positive",
                config.tol
            )));
        }
        if config.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        Ok(config)
    }

    pub fn operator_params(&self) -> Result<OperatorParams> {
        OperatorParams::new(self.params.a, self.params.b)
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        Ok(Arc::new(build_grid(self.domain)?))
    }

    pub fn kernel(&self, grid: &Arc<Grid>) -> Result<Kernel> {
        build_kernel(&self.kernel, grid)
    }

    pub fn nonlinearity(&self, grid: &Arc<Grid>) -> Result<NonlinearSpec> {
        let source = match &self.nonlinearity {
            NonlinearityConfig::Zero => return Ok(NonlinearSpec::zero(grid)),
            NonlinearityConfig::Source { h }
            | NonlinearityConfig::Sine { h, .. }
            | NonlinearityConfig::Saturating { h, .. } => source_fn(h, grid),
        };
        match &self.nonlinearity {
            NonlinearityConfig::Zero => unreachable!(),
            NonlinearityConfig::Source { .. } => NonlinearSpec::source(grid, source, true),
            NonlinearityConfig::Sine { mu, .. } => NonlinearSpec::sine(grid, *mu, source, true),
            NonlinearityConfig::Saturating { mu, .. } => {
                NonlinearSpec::saturating(grid, *mu, source, true)
            }
        }
    }

    /// Assemble the validated problem for this configuration's domain.
    pub fn problem(&self) -> Result<ProblemConfig> {
        self.problem_on(self.domain)
    }

    /// Assemble the same problem on another resolution of the domain (used
    /// by the resolution-doubling cross-check).
    pub fn problem_on(&self, domain: DomainSpec) -> Result<ProblemConfig> {
        let grid = Arc::new(build_grid(domain)?);
        let params = self.operator_params()?;
        let kernel = self.kernel(&grid)?;
        let nonlinearity = self.nonlinearity(&grid)?;
        Ok(
            ProblemConfig::new(params, kernel, nonlinearity, self.epsilon_margin)?
                .with_dealias(self.dealias),
        )
    }

    pub fn sequence(&self, grid: &Arc<Grid>) -> Result<(KernelSequence, Vec<u32>)> {
        let Some(seq_cfg) = &self.sequence else {
            return Err(Error::Config(
                "this command needs a 'sequence' section in the configuration".into(),
            ));
        };
        let limit = self.kernel(grid)?;
        let (seq, m_list) = match seq_cfg {
            SequenceConfig::Scaling { c, m_list } => {
                (KernelSequence::scaling(limit, *c), m_list.clone())
            }
            SequenceConfig::Mollification { m_list } => {
                (KernelSequence::mollification(limit), m_list.clone())
            }
            SequenceConfig::Perturbation {
                c,
                m_list,
                direction,
            } => {
                let dir = match direction {
                    Some(cfg) => build_kernel(cfg, grid)?,
                    None => Kernel::gaussian_derivative(grid, 1.0, 1.0)?,
                };
                (
                    KernelSequence::perturbation(limit, &dir, *c)?,
                    m_list.clone(),
                )
            }
        };
        if m_list.is_empty() || m_list.contains(&0) {
            return Err(Error::Config(
                "sequence m_list must be nonempty with entries >= 1".into(),
            ));
        }
        Ok((seq, m_list))
    }
}

fn build_kernel(config: &KernelConfig, grid: &Arc<Grid>) -> Result<Kernel> {
    match config {
        KernelConfig::Gaussian { amplitude, width } => Kernel::gaussian(grid, *amplitude, *width),
        KernelConfig::GaussianDerivative { amplitude, width } => {
            Kernel::gaussian_derivative(grid, *amplitude, *width)
        }
        KernelConfig::Cosine { amplitude } => Kernel::cosine(grid, *amplitude),
        KernelConfig::CustomCsv { path } => {
            let file = File::open(path)
                .map_err(|e| Error::Config(format!("kernel CSV {}: {e}", path.display())))?;
            let (xs, values) = read_xy_csv(BufReader::new(file))?;
            Ok(Kernel::from_field(resample_to_grid(&xs, &values, grid)?))
        }
    }
}

#[derive(Clone, Copy)]
enum SourceTerm {
    Zero,
    Cosine { a: f64 },
    Gaussian { a: f64, w: f64, c: f64 },
}

impl SourceTerm {
    fn eval(self, x: f64) -> f64 {
        match self {
            SourceTerm::Zero => 0.0,
            SourceTerm::Cosine { a } => a * x.cos(),
            SourceTerm::Gaussian { a, w, c } => {
                let t = (x - c) / w;
                a * (-t * t).exp()
            }
        }
    }
}

fn source_fn(
    config: &SourceConfig,
    grid: &Arc<Grid>,
) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    let center = if grid.is_periodic() { PI } else { 0.0 };
    let term = match config {
        SourceConfig::Zero => SourceTerm::Zero,
        SourceConfig::Cosine { amplitude } => SourceTerm::Cosine { a: *amplitude },
        SourceConfig::Gaussian { amplitude, width } => SourceTerm::Gaussian {
            a: *amplitude,
            w: *width,
            c: center,
        },
    };
    move |x| term.eval(x)
}
