use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kpzlab_core::models::{model_point, ModelSpec, PottsKind, Sides};
use kpzlab_core::spectra::PolyKind;
use kpzlab_core::verify::{Budget, Tier, DEFAULT_SEED};
use kpzlab_core::walksim::Geometry;
use kpzlab_core::{Frame, Locus, ModelPoint, Phase};
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliResult};

/// Exact 2D quantum-gravity exponents, multifractal spectra of harmonic
/// measure, and the lattice simulations that test them.
#[derive(Debug, Parser)]
#[command(name = "kpzlab", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write `<PREFIX>.json`, `<PREFIX>.csv` and `<PREFIX>.manifest.json` instead of printing.
    #[arg(long, global = true, value_name = "PREFIX")]
    pub out: Option<PathBuf>,
    /// What to print on stdout.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for simulations [default: available parallelism].
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a named exponent family.
    #[command(allow_negative_numbers = true)]
    Exponents(ExponentArgs),
    /// Tabulate a multifractal spectrum.
    #[command(allow_negative_numbers = true)]
    Spectra(SpectraArgs),
    /// Run a Monte Carlo campaign.
    Sim(SimArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

/// Mutually exclusive ways to name the universality class.
#[derive(Debug, Clone, Default, Args)]
#[group(id = "model", multiple = false)]
pub struct ModelArgs {
    /// Central charge.
    #[arg(long)]
    pub c: Option<f64>,
    /// SLE parameter.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Coulomb-gas coupling, κ = 4/g.
    #[arg(long)]
    pub g: Option<f64>,
    /// Potts state number (critical, or tricritical with `--phase dilute`).
    #[arg(long = "Q", value_name = "Q")]
    pub q_potts: Option<f64>,
    /// O(N) loop fugacity; needs `--phase`.
    #[arg(long = "N", value_name = "N")]
    pub n_loop: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    Dilute,
    Dense,
}

impl From<PhaseArg> for Phase {
    fn from(p: PhaseArg) -> Self {
        match p {
            PhaseArg::Dilute => Phase::Dilute,
            PhaseArg::Dense => Phase::Dense,
        }
    }
}

impl ModelArgs {
    pub fn spec(&self, phase: Option<PhaseArg>) -> CliResult<ModelSpec> {
        let phase = phase.map(Phase::from);
        if let Some(c) = self.c {
            return Ok(match phase {
                Some(p) => ModelSpec::CentralChargeInPhase(c, p),
                None => ModelSpec::CentralCharge(c),
            });
        }
        if let Some(kappa) = self.kappa {
            return Ok(ModelSpec::Kappa(kappa));
        }
        if let Some(g) = self.g {
            return Ok(ModelSpec::Coupling(g));
        }
        if let Some(q) = self.q_potts {
            let kind = if phase == Some(Phase::Dilute) { PottsKind::Tricritical } else { PottsKind::Critical };
            return Ok(ModelSpec::Potts { q, kind });
        }
        if let Some(n) = self.n_loop {
            let phase = phase.ok_or_else(|| usage("--N needs --phase dilute|dense"))?;
            return Ok(ModelSpec::Loop { n, phase });
        }
        Err(usage("select a model with one of --c, --kappa, --g, --Q, --N"))
    }

    pub fn point(&self, phase: Option<PhaseArg>) -> CliResult<ModelPoint> {
        Ok(model_point(self.spec(phase)?)?)
    }

    /// The central charge; `--c` is taken as given, without fixing a phase.
    pub fn central_charge(&self, phase: Option<PhaseArg>) -> CliResult<f64> {
        match self.c {
            Some(c) => Ok(c),
            None => Ok(self.point(phase)?.c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LocusArg {
    Bulk,
    Boundary,
}

impl From<LocusArg> for Locus {
    fn from(l: LocusArg) -> Self {
        match l {
            LocusArg::Bulk => Locus::Bulk,
            LocusArg::Boundary => Locus::Boundary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameArg {
    Planar,
    Qg,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Planar => Frame::Planar,
            FrameArg::Qg => Frame::QuantumGravity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SidesArg {
    One,
    Two,
}

impl From<SidesArg> for Sides {
    fn from(s: SidesArg) -> Self {
        match s {
            SidesArg::One => Sides::One,
            SidesArg::Two => Sides::Two,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExponentSelector {
    Zeta,
    Packet,
    Copolymer,
    Perc,
    Watermelon,
    Dims,
    SleMoment,
    Disconnection,
    DoubleSided,
    Winding,
    Sde,
    Kac,
    Cpa,
}

#[derive(Debug, Args)]
pub struct ExponentArgs {
    #[arg(value_enum)]
    pub selector: ExponentSelector,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub phase: Option<PhaseArg>,
    /// Number of paths, legs or strands.
    #[arg(long = "L", value_name = "L")]
    pub legs: Option<f64>,
    #[arg(long, value_enum, default_value_t = LocusArg::Bulk)]
    pub locus: LocusArg,
    #[arg(long, value_enum, default_value_t = FrameArg::Planar)]
    pub frame: FrameArg,
    /// Packet sizes: `n` Brownian paths, or `n:m` Brownian paths and SAWs.
    #[arg(long, value_delimiter = ',')]
    pub packets: Vec<String>,
    /// Extra mutually-avoiding strands of a copolymer star.
    #[arg(long, default_value_t = 0)]
    pub strands: u32,
    /// Moment order.
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub n1: Option<f64>,
    #[arg(long)]
    pub n2: Option<f64>,
    #[arg(long, value_enum, default_value_t = SidesArg::One)]
    pub sides: SidesArg,
    /// Subtract the bare watermelon from an SLE star exponent.
    #[arg(long)]
    pub subtracted: bool,
    /// Winding strands.
    #[arg(long)]
    pub k: Option<u32>,
    /// Pinched strand pairs.
    #[arg(long)]
    pub j: Option<u32>,
    #[arg(long)]
    pub xa: Option<f64>,
    #[arg(long)]
    pub xb: Option<f64>,
    /// Kač row index.
    #[arg(long)]
    pub p: Option<f64>,
    /// Kač column index.
    #[arg(long)]
    pub q: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumKind {
    Tau,
    #[value(name = "D")]
    D,
    F,
    Mixed,
    Wedge,
    Poly,
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolyKindArg {
    Generic,
    BrownianCut,
    SawStar,
}

impl From<PolyKindArg> for PolyKind {
    fn from(k: PolyKindArg) -> Self {
        match k {
            PolyKindArg::Generic => PolyKind::Generic,
            PolyKindArg::BrownianCut => PolyKind::BrownianCut,
            PolyKindArg::SawStar => PolyKind::SawStar,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectraArgs {
    #[arg(value_enum)]
    pub kind: SpectrumKind,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub phase: Option<PhaseArg>,
    /// First abscissa of the grid.
    #[arg(long)]
    pub from: Option<f64>,
    /// Last abscissa of the grid.
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Single moment order (tau, D).
    #[arg(long)]
    pub n: Option<f64>,
    /// Single Hölder exponent (f, mixed, poly, density).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Single wedge angle (wedge).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Winding rate.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Number of arms (poly).
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = PolyKindArg::Generic)]
    pub poly_kind: PolyKindArg,
    /// Scale ratio R (density).
    #[arg(long, default_value_t = 1000.0)]
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    Walk,
    Perc,
    Sle,
    Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryArg {
    Plane,
    HalfPlane,
}

impl From<GeometryArg> for Geometry {
    fn from(g: GeometryArg) -> Self {
        match g {
            GeometryArg::Plane => Geometry::Plane,
            GeometryArg::HalfPlane => Geometry::HalfPlane,
        }
    }
}

/// Simulation parameters; flags override the `--config` file, which
/// overrides the defaults.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    /// Brownian paths per packet (walk).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub packets: Option<Vec<u32>>,
    /// Horizon in steps (walk).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<u64>,
    /// Walk samples, or conditioned clusters (perc).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryArg>,
    /// Fit window start (walk).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_from: Option<f64>,
    /// Fit window end (walk).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_to: Option<f64>,
    /// Lattice side (perc, harmonic).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Traces (sle).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traces: Option<usize>,
    /// Loewner steps per trace (sle).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Absorbing clusters (harmonic).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fields: Option<usize>,
    /// Walkers per cluster (harmonic).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walkers: Option<u64>,
}

impl SimParams {
    /// Fields set here win over those set in `base`.
    pub fn over(self, base: SimParams) -> SimParams {
        SimParams {
            packets: self.packets.or(base.packets),
            tmax: self.tmax.or(base.tmax),
            samples: self.samples.or(base.samples),
            geometry: self.geometry.or(base.geometry),
            window_from: self.window_from.or(base.window_from),
            window_to: self.window_to.or(base.window_to),
            side: self.side.or(base.side),
            kappa: self.kappa.or(base.kappa),
            traces: self.traces.or(base.traces),
            steps: self.steps.or(base.steps),
            fields: self.fields.or(base.fields),
            walkers: self.walkers.or(base.walkers),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(value_enum)]
    pub kind: SimKind,
    #[command(flatten)]
    pub params: SimParams,
    /// JSON file with simulation parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TierArg {
    Exact,
    Mc,
    All,
}

impl From<TierArg> for Tier {
    fn from(t: TierArg) -> Self {
        match t {
            TierArg::Exact => Tier::Exact,
            TierArg::Mc => Tier::Mc,
            TierArg::All => Tier::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BudgetArg {
    Full,
    Fast,
}

impl From<BudgetArg> for Budget {
    fn from(b: BudgetArg) -> Self {
        match b {
            BudgetArg::Full => Budget::Full,
            BudgetArg::Fast => Budget::Fast,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub tier: TierArg,
    #[arg(long, value_enum, default_value_t = BudgetArg::Full)]
    pub budget: BudgetArg,
}
