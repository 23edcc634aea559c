//! Run configuration: flag parsing helpers, rational parameters, and the
//! fully-resolved config echoed into every output.

use anyhow::{anyhow, bail, Context, Result};
use helix_core::elliptic::EllipticContext;
use helix_core::lattice::{build_lattice, Boundary, ChiralityVector};
use helix_core::model::ModelSpec;
use helix_core::spin::build_spin_rep;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A parameter that may be given exactly as a rational (e.g. "2/11"),
/// as a rational multiple of tau ("10/27t"), or as a complex pair
/// ("re,im"). The exact form is kept for reporting; conversion to
/// floating point happens once, here.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Parameter {
    /// The literal input text.
    pub raw: String,
    /// Resolved value as [re, im].
    pub value: [f64; 2],
}

impl Parameter {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }
}

/// Parse "p/q", "p/qt" (times tau), "re,im", or a bare real.
pub fn parse_parameter(text: &str, tau: Complex64) -> Result<Parameter> {
    let raw = text.trim().to_owned();
    let value = if let Some(body) = raw.strip_suffix('t') {
        let scale = parse_real_or_rational(body)?;
        scale * tau
    } else if let Some((re, im)) = raw.split_once(',') {
        Complex64::new(
            parse_real_or_rational(re)?,
            parse_real_or_rational(im)?,
        )
    } else {
        Complex64::new(parse_real_or_rational(&raw)?, 0.0)
    };
    Ok(Parameter {
        raw,
        value: [value.re, value.im],
    })
}

fn parse_real_or_rational(text: &str) -> Result<f64> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .with_context(|| format!("bad numerator in {t:?}"))?;
        let d: f64 = den
            .trim()
            .parse()
            .with_context(|| format!("bad denominator in {t:?}"))?;
        if d == 0.0 {
            bail!("zero denominator in {t:?}");
        }
        Ok(n / d)
    } else {
        t.parse().with_context(|| format!("bad number {t:?}"))
    }
}

/// Parse a tau flag given as "re,im" or a bare imaginary part.
pub fn parse_tau(text: &str) -> Result<Complex64> {
    let t = text.trim();
    let tau = if let Some((re, im)) = t.split_once(',') {
        Complex64::new(parse_real_or_rational(re)?, parse_real_or_rational(im)?)
    } else {
        Complex64::new(0.0, parse_real_or_rational(t)?)
    };
    if tau.im <= 0.0 {
        bail!("tau must have positive imaginary part, got {tau}");
    }
    Ok(tau)
}

/// Parse a chirality flag like "+1", "-1", "+1,-1".
pub fn parse_epsilon(text: &str, d: usize) -> Result<ChiralityVector> {
    let signs: Result<Vec<i8>> = text
        .split(',')
        .map(|s| match s.trim() {
            "+1" | "1" | "+" => Ok(1i8),
            "-1" | "-" => Ok(-1i8),
            other => Err(anyhow!("chirality entries must be +1 or -1, got {other:?}")),
        })
        .collect();
    let signs = signs?;
    if signs.len() != d {
        bail!("chirality has {} entries, lattice has {d} axes", signs.len());
    }
    Ok(ChiralityVector(signs))
}

/// Model variant names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum VariantName {
    Xyz,
    Xxz,
    XyA,
    XyB,
    LongRange,
    DirectionDependent,
    OpenChain,
}

/// Fully-resolved model description, echoed into every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    pub variant: VariantName,
    pub twice_s: u32,
    pub dims: Vec<usize>,
    pub boundary: String,
    pub eta: Option<Parameter>,
    pub eta_per_axis: Option<Vec<Parameter>>,
    pub tau: Option<[f64; 2]>,
    pub long_range_weights: Option<Vec<(usize, f64)>>,
    pub u0: Option<[f64; 2]>,
    /// Canonical representative of eta in the fundamental rectangle.
    pub eta_canonical: Option<[f64; 2]>,
}

impl ModelConfig {
    /// Build the core model spec this config describes.
    pub fn to_spec(&self) -> Result<ModelSpec> {
        let rep = build_spin_rep(self.twice_s)?;
        let boundary = match self.boundary.as_str() {
            "periodic" => Boundary::Periodic,
            "open" => Boundary::Open,
            other => bail!("unknown boundary {other:?}"),
        };
        let lattice = build_lattice(&self.dims, boundary)?;
        let tau = self.tau.map(|t| Complex64::new(t[0], t[1]));
        let ctx = match tau {
            Some(t) => Some(EllipticContext::new(t)?),
            None => None,
        };
        let eta = self.eta.as_ref().map(|p| p.complex());
        let spec = match self.variant {
            VariantName::Xxz => ModelSpec::xxz(
                eta.ok_or_else(|| anyhow!("eta is required"))?,
                rep,
                lattice,
            ),
            VariantName::Xyz => ModelSpec::xyz(
                eta.ok_or_else(|| anyhow!("eta is required"))?,
                ctx.ok_or_else(|| anyhow!("tau is required"))?,
                rep,
                lattice,
            ),
            VariantName::XyA => {
                ModelSpec::xy_a(ctx.ok_or_else(|| anyhow!("tau is required"))?, rep, lattice)
            }
            VariantName::XyB => {
                ModelSpec::xy_b(ctx.ok_or_else(|| anyhow!("tau is required"))?, rep, lattice)
            }
            VariantName::LongRange => ModelSpec::long_range(
                eta.ok_or_else(|| anyhow!("eta is required"))?,
                ctx.ok_or_else(|| anyhow!("tau is required"))?,
                self.long_range_weights
                    .clone()
                    .ok_or_else(|| anyhow!("long_range_weights are required"))?,
                rep,
                lattice,
            ),
            VariantName::DirectionDependent => {
                let etas = self
                    .eta_per_axis
                    .as_ref()
                    .ok_or_else(|| anyhow!("eta_per_axis is required"))?
                    .iter()
                    .map(|p| p.complex())
                    .collect();
                ModelSpec::direction_dependent(
                    etas,
                    ctx.ok_or_else(|| anyhow!("tau is required"))?,
                    rep,
                    lattice,
                )
            }
            VariantName::OpenChain => ModelSpec::open_chain(
                eta.ok_or_else(|| anyhow!("eta is required"))?,
                ctx.ok_or_else(|| anyhow!("tau is required"))?,
                self.u0
                    .map(|u| Complex64::new(u[0], u[1]))
                    .ok_or_else(|| anyhow!("u0 is required"))?,
                rep,
                lattice,
            ),
        };
        Ok(spec)
    }
}
