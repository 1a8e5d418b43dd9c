//! Constant material properties and the `pbfmat` file format.

use crate::error::{Error, Result};

/// Density, heat capacity and conductivity of the bed. The diffusivity is
/// always derived from the other three.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    rho: f64,
    cp: f64,
    lambda: f64,
    kappa: f64,
}

impl MaterialParams {
    pub fn new(rho: f64, cp: f64, lambda: f64) -> Result<Self> {
        for (name, val) in [("rho", rho), ("cp", cp), ("lambda", lambda)] {
            if !(val.is_finite() && val > 0.0) {
                return Err(Error::Validation(format!("{name} must be positive, got {val}")));
            }
        }
        Ok(Self {
            rho,
            cp,
            lambda,
            kappa: lambda / (rho * cp),
        })
    }

    /// Builds a material from conductivity and diffusivity, picking `cp` so
    /// that `lambda / (rho * cp)` reproduces `kappa`.
    pub fn from_diffusivity(rho: f64, lambda: f64, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Validation(format!("kappa must be positive, got {kappa}")));
        }
        Self::new(rho, lambda / (rho * kappa), lambda)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn cp(&self) -> f64 {
        self.cp
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Thermal diffusivity in m²/s.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Volumetric heat capacity `rho * cp` in J/(m³·K).
    pub fn heat_capacity(&self) -> f64 {
        self.rho * self.cp
    }
}

/// Contents of a material file: the material plus the bulk initial temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialFile {
    pub material: MaterialParams,
    pub u_init: f64,
}

pub const MATERIAL_HEADER: &str = "pbfmat 1";

/// Parses `pbfmat 1` followed by `rho cp lambda u_init` (SI, kelvin).
pub fn parse_material(text: &str) -> Result<MaterialFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, l)) if l.split_whitespace().collect::<Vec<_>>() == ["pbfmat", "1"] => {}
        Some((n, l)) => {
            return Err(Error::parse(
                n,
                format!("expected header `{MATERIAL_HEADER}`, got `{l}`"),
            ))
        }
        None => return Err(Error::Validation("empty material file".into())),
    }
    let (n, body) = lines
        .next()
        .ok_or_else(|| Error::Validation("material file has no property record".into()))?;
    let vals = body
        .split_whitespace()
        .map(|tok| tok.parse::<f64>().map_err(|e| Error::parse(n, format!("`{tok}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if vals.len() != 4 {
        return Err(Error::parse(n, format!("expected 4 fields, got {}", vals.len())));
    }
    if let Some((n, l)) = lines.next() {
        return Err(Error::parse(n, format!("unexpected trailing record `{l}`")));
    }
    let u_init = vals[3];
    if !u_init.is_finite() {
        return Err(Error::parse(n, "u_init must be finite"));
    }
    Ok(MaterialFile {
        material: MaterialParams::new(vals[0], vals[1], vals[2])?,
        u_init,
    })
}

/// Writes a material file readable by [`parse_material`].
pub fn format_material(m: &MaterialFile) -> String {
    format!(
        "{MATERIAL_HEADER}\n{:e} {:e} {:e} {:e}\n",
        m.material.rho, m.material.cp, m.material.lambda, m.u_init
    )
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}
