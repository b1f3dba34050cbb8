//! Exact rational-function arithmetic, radical extensions, parsing and
//! formal power series.

pub mod gcd;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod radical;
pub mod rat;
pub mod series;

pub use matrix::Mat;
pub use parse::parse_expression;
pub use poly::{Mono, MultiPoly};
pub use radical::{rad_is_zero, RadExt, RadZero};
pub use rat::RatFun;
pub use series::{char_coeffs, series_expand, MatrixSeries};

use crate::error::{Error, Result};

/// Ordered variable names: coordinates first, then parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarSet {
    coords: Vec<String>,
    params: Vec<String>,
}

impl VarSet {
    pub fn new<S: AsRef<str>>(coords: &[S], params: &[S]) -> Result<Self> {
        let coords: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        let params: Vec<String> = params.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = std::collections::HashSet::new();
        for name in coords.iter().chain(&params) {
            if !valid_identifier(name) {
                return Err(Error::Document(format!("invalid variable name `{name}`")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Document(format!("duplicate variable `{name}`")));
            }
        }
        Ok(VarSet { coords, params })
    }

    /// Coordinates `x1..xn` and no parameters.
    pub fn standard(n: usize) -> Self {
        let coords: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        VarSet {
            coords,
            params: Vec::new(),
        }
    }

    pub fn with_params<S: AsRef<str>>(&self, extra: &[S]) -> Result<Self> {
        let mut params = self.params.clone();
        params.extend(extra.iter().map(|s| s.as_ref().to_string()));
        VarSet::new(&self.coords, &params)
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn ncoords(&self) -> usize {
        self.coords.len()
    }

    pub fn nvars(&self) -> usize {
        self.coords.len() + self.params.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.coords.iter().chain(&self.params).cloned().collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords
            .iter()
            .chain(&self.params)
            .position(|n| n == name)
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params
            .iter()
            .position(|n| n == name)
            .map(|i| i + self.coords.len())
    }
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Partial derivative by variable name.
pub fn differentiate(f: &RatFun, vars: &VarSet, name: &str) -> Result<RatFun> {
    let v = vars
        .index_of(name)
        .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
    Ok(f.derivative(v))
}

/// Partial derivative of a radical-extension element by variable name.
pub fn differentiate_rad(f: &RadExt, vars: &VarSet, name: &str) -> Result<RadExt> {
    let v = vars
        .index_of(name)
        .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
    Ok(f.derivative(v))
}
