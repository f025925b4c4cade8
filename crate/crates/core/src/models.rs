//! Bundled anti-lock braking system models.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dsl::{elaborate, parse_model, ElaborateError, ModelDocument, ParseDiagnostic};
use crate::net::SwpnNet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BundledName {
    AbsCommon,
    AbsOptional,
    AbsComposed,
    /// The composed model without suspension places and Stop/Resume transitions.
    AbsOld,
}

impl BundledName {
    pub const ALL: [BundledName; 4] =
        [BundledName::AbsCommon, BundledName::AbsOptional, BundledName::AbsComposed, BundledName::AbsOld];

    pub fn as_str(&self) -> &'static str {
        match self {
            BundledName::AbsCommon => "abs-common",
            BundledName::AbsOptional => "abs-optional",
            BundledName::AbsComposed => "abs-composed",
            BundledName::AbsOld => "abs-old",
        }
    }

    /// Model text. `abs-old` is derived from the composed source.
    pub fn source(&self) -> &'static str {
        match self {
            BundledName::AbsCommon => include_str!("../models/abs-common.swpn"),
            BundledName::AbsOptional => include_str!("../models/abs-optional.swpn"),
            BundledName::AbsComposed | BundledName::AbsOld => include_str!("../models/abs-composed.swpn"),
        }
    }
}

impl fmt::Display for BundledName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BundledName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|n| n.as_str() == s).ok_or_else(|| ModelError::UnknownModel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown bundled model '{0}' (expected abs-common, abs-optional, abs-composed or abs-old)")]
    UnknownModel(String),
    #[error("bundled model does not parse: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Parse(Vec<ParseDiagnostic>),
    #[error(transparent)]
    Elaborate(#[from] ElaborateError),
}

/// Parsed document of a bundled model.
pub fn bundled_document(name: BundledName) -> Result<ModelDocument, ModelError> {
    parse_model(name.source()).into_result().map_err(ModelError::Parse)
}

pub fn load_bundled(name: BundledName) -> Result<SwpnNet, ModelError> {
    let mut net = elaborate(&bundled_document(name)?)?;
    if name == BundledName::AbsOld {
        net = net.without_suspension();
    }
    net.name = name.as_str().to_string();
    Ok(net)
}

/// [`load_bundled`] by name, for command lines.
pub fn load_bundled_by_name(name: &str) -> Result<SwpnNet, ModelError> {
    load_bundled(name.parse()?)
}
