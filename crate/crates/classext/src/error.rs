use std::fmt;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Discriminant is not a valid imaginary quadratic discriminant.
    InvalidDiscriminant(String),
    /// A generator does not live in the ambient ring of the extension.
    ElementNotInAmbient(String),
    /// Two submodules belong to different parent extensions.
    ParentMismatch,
    /// The zero module was passed where a nonzero one is required.
    ZeroModule,
    /// An enumeration or construction exceeded the configured size bound.
    SizeBoundExceeded(String),
    /// Operation is not defined for this ring family.
    UnsupportedRing(String),
    /// Operation is not defined for this extension shape.
    UnsupportedExtension(String),
    /// A module presentation is inconsistent.
    InconsistentPresentation(String),
    /// The submodule is not an invertible ideal of its extension.
    NotInvertible(String),
    /// A supplied maximal-ideal list fails validation.
    MaximalIdealListInvalid(String),
    /// The requested subring is not a registered intermediate of the tower.
    NotIntermediate,
    /// The extension carries no retraction witness.
    NoRetraction,
    /// Class-group enumeration is not possible for this extension.
    EnumerationImpossible(String),
    /// Two quadratic forms have different discriminants.
    DiscriminantMismatch,
    /// Malformed JSON descriptor.
    BadDescriptor(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDiscriminant(s) => write!(f, "invalid discriminant: {s}"),
            Error::ElementNotInAmbient(s) => write!(f, "element not in ambient ring: {s}"),
            Error::ParentMismatch => write!(f, "submodules have different parent extensions"),
            Error::ZeroModule => write!(f, "zero module"),
            Error::SizeBoundExceeded(s) => write!(f, "size bound exceeded: {s}"),
            Error::UnsupportedRing(s) => write!(f, "unsupported ring: {s}"),
            Error::UnsupportedExtension(s) => write!(f, "unsupported extension: {s}"),
            Error::InconsistentPresentation(s) => write!(f, "inconsistent presentation: {s}"),
            Error::NotInvertible(s) => write!(f, "not invertible: {s}"),
            Error::MaximalIdealListInvalid(s) => write!(f, "maximal ideal list invalid: {s}"),
            Error::NotIntermediate => write!(f, "subring is not a registered intermediate"),
            Error::NoRetraction => write!(f, "extension has no retraction"),
            Error::EnumerationImpossible(s) => write!(f, "enumeration impossible: {s}"),
            Error::DiscriminantMismatch => write!(f, "discriminant mismatch"),
            Error::BadDescriptor(s) => write!(f, "bad descriptor: {s}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
