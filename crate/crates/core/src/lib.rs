//! Lubin-Tate formal groups over local fields at finite precision: group laws,
//! torsion towers, the Coleman norm operator, ramification filtrations and
//! finite-level Artin maps.

pub mod artin;
pub mod base;
pub mod coleman;
pub mod error;
pub mod extension;
pub mod formal_group;
pub mod fq;
pub mod poly;
pub mod ramification;
pub mod ring;
pub mod series;
pub mod torsion;
pub mod unramified;
pub mod verify;

pub use base::{BaseFieldConfig, BaseKind, FqSeries, LocalBase, Zp};
pub use error::{Error, Result};
pub use ring::Ring;
pub use unramified::{DigitSet, FieldElement, PiAdicExpansion, RingElement, UnramifiedRing};
