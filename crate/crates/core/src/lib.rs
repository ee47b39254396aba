//! Magneto-mechanical coupling of a vibrating current-carrying nanowire to the spin
//! excitations of a trapped Bose–Einstein condensate.
//!
//! The crate is organised bottom-up: the Thomas–Fermi condensate and the wire field
//! feed the spatially resolved coupling and its spectral density; the spectral density
//! defines the level shift of the vibration mode, whose analytic structure (poles,
//! threshold, time evolution) is explored in [`dynamics`]. [`scenario`] wires everything
//! to a JSON configuration and the `nanobec` command-line tool.

pub mod condensate;
pub mod constants;
pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod interp;
pub mod nanowire;
pub mod quadrature;
pub mod resolvent;
pub mod scenario;
pub mod solve;

pub use error::{Error, Result};
