//! Pseudorandom puncturings of linear codes via expander random walks.
//!
//! The crate builds d-regular graphs with a certified spectral bound, runs
//! random walks with an exact ledger of the bits consumed, punctures linear
//! codes (Hadamard, Reed-Solomon, or user-supplied generator matrices) along
//! those walks, and verifies the resulting code properties (rate, distance,
//! bias, list-decodability, zero-error list-recoverability, channel
//! decoding) against brute-force oracles and closed-form probability bounds
//! at desk scale. Every randomized construction reports how many uniform
//! bits it consumed, which is the resource the whole exercise is about.
//!
//! ```
//! use prlc::codes::LinearCode;
//! use prlc::expander::RegularGraph;
//! use prlc::puncture::{rate_equals_design, PuncturingMap};
//! use prlc::{BitLedgerRng, Field, Modulus};
//!
//! // Puncture the k=6 binary Hadamard code (length 64) to length 12 along
//! // a random walk on K_64, and check the design rate survived.
//! let field = Field::new(2, 1, Modulus::Auto)?;
//! let mother = LinearCode::hadamard(field, 6)?;
//! let graph = RegularGraph::complete(64)?; // certified lambda = 1/63
//! let mut rng = BitLedgerRng::new(7);
//! let map = PuncturingMap::pseudorandom(&graph, 12, &mut rng, false)?;
//! assert_eq!(map.bits_consumed(), 6 + 11 * 6); // log2(64) + 11 log2(63)
//! let check = rate_equals_design(&map, &mother)?;
//! assert!(check.holds);
//! # Ok::<(), prlc::Error>(())
//! ```

pub mod codes;
pub mod error;
pub mod expander;
pub mod gf;
pub mod harness;
pub mod properties;
pub mod puncture;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
pub use gf::{Field, FieldElement, Modulus, Symbol, Word};
pub use rng::BitLedgerRng;
