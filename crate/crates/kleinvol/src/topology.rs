//! Surface topology bookkeeping with exact half-integer genus.

use crate::error::{Error, Result};
use std::fmt;

/// (2g, n) pair identifying a moduli space; `twice_g` keeps half-integer
/// genus exact. `chi = 2 − 2g − n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Topology {
    pub twice_g: u32,
    pub n: u32,
}

impl Topology {
    pub fn new(twice_g: u32, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("topology needs at least one boundary"));
        }
        Ok(Topology { twice_g, n })
    }

    pub fn genus_is_integer(&self) -> bool {
        self.twice_g % 2 == 0
    }

    /// Euler characteristic 2 − 2g − n; integral since twice_g = 2g.
    pub fn chi(&self) -> i64 {
        2 - self.twice_g as i64 - self.n as i64
    }

    /// 2g − 2 + n > 0.
    pub fn is_stable(&self) -> bool {
        self.chi() < 0
    }

    /// Complexity grading the recursion descends on.
    pub fn level(&self) -> i64 {
        -self.chi()
    }

    /// dim of the orientable moduli space / π-degree budget 3g − 3 + n.
    pub fn dim3g3n(&self) -> Result<i64> {
        if !self.genus_is_integer() {
            return Err(Error::UnsupportedTopology(format!("{self} has half-integer genus")));
        }
        Ok(3 * (self.twice_g as i64 / 2) - 3 + self.n as i64)
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.genus_is_integer() {
            write!(f, "({}, {})", self.twice_g / 2, self.n)
        } else {
            write!(f, "({}/2, {})", self.twice_g, self.n)
        }
    }
}

/// Which family of volumes a query addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum VolumeKind {
    /// Orientable Weil–Petersson volume V⁺ (zero for half-integer genus).
    Plus,
    /// Gendulphe–Norbury regularised volume V⁻ (zero for genus 0).
    Minus,
    /// b-weighted combination: b = 0 is V⁺, b = 1 the total V⁺ + V⁻.
    Weighted,
}
