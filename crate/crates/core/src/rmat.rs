//! Recursive-matrix (R-MAT / Kronecker) edge generator.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{EdgeList, Error, Result};

/// Quadrant probabilities for one recursion level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RmatProbs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RmatProbs {
    /// The Graph500 Kronecker initiator.
    pub const GRAPH500: RmatProbs = RmatProbs {
        a: 0.57,
        b: 0.19,
        c: 0.19,
        d: 0.05,
    };

    fn check(&self) -> Result<()> {
        let p = [self.a, self.b, self.c, self.d];
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Parameter(format!(
                "probabilities must be non-negative: {self:?}"
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!("probabilities sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

impl Default for RmatProbs {
    fn default() -> Self {
        Self::GRAPH500
    }
}

pub const MAX_SCALE: u32 = 30;

/// Draws `2^scale * edge_factor` edges over `2^scale` vertices.
///
/// The output is a pure function of the arguments. Duplicates and self-loops
/// are left in; [`crate::graph::build_csr`] collapses duplicates.
pub fn generate_rmat(scale: u32, edge_factor: usize, seed: u64, probs: RmatProbs) -> Result<EdgeList> {
    probs.check()?;
    if scale > MAX_SCALE {
        return Err(Error::Parameter(format!("scale {scale} exceeds {MAX_SCALE}")));
    }
    let n = 1usize << scale;
    let count = n
        .checked_mul(edge_factor)
        .ok_or_else(|| Error::Parameter(format!("edge count overflows for scale {scale}")))?;

    let ab = probs.a + probs.b;
    let abc = ab + probs.c;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(count);
    for _ in 0..count {
        let mut src = 0u32;
        let mut dst = 0u32;
        for _ in 0..scale {
            let x = unit(&mut rng);
            let (row, col) = if x < probs.a {
                (0, 0)
            } else if x < ab {
                (0, 1)
            } else if x < abc {
                (1, 0)
            } else {
                (1, 1)
            };
            src = (src << 1) | row;
            dst = (dst << 1) | col;
        }
        edges.push((src, dst));
    }
    Ok(EdgeList {
        n,
        edges,
        weights: None,
    })
}

/// Uniform double in [0, 1) from the top 53 bits.
#[inline]
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
