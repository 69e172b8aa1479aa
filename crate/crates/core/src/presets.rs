//! Built-in reference parameter sets.

use crate::config::ModelParams;
use crate::scalar::Real;

/// The charge-transfer reference set (K_M unit): the fixed K/U/ε values
/// used by the hopping scans and the oracle self-checks. Hopping defaults
/// to zero; set `t` before use.
pub fn charge_transfer_reference<T: Real>() -> ModelParams<T> {
    ModelParams {
        k_m: T::of(1.0),
        k1: T::of(0.35),
        k2: T::of(0.10),
        kp1: T::of(0.58),
        kp2: T::of(0.75),
        eps_mprime: T::of(0.80),
        eps_l1: T::of(-2.80),
        eps_l2: T::of(-1.50),
        u_m: T::of(4.0),
        u_l: T::of(2.95),
        t: T::zero(),
    }
}

/// One reference case for the second-lowest-triplet mixing proportions.
#[derive(Clone, Copy, Debug)]
pub struct MixingCase {
    /// Which reference table the case belongs to (1 or 2).
    pub table: u8,
    /// K₁ = K₂ value.
    pub k: f64,
    pub kp1: f64,
    pub kp2: f64,
    /// Reference S_M = 1 percentage.
    pub ref_sm1_pct: f64,
    /// Reference S_M = 0 percentage.
    pub ref_sm0_pct: f64,
}

/// The four bundled reference mixing cases (K_M = 1, ε = 0, no hopping).
pub fn mixing_reference_cases() -> [MixingCase; 4] {
    [
        MixingCase {
            table: 1,
            k: 0.25,
            kp1: 0.60,
            kp2: 0.80,
            ref_sm1_pct: 81.0,
            ref_sm0_pct: 19.0,
        },
        MixingCase {
            table: 1,
            k: 0.50,
            kp1: 0.60,
            kp2: 0.80,
            ref_sm1_pct: 90.0,
            ref_sm0_pct: 10.0,
        },
        MixingCase {
            table: 2,
            k: 0.25,
            kp1: 0.75,
            kp2: 0.75,
            ref_sm1_pct: 79.0,
            ref_sm0_pct: 21.0,
        },
        MixingCase {
            table: 2,
            k: 0.50,
            kp1: 0.75,
            kp2: 0.75,
            ref_sm1_pct: 86.0,
            ref_sm0_pct: 14.0,
        },
    ]
}

impl MixingCase {
    pub fn params<T: Real>(&self) -> ModelParams<T> {
        ModelParams {
            k_m: T::one(),
            k1: T::of(self.k),
            k2: T::of(self.k),
            kp1: T::of(self.kp1),
            kp2: T::of(self.kp2),
            eps_mprime: T::zero(),
            eps_l1: T::zero(),
            eps_l2: T::zero(),
            u_m: T::zero(),
            u_l: T::zero(),
            t: T::zero(),
        }
    }
}
