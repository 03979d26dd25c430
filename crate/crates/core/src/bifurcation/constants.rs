use serde::{Deserialize, Serialize};

use crate::hydro::NondimParams;

/// Coefficients of the Hill equation for perturbations of an intra-well
/// orbit of amplitude `a0`:
/// `p'' + ... + [G0 + G1 cos(phi) + G2 cos(2 phi) + G3 cos(3 phi) + G4 cos(4 phi)] p = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GConstants {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

pub fn g_constants(a0: f64, params: &NondimParams) -> GConstants {
    let wo = params.omega_o();
    let (eta, g) = (params.eta(), params.gamma);
    let (wo2, wo4) = (wo * wo, wo.powi(4));
    let a2 = a0 * a0;
    let a4 = a2 * a2;
    GConstants {
        g0: wo2 - eta * eta / wo2 * a2
            + 1.5 * g * a2
            + 3.0 * g * eta * eta / (4.0 * wo4) * a4
            + g * eta * eta / (24.0 * wo4) * a4,
        g1: 2.0 * eta * a0 - 5.0 * g * eta / (2.0 * wo2) * a0 * a2,
        g2: eta * eta / (3.0 * wo2) * a2 + 1.5 * g * a2 - g * eta * eta / (2.0 * wo4) * a4,
        g3: g * eta / (2.0 * wo2) * a0 * a2,
        g4: g * eta * eta / (24.0 * wo4) * a4,
    }
}

/// Frequency used in the denominators of the third and fifth inter-well
/// harmonics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum HarmonicScale {
    /// Forcing frequency `W`.
    #[default]
    Forcing,
    /// Natural frequency `wn`, matching the reconstructed orbit.
    Natural,
}

impl HarmonicScale {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "forcing" => Some(Self::Forcing),
            "natural" => Some(Self::Natural),
            _ => None,
        }
    }
}

/// Parametric stiffness `3 gamma Y^2 - wn^2` of the symmetric inter-well
/// orbit `Y = R1 cos(phi) + R3 cos(3 phi) + R5 cos(5 phi)`, expanded as
/// `K0 + sum K_{2n} cos(2 n phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KConstants {
    pub k0: f64,
    pub k2: f64,
    pub k4: f64,
    pub k6: f64,
    pub k8: f64,
    pub k10: f64,
    pub r1: f64,
    pub r3: f64,
    pub r5: f64,
}

impl KConstants {
    /// `[K2, K4, K6, K8, K10]`.
    pub fn harmonics(&self) -> [f64; 5] {
        [self.k2, self.k4, self.k6, self.k8, self.k10]
    }

    /// `f(t) = K0 + sum_n K_{2n} cos(2 n W t)`.
    pub fn stiffness(&self, omega: f64, t: f64) -> f64 {
        let mut f = self.k0;
        for (n, k) in self.harmonics().iter().enumerate() {
            f += k * (2.0 * (n + 1) as f64 * omega * t).cos();
        }
        f
    }
}

pub fn k_constants(a0: f64, omega: f64, params: &NondimParams) -> KConstants {
    k_constants_with(a0, omega, params, HarmonicScale::default())
}

pub fn k_constants_with(a0: f64, omega: f64, params: &NondimParams, scale: HarmonicScale) -> KConstants {
    let g = params.gamma;
    let w = match scale {
        HarmonicScale::Forcing => omega,
        HarmonicScale::Natural => params.omega_n,
    };
    let (w2, w4) = (w * w, w.powi(4));
    let r1 = a0;
    let r3 = g / (32.0 * w2) * a0.powi(3) + 3.0 * g * g / (1024.0 * w4) * a0.powi(5);
    let r5 = g * g / (1024.0 * w4) * a0.powi(5);
    let c = 3.0 * g;
    KConstants {
        k0: -params.omega_n.powi(2) + c * (r1 * r1 + r3 * r3 + r5 * r5) / 2.0,
        k2: c * (r1 * r1 / 2.0 + r1 * r3 + r3 * r5),
        k4: c * (r1 * r3 + r1 * r5),
        k6: c * (r3 * r3 / 2.0 + r1 * r5),
        k8: c * r3 * r5,
        k10: c * r5 * r5 / 2.0,
        r1,
        r3,
        r5,
    }
}
