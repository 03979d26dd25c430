use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::kernel::{radiation_damping, RadiationRealization};
use crate::config::KeyValues;
use crate::error::{Error, Result};

/// Spherical buoy and fluid constants, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuoyGeometry {
    pub radius: f64,
    pub rho: f64,
    pub grav: f64,
    pub mass: f64,
    pub added_mass_inf: f64,
}

impl BuoyGeometry {
    /// Floating hemisphere: mass equals displaced mass, and the
    /// infinite-frequency added mass is half of it.
    pub fn hemisphere(radius: f64) -> Self {
        let rho = 1025.0;
        let m = 2.0 / 3.0 * PI * radius.powi(3) * rho;
        Self {
            radius,
            rho,
            grav: 9.81,
            mass: m,
            added_mass_inf: 0.5 * m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.radius, self.rho, self.grav, self.mass, self.added_mass_inf]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("geometry entries must be positive: {self:?}")))
        }
    }

    /// Displaced mass of the submerged hemisphere, `(2/3) pi R^3 rho`.
    pub fn reference_mass(&self) -> f64 {
        2.0 / 3.0 * PI * self.radius.powi(3) * self.rho
    }

    pub fn total_mass(&self) -> f64 {
        self.mass + self.added_mass_inf
    }

    pub fn waterplane_area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn hydrostatic_stiffness(&self) -> f64 {
        self.rho * self.grav * self.waterplane_area()
    }

    /// `sqrt(R / g)`, seconds per unit nondimensional time.
    pub fn time_scale(&self) -> f64 {
        (self.radius / self.grav).sqrt()
    }

    /// `M / (m + m_inf)`.
    pub fn force_ratio(&self) -> f64 {
        self.reference_mass() / self.total_mass()
    }
}

impl Default for BuoyGeometry {
    fn default() -> Self {
        Self::hemisphere(5.0)
    }
}

/// Incident regular wave in nondimensional form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveInput {
    /// `A_wave / R`.
    pub amplitude_ratio: f64,
    /// `omega / sqrt(g / R)`.
    pub omega: f64,
}

impl WaveInput {
    pub fn new(amplitude_ratio: f64, omega: f64) -> Result<Self> {
        let w = Self { amplitude_ratio, omega };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude_ratio >= 0.0) || !self.amplitude_ratio.is_finite() {
            return Err(Error::InvalidInput(format!(
                "amplitude ratio must be nonnegative, got {}",
                self.amplitude_ratio
            )));
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidInput(format!("frequency must be positive, got {}", self.omega)));
        }
        Ok(())
    }
}

/// Power take-off stiffness and damping, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stiffness {
    /// Linear spring constant (the negative stiffness is `k1 - rho g S`).
    pub k1: f64,
    pub k3: f64,
    /// Mechanical damping.
    pub c: f64,
}

/// Harvesting circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub load_resistance: f64,
    pub inductance: f64,
}

/// Dimensionless system
/// `Y'' + d1 C x + d2 Y' - wn^2 Y + gamma Y^3 = g cos(W t)`,
/// `x' = A x + B Y'`, `v' + theta v = Y'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondimParams {
    pub delta1: f64,
    pub delta2: f64,
    pub omega_n: f64,
    pub gamma: f64,
    pub theta: f64,
    /// Forcing scale `M / (m + m_inf)` used to turn `A/R` into `g_wave`.
    pub force_ratio: f64,
    pub radiation: RadiationRealization,
    /// How kernel constants enter the slow flow.
    #[serde(default)]
    pub xi_convention: XiConvention,
}

/// Source of the in-phase and quadrature kernel constants.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum XiConvention {
    /// Sine and cosine transforms of the analytic kernel.
    #[default]
    Transform,
    /// The closed forms as originally printed, kept for comparison.
    Printed,
}

impl NondimParams {
    /// Reference absorber: `wn = 0.78`, `gamma = 50`, `d2 = 0.13`, `d1 = theta = 1`.
    pub fn reference() -> Self {
        Self {
            delta1: 1.0,
            delta2: 0.13,
            omega_n: 0.78,
            gamma: 50.0,
            theta: 1.0,
            force_ratio: 1.0,
            radiation: RadiationRealization::hemisphere(),
            xi_convention: XiConvention::Transform,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.delta1,
            self.delta2,
            self.omega_n,
            self.gamma,
            self.theta,
            self.force_ratio,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput("parameters must be finite".into()));
        }
        if !(self.omega_n > 0.0) || !(self.gamma > 0.0) {
            return Err(Error::InvalidInput(format!(
                "bi-stability needs omega_n > 0 and gamma > 0 (omega_n={}, gamma={})",
                self.omega_n, self.gamma
            )));
        }
        if self.delta2 < 0.0 || self.delta1 < 0.0 || self.force_ratio < 0.0 {
            return Err(Error::InvalidInput(
                "delta1, delta2 and force_ratio must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Local frequency about either well, `sqrt(2) wn`.
    pub fn omega_o(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.omega_n
    }

    /// Well position `sqrt(wn^2 / gamma)`.
    pub fn y_s(&self) -> f64 {
        (self.omega_n * self.omega_n / self.gamma).sqrt()
    }

    /// Quadratic coefficient about the `+Y_s` well, `3 gamma Y_s`.
    pub fn eta(&self) -> f64 {
        3.0 * self.gamma * self.y_s()
    }

    /// Effective cubic coefficient of the intra-well backbone.
    pub fn kappa(&self) -> f64 {
        let wo = self.omega_o();
        let eta = self.eta();
        5.0 * eta * eta / (12.0 * wo.powi(3)) - 3.0 * self.gamma / (8.0 * wo)
    }

    /// Saddle-to-well energy difference `wn^4 / (4 gamma)`.
    pub fn barrier(&self) -> f64 {
        self.omega_n.powi(4) / (4.0 * self.gamma)
    }

    /// `-wn^2 Y^2 / 2 + gamma Y^4 / 4`.
    pub fn potential(&self, y: f64) -> f64 {
        -0.5 * self.omega_n * self.omega_n * y * y + 0.25 * self.gamma * y.powi(4)
    }

    /// Nondimensional forcing amplitude of a wave.
    ///
    /// Haskind's relation in these units gives
    /// `g = (A/R) (M/(m+m_inf)) W^(-3/2) sqrt(3 B(W) / pi)`.
    pub fn g_wave(&self, amplitude_ratio: f64, omega: f64) -> Result<f64> {
        WaveInput::new(amplitude_ratio, omega)?;
        Ok(amplitude_ratio * self.g_per_amplitude(omega)?)
    }

    /// `g_wave` for unit `A/R`.
    pub fn g_per_amplitude(&self, omega: f64) -> Result<f64> {
        let b = radiation_damping(omega, &self.radiation.kernel)?;
        if !(b > 0.0) {
            return Err(Error::KernelValidity { omega, value: b });
        }
        Ok(self.force_ratio * omega.powf(-1.5) * (3.0 * b / PI).sqrt())
    }

    /// Inverse of [`g_wave`](Self::g_wave) at fixed frequency.
    pub fn amplitude_ratio(&self, g_wave: f64, omega: f64) -> Result<f64> {
        Ok(g_wave / self.g_per_amplitude(omega)?)
    }

    /// Reads overrides from a key=value file. Keys: `R, rho, g, m, m_inf, k1,
    /// k3, c, R_L, L, delta1, delta2, omega_n, gamma, theta, force_ratio,
    /// xi_convention`.
    ///
    /// If `k1`, `k3` and `c` are all present the groups are computed from the
    /// dimensional inputs first; explicit dimensionless keys then win.
    pub fn from_key_values(kv: &KeyValues) -> Result<(Self, BuoyGeometry)> {
        let mut geo = BuoyGeometry::default();
        if let Some(r) = kv.f64("R")? {
            geo = BuoyGeometry::hemisphere(r);
        }
        if let Some(v) = kv.f64("rho")? {
            let scale = v / geo.rho;
            geo.rho = v;
            geo.mass *= scale;
            geo.added_mass_inf *= scale;
        }
        if let Some(v) = kv.f64("g")? {
            geo.grav = v;
        }
        if let Some(v) = kv.f64("m")? {
            geo.mass = v;
        }
        if let Some(v) = kv.f64("m_inf")? {
            geo.added_mass_inf = v;
        }
        geo.validate()?;

        let mut p = Self::reference();
        if let (Some(k1), Some(k3), Some(c)) = (kv.f64("k1")?, kv.f64("k3")?, kv.f64("c")?) {
            let circuit = Circuit {
                load_resistance: kv.f64("R_L")?.unwrap_or(1.0),
                inductance: kv.f64("L")?.unwrap_or(1.0),
            };
            p = nondimensionalize(&geo, &Stiffness { k1, k3, c }, &circuit, None)?.params;
        }
        let explicit_delta1 = kv.f64("delta1")?;
        if let Some(v) = explicit_delta1 {
            p.delta1 = v;
        }
        if let Some(v) = kv.f64("delta2")? {
            p.delta2 = v;
        }
        if let Some(v) = kv.f64("omega_n")? {
            p.omega_n = v;
        }
        if let Some(v) = kv.f64("gamma")? {
            p.gamma = v;
        }
        if let Some(v) = kv.f64("theta")? {
            p.theta = v;
        }
        match kv.get("xi_convention") {
            None | Some("transform") => {}
            Some("printed") => p.xi_convention = XiConvention::Printed,
            Some(other) => {
                return Err(Error::Parse(format!("xi_convention: expected transform or printed, got {other:?}")))
            }
        }
        match kv.f64("force_ratio")? {
            Some(v) => p.force_ratio = v,
            None => {
                if let Some(d1) = explicit_delta1 {
                    if d1 > 0.0 {
                        p.force_ratio = 1.0 / d1;
                    }
                }
            }
        }
        p.validate()?;
        Ok((p, geo))
    }
}

impl Default for NondimParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Result of [`nondimensionalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Nondimensional {
    pub params: NondimParams,
    /// Present when a wave was supplied.
    pub g_wave: Option<f64>,
}

/// Dimensionless groups from dimensional inputs.
///
/// `delta1 = (m + m_inf) / M` multiplies the convolution and the forcing is
/// scaled by its reciprocal.
pub fn nondimensionalize(
    geometry: &BuoyGeometry,
    stiffness: &Stiffness,
    circuit: &Circuit,
    wave: Option<&WaveInput>,
) -> Result<Nondimensional> {
    geometry.validate()?;
    let k_hys = geometry.hydrostatic_stiffness();
    if !(stiffness.k1 > k_hys) {
        return Err(Error::NotBistable { k1: stiffness.k1, k_hys });
    }
    if !(stiffness.k3 > 0.0) || !(stiffness.c >= 0.0) {
        return Err(Error::InvalidInput("k3 must be positive and c nonnegative".into()));
    }
    if !(circuit.load_resistance > 0.0) || !(circuit.inductance > 0.0) {
        return Err(Error::InvalidInput("circuit constants must be positive".into()));
    }
    let mt = geometry.total_mass();
    let r = geometry.radius;
    let g = geometry.grav;
    let params = NondimParams {
        delta1: mt / geometry.reference_mass(),
        delta2: stiffness.c / mt * geometry.time_scale(),
        omega_n: ((stiffness.k1 - k_hys) * r / (mt * g)).sqrt(),
        gamma: stiffness.k3 * r.powi(3) / (mt * g),
        theta: circuit.load_resistance / circuit.inductance * geometry.time_scale(),
        force_ratio: geometry.force_ratio(),
        radiation: RadiationRealization::hemisphere(),
        xi_convention: XiConvention::Transform,
    };
    params.validate()?;
    let g_wave = match wave {
        Some(w) => Some(params.g_wave(w.amplitude_ratio, w.omega)?),
        None => None,
    };
    Ok(Nondimensional { params, g_wave })
}

/// Dimensional excitation amplitude [N] and its nondimensional counterpart.
pub fn wave_force(geometry: &BuoyGeometry, wave: &WaveInput) -> Result<(f64, f64)> {
    geometry.validate()?;
    wave.validate()?;
    let b = radiation_damping(wave.omega, &super::KernelConstants::HEMISPHERE)?;
    if !(b > 0.0) {
        return Err(Error::KernelValidity { omega: wave.omega, value: b });
    }
    let ts = geometry.time_scale();
    let a_wave = wave.amplitude_ratio * geometry.radius;
    let omega_dim = wave.omega / ts;
    let b_dim = b * geometry.reference_mass() / ts;
    let g = geometry.grav;
    let f = a_wave * (2.0 * geometry.rho * g.powi(3) * b_dim / omega_dim.powi(3)).sqrt();
    Ok((f, f / (geometry.total_mass() * g)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_inputs(geo: &BuoyGeometry) -> Stiffness {
        let p = NondimParams::reference();
        let mt = geo.total_mass();
        Stiffness {
            k1: geo.hydrostatic_stiffness() + p.omega_n.powi(2) * mt * geo.grav / geo.radius,
            k3: p.gamma * mt * geo.grav / geo.radius.powi(3),
            c: p.delta2 * mt / geo.time_scale(),
        }
    }

    #[test]
    fn reference_groups_roundtrip() {
        let geo = BuoyGeometry::default();
        let circuit = Circuit {
            load_resistance: 2.0,
            inductance: 2.0 * geo.time_scale(),
        };
        let nd = nondimensionalize(&geo, &reference_inputs(&geo), &circuit, None).unwrap();
        assert!((nd.params.omega_n - 0.78).abs() < 1e-12);
        assert!((nd.params.gamma - 50.0).abs() < 1e-10);
        assert!((nd.params.delta2 - 0.13).abs() < 1e-12);
        assert!((nd.params.theta - 1.0).abs() < 1e-12);
        assert!((nd.params.delta1 - 1.5).abs() < 1e-12);
        assert!((nd.params.force_ratio - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn not_bistable() {
        let geo = BuoyGeometry::default();
        let mut s = reference_inputs(&geo);
        s.k1 = geo.hydrostatic_stiffness();
        let c = Circuit { load_resistance: 1.0, inductance: 1.0 };
        assert!(matches!(
            nondimensionalize(&geo, &s, &c, None),
            Err(Error::NotBistable { .. })
        ));
    }

    #[test]
    fn derived_quantities() {
        let p = NondimParams::reference();
        assert!((p.omega_o() - 1.1031).abs() < 1e-4);
        assert!((p.y_s() - 0.1103).abs() < 1e-4);
        assert!((p.barrier() - 1.85e-3).abs() < 1e-5);
        assert!((p.eta() - 16.546).abs() < 1e-3);
    }

    #[test]
    fn potential_stationary_points() {
        let p = NondimParams::reference();
        let dudy = |y: f64| -p.omega_n.powi(2) * y + p.gamma * y.powi(3);
        for y in [0.0, p.y_s(), -p.y_s()] {
            assert!(dudy(y).abs() < 1e-15);
        }
        assert_eq!(p.potential(0.07), p.potential(-0.07));
    }

    #[test]
    fn wave_force_consistent_with_params() {
        let geo = BuoyGeometry::default();
        let wave = WaveInput::new(0.1, 1.0).unwrap();
        let (f, g) = wave_force(&geo, &wave).unwrap();
        assert!(f > 0.0);
        let mut p = NondimParams::reference();
        p.force_ratio = geo.force_ratio();
        assert!((p.g_wave(0.1, 1.0).unwrap() - g).abs() < 1e-12);
        let (_, g0) = wave_force(&geo, &WaveInput::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(g0, 0.0);
    }

    #[test]
    fn negative_damping_is_reported() {
        let p = NondimParams::reference();
        assert!(matches!(
            p.g_wave(0.1, 0.01),
            Err(Error::KernelValidity { .. })
        ));
    }

    #[test]
    fn key_value_overrides() {
        let kv = KeyValues::parse("gamma=30\ndelta1=2\n").unwrap();
        let (p, _) = NondimParams::from_key_values(&kv).unwrap();
        assert_eq!(p.gamma, 30.0);
        assert_eq!(p.delta1, 2.0);
        assert_eq!(p.force_ratio, 0.5);
        let bad = KeyValues::parse("gamma=-1\n").unwrap();
        assert!(NondimParams::from_key_values(&bad).is_err());
    }
}
