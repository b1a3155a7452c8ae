//! Line-of-sight uniform-linear-array channel (3GPP TR 38.901 LoS
//! component) and its sensitivities to angle, range and radial velocity.
//!
//! Entry `(j, i)` for antenna `j = 1..m` and user `i` is
//!
//! ```text
//! beta_i * exp(-j 2pi/lambda d_a (j-1) sin theta_i)
//!        * exp(-j 4pi f_c / c * r_i)
//!        * exp(+j 4pi f_c v_i / c * t_obs),        t_obs = n T_s
//! ```
//!
//! Antenna indices are 1-based with the phase reference at the first element.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::crb::JacobianMatrix;
use crate::{CMatrix, Error, Result};

/// Sensing parameters of one user, in the column order of [`build_jacobian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parameter {
    Aoa,
    Range,
    Velocity,
}

impl Parameter {
    pub const ALL: [Parameter; 3] = [Parameter::Aoa, Parameter::Range, Parameter::Velocity];

    /// Column of this parameter inside a per-user Jacobian block.
    pub fn column(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Aoa => "aoa",
            Parameter::Range => "range",
            Parameter::Velocity => "velocity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserState {
    /// Angle of arrival in radians, `|theta| < pi/2`.
    pub theta: f64,
    /// Range in metres.
    pub r: f64,
    /// Radial velocity in m/s.
    pub v: f64,
    /// Complex path amplitude, treated as known.
    pub beta: Complex64,
}

impl UserState {
    pub fn new(theta: f64, r: f64, v: f64) -> Self {
        Self { theta, r, v, beta: Complex64::new(1.0, 0.0) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) {
            return Err(Error::InvalidSpec(format!("range must be positive, got {}", self.r)));
        }
        if !(self.theta.abs() < PI / 2.0) {
            return Err(Error::InvalidSpec(format!("AoA must lie in (-pi/2, pi/2), got {}", self.theta)));
        }
        Ok(())
    }

    fn perturbed(&self, param: Parameter, delta: f64) -> Self {
        let mut s = *self;
        match param {
            Parameter::Aoa => s.theta += delta,
            Parameter::Range => s.r += delta,
            Parameter::Velocity => s.v += delta,
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    /// Carrier frequency in Hz.
    pub fc: f64,
    /// Propagation speed in m/s.
    pub c: f64,
    /// Symbol duration in seconds.
    pub ts: f64,
    /// Channel uses; the observation time is `n * ts`.
    pub n: usize,
    /// Receive antennas.
    pub m: usize,
    /// Element spacing in metres. `None` means half a wavelength at `fc`.
    pub d_a: Option<f64>,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self { fc: 28e9, c: 3e8, ts: 4e-6, n: 1000, m: 10, d_a: None }
    }
}

impl RadioConfig {
    pub fn wavelength(&self) -> f64 {
        self.c / self.fc
    }

    pub fn element_spacing(&self) -> f64 {
        self.d_a.unwrap_or_else(|| self.wavelength() / 2.0)
    }

    pub fn t_obs(&self) -> f64 {
        self.n as f64 * self.ts
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(self.fc) && positive(self.c) && positive(self.ts) && positive(self.element_spacing())) {
            return Err(Error::InvalidSpec(format!("radio parameters must be positive: {self:?}")));
        }
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidSpec("radio n and m must be positive".into()));
        }
        Ok(())
    }

    /// Phase slope per unit of `(j - 1) sin theta`.
    fn spatial_rate(&self) -> f64 {
        2.0 * PI / self.wavelength() * self.element_spacing()
    }

    /// `4 pi f_c / c`, i.e. `4 pi / lambda`.
    pub fn range_rate(&self) -> f64 {
        4.0 * PI * self.fc / self.c
    }

    /// `4 pi f_c t_obs / c`.
    pub fn doppler_rate(&self) -> f64 {
        4.0 * PI * self.fc * self.t_obs() / self.c
    }
}

fn entry(state: &UserState, radio: &RadioConfig, antenna: usize) -> Complex64 {
    // one rotation per term: summing the phases first would let the large
    // range phase swamp the others in rounding
    let spatial = Complex64::from_polar(1.0, -radio.spatial_rate() * antenna as f64 * state.theta.sin());
    let range = Complex64::from_polar(1.0, -radio.range_rate() * state.r);
    let doppler = Complex64::from_polar(1.0, radio.doppler_rate() * state.v);
    state.beta * spatial * range * doppler
}

/// `m x k` channel, column `i` belonging to `states[i]`.
pub fn build_channel(states: &[UserState], radio: &RadioConfig) -> Result<CMatrix> {
    radio.validate()?;
    for s in states {
        s.validate()?;
    }
    // zero-based `a` is the (j - 1) of the 1-based antenna index
    Ok(CMatrix::from_fn(radio.m, states.len(), |a, i| entry(&states[i], radio, a)))
}

/// Analytic `m x 3` block per user with columns `[d/dtheta, d/dr, d/dv]`.
///
/// Each derivative is the channel entry times a purely imaginary factor:
/// `-j (2pi/lambda) d_a (j-1) cos theta`, `-j 4pi/lambda` and
/// `+j 4pi f_c t_obs / c`.
pub fn build_jacobian(states: &[UserState], radio: &RadioConfig) -> Result<JacobianMatrix> {
    let h = build_channel(states, radio)?;
    let blocks = states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            CMatrix::from_fn(radio.m, 3, |a, col| {
                let factor = match col {
                    0 => -radio.spatial_rate() * a as f64 * s.theta.cos(),
                    1 => -radio.range_rate(),
                    _ => radio.doppler_rate(),
                };
                h[(a, i)] * Complex64::new(0.0, factor)
            })
        })
        .collect();
    JacobianMatrix::new(blocks)
}

/// Central-difference step per parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps {
    pub theta: f64,
    pub range: f64,
    pub velocity: f64,
}

impl FdSteps {
    pub fn uniform(h: f64) -> Self {
        Self { theta: h, range: h, velocity: h }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { theta: self.theta * factor, range: self.range * factor, velocity: self.velocity * factor }
    }

    fn get(&self, p: Parameter) -> f64 {
        match p {
            Parameter::Aoa => self.theta,
            Parameter::Range => self.range,
            Parameter::Velocity => self.velocity,
        }
    }
}

impl Default for FdSteps {
    fn default() -> Self {
        Self { theta: 1e-6, range: 1e-7, velocity: 1e-6 }
    }
}

/// `(H(P + h e_j) - H(P - h e_j)) / 2h` for each user's three parameters,
/// evaluated through [`build_channel`].
pub fn finite_difference_jacobian(states: &[UserState], radio: &RadioConfig, steps: FdSteps) -> Result<JacobianMatrix> {
    let mut blocks = Vec::with_capacity(states.len());
    for s in states {
        let mut block = CMatrix::zeros(radio.m, 3);
        for p in Parameter::ALL {
            let h = steps.get(p);
            let plus = build_channel(&[s.perturbed(p, h)], radio)?;
            let minus = build_channel(&[s.perturbed(p, -h)], radio)?;
            let col = (plus - minus) / Complex64::new(2.0 * h, 0.0);
            block.set_column(p.column(), &col.column(0));
        }
        blocks.push(block);
    }
    JacobianMatrix::new(blocks)
}
