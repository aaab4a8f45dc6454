//! Euler–Maruyama integration of the DOPO c-number SDEs with measurement
//! feedback.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::SpinConfig;
use crate::rng::{rng_from_seed, SimRng};

use super::{CimParams, CouplingMatrix};

/// In-phase (`c`) and quadrature (`s`) amplitudes of every pulse.
#[derive(Debug, Clone)]
pub struct CimState {
    pub c: Vec<f64>,
    pub s: Vec<f64>,
    pub round_trip: u64,
    rng: SimRng,
    measured: Vec<f64>,
    feedback: Vec<f64>,
}

/// External field added to the in-phase drift: `h · ε_i`.
#[derive(Debug, Clone, Copy)]
pub struct Field<'a> {
    pub pattern: &'a [i8],
    pub strength: f64,
}

impl CimState {
    /// Vacuum start: `c = s = 0`.
    pub fn new(n: usize, seed: u64) -> Self {
        CimState {
            c: vec![0.0; n],
            s: vec![0.0; n],
            round_trip: 0,
            rng: rng_from_seed(seed),
            measured: vec![0.0; n],
            feedback: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    #[inline]
    fn gauss(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn draw_measured(&mut self, params: &CimParams) {
        let prefactor = params.measurement_noise();
        if prefactor == 0.0 {
            self.measured.copy_from_slice(&self.c);
            return;
        }
        for i in 0..self.c.len() {
            let f = self.gauss();
            self.measured[i] = self.c[i] - prefactor * f;
        }
    }

    /// `c̃_i = c_i − √((1−T)/T) f_i / A_s` with fresh vacuum draws `f_i`.
    pub fn measured_amplitudes(&mut self, params: &CimParams) -> Vec<f64> {
        self.draw_measured(params);
        self.measured.clone()
    }

    /// One round trip of the coupled SDEs.
    pub fn step(&mut self, coupling: &CouplingMatrix, params: &CimParams) -> Result<()> {
        self.step_with_field(coupling, params, None)
    }

    pub fn step_with_field(
        &mut self,
        coupling: &CouplingMatrix,
        params: &CimParams,
        field: Option<Field<'_>>,
    ) -> Result<()> {
        assert_eq!(coupling.n(), self.n(), "coupling/state size mismatch");
        self.draw_measured(params);
        coupling.apply(&self.measured, &mut self.feedback);
        if let Some(f) = field {
            for (fb, &e) in self.feedback.iter_mut().zip(f.pattern) {
                *fb += f.strength * e as f64;
            }
        }
        self.integrate(params)
    }

    /// One round trip of the four-body model on `N = 4` pulses: pulse `i`
    /// receives `ξ' c̃_j c̃_k c̃_l` from the other three, where
    /// `ξ' = −ξ·J_1234` follows the same sign convention as the two-body
    /// coupling (`ξ_ij = ξ w_ij = −ξ J_ij`).
    pub fn four_body_step(&mut self, j1234: f64, params: &CimParams) -> Result<()> {
        if self.n() != 4 {
            return Err(Error::InvalidParam(format!(
                "four-body coupling needs exactly 4 pulses, state has {}",
                self.n()
            )));
        }
        self.draw_measured(params);
        let strength = -params.xi * j1234;
        let m = &self.measured;
        for i in 0..4 {
            let others: f64 = (0..4).filter(|&k| k != i).map(|k| m[k]).product();
            self.feedback[i] = strength * others;
        }
        self.integrate(params)
    }

    fn integrate(&mut self, params: &CimParams) -> Result<()> {
        let dt = params.dt;
        let noise = params.noise_scale() * dt.sqrt();
        for i in 0..self.c.len() {
            let (c, s) = (self.c[i], self.s[i]);
            let r2 = c * c + s * s;
            let mut dc = ((-1.0 + params.p - r2) * c + self.feedback[i]) * dt;
            let mut ds = (-1.0 - params.p - r2) * s * dt;
            if noise != 0.0 {
                let amp = noise * (r2 + 0.5).sqrt();
                dc += amp * self.gauss();
                ds += amp * self.gauss();
            }
            self.c[i] = c + dc;
            self.s[i] = s + ds;
        }
        self.round_trip += 1;
        if self.c.iter().chain(&self.s).any(|x| !x.is_finite()) {
            return Err(Error::Divergence {
                round_trip: self.round_trip,
            });
        }
        Ok(())
    }

    /// `σ_i = sign(c_i)` with `sign(0) = +1`.
    pub fn readout(&self) -> SpinConfig {
        SpinConfig::from_signs(&self.c)
    }
}
