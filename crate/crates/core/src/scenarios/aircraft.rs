use crate::abstraction::VectorField;

/// Physical constants of the firefighting aircraft.
#[derive(Debug, Clone, PartialEq)]
pub struct AircraftParams {
    /// Mass without payload.
    pub m1: f64,
    /// Mass with a full water tank.
    pub m2: f64,
    pub drag: f64,
    pub lift: f64,
    pub thrust: (f64, f64),
    /// Bank angle range in radians.
    pub bank: (f64, f64),
}

impl Default for AircraftParams {
    fn default() -> Self {
        Self {
            m1: 4250.0,
            m2: 6250.0,
            drag: 1.8,
            lift: 85.0,
            thrust: (0.0, 18e3),
            bank: (-40f64.to_radians(), 40f64.to_radians()),
        }
    }
}

/// Which mass the dynamics use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tank {
    Empty,
    Full,
}

impl AircraftParams {
    pub fn mass(&self, tank: Tank) -> f64 {
        match tank {
            Tank::Empty => self.m1,
            Tank::Full => self.m2,
        }
    }
}

/// `f(x, u) = (v cos h, v sin h, p_L v sin(u2) / m, (u1 - p_D v^2) / m)` for
/// the state `(x1, x2, heading, speed)` and input `(thrust, bank)`.
///
/// The growth bound is valid while the speed stays in `speed_range`.
#[derive(Debug, Clone, PartialEq)]
pub struct AircraftField {
    pub mass: f64,
    pub drag: f64,
    pub lift: f64,
    pub speed_range: (f64, f64),
}

pub fn aircraft_field(params: &AircraftParams, tank: Tank, speed_range: (f64, f64)) -> AircraftField {
    assert!(0.0 <= speed_range.0 && speed_range.0 < speed_range.1);
    AircraftField { mass: params.mass(tank), drag: params.drag, lift: params.lift, speed_range }
}

impl VectorField<f64> for AircraftField {
    fn dim(&self) -> usize {
        4
    }

    fn input_dim(&self) -> usize {
        2
    }

    #[inline]
    fn eval(&self, x: &[f64], u: &[f64], dx: &mut [f64]) {
        let (s, c) = x[2].sin_cos();
        dx[0] = x[3] * c;
        dx[1] = x[3] * s;
        dx[2] = self.lift * x[3] * u[1].sin() / self.mass;
        dx[3] = (u[0] - self.drag * x[3] * x[3]) / self.mass;
    }

    // Jacobian entries: |d(v cos h)/dh| <= v_max, |d(v cos h)/dv| <= 1, same
    // for the sine row, |d f3/dv| = p_L |sin u2| / m, and d f4/dv = -2 p_D v / m
    // whose supremum over the speed range sits at the lowest speed (at the
    // highest one for the reversed field).
    fn growth_bound(&self, u: &[f64], reverse: bool) -> Vec<f64> {
        let (v_lo, v_hi) = self.speed_range;
        let turn = self.lift * u[1].sin().abs() / self.mass;
        let speed = if reverse { 2.0 * self.drag * v_hi / self.mass } else { -2.0 * self.drag * v_lo / self.mass };
        #[rustfmt::skip]
        let l = vec![
            0.0, 0.0, v_hi, 1.0,
            0.0, 0.0, v_hi, 1.0,
            0.0, 0.0, 0.0, turn,
            0.0, 0.0, 0.0, speed,
        ];
        l
    }
}
