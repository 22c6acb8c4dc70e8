use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScheduleKind {
    Linear,
    #[default]
    Trig,
}

impl ScheduleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScheduleKind::Linear => "linear",
            ScheduleKind::Trig => "trig",
        }
    }
}

impl std::str::FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(ScheduleKind::Linear),
            "trig" => Ok(ScheduleKind::Trig),
            other => Err(Error::InvalidArgument(format!("unknown schedule '{other}'"))),
        }
    }
}

/// Annealing schedule `A(t)` (driver weight) and `B(t)` (problem weight) over
/// `[0, total_time]`, digitized into `steps` Trotter steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub total_time: f64,
    pub steps: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            kind: ScheduleKind::Trig,
            total_time: 1.0,
            steps: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleValues {
    pub a: f64,
    pub b: f64,
    pub da: f64,
    pub db: f64,
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "anneal time must be positive, got {}",
                self.total_time
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidArgument("schedule needs at least one step".into()));
        }
        Ok(())
    }

    /// `(A, B, dA/dt, dB/dt)` at time `t`.
    pub fn values(&self, t: f64) -> Result<ScheduleValues> {
        let tt = self.total_time;
        // Tolerate rounding from accumulating step sizes.
        let slack = 1e-12 * tt;
        if !(t >= -slack && t <= tt + slack) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [0, {tt}]")));
        }
        let t = t.clamp(0.0, tt);
        Ok(match self.kind {
            ScheduleKind::Linear => ScheduleValues {
                a: 1.0 - t / tt,
                b: t / tt,
                da: -1.0 / tt,
                db: 1.0 / tt,
            },
            ScheduleKind::Trig => {
                let phase = PI * t / (2.0 * tt);
                let (s, c) = phase.sin_cos();
                // d/dt sin^2(phase) = 2 sin cos * pi / 2T = sin(2 phase) * pi / 2T
                let rate = (2.0 * phase).sin() * PI / (2.0 * tt);
                ScheduleValues {
                    a: c * c,
                    b: s * s,
                    da: -rate,
                    db: rate,
                }
            }
        })
    }
}
