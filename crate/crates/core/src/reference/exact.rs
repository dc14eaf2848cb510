use serde::Serialize;

use super::data::{Family, PiecewiseInitialData};
use crate::error::{Error, Result};

/// Exact entropy solution of `u_t + (u²)_x = 0` for one of the supported
/// data families.
#[derive(Clone, Debug, Serialize)]
pub struct ReferenceSolution {
    pub family: Family,
    /// Times at which two fronts meet or a ramp collapses into a shock.
    pub event_times: Vec<f64>,
}

fn unsupported(msg: &str) -> Error {
    Error::UnsupportedData(msg.to_string())
}

impl ReferenceSolution {
    pub fn new(data: &PiecewiseInitialData) -> Result<Self> {
        let family = data
            .family()
            .ok_or_else(|| unsupported("data was not built by a family constructor"))?;
        let event_times = match family {
            Family::TwoSteps { u1, u2, a1, a2, .. } => {
                if u1 < 0.0 || u2 < 0.0 {
                    return Err(unsupported("two-step data with a rarefaction"));
                }
                if u1 + u2 > 0.0 {
                    vec![(a1 - a2) / (u1 + u2)]
                } else {
                    vec![]
                }
            }
            Family::Triangle { u1_0, .. } => {
                if u1_0 > 0.0 {
                    vec![0.5 / u1_0]
                } else {
                    vec![]
                }
            }
            Family::Confluence { u0_0, u1_0, a1, a2 } => {
                if !(u0_0 > 0.0 && u1_0 > 0.0) {
                    return Err(unsupported("confluence data needs a positive step and slope"));
                }
                let s = u0_0 / (u0_0 + u1_0 * (a1 - a2));
                vec![(1.0 - s * s) / (2.0 * u1_0)]
            }
            Family::Riemann { .. } => vec![],
        };
        Ok(Self { family, event_times })
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self.family {
            Family::TwoSteps { u0, u1, u2, a1, a2 } => {
                let (s1, s2) = (2.0 * u0 + u1, 2.0 * u0 + 2.0 * u1 + u2);
                match self.event_times.first() {
                    Some(&ts) if t >= ts => {
                        let xs = a1 + s1 * ts + (2.0 * u0 + u1 + u2) * (t - ts);
                        if x < xs {
                            u0 + u1 + u2
                        } else {
                            u0
                        }
                    }
                    _ => {
                        if x < a2 + s2 * t {
                            u0 + u1 + u2
                        } else if x < a1 + s1 * t {
                            u0 + u1
                        } else {
                            u0
                        }
                    }
                }
            }
            Family::Triangle { u0, u1_0, a1, a2 } => {
                let big = u1_0 * (a1 - a2);
                match self.event_times.first() {
                    Some(&t1) if t >= t1 => {
                        let xs = a1 + 2.0 * u0 * t1 + (2.0 * u0 + big) * (t - t1);
                        if x < xs {
                            u0 + big
                        } else {
                            u0
                        }
                    }
                    _ => {
                        let (phi2, phi1) = (a2 + 2.0 * (u0 + big) * t, a1 + 2.0 * u0 * t);
                        if x <= phi2 {
                            u0 + big
                        } else if x >= phi1 {
                            u0
                        } else {
                            u0 + u1_0 * (phi1 - x) / (1.0 - 2.0 * u1_0 * t)
                        }
                    }
                }
            }
            Family::Confluence { u0_0, u1_0, a1, a2 } => {
                let big = u0_0 + u1_0 * (a1 - a2);
                let ts = self.event_times[0];
                if t >= ts {
                    let s = u0_0 / big;
                    let xs = a1 + (u0_0 / u1_0) * (1.0 - s) + big * (t - ts);
                    return if x < xs { big } else { 0.0 };
                }
                let d = 1.0 - 2.0 * u1_0 * t;
                let shock = a1 + (u0_0 / u1_0) * (1.0 - d.sqrt());
                if x >= shock {
                    0.0
                } else if x <= a2 + 2.0 * big * t {
                    big
                } else {
                    (u0_0 + u1_0 * (a1 - x)) / d
                }
            }
            Family::Riemann { ul, ur, a } => {
                if ul > ur {
                    if x < a + (ul + ur) * t {
                        ul
                    } else {
                        ur
                    }
                } else if x < a + 2.0 * ul * t {
                    ul
                } else if x >= a + 2.0 * ur * t {
                    ur
                } else {
                    (x - a) / (2.0 * t)
                }
            }
        }
    }

    /// Positions of shocks and kinks at time `t`.
    pub fn fronts(&self, t: f64) -> Vec<f64> {
        let mut out = match self.family {
            Family::TwoSteps { u0, u1, u2, a1, a2 } => match self.event_times.first() {
                Some(&ts) if t >= ts => {
                    vec![a1 + (2.0 * u0 + u1) * ts + (2.0 * u0 + u1 + u2) * (t - ts)]
                }
                _ => vec![a2 + (2.0 * u0 + 2.0 * u1 + u2) * t, a1 + (2.0 * u0 + u1) * t],
            },
            Family::Triangle { u0, u1_0, a1, a2 } => {
                let big = u1_0 * (a1 - a2);
                match self.event_times.first() {
                    Some(&t1) if t >= t1 => {
                        vec![a1 + 2.0 * u0 * t1 + (2.0 * u0 + big) * (t - t1)]
                    }
                    _ => vec![a2 + 2.0 * (u0 + big) * t, a1 + 2.0 * u0 * t],
                }
            }
            Family::Confluence { u0_0, u1_0, a1, a2 } => {
                let big = u0_0 + u1_0 * (a1 - a2);
                let ts = self.event_times[0];
                if t >= ts {
                    vec![a1 + (u0_0 / u1_0) * (1.0 - u0_0 / big) + big * (t - ts)]
                } else {
                    let d = 1.0 - 2.0 * u1_0 * t;
                    vec![a2 + 2.0 * big * t, a1 + (u0_0 / u1_0) * (1.0 - d.sqrt())]
                }
            }
            Family::Riemann { ul, ur, a } => {
                if ul > ur {
                    vec![a + (ul + ur) * t]
                } else {
                    vec![a + 2.0 * ul * t, a + 2.0 * ur * t]
                }
            }
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// `u(x, t)` for data from one of the supported families.
pub fn exact_entropy_solution(data: &PiecewiseInitialData, t: f64, x: f64) -> Result<f64> {
    if t < 0.0 || !t.is_finite() || !x.is_finite() {
        return Err(Error::InvalidInput(format!("cannot evaluate at (x, t) = ({x}, {t})")));
    }
    let sol = ReferenceSolution::new(data)?;
    if t == 0.0 {
        return Ok(data.eval(x));
    }
    Ok(sol.eval(x, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_steps_merge_into_one_shock() {
        let d = PiecewiseInitialData::two_steps(0.0, 1.0, 1.0, 0.0, -1.0).unwrap();
        let s = ReferenceSolution::new(&d).unwrap();
        assert_eq!(s.event_times, vec![0.5]);
        // merge at x = 0.5, then speed 2
        assert_eq!(s.fronts(1.0), vec![1.5]);
        assert_eq!(s.eval(1.49, 1.0), 2.0);
        assert_eq!(s.eval(1.51, 1.0), 0.0);
        assert_eq!(s.eval(0.0, 0.25), 1.0);
    }

    #[test]
    fn time_zero_returns_data() {
        let d = PiecewiseInitialData::confluence(1.0, 1.0, 1.0, 0.0).unwrap();
        for x in [-1.0, 0.0, 0.3, 0.99, 1.0, 2.0] {
            assert_eq!(exact_entropy_solution(&d, 0.0, x).unwrap(), d.eval(x));
        }
    }

    #[test]
    fn ramp_steepens() {
        let d = PiecewiseInitialData::triangle(0.0, 1.0, 1.0, 0.0).unwrap();
        let s = ReferenceSolution::new(&d).unwrap();
        let t = 0.3;
        let h = 1e-3;
        let slope = (s.eval(0.8 + h, t) - s.eval(0.8 - h, t)) / (2.0 * h);
        assert!((slope + 1.0 / (1.0 - 2.0 * t)).abs() < 1e-9);
        assert_eq!(s.fronts(1.0), vec![1.5]);
    }

    #[test]
    fn confluence_is_continuous_at_the_ramp_edge() {
        let d = PiecewiseInitialData::confluence(1.0, 1.0, 1.0, 0.0).unwrap();
        let s = ReferenceSolution::new(&d).unwrap();
        assert!((s.event_times[0] - 0.375).abs() < 1e-15);
        let t = 0.2;
        let edge = s.fronts(t)[0];
        assert!((s.eval(edge + 1e-12, t) - 2.0).abs() < 1e-9);
        assert!((s.fronts(s.event_times[0])[0] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn rarefaction_fan() {
        let d = PiecewiseInitialData::riemann(-1.0, 1.0, 0.0).unwrap();
        let s = ReferenceSolution::new(&d).unwrap();
        assert_eq!(s.eval(0.5, 1.0), 0.25);
        assert_eq!(s.eval(-3.0, 1.0), -1.0);
        assert!(ReferenceSolution::new(&PiecewiseInitialData::two_steps(0.0, -1.0, 1.0, 0.0, -1.0).unwrap()).is_err());
    }
}
