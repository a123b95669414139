use std::io::Write;

use serde::{Deserialize, Serialize};

use super::atmosphere::Air;
use super::{MissileConfig, Scenario, SimError, TargetPolicy};
use crate::units::{self, G0};

/// Column header of the trace CSV export (SI units, radians).
pub const TRACE_CSV_HEADER: &str = "time,n,e,d,speed,gamma,chi,mass,alpha,seeker,ax,ay,az";

/// Within this range an opening geometry counts as a fly-by miss.
const FLY_BY_RADIUS: f64 = 1_000.0;
/// Heading-error gain (1/s) of the evading target's turn.
const EVASION_GAIN: f64 = 2.0;
/// Look angles (rad) over which the pursuit correction fades in, and its gain (1/s).
const PURSUIT_ONSET: f64 = 30.0 * std::f64::consts::PI / 180.0;
const PURSUIT_FULL: f64 = 60.0 * std::f64::consts::PI / 180.0;
const PURSUIT_GAIN: f64 = 3.0;
/// Below this dynamic pressure (Pa) angle of attack is reported as the limit.
const MIN_DYNAMIC_PRESSURE: f64 = 1.0;
/// Inside this range the seeker no longer constrains the engagement: any
/// residual offset sweeps the line of sight through large angles.
const SEEKER_BLIND_RANGE: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MissReason {
    GroundImpact,
    /// Speed fell below the stall floor, or the missile is past burnout, slower
    /// than the target and losing range.
    EnergyExhaustion,
    SeekerLimit,
    Timeout,
    FlyBy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    Hit { time: f64, miss_distance: f64 },
    Miss { reason: MissReason },
}

impl Outcome {
    pub fn is_hit(&self) -> bool {
        matches!(self, Outcome::Hit { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementResult {
    pub outcome: Outcome,
    /// Smallest missile-target separation seen (m).
    pub closest_approach: f64,
    /// s
    pub time_of_flight: f64,
}

/// Missile state at one integration step. Positions in NED metres, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissileState {
    pub time: f64,
    pub position: [f64; 3],
    pub speed: f64,
    pub flight_path_angle: f64,
    pub heading: f64,
    pub mass: f64,
    pub angle_of_attack: f64,
    /// Angle between the body axis and the line of sight.
    pub seeker_angle: f64,
    /// Whether the seeker is active (the missile has flown the activation distance).
    pub seeker_active: bool,
    /// Magnitude of the commanded normal acceleration actually applied (m/s²).
    pub lateral_accel: f64,
    pub acceleration: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlightTrace {
    pub time_step: f64,
    pub states: Vec<MissileState>,
    pub result: EngagementResult,
}

impl FlightTrace {
    pub fn outcome(&self) -> Outcome {
        self.result.outcome
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{TRACE_CSV_HEADER}")?;
        for s in &self.states {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                s.time,
                s.position[0],
                s.position[1],
                s.position[2],
                s.speed,
                s.flight_path_angle,
                s.heading,
                s.mass,
                s.angle_of_attack,
                s.seeker_angle,
                s.acceleration[0],
                s.acceleration[1],
                s.acceleration[2],
            )?;
        }
        Ok(())
    }
}

/// Runs one fly-out and records every step.
pub fn simulate_flight(
    scenario: &Scenario,
    launch_range_nm: f64,
    missile: &MissileConfig,
    target: &TargetPolicy,
) -> Result<FlightTrace, SimError> {
    let eng = Engagement::new(scenario, launch_range_nm, missile, target)?;
    let mut states = Vec::with_capacity(1024);
    let result = eng.run(Some(&mut states));
    Ok(FlightTrace {
        time_step: missile.time_step,
        states,
        result,
    })
}

/// Same fly-out as [`simulate_flight`] without recording the trace.
pub fn engage(
    scenario: &Scenario,
    launch_range_nm: f64,
    missile: &MissileConfig,
    target: &TargetPolicy,
) -> Result<EngagementResult, SimError> {
    Ok(Engagement::new(scenario, launch_range_nm, missile, target)?.run(None))
}

// State vector layout.
const N: usize = 0;
const E: usize = 1;
const D: usize = 2;
const V: usize = 3;
const GAMMA: usize = 4;
const CHI: usize = 5;
const TN: usize = 6;
const TE: usize = 7;
const TCHI: usize = 8;
const PATH: usize = 9;
const DIM: usize = 10;

type State = [f64; DIM];

/// Normal-acceleration command held constant over one step, split into the
/// vertical-plane and horizontal components of the lift.
#[derive(Debug, Clone, Copy)]
struct Command {
    lift_pitch: f64,
    lift_yaw: f64,
}

struct Guidance {
    cmd: Command,
    range: f64,
    range_rate: f64,
    seeker_angle: f64,
    alpha: f64,
    acceleration: [f64; 3],
}

struct Engagement<'a> {
    m: &'a MissileConfig,
    policy: TargetPolicy,
    target_down: f64,
    target_speed: f64,
    loft_bias: f64,
    loft_distance: f64,
    initial: State,
}

#[inline]
fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

impl<'a> Engagement<'a> {
    fn new(
        scenario: &Scenario,
        launch_range_nm: f64,
        m: &'a MissileConfig,
        policy: &TargetPolicy,
    ) -> Result<Self, SimError> {
        if !(launch_range_nm.is_finite() && launch_range_nm > 0.0) {
            return Err(SimError::InvalidRange(launch_range_nm));
        }
        scenario.validate()?;
        m.validate()?;
        policy.validate()?;
        let sc = scenario.normalized();
        let range = units::nm_to_m(launch_range_nm);
        let bearing = sc.rgt_tgt.to_radians();
        let mut initial = [0.0; DIM];
        initial[D] = -units::ft_to_m(sc.alt_sht);
        initial[V] = units::kt_to_mps(sc.vel_sht);
        initial[GAMMA] = sc.pit_sht.to_radians();
        initial[TN] = range * bearing.cos();
        initial[TE] = range * bearing.sin();
        initial[TCHI] = sc.hdg_tgt.to_radians();
        Ok(Engagement {
            m,
            policy: *policy,
            target_down: -units::ft_to_m(sc.alt_tgt),
            target_speed: units::kt_to_mps(sc.vel_tgt),
            loft_bias: m.loft_bias(launch_range_nm),
            loft_distance: m.loft_cutoff.cover_fraction * range,
            initial,
        })
    }

    fn velocity(s: &State) -> [f64; 3] {
        let (sg, cg) = s[GAMMA].sin_cos();
        let (sc, cc) = s[CHI].sin_cos();
        [s[V] * cg * cc, s[V] * cg * sc, -s[V] * sg]
    }

    fn target_velocity(&self, s: &State) -> [f64; 3] {
        let (sc, cc) = s[TCHI].sin_cos();
        [self.target_speed * cc, self.target_speed * sc, 0.0]
    }

    /// Unit vectors along increasing flight-path angle and increasing heading.
    fn normal_axes(s: &State) -> ([f64; 3], [f64; 3]) {
        let (sg, cg) = s[GAMMA].sin_cos();
        let (sc, cc) = s[CHI].sin_cos();
        ([-sg * cc, -sg * sc, -cg], [-sc, cc, 0.0])
    }

    /// Angle of attack needed to generate `lift` (m/s²), limited to the configured maximum.
    fn alpha(&self, lift: f64, mass: f64, q: f64) -> f64 {
        let limit = self.m.max_angle_of_attack.to_radians();
        if q < MIN_DYNAMIC_PRESSURE {
            return if lift > 0.0 { limit } else { 0.0 };
        }
        (mass * lift / (q * self.m.reference_area * self.m.normal_force_slope)).min(limit)
    }

    fn drag(&self, s: &State, lift: f64, mass: f64) -> (f64, f64) {
        let air = Air::at(-s[D]);
        let q = 0.5 * air.density * s[V] * s[V];
        let alpha = self.alpha(lift, mass, q);
        let cd = self.m.cd0(s[V] / air.speed_of_sound) + self.m.normal_force_slope * alpha * alpha;
        (q * self.m.reference_area * cd, alpha)
    }

    fn derivative(&self, t: f64, s: &State, cmd: &Command) -> State {
        let mass = self.m.mass(t);
        let lift = cmd.lift_pitch.hypot(cmd.lift_yaw);
        let (drag, _) = self.drag(s, lift, mass);
        let thrust = self.m.thrust(t);
        let (sg, cg) = s[GAMMA].sin_cos();
        let (sc, cc) = s[CHI].sin_cos();
        let v = s[V];
        let mut ds = [0.0; DIM];
        ds[N] = v * cg * cc;
        ds[E] = v * cg * sc;
        ds[D] = -v * sg;
        ds[V] = (thrust - drag) / mass - G0 * sg;
        ds[GAMMA] = (cmd.lift_pitch - G0 * cg) / v;
        ds[CHI] = cmd.lift_yaw / (v * cg.max(1e-3));
        let (tsc, tcc) = s[TCHI].sin_cos();
        ds[TN] = self.target_speed * tcc;
        ds[TE] = self.target_speed * tsc;
        if self.policy.evading_at(t) {
            let away = (s[TE] - s[E]).atan2(s[TN] - s[N]);
            let err = units::wrap_rad(away - s[TCHI]);
            let max_rate = self.policy.evasion_accel * G0 / self.target_speed;
            ds[TCHI] = (EVASION_GAIN * err).clamp(-max_rate, max_rate);
        }
        ds[PATH] = v;
        ds
    }

    fn guidance(&self, t: f64, s: &State, loft: bool) -> Guidance {
        let vm = Self::velocity(s);
        let vt = self.target_velocity(s);
        let r = [s[TN] - s[N], s[TE] - s[E], self.target_down - s[D]];
        let range = norm(r);
        let vrel = [vt[0] - vm[0], vt[1] - vm[1], vt[2] - vm[2]];
        let range_rate = dot(r, vrel) / range;
        let los_rate = cross(r, vrel).map(|x| x / (range * range));
        let mut a_cmd = cross(los_rate, vm).map(|x| x * self.m.nav_gain);
        // PN alone barely turns the missile when the look angle is large and the
        // line of sight is not rotating, so a pursuit term fades in there.
        let speed = s[V];
        let vhat = vm.map(|x| x / speed);
        let los = r.map(|x| x / range);
        let cos_look = dot(los, vhat).clamp(-1.0, 1.0);
        let weight = ((cos_look.acos() - PURSUIT_ONSET) / (PURSUIT_FULL - PURSUIT_ONSET)).clamp(0.0, 1.0);
        if weight > 0.0 {
            for i in 0..3 {
                a_cmd[i] += weight * PURSUIT_GAIN * speed * (los[i] - cos_look * vhat[i]);
            }
        }
        let (e_pitch, e_yaw) = Self::normal_axes(s);

        let mut a_pitch = dot(a_cmd, e_pitch);
        let a_yaw = dot(a_cmd, e_yaw);
        if loft {
            let elevation = (-r[2]).atan2(r[0].hypot(r[1]));
            let desired = elevation + self.loft_bias;
            a_pitch = s[V] * (desired - s[GAMMA]) / self.m.loft_cutoff.time_constant;
        }

        let mass = self.m.mass(t);
        let limit = self.m.max_lateral_accel * G0;
        let mut lift_pitch = a_pitch + G0 * s[GAMMA].cos();
        let mut lift_yaw = a_yaw;
        let lift = lift_pitch.hypot(lift_yaw);
        if lift > limit {
            let k = limit / lift;
            lift_pitch *= k;
            lift_yaw *= k;
        }
        let lift = lift_pitch.hypot(lift_yaw);
        let cmd = Command {
            lift_pitch,
            lift_yaw,
        };

        let (drag, alpha) = self.drag(s, lift, mass);
        let axial = (self.m.thrust(t) - drag) / mass;
        let mut acceleration = [0.0; 3];
        for i in 0..3 {
            acceleration[i] = axial * vhat[i] + lift_pitch * e_pitch[i] + lift_yaw * e_yaw[i];
        }
        acceleration[2] += G0;

        let body = if lift > 0.0 {
            let (sa, ca) = alpha.sin_cos();
            let mut b = [0.0; 3];
            for i in 0..3 {
                b[i] = ca * vhat[i] + sa * (lift_pitch * e_pitch[i] + lift_yaw * e_yaw[i]) / lift;
            }
            b
        } else {
            vhat
        };
        let seeker_angle = (dot(body, r) / (norm(body) * range)).clamp(-1.0, 1.0).acos();

        Guidance {
            cmd,
            range,
            range_rate,
            seeker_angle,
            alpha,
            acceleration,
        }
    }

    fn rk4(&self, t: f64, s: &State, cmd: &Command, dt: f64) -> State {
        let add = |a: &State, k: &State, h: f64| {
            let mut out = *a;
            for i in 0..DIM {
                out[i] += h * k[i];
            }
            out
        };
        let k1 = self.derivative(t, s, cmd);
        let k2 = self.derivative(t + 0.5 * dt, &add(s, &k1, 0.5 * dt), cmd);
        let k3 = self.derivative(t + 0.5 * dt, &add(s, &k2, 0.5 * dt), cmd);
        let k4 = self.derivative(t + dt, &add(s, &k3, dt), cmd);
        let mut out = *s;
        for i in 0..DIM {
            out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }

    fn relative(&self, s: &State) -> [f64; 3] {
        [s[TN] - s[N], s[TE] - s[E], self.target_down - s[D]]
    }

    fn run(&self, mut trace: Option<&mut Vec<MissileState>>) -> EngagementResult {
        let m = self.m;
        let dt = m.time_step;
        let max_steps = (m.max_flight_time / dt).round() as u64;
        let gimbal = m.seeker_gimbal_limit.to_radians();
        let burnout = m.burnout_time();
        let mut s = self.initial;
        let mut loft = self.loft_bias > 0.0;
        let mut closest = f64::INFINITY;
        let mut step: u64 = 0;
        loop {
            let t = step as f64 * dt;
            let g = self.guidance(t, &s, loft);
            closest = closest.min(g.range);
            let seeker_active = s[PATH] >= m.activation_distance;
            if let Some(states) = trace.as_deref_mut() {
                states.push(MissileState {
                    time: t,
                    position: [s[N], s[E], s[D]],
                    speed: s[V],
                    flight_path_angle: s[GAMMA],
                    heading: s[CHI],
                    mass: m.mass(t),
                    angle_of_attack: g.alpha,
                    seeker_angle: g.seeker_angle,
                    seeker_active,
                    lateral_accel: g.cmd.lift_pitch.hypot(g.cmd.lift_yaw),
                    acceleration: g.acceleration,
                });
            }

            let miss = if s[D] >= 0.0 {
                Some(MissReason::GroundImpact)
            } else if s[V] < m.stall_speed
                || (t >= burnout && g.range_rate > 0.0 && s[V] < self.target_speed)
            {
                Some(MissReason::EnergyExhaustion)
            } else if seeker_active && g.range > SEEKER_BLIND_RANGE && g.seeker_angle > gimbal {
                Some(MissReason::SeekerLimit)
            } else if g.range_rate > 0.0 && g.range < FLY_BY_RADIUS {
                Some(MissReason::FlyBy)
            } else if step >= max_steps {
                Some(MissReason::Timeout)
            } else {
                None
            };
            if let Some(reason) = miss {
                return EngagementResult {
                    outcome: Outcome::Miss { reason },
                    closest_approach: closest,
                    time_of_flight: t,
                };
            }

            let next = self.rk4(t, &s, &g.cmd, dt);

            // Closest approach within the step, relative motion taken as linear.
            let r0 = self.relative(&s);
            let r1 = self.relative(&next);
            let dr = [r1[0] - r0[0], r1[1] - r0[1], r1[2] - r0[2]];
            let dr2 = dot(dr, dr);
            let frac = if dr2 > 0.0 {
                (-dot(r0, dr) / dr2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let ca = norm([r0[0] + frac * dr[0], r0[1] + frac * dr[1], r0[2] + frac * dr[2]]);
            closest = closest.min(ca);
            if ca <= m.hit_radius {
                let time = t + frac * dt;
                if let Some(states) = trace.as_deref_mut() {
                    let g1 = self.guidance(t + dt, &next, loft);
                    states.push(MissileState {
                        time: t + dt,
                        position: [next[N], next[E], next[D]],
                        speed: next[V],
                        flight_path_angle: next[GAMMA],
                        heading: next[CHI],
                        mass: m.mass(t + dt),
                        angle_of_attack: g1.alpha,
                        seeker_angle: g1.seeker_angle,
                        seeker_active: next[PATH] >= m.activation_distance,
                        lateral_accel: g1.cmd.lift_pitch.hypot(g1.cmd.lift_yaw),
                        acceleration: g1.acceleration,
                    });
                }
                return EngagementResult {
                    outcome: Outcome::Hit {
                        time,
                        miss_distance: ca,
                    },
                    closest_approach: closest,
                    time_of_flight: time,
                };
            }

            s = next;
            if loft
                && (s[N].hypot(s[E]) >= self.loft_distance
                    || -s[D] >= m.loft_cutoff.apogee_altitude)
            {
                loft = false;
            }
            step += 1;
        }
    }
}
