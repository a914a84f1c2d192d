//! Discrete-time bicycle kinematics over the rear-axle midpoint, with the
//! analytic Jacobians the shooting optimizer needs.

use super::{ControlInput, TrajectoryError, VehicleState};

/// Wheelbase and step length of the discrete model.
#[derive(Debug, Clone, Copy)]
pub struct BicycleParams {
    pub wheelbase: f64,
    pub tau_s: f64,
}

/// Longitudinal displacement of the rear axle over one step. Collapses to
/// `tau_s * v` exactly at zero steering.
pub fn rolling_distance(v: f64, steer: f64, p: &BicycleParams) -> f64 {
    if steer == 0.0 {
        return p.tau_s * v;
    }
    let w = p.tau_s * v * steer.sin();
    p.wheelbase + p.tau_s * v * steer.cos() - (p.wheelbase * p.wheelbase - w * w).sqrt()
}

/// One step of the bicycle model.
pub fn step_kinematics(
    state: &VehicleState,
    control: &ControlInput,
    p: &BicycleParams,
) -> Result<VehicleState, TrajectoryError> {
    let w = p.tau_s * state.v * control.steer.sin();
    if w.abs() > p.wheelbase {
        return Err(TrajectoryError::KinematicDomain {
            value: w,
            wheelbase: p.wheelbase,
        });
    }
    let fr = rolling_distance(state.v, control.steer, p);
    Ok(VehicleState {
        x: state.x + fr * state.theta.cos(),
        y: state.y + fr * state.theta.sin(),
        theta: state.theta + (w / p.wheelbase).asin(),
        v: state.v + p.tau_s * control.accel,
    })
}

/// Jacobians of the step map: `d(next)/d(state)` (row-major 4x4) and
/// `d(next)/d(control)` (4x2, controls ordered steer then accel).
pub fn step_jacobians(
    state: &VehicleState,
    control: &ControlInput,
    p: &BicycleParams,
) -> ([f64; 16], [f64; 8]) {
    let (sin_d, cos_d) = control.steer.sin_cos();
    let (sin_t, cos_t) = state.theta.sin_cos();
    let w = p.tau_s * state.v * sin_d;
    let s = (p.wheelbase * p.wheelbase - w * w).sqrt();
    let fr = p.wheelbase + p.tau_s * state.v * cos_d - s;
    // d fr / dv, d fr / d steer
    let fr_v = p.tau_s * cos_d + w * p.tau_s * sin_d / s;
    let fr_d = -p.tau_s * state.v * sin_d + w * p.tau_s * state.v * cos_d / s;
    // d theta' / dv, d theta' / d steer  (asin(w/b): 1/sqrt(b^2-w^2) = 1/s)
    let th_v = p.tau_s * sin_d / s;
    let th_d = p.tau_s * state.v * cos_d / s;

    let mut jx = [0.0; 16];
    // rows: x', y', theta', v'; cols: x, y, theta, v
    jx[0] = 1.0;
    jx[2] = -fr * sin_t;
    jx[3] = fr_v * cos_t;
    jx[5] = 1.0;
    jx[6] = fr * cos_t;
    jx[7] = fr_v * sin_t;
    jx[10] = 1.0;
    jx[11] = th_v;
    jx[15] = 1.0;

    let mut ju = [0.0; 8];
    // cols: steer, accel
    ju[0] = fr_d * cos_t;
    ju[2] = fr_d * sin_t;
    ju[4] = th_d;
    ju[7] = p.tau_s;
    ju[6] = 0.0;
    ju[1] = 0.0;
    (jx, ju)
}
