#include "reaper/control.hpp"

#include <algorithm>
#include <cmath>

#include "reaper/error.hpp"

namespace reaper {

PidOutput pid_step(const PidState& state, const PidGains& gains, double error, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::NonpositiveDt, "pid dt must be > 0");
  PidOutput out;
  out.state = state;
  out.state.integral = std::clamp(state.integral + error * dt, -state.integral_limit, state.integral_limit);
  const double derivative = (error - state.prev_error) / dt;
  out.u = gains.kp * error + gains.ki * out.state.integral + gains.kd * derivative;
  out.state.prev_error = error;
  return out;
}

SteeringIndex encoder_to_index(double voltage, const SteeringCalibration& cal) {
  if (cal.v_left == cal.v_right) {
    throw Error(ErrorCode::InvalidArgument, "steering calibration needs v_left != v_right");
  }
  const double lo = std::min(cal.v_left, cal.v_right);
  const double hi = std::max(cal.v_left, cal.v_right);
  const double v = std::clamp(voltage, lo, hi);
  const double x = -3.0 + 6.0 * (v - cal.v_left) / (cal.v_right - cal.v_left);
  // Nearest integer, ties toward zero.
  const double mag = std::abs(x);
  double rounded = std::floor(mag);
  if (mag - rounded > 0.5) rounded += 1.0;
  const int idx = static_cast<int>(std::copysign(rounded, x));
  return {std::clamp(idx, -SteeringIndex::kMax, SteeringIndex::kMax)};
}

double index_to_voltage(double index, const SteeringCalibration& cal) noexcept {
  return cal.v_left + (index + 3.0) / 6.0 * (cal.v_right - cal.v_left);
}

double index_to_angle(SteeringIndex idx, double max_angle) {
  if (!(max_angle > 0.0)) throw Error(ErrorCode::InvalidArgument, "max_angle must be > 0");
  return idx.index / 3.0 * max_angle;
}

double pwm_to_speed(double duty, double deadband, double v_max) {
  if (!(duty >= 0.0 && duty <= 1.0) || !(deadband >= 0.0 && deadband <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "duty and deadband must be in [0,1]");
  }
  if (duty < deadband || deadband >= 1.0) return 0.0;
  return v_max * (duty - deadband) / (1.0 - deadband);
}

}  // namespace reaper
