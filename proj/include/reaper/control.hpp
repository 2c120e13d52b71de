#pragma once

#include <limits>

namespace reaper {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  double integral_limit = std::numeric_limits<double>::infinity();
};

struct PidOutput {
  PidState state;
  double u = 0.0;
};

// Backward-rectangle integral (clamped to +-integral_limit), backward-difference
// derivative on the error.
PidOutput pid_step(const PidState& state, const PidGains& gains, double error, double dt);

struct SteeringCalibration {
  double v_left = 0.0;
  double v_right = 5.0;
};

// -3 (full left) .. +3 (full right).
struct SteeringIndex {
  int index = 0;

  static constexpr int kMax = 3;
  friend bool operator==(const SteeringIndex&, const SteeringIndex&) = default;
};

SteeringIndex encoder_to_index(double voltage, const SteeringCalibration& cal);

// Voltage the encoder would read at a continuous index position in [-3,3].
double index_to_voltage(double index, const SteeringCalibration& cal) noexcept;

double index_to_angle(SteeringIndex idx, double max_angle);

// Zero below the deadband, linear ramp to v_max at full duty.
double pwm_to_speed(double duty, double deadband, double v_max);

}  // namespace reaper
