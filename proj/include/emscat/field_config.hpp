#pragma once

#include <string>
#include <vector>

#include "emscat/config.hpp"
#include "emscat/fields.hpp"

namespace emscat {

// Field description read from `<prefix>.*` keys.
//
//   family = zero | inverse-power | gaussian | radial-magnetic | localized-magnetic | sum
//   zero:               alpha (2)
//   inverse-power:      v0 (required), alpha (2), center (origin)
//   gaussian:           v0 (required), w (1), alpha (2), center (origin)
//   radial-magnetic:    b0 (required), sigma (2); d = 2 only, alpha = 2 sigma - 1
//   localized-magnetic: b0 (required), moment (required), center (origin),
//                       profile = power | gaussian (power), kappa (1.5), w (1),
//                       alpha (3, gaussian profile only)
//   sum:                parts = N, components under <prefix>.part1 .. partN
//
// The dimension comes from the caller (physics.d); vectors are comma lists.
struct FieldSpec {
  std::string family = "zero";
  int d = 2;
  double v0 = 0.0;
  double b0 = 0.0;
  double alpha = 2.0;
  double w = 1.0;
  double sigma = 2.0;
  double kappa = 1.5;
  std::string profile = "power";
  std::vector<double> center;  // empty: origin
  std::vector<double> moment;
  std::vector<FieldSpec> parts;
};

FieldSpec read_field_spec(const Config& cfg, const std::string& prefix, int d);
// Writes only the keys the family reads, so that read(write(s)) == s.
void write_field_spec(Config& cfg, const std::string& prefix, const FieldSpec& spec);
FieldPtr build_field(const FieldSpec& spec);

}  // namespace emscat
