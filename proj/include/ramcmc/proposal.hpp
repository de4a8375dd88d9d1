#pragma once

#include <string>

#include <Eigen/Core>

#include "ramcmc/rng.hpp"

namespace ramcmc {

/// Spherically symmetric proposal increment family: standard Gaussian, or a
/// multivariate Student with density proportional to (1 + ||z||^2)^(-(d+p)/2).
struct ProposalSpec {
  enum class Kind { Gaussian, Student };

  Kind kind = Kind::Student;
  double student_p = 1.0;

  static ProposalSpec gaussian() { return {Kind::Gaussian, 0.0}; }
  static ProposalSpec student(double p);
};

/// Parses "gaussian", "student" or "student:<p>".
ProposalSpec parse_proposal(const std::string& text);
std::string to_string(const ProposalSpec& spec);

/// One increment draw U ~ q. The Student draw is a Gaussian vector divided by
/// sqrt(chi_squared(p) / p).
Eigen::VectorXd sample_increment(const ProposalSpec& spec, Eigen::Index dim, RngStream& rng);

/// Radius ||U|| of an increment draw; defined as the norm of sample_increment
/// so the two are equal in distribution by construction.
double sample_radius(const ProposalSpec& spec, Eigen::Index dim, RngStream& rng);

}  // namespace ramcmc
