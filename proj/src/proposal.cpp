#include "ramcmc/proposal.hpp"

#include <cmath>
#include <stdexcept>

namespace ramcmc {

ProposalSpec ProposalSpec::student(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("ProposalSpec: Student exponent must be positive");
  return {Kind::Student, p};
}

ProposalSpec parse_proposal(const std::string& text) {
  if (text == "gaussian") return ProposalSpec::gaussian();
  if (text == "student") return ProposalSpec::student(1.0);
  const std::string prefix = "student:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    const std::string arg = text.substr(prefix.size());
    double p = 0.0;
    try {
      p = std::stod(arg, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("parse_proposal: bad Student exponent '" + arg + "'");
    }
    if (used != arg.size())
      throw std::invalid_argument("parse_proposal: bad Student exponent '" + arg + "'");
    return ProposalSpec::student(p);
  }
  throw std::invalid_argument("parse_proposal: unknown proposal '" + text +
                              "' (expected gaussian or student[:p])");
}

std::string to_string(const ProposalSpec& spec) {
  if (spec.kind == ProposalSpec::Kind::Gaussian) return "gaussian";
  return "student:" + std::to_string(spec.student_p);
}

Eigen::VectorXd sample_increment(const ProposalSpec& spec, Eigen::Index dim, RngStream& rng) {
  if (dim < 1) throw std::invalid_argument("sample_increment: dimension must be positive");
  Eigen::VectorXd z = rng.normal_vector(dim);
  if (spec.kind == ProposalSpec::Kind::Student) {
    const double g = rng.chi_squared(spec.student_p);
    z /= std::sqrt(g / spec.student_p);
  }
  return z;
}

double sample_radius(const ProposalSpec& spec, Eigen::Index dim, RngStream& rng) {
  return sample_increment(spec, dim, rng).norm();
}

}  // namespace ramcmc
