#pragma once

// Model parameters shared across modules.

#include <cmath>
#include <stdexcept>

namespace dcw {

// (N, beta, p) plus the typicality exponent m.  Constructors accept any
// beta > 0; routines that rely on the high-temperature regime call
// require_theorem_mode() and reject beta >= 1.
struct ModelParams {
  int n;
  double beta;
  double p;
  double m;

  ModelParams(int n_, double beta_, double p_, double m_ = 0.2)
      : n(n_), beta(beta_), p(p_), m(m_) {
    if (n < 1) throw std::invalid_argument("ModelParams: n must be >= 1");
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw std::invalid_argument("ModelParams: beta must be finite and > 0");
    if (!(p > 0.0) || p > 1.0)
      throw std::invalid_argument("ModelParams: p must lie in (0, 1]");
    if (!(m > 0.0) || !(m < 1.0))
      throw std::invalid_argument("ModelParams: m must lie in (0, 1)");
  }

  bool theorem_mode() const { return beta < 1.0; }

  void require_theorem_mode() const {
    if (!theorem_mode())
      throw std::domain_error("parameters violate the standing assumption beta < 1");
  }

  // Per-ordered-pair coupling a = beta / (2 N p).
  double edge_coupling() const { return beta / (2.0 * n * p); }

  // Typical magnetizations satisfy s^2 <= N (N p)^m.
  double typicality_threshold() const { return n * std::pow(n * p, m); }
};

}  // namespace dcw
