#pragma once

#include <algorithm>
#include <limits>
#include <optional>

#include "json.hpp"

#include "hopfkit/linalg.hpp"
#include "hopfkit/steady.hpp"
#include "hopfkit/system.hpp"

namespace hopfkit {

// Below this the imaginary part is treated as zero (fold-type mode, not Hopf).
constexpr double kFrequencyFloor = 1e-8;

struct EigenReport {
  struct Mode {
    Complex value;
    ComplexVector vector;
    double residual;
  };
  std::vector<Mode> modes;  // sorted by |Re| ascending

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& m : modes)
      j.push_back({{"re", m.value.real()}, {"im", m.value.imag()}, {"residual", m.residual}});
    return j;
  }

  /// Hopf candidate: the mode with Im > 0 whose growth rate is closest to zero.
  std::optional<Mode> candidate() const {
    std::optional<Mode> best;
    for (const auto& m : modes) {
      if (m.value.imag() <= kFrequencyFloor) continue;
      if (!best || std::abs(m.value.real()) < std::abs(best->value.real())) best = m;
    }
    return best;
  }
};

/// The k eigenpairs of F_u(u, lambda) nearest the imaginary axis.
inline EigenReport leading_spectrum(const DynamicalSystem& sys, const Vector& u, double lambda,
                                    int k) {
  Matrix J = sys.jacobian(u, lambda);
  std::vector<linalg::EigenPair> pairs;
  if (sys.dim() <= linalg::kDenseEigThreshold) {
    pairs = linalg::eig_all(J);
  } else {
    pairs = linalg::eig_near_shift(J, Complex(0, 0), std::max(2 * k, k + 4));
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return std::abs(a.value.real()) < std::abs(b.value.real());
  });
  if (static_cast<int>(pairs.size()) > k) pairs.resize(static_cast<size_t>(k));
  EigenReport rep;
  for (auto& p : pairs) {
    double res = (J * p.vector - p.value * p.vector).norm();
    rep.modes.push_back({p.value, std::move(p.vector), res});
  }
  return rep;
}

struct HopfGuess {
  Vector u;
  double lambda;
  double mu;
  Vector v0, w0;  // real and imaginary eigenvector parts, un-normalized
};

struct NoHopfCandidateError : std::runtime_error {
  NoHopfCandidateError() : std::runtime_error("no Hopf candidate on branch") {}
};

namespace detail {

// Growth rate of the record's oscillatory candidate, if any.
inline std::optional<double> record_candidate_growth(const TraceRecord& rec) {
  std::optional<double> best;
  for (const auto& e : rec.eigs) {
    if (e.imag() <= kFrequencyFloor) continue;
    if (!best || std::abs(e.real()) < std::abs(*best)) best = e.real();
  }
  return best;
}

}  // namespace detail

/// Select the trace record whose oscillatory eigenvalue has growth rate
/// closest to zero (one bisection refinement on a bracketed sign change) and
/// return it with the corresponding eigenpair split into real and imaginary
/// parts. Emits a warning count through `near_axis_pairs` when more than one
/// candidate pair sits within 1e-3 of the axis.
inline HopfGuess build_hopf_guess(const DynamicalSystem& sys, const ContinuationTrace& trace,
                                  int k_eigs = 6, int* near_axis_pairs = nullptr) {
  if (trace.records.empty()) throw NoHopfCandidateError();

  double max_abs_re = 0;
  for (const auto& rec : trace.records)
    for (const auto& e : rec.eigs) max_abs_re = std::max(max_abs_re, std::abs(e.real()));
  const double screen = 0.5 * max_abs_re;

  int best = -1;
  double best_sigma = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < trace.records.size(); ++i) {
    auto sig = detail::record_candidate_growth(trace.records[i]);
    if (!sig) continue;
    bool bracketed = false;
    if (i + 1 < trace.records.size()) {
      auto nxt = detail::record_candidate_growth(trace.records[i + 1]);
      if (nxt && *sig * *nxt < 0) bracketed = true;
    }
    if (std::abs(*sig) > screen && !bracketed) continue;
    if (std::abs(*sig) < best_sigma) {
      best_sigma = std::abs(*sig);
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw NoHopfCandidateError();

  Vector u = trace.records[static_cast<size_t>(best)].u;
  double lambda = trace.records[static_cast<size_t>(best)].lambda;

  // One bisection step on a sign change bracketed by a neighbouring record.
  for (int nb : {best - 1, best + 1}) {
    if (nb < 0 || nb >= static_cast<int>(trace.records.size())) continue;
    auto s0 = detail::record_candidate_growth(trace.records[static_cast<size_t>(best)]);
    auto s1 = detail::record_candidate_growth(trace.records[static_cast<size_t>(nb)]);
    if (!s0 || !s1 || *s0 * *s1 >= 0) continue;
    double lambda_mid = 0.5 * (lambda + trace.records[static_cast<size_t>(nb)].lambda);
    try {
      Vector u_mid = newton_steady(sys, u, lambda_mid);
      auto rep = leading_spectrum(sys, u_mid, lambda_mid, k_eigs);
      auto cand = rep.candidate();
      if (cand && std::abs(cand->value.real()) < best_sigma) {
        u = u_mid;
        lambda = lambda_mid;
      }
    } catch (const std::exception&) {
      // refinement is best-effort; keep the trace record
    }
    break;
  }

  auto rep = leading_spectrum(sys, u, lambda, k_eigs);
  auto cand = rep.candidate();
  if (!cand) throw NoHopfCandidateError();

  if (near_axis_pairs) {
    int count = 0;
    for (const auto& m : rep.modes)
      if (m.value.imag() > kFrequencyFloor && std::abs(m.value.real()) < 1e-3) ++count;
    *near_axis_pairs = count;
  }

  HopfGuess g;
  g.u = std::move(u);
  g.lambda = lambda;
  g.mu = cand->value.imag();
  g.v0 = cand->vector.real();
  g.w0 = cand->vector.imag();
  return g;
}

}  // namespace hopfkit
