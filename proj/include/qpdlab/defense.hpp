#ifndef QPDLAB_DEFENSE_HPP
#define QPDLAB_DEFENSE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qpdlab/dataset.hpp"
#include "qpdlab/endpoint.hpp"
#include "qpdlab/mechanisms.hpp"
#include "qpdlab/monitor.hpp"

namespace qpdlab {

struct AccountantRecord {
  std::size_t index = 0;      // 1-based query order
  double allocated = 0.0;     // APBA output for this query
  double spent = 0.0;         // committed charge (0 for out-of-zone bdpl)
  double leakage = 0.0;       // L_i seen by the allocation
  bool refused = false;
};

/// Budget state for the adaptive allocation: remaining budget, leakage
/// threshold L_t, and the parabola scale p.
struct PrivacyAccountant {
  double epsilon_total = 1.0;
  double epsilon_remaining = 1.0;
  double leakage = 0.0;       // L_i, synced from the monitor
  double threshold = 1.0;     // L_t
  bool fixed_p = false;       // freeze p at its initial value
  double scale_p = 0.0;       // current p (recomputed unless fixed_p)
  std::vector<AccountantRecord> history;

  double spent_total() const { return epsilon_total - epsilon_remaining; }
};

/// One allocation step: eps_re = remaining, p = 9 eps_re^2 / (4 L_t^3),
/// eps_i = sqrt(-p (L_i - L_t)), capped at the remaining budget. Returns 0
/// when the leakage threshold is crossed. Pure: the caller commits.
double apba_allocate(PrivacyAccountant& acct);

struct DefenseConfig {
  MechanismKind mechanism = MechanismKind::laplace;
  double epsilon = 1.0;   // total privacy budget
  double alpha = 1.0;     // L_t = alpha * I_D
  double delta_zone = 0.125;
  bool fixed_p = false;
  bool clamp = false;
  /// Allocations below this are treated as budget exhaustion; with p
  /// recomputed from eps_re each query the remaining budget decays
  /// geometrically and never reaches 0 exactly.
  double eps_floor = 1e-9;
  /// Shape of unperturbed responses (mechanism none only).
  ResponseKind response = ResponseKind::probability;

  static DefenseConfig from_json_text(const std::string& text);
};

/// Baseline endpoint: a fixed per-query noise spec, no monitoring.
class FixedEndpoint : public QueryEndpoint {
 public:
  FixedEndpoint(PredictFn target, std::size_t n, NoiseSpec spec, ResponseKind kind,
                std::uint64_t seed);

  double submit(std::span<const double> q) override;
  std::size_t dimension() const override { return n_; }

 private:
  PredictFn target_;
  std::size_t n_;
  NoiseSpec spec_;
  ResponseKind kind_;
  Rng rng_;
};

/// The monitoring-coupled endpoint: every query is assessed by the Monitor,
/// budget is allocated by APBA, the response is perturbed with that budget,
/// and the (query || response) row is logged. Once the budget floor or the
/// leakage threshold is reached the endpoint enters an absorbing refusal
/// state and answers uninformatively.
class DefendedEndpoint : public QueryEndpoint {
 public:
  DefendedEndpoint(PredictFn target, std::size_t n, const Dataset& reference,
                   DefenseConfig cfg, std::uint64_t seed);

  double submit(std::span<const double> q) override { return respond(q).value; }
  PerturbedResponse respond(std::span<const double> q);

  std::size_t dimension() const override { return n_; }
  bool refused() const { return refused_; }
  double threshold() const { return acct_.threshold; }
  const PrivacyAccountant& accountant() const { return acct_; }
  const Monitor& monitor() const { return monitor_; }
  Monitor& monitor() { return monitor_; }

  /// CSV export of the allocation history: i,epsilon_i,L_i,status
  std::string history_csv() const;

 private:
  PerturbedResponse refusal_response();

  PredictFn target_;
  std::size_t n_;
  Monitor monitor_;
  PrivacyAccountant acct_;
  DefenseConfig cfg_;
  Rng rng_;
  bool refused_ = false;
};

/// Adaptive BDPL: the per-query flip probability uses the APBA-allocated
/// eps_i instead of a fixed eps.
DefendedEndpoint wrap_bdpl_with_mdp(PredictFn target, std::size_t n,
                                    const Dataset& reference, double epsilon,
                                    double alpha, double delta_zone,
                                    std::uint64_t seed);

}  // namespace qpdlab

#endif
