#ifndef QPDLAB_MECHANISMS_HPP
#define QPDLAB_MECHANISMS_HPP

#include <string>

#include "qpdlab/rng.hpp"

namespace qpdlab {

enum class MechanismKind { none, laplace, gaussian, bdpl, rounding };

MechanismKind mechanism_from_string(const std::string& s);
std::string to_string(MechanismKind k);

struct NoiseSpec {
  MechanismKind kind = MechanismKind::none;
  double epsilon = 1.0;      // per-response budget
  double sensitivity = 1.0;  // range of a probability response
  double delta_zone = 0.125; // bdpl boundary-sensitive zone half-width
  int decimals = 2;          // rounding only
  bool clamp = false;        // clamp perturbed probabilities to [0,1]

  static NoiseSpec from_json_text(const std::string& text);
};

struct PerturbedResponse {
  double value = 0.0;
  NoiseSpec mechanism;
  double epsilon_spent = 0.0;
  bool flipped = false;   // bdpl: whether the label was flipped
  bool in_zone = false;   // bdpl: whether the zone test charged the query
  bool refused = false;   // set by the defended endpoint after exhaustion
};

/// Probability that BDPL returns the label unchanged:
/// 1/2 + sqrt(e^{2eps}-1) / (2 + 2 e^eps). Monotone in eps, in [1/2, 1).
double bdpl_keep_probability(double epsilon);

/// value = y + Laplace(0, sensitivity/eps)
PerturbedResponse laplace_perturb(double y, const NoiseSpec& spec, Rng& rng);
/// value = y + Normal(0, (sensitivity/eps)^2); simulation knob, not a formal
/// (eps, delta) guarantee.
PerturbedResponse gaussian_perturb(double y, const NoiseSpec& spec, Rng& rng);
/// Randomized response on a binary label; prob is the model confidence used
/// for the zone test |prob - 0.5| < delta_zone. Out-of-zone responses are
/// returned unchanged and charge no budget.
PerturbedResponse bdpl_perturb(int y, double prob, const NoiseSpec& spec, Rng& rng);
/// Half-away-from-zero rounding to `decimals` places; charges nothing.
PerturbedResponse round_confidence(double y, int decimals);

}  // namespace qpdlab

#endif
