#include "qpdlab/mechanisms.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace qpdlab {

MechanismKind mechanism_from_string(const std::string& s) {
  if (s == "none") return MechanismKind::none;
  if (s == "laplace") return MechanismKind::laplace;
  if (s == "gaussian") return MechanismKind::gaussian;
  if (s == "bdpl") return MechanismKind::bdpl;
  if (s == "rounding") return MechanismKind::rounding;
  throw std::invalid_argument("unknown mechanism '" + s + "'");
}

std::string to_string(MechanismKind k) {
  switch (k) {
    case MechanismKind::none: return "none";
    case MechanismKind::laplace: return "laplace";
    case MechanismKind::gaussian: return "gaussian";
    case MechanismKind::bdpl: return "bdpl";
    case MechanismKind::rounding: return "rounding";
  }
  return "?";
}

NoiseSpec NoiseSpec::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  NoiseSpec s;
  s.kind = mechanism_from_string(j.at("kind").get<std::string>());
  s.epsilon = j.value("epsilon", 1.0);
  s.sensitivity = j.value("sensitivity", 1.0);
  s.delta_zone = j.value("delta_zone", 0.125);
  s.decimals = j.value("decimals", 2);
  s.clamp = j.value("clamp", false);
  if (s.kind == MechanismKind::bdpl && (s.delta_zone <= 0.0 || s.delta_zone > 0.5))
    throw std::invalid_argument("bdpl: delta_zone must lie in (0, 0.5]");
  return s;
}

namespace {
void require_positive_epsilon(const NoiseSpec& spec) {
  if (spec.epsilon <= 0.0)
    throw std::invalid_argument("mechanism: epsilon must be positive");
}

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }
}  // namespace

double bdpl_keep_probability(double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("bdpl: epsilon must be positive");
  const double e = std::exp(epsilon);
  return 0.5 + std::sqrt(e * e - 1.0) / (2.0 + 2.0 * e);
}

PerturbedResponse laplace_perturb(double y, const NoiseSpec& spec, Rng& rng) {
  require_positive_epsilon(spec);
  PerturbedResponse r;
  r.mechanism = spec;
  r.value = y + rng.laplace(spec.sensitivity / spec.epsilon);
  if (spec.clamp) r.value = clamp01(r.value);
  r.epsilon_spent = spec.epsilon;
  return r;
}

PerturbedResponse gaussian_perturb(double y, const NoiseSpec& spec, Rng& rng) {
  require_positive_epsilon(spec);
  PerturbedResponse r;
  r.mechanism = spec;
  r.value = y + rng.gaussian(0.0, spec.sensitivity / spec.epsilon);
  if (spec.clamp) r.value = clamp01(r.value);
  r.epsilon_spent = spec.epsilon;
  return r;
}

PerturbedResponse bdpl_perturb(int y, double prob, const NoiseSpec& spec, Rng& rng) {
  require_positive_epsilon(spec);
  if (y != 0 && y != 1) throw std::invalid_argument("bdpl: label must be 0 or 1");
  PerturbedResponse r;
  r.mechanism = spec;
  r.in_zone = std::abs(prob - 0.5) < spec.delta_zone;
  if (!r.in_zone) {
    r.value = static_cast<double>(y);
    r.epsilon_spent = 0.0;
    return r;
  }
  const double keep = bdpl_keep_probability(spec.epsilon);
  r.flipped = !rng.bernoulli(keep);
  r.value = static_cast<double>(r.flipped ? 1 - y : y);
  r.epsilon_spent = spec.epsilon;
  return r;
}

PerturbedResponse round_confidence(double y, int decimals) {
  if (decimals < 0) throw std::invalid_argument("rounding: decimals must be >= 0");
  PerturbedResponse r;
  r.mechanism.kind = MechanismKind::rounding;
  r.mechanism.decimals = decimals;
  const double scale = std::pow(10.0, decimals);
  // round half away from zero
  r.value = (y >= 0.0 ? std::floor(y * scale + 0.5) : std::ceil(y * scale - 0.5)) / scale;
  r.epsilon_spent = 0.0;
  return r;
}

}  // namespace qpdlab
