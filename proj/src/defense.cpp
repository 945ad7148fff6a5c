#include "qpdlab/defense.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qpdlab/models.hpp"

#include <json.hpp>

namespace qpdlab {

double apba_allocate(PrivacyAccountant& acct) {
  if (acct.threshold <= 0.0)
    throw std::invalid_argument("apba: leakage threshold must be positive");
  if (acct.epsilon_remaining <= 0.0) return 0.0;
  if (acct.leakage > acct.threshold) return 0.0;  // budget-exhausted signal
  const double eps_re = acct.epsilon_remaining;
  if (!acct.fixed_p || acct.scale_p == 0.0)
    acct.scale_p = 9.0 * eps_re * eps_re / (4.0 * std::pow(acct.threshold, 3));
  const double under = acct.scale_p * (acct.threshold - acct.leakage);
  const double eps_i = std::sqrt(std::max(0.0, under));
  return std::min(eps_i, eps_re);
}

DefenseConfig DefenseConfig::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  DefenseConfig cfg;
  cfg.mechanism = mechanism_from_string(j.at("mechanism").get<std::string>());
  cfg.epsilon = j.value("epsilon", 1.0);
  cfg.alpha = j.value("alpha", 1.0);
  cfg.delta_zone = j.value("delta_zone", 0.125);
  cfg.fixed_p = j.value("fixed_p", false);
  cfg.clamp = j.value("clamp", false);
  cfg.eps_floor = j.value("eps_floor", 1e-9);
  if (cfg.epsilon <= 0.0) throw std::invalid_argument("defense: epsilon must be positive");
  if (cfg.alpha <= 0.0 || cfg.alpha > 1.0)
    throw std::invalid_argument("defense: alpha must lie in (0, 1]");
  return cfg;
}

namespace {

double plain_response(double prob, ResponseKind kind, Rng& rng) {
  switch (kind) {
    case ResponseKind::probability: return prob;
    case ResponseKind::label: return label_of(prob);
    case ResponseKind::label_sample: return rng.bernoulli(prob) ? 1.0 : 0.0;
  }
  return prob;
}

}  // namespace

FixedEndpoint::FixedEndpoint(PredictFn target, std::size_t n, NoiseSpec spec,
                             ResponseKind kind, std::uint64_t seed)
    : target_(std::move(target)), n_(n), spec_(spec), kind_(kind), rng_(seed) {}

double FixedEndpoint::submit(std::span<const double> q) {
  if (q.size() != n_) throw std::invalid_argument("endpoint: query dimension mismatch");
  count_query();
  const double prob = target_(q);
  switch (spec_.kind) {
    case MechanismKind::none:
      return plain_response(prob, kind_, rng_);
    case MechanismKind::laplace:
      return laplace_perturb(prob, spec_, rng_).value;
    case MechanismKind::gaussian:
      return gaussian_perturb(prob, spec_, rng_).value;
    case MechanismKind::bdpl:
      return bdpl_perturb(label_of(prob), prob, spec_, rng_).value;
    case MechanismKind::rounding:
      return round_confidence(prob, spec_.decimals).value;
  }
  return prob;
}

DefendedEndpoint::DefendedEndpoint(PredictFn target, std::size_t n,
                                   const Dataset& reference, DefenseConfig cfg,
                                   std::uint64_t seed)
    : target_(std::move(target)), n_(n), monitor_(reference), cfg_(cfg), rng_(seed) {
  if (reference.dim() != n)
    throw std::invalid_argument("DefendedEndpoint: dataset dimension mismatch");
  if (cfg_.epsilon <= 0.0) throw std::invalid_argument("DefendedEndpoint: epsilon <= 0");
  acct_.epsilon_total = cfg_.epsilon;
  acct_.epsilon_remaining = cfg_.epsilon;
  acct_.threshold = cfg_.alpha * monitor_.dataset_info_total();
  acct_.fixed_p = cfg_.fixed_p;
  if (acct_.threshold <= 0.0)
    throw std::invalid_argument("DefendedEndpoint: dataset carries no information");
}

PerturbedResponse DefendedEndpoint::refusal_response() {
  PerturbedResponse r;
  r.refused = true;
  r.epsilon_spent = 0.0;
  // uninformative: constant mid-confidence, or a fair coin for label mechanisms
  r.value = cfg_.mechanism == MechanismKind::bdpl ? (rng_.bernoulli(0.5) ? 1.0 : 0.0) : 0.5;
  return r;
}

PerturbedResponse DefendedEndpoint::respond(std::span<const double> q) {
  if (q.size() != n_) throw std::invalid_argument("endpoint: query dimension mismatch");
  count_query();
  if (refused_) return refusal_response();

  const double prob = target_(q);

  // monitoring-only wrappers: no budget to allocate
  if (cfg_.mechanism == MechanismKind::none || cfg_.mechanism == MechanismKind::rounding) {
    PerturbedResponse r;
    r.value = cfg_.mechanism == MechanismKind::none
                  ? plain_response(prob, cfg_.response, rng_)
                  : round_confidence(prob, 2).value;
    monitor_.observe(q, r.value);
    return r;
  }

  acct_.leakage = monitor_.leakage();
  const double allocated = apba_allocate(acct_);
  if (allocated < cfg_.eps_floor || acct_.leakage >= acct_.threshold) {
    refused_ = true;
    acct_.history.push_back(
        {acct_.history.size() + 1, allocated, 0.0, acct_.leakage, true});
    return refusal_response();
  }

  NoiseSpec spec;
  spec.kind = cfg_.mechanism;
  spec.epsilon = allocated;
  spec.delta_zone = cfg_.delta_zone;
  spec.clamp = cfg_.clamp;

  PerturbedResponse r;
  switch (cfg_.mechanism) {
    case MechanismKind::laplace:
      r = laplace_perturb(prob, spec, rng_);
      break;
    case MechanismKind::gaussian:
      r = gaussian_perturb(prob, spec, rng_);
      break;
    case MechanismKind::bdpl:
      r = bdpl_perturb(label_of(prob), prob, spec, rng_);
      break;
    default:
      throw std::logic_error("DefendedEndpoint: unexpected mechanism");
  }

  acct_.epsilon_remaining -= r.epsilon_spent;
  acct_.history.push_back(
      {acct_.history.size() + 1, allocated, r.epsilon_spent, acct_.leakage, false});
  monitor_.observe(q, r.value);
  return r;
}

std::string DefendedEndpoint::history_csv() const {
  std::ostringstream out;
  out << "i,epsilon_i,L_i,status\n";
  char buf[96];
  for (const auto& rec : acct_.history) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g,%s\n", rec.index, rec.spent,
                  rec.leakage, rec.refused ? "refused" : "ok");
    out << buf;
  }
  return out.str();
}

DefendedEndpoint wrap_bdpl_with_mdp(PredictFn target, std::size_t n,
                                    const Dataset& reference, double epsilon,
                                    double alpha, double delta_zone,
                                    std::uint64_t seed) {
  DefenseConfig cfg;
  cfg.mechanism = MechanismKind::bdpl;
  cfg.epsilon = epsilon;
  cfg.alpha = alpha;
  cfg.delta_zone = delta_zone;
  return DefendedEndpoint(std::move(target), n, reference, cfg, seed);
}

}  // namespace qpdlab
