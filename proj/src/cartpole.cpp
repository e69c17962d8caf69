#include "tea/cartpole.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace tea::cartpole {
namespace {

std::atomic<std::uint64_t> g_interactions{0};

}  // namespace

bool is_terminal(const CartState& s) {
  return std::abs(s.x) > kXThreshold || std::abs(s.theta) > kThetaThreshold;
}

EnvParams env_params_from_units(double u_pole, double u_mass, int env_id) {
  EnvParams p;
  p.pole_length = kPoleLengthMin + u_pole * (kPoleLengthMax - kPoleLengthMin);
  p.cart_mass = kCartMassMin + u_mass * (kCartMassMax - kCartMassMin);
  p.env_id = env_id;
  return p;
}

EnvParams sample_env_params(SeededRng& rng, int env_id) {
  const double u_pole = rng.next_unit();
  const double u_mass = rng.next_unit();
  return env_params_from_units(u_pole, u_mass, env_id);
}

CartState reset_state(SeededRng& rng) {
  CartState s;
  s.x = rng.uniform(-kResetNoise, kResetNoise);
  s.x_dot = rng.uniform(-kResetNoise, kResetNoise);
  s.theta = rng.uniform(-kResetNoise, kResetNoise);
  s.theta_dot = rng.uniform(-kResetNoise, kResetNoise);
  return s;
}

StepResult step(const CartState& state, int action, const EnvParams& params) {
  if (action != 0 && action != 1) {
    throw std::invalid_argument("cartpole::step: action must be 0 or 1");
  }
  if (is_terminal(state)) {
    throw std::invalid_argument("cartpole::step: state is already terminal");
  }
  g_interactions.fetch_add(1, std::memory_order_relaxed);

  const double force = action == 1 ? kForceMag : -kForceMag;
  const double total_mass = params.cart_mass + kPoleMass;
  const double polemass_length = kPoleMass * params.pole_length;
  const double cos_theta = std::cos(state.theta);
  const double sin_theta = std::sin(state.theta);

  const double temp =
      (force + polemass_length * state.theta_dot * state.theta_dot * sin_theta) / total_mass;
  const double theta_acc =
      (kGravity * sin_theta - cos_theta * temp) /
      (params.pole_length * (4.0 / 3.0 - kPoleMass * cos_theta * cos_theta / total_mass));
  const double x_acc = temp - polemass_length * theta_acc * cos_theta / total_mass;

  StepResult r;
  r.next_state.x = state.x + kTau * state.x_dot;
  r.next_state.x_dot = state.x_dot + kTau * x_acc;
  r.next_state.theta = state.theta + kTau * state.theta_dot;
  r.next_state.theta_dot = state.theta_dot + kTau * theta_acc;
  r.reward = 1.0;
  r.done = is_terminal(r.next_state);
  r.truncated = false;
  return r;
}

std::uint64_t interaction_count() { return g_interactions.load(std::memory_order_relaxed); }

MultiEnv::MultiEnv(std::vector<EnvParams> envs) : envs_(std::move(envs)) {
  if (envs_.empty()) throw std::invalid_argument("MultiEnv: environment list is empty");
}

std::pair<int, CartState> MultiEnv::reset(SeededRng& rng) {
  active_idx_ = rng.uniform_index(envs_.size());
  return {envs_[active_idx_].env_id, reset_state(rng)};
}

namespace {

nlohmann::json env_to_json(const EnvParams& e) {
  return {{"env_id", e.env_id}, {"pole_length", e.pole_length}, {"cart_mass", e.cart_mass}};
}

EnvParams env_from_json(const nlohmann::json& j) {
  EnvParams e;
  e.env_id = j.at("env_id").get<int>();
  e.pole_length = j.at("pole_length").get<double>();
  e.cart_mass = j.at("cart_mass").get<double>();
  return e;
}

}  // namespace

const EnvParams* EnvManifest::find(int env_id) const {
  for (const auto& e : source_envs) {
    if (e.env_id == env_id) return &e;
  }
  for (const auto& e : new_envs) {
    if (e.env_id == env_id) return &e;
  }
  return nullptr;
}

std::string EnvManifest::label_of(int env_id) const {
  for (std::size_t i = 0; i < new_envs.size(); ++i) {
    if (new_envs[i].env_id == env_id) return "N" + std::to_string(i + 1);
  }
  for (std::size_t i = 0; i < source_envs.size(); ++i) {
    if (source_envs[i].env_id == env_id) return "S" + std::to_string(i + 1);
  }
  return "env" + std::to_string(env_id);
}

void EnvManifest::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["sampling_seed"] = sampling_seed;
  j["source_envs"] = nlohmann::json::array();
  for (const auto& e : source_envs) j["source_envs"].push_back(env_to_json(e));
  j["new_envs"] = nlohmann::json::array();
  for (const auto& e : new_envs) j["new_envs"].push_back(env_to_json(e));
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("manifest write failed: " + path.string());
}

EnvManifest EnvManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest: " + path.string());
  nlohmann::json j;
  in >> j;
  EnvManifest m;
  m.sampling_seed = j.at("sampling_seed").get<std::uint64_t>();
  for (const auto& e : j.at("source_envs")) m.source_envs.push_back(env_from_json(e));
  for (const auto& e : j.at("new_envs")) m.new_envs.push_back(env_from_json(e));
  return m;
}

EnvManifest sample_manifest(std::uint64_t seed, int n_source, int n_new) {
  if (n_source < 1 || n_new < 0) {
    throw std::invalid_argument("sample_manifest: need n_source >= 1, n_new >= 0");
  }
  SeededRng rng(derive_seed(seed, "env-sampling"));
  EnvManifest m;
  m.sampling_seed = seed;
  int next_id = 0;
  for (int i = 0; i < n_source; ++i) m.source_envs.push_back(sample_env_params(rng, next_id++));
  for (int i = 0; i < n_new; ++i) m.new_envs.push_back(sample_env_params(rng, next_id++));
  return m;
}

}  // namespace tea::cartpole
