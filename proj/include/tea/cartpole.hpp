#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <vector>

#include "tea/rng.hpp"

namespace tea::cartpole {

// Dynamics constants of the canonical formulation. Only pole length and cart
// mass vary between environments; everything else is fixed.
inline constexpr double kGravity = 9.8;
inline constexpr double kPoleMass = 0.1;
inline constexpr double kForceMag = 10.0;
inline constexpr double kTau = 0.02;  // explicit Euler step, seconds
inline constexpr double kXThreshold = 2.4;
inline constexpr double kThetaThreshold = 12.0 * std::numbers::pi / 180.0;
inline constexpr int kEpisodeCap = 500;
inline constexpr double kResetNoise = 0.05;

inline constexpr double kPoleLengthMin = 0.1, kPoleLengthMax = 2.0;
inline constexpr double kCartMassMin = 0.5, kCartMassMax = 2.0;

// One CartPole variant. pole_length follows the reference formulation's
// convention (the half-pole parameter).
struct EnvParams {
  double pole_length = 0.5;
  double cart_mass = 1.0;
  int env_id = 0;
};

inline EnvParams standard_env() { return EnvParams{0.5, 1.0, -1}; }

struct CartState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
};

struct StepResult {
  CartState next_state;
  double reward = 1.0;  // 1.0 for every step taken, termination included
  bool done = false;
  bool truncated = false;
};

bool is_terminal(const CartState& s);

// Maps unit draws to the sampling rectangle [0.1,2.0] x [0.5,2.0]; the unit
// values are consumed pole first, mass second.
EnvParams env_params_from_units(double u_pole, double u_mass, int env_id);
EnvParams sample_env_params(SeededRng& rng, int env_id);

// All four components ~ U(-0.05, 0.05), drawn in field order.
CartState reset_state(SeededRng& rng);

// One explicit Euler step (dt = 0.02). Throws std::invalid_argument when the
// input state is already terminal or the action is not 0/1.
StepResult step(const CartState& state, int action, const EnvParams& params);

// Process-wide count of step() calls. Lets tests and reports confirm where
// environment interaction happens (and that offline training does none).
std::uint64_t interaction_count();

// Switches uniformly at random to one member environment on every reset.
class MultiEnv {
 public:
  explicit MultiEnv(std::vector<EnvParams> envs);

  // Returns (active env_id, fresh start state). Draw order: member index
  // first, then the four state components.
  std::pair<int, CartState> reset(SeededRng& rng);

  const EnvParams& active() const { return envs_[active_idx_]; }
  const std::vector<EnvParams>& envs() const { return envs_; }

 private:
  std::vector<EnvParams> envs_;
  std::size_t active_idx_ = 0;
};

// Environment-set manifest: the sampled source and evaluation environments
// plus the seed that produced them. JSON on disk; written once by the
// collection stage and read by every later stage.
struct EnvManifest {
  std::uint64_t sampling_seed = 0;
  std::vector<EnvParams> source_envs;
  std::vector<EnvParams> new_envs;

  const EnvParams* find(int env_id) const;
  // New environments are labelled N1..Nk in listed order.
  std::string label_of(int env_id) const;

  void save(const std::filesystem::path& path) const;
  static EnvManifest load(const std::filesystem::path& path);
};

// Samples n_source + n_new environments from the parameter rectangle, in that
// order, with consecutive env_ids starting at 0.
EnvManifest sample_manifest(std::uint64_t seed, int n_source, int n_new);

}  // namespace tea::cartpole
