#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tea/cartpole.hpp"

namespace tea::data {

struct Transition {
  std::vector<double> state;
  int action = 0;  // 0/1
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;  // physics termination only; truncation is stored as false
  int env_id = 0;
};

enum class Variant : std::uint8_t { baseline = 0, aug_encoding = 1, aug_true = 2 };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);
std::size_t variant_state_dim(Variant v);  // baseline 4, aug_encoding 8, aug_true 6

inline constexpr std::size_t kWindowStates = 16;
inline constexpr std::size_t kWindowActions = kWindowStates - 1;
inline constexpr std::size_t kFlatWindowDim = kWindowStates * 4 + kWindowActions;  // 79

// 16 consecutive states from one episode and the 15 actions between them.
struct TrajectoryWindow {
  std::array<cartpole::CartState, kWindowStates> states;
  std::array<int, kWindowActions> actions;
  int env_id = 0;
};

// Append-only transition store. Insertion order is part of the determinism
// contract; all transitions share the variant's state dimension.
class Dataset {
 public:
  Dataset(Variant variant, std::string manifest_ref = "", std::uint64_t creation_seed = 0);

  static Dataset baseline(std::string manifest_ref = "", std::uint64_t creation_seed = 0);

  void append(Transition t);  // throws std::invalid_argument on dimension mismatch

  std::size_t size() const { return transitions_.size(); }
  bool empty() const { return transitions_.empty(); }
  const Transition& operator[](std::size_t i) const { return transitions_[i]; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  Variant variant() const { return variant_; }
  std::size_t state_dim() const { return state_dim_; }
  const std::string& manifest_ref() const { return manifest_ref_; }
  std::uint64_t creation_seed() const { return creation_seed_; }

  std::size_t count_for_env(int env_id) const;

  bool operator==(const Dataset&) const = default;

 private:
  Variant variant_;
  std::size_t state_dim_;
  std::string manifest_ref_;
  std::uint64_t creation_seed_;
  std::vector<Transition> transitions_;
};

// Non-overlapping length-16 state windows, aligned to episode start, never
// crossing an episode boundary. Episode boundaries are reconstructed from the
// stream: done=true, env_id change, or next_state[i] != state[i+1] (a reset
// always breaks the state chain). Baseline buffers only.
std::vector<TrajectoryWindow> extract_windows(const Dataset& buffer, int env_id,
                                              std::size_t window_len = kWindowStates);

// Interleaved [s0(4), a0, s1(4), a1, ..., a14, s15(4)] -> 79 values; actions
// encoded as raw 0.0/1.0.
std::vector<double> flatten_window(const TrajectoryWindow& w);

// Appends a per-environment 4-dim encoding to state and next_state of every
// transition. Requires a baseline buffer and an encoding for every env_id
// present.
Dataset augment_with_encoding(const Dataset& buffer,
                              const std::map<int, std::vector<double>>& encodings);

// Appends [pole_length, cart_mass] of each transition's environment.
Dataset augment_with_true_params(const Dataset& buffer, const cartpole::EnvManifest& manifest);

// TEABUF01 binary format plus a <path>.json sidecar (see docs/FORMATS.md).
// The round trip is bit-exact, including transition order.
void save(const Dataset& buffer, const std::filesystem::path& path);
Dataset load(const std::filesystem::path& path);

}  // namespace tea::data
