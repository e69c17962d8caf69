#include "tea/dataset.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "tea/serial.hpp"

namespace tea::data {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::aug_encoding: return "aug_encoding";
    case Variant::aug_true: return "aug_true";
  }
  throw std::invalid_argument("unknown variant");
}

Variant variant_from_name(const std::string& name) {
  if (name == "baseline") return Variant::baseline;
  if (name == "aug_encoding") return Variant::aug_encoding;
  if (name == "aug_true") return Variant::aug_true;
  throw std::invalid_argument("unknown variant name: " + name);
}

std::size_t variant_state_dim(Variant v) {
  switch (v) {
    case Variant::baseline: return 4;
    case Variant::aug_encoding: return 8;
    case Variant::aug_true: return 6;
  }
  throw std::invalid_argument("unknown variant");
}

Dataset::Dataset(Variant variant, std::string manifest_ref, std::uint64_t creation_seed)
    : variant_(variant),
      state_dim_(variant_state_dim(variant)),
      manifest_ref_(std::move(manifest_ref)),
      creation_seed_(creation_seed) {}

Dataset Dataset::baseline(std::string manifest_ref, std::uint64_t creation_seed) {
  return Dataset(Variant::baseline, std::move(manifest_ref), creation_seed);
}

void Dataset::append(Transition t) {
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_) {
    throw std::invalid_argument("Dataset::append: transition dimension mismatch");
  }
  if (t.action != 0 && t.action != 1) {
    throw std::invalid_argument("Dataset::append: action must be 0 or 1");
  }
  transitions_.push_back(std::move(t));
}

std::size_t Dataset::count_for_env(int env_id) const {
  std::size_t n = 0;
  for (const auto& t : transitions_) {
    if (t.env_id == env_id) ++n;
  }
  return n;
}

namespace {

// True when transition i ends an episode segment within the stream.
bool segment_break(const Dataset& buf, std::size_t i) {
  const Transition& t = buf[i];
  if (t.done) return true;
  if (i + 1 == buf.size()) return true;
  const Transition& next = buf[i + 1];
  if (next.env_id != t.env_id) return true;
  return std::memcmp(t.next_state.data(), next.state.data(),
                     t.next_state.size() * sizeof(double)) != 0;
}

cartpole::CartState to_cart_state(std::span<const double> v) {
  return cartpole::CartState{v[0], v[1], v[2], v[3]};
}

}  // namespace

std::vector<TrajectoryWindow> extract_windows(const Dataset& buffer, int env_id,
                                              std::size_t window_len) {
  if (buffer.variant() != Variant::baseline) {
    throw std::invalid_argument("extract_windows: requires a baseline (4-dim) buffer");
  }
  if (window_len != kWindowStates) {
    throw std::invalid_argument("extract_windows: only window_len 16 is supported");
  }
  bool env_seen = false;
  std::vector<TrajectoryWindow> windows;
  std::size_t seg_start = 0;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    if (buffer[i].env_id == env_id) env_seen = true;
    if (!segment_break(buffer, i)) continue;
    const std::size_t seg_len = i - seg_start + 1;  // transitions in segment
    if (buffer[seg_start].env_id == env_id) {
      // Segment states: s_0..s_L with L = seg_len; window k covers states
      // 16k..16k+15, i.e. transitions 16k..16k+14.
      const std::size_t n_states = seg_len + 1;
      for (std::size_t k = 0; (k + 1) * kWindowStates <= n_states; ++k) {
        TrajectoryWindow w;
        w.env_id = env_id;
        const std::size_t base = seg_start + k * kWindowStates;
        for (std::size_t j = 0; j < kWindowActions; ++j) {
          w.states[j] = to_cart_state(buffer[base + j].state);
          w.actions[j] = buffer[base + j].action;
        }
        w.states[kWindowStates - 1] = to_cart_state(buffer[base + kWindowActions - 1].next_state);
        windows.push_back(w);
      }
    }
    seg_start = i + 1;
  }
  if (!env_seen) {
    throw std::invalid_argument("extract_windows: env_id " + std::to_string(env_id) +
                                " not present in buffer");
  }
  return windows;
}

std::vector<double> flatten_window(const TrajectoryWindow& w) {
  std::vector<double> out;
  out.reserve(kFlatWindowDim);
  for (std::size_t i = 0; i < kWindowStates; ++i) {
    out.push_back(w.states[i].x);
    out.push_back(w.states[i].x_dot);
    out.push_back(w.states[i].theta);
    out.push_back(w.states[i].theta_dot);
    if (i < kWindowActions) out.push_back(static_cast<double>(w.actions[i]));
  }
  return out;
}

namespace {

Dataset augment_with_suffix(const Dataset& buffer, Variant out_variant,
                            const std::map<int, std::vector<double>>& suffix_by_env,
                            const char* what) {
  if (buffer.variant() != Variant::baseline) {
    throw std::invalid_argument(std::string("augment: requires a baseline buffer, got ") +
                                variant_name(buffer.variant()));
  }
  const std::size_t suffix_dim = variant_state_dim(out_variant) - variant_state_dim(Variant::baseline);
  Dataset out(out_variant, buffer.manifest_ref(), buffer.creation_seed());
  for (const auto& t : buffer.transitions()) {
    auto it = suffix_by_env.find(t.env_id);
    if (it == suffix_by_env.end()) {
      throw std::invalid_argument(std::string("augment: missing ") + what + " for env_id " +
                                  std::to_string(t.env_id));
    }
    const auto& suffix = it->second;
    if (suffix.size() != suffix_dim) {
      throw std::invalid_argument(std::string("augment: ") + what + " for env_id " +
                                  std::to_string(t.env_id) + " has wrong dimension");
    }
    Transition a = t;
    a.state.insert(a.state.end(), suffix.begin(), suffix.end());
    a.next_state.insert(a.next_state.end(), suffix.begin(), suffix.end());
    out.append(std::move(a));
  }
  return out;
}

}  // namespace

Dataset augment_with_encoding(const Dataset& buffer,
                              const std::map<int, std::vector<double>>& encodings) {
  return augment_with_suffix(buffer, Variant::aug_encoding, encodings, "encoding");
}

Dataset augment_with_true_params(const Dataset& buffer, const cartpole::EnvManifest& manifest) {
  std::map<int, std::vector<double>> suffixes;
  for (const auto& t : buffer.transitions()) {
    if (suffixes.count(t.env_id)) continue;
    const cartpole::EnvParams* p = manifest.find(t.env_id);
    if (!p) {
      throw std::invalid_argument("augment_with_true_params: env_id " +
                                  std::to_string(t.env_id) + " missing from manifest");
    }
    suffixes[t.env_id] = {p->pole_length, p->cart_mass};
  }
  return augment_with_suffix(buffer, Variant::aug_true, suffixes, "manifest entry");
}

namespace {
constexpr char kBufMagic[9] = "TEABUF01";
constexpr std::uint32_t kBufVersion = 1;
}  // namespace

void save(const Dataset& buffer, const std::filesystem::path& path) {
  serial::Writer w(path);
  w.magic(kBufMagic);
  w.u32(kBufVersion);
  w.u8(static_cast<std::uint8_t>(buffer.variant()));
  w.u32(static_cast<std::uint32_t>(buffer.state_dim()));
  w.u64(buffer.size());
  for (const auto& t : buffer.transitions()) {
    w.f64_array(t.state);
    w.f64_array(t.next_state);
    w.u8(static_cast<std::uint8_t>(t.action));
    w.f64(t.reward);
    w.u8(t.done ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(t.env_id));
  }
  w.finish_with_crc();

  nlohmann::json sidecar;
  sidecar["format"] = "TEABUF01";
  sidecar["variant"] = variant_name(buffer.variant());
  sidecar["state_dim"] = buffer.state_dim();
  sidecar["count"] = buffer.size();
  sidecar["manifest_ref"] = buffer.manifest_ref();
  sidecar["creation_seed"] = buffer.creation_seed();
  std::ofstream side(path.string() + ".json");
  if (!side) throw std::runtime_error("cannot write sidecar for " + path.string());
  side << sidecar.dump(2) << '\n';
  if (!side) throw std::runtime_error("sidecar write failed for " + path.string());
}

Dataset load(const std::filesystem::path& path) {
  serial::Reader r(path);
  r.expect_magic(kBufMagic);
  const std::uint32_t version = r.u32();
  if (version != kBufVersion) {
    throw std::runtime_error("unsupported TEABUF version " + std::to_string(version) + " in " +
                             path.string());
  }
  const std::uint8_t variant_raw = r.u8();
  if (variant_raw > 2) throw std::runtime_error("bad variant byte in " + path.string());
  const auto variant = static_cast<Variant>(variant_raw);
  const std::uint32_t state_dim = r.u32();
  if (state_dim != variant_state_dim(variant)) {
    throw std::runtime_error("variant/state_dim mismatch in " + path.string());
  }
  const std::uint64_t count = r.u64();

  std::string manifest_ref;
  std::uint64_t creation_seed = 0;
  {
    std::ifstream side(path.string() + ".json");
    if (!side) throw std::runtime_error("missing sidecar: " + path.string() + ".json");
    nlohmann::json sidecar;
    side >> sidecar;
    manifest_ref = sidecar.at("manifest_ref").get<std::string>();
    creation_seed = sidecar.at("creation_seed").get<std::uint64_t>();
  }

  Dataset out(variant, manifest_ref, creation_seed);
  for (std::uint64_t i = 0; i < count; ++i) {
    Transition t;
    t.state.resize(state_dim);
    t.next_state.resize(state_dim);
    r.f64_array(t.state);
    r.f64_array(t.next_state);
    t.action = r.u8();
    t.reward = r.f64();
    t.done = r.u8() != 0;
    t.env_id = static_cast<int>(r.u32());
    out.append(std::move(t));
  }
  r.verify_crc_trailer();
  return out;
}

}  // namespace tea::data
