// Copyright 2026 The arma-planar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arma/io/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "arma/errors.hpp"
#include "arma/hash.hpp"

namespace arma::io {

namespace {

using Values = std::vector<std::string>;

struct Bounds {
  double lo;
  double hi;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double v) const {
    if (!std::isfinite(v)) return false;
    return (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  }
  std::string str() const {
    std::ostringstream o;
    o << (lo_open ? '(' : '[') << lo << ", " << hi << (hi_open ? ')' : ']');
    return o.str();
  }
};

constexpr double kInf = 1e300;
constexpr Bounds kPositive{0.0, kInf, true, false};
constexpr Bounds kUnit{0.0, 1.0};
// Friction values accepted anywhere a friction is configured.
constexpr Bounds kFrictionSuperset{0.05, 5.0};

struct Key {
  std::string name;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const Values&)> set;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

std::string single(const std::string& key, const Values& v) {
  if (v.size() != 1) bad(key, "expected one value, got " + std::to_string(v.size()));
  return v[0];
}

double to_double(const std::string& key, const std::string& s) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size()) bad(key, "'" + s + "' is not a number");
  return out;
}

int64_t to_int(const std::string& key, const std::string& s) {
  int64_t out = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size()) bad(key, "'" + s + "' is not an integer");
  return out;
}

void check(const std::string& key, double v, const Bounds& b) {
  if (!b.contains(v)) bad(key, fmt(v) + " is out of range " + b.str());
}

template <typename Get>
Key real(std::string name, Get ref, Bounds b) {
  return {name, [ref](const RunConfig& c) { return fmt(ref(const_cast<RunConfig&>(c))); },
          [name, ref, b](RunConfig& c, const Values& v) {
            const double x = to_double(name, single(name, v));
            check(name, x, b);
            ref(c) = x;
          }};
}

template <typename Get>
Key integer(std::string name, Get ref, int64_t lo, int64_t hi = 1 << 30) {
  return {name, [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); },
          [name, ref, lo, hi](RunConfig& c, const Values& v) {
            const int64_t x = to_int(name, single(name, v));
            if (x < lo || x > hi) bad(name, std::to_string(x) + " is out of range [" + std::to_string(lo) + ", " +
                                                std::to_string(hi) + "]");
            ref(c) = static_cast<std::remove_reference_t<decltype(ref(c))>>(x);
          }};
}

template <typename Get>
Key boolean(std::string name, Get ref) {
  return {name, [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)) ? "true" : "false"; },
          [name, ref](RunConfig& c, const Values& v) {
            const std::string s = single(name, v);
            if (s == "true" || s == "1") {
              ref(c) = true;
            } else if (s == "false" || s == "0") {
              ref(c) = false;
            } else {
              bad(name, "'" + s + "' is not a boolean");
            }
          }};
}

template <typename Get>
Key widths(std::string name, Get ref) {
  return {name,
          [ref](const RunConfig& c) {
            std::string out;
            for (int w : ref(const_cast<RunConfig&>(c))) out += (out.empty() ? "" : ",") + std::to_string(w);
            return out;
          },
          [name, ref](RunConfig& c, const Values& v) {
            if (v.empty()) bad(name, "needs at least one layer width");
            std::vector<int> out;
            for (const std::string& s : v) {
              const int64_t x = to_int(name, s);
              if (x < 1 || x > 65536) bad(name, "layer width " + s + " is out of range [1, 65536]");
              out.push_back(static_cast<int>(x));
            }
            ref(c) = out;
          }};
}

template <size_t N, typename Get>
Key reals(std::string name, Get ref, Bounds b) {
  return {name,
          [ref](const RunConfig& c) {
            std::string out;
            for (double x : ref(const_cast<RunConfig&>(c))) out += (out.empty() ? "" : ",") + fmt(x);
            return out;
          },
          [name, ref, b](RunConfig& c, const Values& v) {
            if (v.size() != N) bad(name, "expected " + std::to_string(N) + " values, got " + std::to_string(v.size()));
            std::array<double, N> out{};
            for (size_t i = 0; i < N; ++i) {
              out[i] = to_double(name, v[i]);
              check(name, out[i], b);
            }
            ref(c) = out;
          }};
}

// "kernel:stride:channels" per layer.
Key conv_layers(std::string name) {
  return {name,
          [](const RunConfig& c) {
            std::string out;
            for (const auto& l : c.train.agents.phi_conv) {
              out += (out.empty() ? "" : ",") + std::to_string(l.kernel) + ":" + std::to_string(l.stride) + ":" +
                     std::to_string(l.channels);
            }
            return out;
          },
          [name](RunConfig& c, const Values& v) {
            if (v.empty()) bad(name, "needs at least one layer");
            std::vector<nn::ConvLayerSpec> out;
            for (const std::string& s : v) {
              int k = 0, st = 0, ch = 0;
              char tail = 0;
              if (std::sscanf(s.c_str(), "%d:%d:%d%c", &k, &st, &ch, &tail) != 3 || k < 1 || st < 1 || ch < 1) {
                bad(name, "layer '" + s + "' is not kernel:stride:channels with positive entries");
              }
              out.push_back({k, st, ch});
            }
            c.train.agents.phi_conv = out;
          }};
}

const char* profile_name(Profile p) { return p == Profile::kDesk ? "desk" : "paper-scale"; }

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    k.push_back({"profile", [](const RunConfig& c) { return std::string(profile_name(c.profile)); },
                 [](RunConfig& c, const Values& v) {
                   const std::string s = single("profile", v);
                   if (s == "desk") {
                     apply_profile(c, Profile::kDesk);
                   } else if (s == "paper-scale") {
                     apply_profile(c, Profile::kPaperScale);
                   } else {
                     bad("profile", "'" + s + "' is not one of desk, paper-scale");
                   }
                 }});
    // ppo
    k.push_back(integer("ppo.batch", [](RunConfig& c) -> int& { return c.train.ppo.batch; }, 1));
    k.push_back(integer("ppo.minibatch", [](RunConfig& c) -> int& { return c.train.ppo.minibatch; }, 1));
    k.push_back(integer("ppo.num_envs", [](RunConfig& c) -> int& { return c.train.ppo.num_envs; }, 1, 4096));
    k.push_back(integer("ppo.epochs", [](RunConfig& c) -> int& { return c.train.ppo.epochs; }, 1, 1000));
    k.push_back(real("ppo.clip", [](RunConfig& c) -> double& { return c.train.ppo.clip; }, {0.0, 1.0, false, true}));
    k.push_back(real("ppo.gamma", [](RunConfig& c) -> double& { return c.train.ppo.gamma; }, {0.0, 1.0, true, false}));
    k.push_back(real("ppo.lambda", [](RunConfig& c) -> double& { return c.train.ppo.lambda; }, {0.0, 1.0, true, false}));
    k.push_back(real("ppo.lr", [](RunConfig& c) -> double& { return c.train.ppo.lr; }, {0.0, 1.0, true, false}));
    k.push_back(real("ppo.entropy_coef", [](RunConfig& c) -> double& { return c.train.ppo.entropy_coef; }, kUnit));
    k.push_back(real("ppo.value_coef", [](RunConfig& c) -> double& { return c.train.ppo.value_coef; }, {0.0, 100.0}));
    k.push_back(real("ppo.max_grad_norm", [](RunConfig& c) -> double& { return c.train.ppo.max_grad_norm; }, kPositive));
    // train
    k.push_back(integer("train.phase1_iterations", [](RunConfig& c) -> int& { return c.train.phase1_iterations; }, 1));
    k.push_back(integer("train.phase3_iterations", [](RunConfig& c) -> int& { return c.train.phase3_iterations; }, 1));
    k.push_back(integer("train.robust_iterations", [](RunConfig& c) -> int& { return c.train.robust_iterations; }, 1));
    k.push_back(real("train.imitation_floor", [](RunConfig& c) -> double& { return c.train.imitation_floor; }, kUnit));
    k.push_back(real("train.imitation_decay_fraction",
                     [](RunConfig& c) -> double& { return c.train.imitation_decay_fraction; }, {0.0, 1.0, true, false}));
    k.push_back(integer("train.checkpoint_every", [](RunConfig& c) -> int& { return c.train.checkpoint_every; }, 1));
    k.push_back(integer("train.log_every", [](RunConfig& c) -> int& { return c.train.log_every; }, 0));
    // phase2
    k.push_back(integer("phase2.iterations", [](RunConfig& c) -> int& { return c.train.phase2.iterations; }, 1));
    k.push_back(real("phase2.lr", [](RunConfig& c) -> double& { return c.train.phase2.lr; }, {0.0, 1.0, true, false}));
    k.push_back(integer("phase2.batch", [](RunConfig& c) -> int& { return c.train.phase2.batch; }, 1));
    k.push_back(integer("phase2.num_envs", [](RunConfig& c) -> int& { return c.train.phase2.num_envs; }, 1, 4096));
    k.push_back(integer("phase2.minibatch", [](RunConfig& c) -> int& { return c.train.phase2.minibatch; }, 1));
    k.push_back(integer("phase2.epochs", [](RunConfig& c) -> int& { return c.train.phase2.epochs; }, 1, 1000));
    k.push_back(real("phase2.divergence_factor", [](RunConfig& c) -> double& { return c.train.phase2.divergence_factor; },
                     {1.0, kInf, true, false}));
    k.push_back(integer("phase2.smoothing", [](RunConfig& c) -> int& { return c.train.phase2.smoothing; }, 1));
    // agents
    k.push_back(widths("agents.policy_hidden", [](RunConfig& c) -> std::vector<int>& { return c.train.agents.policy_hidden; }));
    k.push_back(widths("agents.mu_hidden", [](RunConfig& c) -> std::vector<int>& { return c.train.agents.mu_hidden; }));
    k.push_back(widths("agents.critic_hidden", [](RunConfig& c) -> std::vector<int>& { return c.train.agents.critic_hidden; }));
    k.push_back(conv_layers("agents.phi_conv"));
    k.push_back(widths("agents.phi_hidden", [](RunConfig& c) -> std::vector<int>& { return c.train.agents.phi_hidden; }));
    k.push_back(real("agents.init_log_std", [](RunConfig& c) -> double& { return c.train.agents.init_log_std; }, {-10.0, 2.0}));
    k.push_back(real("agents.policy_output_gain", [](RunConfig& c) -> double& { return c.train.agents.policy_output_gain; },
                     {0.0, 10.0, true, false}));
    // env
    k.push_back(integer("env.max_steps", [](RunConfig& c) -> int& { return c.train.env.max_steps; }, 1));
    k.push_back(real("env.resample_period", [](RunConfig& c) -> double& { return c.train.env.resample_period; }, kPositive));
    k.push_back(real("env.fall_height", [](RunConfig& c) -> double& { return c.train.env.fall_height; }, {0.0, 1.0, true, true}));
    k.push_back(real("env.action_filter_beta", [](RunConfig& c) -> double& { return c.train.env.action_filter_beta; },
                     {0.0, 1.0, false, true}));
    k.push_back(boolean("env.resample_command", [](RunConfig& c) -> bool& { return c.train.env.resample_command; }));
    k.push_back(boolean("env.resample_params", [](RunConfig& c) -> bool& { return c.train.env.resample_params; }));
    k.push_back(reals<4>("env.terrain_mix", [](RunConfig& c) -> std::array<double, 4>& { return c.train.env.terrain_mix; },
                         {0.0, kInf}));
    k.push_back(real("env.friction_min", [](RunConfig& c) -> double& { return c.train.env.friction_range.lo; },
                     kFrictionSuperset));
    k.push_back(real("env.friction_max", [](RunConfig& c) -> double& { return c.train.env.friction_range.hi; },
                     kFrictionSuperset));
    // reward
    k.push_back(reals<env::kRewardTerms>(
        "reward.weights", [](RunConfig& c) -> std::array<double, env::kRewardTerms>& { return c.train.env.reward.weights; },
        {0.0, kInf}));
    k.push_back(reals<env::kRewardTerms>(
        "reward.rhos", [](RunConfig& c) -> std::array<double, env::kRewardTerms>& { return c.train.env.reward.rhos; },
        kPositive));
    // eval
    k.push_back(integer("eval.seeds", [](RunConfig& c) -> int& { return c.eval.seeds; }, 1, 1000));
    k.push_back(integer("eval.episodes", [](RunConfig& c) -> int& { return c.eval.episodes; }, 1));
    k.push_back(real("eval.timeout", [](RunConfig& c) -> double& { return c.eval.timeout; }, kPositive));
    k.push_back(real("eval.imitation_multiplier", [](RunConfig& c) -> double& { return c.eval.imitation_multiplier; }, kUnit));
    k.push_back(real("eval.feasibility_time", [](RunConfig& c) -> double& { return c.eval.feasibility_time; }, kPositive));
    k.push_back(real("eval.transient", [](RunConfig& c) -> double& { return c.eval.transient; }, {0.0, kInf}));
    k.push_back(integer("eval.cell_trials", [](RunConfig& c) -> int& { return c.eval.cell_trials; }, 1, 100));
    k.push_back(real("eval.friction_start", [](RunConfig& c) -> double& { return c.eval.friction_start; }, kFrictionSuperset));
    k.push_back(real("eval.friction_step", [](RunConfig& c) -> double& { return c.eval.friction_step; }, {0.0, 1.0, true, false}));
    k.push_back(real("eval.friction_floor", [](RunConfig& c) -> double& { return c.eval.friction_floor; }, kFrictionSuperset));
    k.push_back(real("eval.friction_speed", [](RunConfig& c) -> double& { return c.eval.friction_speed; },
                     {env::Command::kSpeedRange.lo, env::Command::kSpeedRange.hi}));
    k.push_back(real("eval.friction_time", [](RunConfig& c) -> double& { return c.eval.friction_time; }, kPositive));
    k.push_back(integer("eval.friction_trials", [](RunConfig& c) -> int& { return c.eval.friction_trials; }, 1, 1000));
    k.push_back(integer("eval.friction_required", [](RunConfig& c) -> int& { return c.eval.friction_required; }, 1, 1000));
    return k;
  }();
  return keys;
}

const Key* find_key(const std::string& name) {
  for (const Key& k : registry()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

struct Entry {
  std::string key;
  Values values;
};

std::vector<Entry> read_entries(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  std::vector<Entry> out;
  for (const CLI::ConfigItem& it : items) {
    if (it.name == "++" || it.name == "--") continue;
    out.push_back({it.fullname(), it.inputs});
  }
  return out;
}

Entry read_override(const std::string& s) {
  const size_t eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + s + "' is not key=value");
  Entry e;
  e.key = CLI::detail::trim_copy(s.substr(0, eq));
  std::string value = CLI::detail::trim_copy(s.substr(eq + 1));
  if (value.size() >= 2 && value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
  std::string item;
  std::istringstream parts(value);
  while (std::getline(parts, item, ',')) e.values.push_back(CLI::detail::trim_copy(item));
  if (value.empty()) e.values.clear();
  return e;
}

}  // namespace

void apply_profile(RunConfig& cfg, Profile profile) {
  cfg.profile = profile;
  const bool paper = profile == Profile::kPaperScale;
  const int batch = paper ? 65536 : 4096;
  const int minibatch = paper ? 8192 : 512;
  const int hidden = paper ? 512 : 128;
  const int envs = paper ? 64 : 16;
  cfg.train.ppo.batch = cfg.train.phase2.batch = batch;
  cfg.train.ppo.minibatch = cfg.train.phase2.minibatch = minibatch;
  cfg.train.ppo.num_envs = cfg.train.phase2.num_envs = envs;
  cfg.train.agents.policy_hidden = {hidden, hidden};
  cfg.train.agents.critic_hidden = {hidden, hidden};
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const Key& k : registry()) out += k.name + "=" + k.get(*this) + "\n";
  return out;
}

uint64_t RunConfig::hash() const {
  const std::string s = canonical();
  return fnv1a(s.data(), s.size());
}

void RunConfig::validate() const {
  if (!(train.env.friction_range.lo < train.env.friction_range.hi)) {
    throw ConfigError("env.friction_min must be below env.friction_max");
  }
  double mix = 0.0;
  for (double m : train.env.terrain_mix) mix += m;
  if (!(mix > 0.0)) throw ConfigError("env.terrain_mix must have a positive entry");
  if (eval.friction_floor > eval.friction_start) throw ConfigError("eval.friction_floor must not exceed eval.friction_start");
  train.env.reward.validate();
  train.agents.validate();
  train.validate();
  eval.validate();
}

train::TrainConfig RunConfig::train_config(uint64_t s) const {
  train::TrainConfig t = train;
  t.seed = s;
  t.config_hash = hash();
  return t;
}

eval::EvalConfig RunConfig::eval_config(uint64_t s) const {
  eval::EvalConfig e = eval;
  e.seed = s;
  e.env = train.env;
  return e;
}

RunConfig parse_config_text(std::string_view text, std::span<const std::string> overrides) {
  std::vector<Entry> entries = read_entries(text);
  for (const std::string& o : overrides) entries.push_back(read_override(o));

  std::map<std::string, size_t> seen;
  for (size_t i = 0; i < entries.size(); ++i) {
    const std::string& key = entries[i].key;
    if (key != "seed" && find_key(key) == nullptr) throw ConfigError("unknown config key '" + key + "'");
    seen[key] = i;
  }
  RunConfig cfg;
  // The profile sets defaults that explicit keys then refine.
  if (auto it = seen.find("profile"); it != seen.end()) find_key("profile")->set(cfg, entries[it->second].values);
  if (auto it = seen.find("seed"); it != seen.end()) {
    const std::string s = single("seed", entries[it->second].values);
    uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) bad("seed", "'" + s + "' is not an unsigned 64-bit integer");
    cfg.seed = v;
  }
  for (size_t i = 0; i < entries.size(); ++i) {
    const Entry& e = entries[i];
    if (e.key == "profile" || e.key == "seed" || seen[e.key] != i) continue;
    find_key(e.key)->set(cfg, e.values);
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), overrides);
}

uint64_t resolve_seed(std::optional<uint64_t> explicit_seed, const RunConfig& cfg) {
  if (explicit_seed) return *explicit_seed;
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("ARMA_SEED"); env != nullptr && *env != '\0') {
    const std::string s = env;
    uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("ARMA_SEED='" + s + "' is not a seed");
    return v;
  }
  return 1;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out{"seed"};
  for (const Key& k : registry()) out.push_back(k.name);
  return out;
}

}  // namespace arma::io
