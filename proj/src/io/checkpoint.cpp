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

#include "arma/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "arma/errors.hpp"
#include "arma/hash.hpp"

namespace arma::io {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'A', 'R', 'M', 'A'};
constexpr uint8_t kLittleEndian = 1;

class Writer {
 public:
  void bytes(const void* p, size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u8(uint8_t v) { bytes(&v, 1); }
  void u32(uint32_t v) { bytes(&v, 4); }
  void u64(uint64_t v) { bytes(&v, 8); }
  void str(std::string_view s) {
    u32(static_cast<uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::string& out() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  void bytes(void* p, size_t n) {
    if (pos_ + n > in_.size()) throw CheckpointError("checkpoint truncated at byte " + std::to_string(pos_));
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  uint8_t u8() {
    uint8_t v;
    bytes(&v, 1);
    return v;
  }
  uint32_t u32() {
    uint32_t v;
    bytes(&v, 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    bytes(&v, 8);
    return v;
  }
  std::string str() {
    const uint32_t n = u32();
    if (pos_ + n > in_.size()) throw CheckpointError("checkpoint truncated in string");
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  size_t pos() const { return pos_; }

 private:
  std::string_view in_;
  size_t pos_ = 0;
};

std::string module_list(unsigned modules) {
  std::string s;
  auto add = [&](unsigned bit, const char* name) {
    if (modules & bit) s += s.empty() ? name : std::string(",") + name;
  };
  add(agents::kPolicy, "pi");
  add(agents::kEncoder, "mu");
  add(agents::kAdaptation, "phi");
  add(agents::kCritic, "critic");
  return s;
}

}  // namespace

const char* phase_tag_name(PhaseTag tag) {
  switch (tag) {
    case PhaseTag::kPhase1: return "1";
    case PhaseTag::kPhase2: return "2";
    case PhaseTag::kPhase3: return "3";
    case PhaseTag::kRobust: return "robust";
  }
  return "?";
}

PhaseTag parse_phase_tag(std::string_view s) {
  if (s == "1") return PhaseTag::kPhase1;
  if (s == "2") return PhaseTag::kPhase2;
  if (s == "3") return PhaseTag::kPhase3;
  if (s == "robust") return PhaseTag::kRobust;
  throw CheckpointError("unknown phase tag '" + std::string(s) + "'");
}

const nn::Tensor* Checkpoint::find(std::string_view name) const {
  for (const NamedTensor& t : tensors) {
    if (t.name == name) return &t.value;
  }
  return nullptr;
}

PhaseTag Checkpoint::phase() const {
  if (!metadata.contains("phase") || !metadata["phase"].is_string()) {
    throw CheckpointError("checkpoint metadata has no phase tag");
  }
  return parse_phase_tag(metadata["phase"].get<std::string>());
}

std::string serialize(const Checkpoint& ckpt) {
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.u8(kLittleEndian);
  w.str(ckpt.metadata.dump());
  w.u32(static_cast<uint32_t>(ckpt.tensors.size()));
  std::set<std::string_view> seen;
  for (const NamedTensor& t : ckpt.tensors) {
    if (!seen.insert(t.name).second) throw CheckpointError("duplicate tensor name '" + t.name + "'");
    w.str(t.name);
    w.u32(static_cast<uint32_t>(t.value.rank()));
    for (int d : t.value.shape()) w.u32(static_cast<uint32_t>(d));
    w.bytes(t.value.data(), t.value.size() * sizeof(float));
  }
  w.u64(fnv1a(w.out().data(), w.out().size()));
  return std::move(w.out());
}

Checkpoint deserialize(std::string_view bytes) {
  Reader r(bytes);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw CheckpointError("not a checkpoint (bad magic)");
  const uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  if (r.u8() != kLittleEndian) throw CheckpointError("checkpoint endianness marker mismatch");
  if (bytes.size() < 8) throw CheckpointError("checkpoint truncated");
  uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  if (stored != fnv1a(bytes.data(), bytes.size() - 8)) throw CheckpointError("checkpoint checksum mismatch");

  Checkpoint ckpt;
  try {
    ckpt.metadata = nlohmann::json::parse(r.str());
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint metadata is not valid JSON: ") + e.what());
  }
  const uint32_t count = r.u32();
  std::set<std::string> seen;
  for (uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = r.str();
    if (!seen.insert(t.name).second) throw CheckpointError("duplicate tensor name '" + t.name + "'");
    const uint32_t rank = r.u32();
    if (rank == 0 || rank > 8) throw CheckpointError("tensor '" + t.name + "' has invalid rank");
    std::vector<int> shape(rank);
    size_t n = 1;
    for (int& d : shape) {
      d = static_cast<int>(r.u32());
      n *= static_cast<size_t>(d);
    }
    if (n * sizeof(float) > bytes.size()) throw CheckpointError("tensor '" + t.name + "' larger than file");
    std::vector<float> data(n);
    r.bytes(data.data(), n * sizeof(float));
    t.value = nn::Tensor(std::move(shape), std::move(data));
    ckpt.tensors.push_back(std::move(t));
  }
  if (r.pos() + 8 != bytes.size()) throw CheckpointError("checkpoint has trailing bytes");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::string bytes = serialize(ckpt);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("missing checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize(ss.str());
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path, PhaseTag expected) {
  Checkpoint c = load_checkpoint(path);
  if (c.phase() != expected) {
    throw CheckpointError(path.string() + ": phase tag '" + phase_tag_name(c.phase()) + "' where '" +
                          phase_tag_name(expected) + "' was expected");
  }
  return c;
}

nlohmann::json agent_config_json(const agents::AgentConfig& cfg) {
  nlohmann::json conv = nlohmann::json::array();
  for (const auto& l : cfg.phi_conv) conv.push_back({l.kernel, l.stride, l.channels});
  return {{"obs_dim", cfg.obs_dim},
          {"env_dim", cfg.env_dim},
          {"latent_dim", cfg.latent_dim},
          {"action_dim", cfg.action_dim},
          {"policy_hidden", cfg.policy_hidden},
          {"mu_hidden", cfg.mu_hidden},
          {"critic_hidden", cfg.critic_hidden},
          {"phi_conv", conv},
          {"phi_hidden", cfg.phi_hidden},
          {"history", cfg.history},
          {"use_latent", cfg.use_latent},
          {"layout_version", agents::kObservationLayoutVersion}};
}

agents::AgentConfig agent_config_from_json(const nlohmann::json& j) {
  try {
    if (j.at("layout_version").get<int>() != agents::kObservationLayoutVersion) {
      throw CheckpointError("observation layout version mismatch");
    }
    agents::AgentConfig c;
    c.obs_dim = j.at("obs_dim").get<int>();
    c.env_dim = j.at("env_dim").get<int>();
    c.latent_dim = j.at("latent_dim").get<int>();
    c.action_dim = j.at("action_dim").get<int>();
    c.policy_hidden = j.at("policy_hidden").get<std::vector<int>>();
    c.mu_hidden = j.at("mu_hidden").get<std::vector<int>>();
    c.critic_hidden = j.at("critic_hidden").get<std::vector<int>>();
    c.phi_conv.clear();
    for (const auto& l : j.at("phi_conv")) c.phi_conv.push_back({l.at(0).get<int>(), l.at(1).get<int>(), l.at(2).get<int>()});
    c.phi_hidden = j.at("phi_hidden").get<std::vector<int>>();
    c.history = j.at("history").get<int>();
    c.use_latent = j.at("use_latent").get<bool>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint architecture metadata invalid: ") + e.what());
  }
}

Checkpoint make_checkpoint(const agents::AgentSet& agents, unsigned modules, PhaseTag tag, nlohmann::json extra) {
  Checkpoint c;
  c.metadata = std::move(extra);
  c.metadata["format"] = "arma-checkpoint";
  c.metadata["phase"] = phase_tag_name(tag);
  c.metadata["modules"] = module_list(modules);
  c.metadata["architecture"] = agent_config_json(agents.config());
  for (const nn::Parameter* p : agents.parameters(modules)) c.tensors.push_back({p->name, p->value});
  return c;
}

void restore(agents::AgentSet& agents, const Checkpoint& ckpt, unsigned modules) {
  if (ckpt.metadata.contains("architecture")) {
    const agents::AgentConfig stored = agent_config_from_json(ckpt.metadata["architecture"]);
    if (agent_config_json(stored) != agent_config_json(agents.config())) {
      throw CheckpointError("checkpoint architecture does not match the configured networks");
    }
  }
  for (nn::Parameter* p : agents.parameters(modules)) {
    const nn::Tensor* t = ckpt.find(p->name);
    if (t == nullptr) throw CheckpointError("checkpoint lacks tensor '" + p->name + "'");
    if (t->shape() != p->value.shape()) {
      throw CheckpointError("tensor '" + p->name + "' has shape " + nn::shape_string(t->shape()) + ", expected " +
                            nn::shape_string(p->value.shape()));
    }
    p->value = *t;
  }
}

agents::AgentSet agents_from_checkpoint(const Checkpoint& ckpt, unsigned modules) {
  if (!ckpt.metadata.contains("architecture")) throw CheckpointError("checkpoint has no architecture block");
  agents::AgentSet a(agent_config_from_json(ckpt.metadata["architecture"]));
  restore(a, ckpt, modules);
  return a;
}

void add_optimizer_state(Checkpoint& ckpt, const std::string& prefix, const nn::AdamState& state) {
  ckpt.metadata[prefix] = {{"lr", state.config.lr},
                           {"beta1", state.config.beta1},
                           {"beta2", state.config.beta2},
                           {"eps", state.config.eps},
                           {"step", state.step_count}};
  for (const nn::AdamSlot& s : state.slots) {
    ckpt.tensors.push_back({prefix + ".m." + s.name, s.first_moment});
    ckpt.tensors.push_back({prefix + ".v." + s.name, s.second_moment});
  }
}

nn::AdamState optimizer_state(const Checkpoint& ckpt, const std::string& prefix) {
  if (!ckpt.metadata.contains(prefix)) throw CheckpointError("checkpoint has no optimizer state '" + prefix + "'");
  const auto& j = ckpt.metadata[prefix];
  nn::AdamState s;
  s.config.lr = j.at("lr").get<double>();
  s.config.beta1 = j.at("beta1").get<double>();
  s.config.beta2 = j.at("beta2").get<double>();
  s.config.eps = j.at("eps").get<double>();
  s.step_count = j.at("step").get<int64_t>();
  const std::string m = prefix + ".m.";
  for (const NamedTensor& t : ckpt.tensors) {
    if (t.name.rfind(m, 0) != 0) continue;
    const std::string name = t.name.substr(m.size());
    const nn::Tensor* v = ckpt.find(prefix + ".v." + name);
    if (v == nullptr) throw CheckpointError("optimizer second moment missing for '" + name + "'");
    s.slots.push_back({name, t.value, *v});
  }
  return s;
}

}  // namespace arma::io
