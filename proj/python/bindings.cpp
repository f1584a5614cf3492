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

// Python bindings for configuration, training phases, evaluation and the
// numerical building blocks.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "arma/agents/gradcheck_suite.hpp"
#include "arma/errors.hpp"
#include "arma/eval/eval.hpp"
#include "arma/io/checkpoint.hpp"
#include "arma/io/config.hpp"
#include "arma/train/phases.hpp"
#include "arma/train/ppo.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace arma;

namespace {

using Strings = std::vector<std::string>;

io::RunConfig make_config(const std::optional<fs::path>& path, const Strings& overrides) {
  return path ? io::parse_config(*path, overrides) : io::parse_config_text("", overrides);
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::dict record_dict(const train::IterationRecord& r) {
  py::dict d;
  d["iter"] = r.iter;
  d["return_mean"] = r.return_mean;
  d["pg_loss"] = r.pg_loss;
  d["v_loss"] = r.v_loss;
  d["mse"] = r.mse;
  d["imit_mult"] = r.imit_mult;
  d["seconds"] = r.seconds;
  return d;
}

py::dict train_phase(const std::string& phase, const fs::path& out, const io::RunConfig& rc,
                     std::optional<uint64_t> seed, int workers, std::optional<fs::path> from, bool resume) {
  train::TrainConfig cfg = rc.train_config(io::resolve_seed(seed, rc));
  cfg.workers = workers;
  cfg.log_every = 0;
  const fs::path inputs = from.value_or(out);
  train::PhaseOutput result;
  {
    py::gil_scoped_release release;
    if (phase == "1") {
      result = train::train_phase1(cfg, out, resume);
    } else if (phase == "2") {
      if (resume) throw ConfigError("phase 2 has no resumable state; rerun it from the phase-1 checkpoint");
      result = train::train_phase2(cfg, io::load_checkpoint(inputs / "phase1.ckpt", io::PhaseTag::kPhase1), out);
    } else if (phase == "3") {
      result = train::train_phase3(cfg, io::load_checkpoint(inputs / "phase1.ckpt", io::PhaseTag::kPhase1),
                                   io::load_checkpoint(inputs / "phase2.ckpt", io::PhaseTag::kPhase2), out, resume);
    } else if (phase == "robust") {
      result = train::train_robust(cfg, out, resume);
    } else {
      throw ConfigError("unknown phase '" + phase + "'; expected 1, 2, 3 or robust");
    }
  }
  py::list records;
  for (const auto& r : result.records) records.append(record_dict(r));
  py::dict d;
  d["records"] = records;
  d["initial_mse"] = result.initial_mse;
  d["final_mse"] = result.final_mse;
  return d;
}

py::dict report_dict(const eval::MetricReport& r) {
  py::dict d;
  d["mode"] = eval::mode_name(r.mode);
  d["mttf"] = r.mttf;
  d["return"] = r.mean_return;
  d["jerk"] = r.jerk;
  d["track_x"] = r.tracking.error_x;
  d["track_z"] = r.tracking.error_z;
  d["track_pooled"] = r.tracking.error_pooled;
  d["feasible"] = r.tracking.feasible_fraction;
  d["min_friction"] = r.min_friction ? py::cast(*r.min_friction) : py::none();
  py::list seeds;
  for (const auto& s : r.per_seed) {
    py::dict m;
    m["seed"] = s.seed;
    m["mttf"] = s.mttf;
    m["return"] = s.mean_return;
    m["jerk"] = s.jerk;
    seeds.append(m);
  }
  d["per_seed"] = seeds;
  return d;
}

py::dict checkpoint_dict(const io::Checkpoint& ck) {
  py::dict tensors;
  for (const auto& t : ck.tensors) {
    std::vector<py::ssize_t> shape(t.value.shape().begin(), t.value.shape().end());
    py::array_t<float> a(shape);
    std::copy(t.value.data(), t.value.data() + t.value.size(), a.mutable_data());
    tensors[py::str(t.name)] = a;
  }
  py::dict d;
  d["phase"] = io::phase_tag_name(ck.phase());
  d["metadata"] = ck.metadata.dump();
  d["tensors"] = tensors;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Planar biped adaptation pipeline";

  auto base = py::register_exception<Error>(m, "ArmaError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<CheckpointError>(m, "CheckpointError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<MetricError>(m, "MetricError", base.ptr());

  py::class_<io::RunConfig>(m, "Config")
      .def(py::init([](const Strings& overrides) { return io::parse_config_text("", overrides); }),
           py::arg("overrides") = Strings{})
      .def_static("from_text", [](const std::string& text, const Strings& o) { return io::parse_config_text(text, o); },
                  py::arg("text"), py::arg("overrides") = Strings{})
      .def_static("from_file", [](const fs::path& p, const Strings& o) { return io::parse_config(p, o); },
                  py::arg("path"), py::arg("overrides") = Strings{})
      .def("canonical", &io::RunConfig::canonical)
      .def("hash", &io::RunConfig::hash)
      .def("resolve_seed", [](const io::RunConfig& c, std::optional<uint64_t> s) { return io::resolve_seed(s, c); },
           py::arg("seed") = py::none());
  m.def("config_keys", &io::config_keys);

  m.def(
      "train",
      [](const std::string& phase, const fs::path& out, std::optional<io::RunConfig> config,
         std::optional<uint64_t> seed, int workers, std::optional<fs::path> from_dir, bool resume) {
        return train_phase(phase, out, config ? *config : make_config(std::nullopt, {}), seed, workers, from_dir,
                           resume);
      },
      py::arg("phase"), py::arg("out_dir"), py::arg("config") = py::none(), py::arg("seed") = py::none(),
      py::arg("workers") = 1, py::arg("from_dir") = py::none(), py::arg("resume") = false);

  m.def(
      "evaluate",
      [](const fs::path& ckpt_dir, const std::string& modes, std::optional<io::RunConfig> config,
         std::optional<uint64_t> seed, int workers, std::optional<fs::path> csv, bool thorough) {
        const io::RunConfig rc = config ? *config : make_config(std::nullopt, {});
        const uint64_t s = io::resolve_seed(seed, rc);
        eval::EvalConfig cfg = rc.eval_config(s);
        cfg.workers = workers;
        if (thorough) cfg.make_thorough();
        const std::vector<eval::EvalMode> list = eval::parse_modes(modes);
        std::vector<eval::MetricReport> reports;
        {
          py::gil_scoped_release release;
          reports = eval::compare(list, ckpt_dir, cfg);
        }
        if (csv) eval::write_bench_csv(*csv, reports, rc.hash(), s);
        py::list out;
        for (const auto& r : reports) out.append(report_dict(r));
        return out;
      },
      py::arg("ckpt_dir"), py::arg("modes") = "priv,rma,arma,static,robust", py::arg("config") = py::none(),
      py::arg("seed") = py::none(), py::arg("workers") = 1, py::arg("csv") = py::none(), py::arg("thorough") = false);

  m.def("load_checkpoint", [](const fs::path& p) { return checkpoint_dict(io::load_checkpoint(p)); }, py::arg("path"));

  m.def("gradcheck", [] {
    py::list out;
    for (const auto& e : agents::gradcheck_suite(agents::AgentConfig{})) out.append(py::make_tuple(e.network, e.seed, e.max_rel_error));
    return out;
  });

  m.def(
      "gae",
      [](const std::vector<double>& rewards, const std::vector<double>& values, const std::vector<uint8_t>& dones,
         double last_value, double gamma, double lam) {
        const train::GaeResult r = train::gae(rewards, values, dones, last_value, gamma, lam);
        return py::make_tuple(to_array(r.advantages), to_array(r.returns));
      },
      py::arg("rewards"), py::arg("values"), py::arg("dones"), py::arg("last_value"), py::arg("gamma") = 0.99,
      py::arg("lam") = 0.95);

  m.def(
      "mean_jerk",
      [](const std::vector<double>& positions, int joints, double dt) {
        return eval::mean_jerk(positions, joints, dt);
      },
      py::arg("positions"), py::arg("joints"), py::arg("dt"));
}
