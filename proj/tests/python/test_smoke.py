# Copyright 2026 The arma-planar Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import json
import math

import numpy as np
import pytest

import arma_planar as ap

TINY = [
    "ppo.batch=128",
    "ppo.num_envs=4",
    "ppo.minibatch=64",
    "ppo.epochs=1",
    "train.phase1_iterations=2",
    "train.phase3_iterations=2",
    "train.robust_iterations=2",
    "train.checkpoint_every=1",
    "phase2.iterations=2",
    "phase2.batch=512",
    "phase2.num_envs=2",
    "phase2.minibatch=128",
    "agents.policy_hidden=16,16",
    "agents.critic_hidden=16,16",
    "agents.mu_hidden=16",
    "agents.phi_hidden=16",
    "agents.init_log_std=-4",
    "eval.seeds=1",
    "eval.episodes=1",
    "eval.timeout=1",
    "eval.feasibility_time=1",
    "eval.transient=0.2",
    "eval.friction_time=0.5",
]


def test_gae_matches_hand_values():
    adv, ret = ap.gae([1.0, 1.0, 1.0], [0.5, 0.5, 0.5], [0, 0, 1], 0.0, gamma=0.9, lam=0.95)
    delta = [1.0 + 0.45 - 0.5, 1.0 + 0.45 - 0.5, 0.5]
    expected = [delta[2]]
    for d in reversed(delta[:2]):
        expected.insert(0, d + 0.855 * expected[0])
    np.testing.assert_allclose(adv, expected, atol=1e-12)
    np.testing.assert_allclose(ret, np.asarray(expected) + 0.5, atol=1e-12)


def test_jerk_of_cubic():
    positions = [float(t**3) for t in range(10)]
    assert ap.mean_jerk(positions, 1, 1.0) == pytest.approx(6.0)
    with pytest.raises(ap.MetricError):
        ap.mean_jerk([0.0, 1.0, 2.0], 1, 1.0)


def test_config_errors_and_hash():
    assert "ppo.gamma" in ap.config_keys()
    with pytest.raises(ap.ConfigError):
        ap.Config(["ppo.gamma=1.5"])
    with pytest.raises(ap.ConfigError):
        ap.Config(["no.such_key=1"])
    assert ap.Config().hash() == ap.Config.from_text("").hash()
    assert ap.Config(["ppo.lr=1e-4"]).hash() != ap.Config().hash()
    assert ap.Config().resolve_seed(7) == 7


def test_gradcheck():
    worst = max(err for _, _, err in ap.gradcheck())
    assert worst < 1e-3


def test_pipeline_end_to_end(tmp_path):
    cfg = ap.Config(TINY)
    for phase in ["1", "2", "3", "robust"]:
        out = ap.train(phase, tmp_path, config=cfg, seed=3)
        assert out["records"]
    p2 = ap.train("2", tmp_path / "again", config=cfg, seed=3, from_dir=tmp_path)
    assert math.isfinite(p2["final_mse"])

    p3 = ap.load_checkpoint(tmp_path / "phase3.ckpt")
    assert p3["phase"] == "3"
    assert json.loads(p3["metadata"])
    phi2 = ap.load_checkpoint(tmp_path / "phase2.ckpt")["tensors"]
    for name, value in phi2.items():
        if name.startswith("phi."):
            np.testing.assert_array_equal(value, p3["tensors"][name])

    reports = ap.evaluate(tmp_path, config=cfg, seed=3, csv=tmp_path / "bench.csv")
    assert [r["mode"] for r in reports] == ["priv", "rma", "arma", "static", "robust"]
    for r in reports:
        assert 0.0 < r["mttf"] <= 1.0
        assert 0.0 <= r["feasible"] <= 1.0
    assert (tmp_path / "bench.csv").read_text().splitlines()[1].startswith("mode,")


def test_missing_checkpoint_raises(tmp_path):
    with pytest.raises(ap.CheckpointError):
        ap.train("3", tmp_path)
