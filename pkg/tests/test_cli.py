import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from agency_metrics import __version__, make_gridworld, make_random_mdp
from agency_metrics.cli import COMMANDS, DEFAULTS, main
from agency_metrics.mdp import make_random_reward, reward_to_dict


def write(path, document):
    path.write_text(json.dumps(document))
    return str(path)


@pytest.fixture
def files(tmp_path):
    mdp = make_random_mdp(5, 4, 2, 0.25)
    reward = make_random_reward(6, mdp)
    other = make_random_reward(7, mdp)
    grid = make_gridworld(2, 2, 0.1)
    return {
        "mdp": write(tmp_path / "mdp.json", mdp.to_dict()),
        "reward": write(tmp_path / "reward.json", reward_to_dict(reward)),
        "other": write(tmp_path / "other.json", reward_to_dict(other)),
        "grid": write(tmp_path / "grid.json", grid.to_dict()),
        "grid_reward": write(tmp_path / "grid_reward.json",
                             reward_to_dict(make_random_reward(8, grid))),
        "belief": write(tmp_path / "belief.json", {"predicted": grid.transition.tolist()}),
        "p": write(tmp_path / "p.json", {"probs": [0.5, 0.5]}),
        "q": write(tmp_path / "q.json", {"probs": [0.9, 0.1]}),
        "channel": write(tmp_path / "channel.json", {"rows": np.eye(4).tolist()}),
        "cube": write(tmp_path / "cube.json", {"n": 3, "bound_m": 1.0,
                                               "f_ideal": [0.5, 0.5, 0.5], "epsilon": 0.1}),
        "basis": write(tmp_path / "basis.json", {"c0": [1, 0, 0, 1], "e0": [0, 1, 0, 1],
                                                 "a0": [0, 0, 1, 1], "f": [2, 0, -1, 1]}),
        "dir": tmp_path,
    }


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def report(argv, capsys):
    code, out, err = run(argv + ["--no-timestamp"], capsys)
    assert code == 0, err
    return json.loads(out)


def command_argvs(files):
    """One successful invocation per command."""
    return {
        "curiosity": ["curiosity", "--set", f"inputs.p={files['p']}", "--set", f"inputs.q={files['q']}"],
        "empowerment": ["empowerment", "--set", "env.width=3", "--set", "empowerment.state=4",
                        "--set", "empowerment.all_states=true"],
        "agency-reward": ["agency-reward", "--set", f"inputs.mdp={files['grid']}",
                          "--set", f"inputs.belief={files['belief']}"],
        "starc-distance": ["starc-distance", "--set", f"inputs.mdp={files['mdp']}",
                           "--set", f"inputs.reward_f={files['reward']}",
                           "--set", f"inputs.reward_a={files['other']}"],
        "agency-metric": ["agency-metric", "--set", f"inputs.mdp={files['grid']}",
                          "--set", f"inputs.reward_f={files['grid_reward']}"],
        "measure": ["measure", "--set", f"inputs.cube={files['cube']}", "--set", "measure.samples=20000",
                    "--set", f"inputs.basis={files['basis']}"],
        "convergence": ["convergence"],
        "rates": ["rates"],
    }


def test_convergence_headline(capsys):
    doc = report(["convergence", "--set", "convergence.depth_l=20",
                  "--set", "convergence.params_n=1e10"], capsys)
    assert doc["results"]["log10_epsilon"] == -360
    assert doc["results"]["theta_constants_assumed"] is True
    assert doc["version"] == __version__
    assert doc["seed"] == 0


def test_report_contains_resolved_defaults(capsys):
    doc = report(["rates", "--seed", "17"], capsys)
    assert set(doc["config"]) == set(DEFAULTS)
    assert doc["seed"] == 17
    assert doc["results"]["speedup"] == pytest.approx(1e6 / (10 * math.log(1e6)))


def test_identical_rewards_distance_zero(files, capsys):
    doc = report(["starc-distance", "--set", f"inputs.mdp={files['mdp']}",
                  "--set", f"inputs.reward_f={files['reward']}",
                  "--set", f"inputs.reward_a={files['reward']}"], capsys)
    assert doc["results"]["distance"] == 0.0
    assert doc["results"]["metric_kind"] == "pseudometric"


def test_curiosity_inline(capsys):
    doc = report(["curiosity", "--set", "curiosity.p=[1,0,0,0]",
                  "--set", "curiosity.q=[0.25,0.25,0.25,0.25]"], capsys)
    assert doc["results"]["kl"] == pytest.approx(math.log(4))


def test_empowerment_channel_file(files, capsys):
    doc = report(["empowerment", "--set", f"inputs.channel={files['channel']}"], capsys)
    assert doc["results"]["capacity_bits"] == pytest.approx(2.0)
    assert set(doc["results"]) >= {"capacity_bits", "capacity_nats", "input_dist",
                                   "iterations", "achieved_tol"}


def test_measure_report(files, capsys):
    doc = report(command_argvs(files)["measure"], capsys)
    res = doc["results"]
    assert 10 ** res["log10_probability"] == pytest.approx(0.008)
    assert res["monte_carlo"]["underpowered"] is False
    assert res["projection"]["effective_rank"] == 3
    assert res["projection"]["residual_norm"] <= 1e-9


@pytest.mark.parametrize("command", COMMANDS)
def test_every_command_is_deterministic(command, files, capsys, tmp_path):
    argv = command_argvs(files)[command]
    outputs = []
    for i in range(2):
        target = tmp_path / f"{command}-{i}.json"
        code, _, err = run(argv + ["--seed", "123", "--no-timestamp", "--output", str(target)], capsys)
        assert code == 0, err
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]


def test_timestamp_present_by_default(capsys):
    code, out, _ = run(["rates"], capsys)
    assert code == 0 and "timestamp" in json.loads(out)


def test_report_reruns_from_itself(files, capsys, tmp_path):
    first = tmp_path / "first.json"
    second = tmp_path / "second.json"
    argv = command_argvs(files)["measure"]
    assert main(argv + ["--seed", "9", "--no-timestamp", "--output", str(first)]) == 0
    assert main(["--config", str(first), "--no-timestamp", "--output", str(second)]) == 0
    capsys.readouterr()
    assert first.read_bytes() == second.read_bytes()


def test_inputs_not_mutated(files, capsys):
    before = open(files["reward"], "rb").read()
    report(command_argvs(files)["starc-distance"], capsys)
    assert open(files["reward"], "rb").read() == before


class TestErrors:
    def error(self, argv, capsys):
        code, _, err = run(argv, capsys)
        return code, json.loads(err)

    def test_file_not_found(self, capsys, tmp_path):
        code, err = self.error(["starc-distance", "--set", f"inputs.mdp={tmp_path / 'nope.json'}"], capsys)
        assert code == 3 and err["error"] == "file_not_found"

    def test_parse_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, err = self.error(["measure", "--set", f"inputs.cube={bad}"], capsys)
        assert code == 4 and err["error"] == "parse_error"

    def test_unknown_key(self, capsys):
        code, err = self.error(["rates", "--set", "rates.bogus=1"], capsys)
        assert code == 5

    def test_dimension_error(self, files, capsys):
        code, _ = self.error(["starc-distance", "--set", f"inputs.mdp={files['grid']}",
                              "--set", f"inputs.reward_f={files['reward']}",
                              "--set", f"inputs.reward_a={files['reward']}"], capsys)
        assert code == 6

    def test_singularity(self, capsys):
        code, err = self.error(["curiosity", "--set", "curiosity.p=[0.5,0.5]",
                                "--set", "curiosity.q=[1,0]"], capsys)
        assert code == 7 and err["error"] == "singularity_error"

    def test_domain(self, capsys):
        code, _ = self.error(["convergence", "--set", "convergence.depth_l=2"], capsys)
        assert code == 8

    def test_resource(self, capsys):
        code, err = self.error(["empowerment", "--set", "empowerment.horizon=7"], capsys)
        assert code == 9 and err["error"] == "resource_error"

    def test_iteration_limit(self, files, tmp_path, capsys):
        z = write(tmp_path / "z.json", {"rows": [[1.0, 0.0], [0.5, 0.5]]})
        code, err = self.error(["empowerment", "--set", f"inputs.channel={z}",
                                "--set", "empowerment.max_iter=2",
                                "--set", "empowerment.tol=1e-15"], capsys)
        assert code == 10 and err["gap"] > 0

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["no-such-command"])
        assert info.value.code == 2

    def test_codes_are_documented(self, capsys):
        with pytest.raises(SystemExit):
            main(["--help"])
        out = capsys.readouterr().out
        for code in range(11):
            assert f"\n  {code} " in out


class TestSweeps:
    def rows(self, argv, capsys):
        code, out, err = run(argv + ["--format", "csv"], capsys)
        assert code == 0, err
        return list(csv.DictReader(io.StringIO(out)))

    def test_epsilon_sweep_decreasing(self, capsys):
        rows = self.rows(["measure", "--sweep", "measure.epsilon=0.1,0.01,0.001"], capsys)
        values = [float(r["log10_probability"]) for r in rows]
        assert values[0] > values[1] > values[2]

    def test_dimension_sweep_is_linear(self, capsys):
        rows = self.rows(["measure", "--set", "measure.epsilon=0.05", "--set", "measure.bound_m=2",
                          "--sweep", "measure.n=" + ",".join(str(n) for n in range(1, 11))], capsys)
        n = np.array([float(r["measure.n"]) for r in rows])
        y = np.array([float(r["log10_probability"]) for r in rows])
        slope, intercept = np.polyfit(n, y, 1)
        fitted = slope * n + intercept
        r2 = 1 - np.sum((y - fitted) ** 2) / np.sum((y - y.mean()) ** 2)
        assert slope == pytest.approx(math.log10(2 * 0.05 / 2), rel=1e-10)
        assert r2 == pytest.approx(1.0, abs=1e-12)

    def test_horizon_sweep_non_decreasing(self, capsys):
        rows = self.rows(["empowerment", "--set", "empowerment.state=4",
                          "--sweep", "empowerment.horizon=1,2,3"], capsys)
        caps = [float(r["capacity_bits"]) for r in rows]
        assert caps == sorted(caps)
        assert caps[0] == pytest.approx(2.0, abs=1e-9)

    def test_twelve_significant_digits(self, capsys):
        rows = self.rows(["rates", "--sweep", "rates.sparsity_s=3"], capsys)
        assert rows[0]["speedup"] == f"{1e6 / (3 * math.log(1e6)):.12g}"

    def test_unknown_sweep_parameter(self, capsys):
        code, _, _ = run(["rates", "--sweep", "measure.n=1,2", "--format", "csv"], capsys)
        assert code == 5

    def test_json_sweep(self, capsys):
        code, out, _ = run(["rates", "--sweep", "rates.dim_d=10,100", "--no-timestamp"], capsys)
        doc = json.loads(out)
        assert code == 0 and len(doc["sweep"]["rows"]) == 2


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "agency_metrics", "convergence", "--no-timestamp"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["results"]["log10_epsilon"] == -360.0
