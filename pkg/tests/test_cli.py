import json

import pytest
import yaml

from seqsense import cli


def write_cfg(tmp_path, cfg, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(cfg, sort_keys=False))
    return str(path)


def small_fisher_cfg(**task):
    return {
        "model": {"type": "heisenberg", "n_sites": 3, "unknowns": ["B1", "B2"], "true_values": [0.5, 0.5]},
        "protocol": {"n_seq": [1, 2]},
        "task": {"name": "fisher", **task},
        "seed": 3,
    }


def read_files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.name != "manifest.json"}


def test_list_recipes(capsys):
    assert cli.main(["list-recipes"]) == 0
    names = capsys.readouterr().out.split()
    assert names == sorted(["fig1", "fig2", "fig3", "fig4", "sm-fig2", "sm-fig3",
                            "opt-basis", "opt-timing", "qubit-checks"])


@pytest.mark.parametrize("name", cli.recipe_names())
def test_bundled_recipes_validate_and_round_trip(name):
    cfg = cli.resolve_config(name)
    again = cli.ExperimentConfig.from_dict(yaml.safe_load(cfg.to_yaml()))
    assert again.to_dict() == cfg.to_dict()
    assert again.digest() == cfg.digest()


def test_fisher_run_outputs(tmp_path):
    out = tmp_path / "out"
    assert cli.main(["run", write_cfg(tmp_path, small_fisher_cfg()), "--out", str(out)]) == 0
    lines = (out / "fisher.csv").read_text().splitlines()
    assert lines[0].startswith("# seqsense schema=1 seed=3 config_sha256=")
    assert lines[1].split(",")[:7] == ["k", "n_seq", "outcomes", "rank", "singular",
                                       "outcome_condition_met", "trace_inverse"]
    assert lines[2].split(",")[6] == "SINGULAR"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 3 and manifest["outputs"] == ["fisher.csv", "fisher.json"]
    assert {"numpy", "scipy", "python", "seqsense"} <= set(manifest["versions"])
    assert "wall_time_s" in manifest and manifest["config"]["task"]["name"] == "fisher"
    payload = json.loads((out / "fisher.json").read_text())
    assert payload["meta"]["config_sha256"] == manifest["config_sha256"]


def test_seed_override_changes_header(tmp_path):
    out = tmp_path / "o"
    cli.main(["run", write_cfg(tmp_path, small_fisher_cfg()), "--out", str(out), "--seed", "42"])
    assert "seed=42" in (out / "fisher.csv").read_text().splitlines()[0]


def test_singular_without_fallback_exit_code(tmp_path):
    cfg = small_fisher_cfg(on_singular="error")
    assert cli.main(["run", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")]) == cli.EXIT_SINGULAR


def test_empty_task_is_config_error(tmp_path):
    cfg = small_fisher_cfg()
    cfg["task"] = {}
    assert cli.main(["run", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")]) == cli.EXIT_CONFIG


@pytest.mark.parametrize("mutate", [
    lambda c: c["task"].update(name="nonsense"),
    lambda c: c["model"].update(type="ising"),
    lambda c: c["model"].update(unknowns=["B1", "B7"]),
    lambda c: c["model"].update(n_sites=1),
    lambda c: c["model"].update(true_values=[0.5]),
    lambda c: c["protocol"].update(n_seq=0),
    lambda c: c.update(seed=-1),
    lambda c: c.update(extra={}),
])
def test_invalid_configs(tmp_path, mutate):
    cfg = small_fisher_cfg()
    mutate(cfg)
    assert cli.main(["run", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")]) == cli.EXIT_CONFIG


def test_missing_config_is_config_error(tmp_path):
    assert cli.main(["run", str(tmp_path / "nope.yaml")]) == cli.EXIT_CONFIG


def test_posterior_requires_grid(tmp_path):
    cfg = small_fisher_cfg()
    cfg["task"] = {"name": "posterior"}
    assert cli.main(["run", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")]) == cli.EXIT_CONFIG


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = cli.main(["run", write_cfg(tmp_path, small_fisher_cfg()), "--out", str(blocker / "sub")])
    assert code == cli.EXIT_IO


def test_budget_error_exit_code(tmp_path):
    cfg = {
        "model": {"type": "heisenberg", "n_sites": 3, "unknowns": ["B1", "B2"], "true_values": [0.5, 0.5]},
        "protocol": {"n_seq": 2},
        "task": {"name": "optimize-basis", "methods": ["grid"], "samples_per_angle": 3},
    }
    path = write_cfg(tmp_path, cfg)
    assert cli.main(["run", path, "--out", str(tmp_path / "a"), "--budget", "10"]) == cli.EXIT_BUDGET
    assert cli.main(["run", path, "--out", str(tmp_path / "b"), "--budget", "100"]) == cli.EXIT_OK


def test_posterior_and_covariance_determinism_across_threads(tmp_path):
    base = {
        "model": {"type": "heisenberg", "n_sites": 3, "unknowns": ["B1", "B2"], "true_values": [0.2, 0.6]},
        "protocol": {"n_seq": [1, 2]},
        "grid": {"axes": [[0.0, 1.0, 6], [0.0, 1.0, 6]]},
        "seed": 11,
    }
    for task in ({"name": "posterior", "m_values": [50, 500]},
                 {"name": "covariance", "m_values": [10, 100], "mu": 5}):
        path = write_cfg(tmp_path, {**base, "task": task}, f"{task['name']}.yaml")
        a, b = tmp_path / f"{task['name']}1", tmp_path / f"{task['name']}4"
        assert cli.main(["run", path, "--out", str(a), "--threads", "1"]) == 0
        assert cli.main(["run", path, "--out", str(b), "--threads", "4"]) == 0
        assert read_files(a) == read_files(b)


def test_verify_passes_and_is_deterministic(tmp_path, capsys):
    assert cli.main(["verify", "--out", str(tmp_path / "a")]) == 0
    first = capsys.readouterr().out
    assert cli.main(["verify", "--out", str(tmp_path / "b")]) == 0
    assert capsys.readouterr().out == first
    assert first.count("PASS") == 8 and "FAIL" not in first
    assert (tmp_path / "a" / "verify.json").read_bytes() == (tmp_path / "b" / "verify.json").read_bytes()


@pytest.mark.parametrize("rtol", ["-1", "0.9"])
def test_verify_negative_control(capsys, rtol):
    assert cli.main(["verify", "--rank-rtol", rtol]) == cli.EXIT_CHECK_FAILED
    assert "FAIL" in capsys.readouterr().out


def test_jc_sweep_freezes_remaining_parameters():
    section = {"type": "jaynes_cummings", "unknowns": ["omega1", "omega2", "J1", "J2"],
               "true_values": [0.8, 0.9, 0.2, 0.3]}
    m = cli.build_model(section, 2)
    assert m.labels == ("omega1", "omega2")
    assert m.constants["J1_fixed"] == 0.2 and m.constants["J2_fixed"] == 0.3
