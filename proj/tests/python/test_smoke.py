"""Smoke tests for the python bindings and the CLI surface."""

import json
import math
import os
import subprocess
import tempfile

import numpy as np
import pytest

import motiq


def test_motif_algebra_and_expressions():
    tree = motiq.qfree(8) + (motiq.qconv(1) + motiq.qpool(0, "right")) * 3
    parsed = motiq.parse('Qfree(8) + (Qconv(1) + Qpool(0, "right")) * 3')
    assert tree == parsed
    assert tree.level() == 4
    assert tree.flatten_size() == 7
    assert motiq.parse(motiq.to_expr(tree)) == tree

    round_trip = motiq.Motif.from_json(tree.to_json())
    assert round_trip == tree

    with pytest.raises(ValueError):
        motiq.parse("Qmagic(3)")


def test_graph_resolution():
    tree = motiq.reverse_binary_tree(8, 1, 0, "right")
    graphs = motiq.resolve_graphs(tree)
    assert len(graphs) == 7
    assert graphs[1]["edges"][0] == [1, 2]
    assert graphs[2]["measured"] == [5, 6, 7, 8]

    counts = motiq.unitary_counts(tree)
    assert counts["total"] == 22
    assert counts["convolution"] == 13

    assert motiq.expand_filter("inside", 8) == "00111100"
    dot = motiq.draw(tree)
    assert dot.startswith("digraph")
    assert motiq.enumerate_sweep_size(8) == 168


def test_compile_run_and_readout():
    registry = motiq.Registry.defaults()
    assert registry.param_count("u_ttn") == 2
    tree = motiq.reverse_binary_tree(8, 1, 0, "right")
    program = motiq.compile(tree, registry)
    assert program.param_count() == 6
    assert program.model_unitary_count() == 22
    assert program.readout == 1

    state = motiq.zero_state(8)
    out = motiq.run(program, np.zeros(6), state)
    assert abs(np.linalg.norm(out) - 1.0) < 1e-9
    p1 = motiq.readout_probability(out, program.readout)
    assert 0.0 <= p1 <= 1.0
    assert abs(motiq.expectation_z(out, program.readout) - (1 - 2 * p1)) < 1e-12

    qasm = program.to_qasm(np.zeros(6))
    assert qasm.startswith("OPENQASM 2.0;")

    amp = motiq.encode(np.array([1.0, 0.0, 0.0, 0.0]), "amplitude", 2)
    assert abs(amp[0] - 1.0) < 1e-12


def test_training_round_trip():
    registry = motiq.Registry.defaults()
    program = motiq.compile(motiq.qfree(1) + motiq.qconv(1), registry)
    x = np.concatenate([np.linspace(0.05, 0.3, 6), np.linspace(1.15, 1.4, 6)])
    features = x.reshape(-1, 1)
    labels = [0] * 6 + [1] * 6
    params, train_cost, _, _ = motiq.fit(
        program, features, labels, encoding="qubit", epochs=40,
        learning_rate=0.1, seed=1)
    accuracy, cost = motiq.evaluate(program, params, features, labels, "qubit")
    assert accuracy == 1.0
    assert train_cost[-1] <= train_cost[0] + 1e-12
    assert math.isfinite(cost)


def test_physics():
    energy, state = motiq.ground_state(5, 1.0, 0.0, 0.0)
    assert abs(energy - (-3.0)) < 1e-6
    assert abs(np.linalg.norm(state) - 1.0) < 1e-9

    assert motiq.sample_complexity(0.5) == 500.0
    expected = 1.96**2 / (math.pi / 2 - math.pi / 4) ** 2
    assert abs(motiq.sample_complexity(1.0) - expected) < 1e-9


def test_search_with_python_fitness():
    calls = []

    def fitness(motif_json, n_params):
        calls.append(motif_json)
        return float(n_params)

    best, best_fitness, evaluations = motiq.run_search(
        qubits=5, pool=8, generations=4, pressure=0.25, seed=7, fitness=fitness)
    assert evaluations >= 8
    assert best_fitness >= 0.0
    assert json.loads(best.to_json())
    assert len(calls) == evaluations


@pytest.fixture(scope="module")
def cli():
    path = os.environ.get("MOTIQ_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("MOTIQ_CLI not provided")
    return path


def test_cli_build_and_draw(cli):
    expr = 'Qfree(4) + (Qconv(1) + Qpool(0, "right")) * 2'
    out = subprocess.run(
        [cli, "build", "--expr", expr], capture_output=True, text=True)
    assert out.returncode == 0
    summary = json.loads(out.stdout)
    assert summary["unitaries"]["total"] == 10
    assert summary["parameters"] == 4

    dot = subprocess.run([cli, "draw", "--expr", expr], capture_output=True,
                         text=True)
    assert dot.returncode == 0
    assert dot.stdout.startswith("digraph")

    bad = subprocess.run([cli, "build", "--expr", "Qfree(4" ],
                         capture_output=True, text=True)
    assert bad.returncode == 2

    missing = subprocess.run([cli, "build"], capture_output=True, text=True)
    assert missing.returncode == 2


def test_cli_sweep_enumerate(cli):
    out = subprocess.run(
        [cli, "sweep", "--enumerate", "--qubits", "8"], capture_output=True,
        text=True)
    assert out.returncode == 0
    listing = json.loads(out.stdout)
    assert listing["count"] == 168


def test_cli_numeric_failure_exit_code(cli):
    with tempfile.TemporaryDirectory() as tmp:
        data = os.path.join(tmp, "toy.csv")
        with open(data, "w") as f:
            f.write("f1,label\n0.1,0\n0.2,0\n1.1,1\n1.2,1\n")
        out = subprocess.run(
            [cli, "train", "--expr", "Qfree(1) + Qconv(1)", "--data", data,
             "--epochs", "2", "--lr", "inf", "--optimizer", "gd"],
            capture_output=True, text=True)
        assert out.returncode == 3
        assert "numerical failure" in out.stderr


def test_cli_train(cli):
    with tempfile.TemporaryDirectory() as tmp:
        data = os.path.join(tmp, "toy.csv")
        with open(data, "w") as f:
            f.write("f1,label\n")
            for i in range(10):
                f.write(f"{0.05 + 0.02 * i},0\n")
            for i in range(10):
                f.write(f"{1.0 + 0.03 * i},1\n")
        out = subprocess.run(
            [cli, "train", "--expr", "Qfree(1) + Qconv(1)", "--data", data,
             "--epochs", "25", "--lr", "0.1", "--out", tmp],
            capture_output=True, text=True)
        assert out.returncode == 0, out.stderr
        with open(os.path.join(tmp, "trained.json")) as f:
            report = json.load(f)
        assert report["train_accuracy"] >= 0.9
        assert os.path.exists(os.path.join(tmp, "history.csv"))
        assert os.path.exists(os.path.join(tmp, "run_config.json"))


def test_cli_qpr_train_and_phase_diagram(cli):
    with tempfile.TemporaryDirectory() as tmp:
        out = subprocess.run(
            [cli, "qpr-train", "--sites", "4", "--points", "10",
             "--epochs", "4", "--lr", "0.1", "--out", tmp,
             "--cache", os.path.join(tmp, "cache")],
            capture_output=True, text=True)
        assert out.returncode == 0, out.stderr
        with open(os.path.join(tmp, "qpr_trained.json")) as f:
            report = json.load(f)
        assert 0.0 <= report["line_accuracy"] <= 1.0
        assert len(report["parameters"]) == 4  # two convolution layers

        phase = subprocess.run(
            [cli, "phase-diagram", "--sites", "4", "--h1-steps", "2",
             "--h2-steps", "2", "--out", tmp,
             "--cache", os.path.join(tmp, "cache")],
            capture_output=True, text=True)
        assert phase.returncode == 0, phase.stderr
        with open(os.path.join(tmp, "phase.csv")) as f:
            lines = f.read().strip().splitlines()
        assert lines[0] == "h1,h2,expectation,region"
        assert len(lines) == 5


def test_cli_qpr_search(cli):
    with tempfile.TemporaryDirectory() as tmp:
        out = subprocess.run(
            [cli, "qpr-search", "--sites", "4", "--pool", "6",
             "--generations", "2", "--pressure", "0.4", "--seed", "3",
             "--train-epochs", "2", "--weights", "0.7,0.05,0.25",
             "--lambda", "0.001", "--mcap", "500", "--out", tmp],
            capture_output=True, text=True)
        assert out.returncode == 0, out.stderr
        with open(os.path.join(tmp, "search_result.json")) as f:
            report = json.load(f)
        assert report["evaluations"] >= 6
        assert math.isfinite(report["best_fitness"])
        log = os.path.join(tmp, "search_log.jsonl")
        assert os.path.exists(log)
        with open(log) as f:
            events = [json.loads(line) for line in f if line.strip()]
        assert len(events) >= report["evaluations"]
