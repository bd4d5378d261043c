"""CLI: subcommands, exit codes, reproducibility of artifacts."""

import json
import math

import numpy as np
import pytest

from nullcover.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestBiasSet:
    def test_example_pipeline(self, capsys, tmp_path):
        out = tmp_path / "cert.json"
        code, _, _ = run(capsys, "bias-set", "--eta", "1/3", "--m0", "10", "--d", "1", "--out", str(out))
        assert code == 0
        cert = json.loads(out.read_text())
        assert cert["params"]["k"] == 3
        assert cert["params"]["s"] == 2
        assert cert["params"]["m"] == 16
        assert cert["bias"] < 0.25
        assert cert["size_ok"] and cert["bias_ok"]

    def test_sweep_csv(self, capsys):
        code, outtext, _ = run(capsys, "bias-set", "--eta", "1/3", "--m0", "1", "4", "16",
                               "--format", "csv")
        assert code == 0
        lines = outtext.strip().splitlines()
        assert len(lines) == 4  # header + 3 rows
        assert "bias" in lines[0]

    def test_bad_rational(self, capsys):
        code, _, _ = run(capsys, "bias-set", "--eta", "nope", "--m0", "1")
        assert code == 2

    def test_cap_exceeded(self, capsys):
        code, _, err = run(capsys, "bias-set", "--eta", "1/16", "--m0", "1", "--d", "2")
        assert code == 1


class TestCover:
    def _family_file(self, tmp_path, size=20, N=64, seed=0):
        rng = np.random.default_rng(seed)
        member = rng.choice(N, size=size, replace=False).reshape(-1, 1).tolist()
        fam = {"d": 1, "kind": "grid", "N": N, "members": [member]}
        path = tmp_path / "fam.json"
        path.write_text(json.dumps(fam))
        return path

    def test_cover_success(self, capsys, tmp_path):
        fam = self._family_file(tmp_path)
        out = tmp_path / "cover.json"
        code, _, _ = run(capsys, "cover", "--family", str(fam), "--eps", "1/2",
                         "--seed", "7", "--out", str(out))
        assert code == 0
        data = json.loads(out.read_text())
        assert data["certificate"]["b_size"] == 32

    def test_undersized_member_exit_1(self, capsys, tmp_path):
        fam = self._family_file(tmp_path, size=10)
        code, _, err = run(capsys, "cover", "--family", str(fam), "--eps", "1/2", "--seed", "7")
        assert code == 1
        assert f"{4 * math.log(64):.3f}"[:5] in err  # threshold 16.63x named

    def test_seed_required(self, capsys, tmp_path):
        fam = self._family_file(tmp_path)
        code, _, _ = run(capsys, "cover", "--family", str(fam), "--eps", "1/2")
        assert code == 2

    def test_byte_identical_artifacts(self, capsys, tmp_path):
        fam = self._family_file(tmp_path)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "cover", "--family", str(fam), "--eps", "1/2", "--seed", "7", "--out", str(a))
        run(capsys, "cover", "--family", str(fam), "--eps", "1/2", "--seed", "7", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_missing_file(self, capsys):
        code, _, _ = run(capsys, "cover", "--family", "/nonexistent.json", "--eps", "1/2", "--seed", "1")
        assert code == 2


class TestDimension:
    def test_middle_thirds_infinite(self, capsys):
        code, outtext, _ = run(capsys, "dimension", "--base", "3", "--digits", "0,2", "--depth", "6")
        assert code == 0
        assert json.loads(outtext)["infinite"] is True

    def test_from_file(self, capsys, tmp_path):
        from nullcover.fractal import generate_cantor

        sched = [(2**k, 2**k) for k in range(1, 5)]
        cube = generate_cantor({"kind": "sparse", "schedule": sched, "d": 1}, depth=4)
        path = tmp_path / "set.json"
        path.write_text(json.dumps(cube.to_json_dict()))
        code, outtext, _ = run(capsys, "dimension", "--set", str(path))
        assert code == 0
        est = json.loads(outtext)
        assert abs(est["value"] - 1.0) < 0.1


class TestTraces:
    def test_rrp_and_verify_roundtrip(self, capsys, tmp_path):
        trace = tmp_path / "trace.json"
        code, _, _ = run(capsys, "rrp", "--depth", "2", "--out", str(trace))
        assert code == 0
        code, outtext, _ = run(capsys, "verify", str(trace))
        assert code == 0
        # tamper: flip one interval corner
        data = json.loads(trace.read_text())
        data["steps"][1]["k_intervals"][0][0] = "-7/8"
        trace.write_text(json.dumps(data))
        code, _, _ = run(capsys, "verify", str(trace))
        assert code == 1

    def test_full_measure_and_verify(self, capsys, tmp_path):
        trace = tmp_path / "fm.json"
        code, _, _ = run(capsys, "full-measure", "--eps", "1/2", "--depth", "2", "--out", str(trace))
        assert code == 0
        code, outtext, _ = run(capsys, "verify", str(trace))
        assert code == 0
        data = json.loads(trace.read_text())
        data["steps"][2]["measure"] = "1/3"
        trace.write_text(json.dumps(data))
        code, _, _ = run(capsys, "verify", str(trace))
        assert code == 1

    def test_unknown_kind(self, capsys, tmp_path):
        path = tmp_path / "x.json"
        path.write_text(json.dumps({"kind": "mystery"}))
        code, _, _ = run(capsys, "verify", str(path))
        assert code == 2
