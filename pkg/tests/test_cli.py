import os

import pytest

import rmclass.cli as cli
from rmclass.classify import read_level_file
from rmclass.errors import InvalidInputError


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_classify_writes_levels_and_manifest(tmp_path, capsys):
    out = tmp_path / "run"
    assert run("classify", "--m", 4, "--s", 2, "--t", 4, "--out", out) == 0
    text = capsys.readouterr().out
    assert "classified B(2,4,4)" in text
    manifest = (out / "manifest.txt").read_text()
    assert "status=complete" in manifest
    assert "command=classify" in manifest
    records = read_level_file(out / "level_1.txt")
    assert len(records) == int(
        dict(line.split("=") for line in manifest.splitlines())["level_1_count"]
    )
    assert not (out / "checkpoint.txt").exists()


def test_classify_result_files_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("classify", "--m", 5, "--s", 2, "--t", 4, "--out", a) == 0
    assert run("classify", "--m", 5, "--s", 2, "--t", 4, "--out", b) == 0
    for r in (3, 2, 1):
        assert (a / f"level_{r}.txt").read_bytes() == (b / f"level_{r}.txt").read_bytes()


def test_classify_resume_after_interrupt(tmp_path, monkeypatch):
    fresh = tmp_path / "fresh"
    assert run("classify", "--m", 4, "--s", 1, "--t", 4, "--out", fresh) == 0

    # interrupt the run partway through the last level via the checkpoint hook
    broken = tmp_path / "broken"
    real_parent_done = cli._Checkpoint.parent_done
    calls = {"n": 0}

    def explode(self, idx, children):
        real_parent_done(self, idx, children)
        calls["n"] += 1
        if calls["n"] == 12:
            raise KeyboardInterrupt

    monkeypatch.setattr(cli._Checkpoint, "parent_done", explode)
    with pytest.raises(KeyboardInterrupt):
        run("classify", "--m", 4, "--s", 1, "--t", 4, "--out", broken)
    monkeypatch.setattr(cli._Checkpoint, "parent_done", real_parent_done)
    assert (broken / "checkpoint.txt").exists()

    assert run("classify", "--m", 4, "--s", 1, "--t", 4, "--out", broken, "--resume") == 0
    for r in (3, 2, 1, 0):
        assert (broken / f"level_{r}.txt").read_bytes() == (fresh / f"level_{r}.txt").read_bytes()


def test_classify_to_level_stops_early(tmp_path):
    out = tmp_path / "run"
    assert run("classify", "--m", 6, "--s", 2, "--t", 6, "--to-level", 4, "--out", out) == 0
    assert (out / "level_4.txt").exists()
    assert not (out / "level_1.txt").exists()
    assert len(read_level_file(out / "level_5.txt")) == 2


def test_classify_resume_rejects_mismatched_args(tmp_path):
    out = tmp_path / "run"
    assert run("classify", "--m", 4, "--s", 2, "--t", 4, "--out", out) == 0
    code = run("classify", "--m", 4, "--s", 1, "--t", 4, "--out", out, "--resume")
    assert code == InvalidInputError.exit_code


def test_classify_memory_refusal(tmp_path):
    from rmclass.errors import ResourceRefusedError

    code = run("classify", "--m", 7, "--s", 3, "--t", 4, "--out", tmp_path / "r",
               "--mem-limit", 64)
    assert code == ResourceRefusedError.exit_code


def test_count_both_methods(tmp_path, capsys):
    assert run("count", "--m", 3, "--s", 2, "--t", 3, "--method", "both",
               "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert "count 2 3 3 3 classify" in out
    assert "count 2 3 3 3 burnside" in out


def test_dual_check_m4(tmp_path, capsys):
    assert run("dual-check", "--m", 4, "--out", tmp_path) == 0
    assert "duality holds" in capsys.readouterr().out


def test_dual_check_explicit_cells(tmp_path, capsys):
    assert run("dual-check", "--m", 5, "--cells", "2,2;3,3", "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert "count 2 2 5 3 classify" in out


def test_nearbent_cli(tmp_path, capsys):
    assert run("nearbent", "--m", 3, "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert "nearbent-total 112" in out
    assert "nearbent-valuation2-count 7" in out


def test_nearbent_reps_from_file(tmp_path, capsys):
    out = tmp_path / "cls"
    assert run("classify", "--m", 5, "--s", 3, "--t", 3, "--out", out) == 0
    assert run("nearbent", "--m", 5, "--reps", out / "level_2.txt", "--out", tmp_path) == 0
    assert "nearbent-total 14054656" in capsys.readouterr().out


def test_distance_cli(tmp_path, capsys):
    assert run("distance", "--m", 5, "--r", 2, "--s", 3, "--t", 3,
               "--threshold", 6, "--seed", 11, "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert "CERTIFIED" in out
    assert "aggregate 3" in out


def test_distance_single_function(tmp_path, capsys):
    # x1x2 + x3x4 + x5 as ANF hex on m=5
    anf = (1 << 0b00011) ^ (1 << 0b01100) ^ (1 << 0b10000)
    assert run("distance", "--m", 5, "--r", 1, "--function", format(anf, "08x"),
               "--threshold", 12, "--seed", 3, "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert "hit" in out


def test_distance_inconclusive_exit_code(tmp_path):
    anf = (1 << 0b00011) ^ (1 << 0b01100) ^ (1 << 0b10000)
    code = run("distance", "--m", 5, "--r", 1, "--function", format(anf, "08x"),
               "--threshold", 2, "--max-iter", 8, "--seed", 3, "--out", tmp_path)
    assert code == 1


def test_stab_hist_cli(tmp_path, capsys):
    assert run("stab-hist", "--m", 4, "--s", 2, "--t", 4, "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert out.strip().splitlines()[-1].startswith("total ")


def test_seed_is_mandatory_for_distance(tmp_path, capsys):
    with pytest.raises(SystemExit):
        run("distance", "--m", 5, "--r", 1, "--threshold", 2, "--out", tmp_path)


def test_env_var_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("RMCLASS_OUT", str(tmp_path / "envout"))
    monkeypatch.chdir(tmp_path)
    assert run("classify", "--m", 3, "--s", 2, "--t", 2) == 0
    assert (tmp_path / "envout" / "manifest.txt").exists()
