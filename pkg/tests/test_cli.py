import pytest

from bbp_secrecy import cli


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_bounds_output_frozen(capsys):
    rc, out, _ = run(capsys, "bounds", "--K", "32", "--B", "8", "--L", "5")
    assert rc == 0
    assert out.splitlines() == [
        "K=32 B=8 L=5 schedule=[8, 8, 8, 4, 2]",
        "outer     = 0.95",
        "leakage   = 0.4780315873",
        "inner_raw = 0.4719684127",
        "inner     = 0.4719684127",
    ]


def test_bounds_clamps_negative_inner(capsys):
    rc, out, _ = run(capsys, "bounds", "--K", "32", "--B", "8", "--L", "1")
    assert rc == 0
    assert "inner_raw = -0.8112781245" in out
    assert "inner     = 0" in out


def test_missing_required_flag_exits_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["bounds", "--K", "8", "--L", "2"])
    assert exc.value.code == 1
    assert "required: --B" in capsys.readouterr().err


def test_invalid_value_returns_usage_code(capsys):
    rc, _, err = run(capsys, "bounds", "--K", "1", "--B", "1", "--L", "2")
    assert rc == 1
    assert "K must be an integer >= 2" in err


def test_sweep_writes_default_grid(tmp_path, capsys):
    out_csv = tmp_path / "grid.csv"
    rc, out, _ = run(capsys, "sweep", "--out", str(out_csv))
    assert rc == 0
    assert out.strip() == f"wrote 128 rows to {out_csv}"
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "K,L,B,outer,leakage,inner_raw,inner"
    assert len(lines) == 129
    assert lines[1].startswith("32,2,1,")
    # byte-stable across runs
    first = out_csv.read_bytes()
    assert cli.main(["sweep", "--out", str(out_csv)]) == 0
    capsys.readouterr()
    assert out_csv.read_bytes() == first


def test_sweep_custom_grid(tmp_path, capsys):
    out_csv = tmp_path / "g.csv"
    rc, out, _ = run(
        capsys, "sweep", "--K", "8", "--L", "3,2", "--B-start", "1",
        "--B-stop", "4", "--B-step", "1", "--out", str(out_csv),
    )
    assert rc == 0
    lines = out_csv.read_text().splitlines()
    assert len(lines) == 9
    assert [l.split(",")[:3] for l in lines[1:]] == [
        ["8", "2", "1"], ["8", "2", "2"], ["8", "2", "3"], ["8", "2", "4"],
        ["8", "3", "1"], ["8", "3", "2"], ["8", "3", "3"], ["8", "3", "4"],
    ]


def test_sweep_unwritable_path_is_io_error(capsys):
    rc, _, err = run(capsys, "sweep", "--out", "/nonexistent-dir/x.csv")
    assert rc == 2
    assert "error" in err.lower()


def test_simulate_output_frozen(capsys):
    rc, out, err = run(
        capsys, "simulate", "--K", "8", "--B", "2", "--L", "3",
        "--seed", "1", "--blocks", "2000",
    )
    assert rc == 0
    lines = out.splitlines()
    assert lines[0] == "K=8 B=2 L=3 blocks=2000 seed=1 schedule=[2, 2, 2]"
    assert lines[1] == (
        "main_rate estimate=0.8299169722 stderr=0.005488 closed=0.9166666667 z=-15.808"
    )
    assert lines[2].startswith("leakage   estimate=0.7329432798 ")
    assert lines[3] == "clamped_probes=0 cost_violations=0 unseen_table_prefixes=0"
    assert err == ""


def test_simulate_rejects_zero_blocks(capsys):
    rc, _, err = run(capsys, "simulate", "--K", "8", "--B", "2", "--L", "2", "--blocks", "0")
    assert rc == 1
    assert "blocks" in err


def test_simulate_warns_on_fractional_schedule(capsys):
    rc, _, err = run(
        capsys, "simulate", "--K", "2", "--B", "1", "--L", "2",
        "--seed", "1", "--blocks", "50",
    )
    assert rc == 0
    assert "fractional schedule [1, 0.5] is floored to [1, 0]" in err


def test_simulate_dump_transcripts(tmp_path, capsys):
    dump = tmp_path / "blocks.txt"
    rc, _, _ = run(
        capsys, "simulate", "--K", "8", "--B", "2", "--L", "2",
        "--seed", "4", "--blocks", "120", "--dump-transcripts", str(dump),
    )
    assert rc == 0
    lines = dump.read_text().splitlines()
    assert len(lines) == 120
    assert all(len(line.split()) == 5 for line in lines)


def test_verify_match_exits_zero(capsys):
    rc, out, _ = run(capsys, "verify", "--K", "8", "--B", "2", "--L", "2")
    assert rc == 0
    assert "overall: MATCH (12 of 12 quantities within 1e-12)" in out


def test_verify_mismatch_exits_three(capsys):
    rc, out, _ = run(capsys, "verify", "--K", "8", "--B", "2", "--L", "4")
    assert rc == 3
    assert "t3_matching_variant=state_summed" in out
    assert "overall: MISMATCH" in out


def test_verify_guard_rail_exits_usage(capsys):
    rc, _, err = run(capsys, "verify", "--K", "16", "--B", "4", "--L", "2")
    assert rc == 1
    assert err.startswith("bbp-secrecy: refused:")


def test_config_file_fills_missing_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nK = 8\nB=2\nL=3\n")
    rc, _, _ = run(capsys, "verify", "--config", str(cfg))
    assert rc == 3  # L=3 diverges

    # explicit flag wins over the file
    rc2, _, _ = run(capsys, "verify", "--config", str(cfg), "--L", "2")
    assert rc2 == 0


def test_config_file_missing_key_still_required(tmp_path, capsys):
    cfg = tmp_path / "partial.cfg"
    cfg.write_text("K=8\nL=2\n")
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--config", str(cfg)])
    assert exc.value.code == 1
    assert "required: --B" in capsys.readouterr().err


def test_config_file_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("K=8\nB=2\nL=2\nbogus=1\n")
    rc, _, err = run(capsys, "verify", "--config", str(cfg))
    assert rc == 1
    assert "unknown config key: bogus" in err


def test_worker_env_var_does_not_change_output(tmp_path, capsys, monkeypatch):
    args = ("simulate", "--K", "8", "--B", "2", "--L", "2", "--seed", "2", "--blocks", "400")
    rc, base, _ = run(capsys, *args)
    assert rc == 0
    monkeypatch.setenv("BBP_THREADS", "3")
    rc2, threaded, _ = run(capsys, *args)
    assert rc2 == 0
    assert threaded == base
