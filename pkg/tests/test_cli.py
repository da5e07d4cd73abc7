import csv

import pytest

from trustrec.cli import RunConfig, cmd_ingest, main, parse_config

FAST = "factors = 3\nepochs = 15\nfolds = 2\nk = 5\n"


def _cfg(tmp_path, hotel50, extra=""):
    path = tmp_path / "run.cfg"
    path.write_text(f"data = {hotel50}\n{FAST}{extra}")
    return path


def _report(out):
    with open(out / "report.csv", newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_config():
    cfg = parse_config("# comment\nalpha = 0, 0.5 # grid\nbeta=1\nmin-ratings = 25\ntags = Hotels, Hostels\n")
    assert cfg.alpha == (0.0, 0.5) and cfg.beta == (1.0,)
    assert cfg.min_ratings == 25 and cfg.tags == ("Hotels", "Hostels")
    assert cfg.k == RunConfig().k
    with pytest.raises(ValueError, match="line 1: unknown key"):
        parse_config("bogus = 1")
    with pytest.raises(ValueError, match="line 2: bad value"):
        parse_config("k = 3\nepochs = many")


def test_ingest_sparsity(hotel50, capsys):
    stats = cmd_ingest(RunConfig(data=str(hotel50)))
    assert stats["rating_sparsity"] == 1 - stats["ratings"] / (stats["users"] * stats["items"])
    assert "rating_sparsity\t" in capsys.readouterr().out


def test_ingest_filters(hotel50):
    stats = cmd_ingest(RunConfig(data=str(hotel50), tags=("Pizza",)))
    assert stats["items"] == 1


def test_malformed_input_exits_nonzero(tmp_path, hotel50, capsys):
    bad = tmp_path / "bad"
    bad.mkdir()
    for name in ("users.jsonl", "items.jsonl"):
        (bad / name).write_text((hotel50 / name).read_text())
    (bad / "reviews.jsonl").write_text('{"user_id": "u0000", "item_id"\n')
    assert main(["ingest", "--data", str(bad)]) == 2
    assert "reviews.jsonl:1" in capsys.readouterr().err
    assert main(["ingest", "--data", str(tmp_path / "missing")]) == 2


def test_run_writes_artifacts(tmp_path, hotel50):
    out = tmp_path / "out"
    assert main(["run", "--config", str(_cfg(tmp_path, hotel50)), "--alpha", "0,0.5", "--beta", "0",
                 "--out", str(out)]) == 0
    for name in ("split.tsv", "pagerank.tsv", "trust.tsv", "grid.csv", "report.csv", "config.txt", "model.txt"):
        assert (out / name).exists(), name
    row = _report(out)[0]
    assert row["algorithm"] == "LOCABAL+" and row["ablation"] == "full"
    assert (out / "grid.csv").read_text().count("\n") == 1 + 2 * 2


def test_fixed_cell_single_grid_row(tmp_path, hotel50):
    out = tmp_path / "o"
    assert main(["grid", "--config", str(_cfg(tmp_path, hotel50)), "--alpha", "0.9", "--beta", "0",
                 "--out", str(out)]) == 0
    assert (out / "grid.csv").read_text().splitlines() == ["alpha,beta,fold,map", "0.9,0.0,-,nan"]


def test_nos_forces_alpha_zero(tmp_path, hotel50):
    out = tmp_path / "o"
    assert main(["eval", "--config", str(_cfg(tmp_path, hotel50)), "--ablation", "noS", "--alpha", "0.9",
                 "--beta", "0.3", "--out", str(out)]) == 0
    row = _report(out)[0]
    assert (row["ablation"], row["alpha"], row["beta"]) == ("noS", "0.0", "0.3")
    assert "C1 = 0" in (out / "config.txt").read_text()


def test_mf_and_baselines_echo_dashes(tmp_path, hotel50):
    for variant, label in (("MF", "MF"), ("U2UCF", "U2UCF"), ("U2USocial", "U2USocial")):
        out = tmp_path / variant
        assert main(["eval", "--config", str(_cfg(tmp_path, hotel50)), "--variant", variant,
                     "--out", str(out)]) == 0
        row = _report(out)[0]
        assert (row["algorithm"], row["ablation"], row["beta"]) == (label, "-", "-")


def test_unknown_variant(tmp_path, hotel50, capsys):
    assert main(["eval", "--data", str(hotel50), "--variant", "SVD++", "--out", str(tmp_path)]) == 2
    assert "unknown algorithm" in capsys.readouterr().err


def test_train_and_trust(tmp_path, hotel50):
    out = tmp_path / "o"
    assert main(["train", "--config", str(_cfg(tmp_path, hotel50)), "--alpha", "0.3", "--beta", "0.5",
                 "--out", str(out)]) == 0
    assert (out / "model.txt").read_text().startswith("trustrec-model 1\n")
    assert main(["trust", "--data", str(hotel50), "--out", str(out)]) == 0
    lines = (out / "pagerank.tsv").read_text().splitlines()
    assert len(lines) == 50 and lines[0].split("\t")[3] == "1.0"


def test_synth_command(tmp_path):
    assert main(["synth", "--out", str(tmp_path / "s"), "--users", "20", "--items", "15", "--seed", "3"]) == 0
    noisy = (tmp_path / "s" / "noisy_users.txt").read_text().split()
    assert len(noisy) == 6
    assert main(["ingest", "--data", str(tmp_path / "s")]) == 0
