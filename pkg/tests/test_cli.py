import csv
import json

import numpy as np
import pytest

from sobolhdc.cli import main, trial_seed
from sobolhdc.hypervector import load_hypervectors


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sobol_csv(capsys):
    code, out, _ = run(capsys, "sobol", "--dims", 2, "--points", 4)
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["dimension", "x0", "x1", "x2", "x3"]
    assert [[float(v) for v in r[1:]] for r in rows[1:]] == [[0, 0.5, 0.25, 0.75], [0, 0.5, 0.75, 0.25]]


def test_sobol_zero_dims_is_usage_error(capsys):
    code, _, err = run(capsys, "sobol", "--dims", 0)
    assert code == 2 and "usage" in err


def test_sobol_capacity(capsys):
    code, _, err = run(capsys, "sobol", "--dims", 1112, "--points", 2)
    assert code == 1 and "1111" in err


def test_sobol_writes_file_and_sidecar(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert run(capsys, "sobol", "--dims", 3, "--points", 8, "--out", out)[0] == 0
    assert len(read_csv(out)) == 4
    assert json.loads((tmp_path / "s.csv.json").read_text())["config"]["dims"] == 3


def test_sobol_unwritable_path(tmp_path, capsys):
    code, _, _ = run(capsys, "sobol", "--out", tmp_path / "missing" / "x.csv")
    assert code == 1


def test_select_report_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    hv = tmp_path / "sel.hv"
    assert run(capsys, "select", "--dim", 2048, "--t", 0.34, "--k", 28, "--out", a, "--save-hv", hv)[0] == 0
    assert run(capsys, "select", "--dim", 2048, "--t", 0.34, "--k", 28, "--out", b)[0] == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert len(set(ra["indexes"])) == 28
    assert ra["mean_abs_scc"] <= ra["population_mean_abs_scc"]
    for key in ("indexes", "mean_abs_scc", "population_mean_abs_scc", "D", "T", "k"):
        assert ra[key] == rb[key]
    hvs, meta = load_hypervectors(hv)
    assert hvs.shape == (28, 2048) and meta["indexes"] == ra["indexes"]


def test_select_capacity(capsys):
    code, _, err = run(capsys, "select", "--dim", 64, "--k", 1112)
    assert code == 1 and "CapacityError" in err


def test_select_bundled_and_file_tables(tmp_path, capsys):
    from importlib import resources

    src = resources.files("sobolhdc") / "data" / "new-joe-kuo-1111.txt"
    copy = tmp_path / "dirs.txt"
    copy.write_text(src.read_text())
    outs = []
    for table in ("new-joe-kuo", copy):
        out = tmp_path / f"{len(outs)}.json"
        assert run(capsys, "select", "--dim", 64, "--k", 5, "--direction-file", table, "--out", out)[0] == 0
        outs.append(json.loads(out.read_text())["indexes"])
    assert outs[0] == outs[1]


def test_select_missing_direction_file(capsys):
    code, _, err = run(capsys, "select", "--dim", 64, "--k", 5, "--direction-file", "/nonexistent.txt")
    assert code == 1 and "not found" in err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"dims": 3, "points": 2}))
    _, out, _ = run(capsys, "sobol", "--config", cfg)
    assert len(out.splitlines()) == 4
    _, out, _ = run(capsys, "sobol", "--config", cfg, "--dims", 1)
    assert len(out.splitlines()) == 2


def test_config_dashed_keys(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"dim": 64, "k": 4, "direction-file": "new-joe-kuo"}))
    code, out, _ = run(capsys, "select", "--config", cfg)
    assert code == 0 and json.loads(out)["config"]["direction_file"] == "new-joe-kuo"


@pytest.mark.parametrize("bad", [{"nope": 1}, {"source": "qrng"}, {"t": 3}])
def test_config_rejects_bad_values(tmp_path, bad):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(bad))
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--config", str(cfg)])
    assert exc.value.code == 2


def test_sweep_rows_and_argmax(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    args = ["sweep", "--dim", 32, 64, "--out", out]
    assert run(capsys, *args)[0] == 0
    rows = read_csv(out)
    assert rows[0] == ["D", "T", "accuracy", "margin", "best"]
    body = rows[1:]
    assert len(body) == 2 * 49
    for D in ("32", "64"):
        assert sum(r[4] == "1" for r in body if r[0] == D) == 1
    side = json.loads((tmp_path / "sweep.csv.json").read_text())
    assert set(side["best"]) == {"32", "64"}
    first = out.read_text()
    assert run(capsys, *args)[0] == 0
    assert out.read_text() == first


def test_sweep_svg(tmp_path, capsys):
    pytest.importorskip("matplotlib")
    svg = tmp_path / "s.svg"
    assert run(capsys, "sweep", "--dim", 32, "--step", 0.25, "--svg", svg)[0] == 0
    assert svg.read_text().lstrip().startswith("<?xml")


def test_eval_random_trials(tmp_path, capsys):
    out = tmp_path / "e.csv"
    assert run(capsys, "eval", "--source", "random", "--dim", 64, "--trials", 4, "--out", out)[0] == 0
    header, row = read_csv(out)
    assert header[-4:] == ["min_acc", "max_acc", "std_acc", "avg_acc"]
    mn, mx, sd, avg = map(float, row[-4:])
    assert mn <= avg <= mx and sd >= 0
    side = json.loads((tmp_path / "e.csv.json").read_text())
    assert len(side["trial_accuracies"]) == 4
    assert np.isclose(np.mean(side["trial_accuracies"]), avg, atol=1e-6)


def test_eval_sobol_single_value(capsys):
    code, out, _ = run(capsys, "eval", "--source", "sobol", "--dim", 64, "--t", 0.34, "--trials", 5)
    assert code == 0
    header, row = list(csv.reader(out.splitlines()))
    assert row[4] == "1" and row[5:8] == ["", "", ""] and 0 <= float(row[8]) <= 1
    _, again, _ = run(capsys, "eval", "--source", "sobol", "--dim", 64, "--t", 0.34)
    assert again == out


def test_trial_seeds_distinct():
    assert len({trial_seed(0, r) for r in range(100)}) == 100


def test_train_infer_roundtrip(tmp_path, capsys):
    model = tmp_path / "m.hdcm"
    assert run(capsys, "train", "--source", "sobol", "--dim", 256, "--t", 0.34, "--out", model)[0] == 0
    assert json.loads((tmp_path / "m.hdcm.json").read_text())["item_memory_fingerprint"]
    code, out, _ = run(capsys, "infer", "--model", model, "--text", "Hello World", "--text", "another text")
    assert code == 0
    rows = list(csv.reader(out.splitlines()))
    assert rows[0][:2] == ["text", "label"] and len(rows) == 3
    assert len(rows[0]) == 2 + 5


def test_infer_from_file(tmp_path, capsys):
    model = tmp_path / "m.hdcm"
    run(capsys, "train", "--source", "random", "--dim", 64, "--out", model)
    texts = tmp_path / "in.txt"
    texts.write_text("first line here\n\nsecond line here\n")
    code, out, _ = run(capsys, "infer", "--model", model, "--input", texts)
    assert code == 0 and len(out.splitlines()) == 3


def test_infer_other_alphabet_is_fingerprint_error(tmp_path, capsys):
    model = tmp_path / "m.hdcm"
    run(capsys, "train", "--source", "random", "--dim", 64, "--out", model)
    code, _, err = run(capsys, "infer", "--model", model, "--text", "abcdef", "--alphabet", "abcdefghijklmnopqrstuvwxyz #!")
    assert code == 1 and "IncompatibleModelError" in err


def test_train_needs_out(capsys):
    assert run(capsys, "train", "--dim", 64)[0] == 2


def test_data_directory(tmp_path, capsys):
    from sobolhdc.corpus import split_per_class, synthetic_corpus, write_corpus_dir

    tr, te = split_per_class(synthetic_corpus(3, 30, 40, seed=1), 10)
    write_corpus_dir(tr, tmp_path / "d" / "train")
    write_corpus_dir(te, tmp_path / "d" / "test")
    code, out, _ = run(capsys, "eval", "--source", "random", "--dim", 64, "--data", tmp_path / "d")
    assert code == 0 and out.splitlines()[1].startswith("random,64")
    code, _, err = run(capsys, "eval", "--dim", 64, "--data", tmp_path / "d" / "train")
    assert code == 2 and "test" in err


def test_bench(tmp_path, capsys):
    out = tmp_path / "b.csv"
    args = ["bench", "--dim", 64, 256, "--texts", 5, "--repeats", 1, "--out", out]
    assert run(capsys, *args)[0] == 0
    rows = read_csv(out)
    assert rows[0] == ["source", "D", "texts_per_s", "ngrams_per_s", "generation_s",
                       "generation_amortized_s", "memory_bytes"]
    assert len(rows) == 1 + 3 * 2
    by = {(r[0], r[1]): r for r in rows[1:]}
    assert by[("sobol", "256")][5] != "" and by[("random", "256")][5] == ""
    assert int(by[("lfsr", "256")][6]) == 28 * 256 // 8 + 15
