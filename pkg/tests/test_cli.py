import json

from cantorgap.cli import main
from cantorgap.cube import ClopenSet
from cantorgap.instances import souslin_instance


def test_construct_writes_identical_artifacts(tmp_path):
    assert main(["construct", "--generators", "4", "--horizon", "64",
                 "--out", str(tmp_path / "a")]) == 0
    assert main(["construct", "--generators", "4", "--horizon", "64",
                 "--out", str(tmp_path / "b")]) == 0
    for name in ("tower.json", "base_names.json", "extended_names.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_invalid_config_exits_2(tmp_path):
    assert main(["construct", "--horizon", "0", "--out", str(tmp_path)]) == 2
    assert main(["search", "--epsilon", "3/2"]) == 2
    assert main(["verify", "--seed", "abc"]) == 2
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["verify", "--config", str(cfg)]) == 2


def test_verify_default_passes(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["verify", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["passed"]
    samples = [r for r in report["records"] if r["tag"] == "eq:62"]
    assert len(samples) == 200
    assert all("/" in r["measure"] or r["measure"] == "0" for r in samples)


def test_verify_corrupted_tower_names_m3(tmp_path, capsys):
    art = tmp_path / "art"
    assert main(["construct", "--out", str(art)]) == 0
    tower = json.loads((art / "tower.json").read_text())
    tower["entries"][3][5] = [0, 1, 2, 3]
    (art / "tower.json").write_text(json.dumps(tower))
    assert main(["verify", "--artifacts", str(art), "--format", "csv",
                 "--out", str(tmp_path / "r.csv")]) == 1
    assert "(m)(3)" in capsys.readouterr().err


def test_config_file_and_formats(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\ngenerators = 2\nhorizon = 16\nformat = text\n")
    out = tmp_path / "r.txt"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# command: verify") and "horizon: 16" in text


def test_search_is_deterministic_and_confirmed(tmp_path):
    args = ["search", "--seed", "7", "--family", "40", "--epsilon", "1/4"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rec = json.loads(a.read_text())["records"][0]
    assert rec["success"] and rec["confirmed"] and rec["bruteforce"] is not None


def test_search_rejects_violating_instance(tmp_path):
    inst = souslin_instance(1, N=4, M=16)
    inst.conditions[2] = ClopenSet.whole()
    inst.gammas[2] = (0, 1)
    path = tmp_path / "bad.json"
    path.write_text(inst.to_json())
    assert main(["search", "--instance", str(path)]) == 2


def test_search_staged_failure_exits_3(tmp_path):
    assert main(["search", "--seed", "1", "--family", "6", "--tail", "majorant",
                 "--out", str(tmp_path / "s.json")]) == 3


def test_extract_mode(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["search", "--mode", "extract", "--family", "60", "--format", "csv",
                 "--out", str(out)]) == 0
    assert out.read_text().startswith("members,")
