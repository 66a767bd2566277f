from pathlib import Path

import pytest

from spqlab.cli import main
from spqlab.rdf import load_ntriples

from conftest import INTRO_NT

ROOT = Path(__file__).parent.parent
LABELED = ROOT / "queries" / "labeled"


@pytest.fixture
def intro_file(tmp_path):
    p = tmp_path / "intro.nt"
    p.write_text(INTRO_NT)
    return p


def _kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def test_classify(capsys):
    files = [str(LABELED / "l01_sm_type.rq"), str(LABELED / "l13_opt.rq")]
    assert main(["classify", *files]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows == [f"{files[0]},SM,HP-Plausible", f"{files[1]},BMM+OPT,HP-Dubious"]


def test_classify_unsupported(tmp_path, capsys):
    q = tmp_path / "neg.rq"
    q.write_text("SELECT * WHERE { ?s ?p ?o MINUS { ?s <q> ?o } }")
    assert main(["classify", str(q)]) == 1
    out = capsys.readouterr().out
    assert "unsupported:" in out and "MINUS" in out and out.strip().endswith(",error")


def test_eval(intro_file, tmp_path, capsys):
    q = tmp_path / "q.rq"
    q.write_text("SELECT ?x WHERE { <http://ex/StatueOfLiberty> <http://ex/located_in>+ ?x }")
    assert main(["eval", "--data", str(intro_file), "--query", str(q), "--mode", "exhaustive"]) == 0
    out = capsys.readouterr().out
    kv = _kv(out)
    assert kv["rows"] == "3"
    assert float(kv["wall_ms"]) >= 0 and "plan" in kv
    assert "<http://ex/UnitedStates>" in out


def test_eval_timeout(tmp_path, capsys):
    data = tmp_path / "big.nt"
    data.write_text("".join(f"<http://t/s{i}> <http://t/p> <http://t/o{i}> .\n" for i in range(300)))
    q = tmp_path / "q.rq"
    q.write_text("SELECT * WHERE { ?a <http://t/p> ?b . ?c <http://t/p> ?d . ?e <http://t/p> ?f }")
    assert main(["eval", "--data", str(data), "--query", str(q), "--timeout", "30ms", "--quiet"]) == 1
    assert "status=timeout" in capsys.readouterr().out


def test_analyze(intro_file, capsys):
    assert main(["analyze", str(intro_file), "--type-predicate", "http://ex/instance_of"]) == 0
    kv = _kv(capsys.readouterr().out)
    assert kv["skipped_lines"] == "0"
    # every type has one instance, so every type is fully covered
    assert float(kv["structuredness"]) == 1.0 and kv["types"] == "3"


def test_analyze_skips_bad_lines(tmp_path, capsys):
    p = tmp_path / "bad.nt"
    p.write_text(INTRO_NT + "this is not a triple\n")
    assert main(["analyze", str(p), "--type-predicate", "http://ex/instance_of"]) == 0
    assert _kv(capsys.readouterr().out)["skipped_lines"] == "1"
    assert main(["analyze", str(p), "--strict"]) == 2


def test_generate(tmp_path, capsys, monkeypatch):
    from spqlab.rdf import save_ntriples
    from spqlab.synth import SynthConfig, synth_dataset
    seed = tmp_path / "seed.nt"
    save_ntriples(synth_dataset(SynthConfig(n_triples=3000)), seed)
    q = tmp_path / "p.rq"
    q.write_text("SELECT ?x WHERE { ?x a <http://example.org/synth/Type2> }")
    out = tmp_path / "v.nt"
    lp = tmp_path / "v.lp"
    assert main(["generate", "--seed", str(seed), "--ratio", "0.5", "--protect", str(q),
                 "--export-lp", str(lp), "--out", str(out)]) == 0
    kv = _kv(capsys.readouterr().out)
    assert abs(float(kv["recomputed_ch"]) - float(kv["target_ch"])) <= 0.01
    assert len(load_ntriples(out).triples) == int(kv["size"])
    assert "ch_lo" in lp.read_text()

    monkeypatch.setenv("SPQ_OUTPUT_ROOT", str(tmp_path / "root"))
    assert main(["generate", "--seed", str(seed), "--ratio", "0.9"]) == 0
    assert (tmp_path / "root" / "generated" / "seed-r0.9.nt").exists()


def test_generate_infeasible_exit_code(intro_file, capsys):
    assert main(["generate", "--seed", str(intro_file), "--ratio", "0.5"]) == 2
    assert "error:" in capsys.readouterr().err


def test_bench_and_replot(intro_file, tmp_path, capsys):
    q = tmp_path / "q1.rq"
    q.write_text("SELECT ?x WHERE { ?x <http://ex/instance_of> ?t }")
    csv_path = tmp_path / "b.csv"
    assert main(["bench", "--data", f"low/a={intro_file}", "--data", f"low/b={intro_file}",
                 "--query", str(q), "--repeats", "2", "--out", str(csv_path)]) == 0
    out = capsys.readouterr().out
    assert "mismatch" not in out and csv_path.exists()
    assert main(["report", "--records", str(csv_path)]) == 0
    assert csv_path.with_suffix(".svg").read_text().startswith("<?xml")


def test_report_config_with_output_root(tmp_path, capsys, monkeypatch):
    (tmp_path / "a.rq").write_text("SELECT ?x WHERE { ?x a <http://example.org/synth/Type0> }")
    (tmp_path / "exp.ini").write_text(
        "[experiment]\nratios = 0.5\nrepeats = 1\noutput = out/small\n\n"
        "[seed:low]\nsynth = 2000\n\n[queries]\nqa = a.rq\n")
    monkeypatch.setenv("SPQ_OUTPUT_ROOT", str(tmp_path / "elsewhere"))
    assert main(["report", "--config", str(tmp_path / "exp.ini")]) == 0
    kv = _kv(capsys.readouterr().out)
    assert Path(kv["records"]).parent == tmp_path / "elsewhere" / "small"
    assert Path(kv["svg"]).exists() and Path(kv["summary"]).exists()


def test_report_needs_input(capsys):
    assert main(["report"]) == 2
