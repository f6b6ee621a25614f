import json

from hdx import cli
from hdx import complexes as cpx


def run(args):
    return cli.main(args)


def strip_timestamp(path):
    data = json.loads(path.read_text())
    data.pop("generated_at")
    return json.dumps(data, sort_keys=True)


def test_gen_families(tmp_path):
    for args, verts in [
        (["gen", "complete", "--d", "3"], 4),
        (["gen", "building", "--q", "2"], 65),
        (["gen", "cyclic-cover", "--m", "5"], 5),
        (["gen", "presentation", "--gens", "a,b", "--relators", "b"], 1),
        (["gen", "contracted", "--d", "4"], 1),
    ]:
        out = tmp_path / "cx.json"
        assert run(args + ["--out", str(out)]) == 0
        assert cpx.load_complex(out).n_vertices == verts


def test_gen_free_product_with_contracted(tmp_path):
    out = tmp_path / "fp.json"
    code = run(["gen", "free-product", "--gens", "t", "--relators", "t^2",
                "--contracted-d", "5", "--out", str(out)])
    assert code == 0
    cx = cpx.load_complex(out)
    assert len(cx.edges) == 1 + 6 and len(cx.polygons) == 1 + 10


def test_cheeger_report_and_exit_zero(tmp_path):
    cxp = tmp_path / "k3.json"
    rep = tmp_path / "report.json"
    run(["gen", "complete", "--d", "2", "--out", str(cxp)])
    code = run(["cheeger", "--complex", str(cxp), "--kind", "h1", "--coeff", "sym",
                "--nmax", "3", "--mode", "exact", "--out", str(rep)])
    assert code == 0
    data = json.loads(rep.read_text())
    assert data["result"]["value_exact"] == "3"
    assert data["config"]["nmax"] == 3
    assert data["version"]
    assert "inequality_slack" in data["tolerances"]


def test_cheeger_family_csv(tmp_path):
    paths = []
    for d in (2, 3):
        p = tmp_path / f"k{d + 1}.json"
        run(["gen", "complete", "--d", str(d), "--out", str(p)])
        paths.append(str(p))
    csv_path = tmp_path / "sweep.csv"
    code = run(["cheeger", "--complex", *paths, "--kind", "h1", "--coeff", "sym",
                "--nmax", "2", "--out", str(tmp_path / "r.json"), "--csv", str(csv_path)])
    assert code == 0
    lines = csv_path.read_text().strip().splitlines()
    assert len(lines) == 3  # header + one row per complex


def test_malformed_complex_exits_one(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["cheeger", "--complex", str(bad), "--out", str(tmp_path / "r.json")]) == 1
    missing = tmp_path / "nope.json"
    assert run(["spectral", "--complex", str(missing)]) == 1


def test_spectral_trickle_and_violation_exit(tmp_path):
    cxp = tmp_path / "k4.json"
    run(["gen", "complete", "--d", "3", "--out", str(cxp)])
    rep = tmp_path / "trickle.json"
    assert run(["spectral", "--complex", str(cxp), "--check", "trickle",
                "--out", str(rep)]) == 0
    data = json.loads(rep.read_text())
    assert data["result"]["holds"] is True
    # equality case: a negative slack makes the asserted inequality fail,
    # which must surface as exit code 2 (finding, not crash)
    assert run(["spectral", "--complex", str(cxp), "--check", "trickle",
                "--slack", "-0.01", "--out", str(rep)]) == 2


def test_spectral_plot_written(tmp_path):
    cxp = tmp_path / "k4.json"
    run(["gen", "complete", "--d", "3", "--out", str(cxp)])
    fig = tmp_path / "spectrum.png"
    assert run(["spectral", "--complex", str(cxp), "--check", "profile",
                "--plot", str(fig), "--out", str(tmp_path / "r.json")]) == 0
    assert fig.stat().st_size > 0


def test_cover_roundtrip_checks(tmp_path):
    cxp = tmp_path / "X.json"
    run(["gen", "presentation", "--gens", "a,b", "--relators", "b", "--out", str(cxp)])
    cochain = tmp_path / "w.json"
    cochain.write_text(json.dumps(
        {"coefficient": {"sym": 2}, "level": 1, "values": {"0": "(1 2)", "1": "id[2]"}}
    ))
    out = tmp_path / "cover.json"
    assert run(["cover", "--complex", str(cxp), "--cochain", str(cochain),
                "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["degree"] == 2
    assert data["checks"]["roundtrip_same_orbit"] is True
    assert data["checks"]["norm_equals_crossing"] is True


def test_correct_subcommand(tmp_path):
    cxp = tmp_path / "k4.json"
    run(["gen", "complete", "--d", "3", "--out", str(cxp)])
    cochain = tmp_path / "a.json"
    cochain.write_text(json.dumps(
        {"coefficient": {"sym": 2}, "level": 1,
         "values": {str(e): "(1 2)" if e == 0 else "id[2]" for e in range(6)}}
    ))
    rep = tmp_path / "cert.json"
    assert run(["correct", "--complex", str(cxp), "--cochain", str(cochain),
                "--method", "complete", "--out", str(rep)]) == 0
    cert = json.loads(rep.read_text())["result"]
    assert cert["holds"] is True
    assert run(["correct", "--complex", str(cxp), "--cochain", str(cochain),
                "--method", "cone", "--root", "0", "--fill-budget", "2",
                "--out", str(rep)]) == 0


def test_experiment_outputs_csv_and_figure(tmp_path):
    cxp = tmp_path / "k4.json"
    run(["gen", "complete", "--d", "3", "--out", str(cxp)])
    csv_path = tmp_path / "trials.csv"
    rep = tmp_path / "trials.json"
    code = run(["experiment", "--complex", str(cxp), "--method", "complete",
                "--coeff", "sym", "--degree", "2", "--p", "0.2", "--trials", "40",
                "--seed", "5", "--out", str(csv_path), "--report", str(rep)])
    assert code == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "trial,defect,distance,ratio,method,seed"
    assert len(lines) == 41
    assert (tmp_path / "trials.png").stat().st_size > 0
    summary = json.loads(rep.read_text())["result"]["summary"]
    assert summary["max_ratio"] <= summary["bound"]


def test_reports_deterministic_modulo_timestamp(tmp_path, monkeypatch):
    cxp = tmp_path / "k3.json"
    run(["gen", "complete", "--d", "2", "--out", str(cxp)])
    rep1, rep2 = tmp_path / "r1.json", tmp_path / "r2.json"
    base = ["cheeger", "--complex", str(cxp), "--kind", "h1", "--coeff", "sym",
            "--nmax", "2", "--seed", "11"]
    run(base + ["--out", str(rep1)])
    run(base + ["--out", str(rep2)])
    first, second = strip_timestamp(rep1), strip_timestamp(rep2)
    assert first == second.replace(str(rep2), str(rep1))


def test_env_seed_respected(tmp_path, monkeypatch):
    monkeypatch.setenv("HDX_SEED", "777")
    parser = cli.build_parser()
    args = parser.parse_args(["cosystole", "--complex", "x"])
    assert args.seed == 777


def test_cover_export_loads_as_complex(tmp_path):
    cxp = tmp_path / "X.json"
    run(["gen", "presentation", "--gens", "a,b", "--relators", "b", "--out", str(cxp)])
    cochain = tmp_path / "w.json"
    cochain.write_text(json.dumps(
        {"coefficient": {"sym": 2}, "level": 1, "values": {"0": "(1 2)", "1": "id[2]"}}
    ))
    out = tmp_path / "cover.json"
    run(["cover", "--complex", str(cxp), "--cochain", str(cochain), "--out", str(out)])
    cover = cpx.complex_from_dict(json.loads(out.read_text()))
    assert cover.n_vertices == 2 and len(cover.edges) == 4
    assert cover.is_connected
