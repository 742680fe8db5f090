import io
import json

import pytest

from free_products import cli
from free_products.convolution import MeasureSpec
from free_products.selftest import CheckResult, SelftestReport
from free_products.settings import ApplicationSettings

SAMPLE = "{1,8,12}{2,6,7}{3,4,5}{9,10,11}"


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), settings=ApplicationSettings(), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def _error(err):
    return json.loads(err.strip().splitlines()[-1])


@pytest.mark.parametrize(
    "argv, count",
    [
        (["--family", "nc", "--n", "5"], "42"),
        (["--family", "k-equal", "--k", "2", "--n", "3"], "5"),
        (["--family", "k-divisible", "--k", "2", "--n", "3"], "12"),
        (["--family", "nc21", "--k", "3", "--n", "2"], "3"),
        (["--family", "type", "--type", "1,1,0"], "3"),
        (["--family", "pair-type", "--type", "3,0,0", "--kr-type", "0,0,1"], "1"),
    ],
)
def test_count(env_defaults, argv, count):
    code, out, _ = _run("count", *argv)

    assert code == 0
    assert out == '{"count":"%s"}\n' % count


def test_count_usage_errors(env_defaults):
    assert _run("count", "--family", "nc")[0] == 2
    assert _run("count", "--family", "bogus", "--n", "3")[0] == 2
    assert _run()[0] == 2


def test_count_domain_error(env_defaults):
    code, out, err = _run("count", "--family", "type", "--type", "1,1")

    assert code == 1
    assert out == ""
    assert _error(err)["error"] == "DomainError"


def test_enumerate(env_defaults):
    code, out, _ = _run("enumerate", "--n", "3")

    assert code == 0
    assert out.splitlines() == ["{1}{2}{3}", "{1}{2,3}", "{1,2}{3}", "{1,2,3}", "{1,3}{2}"]


def test_enumerate_json_shard(env_defaults):
    code, out, _ = _run("enumerate", "--family", "k-equal", "--k", "2", "--n", "2", "--format", "json")

    assert code == 0
    assert [json.loads(line) for line in out.splitlines()] == [[[1, 2], [3, 4]], [[1, 4], [2, 3]]]

    code, out, _ = _run("enumerate", "--family", "k-equal", "--k", "2", "--n", "2", "--first-block", "1,4")
    assert out.splitlines() == ["{1,4}{2,3}"]


def test_enumerate_ceiling(env_defaults):
    code, out, err = _run("enumerate", "--family", "k-equal", "--k", "3", "--n", "5")

    assert code == 1
    assert _error(err)["error"] == "ResourceLimitError"

    code, out, _ = _run("--unsafe-ceiling", "15", "enumerate", "--family", "k-equal", "--k", "3", "--n", "5")
    assert code == 0
    assert len(out.splitlines()) == 273


def test_enumeration_ceiling_setting(env_defaults, monkeypatch):
    monkeypatch.setenv("FREE_PRODUCTS_ENGINE_ENUMERATION_CEILING", "8")

    code, out, err = _run("enumerate", "--n", "9")

    assert code == 1
    assert out == ""
    error = _error(err)
    assert error["error"] == "ResourceLimitError"
    assert "enumeration ceiling 8" in error["message"]

    code, out, _ = _run("enumerate", "--n", "8")
    assert code == 0
    assert len(out.splitlines()) == 1430


def test_kreweras(env_defaults):
    code, out, _ = _run("kreweras", "--in", SAMPLE)

    assert code == 0
    assert out == "{1,7}{2,5}{3}{4}{6}{8,11}{9}{10}{12}\n"


def test_kreweras_decompose_json(env_defaults):
    code, out, _ = _run("kreweras", "--in", SAMPLE, "--decompose", "3", "--format", "json")

    payload = json.loads(out)
    assert code == 0
    assert payload["parts"] == [[[1, 3], [2], [4]], [[1, 2], [3, 4]], [[1], [2], [3], [4]]]


def test_kreweras_from_stdin(env_defaults, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("[[1,2],[3]]\n"))

    code, out, _ = _run("kreweras", "--in", "-")

    assert code == 0
    assert out == "{1}{2,3}\n"


def test_kreweras_rejects_crossing(env_defaults):
    code, _, err = _run("kreweras", "--in", "{1,3}{2,4}")

    assert code == 1
    error = _error(err)
    assert error["error"] == "StructuralError"
    assert "crossing" in error["message"]


def test_convolve(env_defaults, tmp_path):
    spec = tmp_path / "mp.json"
    spec.write_text('{"flavor": "free", "values": ["1", "1", "1"], "L": "4"}')
    target = tmp_path / "out.json"

    code, out, _ = _run("convolve", "--op", "boxtimes", "--order", "3", "--strategy", "direct", str(spec), str(spec))

    assert code == 0
    assert json.loads(out) == {"flavor": "free", "values": ["1", "2", "5"], "moments": ["1", "3", "12"], "L": "16"}
    assert out == json.dumps(json.loads(out), sort_keys=True, separators=(",", ":")) + "\n"

    product = MeasureSpec.model_validate_json(out)
    assert product.moments == (1, 3, 12)
    assert product.support_bound == 16
    reemitted = product.model_dump(mode="json", by_alias=True, exclude_none=True)
    assert json.dumps(reemitted, sort_keys=True, separators=(",", ":")) + "\n" == out

    code, out, _ = _run("convolve", "--op", "boxplus", "--order", "2", "--out", str(target), str(spec), str(spec))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["values"] == ["2", "2"]

    code, out, _ = _run("convolve", "--op", "boolean", "--order", "3", str(spec), str(spec))
    assert json.loads(out)["values"] == ["1", "2", "7"]


def test_convolve_errors(env_defaults, tmp_path):
    spec = tmp_path / "mp.json"
    spec.write_text('{"flavor": "free", "values": ["1", "1"]}')

    code, _, err = _run("convolve", "--op", "boxtimes", "--order", "3", str(spec))
    assert code == 1
    assert _error(err)["error"] == "TruncationError"

    code, _, err = _run("convolve", "--op", "boxtimes", "--order", "2", str(tmp_path / "missing.json"))
    assert code == 1
    assert _error(err)["error"] == "FileNotFoundError"

    spec.write_text('{"values": []}')
    code, _, err = _run("convolve", "--op", "boxtimes", "--order", "1", str(spec))
    assert code == 1
    assert _error(err)["error"] == "ValidationError"


def test_convolve_direct_within_enumeration_ceiling(env_defaults, monkeypatch, tmp_path):
    spec = tmp_path / "mp.json"
    spec.write_text('{"flavor": "free", "values": ["1", "1", "1"], "L": "4"}')
    monkeypatch.setenv("FREE_PRODUCTS_ENGINE_ENUMERATION_CEILING", "4")

    code, _, err = _run("convolve", "--op", "boxtimes", "--order", "3", "--strategy", "direct", str(spec), str(spec))
    assert code == 1
    assert _error(err)["error"] == "ResourceLimitError"

    code, out, _ = _run("convolve", "--op", "boxtimes", "--order", "3", str(spec), str(spec))
    assert code == 0
    assert json.loads(out)["values"] == ["1", "2", "5"]
    assert "moments" not in json.loads(out)


def test_bounds(env_defaults, tmp_path):
    spec = tmp_path / "mp.json"
    spec.write_text('{"flavor": "free", "values": ["1", "1", "1", "1"], "L": "4"}')
    table = tmp_path / "edge.csv"

    argv = ["bounds", "--k", "1", "--L", "4", "--sigma2", "1", "--nonneg", "--order", "4"]

    code, out, _ = _run(*argv, "--spec", str(spec), "--csv", str(table))

    payload = json.loads(out)
    assert code == 0
    assert payload["certificate"]["lower"] == "2"
    assert payload["certificate"]["constant_tag"] == "e"
    assert len(payload["estimates"]) == 4
    assert payload["estimates"][0] == "1"
    assert table.read_text().splitlines()[:2] == ["n,estimate,decimal", "1,1,1.000000000000"]


def test_bounds_rejects_variance(env_defaults):
    code, _, err = _run("bounds", "--k", "2", "--L", "2", "--sigma2", "3/2")

    assert code == 1
    assert _error(err)["error"] == "DomainError"


def test_limits(env_defaults):
    code, out, _ = _run("limits", "--law", "free-poisson", "--n", "3", "--kgrid", "1,2")

    checks = json.loads(out)
    assert code == 0
    assert [c["computed"] for c in checks] == ["1", "5/4"]
    assert checks[1]["target"] == "3/2"


def test_limits_csv(env_defaults):
    code, out, _ = _run("limits", "--law", "free-poisson", "--n", "3", "--kgrid", "2", "--format", "csv")

    assert code == 0
    assert out.splitlines() == [
        "k,n,flavor,computed,target,deviation",
        "2,3,free,1.250000000000,1.500000000000,0.166666666666",
    ]


def test_limits_boolean(env_defaults):
    code, out, _ = _run("limits", "--law", "free-poisson", "--n", "3", "--kgrid", "2", "--boolean")

    assert json.loads(out)[0]["computed"] == "7/4"


def test_positivity(env_defaults):
    code, out, _ = _run("positivity", "--law", "two-point", "--atoms", "0,4/3", "--n", "4", "--k-max", "6")

    assert code == 0
    assert json.loads(out)["threshold"] == 5


def test_positivity_bad_law(env_defaults):
    code, _, err = _run("positivity", "--law", "two-point", "--n", "4", "--k-max", "6")

    assert code == 1
    assert _error(err)["error"] == "ValidationError"


def test_selftest_command(env_defaults, monkeypatch):
    results = (CheckResult(name="a", passed=True), CheckResult(name="b", passed=False, detail="x"))
    report = SelftestReport(results=results)
    monkeypatch.setattr(cli, "run_selftest", lambda: report)

    code, out, _ = _run("selftest")

    assert code == 1
    assert out.splitlines() == ["PASS a", "FAIL b: x"]


def test_version(env_defaults, capsys):
    assert cli.run(["--version"]) == 0
    assert "free-products" in capsys.readouterr().out


def test_log_level_override(env_defaults, tmp_path):
    spec = tmp_path / "mp.json"
    spec.write_text('{"flavor": "free", "values": ["1", "1"]}')

    code, _, err = _run("--log-level", "info", "convolve", "--op", "boxtimes", "--order", "2", str(spec), str(spec))

    assert code == 0
    assert "INFO: [convolution.py:" in err
    assert "direct engine" in err
