import contextlib
import io
import json
import pathlib

import jsonschema

from microdiff import cli
from microdiff.jsonio import (OPERATOR_SCHEMA, POLYGON_SCHEMA, VERDICT_SCHEMA)

GOLDEN = pathlib.Path(__file__).parent / "golden"


def run(args):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.run(args)
    return code, buf.getvalue()


class TestGolden:
    def test_check_finf_probe(self):
        code, out = run(["check", "--level", "finf",
                         "prod(n=1..9, 1 - p^n*d)", "--k", "4"])
        assert code == 0
        assert out == (GOLDEN / "check_finf_probe.txt").read_text()
        assert "invertible: false" in out and "clause: non-finite" in out

    def test_norm_k3_prod7(self):
        code, out = run(["norm", "--k", "3", "prod(n=1..7, 1 - p^n*d)"])
        assert code == 0
        assert out == (GOLDEN / "norm_k3_prod7.txt").read_text()
        assert out.strip() == "norm = p^3"

    def test_polygon_svg(self):
        code, out = run(["polygon", "--format", "svg", "1 + p*d + p^3*d^2"])
        assert code == 0
        assert out == (GOLDEN / "polygon_quadratic.svg").read_text()
        assert "slope 1" in out and "slope 2" in out
        assert out.startswith("<svg") and out.rstrip().endswith("</svg>")


class TestJsonOutputs:
    def test_polygon_schema(self):
        code, out = run(["polygon", "--format", "json", "1 + p*d + p^3*d^2"])
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, POLYGON_SCHEMA)
        assert doc["slopes"] == ["1", "2"]
        assert doc["vertices"] == [[0, "0"], [1, "1"], [2, "3"]]

    def test_verdict_schema(self):
        code, out = run(["check", "--level", "ek", "--k", "2",
                         "--format", "json", "1 - p*d"])
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, VERDICT_SCHEMA)
        assert doc["invertible"] is True and doc["witness"]["beta"] == [1]

    def test_operator_schema(self):
        for args in (["catalog", "product_op", "--M", "4", "--format", "json"],
                     ["mul", "--format", "json", "dinv", "x"],
                     ["invert", "--level", "ek", "--k", "2", "--format",
                      "json", "1 - p*d"]):
            code, out = run(args)
            assert code == 0
            jsonschema.validate(json.loads(out), OPERATOR_SCHEMA)

    def test_json_matches_library(self):
        from microdiff import product_op
        from microdiff.jsonio import operator_from_json, operator_to_json
        code, out = run(["catalog", "product_op", "--M", "5", "--format", "json"])
        doc = json.loads(out)
        P = product_op(5)
        assert doc == json.loads(json.dumps(operator_to_json(P)))
        back = operator_from_json(doc)
        assert set(back.terms) == set(P.terms) and back.tail == P.tail


class TestExitCodes:
    def test_usage_error(self):
        assert run(["norm", "1 + d"])[0] == 1          # missing --k
        assert run(["check", "1 + d", "--k", "2"])[0] == 1  # missing --level

    def test_syntax_error(self):
        assert run(["norm", "--k", "1", "1 + ("])[0] == 1

    def test_unknown_symbol(self):
        assert run(["norm", "--k", "1", "1 + q"])[0] == 1

    def test_not_invertible(self):
        assert run(["invert", "--level", "ek", "--k", "1", "1 - p*d"])[0] == 3

    def test_window_overflow_maps_to_2(self):
        code = run(["mul", "--window", "4", "d^4", "d^4"])[0]
        assert code == 2

    def test_success(self):
        assert run(["order", "--k", "2", "1 - p*d"])[0] == 0


class TestBehaviour:
    def test_order_output(self):
        code, out = run(["order", "--k", "1", "1 - p*d"])
        assert code == 0
        assert out == "order N = 1\norder n = 0\n"

    def test_norm_mu(self):
        code, out = run(["norm", "--mu", "3/2", "1 + p*d + p^3*d^2"])
        assert code == 0
        assert out.strip() == "norm = p^1/2"

    def test_defect(self):
        code, out = run(["defect", "--k", "2", "d", "x"])
        assert code == 0
        assert out.strip() == "defect = p^-2"

    def test_check_levels_text(self):
        code, out = run(["check", "--level", "fkr", "--k", "2", "--r", "1",
                         "1 - p*d"])
        assert code == 0
        assert "invertible: false" in out
        assert "clause: lower_order_too_large" in out

    def test_finf_without_probe_is_honest(self):
        # the exact finite product has an invertible top coefficient
        code, out = run(["check", "--level", "finf", "prod(n=1..9, 1 - p^n*d)"])
        assert code == 0
        assert "invertible: true" in out

    def test_prime_flag(self):
        code, out = run(["norm", "--prime", "3", "--k", "1", "3*d"])
        assert code == 0
        assert out.strip() == "norm = p^0"

    def test_prime_env(self, monkeypatch):
        monkeypatch.setenv("MICRODIFF_PRIME", "5")
        code, out = run(["norm", "--k", "1", "5*d"])
        assert code == 0
        assert out.strip() == "norm = p^0"

    def test_out_file(self, tmp_path):
        target = tmp_path / "poly.json"
        code, _ = run(["polygon", "--format", "json", "--out", str(target),
                       "1 + p*d"])
        assert code == 0
        jsonschema.validate(json.loads(target.read_text()), POLYGON_SCHEMA)

    def test_cli_matches_library_bit_for_bit(self):
        from fractions import Fraction
        from microdiff import norm_k
        _, out = run(["norm", "--k", "3", "prod(n=1..7, 1 - p^n*d)"])
        from microdiff.catalog import product_op
        lib = norm_k(product_op(7, exact=True), 3)
        assert lib == Fraction(2) ** 3 and out.strip() == "norm = p^3"
