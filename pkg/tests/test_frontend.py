import io
import json

import jsonschema
import pytest
from hypothesis import given, settings, strategies as st
from referencing import Registry, Resource

from oracles import MODELS
from upsynth.frontend.cli import main
from upsynth.frontend.dsl import ParseError, load_model, parse_model, serialize
from upsynth.frontend.output import load_schema
from upsynth.gen import random_model

SCHEMAS = {n: load_schema(n) for n in ("regions.schema.json", "synth.schema.json", "run.schema.json")}
REGISTRY = Registry().with_resources((n, Resource.from_contents(s)) for n, s in SCHEMAS.items())


def conforms(doc, name):
    jsonschema.Draft202012Validator(SCHEMAS[name], registry=REGISTRY).validate(doc)


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6), st.booleans())
def test_round_trip(seed, sw):
    a = random_model(seed, stopwatches=sw)
    assert parse_model(serialize(a)) == a


def test_model_files_round_trip():
    for f in MODELS.glob("*.upta"):
        a = load_model(f)
        assert parse_model(serialize(a)) == a


@pytest.mark.parametrize("text,needle", [
    ("param p in [0, 1];\nclock x;\nloc a;\n", "missing init"),
    ("clock x;\nloc a;\ninit a;\ninit a;\n", "init"),
    ("clock x;\nloc a;\ninit a;\nedge a -> b;\n", "b"),
    ("clock x;\nloc a;\ninit a;\nedge a -> a when z < 1;\n", "z"),
    ("clock x;\nloc a;\ninit a;\nedge a -> a when x < ;\n", ""),
])
def test_diagnostics(text, needle):
    with pytest.raises(ParseError) as e:
        parse_model(text)
    assert needle in str(e.value)


def test_error_position():
    with pytest.raises(ParseError) as e:
        parse_model("clock x;\nloc a;\ninit a;\nedge a -> a when x ? 1;\n")
    assert e.value.line == 4


def test_equality_sugar():
    a = parse_model("param p in [0, 1];\nclock x;\nloc a;\nloc b;\ninit a;\n"
                    "edge a -> b when x == p do { x := 0 };\n")
    assert [(t.op, t.rhs) for t in a.edges[0].guard] == [(">=", "p"), ("<=", "p")]


def test_validate_exit_codes():
    assert cli("validate", str(MODELS / "blockchain.upta"))[0] == 0
    code, out, _ = cli("validate", str(MODELS / "counting_loop.upta"))
    assert code == 1 and "param-guard-total-update" in out
    assert cli("validate", "/nonexistent.upta")[0] == 2
    assert cli("bogus")[0] == 2


def test_regions_json(tmp_path):
    code, out, _ = cli("regions", str(MODELS / "toy1.upta"), "--json", "--plot",
                       str(tmp_path / "r.png"))
    assert code == 0
    doc = json.loads(out)
    conforms(doc, "regions.schema.json")
    assert len(doc["regions"]) == 5
    assert (tmp_path / "r.png").stat().st_size > 0


def test_synth_json_and_text():
    code, out, _ = cli("synth", str(MODELS / "toy1.upta"), "--goal", "goal", "--json", "--witness")
    assert code == 0
    doc = json.loads(out)
    conforms(doc, "synth.schema.json")
    assert doc["verdict"] == "NonEmpty"
    assert all("witness" in r for r in doc["reaching"])
    code, out, _ = cli("synth", str(MODELS / "toy1.upta"), "--goal", "goal", "--engine", "both")
    assert code == 0 and "5 of 5" in out


def test_check_exit_codes():
    toy = str(MODELS / "toy1.upta")
    assert cli("check", toy, "--goal", "goal")[0] == 0
    assert cli("check", toy, "--goal", "goal", "--expect-unreachable")[0] == 1
    assert cli("check", toy, "--goal", "start", "--expect-unreachable")[0] == 1
    assert cli("check", toy, "--goal", "nowhere")[0] == 2
    assert cli("check", str(MODELS / "counting_loop.upta"), "--goal", "l3")[0] == 2


def test_simulate_json():
    code, out, _ = cli("simulate", str(MODELS / "toy1.upta"), "--valuation", "p=1/3", "--json")
    assert code == 0
    conforms(json.loads(out), "run.schema.json")
    assert cli("simulate", str(MODELS / "toy1.upta"), "--valuation", "q=1")[0] == 2
