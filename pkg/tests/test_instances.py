import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscindex.index import compute_index
from oscindex.instances import (
    InstanceError,
    bundled,
    bundled_names,
    load,
    normalize,
    parse,
    scaled,
    serialize,
    with_rho_prime,
)

EXPECTED = {
    "pquh": ("V", 0),
    "qpuh": ("VI", 0),
    "case1": ("I", -1),
    "case3_mult": ("III", 0),
    "case3_composite": ("III", -1),
    "case5_composite": ("V", -1),
    "toeplitz_k1": (None, -1),
    "toeplitz_km2": (None, 2),
}


def test_bundled_set():
    names = bundled_names()
    assert {"pquh", "qpuh", "corner_equality", "mixed"} <= set(names)
    assert sum(n.startswith("toeplitz_") for n in names) == 7


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_bundled_index(name):
    inst = bundled(name)
    rep = compute_index(inst.element, inst.certificate(), inst.options(probe=False))
    case = None if rep.case is None else rep.case.value
    assert (case, rep.index) == EXPECTED[name]


@pytest.mark.parametrize("name", bundled_names())
def test_roundtrip(name):
    inst = bundled(name)
    raw = json.loads(inst.serialize())
    assert serialize(parse(raw).spec) == serialize(normalize(raw))


def test_shorthand_normalization():
    spec = normalize({"oscillation": {"h": 1}, "b0": {"c1": 2, "c2": [0, 1]}})
    assert spec["b0"] == {
        "kind": "generator",
        "c1": {"kind": "const", "value": [2.0, 0.0]},
        "c2": {"kind": "const", "value": [0.0, 1.0]},
    }
    assert spec["b1"] == {"kind": "named", "name": "0"}
    assert spec["rho_prime"] == 0.5 and spec["certificate"] is None


coef = st.one_of(
    st.floats(-3, 3, allow_nan=False),
    st.tuples(st.floats(-3, 3, allow_nan=False), st.floats(-3, 3, allow_nan=False)).map(list),
    st.integers(-3, 3).map(lambda k: {"kind": "exp", "k": k}),
    st.tuples(st.floats(-2, 2), st.floats(-2, 2)).map(lambda p: {"kind": "step", "plus": p[0], "minus": p[1]}),
)
element = st.one_of(
    st.sampled_from(["I", "S", "P", "Q", "0"]),
    st.tuples(coef, coef).map(lambda c: {"c1": c[0], "c2": c[1]}),
    st.tuples(coef, coef).map(lambda c: {"kind": "riesz", "a": c[0], "b": c[1]}),
)


@settings(max_examples=40, deadline=None)
@given(b0=element, b1=element, h=st.floats(-3, 3, allow_nan=False), rho=st.floats(0.1, 3.0))
def test_roundtrip_property(b0, b1, h, rho):
    raw = {"oscillation": {"h": h, "rho": rho}, "b0": b0, "b1": b1}
    assert serialize(parse(raw).spec) == serialize(normalize(raw))
    assert normalize(json.loads(serialize(normalize(raw)))) == normalize(raw)


@pytest.mark.parametrize(
    "raw",
    [
        {"b0": "I"},
        {"oscillation": {"h": 1, "rho": 5}, "b0": "I"},
        {"oscillation": {"h": 1}, "b0": "X"},
        {"oscillation": {"h": 1}, "b0": {"kind": "nope"}},
        {"oscillation": {"h": 1}, "b0": "I", "tolerances": {"speed": 1}},
        {"oscillation": {"h": 1}, "b0": "I", "rho_prime": 2},
    ],
)
def test_invalid_instances(raw):
    with pytest.raises(InstanceError):
        normalize(raw)


def test_load_file_and_bundled_reference(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"oscillation": {"h": 1}, "b0": "P", "b1": "Q"}))
    assert load(p).hash == load(str(p)).hash
    assert load("bundled:pquh").label == "P + Q U_h"
    with pytest.raises(InstanceError):
        load("bundled:missing")


def test_hash_changes_with_content():
    a = bundled("pquh")
    assert a.hash != with_rho_prime(a, 0.25).hash
    assert a.hash == bundled("pquh").hash


def test_scaled_keeps_certificate_valid():
    inst = scaled(bundled("case5_composite"), 1j)
    rep = compute_index(inst.element, inst.certificate(), inst.options(probe=False))
    assert rep.index == -1
