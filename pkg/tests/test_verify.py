import dataclasses
import json

import pytest

from pfaffsym.combinat import Partition
from pfaffsym.ring import SeriesCap, ratfun_series, variables
from pfaffsym.symfun import pfaffian_entry, schur, vandermonde
from pfaffsym.verify import (
    REGISTRY,
    IdentityCheck,
    ParameterError,
    UnknownIdentityError,
    VerificationReport,
    check,
    registered_ids,
    reports_to_json,
    run_check,
    run_suite,
    suite_checks,
    verify_corollary_5,
    verify_main_theorem,
    verify_oddness_route,
    verify_simple_corollary,
    verify_zn_series,
)

a, b, c = variables("a", "b", "c")
x1, x2 = variables("x1", "x2")
SMOKE = [(i, p) for i in registered_ids(REGISTRY) for p in REGISTRY[i].smoke]


def test_spec_examples():
    assert check("msf", n=1, N=4, seed=7).passed
    assert check("subs", n=1).passed
    r = check("fundamental", n=1, trials=5)
    assert r.passed and r.engine == "randomized"
    assert r.evaluations >= 5


def test_zn_single_entry_series():
    # through x-degree 3 the Pfaffian is the entry p_12 itself
    got = ratfun_series(pfaffian_entry(1, 2), SeriesCap(3))
    s = lambda *p: schur(Partition(p), 2)  # noqa: E731
    want = (x1 - x2) * (1 + a * s(1) + a * b * s(2) + a * c * s(1, 1))
    assert got == want.truncate(SeriesCap(3))
    zero = {k: 0 for k in "abcd"}
    assert got.substitute(zero) == vandermonde([x1, x2])


@pytest.mark.parametrize("n,D", [(1, 2), (1, 4), (2, 2)])
def test_zn_series(n, D):
    assert verify_zn_series(n, D).passed
    assert verify_zn_series(n, D, specialize=True).passed


def test_zn_literal_entries_fail():
    r = check("zn-pfaffian", n=1, degree=2, mutate=True)
    assert r.status == "fail"
    assert "monomial" in r.witness


@pytest.mark.parametrize("n,D", [(1, 2), (2, 2), (2, 4)])
@pytest.mark.parametrize("corrections", [True, False])
def test_main_theorem_and_oddness_route_agree(n, D, corrections):
    main = verify_main_theorem(n, D, corrections)
    odd = verify_oddness_route(n, D, corrections)
    assert main.passed == odd.passed == corrections


def test_oddness_negative_control_has_t_squared_witness():
    r = verify_oddness_route(1, 4, corrections=False)
    assert r.status == "fail"
    assert "t^2" in r.witness["monomial"]


def test_main_theorem_witness_names_even_part():
    r = verify_main_theorem(1, 2, corrections=False)
    assert r.witness == {"mu": "2", "coefficient": "1/2 a b - 1/2 a c"}


def test_simple_corollary():
    assert verify_simple_corollary(4).passed
    assert verify_simple_corollary(2).passed
    assert not verify_simple_corollary(4, corrections=False).passed


def test_corollaries():
    assert verify_corollary_5("big-schur", 2).passed
    r = verify_corollary_5("macdonald", 2, q_order=2)
    assert r.passed
    assert r.params["modulus"] == "q^2"
    with pytest.raises(ValueError):
        verify_corollary_5("schur", 2)


@pytest.mark.parametrize("ident,params", SMOKE, ids=[i for i, _ in SMOKE])
def test_smoke_passes_and_mutation_fails(ident, params):
    assert run_check(IdentityCheck(ident, params)).passed
    r = run_check(IdentityCheck(ident, {**params, "mutate": True}))
    assert r.status == "fail"
    assert r.witness
    assert r.params["mutate"] is True


def test_tampered_registry_gives_one_failure():
    tampered = dict(REGISTRY)
    entry = tampered["sundquist-1"]
    tampered["sundquist-1"] = dataclasses.replace(
        entry, smoke=tuple({**p, "mutate": True} for p in entry.smoke)
    )
    reports = run_suite("smoke", 3, tampered)
    failed = [r for r in reports if not r.passed]
    assert len(failed) == 1
    assert failed[0].id == "sundquist-1"
    assert set(failed[0].witness) == {"point", "lhs", "rhs"}
    assert failed[0].witness["lhs"] != failed[0].witness["rhs"]


BOTH = [
    (i, n)
    for i in registered_ids(REGISTRY)
    if {"symbolic", "randomized"} <= set(REGISTRY[i].engines)
    for n in (1, 2)
    if n <= REGISTRY[i].engine_bounds.get("symbolic", REGISTRY[i].bounds)["n"][1]
]


@pytest.mark.parametrize("ident,n", BOTH)
def test_symbolic_pass_implies_randomized_pass(ident, n):
    sym = check(ident, n=n, engine="symbolic")
    assert sym.passed
    for seed in (0, 1):
        rnd = check(ident, n=n, engine="randomized", trials=8, seed=seed)
        assert rnd.passed
        assert rnd.evaluations >= 8


def test_randomized_is_seeded():
    one = check("sundquist-2", n=2, trials=3, seed=5, mutate=True)
    two = check("sundquist-2", n=2, trials=3, seed=5, mutate=True)
    other = check("sundquist-2", n=2, trials=3, seed=6, mutate=True)
    assert one.witness == two.witness
    assert one.witness != other.witness


def test_parameter_validation():
    with pytest.raises(UnknownIdentityError) as info:
        check("nosuch")
    assert "subs" in str(info.value)
    bad = [
        ("subs", {"n": 9}),
        ("subs", {"n": 1, "degree": 2}),
        ("subs", {"n": 1, "engine": "series"}),
        ("fundamental", {"n": 3, "engine": "symbolic"}),
        ("msf", {"n": 3, "N": 4}),
        ("main-theorem", {"n": 1, "degree": 4}),
        ("subs", {"n": "2"}),
        ("subs", {"n": 1, "seed": "x"}),
    ]
    for ident, params in bad:
        with pytest.raises(ParameterError):
            check(ident, **params)


def test_report_schema_and_determinism():
    r = check("cauchy", n=1)
    d = r.to_dict()
    assert set(d) == {"id", "engine", "params", "status", "witness", "elapsed_ms"}
    assert d["elapsed_ms"] == 0
    assert isinstance(r.to_dict(timing=True)["elapsed_ms"], int)
    text = reports_to_json([r, check("cauchy", n=1)])
    assert json.loads(text)[0] == json.loads(text)[1]
    with pytest.raises(ValueError):
        VerificationReport("x", "symbolic", {}, "fail")
    with pytest.raises(ValueError):
        VerificationReport("x", "symbolic", {}, "maybe")


def test_suite_shape():
    checks = suite_checks("smoke", 0)
    assert len(checks) >= 18
    assert {c.id for c in checks} == set(REGISTRY)
    reports = run_suite("smoke", 1)
    assert all(r.passed for r in reports)
    assert [r.id for r in reports] == sorted(r.id for r in reports)
    with pytest.raises(ValueError):
        suite_checks("medium", 0)


def test_omega_pfaffian_small():
    assert check("omega-pfaffian", n=1, degree=4).passed
    assert not check("omega-pfaffian", n=1, degree=2, mutate=True).passed
