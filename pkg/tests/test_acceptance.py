"""Acceptance gate: every exit criterion, exact, with one printed pass/fail
line per criterion (run with -s to see the lines as they happen)."""

import json
import random
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

from liecochain import action_analysis as aa
from liecochain import dsl
from liecochain import lie_cohomology as lc
from liecochain import scalar_field as sf
from liecochain.cli import main

import property_suites as ps
from genutil import random_so3_automorphism, random_solv2_automorphism
from test_dsl import ERROR_CORPUS

FIXTURES = Path(__file__).parent / "fixtures"
FIXTURE_NAMES = ["intro", "solvable", "abelian_shear", "so3", "rotations"]

SO3 = lc.LieAlgebra(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (0, 2): {1: -1}})
SOLV2 = lc.LieAlgebra(2, {(0, 1): {1: -1}})
SO2 = lc.SubgroupSpec.from_vectors([[0, 0, 1]])
O2 = lc.SubgroupSpec.from_vectors([[0, 0, 1]], [[[-1, 0, 0], [0, 1, 0], [0, 0, -1]]])


@contextmanager
def criterion(number, description):
    try:
        yield
    except BaseException:
        print(f"[FAIL] criterion {number}: {description}", flush=True)
        raise
    print(f"[PASS] criterion {number}: {description}", flush=True)


def load(name):
    return dsl.parse((FIXTURES / f"{name}.lch").read_text(), f"{name}.lch")


def test_criterion_1_so3_relative_cohomology():
    with criterion(1, "so(3) relative cohomology dims and representative, < 1 s"):
        started = time.perf_counter()
        assert lc.relative_basis(SO3, SO2, 1) == []
        basis2 = lc.relative_basis(SO3, SO2, 2)
        assert len(basis2) == 1
        rep_coeffs = basis2[0].coeffs
        assert set(rep_coeffs) == {(0, 1)} and rep_coeffs[(0, 1)] != 0
        h2 = lc.relative_cohomology(SO3, SO2, 2)
        assert h2.dimension == 1
        assert set(h2.representatives[0].coeffs) == {(0, 1)}
        assert lc.relative_basis(SO3, O2, 2) == []
        assert lc.relative_cohomology(SO3, O2, 2).dimension == 0
        assert time.perf_counter() - started < 1.0


def test_criterion_2_intro_evaluation_map():
    with criterion(2, "intro example: rho(alpha) = c(x), rho(nu) = A(x)dx, "
                      "cochain condition exact"):
        ws = load("intro")
        action = ws.actions["act"].spec
        chi = ws.chains["chi"]
        alpha, nu = ws.forms["alpha"], ws.forms["nu"]
        res_a = aa.evaluation_map(action, chi, alpha)
        assert res_a.form.degree == 0
        assert sf.equals(res_a.form.coefficient(()), sf.function("c", ("x",)))
        assert res_a.basic
        res_n = aa.evaluation_map(action, chi, nu)
        assert res_n.form.coeffs.keys() == {(0,)}
        assert sf.equals(res_n.form.coefficient((0,)), sf.function("A", ("x",)))
        assert aa.cochain_condition_check(action, chi, alpha).residual.is_zero()
        assert aa.cochain_condition_check(action, chi, nu).residual.is_zero()


def test_criterion_3_solvable_obstruction():
    with criterion(3, "solvable example: H^2 = 0 obstruction, exact stability "
                      "residual, scaling factor 1"):
        ws = load("solvable")
        action = ws.actions["act"].spec
        chi = ws.chains["chi"]
        point = ws.points["P"][1]
        report = aa.obstruction_report(action, [point])
        assert report.verdict == aa.NO_COCHAIN_MAP
        assert report.points[0].cohomology_dim == 0
        ydy = ws.vector_fields["Z1"]
        res = aa.stability_check(action, chi, [ydy])
        assert not res.ok
        assert res.entries[0].residual == chi  # residual exactly K(z) y^2 dx^dy
        lam = aa.scaling_factor(action, chi, ydy, [point])
        assert sf.equals(lam, 1)


def test_criterion_4_shear_cohomology_and_stability():
    with criterion(4, "abelian shear: unobstructed (absolute H^1 has dim 2), "
                      "stability holds for K(y) dx against a(y) dx"):
        ws = load("abelian_shear")
        action = ws.actions["act"].spec
        report = aa.obstruction_report(action, [ws.points["P"][1], ws.points["Q"][1]])
        assert report.verdict == aa.UNOBSTRUCTED
        for p in report.points:
            assert p.cohomology_dim > 0
        absolute = lc.relative_cohomology(lc.LieAlgebra(2), lc.SubgroupSpec.trivial(), 1)
        assert absolute.dimension == 2
        chi = ws.chains["chi"]
        res = aa.stability_check(action, chi, [ws.vector_fields["R"]])
        assert res.ok


@pytest.mark.xfail(strict=True, reason=(
    "dx pairs to 1 with the chain dx but is not invariant under the shear "
    "(L_{y dx} dx = dy != 0); the only invariant 1-forms are b(y) dy, which "
    "pair to 0, so no invariant certificate exists and this evaluation map "
    "is genuinely not surjective"))
def test_criterion_4_shear_surjectivity_certificate():
    with criterion("4s", "abelian shear: surjectivity certificate for dx"):
        ws = load("abelian_shear")
        action = ws.actions["act"].spec
        res = aa.surjectivity_certificate(action, ws.chains["chi1"], ws.forms["alpha"])
        assert res.ok


def test_criterion_5_property_suites():
    with criterion(5, "randomized exact suites, 200 cases each"):
        ps.suite_dd_zero_ce(200)
        ps.suite_dd_zero_chart(200)
        ps.suite_cartan_ce(200)
        ps.suite_cartan_chart(200)
        ps.suite_antiderivation_chart(200)
        ps.suite_antiderivation_ce(200)
        ps.suite_interior_commutator(200)
        ps.suite_jacobi_bracket(200)
        ps.suite_abelian_binomial(200)


def test_criterion_6_conjugation_invariance():
    with criterion(6, "20 random automorphisms each of so(3) and the solvable "
                      "algebra preserve relative dims in every degree"):
        rng = random.Random(2024)
        for _ in range(20):
            auto = random_so3_automorphism(rng)
            for sub in (SO2, O2):
                moved = lc.conjugate_subgroup(SO3, sub, auto)
                for r in range(4):
                    assert len(lc.relative_basis(SO3, sub, r)) == \
                        len(lc.relative_basis(SO3, moved, r))
                    assert lc.relative_cohomology(SO3, sub, r).dimension == \
                        lc.relative_cohomology(SO3, moved, r).dimension
        # span{e1} genuinely moves under inner automorphisms (to span{e1 + b e2})
        solv_sub = lc.SubgroupSpec.from_vectors([[1, 0]])
        for _ in range(20):
            auto = random_solv2_automorphism(rng)
            moved = lc.conjugate_subgroup(SOLV2, solv_sub, auto)
            for r in range(3):
                assert len(lc.relative_basis(SOLV2, solv_sub, r)) == \
                    len(lc.relative_basis(SOLV2, moved, r))
                assert lc.relative_cohomology(SOLV2, solv_sub, r).dimension == \
                    lc.relative_cohomology(SOLV2, moved, r).dimension


def test_criterion_7_integrability():
    with criterion(7, "solvable example: integrability residuals of the "
                      "{y dy, h(z) dz} family are exactly zero"):
        ws = load("solvable")
        action = ws.actions["act"].spec
        chi = ws.chains["chi"]
        point = ws.points["P"][1]
        fields = [ws.vector_fields["Z1"], ws.vector_fields["Z2"]]
        res = aa.integrability_check(action, chi, fields, [point])
        assert res.pairs and res.ok
        for _, _, residual in res.pairs:
            assert residual.is_zero()


def test_criterion_8_dsl_round_trip_and_error_spans():
    with criterion(8, "round trip on all fixtures; 30+ mutated files report "
                      "the correct error line"):
        for name in FIXTURE_NAMES:
            ws = load(name)
            rendered = dsl.render(ws)
            assert dsl.parse(rendered, "<render>") == ws
        assert len(ERROR_CORPUS) >= 30
        for text, exc, line in ERROR_CORPUS:
            with pytest.raises(exc) as info:
                dsl.parse(text, "mutant.lch")
            assert info.value.span.line == line


CLI_RUNS = [
    (0, ["cohomology", "--algebra", "so3", "--subgroup", "so2", "--degree", "2"],
     "so3"),
    (1, ["report", "--action", "act", "--points", "P", "Q"], "solvable"),
    (0, ["report", "--action", "act", "--points", "P", "Q"], "abelian_shear"),
    (0, ["check", "cochain", "--action", "act", "--chain", "chi",
         "--forms", "alpha", "nu", "--points", "P0"], "intro"),
    (1, ["check", "cochain", "--action", "act", "--chain", "chi",
         "--forms", "omega", "--fields", "Z1", "Z2", "--points", "P"], "solvable"),
    (0, ["rho", "--action", "act", "--chain", "chi", "--form", "alpha"], "intro"),
    (1, ["report", "--action", "rot", "--points", "P", "--components", "o2"],
     "rotations"),
]


def test_criterion_9_cli_determinism(capsys):
    with criterion(9, "CLI runs are byte-identical across invocations, with "
                      "the documented exit codes"):
        for expected_code, argv, fixture_name in CLI_RUNS:
            full = argv + ["--input", str(FIXTURES / f"{fixture_name}.lch"),
                           "--format", "json"]
            code1 = main(full)
            out1 = capsys.readouterr().out
            code2 = main(full)
            out2 = capsys.readouterr().out
            assert code1 == code2 == expected_code
            assert out1.encode() == out2.encode()
            json.loads(out1)  # well-formed
