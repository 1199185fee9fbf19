import itertools

import pytest
import sympy

import crequiv


def test_scalar_arithmetic_and_conjugation():
    x = crequiv.Scalar("I*B")
    assert x.conjugate() == -crequiv.Scalar("I*Bbar")
    assert (x * crequiv.Scalar("a")) / crequiv.Scalar("a") == x
    assert str(crequiv.Scalar("a*abar/a")) == "abar"
    with pytest.raises(crequiv.ScalarError):
        crequiv.Scalar("1/b")


def test_leibniz():
    a, b = crequiv.Scalar("A"), crequiv.Scalar("B")
    assert (a * b).derive("L") == a.derive("L") * b + a * b.derive("L")
    assert crequiv.Scalar("a").derive("T").is_zero()


def test_mixed_reordering():
    lhs = crequiv.reorder(["L", "Lb"], "A") - crequiv.reorder(["Lb", "L"], "A")
    assert lhs == -(crequiv.Scalar("I") * crequiv.reorder(["T"], "A"))


def test_jacobi():
    assert crequiv.g7().jacobi_violations() == []
    assert crequiv.n54().jacobi_violations() == []
    assert len(crequiv.g7_printed().jacobi_violations()) == 3


def _sympy_fields():
    z, w1, w2, w3 = sympy.symbols("z w1 w2 w3")
    coords = {"z": z, "w1": w1, "w2": w2, "w3": w3}
    env = dict(coords, I=sympy.I)
    fields = {}
    for name, comps in crequiv.automorphism_fields():
        fields[name] = {c: sympy.sympify(comps.get(c, "0").replace("^", "**"), locals=env) for c in coords}
    return coords, fields


def test_commutator_table_against_sympy():
    coords, fields = _sympy_fields()
    table = crequiv.automorphism_table()
    labels = table.labels

    def bracket(x, y):
        return {
            c: sympy.expand(sum(x[k] * sympy.diff(y[c], coords[k]) - y[k] * sympy.diff(x[c], coords[k]) for k in coords))
            for c in coords
        }

    for p, q in itertools.combinations(labels, 2):
        got = bracket(fields[p], fields[q])
        expected = {c: 0 for c in coords}
        for label, coeff in table.bracket(p, q).items():
            value = sympy.sympify(coeff, locals={"I": sympy.I})
            for c in coords:
                expected[c] += value * fields[label][c]
        for c in coords:
            assert sympy.expand(got[c] - expected[c]) == 0, (p, q, c)


def test_run_verify_model():
    report = crequiv.run("verify-model", checks=["jacobi.n54", "model.rank"])
    assert report["command"] == "verify-model"
    assert report["passed"]
    assert {r["check"] for r in report["results"]} == {"jacobi.n54", "model.rank"}


def test_run_rejects_unknown_check():
    assert "cartan.i" in crequiv.check_names("cartan-check")
    with pytest.raises(crequiv.ConfigError):
        crequiv.run("verify-model", checks=["no.such.check"])
