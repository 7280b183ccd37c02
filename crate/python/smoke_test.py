"""Smoke test for the lagcob extension: python3 python/smoke_test.py"""

from fractions import Fraction

import lagcob


def main():
    w = lagcob.Immersion("whitney", n=2)
    assert (w.domain_dim, w.ambient_dim) == (2, 2)
    pts, color = w.sample(50, seed=1)
    assert len(pts) == len(color) == 50
    assert all(isinstance(z, complex) for p in pts for z in p)
    assert w.sample(50, seed=1) == (pts, color)
    assert w.check_lagrangian(samples=2000)["passed"]
    assert len(w.self_intersections()) == 2

    t = lagcob.NovikovElement.t
    assert (t(1) + t(2)) * t(0.5) == t(1.5) + t(2.5)
    a = lagcob.NovikovElement([(0.3, 2)]) - t(0.3)
    assert a == t(0.3) and a.val() == 0.3
    half = lagcob.NovikovElement([(1.0, Fraction(1, 2))])
    assert half.terms == [(1.0, Fraction(1, 2))]
    assert not (t(0.7) - t(0.7))

    assert lagcob.generators("whitney", n=2) == {"e": 0, "x": 2, "(q-->q+)": -1, "(q+->q-)": 3}
    assert lagcob.chi_si("local-positive", k=0, n=2) == -2
    _, chi = lagcob.handle_generators(0, 2)
    assert chi == -2

    idx = lagcob.index("local-trace", k=0, n=2)
    assert idx["results"]["indices"] == {"q-_to_q+": 1, "q+_to_q-": 1}
    eu = lagcob.euler(scenario="handle", k=2, n=4)["results"]
    assert eu["chi_plus"] == eu["chi_minus"] == eu["chi_bot"] == -2
    fl = lagcob.floer("handle", k=0, n=1, A=1.0, B=0.4)["results"]
    assert fl["status"] == "unobstructed-at-leading-order"
    assert fl["leading"][0]["gen"] == "(q+,1)->(q-,1)"
    assert abs(fl["leading"][0]["exp"] - 0.6) < 1e-12
    assert lagcob.floer("handle", k=0, n=2, A=0.4, B=1.0)["results"]["status"] == "obstructed"

    print("lagcob smoke test: ok")


if __name__ == "__main__":
    main()
