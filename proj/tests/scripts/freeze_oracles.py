"""Exact-arithmetic reference values frozen into the C++ unit tests.

Everything here uses fractions and label sets, sharing no code with the
library. Run it to regenerate the constants in tests/frozen.hpp.
"""

from fractions import Fraction as F
from itertools import product

THETA = frozenset("ABC")


def combine(*bpas):
    """Unnormalized joint combination, then normalization."""
    joint = {}
    for picks in product(*(b.items() for b in bpas)):
        s = THETA
        m = F(1)
        for focal, mass in picks:
            s = s & focal
            m *= mass
        joint[s] = joint.get(s, F(0)) + m
    conflict = joint.pop(frozenset(), F(0))
    return {k: v / (1 - conflict) for k, v in joint.items()}, conflict


def metalevel(against, positive=None, own=None):
    """Bel/Pls of every singleton position after combining simple support
    functions against each position (and optionally one for `own`)."""
    n = len(against)
    frame = frozenset(range(n))
    items = []
    for j, a in enumerate(against):
        items.append({frame - {j}: a, frame: 1 - a})
    if positive is not None:
        items.append({frozenset([own]): positive, frame: 1 - positive})
    joint = {}
    for picks in product(*(i.items() for i in items)):
        s = frame
        m = F(1)
        for focal, mass in picks:
            s = s & focal
            m *= mass
        joint[s] = joint.get(s, F(0)) + m
    k = joint.pop(frozenset(), F(0))
    norm = {s: v / (1 - k) for s, v in joint.items()}
    bel = [sum(v for s, v in norm.items() if s <= {j}) for j in range(n)]
    pls = [sum(v for s, v in norm.items() if j in s) for j in range(n)]
    return bel, pls


def credibility(bel, pls, own):
    K = sum(pls)
    out = [(1 - bel[own]) * p * p / K for p in pls]
    out[own] += bel[own]
    return out


def show(name, value):
    print(f"{name} = {float(value)!r}")


A, B = frozenset("A"), frozenset("B")
m1 = {A: F(6, 10), THETA: F(4, 10)}
m2 = {B: F(5, 10), THETA: F(5, 10)}
m3 = {A: F(5, 10), THETA: F(5, 10)}

c, k = combine(m1, m2)
show("pair_conflict", k)
show("pair_A", c[A]); show("pair_B", c[B]); show("pair_theta", c[THETA])

c, k = combine(m1, m2, m3)
show("triple_conflict", k)
show("triple_A", c[A]); show("triple_B", c[B]); show("triple_theta", c[THETA])

show("mcf_example", 1 - F(8, 10) * F(9, 10) * F(7, 10))

a = [F(2, 10), F(5, 10), F(9, 10)]
bel, pls = metalevel(a)
for j in range(3):
    show(f"meta_bel_{j}", bel[j]); show(f"meta_pls_{j}", pls[j])
alpha = credibility(bel, pls, 0)
for j in range(3):
    show(f"meta_alpha_own0_{j}", alpha[j])

pls_closed = [(1 - x) / (1 - a[0] * a[1] * a[2]) for x in a]
alpha_zero_bel = credibility([F(0)] * 3, pls_closed, 0)
show("alpha_zero_bel_0", alpha_zero_bel[0])
show("closed_K", sum(pls_closed))

# Singleton own subset with positive domain mass 0.25 at position 0.
bel, pls = metalevel([F(0), F(3, 10), F(6, 10)], positive=F(1, 4), own=0)
for j in range(3):
    show(f"pos_bel_{j}", bel[j]); show(f"pos_pls_{j}", pls[j])

show("threshold_example", (F(9, 10) - F(3, 10)) / (1 - F(3, 10)))
