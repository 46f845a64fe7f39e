"""Independent reference computations for the test-suite.

Nothing here imports the information or elimination code under test: joints
are multiplied cell by cell in nested loops, informations go through
dictionary entropies, regions are probed with an external LP solver, and exact
checks use rational Fourier-Motzkin.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

ORDER = ("Q", "W1", "U1", "X1", "W2", "V2", "X2", "WB", "UB", "VB", "XB", "Y1", "Y2")


# ---------------------------------------------------------------- joints


def loop_joint(dist, chan) -> dict:
    """``{13-tuple: p}`` built by multiplying factor entries cell by cell."""
    s = dist.sizes
    f = dist.factors
    k = chan.kernel
    out = {}
    ranges = [range(s[v]) for v in ORDER[:11]] + [range(chan.alphabets["y1"]), range(chan.alphabets["y2"])]
    for cell in itertools.product(*ranges):
        q, w1, u1, x1, w2, v2, x2, wb, ub, vb, xb, y1, y2 = cell
        p = (
            f["Q"][q]
            * f["relay1"][q, w1, u1, x1]
            * f["relay2"][q, w2, v2, x2]
            * f["broadcast"][q, w1, u1, w2, v2, wb, ub, vb]
            * f["xb"][q, w1, u1, x1, w2, v2, x2, wb, ub, vb, xb]
            * k[x1, xb, x2, y1, y2]
        )
        if p > 0:
            out[cell] = p
    return out


def marginal(pmf: dict, names, keep) -> dict:
    idx = [names.index(v) for v in keep]
    out = defaultdict(float)
    for cell, p in pmf.items():
        out[tuple(cell[i] for i in idx)] += p
    return out


def dict_entropy(pmf: dict, names, keep) -> float:
    if not keep:
        return 0.0
    return -sum(p * math.log2(p) for p in marginal(pmf, names, keep).values() if p > 0)


def dict_cmi(pmf: dict, names, a, b, c=()) -> float:
    """``H(AC) + H(BC) - H(ABC) - H(C)``."""
    a, b, c = list(a), list(b), list(c)
    return (
        dict_entropy(pmf, names, a + c)
        + dict_entropy(pmf, names, b + c)
        - dict_entropy(pmf, names, a + b + c)
        - dict_entropy(pmf, names, c)
    )


# the 20 information terms, written out again rather than imported
PROFILE_TERMS = [
    (("U1", "V2"), ("WB",), ("W1", "W2", "Q")),
    (("V2",), ("UB",), ("U1", "W1", "W2", "WB", "Q")),
    (("U1",), ("VB",), ("V2", "W1", "W2", "WB", "Q")),
    (("UB",), ("VB",), ("U1", "V2", "W1", "W2", "WB", "Q")),
    (("U1",), ("WB",), ("W1", "W2", "Q")),
    (("V2",), ("WB",), ("W1", "W2", "Q")),
    (("U1", "UB"), ("Y1",), ("W1", "W2", "WB", "Q")),
    (("WB", "UB"), ("Y1",), ("W1", "W2", "U1", "Q")),
    (("W2", "WB", "UB"), ("Y1",), ("W1", "U1", "Q")),
    (("U1", "WB", "UB"), ("Y1",), ("W1", "W2", "Q")),
    (("U1", "W2", "WB", "UB"), ("Y1",), ("W1", "Q")),
    (("W1", "U1", "WB", "UB"), ("Y1",), ("W2", "Q")),
    (("W1", "U1", "W2", "WB", "UB"), ("Y1",), ("Q",)),
    (("V2", "VB"), ("Y2",), ("W1", "W2", "WB", "Q")),
    (("WB", "VB"), ("Y2",), ("W1", "W2", "V2", "Q")),
    (("W1", "WB", "VB"), ("Y2",), ("W2", "V2", "Q")),
    (("V2", "WB", "VB"), ("Y2",), ("W1", "W2", "Q")),
    (("W1", "V2", "WB", "VB"), ("Y2",), ("W2", "Q")),
    (("W2", "V2", "WB", "VB"), ("Y2",), ("W1", "Q")),
    (("W1", "V2", "W2", "WB", "VB"), ("Y2",), ("Q",)),
]


def profile_vector(dist, chan) -> np.ndarray:
    pmf = loop_joint(dist, chan)
    return np.array([dict_cmi(pmf, ORDER, a, b, c) for a, b, c in PROFILE_TERMS])


# ---------------------------------------------------------------- Han-Kobayashi

HK_VARS = ("R10", "R11", "R20", "R22")


def hk_constants(dist, chan) -> dict:
    """Receiver-side constants of the HK region with non-unique decoding of
    the other user's common part, from the (Q, W1, U1, W2, V2, Y1, Y2) joint."""
    pmf = loop_joint(dist, chan)
    names = ("Q", "W1", "U1", "W2", "V2", "Y1", "Y2")
    pmf = marginal(pmf, ORDER, names)
    cmi = lambda a, b, c: dict_cmi(pmf, names, a, b, c)
    return {
        "A1": cmi(("U1",), ("Y1",), ("W1", "W2", "Q")),
        "B1": cmi(("U1", "W2"), ("Y1",), ("W1", "Q")),
        "C1": cmi(("W1", "U1"), ("Y1",), ("W2", "Q")),
        "D1": cmi(("W1", "U1", "W2"), ("Y1",), ("Q",)),
        "A2": cmi(("V2",), ("Y2",), ("W1", "W2", "Q")),
        "B2": cmi(("V2", "W1"), ("Y2",), ("W2", "Q")),
        "C2": cmi(("W2", "V2"), ("Y2",), ("W1", "Q")),
        "D2": cmi(("W2", "V2", "W1"), ("Y2",), ("Q",)),
    }


def hk_matrix(k: dict):
    """``A x <= b`` over (R10, R11, R20, R22, R1, R2) including the coupling."""
    rows = [
        ({"R11": 1}, k["A1"]),
        ({"R11": 1, "R20": 1}, k["B1"]),
        ({"R10": 1, "R11": 1}, k["C1"]),
        ({"R10": 1, "R11": 1, "R20": 1}, k["D1"]),
        ({"R22": 1}, k["A2"]),
        ({"R22": 1, "R10": 1}, k["B2"]),
        ({"R20": 1, "R22": 1}, k["C2"]),
        ({"R20": 1, "R22": 1, "R10": 1}, k["D2"]),
    ]
    names = HK_VARS + ("R1", "R2")
    A = [[r.get(v, 0) for v in names] for r, _ in rows]
    b = [c for _, c in rows]
    for i in range(4):
        e = [0] * 6
        e[i] = -1
        A.append(e)
        b.append(0.0)
    eq = [[1, 1, 0, 0, -1, 0], [0, 0, 1, 1, 0, -1]]
    return np.array(A, float), np.array(b), np.array(eq, float), np.zeros(2)


# ---------------------------------------------------------------- LP probes

LP_OPTS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def lp(c, A, b, A_eq=None, b_eq=None):
    return linprog(c, A_ub=A, b_ub=b, A_eq=A_eq, b_eq=b_eq, bounds=(None, None), method="highs", options=LP_OPTS)


def support(A, b, direction, A_eq=None, b_eq=None, index=None):
    """``max <direction, x[index]>``; ``None`` when empty, ``inf`` when unbounded."""
    n = A.shape[1]
    c = np.zeros(n)
    index = list(range(len(direction))) if index is None else index
    c[index] = -np.asarray(direction, float)
    res = lp(c, A, b, A_eq, b_eq)
    if res.status == 2:
        return None
    if res.status == 3:
        return math.inf
    assert res.status == 0, res.message
    return -res.fun


def interval(A, b, fixed: dict, target: int):
    """Range of ``x[target]`` with the coordinates in ``fixed`` pinned.

    Returns ``None`` if the pinned system is infeasible.
    """
    n = A.shape[1]
    A_eq = np.zeros((len(fixed), n))
    b_eq = np.zeros(len(fixed))
    for r, (i, v) in enumerate(fixed.items()):
        A_eq[r, i] = 1.0
        b_eq[r] = v
    c = np.zeros(n)
    c[target] = 1.0
    lo = lp(c, A, b, A_eq, b_eq)
    if lo.status == 2:
        return None
    hi = lp(-c, A, b, A_eq, b_eq)
    return lo.fun, -hi.fun


def lp_feasible(A, b, fixed: dict) -> bool:
    n = A.shape[1]
    A_eq = np.zeros((len(fixed), n))
    b_eq = np.zeros(len(fixed))
    for r, (i, v) in enumerate(fixed.items()):
        A_eq[r, i] = 1.0
        b_eq[r] = v
    return lp(np.zeros(n), A, b, A_eq, b_eq).status == 0


# ---------------------------------------------------------------- exact checks


def _exact_rows(rows) -> dict:
    """``{coeff tuple: constant}`` with each row scaled so its first nonzero
    coefficient is +-1, keeping the tightest constant per coefficient vector."""
    out = {}
    for c, b in rows:
        items = tuple(sorted((v, Fraction(a)) for v, a in dict(c).items() if a))
        b = Fraction(b)
        if items:
            scale = abs(items[0][1])
            items = tuple((v, a / scale) for v, a in items)
            b = b / scale
        if items not in out or b < out[items]:
            out[items] = b
    return out


def _exact_prune(rows: dict) -> dict:
    """Drop rows implied by one other row, using the ``v >= 0`` rows present."""
    nonneg = {c[0][0] for c, b in rows.items() if len(c) == 1 and c[0][1] < 0 and b <= 0}
    items = [(dict(c), b, c) for c, b in rows.items()]
    out = {}
    for j, (cj, bj, key) in enumerate(items):
        if len(key) == 1 and key[0][0] in nonneg and key[0][1] < 0 and bj <= 0:
            out[key] = bj
            continue
        implied = False
        for i, (ci, bi, _) in enumerate(items):
            if i == j or bi > bj:
                continue
            names = set(ci) | set(cj)
            if all(ci.get(v, 0) == cj.get(v, 0) or (ci.get(v, 0) > cj.get(v, 0) and v in nonneg) for v in names):
                implied = True
                break
        if not implied:
            out[key] = bj
    return out


def exact_feasible(rows) -> bool:
    """Rational Fourier-Motzkin on ``[(coeffs: dict, constant)]`` rows ``a.x <= b``."""
    rows = _exact_prune(_exact_rows(rows))
    while True:
        if rows.get((), 0) < 0:
            return False
        variables = sorted({v for c in rows for v, _ in c})
        if not variables:
            return True
        cost = {}
        for v in variables:
            col = [dict(c).get(v, 0) for c in rows]
            cost[v] = sum(a > 0 for a in col) * sum(a < 0 for a in col)
        var = min(variables, key=lambda v: (cost[v], v))
        pos, neg, rest = [], [], []
        for c, b in rows.items():
            d = dict(c)
            a = d.get(var, 0)
            (pos if a > 0 else neg if a < 0 else rest).append((d, b))
        for cp, bp in pos:
            for cn, bn in neg:
                ap, an = cp[var], -cn[var]
                new = defaultdict(Fraction)
                for v, a in cp.items():
                    new[v] += a * an
                for v, a in cn.items():
                    new[v] += a * ap
                new.pop(var, None)
                rest.append((new, bp * an + bn * ap))
        rows = _exact_prune(_exact_rows(rest))


def interval_nonempty(lower, upper) -> bool:
    """1-D elimination oracle: is ``max(lower) <= min(upper)``?"""
    return (max(lower) if lower else -math.inf) <= (min(upper) if upper else math.inf)
