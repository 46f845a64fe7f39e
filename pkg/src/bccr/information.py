"""Entropy and conditional mutual information over dense joints, in bits."""
from __future__ import annotations

import numpy as np

from .distribution import JointTensor
from .errors import BCCRError, VariableError

NEG_TOL = 1e-12


class NegativeInformationError(BCCRError):
    """A mutual information evaluated below ``-NEG_TOL``; indicates an invalid joint."""


def _varset(names) -> tuple[str, ...]:
    if isinstance(names, str):
        names = (names,)
    return tuple(dict.fromkeys(names))


def _check(joint: JointTensor, *sets):
    seen = set()
    for s in sets:
        for v in s:
            joint.axis(v)  # raises VariableError for unknown names
            if v in seen:
                raise VariableError(f"variable {v!r} appears in more than one argument set")
            seen.add(v)


def entropy(joint: JointTensor, a, given=()) -> float:
    """``H(A | C)`` in bits."""
    a, c = _varset(a), _varset(given)
    _check(joint, a, c)
    pac = joint.marginal(c + a)
    pc = pac.sum(axis=tuple(range(len(c), len(c) + len(a))), keepdims=True)
    mask = pac > 0
    ratio = np.where(mask, pac / np.where(pc > 0, pc, 1.0), 1.0)
    return float(-(pac[mask] * np.log2(ratio[mask])).sum())


def cond_mutual_info(joint: JointTensor, a, b, c=(), clamp: bool = True) -> float:
    """``I(A; B | C)`` in bits.

    Evaluates ``sum p(a,b,c) log2[p(a,b,c) p(c) / (p(a,c) p(b,c))]`` with the
    convention ``0 log 0 = 0``. Round-off below zero is clamped once it passes
    the ``-1e-12`` sanity check.
    """
    a, b, c = _varset(a), _varset(b), _varset(c)
    _check(joint, a, b, c)
    if not a or not b:
        return 0.0
    p = joint.marginal(c + a + b)
    nc, na = len(c), len(a)
    a_axes = tuple(range(nc, nc + na))
    b_axes = tuple(range(nc + na, p.ndim))
    p_ac = p.sum(axis=b_axes, keepdims=True)
    p_bc = p.sum(axis=a_axes, keepdims=True)
    p_c = p_ac.sum(axis=a_axes, keepdims=True)
    mask = p > 0
    num = (p * p_c)[mask]
    den = (p_ac * p_bc)[mask]
    value = float((p[mask] * np.log2(num / den)).sum())
    if value < -NEG_TOL:
        raise NegativeInformationError(f"I({a};{b}|{c}) = {value:.3g} < 0")
    return max(value, 0.0) if clamp else value


def mutual_info(joint: JointTensor, a, b) -> float:
    return cond_mutual_info(joint, a, b, ())


def h2(p: float) -> float:
    """Binary entropy function in bits."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))
