"""Linear inequality systems ``sum_v a_v x_v <= c`` with exact integer
coefficients and float constants, projected by Fourier-Motzkin elimination.

Equalities are written as two opposite inequalities. Internally a system is
handled as an ``int64`` coefficient matrix plus a constant vector; every row
carries a bitmask of the input rows it was combined from, used to label the
output. Blow-up is controlled by single-row dominance pruning after each step.
Chernikov's history rule is not applied: combined with dominance pruning it can
discard rows that nothing else implies.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

FEAS_TOL = 1e-9
MAX_HISTORY_ROWS = 64


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coeffs[v] * v) <= constant``; zero coefficients are dropped."""

    coeffs: dict
    constant: float
    label: str = ""
    sources: tuple = field(default=(), compare=False)

    def __post_init__(self):
        coeffs = {}
        for v, a in self.coeffs.items():
            if a != int(a):
                raise ValueError(f"coefficient of {v} must be an integer, got {a}")
            if int(a):
                coeffs[v] = int(a)
        object.__setattr__(self, "coeffs", MappingProxyType(coeffs))
        object.__setattr__(self, "constant", float(self.constant) + 0.0)  # no -0.0

    def __hash__(self):
        return hash((tuple(sorted(self.coeffs.items())), self.constant, self.label))

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    def lhs(self, point) -> float:
        return float(sum(a * point[v] for v, a in self.coeffs.items()))

    def slack(self, point) -> float:
        return self.constant - self.lhs(point)

    def __str__(self):
        if not self.coeffs:
            return f"0 ≤ {self.constant!r}"
        terms = " ".join(f"{a:+d}·{v}" for v, a in self.coeffs.items())
        return f"{terms} ≤ {self.constant!r}"


def ge(coeffs: dict, constant: float, label: str = "") -> LinearConstraint:
    """``sum(coeffs * v) >= constant`` as a ``<=`` row."""
    return LinearConstraint({v: -a for v, a in coeffs.items()}, -constant, label)


def le(coeffs: dict, constant: float, label: str = "") -> LinearConstraint:
    return LinearConstraint(coeffs, constant, label)


def eq(coeffs: dict, constant: float, label: str = "") -> tuple[LinearConstraint, LinearConstraint]:
    return le(coeffs, constant, label + "≤"), ge(coeffs, constant, label + "≥")


@dataclass(frozen=True)
class LinearSystem:
    variables: tuple
    constraints: tuple

    def __post_init__(self):
        variables = tuple(self.variables)
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variables {variables}")
        constraints = tuple(self.constraints)
        known = set(variables)
        for c in constraints:
            extra = set(c.coeffs) - known
            if extra:
                raise ValueError(f"constraint {c} uses undeclared variables {sorted(extra)}")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "constraints", constraints)

    def __len__(self):
        return len(self.constraints)

    def with_constraints(self, extra, variables=()) -> "LinearSystem":
        new_vars = self.variables + tuple(v for v in variables if v not in self.variables)
        return LinearSystem(new_vars, self.constraints + tuple(extra))

    def matrix(self) -> tuple[np.ndarray, np.ndarray]:
        A = np.zeros((len(self.constraints), len(self.variables)), dtype=np.int64)
        b = np.empty(len(self.constraints))
        index = {v: i for i, v in enumerate(self.variables)}
        for r, c in enumerate(self.constraints):
            for v, a in c.coeffs.items():
                A[r, index[v]] = a
            b[r] = c.constant
        return A, b

    def slacks(self, point) -> np.ndarray:
        """Slack of every row at ``point`` (mapping or sequence in variable order)."""
        x = _point_vector(self.variables, point)
        A, b = self.matrix()
        return b - A @ x

    def contains(self, point, tol: float = FEAS_TOL) -> bool:
        return bool((self.slacks(point) >= -tol).all())

    def is_infeasible_trivially(self) -> bool:
        return any(c.is_constant and c.constant < -FEAS_TOL for c in self.constraints)

    def dump(self) -> str:
        lines = ["# variables: " + " ".join(self.variables)]
        for c in self.constraints:
            lines.append(f"{c}  # {c.label}" if c.label else str(c))
        return "\n".join(lines) + "\n"

    def __str__(self):
        return self.dump()


def _point_vector(variables, point) -> np.ndarray:
    if isinstance(point, dict) or hasattr(point, "keys"):
        return np.array([float(point[v]) for v in variables])
    x = np.asarray(point, dtype=float)
    if x.shape != (len(variables),):
        raise ValueError(f"point has shape {x.shape}, expected ({len(variables)},)")
    return x


_TERM = re.compile(r"([+-]\d+)\s*[·*]\s*([A-Za-z_][A-Za-z0-9_]*)")


def parse_system(text: str) -> LinearSystem:
    """Inverse of :meth:`LinearSystem.dump`."""
    variables: list[str] = []
    constraints = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("# variables:"):
            variables = line.split(":", 1)[1].split()
            continue
        if line.startswith("#"):
            continue
        body, _, label = line.partition("  #")
        lhs, sep, rhs = re.split(r"(≤|<=)", body, maxsplit=1)
        if not sep:
            raise ValueError(f"no relation in line {raw!r}")
        lhs = lhs.strip()
        coeffs = {}
        if lhs != "0":
            pos = 0
            for m in _TERM.finditer(lhs):
                if lhs[pos:m.start()].strip():
                    raise ValueError(f"cannot parse {lhs!r}")
                coeffs[m.group(2)] = coeffs.get(m.group(2), 0) + int(m.group(1))
                pos = m.end()
            if lhs[pos:].strip():
                raise ValueError(f"cannot parse {lhs!r}")
        constraints.append(LinearConstraint(coeffs, float(rhs), label.strip()))
    return LinearSystem(tuple(variables), tuple(constraints))


# --------------------------------------------------------------------------
# matrix-form engine


class _Rows:
    """Mutable working form: coefficients, constants, history bitmasks."""

    def __init__(self, variables, A, b, hist, labels, track):
        self.variables = list(variables)
        self.A = A
        self.b = b
        self.hist = hist
        self.labels = labels  # labels of the original rows, indexed by history bit
        self.track = track  # history bitmasks available for labels
        self.infeasible_const = None

    @classmethod
    def from_system(cls, system: LinearSystem):
        A, b = system.matrix()
        m = len(b)
        track = m <= MAX_HISTORY_ROWS
        hist = (np.uint64(1) << np.arange(m, dtype=np.uint64)) if track else np.zeros(m, dtype=np.uint64)
        labels = [c.label or f"row{i}" for i, c in enumerate(system.constraints)]
        rows = cls(system.variables, A, b, hist, labels, track)
        rows.normalize()
        return rows

    def normalize(self):
        """Divide rows by coefficient gcd, settle constant rows, drop duplicates."""
        A, b, hist = self.A, self.b, self.hist
        g = np.gcd.reduce(np.abs(A), axis=1) if A.shape[1] else np.zeros(len(b), dtype=np.int64)
        const = g == 0
        if const.any():
            bad = b[const] < -FEAS_TOL
            if bad.any():
                worst = float(b[const][bad].min())
                if self.infeasible_const is None or worst < self.infeasible_const:
                    self.infeasible_const = worst
        keep = ~const
        A, b, hist, g = A[keep], b[keep], hist[keep], g[keep]
        A = A // g[:, None]
        b = b / g
        if len(b):
            # identical coefficient rows: keep the tightest constant
            order = np.lexsort((b,) + tuple(A[:, j] for j in range(A.shape[1] - 1, -1, -1)))
            A, b, hist = A[order], b[order], hist[order]
            first = np.ones(len(b), dtype=bool)
            first[1:] = (A[1:] != A[:-1]).any(axis=1)
            A, b, hist = A[first], b[first], hist[first]
        self.A, self.b, self.hist = A, b, hist

    def nonneg_mask(self) -> np.ndarray:
        """Variables bounded below by 0 through a single-variable row."""
        A = self.A
        single = (np.count_nonzero(A, axis=1) == 1) & (A.sum(axis=1) == -1) & (self.b <= 0)
        mask = np.zeros(A.shape[1], dtype=bool)
        if single.any():
            mask[np.nonzero(A[single] == -1)[1]] = True
        return mask, single

    def prune_dominated(self):
        """Drop rows implied by a single other row."""
        A, b, hist = self.A, self.b, self.hist
        m = len(b)
        if m < 2:
            return
        nonneg, providers = self.nonneg_mask()
        keep = np.ones(m, dtype=bool)
        block = max(1, 4_000_000 // max(1, m * max(1, A.shape[1])))
        for start in range(0, m, block):
            j = slice(start, min(m, start + block))
            idx = np.arange(start, min(m, start + block))
            d = A[None, :, :] - A[j][:, None, :]  # d[jj, i] = A_i - A_j
            ok = ((d == 0) | ((d > 0) & nonneg[None, None, :])).all(axis=2)
            ok &= b[None, :] <= b[j][:, None]
            # exact twins: only the later copy goes
            twin = (d == 0).all(axis=2) & (b[None, :] == b[j][:, None])
            ok &= ~twin | (np.arange(m)[None, :] < idx[:, None])
            ok[np.arange(len(idx)), idx] = False
            dominated = ok.any(axis=1) & ~providers[j]
            keep[idx[dominated]] = False
        self.A, self.b, self.hist = A[keep], b[keep], hist[keep]

    def choose(self, candidates) -> str:
        best, best_cost = None, None
        for v in candidates:
            col = self.A[:, self.variables.index(v)]
            cost = int((col > 0).sum()) * int((col < 0).sum())
            if best_cost is None or cost < best_cost:
                best, best_cost = v, cost
        return best

    def eliminate(self, var: str, prune: bool = True):
        j = self.variables.index(var)
        A, b, hist = self.A, self.b, self.hist
        col = A[:, j]
        pos, neg, zero = col > 0, col < 0, col == 0
        Ap, An = A[pos], A[neg]
        cp = col[pos][:, None]
        cn = -col[neg][None, :]
        newA = (cn[:, :, None] * Ap[:, None, :] + cp[:, :, None] * An[None, :, :]).reshape(-1, A.shape[1])
        newb = (cn * b[pos][:, None] + cp * b[neg][None, :]).reshape(-1)
        newh = (hist[pos][:, None] | hist[neg][None, :]).reshape(-1)
        A = np.concatenate([A[zero], newA])
        b = np.concatenate([b[zero], newb])
        hist = np.concatenate([hist[zero], newh])
        self.A = np.delete(A, j, axis=1)
        self.b, self.hist = b, hist
        del self.variables[j]
        self.normalize()
        if prune:
            self.prune_dominated()

    def to_system(self) -> LinearSystem:
        constraints = []
        for row, const, h in zip(self.A, self.b, self.hist):
            coeffs = {v: int(a) for v, a in zip(self.variables, row) if a}
            sources = tuple(self.labels[i] for i in range(len(self.labels)) if self.track and (int(h) >> i) & 1)
            constraints.append(LinearConstraint(coeffs, float(const), " + ".join(sources), sources))
        if self.infeasible_const is not None:
            constraints.append(LinearConstraint({}, self.infeasible_const, "infeasible"))
        return LinearSystem(tuple(self.variables), tuple(constraints))


def eliminate_variable(system: LinearSystem, var: str) -> LinearSystem:
    """Project out one variable (Fourier-Motzkin step)."""
    if var not in system.variables:
        raise ValueError(f"{var!r} is not a variable of the system")
    rows = _Rows.from_system(system)
    rows.eliminate(var)
    return rows.to_system()


def project(system: LinearSystem, keep, order=None, prune: bool = True) -> LinearSystem:
    """Eliminate every variable not in ``keep``.

    ``order`` fixes the elimination sequence; by default the variable with the
    fewest positive-times-negative row pairs goes next. The result's variables
    follow the order of ``keep``.
    """
    keep = tuple(keep)
    missing = set(keep) - set(system.variables)
    if missing:
        raise ValueError(f"cannot keep unknown variables {sorted(missing)}")
    rows = _Rows.from_system(system)
    if prune:
        rows.prune_dominated()
    todo = [v for v in system.variables if v not in keep]
    if order is not None:
        if sorted(order) != sorted(todo):
            raise ValueError("order must list exactly the eliminated variables")
        todo = list(order)
        for v in todo:
            rows.eliminate(v, prune)
    else:
        while todo:
            v = rows.choose(todo)
            todo.remove(v)
            rows.eliminate(v, prune)
    if prune:
        rows.prune_dominated()
    out = rows.to_system()
    perm = [out.variables.index(v) for v in keep]
    return LinearSystem(tuple(out.variables[i] for i in perm), out.constraints)


def prune_redundant(system: LinearSystem) -> LinearSystem:
    """Drop duplicate rows, rows that are positive multiples of tighter ones,
    and rows dominated coefficient-wise by a tighter row (using variables
    known to be nonnegative)."""
    rows = _Rows.from_system(system)
    rows.prune_dominated()
    return rows.to_system()


def pin(system: LinearSystem, assignments: dict) -> LinearSystem:
    """Substitute fixed values for some variables."""
    missing = set(assignments) - set(system.variables)
    if missing:
        raise ValueError(f"cannot pin unknown variables {sorted(missing)}")
    constraints = []
    for c in system.constraints:
        shift = sum(a * float(assignments[v]) for v, a in c.coeffs.items() if v in assignments)
        coeffs = {v: a for v, a in c.coeffs.items() if v not in assignments}
        constraints.append(LinearConstraint(coeffs, c.constant - shift, c.label, c.sources))
    variables = tuple(v for v in system.variables if v not in assignments)
    return LinearSystem(variables, tuple(constraints))


def is_feasible(system: LinearSystem) -> bool:
    """Eliminate every variable and test the remaining constant rows."""
    if system.is_infeasible_trivially():
        return False
    out = project(system, ())
    return all(c.constant >= -FEAS_TOL for c in out.constraints)
