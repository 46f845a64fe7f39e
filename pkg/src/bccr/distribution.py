"""Auxiliary input distributions factored as

    P_Q  P_{W1 U1 X1|Q}  P_{W2 V2 X2|Q}  P_{WB UB VB|W1 U1 W2 V2 Q}  P_{XB|X1 X2 VB UB WB U1 W1 V2 W2 Q}

and the dense joint tensors built from them.

Every factor is stored with its axes in canonical variable order, conditioning
variables first and head variables last; each factor is normalized over its
head axes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType

import numpy as np

from .channel import MAX_CELLS, ChannelSpec, validate_channel
from .errors import DistributionError, ParseError, SizeCapError, StructureError, VariableError

VARIABLES = ("Q", "W1", "U1", "X1", "W2", "V2", "X2", "WB", "UB", "VB", "XB", "Y1", "Y2")
INPUT_VARIABLES = VARIABLES[:11]
CHANNEL_INPUTS = ("X1", "XB", "X2")
AUXILIARIES = ("W1", "U1", "W2", "V2", "WB", "UB", "VB")

# name -> (conditioning variables, head variables), both in canonical order
FACTORS = {
    "Q": ((), ("Q",)),
    "relay1": (("Q",), ("W1", "U1", "X1")),
    "relay2": (("Q",), ("W2", "V2", "X2")),
    "broadcast": (("Q", "W1", "U1", "W2", "V2"), ("WB", "UB", "VB")),
    "xb": (("Q", "W1", "U1", "X1", "W2", "V2", "X2", "WB", "UB", "VB"), ("XB",)),
}

NORM_TOL = 1e-12
JOINT_TOL = 1e-10


def factor_variables(name: str) -> tuple[str, ...]:
    cond, head = FACTORS[name]
    return cond + head


def _canonical(names) -> tuple[str, ...]:
    names = set(names)
    unknown = names - set(VARIABLES)
    if unknown:
        raise VariableError(f"unknown variables {sorted(unknown)}")
    return tuple(v for v in VARIABLES if v in names)


def _conditional(table: np.ndarray, n_head: int) -> np.ndarray:
    """Normalize ``table`` over its trailing ``n_head`` axes.

    Conditioning cells with zero mass get the uniform conditional.
    """
    head_axes = tuple(range(table.ndim - n_head, table.ndim))
    total = table.sum(axis=head_axes, keepdims=True)
    n_cells = int(np.prod(table.shape[table.ndim - n_head:]))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(total > 0, table / np.where(total > 0, total, 1.0), 1.0 / n_cells)
    return out


def _expand(arr: np.ndarray, arr_vars, all_vars) -> np.ndarray:
    """Reshape ``arr`` (axes ``arr_vars`` in the same relative order as
    ``all_vars``) so it broadcasts over ``all_vars``."""
    shape = []
    it = iter(arr.shape)
    present = set(arr_vars)
    for v in all_vars:
        shape.append(next(it) if v in present else 1)
    return arr.reshape(shape)


@dataclass(frozen=True, eq=False)
class JointTensor:
    """Dense joint pmf; ``variables`` names the axes of ``probs`` in order."""

    variables: tuple
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != len(self.variables):
            raise StructureError(f"{len(self.variables)} variables but {probs.ndim} axes")
        if len(set(self.variables)) != len(self.variables):
            raise VariableError(f"duplicate variables in {self.variables}")
        if (probs < 0).any() or abs(probs.sum() - 1.0) > JOINT_TOL:
            raise DistributionError(f"joint must be a pmf (min {probs.min():.3g}, sum {probs.sum():.12g})")
        probs.setflags(write=False)
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "probs", probs)

    @property
    def sizes(self) -> dict:
        return dict(zip(self.variables, self.probs.shape))

    def axis(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise VariableError(f"variable {var!r} not in joint {self.variables}") from None

    def marginal(self, keep) -> np.ndarray:
        """Marginal pmf with axes in the order given by ``keep``."""
        keep = tuple(keep)
        axes = [self.axis(v) for v in keep]
        drop = tuple(i for i in range(self.probs.ndim) if i not in axes)
        m = self.probs.sum(axis=drop) if drop else self.probs
        remaining = [i for i in range(self.probs.ndim) if i in axes]
        return np.transpose(m, [remaining.index(a) for a in axes])

    def marginal_joint(self, keep) -> "JointTensor":
        keep = tuple(keep)
        return JointTensor(keep, self.marginal(keep))


@dataclass(frozen=True, eq=False)
class FactoredDistribution:
    """The five conditional factors over the eleven input-side variables.

    ``sizes`` maps each of Q, W1, U1, X1, W2, V2, X2, WB, UB, VB, XB to its
    alphabet size. ``factors`` maps the names in :data:`FACTORS` to arrays.
    """

    sizes: dict
    factors: dict = field(repr=False)

    def __post_init__(self):
        sizes = {v: int(self.sizes.get(v, 1)) for v in INPUT_VARIABLES}
        if any(n < 1 for n in sizes.values()):
            raise StructureError(f"alphabet sizes must be >= 1: {sizes}")
        if int(np.prod(list(sizes.values()))) > MAX_CELLS:
            raise SizeCapError(f"input joint would have {int(np.prod(list(sizes.values())))} cells")
        factors = {}
        for name in FACTORS:
            if name not in self.factors:
                raise DistributionError(f"missing factor {name!r}")
            arr = np.array(self.factors[name], dtype=float)
            expected = tuple(sizes[v] for v in factor_variables(name))
            if arr.shape != expected:
                raise StructureError(f"factor {name!r} has shape {arr.shape}, expected {expected}")
            if (arr < 0).any():
                raise DistributionError(f"factor {name!r} has negative entries")
            n_head = len(FACTORS[name][1])
            sums = arr.sum(axis=tuple(range(arr.ndim - n_head, arr.ndim)))
            if np.abs(sums - 1.0).max(initial=0.0) > NORM_TOL:
                raise DistributionError(f"factor {name!r} is not normalized (max dev {np.abs(sums - 1).max():.3g})")
            arr.setflags(write=False)
            factors[name] = arr
        object.__setattr__(self, "sizes", MappingProxyType(sizes))
        object.__setattr__(self, "factors", MappingProxyType(factors))

    @classmethod
    def with_xb_function(cls, sizes, pq, relay1, relay2, broadcast, xb_table) -> "FactoredDistribution":
        """Build a distribution whose XB is a deterministic function.

        ``xb_table`` is an integer array indexed by the XB conditioning
        variables (Q, W1, U1, X1, W2, V2, X2, WB, UB, VB) giving the XB symbol.
        """
        table = np.asarray(xb_table, dtype=int)
        n_xb = int(sizes.get("XB", 1))
        xb = (table[..., None] == np.arange(n_xb)).astype(float)
        return cls(sizes, {"Q": pq, "relay1": relay1, "relay2": relay2, "broadcast": broadcast, "xb": xb})

    def aux_joint(self) -> np.ndarray:
        """Joint of (Q, W1, U1, W2, V2, WB, UB, VB), canonical axis order."""
        aux_vars = ("Q", "W1", "U1", "W2", "V2", "WB", "UB", "VB")
        r1 = self.factors["relay1"].sum(axis=3)
        r2 = self.factors["relay2"].sum(axis=3)
        out = _expand(self.factors["Q"], ("Q",), aux_vars)
        out = out * _expand(r1, ("Q", "W1", "U1"), aux_vars)
        out = out * _expand(r2, ("Q", "W2", "V2"), aux_vars)
        return out * self.factors["broadcast"]

    def input_joint(self) -> JointTensor:
        """Joint over the eleven input-side variables."""
        out = np.ones([1] * len(INPUT_VARIABLES))
        for name, arr in self.factors.items():
            out = out * _expand(arr, factor_variables(name), INPUT_VARIABLES)
        return JointTensor(INPUT_VARIABLES, out)

    def to_json(self) -> dict:
        return {
            "sizes": dict(self.sizes),
            "factors": {
                name: {"order": list(factor_variables(name)), "probs": arr.tolist()}
                for name, arr in self.factors.items()
            },
        }


def check_compatible(dist: FactoredDistribution, chan: ChannelSpec) -> None:
    pairs = (("X1", "x1"), ("XB", "xB"), ("X2", "x2"))
    for var, key in pairs:
        if dist.sizes[var] != chan.alphabets[key]:
            raise StructureError(
                f"{var} has {dist.sizes[var]} symbols in the distribution but {chan.alphabets[key]} in the channel"
            )


def build_joint(dist: FactoredDistribution, chan: ChannelSpec) -> JointTensor:
    """Joint pmf over all thirteen variables (inputs then Y1, Y2)."""
    check_compatible(dist, chan)
    report = validate_channel(chan)
    if not report.ok:
        raise DistributionError("invalid channel: " + "; ".join(report.violations[:3]))
    n_cells = int(np.prod(list(dist.sizes.values()))) * chan.alphabets["y1"] * chan.alphabets["y2"]
    if n_cells > MAX_CELLS:
        raise SizeCapError(f"joint would have {n_cells} cells, cap is {MAX_CELLS}")
    inputs = dist.input_joint().probs
    # channel axes (x1, xB, x2, y1, y2) -> canonical (X1, X2, XB, Y1, Y2)
    kernel = np.transpose(chan.kernel, (0, 2, 1, 3, 4))
    kernel = _expand(kernel, ("X1", "X2", "XB", "Y1", "Y2"), VARIABLES)
    probs = inputs[..., None, None] * kernel
    return JointTensor(VARIABLES, probs)


def factors_from_joint(joint: JointTensor) -> dict:
    """Conditionals of the factorization template computed from ``joint``."""
    out = {}
    for name, (cond, head) in FACTORS.items():
        marg = joint.marginal(cond + head)
        out[name] = _conditional(marg, len(head))
    return out


@dataclass(frozen=True)
class FactorizationReport:
    ok: bool
    relay_cmi: float
    total_variation: float
    violations: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def validate_factorization(joint: JointTensor, tol: float = 1e-9) -> FactorizationReport:
    """Check that ``joint`` obeys the conditional independencies of the template.

    Two checks: I(W1,U1,X1; W2,V2,X2 | Q) <= tol, and the product of the
    template conditionals reproduces the joint within ``tol`` total variation.
    """
    from .information import cond_mutual_info

    missing = set(INPUT_VARIABLES) - set(joint.variables)
    if missing:
        raise VariableError(f"joint lacks variables {sorted(missing)}")
    inputs = joint.marginal_joint(INPUT_VARIABLES)
    cmi = cond_mutual_info(inputs, ("W1", "U1", "X1"), ("W2", "V2", "X2"), ("Q",), clamp=False)
    rebuilt = np.ones([1] * len(INPUT_VARIABLES))
    for name, arr in factors_from_joint(inputs).items():
        rebuilt = rebuilt * _expand(arr, factor_variables(name), INPUT_VARIABLES)
    tv = 0.5 * float(np.abs(rebuilt - inputs.probs).sum())
    violations = []
    if cmi > tol:
        violations.append(f"(W1,U1,X1) and (W2,V2,X2) dependent given Q: CMI = {cmi:.3g} bits")
    if tv > tol:
        violations.append(f"joint differs from its factorized rebuild by TV = {tv:.3g}")
    return FactorizationReport(not violations, float(cmi), tv, tuple(violations))


def _dirichlet_factor(rng, cond_shape, head_shape, concentration):
    n_head = int(np.prod(head_shape))
    n_cond = int(np.prod(cond_shape)) if cond_shape else 1
    if n_head == 1:
        return np.ones(tuple(cond_shape) + tuple(head_shape))
    draws = rng.dirichlet(np.full(n_head, concentration), size=n_cond)
    return draws.reshape(tuple(cond_shape) + tuple(head_shape))


def _deterministic_head(rng, factor, n_symbols):
    """Replace the last axis of ``factor`` by a point mass chosen by a random
    function of all other axes, keeping the marginal of the rest."""
    rest = factor.sum(axis=-1)
    choice = rng.integers(0, n_symbols, size=rest.shape)
    onehot = (choice[..., None] == np.arange(n_symbols)).astype(float)
    return rest[..., None] * onehot


def random_distribution(sizes, seed, concentration: float = 1.0, deterministic=()) -> FactoredDistribution:
    """Seeded random distribution with Dirichlet factors.

    ``sizes`` maps variable names to alphabet sizes (missing auxiliaries
    default to 1). ``deterministic`` lists channel inputs among X1, X2, XB that
    are drawn as random deterministic functions of the other variables of
    their factor.
    """
    sizes = {v: int(sizes.get(v, 1)) for v in INPUT_VARIABLES}
    if any(n < 1 for n in sizes.values()):
        raise StructureError(f"sizes must be >= 1: {sizes}")
    if int(np.prod(list(sizes.values()))) > MAX_CELLS:
        raise SizeCapError("requested alphabets exceed the joint size cap")
    bad = set(deterministic) - set(CHANNEL_INPUTS)
    if bad:
        raise VariableError(f"only channel inputs can be deterministic, got {sorted(bad)}")
    rng = np.random.default_rng(np.uint64(seed))
    factors = {}
    for name, (cond, head) in FACTORS.items():
        cond_shape = [sizes[v] for v in cond]
        head_shape = [sizes[v] for v in head]
        arr = _dirichlet_factor(rng, cond_shape, head_shape, concentration)
        x_head = head[-1]
        if x_head in deterministic and sizes[x_head] > 1:
            arr = _deterministic_head(rng, arr, sizes[x_head])
        factors[name] = arr
    return FactoredDistribution(sizes, factors)


def degenerate(dist: FactoredDistribution, variables) -> FactoredDistribution:
    """Collapse auxiliary variables to constants by marginalizing them out.

    Relay and broadcast factors become the exact marginals of the auxiliary
    layer. The XB factor averages over the removed symbols with their
    posterior given the remaining auxiliaries, so the result still fits the
    factorization template. The operation is idempotent and commutes across
    variable sets.
    """
    variables = set(variables)
    bad = variables - set(AUXILIARIES)
    if bad:
        raise VariableError(f"only auxiliaries {AUXILIARIES} can be degenerated, got {sorted(bad)}")
    if not variables:
        return dist

    f = dist.factors
    removed = lambda names: tuple(i for i, v in enumerate(names) if v in variables)

    relay1 = f["relay1"].sum(axis=removed(factor_variables("relay1")), keepdims=True)
    relay2 = f["relay2"].sum(axis=removed(factor_variables("relay2")), keepdims=True)

    aux_vars = ("Q", "W1", "U1", "W2", "V2", "WB", "UB", "VB")
    aux = dist.aux_joint()
    aux_r = aux.sum(axis=removed(aux_vars), keepdims=True)
    broadcast = _conditional(aux_r, 3)

    # posterior of the removed symbols given the kept auxiliaries
    n_removed = int(np.prod([aux.shape[i] for i in removed(aux_vars)]))
    with np.errstate(invalid="ignore", divide="ignore"):
        post = np.where(aux_r > 0, aux / np.where(aux_r > 0, aux_r, 1.0), 1.0 / n_removed)
    xb_vars = factor_variables("xb")
    post = _expand(post, aux_vars, xb_vars)
    xb = (post * f["xb"]).sum(axis=removed(xb_vars), keepdims=True)

    sizes = dict(dist.sizes)
    for v in variables:
        sizes[v] = 1
    # renormalize away float drift from the sums
    factors = {
        "Q": f["Q"],
        "relay1": _conditional(relay1, 3),
        "relay2": _conditional(relay2, 3),
        "broadcast": broadcast,
        "xb": _conditional(xb, 1),
    }
    return FactoredDistribution(sizes, factors)


def distribution_from_json(data, path: str = "<distribution>") -> FactoredDistribution:
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object", path)
    if "sizes" not in data or "factors" not in data:
        raise ParseError("expected keys 'sizes' and 'factors'", path)
    sizes = {v: int(data["sizes"].get(v, 1)) for v in INPUT_VARIABLES}
    factors = {}
    for name in FACTORS:
        where = f"{path}.factors.{name}"
        entry = data["factors"].get(name)
        if entry is None:
            raise ParseError("missing factor", where)
        canonical = factor_variables(name)
        order = tuple(entry.get("order", canonical))
        if sorted(order) != sorted(canonical):
            raise ParseError(f"order must be a permutation of {list(canonical)}", f"{where}.order")
        try:
            arr = np.array(entry["probs"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad probs ({exc})", f"{where}.probs") from None
        if arr.ndim != len(order):
            raise ParseError(f"probs has {arr.ndim} axes, order names {len(order)}", f"{where}.probs")
        factors[name] = np.transpose(arr, [order.index(v) for v in canonical])
    try:
        return FactoredDistribution(sizes, factors)
    except (StructureError, DistributionError) as exc:
        raise ParseError(str(exc), path) from None


def load_distribution(path) -> FactoredDistribution:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", str(path)) from None
    return distribution_from_json(data, str(path))
