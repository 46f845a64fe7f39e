"""Mutual-information profile and rate-region systems for the BCCR scheme.

Two variants are assembled from a :class:`MutualInfoProfile`:

``cm``
    with common message, over (R0, R10, R11, R20, R22, B0, B1, B2):
    8 nonnegativity rows, 4 bin lower bounds, 7 + 7 decoding bounds.
``nocm``
    without common message: R0 removed together with the receiver bounds
    numbered 2 and 3 on each side (7 + 4 + 5 + 5 rows).

Strict inequalities are closed. Sub-message rates are coupled to the message
rates through ``R1 = R10 + R11`` and ``R2 = R20 + R22``, added by
:func:`with_rate_sums` when a system is projected to rate space.
"""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, fields

import numpy as np

from . import linear_systems as ls
from .channel import ChannelSpec
from .distribution import (
    FactoredDistribution,
    JointTensor,
    build_joint,
    degenerate,
    random_distribution,
)
from .information import cond_mutual_info
from .linear_systems import LinearConstraint, LinearSystem

VARIANTS = ("cm", "nocm")
CM_VARIABLES = ("R0", "R10", "R11", "R20", "R22", "B0", "B1", "B2")
NOCM_VARIABLES = CM_VARIABLES[1:]
RATE_KEEP = {"cm": ("R0", "R1", "R2"), "nocm": ("R1", "R2")}

# (A, B, C) of I(A; B | C) for the scalar terms
BIN_TERMS = {
    "eta0": (("U1", "V2"), ("WB",), ("W1", "W2", "Q")),
    "eta1": (("V2",), ("UB",), ("U1", "W1", "W2", "WB", "Q")),
    "eta2": (("U1",), ("VB",), ("V2", "W1", "W2", "WB", "Q")),
    "eta12": (("UB",), ("VB",), ("U1", "V2", "W1", "W2", "WB", "Q")),
    "theta1": (("U1",), ("WB",), ("W1", "W2", "Q")),
    "theta2": (("V2",), ("WB",), ("W1", "W2", "Q")),
}

# decoding terms k = 1..7: (decoded set A, conditioning C) of I(A; Y | C)
Y1_TERMS = (
    (("U1", "UB"), ("W1", "W2", "WB", "Q")),
    (("WB", "UB"), ("W1", "W2", "U1", "Q")),
    (("W2", "WB", "UB"), ("W1", "U1", "Q")),
    (("U1", "WB", "UB"), ("W1", "W2", "Q")),
    (("U1", "W2", "WB", "UB"), ("W1", "Q")),
    (("W1", "U1", "WB", "UB"), ("W2", "Q")),
    (("W1", "U1", "W2", "WB", "UB"), ("Q",)),
)
Y2_TERMS = (
    (("V2", "VB"), ("W1", "W2", "WB", "Q")),
    (("WB", "VB"), ("W1", "W2", "V2", "Q")),
    (("W1", "WB", "VB"), ("W2", "V2", "Q")),
    (("V2", "WB", "VB"), ("W1", "W2", "Q")),
    (("W1", "V2", "WB", "VB"), ("W2", "Q")),
    (("W2", "V2", "WB", "VB"), ("W1", "Q")),
    (("W1", "V2", "W2", "WB", "VB"), ("Q",)),
)

# left-hand sides of the decoding bounds, k = 1..7
Y1_ROWS = (
    ("R11", "B1"),
    ("R0", "B0", "B1"),
    ("R20", "R0", "B0", "B1"),
    ("R0", "B0", "R11", "B1"),
    ("R20", "R0", "B0", "R11", "B1"),
    ("R10", "R0", "B0", "R11", "B1"),
    ("R10", "R20", "R0", "B0", "R11", "B1"),
)
Y2_ROWS = (
    ("R22", "B2"),
    ("R0", "B0", "B2"),
    ("R10", "R0", "B0", "B2"),
    ("R0", "B0", "R22", "B2"),
    ("R10", "R0", "B0", "R22", "B2"),
    ("R20", "R0", "B0", "R22", "B2"),
    ("R10", "R20", "R0", "B0", "R22", "B2"),
)
NOCM_DROPPED = (2, 3)


@dataclass(frozen=True)
class MutualInfoProfile:
    """All scalar information terms of the region, in bits."""

    eta0: float
    eta1: float
    eta2: float
    eta12: float
    theta1: float
    theta2: float
    iy1: tuple
    iy2: tuple

    def __post_init__(self):
        object.__setattr__(self, "iy1", tuple(float(x) for x in self.iy1))
        object.__setattr__(self, "iy2", tuple(float(x) for x in self.iy2))
        if len(self.iy1) != 7 or len(self.iy2) != 7:
            raise ValueError("iy1 and iy2 need exactly 7 terms")
        if min(self.as_vector()) < 0:
            raise ValueError("profile terms must be nonnegative")

    SCALARS = ("eta0", "eta1", "eta2", "eta12", "theta1", "theta2")

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, k) for k in self.SCALARS] + list(self.iy1) + list(self.iy2))

    @classmethod
    def from_vector(cls, vec) -> "MutualInfoProfile":
        vec = [float(x) for x in vec]
        if len(vec) != 20:
            raise ValueError("a profile vector has 20 entries")
        return cls(*vec[:6], tuple(vec[6:13]), tuple(vec[13:20]))

    @classmethod
    def zero(cls) -> "MutualInfoProfile":
        return cls.from_vector([0.0] * 20)

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in self.SCALARS}
        out["iy1"] = list(self.iy1)
        out["iy2"] = list(self.iy2)
        return out

    @classmethod
    def from_json(cls, data) -> "MutualInfoProfile":
        return cls(*(float(data[k]) for k in cls.SCALARS), tuple(data["iy1"]), tuple(data["iy2"]))

    def rate_bound(self) -> float:
        """Upper bound on any single rate admitted by either variant."""
        return float(max(max(self.iy1) + self.theta1, max(self.iy2) + self.theta2))


def profile_from_joint(joint: JointTensor) -> MutualInfoProfile:
    scalars = [cond_mutual_info(joint, *BIN_TERMS[k]) for k in MutualInfoProfile.SCALARS]
    iy1 = tuple(cond_mutual_info(joint, a, ("Y1",), c) for a, c in Y1_TERMS)
    iy2 = tuple(cond_mutual_info(joint, a, ("Y2",), c) for a, c in Y2_TERMS)
    return MutualInfoProfile(*scalars, iy1, iy2)


def compute_profile(dist: FactoredDistribution, chan: ChannelSpec) -> MutualInfoProfile:
    return profile_from_joint(build_joint(dist, chan))


# --------------------------------------------------------------------------
# systems


def _bin_rows(p: MutualInfoProfile) -> list[LinearConstraint]:
    return [
        ls.ge({"B0": 1}, p.eta0, "bin B0"),
        ls.ge({"B0": 1, "B1": 1}, p.eta0 + p.eta1, "bin B0+B1"),
        ls.ge({"B0": 1, "B2": 1}, p.eta0 + p.eta2, "bin B0+B2"),
        ls.ge({"B0": 1, "B1": 1, "B2": 1}, p.eta0 + p.eta1 + p.eta2 + p.eta12, "bin B0+B1+B2"),
    ]


def _decoding_rows(p: MutualInfoProfile, drop=(), common=True) -> list[LinearConstraint]:
    rows = []
    for name, lhs_rows, terms, theta in (("Y1", Y1_ROWS, p.iy1, p.theta1), ("Y2", Y2_ROWS, p.iy2, p.theta2)):
        for k, (lhs, value) in enumerate(zip(lhs_rows, terms), start=1):
            if k in drop:
                continue
            coeffs = {v: 1 for v in lhs if common or v != "R0"}
            rows.append(ls.le(coeffs, value + theta, f"{name}-{k}"))
    return rows


def build_system_cm(profile: MutualInfoProfile) -> LinearSystem:
    """The 26-row system of the region with common message."""
    rows = [ls.ge({v: 1}, 0.0, f"nonneg {v}") for v in CM_VARIABLES]
    rows += _bin_rows(profile) + _decoding_rows(profile)
    return LinearSystem(CM_VARIABLES, tuple(rows))


def build_system_nocm(profile: MutualInfoProfile) -> LinearSystem:
    """The 21-row system without common message (R0 and rows 2, 3 dropped)."""
    rows = [ls.ge({v: 1}, 0.0, f"nonneg {v}") for v in NOCM_VARIABLES]
    rows += _bin_rows(profile) + _decoding_rows(profile, drop=NOCM_DROPPED, common=False)
    return LinearSystem(NOCM_VARIABLES, tuple(rows))


def build_system(profile: MutualInfoProfile, variant: str) -> LinearSystem:
    if variant == "cm":
        return build_system_cm(profile)
    if variant == "nocm":
        return build_system_nocm(profile)
    raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def with_rate_sums(system: LinearSystem) -> LinearSystem:
    """Add R1, R2 and the equalities tying them to the sub-message rates."""
    if "R1" in system.variables and "R2" in system.variables:
        return system
    rows = ls.eq({"R1": 1, "R10": -1, "R11": -1}, 0.0, "R1=R10+R11") + ls.eq(
        {"R2": 1, "R20": -1, "R22": -1}, 0.0, "R2=R20+R22"
    )
    return system.with_constraints(rows, ("R1", "R2"))


def project_to_rates(system: LinearSystem, keep=None) -> LinearSystem:
    """Eliminate sub-message and bin rates, leaving ``keep`` (default: R0 if
    present, then R1, R2)."""
    system = with_rate_sums(system)
    if keep is None:
        keep = ("R0", "R1", "R2") if "R0" in system.variables else ("R1", "R2")
    return ls.prune_redundant(ls.project(system, keep))


def _point_dict(point, variant: str) -> dict:
    if isinstance(point, RatePoint):
        point = point.as_tuple(variant)
    if hasattr(point, "keys"):
        return {k: float(point[k]) for k in RATE_KEEP[variant]}
    values = [float(x) for x in point]
    if variant == "nocm" and len(values) == 3:
        if abs(values[0]) > 0:
            raise ValueError("the no-common-message region has R0 = 0")
        values = values[1:]
    keys = RATE_KEEP[variant]
    if len(values) != len(keys):
        raise ValueError(f"expected {len(keys)} coordinates for variant {variant}")
    return dict(zip(keys, values))


@dataclass(frozen=True)
class RatePoint:
    r1: float
    r2: float
    r0: float | None = None

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None and value < 0:
                raise ValueError(f"{f.name} must be nonnegative")

    def as_tuple(self, variant: str) -> tuple:
        if variant == "cm":
            return (self.r0 or 0.0, self.r1, self.r2)
        return (self.r1, self.r2)


def membership(point, profile: MutualInfoProfile, variant: str = "cm") -> bool:
    """Whether the rate point lies in the (closed) region of ``profile``.

    Pins the rates in the unprojected system and runs the feasibility test.
    """
    rates = _point_dict(point, variant)
    if min(rates.values()) < 0:
        raise ValueError("rates must be nonnegative")
    system = with_rate_sums(build_system(profile, variant))
    return ls.is_feasible(ls.pin(system, rates))


# --------------------------------------------------------------------------
# reductions


def hk_reduction(dist: FactoredDistribution, chan: ChannelSpec) -> LinearSystem:
    """Region with WB, UB, VB constant and no common message, in (R1, R2)."""
    reduced = degenerate(dist, {"WB", "UB", "VB"})
    profile = compute_profile(reduced, chan)
    return project_to_rates(build_system_nocm(profile), ("R1", "R2"))


def jiang_reduction(dist: FactoredDistribution, chan: ChannelSpec) -> LinearSystem:
    """No-common-message region with WB constant and B0 pinned to 0, in (R1, R2)."""
    reduced = degenerate(dist, {"WB"})
    profile = compute_profile(reduced, chan)
    system = ls.pin(build_system_nocm(profile), {"B0": 0.0})
    return project_to_rates(system, ("R1", "R2"))


MARTON_TOL = 1e-9


def marton_reduction(dist: FactoredDistribution, chan: ChannelSpec) -> LinearSystem:
    """Common-message region with W1, U1, W2, V2 constant, in (R0, R1, R2)."""
    reduced = degenerate(dist, {"W1", "U1", "W2", "V2"})
    profile = compute_profile(reduced, chan)
    for name in ("eta0", "theta1", "theta2"):
        value = getattr(profile, name)
        if value > MARTON_TOL:
            raise AssertionError(f"{name} = {value} after removing W1, U1, W2, V2")
    return project_to_rates(build_system_cm(profile), ("R0", "R1", "R2"))


# --------------------------------------------------------------------------
# geometry of projected regions


def vertices(system: LinearSystem, tol: float = 1e-9) -> np.ndarray:
    """Vertices of a bounded projected region, one per row, in variable order.

    Empty array when the region is empty. Brute force over row subsets, which
    is fine for the low-dimensional rate spaces used here.
    """
    d = len(system.variables)
    A, b = system.matrix()
    if (np.all(A == 0, axis=1) & (b < -tol)).any():
        return np.empty((0, d))
    keep = ~np.all(A == 0, axis=1)
    A, b = A[keep].astype(float), b[keep]
    if d == 0:
        return np.empty((1, 0))
    combos = np.array(list(itertools.combinations(range(len(b)), d)), dtype=int)
    if not len(combos):
        return np.empty((0, d))
    M = A[combos]
    rhs = b[combos]
    det = np.linalg.det(M)
    ok = np.abs(det) > 1e-12
    if not ok.any():
        return np.empty((0, d))
    pts = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
    feasible = (A @ pts.T <= b[:, None] + tol).all(axis=0)
    pts = pts[feasible]
    if not len(pts):
        return pts
    pts = np.round(pts, 12)
    return np.unique(pts, axis=0)


def pareto_filter(points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Indices of points not weakly dominated by another point (ties keep the first)."""
    points = np.asarray(points, dtype=float)
    n = len(points)
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        if not keep[i]:
            continue
        ge_all = (points >= points[i] - tol).all(axis=1)
        strictly = (points > points[i] + tol).any(axis=1)
        dominated_by = ge_all & (strictly | (np.arange(n) < i)) & keep
        dominated_by[i] = False
        if dominated_by.any():
            keep[i] = False
    return np.nonzero(keep)[0]


def lattice_axes(upper: float, step: float, dims: int) -> list[np.ndarray]:
    n = int(np.floor(upper / step + 1e-9)) + 1
    axis = np.arange(n) * step
    return [axis] * dims


def lattice_membership(system: LinearSystem, axes, band: float = 1e-6):
    """Evaluate a rate-space system on a lattice.

    Returns ``(points, inside, in_band)`` where ``in_band`` flags points whose
    worst slack is within ``band`` of zero.
    """
    grids = np.meshgrid(*axes, indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)
    A, b = system.matrix()
    worst = (points @ A.T.astype(float) - b[None, :]).max(axis=1) if len(b) else np.full(len(points), -np.inf)
    return points, worst <= band, np.abs(worst) <= band


# --------------------------------------------------------------------------
# boundary sampling


@dataclass(frozen=True)
class BoundaryPoint:
    rates: tuple
    index: int
    seed: int


_CONCENTRATIONS = (0.2, 1.0, 5.0, 50.0)


def boundary_sample(sizes: dict, seed: int, protect=()) -> FactoredDistribution:
    """One draw of the structured family used for boundary tracing.

    Mixes Dirichlet factors of varying concentration, deterministic channel
    inputs and randomly collapsed auxiliaries, so near-extreme distributions
    are reached with a modest budget.
    """
    rng = np.random.default_rng(np.uint64(seed))
    concentration = float(rng.choice(_CONCENTRATIONS))
    deterministic = tuple(x for x in ("X1", "X2", "XB") if rng.random() < 0.5)
    collapse = {v for v in ("W1", "U1", "W2", "V2", "WB", "UB", "VB") if rng.random() < 1 / 3} - set(protect)
    dist = random_distribution(sizes, int(rng.integers(2**63)), concentration, deterministic)
    return degenerate(dist, collapse)


def region_boundary(chan: ChannelSpec, variant: str, budget: int, seed: int, sizes: dict) -> list[BoundaryPoint]:
    """Pareto-maximal vertices of the per-distribution regions over ``budget``
    sampled distributions. Deterministic in ``seed``."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    sizes = dict(sizes)
    for var, key in (("X1", "x1"), ("XB", "xB"), ("X2", "x2")):
        sizes[var] = chan.alphabets[key]
    child_seeds = np.random.SeedSequence(seed).generate_state(budget, dtype=np.uint64)
    frontier = np.empty((0, len(RATE_KEEP[variant])))
    owners: list[tuple[int, int]] = []
    for i, s in enumerate(child_seeds):
        dist = boundary_sample(sizes, int(s))
        profile = compute_profile(dist, chan)
        region = project_to_rates(build_system(profile, variant))
        pts = vertices(region)
        if not len(pts):
            continue
        pts = np.clip(pts, 0.0, None)
        merged = np.concatenate([frontier, pts])
        merged_owners = owners + [(i, int(s))] * len(pts)
        idx = pareto_filter(merged)
        frontier = merged[idx]
        owners = [merged_owners[j] for j in idx]
    return [BoundaryPoint(tuple(float(x) for x in p), i, s) for p, (i, s) in zip(frontier, owners)]


# --------------------------------------------------------------------------
# output and comparison


def fmt(x: float) -> str:
    """12 significant digits, no negative zero."""
    return f"{float(x) + 0.0:.12g}"


def region_rows(system: LinearSystem) -> list[list[str]]:
    """CSV rows: header, then one row per constraint (coefficients, relation, constant)."""
    rows = [list(system.variables) + ["relation", "constant", "label"]]
    for c in system.constraints:
        coeffs = [str(c.coeffs.get(v, 0)) for v in system.variables]
        rows.append(coeffs + ["<=", fmt(c.constant), c.label])
    return rows


def write_region_csv(system: LinearSystem, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerows(region_rows(system))


def write_points_csv(points, stream) -> None:
    """Point cloud as ``r0,r1,r2,seed_index``; r0 is 0 for 2-D points."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["r0", "r1", "r2", "seed_index"])
    for p in points:
        rates = (0.0,) + tuple(p.rates) if len(p.rates) == 2 else tuple(p.rates)
        writer.writerow([fmt(r) for r in rates] + [p.index])


@dataclass(frozen=True)
class InclusionResult:
    inner: str
    outer: str
    checked: int
    violations: int
    first_violation: tuple | None = None

    @property
    def holds(self) -> bool:
        return self.violations == 0


def lattice_inclusion(
    inner: LinearSystem, outer: LinearSystem, step: float, upper: float, band: float = 1e-6, names=("inner", "outer")
) -> InclusionResult:
    """Count lattice points strictly inside ``inner`` (beyond ``band``) that lie
    strictly outside ``outer`` (beyond ``band``). Both systems must share variables."""
    if tuple(inner.variables) != tuple(outer.variables):
        raise ValueError("systems must be over the same variables")
    axes = lattice_axes(upper, step, len(inner.variables))
    points, in_inner, band_inner = lattice_membership(inner, axes, band)
    _, in_outer, band_outer = lattice_membership(outer, axes, band)
    mask = in_inner & ~band_inner & ~in_outer & ~band_outer
    bad = np.nonzero(mask)[0]
    first = tuple(float(x) for x in points[bad[0]]) if len(bad) else None
    return InclusionResult(names[0], names[1], int((in_inner & ~band_inner).sum()), len(bad), first)


@dataclass
class CompareReport:
    profile: MutualInfoProfile
    regions: dict
    inclusions: list

    def to_json(self) -> dict:
        return {
            "profile": {k: (list(map(float, v)) if isinstance(v, list) else v) for k, v in self.profile.to_json().items()},
            "regions": {name: [str(c) for c in s.constraints] for name, s in self.regions.items()},
            "inclusions": [
                {
                    "inner": r.inner,
                    "outer": r.outer,
                    "lattice_points": r.checked,
                    "violations": r.violations,
                    "first_violation": r.first_violation,
                }
                for r in self.inclusions
            ],
        }


def compare_regions(dist: FactoredDistribution, chan: ChannelSpec, step: float = 0.05) -> CompareReport:
    """Full nocm region against its reductions, with lattice inclusion checks.

    A reduction is a subset of the union region over all distributions, which
    for a single distribution means the full region at the reduced
    distribution. Those are the checks reported; the plain per-distribution
    comparison is included as well for information.
    """
    profile = compute_profile(dist, chan)
    full = project_to_rates(build_system_nocm(profile), ("R1", "R2"))
    full_cm = project_to_rates(build_system_cm(profile), ("R0", "R1", "R2"))
    at_wb = project_to_rates(build_system_nocm(compute_profile(degenerate(dist, {"WB"}), chan)), ("R1", "R2"))
    at_hk = project_to_rates(
        build_system_nocm(compute_profile(degenerate(dist, {"WB", "UB", "VB"}), chan)), ("R1", "R2")
    )
    hk = hk_reduction(dist, chan)
    jiang = jiang_reduction(dist, chan)
    marton = marton_reduction(dist, chan)
    upper = max(profile.rate_bound(), 1.0) + step
    regions = {"full_cm": full_cm, "full": full, "hk": hk, "jiang": jiang, "marton": marton}
    inclusions = [
        lattice_inclusion(jiang, at_wb, step, upper, names=("jiang", "full at WB-degenerate dist")),
        lattice_inclusion(hk, at_hk, step, upper, names=("hk", "full at WB,UB,VB-degenerate dist")),
        lattice_inclusion(jiang, full, step, upper, names=("jiang", "full (same dist)")),
        lattice_inclusion(hk, full, step, upper, names=("hk", "full (same dist)")),
    ]
    return CompareReport(profile, regions, inclusions)


def random_channel(sizes: dict, seed: int, concentration: float = 1.0) -> ChannelSpec:
    """Dirichlet-random kernel with the given (x1, xB, x2, y1, y2) sizes."""
    rng = np.random.default_rng(np.uint64(seed))
    shape = tuple(int(sizes[k]) for k in ("x1", "xB", "x2", "y1", "y2"))
    rows = rng.dirichlet(np.full(shape[3] * shape[4], concentration), size=shape[:3])
    return ChannelSpec.from_kernel(rows.reshape(shape))


@dataclass(frozen=True)
class WitnessResult:
    samples: int
    found: bool
    seed_index: int | None = None
    point: tuple | None = None
    margin: float = 0.0
    reduced_empty: int = 0  # samples with a nonempty full region but an empty reduced one

    def summary(self) -> str:
        tail = f"; {self.reduced_empty} samples had an empty reduced region but a nonempty full one"
        if not self.found:
            return f"no protruding vertex in {self.samples} samples" + tail
        return (
            f"sample {self.seed_index}: full-region vertex {tuple(round(x, 6) for x in self.point)} "
            f"lies {self.margin:.3g} bits outside the reduced region of the same distribution" + tail
        )


def jiang_witness_search(budget: int, seed: int, sizes: dict | None = None, tol: float = 1e-6) -> WitnessResult:
    """Search for a distribution whose full nocm region sticks out of its own
    reduced (WB constant, B0 = 0) region.

    A hit shows the per-distribution regions differ; it does not prove the
    union over distributions is strictly larger. Reports the largest margin
    among samples where both regions are nonempty.
    """
    sizes = dict(sizes or {"Q": 1, "W1": 2, "U1": 2, "X1": 2, "W2": 2, "V2": 2, "X2": 2, "WB": 2, "UB": 2, "VB": 2, "XB": 2})
    chan_sizes = {"x1": sizes["X1"], "xB": sizes["XB"], "x2": sizes["X2"], "y1": 2, "y2": 2}
    seeds = np.random.SeedSequence(seed).generate_state(2 * budget, dtype=np.uint64).reshape(budget, 2)
    best = None
    empty = 0
    for i, (s_chan, s_dist) in enumerate(seeds):
        chan = random_channel(chan_sizes, int(s_chan), concentration=0.3)
        dist = boundary_sample(sizes, int(s_dist), protect=("WB",))
        full = project_to_rates(build_system_nocm(compute_profile(dist, chan)), ("R1", "R2"))
        pts = vertices(full)
        if not len(pts):
            continue
        jiang = jiang_reduction(dist, chan)
        if not len(vertices(jiang)):
            empty += 1
            continue
        A, b = jiang.matrix()
        excess = (pts @ A.T.astype(float) - b[None, :]).max(axis=1)
        j = int(np.argmax(excess))
        if excess[j] > tol and (best is None or excess[j] > best[2]):
            best = (i, tuple(float(x) + 0.0 for x in pts[j]), float(excess[j]))
    if best is None:
        return WitnessResult(budget, False, reduced_empty=empty)
    return WitnessResult(budget, True, *best, reduced_empty=empty)
