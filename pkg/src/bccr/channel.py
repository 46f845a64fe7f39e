"""Discrete memoryless BCCR channel ``P(y1, y2 | x1, xB, x2)``.

Symbols are dense indices ``0..size-1``. The kernel is stored as a float64
tensor with axes ``(x1, xB, x2, y1, y2)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, SizeCapError, StructureError

PROB_TOL = 1e-12
MAX_CELLS = 2**24
KERNEL_AXES = ("x1", "xB", "x2", "y1", "y2")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """Finite-alphabet channel kernel.

    ``alphabets`` declares the sizes; ``kernel`` must match them. Construction
    does not check probabilities so that broken kernels can be reported by
    :func:`validate_channel`. The kernel array is made read-only.
    """

    alphabets: dict
    kernel: np.ndarray = field(repr=False)

    def __post_init__(self):
        kernel = np.array(self.kernel, dtype=float)
        kernel.setflags(write=False)
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "alphabets", {k: int(self.alphabets[k]) for k in KERNEL_AXES})

    @classmethod
    def from_kernel(cls, kernel) -> "ChannelSpec":
        kernel = np.asarray(kernel, dtype=float)
        if kernel.ndim != 5:
            raise StructureError(f"kernel must have 5 axes {KERNEL_AXES}, got {kernel.ndim}")
        return cls(dict(zip(KERNEL_AXES, kernel.shape)), kernel)

    @classmethod
    def from_function(cls, sizes: dict, fn) -> "ChannelSpec":
        """Deterministic channel: ``fn(x1, xB, x2) -> (y1, y2)``."""
        shape = tuple(int(sizes[k]) for k in KERNEL_AXES)
        kernel = np.zeros(shape)
        for x1 in range(shape[0]):
            for xb in range(shape[1]):
                for x2 in range(shape[2]):
                    y1, y2 = fn(x1, xb, x2)
                    kernel[x1, xb, x2, y1, y2] = 1.0
        return cls(dict(zip(KERNEL_AXES, shape)), kernel)

    @property
    def input_shape(self) -> tuple[int, int, int]:
        return tuple(self.alphabets[k] for k in ("x1", "xB", "x2"))

    def to_json(self) -> dict:
        return {"alphabets": dict(self.alphabets), "kernel": self.kernel.tolist()}


def validate_channel(spec: ChannelSpec) -> ValidationReport:
    """Check nonnegativity and per-input normalization of the kernel.

    Raises :class:`StructureError` when the tensor shape disagrees with the
    declared alphabets; probability problems are returned as violations.
    """
    declared = tuple(spec.alphabets[k] for k in KERNEL_AXES)
    if any(n < 1 for n in declared):
        raise StructureError(f"alphabet sizes must be >= 1, got {declared}")
    if int(np.prod(declared)) > MAX_CELLS:
        raise SizeCapError(f"kernel has {int(np.prod(declared))} cells, cap is {MAX_CELLS}")
    if spec.kernel.shape != declared:
        raise StructureError(f"kernel shape {spec.kernel.shape} does not match alphabets {declared}")

    violations = []
    kernel = spec.kernel
    for idx in zip(*np.nonzero((kernel < 0).any(axis=(3, 4)))):
        low = kernel[idx].min()
        violations.append(f"negative entry {low:.3g} at (x1, xB, x2) = {tuple(int(i) for i in idx)}")
    for idx in zip(*np.nonzero((kernel > 1).any(axis=(3, 4)))):
        violations.append(f"entry above 1 at (x1, xB, x2) = {tuple(int(i) for i in idx)}")
    sums = kernel.sum(axis=(3, 4))
    for idx in zip(*np.nonzero(np.abs(sums - 1.0) > PROB_TOL)):
        violations.append(f"row sum {sums[idx]:.12g} != 1 at (x1, xB, x2) = {tuple(int(i) for i in idx)}")
    return ValidationReport(not violations, tuple(violations))


def output_marginal(spec: ChannelSpec, receiver: str) -> np.ndarray:
    """Kernel of one receiver alone, axes ``(x1, xB, x2, y)``."""
    receiver = receiver.upper()
    if receiver == "Y1":
        return spec.kernel.sum(axis=4)
    if receiver == "Y2":
        return spec.kernel.sum(axis=3)
    raise ValueError(f"receiver must be 'Y1' or 'Y2', got {receiver!r}")


def channel_from_json(data, path: str = "<channel>") -> ChannelSpec:
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object", path)
    try:
        alph = data["alphabets"]
        kernel = data["kernel"]
    except KeyError as exc:
        raise ParseError(f"missing key {exc.args[0]!r}", path) from None
    missing = [k for k in KERNEL_AXES if k not in alph]
    if missing:
        raise ParseError(f"alphabets missing {missing}", f"{path}.alphabets")
    try:
        arr = np.array(kernel, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"kernel is not a rectangular numeric array ({exc})", f"{path}.kernel") from None
    spec = ChannelSpec(alph, arr)
    validate_channel(spec)  # shape errors surface here
    return spec


def load_channel(path) -> ChannelSpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", str(path)) from None
    return channel_from_json(data, str(path))
