"""Monte Carlo run of the superposition/Marton random coding scheme at small n.

Codebooks follow the superposition order W1 -> U1, W2 -> V2, (W1, W2) -> WB,
(W1, W2, WB, U1) -> UB, (W1, W2, WB, V2) -> VB, (W1, U1) -> X1,
(W2, V2) -> X2 and everything -> XB. Every satellite array is indexed by the
indices of its cloud centers followed by its own index:

========  =============================================
array     index axes
========  =============================================
``w1``    (m10,)
``u1``    (m10, m11)
``x1``    (m10, m11)
``w2``    (m20,)
``v2``    (m20, m22)
``x2``    (m20, m22)
``wb``    (m10, m20, m0, b0)
``ub``    (m10, m20, m0, b0, m11, b1)
``vb``    (m10, m20, m0, b0, m22, b2)
========  =============================================

XB codewords are drawn lazily, each from its own child seed, because the full
array would be indexed by every message and bin at once.

A single time-sharing sequence ``q`` is drawn per codebook and is known to
every node. Typicality is strong typicality: each cell's empirical frequency
must lie within ``epsilon * p(cell)`` of ``p(cell)``, so zero-probability
cells must be absent.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .channel import ChannelSpec
from .distribution import FactoredDistribution, build_joint, check_compatible
from .errors import ParseError, SizeCapError, StructureError

MAX_BLOCKLENGTH = 16
MAX_ENTRIES = 2**26
RATE_KEYS = ("r0", "r10", "r11", "r20", "r22")
BIN_KEYS = ("b0", "b1", "b2")
AUX_ORDER = ("Q", "W1", "U1", "W2", "V2", "WB", "UB", "VB")
Y1_SET = ("Q", "W1", "U1", "W2", "WB", "UB", "Y1")
Y2_SET = ("Q", "W2", "V2", "W1", "WB", "VB", "Y2")


def codeword_count(n: int, rate: float) -> int:
    """``ceil(2^(n*rate))``, guarded against round-off just above an integer."""
    return max(1, math.ceil(2.0 ** (n * rate) - 1e-9))


@dataclass(frozen=True)
class SimConfig:
    n: int
    rates: dict = field(default_factory=lambda: dict.fromkeys(RATE_KEYS, 0.0))
    bin_rates: dict = field(default_factory=lambda: dict.fromkeys(BIN_KEYS, 0.0))
    epsilon: float = 0.5
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        if not 1 <= int(self.n) <= MAX_BLOCKLENGTH:
            raise StructureError(f"blocklength must be in 1..{MAX_BLOCKLENGTH}, got {self.n}")
        rates = {k: float(self.rates.get(k, 0.0)) for k in RATE_KEYS}
        bins = {k: float(self.bin_rates.get(k, 0.0)) for k in BIN_KEYS}
        unknown = (set(self.rates) - set(RATE_KEYS)) | (set(self.bin_rates) - set(BIN_KEYS))
        if unknown:
            raise StructureError(f"unknown rate keys {sorted(unknown)}")
        if min(rates.values()) < 0 or min(bins.values()) < 0:
            raise StructureError("rates and bin rates must be nonnegative")
        if not self.epsilon > 0:
            raise StructureError("epsilon must be positive")
        if int(self.trials) < 0:
            raise StructureError("trials must be nonnegative")
        if not 0 <= int(self.seed) < 2**64:
            raise StructureError("seed must fit in 64 bits")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "bin_rates", bins)
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "seed", int(self.seed))
        entries = self.codebook_entries()
        if entries > MAX_ENTRIES:
            raise SizeCapError(f"codebooks would hold {entries} symbols, cap is {MAX_ENTRIES}")

    @property
    def counts(self) -> dict:
        out = {k: codeword_count(self.n, v) for k, v in self.rates.items()}
        out.update({k: codeword_count(self.n, v) for k, v in self.bin_rates.items()})
        return out

    def codebook_entries(self) -> int:
        c = self.counts
        shared = c["r10"] * c["r20"] * c["r0"] * c["b0"]
        per_block = (
            c["r10"] * (1 + 2 * c["r11"])
            + c["r20"] * (1 + 2 * c["r22"])
            + shared * (1 + c["r11"] * c["b1"] + c["r22"] * c["b2"])
        )
        return self.n * per_block

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data, path: str = "<sim>") -> "SimConfig":
        if not isinstance(data, dict):
            raise ParseError("expected a JSON object", path)
        if "n" not in data:
            raise ParseError("missing key 'n'", path)
        try:
            return cls(
                n=data["n"],
                rates=data.get("rates", {}),
                bin_rates=data.get("bin_rates", {}),
                epsilon=data.get("epsilon", 0.5),
                trials=data.get("trials", 100),
                seed=data.get("seed", 0),
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(str(exc), path) from None


def load_sim_config(path) -> SimConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", str(path)) from None
    return SimConfig.from_json(data, str(path))


# --------------------------------------------------------------------------
# distributions used by the simulator


def _marginal(table: np.ndarray, variables, keep) -> np.ndarray:
    drop = tuple(i for i, v in enumerate(variables) if v not in keep)
    out = table.sum(axis=drop)
    kept = [v for v in variables if v in keep]
    return np.transpose(out, [kept.index(v) for v in keep])


class _Sampler:
    """Inverse-CDF sampler of a head variable given a tuple of conditioning symbols."""

    def __init__(self, table: np.ndarray):
        # table axes: conditioning..., head
        self.cond_shape = table.shape[:-1]
        flat = table.reshape(-1, table.shape[-1])
        total = flat.sum(axis=1, keepdims=True)
        cond = np.where(total > 0, flat / np.where(total > 0, total, 1.0), 1.0 / flat.shape[1])
        self.cdf = np.cumsum(cond, axis=1)
        self.cdf[:, -1] = 1.0

    def draw(self, rng, cond_symbols, shape) -> np.ndarray:
        if self.cond_shape:
            idx = np.ravel_multi_index(tuple(np.broadcast_to(s, shape) for s in cond_symbols), self.cond_shape)
        else:
            idx = np.zeros(shape, dtype=np.intp)
        u = rng.random(shape)
        rows = self.cdf[idx]
        return np.minimum((u[..., None] >= rows).sum(axis=-1), self.cdf.shape[1] - 1).astype(np.int64)


@dataclass(frozen=True)
class _Target:
    """Flattened target pmf for a typicality test over ``variables``."""

    variables: tuple
    sizes: tuple
    pmf: np.ndarray

    @classmethod
    def from_table(cls, variables, table):
        return cls(tuple(variables), tuple(table.shape), table.ravel())

    def strides(self) -> dict:
        out, s = {}, 1
        for v, k in zip(reversed(self.variables), reversed(self.sizes)):
            out[v] = s
            s *= k
        return out


def _typical(codes: np.ndarray, target: _Target, eps: float) -> np.ndarray:
    """Strong-typicality mask for each row of ``codes`` (cell indices over time)."""
    cells = len(target.pmf)
    rows, n = codes.shape
    if rows * cells > MAX_ENTRIES:
        raise SizeCapError(f"typicality test over {rows} candidates x {cells} cells exceeds the cap")
    offsets = (np.arange(rows, dtype=np.int64) * cells)[:, None]
    counts = np.bincount((codes + offsets).ravel(), minlength=rows * cells).reshape(rows, cells)
    dev = np.abs(counts / n - target.pmf[None, :])
    return (dev <= eps * target.pmf[None, :] + 1e-12).all(axis=1)


# --------------------------------------------------------------------------
# codebooks


@dataclass(frozen=True, eq=False)
class CodebookSet:
    config: SimConfig
    seed: int
    q: np.ndarray
    w1: np.ndarray
    u1: np.ndarray
    x1: np.ndarray
    w2: np.ndarray
    v2: np.ndarray
    x2: np.ndarray
    wb: np.ndarray
    ub: np.ndarray
    vb: np.ndarray
    xb_sampler: _Sampler = field(repr=False)
    aux_target: _Target = field(repr=False)
    y1_target: _Target = field(repr=False)
    y2_target: _Target = field(repr=False)

    SUPERPOSITION = {
        "U1": ("W1",),
        "X1": ("W1", "U1"),
        "V2": ("W2",),
        "X2": ("W2", "V2"),
        "WB": ("W1", "W2"),
        "UB": ("W1", "W2", "WB", "U1"),
        "VB": ("W1", "W2", "WB", "V2"),
        "XB": ("W1", "U1", "X1", "W2", "V2", "X2", "WB", "UB", "VB"),
    }

    def xb(self, messages, bins) -> np.ndarray:
        """XB codeword for the designated tuple, drawn from its own child seed."""
        m0, m10, m11, m20, m22 = messages
        b0, b1, b2 = bins
        key = (int(m10), int(m11), int(m20), int(m22), int(m0), int(b0), int(b1), int(b2))
        rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(1, *key)))
        cond = (
            self.q,
            self.w1[m10],
            self.u1[m10, m11],
            self.x1[m10, m11],
            self.w2[m20],
            self.v2[m20, m22],
            self.x2[m20, m22],
            self.wb[m10, m20, m0, b0],
            self.ub[m10, m20, m0, b0, m11, b1],
            self.vb[m10, m20, m0, b0, m22, b2],
        )
        return self.xb_sampler.draw(rng, cond, (self.config.n,))


def _targets(dist: FactoredDistribution, chan: ChannelSpec):
    joint = build_joint(dist, chan)
    aux = _Target.from_table(AUX_ORDER, dist.aux_joint())
    y1 = _Target.from_table(Y1_SET, joint.marginal(Y1_SET))
    y2 = _Target.from_table(Y2_SET, joint.marginal(Y2_SET))
    return aux, y1, y2


def generate_codebooks(dist: FactoredDistribution, chan: ChannelSpec, config: SimConfig, seed=None) -> CodebookSet:
    """Draw all superposition codebooks. Deterministic in ``seed`` (default: the config seed)."""
    check_compatible(dist, chan)
    seed = config.seed if seed is None else int(seed)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    n, c = config.n, config.counts
    f = dist.factors
    aux = dist.aux_joint()
    r1, r2 = f["relay1"], f["relay2"]

    q = _Sampler(f["Q"]).draw(rng, (), (n,))
    # relay 1
    w1 = _Sampler(r1.sum(axis=(2, 3))).draw(rng, (q,), (c["r10"], n))
    u1 = _Sampler(r1.sum(axis=3)).draw(rng, (q, w1[:, None]), (c["r10"], c["r11"], n))
    x1 = _Sampler(r1).draw(rng, (q, w1[:, None], u1), u1.shape)
    # relay 2
    w2 = _Sampler(r2.sum(axis=(2, 3))).draw(rng, (q,), (c["r20"], n))
    v2 = _Sampler(r2.sum(axis=3)).draw(rng, (q, w2[:, None]), (c["r20"], c["r22"], n))
    x2 = _Sampler(r2).draw(rng, (q, w2[:, None], v2), v2.shape)
    # broadcast node
    wb_shape = (c["r10"], c["r20"], c["r0"], c["b0"], n)
    wb = _Sampler(_marginal(aux, AUX_ORDER, ("Q", "W1", "W2", "WB"))).draw(
        rng, (q, w1[:, None, None, None], w2[None, :, None, None]), wb_shape
    )
    ub_shape = (c["r10"], c["r20"], c["r0"], c["b0"], c["r11"], c["b1"], n)
    ub = _Sampler(_marginal(aux, AUX_ORDER, ("Q", "W1", "W2", "WB", "U1", "UB"))).draw(
        rng,
        (
            q,
            w1[:, None, None, None, None, None],
            w2[None, :, None, None, None, None],
            wb[:, :, :, :, None, None],
            u1[:, None, None, None, :, None],
        ),
        ub_shape,
    )
    vb_shape = (c["r10"], c["r20"], c["r0"], c["b0"], c["r22"], c["b2"], n)
    vb = _Sampler(_marginal(aux, AUX_ORDER, ("Q", "W1", "W2", "WB", "V2", "VB"))).draw(
        rng,
        (
            q,
            w1[:, None, None, None, None, None],
            w2[None, :, None, None, None, None],
            wb[:, :, :, :, None, None],
            v2[None, :, None, None, :, None],
        ),
        vb_shape,
    )
    aux_t, y1_t, y2_t = _targets(dist, chan)
    return CodebookSet(
        config, seed, q, w1, u1, x1, w2, v2, x2, wb, ub, vb, _Sampler(f["xb"]), aux_t, y1_t, y2_t
    )


# --------------------------------------------------------------------------
# encoding, channel, decoding


@dataclass(frozen=True)
class Messages:
    m0: int
    m10: int
    m11: int
    m20: int
    m22: int

    def __iter__(self):
        return iter((self.m0, self.m10, self.m11, self.m20, self.m22))


def _check_messages(cb: CodebookSet, msg: Messages):
    c = cb.config.counts
    for value, key in zip(msg, RATE_KEYS):
        if not 0 <= value < c[key]:
            raise ValueError(f"message index {value} out of range for {key} (has {c[key]} codewords)")


def marton_encode(cb: CodebookSet, messages: Messages, config: SimConfig | None = None):
    """First bin triple, lexicographic in (b0, b1, b2), whose seven auxiliary
    codewords are jointly typical; ``None`` if there is none."""
    config = config or cb.config
    _check_messages(cb, messages)
    m0, m10, m11, m20, m22 = messages
    t = cb.aux_target
    s = t.strides()
    base = (
        cb.q * s["Q"]
        + cb.w1[m10] * s["W1"]
        + cb.u1[m10, m11] * s["U1"]
        + cb.w2[m20] * s["W2"]
        + cb.v2[m20, m22] * s["V2"]
    )
    for b0 in range(cb.wb.shape[3]):
        head = base + cb.wb[m10, m20, m0, b0] * s["WB"]
        ub = cb.ub[m10, m20, m0, b0, m11] * s["UB"]  # (NB1, n)
        vb = cb.vb[m10, m20, m0, b0, m22] * s["VB"]  # (NB2, n)
        codes = head[None, None, :] + ub[:, None, :] + vb[None, :, :]
        ok = _typical(codes.reshape(-1, config.n), t, config.epsilon)
        if ok.any():
            b1, b2 = np.unravel_index(int(np.argmax(ok)), codes.shape[:2])
            return (b0, int(b1), int(b2))
    return None


def transmit(cb: CodebookSet, messages: Messages, bins, chan: ChannelSpec, rng):
    """Channel outputs ``(y1, y2)`` for the designated codewords."""
    m0, m10, m11, m20, m22 = messages
    x1 = cb.x1[m10, m11]
    x2 = cb.x2[m20, m22]
    xb = cb.xb(messages, bins)
    k = chan.kernel
    rows = k.reshape(k.shape[:3] + (-1,))[x1, xb, x2]  # (n, |Y1||Y2|)
    cdf = np.cumsum(rows, axis=1)
    u = rng.random(len(x1))
    flat = np.minimum((u[:, None] >= cdf).sum(axis=1), rows.shape[1] - 1)
    return np.unravel_index(flat, k.shape[3:])


def decode(cb: CodebookSet, y: np.ndarray, receiver: str, config: SimConfig | None = None):
    """Intended-message estimate of one receiver, or ``None`` on none/ambiguity.

    Receiver 1 searches every (m10, m11, m20, m0, b0, b1) and reports
    ``(m0, m10, m11)``; receiver 2 is symmetric and reports ``(m0, m20, m22)``.
    Candidates differing only in non-intended indices do not count as
    ambiguous. With one codeword per intended message class the estimate is
    that codeword, whatever the output.
    """
    config = config or cb.config
    c = config.counts
    own = ("r10", "r11") if receiver == "Y1" else ("r20", "r22")
    if c["r0"] == c[own[0]] == c[own[1]] == 1 and receiver in ("Y1", "Y2"):
        return (0, 0, 0)  # a single hypothesis needs no test
    if receiver == "Y1":
        t = cb.y1_target
        own_w, own_u, other_w = cb.w1, cb.u1, cb.w2
        wb = cb.wb
        sat = np.transpose(cb.ub, (0, 4, 1, 2, 3, 5, 6))
        names = ("W1", "U1", "W2", "UB")
    elif receiver == "Y2":
        t = cb.y2_target
        own_w, own_u, other_w = cb.w2, cb.v2, cb.w1
        wb = np.transpose(cb.wb, (1, 0, 2, 3, 4))
        sat = np.transpose(cb.vb, (1, 4, 0, 2, 3, 5, 6))
        names = ("W2", "V2", "W1", "VB")
    else:
        raise ValueError(f"receiver must be 'Y1' or 'Y2', got {receiver!r}")
    s = t.strides()
    # candidate axes: (own m_0, own m_sat, other m_0, m0, b0, own bin)
    codes = (
        cb.q * s["Q"]
        + y * s[receiver]
        + own_w[:, None, None, None, None, None] * s[names[0]]
        + own_u[:, :, None, None, None, None] * s[names[1]]
        + other_w[None, None, :, None, None, None] * s[names[2]]
        + wb[:, None, :, :, :, None] * s["WB"]
        + sat * s[names[3]]
    )
    shape = codes.shape[:-1]
    ok = _typical(codes.reshape(-1, config.n), t, config.epsilon)
    hits = np.unravel_index(np.nonzero(ok)[0], shape)
    intended = {(int(a), int(b), int(c)) for a, b, c in zip(hits[3], hits[0], hits[1])}
    if len(intended) != 1:
        return None
    return intended.pop()


def transmit_and_decode(cb: CodebookSet, messages: Messages, bins, chan: ChannelSpec, rng, receiver: str):
    y1, y2 = transmit(cb, messages, bins, chan, rng)
    return decode(cb, y1 if receiver == "Y1" else y2, receiver)


# --------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class SimReport:
    encoding_failure_rate: float
    y1_error_rate: float
    y2_error_rate: float
    error_rate: float
    trials_run: int
    seed: int = 0

    def to_json(self) -> dict:
        return asdict(self)

    def std_error(self, field_name: str = "error_rate") -> float:
        p = getattr(self, field_name)
        return math.sqrt(p * (1 - p) / self.trials_run) if self.trials_run else 0.0


@dataclass(frozen=True)
class TrialOutcome:
    encoded: bool
    y1_ok: bool
    y2_ok: bool


def run_trial(dist, chan, config: SimConfig, seed_seq: np.random.SeedSequence) -> TrialOutcome:
    """One draw of codebooks, messages and channel noise.

    On encoding failure the all-zero bin triple is sent anyway, so decoding
    outcomes are still recorded.
    """
    cb_seq, run_seq = seed_seq.spawn(2)
    cb = generate_codebooks(dist, chan, config, seed=int(cb_seq.generate_state(1, dtype=np.uint64)[0]))
    rng = np.random.default_rng(run_seq)
    c = config.counts
    msg = Messages(*(int(rng.integers(c[k])) for k in RATE_KEYS))
    bins = marton_encode(cb, msg, config)
    encoded = bins is not None
    y1, y2 = transmit(cb, msg, bins or (0, 0, 0), chan, rng)
    y1_ok = decode(cb, y1, "Y1", config) == (msg.m0, msg.m10, msg.m11)
    y2_ok = decode(cb, y2, "Y2", config) == (msg.m0, msg.m20, msg.m22)
    return TrialOutcome(encoded, y1_ok, y2_ok)


def run_experiment(dist: FactoredDistribution, chan: ChannelSpec, config: SimConfig) -> SimReport:
    """Empirical failure and error rates over ``config.trials`` independent trials."""
    if config.trials == 0:
        return SimReport(0.0, 0.0, 0.0, 0.0, 0, config.seed)
    outcomes = [run_trial(dist, chan, config, s) for s in np.random.SeedSequence(config.seed).spawn(config.trials)]
    enc_fail = sum(not o.encoded for o in outcomes)
    y1_err = sum(not o.y1_ok for o in outcomes)
    y2_err = sum(not o.y2_ok for o in outcomes)
    any_err = sum((not o.encoded) or not (o.y1_ok and o.y2_ok) for o in outcomes)
    n = len(outcomes)
    return SimReport(enc_fail / n, y1_err / n, y2_err / n, any_err / n, n, config.seed)
