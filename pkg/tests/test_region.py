import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from bccr import linear_systems as ls
from bccr.channel import ChannelSpec, load_channel
from bccr.distribution import FactoredDistribution, degenerate, load_distribution, random_distribution
from bccr.region import (
    MutualInfoProfile,
    RatePoint,
    boundary_sample,
    build_system,
    build_system_cm,
    build_system_nocm,
    compare_regions,
    compute_profile,
    hk_reduction,
    jiang_reduction,
    lattice_inclusion,
    marton_reduction,
    membership,
    pareto_filter,
    project_to_rates,
    random_channel,
    region_boundary,
    vertices,
    with_rate_sums,
)

BAND = 1e-6
BINARY = {"X1": 2, "X2": 2, "XB": 2, "W1": 2, "U1": 2, "W2": 2, "V2": 2, "WB": 2, "UB": 2, "VB": 2}
CHAN_SIZES = {"x1": 2, "xB": 2, "x2": 2, "y1": 2, "y2": 2}


def random_profile(rng, eta_max=0.3, iy_max=2.0):
    vec = np.concatenate([rng.uniform(0, eta_max, 6), rng.uniform(0, iy_max, 14)])
    return MutualInfoProfile.from_vector(vec)


def support(system, direction):
    A, b = system.matrix()
    return oracles.support(A.astype(float), b, direction)


def only_origin(system):
    pts = vertices(system)
    return len(pts) == 1 and np.abs(pts).max() <= 1e-12


# ------------------------------------------------------------ profile


def test_degenerate_profile_is_zero():
    dist = degenerate(random_distribution(BINARY, seed=3), {"W1", "U1", "W2", "V2", "WB", "UB", "VB"})
    profile = compute_profile(dist, random_channel(CHAN_SIZES, 4))
    assert np.abs(profile.as_vector()).max() <= 1e-12


def test_noiseless_private_link_profile():
    relay1 = np.zeros((1, 1, 2, 2))
    relay1[0, 0, 0, 0] = relay1[0, 0, 1, 1] = 0.5
    dist = FactoredDistribution(
        {"U1": 2, "X1": 2},
        {
            "Q": np.ones(1),
            "relay1": relay1,
            "relay2": np.ones((1,) * 4),
            "broadcast": np.ones((1, 1, 2) + (1,) * 5),
            "xb": np.ones((1, 1, 2, 2) + (1,) * 7),
        },
    )
    chan = ChannelSpec.from_function({"x1": 2, "xB": 1, "x2": 1, "y1": 2, "y2": 1}, lambda x1, xb, x2: (x1, 0))
    p = compute_profile(dist, chan)
    assert p.iy1 == pytest.approx((1, 0, 0, 1, 1, 1, 1), abs=1e-12)
    assert np.abs(p.as_vector()[:6]).max() <= 1e-12 and max(p.iy2) <= 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_profile_matches_loop_oracle(seed):
    dist = random_distribution({**BINARY, "Q": 2}, seed=seed, concentration=0.7)
    chan = random_channel(CHAN_SIZES, seed + 10)
    got = compute_profile(dist, chan).as_vector()
    assert np.abs(got - oracles.profile_vector(dist, chan)).max() <= 1e-10


def test_profile_json_round_trip(rng):
    p = random_profile(rng)
    assert MutualInfoProfile.from_json(p.to_json()) == p
    with pytest.raises(ValueError):
        MutualInfoProfile.from_vector([-1.0] + [0.0] * 19)


# ------------------------------------------------------------ systems


@given(st.integers(0, 2**32 - 1))
def test_constraint_counts(seed):
    p = random_profile(np.random.default_rng(seed))
    assert len(build_system_cm(p)) == 26
    assert len(build_system_nocm(p)) == 21
    assert "R0" not in build_system_nocm(p).variables


def test_zero_profile_is_origin():
    zero = MutualInfoProfile.zero()
    assert only_origin(project_to_rates(build_system_cm(zero)))
    assert only_origin(project_to_rates(build_system_nocm(zero)))
    assert membership((0, 0, 0), zero, "cm") and membership((0, 0), zero, "nocm")
    assert not membership((0, 0.01, 0), zero, "cm")


def test_unit_profile_half_rates():
    p = MutualInfoProfile.from_vector([0.0] * 6 + [1.0] * 14)
    point = {"R0": 0, "R10": 0, "R11": 0.5, "R20": 0, "R22": 0.5, "B0": 0, "B1": 0, "B2": 0}
    system = build_system_cm(p)
    assert system.contains(point)
    assert (system.slacks(point) >= 0).all()
    assert membership((0, 0.5, 0.5), p)


def test_gross_violation(rng):
    p = random_profile(rng)
    assert not membership((2 * sum(p.iy1), 0, 0), p)


def test_region_projection_has_rate_sums():
    system = with_rate_sums(build_system_nocm(MutualInfoProfile.zero()))
    assert {"R1", "R2"} <= set(system.variables)
    assert len(system) == 21 + 4


@pytest.mark.parametrize("seed", range(5))
def test_membership_agrees_with_projection(seed):
    rng = np.random.default_rng(seed)
    p = random_profile(rng)
    for variant, dims in (("cm", 3), ("nocm", 2)):
        region = project_to_rates(build_system(p, variant))
        pts = vertices(region)
        probes = [rng.uniform(0, p.rate_bound(), dims) for _ in range(40)]
        if len(pts):
            probes += [np.clip(v + rng.normal(0, 0.01, dims), 0, None) for v in pts]
        for x in probes:
            if np.abs(region.slacks(x)).min() <= BAND:
                continue
            assert membership(tuple(x), p, variant) == region.contains(x), (variant, x)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25)
def test_monotone_in_decoding_terms(seed):
    rng = np.random.default_rng(seed)
    p = random_profile(rng)
    vec = p.as_vector()
    vec[6:] += rng.uniform(0, 0.5, 14) * (rng.random(14) < 0.5)
    bigger = MutualInfoProfile.from_vector(vec)
    small = project_to_rates(build_system_cm(p))
    large = project_to_rates(build_system_cm(bigger))
    for x in rng.uniform(0, p.rate_bound(), size=(300, 3)):
        if small.contains(x, tol=-BAND):
            assert large.contains(x)


def test_rate_point_validation():
    assert RatePoint(0.1, 0.2, 0.3).as_tuple("cm") == (0.3, 0.1, 0.2)
    with pytest.raises(ValueError):
        RatePoint(-0.1, 0.0)
    with pytest.raises(ValueError):
        membership((0.1, 0.2, 0.3), MutualInfoProfile.zero(), "nocm")


# ------------------------------------------------------------ reductions


def hk_instance(seed):
    dist = degenerate(random_distribution(BINARY, seed=seed), {"WB", "UB", "VB"})
    return dist, random_channel(CHAN_SIZES, seed + 1000)


def test_hk_orthogonal_links(samples):
    chan = load_channel(samples / "orthogonal_channel.json")
    dist = load_distribution(samples / "orthogonal_hk_dist.json")
    region = hk_reduction(dist, chan)
    assert region.contains((1.0, 1.0))
    assert not region.contains((1.01, 1.0), tol=BAND)


def test_hk_degenerate_is_origin():
    dist = degenerate(random_distribution(BINARY, seed=1), {"W1", "U1", "W2", "V2", "WB", "UB", "VB"})
    assert only_origin(hk_reduction(dist, random_channel(CHAN_SIZES, 2)))


@pytest.mark.parametrize("seed", range(5))
def test_hk_matches_independent_evaluator(seed):
    dist, chan = hk_instance(seed)
    region = hk_reduction(dist, chan)
    A, b, A_eq, b_eq = oracles.hk_matrix(oracles.hk_constants(dist, chan))
    for d in [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (-1, 0), (0, -1)]:
        want = oracles.support(A, b, d, A_eq, b_eq, index=[4, 5])
        assert support(region, d) == pytest.approx(want, abs=1e-9)


def test_jiang_zero_profile():
    dist = degenerate(random_distribution(BINARY, seed=1), {"W1", "U1", "W2", "V2", "WB", "UB", "VB"})
    assert only_origin(jiang_reduction(dist, random_channel(CHAN_SIZES, 2)))


@pytest.mark.parametrize("seed", range(6))
def test_jiang_equals_full_when_wb_constant(seed):
    chan = random_channel(CHAN_SIZES, seed, concentration=0.05)
    dist = degenerate(random_distribution(BINARY, seed=seed, concentration=0.3), {"WB"})
    profile = compute_profile(dist, chan)
    full = project_to_rates(build_system_nocm(profile))
    jiang = jiang_reduction(dist, chan)
    upper = max(profile.rate_bound(), 1.0) + 0.05
    assert lattice_inclusion(jiang, full, 0.05, upper).holds
    assert lattice_inclusion(full, jiang, 0.05, upper).holds


@pytest.mark.parametrize("seed", range(6))
def test_jiang_inside_full_region(seed):
    chan = random_channel(CHAN_SIZES, seed, concentration=0.05)
    dist = random_distribution(BINARY, seed=100 + seed, concentration=0.3)
    report = compare_regions(dist, chan)
    first = report.inclusions[0]
    assert first.inner == "jiang" and first.holds, first


def test_marton_broadcast_common_rate(samples):
    chan = load_channel(samples / "noiseless_broadcast_channel.json")
    dist = load_distribution(samples / "wb_uniform_dist.json")
    region = marton_reduction(dist, chan)
    assert region.contains((1.0, 0.0, 0.0))
    assert not region.contains((1.0 + 1e-3, 0.0, 0.0))
    assert vertices(region)[:, 0].max() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_marton_eta0_vanishes(seed):
    dist = degenerate(random_distribution(BINARY, seed=seed), {"W1", "U1", "W2", "V2"})
    assert compute_profile(dist, random_channel(CHAN_SIZES, seed)).eta0 <= 1e-9
    marton_reduction(random_distribution(BINARY, seed=seed), random_channel(CHAN_SIZES, seed))


def test_marton_degenerate_is_origin():
    dist = degenerate(random_distribution(BINARY, seed=1), {"W1", "U1", "W2", "V2", "WB", "UB", "VB"})
    assert only_origin(marton_reduction(dist, random_channel(CHAN_SIZES, 2)))


# ------------------------------------------------------------ boundary


def test_pareto_filter():
    pts = np.array([[0, 1], [1, 0], [0.5, 0.5], [0.4, 0.4], [1, 0]])
    assert list(pareto_filter(pts)) == [0, 1, 2]


def test_boundary_degenerate_single_point():
    chan = ChannelSpec.from_function({"x1": 1, "xB": 1, "x2": 1, "y1": 2, "y2": 2}, lambda *_: (0, 0))
    pts = region_boundary(chan, "nocm", 1, 0, {})
    assert [p.rates for p in pts] == [(0.0, 0.0)]


def test_boundary_is_deterministic(samples):
    chan = load_channel(samples / "random_channel.json")
    sizes = {"U1": 2, "V2": 2, "WB": 2}
    a = region_boundary(chan, "cm", 20, 5, sizes)
    b = region_boundary(chan, "cm", 20, 5, sizes)
    assert a == b


def test_boundary_orthogonal_links(samples):
    chan = load_channel(samples / "orthogonal_channel.json")
    pts = region_boundary(chan, "nocm", 60, 0, {"U1": 2, "V2": 2})
    rates = np.array([p.rates for p in pts])
    assert ((rates >= 0.95).all(axis=1)).any()
    for p in pts[:5]:
        dist = boundary_sample({"U1": 2, "V2": 2, "X1": 2, "X2": 2, "XB": 1}, p.seed)
        assert membership(p.rates, compute_profile(dist, chan), "nocm")


# ------------------------------------------------------------ findings


def counterexample():
    """U1 uniform with X1 = U1 = Y1; V2 uniform with WB = V2 = X2 = Y2."""
    relay = np.zeros((1, 1, 2, 2))
    relay[0, 0, 0, 0] = relay[0, 0, 1, 1] = 0.5
    broadcast = np.zeros((1, 1, 2, 1, 2, 2, 1, 1))
    broadcast[0, 0, :, 0, 0, 0] = 1.0
    broadcast[0, 0, :, 0, 1, 1] = 1.0
    sizes = {"U1": 2, "X1": 2, "V2": 2, "X2": 2, "WB": 2}
    factors = {"Q": np.ones(1), "relay1": relay, "relay2": relay, "broadcast": broadcast, "xb": np.ones((1, 1, 2, 2, 1, 2, 2, 2, 1, 1, 1))}
    chan = ChannelSpec.from_function({"x1": 2, "xB": 1, "x2": 2, "y1": 2, "y2": 2}, lambda x1, xb, x2: (x1, x2))
    return FactoredDistribution(sizes, factors), chan


def test_dropped_rows_cut_the_region():
    """The four rows removed in the no-common-message system are not
    polyhedrally redundant: here the full system is empty at R0 = 0."""
    dist, chan = counterexample()
    p = compute_profile(dist, chan)
    assert p.eta0 == pytest.approx(1.0) and p.theta2 == pytest.approx(1.0) and p.iy1[1] == pytest.approx(0.0)
    assert not ls.is_feasible(ls.pin(build_system_cm(p), {"R0": 0.0}))
    assert membership((0.0, 1.0), p, "nocm")


@pytest.mark.parametrize("seed", range(20))
def test_cm_at_zero_common_rate_equals_nocm(seed):
    """With WB, UB, VB constant the common-message region at R0 = 0 and the
    no-common-message region coincide on the 0.02 lattice."""
    chan = random_channel(CHAN_SIZES, seed, concentration=0.05)
    dist = degenerate(boundary_sample({**BINARY, "Q": 1}, 3000 + seed), {"WB", "UB", "VB"})
    p = compute_profile(dist, chan)
    nocm = project_to_rates(build_system_nocm(p))
    cm0 = project_to_rates(ls.pin(build_system_cm(p), {"R0": 0.0}), ("R1", "R2"))
    upper = max(p.rate_bound(), 1.0) + 0.02
    assert lattice_inclusion(nocm, cm0, 0.02, upper).holds
    assert lattice_inclusion(cm0, nocm, 0.02, upper).holds
