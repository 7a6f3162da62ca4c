"""Exact dense simulation of sampled networks.

States are kept as full complex amplitude tensors with one axis per ring
site, so every entropy below is exact up to floating point.  The builder
applies per-site splitting isometries and per-pair rotation isometries level
by level, snapshotting the state after each stage; the wrap-around pair is
handled by axis permutation.  Feasibility is checked against an amplitude
budget before any allocation.

Entropies are in nats.  Spectra of reduced states are taken from the
singular values of the reshaped amplitude tensor (never by diagonalizing the
density matrix unless one is explicitly requested), with eigenvalues clamped
at 1e-12 before logs.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import FeasibilityError, UsageError
from .haar import sample_isometry
from .network import Interval, MeraNetwork, Stage, w_partner
from .schedule import memory_estimate

__all__ = [
    "DEFAULT_MAX_AMPLITUDES",
    "MAX_AMPLITUDES_ENV",
    "CorrelationProxies",
    "DenseState",
    "DensityMatrix",
    "EntropySamples",
    "MiSamples",
    "StateTrajectory",
    "build_state",
    "entropy_renyi2",
    "entropy_vn",
    "interval_spectrum",
    "max_amplitudes_from_env",
    "mc_entropy_stats",
    "mc_entropy_sweep",
    "mc_mutual_information",
    "mutual_information",
    "correlation_proxies",
    "reduced_density",
]

DEFAULT_MAX_AMPLITUDES = 1 << 26
MAX_AMPLITUDES_ENV = "RANDMERA_MAX_AMPLITUDES"

_EIG_CLAMP = 1e-12


def max_amplitudes_from_env(default: int = DEFAULT_MAX_AMPLITUDES) -> int:
    """Amplitude budget, overridable through the environment."""
    raw = os.environ.get(MAX_AMPLITUDES_ENV)
    if raw is None:
        return default
    try:
        val = int(raw)
    except ValueError as exc:
        raise UsageError(f"{MAX_AMPLITUDES_ENV} must be an integer, got {raw!r}") from exc
    if val < 1:
        raise UsageError(f"{MAX_AMPLITUDES_ENV} must be positive, got {val}")
    return val


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DenseState:
    """A pure state over one ring, one tensor axis per site."""

    level: int
    stage: Stage
    site_dims: tuple[int, ...]
    amplitudes: np.ndarray  # flat, length prod(site_dims)

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)

    def as_tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.site_dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class StateTrajectory:
    """All stage snapshots of one sampled network build."""

    network: MeraNetwork
    snapshots: dict[tuple[int, Stage], DenseState]

    @property
    def leaf(self) -> DenseState:
        return self.snapshots[(self.network.levels, Stage.AFTER_W)]

    def state_at(self, level: int, stage: Stage) -> DenseState:
        key = (level, Stage(stage))
        if key not in self.snapshots:
            raise UsageError(f"no snapshot at level={level}, stage={stage}")
        return self.snapshots[key]


def _approx_int(n: int) -> str:
    """Format an arbitrarily large integer compactly (exact if short)."""
    s = str(n)
    if len(s) <= 12:
        return s
    return f"{s[0]}.{s[1:4]}e+{len(s) - 1}"


def _seed_tuple(seed) -> tuple[int, ...]:
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return tuple(int(s) for s in seed)


def build_state(network: MeraNetwork, seed, max_amplitudes: int | None = None) -> StateTrajectory:
    """Sample every isometry of the network and contract the full state.

    Parameters
    ----------
    seed : int or tuple of ints
        Master seed.  Isometry slot ``(level, stage, position)`` draws from
        the derived key ``(*seed, level, stage_index, position)``, so any
        single tensor is reproducible without rebuilding the rest.
    max_amplitudes : int, optional
        Amplitude budget (default ``DEFAULT_MAX_AMPLITUDES``); the peak
        intermediate size is checked before any allocation.

    Returns
    -------
    StateTrajectory with snapshots at every ``(level, stage)``.
    """
    cap = DEFAULT_MAX_AMPLITUDES if max_amplitudes is None else int(max_amplitudes)
    est = memory_estimate(network.schedule)
    if est.peak > cap:
        raise FeasibilityError(
            f"dense build needs {_approx_int(est.peak)} amplitudes at level "
            f"{est.peak_level} ({est.peak_stage}), budget is {cap}"
        )
    base = _seed_tuple(seed)
    sched = network.schedule
    psi = np.ones((1,), dtype=np.complex128)  # level 0: one site of dimension 1
    snaps: dict[tuple[int, Stage], DenseState] = {
        (0, Stage.AFTER_W): DenseState(0, Stage.AFTER_W, (1,), psi.copy())
    }
    for k in range(1, sched.levels + 1):
        dv, dk = sched.dims_v[k], sched.dims[k]
        n_prev = 1 << (k - 1)
        n = 1 << k
        # splitting: site s (dim dims[k-1]) -> children (2s, 2s+1), dim dv each
        for s in range(n_prev):
            iso = sample_isometry(psi.shape[s], dv * dv, (*base, k, 0, s)).matrix
            psi = np.moveaxis(np.tensordot(iso, psi, axes=(1, s)), 0, s)
        psi = psi.reshape((dv,) * n)
        snaps[(k, Stage.AFTER_V)] = DenseState(
            k, Stage.AFTER_V, (dv,) * n, psi.reshape(-1).copy()
        )
        # rotation: staggered pairs, the last one wrapping around the ring
        for slot, (p, q) in enumerate(network.w_pairs(k)):
            iso = sample_isometry(dv * dv, dk * dk, (*base, k, 1, slot)).matrix
            t = np.moveaxis(psi, (p, q), (0, 1))
            rest = t.shape[2:]
            t = iso @ t.reshape(dv * dv, -1)
            psi = np.moveaxis(t.reshape((dk, dk) + rest), (0, 1), (p, q))
        snaps[(k, Stage.AFTER_W)] = DenseState(
            k, Stage.AFTER_W, (dk,) * n, psi.reshape(-1).copy()
        )
    return StateTrajectory(network=network, snapshots=snaps)


# ---------------------------------------------------------------------------
# reduced states and entropies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced density matrix over an ordered tuple of site dimensions."""

    dims: tuple[int, ...]
    matrix: np.ndarray


def _sites_of(region) -> list[int]:
    if isinstance(region, Interval):
        return region.sites()
    return list(region)


def _split_amplitudes(state: DenseState, sites: list[int]) -> np.ndarray:
    """Reshape amplitudes to (dim(sites), dim(rest)) with ``sites`` leading."""
    if len(set(sites)) != len(sites):
        raise UsageError(f"repeated sites in {sites}")
    if any(not 0 <= s < state.n_sites for s in sites):
        raise UsageError(f"sites {sites} outside ring of {state.n_sites}")
    t = state.as_tensor()
    if sites:
        t = np.moveaxis(t, sites, range(len(sites)))
    d_in = int(np.prod([state.site_dims[s] for s in sites], dtype=object)) if sites else 1
    return t.reshape(d_in, -1)


def reduced_density(state: DenseState, region) -> DensityMatrix:
    """Reduced density matrix of an interval or explicit site list.

    The site order of ``region`` fixes the tensor factor order of the
    result.  The empty region gives the 1x1 matrix [[1.0]].
    """
    sites = _sites_of(region)
    a = _split_amplitudes(state, sites)
    rho = a @ a.conj().T
    dims = tuple(state.site_dims[s] for s in sites) if sites else (1,)
    return DensityMatrix(dims=dims, matrix=rho)


def interval_spectrum(state: DenseState, region) -> np.ndarray:
    """Eigenvalues of the reduced state of ``region``, descending.

    Computed as squared singular values of the split amplitude tensor, which
    also makes the complement's spectrum manifestly identical.
    """
    a = _split_amplitudes(state, _sites_of(region))
    s = np.linalg.svd(a, compute_uv=False)
    p = np.clip(s * s, 0.0, None)
    return np.sort(p)[::-1]


def _probs_of(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        rho = rho.matrix
    rho = np.asarray(rho)
    if rho.ndim == 2:
        p = np.linalg.eigvalsh(rho)
    else:
        p = rho  # already a spectrum
    if np.min(p) < -1e-9:
        raise UsageError(f"not a state: eigenvalue {np.min(p):.3e}")
    total = float(np.sum(p))
    if abs(total - 1.0) > 1e-8:
        raise UsageError(f"not normalized: trace {total:.12f}")
    return np.clip(p, 0.0, None)


def entropy_vn(rho) -> float:
    """Von Neumann entropy in nats of a density matrix or spectrum."""
    p = _probs_of(rho)
    p = p[p > _EIG_CLAMP]
    return float(-(p * np.log(p)).sum())


def entropy_renyi2(rho) -> float:
    """Order-2 Renyi entropy ``-log tr(rho^2)`` in nats."""
    p = _probs_of(rho)
    return float(-math.log(float((p * p).sum())))


def mutual_information(state: DenseState, left: Interval, right: Interval) -> float:
    """``S(left) + S(right) - S(left+right)`` for disjoint regions, in nats."""
    ls, rs = left.sites(), right.sites()
    if set(ls) & set(rs):
        raise UsageError("regions overlap")
    s_l = entropy_vn(interval_spectrum(state, ls))
    s_r = entropy_vn(interval_spectrum(state, rs))
    s_u = entropy_vn(interval_spectrum(state, ls + rs))
    return s_l + s_r - s_u


# ---------------------------------------------------------------------------
# Monte Carlo sweeps
# ---------------------------------------------------------------------------


def _mean_stderr(x: np.ndarray) -> tuple[float, float]:
    n = len(x)
    se = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else float("inf")
    return float(x.mean()), se


@dataclass(frozen=True)
class EntropySamples:
    """Per-trial entropies of one region."""

    interval: Interval
    samples_s: np.ndarray
    samples_s2: np.ndarray

    @property
    def mean_s(self) -> float:
        return _mean_stderr(self.samples_s)[0]

    @property
    def stderr_s(self) -> float:
        return _mean_stderr(self.samples_s)[1]

    @property
    def mean_s2(self) -> float:
        return _mean_stderr(self.samples_s2)[0]

    @property
    def stderr_s2(self) -> float:
        return _mean_stderr(self.samples_s2)[1]

    @property
    def mean_exp_neg_s2(self) -> float:
        return _mean_stderr(np.exp(-self.samples_s2))[0]

    @property
    def stderr_exp_neg_s2(self) -> float:
        return _mean_stderr(np.exp(-self.samples_s2))[1]


def mc_entropy_sweep(
    network: MeraNetwork,
    intervals: list[Interval],
    trials: int,
    seed,
    max_amplitudes: int | None = None,
) -> dict[Interval, EntropySamples]:
    """Sample ``trials`` networks once and read all intervals off each draw.

    Trial ``t`` uses master seed ``(*seed, t)``, so any subset of trials is
    reproducible independently of sweep composition.
    """
    if trials < 1:
        raise UsageError("trials must be positive")
    base = _seed_tuple(seed)
    acc_s = {iv: np.empty(trials) for iv in intervals}
    acc_s2 = {iv: np.empty(trials) for iv in intervals}
    for t in range(trials):
        traj = build_state(network, (*base, t), max_amplitudes=max_amplitudes)
        for iv in intervals:
            spec = interval_spectrum(traj.state_at(iv.level, iv.stage), iv)
            keep = spec[spec > _EIG_CLAMP]
            acc_s[iv][t] = float(-(keep * np.log(keep)).sum())
            acc_s2[iv][t] = -math.log(float((spec * spec).sum()))
    return {
        iv: EntropySamples(interval=iv, samples_s=acc_s[iv], samples_s2=acc_s2[iv])
        for iv in intervals
    }


def mc_entropy_stats(
    network: MeraNetwork,
    interval: Interval,
    trials: int,
    seed,
    max_amplitudes: int | None = None,
) -> EntropySamples:
    """Monte Carlo entropies of a single region; see `mc_entropy_sweep`."""
    return mc_entropy_sweep(network, [interval], trials, seed, max_amplitudes)[interval]


@dataclass(frozen=True)
class MiSamples:
    """Per-trial mutual information of one region pair."""

    left: Interval
    right: Interval
    samples: np.ndarray

    @property
    def mean(self) -> float:
        return _mean_stderr(self.samples)[0]

    @property
    def stderr(self) -> float:
        return _mean_stderr(self.samples)[1]


def mc_mutual_information(
    network: MeraNetwork,
    pairs: list[tuple[Interval, Interval]],
    trials: int,
    seed,
    max_amplitudes: int | None = None,
) -> list[MiSamples]:
    """Monte Carlo mutual information for several pairs off shared draws."""
    if trials < 1:
        raise UsageError("trials must be positive")
    base = _seed_tuple(seed)
    out = [np.empty(trials) for _ in pairs]
    for t in range(trials):
        traj = build_state(network, (*base, t), max_amplitudes=max_amplitudes)
        for idx, (left, right) in enumerate(pairs):
            if (left.level, left.stage) != (right.level, right.stage):
                raise UsageError("pair must live on one ring and stage")
            out[idx][t] = mutual_information(traj.state_at(left.level, left.stage), left, right)
    return [
        MiSamples(left=left, right=right, samples=samples)
        for (left, right), samples in zip(pairs, out)
    ]


# ---------------------------------------------------------------------------
# correlation proxies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorrelationProxies:
    """Cheap witnesses of correlations between two separated regions.

    ``trace_norm_bound``   - ``|| rho_XY - rho_X x rho_Y ||_1``, which upper
    bounds any normalized connected correlator between the regions.

    ``schmidt_max``        - largest eigenvalue of the reduced state across
    the cut that groups X with its rotation partner sites against the rest.

    ``l2_bound``           - ``sqrt(tr rho_cut^2) * sqrt(dim X)``: the
    Cauchy-Schwarz relaxation of the correlator through that cut, using the
    purity of the cut rather than ``schmidt_max * sqrt(rank)`` (always at
    least as tight).
    """

    trace_norm_bound: float
    l2_bound: float
    schmidt_max: float


def correlation_proxies(state: DenseState, x: Interval, y: Interval) -> CorrelationProxies:
    """Correlation witnesses between disjoint regions of one state.

    Empty ``y`` (or ``x``) is a valid degenerate call: all proxies are 0.
    """
    xs, ys = x.sites(), y.sites()
    if set(xs) & set(ys):
        raise UsageError("regions overlap")
    if not xs or not ys:
        return CorrelationProxies(0.0, 0.0, 0.0)

    rho_xy = reduced_density(state, xs + ys).matrix
    rho_x = reduced_density(state, xs).matrix
    rho_y = reduced_density(state, ys).matrix
    diff = rho_xy - np.kron(rho_x, rho_y)
    trace_norm = float(np.abs(np.linalg.eigvalsh(diff)).sum())

    # cut: X plus the rotation partners of its boundary sites vs the rest
    cut = list(xs)
    for s in (xs[0], xs[-1]):
        p = w_partner(state.level, s)
        if p not in cut and p not in ys:
            cut.append(p)
    spec = interval_spectrum(state, cut)
    schmidt_max = float(spec[0])
    purity = float((spec * spec).sum())
    dim_x = float(np.prod([state.site_dims[s] for s in xs]))
    l2_bound = math.sqrt(purity) * math.sqrt(dim_x)
    return CorrelationProxies(
        trace_norm_bound=trace_norm, l2_bound=l2_bound, schmidt_max=schmidt_max
    )
