"""Haar-random isometries and their low-order matrix-element moments.

An isometry here is a complex matrix ``W`` of shape ``(d_out, d_in)`` with
``W† W = I``.  Sampling draws a complex Gaussian matrix and orthonormalizes
it by QR, dividing out the phases of the triangular factor's diagonal so the
result is exactly Haar distributed (the plain QR of a Ginibre matrix is not).

The fourth moment of matrix elements,

    E[ W_ij  conj(W)_kl  W_ab  conj(W)_cd ],

is a combination of four delta patterns with two coefficients ``c`` and
``c'`` fixed by contracting both sides with two independent delta patterns.
``moment_constants`` returns the closed-form coefficients;
``fourth_moment_exact`` and ``fourth_moment_mc`` evaluate an arbitrary
delta-pattern contraction in closed form and by Monte Carlo, which is the
oracle used to validate the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMomentError, UsageError

__all__ = [
    "Isometry",
    "McEstimate",
    "MomentConstants",
    "CANONICAL_CONTRACTIONS",
    "COL_PAIRINGS",
    "MIXED_CONTRACTION",
    "ROW_PAIRINGS",
    "fourth_moment_exact",
    "fourth_moment_mc",
    "moment_constants",
    "pure_state_moment_constant",
    "sample_isometry",
    "sample_isometry_batch",
    "splittable_rng",
]


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def splittable_rng(seed) -> np.random.Generator:
    """Build a Generator from a counter-style seed.

    Parameters
    ----------
    seed : int, tuple of ints, or numpy.random.Generator
        An integer master seed, a tuple ``(master, index, ...)`` naming one
        slot of a larger experiment, or an existing generator (returned
        unchanged).  Tuple seeds make any single isometry of a sampled
        network reproducible in isolation.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (int, np.integer)):
        key = (int(seed),)
    else:
        key = tuple(int(s) for s in seed)
    if any(s < 0 for s in key):
        raise UsageError(f"seed components must be non-negative, got {key}")
    return np.random.default_rng(np.random.SeedSequence(key))


@dataclass(frozen=True)
class Isometry:
    """A sampled isometry ``matrix`` of shape ``(d_out, d_in)``."""

    d_in: int
    d_out: int
    matrix: np.ndarray


def _haar_from_gaussian(z: np.ndarray) -> np.ndarray:
    """Orthonormalize a (batched) Ginibre draw into exact Haar columns."""
    q, r = np.linalg.qr(z)
    diag = np.einsum("...ii->...i", r)
    # dividing out the diagonal phases makes the triangular factor's diagonal
    # real-positive, which removes the QR gauge freedom
    phase = np.where(np.abs(diag) == 0, 1.0, diag / np.abs(diag))
    return q * phase[..., None, :]


def sample_isometry(d_in: int, d_out: int, seed) -> Isometry:
    """Draw one Haar-random isometry from dimension ``d_in`` into ``d_out``.

    Parameters
    ----------
    d_in, d_out : int
        Positive dimensions with ``d_in <= d_out``.
    seed : int, tuple of ints, or numpy.random.Generator
        See `splittable_rng`.  The same seed always yields the same matrix.
    """
    if d_in < 1 or d_out < 1:
        raise UsageError(f"dimensions must be positive, got ({d_in}, {d_out})")
    if d_in > d_out:
        raise UsageError(f"no isometry into a smaller space: d_in={d_in} > d_out={d_out}")
    rng = splittable_rng(seed)
    z = rng.normal(size=(d_out, d_in)) + 1j * rng.normal(size=(d_out, d_in))
    return Isometry(d_in=d_in, d_out=d_out, matrix=_haar_from_gaussian(z))


def sample_isometry_batch(d_in: int, d_out: int, trials: int, seed) -> np.ndarray:
    """Draw ``trials`` independent isometries as an array ``(trials, d_out, d_in)``."""
    if d_in < 1 or d_out < 1 or d_in > d_out:
        raise UsageError(f"invalid dimensions ({d_in}, {d_out})")
    if trials < 1:
        raise UsageError("trials must be positive")
    rng = splittable_rng(seed)
    z = rng.normal(size=(trials, d_out, d_in)) + 1j * rng.normal(size=(trials, d_out, d_in))
    return _haar_from_gaussian(z)


# ---------------------------------------------------------------------------
# second-moment coefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentConstants:
    """Coefficients of the two delta-pattern families in the fourth moment."""

    d1: int
    d2: int
    c: float
    c_prime: float


def moment_constants(d1: int, d2: int) -> MomentConstants:
    """Closed-form fourth-moment coefficients for a ``d1 -> d2`` Haar isometry.

    The coefficients solve the 2x2 linear system obtained by tracing the
    moment identity against the two independent delta patterns, whose traces
    equal ``d1**2`` and ``d1``.  For the square case ``d1 == d2 == d`` they
    reduce to ``c = 1/(d**2 - 1)`` and ``c' = -1/(d (d**2 - 1))``.

    Raises
    ------
    DegenerateMomentError
        If ``d1 == 1`` or ``d2 == 1``; the defining system is singular there
        and `pure_state_moment_constant` applies instead.
    """
    if d1 < 1 or d2 < 1 or d1 > d2:
        raise UsageError(f"invalid dimensions ({d1}, {d2})")
    if d1 == 1 or d2 == 1:
        raise DegenerateMomentError(
            f"moment constants are singular at ({d1}, {d2}); "
            "use pure_state_moment_constant for the rank-one case"
        )
    a = d1 * d1 * d2 * d2 + d1 * d2
    b = d1 * d1 * d2 + d1 * d2 * d2
    den = a * a - b * b  # = d1 d2 (d1-1)(d2-1) * d1 d2 (d1+1)(d2+1)
    c = (d1 * d1 * a - d1 * b) / den
    c_prime = (d1 * a - d1 * d1 * b) / den
    return MomentConstants(d1=d1, d2=d2, c=c, c_prime=c_prime)


def pure_state_moment_constant(d2: int) -> float:
    """Fourth-moment coefficient for an isometry out of a one-dimensional space.

    Such an isometry is a Haar-random unit vector ``w`` in dimension ``d2``;
    the second moment of ``|w><w|`` is the projector onto the symmetric
    subspace divided by its dimension ``d2 (d2 + 1) / 2``, so

        E[ w_i conj(w)_k w_a conj(w)_c ] = (d_ik d_ac + d_ic d_ka) / (d2 (d2 + 1)).

    Returns the common coefficient ``1 / (d2 (d2 + 1))``.
    """
    if d2 < 1:
        raise UsageError(f"dimension must be positive, got {d2}")
    return 1.0 / (d2 * (d2 + 1))


# ---------------------------------------------------------------------------
# delta-pattern contractions
# ---------------------------------------------------------------------------

# The eight indices of W_ij conj(W)_kl W_ab conj(W)_cd split into row indices
# {i, k, a, c} (range d2) and column indices {j, l, b, d} (range d1).  A
# delta pattern is a perfect matching of the rows plus one of the columns.
ROW_PAIRINGS = ("ik|ac", "ic|ka", "ia|kc")
COL_PAIRINGS = ("jl|bd", "jd|lb", "jb|ld")

# The four patterns that appear in the moment identity itself.  Contracting
# the identity against the first gives d1**2 and against the third gives d1,
# independent of the sample; those two exact values pin down c and c'.
CANONICAL_CONTRACTIONS = {
    "direct": ("ik|ac", "jl|bd"),
    "exchange": ("ic|ka", "jd|lb"),
    "direct_rows_exchange_cols": ("ik|ac", "jd|lb"),
    "exchange_rows_direct_cols": ("ic|ka", "jl|bd"),
}

# A pattern that pairs same-tensor indices: its value varies from sample to
# sample (unlike the four above), so it exercises the Monte Carlo error bars.
MIXED_CONTRACTION = ("ia|kc", "jb|ld")

_ROW_LETTERS = "pq"
_COL_LETTERS = "rs"


def _parse_pairing(pairing: str, allowed: tuple[str, ...]) -> tuple[tuple[str, str], ...]:
    if pairing not in allowed:
        raise UsageError(f"unknown pairing {pairing!r}; expected one of {allowed}")
    return tuple((pair[0], pair[1]) for pair in pairing.split("|"))


def _components(p: tuple[tuple[str, str], ...], q: tuple[tuple[str, str], ...]) -> int:
    """Connected components of the union of two matchings on four symbols."""
    parent = {}
    for pair in (*p, *q):
        for e in pair:
            parent.setdefault(e, e)

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in (*p, *q):
        parent[find(a)] = find(b)
    return len({find(e) for e in parent})


def fourth_moment_exact(d1: int, d2: int, contraction: tuple[str, str]) -> float:
    """Closed-form value of the fourth moment contracted with a delta pattern.

    Parameters
    ----------
    contraction : (row_pairing, col_pairing)
        Strings drawn from `ROW_PAIRINGS` and `COL_PAIRINGS`, e.g. the
        entries of `CANONICAL_CONTRACTIONS` or a mixed pattern such as
        ``("ia|kc", "jb|ld")``.
    """
    row_q = _parse_pairing(contraction[0], ROW_PAIRINGS)
    col_q = _parse_pairing(contraction[1], COL_PAIRINGS)
    rows_direct = _parse_pairing("ik|ac", ROW_PAIRINGS)
    rows_exch = _parse_pairing("ic|ka", ROW_PAIRINGS)
    cols_direct = _parse_pairing("jl|bd", COL_PAIRINGS)
    cols_exch = _parse_pairing("jd|lb", COL_PAIRINGS)

    if d1 == 1:
        # rank-one special case: both surviving patterns share one weight
        w = pure_state_moment_constant(d2)
        return w * (
            d2 ** _components(rows_direct, row_q) + d2 ** _components(rows_exch, row_q)
        )

    mc = moment_constants(d1, d2)
    terms = (
        (mc.c, rows_direct, cols_direct),
        (mc.c, rows_exch, cols_exch),
        (mc.c_prime, rows_direct, cols_exch),
        (mc.c_prime, rows_exch, cols_direct),
    )
    return float(
        sum(
            w * d2 ** _components(rp, row_q) * d1 ** _components(cp, col_q)
            for w, rp, cp in terms
        )
    )


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo mean with its standard error."""

    value: float
    stderr: float
    trials: int


def fourth_moment_mc(
    d1: int, d2: int, contraction: tuple[str, str], trials: int, seed
) -> McEstimate:
    """Monte Carlo estimate of the fourth moment contracted with a delta pattern.

    Samples ``trials`` isometries, contracts ``W conj(W) W conj(W)`` against
    the requested delta pattern, and returns mean and standard error.  Serves
    as the oracle for `fourth_moment_exact`: the two canonical trace patterns
    are sample-independent (standard error at floating-point noise), while
    mixed patterns fluctuate and test the coefficients nontrivially.
    """
    row_q = _parse_pairing(contraction[0], ROW_PAIRINGS)
    col_q = _parse_pairing(contraction[1], COL_PAIRINGS)
    w = sample_isometry_batch(d1, d2, trials, seed)

    row_group = {}
    for letter, pair in zip(_ROW_LETTERS, row_q):
        for e in pair:
            row_group[e] = letter
    col_group = {}
    for letter, pair in zip(_COL_LETTERS, col_q):
        for e in pair:
            col_group[e] = letter
    sub = (
        f"t{row_group['i']}{col_group['j']},t{row_group['k']}{col_group['l']},"
        f"t{row_group['a']}{col_group['b']},t{row_group['c']}{col_group['d']}->t"
    )
    vals = np.einsum(sub, w, w.conj(), w, w.conj())
    if np.max(np.abs(vals.imag)) > 1e-8:
        raise RuntimeError("delta-pattern contraction should be real")
    vals = vals.real
    stderr = float(vals.std(ddof=1) / np.sqrt(trials)) if trials > 1 else float("inf")
    return McEstimate(value=float(vals.mean()), stderr=stderr, trials=trials)
