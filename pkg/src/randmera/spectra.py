"""Singular spectra of the scaled coarse-graining channel.

A random isometry from dimension ``d_A`` into ``d_B * d_E`` induces the map

    O  ->  sqrt(d_B / d_A) * trace_over_E( W O W^dagger )

from ``d_A x d_A`` operators to ``d_B x d_B`` operators.  Its matricization
in the basis of elementary matrix units (row-major index pairing) is a
``d_B^2 x d_A^2`` matrix whose singular values control how fast operator
correlations die off under coarse graining.  The key dimensionless ratios
are ``x = d_B / (d_A d_E)`` and ``y = d_A / (d_B d_E)``: at ``y = 1`` the
map is an isometry on operators (all singular values exactly 1), while for
small ``x`` and ``y`` the top value sits near 1 with a gap to the rest, and
the second value empirically tracks ``sqrt(y)``.

The module also provides the Frobenius-mass check (the squared singular
values sum to about ``d_A``), and the rescaling experiments that overlay
spectra of different sizes on a common curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .haar import McEstimate, moment_constants, sample_isometry, splittable_rng

__all__ = [
    "CollapseRow",
    "SecondValueRow",
    "SingularSpectrum",
    "SuperOperatorSpec",
    "build_superop",
    "collapse_experiment",
    "frobenius_check",
    "frobenius_exact",
    "second_singular_scaling",
    "singular_spectrum",
]


@dataclass(frozen=True)
class SuperOperatorSpec:
    """Dimensions and seed of one random coarse-graining map."""

    d_A: int
    d_B: int
    d_E: int
    seed: int = 0

    def __post_init__(self):
        for name in ("d_A", "d_B", "d_E"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be a positive integer")
        if self.d_B * self.d_E < self.d_A:
            raise UsageError(
                f"d_B*d_E = {self.d_B * self.d_E} must be at least d_A = {self.d_A}"
            )

    @property
    def x(self) -> float:
        return self.d_B / (self.d_A * self.d_E)

    @property
    def y(self) -> float:
        return self.d_A / (self.d_B * self.d_E)

    @property
    def label(self) -> str:
        return f"{self.d_A}:{self.d_B}:{self.d_E}"


@dataclass(frozen=True)
class SingularSpectrum:
    """Descending singular values of one matricized map."""

    spec: SuperOperatorSpec
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.spec.d_B**2:
            raise UsageError("spectrum length must be d_B squared")


def _superop_from_matrix(w: np.ndarray, d_A: int, d_B: int, d_E: int) -> np.ndarray:
    w3 = w.reshape(d_B, d_E, d_A)
    m = np.einsum("bea,cef->bcaf", w3, w3.conj())
    return math.sqrt(d_B / d_A) * m.reshape(d_B * d_B, d_A * d_A)


def build_superop(spec: SuperOperatorSpec) -> np.ndarray:
    """Matricization of the scaled channel, shape (d_B^2, d_A^2).

    Row index is the unit-matrix pair (b, c) flattened row-major; column
    index the pair (a, f).  The basis affects exported matrices only; the
    singular values are basis independent.
    """
    w = sample_isometry(spec.d_A, spec.d_B * spec.d_E, spec.seed).matrix
    return _superop_from_matrix(w, spec.d_A, spec.d_B, spec.d_E)


def singular_spectrum(spec: SuperOperatorSpec) -> SingularSpectrum:
    """Full descending singular spectrum of one sampled map."""
    values = np.linalg.svd(build_superop(spec), compute_uv=False)
    return SingularSpectrum(spec=spec, values=values)


def frobenius_exact(d_A: int, d_B: int, d_E: int) -> float:
    """Average squared Frobenius mass of the scaled channel, closed form.

    Contracting the second-order average of four isometry entries gives

        (d_B/d_A) * [ c*(d_B d_E^2 d_A + d_B^2 d_E d_A^2)
                      + c'*(d_B d_E^2 d_A^2 + d_B^2 d_E d_A) ]

    which approaches ``d_A`` when ``d_A`` is well below ``d_B * d_E``.  The
    one-dimensional input is a special case (a random pure state instead of
    an isometry) and reduces to ``2 d_B (d_B + d_E) / (d_B d_E + 1)``.
    """
    if d_B * d_E < d_A:
        raise UsageError("d_B*d_E must be at least d_A")
    if d_A == 1:
        return 2.0 * d_B * (d_B + d_E) / (d_B * d_E + 1.0)
    mc = moment_constants(d_A, d_B * d_E)
    t_direct = d_B * d_E**2 * d_A + d_B**2 * d_E * d_A**2
    t_swapped = d_B * d_E**2 * d_A**2 + d_B**2 * d_E * d_A
    return (d_B / d_A) * (mc.c * t_direct + mc.c_prime * t_swapped)


def frobenius_check(spec: SuperOperatorSpec, trials: int, seed) -> McEstimate:
    """Monte Carlo mean of the squared Frobenius mass over fresh draws."""
    if trials < 1:
        raise UsageError("trials must be positive")
    rng = splittable_rng(seed)
    masses = np.empty(trials)
    for t in range(trials):
        z = rng.normal(size=(spec.d_B * spec.d_E, spec.d_A)) + 1j * rng.normal(
            size=(spec.d_B * spec.d_E, spec.d_A)
        )
        q, r = np.linalg.qr(z)
        diag = np.diagonal(r)
        w = q * (diag / np.abs(diag))[None, :]
        m = _superop_from_matrix(w, spec.d_A, spec.d_B, spec.d_E)
        masses[t] = float(np.sum(np.abs(m) ** 2))
    stderr = float(masses.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("inf")
    return McEstimate(value=float(masses.mean()), stderr=stderr, trials=trials)


@dataclass(frozen=True)
class CollapseRow:
    """One rescaled point of one spectrum: (curve label, index, x, y)."""

    label: str
    index: int
    x: float
    y: float


def collapse_experiment(
    specs: list[SuperOperatorSpec],
    rescale: str,
    shift: float = 0.706,
    alpha: float = 2.0 / 3.0,
) -> list[CollapseRow]:
    """Overlay several spectra after rescaling, dropping the top value.

    ``rescale="sqrt_d"`` plots ``lambda(i) * sqrt(d)`` against ``i / d^2``
    and requires each spec to have all three dimensions equal.
    ``rescale="affine"`` plots ``(lambda(i) - shift) * d_B**alpha`` against
    ``i / d_B^2``; shift and exponent are free parameters (the defaults are
    the ones that happen to work for the fixed-``y`` family).  The largest
    singular value of each spectrum is excluded in both modes.
    """
    if not specs:
        raise UsageError("need at least one spec")
    if rescale not in ("sqrt_d", "affine"):
        raise UsageError(f"unknown rescale mode {rescale!r}")
    rows: list[CollapseRow] = []
    for spec in specs:
        if rescale == "sqrt_d" and not spec.d_A == spec.d_B == spec.d_E:
            raise UsageError("sqrt_d mode needs d_A = d_B = d_E")
        values = singular_spectrum(spec).values
        d_sq = spec.d_B**2
        for i in range(1, len(values)):
            lam = float(values[i])
            if rescale == "sqrt_d":
                ycoord = lam * math.sqrt(spec.d_B)
            else:
                ycoord = (lam - shift) * spec.d_B**alpha
            rows.append(CollapseRow(label=spec.label, index=i, x=i / d_sq, y=ycoord))
    return rows


@dataclass(frozen=True)
class SecondValueRow:
    """Monte Carlo statistics of the second singular value at one size."""

    d: int
    mean: float
    stderr: float
    ref_inv_sqrt_d: float


def second_singular_scaling(d_range: list[int], trials: int, seed) -> list[SecondValueRow]:
    """Mean second singular value across equal-dimension sizes.

    Each size ``d`` uses ``d_A = d_B = d_E = d``; the reference column is
    ``1/sqrt(d)``, the observed scaling of the second value.
    """
    if trials < 1:
        raise UsageError("trials must be positive")
    base = (seed,) if isinstance(seed, int) else tuple(seed)
    rows = []
    for d in d_range:
        vals = np.empty(trials)
        for t in range(trials):
            w = sample_isometry(d, d * d, (*base, d, t)).matrix
            m = _superop_from_matrix(w, d, d, d)
            vals[t] = float(np.linalg.svd(m, compute_uv=False)[1])
        stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("inf")
        rows.append(
            SecondValueRow(
                d=d, mean=float(vals.mean()), stderr=stderr, ref_inv_sqrt_d=1.0 / math.sqrt(d)
            )
        )
    return rows
