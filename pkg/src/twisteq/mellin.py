"""Vertical-line Mellin transforms on the log grid.

Convention: M(f, c) = (2*pi)^(-1/2) * integral_0^inf f(r) r^(c-1) dr, so that
with c = a + i*t and x = -log r,

    M(f, a + i t) = (unitary Fourier transform of f(e^-x) e^(-a x))(t).

On the grid this Fourier transform is realized by the DFT with frequencies
t_k = 2*pi*k/(n*h); forward and inverse lines are then exactly mutually
inverse and the discrete Parseval identity holds to rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidGrid, NotAdmissible
from .grid import (
    DECAY_TOL,
    HalfLineFunction,
    LogGrid,
    decay_admissible,
    trapezoid,
    weighted_norm,
)

_SQRT2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class MellinLine:
    """Samples of M(f, a + i t_k) along the vertical line Re z = a.

    t_samples are the DFT frequencies of the source grid, in increasing
    order and symmetric about 0.  `admissible` records whether f decays
    fast enough for the line to approximate the continuum transform.
    """

    a: float
    t_samples: np.ndarray
    values: np.ndarray
    admissible: bool

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise InvalidGrid("Mellin line values contain NaN or Inf")


@dataclass(frozen=True)
class Strip:
    """Closed vertical strip lo <= Re z <= hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise InvalidGrid(f"strip needs lo <= hi, got [{self.lo}, {self.hi}]")


class StripCheck(NamedTuple):
    ok: bool
    diagnostic: str


def line_frequencies(grid: LogGrid) -> np.ndarray:
    """DFT bin frequencies t_k = 2 pi k/(n h), fftshifted to increasing order."""
    return np.fft.fftshift(2.0 * np.pi * np.fft.fftfreq(grid.n_points, d=grid.h))


def line_admissible(f: HalfLineFunction, a: float, tol: float = DECAY_TOL) -> bool:
    """Decay test for the line Re z = a, which weights f by r^{+a}."""
    return decay_admissible(f, -a, tol)


def mellin_line(f: HalfLineFunction, a: float) -> MellinLine:
    """Forward transform along Re z = a.

    values[k] = (h/sqrt(2 pi)) * sum_j f_j e^{-a x_j} e^{-i t_k x_j}, the
    rectangle-rule Fourier transform of the weighted samples.  Admissibility
    is recorded, not required: the discrete transform is always defined and
    exactly invertible.
    """
    grid = f.grid
    with np.errstate(over="ignore", under="ignore"):
        weighted = f.values * np.exp(-a * grid.x)
    if not np.all(np.isfinite(weighted)):
        raise NotAdmissible(f"weight r^{a!r} overflows on this grid")
    t_nat = 2.0 * np.pi * np.fft.fftfreq(grid.n_points, d=grid.h)
    vals = (grid.h / _SQRT2PI) * np.exp(-1j * t_nat * grid.x_min) * np.fft.fft(weighted)
    return MellinLine(
        a=float(a),
        t_samples=line_frequencies(grid),
        values=np.fft.fftshift(vals),
        admissible=line_admissible(f, a),
    )


def mellin_inverse_line(line: MellinLine, grid: LogGrid) -> HalfLineFunction:
    """Inverse transform: h(r_j) = r_j^{-a} * (inverse DFT of the line at x_j).

    Exact inverse of mellin_line on the same grid.
    """
    if line.values.shape != (grid.n_points,):
        raise InvalidGrid("line length does not match grid")
    t_nat = 2.0 * np.pi * np.fft.fftfreq(grid.n_points, d=grid.h)
    vals_nat = np.fft.ifftshift(line.values)
    weighted = (_SQRT2PI / grid.h) * np.fft.ifft(vals_nat * np.exp(1j * t_nat * grid.x_min))
    with np.errstate(over="ignore", under="ignore"):
        values = weighted * np.exp(line.a * grid.x)
    return HalfLineFunction(grid, values)


def line_energy(line: MellinLine) -> float:
    """Trapezoid of |M(f, a+it)|^2 dt along the line."""
    dt = line.t_samples[1] - line.t_samples[0]
    return float(trapezoid(np.abs(line.values) ** 2, dt))


def parseval_defect(f: HalfLineFunction) -> float:
    """Relative gap between ||f||^2 and the line-0 energy integral."""
    norm_sq = weighted_norm(f, 0.0) ** 2
    energy = line_energy(mellin_line(f, 0.0))
    scale = max(norm_sq, np.finfo(float).eps)
    return abs(norm_sq - energy) / scale


def log_derivative(f: HalfLineFunction) -> HalfLineFunction:
    """r d/dr f, computed spectrally as -d/dx on the log grid."""
    return HalfLineFunction(f.grid, -spectral_dx(f.values, f.grid.h))


def spectral_dx(values: np.ndarray, h: float) -> np.ndarray:
    """d/dx by DFT multiplier, including the (unpaired) Nyquist mode.

    Keeping the Nyquist mode makes the multiplier the exact inverse image of
    the line frequencies, so derivative identities hold bin-by-bin.
    """
    n = len(values)
    omega = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
    return np.fft.ifft(np.fft.fft(values) * (1j * omega))


def derivative_rule_defect(f: HalfLineFunction, a: float, tol: float = DECAY_TOL) -> float:
    """Sup-norm defect of M(r f', a+it) = -(a+it) M(f, a+it).

    The left side uses the spectrally computed log-derivative; both f and
    r f' must pass the decay test for the line, otherwise NotAdmissible.
    """
    df = log_derivative(f)
    if not line_admissible(f, a, tol):
        raise NotAdmissible(f"f lacks decay for the line Re z = {a}")
    if not line_admissible(df, a, tol):
        raise NotAdmissible(f"r d/dr f lacks decay for the line Re z = {a}")
    lhs = mellin_line(df, a)
    rhs = mellin_line(f, a)
    z = a + 1j * rhs.t_samples
    num = np.abs(lhs.values + z * rhs.values).max()
    den = np.abs(rhs.values).max()
    if den == 0.0:
        return 0.0
    return float(num / den)


def strip_admissible(f: HalfLineFunction, strip: Strip, tol: float = DECAY_TOL) -> StripCheck:
    """Check the hypotheses for analyticity of M(f, .) on a vertical strip.

    Each edge Re z = e weights f by r^{+e}; the function must pass the decay
    test and have a finite weighted norm at both edges.  The diagnostic names
    the first failing edge.
    """
    for edge in (strip.lo, strip.hi):
        if not line_admissible(f, edge, tol):
            return StripCheck(False, f"non-decaying weighted samples at edge {edge}")
        if not np.isfinite(weighted_norm(f, -edge)):
            return StripCheck(False, f"weighted norm overflows at edge {edge}")
    return StripCheck(True, "ok")
