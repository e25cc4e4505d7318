"""Exact Green functions: free line, open star, and the two-vertex graph.

All Green functions solve G'' + k^2 G = delta(x - x') on their domain with a
unit derivative jump across the source; the free-line kernel is

    G0(x, x') = exp(ik |x - x'|) / (2ik).

Every result is returned as a :class:`GreenDecomposition` splitting the total
into the free part G0 and the inhomogeneous remainder.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .errors import InputError, PoleProximityError, ResonantBondError, SingularWavenumberError
from .scattering import POLE_TOLERANCE, CompositeAmplitudes, VertexSMatrix

#: |sin kL| below this counts as a resonant bond (k on the bond's own spectrum).
RESONANCE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GreenDecomposition:
    """Green-function value split as total = free_part + gamma_part."""

    total: complex
    free_part: complex
    gamma_part: complex
    k: complex
    x_initial: float
    x_final: float


def _decompose(total: complex, free_part: complex, k, x_i, x_f) -> GreenDecomposition:
    # gamma_part is defined by subtraction, so the decomposition is exact.
    return GreenDecomposition(total, free_part, total - free_part, complex(k), float(x_i), float(x_f))


def free_green(k: complex, x_i: float, x_f: float) -> complex:
    """Free-line kernel exp(ik |x_f - x_i|) / (2ik)."""
    if k == 0:
        raise SingularWavenumberError("free Green function is singular at k = 0")
    k = complex(k)
    return cmath.exp(1j * k * abs(x_f - x_i)) / (2j * k)


def star_green(
    n: int, l: int, k: complex, x_i: float, x_f: float, s: VertexSMatrix
) -> GreenDecomposition:
    """Green function of a star of semi-infinite leads joined at one vertex.

    Coordinates are measured outward from the vertex on leads ``n`` (source)
    and ``l`` (observation):

        G_nl = (1/2ik) { delta_nl exp(ik|x_f - x_i|) + S_nl exp(ik(x_f + x_i)) }
    """
    if not (0 <= n < s.dim and 0 <= l < s.dim):
        raise InputError(f"lead indices ({n}, {l}) out of range for a {s.dim}-lead star")
    if x_i < 0 or x_f < 0:
        raise InputError("lead coordinates are measured outward from the vertex and must be >= 0")
    if k == 0:
        raise SingularWavenumberError("star Green function is singular at k = 0")
    k = complex(k)
    free = free_green(k, x_i, x_f) if n == l else 0.0 + 0.0j
    scattered = s.entries[l, n] * cmath.exp(1j * k * (x_f + x_i)) / (2j * k)
    return _decompose(free + scattered, free, k, x_i, x_f)


def two_vertex_green(
    k: complex, x_i: float, x_f: float, ca: CompositeAmplitudes
) -> GreenDecomposition:
    """Green function of the two-vertex composite graph on 0 <= x <= ell.

    Four-term closed form with prefactor 1/(2ikg); the symmetric composite
    amplitudes enter as written, with the (r_big^2 - s_big^2) combination in
    the backward-reflected term.  Note the direct term carries
    exp(ik (x_f - x_i)) with a signed difference, so the x_f < x_i branch is
    the analytic continuation of the ordered form rather than its mirror
    image; free_part always uses |x_f - x_i|.
    """
    ell = ca.ell
    if not (0 <= x_i <= ell and 0 <= x_f <= ell):
        raise InputError(f"coordinates must lie in [0, {ell}]")
    if k == 0:
        raise SingularWavenumberError("two-vertex Green function is singular at k = 0")
    if abs(ca.f) < POLE_TOLERANCE:
        raise PoleProximityError("composite amplitudes evaluated at a spectral pole")
    k = complex(k)
    s, r, g = ca.s_big, ca.r_big, ca.g
    e = cmath.exp(1j * k * ell)

    total = (
        (1.0 - s * e) * cmath.exp(1j * k * (x_f - x_i))
        + r * cmath.exp(1j * k * (x_f + x_i))
        + (s + (r * r - s * s) * e) * cmath.exp(1j * k * (ell - x_f + x_i))
        + r * cmath.exp(1j * k * (2 * ell - x_f - x_i))
    ) / (2j * k * g)
    return _decompose(total, free_green(k, x_i, x_f), k, x_i, x_f)


def bond_wavefunction(phi_i: complex, phi_j: complex, k: float, length: float, x: float) -> complex:
    """Wavefunction on a bond from its two vertex values (zero potential):

        psi(x) = [phi_i sin(k (L - x)) + phi_j sin(k x)] / sin(k L),

    which interpolates phi_i at x = 0 and phi_j at x = L.
    """
    if not 0 <= x <= length:
        raise InputError(f"x must lie in [0, {length}]")
    k = complex(k)
    denom = cmath.sin(k * length)
    if abs(denom) < RESONANCE_TOLERANCE:
        raise ResonantBondError(f"sin(kL) = {denom}: k is an eigenvalue of the bond")
    return (phi_i * cmath.sin(k * (length - x)) + phi_j * cmath.sin(k * x)) / denom


def trace_gamma(k: complex, ca: CompositeAmplitudes) -> complex:
    """Closed-form diagonal integral of the two-vertex Green function.

    Equals the quadrature of ``two_vertex_green(k, x, x, ca).total`` over
    x in [0, ell]:

        -[(1 + (r_big^2 - s_big^2) e^{2ik ell}) ik ell + (e^{2ik ell} - 1) r_big] / (2 k^2 g)

    The free-line contribution ell/(2ik) is still included; the vacuum-energy
    integrand subtracts it.
    """
    if k == 0:
        raise SingularWavenumberError("trace is singular at k = 0")
    if abs(ca.f) < POLE_TOLERANCE:
        raise PoleProximityError("composite amplitudes evaluated at a spectral pole")
    k = complex(k)
    s, r, g, ell = ca.s_big, ca.r_big, ca.g, ca.ell
    e2 = cmath.exp(2j * k * ell)
    return -((1.0 + (r * r - s * s) * e2) * 1j * k * ell + (e2 - 1.0) * r) / (2 * k * k * g)
