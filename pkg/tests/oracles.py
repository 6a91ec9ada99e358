"""Independent closed-form oracles used to freeze expected values in the tests.

Single-arc distances in the unit disk come from explicit conformal maps:
the slit distance reduces (square root, Möbius, logarithm, hyperbolic
cosine) to a half-plane quadrilateral whose modulus is a ratio of complete
elliptic integrals; the reduced distance is the Green's function of the
complement of an arc, obtained from a Cayley map and the exterior map of a
segment.
"""
import math

import mpmath as mp

mp.mp.dps = 30


def _k(m):
    return mp.ellipk(m**2)


def slit_arc_distance(theta):
    """Extremal distance in the disk between [-1, 0] and {e^{it}: |t| <= theta}."""
    if theta >= math.pi:
        return 0.0
    theta = mp.mpf(theta)
    c = mp.cosh(2 * mp.log(mp.cot(theta / 4)))
    cr = (c - 1) / (c + 1)
    s = mp.sqrt(1 - cr)
    k = (1 - s) / (1 + s)
    return float(_k(k) / _k(mp.sqrt(1 - k**2)))


def reduced_arc_distance(theta):
    """Reduced extremal distance from 0 to {e^{it}: |t| <= theta} in the disk."""
    if theta >= math.pi:
        return 0.0
    a = mp.tan(mp.mpf(theta) / 2)

    def ext(z):
        s = mp.sqrt(z - a) * mp.sqrt(z + a)
        w = (z + s) / a
        return w if abs(w) >= 1 else (z - s) / a

    z = mp.mpc(0, 1)
    w0, w1 = ext(z), ext(mp.mpc(0, -1))
    s = mp.sqrt(z - a) * mp.sqrt(z + a)
    dj = (1 + z / s) / a if abs((z + s) / a) >= 1 else (1 - z / s) / a
    gamma = mp.log((abs(w0) ** 2 - 1) / (2 * abs(dj)))
    green = mp.log(abs((1 - mp.conj(w1) * w0) / (w0 - w1)))
    return float((gamma + green) / (2 * mp.pi))


def sector_level_measure(w, r, opening):
    """Harmonic measure at w of the arc |z| = r in the sector |arg z| < opening/2, |z| < r."""
    zeta = (complex(w) / r) ** (math.pi / opening)
    z = 1j * zeta
    return 2 / math.pi * math.atan2(((1 + z) / (1 - z)).imag, ((1 + z) / (1 - z)).real)


def slit_plane_level_measure(r):
    """Harmonic measure at 0 of {|z| = r} in (C minus [1, inf)) ∩ {|z| < r}."""
    a = 1.0 / r
    b = a / (1 - a) ** 2
    return 2 / math.pi * math.atan(math.sqrt(b / 0.25))
