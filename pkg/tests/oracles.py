"""Independent reference values, computed without the package's kernel cores."""
from __future__ import annotations

import mpmath as mp

mp.mp.dps = 30


def k1(t, rho):
    t, rho = mp.mpf(t), mp.mpf(rho)
    return (4 * mp.pi * t) ** mp.mpf(-0.5) * mp.exp(-rho ** 2 / (4 * t))


def k3(t, rho):
    t, rho = mp.mpf(t), mp.mpf(rho)
    ratio = rho / mp.sinh(rho) if rho else mp.mpf(1)
    return (4 * mp.pi * t) ** mp.mpf(-1.5) * ratio * mp.exp(-t - rho ** 2 / (4 * t))


def millison(f, n, t, rho):
    """K_{n+2} from a callable K_n by one Millison step (mpmath derivative)."""
    t, rho = mp.mpf(t), mp.mpf(rho)
    return -mp.exp(-n * t) / (2 * mp.pi * mp.sinh(rho)) * mp.diff(lambda r: f(t, r), rho)


def k5(t, rho):
    return millison(k3, 3, t, rho)


def k_even_from_odd(fodd, n, t, rho):
    """K_n (n even) from K_{n+1} by the dimension-lowering integral, s = rho + v^2."""
    t, rho = mp.mpf(t), mp.mpf(rho)

    def f(v):
        s = rho + v * v
        den = 2 * mp.sinh(rho + v * v / 2) * mp.sinh(v * v / 2)
        if v == 0:
            return 2 * mp.sqrt(2) * fodd(t, rho) if rho == 0 else mp.mpf(0)
        return fodd(t, s) * mp.sinh(s) * 2 * v / mp.sqrt(den)

    upper = mp.sqrt(-rho + mp.sqrt(rho * rho + 400 * t)) + 2
    pts = [0, upper / 8, upper / 4, upper / 2, upper]
    return mp.sqrt(2) * mp.exp((2 * n - 1) * t / 4) * mp.quad(f, pts)


def k2(t, rho):
    return k_even_from_odd(k3, 2, t, rho)


def gap3(t, rho):
    """The explicit n = 3 gap formula."""
    t, rho = mp.mpf(t), mp.mpf(rho)
    c = mp.coth(rho)
    return (rho * c - 1) / (2 * t) + 1 / mp.sinh(rho) ** 2 + c ** 2 - 1 / rho ** 2 - c / rho


def log_derivs(f, t, rho):
    """(d log f, d2 log f) in rho by mpmath differentiation."""
    g = lambda r: mp.log(f(t, r))
    return mp.diff(g, rho), mp.diff(g, rho, 2)
