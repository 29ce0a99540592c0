"""Gamma-function helpers shared by the norm and moment formulas."""
import math


def log_gamma(x):
    """log|Gamma(x)|; raises on poles."""
    if x <= 0 and x == math.floor(x):
        raise ValueError(f"Gamma has a pole at {x}")
    return math.lgamma(x)


def pochhammer(a, n):
    """Rising factorial (a)_n for integer n >= 0, by direct product."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = 1.0
    for i in range(n):
        out *= a + i
    return out


def log_pochhammer(a, n):
    """log (a)_n for a > 0 via log-Gamma differences."""
    if a <= 0:
        return math.log(abs(pochhammer(a, n)))
    return math.lgamma(a + n) - math.lgamma(a)


def log_beta(a, b):
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def sphere_area(d):
    """Surface area of S^{d-1}: 2 pi^{d/2} / Gamma(d/2)."""
    return math.exp(math.log(2.0) + 0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d))


def log_ball_constant(mu, d):
    if mu <= -1:
        raise ValueError(f"mu must exceed -1, got {mu}")
    return math.lgamma(mu + 0.5 * d + 1) - 0.5 * d * math.log(math.pi) - math.lgamma(mu + 1)


def ball_constant(mu, d):
    """Normalisation b_mu making the W_mu ball measure a probability measure."""
    return math.exp(log_ball_constant(mu, d))
