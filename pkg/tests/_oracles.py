"""Brute-force oracles: direct double-loop transcriptions of the definitions.

Deliberately naive so they stay independent of the vectorized paths they
check.
"""

import math


def brute_gamma_hat(bits, h):
    n = len(bits)
    abar = sum(bits) / n
    total = 0.0
    for t in range(h, n):
        total += (bits[t] - abar) * (bits[t - h] - abar)
    return total / n


def brute_gamma_tilde(bits, p, h, u=1.0):
    n = len(bits)
    end = math.floor(n * u)
    total = 0.0
    for t in range(h, end):
        total += (bits[t] - p[t]) * (bits[t - h] - p[t - h])
    denom = n if h == 0 else n - h
    return total / denom


def brute_omega(bits, p):
    n = len(bits)
    num = sum((bits[t] - p[t]) ** 2 * (bits[t - 1] - p[t - 1]) ** 2 for t in range(1, n)) / n
    den = (sum((bits[t] - p[t]) ** 2 for t in range(n)) / n) ** 2
    return num / den


def brute_kernel_estimate(bits, kernel_fn, b):
    """Leave-one-out weighted mean by direct weight summation."""
    n = len(bits)
    out = []
    for t in range(n):
        weights = [0.0 if i == t else kernel_fn((t - i) / (n * b)) for i in range(n)]
        total = sum(weights)
        out.append(sum(w * a for w, a in zip(weights, bits)) / total)
    return out
