#!/usr/bin/env python3
"""Generate the 102-tap discrete Meyer low-pass filter bundled in data/banks/dmey.txt.

The ideal Meyer scaling filter H(w) = sqrt(2) * phi_hat(2w) is sampled on the
integer grid centred at tap 51 (tap 0 is zero), then refined with a damped
minimum-norm Gauss-Newton iteration until the taps are orthonormal under even
shifts and sum to sqrt(2). The center frequency is the dominant DFT frequency
of the wavelet function after 8 cascade iterations.

Requires numpy and scipy.
"""
import argparse

import numpy as np
from scipy.integrate import quad

TAPS = 102
CENTER = 51
CASCADE_ITERATIONS = 8


def meyer_nu(x):
    x = min(max(x, 0.0), 1.0)
    return x**4 * (35 - 84 * x + 70 * x * x - 20 * x**3)


def phi_hat(w):
    w = abs(w)
    if w <= 2 * np.pi / 3:
        return 1.0
    if w >= 4 * np.pi / 3:
        return 0.0
    return np.cos(np.pi / 2 * meyer_nu(3 * w / (2 * np.pi) - 1))


def ideal_tap(n):
    f = lambda w: np.sqrt(2) * phi_hat(2 * w) * np.cos(w * n)
    flat, _ = quad(f, 0, np.pi / 3, limit=200, epsabs=1e-15, epsrel=1e-14)
    edge, _ = quad(f, np.pi / 3, 2 * np.pi / 3, limit=400, epsabs=1e-16, epsrel=1e-14)
    return (flat + edge) / np.pi


def constraints(h):
    n = len(h)
    c = [np.dot(h[: n - 2 * m], h[2 * m :]) - (1.0 if m == 0 else 0.0) for m in range(n // 2)]
    c.append(h.sum() - np.sqrt(2))
    return np.array(c)


def jacobian(h):
    n = len(h)
    jac = np.zeros((n // 2 + 1, n))
    for m in range(n // 2):
        for k in range(n - 2 * m):
            jac[m, k] += h[k + 2 * m]
            jac[m, k + 2 * m] += h[k]
    jac[-1, :] = 1.0
    return jac


def orthonormalize(h):
    for _ in range(100):
        c = constraints(h)
        if np.max(np.abs(c)) < 2e-16:
            break
        step = np.linalg.lstsq(jacobian(h), -c, rcond=1e-14)[0]
        t = 1.0
        while np.linalg.norm(constraints(h + t * step)) > np.linalg.norm(c) and t > 1e-6:
            t /= 2
        h = h + t * step
    return h


def cascade_center_frequency(h, iterations):
    n = len(h)
    g = np.array([(-1) ** k * h[n - 1 - k] for k in range(n)])
    # cascade algorithm: one high-pass synthesis step, then low-pass steps
    psi = np.sqrt(2) * g
    for _ in range(iterations - 1):
        up = np.zeros(2 * len(psi) - 1)
        up[::2] = psi
        psi = np.sqrt(2) * np.convolve(up, h)
    # sample grid of the wavelet on its support [0, n - 1]
    grid = (n - 1) * 2**iterations
    psi = np.concatenate([psi, np.zeros(max(0, grid - len(psi)))])[:grid]
    psi = psi - psi.mean()
    support = (grid - 1) / 2.0**iterations
    spectrum = np.abs(np.fft.fft(psi))
    k = int(np.argmax(spectrum))
    if k > len(psi) / 2:
        k = len(psi) - k
    return k / support


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="data/banks/dmey.txt")
    args = parser.parse_args()
    h = np.zeros(TAPS)
    h[1:] = [ideal_tap(k - CENTER) for k in range(1, TAPS)]
    h = orthonormalize(h)
    fr = cascade_center_frequency(h, CASCADE_ITERATIONS)
    with open(args.out, "w") as f:
        f.write("# name=dmey\n")
        f.write(f"# center_frequency={fr:.17e}\n")
        for v in h:
            f.write(f"{v:.17e}\n")


if __name__ == "__main__":
    main()
