"""Independent reference computations used to derive and check frozen test values.

Nothing here calls the package's discretization, equilibrium or backprop code.
"""

from __future__ import annotations

import mpmath
import numpy as np


def rk4_integrate(a, b, g, x0, q, d, duration, h=1.0):
    """Classical RK4 on x' = a x + b q + g d with constant inputs."""
    a = np.asarray(a, dtype=float)
    u = np.asarray(b, dtype=float).ravel() * q + np.asarray(g, dtype=float) @ np.asarray(d, dtype=float)
    x = np.array(x0, dtype=float)
    n = int(round(duration / h))

    def f(y):
        return a @ y + u

    for _ in range(n):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def rk4_propagator(a, duration, h=1.0):
    """State-transition matrix over ``duration`` from RK4 applied to each basis vector."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    steps = int(round(duration / h))
    # one RK4 step of a linear system is the polynomial I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24
    ha = h * a
    eye = np.eye(n)
    one_step = eye + ha + ha @ ha / 2 + ha @ ha @ ha / 6 + ha @ ha @ ha @ ha / 24
    return np.linalg.matrix_power(one_step, steps)


def char_poly_roots(a, dps=50):
    """Eigenvalues as roots of det(lambda I - A), evaluated at ``dps`` decimal digits."""
    with mpmath.workdps(dps):
        m = mpmath.matrix([[mpmath.mpf(repr(float(v))) for v in row] for row in np.asarray(a)])
        n = m.rows
        # Faddeev-LeVerrier recursion for the characteristic polynomial coefficients
        coeffs = [mpmath.mpf(1)]
        mk = mpmath.zeros(n, n)
        eye = mpmath.eye(n)
        for k in range(1, n + 1):
            mk = m * mk + coeffs[-1] * eye
            ck = -sum((m * mk)[i, i] for i in range(n)) / k
            coeffs.append(ck)
        roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=200)
        return sorted((complex(r) for r in roots), key=lambda z: z.real)


def iterate_to_equilibrium(a_d, b_d, g_d, x0, q, d, max_steps=2_000_000, tol=1e-12):
    """Repeated zero-order-hold stepping until the state stops moving."""
    x = np.array(x0, dtype=float)
    u = np.asarray(b_d, dtype=float).ravel() * q + np.asarray(g_d, dtype=float) @ np.asarray(d, dtype=float)
    for _ in range(max_steps):
        nxt = a_d @ x + u
        if np.max(np.abs(nxt - x)) < tol:
            return nxt
        x = nxt
    raise RuntimeError("iteration did not converge")


def grid_scan_region(k, b, t_low, t_high, q_max, step=1.0):
    """Brute-force membership of steady-state t_in = k q + b over a q grid."""
    qs = np.arange(0.0, q_max + step / 2, step)
    t = k * qs + b
    inside = (t >= t_low) & (t <= t_high)
    return qs, inside


def mp_forward(weights, biases, x, dps=40):
    """High-precision forward pass of a ReLU MLP with identity output."""
    with mpmath.workdps(dps):
        h = [mpmath.mpf(repr(float(v))) for v in x]
        last = len(weights) - 1
        for i, (w, b) in enumerate(zip(weights, biases)):
            w = np.asarray(w)
            out = []
            for j in range(w.shape[1]):
                s = mpmath.mpf(repr(float(b[j])))
                for k in range(w.shape[0]):
                    s += h[k] * mpmath.mpf(repr(float(w[k, j])))
                out.append(s if i == last else max(s, mpmath.mpf(0)))
            h = out
        return [float(v) for v in h]


def central_difference_grad(loss_fn, flat, h=1e-6):
    """Central finite differences of a scalar function of a flat parameter vector."""
    grad = np.empty_like(flat)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = loss_fn()
        flat[i] = orig - h
        down = loss_fn()
        flat[i] = orig
        grad[i] = (up - down) / (2 * h)
    return grad
