"""Dormand-Prince 5(4) tableau, step and continuous extension."""

import numpy as np

C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1])
A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# 5th-order minus embedded 4th-order weights; last entry multiplies the FSAL stage
E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# 4th-order continuous extension (Shampine); columns multiply sigma..sigma^4
P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

ORDER = 4  # of the error estimator; step factor exponent is -1/(ORDER+1)


def step(fun, t, y, f, h, K):
    """One DOPRI5 step from ``(t, y)`` with ``f = fun(t, y)``.

    Fills ``K`` (shape ``(7, dim)``) with the stages; ``K[6]`` is
    ``fun(t+h, y_new)`` so it can be reused as the next ``f``.
    """
    K[0] = f
    for s in range(1, 6):
        dy = K[:s].T @ A[s] * h
        K[s] = fun(t + C[s] * h, y + dy)
    y_new = y + h * (K[:6].T @ B)
    K[6] = fun(t + h, y_new)
    err = h * (K.T @ E)
    return y_new, err


def dense(y, h, K, sigma):
    """Interpolated state at ``t + sigma*h`` inside the last step."""
    sigma = np.asarray(sigma, dtype=float)
    powers = np.cumprod(np.repeat(sigma[..., None], 4, axis=-1), axis=-1)
    Q = K.T @ P  # (dim, 4)
    return y + h * (powers @ Q.T)


def initial_step(fun, t0, y0, f0, atol, rtol, h_max):
    """Starting step size after Hairer, Norsett & Wanner (II.4)."""
    scale = atol + rtol * np.abs(y0)
    rms = lambda v: float(np.sqrt(np.mean((v / scale) ** 2)))
    d0, d1 = rms(y0), rms(f0)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, h_max)
    y1 = y0 + h0 * f0
    d2 = rms(fun(t0 + h0, y1) - f0) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / (ORDER + 1))
    return min(100 * h0, h1, h_max)
