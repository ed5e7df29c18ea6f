"""Nonlinear least-squares benchmark suite with convex constraint variants.

The suite holds 58 small problems (2 <= n <= 12, 2 <= m <= 65): the
53-instance benchmark set of More and Wild (2009) built from 22 classical
residual maps, plus five more classics (Biggs EXP6, Gulf research and
development, Powell badly scaled, Wood, Dixon). Residual formulas and
starting points follow the published Fortran references.

Objective convention throughout the package: f(x) = ||r(x)||^2 / 2.
Reference values stored on each problem (value at the standard start, best
known value) use the same convention, halved once from the sum-of-squares
figures in the benchmark literature.

Each problem is paired with four constraint variants (unconstrained, box,
ball, halfspace) and optional multiplicative or additive Gaussian noise on
the residuals, giving the 4 x 58 = 232 benchmark instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Callable, Dict, List, Optional

import numpy as np

from .regions import ConvexRegion, ball, box, halfspace, whole_space

NOISE_KINDS = ("none", "multiplicative", "additive")


@dataclass(frozen=True)
class LeastSquaresProblem:
    """One benchmark problem: r maps R^n to R^m, objective ||r||^2/2."""

    name: str
    n: int
    m: int
    residuals: Callable[[np.ndarray], np.ndarray]
    start: np.ndarray
    f_start: float
    f_optimum: Optional[float]

    def objective(self, x) -> float:
        # overflow at a wild point is an expected outcome: +inf propagates
        with np.errstate(over="ignore", invalid="ignore"):
            r = np.asarray(self.residuals(np.asarray(x, dtype=float)),
                           dtype=float)
            return 0.5 * float(r @ r)


@dataclass(frozen=True)
class NoiseSpec:
    """Synthetic residual noise: kind, standard deviation, stream seed."""

    kind: str = "none"
    sigma: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not self.sigma >= 0.0:
            raise ValueError("noise sigma must be nonnegative")


class EvaluationLedger:
    """Counts objective evaluations and owns the run's noise stream.

    One ledger per solve keeps noisy runs reproducible: the draw sequence
    depends only on the seed and the order of evaluate() calls.
    """

    def __init__(self, noise: NoiseSpec):
        noise.validate()
        self.count = 0
        self.rng = np.random.default_rng(noise.seed)


def apply_noise(r: np.ndarray, eps: np.ndarray, kind: str) -> np.ndarray:
    """Perturb residuals componentwise: multiplicative r*(1+eps) leaves
    exact zeros exact; additive is r+eps."""
    if kind == "multiplicative":
        return r * (1.0 + eps)
    if kind == "additive":
        return r + eps
    raise ValueError(f"unknown noise kind {kind!r}")


def evaluate(problem: LeastSquaresProblem, x, noise: NoiseSpec,
             ledger: EvaluationLedger) -> np.ndarray:
    """One counted residual evaluation, perturbed per the noise spec."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise ValueError(f"{problem.name} expects {problem.n} variables")
    with np.errstate(over="ignore", invalid="ignore"):
        r = np.asarray(problem.residuals(x), dtype=float)
    ledger.count += 1
    if noise.kind == "none" or noise.sigma == 0.0:
        return r
    eps = ledger.rng.normal(0.0, noise.sigma, r.shape)
    return apply_noise(r, eps, noise.kind)


def constraint_variants(n: int) -> Dict[str, ConvexRegion]:
    """The four benchmark feasible regions in dimension n."""
    if n < 1:
        raise ValueError("dimension must be positive")
    return {
        "none": whole_space(n),
        "box": box(np.full(n, 0.1), np.full(n, 20.0)),
        "ball": ball(np.full(n, 5.0), 6.9),
        "halfspace": halfspace(np.ones(n), 1.0),
    }


# --- residual maps -------------------------------------------------------

def linear_full_rank(x, dim_out):
    temp = 2 * x.sum() / dim_out + 1
    out = np.full(dim_out, -temp)
    out[: len(x)] += x
    return out


def linear_rank_one(x, dim_out):
    dim_in = len(x)
    sm = np.arange(1, dim_in + 1) @ x
    return np.arange(1, dim_out + 1) * sm - 1.0


def linear_rank_one_zero_columns_rows(x, dim_out):
    dim_in = len(x)
    sm = (np.arange(2, dim_in) * x[1:-1]).sum()
    fvec = np.arange(dim_out) * sm - 1.0
    fvec[-1] = -1.0
    return fvec


def rosenbrock(x):
    return np.array([10 * (x[1] - x[0] ** 2), 1.0 - x[0]])


def helical_valley(x):
    temp = 8 * np.arctan(1.0)
    temp1 = np.sign(x[1]) * 0.25
    if x[0] > 0:
        temp1 = np.arctan(x[1] / x[0]) / temp
    elif x[0] < 0:
        temp1 = np.arctan(x[1] / x[0]) / temp + 0.5
    temp2 = np.sqrt(x[0] ** 2 + x[1] ** 2)
    return np.array([10 * (x[2] - 10 * temp1), 10 * (temp2 - 1.0), x[2]])


def powell_singular(x):
    return np.array([
        x[0] + 10 * x[1],
        np.sqrt(5.0) * (x[2] - x[3]),
        (x[1] - 2 * x[2]) ** 2,
        np.sqrt(10.0) * (x[0] - x[3]) ** 2,
    ])


def freudenstein_roth(x):
    return np.array([
        -13 + x[0] + ((5 - x[1]) * x[1] - 2) * x[1],
        -29 + x[0] + ((1.0 + x[1]) * x[1] - 14) * x[1],
    ])


def bard(x, y):
    fvec = np.zeros(len(y))
    for i in range(1, round(len(y) / 2) + 1):
        temp = len(y) + 1 - i
        fvec[i - 1] = y[i - 1] - (x[0] + i / (x[1] * temp + x[2] * i))
    for i in range(round(len(y) / 2) + 1, len(y) + 1):
        temp = len(y) + 1 - i
        fvec[i - 1] = y[i - 1] - (x[0] + i / (x[1] * temp + x[2] * temp))
    return fvec


def kowalik_osborne(x, u, y):
    temp1 = u * (u + x[1])
    temp2 = u * (u + x[2]) + x[3]
    return y - x[0] * temp1 / temp2


def meyer(x, y):
    temp = 5 * np.arange(1, len(y) + 1) + 45 + x[2]
    return x[0] * np.exp(x[1] / temp) - y


def watson(x):
    dim_in = len(x)
    fvec = np.zeros(31)
    for i in range(1, 30):
        temp = i / 29
        sum_1 = (np.arange(1, dim_in) * temp ** np.arange(dim_in - 1) * x[1:]).sum()
        sum_2 = (temp ** np.arange(dim_in) * x).sum()
        fvec[i - 1] = sum_1 - sum_2 ** 2 - 1.0
    fvec[29] = x[0]
    fvec[30] = x[1] - x[0] ** 2 - 1.0
    return fvec


def box_3d(x, dim_out):
    fvec = np.zeros(dim_out)
    for i in range(1, dim_out + 1):
        fvec[i - 1] = (
            np.exp(-i / 10 * x[0])
            - np.exp(-i / 10 * x[1])
            + (np.exp(-i) - np.exp(-i / 10)) * x[2]
        )
    return fvec


def jennrich_sampson(x, dim_out):
    i = np.arange(1, dim_out + 1)
    return 2 * (1.0 + i) - np.exp(i * x[0]) - np.exp(i * x[1])


def brown_dennis(x, dim_out):
    fvec = np.zeros(dim_out)
    for i in range(1, dim_out + 1):
        temp = i / 5
        temp_1 = x[0] + temp * x[1] - np.exp(temp)
        temp_2 = x[2] + np.sin(temp) * x[3] - np.cos(temp)
        fvec[i - 1] = temp_1 ** 2 + temp_2 ** 2
    return fvec


def chebyquad(x, dim_out):
    fvec = np.zeros(dim_out)
    dim_in = len(x)
    for i in range(1, dim_in + 1):
        temp_1 = 1.0
        temp_2 = 2 * x[i - 1] - 1.0
        temp_3 = 2 * temp_2
        for j in range(dim_out):
            fvec[j] = fvec[j] + temp_2
            temp_4 = temp_3 * temp_2 - temp_1
            temp_1 = temp_2
            temp_2 = temp_4
    for i in range(1, dim_out + 1):
        fvec[i - 1] = fvec[i - 1] / dim_in
        if i % 2 == 0:
            fvec[i - 1] = fvec[i - 1] + 1 / (i ** 2 - 1.0)
    return fvec


def brown_almost_linear(x):
    dim_in = len(x)
    sm = -(dim_in + 1) + x.sum()
    product = x.prod()
    fvec = x + sm
    fvec[dim_in - 1] = product - 1.0
    return fvec


def osborne_one(x, y):
    temp = 10 * np.arange(len(y))
    return y - (x[0] + x[1] * np.exp(-x[3] * temp) + x[2] * np.exp(-x[4] * temp))


def osborne_two(x, y):
    temp_array = np.zeros((4, len(y)))
    temp = np.arange(len(y)) / 10
    temp_array[0] = np.exp(-x[4] * temp)
    temp_array[1] = np.exp(-x[5] * (temp - x[8]) ** 2)
    temp_array[2] = np.exp(-x[6] * (temp - x[9]) ** 2)
    temp_array[3] = np.exp(-x[7] * (temp - x[10]) ** 2)
    return y - (temp_array.T * x[:4]).T.sum(axis=0)


def bdqrtic(x):
    dim_in = len(x)
    fvec = np.zeros(2 * (dim_in - 4))
    for i in range(dim_in - 4):
        fvec[i] = -4 * x[i] + 3
        fvec[dim_in - 4 + i] = (
            x[i] ** 2
            + 2 * x[i + 1] ** 2
            + 3 * x[i + 2] ** 2
            + 4 * x[i + 3] ** 2
            + 5 * x[dim_in - 1] ** 2
        )
    return fvec


def cube(x):
    fvec = 10 * (x - np.roll(x, 1) ** 3)
    fvec[0] = x[0] - 1.0
    return fvec


def mancino(x):
    dim_in = len(x)
    fvec = np.zeros(dim_in)
    for i in range(dim_in):
        sm = 0
        for j in range(dim_in):
            temp = np.sqrt(x[i] ** 2 + (i + 1) / (j + 1))
            sm += temp * ((np.sin(np.log(temp))) ** 5 + (np.cos(np.log(temp))) ** 5)
        fvec[i] = 1400 * x[i] + (i + 1 - 50) ** 3 + sm
    return fvec


def heart_eight(x, y):
    fvec = np.zeros(len(y))
    fvec[0] = x[0] + x[1] - y[0]
    fvec[1] = x[2] + x[3] - y[1]
    fvec[2] = x[4] * x[0] + x[5] * x[1] - x[6] * x[2] - x[7] * x[3] - y[2]
    fvec[3] = x[6] * x[0] + x[7] * x[1] + x[4] * x[2] + x[5] * x[3] - y[3]
    fvec[4] = (
        x[0] * (x[4] ** 2 - x[6] ** 2)
        - 2 * x[2] * x[4] * x[6]
        + x[1] * (x[5] ** 2 - x[7] ** 2)
        - 2 * x[3] * x[5] * x[7]
        - y[4]
    )
    fvec[5] = (
        x[2] * (x[4] ** 2 - x[6] ** 2)
        + 2 * x[0] * x[4] * x[6]
        + x[3] * (x[5] ** 2 - x[7] ** 2)
        + 2 * x[1] * x[5] * x[7]
        - y[5]
    )
    fvec[6] = (
        x[0] * x[4] * (x[4] ** 2 - 3 * x[6] ** 2)
        + x[2] * x[6] * (x[6] ** 2 - 3 * x[4] ** 2)
        + x[1] * x[5] * (x[5] ** 2 - 3 * x[7] ** 2)
        + x[3] * x[7] * (x[7] ** 2 - 3 * x[5] ** 2)
        - y[6]
    )
    fvec[7] = (
        x[2] * x[4] * (x[4] ** 2 - 3 * x[6] ** 2)
        - x[0] * x[6] * (x[6] ** 2 - 3 * x[4] ** 2)
        + x[3] * x[5] * (x[5] ** 2 - 3 * x[7] ** 2)
        - x[1] * x[7] * (x[7] ** 2 - 3 * x[5] ** 2)
        - y[7]
    )
    return fvec


def biggs_exp6(x, dim_out):
    i = np.arange(1, dim_out + 1)
    t = 0.1 * i
    y = np.exp(-t) - 5 * np.exp(-10 * t) + 3 * np.exp(-4 * t)
    return (x[2] * np.exp(-t * x[0]) - x[3] * np.exp(-t * x[1])
            + x[5] * np.exp(-t * x[4]) - y)


def gulf(x, dim_out):
    t = np.arange(1, dim_out + 1) / 100.0
    y = 25.0 + (-50.0 * np.log(t)) ** (2.0 / 3.0)
    return np.exp(-np.abs(y - x[1]) ** x[2] / x[0]) - t


def powell_badly_scaled(x):
    return np.array([
        1e4 * x[0] * x[1] - 1.0,
        np.exp(-x[0]) + np.exp(-x[1]) - 1.0001,
    ])


def wood(x):
    return np.array([
        10.0 * (x[1] - x[0] ** 2),
        1.0 - x[0],
        np.sqrt(90.0) * (x[3] - x[2] ** 2),
        1.0 - x[2],
        np.sqrt(10.0) * (x[1] + x[3] - 2.0),
        (x[1] - x[3]) / np.sqrt(10.0),
    ])


def dixon(x):
    fvec = np.zeros(11)
    fvec[0] = 1.0 - x[0]
    fvec[1] = 1.0 - x[9]
    fvec[2:] = x[:9] ** 2 - x[1:]
    return fvec


def mancino_start(n):
    x = np.zeros(n)
    for i in range(1, n + 1):
        sm = 0
        for j in range(1, n + 1):
            sm += np.sqrt(i / j) * (
                (np.sin(np.log(np.sqrt(i / j)))) ** 5
                + (np.cos(np.log(np.sqrt(i / j)))) ** 5
            )
        x[i - 1] = -8.7110e-04 * ((i - 50) ** 3 + sm)
    return x


# --- measurement data ----------------------------------------------------

_BARD_Y = np.array([
    0.1400, 0.1800, 0.2200, 0.2500, 0.2900, 0.3200, 0.3500, 0.3900,
    0.3700, 0.5800, 0.7300, 0.9600, 1.3400, 2.1000, 4.3900,
])

_KOWALIK_U = np.array([
    4.0000, 2.0000, 1.0000, 0.5000, 0.2500, 0.1670, 0.1250, 0.1000,
    0.0833, 0.0714, 0.0625,
])

_KOWALIK_Y = np.array([
    0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342,
    0.0323, 0.0235, 0.0246,
])

_MEYER_Y = np.array([
    34780, 28610, 23650, 19630, 16370, 13720, 11540, 9744,
    8261, 7030, 6005, 5147, 4427, 3820, 3307, 2872,
])

_OSBORNE1_Y = np.array([
    8.44e-1, 9.08e-1, 9.32e-1, 9.36e-1, 9.25e-1, 9.08e-1, 8.81e-1,
    8.5e-1, 8.18e-1, 7.84e-1, 7.51e-1, 7.18e-1, 6.85e-1, 6.58e-1,
    6.28e-1, 6.03e-1, 5.8e-1, 5.58e-1, 5.38e-1, 5.22e-1, 5.06e-1,
    4.9e-1, 4.78e-1, 4.67e-1, 4.57e-1, 4.48e-1, 4.38e-1, 4.31e-1,
    4.24e-1, 4.2e-1, 4.14e-1, 4.11e-1, 4.06e-1,
])

_OSBORNE2_Y = np.array([
    1.366e0, 1.191e0, 1.112e0, 1.013e0, 9.91e-1, 8.85e-1, 8.31e-1,
    8.47e-1, 7.86e-1, 7.25e-1, 7.46e-1, 6.79e-1, 6.08e-1, 6.55e-1,
    6.16e-1, 6.06e-1, 6.02e-1, 6.26e-1, 6.51e-1, 7.24e-1, 6.49e-1,
    6.49e-1, 6.94e-1, 6.44e-1, 6.24e-1, 6.61e-1, 6.12e-1, 5.58e-1,
    5.33e-1, 4.95e-1, 5.0e-1, 4.23e-1, 3.95e-1, 3.75e-1, 3.72e-1,
    3.91e-1, 3.96e-1, 4.05e-1, 4.28e-1, 4.29e-1, 5.23e-1, 5.62e-1,
    6.07e-1, 6.53e-1, 6.72e-1, 7.08e-1, 6.33e-1, 6.68e-1, 6.45e-1,
    6.32e-1, 5.91e-1, 5.59e-1, 5.97e-1, 6.25e-1, 7.39e-1, 7.1e-1,
    7.29e-1, 7.2e-1, 6.36e-1, 5.81e-1, 4.28e-1, 2.92e-1, 1.62e-1,
    9.8e-2, 5.4e-2,
])

_HEART_TARGET = np.array([-0.69, -0.044, -1.57, -1.31, -2.65, 2, -12.6, 9.48])

_OSBORNE2_START = np.array([1.3, 0.65, 0.65, 0.7, 0.6, 3, 5, 7, 2, 4.5, 5.5])

_HEART_START = np.array([-0.3, -0.39, 0.3, -0.344, -1.2, 2.69, 1.59, -1.5])


# Rows: name, residual map, standard start, m, sum-of-squares value at the
# start, best known sum-of-squares value (None when no reference exists).
# The two value columns are literature figures used as transcription
# fixtures; the dataclass stores them halved to the package convention.
_SUITE_ROWS = [
    ("linear_full_rank_good_start", partial(linear_full_rank, dim_out=45),
     np.ones(9), 45, 72, 36),
    ("linear_full_rank_bad_start", partial(linear_full_rank, dim_out=45),
     np.ones(9) * 10, 45, 1125, 36),
    ("linear_rank_one_good_start", partial(linear_rank_one, dim_out=35),
     np.ones(7), 35, 1.165420e7, 8.380281690143324),
    ("linear_rank_one_bad_start", partial(linear_rank_one, dim_out=35),
     np.ones(7) * 10, 35, 1.168591e9, 8.380282),
    ("linear_rank_one_zero_columns_rows_good_start",
     partial(linear_rank_one_zero_columns_rows, dim_out=35),
     np.ones(7), 35, 4.989195e6, 9.880597014926506),
    ("linear_rank_one_zero_columns_rows_bad_start",
     partial(linear_rank_one_zero_columns_rows, dim_out=35),
     np.ones(7) * 10, 35, 5.009356e8, 9.880597014926506),
    ("rosenbrock_good_start", rosenbrock, np.array([-1.2, 1.0]), 2,
     24.2, 0.0),
    ("rosenbrock_bad_start", rosenbrock, np.array([-1.2, 1.0]) * 10, 2,
     1.795769e6, 0.0),
    ("helical_valley_good_start", helical_valley, np.array([-1.0, 0.0, 0.0]),
     3, 2500, 0.0),
    ("helical_valley_bad_start", helical_valley, np.array([-10.0, 0.0, 0.0]),
     3, 10600, 0.0),
    ("powell_singular_good_start", powell_singular,
     np.array([3.0, -1.0, 0.0, 1.0]), 4, 215, 0.0),
    ("powell_singular_bad_start", powell_singular,
     np.array([30.0, -10.0, 0.0, 10.0]), 4, 1.615400e6, 0.0),
    ("freudenstein_roth_good_start", freudenstein_roth,
     np.array([0.5, -2.0]), 2, 400.5, 48.984253679240013),
    ("freudenstein_roth_bad_start", freudenstein_roth,
     np.array([5.0, -20.0]), 2, 1.545754e8, 48.984253679240013),
    ("bard_good_start", partial(bard, y=_BARD_Y), np.ones(3), 15,
     41.68170, 0.00821487730657897),
    ("bard_bad_start", partial(bard, y=_BARD_Y), np.ones(3) * 10, 15,
     1306.234, 0.00821487730657897),
    ("kowalik_osborne", partial(kowalik_osborne, u=_KOWALIK_U, y=_KOWALIK_Y),
     np.array([0.25, 0.39, 0.415, 0.39]), 11, 5.313172e-3,
     0.00030750560384924),
    ("meyer", partial(meyer, y=_MEYER_Y), np.array([0.02, 4000.0, 250.0]),
     16, 1.693608e9, 87.945855170395831),
    ("watson_6_good_start", watson, 0.5 * np.ones(6), 31, 16.43083,
     0.00228767005355236),
    ("watson_6_bad_start", watson, 5 * np.ones(6), 31, 2.323367e6,
     0.00228767005355236),
    ("watson_9_good_start", watson, 0.5 * np.ones(9), 31, 26.90417,
     1.399760e-6),
    ("watson_9_bad_start", watson, 5 * np.ones(9), 31, 8.158877e6,
     1.399760e-6),
    ("watson_12_good_start", watson, 0.5 * np.ones(12), 31, 73.67821,
     4.722381e-10),
    ("watson_12_bad_start", watson, 5 * np.ones(12), 31, 2.059384e7,
     4.722381e-10),
    ("box_3d", partial(box_3d, dim_out=10), np.array([0.0, 10.0, 20.0]), 10,
     1031.154, 0.0),
    ("jennrich_sampson", partial(jennrich_sampson, dim_out=10),
     np.array([0.3, 0.4]), 10, 4171.306, 124.3621823556148),
    ("brown_dennis_good_start", partial(brown_dennis, dim_out=20),
     np.array([25.0, 5.0, -5.0, -1.0]), 20, 7.926693e6, 85822.20162635),
    ("brown_dennis_bad_start", partial(brown_dennis, dim_out=20),
     np.array([250.0, 50.0, -50.0, -10.0]), 20, 3.081064e11, 85822.20162635),
    ("chebyquad_6", partial(chebyquad, dim_out=6), np.arange(1, 7) / 7, 6,
     4.642817e-2, 0.0),
    ("chebyquad_7", partial(chebyquad, dim_out=7), np.arange(1, 8) / 8, 7,
     3.377064e-2, 0.0),
    ("chebyquad_8", partial(chebyquad, dim_out=8), np.arange(1, 9) / 9, 8,
     3.861770e-2, 0.003516873725677),
    ("chebyquad_9", partial(chebyquad, dim_out=9), np.arange(1, 10) / 10, 9,
     2.888298e-2, 0.0),
    ("chebyquad_10", partial(chebyquad, dim_out=10), np.arange(1, 11) / 11,
     10, 3.376327e-2, 0.00477271369637536),
    ("chebyquad_11", partial(chebyquad, dim_out=11), np.arange(1, 12) / 12,
     11, 2.674060e-2, 0.00279976155186576),
    ("brown_almost_linear", brown_almost_linear, 0.5 * np.ones(10), 10,
     273.2480, 0.0),
    ("osborne_one", partial(osborne_one, y=_OSBORNE1_Y),
     np.array([0.5, 1.5, 1.0, 0.01, 0.02]), 33, 16.17411,
     0.00005464894697483),
    ("osborne_two_good_start", partial(osborne_two, y=_OSBORNE2_Y),
     _OSBORNE2_START, 65, 2.093420, 0.0401377362935477),
    ("osborne_two_bad_start", partial(osborne_two, y=_OSBORNE2_Y),
     10 * _OSBORNE2_START, 65, 199.6847, 0.0401377362935477),
    ("bdqrtic_8", bdqrtic, np.ones(8), 8, 904, 10.2389734213174),
    ("bdqrtic_10", bdqrtic, np.ones(10), 12, 1356, 18.28116175359353),
    ("bdqrtic_11", bdqrtic, np.ones(11), 14, 1582, 22.260591734883817),
    ("bdqrtic_12", bdqrtic, np.ones(12), 16, 1808, 26.2727663967939),
    ("cube_5", cube, 0.5 * np.ones(5), 5, 56.5, 0.0),
    ("cube_6", cube, 0.5 * np.ones(6), 6, 70.5625, 0.0),
    ("cube_8", cube, 0.5 * np.ones(8), 8, 98.6875, 0.0),
    ("mancino_5_good_start", mancino, mancino_start(5), 5, 2.539084e9, 0.0),
    ("mancino_5_bad_start", mancino, 10 * mancino_start(5), 5,
     6.873795e12, 0.0),
    ("mancino_8", mancino, mancino_start(8), 8, 3.367961e9, 0.0),
    ("mancino_10", mancino, mancino_start(10), 10, 3.735127e9, 0.0),
    ("mancino_12_good_start", mancino, mancino_start(12), 12,
     3.991072e9, 0.0),
    ("mancino_12_bad_start", mancino, 10 * mancino_start(12), 12,
     1.130015e13, 0.0),
    ("heart_eight_good_start", partial(heart_eight, y=_HEART_TARGET),
     _HEART_START, 8, 9.385672, 0.0),
    ("heart_eight_bad_start", partial(heart_eight, y=_HEART_TARGET),
     10 * _HEART_START, 8, 3.365815e10, 0.0),
    ("biggs_exp6", partial(biggs_exp6, dim_out=13),
     np.array([1.0, 2.0, 1.0, 1.0, 1.0, 1.0]), 13,
     0.7790700756559701, 0.0),
    ("gulf", partial(gulf, dim_out=10), np.array([5.0, 2.5, 0.15]), 10,
     4.130386686104858, 0.0),
    ("powell_badly_scaled", powell_badly_scaled, np.array([0.0, 1.0]), 2,
     1.1352617173483783, 0.0),
    ("wood", wood, np.array([-3.0, -1.0, -3.0, -1.0]), 6, 19192.0, 0.0),
    ("dixon", dixon, np.full(10, -2.0), 11, 342.0, 0.0),
]


def suite() -> List[LeastSquaresProblem]:
    """All 58 benchmark problems in canonical order."""
    problems = []
    for name, fn, start, m, start_sq, best_sq in _SUITE_ROWS:
        start = np.asarray(start, dtype=float)
        problems.append(LeastSquaresProblem(
            name=name, n=start.size, m=m, residuals=fn, start=start,
            f_start=0.5 * start_sq,
            f_optimum=None if best_sq is None else 0.5 * best_sq))
    return problems


def by_name(name: str) -> LeastSquaresProblem:
    for problem in suite():
        if problem.name == name:
            return problem
    raise KeyError(f"unknown problem {name!r}")
