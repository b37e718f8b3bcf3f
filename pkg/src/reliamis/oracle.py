"""Independent checks of the analytic reliability.

:func:`path_enum_reliability` walks every path of the chain one component
at a time and adds up the mass that ends in a functional state; it never
forms a matrix product.  :func:`monte_carlo_reliability` simulates the
chain.

Monte Carlo draws come from a Philox counter-based generator keyed by the
seed.  Trial ``t`` owns counter blocks ``t*B .. t*B+B-1`` (four 64-bit words
per block, ``B = ceil(n/4)``), so any trial's draws can be reproduced on
their own and the estimate does not depend on how trials are chunked or
how many workers run them.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import TooLarge
from .mis import FAILED, Method, MisModel, ReliabilityResult, require_valid

MAX_COMPONENTS = 20
MAX_PARTIAL_PATHS = 10**6
SEED_ENV = "RELIAMIS_SEED"
CHUNK = 65536


@dataclass(frozen=True)
class TrialConfig:
    trials: int
    seed: int = 0
    assignment: Mapping | None = field(default=None)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_env(cls, trials: int, seed: int | None = None, assignment=None) -> "TrialConfig":
        if seed is None:
            seed = int(os.environ.get(SEED_ENV, "0"))
        return cls(trials, seed, assignment)


def path_enum_reliability(m: MisModel) -> ReliabilityResult:
    """Exact reliability by depth-first enumeration of every component path."""
    require_valid(m)
    if m.n > MAX_COMPONENTS:
        raise TooLarge(f"{m.n} components; path enumeration allows at most {MAX_COMPONENTS}")
    rows = [
        [[(j, x) for j, x in enumerate(row) if x] for row in tpm] for tpm in m.tpms
    ]
    sink = m.index(FAILED)
    total = Fraction(0)
    visited = 0
    stack = [(0, 0, Fraction(1))]  # (step, state index, path probability)
    while stack:
        step, s, prob = stack.pop()
        visited += 1
        if visited > MAX_PARTIAL_PATHS:
            raise TooLarge(f"more than {MAX_PARTIAL_PATHS} partial paths")
        if s == sink:
            continue
        if step == m.n:
            total += prob * m.u[s]
            continue
        for j, x in rows[step][s]:
            stack.append((step + 1, j, prob * x))
    return ReliabilityResult(total, Method.PATH_ENUM)


def _uniforms(seed: int, first_trial: int, count: int, width: int) -> np.ndarray:
    """``(count, width)`` uniforms in [0, 1) for trials ``first_trial ...``."""
    blocks = -(-width // 4)
    bg = np.random.Philox(key=seed, counter=first_trial * blocks)
    raw = bg.random_raw(count * blocks * 4).reshape(count, blocks * 4)[:, :width]
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 2**53)


def _run_chunk(cum: list, start: int, sink_free: np.ndarray, seed: int, first: int, count: int) -> int:
    u = _uniforms(seed, first, count, len(cum))
    state = np.full(count, start, dtype=np.int64)
    for i, c in enumerate(cum):
        # next state = first column whose cumulative mass exceeds the draw
        state = (u[:, i, None] >= c[state]).sum(axis=1)
    return int(sink_free[state].sum())


def monte_carlo_reliability(m: MisModel, cfg: TrialConfig, workers: int = 1) -> ReliabilityResult:
    """Estimate reliability by simulating ``cfg.trials`` passes through the chain.

    The half-width is three binomial standard errors of the estimate.
    """
    if cfg.assignment is not None:
        m = m.with_reliabilities(cfg.assignment)
    require_valid(m)
    cum = []
    for tpm in m.tpms:
        c = np.cumsum(np.array(tpm, dtype=np.float64), axis=1)
        c[:, -1] = np.inf  # guard against rounding below 1
        cum.append(c)
    functional = np.array([float(x) for x in m.u]) > 0
    chunks = [(a, min(CHUNK, cfg.trials - a)) for a in range(0, cfg.trials, CHUNK)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            counts = list(pool.map(lambda ch: _run_chunk(cum, 0, functional, cfg.seed, *ch), chunks))
    else:
        counts = [_run_chunk(cum, 0, functional, cfg.seed, *ch) for ch in chunks]
    hits = sum(counts)
    est = hits / cfg.trials
    half = 3.0 * math.sqrt(est * (1.0 - est) / cfg.trials)
    return ReliabilityResult(est, Method.MONTE_CARLO, half, cfg.trials)
