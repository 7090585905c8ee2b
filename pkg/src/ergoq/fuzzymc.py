"""Max-min transition algebra for fuzzy Markov chains.

A transition matrix here holds membership values in [0, 1] with no row-sum
constraint; states are fuzzy sets over {1..n}.  Matrix powers under the
max-min composition only ever copy values that already appear in the base
matrix (value closure), so the power orbit lives in a finite set, is
eventually periodic, and can be tracked with exact equality instead of a
tolerance.

A chain whose powers reach a fixed matrix (period 1) is aperiodic; it is
strongly ergodic when that stationary matrix has identical rows (every
normalized initial state is absorbed into the common row) and weakly ergodic
otherwise.  Powers that settle into a cycle of length > 1 make the chain
periodic.
"""

from __future__ import annotations

import csv as _csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import IO, Sequence

import numpy as np

__all__ = [
    "Classification",
    "CycleNotFoundError",
    "PowerAnalysis",
    "analyze_powers",
    "as_state",
    "as_transition_matrix",
    "classify_ergodicity",
    "default_max_steps",
    "identity_matrix",
    "max_min_apply",
    "max_min_compose",
    "read_matrix_csv",
    "rows_identical",
    "write_matrix_csv",
]

DEFAULT_STORE_LIMIT = 10_000


class Classification(str, Enum):
    STRONG_ERGODIC = "strong-ergodic"
    WEAK_ERGODIC = "weak-ergodic"
    PERIODIC = "periodic"


class CycleNotFoundError(RuntimeError):
    """No repeated power within the step cap.

    The orbit is provably eventually periodic, so this only means the cap
    was too small; re-run with a larger max_steps.
    """

    def __init__(self, steps_examined: int):
        self.steps_examined = steps_examined
        super().__init__(
            f"no repeated power within max_steps={steps_examined}; raise the cap"
        )


def _checked(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float, order="C")
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("membership values must be finite")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("membership values must lie in [0, 1]")
    arr += 0.0  # fold -0.0 into +0.0 so byte equality matches value equality
    arr.flags.writeable = False
    return arr


def as_transition_matrix(values) -> np.ndarray:
    """Validate and freeze a square matrix of membership values in [0, 1]."""
    arr = _checked(values, 2)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"transition matrix must be square, got shape {arr.shape}")
    return arr


def as_state(values) -> np.ndarray:
    """Validate a fuzzy state vector (membership values in [0, 1])."""
    return _checked(values, 1)


def is_normalized(state) -> bool:
    """A fuzzy state is normalized when its largest membership equals 1."""
    return float(np.max(np.asarray(state, dtype=float))) == 1.0


def identity_matrix(n: int) -> np.ndarray:
    """Max-min identity: 1 on the diagonal, 0 elsewhere."""
    return as_transition_matrix(np.eye(n))


def max_min_compose(a, b) -> np.ndarray:
    """Max-min matrix composition: out[i, j] = max_k min(a[i, k], b[k, j]).

    Every output entry is one of the input entries, which is what keeps
    repeated composition inside a finite value set.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0] or b.shape[0] != b.shape[1]:
        raise ValueError(f"incompatible shapes {a.shape} and {b.shape}")
    n = a.shape[1]
    if n <= 64:
        return np.minimum(a[:, :, None], b[None, :, :]).max(axis=1)
    # above ~64 states the (m, n, n) temporary stops fitting in cache; a
    # running maximum over k keeps the working set at one (m, n) panel
    out = np.minimum(a[:, 0, None], b[0, None, :])
    for k in range(1, n):
        np.maximum(out, np.minimum(a[:, k, None], b[k, None, :]), out=out)
    return out


def max_min_apply(x, p) -> np.ndarray:
    """Advance a fuzzy state one step: out[j] = max_i min(x[i], p[i, j])."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if x.ndim != 1 or p.ndim != 2 or x.shape[0] != p.shape[0]:
        raise ValueError(f"incompatible shapes {x.shape} and {p.shape}")
    return np.minimum(x[:, None], p).max(axis=0)


def rows_identical(p) -> bool:
    """True when every row equals the first row exactly."""
    p = np.asarray(p)
    return bool(np.all(p == p[0]))


def classify_ergodicity(stationary) -> Classification:
    """Split an aperiodic (stationary) chain into strong vs weak ergodic.

    Strong means all rows of the stationary matrix are identical; anything
    else that still converged is weak.
    """
    return (
        Classification.STRONG_ERGODIC
        if rows_identical(stationary)
        else Classification.WEAK_ERGODIC
    )


def default_max_steps(n: int) -> int:
    """Step cap used when the caller does not pick one: max(1000, 4n)."""
    return max(1000, 4 * n)


@dataclass
class PowerAnalysis:
    """Outcome of iterating max-min powers until the orbit repeats.

    tau is the smallest exponent t >= 1 with P^(t+period) = P^t for the
    minimal period.  The stationary matrix (= P^tau) is present exactly when
    period is 1.
    """

    tau: int
    period: int
    classification: Classification
    stationary: np.ndarray | None
    steps_examined: int


def _finish(tau: int, period: int, power: np.ndarray, steps: int) -> PowerAnalysis:
    if period == 1:
        stationary = power.copy()
        stationary.flags.writeable = False
        return PowerAnalysis(
            tau=tau,
            period=1,
            classification=classify_ergodicity(stationary),
            stationary=stationary,
            steps_examined=steps,
        )
    return PowerAnalysis(
        tau=tau,
        period=period,
        classification=Classification.PERIODIC,
        stationary=None,
        steps_examined=steps,
    )


def _analyze_floyd(p: np.ndarray, max_steps: int) -> PowerAnalysis:
    """Tortoise/hare fallback: O(1) matrices stored, ~3x the compositions.

    Finds the same minimal (tau, period) as the hashed scan, then applies the
    same max_steps acceptance rule (tau + period must fit under the cap).
    """
    def step(m: np.ndarray) -> np.ndarray:
        return max_min_compose(m, p)

    # generous phase-1 cap: a cycle with tau + period <= max_steps always
    # meets within 2 * max_steps tortoise steps
    tort = step(p)
    hare = step(tort)
    tort_exp = 2
    while not np.array_equal(tort, hare):
        if tort_exp > 2 * max_steps:
            raise CycleNotFoundError(max_steps)
        tort = step(tort)
        hare = step(step(hare))
        tort_exp += 1

    tau = 1
    tort = p
    while not np.array_equal(tort, hare):
        tort = step(tort)
        hare = step(hare)
        tau += 1

    period = 1
    hare = step(tort)
    while not np.array_equal(tort, hare):
        hare = step(hare)
        period += 1

    if tau + period > max_steps:
        raise CycleNotFoundError(max_steps)
    # the hashed scan would have detected the repeat at exponent tau + period
    return _finish(tau, period, tort, tau + period)


def analyze_powers(
    p,
    max_steps: int | None = None,
    store_limit: int = DEFAULT_STORE_LIMIT,
) -> PowerAnalysis:
    """Iterate P, P^2, ... until a power repeats, and classify the chain.

    Detection hashes the exact bytes of each power (value closure makes the
    orbit finite, so byte equality is sound and no tolerance is involved) and
    returns the smallest (tau, period) with P^(tau+period) = P^tau.  If more
    than store_limit powers would be retained, detection switches to a
    constant-memory tortoise/hare scheme.  Raises CycleNotFoundError when no
    repeat fits within max_steps (default max(1000, 4n)).
    """
    p = as_transition_matrix(p)
    n = p.shape[0]
    if max_steps is None:
        max_steps = default_max_steps(n)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")

    seen: dict[bytes, int] = {p.tobytes(): 1}
    current = p
    for t in range(2, max_steps + 1):
        if len(seen) >= store_limit:
            return _analyze_floyd(p, max_steps)
        current = max_min_compose(current, p)
        key = current.tobytes()
        first = seen.get(key)
        if first is not None:
            return _finish(first, t - first, current, t)
        seen[key] = t
    raise CycleNotFoundError(max_steps)


def write_matrix_csv(fp: IO[str], matrix) -> None:
    """Write a matrix as CSV with 17 significant digits (exact round-trip)."""
    m = as_transition_matrix(matrix)
    for row in m:
        fp.write(",".join(format(v, ".17g") for v in row) + "\n")


def read_matrix_csv(fp: IO[str] | str) -> np.ndarray:
    """Read a square matrix from CSV text; a non-numeric first row is a header."""
    if isinstance(fp, str):
        fp = io.StringIO(fp)
    rows = [r for r in _csv.reader(fp) if r]
    if not rows:
        raise ValueError("empty matrix file")
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        rows = rows[1:]
        if not rows:
            raise ValueError("matrix file holds only a header") from None
    try:
        data = [[float(c) for c in r] for r in rows]
    except ValueError as exc:
        raise ValueError(f"malformed matrix cell: {exc}") from None
    if len({len(r) for r in data}) != 1:
        raise ValueError("rows have differing lengths")
    return as_transition_matrix(data)
