"""Monte Carlo study of GCV-selected spline estimators at fixed ``k_q``.

For each test function and sample size, ``M`` data sets
``Y_i = f(i/N) + sigma eps_i`` are drawn. For every ``k_q`` the pair
``(K, lambda = (k_q/(pi K))^{2q})`` minimising GCV is selected and the
average squared error

    A_N(f) = (N M)^{-1} sum_reps sum_i (fhat(x_i) - f(x_i))^2

is accumulated. All ``k_q`` values share the same data sets. Each
replication draws from its own Philox stream keyed by ``(seed, cell,
replication)``, and results are reduced in replication order, so the output
does not depend on the number of worker processes.
"""
from __future__ import annotations

import csv
import io
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError, SplineKernError
from .estimator import Dataset, select_model
from .functions import get_function

__all__ = ["ExperimentSpec", "CellResult", "StudyResult", "run_study", "replication_rng"]

DEFAULT_KQ = (0.5, 1.0, 1.2, 1.5, 5.0)


@dataclass(frozen=True)
class ExperimentSpec:
    functions: tuple = ("f1", "f2")
    N_list: tuple = (300, 1000)
    sigma: float = 0.1
    p: int = 3
    q: int = 2
    kq_list: tuple = DEFAULT_KQ
    K_range: tuple = (2, 50)
    replications: int = 100
    seed: int = 20240101
    periodic: bool = False
    loss: str = "mean"

    def __post_init__(self):
        for name in ("functions", "N_list", "kq_list", "K_range"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.replications < 1:
            raise InvalidArgumentError("replications must be >= 1")
        if self.sigma < 0:
            raise InvalidArgumentError("sigma must be >= 0")
        if not self.functions or not self.N_list or not self.kq_list:
            raise InvalidArgumentError("functions, N_list and kq_list must be nonempty")
        if len(self.K_range) != 2 or self.K_range[0] > self.K_range[1]:
            raise InvalidArgumentError("K_range must be a pair (lo, hi) with lo <= hi")
        if self.loss not in ("mean", "sum"):
            raise InvalidArgumentError("loss must be 'mean' or 'sum'")
        if not 0 < self.q <= self.p:
            raise InvalidArgumentError("need 0 < q <= p")
        if any(k < 0 or not math.isfinite(k) for k in self.kq_list):
            raise InvalidArgumentError("k_q values must be finite and >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidArgumentError("seed must be a 64-bit unsigned integer")
        for name in self.functions:
            get_function(name)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InvalidArgumentError(f"unknown experiment fields: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def _cell_key(function: str, N: int) -> int:
    return zlib.crc32(f"{function}|{N}".encode())


def replication_rng(seed: int, function: str, N: int, rep: int) -> np.random.Generator:
    """Counter-based generator for one replication of one cell."""
    ss = np.random.SeedSequence([seed, _cell_key(function, N), rep])
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class CellResult:
    function: str
    N: int
    k_q: float
    A_N: float
    se: float
    replications: int
    K_counts: dict = field(default_factory=dict)
    error: Optional[str] = None


@dataclass(frozen=True)
class StudyResult:
    spec: ExperimentSpec
    cells: tuple

    def cell(self, function: str, N: int, k_q: float) -> CellResult:
        for c in self.cells:
            if c.function == function and c.N == N and c.k_q == k_q:
                return c
        raise KeyError((function, N, k_q))

    def table_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["function", "N", "k_q", "A_N", "se", "replications", "error"])
        for c in self.cells:
            w.writerow([c.function, c.N, _fmt(c.k_q), _fmt(c.A_N), _fmt(c.se), c.replications,
                        c.error or ""])
        return buf.getvalue()

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["function", "N", "k_q", "K", "count"])
        for c in self.cells:
            for K in sorted(c.K_counts):
                w.writerow([c.function, c.N, _fmt(c.k_q), K, c.K_counts[K]])
        return buf.getvalue()

    def summary(self) -> str:
        """Human-readable table of ``A_N`` (multiplied by 1e4)."""
        lines = ["A_N x 1e4 (Monte Carlo standard error in parentheses)"]
        head = "function     N  " + "".join(f"k_q={_fmt(k):>6}      " for k in self.spec.kq_list)
        lines.append(head)
        for fn in self.spec.functions:
            for N in self.spec.N_list:
                row = f"{fn:8s} {N:5d}  "
                for k in self.spec.kq_list:
                    c = self.cell(fn, N, k)
                    row += ("   error         " if c.error else
                            f"{1e4 * c.A_N:7.3f} ({1e4 * c.se:5.3f}) ")
                lines.append(row)
        return "\n".join(lines)


def _fmt(v: float) -> str:
    return format(float(v), ".10g")


def _replication(args):
    spec_dict, function, N, rep = args
    spec = ExperimentSpec.from_dict(spec_dict)
    f = get_function(function)
    x = np.arange(1, N + 1) / N
    truth = f(x)
    rng = replication_rng(spec.seed, function, N, rep)
    y = truth + spec.sigma * rng.standard_normal(N)
    data = Dataset(y)
    out = []
    lo, hi = spec.K_range
    for k_q in spec.kq_list:
        try:
            K, _, res = select_model(data, spec.p, spec.q, k_q, range(lo, hi + 1),
                                     spec.periodic, spec.loss)
            out.append((float(np.mean((res.fitted - truth) ** 2)), K, None))
        except SplineKernError as exc:
            out.append((math.nan, None, str(exc)))
    return out


def run_study(spec: ExperimentSpec, workers: int = 1) -> StudyResult:
    """Run every (function, N) cell for all ``k_q`` values."""
    if workers < 1:
        raise InvalidArgumentError("workers must be >= 1")
    tasks = [(spec.to_dict(), fn, N, rep)
             for fn in spec.functions for N in spec.N_list for rep in range(spec.replications)]
    if workers == 1:
        results = [_replication(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replication, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    cells = []
    pos = 0
    M = spec.replications
    for fn in spec.functions:
        for N in spec.N_list:
            block = results[pos:pos + M]
            pos += M
            for j, k_q in enumerate(spec.kq_list):
                errs = np.array([r[j][0] for r in block])
                msgs = [r[j][2] for r in block if r[j][2]]
                counts: dict = {}
                for r in block:
                    if r[j][1] is not None:
                        counts[r[j][1]] = counts.get(r[j][1], 0) + 1
                if msgs:
                    cells.append(CellResult(fn, N, k_q, math.nan, math.nan, M, counts, msgs[0]))
                    continue
                se = float(errs.std(ddof=1) / math.sqrt(M)) if M > 1 else math.nan
                cells.append(CellResult(fn, N, k_q, float(errs.mean()), se, M, counts))
    return StudyResult(spec, tuple(cells))
