"""LIBSVM-format ingestion, preprocessing, and synthetic loss-sequence generators.

Preprocessing follows the experimental protocol: every feature column is
divided by its maximum absolute value (so all values land in [-1, 1]) and a
constant bias feature of value 1 is appended. Classification examples become
hinge losses, regression examples absolute losses.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple, Union

import numpy as np

from .geometry import Ball, MirrorSetup, _as_vector
from .losses import Absolute, Hinge, Linear, Loss, Quad1D

TASKS = ("classification", "regression")

SparseRow = Tuple[np.ndarray, np.ndarray]  # (1-based ascending indices, values)


@dataclass(frozen=True)
class Dataset:
    """Sparse dataset: rows of (indices, values) with 1-based feature indices."""

    rows: Tuple[SparseRow, ...]
    labels: np.ndarray
    d: int
    task: str
    has_bias: bool = False

    @property
    def n(self) -> int:
        return len(self.rows)

    def dense_row(self, i: int) -> np.ndarray:
        idx, vals = self.rows[i]
        z = np.zeros(self.d)
        if idx.size:
            z[idx - 1] = vals
        return z


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep / synthetic experiment description."""

    task: str = "classification"
    loss_family: str = "hinge"
    grid_lo_exp: float = -20.0
    grid_hi_exp: float = 20.0
    grid_points: int = 41
    repeats: int = 10
    seed: int = 0
    horizon: int = 2000
    ball_radius: Optional[float] = 75.0
    algorithms: Tuple[str, ...] = ("ogd", "adaogd", "implicit_decay", "adaimplicit")
    dataset_path: Optional[str] = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.grid_points < 1:
            raise ValueError("grid_points must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.ball_radius is not None and not self.ball_radius > 0:
            raise ValueError("ball_radius must be positive")

    def beta_grid(self) -> np.ndarray:
        """log2-uniform beta grid over [2^lo, 2^hi] with the configured point count."""
        if self.grid_points == 1:
            exps = np.array([self.grid_lo_exp])
        else:
            exps = np.linspace(self.grid_lo_exp, self.grid_hi_exp, self.grid_points)
        return 2.0**exps

    def setup(self) -> MirrorSetup:
        if self.ball_radius is None:
            return MirrorSetup.unconstrained()
        return MirrorSetup.ball(self.ball_radius)


def _parse_label(token: str, task: str, lineno: int) -> float:
    try:
        raw = float(token)
    except ValueError:
        raise ValueError(f"line {lineno}: non-numeric label {token!r}") from None
    if task == "regression":
        return raw
    if raw in (-1.0, 1.0):
        return raw
    if raw == 0.0:
        return -1.0
    raise ValueError(f"line {lineno}: classification label must be in {{-1, 0, +1}}, got {token!r}")


def parse_libsvm(stream: Union[str, io.TextIOBase], task: str = "classification") -> Dataset:
    """Parse LIBSVM text: ``label idx:val idx:val ...`` with 1-based ascending indices.

    Comments after '#' are ignored; blank lines are skipped; {0, 1} labels are
    mapped to {-1, +1} for classification. Duplicate or non-ascending indices
    and malformed tokens raise with the offending line number.
    """
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = stream.read().splitlines()
    rows: List[SparseRow] = []
    labels: List[float] = []
    d = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        labels.append(_parse_label(tokens[0], task, lineno))
        idx: List[int] = []
        vals: List[float] = []
        prev = 0
        for tok in tokens[1:]:
            try:
                itxt, vtxt = tok.split(":", 1)
                i = int(itxt)
                v = float(vtxt)
            except ValueError:
                raise ValueError(f"line {lineno}: malformed feature token {tok!r}") from None
            if i < 1:
                raise ValueError(f"line {lineno}: feature index must be >= 1, got {i}")
            if i == prev:
                raise ValueError(f"line {lineno}: duplicate feature index {i}")
            if i < prev:
                raise ValueError(f"line {lineno}: feature indices must be ascending, got {i} after {prev}")
            if not math.isfinite(v):
                raise ValueError(f"line {lineno}: non-finite feature value {vtxt!r}")
            idx.append(i)
            vals.append(v)
            prev = i
        d = max(d, prev)
        rows.append((np.array(idx, dtype=np.int64), np.array(vals)))
    return Dataset(rows=tuple(rows), labels=np.array(labels), d=d, task=task)


def serialize_libsvm(ds: Dataset) -> str:
    """Inverse of :func:`parse_libsvm` (17 significant digits, bit round-trips)."""
    out = []
    for (idx, vals), label in zip(ds.rows, ds.labels):
        parts = [format(label, ".17g")]
        parts += [f"{int(i)}:{format(v, '.17g')}" for i, v in zip(idx, vals)]
        out.append(" ".join(parts))
    return "\n".join(out) + ("\n" if out else "")


def preprocess(ds: Dataset) -> Dataset:
    """Scale every feature column by its max absolute value and append a bias of 1.

    All-zero columns are left unchanged. Idempotent: a second application
    rescales by 1 and the bias flag prevents appending a second column.
    """
    if ds.n < 1:
        raise ValueError("cannot preprocess an empty dataset")
    col_max = np.zeros(ds.d)
    for idx, vals in ds.rows:
        if idx.size:
            np.maximum.at(col_max, idx - 1, np.abs(vals))
    scale = np.where(col_max > 0.0, col_max, 1.0)
    if ds.has_bias:
        new_rows = tuple((idx.copy(), vals / scale[idx - 1]) for idx, vals in ds.rows)
        return replace(ds, rows=new_rows)
    bias_index = ds.d + 1
    new_rows = []
    for idx, vals in ds.rows:
        scaled = vals / scale[idx - 1] if idx.size else vals
        new_rows.append((np.append(idx, bias_index), np.append(scaled, 1.0)))
    return Dataset(rows=tuple(new_rows), labels=ds.labels.copy(), d=bias_index, task=ds.task, has_bias=True)


def shuffle_order(n: int, seed: int, repeat: int) -> np.ndarray:
    """Example order for one repeat: counter-based generator keyed by seed XOR repeat."""
    rng = np.random.Generator(np.random.Philox(key=seed ^ repeat))
    return rng.permutation(n)


def losses_from_dataset(ds: Dataset, order: Optional[np.ndarray] = None) -> List[Loss]:
    """Per-example losses: hinge for classification, absolute for regression."""
    if order is None:
        order = np.arange(ds.n)
    make = Hinge if ds.task == "classification" else Absolute
    return [make(z=ds.dense_row(i), y=ds.labels[i]) for i in order]


def gen_sine(T: int) -> List[Quad1D]:
    """Synthetic drifting sequence: 1/4 (x - y_t)^2 with y_t = 100 sin(pi t / (10 T))."""
    if T < 1:
        raise ValueError("T must be >= 1")
    return [Quad1D(y=100.0 * math.sin(math.pi * t / (10.0 * T))) for t in range(1, T + 1)]


def gen_fixed(loss: Loss, T: int) -> List[Loss]:
    """T copies of a single loss."""
    if T < 1:
        raise ValueError("T must be >= 1")
    return [loss] * T


def _unit_orthogonal(x1: np.ndarray) -> np.ndarray:
    d = x1.shape[0]
    nrm = float(np.linalg.norm(x1))
    if nrm == 0.0:
        e = np.zeros(d)
        e[0] = 1.0
        return e
    xhat = x1 / nrm
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        w = e - float(e @ xhat) * xhat
        wn = float(np.linalg.norm(w))
        if wn > 1e-8:
            return w / wn
    raise RuntimeError("failed to build an orthogonal direction")


def gen_lower_bound(v_target: float, setup: MirrorSetup, x1, T: int) -> List[Linear]:
    """Worst-case sequence realizing temporal variability v_target on a ball.

    First loss L <g, x> with a unit g orthogonal to the start point and
    L = 2 v_target / diameter; all remaining losses are zero. Any deterministic
    learner started at x1 incurs regret exactly v_target against the best
    fixed point.
    """
    if v_target < 0:
        raise ValueError("v_target must be >= 0")
    if T < 1:
        raise ValueError("T must be >= 1")
    if not isinstance(setup.domain, Ball):
        raise ValueError("lower-bound generator needs a ball domain")
    x1 = _as_vector(x1)
    if x1.shape[0] < 2:
        raise ValueError("lower-bound construction needs dimension d >= 2")
    g = _unit_orthogonal(x1)
    lipschitz = 2.0 * v_target / (2.0 * setup.domain.radius)
    seq: List[Linear] = [Linear(g=g, s=lipschitz)]
    seq.extend(Linear(g=g, s=0.0) for _ in range(T - 1))
    return seq
