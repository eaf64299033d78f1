"""Transference integrals for kernels on ``S = Nbar A``.

A kernel is a callable ``K(x, y, t)`` of the norms ``|X|, |Y|`` of ``v`` and of
``t``, broadcasting over arrays. ``Nbar`` integrals use :class:`NbarGrid`
nodes and the ``t`` integral a uniform grid.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..geometry import NbarGrid
from ..space import SpaceParams
from .line import cvp_lower

__all__ = ["transference_bound", "line_grid", "MODES"]

MODES = ("integral", "per_v", "per_v_lower")

KernelFn = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def line_grid(T: float = 16.0, h: float = 1.0 / 16) -> np.ndarray:
    n = int(round(T / h))
    return np.arange(-n, n + 1) * h


def _row_cv2(rows: np.ndarray, h: float) -> np.ndarray:
    """Per-row ``sup |DTFT|`` from an 8x oversampled FFT with a parabolic peak fit."""
    n = rows.shape[1]
    pad = 1 << int(math.ceil(math.log2(8 * n)))
    mag = np.abs(h * np.fft.fft(rows, pad, axis=1))
    k = np.argmax(mag, axis=1)
    idx = np.arange(rows.shape[0])
    a, b, c = mag[idx, k - 1], mag[idx, k], mag[idx, (k + 1) % pad]
    denom = a - 2 * b + c
    with np.errstate(divide="ignore", invalid="ignore"):
        peak = np.where(denom < 0, b - 0.125 * (a - c) ** 2 / denom, b)
    return np.maximum(peak, b)


def transference_bound(
    K: KernelFn,
    p: float,
    sp: SpaceParams,
    mode: str = "integral",
    nbar: NbarGrid | None = None,
    t: np.ndarray | None = None,
    seed: int | None = None,
    n_tests: int = 20,
    chunk: int = 256,
) -> float:
    """``int_Nbar`` of a norm of ``t -> e^{2 rho t/p} K(v, t)``.

    ``integral``     the ``L^1(A)`` norm, i.e. the full double integral;
    ``per_v``        the interpolation upper bound of the ``Cv_p(A)`` norm;
    ``per_v_lower``  the Monte Carlo lower bound of the ``Cv_p(A)`` norm.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    nbar = nbar or NbarGrid(sp)
    t = line_grid() if t is None else np.asarray(t, dtype=float)
    h = float(t[1] - t[0])
    X, Y, W = nbar.nodes()
    weight = np.exp(2.0 * sp.rho * t / p)
    total = 0.0
    for s in range(0, X.size, chunk):
        x = X[s : s + chunk, None]
        y = Y[s : s + chunk, None]
        rows = weight[None, :] * np.asarray(K(x, y, t[None, :]))
        if not np.all(np.isfinite(rows)):
            return float("inf")
        w = W[s : s + chunk]
        if mode == "integral":
            norms = h * np.sum(np.abs(rows), axis=1)
        elif mode == "per_v":
            l1 = h * np.sum(np.abs(rows), axis=1)
            c2 = _row_cv2(rows, h)
            with np.errstate(divide="ignore", invalid="ignore"):
                norms = np.where(l1 > 0, l1 ** (2 / p - 1) * c2 ** (2 - 2 / p), 0.0)
        else:
            if seed is None:
                raise ValueError("per_v_lower needs a seed")
            norms = np.array([
                cvp_lower(r, p, seed + s + i, t=t, n_tests=n_tests) if np.any(r) else 0.0
                for i, r in enumerate(rows)
            ])
        total += float(np.dot(w, norms))
    return total
