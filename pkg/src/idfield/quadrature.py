"""Quadrature primitives: panelled Gauss-Kronrod on the line, tensor Gauss-Legendre on boxes.

The one-dimensional rule is the 7/15-point Gauss-Kronrod pair with QUADPACK's
error heuristic. Node placement is a function of the panel edges only, so two
integrands that differ by a constant factor are integrated on identical nodes.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

DEFAULT_ATOL = 1e-10
DEFAULT_RTOL = 1e-8

# QUADPACK qk15 abscissae on [0, 1) descending; the Gauss-7 nodes are the odd entries.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full symmetric 15-node rule on [-1, 1].
KRONROD_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_g = np.zeros(8)
_g[1::2] = _WG
GAUSS7_WEIGHTS = np.concatenate([_g[:-1], _g[::-1]])
del _g

_EPMACH = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny


@dataclass(frozen=True)
class PanelRule:
    """Gauss-Kronrod nodes laid out on a sequence of panels.

    ``nodes``, ``kronrod`` and ``gauss`` all have shape ``(P, 15)``; ``gauss`` is zero
    on the Kronrod-only nodes. ``half`` holds the panel half-widths.
    """

    nodes: np.ndarray
    kronrod: np.ndarray
    gauss: np.ndarray
    half: np.ndarray

    @property
    def size(self):
        return self.nodes.size


def panel_rule(edges) -> PanelRule:
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = mid[:, None] + half[:, None] * KRONROD_NODES[None, :]
    return PanelRule(
        nodes=nodes,
        kronrod=half[:, None] * KRONROD_WEIGHTS[None, :],
        gauss=half[:, None] * GAUSS7_WEIGHTS[None, :],
        half=half,
    )


def subdivide(breaks, max_width):
    """Refine sorted breakpoints so that no panel is wider than ``max_width``."""
    breaks = np.unique(np.asarray(breaks, dtype=float))
    if not np.isfinite(max_width) or max_width <= 0:
        return breaks
    out = [breaks[:1]]
    for a, b in zip(breaks[:-1], breaks[1:]):
        k = max(1, int(np.ceil((b - a) / max_width)))
        out.append(np.linspace(a, b, k + 1)[1:])
    return np.concatenate(out)


def _real_error(resk, resg, fvals, rule):
    # Mirrors QUADPACK dqk15; fvals has shape (..., P, 15).
    half = rule.half
    abserr = np.abs(resk - resg)
    w_unit = KRONROD_WEIGHTS
    mean = resk / np.where(half == 0, 1.0, 2.0 * half)
    resabs = np.sum(np.abs(fvals) * w_unit, axis=-1) * half
    resasc = np.sum(np.abs(fvals - mean[..., None]) * w_unit, axis=-1) * half
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * abserr / resasc) ** 1.5)
    abserr = np.where((resasc != 0) & (abserr != 0), scaled, abserr)
    floor = np.where(resabs > _UFLOW / (50 * _EPMACH), 50 * _EPMACH * resabs, 0.0)
    return np.maximum(abserr, floor)


def integrate_panels(fvals, rule: PanelRule):
    """Integrate sampled values ``fvals`` (shape ``(..., P, 15)``) over all panels.

    Returns ``(value, error)`` with the panel axes summed out. Complex input is
    handled componentwise and the error is the modulus of the two estimates.
    """
    fvals = np.asarray(fvals)
    resk = np.sum(fvals * rule.kronrod, axis=-1)
    resg = np.sum(fvals * rule.gauss, axis=-1)
    if np.iscomplexobj(fvals):
        er = _real_error(resk.real, resg.real, fvals.real, rule)
        ei = _real_error(resk.imag, resg.imag, fvals.imag, rule)
        err = np.hypot(er, ei)
    else:
        err = _real_error(resk, resg, fvals, rule)
    return resk.sum(axis=-1), err.sum(axis=-1)


@lru_cache(maxsize=64)
def gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def tensor_gauss_legendre(edges_per_axis, order):
    """Tensor Gauss-Legendre nodes over the product grid of per-axis panel edges.

    Returns ``(nodes, weights)`` with shapes ``(M, d)`` and ``(M,)``.
    """
    x, w = gauss_legendre(order)
    axis_nodes, axis_weights = [], []
    for edges in edges_per_axis:
        edges = np.asarray(edges, dtype=float)
        a, b = edges[:-1], edges[1:]
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        axis_nodes.append((mid[:, None] + half[:, None] * x[None, :]).ravel())
        axis_weights.append((half[:, None] * w[None, :]).ravel())
    grids = np.meshgrid(*axis_nodes, indexing="ij")
    wgrids = np.meshgrid(*axis_weights, indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return nodes, weights


def _box_pair(fn, lower, upper, order):
    hi = tensor_gauss_legendre([[l, u] for l, u in zip(lower, upper)], order)
    lo = tensor_gauss_legendre([[l, u] for l, u in zip(lower, upper)], order // 2 + 1)
    qh = float(np.dot(hi[1], fn(hi[0])))
    ql = float(np.dot(lo[1], fn(lo[0])))
    return qh, abs(qh - ql)


def integrate_box(fn, lower, upper, *, order=10, atol=DEFAULT_ATOL, rtol=DEFAULT_RTOL, max_boxes=4096):
    """Globally adaptive cubature of a real function over an axis-aligned box.

    ``fn`` maps an ``(N, d)`` array of points to ``N`` values. The box with the
    largest error estimate is bisected along its longest side until the summed
    estimate meets ``max(atol, rtol * |value|)``.

    Returns ``(value, error)``.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    q, e = _box_pair(fn, lower, upper, order)
    heap = [(-e, 0, lower, upper, q)]
    total, err, counter = q, e, 1
    while err > max(atol, rtol * abs(total)):
        if counter >= max_boxes:
            raise QuadratureError("adaptive cubature exhausted its box budget", err)
        _, _, lo, up, qb = heapq.heappop(heap)
        axis = int(np.argmax(up - lo))
        mid = 0.5 * (lo[axis] + up[axis])
        up_left, lo_right = up.copy(), lo.copy()
        up_left[axis] = mid
        lo_right[axis] = mid
        total -= qb
        for bl, bu in ((lo, up_left), (lo_right, up)):
            qc, ec = _box_pair(fn, bl, bu, order)
            total += qc
            heapq.heappush(heap, (-ec, counter, bl, bu, qc))
            counter += 1
        err = -sum(item[0] for item in heap)
    return total, err
