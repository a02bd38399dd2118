"""Dense-array numerics with reverse-mode differentiation.

Everything downstream (the encoder, the prediction heads, the losses) is
built from the ops in this module.  Data lives in numpy arrays; each op
records its inputs and a closure that maps the output gradient back onto
them, and ``Tensor.backward`` walks that tape in reverse topological
order.  float64 is the default dtype so the finite-difference checks are
meaningful; float32 is supported for training throughput.
"""

from __future__ import annotations

import contextlib
import math
from collections.abc import Iterable, Mapping, Sequence

import numpy as np

MASK_SENTINEL = -1e9

_grad_enabled = True


class NumericsError(Exception):
    """Raised when an op receives shapes or values it cannot handle."""


@contextlib.contextmanager
def no_grad():
    """Disable tape recording inside the block (evaluation fast path)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


class Tensor:
    """A numpy array plus the tape bookkeeping needed for backward."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, dtype=None, _parents=(), _backward=None):
        arr = np.asarray(data, dtype=dtype)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float64)
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self):
        return self.data.size

    def __repr__(self):
        return f"Tensor(shape={self.shape}, dtype={self.dtype.name}, requires_grad={self.requires_grad})"

    def item(self):
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def detach(self):
        return Tensor(self.data, requires_grad=False)

    def backward(self):
        if self.data.ndim != 0:
            raise NumericsError(f"backward requires a scalar output, got shape {self.shape}")
        # Iterative topological order; attention graphs are deep enough that
        # recursion would be fragile.
        order = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in visited:
                    stack.append((p, False))
        self.grad = np.ones((), dtype=self.dtype)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)
            # Free the closure so intermediate buffers can be collected.
            node._backward = None
            node._parents = ()

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __sub__(self, other):
        return add(self, mul(other, -1.0) if isinstance(other, Tensor) else -np.asarray(other))

    def __rsub__(self, other):
        return add(mul(self, -1.0), other)

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            raise NumericsError("tensor/tensor division is not supported; multiply by a reciprocal")
        return mul(self, 1.0 / np.asarray(other))

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, idx):
        return _slice(self, idx)

    # -- shape ops ----------------------------------------------------------

    def reshape(self, *shape):
        return reshape(self, shape if len(shape) != 1 or isinstance(shape[0], int) else shape[0])

    def transpose(self, axes):
        return transpose(self, axes)

    def swapaxes(self, a, b):
        axes = list(range(self.ndim))
        axes[a], axes[b] = axes[b], axes[a]
        return transpose(self, tuple(axes))

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return tmean(self, axis=axis, keepdims=keepdims)


def _as_const(x, like):
    """Coerce a scalar or ndarray operand to the companion tensor's dtype."""
    arr = np.asarray(x)
    if arr.dtype != like.dtype:
        arr = arr.astype(like.dtype)
    return arr


def _needs_tape(*tensors):
    return _grad_enabled and any(t.requires_grad for t in tensors if isinstance(t, Tensor))


def _make(data, parents, backward):
    if parents:
        return Tensor(data, requires_grad=True, _parents=parents, _backward=backward)
    return Tensor(data)


def _unbroadcast(grad, shape):
    """Sum a broadcast gradient back down to the original operand shape."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


def _accum(t, g):
    if not t.requires_grad:
        return
    if t.grad is None:
        if g.shape != t.data.shape:
            g = np.broadcast_to(g, t.data.shape)
        t.grad = np.array(g)
    else:
        t.grad = t.grad + g


def add(a, b):
    if not isinstance(a, Tensor):
        a, b = b, a
    bd = b.data if isinstance(b, Tensor) else _as_const(b, a)
    out = a.data + bd
    if not _needs_tape(a, b):
        return Tensor(out)
    parents = tuple(t for t in (a, b) if isinstance(t, Tensor))

    def backward(g):
        _accum(a, _unbroadcast(g, a.data.shape))
        if isinstance(b, Tensor):
            _accum(b, _unbroadcast(g, b.data.shape))

    return _make(out, parents, backward)


def mul(a, b):
    if not isinstance(a, Tensor):
        a, b = b, a
    bd = b.data if isinstance(b, Tensor) else _as_const(b, a)
    out = a.data * bd
    if not _needs_tape(a, b):
        return Tensor(out)
    parents = tuple(t for t in (a, b) if isinstance(t, Tensor))

    def backward(g):
        _accum(a, _unbroadcast(g * bd, a.data.shape))
        if isinstance(b, Tensor):
            _accum(b, _unbroadcast(g * a.data, b.data.shape))

    return _make(out, parents, backward)


def matmul(a, b):
    if not isinstance(a, Tensor):
        a = Tensor(a)
    if not isinstance(b, Tensor):
        b = Tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise NumericsError(f"matmul requires ndim >= 2, got {a.shape} @ {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise NumericsError(f"matmul inner dims differ: {a.shape} @ {b.shape}")
    out = a.data @ b.data
    if not _needs_tape(a, b):
        return Tensor(out)

    def backward(g):
        _accum(a, _unbroadcast(g @ b.data.swapaxes(-1, -2), a.data.shape))
        _accum(b, _unbroadcast(a.data.swapaxes(-1, -2) @ g, b.data.shape))

    return _make(out, (a, b), backward)


def reshape(t, shape):
    out = t.data.reshape(shape)
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        _accum(t, g.reshape(t.data.shape))

    return _make(out, (t,), backward)


def transpose(t, axes):
    out = t.data.transpose(axes)
    if not _needs_tape(t):
        return Tensor(out)
    inv = np.argsort(axes)

    def backward(g):
        _accum(t, g.transpose(inv))

    return _make(out, (t,), backward)


def _slice(t, idx):
    out = t.data[idx]
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        full = np.zeros_like(t.data)
        full[idx] = g
        _accum(t, full)

    return _make(out, (t,), backward)


def broadcast_to(t, shape):
    out = np.broadcast_to(t.data, shape)
    if not _needs_tape(t):
        return Tensor(out.copy())

    def backward(g):
        _accum(t, _unbroadcast(g, t.data.shape))

    return _make(out.copy(), (t,), backward)


def tsum(t, axis=None, keepdims=False):
    out = t.data.sum(axis=axis, keepdims=keepdims)
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        if axis is None:
            _accum(t, np.broadcast_to(g, t.data.shape))
            return
        if not keepdims:
            g = np.expand_dims(g, axis)
        _accum(t, np.broadcast_to(g, t.data.shape))

    return _make(out, (t,), backward)


def tmean(t, axis=None, keepdims=False):
    if axis is None:
        n = t.data.size
    else:
        axes = (axis,) if isinstance(axis, int) else axis
        n = math.prod(t.data.shape[a] for a in axes)
    return mul(tsum(t, axis=axis, keepdims=keepdims), 1.0 / n)


def concat(tensors, axis=0):
    tensors = list(tensors)
    out = np.concatenate([t.data for t in tensors], axis=axis)
    if not _needs_tape(*tensors):
        return Tensor(out)
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            sl = [slice(None)] * g.ndim
            sl[axis] = slice(lo, hi)
            _accum(t, g[tuple(sl)])

    return _make(out, tuple(tensors), backward)


def take(t, indices, axis=0):
    """Row lookup along the leading axis; the embedding-table gather."""
    if axis != 0:
        raise NumericsError("take supports axis=0 only")
    idx = np.asarray(indices)
    out = t.data[idx]
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        full = np.zeros_like(t.data)
        np.add.at(full, idx, g)
        _accum(t, full)

    return _make(out, (t,), backward)


def gather_rows(t, idx):
    """Batched row gather: t [B, A, ...] and idx [B, K] -> [B, K, ...]."""
    idx = np.asarray(idx)
    if t.ndim < 2 or idx.ndim != 2 or idx.shape[0] != t.shape[0]:
        raise NumericsError(f"gather_rows shape mismatch: {t.shape} with idx {idx.shape}")
    b = np.arange(t.shape[0])[:, None]
    out = t.data[b, idx]
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        full = np.zeros_like(t.data)
        np.add.at(full, (b, idx), g)
        _accum(t, full)

    return _make(out, (t,), backward)


def fill_index(t, index, value, axis=-1):
    """Overwrite one slice along ``axis`` with a constant; its grad is dropped."""
    out = t.data.copy()
    sl = [slice(None)] * t.ndim
    sl[axis] = index
    out[tuple(sl)] = value
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        gk = g.copy()
        gk[tuple(sl)] = 0.0
        _accum(t, gk)

    return _make(out, (t,), backward)


def relu(t):
    out = np.maximum(t.data, 0.0)
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        _accum(t, g * (t.data > 0.0))

    return _make(out, (t,), backward)


_GELU_C = math.sqrt(2.0 / math.pi)


def gelu(t):
    """tanh-approximation GELU with an analytic derivative."""
    x = t.data
    inner = _GELU_C * (x + 0.044715 * x**3)
    th = np.tanh(inner)
    out = 0.5 * x * (1.0 + th)
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        sech2 = 1.0 - th * th
        d = 0.5 * (1.0 + th) + 0.5 * x * sech2 * _GELU_C * (1.0 + 3 * 0.044715 * x * x)
        _accum(t, g * d)

    return _make(out, (t,), backward)


def exp(t):
    out = np.exp(t.data)
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        _accum(t, g * out)

    return _make(out, (t,), backward)


def log(t):
    out = np.log(t.data)
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        _accum(t, g / t.data)

    return _make(out, (t,), backward)


def _check_softmax_input(x):
    bad = ~np.isfinite(x)
    if bad.any():
        raise NumericsError("softmax input contains NaN/Inf (only the -1e9 mask sentinel is allowed)")


def softmax(t, axis=-1):
    """Numerically stable softmax; rejects non-finite inputs.

    Fully masked rows (every entry at the -1e9 sentinel) come out uniform,
    which keeps padded query rows harmless; callers never read them.
    """
    _check_softmax_input(t.data)
    shifted = t.data - t.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        dot = (g * out).sum(axis=axis, keepdims=True)
        _accum(t, out * (g - dot))

    return _make(out, (t,), backward)


def log_softmax(t, axis=-1):
    _check_softmax_input(t.data)
    shifted = t.data - t.data.max(axis=axis, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    out = shifted - lse
    if not _needs_tape(t):
        return Tensor(out)

    def backward(g):
        _accum(t, g - np.exp(out) * g.sum(axis=axis, keepdims=True))

    return _make(out, (t,), backward)


def layer_norm(t, gain, bias, eps=1e-5):
    """Normalize over the last axis, then scale and shift."""
    x = t.data
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x - mu) * inv
    out = xhat * gain.data + bias.data
    if not _needs_tape(t, gain, bias):
        return Tensor(out)

    def backward(g):
        d = x.shape[-1]
        gx = g * gain.data
        _accum(
            t,
            inv * (gx - gx.mean(axis=-1, keepdims=True) - xhat * (gx * xhat).mean(axis=-1, keepdims=True)),
        )
        red = tuple(range(g.ndim - 1))
        _accum(gain, (g * xhat).sum(axis=red))
        _accum(bias, g.sum(axis=red))

    return _make(out, (t, gain, bias), backward)


def dropout(t, p, rng, train):
    """Inverted dropout; identity when not training or p == 0."""
    if not train or p <= 0.0:
        return t
    if not 0.0 <= p < 1.0:
        raise NumericsError(f"dropout rate must be in [0, 1), got {p}")
    keep = (rng.random(t.shape) >= p).astype(t.data.dtype) / (1.0 - p)
    return mul(t, keep)


def scaled_dot_attention(q, k, v, mask=None):
    """Scaled dot-product attention over the last two axes.

    q: [..., Tq, dk], k: [..., Tk, dk], v: [..., Tk, dv].  ``mask`` may be a
    boolean array broadcastable to the score shape (True = attend) or an
    additive float array; blocked positions get exactly zero weight.
    """
    for name, t in (("q", q), ("k", k), ("v", v)):
        if not isinstance(t, Tensor):
            raise NumericsError(f"{name} must be a Tensor")
        if t.ndim < 2:
            raise NumericsError(f"{name} needs at least 2 dims, got shape {t.shape}")
    if q.shape[-1] != k.shape[-1]:
        raise NumericsError(f"q/k feature dims differ: {q.shape} vs {k.shape}")
    if k.shape[-2] != v.shape[-2]:
        raise NumericsError(f"k/v sequence lengths differ: {k.shape} vs {v.shape}")
    scale = 1.0 / math.sqrt(q.shape[-1])
    scores = mul(matmul(q, k.swapaxes(-1, -2)), scale)
    if mask is not None:
        mask = np.asarray(mask) if not isinstance(mask, np.ndarray) else mask
        if mask.dtype == bool:
            addend = np.where(mask, 0.0, MASK_SENTINEL).astype(scores.dtype)
        else:
            addend = mask.astype(scores.dtype)
        scores = add(scores, addend)
    return matmul(softmax(scores, axis=-1), v)


# -- gradient checking ------------------------------------------------------


def _leaves(point):
    if isinstance(point, Tensor):
        return [("point", point)]
    if isinstance(point, Mapping):
        return [(str(k), v) for k, v in point.items()]
    if isinstance(point, Sequence):
        return [(str(i), v) for i, v in enumerate(point)]
    raise NumericsError("grad_check point must be a Tensor, sequence, or mapping of Tensors")


def grad_check(f, point, epsilon=1e-5, n_samples=None, rng=None):
    """Compare reverse-mode gradients of ``f`` against central differences.

    ``f`` must rebuild its graph on every call and be deterministic (no
    dropout).  Returns the max relative error over all checked components;
    with ``n_samples`` set, that many components are drawn per leaf using
    ``rng`` instead of sweeping every entry.
    """
    leaves = _leaves(point)
    if not leaves:
        raise NumericsError("grad_check needs at least one input tensor")
    for _, t in leaves:
        if not isinstance(t, Tensor):
            raise NumericsError("grad_check inputs must be Tensors")
        t.requires_grad = True
        t.zero_grad()
    out = f(point)
    if not isinstance(out, Tensor) or out.ndim != 0:
        raise NumericsError("grad_check target function must return a scalar Tensor")
    out.backward()
    analytic = {name: (np.zeros_like(t.data) if t.grad is None else t.grad.copy()) for name, t in leaves}

    if rng is None:
        rng = np.random.default_rng(0)
    worst = 0.0
    for name, t in leaves:
        flat = t.data.reshape(-1)
        n = flat.size
        if n_samples is None or n_samples >= n:
            picks = range(n)
        else:
            picks = rng.choice(n, size=n_samples, replace=False)
        for i in picks:
            orig = flat[i]
            flat[i] = orig + epsilon
            hi = float(f(point).data)
            flat[i] = orig - epsilon
            lo = float(f(point).data)
            flat[i] = orig
            numeric = (hi - lo) / (2.0 * epsilon)
            a = float(analytic[name].reshape(-1)[i])
            # Relative error with a floor so finite-difference noise on
            # near-zero components does not dominate.
            err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-3)
            worst = max(worst, err)
    return worst
