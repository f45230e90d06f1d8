"""Truncated multivariate Taylor arithmetic ("jets") up to order 3.

A :class:`Jet` holds an array-valued quantity together with all of its
partial derivatives at a single point, up to a fixed order.  Coefficient
``k`` is the k-th derivative tensor with the ``k`` derivative axes placed
first::

    c[0].shape == S
    c[1].shape == (n,) + S
    c[2].shape == (n, n) + S
    c[3].shape == (n, n, n) + S

These are plain derivative tensors (no 1/k! factors), symmetric in the
derivative axes.  Every operation propagates them exactly by the Leibniz and
Faa di Bruno rules; the result order is the minimum of the operand orders.
Plain floats and ndarrays act as constants of unlimited order.
"""

import math

import numpy as np

from .errors import DomainError
from .linalg import pivoted_inverse

MAX_ORDER = 3


def _align(ck, k, rank):
    # Left-pad the value axes so elementwise broadcasting never mixes a
    # derivative axis with a value axis.
    extra = rank - (ck.ndim - k)
    if extra <= 0:
        return ck
    return ck.reshape(ck.shape[:k] + (1,) * extra + ck.shape[k:])


def _leibniz_term(a, b, op, k):
    """k-th derivative tensor of ``op(a, b)`` for a bilinear broadcasting op."""
    if k == 0:
        return op(a[0], b[0])
    if k == 1:
        return op(a[1], b[0]) + op(a[0], b[1])
    if k == 2:
        return (op(a[2], b[0]) + op(a[0], b[2])
                + op(a[1][:, None], b[1][None, :]) + op(a[1][None, :], b[1][:, None]))
    if k == 3:
        a1, a2, b1, b2 = a[1], a[2], b[1], b[2]
        return (op(a[3], b[0]) + op(a[0], b[3])
                + op(a1[:, None, None], b2[None, :, :])
                + op(a1[None, :, None], b2[:, None, :])
                + op(a1[None, None, :], b2[:, :, None])
                + op(a2[:, :, None], b1[None, None, :])
                + op(a2[:, None, :], b1[None, :, None])
                + op(a2[None, :, :], b1[:, None, None]))
    raise ValueError(f"jet order {k} exceeds {MAX_ORDER}")


def _compose(a, p):
    """Chain rule for an elementwise function with derivatives p[0..order]."""
    c = a.c
    out = [np.asarray(p[0], dtype=float)]
    if a.order >= 1:
        out.append(p[1] * c[1])
    if a.order >= 2:
        out.append(p[1] * c[2] + p[2] * (c[1][:, None] * c[1][None, :]))
    if a.order >= 3:
        a1, a2 = c[1], c[2]
        sym = (a1[:, None, None] * a2[None, :, :]
               + a1[None, :, None] * a2[:, None, :]
               + a1[None, None, :] * a2[:, :, None])
        out.append(p[1] * c[3] + p[2] * sym
                   + p[3] * (a1[:, None, None] * a1[None, :, None] * a1[None, None, :]))
    return Jet(out, a.n)


class Jet:
    """Array-valued truncated Taylor expansion in ``n`` variables."""

    __slots__ = ("c", "n")
    __array_priority__ = 1000

    def __init__(self, coeffs, n):
        if not 1 <= len(coeffs) <= MAX_ORDER + 1:
            raise ValueError(f"a jet carries 1..{MAX_ORDER + 1} coefficients, got {len(coeffs)}")
        self.c = tuple(np.asarray(ck, dtype=float) for ck in coeffs)
        self.n = int(n)

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, n, order=MAX_ORDER):
        value = np.asarray(value, dtype=float)
        return cls([value] + [np.zeros((n,) * k + value.shape) for k in range(1, order + 1)], n)

    @classmethod
    def variables(cls, x0, order=MAX_ORDER, n=None, offset=0):
        """Seed jets for coordinates ``x0`` occupying variables offset..offset+len(x0)-1."""
        x0 = np.asarray(x0, dtype=float)
        size = x0.shape[0]
        n = size if n is None else n
        coeffs = [x0]
        if order >= 1:
            c1 = np.zeros((n, size))
            c1[offset:offset + size, :] = np.eye(size)
            coeffs.append(c1)
        for k in range(2, order + 1):
            coeffs.append(np.zeros((n,) * k + (size,)))
        return cls(coeffs, n)

    # -- introspection ----------------------------------------------------
    @property
    def order(self):
        return len(self.c) - 1

    @property
    def shape(self):
        return self.c[0].shape

    @property
    def ndim(self):
        return self.c[0].ndim

    @property
    def value(self):
        return self.c[0]

    @property
    def grad(self):
        return self.c[1]

    @property
    def hess(self):
        return self.c[2]

    @property
    def third(self):
        return self.c[3]

    def __repr__(self):
        return f"Jet(shape={self.shape}, n={self.n}, order={self.order})"

    # -- structural operations --------------------------------------------
    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.c[:order + 1], self.n)

    def D(self):
        """Jet of the gradient; the new leading value axis is the derivative index."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet(self.c[1:], self.n)

    def pad(self, n_new, offset=0):
        """Embed into a larger variable space; new directions get zero derivatives."""
        out = [self.c[0]]
        for k in range(1, self.order + 1):
            ck = np.zeros((n_new,) * k + self.shape)
            ck[(slice(offset, offset + self.n),) * k] = self.c[k]
            out.append(ck)
        return Jet(out, n_new)

    def __getitem__(self, key):
        if not isinstance(key, tuple):
            key = (key,)
        return Jet([ck[(slice(None),) * k + key] for k, ck in enumerate(self.c)], self.n)

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        return Jet([ck.transpose(tuple(range(k)) + tuple(k + a for a in axes))
                    for k, ck in enumerate(self.c)], self.n)

    @property
    def T(self):
        return self.transpose()

    def sum(self, axis=None):
        if axis is None:
            axes = tuple(range(self.ndim))
        else:
            axes = (axis,) if isinstance(axis, int) else tuple(axis)
            axes = tuple(a % self.ndim for a in axes)
        return Jet([ck.sum(axis=tuple(k + a for a in axes)) for k, ck in enumerate(self.c)], self.n)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return Jet([ck.reshape(ck.shape[:k] + shape) for k, ck in enumerate(self.c)], self.n)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other):
        if other.n != self.n:
            raise ValueError(f"jets over {self.n} and {other.n} variables cannot be combined")

    def _add(self, other, sign):
        if isinstance(other, Jet):
            self._check(other)
            order = min(self.order, other.order)
            rank = max(self.ndim, other.ndim)
            return Jet([_align(self.c[k], k, rank) + sign * _align(other.c[k], k, rank)
                        for k in range(order + 1)], self.n)
        other = np.asarray(other, dtype=float)
        shape = np.broadcast_shapes(self.shape, other.shape)
        out = [self.c[0] + sign * other]
        for k in range(1, self.order + 1):
            ck = _align(self.c[k], k, len(shape))
            out.append(np.broadcast_to(ck, (self.n,) * k + shape))
        return Jet(out, self.n)

    def __add__(self, other):
        return self._add(other, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._add(other, -1.0)

    def __rsub__(self, other):
        return (-self)._add(other, 1.0)

    def __neg__(self):
        return Jet([-ck for ck in self.c], self.n)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            order = min(self.order, other.order)
            rank = max(self.ndim, other.ndim)
            a = [_align(ck, k, rank) for k, ck in enumerate(self.c)]
            b = [_align(ck, k, rank) for k, ck in enumerate(other.c)]
            return Jet([_leibniz_term(a, b, np.multiply, k) for k in range(order + 1)], self.n)
        other = np.asarray(other, dtype=float)
        rank = max(self.ndim, other.ndim)
        return Jet([_align(ck, k, rank) * other for k, ck in enumerate(self.c)], self.n)

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.c[0]
        if np.any(v == 0.0):
            raise DomainError("division by zero")
        inv = 1.0 / v
        return _compose(self, [inv, -inv ** 2, 2.0 * inv ** 3, -6.0 * inv ** 4])

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        other = np.asarray(other, dtype=float)
        if np.any(other == 0.0):
            raise DomainError("division by zero")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        return power(self, p)


# -- elementwise functions (accept floats, arrays or jets) --------------------

def exp(a):
    if not isinstance(a, Jet):
        return np.exp(a) if isinstance(a, np.ndarray) else math.exp(a)
    e = np.exp(a.c[0])
    return _compose(a, [e, e, e, e])


def log(a):
    v = a.c[0] if isinstance(a, Jet) else np.asarray(a, dtype=float)
    if np.any(v <= 0.0):
        raise DomainError("log of a non-positive argument")
    if not isinstance(a, Jet):
        return np.log(a) if isinstance(a, np.ndarray) else math.log(a)
    inv = 1.0 / v
    return _compose(a, [np.log(v), inv, -inv ** 2, 2.0 * inv ** 3])


def sin(a):
    if not isinstance(a, Jet):
        return np.sin(a) if isinstance(a, np.ndarray) else math.sin(a)
    s, c = np.sin(a.c[0]), np.cos(a.c[0])
    return _compose(a, [s, c, -s, -c])


def cos(a):
    if not isinstance(a, Jet):
        return np.cos(a) if isinstance(a, np.ndarray) else math.cos(a)
    s, c = np.sin(a.c[0]), np.cos(a.c[0])
    return _compose(a, [c, -s, -c, s])


def sqrt(a):
    v = a.c[0] if isinstance(a, Jet) else np.asarray(a, dtype=float)
    if np.any(v <= 0.0):
        raise DomainError("sqrt of a non-positive argument")
    if not isinstance(a, Jet):
        return np.sqrt(a) if isinstance(a, np.ndarray) else math.sqrt(a)
    r = np.sqrt(v)
    return _compose(a, [r, 0.5 / r, -0.25 / (r * v), 0.375 / (r * v * v)])


def power(a, p):
    """``a ** p`` for a constant exponent ``p``.

    Integer exponents accept any base (negative ones need a nonzero base);
    other exponents need a strictly positive base.
    """
    p = float(p)
    integral = p == math.floor(p)
    v = a.c[0] if isinstance(a, Jet) else np.asarray(a, dtype=float)
    if not integral and np.any(v <= 0.0):
        raise DomainError(f"non-integer power {p:g} of a non-positive base")
    if integral and p < 0 and np.any(v == 0.0):
        raise DomainError("division by zero in negative power")
    if not isinstance(a, Jet):
        out = np.power(v, p)
        return float(out) if out.ndim == 0 else out
    derivs = []
    coef = 1.0
    for j in range(a.order + 1):
        if coef == 0.0:
            derivs.append(np.zeros_like(v))
        else:
            derivs.append(coef * np.power(v, p - j))
        coef *= p - j
    return _compose(a, derivs)


# -- contractions ----------------------------------------------------------------

def _parse_spec(spec):
    lhs, out = spec.replace(" ", "").split("->")
    return lhs.split(","), out


def _einsum2(ins, out, a, b):
    spec = f"...{ins[0]},...{ins[1]}->...{out}"
    if isinstance(a, Jet) and isinstance(b, Jet):
        a._check(b)
        op = lambda x, y: np.einsum(spec, x, y)
        order = min(a.order, b.order)
        return Jet([_leibniz_term(a.c, b.c, op, k) for k in range(order + 1)], a.n)
    if isinstance(a, Jet):
        b = np.asarray(b, dtype=float)
        return Jet([np.einsum(spec, ck, b) for ck in a.c], a.n)
    if isinstance(b, Jet):
        a = np.asarray(a, dtype=float)
        return Jet([np.einsum(spec, a, ck) for ck in b.c], b.n)
    return np.einsum(f"{ins[0]},{ins[1]}->{out}", a, b)


def einsum(spec, *operands):
    """``numpy.einsum`` over jets and constants (explicit ``->`` form only).

    More than two operands are contracted pairwise from the left.
    """
    ins, out = _parse_spec(spec)
    if len(ins) != len(operands):
        raise ValueError(f"spec {spec!r} expects {len(ins)} operands, got {len(operands)}")
    if len(operands) == 1:
        a = operands[0]
        if isinstance(a, Jet):
            return Jet([np.einsum(f"...{ins[0]}->...{out}", ck) for ck in a.c], a.n)
        return np.einsum(f"{ins[0]}->{out}", a)
    acc, acc_idx = operands[0], ins[0]
    for pos in range(1, len(operands)):
        later = "".join(ins[pos + 1:]) + out
        merged = acc_idx + ins[pos]
        keep = "".join(dict.fromkeys(ch for ch in merged if ch in later))
        target = out if pos == len(operands) - 1 else keep
        acc = _einsum2([acc_idx, ins[pos]], target, acc, operands[pos])
        acc_idx = target
    return acc


def inv(a):
    """Inverse of a square-matrix jet (last two axes), order by order."""
    if not isinstance(a, Jet):
        return pivoted_inverse(a)
    b0 = pivoted_inverse(a.c[0])
    coeffs = [b0]
    for k in range(1, a.order + 1):
        trial = coeffs + [np.zeros((a.n,) * k + b0.shape)]
        rest = _leibniz_term(a.c, trial, np.matmul, k)
        coeffs.append(-np.matmul(b0, rest))
    return Jet(coeffs, a.n)


def as_jet(x, n, order=MAX_ORDER):
    return x if isinstance(x, Jet) else Jet.constant(x, n, order)


def stack(items, axis=0):
    jets = [x for x in items if isinstance(x, Jet)]
    if not jets:
        return np.stack([np.asarray(x, dtype=float) for x in items], axis=axis)
    n = jets[0].n
    order = min(j.order for j in jets)
    items = [as_jet(x, n, order).truncate(order) for x in items]
    return Jet([np.stack([j.c[k] for j in items], axis=k + axis) for k in range(order + 1)], n)


def concatenate(items, axis=0):
    jets = [x for x in items if isinstance(x, Jet)]
    if not jets:
        return np.concatenate([np.asarray(x, dtype=float) for x in items], axis=axis)
    n = jets[0].n
    order = min(j.order for j in jets)
    items = [as_jet(x, n, order).truncate(order) for x in items]
    return Jet([np.concatenate([j.c[k] for j in items], axis=k + axis) for k in range(order + 1)], n)


def block(rows):
    """Assemble a matrix jet from a nested list of blocks, like ``numpy.block``."""
    return concatenate([concatenate(row, axis=1) for row in rows], axis=0)


def value(x):
    """Point value of a jet, or the argument itself for constants."""
    return x.c[0] if isinstance(x, Jet) else np.asarray(x, dtype=float)
