"""Linear-algebra core on the doubled representation space.

A point holds one complex matrix per doubled edge (B), one framing-in map per
vertex (i: W_k -> V_k) and one framing-out map per vertex (j: V_k -> W_k).
Moment maps, the complex symplectic form, the hermitian metric, gauge and
infinitesimal actions, and the adjoint of the infinitesimal action live here.

Conventions:
  mu_R(p)_k = (i/2) (sum_{h in H, in(h)=k} B_h B_h^dag - B_hbar^dag B_hbar
                     + i_k i_k^dag - j_k^dag j_k)           (skew-hermitian)
  mu_C(p)_k = sum_{h in H, in(h)=k} eps(h) B_h B_hbar + i_k j_k
with the framing terms counted once per vertex.  The metric is sesquilinear,
linear in its first slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .quiver import CentralParameter, DimensionVectors, Quiver

_CPLX = np.complex128


def _as_matrix(a, rows: int, cols: int, what: str) -> np.ndarray:
    m = np.asarray(a, dtype=_CPLX)
    if m.shape != (rows, cols):
        raise ValueError(f"{what} must have shape ({rows},{cols}), got {m.shape}")
    return m


@dataclass
class RepPoint:
    """One point of the doubled representation space (with increments reusing
    the same container).  B is indexed by the doubled edge set; i and j by
    vertex."""

    quiver: Quiver
    dims: DimensionVectors
    B: list[np.ndarray] = field(default_factory=list)
    i: list[np.ndarray] = field(default_factory=list)
    j: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        q, d = self.quiver, self.dims
        d.check_quiver(q)
        if not self.B and not self.i and not self.j:
            self.B = [np.zeros((d.v[q.h_in(h)], d.v[q.h_out(h)]), dtype=_CPLX)
                      for h in range(q.num_h)]
            self.i = [np.zeros((d.v[k], d.w[k]), dtype=_CPLX) for k in range(q.n)]
            self.j = [np.zeros((d.w[k], d.v[k]), dtype=_CPLX) for k in range(q.n)]
            return
        self.B = [_as_matrix(self.B[h], d.v[q.h_in(h)], d.v[q.h_out(h)], f"B[{h}]")
                  for h in range(q.num_h)]
        self.i = [_as_matrix(self.i[k], d.v[k], d.w[k], f"i[{k}]") for k in range(q.n)]
        self.j = [_as_matrix(self.j[k], d.w[k], d.v[k], f"j[{k}]") for k in range(q.n)]

    @classmethod
    def zeros(cls, quiver: Quiver, dims: DimensionVectors) -> "RepPoint":
        return cls(quiver=quiver, dims=dims)

    def copy(self) -> "RepPoint":
        return RepPoint(self.quiver, self.dims,
                        [b.copy() for b in self.B],
                        [m.copy() for m in self.i],
                        [m.copy() for m in self.j])

    def _zip(self, other: "RepPoint", op) -> "RepPoint":
        if other.quiver != self.quiver or other.dims != self.dims:
            raise ValueError("rep points live on different quivers")
        return RepPoint(self.quiver, self.dims,
                        [op(a, b) for a, b in zip(self.B, other.B)],
                        [op(a, b) for a, b in zip(self.i, other.i)],
                        [op(a, b) for a, b in zip(self.j, other.j)])

    def __add__(self, other: "RepPoint") -> "RepPoint":
        return self._zip(other, np.add)

    def __sub__(self, other: "RepPoint") -> "RepPoint":
        return self._zip(other, np.subtract)

    def __mul__(self, scalar) -> "RepPoint":
        s = _CPLX(scalar)
        return RepPoint(self.quiver, self.dims,
                        [s * b for b in self.B], [s * m for m in self.i],
                        [s * m for m in self.j])

    __rmul__ = __mul__

    def __neg__(self) -> "RepPoint":
        return self * (-1.0)

    def norm(self) -> float:
        return float(np.sqrt(max(metric(self, self).real, 0.0)))

    def flatten(self) -> np.ndarray:
        parts = [b.ravel() for b in self.B] + [m.ravel() for m in self.i] \
            + [m.ravel() for m in self.j]
        if not parts:
            return np.zeros(0, dtype=_CPLX)
        return np.concatenate(parts)

    @classmethod
    def from_flat(cls, quiver: Quiver, dims: DimensionVectors, vec: np.ndarray) -> "RepPoint":
        p = cls.zeros(quiver, dims)
        pos = 0
        for h in range(quiver.num_h):
            n = p.B[h].size
            p.B[h] = vec[pos:pos + n].reshape(p.B[h].shape).astype(_CPLX)
            pos += n
        for k in range(quiver.n):
            n = p.i[k].size
            p.i[k] = vec[pos:pos + n].reshape(p.i[k].shape).astype(_CPLX)
            pos += n
        for k in range(quiver.n):
            n = p.j[k].size
            p.j[k] = vec[pos:pos + n].reshape(p.j[k].shape).astype(_CPLX)
            pos += n
        if pos != vec.size:
            raise ValueError("flat vector length does not match the representation space")
        return p

    def to_dict(self) -> dict:
        return {
            "B": [_matrix_pairs(b) for b in self.B],
            "i": [_matrix_pairs(m) for m in self.i],
            "j": [_matrix_pairs(m) for m in self.j],
        }

    @classmethod
    def from_dict(cls, quiver: Quiver, dims: DimensionVectors, data: dict) -> "RepPoint":
        p = cls.zeros(quiver, dims)
        return RepPoint(quiver, dims,
                        [_pairs_matrix(m, b.shape) for m, b in zip(data["B"], p.B)],
                        [_pairs_matrix(m, b.shape) for m, b in zip(data["i"], p.i)],
                        [_pairs_matrix(m, b.shape) for m, b in zip(data["j"], p.j)])


def _matrix_pairs(m: np.ndarray) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def _pairs_matrix(rows: list, shape: tuple[int, int]) -> np.ndarray:
    m = np.zeros(shape, dtype=_CPLX)
    for r, row in enumerate(rows):
        for c, (re, im) in enumerate(row):
            m[r, c] = complex(re, im)
    return m


def rep_dim(quiver: Quiver, dims: DimensionVectors) -> int:
    """Complex dimension of the doubled representation space."""
    return RepPoint.zeros(quiver, dims).flatten().size


@dataclass
class LieElement:
    """Tuple of square blocks, one per vertex; klass records the real form
    the blocks are expected to live in ('hermitian', 'skew', 'general')."""

    dims: DimensionVectors
    blocks: list[np.ndarray]
    klass: str = "general"

    def __post_init__(self):
        self.blocks = [_as_matrix(self.blocks[k], self.dims.v[k], self.dims.v[k], f"xi[{k}]")
                       for k in range(self.dims.n)]

    @classmethod
    def zeros(cls, dims: DimensionVectors, klass: str = "general") -> "LieElement":
        return cls(dims, [np.zeros((vk, vk), dtype=_CPLX) for vk in dims.v], klass)

    def copy(self) -> "LieElement":
        return LieElement(self.dims, [b.copy() for b in self.blocks], self.klass)

    def __add__(self, other: "LieElement") -> "LieElement":
        klass = self.klass if self.klass == other.klass else "general"
        return LieElement(self.dims, [a + b for a, b in zip(self.blocks, other.blocks)], klass)

    def __sub__(self, other: "LieElement") -> "LieElement":
        klass = self.klass if self.klass == other.klass else "general"
        return LieElement(self.dims, [a - b for a, b in zip(self.blocks, other.blocks)], klass)

    def __mul__(self, scalar) -> "LieElement":
        s = _CPLX(scalar)
        klass = self.klass if s.imag == 0.0 and s.real >= 0 else "general"
        return LieElement(self.dims, [s * b for b in self.blocks], klass)

    __rmul__ = __mul__

    def __neg__(self) -> "LieElement":
        return LieElement(self.dims, [-b for b in self.blocks], self.klass)

    def dagger(self) -> "LieElement":
        return LieElement(self.dims, [b.conj().T for b in self.blocks], self.klass)

    def norm(self) -> float:
        return float(np.sqrt(sum(np.vdot(b, b).real for b in self.blocks)))

    def max_deviation(self, klass: str) -> float:
        """Distance of the blocks from the hermitian or skew-hermitian cone."""
        dev = 0.0
        for b in self.blocks:
            if klass == "hermitian":
                dev = max(dev, float(np.abs(b - b.conj().T).max(initial=0.0)))
            elif klass == "skew":
                dev = max(dev, float(np.abs(b + b.conj().T).max(initial=0.0)))
        return dev


def lie_inner(a: LieElement, b: LieElement) -> complex:
    """Hermitian pairing sum_k Tr(a_k b_k^dag), linear in the first slot."""
    return complex(sum(np.vdot(bk, ak) for ak, bk in zip(a.blocks, b.blocks)))


def zeta_real_lie(sigma, dims: DimensionVectors) -> LieElement:
    """zeta_R as a skew-hermitian element: i sigma_k Id per vertex."""
    sig = np.asarray(sigma, dtype=float)
    return LieElement(dims, [1j * sig[k] * np.eye(dims.v[k], dtype=_CPLX)
                             for k in range(dims.n)], "skew")


def central_lie(values, dims: DimensionVectors) -> LieElement:
    vals = np.asarray(values, dtype=_CPLX)
    return LieElement(dims, [vals[k] * np.eye(dims.v[k], dtype=_CPLX)
                             for k in range(dims.n)], "general")


def central_deviation(x: LieElement) -> float:
    """How far each block is from a scalar matrix, max over vertices."""
    dev = 0.0
    for b in x.blocks:
        if b.shape[0] == 0:
            continue
        scal = np.trace(b) / b.shape[0]
        dev = max(dev, float(np.abs(b - scal * np.eye(b.shape[0])).max(initial=0.0)))
    return dev


@dataclass
class GaugeElement:
    """Invertible blocks per vertex acting by g.p = (g_in B g_out^-1, g i, j g^-1)."""

    dims: DimensionVectors
    g: list[np.ndarray]

    def __post_init__(self):
        self.g = [_as_matrix(self.g[k], self.dims.v[k], self.dims.v[k], f"g[{k}]")
                  for k in range(self.dims.n)]

    @classmethod
    def identity(cls, dims: DimensionVectors) -> "GaugeElement":
        return cls(dims, [np.eye(vk, dtype=_CPLX) for vk in dims.v])

    def inverse(self) -> "GaugeElement":
        return GaugeElement(self.dims, [np.linalg.inv(gk) for gk in self.g])

    def compose(self, other: "GaugeElement") -> "GaugeElement":
        """self after other (matrix product blockwise)."""
        return GaugeElement(self.dims, [a @ b for a, b in zip(self.g, other.g)])

    def dagger(self) -> "GaugeElement":
        return GaugeElement(self.dims, [gk.conj().T for gk in self.g])

    def unitary_defect(self) -> float:
        dev = 0.0
        for gk in self.g:
            dev = max(dev, float(np.abs(gk.conj().T @ gk - np.eye(gk.shape[0])).max(initial=0.0)))
        return dev

    def cond(self) -> float:
        c = 1.0
        for gk in self.g:
            if gk.shape[0] > 0:
                c = max(c, float(np.linalg.cond(gk)))
        return c


def lie_exp(xi: LieElement) -> GaugeElement:
    """Blockwise matrix exponential (scaling-and-squaring Pade)."""
    return GaugeElement(xi.dims, [scipy.linalg.expm(b) if b.size else b.copy()
                                  for b in xi.blocks])


def gauge_act(g: GaugeElement, p: RepPoint) -> RepPoint:
    q = p.quiver
    ginv = [np.linalg.inv(gk) if gk.size else gk.copy() for gk in g.g]
    return RepPoint(
        p.quiver, p.dims,
        [g.g[q.h_in(h)] @ p.B[h] @ ginv[q.h_out(h)] for h in range(q.num_h)],
        [g.g[k] @ p.i[k] for k in range(q.n)],
        [p.j[k] @ ginv[k] for k in range(q.n)])


def inf_action(p: RepPoint, xi: LieElement) -> RepPoint:
    """Derivative of the gauge action at the identity, in direction xi."""
    q = p.quiver
    return RepPoint(
        p.quiver, p.dims,
        [xi.blocks[q.h_in(h)] @ p.B[h] - p.B[h] @ xi.blocks[q.h_out(h)]
         for h in range(q.num_h)],
        [xi.blocks[k] @ p.i[k] for k in range(q.n)],
        [-p.j[k] @ xi.blocks[k] for k in range(q.n)])


def inf_action_adjoint(p: RepPoint, incr: RepPoint) -> LieElement:
    """Adjoint of inf_action(p, .) for the metric pairings:
    <inf_action(p, xi), q> = <xi, inf_action_adjoint(p, q)>."""
    q = p.quiver
    blocks = []
    for k in range(q.n):
        acc = np.zeros((p.dims.v[k], p.dims.v[k]), dtype=_CPLX)
        for h in q.h_into(k):
            hb = q.h_bar(h)
            acc += incr.B[h] @ p.B[h].conj().T - p.B[hb].conj().T @ incr.B[hb]
        acc += incr.i[k] @ p.i[k].conj().T - p.j[k].conj().T @ incr.j[k]
        blocks.append(acc)
    return LieElement(p.dims, blocks, "general")


def metric(p: RepPoint, q: RepPoint) -> complex:
    """Hermitian metric, linear in p: sum Tr(B B'^dag) + Tr(i i'^dag) + Tr(j'^dag j)."""
    acc = 0.0 + 0.0j
    for a, b in zip(p.B, q.B):
        acc += np.vdot(b, a)
    for a, b in zip(p.i, q.i):
        acc += np.vdot(b, a)
    for a, b in zip(p.j, q.j):
        acc += np.vdot(b, a)
    return complex(acc)


def symplectic_form(p: RepPoint, q: RepPoint) -> complex:
    """Complex-bilinear form sum_h Tr(eps(h) B_h B'_hbar) + sum_k Tr(i_k j'_k - i'_k j_k)."""
    qv = p.quiver
    acc = 0.0 + 0.0j
    for h in range(qv.num_h):
        acc += qv.h_eps(h) * np.trace(p.B[h] @ q.B[qv.h_bar(h)])
    for k in range(qv.n):
        acc += np.trace(p.i[k] @ q.j[k]) - np.trace(q.i[k] @ p.j[k])
    return complex(acc)


def moment_real(p: RepPoint) -> LieElement:
    q = p.quiver
    blocks = []
    for k in range(q.n):
        acc = np.zeros((p.dims.v[k], p.dims.v[k]), dtype=_CPLX)
        for h in q.h_into(k):
            hb = q.h_bar(h)
            acc += p.B[h] @ p.B[h].conj().T - p.B[hb].conj().T @ p.B[hb]
        acc += p.i[k] @ p.i[k].conj().T - p.j[k].conj().T @ p.j[k]
        blocks.append(0.5j * acc)
    return LieElement(p.dims, blocks, "skew")


def moment_complex(p: RepPoint) -> LieElement:
    q = p.quiver
    blocks = []
    for k in range(q.n):
        acc = np.zeros((p.dims.v[k], p.dims.v[k]), dtype=_CPLX)
        for h in q.h_into(k):
            acc += q.h_eps(h) * (p.B[h] @ p.B[q.h_bar(h)])
        acc += p.i[k] @ p.j[k]
        blocks.append(acc)
    return LieElement(p.dims, blocks, "general")


def dmu_complex(p: RepPoint, incr: RepPoint) -> LieElement:
    """Derivative of mu_C at p in direction incr; exact since mu_C is quadratic:
    mu_C(p + q) = mu_C(p) + dmu_complex(p, q) + mu_C(q)."""
    qv = p.quiver
    blocks = []
    for k in range(qv.n):
        acc = np.zeros((p.dims.v[k], p.dims.v[k]), dtype=_CPLX)
        for h in qv.h_into(k):
            hb = qv.h_bar(h)
            acc += qv.h_eps(h) * (p.B[h] @ incr.B[hb] + incr.B[h] @ p.B[hb])
        acc += p.i[k] @ incr.j[k] + incr.i[k] @ p.j[k]
        blocks.append(acc)
    return LieElement(p.dims, blocks, "general")


def dmoment_real_scaled(p: RepPoint, incr: RepPoint) -> LieElement:
    """Derivative of -2i mu_R (the hermitian form of mu_R) at p in direction incr."""
    q = p.quiver
    blocks = []
    for k in range(q.n):
        acc = np.zeros((p.dims.v[k], p.dims.v[k]), dtype=_CPLX)
        for h in q.h_into(k):
            hb = q.h_bar(h)
            acc += incr.B[h] @ p.B[h].conj().T + p.B[h] @ incr.B[h].conj().T
            acc -= incr.B[hb].conj().T @ p.B[hb] + p.B[hb].conj().T @ incr.B[hb]
        acc += incr.i[k] @ p.i[k].conj().T + p.i[k] @ incr.i[k].conj().T
        acc -= incr.j[k].conj().T @ p.j[k] + p.j[k].conj().T @ incr.j[k]
        blocks.append(acc)
    return LieElement(p.dims, blocks, "hermitian")


def hermitian_residual(p: RepPoint, sigma) -> LieElement:
    """-2i (mu_R(p) - zeta_R(sigma)) as a hermitian element; zero iff on target."""
    sig = np.asarray(sigma, dtype=float)
    mr = moment_real(p)
    blocks = [-2j * mr.blocks[k] - 2.0 * sig[k] * np.eye(p.dims.v[k], dtype=_CPLX)
              for k in range(p.quiver.n)]
    return LieElement(p.dims, blocks, "hermitian")
