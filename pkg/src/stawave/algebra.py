"""
Real spacetime algebra Cl(1,3) with metric (+, -, -, -).

Multivectors are stored as 16 float64 coefficients indexed by a 4-bit blade
mask: bit ``mu`` set means the basis vector ``gamma_mu`` is a factor of the
blade.  Within a blade the factors are kept in ascending index order, so index
``0b1011`` is ``gamma_0 gamma_1 gamma_3`` and renders as ``e013``.

The product kernels work on plain ``(..., 16)`` arrays so that fields of
multivectors (see :mod:`stawave.fields`) share the exact same Cayley table as
the :class:`Multivector` value type.
"""
from __future__ import annotations

import re
from typing import Iterable, Sequence

import numpy as np

N_BLADES = 16
METRIC = (1.0, -1.0, -1.0, -1.0)
PSEUDOSCALAR = 0b1111

GRADES = np.array([bin(i).count("1") for i in range(N_BLADES)])
# reversion sign (-1)^{k(k-1)/2} and grade-involution sign (-1)^k, per blade
REVERSE_SIGN = np.array([(-1.0) ** (k * (k - 1) // 2) for k in GRADES])
INVOLUTION_SIGN = np.array([(-1.0) ** k for k in GRADES])
EVEN_MASK = GRADES % 2 == 0
ODD_MASK = ~EVEN_MASK


def blade_name(bits: int) -> str:
    if bits == 0:
        return "1"
    return "e" + "".join(str(mu) for mu in range(4) if bits >> mu & 1)


def _blade_product(a: int, b: int, metric: Sequence[float]) -> tuple[float, int]:
    """Sign and target mask of the product of two canonical blades."""
    swaps = 0
    x = a >> 1
    while x:
        swaps += bin(x & b).count("1")
        x >>= 1
    sign = -1.0 if swaps % 2 else 1.0
    common = a & b
    for mu in range(4):
        if common >> mu & 1:
            sign *= metric[mu]
    return sign, a ^ b


class CayleyTable:
    """Precomputed blade multiplication table.

    ``sign[i, j]`` is the sign of ``e_i e_j`` and the target blade is always
    ``i ^ j``.  Separate sign tables restricted to the grade-lowering and
    grade-raising parts back :func:`inner_product` and :func:`outer_product`.
    """

    def __init__(self, sign: np.ndarray):
        sign = np.array(sign, dtype=float)
        if sign.shape != (N_BLADES, N_BLADES):
            raise ValueError("sign table must be 16x16")
        self.sign = sign
        idx = np.arange(N_BLADES)
        self.target = idx[:, None] ^ idx[None, :]
        r = GRADES[:, None]
        s = GRADES[None, :]
        g = GRADES[self.target]
        inner = (g == np.abs(r - s)) & (r > 0) & (s > 0)
        outer = g == r + s
        self.sign_inner = np.where(inner, sign, 0.0)
        self.sign_outer = np.where(outer, sign, 0.0)
        self._dense = {
            "gp": self._dense_matrix(self.sign),
            "inner": self._dense_matrix(self.sign_inner),
            "outer": self._dense_matrix(self.sign_outer),
        }
        # loop form: out[k] = sum_i S[i, k] a[i] b[i ^ k]
        self._loop = {
            "gp": self._loop_signs(self.sign),
            "inner": self._loop_signs(self.sign_inner),
            "outer": self._loop_signs(self.sign_outer),
        }

    @classmethod
    def from_metric(cls, metric: Sequence[float] = METRIC) -> "CayleyTable":
        sign = np.empty((N_BLADES, N_BLADES))
        for i in range(N_BLADES):
            for j in range(N_BLADES):
                sign[i, j], _ = _blade_product(i, j, metric)
        return cls(sign)

    def corrupted(self, i: int = 0b0010, j: int = 0b0100) -> "CayleyTable":
        """Copy of the table with one entry's sign flipped (fault injection)."""
        sign = self.sign.copy()
        sign[i, j] = -sign[i, j]
        return CayleyTable(sign)

    def _dense_matrix(self, sign: np.ndarray) -> np.ndarray:
        m = np.zeros((N_BLADES * N_BLADES, N_BLADES))
        for i in range(N_BLADES):
            for j in range(N_BLADES):
                m[i * N_BLADES + j, i ^ j] = sign[i, j]
        return m

    def _loop_signs(self, sign: np.ndarray) -> np.ndarray:
        idx = np.arange(N_BLADES)
        return np.array([sign[i, i ^ idx] for i in range(N_BLADES)])

    def product(self, a: np.ndarray, b: np.ndarray, kind: str = "gp") -> np.ndarray:
        """Bilinear product of coefficient arrays of shape ``(..., 16)``.

        ``kind`` is ``"gp"`` (geometric), ``"inner"`` or ``"outer"``.
        Leading dimensions broadcast.
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if a.ndim == 1 and b.ndim == 1:
            return np.outer(a, b).ravel() @ self._dense[kind]
        signs = self._loop[kind]
        idx = np.arange(N_BLADES)
        shape = np.broadcast_shapes(a.shape, b.shape)
        out = np.zeros(shape)
        for i in range(N_BLADES):
            ai = a[..., i : i + 1]
            if not ai.any():
                continue
            out += ai * signs[i] * b[..., i ^ idx]
        return out


TABLE = CayleyTable.from_metric(METRIC)


def gp(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Geometric product on raw ``(..., 16)`` coefficient arrays."""
    return TABLE.product(a, b)


def reverse_array(a: np.ndarray) -> np.ndarray:
    return np.asarray(a) * REVERSE_SIGN


def involute_array(a: np.ndarray) -> np.ndarray:
    return np.asarray(a) * INVOLUTION_SIGN


def max_norm(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


_NUMBER = r"(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
_TERM = re.compile(
    rf"\s*([+\-−])?\s*({_NUMBER})?\s*\*?\s*(e[0-3]+)?\s*"
)


class Multivector:
    """Immutable element of Cl(1,3).

    Arithmetic operators: ``+``, ``-``, ``*`` (geometric product, or scaling
    by a real), ``/`` (by a real), ``^`` (outer product), ``|`` (inner
    product) and ``~`` (reversion).
    """

    __slots__ = ("_c",)
    __array_priority__ = 1000

    def __init__(self, coeffs: Iterable[float] | np.ndarray | None = None):
        if coeffs is None:
            c = np.zeros(N_BLADES)
        else:
            c = np.array(coeffs, dtype=float).reshape(-1)
            if c.shape != (N_BLADES,):
                raise ValueError(f"expected 16 coefficients, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "_c", c)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    # -- construction -------------------------------------------------------
    @classmethod
    def scalar(cls, value: float) -> "Multivector":
        c = np.zeros(N_BLADES)
        c[0] = value
        return cls(c)

    @classmethod
    def blade(cls, bits: int, value: float = 1.0) -> "Multivector":
        if not 0 <= bits < N_BLADES:
            raise ValueError(f"blade index out of range: {bits}")
        c = np.zeros(N_BLADES)
        c[bits] = value
        return cls(c)

    @classmethod
    def from_dict(cls, terms: dict[str, float]) -> "Multivector":
        """Build from ``{"1": 3, "e01": 2, "e21": 1}``; any index order works."""
        out = cls()
        for name, value in terms.items():
            out = out + value * _named_blade(name)
        return out

    @classmethod
    def parse(cls, text: str) -> "Multivector":
        """Inverse of :meth:`render`, e.g. ``"3 + 2 e01 - 1 e0123"``.

        A coefficient and a blade name must be separated by whitespace or
        ``*`` (``"2e12"`` reads as the number 2e12).
        """
        text = text.strip()
        if not text:
            raise ValueError("empty multivector string")
        out = np.zeros(N_BLADES)
        pos = 0
        first = True
        while pos < len(text):
            m = _TERM.match(text, pos)
            if m is None or m.end() == pos:
                raise ValueError(f"cannot parse multivector at {text[pos:]!r}")
            sign_s, num, name = m.groups()
            if num is None and name is None:
                raise ValueError(f"dangling sign in {text!r}")
            if sign_s is None and not first:
                raise ValueError(f"missing operator before {m.group(0)!r}")
            value = float(num) if num is not None else 1.0
            if sign_s in ("-", "−"):
                value = -value
            term = _named_blade(name) if name else Multivector.scalar(1.0)
            out = out + value * term._c
            pos = m.end()
            first = False
        return cls(out)

    # -- views -----------------------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    def __getitem__(self, bits: int) -> float:
        return float(self._c[bits])

    @property
    def scalar_part(self) -> float:
        return float(self._c[0])

    @property
    def pseudoscalar_part(self) -> float:
        return float(self._c[PSEUDOSCALAR])

    def grades(self, tol: float = 0.0) -> set[int]:
        return {int(g) for g in GRADES[np.abs(self._c) > tol]}

    def is_even(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self._c[ODD_MASK]) <= tol))

    # -- arithmetic ------------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Multivector):
            return Multivector(self._c + other._c)
        if np.isscalar(other):
            return self + Multivector.scalar(other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Multivector(-self._c)

    def __sub__(self, other):
        if isinstance(other, Multivector):
            return Multivector(self._c - other._c)
        if np.isscalar(other):
            return self - Multivector.scalar(other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return Multivector(TABLE.product(self._c, other._c))
        if np.isscalar(other):
            return Multivector(self._c * other)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return Multivector(self._c * other)
        return NotImplemented

    def __truediv__(self, other):
        if np.isscalar(other):
            return Multivector(self._c / other)
        return NotImplemented

    def __xor__(self, other):
        return outer_product(self, other)

    def __or__(self, other):
        return inner_product(self, other)

    def __invert__(self):
        return reverse(self)

    def __eq__(self, other):
        if isinstance(other, Multivector):
            return bool(np.array_equal(self._c, other._c))
        if np.isscalar(other):
            return self == Multivector.scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._c.tobytes())

    def allclose(self, other, tol: float = 1e-12) -> bool:
        """Max-coefficient-difference comparison."""
        if np.isscalar(other):
            other = Multivector.scalar(other)
        return max_norm(self._c - other._c) <= tol

    def max_norm(self) -> float:
        return max_norm(self._c)

    # -- involutions and projections (method spellings) -------------------------
    def reverse(self) -> "Multivector":
        return reverse(self)

    def involute(self) -> "Multivector":
        return grade_involution(self)

    def grade(self, k: int) -> "Multivector":
        return grade_project(self, k)

    def even(self) -> "Multivector":
        return parity_split(self)[0]

    def odd(self) -> "Multivector":
        return parity_split(self)[1]

    # -- text ------------------------------------------------------------------
    def render(self, precision: int = 12) -> str:
        """Debug rendering, e.g. ``"3 + 2 e01 - 1 e0123"``."""
        parts = []
        for bits in sorted(range(N_BLADES), key=lambda b: (GRADES[b], b)):
            value = float(self._c[bits])
            if value == 0.0:
                continue
            mag = format(abs(value), f".{precision}g")
            term = mag if bits == 0 else f"{mag} {blade_name(bits)}"
            if not parts:
                parts.append(term if value > 0 else f"-{term}")
            else:
                parts.append(("+ " if value > 0 else "- ") + term)
        return " ".join(parts) if parts else "0"

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Multivector({self.render()!r})"


def _named_blade(name: str) -> Multivector:
    """Product of the generators listed in ``name`` (``"e21"`` is -e12)."""
    if name in ("1", ""):
        return Multivector.scalar(1.0)
    if not re.fullmatch(r"e[0-3]+", name):
        raise ValueError(f"bad blade name {name!r}")
    out = Multivector.scalar(1.0)
    for ch in name[1:]:
        out = out * Multivector.blade(1 << int(ch))
    return out


def _mv(x) -> Multivector:
    if isinstance(x, Multivector):
        return x
    if np.isscalar(x):
        return Multivector.scalar(float(x))
    return Multivector(x)


# basis vectors gamma_0..gamma_3, the unit pseudoscalar and common blades
G0, G1, G2, G3 = (Multivector.blade(1 << mu) for mu in range(4))
GAMMA = (G0, G1, G2, G3)
I = Multivector.blade(PSEUDOSCALAR)
ONE = Multivector.scalar(1.0)
ZERO = Multivector()


def geometric_product(a, b) -> Multivector:
    return _mv(a) * _mv(b)


def reverse(a) -> Multivector:
    """Reversion: grade-k part scaled by (-1)^{k(k-1)/2}."""
    return Multivector(_mv(a)._c * REVERSE_SIGN)


def grade_involution(a) -> Multivector:
    """Flip every basis vector: grade-k part scaled by (-1)^k."""
    return Multivector(_mv(a)._c * INVOLUTION_SIGN)


def grade_project(a, k: int) -> Multivector:
    if not isinstance(k, (int, np.integer)) or not 0 <= k <= 4:
        raise ValueError(f"grade must be an integer in 0..4, got {k!r}")
    c = np.where(GRADES == k, _mv(a)._c, 0.0)
    return Multivector(c)


def inner_product(a, b) -> Multivector:
    """Sum over grades r, s > 0 of <a_r b_s>_{|r-s|}.

    Scalars contribute nothing to the inner product, which keeps
    ``v * A == (v | A) + (v ^ A)`` exact for a vector ``v`` and any ``A``.
    """
    return Multivector(TABLE.product(_mv(a)._c, _mv(b)._c, "inner"))


def outer_product(a, b) -> Multivector:
    """Sum over grades r, s of <a_r b_s>_{r+s}."""
    return Multivector(TABLE.product(_mv(a)._c, _mv(b)._c, "outer"))


def parity_split(a) -> tuple[Multivector, Multivector]:
    c = _mv(a)._c
    return Multivector(np.where(EVEN_MASK, c, 0.0)), Multivector(np.where(ODD_MASK, c, 0.0))


def commutator(a, b) -> Multivector:
    a, b = _mv(a), _mv(b)
    return a * b - b * a


# -- exponentials -----------------------------------------------------------

_BIVECTOR_MASK = GRADES == 2
_SERIES_TERMS = 24


def _complex_of(m: np.ndarray) -> complex:
    """Read a scalar + pseudoscalar element as s + i p (I^2 = -1, I central in
    the even subalgebra)."""
    return complex(m[0], m[PSEUDOSCALAR])


def _times_complex(z: complex, m: np.ndarray) -> np.ndarray:
    return z.real * m + z.imag * TABLE.product(I._c, m)


def exp_series(a: np.ndarray, terms: int = _SERIES_TERMS) -> np.ndarray:
    """Scaled-and-squared Taylor series for the exponential of any element."""
    a = np.asarray(a, dtype=float)
    k = 0
    scale = max_norm(a)
    while scale > 0.5:
        scale /= 2.0
        k += 1
    x = a / 2.0**k
    out = ONE._c.copy()
    term = ONE._c.copy()
    for n in range(1, terms + 1):
        term = TABLE.product(term, x) / n
        out = out + term
    for _ in range(k):
        out = TABLE.product(out, out)
    return out


def exp_even(B) -> Multivector:
    """Exponential of an element with grade-2 and grade-4 parts only.

    When ``B*B`` lies in span{1, I}, which holds for any pure bivector and
    for any multiple of I, the closed form ``cosh(z) + B sinh(z)/z`` with the
    complex square root ``z`` of ``B*B`` is used.  Otherwise falls back to
    :func:`exp_series`.
    """
    B = _mv(B)
    c = B._c
    bad = (GRADES != 2) & (GRADES != 4) & (np.abs(c) > 0)
    if bad.any():
        raise ValueError(f"exp_even needs grades {{2, 4}} only, got grades {sorted(B.grades())}")
    sq = TABLE.product(c, c)
    scale = max(1.0, max_norm(sq))
    if max_norm(sq[_BIVECTOR_MASK]) > 1e-14 * scale:
        return Multivector(exp_series(c))
    z = np.sqrt(_complex_of(sq))
    cosh = np.cosh(z)
    sinhc = np.sinh(z) / z if abs(z) > 1e-8 else 1.0 + z * z / 6.0
    out = _times_complex(cosh, ONE._c) + _times_complex(sinhc, c)
    return Multivector(out)


def exp_bivector_array(b: np.ndarray) -> np.ndarray:
    """Closed-form exponential for an array of bivectors, shape (..., 16).

    Grade-4 parts are also accepted (I commutes with bivectors, so
    exp(b + t I) = exp(b)(cos t + I sin t)).
    """
    b = np.asarray(b, dtype=float)
    bad = (GRADES != 2) & (GRADES != 4)
    if np.any(b[..., bad]):
        raise ValueError("exp_bivector_array needs grades {2, 4} only")
    t = b[..., PSEUDOSCALAR]
    biv = b.copy()
    biv[..., PSEUDOSCALAR] = 0.0
    sq = TABLE.product(biv, biv)
    z = np.sqrt(sq[..., 0] + 1j * sq[..., PSEUDOSCALAR])
    cosh = np.cosh(z)
    small = np.abs(z) < 1e-8
    zsafe = np.where(small, 1.0, z)
    sinhc = np.where(small, 1.0 + z * z / 6.0, np.sinh(zsafe) / zsafe)
    Ib = TABLE.product(I._c, biv)
    out = (sinhc.real[..., None] * biv + sinhc.imag[..., None] * Ib)
    out[..., 0] += cosh.real
    out[..., PSEUDOSCALAR] += cosh.imag
    if np.any(t):
        phase = np.zeros(t.shape + (N_BLADES,))
        phase[..., 0] = np.cos(t)
        phase[..., PSEUDOSCALAR] = np.sin(t)
        out = TABLE.product(out, phase)
    return out


def phase_rotor(phi: float) -> Multivector:
    """exp(-gamma_2 gamma_1 phi), the unit-modulus phase factor used for plane
    waves and interference scans."""
    return exp_even(-float(phi) * (G2 * G1))


def random_multivector(rng: np.random.Generator, grades: Iterable[int] = range(5),
                       scale: float = 1.0) -> Multivector:
    mask = np.isin(GRADES, list(grades))
    c = np.where(mask, rng.normal(scale=scale, size=N_BLADES), 0.0)
    return Multivector(c)


def random_rotor(rng: np.random.Generator, scale: float = 1.0) -> Multivector:
    """exp of a random bivector: a proper Lorentz rotor."""
    return exp_even(random_multivector(rng, [2], scale=scale))


def is_close_mod_sign(a: Multivector, b: Multivector, tol: float) -> bool:
    return a.allclose(b, tol) or a.allclose(-b, tol)


__all__ = [
    "CayleyTable", "TABLE", "Multivector", "METRIC", "GRADES",
    "G0", "G1", "G2", "G3", "GAMMA", "I", "ONE", "ZERO",
    "geometric_product", "reverse", "grade_involution", "grade_project",
    "inner_product", "outer_product", "parity_split", "commutator",
    "exp_even", "exp_series", "exp_bivector_array", "phase_rotor", "random_multivector", "random_rotor",
    "gp", "reverse_array", "involute_array", "max_norm", "blade_name",
]
