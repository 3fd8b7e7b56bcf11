"""Exterior algebra on R^n (n <= 8) with two numeric backends.

Multivectors are stored sparsely: a dict from strictly increasing 1-based
index tuples to nonzero coefficients.  Terms handed in with out-of-order or
repeated indices are canonicalized on construction, e.g. {(2, 1): 5} becomes
{(1, 2): -5}.

Two backends:

* ``exact``  -- coefficients are ``fractions.Fraction``; floats are rejected
  so exactness cannot silently degrade.
* ``float``  -- plain Python floats.

The metric is Euclidean with orthonormal basis e_1..e_n and orientation
e_1 ^ ... ^ e_n.  All operations return new objects; nothing mutates.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import _ratlinalg
from .errors import (
    BackendMismatch,
    DimensionMismatch,
    GradeError,
    InputFormatError,
)

EXACT = "exact"
FLOAT = "float"

_BACKENDS = (EXACT, FLOAT)


def coerce_scalar(value, backend):
    """Coerce a scalar onto a backend, refusing lossy conversions."""
    if backend == EXACT:
        if isinstance(value, float):
            raise BackendMismatch(
                "float %r not accepted on the exact backend; "
                "pass an int, Fraction, or 'p/q' string" % (value,)
            )
        if isinstance(value, str):
            try:
                return Fraction(value)
            except (ValueError, ZeroDivisionError) as exc:
                raise InputFormatError("bad rational literal %r" % (value,)) from exc
        if isinstance(value, (int, Fraction)):
            return Fraction(value)
        raise BackendMismatch("cannot put %r on the exact backend" % (value,))
    if backend == FLOAT:
        if isinstance(value, str):
            try:
                return float(Fraction(value))
            except (ValueError, ZeroDivisionError) as exc:
                raise InputFormatError("bad numeric literal %r" % (value,)) from exc
        if isinstance(value, (int, float, Fraction)):
            return float(value)
        raise BackendMismatch("cannot put %r on the float backend" % (value,))
    raise BackendMismatch("unknown backend %r" % (backend,))


def _check_backend(backend):
    if backend not in _BACKENDS:
        raise BackendMismatch("unknown backend %r" % (backend,))


def _same_backend(a, b):
    if a.backend != b.backend:
        raise BackendMismatch(
            "mixed backends: %r vs %r" % (a.backend, b.backend)
        )


def _same_ambient(a, b):
    if a.n != b.n:
        raise DimensionMismatch("ambient dimensions differ: %d vs %d" % (a.n, b.n))


def sort_indices(indices):
    """Sort an index tuple, returning (sorted_tuple, sign).

    sign is the parity of the sorting permutation, or 0 if an index repeats.
    """
    idx = list(indices)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(idx)):
        if idx[i - 1] == idx[i]:
            return tuple(idx), 0
    return tuple(idx), sign


def merge_sign(left, right):
    """Sign of sorting the concatenation of two already-sorted tuples.

    Returns 0 if they share an index.
    """
    sign = 1
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] == right[j]:
            return 0
        if left[i] < right[j]:
            i += 1
        else:
            # right[j] hops over the remaining left entries
            if (len(left) - i) % 2 == 1:
                sign = -sign
            j += 1
    return sign


class Vector:
    """A vector in R^n, components on a fixed backend."""

    __slots__ = ("n", "backend", "comps")

    def __init__(self, comps, backend=EXACT):
        _check_backend(backend)
        comps = tuple(coerce_scalar(c, backend) for c in comps)
        if not 1 <= len(comps) <= 8:
            raise DimensionMismatch("supported ambient dimensions are 1..8")
        object.__setattr__(self, "n", len(comps))
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "comps", comps)

    def __setattr__(self, name, value):
        raise AttributeError("Vector is immutable")

    @classmethod
    def basis(cls, n, i, backend=EXACT):
        if not 1 <= i <= n:
            raise DimensionMismatch("basis index %d out of range 1..%d" % (i, n))
        return cls([1 if j == i else 0 for j in range(1, n + 1)], backend)

    @classmethod
    def zero(cls, n, backend=EXACT):
        return cls([0] * n, backend)

    def comp(self, i):
        """1-based component access."""
        if not 1 <= i <= self.n:
            raise DimensionMismatch("component index %d out of range" % (i,))
        return self.comps[i - 1]

    def __add__(self, other):
        _same_backend(self, other)
        _same_ambient(self, other)
        return Vector([a + b for a, b in zip(self.comps, other.comps)], self.backend)

    def __sub__(self, other):
        _same_backend(self, other)
        _same_ambient(self, other)
        return Vector([a - b for a, b in zip(self.comps, other.comps)], self.backend)

    def __neg__(self):
        return Vector([-a for a in self.comps], self.backend)

    def scale(self, c):
        c = coerce_scalar(c, self.backend)
        return Vector([c * a for a in self.comps], self.backend)

    def dot(self, other):
        _same_backend(self, other)
        _same_ambient(self, other)
        return sum((a * b for a, b in zip(self.comps, other.comps)),
                   coerce_scalar(0, self.backend))

    def norm_sq(self):
        return self.dot(self)

    def to_float(self):
        if self.backend == FLOAT:
            return self
        return Vector([float(c) for c in self.comps], FLOAT)

    def __eq__(self, other):
        return (
            isinstance(other, Vector)
            and self.n == other.n
            and self.backend == other.backend
            and self.comps == other.comps
        )

    __hash__ = None

    def __repr__(self):
        return "Vector(%s, %s)" % (list(self.comps), self.backend)


class Multivector:
    """Element of the exterior algebra of R^n."""

    __slots__ = ("n", "backend", "terms")

    def __init__(self, n, terms=None, backend=EXACT):
        _check_backend(backend)
        if not 1 <= n <= 8:
            raise DimensionMismatch("supported ambient dimensions are 1..8")
        canon = {}
        for indices, coeff in (terms or {}).items():
            indices = tuple(int(i) for i in indices)
            for i in indices:
                if not 1 <= i <= n:
                    raise DimensionMismatch(
                        "index %d out of range 1..%d" % (i, n)
                    )
            coeff = coerce_scalar(coeff, backend)
            key, sign = sort_indices(indices)
            if sign == 0:
                continue
            val = canon.get(key, coerce_scalar(0, backend)) + sign * coeff
            if val == 0:
                canon.pop(key, None)
            else:
                canon[key] = val
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "terms", canon)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    @classmethod
    def zero(cls, n, backend=EXACT):
        return cls(n, {}, backend)

    @classmethod
    def scalar(cls, n, value, backend=EXACT):
        return cls(n, {(): value}, backend)

    @classmethod
    def basis(cls, n, indices, backend=EXACT, coeff=1):
        return cls(n, {tuple(indices): coeff}, backend)

    def is_zero(self):
        return not self.terms

    def grades(self):
        return sorted({len(k) for k in self.terms})

    def grade(self):
        """Grade of a homogeneous multivector; None when zero."""
        gs = self.grades()
        if not gs:
            return None
        if len(gs) > 1:
            raise GradeError("multivector is not homogeneous: grades %s" % (gs,))
        return gs[0]

    def coeff(self, indices):
        key, sign = sort_indices(tuple(indices))
        if sign == 0:
            return coerce_scalar(0, self.backend)
        return sign * self.terms.get(key, coerce_scalar(0, self.backend))

    def __add__(self, other):
        _same_backend(self, other)
        _same_ambient(self, other)
        out = dict(self.terms)
        zero = coerce_scalar(0, self.backend)
        for k, v in other.terms.items():
            val = out.get(k, zero) + v
            if val == 0:
                out.pop(k, None)
            else:
                out[k] = val
        return self._raw(self.n, out, self.backend)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._raw(self.n, {k: -v for k, v in self.terms.items()}, self.backend)

    def scale(self, c):
        c = coerce_scalar(c, self.backend)
        if c == 0:
            return Multivector.zero(self.n, self.backend)
        return self._raw(self.n, {k: c * v for k, v in self.terms.items()}, self.backend)

    @classmethod
    def _raw(cls, n, canon_terms, backend):
        """Internal: build from already-canonical terms without rework."""
        obj = cls.__new__(cls)
        object.__setattr__(obj, "n", n)
        object.__setattr__(obj, "backend", backend)
        object.__setattr__(obj, "terms", canon_terms)
        return obj

    def to_float(self):
        if self.backend == FLOAT:
            return self
        return self._raw(
            self.n, {k: float(v) for k, v in self.terms.items()}, FLOAT
        )

    def max_abs(self):
        """Largest absolute coefficient (Fraction on exact, float on float)."""
        if not self.terms:
            return coerce_scalar(0, self.backend)
        return max(abs(v) for v in self.terms.values())

    def __eq__(self, other):
        return (
            isinstance(other, Multivector)
            and self.n == other.n
            and self.backend == other.backend
            and self.terms == other.terms
        )

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "Multivector(n=%d, %s, 0)" % (self.n, self.backend)
        bits = []
        for k in sorted(self.terms, key=lambda t: (len(t), t)):
            v = self.terms[k]
            name = "e%s" % ("".join(str(i) for i in k) or "0")
            bits.append("%s*%s" % (v, name))
        return "Multivector(n=%d, %s, %s)" % (self.n, self.backend, " + ".join(bits))

    # -- serialization ----------------------------------------------------

    def to_json_obj(self):
        terms = []
        for k in sorted(self.terms, key=lambda t: (len(t), t)):
            v = self.terms[k]
            coeff = str(v) if self.backend == EXACT else float(v)
            terms.append({"indices": list(k), "coeff": coeff})
        return {"n": self.n, "backend": self.backend, "terms": terms}

    @classmethod
    def from_json_obj(cls, obj):
        try:
            n = int(obj["n"])
            backend = obj["backend"]
            raw = obj["terms"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputFormatError("malformed multivector payload") from exc
        terms = {}
        for t in raw:
            try:
                idx = tuple(int(i) for i in t["indices"])
                coeff = t["coeff"]
            except (KeyError, TypeError, ValueError) as exc:
                raise InputFormatError("malformed multivector term %r" % (t,)) from exc
            if list(idx) != sorted(set(idx)):
                raise InputFormatError(
                    "term indices %r are not strictly increasing" % (list(idx),)
                )
            prev = terms.get(idx)
            if prev is not None:
                raise InputFormatError("duplicate term indices %r" % (list(idx),))
            terms[idx] = coeff
        return cls(n, terms, backend)


def volume_form(n, backend=EXACT):
    return Multivector.basis(n, tuple(range(1, n + 1)), backend)


# -- exact complex scalars ------------------------------------------------


class ExactComplex:
    """A complex number with Fraction real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("ExactComplex is immutable")

    @classmethod
    def _coerce(cls, other):
        if isinstance(other, ExactComplex):
            return other
        if isinstance(other, (int, Fraction)):
            return cls(other, 0)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ExactComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ExactComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ExactComplex(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ExactComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by exact complex zero")
        return ExactComplex(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def conj(self):
        return ExactComplex(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def as_complex(self):
        return complex(float(self.re), float(self.im))

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    __hash__ = None

    def __repr__(self):
        return "ExactComplex(%s, %s)" % (self.re, self.im)


def split_complex_scalar(c, backend):
    """Split a scalar into backend-coerced (re, im) parts."""
    if isinstance(c, ExactComplex):
        if backend == FLOAT:
            return float(c.re), float(c.im)
        return c.re, c.im
    if isinstance(c, complex):
        if backend == EXACT:
            raise BackendMismatch("python complex not accepted on exact backend")
        return float(c.real), float(c.imag)
    return coerce_scalar(c, backend), coerce_scalar(0, backend)


# -- complex containers ---------------------------------------------------


class ComplexVector:
    """Complexified vector: re + i*im with matching real Vectors."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        if im is None:
            im = Vector.zero(re.n, re.backend)
        _same_backend(re, im)
        _same_ambient(re, im)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexVector is immutable")

    @property
    def n(self):
        return self.re.n

    @property
    def backend(self):
        return self.re.backend

    def __add__(self, other):
        other = as_complex_vector(other)
        return ComplexVector(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        other = as_complex_vector(other)
        return ComplexVector(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return ComplexVector(-self.re, -self.im)

    def scale(self, c):
        cre, cim = split_complex_scalar(c, self.backend)
        return ComplexVector(
            self.re.scale(cre) - self.im.scale(cim),
            self.re.scale(cim) + self.im.scale(cre),
        )

    def conj(self):
        return ComplexVector(self.re, -self.im)

    def comp(self, i):
        if self.backend == FLOAT:
            return complex(self.re.comp(i), self.im.comp(i))
        return ExactComplex(self.re.comp(i), self.im.comp(i))

    def to_float(self):
        return ComplexVector(self.re.to_float(), self.im.to_float())

    def __eq__(self, other):
        return (
            isinstance(other, ComplexVector)
            and self.re == other.re
            and self.im == other.im
        )

    __hash__ = None

    def __repr__(self):
        return "ComplexVector(re=%r, im=%r)" % (self.re, self.im)


class ComplexMultivector:
    """Complexified multivector: re + i*im with matching real parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        if im is None:
            im = Multivector.zero(re.n, re.backend)
        _same_backend(re, im)
        _same_ambient(re, im)
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexMultivector is immutable")

    @property
    def n(self):
        return self.re.n

    @property
    def backend(self):
        return self.re.backend

    def __add__(self, other):
        other = as_complex_multivector(other)
        return ComplexMultivector(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        other = as_complex_multivector(other)
        return ComplexMultivector(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return ComplexMultivector(-self.re, -self.im)

    def scale(self, c):
        cre, cim = split_complex_scalar(c, self.backend)
        return ComplexMultivector(
            self.re.scale(cre) - self.im.scale(cim),
            self.re.scale(cim) + self.im.scale(cre),
        )

    def conj(self):
        return ComplexMultivector(self.re, -self.im)

    def is_zero(self):
        return self.re.is_zero() and self.im.is_zero()

    def grades(self):
        return sorted(set(self.re.grades()) | set(self.im.grades()))

    def coeff(self, indices):
        if self.backend == FLOAT:
            return complex(self.re.coeff(indices), self.im.coeff(indices))
        return ExactComplex(self.re.coeff(indices), self.im.coeff(indices))

    def max_abs(self):
        """Largest coefficient magnitude, always as a float."""
        keys = set(self.re.terms) | set(self.im.terms)
        best = 0.0
        for k in keys:
            a = float(self.re.terms.get(k, 0))
            b = float(self.im.terms.get(k, 0))
            best = max(best, (a * a + b * b) ** 0.5)
        return best

    def to_float(self):
        return ComplexMultivector(self.re.to_float(), self.im.to_float())

    def __eq__(self, other):
        return (
            isinstance(other, ComplexMultivector)
            and self.re == other.re
            and self.im == other.im
        )

    __hash__ = None

    def __repr__(self):
        return "ComplexMultivector(re=%r, im=%r)" % (self.re, self.im)


def as_complex_vector(v):
    if isinstance(v, ComplexVector):
        return v
    if isinstance(v, Vector):
        return ComplexVector(v)
    raise TypeError("expected Vector or ComplexVector, got %r" % (type(v),))


def as_complex_multivector(a):
    if isinstance(a, ComplexMultivector):
        return a
    if isinstance(a, Multivector):
        return ComplexMultivector(a)
    raise TypeError("expected Multivector or ComplexMultivector, got %r" % (type(a),))


# -- core operations ------------------------------------------------------


def _wedge_real(a, b):
    _same_backend(a, b)
    _same_ambient(a, b)
    zero = coerce_scalar(0, a.backend)
    out = {}
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            sgn = merge_sign(ka, kb)
            if sgn == 0:
                continue
            key, _ = sort_indices(ka + kb)
            val = out.get(key, zero) + sgn * va * vb
            if val == 0:
                out.pop(key, None)
            else:
                out[key] = val
    return Multivector._raw(a.n, out, a.backend)


def wedge(a, b):
    """Exterior product.  Accepts real or complexified multivectors."""
    if isinstance(a, Multivector) and isinstance(b, Multivector):
        return _wedge_real(a, b)
    ca = as_complex_multivector(a)
    cb = as_complex_multivector(b)
    return ComplexMultivector(
        _wedge_real(ca.re, cb.re) - _wedge_real(ca.im, cb.im),
        _wedge_real(ca.re, cb.im) + _wedge_real(ca.im, cb.re),
    )


def wedge_many(forms):
    forms = list(forms)
    if not forms:
        raise GradeError("wedge_many needs at least one factor")
    acc = forms[0]
    for f in forms[1:]:
        acc = wedge(acc, f)
    return acc


def _hook_real(v, a):
    _same_backend(v, a)
    if v.n != a.n:
        raise DimensionMismatch("vector and form live in different dimensions")
    zero = coerce_scalar(0, a.backend)
    out = {}
    for key, coeff in a.terms.items():
        for pos, idx in enumerate(key):
            comp = v.comps[idx - 1]
            if comp == 0:
                continue
            sub = key[:pos] + key[pos + 1:]
            sgn = -1 if pos % 2 else 1
            val = out.get(sub, zero) + sgn * comp * coeff
            if val == 0:
                out.pop(sub, None)
            else:
                out[sub] = val
    return Multivector._raw(a.n, out, a.backend)


def hook(v, a):
    """Interior product v -| a.  Accepts real/complex vectors and forms."""
    if isinstance(v, Vector) and isinstance(a, Multivector):
        return _hook_real(v, a)
    cv = as_complex_vector(v)
    ca = as_complex_multivector(a)
    return ComplexMultivector(
        _hook_real(cv.re, ca.re) - _hook_real(cv.im, ca.im),
        _hook_real(cv.re, ca.im) + _hook_real(cv.im, ca.re),
    )


def hook_many(vectors, a):
    """Left-fold of interior products: vectors[0] first."""
    acc = a
    for v in vectors:
        acc = hook(v, acc)
    return acc


def _star_sign(key, n):
    comp = tuple(i for i in range(1, n + 1) if i not in key)
    inversions = 0
    seq = key + comp
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inversions += 1
    return (comp, -1 if inversions % 2 else 1)


def _hodge_real(a):
    out = {}
    for key, coeff in a.terms.items():
        comp, sgn = _star_sign(key, a.n)
        out[comp] = sgn * coeff
    return Multivector._raw(a.n, out, a.backend)


def hodge_star(a):
    """Hodge star for the Euclidean metric and orientation e_1^...^e_n."""
    if isinstance(a, Multivector):
        return _hodge_real(a)
    ca = as_complex_multivector(a)
    return ComplexMultivector(_hodge_real(ca.re), _hodge_real(ca.im))


def musical_flat(v):
    """Index-lowering: vector -> 1-form (Euclidean metric)."""
    if isinstance(v, Vector):
        terms = {(i + 1,): c for i, c in enumerate(v.comps) if c != 0}
        return Multivector(v.n, terms, v.backend)
    cv = as_complex_vector(v)
    return ComplexMultivector(musical_flat(cv.re), musical_flat(cv.im))


def musical_sharp(a):
    """Index-raising: 1-form -> vector.  Raises GradeError off grade 1."""
    if isinstance(a, ComplexMultivector):
        return ComplexVector(musical_sharp(a.re), musical_sharp(a.im))
    gs = a.grades()
    if gs not in ([], [1]):
        raise GradeError("musical_sharp needs a 1-form, got grades %s" % (gs,))
    comps = [coerce_scalar(0, a.backend)] * a.n
    for key, coeff in a.terms.items():
        comps[key[0] - 1] = coeff
    return Vector(comps, a.backend)


def inner(a, b):
    """Pointwise inner product of two homogeneous same-grade forms."""
    if isinstance(a, ComplexMultivector) or isinstance(b, ComplexMultivector):
        raise TypeError("inner is defined for real multivectors; split re/im")
    _same_backend(a, b)
    _same_ambient(a, b)
    ga = a.grades()
    gb = b.grades()
    if len(ga) > 1 or len(gb) > 1:
        raise GradeError("inner needs homogeneous inputs (grades %s, %s)" % (ga, gb))
    if ga and gb and ga != gb:
        raise GradeError("grade mismatch in inner: %s vs %s" % (ga, gb))
    zero = coerce_scalar(0, a.backend)
    return sum((v * b.terms[k] for k, v in a.terms.items() if k in b.terms), zero)


def norm_sq(a):
    return inner(a, a)


def _det_float(rows):
    n = len(rows)
    m = [list(map(float, r)) for r in rows]
    det = 1.0
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(m[r][c]))
        if m[piv][c] == 0.0:
            return 0.0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1.0 / m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def _minor_det(vectors, key, backend):
    rows = [[v.comps[i - 1] for i in key] for v in vectors]
    if backend == EXACT:
        return _ratlinalg.det(rows)
    return _det_float(rows)


def form_value(a, vectors):
    """Evaluate a grade-k form on k vectors.

    Complex inputs are handled by multilinearity; the result is a scalar of
    the appropriate flavor (Fraction / float / ExactComplex / complex).
    """
    if isinstance(a, ComplexMultivector) or any(
        isinstance(v, ComplexVector) for v in vectors
    ):
        ca = as_complex_multivector(a)
        cvs = [as_complex_vector(v) for v in vectors]
        total_re = coerce_scalar(0, ca.backend)
        total_im = coerce_scalar(0, ca.backend)
        # expand multilinearly over {re, im} choices for each slot
        for choice in itertools.product((0, 1), repeat=len(cvs)):
            parts = [cv.re if c == 0 else cv.im for cv, c in zip(cvs, choice)]
            npicks = sum(choice)
            for formpart, extra in ((ca.re, 0), (ca.im, 1)):
                if formpart.is_zero():
                    continue
                val = form_value(formpart, parts)
                k = (npicks + extra) % 4
                if k == 0:
                    total_re += val
                elif k == 1:
                    total_im += val
                elif k == 2:
                    total_re -= val
                else:
                    total_im -= val
        if ca.backend == FLOAT:
            return complex(total_re, total_im)
        return ExactComplex(total_re, total_im)
    k = len(vectors)
    gs = a.grades()
    if gs not in ([], [k]):
        raise GradeError(
            "form of grades %s evaluated on %d vectors" % (gs, k)
        )
    for v in vectors:
        _same_backend(v, a)
        if v.n != a.n:
            raise DimensionMismatch("vector/form dimension mismatch")
    total = coerce_scalar(0, a.backend)
    for key, coeff in a.terms.items():
        total += coeff * _minor_det(vectors, key, a.backend)
    return total


def apply_signed_permutation(a, perm, signs):
    """Push a multivector through the isometry e_i -> signs[i-1] * e_perm[i-1].

    ``perm`` is a sequence of length n with 1-based targets forming a
    permutation; ``signs`` is a sequence of +-1.
    """
    if isinstance(a, ComplexMultivector):
        return ComplexMultivector(
            apply_signed_permutation(a.re, perm, signs),
            apply_signed_permutation(a.im, perm, signs),
        )
    perm = tuple(int(p) for p in perm)
    signs = tuple(int(s) for s in signs)
    if sorted(perm) != list(range(1, a.n + 1)):
        raise DimensionMismatch("perm %r is not a permutation of 1..%d" % (perm, a.n))
    if len(signs) != a.n or any(s not in (-1, 1) for s in signs):
        raise DimensionMismatch("signs must be +-1 of length %d" % (a.n,))
    out_terms = {}
    zero = coerce_scalar(0, a.backend)
    for key, coeff in a.terms.items():
        image = tuple(perm[i - 1] for i in key)
        smul = 1
        for i in key:
            smul *= signs[i - 1]
        skey, ssort = sort_indices(image)
        if ssort == 0:
            continue
        val = out_terms.get(skey, zero) + smul * ssort * coeff
        if val == 0:
            out_terms.pop(skey, None)
        else:
            out_terms[skey] = val
    return Multivector._raw(a.n, out_terms, a.backend)
