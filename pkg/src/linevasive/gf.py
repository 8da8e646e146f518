"""Finite fields F_{p^e} and towers F_q ⊂ F_{q^2} ⊂ ... ⊂ F_{q^t}.

Elements are coefficient vectors (c_0, ..., c_{e-1}) of a polynomial in x
reduced modulo a fixed monic irreducible modulus.  Internally every element
is an integer *index* that packs the coefficients big-endian in c_0 first::

    index = c_0 * p^(e-1) + c_1 * p^(e-2) + ... + c_{e-1}

so that comparing indices is the same as comparing coefficient vectors
lexicographically (low degree first).  Point ranks built from these indices
therefore sort in flattened lexicographic order, which every canonical
choice in this package relies on.

The zero element has index 0; the identity has index p^(e-1).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np
import sympy

from .errors import ParameterError, SizeCapError

DEFAULT_FIELD_CAP = 1 << 20
# fields up to this order keep dense add tables
_ADD_TABLE_LIMIT = 1024


# ---------------------------------------------------------------------------
# polynomials over F_p as coefficient lists, low degree first


def _poly_rem(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo the monic polynomial ``m``."""
    d = len(m) - 1
    r = [x % p for x in a]
    for i in range(len(r) - 1, d - 1, -1):
        c = r[i]
        if c:
            s = i - d
            for k in range(d + 1):
                r[s + k] = (r[s + k] - c * m[k]) % p
    r = r[:d]
    return r + [0] * (d - len(r))


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _poly_eval(a: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % p
    return acc


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division of a monic polynomial by every monic polynomial of degree <= deg/2."""
    d = len(modulus) - 1
    if d <= 1:
        return True
    if any(_poly_eval(modulus, r, p) == 0 for r in range(p)):
        return False
    for k in range(2, d // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            if not any(_poly_rem(modulus, list(low) + [1], p)):
                return False
    return True


def _smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    if e == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=e):
        if low[0] == 0:
            continue  # divisible by x
        cand = low + (1,)
        if is_irreducible(cand, p):
            return cand
    raise AssertionError(f"no irreducible polynomial of degree {e} over F_{p}")


def _inverse_mod_p(mat: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square matrix over F_p by Gauss-Jordan elimination."""
    n = mat.shape[0]
    aug = np.concatenate([mat % p, np.eye(n, dtype=np.int64)], axis=1).astype(np.int64)
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r, col] % p), None)
        if piv is None:
            raise ParameterError("matrix is singular mod p")
        aug[[col, piv]] = aug[[piv, col]]
        aug[col] = (aug[col] * pow(int(aug[col, col]), -1, p)) % p
        for r in range(n):
            if r != col and aug[r, col]:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % p
    return aug[:, n:]


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """The field F_{p^e} = F_p[x] / (modulus)."""

    p: int
    e: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if len(self.modulus) != self.e + 1 or self.modulus[-1] != 1:
            raise ParameterError("modulus must be monic of degree e")
        if any(not 0 <= c < self.p for c in self.modulus):
            raise ParameterError("modulus coefficients must lie in [0, p)")

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, e={self.e}, modulus={list(self.modulus)})"

    @property
    def order(self) -> int:
        return self.p**self.e

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return self.p ** (self.e - 1)

    @property
    def x(self) -> int:
        """Index of the class of the polynomial variable."""
        return self.index((0, 1) + (0,) * (self.e - 2)) if self.e > 1 else 0

    # -- encoding ----------------------------------------------------------

    def coeffs(self, index: int) -> tuple[int, ...]:
        p = self.p
        out = [0] * self.e
        for k in range(self.e - 1, -1, -1):
            index, out[k] = divmod(index, p)
        return tuple(out)

    def index(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) != self.e:
            raise ParameterError(f"expected {self.e} coefficients, got {len(coeffs)}")
        acc = 0
        for c in coeffs:
            acc = acc * self.p + (int(c) % self.p)
        return acc

    def element(self, index: int) -> FieldElement:
        return FieldElement(self, index)

    def from_coeffs(self, coeffs: Sequence[int]) -> FieldElement:
        return FieldElement(self, self.index(coeffs))

    def from_int(self, k: int) -> FieldElement:
        """The element k·1."""
        return FieldElement(self, (k % self.p) * self.one)

    def elements(self) -> Iterator[FieldElement]:
        return (FieldElement(self, i) for i in range(self.order))

    def to_json(self) -> dict:
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> FieldSpec:
        spec = field_create(int(data["p"]), int(data["e"]))
        if list(spec.modulus) != [int(c) for c in data["modulus"]]:
            raise ParameterError("modulus does not match the canonical choice")
        return spec

    # -- lazy tables -------------------------------------------------------

    @cached_property
    def weights(self) -> np.ndarray:
        return self.p ** np.arange(self.e - 1, -1, -1, dtype=np.int64)

    @cached_property
    def digits(self) -> np.ndarray:
        """Row i holds the coefficient vector of element i."""
        idx = np.arange(self.order, dtype=np.int64)
        return (idx[:, None] // self.weights[None, :]) % self.p

    def _polymulmod(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        return _poly_rem(_poly_mul(a, b, self.p), self.modulus, self.p)

    def _polypow(self, a: Sequence[int], k: int) -> list[int]:
        result = list(self.coeffs(self.one))
        base = list(a)
        while k:
            if k & 1:
                result = self._polymulmod(result, base)
            base = self._polymulmod(base, base)
            k >>= 1
        return result

    @cached_property
    def primitive_element(self) -> int:
        """Smallest index generating the multiplicative group."""
        n = self.order - 1
        if n == 1:
            return self.one
        one = list(self.coeffs(self.one))
        primes = list(sympy.factorint(n))
        for g in range(1, self.order):
            gc = self.coeffs(g)
            if all(self._polypow(gc, n // r) != one for r in primes):
                return g
        raise AssertionError("multiplicative group is not cyclic")

    @cached_property
    def _log_tables(self) -> tuple[list[int], list[int], np.ndarray, np.ndarray]:
        n = self.order
        g = self.coeffs(self.primitive_element)
        # multiplication by g as a matrix over F_p acting on coefficient vectors
        cols = []
        for k in range(self.e):
            basis = [0] * self.e
            basis[k] = 1
            cols.append(self._polymulmod(g, basis))
        mat = np.array(cols, dtype=np.int64)  # row k = g * x^k
        step = ((self.digits @ mat) % self.p) @ self.weights
        step = step.tolist()
        exp = [0] * (n - 1)
        cur = self.one
        for k in range(n - 1):
            exp[k] = cur
            cur = step[cur]
        log = [-1] * n
        for k, v in enumerate(exp):
            log[v] = k
        return exp, log, np.array(exp, dtype=np.int64), np.array(log, dtype=np.int64)

    @cached_property
    def add_table(self) -> np.ndarray:
        idx = np.arange(self.order, dtype=np.int64)
        return self.add_arr(idx[:, None], idx[None, :])

    @cached_property
    def mul_table(self) -> np.ndarray:
        idx = np.arange(self.order, dtype=np.int64)
        return self.mul_arr(idx[:, None], idx[None, :])

    @cached_property
    def neg_table(self) -> np.ndarray:
        return ((self.p - self.digits) % self.p) @ self.weights

    @cached_property
    def inv_table(self) -> np.ndarray:
        exp, log, exp_a, log_a = self._log_tables
        n = self.order - 1
        out = np.zeros(self.order, dtype=np.int64)
        out[1:] = exp_a[(-log_a[1:]) % n]
        return out

    @cached_property
    def _add_list(self) -> list[list[int]] | None:
        if self.order > _ADD_TABLE_LIMIT:
            return None
        return self.add_table.tolist()

    # -- scalar arithmetic on indices --------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.e == 1:
            return (a + b) % self.p
        table = self._add_list
        if table is not None:
            return table[a][b]
        return self.index([x + y for x, y in zip(self.coeffs(a), self.coeffs(b))])

    def neg(self, a: int) -> int:
        if self.p == 2 or a == 0:
            return a
        if self.e == 1:
            return self.p - a
        return self.index([-c for c in self.coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.e == 1:
            return (a * b) % self.p
        exp, log, _, _ = self._log_tables
        return exp[(log[a] + log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.e == 1:
            return pow(a, -1, self.p)
        exp, log, _, _ = self._log_tables
        return exp[(-log[a]) % (self.order - 1)]

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("negative power of zero")
            return self.one if k == 0 else 0
        k %= self.order - 1
        result, base = self.one, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    # -- vectorised arithmetic on index arrays -----------------------------

    def add_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.e == 1:
            return (a + b) % self.p
        if "add_table" in self.__dict__:
            return self.add_table[a, b]
        d = self.digits
        return ((d[a] + d[b]) % self.p) @ self.weights

    def neg_arr(self, a) -> np.ndarray:
        return self.neg_table[np.asarray(a, dtype=np.int64)]

    def sub_arr(self, a, b) -> np.ndarray:
        return self.add_arr(a, self.neg_arr(b))

    def mul_arr(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a * b) % self.p
        _, _, exp_a, log_a = self._log_tables
        out = exp_a[(log_a[a] + log_a[b]) % (self.order - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def pow_arr(self, a, k: int) -> np.ndarray:
        """Elementwise a**k for a non-negative exponent."""
        if k < 0:
            raise ParameterError("pow_arr needs a non-negative exponent")
        a = np.asarray(a, dtype=np.int64)
        _, _, exp_a, log_a = self._log_tables
        n = self.order - 1
        out = exp_a[(log_a[a] * (k % n)) % n]
        zero_val = self.one if k == 0 else 0
        return np.where(a == 0, zero_val, out)


class FieldElement:
    """An element of a FieldSpec; supports + - * / ** and comparison by value."""

    __slots__ = ("spec", "value")

    def __init__(self, spec: FieldSpec, value: int):
        value = int(value)
        if not 0 <= value < spec.order:
            raise ParameterError(f"index {value} out of range for field of order {spec.order}")
        self.spec = spec
        self.value = value

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.coeffs(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise ParameterError("field elements belong to different fields")
            return other.value
        if isinstance(other, (int, np.integer)):
            return self.spec.from_int(int(other)).value
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.spec, self.spec.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.spec, self.spec.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.spec, self.spec.sub(o, self.value))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.value))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.spec, self.spec.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.spec, self.spec.mul(self.value, self.spec.inv(o)))

    def __pow__(self, k: int):
        return FieldElement(self.spec, self.spec.pow(self.value, int(k)))

    def inv(self) -> FieldElement:
        return FieldElement(self.spec, self.spec.inv(self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def __bool__(self) -> bool:
        return self.value != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.value == other.value
        if isinstance(other, int):
            return self.value == self.spec.from_int(other).value
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.spec, self.value))

    def __repr__(self) -> str:
        return f"FieldElement(F_{self.spec.p}^{self.spec.e}, {list(self.coeffs)})"


def field_create(p: int, e: int, cap: int = DEFAULT_FIELD_CAP) -> FieldSpec:
    """Canonical F_{p^e}: the modulus is the lexicographically smallest monic
    irreducible polynomial, coefficients compared from the constant term up."""
    if e < 1:
        raise ParameterError("field degree must be at least 1")
    if p < 2 or not sympy.isprime(p):
        raise ParameterError(f"{p} is not prime")
    if p**e > cap:
        raise SizeCapError(f"field of order {p}^{e} exceeds cap {cap}")
    return _field_create(p, e)


@functools.lru_cache(maxsize=None)
def _field_create(p: int, e: int) -> FieldSpec:
    return FieldSpec(p, e, _smallest_irreducible(p, e))


def field_of_order(q: int, cap: int = DEFAULT_FIELD_CAP) -> FieldSpec:
    if q < 2:
        raise ParameterError(f"{q} is not a prime power")
    factors = sympy.factorint(q)
    if len(factors) != 1:
        raise ParameterError(f"{q} is not a prime power")
    (p, e), = factors.items()
    return field_create(p, e, cap)


def as_field(q: int | FieldSpec) -> FieldSpec:
    return q if isinstance(q, FieldSpec) else field_of_order(int(q))


# ---------------------------------------------------------------------------
# subfields and towers


def subfield_elements(field: FieldSpec, sub: FieldSpec) -> list[int]:
    """Sorted indices of the copy of ``sub`` inside ``field``."""
    if sub.p != field.p or field.e % sub.e:
        raise ParameterError(f"F_{sub.order} is not a subfield of F_{field.order}")
    if sub.e == field.e:
        return list(range(field.order))
    g = field.primitive_element
    step = (field.order - 1) // (sub.order - 1)
    return sorted([0] + [field.pow(g, step * k) for k in range(sub.order - 1)])


def _embedding_root(sub: FieldSpec, field: FieldSpec) -> int:
    """Smallest root in ``field`` of the modulus of ``sub``."""
    cand = subfield_elements(field, sub)
    for z in cand:
        acc = 0
        for c in reversed(sub.modulus):
            acc = field.add(field.mul(acc, z), (c % field.p) * field.one)
        if acc == 0:
            return z
    raise AssertionError("modulus has no root in the extension")


class _Level:
    """F_{q^i} with its F_q-structure: embedding, coordinates, norm, trace."""

    def __init__(self, base: FieldSpec, field: FieldSpec, i: int):
        self.base = base
        self.field = field
        self.i = i
        q, e = base.order, base.e
        if i == 1:
            root = field.x if e > 1 else 0
        else:
            root = _embedding_root(base, field)
        self.root = root
        self.generator = field.x if i > 1 else field.one
        # F_p-basis {root^k * generator^j}, column j*e + k
        cols = []
        for j in range(i):
            gj = field.pow(self.generator, j)
            for k in range(e):
                cols.append(field.digits[field.mul(gj, field.pow(root, k))])
        self.matrix = np.array(cols, dtype=np.int64).T
        self.matrix_inv = _inverse_mod_p(self.matrix, base.p)
        # embedding of F_q
        base_digits = base.digits  # (q, e)
        self.embed = ((base_digits @ self.matrix[:, :e].T) % base.p) @ field.weights
        unembed = np.full(field.order, -1, dtype=np.int64)
        unembed[self.embed] = np.arange(q)
        self.unembed = unembed
        self.norm_exponent = (field.order - 1) // (q - 1)

    def to_coords_arr(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        b = self.base
        vec = (self.field.digits[idx] @ self.matrix_inv.T) % b.p
        vec = vec.reshape(idx.shape + (self.i, b.e))
        return vec @ b.weights

    def from_coords_arr(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        b = self.base
        if coords.shape[-1] != self.i:
            raise ParameterError(f"expected {self.i} coordinates, got {coords.shape[-1]}")
        vec = b.digits[coords].reshape(coords.shape[:-1] + (self.i * b.e,))
        return ((vec @ self.matrix.T) % b.p) @ self.field.weights

    @cached_property
    def norm_table(self) -> np.ndarray:
        idx = np.arange(self.field.order, dtype=np.int64)
        return self.unembed[self.field.pow_arr(idx, self.norm_exponent)]

    @cached_property
    def min_norm_preimage(self) -> list[int]:
        """For each base value, the norm preimage smallest in F_q-coordinate order."""
        q = self.base.order
        grid = np.array(list(itertools.product(range(q), repeat=self.i)), dtype=np.int64)
        elems = self.from_coords_arr(grid)
        norms = self.norm_table[elems]
        _, first = np.unique(norms, return_index=True)
        out = [-1] * q
        for pos in first:
            out[int(norms[pos])] = int(elems[pos])
        return out

    def norm(self, a: int) -> int:
        return int(self.unembed[self.field.pow(a, self.norm_exponent)])

    def trace(self, a: int) -> int:
        f, q = self.field, self.base.order
        acc, conj = 0, a
        for _ in range(self.i):
            acc = f.add(acc, conj)
            conj = f.pow(conj, q)
        return int(self.unembed[acc])


@dataclass(frozen=True)
class TowerSpec:
    """F_q together with F_{q^1}, ..., F_{q^t}, each built flat as F_{p^(e*i)}."""

    base: FieldSpec
    t: int

    @property
    def q(self) -> int:
        return self.base.order

    @property
    def levels(self) -> tuple[FieldSpec, ...]:
        return tuple(lv.field for lv in self._levels)

    @cached_property
    def _levels(self) -> tuple[_Level, ...]:
        return tuple(
            _Level(self.base, _field_create(self.base.p, self.base.e * i), i)
            for i in range(1, self.t + 1)
        )

    def level(self, i: int) -> _Level:
        if not 1 <= i <= self.t:
            raise ParameterError(f"level {i} out of range 1..{self.t}")
        return self._levels[i - 1]

    @property
    def dimension(self) -> int:
        """Total number of F_q-coordinates, t(t+1)/2."""
        return self.t * (self.t + 1) // 2

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "t": self.t,
            "levels": [lv.to_json() for lv in self.levels],
        }


def make_tower(base: FieldSpec | int, t: int, cap: int = DEFAULT_FIELD_CAP) -> TowerSpec:
    base = as_field(base)
    if t < 1:
        raise ParameterError("tower needs at least one level")
    if base.order**t > cap:
        raise SizeCapError(f"level F_{base.order}^{t} exceeds cap {cap}")
    return _make_tower(base, t)


@functools.lru_cache(maxsize=None)
def _make_tower(base: FieldSpec, t: int) -> TowerSpec:
    tower = TowerSpec(base, t)
    tower._levels  # build eagerly so the tower is immutable once returned
    return tower


def _level_element(T: TowerSpec, i: int, x: FieldElement) -> int:
    lv = T.level(i)
    if x.spec != lv.field:
        raise ParameterError(f"element does not lie in level {i}")
    return x.value


def norm(T: TowerSpec, i: int, x: FieldElement) -> FieldElement:
    """N(x) = x^((q^i - 1)/(q - 1)), as an element of F_q."""
    return FieldElement(T.base, T.level(i).norm(_level_element(T, i, x)))


def trace(T: TowerSpec, i: int, x: FieldElement) -> FieldElement:
    """x + x^q + ... + x^(q^(i-1)), as an element of F_q."""
    return FieldElement(T.base, T.level(i).trace(_level_element(T, i, x)))


def embed(T: TowerSpec, i: int, a: FieldElement) -> FieldElement:
    """Image of a base element in level i."""
    if a.spec != T.base:
        raise ParameterError("element is not in the base field")
    lv = T.level(i)
    return FieldElement(lv.field, int(lv.embed[a.value]))


def to_base_coords(T: TowerSpec, i: int, x: FieldElement) -> list[FieldElement]:
    lv = T.level(i)
    coords = lv.to_coords_arr(_level_element(T, i, x))
    return [FieldElement(T.base, int(c)) for c in coords]


def from_base_coords(T: TowerSpec, i: int, vec: Iterable[FieldElement | int]) -> FieldElement:
    lv = T.level(i)
    idx = [v.value if isinstance(v, FieldElement) else int(v) for v in vec]
    if len(idx) != i:
        raise ParameterError(f"expected {i} coordinates, got {len(idx)}")
    return FieldElement(lv.field, int(lv.from_coords_arr(np.array(idx, dtype=np.int64))))
