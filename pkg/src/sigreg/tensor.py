"""Truncated free tensor algebra over R^d: tensors, words, linear forms, shuffles.

An element of T^n(R^d) is a tuple of levels (a_0, a_1, ..., a_n) where level k
lives in (R^d)^{tensor k}. Levels are stored as dense flat arrays of length
d**k in lexicographic word order: the word (i_1, ..., i_k), letters in 1..d,
sits at offset sum((i_j - 1) * d**(k - j)). All products silently drop terms
above the truncation degree n.

Words are plain tuples of int letters; () is the empty word. A LinearForm is a
finite real combination of words, evaluated against a tensor by summing
coefficient * coordinate. The shuffle product of words expands recursively and
is memoized, since the experiments reuse a small set of word pairs heavily.

d and n stay tiny here (d = 2, n <= 6 covers every use in this package), so
dense per-level storage wins over sparse maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _cartesian

import numpy as np

__all__ = [
    "TruncatedTensor",
    "LinearForm",
    "word_index",
    "index_word",
    "words_of_length",
    "all_words",
    "level_dim",
    "total_dim",
    "zero_tensor",
    "unit_tensor",
    "tensor_add",
    "scalar_mul",
    "tensor_mul",
    "tensor_exp",
    "truncate",
    "project",
    "as_vector",
    "from_vector",
    "tensor_to_dict",
    "tensor_from_dict",
    "shuffle_words",
    "unit_form",
    "form_add",
    "form_scale",
    "form_shuffle_mul",
    "apply_form",
]


# ---------------------------------------------------------------------------
# Words


def word_index(w, d):
    """Offset of word ``w`` inside its level array (base-d positional code)."""
    off = 0
    for letter in w:
        if not 1 <= letter <= d:
            raise ValueError(f"letter {letter} outside alphabet 1..{d}")
        off = off * d + (letter - 1)
    return off


def index_word(offset, length, d):
    """Inverse of :func:`word_index` for words of the given length."""
    letters = []
    for _ in range(length):
        offset, rem = divmod(offset, d)
        letters.append(rem + 1)
    return tuple(reversed(letters))


def words_of_length(d, k):
    """All words of length k over 1..d in lexicographic (storage) order."""
    return [tuple(w) for w in _cartesian(range(1, d + 1), repeat=k)]


def all_words(d, n):
    """All words of length 0..n, level-major, matching :func:`as_vector`."""
    out = []
    for k in range(n + 1):
        out.extend(words_of_length(d, k))
    return out


def level_dim(d, k):
    return d**k


def total_dim(d, n):
    """Coefficient count of T^n(R^d): sum of d**k for k = 0..n."""
    return sum(d**k for k in range(n + 1))


# ---------------------------------------------------------------------------
# Truncated tensors


@dataclass(frozen=True, eq=False)
class TruncatedTensor:
    """Element of the degree-n truncated tensor algebra over R^d.

    levels[k] is a flat float array of length d**k in lexicographic word
    order. Instances are immutable by convention; operations return new
    values.
    """

    d: int
    n: int
    levels: tuple

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension d must be positive")
        if self.n < 0:
            raise ValueError("degree n must be non-negative")
        if len(self.levels) != self.n + 1:
            raise ValueError("level count must equal degree + 1")
        fixed = []
        for k, lev in enumerate(self.levels):
            arr = np.asarray(lev, dtype=float).reshape(-1)
            if arr.shape != (self.d**k,):
                raise ValueError(f"level {k} must have {self.d ** k} entries")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"level {k} contains non-finite entries")
            fixed.append(arr)
        object.__setattr__(self, "levels", tuple(fixed))

    def level(self, k):
        return self.levels[k]

    def __add__(self, other):
        return tensor_add(self, other)

    def __matmul__(self, other):
        return tensor_mul(self, other)

    def __rmul__(self, c):
        return scalar_mul(c, self)

    def allclose(self, other, atol=1e-12, rtol=0.0):
        if (self.d, self.n) != (other.d, other.n):
            return False
        return all(
            np.allclose(a, b, atol=atol, rtol=rtol)
            for a, b in zip(self.levels, other.levels)
        )


def _check_compatible(a, b):
    if a.d != b.d or a.n != b.n:
        raise ValueError(
            f"tensor mismatch: ({a.d}, {a.n}) vs ({b.d}, {b.n}) (dimension, degree)"
        )


def zero_tensor(d, n):
    return TruncatedTensor(d, n, tuple(np.zeros(d**k) for k in range(n + 1)))


def unit_tensor(d, n):
    """The multiplicative unit 1 = (1, 0, ..., 0)."""
    levels = [np.zeros(d**k) for k in range(n + 1)]
    levels[0][0] = 1.0
    return TruncatedTensor(d, n, tuple(levels))


def tensor_add(a, b):
    _check_compatible(a, b)
    return TruncatedTensor(
        a.d, a.n, tuple(x + y for x, y in zip(a.levels, b.levels))
    )


def scalar_mul(c, a):
    return TruncatedTensor(a.d, a.n, tuple(float(c) * x for x in a.levels))


def tensor_mul(a, b):
    """Graded convolution product truncated at the common degree.

    Level k of the product is sum over j of a_j (X) b_{k-j}; index
    concatenation is exactly the Kronecker product on flat level arrays.
    """
    _check_compatible(a, b)
    levels = []
    for k in range(a.n + 1):
        acc = np.zeros(a.d**k)
        for j in range(k + 1):
            acc += np.kron(a.levels[j], b.levels[k - j])
        levels.append(acc)
    return TruncatedTensor(a.d, a.n, tuple(levels))


def tensor_exp(v, n):
    """exp of a level-1 element: sum of v^{tensor k} / k! for k = 0..n.

    The level-k entry at word (i_1, ..., i_k) is prod(v[i_j]) / k!.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    d = v.size
    if d < 1:
        raise ValueError("increment must have at least one coordinate")
    levels = [np.ones(1)]
    term = np.ones(1)
    for k in range(1, n + 1):
        term = np.kron(term, v) / k
        levels.append(term)
    return TruncatedTensor(d, n, tuple(levels))


def truncate(a, m):
    """Copy of levels 0..m (the projection dropping higher degrees)."""
    if m > a.n:
        raise ValueError(f"cannot truncate degree-{a.n} tensor to degree {m}")
    return TruncatedTensor(a.d, m, a.levels[: m + 1])


def project(a, w):
    """Coordinate of word ``w``: the coefficient a_{|w|}[w]."""
    w = tuple(w)
    if len(w) > a.n:
        raise ValueError(f"word of length {len(w)} exceeds degree {a.n}")
    return float(a.levels[len(w)][word_index(w, a.d)])


def as_vector(a):
    """Flatten to a single vector, level-major (order of :func:`all_words`)."""
    return np.concatenate(a.levels)


def from_vector(vec, d, n):
    vec = np.asarray(vec, dtype=float).reshape(-1)
    if vec.size != total_dim(d, n):
        raise ValueError(
            f"expected {total_dim(d, n)} coefficients, got {vec.size}"
        )
    levels = []
    pos = 0
    for k in range(n + 1):
        size = d**k
        levels.append(vec[pos : pos + size])
        pos += size
    return TruncatedTensor(d, n, tuple(levels))


def tensor_to_dict(a):
    """JSON-ready form: {d, n, levels} with levels in storage order."""
    return {"d": a.d, "n": a.n, "levels": [lev.tolist() for lev in a.levels]}


def tensor_from_dict(obj):
    try:
        d, n, levels = int(obj["d"]), int(obj["n"]), obj["levels"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed tensor object: {exc}") from exc
    return TruncatedTensor(d, n, tuple(np.asarray(l, dtype=float) for l in levels))


# ---------------------------------------------------------------------------
# Shuffles and linear forms


@lru_cache(maxsize=None)
def _shuffle_counts(left, right):
    # (ua) shuffle (vb) = ((u shuffle vb) . a) + ((ua shuffle v) . b)
    if not left:
        return {right: 1}
    if not right:
        return {left: 1}
    out = {}
    for w, c in _shuffle_counts(left[:-1], right).items():
        key = w + (left[-1],)
        out[key] = out.get(key, 0) + c
    for w, c in _shuffle_counts(left, right[:-1]).items():
        key = w + (right[-1],)
        out[key] = out.get(key, 0) + c
    return out


@dataclass(frozen=True, eq=False)
class LinearForm:
    """Finite real combination of words, acting on tensors by coordinate sums.

    terms maps word -> coefficient; exact zeros are pruned at construction
    (forms are combinatorial objects, no epsilon thresholding).
    """

    d: int
    terms: dict

    def __post_init__(self):
        clean = {}
        for w, c in self.terms.items():
            w = tuple(int(x) for x in w)
            for letter in w:
                if not 1 <= letter <= self.d:
                    raise ValueError(
                        f"letter {letter} outside alphabet 1..{self.d}"
                    )
            c = float(c)
            if c != 0.0:
                clean[w] = clean.get(w, 0.0) + c
        object.__setattr__(self, "terms", {w: c for w, c in clean.items() if c != 0.0})

    @property
    def degree(self):
        """Length of the longest word with a nonzero coefficient (0 if none)."""
        return max((len(w) for w in self.terms), default=0)

    def __call__(self, tensor):
        return apply_form(self, tensor)

    def __add__(self, other):
        return form_add(self, other)

    def __rmul__(self, c):
        return form_scale(c, self)


def shuffle_words(I, J, d=None):
    """Shuffle product of two words as a LinearForm with integer multiplicities.

    The total multiplicity over all result words is binomial(|I|+|J|, |I|).
    """
    I, J = tuple(I), tuple(J)
    if d is None:
        d = max((*I, *J), default=1)
    counts = _shuffle_counts(I, J)
    return LinearForm(d, {w: float(c) for w, c in counts.items()})


def unit_form(d):
    """The form picking the empty-word coordinate (value 1 on signatures)."""
    return LinearForm(d, {(): 1.0})


def form_add(f, g):
    d = max(f.d, g.d)
    terms = dict(f.terms)
    for w, c in g.terms.items():
        terms[w] = terms.get(w, 0.0) + c
    return LinearForm(d, terms)


def form_scale(c, f):
    return LinearForm(f.d, {w: c * x for w, x in f.terms.items()})


def form_shuffle_mul(f, g):
    """Shuffle product of two forms, expanded bilinearly over their words."""
    d = max(f.d, g.d)
    terms = {}
    for u, cu in f.terms.items():
        for v, cv in g.terms.items():
            for w, mult in _shuffle_counts(u, v).items():
                terms[w] = terms.get(w, 0.0) + cu * cv * mult
    return LinearForm(d, terms)


def apply_form(f, a):
    """Evaluate sum over words of coefficient(w) * project(a, w)."""
    out = 0.0
    for w, c in f.terms.items():
        out += c * project(a, w)
    return out
