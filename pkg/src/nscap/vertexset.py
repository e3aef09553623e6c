"""Canonical exact vertex collections and their text file format.

A file starts with ``CGLMP24-VSET v1 kind=<kind> count=<n>`` followed by ``n``
lines of 64 space-separated reduced fractions ``num/den``.  Rows are
deduplicated and sorted lexicographically by rational value, so two builds
of the same set produce byte-identical files.
"""
import hashlib
import math
import os
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from nscap.behavior import SIZE, Behavior
from nscap.errors import DomainError, FormatError

MAGIC = "CGLMP24-VSET"
VERSION = "v1"


def _reduce_rows(num, den):
    num = np.asarray(num, dtype=np.int64).reshape(-1, SIZE)
    den = np.asarray(den, dtype=np.int64).reshape(-1)
    if np.any(den <= 0):
        raise DomainError("denominators must be positive")
    g = np.gcd.reduce(np.concatenate([num, den[:, None]], axis=1), axis=1)
    return num // g[:, None], den // g


def _common_scale(den):
    big = int(np.lcm.reduce(den)) if len(den) else 1
    if big >= 2**40:
        raise OverflowError("common denominator too large for int64 sort keys")
    return big


class VertexSet:
    """Deduplicated, lexicographically sorted behaviors in integer form.

    Row ``i`` is ``num[i] / den[i]`` with ``gcd(num[i], den[i]) == 1``.
    """

    def __init__(self, kind, num, den):
        num, den = _reduce_rows(num, den)
        if len(num):
            scale = _common_scale(den)
            keys = num * (scale // den)[:, None]
            _, first = np.unique(keys, axis=0, return_index=True)
            num, den = num[first], den[first]
        self.kind = kind
        self.num = num
        self.den = den
        self.num.setflags(write=False)
        self.den.setflags(write=False)

    @classmethod
    def from_behaviors(cls, kind, behaviors):
        rows, dens = [], []
        for beh in behaviors:
            n, d = beh.integer_form()
            rows.append(n)
            dens.append(d)
        if not rows:
            return cls(kind, np.zeros((0, SIZE), np.int64), np.zeros(0, np.int64))
        return cls(kind, np.array(rows), np.array(dens))

    def __len__(self):
        return len(self.den)

    def __getitem__(self, i):
        return Behavior.from_integers(self.num[i], self.den[i])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other):
        if not isinstance(other, VertexSet):
            return NotImplemented
        return (np.array_equal(self.num, other.num) and np.array_equal(self.den, other.den))

    __hash__ = None

    def __repr__(self):
        return f"VertexSet(kind={self.kind!r}, count={len(self)})"

    @cached_property
    def values(self):
        """Float entries, shape ``(n, 64)``."""
        return self.num / self.den[:, None]

    @cached_property
    def _keyset(self):
        return {self._key(n, d) for n, d in zip(self.num.tolist(), self.den.tolist())}

    @staticmethod
    def _key(num, den):
        return tuple(num), int(den)

    def __contains__(self, beh):
        n, d = beh.integer_form()
        g = math.gcd(d, *n.tolist())
        return self._key((n // g).tolist(), d // g) in self._keyset

    def index(self, beh):
        n, d = beh.integer_form()
        g = math.gcd(d, *n.tolist())
        hit = np.nonzero((self.den == d // g) & np.all(self.num == n // g, axis=1))[0]
        if len(hit) == 0:
            raise ValueError("behavior not in vertex set")
        return int(hit[0])

    def union(self, other, kind):
        return VertexSet(kind, np.concatenate([self.num, other.num]),
                         np.concatenate([self.den, other.den]))

    def zero_masks(self):
        """Zero pattern of every row packed into one uint64 (bit k set iff entry k == 0)."""
        bits = np.uint64(1) << np.arange(SIZE, dtype=np.uint64)
        return np.bitwise_or.reduce(np.where(self.num == 0, bits, np.uint64(0)), axis=1)

    # exact row-wise checks

    def normalized_mask(self):
        sums = self.num.reshape(-1, 4, 16).sum(axis=2)
        return np.all(sums == self.den[:, None], axis=1)

    def no_signaling_mask(self):
        t = self.num.reshape(-1, 2, 2, 4, 4)
        alice = t.sum(axis=4)
        bob = t.sum(axis=3)
        return (np.all(alice[:, :, 0] == alice[:, :, 1], axis=(1, 2))
                & np.all(bob[:, 0] == bob[:, 1], axis=(1, 2)))

    def in_unit_box_mask(self):
        return np.all((self.num >= 0) & (self.num <= self.den[:, None]), axis=1)

    def validate(self):
        """Raise DomainError unless every row is a normalized no-signaling behavior."""
        ok = self.in_unit_box_mask() & self.normalized_mask() & self.no_signaling_mask()
        if not np.all(ok):
            bad = int(np.nonzero(~ok)[0][0])
            raise DomainError(f"row {bad} of {self.kind} set is not a no-signaling behavior")

    def evaluate(self, coefficients):
        """Exact values ``c . P`` for integer or Fraction coefficients, as Fractions."""
        coeffs = [Fraction(c) for c in coefficients]
        scale = math.lcm(*(c.denominator for c in coeffs))
        ints = np.array([int(c * scale) for c in coeffs], dtype=np.int64)
        raw = self.num @ ints
        return [Fraction(int(r), int(d) * scale) for r, d in zip(raw, self.den)]


# ---------------------------------------------------------------- file format

def _format_rows(vs):
    n = len(vs)
    if n == 0:
        return []
    g = np.gcd(vs.num, vs.den[:, None])
    en = vs.num // g
    ed = vs.den[:, None] // g
    base = int(ed.max()) + 1
    codes = en * base + ed
    uniq, inv = np.unique(codes, return_inverse=True)
    tokens = np.array([f"{int(u) // base}/{int(u) % base}" for u in uniq], dtype=object)
    grid = tokens[inv.reshape(n, SIZE)]
    return [" ".join(row) for row in grid.tolist()]


def dumps(vs):
    lines = [f"{MAGIC} {VERSION} kind={vs.kind} count={len(vs)}"]
    lines.extend(_format_rows(vs))
    return "\n".join(lines) + "\n"


def save_vertex_set(vs, path):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(vs))
    os.replace(tmp, path)


def _parse_header(line):
    parts = line.split()
    if len(parts) != 4 or parts[0] != MAGIC or parts[1] != VERSION:
        raise FormatError(f"bad header: {line!r}")
    fields = dict(p.split("=", 1) for p in parts[2:] if "=" in p)
    if set(fields) != {"kind", "count"}:
        raise FormatError(f"bad header: {line!r}")
    try:
        count = int(fields["count"])
    except ValueError:
        raise FormatError(f"bad count in header: {line!r}") from None
    return fields["kind"], count


def loads(text):
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty vertex-set file")
    kind, count = _parse_header(lines[0])
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != count:
        raise FormatError(f"header says count={count} but file has {len(body)} rows")
    cache = {}
    en = np.zeros((count, SIZE), dtype=np.int64)
    ed = np.ones((count, SIZE), dtype=np.int64)
    for r, line in enumerate(body):
        toks = line.split()
        if len(toks) != SIZE:
            raise FormatError(f"row {r} has {len(toks)} entries, expected {SIZE}")
        for c, tok in enumerate(toks):
            val = cache.get(tok)
            if val is None:
                n, sep, d = tok.partition("/")
                try:
                    val = (int(n), int(d))
                except ValueError:
                    raise FormatError(f"bad rational {tok!r} in row {r}") from None
                if not sep or val[1] <= 0 or math.gcd(*val) != 1:
                    raise FormatError(f"bad rational {tok!r} in row {r}")
                cache[tok] = val
            en[r, c], ed[r, c] = val
    den = np.lcm.reduce(ed, axis=1) if count else np.zeros(0, np.int64)
    num = en * (den[:, None] // ed)
    return VertexSet(kind, num, den)


def load_vertex_set(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not UTF-8 text") from exc
    return loads(text)


def checksum(vs):
    return hashlib.sha256(dumps(vs).encode("utf-8")).hexdigest()
