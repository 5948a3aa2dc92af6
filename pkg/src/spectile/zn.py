"""Exact arithmetic over Z_N and Z[X]/(X^N - 1).

A multiset A over Z_N is stored as a length-N vector of nonnegative integer
multiplicities; read as a polynomial, coeffs[a] is the coefficient of X^a, so
the vector doubles as the mask polynomial of A taken mod X^N - 1.  Everything
downstream (vanishing tests, tiling products, spectra) reduces to integer
polynomial arithmetic on these vectors.  There is no floating point anywhere
in this module: a value A(zeta_d) is declared zero exactly when the d-th
cyclotomic polynomial divides the mask polynomial folded mod X^d - 1.

Conventions:
  * polynomials are dense lists of Python ints, ascending degree;
  * divisibility by Phi_d is decided by exact Euclidean division (Phi_d is
    monic, so the division stays in Z[X]);
  * the zero set Z(A) = {x : A(zeta_N^-x) = 0} is stored as the set of
    divisors d > 1 of N with Phi_d | A, since vanishing only depends on the
    order N/gcd(x, N) of the root.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError, ParseError

# ---------------------------------------------------------------------------
# dense integer polynomials


def poly_trim(c):
    """Drop trailing zero coefficients (canonical form; [] is the zero poly)."""
    n = len(c)
    while n > 0 and c[n - 1] == 0:
        n -= 1
    return c[:n]


def poly_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] += ai * bj
    return out


def poly_divmod(num, den):
    """Euclidean division by a monic integer polynomial; exact over Z."""
    den = poly_trim(list(den))
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    assert den[-1] == 1, "divisor must be monic"
    rem = list(num)
    dd = len(den) - 1
    quo = [0] * max(0, len(rem) - dd)
    for i in range(len(rem) - 1, dd - 1, -1):
        c = rem[i]
        if c:
            quo[i - dd] = c
            for j in range(dd + 1):
                rem[i - dd + j] -= c * den[j]
    return quo, poly_trim(rem)


def poly_mod_xn_minus_1(c, n):
    """Fold a polynomial into the ring Z[X]/(X^n - 1)."""
    out = [0] * n
    for i, ci in enumerate(c):
        if ci:
            out[i % n] += ci
    return out


@dataclass(frozen=True)
class CycloPoly:
    """The d-th cyclotomic polynomial Phi_d, with exact integer coefficients."""

    d: int
    coeffs: tuple

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def at_one(self):
        """Phi_d(1): p if d is a power of the prime p, else 1 (and 0 for d=1)."""
        return sum(self.coeffs)


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> CycloPoly:
    """Compute Phi_d by exact recursive division of X^d - 1 by all lower Phi_e.

    Every intermediate division must be exact; a nonzero remainder would mean
    a corrupted cache and raises immediately.
    """
    if d < 1:
        raise DomainError(f"cyclotomic order must be >= 1, got {d}")
    if d == 1:
        return CycloPoly(1, (-1, 1))
    num = [0] * (d + 1)
    num[0], num[d] = -1, 1
    for e in divisors(d):
        if e == d:
            continue
        num, rem = poly_divmod(num, cyclotomic(e).coeffs)
        if rem:
            raise AssertionError(f"inexact division while building Phi_{d}")
    num = poly_trim(num)
    assert num[-1] == 1
    return CycloPoly(d, tuple(num))


@lru_cache(maxsize=None)
def divisors(n: int) -> tuple:
    """All divisors of n, ascending."""
    if n < 1:
        raise DomainError(f"divisors of {n} undefined")
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return tuple(sorted(ds))


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple:
    """Trial-division factorization as ((p1, e1), (p2, e2), ...), p ascending."""
    if n < 1:
        raise DomainError(f"cannot factorize {n}")
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return tuple(out)


# ---------------------------------------------------------------------------
# group context


@dataclass(frozen=True)
class GroupContext:
    """The ambient group Z_n together with its divisor lattice.

    Instances are immutable and interned per n (see group()); all cyclotomic
    and divisor data derived from a context is memoized process-wide.
    """

    n: int
    factorization: tuple
    divisors: tuple

    @staticmethod
    def from_factorization(fact) -> "GroupContext":
        fact = tuple(sorted((int(p), int(e)) for p, e in fact))
        if len({p for p, _ in fact}) != len(fact):
            raise DomainError("repeated prime in factorization")
        n = 1
        for p, e in fact:
            if e < 1 or p < 2 or factorize(p) != ((p, 1),):
                raise DomainError(f"bad prime power {p}^{e}")
            n *= p**e
        ds = [1]
        for p, e in fact:
            ds = [d * p**k for d in ds for k in range(e + 1)]
        return GroupContext(n, fact, tuple(sorted(ds)))

    @property
    def primes(self):
        return tuple(p for p, _ in self.factorization)

    @property
    def prime_powers(self):
        """All prime powers dividing n (the index set for the CM conditions)."""
        return tuple(
            sorted(p**k for p, e in self.factorization for k in range(1, e + 1))
        )

    def valuation(self, p):
        for q, e in self.factorization:
            if q == p:
                return e
        return 0

    def prime_pair(self):
        """(p, m, q, n) for two-prime orders p^m q^n; DomainError otherwise."""
        if len(self.factorization) != 2:
            raise DomainError(
                f"order {self.n} has {len(self.factorization)} distinct primes, need 2"
            )
        (p, m), (q, n) = self.factorization
        return p, m, q, n

    def units(self):
        if self.n == 1:
            return (0,)
        return tuple(x for x in range(1, self.n) if math.gcd(x, self.n) == 1)


@lru_cache(maxsize=None)
def group(n: int) -> GroupContext:
    if n < 1:
        raise DomainError(f"group order must be positive, got {n}")
    return GroupContext.from_factorization(factorize(n))


@lru_cache(maxsize=None)
def _order_table(n):
    # order_of[x] = N / gcd(x, N), the order of x in Z_N; order_of[0] = 1
    return tuple(n // math.gcd(x, n) for x in range(n))


# ---------------------------------------------------------------------------
# multisets / mask polynomials


@dataclass(frozen=True)
class MaskMultiset:
    """A multiset over Z_N, i.e. the coefficient vector of its mask polynomial."""

    ctx: GroupContext
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.ctx.n:
            raise DomainError(
                f"coefficient vector has length {len(self.coeffs)}, group order is {self.ctx.n}"
            )
        if any(c < 0 for c in self.coeffs):
            raise DomainError("multiset multiplicities must be nonnegative")

    @staticmethod
    def from_elements(ctx_or_n, elements) -> "MaskMultiset":
        ctx = ctx_or_n if isinstance(ctx_or_n, GroupContext) else group(ctx_or_n)
        coeffs = [0] * ctx.n
        for a in elements:
            coeffs[a % ctx.n] += 1
        return MaskMultiset(ctx, tuple(coeffs))

    @staticmethod
    def from_coeffs(ctx_or_n, coeffs) -> "MaskMultiset":
        ctx = ctx_or_n if isinstance(ctx_or_n, GroupContext) else group(ctx_or_n)
        return MaskMultiset(ctx, tuple(int(c) for c in coeffs))

    @property
    def n(self):
        return self.ctx.n

    def mass(self):
        """Total multiplicity |A| = A(1)."""
        return sum(self.coeffs)

    def support(self):
        return tuple(a for a, c in enumerate(self.coeffs) if c)

    def is_proper(self):
        return all(c in (0, 1) for c in self.coeffs)

    def is_empty(self):
        return all(c == 0 for c in self.coeffs)

    def mask(self):
        """Support as a bitmask integer (bit a set iff a in supp A)."""
        m = 0
        for a, c in enumerate(self.coeffs):
            if c:
                m |= 1 << a
        return m

    def translate(self, t):
        n = self.n
        t %= n
        return MaskMultiset(self.ctx, self.coeffs[-t:] + self.coeffs[:-t] if t else self.coeffs)

    def __repr__(self):
        return f"MaskMultiset({self.to_text()!r})"

    def to_text(self):
        parts = []
        for a, c in enumerate(self.coeffs):
            if c == 1:
                parts.append(str(a))
            elif c > 1:
                parts.append(f"{a}*{c}")
        return f"{self.n}:{{{','.join(parts)}}}"

    def to_json(self):
        return {"n": self.n, "coeffs": list(self.coeffs)}


def parse_multiset(text) -> MaskMultiset:
    """Parse a set literal, either `N:{a1*m1,a2,...}` or JSON {"n":..,"coeffs":[..]}.

    ParseError carries the character position of the first offending token so
    the CLI can point at it.
    """
    s = text.strip()
    if s.startswith("{"):
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON set literal: {exc}", position=exc.pos) from exc
        if not isinstance(obj, dict) or "n" not in obj or "coeffs" not in obj:
            raise ParseError('JSON set literal needs keys "n" and "coeffs"')
        n = obj["n"]
        coeffs = obj["coeffs"]
        if not isinstance(n, int) or n < 1:
            raise ParseError('"n" must be a positive integer')
        if not isinstance(coeffs, list) or len(coeffs) != n:
            raise ParseError(f'"coeffs" must be a list of length {n}')
        if any(not isinstance(c, int) or c < 0 for c in coeffs):
            raise ParseError('"coeffs" entries must be nonnegative integers')
        return MaskMultiset.from_coeffs(n, coeffs)

    colon = s.find(":")
    if colon < 0:
        raise ParseError("expected `N:{...}`", position=0)
    try:
        n = int(s[:colon])
    except ValueError:
        raise ParseError(f"bad group order {s[:colon]!r}", position=0) from None
    if n < 1:
        raise ParseError(f"group order must be positive, got {n}", position=0)
    body = s[colon + 1 :].strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ParseError("expected braces around the element list", position=colon + 1)
    inner = body[1:-1].strip()
    coeffs = [0] * n
    if inner:
        pos = colon + 2
        for item in inner.split(","):
            tok = item.strip()
            if not tok:
                raise ParseError("empty element", position=pos)
            mult = 1
            if "*" in tok:
                elem_s, mult_s = tok.split("*", 1)
                try:
                    mult = int(mult_s)
                except ValueError:
                    raise ParseError(f"bad multiplicity {mult_s!r}", position=pos) from None
                if mult < 0:
                    raise ParseError("multiplicity must be nonnegative", position=pos)
            else:
                elem_s = tok
            try:
                a = int(elem_s)
            except ValueError:
                raise ParseError(f"bad element {elem_s!r}", position=pos) from None
            coeffs[a % n] += mult
            pos += len(item) + 1
    return MaskMultiset.from_coeffs(n, coeffs)


# ---------------------------------------------------------------------------
# the vanishing kernel: does Phi_d divide A?


@lru_cache(maxsize=1 << 17)
def _cyclo_divides(d, folded):
    """Exact test Phi_d | F for a length-d coefficient tuple F (fold of A mod X^d - 1)."""
    if d == 1:
        return sum(folded) == 0
    _, rem = poly_divmod(list(folded), cyclotomic(d).coeffs)
    return not rem


def vanishes_at(a: MaskMultiset, d: int) -> bool:
    """Whether A(zeta_d) = 0, for d | N, decided by exact division.

    The mask polynomial is folded mod X^d - 1 (legitimate since d | N) and the
    fold is tested for divisibility by Phi_d.
    """
    n = a.n
    if d < 1 or n % d != 0:
        raise DomainError(f"{d} does not divide the group order {n}")
    folded = [0] * d
    for i, c in enumerate(a.coeffs):
        if c:
            folded[i % d] += c
    return _cyclo_divides(d, tuple(folded))


@dataclass(frozen=True)
class ZeroSet:
    """Z(A) represented through its vanishing divisors.

    Membership of a residue x depends only on gcd(x, N): x lies in Z(A) iff
    the order N/gcd(x, N) is a vanishing divisor, which is exactly the
    divisor-class structure of zero sets of mask polynomials.
    """

    ctx: GroupContext
    vanishing_divisors: frozenset

    def contains(self, x) -> bool:
        return _order_table(self.ctx.n)[x % self.ctx.n] in self.vanishing_divisors

    def residues(self) -> frozenset:
        ords = _order_table(self.ctx.n)
        return frozenset(
            x for x in range(self.ctx.n) if ords[x] in self.vanishing_divisors
        )

    def mask(self) -> int:
        m = 0
        ords = _order_table(self.ctx.n)
        for x in range(self.ctx.n):
            if ords[x] in self.vanishing_divisors:
                m |= 1 << x
        return m


def zero_set(a: MaskMultiset) -> ZeroSet:
    """All divisors d of N with Phi_d | A (equivalently A(zeta_d) = 0)."""
    if a.is_empty():
        raise DomainError("zero set of the empty multiset is undefined")
    vd = frozenset(d for d in a.ctx.divisors if d > 1 and vanishes_at(a, d))
    return ZeroSet(a.ctx, vd)


# ---------------------------------------------------------------------------
# multiset transforms


def dilate(a: MaskMultiset, m: int) -> MaskMultiset:
    """The multiset m.A with 1_{m.A}(x) = sum of multiplicities over {a : ma = x}.

    Mass is preserved; for m coprime to N this is a permutation of Z_N and the
    mask polynomial satisfies A(X^m) = (m.A)(X) mod X^N - 1.
    """
    n = a.n
    m %= n
    out = [0] * n
    for i, c in enumerate(a.coeffs):
        if c:
            out[(i * m) % n] += c
    return MaskMultiset(a.ctx, tuple(out))


def restrict_class(a: MaskMultiset, j: int, m: int) -> MaskMultiset:
    """The sub-multiset of entries congruent to j mod m, for m | N."""
    n = a.n
    if m < 1 or n % m != 0:
        raise DomainError(f"{m} does not divide the group order {n}")
    j %= m
    out = tuple(c if i % m == j else 0 for i, c in enumerate(a.coeffs))
    return MaskMultiset(a.ctx, out)


def difference_set(a: MaskMultiset) -> frozenset:
    """A - A over the support of a proper set; contains 0, closed under negation."""
    if not a.is_proper():
        raise DomainError("difference set is defined for proper sets only")
    n = a.n
    supp = a.support()
    return frozenset((x - y) % n for x in supp for y in supp)


# ---------------------------------------------------------------------------
# products in Z[X]/(X^N - 1)


def cyclic_product(a: MaskMultiset, b: MaskMultiset) -> MaskMultiset:
    """A(X)B(X) mod X^N - 1 as a multiset (convolution over Z_N)."""
    if a.ctx.n != b.ctx.n:
        raise DomainError("operands live in different groups")
    n = a.n
    out = [0] * n
    for i, ci in enumerate(a.coeffs):
        if ci:
            for j, cj in enumerate(b.coeffs):
                if cj:
                    out[(i + j) % n] += ci * cj
    return MaskMultiset(a.ctx, tuple(out))


def is_full_group_product(a: MaskMultiset, b: MaskMultiset) -> bool:
    """Exact test A(X)B(X) = 1 + X + ... + X^{N-1} mod X^N - 1.

    Implemented on packed integers: coefficients are carried in 16-bit lanes
    of one big int, so the whole convolution is a single integer multiply.
    Exact as long as every product coefficient stays below 2^16, which holds
    for all desk-scale masses.
    """
    if a.ctx.n != b.ctx.n:
        raise DomainError("operands live in different groups")
    n = a.n
    width = 16
    bound = 1 << width
    ma = sum(c for c in a.coeffs)
    mb = sum(c for c in b.coeffs)
    if ma * mb >= bound:  # lane overflow impossible at desk scale, fall back
        prod = cyclic_product(a, b)
        return all(c == 1 for c in prod.coeffs)
    pa = sum(c << (width * i) for i, c in enumerate(a.coeffs))
    pb = sum(c << (width * i) for i, c in enumerate(b.coeffs))
    raw = pa * pb
    lanes_mask = (1 << (width * n)) - 1
    folded = (raw & lanes_mask) + (raw >> (width * n))
    ones = sum(1 << (width * i) for i in range(n))
    return folded == ones
