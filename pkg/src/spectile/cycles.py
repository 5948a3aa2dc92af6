"""Vanishing sums of roots of unity over two-prime orders.

For N = p^m q^n, a nonnegative integer combination of N-th roots of unity
vanishes exactly when the underlying multiset is a disjoint union of p-cycles
and q-cycles (cosets of the subgroups of order p and q).  The decomposition
witness is a pair of base-point multisets (P, Q) with

    A(X) = P(X) Phi_p(X^{N/p}) + Q(X) Phi_q(X^{N/q})   mod X^N - 1,

both with nonnegative coefficients.  The decomposition is not unique; the
contract everywhere is "any witness satisfying the identity".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InvariantViolation, PreconditionError
from .zn import MaskMultiset, difference_set, dilate, restrict_class, vanishes_at


@dataclass(frozen=True)
class CycleDecomposition:
    p_part: MaskMultiset
    q_part: MaskMultiset
    prime_p: int
    prime_q: int

    def to_json(self):
        return {"p_part": list(self.p_part.coeffs), "q_part": list(self.q_part.coeffs)}

    def recompose(self) -> MaskMultiset:
        """Expand the cycle parts back into the original multiset."""
        ctx = self.p_part.ctx
        n = ctx.n
        out = [0] * n
        for base, mult in enumerate(self.p_part.coeffs):
            if mult:
                step = n // self.prime_p
                for i in range(self.prime_p):
                    out[(base + i * step) % n] += mult
        for base, mult in enumerate(self.q_part.coeffs):
            if mult:
                step = n // self.prime_q
                for i in range(self.prime_q):
                    out[(base + i * step) % n] += mult
        return MaskMultiset(ctx, tuple(out))


def lam_leung_decompose(a: MaskMultiset) -> CycleDecomposition:
    """Split a vanishing multiset into p- and q-cycles by backtracking peeling.

    The lowest-index positive coefficient must sit on some cycle; try the
    p-cycle through it, recurse, otherwise the q-cycle, otherwise backtrack.
    Existence is guaranteed for vanishing sums, so running out of the search
    space is an internal error, not an input error.
    """
    ctx = a.ctx
    p, _m, q, _n = ctx.prime_pair()
    n = ctx.n
    if not vanishes_at(a, n):
        raise PreconditionError("multiset does not vanish at a primitive root")
    coeffs = list(a.coeffs)
    step_p, step_q = n // p, n // q
    p_bases = [0] * n
    q_bases = [0] * n

    def peel(start):
        i = start
        while i < n and coeffs[i] == 0:
            i += 1
        if i == n:
            return True
        for prime, step, bases in ((p, step_p, p_bases), (q, step_q, q_bases)):
            idxs = [(i + j * step) % n for j in range(prime)]
            if all(coeffs[x] > 0 for x in idxs):
                for x in idxs:
                    coeffs[x] -= 1
                bases[i] += 1
                if peel(i):
                    return True
                bases[i] -= 1
                for x in idxs:
                    coeffs[x] += 1
        return False

    if not peel(0):
        raise InvariantViolation(
            "no cycle decomposition found for a vanishing sum; this is a bug"
        )
    dec = CycleDecomposition(
        MaskMultiset(ctx, tuple(p_bases)),
        MaskMultiset(ctx, tuple(q_bases)),
        p,
        q,
    )
    if dec.recompose().coeffs != a.coeffs:
        raise InvariantViolation("cycle decomposition does not recompose")
    # The nonzero-part clause is automatic: a decomposition with P = 0 forces
    # A(zeta_N^{p^k}) = 0 for every k, so a surviving dilation root certifies
    # P != 0 in any witness.  Checked defensively all the same.
    for prime, part, mexp in ((p, dec.p_part, _m), (q, dec.q_part, _n)):
        if part.is_empty():
            for k in range(1, mexp + 1):
                if not vanishes_at(dilate(a, prime**k), n):
                    raise InvariantViolation(
                        "empty cycle part contradicts a surviving dilation root"
                    )
    return dec


def is_cycle_union(a: MaskMultiset, r: int) -> bool:
    """Whether the multiset is a union of r-cycles: invariance under +N/r."""
    ctx = a.ctx
    if r not in ctx.primes:
        raise DomainError(f"{r} is not a prime divisor of {ctx.n}")
    step = ctx.n // r
    return all(a.coeffs[i] == a.coeffs[(i + step) % ctx.n] for i in range(ctx.n))


def ma_lemma_check(a: MaskMultiset, p: int) -> bool:
    """Hypothesis test for the full-power vanishing criterion.

    Returns whether A(zeta_d) = 0 for every divisor d of N that is a multiple
    of the maximal power p^m || N.  When the hypothesis holds, the multiset is
    asserted to be a union of p-cycles (guaranteed for nonnegative
    coefficients); an assertion failure is a bug.
    """
    ctx = a.ctx
    m = ctx.valuation(p)
    if m == 0:
        raise DomainError(f"{p} does not divide {ctx.n}")
    pm = p**m
    hypothesis = all(
        vanishes_at(a, d) for d in ctx.divisors if d % pm == 0
    )
    if hypothesis and not a.is_empty():
        if not is_cycle_union(a, p):
            raise InvariantViolation(
                "full-power vanishing did not force a p-cycle union"
            )
    return hypothesis


def _class_on_single_cycle(support, n, step):
    """All elements congruent mod step (the cycle of size n//step through them)."""
    return all((x - support[0]) % step == 0 for x in support)


def preroothunt_check(a: MaskMultiset):
    """Look for a class mod N/pq not supported on a single p- or q-cycle.

    Returns a witness pair (x, y) of elements of A with x - y of order pq
    (gcd exactly N/pq) when some class j + (N/pq)Z_N is spread over several
    cycles, and None when every class sits inside one cycle.
    """
    ctx = a.ctx
    p, _m, q, _n = ctx.prime_pair()
    n = ctx.n
    d = n // (p * q)
    step_p, step_q = n // p, n // q
    for j in range(d):
        cls = restrict_class(a, j, d) if d > 1 else a
        supp = cls.support()
        if len(supp) < 2:
            continue
        if _class_on_single_cycle(supp, n, step_p):
            continue
        if _class_on_single_cycle(supp, n, step_q):
            continue
        for x in supp:
            for y in supp:
                if math.gcd((x - y) % n, n) == d:
                    return (x, y)
        raise InvariantViolation(
            "spread class without a difference of order pq; this is a bug"
        )
    return None


def roothunt_check(a: MaskMultiset, d: int):
    """Divisor-hunting step: a dilation collapse plus a surviving root yields
    a difference of order pqd.

    Hypothesis: d | N/q, the multiset (qd).A is a union of p-cycles, and
    A(zeta_N^d) != 0 (evaluated as the dilation d.A not vanishing at a
    primitive root).  When it holds, returns pqd after verifying that A - A
    meets the divisor class (N/pqd) Z_N^*; returns None when it fails.
    """
    ctx = a.ctx
    p, _m, q, _n = ctx.prime_pair()
    n = ctx.n
    if d < 1 or (n // q) % d != 0:
        raise DomainError(f"{d} does not divide N/q = {n // q}")
    if not is_cycle_union(dilate(a, q * d), p):
        return None
    if vanishes_at(dilate(a, d), n):
        return None
    pqd = p * q * d
    if n % pqd != 0:
        raise InvariantViolation(
            "hypothesis held although pqd does not divide N; this is a bug"
        )
    target = n // pqd
    diffs = difference_set(a) if a.is_proper() else _multiset_diffs(a)
    if not any(math.gcd(x, n) == target for x in diffs):
        raise InvariantViolation(
            "no difference of the predicted order despite a true hypothesis"
        )
    return pqd


def _multiset_diffs(a: MaskMultiset):
    supp = a.support()
    n = a.n
    return frozenset((x - y) % n for x in supp for y in supp)
