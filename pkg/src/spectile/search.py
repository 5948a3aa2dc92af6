"""Exhaustive and budgeted combinatorial search over subsets of Z_N.

Three layers:

  * canonical enumeration: one representative per translation orbit (or per
    affine orbit when requested), namely the lexicographically least translate
    containing 0.  Representatives are recognized through their circular gap
    sequences: the lex-least translate corresponds exactly to the lex-minimal
    rotation of the gap word, so the test is a rotation scan with early exit.

  * witness searches: spectra are cliques of size |A| (containing 0) in the
    graph on {0} union Z(A) with edges x ~ y iff x - y lies in Z(A); tiling
    complements are exact covers built by always covering the first uncovered
    cell.  Both searches are exhaustive within a node budget and distinguish
    "none" (full exhaustion) from "unknown" (budget ran out).

  * the survey: classify every canonical set of a group as spectral / tile /
    both / neither, with witnesses re-verified and exhaustion certificates
    recorded, and collect any spectral non-tile with its full diagnostics.

Sets are bitmasks in the hot paths; all arithmetic stays exact.
"""

from __future__ import annotations

import json
import math
import os
import random
import tempfile
import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from multiprocessing import get_context

from . import cm, pairs
from .errors import DomainError, InvariantViolation
from .zn import (
    MaskMultiset,
    _cyclo_divides,
    factorize,
    group,
    zero_set,
)

DEFAULT_NODE_BUDGET = 500_000


# ---------------------------------------------------------------------------
# canonical representatives


def _gaps(rep, n):
    k = len(rep)
    return tuple(rep[i + 1] - rep[i] for i in range(k - 1)) + (n - rep[-1],)


def _rep_from_gaps(gaps):
    out = [0]
    for g in gaps[:-1]:
        out.append(out[-1] + g)
    return tuple(out)


def _is_min_rotation(g):
    # lex-minimal among all rotations; ties (periodic words) still canonical
    k = len(g)
    g0 = g[0]
    for x in g:
        if x < g0:
            return False
    for r in range(1, k):
        for i in range(k):
            a = g[(r + i) % k]
            b = g[i]
            if a != b:
                if a < b:
                    return False
                break
    return True


def _min_rotation(g):
    k = len(g)
    best = g
    for r in range(1, k):
        cand = g[r:] + g[:r]
        if cand < best:
            best = cand
    return best


@lru_cache(maxsize=None)
def _units(n):
    if n == 1:
        return (0,)
    return tuple(u for u in range(1, n) if math.gcd(u, n) == 1)


def affine_canonical_form(rep, n):
    """Lex-least translate-containing-0 over all unit dilations of the set."""
    best = None
    for u in _units(n):
        s = tuple(sorted((u * x) % n for x in rep))
        cand = _min_rotation(_gaps(s, n))
        if best is None or cand < best:
            best = cand
    return _rep_from_gaps(best)


def translation_canonical_form(rep, n):
    s = tuple(sorted(x % n for x in rep))
    if 0 not in s:
        s = tuple(sorted((x - s[0]) % n for x in s))
    return _rep_from_gaps(_min_rotation(_gaps(s, n)))


def canonical_sets(n, size=None, affine=False):
    """Yield canonical subsets of Z_n (sorted tuples containing 0).

    Exactly one representative per translation orbit (per affine orbit when
    affine=True), in lexicographic order within each size.
    """
    sizes = [size] if size is not None else range(1, n + 1)
    for k in sizes:
        if k < 1 or k > n:
            continue
        yield from _canonical_of_size(n, k, affine)


def _canonical_of_size(n, k, affine, first=None):
    if k == 1:
        if first is None:
            yield (0,)
        return
    if first is None:
        firsts = range(1, n - k + 2)
    else:
        firsts = [first]
    for a1 in firsts:
        for combo in combinations(range(a1 + 1, n), k - 2):
            rep = (0, a1) + combo
            g = _gaps(rep, n)
            if not _is_min_rotation(g):
                continue
            if affine and affine_canonical_form(rep, n) != rep:
                continue
            yield rep


def _euler_phi(n):
    out = n
    for p, _ in factorize(n):
        out -= out // p
    return out


def orbit_count(n, size=None, affine=False):
    """Number of orbits of nonempty subsets (or of size-k subsets) by Burnside."""
    if not affine:
        if size is None:
            total = sum(
                _euler_phi(n // g) * (2**g) for g in _divisors_of(n)
            )
            return total // n - 1  # drop the empty set's orbit
        acc = 0
        for g in _divisors_of(n):
            if (size * g) % n == 0:
                acc += _euler_phi(n // g) * math.comb(g, size * g // n)
        return acc // n
    perms = []
    for u in _units(n):
        for v in range(n):
            perms.append(_cycle_lengths(n, u, v))
    order = len(perms)
    if size is None:
        total = sum(2 ** len(cl) for cl in perms)
        return total // order - 1
    acc = 0
    for cl in perms:
        poly = [1]
        for length in cl:
            new = poly + [0] * length
            for i, c in enumerate(poly):
                new[i + length] += c
            poly = new[: size + 1] + new[size + 1 :]
        if size < len(poly):
            acc += poly[size]
    return acc // order


def _divisors_of(n):
    out = [1]
    for p, e in factorize(n):
        out = [d * p**i for d in out for i in range(e + 1)]
    return sorted(out)


def _cycle_lengths(n, u, v):
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = (u * x + v) % n
            length += 1
        out.append(length)
    return out


# ---------------------------------------------------------------------------
# witness searches


@dataclass(frozen=True)
class SearchOutcome:
    verdict: str  # "found" | "none" | "unknown"
    witness: MaskMultiset | None
    nodes: int
    budget: int

    def to_json(self):
        return {
            "verdict": self.verdict,
            "witness": sorted(self.witness.support()) if self.witness else None,
            "nodes": self.nodes,
            "budget": self.budget,
        }


class _OutOfBudget(Exception):
    pass


def _rot(mask, t, n, full):
    t %= n
    return ((mask << t) | (mask >> (n - t))) & full if t else mask


def find_spectrum(a: MaskMultiset, budget=DEFAULT_NODE_BUDGET, _vd=None) -> SearchOutcome:
    """Search for a spectrum of A as a |A|-clique containing 0.

    Vertices are the residues of Z(A) plus 0; translation invariance makes
    the restriction to cliques through 0 lossless.  Vertices are visited in
    order of increasing degree; a branch dies as soon as the remaining
    candidates cannot complete the clique.
    """
    if a.is_empty() or not a.is_proper():
        raise DomainError("spectrum search needs a nonempty proper set")
    n = a.n
    k = a.mass()
    if k == 1:
        return SearchOutcome("found", MaskMultiset.from_elements(a.ctx, [0]), 0, budget)
    za = zero_set(a) if _vd is None else _vd
    verts = sorted(za.residues())
    if 1 + len(verts) < k:
        return SearchOutcome("none", None, 0, budget)
    full = (1 << n) - 1
    zmask = 0
    for x in verts:
        zmask |= 1 << x
    adj = {v: _rot(zmask, v, n, full) & zmask for v in verts}
    order = sorted(verts, key=lambda v: (bin(adj[v]).count("1"), v))
    pos_of = {v: i for i, v in enumerate(order)}
    nverts = len(order)
    adj_pos = [0] * nverts
    for v in verts:
        m = 0
        w = adj[v]
        while w:
            low = w & -w
            m |= 1 << pos_of[low.bit_length() - 1]
            w ^= low
        adj_pos[pos_of[v]] = m
    nodes = 0
    chosen = []

    def expand(pmask, size):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _OutOfBudget
        while pmask:
            if size + bin(pmask).count("1") < k:
                return False
            low = pmask & -pmask
            i = low.bit_length() - 1
            pmask ^= low
            chosen.append(order[i])
            if size + 1 == k:
                return True
            if expand(pmask & adj_pos[i], size + 1):
                return True
            chosen.pop()
        return False

    start = (1 << nverts) - 1
    try:
        found = expand(start, 1)
    except _OutOfBudget:
        return SearchOutcome("unknown", None, nodes, budget)
    if not found:
        return SearchOutcome("none", None, nodes, budget)
    witness = MaskMultiset.from_elements(a.ctx, [0] + chosen)
    check = pairs.verify_spectral_pair(a, witness)
    if not check.ok:
        raise InvariantViolation("clique search produced a non-spectrum")
    return SearchOutcome("found", witness, nodes, budget)


def _tiling_backtrack(a: MaskMultiset, budget, want_all):
    n = a.n
    size = a.mass()
    full = (1 << n) - 1
    amask = a.mask()
    elems = a.support()
    placements = [_rot(amask, t, n, full) for t in range(n)]
    sols = []
    nodes = 0

    def rec(covered, chosen):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise _OutOfBudget
        if covered == full:
            sols.append(tuple(chosen))
            return not want_all
        c = (~covered & full)
        c = (c & -c).bit_length() - 1  # first uncovered cell
        for aa in elems:
            t = (c - aa) % n
            pm = placements[t]
            if pm & covered == 0:
                chosen.append(t)
                if rec(covered | pm, chosen):
                    return True
                chosen.pop()
        return False

    exhausted = True
    try:
        rec(placements[0], [0])
    except _OutOfBudget:
        exhausted = False
    return sols, exhausted, nodes


def find_tiling_complement(a: MaskMultiset, budget=DEFAULT_NODE_BUDGET) -> SearchOutcome:
    """Backtracking exact-cover search for a complement T containing 0."""
    if a.is_empty() or not a.is_proper():
        raise DomainError("tiling search needs a nonempty proper set")
    n = a.n
    if n % a.mass() != 0:
        return SearchOutcome("none", None, 0, budget)
    sols, exhausted, nodes = _tiling_backtrack(a, budget, want_all=False)
    if sols:
        witness = MaskMultiset.from_elements(a.ctx, sorted(sols[0]))
        check = pairs.verify_tiling_pair(a, witness)
        if not check.ok:
            raise InvariantViolation("cover search produced a non-complement")
        return SearchOutcome("found", witness, nodes, budget)
    if exhausted:
        return SearchOutcome("none", None, nodes, budget)
    return SearchOutcome("unknown", None, nodes, budget)


def enumerate_tiling_complements(a: MaskMultiset, budget=DEFAULT_NODE_BUDGET):
    """All complements of A containing 0.  Returns (witness list, exhausted, nodes)."""
    if a.is_empty() or not a.is_proper():
        raise DomainError("tiling search needs a nonempty proper set")
    n = a.n
    if n % a.mass() != 0:
        return [], True, 0
    sols, exhausted, nodes = _tiling_backtrack(a, budget, want_all=True)
    out = [MaskMultiset.from_elements(a.ctx, sorted(s)) for s in sols]
    for t in out:
        if not pairs.verify_tiling_pair(a, t).ok:
            raise InvariantViolation("cover search produced a non-complement")
    return out, exhausted, nodes


# ---------------------------------------------------------------------------
# the survey


@dataclass
class SurveyOptions:
    sizes: tuple | None = None
    affine: bool = False
    node_budget: int = DEFAULT_NODE_BUDGET
    per_size_limit: int | None = None
    seed: int = 0
    threads: int = 1
    dual_certify: bool = True
    collect_records: bool = True
    max_n: int = 40
    cursor_dir: str | None = None
    progress: bool = False

    def fingerprint(self):
        return json.dumps(
            {
                "sizes": sorted(self.sizes) if self.sizes else None,
                "affine": self.affine,
                "node_budget": self.node_budget,
                "per_size_limit": self.per_size_limit,
                "seed": self.seed,
                "dual_certify": self.dual_certify,
            },
            sort_keys=True,
        )


@dataclass
class SurveyResult:
    records: list | None
    summary: dict


def _shape_forces_structure(ctx):
    # orders with at most two distinct primes, or with at most one repeated
    # prime, provably admit no tile that fails the structure conditions
    if len(ctx.factorization) <= 2:
        return True
    return sum(1 for _, e in ctx.factorization if e > 1) <= 1


def classify_set(rep, n, node_budget=DEFAULT_NODE_BUDGET, dual_certify=True):
    """Full classification of one canonical set; returns a JSON-able record."""
    ctx = group(n)
    a = MaskMultiset.from_elements(ctx, rep)
    vd = frozenset(
        d for d in ctx.divisors if d > 1 and _cyclo_divides(d, _fold_rep(rep, d))
    )
    cm_report = cm.check_t1t2(a, _vd=vd)
    record = {
        "type": "record",
        "n": n,
        "set": list(rep),
        "size": len(rep),
        "vanishing_divisors": sorted(vd),
        "cm": cm_report.to_json(),
        "dual_spectrum": None,
        "f_member": False,
        "diagnostics": None,
    }
    if cm_report.ok:
        t = cm.build_tiling_complement_cm(a)
        b = cm.build_laba_spectrum(a)
        record["spectral"] = {
            "verdict": "found",
            "witness": sorted(b.support()),
            "nodes": 0,
        }
        record["tile"] = {"verdict": "found", "witness": sorted(t.support()), "nodes": 0}
        if dual_certify:
            record["dual_spectrum"] = _dual_certified_spectrum(a, t)
        return record
    spectral = find_spectrum(a, node_budget)
    tile = find_tiling_complement(a, node_budget)
    if tile.verdict == "found" and _shape_forces_structure(ctx):
        raise InvariantViolation(
            f"tile {rep} of Z_{n} fails the structure conditions; impossible"
        )
    record["spectral"] = spectral.to_json()
    record["tile"] = tile.to_json()
    if tile.verdict == "found" and dual_certify:
        record["dual_spectrum"] = _dual_certified_spectrum(a, tile.witness)
    if spectral.verdict == "found" and tile.verdict == "none":
        record["f_member"] = True
        record["diagnostics"] = _f_diagnostics(a, spectral.witness)
    return record


def _fold_rep(rep, d):
    out = [0] * d
    for x in rep:
        out[x % d] += 1
    return tuple(out)


def _dual_certified_spectrum(a, t):
    try:
        _, b = cm.tiling_implies_spectral(a, t)
        return {"route": "dilation_reduction", "spectrum": sorted(b.support())}
    except DomainError:
        # two repeated primes: certify through the structure conditions instead
        report = cm.check_t1t2(a)
        if not report.ok:
            raise InvariantViolation(
                "tile fails structure conditions during dual certification"
            ) from None
        b = cm.build_laba_spectrum(a)
        return {"route": "structure_conditions", "spectrum": sorted(b.support())}


def _f_diagnostics(a, b):
    check = pairs.verify_spectral_pair(a, b)
    if not check.ok:
        raise InvariantViolation("recorded spectrum failed re-verification")
    pair = check.pair
    out = {
        "primitive_a": pairs.is_primitive(a),
        "primitive_b": pairs.is_primitive(b),
    }
    if len(a.ctx.factorization) == 2:
        out["profile"] = pairs.root_profile(pair).to_json()
        out["symmetry"] = pairs.symmetry_check(pair)
        out["deficits"] = pairs.deficit_bounds_check(pair)
        out["roots_panel"] = pairs.required_roots_panel(pair)
    return out


def _sample_reps(n, k, limit, seed, affine):
    rng = random.Random(f"{seed}:{n}:{k}")
    reps = set()
    attempts = 0
    cap = 200 * limit + 1000
    while len(reps) < limit and attempts < cap:
        attempts += 1
        if k == 1:
            reps.add((0,))
            break
        picks = rng.sample(range(1, n), k - 1)
        rep = translation_canonical_form(tuple([0] + sorted(picks)), n)
        if affine:
            rep = affine_canonical_form(rep, n)
        reps.add(rep)
    return sorted(reps)


def _plan_tasks(n, opts: SurveyOptions):
    sizes = sorted(opts.sizes) if opts.sizes else list(range(1, n + 1))
    tasks = []
    for k in sizes:
        if k < 1 or k > n:
            continue
        total = orbit_count(n, k, opts.affine)
        if opts.per_size_limit is not None and total > opts.per_size_limit:
            reps = _sample_reps(n, k, opts.per_size_limit, opts.seed, opts.affine)
            tasks.append(("list", k, tuple(reps)))
        elif k == 1:
            tasks.append(("enum", k, None))
        else:
            for a1 in range(1, n - k + 2):
                tasks.append(("enum", k, a1))
    return tasks


def _task_key(task):
    kind, k, extra = task
    return (k, 0 if extra is None else (extra if kind == "enum" else -1), kind)


def _run_task(args):
    n, task, node_budget, dual_certify, affine, spool_dir, task_id = args
    kind, k, extra = task
    if kind == "enum":
        reps = _canonical_of_size(n, k, affine, first=extra)
    else:
        reps = extra
    records = []
    agg = {
        "task_id": task_id,
        "size": k,
        "count": 0,
        "spectral": 0,
        "tiles": 0,
        "cm_pass": 0,
        "f_members": [],
        "unresolved": [],
        "nonprimitive_spectral_cm": [],
    }
    sink_path = None
    fh = None
    if spool_dir is not None:
        sink_path = os.path.join(spool_dir, f"task-{task_id:06d}.jsonl")
        fh = open(sink_path, "w", encoding="utf-8")
    try:
        for rep in reps:
            rec = classify_set(rep, n, node_budget, dual_certify)
            agg["count"] += 1
            if rec["cm"]["t1"] and rec["cm"]["t2"]:
                agg["cm_pass"] += 1
            if rec["spectral"]["verdict"] == "found":
                agg["spectral"] += 1
            if rec["tile"]["verdict"] == "found":
                agg["tiles"] += 1
            if rec["f_member"]:
                agg["f_members"].append(list(rep))
            if "unknown" in (rec["spectral"]["verdict"], rec["tile"]["verdict"]):
                agg["unresolved"].append(list(rep))
            if rec["spectral"]["verdict"] == "found":
                ctx = group(n)
                a = MaskMultiset.from_elements(ctx, rep)
                if not pairs.is_primitive(a):
                    ok = rec["cm"]["t1"] and rec["cm"]["t2"]
                    agg["nonprimitive_spectral_cm"].append(bool(ok))
            if fh is not None:
                fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")))
                fh.write("\n")
            else:
                records.append(rec)
    finally:
        if fh is not None:
            fh.close()
    agg["spool"] = sink_path
    return task_id, agg, records if spool_dir is None else None


def fuglede_survey(ctx, options: SurveyOptions | None = None, record_sink=None) -> SurveyResult:
    """Classify every canonical subset of Z_N and certify the spectral/tile split.

    Records flow to record_sink (or into the returned list) in a deterministic
    order independent of worker scheduling: tasks are sharded by (size, first
    element), results merged in task order.  Budget exhaustion on any set
    downgrades the summary to incomplete and lists the unresolved sets.
    """
    opts = options or SurveyOptions()
    n = ctx.n
    if n > opts.max_n:
        raise DomainError(f"order {n} beyond the configured feasibility bound {opts.max_n}")
    t0 = time.time()
    tasks = _plan_tasks(n, opts)
    task_order = sorted(range(len(tasks)), key=lambda i: _task_key(tasks[i]))
    want_spool = opts.threads > 1 and (record_sink is not None or opts.collect_records)
    spool_dir = None
    cleanup_spool = False
    manifest = {}
    if opts.cursor_dir is not None:
        os.makedirs(opts.cursor_dir, exist_ok=True)
        spool_dir = opts.cursor_dir
        manifest_path = os.path.join(spool_dir, "manifest.json")
        if os.path.exists(manifest_path):
            with open(manifest_path, encoding="utf-8") as fh:
                old = json.load(fh)
            if old.get("n") == n and old.get("fingerprint") == opts.fingerprint():
                manifest = {int(k): v for k, v in old.get("tasks", {}).items()}
    elif want_spool:
        spool_dir = tempfile.mkdtemp(prefix="spectile-survey-")
        cleanup_spool = True

    pending = []
    for tid in task_order:
        if tid in manifest:
            continue
        pending.append(
            (n, tasks[tid], opts.node_budget, opts.dual_certify, opts.affine, spool_dir, tid)
        )

    inline_records = {}
    done = 0

    def note(tid, agg, recs):
        nonlocal done
        manifest[tid] = agg
        if recs is not None:
            inline_records[tid] = recs
        done += 1
        if opts.cursor_dir is not None:
            tmp = os.path.join(spool_dir, "manifest.json.tmp")
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(
                    {"n": n, "fingerprint": opts.fingerprint(), "tasks": manifest},
                    fh,
                )
            os.replace(tmp, os.path.join(spool_dir, "manifest.json"))
        if opts.progress:
            print(
                f"[survey n={n}] {done}/{len(pending)} tasks",
                flush=True,
                file=__import__("sys").stderr,
            )

    if opts.threads > 1 and len(pending) > 1:
        mp = get_context("fork")
        with mp.Pool(opts.threads) as pool:
            for tid, agg, recs in pool.imap_unordered(_run_task, pending, chunksize=1):
                note(tid, agg, recs)
    else:
        for args in pending:
            tid, agg, recs = _run_task(args)
            note(tid, agg, recs)

    records = [] if (opts.collect_records and record_sink is None) else None
    for tid in task_order:
        agg = manifest[tid]
        recs = None
        if tid in inline_records:
            recs = inline_records[tid]
        elif agg.get("spool"):
            with open(agg["spool"], encoding="utf-8") as fh:
                recs = [json.loads(line) for line in fh]
        if recs is None:
            continue
        for rec in recs:
            if record_sink is not None:
                record_sink(rec)
            elif records is not None:
                records.append(rec)

    per_size = {}
    for tid in task_order:
        agg = manifest[tid]
        k = agg["size"]
        slot = per_size.setdefault(
            k,
            {"surveyed": 0, "total": orbit_count(n, k, opts.affine), "spectral": 0, "tiles": 0, "cm_pass": 0},
        )
        slot["surveyed"] += agg["count"]
        slot["spectral"] += agg["spectral"]
        slot["tiles"] += agg["tiles"]
        slot["cm_pass"] += agg["cm_pass"]
    f_members = []
    unresolved = []
    nonprim = []
    for tid in task_order:
        f_members.extend(tuple(x) for x in manifest[tid]["f_members"])
        unresolved.extend(tuple(x) for x in manifest[tid]["unresolved"])
        nonprim.extend(manifest[tid]["nonprimitive_spectral_cm"])
    surveyed = sum(s["surveyed"] for s in per_size.values())
    total = sum(s["total"] for s in per_size.values())
    summary = {
        "type": "summary",
        "schema": "spectile.survey/1",
        "n": n,
        "affine": opts.affine,
        "seed": opts.seed,
        "node_budget": opts.node_budget,
        "per_size_limit": opts.per_size_limit,
        "orbits_surveyed": surveyed,
        "orbits_total": total,
        "per_size": {str(k): v for k, v in sorted(per_size.items())},
        "f_count": len(f_members),
        "f_members": [list(x) for x in sorted(f_members)],
        "unresolved": [list(x) for x in sorted(unresolved)],
        "nonprimitive_spectral_all_structured": all(nonprim) if nonprim else True,
        "complete": surveyed == total and not unresolved,
        "elapsed_s": round(time.time() - t0, 3),
    }
    if cleanup_spool and spool_dir:
        for name in os.listdir(spool_dir):
            os.unlink(os.path.join(spool_dir, name))
        os.rmdir(spool_dir)
    return SurveyResult(records, summary)
