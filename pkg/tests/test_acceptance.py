"""Acceptance criteria 1 to 9, one test each.

Every test records a ``criterion N: PASS|FAIL`` line; the lines are printed
together at the end of the pytest run (and inline when run with ``-s``).
"""

from __future__ import annotations

import time
from itertools import combinations
from math import factorial

import pytest

from finflow.amenability import is_extremely_amenable_finite, ordered_rigidity_check, preserves_linear_order
from finflow.canon import canonical_form
from finflow.catalog import catalog_instances, load_catalog, subgroups
from finflow.cli import run
from finflow.cache import Cache
from finflow.dynamics import GroupAction, is_minimal, minimal_flow_check_NO, order_action
from finflow.embeddings import enumerate_copies
from finflow.fraisse import SETS, SHIPPED_CLASSES, fraisse_grid
from finflow.orders import (
    ALL_ORDERS_ON_SETS,
    NATURAL_BA,
    NATURAL_VS2,
    ORDERED_GRAPHS,
    all_linear_orders,
    check_order_forgetful,
    natural_order_vs,
    natural_orders_boolean,
    natural_ranking_boolean,
)
from finflow.perm import symmetric_group
from finflow.ramsey import arrow_holds, minimal_arrow_witness
from finflow.samuel import SubgroupFamily, verify_instance
from finflow.structures import boolean_algebra, pure_set, vector_space
from oracles import arrow_bruteforce_sets, binomial, gaussian_binomial, graph_isomorphic_bruteforce, stirling2


@pytest.fixture
def record(request):
    def _record(n: int, ok: bool, detail: str) -> None:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        request.config.acceptance_lines.append(line)
        assert ok, line
    return _record


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


# --- 1. Ramsey arrows ------------------------------------------------------------------

def test_criterion_1_ramsey_arrows(record):
    S6, S5, S3, S2 = pure_set(6), pure_set(5), pure_set(3), pure_set(2)
    pos, t_pos = timed(lambda: arrow_holds(S6, S3, S2, 2, attest=True))
    neg, t_neg = timed(lambda: arrow_holds(S5, S3, S2, 2))
    holds, lex_least = arrow_bruteforce_sets(5, 3, 2, 2)
    witness, t_min = timed(lambda: minimal_arrow_witness(SETS, S3, S2, 2))
    ok = (pos.positive and pos.revalidate() and t_pos <= 60
          and not neg.positive and neg.revalidate() and t_neg <= 60
          and not holds and tuple(neg.bad_coloring.colors) == lex_least
          and witness is not None and witness.n == 6 and t_min <= 60)
    record(1, ok, f"6->(3)^2_2 {pos.verdict} in {t_pos:.2f}s, 5 {neg.verdict} in {t_neg:.2f}s "
                  f"(brute force agrees: {not holds}), minimal witness size {witness.n if witness else None}")


# --- 2. Counting oracles ---------------------------------------------------------------

def test_criterion_2_counting(record):
    bad = []
    for n in range(0, 9):
        for k in range(0, n + 1):
            if len(enumerate_copies(pure_set(k), pure_set(n))) != binomial(n, k):
                bad.append(("set", n, k))
    for m in range(1, 6):
        for mm in range(1, m + 1):
            if len(enumerate_copies(boolean_algebra(mm), boolean_algebra(m))) != stirling2(m, mm):
                bad.append(("ba", m, mm))
    for p in (2, 3):
        for d in range(0, 5):
            for e in range(0, d + 1):
                if len(enumerate_copies(vector_space(e, p), vector_space(d, p))) != gaussian_binomial(d, e, p):
                    bad.append(("vs", p, d, e))
    record(2, not bad, f"binomial n<=8, Stirling m<=5, Gaussian p in (2,3) d<=4; mismatches {bad}")


# --- 3. Fraisse grid -------------------------------------------------------------------

def test_criterion_3_fraisse_grid(record):
    failed, counts = [], {}
    start = time.perf_counter()
    for name, K in SHIPPED_CLASSES.items():
        reports = fraisse_grid(K)
        counts[name] = sum(r.instances for r in reports)
        failed += [(name, r.axiom) for r in reports if not r.ok]
    record(3, not failed, f"{len(SHIPPED_CLASSES)} classes at their bounds, "
                          f"{sum(counts.values())} instances in {time.perf_counter() - start:.1f}s; failures {failed}")


# --- 4. Order expansion ----------------------------------------------------------------

def test_criterion_4_order_expansion(record):
    problems = []
    for m in range(1, 5):
        nat = natural_orders_boolean(boolean_algebra(m))
        if len(nat) != factorial(m):
            problems.append(f"B({m}) has {len(nat)} natural orders")
        if len({canonical_form(T).encoding for T in nat}) != 1:
            problems.append(f"B({m}) natural orders not pairwise isomorphic")
    og = check_order_forgetful(ORDERED_GRAPHS, 3)
    if og.order_forgetful:
        problems.append("ordered graphs reported order forgetful")
    else:
        X, Y = og.counterexample
        if (X.n != 3 or graph_isomorphic_bruteforce(3, X.edges(), Y.edges()) is None
                or graph_isomorphic_bruteforce(3, X.edges(), Y.edges(), X.order, Y.order) is not None):
            problems.append("ordered-graph witness does not revalidate")
    chains = check_order_forgetful(ALL_ORDERS_ON_SETS, 6)
    if not chains.order_forgetful:
        problems.append("chains over sets not order forgetful")
    record(4, not problems, f"m! natural orders for m<=4, ordered-graph 3-vertex witness, "
                            f"chains forgetful ({chains.pairs_checked} pairs); problems {problems}")


# --- 5. Minimality equivalence ---------------------------------------------------------

def minimality_suite():
    out = []
    for n in range(1, 5):
        G = symmetric_group(n)
        out.append((f"S{n}/LO", order_action(G, all_linear_orders(n))))
    for name, G in load_catalog():
        if G.degree > 6:
            continue
        out.append((f"{name}/points", GroupAction.from_function(G, list(range(G.degree)), lambda g, x: g[x])))
        pairs = list(combinations(range(G.degree), 2))
        if pairs:
            out.append((f"{name}/pairs", GroupAction.from_function(
                G, pairs, lambda g, p: tuple(sorted((g[p[0]], g[p[1]]))))))
        if G.degree <= 4:
            out.append((f"{name}/LO", order_action(G, all_linear_orders(G.degree))))
    return out


def test_criterion_5_minimality_equivalence(record):
    suite = minimality_suite()
    disagree, minimal = [], 0
    for name, action in suite:
        rep = is_minimal(action)
        if len(set(rep.criteria.values())) != 1 or rep.verdict != (len(action.orbits()) == 1):
            disagree.append(name)
        minimal += rep.verdict
    ok = len(suite) >= 20 and not disagree and 0 < minimal < len(suite)
    record(5, ok, f"{len(suite)} actions ({minimal} minimal, {len(suite) - minimal} not); disagreements {disagree}")


# --- 6. Minimal flows on normal orders --------------------------------------------------

def test_criterion_6_no_flows(record):
    cases = [(f"set({n})", pure_set(n), ALL_ORDERS_ON_SETS) for n in range(1, 6)]
    cases += [(f"B({m})", boolean_algebra(m), NATURAL_BA) for m in range(1, 5)]
    cases += [(f"F2^{d}", vector_space(d, 2), NATURAL_VS2) for d in range(1, 4)]
    failing, attained = [], True
    for label, S, K in cases:
        rep = minimal_flow_check_NO(S, K)
        if not rep.ok:
            v = rep.violations[0] if rep.violations else None
            failing.append(f"{label} (minimal={rep.minimality.verdict}, {len(rep.violations)} violations, "
                           f"first bound {v['bound'] if v else None} > index {v['index'] if v else None})")
        if K is ALL_ORDERS_ON_SETS:
            # on sets the index is |A|! and some return set attains it
            attained &= all(row["index"] == factorial(len(row["subuniverse"])) == row["max_bound"]
                            for row in rep.per_subuniverse)
    ok = not failing and attained
    record(6, ok, f"{len(cases)} structures; sets attain |A|!: {attained}; failing {failing}")


# --- 7. Samuel suite -------------------------------------------------------------------

def test_criterion_7_samuel_sweep(record):
    keys = ("boolean", "left_invariant", "associative", "matches_quotient",
            "stone_of_maximal_is_ideal", "ret_correspondence")
    start = time.perf_counter()
    count, bad, embedded = 0, [], 0
    for name, G, fam in catalog_instances(12):
        N = SubgroupFamily(G, fam)
        res = verify_instance(G, N)
        count += 1
        if not all(res[k] for k in keys):
            bad.append((name, res["family"]))
        if len(N.core) == 1:
            embedded += 1
            if res["embedding_ok"] is not True:
                bad.append((name, res["family"], "embedding"))
    elapsed = time.perf_counter() - start
    ok = count == 482 and not bad and elapsed <= 300
    record(7, ok, f"{count} instances ({embedded} embedded into Sym) in {elapsed:.1f}s; failures {bad[:5]}")


# --- 8. Rigidity and amenability -------------------------------------------------------

def test_criterion_8_rigidity_amenability(record):
    rigid = [ordered_rigidity_check(boolean_algebra(m, natural_ranking_boolean(m, range(m)))) for m in range(1, 5)]
    rigid += [ordered_rigidity_check(natural_order_vs(vector_space(d, p), [p ** i for i in range(d)]))
              for p in (2, 3) for d in range(1, 4)]
    agree = all(is_extremely_amenable_finite(G).verdict == (G.order == 1) for _, G in load_catalog())
    orders_absent, checked = True, 0
    for n in range(1, 6):
        Sn = symmetric_group(n)
        for V in subgroups(Sn):
            if len(V) > 1:
                checked += 1
                orders_absent &= preserves_linear_order(Sn.subgroup(Sn.elements[i] for i in V)) is None
    ok = all(rigid) and agree and orders_absent
    record(8, ok, f"{len(rigid)} natural structures rigid: {all(rigid)}; catalog criteria agree: {agree}; "
                  f"no preserved order on {checked} nontrivial subgroups of S_n, n<=5: {orders_absent}")


# --- 9. Determinism and cache ----------------------------------------------------------

DETERMINISM_JOBS = [
    {"command": "ramsey", "params": {"kind": "set", "c": 5, "b": 3, "a": 2, "k": 2}},
    {"command": "ramsey", "params": {"kind": "set", "c": 6, "b": 3, "a": 2, "k": 2}},
    {"command": "ramsey", "params": {"kind": "set", "b": 3, "a": 2, "k": 2, "bound": 7}},
    {"command": "fraisse", "params": {"class": "graphs", "bound": 3}},
    {"command": "orders", "params": {"class": "ordered-graphs", "bound": 3}},
    {"command": "flow", "params": {"kind": "boolean", "c": 3}},
    {"command": "samuel", "params": {"group": "D4"}},
    {"command": "amenable", "params": {"group": "A4"}},
]


def test_criterion_9_determinism(tmp_path, record):
    problems = []
    for job in DETERMINISM_JOBS:
        outs = {run({**job, "workers": w})[0] for w in (1, 2, 1)}
        if len(outs) != 1:
            problems.append(f"{job['command']} varies across runs")
        cache = Cache(tmp_path)
        first, hit1 = run(job, cache)
        second, hit2 = run({**job, "workers": 2}, cache)
        if hit1 or not hit2 or first != second or first not in outs:
            problems.append(f"{job['command']} cache hit differs")
    record(9, not problems, f"{len(DETERMINISM_JOBS)} jobs x workers (1,2,1) and cache round trip; problems {problems}")
