"""Command-line front end.

Every invocation builds one job ``{"command", "params", "budgets", "workers"}``
from flags or a ``--job`` file, validates it against its schema, runs it and
prints exactly one JSON document (sorted keys) on stdout. Exit codes:

    0  definitive answer (including negative verdicts)
    2  validation error (bad flags, bad job, precondition failed)
    3  resource cap hit (node or time budget)
    4  internal check failed (a cross-check disagreed: a bug signal)
    5  I/O error (job file, cache directory)
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

from . import __version__
from .cache import ENV_VAR, Cache, IoError, canonical_json, make_key
from .canon import canonical_form
from .errors import FinflowError, InternalCheckFailed, ResourceCap, ValidationError
from .schemas import COMMANDS, KINDS, SCHEMA_VERSION, validate_job
from .structures import StructKind, standard

EXIT_OK, EXIT_VALIDATION, EXIT_RESOURCE, EXIT_INTERNAL, EXIT_IO = 0, 2, 3, 4, 5

DEFAULT_NODES = 10 ** 8
DEFAULT_SECS = 600.0

_KIND_MAP = {
    "set": StructKind.SET, "chain": StructKind.LINORDER, "graph": StructKind.GRAPH,
    "ordered-graph": StructKind.ORDERED_GRAPH, "boolean": StructKind.BOOLALG,
    "ordered-boolean": StructKind.ORDERED_BOOLALG, "vector": StructKind.VECSPACE,
    "ordered-vector": StructKind.ORDERED_VECSPACE,
}


# --- commands ------------------------------------------------------------------

def _structures(params: dict[str, Any]):
    kind = _KIND_MAP[params["kind"]]
    p = params.get("p", 2)
    return kind, p, [standard(kind, params[x], p) for x in ("c", "b", "a") if x in params]


def _run_ramsey(params, budgets, workers) -> tuple[dict[str, Any], dict[str, Any]]:
    from .fraisse import ClassDescriptor
    from .ramsey import arrow_holds, minimal_arrow_witness

    kind, p, _ = _structures(params)
    B, A = standard(kind, params["b"], p), standard(kind, params["a"], p)
    opts = dict(node_budget=budgets["nodes"], time_budget=budgets["secs"], workers=workers)
    out: dict[str, Any] = {}
    if "c" in params:
        C = standard(kind, params["c"], p)
    else:
        K = ClassDescriptor(kind, params["bound"], "natural" if kind.is_ordered and kind.family != "relational"
                            else None, p=p)
        C = minimal_arrow_witness(K, B, A, params["k"], params["bound"], **opts)
        out["minimal_witness"] = None if C is None else C.to_json()
        if C is None:
            return {"verdict": "none", "result": out}, {}
    cert = arrow_holds(C, B, A, params["k"], attest=True, **opts)
    if not cert.revalidate():
        raise InternalCheckFailed("certificate failed revalidation")
    out["certificate"] = cert.to_json()
    return {"verdict": cert.verdict.lower(), "result": out}, cert.stats.to_json()


def _run_fraisse(params, budgets, workers):
    from .fraisse import SHIPPED_CLASSES, fraisse_grid

    K = SHIPPED_CLASSES[params["class"]]
    axiom = params.get("axiom", "all")
    axioms = ("HD", "JEP", "AP") if axiom == "all" else (axiom,)
    reports = fraisse_grid(K, params.get("bound"), axioms)
    ok = all(r.ok for r in reports)
    return {"verdict": "pass" if ok else "fail", "result": [r.to_json() for r in reports]}, {}


def _run_orders(params, budgets, workers):
    from . import orders

    classes = {K.name: K for K in (orders.ALL_ORDERS_ON_SETS, orders.ORDERED_GRAPHS,
                                   orders.NATURAL_BA, orders.NATURAL_VS2, orders.NATURAL_VS3)}
    report = orders.check_order_forgetful(classes[params["class"]], params["bound"])
    return {"verdict": "pass" if report.order_forgetful else "fail", "result": report.to_json()}, {}


def _run_flow(params, budgets, workers):
    from .dynamics import is_minimal, minimal_flow_check_NO, order_action
    from .errors import BoundTooLarge
    from .orders import ALL_ORDERS_ON_SETS, NATURAL_BA, OrderClassK, all_linear_orders

    if "group" in params:
        G = _catalog_group(params["group"])
        if G.degree > 6:
            raise BoundTooLarge(f"degree {G.degree} above 6 for the action on linear orders")
        report = is_minimal(order_action(G, all_linear_orders(G.degree)))
        return {"verdict": "minimal" if report.verdict else "not minimal", "result": report.to_json()}, {}
    kind, p, (S,) = _structures({"kind": params["kind"], "c": params["c"], "p": params.get("p", 2)})
    if kind is StructKind.SET:
        K = ALL_ORDERS_ON_SETS
    elif kind is StructKind.BOOLALG:
        K = NATURAL_BA
    else:
        K = OrderClassK(StructKind.VECSPACE, "natural", p=p)
    report = minimal_flow_check_NO(S, K)
    return {"verdict": "pass" if report.ok else "fail", "result": report.to_json()}, {}


def _catalog_group(name: str):
    from .catalog import catalog_group

    try:
        return catalog_group(name)
    except KeyError as exc:
        raise ValidationError(str(exc.args[0])) from None


def _run_samuel(params, budgets, workers):
    from .catalog import valid_families
    from .samuel import SubgroupFamily, verify_instance

    G = _catalog_group(params["group"])
    families = valid_families(G)
    if "family" in params:
        if params["family"] >= len(families):
            raise ValidationError(f"{params['group']} has {len(families)} families")
        chosen = [params["family"]]
    else:
        chosen = range(len(families))
    results = []
    for i in chosen:
        res = verify_instance(G, SubgroupFamily(G, families[i]))
        res["family_index"] = i
        results.append(res)
    keys = ("boolean", "left_invariant", "associative", "matches_quotient",
            "stone_of_maximal_is_ideal", "ret_correspondence")
    ok = all(all(r[k] for k in keys) and r["embedding_ok"] in (True, None) for r in results)
    if not ok:
        raise InternalCheckFailed("a Samuel check failed")
    return {"verdict": "pass", "result": results}, {}


def _run_amenable(params, budgets, workers):
    from .amenability import is_extremely_amenable_finite

    report = is_extremely_amenable_finite(_catalog_group(params["group"]))
    return {"verdict": "extremely amenable" if report.verdict else "not extremely amenable",
            "result": report.to_json()}, {}


def _run_catalog(params, budgets, workers):
    from .catalog import load_catalog, valid_families

    if "group" in params:
        G = _catalog_group(params["group"])
        fams = [[sorted(V) for V in fam] for fam in valid_families(G)]
        return {"verdict": "ok", "result": {"group": params["group"], "order": G.order,
                                            "degree": G.degree,
                                            "elements": [list(g) for g in G.elements],
                                            "families": fams}}, {}
    rows = [{"name": name, "order": G.order, "degree": G.degree,
             "families": len(valid_families(G))} for name, G in load_catalog()]
    return {"verdict": "ok", "result": rows}, {}


RUNNERS = {"ramsey": _run_ramsey, "fraisse": _run_fraisse, "orders": _run_orders,
           "flow": _run_flow, "samuel": _run_samuel, "amenable": _run_amenable,
           "catalog": _run_catalog}


# --- jobs ----------------------------------------------------------------------

def cache_material(job: dict[str, Any]) -> dict[str, Any]:
    """Key material: everything that determines the output, nothing that does not."""
    material = {"tool": "finflow", "version": __version__, "schema": SCHEMA_VERSION,
                "command": job["command"], "params": job["params"]}
    if job["command"] == "ramsey":
        _, _, structs = _structures(job["params"])
        material["encodings"] = [canonical_form(S).hex for S in structs]
    return material


def run(job: dict[str, Any], cache: Cache | None = None) -> tuple[str, bool]:
    """Validate and run a job; return the JSON text and whether it came from the cache."""
    validate_job(job)
    budgets = {"nodes": DEFAULT_NODES, "secs": DEFAULT_SECS, **job.get("budgets", {})}
    key = make_key(cache_material(job)) if cache is not None else None
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return json.dumps(hit.value, sort_keys=True), True
    body, stats = RUNNERS[job["command"]](job["params"], budgets, job.get("workers", 1))
    doc = {"command": job["command"], "params": job["params"], **body}
    doc = json.loads(canonical_json(doc))   # normalise tuples and key order
    if cache is not None:
        cache.put(key, doc, stats)
    return json.dumps(doc, sort_keys=True), False


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="finflow", description="Finite structural Ramsey and dynamics checks.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("command", nargs="?", choices=COMMANDS)
    ap.add_argument("--job", help="JSON job file (replaces the other flags)")
    ap.add_argument("--kind", choices=KINDS)
    ap.add_argument("--c", type=int)
    ap.add_argument("--b", type=int)
    ap.add_argument("--a", type=int)
    ap.add_argument("--k", type=int)
    ap.add_argument("--p", type=int)
    ap.add_argument("--bound", type=int)
    ap.add_argument("--class", dest="cls")
    ap.add_argument("--axiom")
    ap.add_argument("--group")
    ap.add_argument("--family", type=int)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--cache-dir")
    ap.add_argument("--budget-nodes", type=int)
    ap.add_argument("--budget-secs", type=float)
    return ap


def job_from_args(ns: argparse.Namespace) -> dict[str, Any]:
    if ns.job:
        try:
            with open(ns.job) as fh:
                return json.load(fh)
        except OSError as exc:
            raise IoError(f"cannot read job file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"job file is not JSON: {exc}") from None
    if ns.command is None:
        raise ValidationError("a command or --job is required")
    names = {"kind": ns.kind, "c": ns.c, "b": ns.b, "a": ns.a, "k": ns.k, "p": ns.p,
             "bound": ns.bound, "class": ns.cls, "axiom": ns.axiom, "group": ns.group,
             "family": ns.family}
    params = {k: v for k, v in names.items() if v is not None}
    job: dict[str, Any] = {"command": ns.command, "params": params}
    budgets = {}
    if ns.budget_nodes is not None:
        budgets["nodes"] = ns.budget_nodes
    if ns.budget_secs is not None:
        budgets["secs"] = ns.budget_secs
    if budgets:
        job["budgets"] = budgets
    if ns.workers is not None:
        job["workers"] = ns.workers
    return job


def main(argv: Sequence[str] | None = None) -> int:
    ns = _parser().parse_args(argv)
    try:
        job = job_from_args(ns)
        cache = Cache(ns.cache_dir) if (ns.cache_dir or os.environ.get(ENV_VAR)) else None
        text, cached = run(job, cache)
    except IoError as exc:
        print(f"finflow: io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"finflow: validation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ResourceCap as exc:
        print(f"finflow: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except InternalCheckFailed as exc:
        print(f"finflow: internal check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except FinflowError as exc:
        print(f"finflow: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if cached:
        print("finflow: cached", file=sys.stderr)
    print(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
