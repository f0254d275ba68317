"""Command line entry point: ``stablab gen``, ``stablab verify`` and ``stablab specseq``.

Exit codes: 0 success, 1 a check ran and failed, 2 bad input, 3 budget exceeded.
Errors go to stderr as one JSON line with a reason code.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Optional

from . import __version__
from .complexes import SemiSimplicialComplex, SimplicialComplex, boundary_of_simplex, face_budget, star
from .errors import BudgetError, StablabError
from .homology import connectivity, reduced_homology
from .models import (
    PuncturedDisk,
    base_tether,
    chain_truncation,
    doubled_tether_rule,
    polygon_arc_complex,
    polygon_surgery_flow,
    quotient_simplex_mod_order,
    surgery_flow,
    tether_complex,
    wedge_join_model,
)
from .specseq import (
    GroupHomologyTable,
    StabilityHypotheses,
    braid_pattern,
    convergence_audit,
    e1_page,
    mcg_ranges,
    stability_ranges,
)
from .toolbox import check_flow, is_wCM, ordered_connectivity_test, verify_link_argument


class _Failed(Exception):
    """A check ran to completion and did not pass."""


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _manifest(args: argparse.Namespace, extra: Optional[dict] = None) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out") and v is not None}
    out = {"tool": "stablab", "version": __version__, "command": params.pop("command", None),
           "parameters": params, "seed": args.seed,
           "budgets": {"faces": face_budget(args.budget_faces)}}
    if extra:
        out["budgets"].update(extra)
    return out


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise _Usage(f"{args.command}: missing {' '.join(missing)}")


class _Usage(Exception):
    pass


# ---------------------------------------------------------------- gen


def _gen_tether(a):
    _need(a, "n")
    T = tether_complex(PuncturedDisk(a.n, a.d or 1), a.bound if a.bound is not None else 4,
                       coconnected=a.coconnected, words=a.words if a.words is not None else 4,
                       budget=a.budget_faces)
    return T.complex, {"tethers": [t.to_json() for t in T.tethers]}, T.budgets


def _gen_chain(a):
    _need(a, "g")
    M = chain_truncation(a.g, a.bound if a.bound is not None else 1, a.k)
    return M.complex, {"parts": [[c.to_json() for c in p] for p in M.parts]}, {"bound": a.bound or 1, "limit": a.k}


def _simple(build: Callable, *needs: str) -> Callable:
    def run(a):
        _need(a, *needs)
        return build(a), None, None
    return run


GENERATORS: dict[str, Callable] = {
    "quotient-simplex": _simple(lambda a: quotient_simplex_mod_order(a.n), "n"),
    "polygon-arcs": _simple(lambda a: polygon_arc_complex(a.m), "m"),
    "simplex-boundary": _simple(lambda a: boundary_of_simplex(a.n), "n"),
    "wedge-join": _simple(lambda a: wedge_join_model(a.g, a.k), "g", "k"),
    "tether": _gen_tether,
    "chain": _gen_chain,
}


def cmd_gen(a: argparse.Namespace) -> int:
    if a.generator not in GENERATORS:
        raise _Usage(f"unknown generator {a.generator!r}; known: {', '.join(sorted(GENERATORS))}")
    K, labels, budgets = GENERATORS[a.generator](a)
    doc = {"complex": K.to_json(), "kind": "semi-simplicial" if isinstance(K, SemiSimplicialComplex) else "simplicial",
           "manifest": _manifest(a, budgets)}
    if labels:
        doc["labels"] = labels
    _emit(a, dumps(doc))
    return 0


# ---------------------------------------------------------------- verify


def load_complex(path: str):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as e:
        raise _Usage(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise _Usage(f"{path} is not JSON: {e}") from None
    if isinstance(data, dict) and "complex" in data:
        data = data["complex"]
    if not isinstance(data, dict):
        raise _Usage(f"{path} does not hold a complex")
    if "cells" in data:
        return SemiSimplicialComplex.from_json(data)
    return SimplicialComplex.from_json(data)


def _report_out(a, statement: str, report: dict, passed: bool) -> int:
    doc = {"statement": statement, "report": report, "pass": passed, "manifest": _manifest(a)}
    _emit(a, dumps(doc))
    if not passed:
        raise _Failed(statement)
    return 0


def _v_homology(a):
    _need(a, "file")
    H = reduced_homology(load_complex(a.file))
    _emit(a, H.to_csv() if a.format == "csv" else dumps({"homology": H.to_json(), "manifest": _manifest(a)}))
    return 0


def _v_connectivity(a):
    _need(a, "file")
    c = connectivity(load_complex(a.file))
    return _report_out(a, "homological connectivity certificate", c.to_json(), True)


def _v_ordered(a):
    _need(a, "file", "n")
    X = load_complex(a.file)
    r = ordered_connectivity_test(X, a.n, a.budget_faces)
    return _report_out(a, r.statement, r.to_json(), r.passed)


def _v_wcm(a):
    _need(a, "file", "n")
    w = is_wCM(load_complex(a.file), a.n)
    rep = {"level": str(w.level), "holds": w.holds, "binding": w.binding, "ledger": w.ledger}
    return _report_out(a, f"weakly Cohen-Macaulay of level {a.n}", json.loads(json.dumps(rep, default=str)), w.holds)


def _v_stability(a):
    _need(a, "cx")
    r = stability_ranges(StabilityHypotheses(cX=a.cx), a.imax or 10)
    return _report_out(a, "stability range from connectivity of the complex and its quotient", r.to_json(), r.feasible)


def _v_braid(a):
    _need(a, "n")
    b = braid_pattern(a.n, a.imax if a.imax is not None else a.n + 2)
    ok = all(b.iso_all_degrees(m) for m in range(1, a.n + 1, 2)) and all(b.vanishing_above(m) for m in range(1, a.n + 1))
    return _report_out(a, "odd braid stabilizations are isomorphisms and H_i(B_n) = 0 for i >= n", b.to_json(), ok)


def _v_flow(a):
    model = a.model or "tether"
    if model == "pentagon":
        X = polygon_arc_complex(a.m or 5)
        flow, c, v = polygon_surgery_flow(a.m or 5)
    elif model == "tether":
        _need(a, "n")
        T = tether_complex(PuncturedDisk(a.n, a.d or 1), a.bound if a.bound is not None else 4,
                           words=a.words if a.words is not None else 4, budget=a.budget_faces)
        X = T.complex
        flow, c = surgery_flow(T, base_tether(1))
        v = T.vertex(base_tether(1))
    else:
        raise _Usage(f"unknown flow model {model!r}")
    r = check_flow(X, star(X, [v]), flow, c)
    return _report_out(a, r.statement, r.to_json(), r.passed)


def _v_bad_simplex(a):
    _need(a, "n")
    disk = PuncturedDisk(a.n, 1)
    bound = a.bound if a.bound is not None else 4
    words = a.words if a.words is not None else 4
    T = tether_complex(disk, bound, words=words, budget=a.budget_faces)
    T0 = tether_complex(disk, bound, coconnected=True, words=words, budget=a.budget_faces)
    level = a.level if a.level is not None else T.complex.dimension + 1
    r = verify_link_argument(T.complex, T0.complex, doubled_tether_rule(T), level, mode="a")
    return _report_out(a, r.statement, r.to_json(), r.passed)


CHECKS = {
    "homology": _v_homology,
    "connectivity": _v_connectivity,
    "ordered-connectivity": _v_ordered,
    "wcm": _v_wcm,
    "stability": _v_stability,
    "braid": _v_braid,
    "flow": _v_flow,
    "bad-simplex": _v_bad_simplex,
}


def cmd_verify(a: argparse.Namespace) -> int:
    if a.check not in CHECKS:
        raise _Usage(f"unknown check {a.check!r}; known: {', '.join(sorted(CHECKS))}")
    return CHECKS[a.check](a)


# ---------------------------------------------------------------- specseq


def cmd_specseq(a: argparse.Namespace) -> int:
    if a.action == "page":
        _need(a, "n")
        qmax = a.qmax if a.qmax is not None else 2
        page = e1_page(a.n, GroupHomologyTable.trivial(a.n, qmax), qmax)
        audit = convergence_audit(page, lambda p, q: True)
        doc = dict(page.to_json(), audits=[audit.to_json()], manifest=_manifest(a))
        _emit(a, dumps(doc))
        return 0
    if a.action == "ranges":
        return _v_stability(a)
    if a.action == "braid":
        return _v_braid(a)
    if a.action == "mcg":
        imax = a.imax if a.imax is not None else 3
        doc = {"ranges": {str(i): {k: r.to_json() for k, r in mcg_ranges(i).items()} for i in range(imax + 1)},
               "manifest": _manifest(a)}
        _emit(a, dumps(doc))
        return 0
    raise _Usage(f"unknown specseq action {a.action!r}")


# ---------------------------------------------------------------- parser


def _common(p: argparse.ArgumentParser) -> None:
    for flag in ("n", "d", "m", "g", "k", "bound", "words", "qmax", "imax", "level"):
        p.add_argument(f"--{flag}", type=int)
    p.add_argument("--cx")
    p.add_argument("--coconnected", action="store_true")
    p.add_argument("--model")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-faces", type=int)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stablab", description="simplicial connectivity and stability toolkit")
    parser.add_argument("--version", action="version", version=f"stablab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    g = sub.add_parser("gen", help="generate a complex as JSON")
    g.add_argument("generator")
    _common(g)
    g.set_defaults(func=cmd_gen)
    v = sub.add_parser("verify", help="run a named check and write a report")
    v.add_argument("check")
    v.add_argument("file", nargs="?")
    _common(v)
    v.set_defaults(func=cmd_verify)
    s = sub.add_parser("specseq", help="spectral sequence pages and range arithmetic")
    s.add_argument("action", choices=("page", "ranges", "braid", "mcg"))
    _common(s)
    s.set_defaults(func=cmd_specseq)
    return parser


@contextmanager
def _face_budget(override: Optional[int]):
    """Let --budget-faces reach every builder, not only those that take a budget argument."""
    if override is None:
        yield
        return
    old = os.environ.get("STABLAB_BUDGET_FACES")
    os.environ["STABLAB_BUDGET_FACES"] = str(override)
    try:
        yield
    finally:
        if old is None:
            del os.environ["STABLAB_BUDGET_FACES"]
        else:
            os.environ["STABLAB_BUDGET_FACES"] = old


def _fail(code: int, reason: str, msg: str) -> int:
    sys.stderr.write(json.dumps({"error": reason, "message": msg}, sort_keys=True) + "\n")
    return code


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) and 2
    try:
        with _face_budget(args.budget_faces):
            return args.func(args)
    except _Failed as e:
        return _fail(1, "check-failed", str(e))
    except _Usage as e:
        return _fail(2, "usage", str(e))
    except BudgetError as e:
        return _fail(3, e.code, str(e))
    except StablabError as e:
        return _fail(2, e.code, str(e))
    except ValueError as e:
        return _fail(2, "malformed-input", str(e))


if __name__ == "__main__":
    sys.exit(main())
