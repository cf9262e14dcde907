"""Command-line interface: ``hadamax <command> ...``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors.  Angles are printed in units of pi.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from . import catalog as cat
from .algebra import SymbolicMatrix, evaluate_many
from .charpoly import char_poly_exact
from .equivalence import (
    charpoly_class_compare,
    entry_census,
    fingerprint,
    fingerprints_match,
    haagerup_set,
    spectra_match,
    spectrum,
)
from .props import is_hadamard_numeric, is_hadamard_symbolic
from .serialize import SchemaError, import_matrix, to_grid, to_json, to_latex

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _pi(x: float) -> str:
    """An angle in units of pi with 12 significant digits."""
    v = x / math.pi
    return f"{0.0 if abs(v) < 1e-13 else v:.12g}"


_ANGLE = re.compile(r"^([+-]?)(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?$")


def parse_angle(text: str) -> float:
    """``0.3``, ``pi``, ``-pi/2``, ``3pi/4``, ``0.5*pi``."""
    t = text.strip().lower()
    m = _ANGLE.match(t)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        k = float(m.group(2)) if m.group(2) not in ("", ".") else 1.0
        den = float(m.group(3)) if m.group(3) else 1.0
        return sign * k * math.pi / den
    try:
        return float(t)
    except ValueError:
        raise UsageError(f"cannot read angle {text!r}") from None


def parse_sets(items: Sequence[str]) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--set expects name=value, got {item!r}")
        name, val = item.split("=", 1)
        out[name.strip()] = parse_angle(val)
    return out


def _resolve(name: str):
    """A catalog name or a JSON file; returns (label, symbolic-or-numeric matrix)."""
    if os.path.exists(name):
        return name, import_matrix(name)
    try:
        return name, cat.catalog_get(name).matrix
    except cat.UnknownMatrixError as exc:
        raise UsageError(exc.args[0]) from None


def _binding(M, sets: dict) -> dict:
    if not isinstance(M, SymbolicMatrix):
        if sets:
            raise UsageError("numeric matrices take no --set values")
        return {}
    unknown = sorted(set(sets) - set(M.params))
    if unknown:
        raise UsageError(f"unknown parameters {unknown}; matrix has {list(M.params)}")
    missing = [p for p in M.params if p not in sets]
    if missing:
        print(f"warning: unset parameters {', '.join(missing)} default to 0", file=sys.stderr)
    return {p: sets.get(p, 0.0) for p in M.params}


def _numeric(M, sets: dict) -> np.ndarray:
    if isinstance(M, SymbolicMatrix):
        return M.evaluate(_binding(M, sets))
    _binding(M, sets)
    return np.asarray(M, dtype=complex)


def cmd_catalog(args) -> int:
    if args.name:
        entry = cat.catalog_get(args.name) if args.name in cat.catalog_names() else None
        if entry is None:
            raise UsageError(f"unknown matrix {args.name!r}; available: {', '.join(cat.catalog_names())}")
        print(f"{entry.name}: {entry.n}x{entry.n}, params {list(entry.param_names)}")
        print(f"  {entry.notes}")
        print(to_grid(entry.matrix))
        return EXIT_OK
    for name, n, p in cat.catalog_list():
        print(f"{name:6s} {n:2d} {p}")
    return EXIT_OK


def cmd_verify(args) -> int:
    label, M = _resolve(args.name)
    if not isinstance(M, SymbolicMatrix):
        ok, rep = is_hadamard_numeric(M, args.tol)
        if ok:
            print("OK: Hadamard (numeric)")
            return EXIT_OK
        print(f"FAIL: not Hadamard (modulus {rep.max_entry_modulus_error:.3g}, gram {rep.max_gram_error:.3g})")
        return EXIT_FAIL
    if M.has_zero:
        print("FAIL: zero entries present")
        return EXIT_FAIL
    if not is_hadamard_symbolic(M):
        print("FAIL: not Hadamard symbolically")
        return EXIT_FAIL
    rng = np.random.default_rng(args.seed)
    B = rng.uniform(0, 2 * math.pi, size=(args.samples, len(M.params)))
    chunks = np.array_split(B, max(1, min(args.jobs, args.samples)))

    def check(chunk):
        return [is_hadamard_numeric(X, args.tol)[0] for X in evaluate_many(M, chunk)] if len(chunk) else []

    if args.jobs > 1:
        with ThreadPoolExecutor(args.jobs) as pool:
            results = [r for part in pool.map(check, chunks) for r in part]
    else:
        results = check(B)
    bad = results.count(False)
    if bad:
        print(f"FAIL: {bad} of {args.samples} numeric samples are not Hadamard")
        return EXIT_FAIL
    print(f"OK: Hadamard (symbolic + {args.samples} numeric samples)")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    label, M = _resolve(args.name)
    if args.exact:
        try:
            print(char_poly_exact(M if not isinstance(M, SymbolicMatrix) or not M.params
                                  else M.evaluate(_binding(M, parse_sets(args.set)))))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return EXIT_OK
    H = _numeric(M, parse_sets(args.set))
    for z in spectrum(H, normalize=not args.raw):
        print(f"arg/pi={_pi(np.angle(z))} |z|={abs(z):.12g}")
    return EXIT_OK


def cmd_invariants(args) -> int:
    label, M = _resolve(args.name)
    H = _numeric(M, parse_sets(args.set))
    try:
        if args.kind == "census":
            report = entry_census(H)
            text = " ".join(f"{k}:{v}" for k, v in report.items())
        elif args.kind == "haagerup":
            hs = haagerup_set(H)
            report = {"support_over_pi": [float(_pi(a)) for a in hs.support()], "size": int(hs.angles.size)}
            text = "support/pi: " + " ".join(_pi(a) for a in hs.support())
        else:
            fp = fingerprint(H, mode=args.mode)
            report = fp.to_dict()
            lines = []
            for tag, lists in (("col", fp.cols), ("row", fp.rows)):
                for legs in lists:
                    lines.append(f"{tag}: " + " ".join(_pi(a) for a in legs))
            text = "\n".join(lines)
    except ValueError as exc:
        print(f"FAIL: {exc}")
        return EXIT_FAIL
    print(json.dumps(report, sort_keys=True) if args.json else text)
    return EXIT_OK


def cmd_compare(args) -> int:
    if args.method == "charpoly":
        for n in (args.first, args.second):
            if n not in cat.catalog_names():
                raise UsageError(f"charpoly comparison needs catalog families, got {n!r}")
        try:
            v = charpoly_class_compare(args.first, args.second, samples=args.samples, seed=args.seed,
                                       renaming=args.renaming, jobs=args.jobs)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        print(v.verdict)
        if v.shift is not None and args.verbose:
            print(f"shift (quarter turns): {list(v.shift)}")
        return EXIT_OK
    sets = parse_sets(args.set)
    _, M1 = _resolve(args.first)
    _, M2 = _resolve(args.second)
    H1 = _numeric(M1, {k: v for k, v in sets.items() if isinstance(M1, SymbolicMatrix) and k in M1.params})
    H2 = _numeric(M2, {k: v for k, v in sets.items() if isinstance(M2, SymbolicMatrix) and k in M2.params})
    if H1.shape != H2.shape:
        print("distinct")
        return EXIT_OK
    if args.method == "spectrum":
        same = spectra_match(spectrum(H1), spectrum(H2))
    elif args.method == "haagerup":
        same = haagerup_set(H1).matches(haagerup_set(H2))
    else:
        same = fingerprints_match(fingerprint(H1), fingerprint(H2))
    print("not separated" if same else "distinct")
    return EXIT_OK


def cmd_standard_form(args) -> int:
    try:
        sf = cat.standard_form(args.name)
    except cat.UnknownMatrixError as exc:
        raise UsageError(exc.args[0]) from None
    print(f"{sf.name} = {sf.core_name} o EXP(i R)")
    cells = sf.phase_text()
    width = max(len(c) for row in cells for c in row)
    print("\n".join(" ".join(c.rjust(width) for c in row) for row in cells))
    if args.printed:
        slips = cat.printed_phase_slips(args.name)
        print(f"printed phase matrix differs at {len(slips)} entries")
        for i, j, p, r in slips:
            print(f"  ({i + 1},{j + 1}): printed {p}, entries give {r}")
    return EXIT_OK


def cmd_search(args) -> int:
    from .search import SearchOptions, d2_template, fit_h4, run_restarts, zauner_template

    if args.template == "d2":
        target = d2_template()
    elif args.template == "zauner":
        target = zauner_template()
    elif args.template in cat.catalog_names() and cat.catalog_get(args.template).is_symbolic:
        target = cat.catalog_get(args.template).matrix
    else:
        raise UsageError(f"unknown template {args.template!r}; use d2, zauner or a catalog family")
    opts = SearchOptions(max_iters=args.max_iters, step_init=args.step, restarts=args.restarts, tol=args.tol)
    runs = run_restarts(target, args.seed, opts, jobs=args.jobs)
    best = min(runs, key=lambda r: r.defect)
    report = {"template": args.template, "best": best.to_dict(),
              "converged_runs": sum(r.converged for r in runs), "runs": len(runs)}
    if args.template == "d2" and best.converged:
        fit = fit_h4(target.evaluate_many(best.vector(target.params))[0])
        report["h4_fit_a_over_pi"] = None if fit is None else float(_pi(fit[0]))
    if args.json:
        print(json.dumps(report, sort_keys=True))
    else:
        print(f"best defect {best.defect:.3e} after {best.iterations} iterations (restart {best.restart})")
        print(f"converged runs: {report['converged_runs']}/{len(runs)}")
        if "h4_fit_a_over_pi" in report:
            a = report["h4_fit_a_over_pi"]
            print("dephased solution: " + ("not in H4 family" if a is None else f"H4(a), a/pi={a:.12g}"))
    return EXIT_OK if best.converged else EXIT_FAIL


def cmd_export(args) -> int:
    label, M = _resolve(args.name)
    sets = parse_sets(args.set)
    if args.numeric or sets:
        M = _numeric(M, sets)
    if args.format == "json":
        text = to_json(M, indent=None)
    elif args.format == "grid":
        text = to_grid(M)
    else:
        text = to_latex(M)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_import_check(args) -> int:
    try:
        M = import_matrix(args.path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {args.path}") from None
    except SchemaError as exc:
        print(f"FAIL: schema error: {exc}")
        return EXIT_FAIL
    if isinstance(M, SymbolicMatrix):
        print(f"OK: symbolic {M.n}x{M.n} matrix, params {list(M.params)}, scaleHalfLog {M.scale_half_log}")
    else:
        print(f"OK: numeric {M.shape[0]}x{M.shape[0]} matrix")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hadamax", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def with_set(sp):
        sp.add_argument("--set", action="append", default=[], metavar="NAME=VALUE",
                        help="bind a parameter (radians, or e.g. pi/2)")

    sp = sub.add_parser("catalog", help="list catalog entries or show one")
    sp.add_argument("name", nargs="?")
    sp.set_defaults(func=cmd_catalog)

    sp = sub.add_parser("verify", help="check the Hadamard property")
    sp.add_argument("name", help="catalog name or JSON file")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("spectrum", help="eigenvalues or exact characteristic polynomial")
    sp.add_argument("name")
    sp.add_argument("--exact", action="store_true", help="factored det(yI - M) over Q(i)")
    sp.add_argument("--raw", action="store_true", help="do not divide by sqrt(n)")
    with_set(sp)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("invariants", help="equivalence invariants")
    sp.add_argument("kind", choices=["haagerup", "fingerprint", "census"])
    sp.add_argument("name")
    sp.add_argument("--mode", choices=["combined", "separate"], default="combined")
    sp.add_argument("--json", action="store_true")
    with_set(sp)
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("compare", help="compare two matrices or families")
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--method", choices=["charpoly", "spectrum", "haagerup", "fingerprint"], default="charpoly")
    sp.add_argument("--samples", type=int, default=6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--renaming", action="store_true", help="also permute parameter names")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("-v", "--verbose", action="store_true")
    with_set(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("standard-form", help="core and phase matrix of a family")
    sp.add_argument("name")
    sp.add_argument("--printed", action="store_true", help="list differences with the printed phases")
    sp.set_defaults(func=cmd_standard_form)

    sp = sub.add_parser("search", help="minimize the Hadamard defect of a template")
    sp.add_argument("template", help="d2, zauner, or a catalog family")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--max-iters", type=int, default=3000)
    sp.add_argument("--step", type=float, default=0.05)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("export", help="serialize a matrix")
    sp.add_argument("name")
    sp.add_argument("--format", choices=["json", "grid", "latex"], default="json")
    sp.add_argument("--numeric", action="store_true", help="evaluate before export")
    sp.add_argument("-o", "--output")
    with_set(sp)
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("import-check", help="validate a JSON matrix file")
    sp.add_argument("path")
    sp.set_defaults(func=cmd_import_check)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for opt in ("samples", "jobs", "restarts", "max_iters"):
        if getattr(args, opt, 1) < 1:
            parser.print_usage(sys.stderr)
            print(f"hadamax: error: --{opt.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hadamax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
