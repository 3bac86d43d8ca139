"""Command-line front end with JSON input and output.

Exit codes: 0 ok, 1 failed fixture checks, 2 malformed input, 3 dimension
mismatch, 4 orthogonal pre- and post-selection.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
from itertools import combinations
from fractions import Fraction
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from ._jsonio import dumps, parse_complex
from .hilbert import DimensionMismatchError, HermitianOperator, Ket, Subsystem, eigendecompose
from .ontology.cardinal import cardinal_basis, gram
from .ontology.decompose import decompose
from .ontology.structures import build_structures, subgraph_consistent
from .paradox import detect_paradox
from .pointer import CouplingConfig, measure_and_postselect, pointer_moments, strong_limit_probabilities, weak_limit_check
from .scenarios import REGISTRY, default_tolerance, get_scenario, run_scenario
from .weakvalue import OrthogonalPPSError, PPSPair, abl_probabilities, projector_weak_values, upside_down, weak_value

EXIT_FAIL, EXIT_PARSE, EXIT_DIM, EXIT_ORTHO = 1, 2, 3, 4


class InputError(ValueError):
    pass


# --- input parsing --------------------------------------------------------

def _load(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def read_ket(path: str) -> Ket:
    """A ket file is a list of amplitudes or {"space": [...], "amplitudes": [...]}.

    Amplitudes may be numbers, "a+bi" strings or [re, im] pairs. Without a
    space the states are labelled 1..n in a single subsystem "box".
    """
    data = _load(path)
    try:
        if isinstance(data, list):
            data = {"amplitudes": data}
        amps = [parse_complex(a) for a in data["amplitudes"]]
        if "space" in data:
            space = tuple(Subsystem(str(s["id"]), tuple(str(x) for x in s["states"])) for s in data["space"])
        else:
            space = (Subsystem("box", tuple(str(i + 1) for i in range(len(amps)))),)
        return Ket(space, amps)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DimensionMismatchError):
            raise
        raise InputError(f"{path}: bad ket ({exc})") from exc


def read_observable(path: str, dim: int) -> np.ndarray:
    """{"matrix": [[...]]}, {"diagonal": [...]} or {"projector": [indices]}."""
    data = _load(path)
    try:
        if isinstance(data, list):
            data = {"matrix": data}
        if "matrix" in data:
            m = np.array([[parse_complex(x) for x in row] for row in data["matrix"]], dtype=complex)
        elif "diagonal" in data:
            m = np.diag([parse_complex(x) for x in data["diagonal"]])
        elif "projector" in data:
            m = np.zeros((dim, dim), dtype=complex)
            for i in data["projector"]:
                m[int(i), int(i)] = 1
        else:
            raise KeyError("expected matrix, diagonal or projector")
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"{path}: bad observable ({exc})") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"{path}: observable must be square")
    if m.shape[0] != dim:
        raise DimensionMismatchError(f"observable is {m.shape[0]}-dimensional, states are {dim}-dimensional")
    return m


_EXACT = re.compile(r"^([+-]?[0-9./]+)?(?:([+-]?)([0-9./]*)[ij])?$")


def parse_exact(text: str) -> tuple[Fraction, Fraction]:
    """'4/3', '-1/3+3/2i', '0.5', 'i', '-2i' as (re, im) Fractions."""
    s = text.strip().replace(" ", "")
    m = _EXACT.match(s)
    if not s or m is None:
        raise InputError(f"not an exact number: {text!r}")
    re_part, sign, im_part = m.groups()
    try:
        re_val = Fraction(re_part) if re_part else Fraction(0)
        if s.endswith(("i", "j")):
            if re_part and not sign and not im_part:
                # e.g. "2i": the regex bound the coefficient as the real part
                return Fraction(0), re_val
            im_val = Fraction(im_part) if im_part else Fraction(1)
            im_val = -im_val if sign == "-" else im_val
        else:
            im_val = Fraction(0)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not an exact number: {text!r}") from exc
    return re_val, im_val


def parse_vector(text: str) -> list[tuple[Fraction, Fraction]]:
    """'(4/3,-1/3)' or '4/3, -1/3' or a path to a JSON list."""
    if os.path.exists(text):
        data = _load(text)
        if isinstance(data, dict):
            data = data.get("weak_values", data.get("values"))
        if not isinstance(data, list):
            raise InputError(f"{text}: expected a list of values")
        out = []
        for v in data:
            if isinstance(v, str):
                out.append(parse_exact(v))
            else:
                z = parse_complex(v)
                out.append((Fraction(z.real), Fraction(z.imag)))
        return out
    body = text.strip().strip("()[]")
    if not body:
        raise InputError("empty vector")
    return [parse_exact(tok) for tok in body.split(",")]


def _param_pairs(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise InputError(f"--param expects name=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError as exc:
            raise InputError(f"--param {k}: {exc}") from exc
    return out


def _emit(obj, path: str | None) -> None:
    text = dumps(obj)
    if path and path != "-":
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _pps(args) -> PPSPair:
    pre, post = read_ket(args.pre), read_ket(args.post)
    if pre.dim != post.dim:
        raise DimensionMismatchError(f"pre-selection has dimension {pre.dim}, post-selection {post.dim}")
    if pre.space != post.space:
        post = Ket(pre.space, post.amplitudes)
    return PPSPair(pre, post)


# --- commands -------------------------------------------------------------

def cmd_weakvalue(args) -> int:
    pps = _pps(args)
    m = read_observable(args.observable, pps.dim)
    values, projs = eigendecompose(HermitianOperator(m))
    report = projector_weak_values(pps, projs, "eigenbasis")
    _emit({
        "weak_value": weak_value(pps, m),
        "eigenvalues": values,
        "projectors": report,
        "upside_down": upside_down(pps).matrix,
        "postselection_probability": pps.postselection_probability(),
    }, args.output)
    return 0


def cmd_abl(args) -> int:
    pps = _pps(args)
    m = read_observable(args.observable, pps.dim)
    values, projs = eigendecompose(HermitianOperator(m))
    _emit({"eigenvalues": values, "probabilities": abl_probabilities(pps, projs)}, args.output)
    return 0


def cmd_paradox(args) -> int:
    vec = parse_vector(args.weakvalues)
    values = [re_ + im_ * 1j if im_ else re_ for re_, im_ in vec]
    labels = [str(i + 1) for i in range(len(values))]
    cert = detect_paradox(values, max_dim=args.max_dim, drop_zeros=args.drop_zeros)
    _emit("none" if cert is None else cert.to_json(labels), args.output)
    return 0


def cmd_scenarios(args) -> int:
    if args.action == "list":
        _emit({
            s.name: {
                "summary": s.summary,
                "params": {p.name: {"default": p.default, "lo": p.lo, "hi": p.hi, "integer": p.integer}
                           for p in s.params},
            }
            for s in REGISTRY.values()
        }, args.output)
        return 0
    if not args.name:
        raise InputError("scenarios run needs a scenario name")
    names = list(REGISTRY) if args.name == "all" else [args.name]
    params = _param_pairs(args.param)
    reports = {}
    for name in names:
        try:
            reports[name] = run_scenario(name, params if len(names) == 1 else None, args.tol)
        except KeyError as exc:
            raise InputError(str(exc)) from exc
        except ValueError as exc:
            if isinstance(exc, DimensionMismatchError):
                raise
            raise InputError(str(exc)) from exc
    out = reports[names[0]] if len(names) == 1 else reports
    _emit(out, args.json or args.output)
    for r in reports.values():
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: {len(r.checks) - len(r.failures())}/{len(r.checks)} checks", file=sys.stderr)
    return 0 if all(r.passed for r in reports.values()) else EXIT_FAIL


def _scenario_slice(args):
    try:
        data = get_scenario(args.scenario).build(get_scenario(args.scenario).resolve(_param_pairs(args.param)))
    except KeyError as exc:
        raise InputError(str(exc)) from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    name = args.slice or next(iter(data.slices))
    if name not in data.slices:
        raise InputError(f"no slice {name!r}; have {', '.join(data.slices)}")
    return data, name, data.slices[name]


def cmd_pointer(args) -> int:
    if args.scenario:
        _, _, sl = _scenario_slice(args)
        pps = sl.pps
        basis = sl.bases[args.basis]
        labels = projector_weak_values(pps, basis.projectors, args.basis, basis.space).labels
        if args.observable not in labels:
            raise InputError(f"no projector {args.observable!r} in basis {args.basis}; have {', '.join(labels)}")
        op = basis.projectors[labels.index(args.observable)]
    else:
        if not (args.pre and args.post and args.observable):
            raise InputError("pointer-sim needs --scenario or --pre/--post/--observable files")
        pps = _pps(args)
        op = read_observable(args.observable, pps.dim)
    if args.sweep:
        strengths = [float(x) for x in args.strengths.split(",")]
        rep = weak_limit_check(pps, op, d=args.d, strengths=strengths)
        _emit({
            "sweep": rep,
            "ratios_x": rep.ratios("error_x"),
            "ratios_p": rep.ratios("error_p"),
            "second_order_x": rep.second_order("error_x"),
            "second_order_p": rep.second_order("error_p"),
        }, args.output)
        return 0
    cfg = CouplingConfig(args.d, args.epsilon, args.quadrature)
    mx, mp = pointer_moments(measure_and_postselect(pps, op, cfg))
    strong = strong_limit_probabilities(pps, op, cfg)
    aw = weak_value(pps, op)
    _emit({
        "quadrature": cfg.quadrature,
        "d": cfg.d,
        "epsilon": cfg.epsilon,
        "mean_x": mx,
        "mean_p": mp,
        "weak_value": aw,
        "first_order": {"mean_x": cfg.d * aw.real, "mean_p": cfg.d * aw.imag / cfg.epsilon**2},
        "cell_probabilities": {"eigenvalues": strong.eigenvalues, "probabilities": strong.probabilities,
                               "epsilon_over_d": strong.epsilon_over_d, "strong_regime": strong.in_regime},
    }, args.output)
    return 0


def cmd_decompose(args) -> int:
    target = parse_vector(args.target)
    dec = decompose(target, bound=args.bound, conserve=not args.no_conserve)
    _emit({"target": [[r, i] for r, i in target], **dec.to_json()}, args.output)
    return 0


def cmd_structures(args) -> int:
    data, name, sl = _scenario_slice(args)
    fine = sl.bases.get("fine")
    if fine is None or fine.space is None or len(fine.space) < 2:
        raise InputError(f"{args.scenario} slice {name} has no multipartite product basis")
    report = projector_weak_values(sl.pps, fine.projectors, "fine", fine.space)
    structs = build_structures(report, split_integer=not args.no_split)
    ids = [s.id for s in fine.space]
    consistency = {}
    for size in range(2, len(ids)):
        for sub in combinations(ids, size):
            consistency[",".join(sub)] = subgraph_consistent(report, sub)
    provenance = {f.key: f.provenance for f in data.fixtures if f.key.startswith((f"wv:{name}.fine", f"marg:{name}"))}
    _emit({
        "scenario": args.scenario,
        "slice": name,
        "structures": structs,
        "connected": [s.is_connected() for s in structs],
        "subgraph_consistent": consistency,
        "provenance": provenance,
    }, args.output)
    return 0


def cmd_gellmann(args) -> int:
    labels, mats = cardinal_basis(args.d, args.mode)
    g = gram(mats)
    expected = 2 * np.eye(len(mats))
    _emit({
        "d": args.d,
        "mode": args.mode,
        "labels": labels,
        "matrices": mats if not args.no_matrices else None,
        "traces": [np.trace(m) for m in mats],
        "gram_residual": float(np.max(np.abs(g - expected))),
        "orthogonal": bool(np.allclose(g, expected, atol=1e-12)),
    }, args.output)
    return 0


# --- entry point ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weakreal", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="cap on BLAS threads (default: all cores)")
    p.add_argument("-o", "--output", default=None, help="write JSON here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("weakvalue", cmd_weakvalue, "weak value of an observable"),
                            ("abl", cmd_abl, "ABL probabilities over an observable's eigenprojectors")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("pre")
        s.add_argument("post")
        s.add_argument("observable")
        s.set_defaults(func=fn)

    s = sub.add_parser("paradox", help="search a weak-value vector for contradictory certainties")
    s.add_argument("weakvalues", help="vector like '(1,1,-1)' or a JSON file")
    s.add_argument("--max-dim", type=int, default=20)
    s.add_argument("--drop-zeros", action="store_true")
    s.set_defaults(func=cmd_paradox)

    s = sub.add_parser("scenarios", help="list or run the worked examples")
    s.add_argument("action", choices=["list", "run"])
    s.add_argument("name", nargs="?", help="scenario name or 'all'")
    s.add_argument("--param", action="append", metavar="NAME=VALUE")
    s.add_argument("--json", metavar="PATH", help="write the report here")
    s.add_argument("--tol", type=float, default=None, help="comparison tolerance (default WEAKREAL_TOL or 1e-10)")
    s.set_defaults(func=cmd_scenarios)

    s = sub.add_parser("pointer-sim", help="Gaussian pointer after post-selection")
    s.add_argument("--scenario")
    s.add_argument("--slice")
    s.add_argument("--basis", default="fine")
    s.add_argument("--param", action="append", metavar="NAME=VALUE")
    s.add_argument("--observable", help="projector label (with --scenario) or observable file")
    s.add_argument("--pre")
    s.add_argument("--post")
    s.add_argument("--d", type=float, default=1.0)
    s.add_argument("--epsilon", type=float, default=1.0)
    s.add_argument("--quadrature", choices=["position", "momentum"], default="position")
    s.add_argument("--sweep", action="store_true", help="weak-limit sweep over d/epsilon")
    s.add_argument("--strengths", default="0.1,0.01,0.001")
    s.set_defaults(func=cmd_pointer)

    s = sub.add_parser("decompose", help="count-minimal counterparticle distribution")
    s.add_argument("target", help="vector like '(4/3,-1/3)' or '(3/2i,-3/2i)'")
    s.add_argument("--bound", type=int, default=2)
    s.add_argument("--no-conserve", action="store_true")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("structures", help="N-structures of a scenario's joint weak values")
    s.add_argument("scenario")
    s.add_argument("--slice")
    s.add_argument("--param", action="append", metavar="NAME=VALUE")
    s.add_argument("--no-split", action="store_true", help="keep integer multiplicities as one structure")
    s.set_defaults(func=cmd_structures)

    s = sub.add_parser("gellmann", help="traceless operator basis and its Gram matrix")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--mode", choices=["gell_mann", "pauli_product"], default="gell_mann")
    s.add_argument("--no-matrices", action="store_true")
    s.set_defaults(func=cmd_gellmann)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else 0
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_PARSE
    try:
        default_tolerance()
        with threadpool_limits(limits=args.threads):
            return args.func(args)
    except DimensionMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIM
    except OrthogonalPPSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORTHO
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
