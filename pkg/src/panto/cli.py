"""Command-line front end: ``panto <command> ...``.

Exit codes: 0 success, 1 input rejected (parse, IO or semantic checks),
2 inconclusive classification, 3 invariant violation or reducibility witness.
Diagnostics go to stderr with ``E:<code>`` / ``W:`` prefixes.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Sequence

import mpmath

from .block_decomposition import (
    BlockComplex,
    BlockEnd,
    BoundaryEnd,
    build_blocks,
    export_gluing,
)
from .end_periodic import (
    EndPeriodicMap,
    declared_shift,
    fenley_example,
    is_ladder,
    ladder_model,
    ladder_shift,
    map_from_dict,
    map_to_dict,
    map_violations,
    path_to_preimage,
    random_ladder_map,
)
from .errors import InputError, InvariantViolation, NonTerminatingOrbit, PantoError
from .pants_graph import MovePath, farey_distance, farey_geodesic, upper_translation_estimate
from .projection_certificates import (
    ClassKind,
    SupportDescriptor,
    certificate_demo,
    certify,
    ladder_support,
    support_from_dict,
)
from .surface_model import Slope
from .volume_bounds import (
    LOWER_BOUNDARY,
    LOWER_INTRINSIC,
    UPPER_COMPONENT,
    UPPER_TOTAL,
    evaluate_bounds,
    sharpness_family,
)

DEFAULT_PRECISION = 15
FENLEY_SIGMA = ("s1", "a1", "a2", "s3")


class Command(str, Enum):
    VALIDATE = "validate"
    FAREY = "farey"
    PATH_WEIGHT = "path-weight"
    BLOCKS = "blocks"
    BOUNDS = "bounds"
    CERTIFY = "certify"
    EXAMPLE = "example"


@dataclass(frozen=True)
class RunConfig:
    command: Command
    inputs: tuple[str, ...] = ()
    json: bool = False
    dot: str | None = None
    out: str | None = None
    precision: int = DEFAULT_PRECISION
    seed: int | None = None
    options: dict = field(default_factory=dict)


class _ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def _read(path: str, stdin: IO[str]) -> str:
    if path == "-":
        return stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load_json(path: str, stdin: IO[str]) -> dict:
    try:
        data = json.loads(_read(path, stdin))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a JSON object")
    return data


def _load_bundle(cfg: RunConfig, stdin: IO[str]) -> tuple[dict, EndPeriodicMap, MovePath | None]:
    data = _load_json(cfg.inputs[0], stdin)
    f = map_from_dict(data)
    path = None
    if len(cfg.inputs) > 1:
        path = MovePath.from_dict(_load_json(cfg.inputs[1], stdin))
    elif "path" in data:
        path = MovePath.from_dict(data["path"])
    return data, f, path


def _path_or_default(f: EndPeriodicMap, path: MovePath | None) -> MovePath:
    return path if path is not None else path_to_preimage(f)


def bundle(f: EndPeriodicMap, path: MovePath | None = None, certificate: dict | None = None) -> dict:
    out = map_to_dict(f)
    if path is not None:
        out["path"] = path.to_dict()
    if certificate is not None:
        out["certificate"] = certificate
    return out


def _dump(data: dict) -> str:
    return json.dumps(data, indent=2) + "\n"


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------


def emit_dot(bc: BlockComplex) -> str:
    lines = ["digraph blocks {"]
    if bc.blocks:
        for b in bc.blocks:
            shape = "box" if b.kind.value == "S" else "ellipse"
            lines.append(
                f'  "B{b.level}" [label="{b.level} {b.kind.value} {b.d1_minus.slope}->{b.d1_plus.slope}", shape={shape}];'
            )
        bp = bc.boundary_pants
        sides = (("S+", bp.plus), ("S-", bp.minus)) if bp is not None else ()
        for side, pd in sides:
            for p in sorted(pd.pants):
                lines.append(f'  "{side}.{p}" [label="{side} {p}", shape=triangle];')
        for a, b in bc.gluings:
            lines.append(f'  {_face_node(a)} -> {_face_node(b)} [label="{a} {b}"];')
        for an in bc.annuli:
            style = "dotted" if an.degenerate else "dashed"
            lo = _end_node(an.lower_end, bc)
            hi = _end_node(an.upper_end, bc)
            lines.append(f'  {lo} -> {hi} [style={style}, label="{an.id}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _face_node(face: str) -> str:
    parts = face.split(".")
    if parts[0] == "boundary":
        return f'"{parts[1]}.{parts[2]}"'
    return f'"B{parts[0]}"'


def _end_node(end: BlockEnd | BoundaryEnd, bc: BlockComplex) -> str:
    if isinstance(end, BlockEnd):
        return f'"B{end.block}"'
    pd = bc.boundary_pants.plus if end.side == "S+" else bc.boundary_pants.minus
    pant = sorted(pd.pants_of(end.cls))[0]
    return f'"{end.side}.{pant}"'


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_validate(cfg, stdin, out, err) -> int:
    data, f, path = _load_bundle(cfg, stdin)
    problems = map_violations(f)
    if path is not None:
        try:
            path.decompositions()
            if is_ladder(f):
                upper_translation_estimate(f, path, 1)
        except PantoError as exc:
            problems.append(str(exc))
    for p in problems:
        err.write(f"W: {p}\n")
    if problems:
        err.write("E:invalid input failed validation\n")
        return 1
    out.write("ok\n")
    return 0


def _cmd_farey(cfg, stdin, out, err) -> int:
    op, a, b = cfg.inputs
    x, y = Slope.parse(a), Slope.parse(b)
    if op == "dist":
        out.write(f"{farey_distance(x, y)}\n")
    else:
        out.write(" ".join(str(s) for s in farey_geodesic(x, y)) + "\n")
    return 0


def _cmd_path_weight(cfg, stdin, out, err) -> int:
    data = _load_json(cfg.inputs[0], stdin)
    path = MovePath.from_dict(data["path"] if "path" in data and "base" not in data else data)
    path.decompositions()
    if cfg.json:
        out.write(_dump({"weight": path.weight, "n_T": path.n_T, "n_S": path.n_S, "length": len(path)}))
    else:
        out.write(f"{path.weight}\n")
    return 0


def _cmd_blocks(cfg, stdin, out, err) -> int:
    _, f, path = _load_bundle(cfg, stdin)
    bc = build_blocks(f, _path_or_default(f, path))
    text = export_gluing(bc)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    if cfg.dot:
        dot = emit_dot(bc)
        if cfg.dot == "-":
            out.write(dot)
        else:
            with open(cfg.dot, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(dot)
    return 0


def _cmd_bounds(cfg, stdin, out, err) -> int:
    _, f, path = _load_bundle(cfg, stdin)
    path = _path_or_default(f, path)
    report = evaluate_bounds(f, [(path, cfg.options.get("power", 1))], cfg.precision)
    if not report.consistent:
        raise InvariantViolation("an upper estimate of the translation length is below a lower bound")
    if cfg.json:
        out.write(_dump(report.to_dict()))
        return 0
    d = report.to_dict()
    out.write(f"{UPPER_TOTAL}: {d['upper_voct_coeff']} * V_oct = {d['upper_volume']}\n")
    for entry in d["upper_component"]:
        out.write(f"{UPPER_COMPONENT} ({entry['base']}): {entry['voct_coeff']} * V_oct\n")
    out.write(f"{LOWER_BOUNDARY}: tau >= {d['lower_tau_boundary']}\n")
    out.write(f"{LOWER_INTRINSIC}: tau >= {d['lower_tau']}\n")
    out.write(f"consistency: {'PASS' if report.consistent else 'FAIL'}\n")
    for line in report.provenance:
        out.write(f"  from {line}\n")
    return 0


def _certificate_inputs(data: dict, f: EndPeriodicMap) -> tuple[SupportDescriptor, str, str]:
    cert = data.get("certificate")
    if cert is not None:
        try:
            return support_from_dict(cert["support"], f), cert["eta"], cert["alpha"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad certificate: {exc}") from exc
    C = ladder_support(f)
    return C, C.minus_cuts[0].curve, C.plus_cuts[0].curve


def _cmd_certify(cfg, stdin, out, err) -> int:
    data = _load_json(cfg.inputs[0], stdin)
    f = map_from_dict(data)
    C, eta, alpha = _certificate_inputs(data, f)
    result = certify(f, C, eta, alpha)
    line = f"classification: {result.kind.value}"
    if result.reason:
        line += f" ({result.reason})"
    out.write(line + "\n")
    for key, value in result.evidence:
        out.write(f"  {key}: {value}\n")
    return 2 if result.kind is ClassKind.INCONCLUSIVE else 0


def _cmd_example(cfg, stdin, out, err) -> int:
    which = cfg.inputs[0]
    opts = cfg.options
    if which == "fenley":
        f = fenley_example(opts.get("stub_depth", 2))
        out.write(_dump(bundle(f, path_to_preimage(f))))
    elif which == "laddershift":
        w = opts.get("ends")
        strips = opts.get("strips", 1)
        if w is not None and not (len(w) == 2 and w[0] == -w[1] > 0):
            f = declared_shift(w, stub_depth=opts.get("stub_depth", 2))
            out.write(_dump(bundle(f)))
            return 0
        if w is not None:
            strips = w[0]
        f = ladder_shift(strips, opts.get("genus", 3), opts.get("stub_depth", 2))
        out.write(_dump(bundle(f, MovePath(ladder_model(f).base(), ()))))
    elif which == "sharp":
        f = fenley_example()
        fk, pk = sharpness_family(f, FENLEY_SIGMA, opts.get("k", 1))
        out.write(_dump(bundle(fk, pk)))
    elif which == "demo":
        f, C, eta, alpha = certificate_demo(opts.get("k", 5), not opts.get("partial", False))
        out.write(_dump(bundle(f, None, {"support": C.to_dict(), "eta": eta, "alpha": alpha})))
    elif which == "random":
        rng = random.Random(cfg.seed if cfg.seed is not None else 0)
        f = random_ladder_map(rng, opts.get("strips", 1))
        out.write(_dump(bundle(f, path_to_preimage(f))))
    else:
        raise InputError(f"unknown example {which!r}")
    return 0


_DISPATCH = {
    Command.VALIDATE: _cmd_validate,
    Command.FAREY: _cmd_farey,
    Command.PATH_WEIGHT: _cmd_path_weight,
    Command.BLOCKS: _cmd_blocks,
    Command.BOUNDS: _cmd_bounds,
    Command.CERTIFY: _cmd_certify,
    Command.EXAMPLE: _cmd_example,
}


def run(cfg: RunConfig, stdin: IO[str] | None = None, stdout: IO[str] | None = None, stderr: IO[str] | None = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        return _DISPATCH[cfg.command](cfg, stdin, stdout, stderr)
    except NonTerminatingOrbit as exc:
        stderr.write(f"E:reducible reducibility witness found: {exc}\n")
        return 3
    except InvariantViolation as exc:
        stderr.write(f"E:invariant {exc}\n")
        return 3
    except InputError as exc:
        stderr.write(f"E:parse {exc}\n")
        return 1
    except PantoError as exc:
        stderr.write(f"E:{exc.code} {exc}\n")
        return 1
    except ValueError as exc:
        stderr.write(f"E:parse {exc}\n")
        return 1


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="panto", description="Pants paths, block decompositions and bounds for end-periodic maps.")
    ap.add_argument("--precision", type=int, default=None, help="decimal digits for constants (8-30)")
    ap.add_argument("--seed", type=int, default=None)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a map file and an optional path file")
    p.add_argument("mapfile")
    p.add_argument("pathfile", nargs="?")

    p = sub.add_parser("farey", help="Farey graph distance or geodesic")
    p.add_argument("op", choices=["dist", "geodesic"])
    p.add_argument("a")
    p.add_argument("b")

    p = sub.add_parser("path-weight", help="weight of a move path")
    p.add_argument("pathfile")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("blocks", help="block decomposition")
    bsub = p.add_subparsers(dest="action", required=True)
    b = bsub.add_parser("build")
    b.add_argument("mapfile")
    b.add_argument("pathfile", nargs="?")
    b.add_argument("--dot", default=None, help="write the block graph in DOT format ('-' for stdout)")
    b.add_argument("--out", default=None, help="write the gluing file here instead of stdout")

    p = sub.add_parser("bounds", help="volume and translation length bounds")
    p.add_argument("mapfile")
    p.add_argument("pathfile", nargs="?")
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("certify", help="irreducibility certificate")
    p.add_argument("mapfile")

    p = sub.add_parser("example", help="print an example map bundle")
    p.add_argument("which", choices=["fenley", "laddershift", "sharp", "demo", "random"])
    p.add_argument("--ends", type=_shift_vector, default=None, help="shift vector, e.g. 1,-1")
    p.add_argument("--strips", type=int, default=1)
    p.add_argument("--genus", type=int, default=3)
    p.add_argument("--stub-depth", type=int, default=2)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--partial", action="store_true")
    return ap


def _shift_vector(text: str) -> tuple[int, ...]:
    try:
        w = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shift vector {text!r}") from None
    if sum(w) != 0 or 0 in w or len(w) < 2:
        raise argparse.ArgumentTypeError(f"shift vector {text!r} must be nonzero entries summing to zero")
    return w


def _precision(flag: int | None, environ) -> int:
    raw = environ.get("PANTO_PRECISION")
    value = flag if flag is not None else DEFAULT_PRECISION
    if raw is not None:
        try:
            value = int(raw)
        except ValueError:
            raise _ConfigError(f"PANTO_PRECISION={raw!r} is not an integer") from None
    if not 8 <= value <= 30:
        raise _ConfigError(f"precision {value} is outside 8..30")
    return value


def config_from_args(argv: Sequence[str], environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    ns = _parser().parse_args(list(argv))
    precision = _precision(ns.precision, environ)
    cmd = Command(ns.command)
    opts: dict = {}
    if cmd is Command.VALIDATE:
        inputs = tuple(x for x in (ns.mapfile, ns.pathfile) if x)
    elif cmd is Command.FAREY:
        inputs = (ns.op, ns.a, ns.b)
    elif cmd is Command.PATH_WEIGHT:
        inputs = (ns.pathfile,)
    elif cmd is Command.BLOCKS:
        inputs = tuple(x for x in (ns.mapfile, ns.pathfile) if x)
        return RunConfig(cmd, inputs, dot=ns.dot, out=ns.out, precision=precision, seed=ns.seed)
    elif cmd is Command.BOUNDS:
        inputs = tuple(x for x in (ns.mapfile, ns.pathfile) if x)
        opts["power"] = ns.power
    elif cmd is Command.CERTIFY:
        inputs = (ns.mapfile,)
    else:
        inputs = (ns.which,)
        opts = {"ends": ns.ends, "strips": ns.strips, "genus": ns.genus, "stub_depth": ns.stub_depth, "partial": ns.partial}
        if ns.k is not None:
            opts["k"] = ns.k
    return RunConfig(cmd, inputs, json=getattr(ns, "json", False), precision=precision, seed=ns.seed, options=opts)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
    except _ConfigError as exc:
        sys.stderr.write(f"E:config {exc}\n")
        return 1
    except SystemExit as exc:
        return int(exc.code or 0) and 1
    with mpmath.workdps(cfg.precision + 10):
        return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
