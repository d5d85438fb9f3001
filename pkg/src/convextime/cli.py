"""Command line: evaluate, rasterize, query subdifferentials, run the verification suites.

Exit codes: 0 success, 1 a verification suite failed, 2 bad scene or arguments,
3 unsupported combination or scale.
"""

import argparse
import json
import sys

import numpy as np

from .errors import ConvexTimeError, DimensionError, UnsupportedError, ValidationError
from .gauge import gauge
from .geometry import MEMBER_TOL, require_dynamics, set_from_json
from .mintime import eval_mintime, mintime_subdiff_contains
from .oracle import DEFAULT_SEED, _json_value
from .signed import eval_mu, eval_signed_mintime, signed_distance, signed_distance_subdiff
from .verify import FAULTS, SUITES, dump_bundle, run_bundle

FUNCTIONS = ("gauge", "mintime", "signed", "sdist", "mu")
NEEDS = {"gauge": ("dynamics",), "mintime": ("dynamics", "omega"),
         "signed": ("dynamics", "omega"), "sdist": ("omega",), "mu": ("dynamics", "omega")}

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_UNSUPPORTED = 0, 1, 2, 3


class SceneError(ValidationError):
    """Problem with the scene file or a command line value."""


def fmt(x):
    """Shortest round-trip text for a float."""
    return repr(float(x))


def parse_vector(text, flag):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise SceneError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    return np.array(vals)


def load_scene(path):
    """Read a scene file into ``{"omega": set, "dynamics": set, "tol": float, "seed": int}``."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise SceneError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SceneError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SceneError(f"{path}: scene must be a JSON object")
    scene = {"tol": doc.get("tol", MEMBER_TOL), "seed": doc.get("seed", DEFAULT_SEED)}
    for key in ("omega", "dynamics"):
        if key in doc:
            try:
                scene[key] = set_from_json(doc[key])
            except (ValidationError, DimensionError) as exc:
                raise SceneError(f"{path}: field {key!r}: {exc}") from None
    if "dynamics" in scene:
        try:
            require_dynamics(scene["dynamics"])
        except ValidationError as exc:
            raise SceneError(f"{path}: field 'dynamics': {exc}") from None
    return scene


def _require(scene, fn):
    for key in NEEDS[fn]:
        if key not in scene:
            raise SceneError(f"function {fn!r} needs a {key!r} set in the scene")


def evaluate(scene, fn, x):
    """``(value, region or None, witness dict)`` for one point."""
    _require(scene, fn)
    F, omega = scene.get("dynamics"), scene.get("omega")
    if fn == "gauge":
        g = gauge(F, x)
        return g.value, None, {"witness": g.witness, "horizon": g.horizon}
    if fn == "mintime":
        r = eval_mintime(F, omega, x)
        return r.value, None, {"w": r.w, "f": r.f, "attained": r.attained}
    if fn == "mu":
        return eval_mu(F, omega, x), None, {}
    sv = signed_distance(omega, x) if fn == "sdist" else eval_signed_mintime(F, omega, x)
    return sv.value, sv.region, {"witness": sv.witness}


def cmd_eval(args, out):
    scene = load_scene(args.scene)
    x = parse_vector(args.point, "--point")
    value, region, witness = evaluate(scene, args.fn, x)
    out.write(fmt(value) + (f" {region}" if region else "") + "\n")
    record = {"fn": args.fn, "point": x, "value": value, "region": region, **witness}
    out.write(json.dumps(_json_value(record), sort_keys=True) + "\n")
    return EXIT_OK


def cmd_grid(args, out):
    scene = load_scene(args.scene)
    box = parse_vector(args.bbox, "--bbox")
    if box.size != 4:
        raise SceneError("--bbox needs x0,y0,x1,y1")
    for key in NEEDS[args.fn]:
        if key in scene and scene[key].n != 2:
            raise SceneError("grid output is only defined for 2D scenes")
    if args.res < 2:
        raise SceneError("--res must be at least 2")
    xs = np.linspace(box[0], box[2], args.res)
    ys = np.linspace(box[1], box[3], args.res)
    lines = ["x,y,value,region"]
    for y in ys:
        for x in xs:
            value, region, _ = evaluate(scene, args.fn, np.array([x, y]))
            lines.append(f"{fmt(x)},{fmt(y)},{fmt(value)},{region or ''}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_subdiff(args, out):
    scene = load_scene(args.scene)
    tol = args.tol if args.tol is not None else scene["tol"]
    x = parse_vector(args.point, "--point")
    if args.describe:
        if args.fn != "sdist":
            raise SceneError("--describe is available for --fn sdist")
        _require(scene, "sdist")
        desc = signed_distance_subdiff(scene["omega"], x)
        out.write(json.dumps(_json_value(desc.to_json()), sort_keys=True) + "\n")
        return EXIT_OK
    if args.candidate is None:
        raise SceneError("give --candidate or --describe")
    v = parse_vector(args.candidate, "--candidate")
    if args.fn == "sdist":
        _require(scene, "sdist")
        desc = signed_distance_subdiff(scene["omega"], x)
        case = signed_distance(scene["omega"], x).region
        verdict = desc.membership(v, max(tol, 1e-6))
    elif args.fn == "mintime":
        _require(scene, "mintime")
        res = mintime_subdiff_contains(scene["dynamics"], scene["omega"], x, v, tol)
        case, verdict = res.case, res.verdict
    else:
        raise SceneError("subdiff supports --fn mintime or --fn sdist")
    out.write(f"{case}: {'member' if verdict else 'non-member'}\n")
    return EXIT_OK


def cmd_verify(args, out):
    suites = SUITES if args.suite == "all" else (args.suite,)
    bundle = run_bundle(suites, seed=args.seed, scale=args.scale, fault=args.inject_fault)
    text = dump_bundle(bundle)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        for name, body in bundle["suites"].items():
            failed = [r["name"] for r in body["reports"] if r["verdict"] != "pass"]
            status = "pass" if body["passed"] else "FAIL " + ", ".join(failed)
            out.write(f"{name}: {status} ({len(body['reports'])} reports)\n")
    else:
        out.write(text)
    return EXIT_OK if bundle["passed"] else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="convextime", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="evaluate a function at a point")
    e.add_argument("--scene", required=True)
    e.add_argument("--fn", required=True, choices=FUNCTIONS)
    e.add_argument("--point", required=True)
    e.set_defaults(run=cmd_eval)

    g = sub.add_parser("grid", help="rasterize a 2D field to CSV")
    g.add_argument("--scene", required=True)
    g.add_argument("--fn", required=True, choices=FUNCTIONS)
    g.add_argument("--bbox", required=True)
    g.add_argument("--res", type=int, default=101)
    g.add_argument("--out")
    g.set_defaults(run=cmd_grid)

    s = sub.add_parser("subdiff", help="subgradient membership or description")
    s.add_argument("--scene", required=True)
    s.add_argument("--fn", default="mintime", choices=("mintime", "sdist"))
    s.add_argument("--point", required=True)
    s.add_argument("--candidate")
    s.add_argument("--describe", action="store_true")
    s.add_argument("--tol", type=float)
    s.set_defaults(run=cmd_subdiff)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--seed", type=lambda t: int(t, 0), default=DEFAULT_SEED)
    v.add_argument("--out")
    v.add_argument("--scale", type=float, default=1.0,
                   help="multiply sample counts (for quick runs)")
    v.add_argument("--inject-fault", choices=FAULTS)
    v.set_defaults(run=cmd_verify)
    return p


CSV_FLAGS = ("--point", "--candidate", "--bbox")


def _glue_csv(argv):
    """Attach CSV values to their flag so ``--bbox -3,-3,3,3`` is not read as an option."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in CSV_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None, out=None):
    out = out or sys.stdout
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_csv(argv))
    try:
        return args.run(args, out)
    except UnsupportedError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ValidationError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ConvexTimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
