"""Command-line front end: ``squeezelab <command> [options]``.

Exit codes: 0 success or all checks passed, 2 a verification check failed,
1 usage or domain error.  JSON output carries ``format_version``; keys are
sorted and no timing data is included, so identical invocations produce
byte-identical files.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .canonical import AnnulusSlitMap, annulus_slit_map_eval
from .domains.model import JordanDomain, RingDomain, SlitDiskDomain, ThreefoldExample
from .domains.raster import rasterize, rasterize_pointed
from .domains.schema import SpecError, canonical_json, load_domain
from .errors import SqueezeLabError
from .modulus import reduced_module, ring_modulus
from .squeezing import squeeze_bounds, squeeze_doubly_connected
from .svg import render_svg
from .verify import SUITES

FORMAT_VERSION = 1
CACHE_ENV = "SQUEEZELAB_CACHE_DIR"
SWEEP_COLUMNS = ("z_re", "z_im", "S_lo", "S_hi", "direction")


class UsageError(SqueezeLabError):
    pass


def _resolution(text):
    v = int(text)
    if v < 32:
        raise argparse.ArgumentTypeError("resolution must be >= 32")
    return v


def _complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--resolution", type=_resolution, default=None, help="grid resolution (>= 32)")
    common.add_argument("--output", "-o", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv", "svg"), default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cache-dir", default=None, help=f"result cache directory (default: ${CACHE_ENV})")
    common.add_argument("--no-cache", action="store_true", help="bypass the result cache")

    p = argparse.ArgumentParser(prog="squeezelab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"squeezelab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("modulus", parents=[common], help="modulus of a ring domain or slit-disk condenser")
    s.add_argument("--domain", required=True)
    s.add_argument("--grid", choices=("auto", "log_polar", "cartesian"), default="auto")

    s = sub.add_parser("reduced-modulus", parents=[common], help="reduced module m(D, z) of a simply connected D")
    s.add_argument("--domain", required=True)
    s.add_argument("--z", type=_complex, default=None)

    s = sub.add_parser("slit-map", parents=[common], help="annulus-to-slit-disk map f(z) = a P(z/a) / P(z a)")
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--truncation", type=int, default=30)
    s.add_argument("--z", type=_complex, action="append", default=[], help="evaluation point (repeatable)")

    s = sub.add_parser("squeeze", parents=[common], help="squeezing function value or certified interval")
    s.add_argument("--domain", required=True)
    s.add_argument("--z", type=_complex, required=True)

    s = sub.add_parser("sweep", parents=[common], help="squeezing over a grid of points (CSV)")
    s.add_argument("--domain", required=True)
    s.add_argument("--radii", default=None, help="comma-separated radii on the ray --angle")
    s.add_argument("--angle", type=float, default=0.0)
    s.add_argument("--box", default=None, help="x0,x1,nx,y0,y1,ny rectangular grid")

    s = sub.add_parser("partition", parents=[common], help="optimize the weighted extremal partition")
    s.add_argument("--domain", default=None, help="barrier_set spec (default: a standard set)")
    s.add_argument("--barrier-index", type=int, default=0, help="standard barrier set index 0..4")
    s.add_argument("--alpha1", type=float, default=1.0)
    s.add_argument("--alpha2", type=float, default=1.0)
    s.add_argument("--harmonics", type=int, default=4)
    s.add_argument("--max-evals", type=int, default=None)

    s = sub.add_parser("verify", parents=[common], help="run a named verification suite")
    s.add_argument("suite", choices=sorted(SUITES))
    s.add_argument("--q", type=float, default=0.1)
    s.add_argument("--a", type=float, default=0.4)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--r", type=float, default=0.5)

    s = sub.add_parser("plot", parents=[common], help="SVG figure of a domain")
    s.add_argument("--domain", required=True)
    s.add_argument("--z", type=_complex, action="append", default=[], help="marked point (repeatable)")
    s.add_argument("--curve", default=None, help="JSON file from `partition` whose curve is drawn")
    return p


# ------------------------------------------------------------------ commands


def _res(args, default):
    return args.resolution if args.resolution is not None else default


def _pair(z):
    return [z.real, z.imag]


def cmd_modulus(args, domain):
    if isinstance(domain, RingDomain) or isinstance(domain, SlitDiskDomain):
        grid = args.grid
        if grid == "auto":
            grid = "cartesian" if isinstance(domain, SlitDiskDomain) else "log_polar"
        if isinstance(domain, RingDomain) and domain.inner_degenerate:
            raise UsageError("modulus of a punctured domain is infinite")
        cond = rasterize(domain, resolution=_res(args, 256), grid_kind=grid)
        return {"modulus": ring_modulus(cond).to_json(), "grid": grid}, 0
    raise UsageError("modulus needs a ring or slit_disk domain")


def cmd_reduced(args, domain):
    if not isinstance(domain, JordanDomain):
        raise UsageError("reduced-modulus needs a simply connected (disk) domain")
    z = args.z if args.z is not None else complex(getattr(domain.boundary, "center", 0j))
    cond = rasterize_pointed(domain.plate_pieces(), domain.bbox(), z, _res(args, 256))
    r = reduced_module(cond, z)
    return {"reduced_modulus": r.to_json(), "z": _pair(z)}, 0


def cmd_slit_map(args, _domain):
    m = AnnulusSlitMap(args.q, args.a, args.truncation)
    values = []
    for z in args.z:
        w, err = annulus_slit_map_eval(m, z, with_error=True)
        values.append({"z": _pair(z), "f": _pair(complex(w)), "abs_f": abs(w), "error_bound": err})
    return {"q": m.q, "a": m.a, "truncation": m.truncation, "slit_radius": m.a,
            "slit_center_angle": m.slit_center_angle(), "slit_half_width": m.slit_half_width(),
            "values": values}, 0


def _squeeze(domain, z, resolution):
    if isinstance(domain, RingDomain):
        return squeeze_doubly_connected(domain, z, resolution=resolution)
    if isinstance(domain, SlitDiskDomain):
        return squeeze_bounds(domain, z, resolution=resolution)
    raise UsageError("squeeze needs a ring, annulus or slit_disk domain")


def cmd_squeeze(args, domain):
    res = _res(args, 512 if isinstance(domain, RingDomain) else 256)
    rep = _squeeze(domain, args.z, res)
    return {"z": _pair(args.z), **rep.to_json()}, 0


def _sweep_points(args):
    if args.box:
        try:
            x0, x1, nx, y0, y1, ny = [float(v) for v in args.box.split(",")]
        except ValueError as exc:
            raise UsageError("--box needs x0,x1,nx,y0,y1,ny") from exc
        xs, ys = np.linspace(x0, x1, int(nx)), np.linspace(y0, y1, int(ny))
        return [complex(x, y) for y in ys for x in xs]
    if args.radii:
        rot = complex(math.cos(args.angle), math.sin(args.angle))
        return [float(r) * rot for r in args.radii.split(",")]
    raise UsageError("sweep needs --radii or --box")


def cmd_sweep(args, domain):
    res = _res(args, 512 if isinstance(domain, RingDomain) else 256)
    rows = []
    for z in _sweep_points(args):
        if not bool(np.asarray(domain.contains(np.array([z]))).ravel()[0]):
            continue
        rep = _squeeze(domain, z, res)
        dirs = sorted({w.get("direction", w.get("kind", "")) for w in rep.witness}) if rep.kind == "exact" else []
        rows.append((z.real, z.imag, rep.lo, rep.hi, "+".join(dirs) if dirs else "interval"))
    return {"columns": list(SWEEP_COLUMNS), "rows": rows}, 0


def cmd_partition(args, domain):
    from .partition import BarrierSet, check_free_boundary_location, optimize_partition, standard_barrier_sets

    if domain is None:
        sets = standard_barrier_sets()
        if not 0 <= args.barrier_index < len(sets):
            raise UsageError(f"--barrier-index must lie in 0..{len(sets) - 1}")
        domain = sets[args.barrier_index]
    if not isinstance(domain, BarrierSet):
        raise UsageError("partition needs a barrier_set domain")
    res = optimize_partition(domain, args.alpha1, args.alpha2, harmonics=args.harmonics,
                             resolution=_res(args, 128), max_evals=args.max_evals, seed=args.seed)
    out = res.to_json()
    out["barrier"] = domain.to_json()
    out["location_check"] = check_free_boundary_location(res, domain, args.alpha1, args.alpha2)
    return out, 0


def cmd_verify(args, _domain):
    name = args.suite
    kw = {}
    if name == "rw":
        kw = {"q": args.q, "a": args.a}
    elif name == "polarization":
        kw = {"trials": args.trials, "seed": args.seed}
    elif name == "thm3":
        kw = {"n": args.n, "r": args.r}
    elif name == "lemma2":
        kw = {"seed": args.seed}
    elif name == "special":
        kw = {"seed": args.seed}
    if args.resolution is not None and name in ("thm1", "thm2", "thm3", "lemma2", "polarization"):
        kw["resolution"] = args.resolution
    result = SUITES[name](**kw)
    return result.to_json(), 0 if result.passed else 2


def cmd_plot(args, domain):
    curves = []
    if args.curve:
        with open(args.curve, encoding="utf-8") as fh:
            obj = json.load(fh)
        cand = obj.get("result", obj).get("candidate")
        if cand is None:
            raise UsageError("--curve file has no partition candidate")
        from .partition import PartitionCandidate

        curves.append(PartitionCandidate(cand["c0"], cand["fourier"]).curve)
    extent = 1.1 * max(1.0, domain.a) if isinstance(domain, ThreefoldExample) else 1.1
    return render_svg(domain, curves, args.z, title=f"squeezelab {args.domain}", extent=extent), 0


COMMANDS = {"modulus": cmd_modulus, "reduced-modulus": cmd_reduced, "slit-map": cmd_slit_map,
            "squeeze": cmd_squeeze, "sweep": cmd_sweep, "partition": cmd_partition, "verify": cmd_verify,
            "plot": cmd_plot}
DEFAULT_FORMAT = {"sweep": "csv", "plot": "svg"}


# ------------------------------------------------------------------ emission


def _clean(obj):
    """JSON-safe copy: complex -> [re, im], non-finite floats -> strings, numpy -> python."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    if isinstance(obj, (complex, np.complexfloating)):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def render(command, fmt, payload):
    if fmt == "svg":
        if not isinstance(payload, str):
            raise UsageError(f"{command} does not produce SVG output")
        return payload
    if isinstance(payload, str):
        raise UsageError(f"{command} only produces SVG output")
    if fmt == "csv":
        if "rows" not in payload:
            raise UsageError(f"{command} does not produce CSV output")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(payload["columns"])
        for row in payload["rows"]:
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
        return buf.getvalue()
    doc = {"format_version": FORMAT_VERSION, "command": command, "version": __version__,
           "result": _clean(payload)}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


# ------------------------------------------------------------------ cache


def cache_key(command, domain_json, resolution, seed, version, extra=None) -> str:
    """Stable hash of the inputs that determine an output."""
    blob = canonical_json({"command": command, "domain": domain_json, "resolution": resolution, "seed": seed,
                           "version": version, "args": extra or {}})
    return hashlib.sha256(blob.encode()).hexdigest()


def _key_args(args):
    skip = {"output", "cache_dir", "no_cache", "domain", "resolution", "seed", "command"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        if isinstance(v, complex):
            v = [v.real, v.imag]
        elif isinstance(v, list):
            v = [[x.real, x.imag] if isinstance(x, complex) else x for x in v]
        out[k] = v
    if getattr(args, "curve", None):
        with open(args.curve, "rb") as fh:
            out["curve_sha256"] = hashlib.sha256(fh.read()).hexdigest()
    return out


def cache_load(cache_dir, key):
    """Cached ``(text, exit_code)`` or None; corrupt entries warn and return None."""
    path = os.path.join(cache_dir, key + ".json")
    if not os.path.exists(path):
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            entry = json.load(fh)
        text = entry["payload"]
        if hashlib.sha256(text.encode()).hexdigest() != entry["checksum"]:
            raise ValueError("checksum mismatch")
        return text, int(entry["exit_code"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"warning: cache entry {key} is corrupt ({exc}); recomputing", file=sys.stderr)
        return None


def cache_store(cache_dir, key, text, code):
    os.makedirs(cache_dir, exist_ok=True)
    entry = {"checksum": hashlib.sha256(text.encode()).hexdigest(), "exit_code": code, "payload": text}
    fd, tmp = tempfile.mkstemp(dir=cache_dir, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(entry, fh, sort_keys=True)
        os.replace(tmp, os.path.join(cache_dir, key + ".json"))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ------------------------------------------------------------------ driver


def _write(text, output):
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    d = os.path.dirname(os.path.abspath(output))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, output)


def _report_failures(payload):
    for c in payload.get("checks", []):
        if not c["passed"]:
            print(f"FAIL {payload['suite']} {c['name']}: {c['lhs']!r} {c['op']} {c['rhs']!r}", file=sys.stderr)


def run(args) -> int:
    command = args.command
    fmt = args.format or DEFAULT_FORMAT.get(command, "json")
    if args.output is not None:
        d = os.path.dirname(os.path.abspath(args.output))
        if not os.path.isdir(d) or not os.access(d, os.W_OK):
            raise UsageError(f"output directory {d} is not writable")
    domain, spec = None, None
    if getattr(args, "domain", None) is not None:
        domain, spec = load_domain(args.domain)

    cache_dir = None if args.no_cache else (args.cache_dir or os.environ.get(CACHE_ENV))
    key = None
    if cache_dir:
        key = cache_key(command, canonical_json(spec) if spec is not None else None, args.resolution, args.seed,
                        __version__, {**_key_args(args), "format": fmt})
        hit = cache_load(cache_dir, key)
        if hit is not None:
            print(f"cache hit: {key}", file=sys.stderr)
            text, code = hit
            _write(text, args.output)
            return code

    payload, code = COMMANDS[command](args, domain)
    text = render(command, fmt, payload)
    if command == "verify" and code != 0:
        _report_failures(payload)
    if key is not None:
        cache_store(cache_dir, key, text, code)
    _write(text, args.output)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 1
    try:
        return run(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SqueezeLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
