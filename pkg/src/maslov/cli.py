"""Batch command line front end: experiment specifications in, deterministic
machine-readable reports out.

Commands (the "command" field of a spec):

* index     -- compute a triple signature, a Leray index of two cover points,
               or the CLM index of a chart path
* holonomy  -- transport along a chart path and emit the unwrapped angle and
               phase traces
* verify    -- run a theorem verifier on a chart path (closed paths check the
               holonomy law, open paths the dual-transport law)
* report    -- run the built-in catalog battery

Exit codes: 0 pass, 2 numerical assertion failure, 1 malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import geometry
from .core import DEFAULT_TOLERANCES, LagrangianFrame, Tolerances, line_frame
from .errors import MaslovError, SpecError
from .geometry import (ParamPath, circle_chart, curve_chart_from_series,
                       flat_plane_chart, fourth_root_label,
                       gradient_graph_chart, product_torus_chart,
                       tangent_lagrangian_path, transport_frame,
                       verify_corollary1, verify_theorem1, verify_theorem2)
from .index import (CoverPoint, clm_index, clm_index_mod4, kashiwara_signature,
                    leray_index, lift_path)
from .metaplectic import ground_state, lift_frame_path_trace

SPEC_VERSION = "1"
CONVENTION_PROFILES = ("paper-v1",)


# ---------------------------------------------------------------------------
# canonical serialization (byte-stable across runs)


def _canon(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        v = float(obj)
        out.append("%.17g" % v if np.isfinite(v) else '"%s"' % repr(v))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(",")
            _canon(v, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, k in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(str(k), ensure_ascii=True) + ":")
            _canon(obj[k], out)
        out.append("}")
    else:
        raise SpecError("report", "unserializable value of type %s" % type(obj).__name__)


def canonical_json(obj) -> str:
    out = []
    _canon(obj, out)
    return "".join(out) + "\n"


def trace_csv(rows) -> str:
    lines = ["t,theta_unwrapped,phase_re,phase_im"]
    for t, theta, pr, pi in rows:
        lines.append(",".join("%.17g" % float(v) for v in (t, theta, pr, pi)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# strict spec parsing


def _require(d, key, path, typ=None):
    if key not in d:
        raise SpecError("%s.%s" % (path, key), "missing required field")
    v = d[key]
    if typ is not None and not isinstance(v, typ):
        raise SpecError("%s.%s" % (path, key), "expected %s" % typ.__name__)
    return v


def _check_keys(d, allowed, path):
    if not isinstance(d, dict):
        raise SpecError(path, "expected an object")
    for k in d:
        if k not in allowed:
            raise SpecError("%s.%s" % (path, k), "unknown field")


def parse_tolerances(spec, path="tolerances",
                     phase_override=None) -> Tolerances:
    spec = spec or {}
    _check_keys(spec, {"residual_tol", "rank_tol", "phase_tol"}, path)
    kw = {}
    for k in ("residual_tol", "rank_tol", "phase_tol"):
        if k in spec:
            if not isinstance(spec[k], (int, float)) or spec[k] <= 0:
                raise SpecError("%s.%s" % (path, k), "must be a positive number")
            kw[k] = float(spec[k])
    if phase_override is not None:
        kw["phase_tol"] = float(phase_override)
    return Tolerances(**{**DEFAULT_TOLERANCES.__dict__, **kw})


def build_chart(spec, path="chart"):
    name = _require(spec, "name", path, str)
    if name == "circle":
        _check_keys(spec, {"name", "radius"}, path)
        return circle_chart(float(spec.get("radius", 1.0)))
    if name == "product_torus":
        _check_keys(spec, {"name", "radii"}, path)
        return product_torus_chart(tuple(spec.get("radii", (1.0, 1.0))))
    if name == "gradient_graph":
        _check_keys(spec, {"name", "phi_coeffs", "hessian"}, path)
        if "phi_coeffs" in spec:
            return gradient_graph_chart(phi_coeffs=spec["phi_coeffs"])
        if "hessian" in spec:
            return gradient_graph_chart(hessian=spec["hessian"])
        raise SpecError(path, "gradient_graph needs phi_coeffs or hessian")
    if name == "flat_plane":
        _check_keys(spec, {"name", "angle", "frame"}, path)
        if "frame" in spec:
            return flat_plane_chart(LagrangianFrame(np.asarray(spec["frame"], dtype=float)))
        return flat_plane_chart(line_frame(float(spec.get("angle", 0.0))))
    if name == "custom":
        _check_keys(spec, {"name", "q", "p"}, path)
        return curve_chart_from_series(_require(spec, "q", path, dict),
                                       _require(spec, "p", path, dict))
    raise SpecError("%s.name" % path, "unknown chart %r" % name)


def build_path(spec, chart, path="path") -> ParamPath:
    kind = _require(spec, "kind", path, str)
    if kind == "arc":
        _check_keys(spec, {"kind", "turns", "samples", "start"}, path)
        return ParamPath.circle_arc(float(_require(spec, "turns", path, (int, float))),
                                    int(spec.get("samples", 200)),
                                    float(spec.get("start", 0.0)))
    if kind == "interval":
        _check_keys(spec, {"kind", "start", "stop", "samples", "closed"}, path)
        return ParamPath.line(spec.get("start", [0.0] * chart.n),
                              _require(spec, "stop", path),
                              int(spec.get("samples", 200)),
                              bool(spec.get("closed", False)))
    if kind == "torus_loop":
        _check_keys(spec, {"kind", "winding", "samples", "base"}, path)
        return ParamPath.torus_loop(_require(spec, "winding", path, list),
                                    int(spec.get("samples", 400)),
                                    tuple(spec.get("base", (0.0, 0.0))))
    if kind == "samples":
        _check_keys(spec, {"kind", "values", "closed"}, path)
        return ParamPath(np.asarray(_require(spec, "values", path, list), dtype=float),
                         bool(spec.get("closed", False)))
    raise SpecError("%s.kind" % path, "unknown path kind %r" % kind)


def _cover_point_from_spec(spec, path):
    _check_keys(spec, {"w_re", "w_im", "theta"}, path)
    w = np.asarray(_require(spec, "w_re", path, list), dtype=float) \
        + 1j * np.asarray(_require(spec, "w_im", path, list), dtype=float)
    return CoverPoint(w, float(_require(spec, "theta", path, (int, float))))


# ---------------------------------------------------------------------------
# commands


def _run_index(spec, tol):
    payload = _require(spec, "index", "spec", dict)
    _check_keys(payload, {"kashiwara", "leray", "clm"}, "spec.index")
    results = {}
    if "kashiwara" in payload:
        ka = payload["kashiwara"]
        _check_keys(ka, {"angles", "frames"}, "spec.index.kashiwara")
        if "angles" in ka:
            frames = [line_frame(float(a)) for a in ka["angles"]]
        else:
            frames = [LagrangianFrame(np.asarray(f, dtype=float))
                      for f in _require(ka, "frames", "spec.index.kashiwara", list)]
        if len(frames) != 3:
            raise SpecError("spec.index.kashiwara", "exactly three Lagrangians required")
        results["tau"] = kashiwara_signature(*frames, tol=tol)
    if "leray" in payload:
        le = payload["leray"]
        _check_keys(le, {"x", "y"}, "spec.index.leray")
        x = _cover_point_from_spec(_require(le, "x", "spec.index.leray", dict),
                                   "spec.index.leray.x")
        y = _cover_point_from_spec(_require(le, "y", "spec.index.leray", dict),
                                   "spec.index.leray.y")
        results["mu"] = leray_index(x, y, tol)
    if "clm" in payload:
        cl = payload["clm"]
        _check_keys(cl, {"chart", "path"}, "spec.index.clm")
        chart = build_chart(_require(cl, "chart", "spec.index.clm", dict),
                            "spec.index.clm.chart")
        ppath = build_path(_require(cl, "path", "spec.index.clm", dict), chart,
                           "spec.index.clm.path")
        tangent = tangent_lagrangian_path(chart, ppath, tol)
        results["mu_clm"] = clm_index(tangent, tol)
        results["mu_clm_mod4"] = clm_index_mod4(tangent, tol)
    if not results:
        raise SpecError("spec.index", "no index requested")
    return results, True


def _run_holonomy(spec, tol, refine_max):
    chart = build_chart(_require(spec, "chart", "spec", dict))
    ppath = build_path(_require(spec, "path", "spec", dict), chart)
    tr = transport_frame(chart, ppath, tol=tol, max_depth=refine_max)
    S_fr = geometry._frame_conjugated_path(tr, tol)
    states = lift_frame_path_trace(S_fr, ground_state(chart.n), tol,
                                   max_depth=refine_max)
    theta0 = float(np.angle(np.linalg.det(tr.tangent_path.souriau[0])))
    lifts = lift_path(tr.tangent_path, theta0, tol)
    rows = [(t, pt.theta, st.c.real, st.c.imag)
            for t, pt, st in zip(tr.params, lifts, states)]
    phase = states[-1].c
    label, resid = fourth_root_label(phase, tol)
    results = {
        "trace": [[float(v) for v in row] for row in rows],
        "theta_total": float(lifts[-1].theta - lifts[0].theta),
        "phase": [phase.real, phase.imag],
        "phase_label": label,
        "phase_label_residual": resid,
        "sampling": geometry._sampling_stats(tr),
    }
    return results, True


def _run_verify(spec, tol, refine_max):
    theorem = spec.get("theorem", "auto")
    if theorem not in ("auto", "1", "2", "corollary1"):
        raise SpecError("spec.theorem", "must be auto, 1, 2 or corollary1")
    chart = build_chart(_require(spec, "chart", "spec", dict))
    if theorem == "corollary1":
        loop_specs = _require(spec, "loops", "spec", list)
        loops = [build_path(ls, chart, "spec.loops[%d]" % i)
                 for i, ls in enumerate(loop_specs)]
        rep = verify_corollary1(chart, loops, tol)
        return rep, rep["pass"]
    ppath = build_path(_require(spec, "path", "spec", dict), chart)
    if theorem == "auto":
        theorem = "1" if ppath.closed else "2"
    if theorem == "1":
        rep = verify_theorem1(chart, ppath, tol)
    else:
        levels = tuple(spec.get("levels", (0, 1, 2)))
        rep = verify_theorem2(chart, ppath, tol, levels=levels)
    return rep, rep["pass"]


def _run_report(spec, tol, refine_max):
    """Built-in catalog battery; deterministic."""
    circ = circle_chart()
    torus = product_torus_chart()
    cases = [
        ("circle_loop", lambda: verify_theorem1(circ, ParamPath.circle_arc(1.0, 300), tol)),
        ("circle_double_loop", lambda: verify_theorem1(circ, ParamPath.circle_arc(2.0, 600), tol)),
        ("circle_quarter_arc", lambda: verify_theorem2(circ, ParamPath.circle_arc(0.25, 80), tol)),
        ("circle_three_quarter_arc", lambda: verify_theorem2(circ, ParamPath.circle_arc(0.75, 240), tol)),
        ("circle_closed_tangent", lambda: verify_theorem2(circ, ParamPath.circle_arc(1.0, 300), tol)),
        ("torus_loop_10", lambda: verify_theorem1(torus, ParamPath.torus_loop((1, 0), 400), tol)),
        ("torus_loop_01", lambda: verify_theorem1(torus, ParamPath.torus_loop((0, 1), 400), tol)),
        ("torus_loop_11", lambda: verify_theorem1(torus, ParamPath.torus_loop((1, 1), 400), tol)),
        ("torus_corollary1", lambda: verify_corollary1(
            torus, [ParamPath.torus_loop((1, 0), 400), ParamPath.torus_loop((0, 1), 400)], tol)),
    ]
    results = {}
    ok = True
    for name, fn in cases:
        rep = fn()
        results[name] = rep
        ok = ok and rep["pass"]
    return results, ok


def run(spec: dict, out_path=None, out_format=None, tol_phase=None,
        seed=None, refine_max=None, convention=None):
    """Execute one experiment spec; returns (report, exit_code)."""
    _check_keys(spec, {"spec_version", "command", "chart", "path", "theorem",
                       "loops", "levels", "index", "tolerances", "output",
                       "seed", "refine_max"}, "spec")
    version = spec.get("spec_version", SPEC_VERSION)
    if str(version) != SPEC_VERSION:
        raise SpecError("spec.spec_version", "unsupported version %r" % version)
    convention = convention or os.environ.get("MASLOV_CONVENTION_LEDGER", "paper-v1")
    if convention not in CONVENTION_PROFILES:
        raise SpecError("environment.MASLOV_CONVENTION_LEDGER",
                        "unknown convention profile %r" % convention)
    command = _require(spec, "command", "spec", str)
    tol = parse_tolerances(spec.get("tolerances"), phase_override=tol_phase)
    refine_max = int(refine_max if refine_max is not None
                     else spec.get("refine_max", 12))
    seed = seed if seed is not None else spec.get("seed", 0)

    if command == "index":
        results, ok = _run_index(spec, tol)
    elif command == "holonomy":
        results, ok = _run_holonomy(spec, tol, refine_max)
    elif command == "verify":
        results, ok = _run_verify(spec, tol, refine_max)
    elif command == "report":
        results, ok = _run_report(spec, tol, refine_max)
    else:
        raise SpecError("spec.command", "unknown command %r" % command)

    report = {
        "spec_version": SPEC_VERSION,
        "convention_profile": convention,
        "command": command,
        "seed": int(seed),
        "inputs": spec,
        "results": results,
        "pass": bool(ok),
    }

    output = spec.get("output") or {}
    _check_keys(output, {"path", "format"}, "spec.output")
    fmt = out_format or output.get("format", "json")
    if fmt not in ("json", "csv"):
        raise SpecError("spec.output.format", "must be json or csv")
    dest = out_path or output.get("path")
    if fmt == "csv":
        if command != "holonomy":
            raise SpecError("spec.output.format", "csv traces exist for holonomy only")
        payload = trace_csv(results["trace"])
    else:
        payload = canonical_json(report)
    if dest:
        with open(dest, "w") as fh:
            fh.write(payload)
    return report, (0 if ok else 2), payload


def _failing_names(node, prefix=""):
    """Paths of nested report entries carrying pass = false."""
    out = []
    if isinstance(node, dict):
        if node.get("pass") is False:
            out.append(prefix or "results")
        for k, v in node.items():
            out.extend(_failing_names(v, f"{prefix}.{k}" if prefix else k))
    elif isinstance(node, list):
        for i, v in enumerate(node):
            out.extend(_failing_names(v, f"{prefix}[{i}]"))
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="maslov", description="Maslov index and holonomy experiment runner")
    ap.add_argument("--spec", required=True, help="experiment spec JSON file")
    ap.add_argument("--out", default=None, help="output file (overrides spec)")
    ap.add_argument("--format", default=None, choices=("json", "csv"))
    ap.add_argument("--tol-phase", type=float, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--refine-max", type=int, default=None)
    args = ap.parse_args(argv)

    try:
        with open(args.spec) as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print("maslov: cannot read spec: %s" % exc, file=sys.stderr)
        return 1

    try:
        report, code, payload = run(spec, out_path=args.out, out_format=args.format,
                                    tol_phase=args.tol_phase, seed=args.seed,
                                    refine_max=args.refine_max)
    except SpecError as exc:
        print("maslov: invalid spec: %s" % exc, file=sys.stderr)
        return 1
    except MaslovError as exc:
        print("maslov: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 2

    if not args.out and not (spec.get("output") or {}).get("path"):
        sys.stdout.write(payload)
    if code == 0:
        print("maslov %s: pass" % report["command"])
    else:
        failing = ", ".join(_failing_names(report["results"])) or "pass=false"
        print("maslov %s: FAIL (%s)" % (report["command"], failing),
              file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
