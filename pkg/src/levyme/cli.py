"""Command-line front end.

One verb per invocation; CSV with a single header line on stdout, all
diagnostics on stderr. Numbers are printed with 17 significant digits so
equal inputs give byte-identical output. Exit codes: 0 success, 1 failed
validation suite or internal numeric failure, 2 bad model config or bad
flag values, 3 violated mathematical precondition, 64 unknown verb.

Model config files are JSON:

    {
      "drift": 0.25,
      "sigma": 0.0,
      "neg_jumps": {"lambda": 1.0, "num": [3.0, 2.0], "den": [3.0, 4.0]},
      "pos_jumps": {"lambda": 0.5, "num": [8.0, 2.8], "den": [8.0, 6.0]}
    }

Either jump block may be omitted. `num` and `den` hold ascending-power
coefficients of the side's magnitude tail transform; the denominator's
leading (monic) coefficient is implied. Jump sides given by arbitrary
callables cannot be expressed in files; build those through the library
or name a shipped preset (for example `--model hyperexp_cp`).
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

import numpy as np
from scipy.integrate import quad

from ._util import as_real
from .errors import (LevyMEError, NumericsError, PreconditionError,
                     ValidationError)
from .factorization import (build_component, infimum_law, supremum_law,
                            wiener_hopf_residual)
from .model import LevyModel, MEJumpSpec, build_me_jump
from .occupation import (ladder_exponent, occupation_identity_residual,
                         occupation_limit, occupation_mgf,
                         occupation_profile)
from .overshoot import discounted_overshoot, overshoot_limit
from .presets import PRESET_NAMES, preset
from .roots import solve_roots
from .simulate import BATCH, FunctionalRequest, SimConfig, simulate

VERBS = ("roots", "infimum", "supremum", "wh-check", "overshoot",
         "occupation", "ladder", "simulate", "validate")

_REQUEST_FIELDS = {"x": float, "u": float, "lo": float, "hi": float}
_REQUEST_KINDS = ("inf_cdf", "inf_atom", "sup_tail", "occ_mgf",
                  "passage_laplace", "overshoot_atom", "overshoot_prob")


def _diag(msg: str) -> None:
    print(msg, file=sys.stderr)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return f"{float(v):.17g}"


def _emit(header, rows) -> None:
    out = sys.stdout
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")


# ------------------------------------------------------------------ #
# model configs


def _jump_block(side: str, name: str, block) -> object:
    if not isinstance(block, dict):
        raise ValidationError(f"{name}: expected an object")
    if "general" in block:
        raise ValidationError(
            f"{name}.general: callable jump sides are not expressible in "
            "config files; build them through the library API")
    missing = [k for k in ("lambda", "num", "den") if k not in block]
    if missing:
        raise ValidationError(f"{name}: missing field(s) {missing}")
    unknown = [k for k in block if k not in ("lambda", "num", "den")]
    if unknown:
        raise ValidationError(f"{name}: unknown field(s) {unknown}")
    try:
        lam = float(block["lambda"])
        num = [float(v) for v in block["num"]]
        den = [float(v) for v in block["den"]]
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name}: {exc}") from None
    return build_me_jump(side, lam, num, den)


def load_model(path: str) -> LevyModel:
    """Model from a JSON config file, or from a preset name."""
    if not os.path.exists(path) and path in PRESET_NAMES:
        return preset(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read model config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: top level must be an object")
    unknown = [k for k in doc
               if k not in ("drift", "sigma", "neg_jumps", "pos_jumps")]
    if unknown:
        raise ValidationError(f"{path}: unknown field(s) {unknown}")
    for field in ("drift", "sigma"):
        if field not in doc:
            raise ValidationError(f"{path}: missing field {field!r}")
        if not isinstance(doc[field], (int, float)):
            raise ValidationError(f"{path}: {field} must be a number")
    neg = pos = None
    if "neg_jumps" in doc:
        neg = _jump_block("-", f"{path}: neg_jumps", doc["neg_jumps"])
    if "pos_jumps" in doc:
        pos = _jump_block("+", f"{path}: pos_jumps", doc["pos_jumps"])
    model = LevyModel(drift=float(doc["drift"]), sigma=float(doc["sigma"]),
                      neg=neg, pos=pos)
    if not model.side_is_me("-") or not model.side_is_me("+"):
        _diag("note: one jump side is non-rational; slower inversion "
              "routes will be used")
    return model


def model_to_config(model: LevyModel) -> dict:
    """Dict mirror of a file-expressible model; inverse of load_model."""
    doc = {"drift": model.drift, "sigma": model.sigma}
    for attr, key in (("neg", "neg_jumps"), ("pos", "pos_jumps")):
        spec = getattr(model, attr)
        if spec is None:
            continue
        if not isinstance(spec, MEJumpSpec):
            raise ValidationError(
                "callable jump sides are not expressible in config files")
        doc[key] = {"lambda": spec.intensity, "num": list(spec.num),
                    "den": list(spec.den)}
    return doc


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError("--xgrid expects lo:hi:n")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValidationError(f"--xgrid: {exc}") from None
    if n < 1:
        raise ValidationError("--xgrid: n must be at least 1")
    return np.linspace(lo, hi, n)


def _parse_functional(text: str) -> FunctionalRequest:
    kind, _, rest = text.partition(":")
    if kind not in _REQUEST_KINDS:
        raise ValidationError(
            f"unknown functional {kind!r}; choose from "
            f"{', '.join(_REQUEST_KINDS)}")
    kwargs = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq or key not in _REQUEST_FIELDS:
                raise ValidationError(
                    f"bad functional parameter {item!r}; expected "
                    f"key=value with key in {sorted(_REQUEST_FIELDS)}")
            try:
                kwargs[key] = _REQUEST_FIELDS[key](val)
            except ValueError as exc:
                raise ValidationError(f"functional {key}: {exc}") from None
    return FunctionalRequest(kind, **kwargs)


# ------------------------------------------------------------------ #
# verbs


def _points(args) -> np.ndarray:
    if args.xgrid is not None:
        return _parse_grid(args.xgrid)
    return np.array([args.x])


def _cmd_roots(model, args) -> int:
    rows = []
    for side in ("-", "+"):
        rs = solve_roots(model, args.s, side)
        order = np.argsort(rs.roots)
        for r, resid in zip(rs.roots[order], rs.residuals[order]):
            rows.append((side, r.real, r.imag, resid))
    _emit(("side", "re", "im", "residual"), rows)
    return 0


def _cmd_infimum(model, args) -> int:
    law = infimum_law(model, args.s)
    xs = _points(args)
    _emit(("x", "value"), [(x, law.tail(float(x))) for x in xs])
    return 0


def _cmd_supremum(model, args) -> int:
    law = supremum_law(model, args.s)
    xs = _points(args)
    _emit(("x", "value"), [(x, law.tail(float(x))) for x in xs])
    return 0


def _cmd_wh_check(model, args) -> int:
    omegas = np.geomspace(0.1, args.omega_max, args.points)
    rows = [(w, wiener_hopf_residual(model, args.s, 1j * w)) for w in omegas]
    _diag(f"max residual {max(r for _, r in rows):.3e} over "
          f"{len(rows)} frequencies")
    _emit(("omega", "residual"), rows)
    return 0


def _cmd_overshoot(model, args) -> int:
    if args.s == 0.0:
        law = overshoot_limit(model, args.level)
    else:
        law = discounted_overshoot(model, args.s, args.level)
    vs = _parse_grid(args.xgrid) if args.xgrid is not None \
        else np.linspace(0.0, 4.0, 41)
    if np.any(vs < 0):
        raise ValidationError("overshoot grid must be nonnegative")
    dens = law.density(vs)
    rows = [(v, d, law.atom, law.total_mass) if i == 0 else (v, d, "", "")
            for i, (v, d) in enumerate(zip(vs, dens))]
    _emit(("v", "density", "atom", "total_mass"), rows)
    return 0


def _cmd_occupation(model, args) -> int:
    xs = _points(args)
    if args.s == 0.0:
        vals = [occupation_limit(model, args.u, float(x)) for x in xs]
    elif args.xgrid is not None:
        vals = occupation_profile(model, args.s, args.u, xs)
    else:
        vals = [occupation_mgf(model, args.s, args.u, args.x)]
    _emit(("x", "D"), list(zip(xs, vals)))
    return 0


def _cmd_ladder(model, args) -> int:
    _emit(("r", "kappa"), [(args.r, ladder_exponent(model, args.s, args.r))])
    return 0


def _cmd_simulate(model, args) -> int:
    req = _parse_functional(args.functional)
    cfg = SimConfig(paths=args.paths, seed=args.seed, grid=args.grid)
    _diag(f"simulate: kind={req.kind} paths={args.paths} seed={args.seed} "
          f"threads={cfg.resolved_threads()} batch={BATCH}")
    res = simulate(model, args.s, req, cfg)
    _emit(("mean", "std_error", "n"),
          [(res.estimate, res.se, res.paths)])
    return 0


def _validate_checks(model, s: float, tol: float):
    """Yield (check, value, threshold, passed) rows of the invariant suite."""
    for side in ("-", "+"):
        if not model.side_is_me(side):
            continue    # roots live only in ME half-planes
        rs = solve_roots(model, s, side)
        resid = float(np.max(rs.residuals)) if len(rs.residuals) else 0.0
        yield (f"root_residual_{side}", resid, 1e-9 * (1.0 + s))
        want = model.root_count(side)
        yield (f"root_count_{side}", abs(len(rs.roots) - want), 0.5)
    wh = max(wiener_hopf_residual(model, s, 1j * w)
             for w in np.geomspace(0.1, 50.0, 40))
    yield ("wh_residual", wh, max(tol, 1e-8))
    for side, law in (("sup", supremum_law(model, s)),
                      ("inf", infimum_law(model, s))):
        sign = 1.0 if side == "sup" else -1.0
        total, err = quad(lambda t: float(law.density(sign * t)), 0.0,
                          np.inf, limit=400)
        yield (f"{side}_normalization", abs(law.atom + total - 1.0),
               max(tol, 10.0 * err, 1e-8))
        yield (f"{side}_mgf_at_zero", abs(as_real(law.mgf(0.0)) - 1.0), 0.0)
    if model.sigma > 0 or model.drift != 0:
        # the x > 0 finite difference needs the closed-form route; with a
        # callable plus side its quadrature noise would swamp the identity
        xs = (-0.5, 0.4) if model.side_is_me("+") else (-0.5, -0.1)
        for x in xs:
            yield (f"occupation_identity_x={x:g}",
                   occupation_identity_residual(model, s, x),
                   max(tol, 1e-6))
    rt = True
    try:
        doc = model_to_config(model)
        back = load_model_from_dict(doc)
        rt = (back.drift == model.drift and back.sigma == model.sigma
              and _same_jumps(back, model))
    except ValidationError:
        pass  # callable side: round-trip not applicable
    yield ("config_round_trip", 0.0 if rt else 1.0, 0.5)


def _same_jumps(a: LevyModel, b: LevyModel) -> bool:
    for attr in ("neg", "pos"):
        sa, sb = getattr(a, attr), getattr(b, attr)
        if (sa is None) != (sb is None):
            return False
        if sa is None:
            continue
        if (sa.intensity != sb.intensity
                or list(sa.num) != list(sb.num)
                or list(sa.den) != list(sb.den)):
            return False
    return True


def load_model_from_dict(doc: dict) -> LevyModel:
    """Same schema as load_model, starting from a parsed document."""
    neg = pos = None
    if "neg_jumps" in doc:
        neg = _jump_block("-", "neg_jumps", doc["neg_jumps"])
    if "pos_jumps" in doc:
        pos = _jump_block("+", "pos_jumps", doc["pos_jumps"])
    return LevyModel(drift=float(doc["drift"]), sigma=float(doc["sigma"]),
                     neg=neg, pos=pos)


def _cmd_validate(model, args) -> int:
    rows = []
    failures = 0
    for check, value, threshold in _validate_checks(model, args.s, args.tol):
        ok = value <= threshold
        failures += 0 if ok else 1
        rows.append((check, value, threshold, "pass" if ok else "fail"))
    _emit(("check", "value", "threshold", "status"), rows)
    if failures:
        _diag(f"validate: {failures} check(s) failed")
        return 1
    return 0


_COMMANDS = {
    "roots": _cmd_roots,
    "infimum": _cmd_infimum,
    "supremum": _cmd_supremum,
    "wh-check": _cmd_wh_check,
    "overshoot": _cmd_overshoot,
    "occupation": _cmd_occupation,
    "ladder": _cmd_ladder,
    "simulate": _cmd_simulate,
    "validate": _cmd_validate,
}


def _build_parser(verb: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog=f"levyme {verb}",
        description=f"levyme verb {verb!r}; CSV on stdout, logs on stderr.")
    # let values like -2:0:5 or -1e-3 follow a flag without being mistaken
    # for option names (no option here starts with a digit)
    p._negative_number_matcher = re.compile(r"^-\d[\d.:eE+-]*$")
    p.add_argument("--model", required=True,
                   help="path to a JSON model config, or a preset name "
                        f"({', '.join(PRESET_NAMES)})")
    if verb == "overshoot":
        p.add_argument("--s", "--discount", dest="s", type=float,
                       default=1.0, help="kill rate; 0 selects the "
                       "long-run limit law (needs negative mean)")
        p.add_argument("--level", type=float, required=True,
                       help="barrier height x > 0")
        p.add_argument("--xgrid", default=None,
                       help="overshoot points lo:hi:n (default 0:4:41)")
    else:
        p.add_argument("--s", type=float, default=1.0, help="kill rate")
    if verb in ("infimum", "supremum", "occupation"):
        p.add_argument("--x", type=float, default=0.0, help="spatial point")
        p.add_argument("--xgrid", default=None, help="spatial grid lo:hi:n")
    if verb == "occupation":
        p.add_argument("--u", type=float, required=True,
                       help="occupation transform argument u >= 0")
    if verb == "ladder":
        p.add_argument("--r", type=float, required=True,
                       help="spatial argument of the ladder exponent")
    if verb == "wh-check":
        p.add_argument("--omega-max", type=float, default=50.0,
                       help="top of the frequency sweep")
        p.add_argument("--points", type=int, default=200,
                       help="number of frequencies")
    if verb == "simulate":
        p.add_argument("--functional", required=True,
                       help="what to estimate, e.g. sup_tail:x=1 or "
                            "occ_mgf:x=0,u=1; kinds: "
                            + ", ".join(_REQUEST_KINDS))
        p.add_argument("--paths", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--grid", type=int, default=1000,
                       help="time steps for sigma > 0 occupation")
    if verb == "validate":
        p.add_argument("--tol", type=float, default=1e-8,
                       help="threshold for the residual checks")
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        _diag("usage: levyme VERB [flags]; verbs: " + ", ".join(VERBS))
        _diag("run `levyme VERB --help` for per-verb flags")
        return 0 if argv else 64
    verb, rest = argv[0], argv[1:]
    if verb not in VERBS:
        _diag(f"unknown verb {verb!r}; verbs: {', '.join(VERBS)}")
        return 64
    parser = _build_parser(verb)
    try:
        args = parser.parse_args(rest)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for bad flags; keep its code
        return int(exc.code or 0)
    try:
        model = load_model(args.model)
        return _COMMANDS[verb](model, args)
    except ValidationError as exc:
        _diag(f"error: {exc}")
        return 2
    except PreconditionError as exc:
        _diag(f"error: {exc}")
        return 3
    except (NumericsError, LevyMEError) as exc:
        _diag(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
