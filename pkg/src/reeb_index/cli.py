"""Command-line front end: ``reeb-index <command> --input FILE [options]``.

Exit status is 0 on success, 1 when a mathematical precondition fails (the
error class name is reported) and 2 when the input cannot be parsed.
Output is JSON (sorted keys, byte-identical for identical input and seed) or
an aligned text table carrying the same numbers.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Any, Callable, Sequence

from . import bott, estimates, index, toric
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ReebIndexError, SchemaError
from .sympath import SymplecticPath

EXIT_OK, EXIT_FAILED, EXIT_PARSE = 0, 1, 2

COMMANDS = (
    "check-cone",
    "pi1",
    "hc",
    "reeb-check",
    "orbit-index",
    "index",
    "bott",
    "elliptic-check",
    "pinching",
    "prequant-hc",
    "ind-hr",
)


@dataclass(frozen=True)
class JobConfig:
    """One CLI job; the same keys are accepted from a ``--config`` JSON file.

    Attributes
    ----------
    command : str
        One of :data:`COMMANDS`.
    inputs : tuple of str
        Input JSON files; several inputs are processed independently.
    reeb : str
        ``"auto"`` or a Reeb-vector JSON file (toric commands).
    seed : int
        Seed of the deterministic Reeb perturbation.
    cutoff : int
        Degree cutoff (``hc``, ``prequant-hc``) or largest iterate (``orbit-index``).
    tol : float or None
        Override of the spectral threshold ``eig_tol``.
    fmt : str
        ``"json"`` or ``"table"``.
    bott : bool
        ``index`` also emits the Bott function.
    elliptic_check : int or None
        ``index`` also emits the ellipticity certificate at this iterate.
    """

    command: str
    inputs: tuple[str, ...] = ()
    reeb: str = "auto"
    seed: int = 0
    cutoff: int = 12
    tol: float | None = None
    fmt: str = "json"
    bott: bool = False
    elliptic_check: int | None = None

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise SchemaError(f"unknown command {self.command!r}")
        if self.cutoff < 1:
            raise SchemaError("cutoff must be positive")
        if self.fmt not in ("json", "table"):
            raise SchemaError("format must be json or table")
        if self.elliptic_check is not None and self.elliptic_check < 2:
            raise SchemaError("elliptic check needs an iterate j >= 2")
        if self.tol is not None and not self.tol > 0:
            raise SchemaError("tol must be positive")
        if not self.inputs:
            raise SchemaError("at least one --input is required")

    @classmethod
    def from_json(cls, obj: dict) -> "JobConfig":
        names = {f.name for f in fields(cls)}
        if not isinstance(obj, dict):
            raise SchemaError("job config must be a JSON object")
        unknown = set(obj) - names
        if unknown:
            raise SchemaError(f"unknown job config keys: {sorted(unknown)}")
        obj = dict(obj)
        if "inputs" in obj:
            obj["inputs"] = tuple(obj["inputs"])
        return cls(**obj)

    def tolerances(self) -> Tolerances:
        if self.tol is None:
            return DEFAULT_TOLERANCES
        return DEFAULT_TOLERANCES.with_overrides(eig_tol=self.tol)


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def _load(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


def _strict(obj: Any, required: set[str], optional: set[str] = frozenset()) -> dict:  # type: ignore[assignment]
    if not isinstance(obj, dict):
        raise SchemaError("expected a JSON object")
    missing = required - set(obj)
    extra = set(obj) - required - set(optional)
    if missing or extra:
        raise SchemaError(f"missing keys {sorted(missing)}, unknown keys {sorted(extra)}")
    return obj


def _cone(path: str) -> toric.MomentCone:
    return toric.MomentCone.from_json(_load(path))


def _reeb(cfg: JobConfig, cone: toric.MomentCone, faces: toric.FaceLattice) -> toric.ReebVector:
    if cfg.reeb == "auto":
        return toric.nondegenerate_reeb_near(cone, seed=cfg.seed, faces=faces)
    spec = toric.ReebVector.parse_json(_load(cfg.reeb))
    return toric.is_reeb_vector(cone, vector=spec.get("vector"), coefficients=spec.get("coefficients"), faces=faces)


def _path(path: str, cfg: JobConfig) -> SymplecticPath:
    return SymplecticPath.from_json(_load(path), cfg.tolerances())


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_check_cone(cfg: JobConfig, inp: str) -> dict:
    cone = _cone(inp)
    faces = toric.check_good_cone(cone)
    pi1 = toric.fundamental_group(cone)
    return {
        "verdict": "good; pi1 trivial" if not pi1 else f"good; pi1 invariant factors {list(pi1)}",
        "good": True,
        "faces_by_codim": {str(k): len(v) for k, v in sorted(faces.faces.items())},
        "pi1": list(pi1),
    }


def cmd_pi1(cfg: JobConfig, inp: str) -> dict:
    cone = _cone(inp)
    toric.check_good_cone(cone)
    return {"pi1": list(toric.fundamental_group(cone))}


def cmd_reeb_check(cfg: JobConfig, inp: str) -> dict:
    cone = _cone(inp)
    faces = toric.check_good_cone(cone)
    reeb = _reeb(cfg, cone, faces)
    return {"accepted": True, "reeb": reeb.to_json()}


def cmd_hc(cfg: JobConfig, inp: str) -> dict:
    cone = _cone(inp)
    faces = toric.check_good_cone(cone)
    reeb = _reeb(cfg, cone, faces)
    table = toric.hc_table(cone, reeb, cfg.cutoff, faces)
    out = table.to_json()
    out["reeb"] = reeb.to_json()
    out["reeb_source"] = "auto" if cfg.reeb == "auto" else cfg.reeb
    out["seed"] = cfg.seed
    out["cutoff_provenance"] = "degrees above the cutoff are not computed (rank unknown, not zero)"
    return out


def cmd_orbit_index(cfg: JobConfig, inp: str) -> dict:
    cone = _cone(inp)
    faces = toric.check_good_cone(cone)
    reeb = _reeb(cfg, cone, faces)
    rows = []
    for e in faces.edges:
        rot = toric.edge_orbit_rotations(cone, faces, reeb, e)
        for N in range(1, cfg.cutoff + 1):
            rows.append(toric.orbit_rs_index(rot, N, cone.n).to_json())
    return {"orbits": rows, "reeb": reeb.to_json()}


def cmd_index(cfg: JobConfig, inp: str) -> dict:
    path = _path(inp, cfg)
    out: dict[str, Any] = {"report": index.index_report(path, tol=cfg.tolerances()).to_json()}
    if cfg.bott:
        out["bott"] = bott.bott_function(path, cfg.tolerances()).to_json()
    if cfg.elliptic_check is not None:
        out["certificate"] = bott.elliptic_certificate(path, cfg.elliptic_check, cfg.tolerances()).to_json()
    return out


def cmd_bott(cfg: JobConfig, inp: str) -> dict:
    path = _path(inp, cfg)
    tol = cfg.tolerances()
    return {
        "bott": bott.bott_function(path, tol).to_json(),
        "splitting": [s.to_json() for s in bott.all_splitting_numbers(path, tol)],
    }


def cmd_elliptic_check(cfg: JobConfig, inp: str) -> dict:
    path = _path(inp, cfg)
    j = cfg.elliptic_check if cfg.elliptic_check is not None else 2
    return {"certificate": bott.elliptic_certificate(path, j, cfg.tolerances()).to_json()}


def cmd_pinching(cfg: JobConfig, inp: str) -> dict:
    data = estimates.PinchingData.from_json(_load(inp))
    return estimates.pinched_index_bound(data).to_json()


def cmd_prequant_hc(cfg: JobConfig, inp: str) -> dict:
    data = estimates.PrequantizationData.from_json(_load(inp))
    return estimates.prequant_hc(data, (0, cfg.cutoff)).to_json()


def cmd_ind_hr(cfg: JobConfig, inp: str) -> dict:
    obj = _strict(_load(inp), {"n", "S", "R"})
    conv = lambda v: v if isinstance(v, (int, float)) and not isinstance(v, bool) else str(v)  # noqa: E731
    value = estimates.ind_hr(int(obj["n"]), conv(obj["S"]), conv(obj["R"]))
    return {"n": int(obj["n"]), "S": str(obj["S"]), "R": str(obj["R"]), "mu_minus": value}


HANDLERS: dict[str, Callable[[JobConfig, str], dict]] = {
    "check-cone": cmd_check_cone,
    "pi1": cmd_pi1,
    "hc": cmd_hc,
    "reeb-check": cmd_reeb_check,
    "orbit-index": cmd_orbit_index,
    "index": cmd_index,
    "bott": cmd_bott,
    "elliptic-check": cmd_elliptic_check,
    "pinching": cmd_pinching,
    "prequant-hc": cmd_prequant_hc,
    "ind-hr": cmd_ind_hr,
}


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _scalar(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)) and all(not isinstance(x, (dict, list)) for x in v):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    return str(v)


def render_table(obj: Any, indent: str = "") -> str:
    """Aligned text rendering of a JSON-like result with the same numbers."""
    lines: list[str] = []
    if isinstance(obj, dict):
        simple = {k: v for k, v in obj.items() if not isinstance(v, (dict, list)) or _is_flat_list(v)}
        width = max((len(k) for k in simple), default=0)
        for k in sorted(obj, key=_key_order):
            v = obj[k]
            if k in simple:
                lines.append(f"{indent}{k.ljust(width)}  {_scalar(v)}")
            else:
                lines.append(f"{indent}{k}:")
                lines.append(render_table(v, indent + "  "))
    elif isinstance(obj, list) and obj and all(isinstance(r, dict) for r in obj):
        cols = sorted({c for r in obj for c in r})
        cells = [[_scalar(r.get(c)) if not isinstance(r.get(c), (dict, list)) or _is_flat_list(r.get(c))
                  else json.dumps(r.get(c), sort_keys=True) for c in cols] for r in obj]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines.append(indent + "  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip())
        for row in cells:
            lines.append(indent + "  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip())
    else:
        lines.append(indent + _scalar(obj))
    return "\n".join(lines)


def _key_order(k: str) -> tuple:
    # integer-like keys (degrees) in numeric order, ahead of named keys
    try:
        return (0, int(k), "")
    except ValueError:
        return (1, 0, k)


def _is_flat_list(v: Any) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _emit(obj: Any, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2, sort_keys=True)
    return render_table(obj)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def worker_count(jobs: int) -> int:
    """Workers for ``jobs`` independent inputs, capped by ``REEB_INDEX_THREADS``."""
    raw = os.environ.get("REEB_INDEX_THREADS", "1")
    try:
        cap = max(1, int(raw))
    except ValueError as exc:
        raise SchemaError(f"REEB_INDEX_THREADS must be an integer, got {raw!r}") from exc
    return max(1, min(cap, jobs))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reeb-index", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", action="append", default=[], metavar="PATH", help="input JSON (repeatable)")
    p.add_argument("--config", metavar="PATH", help="job config JSON (strict keys); flags are ignored")
    p.add_argument("--reeb", default="auto", metavar="PATH|auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=12)
    p.add_argument("--tol", type=float, default=None, help="override of the spectral threshold eig_tol")
    p.add_argument("--format", dest="fmt", choices=("json", "table"), default="json")
    p.add_argument("--bott", action="store_true", help="index: also emit the Bott function")
    p.add_argument("--elliptic-check", type=int, default=None, metavar="J")
    return p


def _config(args: argparse.Namespace) -> JobConfig:
    if args.config:
        obj = _load(args.config)
        if isinstance(obj, dict):
            obj = {"command": args.command, **obj}
        return JobConfig.from_json(obj)
    return JobConfig(
        command=args.command,
        inputs=tuple(args.input),
        reeb=args.reeb,
        seed=args.seed,
        cutoff=args.cutoff,
        tol=args.tol,
        fmt=args.fmt,
        bott=args.bott,
        elliptic_check=args.elliptic_check,
    )


def run(cfg: JobConfig) -> tuple[int, Any]:
    """Run a job; returns the exit status and the result (or error) document.

    Every input is parsed before any computation starts, so a malformed file
    never lets a job partially execute.
    """
    handler = HANDLERS[cfg.command]
    for inp in cfg.inputs:
        _load(inp)

    def one(inp: str) -> tuple[int, Any]:
        try:
            return EXIT_OK, handler(cfg, inp)
        except SchemaError as exc:
            return EXIT_PARSE, {"error": type(exc).__name__, "message": str(exc)}
        except ReebIndexError as exc:
            return EXIT_FAILED, {"error": type(exc).__name__, "message": str(exc)}

    with ThreadPoolExecutor(max_workers=worker_count(len(cfg.inputs))) as pool:
        results = list(pool.map(one, cfg.inputs))
    status = max(code for code, _ in results)
    if len(results) == 1:
        return status, results[0][1]
    return status, [{"input": inp, "result": res} for inp, (_, res) in zip(cfg.inputs, results)]


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.fmt
    try:
        cfg = _config(args)
        fmt = cfg.fmt
        status, doc = run(cfg)
    except SchemaError as exc:
        status, doc = EXIT_PARSE, {"error": type(exc).__name__, "message": str(exc)}
    except ReebIndexError as exc:  # pragma: no cover - run() catches per input
        status, doc = EXIT_FAILED, {"error": type(exc).__name__, "message": str(exc)}
    print(_emit(doc, fmt))
    if status != EXIT_OK:
        errs = doc if isinstance(doc, list) else [{"result": doc}]
        for e in errs:
            res = e["result"]
            if isinstance(res, dict) and "error" in res:
                print(f"error: {res['error']}: {res['message']}", file=sys.stderr)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
