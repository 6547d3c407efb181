"""Command-line driver: manifests, a content-addressed count cache, CSV/JSON-lines output."""
from __future__ import annotations

import argparse
import csv
import enum
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .exactlat import (BallSpec, CountRecord, Method, count_general_ball, count_identity_ball,
                       count_naive, parse_rational)
from .expopt import baselines, optimize_theorem1, optimize_theorem2, small_rank_delta
from .mainterm import DEFAULT_BITS, fit_error_exponent, main_constant
from .spectrum import enumerate_types, profile_row
from .sphtrans import (ContourError, ResidueError, SpectralParameter, chi_transform_contour,
                       chi_transform_direct, chi_transform_residues, lemma3_envelope)

CACHE_ENV = "HYPLAT_CACHE_DIR"
COLUMNS = ("n", "radius_sq", "count", "method", "borderline", "seconds")

EXIT_OK, EXIT_MANIFEST, EXIT_NUMERIC = 0, 2, 3


class Command(str, enum.Enum):
    COUNT = "COUNT"
    SCAN = "SCAN"
    FIT = "FIT"
    CONSTANT = "CONSTANT"
    TRANSFORM = "TRANSFORM"
    SPECTRUM = "SPECTRUM"
    OPTIMIZE = "OPTIMIZE"
    BASELINES = "BASELINES"


class ManifestError(ValueError):
    pass


class CacheCorruptionError(RuntimeError):
    pass


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "hyplat"))


@dataclass
class ExperimentManifest:
    command: Command
    parameters: dict = field(default_factory=dict)
    output_path: str | None = None
    cache_dir: str | None = None
    version: str = __version__

    @classmethod
    def from_dict(cls, doc: Any) -> "ExperimentManifest":
        if not isinstance(doc, dict):
            raise ManifestError("manifest must be a JSON object")
        try:
            command = Command(str(doc["command"]).upper())
        except (KeyError, ValueError) as exc:
            raise ManifestError(f"unknown or missing command: {doc.get('command')!r}") from exc
        params = doc.get("parameters", {})
        if not isinstance(params, dict):
            raise ManifestError("parameters must be an object")
        return cls(command, params, doc.get("output_path"), doc.get("cache_dir"),
                   doc.get("version", __version__))

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentManifest":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["command"] = self.command.value
        return d


# --- cache ----------------------------------------------------------------------

def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def spec_key(spec: BallSpec, method: Method) -> str:
    return hashlib.sha256(_canonical({"spec": spec.to_document(), "method": method.value})).hexdigest()


class CountCache:
    """One JSON file per (BallSpec, method); the stored row carries its own sha256."""

    def __init__(self, root: str | Path | None):
        self.root = Path(root) if root is not None else None

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, spec: BallSpec, method: Method) -> dict | None:
        if self.root is None:
            return None
        path = self._path(spec_key(spec, method))
        if not path.exists():
            return None
        try:
            doc = json.loads(path.read_text())
            row, checksum = doc["row"], doc["checksum"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CacheCorruptionError(f"unreadable cache entry {path}") from exc
        if hashlib.sha256(_canonical(row)).hexdigest() != checksum:
            raise CacheCorruptionError(f"checksum mismatch in {path}")
        return row

    def put(self, spec: BallSpec, method: Method, row: dict) -> None:
        if self.root is None:
            return
        path = self._path(spec_key(spec, method))
        path.parent.mkdir(parents=True, exist_ok=True)
        doc = {"spec": spec.to_document(), "row": row,
               "checksum": hashlib.sha256(_canonical(row)).hexdigest()}
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True))
        tmp.replace(path)


# --- counting jobs ----------------------------------------------------------------

def _count(spec: BallSpec, method: Method, workers: int) -> CountRecord:
    if method is Method.ROW_RECURSIVE:
        return count_identity_ball(spec, workers)
    if method is Method.NAIVE:
        if not spec.is_identity:
            raise ManifestError("NAIVE counting supports identity base points only")
        return count_naive(spec)
    return count_general_ball(spec)


def cached_count(spec: BallSpec, method: Method, cache: CountCache, workers: int = 1) -> dict:
    row = cache.get(spec, method)
    if row is None:
        row = _count(spec, method, workers).to_row()
        cache.put(spec, method, row)
    return row


def _scan_job(args) -> dict:
    spec_doc, method, cache_root = args
    return cached_count(BallSpec.from_document(spec_doc), Method(method), CountCache(cache_root))


def t_grid(t_min: float, t_max: float, steps: int) -> list[float]:
    if not (0 < t_min <= t_max) or steps < 1:
        raise ManifestError("need 0 < t_min <= t_max and t_steps >= 1")
    if steps == 1:
        return [round(t_min, 6)]
    return [round(float(t), 6) for t in np.geomspace(t_min, t_max, steps)]


def radius_for(T: float) -> Fraction:
    """Exact T^2 for T rounded to six decimals."""
    return Fraction(repr(round(float(T), 6))) ** 2


# --- output ---------------------------------------------------------------------

class RowWriter:
    """Single appender for CSV and JSON-lines; ``out=None`` writes CSV to stdout."""

    def __init__(self, out: str | None):
        self.out = out
        self.rows: list[dict] = []

    def add(self, row: dict) -> None:
        self.rows.append({c: row[c] for c in COLUMNS})

    def close(self) -> None:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(self.rows)
        if self.out is None:
            sys.stdout.write(buf.getvalue())
            return
        csv_path = Path(self.out)
        if csv_path.suffix != ".csv":
            csv_path = csv_path.with_suffix(".csv")
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(buf.getvalue())
        csv_path.with_suffix(".jsonl").write_text(
            "".join(json.dumps(r, sort_keys=False) + "\n" for r in self.rows))


def _emit(obj: Any, out: str | None) -> None:
    text = json.dumps(obj, indent=2, default=_json_default) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def _json_default(o):
    if isinstance(o, Fraction):
        return f"{o.numerator}/{o.denominator}"
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    return str(o)


# --- parameter parsing ----------------------------------------------------------

def parse_mu(text: str) -> SpectralParameter:
    """"re,im;re,im;..." -> SpectralParameter."""
    try:
        parts = [p for p in text.split(";") if p.strip()]
        vals = []
        for p in parts:
            re_s, im_s = p.split(",")
            vals.append(complex(float(re_s), float(im_s)))
        return SpectralParameter(tuple(vals))
    except ValueError as exc:
        raise ManifestError(f"bad --mu {text!r}: {exc}") from exc


def _require(params: dict, *keys: str) -> None:
    missing = [k for k in keys if params.get(k) is None]
    if missing:
        raise ManifestError(f"missing parameter(s): {', '.join(missing)}")


def _ball_spec(params: dict, radius_sq: Fraction) -> BallSpec:
    tol = float(params.get("tol") or 1e-9)
    base = params.get("base")
    try:
        if base in (None, "identity"):
            return BallSpec(int(params["n"]), radius_sq, tol=tol)
        return BallSpec(int(params["n"]), radius_sq, np.array(base["z"]), np.array(base["w"]), tol)
    except (ValueError, KeyError, TypeError) as exc:
        raise ManifestError(str(exc)) from exc


def _method(params: dict, default: Method) -> Method:
    m = params.get("method")
    if m is None:
        return default if params.get("base") in (None, "identity") else Method.GENERIC_FORM
    try:
        return Method(str(m).upper())
    except ValueError as exc:
        raise ManifestError(f"unknown count method {m!r}") from exc


def _scan_radii(params: dict) -> list[tuple[float, Fraction]]:
    if params.get("t_values"):
        ts = [round(float(t), 6) for t in params["t_values"]]
    else:
        _require(params, "t_min", "t_max", "t_steps")
        ts = t_grid(float(params["t_min"]), float(params["t_max"]), int(params["t_steps"]))
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ManifestError("T values must be strictly increasing")
    return [(t, radius_for(t)) for t in ts]


# --- commands -------------------------------------------------------------------

def run(manifest: ExperimentManifest) -> int:
    """Execute a manifest; returns the process exit status."""
    try:
        _dispatch(manifest)
    except ManifestError as exc:
        print(f"invalid manifest: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    except (CacheCorruptionError, ContourError, ResidueError, ArithmeticError,
            np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # domain errors from the numeric layers (bad n, non-admissible mu, ...)
        print(f"invalid manifest: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    return EXIT_OK


def _dispatch(m: ExperimentManifest) -> None:
    p = dict(m.parameters)
    no_cache = bool(p.pop("no_cache", False))
    cache = CountCache(None if no_cache else (m.cache_dir or default_cache_dir()))
    out = m.output_path
    cmd = m.command

    if cmd is Command.COUNT:
        _require(p, "n", "radius_sq")
        try:
            radius = parse_rational(str(p["radius_sq"]))
        except ValueError as exc:
            raise ManifestError(str(exc)) from exc
        spec = _ball_spec(p, radius)
        writer = RowWriter(out)
        writer.add(cached_count(spec, _method(p, Method.ROW_RECURSIVE), cache,
                                int(p.get("workers") or 1)))
        writer.close()

    elif cmd is Command.SCAN:
        _require(p, "n")
        method = _method(p, Method.ROW_RECURSIVE)
        specs = [_ball_spec(p, r) for _, r in _scan_radii(p)]
        workers = int(p.get("workers") or 1)
        jobs = [(s.to_document(), method.value, None if cache.root is None else str(cache.root))
                for s in specs]
        if workers > 1 and len(jobs) > 1:
            from concurrent.futures import ProcessPoolExecutor
            with ProcessPoolExecutor(workers) as ex:
                rows = list(ex.map(_scan_job, jobs))
        else:
            rows = [_scan_job(j) for j in jobs]
        writer = RowWriter(out)
        for row in rows:
            writer.add(row)
        writer.close()

    elif cmd is Command.FIT:
        _require(p, "n")
        n = int(p["n"])
        if p.get("input"):
            points = _read_points(p["input"], n)
        else:
            method = _method(p, Method.ROW_RECURSIVE)
            points = []
            for t, r in _scan_radii(p):
                row = cached_count(_ball_spec(p, r), method, cache)
                points.append((t, int(row["count"])))
        _emit(fit_error_exponent(n, points).to_row(), out)

    elif cmd is Command.CONSTANT:
        _require(p, "n")
        bits = int(p.get("precision_bits") or DEFAULT_BITS)
        c = main_constant(int(p["n"]), bits)
        digits = max(15, int(bits * math.log10(2)))
        import mpmath
        _emit({"n": c.n, "precision_bits": bits, "c_n": mpmath.nstr(c.value, digits)}, out)

    elif cmd is Command.TRANSFORM:
        _require(p, "n", "T", "mu")
        n, T = int(p["n"]), float(p["T"])
        mu = parse_mu(p["mu"]) if isinstance(p["mu"], str) else SpectralParameter(
            tuple(complex(*x) if isinstance(x, (list, tuple)) else complex(x) for x in p["mu"]))
        if mu.n != n:
            raise ManifestError(f"mu has {mu.n} entries, expected {n}")
        method = str(p.get("method") or "contour").lower()
        if method == "contour":
            res = chi_transform_contour(n, T, mu)
        elif method == "residues":
            res = chi_transform_residues(n, T, mu)
        elif method == "direct":
            res = chi_transform_direct(n, T, mu)
        elif method == "envelope":
            _emit({"n": n, "T": T, "mu": list(mu.mu), "method": "envelope",
                   "value": lemma3_envelope(n, T, mu)}, out)
            return
        else:
            raise ManifestError(f"unknown transform method {method!r}")
        _emit(res.to_row(n, T, mu), out)

    elif cmd is Command.SPECTRUM:
        _require(p, "n")
        n = int(p["n"])
        rows = [profile_row(t) for t in enumerate_types(n, bool(p.get("include_constant")))]
        _emit(rows, out)

    elif cmd is Command.OPTIMIZE:
        _require(p, "theorem", "n")
        theorem, n = int(p["theorem"]), int(p["n"])
        if theorem == 1:
            res = small_rank_delta(n) if n in (3, 4) else optimize_theorem1(n)
        elif theorem == 2:
            res = optimize_theorem2(n)
        else:
            raise ManifestError("theorem must be 1 or 2")
        _emit(res.to_row(), out)

    elif cmd is Command.BASELINES:
        ns = p.get("ns") or ([int(p["n"])] if p.get("n") is not None else list(range(2, 11)))
        _emit([baselines(int(n)) for n in ns], out)


def _read_points(path: str, n: int) -> list[tuple[float, int]]:
    pts = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if int(row["n"]) != n:
                continue
            T = math.sqrt(float(Fraction(row["radius_sq"])))
            pts.append((T, int(row["count"])))
    if not pts:
        raise ManifestError(f"no rows for n = {n} in {path}")
    return sorted(pts)


# --- argparse front end -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyplat", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, *, cache=False):
        sp.add_argument("--out", help="output path (stdout if omitted)")
        if cache:
            sp.add_argument("--cache-dir", help=f"count cache (default ${CACHE_ENV} or ~/.cache/hyplat)")
            sp.add_argument("--no-cache", action="store_true")
        return sp

    def grid(sp):
        sp.add_argument("--t-min", type=float)
        sp.add_argument("--t-max", type=float)
        sp.add_argument("--t-steps", type=int)
        sp.add_argument("--t-values", type=lambda s: [float(x) for x in s.split(",")],
                        help="comma-separated T values (overrides the geometric grid)")

    def base(sp):
        sp.add_argument("--base", help="JSON file with {\"z\": [[...]], \"w\": [[...]]}")
        sp.add_argument("--tol", type=float)
        sp.add_argument("--method", choices=[m.value for m in Method], type=str.upper)

    sp = common(sub.add_parser("count", help="count one ball"), cache=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--radius-sq", required=True, help="exact rational T^2 as 'p/q'")
    sp.add_argument("--workers", type=int, default=1)
    base(sp)

    sp = common(sub.add_parser("scan", help="count over a T grid"), cache=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--workers", type=int, default=1)
    grid(sp)
    base(sp)

    sp = common(sub.add_parser("fit", help="fit the error exponent"), cache=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--input", help="CSV from a previous scan")
    grid(sp)
    base(sp)

    sp = common(sub.add_parser("constant", help="print c_n"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--precision-bits", type=int, default=DEFAULT_BITS)

    sp = common(sub.add_parser("transform", help="spherical transform of the ball indicator"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--mu", required=True, help="semicolon-separated 're,im' pairs")
    sp.add_argument("--method", default="contour",
                    choices=["contour", "residues", "direct", "envelope"])

    sp = common(sub.add_parser("spectrum", help="list spectral types"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--include-constant", action="store_true")

    sp = common(sub.add_parser("optimize", help="optimise the smoothing exponent"))
    sp.add_argument("--theorem", type=int, choices=[1, 2], required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = common(sub.add_parser("baselines", help="tabulate error-exponent gains"))
    sp.add_argument("--n", type=int, nargs="*")

    sp = sub.add_parser("run", help="execute a JSON manifest")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--out")
    sp.add_argument("--cache-dir")
    return ap


def manifest_from_args(args: argparse.Namespace) -> ExperimentManifest:
    if args.command == "run":
        m = ExperimentManifest.load(args.manifest)
        if args.out:
            m.output_path = args.out
        if args.cache_dir:
            m.cache_dir = args.cache_dir
        return m
    params = {k: v for k, v in vars(args).items()
              if k not in ("command", "out", "cache_dir", "no_cache") and v is not None}
    if args.command == "baselines":
        params = {"ns": args.n} if args.n else {}
    if params.get("base"):
        try:
            params["base"] = json.loads(Path(params["base"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ManifestError(f"cannot read base points: {exc}") from exc
    if getattr(args, "no_cache", False):
        params["no_cache"] = True
    return ExperimentManifest(Command(args.command.upper()), params, args.out,
                              getattr(args, "cache_dir", None))


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        manifest = manifest_from_args(args)
    except ManifestError as exc:
        print(f"invalid manifest: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    return run(manifest)


if __name__ == "__main__":
    sys.exit(main())
