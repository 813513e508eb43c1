"""Command-line front end.

Parses a slice description from flags, dispatches to the library, and emits
the result as JSON or a plain table.  Computed documents are cached on disk
under a content hash of the canonical job description, so repeated queries
for expensive restriction matrices are free.

Exit codes: 0 on success, 2 on validation errors (bad flags, non-minuscule
weights, rank restrictions), 3 when a verification suite or an internal
consistency check fails.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .cartan import CartanDatum, Chamber, Coweight
from .chern import (
    NonPolynomialEntry,
    bundle_weight,
    mult_matrix,
    parse_bundle,
    reconstruct_coefficient,
)
from .slices import (
    FixedPoint,
    InvalidSlice,
    NonMinusculeUnsupported,
    SliceSpec,
    enumerate_fixed_points,
    flip_sign,
    same_wall_component,
    tangent_weights,
)
from .stab_a1 import (
    ExactDivisionFailure,
    InvariantViolation,
    NotA1,
    PathInconsistency,
    normalize_polarization,
    stab_matrix,
    stab_offdiag_mod_h2,
    verify_duality,
)
from .stab_general import mod_h2_json, stab_mod_h2, wall_adjacent_chambers
from .symalg import Polynomial

CACHE_ENV = "GRSLICE_CACHE_DIR"
VERIFY_CHECKS = ("recursion", "duality", "oracle", "wallcross")

_VALIDATION_ERRORS = (
    NonMinusculeUnsupported,
    InvalidSlice,
    NotA1,
    ValueError,
)
_INTERNAL_ERRORS = (
    PathInconsistency,
    ExactDivisionFailure,
    InvariantViolation,
    NonPolynomialEntry,
    AssertionError,
)


# -- job description -----------------------------------------------------------


class JobSpec:
    """Validated, canonicalizable description of one CLI invocation."""

    __slots__ = (
        "command",
        "letter",
        "rank",
        "lambda_seq",
        "mu",
        "chamber",
        "polarization",
        "bundle",
        "which",
        "fmt",
        "out",
    )

    def __init__(
        self,
        command: str,
        letter: str,
        rank: int,
        lambda_seq: Sequence[int],
        mu: Sequence[int],
        chamber: str = "dominant",
        polarization: str = "repelling",
        bundle: Optional[str] = None,
        which: Optional[str] = None,
        fmt: str = "json",
        out: Optional[str] = None,
    ):
        self.command = command
        self.letter = letter
        self.rank = int(rank)
        self.lambda_seq = tuple(int(i) for i in lambda_seq)
        self.mu = tuple(int(c) for c in mu)
        self.chamber = chamber
        self.polarization = polarization
        self.bundle = bundle
        self.which = which
        self.fmt = fmt
        self.out = out

    def canonical(self) -> dict:
        """Semantic fields only; presentation flags do not enter the cache key."""
        return {
            "command": self.command,
            "type": self.letter,
            "rank": self.rank,
            "lambda": list(self.lambda_seq),
            "mu": list(self.mu),
            "chamber": self.chamber,
            "polarization": self.polarization,
            "bundle": self.bundle,
            "which": self.which,
        }

    def cache_key(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def build(self) -> Tuple[SliceSpec, Chamber, Optional[List[int]]]:
        datum = CartanDatum(self.letter, self.rank)
        spec = SliceSpec(datum, self.lambda_seq, Coweight(self.mu))
        if self.chamber == "dominant":
            ch = Chamber.dominant(datum)
        elif self.chamber == "antidominant":
            ch = Chamber.antidominant(datum)
        else:
            coords = [Fraction(tok) for tok in self.chamber.split(",")]
            ch = Chamber(datum, Coweight(coords))
        if self.polarization == "repelling":
            signs: Optional[List[int]] = None
        else:
            signs = [int(tok) for tok in self.polarization.split(",")]
        normalize_polarization(enumerate_fixed_points(spec), signs)
        return spec, ch, signs


# -- cache ---------------------------------------------------------------------


def cache_dir() -> str:
    override = os.environ.get(CACHE_ENV)
    if override:
        return override
    return os.path.join(os.path.expanduser("~"), ".cache", "grslice")


def cache_fetch(key: str) -> Optional[dict]:
    path = os.path.join(cache_dir(), key + ".json")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, ValueError):
        return None


def cache_store(key: str, payload: dict) -> None:
    directory = cache_dir()
    os.makedirs(directory, exist_ok=True)
    data = json.dumps(payload, sort_keys=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, os.path.join(directory, key + ".json"))
    except OSError:
        try:
            os.unlink(tmp)
        except OSError:
            pass


# -- document assembly ----------------------------------------------------------


def _weight_rows(spec: SliceSpec, p: FixedPoint) -> list:
    rows = [
        {"root": list(root.coords), "n": n, "mult": m}
        for (root, n), m in tangent_weights(spec, p).items()
    ]
    rows.sort(key=lambda r: (r["root"], r["n"]))
    return rows


def _cmd_fixed_points(spec: SliceSpec, ch: Chamber, signs) -> dict:
    points = enumerate_fixed_points(spec)
    return {
        "command": "fixed-points",
        "count": len(points),
        "points": [{"delta": p.to_json(), "label": p.label()} for p in points],
    }


def _cmd_tangent(spec: SliceSpec, ch: Chamber, signs) -> dict:
    points = enumerate_fixed_points(spec)
    return {
        "command": "tangent",
        "points": [
            {"delta": p.to_json(), "label": p.label(), "weights": _weight_rows(spec, p)}
            for p in points
        ],
    }


def _cmd_stab_exact(spec: SliceSpec, ch: Chamber, signs) -> dict:
    matrix = stab_matrix(spec, ch, signs)
    matrix.validate()
    payload = matrix.to_json()
    payload["command"] = "stab-exact"
    payload["labels"] = [p.label() for p in matrix.points]
    return payload


def _cmd_stab_mod_h2(spec: SliceSpec, ch: Chamber, signs) -> dict:
    entries = stab_mod_h2(spec, ch, signs)
    payload = mod_h2_json(spec, ch, entries)
    payload["command"] = "stab-mod-h2"
    payload["chamber"] = list(ch.sign_vector)
    payload["labels"] = [p.label() for p in enumerate_fixed_points(spec)]
    return payload


def _cmd_mult(spec: SliceSpec, ch: Chamber, signs, bundle: str) -> dict:
    kind, idx = parse_bundle(spec, bundle)
    matrix = mult_matrix(spec, (kind, idx), ch, signs)
    payload = matrix.to_json()
    payload["command"] = "mult"
    payload["chamber"] = list(ch.sign_vector)
    payload["labels"] = [p.label() for p in matrix.basis]
    return payload


def _check_recursion(spec, ch, signs) -> dict:
    try:
        stab_matrix(spec, ch, signs).validate()
        stab_matrix(spec, -ch, signs).validate()
    except (PathInconsistency, InvariantViolation, ExactDivisionFailure) as exc:
        return {"name": "recursion", "ok": False, "detail": str(exc)}
    return {"name": "recursion", "ok": True}


def _check_duality(spec, ch, signs) -> dict:
    report = verify_duality(spec, ch, signs)
    return {
        "name": "duality",
        "ok": report["ok"],
        "pairs": report["pairs"],
        "failures": report["failures"],
    }


def _check_oracle(spec, ch, signs) -> dict:
    """Cross-module consistency of the mod-h^2 data with the operator matrices."""
    failures: List[dict] = []
    points = enumerate_fixed_points(spec)
    if spec.cartan.rank == 1:
        general = stab_mod_h2(spec, ch, signs)
        closed = stab_offdiag_mod_h2(spec, ch, signs)
        if general != closed:
            failures.append({"check": "rank-one closed form"})
    for k in range(spec.length + 1):
        matrix = mult_matrix(spec, ("L", k), ch, signs)
        for p in points:
            expected = bundle_weight(spec, p, ("L", k)).to_polynomial()
            if matrix.entry(p, p) != expected:
                failures.append({"check": "diagonal", "bundle": f"L{k}", "p": p.label()})
        for p in points:
            for q in points:
                if p == q:
                    continue
                entry = matrix.entry(q, p)
                coeff = reconstruct_coefficient(spec, ch, p, q, ("L", k), signs)
                rebuilt = Polynomial.linear_form([0] * spec.cartan.rank, coeff)
                if rebuilt != entry:
                    failures.append(
                        {"check": "reconstruction", "bundle": f"L{k}",
                         "p": p.label(), "q": q.label()}
                    )
    return {"name": "oracle", "ok": not failures, "failures": failures}


def _check_wallcross(spec, ch, signs) -> dict:
    """Restriction data with a fixed polarization agrees across every wall."""
    failures: List[dict] = []
    compared = 0
    points = enumerate_fixed_points(spec)
    base_signs = normalize_polarization(points, signs)
    for root in spec.cartan.positive_roots(ch):
        near, far = wall_adjacent_chambers(spec.cartan, root, 1)
        left = stab_mod_h2(spec, near, base_signs)
        carried = {p: base_signs[p] * flip_sign(spec, p, near, far) for p in points}
        right = stab_mod_h2(spec, far, carried)
        for pair in set(left) | set(right):
            wall = same_wall_component(spec, *pair)
            if wall is not None and (wall == root or wall == -root):
                continue
            compared += 1
            if left.get(pair) != right.get(pair):
                failures.append(
                    {"root": list(root.coords), "p": pair[0].label(), "q": pair[1].label()}
                )
    return {"name": "wallcross", "ok": not failures, "compared": compared}


def _cmd_verify(spec, ch, signs, which: str) -> dict:
    available = {
        "recursion": (_check_recursion, spec.cartan.rank == 1),
        "duality": (_check_duality, spec.cartan.rank == 1),
        "oracle": (_check_oracle, True),
        "wallcross": (_check_wallcross, True),
    }
    if which == "all":
        selected = [name for name in VERIFY_CHECKS if available[name][1]]
    else:
        if not available[which][1]:
            raise NotA1(f"verify {which} requires a rank-one slice")
        selected = [which]
    checks = [available[name][0](spec, ch, signs) for name in selected]
    return {
        "command": "verify",
        "which": which,
        "checks": checks,
        "ok": all(c["ok"] for c in checks),
    }


def compute_payload(job: JobSpec, spec: SliceSpec, ch: Chamber, signs) -> dict:
    if job.command == "fixed-points":
        return _cmd_fixed_points(spec, ch, signs)
    if job.command == "tangent":
        return _cmd_tangent(spec, ch, signs)
    if job.command == "stab-exact":
        return _cmd_stab_exact(spec, ch, signs)
    if job.command == "stab-mod-h2":
        return _cmd_stab_mod_h2(spec, ch, signs)
    if job.command == "mult":
        return _cmd_mult(spec, ch, signs, job.bundle)
    if job.command == "verify":
        return _cmd_verify(spec, ch, signs, job.which)
    raise ValueError(f"unknown command {job.command!r}")


# -- rendering -------------------------------------------------------------------


def _poly_str(obj: dict, rank: int) -> str:
    return str(Polynomial.from_json(obj, rank + 1))


def _weight_str(root: Sequence[int], n: int) -> str:
    return str(Polynomial.linear_form(list(root), n))


def _table(rows: List[Sequence[str]], header: Sequence[str]) -> str:
    out = [" | ".join(header)]
    out.extend(" | ".join(str(c) for c in row) for row in rows)
    return "\n".join(out) + "\n"


def render_table(payload: dict, rank: int) -> str:
    command = payload["command"]
    if command == "fixed-points":
        rows = [(i, pt["label"]) for i, pt in enumerate(payload["points"])]
        return _table(rows, ("index", "label"))
    if command == "tangent":
        rows = []
        for pt in payload["points"]:
            for w in pt["weights"]:
                rows.append((pt["label"], _weight_str(w["root"], w["n"]), w["mult"]))
        return _table(rows, ("point", "weight", "mult"))
    if command == "stab-exact":
        labels = payload["labels"]
        rows = []
        for key in sorted(payload["entries"], key=lambda k: tuple(map(int, k.split(",")))):
            i, j = (int(t) for t in key.split(","))
            rows.append((labels[i], labels[j], _poly_str(payload["entries"][key], rank)))
        return _table(rows, ("p", "q", "value"))
    if command == "stab-mod-h2":
        labels = payload["labels"]
        rows = [
            (
                labels[e["p"]],
                labels[e["q"]],
                ",".join(str(c) for c in e["alpha"]),
                _poly_str(e["value"], rank),
            )
            for e in payload["entries"]
        ]
        return _table(rows, ("p", "q", "alpha", "value"))
    if command == "mult":
        labels = payload["labels"]
        rows = []
        for qi, row in enumerate(payload["entries"]):
            for pi, cell in enumerate(row):
                if cell:
                    rows.append((labels[qi], labels[pi], _poly_str(cell, rank)))
        return _table(rows, ("row", "column", "value"))
    if command == "verify":
        rows = [(c["name"], "ok" if c["ok"] else "FAIL") for c in payload["checks"]]
        return _table(rows, ("check", "status"))
    raise ValueError(f"no table renderer for {command!r}")


def render(job: JobSpec, payload: dict) -> str:
    if job.fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    return render_table(payload, job.rank)


# -- argument parsing --------------------------------------------------------------


def _int_list(text: str) -> List[int]:
    return [int(tok) for tok in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grslice",
        description="Exact fixed-point, restriction, and multiplication data "
        "for resolved affine Grassmannian slices.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--type", required=True, metavar="LETTER",
                        help="Cartan type letter, e.g. A or B")
    common.add_argument("--rank", required=True, type=int)
    common.add_argument("--lambda", required=True, dest="lambda_seq",
                        type=_int_list, metavar="I,J,...",
                        help="fundamental-coweight indices of the weight sequence")
    common.add_argument("--mu", required=True, type=_int_list, metavar="C,...",
                        help="target coweight in fundamental-coweight coordinates")
    common.add_argument("--chamber", default="dominant",
                        help='"dominant", "antidominant", or rational coordinates "1,-1/2"')
    common.add_argument("--polarization", default="repelling",
                        help='"repelling" or one sign per fixed point, "+1,-1,..."')
    common.add_argument("--format", default="json", choices=("json", "table"),
                        dest="fmt")
    common.add_argument("--out", default=None, help="write the document to this path")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fixed-points", parents=[common],
                   help="enumerate the torus fixed points")
    sub.add_parser("tangent", parents=[common],
                   help="tangent weight multisets at every fixed point")
    sub.add_parser("stab-exact", parents=[common],
                   help="exact restriction matrix (rank one only)")
    sub.add_parser("stab-mod-h2", parents=[common],
                   help="restriction matrix modulo h^2")
    mult = sub.add_parser("mult", parents=[common],
                          help="divisor multiplication matrix in the stable basis")
    mult.add_argument("--bundle", required=True, metavar="L<k>|E<i>")
    verify = sub.add_parser("verify", parents=[common],
                            help="run consistency suites; nonzero exit on failure")
    verify.add_argument("which", choices=VERIFY_CHECKS + ("all",))
    return parser


def job_from_args(args: argparse.Namespace) -> JobSpec:
    return JobSpec(
        command=args.command,
        letter=args.type,
        rank=args.rank,
        lambda_seq=args.lambda_seq,
        mu=args.mu,
        chamber=args.chamber,
        polarization=args.polarization,
        bundle=getattr(args, "bundle", None),
        which=getattr(args, "which", None),
        fmt=args.fmt,
        out=args.out,
    )


def run(job: JobSpec) -> Tuple[int, str]:
    """Execute one job; returns (exit code, rendered document)."""
    try:
        spec, ch, signs = job.build()
        if job.command == "mult":
            parse_bundle(spec, job.bundle)
    except _VALIDATION_ERRORS as exc:
        return 2, f"error: {exc}\n"
    key = job.cache_key()
    payload = cache_fetch(key)
    if payload is None:
        try:
            payload = compute_payload(job, spec, ch, signs)
        except _VALIDATION_ERRORS as exc:
            return 2, f"error: {exc}\n"
        except _INTERNAL_ERRORS as exc:
            return 3, f"verification failure: {exc}\n"
        cache_store(key, payload)
    code = 0
    if job.command == "verify" and not payload["ok"]:
        code = 3
    return code, render(job, payload)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    job = job_from_args(args)
    code, document = run(job)
    if code in (0, 3) and job.out:
        with open(job.out, "w", encoding="utf-8") as fh:
            fh.write(document)
    elif code == 2:
        sys.stderr.write(document)
    else:
        sys.stdout.write(document)
    return code


if __name__ == "__main__":
    sys.exit(main())
