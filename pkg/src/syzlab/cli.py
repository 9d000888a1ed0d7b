"""Command-line driver: ``syzlab <command> [options]``.

Every run produces a JSON report with the command, its parameters, an anchor from
:data:`ANCHORS`, the verdicts and the payload. Reports are cached by content under the
settings' ``cache_dir``. Exit codes: 0 when every verdict passes, 1 on a failed check or a
computation error, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from typing_extensions import TypeAlias

from . import lattice, moduli
from ._version import __version__
from .client import Syzlab
from .config import SyzlabSettings
from .exceptions import CacheError, ParameterError, SyzlabError
from .koszul import BettiTable
from .logging_config import setup_logging

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

ANCHORS: Dict[str, str] = {
    "betti": "koszul cohomology of the section ring",
    "betti --oracle": "minimal resolution agreement",
    "lattice-certify": "picard lattice lemmas",
    "prym-green": "prym-canonical betti table",
    "secant divisorial": "divisorial secant equivalence",
    "secant diffvar": "hyperelliptic difference varieties",
    "secant scroll": "scroll syzygies",
    "secant diffcon": "genus 4 difference varieties",
    "secant reduction": "reduction by one point",
    "moduli": "divisor class of the syzygy locus",
    "scan-torsion": "twisted kernel bundle vanishing",
}

MODULI_CHECKS = ("osztaly_G", "osztaly_H", "syz_closed", "picid", "psi_equal",
                 "rank_balance", "integrality", "grr", "dims")


@dataclass
class Report:
    command: str
    params: Dict[str, Any]
    anchor: str
    prime: int
    seed: int
    verdicts: Dict[str, bool] = field(default_factory=dict)
    payload: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    error: Optional[str] = None
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.verdicts.values())

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=_jsonable) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ParameterError(f"unsupported report schema {data.get('schema_version')}")
        if data.get("anchor") not in ANCHORS.values():
            raise ParameterError(f"report anchor '{data.get('anchor')}' is not registered")
        return cls(**data)


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (Fraction, Path)):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


# region cache ---------------------------------------------------------------------------
def cache_key(
    command: str,
    params: Dict[str, Any],
    seed: int,
    prime: int,
    limits: Optional[Dict[str, Any]] = None,
) -> str:
    """Content hash of everything that determines a report, resource limits included."""
    payload = {"command": command, "params": params, "seed": seed, "prime": prime,
               "limits": limits or {}, "version": __version__}
    raw = json.dumps(payload, separators=(",", ":"), sort_keys=True).encode("utf-8")
    return hashlib.sha256(raw).hexdigest()


class ReportCache:
    """Content-addressed report store with atomic writes."""

    def __init__(self, root: Path) -> None:
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise CacheError(f"cache directory {self.root} is unusable: {exc}") from exc

    def path(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def lookup(self, key: str) -> Optional[str]:
        path = self.path(key)
        if not path.exists():
            logger.debug(f"cache miss {key[:12]}")
            return None
        text = path.read_text(encoding="utf-8")
        try:
            Report.from_json(text)
        except (ValueError, TypeError) as exc:
            logger.info(f"evicting corrupt cache entry {key[:12]}: {exc}")
            path.unlink(missing_ok=True)
            return None
        logger.info(f"cache hit {key[:12]}")
        return text

    def store(self, key: str, text: str) -> Path:
        path = self.path(key)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=f".{key[:12]}-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(text)
            os.replace(tmp, path)
        except OSError as exc:
            Path(tmp).unlink(missing_ok=True)
            raise CacheError(f"cannot write cache entry {key[:12]}: {exc}") from exc
        return path


# region commands ------------------------------------------------------------------------
Outcome: TypeAlias = Tuple[Dict[str, bool], Dict[str, Any]]


def _parse_range(text: str) -> List[int]:
    lo, sep, hi = text.partition("..")
    try:
        start = int(lo)
        stop = int(hi) if sep else start
    except ValueError as exc:
        raise ParameterError(f"bad range '{text}' (use 1..60 or 7)") from exc
    if start < 1 or stop < start:
        raise ParameterError(f"bad range '{text}'")
    return list(range(start, stop + 1))


def _cmd_betti(client: Syzlab, args: argparse.Namespace) -> Outcome:
    model = client.model(args.model)
    table = client.betti(model, args.pmax, args.qmax)
    verdicts = client.betti_checks(table, model) if args.check else {}
    payload: Dict[str, Any] = {"table": table.to_json()}
    if args.oracle:
        suite = client.oracle_suite()
        verdicts["oracle_equivalence"] = bool(suite["all_agree"])
        payload["oracle"] = suite
    return verdicts, payload


def _cmd_lattice(client: Syzlab, args: argparse.Namespace) -> Outcome:
    lemmas = sorted(lattice.LEMMAS) if args.lemma == "all" else [args.lemma]
    certs = []
    for lemma in lemmas:
        if args.grid:
            certs.extend(client.certify_grid(lemma, args.g_max, args.p_max))
        else:
            if args.g is None:
                raise ParameterError("--g is required without --grid")
            params = {"g": args.g} if args.p is None else {"g": args.g, "p": args.p}
            certs.append(client.certify(lemma, **params))
    verdicts = {f"{c.lemma_id} {json.dumps(c.params, sort_keys=True)}": c.passed for c in certs}
    return verdicts, {"certificates": [c.to_json() for c in certs]}


def _cmd_prym(client: Syzlab, args: argparse.Namespace) -> Outcome:
    result = client.prym_green(args.g, compute=args.compute)
    predicted = result["predicted"]
    payload: Dict[str, Any] = {"predicted": predicted.to_json()}  # type: ignore[attr-defined]
    verdicts: Dict[str, bool] = {"integral_table": True}
    if args.compute:
        payload["computed"] = result["computed"].to_json()  # type: ignore[attr-defined]
        payload["caveat"] = result["caveat"]
        payload["matches_prediction"] = result["matches_prediction"]
    return verdicts, payload


def _cmd_secant(client: Syzlab, args: argparse.Namespace) -> Outcome:
    if args.suite == "divisorial":
        report = client.secant_suite(args.samples, args.hyperelliptic_samples)
        verdicts = {"no_mismatches": not report["mismatches"],
                    "hyperelliptic_lhs_nonzero": bool(report["hyperelliptic_lhs_nonzero"])}
        return verdicts, report
    if args.suite == "diffvar":
        report = client.diffvar_suite(args.samples)
        return {"no_positive_failures": not report["positive_failures"]}, report
    if args.suite == "scroll":
        g = args.g or 5
        result = client.scroll(g)
        payload = {"g": g, "quadrics": len(result.quadrics), "cycles": len(result.cycles),
                   "k_bound": result.k_bound}
        verdicts = {"quadrics_vanish": result.quadrics_vanish,
                    "quadrics_independent": result.quadrics_independent,
                    "cycles_closed": result.cycles_closed,
                    "cycles_nonzero": result.cycles_nonzero,
                    "koszul_bound": result.k_bound >= len(result.quadrics)}
        return verdicts, payload
    if args.suite == "diffcon":
        report = client.diffcon_g4()
        if report["degenerate"]:
            return {"degenerate_quadric_flagged": True}, report
        keys = ("plus_point_member", "not_in_C1_minus_C1", "mixed_member")
        return {k: bool(report[k]) for k in keys}, report
    g = args.g or 5
    report = client.reduction_by_one(g, 2 * g + 2, 1)
    return {"implication_holds": bool(report["holds"])}, report


def _cmd_moduli(client: Syzlab, args: argparse.Namespace) -> Outcome:
    values = _parse_range(args.i_range)
    checks = MODULI_CHECKS if args.check == "all" else (args.check,)
    verdicts: Dict[str, bool] = {}
    payload: Dict[str, Any] = {}
    if "grr" in checks:
        grr = client.grr_check(args.grr_max)
        verdicts.update({f"grr ell={ell}": ok for ell, ok in grr.items()})
    per_i = [c for c in checks if c not in ("grr", "dims")]
    if per_i or "dims" in checks:
        reports = client.moduli_reports(values)
        for rep in reports:
            for name in per_i:
                verdicts[f"{name} i={rep['i']}"] = bool(rep["checks"][name])  # type: ignore[index]
        if "dims" in checks:
            payload["dims"] = [moduli.dim_count_check(i) for i in values]
        payload["reports"] = reports
    return verdicts, payload


def _cmd_scan(client: Syzlab, args: argparse.Namespace) -> Outcome:
    report = client.scan_torsion(args.g, args.crosscheck)
    return {"crosscheck_agrees": not report["disagreements"]}, report


COMMANDS: Dict[str, Callable[[Syzlab, argparse.Namespace], Outcome]] = {
    "betti": _cmd_betti,
    "lattice-certify": _cmd_lattice,
    "prym-green": _cmd_prym,
    "secant": _cmd_secant,
    "moduli": _cmd_moduli,
    "scan-torsion": _cmd_scan,
}


def _anchor(args: argparse.Namespace) -> str:
    if args.command == "betti" and args.oracle:
        return ANCHORS["betti --oracle"]
    if args.command == "secant":
        return ANCHORS[f"secant {args.suite}"]
    return ANCHORS[args.command]


def _params(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"command", "prime", "seed", "cache_dir", "no_cache", "output", "log_dir",
            "verbose", "path"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# region rendering -----------------------------------------------------------------------
def render(report: Report) -> str:
    lines = [f"{report.command} [{report.anchor}] prime={report.prime} seed={report.seed}"]
    table = report.payload.get("table")
    if isinstance(table, dict):
        lines.append(BettiTable.from_json(table).render())
    for key in ("predicted", "computed"):
        if isinstance(report.payload.get(key), dict):
            lines.append(f"{key}:")
            lines.append(BettiTable.from_json(report.payload[key]).render())
    if report.error:
        lines.append(f"ERROR {report.error}")
    failed = [name for name, ok in report.verdicts.items() if not ok]
    for name in failed[:20]:
        lines.append(f"FAIL {name}")
    if len(failed) > 20:
        lines.append(f"... and {len(failed) - 20} more failures")
    lines.append(f"{len(report.verdicts) - len(failed)}/{len(report.verdicts)} checks passed")
    return "\n".join(lines)


# region parser ---------------------------------------------------------------------------
def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--prime", type=int, default=None, help="field characteristic")
    parser.add_argument("--seed", type=int, default=None, help="random seed")
    parser.add_argument("--trial-budget", type=int, default=None,
                        help="randomized witness search budget")
    parser.add_argument("--cache-dir", type=Path, default=None, help="report cache directory")
    parser.add_argument("--no-cache", action="store_true", help="always recompute")
    parser.add_argument("--output", type=Path, default=None, help="write the JSON report here")
    parser.add_argument("--log-dir", type=Path, default=None, help="write a run log here")
    parser.add_argument("-v", "--verbose", action="store_true", help="log INFO to the console")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="syzlab", description="Syzygies of curves over prime fields."
    )
    parser.add_argument("--version", action="version", version=f"syzlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("betti", help="graded Betti table of a curve model")
    p.add_argument("--model", required=True, help='e.g. "quartic seed=3" or "hyp g=5 seed=7"')
    p.add_argument("--pmax", type=int, required=True)
    p.add_argument("--qmax", type=int, default=2)
    p.add_argument("--check", action="store_true", help="naturality and diagonal identities")
    p.add_argument("--oracle", action="store_true", help="run the resolution oracle suite")
    _common(p)

    p = sub.add_parser("lattice-certify", help="certify a lattice lemma")
    p.add_argument("--lemma", required=True, choices=sorted(lattice.LEMMAS) + ["all"])
    p.add_argument("--g", type=int, default=None)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--grid", action="store_true", help="run the default parameter grid")
    p.add_argument("--g-max", type=int, default=41)
    p.add_argument("--p-max", type=int, default=20)
    _common(p)

    p = sub.add_parser("prym-green", help="predicted Prym-canonical Betti table")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--compute", action="store_true", help="also compute a hyperelliptic model")
    _common(p)

    p = sub.add_parser("secant", help="secant and difference-variety suites")
    p.add_argument("--suite", default="divisorial",
                   choices=["divisorial", "diffvar", "scroll", "diffcon", "reduction"])
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--hyperelliptic-samples", type=int, default=20)
    p.add_argument("--g", type=int, default=None)
    _common(p)

    p = sub.add_parser("moduli", help="divisor class identities")
    p.add_argument("--i-range", default="1..60")
    p.add_argument("--check", default="all", choices=["all", *MODULI_CHECKS])
    p.add_argument("--grr-max", type=int, default=10)
    _common(p)

    p = sub.add_parser("scan-torsion", help="scan 2-torsion classes of a hyperelliptic curve")
    p.add_argument("--g", type=int, default=7)
    p.add_argument("--crosscheck", type=int, default=50)
    _common(p)

    p = sub.add_parser("report", help="re-render a stored JSON report")
    p.add_argument("path", type=Path)
    return parser


def _settings(args: argparse.Namespace) -> SyzlabSettings:
    settings = SyzlabSettings.from_env()
    overrides = {"prime": args.prime, "seed": args.seed, "trial_budget": args.trial_budget,
                 "cache_dir": args.cache_dir, "log_dir": args.log_dir}
    for key, value in overrides.items():
        if value is not None:
            setattr(settings, key, value)
    if args.no_cache:
        settings.use_cache = False
    return settings


def run(argv: Optional[Sequence[str]] = None) -> Tuple[int, Optional[Report]]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else 2), None

    if args.command == "report":
        try:
            report = Report.from_json(args.path.read_text(encoding="utf-8"))
        except (OSError, ValueError, TypeError) as exc:
            print(f"[error] {exc}", file=sys.stderr)
            return 2, None
        print(render(report))
        return (0 if report.passed else 1), report

    settings = _settings(args)
    console = logging.INFO if args.verbose else logging.WARNING
    setup_logging(settings.log_dir, console_level=console)

    params = _params(args)
    limits = {"wedge_cap": settings.wedge_cap, "dense_fill": settings.dense_fill,
              "trial_budget": settings.trial_budget}
    key = cache_key(args.command, params, settings.seed, settings.prime, limits)
    cache: Optional[ReportCache] = None
    try:
        if settings.use_cache:
            cache = ReportCache(settings.cache_dir)
    except CacheError as exc:
        print(f"[error] {exc}", file=sys.stderr)
        return 2, None

    text = cache.lookup(key) if cache is not None else None
    if text is None:
        report = Report(args.command, params, _anchor(args), settings.prime, settings.seed)
        client = Syzlab(settings=settings)
        start = time.perf_counter()
        try:
            report.verdicts, report.payload = COMMANDS[args.command](client, args)
        except ParameterError as exc:
            print(f"[error] {exc}", file=sys.stderr)
            return 2, None
        except SyzlabError as exc:
            report.error = f"{type(exc).__name__}: {exc}"
        report.timings["total_s"] = round(time.perf_counter() - start, 3)
        text = report.to_json()
        if cache is not None and report.error is None:
            try:
                cache.store(key, text)
            except CacheError as exc:
                logger.warning(str(exc))
    else:
        report = Report.from_json(text)

    if args.output is not None:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(text, encoding="utf-8")
    print(render(report))
    return (0 if report.passed else 1), report


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
