"""
cctlab - Entry Point
Đọc category/diagram/module bundle, chạy các construction và check suite,
ghi report JSON + bảng tóm tắt, cache theo content hash

    cctlab validate FILE...
    cctlab subdivide CATEGORY [--twice]
    cctlab hh DIAGRAM [BIMODULE] [--max-degree N]
    cctlab check NAME... [--seed S] [--config FILE]

Exit code: 0 mọi check đạt, 1 có check fail, 2 lỗi usage/input.
"""
import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Set

# Add parent to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import __version__
from app.core import bundle_io
from app.core.checks import SUITES, SuiteConfig, run_check, validate_config
from app.core.crash_guard import setup_global_exception_hooks
from app.core.curated import point_diagram
from app.core.diagram import regular_diagram_bimodule, shriek_cohomology
from app.core.errors import (
    BundleFormatError, ConfigError, CctError, FieldError, NotAPosetError, UnknownCheckError,
)
from app.core.exalg import Field
from app.core.fincat import CatKind, classify, subdivide
from app.core.logbus import get_log_bus
from app.core.result_cache import ResultCache
from app.core.settings_store import CACHE_ENV, get_settings_store
from app.core.task_defs import CheckReport, ExitCode, HTable
from app.core.task_manager import Job, get_task_manager
from app.core.utils import atomic_write_text, content_hash, elapsed_ms, sanitize_filename
from app.i18n import set_language, t

# Validator nào chạy cho từng loại bundle
CHECKED = {
    "category": ["composition table complete", "identity laws", "associativity", "composites typed"],
    "algebra": ["structure constants shape", "associativity", "unit law"],
    "diagram": ["category axioms", "algebra axioms per object", "algebra homomorphisms", "functoriality"],
    "module": ["diagram axioms", "fiber module axioms", "transition linearity", "functoriality"],
}


@dataclass
class RunContext:
    """Trạng thái dùng chung của một lần gọi CLI"""
    cache: ResultCache
    modulus: Optional[int] = None
    out: Optional[Path] = None
    cached: Set[str] = field(default_factory=set)


# ============ COMMANDS ============

def cmd_validate(paths: Sequence[str], ctx: RunContext) -> List[CheckReport]:
    """
    Chạy toàn bộ validator trên từng file

    Lỗi parse (BundleFormatError, FieldError) được raise lên: exit 2, không
    có report. Vi phạm tiên đề -> report FAIL kèm dữ liệu vi phạm.
    """
    reports = []
    for path in paths:
        start = time.time()
        data = bundle_io.inline_bundle(path)
        kind = bundle_io.bundle_kind(data)
        params = {"modulus": ctx.modulus}
        name = f"validate:{Path(path).name}"
        checked = list(CHECKED[kind])
        try:
            value = bundle_io.value_from_data(data, kind, ctx.modulus, str(path))
        except (BundleFormatError, FieldError):
            raise
        except CctError as e:
            report = CheckReport.failed(
                name, t("invalid", kind=kind, error=e), instance_id=content_hash(data), params=params,
                witness={"kind": kind, "checked": checked, "error": type(e).__name__, "violation": str(e)})
        else:
            witness = {"kind": kind, "checked": checked}
            if kind == "category":
                witness["classification"] = classify(value).value
            elif kind == "algebra":
                witness["dim"] = value.dim
                if value.peirce is not None:
                    checked.append("peirce idempotents")
            report = CheckReport.passed(name, t("validated", kind=kind, checked=", ".join(checked)),
                                        instance_id=content_hash(data), params=params, witness=witness)
        report.elapsed_ms = elapsed_ms(start)
        reports.append(report)
    return reports


def cmd_subdivide(path: str, twice: bool, ctx: RunContext) -> CheckReport:
    """Ghi C′ (và C″ với --twice) thành category file cạnh --out hoặc thư mục hiện tại"""
    start = time.time()
    data = bundle_io.inline_bundle(path)
    cat = bundle_io.category_from_data(data)
    out_dir = ctx.out or Path.cwd()
    stem = Path(path).stem
    log = get_log_bus()

    witness = {"source": {"objects": len(cat.objects), "kind": classify(cat).value}}
    stages = [("C'", f"{stem}.sub.json")]
    if twice:
        stages.append(("C''", f"{stem}.sub2.json"))
    current = cat
    ok = True
    for label, filename in stages:
        sub = subdivide(current)
        current = sub.category
        kind = classify(current)
        ok = ok and kind is CatKind.POSET
        written = bundle_io.write_category(out_dir / filename, current)
        log.info(t("written", path=written))
        witness[label] = {
            "objects": len(current.objects),
            "morphisms": len(current.non_identity()),
            "kind": kind.value,
            "file": filename,
        }

    last = witness[stages[-1][0]]
    message = t("subdivided", source=Path(path).name, kind=witness["source"]["kind"],
                objects=last["objects"], morphisms=last["morphisms"], result=last["kind"])
    factory = CheckReport.passed if ok else CheckReport.failed
    report = factory("subdivide", message, instance_id=content_hash(data),
                     params={"twice": twice}, witness=witness)
    report.elapsed_ms = elapsed_ms(start)
    return report


def cmd_hh(diagram_path: str, module_path: Optional[str], max_degree: int, size_cap: int,
           reduced: bool, ctx: RunContext) -> CheckReport:
    """
    dim HH^n(A!, M!) cho n = 0..max_degree; M mặc định là A

    DIAGRAM có thể là algebra bundle (xem như diagram trên một điểm).
    """
    start = time.time()
    data = bundle_io.inline_bundle(diagram_path)
    kind = bundle_io.bundle_kind(data)
    if kind not in ("algebra", "diagram"):
        raise BundleFormatError(diagram_path, f"expected an algebra or diagram bundle, got a {kind}")
    module_data = bundle_io.inline_bundle(module_path) if module_path else {"regular": True}

    params = {"max_degree": max_degree, "modulus": ctx.modulus, "reduced": reduced}
    inputs = {"diagram": data, "module": module_data}
    key = ctx.cache.make_key("hh", inputs, params, __version__)
    hit = ctx.cache.load(key)
    if hit is not None:
        ctx.cached.add("hh")
        return CheckReport.from_dict(json.loads(hit))

    value = bundle_io.value_from_data(data, kind, ctx.modulus, diagram_path)
    diagram = point_diagram(value) if kind == "algebra" else value
    if module_path:
        module = bundle_io.module_from_data(module_data, diagram, ctx.modulus, module_path)
    else:
        module = regular_diagram_bimodule(diagram)
    dims = shriek_cohomology(diagram, module, max_degree, size_cap, reduced)

    instance_id = content_hash(inputs)
    table = HTable(instance_id, ctx.modulus, dims, "reduced" if reduced else "full")
    report = CheckReport.passed("hh", t("hh_title", field=diagram.field.name), instance_id=instance_id,
                                params=params, witness={"htable": table.to_dict()})
    ctx.cache.store(key, report.to_json())
    report.elapsed_ms = elapsed_ms(start)
    return report


def _cached_check(name: str, cfg: SuiteConfig, ctx: RunContext) -> CheckReport:
    key = ctx.cache.make_key("check", {"check": name}, cfg.cache_params(), __version__)
    hit = ctx.cache.load(key)
    if hit is not None:
        ctx.cached.add(name)
        return CheckReport.from_dict(json.loads(hit))
    report = run_check(name, cfg)
    ctx.cache.store(key, report.to_json())
    return report


def cmd_check(names: Sequence[str], cfg: SuiteConfig, ctx: RunContext) -> List[CheckReport]:
    selected = list(SUITES) if list(names) == ["all"] else list(names)
    for name in selected:
        if name not in SUITES:
            raise UnknownCheckError(name, list(SUITES))
    validate_config(cfg)
    jobs = [Job(name, _cached_check, {"name": name, "cfg": cfg, "ctx": ctx}) for name in selected]
    return get_task_manager().run_all(jobs)


# ============ OUTPUT ============

def render_summary(reports: Sequence[CheckReport], cached: Set[str] = frozenset()) -> str:
    rows = [(t("col_check"), t("col_outcome"), t("col_time"), t("col_message"))]
    for r in reports:
        outcome = t("outcome_pass") if r.ok else t("outcome_fail")
        when = t("cached") if r.name in cached else f"{r.elapsed_ms} ms"
        rows.append((r.name, outcome, when, r.message))
    widths = [max(len(row[k]) for row in rows) for k in range(3)]
    lines = [t("summary_header")]
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)) + "  " + row[3])
    for r in reports:
        if r.controls:
            hit = sum(1 for v in r.controls.values() if v)
            lines.append(f"{r.name}: " + t("controls", hit=hit, total=len(r.controls)))
        table = r.witness.get("htable")
        if table:
            for n, dim in sorted(table["dims"].items(), key=lambda kv: int(kv[0])):
                lines.append(t("hh_row", n=n, dim=dim))
    passed = sum(1 for r in reports if r.ok)
    lines.append(t("totals", passed=passed, total=len(reports)))
    return "\n".join(lines) + "\n"


def emit(reports: Sequence[CheckReport], ctx: RunContext) -> str:
    """In summary ra stdout; với --out ghi thêm <name>.json và summary.txt"""
    summary = render_summary(reports, ctx.cached)
    if ctx.out is not None:
        for r in reports:
            atomic_write_text(ctx.out / f"{sanitize_filename(r.name.replace(':', '_'))}.json", r.to_json())
        atomic_write_text(ctx.out / "summary.txt", summary)
    sys.stdout.write(summary)
    return summary


# ============ ARGUMENTS ============

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mod", type=int, default=None, metavar="P",
                        help="compute over GF(P) instead of QQ")
    common.add_argument("--out", default=None, metavar="DIR", help="write reports into DIR")
    common.add_argument("--no-cache", action="store_true", help="ignore and do not write the result cache")
    common.add_argument("--cache-dir", default=None, metavar="DIR", help=f"cache root (default: {CACHE_ENV} or settings)")
    common.add_argument("--lang", choices=("vi", "en"), default=None)
    common.add_argument("--log-level", default=None, choices=("DEBUG", "INFO", "WARNING", "ERROR"))

    parser = argparse.ArgumentParser(prog="cctlab", description=t("app_title"))
    parser.add_argument("--version", action="version", version=f"cctlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="run structural validators on bundle files")
    p.add_argument("paths", nargs="+")

    p = sub.add_parser("subdivide", parents=[common], help="write the subdivision C' of a category")
    p.add_argument("category")
    p.add_argument("--twice", action="store_true", help="also write C''")

    p = sub.add_parser("hh", parents=[common], help="dimensions of HH^n(A!, M!)")
    p.add_argument("diagram")
    p.add_argument("module", nargs="?", default=None)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--full", action="store_true", help="use the full bar complex instead of the reduced one")

    p = sub.add_parser("check", parents=[common], help="run verification suites")
    p.add_argument("names", nargs="+", metavar="NAME", help=f"one of {', '.join(SUITES)} or 'all'")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--config", default=None, metavar="FILE", help="JSON suite config")
    p.add_argument("--corrupt", action="store_true", help="run each suite on its mutated instance")
    return parser


def _suite_config(args, settings) -> SuiteConfig:
    raw = {}
    if args.config:
        raw = bundle_io.read_json(args.config)
        if not isinstance(raw, dict):
            raise ConfigError(f"{args.config}: top-level value must be an object")
    raw.setdefault("seed", settings.seed)
    raw.setdefault("max_degree", settings.max_degree)
    raw.setdefault("size_cap", settings.size_cap)
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.max_degree is not None:
        raw["max_degree"] = args.max_degree
    if args.mod is not None:
        raw["modulus"] = args.mod
    elif "modulus" not in raw:
        raw["modulus"] = settings.modulus
    if args.corrupt:
        raw["corrupt"] = True
    return SuiteConfig.from_dict(raw)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)

    # Load settings
    store = get_settings_store()
    settings = store.settings
    set_language(args.lang or settings.language)

    # Setup log bus + crash guard
    log = get_log_bus()
    log.set_level(args.log_level or settings.log_level)
    cache_root = store.cache_dir(args.cache_dir)
    log_dir = store.log_dir(args.cache_dir)
    setup_global_exception_hooks(log_dir)
    log.set_log_file(log_dir / "cctlab.log")
    get_task_manager().set_max_workers(settings.workers)

    modulus = args.mod if args.mod is not None else (settings.modulus or None)
    ctx = RunContext(
        cache=ResultCache(cache_root / "results", enabled=not args.no_cache),
        modulus=modulus,
        out=Path(args.out) if args.out else None,
    )
    log.debug(f"[CLI] {args.command} modulus={modulus} cache={'off' if args.no_cache else cache_root}")

    try:
        if modulus is not None:
            Field(modulus)
        if args.command == "validate":
            reports = cmd_validate(args.paths, ctx)
        elif args.command == "subdivide":
            reports = [cmd_subdivide(args.category, args.twice, ctx)]
        elif args.command == "hh":
            degree = args.max_degree if args.max_degree is not None else settings.max_degree
            if degree < 0:
                raise ConfigError("--max-degree must be non-negative")
            reports = [cmd_hh(args.diagram, args.module, degree, settings.size_cap, not args.full, ctx)]
        else:
            reports = cmd_check(args.names, _suite_config(args, settings), ctx)
    except ConfigError as e:
        log.error(t("error_config", error=e))
        return ExitCode.USAGE
    except NotAPosetError as e:
        log.error(t("error_input", error=e))
        log.info(t("hint_subdivide"))
        return ExitCode.USAGE
    except CctError as e:
        log.error(t("error_input", error=e))
        return ExitCode.USAGE

    emit(reports, ctx)
    return ExitCode.SUCCESS if all(r.ok for r in reports) else ExitCode.CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
