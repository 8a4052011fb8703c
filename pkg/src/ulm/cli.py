"""Command-line entry point: classify, build, check and count."""

from __future__ import annotations

import argparse
import os
import re
import sys
from dataclasses import dataclass, field

from . import model as M
from . import oracle
from . import verify as V
from .ideal import GuardTripped

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD, EXIT_IO = 0, 1, 2, 3, 4
COMMANDS = ("classify", "build", "check", "count")
TARGETS = ("chart", "components", "exc-incidence", "exc-gluing")
_SELECTOR = re.compile(r"(i|ii|iii|iv|class|bl):(\d+),(\d+)\Z")


class UsageError(ValueError):
    """Bad command line; maps to exit code 2."""


@dataclass
class ChartSelector:
    kind: str
    a: int
    b: int

    @property
    def blowup(self) -> bool:
        return self.kind == "bl"


@dataclass
class RunConfig:
    command: str
    n: int
    k: int
    charts: list | None = None
    family: str | None = None
    suite: list = field(default_factory=list)
    qs: list = field(default_factory=list)
    target: str | None = None
    out: str | None = None
    guards: dict = field(default_factory=dict)
    sign_variant: str = "sec33"
    trace_variant: str = "two-pi"
    timing: bool = True


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ulm", description="Verification workbench for ramified unitary local models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--k", type=int, required=True)

    def guards(sp):
        sp.add_argument("--guard-pairs", type=int, help="critical pair budget per Groebner basis")
        sp.add_argument("--guard-ms", type=int, help="time budget per Groebner basis in ms")
        sp.add_argument("--guard-points", type=int, help="enumeration budget in points")

    c = sub.add_parser("classify", help="print the case of (n, k)")
    common(c)

    b = sub.add_parser("build", help="write a chart ideal and its manifest")
    common(b)
    b.add_argument("--family", required=True, choices=M.FAMILIES)
    b.add_argument("--chart", help="selector like i:2,1, class:2,1 or bl:3,5")
    b.add_argument("--out")
    b.add_argument("--sign-variant", default="sec33", choices=M.SIGN_VARIANTS)
    b.add_argument("--trace-variant", default="two-pi", choices=M.TRACE_VARIANTS)
    guards(b)

    k = sub.add_parser("check", help="run verification suites and write a JSON report")
    common(k)
    k.add_argument("--suite", required=True, help="comma list of suites or 'all'")
    k.add_argument("--chart", help="selector, comma-free; 'all' for the representative set")
    k.add_argument("--out")
    k.add_argument("--sign-variant", default="sec33", choices=M.SIGN_VARIANTS)
    k.add_argument("--trace-variant", default="two-pi", choices=M.TRACE_VARIANTS)
    k.add_argument("--no-timing", action="store_true", help="write ms=0 for byte-stable reports")
    guards(k)

    q = sub.add_parser("count", help="finite-field point counts as CSV")
    common(q)
    q.add_argument("--q", required=True, help="comma list of odd primes")
    q.add_argument("--target", required=True, choices=TARGETS)
    q.add_argument("--chart")
    q.add_argument("--family", default="spl", choices=("class", "spl"))
    q.add_argument("--out")
    guards(q)
    return p


def parse_selector(text: str) -> ChartSelector:
    m = _SELECTOR.match(text.strip())
    if not m:
        raise UsageError(f"--chart: malformed selector {text!r}; expected CLASS:a,b or bl:g,e")
    return ChartSelector(m.group(1), int(m.group(2)), int(m.group(3)))


def _check_selector(sel: ChartSelector, inst: M.Instance) -> None:
    for v in (sel.a, sel.b):
        if not 1 <= v <= inst.n:
            raise UsageError(f"--chart: index {v} out of range 1..{inst.n}")
    if sel.kind in ("i", "ii", "iii", "iv"):
        actual = M.chart_class(inst, sel.a, sel.b)
        if actual != sel.kind:
            raise UsageError(f"--chart: ({sel.a},{sel.b}) has class {actual}, not {sel.kind}")


def _parse_qs(text: str) -> list:
    out = []
    for part in text.split(","):
        try:
            q = int(part)
        except ValueError:
            raise UsageError(f"--q: {part!r} is not an integer") from None
        if q % 2 == 0:
            raise UsageError(f"--q: {q} has even characteristic")
        try:
            oracle.check_field(q)
        except oracle.OracleError as e:
            raise UsageError(f"--q: {e}") from None
        out.append(q)
    return out


def parse_args(argv) -> RunConfig:
    ns = _parser().parse_args(list(argv))
    n, k = ns.n, ns.k
    if n < 2 or not 0 <= 2 * k <= n:
        raise UsageError(f"--n/--k: need n >= 2 and 0 <= k <= n/2, got ({n},{k})")
    cfg = RunConfig(ns.command, n, k, out=getattr(ns, "out", None))
    cfg.guards = {
        name: getattr(ns, attr)
        for name, attr in (("ULM_GUARD_PAIRS", "guard_pairs"), ("ULM_GUARD_MS", "guard_ms"),
                           ("ULM_GUARD_POINTS", "guard_points"))
        if getattr(ns, attr, None) is not None
    }
    for name, v in cfg.guards.items():
        if v <= 0:
            raise UsageError(f"{name}: guards must be positive")
    if ns.command == "classify":
        return cfg
    if M.classify_case(n, k) == M.PI_MODULAR:
        raise UsageError(f"--n/--k: ({n},{k}) is pi-modular; chart commands are not defined")
    inst = M.instance(n, k)
    cfg.sign_variant = getattr(ns, "sign_variant", "sec33")
    cfg.trace_variant = getattr(ns, "trace_variant", "two-pi")
    chart = getattr(ns, "chart", None)
    if chart and chart != "all":
        sel = parse_selector(chart)
        _check_selector(sel, inst)
        cfg.charts = [sel]
    if ns.command == "build":
        cfg.family = ns.family
        if ns.family != "local":
            if not cfg.charts:
                raise UsageError(f"--chart: family {ns.family} needs a chart selector")
            if cfg.charts[0].blowup != (ns.family == "blowup"):
                raise UsageError("--chart: bl:g,e selectors go with --family blowup only")
    elif ns.command == "check":
        try:
            cfg.suite = V.expand_selection([s for s in ns.suite.split(",") if s])
        except ValueError as e:
            raise UsageError(f"--suite: {e}") from None
        cfg.timing = not ns.no_timing
        if cfg.charts:
            want_bl = cfg.charts[0].blowup
            bad = [s for s in cfg.suite if s != "pairing" and (s == "blowup") != want_bl]
            if bad:
                raise UsageError(f"--chart: selector does not fit suite {bad[0]}")
    else:
        cfg.qs = _parse_qs(ns.q)
        cfg.target = ns.target
        cfg.family = ns.family
        if ns.target in ("chart", "components"):
            if not cfg.charts or cfg.charts[0].blowup:
                raise UsageError(f"--chart: target {ns.target} needs a model chart selector")
            if M.chart_class(inst, cfg.charts[0].a, cfg.charts[0].b) == "iv":
                raise UsageError("--chart: class (iv) charts have empty special fiber")
    return cfg


# ----------------------------------------------------------------- execute


def _emit(cfg: RunConfig, text: str, suffix: str = "") -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        return
    with open(cfg.out + suffix, "w", encoding="utf-8") as fh:
        fh.write(text)


def _build(cfg: RunConfig) -> int:
    sel = cfg.charts[0] if cfg.charts else None
    chart = M.build_chart(cfg.family, cfg.n, cfg.k, (sel.a, sel.b) if sel else None,
                          cfg.sign_variant, cfg.trace_variant)
    ideal_text, manifest = export_texts(chart, cfg)
    _emit(cfg, ideal_text)
    if cfg.out is not None:
        _emit(cfg, manifest, ".manifest")
    return EXIT_OK


def export_texts(chart: M.Chart, cfg: RunConfig):
    ideal_text, manifest = M.export_chart(chart)
    manifest += f"sign_variant: {cfg.sign_variant}\ntrace_variant: {cfg.trace_variant}\n"
    return ideal_text, manifest


def _check(cfg: RunConfig) -> int:
    config = V.default_config(cfg.sign_variant, cfg.trace_variant)
    charts = [(s.a, s.b) for s in cfg.charts] if cfg.charts else None
    reports = V.run_suite(cfg.n, cfg.k, cfg.suite, config, charts)
    _emit(cfg, V.report_json(cfg.n, cfg.k, config, reports, cfg.timing))
    if cfg.out is not None:
        for r in reports:
            line = f"{r.check_id} {r.chart or '-'} {r.status}"
            if r.witness:
                line += f" [{r.witness['generator']} -> {r.witness['normal_form']}]"
            print(line)
    status = V.aggregate(reports)
    return {V.PASS: EXIT_OK, V.FAIL: EXIT_FAIL, V.GUARD: EXIT_GUARD}[status]


def _row(target, q, m, count, component, ms):
    return {"target": target, "q": q, "m": m, "count": count, "component": component, "ms": ms}


def _count(cfg: RunConfig) -> int:
    rows, code = [], EXIT_OK
    n, k = cfg.n, cfg.k
    for q in cfg.qs:
        if cfg.target in ("chart", "components"):
            sel = cfg.charts[0]
            chart = V.family_chart(cfg.family, n, k, sel.a, sel.b)
            spec = M.build_components(chart)
            name = chart.name
            m = chart.ring.nvars
            if cfg.target == "chart":
                pc = oracle.count_affine(spec.special_fiber, q, name)
                rows.append(_row(name, q, m, pc.count, "special-fiber", pc.ms))
            else:
                uc = oracle.count_union_check(spec, q)
                for comp, c in uc.counts.items():
                    rows.append(_row(name, q, m, c, comp, 0))
                rows.append(_row(name, q, m, uc.total, "union", 0))
                rows.append(_row(name, q, m, uc.direct, "special-fiber", 0))
                if not uc.consistent:
                    code = EXIT_FAIL
        elif cfg.target == "exc-incidence":
            quiver, bl = M.build_exc_incidence(n, k)
            if 2 * k % n:
                for comp, I in quiver.components.items():
                    pc = oracle.count_projective_incidence(quiver, q, I)
                    rows.append(_row("nexc", q, I.ring.nvars, pc.count, comp, pc.ms))
            pc = oracle.count_projective_incidence(bl, q)
            rows.append(_row("bl", q, bl.ideal.ring.nvars, pc.count, "Exc1", pc.ms))
        else:
            pc = oracle.count_exc1_gluing(n, k, q)
            rows.append(_row("exc-gluing", q, 0, pc.count, "Exc1", pc.ms))
    _emit(cfg, oracle.csv_rows(rows))
    return code


def execute(cfg: RunConfig) -> int:
    if cfg.command == "classify":
        print(M.classify_case(cfg.n, cfg.k))
        return EXIT_OK
    saved = {name: os.environ.get(name) for name in cfg.guards}
    os.environ.update({name: str(v) for name, v in cfg.guards.items()})
    try:
        if cfg.command == "build":
            return _build(cfg)
        if cfg.command == "check":
            return _check(cfg)
        return _count(cfg)
    except GuardTripped as e:
        print(f"ulm: {e}", file=sys.stderr)
        return EXIT_GUARD
    except oracle.OracleError as e:
        print(f"ulm: {e}", file=sys.stderr)
        return EXIT_GUARD if "guard" in str(e) else EXIT_USAGE
    except M.ModelError as e:
        print(f"ulm: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"ulm: {e}", file=sys.stderr)
        return EXIT_IO
    finally:
        for name, v in saved.items():
            if v is None:
                os.environ.pop(name, None)
            else:
                os.environ[name] = v


def main(argv=None) -> int:
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as e:
        print(f"ulm: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return execute(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
