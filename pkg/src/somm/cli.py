"""Command-line interface: ``somm check | emit | bench | validate``.

Exit status: 0 allowed (or success), 1 forbidden (or axiom violations),
2 any error, including timeouts and resource limits.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import oracle
from .events import EventStructure, InvalidEventStructure, to_rel_structure, validate_axioms
from .litmus import (
    DEFAULT_EVENT_CAP,
    BuildError,
    EventCapExceeded,
    LitmusSyntaxError,
    build_event_structure,
    gen_store_buffer,
    parse_file,
)
from .models import ALIASES, MODELS, generate
from .qbf import (
    ExternalSolverError,
    MemoryCapExceeded,
    SolverTimeout,
    TranslationError,
    simplify,
    solve,
    translate,
    write_qdimacs,
)
from .qbf.qcir import write_qcir_to
from .qbf.qdimacs import clausify, dump_qdimacs
from .qbf.external import external_command, run_external
from .qbf.solver import DEFAULT_MEM_CAP_MB, DEFAULT_TIMEOUT, ExpansionTooLarge

BACKENDS = ("embedded", "oracle", "emit-qcir", "emit-qdimacs", "external")
EXIT_ALLOWED, EXIT_FORBIDDEN, EXIT_ERROR = 0, 1, 2
RECORD_FIELDS = (
    "test",
    "model",
    "backend",
    "status",
    "error",
    "message",
    "events",
    "variables",
    "millis",
    "witness",
    "output",
)


@dataclass
class RunConfig:
    model: str = "sc"
    backend: str = "embedded"
    timeout: float = DEFAULT_TIMEOUT
    mem_cap: float = DEFAULT_MEM_CAP_MB
    event_cap: int = DEFAULT_EVENT_CAP
    values: tuple | None = None
    jr_n: int | None = None
    output: str | None = None
    prenex: bool = True

    def __post_init__(self):
        self.model = ALIASES.get(self.model.lower(), self.model.lower())
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.timeout <= 0 or self.mem_cap <= 0 or self.event_cap <= 0:
            raise ValueError("limits must be positive")
        if self.jr_n is not None and self.jr_n < 0:
            raise ValueError("--jr-n must be non-negative")


@dataclass
class Record:
    test: str
    model: str
    backend: str
    status: str = "error"  # allowed | forbidden | emitted | error
    error: str | None = None  # parse | build | event-cap | timeout | memory | oracle-infeasible | ...
    message: str = ""
    events: int | None = None
    variables: int | None = None
    millis: int = 0
    witness: dict | None = None
    output: str | None = None

    def machine(self) -> str:
        d = asdict(self)
        return json.dumps({k: d[k] for k in RECORD_FIELDS}, sort_keys=False)

    def exit_code(self) -> int:
        if self.status in ("allowed", "emitted"):
            return EXIT_ALLOWED
        if self.status == "forbidden":
            return EXIT_FORBIDDEN
        return EXIT_ERROR


# -- pipeline ------------------------------------------------------------------------


def _model_kwargs(cfg: RunConfig) -> dict:
    return {"n": cfg.jr_n} if cfg.model == "jr" else {}


def _emit(q, es, cfg: RunConfig, fmt: str, path: Path, name: str) -> dict:
    q = simplify(q)
    with open(path, "w") as fh:
        if fmt == "qcir":
            counts = write_qcir_to(fh, q.circuit, q.root, prenex=cfg.prenex)
            blocks = None
        else:
            cnf = clausify(q.circuit, q.root)
            fh.write(dump_qdimacs(cnf))
            counts = {"variables": cnf.num_vars, "clauses": len(cnf.clauses)}
            blocks = "".join(k for k, vs in cnf.prefix if vs)
    meta = {
        "test": name,
        "model": cfg.model,
        "format": fmt,
        "events": len(es.events),
        "variables": q.num_vars(),
        **{f"file_{k}": v for k, v in counts.items()},
    }
    if blocks is not None:
        meta["quantifier_blocks"] = blocks
    if cfg.model == "jr":
        meta["jr_n"] = cfg.jr_n if cfg.jr_n is not None else len(es.events)
    Path(str(path) + ".json").write_text(json.dumps(meta, indent=2) + "\n")
    return meta


def _witness_summary(es: EventStructure, witness: dict) -> dict:
    out = {}
    for name, tuples in witness.items():
        if all(len(t) == 1 for t in tuples):
            out[name] = [es.events[t[0]].describe() for t in tuples]
        else:
            out[name] = [" -> ".join(es.events[i].describe() for i in t) for t in tuples]
    return out


def run_check(es: EventStructure, name: str, cfg: RunConfig, source: Path | None = None) -> Record:
    rec = Record(test=name, model=cfg.model, backend=cfg.backend, events=len(es.events))
    started = time.monotonic()
    try:
        rs = to_rel_structure(es)
        ms = generate(cfg.model, rs, **_model_kwargs(cfg))
        if cfg.backend == "oracle":
            ok, bindings = oracle.Oracle(rs).witness(ms.sentence)
            rec.status = "allowed" if ok else "forbidden"
            if ok:
                wit = {v.name: sorted(ts) for v, ts in bindings.items() if v.name in ms.witnesses}
                rec.witness = _witness_summary(es, wit)
            return rec
        q = translate(rs, ms.sentence)
        rec.variables = q.num_vars()
        if cfg.backend in ("emit-qcir", "emit-qdimacs"):
            fmt = cfg.backend.split("-", 1)[1]
            stem = source.with_suffix("") if source else Path(name)
            path = Path(cfg.output) if cfg.output else Path(f"{stem}.{cfg.model}.{fmt}")
            _emit(q, es, cfg, fmt, path, name)
            rec.status, rec.output = "emitted", str(path)
            return rec
        if cfg.backend == "external":
            if external_command() is None:
                raise ExternalSolverError("no external solver configured (set SOMM_QBF_SOLVER)")
            with tempfile.TemporaryDirectory() as tmp:
                path = Path(tmp) / "instance.qdimacs"
                path.write_text(write_qdimacs(q.circuit, q.root))
                value = run_external(str(path), timeout=cfg.timeout)
            rec.status = "allowed" if value else "forbidden"
            return rec
        verdict = solve(q, timeout=cfg.timeout, mem_cap_mb=cfg.mem_cap)
        rec.status = "allowed" if verdict.value else "forbidden"
        if verdict.value:
            shown = {k: v for k, v in verdict.witness.items() if k in ms.witnesses}
            rec.witness = _witness_summary(es, shown)
        return rec
    except SolverTimeout as exc:
        rec.error, rec.message = "timeout", str(exc)
    except MemoryCapExceeded as exc:
        rec.error, rec.message = "memory", str(exc)
    except ExpansionTooLarge as exc:
        rec.error, rec.message = "expansion", str(exc)
    except oracle.OracleInfeasible as exc:
        rec.error, rec.message = "oracle-infeasible", str(exc)
    except ExternalSolverError as exc:
        rec.error, rec.message = "external", str(exc)
    except (TranslationError, InvalidEventStructure) as exc:
        rec.error, rec.message = "translation", str(exc)
    except OSError as exc:
        rec.error, rec.message = "io", str(exc)
    finally:
        rec.millis = int((time.monotonic() - started) * 1000)
    rec.status = "error"
    return rec


def load_test(path: Path, cfg: RunConfig):
    """Parse and unfold a litmus file; returns ``(event structure, name)``."""
    test = parse_file(path)
    es = build_event_structure(test, values=cfg.values, event_cap=cfg.event_cap)
    return es, test.name


def _load_or_record(path: Path, cfg: RunConfig):
    rec = Record(test=str(path), model=cfg.model, backend=cfg.backend)
    try:
        es, name = load_test(path, cfg)
        return es, name, None
    except FileNotFoundError as exc:
        rec.error, rec.message = "io", f"cannot read {exc.filename}"
    except OSError as exc:
        rec.error, rec.message = "io", str(exc)
    except LitmusSyntaxError as exc:
        rec.error, rec.message = "parse", f"{path}:{exc}"
    except EventCapExceeded as exc:
        rec.error, rec.message = "event-cap", str(exc)
    except BuildError as exc:
        rec.error, rec.message = "build", str(exc)
    return None, None, rec


# -- output ---------------------------------------------------------------------------


def _print_human(rec: Record, out=sys.stdout):
    if rec.status == "error":
        print(f"error ({rec.error}): {rec.message}", file=out)
        return
    if rec.status == "emitted":
        print(f"{rec.test}: wrote {rec.output} ({rec.events} events, {rec.variables} variables)", file=out)
        return
    print(f"{rec.test} under {rec.model}: {rec.status.capitalize()}", file=out)
    print(f"  events {rec.events}, variables {rec.variables if rec.variables is not None else '-'}, "
          f"{rec.millis} ms ({rec.backend})", file=out)
    if rec.witness:
        for name, items in rec.witness.items():
            print(f"  {name}: {', '.join(items) if items else '(empty)'}", file=out)


def _report(rec: Record, machine: bool) -> int:
    if machine:
        print(rec.machine())
    else:
        _print_human(rec, sys.stdout if rec.status != "error" else sys.stderr)
    return rec.exit_code()


# -- commands -------------------------------------------------------------------------


def _config(args, backend=None) -> RunConfig:
    return RunConfig(
        model=args.model,
        backend=backend or getattr(args, "backend", "embedded"),
        timeout=args.timeout,
        mem_cap=args.mem_cap,
        event_cap=args.event_cap,
        values=args.values,
        jr_n=args.jr_n,
        output=getattr(args, "output", None),
        prenex=not getattr(args, "non_prenex", False),
    )


def cmd_check(args) -> int:
    cfg = _config(args)
    path = Path(args.file)
    es, name, err = _load_or_record(path, cfg)
    if err is not None:
        return _report(err, args.machine)
    return _report(run_check(es, name, cfg, path), args.machine)


def cmd_emit(args) -> int:
    cfg = _config(args, backend=f"emit-{args.format}")
    path = Path(args.file)
    es, name, err = _load_or_record(path, cfg)
    if err is not None:
        return _report(err, args.machine)
    return _report(run_check(es, name, cfg, path), args.machine)


def parse_range(text: str) -> range:
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO..HI, got {text!r}") from None
    if lo < 2 or hi < lo:
        raise argparse.ArgumentTypeError("store-buffer sizes start at 2 and the range must be non-empty")
    return range(lo, hi + 1)


BENCH_FIELDS = ("n", "events", "variables", "verdict", "millis")


def bench_row(n: int, cfg: RunConfig) -> dict:
    started = time.monotonic()
    try:
        es = build_event_structure(gen_store_buffer(n), values=cfg.values, event_cap=cfg.event_cap)
    except EventCapExceeded:
        return {"n": n, "events": "", "variables": "", "verdict": "event-cap", "millis": 0}
    rec = run_check(es, f"SB{n}", cfg)
    verdict = rec.status if rec.status != "error" else rec.error
    return {
        "n": n,
        "events": len(es.events),
        "variables": rec.variables if rec.variables is not None else "",
        "verdict": verdict,
        "millis": int((time.monotonic() - started) * 1000),
    }


def cmd_bench(args) -> int:
    cfg = _config(args)
    sizes = list(args.range)
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(bench_row, sizes, [cfg] * len(sizes)))
    else:
        rows = [bench_row(n, cfg) for n in sizes]
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=BENCH_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.csv:
            out.close()
    return EXIT_ALLOWED


def cmd_validate(args) -> int:
    path = Path(args.file)
    try:
        if path.suffix == ".json":
            es = EventStructure.from_json(path.read_text())
        else:
            test = parse_file(path)
            es = build_event_structure(test, values=args.values, event_cap=args.event_cap)
    except FileNotFoundError:
        print(f"error (io): cannot read {path}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError, KeyError) as exc:
        kind = "parse" if isinstance(exc, LitmusSyntaxError) else "input"
        print(f"error ({kind}): {exc}", file=sys.stderr)
        return EXIT_ERROR
    violations = validate_axioms(es)
    if args.machine:
        print(json.dumps({
            "test": es.name or str(path),
            "events": len(es.events),
            "ok": not violations,
            "violations": [{"axiom": v.axiom, "witness": list(v.witness)} for v in violations],
        }))
    elif violations:
        for v in violations:
            print(f"violation {v}")
    else:
        print(f"OK: {len(es.events)} events satisfy every axiom")
    return EXIT_FORBIDDEN if violations else EXIT_ALLOWED


# -- argument parsing -----------------------------------------------------------------


def _values(text: str) -> tuple:
    try:
        return tuple(sorted({int(v) for v in text.split(",") if v.strip()}))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if v <= 0:
            raise argparse.ArgumentTypeError("must be positive")
        return v

    return conv


def _common(p: argparse.ArgumentParser, solving: bool = True):
    p.add_argument("--model", default="sc", choices=sorted({*MODELS, *ALIASES}), help="memory model")
    p.add_argument("--values", type=_values, help="read-value domain, e.g. 0,1,2")
    p.add_argument("--event-cap", type=_positive(int), default=DEFAULT_EVENT_CAP, help="maximum events built")
    p.add_argument("--jr-n", type=int, help="closure bound for jr (default: number of events)")
    p.add_argument("--timeout", type=_positive(float), default=DEFAULT_TIMEOUT, help="seconds per instance")
    p.add_argument("--mem-cap", type=_positive(float), default=DEFAULT_MEM_CAP_MB, help="MiB of resident memory")
    p.add_argument("--machine", action="store_true", help="one JSON record per result")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="somm", description="Memory-model checking through quantified boolean formulas.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide whether the asked outcome is allowed")
    p.add_argument("file")
    _common(p)
    p.add_argument("--backend", default="embedded", choices=BACKENDS)
    p.add_argument("-o", "--output", help="file written by the emit backends")
    p.add_argument("--non-prenex", action="store_true", help="keep quantifiers inside QCIR gates")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("emit", help="write a QCIR or QDIMACS instance and a metadata sidecar")
    p.add_argument("file")
    _common(p)
    p.add_argument("--format", choices=("qcir", "qdimacs"), default="qcir")
    p.add_argument("-o", "--output", help="instance path (default: next to the input)")
    p.add_argument("--non-prenex", action="store_true", help="keep quantifiers inside QCIR gates")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("bench", help="store-buffer scaling run, CSV output")
    p.add_argument("range", type=parse_range, help="N or LO..HI (N >= 2)")
    _common(p)
    p.add_argument("--backend", default="embedded", choices=BACKENDS)
    p.add_argument("--workers", type=_positive(int), default=1)
    p.add_argument("--csv", help="write rows here instead of stdout")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate", help="check the event-structure axioms")
    p.add_argument("file", help="litmus file or event-structure JSON dump")
    p.add_argument("--values", type=_values)
    p.add_argument("--event-cap", type=_positive(int), default=DEFAULT_EVENT_CAP)
    p.add_argument("--machine", action="store_true")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_ALLOWED
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error (usage): {exc}", file=sys.stderr)
        return EXIT_ERROR
    except KeyboardInterrupt:
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
