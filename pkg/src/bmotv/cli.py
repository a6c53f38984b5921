"""Command-line front end: ``bmotv <command> --config <path> [--out <dir>] [--threads N]``.

Commands: ``tv`` (variation decomposition with a coarea cross-check),
``kappa`` (one estimate, optional family dump), ``sweep`` and ``gamma``
(CSV report plus JSON summary), ``verify`` (bundled acceptance suite).
Exit codes: 0 ok, 2 config error, 3 acceptance failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from bmotv import bvfun
from bmotv.limits import EpsSchedule, Family, SweepReport, gamma_experiment, sweep
from bmotv.packing import PackingParams, kappa
from bmotv.recovery import sbv_recovery_family, smooth_recovery_family

EXIT_OK, EXIT_CONFIG, EXIT_ACCEPTANCE, EXIT_IO = 0, 2, 3, 4
COMMANDS = ("tv", "kappa", "sweep", "gamma", "verify")
FAMILY_KINDS = ("constant", "smooth", "sbv")
DEFAULT_SCHEDULE = {"kind": "geometric", "start": None, "ratio": 0.5, "n": 8}
DEFAULT_OUTPUT = {"csv": "report.csv", "json": "summary.json", "family": "family.json", "plan": "plan.json"}
_TOP_KEYS = {"command", "function", "function_file", "eps", "packing", "schedule", "family", "p", "t_samples", "output", "threads"}


class ConfigError(ValueError):
    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    function: dict | None = None
    function_file: str | None = None
    eps: float | None = None
    packing: PackingParams = field(default_factory=PackingParams)
    schedule: dict = field(default_factory=lambda: dict(DEFAULT_SCHEDULE))
    family: dict = field(default_factory=lambda: {"kind": "constant"})
    p: float = 1.0
    t_samples: int = 1000
    output: dict = field(default_factory=lambda: dict(DEFAULT_OUTPUT))
    threads: int | None = None
    base_dir: str | None = field(default=None, compare=False)

    def to_dict(self):
        d = {"command": self.command}
        if self.function is not None:
            d["function"] = self.function
        if self.function_file is not None:
            d["function_file"] = self.function_file
        if self.eps is not None:
            d["eps"] = self.eps
        pk = self.packing
        d["packing"] = {"m": pk.m, "tol": pk.tol, "angles": pk.angles, "shifts": pk.shifts}
        d["schedule"] = self.schedule
        d["family"] = self.family
        d["p"] = "inf" if math.isinf(self.p) else self.p
        d["t_samples"] = self.t_samples
        d["output"] = self.output
        if self.threads is not None:
            d["threads"] = self.threads
        return d

    def model(self):
        if self.function is not None:
            return bvfun.model_from_dict(self.function, base_dir=self.base_dir)
        path = Path(self.function_file)
        if self.base_dir is not None and not path.is_absolute():
            path = Path(self.base_dir) / path
        return bvfun.load_model(path)


def config_to_text(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"


def _num(d, key, where, kind=float, positive=True, default=None):
    if key not in d:
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(where, f"expected a number, got {v!r}")
    if kind is int and v != int(v):
        raise ConfigError(where, f"expected an integer, got {v!r}")
    v = kind(v)
    if positive and not v > 0:
        raise ConfigError(where, f"must be positive, got {v!r}")
    return v


def _parse_schedule(s):
    if not isinstance(s, dict):
        raise ConfigError("schedule", "expected an object")
    kind = s.get("kind", "geometric")
    if kind == "geometric":
        extra = set(s) - {"kind", "start", "ratio", "n"}
        if extra:
            raise ConfigError("schedule", f"unknown keys {sorted(extra)}")
        out = {
            "kind": kind,
            "start": _num(s, "start", "schedule.start") if s.get("start") is not None else None,
            "ratio": _num(s, "ratio", "schedule.ratio", default=0.5),
            "n": _num(s, "n", "schedule.n", int, default=8),
        }
        if not out["ratio"] < 1:
            raise ConfigError("schedule.ratio", "must lie in (0, 1)")
        return out
    if kind == "logperiodic":
        try:
            EpsSchedule.logperiodic(s["base"], s["k"], s["taus"])
        except KeyError as exc:
            raise ConfigError(f"schedule.{exc.args[0]}", "required for a log-periodic schedule") from exc
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError("schedule", str(exc)) from exc
        return {"kind": kind, "base": float(s["base"]), "k": [int(s["k"][0]), int(s["k"][1])], "taus": [float(t) for t in s["taus"]]}
    if kind == "explicit":
        vals = s.get("values")
        if not isinstance(vals, list):
            raise ConfigError("schedule.values", "expected a list of eps values")
        try:
            EpsSchedule(tuple(vals))
        except (TypeError, ValueError) as exc:
            raise ConfigError("schedule.values", str(exc)) from exc
        out = {"kind": kind, "values": [float(v) for v in vals]}
        if "window" in s:
            out["window"] = _num(s, "window", "schedule.window", int)
        return out
    raise ConfigError("schedule.kind", f"unknown schedule kind {kind!r}")


def build_schedule(spec: dict, domain) -> EpsSchedule:
    kind = spec["kind"]
    if kind == "geometric":
        start = spec["start"] if spec["start"] is not None else min(domain.sides) / 4.0
        return EpsSchedule.geometric(start, spec["ratio"], spec["n"])
    if kind == "logperiodic":
        return EpsSchedule.logperiodic(spec["base"], spec["k"], spec["taus"])
    return EpsSchedule(tuple(spec["values"]), spec.get("window", 1))


def parse_config(text: str, base_dir=None) -> ExperimentConfig:
    """Validate a JSON experiment config and apply defaults."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<config>", f"malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("<config>", "expected a JSON object")
    extra = set(raw) - _TOP_KEYS
    if extra:
        raise ConfigError(sorted(extra)[0], "unknown field")
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    function = raw.get("function")
    function_file = raw.get("function_file")
    if function is not None and function_file is not None:
        raise ConfigError("function", "give either 'function' or 'function_file', not both")
    if command != "verify" and function is None and function_file is None:
        raise ConfigError("function", "required for command " + command)
    if function is not None and not isinstance(function, dict):
        raise ConfigError("function", "expected an object")
    if function_file is not None:
        if not isinstance(function_file, str):
            raise ConfigError("function_file", "expected a path string")
        path = Path(function_file)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        if not path.is_file():
            raise ConfigError("function_file", f"file not found: {path}")

    pk = raw.get("packing", {})
    if not isinstance(pk, dict):
        raise ConfigError("packing", "expected an object")
    extra = set(pk) - {"m", "tol", "angles", "shifts"}
    if extra:
        raise ConfigError(f"packing.{sorted(extra)[0]}", "unknown field")
    packing = PackingParams(
        m=_num(pk, "m", "packing.m", int, default=64),
        tol=_num(pk, "tol", "packing.tol", default=1e-8),
        angles=_num(pk, "angles", "packing.angles", int, default=16),
        shifts=_num(pk, "shifts", "packing.shifts", int, default=4),
    )
    eps = _num(raw, "eps", "eps")
    if command == "kappa" and eps is None:
        raise ConfigError("eps", "required for command kappa")
    schedule = _parse_schedule(raw.get("schedule", dict(DEFAULT_SCHEDULE)))
    fam = raw.get("family", {"kind": "constant"})
    if not isinstance(fam, dict) or fam.get("kind", "constant") not in FAMILY_KINDS:
        raise ConfigError("family.kind", f"expected one of {', '.join(FAMILY_KINDS)}")
    extra = set(fam) - {"kind", "indices"}
    if extra:
        raise ConfigError(f"family.{sorted(extra)[0]}", "unknown field")
    family = {"kind": fam.get("kind", "constant")}
    if "indices" in fam:
        idx = fam["indices"]
        if not isinstance(idx, list) or not idx or any(isinstance(i, bool) or not isinstance(i, int) or i < 1 for i in idx):
            raise ConfigError("family.indices", "expected a nonempty list of positive integers")
        if any(q <= p for p, q in zip(idx[:-1], idx[1:])):
            raise ConfigError("family.indices", "must be strictly increasing")
        family["indices"] = list(idx)
    p_raw = raw.get("p", 1.0)
    if p_raw in ("inf", "infinity"):
        p = math.inf
    else:
        p = _num(raw, "p", "p", default=1.0)
        if not p >= 1:
            raise ConfigError("p", "topology exponent must be >= 1 or 'inf'")
    if family["kind"] == "smooth" and math.isinf(p):
        raise ConfigError("p", "smooth recovery families need p < inf")
    t_samples = _num(raw, "t_samples", "t_samples", int, default=1000)
    if t_samples < 16:
        raise ConfigError("t_samples", "need at least 16 level samples")
    out = raw.get("output", {})
    if not isinstance(out, dict) or set(out) - set(DEFAULT_OUTPUT):
        raise ConfigError("output", f"expected an object with keys among {sorted(DEFAULT_OUTPUT)}")
    output = {**DEFAULT_OUTPUT, **{k: str(v) for k, v in out.items()}}
    threads = _num(raw, "threads", "threads", int) if "threads" in raw else None
    cfg = ExperimentConfig(command, function, function_file, eps, packing, schedule, family, p, t_samples, output, threads, None if base_dir is None else str(base_dir))
    if command != "verify":
        try:
            f = cfg.model()
        except bvfun.ModelError as exc:
            raise ConfigError("function", str(exc)) from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("function", f"malformed function spec: {exc}") from exc
        if family["kind"] == "sbv" and not isinstance(f, bvfun.Analytic):
            raise ConfigError("family.kind", "sbv recovery needs an analytic function spec")
        if eps is not None and not eps < min(f.domain.sides):
            raise ConfigError("eps", f"must be smaller than the domain side {min(f.domain.sides)}")
    return cfg


# -------------------------------------------------------------------------


def emit_report(report: SweepReport, path, json_path=None) -> None:
    """Write the CSV table at ``path`` and the JSON summary at ``json_path``
    (default: next to the CSV with a ``.json`` suffix)."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(report.csv_text())
    with open(path.with_suffix(".json") if json_path is None else Path(json_path), "w") as fh:
        fh.write(report.json_text())


def _threads(cfg, override):
    if override is not None:
        return override
    if cfg.threads is not None:
        return cfg.threads
    env = os.environ.get("BMOTV_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError("BMOTV_THREADS", f"expected an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("BMOTV_THREADS", "must be positive")
        return n
    return 1


def run(cfg: ExperimentConfig, out_dir=None, threads=None, echo=print) -> int:
    """Execute one command; returns the process exit code."""
    if cfg.command == "verify":
        from bmotv.acceptance import run_all

        results = run_all(echo)
        failed = [r.number for r in results if not r.passed]
        echo(f"verify: {len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
        return EXIT_ACCEPTANCE if failed else EXIT_OK

    n_threads = _threads(cfg, threads)
    params = PackingParams(cfg.packing.m, cfg.packing.tol, cfg.packing.angles, cfg.packing.shifts, n_threads)
    f = cfg.model()
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)

    if cfg.command == "tv":
        echo(str(bvfun.tv_decomposition(f)))
        if f.dimension == 1:
            echo(f"coarea_total={bvfun.coarea_tv(f, cfg.t_samples):g} (t_samples={cfg.t_samples})")
        return EXIT_OK

    if cfg.command == "kappa":
        est = kappa(f, cfg.eps, params)
        echo(
            f"kappa={est.value:.12g} eps={est.eps:g} family_size={est.size} candidates={est.n_candidates} "
            f"strategy={est.strategy} tol={est.tol:g} error_bound={est.error_bound:.3g}"
        )
        if out is not None:
            est.family.dump(out / cfg.output["family"])
        return EXIT_OK

    schedule = build_schedule(cfg.schedule, f.domain)
    if cfg.command == "sweep":
        report = sweep(f, schedule, params)
        plan = None
    else:
        kind = cfg.family["kind"]
        plan = None
        if kind == "constant":
            fam = Family.constant(f, cfg.p)
        elif kind == "smooth":
            fam, plan = smooth_recovery_family(f, cfg.p, indices=cfg.family.get("indices"), params=params)
        else:
            fam, plan = sbv_recovery_family(f, indices=cfg.family.get("indices"), params=params)
        report = gamma_experiment(fam, schedule, params)
    target = (out if out is not None else Path(".")) / cfg.output["csv"]
    emit_report(report, target, target.parent / cfg.output["json"])
    if plan is not None:
        plan.dump(target.parent / cfg.output["plan"])
    s = report.summary()
    echo(
        f"{cfg.command}: {s['rows']} rows, kappa in [{s['min']:.6g}, {s['max']:.6g}], last {s['last']:.6g}, "
        f"liminf/limsup proxies {s['liminf_proxy']:.6g}/{s['limsup_proxy']:.6g} -> {target}"
    )
    return EXIT_OK


SAMPLE_CONFIGS = (
    '{"command": "tv", "function": {"domain": [0, 1], "pieces": [{"interval": [0, 1], "coeffs": [0, 1]}]}}',
    '{"command": "kappa", "eps": 0.1, "function": {"domain": [0, 1], "jumps": [{"x": 0.5, "left": 0, "right": 1}]}, "packing": {"m": 32}}',
    '{"command": "sweep", "function": {"domain": [0, 1], "cantor": [{"interval": [0, 1], "rise": 1}]},'
    ' "schedule": {"kind": "logperiodic", "base": 0.3333, "k": [4, 8], "taus": [1, 0.8, 0.6, 0.45, 0.37]}}',
    '{"command": "gamma", "function": {"domain": [0, 1], "jumps": [{"x": 0.5, "left": 0, "right": 1}]},'
    ' "family": {"kind": "smooth", "indices": [100, 200]}, "p": 1, "schedule": {"kind": "explicit", "values": [0.01, 0.005]}}',
    '{"command": "gamma", "function": {"domain": [0, 1], "cantor": [{"interval": [0, 1], "rise": 1}]}, "family": {"kind": "sbv"}, "p": "inf"}',
    '{"command": "verify"}',
)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="bmotv", description="Mean-oscillation functional experiments on BV functions.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON experiment config (optional for verify)")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--threads", type=int, help="worker threads (default: BMOTV_THREADS or 1)")
    args = ap.parse_args(argv)
    try:
        if args.config is None:
            if args.command != "verify":
                raise ConfigError("--config", "required for command " + args.command)
            cfg = ExperimentConfig("verify")
        else:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                print(f"bmotv: cannot read config: {exc}", file=sys.stderr)
                return EXIT_IO
            cfg = parse_config(text, base_dir=Path(args.config).resolve().parent)
            if cfg.command != args.command:
                cfg = parse_config(json.dumps({**json.loads(text), "command": args.command}), base_dir=Path(args.config).resolve().parent)
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads", "must be positive")
        return run(cfg, args.out, args.threads)
    except ConfigError as exc:
        print(f"bmotv: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"bmotv: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
