"""Command-line driver: ``construct``, ``verify`` and ``search``.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 staged search failure.
"""
import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import construction as con
from .chaincond import conditional_extract
from .cube import Coordinate, PreconditionError
from .instances import extraction_instance, random_clopen, souslin_instance
from .rng import SplitMix64
from .souslin import SouslinInstance, eval_pair, find_pair_bruteforce, find_pair_pipeline

OK, FAILED, INVALID, STAGED = 0, 1, 2, 3

DEFAULTS = {"generators": 4, "horizon": 64, "family": 40, "delta": "3/10",
            "epsilon": "1/4", "seed": 0, "format": "json", "out": None,
            "samples": 200, "mode": "souslin", "tail": "truncated"}
INTS = ("generators", "horizon", "family", "seed", "samples")
RATIONALS = ("delta", "epsilon")


class ConfigError(ValueError):
    pass


def read_config(path):
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: expected a known key = value")
        out[key] = value.strip()
    return out


def resolve(args):
    """Merge defaults, config file and flags (flags win) and parse exactly."""
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    try:
        for key in INTS:
            cfg[key] = int(cfg[key])
        for key in RATIONALS:
            cfg[key] = Fraction(str(cfg[key]))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad numeric value: {exc}") from exc
    if cfg["generators"] < 1:
        raise ConfigError("generators must be at least 1")
    if cfg["horizon"] < 1:
        raise ConfigError("horizon must be at least 1")
    if cfg["family"] < 2:
        raise ConfigError("family must have at least 2 members")
    if not 0 < cfg["epsilon"] < 1:
        raise ConfigError("epsilon must lie strictly between 0 and 1")
    if not 0 < cfg["delta"] < 1:
        raise ConfigError("delta must lie strictly between 0 and 1")
    if not 0 <= cfg["seed"] < 2 ** 64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    if cfg["format"] not in ("json", "csv", "text"):
        raise ConfigError(f"unknown format {cfg['format']!r}")
    return cfg


# --- output -------------------------------------------------------------------

def render(records, fmt, header=None):
    if fmt == "json":
        return json.dumps({**(header or {}), "records": records}, indent=1, sort_keys=True) + "\n"
    if fmt == "csv":
        keys = []
        for r in records:
            keys.extend(k for k in r if k not in keys)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow({k: _flat(v) for k, v in r.items()})
        return buf.getvalue()
    lines = [f"# {k}: {v}" for k, v in (header or {}).items()]
    for r in records:
        lines.append(" ".join(f"{k}={_flat(v)}" for k, v in r.items()))
    return "\n".join(lines) + "\n"


def _flat(v):
    return json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else str(v)


def emit(text, out):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --- commands -----------------------------------------------------------------

def cmd_construct(cfg):
    A, M = cfg["generators"], cfg["horizon"]
    out = Path(cfg["out"] or "artifacts")
    out.mkdir(parents=True, exist_ok=True)
    tower = con.build_tower(A, M)
    base, extended = {}, {}
    for alpha in range(A):
        c, d = con.base_names(alpha, M)
        base[str(alpha)] = {"c": c.to_lines(), "d": d.to_lines()}
        a, b = con.extended_names(tower, alpha)
        extended[str(alpha)] = {"a": a.to_lines(), "b": b.to_lines()}
    files = {"tower.json": con.tower_to_json(tower), "base_names.json": base,
             "extended_names.json": extended}
    for name, data in files.items():
        (out / name).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")
    print(f"wrote {', '.join(sorted(files))} to {out}", file=sys.stderr)
    return OK


def _samples(rng, A, M, count, distinct):
    out = []
    for _ in range(count):
        alpha = rng.below(A)
        beta = rng.below(A)
        if distinct:
            if A < 2:
                break
            while beta == alpha:
                beta = rng.below(A)
        out.append((alpha, beta, rng.below(M)))
    return out


def _cube_checks(rng, report, count=20):
    coords = [Coordinate(0, o) for o in range(6)]
    for i in range(count):
        x = random_clopen(rng, coords)
        y = random_clopen(rng, [Coordinate(1, o) for o in range(4)])
        report.add("cube:complement", x.measure() + (~x).measure() == 1, sample=i)
        report.add("cube:independence", (x & y).measure() == x.measure() * y.measure(),
                   sample=i)


def cmd_verify(cfg, artifacts=None):
    A, M = cfg["generators"], cfg["horizon"]
    rng = SplitMix64(cfg["seed"])
    if artifacts:
        try:
            tower = con.tower_from_json(json.loads((Path(artifacts) / "tower.json").read_text()))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot load tower from {artifacts}: {exc}") from exc
        A, M = tower.generators, tower.horizon
    else:
        tower = con.build_tower(A, M)
    report = con.Report()
    report.extend(con.verify_blocks(M))
    report.extend(con.verify_base_measures(A, M))
    if A > 1:
        report.extend(con.verify_cross_terms(_samples(rng, A, M, 100, True)))
    report.extend(con.verify_tower(tower))
    report.extend(con.verify_extended(tower, _samples(rng, A, M, cfg["samples"], False)))
    _cube_checks(rng, report)
    header = {"command": "verify", "generators": A, "horizon": M,
              "passed": report.passed, "failed_tags": sorted({c.tag for c in report.failures()})}
    emit(render(report.records(), cfg["format"], header), cfg["out"])
    for c in report.failures()[:20]:
        print(f"FAIL {c.tag}: {c.record()}", file=sys.stderr)
    return OK if report.passed else FAILED


def cmd_search(cfg, instance_path=None, save_instance=None):
    if cfg["mode"] == "extract":
        pairs = extraction_instance(cfg["seed"], cfg["family"], cfg["delta"])
        result = conditional_extract(pairs, cfg["delta"], 2)
        record = {"members": list(result.members), "success": result.success,
                  "method": result.method, "failed_stage": result.failed_stage,
                  "stages": result.transcript.get("stages", [])}
        emit(render([record], cfg["format"], {"command": "search", "mode": "extract",
                                              "seed": cfg["seed"]}), cfg["out"])
        return OK if result.success else STAGED
    if instance_path:
        try:
            text = Path(instance_path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read instance: {exc}") from exc
        instance = SouslinInstance.from_json(text)
    else:
        instance = souslin_instance(cfg["seed"], cfg["family"], cfg["generators"],
                                    cfg["horizon"])
    if save_instance:
        Path(save_instance).write_text(instance.to_json())
    result = find_pair_pipeline(instance, cfg["epsilon"], tail=cfg["tail"])
    oracle = find_pair_bruteforce(instance)
    record = result.to_dict()
    record["bruteforce"] = list(oracle) if oracle else None
    if result.success:
        c = result.certificate
        record["confirmed"] = eval_pair(instance, c.xi, c.eta).compatible and c.verify(instance)
    header = {"command": "search", "mode": "souslin", "seed": cfg["seed"],
              "epsilon": str(cfg["epsilon"]), "tail": cfg["tail"]}
    emit(render([record], cfg["format"], header), cfg["out"])
    if not result.success:
        print(f"staged failure at {result.failed_stage}: {result.reason}", file=sys.stderr)
        return STAGED
    if not record["confirmed"]:
        print("certificate failed re-verification", file=sys.stderr)
        return FAILED
    return OK


def build_parser():
    parser = argparse.ArgumentParser(prog="cantorgap", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file mirroring the flags")
    common.add_argument("--generators", type=str, help="number of generators A")
    common.add_argument("--horizon", type=str, help="horizon M")
    common.add_argument("--family", type=str, help="family size N")
    common.add_argument("--delta", help="rational delta, e.g. 3/10")
    common.add_argument("--epsilon", help="rational epsilon, e.g. 1/4")
    common.add_argument("--seed", type=str, help="64-bit seed")
    common.add_argument("--format", choices=["json", "csv", "text"])
    common.add_argument("--out", help="output file (directory for construct)")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("construct", parents=[common], help="write tower and name tables")
    v = sub.add_parser("verify", parents=[common], help="run the exact verifiers")
    v.add_argument("--artifacts", help="directory written by construct")
    v.add_argument("--samples", type=str, help="number of (alpha, beta, n) samples")
    s = sub.add_parser("search", parents=[common], help="find a mergeable pair")
    s.add_argument("--instance", help="instance file (JSON)")
    s.add_argument("--save-instance", help="write the generated instance here")
    s.add_argument("--mode", choices=["souslin", "extract"])
    s.add_argument("--tail", choices=["truncated", "majorant"])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        if args.command == "construct":
            return cmd_construct(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.artifacts)
        return cmd_search(cfg, args.instance, args.save_instance)
    except (ConfigError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
