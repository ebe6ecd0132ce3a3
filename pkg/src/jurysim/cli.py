"""Command-line front end: accuracy queries, sweeps, partitions, thresholds.

Subcommands
-----------
accuracy    one-shot accuracy of a weighted majority rule
sweep       judge-competence sweep (fixed panel or drawn experts) -> CSV
partition   judges-vs-experts partition experiment -> CSV
threshold   smallest judge competence reproducing the optimal rule

File-producing commands write a CSV plus a JSON run manifest alongside it
(``<output stem>.manifest.json``).  Re-running with ``--manifest FILE``
rebuilds the configuration from the manifest and reproduces the CSV
byte-for-byte (timestamps live only in the manifest, outside the hashed
region).  Flat ``key = value`` config files are accepted via ``--config``;
explicit flags override file values, and the ``JURYSIM_SEED`` environment
variable is the seed fallback.

Exit codes: 0 success, 2 config error, 3 domain error, 4 capability
error (enumeration cap).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .core import exact_accuracy, mc_accuracy
from .errors import ConfigError, DomainError, EnumerationCapError, JurysimError
from .experiments import (
    PartitionConfig,
    ResultTable,
    SweepConfig,
    default_judge_counts,
    distribution_sweep,
    fixed_expert_sweep,
    partition_experiment,
)
from .sampling import SeedSpec, parse_distribution
from .weighting import (
    WeightingMode,
    find_optimality_threshold,
    judge_weights,
    optimal_weights,
)

SEED_ENV_VAR = "JURYSIM_SEED"


def _fmt(x: float) -> str:
    """Shortest round-trip decimal form (lossless to parse back)."""
    return repr(float(x))


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}: {exc}") from exc


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}: {exc}") from exc


def _parse_grid(text: str) -> tuple[float, ...]:
    """Parse "lo:hi:step" into an inclusive, strictly increasing grid."""
    import numpy as np

    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from exc
    if not (step > 0 and hi > lo):
        raise ConfigError(f"grid needs hi > lo and step > 0: {text!r}")
    n = int(round((hi - lo) / step))
    return tuple(float(x) for x in np.linspace(lo, hi, n + 1))


def _parse_mode(text: str) -> WeightingMode:
    try:
        return WeightingMode(text)
    except ValueError as exc:
        raise ConfigError(
            f"mode must be 'signed' or 'nonnegative', got {text!r}"
        ) from exc


def _to_int(value, what: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {what} {value!r}: {exc}") from exc


def _to_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    if value is None:
        return False
    text = str(value).strip().lower()
    if text in ("true", "1", "yes", "on"):
        return True
    if text in ("false", "0", "no", "off", ""):
        return False
    raise ConfigError(f"bad boolean {value!r}")


def _threads(args) -> int | None:
    if getattr(args, "threads", None) is not None:
        return args.threads
    return os.cpu_count()


def read_kv_file(path: str) -> dict[str, str]:
    """Parse a flat ``key = value`` config file ('#' starts a comment)."""
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(
                        f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}"
                    )
                key, value = line.split("=", 1)
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


def _resolve(args: argparse.Namespace, key: str, file_cfg: dict[str, str], default=None):
    """Flag value if given, else config-file value, else default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in file_cfg:
        return file_cfg[key]
    return default


def _resolve_seed(args, file_cfg) -> int:
    raw = _resolve(args, "seed", file_cfg)
    if raw is None:
        raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"bad seed {raw!r}: {exc}") from exc


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_csv(table: ResultTable, path: str) -> None:
    lines = [f"{table.x_label},accuracy_mean,accuracy_stderr,iterations"]
    for xv, mv, sv, iv in zip(table.x, table.mean, table.stderr, table.iterations):
        xcol = _fmt(xv) if table.x_label == "p_j" else str(int(xv))
        lines.append(f"{xcol},{_fmt(mv)},{_fmt(sv)},{iv}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _manifest_path(out_path: str) -> str:
    stem, _ = os.path.splitext(out_path)
    return stem + ".manifest.json"


def _write_manifest(command: str, config: dict, out_path: str, started: str) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "config": config,
        "outputs": [os.path.basename(out_path)],
        "sha256": {os.path.basename(out_path): _sha256(out_path)},
        "started_at": started,
        "finished_at": datetime.now(timezone.utc).isoformat(),
    }
    with open(_manifest_path(out_path), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_manifest(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    for field in ("command", "config", "outputs", "sha256"):
        if field not in manifest:
            raise ConfigError(f"manifest {path} lacks field {field!r}")
    return manifest


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


# ---------------------------------------------------------------- accuracy


def _cmd_accuracy(args) -> int:
    file_cfg = read_kv_file(args.config) if args.config else {}
    experts_text = _resolve(args, "experts", file_cfg)
    if experts_text is None:
        raise ConfigError("accuracy requires --experts")
    experts = _parse_floats(str(experts_text))

    sources = [
        args.weights is not None,
        bool(args.log_odds),
        bool(args.equal),
        args.judge is not None,
    ]
    if sum(sources) != 1:
        raise ConfigError(
            "choose exactly one of --weights, --log-odds, --equal, --judge"
        )
    if args.weights is not None:
        weights = _parse_floats(args.weights)
    elif args.log_odds:
        weights = optimal_weights(experts)
    elif args.equal:
        weights = [1.0] * len(experts)
    else:
        try:
            p_j = float(args.judge)
        except ValueError as exc:
            raise ConfigError(f"bad judge competence {args.judge!r}") from exc
        weights = judge_weights(p_j, experts, _parse_mode(args.mode))

    if args.mc is not None:
        seed = _resolve_seed(args, file_cfg)
        est = mc_accuracy(experts, weights, int(args.mc), seed)
        print(f"mean={_fmt(est.mean)} stderr={_fmt(est.std_error)} iterations={est.iterations}")
    else:
        est = exact_accuracy(experts, weights)
        print(f"mean={_fmt(est.mean)}")
    return 0


# ------------------------------------------------------------------- sweep


def _sweep_config_from(args, file_cfg) -> dict:
    """Resolve the full sweep configuration into its flat echo form."""
    cfg: dict = {}
    experts = _resolve(args, "experts", file_cfg)
    dist = _resolve(args, "dist", file_cfg)
    if (experts is None) == (dist is None):
        raise ConfigError("sweep requires exactly one of --experts or --dist")
    cfg["grid"] = str(_resolve(args, "grid", file_cfg, "0:1:0.01"))
    cfg["mode"] = str(_resolve(args, "mode", file_cfg, "signed"))
    if experts is not None:
        cfg["experts"] = str(experts)
    else:
        cfg["dist"] = str(dist)
        m = _resolve(args, "m", file_cfg)
        if m is None:
            raise ConfigError("sweep over a distribution requires --m")
        cfg["m"] = _to_int(m, "expert count")
        cfg["iters"] = _to_int(_resolve(args, "iters", file_cfg, 100_000), "iterations")
        cfg["seed"] = _resolve_seed(args, file_cfg)
        cfg["mirror_exp"] = _to_bool(_resolve(args, "mirror_exp", file_cfg, False))
    return cfg


def _run_sweep_config(cfg: dict, threads: int | None) -> ResultTable:
    grid = _parse_grid(cfg["grid"])
    mode = _parse_mode(cfg["mode"])
    if "experts" in cfg:
        return fixed_expert_sweep(_parse_floats(cfg["experts"]), grid, mode)
    dist = parse_distribution(cfg["dist"], mirror_exp=bool(cfg.get("mirror_exp")))
    config = SweepConfig(
        judge_grid=grid,
        expert_count=int(cfg["m"]),
        distribution=dist,
        iterations=int(cfg["iters"]),
        seed=SeedSpec(int(cfg["seed"])),
        mode=mode,
    )
    return distribution_sweep(config, threads=threads)


def _cmd_sweep(args) -> int:
    started = _now()
    threads = _threads(args)
    if args.manifest:
        manifest = _load_manifest(args.manifest)
        if manifest["command"] != "sweep":
            raise ConfigError(f"manifest is for {manifest['command']!r}, not sweep")
        cfg = manifest["config"]
        out = args.out or os.path.join(
            os.path.dirname(os.path.abspath(args.manifest)), manifest["outputs"][0]
        )
        table = _run_sweep_config(cfg, threads)
        _write_csv(table, out)
        recorded = manifest["sha256"][manifest["outputs"][0]]
        actual = _sha256(out)
        if recorded != actual:
            print(
                f"reproduction mismatch: recorded {recorded}, got {actual}",
                file=sys.stderr,
            )
            return 1
        _write_manifest("sweep", cfg, out, started)
        print(out)
        return 0

    file_cfg = read_kv_file(args.config) if args.config else {}
    cfg = _sweep_config_from(args, file_cfg)
    out = _resolve(args, "out", file_cfg)
    if out is None:
        raise ConfigError("sweep requires --out CSVPATH")
    table = _run_sweep_config(cfg, threads)
    _write_csv(table, str(out))
    _write_manifest("sweep", cfg, str(out), started)
    print(out)
    return 0


# --------------------------------------------------------------- partition


def _partition_config_from(args, file_cfg) -> dict:
    cfg: dict = {}
    n = _resolve(args, "n", file_cfg)
    dist = _resolve(args, "dist", file_cfg)
    if n is None or dist is None:
        raise ConfigError("partition requires --n and --dist")
    cfg["n"] = _to_int(n, "agent count")
    cfg["dist"] = str(dist)
    ks = _resolve(args, "k", file_cfg)
    cfg["k"] = str(ks) if ks is not None else ",".join(
        str(k) for k in default_judge_counts(cfg["n"])
    )
    cfg["iters"] = _to_int(_resolve(args, "iters", file_cfg, 100_000), "iterations")
    cfg["seed"] = _resolve_seed(args, file_cfg)
    cfg["mode"] = str(_resolve(args, "mode", file_cfg, "signed"))
    cfg["paired"] = not _to_bool(_resolve(args, "unpaired", file_cfg, False))
    cfg["mirror_exp"] = _to_bool(_resolve(args, "mirror_exp", file_cfg, False))
    return cfg


def _run_partition_config(cfg: dict, threads: int | None) -> ResultTable:
    dist = parse_distribution(cfg["dist"], mirror_exp=bool(cfg.get("mirror_exp")))
    config = PartitionConfig(
        total_agents=int(cfg["n"]),
        judge_counts=tuple(_parse_ints(cfg["k"])),
        distribution=dist,
        iterations=int(cfg["iters"]),
        seed=SeedSpec(int(cfg["seed"])),
        mode=_parse_mode(cfg["mode"]),
        paired=bool(cfg["paired"]),
    )
    return partition_experiment(config, threads=threads)


def _cmd_partition(args) -> int:
    started = _now()
    if args.manifest:
        manifest = _load_manifest(args.manifest)
        if manifest["command"] != "partition":
            raise ConfigError(f"manifest is for {manifest['command']!r}, not partition")
        cfg = manifest["config"]
        out = args.out or os.path.join(
            os.path.dirname(os.path.abspath(args.manifest)), manifest["outputs"][0]
        )
        table = _run_partition_config(cfg, _threads(args))
        _write_csv(table, out)
        recorded = manifest["sha256"][manifest["outputs"][0]]
        actual = _sha256(out)
        if recorded != actual:
            print(
                f"reproduction mismatch: recorded {recorded}, got {actual}",
                file=sys.stderr,
            )
            return 1
        _write_manifest("partition", cfg, out, started)
        print(out)
        return 0

    file_cfg = read_kv_file(args.config) if args.config else {}
    cfg = _partition_config_from(args, file_cfg)
    out = _resolve(args, "out", file_cfg)
    if out is None:
        raise ConfigError("partition requires --out CSVPATH")
    table = _run_partition_config(cfg, _threads(args))
    _write_csv(table, str(out))
    _write_manifest("partition", cfg, str(out), started)
    print(out)
    return 0


# --------------------------------------------------------------- threshold


def _cmd_threshold(args) -> int:
    file_cfg = read_kv_file(args.config) if args.config else {}
    experts_text = _resolve(args, "experts", file_cfg)
    if experts_text is None:
        raise ConfigError("threshold requires --experts")
    experts = _parse_floats(str(experts_text))
    try:
        step = float(args.grid_step)
    except ValueError as exc:
        raise ConfigError(f"bad grid step {args.grid_step!r}") from exc
    result = find_optimality_threshold(experts, grid_step=step)
    if result.threshold is None:
        print("threshold=none")
    else:
        flag = "" if result.monotone else " nonmonotone=true"
        print(f"threshold={_fmt(result.threshold)}{flag}")
    return 0


# -------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jurysim",
        description="Weighted majority rules with judge-perceived log-odds weighting",
    )
    parser.add_argument("--version", action="version", version=f"jurysim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_out=False):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--seed", help="master seed (fallback: $JURYSIM_SEED, then 0)")
        if with_out:
            p.add_argument("--out", help="output CSV path")
            p.add_argument(
                "--manifest",
                help="re-run a recorded manifest, reproducing its CSV byte-for-byte",
            )
            p.add_argument(
                "--threads",
                type=int,
                default=None,
                help="worker cap (default: all cores); never changes results",
            )

    p_acc = sub.add_parser("accuracy", help="accuracy of one weighted majority rule")
    common(p_acc)
    p_acc.add_argument("--experts", help="comma-separated competences")
    p_acc.add_argument("--weights", help="comma-separated weights")
    p_acc.add_argument("--log-odds", dest="log_odds", action="store_true",
                       help="use the optimal log-odds weights")
    p_acc.add_argument("--equal", action="store_true", help="use equal weights")
    p_acc.add_argument("--judge", help="competence of a single weighting judge")
    p_acc.add_argument("--mode", default="signed", help="signed | nonnegative")
    p_acc.add_argument("--mc", type=int, help="Monte-Carlo iterations (default: exact)")
    p_acc.set_defaults(func=_cmd_accuracy)

    p_sweep = sub.add_parser("sweep", help="judge-competence sweep to CSV")
    common(p_sweep, with_out=True)
    p_sweep.add_argument("--experts", help="fixed expert panel (comma-separated)")
    p_sweep.add_argument("--dist", help="uniform:lo:hi | truncnormal:mean:sigma:lo:hi | truncexp:b:lo:hi")
    p_sweep.add_argument("--m", help="number of experts drawn per iteration")
    p_sweep.add_argument("--iters", help="iterations per grid point (default 100000)")
    p_sweep.add_argument("--grid", help="judge grid lo:hi:step (default 0:1:0.01)")
    p_sweep.add_argument("--mode", help="signed | nonnegative (default signed)")
    p_sweep.add_argument("--mirror-exp", dest="mirror_exp", action="store_const",
                         const=True, help="flip the truncated exponential toward hi")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_part = sub.add_parser("partition", help="judges-vs-experts partition to CSV")
    common(p_part, with_out=True)
    p_part.add_argument("--n", help="total number of agents")
    p_part.add_argument("--dist", help="competence distribution spec")
    p_part.add_argument("--k", help="judge counts, e.g. 0,1,2,3")
    p_part.add_argument("--iters", help="iterations (default 100000)")
    p_part.add_argument("--mode", help="signed | nonnegative (default signed)")
    p_part.add_argument("--unpaired", action="store_const", const=True,
                        help="independent draws per judge count")
    p_part.add_argument("--mirror-exp", dest="mirror_exp", action="store_const",
                        const=True, help="flip the truncated exponential toward hi")
    p_part.set_defaults(func=_cmd_partition)

    p_thr = sub.add_parser("threshold", help="judge competence needed for the optimal rule")
    common(p_thr)
    p_thr.add_argument("--experts", help="comma-separated competences")
    p_thr.add_argument("--grid-step", dest="grid_step", default="0.001")
    p_thr.set_defaults(func=_cmd_threshold)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the config code
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except EnumerationCapError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return 4
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except JurysimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
