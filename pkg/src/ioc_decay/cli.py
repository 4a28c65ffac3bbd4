"""Command-line entry point wiring the engine together.

Subcommands: ingest, score, estimate, simulate, aggregate, curve,
gen-synthetic, serve. Timestamps are accepted as ISO-8601 or raw UNIX
seconds and emitted as ISO-8601 UTC. Failures print a single JSON error
line to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

from . import decay, estimation, simulator, synthetic
from .model import DecayModel
from .profiles import ProfileStore
from .service import DATA_DIR_ENV, ApiConfig, run as run_service
from .sightings import SightingStore, ingest_attributes_file, ingest_sightings_file
from .taxonomy import load_bundled_taxonomies

_DURATION_UNITS = {"s": 1, "m": 60, "h": 3600, "d": 86_400, "w": 604_800}


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def parse_timestamp(text: str) -> int:
    """ISO-8601 (``Z`` or offset) or raw UNIX seconds, to UTC seconds."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        parsed = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        raise CliError("bad_timestamp", f"cannot parse timestamp {text!r}") from None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return int(parsed.timestamp())


def iso(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat()


def parse_duration(text: str) -> int:
    """Durations like ``1d``, ``6h``, ``30m``, ``90s`` or raw seconds."""
    match = re.fullmatch(r"(\d+)([smhdw]?)", text.strip())
    if not match:
        raise CliError("bad_duration", f"cannot parse duration {text!r}")
    return int(match.group(1)) * _DURATION_UNITS[match.group(2) or "s"]


def _load_config(path: str) -> dict[str, Any]:
    """Parse a minimal ``key = value`` config file into flag defaults."""
    defaults: dict[str, Any] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CliError("bad_config", f"expected key = value, got {raw!r}")
        key = key.strip().replace("-", "_")
        value = value.strip().strip("\"'")
        if value.lower() in ("true", "false"):
            defaults[key] = value.lower() == "true"
        else:
            try:
                defaults[key] = int(value)
            except ValueError:
                try:
                    defaults[key] = float(value)
                except ValueError:
                    defaults[key] = value
    return defaults


def _default_data_dir() -> str:
    return os.environ.get(DATA_DIR_ENV, "data")


def _open_store(args: argparse.Namespace) -> SightingStore:
    return SightingStore(args.data_dir)


def _profiles(args: argparse.Namespace) -> ProfileStore:
    return ProfileStore(Path(args.data_dir) / "profiles")


def _emit(payload: Any) -> None:
    print(json.dumps(payload, sort_keys=True))


def cmd_ingest(args: argparse.Namespace) -> int:
    org_confidence = None
    if args.org_confidence:
        org_confidence = json.loads(Path(args.org_confidence).read_text(encoding="utf-8"))
        if not isinstance(org_confidence, dict):
            raise CliError("bad_org_confidence", "expected a JSON object of org -> confidence")
    with _open_store(args) as store:
        out: dict[str, Any] = {}
        if args.attributes:
            out["attributes"] = ingest_attributes_file(
                store, args.attributes, org_confidence=org_confidence
            ).to_json_dict()
        if args.sightings:
            out["sightings"] = ingest_sightings_file(store, args.sightings).to_json_dict()
    if not out:
        raise CliError("nothing_to_ingest", "pass --attributes and/or --sightings")
    _emit(out)
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    with _open_store(args) as store:
        attr = store.get_attribute(args.attribute)
        if attr is None:
            raise CliError("unknown_attribute", f"no attribute {args.attribute!r}")
        profiles = _profiles(args)
        profile = profiles.get(args.profile) if args.profile else profiles.resolve(attr.attr_type)
        if profile is None:
            wanted = args.profile or attr.attr_type
            raise CliError("no_profile_for_type", f"no decay profile for {wanted!r}")
        as_of = parse_timestamp(args.at) if args.at else int(time.time())
        last = store.last_seen(attr.id, as_of)
        if last is None:
            last = attr.first_seen
        override = store.expiration_override(attr.id, as_of)
        evaluation = decay.evaluate(
            attr, profile, last, as_of,
            tau_override=override, registry=load_bundled_taxonomies(),
        )
    _emit(evaluation.to_json_dict())
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    with _open_store(args) as store:
        dist = estimation.build_distribution(store, args.attr_type, args.cutoff_hours)
        result = estimation.fit(dist, tau_quantile=args.tau_q, half_quantile=args.half_q)
    out_dir = Path(args.out_dir or args.data_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    hist_path = out_dir / "endtime_histogram.csv"
    cdf_path = out_dir / "endtime_cdf.csv"
    with open(hist_path, "w", encoding="utf-8") as fh:
        fh.write("hours,count\n")
        for hours, count in dist.histogram:
            fh.write(f"{hours},{count}\n")
    with open(cdf_path, "w", encoding="utf-8") as fh:
        fh.write("hours,fraction\n")
        for hours, fraction in dist.cdf:
            fh.write(f"{hours},{fraction}\n")
    report = estimation.fit_report(dist, result)
    report["histogram_csv"] = str(hist_path)
    report["cdf_csv"] = str(cdf_path)
    _emit(report)
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    with _open_store(args) as store:
        profile = _profiles(args).get(args.profile)
        if profile is None:
            raise CliError("no_profile_for_type", f"no decay profile for {args.profile!r}")
        cfg = simulator.SimulationConfig(
            start=parse_timestamp(getattr(args, "from")),
            end=parse_timestamp(args.to),
            profile=profile,
            tick_hours=args.tick_hours,
            removal_threshold=args.threshold,
        )
        attrs = store.attributes(None if profile.attr_type == "*" else profile.attr_type)
        result = simulator.simulate(store, attrs, cfg)
    series_path = Path(args.series_out or Path(args.data_dir) / "simulation_series.csv")
    series_path.parent.mkdir(parents=True, exist_ok=True)
    series_path.write_text(simulator.export_series(result), encoding="utf-8")
    out = result.to_json_dict()
    out["series_csv"] = str(series_path)
    _emit(out)
    return 0


def cmd_aggregate(args: argparse.Namespace) -> int:
    with _open_store(args) as store:
        buckets = store.aggregate(
            parse_timestamp(getattr(args, "from")),
            parse_timestamp(args.to),
            parse_duration(args.bucket),
        )
    sys.stdout.write("bucket_start_iso8601,seen_count,false_positive_count,expiration_count\n")
    for bucket in buckets:
        sys.stdout.write(
            f"{iso(bucket.bucket_start)},{bucket.seen_count},"
            f"{bucket.false_positive_count},{bucket.expiration_count}\n"
        )
    return 0


def cmd_curve(args: argparse.Namespace) -> int:
    try:
        model = DecayModel(args.model)
    except ValueError:
        raise CliError("bad_model", f"unknown decay model {args.model!r}") from None
    samples = decay.sample_curve(model, args.base, args.tau, args.delta, args.points)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("t_hours,score\n")
        for t, score in samples:
            fh.write(f"{t},{score}\n")
    _emit({"points": len(samples), "out": str(out_path)})
    return 0


def cmd_gen_synthetic(args: argparse.Namespace) -> int:
    cfg = synthetic.SyntheticConfig(
        seed=args.seed,
        n_attributes=args.attributes,
        attr_type=args.attr_type,
        median_end_time_hours=args.median_hours,
        q90_end_time_hours=args.q90_hours,
        single_sighting_fraction=args.single_fraction,
    )
    attrs, sights = synthetic.generate(cfg)
    attr_path, sight_path = synthetic.write_dataset(attrs, sights, args.out_dir)
    _emit(
        {
            "attributes": len(attrs),
            "sightings": len(sights),
            "attributes_file": str(attr_path),
            "sightings_file": str(sight_path),
        }
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    run_service(ApiConfig(bind_address=args.bind, data_dir=args.data_dir))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ioc-decay", description=__doc__)
    parser.add_argument("--config", help="key = value file supplying flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Any, **kwargs: Any) -> argparse.ArgumentParser:
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        p.add_argument("--data-dir", default=_default_data_dir(), help="engine data directory")
        return p

    p = add("ingest", cmd_ingest, help="load attribute and sighting files into the store")
    p.add_argument("--attributes", help="attributes JSONL file")
    p.add_argument("--sightings", help="sightings JSONL or CSV file")
    p.add_argument(
        "--org-confidence",
        help="JSON file mapping source org to confidence, applied to incoming attributes",
    )

    p = add("score", cmd_score, help="evaluate one attribute's decayed score")
    p.add_argument("--attribute", required=True, help="attribute id")
    p.add_argument("--at", help="evaluation time (ISO-8601 or UNIX seconds; default now)")
    p.add_argument("--profile", help="use this attr_type's stored profile instead")

    p = add("estimate", cmd_estimate, help="fit tau and delta from stored sightings")
    p.add_argument("--attr-type", required=True)
    p.add_argument("--cutoff-hours", type=float, default=168.0)
    p.add_argument("--tau-q", type=float, default=0.90)
    p.add_argument("--half-q", type=float, default=0.50)
    p.add_argument("--out-dir", help="where to drop histogram/CDF CSV files (default data dir)")

    p = add("simulate", cmd_simulate, help="replay an IDS rule table over a period")
    p.add_argument("--from", required=True, help="window start (ISO-8601 or UNIX seconds)")
    p.add_argument("--to", required=True, help="window end")
    p.add_argument("--profile", required=True, help="attr_type whose stored profile drives decay")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--tick-hours", type=float, default=1.0)
    p.add_argument("--series-out", help="tick series CSV path")

    p = add("aggregate", cmd_aggregate, help="bucketed sighting counts as CSV")
    p.add_argument("--from", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--bucket", default="1d", help="bucket width such as 1d, 6h, 900s")

    p = add("curve", cmd_curve, help="sample a decay curve to CSV")
    p.add_argument("--base", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--model", required=True, choices=[m.value for m in DecayModel])
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", required=True, help="output CSV path")

    p = add("gen-synthetic", cmd_gen_synthetic, help="write a seeded synthetic dataset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--attributes", type=int, default=1000)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--attr-type", default="url")
    p.add_argument("--median-hours", type=float, default=72.0)
    p.add_argument("--q90-hours", type=float, default=120.0)
    p.add_argument("--single-fraction", type=float, default=0.02)

    p = add("serve", cmd_serve, help="run the HTTP API until interrupted")
    p.add_argument("--bind", default="127.0.0.1:8787")

    return parser


def _apply_config_defaults(parser: argparse.ArgumentParser, defaults: dict[str, Any]) -> None:
    """Push config values into every subparser; they also satisfy required flags."""
    parser.set_defaults(**defaults)
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub in action.choices.values():
                sub.set_defaults(**defaults)
                for sub_action in sub._actions:
                    if sub_action.dest in defaults:
                        sub_action.required = False
        elif action.dest in defaults:
            action.required = False


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # Apply --config before the real parse so file values become defaults.
    if "--config" in argv:
        idx = argv.index("--config")
        try:
            config_path = argv[idx + 1]
        except IndexError:
            parser.error("--config needs a path")
        try:
            _apply_config_defaults(parser, _load_config(config_path))
        except (OSError, CliError) as exc:
            print(json.dumps({"error": {"code": "bad_config", "message": str(exc)}}), file=sys.stderr)
            return 2
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(json.dumps({"error": {"code": exc.code, "message": str(exc)}}), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        code = getattr(exc, "code", exc.__class__.__name__.lower())
        print(json.dumps({"error": {"code": code, "message": str(exc)}}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
