"""Command line entry points: scripted runs, campaigns, and the live service.

    agvsim run <script.json> [--seed N] [--out DIR]
    agvsim campaign <dir> [--reps N] [--out DIR]
    agvsim serve [--addr HOST:PORT] [--config FILE]

``run`` and ``campaign`` write the event log(s), a transition log, and the
response-time exports into the output directory.  Exit status 2 flags
validation problems (malformed script, empty campaign directory).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import SimConfig, load_config
from .metrics import export, scan_overrides, summarize
from .scenario import ScenarioScript, ScriptError, run_scenario

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2


def _write_outputs(log, out_dir: Path, campaign: str):
    out_dir.mkdir(parents=True, exist_ok=True)
    log_path = out_dir / f"{campaign}.events.jsonl"
    log.write_jsonl(log_path)
    lines = [
        f"{r['t']},{r['frm']},{r['to']},{r['cause']}"
        for r in log.of_kind("transition")
    ]
    (out_dir / f"{campaign}.transitions.log").write_text(
        "".join(line + "\n" for line in lines), encoding="utf-8"
    )
    return log_path


def cmd_run(script_path: str, out_dir: str = "out", seed: int | None = None,
            config_path: str | None = None) -> int:
    path = Path(script_path)
    if not path.is_file():
        print(f"error: script not found: {path}", file=sys.stderr)
        return EXIT_VALIDATION
    script = ScenarioScript.from_json(path)
    base = load_config(config_path) if config_path else SimConfig()
    try:
        log = run_scenario(script, config=base, seed=seed)
    except ScriptError as err:
        print(f"error: invalid script {path.name}:", file=sys.stderr)
        for msg in err.errors:
            print(f"  {msg}", file=sys.stderr)
        return EXIT_VALIDATION
    out = Path(out_dir)
    _write_outputs(log, out, script.name)
    result = scan_overrides(log)
    summaries = summarize(result.samples)
    export(summaries, result.samples, out, campaign=script.name)
    print(f"{script.name}: {len(log)} log records, "
          f"{len(result.samples)} override samples "
          f"({result.excluded_activations} excluded)")
    _print_table(summaries)
    return EXIT_OK


def cmd_campaign(dir_path: str, reps: int = 1, out_dir: str = "out",
                 config_path: str | None = None) -> int:
    scripts = sorted(Path(dir_path).glob("*.json"))
    if not scripts:
        print(f"error: no scripts in {dir_path}", file=sys.stderr)
        return EXIT_VALIDATION
    base = load_config(config_path) if config_path else SimConfig()
    out = Path(out_dir)
    all_samples = []
    failures = 0
    for script_path in scripts:
        for rep in range(reps):
            try:
                script = ScenarioScript.from_json(script_path)
                log = run_scenario(script, config=base,
                                   seed=script.seed + rep)
            except (ScriptError, KeyError, ValueError) as err:
                print(f"error: {script_path.name} rep {rep}: {err}",
                      file=sys.stderr)
                failures += 1
                continue
            suffix = script.name if reps == 1 else f"{script.name}_rep{rep}"
            _write_outputs(log, out, suffix)
            all_samples.extend(scan_overrides(log).samples)
    summaries = summarize(all_samples)
    export(summaries, all_samples, out, campaign="combined")
    print(f"campaign: {len(scripts)} scripts x {reps} reps, "
          f"{len(all_samples)} samples, {failures} failures")
    _print_table(summaries)
    return EXIT_FAILURE if failures else EXIT_OK


def cmd_serve(addr: str = "127.0.0.1:8700", config_path: str | None = None) -> int:
    import asyncio

    from .service import LiveService

    host, _, port = addr.rpartition(":")
    cfg = load_config(config_path) if config_path else SimConfig()
    service = LiveService(cfg, host=host or "127.0.0.1", port=int(port))
    try:
        asyncio.run(service.run_forever())
    except KeyboardInterrupt:
        print("service stopped")
    return EXIT_OK


def _print_table(summaries) -> None:
    if not summaries:
        return
    header = f"{'channel':<10} {'session':<12} {'n':>5} {'min':>4} {'p50':>4} {'p95':>4} {'max':>4}"
    print(header)
    for s in summaries:
        print(f"{s.channel:<10} {s.session:<12} {s.n:>5} {s.min:>4} "
              f"{s.p50:>4} {s.p95:>4} {s.max:>4}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="agvsim",
        description="Industrial AGV manual-override simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario script")
    p_run.add_argument("script")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--config", default=None)

    p_camp = sub.add_parser("campaign", help="run every script in a directory")
    p_camp.add_argument("dir")
    p_camp.add_argument("--reps", type=int, default=1)
    p_camp.add_argument("--out", default="out")
    p_camp.add_argument("--config", default=None)

    p_serve = sub.add_parser("serve", help="live operator service")
    p_serve.add_argument("--addr", default="127.0.0.1:8700")
    p_serve.add_argument("--config", default=None)

    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args.script, out_dir=args.out, seed=args.seed,
                       config_path=args.config)
    if args.command == "campaign":
        return cmd_campaign(args.dir, reps=args.reps, out_dir=args.out,
                            config_path=args.config)
    return cmd_serve(addr=args.addr, config_path=args.config)


if __name__ == "__main__":
    sys.exit(main())
