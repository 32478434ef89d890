#!/usr/bin/env python3
"""Manual-override response-time campaign across three sessions.

Three sessions share the same override schedule but run different
high-level behaviors; responses stay bounded by the supervisor cycle and
identical across sessions, because only the low-level path matters.

Run:  python demos/03_override_latency_campaign.py [--per-channel N] [--plot]
"""

import argparse

from agvsim.campaigns import session_scripts
from agvsim.metrics import export, scan_overrides, summarize
from agvsim.scenario import run_scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--per-channel", type=int, default=10,
                    help="overrides per channel per session")
    ap.add_argument("--out", default="out/demo_campaign")
    ap.add_argument("--plot", action="store_true",
                    help="also write a distribution plot (needs matplotlib)")
    args = ap.parse_args()

    all_samples = []
    for script in session_scripts(args.per_channel):
        log = run_scenario(script)
        result = scan_overrides(log)
        all_samples.extend(result.samples)
        print(f"{script.name}: {len(result.samples)} overrides, "
              f"{result.excluded_activations} excluded")

    summaries = summarize(all_samples)
    print(f"\n{'channel':<10} {'session':<10} {'n':>4} {'min':>4} {'p25':>4} "
          f"{'p50':>4} {'p75':>4} {'p95':>4} {'max':>4}")
    for s in summaries:
        print(f"{s.channel:<10} {s.session:<10} {s.n:>4} {s.min:>4} {s.p25:>4} "
              f"{s.p50:>4} {s.p75:>4} {s.p95:>4} {s.max:>4}")

    paths = export(summaries, all_samples, args.out, campaign="demo")
    print(f"\nwrote {len(paths)} files under {args.out}/")

    responses = [s.response for s in all_samples]
    bound = 11  # cycle + debounce + one bus tick at defaults
    print(f"bound check: max {max(responses)} ms <= {bound} ms -> "
          f"{'OK' if max(responses) <= bound else 'VIOLATED'}")

    if args.plot:
        plot(all_samples, args.out)


def plot(samples, out_dir):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping plot")
        return
    channels = sorted({s.channel for s in samples})
    sessions = sorted({s.session for s in samples})
    fig, axes = plt.subplots(1, len(sessions), figsize=(4 * len(sessions), 3),
                             sharey=True)
    for ax, session in zip(axes, sessions):
        data = [[s.response for s in samples
                 if s.session == session and s.channel == ch]
                for ch in channels]
        ax.violinplot(data, showmedians=True)
        ax.set_xticks(range(1, len(channels) + 1), channels)
        ax.set_title(session)
        ax.set_ylabel("response [ms]")
    fig.tight_layout()
    path = f"{out_dir}/demo_responses.png"
    fig.savefig(path, dpi=120)
    print(f"plot written to {path}")


if __name__ == "__main__":
    main()
