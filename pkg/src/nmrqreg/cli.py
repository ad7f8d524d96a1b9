"""Command-line driver: `nmrqreg run | list | verify`.

`run` executes the scenarios named in a config file, each into its own
directory under --out, and records a manifest that can itself be fed
back to `run`. Wall-clock times go to a timings.txt sidecar so that
everything else is byte-identical for a fixed (seed, version, config).
`verify` runs the thirteen reproduction checks and exits 0 only if all
of them pass.
"""

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .config import ConfigError, parse_config
from .scenarios import SCENARIOS, run_scenario, schemas
from .verify import run_checks

__all__ = ["main"]


def _render_param(value, unit):
    rendered = "%d" % value if isinstance(value, int) else repr(value)
    return rendered + (" " + unit if unit else "")


def _write_manifest(path, seed, requests):
    lines = ["# nmrqreg run manifest; re-runnable as a config file",
             "# tool version %s" % __version__,
             "seed = %d" % seed, ""]
    for req in requests:
        spec = SCENARIOS[req.name]
        lines.append("[%s]" % req.name)
        for key, pspec in spec.params.items():
            lines.append("%s = %s"
                         % (key, _render_param(req.params[key], pspec.unit)))
        lines.append("")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines))


def _cmd_run(args):
    try:
        text = args.config.read_text()
    except OSError as err:
        print("cannot read config: %s" % err, file=sys.stderr)
        return 2
    try:
        run_cfg = parse_config(text, schemas())
    except ConfigError as err:
        print("config error: %s" % err, file=sys.stderr)
        return 2
    seed = run_cfg.seed if args.seed is None else args.seed
    if not 0 <= seed < 2 ** 64:
        print("seed must fit in an unsigned 64-bit integer",
              file=sys.stderr)
        return 2
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    _write_manifest(out / "manifest.txt", seed, run_cfg.requests)

    def execute(request):
        t0 = time.perf_counter()
        run_scenario(request, seed, out / request.name)
        return time.perf_counter() - t0

    timings = []
    try:
        if args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                futures = [(req.name, pool.submit(execute, req))
                           for req in run_cfg.requests]
                timings = [(name, fut.result()) for name, fut in futures]
        else:
            timings = [(req.name, execute(req))
                       for req in run_cfg.requests]
    except Exception as err:
        print("scenario failed: %s" % err, file=sys.stderr)
        return 1
    with open(out / "timings.txt", "w", newline="\n") as fh:
        for name, elapsed in timings:
            fh.write("%-24s %10.6f s\n" % (name, elapsed))
        fh.write("%-24s %10.6f s\n"
                 % ("total", sum(t for _, t in timings)))
    for name, elapsed in timings:
        print("ran %-24s (%.3f s) -> %s" % (name, elapsed, out / name))
    return 0


def _cmd_list(_args):
    for name, spec in SCENARIOS.items():
        print("%-24s %s" % (name, spec.description))
        print("%-24s outputs: %s" % ("", ", ".join(spec.outputs)))
    return 0


def _cmd_verify(_args):
    results = run_checks()
    for r in results:
        print("criterion %02d %s [%7.3f s] %s: %s"
              % (r.number, "PASS" if r.passed else "FAIL", r.runtime_s,
                 r.name, r.detail))
    failed = [r.number for r in results if not r.passed]
    if failed:
        print("FAILED criteria: %s"
              % ", ".join("%02d" % n for n in failed))
        return 1
    print("all %d criteria pass" % len(results))
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="nmrqreg",
        description="ensemble solid-state NMR register design toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute scenarios from a config")
    run_p.add_argument("config", type=Path,
                       help="config file with scenario sections")
    run_p.add_argument("--out", type=Path, default=Path("runs"),
                       help="output directory (default: runs)")
    run_p.add_argument("--seed", type=int, default=None,
                       help="override the config seed (unsigned 64-bit)")
    run_p.add_argument("--jobs", type=int, default=1,
                       help="run up to N scenarios concurrently")
    run_p.set_defaults(handler=_cmd_run)

    list_p = sub.add_parser("list", help="list registered scenarios")
    list_p.set_defaults(handler=_cmd_list)

    verify_p = sub.add_parser(
        "verify", help="run the reproduction checks; exit 0 iff all pass")
    verify_p.set_defaults(handler=_cmd_verify)

    args = parser.parse_args(argv)
    if args.command == "run" and args.jobs < 1:
        parser.error("--jobs must be >= 1")
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
