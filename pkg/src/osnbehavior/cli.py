"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or model error.  Diagnostics go
to stderr; results go to the files named by flags, or to stdout as JSON.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

from . import __version__
from .binning import Pattern, bin_events, histogram_samples, time_of_day
from .errors import DomainError, OsnError
from .gmm import fit_gmm, gmm_density
from .loggrowth import fit_log_growth
from .predictor import HourInterval, expected_count, peak_times, predict_retweets, time_to_reach
from .records import (
    RetweetObservation,
    format_event_line,
    format_observation_line,
    load_events,
    load_observations,
    parse_timestamp,
)
from .render import render_growth_figure, render_histogram, render_user_figure
from .scheduler import POLICIES, allocate_polls, poll_times, simulate_policy
from .store import EPOCH, ModelStore, load_store, save_store
from .synth import SynthSpec, generate_synthetic_events, generate_synthetic_growth

ALL_USERS = "ALL"
EVENTS_FILE = "events.jsonl"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        return fh.readlines()


def _events_path(path: str) -> Path:
    p = Path(path)
    return p / EVENTS_FILE if p.is_dir() else p


def _existing_store(path) -> Optional[ModelStore]:
    p = Path(path)
    if not p.exists():
        return None
    try:
        return load_store(p)
    except OsnError as exc:
        raise OsnError(f"{p} exists but is not a model store: {exc}") from None


def _parse_month(text: str) -> tuple[int, int]:
    try:
        year, month = (int(v) for v in text.split("-"))
    except ValueError:
        raise UsageError(f"--month must look like YYYY-MM, got {text!r}") from None
    return year, month


def _plot(path: str, svg_render, raster_render) -> None:
    """SVG paths get the deterministic renderer; other suffixes go through matplotlib."""
    if Path(path).suffix.lower() == ".svg":
        _write_text(path, svg_render())
    else:
        raster_render(path)


# --- ingest -----------------------------------------------------------------

def cmd_ingest(args) -> int:
    incoming = load_events(_read_lines(args.input))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / EVENTS_FILE
    existing = load_events(_read_lines(target)) if target.exists() else []
    by_id = {e.message_id: e for e in existing}
    added = 0
    for event in incoming:
        if event.message_id not in by_id:
            by_id[event.message_id] = event
            added += 1
    merged = sorted(by_id.values(), key=lambda e: (e.timestamp, e.user_id, e.message_id))
    _write_text(target, "".join(format_event_line(e) + "\n" for e in merged))
    _emit({"read": len(incoming), "added": added, "total": len(merged), "path": str(target)})
    return 0


# --- analyze-user -------------------------------------------------------------

def _instant(flag: str, text: str):
    try:
        return parse_timestamp(text)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _select_events(args):
    events = load_events(_read_lines(_events_path(args.events)))
    if args.user != ALL_USERS:
        events = [e for e in events if e.user_id == args.user]
    if args.since:
        since = _instant("--since", args.since)
        events = [e for e in events if e.timestamp >= since]
    if args.until:
        until = _instant("--until", args.until)
        events = [e for e in events if e.timestamp < until]
    if not events:
        raise OsnError(f"no events found for user {args.user!r}")
    return events


def _daily_fit(events, args):
    hist = bin_events(events, Pattern.daily(), args.tz_offset)
    if args.from_histogram:
        samples = histogram_samples(hist)
    else:
        samples = [time_of_day(e.timestamp, args.tz_offset) for e in events]
    return hist, fit_gmm(samples)


def _write_counts(path, hist, fit=None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["bin_start", "bin_end", "count"] + (["expected"] if fit else [])
        writer.writerow(header)
        for lo, hi, count in zip(hist.edges, hist.edges[1:], hist.counts):
            row = [f"{lo:g}", f"{hi:g}", count]
            if fit is not None:
                row.append(repr(expected_count(fit, HourInterval(lo, hi))))
            writer.writerow(row)


def cmd_analyze_user(args) -> int:
    if args.pattern == "monthly" and not args.month:
        raise UsageError("--month YYYY-MM is required with --pattern monthly")
    if args.per_user and args.user != ALL_USERS:
        raise UsageError("--per-user only applies to --user ALL")
    events = _select_events(args)

    if args.pattern != "daily":
        pattern = (Pattern.monthly(*_parse_month(args.month)) if args.pattern == "monthly"
                   else Pattern.weekly())
        hist = bin_events(events, pattern, args.tz_offset)
        doc = {"user": args.user, **hist.to_dict()}
        _write_text(args.fit, json.dumps(doc, indent=2) + "\n")
        if args.counts:
            _write_counts(args.counts, hist)
        if args.plot:
            from .plotting import plot_histogram

            _plot(args.plot, lambda: render_histogram(hist),
                  lambda p: plot_histogram(hist, p))
        _emit(doc)
        return 0

    hist, fit = _daily_fit(events, args)
    store = _existing_store(args.fit) or ModelStore(created_at=max(e.timestamp for e in events))
    store.user_fits.setdefault(args.user, {})["daily"] = fit
    if args.per_user:
        for user in sorted({e.user_id for e in events}):
            own = [e for e in events if e.user_id == user]
            try:
                store.user_fits.setdefault(user, {})["daily"] = _daily_fit(own, args)[1]
            except OsnError as exc:
                print(f"warning: skipping user {user!r}: {exc}", file=sys.stderr)
    save_store(store, args.fit)
    if args.counts:
        _write_counts(args.counts, hist, fit)
    if args.plot:
        from .plotting import plot_histogram

        _plot(args.plot, lambda: render_user_figure(hist, fit),
              lambda p: plot_histogram(hist, p, fit, title="Daily posting pattern"))
    _emit({"user": args.user, "pattern": "daily", "fit": fit.to_dict(),
           "peaks": list(peak_times(fit))})
    return 0


# --- analyze-message ---------------------------------------------------------

def cmd_analyze_message(args) -> int:
    groups = load_observations(_read_lines(args.observations))
    if args.message not in groups:
        raise OsnError(f"no observations found for message {args.message!r}")
    series = groups[args.message]
    fit = fit_log_growth(series)
    store = _existing_store(args.fit) or ModelStore(created_at=EPOCH)
    store.message_fits[args.message] = fit
    save_store(store, args.fit)
    if args.plot:
        from .plotting import plot_growth

        _plot(args.plot, lambda: render_growth_figure(series, fit),
              lambda p: plot_growth(series, fit, p))
    _emit({"message": args.message, "fit": fit.to_dict()})
    return 0


# --- predict -----------------------------------------------------------------

def _pick(kind: str, fits: dict, wanted: Optional[str]):
    if wanted is not None:
        if wanted not in fits:
            raise OsnError(f"no {kind} fit for {wanted!r} in the model store")
        return wanted, fits[wanted]
    if len(fits) != 1:
        names = ", ".join(sorted(fits)) or "none"
        raise OsnError(f"model store holds {len(fits)} {kind} fits ({names}); "
                       f"choose one with --{kind}")
    return next(iter(fits.items()))


def cmd_predict(args) -> int:
    store = load_store(args.fit)
    user_fits = {u: f["daily"] for u, f in store.user_fits.items() if "daily" in f}
    if args.interval is not None:
        user, fit = _pick("user", user_fits, args.user)
        interval = HourInterval.parse(args.interval)
        _emit({"user": user, "interval": [interval.start, interval.end],
               "expected_count": expected_count(fit, interval)})
        return 0
    if args.target is not None:
        message, fit = _pick("message", store.message_fits, args.message)
        _emit({"message": message, "target": args.target,
               "time_to_reach_hours": time_to_reach(fit, args.target)})
        return 0

    use_user = args.user is not None or (
        args.message is None and user_fits and not store.message_fits)
    if use_user:
        user, fit = _pick("user", user_fits, args.user)
        if not 0 <= args.at < 24:
            raise DomainError("--at must be an hour of day in [0, 24) for a user fit")
        density = gmm_density(fit, args.at)
        _emit({"user": user, "at": args.at, "density": density,
               "expected_per_hour": fit.n_events * density, "peaks": list(peak_times(fit))})
        return 0
    message, fit = _pick("message", store.message_fits, args.message)
    raw, clamped = predict_retweets(fit, args.at)
    _emit({"message": message, "at": args.at, "raw": raw, "clamped": clamped})
    return 0


# --- schedule / simulate -----------------------------------------------------

def cmd_schedule(args) -> int:
    store = load_store(args.fits)
    fits = {u: f["daily"] for u, f in store.user_fits.items() if "daily" in f}
    # the pooled fit would double-count everyone once per-user fits exist
    if len(fits) > 1:
        fits.pop(ALL_USERS, None)
    window = HourInterval.parse(args.window)
    plan = allocate_polls(fits, window, args.budget)
    doc = plan.to_dict()
    doc["poll_hours"] = {u: poll_times(n, fits[u], window)
                         for u, n in sorted(plan.allocations.items())}
    _write_text(args.out, json.dumps(doc, indent=2) + "\n")
    _emit(plan.to_dict())
    return 0


def _load_spec(path, seed=None) -> SynthSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise OsnError(f"{path}: not valid JSON ({exc.msg})") from None
    try:
        spec = SynthSpec.from_dict(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise OsnError(f"{path}: invalid synthetic spec ({exc})") from None
    return spec if seed is None else replace(spec, seed=seed)


def cmd_simulate(args) -> int:
    truth = _load_spec(args.truth, args.seed)
    window = HourInterval.parse(args.window)
    fit = None
    if args.model_fit:
        store = load_store(args.model_fit)
        user_fits = {u: f["daily"] for u, f in store.user_fits.items() if "daily" in f}
        fit = _pick("user", user_fits, args.user)[1]
    result = simulate_policy(truth, args.budget, args.days, args.policy, window, fit)
    _emit(result.to_dict())
    return 0


# --- synth -------------------------------------------------------------------

def cmd_synth(args) -> int:
    spec = _load_spec(args.spec, args.seed)
    if args.events:
        lines = [format_event_line(e) for e in generate_synthetic_events(spec)]
    else:
        series = generate_synthetic_growth(spec)
        # noisy draws can dip; cumulative counts on disk must not
        running = 0
        cumulative = []
        for obs in series:
            running = max(running, obs.count)
            cumulative.append(RetweetObservation(obs.message_id, obs.age_hours, running))
        lines = [format_observation_line(o) for o in cumulative]
    _write_text(args.out, "".join(line + "\n" for line in lines))
    _emit({"written": len(lines), "path": args.out})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="osnbehavior",
                     description="Fit and query posting-time and retweet-growth models.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="validate events and merge them into a store directory")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="store directory")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("analyze-user", help="bin a user's events and fit the daily mixture")
    p.add_argument("--events", required=True, help="events.jsonl or an ingest store directory")
    p.add_argument("--user", required=True, help=f"user id, or {ALL_USERS} for everyone")
    p.add_argument("--pattern", required=True, choices=("daily", "weekly", "monthly"))
    p.add_argument("--month", help="YYYY-MM, required for monthly")
    p.add_argument("--tz-offset", type=float, default=0.0, help="hours added before binning")
    p.add_argument("--since", help="keep events at or after this RFC 3339 instant")
    p.add_argument("--until", help="keep events before this RFC 3339 instant")
    p.add_argument("--fit", required=True,
                   help="model store for daily fits; histogram JSON otherwise")
    p.add_argument("--plot", help="figure path (.svg, or any matplotlib format)")
    p.add_argument("--counts", help="write the histogram as CSV")
    p.add_argument("--per-user", action="store_true", help="with ALL, also fit every user")
    p.add_argument("--from-histogram", action="store_true",
                   help="fit to bin-center pseudo-samples instead of raw times")
    p.set_defaults(func=cmd_analyze_user)

    p = sub.add_parser("analyze-message", help="fit the log growth curve of one message")
    p.add_argument("--observations", required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--fit", required=True, help="model store to create or update")
    p.add_argument("--plot")
    p.set_defaults(func=cmd_analyze_message)

    p = sub.add_parser("predict", help="query a fitted model")
    p.add_argument("--fit", required=True, help="model store")
    p.add_argument("--user")
    p.add_argument("--message")
    q = p.add_mutually_exclusive_group(required=True)
    q.add_argument("--interval", help="S,E hours: expected events of a user")
    q.add_argument("--at", type=float, help="hour of day (user) or message age in hours")
    q.add_argument("--target", type=float, help="retweet count: time to reach it")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("schedule", help="split a poll budget across users")
    p.add_argument("--fits", required=True, help="model store")
    p.add_argument("--window", required=True, help="S,E hours")
    p.add_argument("--budget", required=True, type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("simulate", help="replay a polling policy on synthetic ground truth")
    p.add_argument("--truth", required=True, help="synthetic spec JSON")
    p.add_argument("--budget", required=True, type=int, help="polls per day")
    p.add_argument("--days", required=True, type=int)
    p.add_argument("--policy", required=True, choices=POLICIES)
    p.add_argument("--seed", type=int)
    p.add_argument("--window", default="0,24")
    p.add_argument("--model-fit", help="model store whose user fit drives --policy model")
    p.add_argument("--user")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synth", help="write synthetic events or a growth series")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--events", action="store_true")
    kind.add_argument("--growth", action="store_true")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "budget", None) is not None and args.budget < 0:
            raise UsageError("--budget must be non-negative")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (OsnError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


run = main

if __name__ == "__main__":
    sys.exit(main())
