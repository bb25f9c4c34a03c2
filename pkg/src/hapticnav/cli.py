"""Command line front end.

Subcommands:
    replay           stream a detection log through mapping, consolidation,
                     and the command policy
    compile-pattern  turn a haptic pattern into servo wire commands
    sim-nav          run seeded waypoint navigation trials in the simulator
    scenario         score the command policy against labeled scenes
    serve            run the WebSocket gateway

Every subcommand accepts --manifest PATH to record what ran and what came
out as stable JSON (no timestamps, no environment capture), so runs can
be diffed. Exit codes: 0 on success, 1 when the operation itself fails
(an unreachable pose, a wrong scenario decision), 2 for bad usage or bad
input files.
"""
from __future__ import annotations

import argparse
import json
import pathlib
import sys
from importlib import resources

from .errors import InputError
from .haptics.linkage import Calibration, KinematicsError, LinkageGeometry
from .haptics.patterns import HapticPatternId, Temple, compile_pattern, trajectory_to_csv
from .haptics.rendering import DEFAULT_TICK_HZ, render
from .haptics.wire import WireFormatError, encode_stream
from .navigator import Path, ToleranceConfig, bundled_path, bundled_path_names, write_trajectory_csv
from .perception import CameraModel, LogDiagnostic, map_frame, read_detection_log
from .policy import (
    ChatCompletionClient,
    DecisionError,
    PolicyConfig,
    Sensitivity,
    decide,
    load_transcript,
)
from .scene import SceneWindow, summarize

_DATA = resources.files("hapticnav.data")


def _bundled(rel: str) -> str:
    return str(_DATA.joinpath(rel))


def _write_manifest(path: str, subcommand: str, arguments: dict, outputs: dict) -> None:
    payload = {"subcommand": subcommand, "arguments": arguments, "outputs": outputs}
    pathlib.Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_json(path: str, payload: dict) -> None:
    pathlib.Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# replay


def _cmd_replay(args: argparse.Namespace) -> int:
    camera = CameraModel.from_json(args.camera)
    client = load_transcript(args.transcript) if args.transcript else None
    config = PolicyConfig(sensitivity=Sensitivity(args.sensitivity))
    window = SceneWindow(capacity=args.window)
    diagnostics: list[LogDiagnostic] = []

    frames_read = 0
    records: list[dict] = []
    for frame in read_detection_log(args.log, strict=args.strict, diagnostics=diagnostics):
        frames_read += 1
        window.push(frame.frame_id, map_frame(frame, camera, args.min_confidence))
        if len(window) < args.persistence:
            continue
        summary = summarize(window, args.persistence)
        decision = decide(summary, config, client)
        hazards = ", ".join(
            f"{o.label}@{o.distance_m:.2f}m" for o in summary.hazards()
        )
        span = summary.window_span
        print(
            f"frame {frame.frame_id:>4}  window {span[0]}..{span[1]}  "
            f"objects={len(summary.objects)}  hazards={hazards or '-'}  "
            f"-> {decision.command.value} ({decision.source.value})"
        )
        records.append(
            {
                "frame_id": frame.frame_id,
                "window": list(span),
                "command": decision.command.value,
                "source": decision.source.value,
                "objects": [o.to_dict() for o in summary.objects],
            }
        )
    for diag in diagnostics:
        print(f"warning: line {diag.line_number} skipped: {diag.message}", file=sys.stderr)

    outputs = {
        "frames_read": frames_read,
        "decisions_made": len(records),
        "lines_skipped": len(diagnostics),
        "final_command": records[-1]["command"] if records else None,
    }
    if args.json:
        _write_json(
            args.json,
            {
                "decisions": records,
                "diagnostics": [{"line": d.line_number, "reason": d.message} for d in diagnostics],
            },
        )
    if args.manifest:
        _write_manifest(
            args.manifest,
            "replay",
            {
                "log": str(args.log),
                "camera": str(args.camera),
                "sensitivity": args.sensitivity,
                "window": args.window,
                "persistence": args.persistence,
                "min_confidence": args.min_confidence,
                "transcript": str(args.transcript) if args.transcript else None,
                "strict": args.strict,
            },
            outputs,
        )
    return 0


# ---------------------------------------------------------------------------
# compile-pattern


def _cmd_compile_pattern(args: argparse.Namespace) -> int:
    pattern = HapticPatternId(args.pattern)
    geometry = LinkageGeometry()
    calibration = Calibration(
        pressure_gain={Temple.LEFT: args.gain[0], Temple.RIGHT: args.gain[1]},
        position_offset_mm={Temple.LEFT: args.offset[0], Temple.RIGHT: args.offset[1]},
    )
    trajectory = compile_pattern(pattern)
    commands = render(trajectory, geometry, calibration, tick_hz=args.tick_hz)
    text = encode_stream(commands, geometry)
    if args.out:
        pathlib.Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        trajectory_to_csv(trajectory, args.csv)
    if args.manifest:
        _write_manifest(
            args.manifest,
            "compile-pattern",
            {
                "pattern": pattern.value,
                "tick_hz": args.tick_hz,
                "gain": list(args.gain),
                "offset": list(args.offset),
            },
            {
                "commands": len(commands),
                "duration_ms": trajectory.duration_ms,
                "temples": [t.value for t in trajectory.temples()],
            },
        )
    return 0


# ---------------------------------------------------------------------------
# sim-nav


def _load_path(value: str) -> Path:
    if value in bundled_path_names():
        return bundled_path(value)
    return Path.from_json(value)


def _trajectory_svg(result, path: Path, tolerances: ToleranceConfig, out: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from shapely.geometry import LineString

    band = LineString(path.waypoints).buffer(tolerances.cross_track_tolerance_m)
    bx, by = band.exterior.xy
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    ax.fill(bx, by, color="#d9ead9", lw=0, label=f"corridor ±{tolerances.cross_track_tolerance_m:g} m")
    wx = [w[0] for w in path.waypoints]
    wy = [w[1] for w in path.waypoints]
    ax.plot(wx, wy, "--o", color="#5a8f5a", ms=4, lw=1.0, label="path")
    tx = [p.x_m for _, p in result.trajectory]
    ty = [p.y_m for _, p in result.trajectory]
    ax.plot(tx, ty, color="#20304f", lw=1.3, label="walk")
    ax.plot(tx[0], ty[0], "^", color="#20304f", ms=7)
    ax.plot(tx[-1], ty[-1], "s", color="#20304f", ms=6)
    status = "completed" if result.completed else "timed out"
    m = result.metrics
    ax.set_title(
        f"{result.path_name} seed {result.seed}: {status}, "
        f"{m.waypoints_reached} waypoints, {m.pct_time_outside_tolerance:.1f}% outside"
    )
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal")
    ax.legend(loc="best", fontsize=8)
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)


def _cmd_sim_nav(args: argparse.Namespace) -> int:
    from .sim.confusion import bundled_profile
    from .sim.environment import Environment
    from .sim.trial import TrialConfig, run_trial_batch

    path = _load_path(args.path)
    environment = Environment.from_json(args.env) if args.env else None
    profile = bundled_profile() if args.perception == "confused" else None
    config = TrialConfig(tick_hz=args.tick_hz, timeout_s=args.timeout)
    results = run_trial_batch(
        path, args.trials, environment=environment, profile=profile, config=config, seed0=args.seed
    )
    for r in results:
        m = r.metrics
        status = "completed" if r.completed else "timed out"
        print(
            f"trial seed={r.seed} {status} t={m.completion_time_s:.1f}s "
            f"waypoints={m.waypoints_reached}/{len(path.waypoints)} "
            f"outside={m.pct_time_outside_tolerance:.2f}% exits={m.exit_reenter_count}"
        )
    n_done = sum(1 for r in results if r.completed)
    mean_outside = sum(r.metrics.pct_time_outside_tolerance for r in results) / len(results)
    mean_exits = sum(r.metrics.exit_reenter_count for r in results) / len(results)
    if len(results) > 1:
        print(
            f"summary: completed {n_done}/{len(results)} "
            f"mean_outside={mean_outside:.2f}% mean_exits={mean_exits:.2f}"
        )

    if args.json:
        _write_json(args.json, {"trials": [r.to_dict() for r in results]})
    if args.csv:
        write_trajectory_csv(results[0].trajectory, args.csv)
    if args.plot:
        _trajectory_svg(results[0], path, config.tolerances, args.plot)
    if args.manifest:
        _write_manifest(
            args.manifest,
            "sim-nav",
            {
                "path": args.path,
                "trials": args.trials,
                "seed": args.seed,
                "perception": args.perception,
                "env": str(args.env) if args.env else None,
                "tick_hz": args.tick_hz,
                "timeout": args.timeout,
            },
            {
                "completed": n_done,
                "mean_outside_pct": mean_outside,
                "mean_exits": mean_exits,
            },
        )
    return 0


# ---------------------------------------------------------------------------
# scenario


def _scenario_suite(args: argparse.Namespace) -> list:
    from .sim.scenarios import ScenarioKind, build_scenario_suite, bundled_suite, load_suite

    if args.trials < 1:
        raise InputError(f"--trials must be >= 1: {args.trials}")
    if args.suite:
        suite = load_suite(args.suite)
    elif args.seed is not None:
        suite = build_scenario_suite(base_seed=args.seed, per_kind=args.trials)
    else:
        suite = bundled_suite()
        # Keep the first N of each kind so --trials works on the bundle too.
        kept: dict[ScenarioKind, int] = {}
        trimmed = []
        for scenario in suite:
            kept[scenario.kind] = kept.get(scenario.kind, 0) + 1
            if kept[scenario.kind] <= args.trials:
                trimmed.append(scenario)
        suite = trimmed
    if args.kind:
        suite = [s for s in suite if s.kind is ScenarioKind(args.kind)]
        if not suite:
            raise InputError(f"no scenarios of kind {args.kind!r}")
    return suite


def _scenario_client(args: argparse.Namespace, config: PolicyConfig):
    import os

    if args.policy == "fallback":
        if args.transcript:
            raise InputError("--transcript only applies with --policy transcript")
        return None
    if args.policy == "transcript":
        if args.transcript:
            return load_transcript(args.transcript)
        if args.sensitivity != Sensitivity.MEDIUM.value:
            raise InputError(
                "the bundled transcript was recorded at medium sensitivity; "
                "pass --transcript for other levels"
            )
        if args.suite or args.seed is not None:
            raise InputError(
                "the bundled transcript answers the bundled suite; "
                "pass --transcript for a custom suite"
            )
        return load_transcript(_bundled("transcripts/decision_suite_medium.json"))
    # Live model. Fail early with instructions rather than one transport
    # error per scene.
    if not os.environ.get(config.api_key_env, ""):
        raise InputError(
            f"--policy llm needs a credential: set {config.api_key_env} "
            "in the environment (never on the command line)"
        )
    if not args.endpoint:
        raise InputError("--policy llm needs --endpoint")
    return ChatCompletionClient(
        PolicyConfig(
            sensitivity=config.sensitivity,
            llm_endpoint=args.endpoint,
            llm_model=args.model,
        )
    )


def _cmd_scenario(args: argparse.Namespace) -> int:
    from .sim.scenarios import run_decision_scenario

    suite = _scenario_suite(args)
    config = PolicyConfig(sensitivity=Sensitivity(args.sensitivity))
    client = _scenario_client(args, config)

    outcomes = []
    for scenario in suite:
        outcome = run_decision_scenario(scenario, config=config, client=client)
        mark = "ok" if outcome.correct else "WRONG"
        print(
            f"{scenario.name:<12} expected={outcome.expected.value:<8} "
            f"got={outcome.decision.command.value:<8} ({outcome.decision.source.value}) {mark}"
        )
        outcomes.append(outcome)
    n_correct = sum(1 for o in outcomes if o.correct)
    print(f"accuracy: {n_correct}/{len(outcomes)}")

    if args.json:
        _write_json(
            args.json,
            {
                "outcomes": [
                    {
                        "name": o.name,
                        "expected": o.expected.value,
                        "command": o.decision.command.value,
                        "source": o.decision.source.value,
                        "correct": o.correct,
                    }
                    for o in outcomes
                ],
                "correct": n_correct,
                "total": len(outcomes),
            },
        )
    if args.manifest:
        _write_manifest(
            args.manifest,
            "scenario",
            {
                "suite": str(args.suite) if args.suite else "bundled",
                "kind": args.kind,
                "policy": args.policy,
                "trials": args.trials,
                "seed": args.seed,
                "transcript": str(args.transcript) if args.transcript else None,
                "sensitivity": args.sensitivity,
            },
            {"correct": n_correct, "total": len(outcomes)},
        )
    if args.policy == "llm":
        # Live-model accuracy is informational; the run itself succeeded.
        return 0
    return 0 if n_correct == len(outcomes) else 1


# ---------------------------------------------------------------------------
# serve


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .gateway import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hapticnav",
        description="Haptic navigation toolkit: scene pipeline, pattern compiler, simulator.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    replay = sub.add_parser("replay", help="run a detection log through the decision pipeline")
    replay.add_argument("--log", default=_bundled("logs/sample_walk.ndjson"), help="detection log (JSON lines)")
    replay.add_argument("--camera", default=_bundled("sample_camera.json"), help="camera model JSON")
    replay.add_argument("--sensitivity", choices=[s.value for s in Sensitivity], default="medium")
    replay.add_argument("--window", type=int, default=5, help="consolidation window size")
    replay.add_argument("--persistence", type=int, default=3, help="frames required to keep an object")
    replay.add_argument("--min-confidence", type=float, default=0.25)
    replay.add_argument("--transcript", help="recorded model replies to replay instead of the fallback rule")
    replay.add_argument("--strict", action="store_true", help="fail on the first malformed log line")
    replay.add_argument("--json", help="write per-frame decisions to this file")
    replay.add_argument("--manifest", help="write a run manifest to this file")
    replay.set_defaults(func=_cmd_replay)

    compile_p = sub.add_parser("compile-pattern", help="compile a pattern to servo wire commands")
    compile_p.add_argument("pattern", choices=[p.value for p in HapticPatternId])
    compile_p.add_argument("--tick-hz", type=float, default=DEFAULT_TICK_HZ)
    compile_p.add_argument("--gain", type=float, nargs=2, default=(1.0, 1.0), metavar=("LEFT", "RIGHT"))
    compile_p.add_argument("--offset", type=float, nargs=2, default=(0.0, 0.0), metavar=("LEFT", "RIGHT"))
    compile_p.add_argument("--out", help="write wire text here instead of stdout")
    compile_p.add_argument("--csv", help="also write the keyframe trajectory as CSV")
    compile_p.add_argument("--manifest", help="write a run manifest to this file")
    compile_p.set_defaults(func=_cmd_compile_pattern)

    sim = sub.add_parser("sim-nav", help="run waypoint navigation trials")
    sim.add_argument("--path", default="path1", help="bundled path name or a path JSON file")
    sim.add_argument("--trials", type=int, default=1)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--perception", choices=["perfect", "confused"], default="perfect",
                     help="confused draws misreads from the measured confusion matrix")
    sim.add_argument("--env", help="environment JSON with obstacles")
    sim.add_argument("--tick-hz", type=float, default=10.0)
    sim.add_argument("--timeout", type=float, default=120.0)
    sim.add_argument("--json", help="write trial results to this file")
    sim.add_argument("--csv", help="write the first trial's trajectory as CSV")
    sim.add_argument("--plot", help="write an SVG plot of the first trial")
    sim.add_argument("--manifest", help="write a run manifest to this file")
    sim.set_defaults(func=_cmd_sim_nav)

    scenario = sub.add_parser("scenario", help="score the policy on labeled scenes")
    scenario.add_argument(
        "kind", nargs="?", choices=["open", "static", "dynamic"],
        help="limit to one scenario kind (default: all three)",
    )
    scenario.add_argument(
        "--policy", choices=["fallback", "llm", "transcript"], default="fallback",
        help="decision route: deterministic rules, a live chat model, or a recorded transcript",
    )
    scenario.add_argument(
        "--trials", type=int, default=20, help="scenes per kind (default 20)"
    )
    scenario.add_argument(
        "--seed", type=int,
        help="regenerate the suite from this seed instead of using the bundled scenes",
    )
    scenario.add_argument("--endpoint", default="", help="chat-completions URL for --policy llm")
    scenario.add_argument("--model", default="", help="model name for --policy llm")
    scenario.add_argument("--suite", help="scenario suite JSON (default: bundled 60 scenes)")
    scenario.add_argument("--transcript",
                          help="recorded model replies (ordered for the full bundled suite)")
    scenario.add_argument("--sensitivity", choices=[s.value for s in Sensitivity], default="medium")
    scenario.add_argument("--json", help="write outcomes to this file")
    scenario.add_argument("--manifest", help="write a run manifest to this file")
    scenario.set_defaults(func=_cmd_scenario)

    serve = sub.add_parser("serve", help="run the WebSocket gateway")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8765)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (WireFormatError, KinematicsError, DecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
