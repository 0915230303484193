"""Command-line entry point: run sweeps, validate configs, dump radar debug."""

import argparse
import os
import sys

from . import harness, rsp, scene as sc


def _add_common(p):
    p.add_argument("--config", required=True, help="scenario INI file")
    p.add_argument("--scenario", help="override scenario.kind")
    p.add_argument("--policy", help="run only this policy")
    p.add_argument("--trials", type=int, help="override scenario.trials")
    p.add_argument("--seed", type=int, help="override scenario.seed")


def _overrides(args) -> dict:
    out = {}
    if args.scenario:
        out["kind"] = args.scenario
    if args.policy:
        out["policies"] = (args.policy,)
    if args.trials is not None:
        out["trials"] = args.trials
    if args.seed is not None:
        out["seed"] = args.seed
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="isacsim",
        description="Radar-assisted bandit beam alignment simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the configured Monte Carlo sweep")
    _add_common(run_p)
    run_p.add_argument("--out", default="out", help="output directory for CSVs")
    run_p.add_argument(
        "--decision-log", action="store_true",
        help="also write the per-slot decision log",
    )
    run_p.add_argument(
        "--workers", type=int, default=None,
        help="process pool size (default: ISACSIM_WORKERS or 1)",
    )

    val_p = sub.add_parser("validate", help="check a config file and exit")
    _add_common(val_p)

    dump_p = sub.add_parser(
        "dump-profiles",
        help="write range-profile and pseudo-spectrum CSVs for one beam",
    )
    _add_common(dump_p)
    dump_p.add_argument("--beam", type=int, default=None,
                        help="beam index (default: the user's beam)")
    dump_p.add_argument("--trial", type=int, default=0)
    dump_p.add_argument("--out", default="out", help="output directory")

    args = parser.parse_args(argv)
    try:
        cfg = harness.load_config(args.config, _overrides(args))
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3

    if args.command == "validate":
        print("config ok")
        return 0

    if args.command == "run":
        trace = harness.run_sweep(cfg, workers=args.workers)
        try:
            written = harness.emit_csv(trace, args.out, args.decision_log)
        except OSError as exc:
            print(f"i/o error: {exc}", file=sys.stderr)
            return 3
        for row in trace.summaries:
            print(
                f"{row.policy:9s} snr={row.snr_db:+6.1f} dB  "
                f"throughput={row.mean_throughput_bps / 1e6:6.3f} Mbps  "
                f"final_ber={row.mean_final_cum_ber:.4g}  "
                f"regret={row.mean_total_regret:.4g}"
            )
        print("wrote: " + ", ".join(written))
        return 0

    # dump-profiles
    scene_now = harness.build_scene(cfg, args.trial)
    waveform = cfg.waveform()
    array_cfg = cfg.bs_array()
    codebook = cfg.codebook()
    beam = args.beam
    if beam is None:
        user_az = scene_now.users[0].scatterers[0].azimuth
        beam = int(min(
            range(codebook.size), key=lambda k: abs(codebook.angles[k] - user_az)
        ))
    rng = harness.radar_rng(cfg, args.trial, 1, beam)
    cube = sc.synthesize_beam(scene_now, waveform, array_cfg, codebook, beam, rng)
    profiles = rsp.matched_filter(
        cube, waveform.pair, sample_period=waveform.sample_period
    )
    try:
        os.makedirs(args.out, exist_ok=True)
        ppath = os.path.join(args.out, f"profile_beam{beam}.csv")
        rsp.write_profile_csv(profiles, ppath)
        written = [ppath]
        dets = rsp.detect(profiles, cfg.threshold_db)
        if dets:
            f_hat, spectrum = rsp.music_doppler(
                profiles, dets[0][0], cfg.music(), waveform.pri
            )
            spath = os.path.join(args.out, f"spectrum_beam{beam}.csv")
            rsp.write_spectrum_csv(cfg.music().grid(), spectrum, spath)
            written.append(spath)
            print(f"strongest detection: bin={dets[0][0]} doppler={f_hat:.0f} Hz")
        else:
            print("no detections on this beam")
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    print("wrote: " + ", ".join(written))
    return 0


if __name__ == "__main__":
    sys.exit(main())
