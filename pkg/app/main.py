"""
Command-line entry point.

    python -m app.main simulate --n 5 --p 0.2 --tmax 3000 --out results/run.csv
    python -m app.main spectrum --n 6 --p 0.3 --out results/spectrum.csv
    python -m app.main entropy --n 5 --p 0.2 --tmax 500 --out results/entropy.csv
    python -m app.main dtime --n 5 --p 0.2 --epsilon 1e-3 --tmax 3000 --out results/dtime.csv
    python -m app.main sweep --config sweep.env

Exit code 0 on success, 1 on any error.
"""

import argparse
import json
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import WalkError
from app.core.logger import logger
from app.models.walk import ExperimentSpec, WalkParams
from app.services.experiment import (
    distance_frame,
    entropy_frame,
    experiment_service,
    spec_metadata,
    spectrum_frame,
)
from app.services.persistence import read_sweep_config, write_table


def _parse_psi0(raw: str) -> List[complex]:
    parts = [float(v) for v in raw.split(",")]
    if len(parts) != 4:
        raise ValueError(f"--psi0 expects a_re,a_im,b_re,b_im, got {raw!r}")
    return [complex(parts[0], parts[1]), complex(parts[2], parts[3])]


def _params(args: argparse.Namespace) -> WalkParams:
    # psi0 is normalised here; WalkParams itself only accepts unit vectors
    return WalkParams.from_coin_vector(
        n_sites=args.n,
        decoherence_rate=args.p,
        coin_angle=args.beta,
        coin=_parse_psi0(args.psi0),
        normalize=True,
    )


def _spec(args: argparse.Namespace, output_path: Optional[str] = None) -> ExperimentSpec:
    return ExperimentSpec(
        params=_params(args),
        t_max=args.tmax,
        record_every=getattr(args, "every", settings.DEFAULT_RECORD_EVERY),
        backend=getattr(args, "backend", "fourier"),
        epsilon=getattr(args, "epsilon", settings.DEFAULT_EPSILON),
        output_path=output_path,
        output_format=getattr(args, "format", "csv"),
    )


def _walk_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, required=True, help="cycle length N")
    parser.add_argument("--p", type=float, required=True, help="decoherence rate in [0, 1]")
    parser.add_argument("--beta", type=float, default=settings.DEFAULT_COIN_ANGLE, help="coin angle in (0, pi/2)")
    parser.add_argument("--psi0", default="1,0,0,0", help="initial coin a_re,a_im,b_re,b_im")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwalk", description=settings.PROJECT_NAME)
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="run a trajectory and write the table")
    _walk_arguments(simulate)
    simulate.add_argument("--tmax", type=int, default=settings.DEFAULT_T_MAX)
    simulate.add_argument("--every", type=int, default=settings.DEFAULT_RECORD_EVERY)
    simulate.add_argument("--backend", choices=["direct", "fourier", "both"], default="fourier")
    simulate.add_argument("--out", required=True)
    simulate.add_argument("--format", choices=["csv", "json"], default="csv")

    spectrum = commands.add_parser("spectrum", help="eigenvalues of the momentum-pair superoperators")
    _walk_arguments(spectrum)
    spectrum.add_argument("--k", type=int)
    spectrum.add_argument("--kprime", type=int)
    spectrum.add_argument("--out", required=True)
    spectrum.add_argument("--format", choices=["csv", "json"], default="csv")

    entropy = commands.add_parser("entropy", help="entropy and mutual information along a trajectory")
    _walk_arguments(entropy)
    entropy.add_argument("--tmax", type=int, default=settings.DEFAULT_T_MAX)
    entropy.add_argument("--every", type=int, default=settings.DEFAULT_RECORD_EVERY)
    entropy.add_argument("--backend", choices=["direct", "fourier"], default="fourier")
    entropy.add_argument("--out", required=True)
    entropy.add_argument("--format", choices=["csv", "json"], default="csv")

    dtime = commands.add_parser("dtime", help="decoherence time D(epsilon)")
    _walk_arguments(dtime)
    dtime.add_argument("--epsilon", type=float, default=settings.DEFAULT_EPSILON)
    dtime.add_argument("--tmax", type=int, default=settings.DEFAULT_T_MAX)
    dtime.add_argument("--every", type=int, default=settings.DEFAULT_RECORD_EVERY)
    dtime.add_argument("--out", help="also write the distance curve as a table")
    dtime.add_argument("--format", choices=["csv", "json"], default="csv")

    sweep = commands.add_parser("sweep", help="grid sweep over N, p, beta from a key=value file")
    sweep.add_argument("--config", required=True)
    return parser


def run(args: argparse.Namespace) -> None:
    if args.command == "simulate":
        experiment_service.run_trajectory(_spec(args, output_path=args.out))

    elif args.command == "spectrum":
        params = _params(args)
        frame = spectrum_frame(params, args.k, args.kprime)
        metadata = {"n_sites": params.n_sites, "decoherence_rate": repr(params.decoherence_rate),
                    "coin_angle": repr(params.coin_angle)}
        write_table(frame, args.out, args.format, metadata)

    elif args.command == "entropy":
        spec = _spec(args)
        records = experiment_service.entropy_series(spec)
        write_table(entropy_frame(records), args.out, args.format, spec_metadata(spec))

    elif args.command == "dtime":
        spec = _spec(args)
        result = experiment_service.decoherence_time(spec)
        if args.out:
            metadata = {**spec_metadata(spec), "d_epsilon": result.d_epsilon if result.reached else "not reached"}
            write_table(distance_frame(result), args.out, args.format, metadata)
        print(json.dumps({
            "curve": [[t, distance] for t, distance in result.distance_curve],
            "epsilon": result.epsilon,
            "t_max": result.t_max,
            "d_epsilon": result.d_epsilon if result.reached else "not reached within t_max",
            "spectral_estimate": result.spectral_estimate,
        }, sort_keys=True))

    elif args.command == "sweep":
        experiment_service.sweep(read_sweep_config(args.config))


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run(args)
    except (WalkError, ValidationError, ValueError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
