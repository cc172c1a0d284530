"""
Experiment Service
==================
Runs walk experiments on top of the two evolution backends:
- trajectories (position distribution, entropies, distance to the stationary operator)
- decoherence time D(eps)
- parameter sweeps over (N, p, beta), run concurrently and assembled in grid order
"""

import math
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd

from app.core.errors import WalkDomainError
from app.core.logger import logger
from app.models.walk import (
    DecoherenceTimeResult,
    EntropyRecord,
    ExperimentSpec,
    SweepConfig,
    SweepRow,
    TrajectoryRow,
    WalkParams,
)
from app.modules import evolution_direct, evolution_fourier
from app.modules.entropy import limiting_entropies, mutual_information, trace_norm
from app.modules.spectral import spectrum, spectrum_grid, stationary_density, walk_relaxation_rate
from app.services.persistence import write_table

# (t, density, position distribution, cross-backend discrepancy or None)
State = Tuple[int, np.ndarray, np.ndarray, Optional[float]]


class ExperimentService:
    """Trajectory, decoherence-time and sweep runs for walks on the N-cycle."""

    # ==================== STATE STREAMS ====================

    def iter_states(self, spec: ExperimentSpec) -> Iterator[State]:
        """Yields the state at every recorded time of the spec, from the chosen backend(s)."""
        params, t_max = spec.params, spec.t_max
        recorded = set(spec.recorded_times())

        if spec.backend == "direct":
            for t, rho in enumerate(evolution_direct.iter_density(params, t_max)):
                if t in recorded:
                    yield t, rho, evolution_direct.position_distribution(rho), None
            return

        fields = evolution_fourier.iter_block_fields(params, t_max)
        if spec.backend == "fourier":
            for field in fields:
                if field.time in recorded:
                    rho = evolution_fourier.reconstruct_density(field)
                    yield field.time, rho, evolution_fourier.position_distribution_fourier(field), None
            return

        # both: the Fourier state is reported, the direct one is the oracle
        for field, rho_direct in zip(fields, evolution_direct.iter_density(params, t_max)):
            if field.time in recorded:
                rho = evolution_fourier.reconstruct_density(field)
                discrepancy = trace_norm(rho - rho_direct)
                yield field.time, rho, evolution_fourier.position_distribution_fourier(field), discrepancy

    @staticmethod
    def stationary_distance(rho: np.ndarray, n_sites: int, t: int) -> float:
        """Trace distance to the parity-matched stationary operator."""
        return trace_norm(rho - stationary_density(n_sites, t % 2))

    # ==================== TRAJECTORIES ====================

    def run_trajectory(self, spec: ExperimentSpec) -> List[TrajectoryRow]:
        params = spec.params
        logger.info(
            f"Trajectory: N={params.n_sites}, p={params.decoherence_rate}, beta={params.coin_angle}, "
            f"t_max={spec.t_max}, every={spec.record_every}, backend={spec.backend}"
        )
        rows = []
        for t, rho, probabilities, discrepancy in self.iter_states(spec):
            rows.append(TrajectoryRow(
                t=t,
                probabilities=[float(v) for v in probabilities],
                entropy=mutual_information(rho, time=t),
                trace_distance=self.stationary_distance(rho, params.n_sites, t),
                backend_discrepancy=discrepancy,
            ))

        if spec.output_path:
            write_table(trajectory_frame(rows, spec), spec.output_path, spec.output_format, spec_metadata(spec))
        logger.info(f"Trajectory finished with {len(rows)} rows")
        return rows

    def entropy_series(self, spec: ExperimentSpec) -> List[EntropyRecord]:
        """EntropyRecord rows only; nothing is written here."""
        records = []
        for t, rho, _, _ in self.iter_states(spec):
            records.append(mutual_information(rho, time=t))
        return records

    # ==================== DECOHERENCE TIME ====================

    def decoherence_time(self, spec: ExperimentSpec) -> DecoherenceTimeResult:
        params = spec.params
        if params.decoherence_rate == 0.0:
            raise WalkDomainError(
                "decoherence time is undefined for p = 0: a coherent walk has no stationary density operator"
            )
        curve = [
            (t, self.stationary_distance(rho, params.n_sites, t))
            for t, rho, _, _ in self.iter_states(spec)
        ]
        result = DecoherenceTimeResult(
            epsilon=spec.epsilon,
            t_max=spec.t_max,
            d_epsilon=first_settled_time(curve, spec.epsilon),
            distance_curve=curve,
            spectral_estimate=spectral_decoherence_estimate(params, spec.epsilon),
        )
        if result.reached:
            logger.debug(f"D({spec.epsilon}) = {result.d_epsilon} (spectral estimate {result.spectral_estimate})")
        else:
            logger.debug(f"D({spec.epsilon}) not reached within t_max={spec.t_max}")
        return result

    # ==================== SWEEPS ====================

    def sweep_point(self, config: SweepConfig, n_sites: int, p: float, beta: float) -> SweepRow:
        row = SweepRow(n_sites=n_sites, decoherence_rate=p, coin_angle=beta)
        try:
            params = WalkParams(n_sites=n_sites, decoherence_rate=p, coin_angle=beta,
                                initial_coin=config.initial_coin)
            spec = ExperimentSpec(params=params, t_max=config.t_max, record_every=config.record_every,
                                  backend=config.backend, epsilon=config.epsilon)
            trajectory = self.run_trajectory(spec)
            final = trajectory[-1].entropy
            curve = [(r.t, r.trace_distance) for r in trajectory]
            reports = spectrum_grid(params)
            return row.model_copy(update={
                "s_total": final.s_total,
                "s_coin": final.s_coin,
                "s_walker": final.s_walker,
                "mutual_info": final.mutual_info,
                "s_total_limit_gap": final.s_total - limiting_entropies(n_sites)[0],
                "d_epsilon": first_settled_time(curve, config.epsilon) if p > 0 else None,
                "spectral_gap_min": min(r.spectral_gap for r in reports),
                "relaxation_gap_min": min(r.relaxation_gap for r in reports),
            })
        except Exception as e:
            logger.warning(f"Sweep point N={n_sites}, p={p}, beta={beta} failed: {e}")
            return row.model_copy(update={"error": str(e)})

    def sweep(self, config: SweepConfig) -> List[SweepRow]:
        grid = list(product(sorted(config.n_values), sorted(config.p_values), sorted(config.beta_values)))
        logger.info(f"Sweep over {len(grid)} grid points with {config.workers} workers")
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            # map preserves grid order regardless of completion order
            rows = list(pool.map(lambda point: self.sweep_point(config, *point), grid))

        if config.output_path:
            write_table(sweep_frame(rows), config.output_path, config.output_format, sweep_metadata(config))
        else:
            logger.warning("Sweep has no output_path; rows are returned but not written")
        failed = sum(1 for r in rows if r.error)
        logger.info(f"Sweep finished: {len(rows) - failed} ok, {failed} failed")
        return rows


def first_settled_time(curve: List[Tuple[int, float]], epsilon: float) -> Optional[int]:
    """
    Smallest recorded tau such that every recorded distance at t > tau is below epsilon.
    None when the last recorded distance still violates the bound.
    """
    if epsilon <= 0:
        raise WalkDomainError(f"epsilon must be positive, got {epsilon!r}")
    if not curve:
        return None
    violations = [t for t, distance in curve if distance >= epsilon]
    if not violations:
        return 0
    last = max(violations)
    if last == curve[-1][0]:
        return None
    return last


def spectral_decoherence_estimate(params: WalkParams, epsilon: float) -> Optional[int]:
    """ceil(ln eps / ln r) with r the largest non-unit eigenvalue modulus over all momentum pairs."""
    rate = walk_relaxation_rate(params)
    if not (0.0 < rate < 1.0):
        return None
    return max(0, math.ceil(math.log(epsilon) / math.log(rate)))


# ==================== TABLES ====================

def spec_metadata(spec: ExperimentSpec) -> Dict[str, Any]:
    params = spec.params
    return {
        "n_sites": params.n_sites,
        "decoherence_rate": repr(params.decoherence_rate),
        "coin_angle": repr(params.coin_angle),
        "initial_coin": ",".join(repr(c) for c in params.initial_coin),
        "t_max": spec.t_max,
        "record_every": spec.record_every,
        "backend": spec.backend,
        "epsilon": repr(spec.epsilon),
    }


def sweep_metadata(config: SweepConfig) -> Dict[str, Any]:
    return {
        "n_values": ",".join(str(n) for n in sorted(config.n_values)),
        "p_values": ",".join(repr(p) for p in sorted(config.p_values)),
        "beta_values": ",".join(repr(b) for b in sorted(config.beta_values)),
        "initial_coin": ",".join(repr(c) for c in config.initial_coin),
        "t_max": config.t_max,
        "record_every": config.record_every,
        "backend": config.backend,
        "epsilon": repr(config.epsilon),
    }


def trajectory_frame(rows: List[TrajectoryRow], spec: ExperimentSpec) -> pd.DataFrame:
    """Columns: t, x0..x{N-1}, s_total, s_coin, s_walker, mutual_info, trace_distance[, backend_discrepancy]."""
    n = spec.params.n_sites
    records = []
    for row in rows:
        record: Dict[str, Any] = {"t": row.t}
        record.update({f"x{x}": row.probabilities[x] for x in range(n)})
        record.update({
            "s_total": row.entropy.s_total,
            "s_coin": row.entropy.s_coin,
            "s_walker": row.entropy.s_walker,
            "mutual_info": row.entropy.mutual_info,
            "trace_distance": row.trace_distance,
        })
        if spec.backend == "both":
            record["backend_discrepancy"] = row.backend_discrepancy
        records.append(record)
    columns = ["t"] + [f"x{x}" for x in range(n)] + ["s_total", "s_coin", "s_walker", "mutual_info", "trace_distance"]
    if spec.backend == "both":
        columns.append("backend_discrepancy")
    return pd.DataFrame(records, columns=columns)


def distance_frame(result: DecoherenceTimeResult) -> pd.DataFrame:
    return pd.DataFrame(result.distance_curve, columns=["t", "trace_distance"])


def entropy_frame(records: List[EntropyRecord]) -> pd.DataFrame:
    columns = ["time", "s_total", "s_coin", "s_walker", "mutual_info", "purity"]
    return pd.DataFrame([r.model_dump() for r in records], columns=columns)


def spectrum_frame(params: WalkParams, k: Optional[int] = None, k_prime: Optional[int] = None) -> pd.DataFrame:
    """One row per (k, k') pair; all pairs when k and k_prime are omitted."""
    if k is None and k_prime is None:
        reports = spectrum_grid(params)
    elif k is not None and k_prime is not None:
        reports = [spectrum(k, k_prime, params)]
    else:
        raise WalkDomainError("give both k and k' or neither")

    records = []
    for report in reports:
        record: Dict[str, Any] = {"k": report.k, "k_prime": report.k_prime}
        for i, value in enumerate(report.eigenvalues):
            record[f"eig{i}_re"] = float(value.real)
            record[f"eig{i}_im"] = float(value.imag)
        multiplicity = {value.real: count for value, count in report.unit_eigenvalues}
        record.update({
            "max_modulus": report.max_modulus,
            "spectral_gap": report.spectral_gap,
            "relaxation_gap": report.relaxation_gap,
            "unit_plus_multiplicity": multiplicity.get(1.0, 0),
            "unit_minus_multiplicity": multiplicity.get(-1.0, 0),
            "max_residual": report.max_residual,
        })
        records.append(record)
    return pd.DataFrame(records)


def sweep_frame(rows: List[SweepRow]) -> pd.DataFrame:
    frame = pd.DataFrame([r.model_dump() for r in rows], columns=list(SweepRow.model_fields))
    frame["d_epsilon"] = frame["d_epsilon"].astype("Int64")
    return frame


experiment_service = ExperimentService()
