"""Monte-Carlo BER experiments.

Every run draws one channel trajectory, symbol stream and noise stream
from generators keyed by ``(base_seed, grid index, run index)`` and feeds
the identical received sequence to every configured receiver.  Only the
desired user (user 1) is detected and only decision-directed symbols are
scored.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from jiomber.baselines import (
    EigMberReceiver,
    FullRankLmsReceiver,
    FullRankMberReceiver,
    JioLmsReceiver,
    MwfLmsReceiver,
    MwfMberReceiver,
)
from jiomber.channel import RunStreams, simulate
from jiomber.config import ExperimentConfig, ReceiverSpec, parse_receiver
from jiomber.jio import JioMberReceiver
from jiomber.rank import AutoRankReceiver

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("receiver", "x_name", "x_value", "ber", "errors", "bits", "runs", "seed")


def make_receiver(spec: ReceiverSpec, config: ExperimentConfig, channel):
    """Fresh receiver in its initial state for one run."""
    m = channel.num_antennas
    rho = config.kernel_radius(channel)
    tr = config.training_symbols
    alg = spec.algorithm
    if alg == "jio_mber":
        if spec.auto:
            return AutoRankReceiver.create(
                m,
                spec.d_min,
                spec.d_max,
                rho,
                config.step_w,
                config.step_s,
                training_length=tr,
                criterion=config.rank_criterion,
                dd_reference=config.rank_reference,
            )
        return JioMberReceiver.create(m, spec.rank, rho, config.step_w, config.step_s, training_length=tr)
    if alg == "full_rank_lms":
        return FullRankLmsReceiver(m, config.lms_step, tr, normalized=config.lms_normalized)
    if alg == "full_rank_mber":
        return FullRankMberReceiver(m, rho, config.mber_step, tr)
    step = config.reduced_rank_step
    if alg == "jio_lms":
        return JioLmsReceiver(m, spec.rank, step, step, tr, normalized=config.lms_normalized)
    if alg == "mwf_lms":
        return MwfLmsReceiver(m, spec.rank, step, tr, config.forgetting, normalized=config.lms_normalized)
    if alg == "mwf_mber":
        return MwfMberReceiver(m, spec.rank, rho, step, tr, config.forgetting)
    if alg == "eig":
        return EigMberReceiver(m, spec.rank, rho, step, tr, config.forgetting)
    raise ValueError(f"unknown algorithm {alg!r}")


def run_seed_key(config: ExperimentConfig, grid_index: int, run: int) -> tuple:
    return (config.base_seed, grid_index, run)


@dataclass
class RunResult:
    """One realization: DD-symbol error indicators per receiver."""

    seed_key: tuple
    errors: dict  # tag -> int8 array, one entry per DD symbol
    decisions: dict  # tag -> int8 array, one entry per symbol (TR and DD)
    digest: str  # sha256 of the received sequence
    annotations: dict = field(default_factory=dict)


def run_single(config: ExperimentConfig, receivers=None, seed_key=(0, 0, 0), grid_value=None) -> RunResult:
    """Simulate one realization and run every receiver over it.

    Parameters
    ----------
    receivers : sequence of str or ReceiverSpec, optional
        Defaults to all receivers of `config`.
    seed_key : tuple of int
        Key for the run's random streams.
    grid_value : optional
        Value of the swept variable for this run.
    """
    if receivers is None:
        receivers = config.receivers
    specs = [r if isinstance(r, ReceiverSpec) else parse_receiver(r) for r in receivers]
    channel = config.channel_config(grid_value)
    n_total = config.total_symbols
    tr = config.training_symbols
    block = simulate(channel, n_total, RunStreams.from_seed(*seed_key))
    received = block.received
    desired = block.symbols[:, 0].astype(int)
    digest = hashlib.sha256(np.ascontiguousarray(received).tobytes()).hexdigest()

    errors, decisions, notes = {}, {}, {}
    for spec in specs:
        rx = make_receiver(spec, config, channel)
        out = np.empty(n_total, dtype=np.int8)
        step = rx.step
        for i in range(n_total):
            out[i] = step(received[i], desired[i] if i < tr else None)
        decisions[spec.tag] = out
        errors[spec.tag] = (out[tr:] != desired[tr:]).astype(np.int8)
        flags = {}
        for attr in ("truncations", "unscored_symbols"):
            if getattr(rx, attr, 0):
                flags[attr] = int(getattr(rx, attr))
        if flags:
            notes[spec.tag] = flags
    return RunResult(tuple(seed_key), errors, decisions, digest, notes)


@dataclass
class BerCurve:
    """BER of one receiver along the experiment's independent variable.

    ``run_errors[j, r]`` is the error count of run ``r`` at point ``j`` and
    ``bits[j]`` the number of scored bits at that point summed over runs.
    """

    receiver: str
    x_name: str
    x_values: list
    run_errors: np.ndarray
    bits: np.ndarray
    runs: int
    seed: int
    annotations: list = field(default_factory=list)

    @property
    def errors(self) -> np.ndarray:
        return self.run_errors.sum(axis=1)

    @property
    def ber(self) -> np.ndarray:
        return self.errors / self.bits

    @property
    def bits_per_run(self) -> np.ndarray:
        return self.bits // self.runs

    @property
    def run_ber(self) -> np.ndarray:
        return self.run_errors / self.bits_per_run[:, None]

    @property
    def stderr(self) -> np.ndarray:
        """Standard error of the mean BER across runs at each point."""
        if self.runs < 2:
            return np.zeros(len(self.x_values))
        return self.run_ber.std(axis=1, ddof=1) / np.sqrt(self.runs)

    def to_dict(self) -> dict:
        return {
            "receiver": self.receiver,
            "x_name": self.x_name,
            "x_values": list(self.x_values),
            "ber": self.ber.tolist(),
            "stderr": self.stderr.tolist(),
            "errors": self.errors.tolist(),
            "bits": self.bits.tolist(),
            "runs": self.runs,
            "seed": self.seed,
            "annotations": self.annotations,
        }


def window_counts(errors: np.ndarray, window: int) -> np.ndarray:
    """Trailing-window error counts along the last axis."""
    c = np.cumsum(errors, axis=-1, dtype=np.int64)
    out = c.copy()
    out[..., window:] = c[..., window:] - c[..., :-window]
    return out


def _task(args):
    config, grid_index, run, value = args
    return run_single(config, seed_key=run_seed_key(config, grid_index, run), grid_value=value)


def _run_all(config: ExperimentConfig, tasks, workers: int):
    if workers <= 1:
        return [_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_task, tasks, chunksize=1))


def run_experiment(config: ExperimentConfig, workers=None) -> list:
    """Average every receiver over the configured runs and grid.

    For the ``symbols`` sweep each point is a symbol index of the DD phase
    and carries the trailing-window error count ending at that symbol
    (learning curve).  For the other sweeps each point covers all DD
    symbols of every run.

    Results depend only on the configuration: runs are reduced in run
    order whatever the number of worker processes.
    """
    workers = config.workers if workers is None else workers
    tags = [s.tag for s in config.receiver_specs]
    runs = config.monte_carlo_runs
    grid = [None] if config.sweep == "symbols" else list(config.grid)
    tasks = [(config, g, r, v) for g, v in enumerate(grid) for r in range(runs)]
    results = _run_all(config, tasks, workers)

    curves = []
    for tag in tags:
        notes = [
            {"seed_key": list(res.seed_key), **res.annotations[tag]}
            for res in results
            if tag in res.annotations
        ]
        if config.sweep == "symbols":
            errs = np.stack([res.errors[tag] for res in results])  # (runs, data)
            counts = window_counts(errs, config.window)
            per_run_bits = np.minimum(np.arange(1, config.data_symbols + 1), config.window)
            x = [config.training_symbols + j + 1 for j in range(config.data_symbols)]
            curve = BerCurve(tag, config.x_name, x, counts.T.copy(), per_run_bits * runs, runs, config.base_seed, notes)
        else:
            per_point = np.array(
                [[int(results[g * runs + r].errors[tag].sum()) for r in range(runs)] for g in range(len(grid))]
            )
            bits = np.full(len(grid), config.data_symbols * runs, dtype=np.int64)
            curve = BerCurve(tag, config.x_name, list(grid), per_point, bits, runs, config.base_seed, notes)
        curves.append(curve)
    return curves


def _fmt(x) -> str:
    return repr(x) if isinstance(x, float) else str(x)


def curves_to_csv(curves) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for c in curves:
        for x, ber, err, bits in zip(c.x_values, c.ber, c.errors, c.bits):
            writer.writerow([c.receiver, c.x_name, _fmt(x), repr(float(ber)), int(err), int(bits), c.runs, c.seed])
    return buf.getvalue()


def curves_to_json(config: ExperimentConfig, curves, provenance=None) -> str:
    """Config, curves and any extra provenance entries as one JSON document."""
    doc = {"config": config.to_dict(), "curves": [c.to_dict() for c in curves]}
    if provenance:
        doc["provenance"] = dict(provenance)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def terminal(curve: BerCurve):
    """BER and per-run BER at the last point of a curve."""
    return float(curve.ber[-1]), curve.run_ber[-1]
