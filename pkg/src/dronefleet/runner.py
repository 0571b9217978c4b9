"""Drive a controller against the simulator and collect per-slot traces."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .controllers import Controller
from .geography import District
from .scheduler import schedule
from .simcore import SimState, apply_allocation_moves, init_sim, observe, step_slot


@dataclass
class RunTraces:
    q: np.ndarray  # queue length, shape (D, horizon)
    n: np.ndarray  # allocated UAVs, shape (D, horizon)
    waits: list  # per PDC: (arrival_slot, wait) per dispatched package
    horizon_slots: int
    epoch_slots: int


def run_policy(
    district: District,
    processes: list,
    controller: Controller,
    initial_allocation: list[int],
    epoch_slots: int,
    horizon_slots: int,
    seed: int | np.random.SeedSequence,
    trace_path: str | None = None,
) -> RunTraces:
    """Run one fixed-policy episode of at least horizon_slots.

    The controller is consulted every epoch_slots slots; the horizon is
    rounded up to whole epochs.
    """
    if epoch_slots < 1 or horizon_slots < 1:
        raise ValueError("epoch and horizon must be positive")
    master = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    env_ss, sched_ss = master.spawn(2)
    sched_rng = np.random.default_rng(sched_ss)
    state = init_sim(district, processes, initial_allocation, env_ss, collect_waits=True)

    d = district.num_pdcs
    epochs = -(-horizon_slots // epoch_slots)
    horizon = epochs * epoch_slots
    q_trace = np.zeros((d, horizon), dtype=np.int64)
    n_trace = np.zeros((d, horizon), dtype=np.int64)

    writer = fh = None
    if trace_path is not None:
        fh = open(trace_path, "w", newline="")
        writer = csv.writer(fh)
        header = ["t"]
        for name in ("q", "n", "arrivals", "dispatches"):
            header += [f"{name}_{pdc}" for pdc in range(1, d + 1)]
        writer.writerow(header)

    try:
        slot = 0
        for epoch in range(epochs):
            obs = [observe(state, pdc) for pdc in range(1, d + 1)]
            deltas = controller.decide(epoch, obs)
            moves = schedule(state, deltas, sched_rng)
            apply_allocation_moves(state, moves)
            for _ in range(epoch_slots):
                arrived, dispatched = step_slot(state)
                for i in range(d):
                    q_trace[i, slot] = len(state.queues[i])
                n_trace[:, slot] = state.home_counts[1:]
                if writer is not None:
                    row = [slot]
                    row += [int(q_trace[i, slot]) for i in range(d)]
                    row += [int(n_trace[i, slot]) for i in range(d)]
                    row += arrived + dispatched
                    writer.writerow(row)
                slot += 1
    finally:
        if fh is not None:
            fh.close()

    return RunTraces(
        q=q_trace, n=n_trace, waits=state.waits, horizon_slots=horizon, epoch_slots=epoch_slots
    )
