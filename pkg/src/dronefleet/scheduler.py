"""Central swap scheduler turning per-PDC count requests into UAV moves.

Requests are signed deltas: a PDC asking for a < 0 gives up UAVs, a > 0
wants more. Donors are collected from the deficit PDCs (idle first, then
returning, then delivering) plus, when the district as a whole is short,
idle UAVs from the port. Needy PDCs are then served one at a time in random
order, each taking its nearest donors. Whatever is left over is parked at
the port; unmet demand is dropped until a later decision epoch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geography import Point, distance
from .simcore import SimState, UavState

IDLE = "idle"
RETURNING = "returning"
DELIVERING = "delivering"


@dataclass(frozen=True)
class DonorEntry:
    uav_id: int
    pickup: Point
    category: str
    # distance still to fly before the pickup point (delivering donors
    # finish their drop first)
    approach_m: float = 0.0


def form_donor_set(state: SimState, requests: list[int]) -> list[DonorEntry]:
    """Collect donors from every deficit PDC, then the port if still short.

    Deficit PDCs give up idle UAVs first (lowest id), then returning ones
    (most recent delivery first), then delivering ones (earliest mission
    start first). A PDC holding fewer movable UAVs than it owes simply
    donates everything it has.
    """
    d = state.num_pdcs()
    if len(requests) != d:
        raise ValueError("one request per PDC")
    district = state.district
    donors: list[DonorEntry] = []

    returning: list[list] = [[] for _ in range(d + 1)]
    delivering: list[list] = [[] for _ in range(d + 1)]
    for uav in state.fleet:
        if uav.state == UavState.RETURNING:
            returning[uav.home].append(uav)
        elif uav.state == UavState.DELIVERING:
            delivering[uav.home].append(uav)

    mps = district.meters_per_slot
    for pdc in range(1, d + 1):
        need = -requests[pdc - 1]
        if need <= 0:
            continue
        here = district.location_of(pdc)
        for uid in state.idle[pdc][:need]:
            donors.append(DonorEntry(uav_id=uid, pickup=here, category=IDLE))
        need -= min(need, len(state.idle[pdc]))
        if need > 0:
            pool = sorted(returning[pdc], key=lambda u: (-u.last_delivery_slot, u.uav_id))
            for uav in pool[:need]:
                donors.append(DonorEntry(uav_id=uav.uav_id, pickup=here, category=RETURNING))
            need -= min(need, len(pool))
        if need > 0:
            pool = sorted(delivering[pdc], key=lambda u: (u.mission_start_slot, u.uav_id))
            for uav in pool[:need]:
                remaining = max(0, uav.eta_slot - state.t) * mps
                donors.append(
                    DonorEntry(
                        uav_id=uav.uav_id,
                        pickup=uav.destination,
                        category=DELIVERING,
                        approach_m=remaining,
                    )
                )

    total = sum(requests)
    if total > 0:
        port = district.port_location
        for uid in state.idle[0][:total]:
            donors.append(DonorEntry(uav_id=uid, pickup=port, category=IDLE))
    return donors


def assign_donors(
    state: SimState,
    donors: list[DonorEntry],
    requests: list[int],
    rng: np.random.Generator,
) -> list[tuple[int, int]]:
    """Match donors to needy PDCs, nearest first; leftovers go to the port.

    Needy PDCs are picked uniformly at random one by one (a single
    rng.integers call each), so no PDC is systematically served first.
    """
    district = state.district
    needy = [pdc for pdc in range(1, state.num_pdcs() + 1) if requests[pdc - 1] > 0]
    pool = list(donors)
    moves: list[tuple[int, int]] = []
    while needy and pool:
        pdc = needy.pop(int(rng.integers(len(needy))))
        here = district.location_of(pdc)
        ranked = sorted(pool, key=lambda e: (e.approach_m + distance(e.pickup, here), e.uav_id))
        take = min(requests[pdc - 1], len(pool))
        for entry in ranked[:take]:
            moves.append((entry.uav_id, pdc))
            pool.remove(entry)
    for entry in pool:
        moves.append((entry.uav_id, 0))
    return moves


def schedule(
    state: SimState, requests: list[int], rng: np.random.Generator
) -> list[tuple[int, int]]:
    """Full decision epoch: form the donor set, then assign it."""
    donors = form_donor_set(state, requests)
    return assign_donors(state, donors, requests, rng)
