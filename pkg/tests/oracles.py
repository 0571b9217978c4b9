"""Independent reference implementations used to cross-check the package.

Everything here is written long-hand from the documented rules, on purpose:
plain loops over the raw fleet list, no shared helpers with the production
code beyond the data types themselves.
"""

import math
from collections import deque

import numpy as np

from dronefleet.arrivals import BatchSpec, BernoulliArrivals
from dronefleet.simcore import SimState, Uav, UavState


def build_state(district, uavs, t=0):
    """Assemble a consistent SimState around a hand-made fleet."""
    d = district.num_pdcs
    fleet = sorted(uavs, key=lambda u: u.uav_id)
    assert [u.uav_id for u in fleet] == list(range(len(fleet)))
    idle = [[] for _ in range(d + 1)]
    counts = np.zeros(d + 1, dtype=np.int64)
    for uav in fleet:
        counts[uav.home] += 1
        if uav.state == UavState.IDLE:
            idle[uav.home].append(uav.uav_id)
    procs = [
        BernoulliArrivals(p=0.0, truck_interval=30, batch=BatchSpec(1, 0)) for _ in range(d)
    ]
    return SimState(
        district=district,
        processes=procs,
        fleet=fleet,
        queues=[deque() for _ in range(d)],
        idle=idle,
        home_counts=counts,
        arrival_rngs=[np.random.default_rng(i) for i in range(d)],
        dest_rngs=[np.random.default_rng(100 + i) for i in range(d)],
        t=t,
        waits=[[] for _ in range(d)],
    )


def replay_schedule(state, requests, rng):
    """Step-by-step replay of the swap routine.

    Donor collection: every PDC asked to shed gives up idle UAVs first
    (lowest id), then returning ones (most recent delivery first), then
    delivering ones (earliest mission start first); when overall demand is
    positive the port contributes up to that many idle UAVs. Assignment:
    needy PDCs drawn uniformly at random one at a time, each taking its
    nearest donors by remaining flight plus pickup distance (ties on id);
    leftovers park at the port.
    """
    district = state.district
    d = district.num_pdcs
    t = state.t
    mps = district.meters_per_slot

    donors = []  # (uav_id, pickup_xy, extra_flight_m)
    for pdc in range(1, d + 1):
        owe = -requests[pdc - 1]
        if owe <= 0:
            continue
        loc = district.location_of(pdc)
        idle_ids = sorted(
            u.uav_id for u in state.fleet if u.home == pdc and u.state == UavState.IDLE
        )
        for uid in idle_ids[:owe]:
            donors.append((uid, loc, 0.0))
        owe -= min(owe, len(idle_ids))
        if owe > 0:
            rets = [u for u in state.fleet if u.home == pdc and u.state == UavState.RETURNING]
            rets.sort(key=lambda u: (-u.last_delivery_slot, u.uav_id))
            for u in rets[:owe]:
                donors.append((u.uav_id, loc, 0.0))
            owe -= min(owe, len(rets))
        if owe > 0:
            dels = [u for u in state.fleet if u.home == pdc and u.state == UavState.DELIVERING]
            dels.sort(key=lambda u: (u.mission_start_slot, u.uav_id))
            for u in dels[:owe]:
                left = max(0, u.eta_slot - t) * mps
                donors.append((u.uav_id, u.destination, left))

    demand = sum(requests)
    if demand > 0:
        port_ids = sorted(
            u.uav_id for u in state.fleet if u.home == 0 and u.state == UavState.IDLE
        )
        for uid in port_ids[:demand]:
            donors.append((uid, district.port_location, 0.0))

    moves = []
    pool = list(donors)
    needy = [p for p in range(1, d + 1) if requests[p - 1] > 0]
    while needy and pool:
        pick = int(rng.integers(len(needy)))
        pdc = needy[pick]
        del needy[pick]
        loc = district.location_of(pdc)
        scored = sorted(
            pool,
            key=lambda e: (e[2] + math.hypot(e[1][0] - loc[0], e[1][1] - loc[1]), e[0]),
        )
        for entry in scored[: min(requests[pdc - 1], len(pool))]:
            moves.append((entry[0], pdc))
            pool.remove(entry)
    for entry in pool:
        moves.append((entry[0], 0))
    return moves


def random_fleet_instance(district, rng, max_uavs=14):
    """Random mixed-status fleet plus signed requests, for equivalence runs."""
    d = district.num_pdcs
    n = int(rng.integers(4, max_uavs + 1))
    t = int(rng.integers(0, 200))
    uavs = []
    for uid in range(n):
        home = int(rng.integers(0, d + 1))
        kind = rng.random()
        if home == 0 or kind < 0.4:
            uavs.append(Uav(uav_id=uid, home=home, state=UavState.IDLE))
        elif kind < 0.6:
            uavs.append(
                Uav(
                    uav_id=uid,
                    home=home,
                    state=UavState.RETURNING,
                    eta_slot=t + int(rng.integers(1, 20)),
                    last_delivery_slot=int(rng.integers(-1, t + 1)),
                )
            )
        elif kind < 0.85:
            region = district.regions[int(rng.integers(0, d))]
            sub = region.subregions[0]
            dest = (
                float(rng.uniform(sub.min_corner[0], sub.max_corner[0])),
                float(rng.uniform(sub.min_corner[1], sub.max_corner[1])),
            )
            uavs.append(
                Uav(
                    uav_id=uid,
                    home=home,
                    state=UavState.DELIVERING,
                    destination=dest,
                    eta_slot=t + int(rng.integers(0, 20)),
                    mission_start_slot=int(rng.integers(0, t + 1)),
                )
            )
        elif kind < 0.95:
            uavs.append(Uav(uav_id=uid, home=home, state=UavState.SWAP, ready_slot=t + 1))
        else:
            uavs.append(
                Uav(
                    uav_id=uid,
                    home=home,
                    state=UavState.RELOCATING,
                    eta_slot=t + int(rng.integers(1, 10)),
                )
            )
    requests = [int(rng.integers(-3, 4)) for _ in range(d)]
    return build_state(district, uavs, t=t), requests
