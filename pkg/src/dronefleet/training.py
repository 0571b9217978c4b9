"""Episodic trainer: one agent per PDC, a shared simulator, a shared clock.

Every decision epoch each agent observes its own (n_d, q_d), all actions go
through the central scheduler together, the simulator advances one epoch,
and each agent stores its transition and takes one minibatch step. Episodes
end at a step cap (truncation, bootstrapping continues) or when any queue
saturates (terminal).
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from .network import adam_step, batch_gradient, copy_network, init_adam, init_network
from .rlagent import (
    NUM_ACTIONS,
    EpsilonSchedule,
    ReplayBuffer,
    RewardParams,
    action_delta,
    compute_reward,
    ddqn_targets_batch,
    encode_state,
    epsilon_at,
    select_action,
)
from .scheduler import schedule
from .simcore import apply_allocation_moves, init_sim, observe, step_slot

logger = logging.getLogger(__name__)

STATE_SIZE = 25


@dataclass
class TrainConfig:
    episodes: int
    max_steps_per_episode: int = 1000
    gamma: float = 0.99
    batch_size: int = 25
    buffer_capacity: int = 1_000_000
    min_buffer: int = 1000
    target_update_episodes: int = 5
    learning_rate: float = 0.001
    eps_start: float = 0.5
    eps_end: float = 0.05
    eps_decay_fraction: float = 0.8
    saturation_cutoff: int = 2000
    hidden_sizes: tuple = (32, 32)


@dataclass
class TrainResult:
    nets: list
    curve: list  # one dict per episode
    train_steps: int


@dataclass
class _Agent:
    net: object
    target: object
    adam: object
    buffer: ReplayBuffer
    action_rng: np.random.Generator
    replay_rng: np.random.Generator


def train(scenario, cfg: TrainConfig, seed: int) -> TrainResult:
    """Train one agent per PDC; returns the online nets and learning curve.

    `scenario` supplies the district, fresh arrival processes, reward
    parameters, queue bounds, action delta and initial allocation (see
    configs.ExperimentConfig).
    """
    district = scenario.district
    d = district.num_pdcs
    reward_params: RewardParams = scenario.reward
    epoch_slots = reward_params.epoch_slots
    bounds = scenario.queue_bounds

    master = np.random.SeedSequence(seed)
    agents: list[_Agent] = []
    layer_sizes = [STATE_SIZE, *cfg.hidden_sizes, NUM_ACTIONS]
    for agent_ss in master.spawn(d):
        init_ss, action_ss, replay_ss = agent_ss.spawn(3)
        net = init_network(layer_sizes, np.random.default_rng(init_ss))
        agents.append(
            _Agent(
                net=net,
                target=copy_network(net),
                adam=init_adam(net, lr=cfg.learning_rate),
                buffer=ReplayBuffer(cfg.buffer_capacity),
                action_rng=np.random.default_rng(action_ss),
                replay_rng=np.random.default_rng(replay_ss),
            )
        )
    sched_rng = np.random.default_rng(master.spawn(1)[0])

    sched = EpsilonSchedule(
        total_steps=cfg.episodes * cfg.max_steps_per_episode,
        start=cfg.eps_start,
        end=cfg.eps_end,
        decay_fraction=cfg.eps_decay_fraction,
    )
    learn_after = max(cfg.min_buffer, cfg.batch_size)
    window = deque(maxlen=10)  # (over_slots, total_slots) per recent episode
    curve = []
    global_step = 0
    q_window = np.zeros((d, epoch_slots), dtype=np.int64)

    for episode in range(cfg.episodes):
        state = init_sim(
            district,
            scenario.make_processes(),
            scenario.initial_allocation_counts(),
            master.spawn(1)[0],
        )
        reward_total = 0.0
        over_ge = 0
        steps = 0
        eps = epsilon_at(global_step, sched)

        for _ in range(cfg.max_steps_per_episode):
            eps = epsilon_at(global_step, sched)
            obs = [observe(state, pdc) for pdc in range(1, d + 1)]
            encoded = [encode_state(n, q) for n, q in obs]
            actions = [
                select_action(agent.net, enc, eps, agent.action_rng)
                for agent, enc in zip(agents, encoded)
            ]
            deltas = [action_delta(a, scenario.delta) for a in actions]
            moves = schedule(state, deltas, sched_rng)
            apply_allocation_moves(state, moves)
            held = [int(state.home_counts[pdc]) for pdc in range(1, d + 1)]

            for slot in range(epoch_slots):
                step_slot(state)
                for i in range(d):
                    q_window[i, slot] = len(state.queues[i])

            saturated = bool((q_window > cfg.saturation_cutoff).any())
            next_obs = [observe(state, pdc) for pdc in range(1, d + 1)]
            next_encoded = [encode_state(n, q) for n, q in next_obs]
            for i, agent in enumerate(agents):
                r = compute_reward(q_window[i], bounds[i], held[i], reward_params)
                reward_total += r
                agent.buffer.push(encoded[i], actions[i], r, next_encoded[i], saturated)
            over_ge += int((q_window >= np.asarray(bounds)[:, None]).sum())

            for agent in agents:
                if len(agent.buffer) >= learn_after:
                    batch = agent.buffer.sample(cfg.batch_size, agent.replay_rng)
                    states, acts, rewards, next_states, dones = batch
                    targets = ddqn_targets_batch(
                        rewards, next_states, dones, agent.net, agent.target, cfg.gamma
                    )
                    grads_w, grads_b = batch_gradient(agent.net, states, acts, targets)
                    adam_step(agent.adam, agent.net, grads_w, grads_b)

            global_step += 1
            steps += 1
            if saturated:
                break

        window.append((over_ge, steps * epoch_slots * d))
        over, total = map(sum, zip(*window))
        curve.append(
            {
                "episode": episode,
                "steps": steps,
                "avg_reward": reward_total / (steps * d),
                "violation_window": over / total,
                "epsilon": eps,
            }
        )
        if (episode + 1) % cfg.target_update_episodes == 0:
            for agent in agents:
                agent.target = copy_network(agent.net)
        logger.info(
            "episode %d: steps=%d avg_reward=%.2f violation=%.3f eps=%.3f",
            episode,
            steps,
            curve[-1]["avg_reward"],
            curve[-1]["violation_window"],
            eps,
        )

    return TrainResult(nets=[a.net for a in agents], curve=curve, train_steps=global_step)
