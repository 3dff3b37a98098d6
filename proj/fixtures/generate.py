#!/usr/bin/env python3
"""Regenerates the JSON fixtures in this directory.

Demand matrices are synthetic: per-origin outbound totals follow a
mid-route hump, split uniformly over downstream stops.
"""
import json
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))


def demand_matrix(n_stops, total_pax_per_hour, front=0.0, max_hop=None):
    """Origin totals decay exp(-front*i); trips span 1..max_hop stops with
    1/hop weights. Uniform downstream split when max_hop is None."""
    weights = []
    for i in range(n_stops):
        w = math.exp(-front * i)
        weights.append(w if i < n_stops - 1 else 0.0)
    scale = total_pax_per_hour / sum(weights)
    rates = [[0.0] * n_stops for _ in range(n_stops)]
    for i in range(n_stops - 1):
        row_total = weights[i] * scale
        if max_hop is None:
            downstream = n_stops - 1 - i
            for j in range(i + 1, n_stops):
                rates[i][j] = round(row_total / downstream, 3)
        else:
            hops = [h for h in range(1, max_hop + 1) if i + h < n_stops]
            hopsum = sum(1.0 / h for h in hops)
            for h in hops:
                rates[i][i + h] = round(row_total * (1.0 / h) / hopsum, 3)
    return rates


def route(name, stops_km, services, headway_mean, headway_std, demand_total,
          horizon_s=14400, agent=None, trainer=None, scenario=None,
          front=0.0, max_hop=None):
    cfg = {
        "name": name,
        "route": {
            "stops_km": [round(p, 4) for p in stops_km],
            "services": services,
            "headway_mean_s": headway_mean,
            "headway_std_s": headway_std,
        },
        "demand": {"rates_pax_per_hour": demand_matrix(len(stops_km),
                                                       demand_total, front,
                                                       max_hop)},
        "sim": {
            "t_a": 1.8,
            "t_b": 3.0,
            "v_kmh": 30,
            "speed_noise": [0.6, 1.2],
            "capacity": 120,
            "tick_s": 1,
            "horizon_s": horizon_s,
        },
    }
    if scenario:
        cfg["scenario"] = scenario
    if agent:
        cfg["agent"] = agent
    if trainer:
        cfg["trainer"] = trainer
    return cfg


def even_stops(length_km, n_stops):
    return [i * length_km / (n_stops - 1) for i in range(n_stops)]


def write(name, cfg):
    path = os.path.join(HERE, name)
    with open(path, "w") as f:
        json.dump(cfg, f, indent=1)
        f.write("\n")
    print("wrote", path)


desk_agent = {
    "variant": "nc",
    "K": 32,
    "K_prime": 32,
    "kappa": 1.0,
    "gamma": 0.99,
    "alpha_a": 1e-2,
    "alpha_c": 1e-3,
    "alpha_m": 1e-3,
    "target_mix": 0.005,
    "buffer_B": 512,
    "minibatch": 64,
    "buffer_capacity": 20000,
    "max_hold_s": 180,
    "reward_w": 0.2,
    "noise_std": 0.1,
    "hidden": 64,
    "n_cos": 64,
    "attn_dim": 32,
    # deadband catch-up rule tuned to the projected (dwell-free) headways
    "fh": {"h0_s": 240, "d_bar_s": 0, "gain": 1.0},
}

DESK = dict(stops_km=even_stops(13.5, 10), services=4, headway_mean=420,
            headway_std=160, demand_total=1000, front=0.30, max_hop=3)


def desk_route_cfg(name, agent, trainer=None, scenario=None):
    return route(name, DESK["stops_km"], DESK["services"],
                 DESK["headway_mean"], DESK["headway_std"],
                 DESK["demand_total"], agent=agent, trainer=trainer,
                 scenario=scenario, front=DESK["front"],
                 max_hop=DESK["max_hop"])


write(
    "desk_route.json",
    desk_route_cfg("desk", desk_agent,
                   trainer={"episodes": 300, "updates_per_episode": 8,
                            "seed": 1},
                   scenario={"sigma_d": 1.0, "sigma_s": 0.1,
                             "resample_per_episode": False}),
)

# training variant: per-episode sigma sampling over the full ranges
write(
    "desk_train.json",
    desk_route_cfg("desk", dict(desk_agent, variant="iqnc-n"),
                   trainer={"episodes": 300, "updates_per_episode": 8,
                            "seed": 1},
                   scenario={"resample_per_episode": True,
                             "sigma_d_range": [0.0, 3.0],
                             "sigma_s_range": [0.0, 0.3]}),
)

write("r1.json", route("r1", even_stops(17.4, 46), 59, 874, 302, 1800))
write("r2.json", route("r2", even_stops(23.7, 58), 72, 745, 307, 2100))
write("r3.json", route("r3", even_stops(23.2, 61), 57, 931, 354, 1900))
write("r4.json", route("r4", even_stops(22.5, 46), 55, 955, 351, 1700))

with open(os.path.join(HERE, "sweep_desk.json"), "w") as f:
    json.dump(
        {
            "route_files": ["fixtures/desk_route.json"],
            "agents": [{"variant": "nc"}, {"variant": "fh"}],
            "sigma_s_grid": [0.1, 0.2, 0.3],
            "sigma_d_fixed": 1.0,
            "sigma_d_grid": [1.0, 2.0, 3.0],
            "sigma_s_fixed": 0.1,
            "seeds": 5,
        },
        f,
        indent=1,
    )
    f.write("\n")
print("wrote sweep_desk.json")
