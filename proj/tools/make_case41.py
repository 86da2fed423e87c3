#!/usr/bin/env python3
"""Writes data/case41.json, the reconstructed 41-bus rural feeder.

The published line data for this feeder is not available, so impedances here
are representative 27.6 kV overhead values. Topology follows the demand-bus and
wind-bus sets of the original study; everything else is synthetic.

    python3 tools/make_case41.py > data/case41.json
"""
import json

BASE_MVA = 10.0

# (from, to, length_km, class) -- class "A" heavy trunk conductor, "B" lateral conductor.
SECTIONS = [
    (1, 2, 1.0, "A"), (2, 3, 1.2, "A"), (3, 4, 1.5, "A"), (4, 5, 1.0, "A"),
    (5, 6, 1.2, "A"), (6, 7, 1.0, "B"), (7, 8, 1.3, "B"), (8, 9, 1.0, "B"),
    (9, 10, 1.4, "B"), (10, 11, 1.0, "B"), (11, 12, 1.2, "B"), (12, 13, 1.0, "B"),
    (13, 14, 1.1, "B"),
    (3, 15, 1.5, "A"), (15, 16, 2.0, "A"), (16, 17, 1.0, "B"), (17, 18, 1.2, "B"),
    (18, 19, 1.0, "B"), (19, 20, 1.3, "B"), (20, 21, 1.0, "B"), (21, 22, 1.2, "B"),
    (22, 23, 1.0, "B"),
    (6, 24, 1.1, "B"), (24, 25, 1.0, "B"), (25, 26, 1.2, "B"), (26, 27, 1.0, "B"),
    (27, 28, 1.1, "B"), (28, 29, 1.0, "B"), (29, 30, 1.2, "B"), (30, 31, 1.0, "B"),
    (9, 32, 1.0, "B"), (32, 33, 1.2, "B"), (33, 34, 1.0, "B"), (34, 35, 1.1, "B"),
    (35, 36, 1.0, "B"), (36, 37, 1.2, "B"),
    (11, 38, 1.0, "B"), (38, 39, 1.1, "B"), (39, 40, 1.0, "B"), (40, 41, 1.2, "B"),
]

# Per-unit impedance per km on the 10 MVA / 27.6 kV base (Zbase = 76.18 ohm).
CONDUCTOR = {
    "A": {"r": 0.0016, "x": 0.0034, "b": 0.0009, "s_max": 18.0},
    "B": {"r": 0.0028, "x": 0.0040, "b": 0.0007, "s_max": 9.0},
}

# Peak active demand (MW); reactive peak follows a fixed Q/P ratio.
PEAK_P = {
    4: 0.85, 6: 0.90, 8: 0.80, 10: 0.85, 13: 0.75, 14: 0.70, 22: 2.00, 23: 2.00,
    25: 0.85, 27: 0.75, 30: 0.85, 31: 0.70, 34: 0.75, 36: 0.85, 37: 0.70, 41: 0.95,
}
Q_OVER_P = 2.46 / 6.65

STATIONS = [(2, 10.0), (16, 10.0)]


def main():
    buses = []
    for i in range(1, 42):
        bus = {"id": i, "kind": "slack" if i == 1 else "pq", "v_min": 0.95, "v_max": 1.05}
        if i in PEAK_P:
            bus["demand_peak_p"] = PEAK_P[i]
            bus["demand_peak_q"] = round(PEAK_P[i] * Q_OVER_P, 6)
        buses.append(bus)
    branches = []
    for f, t, km, cls in SECTIONS:
        c = CONDUCTOR[cls]
        branches.append({
            "from_bus": f, "to_bus": t,
            "resistance": round(c["r"] * km, 6), "reactance": round(c["x"] * km, 6),
            "shunt_susceptance_total": round(c["b"] * km, 6), "s_l_max": c["s_max"],
        })
    case = {
        "meta": {
            "name": "rural-41",
            "note": "reconstructed 41-bus 27.6 kV rural feeder; impedances are representative, not published data",
            "base_mva": BASE_MVA, "base_kv": 27.6, "s_s_max": 20.0,
        },
        "buses": buses,
        "branches": branches,
        "stations": [{"bus": b, "rated_power": p, "power_factor": 1.0} for b, p in STATIONS],
    }
    print(json.dumps(case, indent=2))


if __name__ == "__main__":
    main()
