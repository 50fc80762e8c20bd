"""Scenario documents shipped with the package."""

# Three cycles of lengths 3, 4, 3.  The first subprogram overflows its
# capacities, so it runs in ignore mode; the others are capped.
THREE_CYCLE = {
    "name": "three-cycle",
    "network": {"m": 3, "cycle_lengths": [3, 4, 3]},
    "subprograms": [
        {"capacities": [2, 3, 2], "ell": 2, "initial": {"fixed": 3}, "iterations": 1,
         "capacity_mode": "ignore"},
        {"capacities": [3, 5, 5, 0], "ell": 0, "initial": {"fixed": 0}, "iterations": 1},
        {"capacities": [3, 3, 3], "ell": 1, "initial": {"fixed": 1}, "iterations": 1},
    ],
    "desired_outputs": [1, 2, 3],
    "policy": {
        "capacity_mode": "cap",
        "beta_adds": True,
        "strict_stitching": False,
        "magnitude_rule": "exact",
        "require_subsequent": True,
        "kernel_mode": "absolute",
        "noise_threshold": 1,
    },
    "seed": 0,
}

# Same network with randomised initial dimensions, for instance-to-instance comparison.
NOISY_DELIVERY = {
    "name": "noisy-delivery",
    "network": {"m": 5, "cycle_lengths": [3, 4, 3, 5, 4]},
    "subprograms": [
        {"capacities": [9, 9, 9], "ell": 1, "initial": {"uniform": {"lo": 0, "hi": 4}}, "iterations": 2},
        {"capacities": [6, 6, 6, 6], "ell": 0, "initial": {"uniform": {"lo": 0, "hi": 6}}, "iterations": 1},
        {"capacities": [8, 8, 8], "ell": 2, "initial": {"uniform": {"lo": 0, "hi": 2}}, "iterations": 1},
        {"capacities": [12, 12, 12, 12, 12], "ell": 1, "initial": {"uniform": {"lo": 0, "hi": 5}}, "iterations": 1},
        {"capacities": [7, 7, 7, 7], "ell": 1, "initial": {"uniform": {"lo": 0, "hi": 4}}, "iterations": 1},
    ],
    "desired_outputs": [6, 4, 5, 6, 5],
    "policy": {"capacity_mode": "cap", "magnitude_rule": "exact", "kernel_mode": "absolute"},
    "seed": 20240501,
}
