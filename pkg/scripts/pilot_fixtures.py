"""
Brute-force pilot runs that freeze reference values into tests/fixtures/pilot.json.

Nothing here calls the package's grid or stepping code: coupling values are
evaluated cell by cell with the ``math`` module, and walks are propagated
with dense Kronecker-product operators.

    python scripts/pilot_fixtures.py
"""

import json
import math
from pathlib import Path

import numpy as np
from scipy.linalg import block_diag

M = 256
OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "pilot.json"


def phi(t1, t2, k):
    return math.atan2(math.cos(k) * math.sin(t1) * math.cos(t2) + math.sin(t2) * math.cos(t1),
                      math.sin(k) * math.sin(t1) * math.cos(t2))


def intensity_row_maxima(t1, t2, sign):
    ks = [-math.pi + 2 * math.pi * j / M for j in range(M)]
    ph = [phi(t1, t2, k) for k in ks]
    counts = []
    for a in range(M):
        row = []
        for b in range(M):
            total = abs(ph[a] + sign * ph[b])
            re = math.cos(total) + 1.0
            im = -math.sin(total)
            row.append(re * re + im * im)
        counts.append(sum(1 for j in range(M) if row[j] > row[j - 1] and row[j] > row[(j + 1) % M]))
    return counts


def coin(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def dense_half_step(theta1_of_x, theta2, half_width):
    n = 2 * half_width + 1
    xs = range(-half_width, half_width + 1)
    proj_h = np.diag([1.0, 0.0])
    proj_v = np.diag([0.0, 1.0])
    right = np.eye(n, k=-1)
    left = np.eye(n, k=1)
    t_h = np.kron(right, proj_h) + np.kron(np.eye(n), proj_v)
    t_v = np.kron(np.eye(n), proj_h) + np.kron(left, proj_v)
    r1 = block_diag(*[coin(theta1_of_x(x)) for x in xs])
    r2 = block_diag(*[coin(theta2) for _ in xs])
    return t_h @ r1 @ t_v @ r2


def retained_fraction(theta1_of_x, theta2, steps=100, radius=5):
    L = 2 * steps + 3
    u = dense_half_step(theta1_of_x, theta2, L)
    psi = np.zeros(2 * (2 * L + 1), dtype=complex)
    psi[2 * L] = 1 / math.sqrt(2)
    psi[2 * L + 1] = 1j / math.sqrt(2)
    for _ in range(steps):
        psi = u @ psi
    prob = (np.abs(psi) ** 2).reshape(-1, 2).sum(axis=1)
    x = np.arange(-L, L + 1)
    return float(prob[np.abs(x) <= radius].sum())


def main():
    fig2a = intensity_row_maxima(0.01, 9 * math.pi / 20, +1)
    fig2b = intensity_row_maxima(0.01, 0.001, +1)
    fixtures = {
        "grid_maxima": {
            "num_k": M,
            "fig2a_row_counts": fig2a,
            "fig2b_row_counts": fig2b,
        },
        "bound_state": {
            "steps": 100,
            "radius": 5,
            "threshold": 0.1,
            "boundary_m04_p04_t2_02": retained_fraction(lambda x: -0.4 if x < 0 else 0.4, 0.2),
            "homogeneous_04_02": retained_fraction(lambda x: 0.4, 0.2),
            "boundary_m04_p005_t2_02": retained_fraction(lambda x: -0.4 if x < 0 else 0.05, 0.2),
            "homogeneous_005_02": retained_fraction(lambda x: 0.05, 0.2),
        },
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixtures, indent=1) + "\n")
    print(f"wrote {OUT}")
    for key, value in fixtures["bound_state"].items():
        print(f"  {key}: {value}")


if __name__ == "__main__":
    main()
