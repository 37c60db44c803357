"""Export golden hand-frame fixtures for the frontend's parametric model.

Writes 20 parameter points (curls, spreads, palm length) with the exact
joint coordinates the Python generator produces, so the TypeScript port can
be checked against them at 1e-9.

Run:  python scripts/export_golden_hands.py
"""

import json
from pathlib import Path

import numpy as np

from signum.synthdata import canonical_hand

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "golden_hands.json"


def main() -> None:
    rng = np.random.default_rng(424242)
    points = [
        {"curl": [0.0] * 5, "spread": [0.0] * 5, "palm": 0.09},
        {"curl": [1.0] * 5, "spread": [0.0] * 5, "palm": 0.09},
        {"curl": [0.0, 1.0, 0.0, 1.0, 0.0], "spread": [0.3, -0.3, 0.3, -0.3, 0.3],
         "palm": 0.11},
    ]
    while len(points) < 20:
        points.append({
            "curl": [float(v) for v in rng.uniform(0.0, 1.0, 5)],
            "spread": [float(v) for v in rng.uniform(-0.5, 0.5, 5)],
            "palm": float(rng.uniform(0.07, 0.12)),
        })
    fixtures = []
    for p in points:
        hand = canonical_hand(p["curl"], p["spread"], p["palm"])
        fixtures.append({**p, "joints": [[float(c) for c in row]
                                         for row in hand.joints]})
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixtures, indent=1) + "\n")
    print(f"wrote {len(fixtures)} fixtures to {OUT}")


if __name__ == "__main__":
    main()
