"""Write the bundled reference-case fixtures under fixtures/reference/.

Only summary rates were published, so the raw files are synthetic:

* six centres whose daily arrivals average 536 (largest 722) and whose server
  counts average 5 (stage one) and 4 (stage two);
* exponential service durations rescaled so that the reciprocal of each
  stage's mean is 0.409 and 0.244 per minute;
* eight governorate clusters with the two reported counts and made-up counts
  for the remaining six that keep the reported total of 961,939.

Run from the repository root: ``python scripts/synthesize_reference_fixtures.py``.
"""

from pathlib import Path

import numpy as np

from tandemq.field_data import CenterRecord, ObservationSet, ServiceObservation, write_observations

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "reference"
SEED = 20210611
PER_STAGE = 1200

CENTERS = [
    # id, daily arrivals, stage-one servers, stage-two servers
    ("Roum", 722, 7, 6),
    ("AUBMC", 610, 6, 5),
    ("HDF", 575, 5, 4),
    ("Hariri", 520, 5, 4),
    ("Geitaoui", 440, 4, 3),
    ("Rizk", 349, 3, 2),
]

CLUSTERS = [
    ("Beirut", 339_408),
    ("Mount Lebanon", 215_914),
    ("North", 98_000),
    ("Akkar", 41_000),
    ("Bekaa", 72_000),
    ("Baalbek-Hermel", 45_000),
    ("South", 88_000),
    ("Nabatieh", 62_617),
]


def durations(rng, rate: float, size: int) -> list[float]:
    raw = rng.exponential(1.0 / rate, size)
    scaled = raw * ((1.0 / rate) / raw.mean())
    return [float(round(x, 12)) for x in scaled]


def main() -> None:
    rng = np.random.default_rng(SEED)
    centers = [CenterRecord(*row) for row in CENTERS]
    weights = np.array([c.daily_arrivals for c in centers], dtype=float)
    observations = []
    for stage, rate in ((1, 0.409), (2, 0.244)):
        owners = rng.choice(len(centers), size=PER_STAGE, p=weights / weights.sum())
        for owner, d in zip(owners, durations(rng, rate, PER_STAGE)):
            observations.append(ServiceObservation(centers[owner].center_id, stage, d))
    OUT.mkdir(parents=True, exist_ok=True)
    write_observations(ObservationSet(centers, observations), OUT / "centers.csv", OUT / "observations.csv")
    with open(OUT / "clusters.csv", "w", encoding="utf-8") as fh:
        fh.write("cluster,vaccinated_count\n")
        for name, count in CLUSTERS:
            fh.write(f"{name},{count}\n")


if __name__ == "__main__":
    main()
