"""Regenerate the bundled synthetic price fixtures.

The files are synthetic geometric random walks whose daily drift and
volatility roughly follow the published 2018-2023 summary table. They are
stand-ins for real market data, which is not redistributed.

    python tools/make_fixtures.py src/coalition_attrition/casestudy/data
"""

import datetime as dt
import sys
from pathlib import Path

import numpy as np

# asset: (daily mean, daily std, start price, first date, trades on weekends)
ASSETS = {
    "bitcoin": (0.0027, 0.0401, 13_500.0, dt.date(2018, 1, 1), True),
    "ethereum": (0.0013, 0.0264, 750.0, dt.date(2018, 1, 1), True),
    "solana": (0.0043, 0.0535, 0.95, dt.date(2020, 4, 10), True),
    "gold": (0.0002, 0.0096, 1_300.0, dt.date(2018, 1, 2), False),
    "copper": (0.0007, 0.0153, 3.2, dt.date(2018, 1, 2), False),
    "brent": (0.0093, 0.0919, 66.0, dt.date(2018, 1, 2), False),
}
END = dt.date(2023, 12, 31)
SEED = 20180101


def main(out_dir: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    for asset, (mu, sigma, p0, start, weekends) in ASSETS.items():
        days = [start + dt.timedelta(d) for d in range((END - start).days + 1)]
        if not weekends:
            days = [d for d in days if d.weekday() < 5]
        returns = rng.normal(mu, sigma, len(days) - 1)
        prices = p0 * np.concatenate([[1.0], np.cumprod(1.0 + np.clip(returns, -0.9, None))])
        with (out / f"{asset}.csv").open("w", encoding="utf-8", newline="") as fh:
            fh.write("date,close\n")
            for d, p in zip(days, prices):
                fh.write(f"{d.isoformat()},{p:.6g}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/coalition_attrition/casestudy/data")
