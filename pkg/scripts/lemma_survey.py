"""Run the tail-lemma battery over the whole distribution catalog.

Members outside the power-tail Gumbel class (lognormal, uniform01) are
included on purpose so the survey shows what a violation report looks like.
"""

from mdlab import lemma_battery, parse_dist_spec

CATALOG = [
    "exponential:1",
    "exponential:2.5",
    "weibull:1",
    "weibull:2",
    "weibull:3",
    "std_normal",
    "logistic",
    "gamma:2",
    "lognormal",
    "uniform01",
]


def main() -> int:
    failures = 0
    for spec in CATALOG:
        battery = lemma_battery(parse_dist_spec(spec))
        mu = "none" if battery.mu is None else f"{battery.mu:g}"
        print(f"{battery.dist:<18} mu {mu:<6} "
              f"mda {'ok' if battery.mda_ok else 'VIOLATION'}")
        for check in battery.checks:
            print(f"    {'PASS' if check.ok else 'FAIL'} {check.name}: {check.detail}")
        if not battery.ok:
            failures += 1
    print(f"\n{len(CATALOG) - failures}/{len(CATALOG)} members pass the battery")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
