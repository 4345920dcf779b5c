#!/usr/bin/env python3
"""End-to-end shipping experiment: generate, mine, export, summarize."""

import argparse
import sys
import time
from pathlib import Path

from ocdm import (
    MiningConfig,
    ShippingParams,
    generate_shipping_log,
    mine_dmn_models,
    write_docel,
)
from ocdm.cli import write_artifacts
from ocdm.export import model_rules


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out/shipping")
    parser.add_argument("--orders", type=int, default=150)
    parser.add_argument("--customers", type=int, default=50)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--min-corr", type=float, default=0.1)
    args = parser.parse_args()

    out = Path(args.out)
    params = ShippingParams(
        num_orders=args.orders, num_customers=args.customers, rng_seed=args.seed
    )
    log = generate_shipping_log(params)
    write_docel(log, out / "log")
    print(f"generated {len(log.events)} events over {len(log.objects)} objects")

    config = MiningConfig(min_corr=args.min_corr, rng_seed=args.seed)
    started = time.monotonic()
    drds = mine_dmn_models(log, config)
    print(f"mined {len(drds)} diagrams in {time.monotonic() - started:.1f}s")

    (out / "mined").mkdir(parents=True, exist_ok=True)
    write_artifacts(drds, out / "mined", {"seed": args.seed, "min_corr": args.min_corr})

    for drd in drds:
        print(f"\n{drd.top.describe()} ({len(drd.trace_set.object_ids)} traces)")
        for (source, target), support in sorted(drd.edges.items()):
            score = drd.correlations[(source, target)]
            print(f"  {source.label} [{source.object_type}] -> {target.label}"
                  f"  [{support} objects, corr {score:.3f}]")
        for node, model in sorted(drd.models.items()):
            print(f"  rules for {node.label} (cv accuracy {model.accuracy:.3f}):")
            for rule in model_rules(model):
                print(f"    {rule.describe()}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
