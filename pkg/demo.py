"""
braidtrack - Demo Script

This script walks through the worked examples: the cusp, a curve with two
branch points, the introductory triangle loop and a five-line arrangement.

USAGE:
    python demo.py

    # Only the introductory triangle:
    python demo.py --triangle-only
"""

import argparse
import asyncio

from braidtrack.catalog import example_arrangement, example_loop, example_poly
from braidtrack.braid import format_word
from braidtrack.engine import create_engine, cross_locus, loop_braid
from braidtrack.render import render


async def run_demo(seed: int = 0):
    """Generators for the catalog curves and the five-line arrangement."""
    print("=" * 60)
    print("BRAIDTRACK - DEMO")
    print("=" * 60)
    print()

    engine = create_engine(seed=seed)

    for name in ("intro", "two-branch", "not-generated"):
        f = example_poly(name)
        print(f"--- {name.upper()} ---")
        result = await engine.arun_curve(f)
        if result["status"] != "completed":
            print(f"  failed: {result['message']}")
            continue
        report = result["result"]
        for g in report["generators"]:
            print(f"  t = {g['branch_point']}  core: {g['core'] or '(identity)'}  perm: {g['perm']}")
        print(f"  monodromy order: {report['monodromy']['order']}")
        print()

    print("--- HYPER8 ---")
    result = await engine.arun_arrangement(example_arrangement("hyper8", seed))
    if result["status"] == "completed":
        cores = [g["core"] for g in result["result"]["generators"]]
        print(f"  {len(cores)} generators")
        for core in cores:
            print(f"  core: {core or '(identity)'}")
    print()

    status = engine.get_status()
    print(f"Runs: {status['runs']}  completed: {status['completed']}  failed: {status['failed']}")
    print("=" * 60)
    print("DEMO COMPLETE")
    print("=" * 60)


def run_triangle_demo():
    """The cusp z^3 = t^2 over a triangle around the origin."""
    print("TRIANGLE LOOP")
    print("-" * 40)
    report = loop_braid(example_poly("triangle"), example_loop("triangle"))
    print(f"word: {format_word(report.word)}")
    print(f"crossing moduli: {[round(abs(t), 3) for t in cross_locus(report)]}")
    print(render(report.word, "ascii"))


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(description="braidtrack demo")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--triangle-only", action="store_true", help="run only the triangle loop")
    args = parser.parse_args()

    if args.triangle_only:
        run_triangle_demo()
    else:
        run_triangle_demo()
        print()
        asyncio.run(run_demo(args.seed))


if __name__ == "__main__":
    main()
