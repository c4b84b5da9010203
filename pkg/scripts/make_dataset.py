#!/usr/bin/env python3
"""Generate a synthetic stream CSV in the wear-flag column layout."""

import argparse

from rclass.streams import gaussian_stream, drifting_stream, write_csv


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("out", help="output CSV path")
    parser.add_argument("--n", type=int, default=800)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--std", type=float, default=0.05)
    parser.add_argument("--drift", action="store_true",
                        help="sudden drift at 50%% and cyclic return at 80%%")
    args = parser.parse_args()
    gen = drifting_stream if args.drift else gaussian_stream
    write_csv(gen(args.n, seed=args.seed, std=args.std), args.out)
    print(f"wrote {args.n} samples to {args.out}")


if __name__ == "__main__":
    main()
