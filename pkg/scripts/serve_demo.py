#!/usr/bin/env python3
"""Serve a paced interactive run for the operator console.

Generates a synthetic stream, starts the HTTP service, and waits for label
answers from a connected console.  Point a browser at the printed address
(the console build in frontend/dist is served when present).
"""

import argparse
import pathlib
import threading

from rclass.config import HyperParams
from rclass.dataset import CLASS_NAMES
from rclass.learner import OnlineLearner
from rclass.service import EngineServer, make_http_server, parse_bind
from rclass.streams import gaussian_stream

FRONTEND_DIST = pathlib.Path(__file__).resolve().parents[1] / "frontend" / "dist"


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--bind", default="127.0.0.1:8787")
    parser.add_argument("--n", type=int, default=300)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--timeout", type=float, default=120.0,
                        help="seconds to wait for each label answer")
    parser.add_argument("--pace", type=float, default=0.4,
                        help="seconds between samples")
    args = parser.parse_args()

    cfg = HyperParams(budget=0.5, init_radius=0.05, recurrent_init=1.0)
    learner = OnlineLearner(4, 4, cfg)
    stream = gaussian_stream(args.n, seed=args.seed, std=0.05)
    engine = EngineServer(
        learner, stream, (args.n, 0), oracle_kind="interactive",
        timeout_s=args.timeout, seed=args.seed, class_names=CLASS_NAMES,
        static_dir=str(FRONTEND_DIST) if FRONTEND_DIST.is_dir() else None,
        pace_s=args.pace,
    )
    host, port = parse_bind(args.bind)
    httpd = make_http_server(engine, host, port)
    threading.Thread(target=httpd.serve_forever, daemon=True).start()
    real_host, real_port = httpd.server_address
    print(f"console:  http://{real_host}:{real_port}/")
    print(f"protocol: http://{real_host}:{real_port}/state")
    try:
        report = engine.run_engine()
        print(f"done: labeled {report.labeled_count} of {args.n}, "
              f"{report.final_rule_count} rules")
        print("serving traces until interrupted (Ctrl+C)")
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.shutdown()


if __name__ == "__main__":
    main()
