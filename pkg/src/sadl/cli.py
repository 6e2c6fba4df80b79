"""Command-line interface.

Every subcommand is a thin client of the HTTP service: by default requests
run against an in-process instance of the app (no server needed); pass
--server to target a running one. Exit codes: 0 success, 1 usage or config
error, 2 data error, 3 numerical failure.
"""

import argparse
import sys

import httpx

from .client import ServiceClient

_EXIT_BY_CATEGORY = {"config": 1, "data": 2, "numerical": 3}


class _Parser(argparse.ArgumentParser):
    """argparse's default usage-error exit code is 2; this ties it to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="sadl", description=__doc__)
    parser.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from a config and a dataset")
    p.add_argument("--config", required=True, help="training config file")
    p.add_argument("--data", required=True, help="training dataset file")
    p.add_argument("--model", required=True, help="output model path")
    p.add_argument("--out", default=None, help="objective-trace CSV path")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--mode", choices=["sadl", "plain_adl", "ridge"], default=None)
    p.add_argument("--block-rows", type=int, default=None,
                   help="uniform structure-block height per class")

    p = sub.add_parser("eval", help="evaluate a model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--reps", type=int, default=1, help="timing repetitions")
    p.add_argument("--out", default=None, help="CSV report path")

    p = sub.add_parser("predict", help="predict classes for a dataset file")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)

    p = sub.add_parser("synth", help="generate a synthetic subspace dataset")
    p.add_argument("--out", required=True, help="output prefix (writes PREFIX-train.ds, PREFIX-test.ds)")
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--subspace-dim", type=int, default=5)
    p.add_argument("--ambient-dim", type=int, default=32)
    p.add_argument("--train-per-class", type=int, default=40)
    p.add_argument("--test-per-class", type=int, default=20)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--binary", action="store_true", help="write the binary form")

    p = sub.add_parser("bench", help="dictionary-size sweep with repeated realizations")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--sizes", required=True,
                   help="comma-separated dictionary sizes, e.g. 8,16,32")
    p.add_argument("--reps", type=int, default=1, help="realizations per size")
    p.add_argument("--out", default=None, help="results CSV path")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mode", choices=["sadl", "plain_adl", "ridge"], default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--train-fraction", type=float, default=0.5)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    return parser


def _call(client: ServiceClient, path: str, payload: dict):
    """POST and unwrap; returns body on success, exits on error."""
    try:
        status, body = client.post(path, payload)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        raise SystemExit(1)
    if status == 200:
        return body
    detail = body.get("detail", {}) if isinstance(body, dict) else {}
    if isinstance(detail, dict):
        category = detail.get("category", "config")
        message = detail.get("message", str(body))
    else:
        category, message = "config", str(detail)
    print(f"error ({category}): {message}", file=sys.stderr)
    raise SystemExit(_EXIT_BY_CATEGORY.get(category, 1))


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    client = ServiceClient(args.server)

    if args.command == "train":
        body = _call(client, "/train", {
            "config_path": args.config, "data_path": args.data,
            "model_out": args.model, "trace_out": args.out,
            "seed": args.seed, "mode": args.mode, "block_rows": args.block_rows,
        })
        print(f"model written to {body['model_path']}")
        print(f"trace written to {body['trace_path']}")
        print(f"mode {body['mode']}, {body['iterations']} iterations, "
              f"{body['train_seconds']:.3f} s")
        if body["final_objective"] is not None:
            print(f"final objective {body['final_objective']:.6g}")
            print(f"final residuals H {body['final_residual_h']:.6g}, "
                  f"L {body['final_residual_l']:.6g}")
        return 0

    if args.command == "eval":
        body = _call(client, "/eval", {
            "model_path": args.model, "data_path": args.data,
            "reps": args.reps, "out": args.out,
        })
        print(body["table"])
        if body["report_path"]:
            print(f"report written to {body['report_path']}")
        return 0

    if args.command == "predict":
        body = _call(client, "/predict",
                     {"model_path": args.model, "data_path": args.data})
        print(" ".join(str(v) for v in body["labels"]))
        return 0

    if args.command == "synth":
        body = _call(client, "/synth", {
            "classes": args.classes, "subspace_dim": args.subspace_dim,
            "ambient_dim": args.ambient_dim,
            "per_class_train": args.train_per_class,
            "per_class_test": args.test_per_class,
            "noise_sigma": args.noise, "seed": args.seed,
            "train_out": f"{args.out}-train.ds", "test_out": f"{args.out}-test.ds",
            "binary": args.binary,
        })
        print(f"train set: {body['train_path']} ({body['train_samples']} samples)")
        print(f"test set:  {body['test_path']} ({body['test_samples']} samples)")
        return 0

    if args.command == "bench":
        try:
            sizes = [int(v) for v in args.sizes.split(",") if v.strip()]
        except ValueError:
            print(f"error: --sizes must be comma-separated integers: {args.sizes}",
                  file=sys.stderr)
            return 1
        body = _call(client, "/bench", {
            "config_path": args.config, "data_path": args.data, "sizes": sizes,
            "realizations": args.reps, "out": args.out, "seed": args.seed,
            "mode": args.mode, "workers": args.workers,
            "train_fraction": args.train_fraction,
        })
        for warning in body["warnings"]:
            print(f"warning: {warning}", file=sys.stderr)
        print(f"{'size':>6} {'mean acc':>9} {'std':>8} {'train (s)':>10} {'test (s)':>11}")
        for row in body["summary"]:
            print(f"{row['size']:>6} {row['mean_accuracy']:>9.4f} "
                  f"{row['std_accuracy']:>8.4f} {row['mean_train_s']:>10.3f} "
                  f"{row['mean_test_s_per_sample']:>11.3e}")
        if body["csv_path"]:
            print(f"rows written to {body['csv_path']}")
            print(f"summary written to {body['summary_csv_path']}")
        return 0

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
