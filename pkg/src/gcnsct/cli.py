"""Command line entry point.

Subcommands: verify, sweep, trajectory, heatmap, train, ttest. Every
command writes its artifacts (CSV/JSON, and SVG figures for the report
paths) into --out. Exit codes: 0 success, 1 property or assertion
failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .activations import leaky_relu, relu
from .control import SweepCurve, sweep
from .errors import ConfigError, InputError, NumericalError, ShapeError, TrainingError
from .generators import random_degree_graph
from .graphs import build_propagation_operator, eigenbasis
from .models import Model, ModelConfig
from .rng import stream
from .smoothness import normalized_smoothness
from .training import (
    Dataset,
    TrainConfig,
    build_model,
    dataset_from_files,
    sbm_dataset,
    t_score,
    train,
)
from .verify import run_all

DIST_SLACK = 1e-10

# the paper-style two-node demo system
TRAJECTORY_G = np.array([[0.592, 0.194], [0.194, 0.908]])
TRAJECTORY_WEIGHT = 1.2


def _json_dump(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_verify(args) -> int:
    out = _out_dir(args)
    results = run_all(args.seed, inject_fault=args.inject_fault)
    all_passed = all(r.passed for r in results)
    report = {
        "seed": args.seed,
        "all_passed": all_passed,
        "properties": [r.to_json_dict() for r in results],
    }
    _json_dump(out / "report.json", report)
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{status}  {r.name}  worst={r.worst:.3e}  tol={r.tolerance:.1e}")
    if not all_passed:
        failing = [r.name for r in results if not r.passed]
        print(f"failing properties: {failing}", file=sys.stderr)
        return 1
    return 0


def _sweep_chunks(z, basis, activation, alphas, direction, jobs):
    if jobs <= 1:
        return sweep(z, basis, activation, alphas, direction)
    chunks = np.array_split(alphas, jobs)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(sweep, z, basis, activation, c, direction) for c in chunks]
        parts = [f.result() for f in futures]
    return SweepCurve(
        alphas=np.concatenate([p.alphas for p in parts]),
        s_values=np.concatenate([p.s_values for p in parts]),
        dist_values=np.concatenate([p.dist_values for p in parts]),
        input_s=parts[0].input_s,
        input_dist=parts[0].input_dist,
    )


def cmd_sweep(args) -> int:
    from .plotting import save_sweep_panels

    out = _out_dir(args)
    graph = random_degree_graph(stream(args.seed, 10), n=args.nodes)
    op = build_propagation_operator(graph)
    basis = eigenbasis(graph, op)
    z = stream(args.seed, 11).uniform(-1.5, 1.5, size=graph.n)
    alphas = np.linspace(-1.5, 1.5, args.grid_points)
    # scale the shift by sqrt of the augmented degrees so the alpha range
    # covers the clipping transitions of the activations
    direction = np.sqrt(op.degrees)
    curves = {
        "relu": _sweep_chunks(z, basis, relu(), alphas, direction, args.jobs),
        "leaky_relu": _sweep_chunks(z, basis, leaky_relu(args.leaky_a), alphas, direction, args.jobs),
    }
    for name, curve in curves.items():
        (out / f"sweep_{name}.csv").write_text(curve.to_csv(), encoding="utf-8")
    save_sweep_panels(curves, out / "panel_a.svg", out / "panel_b.svg")
    for name, curve in curves.items():
        if np.any(curve.dist_values > curve.input_dist + DIST_SLACK):
            print(
                f"assertion failed: {name} sweep exceeded the input distance",
                file=sys.stderr,
            )
            return 1
    return 0


def trajectory_states(alpha: float, steps: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Iterate the two-node system from a 4 x 5 grid of starting points.

    Returns (points, eigvec) where points has shape (20, steps + 1, 2).
    The shift is alpha times the all-ones vector; its component off the
    eigenspace is what lets positive alpha push early iterates away from
    the smooth line.
    """
    w, v = np.linalg.eigh(TRAJECTORY_G)
    eigvec = v[:, int(np.argmax(w))]
    if eigvec[0] < 0:
        eigvec = -eigvec
    bias = alpha * np.ones(2)
    starts = [
        np.array([x, y])
        for x in np.linspace(-1.0, 1.0, 4)
        for y in np.linspace(-1.0, 1.0, 5)
    ]
    points = np.empty((len(starts), steps + 1, 2))
    for k, h in enumerate(starts):
        points[k, 0] = h
        for t in range(steps):
            h = np.maximum(TRAJECTORY_WEIGHT * (h @ TRAJECTORY_G) + bias, 0.0)
            points[k, t + 1] = h
    return points, eigvec


def cmd_trajectory(args) -> int:
    from .plotting import save_trajectories

    out = _out_dir(args)
    points, eigvec = trajectory_states(args.alpha, steps=args.steps)
    perp = np.array([-eigvec[1], eigvec[0]])
    lines = ["trajectory,step,x,y,dist"]
    for k in range(points.shape[0]):
        for t in range(points.shape[1]):
            x, y = points[k, t]
            dist = abs(float(points[k, t] @ perp))
            lines.append(f"{k},{t},{float(x)!r},{float(y)!r},{dist!r}")
    (out / "trajectories.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    save_trajectories(points, eigvec, out / "trajectories.svg")
    return 0


def _resolve_dataset(args, provenance: dict | None = None) -> tuple[Dataset, dict]:
    """Dataset from CLI flags, falling back to a saved model's provenance."""
    if getattr(args, "synthetic", False):
        if args.seed is None:
            raise InputError("--synthetic needs --seed")
        return sbm_dataset(args.seed), {"synthetic_seed": args.seed}
    if args.graph or args.features or args.labels or args.splits:
        if not (args.graph and args.features and args.labels and args.splits):
            raise InputError("file datasets need --graph, --features, --labels and --splits")
        prov = {
            "graph": str(args.graph),
            "features": str(args.features),
            "labels": str(args.labels),
            "splits": str(args.splits),
        }
        return dataset_from_files(args.graph, args.features, args.labels, args.splits), prov
    if provenance:
        if "synthetic_seed" in provenance:
            return sbm_dataset(provenance["synthetic_seed"]), provenance
        return (
            dataset_from_files(
                provenance["graph"],
                provenance["features"],
                provenance["labels"],
                provenance["splits"],
            ),
            provenance,
        )
    raise InputError("no dataset given: pass --synthetic or the four dataset paths")


def _load_configs(args) -> tuple[ModelConfig, TrainConfig]:
    model_data: dict = {}
    train_data: dict = {}
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        if "model" in data or "train" in data:
            model_data = dict(data.get("model", {}))
            train_data = dict(data.get("train", {}))
        else:
            model_data = dict(data)
    if args.seed is not None:
        model_data["seed"] = args.seed
        train_data["seed"] = args.seed
    return ModelConfig(**model_data), TrainConfig.from_json_dict(train_data)


def save_model(path: Path, model: Model, provenance: dict) -> None:
    payload = {
        "config": model.config.to_json_dict(),
        "d_in": model.d_in,
        "num_classes": model.num_classes,
        "params": {name: arr.tolist() for name, arr in model.params.items()},
        "dataset": provenance,
    }
    _json_dump(path, payload)


def load_model(path: Path, dataset: Dataset) -> Model:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    config = ModelConfig(**payload["config"])
    model = Model(
        config,
        payload["d_in"],
        payload["num_classes"],
        build_propagation_operator(dataset.graph),
        eigenbasis(dataset.graph, build_propagation_operator(dataset.graph)),
    )
    saved = payload["params"]
    if set(saved) != set(model.params):
        raise InputError("saved parameters do not match the model architecture")
    for name, value in saved.items():
        arr = np.asarray(value, dtype=np.float64)
        if arr.shape != model.params[name].shape:
            raise InputError(f"saved parameter {name} has shape {arr.shape}")
        model.params[name][...] = arr
    return model


def cmd_train(args) -> int:
    out = _out_dir(args)
    model_cfg, train_cfg = _load_configs(args)
    dataset, provenance = _resolve_dataset(args)
    model = build_model(model_cfg, dataset)
    result = train(model, dataset, train_cfg)
    _json_dump(out / "run_result.json", result.to_json_dict())
    save_model(out / "model.json", model, provenance)
    print(f"test accuracy {result.test_accuracy:.4f} (best epoch {result.best_epoch})")
    return 0


def cmd_heatmap(args) -> int:
    from .plotting import save_heatmap

    out = _out_dir(args)
    model_path = Path(args.model) if args.model else None
    if model_path is None or not model_path.exists():
        raise InputError(f"missing model file: {args.model!r}")
    payload = json.loads(model_path.read_text(encoding="utf-8"))
    dataset, _ = _resolve_dataset(args, payload.get("dataset"))
    model = load_model(model_path, dataset)
    fp = model.forward(dataset.features)
    matrix = np.array(
        [[normalized_smoothness(row, model.basis) for row in feat.value] for feat in fp.features]
    )
    header = "layer," + ",".join(f"s{j}" for j in range(matrix.shape[1]))
    lines = [header]
    for layer_index, row in enumerate(matrix):
        lines.append(f"{layer_index}," + ",".join(repr(float(v)) for v in row))
    (out / "smoothness_heatmap.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    save_heatmap(matrix, out / "smoothness_heatmap.svg")
    return 0


def _load_float_list(path) -> list[float]:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            values.append(float(line))
    if len(values) < 2:
        raise InputError(f"{path}: need at least two values")
    return values


def cmd_ttest(args) -> int:
    out = _out_dir(args)
    a = _load_float_list(args.file_a)
    b = _load_float_list(args.file_b)
    if len(a) != len(b):
        raise InputError(f"groups must have equal size, got {len(a)} and {len(b)}")
    n = len(a)
    mean_a, mean_b = float(np.mean(a)), float(np.mean(b))
    std_a, std_b = float(np.std(a, ddof=1)), float(np.std(b, ddof=1))
    score = t_score(mean_a, std_a, mean_b, std_b, n)
    _json_dump(
        out / "ttest.json",
        {
            "n": n,
            "mean_a": mean_a,
            "std_a": std_a,
            "mean_b": mean_b,
            "std_b": std_b,
            "t_score": score,
        },
    )
    print(f"t score {score:.4f} over n={n}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcnsct",
        description="Smoothness analysis and control experiments for graph convolutional features",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run every registered property suite")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--inject-fault", default=None, help="corrupt one property (negative control)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="shift sweep on the synthetic 100-node graph")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--nodes", type=int, default=100)
    p.add_argument("--grid-points", type=int, default=601)
    p.add_argument("--leaky-a", type=float, default=0.2)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trajectory", help="two-node feature trajectories")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="unused; the system is deterministic")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("heatmap", help="per-layer per-dimension smoothness of a trained model")
    p.add_argument("--model", default=None, help="model.json produced by the train command")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--synthetic", action="store_true")
    p.add_argument("--graph")
    p.add_argument("--features")
    p.add_argument("--labels")
    p.add_argument("--splits")
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("train", help="train a model and emit its run result")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None, help="JSON with model/train settings")
    p.add_argument("--synthetic", action="store_true", help="use the seeded two-block dataset")
    p.add_argument("--graph")
    p.add_argument("--features")
    p.add_argument("--labels")
    p.add_argument("--splits")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("ttest", help="compare two accuracy lists")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ttest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ConfigError, ShapeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, json.JSONDecodeError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, TrainingError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


def entry() -> None:  # console script hook
    sys.exit(main())


if __name__ == "__main__":
    entry()
