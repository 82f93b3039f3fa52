import argparse
import json
import os

import pandas as pd

from copresence import __version__
from copresence.commands.common import add_config_argument, resolve_config
from copresence.errors import StorageError
from copresence.logger import init_logger
from copresence.metrics import plot_bars
from copresence.model import load_checkpoint
from copresence.objectives import write_json
from copresence.weather_sim import read_image

logger = init_logger(__name__)


def add_parser(subparsers) -> None:
    parser = subparsers.add_parser(
        "predict", help="Per-weather probabilities and uncertainty of one image."
    )
    add_config_argument(parser)
    parser.add_argument("--checkpoint", type=str, required=True, help="Checkpoint file.")
    parser.add_argument("--image", type=str, required=True, help="Image file.")
    parser.add_argument("--out", type=str, default=None, help="JSON output path.")
    parser.add_argument("--svg", type=str, default=None, help="Optional SVG bar chart path.")
    parser.set_defaults(func=run)


def prediction_frame(categories, probabilities, uncertainties) -> pd.DataFrame:
    """Rows sorted by probability, highest first; ties keep category order."""
    frame = pd.DataFrame(
        {
            "category": list(categories),
            "probability": probabilities,
            "uncertainty": uncertainties,
        }
    )
    return frame.sort_values("probability", ascending=False, kind="stable").reset_index(drop=True)


def run(args: argparse.Namespace) -> int:
    resolve_config(args)
    model, meta = load_checkpoint(args.checkpoint)
    image = read_image(args.image, size=model.config.image_size)
    output = model.forward_infer(image)

    frame = prediction_frame(
        meta.categories, output.prediction[0], output.category_uncertainty[0]
    )
    overall = float(output.uncertainty[0])
    for row in frame.itertuples(index=False):
        print(f"{row.category:<12} {row.probability:.4f} {row.uncertainty:.4f}")
    print(f"{'overall':<12} {'':6} {overall:.4f}")

    payload = {
        "image": args.image,
        "checkpoint": args.checkpoint,
        "predictions": frame.to_dict(orient="records"),
        "uncertainty": overall,
        "config": meta.extra.get("config", {}),
        "version": __version__,
    }
    if args.out:
        write_json(payload, args.out)
    else:
        logger.debug(json.dumps(payload["predictions"]))

    if args.svg:
        directory = os.path.dirname(args.svg) or "."
        name = os.path.splitext(os.path.basename(args.svg))[0]
        try:
            os.makedirs(directory, exist_ok=True)
        except OSError as e:
            raise StorageError(f"Cannot create {directory}: {e}") from None
        plot_bars(frame, "category", "probability", directory, name)
    return 0
