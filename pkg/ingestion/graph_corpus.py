"""
Build a deduplicated graph corpus with exact linear rank-width.

Reads one or more graph6 files, keeps one graph per isomorphism class and
records n, m, linear rank-width and a witness order for each.

Usage:
    python ingestion/graph_corpus.py graphs/*.g6 --out data/corpus.json
"""

import json
import sys
import logging
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

import click
from dotenv import load_dotenv
from tqdm import tqdm

from widthkit.errors import BudgetExceeded, WidthKitError
from widthkit.formats import read_graph6_file
from widthkit.graph import canonical_form, linear_rank_width


# ----------------------------
# Logging
# ----------------------------
log_dir = Path(__file__).parent
log_dir.mkdir(exist_ok=True)

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(levelname)s - %(message)s",
    handlers=[
        logging.FileHandler(log_dir / "graph_corpus.log"),
        logging.StreamHandler(),
    ],
)
logger = logging.getLogger(__name__)

load_dotenv()

DATA_DIR = Path(__file__).parent.parent / "data"


# ----------------------------
# Corpus
# ----------------------------
def build_corpus(paths, skip_over_budget=True):
    """One record per isomorphism class, sorted by (n, canonical form)."""
    records = {}
    for path in paths:
        graphs = read_graph6_file(path)
        logger.info(f"📥 {len(graphs)} graph(s) from {path}")
        for g in tqdm(graphs, desc=Path(path).name, disable=not sys.stderr.isatty()):
            key = canonical_form(g)
            if key in records:
                continue
            try:
                width, layout = linear_rank_width(g)
            except BudgetExceeded as e:
                if not skip_over_budget:
                    raise
                logger.warning(f"Skipping {g.to_graph6()}: {e}")
                continue
            records[key] = {
                "graph6": g.to_graph6(),
                "canonical": key,
                "n": g.n,
                "m": len(g.edges()),
                "lrw": width,
                "layout": list(layout),
            }
    return sorted(records.values(), key=lambda r: (r["n"], r["canonical"]))


@click.command()
@click.argument("files", nargs=-1, required=True)
@click.option("--out", default=str(DATA_DIR / "corpus.json"), help="Where to write the corpus JSON.")
@click.option("--strict", is_flag=True, help="Fail instead of skipping graphs over the budget.")
def main(files, out, strict):
    try:
        corpus = build_corpus(files, skip_over_budget=not strict)
    except (WidthKitError, OSError) as e:
        logger.error(f"❌ Corpus build failed: {e}")
        sys.exit(1)

    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(json.dumps(corpus, indent=2, sort_keys=True) + "\n")

    logger.info("=" * 60)
    logger.info(f"✅ {len(corpus)} distinct graph(s) written to {out}")
    logger.info("=" * 60)


if __name__ == "__main__":
    main()
