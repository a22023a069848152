"""
widthkit command line.

Usage:
    python cli.py pathwidth data/u24_gf3.txt
    python cli.py lrw data/p4.adj
    python cli.py obstruct --kind graph --k 0 --max-size 7 --out certs/
    python cli.py bounds --k 0 --q 2
"""

import functools
import logging
import sys
from pathlib import Path

import click
from dotenv import load_dotenv

from widthkit import config, connfn
from widthkit.errors import BudgetExceeded, WidthKitError
from widthkit.ffla import FieldSpec
from widthkit.formats import RunManifest, digest, dump_json, load_graph, read_configuration
from widthkit.fullset import from_configuration, full_set
from widthkit.graph import Graph, apply_pivots, cut_rank_function, graph_linking_minor, linear_rank_width
from widthkit.linking import linking_certificate
from widthkit.matroid import boundary, connectivity_function, path_width
from widthkit.obstruct import (
    bound_constants,
    check_antichain,
    compact_count_table,
    reenact_graph_pipeline,
    reenact_main_pipeline,
    revalidate,
    search_obstructions,
    write_certificate_db,
)

load_dotenv()

# -------------------- Setup --------------------

logging.basicConfig(
    level=config.LOG_LEVEL, format="%(asctime)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)

# -------------------- Helpers --------------------


def handle_errors(fn):
    """Budget overruns exit 2, bad input or a failed check exits 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except BudgetExceeded as e:
            logger.error(f"❌ Budget exceeded: {e}")
            sys.exit(2)
        except (WidthKitError, OSError) as e:
            logger.error(f"❌ {e}")
            sys.exit(1)

    return wrapper


def manifest(subcommand: str, **inputs: str) -> dict:
    return RunManifest(
        subcommand=subcommand,
        inputs={name: digest(text) for name, text in inputs.items()},
        budgets={
            "budget_n": config.BUDGET_N,
            "fullset_budget": config.FULLSET_BUDGET,
            "orbit_budget": config.ORBIT_BUDGET,
            "compact_limit": config.COMPACT_LIMIT,
        },
        seed=config.SEED,
    ).model_dump()


def emit(data: dict, out: str | None):
    text = dump_json(data)
    if out:
        Path(out).write_text(text)
        logger.info(f"✅ Wrote {out}")
    else:
        click.echo(text, nl=False)


def read_input(path: str) -> str:
    return Path(path).read_text()


def split_labels(text: str | None) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()] if text else []


def split_vertices(text: str | None) -> list[int]:
    try:
        return [int(t) for t in split_labels(text)]
    except ValueError:
        raise WidthKitError(f"vertices must be integers, got {text!r}") from None


def field_of(ctx: click.Context) -> FieldSpec:
    return ctx.obj["field"]


# -------------------- Group --------------------


@click.group()
@click.option("--budget-n", type=int, default=None, help="Largest ground set searched exhaustively.")
@click.option("--workers", type=int, default=None, help="Parallel workers for obstruction search.")
@click.option("--seed", type=int, default=None, help="Seed for sampling and shuffles.")
@click.option("--field", "field_pm", type=int, nargs=2, default=None, help="Default field GF(P^M).")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
@click.pass_context
@handle_errors
def cli(ctx, budget_n, workers, seed, field_pm, verbose):
    """Exact path-width, linear rank-width and obstruction tooling."""
    if budget_n is not None:
        config.BUDGET_N = budget_n
    if workers is not None:
        config.WORKERS = workers
    if seed is not None:
        config.SEED = seed
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    ctx.obj = {"field": FieldSpec(*field_pm) if field_pm else FieldSpec(2)}


# -------------------- Widths --------------------


@cli.command()
@click.argument("config_file")
@click.option("--out", default=None, help="Write JSON here instead of stdout.")
@click.pass_context
@handle_errors
def pathwidth(ctx, config_file, out):
    """Path-width of a configuration file, with a witness layout."""
    a = read_configuration(config_file, field_of(ctx))
    width, layout = path_width(a)
    profile = connfn.cut_profile(connectivity_function(a), layout)
    logger.info(f"✅ path-width {width} over {a.size} elements")
    emit({
        "width": width,
        "layout": list(layout),
        "profile": list(profile.values),
        "manifest": manifest("pathwidth", config=read_input(config_file)),
    }, out)


@cli.command()
@click.argument("graph")
@click.option("--out", default=None)
@handle_errors
def lrw(graph, out):
    """Linear rank-width of a graph6 string or graph file."""
    g = load_graph(graph)
    width, layout = linear_rank_width(g)
    logger.info(f"✅ linear rank-width {width} over {g.n} vertices")
    emit({
        "width": width,
        "layout": list(layout),
        "graph6": g.to_graph6(),
        "manifest": manifest("lrw", graph=g.to_graph6()),
    }, out)


@cli.command()
@click.option("--config", "config_file", default=None, help="Configuration file.")
@click.option("--graph", default=None, help="graph6 string or graph file.")
@click.option("--layout", default=None, help="Comma-separated layout to verify; omit to emit one.")
@click.option("--out", default=None)
@click.pass_context
@handle_errors
def linked(ctx, config_file, graph, layout, out):
    """Verify a layout is linked, or emit the first linked optimal layout."""
    if (config_file is None) == (graph is None):
        raise WidthKitError("give exactly one of --config and --graph")
    if config_file:
        f = connectivity_function(read_configuration(config_file, field_of(ctx)))
        sigma = split_labels(layout)
        source = read_input(config_file)
    else:
        g = load_graph(graph)
        f = cut_rank_function(g)
        sigma = split_vertices(layout)
        source = g.to_graph6()
    if layout is None:
        sigma = list(connfn.find_linked_optimal(f))
    defect = connfn.linkage_defect(f, sigma)
    if defect is None:
        logger.info("✅ layout is linked")
    else:
        logger.info(f"Layout is not linked: window {defect}")
    emit({
        "layout": [str(e) for e in sigma],
        "width": connfn.width(f, sigma),
        "linked": defect is None,
        "defect": list(defect) if defect else None,
        "manifest": manifest("linked", input=source),
    }, out)


# -------------------- Full sets and linking --------------------


@cli.command()
@click.argument("config_file")
@click.option("--k", "k", type=int, required=True)
@click.option("--part", default=None, help="Comma-separated labels X; B is the boundary of X. Default: all.")
@click.option("--out", default=None)
@click.pass_context
@handle_errors
def fullset(ctx, config_file, k, part, out):
    """Full set of a part of a configuration over its boundary."""
    a = read_configuration(config_file, field_of(ctx))
    x = split_labels(part) or list(a.labels)
    b = boundary(a, x)
    fs = full_set(from_configuration(a).restrict(x), b, k)
    logger.info(f"✅ |FS| = {len(fs)} over dim B = {b.dim}")
    emit({**fs.to_json(), "manifest": manifest("fullset", config=read_input(config_file))}, out)


@cli.command()
@click.option("--config", "config_file", default=None)
@click.option("--graph", default=None)
@click.option("--s", "s", required=True, help="Comma-separated S.")
@click.option("--t", "t", required=True, help="Comma-separated T.")
@click.option("--out", default=None)
@click.pass_context
@handle_errors
def link(ctx, config_file, graph, s, t, out):
    """Linking certificate between S and T (matroid minor or graph pivot-minor)."""
    if (config_file is None) == (graph is None):
        raise WidthKitError("give exactly one of --config and --graph")
    if config_file:
        a = read_configuration(config_file, field_of(ctx))
        cert = linking_certificate(a, split_labels(s), split_labels(t))
        logger.info(f"✅ linked at {cert.k}: C={cert.contract}, D={cert.delete}")
        emit({**cert.model_dump(), "manifest": manifest("link", config=read_input(config_file))}, out)
        return
    g = load_graph(graph)
    result = graph_linking_minor(g, split_vertices(s), split_vertices(t))
    logger.info(f"✅ linked at {result.k} after {len(result.pivots)} pivot(s)")
    emit({
        "k": result.k,
        "vertices": list(result.vertices),
        "minor": result.minor.to_graph6(),
        "member": result.member.to_graph6(),
        "pivots": [list(p) for p in result.pivots],
        "manifest": manifest("link", graph=g.to_graph6()),
    }, out)


@cli.command()
@click.argument("graph")
@click.option("--pivots", required=True, help="Edges to pivot on in order, e.g. 0-1,1-2.")
@click.option("--out", default=None)
@handle_errors
def pivot(graph, pivots, out):
    """Apply a sequence of pivots."""
    g = load_graph(graph)
    steps = []
    for item in split_labels(pivots):
        try:
            u, v = (int(x) for x in item.split("-"))
        except ValueError:
            raise WidthKitError(f"pivot {item!r} is not of the form u-v") from None
        steps.append((u, v))
    h = apply_pivots(g, steps)
    emit({
        "graph6": h.to_graph6(),
        "edges": [list(e) for e in h.edges()],
        "manifest": manifest("pivot", graph=g.to_graph6()),
    }, out)


# -------------------- Obstructions --------------------


@cli.command()
@click.option("--kind", type=click.Choice(["graph", "matroid"]), required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--max-size", type=int, required=True, help="Vertex / element cap.")
@click.option("--max-rank", type=int, default=None, help="Rank cap for binary matroids.")
@click.option("--out", default=None, help="Certificate directory.")
@click.option("--revalidate/--no-revalidate", "second_pass", default=True)
@click.pass_context
@handle_errors
def obstruct(ctx, kind, k, max_size, max_rank, out, second_pass):
    """Search every obstruction up to a size cap and certify it."""
    certs = search_obstructions(
        kind, k, max_size, field=field_of(ctx), max_rank=max_rank, progress=sys.stderr.isatty()
    )
    if second_pass:
        again = search_obstructions(kind, k, max_size, field=field_of(ctx), max_rank=max_rank, shuffle=True)
        if again != certs or not all(revalidate(c) for c in certs) or not check_antichain(certs):
            raise WidthKitError("second pass disagrees with the first")
        logger.info("✅ second pass agrees")
    run = manifest("obstruct", kind=kind, k=str(k), max_size=str(max_size), max_rank=str(max_rank))
    if out:
        write_certificate_db(certs, out, run)
        return
    emit({
        "certificates": [c.model_dump(mode="json") for c in certs],
        "manifest": run,
    }, None)


@cli.command()
@click.option("--k", "k", type=int, required=True)
@click.option("--q", "q", type=int, default=None, help="Field order; defaults to --field.")
@click.option("--ell", type=int, default=4)
@click.option("--height", type=int, default=None, help="Profile height; defaults to k.")
@click.option("--exact", is_flag=True, help="Print ell for matroids as a full integer when small enough.")
@click.pass_context
@handle_errors
def bounds(ctx, k, q, ell, height, exact):
    """The compact-count bound, the repeated-cut threshold and the ell constants."""
    q = q if q is not None else field_of(ctx).q
    consts = bound_constants(k, q)
    threshold = connfn.repeated_cuts_threshold(ell, k if height is None else height)
    data = {
        "k": k,
        "q": q,
        "compact_count_bound": {str(theta): value for theta, value in compact_count_table(k, q).items()},
        "repeated_cuts_threshold": {"ell": ell, "height": k if height is None else height, "value": str(threshold)},
        **consts.describe(),
    }
    if exact and consts.ell_matroid is not None:
        if hasattr(sys, "set_int_max_str_digits"):
            sys.set_int_max_str_digits(0)
        data["ell_matroid_exact"] = str(consts.ell_matroid)
    emit(data, None)


@cli.command()
@click.option("--config", "config_file", default=None)
@click.option("--graph", default=None)
@click.option("--k", "k", type=int, required=True)
@click.option("--ell", type=int, default=4)
@click.option("--out", default=None)
@click.pass_context
@handle_errors
def reenact(ctx, config_file, graph, k, ell, out):
    """Run the shrinking argument on one instance, checking every step."""
    if (config_file is None) == (graph is None):
        raise WidthKitError("give exactly one of --config and --graph")
    if config_file:
        report = reenact_main_pipeline(read_configuration(config_file, field_of(ctx)), k, ell)
        source = {"config": read_input(config_file)}
    else:
        g: Graph = load_graph(graph)
        report = reenact_graph_pipeline(g, k, ell)
        source = {"graph": g.to_graph6()}
    emit({**report.model_dump(mode="json"), "manifest": manifest("reenact", **source)}, out)
    if report.status == "failed":
        raise WidthKitError(f"{report.kind} pipeline failed at {report.steps[-1].name}")
    logger.info(f"✅ {report.kind} pipeline {report.status}")


if __name__ == "__main__":
    cli()
